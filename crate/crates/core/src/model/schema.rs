//! Variable names, their domains, and the families' partition of writables.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Index of a variable name in a [`VariableSchema`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub usize);

/// Zero-based family index; family `FamilyId(0)` is the first declared one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FamilyId(pub usize);

impl FamilyId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0 + 1)
    }
}

/// Value domain of a variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Non-negative 64-bit integers.
    Natural,
    /// Any signed 64-bit integer.
    Integer,
    /// A small explicit set of values.
    Finite(Vec<i64>),
}

impl Domain {
    pub fn contains(&self, value: i64) -> bool {
        match self {
            Domain::Natural => value >= 0,
            Domain::Integer => true,
            Domain::Finite(values) => values.contains(&value),
        }
    }

    /// Value used when an initial configuration omits a variable.
    pub fn default_value(&self) -> i64 {
        match self {
            Domain::Finite(values) if !values.contains(&0) => values[0],
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Constant,
    Writable(FamilyId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub domain: Domain,
}

/// Constants and writables, with the partition `Var_1 ⊎ ... ⊎ Var_k` of the
/// writable names among the `k` families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSchema {
    vars: Vec<VarDecl>,
    index: HashMap<String, VarId>,
    partition: Vec<Vec<VarId>>,
}

impl VariableSchema {
    pub fn builder() -> SchemaBuilder {
        SchemaBuilder::default()
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn decl(&self, v: VarId) -> &VarDecl {
        &self.vars[v.0]
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.vars[v.0].name
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    /// Like [`lookup`](Self::lookup) but with an error naming the variable.
    pub fn var(&self, name: &str) -> Result<VarId, ModelError> {
        self.lookup(name)
            .ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
    }

    /// Number of blocks in the partition (`k`).
    pub fn family_count(&self) -> usize {
        self.partition.len()
    }

    /// `Var_i`: the writable names owned by `family`.
    pub fn block(&self, family: FamilyId) -> &[VarId] {
        &self.partition[family.0]
    }

    /// The family writing `v`, or `None` for constants.
    pub fn writer(&self, v: VarId) -> Option<FamilyId> {
        match self.vars[v.0].kind {
            VarKind::Writable(f) => Some(f),
            VarKind::Constant => None,
        }
    }

    pub fn constants(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.len())
            .map(VarId)
            .filter(|&v| self.writer(v).is_none())
    }

    pub fn writables(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.len())
            .map(VarId)
            .filter(|&v| self.writer(v).is_some())
    }
}

#[derive(Debug, Default)]
pub struct SchemaBuilder {
    vars: Vec<VarDecl>,
}

impl SchemaBuilder {
    pub fn constant(mut self, name: &str, domain: Domain) -> Self {
        self.vars.push(VarDecl {
            name: name.to_string(),
            kind: VarKind::Constant,
            domain,
        });
        self
    }

    /// Declares a writable owned by the zero-based `family`.
    pub fn writable(mut self, name: &str, family: usize, domain: Domain) -> Self {
        self.vars.push(VarDecl {
            name: name.to_string(),
            kind: VarKind::Writable(FamilyId(family)),
            domain,
        });
        self
    }

    pub fn build(self) -> Result<VariableSchema, ModelError> {
        let mut index = HashMap::new();
        for (i, decl) in self.vars.iter().enumerate() {
            if index.insert(decl.name.clone(), VarId(i)).is_some() {
                return Err(ModelError::DuplicateVariable(decl.name.clone()));
            }
            if let Domain::Finite(values) = &decl.domain {
                if values.is_empty() {
                    return Err(ModelError::EmptyDomain(decl.name.clone()));
                }
            }
        }
        let k = self
            .vars
            .iter()
            .filter_map(|d| match d.kind {
                VarKind::Writable(f) => Some(f.0 + 1),
                VarKind::Constant => None,
            })
            .max()
            .unwrap_or(0);
        let mut partition = vec![Vec::new(); k];
        for (i, decl) in self.vars.iter().enumerate() {
            if let VarKind::Writable(f) = decl.kind {
                partition[f.0].push(VarId(i));
            }
        }
        if let Some(empty) = partition.iter().position(Vec::is_empty) {
            return Err(ModelError::EmptyBlock(FamilyId(empty)));
        }
        Ok(VariableSchema {
            vars: self.vars,
            index,
            partition,
        })
    }
}
