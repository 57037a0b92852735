use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::{
    Configuration, EvalError, FamilyId, ForestNetwork, LocalView, ModelError, NodeId, ReadDecl,
    ReadSet, VarId, VariableSchema,
};

pub type GuardFn = dyn Fn(&LocalView<'_>) -> Result<bool, EvalError> + Send + Sync;
/// Returns one value per entry of [`FamilySpec::writes`], in that order.
pub type StatementFn = dyn Fn(&LocalView<'_>) -> Result<Vec<i64>, EvalError> + Send + Sync;
pub type LegitimacyFn = dyn Fn(&ForestNetwork, &Configuration) -> bool + Send + Sync;

/// One family of guarded actions `A_i = { A_i(p) : p ∈ V }`.
#[derive(Clone)]
pub struct FamilySpec {
    label: String,
    reads: ReadSet,
    writes: Vec<VarId>,
    guard: Arc<GuardFn>,
    statement: Arc<StatementFn>,
}

impl FamilySpec {
    pub fn new(
        label: impl Into<String>,
        reads: impl IntoIterator<Item = ReadDecl>,
        writes: Vec<VarId>,
        guard: impl Fn(&LocalView<'_>) -> Result<bool, EvalError> + Send + Sync + 'static,
        statement: impl Fn(&LocalView<'_>) -> Result<Vec<i64>, EvalError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            reads: reads.into_iter().collect(),
            writes,
            guard: Arc::new(guard),
            statement: Arc::new(statement),
        }
    }

    pub(crate) fn from_parts(
        label: String,
        reads: ReadSet,
        writes: Vec<VarId>,
        guard: Arc<GuardFn>,
        statement: Arc<StatementFn>,
    ) -> Self {
        Self {
            label,
            reads,
            writes,
            guard,
            statement,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn reads(&self) -> &ReadSet {
        &self.reads
    }

    pub fn writes(&self) -> &[VarId] {
        &self.writes
    }

    pub fn guard_fn(&self) -> &Arc<GuardFn> {
        &self.guard
    }

    pub fn statement_fn(&self) -> &Arc<StatementFn> {
        &self.statement
    }

    /// Same family with one read declaration removed (used to probe monotonicity).
    pub fn without_read(&self, decl: &ReadDecl) -> Self {
        let mut out = self.clone();
        out.reads.remove(decl);
        out
    }
}

impl fmt::Debug for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilySpec")
            .field("label", &self.label)
            .field("reads", &self.reads)
            .field("writes", &self.writes)
            .finish_non_exhaustive()
    }
}

/// A well-formed algorithm: `k` families, family `i` writing exactly `Var_i`.
#[derive(Clone)]
pub struct AlgorithmSpec {
    name: String,
    schema: Arc<VariableSchema>,
    families: Vec<FamilySpec>,
    legitimacy: Option<Arc<LegitimacyFn>>,
}

impl AlgorithmSpec {
    pub fn new(
        name: impl Into<String>,
        schema: VariableSchema,
        families: Vec<FamilySpec>,
    ) -> Result<Self, ModelError> {
        Self::with_shared_schema(name, Arc::new(schema), families)
    }

    pub(crate) fn with_shared_schema(
        name: impl Into<String>,
        schema: Arc<VariableSchema>,
        families: Vec<FamilySpec>,
    ) -> Result<Self, ModelError> {
        if families.len() != schema.family_count() {
            return Err(ModelError::FamilyCountMismatch {
                partition: schema.family_count(),
                families: families.len(),
            });
        }
        for (i, family) in families.iter().enumerate() {
            let declared: BTreeSet<VarId> = family.writes.iter().copied().collect();
            let block: BTreeSet<VarId> = schema.block(FamilyId(i)).iter().copied().collect();
            if declared != block || declared.len() != family.writes.len() {
                return Err(ModelError::WritesMismatch(family.label.clone()));
            }
            if let Some(bad) = family.reads.iter().find(|r| r.var.0 >= schema.len()) {
                return Err(ModelError::UnknownVariable(format!("#{}", bad.var.0)));
            }
        }
        Ok(Self {
            name: name.into(),
            schema,
            families,
            legitimacy: None,
        })
    }

    /// Attaches the specification predicate `SP`.
    pub fn with_legitimacy(
        mut self,
        predicate: impl Fn(&ForestNetwork, &Configuration) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.legitimacy = Some(Arc::new(predicate));
        self
    }

    pub(crate) fn with_legitimacy_arc(mut self, predicate: Option<Arc<LegitimacyFn>>) -> Self {
        self.legitimacy = predicate;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schema(&self) -> &VariableSchema {
        &self.schema
    }

    pub(crate) fn schema_arc(&self) -> &Arc<VariableSchema> {
        &self.schema
    }

    pub fn families(&self) -> &[FamilySpec] {
        &self.families
    }

    pub fn family(&self, f: FamilyId) -> &FamilySpec {
        &self.families[f.0]
    }

    pub fn family_ids(&self) -> impl Iterator<Item = FamilyId> {
        (0..self.families.len()).map(FamilyId)
    }

    /// Number of families, `k`.
    pub fn k(&self) -> usize {
        self.families.len()
    }

    pub fn family_by_label(&self, label: &str) -> Option<FamilyId> {
        self.families
            .iter()
            .position(|f| f.label == label)
            .map(FamilyId)
    }

    pub fn legitimacy(&self) -> Option<&Arc<LegitimacyFn>> {
        self.legitimacy.as_ref()
    }

    /// Evaluates `SP`, or `None` when the algorithm has none registered.
    pub fn is_legitimate(&self, net: &ForestNetwork, cfg: &Configuration) -> Option<bool> {
        self.legitimacy.as_ref().map(|sp| sp(net, cfg))
    }

    pub fn view<'a>(
        &'a self,
        net: &'a ForestNetwork,
        cfg: &'a Configuration,
        p: NodeId,
        f: FamilyId,
    ) -> LocalView<'a> {
        LocalView::new(net, &self.schema, cfg, p, &self.families[f.0].reads)
    }

    pub fn eval_guard(
        &self,
        net: &ForestNetwork,
        cfg: &Configuration,
        p: NodeId,
        f: FamilyId,
    ) -> Result<bool, EvalError> {
        (self.families[f.0].guard)(&self.view(net, cfg, p, f))
    }

    /// Evaluates the statement, checking arity and domains of the result.
    pub fn eval_statement(
        &self,
        net: &ForestNetwork,
        cfg: &Configuration,
        p: NodeId,
        f: FamilyId,
    ) -> Result<Vec<i64>, EvalError> {
        let family = &self.families[f.0];
        let values = (family.statement)(&self.view(net, cfg, p, f))?;
        if values.len() != family.writes.len() {
            return Err(EvalError::Arity {
                expected: family.writes.len(),
                got: values.len(),
            });
        }
        for (&v, &value) in family.writes.iter().zip(&values) {
            let decl = self.schema.decl(v);
            if !decl.domain.contains(value) {
                return Err(EvalError::DomainViolation {
                    var: decl.name.clone(),
                    value,
                });
            }
        }
        Ok(values)
    }
}

impl fmt::Debug for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgorithmSpec")
            .field("name", &self.name)
            .field("families", &self.families)
            .field("legitimacy", &self.legitimacy.is_some())
            .finish()
    }
}
