use std::fmt;

use super::{ForestNetwork, ModelError, NodeId, VarId, VariableSchema};

/// Total assignment of every variable (constants included) at every node.
///
/// Values are stored row-major: node `p` owns `values[p * width .. (p + 1) * width]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    width: usize,
    values: Vec<i64>,
}

impl Configuration {
    /// Builds a configuration whose constants come from `net` and whose
    /// writables come from `init`. Every value is checked against its domain.
    pub fn new(
        net: &ForestNetwork,
        schema: &VariableSchema,
        mut init: impl FnMut(NodeId, VarId) -> i64,
    ) -> Result<Self, ModelError> {
        let width = schema.len();
        let mut values = Vec::with_capacity(width * net.len());
        for p in net.nodes() {
            for (i, decl) in schema.vars().iter().enumerate() {
                let v = VarId(i);
                let value = match schema.writer(v) {
                    None => {
                        net.constant(p, &decl.name)
                            .ok_or_else(|| ModelError::MissingConstant {
                                node: p,
                                name: decl.name.clone(),
                            })?
                    }
                    Some(_) => init(p, v),
                };
                if !decl.domain.contains(value) {
                    return Err(ModelError::OutOfDomain {
                        node: p,
                        name: decl.name.clone(),
                        value,
                    });
                }
                values.push(value);
            }
        }
        Ok(Self { width, values })
    }

    /// Every writable at its domain default (0 for integer domains).
    pub fn zeroed(net: &ForestNetwork, schema: &VariableSchema) -> Result<Self, ModelError> {
        Self::new(net, schema, |_, v| schema.decl(v).domain.default_value())
    }

    pub fn node_count(&self) -> usize {
        self.values.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn get(&self, p: NodeId, v: VarId) -> i64 {
        self.values[p.0 * self.width + v.0]
    }

    /// The row of values held by `p`, indexed by [`VarId`].
    pub fn row(&self, p: NodeId) -> &[i64] {
        &self.values[p.0 * self.width..(p.0 + 1) * self.width]
    }

    pub(crate) fn put(&mut self, p: NodeId, v: VarId, value: i64) {
        self.values[p.0 * self.width + v.0] = value;
    }

    /// Overwrites a writable variable. Constants are immutable.
    pub fn set(
        &mut self,
        schema: &VariableSchema,
        p: NodeId,
        v: VarId,
        value: i64,
    ) -> Result<(), ModelError> {
        let decl = schema.decl(v);
        if schema.writer(v).is_none() {
            return Err(ModelError::ConstantWrite(decl.name.clone()));
        }
        if !decl.domain.contains(value) {
            return Err(ModelError::OutOfDomain {
                node: p,
                name: decl.name.clone(),
                value,
            });
        }
        self.put(p, v, value);
        Ok(())
    }

    /// Builder-style [`set`](Self::set) taking a variable name.
    pub fn with(
        mut self,
        schema: &VariableSchema,
        p: usize,
        name: &str,
        value: i64,
    ) -> Result<Self, ModelError> {
        let v = schema.var(name)?;
        self.set(schema, NodeId(p), v, value)?;
        Ok(self)
    }

    /// Values of `name` at every node, in node order.
    pub fn column(&self, schema: &VariableSchema, name: &str) -> Result<Vec<i64>, ModelError> {
        let v = schema.var(name)?;
        Ok((0..self.node_count())
            .map(|p| self.get(NodeId(p), v))
            .collect())
    }

    /// Stable 64-bit FNV-1a digest of the values.
    pub fn digest(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut hash = OFFSET;
        for value in &self.values {
            for byte in value.to_le_bytes() {
                hash ^= u64::from(byte);
                hash = hash.wrapping_mul(PRIME);
            }
        }
        hash
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for p in 0..self.node_count() {
            list.entry(&self.row(NodeId(p)));
        }
        list.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Domain;

    fn schema() -> VariableSchema {
        VariableSchema::builder()
            .constant("input", Domain::Natural)
            .writable("x", 0, Domain::Finite(vec![0, 1]))
            .build()
            .unwrap()
    }

    #[test]
    fn constants_come_from_the_network() {
        let s = schema();
        let net = ForestNetwork::line(3).with_const("input", |p| 10 + p.0 as i64);
        let cfg = Configuration::zeroed(&net, &s).unwrap();
        assert_eq!(cfg.column(&s, "input").unwrap(), vec![10, 11, 12]);
        assert_eq!(cfg.column(&s, "x").unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn missing_constant_is_an_error() {
        let err = Configuration::zeroed(&ForestNetwork::line(2), &schema()).unwrap_err();
        assert!(matches!(err, ModelError::MissingConstant { .. }));
    }

    #[test]
    fn constants_are_immutable_and_domains_enforced() {
        let s = schema();
        let net = ForestNetwork::line(2).with_const("input", |_| 1);
        let cfg = Configuration::zeroed(&net, &s).unwrap();
        assert_eq!(
            cfg.clone().with(&s, 0, "input", 3).unwrap_err(),
            ModelError::ConstantWrite("input".into())
        );
        assert!(matches!(
            cfg.with(&s, 0, "x", 2).unwrap_err(),
            ModelError::OutOfDomain { value: 2, .. }
        ));
    }

    #[test]
    fn digest_distinguishes_values() {
        let s = schema();
        let net = ForestNetwork::line(2).with_const("input", |_| 1);
        let a = Configuration::zeroed(&net, &s).unwrap();
        let b = a.clone().with(&s, 1, "x", 1).unwrap();
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), a.clone().digest());
    }
}
