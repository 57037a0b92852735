//! Sum of inputs, computed bottom-up (`S`) and broadcast top-down (`R`).
//!
//! ```text
//! S(p)  :: p.sub ≠ Σ_{q ∈ children(p)} q.sub + p.input  →  p.sub ← that sum
//! R(r)  :: r.res ≠ r.sub                                  →  r.res ← r.sub
//! R(p)  :: p.res ≠ max(parent.res, p.sub)                 →  p.res ← that max
//! ```

use crate::model::{
    checked_add, AlgorithmSpec, Configuration, Domain, EvalError, FamilyId, FamilySpec,
    ForestNetwork, LocalView, ReadDecl, Relation, VarId, VariableSchema,
};

pub const S: FamilyId = FamilyId(0);
pub const R: FamilyId = FamilyId(1);

pub fn schema() -> VariableSchema {
    VariableSchema::builder()
        .constant("input", Domain::Natural)
        .writable("sub", S.0, Domain::Natural)
        .writable("res", R.0, Domain::Natural)
        .build()
        .expect("static schema")
}

fn sub_target(view: &LocalView<'_>, sub: VarId, input: VarId) -> Result<i64, EvalError> {
    checked_add(view.children_sum(sub)?, view.own(input)?)
}

fn res_target(view: &LocalView<'_>, sub: VarId, res: VarId) -> Result<i64, EvalError> {
    let own_sub = view.own(sub)?;
    Ok(match view.parent(res)? {
        None => own_sub,
        Some(parent_res) => parent_res.max(own_sub),
    })
}

pub fn te() -> AlgorithmSpec {
    let schema = schema();
    let input = schema.var("input").unwrap();
    let sub = schema.var("sub").unwrap();
    let res = schema.var("res").unwrap();

    let s = FamilySpec::new(
        "S",
        [
            ReadDecl::new(Relation::Own, sub),
            ReadDecl::new(Relation::Children, sub),
            ReadDecl::new(Relation::Own, input),
        ],
        vec![sub],
        move |v| Ok(v.own(sub)? != sub_target(v, sub, input)?),
        move |v| Ok(vec![sub_target(v, sub, input)?]),
    );
    let r = FamilySpec::new(
        "R",
        [
            ReadDecl::new(Relation::Own, res),
            ReadDecl::new(Relation::Own, sub),
            ReadDecl::new(Relation::Parent, res),
        ],
        vec![res],
        move |v| Ok(v.own(res)? != res_target(v, sub, res)?),
        move |v| Ok(vec![res_target(v, sub, res)?]),
    );
    AlgorithmSpec::new("te", schema, vec![s, r])
        .expect("well-formed")
        .with_legitimacy(legitimacy)
}

/// `P_input`: every `res` equals the sum of the inputs of its tree (of all
/// inputs when the network is a single tree).
pub fn legitimacy(net: &ForestNetwork, cfg: &Configuration) -> bool {
    let schema = schema();
    let (input, res) = (schema.var("input").unwrap(), schema.var("res").unwrap());
    net.roots().all(|r| {
        let tree = net.descendants(r);
        match tree
            .iter()
            .try_fold(0i64, |acc, &p| acc.checked_add(cfg.get(p, input)))
        {
            Some(total) => tree.iter().all(|&p| cfg.get(p, res) == total),
            None => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{apply_step, enabled_set, is_enabled, is_terminal, Activation, NodeId};

    fn line4() -> ForestNetwork {
        ForestNetwork::line(4).with_const("input", |_| 1)
    }

    #[test]
    fn forests_sum_per_tree() {
        let net = ForestNetwork::from_parents(vec![None, Some(0), None])
            .unwrap()
            .with_const("input", |p| [2, 3, 4][p.0]);
        let s = schema();
        let mut cfg = Configuration::zeroed(&net, &s).unwrap();
        for (p, r) in [5, 5, 4].into_iter().enumerate() {
            cfg = cfg.with(&s, p, "res", r).unwrap();
        }
        assert!(legitimacy(&net, &cfg));
        assert!(!legitimacy(&net, &cfg.with(&s, 2, "res", 9).unwrap()));
    }

    #[test]
    fn single_node_fixed_point() {
        let alg = te();
        let net = ForestNetwork::line(1).with_const("input", |_| 5);
        let s = alg.schema();
        let cfg = Configuration::zeroed(&net, s).unwrap();
        let next = apply_step(&net, &alg, &cfg, &[Activation::new(0, 0)]).unwrap();
        assert_eq!(next.column(s, "sub").unwrap(), vec![5]);
        assert_eq!(next.column(s, "res").unwrap(), vec![0]);

        let done = cfg
            .with(s, 0, "sub", 5)
            .unwrap()
            .with(s, 0, "res", 5)
            .unwrap();
        assert!(!is_enabled(&net, &alg, &done, NodeId(0), S).unwrap());
        assert!(!is_enabled(&net, &alg, &done, NodeId(0), R).unwrap());
        assert!(enabled_set(&net, &alg, &done).unwrap().is_empty());
    }

    #[test]
    fn hand_checked_terminal_line() {
        // sub = (4,3,2,1): p4 leaf 0+1=1, p3 1+1=2, p2 2+1=3, p1 3+1=4.
        // res = 4 everywhere: root res = sub = 4; others max(4, sub) = 4.
        let alg = te();
        let net = line4();
        let s = alg.schema();
        let mut cfg = Configuration::zeroed(&net, s).unwrap();
        for (p, sub) in [4, 3, 2, 1].into_iter().enumerate() {
            cfg = cfg
                .with(s, p, "sub", sub)
                .unwrap()
                .with(s, p, "res", 4)
                .unwrap();
        }
        assert!(is_terminal(&net, &alg, &cfg).unwrap());
        assert!(legitimacy(&net, &cfg));
        let broken = cfg.with(s, 2, "res", 3).unwrap();
        assert!(!legitimacy(&net, &broken));
        assert!(!is_terminal(&net, &alg, &broken).unwrap());
    }

    #[test]
    fn legitimacy_on_the_line() {
        let alg = te();
        let net = line4();
        let s = alg.schema();
        let cfg =
            Configuration::new(&net, s, |_, v| if s.name(v) == "res" { 4 } else { 0 }).unwrap();
        assert!(legitimacy(&net, &cfg));
    }
}
