//! Number of odd-level processes: a 2-coloring by level parity (`C`, top-down),
//! a subtree count of color-1 nodes (`S`, bottom-up), and a broadcast of the
//! root's count (`R`, top-down).

use crate::model::{
    checked_add, AlgorithmSpec, Configuration, Domain, FamilyId, FamilySpec, ForestNetwork,
    ReadDecl, Relation, VariableSchema,
};

pub const C: FamilyId = FamilyId(0);
pub const S: FamilyId = FamilyId(1);
pub const R: FamilyId = FamilyId(2);

pub fn schema() -> VariableSchema {
    VariableSchema::builder()
        .writable("Clr", C.0, Domain::Finite(vec![0, 1]))
        .writable("Sub", S.0, Domain::Natural)
        .writable("Res", R.0, Domain::Natural)
        .build()
        .expect("static schema")
}

pub fn nolp() -> AlgorithmSpec {
    let schema = schema();
    let clr = schema.var("Clr").unwrap();
    let sub = schema.var("Sub").unwrap();
    let res = schema.var("Res").unwrap();

    let color = move |v: &crate::model::LocalView<'_>| {
        Ok(match v.parent(clr)? {
            None => 0,
            Some(parent) => (parent + 1) % 2,
        })
    };
    let count =
        move |v: &crate::model::LocalView<'_>| checked_add(v.children_sum(sub)?, v.own(clr)?);
    let result = move |v: &crate::model::LocalView<'_>| {
        Ok(match v.parent(res)? {
            None => v.own(sub)?,
            Some(parent) => parent,
        })
    };

    let c = FamilySpec::new(
        "C",
        [
            ReadDecl::new(Relation::Own, clr),
            ReadDecl::new(Relation::Parent, clr),
        ],
        vec![clr],
        move |v| Ok(v.own(clr)? != color(v)?),
        move |v| Ok(vec![color(v)?]),
    );
    let s = FamilySpec::new(
        "S",
        [
            ReadDecl::new(Relation::Own, sub),
            ReadDecl::new(Relation::Children, sub),
            ReadDecl::new(Relation::Own, clr),
        ],
        vec![sub],
        move |v| Ok(v.own(sub)? != count(v)?),
        move |v| Ok(vec![count(v)?]),
    );
    // the root reads its own Sub, every other node copies its parent's Res
    let r = FamilySpec::new(
        "R",
        [
            ReadDecl::new(Relation::Own, res),
            ReadDecl::new(Relation::Own, sub),
            ReadDecl::new(Relation::Parent, res),
        ],
        vec![res],
        move |v| Ok(v.own(res)? != result(v)?),
        move |v| Ok(vec![result(v)?]),
    );
    AlgorithmSpec::new("nolp", schema, vec![c, s, r])
        .expect("well-formed")
        .with_legitimacy(legitimacy)
}

/// Number of nodes at odd level.
pub fn odd_level_count(net: &ForestNetwork) -> i64 {
    net.nodes().filter(|&p| net.level_of(p) % 2 == 1).count() as i64
}

/// `P_NOLP`: every `Res` equals the number of odd-level nodes of its tree.
pub fn legitimacy(net: &ForestNetwork, cfg: &Configuration) -> bool {
    let res = schema().var("Res").unwrap();
    net.roots().all(|r| {
        let tree = net.descendants(r);
        let expected = tree.iter().filter(|&&p| net.level_of(p) % 2 == 1).count() as i64;
        tree.iter().all(|&p| cfg.get(p, res) == expected)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{enabled_set, is_enabled, Activation, NodeId};

    #[test]
    fn forests_are_judged_per_tree() {
        let alg = nolp();
        let net = ForestNetwork::from_parents(vec![None, Some(0), None]).unwrap();
        let with = |res: [i64; 3]| {
            let mut cfg = Configuration::zeroed(&net, alg.schema()).unwrap();
            for (p, r) in res.into_iter().enumerate() {
                cfg = cfg.with(alg.schema(), p, "Res", r).unwrap();
            }
            cfg
        };
        assert!(legitimacy(&net, &with([1, 1, 0])));
        assert!(!legitimacy(&net, &with([1, 1, 1])));
    }

    #[test]
    fn odd_levels() {
        assert_eq!(odd_level_count(&ForestNetwork::line(4)), 2);
        assert_eq!(odd_level_count(&ForestNetwork::star(6)), 5);
    }

    #[test]
    fn root_with_color_one_is_enabled_for_c() {
        let alg = nolp();
        let net = ForestNetwork::line(3);
        let cfg = Configuration::zeroed(&net, alg.schema())
            .unwrap()
            .with(alg.schema(), 0, "Clr", 1)
            .unwrap();
        assert!(is_enabled(&net, &alg, &cfg, NodeId(0), C).unwrap());
    }

    #[test]
    fn all_zero_two_line_enables_c_at_the_child() {
        let alg = nolp();
        let net = ForestNetwork::line(2);
        let cfg = Configuration::zeroed(&net, alg.schema()).unwrap();
        assert_eq!(
            enabled_set(&net, &alg, &cfg).unwrap(),
            vec![Activation::new(1, 0)]
        );
    }

    #[test]
    fn legitimacy_requires_the_odd_count_everywhere() {
        let alg = nolp();
        let net = ForestNetwork::star(6);
        let s = alg.schema();
        let ok =
            Configuration::new(&net, s, |_, v| if s.name(v) == "Res" { 5 } else { 0 }).unwrap();
        assert!(legitimacy(&net, &ok));
        assert!(!legitimacy(&net, &ok.with(s, 3, "Res", 4).unwrap()));
    }
}
