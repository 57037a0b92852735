//! Small algorithms used as positive and negative controls.

use crate::model::{
    checked_add, AlgorithmSpec, Domain, FamilySpec, ReadDecl, Relation, VariableSchema,
};

/// Single bottom-up family counting subtree sizes: `size ← Σ children size + 1`.
pub fn subtree_size() -> AlgorithmSpec {
    let schema = VariableSchema::builder()
        .writable("size", 0, Domain::Natural)
        .build()
        .unwrap();
    let size = schema.var("size").unwrap();
    let target = move |v: &crate::model::LocalView<'_>| checked_add(v.children_sum(size)?, 1);
    let family = FamilySpec::new(
        "Size",
        [
            ReadDecl::new(Relation::Own, size),
            ReadDecl::new(Relation::Children, size),
        ],
        vec![size],
        move |v| Ok(v.own(size)? != target(v)?),
        move |v| Ok(vec![target(v)?]),
    );
    AlgorithmSpec::new("subtree-size", schema, vec![family]).unwrap()
}

/// Guard `true`, statement `x ← x + 1`: never disabled by its own move.
pub fn broken_counter() -> AlgorithmSpec {
    let schema = VariableSchema::builder()
        .writable("x", 0, Domain::Natural)
        .build()
        .unwrap();
    let x = schema.var("x").unwrap();
    let family = FamilySpec::new(
        "Inc",
        [ReadDecl::new(Relation::Own, x)],
        vec![x],
        |_| Ok(true),
        move |v| Ok(vec![checked_add(v.own(x)?, 1)?]),
    );
    AlgorithmSpec::new("broken-counter", schema, vec![family]).unwrap()
}

/// Roots flip `x` when it equals a child's, other nodes copy their parent's:
/// on a 2-node line the two rules chase each other forever.
pub fn chaser() -> AlgorithmSpec {
    let schema = VariableSchema::builder()
        .writable("x", 0, Domain::Finite(vec![0, 1]))
        .build()
        .unwrap();
    let x = schema.var("x").unwrap();
    let family = FamilySpec::new(
        "Chase",
        [
            ReadDecl::new(Relation::Own, x),
            ReadDecl::new(Relation::Parent, x),
            ReadDecl::new(Relation::Children, x),
        ],
        vec![x],
        move |v| {
            let own = v.own(x)?;
            Ok(match v.parent(x)? {
                Some(parent) => own != parent,
                None => v.children(x)?.contains(&own),
            })
        },
        move |v| {
            Ok(vec![match v.parent(x)? {
                Some(parent) => parent,
                None => 1 - v.own(x)?,
            }])
        },
    );
    AlgorithmSpec::new("chaser", schema, vec![family]).unwrap()
}

/// Two families, each reading the variable the other writes.
pub fn mutual_readers() -> AlgorithmSpec {
    let schema = VariableSchema::builder()
        .writable("a", 0, Domain::Natural)
        .writable("b", 1, Domain::Natural)
        .build()
        .unwrap();
    let a = schema.var("a").unwrap();
    let b = schema.var("b").unwrap();
    let fa = FamilySpec::new(
        "A",
        [
            ReadDecl::new(Relation::Own, a),
            ReadDecl::new(Relation::Own, b),
        ],
        vec![a],
        move |v| Ok(v.own(a)? < v.own(b)?),
        move |v| Ok(vec![v.own(b)?]),
    );
    let fb = FamilySpec::new(
        "B",
        [
            ReadDecl::new(Relation::Own, a),
            ReadDecl::new(Relation::Own, b),
        ],
        vec![b],
        move |v| Ok(v.own(b)? < v.own(a)?),
        move |v| Ok(vec![v.own(a)?]),
    );
    AlgorithmSpec::new("mutual-readers", schema, vec![fa, fb]).unwrap()
}
