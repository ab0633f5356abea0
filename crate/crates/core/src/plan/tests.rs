use super::*;
use crate::k2::K2Matrix;
use crate::matrix::{BoolMatrix, Budget, Coord};
use crate::rpq::parse_query;

struct Names {
    labels: Vec<&'static str>,
    nodes: Vec<&'static str>,
}

impl Resolver for Names {
    fn label_id(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    fn node_id(&self, node: &str) -> Option<u32> {
        self.nodes.iter().position(|n| *n == node).map(|i| i as u32)
    }
}

fn names() -> Names {
    Names {
        labels: vec!["a", "b", "p", "q"],
        nodes: vec!["c0", "c1", "c2", "c3"],
    }
}

fn plan(q: &str, options: PlanOptions) -> Plan {
    compile(&parse_query(q).unwrap(), &names(), options).unwrap()
}

fn leaf(l: usize) -> PlanNode {
    PlanNode::new(Op::Leaf(l))
}

#[test]
fn alternation_of_variables() {
    let p = plan("?x a|b ?y", PlanOptions::NONE);
    assert_eq!(p.root, PlanNode::new(Op::Sum(vec![leaf(0), leaf(1)])));
    assert!(p.restriction().is_empty());
}

#[test]
fn constant_subject_restricts_rows() {
    let p = plan("c2 a/b ?y", PlanOptions::NONE);
    assert_eq!(p.root, PlanNode::new(Op::Product(vec![leaf(0), leaf(1)])));
    assert_eq!(p.restriction(), Restriction::row(2));
    let p = plan("c2 a/b ?y", PlanOptions::ALL);
    assert_eq!(p.root.restriction, Restriction::row(2));
    assert!(p.pending.is_empty());
}

#[test]
fn four_end_cases() {
    assert_eq!(
        plan("?x a ?y", PlanOptions::NONE).restriction(),
        Restriction::NONE
    );
    assert_eq!(
        plan("c1 a ?y", PlanOptions::NONE).restriction(),
        Restriction::row(1)
    );
    assert_eq!(
        plan("?x a c3", PlanOptions::NONE).restriction(),
        Restriction::col(3)
    );
    assert_eq!(
        plan("c1 a c3", PlanOptions::NONE).restriction(),
        Restriction::cell(1, 3)
    );
    assert!(plan("?x a ?x", PlanOptions::NONE).same_variable);
}

#[test]
fn base_cases() {
    assert_eq!(plan("?x eps ?y", PlanOptions::NONE).root.op, Op::Identity);
    assert_eq!(
        plan("?x ^q ?y", PlanOptions::NONE).root.op,
        Op::LeafTransposed(3)
    );
    assert_eq!(
        plan("?x p? ?y", PlanOptions::NONE).root.op,
        Op::Sum(vec![PlanNode::new(Op::Identity), leaf(2)])
    );
}

#[test]
fn unknown_names_are_errors() {
    let err = compile(
        &parse_query("?x zz ?y").unwrap(),
        &names(),
        PlanOptions::ALL,
    )
    .unwrap_err();
    assert!(matches!(err, Error::UnknownLabel(l) if l == "zz"));
    let err = compile(
        &parse_query("nowhere a ?y").unwrap(),
        &names(),
        PlanOptions::ALL,
    )
    .unwrap_err();
    assert!(matches!(err, Error::UnknownNode(n) if n == "nowhere"));
}

#[test]
fn closures_collapse() {
    let only = PlanOptions {
        collapse_closures: true,
        ..PlanOptions::NONE
    };
    let star = PlanNode::new(Op::ClosureStar(Box::new(leaf(2))));
    let plus = PlanNode::new(Op::ClosurePlus(Box::new(leaf(2))));
    assert_eq!(plan("?x (p*)+ ?y", only).root, star);
    assert_eq!(plan("?x p** ?y", only).root, star);
    assert_eq!(plan("?x (p+)* ?y", only).root, star);
    assert_eq!(plan("?x p+++ ?y", only).root, plus);
    assert_eq!(plan("?x ((p+)+)* ?y", only).root, star);
}

#[test]
fn sums_push_restrictions_to_inner_operands() {
    let p = plan("c1 a|b/p ?y", PlanOptions::ALL);
    let Op::Sum(kids) = &p.root.op else { panic!() };
    assert_eq!(p.root.restriction, Restriction::row(1));
    assert!(kids[0].restriction.is_empty());
    assert_eq!(kids[1].restriction, Restriction::row(1));
    let p = plan("c1 a/b|b/p ?y", PlanOptions::ALL);
    let Op::Sum(kids) = &p.root.op else { panic!() };
    assert!(kids.iter().all(|k| k.restriction == Restriction::row(1)));
}

#[test]
fn products_push_rows_left_and_columns_right() {
    let p = plan("c1 (a|b)/p/(q|a) c2", PlanOptions::ALL);
    let Op::Product(kids) = &p.root.op else {
        panic!()
    };
    assert_eq!(kids[0].restriction, Restriction::row(1));
    assert!(kids[1].restriction.is_empty());
    assert_eq!(kids[2].restriction, Restriction::col(2));
}

#[test]
fn closures_keep_their_restriction() {
    let p = plan("c1 (a/b)+ ?y", PlanOptions::ALL);
    assert_eq!(p.root.restriction, Restriction::row(1));
    let Op::ClosurePlus(inner) = &p.root.op else {
        panic!()
    };
    assert!(inner.restriction.is_empty());
}

#[test]
fn fusion_marks_closures_behind_restricted_products() {
    let p = plan("?x p+/q c1", PlanOptions::ALL);
    let Op::Product(kids) = &p.root.op else {
        panic!()
    };
    assert!(kids[0].fused);
    assert!(!p.root.fused);
    let p = plan("c1 q/p* ?y", PlanOptions::ALL);
    let Op::Product(kids) = &p.root.op else {
        panic!()
    };
    assert!(kids[1].fused && kids[1].restriction.is_empty());
    assert!(!plan("?x p+ ?y", PlanOptions::ALL).root.has_fused());
    assert!(!plan("?x p+/q ?y", PlanOptions::ALL).root.has_fused());
}

#[test]
fn display_shows_restrictions() {
    let p = plan("c1 a/b+ ?y", PlanOptions::ALL);
    assert_eq!(p.root.to_string(), "<1>Product(M0, fused:Plus(M1))");
}

#[test]
fn evaluation_of_epsilon_is_identity() {
    let leaves = vec![K2Matrix::empty(4); 4];
    let p = plan("?x eps ?y", PlanOptions::ALL);
    let m = evaluate(&p, &leaves, 4, &Budget::unlimited()).unwrap();
    assert!(m.has_identity());
    assert_eq!(m.count_cells(), 4);
}

#[test]
fn evaluation_respects_every_pass_combination() {
    let side = 4;
    let a = K2Matrix::build(&[Coord::new(0, 1), Coord::new(1, 2)], side).unwrap();
    let b = K2Matrix::build(&[Coord::new(2, 3), Coord::new(3, 0)], side).unwrap();
    let leaves = vec![a.clone(), b.clone(), a, b];
    let queries = [
        "c0 (a|b)+/p ?y",
        "?x p/q* c3",
        "c0 (a/b)*/p? c2",
        "?x ^a/(b|eps) ?y",
    ];
    for q in queries {
        let base = evaluate(
            &plan(q, PlanOptions::NONE),
            &leaves,
            side,
            &Budget::unlimited(),
        )
        .unwrap();
        for bits in 0..32u32 {
            let options = PlanOptions {
                collapse_closures: bits & 1 != 0,
                order_sum: bits & 2 != 0,
                order_product: bits & 4 != 0,
                inherit_restrictions: bits & 8 != 0,
                fuse_closure_product: bits & 16 != 0,
            };
            let m = evaluate(&plan(q, options), &leaves, side, &Budget::unlimited()).unwrap();
            assert!(m.same_cells(&base), "{q} with {options:?}");
        }
    }
}
