#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sparseq_core::oracle::dense::DenseMatrix;
use sparseq_core::oracle::{eval_rpq_oracle, OracleGraph};
use sparseq_core::plan::PlanOptions;
use sparseq_core::store::Dictionary;
use sparseq_core::{
    Backend, BoolMatrix, Budget, Coord, CsrcMatrix, GraphStore, K2Matrix, RpqAst, RpqQuery, Term,
};

/// One random matrix in all three representations.
pub struct Triple {
    pub k2: K2Matrix,
    pub csr: CsrcMatrix,
    pub dense: DenseMatrix,
}

pub fn random_cells(rng: &mut ChaCha8Rng, side: usize, n: usize) -> Vec<Coord> {
    (0..n)
        .map(|_| Coord::new(rng.gen_range(0..side as u32), rng.gen_range(0..side as u32)))
        .collect()
}

/// Random matrix with the given flags applied identically to every form.
pub fn triple_with(
    rng: &mut ChaCha8Rng,
    side: usize,
    n: usize,
    transposed: bool,
    identity: bool,
) -> Triple {
    let cells = random_cells(rng, side, n);
    let mut t = Triple {
        k2: K2Matrix::build(&cells, side).unwrap(),
        csr: CsrcMatrix::build(&cells, side).unwrap(),
        dense: DenseMatrix::from_coords(side, &cells),
    };
    if transposed {
        t.k2 = t.k2.transpose();
        t.csr = t.csr.transpose();
        t.dense = t.dense.transpose();
    }
    if identity {
        t.k2 = t.k2.with_identity(true);
        t.csr = t.csr.with_identity(true);
        t.dense = t.dense.or(&DenseMatrix::identity(side));
    }
    t
}

pub fn sorted_cells<M: BoolMatrix>(m: &M) -> Vec<Coord> {
    let mut c = m.coords();
    c.sort_unstable();
    c
}

pub fn dense_cells(d: &DenseMatrix) -> Vec<Coord> {
    let mut c = d.coords();
    c.sort_unstable();
    c
}

/// Random graph over `nodes` nodes and `labels` labels, named `v<i>` and
/// `l<j>`; every node and label is in the dictionary even without edges.
pub struct RandomGraph {
    pub oracle: OracleGraph,
    pub per_label: Vec<Vec<Coord>>,
    pub dict: Dictionary,
}

impl RandomGraph {
    pub fn new(rng: &mut ChaCha8Rng, nodes: usize, labels: usize, edges: usize) -> Self {
        let edges: Vec<(usize, usize, usize)> = (0..edges)
            .map(|_| {
                (
                    rng.gen_range(0..nodes),
                    rng.gen_range(0..labels),
                    rng.gen_range(0..nodes),
                )
            })
            .collect();
        Self::from_edges(nodes, labels, &edges)
    }

    /// Graph over `(subject, label, object)` ids.
    pub fn from_edges(nodes: usize, labels: usize, edges: &[(usize, usize, usize)]) -> Self {
        Self::from_named((0..nodes).map(|i| format!("v{i}")).collect(), labels, edges)
    }

    /// Like [`RandomGraph::from_edges`] with explicit node names.
    pub fn from_named(names: Vec<String>, labels: usize, edges: &[(usize, usize, usize)]) -> Self {
        let mut dict = Dictionary::new();
        for name in &names {
            dict.intern_node(name);
        }
        for j in 0..labels {
            dict.intern_label(&format!("l{j}"));
        }
        let mut per_label = vec![Vec::new(); labels];
        let mut oracle_edges = Vec::with_capacity(edges.len());
        for &(s, l, o) in edges {
            per_label[l].push(Coord::new(s as u32, o as u32));
            oracle_edges.push((s, format!("l{l}"), o));
        }
        Self {
            oracle: OracleGraph::new(names, oracle_edges),
            per_label,
            dict,
        }
    }

    pub fn store(&self, backend: Backend) -> GraphStore {
        GraphStore::from_parts(self.dict.clone(), &self.per_label, backend).unwrap()
    }

    pub fn nodes(&self) -> usize {
        self.oracle.nodes.len()
    }
}

/// Random expression using every grammar production.
pub fn random_expr(rng: &mut ChaCha8Rng, labels: usize, depth: u32) -> RpqAst {
    let label = |rng: &mut ChaCha8Rng| format!("l{}", rng.gen_range(0..labels));
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..10) {
            0 => RpqAst::Epsilon,
            1 | 2 => RpqAst::InverseLabel(label(rng)),
            _ => RpqAst::Label(label(rng)),
        };
    }
    let kids = |rng: &mut ChaCha8Rng| {
        let n = rng.gen_range(2..=3);
        (0..n)
            .map(|_| random_expr(rng, labels, depth - 1))
            .collect::<Vec<_>>()
    };
    match rng.gen_range(0..5) {
        0 => RpqAst::concat(kids(rng)),
        1 => RpqAst::alt(kids(rng)),
        2 => random_expr(rng, labels, depth - 1).star(),
        3 => random_expr(rng, labels, depth - 1).plus(),
        _ => random_expr(rng, labels, depth - 1).optional(),
    }
}

/// Random query; `case` 0..4 picks variable/constant ends, 4 repeats one
/// variable on both ends.
pub fn random_query(rng: &mut ChaCha8Rng, nodes: usize, labels: usize, case: usize) -> RpqQuery {
    let expr = random_expr(rng, labels, 3);
    let constant = |rng: &mut ChaCha8Rng| Term::constant(format!("v{}", rng.gen_range(0..nodes)));
    let (s, o) = match case % 5 {
        0 => (Term::var("x"), Term::var("y")),
        1 => (constant(rng), Term::var("y")),
        2 => (Term::var("x"), constant(rng)),
        3 => (constant(rng), constant(rng)),
        _ => (Term::var("x"), Term::var("x")),
    };
    RpqQuery::new(s, expr, o)
}

pub fn engine_pairs(
    store: &GraphStore,
    q: &RpqQuery,
    options: PlanOptions,
) -> BTreeSet<(usize, usize)> {
    store
        .query(q, options, &Budget::unlimited())
        .unwrap()
        .all_pairs()
        .into_iter()
        .map(|(s, o)| (s as usize, o as usize))
        .collect()
}

pub fn oracle_pairs(g: &RandomGraph, q: &RpqQuery) -> BTreeSet<(usize, usize)> {
    eval_rpq_oracle(q, &g.oracle)
}
