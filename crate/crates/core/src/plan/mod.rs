//! Query plans: translation of a path query into matrix operations, the
//! rewrite passes, and a backend-generic evaluator.
//!
//! A query `(s, E, o)` becomes `<s> M(E) <o>`, where a constant end turns
//! into a row or column restriction and a variable end leaves that side
//! free. The translation is
//!
//! ```text
//! M(eps) = I            M(p)  = M_p          M(^p) = M_p^T
//! M(E1|E2) = M(E1)+M(E2)     M(E1/E2) = M(E1) x M(E2)
//! M(E*) = M(E)*         M(E+) = M(E)+        M(E?) = I + M(E)
//! ```

mod eval;
pub mod order;

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Restriction;
use crate::rpq::{RpqAst, RpqQuery, Term};

pub use eval::evaluate;

/// Plan operators. Leaves index the per-label matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Leaf(usize),
    LeafTransposed(usize),
    Identity,
    Sum(Vec<PlanNode>),
    Product(Vec<PlanNode>),
    ClosurePlus(Box<PlanNode>),
    ClosureStar(Box<PlanNode>),
}

/// One operation with the restriction it must honor. `fused` marks a
/// closure that its parent product expands line by line instead of
/// materializing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanNode {
    pub op: Op,
    pub restriction: Restriction,
    pub fused: bool,
}

impl PlanNode {
    pub fn new(op: Op) -> Self {
        Self {
            op,
            restriction: Restriction::NONE,
            fused: false,
        }
    }

    /// Leaves and the identity are never handed restrictions.
    pub fn is_leaf(&self) -> bool {
        matches!(self.op, Op::Leaf(_) | Op::LeafTransposed(_) | Op::Identity)
    }

    pub fn is_closure(&self) -> bool {
        matches!(self.op, Op::ClosurePlus(_) | Op::ClosureStar(_))
    }

    fn children_mut(&mut self) -> &mut [PlanNode] {
        match &mut self.op {
            Op::Sum(kids) | Op::Product(kids) => kids,
            Op::ClosurePlus(k) | Op::ClosureStar(k) => std::slice::from_mut(k.as_mut()),
            _ => &mut [],
        }
    }

    fn children(&self) -> &[PlanNode] {
        match &self.op {
            Op::Sum(kids) | Op::Product(kids) => kids,
            Op::ClosurePlus(k) | Op::ClosureStar(k) => std::slice::from_ref(k.as_ref()),
            _ => &[],
        }
    }

    /// Number of nodes in the subtree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(PlanNode::size).sum::<usize>()
    }

    /// Whether any node in the subtree is marked fused.
    pub fn has_fused(&self) -> bool {
        self.fused || self.children().iter().any(PlanNode::has_fused)
    }
}

impl fmt::Display for PlanNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.restriction.row {
            write!(f, "<{r}>")?;
        }
        if self.fused {
            f.write_str("fused:")?;
        }
        let list = |f: &mut fmt::Formatter<'_>, name: &str, kids: &[PlanNode]| {
            write!(f, "{name}(")?;
            for (i, k) in kids.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{k}")?;
            }
            f.write_str(")")
        };
        match &self.op {
            Op::Leaf(l) => write!(f, "M{l}")?,
            Op::LeafTransposed(l) => write!(f, "M{l}^T")?,
            Op::Identity => f.write_str("I")?,
            Op::Sum(kids) => list(f, "Sum", kids)?,
            Op::Product(kids) => list(f, "Product", kids)?,
            Op::ClosurePlus(k) => write!(f, "Plus({k})")?,
            Op::ClosureStar(k) => write!(f, "Star({k})")?,
        }
        if let Some(c) = self.restriction.col {
            write!(f, "<{c}>")?;
        }
        Ok(())
    }
}

/// Which rewrites and evaluation strategies are enabled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanOptions {
    pub collapse_closures: bool,
    pub order_sum: bool,
    pub order_product: bool,
    pub inherit_restrictions: bool,
    pub fuse_closure_product: bool,
}

impl PlanOptions {
    pub const ALL: PlanOptions = PlanOptions {
        collapse_closures: true,
        order_sum: true,
        order_product: true,
        inherit_restrictions: true,
        fuse_closure_product: true,
    };

    pub const NONE: PlanOptions = PlanOptions {
        collapse_closures: false,
        order_sum: false,
        order_product: false,
        inherit_restrictions: false,
        fuse_closure_product: false,
    };
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self::ALL
    }
}

/// A compiled query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub root: PlanNode,
    /// Restriction still to be applied to the final result; moved into the
    /// tree by [`inherit_restrictions`].
    pub pending: Restriction,
    pub subject: Option<u32>,
    pub object: Option<u32>,
    /// Both ends are the same variable; only diagonal cells are answers.
    pub same_variable: bool,
    pub huffman_sums: bool,
    pub greedy_products: bool,
}

impl Plan {
    /// The top-level restriction, wherever it currently lives.
    pub fn restriction(&self) -> Restriction {
        self.pending.union(self.root.restriction)
    }
}

/// Name lookups needed by [`translate`].
pub trait Resolver {
    fn label_id(&self, label: &str) -> Option<usize>;
    fn node_id(&self, node: &str) -> Option<u32>;
}

/// Builds the unoptimized plan for `query`.
pub fn translate(query: &RpqQuery, resolver: &impl Resolver) -> Result<Plan> {
    let root = translate_expr(&query.expr, resolver)?;
    let end = |t: &Term| match t {
        Term::Variable(_) => Ok(None),
        Term::Constant(c) => resolver
            .node_id(c)
            .map(Some)
            .ok_or_else(|| Error::UnknownNode(c.clone())),
    };
    let subject = end(&query.subject)?;
    let object = end(&query.object)?;
    Ok(Plan {
        root,
        pending: Restriction {
            row: subject,
            col: object,
        },
        subject,
        object,
        same_variable: query.same_variable(),
        huffman_sums: false,
        greedy_products: false,
    })
}

fn translate_expr(e: &RpqAst, resolver: &impl Resolver) -> Result<PlanNode> {
    let label = |l: &str| {
        resolver
            .label_id(l)
            .ok_or_else(|| Error::UnknownLabel(l.to_string()))
    };
    let all = |kids: &[RpqAst]| {
        kids.iter()
            .map(|k| translate_expr(k, resolver))
            .collect::<Result<Vec<_>>>()
    };
    let op = match e {
        RpqAst::Epsilon => Op::Identity,
        RpqAst::Label(l) => Op::Leaf(label(l)?),
        RpqAst::InverseLabel(l) => Op::LeafTransposed(label(l)?),
        RpqAst::Concat(kids) => Op::Product(all(kids)?),
        RpqAst::Alt(kids) => Op::Sum(all(kids)?),
        RpqAst::Star(k) => Op::ClosureStar(Box::new(translate_expr(k, resolver)?)),
        RpqAst::Plus(k) => Op::ClosurePlus(Box::new(translate_expr(k, resolver)?)),
        RpqAst::Optional(k) => Op::Sum(vec![
            PlanNode::new(Op::Identity),
            translate_expr(k, resolver)?,
        ]),
    };
    Ok(PlanNode::new(op))
}

/// Translates and applies the passes enabled in `options`, in the order
/// collapse, sum ordering, product ordering, inheritance, fusion.
pub fn compile(query: &RpqQuery, resolver: &impl Resolver, options: PlanOptions) -> Result<Plan> {
    let mut plan = translate(query, resolver)?;
    optimize(&mut plan, options);
    Ok(plan)
}

pub fn optimize(plan: &mut Plan, options: PlanOptions) {
    if options.collapse_closures {
        collapse_closures(&mut plan.root);
    }
    if options.order_sum {
        order_sum(plan);
    }
    if options.order_product {
        order_product(plan);
    }
    if options.inherit_restrictions {
        inherit_restrictions(plan);
    }
    if options.fuse_closure_product {
        fuse_closure_product(plan);
    }
}

/// `(A*)* = (A*)+ = (A+)* = A*` and `(A+)+ = A+`.
pub fn collapse_closures(node: &mut PlanNode) {
    for k in node.children_mut() {
        collapse_closures(k);
    }
    loop {
        let (outer_star, inner) = match &mut node.op {
            Op::ClosureStar(k) => (true, k),
            Op::ClosurePlus(k) => (false, k),
            _ => return,
        };
        let grand = match std::mem::replace(&mut inner.op, Op::Identity) {
            Op::ClosureStar(g) => (true, g),
            Op::ClosurePlus(g) => (false, g),
            other => {
                inner.op = other;
                return;
            }
        };
        node.op = if outer_star || grand.0 {
            Op::ClosureStar(grand.1)
        } else {
            Op::ClosurePlus(grand.1)
        };
    }
}

/// Sums are reduced Huffman-style on the sizes of their operands.
pub fn order_sum(plan: &mut Plan) {
    plan.huffman_sums = true;
}

/// Products contract the cheapest adjacent pair first.
pub fn order_product(plan: &mut Plan) {
    plan.greedy_products = true;
}

/// Pushes the top-level restriction into the tree: a sum hands it to its
/// non-leaf operands, a product hands the row to its first operand and the
/// column to its last one, and closures and leaves keep theirs.
pub fn inherit_restrictions(plan: &mut Plan) {
    plan.root.restriction = plan.root.restriction.union(plan.pending);
    plan.pending = Restriction::NONE;
    push_down(&mut plan.root);
}

fn push_down(node: &mut PlanNode) {
    let res = node.restriction;
    if !res.is_empty() {
        match &mut node.op {
            Op::Sum(kids) => {
                // The sum keeps its restriction; evaluation applies it to
                // leaf operands only.
                for k in kids.iter_mut().filter(|k| !k.is_leaf()) {
                    k.restriction = k.restriction.union(res);
                }
            }
            Op::Product(kids) => {
                let last = kids.len() - 1;
                if let Some(r) = res.row {
                    if !kids[0].is_leaf() {
                        kids[0].restriction.row = Some(r);
                    }
                }
                if let Some(c) = res.col {
                    if !kids[last].is_leaf() {
                        kids[last].restriction.col = Some(c);
                    }
                }
            }
            _ => {}
        }
    }
    // A closure keeps its restriction, so its operand is pushed nothing.
    for k in node.children_mut() {
        push_down(k);
    }
}

/// Marks closure operands of restricted products that can be expanded from
/// the restricted side instead of being materialized: `<r> X x A+ ...` and
/// `... A+ x X <c>` (likewise for `A*`).
pub fn fuse_closure_product(plan: &mut Plan) {
    fuse(&mut plan.root);
}

fn fuse(node: &mut PlanNode) {
    for k in node.children_mut() {
        fuse(k);
    }
    let res = node.restriction;
    if let Op::Product(kids) = &mut node.op {
        if res.row.is_some() {
            // Row chains run left to right; operand 0 starts the chain.
            for k in kids.iter_mut().skip(1) {
                if k.is_closure() {
                    k.fused = true;
                    k.restriction = Restriction::NONE;
                }
            }
        } else if res.col.is_some() {
            let last = kids.len() - 1;
            for k in kids[..last].iter_mut() {
                if k.is_closure() {
                    k.fused = true;
                    k.restriction = Restriction::NONE;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests;
