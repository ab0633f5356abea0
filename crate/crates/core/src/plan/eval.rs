//! Bottom-up plan evaluation over any [`BoolMatrix`] backend.
//!
//! A node with a restriction returns exactly `<r> value <c>`. Restricted
//! products run as a chain from the restricted end: left to right for a
//! row, right to left for a column only, so every intermediate result is a
//! single row or column.

use super::order::{greedy_product, huffman_sum, left_fold};
use super::{Op, Plan, PlanNode};
use crate::closure::{self, ClosureKind};
use crate::error::Result;
use crate::matrix::{BoolMatrix, Budget, Restriction};

/// Evaluates `plan` with `leaves[l]` as the matrix of label `l`.
pub fn evaluate<M: BoolMatrix>(
    plan: &Plan,
    leaves: &[M],
    side: usize,
    budget: &Budget,
) -> Result<M> {
    let ev = Evaluator {
        leaves,
        side,
        huffman: plan.huffman_sums,
        greedy: plan.greedy_products,
        budget,
    };
    let m = ev.node(&plan.root)?;
    if plan.pending.is_empty() {
        Ok(m)
    } else {
        m.restrict(plan.pending, budget)
    }
}

struct Evaluator<'a, M> {
    leaves: &'a [M],
    side: usize,
    huffman: bool,
    greedy: bool,
    budget: &'a Budget,
}

fn closure_parts(node: &PlanNode) -> (ClosureKind, &PlanNode) {
    match &node.op {
        Op::ClosurePlus(k) => (ClosureKind::Plus, k),
        Op::ClosureStar(k) => (ClosureKind::Star, k),
        _ => unreachable!("fused node is not a closure"),
    }
}

impl<M: BoolMatrix> Evaluator<'_, M> {
    fn restricted(&self, m: M, res: Restriction) -> Result<M> {
        if res.is_empty() {
            Ok(m)
        } else {
            m.restrict(res, self.budget)
        }
    }

    fn node(&self, n: &PlanNode) -> Result<M> {
        self.budget.check()?;
        let res = n.restriction;
        match &n.op {
            Op::Leaf(l) => self.restricted(self.leaves[*l].clone(), res),
            Op::LeafTransposed(l) => self.restricted(self.leaves[*l].transpose(), res),
            Op::Identity => self.restricted(M::identity(self.side), res),
            Op::Sum(kids) => self.sum(kids, res),
            Op::Product(kids) => match (res.row, res.col) {
                (None, None) => self.free_product(kids),
                (Some(r), c) => self.row_chain(kids, r, c),
                (None, Some(c)) => self.col_chain(kids, c),
            },
            Op::ClosurePlus(k) | Op::ClosureStar(k) => {
                let star = matches!(n.op, Op::ClosureStar(_));
                let a = self.node(k)?;
                match (res.is_empty(), star) {
                    (true, false) => closure::closure_plus(&a, self.budget),
                    (true, true) => closure::closure_star(&a, self.budget),
                    (false, _) => closure::closure_restricted(&a, res, star, self.budget),
                }
            }
        }
    }

    fn combine_sum(&self, operands: Vec<M>) -> Result<M> {
        let add = |a: M, b: M| a.sum(&b, self.budget);
        if self.huffman {
            huffman_sum(operands, |m| m.stored_ones(), add)
        } else {
            left_fold(operands, add)
        }
    }

    fn sum(&self, kids: &[PlanNode], res: Restriction) -> Result<M> {
        if res.is_empty() {
            let operands = kids
                .iter()
                .map(|k| self.node(k))
                .collect::<Result<Vec<_>>>()?;
            return self.combine_sum(operands);
        }
        // Inner operands arrive restricted; the leaves are restricted here.
        let mut operands = Vec::with_capacity(kids.len());
        let mut leaves: Option<M> = None;
        let mut single = true;
        for k in kids {
            if k.is_leaf() {
                let m = self.node(k)?;
                leaves = Some(match leaves {
                    None => m,
                    Some(acc) => {
                        single = false;
                        acc.sum_restricted(&m, res, self.budget)?
                    }
                });
            } else {
                debug_assert_eq!(k.restriction.union(res), k.restriction);
                operands.push(self.node(k)?);
            }
        }
        if let Some(m) = leaves {
            operands.push(if single {
                m.restrict(res, self.budget)?
            } else {
                m
            });
        }
        self.combine_sum(operands)
    }

    fn free_product(&self, kids: &[PlanNode]) -> Result<M> {
        let operands = kids
            .iter()
            .map(|k| self.node(k))
            .collect::<Result<Vec<_>>>()?;
        let mul = |a: M, b: M| a.multiply(&b, self.budget);
        if self.greedy {
            greedy_product(operands, |m| m.stored_ones(), mul)
        } else {
            left_fold(operands, mul)
        }
    }

    fn row_chain(&self, kids: &[PlanNode], r: u32, col: Option<u32>) -> Result<M> {
        let mut acc = self.node(&kids[0])?;
        if kids[0].restriction.row != Some(r) {
            acc = acc.restrict(Restriction::row(r), self.budget)?;
        }
        let last = kids.len() - 1;
        for (i, k) in kids.iter().enumerate().skip(1) {
            let stop = if i == last { col } else { None };
            let res = Restriction {
                row: Some(r),
                col: stop,
            };
            acc = if k.fused {
                let (kind, inner) = closure_parts(k);
                let a = self.node(inner)?;
                let line = closure::row_times_closure(&acc, &a, kind, r, stop, self.budget)?;
                if stop.is_some() {
                    line.restrict(res, self.budget)?
                } else {
                    line
                }
            } else {
                acc.multiply_restricted(&self.node(k)?, res, self.budget)?
            };
        }
        Ok(acc)
    }

    fn col_chain(&self, kids: &[PlanNode], c: u32) -> Result<M> {
        let last = kids.len() - 1;
        let mut acc = self.node(&kids[last])?;
        if kids[last].restriction.col != Some(c) {
            acc = acc.restrict(Restriction::col(c), self.budget)?;
        }
        for k in kids[..last].iter().rev() {
            acc = if k.fused {
                let (kind, inner) = closure_parts(k);
                let a = self.node(inner)?;
                closure::closure_times_column(&a, kind, &acc, c, None, self.budget)?
            } else {
                self.node(k)?
                    .multiply_restricted(&acc, Restriction::col(c), self.budget)?
            };
        }
        Ok(acc)
    }
}
