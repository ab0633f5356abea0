//! Powers and closures, written once over [`BoolMatrix`].
//!
//! The unrestricted closure squares its way to the fixpoint
//! (`A <- A + A x A`), doubling the covered path length per round. Restricted
//! closures grow one line instead (`S <- S + A x S` for a column,
//! `S <- S + S x A` for a row), so path lengths grow linearly but every step
//! only touches a single row or column.

use crate::error::{Error, Result};
use crate::matrix::{BoolMatrix, Budget, Restriction};

/// `A^k` for `k >= 1`.
pub fn power<M: BoolMatrix>(a: &M, k: u32, budget: &Budget) -> Result<M> {
    assert!(k >= 1, "power needs k >= 1");
    let mut acc = a.clone();
    for _ in 1..k {
        budget.check()?;
        acc = acc.multiply(a, budget)?;
    }
    Ok(acc)
}

/// Transitive closure `A+`. Each round counts as one iteration on `budget`,
/// including the final round that confirms the fixpoint.
pub fn closure_plus<M: BoolMatrix>(a: &M, budget: &Budget) -> Result<M> {
    // (I + A)+ = I + A+
    if a.has_identity() {
        return Ok(closure_plus(&a.with_identity(false), budget)?.with_identity(true));
    }
    if a.is_transposed() {
        return Ok(closure_plus(&a.transpose(), budget)?.transpose());
    }
    let mut cur = a.clone();
    loop {
        budget.count_iteration()?;
        let next = cur.sum(&cur.multiply(&cur, budget)?, budget)?;
        // Sums only add cells, so equal counts already mean equal matrices;
        // same_cells checks the counts first and the streams second.
        if next.stored_ones() == cur.stored_ones() && next.same_cells(&cur) {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Reflexive-transitive closure `A* = I + A+`.
pub fn closure_star<M: BoolMatrix>(a: &M, budget: &Budget) -> Result<M> {
    Ok(closure_plus(a, budget)?.with_identity(true))
}

/// `S <- S + A x S` until stable, with every product restricted to column
/// `col`. `seed` must be zero outside that column. Stops early once cell
/// `(stop_row, col)` is set.
pub fn grow_column<M: BoolMatrix>(
    a: &M,
    seed: M,
    col: u32,
    stop_row: Option<u32>,
    budget: &Budget,
) -> Result<M> {
    let res = Restriction::col(col);
    let mut s = seed;
    let hit = |s: &M| stop_row.is_some_and(|r| s.get(r, col));
    if hit(&s) {
        return Ok(s);
    }
    loop {
        budget.count_iteration()?;
        let p = a.multiply_restricted(&s, res, budget)?;
        let next = s.sum(&p, budget)?;
        if hit(&next) || next.stored_ones() == s.stored_ones() && next.same_cells(&s) {
            return Ok(next);
        }
        s = next;
    }
}

/// `S <- S + S x A` until stable, products restricted to row `row`; the
/// mirror image of [`grow_column`].
pub fn grow_row<M: BoolMatrix>(
    seed: M,
    a: &M,
    row: u32,
    stop_col: Option<u32>,
    budget: &Budget,
) -> Result<M> {
    let res = Restriction::row(row);
    let mut s = seed;
    let hit = |s: &M| stop_col.is_some_and(|c| s.get(row, c));
    if hit(&s) {
        return Ok(s);
    }
    loop {
        budget.count_iteration()?;
        let p = s.multiply_restricted(a, res, budget)?;
        let next = s.sum(&p, budget)?;
        if hit(&next) || next.stored_ones() == s.stored_ones() && next.same_cells(&s) {
            return Ok(next);
        }
        s = next;
    }
}

/// `<r> A+ <c>` (or `A*` when `reflexive`) without computing the full closure.
///
/// A cell restriction runs the row or the column variant, whichever line of
/// `A` holds fewer cells (ties go to the row), and stops as soon as the cell
/// is known to be set.
pub fn closure_restricted<M: BoolMatrix>(
    a: &M,
    res: Restriction,
    reflexive: bool,
    budget: &Budget,
) -> Result<M> {
    if res.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    let base = if reflexive {
        a.with_identity(true)
    } else {
        a.clone()
    };
    match (res.row, res.col) {
        (None, Some(c)) => {
            let seed = base.restrict(res, budget)?;
            grow_column(a, seed, c, None, budget)
        }
        (Some(r), None) => {
            let seed = base.restrict(res, budget)?;
            grow_row(seed, a, r, None, budget)
        }
        (Some(r), Some(c)) => {
            let line = if a.count_row(r) <= a.count_col(c) {
                let seed = base.restrict(Restriction::row(r), budget)?;
                grow_row(seed, a, r, Some(c), budget)?
            } else {
                let seed = base.restrict(Restriction::col(c), budget)?;
                grow_column(a, seed, c, Some(r), budget)?
            };
            line.restrict(res, budget)
        }
        (None, None) => unreachable!(),
    }
}

/// Which closure a fused product step expands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureKind {
    Plus,
    Star,
}

/// `A+ x X` or `A* x X` for `X` zero outside column `col`, never
/// materializing the closure. `stop_row` enables the single-cell early exit.
pub fn closure_times_column<M: BoolMatrix>(
    a: &M,
    kind: ClosureKind,
    x: &M,
    col: u32,
    stop_row: Option<u32>,
    budget: &Budget,
) -> Result<M> {
    let res = Restriction::col(col);
    let seed = match kind {
        ClosureKind::Plus => a.multiply_restricted(x, res, budget)?,
        ClosureKind::Star => x.restrict(res, budget)?,
    };
    grow_column(a, seed, col, stop_row, budget)
}

/// `X x A+` or `X x A*` for `X` zero outside row `row`.
pub fn row_times_closure<M: BoolMatrix>(
    x: &M,
    a: &M,
    kind: ClosureKind,
    row: u32,
    stop_col: Option<u32>,
    budget: &Budget,
) -> Result<M> {
    let res = Restriction::row(row);
    let seed = match kind {
        ClosureKind::Plus => x.multiply_restricted(a, res, budget)?,
        ClosureKind::Star => x.restrict(res, budget)?,
    };
    grow_row(seed, a, row, stop_col, budget)
}
