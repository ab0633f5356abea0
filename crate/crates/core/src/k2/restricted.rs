//! Row/column-restricted sums. The traversal visits only submatrices that
//! intersect the kept row and/or column, treating all others as empty.

use super::fragment::{finish, Fragment};
use super::multiply::{col_mask, row_mask};
use super::{has_quadrant, K2Matrix, View};
use crate::error::Result;
use crate::matrix::{BoolMatrix, Budget, Restriction};

struct RestrictedSum<'a> {
    a: View<'a>,
    b: View<'a>,
    side: usize,
    depth: usize,
    res: Restriction,
    budget: &'a Budget,
}

impl RestrictedSum<'_> {
    fn rec(
        &self,
        pa: Option<usize>,
        pb: Option<usize>,
        level: usize,
        r0: u32,
        c0: u32,
    ) -> Result<Option<Fragment>> {
        self.budget.tick()?;
        let half = (self.side >> (level + 1)) as u32;
        let mut mask = 0b1111u8;
        if let Some(r) = self.res.row {
            mask &= row_mask(r, r0, half);
        }
        if let Some(c) = self.res.col {
            mask &= col_mask(c, c0, half);
        }
        if level + 1 == self.depth {
            let sa = pa.map_or(0, |p| self.a.sig(p));
            let sb = pb.map_or(0, |p| self.b.sig(p));
            let s = (sa | sb) & mask;
            return Ok((s != 0).then(|| Fragment::leaf(s)));
        }
        let ka = pa.map_or([None; 4], |p| self.a.children(p));
        let kb = pb.map_or([None; 4], |p| self.b.children(p));
        let mut out: [Option<Fragment>; 4] = Default::default();
        for q in 0..4 {
            if !has_quadrant(mask, q) || (ka[q].is_none() && kb[q].is_none()) {
                continue;
            }
            let (qi, qj) = ((q >> 1) as u32, (q & 1) as u32);
            out[q] = self.rec(ka[q], kb[q], level + 1, r0 + qi * half, c0 + qj * half)?;
        }
        Ok(Fragment::concat(out))
    }
}

/// `<r>(A + B)<c>`. Identity flags become the single diagonal cell the
/// restriction keeps; the result never carries the flag.
pub(super) fn sum_restricted(
    a: &K2Matrix,
    b: &K2Matrix,
    res: Restriction,
    budget: &Budget,
) -> Result<K2Matrix> {
    let side = a.tree.side;
    let walker = RestrictedSum {
        a: View::of(a),
        b: View::of(b),
        side,
        depth: a.tree.levels,
        res,
        budget,
    };
    let roots = (walker.a.root(), walker.b.root());
    let frag = if roots.0.is_none() && roots.1.is_none() {
        None
    } else {
        walker.rec(roots.0, roots.1, 0, 0, 0)?
    };
    let m = K2Matrix::from_tree(finish(frag, side));
    if a.plus_identity || b.plus_identity {
        if let Some(cell) = res.identity_cell() {
            return m.sum(&K2Matrix::build(&[cell], side)?, budget);
        }
    }
    Ok(m)
}

pub(super) fn restrict(a: &K2Matrix, res: Restriction, budget: &Budget) -> Result<K2Matrix> {
    sum_restricted(a, &K2Matrix::empty(a.tree.side), res, budget)
}
