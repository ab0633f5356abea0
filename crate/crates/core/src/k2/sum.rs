//! Boolean sum of two k²-tree matrices.

use std::collections::VecDeque;

use super::fragment::{finish, merge_streams, Fragment, SigSource, TreeCursor};
use super::{has_quadrant, K2Matrix, View};
use crate::error::Result;
use crate::matrix::Budget;

pub(super) fn sum(a: &K2Matrix, b: &K2Matrix, budget: &Budget) -> Result<K2Matrix> {
    let identity = a.plus_identity || b.plus_identity;
    if b.tree.is_empty() {
        return Ok(a.with_flags(a.transposed, identity));
    }
    if a.tree.is_empty() {
        return Ok(b.with_flags(b.transposed, identity));
    }
    let side = a.tree.side;
    let depth = a.tree.levels;

    if a.transposed == b.transposed {
        let frag = merge_streams(
            TreeCursor::new(&a.tree),
            TreeCursor::new(&b.tree),
            depth,
            budget,
        )?;
        let tree = frag.into_tree(side);
        return Ok(K2Matrix::from_tree(tree).with_flags(a.transposed, identity));
    }

    // A^T + B = (A + B^T)^T: walk the longer stream sequentially in its own
    // orientation and navigate the shorter one as a transpose.
    let (seq, nav) = if a.bit_len() < b.bit_len() {
        (b, a)
    } else {
        (a, b)
    };
    let nav_view = View {
        tree: &nav.tree,
        transposed: true,
    };
    let frag = merge_mixed(TreeCursor::new(&seq.tree), nav_view, depth, budget)?;
    Ok(K2Matrix::from_tree(finish(Some(frag), side)).with_flags(seq.transposed, identity))
}

#[derive(Clone, Copy)]
enum Task {
    CopySeq,
    CopyNav(usize),
    Merge(usize),
}

/// Like [`merge_streams`], but the second operand is reached through rank
/// navigation because its node order differs from the output order.
fn merge_mixed<S: SigSource>(
    mut seq: S,
    nav: View<'_>,
    depth: usize,
    budget: &Budget,
) -> Result<Fragment> {
    let mut sigs = Vec::new();
    let mut starts = vec![0];
    let mut queue = VecDeque::new();
    queue.push_back((Task::Merge(0), 0usize));
    let mut current = 0;
    while let Some((task, level)) = queue.pop_front() {
        budget.tick()?;
        if level != current {
            starts.push(sigs.len());
            current = level;
        }
        let inner = level + 1 < depth;
        let sig = match task {
            Task::CopySeq => {
                let s = seq.next_sig();
                if inner {
                    for _ in 0..s.count_ones() {
                        queue.push_back((Task::CopySeq, level + 1));
                    }
                }
                s
            }
            Task::CopyNav(p) => {
                let s = nav.sig(p);
                if inner {
                    for kid in nav.children(p).into_iter().flatten() {
                        queue.push_back((Task::CopyNav(kid), level + 1));
                    }
                }
                s
            }
            Task::Merge(p) => {
                let sa = seq.next_sig();
                let sb = nav.sig(p);
                if inner {
                    let kids = nav.children(p);
                    for (q, kid) in kids.iter().enumerate() {
                        let t = match (has_quadrant(sa, q), kid) {
                            (true, Some(k)) => Task::Merge(*k),
                            (true, None) => Task::CopySeq,
                            (false, Some(k)) => Task::CopyNav(*k),
                            (false, None) => continue,
                        };
                        queue.push_back((t, level + 1));
                    }
                }
                sa | sb
            }
        };
        sigs.push(sig);
    }
    starts.push(sigs.len());
    Ok(Fragment::from_parts(sigs, starts))
}
