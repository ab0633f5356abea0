//! Partial k²-trees under construction.
//!
//! A [`Fragment`] is the levelwise signature stream of one nonempty
//! submatrix, one signature per byte, with the start of every level
//! recorded. Fragments of sibling quadrants are concatenated levelwise to
//! form their parent, and rank support is only built once a fragment
//! becomes a full [`K2Tree`].

use std::collections::VecDeque;

use super::{has_quadrant, K2Tree};
use crate::bitvec::{BitvectorBuilder, RankBitvector};
use crate::error::Result;
use crate::matrix::Budget;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Fragment {
    sigs: Vec<u8>,
    /// `starts[d]` is the first signature of level `d`; last entry is `sigs.len()`.
    starts: Vec<usize>,
}

impl Fragment {
    pub fn leaf(sig: u8) -> Self {
        debug_assert!(sig != 0 && sig < 16);
        Self {
            sigs: vec![sig],
            starts: vec![0, 1],
        }
    }

    pub fn from_parts(sigs: Vec<u8>, starts: Vec<usize>) -> Self {
        debug_assert_eq!(starts.last(), Some(&sigs.len()));
        Self { sigs, starts }
    }

    pub fn depth(&self) -> usize {
        self.starts.len() - 1
    }

    #[cfg(test)]
    pub fn sigs(&self) -> &[u8] {
        &self.sigs
    }

    /// Parent of four (possibly empty) quadrant fragments of equal depth.
    pub fn concat(children: [Option<Fragment>; 4]) -> Option<Fragment> {
        let mut sig = 0u8;
        let mut depth = 0;
        let mut total = 1;
        for (q, c) in children.iter().enumerate() {
            if let Some(f) = c {
                sig |= 8 >> q;
                debug_assert!(depth == 0 || depth == f.depth());
                depth = f.depth();
                total += f.sigs.len();
            }
        }
        if sig == 0 {
            return None;
        }
        let present: Vec<&Fragment> = children.iter().flatten().collect();
        let mut sigs = Vec::with_capacity(total);
        let mut starts = Vec::with_capacity(depth + 2);
        sigs.push(sig);
        starts.push(0);
        for d in 0..depth {
            starts.push(sigs.len());
            for f in &present {
                sigs.extend_from_slice(&f.sigs[f.starts[d]..f.starts[d + 1]]);
            }
        }
        starts.push(sigs.len());
        Some(Fragment { sigs, starts })
    }

    /// Finishes a whole-matrix fragment (depth = levels of `side`).
    pub fn into_tree(self, side: usize) -> K2Tree {
        let mut tree = K2Tree::empty(side);
        debug_assert_eq!(self.depth(), tree.levels);
        let leaf_start = self.starts[self.depth() - 1];
        tree.ones = self.sigs[leaf_start..]
            .iter()
            .map(|s| s.count_ones() as u64)
            .sum();
        tree.level_offsets = self.starts.iter().map(|s| 4 * s).collect();
        tree.bits = pack(&self.sigs);
        tree
    }
}

/// Optional fragment to tree; `None` is the empty matrix.
pub(crate) fn finish(frag: Option<Fragment>, side: usize) -> K2Tree {
    match frag {
        Some(f) => f.into_tree(side),
        None => K2Tree::empty(side),
    }
}

fn pack(sigs: &[u8]) -> RankBitvector {
    let mut b = BitvectorBuilder::with_capacity(4 * sigs.len());
    let mut chunks = sigs.chunks_exact(16);
    for chunk in &mut chunks {
        let word = chunk.iter().fold(0u64, |w, &s| (w << 4) | s as u64);
        b.append_bits(word, 64);
    }
    for &s in chunks.remainder() {
        b.append_bits(s as u64, 4);
    }
    b.finalize()
}

/// Sequential reader over a signature stream.
pub(crate) trait SigSource {
    fn next_sig(&mut self) -> u8;
}

#[cfg(test)]
pub(crate) struct SliceCursor<'a> {
    sigs: &'a [u8],
    pos: usize,
}

#[cfg(test)]
impl<'a> SliceCursor<'a> {
    pub fn new(sigs: &'a [u8]) -> Self {
        Self { sigs, pos: 0 }
    }
}

#[cfg(test)]
impl SigSource for SliceCursor<'_> {
    #[inline]
    fn next_sig(&mut self) -> u8 {
        let s = self.sigs[self.pos];
        self.pos += 1;
        s
    }
}

pub(crate) struct TreeCursor<'a> {
    tree: &'a K2Tree,
    pos: usize,
}

impl<'a> TreeCursor<'a> {
    pub fn new(tree: &'a K2Tree) -> Self {
        Self { tree, pos: 0 }
    }
}

impl SigSource for TreeCursor<'_> {
    #[inline]
    fn next_sig(&mut self) -> u8 {
        let s = self.tree.sig(self.pos);
        self.pos += 4;
        s
    }
}

#[derive(Clone, Copy)]
enum Task {
    CopyA,
    CopyB,
    Merge,
}

/// Levelwise merge of two nonempty streams of the same orientation, driven
/// by a FIFO of copy/merge tasks. Both inputs are read strictly left to
/// right, so no rank support is needed.
pub(crate) fn merge_streams<A: SigSource, B: SigSource>(
    mut a: A,
    mut b: B,
    depth: usize,
    budget: &Budget,
) -> Result<Fragment> {
    let mut sigs = Vec::new();
    let mut starts = vec![0];
    let mut queue = VecDeque::new();
    queue.push_back((Task::Merge, 0usize));
    let mut current = 0;
    while let Some((task, level)) = queue.pop_front() {
        budget.tick()?;
        if level != current {
            starts.push(sigs.len());
            current = level;
        }
        let inner = level + 1 < depth;
        let sig = match task {
            Task::CopyA | Task::CopyB => {
                let s = if matches!(task, Task::CopyA) {
                    a.next_sig()
                } else {
                    b.next_sig()
                };
                if inner {
                    for q in 0..4 {
                        if has_quadrant(s, q) {
                            queue.push_back((task, level + 1));
                        }
                    }
                }
                s
            }
            Task::Merge => {
                let sa = a.next_sig();
                let sb = b.next_sig();
                if inner {
                    for q in 0..4 {
                        let t = match (has_quadrant(sa, q), has_quadrant(sb, q)) {
                            (true, true) => Task::Merge,
                            (true, false) => Task::CopyA,
                            (false, true) => Task::CopyB,
                            (false, false) => continue,
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
    debug_assert_eq!(starts.len(), depth + 1);
    Ok(Fragment { sigs, starts })
}
