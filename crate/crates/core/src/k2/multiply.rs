//! Divide-and-conquer Boolean product over k²-trees.
//!
//! With `A = (A0 A1; A2 A3)` and `B = (B0 B1; B2 B3)` the product is
//! `(A0B0 + A1B2, A0B1 + A1B3; A2B0 + A3B2, A2B1 + A3B3)`. A missing child
//! prunes every product it takes part in. The sums are pushed down instead
//! of merged: each output node carries the list of operand pairs whose
//! products it sums, so it is built exactly once. Output is written into
//! per-level buffers that are concatenated at the end, and rank support is
//! only built on the final matrix.

use super::fragment::{finish, Fragment};
use super::restricted::restrict;
use super::{has_quadrant, K2Matrix, View};
use crate::error::Result;
use crate::matrix::{BoolMatrix, Budget, Restriction};

/// Blocks of at most `BLOCK` x `BLOCK` cells are multiplied as bit
/// matrices instead of being recursed into.
const BLOCK_LEVELS: usize = 3;
const BLOCK: u32 = 1 << BLOCK_LEVELS;

/// Dense block: bit `8 * r + c` is cell `(r, c)`.
type Block = u64;

const ROW_BITS: Block = 0xff;

/// Boolean product of two dense blocks.
fn block_product(a: Block, b: Block) -> Block {
    let mut out = 0;
    for r in 0..8 {
        let mut row = (a >> (8 * r)) & ROW_BITS;
        let mut acc = 0;
        while row != 0 {
            let k = row.trailing_zeros();
            acc |= (b >> (8 * k)) & ROW_BITS;
            row &= row - 1;
        }
        out |= acc << (8 * r);
    }
    out
}

/// Reads the `2^levels`-sided submatrix under node `p` into a block.
fn read_block(view: &View<'_>, p: usize, levels: usize) -> Block {
    let sig = view.sig(p);
    if levels == 1 {
        return (0..4)
            .filter(|&q| has_quadrant(sig, q))
            .fold(0, |m, q| m | 1 << (8 * (q >> 1) + (q & 1)));
    }
    let half = 1 << (levels - 1);
    let row_bits: Block = (1 << half) - 1;
    let mut out = 0;
    for (q, child) in view.children(p).into_iter().enumerate() {
        let Some(c) = child else { continue };
        let sub = read_block(view, c, levels - 1);
        let (r0, c0) = ((q >> 1) * half, (q & 1) * half);
        for r in 0..half {
            out |= ((sub >> (8 * r)) & row_bits) << (8 * (r + r0) + c0);
        }
    }
    out
}

/// Fragment of the `2^levels`-sided block `m`.
fn block_fragment(m: Block, levels: usize) -> Option<Fragment> {
    if m == 0 {
        return None;
    }
    let mut out = vec![Vec::new(); levels];
    emit_block(m, levels, &mut out);
    let mut sigs = Vec::with_capacity(21);
    let mut starts = Vec::with_capacity(levels + 1);
    for level in &out {
        starts.push(sigs.len());
        sigs.extend_from_slice(level);
    }
    starts.push(sigs.len());
    Some(Fragment::from_parts(sigs, starts))
}

/// Appends the levelwise signatures of the `2^levels`-sided block `m` to
/// `out[0..levels]`; nothing for an empty block.
fn emit_block(m: Block, levels: usize, out: &mut [Vec<u8>]) {
    if m == 0 {
        return;
    }
    // Corners (row, col) of the current level's regions, in stored order;
    // at most 16 regions exist above the leaf level of an 8x8 block.
    let mut regions = [(0u8, 0u8); 16];
    let mut count = 1;
    for level in 0..levels {
        let half = 1u8 << (levels - level - 1);
        let mut next = [(0u8, 0u8); 16];
        let mut next_count = 0;
        for &(r0, c0) in &regions[..count] {
            let mut sig = 0u8;
            for q in 0..4u8 {
                let (r, c) = (r0 + (q >> 1) * half, c0 + (q & 1) * half);
                if m & square_mask(r, c, half) != 0 {
                    sig |= 8 >> q;
                    if level + 1 < levels {
                        next[next_count] = (r, c);
                        next_count += 1;
                    }
                }
            }
            out[level].push(sig);
        }
        regions = next;
        count = next_count;
    }
}

/// Bits of the `size`-sided square (`size <= 4`) with corner `(r0, c0)`.
#[inline]
fn square_mask(r0: u8, c0: u8, size: u8) -> Block {
    let first_col: Block = 0x0101_0101_0101_0101 >> (8 * (8 - size));
    (first_col * ((1 << size) - 1)) << (8 * r0 + c0)
}

/// An operand read once up front, so that the product needs no rank calls.
struct Decoded {
    /// `ranks[p / 4]` is the rank at node position `p`, for nodes above
    /// block level.
    ranks: Vec<u32>,
    /// Every block-level node, indexed by position within that level.
    blocks: Vec<Block>,
}

impl Decoded {
    fn new(view: &View<'_>, depth: usize) -> Self {
        let offsets = view.tree.level_offsets();
        let level = depth - BLOCK_LEVELS;
        let mut ranks = Vec::with_capacity(offsets[level] / 4);
        let mut rank = 0u32;
        for p in (0..offsets[level]).step_by(4) {
            ranks.push(rank);
            rank += view.tree.sig(p).count_ones();
        }
        let blocks = (offsets[level]..offsets[level + 1])
            .step_by(4)
            .map(|p| read_block(view, p, BLOCK_LEVELS))
            .collect();
        Self { ranks, blocks }
    }
}

/// Keeps row `r` (block-relative) of `m`, or everything.
fn keep_row(m: Block, r: Option<u32>, r0: u32) -> Block {
    r.map_or(m, |r| m & ROW_BITS << (8 * (r - r0)))
}

/// Keeps column `c` (block-relative) of `m`, or everything.
fn keep_col(m: Block, c: Option<u32>, c0: u32) -> Block {
    c.map_or(m, |c| m & 0x0101_0101_0101_0101 << (c - c0))
}

#[inline]
pub(super) fn row_mask(r: u32, r0: u32, half: u32) -> u8 {
    if r - r0 < half {
        0b1100
    } else {
        0b0011
    }
}

#[inline]
pub(super) fn col_mask(c: u32, c0: u32, half: u32) -> u8 {
    if c - c0 < half {
        0b1010
    } else {
        0b0101
    }
}

/// Children of one (A node, B node) pair feeding the current output node.
type Kids = ([Option<usize>; 4], [Option<usize>; 4]);

struct Product<'a> {
    a: View<'a>,
    b: View<'a>,
    side: usize,
    depth: usize,
    /// Row kept from the left operand.
    row: Option<u32>,
    /// Column kept from the right operand.
    col: Option<u32>,
    /// Pre-decoded operands, for unrestricted products.
    decoded: Option<(Decoded, Decoded)>,
    budget: &'a Budget,
    /// Pairs whose products are summed into one output node; every node
    /// owns a suffix while it is being computed.
    pairs: Vec<(usize, usize)>,
    kids: Vec<Kids>,
    /// Output signatures per level. Nodes are appended after their
    /// subtrees, which keeps every level in z-order.
    out: Vec<Vec<u8>>,
}

impl Product<'_> {
    fn run(mut self) -> Result<Option<Fragment>> {
        let (Some(pa), Some(pb)) = (self.a.root(), self.b.root()) else {
            return Ok(None);
        };
        let block_levels = self.depth.min(BLOCK_LEVELS);
        if self.depth == block_levels {
            let m = self.block(pa, pb, 0, 0, block_levels)?;
            return Ok(block_fragment(m, block_levels));
        }
        self.pairs.push((pa, pb));
        if self.node(0, 1, 0, 0, 0)? == 0 {
            return Ok(None);
        }
        let mut starts = Vec::with_capacity(self.depth + 1);
        let mut sigs = Vec::with_capacity(self.out.iter().map(Vec::len).sum());
        for level in &self.out {
            starts.push(sigs.len());
            sigs.extend_from_slice(level);
        }
        starts.push(sigs.len());
        Ok(Some(Fragment::from_parts(sigs, starts)))
    }

    /// Product of two nodes spanning whole blocks, with the restriction
    /// applied to the operands.
    fn block(
        &self,
        pa: usize,
        pb: usize,
        a_row0: u32,
        b_col0: u32,
        levels: usize,
    ) -> Result<Block> {
        self.budget.tick()?;
        if let Some((da, db)) = &self.decoded {
            let base = |v: &View<'_>| v.tree.level_offsets()[self.depth - BLOCK_LEVELS];
            let a = da.blocks[(pa - base(&self.a)) / 4];
            let b = db.blocks[(pb - base(&self.b)) / 4];
            return Ok(block_product(a, b));
        }
        let a = keep_row(read_block(&self.a, pa, levels), self.row, a_row0);
        if a == 0 {
            return Ok(0);
        }
        let b = keep_col(read_block(&self.b, pb, levels), self.col, b_col0);
        Ok(block_product(a, b))
    }

    /// Output node at `level` with corner `(r0, c0)`: the sum of the
    /// products of `pairs[from..to]`. Appends the node (when nonempty) and
    /// its subtree to `out` and returns its signature.
    fn node(&mut self, from: usize, to: usize, level: usize, r0: u32, c0: u32) -> Result<u8> {
        self.budget.tick()?;
        let half = (self.side >> (level + 1)) as u32;
        let mut amask = 0b1111u8;
        let mut bmask = 0b1111u8;
        if let Some(r) = self.row {
            amask = row_mask(r, r0, half);
        }
        if let Some(c) = self.col {
            bmask = col_mask(c, c0, half);
        }
        let kid_base = self.kids.len();
        for p in from..to {
            let (pa, pb) = self.pairs[p];
            let k = match &self.decoded {
                Some((da, db)) => (
                    self.a.children_ranked(pa, da.ranks[pa / 4] as usize),
                    self.b.children_ranked(pb, db.ranks[pb / 4] as usize),
                ),
                None => (self.a.children(pa), self.b.children(pb)),
            };
            self.kids.push(k);
        }
        let mut sig = 0u8;
        for q in 0..4 {
            let (i, j) = (q >> 1, q & 1);
            if !has_quadrant(amask, 2 * i) || !has_quadrant(bmask, j) {
                continue;
            }
            let (cr, cc) = (r0 + i as u32 * half, c0 + j as u32 * half);
            let base = self.pairs.len();
            for x in kid_base..self.kids.len() {
                let (ca, cb) = self.kids[x];
                for k in 0..2 {
                    if let (Some(x), Some(y)) = (ca[2 * i + k], cb[2 * k + j]) {
                        self.pairs.push((x, y));
                    }
                }
            }
            let child = if half == BLOCK {
                // Children are blocks: OR their products, then emit levelwise.
                let mut m = 0;
                for p in base..self.pairs.len() {
                    let (x, y) = self.pairs[p];
                    m |= self.block(x, y, cr, cc, BLOCK_LEVELS)?;
                }
                emit_block(m, BLOCK_LEVELS, &mut self.out[level + 1..]);
                (m != 0) as u8
            } else if base < self.pairs.len() {
                let to = self.pairs.len();
                self.node(base, to, level + 1, cr, cc)?
            } else {
                0
            };
            self.pairs.truncate(base);
            if child != 0 {
                sig |= 8 >> q;
            }
        }
        self.kids.truncate(kid_base);
        if sig != 0 {
            self.out[level].push(sig);
        }
        Ok(sig)
    }
}

fn product_core(a: &K2Matrix, b: &K2Matrix, res: Restriction, budget: &Budget) -> Result<K2Matrix> {
    let side = a.tree.side;
    let depth = a.tree.levels;
    let (va, vb) = (View::of(a), View::of(b));
    // A restricted product touches one line, so decoding everything would
    // cost more than it saves.
    let decoded =
        (res.is_empty() && depth > BLOCK_LEVELS && !a.tree.is_empty() && !b.tree.is_empty())
            .then(|| (Decoded::new(&va, depth), Decoded::new(&vb, depth)));
    let p = Product {
        a: va,
        b: vb,
        side,
        depth,
        row: res.row,
        col: res.col,
        decoded,
        budget,
        pairs: Vec::new(),
        kids: Vec::new(),
        out: vec![Vec::new(); depth],
    };
    let frag = p.run()?;
    Ok(K2Matrix::from_tree(finish(frag, side)))
}

/// `(I? + A)(I? + B) = I? + A? + B? + AB` with the identity flags kept lazy.
pub(super) fn multiply(a: &K2Matrix, b: &K2Matrix, budget: &Budget) -> Result<K2Matrix> {
    let a_plain = a.with_identity(false);
    let b_plain = b.with_identity(false);
    let mut m = product_core(&a_plain, &b_plain, Restriction::NONE, budget)?;
    if b.plus_identity {
        m = m.sum(&a_plain, budget)?;
    }
    if a.plus_identity {
        m = m.sum(&b_plain, budget)?;
    }
    Ok(m.with_identity(a.plus_identity && b.plus_identity))
}

pub(super) fn multiply_restricted(
    a: &K2Matrix,
    b: &K2Matrix,
    res: Restriction,
    budget: &Budget,
) -> Result<K2Matrix> {
    let a_plain = a.with_identity(false);
    let b_plain = b.with_identity(false);
    let mut m = product_core(&a_plain, &b_plain, res, budget)?;
    if b.plus_identity {
        m = m.sum(&restrict(&a_plain, res, budget)?, budget)?;
    }
    if a.plus_identity {
        m = m.sum(&restrict(&b_plain, res, budget)?, budget)?;
    }
    if a.plus_identity && b.plus_identity {
        if let Some(cell) = res.identity_cell() {
            m = m.sum(&K2Matrix::build(&[cell], m.side())?, budget)?;
        }
    }
    Ok(m)
}
