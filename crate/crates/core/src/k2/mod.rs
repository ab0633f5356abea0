//! Succinct Boolean matrices as levelwise k²-trees (k = 2).
//!
//! A `side x side` matrix is split into four quadrants in z-order (top-left,
//! top-right, bottom-left, bottom-right). Every nonempty submatrix becomes a
//! node holding a 4-bit signature that marks its nonempty quadrants; empty
//! quadrants get no node. Signatures are written level by level into one
//! [`RankBitvector`]. Signatures on the last level describe 2x2 blocks of
//! cells directly.
//!
//! A node is addressed by the bit position of its signature. The child for
//! quadrant `j` of the node at `p` starts at `4 * rank(p + j + 1)`.
//!
//! Signatures are handled as `u8` nibbles read in stream order, so quadrant
//! `q` is bit `3 - q` (`0b1000` is the top-left quadrant).

mod fragment;
mod multiply;
mod restricted;
mod sum;

use std::io::{self, Read, Write};
use std::sync::Arc;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::bitvec::{BitvectorBuilder, RankBitvector};
use crate::error::{decode_error, Error, IndexError, Result};
use crate::matrix::{check_sides, BoolMatrix, Budget, Coord, Restriction};

#[inline]
pub(crate) const fn has_quadrant(sig: u8, q: usize) -> bool {
    sig & (8 >> q) != 0
}

/// Signature of the transposed submatrix: quadrants 1 and 2 trade places.
#[inline]
pub(crate) const fn transpose_sig(sig: u8) -> u8 {
    (sig & 0b1001) | ((sig & 0b0100) >> 1) | ((sig & 0b0010) << 1)
}

/// Spreads the low 32 bits of `x` to the even bit positions.
fn spread_bits(x: u32) -> u64 {
    let mut x = x as u64;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555;
    x
}

/// Z-order key: row bits on odd positions, column bits on even ones.
#[inline]
fn morton(c: Coord) -> u64 {
    (spread_bits(c.row) << 1) | spread_bits(c.col)
}

/// Immutable levelwise k²-tree storage, shared between matrix views.
#[derive(Debug, PartialEq, Eq)]
pub struct K2Tree {
    side: usize,
    levels: usize,
    bits: RankBitvector,
    /// Start bit of each level, plus the total length as a sentinel.
    level_offsets: Vec<usize>,
    ones: u64,
}

impl K2Tree {
    fn empty(side: usize) -> Self {
        assert!(
            side >= 2 && side.is_power_of_two(),
            "side must be a power of two >= 2, got {side}"
        );
        let levels = side.trailing_zeros() as usize;
        Self {
            side,
            levels,
            bits: RankBitvector::empty(),
            level_offsets: vec![0; levels + 1],
            ones: 0,
        }
    }

    /// Builds from coordinates in the stored orientation. Duplicates allowed.
    fn build(side: usize, coords: &[Coord]) -> Result<Self> {
        let mut tree = Self::empty(side);
        for c in coords {
            if c.row as usize >= side || c.col as usize >= side {
                return Err(Error::OutOfRange {
                    row: c.row as u64,
                    col: c.col as u64,
                    side,
                });
            }
        }
        if coords.is_empty() {
            return Ok(tree);
        }
        let mut codes: Vec<u64> = coords.iter().map(|&c| morton(c)).collect();
        codes.sort_unstable();
        codes.dedup();

        let levels = tree.levels;
        let mut builder = BitvectorBuilder::with_capacity(4 * codes.len() * levels);
        let mut offsets = Vec::with_capacity(levels + 1);
        for level in 0..levels {
            offsets.push(builder.len());
            let prefix_shift = 2 * (levels - level);
            let digit_shift = prefix_shift - 2;
            let mut i = 0;
            while i < codes.len() {
                let prefix = codes[i] >> prefix_shift;
                let mut sig = 0u8;
                while i < codes.len() && codes[i] >> prefix_shift == prefix {
                    sig |= 8 >> ((codes[i] >> digit_shift) & 3);
                    i += 1;
                }
                builder.append_bits(sig as u64, 4);
            }
        }
        offsets.push(builder.len());
        tree.ones = codes.len() as u64;
        tree.bits = builder.finalize();
        tree.level_offsets = offsets;
        Ok(tree)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn ones(&self) -> u64 {
        self.ones
    }

    pub fn bits(&self) -> &RankBitvector {
        &self.bits
    }

    pub fn level_offsets(&self) -> &[usize] {
        &self.level_offsets
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub(crate) fn sig(&self, pos: usize) -> u8 {
        self.bits.read_bits(pos, 4) as u8
    }

    /// Child positions of the internal node at `pos`, in stored quadrant order.
    #[inline]
    pub(crate) fn children(&self, pos: usize) -> [Option<usize>; 4] {
        self.children_ranked(pos, self.bits.rank(pos) as usize)
    }

    /// [`Self::children`] given `rank = bits.rank(pos)`.
    #[inline]
    pub(crate) fn children_ranked(&self, pos: usize, rank: usize) -> [Option<usize>; 4] {
        let sig = self.sig(pos);
        let mut next = 4 * (rank + 1);
        let mut out = [None; 4];
        for (q, slot) in out.iter_mut().enumerate() {
            if has_quadrant(sig, q) {
                *slot = Some(next);
                next += 4;
            }
        }
        out
    }

    fn get_stored(&self, row: u32, col: u32) -> bool {
        if self.is_empty() {
            return false;
        }
        let mut pos = 0;
        for level in 0..self.levels {
            let shift = self.levels - 1 - level;
            let q = ((((row >> shift) & 1) << 1) | ((col >> shift) & 1)) as usize;
            let sig = self.sig(pos);
            if !has_quadrant(sig, q) {
                return false;
            }
            if level + 1 == self.levels {
                return true;
            }
            let before = (sig >> (4 - q)).count_ones() as usize;
            pos = 4 * (self.bits.rank(pos) as usize + before + 1);
        }
        unreachable!()
    }

    /// Stored cells in z-order, decoded level by level without rank calls.
    fn stored_coords(&self) -> Vec<Coord> {
        let mut out = Vec::with_capacity(self.ones as usize);
        if self.is_empty() {
            return out;
        }
        let mut frontier: Vec<(u32, u32)> = vec![(0, 0)];
        let mut next = Vec::new();
        for level in 0..self.levels {
            let half = (self.side >> (level + 1)) as u32;
            let last = level + 1 == self.levels;
            let mut pos = self.level_offsets[level];
            for &(r0, c0) in &frontier {
                let sig = self.sig(pos);
                pos += 4;
                for q in 0..4 {
                    if has_quadrant(sig, q) {
                        let r = r0 + (q as u32 >> 1) * half;
                        let c = c0 + (q as u32 & 1) * half;
                        if last {
                            out.push(Coord::new(r, c));
                        } else {
                            next.push((r, c));
                        }
                    }
                }
            }
            debug_assert_eq!(pos, self.level_offsets[level + 1]);
            std::mem::swap(&mut frontier, &mut next);
            next.clear();
        }
        out
    }

    /// Ones in stored row `row` (or column `col`); exactly one is set.
    fn count_line(&self, row: Option<u32>, col: Option<u32>) -> u64 {
        if self.is_empty() {
            return 0;
        }
        let mut total = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((pos, level)) = stack.pop() {
            let shift = self.levels - 1 - level;
            let sig = self.sig(pos);
            let mut mask = 0b1111u8;
            if let Some(r) = row {
                mask &= if (r >> shift) & 1 == 0 {
                    0b1100
                } else {
                    0b0011
                };
            }
            if let Some(c) = col {
                mask &= if (c >> shift) & 1 == 0 {
                    0b1010
                } else {
                    0b0101
                };
            }
            if level + 1 == self.levels {
                total += (sig & mask).count_ones() as u64;
                continue;
            }
            let kids = self.children(pos);
            for (q, kid) in kids.iter().enumerate() {
                if let Some(p) = kid {
                    if has_quadrant(mask, q) {
                        stack.push((*p, level + 1));
                    }
                }
            }
        }
        total
    }

    /// Total bits of the signature stream.
    pub fn bit_len(&self) -> usize {
        self.bits.len()
    }

    fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_u64::<LittleEndian>(self.side as u64)?;
        out.write_u64::<LittleEndian>(self.ones)?;
        out.write_u32::<LittleEndian>(self.level_offsets.len() as u32)?;
        for &o in &self.level_offsets {
            out.write_u64::<LittleEndian>(o as u64)?;
        }
        self.bits.write_to(out)
    }

    fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let side = input.read_u64::<LittleEndian>().map_err(decode_error)? as usize;
        if side < 2 || !side.is_power_of_two() {
            return Err(IndexError::Corrupt(format!("k2 side {side}")).into());
        }
        let ones = input.read_u64::<LittleEndian>().map_err(decode_error)?;
        let noffsets = input.read_u32::<LittleEndian>().map_err(decode_error)? as usize;
        let levels = side.trailing_zeros() as usize;
        if noffsets != levels + 1 {
            return Err(IndexError::Corrupt(format!("{noffsets} level offsets")).into());
        }
        let mut level_offsets = Vec::with_capacity(noffsets);
        for _ in 0..noffsets {
            level_offsets.push(input.read_u64::<LittleEndian>().map_err(decode_error)? as usize);
        }
        let bits = RankBitvector::read_from(input).map_err(decode_error)?;
        if level_offsets.last() != Some(&bits.len()) {
            return Err(IndexError::Corrupt("level offsets do not match payload".into()).into());
        }
        Ok(Self {
            side,
            levels,
            bits,
            level_offsets,
            ones,
        })
    }

    fn serialized_bytes(&self) -> usize {
        8 + 8 + 4 + 8 * self.level_offsets.len() + self.bits.serialized_bytes()
    }
}

/// A k²-tree matrix view: shared storage plus O(1) flags.
///
/// `transposed` makes the view denote the transpose of the stored tree;
/// `plus_identity` makes it denote stored cells plus the diagonal.
#[derive(Clone, Debug)]
pub struct K2Matrix {
    tree: Arc<K2Tree>,
    transposed: bool,
    plus_identity: bool,
}

impl K2Matrix {
    /// Builds from cells; `side_hint` is rounded up to a power of two (minimum 2).
    pub fn build(coords: &[Coord], side_hint: usize) -> Result<Self> {
        let side = crate::matrix::side_for(side_hint);
        Ok(Self::from_tree(K2Tree::build(side, coords)?))
    }

    pub(crate) fn from_tree(tree: K2Tree) -> Self {
        Self {
            tree: Arc::new(tree),
            transposed: false,
            plus_identity: false,
        }
    }

    pub(crate) fn with_flags(&self, transposed: bool, plus_identity: bool) -> Self {
        Self {
            tree: Arc::clone(&self.tree),
            transposed,
            plus_identity,
        }
    }

    pub fn tree(&self) -> &K2Tree {
        &self.tree
    }

    pub fn shares_storage(&self, other: &K2Matrix) -> bool {
        Arc::ptr_eq(&self.tree, &other.tree)
    }

    pub fn transposed_flag(&self) -> bool {
        self.transposed
    }

    pub fn plus_identity(&self) -> bool {
        self.plus_identity
    }

    /// Signature-stream length in bits.
    pub fn bit_len(&self) -> usize {
        self.tree.bit_len()
    }

    /// O(1): flips the transposed flag; the signature stream is shared.
    pub fn transpose(&self) -> Self {
        self.with_flags(!self.transposed, self.plus_identity)
    }

    pub fn get(&self, row: u32, col: u32) -> Result<bool> {
        let side = self.tree.side;
        if row as usize >= side || col as usize >= side {
            return Err(Error::OutOfRange {
                row: row as u64,
                col: col as u64,
                side,
            });
        }
        Ok(self.cell(row, col))
    }

    #[inline]
    fn cell(&self, row: u32, col: u32) -> bool {
        if self.plus_identity && row == col {
            return true;
        }
        if self.transposed {
            self.tree.get_stored(col, row)
        } else {
            self.tree.get_stored(row, col)
        }
    }

    /// Every 1 cell once: stored cells in z-order of the stored tree, then
    /// any diagonal cells contributed only by the identity flag.
    pub fn enumerate(&self) -> Vec<Coord> {
        let mut out = self.tree.stored_coords();
        if self.transposed {
            out.iter_mut().for_each(|c| *c = c.transposed());
        }
        if self.plus_identity {
            let mut on_diag = vec![false; self.tree.side];
            for c in &out {
                if c.row == c.col {
                    on_diag[c.row as usize] = true;
                }
            }
            for (i, present) in on_diag.iter().enumerate() {
                if !present {
                    out.push(Coord::new(i as u32, i as u32));
                }
            }
        }
        out
    }

    /// Stored cells only, ignoring the identity flag.
    pub fn enumerate_stored(&self) -> Vec<Coord> {
        self.with_flags(self.transposed, false).enumerate()
    }

    fn count_line(&self, row: Option<u32>, col: Option<u32>) -> u64 {
        let stored = if self.transposed {
            self.tree.count_line(col, row)
        } else {
            self.tree.count_line(row, col)
        };
        let diag = row.or(col).unwrap();
        let extra = self.plus_identity && !self.tree.get_stored(diag, diag);
        stored + extra as u64
    }

    pub fn count_row(&self, row: u32) -> Result<u64> {
        self.check_index(row)?;
        Ok(self.count_line(Some(row), None))
    }

    pub fn count_col(&self, col: u32) -> Result<u64> {
        self.check_index(col)?;
        Ok(self.count_line(None, Some(col)))
    }

    fn check_index(&self, i: u32) -> Result<()> {
        if i as usize >= self.tree.side {
            return Err(Error::OutOfRange {
                row: i as u64,
                col: i as u64,
                side: self.tree.side,
            });
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_u8(self.transposed as u8 | (self.plus_identity as u8) << 1)?;
        self.tree.write_to(out)
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let flags = input.read_u8().map_err(decode_error)?;
        let tree = K2Tree::read_from(input)?;
        Ok(Self {
            tree: Arc::new(tree),
            transposed: flags & 1 != 0,
            plus_identity: flags & 2 != 0,
        })
    }

    pub fn serialized_bytes(&self) -> usize {
        1 + self.tree.serialized_bytes()
    }
}

impl BoolMatrix for K2Matrix {
    fn empty(side: usize) -> Self {
        Self::from_tree(K2Tree::empty(side))
    }

    fn from_coords(side: usize, coords: &[Coord]) -> Result<Self> {
        Self::build(coords, side)
    }

    fn side(&self) -> usize {
        self.tree.side
    }

    fn stored_ones(&self) -> u64 {
        self.tree.ones
    }

    fn has_identity(&self) -> bool {
        self.plus_identity
    }

    fn with_identity(&self, on: bool) -> Self {
        self.with_flags(self.transposed, on)
    }

    fn is_transposed(&self) -> bool {
        self.transposed
    }

    fn transpose(&self) -> Self {
        K2Matrix::transpose(self)
    }

    fn get(&self, row: u32, col: u32) -> bool {
        (row as usize) < self.tree.side && (col as usize) < self.tree.side && self.cell(row, col)
    }

    fn count_row(&self, row: u32) -> u64 {
        self.count_line(Some(row), None)
    }

    fn count_col(&self, col: u32) -> u64 {
        self.count_line(None, Some(col))
    }

    fn coords(&self) -> Vec<Coord> {
        self.enumerate()
    }

    fn same_cells(&self, other: &Self) -> bool {
        if self.tree.side != other.tree.side {
            return false;
        }
        if self.transposed == other.transposed && self.plus_identity == other.plus_identity {
            return self.tree.ones == other.tree.ones && self.tree.bits == other.tree.bits;
        }
        let mut a = self.enumerate();
        let mut b = other.enumerate();
        if a.len() != b.len() {
            return false;
        }
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    fn sum(&self, other: &Self, budget: &Budget) -> Result<Self> {
        check_sides(self.side(), other.side())?;
        sum::sum(self, other, budget)
    }

    fn multiply(&self, other: &Self, budget: &Budget) -> Result<Self> {
        check_sides(self.side(), other.side())?;
        multiply::multiply(self, other, budget)
    }

    fn sum_restricted(&self, other: &Self, res: Restriction, budget: &Budget) -> Result<Self> {
        check_sides(self.side(), other.side())?;
        res.check(self.side())?;
        if res.is_empty() {
            return self.sum(other, budget);
        }
        restricted::sum_restricted(self, other, res, budget)
    }

    fn multiply_restricted(&self, other: &Self, res: Restriction, budget: &Budget) -> Result<Self> {
        check_sides(self.side(), other.side())?;
        res.check(self.side())?;
        if res.is_empty() {
            return self.multiply(other, budget);
        }
        multiply::multiply_restricted(self, other, res, budget)
    }
}

/// A tree read through a view's transposed flag: signatures and children in
/// logical quadrant order.
#[derive(Clone, Copy)]
pub(crate) struct View<'a> {
    pub tree: &'a K2Tree,
    pub transposed: bool,
}

impl<'a> View<'a> {
    pub fn of(m: &'a K2Matrix) -> Self {
        Self {
            tree: &m.tree,
            transposed: m.transposed,
        }
    }

    #[inline]
    pub fn sig(&self, pos: usize) -> u8 {
        let s = self.tree.sig(pos);
        if self.transposed {
            transpose_sig(s)
        } else {
            s
        }
    }

    #[inline]
    pub fn children(&self, pos: usize) -> [Option<usize>; 4] {
        self.children_ranked(pos, self.tree.bits.rank(pos) as usize)
    }

    #[inline]
    pub fn children_ranked(&self, pos: usize, rank: usize) -> [Option<usize>; 4] {
        let mut c = self.tree.children_ranked(pos, rank);
        if self.transposed {
            c.swap(1, 2);
        }
        c
    }

    pub fn root(&self) -> Option<usize> {
        (!self.tree.is_empty()).then_some(0)
    }
}
