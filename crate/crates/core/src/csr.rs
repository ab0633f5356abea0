//! Uncompressed baseline: a Boolean CSR view and CSC view of the same cells.
//!
//! Each view keeps only nonempty lines: their ids, their start offsets, and
//! the increasing positions of the 1s in each line. Holding both views makes
//! transposition a swap of two pointers and lets products intersect the
//! nonempty columns of the left operand with the nonempty rows of the right.

use std::io::{self, Read, Write};
use std::sync::Arc;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{decode_error, Error, IndexError, Result};
use crate::matrix::{check_sides, BoolMatrix, Budget, Coord, Restriction};

/// One orientation: nonempty line ids with their sorted item lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LineView {
    ids: Vec<u32>,
    offsets: Vec<u64>,
    items: Vec<u32>,
}

impl LineView {
    /// From `(line, item)` pairs sorted and deduplicated.
    fn from_sorted_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut v = LineView {
            ids: Vec::new(),
            offsets: vec![0],
            items: Vec::new(),
        };
        for (line, item) in pairs {
            if v.ids.last() != Some(&line) {
                if !v.ids.is_empty() {
                    v.offsets.push(v.items.len() as u64);
                }
                v.ids.push(line);
            }
            v.items.push(item);
        }
        if !v.ids.is_empty() {
            v.offsets.push(v.items.len() as u64);
        }
        v
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn items(&self) -> &[u32] {
        &self.items
    }

    pub fn line_count(&self) -> usize {
        self.ids.len()
    }

    /// Items of the `k`-th nonempty line.
    #[inline]
    pub fn nth(&self, k: usize) -> &[u32] {
        &self.items[self.offsets[k] as usize..self.offsets[k + 1] as usize]
    }

    /// Items of line `id`, found by binary search.
    pub fn line(&self, id: u32) -> &[u32] {
        match self.ids.binary_search(&id) {
            Ok(k) => self.nth(k),
            Err(_) => &[],
        }
    }

    fn lines(&self) -> impl Iterator<Item = (u32, &[u32])> + '_ {
        self.ids
            .iter()
            .enumerate()
            .map(|(k, &id)| (id, self.nth(k)))
    }

    fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.lines()
            .flat_map(|(id, items)| items.iter().map(move |&x| (id, x)))
    }

    /// Linewise union of two views.
    fn merge(&self, other: &LineView) -> LineView {
        let mut out = LineView {
            ids: Vec::with_capacity(self.ids.len() + other.ids.len()),
            offsets: vec![0],
            items: Vec::with_capacity(self.items.len() + other.items.len()),
        };
        let (mut i, mut j) = (0, 0);
        while i < self.ids.len() || j < other.ids.len() {
            let take_a =
                j == other.ids.len() || (i < self.ids.len() && self.ids[i] <= other.ids[j]);
            let take_b =
                i == self.ids.len() || (j < other.ids.len() && other.ids[j] <= self.ids[i]);
            let id = if take_a { self.ids[i] } else { other.ids[j] };
            match (take_a, take_b) {
                (true, true) => {
                    merge_sorted(self.nth(i), other.nth(j), &mut out.items);
                    i += 1;
                    j += 1;
                }
                (true, false) => {
                    out.items.extend_from_slice(self.nth(i));
                    i += 1;
                }
                (false, true) => {
                    out.items.extend_from_slice(other.nth(j));
                    j += 1;
                }
                (false, false) => unreachable!(),
            }
            out.ids.push(id);
            out.offsets.push(out.items.len() as u64);
        }
        if out.ids.is_empty() {
            out.offsets.clear();
            out.offsets.push(0);
        }
        out
    }

    fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_u64::<LittleEndian>(self.ids.len() as u64)?;
        for &id in &self.ids {
            out.write_u32::<LittleEndian>(id)?;
        }
        for &o in &self.offsets {
            out.write_u64::<LittleEndian>(o)?;
        }
        out.write_u64::<LittleEndian>(self.items.len() as u64)?;
        for &x in &self.items {
            out.write_u32::<LittleEndian>(x)?;
        }
        Ok(())
    }

    fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let n = input.read_u64::<LittleEndian>().map_err(decode_error)? as usize;
        let mut ids = Vec::with_capacity(n);
        for _ in 0..n {
            ids.push(input.read_u32::<LittleEndian>().map_err(decode_error)?);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        for _ in 0..n + 1 {
            offsets.push(input.read_u64::<LittleEndian>().map_err(decode_error)?);
        }
        let m = input.read_u64::<LittleEndian>().map_err(decode_error)? as usize;
        if offsets.last() != Some(&(m as u64)) {
            return Err(IndexError::Corrupt("line offsets do not match items".into()).into());
        }
        let mut items = Vec::with_capacity(m);
        for _ in 0..m {
            items.push(input.read_u32::<LittleEndian>().map_err(decode_error)?);
        }
        Ok(Self {
            ids,
            offsets,
            items,
        })
    }

    fn serialized_bytes(&self) -> usize {
        8 + 4 * self.ids.len() + 8 * self.offsets.len() + 8 + 4 * self.items.len()
    }
}

fn merge_sorted(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

fn intersects(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Baseline sparse Boolean matrix with both orientations materialized.
#[derive(Clone, Debug)]
pub struct CsrcMatrix {
    side: usize,
    rows: Arc<LineView>,
    cols: Arc<LineView>,
    ones: u64,
    plus_identity: bool,
}

impl CsrcMatrix {
    pub fn build(coords: &[Coord], side_hint: usize) -> Result<Self> {
        let side = crate::matrix::side_for(side_hint);
        for c in coords {
            if c.row as usize >= side || c.col as usize >= side {
                return Err(Error::OutOfRange {
                    row: c.row as u64,
                    col: c.col as u64,
                    side,
                });
            }
        }
        let mut pairs: Vec<(u32, u32)> = coords.iter().map(|c| (c.row, c.col)).collect();
        Ok(Self::from_pairs(side, &mut pairs))
    }

    /// From unsorted `(row, col)` pairs, duplicates allowed.
    fn from_pairs(side: usize, pairs: &mut Vec<(u32, u32)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        let rows = LineView::from_sorted_pairs(pairs.iter().copied());
        let mut flipped: Vec<(u32, u32)> = pairs.iter().map(|&(r, c)| (c, r)).collect();
        flipped.sort_unstable();
        let cols = LineView::from_sorted_pairs(flipped);
        Self {
            side,
            ones: pairs.len() as u64,
            rows: Arc::new(rows),
            cols: Arc::new(cols),
            plus_identity: false,
        }
    }

    pub fn row_view(&self) -> &LineView {
        &self.rows
    }

    pub fn col_view(&self) -> &LineView {
        &self.cols
    }

    pub fn plus_identity(&self) -> bool {
        self.plus_identity
    }

    pub fn shares_storage(&self, other: &CsrcMatrix) -> bool {
        (Arc::ptr_eq(&self.rows, &other.rows) && Arc::ptr_eq(&self.cols, &other.cols))
            || (Arc::ptr_eq(&self.rows, &other.cols) && Arc::ptr_eq(&self.cols, &other.rows))
    }

    /// O(1): swaps the row and column views.
    pub fn transpose(&self) -> Self {
        Self {
            side: self.side,
            rows: Arc::clone(&self.cols),
            cols: Arc::clone(&self.rows),
            ones: self.ones,
            plus_identity: self.plus_identity,
        }
    }

    fn plain(&self) -> Self {
        self.with_identity(false)
    }

    /// Row-major enumeration, diagonal included when flagged.
    pub fn enumerate(&self) -> Vec<Coord> {
        let mut out = Vec::with_capacity(self.ones as usize);
        if !self.plus_identity {
            out.extend(self.rows.pairs().map(Coord::from));
            return out;
        }
        let mut k = 0;
        for r in 0..self.side as u32 {
            let items = if k < self.rows.ids.len() && self.rows.ids[k] == r {
                k += 1;
                self.rows.nth(k - 1)
            } else {
                &[]
            };
            let mut diag_done = false;
            for &c in items {
                if !diag_done && c >= r {
                    if c != r {
                        out.push(Coord::new(r, r));
                    }
                    diag_done = true;
                }
                out.push(Coord::new(r, c));
            }
            if !diag_done {
                out.push(Coord::new(r, r));
            }
        }
        out
    }

    /// Cells read through the column view, for cross-checking the views.
    pub fn enumerate_by_columns(&self) -> Vec<Coord> {
        self.cols.pairs().map(|(c, r)| Coord::new(r, c)).collect()
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_u64::<LittleEndian>(self.side as u64)?;
        out.write_u64::<LittleEndian>(self.ones)?;
        out.write_u8(self.plus_identity as u8)?;
        self.rows.write_to(out)?;
        self.cols.write_to(out)
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let side = input.read_u64::<LittleEndian>().map_err(decode_error)? as usize;
        if side < 2 || !side.is_power_of_two() {
            return Err(IndexError::Corrupt(format!("csr side {side}")).into());
        }
        let ones = input.read_u64::<LittleEndian>().map_err(decode_error)?;
        let flags = input.read_u8().map_err(decode_error)?;
        let rows = LineView::read_from(input)?;
        let cols = LineView::read_from(input)?;
        if rows.items.len() as u64 != ones || cols.items.len() as u64 != ones {
            return Err(IndexError::Corrupt("view sizes disagree".into()).into());
        }
        Ok(Self {
            side,
            rows: Arc::new(rows),
            cols: Arc::new(cols),
            ones,
            plus_identity: flags & 1 != 0,
        })
    }

    pub fn serialized_bytes(&self) -> usize {
        8 + 8 + 1 + self.rows.serialized_bytes() + self.cols.serialized_bytes()
    }

    fn restricted_pairs(&self, res: Restriction) -> Vec<(u32, u32)> {
        match (res.row, res.col) {
            (Some(r), Some(c)) => {
                if self.rows.line(r).binary_search(&c).is_ok() {
                    vec![(r, c)]
                } else {
                    vec![]
                }
            }
            (Some(r), None) => self.rows.line(r).iter().map(|&c| (r, c)).collect(),
            (None, Some(c)) => self.cols.line(c).iter().map(|&r| (r, c)).collect(),
            (None, None) => self.rows.pairs().collect(),
        }
    }
}

impl BoolMatrix for CsrcMatrix {
    fn empty(side: usize) -> Self {
        assert!(side >= 2 && side.is_power_of_two());
        Self {
            side,
            rows: Arc::default(),
            cols: Arc::default(),
            ones: 0,
            plus_identity: false,
        }
    }

    fn from_coords(side: usize, coords: &[Coord]) -> Result<Self> {
        Self::build(coords, side)
    }

    fn side(&self) -> usize {
        self.side
    }

    fn stored_ones(&self) -> u64 {
        self.ones
    }

    fn has_identity(&self) -> bool {
        self.plus_identity
    }

    fn with_identity(&self, on: bool) -> Self {
        Self {
            plus_identity: on,
            ..self.clone()
        }
    }

    fn is_transposed(&self) -> bool {
        false
    }

    fn transpose(&self) -> Self {
        CsrcMatrix::transpose(self)
    }

    fn get(&self, row: u32, col: u32) -> bool {
        (self.plus_identity && row == col) || self.rows.line(row).binary_search(&col).is_ok()
    }

    fn count_row(&self, row: u32) -> u64 {
        let line = self.rows.line(row);
        line.len() as u64 + (self.plus_identity && line.binary_search(&row).is_err()) as u64
    }

    fn count_col(&self, col: u32) -> u64 {
        let line = self.cols.line(col);
        line.len() as u64 + (self.plus_identity && line.binary_search(&col).is_err()) as u64
    }

    fn coords(&self) -> Vec<Coord> {
        self.enumerate()
    }

    fn same_cells(&self, other: &Self) -> bool {
        if self.plus_identity == other.plus_identity {
            return self.side == other.side && self.ones == other.ones && self.rows == other.rows;
        }
        self.side == other.side && self.enumerate() == other.enumerate()
    }

    fn sum(&self, other: &Self, budget: &Budget) -> Result<Self> {
        check_sides(self.side, other.side)?;
        budget.check()?;
        let plus_identity = self.plus_identity || other.plus_identity;
        if other.ones == 0 {
            return Ok(self.with_identity(plus_identity));
        }
        if self.ones == 0 {
            return Ok(other.with_identity(plus_identity));
        }
        let rows = self.rows.merge(&other.rows);
        let cols = self.cols.merge(&other.cols);
        Ok(Self {
            side: self.side,
            ones: rows.items.len() as u64,
            rows: Arc::new(rows),
            cols: Arc::new(cols),
            plus_identity,
        })
    }

    fn multiply(&self, other: &Self, budget: &Budget) -> Result<Self> {
        check_sides(self.side, other.side)?;
        let mut m = schoor(self, other, budget)?;
        if other.plus_identity {
            m = m.sum(&self.plain(), budget)?;
        }
        if self.plus_identity {
            m = m.sum(&other.plain(), budget)?;
        }
        Ok(m.with_identity(self.plus_identity && other.plus_identity))
    }

    fn sum_restricted(&self, other: &Self, res: Restriction, budget: &Budget) -> Result<Self> {
        check_sides(self.side, other.side)?;
        res.check(self.side)?;
        if res.is_empty() {
            return self.sum(other, budget);
        }
        budget.check()?;
        let mut pairs = self.restricted_pairs(res);
        pairs.extend(other.restricted_pairs(res));
        if self.plus_identity || other.plus_identity {
            if let Some(cell) = res.identity_cell() {
                pairs.push((cell.row, cell.col));
            }
        }
        Ok(Self::from_pairs(self.side, &mut pairs))
    }

    fn multiply_restricted(&self, other: &Self, res: Restriction, budget: &Budget) -> Result<Self> {
        check_sides(self.side, other.side)?;
        res.check(self.side)?;
        if res.is_empty() {
            return self.multiply(other, budget);
        }
        budget.check()?;
        let mut pairs = Vec::new();
        match (res.row, res.col) {
            (Some(r), Some(c)) => {
                if intersects(self.rows.line(r), other.cols.line(c)) {
                    pairs.push((r, c));
                }
            }
            (Some(r), None) => {
                for &k in self.rows.line(r) {
                    budget.tick()?;
                    pairs.extend(other.rows.line(k).iter().map(|&c| (r, c)));
                }
            }
            (None, Some(c)) => {
                for &k in other.cols.line(c) {
                    budget.tick()?;
                    pairs.extend(self.cols.line(k).iter().map(|&r| (r, c)));
                }
            }
            (None, None) => unreachable!(),
        }
        let mut m = Self::from_pairs(self.side, &mut pairs);
        if other.plus_identity {
            m = m.sum(&self.plain().restrict(res, budget)?, budget)?;
        }
        if self.plus_identity {
            m = m.sum(&other.plain().restrict(res, budget)?, budget)?;
        }
        if self.plus_identity && other.plus_identity {
            if let Some(cell) = res.identity_cell() {
                m = m.sum(&Self::build(&[cell], self.side)?, budget)?;
            }
        }
        Ok(m)
    }
}

/// Schoor's product: for every `k` that is both a nonempty column of `a`
/// and a nonempty row of `b`, emit `col_k(a) x row_k(b)`.
/// Largest side whose output cells are deduplicated through a bitmap.
const BITMAP_SIDE: usize = 1 << 12;

/// Collects product cells. Duplicates are dropped as they arrive, so memory
/// stays proportional to the distinct output, not to the Cartesian products.
enum PairSink {
    Bitmap {
        side: usize,
        seen: Vec<u64>,
        pairs: Vec<(u32, u32)>,
    },
    Compacting {
        pairs: Vec<(u32, u32)>,
        compacted: usize,
    },
}

impl PairSink {
    fn new(side: usize) -> Self {
        if side <= BITMAP_SIDE {
            PairSink::Bitmap {
                side,
                seen: vec![0; (side * side).div_ceil(64)],
                pairs: Vec::new(),
            }
        } else {
            PairSink::Compacting {
                pairs: Vec::new(),
                compacted: 0,
            }
        }
    }

    fn extend(&mut self, r: u32, cols: &[u32]) {
        match self {
            PairSink::Bitmap { side, seen, pairs } => {
                let base = r as usize * *side;
                for &c in cols {
                    let i = base + c as usize;
                    if seen[i / 64] & (1 << (i % 64)) == 0 {
                        seen[i / 64] |= 1 << (i % 64);
                        pairs.push((r, c));
                    }
                }
            }
            PairSink::Compacting { pairs, compacted } => {
                pairs.extend(cols.iter().map(|&c| (r, c)));
                // Sort and dedup whenever the raw tail outgrows the
                // deduplicated prefix.
                if pairs.len() > 2 * *compacted + (1 << 20) {
                    pairs.sort_unstable();
                    pairs.dedup();
                    *compacted = pairs.len();
                }
            }
        }
    }

    fn into_pairs(self) -> Vec<(u32, u32)> {
        match self {
            PairSink::Bitmap { pairs, .. } | PairSink::Compacting { pairs, .. } => pairs,
        }
    }
}

fn schoor(a: &CsrcMatrix, b: &CsrcMatrix, budget: &Budget) -> Result<CsrcMatrix> {
    let mut sink = PairSink::new(a.side);
    let (ka, kb) = (&a.cols, &b.rows);
    let (mut i, mut j) = (0, 0);
    while i < ka.ids.len() && j < kb.ids.len() {
        match ka.ids[i].cmp(&kb.ids[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let cols = kb.nth(j);
                for &r in ka.nth(i) {
                    budget.tick()?;
                    sink.extend(r, cols);
                }
                i += 1;
                j += 1;
            }
        }
    }
    Ok(CsrcMatrix::from_pairs(a.side, &mut sink.into_pairs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(side: usize, cells: &[(u32, u32)]) -> CsrcMatrix {
        let coords: Vec<Coord> = cells.iter().map(|&c| c.into()).collect();
        CsrcMatrix::build(&coords, side).unwrap()
    }

    #[test]
    fn views_of_two_cells() {
        let a = m(4, &[(0, 0), (3, 3)]);
        assert_eq!(a.row_view().ids(), &[0, 3]);
        assert_eq!(a.row_view().items(), &[0, 3]);
        assert_eq!(a.col_view().ids(), &[0, 3]);
    }

    #[test]
    fn empty_views() {
        let a = m(4, &[]);
        assert!(a.row_view().ids().is_empty());
        assert!(a.row_view().items().is_empty());
        assert!(a.col_view().ids().is_empty());
        assert_eq!(a.stored_ones(), 0);
    }

    #[test]
    fn transpose_swaps_views() {
        let a = m(2, &[(0, 1)]);
        let t = a.transpose();
        assert!(t.get(1, 0));
        assert!(!t.get(0, 1));
        assert!(t.shares_storage(&a));
        assert_eq!(t.transpose().enumerate(), a.enumerate());
    }

    #[test]
    fn schoor_path() {
        let b = Budget::unlimited();
        let a = m(4, &[(0, 1)]);
        let c = m(4, &[(1, 2)]);
        assert_eq!(
            a.multiply(&c, &b).unwrap().enumerate(),
            vec![Coord::new(0, 2)]
        );
    }

    #[test]
    fn identity_enumeration_is_row_major() {
        let a = m(4, &[(0, 3), (2, 1), (2, 2)]).with_identity(true);
        let cells: Vec<(u32, u32)> = a.enumerate().iter().map(|c| (c.row, c.col)).collect();
        assert_eq!(cells, vec![(0, 0), (0, 3), (1, 1), (2, 1), (2, 2), (3, 3)]);
        assert_eq!(a.count_row(2), 2);
        assert_eq!(a.count_row(1), 1);
    }

    #[test]
    fn view_duality() {
        let a = m(8, &[(0, 7), (3, 1), (3, 2), (5, 5), (6, 0)]);
        let mut by_cols = a.enumerate_by_columns();
        by_cols.sort();
        assert_eq!(by_cols, a.enumerate());
    }

    #[test]
    fn restricted_cell_product() {
        let b = Budget::unlimited();
        let a = m(4, &[(0, 1), (0, 2)]);
        let c = m(4, &[(2, 3), (1, 0)]);
        let p = a
            .multiply_restricted(&c, Restriction::cell(0, 3), &b)
            .unwrap();
        assert_eq!(p.enumerate(), vec![Coord::new(0, 3)]);
        let q = a
            .multiply_restricted(&c, Restriction::cell(1, 3), &b)
            .unwrap();
        assert_eq!(q.stored_ones(), 0);
    }

    #[test]
    fn side_mismatch() {
        let b = Budget::unlimited();
        assert!(matches!(
            m(4, &[]).sum(&m(8, &[]), &b),
            Err(Error::SideMismatch { .. })
        ));
    }

    #[test]
    fn serialization_round_trip() {
        let a = m(8, &[(0, 7), (3, 1), (3, 2)]);
        let mut buf = Vec::new();
        a.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), a.serialized_bytes());
        let back = CsrcMatrix::read_from(&mut buf.as_slice()).unwrap();
        assert!(back.same_cells(&a));
        assert_eq!(back.col_view(), a.col_view());
    }

    #[test]
    fn products_with_many_duplicates_on_both_sinks() {
        let b = Budget::unlimited();
        for side in [64, 2 * BITMAP_SIDE] {
            // Complete bipartite 40 x 40 through 40 middle nodes.
            let left: Vec<(u32, u32)> =
                (0..40).flat_map(|r| (0..40).map(move |k| (r, k))).collect();
            let a = m(side, &left);
            let p = a.multiply(&a.transpose().transpose(), &b).unwrap();
            let want: Vec<Coord> = (0..40)
                .flat_map(|r| (0..40).map(move |c| Coord::new(r, c)))
                .collect();
            assert_eq!(p.enumerate(), want);
        }
        let mut sink = PairSink::new(2 * BITMAP_SIDE);
        for _ in 0..3 {
            for r in 0..1000 {
                sink.extend(r, &(0..1000).collect::<Vec<_>>());
            }
        }
        let mut pairs = sink.into_pairs();
        assert!(pairs.len() < 3_000_000);
        pairs.sort_unstable();
        pairs.dedup();
        assert_eq!(pairs.len(), 1_000_000);
    }
}
