//! Dense bit-array matrices with textbook operations.

use crate::matrix::Coord;

/// Largest side a dense oracle matrix may have.
pub const MAX_DENSE_SIDE: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    side: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl DenseMatrix {
    pub fn zeros(side: usize) -> Self {
        assert!(
            side <= MAX_DENSE_SIDE,
            "dense oracle limited to side {MAX_DENSE_SIDE}"
        );
        let stride = side.div_ceil(64);
        Self {
            side,
            stride,
            bits: vec![0; stride * side],
        }
    }

    pub fn identity(side: usize) -> Self {
        let mut m = Self::zeros(side);
        for i in 0..side {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_coords(side: usize, coords: &[Coord]) -> Self {
        let mut m = Self::zeros(side);
        for c in coords {
            m.set(c.row as usize, c.col as usize, true);
        }
        m
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.bits[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.bits[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.stride..(r + 1) * self.stride]
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn row_count(&self, r: usize) -> u64 {
        self.row(r).iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn col_count(&self, c: usize) -> u64 {
        (0..self.side).filter(|&r| self.get(r, c)).count() as u64
    }

    /// Row-major list of 1 cells.
    pub fn coords(&self) -> Vec<Coord> {
        let mut out = Vec::new();
        for r in 0..self.side {
            for c in 0..self.side {
                if self.get(r, c) {
                    out.push(Coord::new(r as u32, c as u32));
                }
            }
        }
        out
    }

    pub fn or(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.side, other.side);
        let mut m = self.clone();
        for (w, o) in m.bits.iter_mut().zip(&other.bits) {
            *w |= o;
        }
        m
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut m = Self::zeros(self.side);
        for r in 0..self.side {
            for c in 0..self.side {
                if self.get(r, c) {
                    m.set(c, r, true);
                }
            }
        }
        m
    }

    /// `C[i][j] = OR_k A[i][k] AND B[k][j]`, with the innermost loop done a
    /// word of `j` at a time.
    pub fn boolmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.side, other.side);
        let mut m = Self::zeros(self.side);
        for i in 0..self.side {
            for k in 0..self.side {
                if self.get(i, k) {
                    let src = other.row(k);
                    let dst = &mut m.bits[i * self.stride..(i + 1) * self.stride];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d |= s;
                    }
                }
            }
        }
        m
    }

    pub fn power(&self, k: u32) -> DenseMatrix {
        assert!(k >= 1);
        let mut m = self.clone();
        for _ in 1..k {
            m = m.boolmul(self);
        }
        m
    }

    /// Transitive closure (nonempty paths) by Warshall's algorithm.
    pub fn warshall_closure(&self) -> DenseMatrix {
        let mut m = self.clone();
        for k in 0..self.side {
            let row_k = m.row(k).to_vec();
            for i in 0..self.side {
                if m.get(i, k) {
                    let dst = &mut m.bits[i * self.stride..(i + 1) * self.stride];
                    for (d, s) in dst.iter_mut().zip(&row_k) {
                        *d |= s;
                    }
                }
            }
        }
        m
    }

    /// Reflexive-transitive closure.
    pub fn star(&self) -> DenseMatrix {
        self.warshall_closure().or(&Self::identity(self.side))
    }

    /// Zeroes everything outside row `row` and column `col` (when given).
    pub fn mask(&self, row: Option<u32>, col: Option<u32>) -> DenseMatrix {
        let mut m = Self::zeros(self.side);
        for r in 0..self.side {
            if row.is_some_and(|x| x as usize != r) {
                continue;
            }
            for c in 0..self.side {
                if col.is_some_and(|x| x as usize != c) {
                    continue;
                }
                if self.get(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(side: usize, cells: &[(u32, u32)]) -> DenseMatrix {
        let coords: Vec<Coord> = cells.iter().map(|&c| c.into()).collect();
        DenseMatrix::from_coords(side, &coords)
    }

    #[test]
    fn or_with_zero_is_identity() {
        let a = m(5, &[(0, 1), (3, 4)]);
        assert_eq!(a.or(&DenseMatrix::zeros(5)), a);
    }

    #[test]
    fn three_cycle_closure_is_full() {
        let a = m(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(a.warshall_closure().count(), 9);
        assert_eq!(a.power(3), DenseMatrix::identity(3));
    }

    #[test]
    fn warshall_equals_iterated_squaring() {
        let a = m(70, &[(0, 1), (1, 2), (2, 3), (5, 69), (69, 0), (40, 41)]);
        let mut it = a.clone();
        loop {
            let next = it.or(&it.boolmul(&it));
            if next == it {
                break;
            }
            it = next;
        }
        assert_eq!(it, a.warshall_closure());
    }

    #[test]
    fn mask_keeps_line() {
        let a = m(4, &[(0, 0), (0, 3), (1, 3), (2, 2)]);
        assert_eq!(a.mask(Some(0), None).count(), 2);
        assert_eq!(a.mask(None, Some(3)).count(), 2);
        assert_eq!(a.mask(Some(1), Some(3)).count(), 1);
    }
}
