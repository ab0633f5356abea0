//! Shared vocabulary for the two matrix backends.

use std::cell::Cell;
use std::fmt;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// A cell of a square Boolean matrix, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coord {
    pub row: u32,
    pub col: u32,
}

impl Coord {
    pub const fn new(row: u32, col: u32) -> Self {
        Self { row, col }
    }

    pub const fn transposed(self) -> Self {
        Self {
            row: self.col,
            col: self.row,
        }
    }
}

impl From<(u32, u32)> for Coord {
    fn from((row, col): (u32, u32)) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Row and/or column restriction `<r> M <c>`: every cell outside row `r`
/// and column `c` is zeroed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Restriction {
    pub row: Option<u32>,
    pub col: Option<u32>,
}

impl Restriction {
    pub const NONE: Restriction = Restriction {
        row: None,
        col: None,
    };

    pub const fn row(r: u32) -> Self {
        Self {
            row: Some(r),
            col: None,
        }
    }

    pub const fn col(c: u32) -> Self {
        Self {
            row: None,
            col: Some(c),
        }
    }

    pub const fn cell(r: u32, c: u32) -> Self {
        Self {
            row: Some(r),
            col: Some(c),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.row.is_none() && self.col.is_none()
    }

    pub fn admits(&self, row: u32, col: u32) -> bool {
        self.row.is_none_or(|r| r == row) && self.col.is_none_or(|c| c == col)
    }

    /// Both restrictions combined; `other` wins where both are set.
    pub fn union(self, other: Restriction) -> Restriction {
        Restriction {
            row: other.row.or(self.row),
            col: other.col.or(self.col),
        }
    }

    /// The one diagonal cell the identity keeps under this restriction.
    pub fn identity_cell(&self) -> Option<Coord> {
        match (self.row, self.col) {
            (Some(r), Some(c)) => (r == c).then_some(Coord::new(r, r)),
            (Some(r), None) => Some(Coord::new(r, r)),
            (None, Some(c)) => Some(Coord::new(c, c)),
            (None, None) => None,
        }
    }

    pub(crate) fn check(&self, side: usize) -> Result<()> {
        for v in [self.row, self.col].into_iter().flatten() {
            if v as usize >= side {
                return Err(Error::OutOfRange {
                    row: self.row.unwrap_or(0) as u64,
                    col: self.col.unwrap_or(0) as u64,
                    side,
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.row {
            write!(f, "<{r}>")?;
        }
        f.write_str("M")?;
        if let Some(c) = self.col {
            write!(f, "<{c}>")?;
        }
        Ok(())
    }
}

/// Per-evaluation deadline plus closure-iteration instrumentation.
///
/// Long-running kernels call [`Budget::tick`] from their inner loops; the
/// clock is only read every `TICK_PERIOD` ticks.
#[derive(Debug, Default)]
pub struct Budget {
    deadline: Option<Instant>,
    ticks: Cell<u32>,
    iterations: Cell<u64>,
}

const TICK_PERIOD: u32 = 1024;

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_timeout(timeout: Duration) -> Self {
        Self::until(Instant::now() + timeout)
    }

    pub fn until(deadline: Instant) -> Self {
        Self {
            deadline: Some(deadline),
            ..Self::default()
        }
    }

    pub fn deadline(&self) -> Option<Instant> {
        self.deadline
    }

    pub fn check(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn tick(&self) -> Result<()> {
        if self.deadline.is_none() {
            return Ok(());
        }
        let t = self.ticks.get().wrapping_add(1);
        self.ticks.set(t);
        if t % TICK_PERIOD == 0 {
            self.check()
        } else {
            Ok(())
        }
    }

    /// Closure iterations performed so far under this budget.
    pub fn iterations(&self) -> u64 {
        self.iterations.get()
    }

    pub(crate) fn count_iteration(&self) -> Result<()> {
        self.iterations.set(self.iterations.get() + 1);
        self.check()
    }
}

/// Operations every sparse Boolean matrix backend provides.
///
/// Matrices are immutable values; operations return new matrices. A matrix
/// may carry a lazy `+ I` flag, in which case it denotes the stored cells
/// plus the whole diagonal. `stored_ones` never counts that diagonal.
pub trait BoolMatrix: Clone + Sized {
    fn empty(side: usize) -> Self;

    fn from_coords(side: usize, coords: &[Coord]) -> Result<Self>;

    fn identity(side: usize) -> Self {
        Self::empty(side).with_identity(true)
    }

    fn side(&self) -> usize;

    fn stored_ones(&self) -> u64;

    fn has_identity(&self) -> bool;

    fn with_identity(&self, on: bool) -> Self;

    fn is_transposed(&self) -> bool;

    fn transpose(&self) -> Self;

    fn get(&self, row: u32, col: u32) -> bool;

    fn count_row(&self, row: u32) -> u64;

    fn count_col(&self, col: u32) -> u64;

    /// Every 1 cell exactly once, diagonal included when flagged.
    fn coords(&self) -> Vec<Coord>;

    /// Cell-wise equality, regardless of representation flags.
    fn same_cells(&self, other: &Self) -> bool;

    fn sum(&self, other: &Self, budget: &Budget) -> Result<Self>;

    fn multiply(&self, other: &Self, budget: &Budget) -> Result<Self>;

    /// `<r>(A + B)<c>`; never carries the identity flag.
    fn sum_restricted(&self, other: &Self, res: Restriction, budget: &Budget) -> Result<Self>;

    /// `(<r>A) x (B<c>)`; never carries the identity flag.
    fn multiply_restricted(&self, other: &Self, res: Restriction, budget: &Budget) -> Result<Self>;

    fn restrict(&self, res: Restriction, budget: &Budget) -> Result<Self> {
        self.sum_restricted(&Self::empty(self.side()), res, budget)
    }

    /// Number of cells, diagonal included when flagged.
    fn count_cells(&self) -> u64 {
        if self.has_identity() {
            self.coords().len() as u64
        } else {
            self.stored_ones()
        }
    }
}

pub(crate) fn check_sides(a: usize, b: usize) -> Result<()> {
    if a != b {
        Err(Error::SideMismatch { left: a, right: b })
    } else {
        Ok(())
    }
}

/// Smallest power of two that is at least `n` and at least 2.
pub fn side_for(n: usize) -> usize {
    n.max(2).next_power_of_two()
}
