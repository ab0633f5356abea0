//! Two-way regular path queries over edge-labeled graphs, answered with a
//! Boolean matrix algebra.
//!
//! Every edge label is stored as a sparse `|V| x |V|` Boolean adjacency
//! matrix. A query `(s, E, o)` is compiled into sums, products, closures and
//! row/column restrictions of those matrices. Two interchangeable backends
//! implement the algebra:
//!
//! - [`K2Matrix`]: a succinct levelwise k²-tree over a rank bitvector,
//! - [`CsrcMatrix`]: an uncompressed pair of row-major and column-major views.

pub mod bench;
pub mod bitvec;
pub mod closure;
pub mod csr;
pub mod error;
pub mod k2;
pub mod matrix;
pub mod oracle;
pub mod plan;
pub mod rpq;
pub mod store;

pub use csr::CsrcMatrix;
pub use error::{Error, IndexError, ParseError, Result};
pub use k2::K2Matrix;
pub use matrix::{BoolMatrix, Budget, Coord, Restriction};
pub use rpq::{RpqAst, RpqQuery, Term};
pub use store::{Backend, GraphStore};
