//! Triple ingestion, per-label matrices, the on-disk index and query entry
//! points.
//!
//! Triple files are UTF-8 with one `subject TAB label TAB object` per line;
//! blank lines and lines starting with `#` are skipped.
//!
//! Index layout, little-endian throughout:
//!
//! ```text
//! "SPQ1" | version u16 | backend u8 | side u64 | triples u64
//! | dictionary (nodes, then labels: count u64, then u32-length strings)
//! | one serialized matrix per label, in label-id order
//! ```

mod dict;
mod stats;

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::csr::CsrcMatrix;
use crate::error::{decode_error, Error, IndexError, Result};
use crate::k2::K2Matrix;
use crate::matrix::{side_for, BoolMatrix, Budget, Coord};
use crate::plan::{self, Plan, PlanOptions, Resolver};
use crate::rpq::RpqQuery;

pub use dict::Dictionary;
pub use stats::Stats;

const MAGIC: &[u8; 4] = b"SPQ1";
const VERSION: u16 = 1;

/// Matrix representation used for every label of a store.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Backend {
    #[default]
    K2,
    Csr,
}

impl Backend {
    fn tag(self) -> u8 {
        match self {
            Backend::K2 => 0,
            Backend::Csr => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Backend::K2),
            1 => Ok(Backend::Csr),
            t => Err(IndexError::UnknownBackend(t).into()),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::K2 => "k2",
            Backend::Csr => "csr",
        })
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "k2" => Ok(Backend::K2),
            "csr" => Ok(Backend::Csr),
            other => Err(format!("unknown backend `{other}` (expected k2 or csr)")),
        }
    }
}

/// Per-label matrices, indexed by label id.
#[derive(Clone, Debug)]
pub enum Matrices {
    K2(Vec<K2Matrix>),
    Csr(Vec<CsrcMatrix>),
}

/// Answer of a query: node-id pairs in the enumeration order of the result
/// matrix, plus the diagonal pairs contributed only by a lazy identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryResult {
    pub pairs: Vec<(u32, u32)>,
    pub identity: Vec<u32>,
}

impl QueryResult {
    pub fn len(&self) -> usize {
        self.pairs.len() + self.identity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every answer pair, identity-derived ones last.
    pub fn all_pairs(&self) -> Vec<(u32, u32)> {
        let mut out = self.pairs.clone();
        out.extend(self.identity.iter().map(|&v| (v, v)));
        out
    }
}

/// An immutable labeled graph with one Boolean matrix per label.
#[derive(Clone, Debug)]
pub struct GraphStore {
    dict: Dictionary,
    side: usize,
    triples: u64,
    matrices: Matrices,
}

impl Resolver for Dictionary {
    fn label_id(&self, label: &str) -> Option<usize> {
        Dictionary::label_id(self, label)
    }

    fn node_id(&self, node: &str) -> Option<u32> {
        Dictionary::node_id(self, node)
    }
}

impl GraphStore {
    /// Builds from `(subject, label, object)` names; duplicates collapse.
    pub fn from_triples<S: AsRef<str>>(
        triples: impl IntoIterator<Item = (S, S, S)>,
        backend: Backend,
    ) -> Result<Self> {
        let mut dict = Dictionary::new();
        let mut per_label: Vec<Vec<Coord>> = Vec::new();
        for (s, p, o) in triples {
            let s = dict.intern_node(s.as_ref());
            let l = dict.intern_label(p.as_ref());
            let o = dict.intern_node(o.as_ref());
            if l == per_label.len() {
                per_label.push(Vec::new());
            }
            per_label[l].push(Coord::new(s, o));
        }
        Self::from_parts(dict, &per_label, backend)
    }

    /// Builds from an interned dictionary and per-label cells.
    pub fn from_parts(
        dict: Dictionary,
        per_label: &[Vec<Coord>],
        backend: Backend,
    ) -> Result<Self> {
        assert_eq!(per_label.len(), dict.label_count());
        let side = side_for(dict.node_count());
        let matrices = match backend {
            Backend::K2 => Matrices::K2(
                per_label
                    .iter()
                    .map(|c| K2Matrix::build(c, side))
                    .collect::<Result<_>>()?,
            ),
            Backend::Csr => Matrices::Csr(
                per_label
                    .iter()
                    .map(|c| CsrcMatrix::build(c, side))
                    .collect::<Result<_>>()?,
            ),
        };
        let mut store = Self {
            dict,
            side,
            triples: 0,
            matrices,
        };
        store.triples = (0..store.dict.label_count())
            .map(|l| store.label_ones(l))
            .sum();
        Ok(store)
    }

    /// Reads the tab-separated triple format.
    pub fn read_triples<R: BufRead>(reader: R, backend: Backend) -> Result<Self> {
        let mut triples = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let malformed = |message: String| Error::MalformedTriple {
                line: i + 1,
                message,
            };
            if fields.len() != 3 {
                return Err(malformed(format!(
                    "expected 3 tab-separated fields, found {}",
                    fields.len()
                )));
            }
            if let Some(k) = fields.iter().position(|f| f.is_empty()) {
                return Err(malformed(format!("field {} is empty", k + 1)));
            }
            triples.push((
                fields[0].to_string(),
                fields[1].to_string(),
                fields[2].to_string(),
            ));
        }
        Self::from_triples(triples, backend)
    }

    pub fn load_triples(path: impl AsRef<Path>, backend: Backend) -> Result<Self> {
        Self::read_triples(BufReader::new(File::open(path)?), backend)
    }

    pub fn backend(&self) -> Backend {
        match self.matrices {
            Matrices::K2(_) => Backend::K2,
            Matrices::Csr(_) => Backend::Csr,
        }
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }

    pub fn matrices(&self) -> &Matrices {
        &self.matrices
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn node_count(&self) -> usize {
        self.dict.node_count()
    }

    pub fn label_count(&self) -> usize {
        self.dict.label_count()
    }

    /// Distinct triples.
    pub fn triple_count(&self) -> u64 {
        self.triples
    }

    pub fn label_ones(&self, label: usize) -> u64 {
        match &self.matrices {
            Matrices::K2(ms) => ms[label].stored_ones(),
            Matrices::Csr(ms) => ms[label].stored_ones(),
        }
    }

    /// Cells of one label matrix, sorted.
    pub fn label_cells(&self, label: usize) -> Vec<Coord> {
        let mut cells = match &self.matrices {
            Matrices::K2(ms) => ms[label].coords(),
            Matrices::Csr(ms) => ms[label].coords(),
        };
        cells.sort_unstable();
        cells
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_all(MAGIC)?;
        out.write_u16::<LittleEndian>(VERSION)?;
        out.write_u8(self.backend().tag())?;
        out.write_u64::<LittleEndian>(self.side as u64)?;
        out.write_u64::<LittleEndian>(self.triples)?;
        self.dict.write_to(out)?;
        match &self.matrices {
            Matrices::K2(ms) => ms.iter().try_for_each(|m| m.write_to(out)),
            Matrices::Csr(ms) => ms.iter().try_for_each(|m| m.write_to(out)),
        }
    }

    /// Reads an index; `expected` rejects an index of the other backend.
    pub fn read_from<R: Read>(input: &mut R, expected: Option<Backend>) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic).map_err(decode_error)?;
        if &magic != MAGIC {
            return Err(IndexError::BadMagic.into());
        }
        let version = input.read_u16::<LittleEndian>().map_err(decode_error)?;
        if version != VERSION {
            return Err(IndexError::UnsupportedVersion(version).into());
        }
        let backend = Backend::from_tag(input.read_u8().map_err(decode_error)?)?;
        if let Some(want) = expected {
            if want != backend {
                return Err(IndexError::BackendMismatch {
                    found: backend.to_string(),
                    expected: want.to_string(),
                }
                .into());
            }
        }
        let side = input.read_u64::<LittleEndian>().map_err(decode_error)? as usize;
        let triples = input.read_u64::<LittleEndian>().map_err(decode_error)?;
        let dict = Dictionary::read_from(input)?;
        if side != side_for(dict.node_count()) {
            return Err(IndexError::Corrupt(format!(
                "side {side} for {} nodes",
                dict.node_count()
            ))
            .into());
        }
        let labels = dict.label_count();
        let matrices = match backend {
            Backend::K2 => Matrices::K2(
                (0..labels)
                    .map(|_| K2Matrix::read_from(input))
                    .collect::<Result<_>>()?,
            ),
            Backend::Csr => Matrices::Csr(
                (0..labels)
                    .map(|_| CsrcMatrix::read_from(input))
                    .collect::<Result<_>>()?,
            ),
        };
        let store = Self {
            dict,
            side,
            triples,
            matrices,
        };
        let ones: u64 = (0..labels).map(|l| store.label_ones(l)).sum();
        let sides_ok = match &store.matrices {
            Matrices::K2(ms) => ms.iter().all(|m| m.side() == side),
            Matrices::Csr(ms) => ms.iter().all(|m| m.side() == side),
        };
        if ones != triples || !sides_ok {
            return Err(IndexError::Corrupt("matrices disagree with the header".into()).into());
        }
        Ok(store)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, expected: Option<Backend>) -> Result<Self> {
        Self::read_from(&mut BufReader::new(File::open(path)?), expected)
    }

    /// Exact size of the serialized index in bytes.
    pub fn index_bytes(&self) -> usize {
        let matrices: usize = match &self.matrices {
            Matrices::K2(ms) => ms.iter().map(K2Matrix::serialized_bytes).sum(),
            Matrices::Csr(ms) => ms.iter().map(CsrcMatrix::serialized_bytes).sum(),
        };
        4 + 2 + 1 + 8 + 8 + self.dict.serialized_bytes() + matrices
    }

    pub fn stats(&self) -> Stats {
        Stats::of(self)
    }

    pub fn compile(&self, query: &RpqQuery, options: PlanOptions) -> Result<Plan> {
        plan::compile(query, &self.dict, options)
    }

    /// Evaluates `query` with the given plan passes under `budget`.
    pub fn query(
        &self,
        query: &RpqQuery,
        options: PlanOptions,
        budget: &Budget,
    ) -> Result<QueryResult> {
        let plan = self.compile(query, options)?;
        self.run(&plan, budget)
    }

    pub fn run(&self, plan: &Plan, budget: &Budget) -> Result<QueryResult> {
        match &self.matrices {
            Matrices::K2(ms) => {
                let m = plan::evaluate(plan, ms, self.side, budget)?;
                Ok(self.answers(&m, plan))
            }
            Matrices::Csr(ms) => {
                let m = plan::evaluate(plan, ms, self.side, budget)?;
                Ok(self.answers(&m, plan))
            }
        }
    }

    /// Drops padding ids beyond the node count and, for `?x E ?x`, every
    /// off-diagonal cell.
    fn answers<M: BoolMatrix>(&self, m: &M, plan: &Plan) -> QueryResult {
        let n = self.node_count() as u32;
        let mut stored_diag = vec![false; if m.has_identity() { n as usize } else { 0 }];
        let pairs = m
            .with_identity(false)
            .coords()
            .into_iter()
            .filter(|c| c.row < n && c.col < n && (!plan.same_variable || c.row == c.col))
            .map(|c| {
                if c.row == c.col && !stored_diag.is_empty() {
                    stored_diag[c.row as usize] = true;
                }
                (c.row, c.col)
            })
            .collect();
        let identity = (0..n)
            .filter(|&v| m.has_identity() && !stored_diag[v as usize])
            .collect();
        QueryResult { pairs, identity }
    }

    /// Renders an answer pair as node names.
    pub fn pair_names(&self, (s, o): (u32, u32)) -> (&str, &str) {
        (
            self.dict.node(s).expect("answer id outside the dictionary"),
            self.dict.node(o).expect("answer id outside the dictionary"),
        )
    }
}
