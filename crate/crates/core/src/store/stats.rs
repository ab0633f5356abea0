use std::fmt::Write as _;
use std::io::Write;

use super::{Backend, GraphStore};

/// Size and shape of a store.
#[derive(Clone, Debug, PartialEq)]
pub struct Stats {
    pub backend: Backend,
    pub nodes: usize,
    pub labels: usize,
    pub triples: u64,
    pub side: usize,
    pub index_bytes: usize,
    pub per_label: Vec<(String, u64)>,
}

impl Stats {
    pub(super) fn of(store: &GraphStore) -> Self {
        Self {
            backend: store.backend(),
            nodes: store.node_count(),
            labels: store.label_count(),
            triples: store.triple_count(),
            side: store.side(),
            index_bytes: store.index_bytes(),
            per_label: store
                .dictionary()
                .labels()
                .enumerate()
                .map(|(l, name)| (name.to_string(), store.label_ones(l)))
                .collect(),
        }
    }

    /// Zero for an empty store.
    pub fn bytes_per_triple(&self) -> f64 {
        if self.triples == 0 {
            0.0
        } else {
            self.index_bytes as f64 / self.triples as f64
        }
    }

    /// `key=value` lines; per-label counts as `label.<name>=<ones>`.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "backend={}", self.backend);
        let _ = writeln!(s, "nodes={}", self.nodes);
        let _ = writeln!(s, "labels={}", self.labels);
        let _ = writeln!(s, "triples={}", self.triples);
        let _ = writeln!(s, "side={}", self.side);
        let _ = writeln!(s, "index_bytes={}", self.index_bytes);
        let _ = writeln!(s, "bytes_per_triple={:.4}", self.bytes_per_triple());
        for (name, ones) in &self.per_label {
            let _ = writeln!(s, "label.{name}={ones}");
        }
        s
    }

    /// One CSV row per label after a summary row labelled `*`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "label",
            "ones",
            "backend",
            "nodes",
            "labels",
            "triples",
            "index_bytes",
            "bytes_per_triple",
        ])?;
        w.write_record([
            "*".to_string(),
            self.triples.to_string(),
            self.backend.to_string(),
            self.nodes.to_string(),
            self.labels.to_string(),
            self.triples.to_string(),
            self.index_bytes.to_string(),
            format!("{:.4}", self.bytes_per_triple()),
        ])?;
        for (name, ones) in &self.per_label {
            w.write_record([name.as_str(), &ones.to_string(), "", "", "", "", "", ""])?;
        }
        w.flush()?;
        Ok(())
    }
}
