use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparseq_core::error::IndexError;
use sparseq_core::{Backend, Error, GraphStore};
use tempfile::TempDir;

fn random_triples(seed: u64, n: usize) -> Vec<(String, String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (
                format!("n{}", rng.gen_range(0..2000)),
                format!("p{}", rng.gen_range(0..7)),
                format!("n{}", rng.gen_range(0..2000)),
            )
        })
        .collect()
}

#[test]
fn label_counts_match_a_set_of_triples() {
    let triples = random_triples(1, 10_000);
    let distinct: HashSet<_> = triples.iter().cloned().collect();
    let mut per_label: HashMap<&str, u64> = HashMap::new();
    for (_, p, _) in &distinct {
        *per_label.entry(p.as_str()).or_default() += 1;
    }
    for backend in [Backend::K2, Backend::Csr] {
        let store =
            GraphStore::from_triples(triples.iter().map(|(s, p, o)| (s, p, o)), backend).unwrap();
        assert_eq!(store.triple_count(), distinct.len() as u64);
        let dict = store.dictionary();
        for (l, name) in dict.labels().enumerate() {
            assert_eq!(store.label_ones(l), per_label[name], "{name}");
            for c in store.label_cells(l) {
                let key = (
                    dict.node(c.row).unwrap().to_string(),
                    name.to_string(),
                    dict.node(c.col).unwrap().to_string(),
                );
                assert!(distinct.contains(&key));
            }
        }
    }
}

#[test]
fn save_load_round_trip_and_stats_size() {
    let dir = TempDir::new().unwrap();
    let triples = random_triples(2, 5_000);
    for backend in [Backend::K2, Backend::Csr] {
        let store =
            GraphStore::from_triples(triples.iter().map(|(s, p, o)| (s, p, o)), backend).unwrap();
        let path = dir.path().join(format!("{backend}.idx"));
        store.save(&path).unwrap();
        let size = std::fs::metadata(&path).unwrap().len() as usize;
        assert_eq!(store.stats().index_bytes, size);
        assert_eq!(store.index_bytes(), size);
        let back = GraphStore::load(&path, Some(backend)).unwrap();
        assert_eq!(back.backend(), backend);
        assert_eq!(back.triple_count(), store.triple_count());
        assert_eq!(back.node_count(), store.node_count());
        for l in 0..store.label_count() {
            assert_eq!(back.label_cells(l), store.label_cells(l));
        }
        let other = if backend == Backend::K2 {
            Backend::Csr
        } else {
            Backend::K2
        };
        assert!(matches!(
            GraphStore::load(&path, Some(other)),
            Err(Error::Index(IndexError::BackendMismatch { .. }))
        ));
    }
}

#[test]
fn truncated_and_foreign_files_are_rejected() {
    let store = GraphStore::from_triples([("a", "p", "b")], Backend::K2).unwrap();
    let mut buf = Vec::new();
    store.write_to(&mut buf).unwrap();
    for cut in [0, 3, buf.len() / 2, buf.len() - 1] {
        assert!(
            GraphStore::read_from(&mut &buf[..cut], None).is_err(),
            "cut {cut}"
        );
    }
    let mut bad = buf.clone();
    bad[0] ^= 0xff;
    assert!(matches!(
        GraphStore::read_from(&mut &bad[..], None),
        Err(Error::Index(IndexError::BadMagic))
    ));
}

#[test]
fn malformed_lines_report_their_number() {
    let text = "# header\na\tp\tb\n\nb\tp\n";
    match GraphStore::read_triples(text.as_bytes(), Backend::Csr) {
        Err(Error::MalformedTriple { line, .. }) => assert_eq!(line, 4),
        other => panic!("{:?}", other.map(|s| s.triple_count())),
    }
    let store = GraphStore::read_triples("a\tp\tb\r\na\tp\tb\n".as_bytes(), Backend::K2).unwrap();
    assert_eq!(store.triple_count(), 1);
}
