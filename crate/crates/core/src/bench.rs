//! Query-suite benchmark: one CSV row per query plus summary footer lines.
//!
//! ```text
//! query,status,results,wall_ms
//! ...
//! Average,<ms>
//! Median,<ms>
//! Timeout,<count>
//! ```
//!
//! Average and median cover every query that did not fail with an error;
//! timed-out queries contribute their elapsed time.

use std::fmt;
use std::io::{BufRead, Write};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::matrix::Budget;
use crate::plan::PlanOptions;
use crate::rpq::parse_query;
use crate::store::GraphStore;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Timeout,
    Error(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
            Status::Error(_) => "error",
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub query: String,
    pub status: Status,
    pub results: usize,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    fn timed(&self) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| !matches!(r.status, Status::Error(_)))
            .map(|r| r.wall_ms)
            .collect()
    }

    pub fn average_ms(&self) -> f64 {
        let t = self.timed();
        if t.is_empty() {
            0.0
        } else {
            t.iter().sum::<f64>() / t.len() as f64
        }
    }

    pub fn median_ms(&self) -> f64 {
        let mut t = self.timed();
        if t.is_empty() {
            return 0.0;
        }
        t.sort_by(f64::total_cmp);
        let m = t.len() / 2;
        if t.len() % 2 == 1 {
            t[m]
        } else {
            (t[m - 1] + t[m]) / 2.0
        }
    }

    pub fn timeouts(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == Status::Timeout)
            .count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record(["query", "status", "results", "wall_ms"])?;
        for r in &self.rows {
            w.write_record([
                r.query.clone(),
                r.status.to_string(),
                r.results.to_string(),
                format!("{:.3}", r.wall_ms),
            ])?;
        }
        w.write_record(["Average".to_string(), format!("{:.3}", self.average_ms())])?;
        w.write_record(["Median".to_string(), format!("{:.3}", self.median_ms())])?;
        w.write_record(["Timeout".to_string(), self.timeouts().to_string()])?;
        w.flush()?;
        Ok(())
    }
}

/// One query per line; blank lines and `#` comments are skipped.
pub fn read_queries<R: BufRead>(reader: R) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let q = line.trim();
        if !q.is_empty() && !q.starts_with('#') {
            out.push(q.to_string());
        }
    }
    Ok(out)
}

/// Runs every query sequentially, each under its own `timeout`.
pub fn run_bench(
    store: &GraphStore,
    queries: &[String],
    timeout: Duration,
    options: PlanOptions,
) -> BenchReport {
    let rows = queries
        .iter()
        .map(|q| {
            let start = Instant::now();
            let budget = Budget::until(start + timeout);
            let outcome = parse_query(q)
                .map_err(Error::from)
                .and_then(|query| store.query(&query, options, &budget));
            let elapsed = start.elapsed();
            let (status, results) = match outcome {
                Ok(_) if elapsed > timeout => (Status::Timeout, 0),
                Ok(r) => (Status::Ok, r.len()),
                Err(Error::Timeout) => (Status::Timeout, 0),
                Err(e) => (Status::Error(e.to_string()), 0),
            };
            BenchRow {
                query: q.clone(),
                status,
                results,
                wall_ms: elapsed.as_secs_f64() * 1e3,
            }
        })
        .collect();
    BenchReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::Backend;

    fn store() -> GraphStore {
        GraphStore::from_triples([("a", "p", "b"), ("b", "p", "c")], Backend::K2).unwrap()
    }

    #[test]
    fn one_query_one_row_plus_footer() {
        let report = run_bench(
            &store(),
            &["a p+ ?y".to_string()],
            Duration::from_secs(10),
            PlanOptions::ALL,
        );
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("a p+ ?y,ok,2,"));
        assert!(lines[2].starts_with("Average,"));
        assert!(lines[3].starts_with("Median,"));
        assert_eq!(lines[4], "Timeout,0");
    }

    #[test]
    fn zero_timeout_times_everything_out() {
        let queries = vec!["?x p* ?y".to_string(), "a p/p ?y".to_string()];
        let report = run_bench(&store(), &queries, Duration::ZERO, PlanOptions::ALL);
        assert_eq!(report.timeouts(), 2);
    }

    #[test]
    fn errors_do_not_stop_the_run() {
        let queries = vec![
            "?x (p ?y".to_string(),
            "?x zz ?y".to_string(),
            "?x p ?y".to_string(),
        ];
        let report = run_bench(
            &store(),
            &queries,
            Duration::from_secs(10),
            PlanOptions::ALL,
        );
        assert!(matches!(report.rows[0].status, Status::Error(_)));
        assert!(matches!(report.rows[1].status, Status::Error(_)));
        assert_eq!(report.rows[2].status, Status::Ok);
        assert_eq!(report.rows[2].results, 2);
    }

    #[test]
    fn median_of_even_count() {
        let row = |ms| BenchRow {
            query: String::new(),
            status: Status::Ok,
            results: 0,
            wall_ms: ms,
        };
        let r = BenchReport {
            rows: vec![row(4.0), row(1.0), row(3.0), row(2.0)],
        };
        assert_eq!(r.median_ms(), 2.5);
        assert_eq!(r.average_ms(), 2.5);
    }

    #[test]
    fn query_files_skip_comments() {
        let q = read_queries("# c\n\n?x p ?y\n  a p b  \n".as_bytes()).unwrap();
        assert_eq!(q, vec!["?x p ?y", "a p b"]);
    }
}
