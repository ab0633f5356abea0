//! `sparseq`: build path-query indexes, run queries, report sizes and run
//! query-suite benchmarks.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sparseq_core::bench::{read_queries, run_bench};
use sparseq_core::plan::PlanOptions;
use sparseq_core::rpq::parse_query;
use sparseq_core::{Backend, Budget, Error, GraphStore};

const EXIT_PARSE: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;
const EXIT_UNKNOWN: u8 = 4;

#[derive(Parser)]
#[command(
    name = "sparseq",
    version,
    about = "Two-way regular path queries over sparse Boolean matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    K2,
    Csr,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::K2 => Backend::K2,
            BackendArg::Csr => Backend::Csr,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Count,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a tab-separated triple file.
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        index: PathBuf,
        #[arg(long, value_enum, default_value = "k2")]
        backend: BackendArg,
    },
    /// Evaluate one query and print its bindings.
    Query {
        #[arg(long)]
        index: PathBuf,
        /// Query text: `subject expr object`.
        #[arg(long)]
        rpq: String,
        /// Seconds before the query is abandoned.
        #[arg(long, env = "SPARSEQ_TIMEOUT", default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
        /// Also print the diagonal pairs a top-level closure adds.
        #[arg(long)]
        emit_identity: bool,
        /// Sort bindings by subject and object name.
        #[arg(long)]
        sort: bool,
        /// Fail unless the index was built with this backend.
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
    },
    /// Print index statistics.
    Stats {
        #[arg(long)]
        index: PathBuf,
        /// CSV instead of key=value lines.
        #[arg(long)]
        csv: bool,
    },
    /// Run a query file and print per-query CSV rows with a summary.
    Bench {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        /// Per-query timeout in seconds.
        #[arg(long, env = "SPARSEQ_TIMEOUT", default_value_t = 60.0)]
        timeout: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Parse(_)) => EXIT_PARSE,
        Some(Error::Timeout) => EXIT_TIMEOUT,
        Some(Error::UnknownNode(_)) | Some(Error::UnknownLabel(_)) => EXIT_UNKNOWN,
        _ => 1,
    }
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).with_context(|| format!("invalid timeout {s}"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build {
            input,
            index,
            backend,
        } => {
            let start = Instant::now();
            let store = GraphStore::load_triples(&input, backend.into())
                .with_context(|| format!("reading {}", input.display()))?;
            store
                .save(&index)
                .with_context(|| format!("writing {}", index.display()))?;
            let stats = store.stats();
            println!("build_seconds={:.3}", start.elapsed().as_secs_f64());
            print!("{}", stats.to_key_values());
        }
        Command::Query {
            index,
            rpq,
            timeout,
            format,
            emit_identity,
            sort,
            backend,
        } => {
            let timeout = seconds(timeout)?;
            let query = parse_query(&rpq).map_err(Error::from)?;
            let store = GraphStore::load(&index, backend.map(Backend::from))
                .with_context(|| format!("loading {}", index.display()))?;
            let start = Instant::now();
            let budget = Budget::until(start + timeout);
            let result = match store.query(&query, PlanOptions::ALL, &budget) {
                Err(Error::UnknownNode(name)) => {
                    return Err(anyhow::Error::new(Error::UnknownNode(name)).context(
                        "constant is not a node of the graph, so the query has no answers",
                    ))
                }
                other => other?,
            };
            let mut pairs = result.pairs.clone();
            if emit_identity {
                pairs.extend(result.identity.iter().map(|&v| (v, v)));
            }
            let mut named: Vec<(&str, &str)> = pairs.iter().map(|&p| store.pair_names(p)).collect();
            if sort {
                named.sort_unstable();
            }
            if start.elapsed() > timeout {
                return Err(Error::Timeout.into());
            }
            let mut out = BufWriter::new(io::stdout().lock());
            match format {
                Format::Count => writeln!(out, "{}", named.len())?,
                Format::Tsv => {
                    for (s, o) in named {
                        writeln!(out, "{s}\t{o}")?;
                    }
                }
            }
            out.flush()?;
        }
        Command::Stats { index, csv } => {
            let store = GraphStore::load(&index, None)
                .with_context(|| format!("loading {}", index.display()))?;
            let stats = store.stats();
            if csv {
                stats.write_csv(io::stdout().lock())?;
            } else {
                print!("{}", stats.to_key_values());
            }
        }
        Command::Bench {
            index,
            queries,
            timeout,
            output,
        } => {
            let timeout = seconds(timeout)?;
            let store = GraphStore::load(&index, None)
                .with_context(|| format!("loading {}", index.display()))?;
            let file =
                File::open(&queries).with_context(|| format!("opening {}", queries.display()))?;
            let list = read_queries(BufReader::new(file))?;
            let report = run_bench(&store, &list, timeout, PlanOptions::ALL);
            match output {
                Some(path) => report.write_csv(File::create(&path)?)?,
                None => report.write_csv(io::stdout().lock())?,
            }
        }
    }
    Ok(())
}
