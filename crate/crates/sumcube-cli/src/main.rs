//! Command-line surface for the additive-cube avoidance pipeline.
//!
//! Exit codes: 0 success (for `prove`: every expected quantity reproduced
//! and no target hit), 1 proof-pipeline mismatch, 2 precision failure,
//! 3 usage error.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use sumcube::bounds::BoundData;
use sumcube::certificate::{
    filter_name, ConstantsDoc, ProveCertificate, VectorsDoc,
};
use sumcube::graph::{BfsOptions, BfsOutcome, CubeGraph, UniverseFilter};
use sumcube::oracle;
use sumcube::{two_sided_window, Error, FixedPoint};

/// Expected quantities of the canonical run; `prove` fails when any is
/// not reproduced.
const EXPECTED_D9: usize = 301;
const EXPECTED_U: usize = 503;
const EXPECTED_STARTS: usize = 9;
const EXPECTED_REACHABLE: usize = 135_572;

#[derive(Parser)]
#[command(
    name = "sumcube",
    about = "Verify that the fixed point of 0->03, 1->43, 3->1, 4->01 avoids additive cubes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a prefix of the fixed point (or a window of the two-sided word).
    Generate {
        /// Number of letters (per side with --two-sided).
        n: usize,
        /// Center a 2n-letter window on the seam of the two-sided word.
        #[arg(long)]
        two_sided: bool,
    },
    /// Compute and export every certified constant.
    Constants {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Export the length-9 walk-vector set.
    D9 {
        /// Walk length.
        #[arg(long, default_value_t = 9)]
        ell: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Export the bounded difference-vector set.
    Uset {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the full pipeline and certify the reachability result.
    Prove {
        #[command(flatten)]
        output: OutputArgs,
        /// Worker threads (1 = sequential reference mode).
        #[arg(long)]
        threads: Option<usize>,
        /// Also require u+v inside the set when expanding the search.
        #[arg(long)]
        sum_filter: bool,
    },
    /// Check a word for additive k-th powers.
    Check {
        /// File with the word (digit string or comma-separated); stdin if absent.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Power order.
        #[arg(long, short, default_value_t = 3)]
        k: usize,
    },
    /// Search for long additive-power-free words by backtracking.
    Search {
        /// Alphabet, e.g. "0,1,2".
        alphabet: String,
        /// Power order.
        #[arg(long, short, default_value_t = 3)]
        k: usize,
        /// Wall-clock budget in seconds.
        #[arg(long, default_value_t = 60)]
        budget: u64,
        /// Stop once a word of this length is found.
        #[arg(long, default_value_t = 1288)]
        max_len: usize,
        /// Exhaust the whole tree and report the exact maximum length.
        #[arg(long)]
        exhaustive: bool,
        /// Depth guard for --exhaustive.
        #[arg(long, default_value_t = 10_000)]
        ceiling: usize,
    },
    /// Cross-check the search result against every equal-length triple of a prefix.
    Crosscheck {
        /// Prefix length to scan.
        #[arg(long, default_value_t = 2000)]
        n: usize,
        /// Worker threads for the reachability run.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Undecided { .. }
        | Error::DivisorContainsZero
        | Error::NegativeSqrt { .. }
        | Error::PrecisionExceeded { .. }
        | Error::NoBracket { .. }
        | Error::NoContraction { .. }
        | Error::UndecidedMembership { .. }
        | Error::BoundNotRelaxed { .. } => 2,
        Error::StartOutsideUniverse(_) | Error::UnreachableTemplate(_) => 1,
        _ => 3,
    }
}

fn emit(output: &OutputArgs, text: String) -> Result<(), Error> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::WordParse(e.to_string()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Generate { n, two_sided } => {
            if n == 0 {
                eprintln!("error: n must be at least 1");
                return Ok(ExitCode::from(3));
            }
            if two_sided {
                println!("{}", two_sided_window(n).seam_string());
            } else {
                println!("{}", FixedPoint::new().prefix(n));
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Constants { output } => {
            let bounds = compute_bounds(None)?;
            let doc = ConstantsDoc::from_bound_data(&bounds);
            let text = match output.format {
                Format::Json | Format::Csv => to_json(&doc),
                Format::Text => constants_text(&doc),
            };
            emit(&output, text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::D9 { ell, output } => {
            let set = sumcube::bounds::enumerate_walk_vectors(ell);
            let text = match output.format {
                Format::Csv | Format::Text => {
                    let mut buf = Vec::new();
                    sumcube::certificate::write_vectors_csv(&mut buf, &[], &set.vectors)
                        .expect("in-memory write");
                    String::from_utf8(buf).expect("utf8")
                }
                Format::Json => to_json(&VectorsDoc::new(
                    &format!("walk-vectors-{ell}"),
                    &[],
                    &set.vectors,
                )),
            };
            emit(&output, text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Uset { output } => {
            let bounds = compute_bounds(None)?;
            let u = &bounds.uset;
            let constants = [
                ("c1", &u.c[0]),
                ("c2", &u.c[1]),
                ("c3", &u.c[2]),
                ("c4", &u.c[3]),
                ("normBudget", &u.budget),
            ];
            let text = match output.format {
                Format::Csv | Format::Text => {
                    let mut buf = Vec::new();
                    sumcube::certificate::write_vectors_csv(&mut buf, &constants, &u.members)
                        .expect("in-memory write");
                    String::from_utf8(buf).expect("utf8")
                }
                Format::Json => to_json(&VectorsDoc::new("u-set", &constants, &u.members)),
            };
            emit(&output, text)?;
            eprintln!("count: {}", u.len());
            eprintln!("hash: {}", u.hash_hex());
            Ok(ExitCode::SUCCESS)
        }

        Command::Prove {
            output,
            threads,
            sum_filter,
        } => {
            let started = Instant::now();
            let filter = if sum_filter {
                UniverseFilter::PairAndSumInSet
            } else {
                UniverseFilter::PairInSet
            };
            let bounds = compute_bounds(threads)?;
            let graph = CubeGraph::new(bounds.uset.clone());
            let mut fp = FixedPoint::new();
            let starts = graph.start_set(&mut fp)?;
            let outcome = run_bfs(&graph, &starts, filter, threads)?;
            let cert = ProveCertificate::new(
                &bounds,
                &starts,
                &outcome.report,
                filter,
                threads.unwrap_or(0),
                started.elapsed().as_secs_f64(),
            );
            emit(&output, to_json(&cert))?;

            let mut failures = Vec::new();
            if bounds.d9.len() != EXPECTED_D9 {
                failures.push(format!("d9Count {} != {EXPECTED_D9}", bounds.d9.len()));
            }
            if bounds.uset.len() != EXPECTED_U {
                failures.push(format!("uCount {} != {EXPECTED_U}", bounds.uset.len()));
            }
            if starts.len() != EXPECTED_STARTS {
                failures.push(format!("startCount {} != {EXPECTED_STARTS}", starts.len()));
            }
            if !sum_filter && outcome.report.reachable_count != EXPECTED_REACHABLE {
                failures.push(format!(
                    "reachableCount {} != {EXPECTED_REACHABLE}",
                    outcome.report.reachable_count
                ));
            }
            if !outcome.report.target_hits.is_empty() {
                failures.push(format!(
                    "targetHits not empty ({})",
                    outcome.report.target_hits.len()
                ));
            }
            if let Some(first) = failures.first() {
                eprintln!("proof pipeline mismatch: {first}");
                return Ok(ExitCode::FAILURE);
            }
            eprintln!(
                "proof holds: reachable {} vertices under filter {}, no additive-cube template",
                outcome.report.reachable_count,
                filter_name(filter)
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Check { file, k } => {
            if k < 2 {
                eprintln!("error: k must be at least 2");
                return Ok(ExitCode::from(3));
            }
            let text = match file {
                Some(path) => {
                    fs::read_to_string(path).map_err(|e| Error::WordParse(e.to_string()))?
                }
                None => {
                    let mut buf = String::new();
                    std::io::stdin()
                        .read_to_string(&mut buf)
                        .map_err(|e| Error::WordParse(e.to_string()))?;
                    buf
                }
            };
            let word = oracle::parse_word(&text)?;
            match oracle::find_additive_power(&word, k) {
                Some(w) => println!(
                    "witness: start {} blockLen {} order {}",
                    w.start, w.block_len, w.order
                ),
                None => println!("none"),
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Search {
            alphabet,
            k,
            budget,
            max_len,
            exhaustive,
            ceiling,
        } => {
            if k < 2 || budget == 0 {
                eprintln!("error: need k >= 2 and budget > 0");
                return Ok(ExitCode::from(3));
            }
            let alpha = oracle::IntAlphabet::parse(&alphabet)?;
            if exhaustive {
                let r = oracle::exhaustive_max_length(&alpha, k, ceiling)?;
                println!(
                    "maxLen {} attained by {} words ({} nodes)",
                    r.max_len, r.witness_count, r.nodes
                );
            } else {
                let r = oracle::dfs_longest(&alpha, k, max_len, Duration::from_secs(budget));
                let valid = oracle::find_additive_power(&r.word, k).is_none();
                println!("{}", oracle::format_word(&r.word));
                println!(
                    "length {} ({}, {} nodes, {:.1}s), oracle revalidation: {}",
                    r.word.len(),
                    if r.reached_max_len {
                        "reached max-len"
                    } else if r.budget_exhausted {
                        "budget exhausted"
                    } else {
                        "tree exhausted"
                    },
                    r.nodes,
                    r.elapsed.as_secs_f64(),
                    if valid { "pass" } else { "FAIL" }
                );
                if !valid {
                    return Ok(ExitCode::FAILURE);
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Crosscheck { n, threads } => {
            if n < 4 {
                eprintln!("error: n must be at least 4");
                return Ok(ExitCode::from(3));
            }
            let bounds = compute_bounds(threads)?;
            let graph = CubeGraph::new(bounds.uset.clone());
            let mut fp = FixedPoint::new();
            let starts = graph.start_set(&mut fp)?;
            let outcome = run_bfs(&graph, &starts, UniverseFilter::PairInSet, threads)?;
            let clean = graph.cross_check_prefix(&mut fp, &outcome, n)?;
            if clean {
                println!("prefix of length {n}: every in-universe triple template reached, no additive cube");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("prefix of length {n}: additive cube found");
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn constants_text(doc: &ConstantsDoc) -> String {
    let mut s = String::new();
    for (i, l) in doc.lambda.iter().enumerate() {
        s.push_str(&format!(
            "lambda{} = {} + {}i (rad {}, {})\n",
            i + 1,
            l.re.mid,
            l.im.mid,
            l.re.rad,
            l.im.rad
        ));
    }
    for (name, b) in [
        ("c1", &doc.c1),
        ("c2", &doc.c2),
        ("c3", &doc.c3),
        ("c4", &doc.c4),
        ("alpha", &doc.alpha),
        ("beta", &doc.beta),
        ("muMin", &doc.mu_min),
        ("pairMax", &doc.pair_max),
        ("tail", &doc.tail),
        ("normBudget", &doc.norm_budget),
    ] {
        s.push_str(&format!("{name} = {} (rad {})\n", b.mid, b.rad));
    }
    s.push_str(&format!("normBudgetFloor = {}\n", doc.norm_budget_floor));
    s.push_str(&format!("d9Count = {}\n", doc.d9_count));
    s.push_str(&format!("uCount = {}\n", doc.u_count));
    s.push_str(&format!("uSetHash = {}\n", doc.u_set_hash));
    s
}

#[cfg(feature = "parallel")]
fn compute_bounds(threads: Option<usize>) -> Result<BoundData, Error> {
    match threads {
        Some(1) => BoundData::compute(),
        Some(n) => in_pool(n, BoundData::compute_parallel),
        None => BoundData::compute_parallel(),
    }
}

#[cfg(not(feature = "parallel"))]
fn compute_bounds(_threads: Option<usize>) -> Result<BoundData, Error> {
    BoundData::compute()
}

#[cfg(feature = "parallel")]
fn run_bfs(
    graph: &CubeGraph,
    starts: &[sumcube::graph::TemplateVertex],
    filter: UniverseFilter,
    threads: Option<usize>,
) -> Result<BfsOutcome, Error> {
    match threads {
        Some(1) => graph.bfs(
            starts,
            BfsOptions {
                filter,
                reversed_successor_order: false,
            },
        ),
        Some(n) => in_pool(n, || graph.bfs_parallel(starts, filter)),
        None => graph.bfs_parallel(starts, filter),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_bfs(
    graph: &CubeGraph,
    starts: &[sumcube::graph::TemplateVertex],
    filter: UniverseFilter,
    _threads: Option<usize>,
) -> Result<BfsOutcome, Error> {
    graph.bfs(
        starts,
        BfsOptions {
            filter,
            reversed_successor_order: false,
        },
    )
}

#[cfg(feature = "parallel")]
fn in_pool<T>(threads: usize, f: impl FnOnce() -> Result<T, Error> + Send) -> Result<T, Error>
where
    T: Send,
{
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(f)
}

#[cfg(all(test, feature = "parallel"))]
mod tests {
    // Used by clap to verify the argument definitions are coherent.
    #[test]
    fn cli_definition_is_valid() {
        use clap::CommandFactory;
        super::Cli::command().debug_assert();
    }
}
