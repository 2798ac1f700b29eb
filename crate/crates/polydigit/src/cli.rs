//! Command-line front end. All numeric inputs are decimal strings of
//! arbitrary size; ε is an exact rational ("1/2" or "1"). Human-readable
//! tables go to stdout by default, `--json` switches to JSON lines and
//! `--csv` to CSV; progress goes to stderr. Exit codes: 0 success, 1 bad
//! input, 2 failed verification.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::bounds;
use crate::digitsum::{digit_length, digit_sum, Base};
use crate::error::{Error, Result};
use crate::intpoly::StudyPolynomial;
use crate::search::{self, ScanOptions, ScanRange};
use crate::verify;
use crate::witness::{self, parse_ratio, RecordJson};

#[derive(Parser)]
#[command(
    name = "polydigit",
    version,
    about = "Exact base-q digit sums of polynomial values: identities, witnesses, bounds, search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sum of the base-q digits of n
    Digitsum {
        /// Nonnegative integer, decimal
        n: String,
        #[arg(long)]
        base: u64,
    },
    /// Exact ratio certificate s_q(p(n)) / s_q(n) at one point
    Ratio {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        base: u64,
        #[arg(long)]
        n: String,
        #[arg(long)]
        json: bool,
    },
    /// Construct a witness with ratio below epsilon
    Witness {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        base: u64,
        /// Target ratio, exact rational (e.g. 1 or 1/2)
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        json: bool,
    },
    /// Family of witnesses indexed by i-digit multipliers
    Density {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        base: u64,
        #[arg(long)]
        epsilon: String,
        /// Base-q digit count of the multiplier index
        #[arg(long)]
        digits: u64,
        /// Stream every family member as a JSON line
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive scans
    #[command(subcommand)]
    Search(SearchCommand),
    /// Growth bounds and their certificates
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// Run the whole verification suite
    VerifyPaper {
        /// Include the exhaustive scan to 2^40 (hours)
        #[arg(long)]
        long: bool,
        /// Checkpoint file for the long scan
        #[arg(long)]
        resume: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SearchCommon {
    #[arg(long)]
    poly: String,
    #[arg(long)]
    base: u64,
    /// Worker threads (defaults to all cores, or RAYON_NUM_THREADS)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum SearchCommand {
    /// Running-minimum ratio records over [1, limit)
    Records {
        #[command(flatten)]
        common: SearchCommon,
        #[arg(long)]
        limit: String,
        /// Checkpoint file to write and resume from
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Smallest n below the limit with ratio < epsilon
    FirstBelow {
        #[command(flatten)]
        common: SearchCommon,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        limit: String,
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Count n below the limit with ratio < epsilon
    Count {
        #[command(flatten)]
        common: SearchCommon,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        limit: String,
        /// Emit the per-power counting table as CSV
        #[arg(long)]
        csv: bool,
    },
    /// Digit-sum sums for n and n^h below the limit
    Average {
        #[arg(long)]
        base: u64,
        #[arg(long)]
        limit: String,
        /// The power h
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Upper bounds on s_q(p(n)) and on the ratio at one point
    Upper {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        base: u64,
        #[arg(long)]
        n: String,
    },
    /// Distinct-sum-set witness forcing a large ratio
    LowerWitness {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        base: u64,
        /// Number of blocks (the digit sum of the witness)
        #[arg(long)]
        size: usize,
        #[arg(long)]
        json: bool,
    },
    /// Growth bound at n = q^k for polynomials with a negative coefficient
    Negative {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        base: u64,
        #[arg(long)]
        k: u64,
    },
    /// Greedy B_h set, printed as a JSON array
    Bhset {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 1)]
        modulus: u64,
    },
}

fn parse_biguint(s: &str, what: &str) -> Result<BigUint> {
    s.trim()
        .parse::<BigUint>()
        .map_err(|_| Error::Parse(format!("{what} must be a decimal integer, got {s:?}")))
}

fn parse_study(s: &str) -> Result<StudyPolynomial> {
    s.parse()
}

fn with_threads<T>(threads: Option<usize>, body: impl FnOnce() -> Result<T> + Send) -> Result<T>
where
    T: Send,
{
    match threads {
        None => body(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Domain(format!("cannot build thread pool: {e}")))?
            .install(body),
    }
}

fn print_record(
    out: &mut dyn Write,
    json: bool,
    record: &witness::RatioRecord,
    q: Base,
    poly: &StudyPolynomial,
    params: Option<&witness::WitnessParams>,
) -> Result<()> {
    if json {
        let line = RecordJson::from_record(record, q, poly, params)?;
        writeln!(out, "{}", serde_json::to_string(&line)?)?;
    } else {
        writeln!(out, "{record}")?;
    }
    Ok(())
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Digitsum { n, base } => {
            let q = Base::new(base)?;
            let n = parse_biguint(&n, "n")?;
            writeln!(out, "{}", digit_sum(&n, q))?;
        }
        Command::Ratio { poly, base, n, json } => {
            let q = Base::new(base)?;
            let p = parse_study(&poly)?;
            let n = parse_biguint(&n, "n")?;
            let record = search::ratio_record(&p, q, &n)?;
            print_record(out, json, &record, q, &p, None)?;
        }
        Command::Witness {
            poly,
            base,
            epsilon,
            json,
        } => {
            let q = Base::new(base)?;
            let p = parse_study(&poly)?;
            let eps = parse_ratio(&epsilon)?;
            let params = witness::choose_parameters(&p, q, &eps)?.tightened()?;
            let record = witness::build_witness(&params)?;
            if !json {
                writeln!(
                    out,
                    "p = {p}, q = {q}, epsilon = {eps}: b = {}, m = {}, k = {}",
                    params.shift(),
                    params.multiplier(),
                    params.exponent()
                )?;
                writeln!(
                    out,
                    "bounds: B = {}, log2(C) ~ {:.1}",
                    params.bound_factor(),
                    params.bound_base().bits()
                )?;
            }
            print_record(out, json, &record, q, &p, Some(&params))?;
        }
        Command::Density {
            poly,
            base,
            epsilon,
            digits,
            json,
        } => {
            let q = Base::new(base)?;
            let p = parse_study(&poly)?;
            let eps = parse_ratio(&epsilon)?;
            let family = witness::density_family(&p, q, &eps, digits)?;
            writeln!(
                out,
                "family: {} members, k0 = {} (closed form {}), alpha = {}, shift = {}",
                family.count(),
                family.k0,
                family.k0_closed_form,
                family.alpha,
                family.shift
            )?;
            let floor_ok = family.family_size_bound_holds()?;
            writeln!(
                out,
                "size vs N^alpha floor (N = q^{}): {}",
                4 * family.k0 + family.digits,
                if floor_ok {
                    "holds"
                } else {
                    "not yet reached at this digit count"
                }
            )?;
            if json {
                for record in &family.records {
                    let line = RecordJson::from_record(record, q, &p, None)?;
                    writeln!(out, "{}", serde_json::to_string(&line)?)?;
                }
            }
        }
        Command::Search(cmd) => execute_search(cmd, out)?,
        Command::Bounds(cmd) => execute_bounds(cmd, out)?,
        Command::VerifyPaper { long, resume } => {
            let mut failures = 0usize;
            let reports = if long && resume.is_some() {
                // Run the standard battery, then the resumable long scan.
                let mut reports = verify::run_all(false);
                let start = std::time::Instant::now();
                reports.push(verify::CriterionReport {
                    id: "10-long",
                    name: "record search (exhaustive to 2^40)",
                    outcome: verify::record_search_long(resume),
                    seconds: start.elapsed().as_secs_f64(),
                });
                reports
            } else {
                verify::run_all(long)
            };
            for report in &reports {
                let (status, detail) = match &report.outcome {
                    Ok(detail) => ("PASS", detail.clone()),
                    Err(reason) => {
                        failures += 1;
                        ("FAIL", reason.clone())
                    }
                };
                writeln!(
                    out,
                    "[{:>7}] {:<42} {} ({:.2}s) {}",
                    report.id, report.name, status, report.seconds, detail
                )?;
            }
            if failures > 0 {
                return Err(Error::Validation(format!("{failures} criteria failed")));
            }
            writeln!(out, "all {} criteria passed", reports.len())?;
        }
    }
    Ok(())
}

fn execute_search(cmd: SearchCommand, out: &mut dyn Write) -> Result<()> {
    match cmd {
        SearchCommand::Records {
            common,
            limit,
            resume,
            json,
        } => {
            let q = Base::new(common.base)?;
            let p = parse_study(&common.poly)?;
            let limit = parse_biguint(&limit, "limit")?;
            let range = ScanRange::new(BigUint::from(1u32), limit)?;
            let opts = ScanOptions {
                checkpoint: resume,
                progress: true,
                ..ScanOptions::default()
            };
            let table = with_threads(common.threads, || search::scan_records(&p, q, &range, &opts))?;
            for record in table.records() {
                print_record(out, json, record, q, &p, None)?;
            }
        }
        SearchCommand::FirstBelow {
            common,
            epsilon,
            limit,
            resume,
        } => {
            let q = Base::new(common.base)?;
            let p = parse_study(&common.poly)?;
            let eps = parse_ratio(&epsilon)?;
            let limit = parse_biguint(&limit, "limit")?;
            let opts = ScanOptions {
                checkpoint: resume,
                progress: true,
                ..ScanOptions::default()
            };
            let hit =
                with_threads(common.threads, || search::find_first_below(&p, q, &eps, &limit, &opts))?;
            match hit {
                Some(n) => writeln!(out, "{n}")?,
                None => writeln!(out, "none")?,
            }
        }
        SearchCommand::Count {
            common,
            epsilon,
            limit,
            csv,
        } => {
            let q = Base::new(common.base)?;
            let p = parse_study(&common.poly)?;
            let eps = parse_ratio(&epsilon)?;
            let limit = parse_biguint(&limit, "limit")?;
            if csv {
                let rows =
                    with_threads(common.threads, || search::count_table(&p, q, &eps, &limit))?;
                writeln!(out, "N,count,alpha_bound")?;
                for row in rows {
                    writeln!(out, "{},{},{:.6}", row.threshold, row.count, row.alpha_bound)?;
                }
            } else {
                let count = with_threads(common.threads, || search::count_below(&p, q, &eps, &limit))?;
                writeln!(out, "{count}")?;
            }
        }
        SearchCommand::Average {
            base,
            limit,
            degree,
            csv,
            threads,
        } => {
            let q = Base::new(base)?;
            let limit = parse_biguint(&limit, "limit")?;
            let (plain, powered) =
                with_threads(threads, || search::average_digit_sum(q, &limit, degree))?;
            let ratio = powered.to_f64().unwrap_or(f64::NAN) / plain.to_f64().unwrap_or(f64::NAN);
            if csv {
                writeln!(out, "N,sum_s,sum_s_pow,ratio")?;
                writeln!(out, "{limit},{plain},{powered},{ratio:.6}")?;
            } else {
                writeln!(
                    out,
                    "sum s_q(n) = {plain}, sum s_q(n^{degree}) = {powered}, ratio {ratio:.4}"
                )?;
            }
        }
    }
    Ok(())
}

fn execute_bounds(cmd: BoundsCommand, out: &mut dyn Write) -> Result<()> {
    match cmd {
        BoundsCommand::Upper { poly, base, n } => {
            let q = Base::new(base)?;
            let p = parse_study(&poly)?;
            let n = parse_biguint(&n, "n")?;
            let cap = bounds::poly_digit_sum_upper(&p, &n, q)?;
            let record = search::ratio_record(&p, q, &n)?;
            writeln!(out, "s_q(p(n)) = {} <= cap {}", record.spn(), cap)?;
            let bound = bounds::ratio_upper_bound(&p, &n, q)?;
            writeln!(
                out,
                "ratio = {}/{} <= c1·L/floor(L^(1/h)) = {} (L = {} digits, c1 = {})",
                record.spn(),
                record.sn(),
                bound,
                digit_length(&n, q),
                bounds::ratio_upper_constant(&p, q)
            )?;
        }
        BoundsCommand::LowerWitness {
            poly,
            base,
            size,
            json,
        } => {
            let q = Base::new(base)?;
            let p = parse_study(&poly)?;
            let w = bounds::lower_bound_witness(&p, q, size)?;
            writeln!(
                out,
                "bh set (modulus {}): {}",
                w.bh.modulus(),
                serde_json::to_string(w.bh.elements())?
            )?;
            writeln!(
                out,
                "s_q(n) = {} (= set size), s_q(p(n)) = {} >= {} blocks, ratio >= {}",
                w.record.sn(),
                w.record.spn(),
                w.block_count,
                w.ratio_floor()
            )?;
            print_record(out, json, &w.record, q, &p, None)?;
        }
        BoundsCommand::Negative { poly, base, k } => {
            let q = Base::new(base)?;
            let p = parse_study(&poly)?;
            let bound = bounds::negative_coeff_lower_bound(&p, q, k)?;
            let n = q.power(k);
            let record = search::ratio_record(&p, q, &n)?;
            writeln!(
                out,
                "s_q(p(q^{k})) = {} >= bound {} (s_q(q^{k}) = 1, so the ratio is at least {bound})",
                record.spn(),
                bound
            )?;
        }
        BoundsCommand::Bhset {
            size,
            degree,
            modulus,
        } => {
            let set = bounds::greedy_bh_set(size, degree, modulus)?;
            writeln!(out, "{}", serde_json::to_string(set.elements())?)?;
        }
    }
    Ok(())
}

/// Parse and run; returns the process exit code. Parse failures print usage
/// and exit 1; domain errors exit 1; verification failures exit 2.
pub fn run_from<I>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders --help/--version through the error path too.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

/// Entry point for the binary.
pub fn main_entry() -> i32 {
    let mut stdout = std::io::stdout();
    run_from(std::env::args(), &mut stdout)
}
