//! Command-line front end.
//!
//! Exit codes: 0 positive verdict, 2 negative verdict, 3 inconclusive,
//! 1 usage or I/O error. Machine-readable artifacts go to standard output
//! (or `--output`); diagnostics go to standard error. Column and row
//! indices in all output are 1-based.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use crate::completion::{choose_split, validate_on_split, Candidate, ObservedMatrix, Verdict};
use crate::error::{Error, Result};
use crate::experiments::{estimate_rate, format_csv, format_table, recovery_curve};
use crate::graph::BipartiteGraph;
use crate::identify::{ObservationSet, RecoveryStatus};
use crate::linalg::{Matrix, Tolerances};
use crate::pattern::{
    check_identifiability_bruteforce, check_identifiability_fast, classify, find_valid_submatrix,
    split, split_with_origin, theorem2_ell, SamplingPattern, BRUTE_FORCE_LIMIT,
};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "subident",
    version,
    about = "Subspace identifiability from coordinate projections"
)]
struct Cli {
    /// Relative pivot threshold for rank decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_rank: f64,
    /// Relative residual threshold for fitting observed columns.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_fit: f64,
    /// Master seed; drawn from system entropy (and printed) when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the artifact here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check whether a sampling pattern identifies every generic subspace.
    Check(CheckArgs),
    /// Expand columns with more than r + 1 rows into (r + 1)-row columns.
    Split(PatternArgs),
    /// Recover a subspace from an observation file.
    Identify { observations: PathBuf },
    /// Certify a candidate completion against held-out columns.
    Validate(ValidateArgs),
    /// Monte-Carlo success rates for random patterns.
    Simulate(SimulateArgs),
    /// Write the bipartite graph of a pattern as a "row column" edge list.
    GraphExport(PatternArgs),
}

#[derive(Debug, Args)]
struct PatternArgs {
    pattern: PathBuf,
    /// Override the r given in the pattern header.
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckerChoice {
    /// Exhaustive below the column limit, matching above it.
    Auto,
    BruteForce,
    Matching,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    pattern: PatternArgs,
    #[arg(long, value_enum, default_value_t = CheckerChoice::Auto)]
    checker: CheckerChoice,
    /// Also report whether the bipartite graph is r-row-connected.
    #[arg(long)]
    connectivity: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Candidate completion (dense matrix file); its column span is tested.
    #[arg(long)]
    candidate: PathBuf,
    /// Observed data, dense with `*` at unobserved entries.
    #[arg(long)]
    holdout: PathBuf,
    /// Pattern of the observed data; its header also supplies r.
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(long)]
    r: Option<usize>,
    /// 1-based columns of the data forming the validation set (default: all).
    #[arg(long, value_delimiter = ',', conflicts_with = "choose_split")]
    holdout_columns: Option<Vec<usize>>,
    /// Let the tool pick a small validation set from the data.
    #[arg(long)]
    choose_split: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    r: usize,
    /// Target failure probability; sets ell from the sample-size bound.
    #[arg(long, conflicts_with = "ell")]
    eps: Option<f64>,
    /// Rows sampled per column; repeat or comma-separate for a curve.
    #[arg(long, value_delimiter = ',')]
    ell: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Success criterion: pattern-level test or end-to-end recovery.
    #[arg(long, value_enum, default_value_t = SimMode::Pattern)]
    mode: SimMode,
    /// Also write the reports as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SimMode {
    Pattern,
    Recovery,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    output: Option<PathBuf>,
}

impl Io<'_> {
    /// Writes a machine artifact to `--output` or standard output.
    fn artifact(&mut self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => std::fs::write(path, text)?,
            None => self.out.write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn say(&mut self, text: &str) -> Result<()> {
        writeln!(self.out, "{text}")?;
        Ok(())
    }

    fn note(&mut self, text: &str) -> Result<()> {
        writeln!(self.err, "{text}")?;
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, column, msg } => Error::Parse {
            line,
            column,
            msg: format!("{msg} (in {})", path.display()),
        },
        other => other,
    })
}

fn load_pattern(args: &PatternArgs) -> Result<SamplingPattern> {
    let p = with_path(&args.pattern, SamplingPattern::parse(&read(&args.pattern)?))?;
    match args.r {
        Some(r) if r != p.r() => p.with_r(r),
        _ => Ok(p),
    }
}

fn one_based(idx: &[usize]) -> String {
    idx.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_POSITIVE
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io {
        out,
        err,
        output: cli.output.clone(),
    };
    match dispatch(&cli, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cli: &Cli, io: &mut Io<'_>) -> Result<i32> {
    let tol = Tolerances {
        rank_rel: cli.tol_rank,
        fit_rel: cli.tol_fit,
        ..Tolerances::default()
    };
    tol.validate()?;
    match &cli.command {
        Command::Check(args) => check(args, io),
        Command::Split(args) => {
            let p = load_pattern(args)?;
            io.artifact(&split(&p)?.to_text())?;
            Ok(EXIT_POSITIVE)
        }
        Command::Identify { observations } => identify(observations, &tol, io),
        Command::Validate(args) => validate(args, &tol, io),
        Command::Simulate(args) => {
            let seed = match cli.seed {
                Some(s) => s,
                None => {
                    let s = rand::rng().random::<u64>();
                    io.note(&format!("seed {s}"))?;
                    s
                }
            };
            simulate(args, seed, io)
        }
        Command::GraphExport(args) => {
            let p = load_pattern(args)?;
            io.artifact(&BipartiteGraph::build(&p).to_edge_list())?;
            Ok(EXIT_POSITIVE)
        }
    }
}

fn check(args: &CheckArgs, io: &mut Io<'_>) -> Result<i32> {
    let p = load_pattern(&args.pattern)?;
    let flags = classify(&p);
    io.say(&format!(
        "pattern d {} N {} r {} regime a1 {} a2 {} a1_prime {} a1_dprime {}",
        p.d(),
        p.n_cols(),
        p.r(),
        flags.a1,
        flags.a2,
        flags.a1_prime,
        flags.a1_dprime
    ))?;
    if args.connectivity {
        let c = BipartiteGraph::build(&p).is_r_row_connected(p.r())?;
        let sep = match &c.separator {
            Some(rows) if !rows.is_empty() => format!(" separator rows {}", one_based(rows)),
            Some(_) => " separator none (already disconnected)".to_string(),
            None => String::new(),
        };
        io.say(&format!("r_row_connected {}{sep}", c.connected))?;
    }

    let satisfied = if flags.a1 && flags.a2 {
        let use_brute = match args.checker {
            CheckerChoice::Auto => p.n_cols() <= BRUTE_FORCE_LIMIT.min(20),
            CheckerChoice::BruteForce => true,
            CheckerChoice::Matching => false,
        };
        let v = if use_brute {
            check_identifiability_bruteforce(&p)?
        } else {
            check_identifiability_fast(&p)?
        };
        io.say(&format!("checker {}", v.checker.name()))?;
        if let Some(w) = &v.witness {
            let m = p.row_union(w).count_ones();
            io.say(&format!(
                "witness columns {} (m = {m} < n + r = {})",
                one_based(w),
                w.len() + p.r()
            ))?;
        }
        v.satisfied
    } else if flags.a1_dprime {
        // Outside the square regime: look for d − r split columns that
        // satisfy the condition.
        let (s, origin) = split_with_origin(&p)?;
        io.say(&format!(
            "checker split_search (split pattern has {} columns)",
            s.n_cols()
        ))?;
        match find_valid_submatrix(&s)? {
            Some(cols) => {
                io.say(&format!("submatrix split_columns {}", one_based(&cols)))?;
                let mut src: Vec<usize> = cols.iter().map(|&c| origin[c]).collect();
                src.dedup();
                io.say(&format!("submatrix source_columns {}", one_based(&src)))?;
                true
            }
            None => false,
        }
    } else {
        return Err(Error::Regime(format!(
            "every column must sample at least r + 1 = {} rows",
            p.r() + 1
        )));
    };
    io.say(&format!(
        "verdict {}",
        if satisfied { "satisfied" } else { "violated" }
    ))?;
    Ok(if satisfied {
        EXIT_POSITIVE
    } else {
        EXIT_NEGATIVE
    })
}

fn identify(path: &Path, tol: &Tolerances, io: &mut Io<'_>) -> Result<i32> {
    let set = with_path(path, ObservationSet::parse(&read(path)?, tol))?;
    let result = set.recover(tol)?;
    for w in &result.warnings {
        io.note(&format!("warning: {w}"))?;
    }
    match result.status {
        RecoveryStatus::Identified => {
            io.note(&format!("identified kernel_dim {}", result.kernel_dim))?;
            let basis = result
                .subspace
                .expect("identified result carries a subspace");
            io.artifact(&basis.basis().to_text())?;
            Ok(EXIT_POSITIVE)
        }
        RecoveryStatus::Underdetermined => {
            io.say(&format!("underdetermined kernel_dim {}", result.kernel_dim))?;
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn validate(args: &ValidateArgs, tol: &Tolerances, io: &mut Io<'_>) -> Result<i32> {
    let candidate = with_path(&args.candidate, Matrix::parse(&read(&args.candidate)?))?;
    let values = read(&args.holdout)?;
    let (data, pattern_r) = match &args.pattern {
        Some(pp) => {
            let p = with_path(pp, SamplingPattern::parse(&read(pp)?))?;
            (
                with_path(
                    &args.holdout,
                    ObservedMatrix::parse_with_pattern(&values, &p),
                )?,
                Some(p.r()),
            )
        }
        None => (
            with_path(&args.holdout, ObservedMatrix::parse(&values))?,
            None,
        ),
    };
    let r = args.r.or(pattern_r).ok_or_else(|| {
        Error::InvalidArgument("r is required: pass --r or a --pattern file".into())
    })?;

    let holdout: Vec<usize> = if args.choose_split {
        match choose_split(data.masks(), data.d(), r)? {
            Some((_, h)) => h,
            None => {
                io.note("no subset of the data admits a valid validation pattern")?;
                (0..data.n_cols()).collect()
            }
        }
    } else if let Some(cols) = &args.holdout_columns {
        cols.iter()
            .map(|&c| {
                if c == 0 || c > data.n_cols() {
                    Err(Error::InvalidArgument(format!(
                        "holdout column {c} out of range"
                    )))
                } else {
                    Ok(c - 1)
                }
            })
            .collect::<Result<_>>()?
    } else {
        (0..data.n_cols()).collect()
    };

    let cert = validate_on_split(&Candidate::Matrix(candidate), &data, &holdout, r, tol)?;
    io.artifact(&cert.to_text())?;
    Ok(match cert.verdict {
        Verdict::Validated => EXIT_POSITIVE,
        Verdict::Rejected => EXIT_NEGATIVE,
        Verdict::InconclusivePattern => EXIT_INCONCLUSIVE,
    })
}

fn simulate(args: &SimulateArgs, seed: u64, io: &mut Io<'_>) -> Result<i32> {
    let ells = match (args.eps, args.ell.is_empty()) {
        (Some(eps), _) => {
            let b = theorem2_ell(args.d, args.r, eps)?;
            if !b.within_bound_range {
                io.note(&format!(
                    "warning: r = {} exceeds d/6; the bound is outside its stated range",
                    args.r
                ))?;
            }
            if b.uncapped > b.ell {
                io.note(&format!(
                    "note: ell = {} capped at d = {}",
                    b.uncapped, b.ell
                ))?;
            }
            vec![b.ell.max(args.r + 1)]
        }
        (None, false) => args.ell.clone(),
        (None, true) => {
            return Err(Error::InvalidArgument(
                "pass --eps or at least one --ell".into(),
            ));
        }
    };
    let reports = match args.mode {
        SimMode::Recovery => recovery_curve(args.d, args.r, &ells, args.trials, seed)?,
        SimMode::Pattern => {
            let mut sorted = ells.clone();
            sorted.sort_unstable();
            sorted.dedup();
            sorted
                .iter()
                .map(|&ell| estimate_rate(args.d, args.r, ell, args.trials, seed))
                .collect::<Result<Vec<_>>>()?
        }
    };
    io.artifact(&format_table(&reports))?;
    if let Some(path) = &args.csv {
        std::fs::write(path, format_csv(&reports))?;
    }
    Ok(EXIT_POSITIVE)
}
