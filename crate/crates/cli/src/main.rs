//! `edgecolor`: generate streams, run the matcher, sparsifiers and
//! colorers, and drive experiments and verification suites.
//!
//! Exit status: 0 on success, 1 when an invariant is violated or a suite
//! fails, 2 on usage or input errors.

// `!(x > y)` is how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use edgecolor::color::{coloring_csv, run_coloring, ColorError};
use edgecolor::game::{
    adaptive_min_probability, dp_match_probability, exact_match_probability, parse_instance, simulate_game,
    BoundaryAssignment, GameError, ADAPTIVE_CAP, ENUMERATION_CAP,
};
use edgecolor::graph::{emit_stream, generate, parse_stream, GeneratorSpec, GraphKind, OrderMode};
use edgecolor::harness::{
    recurrence_csv, report_csv, report_json, run_experiment, suite_csv, threshold_csv, verify_suite,
    ExperimentConfig, HarnessError, Strategy, Suite, ThresholdRow,
};
use edgecolor::matcher::{min_sampling_parameter, run_matching};
use edgecolor::recurrence::{envelope_report, RecurrenceParams};
use edgecolor::sparsify::{split_stream, subsample_stream, SplitOutcome};
use edgecolor::{EdgeStream, RandomSource};

#[derive(Parser, Debug)]
#[command(name = "edgecolor", version, about = "Online edge coloring experiments")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a graph and arrival order in the stream text format.
    Gen(GenArgs),
    /// Run the online matcher over a stream.
    Match(MatchArgs),
    /// Subsample a stream down to a target degree; emits the kept stream.
    Subsample(SubsampleArgs),
    /// Split a stream into low-degree parts.
    Split(SplitArgs),
    /// Color a stream online.
    Color(ColorArgs),
    /// Iterate the error envelopes of the tree recurrence.
    Recurrence(RecurrenceArgs),
    /// Tabulate the period-2 threshold of the recurrence.
    Threshold(ThresholdArgs),
    /// Evaluate a matching game on a witness tree.
    Game(GameArgs),
    /// Run a multi-trial experiment from a JSON config.
    Experiment(ExperimentArgs),
    /// Run fixed-seed verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    RandomRegular,
    RandomTree,
    CompleteTree,
    Path,
    Star,
    ErdosRenyi,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Degree (random-regular) or branching factor (complete-tree).
    #[arg(long, short)]
    d: Option<usize>,
    /// Degree cap for random trees.
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Shuffle the arrival order uniformly.
    #[arg(long)]
    shuffle: bool,
}

#[derive(Args, Debug)]
struct Input {
    /// Stream file (`-` for stdin).
    #[arg(long, short, default_value = "-")]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct MatchArgs {
    #[command(flatten)]
    input: Input,
    /// Sampling parameter; defaults to `Δ + 2 sqrt(Δ) + 1`.
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Args, Debug)]
struct SubsampleArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    delta_prime: usize,
    /// Emit per-edge outcomes instead of the kept stream.
    #[arg(long)]
    outcomes: bool,
}

#[derive(Args, Debug)]
struct SplitArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    delta_prime: usize,
    /// Emit the stream of one part.
    #[arg(long, conflicts_with = "rejected")]
    part: Option<usize>,
    /// Emit the stream of rejected edges.
    #[arg(long)]
    rejected: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyName {
    Greedy,
    Cascade,
    TreeColoring,
    RandomOrder,
    BlankEps,
}

#[derive(Args, Debug)]
struct ColorArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = StrategyName::Greedy)]
    strategy: StrategyName,
    /// Target degree (cascade rounds, random-order parts).
    #[arg(long)]
    delta_prime: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 4.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    /// Blank probability for blank-eps.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
}

#[derive(Args, Debug)]
struct RecurrenceArgs {
    /// Degree bound Δ.
    #[arg(long, default_value_t = 25)]
    delta: usize,
    /// Sampling parameter; defaults to `1.64 Δ`.
    #[arg(long)]
    c: Option<f64>,
    /// Contraction margin.
    #[arg(long = "margin", default_value_t = 0.05)]
    margin: f64,
    /// Number of levels.
    #[arg(long, short, default_value_t = 41)]
    g: usize,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    /// Sparsified degrees, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![10usize, 32, 100, 1000])]
    delta_prime: Vec<usize>,
    /// Values of `C / Δ′`, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.4, 1.5, 1.58, 1.6, 1.7, 2.0])]
    ratio: Vec<f64>,
}

#[derive(Args, Debug)]
struct GameArgs {
    /// Instance file (`-` for stdin).
    #[arg(long, short, default_value = "-")]
    instance: PathBuf,
    /// Overrides the instance's `C`; default `Δ_T + 2 sqrt(Δ_T) + 1`.
    #[arg(long)]
    c: Option<f64>,
    /// Also play the game this many times with the instance's boundary.
    #[arg(long, default_value_t = 0)]
    runs: u64,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// JSON experiment config.
    #[arg(long, short)]
    config: PathBuf,
    /// Record wall-clock time per trial.
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name, or `all`.
    suite: String,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invariant(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Invariant(_) => 1,
            _ => 2,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        if e.is_invariant() {
            CliError::Invariant(e.to_string())
        } else {
            CliError::usage(e)
        }
    }
}

impl From<ColorError> for CliError {
    fn from(e: ColorError) -> Self {
        match e {
            ColorError::Improper { .. } | ColorError::Reassigned(_) | ColorError::Undecided(_) => {
                CliError::Invariant(e.to_string())
            }
            other => CliError::usage(other),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn read_input(input: &Input) -> Result<EdgeStream, CliError> {
    parse_stream(&read_text(&input.input)?).map_err(CliError::usage)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

fn stream_json(s: &EdgeStream) -> String {
    let edges: Vec<[usize; 2]> = s.arrivals().map(|(_, e)| [e.u, e.v]).collect();
    to_json(&json!({
        "n": s.graph().n(),
        "m": s.graph().m(),
        "delta": s.graph().delta(),
        "edges": edges,
    }))
}

fn emit(s: &EdgeStream, format: Format) -> String {
    match format {
        Format::Csv => emit_stream(s),
        Format::Json => stream_json(s),
    }
}

fn gen(a: &GenArgs, cli: &Cli) -> Result<String, CliError> {
    let need = |x: Option<usize>, flag: &str| x.ok_or_else(|| CliError::Usage(format!("--{flag} is required")));
    let kind = match a.kind {
        Kind::RandomRegular => GraphKind::RandomRegular { d: need(a.d, "d")? },
        Kind::RandomTree => GraphKind::RandomTree {
            max_degree: a.max_degree,
        },
        Kind::CompleteTree => GraphKind::CompleteTree {
            d: need(a.d, "d")?,
            depth: need(a.depth, "depth")?,
        },
        Kind::Path => GraphKind::Path,
        Kind::Star => GraphKind::Star,
        Kind::ErdosRenyi => GraphKind::ErdosRenyi {
            p: a.p.ok_or_else(|| CliError::usage("--p is required"))?,
        },
    };
    let spec = GeneratorSpec {
        kind,
        n: a.n,
        order: if a.shuffle {
            OrderMode::UniformlyRandom
        } else {
            OrderMode::AsGenerated
        },
    };
    let s = generate(&spec, cli.seed).map_err(CliError::usage)?;
    Ok(emit(&s, cli.format))
}

fn run_match(a: &MatchArgs, cli: &Cli) -> Result<String, CliError> {
    let s = read_input(&a.input)?;
    let c = a.c.unwrap_or(min_sampling_parameter(s.graph().delta()) + 1.0);
    let run = run_matching(&s, c, &RandomSource::new(cli.seed), 0).map_err(CliError::usage)?;
    Ok(match cli.format {
        Format::Csv => {
            let mut out = String::from("# schema=1\nedge_index,u,v,threshold,outcome\n");
            for (idx, e) in s.arrivals() {
                out += &format!("{idx},{},{},{},{}\n", e.u, e.v, run.thresholds[idx], run.outcomes[idx].as_str());
            }
            out
        }
        Format::Json => to_json(&json!({
            "c": c,
            "edges": s.len(),
            "matched": run.matched_count(),
            "matching": run.matching,
        })),
    })
}

fn subsample(a: &SubsampleArgs, cli: &Cli) -> Result<String, CliError> {
    let s = read_input(&a.input)?;
    let (outcomes, kept, _) =
        subsample_stream(&s, a.delta_prime, &RandomSource::new(cli.seed), 0).map_err(CliError::usage)?;
    if !a.outcomes {
        return Ok(emit(&kept, cli.format));
    }
    Ok(match cli.format {
        Format::Csv => {
            let mut out = String::from("# schema=1\nedge_index,u,v,outcome\n");
            for (idx, e) in s.arrivals() {
                let o = serde_json::to_value(outcomes[idx]).expect("outcomes serialize");
                out += &format!("{idx},{},{},{}\n", e.u, e.v, o.as_str().unwrap_or_default());
            }
            out
        }
        Format::Json => to_json(&json!({ "kept": kept.len(), "outcomes": outcomes })),
    })
}

fn split(a: &SplitArgs, cli: &Cli) -> Result<String, CliError> {
    let s = read_input(&a.input)?;
    let res = split_stream(&s, a.delta_prime, &RandomSource::new(cli.seed), 0).map_err(CliError::usage)?;
    if let Some(p) = a.part {
        if p >= res.state.parts() {
            return Err(CliError::Usage(format!("part {p} out of range (T = {})", res.state.parts())));
        }
        return Ok(emit(&res.part_stream(&s, p).0, cli.format));
    }
    if a.rejected {
        return Ok(emit(&res.rejected_stream(&s).0, cli.format));
    }
    let part_of = |idx: usize| match res.outcomes[idx] {
        SplitOutcome::Part(p) => p.to_string(),
        SplitOutcome::Rejected => "rejected".to_string(),
    };
    Ok(match cli.format {
        Format::Csv => {
            let mut out = String::from("# schema=1\nedge_index,u,v,mark,part\n");
            for (idx, e) in s.arrivals() {
                out += &format!("{idx},{},{},{},{}\n", e.u, e.v, res.marked[idx], part_of(idx));
            }
            out
        }
        Format::Json => to_json(&json!({
            "parts": res.state.parts(),
            "slack": res.state.slack(),
            "rejected": res.outcomes.iter().filter(|o| **o == SplitOutcome::Rejected).count(),
            "marked": res.marked,
        })),
    })
}

fn color(a: &ColorArgs, cli: &Cli) -> Result<String, CliError> {
    let s = read_input(&a.input)?;
    let g = s.graph();
    let strategy = match a.strategy {
        StrategyName::Greedy => Strategy::Greedy,
        StrategyName::Cascade => Strategy::Cascade {
            alpha: a.alpha,
            beta: a.beta,
            delta_prime: a.delta_prime.unwrap_or(32),
            margin: a.margin,
        },
        StrategyName::TreeColoring => Strategy::TreeColoring,
        StrategyName::RandomOrder => Strategy::RandomOrderPipeline {
            delta_prime: a.delta_prime,
        },
        StrategyName::BlankEps => Strategy::BlankEps { eps: a.eps },
    };
    let mut colorer = strategy.colorer(g.n(), g.delta())?.expect("coloring strategy");
    let state = run_coloring(&s, colorer.as_mut(), &RandomSource::new(cli.seed))?;
    edgecolor::color::check_proper(g, &state)?;
    Ok(match cli.format {
        Format::Csv => coloring_csv(&s, &state),
        Format::Json => {
            let colors: Vec<Option<usize>> = (0..g.m()).map(|i| state.color(i)).collect();
            to_json(&json!({
                "strategy": strategy.name(),
                "summary": state.summary(),
                "colors": colors,
            }))
        }
    })
}

fn recurrence(a: &RecurrenceArgs, cli: &Cli) -> Result<String, CliError> {
    let c = a.c.unwrap_or(1.64 * a.delta as f64);
    let params = RecurrenceParams::new(c, a.delta, a.margin).map_err(CliError::usage)?;
    let rows = envelope_report(&params, a.g).map_err(CliError::usage)?;
    Ok(match cli.format {
        Format::Csv => recurrence_csv(&rows),
        Format::Json => to_json(&json!({ "params": params, "rows": rows })),
    })
}

fn threshold(a: &ThresholdArgs, cli: &Cli) -> Result<String, CliError> {
    let mut rows = Vec::new();
    for &dp in &a.delta_prime {
        for &r in &a.ratio {
            if !(r > 1.0) || dp == 0 {
                return Err(CliError::Usage(format!("need Δ′ >= 1 and C/Δ′ > 1, got {dp} and {r}")));
            }
            rows.push(ThresholdRow::new(dp, r * dp as f64));
        }
    }
    Ok(match cli.format {
        Format::Csv => threshold_csv(&rows),
        Format::Json => to_json(&rows),
    })
}

/// `None` when the tree is beyond an oracle's size cap.
fn capped(r: Result<f64, GameError>) -> Result<Option<f64>, CliError> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(GameError::TooLarge { .. }) => Ok(None),
        Err(e) => Err(CliError::usage(e)),
    }
}

fn game(a: &GameArgs, cli: &Cli) -> Result<String, CliError> {
    let inst = parse_instance(&read_text(&a.instance)?).map_err(CliError::usage)?;
    let t = &inst.tree;
    let d = t.max_degree();
    let c = a.c.or(inst.c).unwrap_or(min_sampling_parameter(d) + 1.0);
    let usage = CliError::usage;
    let mut value = json!({
        "c": c,
        "edges": t.edge_count(),
        "boundary": t.boundary_edges().len(),
        "enumeration": capped(exact_match_probability(t, &inst.assignment, c))?,
        "dp": dp_match_probability(t, &inst.assignment, c).map_err(usage)?,
        "adaptive_min": capped(adaptive_min_probability(t, c))?,
        "all_unmatched": dp_match_probability(t, &BoundaryAssignment::AllUnmatched, c).map_err(usage)?,
        "all_matched": dp_match_probability(t, &BoundaryAssignment::AllMatched, c).map_err(usage)?,
        "enumeration_cap": ENUMERATION_CAP,
        "adaptive_cap": ADAPTIVE_CAP,
    });
    if a.runs > 0 {
        let hits = simulate_game(t, &inst.assignment, c, a.runs, &RandomSource::new(cli.seed)).map_err(usage)?;
        value["monte_carlo"] = json!({ "runs": a.runs, "hits": hits, "estimate": hits as f64 / a.runs as f64 });
    }
    // The JSON object is the interface; --format only matters elsewhere.
    Ok(to_json(&value))
}

fn experiment(a: &ExperimentArgs, cli: &Cli) -> Result<String, CliError> {
    let mut cfg: ExperimentConfig = serde_json::from_str(&read_text(&a.config)?).map_err(CliError::usage)?;
    cfg.timing |= a.timing;
    let report = run_experiment(&cfg)?;
    Ok(match cli.format {
        Format::Csv => report_csv(&report),
        Format::Json => report_json(&report) + "\n",
    })
}

fn verify(a: &VerifyArgs, cli: &Cli) -> Result<(String, bool), CliError> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse::<Suite>()?]
    };
    let reports = suites
        .into_iter()
        .map(|s| verify_suite(s, cli.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let ok = reports.iter().all(|r| r.passed());
    let text = match cli.format {
        Format::Csv => suite_csv(&reports),
        Format::Json => to_json(&reports),
    };
    Ok((text, ok))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let (text, ok) = match &cli.command {
        Command::Gen(a) => (gen(a, cli)?, true),
        Command::Match(a) => (run_match(a, cli)?, true),
        Command::Subsample(a) => (subsample(a, cli)?, true),
        Command::Split(a) => (split(a, cli)?, true),
        Command::Color(a) => (color(a, cli)?, true),
        Command::Recurrence(a) => (recurrence(a, cli)?, true),
        Command::Threshold(a) => (threshold(a, cli)?, true),
        Command::Game(a) => (game(a, cli)?, true),
        Command::Experiment(a) => (experiment(a, cli)?, true),
        Command::Verify(a) => verify(a, cli)?,
    };
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            let mut out = io::stdout().lock();
            // A closed pipe is not an error worth reporting.
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("edgecolor: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("edgecolor: {e}");
            ExitCode::from(e.code())
        }
    }
}
