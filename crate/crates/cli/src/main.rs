//! `ltlbit` command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ltlbit::bench::{compression_report, run_bench, write_csv, BenchConfig};
use ltlbit::bitmap::{Backend, Bitmap};
use ltlbit::eval::eval;
use ltlbit::ltl::{corpus, parse, Formula};
use ltlbit::trace::{
    build_ground_bitmaps, generate_random_trace, load_trace_with, slice, write_trace, Format,
    LoadOptions, Trace, TraceGenSpec, PRNG_ID,
};
use ltlbit::with_backend;

#[derive(Parser, Debug)]
#[command(
    name = "ltlbit",
    version,
    about = "Offline LTL evaluation over per-variable bitmaps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one formula against a trace file.
    ///
    /// Exit status: 0 if the trace satisfies the formula, 1 if not, 2 on
    /// usage, input or parse errors.
    Check(CheckArgs),
    /// Measure throughput and peak bitmap memory on generated traces; CSV on stdout.
    Bench(BenchArgs),
    /// Report ground bitmap payload per backend relative to raw; CSV on stdout.
    CompressReport(CompressArgs),
    /// Write a generated random trace.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct FormulaArgs {
    /// Formula text, e.g. "G (p -> F q)".
    #[arg(long, conflicts_with = "formula_id")]
    formula: Option<String>,

    /// Built-in corpus formula, e.g. A7 or D19.
    #[arg(long)]
    formula_id: Option<String>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    formula: FormulaArgs,

    #[arg(long)]
    trace: PathBuf,

    #[arg(long, default_value = "csv")]
    format: Format,

    #[arg(long, default_value = "raw")]
    backend: Backend,

    /// Also print the satisfaction bitmap, position 0 first.
    #[arg(long)]
    positions: bool,

    /// Check the formula separately on each slice of the trace, keyed by
    /// this CSV column or by one-hot variables KEY0, KEY1, ... The trace
    /// satisfies the formula when every slice does.
    #[arg(long, value_name = "KEY")]
    slice: Option<String>,
}

#[derive(Args, Debug)]
struct GenSpecArgs {
    /// Variables per event, named s0, s1, ...
    #[arg(long, default_value_t = 10)]
    vars: usize,

    /// Emit each random tuple this many times in a row.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    repeat: u64,

    #[arg(long, env = "LTLBIT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Corpus formulas to measure (default: the whole corpus).
    #[arg(long = "formula-id", value_delimiter = ',')]
    formula_ids: Vec<String>,

    /// Extra formulas given as text, labelled F1, F2, ...
    #[arg(long = "formula")]
    formulas: Vec<String>,

    #[arg(long = "backend", value_delimiter = ',', default_values = ["raw", "rle64", "roaring"])]
    backends: Vec<Backend>,

    /// Trace lengths; accepts suffixes k and M.
    #[arg(long = "length", value_delimiter = ',', value_parser = parse_count, default_values = ["10000", "100000", "1000000"])]
    lengths: Vec<usize>,

    #[command(flatten)]
    spec: GenSpecArgs,

    /// Timed repetitions per cell after one warm-up run.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,

    /// Time ground-bitmap construction together with evaluation.
    #[arg(long)]
    include_ingest: bool,

    /// Cells measured concurrently. Values above 1 let cells disturb each
    /// other's timings.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct CompressArgs {
    #[arg(long = "length", value_delimiter = ',', value_parser = parse_count, default_values = ["100000"])]
    lengths: Vec<usize>,

    #[arg(long = "repeat", value_delimiter = ',', default_values = ["1", "32", "64"])]
    repeats: Vec<usize>,

    #[arg(long = "backend", value_delimiter = ',', default_values = ["raw", "rle64", "roaring"])]
    backends: Vec<Backend>,

    #[arg(long, default_value_t = 10)]
    vars: usize,

    #[arg(long, env = "LTLBIT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_parser = parse_count)]
    length: usize,

    #[command(flatten)]
    spec: GenSpecArgs,

    /// Probability that a variable is true.
    #[arg(long, default_value_t = 0.5)]
    density: f64,

    #[arg(long, default_value = "csv")]
    format: Format,

    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses counts such as `250000`, `250k`, `1M` or `1e6`.
fn parse_count(s: &str) -> Result<usize, String> {
    let bad = || format!("invalid count {s:?}");
    let (digits, scale) = match s.as_bytes().last() {
        Some(b'k' | b'K') => (&s[..s.len() - 1], 1_000.0),
        Some(b'M') => (&s[..s.len() - 1], 1_000_000.0),
        _ => (s, 1.0),
    };
    if let Ok(n) = digits.parse::<usize>() {
        return Ok(n * scale as usize);
    }
    let x: f64 = digits.parse().map_err(|_| bad())?;
    let n = x * scale;
    if n < 0.0 || n.fract() != 0.0 || !n.is_finite() {
        return Err(bad());
    }
    Ok(n as usize)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(args) => check(&args),
        Command::Bench(args) => bench(&args).map(|_| ExitCode::SUCCESS),
        Command::CompressReport(args) => compress(&args).map(|_| ExitCode::SUCCESS),
        Command::Gen(args) => gen(&args).map(|_| ExitCode::SUCCESS),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}

fn resolve_formula(args: &FormulaArgs) -> Result<(String, Formula)> {
    match (&args.formula, &args.formula_id) {
        (Some(text), _) => {
            let f = parse(text)
                .map_err(|e| anyhow::anyhow!("{e}\n  {text}\n  {}^", " ".repeat(e.offset)))?;
            Ok(("formula".to_string(), f))
        }
        (None, Some(id)) => {
            let c = corpus();
            let entry = c
                .get(id)
                .with_context(|| format!("no corpus formula with id {id:?}"))?;
            Ok((entry.id.to_string(), entry.formula.clone()))
        }
        (None, None) => bail!("one of --formula or --formula-id is required"),
    }
}

struct Checked {
    verdict: bool,
    positions: String,
    ground: Duration,
    eval: Duration,
    peak: usize,
}

fn check_one<B: Bitmap>(f: &Formula, trace: &Trace) -> Result<Checked> {
    let start = Instant::now();
    let env = build_ground_bitmaps::<B>(trace);
    let ground = start.elapsed();
    let start = Instant::now();
    let r = eval(f, &env)?;
    let eval = start.elapsed();
    Ok(Checked {
        verdict: r.verdict,
        positions: r.bitmap.render(),
        ground,
        eval,
        peak: r.peak_bitmap_bytes,
    })
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

fn check(args: &CheckArgs) -> Result<ExitCode> {
    let (id, f) = resolve_formula(&args.formula)?;
    let mut opts = LoadOptions::new(args.format);
    if let Some(key) = &args.slice {
        opts = opts.key_column(key.clone());
    }
    let start = Instant::now();
    let file =
        File::open(&args.trace).with_context(|| format!("cannot open {}", args.trace.display()))?;
    let trace = load_trace_with(io::BufReader::new(file), &opts)
        .with_context(|| format!("in {}", args.trace.display()))?;
    let load = start.elapsed();

    let mut out = io::stdout().lock();
    let verdict = match &args.slice {
        None => {
            let c = with_backend!(args.backend, B => check_one::<B>(&f, &trace))?;
            writeln!(out, "verdict: {}", c.verdict)?;
            print_summary(&mut out, &id, &f, args.backend, trace.len())?;
            writeln!(out, "peak_bitmap_bytes: {}", c.peak)?;
            writeln!(out, "load_ms: {}", ms(load))?;
            writeln!(out, "ground_ms: {}", ms(c.ground))?;
            writeln!(out, "eval_ms: {}", ms(c.eval))?;
            if args.positions {
                writeln!(out, "positions: {}", c.positions)?;
            }
            c.verdict
        }
        Some(key) => {
            let slices = slice(&trace, key);
            let mut results = Vec::with_capacity(slices.len());
            for (k, sub) in &slices {
                let c = with_backend!(args.backend, B => check_one::<B>(&f, sub))?;
                results.push((k, sub.len(), c));
            }
            let verdict = results.iter().all(|(_, _, c)| c.verdict);
            writeln!(out, "verdict: {verdict}")?;
            print_summary(&mut out, &id, &f, args.backend, trace.len())?;
            writeln!(out, "slices: {}", results.len())?;
            for (k, len, c) in &results {
                writeln!(out, "slice {k}: {} ({len} events)", c.verdict)?;
                if args.positions {
                    writeln!(out, "positions {k}: {}", c.positions)?;
                }
            }
            let eval: Duration = results.iter().map(|(_, _, c)| c.eval).sum();
            writeln!(out, "load_ms: {}", ms(load))?;
            writeln!(out, "eval_ms: {}", ms(eval))?;
            verdict
        }
    };
    out.flush()?;
    Ok(if verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn print_summary(
    out: &mut impl Write,
    id: &str,
    f: &Formula,
    backend: Backend,
    events: usize,
) -> io::Result<()> {
    writeln!(out, "formula: {f}")?;
    writeln!(out, "formula_id: {id}")?;
    writeln!(out, "size: {}", f.size())?;
    writeln!(out, "depth: {}", f.depth())?;
    writeln!(out, "backend: {backend}")?;
    writeln!(out, "events: {events}")
}

fn bench(args: &BenchArgs) -> Result<()> {
    let c = corpus();
    let mut formulas = Vec::new();
    for id in &args.formula_ids {
        let e = c
            .get(id)
            .with_context(|| format!("no corpus formula with id {id:?}"))?;
        formulas.push((e.id.to_string(), e.formula.clone()));
    }
    for (i, text) in args.formulas.iter().enumerate() {
        let f = parse(text).with_context(|| format!("in formula {text:?}"))?;
        formulas.push((format!("F{}", i + 1), f));
    }
    if formulas.is_empty() {
        formulas = c
            .iter()
            .map(|e| (e.id.to_string(), e.formula.clone()))
            .collect();
    }
    let config = BenchConfig {
        num_vars: args.spec.vars,
        repeat: args.spec.repeat as usize,
        seed: args.spec.seed,
        reps: args.reps as usize,
        include_ingest: args.include_ingest,
        jobs: args.jobs.max(1),
        ..BenchConfig::new(formulas, args.backends.clone(), args.lengths.clone())
    };
    eprintln!(
        "# prng={PRNG_ID} seed={} parallel={}",
        config.seed,
        ltlbit::par::PARALLEL
    );
    let outcomes = run_bench(&config);
    for o in &outcomes {
        if let Some(e) = &o.error {
            let r = &o.record;
            eprintln!(
                "cell {} {} {} failed: {e}",
                r.formula_id, r.backend, r.trace_length
            );
        }
    }
    let rows: Vec<_> = outcomes.into_iter().map(|o| o.record).collect();
    write_csv(io::stdout().lock(), &rows)?;
    Ok(())
}

fn compress(args: &CompressArgs) -> Result<()> {
    if args.repeats.contains(&0) {
        bail!("--repeat must be at least 1");
    }
    eprintln!("# prng={PRNG_ID} seed={}", args.seed);
    let rows = compression_report(
        &args.lengths,
        &args.repeats,
        &args.backends,
        args.vars,
        args.seed,
    );
    write_csv(io::stdout().lock(), &rows)?;
    Ok(())
}

fn gen(args: &GenArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.density) {
        bail!("--density must lie in [0, 1]");
    }
    if args.spec.vars == 0 {
        bail!("--vars must be at least 1");
    }
    let spec = TraceGenSpec::new(args.length, args.spec.seed)
        .vars(args.spec.vars)
        .repeat(args.spec.repeat as usize)
        .density(args.density);
    let trace = generate_random_trace(&spec);
    match &args.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            write_trace(&trace, BufWriter::new(file), args.format)?;
        }
        None => write_trace(&trace, io::stdout().lock(), args.format)?,
    }
    Ok(())
}
