//! `rivalkit`: ground-truth evaluation and valid-input sampling for FPCore
//! benchmarks.

mod output;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rivalkit::backend::{DEFAULT_EXPONENT_BITS, DEFAULT_MAX_PRECISION};
use rivalkit::eval::Outcome;
use rivalkit::fpcore::parse_number;
use rivalkit::sample::{SampleConfig, SampleError, SampleStats, DEFAULT_RETRIES};
use rivalkit::search::{SearchConfig, SearchState, StuckPolicy};
use rivalkit::{parse_programs, Backend, Engine, Program, RoundDir, TargetFormat};
use rug::Float;
use serde_json::{json, Value};

use output::SCHEMA_VERSION;

mod exit {
    pub const VALID: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const INVALID: u8 = 10;
    pub const UNSAMPLABLE: u8 = 11;
    pub const EXHAUSTED: u8 = 12;
    pub const NO_VALID_INPUTS: u8 = 20;
    pub const LOW_YIELD: u8 = 21;
}

#[derive(Parser)]
#[command(name = "rivalkit", version, about = "Correctly rounded ground truth and valid-input sampling for FPCore programs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Largest working precision in bits.
    #[arg(long, global = true, env = "RIVALKIT_MAX_PRECISION", default_value_t = DEFAULT_MAX_PRECISION)]
    max_precision: u32,
    /// Exponent width of the arbitrary-precision values.
    #[arg(long, global = true, default_value_t = DEFAULT_EXPONENT_BITS)]
    exp_bits: u32,
    /// Target format; overrides the program's `:precision`.
    #[arg(long, global = true)]
    target: Option<Target>,
    /// Worker threads (0 picks one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Emit JSON lines (the only output format; accepted for scripts).
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Binary64,
    Binary32,
}

impl From<Target> for TargetFormat {
    fn from(t: Target) -> TargetFormat {
        match t {
            Target::Binary64 => TargetFormat::Binary64,
            Target::Binary32 => TargetFormat::Binary32,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Stuck {
    Discard,
    Keep,
}

#[derive(Args)]
struct SearchArgs {
    /// Search iterations after seeding.
    #[arg(long, default_value_t = 14)]
    iters: usize,
    /// What to do with regions where evaluation is stuck.
    #[arg(long, value_enum, default_value = "discard")]
    stuck: Stuck,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        let stuck = match self.stuck {
            Stuck::Discard => StuckPolicy::Discard,
            Stuck::Keep => StuckPolicy::Keep,
        };
        SearchConfig { iterations: self.iters, stuck, ..SearchConfig::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the ground truth of a program at one point.
    Eval {
        file: PathBuf,
        /// Input values, as `name=value` or positionally in variable order.
        /// Decimal or hexadecimal floats; rounded to nearest in the target.
        #[arg(allow_negative_numbers = true)]
        point: Vec<String>,
        /// Include the interval seen at each precision.
        #[arg(long)]
        verbose: bool,
    },
    /// Search the input space and report the valid, invalid and open regions.
    Search {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Sample valid inputs uniformly and print their ground truths.
    Sample {
        file: PathBuf,
        #[arg(long, default_value_t = 8256)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Draws allowed per requested point before giving up.
        #[arg(long, default_value_t = DEFAULT_RETRIES)]
        retries: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Sample every benchmark in a directory and tabulate the outcomes.
    Check {
        dir: PathBuf,
        #[arg(long, default_value_t = 256)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_RETRIES)]
        retries: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::VALID };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("rivalkit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let backend = Backend::new(cli.common.exp_bits)
        .and_then(|b| b.with_max_precision(cli.common.max_precision))
        .map_err(|e| fail(exit::USAGE, e.to_string()))?;
    let engine = Engine::new(backend);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.jobs)
        .build()
        .map_err(|e| fail(exit::USAGE, e.to_string()))?;
    let target = cli.common.target.map(TargetFormat::from);
    pool.install(|| match &cli.command {
        Command::Eval { file, point, verbose } => cmd_eval(&engine, &load_one(file, target)?, point, *verbose),
        Command::Search { file, search } => cmd_search(&engine, &load_one(file, target)?, &search.config()),
        Command::Sample { file, points, seed, retries, search } => {
            let p = load_one(file, target)?;
            let config = SampleConfig { seed: *seed, retries: *retries };
            cmd_sample(&engine, &p, *points, &config, &search.config())
        }
        Command::Check { dir, points, seed, retries, search } => {
            let config = SampleConfig { seed: *seed, retries: *retries };
            cmd_check(&engine, dir, target, *points, &config, &search.config())
        }
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(exit::USAGE, format!("{}: {e}", path.display())))
}

fn load_one(path: &Path, target: Option<TargetFormat>) -> Result<Program, Failure> {
    let text = read(path)?;
    let mut programs = parse_programs(&text).map_err(|e| fail(exit::PARSE, format!("{}:{e}", path.display())))?;
    if programs.len() != 1 {
        return Err(fail(
            exit::PARSE,
            format!("{}: expected one FPCore form, found {}", path.display(), programs.len()),
        ));
    }
    let mut p = programs.remove(0);
    if let Some(t) = target {
        p.target = t;
    }
    Ok(p)
}

/// A command-line input value, rounded to nearest in the target format.
fn parse_value(s: &str, target: TargetFormat) -> Option<f64> {
    // The standard parsers round decimal text correctly, subnormals included.
    let std = match target {
        TargetFormat::Binary64 => s.parse::<f64>().ok(),
        TargetFormat::Binary32 => s.parse::<f32>().ok().map(f64::from),
    };
    if let Some(x) = std.filter(|x| !x.is_nan()) {
        return Some(target.from_f64(x));
    }
    // Hexadecimal floats and p/q rationals.
    let q = parse_number(s)?;
    let wide = Float::with_val(4096, &q);
    Some(target.round(&wide, RoundDir::Nearest))
}

fn parse_point(p: &Program, args: &[String]) -> Result<Vec<f64>, Failure> {
    let mut values: Vec<Option<f64>> = vec![None; p.vars.len()];
    let mut next = 0;
    for a in args {
        let (slot, text) = match a.split_once('=') {
            Some((name, v)) => {
                let i = p
                    .vars
                    .iter()
                    .position(|x| x == name)
                    .ok_or_else(|| fail(exit::USAGE, format!("unknown variable '{name}'")))?;
                (i, v)
            }
            None => {
                while next < values.len() && values[next].is_some() {
                    next += 1;
                }
                if next == values.len() {
                    return Err(fail(exit::USAGE, "too many input values"));
                }
                (next, a.as_str())
            }
        };
        let v = parse_value(text, p.target).ok_or_else(|| fail(exit::USAGE, format!("malformed value '{text}'")))?;
        values[slot] = Some(v);
    }
    values
        .into_iter()
        .zip(&p.vars)
        .map(|(v, name)| v.ok_or_else(|| fail(exit::USAGE, format!("no value for '{name}'"))))
        .collect()
}

fn print(v: &Value) {
    // A closed pipe (for example `| head`) ends the run quietly.
    if writeln!(std::io::stdout().lock(), "{v}").is_err() {
        std::process::exit(0);
    }
}

fn cmd_eval(engine: &Engine, p: &Program, args: &[String], verbose: bool) -> Result<u8, Failure> {
    let point = parse_point(p, args)?;
    let (o, trace) = engine.ground_truth_traced(p, &point);
    let mut v = output::outcome(&o, p.target);
    v["point"] = output::point(&p.vars, &point, p.target);
    if verbose {
        v["rungs"] = output::rungs(&trace, p.target);
    }
    print(&v);
    Ok(match o {
        Outcome::Valid { .. } => exit::VALID,
        Outcome::Invalid { .. } => exit::INVALID,
        Outcome::Unsamplable { .. } => exit::UNSAMPLABLE,
        Outcome::Exhausted => exit::EXHAUSTED,
    })
}

fn fraction(q: rug::Rational) -> f64 {
    q.to_f64()
}

fn search_summary(state: &SearchState) -> Value {
    json!({
        "t": fraction(state.weight_t()),
        "o": fraction(state.weight_o()),
        "f": fraction(state.weight_f()),
        "rects": { "t": state.t.len(), "o": state.o.len() + state.stuck.len(), "f": state.f.len() },
    })
}

fn report_warnings(state: &SearchState, target: TargetFormat) {
    for w in &state.warnings {
        eprintln!(
            "{}",
            json!({
                "schema_version": SCHEMA_VERSION,
                "type": "warning",
                "reason": "unsamplable",
                "rect": output::rect(&w.rect, target),
                "witness": w.witness.iter().map(|&x| output::number(x, target)).collect::<Vec<_>>(),
            })
        );
    }
}

fn cmd_search(engine: &Engine, p: &Program, config: &SearchConfig) -> Result<u8, Failure> {
    let state = rivalkit::search(engine, p, config);
    report_warnings(&state, p.target);
    print(&json!({
        "schema_version": SCHEMA_VERSION,
        "type": "search",
        "weights": search_summary(&state),
        "warnings": state.warnings.len(),
    }));
    // Drawing nothing still reports an empty search.
    rivalkit::sample(engine, p, &state, 0, &SampleConfig::default()).map_err(sample_error)?;
    Ok(exit::VALID)
}

fn stats_json(s: &SampleStats) -> Value {
    json!({
        "draws": s.draws,
        "accepted": s.accepted,
        "rejected": s.rejected,
        "unsamplable": s.unsamplable,
        "exhausted": s.exhausted,
        "rejection_rate": s.rejection_rate(),
    })
}

fn sample_error(e: SampleError) -> Failure {
    let code = match e {
        SampleError::NoValidInputs { .. } => exit::NO_VALID_INPUTS,
        SampleError::LowYield { .. } => exit::LOW_YIELD,
    };
    fail(code, e.to_string())
}

fn cmd_sample(
    engine: &Engine,
    p: &Program,
    count: usize,
    config: &SampleConfig,
    search: &SearchConfig,
) -> Result<u8, Failure> {
    let state = rivalkit::search(engine, p, search);
    report_warnings(&state, p.target);
    let summary = |stats: &SampleStats| {
        json!({
            "schema_version": SCHEMA_VERSION,
            "type": "summary",
            "points": stats.accepted,
            "weights": search_summary(&state),
            "sampling": stats_json(stats),
            "warnings": state.warnings.len(),
        })
    };
    let (samples, stats) = rivalkit::sample(engine, p, &state, count, config).map_err(|e| {
        print(&summary(&SampleStats::default()));
        sample_error(e)
    })?;
    for s in &samples {
        print(&json!({
            "schema_version": SCHEMA_VERSION,
            "type": "sample",
            "point": output::point(&p.vars, &s.point, p.target),
            "value": output::decimal(s.value, p.target),
            "value_hex": output::hex(s.value),
            "bits_used": s.bits,
        }));
    }
    print(&summary(&stats));
    Ok(exit::VALID)
}

fn benchmark_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| fail(exit::USAGE, format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "fpcore"))
        .collect();
    files.sort();
    Ok(files)
}

fn cmd_check(
    engine: &Engine,
    dir: &Path,
    target: Option<TargetFormat>,
    count: usize,
    config: &SampleConfig,
    search: &SearchConfig,
) -> Result<u8, Failure> {
    let mut total = SampleStats::default();
    let mut by_bits: BTreeMap<u32, usize> = BTreeMap::new();
    let (mut benchmarks, mut failed, mut warnings) = (0usize, 0usize, 0usize);
    for file in benchmark_files(dir)? {
        let shown = file.display().to_string();
        let programs = match read(&file).and_then(|t| {
            parse_programs(&t).map_err(|e| fail(exit::PARSE, e.to_string()))
        }) {
            Ok(ps) => ps,
            Err(f) => {
                failed += 1;
                print(&json!({ "schema_version": SCHEMA_VERSION, "type": "benchmark", "file": shown, "error": f.message }));
                continue;
            }
        };
        for mut p in programs {
            if let Some(t) = target {
                p.target = t;
            }
            benchmarks += 1;
            let state = rivalkit::search(engine, &p, search);
            warnings += state.warnings.len();
            let mut record = json!({
                "schema_version": SCHEMA_VERSION,
                "type": "benchmark",
                "file": shown,
                "name": p.name,
                "weights": search_summary(&state),
                "warnings": state.warnings.iter().map(|w| json!({
                    "rect": output::rect(&w.rect, p.target),
                    "witness": w.witness.iter().map(|&x| output::number(x, p.target)).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            });
            match rivalkit::sample(engine, &p, &state, count, config) {
                Ok((samples, stats)) => {
                    let mut bits: BTreeMap<u32, usize> = BTreeMap::new();
                    for s in &samples {
                        *bits.entry(s.bits).or_default() += 1;
                        *by_bits.entry(s.bits).or_default() += 1;
                    }
                    total.merge(&stats);
                    record["sampling"] = stats_json(&stats);
                    record["by_bits"] = json!(bits);
                }
                Err(e) => {
                    failed += 1;
                    record["error"] = json!(e.to_string());
                }
            }
            print(&record);
        }
    }
    print(&json!({
        "schema_version": SCHEMA_VERSION,
        "type": "report",
        "benchmarks": benchmarks,
        "failed": failed,
        "warnings": warnings,
        "sampling": stats_json(&total),
        "by_bits": by_bits,
    }));
    Ok(exit::VALID)
}
