//! `primebias`: count residue patterns of consecutive primes and compare
//! them with the conjectured predictions.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use primebias::arith::{Modulus, ResiduePattern};
use primebias::characters::CharacterGroup;
use primebias::constants::ModulusConstants;
use primebias::lfun::{CTable, PrimeTable, DEFAULT_PRIME_BOUND};
use primebias::predict::{
    asymptotic_prediction, integral_lower_limit, integral_prediction, skip_prediction, INTEGRAL_TOLERANCE,
};
use primebias::sieve::{count_patterns_with_progress, CountTable, Limit, SieveConfig, DEFAULT_SEGMENT_ENTRIES};
use primebias::singular::{SingularContext, CUTOFF_FACTOR};
use primebias::Error;

use output::{Cell, Format, Manifest, Table};

const EXIT_INVALID: u8 = 2;
const EXIT_CONSISTENCY: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(
    name = "primebias",
    version,
    about = "Residue patterns of consecutive primes: exact counts and conjectured predictions",
    after_help = "Every subcommand accepts --config FILE with key=value lines naming its long flags; \
flags typed on the command line win.\n\nExit status: 0 success, 2 invalid arguments, 3 internal \
consistency failure, 4 resource budget exceeded, 5 I/O error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the table here and the manifest to FILE.manifest (default: table
    /// to stdout, manifest to stderr).
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct PrimeBound {
    /// Euler products over primes are truncated at P; the relative tail is at most 5/(P ln P).
    #[arg(long = "prime-bound", value_name = "P", default_value_t = DEFAULT_PRIME_BOUND)]
    prime_bound: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Count patterns of r primes in reduced classes mod q. Windows start at the least prime above q.
    #[command(args_override_self = true)]
    Count(CountArgs),
    /// Predicted counts for every pattern.
    #[command(args_override_self = true)]
    Predict(PredictArgs),
    /// The bias constants c1 and c2 for every pattern.
    #[command(args_override_self = true)]
    Constants(ConstantsArgs),
    /// The weighted singular-series sum S_0^k(q, v; H).
    #[command(args_override_self = true)]
    S0(S0Args),
    /// Value tables of the Dirichlet characters mod q.
    #[command(name = "dump-characters", args_override_self = true)]
    DumpCharacters(DumpCharactersArgs),
    /// L(0, chi), L(1, chi), A_{q,chi} and C_{q,chi} for the non-principal characters mod m.
    #[command(name = "dump-lvalues", args_override_self = true)]
    DumpLvalues(DumpLvaluesArgs),
    /// Actual counts next to the integral and asymptotic predictions.
    #[command(args_override_self = true)]
    Compare(CompareArgs),
}

#[derive(Args, Clone)]
struct SieveArgs {
    /// Modulus, at least 3.
    #[arg(long)]
    q: u64,
    /// Primes per pattern.
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Index distance between pattern members (1 = consecutive primes).
    #[arg(long, default_value_t = 1)]
    skip: usize,
    /// Count windows whose least prime is at most X (accepts 1e9).
    #[arg(long, value_parser = parse_integer, conflicts_with = "nth_prime", required_unless_present = "nth_prime")]
    x: Option<u64>,
    /// Count the first N windows.
    #[arg(long = "nth-prime", value_name = "N", value_parser = parse_integer)]
    nth_prime: Option<u64>,
    /// Sieving threads; counts do not depend on this.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Odd numbers per sieve segment, a multiple of 64.
    #[arg(long = "segment-entries", default_value_t = DEFAULT_SEGMENT_ENTRIES)]
    segment_entries: usize,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    sieve: SieveArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PredictMethod {
    Asymptotic,
    Integral,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    q: u64,
    /// Prediction point (accepts 1e9).
    #[arg(long)]
    x: f64,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Default: integral for r = 2, asymptotic otherwise. The integral runs in
    /// u = log y from y_min = exp(2q/phi(q)) to x at relative tolerance 1e-7.
    #[arg(long, value_enum)]
    method: Option<PredictMethod>,
    /// Predict pairs (p_n, p_{n+K}) instead, K >= 2.
    #[arg(long)]
    skip: Option<u32>,
    #[command(flatten)]
    bound: PrimeBound,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    q: u64,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[command(flatten)]
    bound: PrimeBound,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum S0Method {
    Brute,
    Analytic,
    Both,
}

#[derive(Args)]
struct S0Args {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    v: i64,
    /// Decay scale, at least 10 for brute force.
    #[arg(long = "H", value_name = "H")]
    h: f64,
    /// Moment h^k.
    #[arg(long, default_value_t = 0)]
    k: u32,
    /// Brute force sums h <= ceil(50 H (k + 1)).
    #[arg(long, value_enum, default_value_t = S0Method::Both)]
    method: S0Method,
    #[command(flatten)]
    bound: PrimeBound,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DumpCharactersArgs {
    #[arg(long)]
    q: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DumpLvaluesArgs {
    #[arg(long)]
    q: u64,
    /// Character modulus, a divisor of q (default q).
    #[arg(long)]
    m: Option<u64>,
    #[command(flatten)]
    bound: PrimeBound,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    sieve: SieveArgs,
    /// Predictions to include; integral needs r = 2.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "integral,asymptotic")]
    methods: Vec<PredictMethod>,
    #[command(flatten)]
    bound: PrimeBound,
    #[command(flatten)]
    common: Common,
}

/// Integers written plainly or as an exact float such as `1e9`.
fn parse_integer(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 {
        Ok(f as u64)
    } else {
        Err(format!("{s:?} is not a non-negative integer"))
    }
}

type AnyError = Box<dyn std::error::Error>;

fn exit_code(e: &AnyError) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidArgument(_)) => EXIT_INVALID,
        Some(Error::Consistency(_)) => EXIT_CONSISTENCY,
        Some(Error::Budget(_)) => EXIT_BUDGET,
        None if e.is::<std::io::Error>() => EXIT_IO,
        None => EXIT_CONSISTENCY,
    }
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args_os().collect(), |p| std::fs::read_to_string(p)) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let echo = args.iter().map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ");
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    let mut manifest = Manifest::default();
    manifest.set("command", echo);
    manifest.set("version", env!("CARGO_PKG_VERSION"));
    match run(cli.command, &mut manifest) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command, manifest: &mut Manifest) -> Result<(), AnyError> {
    let start = Instant::now();
    let (table, common) = match command {
        Command::Count(a) => (count(&a.sieve, manifest)?.0, a.common),
        Command::Predict(a) => (predict(&a, manifest)?, a.common),
        Command::Constants(a) => (constants(&a, manifest)?, a.common),
        Command::S0(a) => (s0(&a, manifest)?, a.common),
        Command::DumpCharacters(a) => (dump_characters(&a, manifest)?, a.common),
        Command::DumpLvalues(a) => (dump_lvalues(&a, manifest)?, a.common),
        Command::Compare(a) => (compare(&a, manifest)?, a.common),
    };
    manifest.set("format", format!("{:?}", common.format).to_lowercase());
    manifest.set("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
    let text = table.render(common.format)?;
    output::emit(&text, manifest, common.output.as_deref())?;
    Ok(())
}

fn count(a: &SieveArgs, manifest: &mut Manifest) -> Result<(Table, CountTable), AnyError> {
    let modulus = Modulus::new(a.q)?;
    let limit = match (a.x, a.nth_prime) {
        (Some(x), _) => Limit::ByX(x),
        (None, Some(n)) => Limit::ByCount(n),
        (None, None) => unreachable!("clap requires one of --x and --nth-prime"),
    };
    let config = SieveConfig::new(modulus, a.r, limit).skip(a.skip).threads(a.threads).segment_entries(a.segment_entries);
    let counts = count_patterns_with_progress(&config, |p| eprintln!("progress: sieved past {p}"))?;
    manifest.set("q", a.q);
    manifest.set("r", a.r);
    manifest.set("skip", a.skip);
    match limit {
        Limit::ByX(x) => manifest.set("x", x),
        Limit::ByCount(n) => manifest.set("nth_prime", n),
    }
    manifest.set("threads", a.threads);
    manifest.set("segment_entries", a.segment_entries);
    manifest.set("windows", counts.windows);
    manifest.set("last_window_start", counts.last_window_start);
    manifest.set("largest_prime", counts.largest_prime);
    let mut table = Table::new(vec!["pattern", "count"]);
    for (p, c) in &counts.counts {
        table.push(vec![p.to_string().into(), (*c).into()]);
    }
    Ok((table, counts))
}

fn bound_manifest(manifest: &mut Manifest, consts: &ModulusConstants) {
    manifest.set("prime_bound", consts.prime_bound());
    manifest.set("euler_tail_bound", output::sig15(consts.tail_bound()));
}

fn predict(a: &PredictArgs, manifest: &mut Manifest) -> Result<Table, AnyError> {
    let modulus = Modulus::new(a.q)?;
    manifest.set("q", a.q);
    manifest.set("x", output::sig15(a.x));
    manifest.set("r", a.r);
    let mut table = Table::new(vec!["pattern", "value", "method", "error_estimate"]);
    if let Some(k) = a.skip {
        if a.r != 2 {
            return Err(Error::InvalidArgument("--skip predicts pairs; use --r 2".into()).into());
        }
        manifest.set("skip", k);
        for p in ResiduePattern::all(&modulus, 2) {
            let c = p.classes();
            let row = skip_prediction(&modulus, c[0] as i64, c[1] as i64, k, a.x)?;
            table.push(vec![p.to_string().into(), row.value.into(), row.method.to_string().into(), Cell::Empty]);
        }
        return Ok(table);
    }
    let method = a.method.unwrap_or(if a.r == 2 { PredictMethod::Integral } else { PredictMethod::Asymptotic });
    if method == PredictMethod::Integral && a.r != 2 {
        return Err(Error::InvalidArgument("the integral prediction is only available for r = 2".into()).into());
    }
    let consts = ModulusConstants::get(a.q, a.bound.prime_bound)?;
    bound_manifest(manifest, &consts);
    let rows = match method {
        PredictMethod::Integral => {
            manifest.set("quadrature_tolerance", INTEGRAL_TOLERANCE);
            manifest.set("y_min", output::sig15(integral_lower_limit(&modulus)));
            primebias::predict::integral_prediction_table(&consts, a.x)?
        }
        PredictMethod::Asymptotic => primebias::predict::asymptotic_prediction_table(&consts, a.r, a.x)?,
    };
    for row in rows {
        table.push(vec![
            row.pattern.to_string().into(),
            row.value.into(),
            row.method.to_string().into(),
            row.quadrature_error_estimate.into(),
        ]);
    }
    Ok(table)
}

fn constants(a: &ConstantsArgs, manifest: &mut Manifest) -> Result<Table, AnyError> {
    let consts = ModulusConstants::get(a.q, a.bound.prime_bound)?;
    manifest.set("q", a.q);
    manifest.set("r", a.r);
    bound_manifest(manifest, &consts);
    let mut table = Table::new(vec!["pattern", "c1", "c2"]);
    for p in ResiduePattern::all(consts.modulus(), a.r) {
        let cc = consts.conjecture_constants(&p)?;
        table.push(vec![p.to_string().into(), cc.c1.into(), cc.c2.into()]);
    }
    Ok(table)
}

fn s0(a: &S0Args, manifest: &mut Manifest) -> Result<Table, AnyError> {
    let modulus = Modulus::new(a.q)?;
    manifest.set("q", a.q);
    manifest.set("v", a.v);
    manifest.set("H", output::sig15(a.h));
    manifest.set("k", a.k);
    manifest.set("prime_bound", a.bound.prime_bound);
    let mut table = Table::new(vec!["method", "value", "cutoff", "tail_estimate"]);
    let mut brute = None;
    let mut analytic = None;
    if a.method != S0Method::Analytic {
        let ctx = SingularContext::new(&modulus, &PrimeTable::new(a.bound.prime_bound)?);
        manifest.set("cutoff_factor", CUTOFF_FACTOR);
        let s = ctx.s0_brute(a.v, a.h, a.k)?;
        table.push(vec!["brute".into(), s.value.into(), s.cutoff.into(), s.tail_estimate.into()]);
        brute = Some(s.value);
    }
    if a.method != S0Method::Brute {
        let consts = ModulusConstants::get(a.q, a.bound.prime_bound)?;
        let s = consts.s0_analytic(a.v, a.h, a.k)?;
        table.push(vec!["analytic".into(), s.value.into(), Cell::Empty, Cell::Empty]);
        analytic = Some(s.value);
    }
    if let (Some(b), Some(an)) = (brute, analytic) {
        table.push(vec!["difference".into(), (b - an).into(), Cell::Empty, Cell::Empty]);
    }
    Ok(table)
}

fn dump_characters(a: &DumpCharactersArgs, manifest: &mut Manifest) -> Result<Table, AnyError> {
    Modulus::new(a.q)?;
    manifest.set("q", a.q);
    let group = CharacterGroup::new(a.q);
    let mut table = Table::new(vec!["label", "conductor", "parity", "n", "re", "im"]);
    for chi in group.characters() {
        let label = format!("{:?}", chi.label());
        for (n, z) in chi.value_table().into_iter().enumerate() {
            table.push(vec![
                label.clone().into(),
                chi.conductor().into(),
                (chi.parity() as i64).into(),
                (n as u64).into(),
                z.re.into(),
                z.im.into(),
            ]);
        }
    }
    Ok(table)
}

fn dump_lvalues(a: &DumpLvaluesArgs, manifest: &mut Manifest) -> Result<Table, AnyError> {
    Modulus::new(a.q)?;
    let m = a.m.unwrap_or(a.q);
    if m == 0 || a.q % m != 0 {
        return Err(Error::InvalidArgument(format!("--m {m} does not divide q = {}", a.q)).into());
    }
    let ct = CTable::build(a.q, m, &PrimeTable::new(a.bound.prime_bound)?)?;
    manifest.set("q", a.q);
    manifest.set("m", m);
    manifest.set("prime_bound", ct.prime_bound);
    let mut table = Table::new(vec![
        "label", "conductor", "parity", "l0_re", "l0_im", "l1_re", "l1_im", "a_re", "a_im", "c_re", "c_im", "tail_bound",
    ]);
    for e in &ct.entries {
        table.push(vec![
            format!("{:?}", e.label).into(),
            e.conductor.into(),
            (e.parity as i64).into(),
            e.l0.re.into(),
            e.l0.im.into(),
            e.l1.re.into(),
            e.l1.im.into(),
            e.a.re.into(),
            e.a.im.into(),
            e.c.re.into(),
            e.c.im.into(),
            ct.tail_bound.into(),
        ]);
    }
    Ok(table)
}

fn compare(a: &CompareArgs, manifest: &mut Manifest) -> Result<Table, AnyError> {
    let want_integral = a.methods.contains(&PredictMethod::Integral);
    let want_asymptotic = a.methods.contains(&PredictMethod::Asymptotic);
    if want_integral && a.sieve.r != 2 {
        return Err(Error::InvalidArgument("the integral prediction is only available for r = 2".into()).into());
    }
    if a.sieve.skip != 1 {
        return Err(Error::InvalidArgument("compare covers consecutive primes only (skip = 1)".into()).into());
    }
    let (_, counts) = count(&a.sieve, manifest)?;
    // in --nth-prime mode the predictions are taken at the last window counted
    let x = a.sieve.x.unwrap_or(counts.last_window_start) as f64;
    manifest.set("prediction_x", output::sig15(x));
    let consts = ModulusConstants::get(a.sieve.q, a.bound.prime_bound)?;
    bound_manifest(manifest, &consts);
    if want_integral {
        manifest.set("quadrature_tolerance", INTEGRAL_TOLERANCE);
        manifest.set("y_min", output::sig15(integral_lower_limit(consts.modulus())));
    }
    let mut table = Table::new(vec![
        "pattern",
        "actual",
        "integral_prediction",
        "asymptotic_prediction",
        "rel_err_integral",
        "rel_err_asymptotic",
    ]);
    let rel = |pred: Option<f64>, actual: u64| pred.map(|p| (p - actual as f64) / actual as f64);
    for (p, actual) in &counts.counts {
        let c = p.classes();
        let integral = if want_integral {
            Some(integral_prediction(&consts, c[0] as i64, c[1] as i64, x)?.value)
        } else {
            None
        };
        let asymptotic = if want_asymptotic { Some(asymptotic_prediction(&consts, p, x)?.value) } else { None };
        table.push(vec![
            p.to_string().into(),
            (*actual).into(),
            integral.into(),
            asymptotic.into(),
            rel(integral, *actual).into(),
            rel(asymptotic, *actual).into(),
        ]);
    }
    Ok(table)
}
