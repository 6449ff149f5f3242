//! Command-line front end.
//!
//! Exit status: 0 on success, 2 on usage errors (bad or missing flags), 1 on
//! data or numerical errors. A `--config FILE` of `flag = value` lines is
//! expanded in front of the command-line flags, so explicit flags win.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::distinct::{self, estimate_distinct, DistinctConfig};
use crate::entropy::{self, empirical_entropy, estimate_entropy, miller_madow, EntropyConfig};
use crate::error::Error;
use crate::fingerprint::{parse_input, Fingerprint, InputFormat};
use crate::sim::{self, run_trials, Estimator, ExperimentSpec, Family, SamplingMode};
use crate::support::{self, *};

#[derive(Debug, Parser)]
#[command(name = "symprop", version, about = "Estimate support size, distinct elements and entropy from samples")]
#[command(args_override_self = true)]
pub struct Cli {
    /// File of `flag = value` lines applied before the command-line flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the fingerprint of a sample.
    Fingerprint(FingerprintArgs),
    /// Estimate the support size.
    Support(SupportArgs),
    /// Estimate Shannon entropy.
    Entropy(EntropyArgs),
    /// Estimate the number of distinct balls in an urn.
    Distinct(DistinctArgs),
    /// Run a seeded RMSE experiment on synthetic data.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct InputArgs {
    /// Input file, or `-` for stdin.
    #[arg(long, default_value = "-")]
    pub input: String,
    /// counts | fingerprint | text
    #[arg(long, default_value = "counts", value_parser = parse_format)]
    #[serde(serialize_with = "ser_format")]
    pub format: InputFormat,
    /// Declared sample size, checked against the parsed input.
    #[arg(long = "declared-n")]
    pub declared_n: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long = "output-format", value_enum)]
    pub output_format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args, Serialize)]
pub struct FingerprintArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportEstimator {
    Chebyshev,
    Plugin,
    GoodTuring,
    Chao1,
    GoodToulmin,
    EfronThisted,
}

#[derive(Debug, Args, Serialize)]
pub struct SupportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "chebyshev")]
    pub estimator: SupportEstimator,
    /// Lower bound `1/k` on nonzero masses; required by the non-adaptive Chebyshev estimator.
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value_t = support::DEFAULT_C0)]
    pub c0: f64,
    #[arg(long, default_value_t = support::DEFAULT_C1)]
    pub c1: f64,
    /// Use the interval that does not depend on `k`.
    #[arg(long)]
    pub adaptive: bool,
    #[arg(long, default_value_t = sim::DEFAULT_EPS)]
    pub eps: f64,
    /// Extrapolation ratio for Good–Toulmin and Efron–Thisted.
    #[arg(long)]
    pub t: Option<f64>,
    /// Efron–Thisted truncation.
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub big_j: Option<u32>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyEstimator {
    Polynomial,
    Empirical,
    MillerMadow,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "polynomial")]
    pub estimator: EntropyEstimator,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value_t = entropy::DEFAULT_C0)]
    pub c0: f64,
    #[arg(long, default_value_t = entropy::DEFAULT_C1)]
    pub c1: f64,
    #[arg(long, default_value_t = entropy::DEFAULT_C2)]
    pub c2: f64,
    #[arg(long)]
    pub adaptive: bool,
    /// Split the sample by fair coins into selection and estimation halves.
    #[arg(long)]
    pub split: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also report the estimate in bits.
    #[arg(long)]
    pub bits: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct DistinctArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Number of balls in the urn.
    #[arg(long)]
    pub k: Option<u64>,
    /// Sample size used to size the grid; defaults to the input's n.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, default_value_t = distinct::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = distinct::DEFAULT_BETA)]
    pub beta: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Uniform,
    Zipf,
    GeoZipfMix,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "uniform")]
    pub family: FamilyName,
    /// Zipf exponent.
    #[arg(long, default_value_t = 1.0)]
    pub exponent: f64,
    #[arg(long)]
    pub k: u64,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[arg(long, default_value_t = 50)]
    pub trials: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "plugin,chebyshev,good-turing,chao1")]
    pub estimators: Vec<String>,
    /// iid | poissonized
    #[arg(long, default_value = "iid")]
    pub mode: String,
    #[arg(long, default_value_t = support::DEFAULT_C0)]
    pub c0: f64,
    #[arg(long, default_value_t = support::DEFAULT_C1)]
    pub c1: f64,
    #[arg(long, default_value_t = sim::DEFAULT_EPS)]
    pub eps: f64,
    #[arg(long, default_value_t = distinct::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = distinct::DEFAULT_BETA)]
    pub beta: f64,
    #[arg(long = "entropy-c0", default_value_t = entropy::DEFAULT_C0)]
    pub entropy_c0: f64,
    #[arg(long = "entropy-c1", default_value_t = entropy::DEFAULT_C1)]
    pub entropy_c1: f64,
    #[arg(long, default_value_t = entropy::DEFAULT_C2)]
    pub c2: f64,
    #[arg(long)]
    pub split: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

fn parse_format(s: &str) -> Result<InputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn ser_format<S: serde::Serializer>(f: &InputFormat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(match f {
        InputFormat::Counts => "counts",
        InputFormat::Fingerprint => "fingerprint",
        InputFormat::Text => "text",
    })
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(Error::Io(e))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the tool on `argv` (including the program name) and returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

/// Splices `--key value` pairs from the config file right after the
/// subcommand name.
fn expand_config(argv: Vec<String>) -> std::result::Result<Vec<String>, String> {
    let mut path = None;
    let mut rest = Vec::with_capacity(argv.len());
    let mut iter = argv.into_iter();
    while let Some(a) = iter.next() {
        if a == "--config" {
            path = Some(iter.next().ok_or("--config needs a file")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("reading config {path}: {e}"))?;
    let mut extra = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected `flag = value`", no + 1))?;
        let (key, value) = (key.trim().trim_start_matches("--"), value.trim());
        match value {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => {
                extra.push(format!("--{key}"));
                extra.push(value.to_string());
            }
        }
    }
    // program name and subcommand come first
    let split = rest.iter().skip(1).position(|a| !a.starts_with('-')).map_or(rest.len(), |p| p + 2);
    let tail = rest.split_off(split.min(rest.len()));
    rest.extend(extra);
    rest.extend(tail);
    Ok(rest)
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Fingerprint(a) => cmd_fingerprint(a, stdout),
        Command::Support(a) => cmd_support(a, stdout),
        Command::Entropy(a) => cmd_entropy(a, stdout),
        Command::Distinct(a) => cmd_distinct(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
    }
}

fn read_input(args: &InputArgs) -> CliResult<Fingerprint> {
    let fp = if args.input == "-" {
        parse_input(io::stdin().lock(), args.format, args.declared_n)?
    } else {
        let file = File::open(&args.input).map_err(|e| Error::Input(format!("opening {}: {e}", args.input)))?;
        parse_input(file, args.format, args.declared_n)?
    };
    Ok(fp)
}

fn emit(out: &OutputArgs, stdout: &mut dyn Write, body: &[u8]) -> CliResult<()> {
    match &out.output {
        Some(path) => write_file(path, body),
        None => {
            stdout.write_all(body)?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, body: &[u8]) -> CliResult<()> {
    std::fs::write(path, body).map_err(|e| Error::Input(format!("writing {}: {e}", path.display())).into())
}

fn json_only(out: &OutputArgs) -> CliResult<()> {
    match out.output_format {
        None | Some(OutputFormat::Json) => Ok(()),
        Some(other) => Err(Failure::Usage(format!(
            "output format {other:?} is not available for this command; use json"
        ))),
    }
}

fn report<C: Serialize, R: Serialize>(config: &C, result: &R) -> CliResult<Vec<u8>> {
    let doc = json!({ "config": config, "result": result });
    let mut body = serde_json::to_vec_pretty(&doc).map_err(|e| Error::Input(e.to_string()))?;
    body.push(b'\n');
    Ok(body)
}

fn cmd_fingerprint(a: FingerprintArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let fp = read_input(&a.input)?;
    let body = match a.output.output_format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Text => fp.to_text().into_bytes(),
        OutputFormat::Csv => {
            let mut s = String::from("j,phi_j\n");
            for (j, phi) in fp.iter() {
                s.push_str(&format!("{j},{phi}\n"));
            }
            s.into_bytes()
        }
        OutputFormat::Json => {
            let result = json!({
                "n": fp.n(),
                "observed_support": fp.observed_support(),
                "fingerprint": fp.iter().map(|(j, phi)| json!([j, phi])).collect::<Vec<_>>(),
            });
            report(&a, &result)?
        }
    };
    emit(&a.output, stdout, &body)
}

fn cmd_support(a: SupportArgs, stdout: &mut dyn Write) -> CliResult<()> {
    json_only(&a.output)?;
    let need_t = || a.t.ok_or_else(|| Failure::Usage(format!("--t is required for {:?}", a.estimator)));
    match a.estimator {
        SupportEstimator::Chebyshev if !a.adaptive && a.k.is_none() => {
            return Err(Failure::Usage("--k is required unless --adaptive is given".into()))
        }
        SupportEstimator::GoodToulmin => {
            need_t()?;
        }
        SupportEstimator::EfronThisted => {
            need_t()?;
            if a.big_j.is_none() {
                return Err(Failure::Usage("--J is required for efron-thisted".into()));
            }
        }
        _ => {}
    }
    let fp = read_input(&a.input)?;
    let result: Value = match a.estimator {
        SupportEstimator::Chebyshev if a.adaptive => {
            to_value(&chebyshev_support_adaptive(&fp, a.eps, a.c0, a.c1, a.k)?)
        }
        SupportEstimator::Chebyshev => {
            let cfg = SupportConfig {
                k: a.k.expect("checked above"),
                c0: a.c0,
                c1: a.c1,
            };
            to_value(&chebyshev_support(&fp, &cfg)?)
        }
        SupportEstimator::Plugin => json!({
            "estimator": "plugin",
            "n": fp.n(),
            "estimate": plugin_support(&fp),
        }),
        SupportEstimator::GoodTuring => to_value(&good_turing_support(&fp)?),
        SupportEstimator::Chao1 => to_value(&chao1_support(&fp)),
        SupportEstimator::GoodToulmin => {
            let t = need_t()?;
            json!({
                "estimator": "good-toulmin",
                "n": fp.n(),
                "t": t,
                "estimate": good_toulmin_support(&fp, t)?,
            })
        }
        SupportEstimator::EfronThisted => {
            let (t, big_j) = (need_t()?, a.big_j.expect("checked above"));
            json!({
                "estimator": "efron-thisted",
                "n": fp.n(),
                "t": t,
                "J": big_j,
                "estimate": efron_thisted_support(&fp, t, big_j)?,
            })
        }
    };
    emit(&a.output, stdout, &report(&a, &result)?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn cmd_entropy(a: EntropyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    json_only(&a.output)?;
    if a.estimator == EntropyEstimator::Polynomial && !a.adaptive && a.k.is_none() {
        return Err(Failure::Usage("--k is required unless --adaptive is given".into()));
    }
    let fp = read_input(&a.input)?;
    let h = fp.to_histogram();
    let mut result = match a.estimator {
        EntropyEstimator::Polynomial => {
            let cfg = EntropyConfig {
                k: a.k,
                c0: a.c0,
                c1: a.c1,
                c2: a.c2,
                split: a.split,
                adaptive: a.adaptive,
            };
            to_value(&estimate_entropy(&h, &cfg, Some(a.seed))?)
        }
        EntropyEstimator::Empirical => json!({
            "estimator": "empirical",
            "n": fp.n(),
            "estimate": empirical_entropy(&h)?,
        }),
        EntropyEstimator::MillerMadow => json!({
            "estimator": "miller-madow",
            "n": fp.n(),
            "estimate": miller_madow(&h)?,
        }),
    };
    if a.bits {
        let nats = result["estimate"].as_f64().unwrap_or(f64::NAN);
        result["estimate_bits"] = json!(nats / std::f64::consts::LN_2);
    }
    result["unit"] = json!("nats");
    emit(&a.output, stdout, &report(&a, &result)?)
}

fn cmd_distinct(a: DistinctArgs, stdout: &mut dyn Write) -> CliResult<()> {
    json_only(&a.output)?;
    let k = a.k.ok_or_else(|| Failure::Usage("--k is required for distinct".into()))?;
    let fp = read_input(&a.input)?;
    let cfg = DistinctConfig {
        k,
        n: a.n.unwrap_or(fp.n()),
        alpha: a.alpha,
        beta: a.beta,
    };
    let result = estimate_distinct(&fp, &cfg)?;
    emit(&a.output, stdout, &report(&a, &result)?)
}

fn cmd_simulate(a: SimulateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let family = match a.family {
        FamilyName::Uniform => Family::Uniform,
        FamilyName::Zipf => Family::Zipf { alpha: a.exponent },
        FamilyName::GeoZipfMix => Family::GeoZipfMix,
    };
    let mode: SamplingMode = a.mode.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let mut estimators = Vec::with_capacity(a.estimators.len());
    for name in &a.estimators {
        let e = name.parse::<Estimator>().map_err(|e| Failure::Usage(e.to_string()))?;
        estimators.push(configure(e, &a));
    }
    if a.trials == 0 || a.n.contains(&0) {
        return Err(Failure::Usage("--trials and every --n must be positive".into()));
    }
    let spec = ExperimentSpec {
        family,
        k: a.k,
        estimators,
        sizes: a.n.clone(),
        trials: a.trials,
        mode,
        seed: a.seed,
    };
    let result = run_trials(&spec)?;
    match a.output.output_format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut body = Vec::new();
            result.write_csv(&mut body)?;
            emit(&a.output, stdout, &body)?;
            // the CSV has no room for provenance, so a JSON mirror sits next to a file output
            if let Some(path) = &a.output.output {
                let mut mirror = path.clone().into_os_string();
                mirror.push(".json");
                write_file(Path::new(&mirror), &report(&a, &result)?)?;
            }
            Ok(())
        }
        OutputFormat::Json => emit(&a.output, stdout, &report(&a, &result)?),
        OutputFormat::Text => Err(Failure::Usage("simulate writes csv or json".into())),
    }
}

/// Applies the command-line constants to an estimator parsed by name.
fn configure(e: Estimator, a: &SimulateArgs) -> Estimator {
    match e {
        Estimator::Chebyshev { .. } => Estimator::Chebyshev { c0: a.c0, c1: a.c1 },
        Estimator::ChebyshevAdaptive { .. } => Estimator::ChebyshevAdaptive {
            eps: a.eps,
            c0: a.c0,
            c1: a.c1,
        },
        Estimator::Distinct { .. } => Estimator::Distinct {
            alpha: a.alpha,
            beta: a.beta,
        },
        Estimator::Polynomial { .. } => Estimator::Polynomial {
            c0: a.entropy_c0,
            c1: a.entropy_c1,
            c2: a.c2,
            split: a.split,
        },
        Estimator::PolynomialAdaptive { .. } => Estimator::PolynomialAdaptive {
            c0: a.entropy_c0,
            c1: a.entropy_c1,
            c2: a.c2,
        },
        other => other,
    }
}

