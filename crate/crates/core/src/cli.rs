//! Command-line front end.
//!
//! Exit codes: 0 success or accept, 1 reject (non-uniform verdict or a failed
//! experiment check), 2 usage error, 3 internal failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::{SubGammaParams, TailEnvelope};
use crate::defaults;
use crate::distribution::{sample_histogram, DistributionSpec, SampleSeed};
use crate::error::Error;
use crate::estimator::{
    entropy_from_q, estimate_from_histogram, tester_sample_size, uniformity_test, Decision, SampleHistogram,
};
use crate::harness::{run_experiment, ExperimentConfig, ExperimentKind, TrialReport};
use crate::moments::{bin_moment_bound, bin_moment_exact, symm_diff_moment_bound, symm_diff_moment_exact};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "collision", version, about = "Collision-probability estimation and uniformity testing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the collision probability and collision entropy of a sample file.
    Estimate(EstimateArgs),
    /// Run the collision uniformity tester.
    TestUniformity(TestArgs),
    /// Print v2, b and the tail envelope for a distribution.
    Bounds(BoundsArgs),
    /// Emit exact moments next to their bounds as CSV.
    MomentTable(MomentArgs),
    /// Run an experiment from a JSON config.
    Experiment(ExperimentArgs),
    /// Fit tail-envelope constants from a calibrate config.
    Calibrate(ExperimentArgs),
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Sample file, one symbol per line.
    file: PathBuf,
    /// Logarithm base of the entropy.
    #[arg(long, default_value_t = 2.0)]
    base: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
#[group(skip)]
struct DistArgs {
    /// Uniform distribution on M symbols.
    #[arg(long, value_name = "M", group = "dist")]
    uniform: Option<usize>,
    /// Zipf distribution on M symbols with exponent --s.
    #[arg(long, value_name = "M", group = "dist", requires = "s")]
    zipf: Option<usize>,
    #[arg(long)]
    s: Option<f64>,
    /// Planted-bias distribution on M symbols with --alpha.
    #[arg(long, value_name = "M", group = "dist", requires = "alpha")]
    planted: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Explicit comma-separated weights.
    #[arg(long, value_delimiter = ',', group = "dist")]
    weights: Option<Vec<f64>>,
}

impl DistArgs {
    fn spec(&self) -> Option<DistributionSpec> {
        if let Some(m) = self.uniform {
            Some(DistributionSpec::Uniform { m })
        } else if let Some(m) = self.zipf {
            Some(DistributionSpec::Zipf { m, s: self.s? })
        } else if let Some(m) = self.planted {
            Some(DistributionSpec::PlantedBias { m, alpha: self.alpha? })
        } else {
            self.weights.clone().map(|weights| DistributionSpec::Explicit { weights })
        }
    }
}

#[derive(Debug, Args)]
struct TestArgs {
    /// Sample file, one symbol per line.
    #[arg(long, conflicts_with = "dist")]
    sample: Option<PathBuf>,
    #[command(flatten)]
    dist: DistArgs,
    /// Domain size.
    #[arg(long)]
    m: usize,
    #[arg(long)]
    epsilon: f64,
    /// Sample size when drawing from a distribution; defaults to the tester's rule.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Sample-size constant.
    #[arg(long, default_value_t = defaults::TESTER_C)]
    constant: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EnvelopeArgs {
    #[arg(long, default_value_t = defaults::TAIL_ENVELOPE.c_out)]
    c_out: f64,
    #[arg(long, default_value_t = defaults::TAIL_ENVELOPE.c_sq)]
    c_sq: f64,
    #[arg(long, default_value_t = defaults::TAIL_ENVELOPE.c_lin)]
    c_lin: f64,
    #[arg(long, default_value_t = defaults::TAIL_ENVELOPE.c_heavy)]
    c_heavy: f64,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    dist: DistArgs,
    #[arg(long)]
    n: u64,
    /// Comma-separated epsilons; defaults to Q times 0.05, 0.1, 0.2, 0.5, 1.
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[command(flatten)]
    envelope: EnvelopeArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MomentKind {
    /// `E (S - S')^d` for independent binomials.
    Symm,
    /// `E |S^2 - S - E(S^2 - S)|^d` for one binomial bin.
    Bin,
}

#[derive(Debug, Args)]
struct MomentArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<u32>,
    #[arg(long, value_enum, default_value_t = MomentKind::Symm)]
    kind: MomentKind,
    /// Constant of the symm bound.
    #[arg(long, default_value_t = defaults::SYMM_DIFF_C)]
    c: f64,
    #[arg(long, default_value_t = defaults::BIN_MOMENT.c1)]
    c1: f64,
    #[arg(long, default_value_t = defaults::BIN_MOMENT.c2)]
    c2: f64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV path; the JSON summary is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation(_) | Error::Domain { .. } | Error::Json(_) => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

type CliResult = Result<i32, Failure>;

/// Runs the CLI on `argv` (including the program name), printing to stdout/stderr.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

/// Like [`run`], with explicit output streams.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => estimate(a, out),
        Command::TestUniformity(a) => test_uniformity(a, out),
        Command::Bounds(a) => bounds(a, out),
        Command::MomentTable(a) => moment_table(a, out),
        Command::Experiment(a) => experiment(a, None, out),
        Command::Calibrate(a) => experiment(a, Some(ExperimentKind::Calibrate), out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(err, "internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}

/// Shortest round-tripping decimal, identical to the JSON encoding.
fn num<T: Serialize>(x: T) -> String {
    serde_json::to_string(&x).expect("number serializes")
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Internal(format!("cannot write output: {e}")))
}

fn read_sample(path: &Path) -> Result<Vec<String>, Failure> {
    let bytes = std::fs::read(path).or_else(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes).or_else(|_| usage(format!("{} is not valid UTF-8", path.display())))?;
    let symbols: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect();
    if symbols.len() < 2 {
        return usage(format!("{} holds {} symbols; at least 2 are needed", path.display(), symbols.len()));
    }
    Ok(symbols)
}

fn estimate(a: EstimateArgs, out: &mut dyn Write) -> CliResult {
    let symbols = read_sample(&a.file)?;
    let hist = SampleHistogram::from_symbols(&symbols)?;
    let est = estimate_from_histogram(&hist)?;
    let h2 = match entropy_from_q(est.q_hat, a.base) {
        Ok(h) => Some(h),
        Err(Error::NoCollisions) => None,
        Err(e) => return Err(e.into()),
    };
    let text = if a.json {
        let body = json!({
            "n": est.n,
            "distinct": hist.support(),
            "collision_pairs": est.collision_pairs.to_string(),
            "q_hat": est.q_hat,
            "base": a.base,
            "h2": h2,
        });
        format!("{}\n", serde_json::to_string_pretty(&body).expect("json"))
    } else {
        format!(
            "n        {}\ndistinct {}\npairs    {}\nq_hat    {}\nh2       {}\n",
            est.n,
            hist.support(),
            est.collision_pairs,
            num(est.q_hat),
            h2.map(num).unwrap_or_else(|| "undefined (no collisions)".into())
        )
    };
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn test_uniformity(a: TestArgs, out: &mut dyn Write) -> CliResult {
    let (hist, source) = match (&a.sample, a.dist.spec()) {
        (Some(path), _) => {
            let symbols = read_sample(path)?;
            let hist = SampleHistogram::from_symbols(&symbols)?;
            if hist.support() > a.m {
                return usage(format!(
                    "sample holds {} distinct symbols but the domain size is {}",
                    hist.support(),
                    a.m
                ));
            }
            (hist, path.display().to_string())
        }
        (None, Some(spec)) => {
            let pmf = spec.build()?;
            if pmf.m() > a.m {
                return usage(format!("distribution has {} symbols but the domain size is {}", pmf.m(), a.m));
            }
            let n = match a.n {
                Some(n) => n,
                None => tester_sample_size(a.m, a.epsilon, a.delta, a.constant)?,
            };
            (sample_histogram(&pmf, n, SampleSeed::new(a.seed, 0))?, spec.label())
        }
        (None, None) => return usage("give --sample or a distribution (--uniform, --zipf, --planted, --weights)"),
    };
    let verdict = uniformity_test(&hist, a.m, a.epsilon)?;
    let text = if a.json {
        let body = json!({
            "source": source,
            "m": a.m,
            "n": hist.n(),
            "epsilon": a.epsilon,
            "q_hat": verdict.q_hat,
            "threshold": verdict.threshold,
            "epsilon_in_range": verdict.epsilon_in_range,
            "decision": verdict.decision,
        });
        format!("{}\n", serde_json::to_string_pretty(&body).expect("json"))
    } else {
        format!(
            "{}\nq_hat     {}\nthreshold {}\nn         {}\n",
            verdict.decision,
            num(verdict.q_hat),
            num(verdict.threshold),
            hist.n()
        )
    };
    emit(out, &text)?;
    Ok(match verdict.decision {
        Decision::Uniform => EXIT_OK,
        Decision::NonUniform => EXIT_REJECT,
    })
}

fn bounds(a: BoundsArgs, out: &mut dyn Write) -> CliResult {
    let Some(spec) = a.dist.spec() else {
        return usage("give a distribution (--uniform, --zipf, --planted, --weights)");
    };
    if a.n < 1 {
        return usage("--n must be at least 1");
    }
    let pmf = spec.build()?;
    let env = TailEnvelope::new(a.envelope.c_out, a.envelope.c_sq, a.envelope.c_lin, a.envelope.c_heavy)?;
    let q = pmf.collision_probability();
    let params = SubGammaParams::for_estimator(&pmf, a.n);
    let epsilons = a
        .epsilons
        .unwrap_or_else(|| [0.05, 0.1, 0.2, 0.5, 1.0].iter().map(|r| r * q).collect());
    let table: Vec<(f64, f64)> = epsilons.iter().map(|&e| (e, env.evaluate(e, params, a.n))).collect();
    let text = if a.json {
        let body = json!({
            "distribution": spec,
            "n": a.n,
            "q": q,
            "v2": params.v2,
            "b": params.b,
            "envelope": env,
            "table": table.iter().map(|(e, v)| json!({"epsilon": e, "envelope": v})).collect::<Vec<_>>(),
        });
        format!("{}\n", serde_json::to_string_pretty(&body).expect("json"))
    } else {
        let mut s = format!(
            "{} n={}\nq  {}\nv2 {}\nb  {}\n\nepsilon envelope\n",
            spec.label(),
            a.n,
            num(q),
            num(params.v2),
            num(params.b)
        );
        for (e, v) in &table {
            s.push_str(&format!("{} {}\n", num(e), num(v)));
        }
        s
    };
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn moment_table(a: MomentArgs, out: &mut dyn Write) -> CliResult {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure::Internal(e.to_string());
    writer.write_record(["n", "p", "d", "exact", "bound", "ratio"]).map_err(csv_err)?;
    for &n in &a.n {
        for &p in &a.p {
            for &d in &a.d {
                let (exact, bound) = match a.kind {
                    MomentKind::Symm => (symm_diff_moment_exact(n, p, d)?, symm_diff_moment_bound(n, p, d, a.c)?),
                    MomentKind::Bin => (bin_moment_exact(n, p, d)?, bin_moment_bound(n, p, d, a.c1, a.c2)?),
                };
                let ratio = if bound > 0.0 { exact / bound } else { 0.0 };
                writer
                    .write_record([n.to_string(), num(p), d.to_string(), num(exact), num(bound), num(ratio)])
                    .map_err(csv_err)?;
            }
        }
    }
    let bytes = writer.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    match a.out {
        Some(path) => std::fs::write(&path, bytes)
            .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))?,
        None => emit(out, &String::from_utf8(bytes).expect("utf-8"))?,
    }
    Ok(EXIT_OK)
}

fn load_config(a: &ExperimentArgs) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(&a.config)
        .or_else(|e| usage(format!("cannot read {}: {e}", a.config.display())))?;
    let mut cfg: ExperimentConfig =
        serde_json::from_str(&text).or_else(|e| usage(format!("{}: {e}", a.config.display())))?;
    if let Some(out) = &a.out {
        cfg.out = Some(out.clone());
    }
    if a.workers.is_some() {
        cfg.workers = a.workers;
    }
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = a.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn experiment(a: ExperimentArgs, required: Option<ExperimentKind>, out: &mut dyn Write) -> CliResult {
    let cfg = load_config(&a)?;
    if let Some(kind) = required {
        if cfg.kind != kind {
            return usage(format!("expected a {} config, got kind {}", kind.as_str(), cfg.kind.as_str()));
        }
    }
    let report: TrialReport = run_experiment(&cfg)?;
    if let Some(path) = &cfg.out {
        report.write(path)?;
    }
    let text = if a.json { format!("{}\n", report.to_json()?) } else { report.summary() };
    emit(out, &text)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_REJECT })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("collision").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bounds_uniform_ten() {
        let (code, out, _) = run_capture(&["bounds", "--uniform", "10", "--n", "100", "--json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["v2"].as_f64().unwrap() - 1.1e-4).abs() < 1e-18);
        assert!((v["b"].as_f64().unwrap() - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn human_numbers_match_json() {
        let (_, human, _) = run_capture(&["bounds", "--uniform", "10", "--n", "100"]);
        let (_, json, _) = run_capture(&["bounds", "--uniform", "10", "--n", "100", "--json"]);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["v2", "b", "q"] {
            let printed = v[key].to_string();
            assert!(human.contains(&printed), "{key}: {printed} not in {human}");
        }
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_capture(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bounds", "--n", "10"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bounds", "--uniform", "3", "--zipf", "3", "--s", "1", "--n", "4"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["test-uniformity", "--m", "4", "--epsilon", "0.2"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["estimate", "/definitely/not/here"]).0, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("test-uniformity"));
    }

    #[test]
    fn moment_table_csv_header() {
        let (code, out, _) = run_capture(&["moment-table", "--n", "3", "--p", "0.5", "--d", "2,4"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("n,p,d,exact,bound,ratio"));
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn odd_moment_order_is_a_usage_error() {
        let (code, _, err) = run_capture(&["moment-table", "--n", "3", "--p", "0.5", "--d", "3"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }
}
