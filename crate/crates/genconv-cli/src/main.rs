//! `genconv`: evaluate modified Stieltjes transforms, compute generalized
//! convolutions, run the samplers, and execute the verification suite.
//!
//! Exit codes: 0 success, 1 verification checks failed, 2 input error,
//! 3 numeric failure.

use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use genconv::measures::{moments_of, DiscreteMeasure, MixtureMeasure, MomentSequence};
use genconv::report;
use genconv::sampler;
use genconv::transform;
use genconv::{DirichletParams, ErrorKind};

#[derive(Parser)]
#[command(
    name = "genconv",
    version,
    about = "Modified Stieltjes transforms and the generalized convolutions they induce"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate R_gamma(u; mu) over a u grid
    Transform(TransformArgs),
    /// Convolve two discrete measures (star_n or the non-commutative pair)
    Convolve(ConvolveArgs),
    /// Moments of the k-tuple Dirichlet convolution of discrete measures
    Ktuple(KtupleArgs),
    /// Draw seeded Monte Carlo samples
    Sample(SampleArgs),
    /// Run the verification suite and emit a JSON report
    Verify(VerifyArgs),
    /// Residuals of the Fourier (gamma -> inf) and log (gamma -> 0) limits
    Limits(LimitsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

/// Flags shared by every subcommand; a JSON config file may supply any
/// value, and explicit flags override the file.
#[derive(Args)]
struct CommonArgs {
    /// Optional JSON config file; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    /// Measure description file (JSON)
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Transform index gamma > 0
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    u_min: Option<f64>,
    #[arg(long)]
    u_max: Option<f64>,
    #[arg(long)]
    u_count: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ConvolveArgs {
    /// First measure file (must be discrete)
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Second measure file (must be discrete)
    #[arg(long)]
    measure2: Option<PathBuf>,
    /// Symmetric convolution index n > 0 (star_n)
    #[arg(long, conflicts_with = "alphas")]
    n: Option<f64>,
    /// Two shape parameters a1,a2 for the non-commutative pair convolution
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Emit the moment table of the convolution up to this order instead of
    /// the measure itself
    #[arg(long)]
    moments: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct KtupleArgs {
    /// Measure files, one per slot (repeat the flag; all must be discrete)
    #[arg(long)]
    measure: Vec<PathBuf>,
    /// Dirichlet parameters a1,...,ak
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Highest moment order to report
    #[arg(long)]
    moments: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SampleKind {
    /// Beta(a1, a2) on (0,1)
    Beta,
    /// Dirichlet weight vectors
    Dirichlet,
    /// Stochastic linear form over discrete measures
    Linear,
    /// Gamma scale mixture over a discrete mixing measure
    GammaMixture,
}

#[derive(Args)]
struct SampleArgs {
    /// What to sample
    #[arg(long, value_enum)]
    kind: Option<SampleKind>,
    /// Shape / Dirichlet parameters, comma separated
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Measure files (linear: one per slot; gamma-mixture: the mixing measure)
    #[arg(long)]
    measure: Vec<PathBuf>,
    /// Gamma shape for the gamma mixture
    #[arg(long)]
    gamma: Option<f64>,
    /// Number of draws
    #[arg(long)]
    samples: Option<usize>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run the bundled default suite (also the behavior with no flags)
    #[arg(long, default_value_t = true)]
    default: bool,
    /// Suite seed
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct LimitsArgs {
    /// Measure description file (JSON)
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Gamma ladder, comma separated (default 1e1,1e2,1e3,1e4,1e5)
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    #[arg(long)]
    u_min: Option<f64>,
    #[arg(long)]
    u_max: Option<f64>,
    #[arg(long)]
    u_count: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Optional JSON config file mirroring the flags; explicit flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    measure: Option<PathBuf>,
    measure2: Option<PathBuf>,
    measures: Option<Vec<PathBuf>>,
    gamma: Option<f64>,
    n: Option<f64>,
    alphas: Option<Vec<f64>>,
    u_min: Option<f64>,
    u_max: Option<f64>,
    u_count: Option<usize>,
    moments: Option<usize>,
    seed: Option<u64>,
    samples: Option<usize>,
    gammas: Option<Vec<f64>>,
    kind: Option<String>,
    format: Option<String>,
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Numeric(String),
    ChecksFailed,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "{m}"),
            CliError::ChecksFailed => write!(f, "one or more verification checks failed"),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::ChecksFailed => 1,
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<genconv::Error> for CliError {
    fn from(e: genconv::Error) -> Self {
        match e.kind() {
            ErrorKind::Input => CliError::Input(e.to_string()),
            ErrorKind::Numeric => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(format!("i/o error: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::ChecksFailed) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Transform(args) => cmd_transform(args),
        Command::Convolve(args) => cmd_convolve(args),
        Command::Ktuple(args) => cmd_ktuple(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Limits(args) => cmd_limits(args),
    }
}

// ---------------------------------------------------------------------------
// Config / io helpers
// ---------------------------------------------------------------------------

fn load_config(path: &Option<PathBuf>) -> CliResult<ConfigFile> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("config {}: {e}", p.display())))
        }
    }
}

fn load_measure(path: &Path) -> CliResult<MixtureMeasure> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read measure {}: {e}", path.display())))?;
    MixtureMeasure::from_json(&text)
        .map_err(|e| CliError::Input(format!("measure {}: {e}", path.display())))
}

fn load_discrete(path: &Path) -> CliResult<DiscreteMeasure> {
    load_measure(path)?.as_discrete().ok_or_else(|| {
        CliError::Input(format!(
            "measure {} has continuous components; this command needs a discrete measure",
            path.display()
        ))
    })
}

fn require<T>(flag: Option<T>, name: &str) -> CliResult<T> {
    flag.ok_or_else(|| CliError::Input(format!("missing required value: {name}")))
}

fn resolve_format(
    flag: Option<OutputFormat>,
    cfg: &ConfigFile,
    default: OutputFormat,
) -> CliResult<OutputFormat> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match cfg.format.as_deref() {
        None => Ok(default),
        Some("json") => Ok(OutputFormat::Json),
        Some("csv") => Ok(OutputFormat::Csv),
        Some(other) => Err(CliError::Input(format!("unknown format {other:?}"))),
    }
}

fn u_grid(min: f64, max: f64, count: usize) -> CliResult<Vec<f64>> {
    if count == 0 {
        return Err(CliError::Input("u-count must be at least 1".into()));
    }
    if !(min <= max) {
        return Err(CliError::Input(format!(
            "u-min {min} must not exceed u-max {max}"
        )));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count).map(|i| min + step * i as f64).collect())
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        None => {
            print!("{text}");
            std::io::stdout().flush()?;
            Ok(())
        }
        Some(p) => {
            fs::write(p, text)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?;
            Ok(())
        }
    }
}

/// 17 significant digits: round-trip exact for f64.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn moment_table(format: OutputFormat, moments: &MomentSequence) -> String {
    match format {
        OutputFormat::Csv => {
            let mut s = String::from("m,kappa\n");
            for (m, v) in moments.values().iter().enumerate() {
                s.push_str(&format!("{m},{}\n", fmt17(*v)));
            }
            s
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = moments
                .values()
                .iter()
                .enumerate()
                .map(|(m, v)| serde_json::json!({"m": m, "kappa": v}))
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
            s.push('\n');
            s
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_transform(args: TransformArgs) -> CliResult<()> {
    let cfg = load_config(&args.common.config)?;
    let measure_path = require(args.measure.or(cfg.measure.clone()), "--measure")?;
    let gamma = require(args.gamma.or(cfg.gamma), "--gamma")?;
    let u_min = require(args.u_min.or(cfg.u_min), "--u-min")?;
    let u_max = require(args.u_max.or(cfg.u_max), "--u-max")?;
    let u_count = require(args.u_count.or(cfg.u_count), "--u-count")?;
    let format = resolve_format(args.common.format, &cfg, OutputFormat::Csv)?;
    let out = args.common.out.or(cfg.out);

    let measure = load_measure(&measure_path)?;
    let us = u_grid(u_min, u_max, u_count)?;
    let grid = transform::evaluate_grid(&measure, gamma, &us)?;

    let text = match format {
        OutputFormat::Csv => {
            let mut s = String::from("u,re,im\n");
            for (u, v) in grid.u_values.iter().zip(&grid.values) {
                s.push_str(&format!("{},{},{}\n", fmt17(*u), fmt17(v.re), fmt17(v.im)));
            }
            s
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = grid
                .u_values
                .iter()
                .zip(&grid.values)
                .map(|(u, v)| serde_json::json!({"u": u, "re": v.re, "im": v.im}))
                .collect();
            let doc = serde_json::json!({"gamma": grid.gamma, "rows": rows});
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
    };
    emit(&out, &text)
}

fn cmd_convolve(args: ConvolveArgs) -> CliResult<()> {
    let cfg = load_config(&args.common.config)?;
    let m1_path = require(args.measure.or(cfg.measure.clone()), "--measure")?;
    let m2_path = require(args.measure2.or(cfg.measure2.clone()), "--measure2")?;
    let moments = args.moments.or(cfg.moments);
    let format = resolve_format(args.common.format, &cfg, OutputFormat::Json)?;
    let out = args.common.out.or(cfg.out.clone());

    let m1 = load_discrete(&m1_path)?;
    let m2 = load_discrete(&m2_path)?;

    let nu = match (args.n.or(cfg.n), args.alphas.or(cfg.alphas.clone())) {
        (Some(n), None) => genconv::convolve::star_n(&m1, &m2, n)?,
        (None, Some(alphas)) => {
            if alphas.len() != 2 {
                return Err(CliError::Input(format!(
                    "the pair convolution needs exactly two shape parameters, got {}",
                    alphas.len()
                )));
            }
            genconv::convolve::pair_conv_noncommutative(&m1, &m2, alphas[0], alphas[1])?
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Input("--n and --alphas are mutually exclusive".into()))
        }
        (None, None) => return Err(CliError::Input("need --n or --alphas".into())),
    };

    match moments {
        None => {
            let mut text = nu.to_json();
            text.push('\n');
            emit(&out, &text)
        }
        Some(max_order) => {
            let k = moments_of(&nu, max_order)?;
            emit(&out, &moment_table(format, &k))
        }
    }
}

fn cmd_ktuple(args: KtupleArgs) -> CliResult<()> {
    let cfg = load_config(&args.common.config)?;
    let paths = if args.measure.is_empty() {
        cfg.measures.clone().unwrap_or_default()
    } else {
        args.measure
    };
    if paths.len() < 2 {
        return Err(CliError::Input(
            "ktuple needs at least two --measure files".into(),
        ));
    }
    let alphas = require(args.alphas.or(cfg.alphas.clone()), "--alphas")?;
    let max_order = args.moments.or(cfg.moments).unwrap_or(10);
    let format = resolve_format(args.common.format, &cfg, OutputFormat::Csv)?;
    let out = args.common.out.or(cfg.out.clone());

    let params = DirichletParams::new(alphas).map_err(CliError::from)?;
    let mus: Vec<DiscreteMeasure> = paths
        .iter()
        .map(|p| load_discrete(p))
        .collect::<CliResult<_>>()?;
    let k = genconv::convolve::ktuple_conv_measure(&mus, &params, max_order)?;
    emit(&out, &moment_table(format, &k))
}

fn cmd_sample(args: SampleArgs) -> CliResult<()> {
    let cfg = load_config(&args.common.config)?;
    let kind = match (args.kind, cfg.kind.as_deref()) {
        (Some(k), _) => k,
        (None, Some("beta")) => SampleKind::Beta,
        (None, Some("dirichlet")) => SampleKind::Dirichlet,
        (None, Some("linear")) => SampleKind::Linear,
        (None, Some("gamma-mixture")) => SampleKind::GammaMixture,
        (None, Some(other)) => {
            return Err(CliError::Input(format!("unknown sample kind {other:?}")))
        }
        (None, None) => return Err(CliError::Input("missing required value: --kind".into())),
    };
    let count = require(args.samples.or(cfg.samples), "--samples")?;
    let seed = args.seed.or(cfg.seed).unwrap_or(report::DEFAULT_SEED);
    let format = resolve_format(args.common.format, &cfg, OutputFormat::Csv)?;
    let out = args.common.out.or(cfg.out.clone());
    let alphas = args.alphas.or(cfg.alphas.clone());
    let measures = if args.measure.is_empty() {
        cfg.measures.clone().unwrap_or_else(|| {
            cfg.measure.clone().map(|m| vec![m]).unwrap_or_default()
        })
    } else {
        args.measure
    };

    let (batch, params_desc) = match kind {
        SampleKind::Beta => {
            let a = require(alphas, "--alphas")?;
            if a.len() != 2 {
                return Err(CliError::Input("beta sampling needs --alphas a,b".into()));
            }
            let batch = sampler::sample_beta(a[0], a[1], count, seed)?;
            (batch, format!("beta(alpha={},beta={})", a[0], a[1]))
        }
        SampleKind::Dirichlet => {
            let a = require(alphas, "--alphas")?;
            let params = DirichletParams::new(a.clone()).map_err(CliError::from)?;
            let draws = sampler::sample_dirichlet(&params, count, seed)?;
            return emit_dirichlet(&out, format, &draws, seed, &a);
        }
        SampleKind::Linear => {
            let a = require(alphas, "--alphas")?;
            let params = DirichletParams::new(a.clone()).map_err(CliError::from)?;
            if measures.len() != params.k() {
                return Err(CliError::Input(format!(
                    "linear form needs {} --measure files, got {}",
                    params.k(),
                    measures.len()
                )));
            }
            let mus: Vec<DiscreteMeasure> = measures
                .iter()
                .map(|p| load_discrete(p))
                .collect::<CliResult<_>>()?;
            let batch = sampler::sample_linear_form(&mus, &params, count, seed)?;
            (batch, format!("linear-form(alphas={a:?},k={})", params.k()))
        }
        SampleKind::GammaMixture => {
            let gamma = require(args.gamma.or(cfg.gamma), "--gamma")?;
            if measures.len() != 1 {
                return Err(CliError::Input(
                    "gamma-mixture needs exactly one --measure (the mixing measure)".into(),
                ));
            }
            let mixing = load_discrete(&measures[0])?;
            let batch = sampler::sample_gamma_mixture(&mixing, gamma, count, seed)?;
            (batch, format!("gamma-mixture(gamma={gamma})"))
        }
    };

    match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            batch.write_csv(&mut buf, &params_desc)?;
            emit(&out, &String::from_utf8(buf).expect("csv is utf-8"))
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "generator_id": batch.generator_id,
                "seed": batch.seed,
                "params": params_desc,
                "values": batch.values,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            emit(&out, &s)
        }
    }
}

fn emit_dirichlet(
    out: &Option<PathBuf>,
    format: OutputFormat,
    draws: &[Vec<f64>],
    seed: u64,
    alphas: &[f64],
) -> CliResult<()> {
    match format {
        OutputFormat::Csv => {
            let k = alphas.len();
            let mut s = format!(
                "# generator={} seed={seed} params=dirichlet(alphas={alphas:?}) count={}\n",
                sampler::GENERATOR_ID,
                draws.len()
            );
            s.push_str(
                &(1..=k)
                    .map(|j| format!("x{j}"))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            s.push('\n');
            for v in draws {
                s.push_str(&v.iter().map(|x| fmt17(*x)).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            emit(out, &s)
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({
                "generator_id": sampler::GENERATOR_ID,
                "seed": seed,
                "params": format!("dirichlet(alphas={alphas:?})"),
                "values": draws,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            emit(out, &s)
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    let cfg = load_config(&args.common.config)?;
    let seed = args.seed.or(cfg.seed).unwrap_or(report::DEFAULT_SEED);
    let out = args.common.out.or(cfg.out.clone());

    let rep = report::run_default_suite(seed)?;

    let use_color =
        std::env::var_os("NO_COLOR").is_none() && std::io::stderr().is_terminal();
    for c in &rep.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        let tag = if use_color {
            let color = if c.passed { "\x1b[32m" } else { "\x1b[31m" };
            format!("{color}{tag}\x1b[0m")
        } else {
            tag.to_string()
        };
        let cmp = match c.mode {
            report::CheckMode::AtMost => "<=",
            report::CheckMode::AtLeast => ">=",
        };
        eprintln!(
            "{tag} {name}: {err:.3e} {cmp} {tol:.3e}",
            name = c.name,
            err = c.max_error,
            tol = c.tolerance
        );
    }
    eprintln!(
        "{} of {} checks passed",
        rep.checks.iter().filter(|c| c.passed).count(),
        rep.checks.len()
    );

    let mut text = serde_json::to_string_pretty(&rep).expect("serializable");
    text.push('\n');
    emit(&out, &text)?;

    if rep.all_passed {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}

fn cmd_limits(args: LimitsArgs) -> CliResult<()> {
    let cfg = load_config(&args.common.config)?;
    let measure_path = require(args.measure.or(cfg.measure.clone()), "--measure")?;
    let u_min = require(args.u_min.or(cfg.u_min), "--u-min")?;
    let u_max = require(args.u_max.or(cfg.u_max), "--u-max")?;
    let u_count = require(args.u_count.or(cfg.u_count), "--u-count")?;
    let gammas = args
        .gammas
        .or(cfg.gammas.clone())
        .unwrap_or_else(|| vec![1e1, 1e2, 1e3, 1e4, 1e5]);
    let format = resolve_format(args.common.format, &cfg, OutputFormat::Csv)?;
    let out = args.common.out.or(cfg.out.clone());

    for &g in &gammas {
        if !(g > 0.0) {
            return Err(CliError::Input(format!("gamma ladder value {g} invalid")));
        }
    }
    let measure = load_measure(&measure_path)?;
    let us = u_grid(u_min, u_max, u_count)?;

    // One ladder value g serves both limits: the Fourier residual is taken
    // at gamma = g, the log-limit residual at gamma = 1/g, so both columns
    // shrink as g grows.
    let mut rows = Vec::new();
    for &g in &gammas {
        for &u in &us {
            let fourier = transform::fourier_limit_residual(&measure, g, u)?;
            let log = transform::log_limit_residual(&measure, 1.0 / g, u)?;
            rows.push((g, u, fourier, log));
        }
    }

    let text = match format {
        OutputFormat::Csv => {
            let mut s = String::from("gamma,u,fourier_residual,log_residual\n");
            for (g, u, f, l) in &rows {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt17(*g),
                    fmt17(*u),
                    fmt17(*f),
                    fmt17(*l)
                ));
            }
            s
        }
        OutputFormat::Json => {
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .map(|(g, u, f, l)| {
                    serde_json::json!({
                        "gamma": g, "u": u, "fourier_residual": f, "log_residual": l
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
            s.push('\n');
            s
        }
    };
    emit(&out, &text)
}
