//! The `znmf` command line: `inspect`, `factorize`, `evaluate`, `sweep`.
//!
//! Data goes to files (and summaries to stdout); diagnostics go to stderr.
//! Every output file starts with `#` comment lines that echo the resolved
//! configuration, so a run can be repeated from its own output.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use znmf_core::factorize::{self, FactorizationConfig, DEFAULT_MAX_ITERS, DEFAULT_REL_TOL};
use znmf_core::features::DEFAULT_FEATURE_ITERS;
use znmf_core::{DenseMatrix, PenaltyKind};

use crate::dataset::{load_orl, LabeledDataset, SyntheticSpec};
use crate::experiment::{
    aggregate_csv, point_descriptors, run_descriptors, run_sweep, write_csv, AlphaBetaRegime, RecognitionReport,
    RunSettings, SweepConfig,
};
use crate::matrix_io;

/// Ranks used when `sweep` is given no `--ranks`.
pub const DEFAULT_RANKS: [usize; 7] = [16, 25, 36, 49, 64, 81, 100];

#[derive(Debug, Parser)]
#[command(
    name = "znmf",
    version,
    about = "Nonnegative matrix factorization with CNMF and Zellner (ZNMF) penalties"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print dataset dimensions, class counts and value range.
    Inspect(InspectArgs),
    /// Factorize a whole data matrix and write W, H and the objective trace.
    Factorize(FactorizeArgs),
    /// Replicated recognition runs at one parameter point.
    Evaluate(EvaluateArgs),
    /// Replicated recognition runs over a rank/alpha/g grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Root of the ORL tree (s1/1.pgm … s40/10.pgm).
    #[arg(long, value_name = "PATH")]
    pub orl_dir: Option<PathBuf>,
    /// Synthetic parts data: classes=C,p=P,n-per-class=N,noise=X[,seed=S].
    #[arg(long, value_name = "SPEC")]
    pub synthetic: Option<SyntheticSpec>,
    /// Unlabeled nonnegative matrix in CSV form (inspect and factorize only).
    #[arg(long, value_name = "PATH")]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Block-averaging factor applied to ORL images.
    #[arg(long, default_value_t = 4)]
    pub factor: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    None,
    Cnmf,
    Znmf,
}

impl From<KindArg> for PenaltyKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::None => PenaltyKind::None,
            KindArg::Cnmf => PenaltyKind::Frobenius,
            KindArg::Znmf => PenaltyKind::Zellner,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Equal,
    Complement,
}

impl From<RegimeArg> for AlphaBetaRegime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Equal => AlphaBetaRegime::Equal,
            RegimeArg::Complement => AlphaBetaRegime::Complement,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "none")]
    pub kind: KindArg,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Defaults to --alpha.
    #[arg(long)]
    pub beta: Option<f64>,
    /// ZNMF prior scale; defaults to max(n, p²).
    #[arg(long)]
    pub g: Option<f64>,
    /// Output directory for W.csv, H.csv and trace.csv.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 5)]
    pub per_class_train: usize,
    #[arg(long, default_value_t = DEFAULT_FEATURE_ITERS)]
    pub feature_iters: usize,
    /// Worker threads; output does not depend on this.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Detail CSV path; the aggregate goes to <stem>_summary.<ext> beside it.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Defaults to --alpha.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub replications: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma list or start:stop:step range [default: 16,25,36,49,64,81,100].
    #[arg(long)]
    pub ranks: Option<String>,
    /// Comma list or start:stop:step range.
    #[arg(long, default_value = "0:1:0.05")]
    pub alphas: String,
    #[arg(long, value_enum, default_value = "equal")]
    pub regime: RegimeArg,
    /// ZNMF g values, comma list or range; omitted means max(n, p²).
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub replications: usize,
}

/// Parses `a,b,c`, `start:stop:step`, or a mix of both.
///
/// Ranges include `stop` whenever `step` divides the span (up to rounding);
/// values are rounded to 12 decimals so `0.4:0.6:0.05` yields exactly
/// `0.4, 0.45, 0.5, 0.55, 0.6`.
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [single] => out.push(single.parse().with_context(|| format!("bad number {single:?}"))?),
            [start, stop, step] => {
                let start: f64 = start.parse().with_context(|| format!("bad range start in {part:?}"))?;
                let stop: f64 = stop.parse().with_context(|| format!("bad range stop in {part:?}"))?;
                let step: f64 = step.parse().with_context(|| format!("bad range step in {part:?}"))?;
                ensure!(
                    step > 0.0 && step.is_finite(),
                    "range step must be positive in {part:?}"
                );
                ensure!(stop >= start, "range stop below start in {part:?}");
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                out.extend((0..count).map(|i| round12(start + i as f64 * step)));
            }
            _ => bail!("expected a number or start:stop:step, got {part:?}"),
        }
    }
    ensure!(!out.is_empty(), "empty value list {spec:?}");
    Ok(out)
}

fn round12(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

pub fn parse_ranks(spec: &str) -> Result<Vec<usize>> {
    parse_values(spec)?
        .into_iter()
        .map(|v| {
            ensure!(v >= 1.0 && v.fract() == 0.0, "rank {v} is not a positive integer");
            Ok(v as usize)
        })
        .collect()
}

enum Loaded {
    Labeled(LabeledDataset),
    Unlabeled(DenseMatrix),
}

impl Loaded {
    fn matrix(&self) -> &DenseMatrix {
        match self {
            Loaded::Labeled(ds) => ds.x(),
            Loaded::Unlabeled(x) => x,
        }
    }
}

impl DatasetArgs {
    fn describe(&self) -> String {
        match (&self.source.orl_dir, &self.source.synthetic, &self.source.matrix) {
            (Some(dir), _, _) => format!("orl-dir={} factor={}", dir.display(), self.factor),
            (_, Some(spec), _) => format!("synthetic={spec}"),
            (_, _, Some(path)) => format!("matrix={}", path.display()),
            _ => unreachable!("clap enforces exactly one source"),
        }
    }

    fn load(&self) -> Result<Loaded> {
        match (&self.source.orl_dir, &self.source.synthetic, &self.source.matrix) {
            (Some(dir), _, _) => Ok(Loaded::Labeled(load_orl(dir, self.factor)?)),
            (_, Some(spec), _) => Ok(Loaded::Labeled(spec.generate()?)),
            (_, _, Some(path)) => {
                let x = matrix_io::read_matrix(path)?;
                ensure!(x.min() >= 0.0, "{}: matrix has negative entries", path.display());
                Ok(Loaded::Unlabeled(x))
            }
            _ => unreachable!("clap enforces exactly one source"),
        }
    }

    fn load_labeled(&self) -> Result<LabeledDataset> {
        match self.load()? {
            Loaded::Labeled(ds) => Ok(ds),
            Loaded::Unlabeled(_) => bail!("recognition runs need labels; use --orl-dir or --synthetic"),
        }
    }
}

fn fmt_g(g: Option<f64>) -> String {
    g.map_or_else(|| "none".into(), |g| g.to_string())
}

pub fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Inspect(args) => inspect(&args, out),
        Command::Factorize(args) => factorize_cmd(&args, out),
        Command::Evaluate(args) => evaluate(&args, out),
        Command::Sweep(args) => sweep(&args, out),
    }
}

fn inspect(args: &InspectArgs, out: &mut impl Write) -> Result<()> {
    let loaded = args.data.load()?;
    let x = loaded.matrix();
    match &loaded {
        Loaded::Labeled(ds) => {
            let counts = ds.class_counts();
            writeln!(out, "p={} n={} classes={}", ds.p(), ds.n(), counts.len())?;
            writeln!(out, "image={}x{}", ds.image_height(), ds.image_width())?;
            let per_class: Vec<String> = counts.iter().map(|(l, c)| format!("{l}:{c}")).collect();
            writeln!(out, "per_class {}", per_class.join(" "))?;
        }
        Loaded::Unlabeled(x) => writeln!(out, "p={} n={} classes=0", x.rows(), x.cols())?,
    }
    writeln!(out, "range=[{}, {}]", x.min(), x.max())?;
    Ok(())
}

fn factorize_cmd(args: &FactorizeArgs, out: &mut impl Write) -> Result<()> {
    let loaded = args.data.load()?;
    let x = loaded.matrix();
    let beta = args.beta.unwrap_or(args.alpha);
    let mut config = FactorizationConfig::new(args.solver.kind.into(), args.rank)
        .with_penalty(args.alpha, beta)
        .with_max_iters(args.solver.max_iters)
        .with_rel_tol(args.solver.rel_tol)
        .with_seed(args.solver.seed);
    if let Some(g) = args.g {
        config = config.with_g(g);
    }
    let g = config.resolved_g(x.rows(), x.cols());
    let result = factorize::run(x, &config)?;

    let preamble = [
        format!("znmf factorize {}", args.data.describe()),
        format!(
            "kind={} rank={} alpha={} beta={} g={} max_iters={} rel_tol={} seed={}",
            config.kind,
            config.rank,
            args.alpha,
            beta,
            fmt_g(g),
            config.max_iters,
            config.rel_tol,
            config.seed
        ),
    ];
    let header: String = preamble.iter().map(|l| format!("# {l}\n")).collect();
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_text(
        &args.out.join("W.csv"),
        &(header.clone() + &matrix_io::format_matrix(&result.w)),
    )?;
    write_text(
        &args.out.join("H.csv"),
        &(header.clone() + &matrix_io::format_matrix(&result.h)),
    )?;
    let mut trace = header + "iteration,objective\n";
    for (i, f) in result.objective_trace.iter().enumerate() {
        trace.push_str(&format!("{},{}\n", i + 1, f));
    }
    write_text(&args.out.join("trace.csv"), &trace)?;

    writeln!(
        out,
        "kind={} rank={} g={} iterations={} converged={} final_objective={:e}",
        config.kind,
        config.rank,
        fmt_g(result.g),
        result.iterations,
        result.converged,
        result.final_objective()
    )?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn settings(solver: &SolverArgs, run: &RunArgs) -> RunSettings {
    RunSettings {
        per_class_train: run.per_class_train,
        max_iters: solver.max_iters,
        rel_tol: solver.rel_tol,
        feature_iters: run.feature_iters,
    }
}

fn finish_report(report: &RecognitionReport, run: &RunArgs, preamble: &[String], out: &mut impl Write) -> Result<()> {
    let (detail, summary) = write_csv(report, &run.out, preamble)?;
    eprintln!("wrote {} and {}", detail.display(), summary.display());
    out.write_all(aggregate_csv(report, &[]).as_bytes())?;
    Ok(())
}

fn evaluate(args: &EvaluateArgs, out: &mut impl Write) -> Result<()> {
    let ds = args.data.load_labeled()?;
    let kind: PenaltyKind = args.solver.kind.into();
    ensure!(args.replications >= 1, "--replications must be at least 1");
    ensure!(
        kind == PenaltyKind::Zellner || args.g.is_none(),
        "--g only applies to --kind znmf"
    );
    let beta = args.beta.unwrap_or(args.alpha);
    let settings = settings(&args.solver, &args.run);
    let descriptors = point_descriptors(
        kind,
        args.rank,
        args.alpha,
        beta,
        args.g,
        args.replications,
        args.solver.seed,
        settings,
    );
    let g = descriptors.first().and_then(|d| crate::experiment::resolved_g(&ds, d));
    let report = run_descriptors(&ds, &descriptors, args.run.workers)?;
    let preamble = vec![
        format!("znmf evaluate {}", args.data.describe()),
        format!(
            "kind={} rank={} alpha={} beta={} g={} replications={} seed={} per_class_train={} max_iters={} rel_tol={} feature_iters={}",
            kind,
            args.rank,
            args.alpha,
            beta,
            fmt_g(g),
            args.replications,
            args.solver.seed,
            settings.per_class_train,
            settings.max_iters,
            settings.rel_tol,
            settings.feature_iters
        ),
    ];
    finish_report(&report, &args.run, &preamble, out)
}

fn sweep(args: &SweepArgs, out: &mut impl Write) -> Result<()> {
    let ds = args.data.load_labeled()?;
    let ranks = match &args.ranks {
        Some(spec) => parse_ranks(spec)?,
        None => DEFAULT_RANKS.to_vec(),
    };
    let config = SweepConfig {
        kind: args.solver.kind.into(),
        ranks,
        regime: args.regime.into(),
        alpha_values: parse_values(&args.alphas)?,
        g_values: match &args.g {
            Some(spec) => parse_values(spec)?,
            None => Vec::new(),
        },
        replications: args.replications,
        base_seed: args.solver.seed,
        settings: settings(&args.solver, &args.run),
    };
    config.validate()?;
    let report = run_sweep(&ds, &config, args.run.workers)?;
    let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
    let preamble = vec![
        format!("znmf sweep {}", args.data.describe()),
        format!(
            "kind={} ranks={} regime={} alphas={} g={} replications={} seed={} per_class_train={} max_iters={} rel_tol={} feature_iters={}",
            config.kind,
            config.ranks.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
            config.regime.as_str(),
            join(&config.alpha_values),
            if config.g_values.is_empty() { "default".into() } else { join(&config.g_values) },
            config.replications,
            config.base_seed,
            config.settings.per_class_train,
            config.settings.max_iters,
            config.settings.rel_tol,
            config.settings.feature_iters
        ),
    ];
    finish_report(&report, &args.run, &preamble, out)
}
