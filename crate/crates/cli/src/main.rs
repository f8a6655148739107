//! Command-line front end for the heavymean estimators and experiments.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use heavymean::data::PointSet;
use heavymean::harness::{
    emit_report, exponent_fit, privacy_audit, run_trials, sample_complexity_search, write_csv, write_jsonl,
    AuditMechanism, DistributionRef, ExperimentConfig, ReportFormat, SearchOptions, SuccessSummary,
};
use heavymean::mechanisms::PrivacyBudget;
use heavymean::moments::{two_point_hard_instance, MomentModel};
use heavymean::multivariate_pure::{PureHighDimMean, DEFAULT_GRID_CAP};
use heavymean::multivariate_zcdp::HighDimMean;
use heavymean::rng::seeded;
use heavymean::univariate::UnivariateMean;
use heavymean::{Error, SampleCheck};

const EXIT_CONFIG: u8 = 2;
const EXIT_ASSERT: u8 = 3;

#[derive(Parser)]
#[command(name = "heavymean", version, about = "Private mean estimation for heavy-tailed data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a univariate mean from one real per line.
    #[command(name = "estimate-1d")]
    Estimate1d(Estimate1d),
    /// Estimate a d-dimensional mean under zCDP or (ε, δ)-DP.
    EstimateHd(EstimateHd),
    /// Estimate a d-dimensional mean under pure DP (small d only).
    EstimateHdPure(EstimateHdPure),
    /// Run Monte-Carlo trials from a config file.
    Simulate(Simulate),
    /// Search for the empirical sample complexity of a config.
    Complexity(Complexity),
    /// Frequency-ratio audit of a built-in mechanism.
    Audit(Audit),
}

#[derive(Clone, Copy, ValueEnum)]
enum Flavor {
    Pure,
    Zcdp,
    Approx,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, value_enum)]
    flavor: Flavor,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
}

impl BudgetArgs {
    fn budget(&self) -> Result<PrivacyBudget, Error> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Config(format!("--{name} is required for this flavor")))
        };
        match self.flavor {
            Flavor::Pure => PrivacyBudget::pure(need(self.eps, "eps")?),
            Flavor::Zcdp => PrivacyBudget::zcdp(need(self.rho, "rho")?),
            Flavor::Approx => PrivacyBudget::approx(need(self.eps, "eps")?, need(self.delta, "delta")?),
        }
        .map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    k: f64,
    /// Bound R on the norm of the mean.
    #[arg(long = "range")]
    range: f64,
    #[arg(long, default_value_t = 1.0)]
    moment_bound: f64,
}

impl ModelArgs {
    fn model(&self) -> Result<MomentModel, Error> {
        MomentModel::new(self.k, self.moment_bound, self.range).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Args)]
struct Estimate1d {
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    /// Input file, or - for stdin.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, env = "HEAVYMEAN_SEED", default_value_t = 0)]
    seed: u64,
    /// Run even when the input is below the sample bound.
    #[arg(long)]
    no_sample_check: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum HdFlavor {
    Zcdp,
    Approx,
}

#[derive(Args)]
struct EstimateHd {
    #[arg(long, value_enum)]
    flavor: HdFlavor,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    dim: usize,
    /// Input file with d comma-separated reals per line, or - for stdin.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, env = "HEAVYMEAN_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    no_sample_check: bool,
}

#[derive(Args)]
struct EstimateHdPure {
    #[arg(long)]
    eps: f64,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, env = "HEAVYMEAN_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_GRID_CAP)]
    grid_cap: usize,
    #[arg(long)]
    no_sample_check: bool,
}

#[derive(Args)]
struct Simulate {
    #[arg(long)]
    config: PathBuf,
    /// Output file; records go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with status 3 when the success rate is below target − 0.05.
    #[arg(long)]
    assert: bool,
}

#[derive(Args)]
struct Complexity {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 1.3)]
    factor: f64,
    #[arg(long)]
    start: Option<usize>,
    #[arg(long, default_value_t = 1 << 30)]
    cap: usize,
    /// Geometric sub-steps used to re-search the final bracket.
    #[arg(long, default_value_t = 1)]
    refine: u32,
    /// Comma-separated accuracies to sweep; the config's α is used if absent.
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    /// Replace the distribution by the two-point hard instance at each α.
    #[arg(long)]
    hard_instance: bool,
}

#[derive(Args)]
struct Audit {
    #[arg(long)]
    mechanism: String,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1_000_000)]
    draws: usize,
    #[arg(long, env = "HEAVYMEAN_SEED", default_value_t = 0)]
    seed: u64,
    /// Exit with status 3 when a violation is flagged.
    #[arg(long)]
    assert: bool,
}

fn open_input(path: &Path) -> anyhow::Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        return Ok(Box::new(std::io::Cursor::new(buf)));
    }
    let file = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(Box::new(BufReader::new(file)))
}

/// Rows of comma-separated reals; blank lines and `#` comments are skipped.
fn read_rows(path: &Path, dim: usize) -> anyhow::Result<Vec<f64>> {
    let mut values = Vec::new();
    for (lineno, line) in open_input(path)?.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        if row.len() != dim {
            return Err(Error::Config(format!("line {}: expected {dim} values, got {}", lineno + 1, row.len())).into());
        }
        values.extend(row);
    }
    Ok(values)
}

fn check_mode(skip: bool) -> SampleCheck {
    if skip {
        SampleCheck::Skip
    } else {
        SampleCheck::Enforce
    }
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn load_config(path: &Path) -> anyhow::Result<ExperimentConfig> {
    ExperimentConfig::load(path).map_err(|e| match e {
        Error::Io(msg) => Error::Config(format!("{}: {msg}", path.display())).into(),
        other => other.into(),
    })
}

fn estimate_1d(args: Estimate1d) -> anyhow::Result<ExitCode> {
    let data = read_rows(&args.input, 1)?;
    let est = UnivariateMean::new(args.budget.budget()?, args.alpha, args.beta, args.model.model()?)
        .map_err(|e| Error::Config(e.to_string()))?
        .with_check(check_mode(args.no_sample_check))
        .estimate(&data, &mut seeded(args.seed))?;
    print_json(&serde_json::json!({
        "mean": est.mean,
        "samples": data.len(),
        "group_size": est.group_size,
        "discarded": est.discarded,
        "budget": est.ledger.total()?,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn estimate_hd(args: EstimateHd) -> anyhow::Result<ExitCode> {
    let budget = BudgetArgs {
        flavor: match args.flavor {
            HdFlavor::Zcdp => Flavor::Zcdp,
            HdFlavor::Approx => Flavor::Approx,
        },
        eps: args.eps,
        delta: args.delta,
        rho: args.rho,
    }
    .budget()?;
    let data = PointSet::new(args.dim, read_rows(&args.input, args.dim)?)?;
    let est = HighDimMean::new(budget, args.alpha, args.model.model()?)
        .map_err(|e| Error::Config(e.to_string()))?
        .with_check(check_mode(args.no_sample_check))
        .estimate(&data, &mut seeded(args.seed))?;
    print_json(&serde_json::json!({
        "mean": est.mean,
        "samples": data.len(),
        "fallback": est.fallback,
        "kept": est.kept,
        "budget": est.ledger.total()?,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn estimate_hd_pure(args: EstimateHdPure) -> anyhow::Result<ExitCode> {
    let data = PointSet::new(args.dim, read_rows(&args.input, args.dim)?)?;
    let est = PureHighDimMean::new(args.eps, args.alpha, args.beta, args.model.model()?)
        .map_err(|e| Error::Config(e.to_string()))?
        .with_grid_cap(args.grid_cap)
        .with_check(check_mode(args.no_sample_check))
        .estimate(&data, &mut seeded(args.seed))?;
    print_json(&serde_json::json!({
        "mean": est.mean,
        "samples": data.len(),
        "grid_size": est.grid_size,
        "budget": est.ledger.total()?,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn simulate(args: Simulate) -> anyhow::Result<ExitCode> {
    let format: ReportFormat = args.format.parse()?;
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let records = run_trials(&config)?;
    match &args.out {
        Some(path) => emit_report(&records, format, path)?,
        None => {
            let out = std::io::stdout().lock();
            match format {
                ReportFormat::Csv => write_csv(&records, out)?,
                ReportFormat::Jsonl => write_jsonl(&records, out)?,
            }
        }
    }
    let summary = SuccessSummary::from_records(&records);
    let required = config.target_probability() - 0.05;
    eprintln!(
        "success {}/{} = {:.3} (95% CI [{:.3}, {:.3}]), required {:.3}",
        summary.successes, summary.trials, summary.rate, summary.ci_low, summary.ci_high, required
    );
    if args.assert && summary.rate < required {
        return Ok(ExitCode::from(EXIT_ASSERT));
    }
    Ok(ExitCode::SUCCESS)
}

fn complexity(args: Complexity) -> anyhow::Result<ExitCode> {
    let base = load_config(&args.config)?;
    let options = SearchOptions {
        factor: args.factor,
        start: args.start,
        cap: args.cap,
        refine: args.refine,
        ..Default::default()
    };
    let alphas = if args.alphas.is_empty() { vec![base.alpha] } else { args.alphas.clone() };
    let mut results = Vec::new();
    let mut pairs = Vec::new();
    for alpha in alphas {
        let mut config = ExperimentConfig { alpha, ..base.clone() };
        if args.hard_instance {
            let (_, hard) = two_point_hard_instance(alpha, config.model.k).map_err(|e| Error::Config(e.to_string()))?;
            config.distribution = DistributionRef::Inline(hard);
        }
        let res = sample_complexity_search(&config, &options)?;
        pairs.push((alpha, res.n_star));
        results.push(serde_json::json!({ "alpha": alpha, "n_star": res.n_star, "grid": res.grid }));
    }
    let fit = if pairs.len() >= 4 { exponent_fit(base.model.k, &pairs).ok() } else { None };
    print_json(&serde_json::json!({ "searches": results, "fit": fit }))?;
    Ok(ExitCode::SUCCESS)
}

fn audit(args: Audit) -> anyhow::Result<ExitCode> {
    let mechanism: AuditMechanism = args.mechanism.parse()?;
    let report = privacy_audit(mechanism, args.eps, args.draws, args.seed).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(w) = &report.power_warning {
        eprintln!("warning: {w}");
    }
    print_json(&serde_json::to_value(&report)?)?;
    if args.assert && report.violation {
        return Ok(ExitCode::from(EXIT_ASSERT));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate1d(a) => estimate_1d(a),
        Command::EstimateHd(a) => estimate_hd(a),
        Command::EstimateHdPure(a) => estimate_hd_pure(a),
        Command::Simulate(a) => simulate(a),
        Command::Complexity(a) => complexity(a),
        Command::Audit(a) => audit(a),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>() {
                Some(e) if e.is_config() => ExitCode::from(EXIT_CONFIG),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
