use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use imab_core::harness::config::{default_asymptote_range, BoundName, ExperimentConfig};
use imab_core::harness::experiment::{run_experiment, ExperimentReport, METRICS_CSV, REPORT_JSON};
use imab_core::harness::output::{to_pretty_json, write_all_atomic};
use imab_core::harness::verify::{run_default_suite, verify_corpus, verify_trace, CorpusRun, SuiteOptions};
use imab_core::{
    lower_bound_family, random_concave, regret_demo_two_arm, rr_adversarial, run, Algorithm, ImabInstance,
    LowerBoundVariant, PullTrace, SuiteVerdict, TraceSummary,
};

#[derive(Parser, Debug)]
#[command(name = "imab", version, about = "Improving multi-armed bandit experiments")]
struct Cli {
    /// Seed for random generators (overrides a config's seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write generated instances as JSON files named `<id>.json`.
    Generate {
        #[command(subcommand)]
        generator: Generator,
    },
    /// Run an experiment config and write metrics.csv and report.json.
    Run { config: PathBuf },
    /// Check bounds: the built-in suite, a config or report, or one trace.
    Verify(VerifyArgs),
    /// Simulate one algorithm on one instance and write the trace.
    Trace {
        instance: PathBuf,
        #[arg(long)]
        algorithm: Algorithm,
        #[arg(long = "T")]
        horizon: u64,
    },
}

#[derive(Subcommand, Debug)]
enum Generator {
    LowerBound {
        #[arg(long)]
        k: usize,
        #[arg(long = "T")]
        horizon: u64,
        #[arg(long, value_enum, default_value_t = Variant::HorizonSlope)]
        variant: Variant,
    },
    RrAdversarial {
        #[arg(long)]
        k: usize,
        #[arg(long = "T")]
        horizon: u64,
    },
    RegretDemo,
    Random {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_table: usize,
        #[arg(long, default_value_t = default_asymptote_range().0)]
        asymptote_min: f64,
        #[arg(long, default_value_t = default_asymptote_range().1)]
        asymptote_max: f64,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Variant {
    HorizonSlope,
    BlockSlope,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Experiment config or report.json; omit for the built-in suite.
    path: Option<PathBuf>,
    /// Trace CSV (with a `.json` sidecar) or full JSON trace.
    #[arg(long, requires = "instance", conflicts_with = "path")]
    trace: Option<PathBuf>,
    /// Instance the trace was recorded on.
    #[arg(long, requires = "trace")]
    instance: Option<PathBuf>,
    /// Arm count for the lower-bound family.
    #[arg(long, requires = "horizon")]
    k: Option<usize>,
    /// Horizon for the lower-bound family.
    #[arg(long = "T", requires = "k")]
    horizon: Option<u64>,
    /// Restrict to these bounds (repeatable).
    #[arg(long = "bound", value_parser = parse_bound)]
    bounds: Vec<BoundName>,
}

fn parse_bound(s: &str) -> Result<BoundName, String> {
    s.parse().map_err(|e: imab_core::Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` means some verification failed.
fn dispatch(cli: &Cli) -> anyhow::Result<bool> {
    let workers = cli.workers.map(|w| w as usize);
    match &cli.command {
        Command::Generate { generator } => generate(cli, generator).map(|_| true),
        Command::Run { config } => cmd_run(cli, config, workers),
        Command::Verify(args) => cmd_verify(cli, args, workers),
        Command::Trace {
            instance,
            algorithm,
            horizon,
        } => cmd_trace(cli, instance, *algorithm, *horizon).map(|_| true),
    }
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn generate(cli: &Cli, generator: &Generator) -> anyhow::Result<()> {
    let instances = match *generator {
        Generator::LowerBound { k, horizon, variant } => {
            let variant = match variant {
                Variant::HorizonSlope => LowerBoundVariant::HorizonSlope,
                Variant::BlockSlope => LowerBoundVariant::BlockSlope,
            };
            lower_bound_family(k, horizon, variant)?
        }
        Generator::RrAdversarial { k, horizon } => vec![rr_adversarial(k, horizon)?],
        Generator::RegretDemo => vec![regret_demo_two_arm()],
        Generator::Random {
            k,
            max_table,
            asymptote_min,
            asymptote_max,
        } => vec![random_concave(k, cli.seed.unwrap_or(0), max_table, (asymptote_min, asymptote_max))?],
    };
    let files = instances
        .iter()
        .map(|inst| Ok((format!("{}.json", inst.id()), format!("{}\n", inst.to_json()?).into_bytes())))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let named: Vec<(&str, Vec<u8>)> = files.iter().map(|(n, b)| (n.as_str(), b.clone())).collect();
    for p in write_all_atomic(&out_dir(cli), &named)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn print_verdicts(verdicts: &[SuiteVerdict]) -> bool {
    for v in verdicts {
        println!("{}", v.summary_line());
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    println!("{} checks, {failed} failed", verdicts.len());
    failed == 0
}

fn config_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn cmd_run(cli: &Cli, path: &Path, workers: Option<usize>) -> anyhow::Result<bool> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let base = config_dir(path);
    let out = match (&cli.out, &config.output_dir) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) if o.is_relative() => base.join(o),
        (None, Some(o)) => o.clone(),
        (None, None) => PathBuf::from("."),
    };
    let outcome = run_experiment(&config, &base, workers)?;
    let report = &outcome.report;
    let json = to_pretty_json(report, "report")?;
    let written = match cli.format {
        Format::Csv => write_all_atomic(&out, &[(METRICS_CSV, report.metrics_csv()?), (REPORT_JSON, json)])?,
        Format::Json => write_all_atomic(&out, &[(REPORT_JSON, json)])?,
    };
    for p in written {
        println!("{}", p.display());
    }
    info!("{} rows", report.rows.len());
    Ok(report.verdicts.is_empty() || print_verdicts(&report.verdicts))
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs, workers: Option<usize>) -> anyhow::Result<bool> {
    let lower_bound_cases = args.k.zip(args.horizon).map(|c| vec![c]);
    let bounds = (!args.bounds.is_empty()).then(|| args.bounds.clone());

    if let (Some(trace_path), Some(instance_path)) = (&args.trace, &args.instance) {
        let instance = ImabInstance::load(instance_path)?;
        let (trace, summary) = load_trace(trace_path)?;
        let verdicts = verify_trace(&trace, summary.as_ref(), &instance, &Default::default())?;
        return Ok(print_verdicts(&verdicts));
    }

    let Some(path) = &args.path else {
        let opts = SuiteOptions {
            lower_bound_cases,
            workers,
            bounds,
        };
        return Ok(print_verdicts(&run_default_suite(&opts)?));
    };

    // a report carries its config; re-run it and check the rows reproduce
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let (mut config, recorded) = if value.get("rows").is_some() {
        let report = ExperimentReport::load(path)?;
        (report.config, Some(report.rows))
    } else {
        (ExperimentConfig::load(path)?, None)
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let enabled = bounds.unwrap_or_else(|| config.enabled_bounds());
    config.verifications.clear();
    let outcome = run_experiment(&config, &config_dir(path), workers)?;

    let mut verdicts = Vec::new();
    if let Some(rows) = recorded {
        let mismatch = rows
            .iter()
            .zip(&outcome.report.rows)
            .position(|(a, b)| a != b)
            .or((rows.len() != outcome.report.rows.len()).then_some(rows.len().min(outcome.report.rows.len())));
        verdicts.push(SuiteVerdict::zero_violations(
            "report rows reproduce from the embedded config",
            rows.len(),
            usize::from(mismatch.is_some()),
            mismatch.map(|i| format!("row {} differs", i + 1)),
        ));
    }
    let corpus = CorpusRun::from_traces(&outcome.instances, &outcome.traces);
    verdicts.extend(verify_corpus(
        &corpus,
        &enabled,
        &config.horizons,
        &config.tolerances,
        lower_bound_cases.as_deref(),
    )?);
    Ok(print_verdicts(&verdicts))
}

/// A `.json` path holds a whole trace; otherwise the path is a CSV with a
/// sidecar of the same stem.
fn load_trace(path: &Path) -> anyhow::Result<(PullTrace, Option<TraceSummary>)> {
    let read = |p: &Path| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
    if path.extension().is_some_and(|e| e == "json") {
        let trace: PullTrace =
            serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
        return Ok((trace, None));
    }
    let sidecar = path.with_extension("json");
    let summary: TraceSummary =
        serde_json::from_str(&read(&sidecar)?).with_context(|| format!("parsing {}", sidecar.display()))?;
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok((PullTrace::read_csv(file, &summary)?, Some(summary)))
}

fn cmd_trace(cli: &Cli, instance: &Path, algorithm: Algorithm, horizon: u64) -> anyhow::Result<()> {
    if horizon == 0 {
        bail!("--T must be positive");
    }
    let inst = ImabInstance::load(instance)?;
    let trace = run(algorithm, &inst, horizon)?;
    let stem = format!("{}-{}-T{horizon}", inst.id(), algorithm).replace(['(', ')'], "");
    let files: Vec<(String, Vec<u8>)> = match cli.format {
        Format::Csv => {
            let mut csv = Vec::new();
            trace.write_csv(&mut csv)?;
            vec![
                (format!("{stem}.csv"), csv),
                (format!("{stem}.json"), to_pretty_json(&trace.summary(), "trace summary")?),
            ]
        }
        Format::Json => vec![(format!("{stem}.json"), to_pretty_json(&trace, "trace")?)],
    };
    let named: Vec<(&str, Vec<u8>)> = files.iter().map(|(n, b)| (n.as_str(), b.clone())).collect();
    for p in write_all_atomic(&out_dir(cli), &named)? {
        println!("{}", p.display());
    }
    Ok(())
}
