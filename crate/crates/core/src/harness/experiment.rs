use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::output::{to_pretty_json, write_all_atomic};
use super::verify::{verify_corpus, CorpusRun};
use crate::algorithms::{run, Algorithm, PullTrace};
use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::instance::ImabInstance;
use crate::metrics::{score_run, RunMetrics, SuiteVerdict};

pub const METRICS_CSV: &str = "metrics.csv";
pub const REPORT_JSON: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTiming {
    pub instance_id: String,
    pub algorithm: String,
    /// Longest horizon simulated; shorter horizons are prefixes of this run.
    #[serde(rename = "T")]
    pub horizon: u64,
    pub wall_clock_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<RunMetrics>,
    pub verdicts: Vec<SuiteVerdict>,
    pub timings: Vec<RunTiming>,
}

impl ExperimentReport {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
    }

    pub fn metrics_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_metrics_csv(&self.rows, &mut buf)?;
        Ok(buf)
    }

    /// Writes `metrics.csv` and `report.json` into `dir`, atomically.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let csv = self.metrics_csv()?;
        let json = to_pretty_json(self, "report")?;
        write_all_atomic(dir, &[(METRICS_CSV, csv), (REPORT_JSON, json)])
    }
}

/// One CSV row per run: `instance_id, algorithm, T, alg_reward, opt_reward,
/// regret, ratio`, then `pulls_i` and `gap_i` for `i` up to the largest arm
/// count (blank where an instance has fewer arms).
pub fn write_metrics_csv<W: Write>(rows: &[RunMetrics], out: W) -> Result<()> {
    let k = rows.iter().map(|r| r.pulls.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["instance_id", "algorithm", "T", "alg_reward", "opt_reward", "regret", "ratio"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=k).map(|i| format!("pulls_{i}")));
    header.extend((1..=k).map(|i| format!("gap_{i}")));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.instance_id.clone(),
            r.algorithm.clone(),
            r.horizon.to_string(),
            fmt_num(r.alg_reward),
            fmt_num(r.opt_reward),
            fmt_num(r.policy_regret),
            r.ratio.to_string(),
        ];
        rec.extend((0..k).map(|i| r.pulls.get(i).map(|p| p.to_string()).unwrap_or_default()));
        rec.extend((0..k).map(|i| r.fairness_gaps.get(i).map(|&g| fmt_num(g)).unwrap_or_default()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Everything an experiment produced, including the raw traces.
pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    pub instances: Vec<ImabInstance>,
    /// One trace per (instance, algorithm) at the longest horizon.
    pub traces: Vec<(usize, Algorithm, PullTrace)>,
}

pub fn build_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w);
    }
    b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs the full cross product of instances, algorithms and horizons.
///
/// Each (instance, algorithm) pair is simulated once to the longest horizon;
/// rows for shorter horizons score the trace's prefix. Rows come out ordered
/// by instance, then algorithm (both in config order), then horizon.
/// Verifications listed explicitly in the config run on the same traces.
pub fn run_experiment(config: &ExperimentConfig, base_dir: &Path, workers: Option<usize>) -> Result<ExperimentOutcome> {
    config.validate()?;
    let instances = config.load_instances(base_dir)?;
    let max_t = config.max_horizon();
    let jobs: Vec<(usize, Algorithm)> = (0..instances.len())
        .flat_map(|i| config.algorithms.iter().map(move |&a| (i, a)))
        .collect();
    info!("{} instances x {} algorithms up to T={max_t}", instances.len(), config.algorithms.len());

    let pool = build_pool(workers.or(config.workers))?;
    let results: Vec<(PullTrace, Vec<RunMetrics>, RunTiming)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, alg)| {
                let inst = &instances[i];
                let start = Instant::now();
                let trace = run(alg, inst, max_t)?;
                let rows = config
                    .horizons
                    .iter()
                    .map(|&t| score_run(&trace.prefix(t), inst))
                    .collect::<Result<Vec<_>>>()?;
                let timing = RunTiming {
                    instance_id: inst.id().to_string(),
                    algorithm: alg.to_string(),
                    horizon: max_t,
                    wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
                };
                Ok((trace, rows, timing))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let mut traces = Vec::new();
    for ((i, alg), (trace, r, timing)) in jobs.into_iter().zip(results) {
        rows.extend(r);
        timings.push(timing);
        traces.push((i, alg, trace));
    }

    let verdicts = if config.verifications.is_empty() {
        Vec::new()
    } else {
        let corpus = CorpusRun::from_traces(&instances, &traces);
        verify_corpus(&corpus, &config.verifications, &config.horizons, &config.tolerances, None)?
    };

    Ok(ExperimentOutcome {
        report: ExperimentReport {
            config: config.clone(),
            rows,
            verdicts,
            timings,
        },
        instances,
        traces,
    })
}
