//! Run scoring and bound checks.
//!
//! `score_run` turns a trace into regret, competitive ratio and fairness
//! gaps. The remaining functions check the guarantees the optimistic policy
//! is known to satisfy: the first arm to reach `N + 1` pulls is optimal for
//! horizon `N`, cumulative rewards of concave arms cannot shrink too fast
//! when the horizon is scaled down, and so on. Each check returns its
//! violations rather than a bool so the verifier can name a witness.

use std::fmt;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::algorithms::{run, Algorithm, PullTrace};
use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::instance::{lower_bound_family, ImabInstance, LowerBoundVariant};
use crate::oracle::{opt_single_arm, OptimalReport};

/// Slack for "OPT dominates ALG" style comparisons.
pub const DOMINANCE_TOLERANCE: f64 = 1e-9;

/// `OPT / ALG`. Zero over zero is 1; a positive optimum over zero is
/// unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    Unbounded,
}

impl Ratio {
    pub fn of(opt: f64, alg: f64) -> Ratio {
        if alg > 0.0 {
            Ratio::Finite(opt / alg)
        } else if opt > 0.0 {
            Ratio::Unbounded
        } else {
            Ratio::Finite(1.0)
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Ratio::Finite(r) => Some(r),
            Ratio::Unbounded => None,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(r) => f.write_str(&fmt_num(*r)),
            Ratio::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ratio::Finite(r) => s.serialize_f64(*r),
            Ratio::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(r) => Ok(Ratio::Finite(r)),
            Raw::Str(s) if s == "unbounded" => Ok(Ratio::Unbounded),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad ratio `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub instance_id: String,
    pub algorithm: String,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub alg_reward: f64,
    pub opt_reward: f64,
    pub policy_regret: f64,
    pub ratio: Ratio,
    /// `a_i - f_i(N_i)` with `f_i(0) := 0`.
    pub fairness_gaps: Vec<f64>,
    pub pulls: Vec<u64>,
    /// The horizon ended inside the optimistic policy's two-pull warm-up.
    #[serde(default)]
    pub init_truncated: bool,
}

/// Scores a trace against the instance it was produced on.
pub fn score_run(trace: &PullTrace, instance: &ImabInstance) -> Result<RunMetrics> {
    if trace.instance_id != instance.id() {
        return Err(Error::TraceMismatch {
            instance_id: instance.id().to_string(),
            reason: format!("trace was recorded on `{}`", trace.instance_id),
        });
    }
    trace.replay(instance, DOMINANCE_TOLERANCE)?;
    let alg_reward = trace.total_reward();
    let (_, opt_reward) = opt_single_arm(instance, trace.horizon);
    let fairness_gaps = instance
        .arms()
        .iter()
        .zip(&trace.final_pulls)
        .map(|(f, &n)| f.asymptote() - f.eval_or_zero(n))
        .collect();
    let init_truncated =
        trace.algorithm == Algorithm::ImprovingAnytime.to_string() && trace.horizon < 2 * instance.k() as u64;
    Ok(RunMetrics {
        instance_id: trace.instance_id.clone(),
        algorithm: trace.algorithm.clone(),
        horizon: trace.horizon,
        alg_reward,
        opt_reward,
        policy_regret: opt_reward - alg_reward,
        ratio: Ratio::of(opt_reward, alg_reward),
        fairness_gaps,
        pulls: trace.final_pulls.clone(),
        init_truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Worst case must not exceed the bound.
    AtMost,
    /// Worst case must reach the bound.
    AtLeast,
}

/// Outcome of checking one bound over a set of instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteVerdict {
    pub bound: String,
    pub kind: BoundKind,
    pub instances_tested: usize,
    pub worst_case: f64,
    pub bound_value: f64,
    pub pass: bool,
    /// Instance (and detail) attaining the worst case or failing the check.
    pub witness: Option<String>,
    /// Set when the bound does not apply; such verdicts pass.
    pub skipped: Option<String>,
    /// Reported for reference only; never fails.
    #[serde(default)]
    pub informational: bool,
}

impl SuiteVerdict {
    pub fn new(bound: impl Into<String>, kind: BoundKind, bound_value: f64) -> Self {
        Self {
            bound: bound.into(),
            kind,
            instances_tested: 0,
            worst_case: match kind {
                BoundKind::AtMost => f64::NEG_INFINITY,
                BoundKind::AtLeast => f64::INFINITY,
            },
            bound_value,
            pass: true,
            witness: None,
            skipped: None,
            informational: false,
        }
    }

    pub fn skipped(bound: impl Into<String>, kind: BoundKind, bound_value: f64, why: impl Into<String>) -> Self {
        let mut v = Self::new(bound, kind, bound_value);
        v.skipped = Some(why.into());
        v.worst_case = f64::NAN;
        v
    }

    /// Counts of violations: worst case is the number found, the bound zero.
    pub fn zero_violations(bound: impl Into<String>, tested: usize, violations: usize, witness: Option<String>) -> Self {
        Self {
            bound: bound.into(),
            kind: BoundKind::AtMost,
            instances_tested: tested,
            worst_case: violations as f64,
            bound_value: 0.0,
            pass: violations == 0,
            witness,
            skipped: None,
            informational: false,
        }
    }

    /// Folds one observed value into the worst case.
    pub fn observe(&mut self, value: f64, witness: impl FnOnce() -> String) {
        self.instances_tested += 1;
        let worse = match self.kind {
            BoundKind::AtMost => value > self.worst_case,
            BoundKind::AtLeast => value < self.worst_case,
        };
        if worse {
            self.worst_case = value;
            self.witness = Some(witness());
        }
    }

    /// Marks the verdict failed because of an unbounded value.
    pub fn fail_unbounded(&mut self, witness: String) {
        self.instances_tested += 1;
        self.worst_case = f64::INFINITY;
        self.pass = false;
        self.witness = Some(witness);
    }

    /// Applies the comparison with tolerance `tol`. An empty set passes with
    /// worst case reported as 1.
    pub fn finish(mut self, tol: f64) -> Self {
        if self.skipped.is_some() {
            return self;
        }
        if self.informational {
            self.pass = true;
            return self;
        }
        if self.instances_tested == 0 {
            self.worst_case = 1.0;
            return self;
        }
        if self.pass {
            self.pass = match self.kind {
                BoundKind::AtMost => self.worst_case <= self.bound_value + tol,
                BoundKind::AtLeast => self.worst_case >= self.bound_value - tol,
            };
        }
        self
    }

    pub fn summary_line(&self) -> String {
        let status = if self.skipped.is_some() {
            "SKIP"
        } else if self.informational {
            "INFO"
        } else if self.pass {
            "PASS"
        } else {
            "FAIL"
        };
        let op = match self.kind {
            BoundKind::AtMost => "<=",
            BoundKind::AtLeast => ">=",
        };
        let mut line = format!("[{status}] {}: ", self.bound);
        match &self.skipped {
            Some(why) => line.push_str(&format!("skipped ({why})")),
            None => line.push_str(&format!(
                "worst {} {op} {} over {} case(s)",
                fmt_num(self.worst_case),
                fmt_num(self.bound_value),
                self.instances_tested
            )),
        }
        if let (Some(w), None) = (&self.witness, &self.skipped) {
            line.push_str(&format!(" [witness: {w}]"));
        }
        line
    }
}

/// Largest `OPT / ALG` over `instances` at horizon `horizon`, checked
/// against `bound` (e.g. `200k` for the optimistic policy, `8k^2` for
/// round-robin).
pub fn empirical_cr(algorithm: Algorithm, instances: &[ImabInstance], horizon: u64, bound: f64) -> Result<SuiteVerdict> {
    let mut verdict = SuiteVerdict::new(format!("ratio of {algorithm} at T={horizon}"), BoundKind::AtMost, bound);
    for inst in instances {
        let trace = run(algorithm, inst, horizon)?;
        let m = score_run(&trace, inst)?;
        match m.ratio {
            Ratio::Finite(r) => verdict.observe(r, || inst.id().to_string()),
            Ratio::Unbounded => verdict.fail_unbounded(format!("{} (unbounded ratio)", inst.id())),
        }
    }
    Ok(verdict.finish(DOMINANCE_TOLERANCE))
}

/// Worst regret and ratio of one algorithm across the lower-bound family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundWitness {
    pub algorithm: String,
    pub k: usize,
    #[serde(rename = "T")]
    pub horizon: u64,
    /// `max_m Regret(I_m) >= T/6`, asserted only for `k > 2`.
    pub regret: SuiteVerdict,
    /// `max_m OPT/ALG (I_m) >= k/2`.
    pub ratio: SuiteVerdict,
}

/// Runs `algorithm` on all of `I_1..I_k` and reports the largest regret and
/// ratio. The worst member is the one whose special arm the algorithm
/// neglected.
pub fn lower_bound_witness(algorithm: Algorithm, k: usize, horizon: u64) -> Result<LowerBoundWitness> {
    let family = lower_bound_family(k, horizon, LowerBoundVariant::HorizonSlope)?;
    let regret_bound = horizon as f64 / 6.0;
    let ratio_bound = k as f64 / 2.0;
    let mut max_regret = SuiteVerdict::new(
        format!("max regret of {algorithm} on lower-bound k={k} T={horizon}"),
        BoundKind::AtLeast,
        regret_bound,
    );
    let mut max_ratio = SuiteVerdict::new(
        format!("max ratio of {algorithm} on lower-bound k={k} T={horizon}"),
        BoundKind::AtLeast,
        ratio_bound,
    );
    let mut best_regret = (f64::NEG_INFINITY, String::new());
    let mut best_ratio = (f64::NEG_INFINITY, String::new());
    for inst in &family {
        let m = score_run(&run(algorithm, inst, horizon)?, inst)?;
        if m.policy_regret > best_regret.0 {
            best_regret = (m.policy_regret, inst.id().to_string());
        }
        let r = m.ratio.finite().unwrap_or(f64::INFINITY);
        if r > best_ratio.0 {
            best_ratio = (r, inst.id().to_string());
        }
    }
    // the witness quantity is a maximum over the family; record it once
    max_regret.observe(best_regret.0, || best_regret.1.clone());
    max_ratio.observe(best_ratio.0, || best_ratio.1.clone());
    let regret = if k > 2 {
        max_regret.finish(DOMINANCE_TOLERANCE)
    } else {
        SuiteVerdict::skipped(max_regret.bound.clone(), BoundKind::AtLeast, regret_bound, "k <= 2")
    };
    Ok(LowerBoundWitness {
        algorithm: algorithm.to_string(),
        k,
        horizon,
        regret,
        ratio: max_ratio.finish(DOMINANCE_TOLERANCE),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessVerdict {
    /// 0-based arm.
    pub arm: usize,
    pub asymptote: f64,
    /// Earliest step after which `a_i - f_i(N_i(t)) <= epsilon`, if reached.
    pub reached_at: Option<u64>,
    pub final_gap: f64,
}

pub fn fairness_convergence(trace: &PullTrace, instance: &ImabInstance, epsilon: f64) -> Result<Vec<FairnessVerdict>> {
    let min_a = instance.arms().iter().map(|f| f.asymptote()).fold(f64::INFINITY, f64::min);
    if !(epsilon > 0.0 && epsilon <= min_a) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, min asymptote = {min_a}], got {epsilon}"
        )));
    }
    let k = instance.k();
    let mut counts = vec![0u64; k];
    let mut reached: Vec<Option<u64>> = vec![None; k];
    let gap = |i: usize, n: u64| instance.arm(i).asymptote() - instance.arm(i).eval_or_zero(n);
    for s in &trace.steps {
        counts[s.arm] += 1;
        if reached[s.arm].is_none() && gap(s.arm, counts[s.arm]) <= epsilon {
            reached[s.arm] = Some(s.t);
        }
        // an arm whose gap is within epsilon before any pull is reached at t = 1
        if s.t == 1 {
            for i in 0..k {
                if reached[i].is_none() && gap(i, counts[i]) <= epsilon {
                    reached[i] = Some(1);
                }
            }
        }
    }
    Ok((0..k)
        .map(|i| FairnessVerdict {
            arm: i,
            asymptote: instance.arm(i).asymptote(),
            reached_at: reached[i],
            final_gap: gap(i, counts[i]),
        })
        .collect())
}

/// Per-step external regret against the best instantaneous reward on offer:
/// `max_i f_i(N_i(t) + 1) - f_{i_t}(N_{i_t}(t) + 1)`.
pub fn external_regret_per_step(trace: &PullTrace, instance: &ImabInstance) -> Vec<f64> {
    let mut counts = vec![0u64; instance.k()];
    trace
        .steps
        .iter()
        .map(|s| {
            let best = instance
                .arms()
                .iter()
                .zip(&counts)
                .map(|(f, &n)| f.eval(n + 1))
                .fold(f64::NEG_INFINITY, f64::max);
            counts[s.arm] += 1;
            best - s.reward
        })
        .collect()
}

/// Step at which some arm was pulled for the `(n+1)`-th time before any
/// other arm, violating `Rew_i(n) = OPT(I, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstCrossingViolation {
    pub n: u64,
    pub t: u64,
    pub arm: usize,
    pub arm_cumulative: f64,
    pub opt: f64,
}

/// Checks that whenever an arm becomes the first to be pulled `n + 1` times
/// (`n >= 2`), its `Rew_i(n)` equals `OPT(I, n)` within `tol`.
pub fn first_crossing_violations(
    trace: &PullTrace,
    instance: &ImabInstance,
    opt: &OptimalReport,
    tol: f64,
) -> Vec<FirstCrossingViolation> {
    let mut counts = vec![0u64; instance.k()];
    let mut max_count = 0u64;
    let mut out = Vec::new();
    for s in &trace.steps {
        counts[s.arm] += 1;
        if counts[s.arm] > max_count {
            max_count = counts[s.arm];
            let n = max_count - 1;
            if n >= 2 && n <= opt.horizon {
                let rew = instance.arm(s.arm).cumulative(n);
                let best = opt.opt(n);
                if (rew - best).abs() > tol {
                    out.push(FirstCrossingViolation {
                        n,
                        t: s.t,
                        arm: s.arm,
                        arm_cumulative: rew,
                        opt: best,
                    });
                }
            }
        }
    }
    out
}

/// Where a horizon-scaling ratio fell below its lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioGridViolation {
    /// `"opt"` or `"arm <i>"` (1-based).
    pub subject: String,
    pub part: char,
    pub alpha: f64,
    pub horizon: u64,
    pub n: u64,
    pub ratio: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RatioGridOutcome {
    pub checked: usize,
    /// Cases with a zero denominator.
    pub skipped: usize,
    pub violations: Vec<RatioGridViolation>,
}

/// `alpha` grid for the `n = floor(alpha T)` scaling.
pub const LONG_HORIZON_ALPHAS: [f64; 5] = [0.5, 0.6, 0.75, 0.9, 1.0];

/// Scaled-horizon lower bounds for OPT and for every arm:
///
/// (a) `R(floor(alpha T)) / R(T) >= 1/5` for `alpha` in [`LONG_HORIZON_ALPHAS`];
/// (b) `R(floor(alpha T / k)) / R(T) >= 16 alpha^2 / (25 k^2)` for
///     `alpha` in `{1/2, 1, 2, k/2}` up to `k/2`, when `floor(alpha T / k) >= 1`.
///
/// `R` is `OPT(I, .)` or an arm's `Rew_i(.)`.
pub fn ratio_grid_check(instance: &ImabInstance, horizon: u64) -> RatioGridOutcome {
    let k = instance.k();
    let mut out = RatioGridOutcome::default();
    let opt = |n: u64| opt_single_arm(instance, n).1;

    let mut short_alphas: Vec<f64> = vec![0.5, 1.0, 2.0, k as f64 / 2.0];
    short_alphas.retain(|&a| a <= k as f64 / 2.0);
    short_alphas.sort_by(f64::total_cmp);
    short_alphas.dedup();

    let mut cases: Vec<(char, f64, u64, f64)> = Vec::new();
    for &alpha in &LONG_HORIZON_ALPHAS {
        let n = (alpha * horizon as f64).floor() as u64;
        if n >= 1 {
            cases.push(('a', alpha, n, 0.2));
        }
    }
    for &alpha in &short_alphas {
        let n = (alpha * horizon as f64 / k as f64).floor() as u64;
        if n >= 1 {
            cases.push(('b', alpha, n, 16.0 * alpha * alpha / (25.0 * (k * k) as f64)));
        }
    }

    type Subject<'a> = (String, Box<dyn Fn(u64) -> f64 + 'a>);
    let mut subjects: Vec<Subject<'_>> = vec![("opt".to_string(), Box::new(opt))];
    for (i, arm) in instance.arms().iter().enumerate() {
        subjects.push((format!("arm {}", i + 1), Box::new(move |n| arm.cumulative(n))));
    }
    for (name, reward) in &subjects {
        let full = reward(horizon);
        if full <= 0.0 {
            out.skipped += cases.len();
            debug!("{}: {name} has zero reward at T={horizon}; ratio checks skipped", instance.id());
            continue;
        }
        for &(part, alpha, n, bound) in &cases {
            out.checked += 1;
            let ratio = reward(n) / full;
            if ratio < bound {
                out.violations.push(RatioGridViolation {
                    subject: name.clone(),
                    part,
                    alpha,
                    horizon,
                    n,
                    ratio,
                    bound,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathwiseViolation {
    pub arm: usize,
    pub pulls: u64,
    pub ratio: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PathwiseOutcome {
    /// False when the most-pulled arm has more than `T/2` pulls.
    pub applies: bool,
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<PathwiseViolation>,
}

/// When no arm has more than `T/2` pulls, every arm with positive reward
/// satisfies `OPT(I, T) / Rew_i(N_i) <= 200 T^2 / N_i^2`.
pub fn pathwise_check(trace: &PullTrace, instance: &ImabInstance) -> PathwiseOutcome {
    let horizon = trace.horizon;
    let max_pulls = trace.final_pulls.iter().copied().max().unwrap_or(0);
    let mut out = PathwiseOutcome {
        applies: 2 * max_pulls <= horizon,
        ..Default::default()
    };
    if !out.applies {
        return out;
    }
    let (_, opt) = opt_single_arm(instance, horizon);
    for (i, &n) in trace.final_pulls.iter().enumerate() {
        let rew = instance.arm(i).cumulative(n);
        if rew <= 0.0 {
            out.skipped += 1;
            debug!("{}: arm {} has zero reward after {n} pulls; pathwise check skipped", instance.id(), i + 1);
            continue;
        }
        out.checked += 1;
        let ratio = opt / rew;
        let bound = 200.0 * (horizon as f64).powi(2) / (n as f64).powi(2);
        if ratio > bound {
            out.violations.push(PathwiseViolation {
                arm: i,
                pulls: n,
                ratio,
                bound,
            });
        }
    }
    out
}
