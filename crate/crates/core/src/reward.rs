//! Rising reward functions.
//!
//! A reward function maps a pull index `n >= 1` (the n-th time an arm is
//! pulled) to a reward in `[0, 1]`. The improving class requires three
//! properties: rewards are bounded in `[0, 1]`, nondecreasing in `n`, and have
//! nonincreasing increments (diminishing returns).
//!
//! Four families are provided:
//!
//! * saturating-linear `f(n) = min(slope * n, cap)`,
//! * exponential-saturation `f(n) = a * (1 - exp(-n / s))`,
//! * tabulated, an explicit table extended flat past its end,
//! * constant.
//!
//! Every [`RewardFunction`] carries a lazily grown table of prefix sums
//! `Rew(N) = f(1) + ... + f(N)` built with compensated summation.

use std::fmt;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

/// Slack used when checking analytic families, absorbing float noise.
pub const ANALYTIC_TOLERANCE: f64 = 1e-12;

/// Largest index sampled when validating a parametric family.
pub const DEFAULT_SAMPLE_LIMIT: u64 = 1_000_000;

/// Largest admissible `cap / slope` for the saturating-linear family.
const MAX_KNEE: f64 = 1e12;

/// Serialized form of a reward function: `{"kind": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum RewardSpec {
    SaturatingLinear { slope: f64, cap: f64 },
    ExponentialSaturation { a: f64, s: f64 },
    Tabulated { values: Vec<f64> },
    Constant { value: f64 },
}

impl RewardSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            RewardSpec::SaturatingLinear { .. } => "saturating-linear",
            RewardSpec::ExponentialSaturation { .. } => "exponential-saturation",
            RewardSpec::Tabulated { .. } => "tabulated",
            RewardSpec::Constant { .. } => "constant",
        }
    }
}

/// Which of the class rules a value breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `0 <= f(n) <= 1`
    Bounded,
    /// `f(n) >= f(n - 1)`
    Monotone,
    /// `f(n) - f(n - 1) <= f(n - 1) - f(n - 2)`
    DiminishingReturns,
    /// Family parameter outside its admissible range.
    Parameter,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Bounded => "bounded in [0,1]",
            Rule::Monotone => "monotone",
            Rule::DiminishingReturns => "diminishing returns",
            Rule::Parameter => "parameter range",
        };
        f.write_str(s)
    }
}

/// One failed check. `index` is the pull index of the later value involved,
/// `lhs` and `rhs` the two sides of the inequality that failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: u64,
    pub rule: Rule,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            ok: violations.is_empty(),
            violations,
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} at n={} ({} vs {})", v.rule, v.index, v.lhs, v.rhs)?;
        }
        Ok(())
    }
}

/// Checks a table exactly as given, including its flat extension.
pub fn validate_table(values: &[f64]) -> ValidationReport {
    let mut violations = Vec::new();
    if values.is_empty() {
        violations.push(Violation {
            index: 0,
            rule: Rule::Parameter,
            lhs: 0.0,
            rhs: 1.0,
        });
    }
    scan(
        values.len() as u64,
        |n| values[(n - 1) as usize],
        0.0,
        &mut violations,
    );
    ValidationReport::from_violations(violations)
}

/// Checks a candidate against the class. Tables are checked exactly;
/// parametric families are checked for parameter ranges and then sampled up
/// to `max(2 * knee, 3)` (saturating-linear) or `max(10^4, 20 s)`
/// (exponential), capped at `sample_limit`.
pub fn validate(spec: &RewardSpec, sample_limit: u64) -> ValidationReport {
    match spec {
        RewardSpec::Tabulated { values } => validate_table(values),
        _ => {
            let mut violations = parameter_violations(spec);
            if violations.is_empty() {
                let f = Family::from_spec(spec);
                let upto = f.sample_bound().min(sample_limit).max(3);
                scan(upto, |n| f.eval(n), ANALYTIC_TOLERANCE, &mut violations);
            }
            ValidationReport::from_violations(violations)
        }
    }
}

fn parameter_violations(spec: &RewardSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut bad = |ok: bool, lhs: f64, rhs: f64| {
        if !ok {
            out.push(Violation {
                index: 0,
                rule: Rule::Parameter,
                lhs,
                rhs,
            });
        }
    };
    match *spec {
        RewardSpec::SaturatingLinear { slope, cap } => {
            bad(slope > 0.0 && slope.is_finite(), slope, 0.0);
            bad(cap > 0.0 && cap <= 1.0, cap, 1.0);
            if slope > 0.0 && cap > 0.0 {
                bad(cap / slope <= MAX_KNEE, cap / slope, MAX_KNEE);
            }
        }
        RewardSpec::ExponentialSaturation { a, s } => {
            bad(a > 0.0 && a <= 1.0, a, 1.0);
            bad(s > 0.0 && s.is_finite(), s, 0.0);
        }
        RewardSpec::Constant { value } => bad((0.0..=1.0).contains(&value), value, 1.0),
        RewardSpec::Tabulated { .. } => {}
    }
    out
}

/// Walks `f(1..=upto)` recording every violation. The flat extension past
/// `upto` adds an increment of zero, which monotonicity already covers.
fn scan(upto: u64, f: impl Fn(u64) -> f64, tol: f64, out: &mut Vec<Violation>) {
    let mut prev: Option<f64> = None;
    let mut prev_inc: Option<f64> = None;
    for n in 1..=upto {
        let v = f(n);
        if !(v >= -tol && v <= 1.0 + tol) {
            out.push(Violation {
                index: n,
                rule: Rule::Bounded,
                lhs: v,
                rhs: if v < 0.0 { 0.0 } else { 1.0 },
            });
        }
        if let Some(p) = prev {
            if v < p - tol {
                out.push(Violation {
                    index: n,
                    rule: Rule::Monotone,
                    lhs: v,
                    rhs: p,
                });
            }
            let inc = v - p;
            if let Some(pi) = prev_inc {
                if inc > pi + tol {
                    out.push(Violation {
                        index: n,
                        rule: Rule::DiminishingReturns,
                        lhs: inc,
                        rhs: pi,
                    });
                }
            }
            prev_inc = Some(inc);
        }
        prev = Some(v);
    }
}

/// Evaluation core, separated from the cache so validation can run before a
/// [`RewardFunction`] exists.
#[derive(Debug, Clone, PartialEq)]
enum Family {
    SaturatingLinear { slope: f64, cap: f64, knee: u64 },
    Exponential { a: f64, s: f64 },
    Tabulated { values: Vec<f64> },
    Constant { value: f64 },
}

impl Family {
    fn from_spec(spec: &RewardSpec) -> Self {
        match spec {
            &RewardSpec::SaturatingLinear { slope, cap } => Family::SaturatingLinear {
                slope,
                cap,
                knee: knee_of(slope, cap),
            },
            &RewardSpec::ExponentialSaturation { a, s } => Family::Exponential { a, s },
            RewardSpec::Tabulated { values } => Family::Tabulated {
                values: values.clone(),
            },
            &RewardSpec::Constant { value } => Family::Constant { value },
        }
    }

    #[inline]
    fn eval(&self, n: u64) -> f64 {
        match self {
            Family::SaturatingLinear { slope, cap, knee } => {
                if n >= *knee {
                    *cap
                } else {
                    slope * n as f64
                }
            }
            Family::Exponential { a, s } => -a * (-(n as f64) / s).exp_m1(),
            Family::Tabulated { values } => {
                let i = (n as usize).min(values.len());
                values[i - 1]
            }
            Family::Constant { value } => *value,
        }
    }

    fn asymptote(&self) -> f64 {
        match self {
            Family::SaturatingLinear { cap, .. } => *cap,
            Family::Exponential { a, .. } => *a,
            Family::Tabulated { values } => *values.last().expect("validated nonempty"),
            Family::Constant { value } => *value,
        }
    }

    fn sample_bound(&self) -> u64 {
        match self {
            Family::SaturatingLinear { knee, .. } => knee.saturating_mul(2),
            Family::Exponential { s, .. } => 10_000u64.max((20.0 * s).ceil().min(u64::MAX as f64) as u64),
            Family::Tabulated { values } => values.len() as u64,
            Family::Constant { .. } => 1,
        }
    }

    fn saturation_index(&self) -> Option<u64> {
        match self {
            Family::SaturatingLinear { knee, .. } => Some(*knee),
            Family::Exponential { .. } => None,
            Family::Tabulated { values } => {
                let last = *values.last().expect("validated nonempty");
                let first = values.iter().position(|&v| v == last).unwrap_or(0);
                Some(first as u64 + 1)
            }
            Family::Constant { .. } => Some(1),
        }
    }
}

/// Smallest `n` with `slope * n >= cap`. A quotient within relative 1e-9 of
/// an integer snaps to that integer so `f(knee) == cap` holds exactly.
fn knee_of(slope: f64, cap: f64) -> u64 {
    let q = cap / slope;
    let r = q.round();
    let knee = if (q - r).abs() <= 1e-9 * q.max(1.0) {
        r
    } else {
        q.ceil()
    };
    (knee as u64).max(1)
}

#[derive(Debug, Clone)]
struct PrefixCache {
    sums: Vec<f64>,
    acc: NeumaierSum,
}

impl PrefixCache {
    fn new() -> Self {
        Self {
            sums: vec![0.0],
            acc: NeumaierSum::new(),
        }
    }
}

/// A validated member of the improving reward class.
///
/// Immutable apart from the prefix-sum cache, which grows under a lock and
/// can be shared across threads.
#[derive(Debug, Serialize, Deserialize)]
#[serde(try_from = "RewardSpec", into = "RewardSpec")]
pub struct RewardFunction {
    spec: RewardSpec,
    family: Family,
    cache: RwLock<PrefixCache>,
}

impl RewardFunction {
    pub fn saturating_linear(slope: f64, cap: f64) -> Result<Self> {
        Self::from_spec(RewardSpec::SaturatingLinear { slope, cap })
    }

    pub fn exponential_saturation(a: f64, s: f64) -> Result<Self> {
        Self::from_spec(RewardSpec::ExponentialSaturation { a, s })
    }

    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        Self::from_spec(RewardSpec::Tabulated { values })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::from_spec(RewardSpec::Constant { value })
    }

    pub fn from_spec(spec: RewardSpec) -> Result<Self> {
        let report = validate(&spec, DEFAULT_SAMPLE_LIMIT);
        if !report.ok {
            return Err(match report.violations.first() {
                Some(v) if v.rule == Rule::Parameter && !matches!(spec, RewardSpec::Tabulated { .. }) => {
                    Error::InvalidParameter(format!("{} parameters out of range: {report}", spec.kind()))
                }
                _ => Error::InvalidRewardFunction(report),
            });
        }
        let family = Family::from_spec(&spec);
        Ok(Self {
            spec,
            family,
            cache: RwLock::new(PrefixCache::new()),
        })
    }

    pub fn spec(&self) -> &RewardSpec {
        &self.spec
    }

    pub fn kind(&self) -> &'static str {
        self.spec.kind()
    }

    /// Reward of the `n`-th pull.
    ///
    /// # Panics
    /// If `n == 0`; pull indices start at 1.
    #[inline]
    pub fn eval(&self, n: u64) -> f64 {
        assert!(n >= 1, "reward functions are indexed from 1");
        self.family.eval(n)
    }

    /// `eval` with `f(0) := 0`, for quantities defined on never-pulled arms.
    #[inline]
    pub fn eval_or_zero(&self, n: u64) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.family.eval(n)
        }
    }

    /// `f(n) - f(n - 1)` for `n >= 2`.
    pub fn delta(&self, n: u64) -> Result<f64> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "marginal gain needs n >= 2, got {n}"
            )));
        }
        Ok(self.family.eval(n) - self.family.eval(n - 1))
    }

    pub fn asymptote(&self) -> f64 {
        self.family.asymptote()
    }

    /// First pull index at which the function reaches its asymptote, if any.
    pub fn saturation_index(&self) -> Option<u64> {
        self.family.saturation_index()
    }

    /// `Rew(n) = f(1) + ... + f(n)`, with `Rew(0) = 0`.
    pub fn cumulative(&self, n: u64) -> f64 {
        let idx = n as usize;
        {
            let cache = self.cache.read().unwrap_or_else(|e| e.into_inner());
            if let Some(&v) = cache.sums.get(idx) {
                return v;
            }
        }
        let mut cache = self.cache.write().unwrap_or_else(|e| e.into_inner());
        while cache.sums.len() <= idx {
            let m = cache.sums.len() as u64;
            let v = self.family.eval(m);
            cache.acc.add(v);
            let total = cache.acc.value();
            cache.sums.push(total);
        }
        cache.sums[idx]
    }

    /// Grows the prefix cache to at least `n` without returning a value.
    pub fn warm(&self, n: u64) {
        self.cumulative(n);
    }
}

impl Clone for RewardFunction {
    fn clone(&self) -> Self {
        let cache = self.cache.read().unwrap_or_else(|e| e.into_inner()).clone();
        Self {
            spec: self.spec.clone(),
            family: self.family.clone(),
            cache: RwLock::new(cache),
        }
    }
}

impl PartialEq for RewardFunction {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl TryFrom<RewardSpec> for RewardFunction {
    type Error = Error;

    fn try_from(spec: RewardSpec) -> Result<Self> {
        Self::from_spec(spec)
    }
}

impl From<RewardFunction> for RewardSpec {
    fn from(f: RewardFunction) -> Self {
        f.spec
    }
}
