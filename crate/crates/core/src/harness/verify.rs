//! Verification suites: each bound the optimistic policy, round-robin and
//! the offline oracle are known to satisfy, checked over instance corpora
//! and reduced to a [`SuiteVerdict`] naming the worst case.

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{BoundName, Tolerances};
use super::experiment::build_pool;
use crate::algorithms::{run, Algorithm, PullTrace, TraceSummary};
use crate::error::Result;
use crate::format::fmt_num;
use crate::instance::{lower_bound_family, random_concave, regret_demo_two_arm, rr_adversarial, ImabInstance, LowerBoundVariant};
use crate::metrics::{
    external_regret_per_step, first_crossing_violations, lower_bound_witness, pathwise_check, ratio_grid_check,
    score_run, BoundKind, Ratio, SuiteVerdict,
};
use crate::oracle::{brute_force_opt, composition_count, opt_curve, opt_single_arm, DEFAULT_ENUMERATION_LIMIT};
use crate::reward::RewardFunction;

/// Horizons for the corpus-wide ratio checks.
pub const CORPUS_HORIZONS: [u64; 3] = [100, 1_000, 10_000];
/// Horizons for the scaled-horizon reward bounds.
pub const SCALING_HORIZONS: [u64; 3] = [20, 100, 1_000];
/// Largest horizon for the exhaustive single-arm check.
pub const BRUTE_FORCE_MAX_T: u64 = 12;
/// `(k, T)` pairs for the lower-bound family.
pub const LOWER_BOUND_CASES: [(usize, u64); 2] = [(4, 100), (8, 400)];
/// `(k, T)` pairs for round-robin's adversarial instance.
pub const ROUND_ROBIN_CASES: [(usize, u64); 3] = [(2, 20), (4, 40), (8, 160)];
/// Horizon for the exponential fairness instance.
pub const FAIRNESS_EXP_T: u64 = 100_000;
/// Horizon for the saturating-linear fairness instance.
pub const FAIRNESS_LINEAR_T: u64 = 10_000;
pub const FAIRNESS_EPSILON: f64 = 0.01;
/// Constant proven for the optimistic policy: ratio at most `200 k`.
pub const PROVEN_RATIO_PER_ARM: f64 = 200.0;
/// Tighter constant stated without proof; reported, not asserted.
pub const STATED_RATIO_PER_ARM: f64 = 32.0;

/// Algorithms the lower-bound family is run against.
pub fn all_algorithms() -> Vec<Algorithm> {
    vec![
        Algorithm::ImprovingAnytime,
        Algorithm::RoundRobin,
        Algorithm::Greedy,
        Algorithm::FixedArm(0),
    ]
}

/// Improving and round-robin traces for a set of instances, each simulated
/// once to the longest horizon needed.
pub struct CorpusRun<'a> {
    pub instances: &'a [ImabInstance],
    pub improving: Vec<PullTrace>,
    pub round_robin: Vec<PullTrace>,
}

impl<'a> CorpusRun<'a> {
    pub fn simulate(instances: &'a [ImabInstance], horizon: u64) -> Result<Self> {
        let pairs: Vec<(PullTrace, PullTrace)> = instances
            .par_iter()
            .map(|inst| {
                Ok((
                    run(Algorithm::ImprovingAnytime, inst, horizon)?,
                    run(Algorithm::RoundRobin, inst, horizon)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let (improving, round_robin) = pairs.into_iter().unzip();
        Ok(Self {
            instances,
            improving,
            round_robin,
        })
    }

    /// Reuses experiment traces where present and simulates the rest.
    pub fn from_traces(instances: &'a [ImabInstance], traces: &[(usize, Algorithm, PullTrace)]) -> Self {
        let horizon = traces.iter().map(|(_, _, t)| t.horizon).max().unwrap_or(1);
        let pick = |i: usize, alg: Algorithm| {
            traces
                .iter()
                .find(|(j, a, _)| *j == i && *a == alg)
                .map(|(_, _, t)| t.clone())
                .unwrap_or_else(|| run(alg, &instances[i], horizon).expect("registered algorithm"))
        };
        Self {
            instances,
            improving: (0..instances.len()).map(|i| pick(i, Algorithm::ImprovingAnytime)).collect(),
            round_robin: (0..instances.len()).map(|i| pick(i, Algorithm::RoundRobin)).collect(),
        }
    }
}

/// Corpus for the exhaustive check: small instances from every generator,
/// all with `k <= 3`.
pub fn small_corpus() -> Vec<ImabInstance> {
    let mut out = Vec::new();
    for t in [2, 5, 8, 12] {
        out.extend(lower_bound_family(2, t, LowerBoundVariant::HorizonSlope).unwrap());
    }
    for t in [3, 7, 12] {
        out.extend(lower_bound_family(3, t, LowerBoundVariant::HorizonSlope).unwrap());
        out.extend(lower_bound_family(3, t, LowerBoundVariant::BlockSlope).unwrap());
    }
    for t in [4, 7, 10, 12] {
        out.push(rr_adversarial(2, t).unwrap());
    }
    for t in [6, 9, 12] {
        out.push(rr_adversarial(3, t).unwrap());
    }
    out.push(regret_demo_two_arm());
    for seed in 0..30u64 {
        let k = 1 + (seed % 3) as usize;
        let table = [2, 4, 8, 16, 30][(seed % 5) as usize];
        out.push(random_concave(k, seed, table, (0.05, 1.0)).unwrap().with_id(format!("small-random-{seed}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for j in 0..10 {
        let k = 2 + j % 2;
        out.push(random_parametric(&mut rng, k, j % 2 == 0, format!("small-parametric-{j}")));
    }
    out
}

fn random_parametric(rng: &mut ChaCha8Rng, k: usize, exponential: bool, id: String) -> ImabInstance {
    let arms = (0..k)
        .map(|_| {
            let a: f64 = rng.gen_range(0.05..=1.0);
            let scale = 10f64.powf(rng.gen_range(-0.3..3.7));
            if exponential {
                RewardFunction::exponential_saturation(a, scale)
            } else {
                RewardFunction::saturating_linear(a / scale.max(1.0), a)
            }
            .expect("sampled parameters are in range")
        })
        .collect();
    ImabInstance::new(id, arms).expect("k >= 1")
}

/// Main verification corpus: the adversarial and illustrative families plus
/// 210 seeded random instances with `k` in {2, 4, 8} (tabulated tables of
/// several lengths, exponential and saturating-linear arms).
pub fn verification_corpus() -> Vec<ImabInstance> {
    let mut out = Vec::new();
    for (k, t) in [(2, 10), (3, 30), (4, 100), (8, 400)] {
        out.extend(lower_bound_family(k, t, LowerBoundVariant::HorizonSlope).unwrap());
    }
    out.extend(lower_bound_family(3, 10, LowerBoundVariant::BlockSlope).unwrap());
    for (k, t) in ROUND_ROBIN_CASES {
        out.push(rr_adversarial(k, t).unwrap());
    }
    out.push(regret_demo_two_arm());
    out.push(fairness_exponential_instance());
    out.push(fairness_linear_instance());

    let tables = [5, 20, 100, 1_000, 5_000];
    let ranges = [(0.05, 1.0), (0.5, 1.0), (0.9, 1.0), (0.01, 0.2)];
    for k in [2usize, 4, 8] {
        for j in 0..40u64 {
            let seed = 1_000 * k as u64 + j;
            out.push(random_concave(k, seed, tables[(j % 5) as usize], ranges[(j % 4) as usize]).unwrap());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        for j in 0..20 {
            out.push(random_parametric(&mut rng, k, true, format!("random-exp-k{k}-{j}")));
        }
        for j in 0..10 {
            out.push(random_parametric(&mut rng, k, false, format!("random-linear-k{k}-{j}")));
        }
    }
    out
}

/// Four exponential-saturation arms with asymptotes 0.6, 0.7, 0.8, 1.0 and
/// scales 10, 30, 100, 300.
pub fn fairness_exponential_instance() -> ImabInstance {
    let arms = [(0.6, 10.0), (0.7, 30.0), (0.8, 100.0), (1.0, 300.0)]
        .iter()
        .map(|&(a, s)| RewardFunction::exponential_saturation(a, s).unwrap())
        .collect();
    ImabInstance::new("fairness-exponential", arms).unwrap()
}

/// Four saturating-linear arms with knees 100, 50, 20 and 80.
pub fn fairness_linear_instance() -> ImabInstance {
    let arms = [(1.0, 100.0), (0.5, 50.0), (0.3, 20.0), (0.8, 80.0)]
        .iter()
        .map(|&(cap, knee)| RewardFunction::saturating_linear(cap / knee, cap).unwrap())
        .collect();
    ImabInstance::new("fairness-linear", arms).unwrap()
}

/// Exhaustive allocation search agrees with the best single arm for every
/// horizon `1..=max_t`. Instances whose enumeration would be too large are
/// skipped.
pub fn check_single_arm_optimality(instances: &[ImabInstance], max_t: u64, tol: f64) -> Result<SuiteVerdict> {
    let mut v = SuiteVerdict::new(
        format!("single-arm-optimality: |brute force - best single arm| for T <= {max_t}"),
        BoundKind::AtMost,
        0.0,
    );
    for inst in instances {
        if composition_count(inst.k(), max_t) > DEFAULT_ENUMERATION_LIMIT {
            debug!("{}: enumeration too large, skipped", inst.id());
            continue;
        }
        for t in 1..=max_t {
            let brute = brute_force_opt(inst, t, DEFAULT_ENUMERATION_LIMIT)?;
            let (arm, single) = opt_single_arm(inst, t);
            let gap = (brute.value - single).abs();
            v.observe(gap, || {
                format!("{} T={t}: brute {:?} = {}, arm {} = {}", inst.id(), brute.pulls, brute.value, arm + 1, single)
            });
        }
    }
    Ok(v.finish(tol))
}

/// Linear regret and ratio `>= k/2` on the lower-bound family, for every
/// algorithm. The regret line is skipped for `k <= 2`.
pub fn check_anytime_lower_bound(algorithms: &[Algorithm], cases: &[(usize, u64)]) -> Result<Vec<SuiteVerdict>> {
    let mut out = Vec::new();
    for &(k, t) in cases {
        for &alg in algorithms {
            let w = lower_bound_witness(alg, k, t)?;
            out.push(w.regret);
            out.push(w.ratio);
        }
    }
    Ok(out)
}

/// Round-robin on its adversarial instance: ratio `>= k^2/2`, and the closed
/// forms `OPT = (T+1)/2`, `RR = (T+k)/(2k^2)` (for `k | T`).
pub fn check_round_robin_lower(cases: &[(usize, u64)], tol: f64) -> Result<Vec<SuiteVerdict>> {
    let mut out = Vec::new();
    for &(k, t) in cases {
        let inst = rr_adversarial(k, t)?;
        let m = score_run(&run(Algorithm::RoundRobin, &inst, t)?, &inst)?;
        let bound = (k * k) as f64 / 2.0;
        let mut ratio = SuiteVerdict::new(
            format!("round-robin-lower: OPT/RR on rr-adversarial k={k} T={t}"),
            BoundKind::AtLeast,
            bound,
        );
        match m.ratio {
            Ratio::Finite(r) => ratio.observe(r, || inst.id().to_string()),
            Ratio::Unbounded => ratio.observe(f64::INFINITY, || inst.id().to_string()),
        }
        out.push(ratio.finish(tol));

        let opt_closed = (t as f64 + 1.0) / 2.0;
        let rr_closed = (t as f64 + k as f64) / (2.0 * (k * k) as f64);
        let mut closed = SuiteVerdict::new(
            format!("round-robin-lower: closed forms OPT=(T+1)/2, RR=(T+k)/(2k^2) at k={k} T={t}"),
            BoundKind::AtMost,
            0.0,
        );
        let err = (m.opt_reward - opt_closed).abs().max((m.alg_reward - rr_closed).abs());
        closed.observe(err, || {
            format!("OPT {} vs {}, RR {} vs {}", m.opt_reward, opt_closed, m.alg_reward, rr_closed)
        });
        out.push(closed.finish(tol));
    }
    Ok(out)
}

/// Worst `ratio / (c * k^p)` over every trace prefix at `horizons` with
/// `T >= 2k`. `c k^p` is `8k^2` for round-robin and `200k` for the
/// optimistic policy.
fn normalized_ratio_check(
    name: String,
    instances: &[ImabInstance],
    traces: &[PullTrace],
    horizons: &[u64],
    per_arm: f64,
    power: i32,
    tol: f64,
) -> Result<(SuiteVerdict, (f64, Option<String>))> {
    let mut v = SuiteVerdict::new(name, BoundKind::AtMost, 1.0);
    let mut max_raw = (f64::NEG_INFINITY, None);
    for (inst, trace) in instances.iter().zip(traces) {
        let k = inst.k();
        let scale = per_arm * (k as f64).powi(power);
        for &t in horizons {
            if t < 2 * k as u64 || t > trace.horizon {
                continue;
            }
            let m = score_run(&trace.prefix(t), inst)?;
            match m.ratio {
                Ratio::Finite(r) => {
                    if r > max_raw.0 {
                        max_raw = (r, Some(format!("{} T={t} (k={k})", inst.id())));
                    }
                    v.observe(r / scale, || format!("{} T={t}: ratio {} (k={k})", inst.id(), fmt_num(r)));
                }
                Ratio::Unbounded => v.fail_unbounded(format!("{} T={t}: unbounded ratio", inst.id())),
            }
        }
    }
    Ok((v.finish(tol), max_raw))
}

pub fn check_round_robin_upper(corpus: &CorpusRun<'_>, horizons: &[u64], tol: f64) -> Result<SuiteVerdict> {
    let (v, _) = normalized_ratio_check(
        "round-robin-upper: max OPT/RR / (8k^2)".into(),
        corpus.instances,
        &corpus.round_robin,
        horizons,
        8.0,
        2,
        tol,
    )?;
    Ok(v)
}

/// Proven `200k` bound (asserted), plus the observed maximum ratio and the
/// stated `32k` constant as informational lines.
pub fn check_competitive_ratio(corpus: &CorpusRun<'_>, horizons: &[u64], tol: f64) -> Result<Vec<SuiteVerdict>> {
    let (proven, max_raw) = normalized_ratio_check(
        "competitive-ratio: max OPT/ALG / (200k)".into(),
        corpus.instances,
        &corpus.improving,
        horizons,
        PROVEN_RATIO_PER_ARM,
        1,
        tol,
    )?;
    let (mut stated, _) = normalized_ratio_check(
        "competitive-ratio: max OPT/ALG / (32k), stated constant".into(),
        corpus.instances,
        &corpus.improving,
        horizons,
        STATED_RATIO_PER_ARM,
        1,
        tol,
    )?;
    stated.informational = true;
    stated.pass = true;
    let mut observed = SuiteVerdict::new(
        "competitive-ratio: observed max OPT/ALG against 200k at the largest k",
        BoundKind::AtMost,
        PROVEN_RATIO_PER_ARM * corpus.instances.iter().map(|i| i.k()).max().unwrap_or(1) as f64,
    );
    observed.informational = true;
    observed.instances_tested = proven.instances_tested;
    observed.worst_case = max_raw.0;
    observed.witness = max_raw.1;
    Ok(vec![proven, stated, observed])
}

/// First arm to reach `N + 1` pulls has `Rew_i(N) = OPT(I, N)`, for every
/// `N >= 2` in every optimistic trace.
pub fn check_first_crossing(corpus: &CorpusRun<'_>, tol: f64) -> SuiteVerdict {
    let results: Vec<(usize, Option<String>)> = corpus
        .instances
        .par_iter()
        .zip(&corpus.improving)
        .map(|(inst, trace)| {
            let opt = opt_curve(inst, trace.horizon);
            let v = first_crossing_violations(trace, inst, &opt, tol);
            let first = v.first().map(|x| {
                format!(
                    "{}: N={} crossed by arm {} at t={} with Rew={} but OPT={}",
                    inst.id(),
                    x.n,
                    x.arm + 1,
                    x.t,
                    x.arm_cumulative,
                    x.opt
                )
            });
            (v.len(), first)
        })
        .collect();
    let violations = results.iter().map(|r| r.0).sum();
    let witness = results.into_iter().find_map(|r| r.1);
    SuiteVerdict::zero_violations(
        "first-crossing: violations of Rew_i(N) = OPT(I,N)",
        corpus.instances.len(),
        violations,
        witness,
    )
}

/// Scaled-horizon lower bounds for OPT and each arm on every instance.
pub fn check_horizon_scaling(instances: &[ImabInstance], horizons: &[u64]) -> SuiteVerdict {
    let mut checked = 0;
    let mut skipped = 0;
    let mut violations = 0;
    let mut witness = None;
    for inst in instances {
        for &t in horizons {
            let out = ratio_grid_check(inst, t);
            checked += out.checked;
            skipped += out.skipped;
            violations += out.violations.len();
            if witness.is_none() {
                witness = out.violations.first().map(|v| {
                    format!(
                        "{} {} ({}) alpha={} T={t} n={}: {} < {}",
                        inst.id(),
                        v.subject,
                        v.part,
                        v.alpha,
                        v.n,
                        v.ratio,
                        v.bound
                    )
                });
            }
        }
    }
    if skipped > 0 {
        info!("horizon-scaling: {skipped} zero-denominator cases skipped");
    }
    SuiteVerdict::zero_violations(
        format!("horizon-scaling: violations over {checked} ratio checks ({skipped} zero-reward skipped)"),
        instances.len(),
        violations,
        witness,
    )
}

/// `OPT(I,T) / Rew_i(N_i) <= 200 T^2 / N_i^2` on balanced optimistic runs.
pub fn check_pathwise(corpus: &CorpusRun<'_>, horizons: &[u64]) -> SuiteVerdict {
    let mut applicable = 0;
    let mut skipped = 0;
    let mut violations = 0;
    let mut witness = None;
    for (inst, trace) in corpus.instances.iter().zip(&corpus.improving) {
        for &t in horizons {
            if t > trace.horizon {
                continue;
            }
            let out = pathwise_check(&trace.prefix(t), inst);
            if !out.applies {
                continue;
            }
            applicable += 1;
            skipped += out.skipped;
            violations += out.violations.len();
            if witness.is_none() {
                witness = out.violations.first().map(|v| {
                    format!("{} T={t} arm {} N={}: {} > {}", inst.id(), v.arm + 1, v.pulls, v.ratio, v.bound)
                });
            }
        }
    }
    if skipped > 0 {
        info!("pathwise: {skipped} zero-reward arms skipped");
    }
    SuiteVerdict::zero_violations(
        format!("pathwise: violations over {applicable} balanced runs ({skipped} zero-reward arms skipped)"),
        applicable,
        violations,
        witness,
    )
}

/// Every arm ends within epsilon of its asymptote (exponential instance) or
/// exactly at it (saturating-linear instance).
pub fn check_fairness() -> Result<Vec<SuiteVerdict>> {
    let mut out = Vec::new();
    for (inst, horizon, bound) in [
        (fairness_exponential_instance(), FAIRNESS_EXP_T, FAIRNESS_EPSILON),
        (fairness_linear_instance(), FAIRNESS_LINEAR_T, 0.0),
    ] {
        let trace = run(Algorithm::ImprovingAnytime, &inst, horizon)?;
        let m = score_run(&trace, &inst)?;
        let mut v = SuiteVerdict::new(
            format!("fairness: max gap a_i - f_i(N_i(T)) on {} at T={horizon}", inst.id()),
            BoundKind::AtMost,
            bound,
        );
        for (i, &g) in m.fairness_gaps.iter().enumerate() {
            v.observe(g, || format!("arm {} after {} pulls", i + 1, m.pulls[i]));
        }
        // exact: no tolerance on either line
        out.push(v.finish(0.0));
    }
    Ok(out)
}

/// `int_0^T f <= Rew(T) <= int_0^{T+1} f` for exponential arms, whose
/// continuous extension integrates to `a (T - s (1 - exp(-T/s)))`.
pub fn check_riemann_sandwich(tol: f64) -> SuiteVerdict {
    let integral = |a: f64, s: f64, t: f64| a * (t + s * (-t / s).exp_m1());
    let mut v = SuiteVerdict::new("riemann-sandwich: max excess outside integral bracket", BoundKind::AtMost, 0.0);
    for (a, s) in [(1.0, 1.0), (0.8, 50.0), (0.9, 20.0), (0.3, 0.5), (1.0, 300.0), (0.6, 1e-3)] {
        let f = RewardFunction::exponential_saturation(a, s).expect("valid parameters");
        for t in [1u64, 10, 100, 1000] {
            let rew = f.cumulative(t);
            let lo = integral(a, s, t as f64);
            let hi = integral(a, s, t as f64 + 1.0);
            let excess = (lo - rew).max(rew - hi);
            v.observe(excess, || format!("a={a} s={s} T={t}: {lo} <= {rew} <= {hi}"));
        }
    }
    v.finish(tol)
}

/// Always pulling arm 2 of the two-arm demo: zero external regret at every
/// step from `t = 2`, yet policy regret 85.5 at `T = 100`.
pub const DEMO_POLICY_REGRET_T100: f64 = 85.5;

pub fn check_regret_demo(tol: f64) -> Result<Vec<SuiteVerdict>> {
    let inst = regret_demo_two_arm();
    let trace = run(Algorithm::FixedArm(1), &inst, 100)?;
    let ext = external_regret_per_step(&trace, &inst);
    let mut external = SuiteVerdict::new(
        "regret-demo: max per-step external regret of fixed_arm(2), t >= 2",
        BoundKind::AtMost,
        0.0,
    );
    for (i, &r) in ext.iter().enumerate().skip(1) {
        external.observe(r, || format!("t={}", i + 1));
    }
    let m = score_run(&trace, &inst)?;
    let mut policy = SuiteVerdict::new(
        format!("regret-demo: |policy regret at T=100 - {DEMO_POLICY_REGRET_T100}|"),
        BoundKind::AtMost,
        0.0,
    );
    policy.observe((m.policy_regret - DEMO_POLICY_REGRET_T100).abs(), || {
        format!("policy regret {}", fmt_num(m.policy_regret))
    });
    // linear growth: the per-step increase stays bounded away from zero
    let half = score_run(&trace.prefix(50), &inst)?;
    let mut growth = SuiteVerdict::new(
        "regret-demo: policy regret slope between T=50 and T=100",
        BoundKind::AtLeast,
        0.5,
    );
    growth.observe((m.policy_regret - half.policy_regret) / 50.0, || {
        format!("{} -> {}", fmt_num(half.policy_regret), fmt_num(m.policy_regret))
    });
    Ok(vec![external.finish(0.0), policy.finish(tol), growth.finish(0.0)])
}

/// Runs the requested checks over `corpus`. Family-specific checks (lower
/// bound, round-robin adversary, fairness, Riemann, demo) use their fixed
/// instances; `lower_bound_cases` overrides the lower-bound `(k, T)` pairs.
pub fn verify_corpus(
    corpus: &CorpusRun<'_>,
    bounds: &[BoundName],
    horizons: &[u64],
    tol: &Tolerances,
    lower_bound_cases: Option<&[(usize, u64)]>,
) -> Result<Vec<SuiteVerdict>> {
    let mut out = Vec::new();
    for &b in bounds {
        match b {
            BoundName::SingleArmOptimality => {
                let small: Vec<ImabInstance> = corpus.instances.iter().filter(|i| i.k() <= 4).cloned().collect();
                out.push(check_single_arm_optimality(&small, BRUTE_FORCE_MAX_T, tol.oracle)?);
            }
            BoundName::AnytimeLowerBound => out.extend(check_anytime_lower_bound(
                &all_algorithms(),
                lower_bound_cases.unwrap_or(&LOWER_BOUND_CASES),
            )?),
            BoundName::RoundRobinLower => out.extend(check_round_robin_lower(&ROUND_ROBIN_CASES, tol.dominance)?),
            BoundName::RoundRobinUpper => out.push(check_round_robin_upper(corpus, horizons, tol.dominance)?),
            BoundName::CompetitiveRatio => out.extend(check_competitive_ratio(corpus, horizons, tol.dominance)?),
            BoundName::FirstCrossing => out.push(check_first_crossing(corpus, tol.first_crossing)),
            BoundName::HorizonScaling => out.push(check_horizon_scaling(corpus.instances, &SCALING_HORIZONS)),
            BoundName::Pathwise => out.push(check_pathwise(corpus, horizons)),
            BoundName::Fairness => out.extend(check_fairness()?),
            BoundName::RiemannSandwich => out.push(check_riemann_sandwich(tol.riemann)),
            BoundName::RegretDemo => out.extend(check_regret_demo(tol.dominance)?),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub lower_bound_cases: Option<Vec<(usize, u64)>>,
    pub workers: Option<usize>,
    pub bounds: Option<Vec<BoundName>>,
}

/// The full built-in verification suite over [`verification_corpus`] (and
/// [`small_corpus`] for the exhaustive check).
pub fn run_default_suite(opts: &SuiteOptions) -> Result<Vec<SuiteVerdict>> {
    let pool = build_pool(opts.workers)?;
    pool.install(|| {
        let tol = Tolerances::default();
        let bounds = opts.bounds.clone().unwrap_or_else(|| BoundName::ALL.to_vec());
        let corpus_instances = verification_corpus();
        let max_t = *CORPUS_HORIZONS.last().unwrap();
        let corpus = CorpusRun::simulate(&corpus_instances, max_t)?;
        let mut out = Vec::new();
        for b in bounds {
            if b == BoundName::SingleArmOptimality {
                out.push(check_single_arm_optimality(&small_corpus(), BRUTE_FORCE_MAX_T, tol.oracle)?);
            } else {
                out.extend(verify_corpus(
                    &corpus,
                    &[b],
                    &CORPUS_HORIZONS,
                    &tol,
                    opts.lower_bound_cases.as_deref(),
                )?);
            }
        }
        Ok(out)
    })
}

/// Tolerance for replaying traces read back from CSV (12 significant digits).
pub const TRACE_REPLAY_TOLERANCE: f64 = 1e-9;

/// Checks a recorded trace against its instance: every reward replays, the
/// sidecar totals agree, the named algorithm reproduces the same pulls, and
/// (for the optimistic policy) no first-crossing violation occurs.
pub fn verify_trace(
    trace: &PullTrace,
    summary: Option<&TraceSummary>,
    instance: &ImabInstance,
    tol: &Tolerances,
) -> Result<Vec<SuiteVerdict>> {
    let id = instance.id();
    let mut out = Vec::new();
    let replay = trace.replay(instance, TRACE_REPLAY_TOLERANCE);
    out.push(SuiteVerdict::zero_violations(
        format!("trace replay: rewards of {} against {id}", trace.algorithm),
        1,
        usize::from(replay.is_err()),
        replay.err().map(|e| e.to_string()),
    ));

    if let Some(s) = summary {
        let mut bad = Vec::new();
        if s.final_pulls != trace.final_pulls {
            bad.push(format!("sidecar pulls {:?} but trace has {:?}", s.final_pulls, trace.final_pulls));
        }
        if s.horizon != trace.horizon {
            bad.push(format!("sidecar T={} but trace has {} steps", s.horizon, trace.horizon));
        }
        let total = trace.total_reward();
        if (s.total_reward - total).abs() > TRACE_REPLAY_TOLERANCE * total.abs().max(1.0) {
            bad.push(format!("sidecar total {} but steps sum to {}", s.total_reward, total));
        }
        out.push(SuiteVerdict::zero_violations(
            "trace sidecar: pulls, horizon and total agree",
            1,
            bad.len(),
            bad.into_iter().next(),
        ));
    }

    let algorithm: Option<Algorithm> = trace.algorithm.parse().ok();
    match algorithm {
        Some(alg) if alg.check_arms(instance.k()).is_ok() => {
            let expected = run(alg, instance, trace.horizon)?;
            let diverged = expected.steps.iter().zip(&trace.steps).find(|(a, b)| a.arm != b.arm);
            out.push(SuiteVerdict::zero_violations(
                format!("trace reproduction: {alg} pulls the recorded arms"),
                1,
                usize::from(diverged.is_some()),
                diverged.map(|(a, b)| format!("t={}: {alg} pulls arm {} but trace has arm {}", a.t, a.arm + 1, b.arm + 1)),
            ));
        }
        _ => out.push(SuiteVerdict::skipped(
            "trace reproduction",
            BoundKind::AtMost,
            0.0,
            format!("unknown algorithm `{}`", trace.algorithm),
        )),
    }

    // uses only the recorded arm sequence, so it also runs on traces whose
    // rewards fail to replay
    let bound = "first-crossing: violations of Rew_i(N) = OPT(I,N) in trace";
    if algorithm == Some(Algorithm::ImprovingAnytime) && trace.k() == instance.k() {
        let opt = opt_curve(instance, trace.horizon);
        let v = first_crossing_violations(trace, instance, &opt, tol.first_crossing);
        let witness = v.first().map(|x| {
            format!(
                "N={} crossed by arm {} at t={} with Rew={} but OPT={}",
                x.n,
                x.arm + 1,
                x.t,
                x.arm_cumulative,
                x.opt
            )
        });
        out.push(SuiteVerdict::zero_violations(bound, 1, v.len(), witness));
    } else {
        out.push(SuiteVerdict::skipped(bound, BoundKind::AtMost, 0.0, "only holds for improving_anytime"));
    }
    Ok(out)
}
