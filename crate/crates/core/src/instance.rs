//! Problem instances and the generators that build them.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reward::RewardFunction;

/// `k` arms, each a rising reward function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct ImabInstance {
    id: String,
    arms: Vec<RewardFunction>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    id: String,
    k: usize,
    arms: Vec<RewardFunction>,
}

impl TryFrom<RawInstance> for ImabInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        if raw.k != raw.arms.len() {
            return Err(Error::InvalidInstance {
                id: raw.id,
                reason: format!("k = {} but {} arms listed", raw.k, raw.arms.len()),
            });
        }
        ImabInstance::new(raw.id, raw.arms)
    }
}

impl From<ImabInstance> for RawInstance {
    fn from(i: ImabInstance) -> Self {
        RawInstance {
            k: i.arms.len(),
            id: i.id,
            arms: i.arms,
        }
    }
}

impl ImabInstance {
    /// Arms are validated on construction of each [`RewardFunction`]; this
    /// only rejects an empty arm list.
    pub fn new(id: impl Into<String>, arms: Vec<RewardFunction>) -> Result<Self> {
        let id = id.into();
        if arms.is_empty() {
            return Err(Error::InvalidInstance {
                id,
                reason: "an instance needs at least one arm".into(),
            });
        }
        Ok(Self { id, arms })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn k(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[RewardFunction] {
        &self.arms
    }

    pub fn arm(&self, i: usize) -> &RewardFunction {
        &self.arms[i]
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::json(format!("instance {}", self.id), e))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::json("instance", e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
    }
}

/// Slope convention for [`lower_bound_family`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerBoundVariant {
    /// Slope `1/T`; every non-special arm saturates at `1/k` after `T/k` pulls.
    #[default]
    HorizonSlope,
    /// Slope `1/(kN)` with `N = ceil(T/k)`.
    BlockSlope,
}

/// The `k` instances `I_1..I_k` behind the anytime lower bound. In `I_m` arm
/// `m` keeps rising to 1 while every other arm saturates at `1/k`; all arms
/// look identical for the first `ceil(T/k)` pulls.
pub fn lower_bound_family(k: usize, horizon: u64, variant: LowerBoundVariant) -> Result<Vec<ImabInstance>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("lower-bound family needs k >= 2, got {k}")));
    }
    if horizon < k as u64 {
        return Err(Error::InvalidParameter(format!(
            "lower-bound family needs T >= k, got T = {horizon}, k = {k}"
        )));
    }
    let slope = match variant {
        LowerBoundVariant::HorizonSlope => 1.0 / horizon as f64,
        LowerBoundVariant::BlockSlope => {
            let n = horizon.div_ceil(k as u64);
            1.0 / (k as u64 * n) as f64
        }
    };
    let cap = 1.0 / k as f64;
    let tag = match variant {
        LowerBoundVariant::HorizonSlope => "",
        LowerBoundVariant::BlockSlope => "-block",
    };
    (0..k)
        .map(|m| {
            let arms = (0..k)
                .map(|i| RewardFunction::saturating_linear(slope, if i == m { 1.0 } else { cap }))
                .collect::<Result<Vec<_>>>()?;
            ImabInstance::new(format!("lower-bound{tag}-k{k}-T{horizon}-m{}", m + 1), arms)
        })
        .collect()
}

/// Round-robin's bad case: arm 1 rises as `n/T`, all other arms pay nothing.
pub fn rr_adversarial(k: usize, horizon: u64) -> Result<ImabInstance> {
    if k < 2 || horizon < 2 * k as u64 {
        return Err(Error::InvalidParameter(format!(
            "rr-adversarial needs k >= 2 and T >= 2k, got k = {k}, T = {horizon}"
        )));
    }
    let mut arms = vec![RewardFunction::saturating_linear(1.0 / horizon as f64, 1.0)?];
    for _ in 1..k {
        arms.push(RewardFunction::constant(0.0)?);
    }
    ImabInstance::new(format!("rr-adversarial-k{k}-T{horizon}"), arms)
}

/// Two arms separating policy regret from external regret:
/// `f_1(n) = n/10` (capped at 1) and `f_2(n) = 0.1`.
pub fn regret_demo_two_arm() -> ImabInstance {
    let arms = vec![
        RewardFunction::saturating_linear(0.1, 1.0).expect("valid parameters"),
        RewardFunction::tabulated(vec![0.1]).expect("valid table"),
    ];
    ImabInstance::new("regret-demo", arms).expect("two arms")
}

/// Fixed-point scale for generated tables; every value is an integer
/// multiple of `2^-40`, so prefix sums and differences are exact.
const TABLE_SCALE: f64 = (1u64 << 40) as f64;

/// Random tabulated instance inside the improving class.
///
/// Per arm: draw an asymptote `a` from `asymptote_range`, draw `max_table`
/// nonnegative increments, sort them in decreasing order, and rescale so the
/// prefix sums end at (at most) `a`. Deterministic for a given seed.
pub fn random_concave(
    k: usize,
    seed: u64,
    max_table: usize,
    asymptote_range: (f64, f64),
) -> Result<ImabInstance> {
    let (lo, hi) = asymptote_range;
    if k == 0 {
        return Err(Error::InvalidParameter("random instance needs k >= 1".into()));
    }
    if max_table < 2 {
        return Err(Error::InvalidParameter(format!("max_table must be >= 2, got {max_table}")));
    }
    if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "asymptote range must be a sub-interval of (0, 1], got ({lo}, {hi})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arms = Vec::with_capacity(k);
    for _ in 0..k {
        let a = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
        // curvature: exponents above 1 concentrate mass in a few early increments
        let shape: f64 = rng.gen_range(0.5..4.0);
        let mut incs: Vec<f64> = (0..max_table).map(|_| rng.gen::<f64>().powf(shape)).collect();
        incs.sort_by(|x, y| y.total_cmp(x));
        let total: f64 = incs.iter().sum();
        let budget = (a * TABLE_SCALE).floor();
        let scale = if total > 0.0 { budget / total } else { 0.0 };
        let mut acc: u64 = 0;
        let values = incs
            .iter()
            .map(|d| {
                // floor keeps the integer increments sorted and the sum within budget
                acc += (d * scale).floor() as u64;
                acc as f64 / TABLE_SCALE
            })
            .collect();
        arms.push(RewardFunction::tabulated(values)?);
    }
    ImabInstance::new(format!("random-k{k}-seed{seed}"), arms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reward::{validate, DEFAULT_SAMPLE_LIMIT};

    #[test]
    fn lower_bound_shapes() {
        let fam = lower_bound_family(4, 100, LowerBoundVariant::HorizonSlope).unwrap();
        assert_eq!(fam.len(), 4);
        let i2 = &fam[1];
        assert_eq!(i2.arm(1).eval(100), 1.0);
        for a in [0, 2, 3] {
            for n in [25, 26, 100, 1000] {
                assert_eq!(i2.arm(a).eval(n), 0.25);
            }
            assert!(i2.arm(a).eval(24) < 0.25);
        }
        // only the special arm differs between members
        for m in 0..4 {
            for mp in 0..4 {
                for i in 0..4 {
                    if i != m && i != mp {
                        assert_eq!(fam[m].arm(i), fam[mp].arm(i));
                    }
                }
            }
        }
    }

    #[test]
    fn lower_bound_non_special_arms_never_exceed_one_over_k() {
        for (k, t) in [(2, 10), (3, 10), (4, 100), (8, 400), (5, 17)] {
            for variant in [LowerBoundVariant::HorizonSlope, LowerBoundVariant::BlockSlope] {
                let fam = lower_bound_family(k, t, variant).unwrap();
                for (m, inst) in fam.iter().enumerate() {
                    for (i, arm) in inst.arms().iter().enumerate() {
                        if i == m {
                            continue;
                        }
                        for n in 1..=3 * t {
                            assert!(arm.eval(n) <= 1.0 / k as f64, "k={k} T={t} n={n}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn main_text_variant_uses_k_n_slope() {
        let fam = lower_bound_family(3, 10, LowerBoundVariant::BlockSlope).unwrap();
        // N = 4, slope 1/12
        let special = fam[0].arm(0);
        assert!((special.eval(6) - 0.5).abs() < 1e-15);
        assert_eq!(special.eval(12), 1.0);
        assert_eq!(fam[0].arm(1).saturation_index(), Some(4));
    }

    #[test]
    fn generator_parameter_errors() {
        assert!(lower_bound_family(1, 10, LowerBoundVariant::HorizonSlope).is_err());
        assert!(lower_bound_family(4, 3, LowerBoundVariant::HorizonSlope).is_err());
        assert!(rr_adversarial(1, 10).is_err());
        assert!(rr_adversarial(3, 5).is_err());
        assert!(random_concave(2, 0, 1, (0.5, 1.0)).is_err());
        assert!(random_concave(2, 0, 10, (0.0, 1.0)).is_err());
        assert!(random_concave(2, 0, 10, (0.8, 0.5)).is_err());
    }

    #[test]
    fn rr_adversarial_shape() {
        let inst = rr_adversarial(3, 30).unwrap();
        assert_eq!(inst.k(), 3);
        assert!((inst.arm(0).eval(15) - 0.5).abs() < 1e-15);
        assert_eq!(inst.arm(1).eval(1), 0.0);
        assert_eq!(inst.arm(2).eval(99), 0.0);
    }

    #[test]
    fn random_instances_are_valid_and_deterministic() {
        for seed in 0..50 {
            let a = random_concave(3, seed, 40, (0.2, 1.0)).unwrap();
            let b = random_concave(3, seed, 40, (0.2, 1.0)).unwrap();
            assert_eq!(a, b);
            for arm in a.arms() {
                let r = validate(arm.spec(), DEFAULT_SAMPLE_LIMIT);
                assert!(r.ok, "seed {seed}: {r}");
                assert!(arm.asymptote() <= 1.0 && arm.asymptote() >= 0.0);
            }
        }
        assert_ne!(
            random_concave(3, 1, 40, (0.2, 1.0)).unwrap(),
            random_concave(3, 2, 40, (0.2, 1.0)).unwrap()
        );
    }

    #[test]
    fn instance_json_round_trip_is_exact() {
        let inst = random_concave(4, 9, 30, (0.1, 1.0)).unwrap();
        let text = inst.to_json().unwrap();
        let back = ImabInstance::from_json(&text).unwrap();
        assert_eq!(inst, back);
        assert_eq!(text, back.to_json().unwrap());
    }

    #[test]
    fn instance_json_rejects_mismatched_k() {
        let text = r#"{"id":"x","k":2,"arms":[{"kind":"constant","params":{"value":0.5}}]}"#;
        assert!(ImabInstance::from_json(text).is_err());
        let text = r#"{"id":"x","k":0,"arms":[]}"#;
        assert!(ImabInstance::from_json(text).is_err());
    }
}
