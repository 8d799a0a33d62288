use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithms::Algorithm;
use crate::error::{Error, Result};
use crate::instance::{self, ImabInstance, LowerBoundVariant};

/// A named instance generator with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    LowerBound {
        k: usize,
        #[serde(rename = "T")]
        horizon: u64,
        #[serde(default)]
        variant: LowerBoundVariant,
    },
    RrAdversarial {
        k: usize,
        #[serde(rename = "T")]
        horizon: u64,
    },
    RegretDemo,
    Random {
        k: usize,
        /// Falls back to the config's seed.
        #[serde(default)]
        seed: Option<u64>,
        max_table: usize,
        #[serde(default = "default_asymptote_range")]
        asymptote_range: (f64, f64),
    },
}

pub fn default_asymptote_range() -> (f64, f64) {
    (0.1, 1.0)
}

impl GeneratorSpec {
    pub fn generate(&self, default_seed: u64) -> Result<Vec<ImabInstance>> {
        match *self {
            GeneratorSpec::LowerBound { k, horizon, variant } => instance::lower_bound_family(k, horizon, variant),
            GeneratorSpec::RrAdversarial { k, horizon } => Ok(vec![instance::rr_adversarial(k, horizon)?]),
            GeneratorSpec::RegretDemo => Ok(vec![instance::regret_demo_two_arm()]),
            GeneratorSpec::Random {
                k,
                seed,
                max_table,
                asymptote_range,
            } => Ok(vec![instance::random_concave(
                k,
                seed.unwrap_or(default_seed),
                max_table,
                asymptote_range,
            )?]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceSource {
    Generate(GeneratorSpec),
    /// Relative paths resolve against the config file's directory.
    File(PathBuf),
}

/// The checks `verify` knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundName {
    /// Exhaustive allocation search agrees with the best single arm.
    SingleArmOptimality,
    /// Every algorithm has linear regret and ratio `>= k/2` on some member of
    /// the lower-bound family.
    AnytimeLowerBound,
    /// Round-robin's ratio reaches `k^2/2` on its adversarial instance.
    RoundRobinLower,
    /// Round-robin's ratio stays within `8k^2`.
    RoundRobinUpper,
    /// The optimistic policy's ratio stays within `200k`.
    CompetitiveRatio,
    /// The first arm to reach `N + 1` pulls is optimal for horizon `N`.
    FirstCrossing,
    /// Scaled-horizon lower bounds on OPT and per-arm rewards.
    HorizonScaling,
    /// Per-arm ratio bound on balanced runs.
    Pathwise,
    /// Every arm approaches its asymptote.
    Fairness,
    /// Integral bracketing of cumulative rewards.
    RiemannSandwich,
    /// Zero external regret yet linear policy regret.
    RegretDemo,
}

impl BoundName {
    pub const ALL: [BoundName; 11] = [
        BoundName::SingleArmOptimality,
        BoundName::AnytimeLowerBound,
        BoundName::RoundRobinLower,
        BoundName::RoundRobinUpper,
        BoundName::CompetitiveRatio,
        BoundName::FirstCrossing,
        BoundName::HorizonScaling,
        BoundName::Pathwise,
        BoundName::Fairness,
        BoundName::RiemannSandwich,
        BoundName::RegretDemo,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundName::SingleArmOptimality => "single-arm-optimality",
            BoundName::AnytimeLowerBound => "anytime-lower-bound",
            BoundName::RoundRobinLower => "round-robin-lower",
            BoundName::RoundRobinUpper => "round-robin-upper",
            BoundName::CompetitiveRatio => "competitive-ratio",
            BoundName::FirstCrossing => "first-crossing",
            BoundName::HorizonScaling => "horizon-scaling",
            BoundName::Pathwise => "pathwise",
            BoundName::Fairness => "fairness",
            BoundName::RiemannSandwich => "riemann-sandwich",
            BoundName::RegretDemo => "regret-demo",
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundName::ALL
            .iter()
            .copied()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown bound `{s}`")))
    }
}

impl Serialize for BoundName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for BoundName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Brute-force vs single-arm optimum.
    pub oracle: f64,
    /// OPT dominating ALG, ratio bounds.
    pub dominance: f64,
    /// First-crossing equality `Rew_i(N) = OPT(I, N)`.
    pub first_crossing: f64,
    /// Integral bracketing of cumulative rewards.
    pub riemann: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            oracle: 1e-10,
            dominance: 1e-9,
            first_crossing: 1e-9,
            riemann: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceSource>,
    pub algorithms: Vec<Algorithm>,
    pub horizons: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub verifications: Vec<BoundName>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::json("config", e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty() {
            return Err(Error::Config("no instance sources".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("algorithm list is empty".into()));
        }
        if self.horizons.is_empty() {
            return Err(Error::Config("horizon list is empty".into()));
        }
        if self.horizons.contains(&0) {
            return Err(Error::Config("horizons must be positive".into()));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("horizons must be strictly increasing".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.algorithms.iter().find(|a| !seen.insert(**a)) {
            return Err(Error::Config(format!("algorithm `{dup}` listed twice")));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Generates and loads every instance. Fails before any simulation on an
    /// invalid source, a duplicate id, or a fixed-arm index past some
    /// instance's arm count.
    pub fn load_instances(&self, base_dir: &Path) -> Result<Vec<ImabInstance>> {
        let mut out = Vec::new();
        for src in &self.instances {
            match src {
                InstanceSource::Generate(spec) => out.extend(spec.generate(self.seed)?),
                InstanceSource::File(p) => {
                    let path = if p.is_absolute() { p.clone() } else { base_dir.join(p) };
                    out.push(ImabInstance::load(&path)?);
                }
            }
        }
        let mut ids = HashSet::new();
        for inst in &out {
            if !ids.insert(inst.id().to_string()) {
                return Err(Error::Config(format!("duplicate instance id `{}`", inst.id())));
            }
            for alg in &self.algorithms {
                alg.check_arms(inst.k())?;
            }
        }
        Ok(out)
    }

    pub fn max_horizon(&self) -> u64 {
        *self.horizons.last().expect("validated nonempty")
    }

    pub fn enabled_bounds(&self) -> Vec<BoundName> {
        if self.verifications.is_empty() {
            BoundName::ALL.to_vec()
        } else {
            self.verifications.clone()
        }
    }
}
