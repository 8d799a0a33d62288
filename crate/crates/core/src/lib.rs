//! Simulation and verification toolkit for improving multi-armed bandits:
//! bandits whose deterministic rewards rise, with diminishing returns, in the
//! number of times each arm has been pulled.
//!
//! * [`reward`]: the rising reward-function class and its prefix sums.
//! * [`instance`]: problem instances and adversarial / random generators.
//! * [`oracle`]: offline optima, including an exhaustive allocation search.
//! * [`algorithms`]: the anytime optimistic policy, baselines, the simulator.
//! * [`metrics`]: regret, competitive ratio, fairness gaps and bound checks.
//! * [`harness`]: experiment configs, sweeps, verification suites and I/O.

pub mod algorithms;
pub mod error;
pub mod format;
pub mod harness;
pub mod instance;
pub mod metrics;
pub mod oracle;
pub mod reward;
pub mod summation;

pub use algorithms::{run, Algorithm, AlgorithmState, PullTrace, Step, TraceSummary};
pub use error::{Error, Result};
pub use instance::{lower_bound_family, random_concave, regret_demo_two_arm, rr_adversarial, ImabInstance, LowerBoundVariant};
pub use metrics::{score_run, Ratio, RunMetrics, SuiteVerdict};
pub use oracle::{brute_force_opt, opt_curve, opt_single_arm, Allocation, OptimalReport};
pub use reward::{RewardFunction, RewardSpec, ValidationReport};
