//! Experiment configuration, execution, verification and output.

pub mod config;
pub mod experiment;
pub mod output;
pub mod verify;

pub use config::{BoundName, ExperimentConfig, GeneratorSpec, InstanceSource, Tolerances};
pub use experiment::{run_experiment, ExperimentOutcome, ExperimentReport, RunTiming};
pub use verify::{run_default_suite, verify_corpus, verify_trace, CorpusRun, SuiteOptions};
