//! Verification harness: step-exact co-simulation of an RNN against its
//! compiled Transformers, randomized campaigns, the reachable-output
//! enumeration for attention without a residual, and the task fixtures.

pub mod ablation;
pub mod cosim;
pub mod fixtures;
pub mod fuzz;
pub mod pipeline;
pub mod reachable;

pub use ablation::{ablation_demo, ablation_demo_on, AblationReport, AblationRun};
pub use cosim::{cosimulate, cosimulate_traces, Cosim, Mismatch, Verdict, VerifyReport};
pub use fixtures::{copy_alphabet, copy_fixture, copy_replay, counting_fixture, CopyLayout};
pub use fuzz::{check_case, fuzz_case, run_fuzz, FuzzCase, FuzzConfig, FuzzOutcome, FuzzSummary};
pub use pipeline::{PipelineOutcome, TmPipeline};
pub use reachable::{enumerate_reachable, enumerate_reachable_with, ReachableSet, MAX_VALUES};
