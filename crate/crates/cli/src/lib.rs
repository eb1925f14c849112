//! Experiment harness for the causal discovery toolkit: configuration,
//! benchmark execution, and result emission.

pub mod config;
pub mod emit;
pub mod run;
