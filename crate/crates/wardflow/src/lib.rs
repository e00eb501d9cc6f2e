//! Inpatient ward simulator.
//!
//! Loads a hospital configuration, runs bed-assignment policies from
//! `wardflow-core` through a discrete-event model of the wards, and
//! summarizes waiting times and overflow rates.

pub mod cli;
pub mod config;
pub mod engine;
pub mod experiment;
pub mod format;
pub mod metrics;
pub mod policy;
pub mod sampling;
pub mod stats;
