//! Core of the ward bed-assignment toolkit.
//!
//! Everything in this crate is pure computation over in-memory values and
//! builds without `std` (an allocator is required). It contains:
//!
//! - [`domain`]: patient types, bed pools, compatibility tiers, and the
//!   per-iteration assignment instance and plan types;
//! - [`probability`]: bed availability-time distributions and the
//!   log-probability weights of meeting a delay target;
//! - [`solver`]: an exact solver for the budget-constrained joint-probability
//!   assignment program, the minimum-overflow-budget assignment problem, the
//!   dynamic budget rule, and within-type FCFS normalization;
//! - [`policies`]: bed-assignment policies reacting to decision triggers
//!   over a read-only ward snapshot;
//! - [`rates`]: periodic arrival intensities and their integrals.
//!
//! The simulator, configuration files, and command-line tools live in the
//! `wardflow` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod domain;
pub mod policies;
pub mod probability;
pub mod rates;
pub mod solver;
#[cfg(any(test, feature = "testkit"))]
pub mod testkit;
pub mod time;

pub use domain::{
    AccommodationClass, AssignmentInstance, AssignmentPlan, Availability, BedId, BedPool,
    BoardedPatient, CandidateBed, CompatibilityMap, DomainError, Edge, Gender, GenderLabel,
    Hospital, LogWeight, Objective, PatientId, PatientType, PoolId, Source, Specialty, Tier,
    TierCosts, TypeId, TypeTiers,
};
pub use probability::DischargeHourDistribution;
pub use time::Minutes;
