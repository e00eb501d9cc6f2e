//! Bed-assignment policies.
//!
//! A policy reacts to [`DecisionTrigger`]s raised by a simulator (or a live
//! system) and returns directives over a read-only [`WardSnapshot`]:
//!
//! - [`PModelPolicy`]: the probability-maximizing policy with a dynamic
//!   overflow budget;
//! - [`BmuPolicy`]: the bed management unit's rule-based practice, with
//!   probabilistic reservations and evening overflow rounds;
//! - [`ThresholdPolicy`]: individual overflow once boarding time passes a
//!   time-of-day dependent threshold.
//!
//! Early-discharge variants are the BMU policy run against a reshaped
//! discharge-hour distribution, see [`early_discharge_transform`].

mod bmu;
mod early;
mod pmodel;
mod threshold;
#[cfg(test)]
mod testutil;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::domain::{BedId, Hospital, PatientId, PoolId, Source, TypeId};
use crate::probability::DischargeHourDistribution;
use crate::rates::ArrivalIntensity;
use crate::solver::SolverError;
use crate::time::Minutes;

pub use bmu::{bmu_reserve_probability, BmuPolicy};
pub use early::{early_discharge_transform, EarlyDischarge};
pub use pmodel::{PModelParams, PModelPolicy};
pub use threshold::{ThresholdPolicy, ThresholdSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriggerKind {
    /// A bed became free with nobody assigned to it.
    BedFreed,
    /// A patient joined the queue while some eligible bed was free.
    RequestWithAvailableBed,
    /// A patient joined the queue and no eligible bed was free.
    Request,
    /// A time requested through [`AssignmentPolicy::check_time`] was reached
    /// while the patient was still waiting.
    TargetImminent,
    /// A scheduled overflow round (see [`AssignmentPolicy::overflow_round_hours`]).
    OverflowRound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Patient(PatientId),
    Bed(BedId),
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecisionTrigger {
    pub kind: TriggerKind,
    pub subject: Subject,
    pub time: Minutes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Directive {
    /// Send the patient to the free bed now.
    Assign { patient: PatientId, bed: BedId },
    /// Hold the occupied bed for the patient, who moves in when it frees.
    Reserve { patient: PatientId, bed: BedId },
    Hold { patient: PatientId },
    IdleBed { bed: BedId },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PolicyDecision {
    pub directives: Vec<Directive>,
}

impl PolicyDecision {
    pub fn none() -> Self {
        PolicyDecision::default()
    }

    pub fn assignments(&self) -> impl Iterator<Item = (PatientId, BedId)> + '_ {
        self.directives.iter().filter_map(|d| match *d {
            Directive::Assign { patient, bed } => Some((patient, bed)),
            _ => None,
        })
    }

    pub fn reservations(&self) -> impl Iterator<Item = (PatientId, BedId)> + '_ {
        self.directives.iter().filter_map(|d| match *d {
            Directive::Reserve { patient, bed } => Some((patient, bed)),
            _ => None,
        })
    }
}

/// A patient in the queue with no bed assigned or reserved.
#[derive(Debug, Clone, PartialEq)]
pub struct WaitingPatient {
    pub id: PatientId,
    pub type_id: TypeId,
    /// Time the request entered the queue; boarding time counts from here.
    pub request_time: Minutes,
    /// Time the bed was requested, before any pre-allocation delay.
    pub requested: Minutes,
    pub source: Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BedStatus {
    Free,
    /// Assigned; the patient is being transferred.
    InTransfer,
    /// Occupied. The discharge day is known from the day after admission on.
    Occupied { discharge_day: Option<i64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BedView {
    pub id: BedId,
    pub pool: PoolId,
    pub status: BedStatus,
    /// Patient holding a reservation on this bed.
    pub claimed_by: Option<PatientId>,
}

impl BedView {
    /// Free and not reserved.
    pub fn is_open(&self) -> bool {
        self.status == BedStatus::Free && self.claimed_by.is_none()
    }
}

/// Read-only ward state at a decision time.
#[derive(Debug, Clone, Copy)]
pub struct WardSnapshot<'a> {
    pub now: Minutes,
    pub hospital: &'a Hospital,
    /// Waiting patients ordered by `requested`, then id.
    pub waiting: &'a [WaitingPatient],
    /// All beds, ordered by pool and then id.
    pub beds: &'a [BedView],
    /// Discharge-hour distribution the policy may assume.
    pub discharge: &'a DischargeHourDistribution,
    /// Expected request intensity, for look-ahead budgets.
    pub arrivals: &'a ArrivalIntensity,
}

impl<'a> WardSnapshot<'a> {
    pub fn beds_in_pool(&self, pool: PoolId) -> &'a [BedView] {
        let lo = self.beds.partition_point(|b| b.pool < pool);
        let hi = self.beds.partition_point(|b| b.pool <= pool);
        &self.beds[lo..hi]
    }

    /// First open bed in `pools`, searched in the given order.
    pub fn first_open_bed(&self, pools: &[PoolId]) -> Option<&'a BedView> {
        pools
            .iter()
            .find_map(|&p| self.beds_in_pool(p).iter().find(|b| b.is_open()))
    }

    pub fn waiting_patient(&self, id: PatientId) -> Option<&'a WaitingPatient> {
        self.waiting.iter().find(|p| p.id == id)
    }

    pub fn bed(&self, id: BedId) -> Option<&'a BedView> {
        match self.beds.get(id.0 as usize) {
            Some(b) if b.id == id => Some(b),
            _ => self.beds.iter().find(|b| b.id == id),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolicyError {
    /// No admissible plan even after looking `days` days ahead.
    Escalation { waiting: usize, days: u32 },
    Solver(SolverError),
    UnknownType(TypeId),
}

impl fmt::Display for PolicyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyError::Escalation { waiting, days } => write!(
                f,
                "no admissible plan for {waiting} waiting patients within {days} days of discharges"
            ),
            PolicyError::Solver(e) => write!(f, "solver: {e}"),
            PolicyError::UnknownType(t) => write!(f, "unknown patient type {t}"),
        }
    }
}

impl core::error::Error for PolicyError {}

impl From<SolverError> for PolicyError {
    fn from(e: SolverError) -> Self {
        PolicyError::Solver(e)
    }
}

/// Per-iteration solver statistics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverStats {
    /// Decision iterations that built an instance.
    pub iterations: u64,
    /// Iterations that solved the budget-constrained program.
    pub p_solves: u64,
    /// Of those, how many had an integral root relaxation.
    pub lp_integral: u64,
    /// Iterations that fell back to the minimum-budget plan.
    pub witness_plans: u64,
    /// Iterations that had to look beyond today's discharges.
    pub expansions: u64,
    pub nodes: u64,
    /// Wall time of each budget-constrained solve, in nanoseconds, when a
    /// clock is installed.
    pub solve_nanos: Vec<u64>,
}

impl SolverStats {
    pub fn lp_integral_share(&self) -> Option<f64> {
        (self.p_solves > 0).then(|| self.lp_integral as f64 / self.p_solves as f64)
    }
}

pub trait AssignmentPolicy {
    fn name(&self) -> String;

    fn decide(
        &mut self,
        trigger: &DecisionTrigger,
        snapshot: &WardSnapshot<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<PolicyDecision, PolicyError>;

    /// When to raise [`TriggerKind::TargetImminent`] for a newly queued
    /// patient, if at all.
    fn check_time(&self, _patient: &WaitingPatient) -> Option<Minutes> {
        None
    }

    /// Hours of day at which [`TriggerKind::OverflowRound`] fires.
    fn overflow_round_hours(&self) -> &[u8] {
        &[]
    }

    fn solver_stats(&self) -> Option<&SolverStats> {
        None
    }
}

/// Nanosecond clock used to time solver calls.
pub type Clock = fn() -> u64;
