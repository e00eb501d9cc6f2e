//! Threshold-based overflow: a patient may take a non-primary bed once the
//! boarding time reaches a threshold that depends on the request hour.

use alloc::format;
use alloc::string::String;

use rand_core::RngCore;

use super::{
    AssignmentPolicy, BedView, DecisionTrigger, Directive, PolicyDecision, PolicyError, Subject,
    TriggerKind, WaitingPatient, WardSnapshot,
};
use crate::domain::Tier;
use crate::time::Minutes;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdSchedule {
    /// First hour of the window.
    pub window_start: u8,
    /// Hour the window ends (exclusive). A value below `window_start` wraps
    /// past midnight; 24 means midnight.
    pub window_end: u8,
    pub in_window_threshold: Minutes,
    pub default_threshold: Minutes,
}

impl ThresholdSchedule {
    /// Two hours for requests from 22:00 to 03:00, ten hours otherwise.
    pub fn tb1() -> Self {
        ThresholdSchedule {
            window_start: 22,
            window_end: 3,
            in_window_threshold: Minutes::from_hours(2),
            default_threshold: Minutes::from_hours(10),
        }
    }

    /// Two hours for requests from 19:00 to midnight, ten hours otherwise.
    pub fn tb2() -> Self {
        ThresholdSchedule {
            window_start: 19,
            window_end: 24,
            in_window_threshold: Minutes::from_hours(2),
            default_threshold: Minutes::from_hours(10),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.in_window_threshold.0 <= 0 || self.default_threshold.0 <= 0 {
            return Err(String::from("thresholds must be positive"));
        }
        if self.window_start > 23 || self.window_end > 24 {
            return Err(format!(
                "window hours out of range: [{}, {})",
                self.window_start, self.window_end
            ));
        }
        Ok(())
    }

    pub fn in_window(&self, hour: u8) -> bool {
        let (s, e) = (self.window_start, self.window_end);
        if s <= e {
            s <= hour && hour < e
        } else {
            hour >= s || hour < e
        }
    }

    /// Threshold for a patient who requested a bed at `requested`.
    pub fn threshold_for(&self, requested: Minutes) -> Minutes {
        if self.in_window(requested.hour_of_day()) {
            self.in_window_threshold
        } else {
            self.default_threshold
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThresholdPolicy {
    name: String,
    schedule: ThresholdSchedule,
}

impl ThresholdPolicy {
    pub fn new(name: &str, schedule: ThresholdSchedule) -> Self {
        ThresholdPolicy {
            name: String::from(name),
            schedule,
        }
    }

    pub fn tb1() -> Self {
        ThresholdPolicy::new("TB-1", ThresholdSchedule::tb1())
    }

    pub fn tb2() -> Self {
        ThresholdPolicy::new("TB-2", ThresholdSchedule::tb2())
    }

    pub fn schedule(&self) -> &ThresholdSchedule {
        &self.schedule
    }

    fn overflow_eligible(&self, p: &WaitingPatient, now: Minutes) -> bool {
        now - p.request_time >= self.schedule.threshold_for(p.requested)
    }

    fn on_request(
        &self,
        p: &WaitingPatient,
        snap: &WardSnapshot<'_>,
    ) -> Result<PolicyDecision, PolicyError> {
        let tiers = snap
            .hospital
            .compat()
            .tiers(p.type_id)
            .ok_or(PolicyError::UnknownType(p.type_id))?;
        let bed = if self.overflow_eligible(p, snap.now) {
            tiers
                .pools()
                .find_map(|(pool, _)| snap.beds_in_pool(pool).iter().find(|b| b.is_open()))
        } else {
            snap.first_open_bed(&tiers.primary)
        };
        Ok(match bed {
            Some(b) => PolicyDecision {
                directives: alloc::vec![Directive::Assign {
                    patient: p.id,
                    bed: b.id,
                }],
            },
            None => PolicyDecision::none(),
        })
    }

    fn on_bed_freed(
        &self,
        bed: &BedView,
        snap: &WardSnapshot<'_>,
    ) -> Result<PolicyDecision, PolicyError> {
        if !bed.is_open() {
            return Ok(PolicyDecision::none());
        }
        let compat = snap.hospital.compat();
        let winner = snap.waiting.iter().find(|p| match compat.tier(p.type_id, bed.pool) {
            Some(Tier::Primary) => true,
            Some(_) => self.overflow_eligible(p, snap.now),
            None => false,
        });
        Ok(PolicyDecision {
            directives: alloc::vec![match winner {
                Some(p) => Directive::Assign {
                    patient: p.id,
                    bed: bed.id,
                },
                None => Directive::IdleBed { bed: bed.id },
            }],
        })
    }
}

impl AssignmentPolicy for ThresholdPolicy {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn decide(
        &mut self,
        trigger: &DecisionTrigger,
        snap: &WardSnapshot<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<PolicyDecision, PolicyError> {
        match (trigger.kind, trigger.subject) {
            (
                TriggerKind::Request | TriggerKind::RequestWithAvailableBed | TriggerKind::TargetImminent,
                Subject::Patient(id),
            ) => match snap.waiting_patient(id) {
                Some(p) => self.on_request(p, snap),
                None => Ok(PolicyDecision::none()),
            },
            (TriggerKind::BedFreed, Subject::Bed(id)) => match snap.bed(id) {
                Some(b) => self.on_bed_freed(b, snap),
                None => Ok(PolicyDecision::none()),
            },
            _ => Ok(PolicyDecision::none()),
        }
    }

    fn check_time(&self, patient: &WaitingPatient) -> Option<Minutes> {
        Some(patient.request_time + self.schedule.threshold_for(patient.requested))
    }
}
