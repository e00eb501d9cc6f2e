//! The bed management unit's rule-based practice.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand_core::RngCore;

use super::{
    AssignmentPolicy, BedStatus, BedView, DecisionTrigger, Directive, PolicyDecision, PolicyError,
    Subject, TriggerKind, WaitingPatient, WardSnapshot,
};
use crate::domain::{BedId, Tier};
use crate::time::Minutes;

const ROUND_START_HOUR: i64 = 17;
const CUTOFF_HOUR: i64 = 15;
const ALL_HOURS: [u8; 24] = [
    0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23,
];

/// Probability that a request arriving at `hour` with no free primary bed
/// is given a primary bed that frees later.
pub fn bmu_reserve_probability(hour: u8) -> f64 {
    match hour {
        15..=20 => 0.7,
        _ => 0.0,
    }
}

/// Uniform draw in [0, 1) from the top 53 bits.
pub(crate) fn unit_draw(rng: &mut dyn RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone)]
pub struct BmuPolicy {
    name: String,
}

impl Default for BmuPolicy {
    fn default() -> Self {
        BmuPolicy::new()
    }
}

impl BmuPolicy {
    pub fn new() -> Self {
        BmuPolicy {
            name: String::from("BMU"),
        }
    }

    /// Same rules under a different label, used for the early-discharge
    /// variants.
    pub fn named(name: &str) -> Self {
        BmuPolicy {
            name: String::from(name),
        }
    }

    /// Requests received before this instant are eligible in a round at `now`.
    pub fn overflow_cutoff(now: Minutes) -> Minutes {
        let day = if now.hour_of_day() as i64 >= ROUND_START_HOUR {
            now.day()
        } else {
            now.day() - 1
        };
        Minutes::from_days(day) + Minutes::from_hours(CUTOFF_HOUR)
    }

    fn on_request(
        &self,
        patient: &WaitingPatient,
        snap: &WardSnapshot<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<PolicyDecision, PolicyError> {
        let tiers = snap
            .hospital
            .compat()
            .tiers(patient.type_id)
            .ok_or(PolicyError::UnknownType(patient.type_id))?;
        if let Some(bed) = snap.first_open_bed(&tiers.primary) {
            return Ok(single(Directive::Assign {
                patient: patient.id,
                bed: bed.id,
            }));
        }
        let p = bmu_reserve_probability(snap.now.hour_of_day());
        if p > 0.0 && unit_draw(rng) < p {
            if let Some(bed) = later_primary_bed(snap, &tiers.primary) {
                return Ok(single(Directive::Reserve {
                    patient: patient.id,
                    bed,
                }));
            }
        }
        Ok(single(Directive::Hold {
            patient: patient.id,
        }))
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
        for p in snap.waiting {
            let tier = compat.tier(p.type_id, bed.pool);
            if tier == Some(Tier::Primary) {
                return Ok(single(Directive::Assign {
                    patient: p.id,
                    bed: bed.id,
                }));
            }
        }
        Ok(single(Directive::IdleBed { bed: bed.id }))
    }

    fn overflow_round(&self, snap: &WardSnapshot<'_>) -> Result<PolicyDecision, PolicyError> {
        let cutoff = Self::overflow_cutoff(snap.now);
        let compat = snap.hospital.compat();
        let mut taken: BTreeSet<BedId> = BTreeSet::new();
        let mut directives = Vec::new();
        for p in snap.waiting.iter().take_while(|p| p.requested < cutoff) {
            let tiers = compat
                .tiers(p.type_id)
                .ok_or(PolicyError::UnknownType(p.type_id))?;
            let found = tiers.pools().find_map(|(pool, _)| {
                snap.beds_in_pool(pool)
                    .iter()
                    .find(|b| b.is_open() && !taken.contains(&b.id))
            });
            if let Some(bed) = found {
                taken.insert(bed.id);
                directives.push(Directive::Assign {
                    patient: p.id,
                    bed: bed.id,
                });
            }
        }
        Ok(PolicyDecision { directives })
    }
}

fn single(d: Directive) -> PolicyDecision {
    PolicyDecision {
        directives: alloc::vec![d],
    }
}

/// Unclaimed occupied primary bed with the earliest known discharge day.
fn later_primary_bed(snap: &WardSnapshot<'_>, primary: &[crate::domain::PoolId]) -> Option<BedId> {
    primary
        .iter()
        .flat_map(|&pool| snap.beds_in_pool(pool))
        .filter(|b| b.claimed_by.is_none())
        .filter_map(|b| match b.status {
            BedStatus::Occupied {
                discharge_day: Some(d),
            } => Some((d, b.id)),
            _ => None,
        })
        .min()
        .map(|(_, id)| id)
}

impl AssignmentPolicy for BmuPolicy {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn decide(
        &mut self,
        trigger: &DecisionTrigger,
        snap: &WardSnapshot<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<PolicyDecision, PolicyError> {
        match (trigger.kind, trigger.subject) {
            (TriggerKind::Request | TriggerKind::RequestWithAvailableBed, Subject::Patient(id)) => {
                match snap.waiting_patient(id) {
                    Some(p) => self.on_request(p, snap, rng),
                    None => Ok(PolicyDecision::none()),
                }
            }
            (TriggerKind::BedFreed, Subject::Bed(id)) => match snap.bed(id) {
                Some(b) => self.on_bed_freed(b, snap),
                None => Ok(PolicyDecision::none()),
            },
            (TriggerKind::OverflowRound, _) => self.overflow_round(snap),
            _ => Ok(PolicyDecision::none()),
        }
    }

    fn overflow_round_hours(&self) -> &[u8] {
        &ALL_HOURS
    }
}
