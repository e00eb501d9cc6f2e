//! Random instance generators for tests and benchmarks.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::domain::{
    AssignmentInstance, Availability, BedId, BoardedPatient, CandidateBed, Edge, LogWeight,
    PatientId, PoolId, Source, TypeId,
};
use crate::probability::{log_meet_probability_at, DischargeHourDistribution};
use crate::time::Minutes;

/// Uniform float in `[0, 1)`.
pub fn unit(rng: &mut dyn RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Uniform integer in `[lo, hi]`.
pub fn range(rng: &mut dyn RngCore, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

fn chance(rng: &mut dyn RngCore, p: f64) -> bool {
    unit(rng) < p
}

#[derive(Debug, Clone, Copy)]
pub struct RandomSpec {
    pub max_patients: usize,
    pub max_beds: usize,
    pub pools: usize,
    pub groups: usize,
    pub impossible_prob: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            max_patients: 6,
            max_beds: 8,
            pools: 3,
            groups: 2,
            impossible_prob: 0.2,
        }
    }
}

fn random_weight(rng: &mut dyn RngCore, impossible_prob: f64) -> LogWeight {
    if chance(rng, impossible_prob) {
        LogWeight::Impossible
    } else if chance(rng, 0.2) {
        LogWeight::Finite(0.0)
    } else {
        LogWeight::Finite(libm::log(1.0 - unit(rng)))
    }
}

/// A valid instance with unlimited budget. Beds share a pool and an
/// availability group, so many beds are interchangeable; a few edges get
/// individual weights.
pub fn random_instance(rng: &mut dyn RngCore, spec: &RandomSpec) -> AssignmentInstance {
    let np = range(rng, 1, spec.max_patients);
    let nb = range(rng, 1, spec.max_beds);
    let beds: Vec<CandidateBed> = (0..nb)
        .map(|b| CandidateBed {
            id: BedId(b as u32 + 1),
            pool: PoolId(range(rng, 1, spec.pools) as u16),
            availability: if range(rng, 0, spec.groups) == 0 {
                Availability::Now(Minutes(0))
            } else {
                Availability::Later {
                    day: range(rng, 0, spec.groups - 1) as i64,
                }
            },
        })
        .collect();
    let mut patients = Vec::with_capacity(np);
    let mut edges: Vec<Vec<Edge>> = Vec::with_capacity(np);
    for i in 0..np {
        patients.push(BoardedPatient {
            id: PatientId(i as u64 + 1),
            type_id: TypeId(1),
            request_time: Minutes(-(range(rng, 0, 600) as i64)),
            delay_target: Minutes::from_hours(10),
            source: Source::Ed,
        });
        // per-pool cost (None = ineligible), per-availability weight
        let costs: Vec<Option<f64>> = (0..=spec.pools)
            .map(|_| match range(rng, 0, 9) {
                0..=2 => None,
                3..=5 => Some(0.0),
                6..=8 => Some(1.0),
                _ => Some(2.0),
            })
            .collect();
        let weights: Vec<LogWeight> = (0..=spec.groups)
            .map(|_| random_weight(rng, spec.impossible_prob))
            .collect();
        let mut list = Vec::new();
        for (b, bed) in beds.iter().enumerate() {
            let Some(cost) = costs[usize::from(bed.pool.0)] else {
                continue;
            };
            let g = match bed.availability {
                Availability::Now(_) => 0,
                Availability::Later { day } => day as usize + 1,
            };
            let weight = if chance(rng, 0.15) {
                random_weight(rng, spec.impossible_prob)
            } else {
                weights[g]
            };
            list.push(Edge { bed: b, weight, cost });
        }
        if list.is_empty() {
            let b = range(rng, 0, nb - 1);
            list.push(Edge {
                bed: b,
                weight: random_weight(rng, spec.impossible_prob),
                cost: 1.0,
            });
        }
        edges.push(list);
    }
    for b in 0..nb {
        if !edges.iter().flatten().any(|e| e.bed == b) {
            let i = range(rng, 0, np - 1);
            let pos = edges[i].partition_point(|e| e.bed < b);
            edges[i].insert(
                pos,
                Edge {
                    bed: b,
                    weight: random_weight(rng, spec.impossible_prob),
                    cost: 1.0,
                },
            );
        }
    }
    AssignmentInstance {
        patients,
        beds,
        edges,
        budget: f64::INFINITY,
    }
}

/// A decision-time instance with several patients per type. Weights come
/// from the availability model at `now`, so they respect request order.
pub struct TypedInstance {
    pub instance: AssignmentInstance,
    pub now: Minutes,
    pub dist: DischargeHourDistribution,
}

pub fn random_typed_instance(rng: &mut dyn RngCore) -> TypedInstance {
    let now = Minutes::start_of_day(5) + Minutes(range(rng, 0, 24 * 60 - 1) as i64);
    let mut w = [0.0; 24];
    for m in &mut w {
        *m = if chance(rng, 0.3) { 0.0 } else { unit(rng) };
    }
    w[range(rng, 0, 23)] += 0.5;
    let dist = DischargeHourDistribution::from_weights(w).expect("positive weights");

    let n_pools = range(rng, 1, 3);
    let mut beds = Vec::new();
    for p in 0..n_pools {
        for _ in 0..range(rng, 1, 3) {
            let availability = match range(rng, 0, 2) {
                0 => Availability::Now(now),
                1 => Availability::Later { day: now.day() },
                _ => Availability::Later { day: now.day() + 1 },
            };
            beds.push(CandidateBed {
                id: BedId(beds.len() as u32 + 1),
                pool: PoolId(p as u16 + 1),
                availability,
            });
        }
    }
    let n_types = range(rng, 1, 3);
    let mut patients = Vec::new();
    let mut edges = Vec::new();
    for t in 0..n_types {
        let tau = Minutes::from_hours(range(rng, 2, 12) as i64);
        let costs: Vec<Option<f64>> = (0..n_pools)
            .map(|_| match range(rng, 0, 3) {
                0 => None,
                1 | 2 => Some(0.0),
                _ => Some(1.0),
            })
            .collect();
        let costs = if costs.iter().all(Option::is_none) {
            vec![Some(0.0); n_pools]
        } else {
            costs
        };
        for _ in 0..range(rng, 1, 3) {
            let p = BoardedPatient {
                id: PatientId(patients.len() as u64 + 1),
                type_id: TypeId(t as u16 + 1),
                // mostly within the target, sometimes past it
                request_time: now - Minutes(range(rng, 0, (tau.0 + 120) as usize) as i64),
                delay_target: tau,
                source: Source::Ed,
            };
            let list: Vec<Edge> = beds
                .iter()
                .enumerate()
                .filter_map(|(b, bed)| {
                    costs[usize::from(bed.pool.0 - 1)].map(|cost| Edge {
                        bed: b,
                        weight: log_meet_probability_at(&p, bed, now, &dist),
                        cost,
                    })
                })
                .collect();
            patients.push(p);
            edges.push(list);
        }
    }
    // drop beds no patient can use, then reindex
    let used: Vec<bool> = (0..beds.len())
        .map(|b| edges.iter().flatten().any(|e: &Edge| e.bed == b))
        .collect();
    let mut remap = vec![usize::MAX; beds.len()];
    let mut kept = Vec::new();
    for (b, bed) in beds.into_iter().enumerate() {
        if used[b] {
            remap[b] = kept.len();
            kept.push(bed);
        }
    }
    for list in &mut edges {
        for e in list.iter_mut() {
            e.bed = remap[e.bed];
        }
    }
    TypedInstance {
        instance: AssignmentInstance {
            patients,
            beds: kept,
            edges,
            budget: f64::INFINITY,
        },
        now,
        dist,
    }
}
