//! Probability-maximizing policy with a dynamic overflow budget.
//!
//! Each iteration builds an instance from the waiting patients and the beds
//! that are free now or scheduled to free today (looking further ahead one
//! day at a time while no admissible plan exists), computes the minimum
//! budget, widens it by the budget rule, and solves for the plan that
//! maximizes the joint probability of meeting every delay target. Only beds
//! that are free now are acted on; patients matched to later beds keep
//! waiting and the problem is solved again at the next trigger.
//!
//! When some patient has already waited past the target, the minimum-budget
//! plan is used instead.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_core::RngCore;

use super::{
    AssignmentPolicy, BedStatus, Clock, DecisionTrigger, Directive, PolicyDecision, PolicyError,
    SolverStats, WaitingPatient, WardSnapshot,
};
use crate::domain::{
    AssignmentInstance, AssignmentPlan, Availability, BoardedPatient, CandidateBed, Edge, LogWeight,
    PoolId,
};
use crate::probability::log_meet_probability_at;
use crate::solver::{
    fcfs_normalize_many, min_overflow_budget_with, overflow_budget, solve_p_model_with, Binding,
    BudgetParams, MinBudget, SolveOptions, SolverError,
};
use crate::time::Minutes;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PModelParams {
    pub budget: BudgetParams,
    /// Delay target applied to every patient.
    pub delay_target: Minutes,
    /// How long before the target is breached the policy is re-invoked.
    pub lead: Minutes,
    /// Days beyond today whose discharges may be added to the bed set.
    pub max_extra_days: u32,
    pub solve: SolveOptions,
}

impl PModelParams {
    pub fn new(budget: BudgetParams) -> Self {
        PModelParams {
            budget,
            delay_target: Minutes::from_hours(10),
            lead: Minutes(30),
            max_extra_days: 3,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PModelPolicy {
    params: PModelParams,
    stats: SolverStats,
    clock: Option<Clock>,
}


impl PModelPolicy {
    pub fn new(params: PModelParams) -> Self {
        PModelPolicy {
            params,
            stats: SolverStats::default(),
            clock: None,
        }
    }

    /// Installs a nanosecond clock used to time each solve.
    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = Some(clock);
        self
    }

    pub fn params(&self) -> &PModelParams {
        &self.params
    }

    /// Builds the assignment instance for the beds that are free now or
    /// scheduled to free by the end of `horizon_day`.
    pub fn build_instance(
        &self,
        snap: &WardSnapshot<'_>,
        horizon_day: i64,
    ) -> Result<AssignmentInstance, PolicyError> {
        let now = snap.now;
        let today = now.day();
        let compat = snap.hospital.compat();

        let mut pools: BTreeMap<PoolId, ()> = BTreeMap::new();
        for p in snap.waiting {
            let tiers = compat
                .tiers(p.type_id)
                .ok_or(PolicyError::UnknownType(p.type_id))?;
            for (pool, _) in tiers.pools() {
                pools.insert(pool, ());
            }
        }
        let mut beds: Vec<CandidateBed> = Vec::new();
        let mut pool_range: BTreeMap<PoolId, (usize, usize)> = BTreeMap::new();
        for &pool in pools.keys() {
            let start = beds.len();
            for b in snap.beds_in_pool(pool) {
                if b.claimed_by.is_some() {
                    continue;
                }
                let availability = match b.status {
                    BedStatus::Free => Availability::Now(now),
                    BedStatus::Occupied {
                        discharge_day: Some(d),
                    } if d <= horizon_day => Availability::Later { day: d.max(today) },
                    _ => continue,
                };
                beds.push(CandidateBed {
                    id: b.id,
                    pool,
                    availability,
                });
            }
            pool_range.insert(pool, (start, beds.len()));
        }

        let tau = self.params.delay_target;
        let mut patients = Vec::with_capacity(snap.waiting.len());
        let mut edges = Vec::with_capacity(snap.waiting.len());
        for p in snap.waiting {
            let bp = BoardedPatient {
                id: p.id,
                type_id: p.type_id,
                request_time: p.request_time,
                delay_target: tau,
                source: p.source,
            };
            let tiers = compat
                .tiers(p.type_id)
                .ok_or(PolicyError::UnknownType(p.type_id))?;
            let mut list = Vec::new();
            for (pool, tier) in tiers.pools() {
                let cost = compat.costs().cost(tier);
                let (lo, hi) = pool_range[&pool];
                for (k, bed) in beds[lo..hi].iter().enumerate() {
                    list.push(Edge {
                        bed: lo + k,
                        weight: log_meet_probability_at(&bp, bed, now, snap.discharge),
                        cost,
                    });
                }
            }
            list.sort_by_key(|e| e.bed);
            patients.push(bp);
            edges.push(list);
        }

        // drop candidate beds nobody can use (pools emptied of candidates
        // leave no gaps, but patients may have no edges at all)
        let mut used = alloc::vec![false; beds.len()];
        for e in edges.iter().flatten() {
            used[e.bed] = true;
        }
        if used.iter().any(|u| !u) {
            let mut remap = alloc::vec![usize::MAX; beds.len()];
            let mut kept = Vec::new();
            for (b, bed) in beds.into_iter().enumerate() {
                if used[b] {
                    remap[b] = kept.len();
                    kept.push(bed);
                }
            }
            for e in edges.iter_mut().flatten() {
                e.bed = remap[e.bed];
            }
            beds = kept;
        }
        Ok(AssignmentInstance {
            patients,
            beds,
            edges,
            budget: f64::INFINITY,
        })
    }

    fn any_open_eligible(&self, snap: &WardSnapshot<'_>) -> bool {
        let compat = snap.hospital.compat();
        let mut seen: BTreeMap<PoolId, bool> = BTreeMap::new();
        snap.waiting.iter().any(|p| {
            compat.tiers(p.type_id).is_some_and(|t| {
                t.pools().any(|(pool, _)| {
                    *seen
                        .entry(pool)
                        .or_insert_with(|| snap.beds_in_pool(pool).iter().any(|b| b.is_open()))
                })
            })
        })
    }

    fn min_budget_expanding(
        &mut self,
        snap: &WardSnapshot<'_>,
    ) -> Result<(AssignmentInstance, MinBudget), PolicyError> {
        let today = snap.now.day();
        for extra in 0..=self.params.max_extra_days {
            let built = self.build_instance(snap, today + i64::from(extra))?;
            if built.edges.iter().any(Vec::is_empty) {
                continue;
            }
            match min_overflow_budget_with(&built, &self.params.solve) {
                Ok(m) => {
                    if extra > 0 {
                        self.stats.expansions += 1;
                    }
                    return Ok((built, m));
                }
                Err(SolverError::Infeasible(Binding::Matching)) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        Err(PolicyError::Escalation {
            waiting: snap.waiting.len(),
            days: self.params.max_extra_days + 1,
        })
    }
}

impl AssignmentPolicy for PModelPolicy {
    fn name(&self) -> String {
        let b = &self.params.budget;
        format!("P({},{},{})", b.alpha, b.beta, b.delta_hours)
    }

    fn decide(
        &mut self,
        _trigger: &DecisionTrigger,
        snap: &WardSnapshot<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<PolicyDecision, PolicyError> {
        if snap.waiting.is_empty() || !self.any_open_eligible(snap) {
            return Ok(PolicyDecision::none());
        }
        self.stats.iterations += 1;
        let (inst, min) = self.min_budget_expanding(snap)?;
        let now = snap.now;
        let tau = self.params.delay_target;
        let breached = snap.waiting.iter().any(|p| now - p.request_time > tau);

        let plan = if breached {
            self.stats.witness_plans += 1;
            min.plan
        } else {
            let horizon = Minutes::from_hours_f64(self.params.budget.delta_hours);
            let rate = snap.arrivals.integral(now, now + horizon);
            let budget = overflow_budget(min.budget, inst.patients.len(), rate, &self.params.budget);
            let inst_b = inst.clone().with_budget(budget);
            let start = self.clock.map(|c| c());
            let report = solve_p_model_with(&inst_b, &self.params.solve)?;
            if let (Some(c), Some(s)) = (self.clock, start) {
                self.stats.solve_nanos.push(c().saturating_sub(s));
            }
            self.stats.p_solves += 1;
            self.stats.nodes += report.nodes_explored as u64;
            if report.lp_was_integral {
                self.stats.lp_integral += 1;
            }
            report.plan
        };

        let plan = prefer_free_beds(&inst, plan)?;
        let now_beds: Vec<_> = inst
            .beds
            .iter()
            .filter(|b| b.is_available_now())
            .map(|b| b.id)
            .collect();
        let plan = fcfs_normalize_many(&inst, &plan, &now_beds)?;

        let mut directives = Vec::new();
        for (b, bed) in inst.beds.iter().enumerate() {
            if !bed.is_available_now() {
                continue;
            }
            match plan.patient_on(b) {
                Some(i) => directives.push(Directive::Assign {
                    patient: inst.patients[i].id,
                    bed: bed.id,
                }),
                None => directives.push(Directive::IdleBed { bed: bed.id }),
            }
        }
        Ok(PolicyDecision { directives })
    }

    fn check_time(&self, patient: &WaitingPatient) -> Option<Minutes> {
        let t = patient.request_time + self.params.delay_target;
        Some(Minutes((t - self.params.lead).0.max(patient.request_time.0)))
    }

    fn solver_stats(&self) -> Option<&SolverStats> {
        Some(&self.stats)
    }
}

/// Among equally good plans, admits now rather than later: a patient held
/// for a later bed moves to an unmatched free bed of the same cost and no
/// smaller weight.
fn prefer_free_beds(inst: &AssignmentInstance, plan: AssignmentPlan) -> Result<AssignmentPlan, PolicyError> {
    let mut bed_of = plan.bed_of.clone();
    let mut taken = alloc::vec![false; inst.beds.len()];
    for &b in &bed_of {
        taken[b] = true;
    }
    let mut order: Vec<usize> = (0..inst.patients.len()).collect();
    order.sort_by_key(|&i| (inst.patients[i].request_time, inst.patients[i].id));
    let mut moved = false;
    for i in order {
        if inst.beds[bed_of[i]].is_available_now() {
            continue;
        }
        let held = inst.edge(i, bed_of[i]).expect("plan uses an edge");
        let better = inst.edges[i].iter().find(|e| {
            !taken[e.bed]
                && inst.beds[e.bed].is_available_now()
                && e.cost == held.cost
                && match (e.weight, held.weight) {
                    (_, LogWeight::Impossible) => true,
                    (LogWeight::Impossible, _) => false,
                    (LogWeight::Finite(a), LogWeight::Finite(b)) => a >= b,
                }
        });
        if let Some(e) = better {
            taken[bed_of[i]] = false;
            taken[e.bed] = true;
            bed_of[i] = e.bed;
            moved = true;
        }
    }
    if !moved {
        return Ok(plan);
    }
    AssignmentPlan::evaluate(inst, bed_of).map_err(|_| SolverError::Numerical.into())
}
