//! Discrete-event ward simulator.
//!
//! A request arrives, waits out its pre-allocation delay, then joins the
//! queue the policy sees. Once the policy assigns a bed the patient spends
//! the post-allocation delay in transfer, is admitted, and holds the bed
//! until the discharge time drawn at admission.
//!
//! Exogenous randomness (arrivals, patient types, delays, lengths of stay,
//! discharge times) comes from one stream and is drawn per patient at
//! arrival, so two policies run with the same seed see the same patients.
//! The policy gets a second, independent stream.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;
use wardflow_core::policies::{
    AssignmentPolicy, BedStatus, BedView, DecisionTrigger, Directive, PolicyError, SolverStats,
    Subject, TriggerKind, WaitingPatient, WardSnapshot,
};
use wardflow_core::time::MINUTES_PER_DAY;
use wardflow_core::{
    BedId, DischargeHourDistribution, Minutes, PatientId, PoolId, Source, Specialty, Tier,
    TypeId,
};

use crate::config::{DelayCurve, LosColumn, Scenario, SourceArrivals};
use crate::sampling::{lognormal_delay, sample_nhpp, sample_poisson, LosTable};

/// One admitted patient.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientRecord {
    pub id: PatientId,
    pub type_id: TypeId,
    pub specialty: Specialty,
    pub source: Source,
    /// Time the bed was requested.
    pub request: Minutes,
    /// Time the request reached the assignment queue.
    pub queue_entry: Minutes,
    /// Time the transfer to the bed started.
    pub assignment: Minutes,
    pub admission: Minutes,
    pub pool: PoolId,
    pub tier: Tier,
}

impl PatientRecord {
    pub fn wait_hours(&self) -> f64 {
        (self.admission - self.request).as_hours()
    }

    pub fn overflowed(&self) -> bool {
        self.tier.is_overflow()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunParams {
    pub horizon_days: u32,
    pub warmup_days: u32,
    pub seed: u64,
}

/// Raw output of one replication.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub policy: String,
    pub params: RunParams,
    /// Admissions whose request came after the warm-up, in admission order.
    pub records: Vec<PatientRecord>,
    pub solver: Option<SolverStats>,
    /// Time-average number of occupied beds after the warm-up.
    pub mean_occupancy: f64,
    /// The same per pool, in pool order.
    pub pool_occupancy: Vec<(PoolId, f64)>,
    pub arrivals: u64,
    pub admissions: u64,
    pub discharges: u64,
    /// Patients without a bed at the end of the horizon.
    pub waiting_at_end: usize,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid run: {0}")]
    Config(String),
    #[error("at {time}: {source}")]
    Escalation { time: Minutes, source: PolicyError },
    #[error("invariant violated at {time}: {message}\n{dump}")]
    Invariant {
        time: Minutes,
        message: String,
        dump: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    DayBoundary(i64),
    BedFreed(BedId),
    QueueEntry(PatientId),
    TriggerCheck(PatientId),
    TransferComplete(BedId),
    OverflowRound,
}

impl EventKind {
    /// Order among events at the same minute.
    fn rank(self) -> u8 {
        match self {
            EventKind::DayBoundary(_) => 0,
            EventKind::BedFreed(_) => 1,
            EventKind::QueueEntry(_) => 2,
            EventKind::TriggerCheck(_) => 3,
            EventKind::TransferComplete(_) => 4,
            EventKind::OverflowRound => 5,
        }
    }

    fn entity(self) -> u64 {
        match self {
            EventKind::DayBoundary(d) => d as u64,
            EventKind::BedFreed(b) | EventKind::TransferComplete(b) => u64::from(b.0),
            EventKind::QueueEntry(p) | EventKind::TriggerCheck(p) => p.0,
            EventKind::OverflowRound => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Event {
    time: Minutes,
    rank: u8,
    entity: u64,
    seq: u64,
    kind: EventKind,
}

/// Exogenous draws fixed when the request is generated.
#[derive(Debug, Clone, Copy)]
struct Draws {
    z_post: f64,
    u_los: f64,
    u_discharge: f64,
}

#[derive(Debug, Clone)]
struct Patient {
    type_id: TypeId,
    source: Source,
    request: Minutes,
    queue_entry: Minutes,
    assignment: Option<Minutes>,
    bed: Option<BedId>,
    tier: Option<Tier>,
    draws: Draws,
}

#[derive(Debug, Clone, Copy, Default)]
struct Stay {
    patient: Option<PatientId>,
    admission: Option<Minutes>,
    discharge: Option<Minutes>,
}

/// Writes one line per processed event.
///
/// ```text
/// <minute> <event> <subject> [detail]
/// ```
///
/// Events: `day`, `queue`, `check`, `freed`, `admit`, `round`, plus one
/// `assign`, `reserve` line per directive applied.
pub type Trace<'a> = &'a mut dyn Write;

pub struct Simulation<'a> {
    sc: &'a Scenario,
    discharge: DischargeHourDistribution,
    policy: &'a mut dyn AssignmentPolicy,
    los: BTreeMap<(TypeId, LosColumn), LosTable>,
    params: RunParams,
    exo: ChaCha8Rng,
    pol_rng: ChaCha8Rng,
    now: Minutes,
    end: Minutes,
    warmup: Minutes,
    events: BinaryHeap<Reverse<Event>>,
    seq: u64,
    beds: Vec<BedView>,
    stays: Vec<Stay>,
    patients: Vec<Patient>,
    waiting: Vec<WaitingPatient>,
    records: Vec<PatientRecord>,
    occupied: u64,
    occupancy_area: f64,
    pool_index: Vec<usize>,
    pool_occupied: Vec<u64>,
    pool_area: Vec<f64>,
    last_change: Minutes,
    admissions: u64,
    discharges: u64,
    trace: Option<Trace<'a>>,
}

impl<'a> Simulation<'a> {
    /// `discharge` is the hour distribution the ward actually runs with; it
    /// is also what the policy sees.
    pub fn new(
        sc: &'a Scenario,
        discharge: DischargeHourDistribution,
        policy: &'a mut dyn AssignmentPolicy,
        params: RunParams,
    ) -> Result<Self, EngineError> {
        if params.horizon_days > 0 && params.warmup_days >= params.horizon_days {
            return Err(EngineError::Config(format!(
                "warm-up of {} days does not fit in a {}-day horizon",
                params.warmup_days, params.horizon_days
            )));
        }
        let mut beds = Vec::new();
        for pool in sc.hospital.pools() {
            for _ in 0..pool.capacity {
                beds.push((pool.id, beds.len()));
            }
        }
        beds.sort();
        let beds: Vec<BedView> = beds
            .into_iter()
            .enumerate()
            .map(|(i, (pool, _))| BedView {
                id: BedId(i as u32),
                pool,
                status: BedStatus::Free,
                claimed_by: None,
            })
            .collect();
        let stays = vec![Stay::default(); beds.len()];
        let mut pool_ids: Vec<PoolId> = beds.iter().map(|b| b.pool).collect();
        pool_ids.dedup();
        let pool_index = beds
            .iter()
            .map(|b| pool_ids.binary_search(&b.pool).expect("pool listed"))
            .collect();
        let npools = pool_ids.len();
        let los = sc
            .los
            .iter()
            .map(|(&k, law)| (k, LosTable::new(law)))
            .collect();
        let exo = ChaCha8Rng::seed_from_u64(params.seed);
        let mut pol_rng = ChaCha8Rng::seed_from_u64(params.seed);
        pol_rng.set_stream(1);
        let warmup = Minutes::from_days(i64::from(params.warmup_days));
        Ok(Simulation {
            sc,
            discharge,
            policy,
            los,
            params,
            exo,
            pol_rng,
            now: Minutes::ZERO,
            end: Minutes::from_days(i64::from(params.horizon_days)),
            warmup,
            events: BinaryHeap::new(),
            seq: 0,
            beds,
            stays,
            patients: Vec::new(),
            waiting: Vec::new(),
            records: Vec::new(),
            occupied: 0,
            occupancy_area: 0.0,
            pool_index,
            pool_occupied: vec![0; npools],
            pool_area: vec![0.0; npools],
            last_change: warmup,
            admissions: 0,
            discharges: 0,
            trace: None,
        })
    }

    pub fn with_trace(mut self, trace: Trace<'a>) -> Self {
        self.trace = Some(trace);
        self
    }

    pub fn run(mut self) -> Result<RunOutput, EngineError> {
        if self.params.horizon_days > 0 {
            self.push(Minutes::ZERO, EventKind::DayBoundary(0));
        }
        while let Some(Reverse(ev)) = self.events.pop() {
            if ev.time >= self.end {
                break;
            }
            debug_assert!(ev.time >= self.now);
            self.now = ev.time;
            match ev.kind {
                EventKind::DayBoundary(d) => self.on_day(d)?,
                EventKind::QueueEntry(p) => self.on_queue_entry(p)?,
                EventKind::TriggerCheck(p) => self.on_check(p)?,
                EventKind::BedFreed(b) => self.on_bed_freed(b)?,
                EventKind::TransferComplete(b) => self.on_admit(b)?,
                EventKind::OverflowRound => {
                    self.trace_line(format_args!("round"));
                    self.decide(TriggerKind::OverflowRound, Subject::None)?;
                }
            }
        }
        self.now = self.end;
        self.touch_occupancy();
        let in_system = self.stays.iter().filter(|s| s.admission.is_some()).count() as u64;
        if self.admissions != self.discharges + in_system {
            return Err(self.invariant(format!(
                "{} admissions, {} discharges, {} in beds",
                self.admissions, self.discharges, in_system
            )));
        }
        let span = self.end - self.warmup;
        let per_minute = |area: f64| if span.0 > 0 { area / span.0 as f64 } else { 0.0 };
        let mean_occupancy = per_minute(self.occupancy_area);
        let mut pool_occupancy = Vec::with_capacity(self.pool_area.len());
        for (b, &k) in self.beds.iter().zip(&self.pool_index) {
            if pool_occupancy.len() == k {
                pool_occupancy.push((b.pool, per_minute(self.pool_area[k])));
            }
        }
        Ok(RunOutput {
            policy: self.policy.name(),
            params: self.params,
            records: self.records,
            solver: self.policy.solver_stats().cloned(),
            mean_occupancy,
            pool_occupancy,
            arrivals: self.patients.len() as u64,
            admissions: self.admissions,
            discharges: self.discharges,
            waiting_at_end: self.waiting.len(),
        })
    }

    fn push(&mut self, time: Minutes, kind: EventKind) {
        self.seq += 1;
        self.events.push(Reverse(Event {
            time,
            rank: kind.rank(),
            entity: kind.entity(),
            seq: self.seq,
            kind,
        }));
    }

    fn trace_line(&mut self, args: std::fmt::Arguments<'_>) {
        if let Some(t) = self.trace.as_mut() {
            // tracing is best effort
            let _ = writeln!(t, "{} {}", self.now.0, args);
        }
    }

    fn on_day(&mut self, day: i64) -> Result<(), EngineError> {
        self.trace_line(format_args!("day {day}"));
        self.generate_arrivals(day);
        let start = Minutes::from_days(day);
        for &h in self.policy.overflow_round_hours().to_vec().iter() {
            self.push(start + Minutes::from_hours(i64::from(h)), EventKind::OverflowRound);
        }
        self.push(Minutes::from_days(day + 1), EventKind::DayBoundary(day + 1));
        Ok(())
    }

    fn generate_arrivals(&mut self, day: i64) {
        let start = Minutes::from_days(day);
        let weekday = start.weekday().index();
        let mut arrivals: Vec<(Minutes, Source)> = Vec::new();
        for (&src, spec) in &self.sc.sources {
            match spec {
                SourceArrivals::Stream { hourly } => {
                    for t in sample_nhpp(hourly, 24.0, &mut self.exo) {
                        let m = ((t * 60.0).floor() as i64).min(MINUTES_PER_DAY - 1);
                        arrivals.push((start + Minutes(m), src));
                    }
                }
                SourceArrivals::Batch {
                    minute_of_day,
                    mean_by_weekday,
                } => {
                    let n = sample_poisson(mean_by_weekday[weekday], &mut self.exo);
                    for _ in 0..n {
                        arrivals.push((start + Minutes(*minute_of_day), src));
                    }
                }
            }
        }
        arrivals.sort_by_key(|&(t, src)| (t, src));
        for (request, source) in arrivals {
            let type_id = self.sc.type_mix[&source].sample(self.exo.random());
            let z_pre: f64 = StandardNormal.sample(&mut self.exo);
            let draws = Draws {
                z_post: StandardNormal.sample(&mut self.exo),
                u_los: self.exo.random(),
                u_discharge: self.exo.random(),
            };
            let pre = delay(&self.sc.pre_allocation, request, z_pre);
            let queue_entry = request + pre;
            let id = PatientId(self.patients.len() as u64);
            self.patients.push(Patient {
                type_id,
                source,
                request,
                queue_entry,
                assignment: None,
                bed: None,
                tier: None,
                draws,
            });
            self.push(queue_entry, EventKind::QueueEntry(id));
        }
    }

    fn on_queue_entry(&mut self, id: PatientId) -> Result<(), EngineError> {
        let p = &self.patients[id.0 as usize];
        let wp = WaitingPatient {
            id,
            type_id: p.type_id,
            request_time: p.queue_entry,
            requested: p.request,
            source: p.source,
        };
        let key = (wp.requested, wp.id);
        let at = self
            .waiting
            .partition_point(|w| (w.requested, w.id) < key);
        self.waiting.insert(at, wp.clone());
        let open = self.has_open_eligible_bed(wp.type_id);
        self.trace_line(format_args!("queue p{} t{} open={}", id.0, wp.type_id.0, open));
        let kind = if open {
            TriggerKind::RequestWithAvailableBed
        } else {
            TriggerKind::Request
        };
        self.decide(kind, Subject::Patient(id))?;
        if self.is_waiting(id) {
            if let Some(t) = self.policy.check_time(&wp) {
                self.push(t.max(self.now), EventKind::TriggerCheck(id));
            }
        }
        Ok(())
    }

    fn on_check(&mut self, id: PatientId) -> Result<(), EngineError> {
        if !self.is_waiting(id) {
            return Ok(());
        }
        self.trace_line(format_args!("check p{}", id.0));
        self.decide(TriggerKind::TargetImminent, Subject::Patient(id))
    }

    fn on_bed_freed(&mut self, bed: BedId) -> Result<(), EngineError> {
        let b = bed.0 as usize;
        if self.stays[b].admission.is_none() {
            return Err(self.invariant(format!("bed {} freed while empty", bed.0)));
        }
        self.touch_occupancy();
        self.occupied -= 1;
        self.pool_occupied[self.pool_index[b]] -= 1;
        self.discharges += 1;
        self.stays[b] = Stay::default();
        self.trace_line(format_args!("freed b{}", bed.0));
        match self.beds[b].claimed_by.take() {
            Some(p) => {
                self.beds[b].status = BedStatus::Free;
                self.start_transfer(p, bed);
                Ok(())
            }
            None => {
                self.beds[b].status = BedStatus::Free;
                self.decide(TriggerKind::BedFreed, Subject::Bed(bed))
            }
        }
    }

    fn on_admit(&mut self, bed: BedId) -> Result<(), EngineError> {
        let b = bed.0 as usize;
        let Some(pid) = self.stays[b].patient else {
            return Err(self.invariant(format!("transfer into empty bed {}", bed.0)));
        };
        let p = self.patients[pid.0 as usize].clone();
        let now = self.now;
        let col = LosColumn::for_admission(p.source, now.hour_of_day() < 12);
        let Some(table) = self.los.get(&(p.type_id, col)) else {
            return Err(self.invariant(format!(
                "no length of stay for type {} column {}",
                p.type_id.0,
                col.name()
            )));
        };
        let los = table.sample(p.draws.u_los);
        let discharge = discharge_time(&self.discharge, now, los, p.draws.u_discharge);
        self.touch_occupancy();
        self.occupied += 1;
        self.pool_occupied[self.pool_index[b]] += 1;
        self.admissions += 1;
        self.stays[b].admission = Some(now);
        self.stays[b].discharge = Some(discharge);
        // the day is scheduled at admission; the hour stays hidden
        self.beds[b].status = BedStatus::Occupied {
            discharge_day: Some(discharge.day()),
        };
        self.push(discharge, EventKind::BedFreed(bed));
        self.trace_line(format_args!("admit p{} b{} out={}", pid.0, bed.0, discharge.0));
        if p.request >= self.warmup {
            let pool = self.beds[b].pool;
            self.records.push(PatientRecord {
                id: pid,
                type_id: p.type_id,
                specialty: self
                    .sc
                    .hospital
                    .patient_type(p.type_id)
                    .map(|t| t.specialty)
                    .unwrap_or(Specialty::Mixed),
                source: p.source,
                request: p.request,
                queue_entry: p.queue_entry,
                assignment: p.assignment.unwrap_or(now),
                admission: now,
                pool,
                tier: p.tier.unwrap_or(Tier::Primary),
            });
        }
        Ok(())
    }

    fn touch_occupancy(&mut self) {
        if self.now > self.last_change {
            let dt = (self.now - self.last_change).0 as f64;
            self.occupancy_area += self.occupied as f64 * dt;
            for (a, &n) in self.pool_area.iter_mut().zip(&self.pool_occupied) {
                *a += n as f64 * dt;
            }
            self.last_change = self.now;
        }
    }

    fn is_waiting(&self, id: PatientId) -> bool {
        self.waiting.iter().any(|w| w.id == id)
    }

    fn has_open_eligible_bed(&self, ty: TypeId) -> bool {
        let snap = self.snapshot();
        self.sc
            .hospital
            .compat()
            .tiers(ty)
            .is_some_and(|t| t.pools().any(|(pool, _)| snap.beds_in_pool(pool).iter().any(BedView::is_open)))
    }

    fn snapshot(&self) -> WardSnapshot<'_> {
        WardSnapshot {
            now: self.now,
            hospital: &self.sc.hospital,
            waiting: &self.waiting,
            beds: &self.beds,
            discharge: &self.discharge,
            arrivals: &self.sc.intensity,
        }
    }

    fn decide(&mut self, kind: TriggerKind, subject: Subject) -> Result<(), EngineError> {
        let trigger = DecisionTrigger {
            kind,
            subject,
            time: self.now,
        };
        let snap = WardSnapshot {
            now: self.now,
            hospital: &self.sc.hospital,
            waiting: &self.waiting,
            beds: &self.beds,
            discharge: &self.discharge,
            arrivals: &self.sc.intensity,
        };
        let decision = match self.policy.decide(&trigger, &snap, &mut self.pol_rng) {
            Ok(d) => d,
            Err(e @ PolicyError::Escalation { .. }) => {
                return Err(EngineError::Escalation {
                    time: self.now,
                    source: e,
                })
            }
            Err(e) => return Err(self.invariant(format!("policy failed: {e}"))),
        };
        for d in decision.directives {
            self.apply(d)?;
        }
        Ok(())
    }

    fn apply(&mut self, d: Directive) -> Result<(), EngineError> {
        match d {
            Directive::Assign { patient, bed } => {
                let tier = self.check_directive(patient, bed)?;
                let b = &self.beds[bed.0 as usize];
                if !b.is_open() {
                    return Err(self.invariant(format!(
                        "patient {} assigned to bed {} which is not free",
                        patient.0, bed.0
                    )));
                }
                self.waiting.retain(|w| w.id != patient);
                self.patients[patient.0 as usize].tier = Some(tier);
                self.trace_line(format_args!("assign p{} b{} {}", patient.0, bed.0, tier.name()));
                self.start_transfer(patient, bed);
            }
            Directive::Reserve { patient, bed } => {
                let tier = self.check_directive(patient, bed)?;
                let b = &self.beds[bed.0 as usize];
                if !matches!(b.status, BedStatus::Occupied { .. }) || b.claimed_by.is_some() {
                    return Err(self.invariant(format!(
                        "patient {} reserved bed {} which is not an unclaimed occupied bed",
                        patient.0, bed.0
                    )));
                }
                self.waiting.retain(|w| w.id != patient);
                self.patients[patient.0 as usize].tier = Some(tier);
                self.beds[bed.0 as usize].claimed_by = Some(patient);
                self.trace_line(format_args!("reserve p{} b{} {}", patient.0, bed.0, tier.name()));
            }
            Directive::Hold { .. } | Directive::IdleBed { .. } => {}
        }
        Ok(())
    }

    fn check_directive(&self, patient: PatientId, bed: BedId) -> Result<Tier, EngineError> {
        if !self.is_waiting(patient) {
            return Err(self.invariant(format!("patient {} is not waiting", patient.0)));
        }
        let Some(b) = self.beds.get(bed.0 as usize) else {
            return Err(self.invariant(format!("no bed {}", bed.0)));
        };
        let ty = self.patients[patient.0 as usize].type_id;
        self.sc.hospital.compat().tier(ty, b.pool).ok_or_else(|| {
            self.invariant(format!(
                "bed {} in pool {} is not compatible with type {}",
                bed.0, b.pool.0, ty.0
            ))
        })
    }

    fn start_transfer(&mut self, patient: PatientId, bed: BedId) {
        let now = self.now;
        let p = &mut self.patients[patient.0 as usize];
        p.assignment = Some(now);
        p.bed = Some(bed);
        let post = delay(&self.sc.post_allocation, now, p.draws.z_post);
        self.beds[bed.0 as usize].status = BedStatus::InTransfer;
        self.stays[bed.0 as usize].patient = Some(patient);
        self.push(now + post, EventKind::TransferComplete(bed));
    }

    fn invariant(&self, message: String) -> EngineError {
        let mut dump = String::new();
        let _ = writeln!(dump, "waiting: {}", self.waiting.len());
        for w in self.waiting.iter().take(20) {
            let _ = writeln!(dump, "  p{} type {} since {}", w.id.0, w.type_id.0, w.request_time);
        }
        let (mut free, mut transfer, mut occupied, mut claimed) = (0, 0, 0, 0);
        for b in &self.beds {
            match b.status {
                BedStatus::Free => free += 1,
                BedStatus::InTransfer => transfer += 1,
                BedStatus::Occupied { .. } => occupied += 1,
            }
            claimed += usize::from(b.claimed_by.is_some());
        }
        let _ = write!(
            dump,
            "beds: {free} free, {transfer} in transfer, {occupied} occupied, {claimed} reserved"
        );
        EngineError::Invariant {
            time: self.now,
            message,
            dump,
        }
    }
}

/// Delay drawn from the curve at the hour of `at`, rounded to minutes.
fn delay(curve: &DelayCurve, at: Minutes, z: f64) -> Minutes {
    let h = at.hour_of_day() as usize;
    Minutes::from_hours_f64(lognormal_delay(curve.mean_hours[h], curve.sd_hours[h], z))
}

/// Discharge instant for a stay of `los` nights admitted at `admission`.
///
/// The hour is drawn from `dist` by inversion of `u`, the minute within the
/// hour uniformly in `1..=60`. A same-day discharge is drawn from the part of
/// the distribution after the admission time; if nothing is left the stay
/// becomes one night.
pub fn discharge_time(
    dist: &DischargeHourDistribution,
    admission: Minutes,
    los: u32,
    u: f64,
) -> Minutes {
    let mut los = los;
    let mut u = u;
    if los == 0 {
        let c = dist.cdf_minute_of_day(admission.minute_of_day() as f64);
        if c >= 1.0 - 1e-9 {
            los = 1;
        } else {
            u = c + u * (1.0 - c);
        }
    }
    let day = admission.day() + i64::from(los);
    let h = dist.hour_for_quantile(u) as usize;
    let mass = dist.mass()[h];
    let frac = if mass > 0.0 {
        ((u - dist.mass_before(h)) / mass).clamp(0.0, 1.0)
    } else {
        0.5
    };
    let k = ((frac * 60.0).floor() as i64 + 1).min(60);
    let t = Minutes::from_days(day) + Minutes(h as i64 * 60 + k);
    t.max(admission + Minutes(1))
}

/// Runs one replication.
pub fn run_replication(
    sc: &Scenario,
    discharge: DischargeHourDistribution,
    policy: &mut dyn AssignmentPolicy,
    params: RunParams,
) -> Result<RunOutput, EngineError> {
    Simulation::new(sc, discharge, policy, params)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discharge_time_follows_occupancy_rule() {
        let d = DischargeHourDistribution::degenerate(12);
        let admit = Minutes::from_hours(8);
        let t = discharge_time(&d, admit, 1, 0.3);
        assert_eq!(t.day(), 1);
        assert_eq!(t.hour_of_day(), 12);
        let occ = (t - admit).as_hours() / 24.0;
        assert!((occ - (1.0 - 8.0 / 24.0 + 12.0 / 24.0)).abs() < 1.0 / 24.0);
    }

    #[test]
    fn same_day_discharge_is_after_admission() {
        let d = DischargeHourDistribution::uniform();
        let admit = Minutes::from_hours(15) + Minutes(20);
        for i in 0..100 {
            let t = discharge_time(&d, admit, 0, i as f64 / 100.0);
            assert!(t > admit && t.day() == 0, "{t}");
        }
        // nothing left after 13:00 when everyone leaves at noon
        let noon = DischargeHourDistribution::degenerate(12);
        let t = discharge_time(&noon, admit, 0, 0.5);
        assert_eq!(t.day(), 1);
    }

    #[test]
    fn minute_within_hour_spans_the_bin() {
        let d = DischargeHourDistribution::degenerate(3);
        let lo = discharge_time(&d, Minutes::ZERO, 2, 0.0);
        let hi = discharge_time(&d, Minutes::ZERO, 2, 0.999_999);
        assert_eq!(lo, Minutes::from_days(2) + Minutes(181));
        assert_eq!(hi, Minutes::from_days(2) + Minutes(240));
    }

    #[test]
    fn event_order_at_equal_times() {
        let kinds = [
            EventKind::OverflowRound,
            EventKind::TransferComplete(BedId(0)),
            EventKind::TriggerCheck(PatientId(0)),
            EventKind::QueueEntry(PatientId(0)),
            EventKind::BedFreed(BedId(9)),
            EventKind::DayBoundary(1),
        ];
        let mut ranks: Vec<u8> = kinds.iter().map(|k| k.rank()).collect();
        ranks.reverse();
        assert!(ranks.windows(2).all(|w| w[0] < w[1]));
    }
}
