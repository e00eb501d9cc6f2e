//! Post-warm-up statistics and their CSV forms.
//!
//! Waiting time runs from the bed request to admission, so it includes both
//! allocation delays. Hourly figures bin patients by the hour of the
//! request. Waiting-time curves are reported for ED patients, overflow
//! rates for everyone.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;
use wardflow_core::policies::SolverStats;
use wardflow_core::{Source, Specialty};

use crate::engine::{PatientRecord, RunOutput};

pub const SERVICE_LEVEL_HOURS: [f64; 3] = [8.0, 12.0, 16.0];
pub const MIN_BATCHES: usize = 10;

/// Night window used in summaries: requests from 22:00 to 04:00.
pub const NIGHT_HOURS: [u8; 6] = [22, 23, 0, 1, 2, 3];
/// Afternoon window: requests from 12:00 to 16:00.
pub const AFTERNOON_HOURS: [u8; 4] = [12, 13, 14, 15];

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("batch means need at least {MIN_BATCHES} batches, got {0}")]
    TooFewBatches(usize),
    #[error("{batches} batches need at least as many observations, got {n}")]
    TooFewObservations { n: usize, batches: usize },
}

/// Mean with a 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

/// Batch-means estimate of a steady-state mean with a Student-t
/// half-width. The series is cut into `batches` contiguous batches of equal
/// size; leftover points at the end are dropped.
pub fn batch_means_ci(series: &[f64], batches: usize) -> Result<Estimate, MetricsError> {
    if batches < MIN_BATCHES {
        return Err(MetricsError::TooFewBatches(batches));
    }
    let size = series.len() / batches;
    if size == 0 {
        return Err(MetricsError::TooFewObservations {
            n: series.len(),
            batches,
        });
    }
    let means: Vec<f64> = series
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let k = means.len() as f64;
    let mean = means.iter().sum::<f64>() / k;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let t = StudentsT::new(0.0, 1.0, k - 1.0)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975);
    Ok(Estimate {
        mean,
        half_width: t * (var / k).sqrt(),
    })
}

/// Share of waits above `n_hours`, or `None` for an empty set.
pub fn service_level<'a>(waits: impl IntoIterator<Item = &'a f64>, n_hours: f64) -> Option<f64> {
    let (mut n, mut over) = (0usize, 0usize);
    for &w in waits {
        n += 1;
        over += usize::from(w > n_hours);
    }
    (n > 0).then(|| over as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OverflowGroup {
    Total,
    Specialty(Specialty),
    RequestHour(u8),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Count {
    pub patients: u64,
    pub overflowed: u64,
}

impl Count {
    pub fn rate(&self) -> Option<f64> {
        (self.patients > 0).then(|| self.overflowed as f64 / self.patients as f64)
    }
}

/// Overflow counts grouped as requested.
pub fn overflow_counts(records: &[PatientRecord]) -> BTreeMap<OverflowGroup, Count> {
    let mut out: BTreeMap<OverflowGroup, Count> = BTreeMap::new();
    for r in records {
        for g in [
            OverflowGroup::Total,
            OverflowGroup::Specialty(r.specialty),
            OverflowGroup::RequestHour(r.request.hour_of_day()),
        ] {
            let c = out.entry(g).or_default();
            c.patients += 1;
            c.overflowed += u64::from(r.overflowed());
        }
    }
    out
}

pub fn overflow_rate(records: &[PatientRecord]) -> Option<f64> {
    overflow_counts(records)
        .get(&OverflowGroup::Total)
        .and_then(Count::rate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HourRow {
    pub hour: u8,
    pub patients: usize,
    pub mean_wait: Option<f64>,
    pub half_width: Option<f64>,
    /// Share waiting more than 8, 12 and 16 hours.
    pub service_levels: [Option<f64>; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSummary {
    pub iterations: u64,
    pub solves: u64,
    pub mean_seconds: Option<f64>,
    pub max_seconds: Option<f64>,
    pub lp_integral_share: Option<f64>,
    pub witness_plans: u64,
    pub expansions: u64,
}

impl SolverSummary {
    pub fn from_stats<'a>(stats: impl IntoIterator<Item = &'a SolverStats>) -> SolverSummary {
        let mut s = SolverSummary {
            iterations: 0,
            solves: 0,
            mean_seconds: None,
            max_seconds: None,
            lp_integral_share: None,
            witness_plans: 0,
            expansions: 0,
        };
        let (mut integral, mut total_ns, mut max_ns, mut timed) = (0u64, 0u128, 0u64, 0u64);
        for st in stats {
            s.iterations += st.iterations;
            s.solves += st.p_solves;
            s.witness_plans += st.witness_plans;
            s.expansions += st.expansions;
            integral += st.lp_integral;
            for &ns in &st.solve_nanos {
                total_ns += u128::from(ns);
                max_ns = max_ns.max(ns);
                timed += 1;
            }
        }
        if timed > 0 {
            s.mean_seconds = Some(total_ns as f64 / timed as f64 / 1e9);
            s.max_seconds = Some(max_ns as f64 / 1e9);
        }
        if s.solves > 0 {
            s.lp_integral_share = Some(integral as f64 / s.solves as f64);
        }
        s
    }
}

/// Statistics of one policy over one or more replications.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSummary {
    pub policy: String,
    pub seeds: Vec<u64>,
    pub patients: usize,
    pub by_hour: Vec<HourRow>,
    pub overflow: BTreeMap<OverflowGroup, Count>,
    pub night_wait: Option<f64>,
    pub afternoon_wait: Option<f64>,
    pub mean_wait: Option<f64>,
    pub mean_occupancy: f64,
    pub solver: Option<SolverSummary>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

impl MetricsSummary {
    /// Pools the replications; hourly series are concatenated in seed
    /// order, each sorted by request time, before batching.
    pub fn from_runs(runs: &[RunOutput], batches: usize) -> MetricsSummary {
        let policy = runs.first().map(|r| r.policy.clone()).unwrap_or_default();
        let mut hourly: Vec<Vec<f64>> = vec![Vec::new(); 24];
        let mut all = Vec::new();
        for run in runs {
            let mut ed: Vec<&PatientRecord> =
                run.records.iter().filter(|r| r.source == Source::Ed).collect();
            ed.sort_by_key(|r| (r.request, r.id));
            for r in ed {
                hourly[r.request.hour_of_day() as usize].push(r.wait_hours());
                all.push(r.wait_hours());
            }
        }
        let by_hour = hourly
            .iter()
            .enumerate()
            .map(|(h, w)| {
                let ci = batch_means_ci(w, batches).ok();
                HourRow {
                    hour: h as u8,
                    patients: w.len(),
                    mean_wait: mean(w),
                    half_width: ci.map(|e| e.half_width),
                    service_levels: SERVICE_LEVEL_HOURS.map(|n| service_level(w, n)),
                }
            })
            .collect();
        let window = |hours: &[u8]| {
            let w: Vec<f64> = hours
                .iter()
                .flat_map(|&h| hourly[h as usize].iter().copied())
                .collect();
            mean(&w)
        };
        let records: Vec<PatientRecord> =
            runs.iter().flat_map(|r| r.records.iter().cloned()).collect();
        let stats: Vec<&SolverStats> = runs.iter().filter_map(|r| r.solver.as_ref()).collect();
        MetricsSummary {
            policy,
            seeds: runs.iter().map(|r| r.params.seed).collect(),
            patients: records.len(),
            by_hour,
            overflow: overflow_counts(&records),
            night_wait: window(&NIGHT_HOURS),
            afternoon_wait: window(&AFTERNOON_HOURS),
            mean_wait: mean(&all),
            mean_occupancy: if runs.is_empty() {
                0.0
            } else {
                runs.iter().map(|r| r.mean_occupancy).sum::<f64>() / runs.len() as f64
            },
            solver: (!stats.is_empty()).then(|| SolverSummary::from_stats(stats)),
        }
    }

    pub fn overflow_rate(&self) -> Option<f64> {
        self.overflow.get(&OverflowGroup::Total).and_then(Count::rate)
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

/// `hour,patients,mean_wait_h,ci_half_width_h,over_8h,over_12h,over_16h`
pub fn write_wait_csv<W: io::Write>(out: W, s: &MetricsSummary) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "hour",
        "patients",
        "mean_wait_h",
        "ci_half_width_h",
        "over_8h",
        "over_12h",
        "over_16h",
    ])?;
    for r in &s.by_hour {
        w.write_record([
            r.hour.to_string(),
            r.patients.to_string(),
            cell(r.mean_wait),
            cell(r.half_width),
            cell(r.service_levels[0]),
            cell(r.service_levels[1]),
            cell(r.service_levels[2]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn group_cells(g: OverflowGroup) -> (&'static str, String) {
    match g {
        OverflowGroup::Total => ("total", "all".into()),
        OverflowGroup::Specialty(s) => ("specialty", s.name().into()),
        OverflowGroup::RequestHour(h) => ("request_hour", h.to_string()),
    }
}

/// `group,key,patients,overflowed,rate`
pub fn write_overflow_csv<W: io::Write>(out: W, s: &MetricsSummary) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group", "key", "patients", "overflowed", "rate"])?;
    for (&g, c) in &s.overflow {
        let (group, key) = group_cells(g);
        w.write_record([
            group.to_string(),
            key,
            c.patients.to_string(),
            c.overflowed.to_string(),
            cell(c.rate()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `policy,patients,overflow_rate,mean_wait_h,night_wait_h,afternoon_wait_h,mean_occupancy`
pub fn write_summary_csv<W: io::Write>(out: W, rows: &[MetricsSummary]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "policy",
        "patients",
        "overflow_rate",
        "mean_wait_h",
        "night_wait_h",
        "afternoon_wait_h",
        "mean_occupancy",
    ])?;
    for s in rows {
        w.write_record([
            s.policy.clone(),
            s.patients.to_string(),
            cell(s.overflow_rate()),
            cell(s.mean_wait),
            cell(s.night_wait),
            cell(s.afternoon_wait),
            format!("{:.6}", s.mean_occupancy),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One column per policy: `hour,<policy>...` with the mean ED wait.
pub fn write_side_by_side_csv<W: io::Write>(
    out: W,
    rows: &[MetricsSummary],
    value: impl Fn(&HourRow) -> Option<f64>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["hour".to_string()];
    header.extend(rows.iter().map(|s| s.policy.clone()));
    w.write_record(&header)?;
    for h in 0..24 {
        let mut rec = vec![h.to_string()];
        rec.extend(rows.iter().map(|s| cell(value(&s.by_hour[h]))));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `policy,iterations,solves,mean_s,max_s,lp_integral_pct,witness_plans,expansions`
///
/// Wall-clock columns; not reproducible across runs.
pub fn write_solver_csv<W: io::Write>(out: W, rows: &[MetricsSummary]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "policy",
        "iterations",
        "solves",
        "mean_s",
        "max_s",
        "lp_integral_pct",
        "witness_plans",
        "expansions",
    ])?;
    for s in rows {
        let Some(v) = &s.solver else { continue };
        w.write_record([
            s.policy.clone(),
            v.iterations.to_string(),
            v.solves.to_string(),
            cell(v.mean_seconds),
            cell(v.max_seconds),
            cell(v.lp_integral_share.map(|x| 100.0 * x)),
            v.witness_plans.to_string(),
            v.expansions.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use wardflow_core::{Minutes, PatientId, PoolId, Tier, TypeId};

    fn rec(id: u64, wait_h: i64, tier: Tier, specialty: Specialty) -> PatientRecord {
        let request = Minutes::from_hours(3);
        PatientRecord {
            id: PatientId(id),
            type_id: TypeId(1),
            specialty,
            source: Source::Ed,
            request,
            queue_entry: request,
            assignment: request,
            admission: request + Minutes::from_hours(wait_h),
            pool: PoolId(1),
            tier,
        }
    }

    #[test]
    fn constant_series_has_zero_width() {
        let e = batch_means_ci(&[2.5; 300], 30).unwrap();
        assert_eq!(e.mean, 2.5);
        assert_eq!(e.half_width, 0.0);
    }

    #[test]
    fn too_few_batches() {
        assert_eq!(batch_means_ci(&[1.0; 100], 5), Err(MetricsError::TooFewBatches(5)));
        assert!(batch_means_ci(&[1.0; 5], 10).is_err());
    }

    #[test]
    fn normal_batch_means_near_zero() {
        let mut ok = 0;
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut rng)).collect();
            let e = batch_means_ci(&xs, 20).unwrap();
            ok += usize::from(e.mean.abs() <= 0.2);
        }
        assert!(ok >= 95, "{ok}");
    }

    #[test]
    fn service_level_counts() {
        assert_eq!(service_level(&[0.0, 0.0], 8.0), Some(0.0));
        let w = [6.0, 10.0, 14.0];
        assert_eq!(service_level(&w, 12.0), Some(1.0 / 3.0));
        assert!(service_level(&w, 8.0) >= service_level(&w, 12.0));
        assert_eq!(service_level(&[], 8.0), None);
    }

    #[test]
    fn overflow_grouping() {
        let mut rs: Vec<PatientRecord> = (0..8)
            .map(|i| rec(i, 1, Tier::Primary, Specialty::Cardiology))
            .collect();
        rs.push(rec(8, 1, Tier::Preferred, Specialty::Cardiology));
        rs.push(rec(9, 1, Tier::Secondary, Specialty::Surgery));
        assert_eq!(overflow_rate(&rs), Some(0.2));
        let c = overflow_counts(&rs);
        let by_sp: u64 = c
            .iter()
            .filter(|(g, _)| matches!(g, OverflowGroup::Specialty(_)))
            .map(|(_, c)| c.overflowed)
            .sum();
        assert_eq!(by_sp, c[&OverflowGroup::Total].overflowed);
        assert_eq!(c[&OverflowGroup::RequestHour(3)].patients, 10);
        let primary: Vec<_> = rs.iter().take(8).cloned().collect();
        assert_eq!(overflow_rate(&primary), Some(0.0));
    }
}
