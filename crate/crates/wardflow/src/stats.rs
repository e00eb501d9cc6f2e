//! Chi-square test of independence between the discharge times of beds.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

pub const MIN_SAMPLES: usize = 30;
/// Target expected count per merged hour bin.
const MIN_BIN_COUNT: usize = 5;
const MAX_BINS: usize = 6;

#[derive(Debug, Error, PartialEq)]
pub enum IndependenceError {
    #[error("need ≥ 2 beds, got {0}")]
    TooFewBeds(usize),
    #[error("bed {bed} has {got} samples, need ≥ {MIN_SAMPLES}")]
    TooFewSamples { bed: usize, got: usize },
    #[error("beds have different sample counts")]
    Ragged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependenceReport {
    /// Statistic of the pair with the smallest p-value.
    pub statistic: f64,
    pub degrees_of_freedom: f64,
    pub min_p_value: f64,
    /// `min_p_value` times the number of pairs, capped at 1.
    pub adjusted_p_value: f64,
    pub pairs: usize,
    pub worst_pair: (usize, usize),
}

/// Tests pairwise independence of discharge times.
///
/// `samples[b][k]` is the discharge time of day (hours in `[0, 24)`) of bed
/// `b` in observation `k`; observations are paired across beds by index.
/// Each bed's times are binned by hour, with adjacent hours merged until
/// bins hold enough observations.
pub fn independence_check(samples: &[Vec<f64>]) -> Result<IndependenceReport, IndependenceError> {
    if samples.len() < 2 {
        return Err(IndependenceError::TooFewBeds(samples.len()));
    }
    let n = samples[0].len();
    for (bed, s) in samples.iter().enumerate() {
        if s.len() < MIN_SAMPLES {
            return Err(IndependenceError::TooFewSamples { bed, got: s.len() });
        }
        if s.len() != n {
            return Err(IndependenceError::Ragged);
        }
    }
    let binned: Vec<(Vec<usize>, usize)> = samples.iter().map(|s| bin(s)).collect();
    let mut worst: Option<IndependenceReport> = None;
    let pairs = samples.len() * (samples.len() - 1) / 2;
    for a in 0..samples.len() {
        for b in a + 1..samples.len() {
            let (stat, df) = chi_square(&binned[a], &binned[b], n);
            let p = if df > 0.0 {
                1.0 - ChiSquared::new(df).expect("positive df").cdf(stat)
            } else {
                1.0
            };
            if worst.map_or(true, |w| p < w.min_p_value) {
                worst = Some(IndependenceReport {
                    statistic: stat,
                    degrees_of_freedom: df,
                    min_p_value: p,
                    adjusted_p_value: (p * pairs as f64).min(1.0),
                    pairs,
                    worst_pair: (a, b),
                });
            }
        }
    }
    Ok(worst.expect("at least one pair"))
}

/// Bin index of each observation and the number of bins.
fn bin(times: &[f64]) -> (Vec<usize>, usize) {
    let hour = |t: f64| (t.floor() as i64).rem_euclid(24) as usize;
    let mut counts = [0usize; 24];
    for &t in times {
        counts[hour(t)] += 1;
    }
    let bins = (times.len() / MIN_BIN_COUNT).clamp(2, MAX_BINS);
    let target = times.len().div_ceil(bins);
    let mut of_hour = [0usize; 24];
    let (mut current, mut filled) = (0, 0);
    for h in 0..24 {
        if filled >= target && counts[h] > 0 {
            current += 1;
            filled = 0;
        }
        of_hour[h] = current;
        filled += counts[h];
    }
    (times.iter().map(|&t| of_hour[hour(t)]).collect(), current + 1)
}

fn chi_square(a: &(Vec<usize>, usize), b: &(Vec<usize>, usize), n: usize) -> (f64, f64) {
    let mut table = vec![vec![0.0f64; b.1]; a.1];
    for k in 0..n {
        table[a.0[k]][b.0[k]] += 1.0;
    }
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..b.1).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let total = n as f64;
    let mut stat = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &obs) in r.iter().enumerate() {
            let e = rows[i] * cols[j] / total;
            if e > 0.0 {
                stat += (obs - e).powi(2) / e;
            }
        }
    }
    let nr = rows.iter().filter(|&&x| x > 0.0).count();
    let nc = cols.iter().filter(|&&x| x > 0.0).count();
    (stat, (nr.saturating_sub(1) * nc.saturating_sub(1)) as f64)
}
