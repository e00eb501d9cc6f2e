//! Bed availability-time distributions and the log meet-probability weights.
//!
//! Occupancy splits into whole nights `L` and within-day times: a patient
//! admitted at day fraction `A` with discharge hour `D` occupies the bed for
//! `L - A + D` days. Policies know the discharge day of an occupied bed but
//! not the hour, which follows a [`DischargeHourDistribution`]. Within an
//! hourly bin the discharge instant is uniform, so the CDF is piecewise
//! linear.

use alloc::vec::Vec;
use core::fmt;

use crate::domain::{Availability, BoardedPatient, CandidateBed, LogWeight};
use crate::time::{Minutes, MINUTES_PER_DAY, MINUTES_PER_HOUR};

/// Tolerance on the total mass of a discharge-hour distribution before it is
/// renormalized.
pub const MASS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum ProbabilityError {
    BadMass { index: usize, value: f64 },
    MassSum(f64),
    FractionOutOfRange(f64),
    BadLosMoments { mean: f64, sd: f64 },
    EmptyLosPmf,
}

impl fmt::Display for ProbabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbabilityError::BadMass { index, value } => {
                write!(f, "mass[{index}] = {value} is negative or not finite")
            }
            ProbabilityError::MassSum(s) => write!(f, "masses sum to {s}, expected 1"),
            ProbabilityError::FractionOutOfRange(x) => {
                write!(f, "time-of-day fraction {x} outside [0, 1)")
            }
            ProbabilityError::BadLosMoments { mean, sd } => {
                write!(f, "length-of-stay mean {mean} / sd {sd} invalid")
            }
            ProbabilityError::EmptyLosPmf => f.write_str("length-of-stay pmf has no mass"),
        }
    }
}

impl core::error::Error for ProbabilityError {}

/// Probability that the discharge time of day falls in each hourly bin.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DischargeHourDistribution {
    mass: [f64; 24],
    #[cfg_attr(feature = "serde", serde(skip))]
    cumulative: [f64; 25],
}

impl DischargeHourDistribution {
    /// Validates and renormalizes `mass`. The sum must be within
    /// [`MASS_TOLERANCE`] of one.
    pub fn new(mass: [f64; 24]) -> Result<Self, ProbabilityError> {
        for (index, &value) in mass.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ProbabilityError::BadMass { index, value });
            }
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(ProbabilityError::MassSum(sum));
        }
        Ok(Self::normalized(mass, sum))
    }

    /// Builds from arbitrary nonnegative weights, scaling them to sum to one.
    pub fn from_weights(weights: [f64; 24]) -> Result<Self, ProbabilityError> {
        for (index, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ProbabilityError::BadMass { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(ProbabilityError::MassSum(sum));
        }
        Ok(Self::normalized(weights, sum))
    }

    fn normalized(mut mass: [f64; 24], sum: f64) -> Self {
        for m in &mut mass {
            *m /= sum;
        }
        let mut cumulative = [0.0; 25];
        for h in 0..24 {
            cumulative[h + 1] = cumulative[h] + mass[h];
        }
        cumulative[24] = 1.0;
        DischargeHourDistribution { mass, cumulative }
    }

    pub fn uniform() -> Self {
        Self::normalized([1.0; 24], 24.0)
    }

    /// All mass in one hourly bin.
    pub fn degenerate(hour: u8) -> Self {
        let mut mass = [0.0; 24];
        mass[usize::from(hour % 24)] = 1.0;
        Self::normalized(mass, 1.0)
    }

    pub fn mass(&self) -> &[f64; 24] {
        &self.mass
    }

    /// Total mass of the bins `[0, hour)`.
    pub fn mass_before(&self, hour: usize) -> f64 {
        self.cumulative[hour.min(24)]
    }

    /// `P(D <= m)` for `m` minutes after midnight, linear within each bin.
    pub fn cdf_minute_of_day(&self, minute: f64) -> f64 {
        if minute.is_nan() || minute <= 0.0 {
            return 0.0;
        }
        let per_hour = MINUTES_PER_HOUR as f64;
        if minute >= 24.0 * per_hour {
            return 1.0;
        }
        let h = libm::floor(minute / per_hour) as usize;
        let frac = (minute - h as f64 * per_hour) / per_hour;
        (self.cumulative[h] + self.mass[h] * frac).min(1.0)
    }

    /// Maps a uniform draw `u` in `[0, 1)` to an hour bin by inversion.
    pub fn hour_for_quantile(&self, u: f64) -> u8 {
        let mut h = self.cumulative[1..].partition_point(|&c| c <= u);
        while h < 23 && self.mass[h] == 0.0 {
            h += 1;
        }
        while self.mass[h] == 0.0 && h > 0 {
            h -= 1;
        }
        h as u8
    }

    /// Mean discharge time of day in hours.
    pub fn mean_hour(&self) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .map(|(h, m)| m * (h as f64 + 0.5))
            .sum()
    }
}

/// Occupancy in days: `L - A + D`.
///
/// `A` and `D` are time-of-day fractions in `[0, 1)`.
pub fn occupancy_time(los_days: u32, admit: f64, discharge: f64) -> Result<f64, ProbabilityError> {
    for x in [admit, discharge] {
        if !(0.0..1.0).contains(&x) {
            return Err(ProbabilityError::FractionOutOfRange(x));
        }
    }
    Ok(f64::from(los_days) - admit + discharge)
}

/// Length-of-stay law in whole nights.
#[derive(Debug, Clone, PartialEq)]
pub enum LengthOfStayLaw {
    /// Parametric surrogate matched to a mean and standard deviation.
    Moments { mean: f64, sd: f64 },
    /// `pmf[k]` is the weight of `k` nights; normalized on use.
    Empirical(Vec<f64>),
}

impl LengthOfStayLaw {
    pub fn validate(&self) -> Result<(), ProbabilityError> {
        match self {
            LengthOfStayLaw::Moments { mean, sd } => {
                if !(mean.is_finite() && sd.is_finite() && *mean >= 0.0 && *sd >= 0.0) {
                    return Err(ProbabilityError::BadLosMoments {
                        mean: *mean,
                        sd: *sd,
                    });
                }
                Ok(())
            }
            LengthOfStayLaw::Empirical(pmf) => {
                for (index, &value) in pmf.iter().enumerate() {
                    if !(value.is_finite() && value >= 0.0) {
                        return Err(ProbabilityError::BadMass { index, value });
                    }
                }
                if pmf.iter().sum::<f64>() <= 0.0 {
                    return Err(ProbabilityError::EmptyLosPmf);
                }
                Ok(())
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            LengthOfStayLaw::Moments { mean, .. } => *mean,
            LengthOfStayLaw::Empirical(pmf) => {
                let total: f64 = pmf.iter().sum();
                pmf.iter()
                    .enumerate()
                    .map(|(k, w)| k as f64 * w)
                    .sum::<f64>()
                    / total
            }
        }
    }
}

/// `P(d_j <= t)` for a candidate bed.
///
/// A bed free now is available from its release time on. A bed scheduled to
/// discharge on day `k` follows `dist` shifted to that day.
pub fn availability_cdf(bed: &CandidateBed, t: Minutes, dist: &DischargeHourDistribution) -> f64 {
    match bed.availability {
        Availability::Now(at) => {
            if t >= at {
                1.0
            } else {
                0.0
            }
        }
        Availability::Later { day } => {
            let offset = t.0 - day * MINUTES_PER_DAY;
            if offset <= 0 {
                0.0
            } else if offset >= MINUTES_PER_DAY {
                1.0
            } else {
                dist.cdf_minute_of_day(offset as f64)
            }
        }
    }
}

/// `ln P(d_j - a_i <= tau_i)`.
pub fn log_meet_probability(
    patient: &BoardedPatient,
    bed: &CandidateBed,
    dist: &DischargeHourDistribution,
) -> LogWeight {
    let deadline = patient.request_time + patient.delay_target;
    LogWeight::from_probability(availability_cdf(bed, deadline, dist))
}

/// `P(d_j <= t | d_j > now)` for a bed that has not freed by `now`.
///
/// A bed scheduled for today cannot free in the part of the day that has
/// already passed, so the mass before `now` is removed. Beds free now and
/// beds scheduled for later days are unaffected.
pub fn availability_cdf_at(
    bed: &CandidateBed,
    t: Minutes,
    now: Minutes,
    dist: &DischargeHourDistribution,
) -> f64 {
    let Availability::Later { day } = bed.availability else {
        return availability_cdf(bed, t, dist);
    };
    if t <= now {
        return 0.0;
    }
    let start = Minutes::start_of_day(day);
    if now <= start {
        return availability_cdf(bed, t, dist);
    }
    let gone = availability_cdf(bed, now, dist);
    let rest = 1.0 - gone;
    if rest <= 1e-12 {
        // all mass already passed: treat as available immediately after now
        return 1.0;
    }
    ((availability_cdf(bed, t, dist) - gone) / rest).clamp(0.0, 1.0)
}

/// [`log_meet_probability`] for a decision taken at `now`, using
/// [`availability_cdf_at`].
pub fn log_meet_probability_at(
    patient: &BoardedPatient,
    bed: &CandidateBed,
    now: Minutes,
    dist: &DischargeHourDistribution,
) -> LogWeight {
    let deadline = patient.request_time + patient.delay_target;
    LogWeight::from_probability(availability_cdf_at(bed, deadline, now, dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BedId, PatientId, PoolId, Source, TypeId};

    fn later(day: i64) -> CandidateBed {
        CandidateBed {
            id: BedId(1),
            pool: PoolId(1),
            availability: Availability::Later { day },
        }
    }

    fn now(t: i64) -> CandidateBed {
        CandidateBed {
            id: BedId(1),
            pool: PoolId(1),
            availability: Availability::Now(Minutes(t)),
        }
    }

    fn patient(a: i64, tau_h: i64) -> BoardedPatient {
        BoardedPatient {
            id: PatientId(1),
            type_id: TypeId(1),
            request_time: Minutes(a),
            delay_target: Minutes::from_hours(tau_h),
            source: Source::Ed,
        }
    }

    #[test]
    fn occupancy_examples() {
        assert_eq!(occupancy_time(2, 0.5, 0.5), Ok(2.0));
        assert_eq!(occupancy_time(0, 0.25, 0.75), Ok(0.5));
        assert!((occupancy_time(1, 0.9, 0.1).unwrap() - 0.2).abs() < 1e-12);
        assert!(occupancy_time(1, 1.0, 0.1).is_err());
        assert!(occupancy_time(1, 0.1, -0.1).is_err());
    }

    #[test]
    fn cdf_examples() {
        let u = DischargeHourDistribution::uniform();
        assert_eq!(availability_cdf(&now(100), Minutes(100), &u), 1.0);
        assert_eq!(availability_cdf(&now(100), Minutes(99), &u), 0.0);
        let k = 3;
        assert_eq!(availability_cdf(&later(k), Minutes::start_of_day(k), &u), 0.0);
        let noon = Minutes::start_of_day(k) + Minutes::from_hours(12);
        assert!((availability_cdf(&later(k), noon, &u) - 0.5).abs() < 1e-15);
        assert_eq!(availability_cdf(&later(k), Minutes::start_of_day(k + 1), &u), 1.0);
    }

    #[test]
    fn log_weight_examples() {
        let u = DischargeHourDistribution::uniform();
        assert_eq!(
            log_meet_probability(&patient(0, 10), &now(600), &u),
            LogWeight::Finite(0.0)
        );
        assert_eq!(
            log_meet_probability(&patient(0, 10), &now(601), &u),
            LogWeight::Impossible
        );
        // request at 20:00 on day 0, target 10 h, bed discharging on day 1
        let p = patient(20 * 60, 10);
        match log_meet_probability(&p, &later(1), &u) {
            LogWeight::Finite(w) => assert!((w - libm::log(6.0 / 24.0)).abs() < 1e-12),
            LogWeight::Impossible => panic!("expected finite weight"),
        }
    }

    #[test]
    fn conditioning_on_now_removes_past_mass() {
        let u = DischargeHourDistribution::uniform();
        let bed = later(2);
        let now = Minutes::start_of_day(2) + Minutes::from_hours(12);
        let t = now + Minutes::from_hours(6);
        assert!((availability_cdf_at(&bed, t, now, &u) - 0.5).abs() < 1e-12);
        assert_eq!(availability_cdf_at(&bed, now, now, &u), 0.0);
        let before = Minutes::start_of_day(1);
        assert_eq!(
            availability_cdf_at(&bed, t, before, &u),
            availability_cdf(&bed, t, &u)
        );
        let late = DischargeHourDistribution::degenerate(3);
        assert_eq!(availability_cdf_at(&bed, now + Minutes(1), now, &late), 1.0);
    }

    #[test]
    fn distribution_validation() {
        let mut m = [0.0; 24];
        m[3] = 0.5;
        assert!(matches!(
            DischargeHourDistribution::new(m),
            Err(ProbabilityError::MassSum(_))
        ));
        m[4] = -0.5;
        assert!(matches!(
            DischargeHourDistribution::new(m),
            Err(ProbabilityError::BadMass { index: 4, .. })
        ));
        let d = DischargeHourDistribution::degenerate(12);
        assert_eq!(d.hour_for_quantile(0.0), 12);
        assert_eq!(d.hour_for_quantile(0.999), 12);
        assert_eq!(d.mass_before(12), 0.0);
        assert_eq!(d.mass_before(13), 1.0);
    }

    #[test]
    fn quantile_inversion_skips_empty_bins() {
        let mut m = [0.0; 24];
        m[2] = 0.25;
        m[10] = 0.75;
        let d = DischargeHourDistribution::new(m).unwrap();
        assert_eq!(d.hour_for_quantile(0.0), 2);
        assert_eq!(d.hour_for_quantile(0.2499), 2);
        assert_eq!(d.hour_for_quantile(0.25), 10);
        assert_eq!(d.hour_for_quantile(0.9999), 10);
    }

    #[test]
    fn los_law_mean() {
        let l = LengthOfStayLaw::Empirical(alloc::vec![1.0, 1.0, 2.0]);
        assert!((l.mean() - 1.25).abs() < 1e-12);
        assert!(LengthOfStayLaw::Moments { mean: -1.0, sd: 1.0 }
            .validate()
            .is_err());
    }
}
