//! Periodic arrival intensity used for the rate integral in the budget rule.

use alloc::vec::Vec;

use crate::time::{Minutes, MINUTES_PER_DAY, MINUTES_PER_HOUR};

/// A deterministic daily batch of requests, e.g. the evening elective list.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyBatch {
    /// Minute of day at which the batch arrives.
    pub minute_of_day: i64,
    /// Expected batch size per weekday, Monday first.
    pub mean_by_weekday: [f64; 7],
}

/// Piecewise-constant hourly rates (requests per hour, period one day) plus
/// daily batches.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalIntensity {
    pub hourly: [f64; 24],
    pub batches: Vec<DailyBatch>,
}

impl ArrivalIntensity {
    pub fn zero() -> Self {
        ArrivalIntensity {
            hourly: [0.0; 24],
            batches: Vec::new(),
        }
    }

    /// Expected number of arrivals in `[from, to)`.
    pub fn integral(&self, from: Minutes, to: Minutes) -> f64 {
        if to <= from {
            return 0.0;
        }
        let mut total = 0.0;
        let mut t = from.0;
        while t < to.0 {
            let hour_end = (t.div_euclid(MINUTES_PER_HOUR) + 1) * MINUTES_PER_HOUR;
            let end = hour_end.min(to.0);
            let h = Minutes(t).hour_of_day() as usize;
            total += self.hourly[h] * (end - t) as f64 / MINUTES_PER_HOUR as f64;
            t = end;
        }
        for b in &self.batches {
            let first = from.day() - 1;
            for day in first..=to.day() {
                let at = day * MINUTES_PER_DAY + b.minute_of_day;
                if at >= from.0 && at < to.0 {
                    total += b.mean_by_weekday[Minutes(at).weekday().index()];
                }
            }
        }
        total
    }

    /// Expected arrivals per day, averaged over the week.
    pub fn daily_mean(&self) -> f64 {
        self.hourly.iter().sum::<f64>()
            + self
                .batches
                .iter()
                .map(|b| b.mean_by_weekday.iter().sum::<f64>() / 7.0)
                .sum::<f64>()
    }
}
