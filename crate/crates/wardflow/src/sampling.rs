//! Random variates used by the simulator: non-homogeneous Poisson arrivals,
//! length-of-stay tables and log-normal allocation delays.

use rand::Rng;
use statrs::distribution::{Binomial, Discrete, NegativeBinomial, Poisson};
use wardflow_core::probability::LengthOfStayLaw;

/// Largest length of stay kept in a table, in nights.
pub const MAX_LOS_NIGHTS: usize = 3650;
const TAIL_MASS: f64 = 1e-12;

/// Arrival times in `[0, horizon_hours)` of a Poisson process whose rate
/// repeats every 24 hours, generated by thinning against the peak rate.
///
/// `hourly[h]` is the rate (per hour) during hour `h` of each day. Times are
/// in hours, sorted ascending.
pub fn sample_nhpp<R: Rng + ?Sized>(hourly: &[f64; 24], horizon_hours: f64, rng: &mut R) -> Vec<f64> {
    let peak = hourly.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    if !(peak > 0.0) || !(horizon_hours > 0.0) {
        return out;
    }
    let mut t = 0.0;
    loop {
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / peak;
        if t >= horizon_hours {
            return out;
        }
        let h = (t.floor() as i64).rem_euclid(24) as usize;
        let accept: f64 = rng.random();
        if accept * peak < hourly[h] {
            out.push(t);
        }
    }
}

/// Poisson variate by inversion; adequate for the modest means of daily
/// batches.
pub fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u32 {
    if !(mean > 0.0) {
        return 0;
    }
    let u: f64 = rng.random();
    let mut k = 0u32;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf && p > 0.0 {
        k += 1;
        p *= mean / f64::from(k);
        cdf += p;
    }
    // cdf can stall below u when the tail underflows
    if u > cdf {
        k = k.max(mean.round() as u32);
    }
    k
}

/// Inverse-cdf table of a length-of-stay law, in whole nights.
#[derive(Debug, Clone, PartialEq)]
pub struct LosTable {
    cdf: Vec<f64>,
}

impl LosTable {
    /// Moment laws are matched by a negative binomial when overdispersed, a
    /// binomial when underdispersed, and a Poisson otherwise.
    pub fn new(law: &LengthOfStayLaw) -> LosTable {
        let pmf: Vec<f64> = match law {
            LengthOfStayLaw::Empirical(w) => w.clone(),
            LengthOfStayLaw::Moments { mean, sd } => moment_pmf(*mean, *sd),
        };
        let total: f64 = pmf.iter().sum();
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for w in pmf {
            acc += w / total;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        LosTable { cdf }
    }

    pub fn sample(&self, u: f64) -> u32 {
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1) as u32
    }

    pub fn pmf(&self, k: usize) -> f64 {
        match k {
            0 => self.cdf.first().copied().unwrap_or(0.0),
            _ if k < self.cdf.len() => self.cdf[k] - self.cdf[k - 1],
            _ => 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        (0..self.cdf.len()).map(|k| k as f64 * self.pmf(k)).sum()
    }
}

fn moment_pmf(mean: f64, sd: f64) -> Vec<f64> {
    if mean <= 0.0 {
        return vec![1.0];
    }
    let var = sd * sd;
    let rel = (var - mean) / mean;
    let f: Box<dyn Fn(u64) -> f64> = if rel > 1e-9 {
        let r = mean * mean / (var - mean);
        let p = r / (r + mean);
        let d = NegativeBinomial::new(r, p).expect("valid negative binomial");
        Box::new(move |k| d.pmf(k))
    } else if rel < -1e-9 {
        let n = (mean * mean / (mean - var)).round().max(mean.ceil()).max(1.0);
        let d = Binomial::new((mean / n).min(1.0), n as u64).expect("valid binomial");
        Box::new(move |k| d.pmf(k))
    } else {
        let d = Poisson::new(mean).expect("valid poisson");
        Box::new(move |k| d.pmf(k))
    };
    let mut pmf = Vec::new();
    let mut acc = 0.0;
    for k in 0..=MAX_LOS_NIGHTS {
        let p = f(k as u64);
        pmf.push(p);
        acc += p;
        if acc >= 1.0 - TAIL_MASS && k as f64 > mean {
            break;
        }
    }
    pmf
}

/// Log-normal delay with the given mean and standard deviation, evaluated
/// at a standard normal draw `z`. Returns hours.
pub fn lognormal_delay(mean: f64, sd: f64, z: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    if sd <= 0.0 {
        return mean;
    }
    let s2 = (1.0 + (sd / mean).powi(2)).ln();
    let mu = mean.ln() - s2 / 2.0;
    (mu + s2.sqrt() * z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn zero_rate_gives_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_nhpp(&[0.0; 24], 1000.0, &mut rng).is_empty());
    }

    #[test]
    fn constant_rate_count_concentrates() {
        let mut inside = 0;
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = sample_nhpp(&[2.0; 24], 1000.0, &mut rng).len() as f64;
            if (n - 2000.0).abs() <= 3.0 * 2000f64.sqrt() {
                inside += 1;
            }
        }
        assert!(inside >= 198, "{inside}/200");
    }

    #[test]
    fn hourly_histogram_fits_rates() {
        let mut rates = [0.0; 24];
        for (h, r) in rates.iter_mut().enumerate() {
            *r = 1.0 + (h as f64 / 24.0 * std::f64::consts::TAU).sin().abs() * 4.0;
        }
        let days = 400.0;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let times = sample_nhpp(&rates, days * 24.0, &mut rng);
        assert!(times.windows(2).all(|w| w[0] <= w[1]));
        let mut hist = [0.0; 24];
        for t in &times {
            hist[(t.floor() as usize) % 24] += 1.0;
        }
        let chi2: f64 = (0..24)
            .map(|h| {
                let e = rates[h] * days;
                (hist[h] - e).powi(2) / e
            })
            .sum();
        let p = 1.0 - ChiSquared::new(24.0).unwrap().cdf(chi2);
        assert!(p > 0.01, "p = {p}");
    }

    #[test]
    fn moment_tables_reproduce_mean() {
        for (mean, sd) in [(2.56, 3.23), (1.23, 1.16), (4.0, 2.0), (3.0, 3f64.sqrt())] {
            let table = LosTable::new(&LengthOfStayLaw::Moments { mean, sd });
            assert!((table.mean() - mean).abs() < 1e-3 * mean, "{mean} {}", table.mean());
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let n = 100_000;
            let s: f64 = (0..n).map(|_| f64::from(table.sample(rng.random()))).sum();
            assert!((s / n as f64 - mean).abs() <= 0.02 * mean);
        }
    }

    #[test]
    fn degenerate_table() {
        let t = LosTable::new(&LengthOfStayLaw::Empirical(vec![0.0, 1.0]));
        assert_eq!(t.sample(0.0), 1);
        assert_eq!(t.sample(0.999), 1);
    }

    #[test]
    fn lognormal_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| lognormal_delay(1.5, 1.2, StandardNormal.sample(&mut rng)))
            .collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
        assert!((m - 1.5).abs() < 0.02);
        assert!((v.sqrt() - 1.2).abs() < 0.05);
        assert_eq!(lognormal_delay(2.0, 0.0, 3.0), 2.0);
        assert_eq!(lognormal_delay(0.0, 0.0, 3.0), 0.0);
    }

    #[test]
    fn poisson_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s: u64 = (0..50_000).map(|_| u64::from(sample_poisson(9.5, &mut rng))).sum();
        assert!((s as f64 / 50_000.0 - 9.5).abs() < 0.1);
        assert_eq!(sample_poisson(0.0, &mut rng), 0);
    }
}
