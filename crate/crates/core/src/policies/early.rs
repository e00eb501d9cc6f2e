//! Early-discharge variants: the BMU rules run against a discharge-hour
//! distribution with more mass in the morning.

use crate::probability::DischargeHourDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum EarlyDischarge {
    /// 26% of discharges before noon, with the morning peak before 09:00.
    Early1,
    /// 55% before noon, 26% before 09:00.
    Early2,
}

impl EarlyDischarge {
    pub fn name(self) -> &'static str {
        match self {
            EarlyDischarge::Early1 => "Early-1",
            EarlyDischarge::Early2 => "Early-2",
        }
    }

    /// Target mass of `[0, 9)`, `[9, 12)` and `[12, 24)`.
    pub fn segment_targets(self) -> [f64; 3] {
        match self {
            EarlyDischarge::Early1 => [0.10, 0.16, 0.74],
            EarlyDischarge::Early2 => [0.26, 0.29, 0.45],
        }
    }
}

const SEGMENTS: [(usize, usize); 3] = [(0, 9), (9, 12), (12, 24)];

/// Rescales each segment of `dist` to the variant's target mass, keeping the
/// shape within a segment. A segment with no mass is filled uniformly.
pub fn early_discharge_transform(
    dist: &DischargeHourDistribution,
    variant: EarlyDischarge,
) -> DischargeHourDistribution {
    let src = dist.mass();
    let mut out = [0.0; 24];
    for (&(lo, hi), target) in SEGMENTS.iter().zip(variant.segment_targets()) {
        let have: f64 = src[lo..hi].iter().sum();
        for h in lo..hi {
            out[h] = if have > 0.0 {
                src[h] / have * target
            } else {
                target / (hi - lo) as f64
            };
        }
    }
    DischargeHourDistribution::from_weights(out).expect("targets are positive")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn afternoon_heavy() -> DischargeHourDistribution {
        let mut w = [0.0; 24];
        w[8] = 1.0;
        w[10] = 3.0;
        w[11] = 6.0;
        for h in 12..18 {
            w[h] = 12.0;
        }
        w[18] = 4.0;
        DischargeHourDistribution::from_weights(w).unwrap()
    }

    #[test]
    fn early1_before_noon() {
        let d = early_discharge_transform(&afternoon_heavy(), EarlyDischarge::Early1);
        assert!((d.mass_before(12) - 0.26).abs() <= 0.01);
        assert!((d.mass().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn early2_before_noon_and_nine() {
        let d = early_discharge_transform(&afternoon_heavy(), EarlyDischarge::Early2);
        assert!((d.mass_before(12) - 0.55).abs() <= 0.01);
        assert!((d.mass_before(9) - 0.26).abs() <= 0.01);
        assert!((d.mass().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn empty_segment_filled_uniformly() {
        let d = early_discharge_transform(
            &DischargeHourDistribution::degenerate(14),
            EarlyDischarge::Early2,
        );
        assert!((d.mass()[0] - 0.26 / 9.0).abs() < 1e-12);
        assert!((d.mass()[10] - 0.29 / 3.0).abs() < 1e-12);
        assert!((d.mass()[14] - 0.45).abs() < 1e-12);
    }
}
