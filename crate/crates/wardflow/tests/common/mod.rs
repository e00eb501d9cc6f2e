#![allow(dead_code)]

use serde_json::json;
use wardflow::config::{HospitalConfig, Scenario};

/// One general-medicine ward and one patient type, ED requests only.
pub struct Tiny {
    pub capacity: i64,
    pub daily_requests: f64,
    pub hourly: [f64; 24],
    /// Weight of 0, 1, 2, ... nights.
    pub los_pmf: Vec<f64>,
    pub discharge_hours: [f64; 24],
    pub delay_hours: f64,
}

impl Default for Tiny {
    fn default() -> Self {
        let mut discharge = [0.0; 24];
        discharge[9..18].copy_from_slice(&[1.0, 2.0, 4.0, 6.0, 6.0, 5.0, 3.0, 2.0, 1.0]);
        Tiny {
            capacity: 200,
            daily_requests: 10.0,
            hourly: [1.0; 24],
            los_pmf: vec![0.0, 0.4, 0.3, 0.2, 0.1],
            discharge_hours: discharge,
            delay_hours: 0.0,
        }
    }
}

impl Tiny {
    pub fn config(&self) -> HospitalConfig {
        let (mean, sd) = ([self.delay_hours; 24], [self.delay_hours / 2.0; 24]);
        let delay = json!({"mean_hours": mean, "sd_hours": sd});
        let v = json!({
            "version": 1,
            "pools": [{"id": 1, "specialty": "general-medicine", "gender": "gender-neutral",
                       "class": "C", "capacity": self.capacity}],
            "types": [{"id": 1, "specialty": "general-medicine", "gender": "female",
                       "class": "C", "primary": [1]}],
            "arrivals": {
                "daily_requests": self.daily_requests,
                "source_shares": {"ed": 1.0},
                "hourly_profile": {"ed": self.hourly},
                "batch_hour": 19
            },
            "specialty_mix": {"ed": {"general-medicine": 1.0}},
            "class_mix": {"general-medicine": {"C": 1.0}},
            "gender_mix": {"general-medicine": {"female": 1.0}},
            "length_of_stay": {"general-medicine": {
                "ed_am": {"pmf": self.los_pmf}, "ed_pm": {"pmf": self.los_pmf},
                "sda": null, "el": null, "soc": null
            }},
            "discharge_hours": self.discharge_hours,
            "pre_allocation": delay,
            "post_allocation": delay,
            "simulation": {"horizon_days": 200, "warmup_days": 20, "seeds": [1, 2]}
        });
        HospitalConfig::from_json(&v.to_string()).expect("tiny config parses")
    }

    pub fn scenario(&self) -> Scenario {
        self.config().validate().expect("tiny config validates")
    }

    /// Mean bed occupancy time in days, if no stay has zero nights and
    /// requests and discharges fall uniformly within their hour.
    pub fn mean_stay_days(&self) -> f64 {
        let total: f64 = self.los_pmf.iter().sum();
        let nights: f64 = self
            .los_pmf
            .iter()
            .enumerate()
            .map(|(k, w)| k as f64 * w)
            .sum::<f64>()
            / total;
        let hour_mean = |w: &[f64; 24], within: f64| {
            let s: f64 = w.iter().sum();
            w.iter().enumerate().map(|(h, x)| x * (h as f64 + within)).sum::<f64>() / s / 24.0
        };
        // discharge minutes are 1..=60 within the hour
        nights - hour_mean(&self.hourly, 0.5) + hour_mean(&self.discharge_hours, 30.5 / 60.0)
    }
}
