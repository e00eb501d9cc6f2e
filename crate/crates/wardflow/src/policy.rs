//! Policy selection by name, as accepted on the command line.
//!
//! ```text
//! bmu | early1 | early2 | tb1 | tb2
//! tb(start, end, in_window_hours, default_hours)
//! p(alpha, beta, delta_hours[, target_hours, lead_minutes])
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;
use wardflow_core::policies::{
    early_discharge_transform, AssignmentPolicy, BmuPolicy, Clock, EarlyDischarge,
    PModelPolicy, ThresholdPolicy, ThresholdSchedule,
};
use wardflow_core::solver::BudgetParams;
use wardflow_core::{DischargeHourDistribution, Minutes};

use crate::config::PModelSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    Bmu,
    Early(EarlyDischarge),
    Threshold { name: String, schedule: ThresholdSchedule },
    PModel {
        budget: BudgetParams,
        target_hours: Option<f64>,
        lead_minutes: Option<i64>,
    },
}

#[derive(Debug, Error, PartialEq)]
pub enum PolicyParseError {
    #[error("unknown policy `{0}`")]
    Unknown(String),
    #[error("policy `{name}`: {message}")]
    BadArgs { name: String, message: String },
}

impl PolicySpec {
    pub fn p_model(alpha: f64, beta: f64, delta_hours: f64) -> PolicySpec {
        PolicySpec::PModel {
            budget: BudgetParams::new(alpha, beta, delta_hours).expect("valid budget"),
            target_hours: None,
            lead_minutes: None,
        }
    }

    /// Label used in reports, e.g. `BMU` or `P(0.15,0.02,4)`.
    pub fn label(&self) -> String {
        match self {
            PolicySpec::Bmu => "BMU".into(),
            PolicySpec::Early(v) => v.name().into(),
            PolicySpec::Threshold { name, .. } => name.clone(),
            PolicySpec::PModel { budget, .. } => {
                format!("P({},{},{})", budget.alpha, budget.beta, budget.delta_hours)
            }
        }
    }

    /// The discharge-hour distribution the ward runs with under this policy.
    pub fn discharge(&self, base: &DischargeHourDistribution) -> DischargeHourDistribution {
        match self {
            PolicySpec::Early(v) => early_discharge_transform(base, *v),
            _ => base.clone(),
        }
    }

    pub fn build(&self, defaults: &PModelSpec, clock: Option<Clock>) -> Box<dyn AssignmentPolicy + Send> {
        match self {
            PolicySpec::Bmu => Box::new(BmuPolicy::new()),
            PolicySpec::Early(v) => Box::new(BmuPolicy::named(v.name())),
            PolicySpec::Threshold { name, schedule } => {
                Box::new(ThresholdPolicy::new(name, *schedule))
            }
            PolicySpec::PModel {
                budget,
                target_hours,
                lead_minutes,
            } => {
                let mut params = defaults.params(*budget);
                if let Some(t) = target_hours {
                    params.delay_target = Minutes::from_hours_f64(*t);
                }
                if let Some(l) = lead_minutes {
                    params.lead = Minutes(*l);
                }
                let mut pol = PModelPolicy::new(params);
                if let Some(c) = clock {
                    pol = pol.with_clock(c);
                }
                Box::new(pol)
            }
        }
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn bad(name: &str, message: impl Into<String>) -> PolicyParseError {
    PolicyParseError::BadArgs {
        name: name.into(),
        message: message.into(),
    }
}

impl FromStr for PolicySpec {
    type Err = PolicyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = compact.to_ascii_lowercase();
        match lower.as_str() {
            "bmu" => return Ok(PolicySpec::Bmu),
            "early1" | "early-1" => return Ok(PolicySpec::Early(EarlyDischarge::Early1)),
            "early2" | "early-2" => return Ok(PolicySpec::Early(EarlyDischarge::Early2)),
            "tb1" | "tb-1" => {
                return Ok(PolicySpec::Threshold {
                    name: "TB-1".into(),
                    schedule: ThresholdSchedule::tb1(),
                })
            }
            "tb2" | "tb-2" => {
                return Ok(PolicySpec::Threshold {
                    name: "TB-2".into(),
                    schedule: ThresholdSchedule::tb2(),
                })
            }
            _ => {}
        }
        let (head, args) = match lower.split_once('(') {
            Some((h, rest)) if rest.ends_with(')') => (h, &rest[..rest.len() - 1]),
            _ => return Err(PolicyParseError::Unknown(s.into())),
        };
        let nums: Vec<f64> = args
            .split(',')
            .map(|a| a.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(head, format!("cannot parse arguments `{args}`")))?;
        if nums.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(bad(head, "arguments must be finite and nonnegative"));
        }
        match head {
            "p" | "pmodel" => {
                if nums.len() != 3 && nums.len() != 5 {
                    return Err(bad(head, "expected (alpha, beta, delta[, target, lead])"));
                }
                let budget = BudgetParams::new(nums[0], nums[1], nums[2])
                    .map_err(|e| bad(head, e.to_string()))?;
                let (target_hours, lead_minutes) = if nums.len() == 5 {
                    if nums[3] <= 0.0 {
                        return Err(bad(head, "target must be positive"));
                    }
                    (Some(nums[3]), Some(nums[4].round() as i64))
                } else {
                    (None, None)
                };
                Ok(PolicySpec::PModel {
                    budget,
                    target_hours,
                    lead_minutes,
                })
            }
            "tb" => {
                if nums.len() != 4 {
                    return Err(bad(head, "expected (start, end, in_window_hours, default_hours)"));
                }
                let schedule = ThresholdSchedule {
                    window_start: nums[0] as u8,
                    window_end: nums[1] as u8,
                    in_window_threshold: Minutes::from_hours_f64(nums[2]),
                    default_threshold: Minutes::from_hours_f64(nums[3]),
                };
                schedule.validate().map_err(|m| bad(head, m))?;
                Ok(PolicySpec::Threshold {
                    name: format!("TB({args})"),
                    schedule,
                })
            }
            _ => Err(PolicyParseError::Unknown(s.into())),
        }
    }
}
