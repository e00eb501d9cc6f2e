//! Dynamic overflow budget.

use core::fmt;

/// Parameters of the budget rule `B = max{B*, alpha |I| + beta * R}`, where
/// `R` is the expected number of new requests over the next `delta_hours`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BudgetParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta_hours: f64,
    /// Round the second term down to an integer.
    pub integerize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvalidBudgetParams;

impl fmt::Display for InvalidBudgetParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("budget parameters must be finite and nonnegative")
    }
}

impl core::error::Error for InvalidBudgetParams {}

impl BudgetParams {
    pub fn new(alpha: f64, beta: f64, delta_hours: f64) -> Result<Self, InvalidBudgetParams> {
        let p = BudgetParams {
            alpha,
            beta,
            delta_hours,
            integerize: true,
        };
        p.validate()?;
        Ok(p)
    }

    /// Minimum-budget rule.
    pub fn minimum() -> Self {
        BudgetParams {
            alpha: 0.0,
            beta: 0.0,
            delta_hours: 0.0,
            integerize: true,
        }
    }

    pub fn validate(&self) -> Result<(), InvalidBudgetParams> {
        if [self.alpha, self.beta, self.delta_hours]
            .iter()
            .all(|v| v.is_finite() && *v >= 0.0)
        {
            Ok(())
        } else {
            Err(InvalidBudgetParams)
        }
    }
}

/// Overflow budget for one decision iteration. Never below `b_star`.
pub fn overflow_budget(b_star: f64, n_waiting: usize, rate_integral: f64, params: &BudgetParams) -> f64 {
    let raw = params.alpha * n_waiting as f64 + params.beta * rate_integral;
    let extra = if params.integerize { libm::floor(raw) } else { raw };
    if extra > b_star {
        extra
    } else {
        b_star
    }
}
