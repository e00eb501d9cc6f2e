//! Exact solvers for the probability-maximizing assignment problem and the
//! minimum overflow budget, the dynamic budget rule, FCFS normalization, and
//! an exhaustive reference oracle.
//!
//! Both optimization problems are solved over an LP relaxation by a
//! self-contained bounded-variable simplex. The minimum-cost problem has an
//! integral relaxation; the budget-constrained one may not, and falls back to
//! branch and bound.
//!
//! Plans are ranked by the symbolic objective (fewest impossible pairings,
//! then largest finite log-probability sum), then by lower total cost.

mod bnb;
mod budget;
mod fcfs;
mod lp;
mod model;
mod oracle;

use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::domain::{validate_instance, AssignmentInstance, AssignmentPlan, InstanceViolation};

pub use budget::{overflow_budget, BudgetParams};
pub use fcfs::{fcfs_normalize, fcfs_normalize_many, same_type};
pub use oracle::{brute_force_min_cost, brute_force_oracle, ORACLE_MAX_PATIENTS, ORACLE_MAX_PLANS};

use model::{Model, Problem};

/// Which constraint makes an instance infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    /// Some patients cannot all be given distinct eligible beds.
    Matching,
    /// Plans exist, but none within the overflow budget.
    Budget,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    Invalid(InstanceViolation),
    Infeasible(Binding),
    TooLarge { patients: usize, plans: f64 },
    NodeLimit(usize),
    Numerical,
    UnknownBed(crate::domain::BedId),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Invalid(v) => write!(f, "invalid instance: {v}"),
            SolverError::Infeasible(Binding::Matching) => {
                f.write_str("infeasible: patients cannot all be matched to distinct eligible beds")
            }
            SolverError::Infeasible(Binding::Budget) => {
                f.write_str("infeasible: no plan fits within the overflow budget")
            }
            SolverError::TooLarge { patients, plans } => write!(
                f,
                "instance too large for exhaustive search ({patients} patients, {plans:e} plans)"
            ),
            SolverError::NodeLimit(n) => write!(f, "branch and bound exceeded {n} nodes"),
            SolverError::Numerical => f.write_str("simplex failed numerically"),
            SolverError::UnknownBed(b) => write!(f, "unknown bed id {b}"),
        }
    }
}

impl core::error::Error for SolverError {}

impl From<InstanceViolation> for SolverError {
    fn from(v: InstanceViolation) -> Self {
        SolverError::Invalid(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Merge interchangeable beds into capacity classes.
    pub aggregate_beds: bool,
    /// Run [`validate_instance`] before solving.
    pub validate: bool,
    pub node_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            aggregate_beds: true,
            validate: true,
            node_limit: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub plan: AssignmentPlan,
    /// Whether the root LP relaxation was already integral.
    pub lp_was_integral: bool,
    /// LP relaxations solved, root included.
    pub nodes_explored: usize,
    pub lp_pivots: usize,
    /// Filled in by callers that have a clock.
    pub wall_time: Option<Duration>,
}

/// Minimum overflow budget and a plan achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct MinBudget {
    pub budget: f64,
    /// Among minimum-cost plans, one with the best symbolic objective.
    pub plan: AssignmentPlan,
    pub lp_was_integral: bool,
    pub nodes_explored: usize,
}

fn run(
    inst: &AssignmentInstance,
    problem: Problem,
    opts: &SolveOptions,
) -> Result<SolveReport, SolverError> {
    if opts.validate {
        validate_instance(inst)?;
    }
    if inst.patients.is_empty() {
        return Ok(SolveReport {
            plan: AssignmentPlan::evaluate(inst, Vec::new()).map_err(|_| SolverError::Numerical)?,
            lp_was_integral: true,
            nodes_explored: 0,
            lp_pivots: 0,
            wall_time: None,
        });
    }
    let model = Model::build(inst, problem, opts.aggregate_beds);
    let res = match bnb::solve(&model, opts.node_limit) {
        Ok(r) => r,
        Err(bnb::BnbError::RootInfeasible) => {
            if problem == Problem::PModel && inst.budget.is_finite() {
                let relaxed = Model::build(inst, Problem::MinCostOnly, opts.aggregate_beds);
                return match bnb::solve(&relaxed, opts.node_limit) {
                    Ok(_) => Err(SolverError::Infeasible(Binding::Budget)),
                    Err(bnb::BnbError::RootInfeasible) | Err(bnb::BnbError::NoIntegral) => {
                        Err(SolverError::Infeasible(Binding::Matching))
                    }
                    Err(bnb::BnbError::NodeLimit) => Err(SolverError::NodeLimit(opts.node_limit)),
                    Err(bnb::BnbError::Numerical) => Err(SolverError::Numerical),
                };
            }
            return Err(SolverError::Infeasible(Binding::Matching));
        }
        Err(bnb::BnbError::NoIntegral) => {
            return Err(SolverError::Infeasible(if problem == Problem::PModel {
                Binding::Budget
            } else {
                Binding::Matching
            }))
        }
        Err(bnb::BnbError::NodeLimit) => return Err(SolverError::NodeLimit(opts.node_limit)),
        Err(bnb::BnbError::Numerical) => return Err(SolverError::Numerical),
    };
    let bed_of = model.bed_assignment(&res.x);
    let plan = AssignmentPlan::evaluate(inst, bed_of).map_err(|_| SolverError::Numerical)?;
    Ok(SolveReport {
        plan,
        lp_was_integral: res.root_integral,
        nodes_explored: res.nodes,
        lp_pivots: res.pivots,
        wall_time: None,
    })
}

/// Maximizes the joint probability of meeting all delay targets within the
/// overflow budget.
pub fn solve_p_model(inst: &AssignmentInstance) -> Result<SolveReport, SolverError> {
    solve_p_model_with(inst, &SolveOptions::default())
}

pub fn solve_p_model_with(
    inst: &AssignmentInstance,
    opts: &SolveOptions,
) -> Result<SolveReport, SolverError> {
    run(inst, Problem::PModel, opts)
}

/// Minimum total overflow cost over plans ignoring the budget, with a
/// witness plan.
pub fn min_overflow_budget(inst: &AssignmentInstance) -> Result<MinBudget, SolverError> {
    min_overflow_budget_with(inst, &SolveOptions::default())
}

pub fn min_overflow_budget_with(
    inst: &AssignmentInstance,
    opts: &SolveOptions,
) -> Result<MinBudget, SolverError> {
    let r = run(inst, Problem::MinBudget, opts)?;
    Ok(MinBudget {
        budget: r.plan.total_cost,
        plan: r.plan,
        lp_was_integral: r.lp_was_integral,
        nodes_explored: r.nodes_explored,
    })
}

/// Optimal point of the minimum-cost LP relaxation with every bed kept
/// separate. `x[i][k]` is the value on the `k`-th edge of patient `i`.
pub fn min_cost_relaxation(inst: &AssignmentInstance) -> Result<Vec<Vec<f64>>, SolverError> {
    validate_instance(inst)?;
    let model = Model::build(inst, Problem::MinCostOnly, false);
    let sol = lp::solve_lexicographic(&model.lp, &model.objectives).map_err(|e| match e {
        lp::LpError::Infeasible => SolverError::Infeasible(Binding::Matching),
        _ => SolverError::Numerical,
    })?;
    let mut out: Vec<Vec<f64>> = inst.edges.iter().map(|e| alloc::vec![0.0; e.len()]).collect();
    for (v, &val) in sol.x.iter().enumerate() {
        let i = model.var_patient[v];
        let bed = model.classes.members[model.var_class[v]][0];
        let k = inst.edges[i].iter().position(|e| e.bed == bed).ok_or(SolverError::Numerical)?;
        out[i][k] = val;
    }
    Ok(out)
}
