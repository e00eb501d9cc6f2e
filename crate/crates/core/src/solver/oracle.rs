//! Exhaustive enumeration of admissible plans, for testing.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{Binding, SolverError};
use crate::domain::{
    validate_instance, AssignmentInstance, AssignmentPlan, LogWeight, Objective, BUDGET_TOLERANCE,
};

pub const ORACLE_MAX_PATIENTS: usize = 8;
pub const ORACLE_MAX_PLANS: f64 = 1e7;

const TOL: f64 = 1e-9;

fn check_size(inst: &AssignmentInstance) -> Result<(), SolverError> {
    validate_instance(inst)?;
    let plans: f64 = inst.edges.iter().map(|e| e.len() as f64).product();
    if inst.patients.len() > ORACLE_MAX_PATIENTS || plans > ORACLE_MAX_PLANS {
        return Err(SolverError::TooLarge {
            patients: inst.patients.len(),
            plans,
        });
    }
    Ok(())
}

struct Search<'a> {
    inst: &'a AssignmentInstance,
    used: Vec<bool>,
    current: Vec<usize>,
    budget: f64,
    /// Returns true when the candidate should replace the incumbent.
    better: &'a dyn Fn(&Objective, f64, &Objective, f64) -> bool,
    best: Option<(Vec<usize>, Objective, f64)>,
    any_plan: bool,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize, obj: Objective, cost: f64) {
        if i == self.inst.patients.len() {
            self.any_plan = true;
            if cost > self.budget + BUDGET_TOLERANCE {
                return;
            }
            let replace = match &self.best {
                None => true,
                Some((_, bo, bc)) => (self.better)(&obj, cost, bo, *bc),
            };
            if replace {
                self.best = Some((self.current.clone(), obj, cost));
            }
            return;
        }
        let inst = self.inst;
        for e in &inst.edges[i] {
            if self.used[e.bed] {
                continue;
            }
            self.used[e.bed] = true;
            self.current.push(e.bed);
            let mut o = obj;
            match e.weight {
                LogWeight::Finite(w) => o.finite += w,
                LogWeight::Impossible => o.impossible += 1,
            }
            self.dfs(i + 1, o, cost + e.cost);
            self.current.pop();
            self.used[e.bed] = false;
        }
    }
}

fn cost_cmp(a: f64, b: f64) -> Ordering {
    if a < b - TOL * 1.0f64.max(b.abs()) {
        Ordering::Less
    } else if a > b + TOL * 1.0f64.max(b.abs()) {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

fn run(
    inst: &AssignmentInstance,
    budget: f64,
    better: &dyn Fn(&Objective, f64, &Objective, f64) -> bool,
) -> Result<AssignmentPlan, SolverError> {
    check_size(inst)?;
    let mut s = Search {
        inst,
        used: vec![false; inst.beds.len()],
        current: Vec::new(),
        budget,
        better,
        best: None,
        any_plan: false,
    };
    s.dfs(0, Objective::ZERO, 0.0);
    match s.best {
        Some((bed_of, _, _)) => {
            AssignmentPlan::evaluate(inst, bed_of).map_err(|_| SolverError::Numerical)
        }
        None if s.any_plan => Err(SolverError::Infeasible(Binding::Budget)),
        None => Err(SolverError::Infeasible(Binding::Matching)),
    }
}

/// Best admissible plan by exhaustive search: highest symbolic objective,
/// then lowest cost, then the lexicographically smallest bed vector.
pub fn brute_force_oracle(inst: &AssignmentInstance) -> Result<AssignmentPlan, SolverError> {
    run(inst, inst.budget, &|o, c, bo, bc| {
        match o.compare(bo, TOL) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => cost_cmp(c, bc) == Ordering::Less,
        }
    })
}

/// Minimum-cost plan ignoring the budget, ties broken by the symbolic
/// objective and then lexicographically.
pub fn brute_force_min_cost(inst: &AssignmentInstance) -> Result<AssignmentPlan, SolverError> {
    run(inst, f64::INFINITY, &|o, c, bo, bc| match cost_cmp(c, bc) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => o.compare(bo, TOL) == Ordering::Greater,
    })
}
