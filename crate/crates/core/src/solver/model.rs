//! Builds the LP over bed capacity classes.
//!
//! Beds whose edges are identical for every patient (same weight and cost,
//! or absent) are interchangeable and merge into one class with a capacity.
//! A variable `x_ic` then counts how many beds of class `c` go to patient
//! `i`, which is 0 or 1 because of the patient's assignment row.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::lp::{Lp, RowKind};
use crate::domain::{AssignmentInstance, LogWeight};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ClassEdge {
    pub class: usize,
    pub weight: LogWeight,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Classes {
    /// Bed indices of each class, ascending; classes ordered by first bed.
    pub members: Vec<Vec<usize>>,
    /// Per patient, edges to classes in ascending class order.
    pub edges: Vec<Vec<ClassEdge>>,
}

fn weight_key(w: LogWeight) -> u64 {
    match w {
        LogWeight::Finite(v) => (v + 0.0).to_bits(),
        LogWeight::Impossible => u64::MAX,
    }
}

impl Classes {
    pub fn build(inst: &AssignmentInstance, aggregate: bool) -> Classes {
        let nb = inst.beds.len();
        let mut signature: Vec<Vec<(usize, u64, u64)>> = vec![Vec::new(); nb];
        for (i, edges) in inst.edges.iter().enumerate() {
            for e in edges {
                signature[e.bed].push((i, weight_key(e.weight), (e.cost + 0.0).to_bits()));
            }
        }
        let mut class_of = vec![usize::MAX; nb];
        let mut members: Vec<Vec<usize>> = Vec::new();
        if aggregate {
            let mut seen: BTreeMap<&[(usize, u64, u64)], usize> = BTreeMap::new();
            for (b, sig) in signature.iter().enumerate() {
                if sig.is_empty() {
                    continue;
                }
                let c = *seen.entry(sig.as_slice()).or_insert_with(|| {
                    members.push(Vec::new());
                    members.len() - 1
                });
                members[c].push(b);
                class_of[b] = c;
            }
        } else {
            for (b, sig) in signature.iter().enumerate() {
                if !sig.is_empty() {
                    class_of[b] = members.len();
                    members.push(vec![b]);
                }
            }
        }
        let edges = inst
            .edges
            .iter()
            .map(|list| {
                let mut out: Vec<ClassEdge> = Vec::new();
                for e in list {
                    let c = class_of[e.bed];
                    if !out.iter().any(|x| x.class == c) {
                        out.push(ClassEdge {
                            class: c,
                            weight: e.weight,
                            cost: e.cost,
                        });
                    }
                }
                out.sort_by_key(|e| e.class);
                out
            })
            .collect();
        Classes { members, edges }
    }
}

/// Which optimization problem the LP encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Problem {
    /// Maximize the symbolic objective under the budget, then minimize cost.
    PModel,
    /// Minimize cost, then maximize the symbolic objective.
    MinBudget,
    /// Minimize cost only.
    MinCostOnly,
}

#[derive(Debug, Clone)]
pub(crate) struct Model {
    pub lp: Lp,
    pub objectives: Vec<Vec<f64>>,
    pub var_patient: Vec<usize>,
    pub var_class: Vec<usize>,
    pub classes: Classes,
}

impl Model {
    pub fn build(inst: &AssignmentInstance, problem: Problem, aggregate: bool) -> Model {
        let classes = Classes::build(inst, aggregate);
        let np = inst.patients.len();
        let nc = classes.members.len();
        let with_budget = problem == Problem::PModel && inst.budget.is_finite();
        let mut kinds = vec![RowKind::Eq; np];
        kinds.extend(core::iter::repeat(RowKind::Le).take(nc));
        let mut rhs = vec![1.0; np];
        rhs.extend(classes.members.iter().map(|m| m.len() as f64));
        if with_budget {
            kinds.push(RowKind::Le);
            rhs.push(inst.budget);
        }
        let budget_row = np + nc;
        let mut lp = Lp::new(kinds, rhs);
        let mut var_patient = Vec::new();
        let mut var_class = Vec::new();
        let mut imp = Vec::new();
        let mut fin = Vec::new();
        let mut cost = Vec::new();
        for (i, edges) in classes.edges.iter().enumerate() {
            for e in edges {
                let mut col = vec![(i, 1.0), (np + e.class, 1.0)];
                if with_budget && e.cost != 0.0 {
                    col.push((budget_row, e.cost));
                }
                lp.add_col(col, 0.0, 1.0);
                var_patient.push(i);
                var_class.push(e.class);
                imp.push(if e.weight.is_impossible() { -1.0 } else { 0.0 });
                fin.push(e.weight.finite_part());
                cost.push(-e.cost);
            }
        }
        let any_imp = imp.iter().any(|&v| v != 0.0);
        let objectives = match problem {
            Problem::PModel => {
                let mut o = Vec::new();
                if any_imp {
                    o.push(imp);
                }
                o.push(fin);
                o.push(cost);
                o
            }
            Problem::MinBudget => {
                let mut o = vec![cost];
                if any_imp {
                    o.push(imp);
                }
                o.push(fin);
                o
            }
            Problem::MinCostOnly => vec![cost],
        };
        Model {
            lp,
            objectives,
            var_patient,
            var_class,
            classes,
        }
    }

    /// Converts an integral solution into per-patient bed indices, handing
    /// out beds of each class in ascending order to patients in ascending
    /// order.
    pub fn bed_assignment(&self, x: &[f64]) -> Vec<usize> {
        let np = self.classes.edges.len();
        let mut class_of = vec![usize::MAX; np];
        for (v, &val) in x.iter().enumerate() {
            if val > 0.5 {
                class_of[self.var_patient[v]] = self.var_class[v];
            }
        }
        let mut next = vec![0usize; self.classes.members.len()];
        class_of
            .iter()
            .map(|&c| {
                let b = self.classes.members[c][next[c]];
                next[c] += 1;
                b
            })
            .collect()
    }
}
