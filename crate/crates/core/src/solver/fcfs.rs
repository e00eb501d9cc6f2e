//! First-come-first-served normalization of an optimal plan.
//!
//! Two waiting patients are of the same type when they have the same
//! eligible beds, the same delay target and the same costs. Among them, the
//! one who requested earliest can take over a bed that is available now from
//! a later one without lowering the objective: the earlier patient's deadline
//! is the more urgent, and the later patient can use the other's bed at least
//! as well.

use alloc::vec::Vec;

use super::SolverError;
use crate::domain::{AssignmentInstance, AssignmentPlan, BedId};

/// Whether patients `k` and `l` are interchangeable apart from request time.
pub fn same_type(inst: &AssignmentInstance, k: usize, l: usize) -> bool {
    let (pk, pl) = (&inst.patients[k], &inst.patients[l]);
    if pk.delay_target != pl.delay_target {
        return false;
    }
    let (ek, el) = (&inst.edges[k], &inst.edges[l]);
    ek.len() == el.len()
        && ek
            .iter()
            .zip(el)
            .all(|(a, b)| a.bed == b.bed && a.cost == b.cost)
}

fn bed_index(inst: &AssignmentInstance, bed: BedId) -> Result<usize, SolverError> {
    inst.beds
        .iter()
        .position(|b| b.id == bed)
        .ok_or(SolverError::UnknownBed(bed))
}

fn normalize_at(
    inst: &AssignmentInstance,
    bed_of: &mut [usize],
    bed: usize,
    fixed: &[bool],
) -> Option<usize> {
    let k = bed_of.iter().position(|&b| b == bed)?;
    let order = |i: usize| (inst.patients[i].request_time, inst.patients[i].id);
    let mut earliest = k;
    for l in 0..inst.patients.len() {
        if l != k && !fixed[l] && same_type(inst, k, l) && order(l) < order(earliest) {
            earliest = l;
        }
    }
    bed_of.swap(k, earliest);
    Some(earliest)
}

/// Hands `freed_bed` to the earliest-requesting patient of the type of the
/// patient it is matched to, swapping beds with that patient. A bed that is
/// unmatched leaves the plan unchanged.
pub fn fcfs_normalize(
    inst: &AssignmentInstance,
    plan: &AssignmentPlan,
    freed_bed: BedId,
) -> Result<AssignmentPlan, SolverError> {
    fcfs_normalize_many(inst, plan, &[freed_bed])
}

/// Applies [`fcfs_normalize`] to each bed in turn. Patients who received an
/// earlier bed in the list keep it.
pub fn fcfs_normalize_many(
    inst: &AssignmentInstance,
    plan: &AssignmentPlan,
    beds: &[BedId],
) -> Result<AssignmentPlan, SolverError> {
    let mut bed_of = plan.bed_of.clone();
    let mut fixed: Vec<bool> = alloc::vec![false; bed_of.len()];
    let mut changed = false;
    for &id in beds {
        let b = bed_index(inst, id)?;
        let before = bed_of.iter().position(|&x| x == b);
        if let Some(p) = normalize_at(inst, &mut bed_of, b, &fixed) {
            fixed[p] = true;
            changed |= before != Some(p);
        }
    }
    if !changed {
        return Ok(plan.clone());
    }
    AssignmentPlan::evaluate(inst, bed_of).map_err(|_| SolverError::Numerical)
}
