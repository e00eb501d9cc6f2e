//! Best-bound branch and bound over the class-assignment LP.

use alloc::vec::Vec;
use core::cmp::Ordering;

use super::lp::{solve_lexicographic, LpError, LpSolution};
use super::model::Model;

pub(crate) const INT_TOL: f64 = 1e-7;
const CMP_TOL: f64 = 1e-9;

/// Lexicographic comparison with a relative tolerance per level.
pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let tol = CMP_TOL * 1.0f64.max(x.abs()).max(y.abs());
        if *x > y + tol {
            return Ordering::Greater;
        }
        if *x < y - tol {
            return Ordering::Less;
        }
    }
    Ordering::Equal
}

pub(crate) fn is_integral(x: &[f64]) -> bool {
    x.iter().all(|v| (v - libm::round(*v)).abs() <= INT_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BnbError {
    /// The root relaxation is infeasible.
    RootInfeasible,
    /// The relaxation is feasible but no integral point exists.
    NoIntegral,
    NodeLimit,
    Numerical,
}

#[derive(Debug, Clone)]
pub(crate) struct BnbResult {
    pub x: Vec<f64>,
    pub root_integral: bool,
    pub nodes: usize,
    pub pivots: usize,
}

struct Node {
    seq: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    sol: LpSolution,
}

fn key(model: &Model, x: &[f64]) -> Vec<f64> {
    model
        .objectives
        .iter()
        .map(|c| c.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn round_all(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| libm::round(*v)).collect()
}

/// Most fractional variable; ties go to the smallest index, which is the
/// smallest `(patient, class)` pair by construction.
fn branch_var(x: &[f64]) -> Option<usize> {
    let mut best = None;
    let mut best_dist = 0.0;
    for (j, &v) in x.iter().enumerate() {
        let frac = v - libm::floor(v);
        if frac <= INT_TOL || frac >= 1.0 - INT_TOL {
            continue;
        }
        let dist = 0.5 - (frac - 0.5).abs();
        if dist > best_dist + 1e-12 {
            best_dist = dist;
            best = Some(j);
        }
    }
    best
}

pub(crate) fn solve(model: &Model, node_limit: usize) -> Result<BnbResult, BnbError> {
    let map = |e: LpError| match e {
        LpError::Infeasible => None,
        _ => Some(BnbError::Numerical),
    };
    let mut pivots = 0;
    let mut nodes = 1;
    let root = match solve_lexicographic(&model.lp, &model.objectives) {
        Ok(s) => s,
        Err(e) => return Err(map(e).unwrap_or(BnbError::RootInfeasible)),
    };
    pivots += root.pivots;
    if is_integral(&root.x) {
        return Ok(BnbResult {
            x: round_all(&root.x),
            root_integral: true,
            nodes,
            pivots,
        });
    }

    let mut incumbent: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut open: Vec<Node> = Vec::new();
    let mut seq = 0;
    open.push(Node {
        seq,
        lower: model.lp.lower.clone(),
        upper: model.lp.upper.clone(),
        sol: root,
    });
    let mut lp = model.lp.clone();

    while !open.is_empty() {
        let mut best = 0;
        for k in 1..open.len() {
            let ord = lex_cmp(&open[k].sol.values, &open[best].sol.values);
            if ord == Ordering::Greater || (ord == Ordering::Equal && open[k].seq < open[best].seq) {
                best = k;
            }
        }
        let node = open.swap_remove(best);
        if let Some((_, ref inc)) = incumbent {
            if lex_cmp(&node.sol.values, inc) != Ordering::Greater {
                continue;
            }
        }
        let Some(j) = branch_var(&node.sol.x) else {
            continue;
        };
        for up in [false, true] {
            if nodes >= node_limit {
                return Err(BnbError::NodeLimit);
            }
            lp.lower.clone_from(&node.lower);
            lp.upper.clone_from(&node.upper);
            if up {
                lp.lower[j] = 1.0;
            } else {
                lp.upper[j] = 0.0;
            }
            nodes += 1;
            let sol = match solve_lexicographic(&lp, &model.objectives) {
                Ok(s) => s,
                Err(e) => match map(e) {
                    None => continue,
                    Some(err) => return Err(err),
                },
            };
            pivots += sol.pivots;
            if is_integral(&sol.x) {
                let x = round_all(&sol.x);
                let k = key(model, &x);
                let better = match &incumbent {
                    None => true,
                    Some((_, inc)) => lex_cmp(&k, inc) == Ordering::Greater,
                };
                if better {
                    incumbent = Some((x, k));
                }
                continue;
            }
            if let Some((_, ref inc)) = incumbent {
                if lex_cmp(&sol.values, inc) != Ordering::Greater {
                    continue;
                }
            }
            seq += 1;
            open.push(Node {
                seq,
                lower: lp.lower.clone(),
                upper: lp.upper.clone(),
                sol,
            });
        }
    }
    match incumbent {
        Some((x, _)) => Ok(BnbResult {
            x,
            root_integral: false,
            nodes,
            pivots,
        }),
        None => Err(BnbError::NoIntegral),
    }
}
