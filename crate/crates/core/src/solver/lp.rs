//! Bounded-variable revised simplex with lexicographic objectives.
//!
//! Rows are `sum a_rj x_j = b_r` or `<= b_r`; every structural variable has a
//! finite lower bound and a possibly infinite upper bound. Objectives are
//! maximized in order. After each level reaches its optimum, every nonbasic
//! variable with a nonzero reduced cost is fixed at its current value, which
//! restricts later levels to the optimal face of the earlier ones.
//!
//! The basis inverse is kept dense and updated in product form, with a full
//! refactorization every [`REFACTOR_EVERY`] pivots.

use alloc::vec;
use alloc::vec::Vec;

pub(crate) const FEAS_TOL: f64 = 1e-9;
pub(crate) const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 100;
const DEGENERATE_STREAK: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowKind {
    Eq,
    Le,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Lp {
    pub rows: usize,
    pub kinds: Vec<RowKind>,
    pub rhs: Vec<f64>,
    /// Sparse structural columns as `(row, coefficient)`.
    pub cols: Vec<Vec<(usize, f64)>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Lp {
    pub fn new(kinds: Vec<RowKind>, rhs: Vec<f64>) -> Lp {
        Lp {
            rows: kinds.len(),
            kinds,
            rhs,
            cols: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
        }
    }

    pub fn add_col(&mut self, entries: Vec<(usize, f64)>, lower: f64, upper: f64) -> usize {
        self.cols.push(entries);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cols.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpError {
    Infeasible,
    Unbounded,
    IterationLimit,
    Singular,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LpSolution {
    /// Values of the structural variables.
    pub x: Vec<f64>,
    /// Optimal value of each objective level.
    pub values: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    Lower,
    Upper,
}

struct Simplex<'a> {
    m: usize,
    cols: Vec<&'a [(usize, f64)]>,
    art_cols: Vec<[(usize, f64); 1]>,
    n_struct: usize,
    n_slack: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    status: Vec<Status>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    rhs: &'a [f64],
    pivots: usize,
    since_refactor: usize,
    limit: usize,
}

impl<'a> Simplex<'a> {
    fn column(&self, j: usize) -> &[(usize, f64)] {
        let first_art = self.n_struct + self.n_slack;
        if j < first_art {
            self.cols[j]
        } else {
            &self.art_cols[j - first_art]
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.upper[j] - self.lower[j] <= 0.0
    }

    fn dual(&self, c: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for p in 0..m {
            let cb = c[self.basis[p]];
            if cb != 0.0 {
                let row = &self.binv[p * m..(p + 1) * m];
                for (yk, &b) in y.iter_mut().zip(row) {
                    *yk += cb * b;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, c: &[f64], y: &[f64], j: usize) -> f64 {
        let mut d = c[j];
        for &(r, a) in self.column(j) {
            d -= y[r] * a;
        }
        d
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for &(r, a) in self.column(j) {
            for (p, al) in alpha.iter_mut().enumerate() {
                *al += self.binv[p * m + r] * a;
            }
        }
        alpha
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination and recomputes
    /// the basic values from the nonbasic ones.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let w = 2 * m;
        let mut a = vec![0.0; m * w];
        for (p, &j) in self.basis.iter().enumerate() {
            for &(r, v) in self.column(j) {
                a[r * w + p] = v;
            }
        }
        for r in 0..m {
            a[r * w + m + r] = 1.0;
        }
        // columns of B indexed by basis position; invert B (rows = constraint rows)
        for col in 0..m {
            let mut best = col;
            let mut best_abs = a[col * w + col].abs();
            for r in col + 1..m {
                let v = a[r * w + col].abs();
                if v > best_abs {
                    best = r;
                    best_abs = v;
                }
            }
            if best_abs < 1e-12 {
                return Err(LpError::Singular);
            }
            if best != col {
                for k in 0..w {
                    a.swap(col * w + k, best * w + k);
                }
            }
            let piv = a[col * w + col];
            for k in 0..w {
                a[col * w + k] /= piv;
            }
            for r in 0..m {
                if r != col {
                    let f = a[r * w + col];
                    if f != 0.0 {
                        for k in 0..w {
                            a[r * w + k] -= f * a[col * w + k];
                        }
                    }
                }
            }
        }
        for p in 0..m {
            for r in 0..m {
                self.binv[p * m + r] = a[p * w + m + r];
            }
        }
        let mut resid = self.rhs.to_vec();
        for j in 0..self.x.len() {
            if self.status[j] != Status::Basic && self.x[j] != 0.0 {
                for &(r, v) in self.column(j) {
                    resid[r] -= v * self.x[j];
                }
            }
        }
        for p in 0..m {
            let row = &self.binv[p * m..(p + 1) * m];
            self.x[self.basis[p]] = row.iter().zip(&resid).map(|(b, r)| b * r).sum();
        }
        self.since_refactor = 0;
        Ok(())
    }

    /// Maximizes `c` from the current basic feasible solution. Returns the
    /// final reduced costs.
    fn optimize(&mut self, c: &[f64]) -> Result<Vec<f64>, LpError> {
        let m = self.m;
        let n = self.x.len();
        let mut streak = 0usize;
        loop {
            if self.pivots >= self.limit {
                return Err(LpError::IterationLimit);
            }
            let y = self.dual(c);
            let bland = streak >= DEGENERATE_STREAK;
            let mut entering = None;
            let mut best = 0.0;
            for j in 0..n {
                if self.status[j] == Status::Basic || self.is_fixed(j) {
                    continue;
                }
                let d = self.reduced_cost(c, &y, j);
                let gain = match self.status[j] {
                    Status::Lower if d > OPT_TOL => d,
                    Status::Upper if d < -OPT_TOL => -d,
                    _ => continue,
                };
                if bland {
                    entering = Some(j);
                    break;
                }
                if gain > best {
                    best = gain;
                    entering = Some(j);
                }
            }
            let Some(q) = entering else {
                let mut d = vec![0.0; n];
                for (j, dj) in d.iter_mut().enumerate() {
                    if self.status[j] != Status::Basic {
                        *dj = self.reduced_cost(c, &y, j);
                    }
                }
                return Ok(d);
            };
            let dir = if self.status[q] == Status::Lower { 1.0 } else { -1.0 };
            let alpha = self.ftran(q);

            let mut theta = self.upper[q] - self.lower[q];
            let mut leave: Option<(usize, f64)> = None;
            for (p, &al) in alpha.iter().enumerate() {
                if al.abs() <= PIVOT_TOL {
                    continue;
                }
                let b = self.basis[p];
                let delta = -dir * al;
                let limit = if delta < 0.0 {
                    (self.x[b] - self.lower[b]) / -delta
                } else if self.upper[b].is_finite() {
                    (self.upper[b] - self.x[b]) / delta
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let better = match leave {
                    None => limit < theta,
                    Some((lp, _)) => {
                        if limit < theta - 1e-12 {
                            true
                        } else if limit <= theta + 1e-12 {
                            if bland {
                                b < self.basis[lp]
                            } else {
                                al.abs() > alpha[lp].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    theta = if leave.is_none() || limit < theta { limit } else { theta };
                    leave = Some((p, delta));
                }
            }
            if theta.is_infinite() {
                return Err(LpError::Unbounded);
            }

            self.x[q] += dir * theta;
            for (p, &al) in alpha.iter().enumerate() {
                if al != 0.0 {
                    let b = self.basis[p];
                    self.x[b] -= dir * al * theta;
                }
            }
            match leave {
                None => {
                    self.status[q] = if dir > 0.0 { Status::Upper } else { Status::Lower };
                    self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                }
                Some((p, delta)) => {
                    let b = self.basis[p];
                    if delta < 0.0 {
                        self.status[b] = Status::Lower;
                        self.x[b] = self.lower[b];
                    } else {
                        self.status[b] = Status::Upper;
                        self.x[b] = self.upper[b];
                    }
                    self.status[q] = Status::Basic;
                    self.basis[p] = q;
                    let piv = alpha[p];
                    let prow: Vec<f64> =
                        self.binv[p * m..(p + 1) * m].iter().map(|v| v / piv).collect();
                    for (i, &ai) in alpha.iter().enumerate() {
                        if i != p && ai != 0.0 {
                            let row = &mut self.binv[i * m..(i + 1) * m];
                            for (v, pv) in row.iter_mut().zip(&prow) {
                                *v -= ai * pv;
                            }
                        }
                    }
                    self.binv[p * m..(p + 1) * m].copy_from_slice(&prow);
                    self.since_refactor += 1;
                }
            }
            self.pivots += 1;
            if theta <= 1e-12 {
                streak += 1;
            } else {
                streak = 0;
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
        }
    }
}

/// Solves `lp` lexicographically over `objectives` (each over the structural
/// variables, maximized in order).
pub(crate) fn solve_lexicographic(lp: &Lp, objectives: &[Vec<f64>]) -> Result<LpSolution, LpError> {
    let m = lp.rows;
    let n_struct = lp.cols.len();
    let slack_rows: Vec<usize> = (0..m).filter(|&r| lp.kinds[r] == RowKind::Le).collect();
    let slack_cols: Vec<[(usize, f64); 1]> = slack_rows.iter().map(|&r| [(r, 1.0)]).collect();
    let n_slack = slack_rows.len();

    let mut cols: Vec<&[(usize, f64)]> = lp.cols.iter().map(Vec::as_slice).collect();
    for s in &slack_cols {
        cols.push(s.as_slice());
    }
    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    lower.extend(core::iter::repeat(0.0).take(n_slack));
    upper.extend(core::iter::repeat(f64::INFINITY).take(n_slack));
    let mut x: Vec<f64> = lower.clone();
    let mut status = vec![Status::Lower; n_struct + n_slack];

    let mut resid = lp.rhs.clone();
    for (j, col) in lp.cols.iter().enumerate() {
        if x[j] != 0.0 {
            for &(r, a) in col {
                resid[r] -= a * x[j];
            }
        }
    }

    let mut basis = vec![usize::MAX; m];
    let mut binv = vec![0.0; m * m];
    for (k, &r) in slack_rows.iter().enumerate() {
        if resid[r] >= 0.0 {
            let j = n_struct + k;
            basis[r] = j;
            status[j] = Status::Basic;
            x[j] = resid[r];
            binv[r * m + r] = 1.0;
        }
    }
    let mut art_cols = Vec::new();
    for r in 0..m {
        if basis[r] == usize::MAX {
            let sign = if resid[r] >= 0.0 { 1.0 } else { -1.0 };
            let j = n_struct + n_slack + art_cols.len();
            art_cols.push([(r, sign)]);
            basis[r] = j;
            lower.push(0.0);
            upper.push(f64::INFINITY);
            x.push(resid[r].abs());
            status.push(Status::Basic);
            binv[r * m + r] = sign;
        }
    }
    let n_art = art_cols.len();
    let n = n_struct + n_slack + n_art;

    let mut s = Simplex {
        m,
        cols,
        art_cols,
        n_struct,
        n_slack,
        lower,
        upper,
        x,
        status,
        basis,
        binv,
        rhs: &lp.rhs,
        pivots: 0,
        since_refactor: 0,
        limit: 20_000 + 50 * (n + m),
    };

    if n_art > 0 {
        let mut c = vec![0.0; n];
        for v in &mut c[n_struct + n_slack..] {
            *v = -1.0;
        }
        s.optimize(&c)?;
        let scale = lp.rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        let infeas: f64 = s.x[n_struct + n_slack..].iter().sum();
        if infeas > FEAS_TOL * scale {
            return Err(LpError::Infeasible);
        }
        for j in n_struct + n_slack..n {
            s.upper[j] = 0.0;
            if s.status[j] != Status::Basic {
                s.x[j] = 0.0;
                s.status[j] = Status::Lower;
            }
        }
    }

    let mut values = Vec::with_capacity(objectives.len());
    for (level, obj) in objectives.iter().enumerate() {
        let mut c = vec![0.0; n];
        c[..n_struct].copy_from_slice(obj);
        let d = s.optimize(&c)?;
        values.push(obj.iter().zip(&s.x).map(|(a, b)| a * b).sum());
        if level + 1 < objectives.len() {
            for j in 0..n {
                if s.status[j] != Status::Basic && d[j].abs() > OPT_TOL {
                    s.lower[j] = s.x[j];
                    s.upper[j] = s.x[j];
                }
            }
        }
    }
    s.x.truncate(n_struct);
    Ok(LpSolution {
        x: s.x,
        values,
        pivots: s.pivots,
    })
}
