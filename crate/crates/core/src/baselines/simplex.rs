//! Dense two-phase simplex with Bland's rule.

use crate::error::{Error, Result};

const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub kind: ConstraintKind,
    pub rhs: f64,
}

/// `maximize objective·x` subject to the constraints and `x ≥ 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self { objective, constraints: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<f64>, kind: ConstraintKind, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, kind, rhs });
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, obj: &mut [f64]) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = obj[c];
        if f != 0.0 {
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Maximises the objective whose reduced-cost row is `obj` (last entry
    /// holds the negated value). Columns with `allowed[j] == false` never
    /// enter.
    fn optimize(&mut self, obj: &mut [f64], allowed: &[bool]) -> Result<()> {
        loop {
            let Some(c) = (0..self.cols).find(|&j| allowed[j] && obj[j] > TOL) else {
                return Ok(());
            };
            let mut best: Option<(f64, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c] > TOL {
                    let ratio = row[self.cols] / row[c];
                    best = match best {
                        None => Some((ratio, i)),
                        Some((br, bi)) => {
                            if ratio < br - TOL || (ratio <= br + TOL && self.basis[i] < self.basis[bi]) {
                                Some((ratio, i))
                            } else {
                                Some((br, bi))
                            }
                        }
                    };
                }
            }
            let Some((_, r)) = best else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, c, obj);
        }
    }
}

/// Solves `lp` to primal optimality.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    let n = lp.objective.len();
    if let Some(c) = lp.constraints.iter().find(|c| c.coeffs.len() != n) {
        return Err(Error::InvalidArgument(format!("constraint has {} coefficients, expected {n}", c.coeffs.len())));
    }
    // Normalise to nonnegative right-hand sides.
    let cons: Vec<Constraint> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let kind = match c.kind {
                    ConstraintKind::Le => ConstraintKind::Ge,
                    ConstraintKind::Ge => ConstraintKind::Le,
                    ConstraintKind::Eq => ConstraintKind::Eq,
                };
                Constraint { coeffs: c.coeffs.iter().map(|v| -v).collect(), kind, rhs: -c.rhs }
            } else {
                c.clone()
            }
        })
        .collect();
    let m = cons.len();
    let n_slack = cons.iter().filter(|c| c.kind != ConstraintKind::Eq).count();
    let n_art = cons.iter().filter(|c| c.kind != ConstraintKind::Le).count();
    let cols = n + n_slack + n_art;
    let mut rows = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0; m];
    let (mut s, mut a) = (n, n + n_slack);
    for (i, c) in cons.iter().enumerate() {
        rows[i][..n].copy_from_slice(&c.coeffs);
        rows[i][cols] = c.rhs;
        match c.kind {
            ConstraintKind::Le => {
                rows[i][s] = 1.0;
                basis[i] = s;
                s += 1;
            }
            ConstraintKind::Ge => {
                rows[i][s] = -1.0;
                s += 1;
                rows[i][a] = 1.0;
                basis[i] = a;
                a += 1;
            }
            ConstraintKind::Eq => {
                rows[i][a] = 1.0;
                basis[i] = a;
                a += 1;
            }
        }
    }
    let mut t = Tableau { rows, basis, cols };
    let is_art = |j: usize| j >= n + n_slack && j < cols;

    // Phase 1: maximise −Σ artificials.
    let mut obj = vec![0.0; cols + 1];
    for j in n + n_slack..cols {
        obj[j] = -1.0;
    }
    for i in 0..m {
        if is_art(t.basis[i]) {
            for (o, v) in obj.iter_mut().zip(&t.rows[i]) {
                *o += v;
            }
        }
    }
    t.optimize(&mut obj, &vec![true; cols])?;
    let infeasibility: f64 = (0..m).filter(|&i| is_art(t.basis[i])).map(|i| t.rows[i][cols]).sum();
    if infeasibility > 1e-7 {
        return Ok(LpOutcome::Infeasible);
    }
    // Drive remaining (zero-valued) artificials out of the basis; rows where
    // that is impossible are redundant.
    let mut i = 0;
    while i < t.rows.len() {
        if is_art(t.basis[i]) {
            if let Some(c) = (0..n + n_slack).find(|&j| t.rows[i][j].abs() > TOL) {
                t.pivot(i, c, &mut obj);
                i += 1;
            } else {
                t.rows.remove(i);
                t.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }

    // Phase 2 on the original objective.
    let mut obj = vec![0.0; cols + 1];
    obj[..n].copy_from_slice(&lp.objective);
    for i in 0..t.rows.len() {
        let b = t.basis[i];
        let f = obj[b];
        if f != 0.0 {
            for (o, v) in obj.iter_mut().zip(&t.rows[i]) {
                *o -= f * v;
            }
        }
    }
    let allowed: Vec<bool> = (0..cols).map(|j| !is_art(j)).collect();
    t.optimize(&mut obj, &allowed)?;
    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rows[i][cols].max(0.0);
        }
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpOutcome::Optimal { x, value })
}
