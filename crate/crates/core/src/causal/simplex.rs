//! Phase-one revised simplex for `A w = b, w ≥ 0` with 0/1 columns.
//!
//! Every column has the same number of unit entries, listed as row indices.
//! The solver minimizes the sum of one artificial variable per row, keeping a
//! dense basis inverse that is refactorized from scratch at a fixed interval.
//! Pricing is Dantzig's rule with a Harris ratio test; after a run of
//! non-improving pivots it switches to Bland's rule until the objective
//! decreases again, which rules out cycling on the highly degenerate
//! vertex systems this is used for.

use crate::error::{Error, Result};

const DUAL_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-9;
const PRIMAL_TOL: f64 = 1e-12;
const REFACTOR_EVERY: usize = 50;
const STALL_LIMIT: usize = 40;
const MAX_ITERATIONS: usize = 200_000;

pub(crate) struct UnitColumns {
    pub stride: usize,
    /// Row indices, `stride` per column.
    pub rows: Vec<u32>,
}

impl UnitColumns {
    fn len(&self) -> usize {
        self.rows.len() / self.stride
    }

    fn column(&self, j: usize) -> &[u32] {
        &self.rows[j * self.stride..(j + 1) * self.stride]
    }
}

pub(crate) struct Phase1Solution {
    pub objective: f64,
    /// Basic structural variables and their values.
    pub weights: Vec<(usize, f64)>,
    /// Simplex multipliers of the final basis, one per row.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

struct Tableau<'a> {
    m: usize,
    cols: &'a UnitColumns,
    rhs: &'a [f64],
    /// `basis[i] < n` is structural, otherwise artificial `basis[i] - n`.
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
}

impl<'a> Tableau<'a> {
    fn n(&self) -> usize {
        self.cols.len()
    }

    fn is_artificial(&self, var: usize) -> bool {
        var >= self.n()
    }

    fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(v, _)| self.is_artificial(**v))
            .map(|(_, x)| x)
            .sum()
    }

    fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &var) in self.basis.iter().enumerate() {
            if self.is_artificial(var) {
                for (yk, b) in y.iter_mut().zip(&self.binv[i * m..(i + 1) * m]) {
                    *yk += b;
                }
            }
        }
        y
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        // Dense basis matrix, then Gauss-Jordan with partial pivoting.
        let mut a = vec![0.0f64; m * m];
        for (k, &var) in self.basis.iter().enumerate() {
            if self.is_artificial(var) {
                a[(var - self.n()) * m + k] = 1.0;
            } else {
                for &r in self.cols.column(var) {
                    a[r as usize * m + k] = 1.0;
                }
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let pivot_row = (col..m)
                .max_by(|&p, &q| a[p * m + col].abs().total_cmp(&a[q * m + col].abs()))
                .unwrap();
            let pivot = a[pivot_row * m + col];
            if pivot.abs() < 1e-12 {
                return Err(Error::Numerical("simplex basis became singular".into()));
            }
            if pivot_row != col {
                for k in 0..m {
                    a.swap(pivot_row * m + k, col * m + k);
                    inv.swap(pivot_row * m + k, col * m + k);
                }
            }
            let scale = 1.0 / pivot;
            for k in 0..m {
                a[col * m + k] *= scale;
                inv[col * m + k] *= scale;
            }
            for row in 0..m {
                if row == col {
                    continue;
                }
                let factor = a[row * m + col];
                if factor == 0.0 {
                    continue;
                }
                for k in 0..m {
                    a[row * m + k] -= factor * a[col * m + k];
                    inv[row * m + k] -= factor * inv[col * m + k];
                }
            }
        }
        self.binv = inv;
        for i in 0..m {
            let x: f64 = (0..m).map(|k| self.binv[i * m + k] * self.rhs[k]).sum();
            self.xb[i] = if x.abs() < PRIMAL_TOL { 0.0 } else { x };
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, entering: usize, alpha: &[f64]) {
        let m = self.m;
        let theta = self.xb[r] / alpha[r];
        for (i, (x, a)) in self.xb.iter_mut().zip(alpha).enumerate() {
            if i != r {
                *x -= theta * a;
                if *x < 0.0 && *x > -PRIMAL_TOL {
                    *x = 0.0;
                }
            }
        }
        self.xb[r] = theta.max(0.0);

        let inv_pivot = 1.0 / alpha[r];
        for k in 0..m {
            self.binv[r * m + k] *= inv_pivot;
        }
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (pivot_row, after) = rest.split_at_mut(m);
        for (i, row) in before.chunks_mut(m).chain(after.chunks_mut(m)).enumerate() {
            let i = if i < r { i } else { i + 1 };
            let a = alpha[i];
            if a != 0.0 {
                for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *x -= a * p;
                }
            }
        }

        let leaving = self.basis[r];
        if !self.is_artificial(leaving) {
            self.in_basis[leaving] = false;
        }
        self.basis[r] = entering;
        self.in_basis[entering] = true;
    }
}

pub(crate) fn phase_one(cols: &UnitColumns, rhs: &[f64]) -> Result<Phase1Solution> {
    let m = rhs.len();
    let n = cols.len();
    if rhs.iter().any(|&b| b < 0.0 || !b.is_finite()) {
        return Err(Error::Numerical(
            "right-hand side must be finite and nonnegative".into(),
        ));
    }
    if cols.rows.iter().any(|&r| r as usize >= m) {
        return Err(Error::Numerical("column refers to a missing row".into()));
    }
    let mut binv = vec![0.0; m * m];
    for i in 0..m {
        binv[i * m + i] = 1.0;
    }
    let mut t = Tableau {
        m,
        cols,
        rhs,
        basis: (n..n + m).collect(),
        in_basis: vec![false; n],
        binv,
        xb: rhs.to_vec(),
    };

    let mut iterations = 0;
    let mut since_refactor = 0;
    let mut best_objective = t.objective();
    let mut stall = 0;
    let mut alpha = vec![0.0; m];

    loop {
        if iterations >= MAX_ITERATIONS {
            return Err(Error::Numerical(format!(
                "simplex did not converge within {MAX_ITERATIONS} iterations"
            )));
        }
        let bland = stall >= STALL_LIMIT;
        let y = t.duals();

        let mut entering = None;
        let mut most_negative = -DUAL_TOL;
        for j in 0..n {
            if t.in_basis[j] {
                continue;
            }
            let d: f64 = -cols.column(j).iter().map(|&r| y[r as usize]).sum::<f64>();
            if d < most_negative {
                entering = Some(j);
                if bland {
                    break;
                }
                most_negative = d;
            }
        }
        let Some(j) = entering else {
            break;
        };

        for (i, a) in alpha.iter_mut().enumerate() {
            *a = cols
                .column(j)
                .iter()
                .map(|&r| t.binv[i * m + r as usize])
                .sum();
        }

        let leave = if bland {
            let mut best: Option<(f64, usize)> = None;
            for (i, &a) in alpha.iter().enumerate() {
                if a > PIVOT_TOL {
                    let ratio = t.xb[i] / a;
                    let better = match best {
                        None => true,
                        Some((b, r)) => {
                            ratio < b - 1e-15 || (ratio <= b + 1e-15 && t.basis[i] < t.basis[r])
                        }
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            best.map(|(_, i)| i)
        } else {
            let bound = (0..m)
                .filter(|&i| alpha[i] > PIVOT_TOL)
                .map(|i| (t.xb[i] + PRIMAL_TOL) / alpha[i])
                .fold(f64::INFINITY, f64::min);
            (0..m)
                .filter(|&i| alpha[i] > PIVOT_TOL && t.xb[i] / alpha[i] <= bound)
                .max_by(|&p, &q| alpha[p].total_cmp(&alpha[q]))
        };
        let Some(r) = leave else {
            return Err(Error::Numerical(
                "phase-one problem reported unbounded".into(),
            ));
        };

        t.pivot(r, j, &alpha);
        iterations += 1;
        since_refactor += 1;
        if since_refactor >= REFACTOR_EVERY {
            t.refactor()?;
            since_refactor = 0;
        }

        let objective = t.objective();
        if objective < best_objective - 1e-13 {
            best_objective = objective;
            stall = 0;
        } else {
            stall += 1;
        }
    }

    t.refactor()?;
    let duals = t.duals();
    let objective = t.objective();
    let weights = t
        .basis
        .iter()
        .zip(&t.xb)
        .filter(|(v, _)| !t.is_artificial(**v))
        .map(|(&v, &x)| (v, x))
        .collect();
    Ok(Phase1Solution {
        objective,
        weights,
        duals,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn columns(stride: usize, cols: &[&[u32]]) -> UnitColumns {
        UnitColumns {
            stride,
            rows: cols.iter().flat_map(|c| c.iter().copied()).collect(),
        }
    }

    #[test]
    fn feasible_mixture() {
        // Rows: two "settings" with two outcomes each.
        let cols = columns(2, &[&[0, 2], &[1, 3], &[0, 3]]);
        let sol = phase_one(&cols, &[0.5, 0.5, 0.25, 0.75]).unwrap();
        assert!(sol.objective < 1e-12);
        let mut recon = [0.0; 4];
        for (j, w) in &sol.weights {
            for &r in cols.column(*j) {
                recon[r as usize] += w;
            }
        }
        for (a, b) in recon.iter().zip([0.5, 0.5, 0.25, 0.75]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_with_farkas_duals() {
        // Only perfectly correlated columns available, target anti-correlated.
        let cols = columns(2, &[&[0, 2], &[1, 3]]);
        let rhs = [0.5, 0.5, 0.5, 0.5];
        let feasible = phase_one(&cols, &rhs).unwrap();
        assert!(feasible.objective < 1e-12);

        let rhs = [1.0, 0.0, 0.0, 1.0];
        let sol = phase_one(&cols, &rhs).unwrap();
        assert!(sol.objective > 0.5);
        for j in 0..cols.len() {
            let v: f64 = cols.column(j).iter().map(|&r| sol.duals[r as usize]).sum();
            assert!(v <= 1e-9);
        }
        let value: f64 = sol.duals.iter().zip(rhs).map(|(y, b)| y * b).sum();
        assert!((value - sol.objective).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_rhs() {
        let cols = columns(1, &[&[0]]);
        assert!(phase_one(&cols, &[-1.0]).is_err());
    }
}
