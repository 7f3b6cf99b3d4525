//! Dense revised simplex with Bland's rule for `min cᵀx, Ax = b, x ≥ 0`,
//! started from a caller-supplied feasible basis.
//!
//! Columns are stored sparsely; the basis inverse is dense. Bland's rule
//! (lowest-index entering and leaving variables) makes the pivot sequence a
//! pure function of the input, so results are bitwise reproducible.

use crate::error::{ConeError, Result};

/// One sparse column of `A` with its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub cost: f64,
    pub entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Simplex multipliers `y = c_Bᵀ B⁻¹` (one per row).
    pub y: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Reduced-cost threshold for entering columns.
const PRICE_TOL: f64 = 1e-12;
/// Pivot threshold in the ratio test.
const PIVOT_TOL: f64 = 1e-12;

/// Solves the LP starting from `basis` (one column index per row), which
/// must be primal feasible: `B⁻¹ b ≥ 0`.
pub fn simplex(cols: &[Column], b: &[f64], basis: &[usize], max_iter: usize) -> Result<LpSolution> {
    let m = b.len();
    let n = cols.len();
    if basis.len() != m {
        return Err(ConeError::Lp(format!(
            "basis has {} columns for {m} rows",
            basis.len()
        )));
    }
    let mut basis = basis.to_vec();
    let mut in_basis = vec![usize::MAX; n];
    for (r, &j) in basis.iter().enumerate() {
        in_basis[j] = r;
    }
    // B⁻¹ from the starting basis.
    let mut binv = invert_basis(cols, &basis, m)?;
    let mut xb: Vec<f64> = (0..m)
        .map(|i| (0..m).map(|k| binv[i * m + k] * b[k]).sum())
        .collect();
    if xb.iter().any(|&v| v < -1e-12) {
        return Err(ConeError::Lp("starting basis is not feasible".into()));
    }
    let mut y = vec![0.0; m];
    let mut dcol = vec![0.0; m];
    let mut iterations = 0;
    loop {
        for (k, yk) in y.iter_mut().enumerate() {
            *yk = (0..m).map(|i| cols[basis[i]].cost * binv[i * m + k]).sum();
        }
        let entering = (0..n).find(|&j| {
            in_basis[j] == usize::MAX && {
                let c = &cols[j];
                c.cost - c.entries.iter().map(|&(i, a)| y[i] * a).sum::<f64>() < -PRICE_TOL
            }
        });
        let Some(j) = entering else { break };
        iterations += 1;
        if iterations > max_iter {
            return Err(ConeError::Lp(format!(
                "no convergence after {max_iter} pivots"
            )));
        }
        for (i, di) in dcol.iter_mut().enumerate() {
            *di = cols[j]
                .entries
                .iter()
                .map(|&(k, a)| binv[i * m + k] * a)
                .sum();
        }
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if dcol[i] > PIVOT_TOL {
                let t = xb[i] / dcol[i];
                let better = match leave {
                    None => true,
                    Some((r, best)) => t < best || (t == best && basis[i] < basis[r]),
                };
                if better {
                    leave = Some((i, t));
                }
            }
        }
        let Some((r, t)) = leave else {
            return Err(ConeError::Lp("unbounded".into()));
        };
        let piv = dcol[r];
        for k in 0..m {
            binv[r * m + k] /= piv;
        }
        xb[r] = t;
        for i in 0..m {
            if i != r && dcol[i] != 0.0 {
                let f = dcol[i];
                for k in 0..m {
                    binv[i * m + k] -= f * binv[r * m + k];
                }
                xb[i] -= f * t;
                if xb[i] < 0.0 && xb[i] > -1e-12 {
                    xb[i] = 0.0;
                }
            }
        }
        in_basis[basis[r]] = usize::MAX;
        basis[r] = j;
        in_basis[j] = r;
    }
    let mut x = vec![0.0; n];
    for (i, &j) in basis.iter().enumerate() {
        x[j] = xb[i];
    }
    let objective = cols.iter().zip(&x).map(|(c, v)| c.cost * v).sum();
    Ok(LpSolution {
        x,
        y,
        objective,
        iterations,
    })
}

fn invert_basis(cols: &[Column], basis: &[usize], m: usize) -> Result<Vec<f64>> {
    let mut bm = nalgebra::DMatrix::<f64>::zeros(m, m);
    for (r, &j) in basis.iter().enumerate() {
        for &(i, a) in &cols[j].entries {
            bm[(i, r)] = a;
        }
    }
    let inv = bm
        .try_inverse()
        .ok_or_else(|| ConeError::Lp("starting basis is singular".into()))?;
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for k in 0..m {
            out[i * m + k] = inv[(i, k)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(cost: f64, e: &[(usize, f64)]) -> Column {
        Column {
            cost,
            entries: e.to_vec(),
        }
    }

    #[test]
    fn small_transport() {
        // One source (mass 1) and two sinks (0.5 each); shipping costs 0.3 and 1.5,
        // slack columns cost 1 per unit.
        let cols = vec![
            col(0.3, &[(0, 1.0), (1, 1.0)]),
            col(1.5, &[(0, 1.0), (2, 1.0)]),
            col(1.0, &[(0, 1.0)]),
            col(1.0, &[(1, 1.0)]),
            col(1.0, &[(2, 1.0)]),
        ];
        let s = simplex(&cols, &[1.0, 0.5, 0.5], &[2, 3, 4], 100).unwrap();
        // Shipping both halves (0.15 + 0.75) beats dropping at either end.
        assert!((s.objective - 0.9).abs() < 1e-15);
        assert!((s.x[0] - 0.5).abs() < 1e-15 && (s.x[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_cycle_guard() {
        // A classic degenerate instance; Bland's rule must terminate.
        let cols = vec![
            col(-0.75, &[(0, 0.25), (1, 0.5), (2, 0.0)]),
            col(150.0, &[(0, -60.0), (1, -90.0), (2, 0.0)]),
            col(-0.02, &[(0, -0.04), (1, -0.02), (2, 1.0)]),
            col(6.0, &[(0, 9.0), (1, 3.0), (2, 0.0)]),
            col(0.0, &[(0, 1.0)]),
            col(0.0, &[(1, 1.0)]),
            col(0.0, &[(2, 1.0)]),
        ];
        let s = simplex(&cols, &[0.0, 0.0, 1.0], &[4, 5, 6], 1000).unwrap();
        assert!((s.objective + 0.05).abs() < 1e-12, "{}", s.objective);
    }
}
