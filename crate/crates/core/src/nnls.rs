//! Lawson–Hanson active-set NNLS specialised to cone projection:
//! `min_{λ ≥ 0} ‖Gλ − x‖` where the columns of `G` are unit generators.

use crate::error::{ConeError, Result};
use crate::linalg::{dot, norm, LsqStatus, LsqWorkspace};

/// Per-worker NNLS state. Never shared between threads.
#[derive(Debug, Clone, Default)]
pub struct Nnls {
    coef: Vec<f64>,
    z: Vec<f64>,
    passive: Vec<usize>,
    in_passive: Vec<bool>,
    blocked: Vec<bool>,
    resid: Vec<f64>,
    lsq: LsqWorkspace,
}

impl Nnls {
    /// Coefficients of the last successful solve (one per generator).
    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    /// Solves the problem for generators `gens` (row-major `n × d`) and writes
    /// `Gλ` into `point`. Returns the number of outer iterations.
    pub fn solve(&mut self, gens: &[f64], d: usize, x: &[f64], point: &mut [f64]) -> Result<usize> {
        let n = gens.len() / d;
        self.coef.clear();
        self.coef.resize(n, 0.0);
        self.z.clear();
        self.z.resize(n.min(d).max(1) + 1, 0.0);
        self.passive.clear();
        self.in_passive.clear();
        self.in_passive.resize(n, false);
        self.blocked.clear();
        self.blocked.resize(n, false);
        self.resid.clear();
        self.resid.extend_from_slice(x);

        let cap = 10 * n.max(1);
        let tol_w = 1e-12 * norm(x).max(f64::MIN_POSITIVE);
        let mut iterations = 0;
        loop {
            // Dual vector w = Gᵀ(x − Gλ); pick the most violated inactive index.
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if self.in_passive[j] || self.blocked[j] {
                    continue;
                }
                let w = dot(&gens[j * d..(j + 1) * d], &self.resid);
                if w > tol_w && best.is_none_or(|(_, bw)| w > bw) {
                    best = Some((j, w));
                }
            }
            let Some((enter, _)) = best else { break };
            iterations += 1;
            if iterations > cap {
                return Err(ConeError::NnlsNonConvergence { iterations: cap });
            }
            self.passive.push(enter);
            self.in_passive[enter] = true;

            let mut first = true;
            loop {
                let status = self.lsq.solve(gens, d, &self.passive, x, &mut self.z);
                let p = self.passive.len();
                let pos_new = self.passive.iter().position(|&j| j == enter);
                let rejected = status == LsqStatus::RankDeficient
                    || (first && pos_new.is_some_and(|i| self.z[i] <= 0.0));
                if rejected {
                    // Entering column is dependent or cannot carry weight: undo and block it.
                    if let Some(i) = pos_new {
                        self.passive.remove(i);
                        self.in_passive[enter] = false;
                        self.coef[enter] = 0.0;
                    }
                    self.blocked[enter] = true;
                    if status == LsqStatus::RankDeficient && pos_new.is_none() {
                        return Err(ConeError::NnlsNonConvergence { iterations });
                    }
                    break;
                }
                first = false;
                if self.z[..p].iter().all(|&v| v > 0.0) {
                    for (i, &j) in self.passive.iter().enumerate() {
                        self.coef[j] = self.z[i];
                    }
                    self.blocked.iter_mut().for_each(|b| *b = false);
                    break;
                }
                // Step back towards the feasible region.
                let mut alpha = f64::INFINITY;
                for (i, &j) in self.passive.iter().enumerate() {
                    if self.z[i] <= 0.0 {
                        let a = self.coef[j] / (self.coef[j] - self.z[i]);
                        alpha = alpha.min(a);
                    }
                }
                for (i, &j) in self.passive.iter().enumerate() {
                    self.coef[j] += alpha * (self.z[i] - self.coef[j]);
                }
                let coef = &mut self.coef;
                let in_passive = &mut self.in_passive;
                self.passive.retain(|&j| {
                    if coef[j] <= 1e-15 {
                        coef[j] = 0.0;
                        in_passive[j] = false;
                        false
                    } else {
                        true
                    }
                });
                if self.passive.is_empty() {
                    break;
                }
            }
            // Refresh the residual.
            point.iter_mut().for_each(|v| *v = 0.0);
            for &j in &self.passive {
                let c = self.coef[j];
                for (pt, g) in point.iter_mut().zip(&gens[j * d..(j + 1) * d]) {
                    *pt += c * g;
                }
            }
            for ((r, xi), pi) in self.resid.iter_mut().zip(x).zip(point.iter()) {
                *r = xi - pi;
            }
        }
        point.iter_mut().for_each(|v| *v = 0.0);
        for &j in &self.passive {
            let c = self.coef[j];
            for (pt, g) in point.iter_mut().zip(&gens[j * d..(j + 1) * d]) {
                *pt += c * g;
            }
        }
        Ok(iterations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_clamps_coordinates() {
        let gens = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let mut s = Nnls::default();
        let mut p = [0.0; 3];
        s.solve(&gens, 3, &[1.0, -2.0, 3.0], &mut p).unwrap();
        assert_eq!(p, [1.0, 0.0, 3.0]);
    }

    #[test]
    fn zero_when_in_polar() {
        let gens = [1.0, 0.0, 0.0, 1.0];
        let mut s = Nnls::default();
        let mut p = [9.0; 2];
        let it = s.solve(&gens, 2, &[-1.0, -0.5], &mut p).unwrap();
        assert_eq!(it, 0);
        assert_eq!(p, [0.0, 0.0]);
    }

    #[test]
    fn redundant_generators_in_a_plane() {
        // Five generators of the same 2D wedge in R^3.
        let mut gens = Vec::new();
        for t in [0.0_f64, 0.2, 0.5, 0.9, 1.2] {
            gens.extend_from_slice(&[t.cos(), t.sin(), 0.0]);
        }
        let mut s = Nnls::default();
        let mut p = [0.0; 3];
        s.solve(&gens, 3, &[0.3, 0.4, 2.0], &mut p).unwrap();
        assert!((p[0] - 0.3).abs() < 1e-12 && (p[1] - 0.4).abs() < 1e-12 && p[2].abs() < 1e-15);
    }
}
