//! Steiner coefficients: `ω_m`, the parallel-set coefficients `g_k(λ)`, the
//! Gaussian coefficients `I_k(f)`, the inversion of the `ν_λ` system, and
//! the end-to-end identity checks built on them.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::biconic::BiconicSet;
use crate::cone::{check_lambda, Cone};
use crate::error::{ConeError, Result};
use crate::functions::TaggedFn;
use crate::measures::{self, OmegaEstimate, OmegaMethod, ParallelQuery, PhiQuery};
use crate::quadrature::{integrate, integrate_piecewise};
use crate::report::CheckReport;
use crate::rng::{Sampling, Substream};

/// Absolute tolerance of the one-dimensional integrals.
const QUAD_TOL: f64 = 1e-13;
const MAX_PANELS: usize = 2000;

/// Deterministic quadrature allowance added to Monte Carlo identity checks.
pub const QUADRATURE_FLOOR: f64 = 1e-9;

/// Largest condition number accepted for the inversion system.
pub const MAX_CONDITION: f64 = 1e8;

/// `ln ω_m`, with `ω_m = 2π^{m/2}/Γ(m/2)` the surface area of `S^{m−1}`.
pub fn ln_omega(m: usize) -> f64 {
    LN_2 + 0.5 * m as f64 * PI.ln() - ln_gamma(0.5 * m as f64)
}

/// `ω_m = 2π^{m/2}/Γ(m/2)`.
pub fn omega_const(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(ConeError::OutOfRange("omega_const needs m >= 1".into()));
    }
    Ok(ln_omega(m).exp())
}

fn check_dk(d: usize, k: usize, allow_zero: bool) -> Result<()> {
    if d < 1 || k > d || (!allow_zero && k == 0) {
        return Err(ConeError::OutOfRange(format!(
            "degree k={k} outside {}..={d}",
            if allow_zero { 0 } else { 1 }
        )));
    }
    Ok(())
}

/// `g_k(λ) = (ω_k ω_{d−k}/ω_d) ∫_0^λ cos^{k−1}φ sin^{d−k−1}φ dφ` for
/// `1 ≤ k < d`, and `g_d ≡ 1`. Accepts `λ ∈ [0, π/2]`.
pub fn g_coeff(d: usize, k: usize, lambda: f64) -> Result<f64> {
    check_dk(d, k, false)?;
    if !(lambda.is_finite() && (0.0..=FRAC_PI_2).contains(&lambda)) {
        return Err(ConeError::OutOfRange(format!(
            "lambda = {lambda} must lie in [0, pi/2]"
        )));
    }
    if k == d {
        return Ok(1.0);
    }
    let (p, q) = ((k - 1) as i32, (d - k - 1) as i32);
    let r = integrate(
        |phi: f64| phi.cos().powi(p) * phi.sin().powi(q),
        0.0,
        lambda,
        QUAD_TOL,
        MAX_PANELS,
    );
    let pref = (ln_omega(k) + ln_omega(d - k) - ln_omega(d)).exp();
    Ok(pref * r.value)
}

/// Truncation radius: smallest `R ≥ 8` (step 1/4) with
/// `c(1+2R²)^p e^{−R²/2} R^d < 1e−18`.
pub fn truncation_radius(f: &TaggedFn, d: usize) -> f64 {
    let g = f.growth();
    let mut r: f64 = 8.0;
    loop {
        let ln_b =
            g.c.max(1e-300).ln() + g.p * (1.0 + 2.0 * r * r).ln() - 0.5 * r * r + d as f64 * r.ln();
        if ln_b < (1e-18f64).ln() || r > 200.0 {
            return r;
        }
        r += 0.25;
    }
}

/// `I_k(f) = E f(‖Π_L g‖², ‖Π_{L^⊥} g‖²)` for a `k`-dimensional subspace `L`
/// of `R^d`, by (nested) adaptive quadrature over the radial variables.
pub fn i_coeff(f: &TaggedFn, d: usize, k: usize) -> Result<f64> {
    check_dk(d, k, true)?;
    let big_r = truncation_radius(f, d);
    let err: Cell<Option<ConeError>> = Cell::new(None);
    let eval = |a: f64, b: f64| -> f64 {
        match f.eval_checked(a, b) {
            Ok(v) => v,
            Err(e) => {
                err.set(Some(e));
                0.0
            }
        }
    };
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let value = if k == 0 || k == d {
        let pref = (ln_omega(d) - d as f64 * half_ln_2pi).exp();
        let q = (d - 1) as i32;
        let at_zero_a = k == 0;
        let r = integrate(
            |t: f64| {
                let v = if at_zero_a {
                    eval(0.0, t * t)
                } else {
                    eval(t * t, 0.0)
                };
                v * t.powi(q) * (-0.5 * t * t).exp()
            },
            0.0,
            big_r,
            QUAD_TOL,
            MAX_PANELS,
        );
        pref * r.value
    } else {
        let pref = (ln_omega(k) + ln_omega(d - k) - d as f64 * half_ln_2pi).exp();
        let (p, q) = ((k - 1) as i32, (d - k - 1) as i32);
        let outer = integrate(
            |r: f64| {
                let a = r * r;
                let top = f.s_cutoff(r).map_or(big_r, |c| c.min(big_r));
                let inner = integrate_piecewise(
                    |s: f64| eval(a, s * s) * s.powi(q) * (-0.5 * s * s).exp(),
                    0.0,
                    top,
                    &[],
                    QUAD_TOL,
                    MAX_PANELS,
                );
                inner.value * r.powi(p) * (-0.5 * a).exp()
            },
            0.0,
            big_r,
            QUAD_TOL,
            MAX_PANELS,
        );
        pref * outer.value
    };
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// `m` Chebyshev points mapped to `[lo, hi]`, ascending.
pub fn chebyshev_grid(m: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut g: Vec<f64> = (0..m)
        .map(|i| {
            let x = ((2 * i + 1) as f64 * PI / (2 * m) as f64).cos();
            lo + (hi - lo) * 0.5 * (1.0 + x)
        })
        .collect();
    g.sort_by(f64::total_cmp);
    g
}

/// Default inversion grid: `d − 1` Chebyshev points on `[0.1, 1.0]`.
pub fn default_grid(d: usize) -> Vec<f64> {
    chebyshev_grid(d.saturating_sub(1).max(1), 0.1, 1.0)
}

/// Pseudo-inverse of `G[j][k] = g_{k+1}(λ_j)` for `k < d − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionMatrix {
    pub d: usize,
    pub lambdas: Vec<f64>,
    /// `m × (d−1)`, row-major.
    pub g: Vec<f64>,
    /// `(d−1) × m`, row-major.
    pub a: Vec<f64>,
    pub cond: f64,
}

impl InversionMatrix {
    pub fn m(&self) -> usize {
        self.lambdas.len()
    }

    /// `a[i][j]`: weight of `ν_{λ_j}` in `Ω_{i+1}`.
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.m() + j]
    }

    /// `max |A G − I|`.
    pub fn identity_error(&self) -> f64 {
        let n = self.d - 1;
        let m = self.m();
        let mut worst = 0.0f64;
        for i in 0..n {
            for k in 0..n {
                let s: f64 = (0..m).map(|j| self.a[i * m + j] * self.g[j * n + k]).sum();
                worst = worst.max((s - if i == k { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }
}

/// Builds the inversion matrix for the grid `lambdas` (`m ≥ d − 1` distinct
/// values in `(0, 1]`); least squares when over-determined.
pub fn inversion_coeffs(d: usize, lambdas: &[f64]) -> Result<InversionMatrix> {
    if d < 2 {
        return Err(ConeError::OutOfRange("inversion needs d >= 2".into()));
    }
    let n = d - 1;
    let m = lambdas.len();
    if m < n {
        return Err(ConeError::OutOfRange(format!(
            "grid has {m} values, need at least {n}"
        )));
    }
    for (i, &l) in lambdas.iter().enumerate() {
        if !(l > 0.0 && l <= 1.0) {
            return Err(ConeError::OutOfRange(format!(
                "grid value {l} outside (0, 1]"
            )));
        }
        if lambdas[..i].contains(&l) {
            return Err(ConeError::OutOfRange(format!("grid value {l} repeated")));
        }
    }
    let mut g = vec![0.0; m * n];
    for (j, &l) in lambdas.iter().enumerate() {
        for k in 0..n {
            g[j * n + k] = g_coeff(d, k + 1, l)?;
        }
    }
    let gm = DMatrix::from_row_slice(m, n, &g);
    let svd = gm.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if cond.is_nan() || cond > MAX_CONDITION {
        return Err(ConeError::IllConditioned { cond });
    }
    let pinv = svd
        .pseudo_inverse(0.0)
        .map_err(|e| ConeError::Lp(e.to_string()))?;
    let mut a = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            a[i * m + j] = pinv[(i, j)];
        }
    }
    Ok(InversionMatrix {
        d,
        lambdas: lambdas.to_vec(),
        g,
        a,
        cond,
    })
}

/// Coefficient tables for one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinerTable {
    pub d: usize,
    pub lambdas: Vec<f64>,
    /// `g[j][k−1] = g_k(λ_j)` for `k = 1..d−1`, row-major.
    pub g: Vec<f64>,
    /// Tag of the function behind `i_values`.
    pub f_tag: Option<String>,
    /// `I_0(f) .. I_d(f)`.
    pub i_values: Vec<f64>,
    pub inversion: Option<InversionMatrix>,
}

impl SteinerTable {
    /// Tabulates `g` on `lambdas`, `I_k(f)` when `f` is given, and the
    /// inversion matrix when the grid is a valid inversion grid.
    pub fn new(d: usize, lambdas: &[f64], f: Option<&TaggedFn>) -> Result<Self> {
        if d < 2 {
            return Err(ConeError::OutOfRange("d must be at least 2".into()));
        }
        let n = d - 1;
        let mut g = Vec::with_capacity(lambdas.len() * n);
        for &l in lambdas {
            for k in 1..=n {
                g.push(g_coeff(d, k, l)?);
            }
        }
        let i_values = match f {
            Some(f) => (0..=d).map(|k| i_coeff(f, d, k)).collect::<Result<_>>()?,
            None => Vec::new(),
        };
        let inversion = inversion_coeffs(d, lambdas).ok();
        Ok(SteinerTable {
            d,
            lambdas: lambdas.to_vec(),
            g,
            f_tag: f.map(|f| f.to_string()),
            i_values,
            inversion,
        })
    }

    pub fn cond(&self) -> Option<f64> {
        self.inversion.as_ref().map(|i| i.cond)
    }
}

/// `I_0(f) .. I_d(f)`.
pub fn i_coeffs(f: &TaggedFn, d: usize) -> Result<Vec<f64>> {
    (0..=d).map(|k| i_coeff(f, d, k)).collect()
}

/// `Σ_{k=1}^{d−1} g_k(λ) Ω_k + Ω_d` as coefficients on `Ω_0 .. Ω_d`.
pub fn local_coefficients(d: usize, lambda: f64) -> Result<Vec<f64>> {
    let mut c = vec![0.0; d + 1];
    for (k, ck) in c.iter_mut().enumerate().skip(1) {
        *ck = g_coeff(d, k, lambda)?;
    }
    Ok(c)
}

/// Both sides of the Gaussian Master Steiner identity
/// `φ_f(C, η) = Σ_k I_k(f) Ω_k(C, η)`: the left side from stream A, the
/// right side from an independent stream B.
pub fn master_steiner_check(
    c: &Cone,
    f: &TaggedFn,
    eta: &BiconicSet,
    n: u64,
    seed: u64,
) -> Result<CheckReport> {
    let out = steiner_check_matrix(
        c,
        std::slice::from_ref(f),
        std::slice::from_ref(eta),
        &[],
        n,
        seed,
    )?;
    Ok(out.master.into_iter().next().expect("one case"))
}

/// Both sides of the local Steiner identity
/// `γ_d(M^a_λ(C, η)) = Σ_{k=1}^d g_k(λ) Ω_k(C, η)`.
pub fn local_steiner_check(
    c: &Cone,
    lambda: f64,
    eta: &BiconicSet,
    n: u64,
    seed: u64,
) -> Result<CheckReport> {
    let out = steiner_check_matrix(c, &[], std::slice::from_ref(eta), &[lambda], n, seed)?;
    Ok(out.local.into_iter().next().expect("one case"))
}

/// Reports of a [`steiner_check_matrix`] run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckMatrix {
    /// Ordered by `(f, η)`, `η` fastest.
    pub master: Vec<CheckReport>,
    /// Ordered by `(λ, η)`, `η` fastest.
    pub local: Vec<CheckReport>,
    /// Support-measure estimates from stream B, one per `η`.
    pub omega: Vec<OmegaEstimate>,
}

/// Runs the master checks for every `(f, η)` and the local checks for every
/// `(λ, η)`, sharing one projection per sample on each stream.
pub fn steiner_check_matrix(
    c: &Cone,
    fs: &[TaggedFn],
    etas: &[BiconicSet],
    lambdas: &[f64],
    n: u64,
    seed: u64,
) -> Result<CheckMatrix> {
    let d = c.dim();
    for &l in lambdas {
        check_lambda(l)?;
    }
    let phi_q: Vec<PhiQuery> = fs
        .iter()
        .flat_map(|f| {
            etas.iter().map(move |e| PhiQuery {
                f: f.clone(),
                eta: e.clone(),
            })
        })
        .collect();
    let par_q: Vec<ParallelQuery> = lambdas
        .iter()
        .flat_map(|&l| {
            etas.iter().map(move |e| ParallelQuery {
                lambda: l,
                eta: e.clone(),
                exclude_cone: false,
            })
        })
        .collect();
    let a = Sampling::new(n, seed, Substream::ConeA);
    let b = Sampling::new(n, seed, Substream::ConeB);
    let (phi, par) = measures::phi_and_parallel_batch(c, &phi_q, &par_q, a)?;
    let omega = measures::omega_estimates(c, etas, OmegaMethod::Auto, b)?;

    let mut master = Vec::with_capacity(phi_q.len());
    for (fi, f) in fs.iter().enumerate() {
        let coef = i_coeffs(f, d)?;
        for (ei, eta) in etas.iter().enumerate() {
            let lhs = &phi[fi * etas.len() + ei];
            let om = &omega[ei];
            let rhs = om.combine(&coef);
            let se = (lhs.stderr.powi(2) + om.stderr_of(&coef).powi(2)).sqrt();
            let mut r = CheckReport::statistical(
                format!("master {c} f={f} eta={eta}"),
                lhs.value,
                rhs,
                se,
                QUADRATURE_FLOOR,
            );
            r.details = format!("{}; omega via {:?}", r.details, om.method);
            master.push(r);
        }
    }
    let mut local = Vec::with_capacity(par_q.len());
    for (li, &l) in lambdas.iter().enumerate() {
        let coef = local_coefficients(d, l)?;
        for (ei, eta) in etas.iter().enumerate() {
            let lhs = &par[li * etas.len() + ei];
            let om = &omega[ei];
            let rhs = om.combine(&coef);
            let se = (lhs.stderr.powi(2) + om.stderr_of(&coef).powi(2)).sqrt();
            let mut r = CheckReport::statistical(
                format!("local {c} lambda={l} eta={eta}"),
                lhs.value,
                rhs,
                se,
                QUADRATURE_FLOOR,
            );
            r.details = format!("{}; omega via {:?}", r.details, om.method);
            local.push(r);
        }
    }
    Ok(CheckMatrix {
        master,
        local,
        omega,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn omega_small_dimensions() {
        assert!((omega_const(1).unwrap() - 2.0).abs() < 1e-14);
        assert!((omega_const(2).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!((omega_const(3).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!(omega_const(0).is_err());
    }

    #[test]
    fn g_closed_form_in_the_plane() {
        assert!((g_coeff(2, 1, FRAC_PI_4).unwrap() - 0.5).abs() < 1e-12);
        for l in [0.1, 0.5, 1.3] {
            assert!((g_coeff(2, 1, l).unwrap() - 2.0 * l / PI).abs() < 1e-12);
        }
        assert!(g_coeff(3, 0, 0.5).is_err());
        assert_eq!(g_coeff(4, 4, 0.3).unwrap(), 1.0);
        assert_eq!(g_coeff(4, 2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn g_reaches_one_and_is_monotone() {
        for d in 2..=8 {
            for k in 1..d {
                assert!(
                    (g_coeff(d, k, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-10,
                    "d={d} k={k}"
                );
                let mut prev = 0.0;
                for i in 0..=100 {
                    let v = g_coeff(d, k, FRAC_PI_2 * i as f64 / 100.0).unwrap();
                    assert!(v >= prev && (0.0..=1.0 + 1e-12).contains(&v));
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn i_oracles() {
        for d in 2..=8 {
            for k in 0..=d {
                let one = i_coeff(&TaggedFn::One, d, k).unwrap();
                let a = i_coeff(&TaggedFn::NormSqCone, d, k).unwrap();
                let ab = i_coeff(&TaggedFn::Moment { m: 1, n: 1 }, d, k).unwrap();
                assert!((one - 1.0).abs() < 1e-10, "d={d} k={k} one={one}");
                assert!((a - k as f64).abs() < 1e-9, "d={d} k={k} a={a}");
                assert!(
                    (ab - (k * (d - k)) as f64).abs() < 1e-9,
                    "d={d} k={k} ab={ab}"
                );
            }
        }
    }

    #[test]
    fn i_of_steiner_indicator_is_g() {
        for d in [2, 3, 5] {
            for k in 1..=d {
                for l in [0.2, 0.7, 1.2] {
                    let i = i_coeff(&TaggedFn::SteinerIndicator { lambda: l }, d, k).unwrap();
                    assert!(
                        (i - g_coeff(d, k, l).unwrap()).abs() < 1e-10,
                        "d={d} k={k} l={l}"
                    );
                }
            }
            assert_eq!(
                i_coeff(&TaggedFn::SteinerIndicator { lambda: 0.5 }, d, 0).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn growth_violation_propagates() {
        let f = TaggedFn::custom("liar", crate::functions::Growth::BOUNDED, |a, _| a);
        assert!(matches!(i_coeff(&f, 3, 1), Err(ConeError::BadFunction(_))));
    }

    #[test]
    fn inversion_scalar_and_identity() {
        let inv = inversion_coeffs(2, &[0.7]).unwrap();
        assert!((inv.a(0, 0) - 1.0 / g_coeff(2, 1, 0.7).unwrap()).abs() < 1e-12);
        for d in 2..=8 {
            let inv = inversion_coeffs(d, &default_grid(d)).unwrap();
            assert!(inv.identity_error() < 1e-8, "d={d}");
        }
        let over = inversion_coeffs(3, &[0.2, 0.4, 0.6, 0.8, 1.0]).unwrap();
        assert!(over.identity_error() < 1e-8);
    }

    #[test]
    fn inversion_rejects_bad_grids() {
        assert!(inversion_coeffs(4, &[0.2, 0.5]).is_err());
        assert!(inversion_coeffs(3, &[0.2, 0.2]).is_err());
        assert!(inversion_coeffs(3, &[0.2, 1.5]).is_err());
        assert!(matches!(
            inversion_coeffs(3, &[0.5, 0.5 + 1e-12]),
            Err(ConeError::IllConditioned { .. })
        ));
    }

    #[test]
    fn chebyshev_condition_regression_d6() {
        let inv = inversion_coeffs(6, &default_grid(6)).unwrap();
        assert!(inv.cond < 1e6, "cond = {}", inv.cond);
        // Pinned regression value.
        assert!(
            (inv.cond / 1.935693e3 - 1.0).abs() < 1e-5,
            "cond = {}",
            inv.cond
        );
    }

    #[test]
    fn table_shape() {
        let t = SteinerTable::new(3, &[0.3, 0.9], Some(&TaggedFn::One)).unwrap();
        assert_eq!(t.g.len(), 4);
        assert_eq!(t.i_values.len(), 4);
        assert!(t.cond().is_some());
    }
}
