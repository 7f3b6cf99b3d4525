//! Gaussian Monte Carlo estimators of support measures, intrinsic volumes,
//! `φ_f` functionals and local parallel masses.
//!
//! All estimators are built on [`fold_projections`], which projects every
//! sample once and lets any number of accumulators read the result.

use serde::{Deserialize, Serialize};

use crate::biconic::BiconicSet;
use crate::cone::{check_lambda, Cone};
use crate::error::{ConeError, Result};
use crate::functions::{steiner_indicator, TaggedFn};
use crate::linalg::{self, norm};
use crate::projection::{ProjectionResult, ProjectionStats, Projector};
use crate::rng::{map_chunks, Sampling, Substream};
use crate::steiner::{default_grid, inversion_coeffs, InversionMatrix};

/// Angular distance below which a sample counts as lying in the cone when
/// the cone itself is excluded.
pub const TOL_POS: f64 = 1e-12;

/// Projection norms below this are treated as zero when forming atoms.
const ATOM_EPS: f64 = 1e-12;

/// Projects `sampling.n` Gaussian vectors onto `c` and feeds each
/// `(sample id, g, projection)` to `visit`. Accumulators are created per
/// chunk and returned in chunk order.
pub fn fold_projections<A, I, V>(
    c: &Cone,
    sampling: Sampling,
    init: I,
    visit: V,
) -> Result<(Vec<A>, ProjectionStats)>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, u64, &[f64], &ProjectionResult) -> Result<()> + Sync + Send,
{
    if sampling.n == 0 {
        return Err(ConeError::OutOfRange(
            "sample count must be at least 1".into(),
        ));
    }
    if c.is_trivial() {
        return Err(ConeError::TrivialCone);
    }
    let d = c.dim();
    let parts = map_chunks(d, sampling, |mut ch| -> Result<(A, ProjectionStats)> {
        let mut proj = Projector::new(c);
        let mut acc = init();
        let mut g = vec![0.0; d];
        let mut r = ProjectionResult::default();
        for i in 0..ch.len {
            ch.fill(&mut g);
            proj.project_into(&g, &mut r)?;
            visit(&mut acc, ch.start + i as u64, &g, &r)?;
        }
        Ok((acc, proj.stats))
    });
    let mut stats = ProjectionStats::default();
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        let (a, s) = p?;
        stats.merge(&s);
        out.push(a);
    }
    Ok((out, stats))
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
}

impl Estimate {
    /// Binomial estimate `p̂ ± √(p̂(1−p̂)/N)`.
    pub fn from_count(count: u64, n: u64) -> Self {
        let p = count as f64 / n as f64;
        Estimate {
            value: p,
            stderr: (p * (1.0 - p) / n as f64).max(0.0).sqrt(),
            n,
        }
    }

    fn from_sums(sum: f64, sum_sq: f64, n: u64) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = (sum_sq / nf - mean * mean).max(0.0);
        Estimate {
            value: mean,
            stderr: (var / nf).sqrt(),
            n,
        }
    }
}

/// One weighted atom `(u, v)` on `S^{d−1} × S^{d−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: f64,
    /// Index of the Gaussian sample that produced the atom.
    pub id: u64,
}

/// Empirical estimate of `Ω_k(C, ·)` as weighted atoms on unit pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalConicMeasure {
    pub d: usize,
    pub k: usize,
    pub atoms: Vec<Atom>,
    pub total_samples: u64,
    pub seed: u64,
    /// Samples in the right skeleton but with a vanishing projection part.
    pub degenerate_samples: u64,
}

impl EmpiricalConicMeasure {
    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    /// Checks unit norms, nonnegative weights and total mass at most one.
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.atoms.iter().enumerate() {
            if a.u.len() != self.d || a.v.len() != self.d {
                return Err(ConeError::DimensionMismatch {
                    expected: self.d,
                    got: a.u.len().min(a.v.len()),
                });
            }
            if (norm(&a.u) - 1.0).abs() > 1e-10 || (norm(&a.v) - 1.0).abs() > 1e-10 {
                return Err(ConeError::InvalidCone(format!(
                    "atom {i} is not a pair of unit vectors"
                )));
            }
            if a.w.is_nan() || a.w < 0.0 {
                return Err(ConeError::InvalidCone(format!(
                    "atom {i} has negative weight"
                )));
            }
        }
        if self.total_weight() > 1.0 + 1e-12 {
            return Err(ConeError::InvalidCone("total weight exceeds one".into()));
        }
        Ok(())
    }

    /// `∫ f dμ` over the atoms.
    pub fn integrate(&self, f: impl Fn(&[f64], &[f64]) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.w * f(&a.u, &a.v)).sum()
    }
}

/// `v̂_0 .. v̂_d` with binomial standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicVolumeEstimate {
    pub v: Vec<f64>,
    pub stderr: Vec<f64>,
    pub counts: Vec<u64>,
    pub n: u64,
}

fn require_faces(c: &Cone) -> Result<()> {
    if !c.is_polyhedral() {
        return Err(ConeError::Unsupported {
            op: "face detection",
            reason: format!("{c} has no face lattice; use the inversion estimator"),
        });
    }
    Ok(())
}

fn face_of(r: &ProjectionResult) -> usize {
    r.face_dim.expect("polyhedral projections report a face")
}

/// Histogram of the face dimension of `Π_C(g)` over `n` samples.
pub fn intrinsic_volumes_mc(c: &Cone, n: u64, seed: u64) -> Result<IntrinsicVolumeEstimate> {
    intrinsic_volumes_with(c, Sampling::new(n, seed, Substream::ConeA))
}

pub fn intrinsic_volumes_with(c: &Cone, sampling: Sampling) -> Result<IntrinsicVolumeEstimate> {
    require_faces(c)?;
    let d = c.dim();
    let (parts, _) = fold_projections(
        c,
        sampling,
        || vec![0u64; d + 1],
        |acc, _, _, r| {
            acc[face_of(r)] += 1;
            Ok(())
        },
    )?;
    let mut counts = vec![0u64; d + 1];
    for p in parts {
        counts.iter_mut().zip(p).for_each(|(a, b)| *a += b);
    }
    let est: Vec<Estimate> = counts
        .iter()
        .map(|&k| Estimate::from_count(k, sampling.n))
        .collect();
    Ok(IntrinsicVolumeEstimate {
        v: est.iter().map(|e| e.value).collect(),
        stderr: est.iter().map(|e| e.stderr).collect(),
        counts,
        n: sampling.n,
    })
}

/// Atoms `(Π_C g/‖·‖, Π_{C°} g/‖·‖, 1/N)` of samples whose projection lies
/// in the relative interior of a `k`-face and whose pair lies in `η`.
pub fn empirical_support_measure(
    c: &Cone,
    k: usize,
    eta: &BiconicSet,
    n: u64,
    seed: u64,
) -> Result<EmpiricalConicMeasure> {
    let mut v = empirical_support_measures(c, &[k], eta, Sampling::new(n, seed, Substream::ConeA))?;
    Ok(v.remove(0))
}

/// [`empirical_support_measure`] for several degrees from one stream.
pub fn empirical_support_measures(
    c: &Cone,
    ks: &[usize],
    eta: &BiconicSet,
    sampling: Sampling,
) -> Result<Vec<EmpiricalConicMeasure>> {
    require_faces(c)?;
    let d = c.dim();
    eta.validate(d)?;
    for &k in ks {
        if k == 0 || k >= d {
            return Err(ConeError::OutOfRange(format!(
                "degree k={k} outside 1..={}",
                d - 1
            )));
        }
    }
    let w = 1.0 / sampling.n as f64;
    let (parts, _) = fold_projections(
        c,
        sampling,
        || (vec![Vec::<Atom>::new(); ks.len()], vec![0u64; ks.len()]),
        |(atoms, degenerate), id, g, r| {
            let f = face_of(r);
            let Some(slot) = ks.iter().position(|&k| k == f) else {
                return Ok(());
            };
            if !eta.contains(&r.point, &r.complement)? {
                return Ok(());
            }
            let (np, nq) = (norm(&r.point), norm(&r.complement));
            let scale = norm(g).max(1.0) * ATOM_EPS;
            if np <= scale || nq <= scale {
                degenerate[slot] += 1;
                return Ok(());
            }
            atoms[slot].push(Atom {
                u: r.point.iter().map(|x| x / np).collect(),
                v: r.complement.iter().map(|x| x / nq).collect(),
                w,
                id,
            });
            Ok(())
        },
    )?;
    let mut out: Vec<EmpiricalConicMeasure> = ks
        .iter()
        .map(|&k| EmpiricalConicMeasure {
            d,
            k,
            atoms: Vec::new(),
            total_samples: sampling.n,
            seed: sampling.seed,
            degenerate_samples: 0,
        })
        .collect();
    for (atoms, degenerate) in parts {
        for (i, (a, dg)) in atoms.into_iter().zip(degenerate).enumerate() {
            out[i].atoms.extend(a);
            out[i].degenerate_samples += dg;
        }
    }
    Ok(out)
}

/// A `φ_f(C, η)` query.
#[derive(Debug, Clone)]
pub struct PhiQuery {
    pub f: TaggedFn,
    pub eta: BiconicSet,
}

/// A local parallel mass query.
#[derive(Debug, Clone)]
pub struct ParallelQuery {
    pub lambda: f64,
    pub eta: BiconicSet,
    /// Count only samples strictly outside the cone (`0 < d_a ≤ λ`).
    pub exclude_cone: bool,
}

#[inline]
fn parallel_hit(lambda: f64, exclude: bool, a: f64, b: f64) -> bool {
    steiner_indicator(lambda, a, b) > 0.0 && (!exclude || b.sqrt().atan2(a.sqrt()) > TOL_POS)
}

/// `φ_f(C, η) = E[f(‖Π_C g‖², ‖Π_{C°} g‖²) 1_η]`.
pub fn phi_f_mc(c: &Cone, f: &TaggedFn, eta: &BiconicSet, n: u64, seed: u64) -> Result<Estimate> {
    let q = [PhiQuery {
        f: f.clone(),
        eta: eta.clone(),
    }];
    Ok(phi_and_parallel_batch(c, &q, &[], Sampling::new(n, seed, Substream::ConeA))?.0[0])
}

/// `γ_d` of the local parallel set `{d_a ≤ λ, η}`, or of `{0 < d_a ≤ λ, η}`
/// when `exclude_cone`.
pub fn local_parallel_mass(
    c: &Cone,
    lambda: f64,
    eta: &BiconicSet,
    n: u64,
    seed: u64,
    exclude_cone: bool,
) -> Result<Estimate> {
    let q = [ParallelQuery {
        lambda,
        eta: eta.clone(),
        exclude_cone,
    }];
    Ok(phi_and_parallel_batch(c, &[], &q, Sampling::new(n, seed, Substream::ConeA))?.1[0])
}

/// Evaluates all `φ_f` and parallel-mass queries on one stream, projecting
/// each sample once.
pub fn phi_and_parallel_batch(
    c: &Cone,
    phi: &[PhiQuery],
    par: &[ParallelQuery],
    sampling: Sampling,
) -> Result<(Vec<Estimate>, Vec<Estimate>)> {
    let d = c.dim();
    for q in par {
        check_lambda(q.lambda)?;
        q.eta.validate(d)?;
    }
    for q in phi {
        q.eta.validate(d)?;
    }
    // Distinct η's are evaluated once per sample.
    let mut etas: Vec<&BiconicSet> = Vec::new();
    let mut keys: Vec<String> = Vec::new();
    let mut index = Vec::with_capacity(phi.len() + par.len());
    for e in phi.iter().map(|q| &q.eta).chain(par.iter().map(|q| &q.eta)) {
        let key = e.to_string();
        match keys.iter().position(|x| *x == key) {
            Some(i) => index.push(i),
            None => {
                keys.push(key);
                etas.push(e);
                index.push(etas.len() - 1);
            }
        }
    }
    let (phi_eta, par_eta) = index.split_at(phi.len());
    let tans: Vec<f64> = par.iter().map(|q| q.lambda).collect();

    struct Acc {
        sum: Vec<f64>,
        sum_sq: Vec<f64>,
        hits: Vec<u64>,
        in_eta: Vec<bool>,
    }
    let (parts, _) = fold_projections(
        c,
        sampling,
        || Acc {
            sum: vec![0.0; phi.len()],
            sum_sq: vec![0.0; phi.len()],
            hits: vec![0; par.len()],
            in_eta: vec![false; etas.len()],
        },
        |acc, id, _, r| {
            for (i, e) in etas.iter().enumerate() {
                acc.in_eta[i] = e.contains(&r.point, &r.complement)?;
            }
            let a = r.norm_sq_point();
            let b = r.norm_sq_complement();
            for (i, q) in phi.iter().enumerate() {
                if !acc.in_eta[phi_eta[i]] {
                    continue;
                }
                let v = q.f.eval(a, b);
                if !v.is_finite() {
                    return Err(ConeError::BadFunction(format!(
                        "{} is not finite at sample {id} (a = {a}, b = {b})",
                        q.f
                    )));
                }
                acc.sum[i] += v;
                acc.sum_sq[i] += v * v;
            }
            for (i, q) in par.iter().enumerate() {
                if acc.in_eta[par_eta[i]] && parallel_hit(tans[i], q.exclude_cone, a, b) {
                    acc.hits[i] += 1;
                }
            }
            Ok(())
        },
    )?;
    let mut sum = vec![0.0; phi.len()];
    let mut sum_sq = vec![0.0; phi.len()];
    let mut hits = vec![0u64; par.len()];
    for p in parts {
        for i in 0..phi.len() {
            sum[i] += p.sum[i];
            sum_sq[i] += p.sum_sq[i];
        }
        hits.iter_mut().zip(&p.hits).for_each(|(a, b)| *a += b);
    }
    let n = sampling.n;
    let phi_est = (0..phi.len())
        .map(|i| Estimate::from_sums(sum[i], sum_sq[i], n))
        .collect();
    let par_est = hits.iter().map(|&h| Estimate::from_count(h, n)).collect();
    Ok((phi_est, par_est))
}

/// Which estimator produced an [`OmegaEstimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OmegaMethod {
    /// Face detection when available, inversion otherwise.
    Auto,
    /// Multinomial face-dimension counts.
    Faces,
    /// Inversion of `ν_λ` on the given grid (default grid when empty).
    Inversion(Vec<f64>),
}

/// `Ω̂_0(C, η) .. Ω̂_d(C, η)` with their joint covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaEstimate {
    pub d: usize,
    pub omega: Vec<f64>,
    /// `(d+1) × (d+1)`, row-major.
    pub cov: Vec<f64>,
    pub n: u64,
    pub method: OmegaMethod,
    /// Condition number of the inversion system, when used.
    pub cond: Option<f64>,
}

impl OmegaEstimate {
    /// `Σ_k c_k Ω̂_k`.
    pub fn combine(&self, c: &[f64]) -> f64 {
        c.iter().zip(&self.omega).map(|(a, b)| a * b).sum()
    }

    /// Standard error of `Σ_k c_k Ω̂_k`, `√(cᵀ Cov c)`.
    pub fn stderr_of(&self, c: &[f64]) -> f64 {
        let m = self.d + 1;
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += c[i] * self.cov[i * m + j] * c[j];
            }
        }
        s.max(0.0).sqrt()
    }

    pub fn stderr(&self, k: usize) -> f64 {
        self.cov[k * (self.d + 1) + k].max(0.0).sqrt()
    }
}

/// `Ω̂_0, Ω̂_d` on stream A: `γ_d({x ∈ C° : (o, x) ∈ η})` and `γ_d({x ∈ C : (x, o) ∈ η})`.
pub fn omega_extremes(
    c: &Cone,
    eta: &BiconicSet,
    n: u64,
    seed: u64,
) -> Result<(Estimate, Estimate)> {
    let d = c.dim();
    probe_origin(eta, d)?;
    let e = omega_estimates(
        c,
        std::slice::from_ref(eta),
        OmegaMethod::Auto,
        Sampling::new(n, seed, Substream::ConeA),
    )?;
    let e = &e[0];
    let mk = |k: usize| Estimate {
        value: e.omega[k],
        stderr: e.stderr(k),
        n,
    };
    Ok((mk(0), mk(d)))
}

fn probe_origin(eta: &BiconicSet, d: usize) -> Result<()> {
    let o = vec![0.0; d];
    let mut e1 = vec![0.0; d];
    e1[0] = 1.0;
    eta.contains(&e1, &o)?;
    eta.contains(&o, &e1)?;
    Ok(())
}

/// `Ω̂_1 .. Ω̂_{d−1}` by inverting `ν_{λ_j}(C, η) = Σ_k g_k(λ_j) Ω_k(C, η)`.
pub fn support_measure_via_inversion(
    c: &Cone,
    eta: &BiconicSet,
    grid: &[f64],
    n: u64,
    seed: u64,
) -> Result<Vec<Estimate>> {
    let method = OmegaMethod::Inversion(grid.to_vec());
    let e = omega_estimates(
        c,
        std::slice::from_ref(eta),
        method,
        Sampling::new(n, seed, Substream::ConeA),
    )?;
    let e = &e[0];
    Ok((1..c.dim())
        .map(|k| Estimate {
            value: e.omega[k],
            stderr: e.stderr(k),
            n,
        })
        .collect())
}

/// Estimates `Ω_0 .. Ω_d` for every `η` from one stream.
pub fn omega_estimates(
    c: &Cone,
    etas: &[BiconicSet],
    method: OmegaMethod,
    sampling: Sampling,
) -> Result<Vec<OmegaEstimate>> {
    let d = c.dim();
    for e in etas {
        e.validate(d)?;
    }
    let use_faces = match &method {
        OmegaMethod::Auto => c.is_polyhedral(),
        OmegaMethod::Faces => {
            require_faces(c)?;
            true
        }
        OmegaMethod::Inversion(_) => false,
    };
    if use_faces {
        omega_by_faces(c, etas, sampling)
    } else {
        let grid = match &method {
            OmegaMethod::Inversion(g) if !g.is_empty() => g.clone(),
            _ => default_grid(d),
        };
        let inv = inversion_coeffs(d, &grid)?;
        omega_by_inversion(c, etas, &inv, sampling)
    }
}

fn omega_by_faces(c: &Cone, etas: &[BiconicSet], sampling: Sampling) -> Result<Vec<OmegaEstimate>> {
    let d = c.dim();
    let m = d + 1;
    let (parts, _) = fold_projections(
        c,
        sampling,
        || vec![0u64; etas.len() * m],
        |acc, _, _, r| {
            let f = face_of(r);
            for (i, e) in etas.iter().enumerate() {
                if e.contains(&r.point, &r.complement)? {
                    acc[i * m + f] += 1;
                }
            }
            Ok(())
        },
    )?;
    let mut counts = vec![0u64; etas.len() * m];
    for p in parts {
        counts.iter_mut().zip(p).for_each(|(a, b)| *a += b);
    }
    let nf = sampling.n as f64;
    Ok((0..etas.len())
        .map(|i| {
            let p: Vec<f64> = counts[i * m..(i + 1) * m]
                .iter()
                .map(|&k| k as f64 / nf)
                .collect();
            let mut cov = vec![0.0; m * m];
            for a in 0..m {
                for b in 0..m {
                    let delta = if a == b { p[a] } else { 0.0 };
                    cov[a * m + b] = (delta - p[a] * p[b]) / nf;
                }
            }
            OmegaEstimate {
                d,
                omega: p,
                cov,
                n: sampling.n,
                method: OmegaMethod::Faces,
                cond: None,
            }
        })
        .collect())
}

fn omega_by_inversion(
    c: &Cone,
    etas: &[BiconicSet],
    inv: &InversionMatrix,
    sampling: Sampling,
) -> Result<Vec<OmegaEstimate>> {
    let d = c.dim();
    let m = inv.m();
    // Indicator vector z = (Y_0, X_1 .. X_m, Y_d).
    let nz = m + 2;
    let lambdas = inv.lambdas.clone();
    let (parts, _) = fold_projections(
        c,
        sampling,
        || (vec![0u64; etas.len() * nz * nz], vec![false; nz]),
        |(acc, z), _, _, r| {
            let a = r.norm_sq_point();
            let b = r.norm_sq_complement();
            let angle = b.sqrt().atan2(a.sqrt());
            for (ei, e) in etas.iter().enumerate() {
                z.iter_mut().for_each(|v| *v = false);
                if a == 0.0 {
                    z[0] = e.contains(&r.point, &r.complement)?;
                } else if angle <= TOL_POS {
                    let o = vec![0.0; d];
                    z[m + 1] = e.contains(&r.point, &o)?;
                } else if e.contains(&r.point, &r.complement)? {
                    for (j, &l) in lambdas.iter().enumerate() {
                        z[j + 1] = parallel_hit(l, true, a, b);
                    }
                }
                let block = &mut acc[ei * nz * nz..(ei + 1) * nz * nz];
                for i in 0..nz {
                    if z[i] {
                        for j in 0..nz {
                            if z[j] {
                                block[i * nz + j] += 1;
                            }
                        }
                    }
                }
            }
            Ok(())
        },
    )?;
    let mut counts = vec![0u64; etas.len() * nz * nz];
    for (p, _) in parts {
        counts.iter_mut().zip(p).for_each(|(a, b)| *a += b);
    }
    // Linear map L from z-means to Ω_0 .. Ω_d.
    let mut l = vec![0.0; (d + 1) * nz];
    l[0] = 1.0;
    for k in 1..d {
        for j in 0..m {
            l[k * nz + j + 1] = inv.a(k - 1, j);
        }
    }
    l[d * nz + m + 1] = 1.0;
    let nf = sampling.n as f64;
    Ok((0..etas.len())
        .map(|ei| {
            let block = &counts[ei * nz * nz..(ei + 1) * nz * nz];
            let mean: Vec<f64> = (0..nz).map(|i| block[i * nz + i] as f64 / nf).collect();
            let mut cz = vec![0.0; nz * nz];
            for i in 0..nz {
                for j in 0..nz {
                    cz[i * nz + j] = (block[i * nz + j] as f64 / nf - mean[i] * mean[j]) / nf;
                }
            }
            let omega: Vec<f64> = (0..=d)
                .map(|k| (0..nz).map(|j| l[k * nz + j] * mean[j]).sum())
                .collect();
            let mut cov = vec![0.0; (d + 1) * (d + 1)];
            for a in 0..=d {
                for b in 0..=d {
                    let mut s = 0.0;
                    for i in 0..nz {
                        let la = l[a * nz + i];
                        if la == 0.0 {
                            continue;
                        }
                        for j in 0..nz {
                            s += la * cz[i * nz + j] * l[b * nz + j];
                        }
                    }
                    cov[a * (d + 1) + b] = s;
                }
            }
            OmegaEstimate {
                d,
                omega,
                cov,
                n: sampling.n,
                method: OmegaMethod::Inversion(inv.lambdas.clone()),
                cond: Some(inv.cond),
            }
        })
        .collect())
}

/// Unit-normalised copy of `x`, or `None` below `ATOM_EPS · max(1, scale)`.
pub fn unit_or_none(x: &[f64], scale: f64) -> Option<Vec<f64>> {
    let n = norm(x);
    (n > ATOM_EPS * scale.max(1.0)).then(|| x.iter().map(|v| v / n).collect())
}

/// Sanity check on the homogeneous extension: `f_h(x, y) = f(x/‖x‖, y/‖y‖)`.
pub fn homogeneous_extension(
    f: impl Fn(&[f64], &[f64]) -> f64,
    x: &[f64],
    y: &[f64],
) -> Option<f64> {
    let u = linalg::normalized(x)?;
    let v = linalg::normalized(y)?;
    Some(f(&u, &v))
}
