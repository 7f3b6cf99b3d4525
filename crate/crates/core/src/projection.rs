//! Metric projection onto cones, the Moreau complement, and the dimension
//! of the face whose relative interior contains the projection.

use serde::{Deserialize, Serialize};

use crate::cone::{angle_from_parts, Cone, ConeKind, Polyhedral};
use crate::error::{ConeError, Result};
use crate::linalg::{self, dot, norm};
use crate::nnls::Nnls;
use crate::report::CheckReport;
use crate::rng::{map_chunks, Sampling};

/// Default relative tolerance for the supporting-normal face criterion.
pub const DEFAULT_FACE_TOL: f64 = 1e-8;

/// Moreau parts below this fraction of `‖x‖` are set to exactly zero.
const SNAP_TOL: f64 = 1e-12;

/// Rank threshold relative to the leading pivot.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    /// `Π_C(x)`.
    pub point: Vec<f64>,
    /// `Π_{C°}(x) = x − Π_C(x)`.
    pub complement: Vec<f64>,
    /// Dimension of the face containing `point` in its relative interior;
    /// `None` for cones without a face lattice (circular).
    pub face_dim: Option<usize>,
    /// `|⟨point, complement⟩| / max(1, ‖x‖²)`.
    pub residual_check: f64,
    pub nnls_iterations: usize,
}

impl ProjectionResult {
    fn reset(&mut self, d: usize) {
        self.point.clear();
        self.point.resize(d, 0.0);
        self.complement.clear();
        self.complement.resize(d, 0.0);
        self.face_dim = None;
        self.residual_check = 0.0;
        self.nnls_iterations = 0;
    }

    /// `‖Π_C(x)‖²`.
    pub fn norm_sq_point(&self) -> f64 {
        linalg::norm_sq(&self.point)
    }

    /// `‖Π_{C°}(x)‖²`.
    pub fn norm_sq_complement(&self) -> f64 {
        linalg::norm_sq(&self.complement)
    }

    /// Angular distance of `x` from the cone.
    pub fn angle(&self) -> f64 {
        angle_from_parts(&self.point, &self.complement)
    }
}

/// Counters surfaced by the CLI's `--stats` output.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionStats {
    pub projections: u64,
    pub nnls_iterations: u64,
    pub jitter_restarts: u64,
}

impl ProjectionStats {
    pub fn merge(&mut self, other: &ProjectionStats) {
        self.projections += other.projections;
        self.nnls_iterations += other.nnls_iterations;
        self.jitter_restarts += other.jitter_restarts;
    }
}

/// Projection workspace bound to one cone. One per worker.
#[derive(Debug, Clone)]
pub struct Projector<'a> {
    cone: &'a Cone,
    nnls: Nnls,
    tmp: ProjectionResult,
    rows: Vec<usize>,
    rank_buf: Vec<f64>,
    inner: Option<Box<Projector<'a>>>,
    face_tol: f64,
    pub stats: ProjectionStats,
}

impl<'a> Projector<'a> {
    pub fn new(cone: &'a Cone) -> Self {
        let inner = match cone.kind() {
            ConeKind::DualOf(c) => Some(Box::new(Projector::new(c))),
            _ => None,
        };
        Projector {
            cone,
            nnls: Nnls::default(),
            tmp: ProjectionResult::default(),
            rows: Vec::new(),
            rank_buf: Vec::new(),
            inner,
            face_tol: DEFAULT_FACE_TOL,
            stats: ProjectionStats::default(),
        }
    }

    pub fn with_face_tol(mut self, tol: f64) -> Self {
        self.face_tol = tol;
        self
    }

    pub fn cone(&self) -> &'a Cone {
        self.cone
    }

    pub fn project(&mut self, x: &[f64]) -> Result<ProjectionResult> {
        let mut out = ProjectionResult::default();
        self.project_into(x, &mut out)?;
        Ok(out)
    }

    /// Projects `x`, reusing the buffers of `out`.
    pub fn project_into(&mut self, x: &[f64], out: &mut ProjectionResult) -> Result<()> {
        let d = self.cone.dim();
        if x.len() != d {
            return Err(ConeError::DimensionMismatch {
                expected: d,
                got: x.len(),
            });
        }
        if !linalg::all_finite(x) {
            return Err(ConeError::NonFinite);
        }
        out.reset(d);
        self.stats.projections += 1;
        match self.cone.kind() {
            ConeKind::Polyhedral(p) => {
                let iters = match self.nnls.solve(&p.gens, d, x, &mut out.point) {
                    Ok(it) => it,
                    Err(ConeError::NnlsNonConvergence { .. }) => {
                        self.stats.jitter_restarts += 1;
                        self.solve_jittered(p, x, &mut out.point)?
                    }
                    Err(e) => return Err(e),
                };
                out.nnls_iterations = iters;
                self.stats.nnls_iterations += iters as u64;
                finish_parts(x, out);
                out.face_dim = Some(polyhedral_face_dim(
                    p,
                    d,
                    &out.point,
                    &out.complement,
                    norm(x),
                    self.face_tol,
                    &mut self.rows,
                    &mut self.rank_buf,
                ));
            }
            ConeKind::Subspace(s) => {
                for i in 0..s.k {
                    let b = s.basis_vector(i, d);
                    let c = dot(b, x);
                    out.point.iter_mut().zip(b).for_each(|(p, bi)| *p += c * bi);
                }
                finish_parts(x, out);
                out.face_dim = Some(if norm(&out.point) == 0.0 { 0 } else { s.k });
            }
            ConeKind::Circular(c) => {
                project_circular(&c.axis, c.half_angle, x, &mut out.point);
                finish_parts(x, out);
            }
            ConeKind::DualOf(_) => {
                let inner = self
                    .inner
                    .as_mut()
                    .expect("dual projector has an inner workspace");
                let mut tmp = std::mem::take(&mut self.tmp);
                inner.project_into(x, &mut tmp)?;
                out.point.copy_from_slice(&tmp.complement);
                out.complement.copy_from_slice(&tmp.point);
                out.nnls_iterations = tmp.nnls_iterations;
                out.residual_check = tmp.residual_check;
                out.face_dim = tmp.face_dim.map(|f| d - f);
                self.stats.nnls_iterations += tmp.nnls_iterations as u64;
                self.tmp = tmp;
            }
        }
        Ok(())
    }

    fn solve_jittered(&mut self, p: &Polyhedral, x: &[f64], point: &mut [f64]) -> Result<usize> {
        // Deterministic relative perturbation; projection is 1-Lipschitz so the
        // error it introduces is bounded by the perturbation size.
        let scale = 1e-12 * norm(x).max(1.0);
        let jittered: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| v + scale * (((i as f64 + 1.0) * 0.618_033_988_749_895).fract() - 0.5))
            .collect();
        self.nnls.solve(&p.gens, self.cone.dim(), &jittered, point)
    }
}

/// Computes the complement, snaps negligible parts to zero, and fills the
/// orthogonality residual.
fn finish_parts(x: &[f64], out: &mut ProjectionResult) {
    for ((q, xi), p) in out.complement.iter_mut().zip(x).zip(&out.point) {
        *q = xi - p;
    }
    let nx = norm(x);
    if norm(&out.complement) <= SNAP_TOL * nx {
        out.point.copy_from_slice(x);
        out.complement.iter_mut().for_each(|v| *v = 0.0);
    } else if norm(&out.point) <= SNAP_TOL * nx {
        out.point.iter_mut().for_each(|v| *v = 0.0);
        out.complement.copy_from_slice(x);
    }
    out.residual_check = dot(&out.point, &out.complement).abs() / (nx * nx).max(1.0);
}

/// Closed-form projection onto `{x : ∠(x, axis) ≤ alpha}`.
fn project_circular(axis: &[f64], alpha: f64, x: &[f64], point: &mut [f64]) {
    let t = dot(x, axis);
    let radial_sq = (linalg::norm_sq(x) - t * t).max(0.0);
    let s = radial_sq.sqrt();
    let (sin_a, cos_a) = alpha.sin_cos();
    if t >= 0.0 && s * cos_a <= t * sin_a {
        point.copy_from_slice(x);
    } else if t < 0.0 && t * cos_a <= -s * sin_a {
        point.iter_mut().for_each(|v| *v = 0.0);
    } else {
        // Onto the boundary ray b = cos α · axis + sin α · w/‖w‖.
        let coef = t * cos_a + s * sin_a;
        for ((p, xi), ai) in point.iter_mut().zip(x).zip(axis) {
            let w = if s > 0.0 { (xi - t * ai) / s } else { 0.0 };
            *p = coef * (cos_a * ai + sin_a * w);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn polyhedral_face_dim(
    p: &Polyhedral,
    d: usize,
    point: &[f64],
    normal: &[f64],
    norm_x: f64,
    tol: f64,
    rows: &mut Vec<usize>,
    rank_buf: &mut Vec<f64>,
) -> usize {
    let scale = tol * norm_x.max(1.0);
    if norm(point) <= scale {
        return 0;
    }
    let nn = norm(normal);
    if nn <= scale {
        return p.rank;
    }
    rows.clear();
    for i in 0..p.n {
        if dot(p.generator(i, d), normal).abs() <= tol * nn {
            rows.push(i);
        }
    }
    linalg::rank_of_rows(&p.gens, d, rows, RANK_TOL, rank_buf)
}

/// Projects `x` onto `c` with a throwaway workspace.
pub fn project(c: &Cone, x: &[f64]) -> Result<ProjectionResult> {
    Projector::new(c).project(x)
}

/// Dimension of the face of `c` whose relative interior contains the
/// projection in `result` (which must be `project(c, x)`), with relative
/// tolerance `tol` for the supporting-normal criterion.
pub fn face_dimension(c: &Cone, x: &[f64], result: &ProjectionResult, tol: f64) -> Result<usize> {
    let d = c.dim();
    match c.kind() {
        ConeKind::Polyhedral(p) => Ok(polyhedral_face_dim(
            p,
            d,
            &result.point,
            &result.complement,
            norm(x),
            tol,
            &mut Vec::new(),
            &mut Vec::new(),
        )),
        ConeKind::Subspace(s) => Ok(if norm(&result.point) == 0.0 { 0 } else { s.k }),
        ConeKind::DualOf(inner) => {
            // Swap the Moreau parts: the inner cone's projection is our complement.
            let swapped = ProjectionResult {
                point: result.complement.clone(),
                complement: result.point.clone(),
                ..Default::default()
            };
            Ok(d - face_dimension(inner, x, &swapped, tol)?)
        }
        ConeKind::Circular(_) => Err(ConeError::Unsupported {
            op: "face_dimension",
            reason: "circular cones have no polyhedral skeleton; use the inversion estimator"
                .into(),
        }),
    }
}

/// Checks `Π_C(λx) = λ Π_C(x)` to `1e-8 · max(1, λ‖x‖)`.
pub fn projection_homogeneity_check(c: &Cone, x: &[f64], lambda: f64) -> Result<bool> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(ConeError::OutOfRange(format!(
            "scale {lambda} must be positive"
        )));
    }
    let mut proj = Projector::new(c);
    let a = proj.project(x)?;
    let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
    let b = proj.project(&scaled)?;
    let err = b
        .point
        .iter()
        .zip(&a.point)
        .map(|(u, v)| (u - lambda * v).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(err <= 1e-8 * (lambda * norm(x)).max(1.0))
}

/// Both sides of the projection-stability inequalities for one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// `‖Π_C x − Π_D x‖ ≤ ‖x‖ √(10 δ)`.
    pub euclidean: CheckReport,
    /// `cos d_a(Π_C x, Π_D x) ≥ 1 − c_ε δ` with `c_ε = 2(1/π + tan(π/2 − ε))`.
    pub angular: CheckReport,
}

impl StabilityReport {
    pub fn violated(&self) -> bool {
        self.euclidean.failed() || self.angular.failed()
    }
}

/// Slack allowed on both stability inequalities.
pub const STABILITY_SLACK: f64 = 1e-8;

/// Evaluates the Euclidean and angular projection-stability bounds for
/// cones `c`, `dd` whose angular Hausdorff distance is at most `delta`.
///
/// For the angular bound, `ε` is taken as large as the hypotheses allow,
/// `ε = π/2 − max(δ, d_a(x,C), d_a(x,D))`; if that is not positive the check
/// is recorded as skipped.
pub fn lemma_projection_stability(
    c: &Cone,
    dd: &Cone,
    x: &[f64],
    delta: f64,
) -> Result<StabilityReport> {
    let pc = project(c, x)?;
    let pd = project(dd, x)?;
    let gap = linalg::dist(&pc.point, &pd.point);
    let bound = norm(x) * (10.0 * delta).sqrt();
    let euclidean = CheckReport::at_most("projection distance", gap, bound, STABILITY_SLACK);

    let worst = delta.max(pc.angle()).max(pd.angle());
    let eps = std::f64::consts::FRAC_PI_2 - worst;
    let angular = if eps > 0.0 && pc.norm_sq_point() > 0.0 && pd.norm_sq_point() > 0.0 {
        let c_eps = 2.0 * (1.0 / std::f64::consts::PI + worst.tan());
        let cos_angle = linalg::angle_between(&pc.point, &pd.point).cos();
        let mut r = CheckReport::at_least(
            "projection angle",
            cos_angle,
            1.0 - c_eps * delta,
            STABILITY_SLACK,
        );
        r.details = format!("eps={eps:.6}, c_eps={c_eps:.6}; {}", r.details);
        r
    } else {
        CheckReport::skipped("projection angle", "no eps > 0 satisfies the hypotheses")
    };
    Ok(StabilityReport { euclidean, angular })
}

/// Failure counts of the Moreau invariants over a sample stream.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MoreauSuite {
    pub trials: u64,
    pub additivity: u64,
    pub orthogonality: u64,
    pub membership: u64,
    pub homogeneity: u64,
    pub nonexpansive: u64,
    pub idempotence: u64,
    /// Largest `residual_check` seen.
    pub max_residual: f64,
}

/// Tolerance of the Moreau suite checks.
pub const MOREAU_TOL: f64 = 1e-9;

impl MoreauSuite {
    pub fn failures(&self) -> u64 {
        self.additivity
            + self.orthogonality
            + self.membership
            + self.homogeneity
            + self.nonexpansive
            + self.idempotence
    }

    fn merge(&mut self, o: &MoreauSuite) {
        self.trials += o.trials;
        self.additivity += o.additivity;
        self.orthogonality += o.orthogonality;
        self.membership += o.membership;
        self.homogeneity += o.homogeneity;
        self.nonexpansive += o.nonexpansive;
        self.idempotence += o.idempotence;
        self.max_residual = self.max_residual.max(o.max_residual);
    }
}

/// Checks additivity, orthogonality, membership of both parts, homogeneity
/// (alternating scales 2 and 1e−3), nonexpansiveness against the previous
/// sample, and idempotence on `sampling.n` Gaussian points.
pub fn moreau_suite(c: &Cone, sampling: Sampling) -> Result<MoreauSuite> {
    if c.is_trivial() {
        return Err(ConeError::TrivialCone);
    }
    let d = c.dim();
    let parts = map_chunks(d, sampling, |mut ch| -> Result<MoreauSuite> {
        let mut proj = Projector::new(c);
        let mut s = MoreauSuite::default();
        let mut x = vec![0.0; d];
        let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
        let mut r = ProjectionResult::default();
        let mut q = ProjectionResult::default();
        for i in 0..ch.len {
            ch.fill(&mut x);
            proj.project_into(&x, &mut r)?;
            s.trials += 1;
            let scale = norm(&x).max(1.0);
            let tol = MOREAU_TOL * scale;
            let add = x
                .iter()
                .zip(&r.point)
                .zip(&r.complement)
                .map(|((a, p), c)| (a - p - c).powi(2))
                .sum::<f64>();
            s.additivity += u64::from(add.sqrt() > tol);
            s.orthogonality += u64::from(r.residual_check > MOREAU_TOL);
            s.max_residual = s.max_residual.max(r.residual_check);
            // point ∈ C: re-projection leaves no complement; complement ∈ C°: it projects to o.
            let p = r.point.clone();
            proj.project_into(&p, &mut q)?;
            let in_c = norm(&q.complement) <= tol;
            s.idempotence += u64::from(linalg::dist(&q.point, &p) > tol);
            let comp = r.complement.clone();
            proj.project_into(&comp, &mut q)?;
            let in_polar = norm(&q.point) <= tol;
            s.membership += u64::from(!(in_c && in_polar));
            let lambda = if (ch.start + i as u64).is_multiple_of(2) {
                2.0
            } else {
                1e-3
            };
            let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
            proj.project_into(&scaled, &mut q)?;
            let herr = q
                .point
                .iter()
                .zip(&p)
                .map(|(a, b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt();
            s.homogeneity += u64::from(herr > 1e-8 * (lambda * norm(&x)).max(1.0));
            if let Some((px, pp)) = &prev {
                s.nonexpansive +=
                    u64::from(linalg::dist(&p, pp) > linalg::dist(&x, px) + MOREAU_TOL);
            }
            prev = Some((x.clone(), p));
        }
        Ok(s)
    });
    let mut total = MoreauSuite::default();
    for p in parts {
        total.merge(&p?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{dual, Cone};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn orthant_example() {
        let r = project(&Cone::orthant(2).unwrap(), &[1.0, -1.0]).unwrap();
        assert_eq!(r.point, vec![1.0, 0.0]);
        assert_eq!(r.complement, vec![0.0, -1.0]);
        assert_eq!(r.face_dim, Some(1));
    }

    #[test]
    fn subspace_example() {
        let r = project(&Cone::subspace(3, 1).unwrap(), &[2.0, 3.0, 4.0]).unwrap();
        assert_eq!(r.point, vec![2.0, 0.0, 0.0]);
        assert_eq!(r.complement, vec![0.0, 3.0, 4.0]);
    }

    #[test]
    fn circular_example_matches_boundary_ray_grid() {
        let c = Cone::circular(2, FRAC_PI_4).unwrap();
        let x = [0.0, 1.0];
        let r = project(&c, &x).unwrap();
        assert!((r.point[0] - 0.5).abs() < 1e-15 && (r.point[1] - 0.5).abs() < 1e-15);
        // Oracle: nearest point over a fine grid of points on both boundary rays.
        let mut best = f64::INFINITY;
        for s in [-1.0, 1.0] {
            let dir = [FRAC_PI_4.cos(), s * FRAC_PI_4.sin()];
            for i in 0..=20_000 {
                let t = 2.0 * i as f64 / 20_000.0;
                best = best.min(linalg::dist(&x, &[t * dir[0], t * dir[1]]));
            }
        }
        assert!((linalg::dist(&x, &r.point) - best).abs() < 1e-8);
    }

    #[test]
    fn circular_inside_and_polar() {
        let c = Cone::circular(3, 0.5).unwrap();
        let inside = project(&c, &[1.0, 0.1, 0.1]).unwrap();
        assert_eq!(inside.point, vec![1.0, 0.1, 0.1]);
        let polar = project(&c, &[-1.0, 0.1, 0.0]).unwrap();
        assert_eq!(polar.point, vec![0.0; 3]);
        assert_eq!(polar.face_dim, None);
    }

    #[test]
    fn dual_projection_swaps_parts() {
        let c = Cone::orthant(3).unwrap();
        let r = project(&dual(&c), &[1.0, -2.0, 3.0]).unwrap();
        assert_eq!(r.point, vec![0.0, -2.0, 0.0]);
        assert_eq!(r.face_dim, Some(1));
    }

    #[test]
    fn orthant_face_dimension_examples() {
        let c = Cone::orthant(3).unwrap();
        for (x, k) in [
            ([1.0, -1.0, 2.0], 2),
            ([-1.0, -1.0, -1.0], 0),
            ([1.0, 1.0, 1.0], 3),
        ] {
            let r = project(&c, &x).unwrap();
            assert_eq!(face_dimension(&c, &x, &r, DEFAULT_FACE_TOL).unwrap(), k);
            assert_eq!(r.face_dim, Some(k));
        }
    }

    #[test]
    fn circular_face_dimension_is_unsupported() {
        let c = Cone::circular(3, 0.5).unwrap();
        let x = [0.0, 1.0, 0.0];
        let r = project(&c, &x).unwrap();
        assert!(matches!(
            face_dimension(&c, &x, &r, 1e-8),
            Err(ConeError::Unsupported { .. })
        ));
    }

    #[test]
    fn homogeneity_examples() {
        let c = Cone::orthant(3).unwrap();
        assert!(projection_homogeneity_check(&c, &[0.3, -1.2, 0.7], 2.0).unwrap());
        assert!(projection_homogeneity_check(&c, &[0.3, -1.2, 0.7], 1.0).unwrap());
        let k = Cone::circular(4, 0.3).unwrap();
        assert!(projection_homogeneity_check(&k, &[0.3, -1.2, 0.7, 2.0], 1e-3).unwrap());
    }

    #[test]
    fn non_finite_rejected() {
        let c = Cone::orthant(2).unwrap();
        assert_eq!(
            project(&c, &[f64::NAN, 0.0]).unwrap_err(),
            ConeError::NonFinite
        );
    }

    #[test]
    fn stability_identical_cones() {
        let c = Cone::orthant(3).unwrap();
        let r = lemma_projection_stability(&c, &c, &[1.0, -0.5, 0.2], 0.0).unwrap();
        assert!(r.euclidean.pass && r.euclidean.rhs - r.euclidean.lhs >= 0.0);
        assert!(r.angular.pass && r.angular.lhs == 1.0);
    }

    #[test]
    fn stability_rotated_quadrant() {
        let c = Cone::orthant(2).unwrap();
        let d = c.rotated(0, 1, 0.05).unwrap();
        let r = lemma_projection_stability(&c, &d, &[1.0, 1.0], 0.05).unwrap();
        assert!(r.euclidean.pass);
        assert!((r.euclidean.rhs - 2f64.sqrt() * 0.5f64.sqrt()).abs() < 1e-12);
        assert!(!r.violated());
    }

    #[test]
    fn stability_skips_polar_points() {
        let c = Cone::orthant(2).unwrap();
        let r = lemma_projection_stability(&c, &c, &[-1.0, -1.0], 0.0).unwrap();
        assert!(r.angular.skipped);
    }

    #[test]
    fn moreau_suite_small() {
        use crate::rng::Substream;
        for c in [
            Cone::orthant(4).unwrap(),
            Cone::circular(3, 0.4).unwrap(),
            dual(&Cone::orthant(3).unwrap()),
        ] {
            let s = moreau_suite(&c, Sampling::new(2000, 1, Substream::Points)).unwrap();
            assert_eq!(s.trials, 2000);
            assert_eq!(s.failures(), 0, "{c}: {s:?}");
        }
    }
}
