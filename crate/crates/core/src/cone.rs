//! Closed convex cones and the angular geometry around them.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ConeError, Result};
use crate::linalg::{self, dot, norm};
use crate::projection::{project, Projector};

/// Default relative membership tolerance.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// Generators closer than this (chordal distance after normalization) are merged.
const DEDUP_TOL: f64 = 1e-9;

/// Orthonormality tolerance for user-supplied subspace bases.
const ORTHONORMAL_TOL: f64 = 1e-10;

/// Declarative description of a cone, as read from the command line or a
/// cone file. [`make_cone`] validates it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeSpec {
    /// Nonnegative orthant of `R^dim`.
    Orthant { dim: usize },
    /// `span{e_1, …, e_k}`, or the span of the given rows when `basis` is set.
    Subspace {
        dim: usize,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basis: Option<Vec<Vec<f64>>>,
    },
    /// Circular cone with half-angle `alpha`; axis defaults to `e_1`.
    Circular {
        dim: usize,
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axis: Option<Vec<f64>>,
    },
    /// Conic hull of the given generators.
    Rays {
        dim: usize,
        generators: Vec<Vec<f64>>,
    },
    /// `base` rotated by `theta` in the coordinate plane `(i, j)` (1-based).
    Rotated {
        base: Box<ConeSpec>,
        plane: (usize, usize),
        theta: f64,
    },
    /// Polar cone of `base`.
    Dual { base: Box<ConeSpec> },
}

impl ConeSpec {
    pub fn dim(&self) -> usize {
        match self {
            ConeSpec::Orthant { dim }
            | ConeSpec::Subspace { dim, .. }
            | ConeSpec::Circular { dim, .. }
            | ConeSpec::Rays { dim, .. } => *dim,
            ConeSpec::Rotated { base, .. } | ConeSpec::Dual { base } => base.dim(),
        }
    }
}

/// Polyhedral cone given by unit generators (row-major `n × d`).
#[derive(Debug, Clone)]
pub struct Polyhedral {
    pub(crate) gens: Vec<f64>,
    pub(crate) n: usize,
    pub(crate) rank: usize,
    pub(crate) full_space: bool,
}

impl Polyhedral {
    pub fn generator_count(&self) -> usize {
        self.n
    }

    pub fn generator(&self, i: usize, d: usize) -> &[f64] {
        &self.gens[i * d..(i + 1) * d]
    }

    pub fn generators_flat(&self) -> &[f64] {
        &self.gens
    }

    /// Rank of the generator matrix (the dimension of the linear hull).
    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Linear subspace given by an orthonormal basis (row-major `k × d`).
/// `k = 0` encodes the trivial cone `{o}`.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub(crate) basis: Vec<f64>,
    pub(crate) k: usize,
}

impl Subspace {
    pub fn intrinsic_dim(&self) -> usize {
        self.k
    }

    pub fn basis_vector(&self, i: usize, d: usize) -> &[f64] {
        &self.basis[i * d..(i + 1) * d]
    }
}

/// Circular (ice-cream) cone `{x : ∠(x, axis) ≤ half_angle}`.
#[derive(Debug, Clone)]
pub struct Circular {
    pub(crate) axis: Vec<f64>,
    pub(crate) half_angle: f64,
}

impl Circular {
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }
}

#[derive(Debug, Clone)]
pub enum ConeKind {
    Polyhedral(Polyhedral),
    Subspace(Subspace),
    Circular(Circular),
    /// Polar of a polyhedral cone; queries go through the Moreau decomposition.
    DualOf(Arc<Cone>),
}

/// A validated closed convex cone in `R^d`. Immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct Cone {
    dim: usize,
    kind: ConeKind,
}

impl Cone {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ConeKind {
        &self.kind
    }

    /// Nonnegative orthant.
    pub fn orthant(d: usize) -> Result<Cone> {
        make_cone(&ConeSpec::Orthant { dim: d })
    }

    /// Coordinate subspace `span{e_1, …, e_k}`.
    pub fn subspace(d: usize, k: usize) -> Result<Cone> {
        make_cone(&ConeSpec::Subspace {
            dim: d,
            k,
            basis: None,
        })
    }

    /// Circular cone around `e_1`.
    pub fn circular(d: usize, alpha: f64) -> Result<Cone> {
        make_cone(&ConeSpec::Circular {
            dim: d,
            alpha,
            axis: None,
        })
    }

    pub fn circular_with_axis(axis: &[f64], alpha: f64) -> Result<Cone> {
        make_cone(&ConeSpec::Circular {
            dim: axis.len(),
            alpha,
            axis: Some(axis.to_vec()),
        })
    }

    pub fn rays(generators: &[Vec<f64>]) -> Result<Cone> {
        let dim = generators.first().map(|g| g.len()).unwrap_or(0);
        make_cone(&ConeSpec::Rays {
            dim,
            generators: generators.to_vec(),
        })
    }

    pub fn polyhedral(d: usize, generators: &[Vec<f64>]) -> Result<Cone> {
        let mut flat = Vec::with_capacity(generators.len() * d);
        for (i, g) in generators.iter().enumerate() {
            if g.len() != d {
                return Err(ConeError::InvalidCone(format!(
                    "generator {} has length {}, expected {d}",
                    i + 1,
                    g.len()
                )));
            }
            if !linalg::all_finite(g) {
                return Err(ConeError::NonFinite);
            }
            let Some(u) = linalg::normalized(g) else {
                return Err(ConeError::InvalidCone(format!(
                    "generator {} is zero",
                    i + 1
                )));
            };
            let dup = (0..flat.len() / d)
                .any(|j| linalg::dist(&flat[j * d..(j + 1) * d], &u) < DEDUP_TOL);
            if !dup {
                flat.extend_from_slice(&u);
            }
        }
        if flat.is_empty() {
            return Err(ConeError::InvalidCone("no generators".into()));
        }
        Ok(Self::polyhedral_from_unit(d, flat))
    }

    fn polyhedral_from_unit(d: usize, gens: Vec<f64>) -> Cone {
        let n = gens.len() / d;
        let mut buf = Vec::new();
        let rank = linalg::rank_of_rows(&gens, d, &(0..n).collect::<Vec<_>>(), 1e-10, &mut buf);
        let mut p = Polyhedral {
            gens,
            n,
            rank,
            full_space: false,
        };
        if rank == d {
            // Full space iff ±e_i all lie in the cone.
            let probe = Cone {
                dim: d,
                kind: ConeKind::Polyhedral(p.clone()),
            };
            let mut proj = Projector::new(&probe);
            let mut e = vec![0.0; d];
            let mut full = true;
            'outer: for i in 0..d {
                for s in [1.0, -1.0] {
                    e.iter_mut().for_each(|v| *v = 0.0);
                    e[i] = s;
                    match proj.project(&e) {
                        Ok(r) if linalg::norm(&r.complement) <= 1e-9 => {}
                        _ => {
                            full = false;
                            break 'outer;
                        }
                    }
                }
            }
            p.full_space = full;
        }
        Cone {
            dim: d,
            kind: ConeKind::Polyhedral(p),
        }
    }

    /// Subspace spanned by the (orthonormal) rows of `basis`.
    pub fn subspace_from_basis(d: usize, basis: &[Vec<f64>]) -> Result<Cone> {
        let k = basis.len();
        if k > d {
            return Err(ConeError::InvalidCone(format!(
                "subspace dimension {k} exceeds ambient {d}"
            )));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.len() != d {
                return Err(ConeError::DimensionMismatch {
                    expected: d,
                    got: b.len(),
                });
            }
            if !linalg::all_finite(b) {
                return Err(ConeError::NonFinite);
            }
            for (j, c) in basis.iter().enumerate().take(i + 1) {
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot(b, c) - target).abs() > ORTHONORMAL_TOL {
                    return Err(ConeError::InvalidCone(format!(
                        "subspace basis is not orthonormal (rows {} and {})",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(Cone {
            dim: d,
            kind: ConeKind::Subspace(Subspace {
                basis: basis.concat(),
                k,
            }),
        })
    }

    /// True for `{o}`.
    pub fn is_trivial(&self) -> bool {
        matches!(&self.kind, ConeKind::Subspace(s) if s.k == 0)
    }

    /// True for `R^d`.
    pub fn is_full_space(&self) -> bool {
        match &self.kind {
            ConeKind::Polyhedral(p) => p.full_space,
            ConeKind::Subspace(s) => s.k == self.dim,
            ConeKind::Circular(_) => false,
            ConeKind::DualOf(c) => c.is_trivial(),
        }
    }

    /// Polyhedral cones, their duals and subspaces have a face lattice;
    /// circular cones do not.
    pub fn is_polyhedral(&self) -> bool {
        match &self.kind {
            ConeKind::Polyhedral(_) | ConeKind::Subspace(_) => true,
            ConeKind::Circular(_) => false,
            ConeKind::DualOf(c) => c.is_polyhedral(),
        }
    }

    /// Applies the Givens rotation by `theta` in coordinates `(i, j)` (0-based).
    pub fn rotated(&self, i: usize, j: usize, theta: f64) -> Result<Cone> {
        let d = self.dim;
        if i >= d || j >= d || i == j {
            return Err(ConeError::InvalidCone(format!(
                "rotation plane ({}, {}) invalid in dimension {d}",
                i + 1,
                j + 1
            )));
        }
        if !theta.is_finite() {
            return Err(ConeError::NonFinite);
        }
        let rot_rows = |flat: &[f64]| -> Vec<f64> {
            let mut out = flat.to_vec();
            for row in out.chunks_mut(d) {
                linalg::givens(row, i, j, theta);
            }
            out
        };
        let kind = match &self.kind {
            ConeKind::Polyhedral(p) => {
                let gens = rot_rows(&p.gens);
                // Rotations preserve rank and the full-space property.
                ConeKind::Polyhedral(Polyhedral {
                    gens,
                    n: p.n,
                    rank: p.rank,
                    full_space: p.full_space,
                })
            }
            ConeKind::Subspace(s) => ConeKind::Subspace(Subspace {
                basis: rot_rows(&s.basis),
                k: s.k,
            }),
            ConeKind::Circular(c) => ConeKind::Circular(Circular {
                axis: rot_rows(&c.axis),
                half_angle: c.half_angle,
            }),
            ConeKind::DualOf(c) => ConeKind::DualOf(Arc::new(c.rotated(i, j, theta)?)),
        };
        Ok(Cone { dim: d, kind })
    }

    /// Stable SHA-256 fingerprint of the validated representation.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        self.feed_hash(&mut h);
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn feed_hash(&self, h: &mut Sha256) {
        h.update((self.dim as u64).to_le_bytes());
        let floats = |h: &mut Sha256, v: &[f64]| {
            for x in v {
                h.update(x.to_bits().to_le_bytes());
            }
        };
        match &self.kind {
            ConeKind::Polyhedral(p) => {
                h.update(b"P");
                floats(h, &p.gens);
            }
            ConeKind::Subspace(s) => {
                h.update(b"S");
                h.update((s.k as u64).to_le_bytes());
                floats(h, &s.basis);
            }
            ConeKind::Circular(c) => {
                h.update(b"C");
                floats(h, &c.axis);
                floats(h, &[c.half_angle]);
            }
            ConeKind::DualOf(c) => {
                h.update(b"D");
                c.feed_hash(h);
            }
        }
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ConeKind::Polyhedral(p) => write!(f, "polyhedral(d={}, n={})", self.dim, p.n),
            ConeKind::Subspace(s) => write!(f, "subspace(d={}, k={})", self.dim, s.k),
            ConeKind::Circular(c) => write!(f, "circular(d={}, alpha={})", self.dim, c.half_angle),
            ConeKind::DualOf(c) => write!(f, "dual({c})"),
        }
    }
}

/// Validates a [`ConeSpec`] into a [`Cone`].
pub fn make_cone(spec: &ConeSpec) -> Result<Cone> {
    match spec {
        ConeSpec::Orthant { dim } => {
            check_dim(*dim)?;
            let d = *dim;
            let gens: Vec<Vec<f64>> = (0..d)
                .map(|i| {
                    let mut e = vec![0.0; d];
                    e[i] = 1.0;
                    e
                })
                .collect();
            Cone::polyhedral(d, &gens)
        }
        ConeSpec::Subspace { dim, k, basis } => {
            check_dim(*dim)?;
            if *k > *dim {
                return Err(ConeError::InvalidCone(format!(
                    "subspace dimension {k} exceeds ambient {dim}"
                )));
            }
            if *k == 0 {
                return Err(ConeError::TrivialCone);
            }
            match basis {
                Some(b) => {
                    if b.len() != *k {
                        return Err(ConeError::InvalidCone(format!(
                            "subspace declares k={k} but lists {} basis vectors",
                            b.len()
                        )));
                    }
                    Cone::subspace_from_basis(*dim, b)
                }
                None => {
                    let b: Vec<Vec<f64>> = (0..*k)
                        .map(|i| {
                            let mut e = vec![0.0; *dim];
                            e[i] = 1.0;
                            e
                        })
                        .collect();
                    Cone::subspace_from_basis(*dim, &b)
                }
            }
        }
        ConeSpec::Circular { dim, alpha, axis } => {
            check_dim(*dim)?;
            if !alpha.is_finite() {
                return Err(ConeError::NonFinite);
            }
            if !(*alpha > 0.0 && *alpha < FRAC_PI_2) {
                return Err(ConeError::InvalidCone(format!(
                    "half-angle {alpha} outside (0, pi/2)"
                )));
            }
            let axis = match axis {
                Some(a) => {
                    if a.len() != *dim {
                        return Err(ConeError::DimensionMismatch {
                            expected: *dim,
                            got: a.len(),
                        });
                    }
                    if !linalg::all_finite(a) {
                        return Err(ConeError::NonFinite);
                    }
                    linalg::normalized(a)
                        .ok_or_else(|| ConeError::InvalidCone("zero axis".into()))?
                }
                None => {
                    let mut e = vec![0.0; *dim];
                    e[0] = 1.0;
                    e
                }
            };
            Ok(Cone {
                dim: *dim,
                kind: ConeKind::Circular(Circular {
                    axis,
                    half_angle: *alpha,
                }),
            })
        }
        ConeSpec::Rays { dim, generators } => {
            check_dim(*dim)?;
            Cone::polyhedral(*dim, generators)
        }
        ConeSpec::Rotated { base, plane, theta } => {
            let c = make_cone(base)?;
            let (i, j) = *plane;
            if i == 0 || j == 0 {
                return Err(ConeError::InvalidCone(
                    "rotation plane indices are 1-based".into(),
                ));
            }
            c.rotated(i - 1, j - 1, *theta)
        }
        ConeSpec::Dual { base } => {
            let c = make_cone(base)?;
            if c.is_full_space() {
                return Err(ConeError::TrivialCone);
            }
            Ok(dual(&c))
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(ConeError::InvalidCone(format!(
            "ambient dimension must be at least 2, got {d}"
        )));
    }
    Ok(())
}

/// Polar cone `C° = {x : ⟨x, y⟩ ≤ 0 for all y ∈ C}`.
///
/// Subspaces map to their orthogonal complements and circular cones to the
/// circular cone around the opposite axis; the double dual collapses.
pub fn dual(c: &Cone) -> Cone {
    let d = c.dim;
    match &c.kind {
        ConeKind::DualOf(inner) => (**inner).clone(),
        ConeKind::Subspace(s) => {
            let basis = orthogonal_complement(&s.basis, s.k, d);
            Cone {
                dim: d,
                kind: ConeKind::Subspace(Subspace { k: d - s.k, basis }),
            }
        }
        ConeKind::Circular(circ) => Cone {
            dim: d,
            kind: ConeKind::Circular(Circular {
                axis: circ.axis.iter().map(|v| -v).collect(),
                half_angle: FRAC_PI_2 - circ.half_angle,
            }),
        },
        ConeKind::Polyhedral(p) if p.full_space => Cone {
            dim: d,
            kind: ConeKind::Subspace(Subspace {
                k: 0,
                basis: Vec::new(),
            }),
        },
        ConeKind::Polyhedral(_) => Cone {
            dim: d,
            kind: ConeKind::DualOf(Arc::new(c.clone())),
        },
    }
}

/// Orthonormal basis of the complement of the span of `k` orthonormal rows.
fn orthogonal_complement(basis: &[f64], k: usize, d: usize) -> Vec<f64> {
    let mut acc: Vec<f64> = basis.to_vec();
    let mut out = Vec::with_capacity((d - k) * d);
    let mut used = vec![false; d];
    for _ in 0..(d - k) {
        // Pick the coordinate vector with the largest residual.
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for i in (0..d).filter(|&i| !used[i]) {
            let mut r = vec![0.0; d];
            r[i] = 1.0;
            for _ in 0..2 {
                for row in acc.chunks(d) {
                    let c = dot(&r, row);
                    r.iter_mut().zip(row).for_each(|(a, b)| *a -= c * b);
                }
            }
            let n = norm(&r);
            if best.as_ref().is_none_or(|b| n > b.2) {
                best = Some((i, r, n));
            }
        }
        let (i, r, n) = best.expect("complement has remaining dimension");
        used[i] = true;
        let u: Vec<f64> = r.iter().map(|v| v / n).collect();
        acc.extend_from_slice(&u);
        out.extend_from_slice(&u);
    }
    out
}

/// Membership test `dist(x, C) ≤ tol · max(1, ‖x‖)`.
pub fn contains(c: &Cone, x: &[f64], tol: f64) -> Result<bool> {
    let r = project(c, x)?;
    Ok(norm(&r.complement) <= tol * norm(x).max(1.0))
}

/// Angular distance `d_a(x, C) = arccos(‖Π_C x‖ / ‖x‖) ∈ [0, π/2]`,
/// with `d_a(o, C) = π/2`.
pub fn angular_distance(x: &[f64], c: &Cone) -> Result<f64> {
    if c.is_trivial() {
        return Err(ConeError::TrivialCone);
    }
    let r = project(c, x)?;
    Ok(angle_from_parts(&r.point, &r.complement))
}

/// Angular distance from the Moreau parts of `x`. Because the parts are
/// orthogonal, `atan2(‖q‖, ‖p‖)` equals `arccos(‖p‖/‖x‖)` and keeps full
/// relative accuracy near 0.
pub fn angle_from_parts(point: &[f64], complement: &[f64]) -> f64 {
    let p = norm(point);
    let q = norm(complement);
    if p == 0.0 {
        return FRAC_PI_2;
    }
    q.atan2(p).clamp(0.0, FRAC_PI_2)
}

/// `x ∈ C^a_λ`, i.e. `d_a(x, C) ≤ λ`, for `0 ≤ λ < π/2`.
pub fn in_angular_parallel_set(c: &Cone, lambda: f64, x: &[f64]) -> Result<bool> {
    check_lambda(lambda)?;
    Ok(angular_distance(x, c)? <= lambda)
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && (0.0..FRAC_PI_2).contains(&lambda)) {
        return Err(ConeError::OutOfRange(format!(
            "lambda = {lambda} must lie in [0, pi/2)"
        )));
    }
    Ok(())
}
