//! Angular Hausdorff distance `δ_a(C, D)`: the larger of the two directed
//! deviations `sup_{u ∈ C ∩ S} d_a(u, D)`.
//!
//! Tiers: candidate rays (generators, axes), multistart projected ascent, and
//! for `d ≤ 3` a certified subdivision of the sphere giving a two-sided bracket.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{Certificate, DistanceMethod, DistanceReport};
use crate::cone::{dual, Cone, ConeKind};
use crate::error::{ConeError, Result};
use crate::linalg::{self, dot, norm};
use crate::projection::{ProjectionResult, Projector};
use crate::report::CheckReport;
use crate::rng::{gaussian_stream, Substream};

/// Agreement tolerance used for uncertified estimates.
const ASCENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HausdorffOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Run the certified subdivision (only for `d ≤ 3`).
    pub certify: bool,
    /// Target bracket width of the certified mode, in radians.
    pub pitch: f64,
}

impl Default for HausdorffOptions {
    fn default() -> Self {
        HausdorffOptions {
            starts: 32,
            seed: 0,
            max_iters: 200,
            certify: false,
            pitch: 1e-3,
        }
    }
}

/// Angle of `x` from the cone behind `proj`, with the scratch result.
fn angle_to(proj: &mut Projector<'_>, x: &[f64], r: &mut ProjectionResult) -> Result<f64> {
    proj.project_into(x, r)?;
    Ok(r.angle())
}

/// Rays of `c` worth testing first.
fn candidate_rays(c: &Cone) -> Vec<Vec<f64>> {
    let d = c.dim();
    match c.kind() {
        ConeKind::Polyhedral(p) => (0..p.generator_count())
            .map(|i| p.generator(i, d).to_vec())
            .collect(),
        ConeKind::Subspace(s) => (0..s.intrinsic_dim())
            .flat_map(|i| {
                let b = s.basis_vector(i, d).to_vec();
                let nb: Vec<f64> = b.iter().map(|v| -v).collect();
                [b, nb]
            })
            .collect(),
        ConeKind::Circular(k) => {
            let a = k.axis();
            let (s, co) = k.half_angle().sin_cos();
            let mut out = vec![a.to_vec()];
            for i in 0..d {
                // Boundary rays towards ±e_i, when e_i is not parallel to the axis.
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                let t = dot(&e, a);
                let w: Vec<f64> = e.iter().zip(a).map(|(ei, ai)| ei - t * ai).collect();
                if let Some(w) = linalg::normalized(&w) {
                    for sg in [1.0, -1.0] {
                        out.push(
                            a.iter()
                                .zip(&w)
                                .map(|(ai, wi)| co * ai + sg * s * wi)
                                .collect(),
                        );
                    }
                }
            }
            out
        }
        ConeKind::DualOf(_) => Vec::new(),
    }
}

struct Best {
    value: f64,
    ray: Vec<f64>,
    method: DistanceMethod,
}

/// Projected ascent of `d_a(·, D)` over `C ∩ S` from the unit vector `u ∈ C`.
fn ascend(
    pc: &mut Projector<'_>,
    pd: &mut Projector<'_>,
    mut u: Vec<f64>,
    max_iters: usize,
    rc: &mut ProjectionResult,
    rd: &mut ProjectionResult,
) -> Result<(f64, Vec<f64>, usize)> {
    let mut val = angle_to(pd, &u, rd)?;
    let mut step = 1.0;
    let mut iters = 0;
    let mut trial = vec![0.0; u.len()];
    while iters < max_iters && step > 1e-10 {
        iters += 1;
        let g = rd.complement.clone();
        if norm(&g) == 0.0 {
            break;
        }
        for ((t, ui), gi) in trial.iter_mut().zip(&u).zip(&g) {
            *t = ui + step * gi;
        }
        pc.project_into(&trial, rc)?;
        let Some(w) = linalg::normalized(&rc.point) else {
            step *= 0.5;
            continue;
        };
        let v = angle_to(pd, &w, rd)?;
        if v > val + 1e-15 {
            val = v;
            u = w;
            step = (step * 2.0).min(4.0);
        } else {
            // Restore the projection data of the current point.
            angle_to(pd, &u, rd)?;
            step *= 0.5;
        }
    }
    Ok((val, u, iters))
}

/// `sup_{u ∈ C ∩ S} d_a(u, D)` with the tier that produced it; certified
/// bracket when requested and `d ≤ 3`.
pub fn directed_angular_deviation(
    c: &Cone,
    dd: &Cone,
    opts: &HausdorffOptions,
) -> Result<DistanceReport> {
    if c.is_trivial() || dd.is_trivial() {
        return Err(ConeError::TrivialCone);
    }
    if c.dim() != dd.dim() {
        return Err(ConeError::DimensionMismatch {
            expected: c.dim(),
            got: dd.dim(),
        });
    }
    let d = c.dim();
    let mut pc = Projector::new(c);
    let mut pd = Projector::new(dd);
    let mut rc = ProjectionResult::default();
    let mut rd = ProjectionResult::default();
    let mut best = Best {
        value: f64::NEG_INFINITY,
        ray: vec![0.0; d],
        method: DistanceMethod::Generators,
    };
    let mut iterations = 0;

    let rays = candidate_rays(c);
    for r in &rays {
        let u = linalg::normalized(r).expect("candidate rays are nonzero");
        let v = angle_to(&mut pd, &u, &mut rd)?;
        if v > best.value {
            best = Best {
                value: v,
                ray: u,
                method: DistanceMethod::Generators,
            };
        }
    }
    let mut starts: Vec<Vec<f64>> = rays.iter().filter_map(|r| linalg::normalized(r)).collect();
    let mut stream = gaussian_stream(d, opts.seed, Substream::Ascent.id());
    let mut g = vec![0.0; d];
    let mut drawn = 0;
    while drawn < opts.starts && drawn < 100 * opts.starts.max(1) {
        stream.fill(&mut g);
        pc.project_into(&g, &mut rc)?;
        if let Some(u) = linalg::normalized(&rc.point) {
            starts.push(u);
        }
        drawn += 1;
    }
    for s in starts {
        let (v, u, it) = ascend(&mut pc, &mut pd, s, opts.max_iters, &mut rc, &mut rd)?;
        iterations += it;
        if v > best.value + 1e-15 {
            best = Best {
                value: v,
                ray: u,
                method: DistanceMethod::Ascent,
            };
        }
    }
    let mut upper = best.value;
    if opts.certify && d <= 3 {
        let (lo, hi, ray, cells) = certify(&mut pc, &mut pd, d, opts.pitch, best.value)?;
        iterations += cells;
        if lo > best.value {
            best = Best {
                value: lo,
                ray,
                method: DistanceMethod::CertifiedGrid,
            };
        } else if best.method != DistanceMethod::CertifiedGrid {
            best.method = DistanceMethod::CertifiedGrid;
        }
        upper = hi.max(best.value);
    }
    Ok(DistanceReport {
        value: best.value,
        method: best.method,
        certificate: Some(Certificate::Ray {
            ray: best.ray,
            from_first: true,
        }),
        iterations,
        gap: upper - best.value,
        lower: best.value,
        upper,
    })
}

#[derive(Clone, Copy)]
enum Cell {
    Arc {
        a: f64,
        b: f64,
    },
    Face {
        face: usize,
        s0: f64,
        s1: f64,
        t0: f64,
        t1: f64,
    },
}

const FACES: [([f64; 3], [f64; 3], [f64; 3]); 6] = [
    ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
    ([-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
    ([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
    ([0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
    ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
    ([0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
];

fn face_point(face: usize, s: f64, t: f64) -> Vec<f64> {
    let (n, e1, e2) = FACES[face];
    let v: Vec<f64> = (0..3).map(|i| n[i] + s * e1[i] + t * e2[i]).collect();
    linalg::normalized(&v).expect("face points are nonzero")
}

impl Cell {
    /// Center direction and angular radius.
    fn geometry(&self) -> (Vec<f64>, f64) {
        match *self {
            Cell::Arc { a, b } => {
                let m = 0.5 * (a + b);
                (vec![m.cos(), m.sin()], 0.5 * (b - a))
            }
            Cell::Face {
                face,
                s0,
                s1,
                t0,
                t1,
            } => {
                let c = face_point(face, 0.5 * (s0 + s1), 0.5 * (t0 + t1));
                // The cell is geodesically convex, so its farthest point from
                // the center is a corner.
                let r = [(s0, t0), (s0, t1), (s1, t0), (s1, t1)]
                    .iter()
                    .map(|&(s, t)| linalg::angle_between(&c, &face_point(face, s, t)))
                    .fold(0.0, f64::max);
                (c, r)
            }
        }
    }

    /// Corners of the planar polygon whose central projection is the cell,
    /// and the smallest norm on that polygon.
    fn chord_polygon(&self) -> (Vec<Vec<f64>>, f64) {
        match *self {
            Cell::Arc { a, b } => (
                vec![vec![a.cos(), a.sin()], vec![b.cos(), b.sin()]],
                (0.5 * (b - a)).cos(),
            ),
            Cell::Face {
                face,
                s0,
                s1,
                t0,
                t1,
            } => {
                let (n, e1, e2) = FACES[face];
                let corners = [(s0, t0), (s0, t1), (s1, t0), (s1, t1)]
                    .iter()
                    .map(|&(s, t)| (0..3).map(|i| n[i] + s * e1[i] + t * e2[i]).collect())
                    .collect();
                let (sc, tc) = (0f64.clamp(s0, s1), 0f64.clamp(t0, t1));
                (corners, (1.0 + sc * sc + tc * tc).sqrt())
            }
        }
    }

    fn split(&self, out: &mut Vec<Cell>) {
        match *self {
            Cell::Arc { a, b } => {
                let m = 0.5 * (a + b);
                out.push(Cell::Arc { a: m, b });
                out.push(Cell::Arc { a, b: m });
            }
            Cell::Face {
                face,
                s0,
                s1,
                t0,
                t1,
            } => {
                let (sm, tm) = (0.5 * (s0 + s1), 0.5 * (t0 + t1));
                out.push(Cell::Face {
                    face,
                    s0: sm,
                    s1,
                    t0: tm,
                    t1,
                });
                out.push(Cell::Face {
                    face,
                    s0,
                    s1: sm,
                    t0: tm,
                    t1,
                });
                out.push(Cell::Face {
                    face,
                    s0: sm,
                    s1,
                    t0,
                    t1: tm,
                });
                out.push(Cell::Face {
                    face,
                    s0,
                    s1: sm,
                    t0,
                    t1: tm,
                });
            }
        }
    }
}

/// Branch and bound over sphere cells. Returns `(lower, upper, argmax, cells)`.
fn certify(
    pc: &mut Projector<'_>,
    pd: &mut Projector<'_>,
    d: usize,
    pitch: f64,
    start_lower: f64,
) -> Result<(f64, f64, Vec<f64>, usize)> {
    let mut stack: Vec<Cell> = if d == 2 {
        (0..8)
            .rev()
            .map(|i| Cell::Arc {
                a: i as f64 * PI / 4.0,
                b: (i + 1) as f64 * PI / 4.0,
            })
            .collect()
    } else {
        (0..6)
            .rev()
            .map(|face| Cell::Face {
                face,
                s0: -1.0,
                s1: 1.0,
                t0: -1.0,
                t1: 1.0,
            })
            .collect()
    };
    let mut lower = start_lower;
    let mut argmax = vec![0.0; d];
    let mut upper = f64::NEG_INFINITY;
    let mut rc = ProjectionResult::default();
    let mut rd = ProjectionResult::default();
    let mut cells = 0;
    while let Some(cell) = stack.pop() {
        cells += 1;
        let (center, r) = cell.geometry();
        let to_c = angle_to(pc, &center, &mut rc)?;
        if to_c > r {
            continue;
        }
        if let Some(p) = linalg::normalized(&rc.point) {
            let v = angle_to(pd, &p, &mut rd)?;
            if v > lower {
                lower = v;
                argmax = p;
            }
        }
        // Lipschitz bound, and the convexity bound: ‖Π_{D°}·‖ is convex and
        // homogeneous, so on the chord polygon it is at most its corner maximum.
        let lip = (angle_to(pd, &center, &mut rd)? + r).min(FRAC_PI_2);
        let (corners, min_norm) = cell.chord_polygon();
        let mut worst: f64 = 0.0;
        for q in &corners {
            pd.project_into(q, &mut rd)?;
            worst = worst.max(norm(&rd.complement));
        }
        let ub = lip.min((worst / min_norm).min(1.0).asin());
        if ub <= lower + pitch || r <= 0.5 * pitch {
            upper = upper.max(ub);
        } else {
            cell.split(&mut stack);
        }
    }
    Ok((lower, upper.max(lower), argmax, cells))
}

/// `δ_a(C, D) = max(sup_{C ∩ S} d_a(·, D), sup_{D ∩ S} d_a(·, C))`.
pub fn angular_hausdorff(c: &Cone, dd: &Cone, opts: &HausdorffOptions) -> Result<DistanceReport> {
    let ab = directed_angular_deviation(c, dd, opts)?;
    let ba = directed_angular_deviation(dd, c, opts)?;
    let upper = ab.upper.max(ba.upper);
    let (mut best, from_first) = if ab.value >= ba.value {
        (ab.clone(), true)
    } else {
        (ba.clone(), false)
    };
    if let Some(Certificate::Ray { from_first: f, .. }) = best.certificate.as_mut() {
        *f = from_first;
    }
    best.iterations = ab.iterations + ba.iterations;
    best.upper = upper;
    best.gap = upper - best.value;
    Ok(best)
}

/// Compares `δ_a(C, D)` with `δ_a(C°, D°)`. Skipped unless `δ_a(C, D) < π/2`
/// and neither cone is the whole space.
pub fn polarity_isometry_check(
    c: &Cone,
    dd: &Cone,
    opts: &HausdorffOptions,
) -> Result<CheckReport> {
    let name = format!("polarity {c} vs {dd}");
    if c.is_full_space() || dd.is_full_space() {
        return Ok(CheckReport::skipped(name, "a cone is the whole space"));
    }
    let a = angular_hausdorff(c, dd, opts)?;
    if a.lower >= FRAC_PI_2 {
        return Ok(CheckReport::skipped(name, "distance is not below pi/2"));
    }
    let b = angular_hausdorff(&dual(c), &dual(dd), opts)?;
    let certified =
        a.method == DistanceMethod::CertifiedGrid && b.method == DistanceMethod::CertifiedGrid;
    let width = if certified {
        a.gap.max(b.gap)
    } else {
        ASCENT_TOL
    };
    let tol = 2.0 * width + 1e-12;
    let mut r = CheckReport::deterministic(name, a.value, b.value, tol);
    r.details = format!(
        "{}; brackets [{:.6}, {:.6}] and [{:.6}, {:.6}]",
        r.details, a.lower, a.upper, b.lower, b.upper
    );
    Ok(r)
}
