//! Bounded-Lipschitz distance between empirical biconic measures.
//!
//! Atoms live on `S^{d−1} × S^{d−1} ⊂ R^{2d}`. The distance is computed from
//! the transportation dual of the bounded-Lipschitz LP: mass of the signed
//! difference `μ − ν` is either moved at Euclidean cost or dropped at cost 1.

use std::cmp::Ordering;

use super::{Certificate, DistanceMethod, DistanceReport};
use crate::error::{ConeError, Result};
use crate::linalg::dist;
use crate::lp::{simplex, Column};
use crate::measures::EmpiricalConicMeasure;
use crate::report::CheckReport;

/// Largest merged support solved exactly by default.
pub const EXACT_LIMIT: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DblOptions {
    /// Supports up to this size use the exact LP.
    pub exact_limit: usize,
    /// Landmarks used by the approximate mode.
    pub landmarks: usize,
}

impl Default for DblOptions {
    fn default() -> Self {
        DblOptions {
            exact_limit: EXACT_LIMIT,
            landmarks: 200,
        }
    }
}

/// Merged support with signed masses, in canonical order and orientation.
struct Support {
    points: Vec<Vec<f64>>,
    delta: Vec<f64>,
}

fn cmp_points(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn merge(mu: &EmpiricalConicMeasure, nu: &EmpiricalConicMeasure) -> Support {
    let mut entries: Vec<(Vec<f64>, bool, f64)> =
        Vec::with_capacity(mu.atoms.len() + nu.atoms.len());
    for (m, from_mu) in [(mu, true), (nu, false)] {
        for a in &m.atoms {
            let mut p = a.u.clone();
            p.extend_from_slice(&a.v);
            entries.push((p, from_mu, a.w));
        }
    }
    entries.sort_by(|a, b| {
        cmp_points(&a.0, &b.0)
            .then(b.1.cmp(&a.1))
            .then(a.2.total_cmp(&b.2))
    });
    let mut points = Vec::new();
    let mut delta = Vec::new();
    let mut i = 0;
    while i < entries.len() {
        let mut j = i;
        let (mut ms, mut ns) = (0.0, 0.0);
        while j < entries.len() && cmp_points(&entries[j].0, &entries[i].0).is_eq() {
            if entries[j].1 {
                ms += entries[j].2;
            } else {
                ns += entries[j].2;
            }
            j += 1;
        }
        let dl = ms - ns;
        if dl != 0.0 {
            points.push(std::mem::take(&mut entries[i].0));
            delta.push(dl);
        }
        i = j;
    }
    // Orientation: the LP value is invariant under δ ↦ −δ, so fix the sign.
    if delta.first().is_some_and(|&x| x < 0.0) {
        delta.iter_mut().for_each(|x| *x = -*x);
    }
    Support { points, delta }
}

struct LpOutcome {
    primal: f64,
    dual: f64,
    f: Vec<f64>,
    iterations: usize,
}

/// Exact bounded-Lipschitz LP on a merged support.
fn solve_exact(points: &[Vec<f64>], delta: &[f64]) -> Result<LpOutcome> {
    let src: Vec<usize> = (0..delta.len()).filter(|&i| delta[i] > 0.0).collect();
    let snk: Vec<usize> = (0..delta.len()).filter(|&i| delta[i] < 0.0).collect();
    let (np, nq) = (src.len(), snk.len());
    let m = np + nq;
    let mut f = vec![0.0; delta.len()];
    if m == 0 {
        return Ok(LpOutcome {
            primal: 0.0,
            dual: 0.0,
            f,
            iterations: 0,
        });
    }
    let cost = |p: usize, q: usize| dist(&points[src[p]], &points[snk[q]]);
    let mut cols = Vec::with_capacity(np * nq + m);
    for p in 0..np {
        for q in 0..nq {
            cols.push(Column {
                cost: cost(p, q),
                entries: vec![(p, 1.0), (np + q, 1.0)],
            });
        }
    }
    for r in 0..m {
        cols.push(Column {
            cost: 1.0,
            entries: vec![(r, 1.0)],
        });
    }
    let b: Vec<f64> = src.iter().chain(&snk).map(|&i| delta[i].abs()).collect();
    let basis: Vec<usize> = (np * nq..np * nq + m).collect();
    let sol = simplex(&cols, &b, &basis, 1_000_000)?;

    // Dual function, then c-transform repair so every constraint holds exactly.
    let mut fq: Vec<f64> = (0..nq).map(|q| -sol.y[np + q]).collect();
    let mut fp = vec![0.0; np];
    for (p, v) in fp.iter_mut().enumerate() {
        *v = fq
            .iter()
            .enumerate()
            .map(|(q, &g)| g + cost(p, q))
            .fold(1.0, f64::min);
    }
    for (q, v) in fq.iter_mut().enumerate() {
        *v = fp
            .iter()
            .enumerate()
            .map(|(p, &g)| g - cost(p, q))
            .fold(-1.0, f64::max);
    }
    for (p, &i) in src.iter().enumerate() {
        f[i] = fp[p];
    }
    for (q, &i) in snk.iter().enumerate() {
        f[i] = fq[q];
    }
    let dual = delta.iter().zip(&f).map(|(a, b)| a * b).sum();
    Ok(LpOutcome {
        primal: sol.objective,
        dual,
        f,
        iterations: sol.iterations,
    })
}

/// `d_bL(μ, ν)` with default options.
pub fn dbl_distance(
    mu: &EmpiricalConicMeasure,
    nu: &EmpiricalConicMeasure,
) -> Result<DistanceReport> {
    dbl_distance_with(mu, nu, DblOptions::default())
}

pub fn dbl_distance_with(
    mu: &EmpiricalConicMeasure,
    nu: &EmpiricalConicMeasure,
    opts: DblOptions,
) -> Result<DistanceReport> {
    if mu.d != nu.d {
        return Err(ConeError::DimensionMismatch {
            expected: mu.d,
            got: nu.d,
        });
    }
    let s = merge(mu, nu);
    if s.points.len() <= opts.exact_limit {
        let lp = solve_exact(&s.points, &s.delta)?;
        return Ok(DistanceReport {
            value: lp.primal,
            method: DistanceMethod::ExactLp,
            gap: (lp.primal - lp.dual).max(0.0),
            lower: lp.dual,
            upper: lp.primal,
            iterations: lp.iterations,
            certificate: Some(Certificate::Lp {
                points: s.points,
                delta: s.delta,
                f: lp.f,
            }),
        });
    }
    approximate(mu, nu, &s, opts)
}

/// Bracket for large supports: aggregate onto farthest-point landmarks, solve
/// the small LP exactly, extend its optimal function to the full support for
/// a lower bound, and bound from above by the aggregation error and by the
/// sample-id coupling.
fn approximate(
    mu: &EmpiricalConicMeasure,
    nu: &EmpiricalConicMeasure,
    s: &Support,
    opts: DblOptions,
) -> Result<DistanceReport> {
    let n = s.points.len();
    let l_count = opts.landmarks.clamp(1, n);
    let first = (0..n).fold(0, |best, i| {
        if s.delta[i].abs() > s.delta[best].abs() {
            i
        } else {
            best
        }
    });
    let mut landmarks = vec![first];
    let mut near: Vec<f64> = s.points.iter().map(|p| dist(p, &s.points[first])).collect();
    let mut owner = vec![0usize; n];
    while landmarks.len() < l_count {
        let next = (0..n).fold(0, |best, i| if near[i] > near[best] { i } else { best });
        if near[next] == 0.0 {
            break;
        }
        let li = landmarks.len();
        landmarks.push(next);
        for i in 0..n {
            let dd = dist(&s.points[i], &s.points[next]);
            if dd < near[i] {
                near[i] = dd;
                owner[i] = li;
            }
        }
    }
    let mut agg = vec![0.0; landmarks.len()];
    let mut disp = 0.0;
    for i in 0..n {
        agg[owner[i]] += s.delta[i];
        disp += s.delta[i].abs() * near[i].min(2.0);
    }
    let lpts: Vec<Vec<f64>> = landmarks.iter().map(|&i| s.points[i].clone()).collect();
    let lp = solve_exact(&lpts, &agg)?;

    // McShane extension from the landmarks carrying mass.
    let carriers: Vec<usize> = (0..agg.len()).filter(|&l| agg[l] != 0.0).collect();
    let mut f = vec![0.0; n];
    let mut lower_f = 0.0;
    if !carriers.is_empty() {
        for ((fi, pt), dl) in f.iter_mut().zip(&s.points).zip(&s.delta) {
            let v = carriers
                .iter()
                .map(|&l| lp.f[l] + dist(pt, &lpts[l]))
                .fold(f64::INFINITY, f64::min);
            *fi = v.clamp(-1.0, 1.0);
            lower_f += dl * *fi;
        }
    }
    let mass: f64 = s.delta.iter().sum();
    let lower = lower_f.abs().max(mass.abs());
    let upper = (lp.primal + disp).min(coupled_transport_bound(mu, nu));
    Ok(DistanceReport {
        value: upper,
        method: DistanceMethod::DualAscent,
        gap: (upper - lower).max(0.0),
        lower,
        upper,
        iterations: lp.iterations,
        certificate: Some(Certificate::Lp {
            points: s.points.clone(),
            delta: s.delta.clone(),
            f,
        }),
    })
}

/// Cost of the transport plan pairing atoms with equal sample ids (moved at
/// `min(‖x − y‖, 2)`), all other mass dropped at cost 1. An upper bound on
/// `d_bL(μ, ν)`.
pub fn coupled_transport_bound(mu: &EmpiricalConicMeasure, nu: &EmpiricalConicMeasure) -> f64 {
    let mut a: Vec<usize> = (0..mu.atoms.len()).collect();
    let mut b: Vec<usize> = (0..nu.atoms.len()).collect();
    a.sort_by_key(|&i| mu.atoms[i].id);
    b.sort_by_key(|&i| nu.atoms[i].id);
    let (mut i, mut j) = (0, 0);
    let mut cost = 0.0;
    while i < a.len() || j < b.len() {
        let ia = a.get(i).map(|&k| mu.atoms[k].id);
        let jb = b.get(j).map(|&k| nu.atoms[k].id);
        match (ia, jb) {
            (Some(x), Some(y)) if x == y => {
                let (p, q) = (&mu.atoms[a[i]], &nu.atoms[b[j]]);
                let dd = (dist(&p.u, &q.u).powi(2) + dist(&p.v, &q.v).powi(2)).sqrt();
                cost += p.w.min(q.w) * dd.min(2.0) + (p.w - q.w).abs();
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                cost += mu.atoms[a[i]].w;
                i += 1;
            }
            (Some(_), None) => {
                cost += mu.atoms[a[i]].w;
                i += 1;
            }
            _ => {
                cost += nu.atoms[b[j]].w;
                j += 1;
            }
        }
    }
    cost
}

/// Symmetry (exact), identity (`d(μ, μ) ≤ 1e−9`) and the triangle
/// inequality on all triples (slack `≥ −1e−8`).
pub fn dbl_metric_axioms_check(measures: &[EmpiricalConicMeasure]) -> Result<CheckReport> {
    let n = measures.len();
    if n < 3 {
        return Err(ConeError::OutOfRange("need at least three measures".into()));
    }
    let mut dm = vec![0.0; n * n];
    let mut symmetric = true;
    let mut identity = 0.0f64;
    for i in 0..n {
        identity = identity.max(dbl_distance(&measures[i], &measures[i])?.value);
        for j in (i + 1)..n {
            let a = dbl_distance(&measures[i], &measures[j])?.value;
            let b = dbl_distance(&measures[j], &measures[i])?.value;
            symmetric &= a.to_bits() == b.to_bits();
            dm[i * n + j] = a;
            dm[j * n + i] = b;
        }
    }
    let mut slack = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && j != k && i != k {
                    slack = slack.min(dm[i * n + k] + dm[k * n + j] - dm[i * n + j]);
                }
            }
        }
    }
    let mut r = CheckReport::at_least("d_bL metric axioms", slack, 0.0, 1e-8);
    r.pass &= symmetric && identity <= 1e-9;
    r.details =
        format!("symmetric={symmetric}, max d(m,m)={identity:.3e}, min triangle slack={slack:.3e}");
    Ok(r)
}
