use conic_core::linalg::{dist, normalized};
use conic_core::measures::{empirical_support_measure, Atom, EmpiricalConicMeasure};
use conic_core::metrics::{
    coupled_transport_bound, dbl_distance, dbl_metric_axioms_check, DistanceMethod,
};
use conic_core::rng::gaussian_stream;
use conic_core::{BiconicSet, Cone};

fn unit(g: &mut impl Iterator<Item = Vec<f64>>) -> Vec<f64> {
    normalized(&g.next().unwrap()).unwrap()
}

fn measure(d: usize, atoms: Vec<(Vec<f64>, Vec<f64>, f64)>) -> EmpiricalConicMeasure {
    EmpiricalConicMeasure {
        d,
        k: 1,
        atoms: atoms
            .into_iter()
            .enumerate()
            .map(|(i, (u, v, w))| Atom {
                u,
                v,
                w,
                id: i as u64,
            })
            .collect(),
        total_samples: 1,
        seed: 0,
        degenerate_samples: 0,
    }
}

/// Solves a square linear system by partial-pivot elimination.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            let (top, rest) = a.split_at_mut(r);
            for (x, y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= f * y;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        x[r] = (b[r] - (r + 1..n).map(|c| a[r][c] * x[c]).sum::<f64>()) / a[r][r];
    }
    Some(x)
}

/// `max Σ δ_i f_i` over `|f_i| ≤ 1`, `f_i − f_j ≤ ‖p_i − p_j‖` by enumerating
/// every vertex of the feasible polytope.
fn brute_force(points: &[Vec<f64>], delta: &[f64]) -> f64 {
    let n = points.len();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        rows.push((e.clone(), 1.0));
        e[i] = -1.0;
        rows.push((e, 1.0));
        for j in 0..n {
            if i != j {
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                r[j] = -1.0;
                rows.push((r, dist(&points[i], &points[j])));
            }
        }
    }
    let m = rows.len();
    let mut best = f64::NEG_INFINITY;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<f64>> = idx.iter().map(|&r| rows[r].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&r| rows[r].1).collect();
        if let Some(f) = solve(a, b) {
            let feasible = rows
                .iter()
                .all(|(r, c)| r.iter().zip(&f).map(|(x, y)| x * y).sum::<f64>() <= c + 1e-9);
            if feasible {
                best = best.max(delta.iter().zip(&f).map(|(a, b)| a * b).sum());
            }
        }
        // Next n-subset of 0..m in lexicographic order.
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < m - n + i {
                break;
            }
        }
        idx[i] += 1;
        for k in i + 1..n {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

#[test]
fn two_dirac_closed_form() {
    let mut g = gaussian_stream(3, 5, 4);
    for _ in 0..100 {
        let (a, b) = ((unit(&mut g), unit(&mut g)), (unit(&mut g), unit(&mut g)));
        let mu = measure(3, vec![(a.0.clone(), a.1.clone(), 1.0)]);
        let nu = measure(3, vec![(b.0.clone(), b.1.clone(), 1.0)]);
        let r = dbl_distance(&mu, &nu).unwrap();
        let pa: Vec<f64> = a.0.iter().chain(&a.1).copied().collect();
        let pb: Vec<f64> = b.0.iter().chain(&b.1).copied().collect();
        let expected = dist(&pa, &pb).min(2.0);
        assert!(
            (r.value - expected).abs() < 1e-9,
            "{} vs {expected}",
            r.value
        );
        assert_eq!(r.method, DistanceMethod::ExactLp);
    }
}

#[test]
fn agrees_with_vertex_enumeration() {
    let mut g = gaussian_stream(2, 11, 4);
    let mut weights = gaussian_stream(1, 12, 4);
    for trial in 0..30 {
        let (na, nb) = (1 + trial % 3, 1 + (trial / 3) % 3);
        let mut atoms = |count: usize| -> Vec<(Vec<f64>, Vec<f64>, f64)> {
            (0..count)
                .map(|_| {
                    (
                        unit(&mut g),
                        unit(&mut g),
                        0.05 + weights.next().unwrap()[0].abs() * 0.2,
                    )
                })
                .collect()
        };
        let mu = measure(2, atoms(na));
        let nu = measure(2, atoms(nb));
        let r = dbl_distance(&mu, &nu).unwrap();
        let mut points = Vec::new();
        let mut delta = Vec::new();
        for (m, s) in [(&mu, 1.0), (&nu, -1.0)] {
            for a in &m.atoms {
                points.push(a.u.iter().chain(&a.v).copied().collect::<Vec<f64>>());
                delta.push(s * a.w);
            }
        }
        assert!(points.len() <= 6);
        let oracle = brute_force(&points, &delta);
        assert!(
            (r.value - oracle).abs() < 1e-9,
            "trial {trial}: {} vs {oracle}",
            r.value
        );
    }
}

#[test]
fn relabeling_and_merging_are_exact() {
    let mut g = gaussian_stream(2, 21, 4);
    let atoms: Vec<(Vec<f64>, Vec<f64>, f64)> = (0..4)
        .map(|i| (unit(&mut g), unit(&mut g), 0.1 + 0.05 * i as f64))
        .collect();
    let other: Vec<(Vec<f64>, Vec<f64>, f64)> =
        (0..3).map(|_| (unit(&mut g), unit(&mut g), 0.2)).collect();
    let mu = measure(2, atoms.clone());
    let nu = measure(2, other);
    let base = dbl_distance(&mu, &nu).unwrap().value;
    let mut rev = atoms.clone();
    rev.reverse();
    assert_eq!(dbl_distance(&measure(2, rev), &nu).unwrap().value, base);
    // Split the first atom into two halves at the same point.
    let mut split = atoms.clone();
    let (u, v, w) = split[0].clone();
    split[0].2 = w / 2.0;
    split.push((u, v, w / 2.0));
    assert_eq!(dbl_distance(&measure(2, split), &nu).unwrap().value, base);
}

#[test]
fn metric_axioms_on_triples() {
    let c = Cone::orthant(3).unwrap();
    for t in 0..20u64 {
        let ms = vec![
            empirical_support_measure(&c, 1, &BiconicSet::All, 60, 3 * t).unwrap(),
            empirical_support_measure(&c, 1, &BiconicSet::All, 60, 3 * t + 1).unwrap(),
            empirical_support_measure(
                &c.rotated(0, 1, 0.3).unwrap(),
                1,
                &BiconicSet::All,
                60,
                3 * t + 2,
            )
            .unwrap(),
        ];
        let r = dbl_metric_axioms_check(&ms).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn coupled_bound_dominates() {
    let c = Cone::orthant(2).unwrap();
    let d = c.rotated(0, 1, 0.2).unwrap();
    let mu = empirical_support_measure(&c, 1, &BiconicSet::All, 200, 7).unwrap();
    let nu = empirical_support_measure(&d, 1, &BiconicSet::All, 200, 7).unwrap();
    let r = dbl_distance(&mu, &nu).unwrap();
    assert!(r.value <= coupled_transport_bound(&mu, &nu) + 1e-12);
}

#[test]
fn resample_noise_band() {
    // Two independent samples of the quadrant's first support measure.
    let c = Cone::orthant(2).unwrap();
    let mut prev = f64::INFINITY;
    for n in [250u64, 500] {
        let a = empirical_support_measure(&c, 1, &BiconicSet::All, n, 100).unwrap();
        let b = empirical_support_measure(&c, 1, &BiconicSet::All, n, 200).unwrap();
        let r = dbl_distance(&a, &b).unwrap();
        if n == 500 {
            assert!(r.value <= 0.15, "{}", r.value);
        }
        assert!(r.value <= prev + 0.02);
        prev = r.value;
    }
}
