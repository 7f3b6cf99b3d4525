//! Acceptance criteria: one PASS/FAIL line per criterion, nonzero exit on
//! any failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::{Duration, Instant};

use conic_cli::{run, run_config, CommandKind, ExperimentConfig, RerunArgs, RunArgs};
use conic_core::linalg::{dist, normalized};
use conic_core::measures::{
    intrinsic_volumes_mc, omega_estimates, Atom, EmpiricalConicMeasure, OmegaMethod,
};
use conic_core::metrics::{
    dbl_distance, dbl_metric_axioms_check, holder_experiment, polarity_isometry_check,
    DistanceMethod, HausdorffOptions, HolderOptions,
};
use conic_core::projection::{lemma_projection_stability, moreau_suite};
use conic_core::rng::{gaussian_stream, Sampling, Substream};
use conic_core::steiner::{g_coeff, i_coeff, steiner_check_matrix, CheckMatrix};
use conic_core::{dual, BiconicSet, Cone, TaggedFn};

type Verdict = Result<(bool, String), String>;
type Oracle = fn(usize, usize) -> f64;

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn(&mut Shared) -> Verdict,
}

/// Results reused by later criteria.
#[derive(Default)]
struct Shared {
    steiner: Vec<(String, CheckMatrix)>,
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn unit(g: &mut impl Iterator<Item = Vec<f64>>) -> Vec<f64> {
    loop {
        if let Some(u) = normalized(&g.next().expect("infinite stream")) {
            return u;
        }
    }
}

/// `n` generators `normalize(bias·1 + z)` in dimension `d`.
fn biased_rays(d: usize, n: usize, seed: u64, bias: f64) -> Cone {
    let mut g = gaussian_stream(d, seed, 77);
    let gens: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            normalized(
                &g.next()
                    .unwrap()
                    .iter()
                    .map(|z| bias + z)
                    .collect::<Vec<_>>(),
            )
            .unwrap()
        })
        .collect();
    Cone::rays(&gens).expect("valid generators")
}

fn positive_rays(d: usize, n: usize, seed: u64) -> Cone {
    biased_rays(d, n, seed, 1.5)
}

/// `n` Gaussian generators in dimension `d`, redrawn until the cone is not the whole space.
fn random_rays(d: usize, n: usize, seed: u64) -> Cone {
    let mut g = gaussian_stream(d, seed, 78);
    loop {
        let c = Cone::rays(&(0..n).map(|_| unit(&mut g)).collect::<Vec<_>>())
            .expect("valid generators");
        if !c.is_full_space() {
            return c;
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn c1_moreau(_: &mut Shared) -> Verdict {
    let mut cones: Vec<(String, Cone)> = Vec::new();
    for d in 2..=8 {
        cones.push((format!("orthant({d})"), Cone::orthant(d).map_err(e)?));
    }
    for (i, (d, n)) in [(2, 3), (3, 5), (4, 8), (5, 12), (6, 16), (8, 16)]
        .into_iter()
        .enumerate()
    {
        let c = random_rays(d, n, i as u64);
        cones.push((format!("dual(rays d={d} n={n})"), dual(&c)));
        cones.push((format!("rays d={d} n={n}"), c));
    }
    for (d, a) in [(2, 0.3), (3, FRAC_PI_4), (5, 1.2), (8, 0.5)] {
        let c = Cone::circular(d, a).map_err(e)?;
        cones.push((format!("dual(circular({d},{a}))"), dual(&c)));
        cones.push((format!("circular({d},{a})"), c));
    }
    for (d, k) in [(2, 1), (4, 2), (7, 3)] {
        cones.push((
            format!("subspace({d},{k})"),
            Cone::subspace(d, k).map_err(e)?,
        ));
    }
    let mut failures = 0;
    let mut worst = String::new();
    for (i, (name, c)) in cones.iter().enumerate() {
        let s = moreau_suite(c, Sampling::new(100_000, i as u64, Substream::Points)).map_err(e)?;
        if s.failures() > 0 {
            worst = format!("{name}: {s:?}");
        }
        failures += s.failures();
    }
    Ok((
        failures == 0,
        format!(
            "{} cones x 1e5 points, {failures} failures {worst}",
            cones.len()
        ),
    ))
}

fn c2_orthant_volumes(_: &mut Shared) -> Verdict {
    let n = 1_000_000u64;
    let mut ok = true;
    let mut worst = 0.0f64;
    for d in [2usize, 3, 4, 6] {
        let est = intrinsic_volumes_mc(&Cone::orthant(d).map_err(e)?, n, d as u64).map_err(e)?;
        ok &= est.counts.iter().sum::<u64>() == n;
        ok &= (est.v.iter().sum::<f64>() - 1.0).abs() <= (d + 1) as f64 * f64::EPSILON;
        for k in 0..=d {
            let v = binom(d, k) / 2f64.powi(d as i32);
            let z = (est.v[k] - v).abs() / (v * (1.0 - v) / n as f64).sqrt();
            worst = worst.max(z);
            ok &= z <= 4.0;
        }
    }
    Ok((
        ok,
        format!("max deviation {worst:.2} sigma (limit 4), counts sum to N"),
    ))
}

fn c3_coefficients(_: &mut Shared) -> Verdict {
    let fs: [(TaggedFn, Oracle); 3] = [
        ("one".parse().map_err(e)?, |_, _| 1.0),
        ("norm_sq_c".parse().map_err(e)?, |_, k| k as f64),
        ("moment:1,1".parse().map_err(e)?, |d, k| {
            (k * (d - k)) as f64
        }),
    ];
    let mut err_i = 0.0f64;
    for d in 1..=8 {
        for k in 0..=d {
            for (f, oracle) in &fs {
                err_i = err_i.max((i_coeff(f, d, k).map_err(e)? - oracle(d, k)).abs());
            }
        }
    }
    let err_g = (g_coeff(2, 1, FRAC_PI_4).map_err(e)? - 0.5).abs();
    let mut err_lim = 0.0f64;
    for d in 2..=8 {
        for k in 1..=d {
            for l in [FRAC_PI_2, FRAC_PI_2 - 1e-9] {
                err_lim = err_lim.max((g_coeff(d, k, l).map_err(e)? - 1.0).abs());
            }
        }
    }
    let ok = err_i <= 1e-9 && err_g <= 1e-10 && err_lim <= 1e-8;
    Ok((ok, format!("I_k err {err_i:.1e} (1e-9), g_1(pi/4) err {err_g:.1e} (1e-10), g->1 err {err_lim:.1e} (1e-8)")))
}

fn steiner_cases() -> Result<Vec<(String, Cone)>, String> {
    Ok(vec![
        ("orthant(3)".into(), Cone::orthant(3).map_err(e)?),
        ("subspace(4,2)".into(), Cone::subspace(4, 2).map_err(e)?),
        ("rays d=4 n=6".into(), positive_rays(4, 6, 1)),
        ("dual(rays d=3 n=5)".into(), dual(&positive_rays(3, 5, 2))),
        (
            "circular(3,pi/4)".into(),
            Cone::circular(3, FRAC_PI_4).map_err(e)?,
        ),
        ("circular(4,0.5)".into(), Cone::circular(4, 0.5).map_err(e)?),
    ])
}

fn c4_master(shared: &mut Shared) -> Verdict {
    let fs: Vec<TaggedFn> = ["norm_sq_c", "moment:1,1", "steiner:0.7"]
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let lambdas = [0.2, 0.5, 0.8, 1.2];
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    let mut inversion = false;
    for (i, (name, c)) in steiner_cases()?.into_iter().enumerate() {
        let etas = [
            BiconicSet::All,
            BiconicSet::parse("cap:ones/0.8/-ones/1.2", Some(c.dim())).map_err(e)?,
        ];
        let m =
            steiner_check_matrix(&c, &fs, &etas, &lambdas, 1_000_000, 100 + i as u64).map_err(e)?;
        inversion |=
            name.starts_with("circular") && matches!(m.omega[0].method, OmegaMethod::Inversion(_));
        for r in &m.master {
            worst = worst.max(r.sigmas);
            if !r.pass {
                bad.push(r.name.clone());
            }
        }
        shared.steiner.push((name, m));
    }
    let ok = bad.is_empty() && inversion;
    Ok((ok, format!("36 cases at N=1e6, max {worst:.2} sigma (limit 4), circular via inversion: {inversion} {bad:?}")))
}

fn c5_local(shared: &mut Shared) -> Verdict {
    if shared.steiner.is_empty() {
        return Err("criterion 4 produced no results".into());
    }
    let mut bad = Vec::new();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (_, m) in &shared.steiner {
        for r in &m.local {
            cases += 1;
            worst = worst.max(r.sigmas);
            if !r.pass {
                bad.push(r.name.clone());
            }
        }
    }
    let quad = conic_core::steiner::local_steiner_check(
        &Cone::orthant(2).map_err(e)?,
        FRAC_PI_4,
        &BiconicSet::All,
        1_000_000,
        5,
    )
    .map_err(e)?;
    let exact = 0.25 + g_coeff(2, 1, FRAC_PI_4).map_err(e)? / 2.0;
    let quad_ok = quad.pass
        && (exact - 0.5).abs() <= 1e-12
        && (quad.lhs - 0.5).abs() <= 4.0 * quad.stderr_combined;
    let ok = bad.is_empty() && quad_ok;
    Ok((
        ok,
        format!(
            "{cases} cases, max {worst:.2} sigma (limit 4); quadrant lhs {:.5} rhs {:.5} vs 1/2 {bad:?}",
            quad.lhs, quad.rhs
        ),
    ))
}

fn c6_ray_cap(_: &mut Shared) -> Verdict {
    let c = Cone::orthant(2).map_err(e)?;
    let eta = BiconicSet::parse("cap:e1/0.3/-e2/0.3", Some(2)).map_err(e)?;
    let om = omega_estimates(
        &c,
        &[eta],
        OmegaMethod::Faces,
        Sampling::new(1_000_000, 6, Substream::ConeA),
    )
    .map_err(e)?;
    let (v, se) = (om[0].omega[1], om[0].stderr(1));
    let z = (v - 0.25).abs() / se;
    Ok((
        z <= 4.0,
        format!("Omega_1 = {v:.5} +- {se:.1e}, {z:.2} sigma (limit 4)"),
    ))
}

fn rotation_pairs() -> Result<Vec<(Cone, Cone, f64)>, String> {
    let thetas = [0.05, 0.2, 0.35, 0.5];
    let bases = [
        Cone::orthant(3).map_err(e)?,
        positive_rays(4, 6, 3),
        dual(&positive_rays(3, 4, 4)),
        Cone::circular(3, 0.6).map_err(e)?,
        Cone::subspace(4, 2).map_err(e)?,
    ];
    let mut pairs = Vec::new();
    for (i, b) in bases.iter().enumerate() {
        for (j, &t) in thetas.iter().enumerate() {
            let (p, q) = ((i + j) % b.dim(), (i + j + 1) % b.dim());
            pairs.push((b.clone(), b.rotated(p, q, t).map_err(e)?, t));
        }
    }
    Ok(pairs)
}

fn c7_stability(_: &mut Shared) -> Verdict {
    let pairs = rotation_pairs()?;
    let per = 10_000 / pairs.len();
    let (mut points, mut violations, mut angular) = (0, 0, 0);
    for (i, (c, d, theta)) in pairs.iter().enumerate() {
        let mut g = gaussian_stream(c.dim(), 700 + i as u64, Substream::Points.id());
        for _ in 0..per {
            let x = g.next().unwrap();
            let r = lemma_projection_stability(c, d, &x, *theta).map_err(e)?;
            points += 1;
            angular += usize::from(!r.angular.skipped);
            violations += usize::from(r.violated());
        }
    }
    Ok((
        violations == 0,
        format!("{points} points over {} pairs, {angular} angular checks, {violations} violations (slack 1e-8)", pairs.len()),
    ))
}

fn c8_polarity(_: &mut Shared) -> Verdict {
    let opts = HausdorffOptions {
        certify: true,
        pitch: 1e-3,
        ..Default::default()
    };
    let mut pairs: Vec<(Cone, Cone)> = Vec::new();
    let mut g = gaussian_stream(1, 800, 1);
    let mut angle = || 0.02 + 0.48 * g.next().unwrap()[0].abs().min(1.0);
    for s in 0..10u64 {
        let q2 = positive_rays(2, 2, 810 + s);
        pairs.push((q2.clone(), q2.rotated(0, 1, angle()).map_err(e)?));
        let c3 = positive_rays(3, 3 + (s as usize % 3), 820 + s);
        pairs.push((
            c3.clone(),
            c3.rotated((s % 3) as usize, ((s + 1) % 3) as usize, angle())
                .map_err(e)?,
        ));
        let o = Cone::orthant(2 + (s as usize % 2)).map_err(e)?;
        pairs.push((o.clone(), o.rotated(0, 1, angle()).map_err(e)?));
        let k = Cone::circular(3, 0.3 + 0.1 * s as f64).map_err(e)?;
        pairs.push((k.clone(), k.rotated(0, 2, angle()).map_err(e)?));
        // Two independent random cones in the plane or in space.
        let d = 2 + (s as usize % 2);
        pairs.push((
            biased_rays(d, 3, 830 + s, 3.0),
            biased_rays(d, 3, 840 + s, 3.0),
        ));
    }
    let (mut fails, mut skipped, mut worst) = (Vec::new(), 0, 0.0f64);
    for (i, (c, d)) in pairs.iter().enumerate() {
        let r = polarity_isometry_check(c, d, &opts).map_err(e)?;
        if r.skipped {
            skipped += 1;
            fails.push(format!("pair {i} skipped: {}", r.details));
        }
        worst = worst.max((r.lhs - r.rhs).abs());
        if r.failed() {
            fails.push(format!("pair {i}: {}", r.details));
        }
    }
    let ok = fails.is_empty() && skipped == 0;
    Ok((
        ok,
        format!(
            "{} certified pairs, max |diff| {worst:.1e}, {skipped} skipped {fails:?}",
            pairs.len()
        ),
    ))
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

/// Best vertex of `|f_i| ≤ 1`, `f_i − f_j ≤ ‖p_i − p_j‖` for the objective `Σ δ_i f_i`.
fn vertex_enumeration(points: &[Vec<f64>], delta: &[f64]) -> f64 {
    let n = points.len();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut r = vec![0.0; n];
            r[i] = s;
            rows.push((r, 1.0));
        }
        for j in (0..n).filter(|&j| j != i) {
            let mut r = vec![0.0; n];
            r[i] = 1.0;
            r[j] = -1.0;
            rows.push((r, dist(&points[i], &points[j])));
        }
    }
    let m = rows.len();
    let mut best = f64::NEG_INFINITY;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&r| rows[r].0.clone()).collect();
        let b = idx.iter().map(|&r| rows[r].1).collect();
        if let Some(f) = solve(a, b) {
            if rows
                .iter()
                .all(|(r, c)| r.iter().zip(&f).map(|(x, y)| x * y).sum::<f64>() <= c + 1e-9)
            {
                best = best.max(delta.iter().zip(&f).map(|(a, b)| a * b).sum());
            }
        }
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

fn c9_dbl(_: &mut Shared) -> Verdict {
    let mut g = gaussian_stream(3, 900, 4);
    let mut dirac_err = 0.0f64;
    for _ in 0..100 {
        let (a, b) = ((unit(&mut g), unit(&mut g)), (unit(&mut g), unit(&mut g)));
        let r = dbl_distance(
            &measure(3, vec![(a.0.clone(), a.1.clone(), 1.0)]),
            &measure(3, vec![(b.0.clone(), b.1.clone(), 1.0)]),
        )
        .map_err(e)?;
        let pa: Vec<f64> = a.0.iter().chain(&a.1).copied().collect();
        let pb: Vec<f64> = b.0.iter().chain(&b.1).copied().collect();
        dirac_err = dirac_err.max((r.value - dist(&pa, &pb).min(2.0)).abs());
    }

    let c = Cone::orthant(3).map_err(e)?;
    let rc = c.rotated(0, 1, 0.3).map_err(e)?;
    let mut axioms = 0;
    for t in 0..20u64 {
        let ms = [
            conic_core::measures::empirical_support_measure(&c, 1, &BiconicSet::All, 60, 3 * t)
                .map_err(e)?,
            conic_core::measures::empirical_support_measure(&c, 1, &BiconicSet::All, 60, 3 * t + 1)
                .map_err(e)?,
            conic_core::measures::empirical_support_measure(
                &rc,
                1,
                &BiconicSet::All,
                60,
                3 * t + 2,
            )
            .map_err(e)?,
        ];
        axioms += usize::from(dbl_metric_axioms_check(&ms).map_err(e)?.pass);
    }

    let mut g = gaussian_stream(2, 910, 4);
    let mut wts = gaussian_stream(1, 911, 4);
    let mut brute_err = 0.0f64;
    let mut exact = true;
    for trial in 0..30usize {
        let (na, nb) = (1 + trial % 3, 1 + (trial / 3) % 3);
        let mut atoms = |count: usize| -> Vec<(Vec<f64>, Vec<f64>, f64)> {
            (0..count)
                .map(|_| {
                    (
                        unit(&mut g),
                        unit(&mut g),
                        0.05 + wts.next().unwrap()[0].abs() * 0.2,
                    )
                })
                .collect()
        };
        let (mu, nu) = (measure(2, atoms(na)), measure(2, atoms(nb)));
        let r = dbl_distance(&mu, &nu).map_err(e)?;
        exact &= r.method == DistanceMethod::ExactLp;
        let mut points = Vec::new();
        let mut delta = Vec::new();
        for (m, s) in [(&mu, 1.0), (&nu, -1.0)] {
            for a in &m.atoms {
                points.push(a.u.iter().chain(&a.v).copied().collect::<Vec<f64>>());
                delta.push(s * a.w);
            }
        }
        brute_err = brute_err.max((r.value - vertex_enumeration(&points, &delta)).abs());
    }
    let ok = dirac_err <= 1e-9 && axioms == 20 && brute_err <= 1e-9 && exact;
    Ok((ok, format!("Dirac err {dirac_err:.1e} (1e-9), axioms {axioms}/20, vertex enumeration err {brute_err:.1e} (1e-9)")))
}

fn c10_holder(_: &mut Shared) -> Verdict {
    let opts = HolderOptions {
        n: 200_000,
        seed: 10,
        ..Default::default()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, c) in [
        ("orthant(3)", Cone::orthant(3).map_err(e)?),
        ("rays d=4 n=5", positive_rays(4, 5, 10)),
    ] {
        let t = holder_experiment(&c, &opts).map_err(e)?;
        ok &= t.pass();
        for s in &t.summaries {
            parts.push(format!(
                "{name} k={} spread {:.2} inv {} slope {:.2}",
                s.k, s.ratio_spread, s.inversions, s.slope
            ));
        }
    }
    Ok((
        ok,
        format!("spread <= 10, inversions <= 1: {}", parts.join("; ")),
    ))
}

fn cli(kind: CommandKind, args: RunArgs) -> Result<String, String> {
    let r = run_config(&ExperimentConfig::new(kind, args)).map_err(e)?;
    Ok(r.rendered)
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(e)
}

fn c11_determinism(_: &mut Shared) -> Verdict {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let runs: Vec<(CommandKind, RunArgs)> = vec![
        (
            CommandKind::IntrinsicVolumes,
            RunArgs {
                cones: s(&["orthant:4"]),
                n: Some(100_000),
                seed: 3,
                ..Default::default()
            },
        ),
        (
            CommandKind::SteinerCheck,
            RunArgs {
                cones: s(&["circular:3,0.7"]),
                n: Some(50_000),
                fs: s(&["moment:1,1"]),
                etas: s(&["all", "cap:ones/0.8/-ones/1.2"]),
                ..Default::default()
            },
        ),
        (
            CommandKind::HolderCurve,
            RunArgs {
                cones: s(&["orthant:3"]),
                n: Some(20_000),
                thetas: vec![0.4, 0.1],
                ..Default::default()
            },
        ),
        (
            CommandKind::Distance,
            RunArgs {
                cones: s(&["orthant:3", "rotated:orthant:3,1,2,0.2"]),
                n: Some(5_000),
                ..Default::default()
            },
        ),
        (
            CommandKind::SupportMeasure,
            RunArgs {
                cones: s(&["orthant:3"]),
                n: Some(5_000),
                k: vec![2],
                ..Default::default()
            },
        ),
    ];
    let mut mismatches = Vec::new();
    for (kind, args) in &runs {
        let a = pool(1)?.install(|| cli(*kind, args.clone()))?;
        let b = pool(4)?.install(|| cli(*kind, args.clone()))?;
        let c = cli(*kind, args.clone())?;
        if a != b || a != c || a.is_empty() {
            mismatches.push(kind.name());
        }
    }

    let dir = tempfile::tempdir().map_err(e)?;
    let first = dir.path().join("a.csv");
    let args = RunArgs {
        cones: s(&["dual:rotated:orthant:4,1,3,0.3"]),
        n: Some(20_000),
        out: Some(first.clone()),
        ..Default::default()
    };
    let cfg = ExperimentConfig::new(CommandKind::SupportMeasure, args);
    run(&cfg, conic_cli::run::resolve_specs(&cfg.args).map_err(e)?).map_err(e)?;
    let second = dir.path().join("b.csv");
    conic_cli::rerun(&RerunArgs {
        manifest: conic_cli::output::manifest_path(&first),
        out: Some(second.clone()),
    })
    .map_err(e)?;
    let same = std::fs::read(&first).map_err(e)? == std::fs::read(&second).map_err(e)?;
    if !same {
        mismatches.push("rerun");
    }
    Ok((
        mismatches.is_empty(),
        format!("{} commands x (1 thread, 4 threads, global pool) plus manifest rerun, mismatches {mismatches:?}", runs.len()),
    ))
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "Moreau suite",
            budget: Duration::from_secs(30),
            run: c1_moreau,
        },
        Criterion {
            id: 2,
            name: "orthant intrinsic volumes",
            budget: Duration::from_secs(60),
            run: c2_orthant_volumes,
        },
        Criterion {
            id: 3,
            name: "Steiner coefficient oracles",
            budget: Duration::from_secs(60),
            run: c3_coefficients,
        },
        Criterion {
            id: 4,
            name: "master Steiner identity",
            budget: Duration::from_secs(600),
            run: c4_master,
        },
        Criterion {
            id: 5,
            name: "local Steiner identity",
            budget: Duration::from_secs(600),
            run: c5_local,
        },
        Criterion {
            id: 6,
            name: "ray-cap support measure",
            budget: Duration::from_secs(60),
            run: c6_ray_cap,
        },
        Criterion {
            id: 7,
            name: "projection stability bounds",
            budget: Duration::from_secs(60),
            run: c7_stability,
        },
        Criterion {
            id: 8,
            name: "polarity isometry",
            budget: Duration::from_secs(300),
            run: c8_polarity,
        },
        Criterion {
            id: 9,
            name: "bounded-Lipschitz LP",
            budget: Duration::from_secs(120),
            run: c9_dbl,
        },
        Criterion {
            id: 10,
            name: "Holder scaling",
            budget: Duration::from_secs(900),
            run: c10_holder,
        },
        Criterion {
            id: 11,
            name: "determinism",
            budget: Duration::from_secs(300),
            run: c11_determinism,
        },
    ];
    let mut shared = Shared::default();
    let mut failed = 0;
    for c in &criteria {
        let t = Instant::now();
        let verdict = (c.run)(&mut shared);
        let elapsed = t.elapsed();
        let (pass, detail) = match verdict {
            Ok((pass, detail)) => (pass && elapsed <= c.budget, detail),
            Err(msg) => (false, format!("error: {msg}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {} {}: {detail} [{:.1}s, budget {}s]",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
