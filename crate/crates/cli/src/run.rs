//! Command execution: composes core operations into tables and checks.

use std::path::{Path, PathBuf};
use std::time::Instant;

use conic_core::cone_spec::parse_cone_spec;
use conic_core::measure_io::{sidecar_path, MeasureSidecar};
use conic_core::measures::{
    empirical_support_measures, intrinsic_volumes_mc, omega_estimates, OmegaEstimate, OmegaMethod,
};
use conic_core::metrics::{
    angular_hausdorff, dbl_distance, holder_experiment, polarity_isometry_check, HausdorffOptions,
    HolderOptions, MAX_INVERSIONS, RATIO_SPREAD_LIMIT,
};
use conic_core::projection::{lemma_projection_stability, moreau_suite};
use conic_core::rng::{map_chunks, Sampling, Substream};
use conic_core::steiner::{default_grid, steiner_check_matrix, SteinerTable};
use conic_core::{make_cone, BiconicSet, CheckReport, Cone, ConeSpec, TaggedFn};

use crate::config::{CommandKind, ExperimentConfig, RerunArgs, RunArgs};
use crate::error::CliError;
use crate::output::{
    manifest_path, read_manifest, write_file, write_manifest, Cell, CheckSummary, Manifest, Table,
};

/// Result of one command before rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub checks: Vec<CheckReport>,
    pub sidecar: Option<MeasureSidecar>,
}

impl Outcome {
    fn new(table: Table) -> Self {
        Outcome {
            table,
            checks: Vec::new(),
            sidecar: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.failed())
    }
}

/// A finished run: rendered output and its manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outcome: Outcome,
    pub rendered: String,
    pub manifest: Manifest,
}

fn version() -> String {
    env!("CONIC_GIT_DESCRIBE").to_string()
}

/// Parses every `--cone` of the configuration.
pub fn resolve_specs(args: &RunArgs) -> Result<Vec<ConeSpec>, CliError> {
    args.cones
        .iter()
        .map(|s| parse_cone_spec(s).map_err(CliError::from))
        .collect()
}

/// Runs `cfg` with the given resolved cones, writes the output, sidecar and
/// manifest when `--out` is set, and returns the rendered text.
pub fn run(cfg: &ExperimentConfig, specs: Vec<ConeSpec>) -> Result<RunResult, CliError> {
    let start = Instant::now();
    let cones: Vec<Cone> = specs.iter().map(make_cone).collect::<Result<_, _>>()?;
    let outcome = execute(cfg, &cones)?;
    let rendered = outcome.table.render(cfg.args.format);
    let manifest = Manifest {
        version: version(),
        config: cfg.clone(),
        cone_hashes: cones.iter().map(Cone::fingerprint).collect(),
        cone_specs: specs,
        output: cfg.args.out.clone(),
        checks: outcome.checks.iter().map(CheckSummary::from).collect(),
    };
    if let Some(out) = &cfg.args.out {
        write_file(out, &rendered)?;
        if let Some(side) = &outcome.sidecar {
            let json = serde_json::to_string_pretty(side)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            write_file(&sidecar_path(out), &(json + "\n"))?;
        }
        write_manifest(&manifest, out)?;
    }
    if cfg.args.stats {
        eprintln!(
            "{}: {} rows, {} checks, {:.3}s, {} workers",
            cfg.command.name(),
            outcome.table.rows.len(),
            outcome.checks.len(),
            start.elapsed().as_secs_f64(),
            rayon::current_num_threads()
        );
    }
    Ok(RunResult {
        outcome,
        rendered,
        manifest,
    })
}

/// Parses the cones of `cfg` and runs it.
pub fn run_config(cfg: &ExperimentConfig) -> Result<RunResult, CliError> {
    let specs = resolve_specs(&cfg.args)?;
    run(cfg, specs)
}

/// Repeats the run recorded in a manifest, using its resolved cone specs.
pub fn rerun(args: &RerunArgs) -> Result<RunResult, CliError> {
    let m = read_manifest(&args.manifest)?;
    let mut cfg = m.config.clone();
    if args.out.is_some() {
        cfg.args.out = args.out.clone();
    }
    run(&cfg, m.cone_specs)
}

/// Path of the manifest that accompanies `out`.
pub fn manifest_for(out: &Path) -> PathBuf {
    manifest_path(out)
}

fn need_cones(cones: &[Cone], n: usize, cmd: CommandKind) -> Result<(), CliError> {
    if cones.len() < n {
        return Err(CliError::Config(format!(
            "{} needs {n} --cone argument(s)",
            cmd.name()
        )));
    }
    Ok(())
}

fn samples(args: &RunArgs, default: u64) -> Result<u64, CliError> {
    let n = args.n.unwrap_or(default);
    if n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    Ok(n)
}

fn parse_plane(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("--plane expects i,j, found '{s}'"));
    let (i, j) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        i.trim().parse().map_err(|_| bad())?,
        j.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_fs(args: &RunArgs) -> Result<Vec<TaggedFn>, CliError> {
    let tags: Vec<&str> = if args.fs.is_empty() {
        vec!["one"]
    } else {
        args.fs.iter().map(String::as_str).collect()
    };
    tags.iter()
        .map(|t| t.parse::<TaggedFn>().map_err(CliError::from))
        .collect()
}

fn parse_etas(args: &RunArgs, d: usize) -> Result<Vec<(String, BiconicSet)>, CliError> {
    let tags: Vec<&str> = if args.etas.is_empty() {
        vec!["all"]
    } else {
        args.etas.iter().map(String::as_str).collect()
    };
    tags.iter()
        .map(|t| Ok((t.to_string(), BiconicSet::parse(t, Some(d))?)))
        .collect()
}

fn method_name(e: &OmegaEstimate) -> &'static str {
    match e.method {
        OmegaMethod::Faces => "faces",
        OmegaMethod::Inversion(_) => "inversion",
        OmegaMethod::Auto => "auto",
    }
}

/// Runs one command on resolved cones.
pub fn execute(cfg: &ExperimentConfig, cones: &[Cone]) -> Result<Outcome, CliError> {
    let a = &cfg.args;
    match cfg.command {
        CommandKind::IntrinsicVolumes => intrinsic_volumes(a, cones),
        CommandKind::SteinerCheck => steiner_check(a, cones, false),
        CommandKind::LocalSteinerCheck => steiner_check(a, cones, true),
        CommandKind::HolderCurve => holder_curve(a, cones),
        CommandKind::ProjectionBounds => projection_bounds(a, cones),
        CommandKind::SteinerTable => steiner_table(a, cones),
        CommandKind::Distance => distance(a, cones),
        CommandKind::SupportMeasure => support_measure(a, cones),
    }
}

fn intrinsic_volumes(a: &RunArgs, cones: &[Cone]) -> Result<Outcome, CliError> {
    need_cones(cones, 1, CommandKind::IntrinsicVolumes)?;
    let n = samples(a, 100_000)?;
    let mut out = Outcome::new(Table::new(&["cone", "k", "v", "stderr", "count", "method"]));
    for (spec, c) in a.cones.iter().zip(cones) {
        if c.is_polyhedral() {
            let est = intrinsic_volumes_mc(c, n, a.seed)?;
            for k in 0..=c.dim() {
                out.table.push(vec![
                    spec.as_str().into(),
                    k.into(),
                    est.v[k].into(),
                    est.stderr[k].into(),
                    est.counts[k].into(),
                    "faces".into(),
                ]);
            }
            let total: u64 = est.counts.iter().sum();
            out.checks.push(CheckReport::deterministic(
                format!("{spec}: counts sum to N"),
                total as f64,
                n as f64,
                0.0,
            ));
        } else {
            let sampling = Sampling::new(n, a.seed, Substream::ConeA);
            let est =
                omega_estimates(c, &[BiconicSet::All], OmegaMethod::Auto, sampling)?.remove(0);
            for k in 0..=c.dim() {
                out.table.push(vec![
                    spec.as_str().into(),
                    k.into(),
                    est.omega[k].into(),
                    est.stderr(k).into(),
                    Cell::Empty,
                    method_name(&est).into(),
                ]);
            }
        }
    }
    Ok(out)
}

fn steiner_check(a: &RunArgs, cones: &[Cone], local: bool) -> Result<Outcome, CliError> {
    let cmd = if local {
        CommandKind::LocalSteinerCheck
    } else {
        CommandKind::SteinerCheck
    };
    need_cones(cones, 1, cmd)?;
    let n = samples(a, 100_000)?;
    let head = if local { "lambda" } else { "f" };
    let mut out = Outcome::new(Table::new(&[
        "cone", head, "eta", "lhs", "rhs", "stderr", "sigmas", "pass", "method",
    ]));
    if local && a.lambdas.is_empty() {
        return Err(CliError::Config(
            "local-steiner-check needs --lambdas".into(),
        ));
    }
    let fs = if local { Vec::new() } else { parse_fs(a)? };
    for (spec, c) in a.cones.iter().zip(cones) {
        let etas = parse_etas(a, c.dim())?;
        let sets: Vec<BiconicSet> = etas.iter().map(|e| e.1.clone()).collect();
        let lambdas: &[f64] = if local { &a.lambdas } else { &[] };
        let m = steiner_check_matrix(c, &fs, &sets, lambdas, n, a.seed)?;
        let reports = if local { &m.local } else { &m.master };
        let labels: Vec<String> = if local {
            a.lambdas.iter().map(|l| l.to_string()).collect()
        } else {
            fs.iter().map(|f| f.to_string()).collect()
        };
        for (i, r) in reports.iter().enumerate() {
            let (li, ei) = (i / etas.len(), i % etas.len());
            out.table.push(vec![
                spec.as_str().into(),
                labels[li].as_str().into(),
                etas[ei].0.as_str().into(),
                r.lhs.into(),
                r.rhs.into(),
                r.stderr_combined.into(),
                r.sigmas.into(),
                r.pass.into(),
                method_name(&m.omega[ei]).into(),
            ]);
        }
        out.checks.extend(reports.iter().cloned());
    }
    Ok(out)
}

fn holder_curve(a: &RunArgs, cones: &[Cone]) -> Result<Outcome, CliError> {
    need_cones(cones, 1, CommandKind::HolderCurve)?;
    let c = &cones[0];
    let mut opts = HolderOptions {
        plane: parse_plane(&a.plane)?,
        n: samples(a, 200_000)?,
        seed: a.seed,
        ..Default::default()
    };
    if !a.thetas.is_empty() {
        opts.thetas = a.thetas.clone();
    }
    opts.ks = a.k.clone();
    let t = holder_experiment(c, &opts)?;
    let mut out = Outcome::new(Table::new(&[
        "theta",
        "k",
        "dbl",
        "dbl_over_sqrt_theta",
        "N",
        "seed",
    ]));
    for r in &t.rows {
        out.table.push(vec![
            r.theta.into(),
            r.k.into(),
            r.dbl.into(),
            r.ratio.into(),
            r.n.into(),
            r.seed.into(),
        ]);
    }
    for s in &t.summaries {
        out.checks.push(CheckReport::at_most(
            format!("k={} ratio spread", s.k),
            s.ratio_spread,
            RATIO_SPREAD_LIMIT,
            0.0,
        ));
        let mut inv = CheckReport::at_most(
            format!("k={} inversions", s.k),
            s.inversions as f64,
            MAX_INVERSIONS as f64,
            0.0,
        );
        inv.details = format!("{}; log-log slope {:.4}", inv.details, s.slope);
        out.checks.push(inv);
    }
    if a.certify && c.dim() <= 3 {
        let (i, j) = opts.plane;
        let hopts = HausdorffOptions {
            certify: true,
            seed: a.seed,
            ..Default::default()
        };
        for &theta in &opts.thetas {
            let r = angular_hausdorff(c, &c.rotated(i - 1, j - 1, theta)?, &hopts)?;
            out.checks.push(CheckReport::at_most(
                format!("delta_a at theta={theta}"),
                r.lower,
                theta,
                1e-9,
            ));
        }
    }
    Ok(out)
}

#[derive(Default)]
struct BoundCounts {
    points: u64,
    euclid_violations: u64,
    angular_checked: u64,
    angular_violations: u64,
    max_ratio: f64,
}

fn projection_bounds(a: &RunArgs, cones: &[Cone]) -> Result<Outcome, CliError> {
    need_cones(cones, 1, CommandKind::ProjectionBounds)?;
    let c = &cones[0];
    let n = samples(a, 10_000)?;
    let (i, j) = parse_plane(&a.plane)?;
    let thetas = if a.thetas.is_empty() {
        vec![0.01, 0.05, 0.2, 0.5]
    } else {
        a.thetas.clone()
    };
    let mut out = Outcome::new(Table::new(&[
        "theta",
        "points",
        "euclidean_violations",
        "angular_checked",
        "angular_violations",
        "max_gap_over_bound",
    ]));
    let d = c.dim();
    for &theta in &thetas {
        let other = c.rotated(i.wrapping_sub(1), j.wrapping_sub(1), theta)?;
        let parts = map_chunks(
            d,
            Sampling::new(n, a.seed, Substream::Points),
            |mut ch| -> conic_core::Result<BoundCounts> {
                let mut acc = BoundCounts::default();
                let mut x = vec![0.0; d];
                for _ in 0..ch.len {
                    ch.fill(&mut x);
                    let r = lemma_projection_stability(c, &other, &x, theta)?;
                    acc.points += 1;
                    acc.euclid_violations += u64::from(r.euclidean.failed());
                    if !r.angular.skipped {
                        acc.angular_checked += 1;
                        acc.angular_violations += u64::from(r.angular.failed());
                    }
                    if r.euclidean.rhs > 0.0 {
                        acc.max_ratio = acc.max_ratio.max(r.euclidean.lhs / r.euclidean.rhs);
                    }
                }
                Ok(acc)
            },
        );
        let mut t = BoundCounts::default();
        for p in parts {
            let p = p?;
            t.points += p.points;
            t.euclid_violations += p.euclid_violations;
            t.angular_checked += p.angular_checked;
            t.angular_violations += p.angular_violations;
            t.max_ratio = t.max_ratio.max(p.max_ratio);
        }
        out.table.push(vec![
            theta.into(),
            t.points.into(),
            t.euclid_violations.into(),
            t.angular_checked.into(),
            t.angular_violations.into(),
            t.max_ratio.into(),
        ]);
        out.checks.push(CheckReport::deterministic(
            format!("stability violations at theta={theta}"),
            (t.euclid_violations + t.angular_violations) as f64,
            0.0,
            0.0,
        ));
    }
    let suite = moreau_suite(c, Sampling::new(n, a.seed, Substream::ConeA))?;
    let mut r = CheckReport::deterministic(
        "moreau invariant failures",
        suite.failures() as f64,
        0.0,
        0.0,
    );
    r.details = format!("{}; {suite:?}", r.details);
    out.checks.push(r);
    Ok(out)
}

fn steiner_table(a: &RunArgs, cones: &[Cone]) -> Result<Outcome, CliError> {
    let d = match (a.d, cones.first()) {
        (Some(d), _) => d,
        (None, Some(c)) => c.dim(),
        (None, None) => return Err(CliError::Config("steiner-table needs --d or --cone".into())),
    };
    let lambdas = if a.lambdas.is_empty() {
        default_grid(d)
    } else {
        a.lambdas.clone()
    };
    let fs: Vec<TaggedFn> = if a.fs.is_empty() {
        Vec::new()
    } else {
        parse_fs(a)?
    };
    let mut out = Outcome::new(Table::new(&["quantity", "f", "k", "lambda", "value"]));
    let t = SteinerTable::new(d, &lambdas, None)?;
    for (j, &l) in lambdas.iter().enumerate() {
        for k in 1..d {
            out.table.push(vec![
                "g".into(),
                Cell::Empty,
                k.into(),
                l.into(),
                t.g[j * (d - 1) + k - 1].into(),
            ]);
        }
    }
    for f in &fs {
        let tf = SteinerTable::new(d, &lambdas, Some(f))?;
        for (k, v) in tf.i_values.iter().enumerate() {
            out.table.push(vec![
                "I".into(),
                f.to_string().into(),
                k.into(),
                Cell::Empty,
                (*v).into(),
            ]);
        }
    }
    if let Some(inv) = &t.inversion {
        for i in 0..d - 1 {
            for (j, &l) in lambdas.iter().enumerate() {
                out.table.push(vec![
                    "a".into(),
                    Cell::Empty,
                    (i + 1).into(),
                    l.into(),
                    inv.a(i, j).into(),
                ]);
            }
        }
        out.table.push(vec![
            "cond".into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            inv.cond.into(),
        ]);
    }
    Ok(out)
}

fn distance(a: &RunArgs, cones: &[Cone]) -> Result<Outcome, CliError> {
    need_cones(cones, 2, CommandKind::Distance)?;
    let (c, dd) = (&cones[0], &cones[1]);
    let n = samples(a, 10_000)?;
    let hopts = HausdorffOptions {
        certify: a.certify,
        seed: a.seed,
        ..Default::default()
    };
    let mut out = Outcome::new(Table::new(&[
        "quantity", "k", "value", "lower", "upper", "method",
    ]));
    let h = angular_hausdorff(c, dd, &hopts)?;
    let method = |m| {
        serde_json::to_value(m)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default()
    };
    out.table.push(vec![
        "delta_a".into(),
        Cell::Empty,
        h.value.into(),
        h.lower.into(),
        h.upper.into(),
        method(h.method).into(),
    ]);
    if c.is_polyhedral() && dd.is_polyhedral() {
        let ks: Vec<usize> = if a.k.is_empty() {
            (1..c.dim()).collect()
        } else {
            a.k.clone()
        };
        let sampling = Sampling::new(n, a.seed, Substream::ConeA);
        let mu = empirical_support_measures(c, &ks, &BiconicSet::All, sampling)?;
        let nu = empirical_support_measures(dd, &ks, &BiconicSet::All, sampling)?;
        for ((k, m1), m2) in ks.iter().zip(&mu).zip(&nu) {
            let r = dbl_distance(m1, m2)?;
            out.table.push(vec![
                "dbl".into(),
                (*k).into(),
                r.value.into(),
                r.lower.into(),
                r.upper.into(),
                method(r.method).into(),
            ]);
        }
    }
    if a.certify && c.dim() <= 3 {
        out.checks.push(polarity_isometry_check(c, dd, &hopts)?);
    }
    Ok(out)
}

fn support_measure(a: &RunArgs, cones: &[Cone]) -> Result<Outcome, CliError> {
    need_cones(cones, 1, CommandKind::SupportMeasure)?;
    let c = &cones[0];
    let d = c.dim();
    let n = samples(a, 10_000)?;
    let k = match a.k.as_slice() {
        [] => 1,
        [k] => *k,
        _ => {
            return Err(CliError::Config(
                "support-measure takes a single --k".into(),
            ))
        }
    };
    let etas = parse_etas(a, d)?;
    if etas.len() != 1 {
        return Err(CliError::Config(
            "support-measure takes a single --eta".into(),
        ));
    }
    let m = empirical_support_measures(
        c,
        &[k],
        &etas[0].1,
        Sampling::new(n, a.seed, Substream::ConeA),
    )?
    .remove(0);
    let names: Vec<String> = (1..=d)
        .map(|i| format!("u_{i}"))
        .chain((1..=d).map(|i| format!("v_{i}")))
        .chain(["w".into()])
        .collect();
    let mut table = Table::new(&names.iter().map(String::as_str).collect::<Vec<_>>());
    for at in &m.atoms {
        table.push(
            at.u.iter()
                .chain(&at.v)
                .chain([&at.w])
                .map(|&x| Cell::Num(x))
                .collect(),
        );
    }
    let mut out = Outcome::new(table);
    out.sidecar = Some(MeasureSidecar {
        d,
        k,
        n,
        seed: a.seed,
        cone_spec_hash: c.fingerprint(),
    });
    let mut r =
        CheckReport::deterministic("degenerate samples", m.degenerate_samples as f64, 0.0, 0.0);
    r.details = format!("{}; {} atoms", r.details, m.atoms.len());
    out.checks.push(r);
    Ok(out)
}
