//! Scaling of `d_bL(Ω_k(C, ·), Ω_k(D_θ, ·))` against `√θ` along a rotation
//! family `D_θ`, with common random numbers for `C` and `D_θ`.

use serde::{Deserialize, Serialize};

use super::dbl::dbl_distance;
use crate::biconic::BiconicSet;
use crate::cone::Cone;
use crate::error::{ConeError, Result};
use crate::measures::empirical_support_measures;
use crate::rng::{Sampling, Substream};

/// Largest allowed ratio spread `max/min` of `d_bL/√θ` over the schedule.
pub const RATIO_SPREAD_LIMIT: f64 = 10.0;
/// Allowed increases of `d_bL` as `θ` decreases.
pub const MAX_INVERSIONS: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct HolderOptions {
    /// Rotation plane, 1-based coordinates.
    pub plane: (usize, usize),
    pub thetas: Vec<f64>,
    /// Degrees; empty means `1..d−1`.
    pub ks: Vec<usize>,
    pub n: u64,
    pub seed: u64,
}

impl Default for HolderOptions {
    fn default() -> Self {
        HolderOptions {
            plane: (1, 2),
            thetas: vec![0.4, 0.2, 0.1, 0.05],
            ks: Vec::new(),
            n: 200_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderRow {
    pub theta: f64,
    pub k: usize,
    pub dbl: f64,
    /// Lower end of the distance bracket.
    pub lower: f64,
    pub ratio: f64,
    pub n: u64,
    pub seed: u64,
    /// `√(w/N)` with `w` the larger total mass of the two measures.
    pub stderr_proxy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderSummary {
    pub k: usize,
    /// `max/min` of the ratio column.
    pub ratio_spread: f64,
    /// Number of times `d_bL` increases as `θ` decreases.
    pub inversions: usize,
    /// Least-squares slope of `log d_bL` against `log θ`.
    pub slope: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderTable {
    pub rows: Vec<HolderRow>,
    pub summaries: Vec<HolderSummary>,
}

impl HolderTable {
    pub fn pass(&self) -> bool {
        self.summaries.iter().all(|s| s.pass)
    }
}

fn summarize(k: usize, rows: &[&HolderRow]) -> HolderSummary {
    let mut sorted: Vec<&HolderRow> = rows.to_vec();
    sorted.sort_by(|a, b| b.theta.total_cmp(&a.theta));
    let (lo, hi) = sorted.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.ratio), hi.max(r.ratio))
    });
    let ratio_spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let inversions = sorted.windows(2).filter(|w| w[1].dbl > w[0].dbl).count();
    let pts: Vec<(f64, f64)> = sorted
        .iter()
        .filter(|r| r.dbl > 0.0)
        .map(|r| (r.theta.ln(), r.dbl.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    HolderSummary {
        k,
        ratio_spread,
        inversions,
        slope,
        pass: ratio_spread <= RATIO_SPREAD_LIMIT && inversions <= MAX_INVERSIONS,
    }
}

/// Runs the schedule. Both cones are sampled from the same stream, so atoms
/// of `C` and `D_θ` with equal ids come from the same Gaussian vector.
pub fn holder_experiment(c: &Cone, opts: &HolderOptions) -> Result<HolderTable> {
    let d = c.dim();
    let (i, j) = opts.plane;
    if i == 0 || j == 0 || i > d || j > d || i == j {
        return Err(ConeError::OutOfRange(format!(
            "rotation plane ({i},{j}) invalid in dimension {d}"
        )));
    }
    if opts.thetas.is_empty() {
        return Err(ConeError::OutOfRange("empty theta schedule".into()));
    }
    if let Some(t) = opts.thetas.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
        return Err(ConeError::OutOfRange(format!("theta {t} outside (0, 1]")));
    }
    let ks: Vec<usize> = if opts.ks.is_empty() {
        (1..d).collect()
    } else {
        opts.ks.clone()
    };
    let sampling = Sampling::new(opts.n, opts.seed, Substream::ConeA);
    let base = empirical_support_measures(c, &ks, &BiconicSet::All, sampling)?;
    let mut rows = Vec::with_capacity(ks.len() * opts.thetas.len());
    for &theta in &opts.thetas {
        let dt = c.rotated(i - 1, j - 1, theta)?;
        let rotated = empirical_support_measures(&dt, &ks, &BiconicSet::All, sampling)?;
        for (mu, nu) in base.iter().zip(&rotated) {
            let r = dbl_distance(mu, nu)?;
            let w = mu.total_weight().max(nu.total_weight());
            rows.push(HolderRow {
                theta,
                k: mu.k,
                dbl: r.value,
                lower: r.lower,
                ratio: r.value / theta.sqrt(),
                n: opts.n,
                seed: opts.seed,
                stderr_proxy: (w / opts.n as f64).sqrt(),
            });
        }
    }
    let summaries = ks
        .iter()
        .map(|&k| summarize(k, &rows.iter().filter(|r| r.k == k).collect::<Vec<_>>()))
        .collect();
    Ok(HolderTable { rows, summaries })
}
