//! Distances between cones and between their support measures.

mod dbl;
mod hausdorff;
mod holder;

pub use dbl::{
    coupled_transport_bound, dbl_distance, dbl_distance_with, dbl_metric_axioms_check, DblOptions,
    EXACT_LIMIT,
};
pub use hausdorff::{
    angular_hausdorff, directed_angular_deviation, polarity_isometry_check, HausdorffOptions,
};
pub use holder::{
    holder_experiment, HolderOptions, HolderRow, HolderSummary, HolderTable, MAX_INVERSIONS,
    RATIO_SPREAD_LIMIT,
};

use serde::{Deserialize, Serialize};

/// How a distance value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    /// Optimal transportation LP.
    ExactLp,
    /// Landmark aggregation bracket for supports too large for the exact LP.
    DualAscent,
    /// Known by construction.
    Construction,
    /// Best value over generators and axis rays.
    Generators,
    /// Multistart projected ascent.
    Ascent,
    /// Certified subdivision of the sphere.
    CertifiedGrid,
}

/// Witness for a distance value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Certificate {
    /// Optimal bounded 1-Lipschitz function on the merged support:
    /// `points[i]` in `R^{2d}`, signed mass `delta[i]`, value `f[i]`.
    Lp {
        points: Vec<Vec<f64>>,
        delta: Vec<f64>,
        f: Vec<f64>,
    },
    /// Unit ray of one cone attaining the reported angular deviation from the other.
    Ray { ray: Vec<f64>, from_first: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: f64,
    pub method: DistanceMethod,
    pub certificate: Option<Certificate>,
    pub iterations: usize,
    /// `upper − lower`.
    pub gap: f64,
    pub lower: f64,
    pub upper: f64,
}
