pub mod biconic;
pub mod cone;
pub mod cone_spec;
pub mod error;
pub mod functions;
pub mod linalg;
pub mod lp;
pub mod measure_io;
pub mod measures;
pub mod metrics;
pub mod nnls;
pub mod projection;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod steiner;

pub use biconic::{BiconicSet, Cap};
pub use cone::{
    angular_distance, contains, dual, in_angular_parallel_set, make_cone, Cone, ConeKind, ConeSpec,
};
pub use cone_spec::{load_cone, parse_cone_spec};
pub use error::{ConeError, Result};
pub use functions::{Growth, TaggedFn};
pub use projection::{face_dimension, project, ProjectionResult, Projector};
pub use report::CheckReport;
pub use rng::{gaussian_stream, Sampling, Substream};
