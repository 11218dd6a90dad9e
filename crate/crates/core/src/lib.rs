//! Numerical checks of the inequality "mean of a convex function over a
//! convex body is at most its mean over the boundary".

pub mod checker;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod insphere;
mod linalg;
pub mod lp;
pub mod measures;
mod par;
pub mod quadrature;
pub mod search;
pub mod zoo;

pub use checker::{
    cone_bound_check, insphere_bound_check, jensen_gap, jensen_verdict, suite_for, ConeBound, GapResult, InsphereBound,
    JensenReport, Overall, Verdict,
};
pub use error::{Error, Result};
pub use functions::{AffinePiece, ConvexFunc};
pub use geometry::{Ball, Cone, HalfSpace, Parallelotope, Point, Polytope, Shape, Simplex};
pub use insphere::{chebyshev_center, tangency_report, InsphereResult};
pub use measures::{body_centroid, boundary_centroid, centroid_gap, centroid_report, measures, CentroidReport};
pub use quadrature::{mean_over_body, mean_over_boundary, mean_over_segment, Estimate, Method, QuadratureRequest};
pub use search::{affine_worst_case, maxaffine_search, SearchConfig, SearchResult};
