//! Numerical Kobayashi geometry of convex domains in C^d.
//!
//! The crate computes boundary distances, exact model-domain Kobayashi
//! distances and certified bounds on general convex domains, geodesic-pair
//! exponents, affine rescalings into the normal family `K_d`, and boundary
//! exponent detectors for strong pseudoconvexity.

pub mod config;
pub mod detectors;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod format;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod rescaling;

pub use config::{Tolerances, VerdictConfig};
pub use domain::{ConvexDomain, DomainDoc, HalfSpace, Shape};
pub use error::{Error, Result};
pub use fit::ExponentFit;
pub use linalg::{AffineMap, CMatrix, CVector};
