//! Two-layer geometric multiplex networks on the hyperbolic disc.
//!
//! The crate covers the full desk-scale pipeline:
//!
//! - [`geom`] — hyperbolic-disc primitives: layer parameters, distances,
//!   Fermi-Dirac connection probabilities, radial sampling, degree/radius maps.
//! - [`coupling`] — cross-layer coordinate correlation: Gumbel-Hougaard copula
//!   for radial coordinates, truncated-Gaussian arc offsets for angles.
//! - [`generator`] — single hyperbolic layers, correlated two-layer
//!   multiplexes, and link persistence between layers.
//! - [`embedding`] — maximum-likelihood coordinate inference for an observed
//!   layer, plus likelihood evaluators over one or two layers.
//! - [`analytics`] — empirical binned statistics: trans-layer and within-layer
//!   connection probabilities, conditional mean distances, edge overlap,
//!   link-persistence estimation, clustering and degree diagnostics.
//! - [`theory`] — closed-form and numerically integrated reference
//!   predictions, including the conditional hyperbolic-distance CDF/PDF.
//! - [`linkpred`] — trans-layer link-prediction scores and AUROC/AUPR.
//! - [`io`] — edge-list/coordinate file formats, CSV export, run manifests.
//!
//! Supporting machinery lives in [`graph`] (adjacency structure), [`rng`]
//! (deterministic counter-based pair streams), [`quad`] (adaptive
//! Gauss-Kronrod quadrature) and [`stats`] (small statistical helpers used
//! throughout the test suites and analytics).

pub mod analytics;
pub mod coupling;
pub mod embedding;
pub mod error;
pub mod generator;
pub mod geom;
pub mod graph;
pub mod io;
pub mod linkpred;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
