//! Topological extreme-event detection for baskets of aligned price series.
//!
//! The pipeline turns daily closes into log-returns, reads each day as a
//! point in R^n (one coordinate per series), slides a window over that point
//! cloud and computes Vietoris–Rips persistent homology of every window. The
//! H1 diagrams are summarised by persistence-landscape L¹/L² norms and by the
//! Wasserstein distance between consecutive windows; values above
//! `μ + 4σ` of a signal mark extreme events.
//!
//! ```
//! use tda_core::cloud::PointCloud;
//! use tda_core::persistence::{cloud_diagrams, HomologyOptions};
//!
//! let square = PointCloud::from_points(&[[2.0, 2.0], [2.0, 6.0], [6.0, 2.0], [6.0, 6.0]]);
//! let dgms = cloud_diagrams(&square, &HomologyOptions::default()).unwrap();
//! let loop_bar = dgms.get(1).points()[0];
//! assert_eq!((loop_bar.birth, loop_bar.death), (4.0, 32f64.sqrt()));
//! ```

pub mod cloud;
pub mod detect;
pub mod fmt;
pub mod ingest;
pub mod landscape;
pub mod matching;
pub mod persistence;
pub mod pipeline;
pub mod rips;
pub mod synth;
pub mod wasserstein;
