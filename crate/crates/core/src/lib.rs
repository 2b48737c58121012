//! Quadruplet U-statistics on row-column exchangeable bipartite networks.
//!
//! The crate covers the whole pipeline used to study row heterogeneity of
//! weighted bipartite networks:
//!
//! * [`network`] and [`sequence`]: the observed matrix and the `(N, c)`
//!   indexing of growing dimensions,
//! * [`kernels`] and [`fast`]: quadruplet kernels, the brute-force
//!   U-statistic and its closed-form matrix counterpart,
//! * [`wbedd`]: the power-law WBEDD generator and its true moments,
//! * [`inference`] and [`comparison`]: the `F2` estimator, its variance
//!   estimators, confidence intervals and the two-network test,
//! * [`harness`]: seeded Monte-Carlo experiments written as CSV.
//!
//! Replicate loops run on rayon when the `parallel` feature is enabled
//! (the default) and fall back to plain iterators otherwise. Every
//! experiment is a pure function of its configuration and master seed.

pub mod comparison;
pub mod error;
pub mod fast;
pub mod harness;
pub mod inference;
pub mod kernels;
pub mod network;
pub mod numeric;
pub mod par;
pub mod sequence;
pub mod wbedd;

pub use error::{Error, Result};
pub use network::{BipartiteNetwork, Quadruplet};
