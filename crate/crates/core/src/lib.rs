//! Core primitives for benchmarking randomized Max-Cut solvers shot by shot.
//!
//! The crate is organized around the stages of a benchmark:
//!
//! * [`graph`] — weighted graph instances, cuts, and cut evaluation;
//! * [`name`] — the instance naming scheme used for files on disk;
//! * [`gml`] — the GML text subset instances are stored in;
//! * [`oracle`] — brute-force enumeration of the full cut-value distribution;
//! * [`gw`] — Goemans-Williamson: low-rank SDP solve, analytic expectation,
//!   hyperplane rounding, and rounding-sample statistics;
//! * [`qaoa`] — noiseless QAOA statevector simulation and shot sampling;
//! * [`gen`] — random instance generation with hardness guards;
//! * [`stats`] — best-so-far matrices, percentile curves, bootstrap bands,
//!   and threshold-crossing fractions.
//!
//! Everything is deterministic for a fixed seed: randomness flows through
//! counter-based streams from [`rng`], so results do not depend on execution
//! order. The crate is `no_std` compatible (with `alloc`); file formats and
//! orchestration live in the companion CLI crate.
//!
//! ```
//! use cutbench_core::{graph::WeightedGraph, gw, oracle, rng::CounterRng};
//!
//! // A unit triangle: optimum 2, SDP relaxation value 9/4.
//! let g = WeightedGraph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])?;
//! let profile = oracle::max_cut(&g, oracle::DEFAULT_ENUM_CAP)?;
//! assert_eq!(profile.c_max, 2.0);
//!
//! let fact = gw::solve_sdp(&g, &gw::SolveConfig::default())?;
//! assert!((fact.sdp_value() - 2.25).abs() < 1e-6);
//!
//! // Rounding the optimal vectors cuts two of the three edges every time.
//! let mut direction = vec![0.0; fact.rank()];
//! CounterRng::from_seed(1, "demo", 0).unit_vector(&mut direction);
//! let cut = gw::hyperplane_round(&fact, &direction)?;
//! assert_eq!(g.cut_value(&cut)?, 2.0);
//! # Ok::<(), cutbench_core::Error>(())
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod gen;
pub mod gml;
pub mod graph;
pub mod gw;
mod math;
pub mod name;
pub mod oracle;
pub mod qaoa;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Cut, WeightedGraph};
pub use name::{InstanceName, ModelParams};
pub use oracle::{CutDistribution, InstanceProfile};
