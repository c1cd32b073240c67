//! Probabilistic population codes for variable human decision-making.
//!
//! The crate simulates how a population of Poisson-spiking neurons encodes
//! a rating decision, decodes the noisy activity back into a point estimate
//! with four decoder functions, turns repeated decodes into feedback
//! distributions, fits population parameters ("cognition vectors") to
//! empirical rating distributions by brute-force Jensen-Shannon
//! minimization, and derives neurodynamic correlates (spiking-rate
//! statistics and EEG-frequency estimates) from the fitted ensemble.
//!
//! ## Modules
//!
//! - [`model`] — tuning curves, populations, noise-free responses
//! - [`noise`] — Poisson response noise and reproducible RNG streams
//! - [`decoders`] — MVD, WAD, MLD and MAD decoder functions
//! - [`feedback`] — Monte-Carlo feedback distributions and the JSD metric
//! - [`fitting`] — parameter grids, model libraries, best-fit search,
//!   parameter correlations
//! - [`neurodynamics`] — spike trains, sine fitting, EEG frequencies,
//!   rate statistics
//! - [`data`] — rating datasets, empirical distributions, the synthetic
//!   study generator
//! - [`cli`] — the `popcode` command-line pipeline
//!
//! ## Example
//!
//! ```
//! use popcode::{
//!     CognitionVector, DecoderKind, EstimationScale, RngStream,
//!     feedback::{simulate_feedback, Binning},
//!     decoders::SGrid,
//! };
//!
//! let scale = EstimationScale::default(); // the 5-star scale
//! let xi = CognitionVector::new(100, 1.0, 1.0, 5.0, 3.0, &scale)?;
//! let grid = SGrid::with_default_step(scale)?;
//! let dist = simulate_feedback(
//!     &xi,
//!     &scale,
//!     &DecoderKind::Mld,
//!     &grid,
//!     2000,
//!     &RngStream::root(42),
//!     Binning::IntegerStars,
//! )?;
//! assert!((dist.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
//! # Ok::<(), popcode::Error>(())
//! ```
//!
//! The `examples/` directory holds one runnable walkthrough per capability;
//! `cargo run --release --example feedback_distributions` is a good start.

pub mod cli;
pub mod data;
pub mod decoders;
mod error;
pub mod feedback;
pub mod fitting;
pub mod model;
pub mod neurodynamics;
pub mod noise;
pub mod svg;

pub use decoders::DecoderKind;
pub use error::{Error, Result};
pub use model::{CognitionVector, EstimationScale, Population, TuningParams};
pub use noise::{PopulationResponse, RngStream};
