//! Spectral laboratory for Lévy–Khintchine random matrix ensembles.
//!
//! Matrices are sampled from a characteristic triple `(σ², 0, Π)`; their
//! spectra are compared against three independent reconstructions of the
//! limit: the root spectral measure of a truncated weighted tree, population
//! dynamics on the resolvent fixed-point equation, and exact moments from a
//! colored-tree count.

pub mod cli;
pub mod ensembles;
pub mod error;
pub mod levy;
pub mod linalg;
pub mod moments;
pub mod pwist;
pub mod quad;
pub mod rde;
pub mod rng;
pub mod spectra;
pub mod stats;
pub mod wishart;

pub use error::{Error, Result};
pub use levy::{Atom, LevyCharacteristics, LevyMeasure, PowerPiece, SubordinatorCharacteristics};
