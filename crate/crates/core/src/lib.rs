//! Executable constructions certifying that finite families of unit
//! trigonometric polynomials are never inner `(2 - ε)`-nets, with the
//! harmonic-analysis machinery they rest on.

pub mod error;
pub mod group;
pub mod disc;
pub mod trigpoly;
pub mod witness;
pub mod spectra;
pub mod lemmas;
pub mod cli;

pub use error::{Error, Result};
