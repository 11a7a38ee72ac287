//! Transmission, noise and critical-field modelling of a kinetic-inductance
//! traveling-wave parametric amplifier.
//!
//! The S21 pipeline runs bottom-up: [`materials`] turns temperature and field
//! into a surface impedance, [`microstrip`] into per-unit-length line
//! parameters, and [`network`] cascades the modulated-stub unit cells into a
//! device-level transmission spectrum.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod constants;
pub mod critical_field;
pub mod error;
pub mod execution;
pub mod materials;
pub mod microstrip;
pub mod network;
pub mod noise;
pub mod quadrature;
pub mod smoothing;
pub mod special;
pub mod spectrum;

pub use error::{Error, Result};
pub use execution::Execution;
pub use materials::{Environment, FieldOrientation, Material};
pub use microstrip::Geometry;
pub use network::{CellLayout, Device, TwoPort};
pub use noise::{NoiseModel, StripGeometry};
pub use spectrum::{Spectrum, SpectrumKind, SpectrumValues};
