//! Gaussian wave packets in four model systems and their autocorrelation
//! functions `A(t) = <psi_t|psi_0>`.
//!
//! The crate is organised in four layers:
//!
//! * [`params`], [`grid`] and [`branch`]: physical parameters, uniform grids,
//!   sampled wavefunctions and the phase-continuous complex square root.
//! * [`analytic`]: closed-form wavefunctions, moments and `A(t)` for the free
//!   particle, uniform acceleration, the harmonic and the inverted oscillator.
//! * [`numeric`]: independent numerical routes (overlap quadrature, the
//!   position/momentum transform pair, split-operator propagation and the
//!   oscillator eigenbasis expansion).
//! * [`analysis`]: timescales, the Mandelstam-Tamm bound, saturation
//!   asymptotes and series assembly for Argand output.
//!
//! Data-parallel loops go through [`exec::Execution`]; with the `parallel`
//! feature disabled every path runs sequentially.

pub mod analysis;
pub mod analytic;
pub mod branch;
pub mod error;
pub mod exec;
pub mod grid;
pub mod numeric;
pub mod params;

pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::{Grid, GridConvention, Space, Wavefunction};
pub use num_complex::Complex64;
pub use params::{DerivedScales, PacketParams, PhysicalConstants, SystemSpec};
