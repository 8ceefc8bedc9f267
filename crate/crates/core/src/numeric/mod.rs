//! Numerical routes to `A(t)` that are independent of the closed forms:
//! overlap quadrature, the position/momentum transform pair, split-operator
//! propagation and the oscillator eigenbasis expansion.

mod propagate;
mod spectral;
mod transform;

pub use propagate::{
    propagate, propagate_with, PropagatorConfig, Scheme, SplitOperator, EDGE_BAND,
};
pub use spectral::{
    anticorr_from_spectrum, autocorr_from_spectrum, expand_in_oscillator_basis,
    expand_in_oscillator_basis_with, hermite_functions, oscillator_eigenfunction,
    SpectralExpansion, DEFAULT_TAIL_TOLERANCE,
};
pub use transform::FourierPair;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Wavefunction, DEFAULT_BOUNDARY_TOLERANCE};

/// `<bra|ket>` by quadrature on their common grid.
pub fn overlap(bra: &Wavefunction, ket: &Wavefunction) -> Result<Complex64> {
    overlap_with_tolerance(bra, ket, DEFAULT_BOUNDARY_TOLERANCE)
}

pub fn overlap_with_tolerance(
    bra: &Wavefunction,
    ket: &Wavefunction,
    boundary_tolerance: f64,
) -> Result<Complex64> {
    if !bra.grid().matches(ket.grid()) {
        return Err(Error::Configuration(format!(
            "overlap of wavefunctions on different grids: {:?} vs {:?}",
            bra.grid(),
            ket.grid()
        )));
    }
    bra.check_boundary(boundary_tolerance)?;
    ket.check_boundary(boundary_tolerance)?;
    let prod: Vec<Complex64> = bra
        .samples()
        .iter()
        .zip(ket.samples())
        .map(|(b, k)| b.conj() * k)
        .collect();
    Ok(bra.grid().integrate(&prod))
}

/// `||a - b||^2` by quadrature.
pub fn distance_squared(a: &Wavefunction, b: &Wavefunction) -> Result<f64> {
    if !a.grid().matches(b.grid()) {
        return Err(Error::Configuration(
            "distance between wavefunctions on different grids".into(),
        ));
    }
    let d: Vec<f64> = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y).norm_sqr())
        .collect();
    Ok(a.grid().integrate_real(&d))
}
