use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_chunks, Execution};
use crate::grid::{Space, Wavefunction};
use crate::params::{oscillator_length, PhysicalConstants, SystemSpec};

/// Largest tolerated `1 - sum |a_n|^2` for an expansion.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

// Fixed so that parallel and sequential sums agree bit for bit.
const CHUNK: usize = 256;

/// Normalized Hermite functions `h_0(xi) ..= h_{n_max}(xi)`, with the Gaussian
/// weight included, by the three-term recurrence.
pub fn hermite_functions(n_max: usize, xi: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n_max + 1);
    h.push(PI.powf(-0.25) * (-0.5 * xi * xi).exp());
    if n_max >= 1 {
        h.push(std::f64::consts::SQRT_2 * xi * h[0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
        h.push(next);
    }
    h
}

/// Eigenfunction `u_n(x)` of the oscillator with frequency `omega`.
pub fn oscillator_eigenfunction(
    n: usize,
    omega: f64,
    constants: &PhysicalConstants,
    x: f64,
) -> f64 {
    let beta0 = oscillator_length(omega, constants);
    hermite_functions(n, x / beta0)[n] / beta0.sqrt()
}

/// Coefficients `a_n = <u_n|psi_0>` of a state in the oscillator eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralExpansion {
    pub coefficients: Vec<Complex64>,
    /// `E_n = (n + 1/2) hbar omega`.
    pub energies: Vec<f64>,
    /// Index nearest the centroid `sum n |a_n|^2`.
    pub n0: usize,
    /// `E(n0) / hbar`.
    pub omega0: f64,
    pub hbar: f64,
    pub omega: f64,
}

impl SpectralExpansion {
    pub fn n_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.coefficients.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn autocorr(&self, t: f64) -> Complex64 {
        autocorr_from_spectrum(self, t)
    }

    pub fn anticorr(&self, t: f64) -> Complex64 {
        anticorr_from_spectrum(self, t)
    }
}

pub fn expand_in_oscillator_basis(
    psi0: &Wavefunction,
    omega: f64,
    constants: &PhysicalConstants,
    n_max: usize,
) -> Result<SpectralExpansion> {
    expand_in_oscillator_basis_with(
        psi0,
        omega,
        constants,
        n_max,
        DEFAULT_TAIL_TOLERANCE,
        Execution::default(),
    )
}

/// Expands `psi0` in the eigenbasis of the oscillator with frequency `omega`
/// and fails with [`Error::Truncation`] if more than `tail_tolerance` of the
/// norm lies beyond `n_max`.
pub fn expand_in_oscillator_basis_with(
    psi0: &Wavefunction,
    omega: f64,
    constants: &PhysicalConstants,
    n_max: usize,
    tail_tolerance: f64,
    exec: Execution,
) -> Result<SpectralExpansion> {
    SystemSpec::harmonic(omega)?;
    let grid = psi0.grid();
    if grid.space() != Space::Position {
        return Err(Error::Configuration(
            "the eigenbasis expansion needs a position-space state".into(),
        ));
    }
    let hbar = constants.hbar();
    let beta0 = oscillator_length(omega, constants);
    let scale = 1.0 / beta0.sqrt();
    let samples = psi0.samples();
    let partials = map_chunks(exec, samples, CHUNK, |offset, chunk| {
        let mut acc = vec![Complex64::new(0.0, 0.0); n_max + 1];
        for (j, psi) in chunk.iter().enumerate() {
            let i = offset + j;
            let w = grid.weight(i) * scale;
            let h = hermite_functions(n_max, grid.point(i) / beta0);
            for (a, hn) in acc.iter_mut().zip(&h) {
                *a += psi * (w * hn);
            }
        }
        acc
    });
    let mut coefficients = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for part in partials {
        for (a, p) in coefficients.iter_mut().zip(part) {
            *a += p;
        }
    }

    let norm = grid.integrate_real(&samples.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>());
    let captured: f64 = coefficients.iter().map(|a| a.norm_sqr()).sum();
    let tail = (norm - captured).abs();
    let mean_n = coefficients
        .iter()
        .enumerate()
        .map(|(n, a)| n as f64 * a.norm_sqr())
        .sum::<f64>()
        / captured.max(f64::MIN_POSITIVE);
    if tail > tail_tolerance {
        return Err(Error::Truncation {
            tail,
            tolerance: tail_tolerance,
            suggested_n_max: 2 * (n_max + 1),
        });
    }
    let energies: Vec<f64> = (0..=n_max)
        .map(|n| (n as f64 + 0.5) * hbar * omega)
        .collect();
    let n0 = (mean_n.round() as usize).min(n_max);
    Ok(SpectralExpansion {
        omega0: energies[n0] / hbar,
        coefficients,
        energies,
        n0,
        hbar,
        omega,
    })
}

/// `A(t) = sum |a_n|^2 exp(+i E_n t / hbar)`.
pub fn autocorr_from_spectrum(expansion: &SpectralExpansion, t: f64) -> Complex64 {
    signed_sum(expansion, t, false)
}

/// `A_bar(t) = sum (-1)^n |a_n|^2 exp(+i E_n t / hbar)`, using the parity of
/// the eigenfunctions.
pub fn anticorr_from_spectrum(expansion: &SpectralExpansion, t: f64) -> Complex64 {
    signed_sum(expansion, t, true)
}

fn signed_sum(expansion: &SpectralExpansion, t: f64, alternate: bool) -> Complex64 {
    expansion
        .coefficients
        .iter()
        .zip(&expansion.energies)
        .enumerate()
        .map(|(n, (a, e))| {
            let sign = if alternate && n % 2 == 1 { -1.0 } else { 1.0 };
            Complex64::from_polar(sign * a.norm_sqr(), e * t / expansion.hbar)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{closed_form_anticorr, closed_form_autocorr, eval_wavefunction};
    use crate::grid::Grid;
    use crate::params::PacketParams;

    fn nat() -> PhysicalConstants {
        PhysicalConstants::natural()
    }

    fn expand(p: &PacketParams, omega: f64, n_max: usize) -> Result<SpectralExpansion> {
        let g = Grid::closed(-20.0, 20.0, 4001, Space::Position).unwrap();
        let sys = SystemSpec::harmonic(omega).unwrap();
        let psi = eval_wavefunction(&sys, p, Space::Position, &g, 0.0).unwrap();
        expand_in_oscillator_basis(&psi, omega, &p.constants(), n_max)
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let g = Grid::closed(-30.0, 30.0, 6001, Space::Position).unwrap();
        let table: Vec<Vec<f64>> = g
            .points()
            .iter()
            .map(|&x| hermite_functions(60, x))
            .collect();
        for m in [0, 1, 7, 30, 60] {
            for n in [0, 1, 7, 30, 60] {
                let f: Vec<f64> = table.iter().map(|h| h[m] * h[n]).collect();
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((g.integrate_real(&f) - want).abs() < 1e-10, "{m} {n}");
            }
        }
    }

    #[test]
    fn hermite_functions_match_explicit_polynomials() {
        for &xi in &[-1.7, 0.0, 0.4, 2.2] {
            let h = hermite_functions(3, xi);
            let w = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
            let h2 = (4.0 * xi * xi - 2.0) / (8.0f64).sqrt() * w;
            let h3 = (8.0 * xi.powi(3) - 12.0 * xi) / (48.0f64).sqrt() * w;
            assert!((h[2] - h2).abs() < 1e-14);
            assert!((h[3] - h3).abs() < 1e-14);
        }
    }

    #[test]
    fn high_order_recurrence_stays_finite() {
        let h = hermite_functions(400, 25.0);
        assert!(h.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn eigenfunction_scales_with_oscillator_length() {
        let c = PhysicalConstants::new(0.5, 2.0).unwrap();
        let beta0 = oscillator_length(3.0, &c);
        let u = oscillator_eigenfunction(2, 3.0, &c, 0.3);
        assert!((u - hermite_functions(2, 0.3 / beta0)[2] / beta0.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ground_state_is_a_single_coefficient() {
        let p = PacketParams::min_uncertainty(1.0, 0.0, 0.0, nat()).unwrap();
        let e = expand(&p, 1.0, 30).unwrap();
        assert!((e.coefficients[0] - 1.0).norm() < 1e-12);
        assert!(e.coefficients[1..].iter().all(|a| a.norm() < 1e-12));
        assert_eq!(e.n0, 0);
        assert!((e.omega0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coherent_weights_match_fourier_coefficients_of_closed_form() {
        let omega = 1.0;
        let p = PacketParams::min_uncertainty(omega, 1.2, -0.7, nat()).unwrap();
        let e = expand(&p, omega, 50).unwrap();
        assert!((e.total_weight() - 1.0).abs() < 1e-8);
        // |a_n|^2 are the Fourier coefficients of exp(-i wt/2) A(t) over one period.
        let sys = SystemSpec::harmonic(omega).unwrap();
        let m = 256;
        for n in 0..20 {
            let mut c = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let theta = 2.0 * PI * j as f64 / m as f64;
                let a = closed_form_autocorr(&sys, &p, theta / omega).unwrap().a;
                c += a * Complex64::from_polar(1.0, -(n as f64 + 0.5) * theta);
            }
            c /= m as f64;
            assert!((c.re - e.coefficients[n].norm_sqr()).abs() < 1e-10, "n={n}");
            assert!(c.im.abs() < 1e-12);
        }
        // And the centroid is the coherent mean number 0.72 + 0.245.
        assert_eq!(e.n0, 1);
    }

    #[test]
    fn wide_centred_packet_has_only_even_terms() {
        let omega = 1.0;
        let beta0 = oscillator_length(omega, &nat());
        let p = PacketParams::with_beta(2.0 * beta0, 0.0, 0.0, nat()).unwrap();
        let e = expand(&p, omega, 120).unwrap();
        for (n, a) in e.coefficients.iter().enumerate() {
            if n % 2 == 1 {
                assert!(a.norm() < 1e-12, "a_{n} = {a}");
            }
        }
        assert!((e.total_weight() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn truncation_is_reported() {
        let p = PacketParams::min_uncertainty(1.0, 5.0, 0.0, nat()).unwrap();
        match expand(&p, 1.0, 5) {
            Err(Error::Truncation {
                suggested_n_max, ..
            }) => assert!(suggested_n_max > 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spectral_sum_matches_closed_form_over_three_periods() {
        let omega = 1.3;
        let p = PacketParams::min_uncertainty(omega, 0.9, 0.6, nat()).unwrap();
        let sys = SystemSpec::harmonic(omega).unwrap();
        let e = expand(&p, omega, 50).unwrap();
        let period = 2.0 * PI / omega;
        for k in 0..=300 {
            let t = 3.0 * period * k as f64 / 300.0;
            let exact = closed_form_autocorr(&sys, &p, t).unwrap();
            assert!((e.autocorr(t) - exact.a).norm() < 1e-8, "t={t}");
            let bar = closed_form_anticorr(&p, omega, t).unwrap();
            assert!((e.anticorr(t) - bar).norm() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn single_level_is_a_pure_phase() {
        let e = SpectralExpansion {
            coefficients: vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
            energies: vec![0.5, 1.5],
            n0: 1,
            omega0: 1.5,
            hbar: 1.0,
            omega: 1.0,
        };
        for &t in &[0.0, 0.3, 4.0] {
            let a = e.autocorr(t);
            assert!((a - Complex64::from_polar(1.0, 1.5 * t)).norm() < 1e-15);
        }
    }

    #[test]
    fn parallel_and_sequential_expansions_agree_exactly() {
        let p = PacketParams::with_beta(0.8, 0.5, 0.3, nat()).unwrap();
        let g = Grid::closed(-20.0, 20.0, 3001, Space::Position).unwrap();
        let sys = SystemSpec::harmonic(1.0).unwrap();
        let psi = eval_wavefunction(&sys, &p, Space::Position, &g, 0.0).unwrap();
        let run =
            |exec| expand_in_oscillator_basis_with(&psi, 1.0, &nat(), 60, 1e-10, exec).unwrap();
        assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    }
}
