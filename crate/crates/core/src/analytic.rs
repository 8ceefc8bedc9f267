//! Closed-form Gaussian packets, moments and autocorrelation functions for the
//! free particle, uniform acceleration, the harmonic and the inverted
//! oscillator.
//!
//! Every packet starts from the same initial state
//! `psi(x,0) = (sqrt(pi) beta)^(-1/2) exp(i p0 (x - x0)/hbar) exp(-(x-x0)^2 / 2 beta^2)`
//! with `beta = alpha hbar`. Autocorrelations follow the convention
//! `A(t) = <psi_t|psi_0> = integral psi*(x,t) psi(x,0) dx`, so a stationary
//! state contributes `exp(+i E t / hbar)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::branch::{anchored_sqrt, continuous_sqrt};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{Grid, Space, Wavefunction};
use crate::params::{oscillator_length, PacketParams, SystemSpec};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One sample of the autocorrelation (and optionally anticorrelation)
/// function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutocorrSample {
    pub t: f64,
    pub a: Complex64,
    pub a_bar: Option<Complex64>,
    pub modulus_sq: f64,
    /// `||psi_t - psi_0||^2 = 2 (1 - Re A)`.
    pub hilbert_distance: f64,
}

impl AutocorrSample {
    pub fn new(t: f64, a: Complex64, a_bar: Option<Complex64>) -> Self {
        Self {
            t,
            a,
            a_bar,
            modulus_sq: a.norm_sqr(),
            hilbert_distance: 2.0 * (1.0 - a.re),
        }
    }
}

/// Time-dependent pieces of the oscillator propagator solution
/// `psi(x,t) = (L sqrt(pi))^(-1/2) exp(S[x,t] / (2 beta L))`.
///
/// For the harmonic oscillator `L(t) = beta cos(wt) + i (hbar / m w beta) sin(wt)`;
/// for the inverted oscillator the same expression with `cosh`/`sinh`
/// (there called `B(t)`). `S[x,t]` is quadratic in `x` and stored by its
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorKernel {
    length: Complex64,
    sqrt_length: Complex64,
    s_coeffs: [Complex64; 3],
    beta: f64,
    inverted: bool,
}

impl OscillatorKernel {
    pub fn harmonic(params: &PacketParams, omega: f64, t: f64) -> Result<Self> {
        let theta = omega * t;
        let (s, co) = theta.sin_cos();
        let mut k = Self::build(params, omega, co, s, 1.0);
        // L(t) circles the origin once per period; keep sqrt(L) continuous so
        // that psi(x, t + T_cl) = -psi(x, t).
        k.sqrt_length = anchored_sqrt(k.length, theta)?;
        k.inverted = false;
        Ok(k)
    }

    pub fn inverted(params: &PacketParams, omega_tilde: f64, t: f64) -> Result<Self> {
        let theta = omega_tilde * t;
        let mut k = Self::build(params, omega_tilde, theta.cosh(), theta.sinh(), -1.0);
        // Re B(t) > 0, the principal root is continuous.
        k.sqrt_length = continuous_sqrt(k.length, None)?;
        k.inverted = true;
        Ok(k)
    }

    // `sign` is +1 for the oscillator and -1 for the inverted oscillator; it
    // only enters the imaginary part of the x^2 coefficient.
    fn build(params: &PacketParams, w: f64, co: f64, s: f64, sign: f64) -> Self {
        let hbar = params.hbar();
        let m = params.mass();
        let beta = params.beta();
        let (x0, p0) = (params.x0(), params.p0());
        let length = c(beta * co, hbar / (m * w * beta) * s);
        let s0 = c(
            -x0 * x0 * co - 2.0 * x0 * p0 * s / (m * w),
            -beta * beta * p0 * p0 * s / (m * w * hbar),
        );
        let s1 = c(2.0 * x0, 2.0 * beta * beta * p0 / hbar);
        let s2 = -c(co, sign * m * w * beta * beta * s / hbar);
        Self {
            length,
            sqrt_length: length,
            s_coeffs: [s0, s1, s2],
            beta,
            inverted: false,
        }
    }

    /// `L(t)` (or `B(t)` for the inverted oscillator).
    pub fn length(&self) -> Complex64 {
        self.length
    }

    /// Branch-continuous `sqrt(L(t))`.
    pub fn sqrt_length(&self) -> Complex64 {
        self.sqrt_length
    }

    pub fn is_inverted(&self) -> bool {
        self.inverted
    }

    /// `S[x,t]`.
    pub fn s_at(&self, x: f64) -> Complex64 {
        let [s0, s1, s2] = self.s_coeffs;
        s0 + x * (s1 + x * s2)
    }

    /// The propagator solution at `x`, without any global phase adjustment.
    pub fn amplitude(&self, x: f64) -> Complex64 {
        let pre = 1.0 / (self.sqrt_length * PI.powf(0.25));
        pre * (self.s_at(x) / (2.0 * self.beta * self.length)).exp()
    }
}

/// Evaluates closed forms at a fixed time.
enum Evaluator {
    FreePosition {
        params: PacketParams,
        t: f64,
        root: Complex64,
        force: f64,
    },
    Momentum {
        params: PacketParams,
        t: f64,
        force: f64,
    },
    Oscillator {
        kernel: OscillatorKernel,
        phase: Complex64,
    },
}

impl Evaluator {
    fn new(system: &SystemSpec, params: &PacketParams, space: Space, t: f64) -> Result<Self> {
        system.validate()?;
        let force = match *system {
            SystemSpec::UniformAcceleration { force } => force,
            _ => 0.0,
        };
        match (system, space) {
            (
                SystemSpec::FreeParticle | SystemSpec::UniformAcceleration { .. },
                Space::Position,
            ) => {
                let t0 = params.spreading_time();
                let root = continuous_sqrt(c(1.0, t / t0), None)?;
                Ok(Evaluator::FreePosition {
                    params: *params,
                    t,
                    root,
                    force,
                })
            }
            (
                SystemSpec::FreeParticle | SystemSpec::UniformAcceleration { .. },
                Space::Momentum,
            ) => Ok(Evaluator::Momentum {
                params: *params,
                t,
                force,
            }),
            (SystemSpec::Harmonic { omega }, Space::Position) => Ok(Evaluator::Oscillator {
                kernel: OscillatorKernel::harmonic(params, *omega, t)?,
                phase: initial_phase_fix(params),
            }),
            (SystemSpec::Inverted { omega_tilde }, Space::Position) => Ok(Evaluator::Oscillator {
                kernel: OscillatorKernel::inverted(params, *omega_tilde, t)?,
                phase: initial_phase_fix(params),
            }),
            (SystemSpec::Harmonic { .. } | SystemSpec::Inverted { .. }, Space::Momentum) => {
                Err(Error::NotClosedForm {
                    system: system.name(),
                    space,
                })
            }
        }
    }

    fn at(&self, q: f64) -> Complex64 {
        match self {
            Evaluator::FreePosition {
                params,
                t,
                root,
                force,
            } => {
                let (hbar, m) = (params.hbar(), params.mass());
                let (x0, p0, f, t) = (params.x0(), params.p0(), *force, *t);
                let beta = params.beta();
                let pre = 1.0 / (PI.sqrt() * beta).sqrt() / root;
                let phase = (f * t * (x0 - f * t * t / (6.0 * m))
                    + (p0 + f * t) * (q - x0 - p0 * t / (2.0 * m)))
                    / hbar;
                let centre = x0 + p0 * t / m + f * t * t / (2.0 * m);
                let d = q - centre;
                let width = 2.0 * beta * beta * c(1.0, t / params.spreading_time());
                pre * Complex64::from_polar(1.0, phase) * (-(d * d) / width).exp()
            }
            Evaluator::Momentum { params, t, force } => {
                let (hbar, m) = (params.hbar(), params.mass());
                let (x0, p0, f, t) = (params.x0(), params.p0(), *force, *t);
                let a = params.alpha();
                let shifted = q - f * t;
                let amp = (a / PI.sqrt()).sqrt() * (-a * a * (shifted - p0).powi(2) / 2.0).exp();
                // ((p - F t)^3 - p^3) / 6 m F, expanded so that F = 0 is regular.
                let cubic = -q * q * t / (2.0 * m) + q * f * t * t / (2.0 * m)
                    - f * f * t * t * t / (6.0 * m);
                let phase = (-shifted * x0 + cubic) / hbar;
                Complex64::from_polar(amp, phase)
            }
            Evaluator::Oscillator { kernel, phase } => phase * kernel.amplitude(q),
        }
    }
}

// The propagator solution starts from exp(i p0 x / hbar); rotate it onto the
// common initial state exp(i p0 (x - x0) / hbar).
fn initial_phase_fix(params: &PacketParams) -> Complex64 {
    Complex64::from_polar(1.0, -params.p0() * params.x0() / params.hbar())
}

/// Closed-form `psi(x,t)` or `phi(p,t)` sampled on `grid`.
///
/// Oscillator packets have no momentum-space closed form here; they return
/// [`Error::NotClosedForm`] and should be transformed from position space.
pub fn eval_wavefunction(
    system: &SystemSpec,
    params: &PacketParams,
    space: Space,
    grid: &Grid,
    t: f64,
) -> Result<Wavefunction> {
    eval_wavefunction_with(system, params, space, grid, t, Execution::default())
}

pub fn eval_wavefunction_with(
    system: &SystemSpec,
    params: &PacketParams,
    space: Space,
    grid: &Grid,
    t: f64,
    exec: Execution,
) -> Result<Wavefunction> {
    if grid.space() != space {
        return Err(Error::Configuration(format!(
            "grid is in {:?} space but {:?} space was requested",
            grid.space(),
            space
        )));
    }
    let ev = Evaluator::new(system, params, space, t)?;
    Ok(Wavefunction::from_fn(*grid, t, exec, |q| ev.at(q)))
}

/// Pointwise closed form; see [`eval_wavefunction`].
pub fn amplitude(
    system: &SystemSpec,
    params: &PacketParams,
    space: Space,
    q: f64,
    t: f64,
) -> Result<Complex64> {
    Ok(Evaluator::new(system, params, space, t)?.at(q))
}

/// Which closed-form oscillator regime a parameter set falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillatorCase {
    /// Minimum-uncertainty width, arbitrary `x0`, `p0`.
    MinimumUncertainty,
    /// Centred (`x0 = p0 = 0`) packet of arbitrary width.
    Centred,
}

pub fn oscillator_case(params: &PacketParams, omega: f64) -> Option<OscillatorCase> {
    if params.is_min_uncertainty(omega) {
        Some(OscillatorCase::MinimumUncertainty)
    } else if params.x0() == 0.0 && params.p0() == 0.0 {
        Some(OscillatorCase::Centred)
    } else {
        None
    }
}

/// `x0^2 / 2 beta0^2 + beta0^2 p0^2 / 2 hbar^2`, the mean quantum number of
/// the coherent state.
pub fn coherent_mean_number(params: &PacketParams, omega: f64) -> f64 {
    let beta0 = oscillator_length(omega, &params.constants());
    let (x0, p0, hbar) = (params.x0(), params.p0(), params.hbar());
    x0 * x0 / (2.0 * beta0 * beta0) + beta0 * beta0 * p0 * p0 / (2.0 * hbar * hbar)
}

/// Closed-form autocorrelation `A(t)`.
///
/// Harmonic oscillator: minimum-uncertainty packets (any `x0`, `p0`, with
/// `A_bar` filled in) or centred packets of any width. Inverted oscillator:
/// `beta = beta0` and `x0 = 0`. Anything else is [`Error::NoClosedForm`].
pub fn closed_form_autocorr(
    system: &SystemSpec,
    params: &PacketParams,
    t: f64,
) -> Result<AutocorrSample> {
    system.validate()?;
    match *system {
        SystemSpec::FreeParticle => Ok(AutocorrSample::new(t, free_autocorr(params, t)?, None)),
        SystemSpec::UniformAcceleration { force } => Ok(AutocorrSample::new(
            t,
            acceleration_autocorr(params, force, t)?,
            None,
        )),
        SystemSpec::Harmonic { omega } => match oscillator_case(params, omega) {
            Some(OscillatorCase::MinimumUncertainty) => Ok(AutocorrSample::new(
                t,
                sho_min_uncertainty_autocorr(params, omega, t),
                Some(sho_min_uncertainty_anticorr(params, omega, t)),
            )),
            Some(OscillatorCase::Centred) => Ok(AutocorrSample::new(
                t,
                sho_centred_autocorr(params, omega, t)?,
                None,
            )),
            None => Err(Error::NoClosedForm(
                "harmonic oscillator A(t) needs beta = beta0 or x0 = p0 = 0; use the numeric routes"
                    .into(),
            )),
        },
        SystemSpec::Inverted { omega_tilde } => {
            if !params.is_min_uncertainty(omega_tilde) || params.x0() != 0.0 {
                return Err(Error::NoClosedForm(
                    "inverted oscillator A(t) needs beta = beta0 and x0 = 0".into(),
                ));
            }
            Ok(AutocorrSample::new(t, inverted_autocorr(params, omega_tilde, t), None))
        }
    }
}

fn free_autocorr(params: &PacketParams, t: f64) -> Result<Complex64> {
    let t0 = params.spreading_time();
    let a2p2 = (params.alpha() * params.p0()).powi(2);
    let d = c(1.0, -t / (2.0 * t0));
    let root = continuous_sqrt(d, None)?;
    Ok((I * a2p2 * t / (2.0 * t0 * d)).exp() / root)
}

fn acceleration_autocorr(params: &PacketParams, force: f64, t: f64) -> Result<Complex64> {
    let (hbar, m) = (params.hbar(), params.mass());
    let t0 = params.spreading_time();
    let tau = t / (2.0 * t0);
    let (x0, p0) = (params.x0(), params.p0());
    let d = c(1.0, -tau);
    let root = continuous_sqrt(d, None)?;
    let num = c(
        -(params.alpha() * force * t).powi(2) * (1.0 + tau * tau),
        2.0 * p0 * p0 * t / (m * hbar),
    );
    let drift = Complex64::from_polar(1.0, -force * t * (x0 - force * t * t / (6.0 * m)) / hbar);
    Ok((num / (4.0 * d)).exp() / root * drift)
}

fn sho_min_uncertainty_autocorr(params: &PacketParams, omega: f64, t: f64) -> Complex64 {
    let theta = omega * t;
    let k = coherent_mean_number(params, omega);
    let (s, co) = theta.sin_cos();
    Complex64::from_polar(1.0, 0.5 * theta) * (-k * c(1.0 - co, -s)).exp()
}

// A_bar(t) = i A(t - T_cl/2) from psi(-x, t + T_cl/2) = -i psi(x, t).
fn sho_min_uncertainty_anticorr(params: &PacketParams, omega: f64, t: f64) -> Complex64 {
    let theta = omega * t;
    let k = coherent_mean_number(params, omega);
    let (s, co) = theta.sin_cos();
    Complex64::from_polar(1.0, 0.5 * theta) * (-k * c(1.0 + co, s)).exp()
}

fn sho_centred_autocorr(params: &PacketParams, omega: f64, t: f64) -> Result<Complex64> {
    let r = params
        .scales(&SystemSpec::Harmonic { omega })
        .r
        .unwrap_or(1.0);
    let theta = omega * t;
    let (s, co) = theta.sin_cos();
    let w = 2.0 / c(2.0 * co, -(r + 1.0 / r) * s);
    anchored_sqrt(w, theta)
}

fn inverted_autocorr(params: &PacketParams, omega_tilde: f64, t: f64) -> Complex64 {
    let theta = omega_tilde * t;
    let (hbar, m, p0) = (params.hbar(), params.mass(), params.p0());
    // Written in sech / tanh so that late times do not overflow.
    let sech = 1.0 / theta.cosh();
    let tanh = theta.tanh();
    let num = c(sech - sech * sech, tanh * (2.0 - sech));
    let den = c(1.0, -tanh);
    let g = p0 * p0 / (2.0 * m * omega_tilde * hbar);
    sech.sqrt() * (g * num / den).exp()
}

/// Closed-form anticorrelation `A_bar(t) = integral psi*(-x,t) psi(x,0) dx`
/// for a minimum-uncertainty oscillator packet.
pub fn closed_form_anticorr(params: &PacketParams, omega: f64, t: f64) -> Result<Complex64> {
    SystemSpec::harmonic(omega)?;
    if !params.is_min_uncertainty(omega) {
        return Err(Error::NoClosedForm(
            "anticorrelation closed form needs beta = beta0".into(),
        ));
    }
    Ok(sho_min_uncertainty_anticorr(params, omega, t))
}

/// Free-particle `|A(t)|^2`.
pub fn free_modulus_sq(params: &PacketParams, t: f64) -> f64 {
    free_modulus_sq_with_p0_sq(
        params.alpha(),
        params.spreading_time(),
        params.p0().powi(2),
        t,
    )
}

fn free_modulus_sq_with_p0_sq(alpha: f64, t0: f64, p0_sq: f64, t: f64) -> f64 {
    let u = (t / (2.0 * t0)).powi(2);
    (-2.0 * alpha * alpha * p0_sq * u / (1.0 + u)).exp() / (1.0 + u).sqrt()
}

/// Uniform-acceleration `|A(t)|^2`.
pub fn acceleration_modulus_sq(params: &PacketParams, force: f64, t: f64) -> f64 {
    let t0 = params.spreading_time();
    let u = (t / (2.0 * t0)).powi(2);
    let a2 = params.alpha().powi(2);
    let p0 = params.p0();
    (-2.0 * a2 * (p0 * p0 + (force * t0).powi(2) * (1.0 + u)) * (u / (1.0 + u))).exp()
        / (1.0 + u).sqrt()
}

/// The effective `p0^2` that maps the free-particle modulus onto the
/// accelerated one: `p0^2 + (F t0)^2 (1 + (t/2t0)^2)`.
pub fn accelerated_effective_p0_sq(params: &PacketParams, force: f64, t: f64) -> f64 {
    let t0 = params.spreading_time();
    params.p0().powi(2) + (force * t0).powi(2) * (1.0 + (t / (2.0 * t0)).powi(2))
}

/// Free-particle modulus evaluated with `p0^2` replaced by
/// [`accelerated_effective_p0_sq`].
pub fn free_modulus_sq_substituted(params: &PacketParams, force: f64, t: f64) -> f64 {
    free_modulus_sq_with_p0_sq(
        params.alpha(),
        params.spreading_time(),
        accelerated_effective_p0_sq(params, force, t),
        t,
    )
}

/// Minimum-uncertainty oscillator `|A(t)|^2`.
pub fn sho_min_uncertainty_modulus_sq(params: &PacketParams, omega: f64, t: f64) -> f64 {
    (-2.0 * coherent_mean_number(params, omega) * (1.0 - (omega * t).cos())).exp()
}

/// Minimum-uncertainty oscillator `|A_bar(t)|^2`.
pub fn sho_anticorr_modulus_sq(params: &PacketParams, omega: f64, t: f64) -> f64 {
    (-2.0 * coherent_mean_number(params, omega) * (1.0 + (omega * t).cos())).exp()
}

/// Centred oscillator packet `|A(t)|^2` in terms of `r = beta0^2 / beta^2`.
pub fn sho_centred_modulus_sq(r: f64, omega: f64, t: f64) -> f64 {
    let (s, co) = (omega * t).sin_cos();
    1.0 / (co * co + (r + 1.0 / r).powi(2) * s * s / 4.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyMoments {
    pub mean_h: f64,
    pub mean_h2: f64,
    pub delta_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub mean_x: f64,
    pub spread_x: f64,
    /// Only available for the free particle.
    pub energy: Option<EnergyMoments>,
}

/// `<H>`, `<H^2>` and `Delta H` of the free packet.
pub fn energy_moments(system: &SystemSpec, params: &PacketParams) -> Result<EnergyMoments> {
    if *system != SystemSpec::FreeParticle {
        return Err(Error::NotProvided(format!(
            "energy moments are only available for the free particle, not the {}",
            system.name()
        )));
    }
    let (a, p0, m) = (params.alpha(), params.p0(), params.mass());
    let k = 1.0 / (2.0 * m);
    let p2 = p0 * p0;
    let mean_h = k * (p2 + 1.0 / (2.0 * a * a));
    let mean_h2 = k * k * (p2 * p2 + 3.0 * p2 / (a * a) + 3.0 / (4.0 * a.powi(4)));
    // Closed form of <H^2> - <H>^2, free of cancellation.
    let var = k * k * (2.0 / (a * a)) * (p2 + 1.0 / (4.0 * a * a));
    Ok(EnergyMoments {
        mean_h,
        mean_h2,
        delta_h: var.sqrt(),
    })
}

/// `<x>_t` and `Delta x_t` for any of the four systems, plus energy moments
/// for the free particle.
pub fn moments(system: &SystemSpec, params: &PacketParams, t: f64) -> Result<Observables> {
    system.validate()?;
    let (x0, p0, m) = (params.x0(), params.p0(), params.mass());
    let free_spread = params.delta_x0() * (1.0 + (t / params.spreading_time()).powi(2)).sqrt();
    let (mean_x, spread_x) = match *system {
        SystemSpec::FreeParticle => (x0 + p0 * t / m, free_spread),
        SystemSpec::UniformAcceleration { force } => {
            (x0 + p0 * t / m + force * t * t / (2.0 * m), free_spread)
        }
        SystemSpec::Harmonic { omega } => {
            let (s, co) = (omega * t).sin_cos();
            let l = OscillatorKernel::harmonic(params, omega, t)?.length();
            (
                x0 * co + p0 * s / (m * omega),
                l.norm() / std::f64::consts::SQRT_2,
            )
        }
        SystemSpec::Inverted { omega_tilde } => {
            let th = omega_tilde * t;
            let b = OscillatorKernel::inverted(params, omega_tilde, t)?.length();
            (
                x0 * th.cosh() + p0 * th.sinh() / (m * omega_tilde),
                b.norm() / std::f64::consts::SQRT_2,
            )
        }
    };
    Ok(Observables {
        mean_x,
        spread_x,
        energy: energy_moments(system, params).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PhysicalConstants;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn nat() -> PhysicalConstants {
        PhysicalConstants::natural()
    }

    fn free(alpha: f64, x0: f64, p0: f64) -> PacketParams {
        PacketParams::new(alpha, x0, p0, nat()).unwrap()
    }

    fn pgrid() -> Grid {
        Grid::closed(-30.0, 30.0, 6001, Space::Position).unwrap()
    }

    // Oracle for A(t): Simpson quadrature of the closed-form wavefunctions.
    fn quad_autocorr(
        system: &SystemSpec,
        params: &PacketParams,
        space: Space,
        grid: &Grid,
        t: f64,
    ) -> Complex64 {
        let a = eval_wavefunction(system, params, space, grid, t).unwrap();
        let b = eval_wavefunction(system, params, space, grid, 0.0).unwrap();
        let prod: Vec<Complex64> = a
            .samples()
            .iter()
            .zip(b.samples())
            .map(|(x, y)| x.conj() * y)
            .collect();
        grid.integrate(&prod)
    }

    #[test]
    fn free_peak_at_origin() {
        let v = amplitude(
            &SystemSpec::FreeParticle,
            &free(1.0, 0.0, 0.0),
            Space::Position,
            0.0,
            0.0,
        )
        .unwrap();
        assert_abs_diff_eq!(v.re, PI.powf(-0.25), epsilon = 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn every_system_starts_from_the_same_packet() {
        let c = PhysicalConstants::new(0.9, 1.4).unwrap();
        let p = PacketParams::new(1.2, 0.7, -0.6, c).unwrap();
        let systems = [
            SystemSpec::FreeParticle,
            SystemSpec::accelerated(0.8).unwrap(),
            SystemSpec::harmonic(1.3).unwrap(),
            SystemSpec::inverted(0.4).unwrap(),
        ];
        for x in [-2.0, -0.3, 0.0, 0.9, 2.5] {
            let reference = amplitude(&systems[0], &p, Space::Position, x, 0.0).unwrap();
            for s in &systems[1..] {
                let v = amplitude(s, &p, Space::Position, x, 0.0).unwrap();
                assert!((v - reference).norm() < 1e-14, "{s:?} at x = {x}");
            }
        }
    }

    #[test]
    fn zero_force_is_free() {
        let p = free(0.8, 0.4, 1.1);
        let acc = SystemSpec::accelerated(0.0).unwrap();
        for t in [-1.5, 0.0, 0.3, 2.0, 7.5] {
            for x in [-3.0, 0.0, 1.7, 6.0] {
                let a = amplitude(&acc, &p, Space::Position, x, t).unwrap();
                let b = amplitude(&SystemSpec::FreeParticle, &p, Space::Position, x, t).unwrap();
                assert!((a - b).norm() < 1e-12);
                let a = amplitude(&acc, &p, Space::Momentum, x, t).unwrap();
                let b = amplitude(&SystemSpec::FreeParticle, &p, Space::Momentum, x, t).unwrap();
                assert!((a - b).norm() < 1e-12);
            }
            let a = closed_form_autocorr(&acc, &p, t).unwrap().a;
            let b = closed_form_autocorr(&SystemSpec::FreeParticle, &p, t)
                .unwrap()
                .a;
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn oscillator_momentum_space_is_not_closed_form() {
        let g = Grid::closed(-5.0, 5.0, 11, Space::Momentum).unwrap();
        let err = eval_wavefunction(
            &SystemSpec::harmonic(1.0).unwrap(),
            &free(1.0, 0.0, 0.0),
            Space::Momentum,
            &g,
            0.1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotClosedForm { .. }));
        let err = eval_wavefunction(
            &SystemSpec::FreeParticle,
            &free(1.0, 0.0, 0.0),
            Space::Position,
            &g,
            0.1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Configuration(_)));
    }

    #[test]
    fn free_modulus_example() {
        // |A(2)|^2 = e^{-1} / sqrt(2) for alpha = hbar = m = 1, p0 = 1.
        let p = free(1.0, 0.0, 1.0);
        let expected = (-1.0f64).exp() / 2f64.sqrt();
        let s = closed_form_autocorr(&SystemSpec::FreeParticle, &p, 2.0).unwrap();
        assert_abs_diff_eq!(s.modulus_sq, expected, epsilon = 1e-14);
        assert_abs_diff_eq!(free_modulus_sq(&p, 2.0), expected, epsilon = 1e-14);
        // Independent route: quadrature of the momentum-space packets.
        let g = Grid::closed(-12.0, 14.0, 5201, Space::Momentum).unwrap();
        let q = quad_autocorr(&SystemSpec::FreeParticle, &p, Space::Momentum, &g, 2.0);
        assert!((q - s.a).norm() < 1e-12);
    }

    #[test]
    fn autocorr_matches_quadrature_for_all_closed_forms() {
        let c = PhysicalConstants::new(1.2, 0.8).unwrap();
        let cases = [
            (
                SystemSpec::FreeParticle,
                PacketParams::new(0.9, 0.5, 0.8, c).unwrap(),
            ),
            (
                SystemSpec::accelerated(-0.7).unwrap(),
                PacketParams::new(0.9, 0.5, 0.8, c).unwrap(),
            ),
            (
                SystemSpec::harmonic(1.1).unwrap(),
                PacketParams::min_uncertainty(1.1, 1.3, -0.7, c).unwrap(),
            ),
            (
                SystemSpec::harmonic(1.1).unwrap(),
                PacketParams::with_beta(2.1, 0.0, 0.0, c).unwrap(),
            ),
            (
                SystemSpec::inverted(0.6).unwrap(),
                PacketParams::min_uncertainty(0.6, 0.0, 0.9, c).unwrap(),
            ),
        ];
        for (sys, p) in cases {
            for t in [0.0, 0.37, 1.9, 4.4, -2.2] {
                let closed = closed_form_autocorr(&sys, &p, t).unwrap().a;
                let quad = quad_autocorr(&sys, &p, Space::Position, &pgrid(), t);
                assert!(
                    (closed - quad).norm() < 1e-10,
                    "{sys:?} t={t}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn acceleration_momentum_and_position_forms_agree() {
        let p = free(1.1, -0.4, 0.6);
        let sys = SystemSpec::accelerated(1.3).unwrap();
        let gp = Grid::closed(-15.0, 20.0, 7001, Space::Momentum).unwrap();
        for t in [0.5, 1.7] {
            let a = quad_autocorr(&sys, &p, Space::Momentum, &gp, t);
            let b = quad_autocorr(&sys, &p, Space::Position, &pgrid(), t);
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn anticorr_matches_quadrature() {
        let p = PacketParams::min_uncertainty(1.0, 1.2, 0.4, nat()).unwrap();
        let sys = SystemSpec::harmonic(1.0).unwrap();
        let g = pgrid();
        for t in [0.0, 0.8, PI, 4.0] {
            let psi_t = eval_wavefunction(&sys, &p, Space::Position, &g, t)
                .unwrap()
                .reflected()
                .unwrap();
            let psi_0 = eval_wavefunction(&sys, &p, Space::Position, &g, 0.0).unwrap();
            let prod: Vec<Complex64> = psi_t
                .samples()
                .iter()
                .zip(psi_0.samples())
                .map(|(x, y)| x.conj() * y)
                .collect();
            let quad = g.integrate(&prod);
            let closed = closed_form_anticorr(&p, 1.0, t).unwrap();
            assert!((quad - closed).norm() < 1e-10, "t={t}: {quad} vs {closed}");
        }
    }

    #[test]
    fn anticorr_values() {
        let p = PacketParams::min_uncertainty(2.0, 0.7, 0.3, nat()).unwrap();
        let half = PI / 2.0;
        assert_abs_diff_eq!(
            closed_form_anticorr(&p, 2.0, half).unwrap().norm_sqr(),
            1.0,
            epsilon = 1e-14
        );
        let k2 = 0.7f64.powi(2) * 2.0 + 0.3f64.powi(2) / 2.0;
        assert_abs_diff_eq!(
            closed_form_anticorr(&p, 2.0, 0.0).unwrap().norm_sqr(),
            (-2.0 * k2).exp(),
            epsilon = 1e-14
        );
        let centred = PacketParams::min_uncertainty(2.0, 0.0, 0.0, nat()).unwrap();
        for t in [0.0, 0.4, 1.1, 3.0] {
            assert_abs_diff_eq!(
                closed_form_anticorr(&centred, 2.0, t).unwrap().norm(),
                1.0,
                epsilon = 1e-14
            );
        }
        let wide = PacketParams::with_beta(3.0, 0.0, 0.0, nat()).unwrap();
        assert!(matches!(
            closed_form_anticorr(&wide, 2.0, 0.1),
            Err(Error::NoClosedForm(_))
        ));
    }

    #[test]
    fn harmonic_case_values() {
        let omega = 1.0;
        let sys = SystemSpec::harmonic(omega).unwrap();
        let p = PacketParams::min_uncertainty(omega, 1.5, -0.8, nat()).unwrap();
        assert_abs_diff_eq!(
            closed_form_autocorr(&sys, &p, TAU).unwrap().modulus_sq,
            1.0,
            epsilon = 1e-14
        );
        let expected = (-2.0 * (1.5f64.powi(2) + 0.8f64.powi(2))).exp();
        assert_abs_diff_eq!(
            closed_form_autocorr(&sys, &p, PI).unwrap().modulus_sq,
            expected,
            epsilon = 1e-14
        );

        let ground = PacketParams::min_uncertainty(omega, 0.0, 0.0, nat()).unwrap();
        for t in [0.0, 1.0, 4.0, 9.0, 20.0] {
            let a = closed_form_autocorr(&sys, &ground, t).unwrap().a;
            assert!((a - Complex64::from_polar(1.0, omega * t / 2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn centred_packet_is_r_symmetric_and_revives_twice() {
        let omega = 1.7;
        let sys = SystemSpec::harmonic(omega).unwrap();
        let narrow = PacketParams::with_beta(0.5, 0.0, 0.0, nat()).unwrap();
        let r = narrow.scales(&sys).r.unwrap();
        let wide_beta = oscillator_length(omega, &nat()).powi(2) / narrow.beta();
        let wide = PacketParams::with_beta(wide_beta, 0.0, 0.0, nat()).unwrap();
        assert!((wide.scales(&sys).r.unwrap() * r - 1.0).abs() < 1e-14);
        for k in 0..200 {
            let t = k as f64 * 0.05;
            let a = closed_form_autocorr(&sys, &narrow, t).unwrap();
            let b = closed_form_autocorr(&sys, &wide, t).unwrap();
            assert!((a.a - b.a).norm() < 1e-14);
            assert_abs_diff_eq!(
                a.modulus_sq,
                sho_centred_modulus_sq(r, omega, t),
                epsilon = 1e-13
            );
        }
        let half = PI / omega;
        assert_abs_diff_eq!(
            closed_form_autocorr(&sys, &narrow, half).unwrap().a.norm(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn oscillator_parity_relations_in_closed_form() {
        let omega = 1.3;
        let sys = SystemSpec::harmonic(omega).unwrap();
        let p = PacketParams::with_beta(0.7, 1.1, 0.5, nat()).unwrap();
        let period = TAU / omega;
        for t in [0.0, 0.4, 2.9] {
            for x in [-2.0, -0.5, 0.3, 1.8] {
                let here = amplitude(&sys, &p, Space::Position, x, t).unwrap();
                let later = amplitude(&sys, &p, Space::Position, x, t + period).unwrap();
                assert!((later + here).norm() < 1e-12);
                let twice = amplitude(&sys, &p, Space::Position, x, t + 2.0 * period).unwrap();
                assert!((twice - here).norm() < 1e-12);
                let mirrored = amplitude(&sys, &p, Space::Position, -x, t + period / 2.0).unwrap();
                assert!((mirrored - (-I) * here).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn general_oscillator_parameters_have_no_closed_form() {
        let sys = SystemSpec::harmonic(1.0).unwrap();
        let p = PacketParams::with_beta(2.0, 1.0, 0.0, nat()).unwrap();
        assert!(matches!(
            closed_form_autocorr(&sys, &p, 1.0),
            Err(Error::NoClosedForm(_))
        ));
        let inv = SystemSpec::inverted(1.0).unwrap();
        let p = PacketParams::min_uncertainty(1.0, 0.5, 0.0, nat()).unwrap();
        assert!(matches!(
            closed_form_autocorr(&inv, &p, 1.0),
            Err(Error::NoClosedForm(_))
        ));
    }

    #[test]
    fn energy_moments_example() {
        let m = energy_moments(&SystemSpec::FreeParticle, &free(1.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(m.mean_h, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(m.delta_h.powi(2), 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(m.mean_h2 - m.mean_h.powi(2), 0.125, epsilon = 1e-15);
        let m = energy_moments(&SystemSpec::FreeParticle, &free(1.0, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(m.delta_h.powi(2), 0.625, epsilon = 1e-15);
        assert!(matches!(
            energy_moments(&SystemSpec::harmonic(1.0).unwrap(), &free(1.0, 0.0, 1.0)),
            Err(Error::NotProvided(_))
        ));
    }

    #[test]
    fn energy_moments_against_momentum_quadrature() {
        let p = free(0.7, 0.3, -1.4);
        let g = Grid::closed(-15.0, 12.0, 8001, Space::Momentum).unwrap();
        let phi =
            eval_wavefunction(&SystemSpec::FreeParticle, &p, Space::Momentum, &g, 0.0).unwrap();
        let pts = g.points();
        let h: Vec<f64> = pts.iter().map(|q| q * q / 2.0).collect();
        let dens: Vec<f64> = phi.samples().iter().map(|z| z.norm_sqr()).collect();
        let m1 = g.integrate_real(&dens.iter().zip(&h).map(|(d, e)| d * e).collect::<Vec<_>>());
        let m2 = g.integrate_real(
            &dens
                .iter()
                .zip(&h)
                .map(|(d, e)| d * e * e)
                .collect::<Vec<_>>(),
        );
        let e = energy_moments(&SystemSpec::FreeParticle, &p).unwrap();
        assert_abs_diff_eq!(e.mean_h, m1, epsilon = 1e-12);
        assert_abs_diff_eq!(e.mean_h2, m2, epsilon = 1e-11);
    }

    #[test]
    fn position_moments_examples() {
        let omega = 0.8;
        let p = PacketParams::min_uncertainty(omega, 1.0, 0.3, nat()).unwrap();
        let beta0 = oscillator_length(omega, &nat());
        for t in [0.0, 0.6, 3.3, 11.0] {
            let o = moments(&SystemSpec::harmonic(omega).unwrap(), &p, t).unwrap();
            assert_abs_diff_eq!(o.spread_x, beta0 / 2f64.sqrt(), epsilon = 1e-14);
            assert!(o.energy.is_none());
        }
        let q = PacketParams::with_beta(1.7, 0.2, 0.1, nat()).unwrap();
        let o = moments(&SystemSpec::inverted(2.0).unwrap(), &q, 0.0).unwrap();
        assert_abs_diff_eq!(o.spread_x, 1.7 / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(o.mean_x, 0.2, epsilon = 1e-15);

        let f = free(1.0, 0.5, 2.0);
        let acc = moments(&SystemSpec::accelerated(3.0).unwrap(), &f, 2.0).unwrap();
        let fr = moments(&SystemSpec::FreeParticle, &f, 2.0).unwrap();
        assert_eq!(acc.spread_x, fr.spread_x);
        assert_abs_diff_eq!(acc.mean_x, 0.5 + 4.0 + 6.0, epsilon = 1e-14);
        assert!(fr.energy.is_some());
    }

    #[test]
    fn closed_form_moments_match_sampled_density() {
        let c = PhysicalConstants::new(1.0, 1.3).unwrap();
        let p = PacketParams::with_beta(0.8, 0.6, -0.9, c).unwrap();
        let g = Grid::periodic(-30.0, 30.0, 4096, Space::Position).unwrap();
        for sys in [
            SystemSpec::FreeParticle,
            SystemSpec::accelerated(0.5).unwrap(),
            SystemSpec::harmonic(1.4).unwrap(),
            SystemSpec::inverted(0.7).unwrap(),
        ] {
            for t in [0.0, 0.9, 2.3] {
                let psi = eval_wavefunction(&sys, &p, Space::Position, &g, t).unwrap();
                let (mean, spread) = psi.position_moments();
                let o = moments(&sys, &p, t).unwrap();
                assert_abs_diff_eq!(mean, o.mean_x, epsilon = 1e-11);
                assert_abs_diff_eq!(spread, o.spread_x, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn kernel_lengths_are_bounded_below() {
        let p = PacketParams::with_beta(0.4, 0.0, 0.0, nat()).unwrap();
        let (beta, other) = (0.4f64, 1.0 / (2.0 * 0.4));
        for k in 0..100 {
            let t = k as f64 * 0.1;
            let l = OscillatorKernel::harmonic(&p, 2.0, t).unwrap().length();
            assert!(l.norm() >= beta.min(other) - 1e-15);
            let b = OscillatorKernel::inverted(&p, 2.0, t).unwrap();
            assert!(b.is_inverted());
            assert!(b.length().norm() >= beta - 1e-15);
        }
    }

    #[test]
    fn free_short_time_expansion() {
        // 1 - |A|^2 = (alpha^2 t^2 / 2 t0^2)(p0^2 + 1/4 alpha^2) + O(t^4): fit a t^2 + b t^4.
        let p = free(1.3, 0.0, 0.9);
        let t0 = p.spreading_time();
        let ts: Vec<f64> = (1..=40).map(|k| k as f64 * t0 / 4000.0).collect();
        let (mut s22, mut s24, mut s44, mut sy2, mut sy4) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &t in &ts {
            let y = 1.0 - free_modulus_sq(&p, t);
            let (u2, u4) = (t * t, t.powi(4));
            s22 += u2 * u2;
            s24 += u2 * u4;
            s44 += u4 * u4;
            sy2 += y * u2;
            sy4 += y * u4;
        }
        let det = s22 * s44 - s24 * s24;
        let c2 = (sy2 * s44 - sy4 * s24) / det;
        let expected = 1.3f64.powi(2) / (2.0 * t0 * t0) * (0.81 + 1.0 / (4.0 * 1.3f64.powi(2)));
        assert!((c2 / expected - 1.0).abs() < 1e-6);
    }

    #[test]
    fn free_long_time_saturation() {
        let p = free(0.8, 0.0, 1.2);
        let t0 = p.spreading_time();
        let t = 100.0 * t0;
        let lhs = free_modulus_sq(&p, t) * (1.0 + (t / (2.0 * t0)).powi(2)).sqrt();
        let limit = (-(1.2f64 / p.delta_p0()).powi(2)).exp();
        assert!((lhs / limit - 1.0).abs() < 1e-3);
    }

    #[test]
    fn inverted_late_time() {
        let omega = 1.0;
        let p = PacketParams::min_uncertainty(omega, 0.0, 1.0, nat()).unwrap();
        let sys = SystemSpec::inverted(omega).unwrap();
        let t = 30.0;
        let a = closed_form_autocorr(&sys, &p, t).unwrap();
        let lhs = a.modulus_sq * t.exp() / 2.0;
        assert!((lhs / (-1.0f64).exp() - 1.0).abs() < 1e-3);
        // Stays finite far past cosh overflow.
        let late = closed_form_autocorr(&sys, &p, 800.0).unwrap();
        assert!(late.a.re.is_finite() && late.a.im.is_finite());
    }

    fn arb_system_and_params() -> impl Strategy<Value = (SystemSpec, PacketParams)> {
        (
            0usize..5,
            0.3f64..2.5,
            -2.0f64..2.0,
            -2.0f64..2.0,
            0.2f64..2.0,
            0.5f64..2.0,
            0.5f64..2.0,
        )
            .prop_map(|(kind, alpha, x0, p0, coupling, hbar, mass)| {
                let c = PhysicalConstants::new(hbar, mass).unwrap();
                match kind {
                    0 => (
                        SystemSpec::FreeParticle,
                        PacketParams::new(alpha, x0, p0, c).unwrap(),
                    ),
                    1 => (
                        SystemSpec::accelerated(coupling - 1.0).unwrap(),
                        PacketParams::new(alpha, x0, p0, c).unwrap(),
                    ),
                    2 => (
                        SystemSpec::harmonic(coupling).unwrap(),
                        PacketParams::min_uncertainty(coupling, x0, p0, c).unwrap(),
                    ),
                    3 => (
                        SystemSpec::harmonic(coupling).unwrap(),
                        PacketParams::new(alpha, 0.0, 0.0, c).unwrap(),
                    ),
                    _ => (
                        SystemSpec::inverted(coupling).unwrap(),
                        PacketParams::min_uncertainty(coupling, 0.0, p0, c).unwrap(),
                    ),
                }
            })
    }

    proptest! {
        #[test]
        fn autocorr_is_bounded_and_time_reversal_symmetric((sys, p) in arb_system_and_params()) {
            let a0 = closed_form_autocorr(&sys, &p, 0.0).unwrap();
            prop_assert_eq!(a0.a, Complex64::new(1.0, 0.0));
            prop_assert_eq!(a0.hilbert_distance, 0.0);
            for k in 1..400 {
                let t = k as f64 * 0.037;
                let s = closed_form_autocorr(&sys, &p, t).unwrap();
                prop_assert!(s.modulus_sq <= 1.0 + 1e-12);
                prop_assert!(s.hilbert_distance >= -1e-12 && s.hilbert_distance <= 4.0 + 1e-12);
                let back = closed_form_autocorr(&sys, &p, -t).unwrap();
                prop_assert!((back.a - s.a.conj()).norm() < 1e-12);
            }
        }

        #[test]
        fn min_uncertainty_modulus_is_periodic(
            omega in 0.2f64..3.0, x0 in -2.0f64..2.0, p0 in -2.0f64..2.0, t in -10.0f64..10.0
        ) {
            let p = PacketParams::min_uncertainty(omega, x0, p0, nat()).unwrap();
            let sys = SystemSpec::harmonic(omega).unwrap();
            let period = TAU / omega;
            let a = closed_form_autocorr(&sys, &p, t).unwrap();
            let b = closed_form_autocorr(&sys, &p, t + period).unwrap();
            prop_assert!((a.a.norm() - b.a.norm()).abs() < 1e-12);
            prop_assert!((a.modulus_sq - sho_min_uncertainty_modulus_sq(&p, omega, t)).abs() < 1e-12);
        }

        #[test]
        fn acceleration_modulus_is_substituted_free_modulus(
            alpha in 0.3f64..2.0, p0 in -2.0f64..2.0, force in -2.0f64..2.0, t in 0.0f64..6.0
        ) {
            let p = free(alpha, 0.3, p0);
            let direct = acceleration_modulus_sq(&p, force, t);
            let sub = free_modulus_sq_substituted(&p, force, t);
            prop_assert!((direct - sub).abs() <= 1e-14);
            let complex = closed_form_autocorr(&SystemSpec::accelerated(force).unwrap(), &p, t).unwrap();
            prop_assert!((complex.modulus_sq - direct).abs() <= 1e-13);
        }
    }
}
