//! Diagnostics built on top of `A(t)`: spectral timescales, the
//! Mandelstam-Tamm bound, long-time saturation constants and series assembly
//! for Argand and Hilbert-distance output.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{energy_moments, free_modulus_sq, AutocorrSample};
use crate::branch::unwrap_phases;
use crate::error::{Error, Result};
use crate::exec::{try_map_slice, Execution};
use crate::numeric::SpectralExpansion;
use crate::params::{oscillator_length, PacketParams, SystemSpec};

/// Relative size below which a spectral derivative counts as zero.
pub const DEGENERATE_RTOL: f64 = 1e-12;

/// Absolute slack on `|A|^2 - cos^2(Delta H t / hbar)`.
pub const BOUND_TOLERANCE: f64 = 1e-10;

/// Number of points in the short-time polynomial fits.
const FIT_POINTS: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Timescale {
    Finite(f64),
    Infinite,
}

impl Timescale {
    pub fn is_infinite(self) -> bool {
        matches!(self, Timescale::Infinite)
    }

    /// `f64::INFINITY` for [`Timescale::Infinite`].
    pub fn value(self) -> f64 {
        match self {
            Timescale::Finite(v) => v,
            Timescale::Infinite => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimescaleReport {
    /// `2 pi hbar / |E'(n0)|`.
    pub t_cl: Timescale,
    /// `2 pi hbar / (|E''(n0)| / 2)`.
    pub t_rev: Timescale,
    pub n0: usize,
    /// `E(n0) / hbar`.
    pub omega0: f64,
}

/// Classical and revival periods from central differences of `energies`
/// around `n0`.
///
/// `E'` counts as zero below `1e-12` times the local energy scale, `E''`
/// below `1e-12 |E'|` (the level spacing, `hbar omega` for the oscillator).
pub fn timescales(energies: &[f64], n0: usize, hbar: f64) -> Result<TimescaleReport> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::invalid(
            "hbar",
            format!("must be finite and > 0, got {hbar}"),
        ));
    }
    if n0 == 0 || n0 + 1 >= energies.len() {
        return Err(Error::InsufficientStencil {
            n0,
            len: energies.len(),
        });
    }
    let (lo, mid, hi) = (energies[n0 - 1], energies[n0], energies[n0 + 1]);
    let d1 = 0.5 * (hi - lo);
    let d2 = hi - 2.0 * mid + lo;
    let scale = lo.abs().max(mid.abs()).max(hi.abs());
    let t_cl = if d1.abs() <= DEGENERATE_RTOL * scale {
        Timescale::Infinite
    } else {
        Timescale::Finite(2.0 * PI * hbar / d1.abs())
    };
    let d2_scale = if t_cl.is_infinite() { scale } else { d1.abs() };
    let t_rev = if d2.abs() <= DEGENERATE_RTOL * d2_scale {
        Timescale::Infinite
    } else {
        Timescale::Finite(2.0 * PI * hbar / (0.5 * d2.abs()))
    };
    Ok(TimescaleReport {
        t_cl,
        t_rev,
        n0,
        omega0: mid / hbar,
    })
}

/// [`timescales`] at the expansion's own `n0`.
pub fn spectral_timescales(expansion: &SpectralExpansion) -> Result<TimescaleReport> {
    timescales(&expansion.energies, expansion.n0, expansion.hbar)
}

/// Autocorrelation samples on a time grid with a continuous phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutocorrSeries {
    pub samples: Vec<AutocorrSample>,
    /// `arg A(t)` unwrapped across samples.
    pub unwrapped_phase: Vec<f64>,
}

impl AutocorrSeries {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.a).collect()
    }

    /// `(Re A, Im A)` pairs for an Argand plot.
    pub fn argand(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.a.re, s.a.im)).collect()
    }
}

pub fn assemble_series<F>(sampler: F, t_grid: &[f64]) -> Result<AutocorrSeries>
where
    F: Fn(f64) -> Result<AutocorrSample> + Sync + Send,
{
    assemble_series_with(Execution::default(), sampler, t_grid)
}

/// Evaluates `sampler` on a strictly increasing `t_grid`. Samples are
/// independent and may be computed in parallel; the phase is unwrapped
/// afterwards in time order.
pub fn assemble_series_with<F>(
    exec: Execution,
    sampler: F,
    t_grid: &[f64],
) -> Result<AutocorrSeries>
where
    F: Fn(f64) -> Result<AutocorrSample> + Sync + Send,
{
    if t_grid.is_empty() {
        return Err(Error::Configuration("empty time grid".into()));
    }
    if let Some(t) = t_grid.iter().find(|t| !t.is_finite()) {
        return Err(Error::Configuration(format!("non-finite time {t} in grid")));
    }
    if let Some(w) = t_grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Configuration(format!(
            "time grid is not strictly increasing: {} then {}",
            w[0], w[1]
        )));
    }
    let samples = try_map_slice(exec, t_grid, |&t| sampler(t))?;
    let unwrapped_phase = unwrap_phases(samples.iter().map(|s| s.a));
    Ok(AutocorrSeries {
        samples,
        unwrapped_phase,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Sample times inside `[0, valid_horizon]`.
    pub t_grid: Vec<f64>,
    /// `|A(t)|^2`.
    pub lhs: Vec<f64>,
    /// `cos^2(Delta H t / hbar)`.
    pub rhs: Vec<f64>,
    /// `pi hbar / (2 Delta H)`.
    pub valid_horizon: f64,
    /// `min(lhs - rhs)`.
    pub min_margin: f64,
    /// The series stops before `valid_horizon`.
    pub horizon_truncated: bool,
    /// `t^2` coefficients of both sides fitted on `[0, t0/100]`.
    pub c2_lhs: f64,
    pub c2_rhs: f64,
    /// Difference of the fitted `t^4` coefficients, lhs minus rhs.
    pub c4_margin: f64,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.min_margin >= -BOUND_TOLERANCE
    }

    /// `|c2_lhs - c2_rhs| / |c2_rhs|`.
    pub fn c2_relative_difference(&self) -> f64 {
        (self.c2_lhs - self.c2_rhs).abs() / self.c2_rhs.abs()
    }
}

/// Checks `|A(t)|^2 >= cos^2(Delta H t / hbar)` for a free packet on the
/// part of `series` inside `[0, pi hbar / 2 Delta H]`, and fits both sides as
/// `1 + c2 t^2 + c4 t^4` on `[0, t0/100]`.
pub fn mandelstam_check(params: &PacketParams, series: &AutocorrSeries) -> Result<BoundReport> {
    let dh = energy_moments(&SystemSpec::FreeParticle, params)?.delta_h;
    let hbar = params.hbar();
    let valid_horizon = PI * hbar / (2.0 * dh);
    let rhs_at = |t: f64| (dh * t / hbar).cos().powi(2);

    let mut report = BoundReport {
        t_grid: Vec::new(),
        lhs: Vec::new(),
        rhs: Vec::new(),
        valid_horizon,
        min_margin: f64::INFINITY,
        horizon_truncated: series.samples.last().is_none_or(|s| s.t < valid_horizon),
        c2_lhs: 0.0,
        c2_rhs: 0.0,
        c4_margin: 0.0,
    };
    for s in series
        .samples
        .iter()
        .filter(|s| s.t >= 0.0 && s.t <= valid_horizon)
    {
        let r = rhs_at(s.t);
        report.t_grid.push(s.t);
        report.lhs.push(s.modulus_sq);
        report.rhs.push(r);
        report.min_margin = report.min_margin.min(s.modulus_sq - r);
    }

    let t_fit = params.spreading_time() / 100.0;
    let (c2l, c4l) = fit_even_quartic(|t| free_modulus_sq(params, t), t_fit);
    let (c2r, c4r) = fit_even_quartic(rhs_at, t_fit);
    report.c2_lhs = c2l;
    report.c2_rhs = c2r;
    report.c4_margin = c4l - c4r;
    Ok(report)
}

// Least-squares fit of f(t) - 1 = c2 t^2 + c4 t^4 on [0, t_max], solved in
// the scaled variable u = t / t_max.
fn fit_even_quartic(f: impl Fn(f64) -> f64, t_max: f64) -> (f64, f64) {
    let (mut s44, mut s46, mut s88, mut s4y, mut s8y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 0..FIT_POINTS {
        let u = k as f64 / (FIT_POINTS - 1) as f64;
        let y = f(u * t_max) - 1.0;
        let (a, b) = (u * u, u.powi(4));
        s44 += a * a;
        s46 += a * b;
        s88 += b * b;
        s4y += a * y;
        s8y += b * y;
    }
    let det = s44 * s88 - s46 * s46;
    let c2 = (s4y * s88 - s8y * s46) / det;
    let c4 = (s44 * s8y - s46 * s4y) / det;
    (c2 / (t_max * t_max), c4 / t_max.powi(4))
}

/// Constant in the long-time law of `|A(t)|^2`.
///
/// Free particle: `|A|^2 ~ (2 t0 / t) exp(-p0^2 / Delta p0^2)`, returns
/// `exp(-p0^2 / Delta p0^2)`. Inverted oscillator with `beta = beta0`:
/// `|A|^2 ~ 2 exp(-w t) exp(-p0^2 / m w hbar) exp(-x0^2 / beta0^2)`, returns
/// `2 exp(-p0^2 / m w hbar) exp(-x0^2 / beta0^2)`.
pub fn saturation_asymptote(system: &SystemSpec, params: &PacketParams) -> Result<f64> {
    system.validate()?;
    match *system {
        SystemSpec::FreeParticle => Ok((-(params.p0() / params.delta_p0()).powi(2)).exp()),
        SystemSpec::Inverted { omega_tilde } => {
            if !params.is_min_uncertainty(omega_tilde) {
                return Err(Error::NoClosedForm(
                    "inverted oscillator saturation law needs beta = beta0".into(),
                ));
            }
            let c = params.constants();
            let beta0 = oscillator_length(omega_tilde, &c);
            let (x0, p0) = (params.x0(), params.p0());
            Ok(2.0
                * (-p0 * p0 / (c.mass() * omega_tilde * c.hbar())).exp()
                * (-(x0 / beta0).powi(2)).exp())
        }
        SystemSpec::UniformAcceleration { .. } => {
            Err(Error::NoSaturationLaw("uniform acceleration"))
        }
        SystemSpec::Harmonic { .. } => Err(Error::NoSaturationLaw("harmonic oscillator")),
    }
}
