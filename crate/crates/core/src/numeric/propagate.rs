use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::transform::{fft_momentum, FourierPair};
use crate::error::{Error, Result};
use crate::grid::{Space, Wavefunction, DEFAULT_BOUNDARY_TOLERANCE};
use crate::params::{PhysicalConstants, SystemSpec};

/// Number of outermost samples on each side watched by the edge guard.
pub const EDGE_BAND: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// `exp(-i V dt / 2 hbar) exp(-i T dt / hbar) exp(-i V dt / 2 hbar)`.
    #[default]
    StrangSplit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub scheme: Scheme,
    /// The run fails once any of the [`EDGE_BAND`] outermost samples exceeds
    /// this fraction of the peak magnitude.
    pub edge_tolerance: f64,
}

impl PropagatorConfig {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid(
                "dt",
                format!("must be finite and > 0, got {dt}"),
            ));
        }
        if n_steps == 0 {
            return Err(Error::invalid("n_steps", "must be at least 1"));
        }
        Ok(Self {
            dt,
            n_steps,
            scheme: Scheme::StrangSplit,
            edge_tolerance: DEFAULT_BOUNDARY_TOLERANCE,
        })
    }

    /// `n_steps` equal steps covering `horizon`.
    pub fn for_horizon(horizon: f64, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::invalid("n_steps", "must be at least 1"));
        }
        Self::new(horizon / n_steps as f64, n_steps)
    }

    pub fn with_edge_tolerance(mut self, tolerance: f64) -> Self {
        self.edge_tolerance = tolerance;
        self
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

/// Strang-split propagator on a periodic position grid.
///
/// The kinetic factor is applied in momentum space via the FFT; the grid
/// offset phases of [`FourierPair`] cancel between the forward and inverse
/// transforms and are therefore not applied here.
pub struct SplitOperator {
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    half_potential: Vec<Complex64>,
    // Kinetic phase in FFT bin order, including the 1/N of the inverse.
    kinetic: Vec<Complex64>,
    scratch: Vec<Complex64>,
    dt: f64,
    edge_tolerance: f64,
}

impl SplitOperator {
    pub fn new(
        pair: &FourierPair,
        system: &SystemSpec,
        constants: &PhysicalConstants,
        dt: f64,
    ) -> Result<Self> {
        system.validate()?;
        let grid = pair.position_grid();
        let n = grid.len();
        let (hbar, m) = (constants.hbar(), constants.mass());
        let half_potential = grid
            .points()
            .iter()
            .map(|&x| Complex64::from_polar(1.0, -0.5 * system.potential(x, m) * dt / hbar))
            .collect();
        let dp = TAU * hbar / (grid.max() - grid.min());
        let kinetic = (0..n)
            .map(|k| {
                let p = fft_momentum(k, n, dp);
                Complex64::from_polar(1.0 / n as f64, -p * p * dt / (2.0 * m * hbar))
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let scratch_len = fft
            .get_inplace_scratch_len()
            .max(ifft.get_inplace_scratch_len());
        Ok(Self {
            fft,
            ifft,
            half_potential,
            kinetic,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            dt,
            edge_tolerance: DEFAULT_BOUNDARY_TOLERANCE,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn set_edge_tolerance(&mut self, tolerance: f64) {
        self.edge_tolerance = tolerance;
    }

    /// Advances `state` by one step of `dt`.
    pub fn step(&mut self, state: &mut [Complex64]) {
        for (v, h) in state.iter_mut().zip(&self.half_potential) {
            *v *= h;
        }
        self.fft.process_with_scratch(state, &mut self.scratch);
        for (v, k) in state.iter_mut().zip(&self.kinetic) {
            *v *= k;
        }
        self.ifft.process_with_scratch(state, &mut self.scratch);
        for (v, h) in state.iter_mut().zip(&self.half_potential) {
            *v *= h;
        }
    }

    /// Fails if the packet has reached the outer [`EDGE_BAND`] samples.
    pub fn check_edges(&self, state: &[Complex64]) -> Result<()> {
        let n = state.len();
        let band = EDGE_BAND.min(n / 2);
        let mut edge = 0.0f64;
        let mut peak = 0.0f64;
        for (j, z) in state.iter().enumerate() {
            let a = z.norm_sqr();
            peak = peak.max(a);
            if j < band || j >= n - band {
                edge = edge.max(a);
            }
        }
        let (edge, peak) = (edge.sqrt(), peak.sqrt());
        if peak > 0.0 && edge > self.edge_tolerance * peak {
            return Err(Error::GridTruncation {
                edge,
                peak,
                tolerance: self.edge_tolerance,
            });
        }
        Ok(())
    }
}

/// Propagates `psi0` for `config.n_steps` steps of `config.dt`.
pub fn propagate(
    psi0: &Wavefunction,
    system: &SystemSpec,
    constants: &PhysicalConstants,
    config: &PropagatorConfig,
) -> Result<Wavefunction> {
    propagate_with(psi0, system, constants, config, |_, _, _| {})
}

/// Like [`propagate`], calling `on_step(step, time, samples)` after every
/// step (`step` counts from 1).
pub fn propagate_with<F>(
    psi0: &Wavefunction,
    system: &SystemSpec,
    constants: &PhysicalConstants,
    config: &PropagatorConfig,
    mut on_step: F,
) -> Result<Wavefunction>
where
    F: FnMut(usize, f64, &[Complex64]),
{
    if psi0.grid().space() != Space::Position {
        return Err(Error::Configuration(
            "propagation starts from a position-space state".into(),
        ));
    }
    let pair = FourierPair::new(*psi0.grid(), constants.hbar())?;
    let mut op = SplitOperator::new(&pair, system, constants, config.dt)?;
    op.set_edge_tolerance(config.edge_tolerance);
    let mut state = psi0.samples().to_vec();
    let t_start = psi0.time();
    for step in 1..=config.n_steps {
        op.step(&mut state);
        op.check_edges(&state)?;
        on_step(step, t_start + step as f64 * config.dt, &state);
    }
    Wavefunction::new(*psi0.grid(), state, t_start + config.horizon())
}
