//! Uniform grids, sampled wavefunctions and quadrature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Edge samples larger than this fraction of the peak magnitude are treated as
/// truncation of the packet by the grid.
pub const DEFAULT_BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    Position,
    Momentum,
}

/// How the `n_points` samples cover `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridConvention {
    /// Both endpoints are samples; spacing `(max - min) / (n - 1)`.
    /// Integrated with composite Simpson (odd `n`) or trapezoid (even `n`).
    Closed,
    /// `max` is the periodic image of `min` and is not sampled; spacing
    /// `(max - min) / n`. This is the layout the transform pair expects.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    min: f64,
    max: f64,
    n_points: usize,
    space: Space,
    convention: GridConvention,
}

impl Grid {
    pub fn closed(min: f64, max: f64, n_points: usize, space: Space) -> Result<Self> {
        Self::build(min, max, n_points, space, GridConvention::Closed)
    }

    pub fn periodic(min: f64, max: f64, n_points: usize, space: Space) -> Result<Self> {
        Self::build(min, max, n_points, space, GridConvention::Periodic)
    }

    fn build(
        min: f64,
        max: f64,
        n_points: usize,
        space: Space,
        convention: GridConvention,
    ) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::Configuration(format!(
                "grid bounds must be finite with min < max, got [{min}, {max}]"
            )));
        }
        if n_points < 2 {
            return Err(Error::Configuration(format!(
                "grid needs at least 2 points, got {n_points}"
            )));
        }
        Ok(Self {
            min,
            max,
            n_points,
            space,
            convention,
        })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn convention(&self) -> GridConvention {
        self.convention
    }

    pub fn spacing(&self) -> f64 {
        match self.convention {
            GridConvention::Closed => (self.max - self.min) / (self.n_points - 1) as f64,
            GridConvention::Periodic => (self.max - self.min) / self.n_points as f64,
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// True when the sample set is symmetric under `x -> -x` (modulo the
    /// periodic image for periodic grids).
    pub fn is_symmetric(&self) -> bool {
        (self.min + self.max).abs() <= 1e-12 * (self.max - self.min)
            && (self.convention == GridConvention::Closed || self.n_points.is_multiple_of(2))
    }

    /// Index of the sample at `-x_j`; requires [`Grid::is_symmetric`].
    pub fn mirror_index(&self, j: usize) -> usize {
        match self.convention {
            GridConvention::Closed => self.n_points - 1 - j,
            GridConvention::Periodic => (self.n_points - j) % self.n_points,
        }
    }

    /// Same bounds and sampling (space included).
    pub fn matches(&self, other: &Grid) -> bool {
        self == other
    }

    /// Quadrature of sampled values over the grid.
    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        debug_assert_eq!(values.len(), self.n_points);
        weighted_sum(self, values.iter().copied(), Complex64::new(0.0, 0.0))
    }

    pub fn integrate_real(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        weighted_sum(self, values.iter().copied(), 0.0)
    }

    /// Quadrature weight of sample `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        let n = self.n_points;
        match self.convention {
            GridConvention::Periodic => h,
            GridConvention::Closed if n % 2 == 1 && n >= 3 => {
                if i == 0 || i == n - 1 {
                    h / 3.0
                } else if i % 2 == 1 {
                    4.0 * h / 3.0
                } else {
                    2.0 * h / 3.0
                }
            }
            GridConvention::Closed => {
                if i == 0 || i == n - 1 {
                    0.5 * h
                } else {
                    h
                }
            }
        }
    }
}

fn weighted_sum<T>(grid: &Grid, values: impl Iterator<Item = T>, zero: T) -> T
where
    T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    values
        .enumerate()
        .fold(zero, |acc, (i, v)| acc + v * grid.weight(i))
}

/// Complex samples of a wavefunction at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Grid,
    samples: Vec<Complex64>,
    time: f64,
}

impl Wavefunction {
    pub fn new(grid: Grid, samples: Vec<Complex64>, time: f64) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Configuration(format!(
                "{} samples for a grid of {} points",
                samples.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            samples,
            time,
        })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(grid: Grid, time: f64, exec: Execution, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Sync + Send,
    {
        let samples = exec::map_range(exec, grid.len(), |i| f(grid.point(i)));
        Self {
            grid,
            samples,
            time,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|z| z * k).collect(),
            ..self.clone()
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|z| z.conj()).collect(),
            ..self.clone()
        }
    }

    /// `psi(-x)` on a symmetric grid.
    pub fn reflected(&self) -> Result<Self> {
        if !self.grid.is_symmetric() {
            return Err(Error::Configuration(
                "parity reflection needs a grid symmetric about the origin".into(),
            ));
        }
        let samples = (0..self.grid.len())
            .map(|j| self.samples[self.grid.mirror_index(j)])
            .collect();
        Ok(Self {
            samples,
            ..self.clone()
        })
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Fails when either end sample exceeds `tolerance` times the peak.
    pub fn check_boundary(&self, tolerance: f64) -> Result<()> {
        let n = self.samples.len();
        let edge = self.samples[0].norm().max(self.samples[n - 1].norm());
        self.check_edge(edge, tolerance)
    }

    /// Like [`Wavefunction::check_boundary`] but over the outermost `band`
    /// samples on each side.
    pub fn check_edge_band(&self, band: usize, tolerance: f64) -> Result<()> {
        let n = self.samples.len();
        let band = band.clamp(1, n / 2);
        let edge = self.samples[..band]
            .iter()
            .chain(&self.samples[n - band..])
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        self.check_edge(edge, tolerance)
    }

    fn check_edge(&self, edge: f64, tolerance: f64) -> Result<()> {
        let peak = self.peak();
        if peak > 0.0 && edge > tolerance * peak {
            return Err(Error::GridTruncation {
                edge,
                peak,
                tolerance,
            });
        }
        Ok(())
    }

    /// `<x>` and `sqrt(<x^2> - <x>^2)` of the sampled density (position space),
    /// normalised by the sampled norm.
    pub fn position_moments(&self) -> (f64, f64) {
        let xs = self.grid.points();
        let dens: Vec<f64> = self.samples.iter().map(|z| z.norm_sqr()).collect();
        let norm = self.grid.integrate_real(&dens);
        let m1: Vec<f64> = dens.iter().zip(&xs).map(|(d, x)| d * x).collect();
        let mean = self.grid.integrate_real(&m1) / norm;
        let m2: Vec<f64> = dens
            .iter()
            .zip(&xs)
            .map(|(d, x)| d * (x - mean) * (x - mean))
            .collect();
        let var = self.grid.integrate_real(&m2) / norm;
        (mean, var.sqrt())
    }
}

/// `integral |psi|^2` with the default boundary tolerance.
pub fn norm_squared(psi: &Wavefunction) -> Result<f64> {
    norm_squared_with_tolerance(psi, DEFAULT_BOUNDARY_TOLERANCE)
}

pub fn norm_squared_with_tolerance(psi: &Wavefunction, boundary_tolerance: f64) -> Result<f64> {
    psi.check_boundary(boundary_tolerance)?;
    let dens: Vec<f64> = psi.samples.iter().map(|z| z.norm_sqr()).collect();
    Ok(psi.grid.integrate_real(&dens))
}
