use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridConvention, Space, Wavefunction};

/// Discrete version of
/// `psi(x) = (2 pi hbar)^(-1/2) integral exp(i p x / hbar) phi(p) dp`
/// and its inverse on a periodic position grid and the conjugate momentum
/// grid.
///
/// With `L = x_max - x_min` and `N` points, the momentum grid has spacing
/// `dp = 2 pi hbar / L` and covers `[-N/2, N/2) dp`. The offset phases
/// `exp(-i p_k x_min / hbar)` are applied explicitly so that sampled analytic
/// transform pairs agree pointwise.
pub struct FourierPair {
    position: Grid,
    momentum: Grid,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    // exp(i k dp x_min / hbar)
    offset: Vec<Complex64>,
    // exp(-i p_min x_min / hbar)
    origin: Complex64,
    forward_scale: f64,
    inverse_scale: f64,
}

impl std::fmt::Debug for FourierPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPair")
            .field("position", &self.position)
            .field("momentum", &self.momentum)
            .finish_non_exhaustive()
    }
}

impl FourierPair {
    pub fn new(position: Grid, hbar: f64) -> Result<Self> {
        if position.space() != Space::Position {
            return Err(Error::Configuration(
                "transform pair needs a position-space grid".into(),
            ));
        }
        if position.convention() != GridConvention::Periodic {
            return Err(Error::Configuration(
                "transform pair needs a periodic grid (endpoint excluded)".into(),
            ));
        }
        let n = position.len();
        if !n.is_power_of_two() {
            return Err(Error::Configuration(format!(
                "transform grid size must be a power of two, got {n}"
            )));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::invalid("hbar", "must be finite and > 0"));
        }
        let length = position.max() - position.min();
        let dx = position.spacing();
        let dp = TAU * hbar / length;
        let half = (n / 2) as f64;
        let momentum = Grid::periodic(-half * dp, half * dp, n, Space::Momentum)?;

        // Reduce k * x_min / L modulo 1 before scaling by 2 pi.
        let frac = position.min() / length;
        let offset = (0..n)
            .map(|k| Complex64::from_polar(1.0, TAU * (k as f64 * frac).rem_euclid(1.0)))
            .collect();
        let origin = Complex64::from_polar(1.0, TAU * (0.5 * n as f64 * frac).rem_euclid(1.0));

        let mut planner = FftPlanner::new();
        let norm = (TAU * hbar).sqrt();
        Ok(Self {
            position,
            momentum,
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
            offset,
            origin,
            forward_scale: dx / norm,
            inverse_scale: dp / norm,
        })
    }

    pub fn position_grid(&self) -> &Grid {
        &self.position
    }

    pub fn momentum_grid(&self) -> &Grid {
        &self.momentum
    }

    pub fn to_momentum(&self, psi: &Wavefunction) -> Result<Wavefunction> {
        if !psi.grid().matches(&self.position) {
            return Err(Error::Configuration(
                "wavefunction is not on this pair's position grid".into(),
            ));
        }
        // exp(-i p_min x_j / hbar) = exp(-i p_min x_min / hbar) (-1)^j.
        let mut buf: Vec<Complex64> = psi
            .samples()
            .iter()
            .enumerate()
            .map(|(j, z)| if j % 2 == 0 { *z } else { -z })
            .collect();
        self.fft.process(&mut buf);
        let pre = self.origin * self.forward_scale;
        for (v, w) in buf.iter_mut().zip(&self.offset) {
            *v *= pre * w.conj();
        }
        Wavefunction::new(self.momentum, buf, psi.time())
    }

    pub fn to_position(&self, phi: &Wavefunction) -> Result<Wavefunction> {
        if !phi.grid().matches(&self.momentum) {
            return Err(Error::Configuration(
                "wavefunction is not on this pair's momentum grid".into(),
            ));
        }
        let mut buf: Vec<Complex64> = phi
            .samples()
            .iter()
            .zip(&self.offset)
            .map(|(z, w)| z * w)
            .collect();
        self.ifft.process(&mut buf);
        let pre = self.origin.conj() * self.inverse_scale;
        for (j, v) in buf.iter_mut().enumerate() {
            *v *= if j % 2 == 0 { pre } else { -pre };
        }
        Wavefunction::new(self.position, buf, phi.time())
    }
}

/// Momentum of FFT bin `k` (unshifted order) for `n` bins of width `dp`.
pub(crate) fn fft_momentum(k: usize, n: usize, dp: f64) -> f64 {
    if k < n / 2 {
        k as f64 * dp
    } else {
        (k as f64 - n as f64) * dp
    }
}
