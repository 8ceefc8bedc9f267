//! Physical constants, packet parameters and the four model Hamiltonians.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to decide whether a packet has the
/// minimum-uncertainty width `beta == beta0`.
pub const MIN_UNCERTAINTY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    hbar: f64,
    mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::invalid(
                "hbar",
                format!("must be finite and > 0, got {hbar}"),
            ));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid(
                "mass",
                format!("must be finite and > 0, got {mass}"),
            ));
        }
        Ok(Self { hbar, mass })
    }

    /// `hbar = m = 1`.
    pub const fn natural() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::natural()
    }
}

/// Defining constants of the initial Gaussian
///
/// `phi(p,0) ~ exp(-alpha^2 (p-p0)^2 / 2) exp(-i p x0 / hbar)`, i.e. a packet
/// centred at `x0` with mean momentum `p0`. `alpha` is an inverse momentum;
/// the position width parameter is `beta = alpha * hbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketParams {
    alpha: f64,
    x0: f64,
    p0: f64,
    constants: PhysicalConstants,
}

impl PacketParams {
    pub fn new(alpha: f64, x0: f64, p0: f64, constants: PhysicalConstants) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid(
                "alpha",
                format!("must be finite and > 0, got {alpha}"),
            ));
        }
        if !x0.is_finite() {
            return Err(Error::invalid("x0", "must be finite"));
        }
        if !p0.is_finite() {
            return Err(Error::invalid("p0", "must be finite"));
        }
        Ok(Self {
            alpha,
            x0,
            p0,
            constants,
        })
    }

    /// Builds the parameters from the position width `beta` instead of `alpha`.
    pub fn with_beta(beta: f64, x0: f64, p0: f64, constants: PhysicalConstants) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid(
                "beta",
                format!("must be finite and > 0, got {beta}"),
            ));
        }
        Self::new(beta / constants.hbar(), x0, p0, constants)
    }

    /// Minimum-uncertainty packet of an oscillator with frequency `omega`.
    pub fn min_uncertainty(
        omega: f64,
        x0: f64,
        p0: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid("omega", "must be finite and > 0"));
        }
        Self::with_beta(oscillator_length(omega, &constants), x0, p0, constants)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn constants(&self) -> PhysicalConstants {
        self.constants
    }

    pub fn hbar(&self) -> f64 {
        self.constants.hbar
    }

    pub fn mass(&self) -> f64 {
        self.constants.mass
    }

    pub fn beta(&self) -> f64 {
        self.alpha * self.constants.hbar
    }

    pub fn delta_p0(&self) -> f64 {
        1.0 / (self.alpha * std::f64::consts::SQRT_2)
    }

    pub fn delta_x0(&self) -> f64 {
        self.alpha * self.constants.hbar / std::f64::consts::SQRT_2
    }

    /// Free-particle spreading time `t0 = m hbar alpha^2`.
    pub fn spreading_time(&self) -> f64 {
        self.constants.mass * self.constants.hbar * self.alpha * self.alpha
    }

    pub fn scales(&self, system: &SystemSpec) -> DerivedScales {
        let t0 = self.spreading_time();
        match system.oscillator_frequency() {
            Some(w) => {
                let beta0 = oscillator_length(w, &self.constants);
                let beta = self.beta();
                DerivedScales {
                    t0,
                    beta0: Some(beta0),
                    r: Some(beta0 * beta0 / (beta * beta)),
                }
            }
            None => DerivedScales {
                t0,
                beta0: None,
                r: None,
            },
        }
    }

    /// True when `beta` equals the oscillator length of `omega` to within
    /// [`MIN_UNCERTAINTY_RTOL`].
    pub fn is_min_uncertainty(&self, omega: f64) -> bool {
        let beta0 = oscillator_length(omega, &self.constants);
        (self.beta() - beta0).abs() <= MIN_UNCERTAINTY_RTOL * beta0
    }
}

/// `beta0 = sqrt(hbar / (m omega))`.
pub fn oscillator_length(omega: f64, constants: &PhysicalConstants) -> f64 {
    (constants.hbar / (constants.mass * omega)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    pub t0: f64,
    /// Oscillator length, oscillator systems only.
    pub beta0: Option<f64>,
    /// `beta0^2 / beta^2`, oscillator systems only.
    pub r: Option<f64>,
}

/// One of the four model Hamiltonians `p^2/2m + V(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SystemSpec {
    FreeParticle,
    /// `V(x) = -F x`.
    UniformAcceleration {
        force: f64,
    },
    /// `V(x) = m omega^2 x^2 / 2`.
    Harmonic {
        omega: f64,
    },
    /// `V(x) = -m omega_tilde^2 x^2 / 2`.
    Inverted {
        omega_tilde: f64,
    },
}

impl SystemSpec {
    pub fn free() -> Self {
        SystemSpec::FreeParticle
    }

    pub fn accelerated(force: f64) -> Result<Self> {
        if !force.is_finite() {
            return Err(Error::invalid("force", "must be finite"));
        }
        Ok(SystemSpec::UniformAcceleration { force })
    }

    pub fn harmonic(omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(
                "omega",
                format!("must be finite and > 0, got {omega}"),
            ));
        }
        Ok(SystemSpec::Harmonic { omega })
    }

    pub fn inverted(omega_tilde: f64) -> Result<Self> {
        if !(omega_tilde.is_finite() && omega_tilde > 0.0) {
            return Err(Error::invalid(
                "omega_tilde",
                format!("must be finite and > 0, got {omega_tilde}"),
            ));
        }
        Ok(SystemSpec::Inverted { omega_tilde })
    }

    /// Re-checks the coupling of a value built directly from the enum.
    pub fn validate(&self) -> Result<()> {
        match *self {
            SystemSpec::FreeParticle => Ok(()),
            SystemSpec::UniformAcceleration { force } => Self::accelerated(force).map(|_| ()),
            SystemSpec::Harmonic { omega } => Self::harmonic(omega).map(|_| ()),
            SystemSpec::Inverted { omega_tilde } => Self::inverted(omega_tilde).map(|_| ()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemSpec::FreeParticle => "free particle",
            SystemSpec::UniformAcceleration { .. } => "uniform acceleration",
            SystemSpec::Harmonic { .. } => "harmonic oscillator",
            SystemSpec::Inverted { .. } => "inverted oscillator",
        }
    }

    pub fn potential(&self, x: f64, mass: f64) -> f64 {
        match *self {
            SystemSpec::FreeParticle => 0.0,
            SystemSpec::UniformAcceleration { force } => -force * x,
            SystemSpec::Harmonic { omega } => 0.5 * mass * omega * omega * x * x,
            SystemSpec::Inverted { omega_tilde } => -0.5 * mass * omega_tilde * omega_tilde * x * x,
        }
    }

    /// `omega` for the harmonic and `omega_tilde` for the inverted oscillator.
    pub fn oscillator_frequency(&self) -> Option<f64> {
        match *self {
            SystemSpec::Harmonic { omega } => Some(omega),
            SystemSpec::Inverted { omega_tilde } => Some(omega_tilde),
            _ => None,
        }
    }

    /// `T_cl = 2 pi / omega` for the harmonic oscillator.
    pub fn classical_period(&self) -> Option<f64> {
        match *self {
            SystemSpec::Harmonic { omega } => Some(std::f64::consts::TAU / omega),
            _ => None,
        }
    }
}
