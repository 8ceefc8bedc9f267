//! Validation of a parsed scenario into something the pipeline can run.

use std::collections::HashSet;

use gausspacket::analytic::{closed_form_autocorr, oscillator_case, OscillatorCase};
use gausspacket::grid::DEFAULT_BOUNDARY_TOLERANCE;
use gausspacket::{Grid, PacketParams, PhysicalConstants, Space, SystemSpec};

use crate::config::{Diagnostic, Method, ScenarioConfig, SystemConfig};
use crate::error::CliError;

/// Propagation steps per natural timescale when the config leaves
/// `steps_per_sample` unset.
pub const DEFAULT_STEPS_PER_TIMESCALE: f64 = 2000.0;

#[derive(Debug, Clone)]
pub struct Scenario {
    /// The input with every default made explicit.
    pub resolved: ScenarioConfig,
    pub system: SystemSpec,
    pub params: PacketParams,
    pub times: Vec<f64>,
    /// Periodic position grid for the numeric routes.
    pub grid: Grid,
    pub steps_per_sample: usize,
    /// Propagation step.
    pub dt: f64,
    pub edge_tolerance: f64,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.resolved.name
    }

    pub fn has(&self, m: Method) -> bool {
        self.resolved.methods.contains(&m)
    }

    pub fn wants(&self, d: Diagnostic) -> bool {
        self.resolved.diagnostics.contains(&d)
    }

    pub fn anticorrelation(&self) -> bool {
        self.resolved.anticorrelation
    }
}

pub fn system_spec(cfg: &SystemConfig) -> Result<SystemSpec, gausspacket::Error> {
    match *cfg {
        SystemConfig::Free => Ok(SystemSpec::free()),
        SystemConfig::Accelerated { force } => SystemSpec::accelerated(force),
        SystemConfig::Harmonic { omega } => SystemSpec::harmonic(omega),
        SystemConfig::Inverted { omega_tilde } => SystemSpec::inverted(omega_tilde),
    }
}

/// Time over which the packet changes appreciably: `t0` without a
/// potential, `T_cl` for the harmonic and `1/w` for the inverted oscillator.
pub fn natural_timescale(system: &SystemSpec, params: &PacketParams) -> f64 {
    match *system {
        SystemSpec::FreeParticle | SystemSpec::UniformAcceleration { .. } => {
            params.spreading_time()
        }
        SystemSpec::Harmonic { omega } => 2.0 * std::f64::consts::PI / omega,
        SystemSpec::Inverted { omega_tilde } => 1.0 / omega_tilde,
    }
}

pub fn sample_times(t_max: f64, n_samples: usize) -> Vec<f64> {
    if n_samples == 1 {
        return vec![0.0];
    }
    let last = (n_samples - 1) as f64;
    (0..n_samples).map(|k| k as f64 / last * t_max).collect()
}

pub fn resolve(cfg: &ScenarioConfig, index: usize) -> Result<Scenario, CliError> {
    let at = |field: &str| format!("scenario[{index}].{field}");
    let name = &cfg.name;
    if name.is_empty()
        || !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    {
        return Err(CliError::config(
            at("name"),
            format!("`{name}` must be non-empty [A-Za-z0-9_-]"),
        ));
    }
    if cfg.methods.is_empty() {
        return Err(CliError::config(
            at("methods"),
            "at least one method is required",
        ));
    }
    if cfg.methods.iter().collect::<HashSet<_>>().len() != cfg.methods.len() {
        return Err(CliError::config(at("methods"), "duplicate method"));
    }
    if cfg.n_samples == 0 {
        return Err(CliError::config(at("n_samples"), "must be at least 1"));
    }
    if !(cfg.t_max.is_finite() && cfg.t_max >= 0.0) || (cfg.n_samples > 1 && cfg.t_max == 0.0) {
        return Err(CliError::config(
            at("t_max"),
            format!("must be finite and > 0, got {}", cfg.t_max),
        ));
    }

    let system = system_spec(&cfg.system).map_err(|e| CliError::config(at("system"), e))?;
    let p = &cfg.packet;
    let constants =
        PhysicalConstants::new(p.hbar, p.mass).map_err(|e| CliError::config(at("packet"), e))?;
    let params = match (p.alpha, p.beta) {
        (Some(alpha), None) => PacketParams::new(alpha, p.x0, p.p0, constants),
        (None, Some(beta)) => PacketParams::with_beta(beta, p.x0, p.p0, constants),
        _ => {
            return Err(CliError::config(
                at("packet"),
                "give exactly one of `alpha` or `beta`",
            ));
        }
    }
    .map_err(|e| CliError::config(at("packet"), e))?;

    let harmonic = matches!(system, SystemSpec::Harmonic { .. });
    if cfg.has_spectral() && !harmonic {
        return Err(CliError::config(
            at("methods"),
            "spectral is only available for the harmonic oscillator",
        ));
    }
    let needs_closed_form = cfg.methods.contains(&Method::Analytic)
        || cfg.diagnostics.iter().any(|d| {
            matches!(
                d,
                Diagnostic::Periodicity
                    | Diagnostic::HalfPeriodRevival
                    | Diagnostic::Anticorrelation
            )
        });
    if needs_closed_form {
        if let Err(e) = closed_form_autocorr(&system, &params, 0.0) {
            return Err(CliError::config(
                at("methods"),
                format!("no-closed-form: {e}"),
            ));
        }
    }
    if cfg.anticorrelation && !harmonic {
        return Err(CliError::config(
            at("anticorrelation"),
            "only defined for the harmonic oscillator",
        ));
    }
    for d in &cfg.diagnostics {
        let ok = match d {
            Diagnostic::Saturation => matches!(
                system,
                SystemSpec::FreeParticle | SystemSpec::Inverted { .. }
            ),
            Diagnostic::Mandelstam => system == SystemSpec::FreeParticle,
            Diagnostic::ReturnSuppression => match system {
                SystemSpec::UniformAcceleration { force } => force * params.p0() < 0.0,
                _ => false,
            },
            Diagnostic::Periodicity => harmonic,
            Diagnostic::HalfPeriodRevival => {
                harmonic
                    && oscillator_case(&params, system.oscillator_frequency().unwrap_or(1.0))
                        == Some(OscillatorCase::Centred)
            }
            Diagnostic::Anticorrelation => harmonic && cfg.anticorrelation,
            Diagnostic::Spread => cfg.methods.contains(&Method::SplitOperator),
        };
        if !ok {
            return Err(CliError::config(
                at("diagnostics"),
                format!("`{}` does not apply to this scenario", d.as_str()),
            ));
        }
    }
    if cfg.diagnostics.contains(&Diagnostic::Saturation) && cfg.t_max == 0.0 {
        return Err(CliError::config(at("t_max"), "saturation needs t_max > 0"));
    }

    let g = &cfg.grid;
    let grid = Grid::periodic(g.min, g.max, g.n_points, Space::Position)
        .map_err(|e| CliError::config(at("grid"), e))?;
    if !g.n_points.is_power_of_two() {
        return Err(CliError::config(
            at("grid.n_points"),
            "must be a power of two",
        ));
    }
    if cfg.anticorrelation && !grid.is_symmetric() {
        return Err(CliError::config(
            at("grid"),
            "anticorrelation needs a grid symmetric about 0",
        ));
    }

    let times = sample_times(cfg.t_max, cfg.n_samples);
    let timescale = natural_timescale(&system, &params);
    let sample_dt = if cfg.n_samples > 1 {
        times[1] - times[0]
    } else {
        0.0
    };
    let steps_per_sample = match cfg.propagator.steps_per_sample {
        Some(0) => {
            return Err(CliError::config(
                at("propagator.steps_per_sample"),
                "must be at least 1",
            ))
        }
        Some(n) => n,
        // The small offset keeps exact multiples from rounding up a step.
        None => {
            ((sample_dt * DEFAULT_STEPS_PER_TIMESCALE / timescale - 1e-9).ceil() as usize).max(1)
        }
    };
    let dt = if cfg.n_samples > 1 {
        (times[1] - times[0]) / steps_per_sample as f64
    } else {
        timescale / DEFAULT_STEPS_PER_TIMESCALE
    };
    let edge_tolerance = cfg
        .propagator
        .edge_tolerance
        .unwrap_or(DEFAULT_BOUNDARY_TOLERANCE);
    if !(edge_tolerance.is_finite() && edge_tolerance > 0.0) {
        return Err(CliError::config(
            at("propagator.edge_tolerance"),
            "must be finite and > 0",
        ));
    }

    let mut resolved = cfg.clone();
    resolved.propagator.steps_per_sample = Some(steps_per_sample);
    resolved.propagator.edge_tolerance = Some(edge_tolerance);
    Ok(Scenario {
        resolved,
        system,
        params,
        times,
        grid,
        steps_per_sample,
        dt,
        edge_tolerance,
    })
}

impl ScenarioConfig {
    fn has_spectral(&self) -> bool {
        self.methods.contains(&Method::Spectral)
    }
}
