//! Running the configured methods and diagnostics of one scenario.

use std::f64::consts::{E, PI};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use gausspacket::analysis::{
    assemble_series, mandelstam_check, saturation_asymptote, AutocorrSeries,
};
use gausspacket::analytic::{
    acceleration_modulus_sq, closed_form_anticorr, closed_form_autocorr, coherent_mean_number,
    eval_wavefunction, moments, oscillator_case, AutocorrSample, OscillatorCase,
};
use gausspacket::branch::unwrap_phases;
use gausspacket::exec::{map_slice, Execution};
use gausspacket::numeric::{
    expand_in_oscillator_basis_with, overlap, propagate, propagate_with, PropagatorConfig,
};
use gausspacket::{Space, SystemSpec, Wavefunction};

use crate::config::{Diagnostic, Method};
use crate::error::CliError;
use crate::scenario::Scenario;

/// One series per method.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub series: AutocorrSeries,
    /// `(t, numeric Delta x, closed-form Delta x)` when the spread diagnostic
    /// is requested.
    pub spreads: Vec<(f64, f64, f64)>,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= tolerance`.
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    /// Passes when `value > threshold`.
    fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: threshold,
            pass: value > threshold,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub runs: Vec<MethodRun>,
    pub checks: Vec<Check>,
}

impl ScenarioResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn run(&self, m: Method) -> Option<&MethodRun> {
        self.runs.iter().find(|r| r.method == m)
    }
}

fn physics(s: &Scenario) -> impl Fn(gausspacket::Error) -> CliError + '_ {
    move |source| CliError::Physics {
        scenario: s.name().to_owned(),
        source,
    }
}

/// Runs every method (in parallel) and then the checks. `tolerance_scale`
/// multiplies every deviation tolerance.
pub fn run_scenario(s: &Scenario, tolerance_scale: f64) -> Result<ScenarioResult, CliError> {
    let mut methods = s.resolved.methods.clone();
    methods.sort();
    let runs = map_slice(Execution::Parallel, &methods, |&m| {
        let start = Instant::now();
        let (series, spreads) = match m {
            Method::Analytic => (analytic_series(s)?, Vec::new()),
            Method::SplitOperator => split_operator_series(s)?,
            Method::Spectral => (spectral_series(s)?, Vec::new()),
        };
        Ok(MethodRun {
            method: m,
            series,
            spreads,
            runtime_s: start.elapsed().as_secs_f64(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, CliError>>()?;

    let mut checks = comparisons(s, &runs, tolerance_scale);
    for d in &s.resolved.diagnostics {
        checks.extend(diagnostic(s, *d, &runs, tolerance_scale)?);
    }
    Ok(ScenarioResult { runs, checks })
}

fn analytic_series(s: &Scenario) -> Result<AutocorrSeries, CliError> {
    let anti = s.anticorrelation();
    assemble_series(
        |t| {
            let mut sample = closed_form_autocorr(&s.system, &s.params, t)?;
            sample.a_bar = match (anti, sample.a_bar) {
                (false, _) => None,
                (true, Some(b)) => Some(b),
                // A centred packet is even, so A_bar = A.
                (true, None) => Some(sample.a),
            };
            Ok(sample)
        },
        &s.times,
    )
    .map_err(physics(s))
}

fn initial_state(s: &Scenario) -> Result<Wavefunction, CliError> {
    let psi0 = eval_wavefunction(&s.system, &s.params, Space::Position, &s.grid, 0.0)
        .map_err(physics(s))?;
    psi0.check_edge_band(gausspacket::numeric::EDGE_BAND, s.edge_tolerance)
        .map_err(physics(s))?;
    Ok(psi0)
}

fn series_from(samples: Vec<AutocorrSample>) -> AutocorrSeries {
    let unwrapped_phase = unwrap_phases(samples.iter().map(|x| x.a));
    AutocorrSeries {
        samples,
        unwrapped_phase,
    }
}

type Spread = (f64, f64, f64);
type Spreads = Vec<Spread>;

fn split_operator_series(s: &Scenario) -> Result<(AutocorrSeries, Spreads), CliError> {
    let psi0 = initial_state(s)?;
    let grid = *psi0.grid();
    let reference = psi0.samples();
    let anti = s.anticorrelation();
    let want_spread = s.wants(Diagnostic::Spread);
    let measure =
        |t: f64, state: &[Complex64]| -> Result<(AutocorrSample, Option<Spread>), CliError> {
            let prod: Vec<Complex64> = state
                .iter()
                .zip(reference)
                .map(|(a, b)| a.conj() * b)
                .collect();
            let a = grid.integrate(&prod);
            let a_bar = anti.then(|| {
                let prod: Vec<Complex64> = (0..grid.len())
                    .map(|j| state[grid.mirror_index(j)].conj() * reference[j])
                    .collect();
                grid.integrate(&prod)
            });
            let spread = if want_spread {
                let psi = Wavefunction::new(grid, state.to_vec(), t).map_err(physics(s))?;
                let exact = moments(&s.system, &s.params, t)
                    .map_err(physics(s))?
                    .spread_x;
                Some((t, psi.position_moments().1, exact))
            } else {
                None
            };
            Ok((AutocorrSample::new(t, a, a_bar), spread))
        };

    let mut samples = Vec::with_capacity(s.times.len());
    let mut spreads = Vec::new();
    let mut failure = None;
    let mut record = |t: f64, state: &[Complex64]| match measure(t, state) {
        Ok((sample, spread)) => {
            samples.push(sample);
            spreads.extend(spread);
        }
        Err(e) => {
            failure.get_or_insert(e);
        }
    };
    record(0.0, reference);
    if s.times.len() > 1 {
        let sps = s.steps_per_sample;
        let config = PropagatorConfig::new(s.dt, sps * (s.times.len() - 1))
            .map_err(physics(s))?
            .with_edge_tolerance(s.edge_tolerance);
        propagate_with(
            &psi0,
            &s.system,
            &s.params.constants(),
            &config,
            |step, _, state| {
                if step % sps == 0 {
                    record(s.times[step / sps], state);
                }
            },
        )
        .map_err(physics(s))?;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((series_from(samples), spreads))
}

fn spectral_series(s: &Scenario) -> Result<AutocorrSeries, CliError> {
    let SystemSpec::Harmonic { omega } = s.system else {
        unreachable!("validated: spectral needs the harmonic oscillator");
    };
    let psi0 = initial_state(s)?;
    let spec = &s.resolved.spectral;
    let expansion = expand_in_oscillator_basis_with(
        &psi0,
        omega,
        &s.params.constants(),
        spec.n_max,
        spec.tail_tolerance,
        Execution::Parallel,
    )
    .map_err(physics(s))?;
    let anti = s.anticorrelation();
    let samples = s
        .times
        .iter()
        .map(|&t| {
            AutocorrSample::new(
                t,
                expansion.autocorr(t),
                anti.then(|| expansion.anticorr(t)),
            )
        })
        .collect();
    Ok(series_from(samples))
}

fn max_deviation(
    a: &AutocorrSeries,
    b: &AutocorrSeries,
    f: impl Fn(&AutocorrSample, &AutocorrSample) -> f64,
) -> f64 {
    a.samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| f(x, y))
        .fold(0.0, f64::max)
}

fn comparisons(s: &Scenario, runs: &[MethodRun], scale: f64) -> Vec<Check> {
    let tol = &s.resolved.tolerances;
    let Some(reference) = runs.iter().find(|r| r.method == Method::Analytic) else {
        return Vec::new();
    };
    let mut checks = Vec::new();
    for run in runs.iter().filter(|r| r.method != Method::Analytic) {
        let m = run.method.as_str();
        let (a, b) = (&run.series, &reference.series);
        checks.push(Check::at_most(
            format!("{m}.max_abs_diff"),
            max_deviation(a, b, |x, y| (x.a - y.a).norm()),
            tol.max_abs_diff * scale,
        ));
        checks.push(Check::at_most(
            format!("{m}.max_abs2_diff"),
            max_deviation(a, b, |x, y| (x.modulus_sq - y.modulus_sq).abs()),
            tol.max_abs2_diff * scale,
        ));
        if s.anticorrelation() {
            checks.push(Check::at_most(
                format!("{m}.max_abs_diff_abar"),
                max_deviation(a, b, |x, y| match (x.a_bar, y.a_bar) {
                    (Some(p), Some(q)) => (p - q).norm(),
                    _ => f64::INFINITY,
                }),
                tol.max_abs_diff * scale,
            ));
        }
    }
    checks
}

fn diagnostic(
    s: &Scenario,
    d: Diagnostic,
    runs: &[MethodRun],
    scale: f64,
) -> Result<Vec<Check>, CliError> {
    let tol = &s.resolved.tolerances;
    let name = |suffix: &str| format!("{}.{suffix}", d.as_str());
    let primary = runs
        .iter()
        .find(|r| r.method == Method::Analytic)
        .unwrap_or(&runs[0]);
    let period = s.system.classical_period();
    let closed = |t: f64| closed_form_autocorr(&s.system, &s.params, t).map_err(physics(s));
    let checks = match d {
        Diagnostic::Saturation => {
            let c = saturation_asymptote(&s.system, &s.params).map_err(physics(s))?;
            let last = primary.series.samples.last().expect("non-empty series");
            let law = match s.system {
                SystemSpec::Inverted { omega_tilde } => c * (-omega_tilde * last.t).exp(),
                _ => c * 2.0 * s.params.spreading_time() / last.t,
            };
            vec![Check::at_most(
                name("relative_error"),
                (last.modulus_sq / law - 1.0).abs(),
                tol.saturation * scale,
            )]
        }
        Diagnostic::Mandelstam => {
            let r = mandelstam_check(&s.params, &primary.series).map_err(physics(s))?;
            vec![
                Check::at_most(
                    name("violation"),
                    (-r.min_margin).max(0.0),
                    tol.bound_margin * scale,
                ),
                Check::at_most(
                    name("c2_relative_diff"),
                    r.c2_relative_difference(),
                    tol.short_time_coefficient * scale,
                ),
                Check::at_most(name("c4_deficit"), (-r.c4_margin).max(0.0), 0.0),
                Check::at_most(
                    name("horizon_truncated"),
                    f64::from(u8::from(r.horizon_truncated)),
                    0.0,
                ),
            ]
        }
        Diagnostic::ReturnSuppression => {
            let SystemSpec::UniformAcceleration { force } = s.system else {
                unreachable!("validated: return suppression needs uniform acceleration");
            };
            let t_ret = 2.0 * s.params.p0().abs() / force.abs();
            let psi0 = initial_state(s)?;
            let n_steps = ((t_ret / s.dt).ceil() as usize).max(1);
            let config = PropagatorConfig::for_horizon(t_ret, n_steps)
                .map_err(physics(s))?
                .with_edge_tolerance(s.edge_tolerance);
            let psi =
                propagate(&psi0, &s.system, &s.params.constants(), &config).map_err(physics(s))?;
            let measured = overlap(&psi, &psi0).map_err(physics(s))?.norm();
            let exact = acceleration_modulus_sq(&s.params, force, t_ret).sqrt();
            let density: Vec<f64> = psi
                .samples()
                .iter()
                .zip(psi0.samples())
                .map(|(a, b)| a.norm() * b.norm())
                .collect();
            let density_overlap = s.grid.integrate_real(&density);
            vec![
                Check::at_most(
                    name("modulus_error"),
                    (measured - exact).abs(),
                    tol.return_modulus * scale,
                ),
                Check::above(
                    name("density_to_modulus_ratio"),
                    density_overlap / measured,
                    E,
                ),
            ]
        }
        Diagnostic::Periodicity => {
            let period = period.expect("harmonic");
            let k_max = ((s.resolved.t_max / period + 1e-9).floor() as usize).max(1);
            let mut worst = 0.0f64;
            for k in 1..=k_max {
                worst = worst.max((closed(k as f64 * period)?.modulus_sq - 1.0).abs());
            }
            let mut checks = vec![Check::at_most(
                name("modulus_at_periods"),
                worst,
                tol.periodicity * scale,
            )];
            let omega = 2.0 * PI / period;
            if oscillator_case(&s.params, omega) == Some(OscillatorCase::MinimumUncertainty) {
                let n = 2000;
                let mut min = f64::INFINITY;
                for j in 0..=n {
                    min = min.min(closed(period * j as f64 / n as f64)?.modulus_sq);
                }
                let want = (-4.0 * coherent_mean_number(&s.params, omega)).exp();
                checks.push(Check::at_most(
                    name("minimum_error"),
                    (min - want).abs(),
                    tol.periodicity * scale,
                ));
            }
            checks
        }
        Diagnostic::HalfPeriodRevival => {
            let period = period.expect("harmonic");
            let mut worst = 0.0f64;
            for k in 0..=2 {
                worst = worst.max((closed(0.5 * k as f64 * period)?.a.norm() - 1.0).abs());
            }
            vec![Check::at_most(
                name("modulus_error"),
                worst,
                tol.revival * scale,
            )]
        }
        Diagnostic::Anticorrelation => {
            let period = period.expect("harmonic");
            let omega = 2.0 * PI / period;
            let a_bar = match oscillator_case(&s.params, omega) {
                Some(OscillatorCase::MinimumUncertainty) => {
                    closed_form_anticorr(&s.params, omega, 0.5 * period).map_err(physics(s))?
                }
                _ => closed(0.5 * period)?.a,
            };
            vec![Check::at_most(
                name("half_period_modulus_error"),
                (a_bar.norm() - 1.0).abs(),
                tol.revival * scale,
            )]
        }
        Diagnostic::Spread => {
            let run = runs
                .iter()
                .find(|r| r.method == Method::SplitOperator)
                .expect("validated: spread needs split-operator");
            let worst = run
                .spreads
                .iter()
                .map(|(_, a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            vec![Check::at_most(
                name("max_abs_diff"),
                worst,
                tol.spread * scale,
            )]
        }
    };
    Ok(checks)
}
