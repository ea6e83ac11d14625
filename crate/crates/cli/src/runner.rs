//! Runs closed sweeps and open scaling studies described by a config.

use qbattery::closed::{detect_transitions, sweep_1d_param};
use qbattery::open::{charge_chain, peak_ergotropy};
use qbattery::scaling::{classify_scaling, fit_power_law};
use qbattery::{
    ChainSpec, ChargeProtocol, ModeSpec, PeakSeries, PowerLawFit, ScalingClass, SweepParam, SweepResult, Temperature,
    Trajectory, Transition,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Mode, ModelParams};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    /// Value of the curve parameter, if the sweep has one.
    pub curve_value: Option<f64>,
    pub result: SweepResult,
    pub transitions: Vec<Transition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedOutcome {
    pub curve_param: Option<SweepParam>,
    pub curves: Vec<ClosedCurve>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpenOutcome {
    pub sizes: Vec<usize>,
    pub trajectories: Vec<Trajectory>,
    /// `(ξ_peak, t_peak)` per size.
    pub peaks: Vec<(f64, f64)>,
    pub fit: Option<(PowerLawFit, ScalingClass)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Closed(ClosedOutcome),
    Open(OpenOutcome),
}

fn set_param(model: &mut ModelParams, temperature: &mut f64, param: SweepParam, value: f64) {
    match param {
        SweepParam::J => model.j_coupling = value,
        SweepParam::Delta => model.delta = value,
        SweepParam::GammaCap => model.gamma_cap = value,
        SweepParam::Gamma => model.gamma = value,
        SweepParam::B => model.b_field = value,
        SweepParam::T => *temperature = value,
        SweepParam::K => model.k = value,
    }
}

/// One curve per value of the curve parameter; curves and grid points run on
/// the current rayon pool and come back in config order.
pub fn compute_closed(cfg: &ExperimentConfig) -> Result<ClosedOutcome> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::validation("sweep.param", "a closed sweep needs a sweep block"))?;
    let protocol = ChargeProtocol::one_period(cfg.omega, cfg.axis, cfg.time_points)
        .map_err(|e| CliError::validation("integrate.time_points", e.to_string()))?;
    let curve_values: Vec<Option<f64>> = match sweep.curve_param {
        Some(_) => sweep.curve_values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let curves = curve_values
        .par_iter()
        .map(|&curve_value| {
            let mut model = cfg.model;
            let mut temperature = cfg.temperature;
            if let (Some(p), Some(v)) = (sweep.curve_param, curve_value) {
                set_param(&mut model, &mut temperature, p, v);
            }
            if sweep.param == SweepParam::T {
                temperature = sweep.grid[0];
            }
            let context = match (sweep.curve_param, curve_value) {
                (Some(p), Some(v)) => format!("{} sweep at {p} = {v}", sweep.param),
                _ => format!("{} sweep", sweep.param),
            };
            let base = ModeSpec {
                k: model.k,
                j_coupling: model.j_coupling,
                delta: model.delta,
                gamma_cap: model.gamma_cap,
                gamma: model.gamma,
                b_field: model.b_field,
            };
            let temp = Temperature::new(temperature).map_err(|e| CliError::numerical(&context, e))?;
            let result = sweep_1d_param(&base, temp, &protocol, sweep.param, &sweep.grid)
                .map_err(|e| CliError::numerical(&context, e))?;
            let transitions = detect_transitions(&result, sweep.threshold);
            Ok(ClosedCurve {
                curve_value,
                result,
                transitions,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosedOutcome {
        curve_param: sweep.curve_param,
        curves,
    })
}

/// One trajectory per chain length, plus the power-law fit when there are at
/// least three lengths.
pub fn compute_open(cfg: &ExperimentConfig) -> Result<OpenOutcome> {
    let trajectories = cfg
        .sizes
        .par_iter()
        .map(|&n| {
            let chain = ChainSpec {
                n_sites: n,
                j_coupling: cfg.model.j_coupling,
                delta: cfg.model.delta,
                gamma_cap: cfg.model.gamma_cap,
                gamma: cfg.model.gamma,
                b_field: cfg.model.b_field,
            };
            let context = format!("open trajectory N = {n}");
            let temp = Temperature::new(cfg.temperature).map_err(|e| CliError::numerical(&context, e))?;
            charge_chain(&chain, temp, cfg.omega, cfg.axis, cfg.g, &cfg.integrator)
                .map_err(|e| CliError::numerical(&context, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let peaks: Vec<(f64, f64)> = trajectories.iter().map(peak_ergotropy).collect();
    let fit = if cfg.mode == Mode::OpenScaling {
        let sizes = cfg.sizes.iter().map(|&n| n as u32).collect();
        let values = peaks.iter().map(|p| p.0).collect();
        let fit = PeakSeries::new(sizes, values)
            .and_then(|s| fit_power_law(&s))
            .map_err(|e| CliError::numerical("power-law fit", e))?;
        Some((fit, classify_scaling(&fit, cfg.margin)))
    } else {
        None
    };
    Ok(OpenOutcome {
        sizes: cfg.sizes.clone(),
        trajectories,
        peaks,
        fit,
    })
}

pub fn compute(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.mode {
        Mode::ClosedSweep => compute_closed(cfg).map(Outcome::Closed),
        Mode::OpenRun | Mode::OpenScaling => compute_open(cfg).map(Outcome::Open),
        Mode::Figure => Err(CliError::validation("mode", "figure configs expand into panels before running")),
    }
}
