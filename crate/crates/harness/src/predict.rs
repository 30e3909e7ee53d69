//! Closed-form predictions tabulated over the cartesian product of the sweep axes.

use dirty_bosons::analytic::{filled_state_correlated, filled_state_uncorrelated, trap_regime, FilledState};
use dirty_bosons::scales::DisorderClass;
use dirty_bosons::{derive_scales, PhysicalParams, Scales};

use crate::config::{apply_axis, RunConfig, SweepAxis, SweepParameter};
use crate::error::{HarnessError, Result};
use crate::persist::{cell, Table};

/// One point of the parameter grid: the axis values and the resulting parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub values: Vec<f64>,
    pub params: PhysicalParams,
}

/// Cartesian product of the axes, last axis fastest. Density ratios are applied after
/// every other axis so that they refer to the critical density of the final parameters.
pub fn parameter_grid(base: &PhysicalParams, axes: &[SweepAxis]) -> Result<Vec<GridPoint>> {
    let mut combos: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut c = prefix.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    combos
        .into_iter()
        .map(|values| {
            let mut params = base.clone();
            for (axis, &v) in axes.iter().zip(&values) {
                if axis.parameter != SweepParameter::DensityRatio {
                    params = apply_axis(&params, axis.parameter, v, None)?;
                }
            }
            for (axis, &v) in axes.iter().zip(&values) {
                if axis.parameter == SweepParameter::DensityRatio {
                    let n_c = derive_scales(&params)?.critical_density;
                    params = apply_axis(&params, axis.parameter, v, n_c)?;
                }
            }
            Ok(GridPoint { values, params })
        })
        .collect()
}

/// Filled-well state below `n_c` for the disorder class at hand.
pub fn filled_state(n: f64, scales: &Scales, config: &RunConfig) -> Result<FilledState> {
    let state = match scales.disorder_class {
        DisorderClass::StronglyCorrelated => filled_state_correlated(n, scales)?,
        _ => filled_state_uncorrelated(n, scales, config.prefactor)?,
    };
    Ok(state)
}

pub const PREDICT_COLUMNS: [&str; 16] = [
    "mean_density",
    "coupling_g",
    "critical_density",
    "larkin_length",
    "larkin_energy",
    "healing_length",
    "phase",
    "chemical_potential",
    "well_radius",
    "spacing",
    "tunneling",
    "particles_per_well",
    "trap_label",
    "gamma",
    "cloud_size",
    "fragment_size",
];

/// Analytic table over the sweep axes (a single row when there are none).
pub fn run_predict(config: &RunConfig) -> Result<Table> {
    let mut headers: Vec<&str> = config.sweep.iter().map(|a| a.parameter.name()).collect();
    headers.extend(PREDICT_COLUMNS);
    let mut table = Table::new(&headers);
    for point in parameter_grid(&config.params, &config.sweep)? {
        let p = &point.params;
        let scales = derive_scales(p)?;
        let n = p.mean_density;
        let n_c = scales.critical_density;
        let (phase, state, mu) = match (n, n_c, scales.coupling_g) {
            (Some(n), Some(n_c), Some(g)) if n >= n_c => ("superfluid", None, Some(g * n)),
            (Some(n), Some(_), _) => {
                let s = filled_state(n, &scales, config)?;
                let mu = s.chemical_potential;
                ("fragmented", Some(s), Some(mu))
            }
            _ => ("", None, None),
        };
        let regime = match (p.trap_frequency, p.particle_count, scales.coupling_g) {
            (Some(_), Some(_), Some(_)) => Some(trap_regime(p, &scales)?),
            _ => None,
        };
        let mut row: Vec<String> = point.values.iter().map(|&v| cell(Some(v))).collect();
        row.extend([
            cell(n),
            cell(scales.coupling_g),
            cell(n_c),
            cell(Some(scales.larkin_length)),
            cell(Some(scales.larkin_energy)),
            cell(scales.healing_length),
            phase.to_string(),
            cell(mu),
            cell(state.as_ref().map(|s| s.well_radius)),
            cell(state.as_ref().map(|s| s.spacing)),
            cell(state.as_ref().map(|s| s.tunneling)),
            cell(state.as_ref().map(|s| s.particles_per_well)),
            regime.as_ref().map(|r| r.label.as_str().to_string()).unwrap_or_default(),
            cell(regime.as_ref().map(|r| r.gamma)),
            cell(regime.as_ref().map(|r| r.cloud_size)),
            cell(regime.as_ref().and_then(|r| r.fragment_size)),
        ]);
        table.push(row);
    }
    Ok(table)
}

/// `sweep` requires at least one axis.
pub fn require_axes(config: &RunConfig) -> Result<()> {
    if config.sweep.is_empty() {
        return Err(HarnessError::Validation("sweep: at least one [[sweep]] axis is required".into()));
    }
    Ok(())
}
