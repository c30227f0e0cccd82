//! Figure presets, scenarios, sweeps and data export.
//!
//! A [`Scenario`] fixes parameters, time grid, initial state and which
//! solvers to run; [`run_scenario`] evaluates it deterministically.

mod config;
mod export;
mod format;
mod sweep;
mod validation;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NjcError, Result};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, DensityMatrix, Operator, C64};
use crate::model::{eigenstructure, BareState, DressedState, ModelParams};
use crate::observables::{
    excited_population, find_extrema, fit_short_time_rate, refine_extrema, sanity,
    short_time_window, ExtremumKind, SanityReport,
};
use crate::oracle::{build_liouvillian, grid_intervals, integrate_on_grid, DEFAULT_STEP};
use crate::spectral::{
    eigenoperators, evolve_analytic, expand_initial, pe_closed_form, short_time_rate,
};

pub use config::{ScenarioConfig, CONFIG_VERSION};
pub use export::{
    bundle_csv, bundle_json, bundle_metadata, export_bundle, export_sweep, sweep_csv, sweep_json,
    write_with_sidecar, ExportFormat,
};
pub use format::format_number;
pub use sweep::{run_sweep, Axis, ParamName, SweepGrid, SweepRow, DEFAULT_GRID_CAP};
pub use validation::{validate, Check, ValidationOptions, ValidationReport};

/// Maximum accepted deviation between the analytic and numeric solvers.
pub const DEVIATION_TOLERANCE: f64 = 1e-8;

/// Output grid points required per oscillation period `pi / Omega`.
pub const SAMPLES_PER_PERIOD: f64 = 20.0;

pub const DEFAULT_T_END: f64 = 2000.0;
pub const DEFAULT_OUTPUT_DT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solvers {
    Analytic,
    Numeric,
    Both,
}

impl Solvers {
    pub fn analytic(self) -> bool {
        matches!(self, Solvers::Analytic | Solvers::Both)
    }

    pub fn numeric(self) -> bool {
        matches!(self, Solvers::Numeric | Solvers::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// `|e,0>`: qubit excited, resonator in vacuum.
    Excited,
    /// `|g,0>`
    Ground,
    DressedPlus,
    DressedMinus,
    /// Explicit density matrix in the bare basis.
    Matrix(DensityMatrix),
}

impl InitialState {
    pub fn density(&self, params: &ModelParams) -> DensityMatrix {
        let es = eigenstructure(params);
        let dressed = |s| {
            let k = es.ket(s);
            k * k.adjoint()
        };
        match self {
            InitialState::Excited => BareState::ExcitedVacuum.projector(),
            InitialState::Ground => BareState::GroundVacuum.projector(),
            InitialState::DressedPlus => dressed(DressedState::Plus),
            InitialState::DressedMinus => dressed(DressedState::Minus),
            InitialState::Matrix(m) => *m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub params: ModelParams,
    pub t_end: f64,
    /// Output grid spacing.
    pub dt: f64,
    /// Largest RK4 step; each output interval is split evenly.
    pub integrator_step: f64,
    pub solvers: Solvers,
    pub initial_state: InitialState,
}

impl Scenario {
    pub fn new(label: impl Into<String>, params: ModelParams) -> Self {
        Scenario {
            label: label.into(),
            params,
            t_end: DEFAULT_T_END,
            dt: DEFAULT_OUTPUT_DT,
            integrator_step: DEFAULT_STEP,
            solvers: Solvers::Both,
            initial_state: InitialState::Excited,
        }
    }

    /// Largest output spacing resolving the Rabi oscillation:
    /// `pi / (20 Omega)`.
    pub fn max_output_dt(&self) -> f64 {
        PI / (SAMPLES_PER_PERIOD * eigenstructure(&self.params).rabi_frequency)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(NjcError::InvalidScenario(msg));
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        let max_dt = self.max_output_dt();
        if self.dt > max_dt {
            return bad(format!(
                "dt = {} exceeds the sampling rule dt <= pi/(20 Omega) = {:.6} for Omega = {:.6}",
                self.dt,
                max_dt,
                eigenstructure(&self.params).rabi_frequency
            ));
        }
        if !(self.integrator_step.is_finite() && self.integrator_step > 0.0) {
            return bad(format!(
                "integrator_step must be positive, got {}",
                self.integrator_step
            ));
        }
        if let InitialState::Matrix(m) = &self.initial_state {
            let defect = hermiticity_defect(m);
            let trace = m.trace();
            let min_ev = hermitian_eigenvalues(m)[0];
            if defect > 1e-10 || (trace - 1.0).norm() > 1e-10 || min_ev < -1e-10 {
                return bad(format!(
                    "initial matrix is not a density matrix (hermiticity defect {defect:e}, trace {trace}, min eigenvalue {min_ev:e})"
                ));
            }
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=grid_intervals(self.t_end, self.dt))
            .map(|i| i as f64 * self.dt)
            .collect()
    }
}

/// The four figure presets. All share `omega = 1`, `g = 0.1` and start in
/// `|e,0>`.
pub fn preset(name: &str) -> Result<Scenario> {
    let (chi, gamma_plus, gamma_minus) = match name {
        "fig1" => (0.0, 0.004, 0.004),
        "fig2" => (0.04, 0.007, 0.001),
        "fig3" => (0.04, 0.004, 0.004),
        "fig4" => (0.0, 0.007, 0.001),
        other => return Err(NjcError::UnknownPreset(other.to_string())),
    };
    let params = ModelParams::new(1.0, 0.1, chi, gamma_plus, gamma_minus)?;
    Ok(Scenario::new(name, params))
}

pub const PRESETS: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

/// Scalar summary of the `|e,0>` dynamics for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub rabi_frequency: f64,
    pub theta: f64,
    /// Closed-form initial logarithmic decay rate.
    pub short_time_rate: f64,
    /// Same rate fitted from the sampled analytic series.
    pub fitted_short_time_rate: f64,
    /// First local minimum of `Pe(t)`; `None` if the decay is so strong
    /// that `Pe` has no minimum within the first oscillation period.
    pub first_min_t: Option<f64>,
    pub first_min_value: Option<f64>,
}

pub fn compute_metrics(params: &ModelParams) -> Result<Metrics> {
    let es = eigenstructure(params);
    let pe = |t: f64| pe_closed_form(params, t);

    let window = short_time_window(params);
    let fit_times: Vec<f64> = (0..=100).map(|i| i as f64 * window / 100.0).collect();
    let fit_values: Vec<f64> = fit_times.iter().map(|&t| pe(t)).collect();
    let fitted = fit_short_time_rate(&fit_times, &fit_values)?;

    let period = PI / es.rabi_frequency;
    let spacing = period / 400.0;
    let times: Vec<f64> = (0..=800).map(|i| i as f64 * spacing).collect();
    let values: Vec<f64> = times.iter().map(|&t| pe(t)).collect();
    let minima = find_extrema(&times, &values, ExtremumKind::Minima, period)?;
    let first = refine_extrema(&minima, pe, spacing).points.first().copied();

    Ok(Metrics {
        rabi_frequency: es.rabi_frequency,
        theta: es.theta,
        short_time_rate: short_time_rate(params),
        fitted_short_time_rate: fitted,
        first_min_t: first.map(|p| p.0),
        first_min_value: first.map(|p| p.1),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioBundle {
    pub scenario: Scenario,
    pub times: Vec<f64>,
    pub pe_analytic: Option<Vec<f64>>,
    pub pe_numeric: Option<Vec<f64>>,
    /// Worst-case physicality over the analytic snapshots.
    pub sanity_analytic: Option<SanityReport>,
    pub sanity_numeric: Option<SanityReport>,
    /// `max_t |pe_analytic - pe_numeric|` when both solvers ran.
    pub deviation: Option<f64>,
    pub metrics: Metrics,
}

impl ScenarioBundle {
    /// False only when both solvers ran and disagree beyond
    /// [`DEVIATION_TOLERANCE`].
    pub fn deviation_ok(&self) -> bool {
        self.deviation.is_none_or(|d| d <= DEVIATION_TOLERANCE)
    }
}

fn analytic_states(
    scenario: &Scenario,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    let basis = eigenoperators(&scenario.params);
    let coeffs = expand_initial(rho0, &basis)?;
    times
        .par_iter()
        .map(|&t| evolve_analytic(&basis, &coeffs, t))
        .collect()
}

fn populations(states: &[DensityMatrix]) -> Result<(Vec<f64>, Option<SanityReport>)> {
    let pe = states
        .iter()
        .map(excited_population)
        .collect::<Result<Vec<_>>>()?;
    let reports: Vec<SanityReport> = states.iter().map(sanity).collect();
    Ok((pe, SanityReport::worst(&reports)))
}

pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioBundle> {
    scenario.validate()?;
    let times = scenario.times();
    let rho0 = scenario.initial_state.density(&scenario.params);

    let (pe_analytic, sanity_analytic) = if scenario.solvers.analytic() {
        let (pe, report) = populations(&analytic_states(scenario, &rho0, &times)?)?;
        (Some(pe), report)
    } else {
        (None, None)
    };

    let (pe_numeric, sanity_numeric) = if scenario.solvers.numeric() {
        let l = build_liouvillian(&scenario.params);
        let traj = integrate_on_grid(
            &l,
            &rho0,
            scenario.t_end,
            scenario.dt,
            scenario.integrator_step,
        )?;
        debug_assert_eq!(traj.times.len(), times.len());
        let (pe, report) = populations(&traj.states)?;
        (Some(pe), report)
    } else {
        (None, None)
    };

    let deviation = match (&pe_analytic, &pe_numeric) {
        (Some(a), Some(n)) => Some(
            a.iter()
                .zip(n)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        ),
        _ => None,
    };

    Ok(ScenarioBundle {
        scenario: scenario.clone(),
        times,
        pe_analytic,
        pe_numeric,
        sanity_analytic,
        sanity_numeric,
        deviation,
        metrics: compute_metrics(&scenario.params)?,
    })
}

/// Convert a nested `[[[re, im]; 3]; 3]` row-major array into an operator.
pub fn operator_from_rows(rows: &[[[f64; 2]; 3]; 3]) -> Operator {
    Operator::from_fn(|i, j| C64::new(rows[i][j][0], rows[i][j][1]))
}

pub fn operator_to_rows(op: &Operator) -> [[[f64; 2]; 3]; 3] {
    let mut rows = [[[0.0; 2]; 3]; 3];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = [op[(i, j)].re, op[(i, j)].im];
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{equal_rates_minimum, pe_ideal};

    #[test]
    fn presets_have_expected_parameters() {
        let expect = [
            ("fig1", 0.0, 0.004, 0.004),
            ("fig2", 0.04, 0.007, 0.001),
            ("fig3", 0.04, 0.004, 0.004),
            ("fig4", 0.0, 0.007, 0.001),
        ];
        for (name, chi, gp, gm) in expect {
            let s = preset(name).unwrap();
            assert_eq!(s.params, ModelParams::new(1.0, 0.1, chi, gp, gm).unwrap());
            assert_eq!(s.initial_state, InitialState::Excited);
            assert_eq!((s.t_end, s.dt, s.integrator_step), (2000.0, 0.5, 0.01));
        }
        assert!(matches!(preset("fig7"), Err(NjcError::UnknownPreset(_))));
    }

    #[test]
    fn scenario_validation() {
        let mut s = preset("fig1").unwrap();
        s.t_end = 0.0;
        assert!(matches!(
            run_scenario(&s),
            Err(NjcError::InvalidScenario(_))
        ));
        let mut s = preset("fig2").unwrap();
        s.dt = 1.5;
        let msg = s.validate().unwrap_err().to_string();
        assert!(msg.contains("pi/(20 Omega)"), "{msg}");
        let mut s = preset("fig2").unwrap();
        s.initial_state = InitialState::Matrix(Operator::identity());
        assert!(s.validate().is_err());
    }

    #[test]
    fn analytic_fig1_matches_ideal_rabi() {
        let mut s = preset("fig1").unwrap();
        s.solvers = Solvers::Analytic;
        let b = run_scenario(&s).unwrap();
        assert_eq!(b.times.len(), 4001);
        assert!(b.pe_numeric.is_none() && b.deviation.is_none());
        for (t, pe) in b.times.iter().zip(b.pe_analytic.as_ref().unwrap()) {
            assert!((pe - pe_ideal(0.1, 0.004, *t)).abs() < 1e-12);
        }
        assert!(b.sanity_analytic.unwrap().is_physical());
    }

    #[test]
    fn metrics_first_minimum() {
        let m = compute_metrics(&preset("fig1").unwrap().params).unwrap();
        assert!((m.first_min_t.unwrap() - PI / 0.2).abs() < 1e-6);
        assert!(m.first_min_value.unwrap() < 1e-12);
        assert!((m.fitted_short_time_rate / m.short_time_rate - 1.0).abs() < 0.01);

        let p3 = preset("fig3").unwrap().params;
        let m3 = compute_metrics(&p3).unwrap();
        let t = m3.first_min_t.unwrap();
        let excess = m3.first_min_value.unwrap() - equal_rates_minimum(&p3, t).unwrap();
        assert!((0.0..2e-6).contains(&excess), "{excess:e}");
    }

    #[test]
    fn general_initial_state() {
        let mut s = preset("fig2").unwrap();
        s.t_end = 100.0;
        s.initial_state = InitialState::DressedPlus;
        let b = run_scenario(&s).unwrap();
        assert!(b.deviation.unwrap() < DEVIATION_TOLERANCE);
        // |E1+> only decays: Pe(t) = cos^2(theta/2) e^{-gamma_plus t / 2}.
        let es = eigenstructure(&s.params);
        let c2 = (0.5 * es.theta).cos().powi(2);
        for (t, pe) in b.times.iter().zip(b.pe_analytic.as_ref().unwrap()) {
            assert!((pe - c2 * (-0.0035 * t).exp()).abs() < 1e-12);
        }
    }
}
