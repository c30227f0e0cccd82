//! Self-consistency suite for one parameter set: the analytic solution is
//! cross-checked against the RK4 oracle, the closed forms and itself.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{Operator, C64};
use crate::model::{eigenstructure, BareState, DressedState, ModelParams};
use crate::observables::{
    excited_population, fit_short_time_rate, richardson_initial_slope, sanity, short_time_window,
    SanityReport,
};
use crate::oracle::{build_liouvillian, integrate, verify_eigenpairs, DEFAULT_STEP};
use crate::spectral::{
    eigenoperators, evolve_analytic, expand_initial, pe_closed_form, pe_expanded, short_time_rate,
    SpectralBasis,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    /// Horizon for the solver comparison and physicality scan.
    pub t_end: f64,
    pub step: f64,
    /// Shift applied to `lambda_6` (and its conjugate) before checking.
    /// Non-zero values are a negative control: the suite must fail.
    pub lambda6_shift: C64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            t_end: 200.0,
            step: DEFAULT_STEP,
            lambda6_shift: C64::new(0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    /// Measured error (or relative error) compared against `threshold`.
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        // NaN must fail, hence the explicit comparison.
        Check {
            name,
            value,
            threshold,
            passed: value <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub params: ModelParams,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Closed-form expansion of `|e0><e0|`: `C1 = 1`, `C2 = sin^2(theta/2)`,
/// `C3 = cos^2(theta/2)`, `C6 = C9 = -sin(theta)/2`, the rest zero.
fn excited_coefficients_error(params: &ModelParams, basis: &SpectralBasis) -> Result<f64> {
    let es = eigenstructure(params);
    let (sh, ch) = (0.5 * es.theta).sin_cos();
    let half_sin = -0.5 * es.sin_theta();
    let expected = [
        1.0,
        sh * sh,
        ch * ch,
        0.0,
        0.0,
        half_sin,
        0.0,
        0.0,
        half_sin,
    ];
    let coeffs = expand_initial(&BareState::ExcitedVacuum.projector(), basis)?;
    Ok(coeffs
        .c
        .iter()
        .zip(expected)
        .map(|(c, e)| (c - e).norm())
        .fold(0.0, f64::max))
}

fn reconstruction_error(params: &ModelParams, basis: &SpectralBasis) -> Result<f64> {
    let es = eigenstructure(params);
    let plus = es.ket(DressedState::Plus);
    let e0 = BareState::ExcitedVacuum.ket();
    let g1 = BareState::GroundOnePhonon.ket();
    let superposition = (e0 + g1 * C64::new(0.0, 1.0)).unscale(2f64.sqrt());
    let states = [
        BareState::ExcitedVacuum.projector(),
        BareState::GroundOnePhonon.projector(),
        BareState::GroundVacuum.projector(),
        plus * plus.adjoint(),
        superposition * superposition.adjoint(),
        Operator::identity().unscale(3.0),
    ];
    let mut worst = 0.0_f64;
    for rho0 in &states {
        let coeffs = expand_initial(rho0, basis)?;
        let rebuilt = evolve_analytic(basis, &coeffs, 0.0)?;
        worst = worst.max((rebuilt - rho0).norm());
    }
    Ok(worst)
}

fn rate_error(fitted: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        fitted.abs()
    } else {
        (fitted / exact - 1.0).abs()
    }
}

/// Run the suite. Tolerances: eigenpairs, coefficients, reconstruction and
/// closed-form identities `1e-12`; analytic vs RK4 `1e-8`; short-time rate
/// `1%`; Richardson slope `1e-6`.
pub fn validate(params: &ModelParams, options: &ValidationOptions) -> Result<ValidationReport> {
    let mut basis = eigenoperators(params);
    if options.lambda6_shift != C64::new(0.0, 0.0) {
        basis.perturb_eigenvalue(6, options.lambda6_shift);
    }
    let l = build_liouvillian(params);
    let mut checks = Vec::new();

    checks.push(Check::at_most(
        "eigenpair_residual",
        verify_eigenpairs(&l, &basis).max(),
        1e-12,
    ));
    checks.push(Check::at_most(
        "excited_coefficients",
        excited_coefficients_error(params, &basis)?,
        1e-12,
    ));
    checks.push(Check::at_most(
        "reconstruction",
        reconstruction_error(params, &basis)?,
        1e-12,
    ));

    let rabi = eigenstructure(params).rabi_frequency;
    let identity_err = (0..10_000)
        .map(|i| i as f64 * options.t_end / 9_999.0)
        .map(|t| (pe_closed_form(params, t) - pe_expanded(params, t)).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("closed_form_identity", identity_err, 1e-12));

    // Operator evolution vs the scalar closed form on a grid that resolves
    // the Rabi period.
    let rho0 = BareState::ExcitedVacuum.projector();
    let coeffs = expand_initial(&rho0, &basis)?;
    let grid_dt = PI / (40.0 * rabi);
    let n = (options.t_end / grid_dt).ceil() as usize;
    let mut operator_err = 0.0_f64;
    for i in 0..=n {
        let t = (i as f64 * grid_dt).min(options.t_end);
        let pe = excited_population(&evolve_analytic(&basis, &coeffs, t)?)?;
        operator_err = operator_err.max((pe - pe_closed_form(params, t)).abs());
    }
    checks.push(Check::at_most(
        "operator_vs_closed_form",
        operator_err,
        1e-12,
    ));

    let traj = integrate(&l, &rho0, options.t_end, options.step)?;
    let mut solver_err = 0.0_f64;
    let mut reports = Vec::with_capacity(traj.len());
    for (&t, rho) in traj.times.iter().zip(&traj.states) {
        let analytic = excited_population(&evolve_analytic(&basis, &coeffs, t)?)?;
        solver_err = solver_err.max((analytic - excited_population(rho)?).abs());
        reports.push(sanity(rho));
    }
    checks.push(Check::at_most("solver_deviation", solver_err, 1e-8));
    let worst = SanityReport::worst(&reports).expect("trajectory has at least one point");
    checks.push(Check::at_most(
        "trace_drift",
        worst.trace_drift,
        SanityReport::TRACE_LIMIT,
    ));
    checks.push(Check::at_most(
        "hermiticity_defect",
        worst.hermiticity_defect,
        SanityReport::HERMITICITY_LIMIT,
    ));
    checks.push(Check::at_most(
        "negative_eigenvalue",
        (-worst.min_eigenvalue).max(0.0),
        -SanityReport::EIGENVALUE_FLOOR,
    ));

    let exact_rate = short_time_rate(params);
    let window = short_time_window(params);
    let times: Vec<f64> = (0..=100).map(|i| i as f64 * window / 100.0).collect();
    let pe: Vec<f64> = times
        .iter()
        .map(|&t| excited_population(&evolve_analytic(&basis, &coeffs, t)?))
        .collect::<Result<_>>()?;
    let fitted = fit_short_time_rate(&times, &pe)?;
    checks.push(Check::at_most(
        "short_time_rate",
        rate_error(fitted, exact_rate),
        0.01,
    ));

    let slope = richardson_initial_slope(|t| -pe_closed_form(params, t).ln(), 1e-4);
    checks.push(Check::at_most(
        "richardson_slope",
        (slope - exact_rate).abs(),
        1e-6,
    ));

    Ok(ValidationReport {
        params: *params,
        checks,
    })
}
