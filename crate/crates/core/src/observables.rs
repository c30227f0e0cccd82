//! Physical quantities and diagnostics extracted from states and sampled
//! series.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{NjcError, Result};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, DensityMatrix};
use crate::model::{eigenstructure, BareState, ModelParams};

/// Populations outside `[-POPULATION_SLACK, 1 + POPULATION_SLACK]` are
/// rejected as unphysical.
pub const POPULATION_SLACK: f64 = 1e-10;

/// Minimum samples per oscillation period accepted by [`find_extrema`].
pub const MIN_POINTS_PER_PERIOD: f64 = 20.0;

/// Relative RMS residual above which a short-time fit window is rejected.
pub const FIT_RESIDUAL_LIMIT: f64 = 1e-4;

/// `<e0| rho |e0>`.
pub fn excited_population(rho: &DensityMatrix) -> Result<f64> {
    let e = BareState::ExcitedVacuum.index();
    let z = rho[(e, e)];
    if z.im.abs() > 1e-12 {
        return Err(NjcError::NonPhysicalState(format!(
            "diagonal entry has imaginary part {:e}",
            z.im
        )));
    }
    if !(-POPULATION_SLACK..=1.0 + POPULATION_SLACK).contains(&z.re) {
        return Err(NjcError::NonPhysicalState(format!(
            "population {} outside [0, 1]",
            z.re
        )));
    }
    Ok(z.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SanityReport {
    pub trace_drift: f64,
    pub hermiticity_defect: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
}

impl SanityReport {
    pub const TRACE_LIMIT: f64 = 1e-10;
    pub const HERMITICITY_LIMIT: f64 = 1e-12;
    pub const EIGENVALUE_FLOOR: f64 = -1e-10;

    /// Worst case over a collection of reports; `None` when empty.
    pub fn worst<'a>(reports: impl IntoIterator<Item = &'a SanityReport>) -> Option<SanityReport> {
        reports.into_iter().copied().reduce(|a, b| SanityReport {
            trace_drift: a.trace_drift.max(b.trace_drift),
            hermiticity_defect: a.hermiticity_defect.max(b.hermiticity_defect),
            min_eigenvalue: a.min_eigenvalue.min(b.min_eigenvalue),
        })
    }

    pub fn is_physical(&self) -> bool {
        self.trace_drift <= Self::TRACE_LIMIT
            && self.hermiticity_defect <= Self::HERMITICITY_LIMIT
            && self.min_eigenvalue >= Self::EIGENVALUE_FLOOR
    }
}

pub fn sanity(rho: &DensityMatrix) -> SanityReport {
    SanityReport {
        trace_drift: (rho.trace() - 1.0).norm(),
        hermiticity_defect: hermiticity_defect(rho),
        min_eigenvalue: hermitian_eigenvalues(rho)[0],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Minima,
    Maxima,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremaList {
    pub kind: ExtremumKind,
    /// `(time, value)` pairs with strictly increasing times.
    pub points: Vec<(f64, f64)>,
}

impl ExtremaList {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }
}

/// Vertex of the parabola through three points, and its value there.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> Option<(f64, f64)> {
    let (d0, d2) = (x[1] - x[0], x[1] - x[2]);
    let num = d0 * d0 * (y[1] - y[2]) - d2 * d2 * (y[1] - y[0]);
    let den = d0 * (y[1] - y[2]) - d2 * (y[1] - y[0]);
    if den == 0.0 {
        return None;
    }
    let t = (x[1] - 0.5 * num / den).clamp(x[0], x[2]);
    // Lagrange form evaluated at the vertex.
    let l0 = (t - x[1]) * (t - x[2]) / ((x[0] - x[1]) * (x[0] - x[2]));
    let l1 = (t - x[0]) * (t - x[2]) / ((x[1] - x[0]) * (x[1] - x[2]));
    let l2 = (t - x[0]) * (t - x[1]) / ((x[2] - x[0]) * (x[2] - x[1]));
    Some((t, y[0] * l0 + y[1] * l1 + y[2] * l2))
}

/// Local extrema of a sampled series, refined by a parabola through each
/// grid candidate and its neighbours.
///
/// `period` is the oscillation period the sampling must resolve (`pi /
/// Omega` for the excited-state probability).
pub fn find_extrema(
    times: &[f64],
    values: &[f64],
    kind: ExtremumKind,
    period: f64,
) -> Result<ExtremaList> {
    assert_eq!(times.len(), values.len(), "series length mismatch");
    let max_spacing = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let points_per_period = if max_spacing > 0.0 {
        period / max_spacing
    } else {
        0.0
    };
    if times.len() < 3 || points_per_period < MIN_POINTS_PER_PERIOD {
        return Err(NjcError::TooSparse {
            points_per_period,
            required: MIN_POINTS_PER_PERIOD,
        });
    }

    let sign = match kind {
        ExtremumKind::Minima => 1.0,
        ExtremumKind::Maxima => -1.0,
    };
    let mut points = Vec::new();
    for i in 1..times.len() - 1 {
        let (a, b, c) = (sign * values[i - 1], sign * values[i], sign * values[i + 1]);
        if b < a && b <= c {
            let x = [times[i - 1], times[i], times[i + 1]];
            let y = [values[i - 1], values[i], values[i + 1]];
            points.push(parabola_vertex(x, y).unwrap_or((times[i], values[i])));
        }
    }
    Ok(ExtremaList { kind, points })
}

/// Polish extrema of a series sampled from a known function `f` by
/// repeated parabolic interpolation on shrinking stencils.
pub fn refine_extrema(
    list: &ExtremaList,
    f: impl Fn(f64) -> f64,
    initial_width: f64,
) -> ExtremaList {
    const FINAL_WIDTH: f64 = 1e-4;
    let points = list
        .points
        .iter()
        .map(|&(t0, _)| {
            let mut t = t0;
            let mut h = initial_width.max(FINAL_WIDTH);
            let mut final_passes = 0;
            while final_passes < 3 {
                let x = [t - h, t, t + h];
                if let Some((v, _)) = parabola_vertex(x, x.map(&f)) {
                    t = v;
                }
                if h <= FINAL_WIDTH {
                    final_passes += 1;
                } else {
                    h = (h * 0.25).max(FINAL_WIDTH);
                }
            }
            (t, f(t))
        })
        .collect();
    ExtremaList {
        kind: list.kind,
        points,
    }
}

/// Initial logarithmic decay rate `-d ln Pe/dt |_{0+}` from a sampled
/// short-time window starting at `t = 0`.
///
/// `-ln Pe` is least-squares fitted with a quadratic in `t`; the linear
/// coefficient is the rate. The quadratic term absorbs the curvature of the
/// coherent oscillation, which would otherwise bias a straight-line slope
/// by `Omega^2 sin^2(theta) t_fit`.
pub fn fit_short_time_rate(times: &[f64], pe: &[f64]) -> Result<f64> {
    assert_eq!(times.len(), pe.len(), "series length mismatch");
    if times.len() < 5 {
        return Err(NjcError::WindowTooLong(format!(
            "need at least 5 samples, got {}",
            times.len()
        )));
    }
    if let Some(p) = pe.iter().find(|&&p| p.is_nan() || p <= 0.5) {
        return Err(NjcError::WindowTooLong(format!(
            "Pe drops to {p} inside the window (must stay above 0.5)"
        )));
    }
    let span = times[times.len() - 1] - times[0];
    if span.is_nan() || span <= 0.0 {
        return Err(NjcError::WindowTooLong("window has zero length".into()));
    }

    // Scaled abscissa keeps the normal equations well conditioned.
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    let ys: Vec<f64> = pe.iter().map(|p| -p.ln()).collect();
    for (&t, &y) in times.iter().zip(&ys) {
        let s = (t - times[0]) / span;
        let row = Vector3::new(1.0, s, s * s);
        ata += row * row.transpose();
        atb += row * y;
    }
    let coef = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| NjcError::WindowTooLong("degenerate fit".into()))?;

    let rms = (times
        .iter()
        .zip(&ys)
        .map(|(&t, &y)| {
            let s = (t - times[0]) / span;
            (y - coef[0] - coef[1] * s - coef[2] * s * s).powi(2)
        })
        .sum::<f64>()
        / times.len() as f64)
        .sqrt();
    let scale = ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    if rms > FIT_RESIDUAL_LIMIT * scale + 1e-15 {
        return Err(NjcError::WindowTooLong(format!(
            "fit residual {rms:e} exceeds {FIT_RESIDUAL_LIMIT:e} of the signal; shorten the window"
        )));
    }
    Ok(coef[1] / span)
}

/// Default short-time fit window, `0.005 / Omega`: short enough that the
/// quartic term of the coherent oscillation leaves no visible slope bias.
pub fn short_time_window(params: &ModelParams) -> f64 {
    0.005 / eigenstructure(params).rabi_frequency
}

/// Richardson-extrapolated forward difference of `f` at `0`:
/// `2 D(h/2) - D(h)` with `D(h) = (f(h) - f(0)) / h`.
pub fn richardson_initial_slope(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let f0 = f(0.0);
    let d = |step: f64| (f(step) - f0) / step;
    2.0 * d(0.5 * h) - d(h)
}
