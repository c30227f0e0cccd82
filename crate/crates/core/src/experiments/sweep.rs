use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compute_metrics, Metrics};
use crate::error::{NjcError, Result};
use crate::model::ModelParams;

/// Upper bound on grid points unless the caller raises it.
pub const DEFAULT_GRID_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    Omega,
    G,
    Chi,
    GammaPlus,
    GammaMinus,
}

impl FromStr for ParamName {
    type Err = NjcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" => Ok(ParamName::Omega),
            "g" => Ok(ParamName::G),
            "chi" => Ok(ParamName::Chi),
            "gamma_plus" => Ok(ParamName::GammaPlus),
            "gamma_minus" => Ok(ParamName::GammaMinus),
            _ => Err(NjcError::InvalidScenario(format!(
                "unknown parameter '{s}' (expected omega, g, chi, gamma_plus or gamma_minus)"
            ))),
        }
    }
}

/// Linearly spaced values of one parameter, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: ParamName,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.start
        } else {
            self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64
        }
    }
}

/// Parses `name=start:stop:count`.
impl FromStr for Axis {
    type Err = NjcError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            NjcError::InvalidScenario(format!(
                "axis '{s}' is not of the form name=start:stop:count"
            ))
        };
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(bad());
        };
        Ok(Axis {
            param: name.trim().parse()?,
            start: start.trim().parse().map_err(|_| bad())?,
            stop: stop.trim().parse().map_err(|_| bad())?,
            count: count.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Cartesian product of axes over a base parameter set. Points are
/// ordered row-major: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub base: ModelParams,
    pub axes: Vec<Axis>,
    pub cap: usize,
}

impl SweepGrid {
    pub fn new(base: ModelParams, axes: Vec<Axis>) -> Self {
        SweepGrid {
            base,
            axes,
            cap: DEFAULT_GRID_CAP,
        }
    }

    /// Number of grid points, saturating on overflow.
    pub fn len(&self) -> usize {
        self.axes
            .iter()
            .fold(1usize, |n, a| n.saturating_mul(a.count))
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self) -> Result<()> {
        for (i, a) in self.axes.iter().enumerate() {
            if a.count == 0 {
                return Err(NjcError::InvalidScenario(format!(
                    "axis {:?} has count 0",
                    a.param
                )));
            }
            if !(a.start.is_finite() && a.stop.is_finite()) {
                return Err(NjcError::InvalidScenario(format!(
                    "axis {:?} has a non-finite bound",
                    a.param
                )));
            }
            if self.axes[..i].iter().any(|b| b.param == a.param) {
                return Err(NjcError::InvalidScenario(format!(
                    "axis {:?} given twice",
                    a.param
                )));
            }
        }
        let points = self.len();
        if points > self.cap {
            return Err(NjcError::GridTooLarge {
                points,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Parameters at flat index `n`.
    pub fn point(&self, mut n: usize) -> Result<ModelParams> {
        let mut raw = crate::model::RawParams::from(self.base);
        for a in self.axes.iter().rev() {
            let v = a.value(n % a.count);
            n /= a.count;
            match a.param {
                ParamName::Omega => raw.omega = v,
                ParamName::G => raw.g = v,
                ParamName::Chi => raw.chi = v,
                ParamName::GammaPlus => raw.gamma_plus = v,
                ParamName::GammaMinus => raw.gamma_minus = v,
            }
        }
        ModelParams::try_from(raw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub params: ModelParams,
    pub metrics: Metrics,
}

/// Evaluate [`Metrics`] on every grid point, in parallel, returning rows in
/// grid order. `threads` caps the worker count (default: all cores).
/// Output is independent of the thread count.
pub fn run_sweep(grid: &SweepGrid, threads: Option<usize>) -> Result<Vec<SweepRow>> {
    grid.check()?;
    let work = || -> Vec<Result<SweepRow>> {
        (0..grid.len())
            .into_par_iter()
            .map(|n| {
                let params = grid.point(n)?;
                Ok(SweepRow {
                    params,
                    metrics: compute_metrics(&params)?,
                })
            })
            .collect()
    };
    let results = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| NjcError::InvalidScenario(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    // Report the first failing point in grid order, not whichever finished first.
    results.into_iter().collect()
}
