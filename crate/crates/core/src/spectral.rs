//! Analytic solution of the master equation through the nine Liouvillian
//! eigenoperators, and the closed-form excited-state probabilities that
//! follow from it.
//!
//! Dissipator normalization: each channel `|E1+-> -> |E0>` enters as
//! `(gamma/2) J rho J^dag - (gamma/4) {J^dag J, rho}`, so the population of
//! `|E1+->` decays at `gamma/2` and coherences with it at `gamma/4`. This is
//! half the usual Lindblad convention; rates passed in are used as-is.

use nalgebra::{SMatrix, SymmetricEigen};

use crate::error::{NjcError, Result};
use crate::linalg::{outer, unvectorize, vectorize, DensityMatrix, Operator, OperatorVec, C64, I};
use crate::model::{eigenstructure, DressedState, EigenStructure, ModelParams};

/// Largest accepted condition number of the eigenoperator Gram matrix.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

type Matrix9 = SMatrix<C64, 9, 9>;

/// One eigenpair `L rho_k = lambda_k rho_k`. `rho` is stored in the dressed
/// basis `{|E1+>, |E1->, |E0>}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMode {
    /// 1-based mode label, `1..=9`.
    pub index: usize,
    pub lambda: C64,
    pub rho: Operator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    modes: [SpectralMode; 9],
    structure: EigenStructure,
    gram_condition: f64,
}

/// Expansion coefficients of an initial state over the eigenoperators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub c: [C64; 9],
    /// Frobenius norm of `sum_k C_k rho_k - rho(0)`.
    pub residual: f64,
}

impl CoefficientSet {
    /// Coefficient `C_k` for the 1-based mode label `k`.
    pub fn get(&self, k: usize) -> C64 {
        self.c[k - 1]
    }
}

fn dressed_outer(a: DressedState, b: DressedState) -> Operator {
    let mut op = Operator::zeros();
    op[(a.index(), b.index())] = C64::from(1.0);
    op
}

/// The nine eigenoperators and eigenvalues of the dissipative Liouvillian.
pub fn eigenoperators(params: &ModelParams) -> SpectralBasis {
    use DressedState::{Ground, Minus, Plus};

    let es = eigenstructure(params);
    let (w, chi, rabi) = (params.omega(), params.chi(), es.rabi_frequency);
    let (gp, gm) = (params.gamma_plus(), params.gamma_minus());

    let ground = dressed_outer(Ground, Ground);
    let rho4 = dressed_outer(Ground, Minus);
    let rho5 = dressed_outer(Ground, Plus);
    let rho6 = dressed_outer(Minus, Plus);
    let lambda4 = I * (w + chi - rabi) - 0.25 * gm;
    let lambda5 = I * (w + chi + rabi) - 0.25 * gp;
    let lambda6 = I * (2.0 * rabi) - 0.25 * (gp + gm);

    let pairs = [
        (C64::from(0.0), ground),
        (C64::from(-0.5 * gm), dressed_outer(Minus, Minus) - ground),
        (C64::from(-0.5 * gp), dressed_outer(Plus, Plus) - ground),
        (lambda4, rho4),
        (lambda5, rho5),
        (lambda6, rho6),
        (lambda4.conj(), rho4.adjoint()),
        (lambda5.conj(), rho5.adjoint()),
        (lambda6.conj(), rho6.adjoint()),
    ];
    let mut k = 0;
    let modes = pairs.map(|(lambda, rho)| {
        k += 1;
        SpectralMode {
            index: k,
            lambda,
            rho,
        }
    });
    SpectralBasis::from_modes(modes, es)
}

impl SpectralBasis {
    fn from_modes(modes: [SpectralMode; 9], structure: EigenStructure) -> Self {
        let a = Self::mode_matrix(&modes);
        let gram = a.adjoint() * a;
        let ev = SymmetricEigen::new(gram).eigenvalues;
        let (lo, hi) = ev.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &e| {
            (lo.min(e), hi.max(e))
        });
        let gram_condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        SpectralBasis {
            modes,
            structure,
            gram_condition,
        }
    }

    fn mode_matrix(modes: &[SpectralMode; 9]) -> Matrix9 {
        let cols: Vec<OperatorVec> = modes.iter().map(|m| vectorize(&m.rho)).collect();
        Matrix9::from_columns(&cols)
    }

    pub fn modes(&self) -> &[SpectralMode; 9] {
        &self.modes
    }

    /// Mode with 1-based label `k`.
    pub fn mode(&self, k: usize) -> &SpectralMode {
        &self.modes[k - 1]
    }

    pub fn structure(&self) -> &EigenStructure {
        &self.structure
    }

    pub fn gram_condition(&self) -> f64 {
        self.gram_condition
    }

    /// Eigenoperator `rho_k` in the bare basis.
    pub fn rho_bare(&self, k: usize) -> Operator {
        self.structure.to_bare(&self.mode(k).rho)
    }

    /// Shift `lambda_k` (and its conjugate partner) by `delta`. Used by
    /// negative controls that must see the eigenpair check fail.
    pub fn perturb_eigenvalue(&mut self, k: usize, delta: C64) {
        self.modes[k - 1].lambda += delta;
        let partner = match k {
            4..=6 => Some(k + 3),
            7..=9 => Some(k - 3),
            _ => None,
        };
        if let Some(p) = partner {
            self.modes[p - 1].lambda += delta.conj();
        }
    }
}

/// Solve `sum_k C_k rho_k = rho0` for an arbitrary operator `rho0` given in
/// the bare basis.
pub fn expand_initial(rho0: &DensityMatrix, basis: &SpectralBasis) -> Result<CoefficientSet> {
    if basis.gram_condition.is_nan() || basis.gram_condition > MAX_GRAM_CONDITION {
        return Err(NjcError::SingularBasis {
            condition: basis.gram_condition,
        });
    }
    let target = vectorize(&basis.structure.to_dressed(rho0));
    let a = SpectralBasis::mode_matrix(&basis.modes);
    let solution = a.lu().solve(&target).ok_or(NjcError::SingularBasis {
        condition: basis.gram_condition,
    })?;
    let residual = (a * solution - target).norm();
    let mut c = [C64::from(0.0); 9];
    c.copy_from_slice(solution.as_slice());
    Ok(CoefficientSet { c, residual })
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(NjcError::InvalidTime(t))
    }
}

/// `rho(t) = sum_k C_k exp(lambda_k t) rho_k`, in the dressed basis.
pub fn evolve_analytic_dressed(
    basis: &SpectralBasis,
    coeffs: &CoefficientSet,
    t: f64,
) -> Result<DensityMatrix> {
    check_time(t)?;
    let v = basis
        .modes
        .iter()
        .zip(&coeffs.c)
        .filter(|(_, c)| **c != C64::from(0.0))
        .fold(OperatorVec::zeros(), |acc, (m, c)| {
            acc + vectorize(&m.rho) * (c * (m.lambda * t).exp())
        });
    Ok(unvectorize(&v))
}

/// `rho(t)` in the bare basis.
pub fn evolve_analytic(
    basis: &SpectralBasis,
    coeffs: &CoefficientSet,
    t: f64,
) -> Result<DensityMatrix> {
    let rho = evolve_analytic_dressed(basis, coeffs, t)?;
    Ok(basis.structure.to_bare(&rho))
}

/// Projector onto `|E1+->` or `|E0>` in the bare basis, convenient for
/// initial states.
pub fn dressed_projector(es: &EigenStructure, state: DressedState) -> DensityMatrix {
    let k = es.ket(state);
    outer(&k, &k)
}

/// Excited-state probability for `rho(0) = |e0><e0|`, in the squared form
/// `[(1-c)/2 e^{-gm t/4} - (1+c)/2 e^{-gp t/4}]^2 + s^2 e^{-(gp+gm) t/4} cos^2(Omega t)`
/// with `c = cos(theta)`, `s = sin(theta)`.
pub fn pe_closed_form(params: &ModelParams, t: f64) -> f64 {
    let es = eigenstructure(params);
    let (c, s) = (es.cos_theta(), es.sin_theta());
    let (gp, gm) = (params.gamma_plus(), params.gamma_minus());
    let bracket = 0.5 * (1.0 - c) * (-gm * t / 4.0).exp() - 0.5 * (1.0 + c) * (-gp * t / 4.0).exp();
    bracket * bracket + s * s * (-(gp + gm) * t / 4.0).exp() * (es.rabi_frequency * t).cos().powi(2)
}

/// Same probability expanded into its three channels: the two dressed
/// populations and their interference at `2 Omega`.
pub fn pe_expanded(params: &ModelParams, t: f64) -> f64 {
    let es = eigenstructure(params);
    let (sh, ch) = (0.5 * es.theta).sin_cos();
    let (gp, gm) = (params.gamma_plus(), params.gamma_minus());
    sh.powi(4) * (-gm * t / 2.0).exp()
        + ch.powi(4) * (-gp * t / 2.0).exp()
        + 0.5
            * es.sin_theta().powi(2)
            * (-(gp + gm) * t / 4.0).exp()
            * (2.0 * es.rabi_frequency * t).cos()
}

/// Damped resonant Rabi oscillation `exp(-gamma t / 2) cos^2(g t)`.
pub fn pe_ideal(g: f64, gamma: f64, t: f64) -> f64 {
    (-gamma * t / 2.0).exp() * (g * t).cos().powi(2)
}

fn equal_rate(params: &ModelParams) -> Result<f64> {
    if params.gamma_plus() != params.gamma_minus() {
        return Err(NjcError::UnequalRates {
            gamma_plus: params.gamma_plus(),
            gamma_minus: params.gamma_minus(),
        });
    }
    Ok(params.gamma_plus())
}

/// `exp(-gamma t/2) (cos^2 theta + sin^2 theta cos^2(Omega t))` for equal rates.
pub fn pe_equal_rates(params: &ModelParams, t: f64) -> Result<f64> {
    let gamma = equal_rate(params)?;
    let es = eigenstructure(params);
    let c2 = es.cos_theta().powi(2);
    let s2 = es.sin_theta().powi(2);
    Ok((-gamma * t / 2.0).exp() * (c2 + s2 * (es.rabi_frequency * t).cos().powi(2)))
}

/// Lower envelope of [`pe_equal_rates`], attained where `cos(Omega t) = 0`:
/// `exp(-gamma t/2) cos^2 theta`.
pub fn equal_rates_minimum(params: &ModelParams, t: f64) -> Result<f64> {
    let gamma = equal_rate(params)?;
    Ok((-gamma * t / 2.0).exp() * eigenstructure(params).cos_theta().powi(2))
}

fn require_linear(params: &ModelParams) -> Result<()> {
    if params.chi() != 0.0 {
        return Err(NjcError::NonzeroChi(params.chi()));
    }
    Ok(())
}

/// `chi = 0` with unequal rates:
/// `1/4 (e^{-gm t/4} - e^{-gp t/4})^2 + e^{-(gp+gm) t/4} cos^2(g t)`.
pub fn pe_linear_limit(params: &ModelParams, t: f64) -> Result<f64> {
    let floor = linear_limit_minimum(params, t)?;
    let (gp, gm) = (params.gamma_plus(), params.gamma_minus());
    Ok(floor + (-(gp + gm) * t / 4.0).exp() * (params.g() * t).cos().powi(2))
}

/// Lower envelope of [`pe_linear_limit`], attained where `cos(g t) = 0`.
pub fn linear_limit_minimum(params: &ModelParams, t: f64) -> Result<f64> {
    require_linear(params)?;
    let (gp, gm) = (params.gamma_plus(), params.gamma_minus());
    let d = (-gm * t / 4.0).exp() - (-gp * t / 4.0).exp();
    Ok(0.25 * d * d)
}

/// Initial logarithmic decay rate of the excited-state probability,
/// `-d ln Pe / dt` at `t = 0+`:
/// `cos(theta) (gp - gm) / 4 + (gp + gm) / 4`.
pub fn short_time_rate(params: &ModelParams) -> f64 {
    let es = eigenstructure(params);
    let (gp, gm) = (params.gamma_plus(), params.gamma_minus());
    es.cos_theta() * (gp / 4.0 - gm / 4.0) + (gm + gp) / 4.0
}
