//! Reference numerical solution of the master equation: the Liouvillian as
//! an explicit 9x9 matrix acting on column-major vectorized density
//! matrices, integrated with classical fixed-step RK4.

use nalgebra::SMatrix;

use crate::error::{NjcError, Result};
use crate::linalg::{unvectorize, vectorize, DensityMatrix, Operator, OperatorVec, C64, I};
use crate::model::{eigenstructure, BareState, DressedState, ModelParams};
use crate::spectral::SpectralBasis;

/// Default integrator step, in units of `1/omega`.
pub const DEFAULT_STEP: f64 = 0.01;

/// Upper bound on `dt * (Gershgorin bound of L)` accepted by [`integrate`].
pub const STABILITY_LIMIT: f64 = 0.1;

pub type Matrix9 = SMatrix<C64, 9, 9>;

/// Linear map on operators, `vec(L rho) = matrix * vec(rho)` with
/// `vec[i + 3 j] = rho[(i, j)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator {
    pub matrix: Matrix9,
}

impl Superoperator {
    pub fn zero() -> Self {
        Superoperator {
            matrix: Matrix9::zeros(),
        }
    }

    /// `rho -> a rho b`
    pub fn sandwich(a: &Operator, b: &Operator) -> Self {
        let mut m = Matrix9::zeros();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        m[(i + 3 * j, k + 3 * l)] = a[(i, k)] * b[(l, j)];
                    }
                }
            }
        }
        Superoperator { matrix: m }
    }

    /// `rho -> -i [h, rho]`
    pub fn hamiltonian(h: &Operator) -> Self {
        let id = Operator::identity();
        Superoperator {
            matrix: (Self::sandwich(h, &id).matrix - Self::sandwich(&id, h).matrix) * (-I),
        }
    }

    /// `rho -> (rate/2) J rho J^dag - (rate/4) {J^dag J, rho}`
    pub fn dissipator(jump: &Operator, rate: f64) -> Self {
        let id = Operator::identity();
        let jd = jump.adjoint();
        let n = jd * jump;
        let m = Self::sandwich(jump, &jd).matrix * C64::from(0.5 * rate)
            - (Self::sandwich(&n, &id).matrix + Self::sandwich(&id, &n).matrix)
                * C64::from(0.25 * rate);
        Superoperator { matrix: m }
    }

    pub fn apply(&self, rho: &Operator) -> Operator {
        unvectorize(&(self.matrix * vectorize(rho)))
    }

    /// Re-express in the basis reached by `op -> u op u^dag`.
    pub fn conjugate_by(&self, u: &Operator) -> Self {
        let forward = Self::sandwich(u, &u.adjoint()).matrix;
        let back = Self::sandwich(&u.adjoint(), u).matrix;
        Superoperator {
            matrix: forward * self.matrix * back,
        }
    }

    /// Gershgorin bound on the spectral radius: the largest absolute row sum.
    pub fn gershgorin_bound(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Add for Superoperator {
    type Output = Superoperator;

    fn add(self, rhs: Superoperator) -> Superoperator {
        Superoperator {
            matrix: self.matrix + rhs.matrix,
        }
    }
}

/// Generator `rho -> -i[H, rho] + L+ rho + L- rho` in the bare basis.
///
/// Assembled in the dressed basis, where `H` is diagonal and the jump
/// operators are `|E0><E1+-|`, then carried to the bare basis with the
/// dressed-state unitary.
pub fn build_liouvillian(params: &ModelParams) -> Superoperator {
    use DressedState::{Ground, Minus, Plus};

    let es = eigenstructure(params);
    let mut h = Operator::zeros();
    for s in DressedState::ALL {
        h[(s.index(), s.index())] = C64::from(es.energy(s));
    }
    let jump = |from: DressedState| {
        let mut j = Operator::zeros();
        j[(Ground.index(), from.index())] = C64::from(1.0);
        j
    };
    let dressed = Superoperator::hamiltonian(&h)
        + Superoperator::dissipator(&jump(Plus), params.gamma_plus())
        + Superoperator::dissipator(&jump(Minus), params.gamma_minus());
    dressed.conjugate_by(&es.dressed_to_bare())
}

/// Generator assembled directly from a bare-basis Hamiltonian and a list of
/// `(jump, rate)` channels.
pub fn build_liouvillian_direct(h: &Operator, channels: &[(Operator, f64)]) -> Superoperator {
    channels
        .iter()
        .fold(Superoperator::hamiltonian(h), |acc, (j, rate)| {
            acc + Superoperator::dissipator(j, *rate)
        })
}

/// Time series produced by a solver. `pe[i]` is the `|e0>` population of
/// `states[i]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub pe: Vec<f64>,
}

impl Trajectory {
    pub fn push(&mut self, t: f64, rho: DensityMatrix) {
        let e = BareState::ExcitedVacuum.index();
        self.times.push(t);
        self.pe.push(rho[(e, e)].re);
        self.states.push(rho);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Number of grid intervals of width `dt` fitting in `[0, t_end]`.
pub fn grid_intervals(t_end: f64, dt: f64) -> usize {
    (t_end / dt + 1e-9).floor() as usize
}

fn rk4_step(l: &Matrix9, y: &OperatorVec, h: f64) -> OperatorVec {
    let half = C64::from(0.5 * h);
    let k1 = l * y;
    let k2 = l * (y + k1 * half);
    let k3 = l * (y + k2 * half);
    let k4 = l * (y + k3 * C64::from(h));
    y + (k1 + (k2 + k3) * C64::from(2.0) + k4) * C64::from(h / 6.0)
}

/// Classical RK4 with step `dt`; one snapshot per step, on the grid
/// `t_i = i dt` for `t_i <= t_end`.
pub fn integrate(
    superop: &Superoperator,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    integrate_on_grid(superop, rho0, t_end, dt, dt)
}

/// RK4 with snapshots on the output grid `t_i = i output_dt`; each output
/// interval is split into equal substeps no longer than `max_step`.
pub fn integrate_on_grid(
    superop: &Superoperator,
    rho0: &DensityMatrix,
    t_end: f64,
    output_dt: f64,
    max_step: f64,
) -> Result<Trajectory> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(NjcError::InvalidTime(t_end));
    }
    if !(output_dt > 0.0 && max_step > 0.0) {
        return Err(NjcError::InvalidTime(output_dt.min(max_step)));
    }
    let substeps = ((output_dt / max_step) - 1e-9).ceil().max(1.0) as usize;
    let h = output_dt / substeps as f64;
    let product = h * superop.gershgorin_bound();
    if product > STABILITY_LIMIT {
        return Err(NjcError::StepTooLarge {
            dt: h,
            product,
            limit: STABILITY_LIMIT,
        });
    }

    let n = grid_intervals(t_end, output_dt);
    let mut traj = Trajectory::default();
    let mut y = vectorize(rho0);
    traj.push(0.0, *rho0);
    for i in 1..=n {
        for _ in 0..substeps {
            y = rk4_step(&superop.matrix, &y, h);
        }
        traj.push(i as f64 * output_dt, unvectorize(&y));
    }
    Ok(traj)
}

/// Frobenius residuals `||L rho_k - lambda_k rho_k||` for the nine modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenpairReport {
    pub residuals: [f64; 9],
}

impl EigenpairReport {
    pub fn max(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

pub fn verify_eigenpairs(superop: &Superoperator, basis: &SpectralBasis) -> EigenpairReport {
    let mut residuals = [0.0; 9];
    for (k, r) in residuals.iter_mut().enumerate() {
        let rho = basis.rho_bare(k + 1);
        *r = (superop.apply(&rho) - rho * basis.mode(k + 1).lambda).norm();
    }
    EigenpairReport { residuals }
}
