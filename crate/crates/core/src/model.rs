//! Physical parameters, the truncated single-excitation Hilbert space and
//! the closed-form dressed-state structure of the nonlinear JC Hamiltonian.
//!
//! Units: `hbar = 1` and every quantity is a multiple of the resonant
//! frequency `omega` (callers normally pass `omega = 1`).

use serde::{Deserialize, Serialize};

use crate::error::{NjcError, Result};
use crate::linalg::{outer, real_ket, Ket, Operator, C64};

/// The five physical inputs: resonant frequency, coupling, Kerr-type
/// nonlinearity and the decay rates of the upper/lower dressed states.
///
/// Always validated: construct through [`ModelParams::new`] or
/// deserialization, both of which reject unphysical values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    omega: f64,
    g: f64,
    chi: f64,
    gamma_plus: f64,
    gamma_minus: f64,
}

/// Unvalidated wire form of [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub omega: f64,
    pub g: f64,
    pub chi: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = NjcError;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.omega, raw.g, raw.chi, raw.gamma_plus, raw.gamma_minus)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            omega: p.omega,
            g: p.g,
            chi: p.chi,
            gamma_plus: p.gamma_plus,
            gamma_minus: p.gamma_minus,
        }
    }
}

impl ModelParams {
    pub fn new(omega: f64, g: f64, chi: f64, gamma_plus: f64, gamma_minus: f64) -> Result<Self> {
        for (name, v) in [
            ("omega", omega),
            ("g", g),
            ("chi", chi),
            ("gamma_plus", gamma_plus),
            ("gamma_minus", gamma_minus),
        ] {
            if !v.is_finite() {
                return Err(NjcError::NonFiniteParameter(name));
            }
        }
        if omega <= 0.0 {
            return Err(NjcError::NonPositiveFrequency(omega));
        }
        if g <= 0.0 {
            return Err(NjcError::NonPositiveCoupling(g));
        }
        if chi < 0.0 {
            return Err(NjcError::NegativeNonlinearity(chi));
        }
        if gamma_plus < 0.0 {
            return Err(NjcError::NegativeRate {
                name: "gamma_plus",
                value: gamma_plus,
            });
        }
        if gamma_minus < 0.0 {
            return Err(NjcError::NegativeRate {
                name: "gamma_minus",
                value: gamma_minus,
            });
        }
        Ok(ModelParams {
            omega,
            g,
            chi,
            gamma_plus,
            gamma_minus,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn gamma_plus(&self) -> f64 {
        self.gamma_plus
    }

    pub fn gamma_minus(&self) -> f64 {
        self.gamma_minus
    }

    pub fn with_chi(self, chi: f64) -> Result<Self> {
        Self::new(self.omega, self.g, chi, self.gamma_plus, self.gamma_minus)
    }

    pub fn with_rates(self, gamma_plus: f64, gamma_minus: f64) -> Result<Self> {
        Self::new(self.omega, self.g, self.chi, gamma_plus, gamma_minus)
    }

    /// True when `chi > g / 2`, i.e. outside the weak-nonlinearity regime
    /// `chi << g`. The solution stays exact in the truncated space; this is
    /// only a warning about physical relevance.
    pub fn exceeds_weak_nonlinearity(&self) -> bool {
        self.chi > 0.5 * self.g
    }
}

/// Bare product states of the truncated space, in matrix index order.
///
/// Every matrix in this crate uses this ordering:
/// index 0 is `|e,0>` (qubit excited, no phonon, written `|10>`),
/// index 1 is `|g,1>` (qubit ground, one phonon, written `|01>`),
/// index 2 is `|g,0>` (the ground state `|00>`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BareState {
    ExcitedVacuum = 0,
    GroundOnePhonon = 1,
    GroundVacuum = 2,
}

impl BareState {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn ket(self) -> Ket {
        let mut k = Ket::zeros();
        k[self.index()] = C64::from(1.0);
        k
    }

    pub fn projector(self) -> Operator {
        let k = self.ket();
        outer(&k, &k)
    }
}

/// Full Hamiltonian `H_JC + chi a'a + chi (a'a)^2` restricted to the
/// truncated space. At one phonon the nonlinearity adds `2 chi`.
pub fn hamiltonian_full(params: &ModelParams) -> Operator {
    let w = params.omega;
    let mut h = Operator::zeros();
    h[(0, 0)] = C64::from(0.5 * w);
    h[(1, 1)] = C64::from(0.5 * w + 2.0 * params.chi);
    h[(2, 2)] = C64::from(-0.5 * w);
    h[(0, 1)] = C64::from(params.g);
    h[(1, 0)] = C64::from(params.g);
    h
}

/// Linear Jaynes-Cummings Hamiltonian (`chi` ignored).
pub fn hamiltonian_jc(params: &ModelParams) -> Operator {
    let linear = ModelParams {
        chi: 0.0,
        ..*params
    };
    hamiltonian_full(&linear)
}

/// Dressed states of the truncated space, in dressed-basis index order
/// `{|E1+>, |E1->, |E0>}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DressedState {
    Plus = 0,
    Minus = 1,
    Ground = 2,
}

impl DressedState {
    pub const ALL: [DressedState; 3] = [
        DressedState::Plus,
        DressedState::Minus,
        DressedState::Ground,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Closed-form spectrum of the single-excitation manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenStructure {
    /// `Omega = sqrt(g^2 + chi^2)`, half the doublet splitting.
    pub rabi_frequency: f64,
    /// Mixing angle `theta = asin(g / Omega)`, principal branch, in `(0, pi/2]`.
    pub theta: f64,
    pub e0: f64,
    pub e1_plus: f64,
    pub e1_minus: f64,
    /// Amplitudes of `|E1+>` on `(|10>, |01>)`: `(cos(theta/2), sin(theta/2))`.
    pub ket_plus: [f64; 2],
    /// Amplitudes of `|E1->` on `(|10>, |01>)`: `(-sin(theta/2), cos(theta/2))`.
    pub ket_minus: [f64; 2],
}

pub fn eigenstructure(params: &ModelParams) -> EigenStructure {
    let rabi = params.g.hypot(params.chi);
    let theta = (params.g / rabi).min(1.0).asin();
    let (s, c) = (0.5 * theta).sin_cos();
    let centre = 0.5 * params.omega + params.chi;
    EigenStructure {
        rabi_frequency: rabi,
        theta,
        e0: -0.5 * params.omega,
        e1_plus: centre + rabi,
        e1_minus: centre - rabi,
        ket_plus: [c, s],
        ket_minus: [-s, c],
    }
}

impl EigenStructure {
    /// `cos(theta)`, equal to `chi / Omega` on the principal branch.
    pub fn cos_theta(&self) -> f64 {
        self.theta.cos()
    }

    pub fn sin_theta(&self) -> f64 {
        self.theta.sin()
    }

    pub fn energy(&self, state: DressedState) -> f64 {
        match state {
            DressedState::Plus => self.e1_plus,
            DressedState::Minus => self.e1_minus,
            DressedState::Ground => self.e0,
        }
    }

    /// Dressed state expressed in the bare basis.
    pub fn ket(&self, state: DressedState) -> Ket {
        match state {
            DressedState::Plus => real_ket(self.ket_plus[0], self.ket_plus[1], 0.0),
            DressedState::Minus => real_ket(self.ket_minus[0], self.ket_minus[1], 0.0),
            DressedState::Ground => BareState::GroundVacuum.ket(),
        }
    }

    /// Unitary whose columns are the dressed kets, so that
    /// `op_bare = U op_dressed U^dagger`.
    pub fn dressed_to_bare(&self) -> Operator {
        Operator::from_columns(&DressedState::ALL.map(|s| self.ket(s)))
    }

    pub fn to_bare(&self, op_dressed: &Operator) -> Operator {
        let u = self.dressed_to_bare();
        u * op_dressed * u.adjoint()
    }

    pub fn to_dressed(&self, op_bare: &Operator) -> Operator {
        let u = self.dressed_to_bare();
        u.adjoint() * op_bare * u
    }

    /// The Hamiltonian that the dressed kets diagonalize exactly,
    /// `sum_s E_s |s><s|`, in the bare basis.
    ///
    /// Its spectrum equals that of [`hamiltonian_full`]. For `chi > 0` the
    /// two differ: with `cos(theta) = chi / Omega` the kets above carry the
    /// `2 chi` shift on `|10>` rather than on `|01>`. The two coincide at
    /// `chi = 0`.
    pub fn dressed_hamiltonian(&self) -> Operator {
        let diag = Operator::from_diagonal(&real_ket(self.e1_plus, self.e1_minus, self.e0));
        self.to_bare(&diag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_defect;
    use nalgebra::{Matrix2, SymmetricEigen};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn fig1() -> ModelParams {
        ModelParams::new(1.0, 0.1, 0.0, 0.004, 0.004).unwrap()
    }

    fn fig2() -> ModelParams {
        ModelParams::new(1.0, 0.1, 0.04, 0.007, 0.001).unwrap()
    }

    fn excited_block(h: &Operator) -> Matrix2<f64> {
        Matrix2::new(h[(0, 0)].re, h[(0, 1)].re, h[(1, 0)].re, h[(1, 1)].re)
    }

    #[test]
    fn validation_accepts_preset_values_and_rejects_bad_inputs() {
        fig1();
        fig2();
        assert!(matches!(
            ModelParams::new(1.0, -0.1, 0.0, 0.0, 0.0),
            Err(NjcError::NonPositiveCoupling(_))
        ));
        assert!(matches!(
            ModelParams::new(0.0, 0.1, 0.0, 0.0, 0.0),
            Err(NjcError::NonPositiveFrequency(_))
        ));
        assert!(matches!(
            ModelParams::new(1.0, 0.1, -0.01, 0.0, 0.0),
            Err(NjcError::NegativeNonlinearity(_))
        ));
        assert!(matches!(
            ModelParams::new(1.0, 0.1, 0.0, 0.0, -1e-3),
            Err(NjcError::NegativeRate {
                name: "gamma_minus",
                ..
            })
        ));
        assert!(matches!(
            ModelParams::new(1.0, f64::NAN, 0.0, 0.0, 0.0),
            Err(NjcError::NonFiniteParameter("g"))
        ));
    }

    #[test]
    fn regime_warning_threshold() {
        assert!(!fig2().exceeds_weak_nonlinearity());
        assert!(!fig2().with_chi(0.05).unwrap().exceeds_weak_nonlinearity());
        assert!(fig2().with_chi(0.0501).unwrap().exceeds_weak_nonlinearity());
    }

    #[test]
    fn deserialization_validates() {
        let ok: ModelParams = serde_json::from_str(
            r#"{"omega":1,"g":0.1,"chi":0.04,"gamma_plus":0.007,"gamma_minus":0.001}"#,
        )
        .unwrap();
        assert_eq!(ok, fig2());
        let bad = serde_json::from_str::<ModelParams>(
            r#"{"omega":1,"g":0.0,"chi":0.04,"gamma_plus":0.007,"gamma_minus":0.001}"#,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn hamiltonian_entries() {
        let h = hamiltonian_full(&fig1());
        assert_eq!(h[(0, 0)].re, 0.5);
        assert_eq!(h[(1, 1)].re, 0.5);
        assert_eq!(h[(2, 2)].re, -0.5);
        assert_eq!(h[(0, 1)].re, 0.1);
        assert_eq!(h[(1, 0)].re, 0.1);
        assert_eq!(h[(0, 2)].norm() + h[(1, 2)].norm(), 0.0);

        let h2 = hamiltonian_full(&fig2());
        assert!((h2[(1, 1)].re - 0.58).abs() < 1e-15);
        assert_eq!(h2[(2, 2)].re, eigenstructure(&fig2()).e0);
    }

    #[test]
    fn jc_hamiltonian_drops_nonlinearity() {
        let p = fig2();
        let hj = hamiltonian_jc(&p);
        assert_eq!(hj, hamiltonian_full(&p.with_chi(0.0).unwrap()));
        assert_eq!(hj[(1, 1)].re, 0.5);
        let diff = hamiltonian_full(&p) - hj;
        let expected = Operator::from_diagonal(&real_ket(0.0, 2.0 * p.chi(), 0.0));
        assert!((diff - expected).norm() < 1e-15);
    }

    #[test]
    fn eigenstructure_resonant_case() {
        let es = eigenstructure(&fig1());
        assert!((es.rabi_frequency - 0.1).abs() < 1e-15);
        assert!((es.theta - FRAC_PI_2).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((es.ket_plus[0] - r).abs() < 1e-15 && (es.ket_plus[1] - r).abs() < 1e-15);
        assert!((es.ket_minus[0] + r).abs() < 1e-15 && (es.ket_minus[1] - r).abs() < 1e-15);
    }

    #[test]
    fn eigenstructure_nonlinear_case() {
        // sqrt(0.0116) and asin(0.1 / sqrt(0.0116)), evaluated independently.
        let es = eigenstructure(&fig2());
        assert!((es.rabi_frequency - 0.107_703_296_142_690_07).abs() < 1e-15);
        assert!((es.theta - 1.190_289_949_682_532).abs() < 1e-14);
        assert!((es.e1_plus - es.e1_minus - 0.215_406_592_285_380_14).abs() < 1e-14);
        assert!((es.cos_theta() - 0.04 / es.rabi_frequency).abs() < 1e-15);
    }

    #[test]
    fn excited_block_eigenvalues_match_closed_form() {
        for p in [fig1(), fig2()] {
            let es = eigenstructure(&p);
            let eig = SymmetricEigen::new(excited_block(&hamiltonian_full(&p)));
            let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            assert!((ev[0] - es.e1_minus).abs() < 1e-14);
            assert!((ev[1] - es.e1_plus).abs() < 1e-14);
        }
    }

    #[test]
    fn dressed_hamiltonian_relation_to_full() {
        let p = fig2();
        let es = eigenstructure(&p);
        let moved = es.dressed_hamiltonian() - hamiltonian_full(&p);
        let expected = Operator::from_diagonal(&real_ket(2.0 * p.chi(), -2.0 * p.chi(), 0.0));
        assert!((moved - expected).norm() < 1e-14);
    }

    fn params_strategy() -> impl Strategy<Value = ModelParams> {
        (
            0.5f64..2.0,
            0.01f64..0.3,
            0.0f64..0.3,
            0.0f64..0.02,
            0.0f64..0.02,
        )
            .prop_map(|(w, g, chi, gp, gm)| ModelParams::new(w, g, chi, gp, gm).unwrap())
    }

    proptest! {
        #[test]
        fn hamiltonian_is_hermitian(p in params_strategy()) {
            prop_assert!(hermiticity_defect(&hamiltonian_full(&p)) <= 1e-14);
        }

        #[test]
        fn eigenstructure_invariants(p in params_strategy()) {
            let es = eigenstructure(&p);
            prop_assert!(es.rabi_frequency >= p.g());
            prop_assert!((es.rabi_frequency.powi(2) - p.g().powi(2) - p.chi().powi(2)).abs() < 1e-14);
            prop_assert!(es.theta > 0.0 && es.theta <= FRAC_PI_2);
            prop_assert!((es.sin_theta() - p.g() / es.rabi_frequency).abs() < 1e-14);
            prop_assert!((es.e1_plus - es.e1_minus - 2.0 * es.rabi_frequency).abs() < 1e-14);
            let u = es.dressed_to_bare();
            prop_assert!((u.adjoint() * u - Operator::identity()).norm() < 1e-14);
        }

        #[test]
        fn full_hamiltonian_spectrum_matches_dressed_energies(p in params_strategy()) {
            let es = eigenstructure(&p);
            let eig = SymmetricEigen::new(excited_block(&hamiltonian_full(&p)));
            let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            prop_assert!((ev[0] - es.e1_minus).abs() < 1e-12);
            prop_assert!((ev[1] - es.e1_plus).abs() < 1e-12);
        }

        #[test]
        fn dressed_kets_diagonalize_dressed_hamiltonian(p in params_strategy()) {
            let es = eigenstructure(&p);
            let h = es.dressed_hamiltonian();
            for s in DressedState::ALL {
                let k = es.ket(s);
                prop_assert!((h * k - k * C64::from(es.energy(s))).norm() < 1e-12);
            }
        }

        // The kets equal the eigenvectors of the full Hamiltonian's excited
        // block up to the reflection cos(theta) -> -cos(theta); both
        // conventions agree at chi = 0.
        #[test]
        fn full_hamiltonian_eigenvectors_are_reflected_kets(p in params_strategy()) {
            let es = eigenstructure(&p);
            let reflected = (std::f64::consts::PI - es.theta) / 2.0;
            let (s, c) = reflected.sin_cos();
            let h = excited_block(&hamiltonian_full(&p));
            let plus = nalgebra::Vector2::new(c, s);
            let minus = nalgebra::Vector2::new(-s, c);
            prop_assert!((h * plus - plus * es.e1_plus).norm() < 1e-12);
            prop_assert!((h * minus - minus * es.e1_minus).norm() < 1e-12);
        }
    }

    #[test]
    fn full_hamiltonian_eigenvectors_match_kets_when_linear() {
        let p = fig1().with_rates(0.0, 0.0).unwrap();
        let es = eigenstructure(&p);
        let h = hamiltonian_full(&p);
        for s in DressedState::ALL {
            let k = es.ket(s);
            assert!((h * k - k * C64::from(es.energy(s))).norm() < 1e-12);
        }
    }
}
