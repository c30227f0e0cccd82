//! Small fixed-size complex linear algebra over the three-level truncated
//! space: operator aliases, column-major vectorization, and a closed-form
//! Hermitian eigenvalue routine.

use nalgebra::{Matrix3, SVector, Vector3};
use num_complex::Complex64;

pub type C64 = Complex64;

/// 3x3 complex operator on the truncated space.
pub type Operator = Matrix3<C64>;

/// Density matrices share the operator representation; physicality is
/// checked by [`crate::observables::sanity`] rather than the type.
pub type DensityMatrix = Operator;

pub type Ket = Vector3<C64>;

/// Column-major vectorization of an [`Operator`]: `vec[i + 3 j] = op[(i, j)]`.
pub type OperatorVec = SVector<C64, 9>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn real_ket(a: f64, b: f64, c: f64) -> Ket {
    Ket::new(C64::from(a), C64::from(b), C64::from(c))
}

/// `|ket><bra|`
pub fn outer(ket: &Ket, bra: &Ket) -> Operator {
    ket * bra.adjoint()
}

pub fn vectorize(op: &Operator) -> OperatorVec {
    // nalgebra storage is column-major already.
    OperatorVec::from_column_slice(op.as_slice())
}

pub fn unvectorize(v: &OperatorVec) -> Operator {
    Operator::from_column_slice(v.as_slice())
}

pub fn hermiticity_defect(op: &Operator) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((op[(i, j)] - op[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(op: &Operator) -> Operator {
    (op + op.adjoint()) * C64::from(0.5)
}

/// Eigenvalues of the Hermitian part of `op`, ascending.
///
/// The characteristic cubic is solved in trigonometric form. Only the root
/// that is isolated from the other two is taken from the cubic; the
/// remaining pair comes from the 2x2 block on its orthogonal complement.
/// This keeps clustered roots (for example the two zero eigenvalues of a
/// pure state) accurate to machine precision instead of `sqrt(eps)`.
pub fn hermitian_eigenvalues(op: &Operator) -> [f64; 3] {
    let a = hermitian_part(op);
    let shift = a.trace().re / 3.0;
    let b = a - Operator::identity() * C64::from(shift);
    let p2 = b.norm_squared() / 6.0;
    let scale = a.norm().max(f64::MIN_POSITIVE);
    if p2.sqrt() <= 1e-15 * scale {
        return [shift; 3];
    }
    let p = p2.sqrt();
    let r = ((b / C64::from(p)).determinant().re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = shift + 2.0 * p * phi.cos();
    let smallest = shift + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let middle = 3.0 * shift - largest - smallest;
    let cubic = [smallest, middle, largest];

    let isolated = if r >= 0.0 { largest } else { smallest };
    let Some(v) = null_vector(&(a - Operator::identity() * C64::from(isolated)), p) else {
        return cubic;
    };

    let k = (0..3)
        .min_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm()))
        .unwrap_or(0);
    let mut w1 = Ket::zeros();
    w1[k] = ONE;
    w1 -= v * v.dotc(&w1);
    let w1 = w1.normalize();
    let w2 = v.cross(&w1).conjugate().normalize();

    let b11 = w1.dotc(&(a * w1)).re;
    let b22 = w2.dotc(&(a * w2)).re;
    let b12 = w1.dotc(&(a * w2));
    let mean = 0.5 * (b11 + b22);
    let half_gap = (0.25 * (b11 - b22).powi(2) + b12.norm_sqr()).sqrt();

    let mut out = [isolated, mean - half_gap, mean + half_gap];
    out.sort_by(f64::total_cmp);
    out
}

/// Unit vector spanning the kernel of a rank-2 matrix, from the best
/// conditioned cross product of its rows.
fn null_vector(m: &Operator, scale: f64) -> Option<Ket> {
    let rows: [Ket; 3] = [0, 1, 2].map(|i| m.row(i).transpose());
    let best = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| rows[i].cross(&rows[j]))
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
    let n = best.norm();
    (n > 1e-10 * scale * scale).then(|| best / C64::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;

    fn random_hermitian(entries: &[f64; 9]) -> Operator {
        let mut m = Operator::zeros();
        m[(0, 0)] = C64::from(entries[0]);
        m[(1, 1)] = C64::from(entries[1]);
        m[(2, 2)] = C64::from(entries[2]);
        let off = [
            (0, 1, entries[3], entries[4]),
            (0, 2, entries[5], entries[6]),
            (1, 2, entries[7], entries[8]),
        ];
        for (i, j, re, im) in off {
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = C64::new(re, -im);
        }
        m
    }

    #[test]
    fn vectorization_is_column_major_and_invertible() {
        let mut op = Operator::zeros();
        op[(1, 2)] = C64::new(3.0, -1.0);
        let v = vectorize(&op);
        assert_eq!(v[1 + 3 * 2], C64::new(3.0, -1.0));
        assert_eq!(unvectorize(&v), op);
    }

    #[test]
    fn pure_state_has_exact_zero_eigenvalues() {
        let psi = Ket::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8), ZERO);
        let rho = outer(&psi, &psi);
        let ev = hermitian_eigenvalues(&rho);
        assert!(ev[0].abs() < 1e-15 && ev[1].abs() < 1e-15, "{ev:?}");
        assert!((ev[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_and_indefinite_examples() {
        let ev = hermitian_eigenvalues(&(Operator::identity() / C64::from(3.0)));
        for e in ev {
            assert!((e - 1.0 / 3.0).abs() < 1e-15);
        }
        let d = Operator::from_diagonal(&real_ket(1.5, -0.5, 0.0));
        let ev = hermitian_eigenvalues(&d);
        assert!((ev[0] + 0.5).abs() < 1e-15);
        assert!(ev[1].abs() < 1e-15);
        assert!((ev[2] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn near_degenerate_small_cluster() {
        // |e0><e0| after a tiny leak into the ground state.
        let eps = 1e-9;
        let d = Operator::from_diagonal(&real_ket(1.0 - eps, 0.0, eps));
        let ev = hermitian_eigenvalues(&d);
        assert!(ev[0].abs() < 1e-16, "{ev:?}");
        assert!((ev[1] - eps).abs() < 1e-16);
    }

    proptest! {
        #[test]
        fn matches_jacobi_reference(entries in prop::array::uniform9(-1.0f64..1.0)) {
            let m = random_hermitian(&entries);
            let ours = hermitian_eigenvalues(&m);
            let mut reference: Vec<f64> =
                SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            for (a, b) in ours.iter().zip(&reference) {
                prop_assert!((a - b).abs() < 1e-12, "{:?} vs {:?}", ours, reference);
            }
        }
    }
}
