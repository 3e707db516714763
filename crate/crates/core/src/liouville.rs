//! Single-qubit channels in the Pauli-Liouville representation.
//!
//! Rows and columns are indexed `(I, X, Y, Z)` and entries are normalized as
//! `M[j][k] = Tr(P_j E(P_k)) / 2`, so the identity channel is the identity
//! matrix and composition is matrix multiplication.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::Mul;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance used for structural checks on 4x4 products.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Eigenvalue floor for the Choi positivity test.
pub const CHOI_TOL: f64 = 1e-10;

/// Coefficients `(c_I, c_X, c_Y, c_Z)` of `(c_I I + c_X X + c_Y Y + c_Z Z) / 2`.
///
/// Holds both density operators (`c_I = 1`, Bloch vector inside the unit ball)
/// and POVM effects (`0 <= E <= I`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliVector(pub Vector4<f64>);

impl PauliVector {
    pub fn new(c_i: f64, c_x: f64, c_y: f64, c_z: f64) -> Self {
        PauliVector(Vector4::new(c_i, c_x, c_y, c_z))
    }

    /// Normalized state with the given Bloch vector.
    pub fn from_bloch(r: [f64; 3]) -> Self {
        Self::new(1.0, r[0], r[1], r[2])
    }

    pub fn zero() -> Self {
        Self::from_bloch([0.0, 0.0, 1.0])
    }

    pub fn one() -> Self {
        Self::from_bloch([0.0, 0.0, -1.0])
    }

    pub fn plus() -> Self {
        Self::from_bloch([1.0, 0.0, 0.0])
    }

    pub fn minus() -> Self {
        Self::from_bloch([-1.0, 0.0, 0.0])
    }

    pub fn plus_i() -> Self {
        Self::from_bloch([0.0, 1.0, 0.0])
    }

    pub fn minus_i() -> Self {
        Self::from_bloch([0.0, -1.0, 0.0])
    }

    pub fn maximally_mixed() -> Self {
        Self::from_bloch([0.0, 0.0, 0.0])
    }

    /// Pure state at 45 degrees latitude in the XZ plane.
    pub fn octant() -> Self {
        Self::from_bloch([FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2])
    }

    pub fn identity_part(&self) -> f64 {
        self.0[0]
    }

    pub fn bloch(&self) -> Vector3<f64> {
        Vector3::new(self.0[1], self.0[2], self.0[3])
    }

    pub fn component(&self, index: usize) -> f64 {
        self.0[index]
    }

    /// Unit trace and Bloch vector in the closed unit ball.
    pub fn is_state(&self, tol: f64) -> bool {
        self.0.iter().all(|c| c.is_finite())
            && (self.0[0] - 1.0).abs() <= tol
            && self.bloch().norm() <= 1.0 + tol
    }

    /// Both eigenvalues `(c_I +- |c|) / 2` lie in `[0, 1]`.
    pub fn is_effect(&self, tol: f64) -> bool {
        if !self.0.iter().all(|c| c.is_finite()) {
            return false;
        }
        let r = self.bloch().norm();
        let lo = (self.0[0] - r) / 2.0;
        let hi = (self.0[0] + r) / 2.0;
        lo >= -tol && hi <= 1.0 + tol
    }
}

/// Bloch-sphere rotation: unit axis and rotation angle in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarySpec {
    axis: [f64; 3],
    angle: f64,
}

impl UnitarySpec {
    pub fn new(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !angle.is_finite() || !norm.is_finite() || (norm - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::invalid(format!(
                "rotation axis must be a unit vector (norm {norm}) and angle finite ({angle})"
            )));
        }
        Ok(UnitarySpec { axis, angle })
    }

    pub fn about_z(angle: f64) -> Self {
        UnitarySpec {
            axis: [0.0, 0.0, 1.0],
            angle,
        }
    }

    pub fn about_x(angle: f64) -> Self {
        UnitarySpec {
            axis: [1.0, 0.0, 0.0],
            angle,
        }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// The 2x2 unitary `exp(-i angle/2 n.sigma)` generating this rotation.
    pub fn matrix(&self) -> Matrix2<Complex64> {
        let (s, c) = (self.angle / 2.0).sin_cos();
        let [nx, ny, nz] = self.axis;
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        Matrix2::new(
            one * c - i * s * nz,
            (-i * nx - one * ny) * s,
            (-i * nx + one * ny) * s,
            one * c + i * s * nz,
        )
    }
}

/// Real 4x4 Pauli-Liouville matrix of a single-qubit channel.
#[derive(Clone, Copy, PartialEq)]
pub struct Superoperator(Matrix4<f64>);

impl fmt::Debug for Superoperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.0.row_iter().map(|r| [r[0], r[1], r[2], r[3]]))
            .finish()
    }
}

impl Superoperator {
    pub fn identity() -> Self {
        Superoperator(Matrix4::identity())
    }

    pub fn from_matrix(m: Matrix4<f64>) -> Self {
        Superoperator(m)
    }

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Self {
        Superoperator(Matrix4::from_fn(|r, c| rows[r][c]))
    }

    pub fn diagonal(d: [f64; 4]) -> Self {
        Superoperator(Matrix4::from_diagonal(&Vector4::from(d)))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Superoperator) -> Superoperator {
        Superoperator(self.0 * first.0)
    }

    pub fn apply(&self, s: &PauliVector) -> PauliVector {
        PauliVector(self.0 * s.0)
    }

    pub fn transpose(&self) -> Superoperator {
        Superoperator(self.0.transpose())
    }

    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        (self.0 - other.0).amax()
    }

    pub fn approx_eq(&self, other: &Superoperator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        (self.0[(0, 0)] - 1.0).abs() <= tol && (1..4).all(|k| self.0[(0, k)].abs() <= tol)
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        (1..4).all(|k| self.0[(k, 0)].abs() <= tol)
    }

    /// Lower-right 3x3 block acting on the Bloch vector.
    pub fn bloch_block(&self) -> nalgebra::Matrix3<f64> {
        self.0.fixed_view::<3, 3>(1, 1).into_owned()
    }

    /// Unital, trace-preserving and with a proper orthogonal Bloch block.
    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_trace_preserving(tol) || !self.is_unital(tol) {
            return false;
        }
        let b = self.bloch_block();
        let gram = b.transpose() * b;
        (gram - nalgebra::Matrix3::identity()).amax() <= tol && (b.determinant() - 1.0).abs() <= tol
    }

    pub fn avg_fidelity(&self) -> f64 {
        avg_fidelity(self)
    }
}

impl Mul for Superoperator {
    type Output = Superoperator;

    fn mul(self, rhs: Superoperator) -> Superoperator {
        self.compose(&rhs)
    }
}

impl Mul<&Superoperator> for &Superoperator {
    type Output = Superoperator;

    fn mul(self, rhs: &Superoperator) -> Superoperator {
        self.compose(rhs)
    }
}

/// Bloch rotation matrix of `u` embedded as a unitary channel (Rodrigues' formula).
pub fn unitary_to_superop(u: &UnitarySpec) -> Result<Superoperator> {
    let u = UnitarySpec::new(u.axis, u.angle)?;
    let n = Vector3::from(u.axis);
    let (s, c) = u.angle.sin_cos();
    let cross = nalgebra::Matrix3::new(0.0, -n[2], n[1], n[2], 0.0, -n[0], -n[1], n[0], 0.0);
    let rot = nalgebra::Matrix3::identity() * c + cross * s + n * n.transpose() * (1.0 - c);
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(1, 1).copy_from(&rot);
    Ok(Superoperator(m))
}

/// `a` after `b`.
pub fn compose(a: &Superoperator, b: &Superoperator) -> Superoperator {
    a.compose(b)
}

pub fn apply(m: &Superoperator, s: &PauliVector) -> PauliVector {
    m.apply(s)
}

/// `Tr(E rho)` with `E = rho = |0><0|` giving one.
///
/// Results outside `[0, 1]` (beyond rounding) mean the effect or state is not
/// physical and are reported as errors; in-range rounding is clamped.
pub fn expectation(effect: &PauliVector, state: &PauliVector) -> Result<f64> {
    let value = effect.0.dot(&state.0) / 2.0;
    if !value.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&value) {
        return Err(Error::unphysical(format!(
            "expectation {value} lies outside [0, 1]"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Average gate fidelity `1/2 + (M_XX + M_YY + M_ZZ) / 6`.
pub fn avg_fidelity(m: &Superoperator) -> f64 {
    0.5 + (m.0[(1, 1)] + m.0[(2, 2)] + m.0[(3, 3)]) / 6.0
}

/// Process-matrix element `chi_00 = 3F/2 - 1/2` of a qubit channel.
pub fn chi00(fidelity: f64) -> f64 {
    1.5 * fidelity - 0.5
}

pub fn chi00_inv(chi: f64) -> f64 {
    (2.0 * chi + 1.0) / 3.0
}

/// Pauli matrices in `(I, X, Y, Z)` order.
pub fn pauli_matrices() -> [Matrix2<Complex64>; 4] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    [
        Matrix2::new(l, o, o, l),
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(l, o, o, -l),
    ]
}

/// Liouville matrix of `rho -> sum_i K_i rho K_i^dagger`.
///
/// Trace preservation is not checked here; see [`is_cptp`].
pub fn kraus_to_superop(kraus: &[Matrix2<Complex64>]) -> Superoperator {
    let paulis = pauli_matrices();
    let mut m = Matrix4::zeros();
    for (k, pk) in paulis.iter().enumerate() {
        let image: Matrix2<Complex64> = kraus.iter().map(|a| a * pk * a.adjoint()).sum();
        for (j, pj) in paulis.iter().enumerate() {
            m[(j, k)] = (pj * image).trace().re / 2.0;
        }
    }
    Superoperator(m)
}

/// Choi matrix `J = sum_ab |a><b| (x) E(|a><b|) = 1/2 sum_jk M_jk P_k^T (x) P_j`.
pub fn choi_matrix(m: &Superoperator) -> Matrix4<Complex64> {
    let paulis = pauli_matrices();
    let mut j = Matrix4::<Complex64>::zeros();
    for (row, pr) in paulis.iter().enumerate() {
        for (col, pc) in paulis.iter().enumerate() {
            let w = m.0[(row, col)] / 2.0;
            if w == 0.0 {
                continue;
            }
            j += pc.transpose().kronecker(pr) * Complex64::new(w, 0.0);
        }
    }
    j
}

/// Smallest eigenvalue of the (Hermitian) Choi matrix.
pub fn min_choi_eigenvalue(m: &Superoperator) -> f64 {
    let j = choi_matrix(m);
    let herm = (j + j.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Complete positivity (Choi eigenvalues >= -1e-10) and trace preservation.
pub fn is_cptp(m: &Superoperator) -> bool {
    m.0.iter().all(|v| v.is_finite())
        && m.is_trace_preserving(1e-10)
        && min_choi_eigenvalue(m) >= -CHOI_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn pauli_gates() {
        let z = unitary_to_superop(&UnitarySpec::about_z(PI)).unwrap();
        assert!(z.approx_eq(&Superoperator::diagonal([1.0, -1.0, -1.0, 1.0]), 1e-15));
        let x = unitary_to_superop(&UnitarySpec::about_x(PI)).unwrap();
        assert!(x.approx_eq(&Superoperator::diagonal([1.0, 1.0, -1.0, -1.0]), 1e-15));
    }

    #[test]
    fn t_gate_matches_explicit_conjugation() {
        let spec = UnitarySpec::about_z(FRAC_PI_4);
        let t = unitary_to_superop(&spec).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = Superoperator::from_rows([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, h, -h, 0.0],
            [0.0, h, h, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]);
        assert!(t.approx_eq(&expected, 1e-15));
        // independent route: conjugate the Pauli matrices by the 2x2 unitary
        let via_kraus = kraus_to_superop(&[spec.matrix()]);
        assert!(t.approx_eq(&via_kraus, 1e-14));
    }

    #[test]
    fn rejects_non_unit_axis() {
        assert!(UnitarySpec::new([1.0, 1.0, 0.0], 0.3).is_err());
        assert!(UnitarySpec::new([0.0, 0.0, 1.0 + 1e-9], 0.3).is_err());
        assert!(UnitarySpec::new([0.0, 0.0, 1.0], f64::NAN).is_err());
    }

    #[test]
    fn compose_examples() {
        let x = unitary_to_superop(&UnitarySpec::about_x(PI)).unwrap();
        assert!(compose(&x, &x).approx_eq(&Superoperator::identity(), 1e-15));
        let t = unitary_to_superop(&UnitarySpec::about_z(FRAC_PI_4)).unwrap();
        let s = unitary_to_superop(&UnitarySpec::about_z(FRAC_PI_2)).unwrap();
        assert!(compose(&t, &t).approx_eq(&s, 1e-15));
        let m = Superoperator::diagonal([1.0, 0.3, 0.2, 0.1]);
        assert_eq!(compose(&Superoperator::identity(), &m), m);
    }

    #[test]
    fn compose_order_is_second_then_first() {
        // X then T versus T then X differ; check against the 2x2 unitaries
        let t = UnitarySpec::about_z(FRAC_PI_4);
        let x = UnitarySpec::about_x(PI);
        let xt = kraus_to_superop(&[t.matrix() * x.matrix()]);
        let lhs = compose(
            &unitary_to_superop(&t).unwrap(),
            &unitary_to_superop(&x).unwrap(),
        );
        assert!(lhs.approx_eq(&xt, 1e-14));
    }

    #[test]
    fn apply_examples() {
        let rho = PauliVector::zero();
        assert_eq!(apply(&Superoperator::identity(), &rho), rho);
        let dep = Superoperator::diagonal([1.0, 0.9, 0.9, 0.9]);
        assert_eq!(apply(&dep, &rho), PauliVector::new(1.0, 0.0, 0.0, 0.9));
        let x = unitary_to_superop(&UnitarySpec::about_x(PI)).unwrap();
        let flipped = apply(&x, &rho);
        assert_abs_diff_eq!(flipped.component(3), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(flipped.identity_part(), 1.0);
    }

    #[test]
    fn expectation_examples() {
        let zero = PauliVector::zero();
        assert_abs_diff_eq!(expectation(&zero, &zero).unwrap(), 1.0);
        assert_abs_diff_eq!(expectation(&zero, &PauliVector::one()).unwrap(), 0.0);
        assert_abs_diff_eq!(
            expectation(&zero, &PauliVector::maximally_mixed()).unwrap(),
            0.5
        );
        let bogus = PauliVector::from_bloch([0.0, 0.0, 3.0]);
        assert!(matches!(
            expectation(&zero, &bogus),
            Err(Error::Unphysical(_))
        ));
    }

    #[test]
    fn fidelity_examples() {
        assert_abs_diff_eq!(avg_fidelity(&Superoperator::identity()), 1.0);
        let dep = Superoperator::diagonal([1.0, 0.995, 0.995, 0.995]);
        assert_abs_diff_eq!(avg_fidelity(&dep), 0.9975, epsilon = 1e-15);
    }

    #[test]
    fn chi_examples() {
        assert_abs_diff_eq!(chi00(1.0), 1.0);
        assert_abs_diff_eq!(chi00(0.99), 0.985, epsilon = 1e-15);
        assert_abs_diff_eq!(chi00(0.5), 0.25);
        assert_abs_diff_eq!(chi00_inv(chi00(0.731)), 0.731, epsilon = 1e-15);
    }

    #[test]
    fn cptp_checks() {
        assert!(is_cptp(&Superoperator::identity()));
        assert!(is_cptp(&Superoperator::diagonal([1.0, 0.0, 0.0, 0.0])));
        // transpose map: positive but not completely positive
        assert!(!is_cptp(&Superoperator::diagonal([1.0, 1.0, -1.0, 1.0])));
        // shrinking beyond the tetrahedron of Pauli channels
        assert!(!is_cptp(&Superoperator::diagonal([1.0, 1.0, 1.0, -1.0])));
        // not trace preserving
        assert!(!is_cptp(&Superoperator::diagonal([0.5, 0.0, 0.0, 0.0])));
        let amp_damp = kraus_to_superop(&[
            Matrix2::new(
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.8f64.sqrt(), 0.0),
            ),
            Matrix2::new(
                Complex64::new(0.0, 0.0),
                Complex64::new(0.2f64.sqrt(), 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ),
        ]);
        assert!(is_cptp(&amp_damp));
        assert!(!amp_damp.is_unital(1e-12));
    }

    #[test]
    fn effect_and_state_predicates() {
        assert!(PauliVector::zero().is_state(1e-12));
        assert!(PauliVector::octant().is_state(1e-12));
        assert!(!PauliVector::new(1.0, 0.8, 0.8, 0.0).is_state(1e-12));
        assert!(PauliVector::new(0.0, 0.0, 0.0, 0.0).is_effect(1e-12));
        assert!(PauliVector::new(2.0, 0.0, 0.0, 0.0).is_effect(1e-12));
        assert!(!PauliVector::new(1.5, 0.0, 0.0, 1.0).is_effect(1e-12));
    }
}
