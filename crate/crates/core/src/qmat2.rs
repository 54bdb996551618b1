//! 2×2 complex matrix kernel.
//!
//! Everything in this crate is built on [`CMat2`] (general complex 2×2),
//! [`Herm2`] (validated Hermitian) and [`DensityMatrix`] (unit trace, PSD).
//!
//! Bloch coordinates use Pauli *coefficients*:
//! `H = (tr H / 2)·𝟙 + x·σx + y·σy + z·σz`, so a pure state has `|v| = 1/2`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hermiticity tolerance on off-diagonal mismatch and imaginary diagonal.
pub const TOL_HERM: f64 = 1e-12;
/// Trace-one tolerance for density matrices.
pub const TOL_TP: f64 = 1e-10;
/// Smallest admissible eigenvalue of a density matrix is `-TOL_PSD`.
pub const TOL_PSD: f64 = 1e-10;
/// Unitarity check used by [`conjugate`].
pub const TOL_UNITARY: f64 = 1e-8;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// General 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CMat2(pub [[C64; 2]; 2]);

impl CMat2 {
    pub const fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        CMat2([[m00, m01], [m10, m11]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        CMat2::new(m[0][0].into(), m[0][1].into(), m[1][0].into(), m[1][1].into())
    }

    pub const fn identity() -> Self {
        CMat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        CMat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn pauli_x() -> Self {
        CMat2::new(ZERO, ONE, ONE, ZERO)
    }

    pub const fn pauli_y() -> Self {
        CMat2::new(ZERO, C64::new(0.0, -1.0), I, ZERO)
    }

    pub const fn pauli_z() -> Self {
        CMat2::new(ONE, ZERO, ZERO, C64::new(-1.0, 0.0))
    }

    /// `diag(d0, d1)`
    pub fn diag(d0: C64, d1: C64) -> Self {
        CMat2::new(d0, ZERO, ZERO, d1)
    }

    /// Matrix unit `|i⟩⟨j|`.
    pub fn unit(i: usize, j: usize) -> Self {
        let mut m = CMat2::zero();
        m.0[i][j] = ONE;
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn adjugate(&self) -> CMat2 {
        let [[a, b], [c, d]] = self.0;
        CMat2::new(d, -b, -c, a)
    }

    pub fn dagger(&self) -> CMat2 {
        let [[a, b], [c, d]] = self.0;
        CMat2::new(a.conj(), c.conj(), b.conj(), d.conj())
    }

    pub fn scale(&self, s: C64) -> CMat2 {
        let [[a, b], [c, d]] = self.0;
        CMat2::new(a * s, b * s, c * s, d * s)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Frobenius norm `sqrt(tr(A†A))`.
    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(A + A†)/2`. Only for matrices produced internally that are
    /// Hermitian up to rounding; user input goes through [`Herm2::new`].
    pub fn hermitian_part(&self) -> Herm2 {
        let h = (*self + self.dagger()).scale(C64::new(0.5, 0.0));
        let mut m = h.0;
        m[0][0].im = 0.0;
        m[1][1].im = 0.0;
        Herm2(CMat2(m))
    }

    /// Largest entry-wise deviation from Hermiticity.
    pub fn hermiticity_residual(&self) -> f64 {
        let off = (self.0[0][1] - self.0[1][0].conj()).norm();
        off.max(self.0[0][0].im.abs()).max(self.0[1][1].im.abs())
    }

    /// Frobenius distance of `U†U` from the identity.
    pub fn unitarity_residual(&self) -> f64 {
        (self.dagger() * *self - CMat2::identity()).frobenius()
    }
}

impl Add for CMat2 {
    type Output = CMat2;
    fn add(self, o: CMat2) -> CMat2 {
        let mut m = self.0;
        for (row, orow) in m.iter_mut().zip(o.0.iter()) {
            for (x, y) in row.iter_mut().zip(orow.iter()) {
                *x += *y;
            }
        }
        CMat2(m)
    }
}

impl Sub for CMat2 {
    type Output = CMat2;
    fn sub(self, o: CMat2) -> CMat2 {
        self + (-o)
    }
}

impl Neg for CMat2 {
    type Output = CMat2;
    fn neg(self) -> CMat2 {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for CMat2 {
    type Output = CMat2;
    fn mul(self, o: CMat2) -> CMat2 {
        let a = self.0;
        let b = o.0;
        CMat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<f64> for CMat2 {
    type Output = CMat2;
    fn mul(self, s: f64) -> CMat2 {
        self.scale(C64::new(s, 0.0))
    }
}

impl Mul<C64> for CMat2 {
    type Output = CMat2;
    fn mul(self, s: C64) -> CMat2 {
        self.scale(s)
    }
}

impl fmt::Display for CMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.0;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

/// Hermitian 2×2 matrix. Construction validates, it never symmetrizes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Herm2(CMat2);

impl Herm2 {
    pub fn new(m: CMat2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let residual = m.hermiticity_residual();
        if residual > TOL_HERM {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Herm2(m))
    }

    /// `[[a, b], [conj b, d]]`, Hermitian by construction.
    pub fn from_parts(a: f64, b: C64, d: f64) -> Self {
        Herm2(CMat2::new(a.into(), b, b.conj(), d.into()))
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Result<Self> {
        Herm2::new(CMat2::from_real(m))
    }

    pub fn identity() -> Self {
        Herm2(CMat2::identity())
    }

    /// The maximally mixed state `𝟙/2`.
    pub fn maximally_mixed() -> Self {
        Herm2(CMat2::identity() * 0.5)
    }

    pub fn pauli_x() -> Self {
        Herm2(CMat2::pauli_x())
    }

    pub fn pauli_y() -> Self {
        Herm2(CMat2::pauli_y())
    }

    pub fn pauli_z() -> Self {
        Herm2(CMat2::pauli_z())
    }

    /// Projector onto the computational basis state `|k⟩`.
    pub fn basis_projector(k: usize) -> Self {
        Herm2(CMat2::unit(k, k))
    }

    #[inline]
    pub fn as_cmat(&self) -> &CMat2 {
        &self.0
    }

    pub fn into_cmat(self) -> CMat2 {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0 .0[0][0].re + self.0 .0[1][1].re
    }

    /// Real determinant `m00·m11 − |m01|²`.
    pub fn det(&self) -> f64 {
        let m = &self.0 .0;
        m[0][0].re * m[1][1].re - m[0][1].norm_sqr()
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        eigenvalues_herm(self)
    }

    pub fn trace_norm(&self) -> f64 {
        trace_norm(self)
    }

    pub fn bloch(&self) -> BlochVector {
        bloch(self)
    }

    pub fn scale(&self, s: f64) -> Herm2 {
        Herm2(self.0 * s)
    }

    /// `tr(A # B)`: the mixed term in `det(A + B) = det A + det B + tr(A# B)`.
    pub fn adjugate_trace(&self, other: &Herm2) -> f64 {
        (self.0.adjugate() * other.0).trace().re
    }

    pub fn max_abs_diff(&self, other: &Herm2) -> f64 {
        self.0
             .0
            .iter()
            .flatten()
            .zip(other.0 .0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for Herm2 {
    type Output = Herm2;
    fn add(self, o: Herm2) -> Herm2 {
        Herm2(self.0 + o.0)
    }
}

impl Sub for Herm2 {
    type Output = Herm2;
    fn sub(self, o: Herm2) -> Herm2 {
        Herm2(self.0 - o.0)
    }
}

impl Neg for Herm2 {
    type Output = Herm2;
    fn neg(self) -> Herm2 {
        Herm2(-self.0)
    }
}

impl Mul<f64> for Herm2 {
    type Output = Herm2;
    fn mul(self, s: f64) -> Herm2 {
        self.scale(s)
    }
}

impl fmt::Display for Herm2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Unit-trace positive semidefinite [`Herm2`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Herm2);

impl DensityMatrix {
    pub fn new(h: Herm2) -> Result<Self> {
        validate_density(&h, TOL_TP, TOL_PSD)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Herm2::maximally_mixed())
    }

    pub fn basis(k: usize) -> Self {
        DensityMatrix(Herm2::basis_projector(k))
    }

    /// `𝟙/2 + v·σ`.
    pub fn from_bloch(v: BlochVector) -> Result<Self> {
        DensityMatrix::new(from_bloch(1.0, v))
    }

    pub fn herm(&self) -> &Herm2 {
        &self.0
    }

    pub fn as_cmat(&self) -> &CMat2 {
        self.0.as_cmat()
    }
}

impl std::ops::Deref for DensityMatrix {
    type Target = Herm2;
    fn deref(&self) -> &Herm2 {
        &self.0
    }
}

/// Pauli coefficients `(x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        BlochVector::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: BlochVector) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: BlochVector) -> BlochVector {
        BlochVector::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> BlochVector {
        BlochVector::new(self.x * s, self.y * s, self.z * s)
    }

}

impl Sub for BlochVector {
    type Output = BlochVector;
    fn sub(self, o: BlochVector) -> BlochVector {
        BlochVector::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

pub fn adjugate(m: &CMat2) -> CMat2 {
    m.adjugate()
}

pub fn det2(m: &CMat2) -> C64 {
    m.det()
}

/// Eigenvalues `(λ₁, λ₂)` with `λ₁ ≥ λ₂`.
///
/// The discriminant is written as `((a−d)/2)² + |b|²`, which is a sum of
/// squares; negative values can only come from rounding and are clamped.
pub fn eigenvalues_herm(h: &Herm2) -> (f64, f64) {
    let m = &h.0 .0;
    let a = m[0][0].re;
    let d = m[1][1].re;
    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let disc = (half_gap * half_gap + m[0][1].norm_sqr()).max(0.0).sqrt();
    (mean + disc, mean - disc)
}

pub fn trace_norm(h: &Herm2) -> f64 {
    let (l1, l2) = eigenvalues_herm(h);
    l1.abs() + l2.abs()
}

pub fn bloch(h: &Herm2) -> BlochVector {
    let m = &h.0 .0;
    BlochVector::new(m[0][1].re, -m[0][1].im, 0.5 * (m[0][0].re - m[1][1].re))
}

pub fn from_bloch(trace: f64, v: BlochVector) -> Herm2 {
    let half = 0.5 * trace;
    Herm2::from_parts(half + v.z, C64::new(v.x, -v.y), half - v.z)
}

/// `U† A U`.
pub fn conjugate(u: &CMat2, a: &CMat2) -> Result<CMat2> {
    let residual = u.unitarity_residual();
    if residual > TOL_UNITARY {
        return Err(Error::NotUnitary { residual });
    }
    Ok(u.dagger() * *a * *u)
}

/// Hermitian conjugation for callers that have already established
/// unitarity (or conjugate by arbitrary matrices on purpose).
pub fn conjugate_herm(u: &CMat2, h: &Herm2) -> Herm2 {
    (u.dagger() * h.0 * *u).hermitian_part()
}

/// Hilbert–Schmidt inner product `tr(A†B)`.
pub fn hs_inner(a: &CMat2, b: &CMat2) -> C64 {
    (a.dagger() * *b).trace()
}

/// Checks trace and positivity with the given tolerances.
pub fn validate_density(h: &Herm2, tol_trace: f64, tol_psd: f64) -> Result<DensityMatrix> {
    let tr = h.trace();
    if (tr - 1.0).abs() > tol_trace {
        return Err(Error::NotTraceOne { trace: tr });
    }
    let (_, l2) = eigenvalues_herm(h);
    if l2 < -tol_psd {
        return Err(Error::NotPositive { min_eigenvalue: l2 });
    }
    Ok(DensityMatrix(*h))
}

/// Validates a raw matrix all the way to a density matrix.
pub fn density_from_cmat(m: CMat2) -> Result<DensityMatrix> {
    DensityMatrix::new(Herm2::new(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &CMat2, b: &CMat2, tol: f64) -> bool {
        (*a - *b).frobenius() <= tol
    }

    #[test]
    fn adjugate_examples() {
        let m = CMat2::new(c(1.0, 0.5), c(2.0, 0.0), c(3.0, -1.0), c(4.0, 0.0));
        let adj = adjugate(&m);
        assert_eq!(adj, CMat2::new(m.0[1][1], -m.0[0][1], -m.0[1][0], m.0[0][0]));
        assert_eq!(adjugate(&CMat2::identity()), CMat2::identity());
        let m = CMat2::from_real([[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(adjugate(&m), CMat2::from_real([[4.0, -2.0], [-3.0, 1.0]]));
        let prod = m * adjugate(&m);
        assert!(close(&prod, &(CMat2::identity() * det2(&m)), 1e-14));
    }

    #[test]
    fn det_examples() {
        assert_eq!(det2(&CMat2::identity()), c(1.0, 0.0));
        let rho2 = CMat2::from_real([[0.2, 0.4], [0.4, 0.8]]);
        assert!(det2(&rho2).norm() < 1e-15);
        let tau2 = CMat2::from_real([[0.6, 0.2], [0.2, 0.4]]);
        assert!((det2(&tau2) - c(0.2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalues_herm(&Herm2::pauli_x()), (1.0, -1.0));
        assert_eq!(eigenvalues_herm(&Herm2::maximally_mixed()), (0.5, 0.5));
        let d = Herm2::from_real([[3.0, 0.0], [0.0, -1.0]]).unwrap();
        assert_eq!(eigenvalues_herm(&d), (3.0, -1.0));
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&Herm2::pauli_x()), 2.0);
        assert_eq!(trace_norm(&Herm2::identity()), 2.0);
        let d = Herm2::from_real([[3.0, 0.0], [0.0, -1.0]]).unwrap();
        assert_eq!(trace_norm(&d), 4.0);
    }

    #[test]
    fn bloch_examples() {
        assert_eq!(bloch(&Herm2::maximally_mixed()), BlochVector::new(0.0, 0.0, 0.0));
        assert_eq!(bloch(&Herm2::basis_projector(1)), BlochVector::new(0.0, 0.0, -0.5));
        let h = Herm2::maximally_mixed() + Herm2::pauli_x() * 0.3;
        assert_eq!(bloch(&h), BlochVector::new(0.3, 0.0, 0.0));
        assert_eq!(bloch(&Herm2::pauli_y()), BlochVector::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn conjugate_examples() {
        let a = CMat2::new(c(0.3, 0.0), c(1.0, 2.0), c(-1.0, 0.5), c(0.0, 1.0));
        assert_eq!(conjugate(&CMat2::identity(), &a).unwrap(), a);
        let r = conjugate(&CMat2::pauli_x(), &CMat2::pauli_z()).unwrap();
        assert!(close(&r, &-CMat2::pauli_z(), 1e-15));
        for &phi in &[0.3, 1.0, 2.5, -0.7] {
            let u = CMat2::diag(c(1.0, 0.0), C64::from_polar(1.0, phi));
            let got = conjugate(&u, &CMat2::pauli_x()).unwrap();
            let want = CMat2::pauli_x() * phi.cos() - CMat2::pauli_y() * phi.sin();
            assert!(close(&got, &want, 1e-14), "phi={phi}");
        }
        let not_unitary = CMat2::from_real([[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(
            conjugate(&not_unitary, &a),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn hs_inner_examples() {
        let one = CMat2::identity();
        assert_eq!(hs_inner(&one, &one), c(2.0, 0.0));
        assert_eq!(hs_inner(&CMat2::pauli_x(), &CMat2::pauli_y()), c(0.0, 0.0));
        assert_eq!(hs_inner(&CMat2::pauli_z(), &CMat2::pauli_z()), c(2.0, 0.0));
    }

    #[test]
    fn validate_density_examples() {
        let ok = Herm2::from_real([[0.5, 0.0], [0.0, 0.5]]).unwrap();
        assert!(validate_density(&ok, TOL_TP, TOL_PSD).is_ok());
        let bad = Herm2::from_real([[1.5, 0.0], [0.0, -0.5]]).unwrap();
        match validate_density(&bad, TOL_TP, TOL_PSD) {
            Err(Error::NotPositive { min_eigenvalue }) => assert_eq!(min_eigenvalue, -0.5),
            other => panic!("unexpected {other:?}"),
        }
        let rho2 = Herm2::from_real([[0.2, 0.4], [0.4, 0.8]]).unwrap();
        assert!(validate_density(&rho2, TOL_TP, TOL_PSD).is_ok());
        let heavy = Herm2::from_real([[0.7, 0.0], [0.0, 0.5]]).unwrap();
        assert!(matches!(
            validate_density(&heavy, TOL_TP, TOL_PSD),
            Err(Error::NotTraceOne { .. })
        ));
        let skew = CMat2::new(c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0));
        assert!(matches!(Herm2::new(skew), Err(Error::NotHermitian { .. })));
        let imag_diag = CMat2::new(c(0.5, 1e-6), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0));
        assert!(matches!(Herm2::new(imag_diag), Err(Error::NotHermitian { .. })));
        let nan = CMat2::new(c(f64::NAN, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0));
        assert_eq!(Herm2::new(nan), Err(Error::NonFinite));
    }
}
