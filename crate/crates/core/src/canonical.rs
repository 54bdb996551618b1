//! Reduction of a pair-to-pair map to a Pauli diagonal map.
//!
//! Given inputs spanning a 3-dimensional operator system, there are unitaries
//! `U`, `V` such that `S(X) = V† T(U X U†) V` acts on `span{𝟙, σx, σy}` as
//! `σx ↦ a·σx`, `σy ↦ b·σy`. The pipeline:
//!
//! 1. rotate both pairs into the `σz`-orthogonal plane ([`orthogonal_direction`],
//!    [`z_aligning_unitary`]);
//! 2. read off the Bloch rows `r` (inputs) and `s` (outputs) and the map
//!    `A = r⁻¹ s` in the row convention `sⱼ = rⱼ·A`;
//! 3. factor `A = R(θ)·diag(a, b)·R(φ)ᵀ` with rotations and fold `θ`, `φ`
//!    into `U`, `V` through [`rotation_conjugator`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{dim_operator_system, ProblemInstance};
use crate::qmat2::{conjugate_herm, BlochVector, CMat2, DensityMatrix, Herm2, C64};

const TOL_CROSS: f64 = 1e-10;
const TOL_NORM: f64 = 1e-10;

pub type Real2 = [[f64; 2]; 2];

/// Eigenvalues `(a, b, c)` of a unital Pauli diagonal map on `(σx, σy, σz)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliDiagonalParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PauliDiagonalParams {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        PauliDiagonalParams { a, b, c }
    }

    /// `|a+b| ≤ 1+c` and `|a−b| ≤ 1−c`.
    pub fn is_cptp(&self, tol: f64) -> bool {
        (self.a + self.b).abs() <= 1.0 + self.c + tol && (self.a - self.b).abs() <= 1.0 - self.c + tol
    }

    /// Positivity of the restriction to `span{𝟙, σx, σy}`.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.a.abs() <= 1.0 + tol && self.b.abs() <= 1.0 + tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalForm {
    /// Basis changes making each pair `σz`-orthogonal, before the SVD rotations.
    pub u_frame: CMat2,
    pub v_frame: CMat2,
    /// Final unitaries: `u = u_frame·diag(1, e^{iθ})`, `v = v_frame·diag(1, e^{iφ})`.
    pub u: CMat2,
    pub v: CMat2,
    /// Rows `(x, y)` of `u_frame† ρⱼ u_frame`.
    pub r: Real2,
    /// Rows `(x, y)` of `v_frame† τⱼ v_frame`.
    pub s: Real2,
    /// `r·A = s`.
    pub map: Real2,
    pub theta: f64,
    pub phi: f64,
    /// Rows of `u† ρⱼ u` and `v† τⱼ v`; `s_rot = r_rot·diag(a, b)`.
    pub r_rot: Real2,
    pub s_rot: Real2,
    pub a: f64,
    pub b: f64,
}

impl CanonicalForm {
    pub fn params_with(&self, c: f64) -> PauliDiagonalParams {
        PauliDiagonalParams::new(self.a, self.b, c)
    }

    /// `V·(𝟙/2 + a·r'ⱼₓσx + b·r'ⱼᵧσy)·V†` for `j ∈ {0, 1}`.
    pub fn reconstruct_output(&self, j: usize) -> Herm2 {
        let row = self.r_rot[j];
        let inner = crate::qmat2::from_bloch(1.0, BlochVector::new(self.a * row[0], self.b * row[1], 0.0));
        (self.v * *inner.as_cmat() * self.v.dagger()).hermitian_part()
    }
}

/// Unit vector orthogonal to the Bloch vectors of both states.
///
/// Generic pairs use the normalized cross product. For collinear pairs the
/// choice is the orthogonal unit vector with the largest `|n_z|`, then the
/// largest `|n_y|`, signed so that component is positive.
pub fn orthogonal_direction(rho1: &Herm2, rho2: &Herm2) -> BlochVector {
    let b1 = rho1.bloch();
    let b2 = rho2.bloch();
    let cross = b1.cross(b2);
    let cn = cross.norm();
    if cn > TOL_CROSS {
        return cross.scale(1.0 / cn);
    }
    let d = if b1.norm() >= b2.norm() { b1 } else { b2 };
    let dn = d.norm();
    let ez = BlochVector::new(0.0, 0.0, 1.0);
    if dn <= TOL_CROSS {
        return ez;
    }
    let d = d.scale(1.0 / dn);
    for axis in [ez, BlochVector::new(0.0, 1.0, 0.0)] {
        let p = axis - d.scale(axis.dot(d));
        let pn = p.norm();
        if pn > TOL_CROSS {
            return p.scale(1.0 / pn);
        }
    }
    BlochVector::new(1.0, 0.0, 0.0)
}

/// `U` with `U†(n·σ)U = σz`, `det U = 1` and real nonnegative `U₀₀`
/// (or real positive `U₀₁` when `U₀₀ = 0`).
pub fn z_aligning_unitary(n: BlochVector) -> Result<CMat2> {
    let norm = n.norm();
    if (norm - 1.0).abs() > TOL_NORM {
        return Err(Error::NotUnit { norm });
    }
    let n = n.scale(1.0 / norm);
    // Columns are the +1 and −1 eigenvectors of n·σ:
    // (cos θ/2, e^{iφ} sin θ/2) and (−e^{−iφ} sin θ/2, cos θ/2).
    let c = (0.5 * (1.0 + n.z)).max(0.0).sqrt();
    let s = (0.5 * (1.0 - n.z)).max(0.0).sqrt();
    let rho = n.x.hypot(n.y);
    let w = if rho > 0.0 {
        C64::new(n.x, n.y) * (s / rho)
    } else if n.z > 0.0 {
        C64::new(0.0, 0.0)
    } else {
        C64::new(-s, 0.0)
    };
    Ok(CMat2::new(c.into(), -w.conj(), w, c.into()))
}

/// `diag(1, e^{iφ})`; conjugation `X ↦ U†XU` sends
/// `σx ↦ cos φ·σx − sin φ·σy` and `σy ↦ sin φ·σx + cos φ·σy`.
pub fn rotation_conjugator(phi: f64) -> CMat2 {
    CMat2::diag(C64::new(1.0, 0.0), C64::from_polar(1.0, phi))
}

/// Rotation matrix `[[cos x, −sin x], [sin x, cos x]]`.
pub fn rotation(x: f64) -> Real2 {
    let (s, c) = x.sin_cos();
    [[c, -s], [s, c]]
}

pub fn mat_mul(a: &Real2, b: &Real2) -> Real2 {
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

pub fn transpose(a: &Real2) -> Real2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

pub fn det_real(a: &Real2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Closed-form SVD with rotation factors: `A = R(θ)·diag(σ₁, σ₂)·R(φ)ᵀ`,
/// `σ₁ ≥ |σ₂|`, `sign σ₂ = sign det A`. Returns `(θ, σ₁, σ₂, φ)`.
pub fn rotation_svd(a: &Real2) -> (f64, f64, f64, f64) {
    let e = 0.5 * (a[0][0] + a[1][1]);
    let f = 0.5 * (a[0][0] - a[1][1]);
    let g = 0.5 * (a[1][0] + a[0][1]);
    let h = 0.5 * (a[1][0] - a[0][1]);
    let q = e.hypot(h);
    let r = f.hypot(g);
    let a1 = g.atan2(f);
    let a2 = h.atan2(e);
    (0.5 * (a2 + a1), q + r, q - r, 0.5 * (a1 - a2))
}

fn plane_rows(w: &CMat2, p: &Herm2, q: &Herm2) -> Real2 {
    let row = |h: &Herm2| {
        let v = conjugate_herm(w, h).bloch();
        [v.x, v.y]
    };
    [row(p), row(q)]
}

/// Largest `|z|`-coefficient of `w† h w` over the given states.
pub fn plane_leakage(w: &CMat2, states: [&DensityMatrix; 2]) -> f64 {
    states
        .iter()
        .map(|h| conjugate_herm(w, h).bloch().z.abs())
        .fold(0.0, f64::max)
}

pub fn canonicalize(inst: &ProblemInstance) -> Result<CanonicalForm> {
    let dim = dim_operator_system(&inst.rho1, &inst.rho2);
    if dim < 3 {
        return Err(Error::DegenerateInputSpan { dim });
    }
    let u_frame = z_aligning_unitary(orthogonal_direction(&inst.rho1, &inst.rho2))?;
    let v_frame = z_aligning_unitary(orthogonal_direction(&inst.tau1, &inst.tau2))?;
    let r = plane_rows(&u_frame, &inst.rho1, &inst.rho2);
    let s = plane_rows(&v_frame, &inst.tau1, &inst.tau2);

    let det_r = det_real(&r);
    let r_inv = [[r[1][1] / det_r, -r[0][1] / det_r], [-r[1][0] / det_r, r[0][0] / det_r]];
    let map = mat_mul(&r_inv, &s);

    let (theta, a, b, phi) = rotation_svd(&map);
    let u = u_frame * rotation_conjugator(theta);
    let v = v_frame * rotation_conjugator(phi);
    let r_rot = plane_rows(&u, &inst.rho1, &inst.rho2);
    let s_rot = plane_rows(&v, &inst.tau1, &inst.tau2);

    Ok(CanonicalForm { u_frame, v_frame, u, v, r, s, map, theta, phi, r_rot, s_rot, a, b })
}
