//! Explicit unital channels: construction, Choi matrices, verification.
//!
//! A feasible dim-3 instance is canonicalized to a Pauli diagonal map
//! `(a, b)` on `span{𝟙, σx, σy}`. Any `c` with `|a+b| − 1 ≤ c ≤ 1 − |a−b|`
//! extends it to a CPTP Pauli channel `S`, and `T(X) = V·S(U†XU)·V†` is the
//! witnessing channel.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::canonical::{canonicalize, z_aligning_unitary, PauliDiagonalParams};
use crate::error::{Error, Result};
use crate::feasibility::{decide_unital, degenerate_relation, ProblemInstance};
use crate::qmat2::{CMat2, Herm2, C64};

/// Default verification tolerance.
pub const TOL_VERIFY: f64 = 1e-9;
/// Pauli weights above `-TOL_PAULI` are accepted (and clamped to zero).
pub const TOL_PAULI: f64 = 1e-12;
/// Choi eigenvalues below this are dropped when extracting Kraus operators.
const KRAUS_CUTOFF: f64 = 1e-14;
/// Most negative Choi eigenvalue accepted by [`Channel::from_choi`].
const TOL_CP: f64 = 1e-10;

pub type Choi = Matrix4<C64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Synthesized,
    PauliDiagonal,
    ExampleMap,
    Example1,
    User,
}

/// A channel in Kraus form, `T(X) = Σ Kᵢ X Kᵢ†`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub kraus: Vec<CMat2>,
    pub provenance: Provenance,
}

impl Channel {
    pub fn new(kraus: Vec<CMat2>, provenance: Provenance) -> Self {
        Channel { kraus, provenance }
    }

    pub fn identity() -> Self {
        Channel::new(vec![CMat2::identity()], Provenance::User)
    }

    /// Unitary channel `X ↦ W X W†`.
    pub fn unitary(w: CMat2) -> Self {
        Channel::new(vec![w], Provenance::User)
    }

    pub fn apply(&self, x: &CMat2) -> CMat2 {
        self.kraus
            .iter()
            .fold(CMat2::zero(), |acc, k| acc + *k * *x * k.dagger())
    }

    pub fn apply_herm(&self, h: &Herm2) -> Herm2 {
        self.apply(h.as_cmat()).hermitian_part()
    }

    /// `X ↦ W·T(X)·W†` followed after this channel, i.e. new Kraus `W·Kᵢ`.
    pub fn then_unitary(&self, w: &CMat2) -> Channel {
        Channel::new(self.kraus.iter().map(|k| *w * *k).collect(), self.provenance)
    }

    pub fn choi(&self) -> Choi {
        choi_of_map(|x| self.apply(x))
    }

    /// `‖Σ Kᵢ†Kᵢ − 𝟙‖₁`
    pub fn tp_residual(&self) -> f64 {
        let s = self.kraus.iter().fold(CMat2::zero(), |acc, k| acc + k.dagger() * *k);
        trace_norm_general(&(s - CMat2::identity()))
    }

    /// `‖Σ KᵢKᵢ† − 𝟙‖₁ = ‖T(𝟙) − 𝟙‖₁`
    pub fn unital_residual(&self) -> f64 {
        let s = self.kraus.iter().fold(CMat2::zero(), |acc, k| acc + *k * k.dagger());
        trace_norm_general(&(s - CMat2::identity()))
    }

    /// Kraus operators from the spectral decomposition of a Choi matrix.
    ///
    /// Column-stacking convention: eigenvector entry `v[2i + a]` is
    /// `Kₐᵢ / sqrt(λ)`.
    pub fn from_choi(choi: &Choi, provenance: Provenance) -> Result<Channel> {
        let herm = hermitian_part4(choi);
        let skew = (choi - herm).norm();
        if skew > TOL_CP {
            return Err(Error::NotCptp {
                reason: format!("Choi matrix is not Hermitian (residual {skew:e})"),
            });
        }
        let eig = herm.symmetric_eigen();
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -TOL_CP {
            return Err(Error::NotCptp {
                reason: format!("Choi matrix has eigenvalue {min:e}"),
            });
        }
        let mut kraus = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= KRAUS_CUTOFF {
                continue;
            }
            let v = eig.eigenvectors.column(k);
            let sq = lambda.sqrt();
            let mut m = CMat2::zero();
            for i in 0..2 {
                for a in 0..2 {
                    m.0[a][i] = v[2 * i + a] * sq;
                }
            }
            kraus.push(m);
        }
        Ok(Channel::new(kraus, provenance))
    }
}

/// Trace norm of an arbitrary 2×2 matrix, `sqrt(tr(A†A) + 2|det A|)`.
pub fn trace_norm_general(m: &CMat2) -> f64 {
    let f = m.frobenius();
    (f * f + 2.0 * m.det().norm()).sqrt()
}

fn hermitian_part4(c: &Choi) -> Choi {
    (c + c.adjoint()) * C64::new(0.5, 0.0)
}

/// `C = Σᵢⱼ Eᵢⱼ ⊗ T(Eᵢⱼ)` for any linear map `T`.
pub fn choi_of_map(map: impl Fn(&CMat2) -> CMat2) -> Choi {
    let mut c = Choi::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let img = map(&CMat2::unit(i, j));
            for a in 0..2 {
                for b in 0..2 {
                    c[(2 * i + a, 2 * j + b)] = img.get(a, b);
                }
            }
        }
    }
    c
}

/// Smallest eigenvalue of the Hermitian part of a Choi matrix.
pub fn choi_min_eigenvalue(c: &Choi) -> f64 {
    hermitian_part4(c)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn choi_eigenvalues(c: &Choi) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part4(c).symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `‖Tr_out C − 𝟙‖₁`; zero iff the map preserves traces.
pub fn choi_tp_residual(c: &Choi) -> f64 {
    let mut m = CMat2::zero();
    for i in 0..2 {
        for j in 0..2 {
            m.0[i][j] = c[(2 * i, 2 * j)] + c[(2 * i + 1, 2 * j + 1)];
        }
    }
    trace_norm_general(&(m - CMat2::identity()))
}

/// `‖Tr_in C − 𝟙‖₁ = ‖T(𝟙) − 𝟙‖₁`.
pub fn choi_unital_residual(c: &Choi) -> f64 {
    let mut m = CMat2::zero();
    for a in 0..2 {
        for b in 0..2 {
            m.0[a][b] = c[(a, b)] + c[(2 + a, 2 + b)];
        }
    }
    trace_norm_general(&(m - CMat2::identity()))
}

/// Closed interval of admissible `c` values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CInterval {
    pub lo: f64,
    pub hi: f64,
}

impl CInterval {
    pub fn contains(&self, c: f64) -> bool {
        self.lo <= c && c <= self.hi
    }
}

/// `[|a+b| − 1, 1 − |a−b|]`, or `None` when empty (`max(|a|, |b|) > 1`).
pub fn fujiwara_algoet_interval(a: f64, b: f64) -> Option<CInterval> {
    let lo = (a + b).abs() - 1.0;
    let hi = 1.0 - (a - b).abs();
    (lo <= hi).then_some(CInterval { lo, hi })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CPolicy {
    #[default]
    Midpoint,
    /// `0` when admissible, otherwise the midpoint.
    ZeroIfContained,
    Min,
    Max,
}

pub fn choose_c(interval: CInterval, policy: CPolicy) -> f64 {
    let mid = 0.5 * (interval.lo + interval.hi);
    match policy {
        CPolicy::Midpoint => mid,
        CPolicy::ZeroIfContained => {
            if interval.contains(0.0) {
                0.0
            } else {
                mid
            }
        }
        CPolicy::Min => interval.lo,
        CPolicy::Max => interval.hi,
    }
}

/// Pauli weights `(p₀, p₁, p₂, p₃)` for `(𝟙, σx, σy, σz)`.
pub fn pauli_weights(a: f64, b: f64, c: f64) -> [f64; 4] {
    [
        (1.0 + a + b + c) / 4.0,
        (1.0 + a - b - c) / 4.0,
        (1.0 - a + b - c) / 4.0,
        (1.0 - a - b + c) / 4.0,
    ]
}

/// `X ↦ Σ pₖ σₖ X σₖ` with eigenvalues `(a, b, c)` on `(σx, σy, σz)`.
pub fn pauli_channel(a: f64, b: f64, c: f64) -> Result<Channel> {
    let p = pauli_weights(a, b, c);
    if let Some(bad) = p.iter().find(|&&w| w < -TOL_PAULI) {
        return Err(Error::NotCptp {
            reason: format!("Pauli weight {bad:e} for (a, b, c) = ({a}, {b}, {c})"),
        });
    }
    let paulis = [CMat2::identity(), CMat2::pauli_x(), CMat2::pauli_y(), CMat2::pauli_z()];
    let kraus = paulis
        .iter()
        .zip(p)
        .filter(|(_, w)| *w > 0.0)
        .map(|(s, w)| *s * w.sqrt())
        .collect();
    Ok(Channel::new(kraus, Provenance::PauliDiagonal))
}

/// Choi matrix of `X ↦ ½(tr X·𝟙 + a·tr(σx X)σx + b·tr(σy X)σy + c·tr(σz X)σz)`,
/// built from the Bloch action rather than the weights; defined for every
/// `(a, b, c)`.
pub fn pauli_diagonal_choi(a: f64, b: f64, c: f64) -> Choi {
    let paulis = [CMat2::pauli_x(), CMat2::pauli_y(), CMat2::pauli_z()];
    choi_of_map(|x| {
        let mut out = CMat2::identity() * (x.trace() * 0.5);
        for (s, k) in paulis.iter().zip([a, b, c]) {
            out = out + *s * ((*s * *x).trace() * (0.5 * k));
        }
        out
    })
}

/// What [`synthesize_detailed`] built, for reporting.
#[derive(Clone, Debug, PartialEq)]
pub struct Synthesis {
    pub channel: Channel,
    /// Pauli diagonal parameters of the core map (dim-3 path only).
    pub params: Option<PauliDiagonalParams>,
    pub interval: Option<CInterval>,
    pub dim: usize,
}

pub fn synthesize(inst: &ProblemInstance, policy: CPolicy) -> Result<Channel> {
    synthesize_detailed(inst, policy).map(|s| s.channel)
}

pub fn synthesize_detailed(inst: &ProblemInstance, policy: CPolicy) -> Result<Synthesis> {
    let decision = decide_unital(inst);
    if !decision.is_feasible() {
        return Err(Error::InfeasibleInstance(Box::new(decision)));
    }
    match decision.dim {
        1 => Ok(Synthesis {
            channel: Channel::new(pauli_channel(0.0, 0.0, 0.0)?.kraus, Provenance::Synthesized),
            params: None,
            interval: None,
            dim: 1,
        }),
        2 => Ok(Synthesis {
            channel: single_state_channel(inst)?,
            params: None,
            interval: None,
            dim: 2,
        }),
        _ => {
            let cf = canonicalize(inst)?;
            // The decision admits max(|a|, |b|) up to rounding above 1.
            let a = cf.a.clamp(-1.0, 1.0);
            let b = cf.b.clamp(-1.0, 1.0);
            // At a tetrahedron edge the two ends may cross by rounding.
            let interval = fujiwara_algoet_interval(a, b).unwrap_or_else(|| {
                let m = 0.5 * ((a + b).abs() - 1.0 + 1.0 - (a - b).abs());
                CInterval { lo: m, hi: m }
            });
            let c = choose_c(interval, policy);
            let core = pauli_channel(a, b, c)?;
            let u_dag = cf.u.dagger();
            let kraus = core.kraus.iter().map(|l| cf.v * *l * u_dag).collect();
            Ok(Synthesis {
                channel: Channel::new(kraus, Provenance::Synthesized),
                params: Some(PauliDiagonalParams::new(a, b, c)),
                interval: Some(interval),
                dim: 3,
            })
        }
    }
}

/// Unital channel sending the dim-2 base input to its output: shrink the
/// Bloch vector by `|s|/|r|` with a depolarizing channel, then rotate `r̂`
/// onto `ŝ`. The other input follows by linearity.
fn single_state_channel(inst: &ProblemInstance) -> Result<Channel> {
    let (base, _, _) = degenerate_relation(inst);
    let (rho, tau) = if base == 0 { (inst.rho1, inst.tau1) } else { (inst.rho2, inst.tau2) };
    let r = rho.bloch();
    let s = tau.bloch();
    let (rn, sn) = (r.norm(), s.norm());
    let q = (sn / rn).min(1.0);
    let shrink = pauli_channel(q, q, q)?;
    if sn <= 1e-15 {
        return Ok(Channel::new(shrink.kraus, Provenance::Synthesized));
    }
    let ur = z_aligning_unitary(r.scale(1.0 / rn))?;
    let us = z_aligning_unitary(s.scale(1.0 / sn))?;
    let w = us * ur.dagger();
    Ok(Channel::new(shrink.then_unitary(&w).kraus, Provenance::Synthesized))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tp_residual: f64,
    pub unital_residual: f64,
    pub choi_min_eig: f64,
    /// `‖T(ρⱼ) − τⱼ‖₁` for `j = 1, 2`.
    pub mapping_residuals: [f64; 2],
    pub tol: f64,
    pub passed: bool,
}

pub fn verify_channel(ch: &Channel, inst: &ProblemInstance, tol: f64) -> VerificationReport {
    let tp_residual = ch.tp_residual();
    let unital_residual = ch.unital_residual();
    let choi_min_eig = choi_min_eigenvalue(&ch.choi());
    let mapping = |rho: &Herm2, tau: &Herm2| (ch.apply_herm(rho) - *tau).trace_norm();
    let mapping_residuals = [mapping(&inst.rho1, &inst.tau1), mapping(&inst.rho2, &inst.tau2)];
    let passed = tp_residual <= tol
        && unital_residual <= tol
        && choi_min_eig >= -tol
        && mapping_residuals.iter().all(|r| *r <= tol);
    VerificationReport { tp_residual, unital_residual, choi_min_eig, mapping_residuals, tol, passed }
}
