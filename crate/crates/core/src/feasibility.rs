//! Closed-form feasibility decisions for pairs of qubit states.
//!
//! Three tests live here:
//!
//! * [`decide_alberti_uhlmann`]: `‖ρ₁ − tρ₂‖₁ ≥ ‖τ₁ − tτ₂‖₁` for all `t ≥ 0`,
//!   the condition for *some* channel.
//! * [`decide_unital`]: existence of a *unital* channel, as three
//!   inequalities on determinants and adjugate traces.
//! * [`decide_degenerate`]: the same question when `span{𝟙, ρ₁, ρ₂}` has
//!   dimension 1 or 2.
//!
//! All of them reduce to sign conditions on quadratics in `t`, through
//! `det(ρ₁ − tρ₂) = det ρ₁ − t·tr(ρ₁# ρ₂) + t²·det ρ₂`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat2::{CMat2, DensityMatrix, Herm2};

/// Absolute tolerance on every inequality.
pub const TOL_INEQ: f64 = 1e-12;
/// Singular value cutoff for the rank of the Bloch coefficient matrix.
pub const TOL_RANK: f64 = 1e-10;
/// Tolerance on matrix equalities in the degenerate path.
pub const TOL_EQ: f64 = 1e-10;

pub const DET1: &str = "det(tau1) >= det(rho1)";
pub const DET2: &str = "det(tau2) >= det(rho2)";
pub const DISCRIMINANT: &str = "4*(det(tau1)-det(rho1))*(det(tau2)-det(rho2)) >= (tr(rho1# rho2)-tr(tau1# tau2))^2";
pub const AU_SLACK: &str = "min_t max(det(tau(t)), det(tau(t))-det(rho(t)))";
pub const MAXIMALLY_MIXED_1: &str = "tau1 = 1/2";
pub const MAXIMALLY_MIXED_2: &str = "tau2 = 1/2";
pub const LINEAR_CONSISTENCY: &str = "output pair follows the input linear relation";
pub const SINGLE_MAJORIZATION: &str = "det(tau_base) >= det(rho_base)";

/// The quadruple `(ρ₁, ρ₂, τ₁, τ₂)`: find a channel with `T(ρⱼ) = τⱼ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemInstance {
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
    pub tau1: DensityMatrix,
    pub tau2: DensityMatrix,
}

impl ProblemInstance {
    pub fn new(
        rho1: DensityMatrix,
        rho2: DensityMatrix,
        tau1: DensityMatrix,
        tau2: DensityMatrix,
    ) -> Self {
        ProblemInstance { rho1, rho2, tau1, tau2 }
    }

    pub fn from_cmats(rho1: CMat2, rho2: CMat2, tau1: CMat2, tau2: CMat2) -> Result<Self> {
        use crate::qmat2::density_from_cmat as d;
        Ok(ProblemInstance::new(d(rho1)?, d(rho2)?, d(tau1)?, d(tau2)?))
    }

    /// Instance whose outputs equal its inputs.
    pub fn identity(rho1: DensityMatrix, rho2: DensityMatrix) -> Self {
        ProblemInstance::new(rho1, rho2, rho1, rho2)
    }

    /// Exchanges the roles of the first and second state on both sides.
    pub fn swapped(&self) -> Self {
        ProblemInstance::new(self.rho2, self.rho1, self.tau2, self.tau1)
    }

    /// Conjugates inputs by `u` and outputs by `v` (`X ↦ U†XU`).
    pub fn conjugated(&self, u: &CMat2, v: &CMat2) -> Result<Self> {
        let c = |w: &CMat2, d: &DensityMatrix| {
            crate::qmat2::conjugate(w, d.as_cmat()).and_then(|m| DensityMatrix::new(m.hermitian_part()))
        };
        Ok(ProblemInstance::new(
            c(u, &self.rho1)?,
            c(u, &self.rho2)?,
            c(v, &self.tau1)?,
            c(v, &self.tau2)?,
        ))
    }

    pub fn inputs(&self) -> [&DensityMatrix; 2] {
        [&self.rho1, &self.rho2]
    }

    pub fn outputs(&self) -> [&DensityMatrix; 2] {
        [&self.tau1, &self.tau2]
    }

    /// `ρ₁ − tρ₂`
    pub fn input_pencil(&self, t: f64) -> Herm2 {
        *self.rho1.herm() - *self.rho2.herm() * t
    }

    /// `τ₁ − tτ₂`
    pub fn output_pencil(&self, t: f64) -> Herm2 {
        *self.tau1.herm() - *self.tau2.herm() * t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    Infeasible,
}

/// Which question a [`Decision`] answers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    AlbertiUhlmann,
    Unital,
    Degenerate,
}

/// Evidence for an infeasible verdict.
///
/// `ViolatedInequality` means the requirement `lhs ≥ rhs` fails.
/// `ViolatingParameter` means the input-side norm `lhs_norm` is strictly
/// smaller than the output-side norm `rhs_norm` at `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    ViolatedInequality { name: String, lhs: f64, rhs: f64 },
    ViolatingParameter { t: f64, lhs_norm: f64, rhs_norm: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub name: String,
    pub slack: f64,
}

impl Margin {
    fn new(name: &str, slack: f64) -> Self {
        Margin { name: name.to_string(), slack }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub criterion: Criterion,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub margins: Vec<Margin>,
    /// Dimension of `span{𝟙, ρ₁, ρ₂}`.
    pub dim: usize,
}

impl Decision {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }

    pub fn min_slack(&self) -> f64 {
        self.margins.iter().map(|m| m.slack).fold(f64::INFINITY, f64::min)
    }

    pub fn slack(&self, name: &str) -> Option<f64> {
        self.margins.iter().find(|m| m.name == name).map(|m| m.slack)
    }

    /// Recomputes the witness from `inst` and checks that it is a genuine
    /// violation matching the stored numbers within `1e-10` (relative for
    /// large norms). Feasible decisions confirm iff they carry no witness.
    pub fn witness_confirms(&self, inst: &ProblemInstance) -> bool {
        match (&self.verdict, &self.witness) {
            (Verdict::Feasible, None) => true,
            (Verdict::Infeasible, Some(Witness::ViolatedInequality { name, lhs, rhs })) => {
                match evaluate_inequality(name, inst) {
                    Some((l, r)) => {
                        (l - lhs).abs() <= 1e-10 && (r - rhs).abs() <= 1e-10 && l < r
                    }
                    None => false,
                }
            }
            (
                Verdict::Infeasible,
                Some(Witness::ViolatingParameter { t, lhs_norm, rhs_norm }),
            ) => {
                let (l, r) = match self.criterion {
                    Criterion::AlbertiUhlmann => au_norms(inst, *t),
                    Criterion::Unital => unital_norms(inst, *t),
                    Criterion::Degenerate => return false,
                };
                let scale = 1.0f64.max(r.abs());
                (l - lhs_norm).abs() <= 1e-10 * scale
                    && (r - rhs_norm).abs() <= 1e-10 * scale
                    && l < r
            }
            _ => false,
        }
    }
}

/// `(‖ρ₁ − tρ₂‖₁, ‖τ₁ − tτ₂‖₁)`.
pub fn au_norms(inst: &ProblemInstance, t: f64) -> (f64, f64) {
    (inst.input_pencil(t).trace_norm(), inst.output_pencil(t).trace_norm())
}

/// Trace norms of the traceless parts of `ρ₁ − tρ₂` and `τ₁ − tτ₂`.
///
/// Both pencils have trace `1 − t`, so this is the trace-norm inequality
/// with `α = −(1−t)/2, β = 1, γ = −t`; it fails exactly where
/// `τ₁ − tτ₂ ≺ ρ₁ − tρ₂` fails.
pub fn unital_norms(inst: &ProblemInstance, t: f64) -> (f64, f64) {
    let shift = Herm2::identity() * (0.5 * (1.0 - t));
    (
        (inst.input_pencil(t) - shift).trace_norm(),
        (inst.output_pencil(t) - shift).trace_norm(),
    )
}

/// Coefficients of `a2·t² + a1·t + a0` with
/// `a2 = det τ₂ − det ρ₂`, `a1 = −(tr(ρ₁#ρ₂) − tr(τ₁#τ₂))`, `a0 = det τ₁ − det ρ₁`.
///
/// This polynomial equals `det(τ₁ + tτ₂) − det(ρ₁ + tρ₂)`; the majorization
/// pencil `det(τ₁ − tτ₂) − det(ρ₁ − tρ₂)` is the same polynomial at `−t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolaCoeffs {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl ParabolaCoeffs {
    pub fn eval(&self, t: f64) -> f64 {
        (self.a2 * t + self.a1) * t + self.a0
    }

    /// `4·a0·a2 − a1²`, nonnegative iff the discriminant condition holds.
    pub fn discriminant_slack(&self) -> f64 {
        4.0 * self.a0 * self.a2 - self.a1 * self.a1
    }

    /// `det(τ₁ − tτ₂) − det(ρ₁ − tρ₂)`.
    pub fn eval_pencil(&self, t: f64) -> f64 {
        self.eval(-t)
    }
}

pub fn parabola_coeffs(inst: &ProblemInstance) -> ParabolaCoeffs {
    ParabolaCoeffs {
        a2: inst.tau2.det() - inst.rho2.det(),
        a1: -(inst.rho1.adjugate_trace(&inst.rho2) - inst.tau1.adjugate_trace(&inst.tau2)),
        a0: inst.tau1.det() - inst.rho1.det(),
    }
}

/// `dim span{𝟙, ρ₁, ρ₂}` from the singular values of the 2×3 matrix of
/// Bloch vectors.
///
/// The singular values come from `σ₁σ₂ = |b₁ × b₂|` and
/// `σ₁² + σ₂² = |b₁|² + |b₂|²`, which keeps the small one accurate.
pub fn dim_operator_system(rho1: &DensityMatrix, rho2: &DensityMatrix) -> usize {
    let (s_max, s_min) = bloch_singular_values(rho1, rho2);
    if s_max <= TOL_RANK {
        1
    } else if s_min <= TOL_RANK {
        2
    } else {
        3
    }
}

fn bloch_singular_values(rho1: &Herm2, rho2: &Herm2) -> (f64, f64) {
    let b1 = rho1.bloch();
    let b2 = rho2.bloch();
    let sum = b1.dot(b1) + b2.dot(b2);
    let prod = b1.cross(b2).norm();
    let disc = (sum * sum - 4.0 * prod * prod).max(0.0).sqrt();
    let s_max = (0.5 * (sum + disc)).sqrt();
    let s_min = if s_max > 0.0 { prod / s_max } else { 0.0 };
    (s_max, s_min)
}

/// Real roots of `a·t² + b·t + c`, ascending. An identically zero
/// polynomial has no isolated roots and yields none.
pub(crate) fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a.abs() <= 1e-15 * scale {
        return if b != 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = if q == 0.0 {
        vec![0.0]
    } else {
        vec![q / a, c / q]
    };
    roots.sort_by(f64::total_cmp);
    roots
}

/// Exact decision of `‖ρ₁ − tρ₂‖₁ ≥ ‖τ₁ − tτ₂‖₁` for all `t ≥ 0`.
///
/// For a 2×2 Hermitian `M` with trace `s`, `‖M‖₁² = s² − 2 det M + 2|det M|`.
/// Both pencils have trace `1 − t`, so the squared norms differ only through
/// `f(d) = −4·min(d, 0)`, and the inequality at `t` reads
/// `min(det ρ(t), 0) ≤ min(det τ(t), 0)`. With `h(t) = det τ(t)` and
/// `g(t) = det τ(t) − det ρ(t)` that is `max(h(t), g(t)) ≥ 0`:
/// when `h ≥ 0` it holds outright, and when `h < 0` it needs `g ≥ 0`.
///
/// `max(h, g)` is the upper envelope of two quadratics, so its infimum over
/// `[0, ∞)` is attained at `t = 0`, at a vertex of `h` or `g`, at a crossing
/// `h = g` (a root of `det ρ(t)`), or in the tail beyond every root of `h`
/// and `g` where both signs are constant. Evaluating on that finite set is
/// exact.
pub fn decide_alberti_uhlmann(inst: &ProblemInstance) -> Decision {
    let r2 = inst.rho2.det();
    let r1 = -inst.rho1.adjugate_trace(&inst.rho2);
    let r0 = inst.rho1.det();
    let h2 = inst.tau2.det();
    let h1 = -inst.tau1.adjugate_trace(&inst.tau2);
    let h0 = inst.tau1.det();
    let (g2, g1, g0) = (h2 - r2, h1 - r1, h0 - r0);

    let h = |t: f64| (h2 * t + h1) * t + h0;
    let g = |t: f64| (g2 * t + g1) * t + g0;
    let envelope = |t: f64| h(t).max(g(t));

    let mut candidates = vec![0.0];
    for (a, b) in [(h2, h1), (g2, g1)] {
        if a > 0.0 {
            candidates.push(-b / (2.0 * a));
        }
    }
    candidates.extend(quadratic_roots(r2, r1, r0));
    let mut all_roots = quadratic_roots(h2, h1, h0);
    all_roots.extend(quadratic_roots(g2, g1, g0));
    let last = all_roots.iter().copied().fold(0.0f64, f64::max);
    candidates.push(last + 1.0);
    candidates.retain(|t| t.is_finite() && *t >= 0.0);

    let (t_worst, worst) = candidates
        .iter()
        .map(|&t| (t, envelope(t)))
        .fold((0.0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });

    let dim = dim_operator_system(&inst.rho1, &inst.rho2);
    let margins = vec![Margin::new(AU_SLACK, worst)];
    if worst >= -TOL_INEQ {
        return Decision {
            criterion: Criterion::AlbertiUhlmann,
            verdict: Verdict::Feasible,
            witness: None,
            margins,
            dim,
        };
    }
    let (lhs_norm, rhs_norm) = au_norms(inst, t_worst);
    Decision {
        criterion: Criterion::AlbertiUhlmann,
        verdict: Verdict::Infeasible,
        witness: Some(Witness::ViolatingParameter { t: t_worst, lhs_norm, rhs_norm }),
        margins,
        dim,
    }
}

/// Existence of a unital channel with `T(ρⱼ) = τⱼ`.
///
/// For `dim span{𝟙, ρ₁, ρ₂} = 3`: feasible iff `a0 ≥ 0`, `a2 ≥ 0` and
/// `a1² ≤ 4·a0·a2` (each within [`TOL_INEQ`]). Lower dimensions go through
/// [`decide_degenerate`].
pub fn decide_unital(inst: &ProblemInstance) -> Decision {
    let dim = dim_operator_system(&inst.rho1, &inst.rho2);
    if dim < 3 {
        return decide_degenerate(inst, dim).expect("dimension computed from the same instance");
    }
    decide_unital_dim3(inst, dim)
}

fn decide_unital_dim3(inst: &ProblemInstance, dim: usize) -> Decision {
    let p = parabola_coeffs(inst);
    let disc = p.discriminant_slack();
    let margins = vec![
        Margin::new(DET1, p.a0),
        Margin::new(DET2, p.a2),
        Margin::new(DISCRIMINANT, disc),
    ];
    let witness = if p.a0 < -TOL_INEQ {
        Some(Witness::ViolatedInequality {
            name: DET1.into(),
            lhs: inst.tau1.det(),
            rhs: inst.rho1.det(),
        })
    } else if p.a2 < -TOL_INEQ {
        Some(Witness::ViolatedInequality {
            name: DET2.into(),
            lhs: inst.tau2.det(),
            rhs: inst.rho2.det(),
        })
    } else if disc < -TOL_INEQ {
        let t = discriminant_witness_t(&p);
        let (lhs_norm, rhs_norm) = unital_norms(inst, t);
        if lhs_norm < rhs_norm {
            Some(Witness::ViolatingParameter { t, lhs_norm, rhs_norm })
        } else {
            // Violation too shallow to show up in the norms at double
            // precision; fall back to the inequality itself.
            Some(Witness::ViolatedInequality {
                name: DISCRIMINANT.into(),
                lhs: 4.0 * p.a0 * p.a2,
                rhs: p.a1 * p.a1,
            })
        }
    } else {
        None
    };
    Decision {
        criterion: Criterion::Unital,
        verdict: if witness.is_some() { Verdict::Infeasible } else { Verdict::Feasible },
        witness,
        margins,
        dim,
    }
}

/// Picks `t` minimising `(det τ(t) − det ρ(t)) / (1 + t²)` among the vertex
/// of the pencil parabola and a few points along its linear part.
fn discriminant_witness_t(p: &ParabolaCoeffs) -> f64 {
    let mut candidates = Vec::new();
    if p.a2 > 0.0 {
        // pencil(t) = a2 t² − a1 t + a0
        candidates.push(p.a1 / (2.0 * p.a2));
    }
    if p.a1 != 0.0 {
        candidates.push(2.0 * p.a0 / p.a1);
        candidates.push(p.a0 / p.a1);
        candidates.push(p.a1.signum());
    }
    candidates
        .into_iter()
        .filter(|t| t.is_finite())
        .map(|t| (t, p.eval_pencil(t) / (1.0 + t * t)))
        .fold((0.0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc })
        .0
}

/// `A ≺ B` for equal-trace Hermitian 2×2 matrices, i.e. `det A ≥ det B`.
pub fn matrix_majorization_2x2(a: &Herm2, b: &Herm2) -> Result<bool> {
    let (ta, tb) = (a.trace(), b.trace());
    if (ta - tb).abs() > crate::qmat2::TOL_TP {
        return Err(Error::TraceMismatch { lhs: ta, rhs: tb });
    }
    Ok(a.det() >= b.det() - TOL_INEQ)
}

/// Decision for `dim span{𝟙, ρ₁, ρ₂} ∈ {1, 2}`.
///
/// * dim 1 (`ρ₁ = ρ₂ = 𝟙/2`): unital maps fix `𝟙/2`, so both outputs must be `𝟙/2`.
/// * dim 2: the input with the longer Bloch vector is the base, the other is
///   `λ𝟙 + μ·base`. Feasible iff the outputs obey the same relation and the
///   base output is majorized by the base input.
pub fn decide_degenerate(inst: &ProblemInstance, dim: usize) -> Result<Decision> {
    let found = dim_operator_system(&inst.rho1, &inst.rho2);
    if found != dim || dim > 2 {
        return Err(Error::DimensionMismatch { expected: dim, found });
    }
    let mut margins = Vec::new();
    let mut witness = None;
    for (name, lhs, rhs) in degenerate_inequalities(inst, dim) {
        margins.push(Margin::new(name, lhs - rhs));
        let tol = if name == SINGLE_MAJORIZATION { TOL_INEQ } else { 0.0 };
        if witness.is_none() && lhs < rhs - tol {
            witness = Some(Witness::ViolatedInequality { name: name.into(), lhs, rhs });
        }
    }
    Ok(Decision {
        criterion: Criterion::Degenerate,
        verdict: if witness.is_some() { Verdict::Infeasible } else { Verdict::Feasible },
        witness,
        margins,
        dim,
    })
}

/// Linear relation of the dim-2 input pair: `(base index, λ, μ)` with
/// `ρ_other = λ𝟙 + μ·ρ_base`.
pub fn degenerate_relation(inst: &ProblemInstance) -> (usize, f64, f64) {
    let b1 = inst.rho1.bloch();
    let b2 = inst.rho2.bloch();
    let (base, bb, bo) = if b1.norm() >= b2.norm() { (0, b1, b2) } else { (1, b2, b1) };
    let mu = bb.dot(bo) / bb.dot(bb);
    (base, 0.5 * (1.0 - mu), mu)
}

/// Each requirement as `(name, lhs, rhs)` meaning `lhs ≥ rhs`.
fn degenerate_inequalities(inst: &ProblemInstance, dim: usize) -> Vec<(&'static str, f64, f64)> {
    let half = Herm2::maximally_mixed();
    if dim == 1 {
        return vec![
            (MAXIMALLY_MIXED_1, -inst.tau1.max_abs_diff(&half), -TOL_EQ),
            (MAXIMALLY_MIXED_2, -inst.tau2.max_abs_diff(&half), -TOL_EQ),
        ];
    }
    let (base, lambda, mu) = degenerate_relation(inst);
    let (rho_b, tau_b, tau_o) = if base == 0 {
        (inst.rho1, inst.tau1, inst.tau2)
    } else {
        (inst.rho2, inst.tau2, inst.tau1)
    };
    let predicted = Herm2::identity() * lambda + *tau_b.herm() * mu;
    vec![
        (LINEAR_CONSISTENCY, -predicted.max_abs_diff(&tau_o), -TOL_EQ),
        (SINGLE_MAJORIZATION, tau_b.det(), rho_b.det()),
    ]
}

/// Recomputes a named inequality directly from the instance.
fn evaluate_inequality(name: &str, inst: &ProblemInstance) -> Option<(f64, f64)> {
    match name {
        DET1 => Some((inst.tau1.det(), inst.rho1.det())),
        DET2 => Some((inst.tau2.det(), inst.rho2.det())),
        DISCRIMINANT => {
            // Direct pencil evaluation at t = −1, 0, 1 instead of adjugates.
            let g = |t: f64| inst.output_pencil(t).det() - inst.input_pencil(t).det();
            let (gm, g0, gp) = (g(-1.0), g(0.0), g(1.0));
            let a2 = 0.5 * (gp + gm) - g0;
            let lin = 0.5 * (gp - gm);
            Some((4.0 * g0 * a2, lin * lin))
        }
        _ => {
            let dim = dim_operator_system(&inst.rho1, &inst.rho2);
            if dim > 2 {
                return None;
            }
            degenerate_inequalities(inst, dim)
                .into_iter()
                .find(|(n, _, _)| *n == name)
                .map(|(_, l, r)| (l, r))
        }
    }
}
