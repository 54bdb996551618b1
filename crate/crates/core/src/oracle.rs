//! Brute-force cross-checks and reference fixtures.
//!
//! The grid oracles sample the quantifiers of the trace-norm and
//! majorization characterizations. They are one-sided: a reported violation
//! is a certificate, while `holds == true` only means "consistent with
//! feasibility on this grid".

use nalgebra::{DMatrix, SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{decide_unital, matrix_majorization_2x2, parabola_coeffs, ProblemInstance};
use crate::qmat2::{density_from_cmat, BlochVector, CMat2, DensityMatrix, Herm2, C64};
use crate::synth::{choi_of_map, Channel, Choi, Provenance};

/// Slack allowed before a grid point counts as a violation.
pub const TOL_GRID: f64 = 1e-9;
/// Success threshold of [`random_channel_search`].
pub const SEARCH_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub count: usize,
    pub bound: f64,
    pub includes_endpoints: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { count: 201, bound: 20.0, includes_endpoints: true }
    }
}

impl GridSpec {
    pub fn new(count: usize, bound: f64) -> Result<Self> {
        if count < 3 {
            return Err(Error::OutOfRange { name: "grid count", value: count as f64 });
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::OutOfRange { name: "grid bound", value: bound });
        }
        Ok(GridSpec { count, bound, includes_endpoints: true })
    }

    /// Evenly spaced points in `[−R, R]`; without endpoints, the cell midpoints.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        let r = self.bound;
        if self.includes_endpoints {
            (0..n).map(|i| -r + 2.0 * r * i as f64 / (n - 1) as f64).collect()
        } else {
            (0..n).map(|i| -r + 2.0 * r * (i as f64 + 0.5) / n as f64).collect()
        }
    }
}

/// Result of a grid check over `N` parameters.
///
/// `margin = ‖input combination‖₁ − ‖output combination‖₁`; the worst point
/// is the one with the smallest margin (first in grid order on ties).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridOutcome<const N: usize> {
    pub holds: bool,
    #[serde(with = "serde_arrays")]
    pub worst: [f64; N],
    pub worst_margin: f64,
}

mod serde_arrays {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(a: &[f64; N], s: S) -> Result<S::Ok, S::Error> {
        a.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[f64; N], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into().map_err(|_| serde::de::Error::custom("wrong array length"))
    }
}

/// Margin of `‖α𝟙 + βρ₁ + γρ₂‖₁ − ‖α𝟙 + βτ₁ + γτ₂‖₁`.
pub fn trace_norm_margin(inst: &ProblemInstance, alpha: f64, beta: f64, gamma: f64) -> f64 {
    let comb = |p: &Herm2, q: &Herm2| Herm2::identity() * alpha + *p * beta + *q * gamma;
    comb(&inst.rho1, &inst.rho2).trace_norm() - comb(&inst.tau1, &inst.tau2).trace_norm()
}

fn pick_worst<const N: usize>(a: (f64, [f64; N]), b: (f64, [f64; N])) -> (f64, [f64; N]) {
    // Ties keep the earlier grid point; rayon's reduce preserves order.
    if b.0 < a.0 {
        b
    } else {
        a
    }
}

fn outcome<const N: usize>((margin, point): (f64, [f64; N])) -> GridOutcome<N> {
    GridOutcome { holds: margin >= -TOL_GRID, worst: point, worst_margin: margin }
}

/// `‖𝟙/2 + βτ₁ + γτ₂‖₁ ≤ ‖𝟙/2 + βρ₁ + γρ₂‖₁` on a `(β, γ)` grid.
pub fn grid_condition_iv(inst: &ProblemInstance, grid: &GridSpec) -> GridOutcome<2> {
    let pts = grid.points();
    let worst = pts
        .par_iter()
        .map(|&beta| {
            pts.iter()
                .map(|&gamma| (trace_norm_margin(inst, 0.5, beta, gamma), [beta, gamma]))
                .fold((f64::INFINITY, [0.0; 2]), pick_worst)
        })
        .reduce(|| (f64::INFINITY, [0.0; 2]), pick_worst);
    outcome(worst)
}

/// `‖α𝟙 + βτ₁ + γτ₂‖₁ ≤ ‖α𝟙 + βρ₁ + γρ₂‖₁` on an `(α, β, γ)` grid.
pub fn grid_condition_iii(inst: &ProblemInstance, grid: &GridSpec) -> GridOutcome<3> {
    let pts = grid.points();
    let worst = pts
        .par_iter()
        .map(|&alpha| {
            let mut acc = (f64::INFINITY, [0.0; 3]);
            for &beta in &pts {
                for &gamma in &pts {
                    let m = trace_norm_margin(inst, alpha, beta, gamma);
                    acc = pick_worst(acc, (m, [alpha, beta, gamma]));
                }
            }
            acc
        })
        .reduce(|| (f64::INFINITY, [0.0; 3]), pick_worst);
    outcome(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub holds: bool,
    pub worst_t: f64,
    /// `det(τ₁ − tτ₂) − det(ρ₁ − tρ₂)` at `worst_t`.
    pub worst_slack: f64,
}

/// `τ₁ − tτ₂ ≺ ρ₁ − tρ₂` at every `t` of the grid, by the equal-trace
/// determinant criterion.
pub fn scan_condition_v(inst: &ProblemInstance, t_grid: &[f64]) -> ScanOutcome {
    let mut out = ScanOutcome { holds: true, worst_t: 0.0, worst_slack: f64::INFINITY };
    for &t in t_grid {
        let a = inst.output_pencil(t);
        let b = inst.input_pencil(t);
        let ok = matrix_majorization_2x2(&a, &b).expect("pencils share the trace 1 - t");
        let slack = a.det() - b.det();
        if slack < out.worst_slack {
            out.worst_slack = slack;
            out.worst_t = t;
        }
        out.holds &= ok;
    }
    out
}

/// Uniform `t` grid on `[−R, R]` plus the vertex of
/// `t ↦ det(τ₁ − tτ₂) − det(ρ₁ − tρ₂)` and a few far points.
///
/// The vertex is located from pencil determinants at `t = −1, 0, 1`, not
/// from adjugate traces.
pub fn vertex_covering_grid(inst: &ProblemInstance, count: usize, bound: f64) -> Vec<f64> {
    let g = |t: f64| inst.output_pencil(t).det() - inst.input_pencil(t).det();
    let (gm, g0, gp) = (g(-1.0), g(0.0), g(1.0));
    let curvature = 0.5 * (gp + gm) - g0;
    let slope = 0.5 * (gp - gm);
    let mut pts = GridSpec { count, bound, includes_endpoints: true }.points();
    if curvature != 0.0 {
        let v = -slope / (2.0 * curvature);
        if v.is_finite() {
            pts.push(v);
        }
    }
    for far in [1e2, 1e3, 1e4, 1e5] {
        pts.push(far);
        pts.push(-far);
    }
    pts.push(0.0);
    pts
}

/// Order-free check of `A ≺ B`: `‖𝟙 − tA‖₁ ≤ ‖𝟙 − tB‖₁` at every grid `t`.
pub fn ando_majorization_grid(a: &Herm2, b: &Herm2, t_grid: &[f64]) -> bool {
    t_grid.iter().all(|&t| {
        let lhs = (Herm2::identity() - *a * t).trace_norm();
        let rhs = (Herm2::identity() - *b * t).trace_norm();
        lhs <= rhs + TOL_GRID
    })
}

/// One-parameter family of instances related by [`example_map`] at
/// `p = κ = 1/2`:
/// `ρ₁ = [[c, (3i/4)w], [−(3i/4)w, 1−c]]`, `ρ₂ = [[0.2, 0.4], [0.4, 0.8]]`,
/// `τ₁ = [[(1+c)/2, (3i/8)w], [−(3i/8)w, (1−c)/2]]`, `τ₂ = [[0.6, 0.2], [0.2, 0.4]]`
/// with `w = sqrt(c(1−c))`.
pub fn example_family(c: f64) -> Result<ProblemInstance> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::OutOfRange { name: "c", value: c });
    }
    let w = (c * (1.0 - c)).sqrt();
    let rho1 = Herm2::from_parts(c, C64::new(0.0, 0.75 * w), 1.0 - c);
    let tau1 = Herm2::from_parts(0.5 * (1.0 + c), C64::new(0.0, 0.375 * w), 0.5 * (1.0 - c));
    let rho2 = CMat2::from_real([[0.2, 0.4], [0.4, 0.8]]);
    let tau2 = CMat2::from_real([[0.6, 0.2], [0.2, 0.4]]);
    ProblemInstance::from_cmats(rho1.into_cmat(), rho2, tau1.into_cmat(), tau2)
}

/// Bisection on `[lo, hi]` for the point where `pred` switches from true to
/// false; requires `pred(lo)` and `!pred(hi)`. Returns the last point where
/// `pred` held, within `tol` of the switch.
pub fn bisect(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> bool) -> Option<f64> {
    if !pred(lo) || pred(hi) {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Largest `c` for which [`example_family`] admits a unital channel.
pub fn family_threshold(tol: f64) -> f64 {
    let feasible = |c: f64| decide_unital(&example_family(c).expect("c in [0, 1]")).is_feasible();
    bisect(0.0, 1.0, tol, feasible).expect("feasible at c = 0, infeasible at c = 1")
}

/// Where `det τ₁ − det ρ₁` of [`example_family`] changes sign.
pub fn family_det1_boundary(tol: f64) -> f64 {
    let nonneg = |c: f64| parabola_coeffs(&example_family(c).expect("c in [0, 1]")).a0 >= 0.0;
    // The slack carries a factor (1 − c), so c = 1 is excluded from the bracket.
    bisect(0.0, 0.95, tol, nonneg).expect("slack positive at 0, negative at 0.95")
}

/// `ρ ↦ [[ρ₁₁ + (1−p)ρ₂₂, κρ₁₂], [κρ₂₁, pρ₂₂]]` for any `p`, `κ`.
pub fn example_map_apply(p: f64, kappa: f64, x: &CMat2) -> CMat2 {
    let m = x.0;
    CMat2::new(
        m[0][0] + m[1][1] * (1.0 - p),
        m[0][1] * kappa,
        m[1][0] * kappa,
        m[1][1] * p,
    )
}

/// Choi matrix of [`example_map_apply`], defined outside the CPTP region too.
pub fn example_map_choi(p: f64, kappa: f64) -> Choi {
    choi_of_map(|x| example_map_apply(p, kappa, x))
}

/// Kraus form `{diag(1, κ), sqrt(1−p)|0⟩⟨1|, sqrt(p−κ²)|1⟩⟨1|}`,
/// CPTP for `1 ≥ p ≥ κ²`.
pub fn example_map(p: f64, kappa: f64) -> Result<Channel> {
    if p > 1.0 {
        return Err(Error::NotCptp { reason: format!("p = {p} > 1") });
    }
    if p < kappa * kappa {
        return Err(Error::NotCptp { reason: format!("p = {p} < kappa^2 = {}", kappa * kappa) });
    }
    let kraus = vec![
        CMat2::diag(1.0.into(), kappa.into()),
        CMat2::unit(0, 1) * (1.0 - p).sqrt(),
        CMat2::unit(1, 1) * (p - kappa * kappa).sqrt(),
    ];
    Ok(Channel::new(kraus, Provenance::ExampleMap))
}

/// Unital map sending `|1⟩⟨1| ↦ 𝟙/2` and `ρ₂ ↦ τ₂` of [`example_family`] at
/// `c = 0`, with the trace-preserving bottom-right entry
/// `(ρ₁₁+ρ₂₂)/2 − (ρ₁₂+ρ₂₁)/8`.
pub fn example1_map(x: &CMat2) -> CMat2 {
    let m = x.0;
    let half_tr = (m[0][0] + m[1][1]) * 0.5;
    let off = m[0][1] + m[1][0];
    CMat2::new(half_tr + off / 8.0, off / 4.0, off / 4.0, half_tr - off / 8.0)
}

/// The same map with the bottom-right entry miswritten as
/// `(ρ₁₁+ρ₁₂)/2 − (ρ₁₂+ρ₂₁)/8`, which is not trace preserving.
pub fn example1_typo_map(x: &CMat2) -> CMat2 {
    let m = x.0;
    let off = m[0][1] + m[1][0];
    let mut out = example1_map(x);
    out.0[1][1] = (m[0][0] + m[0][1]) * 0.5 - off / 8.0;
    out
}

pub fn example1_channel() -> Channel {
    Channel::from_choi(&choi_of_map(example1_map), Provenance::Example1)
        .expect("the fixture map is completely positive")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    #[default]
    Any,
    Feasible,
    Infeasible,
}

pub const MAX_REJECTION_DRAWS: usize = 100_000;

/// Uniform point of the Bloch ball (coefficient radius 1/2).
pub fn random_state<R: Rng>(rng: &mut R) -> DensityMatrix {
    loop {
        let v = BlochVector::new(
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        );
        if v.norm() <= 0.5 {
            return DensityMatrix::from_bloch(v).expect("inside the Bloch ball");
        }
    }
}

/// Deterministic instance from `seed`, rejection-sampled to match `mode`.
pub fn random_instance(seed: u64, mode: SampleMode) -> Result<ProblemInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTION_DRAWS {
        let inst = ProblemInstance::new(
            random_state(&mut rng),
            random_state(&mut rng),
            random_state(&mut rng),
            random_state(&mut rng),
        );
        let accept = match mode {
            SampleMode::Any => true,
            SampleMode::Feasible => decide_unital(&inst).is_feasible(),
            SampleMode::Infeasible => !decide_unital(&inst).is_feasible(),
        };
        if accept {
            return Ok(inst);
        }
    }
    Err(Error::RejectionExhausted { draws: MAX_REJECTION_DRAWS })
}

/// Random Hermitian matrix with entries in `[−1, 1]`.
pub fn random_herm<R: Rng>(rng: &mut R) -> Herm2 {
    Herm2::from_parts(
        rng.gen_range(-1.0..1.0),
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        rng.gen_range(-1.0..1.0),
    )
}

/// Random density matrix given as a raw matrix; used by property tests.
pub fn random_density_cmat<R: Rng>(rng: &mut R) -> CMat2 {
    *random_state(rng).as_cmat()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBudget {
    /// Total Levenberg–Marquardt iterations across restarts.
    pub iterations: usize,
    /// Iterations per restart.
    pub restart_every: usize,
    pub unitaries: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { iterations: 6_000, restart_every: 150, unitaries: 3, seed: 0 }
    }
}

impl SearchBudget {
    pub fn iterations(iterations: usize) -> Self {
        SearchBudget { iterations, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchHit {
    pub channel: Channel,
    /// `Σⱼ ‖T(ρⱼ) − τⱼ‖₁`
    pub residual: f64,
    pub iterations: usize,
}

/// Best mixed-unitary channel found, whether or not it meets [`SEARCH_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchReport {
    pub best: SearchHit,
    pub found: bool,
}

const RESIDUALS: usize = 6;

/// Mixed-unitary parameterization: per unitary three ZYZ Euler angles and
/// one weight amplitude `wₖ` with `qₖ = wₖ² / Σ w²`.
struct MixedUnitary<'a> {
    inst: &'a ProblemInstance,
    unitaries: usize,
}

impl MixedUnitary<'_> {
    fn unitary(angles: &[f64]) -> CMat2 {
        let rz = |a: f64| CMat2::diag(C64::from_polar(1.0, -0.5 * a), C64::from_polar(1.0, 0.5 * a));
        let (s, c) = (0.5 * angles[1]).sin_cos();
        let ry = CMat2::from_real([[c, -s], [s, c]]);
        rz(angles[0]) * ry * rz(angles[2])
    }

    fn channel(&self, x: &[f64]) -> Channel {
        let norm: f64 = (0..self.unitaries).map(|k| x[4 * k + 3].powi(2)).sum();
        let kraus = (0..self.unitaries)
            .map(|k| {
                let q = x[4 * k + 3].powi(2) / norm;
                Self::unitary(&x[4 * k..4 * k + 3]) * q.sqrt()
            })
            .collect();
        Channel::new(kraus, Provenance::User)
    }

    /// Bloch differences of `T(ρⱼ) − τⱼ`, stacked.
    fn residuals(&self, x: &[f64]) -> SVector<f64, RESIDUALS> {
        let ch = self.channel(x);
        let mut r = SVector::<f64, RESIDUALS>::zeros();
        for (j, (rho, tau)) in [(&self.inst.rho1, &self.inst.tau1), (&self.inst.rho2, &self.inst.tau2)]
            .into_iter()
            .enumerate()
        {
            let d = ch.apply_herm(rho).bloch() - tau.bloch();
            r[3 * j] = d.x;
            r[3 * j + 1] = d.y;
            r[3 * j + 2] = d.z;
        }
        r
    }

    /// `Σⱼ ‖T(ρⱼ) − τⱼ‖₁`; traceless 2×2 Hermitian norm is `2|bloch|`.
    fn trace_residual(r: &SVector<f64, RESIDUALS>) -> f64 {
        2.0 * (r.fixed_rows::<3>(0).norm() + r.fixed_rows::<3>(3).norm())
    }
}

/// Searches mixtures of unitary channels for one mapping `ρⱼ ↦ τⱼ`, by
/// Levenberg–Marquardt on the Bloch residuals with random restarts. The
/// first start is the identity channel.
pub fn random_channel_search(inst: &ProblemInstance, budget: SearchBudget) -> Result<SearchHit> {
    let report = channel_search_report(inst, budget);
    if report.found {
        Ok(report.best)
    } else {
        Err(Error::NotFound { best_residual: report.best.residual })
    }
}

pub fn channel_search_report(inst: &ProblemInstance, budget: SearchBudget) -> SearchReport {
    let model = MixedUnitary { inst, unitaries: budget.unitaries.max(1) };
    let dim = 4 * model.unitaries;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut used = 0usize;
    let mut restart = 0usize;

    while used < budget.iterations.max(1) {
        let mut x: Vec<f64> = if restart == 0 {
            (0..dim).map(|i| if i % 4 == 3 { 1.0 } else { 0.0 }).collect()
        } else {
            (0..dim)
                .map(|i| {
                    if i % 4 == 3 {
                        rng.gen_range(0.2..1.0)
                    } else {
                        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
                    }
                })
                .collect()
        };
        restart += 1;
        let mut r = model.residuals(&x);
        let mut cost = r.norm_squared();
        let mut lambda = 1e-3;
        let steps = budget.restart_every.min(budget.iterations.max(1) - used);
        for _ in 0..steps {
            used += 1;
            if MixedUnitary::trace_residual(&r) <= SEARCH_TOL * 0.1 {
                break;
            }
            let mut jac = DMatrix::<f64>::zeros(RESIDUALS, dim);
            for k in 0..dim {
                let h = 1e-7;
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                let col = (model.residuals(&xp) - model.residuals(&xm)) / (2.0 * h);
                jac.set_column(k, &col);
            }
            let mut improved = false;
            for _ in 0..8 {
                // Underdetermined step: δ = −Jᵀ (J Jᵀ + λ I)⁻¹ r.
                let gram = SMatrix::<f64, RESIDUALS, RESIDUALS>::from_fn(|i, j| jac.row(i).dot(&jac.row(j)))
                    + SMatrix::<f64, RESIDUALS, RESIDUALS>::identity() * lambda;
                let Some(y) = gram.lu().solve(&r) else {
                    lambda *= 10.0;
                    continue;
                };
                let cand: Vec<f64> = x
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a - jac.column(k).iter().zip(y.iter()).map(|(j, yi)| j * yi).sum::<f64>())
                    .collect();
                let rc = model.residuals(&cand);
                let cc = rc.norm_squared();
                if cc < cost {
                    x = cand;
                    r = rc;
                    cost = cc;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        let res = MixedUnitary::trace_residual(&r);
        if best.as_ref().is_none_or(|(b, _)| res < *b) {
            best = Some((res, x));
        }
        if best.as_ref().is_some_and(|(b, _)| *b <= SEARCH_TOL) {
            break;
        }
    }

    let (residual, x) = best.expect("at least one restart runs");
    SearchReport {
        found: residual <= SEARCH_TOL,
        best: SearchHit { channel: model.channel(&x), residual, iterations: used },
    }
}

/// Validates a raw 2×2 as density matrix; re-exported for fixtures built by
/// callers.
pub fn density(m: [[C64; 2]; 2]) -> Result<DensityMatrix> {
    density_from_cmat(CMat2(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{parabola_coeffs, Verdict};
    use crate::synth::{choi_min_eigenvalue, choi_tp_residual, verify_channel};

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(2, 1.0).is_err());
        assert!(GridSpec::new(3, 0.0).is_err());
        let g = GridSpec::new(5, 2.0).unwrap();
        let close = |a: Vec<f64>, b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(g.points(), &[-2.0, -1.0, 0.0, 1.0, 2.0]));
        let g = GridSpec { includes_endpoints: false, ..g };
        assert!(close(g.points(), &[-1.6, -0.8, 0.0, 0.8, 1.6]));
    }

    #[test]
    fn family_fixtures() {
        let inst = example_family(0.0).unwrap();
        assert_eq!(*inst.rho1.herm(), Herm2::basis_projector(1));
        assert_eq!(*inst.tau1.herm(), Herm2::maximally_mixed());

        let inst = example_family(2.0 / 3.0).unwrap();
        let r = inst.rho1.as_cmat();
        assert!((r.get(0, 0).re - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.get(0, 1) - C64::new(0.0, 2f64.sqrt() / 4.0)).norm() < 1e-15);
        let t = inst.tau1.as_cmat();
        assert!((t.get(0, 0).re - 5.0 / 6.0).abs() < 1e-15);
        assert!((t.get(1, 1).re - 1.0 / 6.0).abs() < 1e-15);
        assert!((t.get(0, 1) - C64::new(0.0, 2f64.sqrt() / 8.0)).norm() < 1e-15);

        for c in linspace(0.0, 1.0, 41) {
            assert!(example_family(c).is_ok());
        }
        assert!(matches!(example_family(1.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(example_family(-0.1), Err(Error::OutOfRange { .. })));
    }

    /// Off-diagonals `i√2/8` and `i√2/16`, half of the family values at
    /// `c = 2/3`. With them `τ₁ ≺ ρ₁` fails, so the family formula is used.
    #[test]
    fn halved_off_diagonal_variant_breaks_single_majorization() {
        let k = 2f64.sqrt() / 8.0;
        let rho1 = Herm2::from_parts(2.0 / 3.0, C64::new(0.0, k), 1.0 / 3.0);
        let tau1 = Herm2::from_parts(5.0 / 6.0, C64::new(0.0, k / 2.0), 1.0 / 6.0);
        assert!(!matrix_majorization_2x2(&tau1, &rho1).unwrap());
        let inst = example_family(2.0 / 3.0).unwrap();
        assert!(matrix_majorization_2x2(&inst.tau1, &inst.rho1).unwrap());
    }

    #[test]
    fn example_map_reproduces_family() {
        let ch = example_map(0.5, 0.5).unwrap();
        for c in linspace(0.0, 1.0, 11) {
            let inst = example_family(c).unwrap();
            assert!(ch.apply_herm(&inst.rho1).max_abs_diff(&inst.tau1) < 1e-15);
            assert!(ch.apply_herm(&inst.rho2).max_abs_diff(&inst.tau2) < 1e-15);
        }
        let id = example_map(1.0, 1.0).unwrap();
        let x = CMat2::new(C64::new(0.3, 0.0), C64::new(0.1, 0.2), C64::new(0.1, -0.2), C64::new(0.7, 0.0));
        assert!((id.apply(&x) - x).frobenius() < 1e-15);
        assert!(matches!(example_map(0.3, 0.6), Err(Error::NotCptp { .. })));
        assert!(matches!(example_map(1.2, 0.0), Err(Error::NotCptp { .. })));
    }

    #[test]
    fn example_map_cp_boundary() {
        for kappa in [0.2, 0.5, 0.8] {
            let edge = kappa * kappa;
            assert!(choi_min_eigenvalue(&example_map_choi(edge + 1e-3, kappa)) >= -1e-12);
            assert!(choi_min_eigenvalue(&example_map_choi(edge - 1e-3, kappa)) < 0.0);
        }
    }

    #[test]
    fn example1_mapping() {
        let ch = example1_channel();
        assert!((ch.apply(&CMat2::identity()) - CMat2::identity()).frobenius() < 1e-12);
        let out = ch.apply(&CMat2::unit(1, 1));
        assert!((out - CMat2::identity() * 0.5).frobenius() < 1e-12);
        let rho2 = CMat2::from_real([[0.2, 0.4], [0.4, 0.8]]);
        let tau2 = CMat2::from_real([[0.6, 0.2], [0.2, 0.4]]);
        assert!((ch.apply(&rho2) - tau2).frobenius() < 1e-12);
        assert!((example1_map(&rho2) - tau2).frobenius() < 1e-15);
        assert!(choi_tp_residual(&choi_of_map(example1_map)) < 1e-15);
        assert!(choi_tp_residual(&choi_of_map(example1_typo_map)) > 0.1);
    }

    #[test]
    fn grid_iv_cases() {
        let grid = GridSpec::new(41, 5.0).unwrap();
        let b = BlochVector::new;
        let inst = ProblemInstance::identity(
            DensityMatrix::from_bloch(b(0.1, 0.2, 0.0)).unwrap(),
            DensityMatrix::from_bloch(b(-0.3, 0.0, 0.1)).unwrap(),
        );
        let out = grid_condition_iv(&inst, &grid);
        assert!(out.holds && out.worst_margin.abs() < 1e-15);

        assert!(grid_condition_iv(&example_family(0.0).unwrap(), &grid).holds);

        let inst = example_family(2.0 / 3.0).unwrap();
        let out = grid_condition_iv(&inst, &GridSpec::default());
        assert!(!out.holds, "{out:?}");
        let [beta, gamma] = out.worst;
        assert!(trace_norm_margin(&inst, 0.5, beta, gamma) < -TOL_GRID);
    }

    #[test]
    fn grid_iii_agrees_with_iv() {
        let grid = GridSpec::new(41, 10.0).unwrap();
        let bad = example_family(2.0 / 3.0).unwrap();
        assert!(!grid_condition_iii(&bad, &grid).holds);
        assert!(!grid_condition_iv(&bad, &grid).holds);
        let good = example_family(0.0).unwrap();
        assert!(grid_condition_iii(&good, &grid).holds);
        assert!(grid_condition_iv(&good, &grid).holds);
    }

    #[test]
    fn scan_v_cases() {
        let good = example_family(0.0).unwrap();
        assert!(scan_condition_v(&good, &vertex_covering_grid(&good, 201, 20.0)).holds);

        let bad = example_family(2.0 / 3.0).unwrap();
        let out = scan_condition_v(&bad, &vertex_covering_grid(&bad, 201, 20.0));
        assert!(!out.holds);
        let p = parabola_coeffs(&bad);
        // Pencil vertex in the τ₁ − tτ₂ convention.
        let vertex = p.a1 / (2.0 * p.a2);
        assert!((out.worst_t - vertex).abs() < 1e-9, "{} vs {}", out.worst_t, vertex);

        let inst = ProblemInstance::identity(good.rho1, good.rho2);
        assert!(scan_condition_v(&inst, &linspace(-5.0, 5.0, 101)).holds);
    }

    #[test]
    fn ando_grid_cases() {
        let ts = linspace(-10.0, 10.0, 401);
        let half = Herm2::maximally_mixed();
        let pure = Herm2::basis_projector(0);
        assert!(ando_majorization_grid(&half, &pure, &ts));
        assert!(!ando_majorization_grid(&pure, &half, &[2.0]));
        assert!(!ando_majorization_grid(&pure, &half, &ts));
        assert!(ando_majorization_grid(&pure, &pure, &ts));
    }

    #[test]
    fn random_instances_are_deterministic() {
        assert_eq!(random_instance(7, SampleMode::Any).unwrap(), random_instance(7, SampleMode::Any).unwrap());
        let f = random_instance(3, SampleMode::Feasible).unwrap();
        assert!(decide_unital(&f).is_feasible());
        let i = random_instance(3, SampleMode::Infeasible).unwrap();
        assert_eq!(decide_unital(&i).verdict, Verdict::Infeasible);
    }

    #[test]
    fn search_identity_immediately() {
        let inst = ProblemInstance::identity(
            DensityMatrix::from_bloch(BlochVector::new(0.1, 0.2, 0.0)).unwrap(),
            DensityMatrix::from_bloch(BlochVector::new(-0.3, 0.0, 0.1)).unwrap(),
        );
        let hit = random_channel_search(&inst, SearchBudget::default()).unwrap();
        assert!(hit.residual <= SEARCH_TOL);
        assert!(hit.iterations <= 1);
    }

    #[test]
    fn search_family_fixtures() {
        let good = example_family(0.0).unwrap();
        let hit = random_channel_search(&good, SearchBudget::default()).unwrap();
        let report = verify_channel(&hit.channel, &good, 1e-5);
        assert!(report.passed, "{report:?}");

        let bad = example_family(2.0 / 3.0).unwrap();
        match random_channel_search(&bad, SearchBudget::iterations(2_000)) {
            Err(Error::NotFound { best_residual }) => assert!(best_residual > 1e-3, "{best_residual}"),
            other => panic!("{other:?}"),
        }
    }
}
