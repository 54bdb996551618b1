//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use unifeas::canonical::canonicalize;
use unifeas::error::Error;
use unifeas::feasibility::{
    decide_unital, dim_operator_system, matrix_majorization_2x2, parabola_coeffs, DISCRIMINANT,
};
use unifeas::oracle::{
    example1_channel, example1_typo_map, example_family, example_map,
    family_det1_boundary, family_threshold, grid_condition_iv, random_channel_search,
    random_herm, random_instance, scan_condition_v, vertex_covering_grid, GridSpec, SampleMode,
    SearchBudget,
};
use unifeas::synth::{
    choi_min_eigenvalue, choi_of_map, choi_tp_residual, pauli_diagonal_choi, synthesize,
    verify_channel, CPolicy, VerificationReport,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn strict_report(r: &VerificationReport, what: &str) -> Result<(), String> {
    check(
        r.tp_residual <= 1e-10
            && r.unital_residual <= 1e-10
            && r.choi_min_eig >= -1e-10
            && r.mapping_residuals.iter().all(|&m| m <= 1e-9),
        format!("{what}: {r:?}"),
    )
}

fn family_threshold_criterion() -> Outcome {
    let c = family_threshold(1e-12);
    let boundary = (0.7 * c - 0.3).powi(2) - 0.8 * (1.0 - c) * (0.25 - 21.0 * c / 64.0);
    check((c - 0.6082).abs() <= 5e-4, format!("threshold {c}"))?;
    check(boundary.abs() <= 1e-9, format!("boundary equation residual {boundary:e}"))?;
    Ok(format!("c* = {c:.10}, boundary residual {boundary:.1e}"))
}

fn determinant_boundary() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..=10 {
        let c = i as f64 / 10.0;
        let slack = parabola_coeffs(&example_family(c).map_err(|e| e.to_string())?).a0;
        let want = (1.0 - c) * (0.25 - 21.0 * c / 64.0);
        worst = worst.max((slack - want).abs());
    }
    check(worst <= 1e-12, format!("closed form mismatch {worst:e}"))?;
    let edge = family_det1_boundary(1e-13);
    check((edge - 16.0 / 21.0).abs() <= 1e-9, format!("sign change at {edge}"))?;
    Ok(format!("max deviation {worst:.1e}, sign change at {edge:.12}"))
}

fn pure_input_channel() -> Outcome {
    let inst = example_family(0.0).map_err(|e| e.to_string())?;
    let ch = synthesize(&inst, CPolicy::Midpoint).map_err(|e| e.to_string())?;
    strict_report(&verify_channel(&ch, &inst, 1e-9), "synthesized")?;
    strict_report(&verify_channel(&example1_channel(), &inst, 1e-9), "fixture")?;
    let typo = choi_tp_residual(&choi_of_map(example1_typo_map));
    check(typo > 1e-10, format!("miswritten map passes TP: {typo:e}"))?;
    Ok(format!("miswritten bottom-right entry has TP residual {typo:.3}"))
}

fn unital_obstruction() -> Outcome {
    let inst = example_family(2.0 / 3.0).map_err(|e| e.to_string())?;
    check(!decide_unital(&inst).is_feasible(), "decided feasible")?;
    for (t, r) in [(&inst.tau1, &inst.rho1), (&inst.tau2, &inst.rho2)] {
        check(matrix_majorization_2x2(t, r).map_err(|e| e.to_string())?, "single majorization fails")?;
    }
    let ch = example_map(0.5, 0.5).map_err(|e| e.to_string())?;
    let min_eig = choi_min_eigenvalue(&ch.choi());
    check(min_eig >= -1e-12, format!("example map Choi min eigenvalue {min_eig:e}"))?;
    let res = [
        ch.apply_herm(&inst.rho1).max_abs_diff(&inst.tau1),
        ch.apply_herm(&inst.rho2).max_abs_diff(&inst.tau2),
    ];
    check(res.iter().all(|&r| r <= 1e-12), format!("mapping residuals {res:?}"))?;
    Ok(format!("infeasible; example map residuals {:.1e}, {:.1e}", res[0], res[1]))
}

fn theorem_consistency() -> Outcome {
    let mut seed = 0u64;
    let mut checked = 0usize;
    let mut feasible = 0usize;
    let mut disagreements = Vec::new();
    while checked < 1000 {
        let inst = random_instance(seed, SampleMode::Any).map_err(|e| e.to_string())?;
        seed += 1;
        if dim_operator_system(&inst.rho1, &inst.rho2) < 3 {
            continue;
        }
        checked += 1;
        let decided = decide_unital(&inst).is_feasible();
        let cf = canonicalize(&inst).map_err(|e| e.to_string())?;
        let canonical = cf.a.abs().max(cf.b.abs()) <= 1.0 + 1e-9;
        let scanned = scan_condition_v(&inst, &vertex_covering_grid(&inst, 201, 20.0)).holds;
        feasible += decided as usize;
        if decided != canonical || decided != scanned {
            disagreements.push((seed - 1, decided, canonical, scanned));
        }
    }
    check(disagreements.is_empty(), format!("disagreements {disagreements:?}"))?;
    Ok(format!("{checked} instances ({feasible} feasible), 0 disagreements"))
}

fn oracle_soundness() -> Outcome {
    let grid = GridSpec::new(401, 50.0).map_err(|e| e.to_string())?;
    let seeds: Vec<u64> = (10_000..10_500).collect();
    let results: Vec<_> = seeds
        .par_iter()
        .map(|&seed| {
            let inst = random_instance(seed, SampleMode::Any).map_err(|e| e.to_string())?;
            let d = decide_unital(&inst);
            let disc = d.slack(DISCRIMINANT).unwrap_or(f64::INFINITY);
            Ok((seed, d.is_feasible(), disc, grid_condition_iv(&inst, &grid)))
        })
        .collect::<Result<_, String>>()?;
    let false_alarms: Vec<u64> =
        results.iter().filter(|r| r.1 && !r.3.holds).map(|r| r.0).collect();
    let strong: Vec<_> = results.iter().filter(|r| !r.1 && r.2 <= -1e-3).collect();
    let missed: Vec<String> = strong
        .iter()
        .filter(|r| r.3.holds)
        .map(|r| format!("seed {} (discriminant slack {:.2e})", r.0, r.2))
        .collect();
    let feasible = results.iter().filter(|r| r.1).count();
    check(
        false_alarms.is_empty() && missed.is_empty(),
        format!(
            "violations on feasible seeds {false_alarms:?}; {}/{} strongly infeasible missed: {missed:?}",
            missed.len(),
            strong.len()
        ),
    )?;
    Ok(format!(
        "{feasible} feasible without violation, {} strongly infeasible all violated",
        strong.len()
    ))
}

fn contraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..200u64 {
        let inst = random_instance(20_000 + k, SampleMode::Feasible).map_err(|e| e.to_string())?;
        let ch = synthesize(&inst, CPolicy::Midpoint).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let h = random_herm(&mut rng) * rng.gen_range(0.1..10.0);
            worst = worst.max(ch.apply_herm(&h).trace_norm() - h.trace_norm());
        }
    }
    check(worst <= 1e-10, format!("norm increase {worst:e}"))?;
    Ok(format!("10000 pairs, max ‖T(H)‖₁ − ‖H‖₁ = {worst:.2e}"))
}

fn tetrahedron_exactness() -> Outcome {
    let vertices = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut inside_worst = f64::INFINITY;
    let mut outside_worst = f64::NEG_INFINITY;
    let mut samples = 0usize;
    for _ in 0..400 {
        // Points on faces, edges and vertices, and strictly inside.
        let mut w = [0.0f64; 4];
        let support = rng.gen_range(1..=4);
        let skip = rng.gen_range(0..4);
        for (i, wi) in w.iter_mut().enumerate() {
            let active = match support {
                4 => true,
                3 => i != skip,
                2 => i == skip || i == (skip + 1) % 4,
                _ => i == skip,
            };
            if active {
                *wi = rng.gen_range(0.01..1.0);
            }
        }
        let total: f64 = w.iter().sum();
        let p: Vec<f64> = (0..3).map(|k| (0..4).map(|v| w[v] * vertices[v][k]).sum::<f64>() / total).collect();
        let inside = choi_min_eigenvalue(&pauli_diagonal_choi(p[0], p[1], p[2]));
        inside_worst = inside_worst.min(inside);
        if support < 4 {
            // Step 1e-3 outward across the face not containing vertex `skip`-complement.
            let opposite = match support {
                3 => skip,
                _ => (0..4).find(|&v| w[v] == 0.0).expect("some vertex inactive"),
            };
            let n: Vec<f64> = vertices[opposite].iter().map(|x| -x / 3f64.sqrt()).collect();
            let q: Vec<f64> = (0..3).map(|k| p[k] + 1e-3 * n[k]).collect();
            let outside = choi_min_eigenvalue(&pauli_diagonal_choi(q[0], q[1], q[2]));
            outside_worst = outside_worst.max(outside);
        }
        samples += 1;
    }
    check(inside_worst >= -1e-12, format!("inside min eigenvalue {inside_worst:e}"))?;
    check(outside_worst < -1e-6, format!("outside min eigenvalue {outside_worst:e}"))?;
    Ok(format!("{samples} samples; inside ≥ {inside_worst:.1e}, outside ≤ {outside_worst:.2e}"))
}

fn search_concordance() -> Outcome {
    let feasible: Vec<_> = (0..50u64)
        .map(|s| random_instance(30_000 + s, SampleMode::Feasible))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut infeasible = Vec::new();
    let mut seed = 40_000u64;
    while infeasible.len() < 50 {
        let inst = random_instance(seed, SampleMode::Infeasible).map_err(|e| e.to_string())?;
        seed += 1;
        if decide_unital(&inst).min_slack() <= -1e-2 {
            infeasible.push(inst);
        }
    }
    let found: Vec<_> = feasible
        .par_iter()
        .map(|inst| random_channel_search(inst, SearchBudget::default()))
        .collect();
    let missed: Vec<String> = found
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().err().map(|e| format!("#{i}: {e}")))
        .collect();
    let rejected: Vec<_> = infeasible
        .par_iter()
        .map(|inst| random_channel_search(inst, SearchBudget::default()))
        .collect();
    let mut min_best = f64::INFINITY;
    let mut wrong = Vec::new();
    for (i, r) in rejected.iter().enumerate() {
        match r {
            Err(Error::NotFound { best_residual }) if *best_residual >= 1e-3 => {
                min_best = min_best.min(*best_residual)
            }
            other => wrong.push(format!("#{i}: {other:?}")),
        }
    }
    check(missed.is_empty(), format!("feasible not found: {missed:?}"))?;
    check(wrong.is_empty(), format!("infeasible misreported: {wrong:?}"))?;
    Ok(format!("50/50 found, 50/50 NotFound (smallest best residual {min_best:.3e})"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("family threshold", family_threshold_criterion),
        ("determinant boundary", determinant_boundary),
        ("unital channel at c = 0", pure_input_channel),
        ("unital obstruction at c = 2/3", unital_obstruction),
        ("decision/canonical/scan consistency", theorem_consistency),
        ("trace-norm grid oracle soundness", oracle_soundness),
        ("trace-norm contraction", contraction),
        ("Pauli tetrahedron exactness", tetrahedron_exactness),
        ("constructive search concordance", search_concordance),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}: {name} [{secs:.2}s] {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {}: {name} [{secs:.2}s] {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
