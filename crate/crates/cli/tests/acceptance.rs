//! Acceptance gate. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line each and exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qjd_core::jointdist::{qjd_joint, standard_commuting_joint};
use qjd_core::matrix::random_hermitian;
use qjd_core::verify::{
    check_axioms, check_commuting_agreement, check_continuity_sweeps, check_unitary_covariance,
    generate_trial, Family, IntRange, SuiteParams, SweepParams, TrialInputs, TrialSpec,
    VerificationReport,
};
use qjd_core::{
    eigendecompose, HermitianObservable, JointDistribution, OutcomeGrid, QjdConfig, QjdError,
    WeightKind,
};

type Check = fn() -> Verdict;

struct Verdict {
    pass: bool,
    summary: String,
}

fn range(lo: usize, hi: usize) -> IntRange {
    IntRange::new(lo, hi).unwrap()
}

fn suite_verdict(
    run: impl FnOnce() -> qjd_core::Result<VerificationReport>,
    limit: Duration,
    expect_trials: usize,
) -> Verdict {
    let start = Instant::now();
    let report = run();
    let elapsed = start.elapsed();
    match report {
        Ok(r) => {
            let pass = r.all_passed() && r.passed == expect_trials && elapsed < limit;
            Verdict {
                pass,
                summary: format!(
                    "{}/{} trials pass, max error {:.3e}, {:.2}s (limit {}s)",
                    r.passed,
                    expect_trials,
                    r.max_error.unwrap_or(f64::NAN),
                    elapsed.as_secs_f64(),
                    limit.as_secs()
                ),
            }
        }
        Err(e) => Verdict {
            pass: false,
            summary: format!("suite error: {e}"),
        },
    }
}

fn criterion_1() -> Verdict {
    let p = SuiteParams::new(100, 1, range(2, 6), range(2, 3), 1e-8);
    suite_verdict(
        || check_commuting_agreement(&p),
        Duration::from_secs(10),
        100,
    )
}

fn criterion_2() -> Verdict {
    let p = SuiteParams::new(100, 2, range(2, 6), range(1, 3), 1e-8);
    suite_verdict(
        || check_unitary_covariance(&p),
        Duration::from_secs(10),
        100,
    )
}

fn sweep_template() -> SweepParams {
    SweepParams::from_seed(0, 3, 2)
}

fn criterion_3() -> Verdict {
    let template = sweep_template();
    let points = 10 * template.ts.len();
    suite_verdict(
        || check_continuity_sweeps(10, 1, template.dim, template.n_obs, &template),
        Duration::from_secs(30),
        points,
    )
}

fn criterion_4() -> Verdict {
    let p = SuiteParams::new(500, 4, range(2, 6), range(1, 3), 1e-10);
    suite_verdict(|| check_axioms(&p), Duration::from_secs(30), 500)
}

/// Diagonalize once in the shared basis and add up the populations of the
/// basis vectors whose eigenvalue tuple lands on each grid point.
fn brute_force_joint(inputs: &TrialInputs, grid: &OutcomeGrid) -> Vec<f64> {
    let (basis, diagonals) = inputs.common_basis.as_ref().unwrap();
    let populations = inputs
        .state
        .matrix()
        .conjugate_by(&basis.matrix().adjoint());
    let dim = inputs.state.dim();
    let mut weights = vec![0.0; grid.len()];
    for k in 0..dim {
        let mut flat = 0;
        for (axis, diag) in diagonals.iter().enumerate() {
            let nearest = grid.axes()[axis]
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - diag[k]).abs().total_cmp(&(b.1 - diag[k]).abs()))
                .unwrap()
                .0;
            flat += nearest * grid.strides()[axis];
        }
        weights[flat] += populations.get(k, k).re;
    }
    weights
}

fn criterion_5() -> Verdict {
    let config = QjdConfig::default();
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let spec = TrialSpec::for_trial(5, k, range(2, 6), range(1, 3), Family::Commuting).unwrap();
        let inputs = generate_trial(&spec).unwrap();
        let d = match standard_commuting_joint(&inputs.observables, &inputs.state, &config) {
            Ok(d) => d,
            Err(e) => {
                return Verdict {
                    pass: false,
                    summary: format!("trial {k}: {e}"),
                }
            }
        };
        let oracle = brute_force_joint(&inputs, d.grid());
        for (a, b) in d.weights().iter().zip(&oracle) {
            worst = worst.max((a - b).abs());
        }
    }
    Verdict {
        pass: worst <= 1e-12,
        summary: format!("50 commuting trials, max |standard - oracle| {worst:.3e} (tol 1e-12)"),
    }
}

/// Every observable the suites above decompose, regenerated from their specs.
fn suite_observables() -> Vec<HermitianObservable> {
    let mut specs = Vec::new();
    for (seed, family, n) in [
        (1, Family::Commuting, range(2, 3)),
        (2, Family::Generic, range(1, 3)),
        (4, Family::Generic, range(1, 3)),
        (4, Family::Commuting, range(1, 3)),
        (5, Family::Commuting, range(1, 3)),
    ] {
        let count = if seed == 4 { 500 } else { 100 };
        for k in 0..count {
            specs.push(TrialSpec::for_trial(seed, k, range(2, 6), n, family).unwrap());
        }
    }
    let mut obs = Vec::new();
    for s in specs {
        let t = generate_trial(&s).unwrap();
        obs.extend(
            t.observables
                .iter()
                .map(|a| a.conjugated(&t.unitary).unwrap()),
        );
        obs.extend(t.observables);
    }
    let template = sweep_template();
    for k in 0..10 {
        let p = SweepParams::from_seed(1 + k, template.dim, template.n_obs);
        let t =
            generate_trial(&TrialSpec::new(p.dim, p.n_obs, p.tuple_seed, Family::Generic).unwrap())
                .unwrap();
        let h = random_hermitian(p.dim, p.direction_seed)
            .unwrap()
            .normalized()
            .unwrap();
        for &s in &p.ts {
            obs.push(t.observables[0].perturbed(&h, s).unwrap());
        }
        obs.extend(t.observables);
    }
    obs
}

fn criterion_6() -> Verdict {
    let cluster = QjdConfig::default().cluster_tol;
    let mut recon: f64 = 0.0;
    for k in 0..200u64 {
        let dim = 2 + (k as usize % 7);
        let a = random_hermitian(dim, 600 + k).unwrap();
        match eigendecompose(&a, cluster) {
            Ok(m) => {
                let r = (&m.reconstruct() - a.matrix()).frobenius_norm()
                    / a.matrix().frobenius_norm().max(1.0);
                recon = recon.max(r);
            }
            Err(e) => {
                return Verdict {
                    pass: false,
                    summary: format!("input {k}: {e}"),
                }
            }
        }
    }
    let mut invariants: f64 = 0.0;
    let observables = suite_observables();
    for a in &observables {
        match eigendecompose(a, cluster) {
            Ok(m) => {
                let (idem, orth, resolution) = m.projector_residuals();
                invariants = invariants.max(idem).max(orth).max(resolution);
            }
            Err(e) => {
                return Verdict {
                    pass: false,
                    summary: format!("suite decomposition: {e}"),
                }
            }
        }
    }
    Verdict {
        pass: recon <= 1e-7 && invariants <= 1e-8,
        summary: format!(
            "200 reconstructions, max relative residual {recon:.3e} (tol 1e-7); {} suite decompositions, max projector residual {invariants:.3e} (tol 1e-8)",
            observables.len()
        ),
    }
}

fn strip_wall_time(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("wall_time_ms");
            map.values_mut().for_each(strip_wall_time);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_wall_time),
        _ => {}
    }
}

fn verify_run() -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qjd"))
        .args(["verify", "--seed", "1", "--trials", "100"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let mut v: serde_json::Value =
        serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    strip_wall_time(&mut v);
    Ok(v.to_string())
}

fn criterion_7() -> Verdict {
    match (verify_run(), verify_run()) {
        (Ok(a), Ok(b)) => Verdict {
            pass: a == b,
            summary: format!(
                "two runs, {} bytes each after removing wall times, identical: {}",
                a.len(),
                a == b
            ),
        },
        (Err(e), _) | (_, Err(e)) => Verdict {
            pass: false,
            summary: e,
        },
    }
}

fn criterion_8() -> Verdict {
    use qjd_core::matrix::fixtures::{pauli_x, pauli_z};
    let config = QjdConfig::default();
    let x = HermitianObservable::new(pauli_x(), "x").unwrap();
    let z = HermitianObservable::new(pauli_z(), "z").unwrap();
    let rho = qjd_core::DensityState::basis(2, 0).unwrap();
    let not_commuting = matches!(
        standard_commuting_joint(&[x.clone(), z.clone()], &rho, &config),
        Err(QjdError::NotCommuting { .. })
    );
    let d = qjd_joint(&[x, z], &rho, &config).unwrap();
    let scaled: Vec<f64> = d.weights().iter().map(|w| w * 1.1).collect();
    let corrupted = JointDistribution::new(
        d.grid().clone(),
        scaled,
        WeightKind::Probability,
        config.clamp_tol,
    );
    let normalization = matches!(corrupted, Err(QjdError::NormalizationViolation { .. }));
    Verdict {
        pass: not_commuting && normalization,
        summary: format!(
            "NotCommuting raised: {not_commuting}; NormalizationViolation raised: {normalization}"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("commuting agreement", criterion_1),
        ("unitary covariance", criterion_2),
        ("continuity sweeps", criterion_3),
        ("axioms", criterion_4),
        ("oracle equivalence", criterion_5),
        ("spectral kernel", criterion_6),
        ("determinism", criterion_7),
        ("negative controls", criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failures += 1;
        }
        println!(
            "criterion {} {name}: {} - {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.summary
        );
    }
    if failures == 0 {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of 8 criteria FAIL");
        ExitCode::FAILURE
    }
}
