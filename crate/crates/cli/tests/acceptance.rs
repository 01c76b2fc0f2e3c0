//! End-to-end acceptance suite. Each test exercises one criterion at its
//! stated tolerance and prints a single pass line (visible with
//! `cargo test --test acceptance -- --nocapture`); assertion failures carry
//! the measured values.

use std::process::Command;
use std::time::Instant;

use ptaho_core::asymptotics::{birkhoff_solutions, closed_form_re_gamma, empirical_growth_fit};
use ptaho_core::dense::DenseMatrix;
use ptaho_core::eigen::{assign_levels, eigenvalues, real_spectrum, LevelSlot};
use ptaho_core::model::{rescale_to_unit_quartic, OscillatorParams, SolverConfig, UnitQuartic};
use ptaho_core::recurrence::{forward_coefficients, sigma_omega_forward};
use ptaho_core::wavefunction::{ode_residual, WavefunctionSeries};

fn standard_params() -> OscillatorParams {
    OscillatorParams::new(1.0, 1.0, 1.0, 1.0).unwrap()
}

fn standard_unit() -> UnitQuartic {
    rescale_to_unit_quartic(&standard_params()).unwrap().0
}

struct Lcg(u64);

impl Lcg {
    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        lo + (hi - lo) * ((self.0 >> 11) as f64 / (1u64 << 53) as f64)
    }
}

/// Criterion 1: the truncation sweep reproduces every printed entry of the
/// first published table (ground and first excited level) within 0.001,
/// in under five seconds.
#[test]
fn criterion_1_low_order_sweep_table() {
    let published: &[(usize, f64, f64)] = &[
        (5, 1.793, 7.547),
        (6, 1.823, 5.868),
        (7, 1.634, 5.856),
        (8, 1.673, 5.138),
        (9, 1.627, 5.162),
        (10, 1.658, 4.922),
        (15, 1.693, 5.106),
        (20, 1.692, 5.126),
        (21, 1.691, 5.124),
        (22, 1.692, 5.123),
        (23, 1.692, 5.123),
        (24, 1.692, 5.123),
        (25, 1.692, 5.123),
    ];
    let start = Instant::now();
    let params = standard_params();
    for &(n, e0, e1) in published {
        let config = SolverConfig {
            n_trunc: n,
            ..SolverConfig::default()
        };
        let spec = ptaho_core::spectrum(&params, &config).unwrap();
        assert!(
            (spec.energies[0] - e0).abs() <= 1e-3,
            "n = {n}: ground {} vs printed {e0}",
            spec.energies[0]
        );
        assert!(
            (spec.energies[1] - e1).abs() <= 1e-3,
            "n = {n}: first excited {} vs printed {e1}",
            spec.energies[1]
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "sweep took {elapsed:?}");
    println!("criterion 1 (low-order sweep table): PASS in {elapsed:?}");
}

/// Criterion 2: at truncation 35 the eight published levels are reproduced
/// within two units of their last printed digit, and the truncation-20 row
/// shows levels 5 and 7 as missing (complex pairs), in under ten seconds.
#[test]
fn criterion_2_high_precision_table() {
    let published: &[(f64, f64)] = &[
        (1.691590, 2e-6),
        (5.123579, 2e-6),
        (9.26151, 2e-5),
        (13.8793, 2e-4),
        (18.8838, 2e-4),
        (24.220, 2e-3),
        (29.860, 2e-3),
        (35.85, 2e-2),
    ];
    let start = Instant::now();
    let params = standard_params();
    let config = SolverConfig::default();
    let spec = ptaho_core::spectrum(&params, &config).unwrap();
    for (k, &(value, tol)) in published.iter().enumerate() {
        assert!(
            (spec.energies[k] - value).abs() <= tol,
            "level {k}: {} vs printed {value} (tol {tol})",
            spec.energies[k]
        );
    }

    // the truncation-20 row: reference levels from the 35 run, one complex
    // pair claiming level 5, level 7 unfillable
    let reference: Vec<f64> = spec.energies.iter().take(8).copied().collect();
    let config20 = SolverConfig {
        n_trunc: 20,
        ..config
    };
    let (eigs, scale) = ptaho_core::hill_eigenvalues(&params, &config20).unwrap();
    let spec20 = real_spectrum(&eigs, scale, &config20);
    let pairs: Vec<(f64, f64)> = eigs
        .values
        .iter()
        .filter(|z| z.im > config20.tol_imag * (1.0 + z.re.abs()))
        .map(|z| (z.re * scale.factor, z.im.abs()))
        .collect();
    assert_eq!(pairs.len(), 1, "expected exactly one conjugate pair at truncation 20");
    let slots = assign_levels(&reference, &spec20.energies, &pairs, 0.25, 0.6);
    assert!(
        matches!(slots[5], LevelSlot::DroppedPair),
        "level 5 should be a dropped complex pair, got {:?}",
        slots[5]
    );
    assert!(
        !matches!(slots[7], LevelSlot::Real(_)),
        "level 7 should be missing, got {:?}",
        slots[7]
    );
    let printed20: &[(usize, f64, f64)] = &[
        (0, 1.691638, 2e-6),
        (1, 5.12559, 2e-5),
        (2, 9.2800, 2e-4),
        (3, 14.050, 2e-3),
        (4, 19.244, 2e-3),
        (6, 32.35, 2e-2),
    ];
    for &(k, value, tol) in printed20 {
        match slots[k] {
            LevelSlot::Real(v) => assert!(
                (v - value).abs() <= tol,
                "truncation-20 level {k}: {v} vs printed {value}"
            ),
            other => panic!("truncation-20 level {k} should be real, got {other:?}"),
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "table took {elapsed:?}");
    println!("criterion 2 (high-precision table + missing levels): PASS in {elapsed:?}");
}

/// Criterion 3: diagonalization, the two-parameter boundary-condition solve,
/// and the finite-difference reference agree pairwise within 1e-3 on the
/// four lowest levels at default parameters, in under sixty seconds. Runs
/// the shipped binary end to end.
#[test]
fn criterion_3_cross_method_agreement() {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_ptaho"))
        .args(["verify", "--format", "json"])
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "verify exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    let levels = report["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 4);
    for level in levels {
        for key in ["delta_hill_newton", "delta_hill_fd", "delta_newton_fd"] {
            let delta = level[key].as_f64().unwrap();
            assert!(
                delta <= 1e-3,
                "level {} {key} = {delta}",
                level["k"]
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "cross-check took {elapsed:?}");
    println!("criterion 3 (cross-method agreement): PASS in {elapsed:?}");
}

/// Criterion 4: the Gaussian exponent of the ansatz must not move the
/// physics; levels 0..2 at s = 2 and s = 3 (truncation 40) agree to 1e-5
/// (relative; see the design notes on the truncation error at order 40).
#[test]
fn criterion_4_ansatz_exponent_independence() {
    let params = standard_params();
    let at_s = |s: f64| {
        let config = SolverConfig {
            s,
            n_trunc: 40,
            ..SolverConfig::default()
        };
        ptaho_core::spectrum(&params, &config).unwrap().energies
    };
    let base = at_s(2.0);
    let alt = at_s(3.0);
    for k in 0..3 {
        let rel = (base[k] - alt[k]).abs() / base[k].abs();
        assert!(
            rel <= 1e-5,
            "level {k}: {} vs {} (relative {rel:e})",
            base[k],
            alt[k]
        );
    }
    println!("criterion 4 (ansatz-exponent independence): PASS");
}

/// Criterion 5: determinant-based coefficients equal forward-recursion
/// values to relative 1e-8 for indices up to 30 across 100 random
/// admissible parameter draws.
#[test]
fn criterion_5_determinant_identity() {
    let mut rng = Lcg(0xacce_5500_5eed);
    for draw in 0..100 {
        let beta = rng.range(-2.0, 2.0);
        let c = rng.range(-2.0, 2.0);
        let delta = rng.range(-2.0, 2.0);
        let energy = rng.range(-8.0, 8.0);
        let s = beta.abs() / (4.0 * 3f64.sqrt()) + rng.range(0.5, 3.0);
        let params = OscillatorParams::new(1.0, beta, c, delta).unwrap();
        let unit = rescale_to_unit_quartic(&params).unwrap().0;
        let config = SolverConfig {
            s,
            ..SolverConfig::default()
        };
        let (det_sigma, det_omega) =
            ptaho_core::hill::taylor_from_determinants(energy, 30, &config, &unit).unwrap();
        let (fwd_sigma, fwd_omega) = sigma_omega_forward(energy, 30, &config, &unit).unwrap();
        for n in 0..30 {
            for (a, b, tag) in [
                (det_sigma.entry(n), fwd_sigma.entry(n), "sigma"),
                (det_omega.entry(n), fwd_omega.entry(n), "omega"),
            ] {
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                let emax = [a, b]
                    .iter()
                    .filter(|e| !e.is_zero())
                    .map(|e| e.exp10)
                    .max()
                    .unwrap();
                let va = if a.is_zero() {
                    0.0
                } else {
                    a.mantissa * 10f64.powf((a.exp10 - emax) as f64)
                };
                let vb = if b.is_zero() {
                    0.0
                } else {
                    b.mantissa * 10f64.powf((b.exp10 - emax) as f64)
                };
                // neighbors set the meaningful magnitude near incidental zeros
                let neighbor = |k: usize| {
                    let e = fwd_sigma.entry(k.min(29));
                    if e.is_zero() || e.exp10 < emax - 20 {
                        0.0
                    } else {
                        (e.mantissa * 10f64.powf((e.exp10 - emax) as f64)).abs()
                    }
                };
                let scale = va.abs().max(vb.abs()).max(1e-4 * neighbor(n + 1).max(neighbor(n.saturating_sub(1))));
                assert!(
                    (va - vb).abs() <= 1e-8 * scale,
                    "draw {draw} {tag}[{n}]: {va:e} vs {vb:e}"
                );
            }
        }
    }
    println!("criterion 5 (determinant identity, 100 draws): PASS");
}

/// Criterion 6: the forward-recursion series solves the differential
/// equation at any energy; residual below 1e-8 on |x| <= 1 for 20 random
/// energies.
#[test]
fn criterion_6_series_solves_the_equation() {
    let unit = standard_unit();
    let config = SolverConfig::default();
    let mut rng = Lcg(0x0de0_b6b3);
    let grid: Vec<f64> = (0..21).map(|k| -1.0 + 0.1 * k as f64).collect();
    for draw in 0..20 {
        let energy = rng.range(-6.0, 12.0);
        let seq = forward_coefficients(energy, 1.0, 0.3, 90, &config, &unit).unwrap();
        let series = WavefunctionSeries::new(seq, config.s, 90, energy).unwrap();
        let r = ode_residual(&series, &unit, &grid).unwrap();
        assert!(r <= 1e-8, "draw {draw}: residual {r} at energy {energy}");
    }
    println!("criterion 6 (series/equation equivalence): PASS");
}

/// Criterion 7: growth diagnostics. Definitional and closed-form growth
/// exponents agree to 1e-12; the empirical envelope exponent lands within
/// 15% of the Gaussian exponent for the standard setup at a non-eigenvalue
/// energy.
#[test]
fn criterion_7_growth_diagnostics() {
    let mut rng = Lcg(0xb12c);
    for _ in 0..10_000 {
        let s = rng.range(0.05, 8.0);
        let beta = rng.range(-6.0, 6.0);
        for sol in birkhoff_solutions(s, beta) {
            assert!(
                (sol.gamma.re - closed_form_re_gamma(sol.p, s, beta)).abs() <= 1e-12,
                "p = {} at s = {s}, beta = {beta}",
                sol.p
            );
        }
    }

    let unit = standard_unit();
    let config = SolverConfig::default();
    let seq = forward_coefficients(3.0, 1.0, 0.0, 420, &config, &unit).unwrap();
    let fit = empirical_growth_fit(&seq, 100, 400).unwrap();
    assert!(
        (fit.gamma - config.s).abs() <= 0.15 * config.s,
        "empirical exponent {} vs s = {}",
        fit.gamma,
        config.s
    );
    println!(
        "criterion 7 (growth diagnostics): PASS (empirical exponent {:.4})",
        fit.gamma
    );
}

/// Criterion 8: eigensolver unit properties: conjugate closure, the trace
/// identity to relative 1e-9, and companion-matrix roots 1, 2, 3 to 1e-10.
#[test]
fn criterion_8_eigensolver_properties() {
    // companion matrix of (t-1)(t-2)(t-3)
    let mut companion = DenseMatrix::zeros(3);
    companion.set(0, 0, 6.0);
    companion.set(0, 1, -11.0);
    companion.set(0, 2, 6.0);
    companion.set(1, 0, 1.0);
    companion.set(2, 1, 1.0);
    let eigs = eigenvalues(&companion, 40).unwrap();
    let mut roots: Vec<f64> = eigs.values.iter().map(|z| z.re).collect();
    roots.sort_by(f64::total_cmp);
    for (got, want) in roots.iter().zip([1.0, 2.0, 3.0]) {
        assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
    }

    let params = standard_params();
    let config = SolverConfig::default();
    let (eigs, _) = ptaho_core::hill_eigenvalues(&params, &config).unwrap();
    let radius = eigs.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut unmatched = eigs.values.clone();
    while let Some(z) = unmatched.pop() {
        if z.im == 0.0 {
            continue;
        }
        let partner = unmatched
            .iter()
            .position(|w| (w - z.conj()).norm() <= 1e-10 * radius)
            .unwrap_or_else(|| panic!("unpaired complex eigenvalue {z}"));
        unmatched.remove(partner);
    }
    let trace_sum: f64 = eigs.values.iter().map(|z| z.re).sum();
    let want = 2.0 * config.s * (config.n_trunc * config.n_trunc) as f64;
    assert!(
        (trace_sum - want).abs() <= 1e-9 * want,
        "trace {trace_sum} vs {want}"
    );
    println!("criterion 8 (eigensolver properties): PASS");
}

/// Criterion 9: an inadmissible Gaussian exponent is rejected with exit
/// code 2 before any numerical work, and the message names the bound.
#[test]
fn criterion_9_constraint_gate() {
    let out = Command::new(env!("CARGO_BIN_EXE_ptaho"))
        .args(["spectrum", "--s", "0.1", "--beta", "1"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2), "exit code: {:?}", out.status.code());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("admissible"),
        "diagnostic should name the smallest admissible exponent: {stderr}"
    );
    assert!(out.stdout.is_empty(), "no result should be produced");
    println!("criterion 9 (constraint gate): PASS");
}
