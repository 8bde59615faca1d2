//! Acceptance sweep: one test per stated criterion, each at its stated
//! tolerance, printing one summary line when it passes. Zero scans are
//! shared through fixtures; the global pool is pinned to one thread so the
//! timed criteria measure single-threaded work.

use num_complex::Complex64;
use std::sync::OnceLock;
use std::time::Instant;

use erh_core::completion::{completion_profile, reflection_residual, script_x, xi};
use erh_core::fields::{make_field, FieldDescriptor, QuadraticCharacter};
use erh_core::identity::{
    verify_euler_kronecker_on, verify_hadamard_logdd_on, verify_rh_integral, verify_theorem1_on,
    ReportStatus, DEFAULT_RH_TOL, DEFAULT_TOL_FLOOR,
};
use erh_core::lfun::{dirichlet_l, hurwitz_zeta, riemann_zeta};
use erh_core::numerics::{taylor_coefficients, PrecisionPolicy, DEFAULT_DERIVATIVE_RADIUS};
use erh_core::zeros::{scan_zeros, write_ledger, LedgerStatus, ZeroLedger};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn one_thread() {
    static INIT: OnceLock<()> = OnceLock::new();
    INIT.get_or_init(|| {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
    });
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn supported_fields() -> Vec<FieldDescriptor> {
    ["Q", "D=-4", "D=5", "D=-3", "D=8"]
        .iter()
        .map(|spec| make_field(spec).unwrap())
        .collect()
}

fn rationals_at_500() -> &'static ZeroLedger {
    static LEDGER: OnceLock<ZeroLedger> = OnceLock::new();
    LEDGER.get_or_init(|| {
        one_thread();
        scan_zeros(&FieldDescriptor::rationals(), 500.0).unwrap()
    })
}

fn quadratic_at_300(spec: &'static str) -> ZeroLedger {
    one_thread();
    scan_zeros(&make_field(spec).unwrap(), 300.0).unwrap()
}

fn gauss_at_300() -> &'static ZeroLedger {
    static LEDGER: OnceLock<ZeroLedger> = OnceLock::new();
    LEDGER.get_or_init(|| quadratic_at_300("D=-4"))
}

fn d5_at_300() -> &'static ZeroLedger {
    static LEDGER: OnceLock<ZeroLedger> = OnceLock::new();
    LEDGER.get_or_init(|| quadratic_at_300("D=5"))
}

#[test]
fn criterion_01_theorem1_rationals_at_500() {
    one_thread();
    let clock = Instant::now();
    // Fresh scan inside the timing window: the runtime target covers the
    // whole check, not a warm cache.
    let ledger = scan_zeros(&FieldDescriptor::rationals(), 500.0).unwrap();
    let report = verify_theorem1_on(&ledger, 500.0, DEFAULT_TOL_FLOOR).unwrap();
    assert_eq!(report.status(), ReportStatus::Pass);
    assert!(report.discrepancy() <= 1e-4, "{}", report.discrepancy());
    // Both sides individually against the independent reference 0.046210.
    let lhs = report.partial_sum() + report.tail_estimate();
    assert!((lhs - 0.046_210).abs() <= 1e-5, "sum side {lhs}");
    assert!(
        (report.rhs_value() - 0.046_210).abs() <= 1e-5,
        "derivative side {}",
        report.rhs_value()
    );
    let elapsed = clock.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "{elapsed:?}");
    println!(
        "PASS 1: theorem1 Q@500 discrepancy {:.3e} <= 1e-4, both sides at 0.046210, {:.2?} single-threaded",
        report.discrepancy(),
        elapsed
    );
}

#[test]
fn criterion_02_theorem1_quadratics_at_300() {
    one_thread();
    for spec in ["D=-4", "D=5"] {
        let clock = Instant::now();
        let ledger = scan_zeros(&make_field(spec).unwrap(), 300.0).unwrap();
        let report = verify_theorem1_on(&ledger, 300.0, 2e-4).unwrap();
        assert_eq!(report.status(), ReportStatus::Pass, "{spec}");
        assert!(report.discrepancy() <= 2e-4, "{spec}: {}", report.discrepancy());
        let elapsed = clock.elapsed();
        assert!(elapsed.as_secs_f64() < 120.0, "{spec}: {elapsed:?}");
        println!(
            "PASS 2: theorem1 {spec}@300 discrepancy {:.3e} <= 2e-4, {:.2?}",
            report.discrepancy(),
            elapsed
        );
    }
}

#[test]
fn criterion_03_zero_accounting() {
    one_thread();
    let rationals = scan_zeros(&FieldDescriptor::rationals(), 100.0).unwrap();
    assert_eq!(rationals.status(), LedgerStatus::CertifiedComplete);
    assert_eq!(rationals.ordinates().len(), 29);
    let first = rationals.ordinates()[0];
    assert!((first - 14.134_725).abs() <= 1e-6, "{first}");

    let gauss = scan_zeros(&make_field("D=-4").unwrap(), 10.0).unwrap();
    assert_eq!(gauss.status(), LedgerStatus::CertifiedComplete);
    let gauss_first = gauss.ordinates()[0];
    assert!((gauss_first - 6.020_949).abs() <= 1e-6, "{gauss_first}");
    println!(
        "PASS 3: Q@100 has 29 certified ordinates, first {first:.6}; Q(i) first {gauss_first:.6}"
    );
}

#[test]
fn criterion_04_functional_equation_and_symmetry() {
    one_thread();
    let mut worst_reflection = 0.0f64;
    let mut worst_symmetry = 0.0f64;
    let mut worst_slope = 0.0f64;
    for field in supported_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..30 {
            let s = c(rng.gen_range(0.3..0.7), rng.gen_range(0.4..30.0));
            let residual = reflection_residual(&field, s).unwrap();
            assert!(residual <= 1e-8, "{field} at {s}: {residual:e}");
            worst_reflection = worst_reflection.max(residual);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        for _ in 0..30 {
            let s = c(rng.gen_range(0.2..0.8), rng.gen_range(0.3..40.0));
            let direct = xi(&field, s).unwrap();
            let reflected = xi(&field, c(1.0, 0.0) - s).unwrap();
            let rel = (direct - reflected).norm() / direct.norm().max(1e-300);
            assert!(rel <= 1e-10, "{field} at {s}: {rel:e}");
            worst_symmetry = worst_symmetry.max(rel);
        }
        let profile = completion_profile(&field).unwrap();
        let slope = profile.central_derivative(1).abs() / profile.central_value().abs();
        assert!(slope <= 1e-9, "{field}: central slope ratio {slope:e}");
        worst_slope = worst_slope.max(slope);
    }
    println!(
        "PASS 4: reflection residual <= {worst_reflection:.2e} (cap 1e-8), symmetry <= {worst_symmetry:.2e} (cap 1e-10), central slope <= {worst_slope:.2e} (cap 1e-9)"
    );
}

#[test]
fn criterion_05_reality_of_central_derivatives() {
    one_thread();
    let policy = PrecisionPolicy::default();
    let mut worst = 0.0f64;
    for field in supported_fields() {
        let multiplicity = erh_core::completion::detect_multiplicity(&field).unwrap();
        // Values at off-center real points.
        for s0 in [0.25, 0.4, 0.75, 1.5, 2.0, 3.5] {
            let v = script_x(&field, c(s0, 0.0), multiplicity).unwrap();
            assert!(v.im.abs() <= 1e-10, "{field} at {s0}: Im {:e}", v.im);
            worst = worst.max(v.im.abs());
        }
        // First four central derivatives from one validated ring.
        let f = |z| script_x(&field, z, multiplicity);
        let coeffs =
            taylor_coefficients(&f, c(0.5, 0.0), DEFAULT_DERIVATIVE_RADIUS, 4, &policy).unwrap();
        let mut factorial = 1.0;
        for (k, a) in coeffs.iter().enumerate() {
            if k > 0 {
                factorial *= k as f64;
            }
            let im = (a.im * factorial).abs();
            assert!(im <= 1e-10, "{field} derivative {k}: Im {im:e}");
            worst = worst.max(im);
        }
    }
    println!("PASS 5: |Im| of completed values and first four central derivatives <= {worst:.2e} (cap 1e-10)");
}

#[test]
fn criterion_06_euler_kronecker() {
    one_thread();
    let q_report = verify_euler_kronecker_on(rationals_at_500(), 500.0, DEFAULT_TOL_FLOOR).unwrap();
    assert_eq!(q_report.status(), ReportStatus::Pass);
    assert!(q_report.discrepancy() <= 1e-4, "{}", q_report.discrepancy());
    assert!((q_report.rhs_value() - 0.023_096).abs() <= 1e-6);

    let extra_d3 = quadratic_at_300("D=-3");
    let extra_d8 = quadratic_at_300("D=8");
    let ledgers: [(&str, &ZeroLedger); 4] = [
        ("D=-4", gauss_at_300()),
        ("D=5", d5_at_300()),
        ("D=-3", &extra_d3),
        ("D=8", &extra_d8),
    ];
    let mut quad_worst = 0.0f64;
    for (spec, ledger) in ledgers {
        let report = verify_euler_kronecker_on(ledger, 300.0, 2e-4).unwrap();
        assert_eq!(report.status(), ReportStatus::Pass, "{spec}");
        assert!(report.discrepancy() <= 2e-4, "{spec}: {}", report.discrepancy());
        quad_worst = quad_worst.max(report.discrepancy());
    }
    println!(
        "PASS 6: Euler-Kronecker Q@500 discrepancy {:.3e} <= 1e-4 (rhs 0.023096), quadratics@300 <= {quad_worst:.3e} (cap 2e-4)",
        q_report.discrepancy()
    );
}

#[test]
fn criterion_07_log_zeta_integral() {
    one_thread();
    let clock = Instant::now();
    let report =
        verify_rh_integral(&FieldDescriptor::rationals(), 1000.0, DEFAULT_RH_TOL).unwrap();
    assert_eq!(report.status(), ReportStatus::Pass);
    assert!(report.discrepancy() <= 1e-3, "{}", report.discrepancy());
    assert!((report.rhs_value() - (-0.656_956)).abs() <= 5e-6);
    let elapsed = clock.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "{elapsed:?}");
    println!(
        "PASS 7: log|zeta| integral to 1000 discrepancy {:.3e} <= 1e-3 against -0.656956, {:.2?}",
        report.discrepancy(),
        elapsed
    );
}

#[test]
fn criterion_08_hadamard_log_second_derivative() {
    one_thread();
    let q_report = verify_hadamard_logdd_on(rationals_at_500(), 2.0, 500.0, DEFAULT_TOL_FLOOR)
        .unwrap();
    assert_eq!(q_report.status(), ReportStatus::Pass);
    assert!(q_report.discrepancy() <= q_report.tolerance());

    let gauss_report =
        verify_hadamard_logdd_on(gauss_at_300(), 3.0, 300.0, DEFAULT_TOL_FLOOR).unwrap();
    assert_eq!(gauss_report.status(), ReportStatus::Pass);
    assert!(gauss_report.discrepancy() <= gauss_report.tolerance());
    println!(
        "PASS 8: hadamard-logdd Q(s0=2)@500 discrepancy {:.3e} <= {:.3e}; Q(i)(s0=3)@300 {:.3e} <= {:.3e}",
        q_report.discrepancy(),
        q_report.tolerance(),
        gauss_report.discrepancy(),
        gauss_report.tolerance()
    );
}

/// Sum of an alternating series by Chebyshev-weighted acceleration; for
/// smooth positive coefficient sequences the error shrinks like
/// (3+sqrt(8))^-n, so 30 terms reach past f64 precision.
fn accelerated_alternating(terms: &[f64]) -> f64 {
    let n = terms.len();
    let mut d = (3.0 + 8.0f64.sqrt()).powi(n as i32);
    d = (d + 1.0 / d) / 2.0;
    let mut b = -1.0;
    let mut c_acc = -d;
    let mut sum = 0.0;
    for (k, a) in terms.iter().enumerate() {
        c_acc = b - c_acc;
        sum += c_acc * a;
        let kf = k as f64;
        b = (kf + n as f64) * (kf - n as f64) * b / ((kf + 0.5) * (kf + 1.0));
    }
    sum / d
}

#[test]
fn criterion_09_kernel_oracles() {
    one_thread();
    let basel = riemann_zeta(c(2.0, 0.0)).unwrap();
    assert!((basel.re - std::f64::consts::PI.powi(2) / 6.0).abs() <= 1e-12);
    let origin = riemann_zeta(c(0.0, 0.0)).unwrap();
    assert!((origin.re - (-0.5)).abs() <= 1e-12);
    for a in [0.3, 0.7] {
        let hurwitz = hurwitz_zeta(c(0.0, 0.0), a).unwrap();
        assert!((hurwitz.re - (0.5 - a)).abs() <= 1e-12, "a={a}");
    }
    let chi = QuadraticCharacter::new(-4).unwrap();
    let leibniz = dirichlet_l(c(1.0, 0.0), &chi).unwrap();
    assert!((leibniz.re - std::f64::consts::PI / 4.0).abs() <= 1e-12);

    // L(2, chi_-4) against the independently accelerated alternating series.
    let terms: Vec<f64> = (0..30).map(|k| 1.0 / ((2 * k + 1) as f64).powi(2)).collect();
    let reference = accelerated_alternating(&terms);
    let engine = dirichlet_l(c(2.0, 0.0), &chi).unwrap();
    assert!(
        (engine.re - reference).abs() <= 1e-10,
        "{} vs {reference}",
        engine.re
    );
    println!(
        "PASS 9: zeta(2), zeta(0), zeta(0,a), L(1,chi_-4) within 1e-12; L(2,chi_-4) = {reference:.12} within 1e-10"
    );
}

#[test]
fn criterion_10_determinism() {
    one_thread();
    // Report emission is bit-stable without timestamps.
    let first = verify_theorem1_on(rationals_at_500(), 300.0, DEFAULT_TOL_FLOOR).unwrap();
    let second = verify_theorem1_on(rationals_at_500(), 300.0, DEFAULT_TOL_FLOOR).unwrap();
    assert_eq!(first.to_json(), second.to_json());

    // Ledger bytes are stable across writes and across pool widths.
    let reference = scan_zeros(&make_field("D=-4").unwrap(), 80.0).unwrap();
    let dir = std::env::temp_dir().join(format!("erh-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path_a = dir.join("a.ledger");
    let path_b = dir.join("b.ledger");
    write_ledger(&reference, &path_a).unwrap();
    write_ledger(&reference, &path_b).unwrap();
    assert_eq!(
        std::fs::read(&path_a).unwrap(),
        std::fs::read(&path_b).unwrap()
    );

    for threads in [2, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let scanned = pool
            .install(|| scan_zeros(&make_field("D=-4").unwrap(), 80.0))
            .unwrap();
        assert_eq!(scanned.ordinates().len(), reference.ordinates().len());
        for (a, b) in scanned.ordinates().iter().zip(reference.ordinates()) {
            assert_eq!(a.to_bits(), b.to_bits(), "{threads} threads");
        }
        let path_t = dir.join(format!("threads-{threads}.ledger"));
        write_ledger(&scanned, &path_t).unwrap();
        assert_eq!(
            std::fs::read(&path_t).unwrap(),
            std::fs::read(&path_a).unwrap()
        );
    }
    let _ = std::fs::remove_dir_all(&dir);
    println!("PASS 10: reports and ledgers byte-identical across runs and pool widths");
}
