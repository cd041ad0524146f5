use exner_core::harness::{
    run_benchmark, run_convergence, verify_oracle, BenchmarkConfig, LawPreset,
};
use exner_core::schemes::Scheme;

fn quick(scheme: Scheme) -> BenchmarkConfig {
    BenchmarkConfig {
        scheme,
        cells: 60,
        t_end: 0.5,
        ..Default::default()
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    for scheme in [Scheme::Relaxation, Scheme::Rusanov] {
        let a = run_benchmark(&quick(scheme)).unwrap();
        let b = run_benchmark(&quick(scheme)).unwrap();
        assert_eq!(a.snapshot, b.snapshot);
        assert_eq!(a.report.norms, b.report.norms);
    }
}

#[test]
fn report_echoes_its_config() {
    let cfg = quick(Scheme::Rusanov);
    let run = run_benchmark(&cfg).unwrap();
    assert_eq!(run.report.config, cfg);
    assert_eq!(run.report.scheme.name, Scheme::Rusanov);
    assert_eq!(run.report.final_time, 0.5);
    // rerunning from the echo reproduces the numbers
    let again = run_benchmark(&run.report.config).unwrap();
    assert_eq!(again.report.norms, run.report.norms);
}

#[test]
fn report_survives_json_round_trip() {
    let run = run_benchmark(&quick(Scheme::Relaxation)).unwrap();
    let text = serde_json::to_string(&run.report).unwrap();
    let back: exner_core::RunReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.norms, run.report.norms);
    assert_eq!(back.config, run.report.config);
}

#[test]
fn convergence_is_deterministic_and_ordered() {
    let cfg = BenchmarkConfig {
        t_end: 0.5,
        ..Default::default()
    };
    let a = run_convergence(&cfg, &[20, 40, 80]).unwrap();
    let b = run_convergence(&cfg, &[20, 40, 80]).unwrap();
    let cells: Vec<usize> = a.levels.iter().map(|l| l.cells).collect();
    assert_eq!(cells, vec![20, 40, 80]);
    assert_eq!(a.levels, b.levels);
    assert_eq!(a.rates, b.rates);
}

#[test]
fn doubling_cells_roughly_halves_the_error() {
    let cfg = BenchmarkConfig {
        t_end: 1.0,
        ..Default::default()
    };
    let r = run_convergence(&cfg, &[100, 200, 400, 800]).unwrap();
    for w in r.levels.windows(2) {
        let ratio = w[0].l1.h / w[1].l1.h;
        assert!((2.0 * 0.7..=2.0 * 1.3).contains(&ratio), "ratio {ratio}");
    }
    assert!(r.fit_residual.h < 0.05);
}

#[test]
fn oracle_check_is_reproducible_from_seed() {
    let cfg = BenchmarkConfig {
        samples: 25,
        seed: 3,
        ..Default::default()
    };
    let a = verify_oracle(&cfg).unwrap();
    let b = verify_oracle(&cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.passed(), "{:?}", a.checks);
    let other = verify_oracle(&BenchmarkConfig { seed: 4, ..cfg }).unwrap();
    assert_ne!(a.max_residual, other.max_residual);
}

#[test]
fn mpm_benchmark_runs_and_converges() {
    // q = 0.5 keeps the flow subcritical over the whole interval
    let cfg = BenchmarkConfig {
        law: LawPreset::Mpm,
        q: 0.5,
        alpha: 0.001,
        beta: 0.001,
        x_max: 2.0,
        t_end: 0.5,
        ..Default::default()
    };
    let oracle = verify_oracle(&cfg).unwrap();
    assert!(oracle.passed(), "{:?}", oracle.checks);
    let r = run_convergence(&cfg, &[50, 100, 200]).unwrap();
    assert!((0.7..=1.3).contains(&r.rates.h), "rate {}", r.rates.h);
}
