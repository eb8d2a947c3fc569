use levymix::diffusion::{fundamental_solution, msd};
use levymix::operators::{build_kernel, TimeGrid};
use levymix::quad;
use levymix::sampler::{estimate_laplace, estimate_msd, kde_at_origin, SimulationConfig};
use levymix::transforms::{inverse_density, renewal_at, InversionConfig};
use levymix::{Error, Family, MeasureSpec, MixedExponent, MixingMeasure, ParamMap};

fn mixed(f: Family, m: MeasureSpec) -> MixedExponent {
    MixedExponent::new(f, MixingMeasure::new(m).unwrap()).unwrap()
}

fn small_run(paths: usize) -> SimulationConfig {
    SimulationConfig { path_count: paths, base_seed: 7, ..Default::default() }
}

#[test]
fn model_from_json() {
    let family: Family = serde_json::from_str(r#"{"kind": "gamma", "rate": {"map": "linear", "scale": 2.0}}"#).unwrap();
    let measure: MeasureSpec = serde_json::from_str(r#"{"kind": "atoms", "atoms": [[0.5, 0.25], [1.5, 0.75]]}"#).unwrap();
    let m = MixedExponent::new(family, MixingMeasure::new(measure).unwrap()).unwrap();
    let want = 0.25 * (1.0 + 3.0 / 1.0f64).ln() + 0.75 * (1.0 + 3.0 / 3.0f64).ln();
    assert!((m.mixed_f(3.0) - want).abs() < 1e-14);

    let bad = serde_json::from_str::<Family>(r#"{"kind": "levy-walk"}"#).unwrap_err();
    assert!(bad.to_string().contains("unknown variant"));
}

#[test]
fn assumption_failures_are_errors() {
    let a1 = Family::Drift { slope: ParamMap::Power { coef: 1.0, exponent: -1.0 } };
    let err = MixedExponent::new(a1, MixingMeasure::new(MeasureSpec::Uniform { lo: 0.0, hi: 1.0 }).unwrap()).unwrap_err();
    assert!(matches!(err, Error::Assumption(ref s) if s.contains("A1")), "{err}");

    let a2 = Family::CompoundPoisson { rate: ParamMap::Power { coef: 1.0, exponent: -1.0 }, jump: 0.5 };
    let err = MixedExponent::new(a2, MixingMeasure::new(MeasureSpec::Uniform { lo: 0.0, hi: 1.0 }).unwrap()).unwrap_err();
    assert!(matches!(err, Error::Assumption(ref s) if s.contains("A2")), "{err}");
}

#[test]
fn simulation_is_independent_of_thread_count() {
    let m = mixed(Family::stable(), MeasureSpec::Uniform { lo: 0.2, hi: 0.8 });
    let cfg = small_run(2000);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_laplace(&m, 1.0, 1.0, &cfg).unwrap())
    };
    let (one, four) = (run(1), run(4));
    assert_eq!(one.estimate.to_bits(), four.estimate.to_bits());
    assert_eq!(one.se.to_bits(), four.se.to_bits());
}

#[test]
fn simulated_msd_matches_renewal_function() {
    let m = mixed(Family::gamma(), MeasureSpec::Uniform { lo: 0.5, hi: 2.0 });
    let est = estimate_msd(&m, 2.0, 2, &small_run(40_000)).unwrap();
    let curve = msd(&m, &[2.0], 2, &InversionConfig::default()).unwrap();
    assert!((est.mean - curve.msd[0]).abs() < 3.0 * est.se, "{} ± {} vs {}", est.mean, est.se, curve.msd[0]);
}

#[test]
fn kde_matches_fundamental_solution() {
    let m = mixed(Family::stable(), MeasureSpec::Dirac { y: 0.5 });
    let q0 = fundamental_solution(&m, &[0.0], 1.0, 1, &InversionConfig::default()).unwrap().q[0];
    let kde = kde_at_origin(&m, 1.0, 1, 0.01, &small_run(40_000)).unwrap();
    assert!((kde.mean - q0).abs() < 3.0 * kde.se + 1e-3, "{} ± {} vs {q0}", kde.mean, kde.se);
}

#[test]
fn inverse_density_first_moment_is_renewal_function() {
    let m = mixed(Family::gamma(), MeasureSpec::Atoms { atoms: vec![[0.5, 0.5], [2.0, 0.5]] });
    let cfg = InversionConfig::default();
    let x = quad::linspace(1e-3, 40.0, 1500);
    let l = inverse_density(&m, &x, 3.0, &cfg).unwrap();
    let u = renewal_at(&m, 3.0, &cfg).unwrap();
    assert!((l.first_moment() - u).abs() < 2e-3 * u, "{} vs {u}", l.first_moment());
    assert!((l.mass() - 1.0).abs() < 5e-3, "{}", l.mass());
}

#[test]
fn kernel_weights_telescope() {
    let m = mixed(Family::stable(), MeasureSpec::Atoms { atoms: vec![[0.3, 0.5], [0.7, 0.5]] });
    let grid = TimeGrid::new(0.01, 301).unwrap();
    let k = build_kernel(&m, grid).unwrap();
    let total: f64 = k.weights.iter().sum();
    let end = 0.01 * k.weights.len() as f64;
    assert!((total - m.mixed_cumulative_tail(end)).abs() < 1e-12);
}

#[test]
fn density_csv_round_trip() {
    let m = mixed(Family::stable(), MeasureSpec::Dirac { y: 0.5 });
    let l = inverse_density(&m, &[0.5, 1.0, 1.5], 1.0, &InversionConfig::default()).unwrap();
    let dir = std::env::temp_dir().join(format!("levymix-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("l.csv");
    l.write_csv(&path).unwrap();
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["point", "value"]);
    let rows: Vec<(f64, f64)> = reader.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    for ((p, v), (q, w)) in rows.iter().zip(l.points.iter().zip(&l.values)) {
        assert_eq!(p, q);
        assert_eq!(v, w);
    }
    std::fs::remove_dir_all(dir).unwrap();
}
