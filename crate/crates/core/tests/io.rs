use std::f64::consts::PI;

use mhd_core::experiments::{simulate_with_series, Experiment, ExperimentConfig, Simulate};
use mhd_core::initial_data::make_beltrami;
use mhd_core::io::{
    emit_timeseries, ledger_text, parse_config_str, read_timeseries, Snapshot, TimeseriesRow,
    HEADER,
};
use mhd_core::solver::{DtPolicy, MhdParams};
use mhd_core::spectral::{Grid, ScalarField, VectorField};
use mhd_core::Error;
use rand::{Rng, SeedableRng};

fn random_vector(grid: Grid, seed: u64) -> VectorField {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut comp = || {
        let v: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1e3..1e3)).collect();
        ScalarField::from_physical(grid, v).unwrap()
    };
    VectorField::new(comp(), comp(), comp()).unwrap()
}

#[test]
fn snapshot_round_trip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(8, 5.5).unwrap();
    let f = random_vector(g, 1);
    let mut snap = Snapshot::new(g, 0.125, 0.7);
    snap.add_vector("b", &f);
    snap.add_scalar("p", f.component(1));
    let path = dir.path().join("a.snap");
    snap.write(&path).unwrap();
    let back = Snapshot::read(&path).unwrap();
    assert_eq!(back, snap);
    let fb = back.vector("b").unwrap();
    let (a, b) = (f.physical_values(), fb.physical_values());
    for d in 0..3 {
        assert!(a[d].iter().zip(b[d].iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
    assert_eq!(back.vector_names(), vec!["b".to_string()]);
}

#[test]
fn payload_size_follows_the_header_layout() {
    let g = Grid::new(64, 1.0).unwrap();
    let mut snap = Snapshot::new(g, 0.0, 1.0);
    snap.add_vector("u", &VectorField::zeros(g));
    let bytes = snap.to_bytes();
    let header = 8 + 4 + 4 + 8 + 8 + 8 + 4;
    let names = 3 * (2 + "u.x".len());
    assert_eq!(bytes.len(), header + names + 3 * 64usize.pow(3) * 8);
    assert_eq!(&bytes[..8], b"MHDSNAP1");
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 1);
    assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 64);
}

#[test]
fn damaged_snapshots_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(8, 1.0).unwrap();
    let mut snap = Snapshot::new(g, 0.0, 1.0);
    snap.add_vector("b", &random_vector(g, 2));
    let mut bytes = snap.to_bytes();

    let mut bad_magic = bytes.clone();
    bad_magic[0] = b'X';
    let err = Snapshot::from_bytes(&bad_magic).unwrap_err();
    assert!(matches!(err, Error::NotSnapshot(_)));
    assert!(err.to_string().contains("not a snapshot"));

    let mut bad_version = bytes.clone();
    bad_version[8] = 2;
    assert!(matches!(Snapshot::from_bytes(&bad_version), Err(Error::NotSnapshot(_))));

    let truncated = &bytes[..bytes.len() - 3];
    assert!(matches!(Snapshot::from_bytes(truncated), Err(Error::CorruptSnapshot(_))));

    bytes.push(0);
    assert!(matches!(Snapshot::from_bytes(&bytes), Err(Error::CorruptSnapshot(_))));

    let path = dir.path().join("n8.snap");
    snap.write(&path).unwrap();
    assert!(Snapshot::read_expecting(&path, 8).is_ok());
    assert!(Snapshot::read_expecting(&path, 16).is_err());
}

fn beltrami_rows(ticks_over: f64) -> (Vec<TimeseriesRow>, VectorField) {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let b0 = make_beltrami(1.0, g).unwrap();
    let p = MhdParams {
        dt_policy: DtPolicy::Fixed(0.005),
        ..MhdParams::with_eta(1.0)
    };
    let (_, rows) = simulate_with_series(&b0, &b0, p, ticks_over, 0.01).unwrap();
    (rows, b0)
}

#[test]
fn timeseries_header_rows_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (rows, b0) = beltrami_rows(0.1);
    assert_eq!(rows.len(), 11);
    let path = dir.path().join("series.csv");
    emit_timeseries(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,e0,e1,e2,e3,e0_low,e0_high,energy_total,Linf_u,Linf_b,div_max"
    );
    assert_eq!(HEADER.join(","), text.lines().next().unwrap());
    assert_eq!(text.lines().count(), 1 + rows.len());
    assert_eq!(read_timeseries(&path).unwrap(), rows);
    // u = b: the perturbation energies vanish up to roundoff in the heat
    // factors; the fields decay as e^{-t}
    let scale = rows[0].energy_total;
    for r in &rows {
        for e in [r.e0, r.e1, r.e2, r.e3, r.e0_low, r.e0_high] {
            assert!(e.abs() <= 1e-16 * scale, "{e:e}");
        }
        let want = (-r.t).exp() * b0.max_abs();
        assert!((r.linf_b - want).abs() <= 1e-12);
    }
}

#[test]
fn zero_run_gives_rows_of_zeros() {
    let g = Grid::new(8, 2.0 * PI).unwrap();
    let z = VectorField::zeros(g);
    let (_, rows) = simulate_with_series(&z, &z, MhdParams::with_eta(1.0), 0.05, 0.01).unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert_eq!(
            [r.e0, r.e1, r.e2, r.e3, r.e0_low, r.e0_high, r.energy_total, r.linf_u, r.linf_b, r.div_max],
            [0.0; 10]
        );
    }
}

fn small_config() -> ExperimentConfig {
    parse_config_str(
        r#"
mode = "simulate"
grid.L = "2pi"
grid.n = 16
data.N = 8
data.T = 0.03
data.rho = 1e-2
solver.dt = 0.005
"#,
    )
    .unwrap()
}

#[test]
fn identical_configs_give_identical_reports() {
    let cfg = small_config();
    let a = Simulate.run(&cfg).unwrap();
    let b = Simulate.run(&cfg).unwrap();
    assert_eq!(a.report, b.report);
    assert_eq!(ledger_text(&a), ledger_text(&b));
    assert_eq!(a.timeseries, b.timeseries);
}

#[test]
fn series_values_match_recomputation_from_the_final_snapshot() {
    let cfg = small_config();
    let out = Simulate.run(&cfg).unwrap();
    let last = out.timeseries.last().unwrap();
    let snap = out.snapshots.iter().find(|(n, _)| n == "final.snap").unwrap().1.clone();
    let b = snap.vector("b").unwrap();
    let u = snap.vector("u").unwrap();
    assert!((last.t - snap.t).abs() < 1e-15);
    assert!((last.linf_b - b.max_abs()).abs() <= 1e-12 * b.max_abs());
    assert!((last.linf_u - u.max_abs()).abs() <= 1e-12 * u.max_abs());
    let energy = mhd_core::solver::spectral_energy(&u) + mhd_core::solver::spectral_energy(&b);
    assert!((last.energy_total - energy).abs() <= 1e-12 * energy);
}
