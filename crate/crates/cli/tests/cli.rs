use std::path::Path;
use std::process::{Command, Output};

use zoneshare::model::file::{NoiseMode, NoiseSection, ScenarioFile};
use zoneshare_cli::output::{read_adr_csv, read_csv, AdrRow, CoverageRow, SceneRow};

fn zoneshare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zoneshare"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = zoneshare(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn code(args: &[&str]) -> i32 {
    zoneshare(args).status.code().expect("exited normally")
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["adr", "--engine", "both"]), 1);
    assert_eq!(code(&["sweep", "--omega", "1:0:0.1"]), 1);
    assert_eq!(code(&["coverage", "--thresholds-db", ","]), 1);
    assert_eq!(code(&["adr", "--rp-km=-1"]), 2);
    assert_eq!(code(&["adr", "--omega", "1.5"]), 2);
    assert_eq!(code(&["adr", "--config", "/definitely/not/here.toml"]), 2);
    assert_eq!(code(&["sweep", "--rp-km", "2,1"]), 2);
}

#[test]
fn unbounded_rate_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("quiet.toml");
    let mut file = ScenarioFile::reference();
    file.densities.bs_per_km2 = 0.0;
    file.densities.reuse_factor = i64::from(u32::MAX);
    file.noise = NoiseSection {
        mode: NoiseMode::InterferenceLimited,
        explicit_power_w: None,
        noise_figure_db: None,
        reference_temperature_k: None,
    };
    std::fs::write(&path, file.to_toml()).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(code(&["adr", "--config", p, "--rp-km", "0", "--omega", "1"]), 3);
}

#[test]
fn defaults_round_trip_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ref.toml");
    ok(&["defaults", "-o", path.to_str().unwrap()]);
    let file = ScenarioFile::load(&path).unwrap();
    assert_eq!(file, ScenarioFile::reference());
    file.to_scenario().unwrap();

    let from_file = ok(&["adr", "--config", path.to_str().unwrap()]);
    assert_eq!(from_file, ok(&["adr"]));
}

#[test]
fn analytic_coverage_table_shape() {
    let csv = ok(&["coverage", "--engine", "analytic", "--thresholds-db=-10,0,10,20"]);
    let rows: Vec<CoverageRow> = read_csv(csv.as_slice()).unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.engine == "analytic" && r.ci_halfwidth.is_none()));
    for class in rows.chunks(4) {
        assert!(class.windows(2).all(|w| w[0].probability >= w[1].probability));
    }
}

#[test]
fn both_engines_fill_the_default_thresholds() {
    let csv = ok(&["coverage", "--trials", "200"]);
    let rows: Vec<CoverageRow> = read_csv(csv.as_slice()).unwrap();
    assert_eq!(rows.len(), 3 * 16 * 2);
    assert_eq!(rows[0].threshold_db, -10.0);
    assert_eq!(rows[15].threshold_db, 20.0);
    for r in rows.iter().filter(|r| r.engine == "simulated") {
        assert!(r.ci_halfwidth.is_some());
    }
}

#[test]
fn single_cell_sweep_matches_adr() {
    let sweep = ok(&["sweep", "--rp-km", "3", "--omega", "0.25"]);
    let adr = ok(&["adr", "--rp-km", "3", "--omega", "0.25"]);
    assert_eq!(sweep, adr);
}

#[test]
fn sweep_rows_recheck_and_summary() {
    let out = zoneshare(&["sweep", "--rp-km", "0:2:1", "--omega", "0,0.5,1"]);
    assert!(out.status.success());
    let weights = ScenarioFile::reference().to_config().unwrap().weights;
    let rows = read_adr_csv(out.stdout.as_slice(), &weights).unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[3].rp_m, 1000.0);
    assert_eq!(rows[3].omega_s, 0.0);
    let log = String::from_utf8(out.stderr).unwrap();
    assert!(log.starts_with("best: "), "{log}");
    assert!(log.contains("within 1% of best"));
}

#[test]
fn optimize_writes_the_near_optimal_rows() {
    let args = ["--rp-km", "0,6,12", "--omega", "0.5,0.75,1", "--near-tol", "0.05"];
    let all: Vec<AdrRow> = read_csv(ok(&[&["sweep"], &args[..]].concat()).as_slice()).unwrap();
    let near: Vec<AdrRow> = read_csv(ok(&[&["optimize"], &args[..]].concat()).as_slice()).unwrap();
    let best = all.iter().map(|r| r.ws_adr).fold(f64::NEG_INFINITY, f64::max);
    assert!(!near.is_empty());
    assert_eq!(near[0].ws_adr, best);
    for r in &all {
        let listed = near.contains(r);
        assert_eq!(listed, r.ws_adr >= best - 0.05 * best.abs(), "{r:?}");
    }
}

#[test]
fn output_file_and_gnuplot() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cov.dat");
    let stdout = ok(&[
        "coverage",
        "--engine",
        "analytic",
        "--thresholds-db",
        "0,3",
        "--gnuplot",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.matches("# class=").count(), 3);
    assert_eq!(text.matches("\n\n\n").count(), 2);

    let missing = Path::new("/definitely/not/here/out.csv");
    assert_eq!(code(&["adr", "-o", missing.to_str().unwrap()]), 2);
}

#[test]
fn scene_dump_is_reproducible() {
    let args = ["simulate-scene", "--sim-half-width-km", "3", "--seed", "7", "--trial", "2"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let rows: Vec<SceneRow> = read_csv(a.as_slice()).unwrap();
    assert!(rows.iter().any(|r| r.kind == "satellite" && r.shared_active.is_some()));
    assert!(rows.iter().any(|r| r.kind == "base_station" && r.shared_active.is_none()));
    assert_ne!(a, ok(&["simulate-scene", "--sim-half-width-km", "3", "--seed", "7", "--trial", "3"]));
}
