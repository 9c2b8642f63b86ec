use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command as Process;
use std::sync::Arc;

use platelab::closed_form::{ball_mean_deflection, twoball_constant_load, TwoBallConfig};
use platelab::compressed_two_ball::{
    compressed_energy, disk_buckling_sigma, sigma_threshold_scan, DEFAULT_A_GRID,
    DEFAULT_SIGMA_GRID,
};
use platelab::geometry::Space;
use platelab::plate_fd::{rasterize, solve_plate, GridField, ShapeKind, ShapeSpec};
use platelab_cli::{parse_threads, run, Command, LoadArg, Options, SpaceArg, SCHEMA_VERSION};
use serde_json::Value;

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let path = tmp(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_platelab"))
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn ball_matches_library() {
    let opts = Options {
        space: Some(SpaceArg::Flat),
        dim: Some(2),
        radius: Some(1.0),
        ..Default::default()
    };
    let out = run(Command::Ball, &opts).unwrap();
    assert_eq!(out.json["schema_version"], SCHEMA_VERSION);
    assert_eq!(out.json["command"], "ball");
    let mean = f(&out.json["mean_deflection"]);
    assert_eq!(
        mean,
        ball_mean_deflection(Space::flat(2).unwrap(), 1.0).unwrap()
    );
    assert!((mean - PI / 192.0).abs() < 1e-15);
    assert_eq!(out.json["profile"].as_array().unwrap().len(), 11);
    assert!(out.csv.unwrap().starts_with("r,u\n"));

    let sphere = Options {
        space: Some(SpaceArg::Sphere),
        radius: Some(0.5),
        ..Default::default()
    };
    let out = run(Command::Ball, &sphere).unwrap();
    assert_eq!(
        f(&out.json["mean_deflection"]),
        ball_mean_deflection(Space::sphere(), 0.5).unwrap()
    );
}

#[test]
fn twoball_abs_is_constant_in_the_plane() {
    let opts = Options {
        dim: Some(2),
        samples: Some(50),
        ..Default::default()
    };
    let out = run(Command::TwoballAbs, &opts).unwrap();
    let rows = out.json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 50);
    for row in rows {
        assert!((f(&row["energy"]) + PI / 384.0).abs() < 1e-12);
    }
    let sphere = Options {
        space: Some(SpaceArg::Sphere),
        ..Default::default()
    };
    assert!(run(Command::TwoballAbs, &sphere).is_err());
}

#[test]
fn twoball_rows_match_library() {
    let opts = Options {
        space: Some(SpaceArg::Hyperbolic),
        radius: Some(2.0),
        samples: Some(9),
        ..Default::default()
    };
    let out = run(Command::Twoball, &opts).unwrap();
    for row in out.json["rows"].as_array().unwrap() {
        let a = f(&row["a"]);
        let cfg = TwoBallConfig::new(Space::hyperbolic(), 2.0, a).unwrap();
        let s = twoball_constant_load(&cfg).unwrap();
        assert_eq!(f(&row["energy"]), s.energy);
        assert_eq!(f(&row["energy_derivative"]), s.energy_derivative);
        assert_eq!(f(&row["b"]), cfg.b);
    }
    let single = Options {
        a: Some(0.3),
        ..Default::default()
    };
    assert_eq!(
        run(Command::Twoball, &single).unwrap().json["rows"]
            .as_array()
            .unwrap()
            .len(),
        1
    );
}

#[test]
fn compress_matches_library() {
    let opts = Options {
        sigma: Some(1.5),
        samples: Some(8),
        ..Default::default()
    };
    let out = run(Command::Compress, &opts).unwrap();
    for row in out.json["rows"].as_array().unwrap() {
        let a = f(&row["a"]);
        assert_eq!(f(&row["energy"]), compressed_energy(a, 1.5).unwrap().energy);
    }
    let scan = sigma_threshold_scan(DEFAULT_A_GRID, DEFAULT_SIGMA_GRID).unwrap();
    assert_eq!(f(&out.json["sigma2_estimate"]), scan.threshold);
    assert!(f(&out.json["slope_at_one"]).abs() <= 1e-3);

    let unbounded = Options {
        sigma: Some(3.6),
        a: Some(0.75),
        ..Default::default()
    };
    let out = run(Command::Compress, &unbounded).unwrap();
    assert_eq!(out.json["unbounded_points"], 1);
    assert!(out.json["rows"][0]["energy"].is_null());
    let negative = Options {
        sigma: Some(-1.0),
        ..Default::default()
    };
    assert!(run(Command::Compress, &negative).is_err());
}

#[test]
fn buckling_disk_output() {
    let out = run(Command::BucklingDisk, &Options::default()).unwrap();
    assert_eq!(f(&out.json["buckling_sigma"]), disk_buckling_sigma());
    assert_eq!(f(&out.json["buckling_rounded"]), 3.83);
    let s2 = f(&out.json["sigma2_estimate"]);
    assert!((2.7..=3.3).contains(&s2));
    assert!(out.csv.is_none());
}

#[test]
fn plate_solve_matches_library() {
    let config = write_config(
        "plate_solve.json",
        r#"[{"kind": "ellipse", "params": {"aspect": 2}, "target_area": 3.141592653589793, "h": 0.03125}]"#,
    );
    let opts = Options {
        config: Some(config),
        sigma: Some(0.5),
        ..Default::default()
    };
    let out = run(Command::PlateSolve, &opts).unwrap();
    let spec = ShapeSpec::new(ShapeKind::Ellipse, PI).with_h(1.0 / 32.0);
    let d = Arc::new(rasterize(&spec, 1.0 / 32.0).unwrap());
    let (_, r) = solve_plate(&d, &GridField::constant(d.clone(), 1.0), 0.5).unwrap();
    let rec = &out.json["records"][0];
    assert_eq!(rec["shape"], "ellipse");
    assert_eq!(f(&rec["compliance"]), r.compliance);
    assert_eq!(rec["iterations"].as_u64().unwrap() as usize, r.iterations);
}

#[test]
fn optimize_load_on_the_disk() {
    let opts = Options {
        h: Some(1.0 / 32.0),
        ..Default::default()
    };
    let out = run(Command::OptimizeLoad, &opts).unwrap();
    let runs = &out.json["runs"][0];
    assert_eq!(runs["iterations"], 1);
    assert_eq!(runs["stop"], "load_unchanged");
    assert_eq!(runs["negative_cells"], 0);
}

#[test]
fn signed_check_with_split_load() {
    let config = write_config(
        "two_disks.json",
        r#"[{"kind": "two_disks", "target_area": 3.141592653589793, "h": 0.03125}]"#,
    );
    let opts = Options {
        config: Some(config.clone()),
        load: Some(LoadArg::Split),
        ..Default::default()
    };
    let out = run(Command::SignedTalentiCheck, &opts).unwrap();
    assert!(out.passed);
    assert!(f(&out.json["reports"][0]["signed_margin"]) > 0.0);
    let talenti = Options {
        config: Some(config),
        load: Some(LoadArg::Split),
        ..Default::default()
    };
    assert!(run(Command::TalentiCheck, &talenti).is_err());
}

#[test]
fn bad_configuration_is_rejected() {
    let unknown = write_config(
        "unknown.json",
        r#"[{"kind": "disk", "target_area": 1, "weight": 2}]"#,
    );
    assert!(run(
        Command::PlateSolve,
        &Options {
            config: Some(unknown),
            ..Default::default()
        }
    )
    .is_err());
    let empty = write_config("empty.json", "[]");
    assert!(run(
        Command::PlateSolve,
        &Options {
            config: Some(empty),
            ..Default::default()
        }
    )
    .is_err());
    let missing = Options {
        config: Some(tmp("does_not_exist.json")),
        ..Default::default()
    };
    assert!(run(Command::PlateSolve, &missing).is_err());
    assert!(run(
        Command::Ball,
        &Options {
            samples: Some(1),
            ..Default::default()
        }
    )
    .is_err());
}

#[test]
fn thread_cap_parsing() {
    assert_eq!(parse_threads(None).unwrap(), None);
    assert_eq!(parse_threads(Some("3")).unwrap(), Some(3));
    assert!(parse_threads(Some("0")).is_err());
    assert!(parse_threads(Some("many")).is_err());
}

#[test]
fn binary_exit_codes() {
    let ok = binary().args(["ball", "--radius", "1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(doc["schema_version"], SCHEMA_VERSION);

    let usage = binary().args(["ball", "--bogus"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let threads = binary()
        .arg("ball")
        .env("PLATELAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
    assert!(!threads.stderr.is_empty());
    let geometry = binary()
        .args(["ball", "--space", "sphere", "--dim", "3"])
        .output()
        .unwrap();
    assert_eq!(geometry.status.code(), Some(2));
    let no_csv = binary()
        .args(["buckling-disk", "--out"])
        .arg(tmp("b.csv"))
        .output()
        .unwrap();
    assert_eq!(no_csv.status.code(), Some(2));

    let square = write_config(
        "coarse_square.json",
        r#"[{"kind": "square", "target_area": 3.141592653589793, "h": 0.03125}]"#,
    );
    let check = binary()
        .arg("saint-venant-check")
        .arg("--config")
        .arg(&square)
        .output()
        .unwrap();
    assert_eq!(check.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&check.stdout).unwrap();
    assert_eq!(doc["passed"], false);
}

#[test]
fn binary_writes_csv_and_json_files() {
    let csv = tmp("abs.csv");
    let out = binary()
        .args(["twoball-abs", "--samples", "5", "--out"])
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("a,b,c,d,energy,energy_derivative"));

    let json = tmp("ball.json");
    let out = binary()
        .args(["ball", "--out"])
        .arg(&json)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["command"], "ball");

    let field = tmp("field.csv");
    let out = binary()
        .args(["plate-solve", "--h", "0.0625", "--out"])
        .arg(&field)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&field)
        .unwrap()
        .starts_with("x,y,u\n"));
}

#[test]
fn output_is_independent_of_thread_count() {
    let run_with = |threads: &str| {
        let out = binary()
            .args(["plate-solve", "--h", "0.03125", "--sigma", "1"])
            .env("PLATELAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    assert_eq!(run_with("1"), run_with("4"));
}
