use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pedflow_core::sim::{run, SimParams};
use pedflow_core::tracker::{synthesize_descriptors, write_descriptors, SynthSpec};

fn pedflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pedflow"))
        .args(args)
        .arg("--quiet")
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.cfg");
    fs::write(&path, "[run]\nn_pedestrians = 20\nt_max = 120\n").unwrap();
    path.to_string_lossy().into_owned()
}

fn rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn simulate_writes_everything_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = pedflow(&[
            "--config",
            &cfg,
            "--seed",
            "4",
            "--out",
            out.to_str().unwrap(),
            "simulate",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["trap.atxy", "full.atxy", "diagnostics.csv", "system.csv", "instant.csv"] {
        let x = fs::read(a.join(name)).unwrap();
        assert!(!x.is_empty(), "{name} empty");
        assert_eq!(x, fs::read(b.join(name)).unwrap(), "{name} differs between reruns");
    }
}

#[test]
fn decimation_thins_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(pedflow(&["--config", &cfg, "--out", a.to_str().unwrap(), "simulate"])
        .status
        .success());
    assert!(pedflow(&[
        "--config",
        &cfg,
        "--decimate",
        "2",
        "--out",
        b.to_str().unwrap(),
        "simulate"
    ])
    .status
    .success());
    let (full, half) = (rows(&a.join("full.atxy")), rows(&b.join("full.atxy")));
    assert!(half * 2 >= full - 25 && half * 2 <= full + 25, "{full} vs {half}");
}

#[test]
fn config_errors_exit_two_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    for (text, key) in [("[forces]\nmass =\n", "mass"), ("[forces]\nwobble = 1\n", "wobble")] {
        fs::write(&cfg, text).unwrap();
        let o = pedflow(&[
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "simulate",
        ]);
        assert_eq!(o.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&o.stderr).contains(key));
    }
}

#[test]
fn zero_caps_leave_nothing_feasible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = pedflow(&[
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
        "calibrate",
        "--grid",
        "alpha=0.205",
        "--max-overlap",
        "0",
        "--max-pushback",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&dir.path().join("calibration.csv")), 1);
}

#[test]
fn sweep_rows_follow_values_and_speed_rises_with_vmax() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = pedflow(&[
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
        "sweep",
        "--variable",
        "vmax_mean",
        "--values",
        "1.0,1.8",
        "--replications",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (vi, si) = (col("value"), col("v_bar_sys"));
    let recs: Vec<(f64, f64)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[vi].parse().unwrap(), r[si].parse().unwrap())
        })
        .collect();
    assert_eq!(recs.iter().map(|r| r.0).collect::<Vec<_>>(), vec![1.0, 1.0, 1.8, 1.8]);
    assert!(recs[2].1 + recs[3].1 > recs[0].1 + recs[1].1);
    assert_eq!(rows(&dir.path().join("failures.csv")), 0);
}

#[test]
fn track_round_trip_writes_tracks() {
    let dir = tempfile::tempdir().unwrap();
    let truth = run(&SimParams {
        n_pedestrians: 6,
        seed: 2,
        ..SimParams::default()
    })
    .unwrap()
    .trap;
    let synth = synthesize_descriptors(
        &truth,
        &SynthSpec {
            noise_sigma: 0.01,
            ..SynthSpec::default()
        },
    )
    .unwrap();
    let desc = dir.path().join("desc.csv");
    write_descriptors(&synth.table, fs::File::create(&desc).unwrap()).unwrap();
    let o = pedflow(&["--out", dir.path().to_str().unwrap(), "track", desc.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["traced.csv", "events.csv", "tracks.atxy"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let tracks = pedflow_core::atxy::read_atxy(fs::File::open(dir.path().join("tracks.atxy")).unwrap()).unwrap();
    assert_eq!(tracks.ped_ids().len(), truth.ped_ids().len());
}

#[test]
fn metrics_and_lanes_read_simulated_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().to_str().unwrap();
    assert!(pedflow(&["--config", &cfg, "--out", out, "simulate"]).status.success());
    let trap = dir.path().join("trap.atxy");
    let full = dir.path().join("full.atxy");
    let m = dir.path().join("m");
    let o = pedflow(&["--out", m.to_str().unwrap(), "metrics", trap.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // the file carries no vmax, so only the kinematic columns must agree
    let kinematic = |path: &Path| -> Vec<String> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(|l| {
                let c: Vec<&str> = l.split(',').collect();
                [c[0], c[1], c[2], c[5]].join(",")
            })
            .collect()
    };
    assert_eq!(
        kinematic(&m.join("instant.csv")),
        kinematic(&dir.path().join("instant.csv"))
    );
    let o = pedflow(&["--out", out, "lanes", full.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(rows(&dir.path().join("lanes.csv")) > 0);
}

#[test]
fn plot_renders_sweep_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    fs::write(&csv, "k,u\n0.5,1.3\n1,1.1\n1.5,0.9\n").unwrap();
    let svg = dir.path().join("t.svg");
    let o = pedflow(&[
        "plot",
        csv.to_str().unwrap(),
        "--x",
        "k",
        "--y",
        "u",
        "--fit",
        "linear",
        "--output",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.contains("data-c0"));
}
