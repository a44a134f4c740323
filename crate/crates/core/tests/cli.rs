use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pedal_eval::smf::{SmfWriter, TrackWriter};
use pedal_eval::EvalConfig;

fn pedal_eval(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pedal-eval"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn synth(dir: &Path) {
    let out = pedal_eval(
        dir,
        &[
            "synth",
            "--seed",
            "4",
            "--gestures",
            "5",
            "--out",
            "ref.csv",
            "--annotations",
            "ann.json",
            "--estimate-out",
            "est.csv",
            "--jitter",
            "0.02",
            "--shift",
            "-2",
            "--perturb-seed",
            "8",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn synth_writes_curve_and_annotations() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let ann: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("ann.json")).unwrap()).unwrap();
    let intervals = ann["intervals"].as_array().unwrap();
    assert_eq!(
        intervals
            .iter()
            .filter(|i| i["category"] != "plain")
            .count(),
        5
    );
    let last = intervals.last().unwrap()["end"].as_u64().unwrap();
    let rows = fs::read_to_string(dir.path().join("ref.csv"))
        .unwrap()
        .lines()
        .count() as u64;
    assert_eq!(rows, last + 2, "header plus one row per frame");
}

#[test]
fn level_subcommands_emit_only_their_section() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    for (cmd, key, absent) in [
        ("frames", "frame", "action"),
        ("actions", "action", "gesture"),
        ("gestures", "gesture", "frame"),
    ] {
        let out = pedal_eval(dir.path(), &[cmd, "ref.csv", "est.csv"]);
        assert!(out.status.success());
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(doc["pairs"][0].get(key).is_some(), "{cmd} lacks {key}");
        assert!(doc["pairs"][0].get(absent).is_none(), "{cmd} has {absent}");
    }
}

#[test]
fn overrides_and_config_file_reach_the_echo() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"gesture": {"theta": 0.7}}"#,
    )
    .unwrap();
    let out = pedal_eval(
        dir.path(),
        &[
            "eval",
            "ref.csv",
            "est.csv",
            "--config",
            "cfg.json",
            "--action.window-frames",
            "21",
            "--io.align-policy",
            "strict",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let echoed: EvalConfig = serde_json::from_value(doc["config"].clone()).unwrap();
    assert_eq!(echoed.gesture.theta, 0.7);
    assert_eq!(echoed.action.window_frames, 21);
    assert_eq!(echoed.io.align_policy, pedal_eval::AlignPolicy::Strict);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let bad_config = pedal_eval(
        dir.path(),
        &["eval", "ref.csv", "est.csv", "--gesture.theta", "1.5"],
    );
    assert_eq!(bad_config.status.code(), Some(2));
    let bad_usage = pedal_eval(dir.path(), &["eval", "--bogus"]);
    assert_eq!(bad_usage.status.code(), Some(2));
    fs::write(
        dir.path().join("m.csv"),
        "reference,estimate\nref.csv,est.csv\nref.csv,gone.csv\n",
    )
    .unwrap();
    let failed = pedal_eval(dir.path(), &["eval", "--manifest", "m.csv"]);
    assert_eq!(failed.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&failed.stdout).unwrap();
    assert_eq!(doc["pairs"][1]["status"], "failed");
    assert_eq!(doc["aggregate"]["n_failed"], 1);
}

#[test]
fn extract_writes_step_csv() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = SmfWriter::new(0, 480)
        .track(
            TrackWriter::new()
                .sustain(0, 0, 127)
                .sustain(480, 0, 0)
                .end_of_track(480),
        )
        .to_bytes();
    fs::write(dir.path().join("p.mid"), bytes).unwrap();
    let out = pedal_eval(dir.path(), &["extract", "p.mid", "--out", "p.csv"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("p.csv")).unwrap();
    let values: Vec<f64> = text.lines().skip(1).map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 101);
    assert!(values[..50].iter().all(|&v| v == 1.0));
    assert!(values[50..].iter().all(|&v| v == 0.0));
    assert_eq!(
        pedal_eval(dir.path(), &["extract", "missing.mid"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn plot_data_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let out = pedal_eval(
        dir.path(),
        &["eval", "ref.csv", "est.csv", "--out", "plain.json"],
    );
    assert!(out.status.success());
    let missing = pedal_eval(
        dir.path(),
        &["plot-data", "plain.json", "--kind", "curve_overlay"],
    );
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("not computed"));

    let out = pedal_eval(
        dir.path(),
        &[
            "eval",
            "ref.csv",
            "est.csv",
            "--detail",
            "--dump-dir",
            "dumps",
            "--out",
            "full.json",
        ],
    );
    assert!(out.status.success());
    let header = fs::read_to_string(dir.path().join("dumps/pair0_reference_actions.csv")).unwrap();
    assert!(header.starts_with("state,start_frame,end_frame\n"));
    let header = fs::read_to_string(dir.path().join("dumps/pair0_intervals.csv")).unwrap();
    assert!(header.starts_with("category,start,end,five_point_mse,fourier_mse\n"));

    for kind in ["distribution_bars", "curve_overlay", "segment_timeline"] {
        let out = pedal_eval(dir.path(), &["plot-data", "full.json", "--kind", kind]);
        assert!(
            out.status.success(),
            "{kind}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(doc["kind"], kind);
    }
    let out = pedal_eval(
        dir.path(),
        &["plot-data", "full.json", "--kind", "curve_overlay"],
    );
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let series = doc["series"].as_array().unwrap();
    assert_eq!(
        series[0]["values"].as_array().unwrap().len(),
        series[1]["values"].as_array().unwrap().len()
    );
}
