//! Evaluates a manifest of curve pairs and prints the corpus aggregates.
//!
//! Run with `cargo run --example corpus_eval [manifest.csv]`. Without an
//! argument a small corpus is synthesized in a temporary directory.

use std::fs;
use std::path::PathBuf;

use pedal_eval::io::to_csv;
use pedal_eval::synth::random_script;
use pedal_eval::{
    evaluate_corpus, perturb, render_script, EvalConfig, EvalOptions, GestureCategory, Manifest,
    PedalCurve,
};

fn demo_manifest() -> Result<PathBuf, Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("pedal_eval_corpus_demo");
    fs::create_dir_all(&dir)?;
    let mut manifest = String::from("reference,estimate\n");
    for seed in 0..4u64 {
        let r = render_script(&random_script(seed, 5)?)?.curve;
        let e = PedalCurve::new(
            100.0,
            perturb(r.values(), 0.02 * (seed + 1) as f64, seed as i64, seed)?,
            "e",
        )?;
        fs::write(dir.join(format!("r{seed}.csv")), to_csv(&r))?;
        fs::write(dir.join(format!("e{seed}.csv")), to_csv(&e))?;
        manifest.push_str(&format!("r{seed}.csv,e{seed}.csv\n"));
    }
    manifest.push_str("r0.csv,missing.csv\n");
    fs::write(dir.join("manifest.csv"), manifest)?;
    Ok(dir.join("manifest.csv"))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => demo_manifest()?,
    };
    let report = evaluate_corpus(
        &Manifest::load(&path)?,
        &EvalConfig::default(),
        &EvalOptions::default(),
    )?;

    for p in &report.pairs {
        match (&p.error, &p.scores.frame) {
            (Some(e), _) => println!("{} / {}: FAILED {e}", p.reference, p.estimate),
            (None, Some(f)) => println!(
                "{} / {}: binary F1 {:.3}  MSE {:.5}",
                p.reference, p.estimate, f.binary.weighted.f1, f.mse
            ),
            _ => {}
        }
    }
    let agg = &report.aggregate;
    println!(
        "\n{} pairs, {} failed, {} frames",
        agg.n_pairs, agg.n_failed, agg.n_frames
    );
    if let Some(f) = &agg.frame {
        println!(
            "frame   binary F1 {:.3}  4-class F1 {:.3}  MSE {:.5}",
            f.binary.weighted.f1, f.fourclass.weighted.f1, f.mse
        );
    }
    if let Some(a) = &agg.action {
        println!(
            "action  macro F1 {:.3}  weighted F1 {:.3}",
            a.macro_f1, a.weighted_f1
        );
    }
    if let Some(g) = &agg.gesture {
        for c in GestureCategory::ALL {
            let s = &g.per_category[&c];
            if let (Some(fp), Some(fo)) = (s.five_point_mse, s.fourier_mse) {
                println!(
                    "gesture {c:<9} {:>5} frames  5-point {fp:.5}  fourier {fo:.5}",
                    s.n_frames
                );
            }
        }
    }
    std::process::exit(report.exit_code());
}
