//! Renders a seeded random script, checks that segmentation recovers its
//! annotations, and writes a small reference/estimate corpus to disk.
//!
//! Run with `cargo run --example synth_corpus [out_dir]`.

use std::fs;
use std::path::PathBuf;

use pedal_eval::io::to_csv;
use pedal_eval::synth::random_script;
use pedal_eval::{perturb, render_script, segment_gestures, GestureConfig, PedalCurve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "synth_corpus".into())
        .into();
    fs::create_dir_all(&out)?;

    let mut manifest = String::from("reference,estimate\n");
    for seed in 0..5u64 {
        let rendered = render_script(&random_script(seed, 6)?)?;
        let recovered =
            segment_gestures(rendered.curve.values(), &GestureConfig::default()).intervals();
        assert_eq!(recovered, rendered.annotations.intervals);

        let counts = rendered.annotations.frame_counts();
        println!("seed {seed}: {} frames, {counts:?}", rendered.curve.len());

        let estimate = perturb(rendered.curve.values(), 0.03, 4, seed)?;
        let estimate = PedalCurve::new(100.0, estimate, "estimate")?;
        let (r, e) = (format!("ref{seed}.csv"), format!("est{seed}.csv"));
        fs::write(out.join(&r), to_csv(&rendered.curve))?;
        fs::write(out.join(&e), to_csv(&estimate))?;
        fs::write(
            out.join(format!("ref{seed}.annotations.json")),
            serde_json::to_string_pretty(&rendered.annotations)?,
        )?;
        manifest.push_str(&format!("{r},{e}\n"));
    }
    fs::write(out.join("manifest.csv"), manifest)?;
    println!("wrote {}", out.join("manifest.csv").display());
    Ok(())
}
