//! Press / hold / release states from the sliding regression, and how an
//! estimate's states compare.
//!
//! Run with `cargo run --example action_states`.

use pedal_eval::action::{segments_csv, window_fit};
use pedal_eval::{
    align, classify_frame_actions, evaluate_actions, segments_from_states, ActionConfig,
    AlignPolicy, PedalCurve,
};

fn main() -> pedal_eval::Result<()> {
    // Slow press over 80 frames, hold, quick release over 40.
    let mut v = vec![0.0; 40];
    v.extend((0..80).map(|i| i as f64 / 80.0 * 0.8));
    v.extend(vec![0.8; 100]);
    v.extend((0..40).map(|i| 0.8 - i as f64 / 40.0 * 0.8));
    v.extend(vec![0.0; 40]);

    let config = ActionConfig::default();
    for frame in [20, 80, 170, 260] {
        let fit = window_fit(&v, frame, config.window_frames);
        println!(
            "frame {frame:>3}: slope {:+.5}  r2 {:.3}",
            fit.slope, fit.r2
        );
    }

    let states = classify_frame_actions(&v, &config);
    print!("{}", segments_csv(&segments_from_states(&states)?));

    // An estimate that presses 10 frames late.
    let mut late = vec![0.0; 10];
    late.extend_from_slice(&v[..v.len() - 10]);
    let pair = align(
        &PedalCurve::new(100.0, v, "reference")?,
        &PedalCurve::new(100.0, late, "late")?,
        AlignPolicy::Strict,
    )?;
    let report = evaluate_actions(&pair, &config)?;
    for (state, scores) in &report.per_class {
        match scores {
            Some(s) => println!("{state:<8} F1 {:.3} (support {})", s.f1, s.support),
            None => println!("{state:<8} absent"),
        }
    }
    println!(
        "macro F1 {:.3}, weighted F1 {:.3}",
        report.macro_f1, report.weighted_f1
    );
    Ok(())
}
