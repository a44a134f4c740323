//! Frame-level scores for a reference curve and a late, shallow estimate.
//!
//! Run with `cargo run --example frame_metrics`.

use pedal_eval::{align, evaluate_frames, AlignPolicy, FrameConfig, PedalCurve};

fn main() -> pedal_eval::Result<()> {
    // Half a second of pedal at 0.9, pressed again at 0.6.
    let mut reference = vec![0.0; 300];
    reference[20..70].fill(0.9);
    reference[150..260].fill(0.6);

    // The estimate is 5 frames late and 0.15 too shallow.
    let mut estimate = vec![0.0; 300];
    estimate[25..75].fill(0.75);
    estimate[155..265].fill(0.45);

    let pair = align(
        &PedalCurve::new(100.0, reference, "reference")?,
        &PedalCurve::new(100.0, estimate, "estimate")?,
        AlignPolicy::Strict,
    )?;
    let report = evaluate_frames(&pair, &FrameConfig::default())?;

    println!(
        "{} frames, pedal-on threshold {}",
        report.n_frames, report.binary_threshold
    );
    let b = report.binary.weighted;
    println!(
        "binary   P {:.3}  R {:.3}  F1 {:.3}",
        b.precision, b.recall, b.f1
    );
    let q = report.fourclass.weighted;
    println!(
        "4-class  P {:.3}  R {:.3}  F1 {:.3}  (macro F1 {:.3})",
        q.precision, q.recall, q.f1, report.fourclass.macro_avg.f1
    );
    println!("MSE {:.4}  MAE {:.4}", report.mse, report.mae);
    println!("4-class confusion (rows = reference bins):");
    for row in report.fourclass_confusion.counts() {
        println!("  {row:?}");
    }
    Ok(())
}
