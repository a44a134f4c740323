//! Produces the three plot-data documents for one evaluated pair.
//!
//! Run with `cargo run --example plot_data`.

use pedal_eval::report::{aggregate, PairEntry, PairStatus, Provenance};
use pedal_eval::synth::random_script;
use pedal_eval::{
    align, emit_plot_data, evaluate_aligned, perturb, render_script, AlignPolicy, EvalConfig,
    EvalOptions, EvalReport, PedalCurve, PlotKind,
};

fn main() -> pedal_eval::Result<()> {
    let reference = render_script(&random_script(11, 3)?)?.curve;
    let estimate = PedalCurve::new(100.0, perturb(reference.values(), 0.03, 5, 1)?, "estimate")?;
    let pair = align(&reference, &estimate, AlignPolicy::Strict)?;

    let config = EvalConfig::default();
    let options = EvalOptions {
        detail: true,
        ..Default::default()
    };
    let pairs = vec![PairEntry {
        reference: "reference".into(),
        estimate: "estimate".into(),
        status: PairStatus::Ok,
        error: None,
        scores: evaluate_aligned(&pair, &config, &options)?,
    }];
    let report = EvalReport {
        config,
        aggregate: aggregate(&pairs)?,
        pairs,
        provenance: Provenance {
            tool: "plot_data example".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            input_digests: Default::default(),
            generated_unix_seconds: None,
        },
    };

    print!(
        "{}",
        emit_plot_data(&report, PlotKind::DistributionBars, None)?.to_json()
    );
    let timeline = emit_plot_data(&report, PlotKind::SegmentTimeline, Some(0))?.to_json();
    println!(
        "segment_timeline: {} lines of JSON",
        timeline.lines().count()
    );
    let overlay = emit_plot_data(&report, PlotKind::CurveOverlay, Some(0))?.to_json();
    println!("curve_overlay: {} bytes", overlay.len());
    Ok(())
}
