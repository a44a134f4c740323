//! Evaluation of continuous sustain-pedal depth estimates.
//!
//! A pedal curve is a sequence of depths in `[0, 1]` at a fixed frame rate
//! (100 Hz by default). An estimated curve is scored against a reference at
//! three levels:
//!
//! * [`frame`]: binary and four-class precision / recall / F1, MSE and MAE;
//! * [`action`]: per-frame press / hold / release states from a sliding
//!   least-squares slope, compared as a three-class problem;
//! * [`gesture`] and [`shape`]: the reference is split into gestures, each
//!   classified as pinnacle, hill, highland, or mountain, and the two
//!   contours are compared over every interval with a low-pass Fourier MSE
//!   and a five-point landmark MSE.
//!
//! Curves come from CSV, JSON, or Standard MIDI Files ([`io`], [`smf`]).
//! [`synth`] generates curves with known segmentation for testing, and
//! [`report`] runs whole corpora and writes deterministic JSON reports.
//!
//! The runnable programs under `examples/` walk through each of these.
//!
//! ```
//! use pedal_eval::{align, evaluate_frames, AlignPolicy, FrameConfig, PedalCurve};
//!
//! let reference = PedalCurve::new(100.0, vec![0.0, 0.0, 1.0, 1.0], "ref")?;
//! let estimate = PedalCurve::new(100.0, vec![0.0, 1.0, 1.0, 0.0], "est")?;
//! let pair = align(&reference, &estimate, AlignPolicy::Strict)?;
//! let report = evaluate_frames(&pair, &FrameConfig::default())?;
//! assert_eq!(report.binary.weighted.f1, 0.5);
//! assert_eq!(report.mse, 0.5);
//! # Ok::<(), pedal_eval::PedalError>(())
//! ```

pub mod action;
pub mod config;
pub mod confusion;
pub mod curve;
pub mod error;
pub mod frame;
pub mod gesture;
pub mod io;
pub mod plot;
pub mod report;
pub mod shape;
pub mod smf;
pub mod synth;

pub use action::{
    classify_frame_actions, evaluate_actions, segments_from_states, window_fit, ActionConfig,
    ActionReport, ActionSegment, ActionState, WindowFit,
};
pub use config::{EvalConfig, IoConfig};
pub use confusion::{Averaging, ClassScores, ConfusionMatrix, Scores, Summary};
pub use curve::{align, resample, AlignPolicy, AlignedPair, PedalCurve, DEFAULT_FRAME_RATE_HZ};
pub use error::{PedalError, Result};
pub use frame::{
    binarize, evaluate_frames, quantize4, regression_errors, FrameConfig, FrameReport,
};
pub use gesture::{
    classify_gesture, gesture_distribution, max_depth_ratio, segment_gestures, Gesture,
    GestureCategory, GestureConfig, Interval, Segmentation,
};
pub use io::{load_csv, load_curve_file, load_json, CurveFormat};
pub use plot::{emit_plot_data, PlotDocument, PlotKind};
pub use report::{
    evaluate_aligned, evaluate_corpus, evaluate_pair, EvalOptions, EvalReport, Levels, Manifest,
};
pub use shape::{
    evaluate_gestures, five_point_mse, five_points, fourier_mse, lowpass_reconstruct, raw_mse,
    GestureReport, ShapeConfig,
};
pub use smf::extract_cc64;
pub use synth::{gen_gesture, perturb, render_script, CurveScript, GestureSpec, ScriptItem};
