use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pedal_eval::action::segments_csv;
use pedal_eval::gesture::{gestures_csv, segment_gestures};
use pedal_eval::io::{to_csv, to_json};
use pedal_eval::report::PairEntry;
use pedal_eval::shape::intervals_csv;
use pedal_eval::synth::random_script;
use pedal_eval::{
    emit_plot_data, evaluate_corpus, extract_cc64, perturb, render_script, CurveScript, EvalConfig,
    EvalOptions, EvalReport, Levels, Manifest, PedalCurve, PedalError, PlotKind,
};

/// Sustain-pedal depth evaluation at frame, action, and gesture level.
#[derive(Parser)]
#[command(name = "pedal-eval", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frame-level scores only.
    Frames(EvalArgs),
    /// Action-level (press/hold/release) scores only.
    Actions(EvalArgs),
    /// Gesture-level contour scores only.
    Gestures(EvalArgs),
    /// All three levels.
    Eval(EvalArgs),
    /// Extract the CC64 sustain curve from a Standard MIDI File.
    Extract(ExtractArgs),
    /// Render a synthetic curve with ground-truth annotations.
    Synth(SynthArgs),
    /// Turn a saved report into plot-ready JSON series.
    PlotData(PlotArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON configuration file; flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long = "frame.binary-threshold", value_name = "X")]
    binary_threshold: Option<String>,
    #[arg(long = "action.window-frames", value_name = "N")]
    window_frames: Option<String>,
    #[arg(long = "action.slope-threshold", value_name = "X")]
    slope_threshold: Option<String>,
    #[arg(long = "action.r2-min", value_name = "X")]
    r2_min: Option<String>,
    #[arg(long = "gesture.epsilon", value_name = "X")]
    epsilon: Option<String>,
    #[arg(long = "gesture.theta", value_name = "X")]
    theta: Option<String>,
    #[arg(long = "gesture.ratio-split", value_name = "X")]
    ratio_split: Option<String>,
    #[arg(long = "gesture.duration-threshold-frames", value_name = "N")]
    duration_threshold_frames: Option<String>,
    #[arg(long = "shape.fourier-k", value_name = "N")]
    fourier_k: Option<String>,
    #[arg(long = "io.frame-rate-hz", value_name = "HZ")]
    frame_rate_hz: Option<String>,
    #[arg(long = "io.align-policy", value_name = "truncate|strict")]
    align_policy: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<EvalConfig, PedalError> {
        let mut config = match &self.config {
            Some(path) => {
                let bytes = fs::read(path).map_err(|source| PedalError::Io {
                    path: path.clone(),
                    source,
                })?;
                EvalConfig::from_json(&bytes)?
            }
            None => EvalConfig::default(),
        };
        let overrides = [
            ("frame.binary_threshold", &self.binary_threshold),
            ("action.window_frames", &self.window_frames),
            ("action.slope_threshold", &self.slope_threshold),
            ("action.r2_min", &self.r2_min),
            ("gesture.epsilon", &self.epsilon),
            ("gesture.theta", &self.theta),
            ("gesture.ratio_split", &self.ratio_split),
            (
                "gesture.duration_threshold_frames",
                &self.duration_threshold_frames,
            ),
            ("shape.fourier_k", &self.fourier_k),
            ("io.frame_rate_hz", &self.frame_rate_hz),
            ("io.align_policy", &self.align_policy),
        ];
        for (path, value) in overrides {
            if let Some(v) = value {
                config.set(path, v)?;
            }
        }
        Ok(config)
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Reference curve (.csv, .json, .mid).
    #[arg(required_unless_present = "manifest", requires = "estimate")]
    reference: Option<PathBuf>,
    /// Estimated curve.
    estimate: Option<PathBuf>,
    /// CSV with header `reference,estimate`; paths relative to the manifest.
    #[arg(long, conflicts_with = "reference")]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Full-precision floats instead of 6 significant digits.
    #[arg(long)]
    precise: bool,
    /// Include aligned curves, action segments, and interval scores.
    #[arg(long)]
    detail: bool,
    /// Record the generation time in provenance (breaks byte-identical reruns).
    #[arg(long)]
    timestamp: bool,
    /// Write per-pair action segment, gesture, and interval CSVs into this directory.
    #[arg(long, value_name = "DIR")]
    dump_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    /// Standard MIDI File.
    input: PathBuf,
    #[arg(long, default_value_t = 100.0)]
    frame_rate_hz: f64,
    /// Output file; `.json` writes JSON, anything else CSV. Defaults to CSV on stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Script JSON: {"frame_rate_hz": 100, "items": [{"gap": 50}, {"gesture": {...}}]}.
    #[arg(long, required_unless_present = "seed")]
    script: Option<PathBuf>,
    /// Generate a random script from this seed instead.
    #[arg(long, conflicts_with = "script")]
    seed: Option<u64>,
    /// Gestures in a random script.
    #[arg(long, default_value_t = 10)]
    gestures: usize,
    /// Curve output (`.json` or CSV).
    #[arg(long)]
    out: PathBuf,
    /// Annotation JSON output: {"intervals": [{category, start, end}]}.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Also write a perturbed copy of the curve here.
    #[arg(long)]
    estimate_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    shift: i64,
    #[arg(long, default_value_t = 0)]
    perturb_seed: u64,
}

#[derive(Args)]
struct PlotArgs {
    /// Report JSON written by `eval`.
    report: PathBuf,
    /// distribution_bars, curve_overlay, or segment_timeline.
    #[arg(long)]
    kind: String,
    /// Pair index; distribution bars default to the corpus aggregate.
    #[arg(long)]
    pair: Option<usize>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

/// Usage and configuration problems exit 2; everything else exits 1.
enum Failure {
    Usage(PedalError),
    Run(PedalError),
}

impl From<PedalError> for Failure {
    fn from(e: PedalError) -> Self {
        Failure::Run(e)
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), PedalError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| PedalError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_curve(path: &Path, curve: &PedalCurve) -> Result<(), PedalError> {
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let text = if is_json {
        to_json(curve) + "\n"
    } else {
        to_csv(curve)
    };
    write_out(Some(path), &text)
}

fn dump_pair(
    dir: &Path,
    index: usize,
    entry: &PairEntry,
    config: &EvalConfig,
) -> Result<(), PedalError> {
    let Some(detail) = &entry.scores.detail else {
        return Ok(());
    };
    let write = |name: &str, text: String| {
        write_out(Some(&dir.join(format!("pair{index}_{name}.csv"))), &text)
    };
    if let Some(segs) = &detail.action_segments {
        write("reference_actions", segments_csv(&segs.reference))?;
        write("estimate_actions", segments_csv(&segs.estimate))?;
    }
    if let Some(intervals) = &detail.intervals {
        write("intervals", intervals_csv(intervals))?;
        write(
            "reference_gestures",
            gestures_csv(&segment_gestures(&detail.reference, &config.gesture).gestures),
        )?;
        write(
            "estimate_gestures",
            gestures_csv(&segment_gestures(&detail.estimate, &config.gesture).gestures),
        )?;
    }
    Ok(())
}

fn run_eval(args: &EvalArgs, levels: Levels) -> Result<ExitCode, Failure> {
    let config = args.config.resolve().map_err(Failure::Usage)?;
    let manifest = match (&args.manifest, &args.reference, &args.estimate) {
        (Some(m), _, _) => Manifest::load(m)?,
        (None, Some(r), Some(e)) => {
            Manifest::single(r.display().to_string(), e.display().to_string())
        }
        _ => {
            return Err(Failure::Usage(PedalError::Parameter(
                "give REFERENCE ESTIMATE or --manifest".into(),
            )))
        }
    };
    let options = EvalOptions {
        levels,
        detail: args.detail || args.dump_dir.is_some(),
        timestamp: args.timestamp,
    };
    let mut report: EvalReport = evaluate_corpus(&manifest, &config, &options)?;
    if let Some(dir) = &args.dump_dir {
        fs::create_dir_all(dir).map_err(|source| PedalError::Io {
            path: dir.clone(),
            source,
        })?;
        for (i, entry) in report.pairs.iter().enumerate() {
            dump_pair(dir, i, entry, &config)?;
        }
        if !args.detail {
            for entry in &mut report.pairs {
                entry.scores.detail = None;
            }
        }
    }
    for entry in &report.pairs {
        if let Some(err) = &entry.error {
            eprintln!(
                "pair {} / {} failed: {err}",
                entry.reference, entry.estimate
            );
        }
    }
    write_out(args.out.as_deref(), &report.to_json(args.precise))?;
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn run_extract(args: &ExtractArgs) -> Result<ExitCode, Failure> {
    let bytes = fs::read(&args.input).map_err(|source| PedalError::Io {
        path: args.input.clone(),
        source,
    })?;
    let curve = extract_cc64(&bytes, args.frame_rate_hz)
        .map_err(|e| PedalError::File {
            path: args.input.clone(),
            source: Box::new(e),
        })?
        .with_source_id(args.input.display().to_string());
    match &args.out {
        Some(p) => write_curve(p, &curve)?,
        None => write_out(None, &to_csv(&curve))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn run_synth(args: &SynthArgs) -> Result<ExitCode, Failure> {
    let script: CurveScript = match (&args.script, args.seed) {
        (Some(path), _) => {
            let bytes = fs::read(path).map_err(|source| PedalError::Io {
                path: path.clone(),
                source,
            })?;
            serde_json::from_slice(&bytes).map_err(|e| {
                Failure::Usage(PedalError::Schema(format!("{}: {e}", path.display())))
            })?
        }
        (None, Some(seed)) => random_script(seed, args.gestures)?,
        (None, None) => {
            return Err(Failure::Usage(PedalError::Parameter(
                "give --script or --seed".into(),
            )))
        }
    };
    let rendered = render_script(&script)?;
    write_curve(&args.out, &rendered.curve)?;
    if let Some(p) = &args.annotations {
        let text = serde_json::to_string_pretty(&rendered.annotations)
            .expect("annotations serialize")
            + "\n";
        write_out(Some(p), &text)?;
    }
    if let Some(p) = &args.estimate_out {
        let values = perturb(
            rendered.curve.values(),
            args.jitter,
            args.shift,
            args.perturb_seed,
        )?;
        write_curve(
            p,
            &PedalCurve::new(rendered.curve.frame_rate_hz(), values, "perturbed")?,
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run_plot(args: &PlotArgs) -> Result<ExitCode, Failure> {
    let kind: PlotKind = args.kind.parse().map_err(Failure::Usage)?;
    let bytes = fs::read(&args.report).map_err(|source| PedalError::Io {
        path: args.report.clone(),
        source,
    })?;
    let report = EvalReport::from_json(&bytes)?;
    let doc = emit_plot_data(&report, kind, args.pair)?;
    write_out(args.out.as_deref(), &doc.to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Frames(a) => run_eval(a, Levels::FRAME),
        Command::Actions(a) => run_eval(a, Levels::ACTION),
        Command::Gestures(a) => run_eval(a, Levels::GESTURE),
        Command::Eval(a) => run_eval(a, Levels::ALL),
        Command::Extract(a) => run_extract(a),
        Command::Synth(a) => run_synth(a),
        Command::PlotData(a) => run_plot(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
