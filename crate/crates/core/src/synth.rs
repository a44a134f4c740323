//! Deterministic synthetic pedal curves with known segmentation.
//!
//! Archetypes:
//!
//! * pinnacle: quick raised-cosine rise, a domed apex that stays above 70% of
//!   the peak, quick fall;
//! * hill: rise to the peak, partial release to a lower shelf, final release;
//! * highland: rise, flat plateau at the peak, fall;
//! * mountain: rise, plateau oscillating sinusoidally below the peak, fall.
//!
//! Every gesture starts and ends just above the default `epsilon`, so a
//! rendered script separated by zero gaps segments back exactly into its
//! annotations. [`gen_gesture`] re-classifies its own output and rejects specs
//! whose shape does not land in the requested category.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, with Gaussian draws from `rand_distr::StandardNormal`.
//! ChaCha8 output is platform independent, so the same seed always gives the
//! same bytes.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::curve::PedalCurve;
use crate::error::{PedalError, Result};
use crate::gesture::{segment_gestures, GestureCategory, GestureConfig, Interval};

/// Ramps start this far above `epsilon` (or halfway to the peak if closer).
const FLOOR_MARGIN: f64 = 0.01;
/// Pinnacle apex dome dips to this fraction of the peak at its edges.
const PINNACLE_SHOULDER: f64 = 0.7;
/// Hill partial-release duration as a fraction of the gesture.
const HILL_DECAY_FRACTION: f64 = 0.15;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GestureSpec {
    pub category: GestureCategory,
    pub duration_frames: usize,
    pub peak_depth: f64,
    /// Share of the gesture spent rising.
    pub attack_fraction: f64,
    /// Share of the gesture spent on the final release.
    pub release_fraction: f64,
    /// Mountain only: oscillation amplitude in depth units.
    #[serde(default)]
    pub oscillation_amplitude: f64,
    /// Mountain only: oscillation period in frames.
    #[serde(default)]
    pub oscillation_period: f64,
    #[serde(default)]
    pub seed: u64,
}

impl GestureSpec {
    /// Draws a spec of the given category from parameter ranges that always
    /// satisfy the generator's constraints.
    pub fn sample(category: GestureCategory, seed: u64) -> Result<Self> {
        let mut r = rng(seed);
        let mut spec = GestureSpec {
            category,
            duration_frames: 0,
            peak_depth: 0.0,
            attack_fraction: 0.0,
            release_fraction: 0.0,
            oscillation_amplitude: 0.0,
            oscillation_period: 0.0,
            seed,
        };
        match category {
            GestureCategory::Pinnacle => {
                spec.duration_frames = r.random_range(20..100);
                spec.peak_depth = r.random_range(0.3..=1.0);
                spec.attack_fraction = r.random_range(0.05..0.15);
                spec.release_fraction = r.random_range(0.05..0.15);
            }
            GestureCategory::Hill => {
                spec.duration_frames = r.random_range(20..100);
                spec.peak_depth = r.random_range(0.4..=1.0);
                spec.attack_fraction = r.random_range(0.1..0.3);
                spec.release_fraction = r.random_range(0.1..0.3);
            }
            GestureCategory::Highland => {
                spec.duration_frames = r.random_range(100..600);
                spec.peak_depth = r.random_range(0.3..=1.0);
                spec.attack_fraction = r.random_range(0.05..0.2);
                spec.release_fraction = r.random_range(0.05..0.2);
            }
            GestureCategory::Mountain => {
                spec.duration_frames = r.random_range(100..600);
                spec.peak_depth = r.random_range(0.4..=1.0);
                spec.attack_fraction = r.random_range(0.05..0.2);
                spec.release_fraction = r.random_range(0.05..0.2);
                spec.oscillation_amplitude = spec.peak_depth * r.random_range(0.3..0.4);
                spec.oscillation_period = r.random_range(15.0..60.0);
            }
            GestureCategory::Plain => {
                return Err(PedalError::Spec("plain is not a gesture shape".into()));
            }
        }
        Ok(spec)
    }

    fn validate(&self, config: &GestureConfig) -> Result<()> {
        let fail = |msg: String| Err(PedalError::Spec(msg));
        let long = self.duration_frames >= config.duration_threshold_frames;
        match self.category {
            GestureCategory::Plain => return fail("plain is not a gesture shape".into()),
            GestureCategory::Pinnacle | GestureCategory::Hill if long => {
                return fail(format!(
                    "{} needs fewer than {} frames, got {}",
                    self.category, config.duration_threshold_frames, self.duration_frames
                ))
            }
            GestureCategory::Highland | GestureCategory::Mountain if !long => {
                return fail(format!(
                    "{} needs at least {} frames, got {}",
                    self.category, config.duration_threshold_frames, self.duration_frames
                ))
            }
            _ => {}
        }
        if self.duration_frames == 0 {
            return fail("duration must be positive".into());
        }
        if !(self.peak_depth > config.epsilon && self.peak_depth <= 1.0) {
            return fail(format!(
                "peak depth must be in ({}, 1], got {}",
                config.epsilon, self.peak_depth
            ));
        }
        for (name, f) in [
            ("attack", self.attack_fraction),
            ("release", self.release_fraction),
        ] {
            if !(f > 0.0 && f < 1.0) {
                return fail(format!("{name} fraction must be in (0, 1), got {f}"));
            }
        }
        if self.attack_fraction + self.release_fraction >= 1.0 {
            return fail("attack and release fractions must sum to less than 1".into());
        }
        if self.category == GestureCategory::Mountain {
            if self.oscillation_amplitude <= 0.0 {
                return fail("mountain needs a positive oscillation amplitude".into());
            }
            if self.oscillation_period <= 0.0 {
                return fail("mountain needs a positive oscillation period".into());
            }
            let trough = self.peak_depth - 2.0 * self.oscillation_amplitude;
            if trough >= config.theta * self.peak_depth {
                return fail(format!(
                    "oscillation trough {trough:.4} does not dip below theta * peak"
                ));
            }
            if trough <= config.epsilon {
                return fail(format!("oscillation trough {trough:.4} falls to epsilon"));
            }
        }
        Ok(())
    }
}

/// Raised-cosine weight for step `i` of `len`, going from 0 at `i = 0`
/// towards 1.
fn ease(i: usize, len: usize) -> f64 {
    (1.0 - (PI * i as f64 / len as f64).cos()) / 2.0
}

fn fill_rise(out: &mut [f64], from: f64, to: f64) {
    let len = out.len();
    for (i, v) in out.iter_mut().enumerate() {
        *v = from + (to - from) * ease(i, len);
    }
}

fn fill_fall(out: &mut [f64], from: f64, to: f64) {
    let len = out.len();
    for (i, v) in out.iter_mut().rev().enumerate() {
        *v = to + (from - to) * ease(i, len);
    }
}

fn frames(fraction: f64, duration: usize) -> usize {
    (fraction * duration as f64).round() as usize
}

fn shape_values(spec: &GestureSpec, config: &GestureConfig) -> Result<Vec<f64>> {
    let d = spec.duration_frames;
    let p = spec.peak_depth;
    let floor = config.epsilon + FLOOR_MARGIN.min((p - config.epsilon) / 2.0);
    let attack = frames(spec.attack_fraction, d);
    let release = frames(spec.release_fraction, d);
    let mut v = vec![p; d];

    let body_len = |used: usize| {
        d.checked_sub(used).filter(|&b| b >= 1).ok_or_else(|| {
            PedalError::Spec(format!(
                "{d} frames leave no room for the {} body",
                spec.category
            ))
        })
    };

    match spec.category {
        GestureCategory::Pinnacle => {
            let apex = body_len(attack + release)?;
            let shoulder = PINNACLE_SHOULDER * p;
            fill_rise(&mut v[..attack], floor, shoulder);
            for j in 0..apex {
                let u = (j as f64 + 0.5) / apex as f64;
                v[attack + j] = p * (1.0 - (1.0 - PINNACLE_SHOULDER) * (2.0 * u - 1.0).powi(2));
            }
            fill_fall(&mut v[d - release..], shoulder, floor);
        }
        GestureCategory::Hill => {
            let decay = frames(HILL_DECAY_FRACTION, d).max(1);
            body_len(attack + decay + release)?;
            // Seed picks the shelf depth of the partial release.
            let shelf = p * rng(spec.seed).random_range(0.35..0.5);
            if shelf <= floor {
                return Err(PedalError::Spec(format!(
                    "peak {p} too shallow for a partial release above epsilon"
                )));
            }
            fill_rise(&mut v[..attack], floor, p);
            fill_fall(&mut v[attack..attack + decay], p, shelf);
            for x in &mut v[attack + decay..d - release] {
                *x = shelf;
            }
            fill_fall(&mut v[d - release..], shelf, floor);
        }
        GestureCategory::Highland => {
            body_len(attack + release)?;
            fill_rise(&mut v[..attack], floor, p);
            fill_fall(&mut v[d - release..], p, floor);
        }
        GestureCategory::Mountain => {
            let body = body_len(attack + release)?;
            let a = spec.oscillation_amplitude;
            fill_rise(&mut v[..attack], floor, p);
            for j in 0..body {
                v[attack + j] = p - a + a * (2.0 * PI * j as f64 / spec.oscillation_period).cos();
            }
            fill_fall(&mut v[d - release..], p, floor);
        }
        GestureCategory::Plain => unreachable!("rejected by validate"),
    }
    Ok(v)
}

/// Generates one gesture under the default [`GestureConfig`].
pub fn gen_gesture(spec: &GestureSpec) -> Result<Vec<f64>> {
    gen_gesture_with(spec, &GestureConfig::default())
}

pub fn gen_gesture_with(spec: &GestureSpec, config: &GestureConfig) -> Result<Vec<f64>> {
    spec.validate(config)?;
    let values = shape_values(spec, config)?;

    let seg = segment_gestures(&values, config);
    match seg.gestures.as_slice() {
        [g] if g.start_frame == 0 && g.end_frame + 1 == values.len() => {
            if g.category != spec.category {
                return Err(PedalError::Spec(format!(
                    "parameters produce a {} (ratio {:.3}, {} frames), not a {}",
                    g.category,
                    g.max_depth_ratio,
                    values.len(),
                    spec.category
                )));
            }
        }
        _ => {
            return Err(PedalError::Spec(format!(
                "generated {} does not form a single gesture",
                spec.category
            )))
        }
    }
    Ok(values)
}

/// Shifts by `shift_frames` (padding with the edge value), adds seeded
/// Gaussian jitter, and clamps to `[0, 1]`.
pub fn perturb(
    values: &[f64],
    jitter_sigma: f64,
    shift_frames: i64,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = values.len() as i64;
    if shift_frames.abs() >= n.max(1) {
        return Err(PedalError::Parameter(format!(
            "shift of {shift_frames} frames is not smaller than the length {n}"
        )));
    }
    if !(jitter_sigma.is_finite() && jitter_sigma >= 0.0) {
        return Err(PedalError::Parameter(format!(
            "jitter sigma must be non-negative, got {jitter_sigma}"
        )));
    }
    let mut out: Vec<f64> = (0..n)
        .map(|i| values[(i - shift_frames).clamp(0, n - 1) as usize])
        .collect();
    if jitter_sigma > 0.0 {
        let mut r = rng(seed);
        for v in &mut out {
            let z: f64 = r.sample(StandardNormal);
            *v += jitter_sigma * z;
        }
    }
    for v in &mut out {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScriptItem {
    Gesture(GestureSpec),
    /// Zero-valued frames.
    Gap(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveScript {
    #[serde(default = "default_rate")]
    pub frame_rate_hz: f64,
    pub items: Vec<ScriptItem>,
}

fn default_rate() -> f64 {
    crate::curve::DEFAULT_FRAME_RATE_HZ
}

/// Ground-truth segmentation of a rendered script.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Annotations {
    pub intervals: Vec<Interval>,
}

impl Annotations {
    pub fn per_frame(&self) -> Vec<GestureCategory> {
        self.intervals
            .iter()
            .flat_map(|i| std::iter::repeat_n(i.category, i.len()))
            .collect()
    }

    pub fn frame_counts(&self) -> BTreeMap<GestureCategory, u64> {
        let mut counts: BTreeMap<GestureCategory, u64> =
            GestureCategory::ALL.iter().map(|&c| (c, 0)).collect();
        for i in &self.intervals {
            *counts.get_mut(&i.category).expect("all categories") += i.len() as u64;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedScript {
    pub curve: PedalCurve,
    pub annotations: Annotations,
}

pub fn render_script(script: &CurveScript) -> Result<RenderedScript> {
    let mut values = Vec::new();
    let mut intervals: Vec<Interval> = Vec::new();
    for item in &script.items {
        match item {
            ScriptItem::Gap(0) => {}
            ScriptItem::Gap(n) => {
                let start = values.len();
                values.resize(start + n, 0.0);
                match intervals.last_mut() {
                    Some(last) if last.category == GestureCategory::Plain => {
                        last.end = values.len() - 1
                    }
                    _ => intervals.push(Interval {
                        category: GestureCategory::Plain,
                        start,
                        end: values.len() - 1,
                    }),
                }
            }
            ScriptItem::Gesture(spec) => {
                if intervals
                    .last()
                    .is_some_and(|i| i.category != GestureCategory::Plain)
                {
                    return Err(PedalError::Spec(
                        "consecutive gestures need a gap between them".into(),
                    ));
                }
                let g = gen_gesture(spec)?;
                let start = values.len();
                values.extend_from_slice(&g);
                intervals.push(Interval {
                    category: spec.category,
                    start,
                    end: values.len() - 1,
                });
            }
        }
    }
    if values.is_empty() {
        return Err(PedalError::EmptyInput("script renders no frames".into()));
    }
    Ok(RenderedScript {
        curve: PedalCurve::new(script.frame_rate_hz, values, "synthetic")?,
        annotations: Annotations { intervals },
    })
}

/// A script of `n_gestures` random gestures separated by zero gaps.
pub fn random_script(seed: u64, n_gestures: usize) -> Result<CurveScript> {
    let mut r = rng(seed);
    let mut items = Vec::with_capacity(2 * n_gestures + 1);
    for _ in 0..n_gestures {
        items.push(ScriptItem::Gap(r.random_range(10..=80)));
        let category = GestureCategory::SHAPES[r.random_range(0..4)];
        items.push(ScriptItem::Gesture(GestureSpec::sample(
            category,
            r.random(),
        )?));
    }
    items.push(ScriptItem::Gap(r.random_range(10..=80)));
    Ok(CurveScript {
        frame_rate_hz: default_rate(),
        items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gesture::classify_gesture;

    fn highland(duration: usize, peak: f64) -> GestureSpec {
        GestureSpec {
            category: GestureCategory::Highland,
            duration_frames: duration,
            peak_depth: peak,
            attack_fraction: 0.1,
            release_fraction: 0.1,
            oscillation_amplitude: 0.0,
            oscillation_period: 0.0,
            seed: 0,
        }
    }

    #[test]
    fn highland_plateau_ratio() {
        let v = gen_gesture(&highland(200, 0.8)).unwrap();
        let seg = segment_gestures(&v, &GestureConfig::default());
        let g = &seg.gestures[0];
        assert_eq!(
            classify_gesture(g, &GestureConfig::default()),
            GestureCategory::Highland
        );
        assert!(g.max_depth_ratio >= 0.8);
        assert_eq!(g.max_depth, 0.8);
    }

    #[test]
    fn pinnacle_short_full_peak() {
        let spec = GestureSpec {
            category: GestureCategory::Pinnacle,
            duration_frames: 30,
            peak_depth: 1.0,
            ..highland(30, 1.0)
        };
        assert_eq!(gen_gesture(&spec).unwrap().len(), 30);
    }

    #[test]
    fn unsatisfiable_specs() {
        let mut spec = highland(150, 0.8);
        spec.category = GestureCategory::Pinnacle;
        assert!(matches!(gen_gesture(&spec), Err(PedalError::Spec(_))));

        let mut spec = highland(200, 0.8);
        spec.category = GestureCategory::Mountain;
        spec.oscillation_period = 30.0;
        assert!(matches!(gen_gesture(&spec), Err(PedalError::Spec(_))));

        let mut spec = highland(200, 0.8);
        spec.attack_fraction = 0.5;
        spec.release_fraction = 0.4;
        assert!(matches!(gen_gesture(&spec), Err(PedalError::Spec(_))));
    }

    #[test]
    fn perturb_contract() {
        let ramp: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        assert_eq!(perturb(&ramp, 0.0, 0, 7).unwrap(), ramp);
        let shifted = perturb(&ramp, 0.0, 5, 7).unwrap();
        assert!(shifted[..5].iter().all(|&v| v == ramp[0]));
        assert_eq!(shifted[5..], ramp[..95]);
        let back = perturb(&ramp, 0.0, -5, 7).unwrap();
        assert!(back[95..].iter().all(|&v| v == ramp[99]));
        let a = perturb(&ramp, 0.02, 0, 11).unwrap();
        let b = perturb(&ramp, 0.02, 0, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(perturb(&ramp, 0.0, 100, 0).is_err());
    }

    #[test]
    fn render_concatenates() {
        let script = CurveScript {
            frame_rate_hz: 100.0,
            items: vec![
                ScriptItem::Gap(100),
                ScriptItem::Gesture(highland(200, 0.8)),
                ScriptItem::Gap(100),
            ],
        };
        let out = render_script(&script).unwrap();
        assert_eq!(out.curve.len(), 400);
        assert_eq!(
            out.annotations.intervals[1],
            Interval {
                category: GestureCategory::Highland,
                start: 100,
                end: 299
            }
        );

        let single = CurveScript {
            frame_rate_hz: 100.0,
            items: vec![ScriptItem::Gesture(highland(200, 0.8))],
        };
        let out = render_script(&single).unwrap();
        assert_eq!(
            out.curve.values(),
            gen_gesture(&highland(200, 0.8)).unwrap().as_slice()
        );

        let adjacent = CurveScript {
            frame_rate_hz: 100.0,
            items: vec![
                ScriptItem::Gesture(highland(200, 0.8)),
                ScriptItem::Gesture(highland(200, 0.8)),
            ],
        };
        assert!(render_script(&adjacent).is_err());
    }

    #[test]
    fn script_json_shape() {
        let json = r#"{"frame_rate_hz": 100, "items": [{"gap": 10}, {"gesture": {"category": "highland",
            "duration_frames": 150, "peak_depth": 0.9, "attack_fraction": 0.1, "release_fraction": 0.1}}]}"#;
        let script: CurveScript = serde_json::from_str(json).unwrap();
        assert_eq!(render_script(&script).unwrap().curve.len(), 160);
    }
}
