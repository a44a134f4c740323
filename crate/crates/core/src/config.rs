//! Evaluation configuration file and its dotted-path overrides.

use serde::{Deserialize, Serialize};

use crate::action::ActionConfig;
use crate::curve::{AlignPolicy, DEFAULT_FRAME_RATE_HZ};
use crate::error::{PedalError, Result};
use crate::frame::FrameConfig;
use crate::gesture::GestureConfig;
use crate::shape::ShapeConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoConfig {
    /// Both curves are resampled to this rate before analysis.
    pub frame_rate_hz: f64,
    pub align_policy: AlignPolicy,
}

impl Default for IoConfig {
    fn default() -> Self {
        Self {
            frame_rate_hz: DEFAULT_FRAME_RATE_HZ,
            align_policy: AlignPolicy::Truncate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub frame: FrameConfig,
    pub action: ActionConfig,
    pub gesture: GestureConfig,
    pub shape: ShapeConfig,
    pub io: IoConfig,
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        self.frame.validate()?;
        self.action.validate()?;
        self.gesture.validate()?;
        self.shape.validate()?;
        if !(self.io.frame_rate_hz.is_finite() && self.io.frame_rate_hz > 0.0) {
            return Err(PedalError::InvalidConfig(format!(
                "io.frame_rate_hz must be positive, got {}",
                self.io.frame_rate_hz
            )));
        }
        Ok(())
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let config: EvalConfig =
            serde_json::from_slice(bytes).map_err(|e| PedalError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Applies one override such as `action.window_frames = "21"`.
    ///
    /// Dashes in the path are read as underscores, so `gesture.ratio-split`
    /// works too. The value is parsed as JSON when possible and as a string
    /// otherwise.
    pub fn set(&mut self, path: &str, value: &str) -> Result<()> {
        let path = path.replace('-', "_");
        let (section, field) = path.split_once('.').ok_or_else(|| {
            PedalError::InvalidConfig(format!("override `{path}` needs a section.field path"))
        })?;
        let mut doc = serde_json::to_value(*self).expect("config serializes");
        let slot = doc
            .get_mut(section)
            .and_then(|s| s.get_mut(field))
            .ok_or_else(|| PedalError::InvalidConfig(format!("unknown config key `{path}`")))?;
        *slot = serde_json::from_str(value)
            .unwrap_or_else(|_| serde_json::Value::String(value.to_string()));
        let updated: EvalConfig = serde_json::from_value(doc)
            .map_err(|e| PedalError::InvalidConfig(format!("{path}: {e}")))?;
        updated.validate()?;
        *self = updated;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_partial_files() {
        let c = EvalConfig::from_json(br#"{"action": {"window_frames": 21}}"#).unwrap();
        assert_eq!(c.action.window_frames, 21);
        assert_eq!(c.gesture, GestureConfig::default());
        assert_eq!(c.io.frame_rate_hz, 100.0);
    }

    #[test]
    fn echo_round_trips() {
        let mut c = EvalConfig::default();
        c.gesture.theta = 0.7;
        c.io.align_policy = AlignPolicy::Strict;
        assert_eq!(EvalConfig::from_json(c.to_json().as_bytes()).unwrap(), c);
    }

    #[test]
    fn overrides() {
        let mut c = EvalConfig::default();
        c.set("action.window-frames", "21").unwrap();
        c.set("io.align_policy", "strict").unwrap();
        c.set("gesture.ratio-split", "0.5").unwrap();
        assert_eq!(c.action.window_frames, 21);
        assert_eq!(c.io.align_policy, AlignPolicy::Strict);
        assert_eq!(c.gesture.ratio_split, 0.5);
        assert!(c.set("gesture.theta", "1.5").is_err());
        assert!(c.set("gesture.nope", "1").is_err());
        assert!(c.set("theta", "0.5").is_err());
        assert_eq!(c.gesture.theta, 0.65);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(EvalConfig::from_json(br#"{"frames": {}}"#).is_err());
        assert!(EvalConfig::from_json(br#"{"frame": {"threshold": 0.4}}"#).is_err());
    }
}
