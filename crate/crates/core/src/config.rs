//! Dataset-variant configuration and shared vocabulary types.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Canvas width in pixels. The challenge is defined on a 32x32 canvas.
pub const CANVAS_WIDTH: usize = 32;
/// Canvas height in pixels.
pub const CANVAS_HEIGHT: usize = 32;
/// Channels per rendered frame.
pub const CHANNELS: usize = 3;

/// Frame counts a dataset variant may use.
pub const VALID_FRAMES: [u32; 3] = [32, 64, 128];
/// Speed multipliers a dataset variant may use.
pub const VALID_SPEEDS: [u32; 3] = [1, 2, 4];
/// Path length cap, expressed in equivalent normal-speed frames:
/// `frames * speed` must not exceed it. This is why no "very fast" 64-frame
/// or "fast" 128-frame variants exist.
pub const MAX_PATH_FRAMES: u32 = 128;

/// Channel arrangement of rendered frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// White dots in all three channels, red start marker in channel 0,
    /// blue finish marker in channel 2.
    Mixed,
    /// Start marker alone in channel 0, dots alone in channel 1, finish
    /// marker alone in channel 2.
    Engineered,
    /// Flow encoding: quantized horizontal/vertical flow in channels 0/1,
    /// raw dot channel in channel 2. Produced by encoding, never generated.
    Flow,
}

impl Layout {
    /// Channel holding raw dot pixels for this layout.
    pub fn dot_channel(self) -> usize {
        match self {
            Layout::Mixed | Layout::Engineered => 1,
            Layout::Flow => 2,
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layout::Mixed => write!(f, "mixed"),
            Layout::Engineered => write!(f, "engineered"),
            Layout::Flow => write!(f, "flow"),
        }
    }
}

impl FromStr for Layout {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mixed" => Ok(Layout::Mixed),
            "engineered" => Ok(Layout::Engineered),
            "flow" => Ok(Layout::Flow),
            other => Err(ConfigError::BadLayoutName(other.to_string())),
        }
    }
}

/// Train/test fold tag. Folds draw from disjoint seed streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fold {
    Train,
    Test,
}

impl Fold {
    /// Tag mixed into per-sample seeds so folds never share streams.
    pub fn stream_tag(self) -> u64 {
        match self {
            Fold::Train => 0,
            Fold::Test => 1,
        }
    }
}

impl fmt::Display for Fold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fold::Train => write!(f, "train"),
            Fold::Test => write!(f, "test"),
        }
    }
}

impl FromStr for Fold {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Fold::Train),
            "test" => Ok(Fold::Test),
            other => Err(ConfigError::BadFoldName(other.to_string())),
        }
    }
}

/// Binary sample label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    /// The target dot ends inside the finish marker.
    Positive,
    /// A distractor ends inside the finish marker; the target ends elsewhere.
    Negative,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Positive => write!(f, "positive"),
            Label::Negative => write!(f, "negative"),
        }
    }
}

impl FromStr for Label {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Label::Positive),
            "negative" => Ok(Label::Negative),
            other => Err(ConfigError::BadLabelName(other.to_string())),
        }
    }
}

/// Full parameterization of one dataset variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Frames per video: 32, 64, or 128.
    pub frames: u32,
    /// Number of distractor dots (at least 1).
    pub distractors: u32,
    /// Speed multiplier: 1 (normal), 2 (fast), 4 (very fast).
    pub speed: u32,
    /// Channel layout of rendered frames.
    pub layout: Layout,
    /// Canvas height; must be 32.
    pub canvas_height: u32,
    /// Canvas width; must be 32.
    pub canvas_width: u32,
    /// Samples in the train fold.
    pub train_count: u64,
    /// Samples in the test fold.
    pub test_count: u64,
    /// Root seed for all streams of this variant.
    pub master_seed: u64,
    /// Per-dot resampling budget when placement constraints fail.
    pub max_resample_attempts: u32,
}

impl GenConfig {
    /// Builds a validated config with default fold sizes and budget.
    pub fn new(
        frames: u32,
        distractors: u32,
        speed: u32,
        layout: Layout,
        master_seed: u64,
    ) -> Result<Self, ConfigError> {
        let cfg = GenConfig {
            frames,
            distractors,
            speed,
            layout,
            canvas_height: CANVAS_HEIGHT as u32,
            canvas_width: CANVAS_WIDTH as u32,
            train_count: 20_000,
            test_count: 20_000,
            master_seed,
            max_resample_attempts: 1_000,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every config invariant.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !VALID_FRAMES.contains(&self.frames) {
            return Err(ConfigError::BadFrames(self.frames));
        }
        if !VALID_SPEEDS.contains(&self.speed) {
            return Err(ConfigError::BadSpeed(self.speed));
        }
        if self.frames * self.speed > MAX_PATH_FRAMES {
            return Err(ConfigError::PathBudget {
                frames: self.frames,
                speed: self.speed,
            });
        }
        if self.canvas_height != CANVAS_HEIGHT as u32 || self.canvas_width != CANVAS_WIDTH as u32 {
            return Err(ConfigError::BadCanvas(self.canvas_height, self.canvas_width));
        }
        if self.distractors == 0 {
            return Err(ConfigError::NoDistractors);
        }
        if self.layout == Layout::Flow {
            return Err(ConfigError::FlowNotGenerable);
        }
        if self.max_resample_attempts == 0 {
            return Err(ConfigError::NoResampleBudget);
        }
        Ok(())
    }

    /// Base-walk step count for one trajectory: `speed * (frames - 1)`.
    pub fn base_steps(&self) -> usize {
        (self.speed * (self.frames - 1)) as usize
    }
}

/// Configuration rejection reasons.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("frame count {0} is not one of 32, 64, 128")]
    BadFrames(u32),
    #[error("speed multiplier {0} is not one of 1, 2, 4")]
    BadSpeed(u32),
    #[error("frames {frames} x speed {speed} exceeds the 128-frame path budget")]
    PathBudget { frames: u32, speed: u32 },
    #[error("canvas must be exactly 32x32, got {0}x{1}")]
    BadCanvas(u32, u32),
    #[error("at least one distractor is required")]
    NoDistractors,
    #[error("flow layout is produced by encoding, not generation")]
    FlowNotGenerable,
    #[error("max_resample_attempts must be positive")]
    NoResampleBudget,
    #[error("unknown layout name {0:?} (expected mixed, engineered, or flow)")]
    BadLayoutName(String),
    #[error("unknown fold name {0:?} (expected train or test)")]
    BadFoldName(String),
    #[error("unknown label {0:?} (expected positive or negative)")]
    BadLabelName(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_frame_speed_combos_are_exactly_six() {
        let mut valid = Vec::new();
        for frames in [32u32, 64, 128] {
            for speed in [1u32, 2, 4] {
                if GenConfig::new(frames, 1, speed, Layout::Mixed, 0).is_ok() {
                    valid.push((frames, speed));
                }
            }
        }
        assert_eq!(
            valid,
            vec![(32, 1), (32, 2), (32, 4), (64, 1), (64, 2), (128, 1)]
        );
    }

    #[test]
    fn rejects_zero_distractors() {
        assert_eq!(
            GenConfig::new(32, 0, 1, Layout::Mixed, 0),
            Err(ConfigError::NoDistractors)
        );
    }

    #[test]
    fn rejects_overlong_paths() {
        assert!(matches!(
            GenConfig::new(64, 1, 4, Layout::Mixed, 0),
            Err(ConfigError::PathBudget { .. })
        ));
        assert!(matches!(
            GenConfig::new(128, 1, 2, Layout::Mixed, 0),
            Err(ConfigError::PathBudget { .. })
        ));
    }

    #[test]
    fn label_round_trips_through_strings() {
        for label in [Label::Positive, Label::Negative] {
            assert_eq!(label.to_string().parse::<Label>().unwrap(), label);
        }
        assert!("maybe".parse::<Label>().is_err());
    }
}
