//! Labeled sample composition and frame rasterization.
//!
//! A sample is one target dot plus `cfg.distractors` distractor dots, all
//! rendered as identical 2x2 white squares, together with stationary 4x4
//! start/finish markers. In positives the finish marker sits at the target's
//! final position; in negatives it sits at the final position of a uniformly
//! chosen distractor while the target is kept well away. Distractors whose
//! endpoint would make the label ambiguous are redrawn from their own
//! streams, up to `cfg.max_resample_attempts` each.

use crate::config::{GenConfig, Label, Layout, CANVAS_HEIGHT, CANVAS_WIDTH, CHANNELS};
use crate::rng::SampleStreams;
use crate::trajgen::{self, Point, Trajectory, DOT_SIZE};
use rand::Rng;
use std::fmt;
use thiserror::Error;

/// Marker edge length in pixels.
pub const MARKER_SIZE: usize = 4;

/// A dot is "inside" a marker when its final center is within this Chebyshev
/// distance of the marker center. The same rule is applied at generation and
/// classification time.
pub const CONTAIN_RADIUS: f64 = 1.5;

/// In negatives, the target's final center keeps at least this Chebyshev
/// distance from the finish-marker center.
pub const NEGATIVE_TARGET_MARGIN: f64 = 6.0;

/// No non-finisher dot may end within this Chebyshev distance of the
/// finish-marker center.
pub const EXCLUSION_RADIUS: f64 = 3.0;

/// Marker role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerKind {
    Start,
    Finish,
}

/// A stationary 4x4 marker square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Marker {
    /// Nominal center pixel (rounded dot position); distance rules use this.
    pub center: (i32, i32),
    pub kind: MarkerKind,
}

impl Marker {
    /// Marker centered at the rounded position.
    pub fn at(pos: Point, kind: MarkerKind) -> Self {
        Marker {
            center: pos.rounded(),
            kind,
        }
    }

    /// Center as a subpixel point for distance computations.
    pub fn center_point(&self) -> Point {
        Point::new(f64::from(self.center.0), f64::from(self.center.1))
    }

    /// Top-left pixel of the rendered 4x4 square, shifted to stay fully
    /// inside the canvas.
    pub fn pixel_origin(&self) -> (i32, i32) {
        let max = (CANVAS_WIDTH - MARKER_SIZE) as i32;
        (
            (self.center.0 - 1).clamp(0, max),
            (self.center.1 - 1).clamp(0, max),
        )
    }
}

/// Rendered frame tensor: `frames x height x width x channels`, 8-bit,
/// row-major with channels innermost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Video {
    pub frames: u32,
    pub height: u32,
    pub width: u32,
    pub channels: u32,
    pub data: Vec<u8>,
}

impl Video {
    pub fn zeroed(frames: u32, height: u32, width: u32, channels: u32) -> Self {
        let len = frames as usize * height as usize * width as usize * channels as usize;
        Video {
            frames,
            height,
            width,
            channels,
            data: vec![0; len],
        }
    }

    pub fn frame_len(&self) -> usize {
        self.height as usize * self.width as usize * self.channels as usize
    }

    pub fn frame(&self, t: usize) -> &[u8] {
        let len = self.frame_len();
        &self.data[t * len..(t + 1) * len]
    }

    pub fn frame_mut(&mut self, t: usize) -> &mut [u8] {
        let len = self.frame_len();
        &mut self.data[t * len..(t + 1) * len]
    }

    pub fn px(&self, t: usize, y: usize, x: usize, c: usize) -> u8 {
        let w = self.width as usize;
        let ch = self.channels as usize;
        self.frame(t)[(y * w + x) * ch + c]
    }
}

/// One labeled challenge video with its generation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoSample {
    pub frames: Video,
    pub label: Label,
    pub target: Trajectory,
    pub distractors: Vec<Trajectory>,
    pub start: Marker,
    pub finish: Marker,
    /// Dot that ends in the finish marker: 0 is the target, `i >= 1` is
    /// `distractors[i - 1]`.
    pub finisher_index: u32,
    pub sample_seed: u64,
    pub layout: Layout,
}

impl VideoSample {
    /// Trajectory of dot `index` under the 0-is-target convention.
    pub fn dot(&self, index: u32) -> &Trajectory {
        if index == 0 {
            &self.target
        } else {
            &self.distractors[index as usize - 1]
        }
    }

    pub fn dot_count(&self) -> u32 {
        1 + self.distractors.len() as u32
    }

    /// Final position of the dot designated to end in the finish marker.
    pub fn finisher_final(&self) -> Point {
        self.dot(self.finisher_index).last()
    }
}

/// Sample generation failures.
#[derive(Debug, Error)]
pub enum GenError {
    #[error("negative sample impossible without distractors")]
    NegativeNeedsDistractors,
    #[error(
        "resampling budget of {attempts} exhausted for dot {dot_index} \
         (frames={frames}, distractors={distractors}, speed={speed})"
    )]
    ResampleBudget {
        dot_index: u32,
        attempts: u32,
        frames: u32,
        distractors: u32,
        speed: u32,
    },
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
}

fn resample_error(cfg: &GenConfig, dot_index: u32) -> GenError {
    GenError::ResampleBudget {
        dot_index,
        attempts: cfg.max_resample_attempts,
        frames: cfg.frames,
        distractors: cfg.distractors,
        speed: cfg.speed,
    }
}

/// Draws a trajectory from `rng` until `accept` passes, within the budget.
fn draw_until<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &GenConfig,
    dot_index: u32,
    accept: impl Fn(&Trajectory) -> bool,
) -> Result<Trajectory, GenError> {
    for _ in 0..cfg.max_resample_attempts {
        let t = trajgen::generate_trajectory(rng, cfg);
        if accept(&t) {
            return Ok(t);
        }
    }
    Err(resample_error(cfg, dot_index))
}

/// Composes a positive sample: the target ends inside the finish marker and
/// every distractor ends clear of it.
pub fn compose_positive(streams: &SampleStreams, cfg: &GenConfig) -> Result<VideoSample, GenError> {
    let target = trajgen::generate_trajectory(&mut streams.dot_rng(0), cfg);
    let start = Marker::at(target.first(), MarkerKind::Start);
    let finish = Marker::at(target.last(), MarkerKind::Finish);
    let finish_center = finish.center_point();

    let mut distractors = Vec::with_capacity(cfg.distractors as usize);
    for d in 0..cfg.distractors {
        let dot_index = d + 1;
        let mut rng = streams.dot_rng(dot_index);
        distractors.push(draw_until(&mut rng, cfg, dot_index, |t| {
            t.last().chebyshev(finish_center) >= EXCLUSION_RADIUS
        })?);
    }

    Ok(assemble(
        cfg,
        streams.sample_seed(),
        Label::Positive,
        target,
        distractors,
        start,
        finish,
        0,
    ))
}

/// Composes a negative sample: a uniformly chosen distractor ends inside the
/// finish marker, the target ends at least [`NEGATIVE_TARGET_MARGIN`] away,
/// and every other dot keeps out of the exclusion zone.
pub fn compose_negative(streams: &SampleStreams, cfg: &GenConfig) -> Result<VideoSample, GenError> {
    if cfg.distractors == 0 {
        return Err(GenError::NegativeNeedsDistractors);
    }
    let finisher_index = 1 + streams.choice_rng().random_range(0..cfg.distractors);
    let finisher = trajgen::generate_trajectory(&mut streams.dot_rng(finisher_index), cfg);
    let finish = Marker::at(finisher.last(), MarkerKind::Finish);
    let finish_center = finish.center_point();

    let target = draw_until(&mut streams.dot_rng(0), cfg, 0, |t| {
        t.last().chebyshev(finish_center) >= NEGATIVE_TARGET_MARGIN
    })?;
    let start = Marker::at(target.first(), MarkerKind::Start);

    let mut distractors = Vec::with_capacity(cfg.distractors as usize);
    for d in 0..cfg.distractors {
        let dot_index = d + 1;
        if dot_index == finisher_index {
            distractors.push(finisher.clone());
            continue;
        }
        let mut rng = streams.dot_rng(dot_index);
        distractors.push(draw_until(&mut rng, cfg, dot_index, |t| {
            t.last().chebyshev(finish_center) >= EXCLUSION_RADIUS
        })?);
    }

    Ok(assemble(
        cfg,
        streams.sample_seed(),
        Label::Negative,
        target,
        distractors,
        start,
        finish,
        finisher_index,
    ))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    cfg: &GenConfig,
    sample_seed: u64,
    label: Label,
    target: Trajectory,
    distractors: Vec<Trajectory>,
    start: Marker,
    finish: Marker,
    finisher_index: u32,
) -> VideoSample {
    let mut video = Video::zeroed(
        cfg.frames,
        CANVAS_HEIGHT as u32,
        CANVAS_WIDTH as u32,
        CHANNELS as u32,
    );
    let mut positions = Vec::with_capacity(1 + distractors.len());
    for t in 0..cfg.frames as usize {
        positions.clear();
        positions.push(target.positions[t]);
        positions.extend(distractors.iter().map(|d| d.positions[t]));
        render_frame_into(video.frame_mut(t), &positions, &start, &finish, cfg.layout);
    }
    VideoSample {
        frames: video,
        label,
        target,
        distractors,
        start,
        finish,
        finisher_index,
        sample_seed,
        layout: cfg.layout,
    }
}

/// Generates sample `index` of a fold: even indices positive, odd negative,
/// so a fold of `n` holds exactly `ceil(n/2)` positives.
pub fn generate_sample(
    cfg: &GenConfig,
    stream_tag: u64,
    index: u64,
) -> Result<VideoSample, GenError> {
    let streams = SampleStreams::new(cfg.master_seed, stream_tag, index);
    if index % 2 == 0 {
        compose_positive(&streams, cfg)
    } else {
        compose_negative(&streams, cfg)
    }
}

/// Renders one 32x32x3 frame from dot positions and the two markers.
pub fn render_frame(
    dot_positions: &[Point],
    start: &Marker,
    finish: &Marker,
    layout: Layout,
) -> Vec<u8> {
    let mut buf = vec![0u8; CANVAS_WIDTH * CANVAS_HEIGHT * CHANNELS];
    render_frame_into(&mut buf, dot_positions, start, finish, layout);
    buf
}

/// Rasterizes into an existing `32*32*3` buffer.
///
/// Dots are 2x2 squares at intensity 255 anchored at `floor(position)`;
/// overlaps merge by per-pixel maximum. Markers are 4x4 squares at 255,
/// present in every frame. Layouts:
///
/// - mixed: dots in all three channels; start marker in channel 0, finish
///   marker in channel 2 (white dots over red/blue markers).
/// - engineered: channel 0 start marker only, channel 1 dots only, channel 2
///   finish marker only.
pub fn render_frame_into(
    buf: &mut [u8],
    dot_positions: &[Point],
    start: &Marker,
    finish: &Marker,
    layout: Layout,
) {
    assert_eq!(buf.len(), CANVAS_WIDTH * CANVAS_HEIGHT * CHANNELS);
    buf.fill(0);

    let dot_channels: &[usize] = match layout {
        Layout::Mixed => &[0, 1, 2],
        Layout::Engineered => &[1],
        Layout::Flow => panic!("flow frames are produced by encoding, not rendering"),
    };

    paint_square(buf, start.pixel_origin(), MARKER_SIZE, &[0]);
    paint_square(buf, finish.pixel_origin(), MARKER_SIZE, &[2]);
    for p in dot_positions {
        let (ax, ay) = p.floor_anchor();
        paint_square(buf, (ax, ay), DOT_SIZE, dot_channels);
    }
}

fn paint_square(buf: &mut [u8], origin: (i32, i32), size: usize, channels: &[usize]) {
    for dy in 0..size as i32 {
        for dx in 0..size as i32 {
            let (x, y) = (origin.0 + dx, origin.1 + dy);
            if x < 0 || y < 0 || x >= CANVAS_WIDTH as i32 || y >= CANVAS_HEIGHT as i32 {
                continue;
            }
            let base = (y as usize * CANVAS_WIDTH + x as usize) * CHANNELS;
            for &c in channels {
                buf[base + c] = 255;
            }
        }
    }
}

/// Number of frames in which the target's rendered square overlaps any
/// distractor's rendered square.
pub fn crossing_stats(sample: &VideoSample) -> u32 {
    let mut crossings = 0;
    for t in 0..sample.target.frames() {
        let (tx, ty) = sample.target.positions[t].floor_anchor();
        let overlapped = sample.distractors.iter().any(|d| {
            let (dx, dy) = d.positions[t].floor_anchor();
            (tx - dx).abs() < DOT_SIZE as i32 && (ty - dy).abs() < DOT_SIZE as i32
        });
        if overlapped {
            crossings += 1;
        }
    }
    crossings
}

/// One violated sample invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleViolation {
    /// `label` and `finisher_index` disagree.
    LabelFinisherMismatch,
    /// Finisher's final center is farther than [`CONTAIN_RADIUS`] from the
    /// finish-marker center.
    FinisherOutsideMarker { distance: f64 },
    /// Negative whose target ends closer than [`NEGATIVE_TARGET_MARGIN`].
    TargetTooCloseToFinish { distance: f64 },
    /// Non-finisher dot inside the exclusion zone.
    NonFinisherNearFinish { dot_index: u32, distance: f64 },
    /// Target's first position is not inside the start-marker region.
    TargetOutsideStart { distance: f64 },
    /// Wrong number of distractor trajectories.
    DistractorCount { expected: u32, actual: u32 },
    /// A dot's trajectory violates its own constraints.
    Trajectory {
        dot_index: u32,
        violations: Vec<trajgen::TrajViolation>,
    },
}

impl fmt::Display for SampleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleViolation::LabelFinisherMismatch => {
                write!(f, "label and finisher index disagree")
            }
            SampleViolation::FinisherOutsideMarker { distance } => {
                write!(f, "finisher ends {distance:.3} px from the finish center")
            }
            SampleViolation::TargetTooCloseToFinish { distance } => {
                write!(f, "negative target ends only {distance:.3} px from the finish")
            }
            SampleViolation::NonFinisherNearFinish { dot_index, distance } => {
                write!(f, "dot {dot_index} ends {distance:.3} px from the finish")
            }
            SampleViolation::TargetOutsideStart { distance } => {
                write!(f, "target starts {distance:.3} px from the start center")
            }
            SampleViolation::DistractorCount { expected, actual } => {
                write!(f, "expected {expected} distractors, found {actual}")
            }
            SampleViolation::Trajectory { dot_index, violations } => {
                write!(f, "dot {dot_index} trajectory violations: {violations:?}")
            }
        }
    }
}

/// Report from [`validate_sample`]; empty means the sample honors every
/// labeling invariant.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleReport {
    pub violations: Vec<SampleViolation>,
}

impl SampleReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Independently rechecks a sample against the labeling invariants, working
/// only from stored trajectories and marker centers.
pub fn validate_sample(sample: &VideoSample, cfg: &GenConfig) -> SampleReport {
    let mut violations = Vec::new();
    let finish_center = sample.finish.center_point();
    let start_center = sample.start.center_point();

    let label_ok = (sample.label == Label::Positive) == (sample.finisher_index == 0);
    if !label_ok {
        violations.push(SampleViolation::LabelFinisherMismatch);
    }

    if sample.distractors.len() as u32 != cfg.distractors {
        violations.push(SampleViolation::DistractorCount {
            expected: cfg.distractors,
            actual: sample.distractors.len() as u32,
        });
    }

    let finisher_dist = sample.finisher_final().chebyshev(finish_center);
    if finisher_dist > CONTAIN_RADIUS {
        violations.push(SampleViolation::FinisherOutsideMarker {
            distance: finisher_dist,
        });
    }

    if sample.label == Label::Negative {
        let d = sample.target.last().chebyshev(finish_center);
        if d < NEGATIVE_TARGET_MARGIN {
            violations.push(SampleViolation::TargetTooCloseToFinish { distance: d });
        }
    }

    for dot in 0..sample.dot_count() {
        if dot == sample.finisher_index {
            continue;
        }
        let d = sample.dot(dot).last().chebyshev(finish_center);
        if d < EXCLUSION_RADIUS {
            violations.push(SampleViolation::NonFinisherNearFinish {
                dot_index: dot,
                distance: d,
            });
        }
    }

    let start_dist = sample.target.first().chebyshev(start_center);
    if start_dist > CONTAIN_RADIUS {
        violations.push(SampleViolation::TargetOutsideStart { distance: start_dist });
    }

    for dot in 0..sample.dot_count() {
        let report = trajgen::validate_trajectory(sample.dot(dot), cfg);
        if !report.is_valid() {
            violations.push(SampleViolation::Trajectory {
                dot_index: dot,
                violations: report.violations,
            });
        }
    }

    SampleReport { violations }
}
