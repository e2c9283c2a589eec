//! Constrained random-walk trajectories with speed scaling by subsampling.
//!
//! A base walk advances exactly [`BASE_STEP_LEN`] pixels per step while the
//! heading changes by at most [`MAX_BEND_DEG`] degrees between consecutive
//! steps, so dots meander without acute turns. Steps that would leave the
//! canvas reflect the offending heading component; reflections are exempt
//! from the bend bound and flagged per step. A speed-`k` trajectory is the
//! stride-`k` subsampling of a `k`-times-longer base walk, which scales path
//! length by exactly `k` relative to normal speed.

use crate::config::GenConfig;
use rand::Rng;
use std::f64::consts::TAU;
use thiserror::Error;

/// Base-walk displacement per step, in pixels. Fixed at the maximum the
/// challenge allows so speed multipliers and arc lengths are exact.
pub const BASE_STEP_LEN: f64 = 2.0;

/// Bend bound between consecutive base steps, in degrees.
pub const MAX_BEND_DEG: f64 = 20.0;

/// Bend bound in radians.
pub const MAX_BEND_RAD: f64 = MAX_BEND_DEG * std::f64::consts::PI / 180.0;

/// Numeric slack for recomputed lengths and angles.
pub const CONSTRAINT_TOL: f64 = 1e-9;

/// Rendered dot edge length in pixels (dots are 2x2 squares).
pub const DOT_SIZE: usize = 2;

/// A subpixel position on the canvas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Chebyshev (L-infinity) distance.
    pub fn chebyshev(&self, other: Point) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    /// Euclidean distance.
    pub fn dist(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Top-left pixel of the 2x2 square rendered for this position.
    pub fn floor_anchor(&self) -> (i32, i32) {
        (self.x.floor() as i32, self.y.floor() as i32)
    }

    /// Nearest integer pixel, used for marker placement.
    pub fn rounded(&self) -> (i32, i32) {
        (self.x.round() as i32, self.y.round() as i32)
    }
}

/// Upper bound of the reflecting box for dot positions: the 2x2 square
/// anchored at `floor(position)` must stay inside the canvas.
pub fn position_bound(canvas: usize) -> f64 {
    (canvas - DOT_SIZE) as f64
}

/// An unsubsampled walk: one point per base step plus the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct BasePath {
    /// Walk positions; `points.len() == steps + 1`.
    pub points: Vec<Point>,
    /// Heading of each step, after any reflection.
    pub headings: Vec<f64>,
    /// Whether each step reflected off a canvas boundary.
    pub reflected: Vec<bool>,
}

impl BasePath {
    pub fn steps(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    /// Sum of stored step lengths.
    pub fn arc_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0].dist(w[1]))
            .sum()
    }
}

/// Per-frame dot positions together with the base walk they were sampled
/// from.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// One position per frame; `positions[i] == base.points[i * speed]`.
    pub positions: Vec<Point>,
    /// The unsubsampled walk.
    pub base: BasePath,
    /// Stride used to subsample the base walk.
    pub speed: u32,
}

impl Trajectory {
    pub fn frames(&self) -> usize {
        self.positions.len()
    }

    pub fn first(&self) -> Point {
        self.positions[0]
    }

    pub fn last(&self) -> Point {
        *self.positions.last().expect("trajectory has at least one point")
    }
}

/// Trajectory construction failures.
#[derive(Debug, Error, PartialEq)]
pub enum TrajError {
    #[error("base path has {actual} points; speed {speed} x {frames} frames needs {expected}")]
    LengthMismatch {
        actual: usize,
        expected: usize,
        speed: u32,
        frames: u32,
    },
    #[error("speed multiplier must be positive")]
    ZeroSpeed,
}

/// Samples a base walk of `n_steps` steps.
///
/// The start position is uniform over the in-bounds box, the initial heading
/// uniform over `[0, 2*pi)`. Each step turns by a uniform draw from
/// `[-20deg, +20deg]` and advances exactly [`BASE_STEP_LEN`] pixels; steps
/// that would exit the canvas have the offending displacement component
/// negated and are flagged in [`BasePath::reflected`].
pub fn sample_base_walk<R: Rng + ?Sized>(
    rng: &mut R,
    n_steps: usize,
    cfg: &GenConfig,
) -> BasePath {
    let bound = position_bound(cfg.canvas_width as usize);
    let mut x: f64 = rng.random_range(0.0..bound);
    let mut y: f64 = rng.random_range(0.0..bound);
    let mut heading: f64 = rng.random_range(0.0..TAU);

    let mut points = Vec::with_capacity(n_steps + 1);
    let mut headings = Vec::with_capacity(n_steps);
    let mut reflected = Vec::with_capacity(n_steps);
    points.push(Point::new(x, y));

    for _ in 0..n_steps {
        let turn: f64 = rng.random_range(-MAX_BEND_RAD..=MAX_BEND_RAD);
        heading += turn;
        let mut dx = BASE_STEP_LEN * heading.cos();
        let mut dy = BASE_STEP_LEN * heading.sin();
        let mut bounced = false;
        if x + dx < 0.0 || x + dx > bound {
            dx = -dx;
            bounced = true;
        }
        if y + dy < 0.0 || y + dy > bound {
            dy = -dy;
            bounced = true;
        }
        if bounced {
            heading = dy.atan2(dx);
        }
        x += dx;
        y += dy;
        points.push(Point::new(x, y));
        headings.push(heading);
        reflected.push(bounced);
    }

    BasePath {
        points,
        headings,
        reflected,
    }
}

/// Subsamples every `speed`-th base point into a per-frame trajectory.
///
/// The base walk must contain exactly `speed * (frames - 1) + 1` points.
pub fn subsample_speed(base: BasePath, speed: u32, frames: u32) -> Result<Trajectory, TrajError> {
    if speed == 0 {
        return Err(TrajError::ZeroSpeed);
    }
    let expected = speed as usize * (frames as usize - 1) + 1;
    if base.points.len() != expected {
        return Err(TrajError::LengthMismatch {
            actual: base.points.len(),
            expected,
            speed,
            frames,
        });
    }
    let positions = (0..frames as usize)
        .map(|i| base.points[i * speed as usize])
        .collect();
    Ok(Trajectory {
        positions,
        base,
        speed,
    })
}

/// Samples a full trajectory for one dot under `cfg`.
pub fn generate_trajectory<R: Rng + ?Sized>(rng: &mut R, cfg: &GenConfig) -> Trajectory {
    let base = sample_base_walk(rng, cfg.base_steps(), cfg);
    subsample_speed(base, cfg.speed, cfg.frames)
        .expect("base walk length matches config by construction")
}

/// One violated trajectory invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum TrajViolation {
    /// Base step `step` has length `len` instead of [`BASE_STEP_LEN`].
    StepLength { step: usize, len: f64 },
    /// Non-reflection turn into base step `step` exceeds the bend bound.
    Bend { step: usize, degrees: f64 },
    /// Base point `index` leaves the reflecting box.
    BaseOutOfBounds { index: usize },
    /// Frame position `frame` would render outside the canvas.
    PositionOutOfBounds { frame: usize },
    /// `positions[frame]` is not the `frame * speed`-th base point.
    SubsampleMismatch { frame: usize },
    /// Base walk length disagrees with `speed * (frames - 1) + 1`.
    BaseLength { expected: usize, actual: usize },
    /// Per-frame displacement at `frame` exceeds `2 * speed` pixels.
    FrameDisplacement { frame: usize, len: f64 },
}

/// Constraint report from [`validate_trajectory`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajReport {
    pub violations: Vec<TrajViolation>,
}

impl TrajReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Recomputes every trajectory invariant from stored positions.
///
/// Step lengths and turn angles are rederived with independent arithmetic
/// (difference vectors, `hypot`, `atan2`) rather than trusted from the
/// generator's stored headings, so this doubles as an oracle for the
/// generator itself.
pub fn validate_trajectory(t: &Trajectory, cfg: &GenConfig) -> TrajReport {
    let mut violations = Vec::new();
    let bound = position_bound(cfg.canvas_width as usize);
    let speed = t.speed as usize;

    let expected_base = speed * (t.positions.len().saturating_sub(1)) + 1;
    if t.base.points.len() != expected_base {
        violations.push(TrajViolation::BaseLength {
            expected: expected_base,
            actual: t.base.points.len(),
        });
    }

    // Step lengths and bend angles, recomputed from raw positions.
    let steps: Vec<(f64, f64)> = t
        .base
        .points
        .windows(2)
        .map(|w| (w[1].x - w[0].x, w[1].y - w[0].y))
        .collect();
    for (i, &(dx, dy)) in steps.iter().enumerate() {
        let len = dx.hypot(dy);
        let is_reflection = t.base.reflected.get(i).copied().unwrap_or(false);
        if !is_reflection && (len - BASE_STEP_LEN).abs() > CONSTRAINT_TOL {
            violations.push(TrajViolation::StepLength { step: i, len });
        }
        if i > 0 && !is_reflection {
            let prev = steps[i - 1];
            let angle = turn_angle(prev, (dx, dy));
            if angle.abs() > MAX_BEND_RAD + CONSTRAINT_TOL {
                violations.push(TrajViolation::Bend {
                    step: i,
                    degrees: angle.to_degrees(),
                });
            }
        }
    }

    for (i, p) in t.base.points.iter().enumerate() {
        if p.x < 0.0 || p.x > bound || p.y < 0.0 || p.y > bound {
            violations.push(TrajViolation::BaseOutOfBounds { index: i });
        }
    }

    let canvas = cfg.canvas_width as i32;
    for (f, p) in t.positions.iter().enumerate() {
        let (ax, ay) = p.floor_anchor();
        if ax < 0 || ay < 0 || ax + DOT_SIZE as i32 > canvas || ay + DOT_SIZE as i32 > canvas {
            violations.push(TrajViolation::PositionOutOfBounds { frame: f });
        }
    }

    for (f, p) in t.positions.iter().enumerate() {
        match t.base.points.get(f * speed) {
            Some(b) if b == p => {}
            _ => violations.push(TrajViolation::SubsampleMismatch { frame: f }),
        }
    }

    let max_frame_step = BASE_STEP_LEN * t.speed as f64;
    for (f, w) in t.positions.windows(2).enumerate() {
        let len = w[0].dist(w[1]);
        if len > max_frame_step + CONSTRAINT_TOL {
            violations.push(TrajViolation::FrameDisplacement { frame: f + 1, len });
        }
    }

    TrajReport { violations }
}

/// Signed turn angle between consecutive step vectors, wrapped to
/// `[-pi, pi]`.
pub fn turn_angle(prev: (f64, f64), next: (f64, f64)) -> f64 {
    let a = prev.1.atan2(prev.0);
    let b = next.1.atan2(next.0);
    let mut d = b - a;
    while d > std::f64::consts::PI {
        d -= TAU;
    }
    while d < -std::f64::consts::PI {
        d += TAU;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Layout;
    use crate::rng::SampleStreams;

    fn cfg(frames: u32, speed: u32) -> GenConfig {
        GenConfig::new(frames, 1, speed, Layout::Mixed, 99).unwrap()
    }

    #[test]
    fn zero_step_walk_is_a_single_point() {
        let mut rng = SampleStreams::new(1, 0, 0).dot_rng(0);
        let base = sample_base_walk(&mut rng, 0, &cfg(32, 1));
        assert_eq!(base.points.len(), 1);
        assert!(base.headings.is_empty());
        assert!(base.reflected.is_empty());
    }

    #[test]
    fn normal_speed_walk_meets_step_and_bend_bounds() {
        let mut rng = SampleStreams::new(2, 0, 0).dot_rng(0);
        let base = sample_base_walk(&mut rng, 31, &cfg(32, 1));
        assert_eq!(base.points.len(), 32);
        // Independent recomputation from positions.
        let steps: Vec<(f64, f64)> = base
            .points
            .windows(2)
            .map(|w| (w[1].x - w[0].x, w[1].y - w[0].y))
            .collect();
        for (i, s) in steps.iter().enumerate() {
            let len = s.0.hypot(s.1);
            assert!((len - 2.0).abs() < 1e-9, "step {i} has length {len}");
            if i > 0 && !base.reflected[i] {
                let a = turn_angle(steps[i - 1], *s);
                assert!(
                    a.abs() <= MAX_BEND_RAD + 1e-9,
                    "step {i} bends {} degrees",
                    a.to_degrees()
                );
            }
        }
    }

    #[test]
    fn pooled_steps_pass_brute_force_angle_oracle() {
        // 10,000 pooled steps, turn angles recomputed by arctangent from
        // stored positions alone.
        let c = cfg(32, 1);
        let mut pooled = 0usize;
        let mut sample = 0u64;
        let mut max_turn: f64 = 0.0;
        while pooled < 10_000 {
            let mut rng = SampleStreams::new(3, 0, sample).dot_rng(0);
            let base = sample_base_walk(&mut rng, 31, &c);
            let steps: Vec<(f64, f64)> = base
                .points
                .windows(2)
                .map(|w| (w[1].x - w[0].x, w[1].y - w[0].y))
                .collect();
            for i in 1..steps.len() {
                if !base.reflected[i] {
                    max_turn = max_turn.max(turn_angle(steps[i - 1], steps[i]).abs());
                }
            }
            pooled += steps.len();
            sample += 1;
        }
        assert!(max_turn <= MAX_BEND_RAD + 1e-9);
    }

    #[test]
    fn subsample_identity_at_normal_speed() {
        let mut rng = SampleStreams::new(4, 0, 0).dot_rng(0);
        let base = sample_base_walk(&mut rng, 31, &cfg(32, 1));
        let points = base.points.clone();
        let t = subsample_speed(base, 1, 32).unwrap();
        assert_eq!(t.positions, points);
    }

    #[test]
    fn fast_subsampling_bounds_per_frame_displacement() {
        let c = cfg(32, 2);
        let mut rng = SampleStreams::new(5, 0, 0).dot_rng(0);
        let base = sample_base_walk(&mut rng, c.base_steps(), &c);
        let base_arc = base.arc_length();
        let t = subsample_speed(base, 2, 32).unwrap();
        assert_eq!(t.positions.len(), 32);
        for w in t.positions.windows(2) {
            assert!(w[0].dist(w[1]) <= 4.0 + 1e-9);
        }
        // Total traveled distance is that of the 62-step base walk.
        assert!((base_arc - 2.0 * 62.0).abs() < 1e-6);
    }

    #[test]
    fn very_fast_path_length_is_exactly_quadrupled() {
        // speed 4 x 31 frame gaps = 124 base steps of 2 px each.
        let c = cfg(32, 4);
        let mut rng = SampleStreams::new(6, 0, 0).dot_rng(0);
        let base = sample_base_walk(&mut rng, c.base_steps(), &c);
        assert_eq!(base.points.len(), 125);
        assert!((base.arc_length() - 248.0).abs() < 1e-6);
        let t = subsample_speed(base, 4, 32).unwrap();
        for (i, p) in t.positions.iter().enumerate() {
            assert_eq!(*p, t.base.points[i * 4]);
        }
    }

    #[test]
    fn subsample_rejects_length_mismatch() {
        let mut rng = SampleStreams::new(7, 0, 0).dot_rng(0);
        let base = sample_base_walk(&mut rng, 31, &cfg(32, 1));
        assert!(matches!(
            subsample_speed(base, 2, 32),
            Err(TrajError::LengthMismatch { expected: 63, actual: 32, .. })
        ));
    }

    #[test]
    fn fresh_trajectories_validate_clean() {
        for (frames, speed) in [(32, 1), (32, 2), (32, 4), (64, 1), (64, 2), (128, 1)] {
            let c = cfg(frames, speed);
            for s in 0..20 {
                let mut rng = SampleStreams::new(8, 0, s).dot_rng(0);
                let t = generate_trajectory(&mut rng, &c);
                let report = validate_trajectory(&t, &c);
                assert!(report.is_valid(), "{frames}x{speed}: {:?}", report.violations);
            }
        }
    }

    #[test]
    fn mutated_position_is_flagged_as_step_violation() {
        let c = cfg(32, 1);
        let mut rng = SampleStreams::new(9, 0, 0).dot_rng(0);
        let mut t = generate_trajectory(&mut rng, &c);
        t.positions[10].x += 5.0;
        t.base.points[10].x += 5.0;
        let report = validate_trajectory(&t, &c);
        assert!(!report.is_valid());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, TrajViolation::StepLength { step: 9, .. })));
    }

    #[test]
    fn same_seed_reproduces_bitwise_and_distinct_seeds_diverge() {
        let c = cfg(64, 2);
        for pair in 0..1_000u64 {
            let t1 = generate_trajectory(&mut SampleStreams::new(10, 0, pair).dot_rng(0), &c);
            let t2 = generate_trajectory(&mut SampleStreams::new(10, 0, pair).dot_rng(0), &c);
            assert_eq!(t1, t2);
            if pair > 0 {
                let prev = generate_trajectory(
                    &mut SampleStreams::new(10, 0, pair - 1).dot_rng(0),
                    &c,
                );
                assert_ne!(prev.positions, t1.positions);
            }
        }
    }
}
