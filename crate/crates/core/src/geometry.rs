//! Planar poses and oriented-rectangle collision primitives.
//!
//! Everything here is a pure function over immutable values. The collision
//! predicate treats rectangles as closed sets: touching edges count as
//! overlap, so downstream planning never depends on exact tangency.

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("interpolation parameter {0} outside [0, 1]")]
    LerpOutOfRange(f64),
    #[error("pose fields must be finite, got ({x}, {y}, yaw {yaw})")]
    NonFinitePose { x: f64, y: f64, yaw: f64 },
    #[error("footprint extents must be positive and finite, got {half_length} x {half_thickness}")]
    InvalidFootprint {
        half_length: f64,
        half_thickness: f64,
    },
}

/// A point (or displacement) in world coordinates, meters.
///
/// Serializes as a two-element array `[x, y]` to keep waypoint lists compact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.x, self.y).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (x, y) = <(f64, f64)>::deserialize(deserializer)?;
        Ok(Point { x, y })
    }
}

/// Fold an angle into `[-pi, pi)`.
pub fn normalize_yaw(yaw: f64) -> f64 {
    let mut a = yaw % (2.0 * PI);
    if a < -PI {
        a += 2.0 * PI;
    } else if a >= PI {
        a -= 2.0 * PI;
    }
    a
}

/// Planar pose: position in meters, yaw in radians counterclockwise from +x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

impl Pose {
    /// Build a pose with the yaw folded into `[-pi, pi)`.
    pub fn new(x: f64, y: f64, yaw: f64) -> Result<Self, GeometryError> {
        if !(x.is_finite() && y.is_finite() && yaw.is_finite()) {
            return Err(GeometryError::NonFinitePose { x, y, yaw });
        }
        Ok(Self {
            x,
            y,
            yaw: normalize_yaw(yaw),
        })
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.yaw.is_finite()
    }

    pub fn normalized(self) -> Pose {
        Pose {
            yaw: normalize_yaw(self.yaw),
            ..self
        }
    }
}

/// Plan-view extent of a wall panel: half its length and half its thickness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Footprint {
    pub half_length: f64,
    pub half_thickness: f64,
}

impl Footprint {
    pub fn new(half_length: f64, half_thickness: f64) -> Result<Self, GeometryError> {
        if !(half_length.is_finite()
            && half_thickness.is_finite()
            && half_length > 0.0
            && half_thickness > 0.0)
        {
            return Err(GeometryError::InvalidFootprint {
                half_length,
                half_thickness,
            });
        }
        Ok(Self {
            half_length,
            half_thickness,
        })
    }

    /// Grow both extents by `margin` meters.
    pub fn inflated(self, margin: f64) -> Footprint {
        Footprint {
            half_length: self.half_length + margin,
            half_thickness: self.half_thickness + margin,
        }
    }

    /// Radius of the smallest circle containing the footprint.
    pub fn circumradius(self) -> f64 {
        self.half_length.hypot(self.half_thickness)
    }
}

/// A rectangle with an arbitrary planar pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub pose: Pose,
    pub footprint: Footprint,
}

impl OrientedRect {
    pub fn new(pose: Pose, footprint: Footprint) -> Self {
        Self { pose, footprint }
    }

    /// Unit vectors along the rectangle's length and thickness axes.
    pub fn axes(&self) -> [Point; 2] {
        let (s, c) = self.pose.yaw.sin_cos();
        [Point::new(c, s), Point::new(-s, c)]
    }

    /// Corner points in counterclockwise order.
    pub fn corners(&self) -> [Point; 4] {
        let [u, v] = self.axes();
        let center = self.pose.position();
        let lu = u * self.footprint.half_length;
        let tv = v * self.footprint.half_thickness;
        [
            center + lu + tv,
            center - lu + tv,
            center - lu - tv,
            center + lu - tv,
        ]
    }

    /// End points of the long axis (used for corner adjacency).
    pub fn long_axis_ends(&self) -> [Point; 2] {
        let [u, _] = self.axes();
        let center = self.pose.position();
        let lu = u * self.footprint.half_length;
        [center + lu, center - lu]
    }

    /// Closed-set point containment.
    pub fn contains_point(&self, p: Point) -> bool {
        let d = p - self.pose.position();
        let [u, v] = self.axes();
        d.dot(u).abs() <= self.footprint.half_length && d.dot(v).abs() <= self.footprint.half_thickness
    }
}

fn project(corners: &[Point; 4], axis: Point) -> (f64, f64) {
    let mut min = corners[0].dot(axis);
    let mut max = min;
    for c in &corners[1..] {
        let p = c.dot(axis);
        if p < min {
            min = p;
        } else if p > max {
            max = p;
        }
    }
    (min, max)
}

/// Separating-axis overlap test for two oriented rectangles.
///
/// Closed-set semantics: rectangles that merely touch are reported as
/// overlapping.
pub fn rect_overlap(a: &OrientedRect, b: &OrientedRect) -> bool {
    let ca = a.corners();
    let cb = b.corners();
    let [a0, a1] = a.axes();
    let [b0, b1] = b.axes();
    for axis in [a0, a1, b0, b1] {
        let (min_a, max_a) = project(&ca, axis);
        let (min_b, max_b) = project(&cb, axis);
        if min_a > max_b || min_b > max_a {
            return false;
        }
    }
    true
}

/// Interpolate position linearly; the yaw is the target's for the whole move.
///
/// Endpoints are reproduced exactly: `t = 0` yields `p0`'s position bit for
/// bit (with `p1`'s yaw), `t = 1` yields `p1`.
pub fn pose_lerp(p0: &Pose, p1: &Pose, t: f64) -> Result<Pose, GeometryError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(GeometryError::LerpOutOfRange(t));
    }
    let (x, y) = if t == 0.0 {
        (p0.x, p0.y)
    } else if t == 1.0 {
        (p1.x, p1.y)
    } else {
        ((1.0 - t) * p0.x + t * p1.x, (1.0 - t) * p0.y + t * p1.y)
    };
    Ok(Pose { x, y, yaw: p1.yaw })
}

/// Earliest sampled collision along a straight move, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweptHit {
    /// Segment parameter of the colliding sample, in [0, 1].
    pub t: f64,
    /// Mover pose at the colliding sample.
    pub pose: Pose,
    /// Index into the obstacle slice of the first rectangle hit.
    pub obstacle: usize,
}

/// Number of segment subdivisions giving a sample spacing of at most `step`.
///
/// Always a power of two, so halving the step refines the sample set in
/// place: every sample taken at step `s` is also taken at any step `s' <= s`.
pub fn sweep_subdivisions(dist: f64, step: f64) -> u32 {
    let mut n: u32 = 1;
    while dist / f64::from(n) > step && n < (1 << 30) {
        n *= 2;
    }
    n
}

/// Sample the move `from -> to` at spacing <= `step` (both endpoints
/// included) and return the earliest sample where the mover overlaps any
/// obstacle.
///
/// The mover travels at the target yaw (`to.yaw`) for the whole move.
pub fn swept_collides(
    moving: &Footprint,
    from: &Pose,
    to: &Pose,
    obstacles: &[OrientedRect],
    step: f64,
) -> Option<SweptHit> {
    assert!(step > 0.0, "sample step must be positive");
    if obstacles.is_empty() {
        return None;
    }
    let dist = from.position().dist(to.position());
    let n = sweep_subdivisions(dist, step);
    for i in 0..=n {
        let t = f64::from(i) / f64::from(n);
        let pose = pose_lerp(from, to, t).expect("t in range by construction");
        let rect = OrientedRect::new(pose, *moving);
        for (k, obs) in obstacles.iter().enumerate() {
            if rect_overlap(&rect, obs) {
                return Some(SweptHit {
                    t,
                    pose,
                    obstacle: k,
                });
            }
        }
    }
    None
}
