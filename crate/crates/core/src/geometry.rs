//! Planar rigid-body poses.
//!
//! Poses are parametrized as `(x, y, theta)` with the heading wrapped into
//! `(-pi, pi]`. Relative poses are expressed in the frame of the first pose,
//! so `compose(a, between(a, b)) == b`.

use std::f64::consts::PI;

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let wrapped = theta - two_pi * ((theta - PI) / two_pi).ceil();
    // ceil() can land one period short for values a few ulps below -pi
    if wrapped <= -PI {
        wrapped + two_pi
    } else {
        wrapped
    }
}

/// An SE(2) element: robot position in meters and heading in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// A relative SE(2) transform expressed in the frame of its origin pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativePose2 {
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn identity() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
        }
    }

    pub fn position(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    /// `self ⊕ delta`.
    pub fn compose(&self, delta: &RelativePose2) -> Pose2 {
        let (s, c) = self.theta.sin_cos();
        Pose2::new(
            self.x + c * delta.dx - s * delta.dy,
            self.y + s * delta.dx + c * delta.dy,
            self.theta + delta.dtheta,
        )
    }

    /// The relative transform taking `self` to `other`.
    pub fn between(&self, other: &Pose2) -> RelativePose2 {
        let (s, c) = self.theta.sin_cos();
        let tx = other.x - self.x;
        let ty = other.y - self.y;
        RelativePose2::new(c * tx + s * ty, -s * tx + c * ty, other.theta - self.theta)
    }

    /// The relative transform that maps `self` back to the identity.
    pub fn inverse(&self) -> RelativePose2 {
        self.between(&Pose2::identity())
    }

    pub fn distance_to(&self, other: &Pose2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl RelativePose2 {
    pub fn new(dx: f64, dy: f64, dtheta: f64) -> Self {
        Self {
            dx,
            dy,
            dtheta: normalize_angle(dtheta),
        }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }
}

/// Free-function form of [`Pose2::compose`].
pub fn compose(a: &Pose2, b: &RelativePose2) -> Pose2 {
    a.compose(b)
}

/// Free-function form of [`Pose2::between`].
pub fn between(a: &Pose2, b: &Pose2) -> RelativePose2 {
    a.between(b)
}
