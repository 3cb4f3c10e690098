//! Small 2D point/vector type used for dot positions and forces.

use std::ops::{Add, Mul, Neg, Sub};

/// A point (or vector) in image coordinates. `x` runs along columns,
/// `y` along rows, both starting at 1 for the first pixel center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Componentwise clamp into the closed rectangle `[1, width] x [1, height]`.
    pub fn clamp_to_domain(self, width: usize, height: usize) -> Point {
        Point {
            x: self.x.clamp(1.0, width as f64),
            y: self.y.clamp(1.0, height as f64),
        }
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
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_is_euclidean() {
        assert_eq!(Point::new(3.0, 4.0).norm(), 5.0);
    }

    #[test]
    fn clamp_keeps_interior_points() {
        let p = Point::new(2.5, 3.5);
        assert_eq!(p.clamp_to_domain(10, 10), p);
        assert_eq!(
            Point::new(-1.0, 99.0).clamp_to_domain(10, 10),
            Point::new(1.0, 10.0)
        );
    }
}
