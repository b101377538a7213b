//! Planar points and elementary triangle geometry.

use core::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
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

    /// z-component of the planar cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
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

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, rhs: Point) -> Point {
        Point::new(self * rhs.x, self * rhs.y)
    }
}

/// Signed area, positive for counterclockwise vertices.
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * (b - a).cross(c - a)
}

/// Gradients of the three barycentric coordinates of a non-degenerate triangle.
pub fn barycentric_gradients(v: [Point; 3]) -> [Point; 3] {
    let two_area = (v[1] - v[0]).cross(v[2] - v[0]);
    let mut grads = [Point::default(); 3];
    for (i, g) in grads.iter_mut().enumerate() {
        let p = v[(i + 1) % 3];
        let q = v[(i + 2) % 3];
        // rotate the opposite edge by -90 degrees
        *g = Point::new(p.y - q.y, q.x - p.x);
        *g = (1.0 / two_area) * *g;
    }
    grads
}

/// Interior angles at the three vertices, in radians.
pub fn angles(v: [Point; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, a) in out.iter_mut().enumerate() {
        let p = v[(i + 1) % 3] - v[i];
        let q = v[(i + 2) % 3] - v[i];
        *a = libm::atan2(p.cross(q).abs(), p.dot(q));
    }
    out
}

pub fn diameter(v: [Point; 3]) -> f64 {
    v[0].dist(v[1]).max(v[1].dist(v[2])).max(v[2].dist(v[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradients_of_reference_triangle() {
        let v = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let g = barycentric_gradients(v);
        assert_eq!(g[0], Point::new(-1.0, -1.0));
        assert_eq!(g[1], Point::new(1.0, 0.0));
        assert_eq!(g[2], Point::new(0.0, 1.0));
        assert_eq!(signed_area(v[0], v[1], v[2]), 0.5);
    }

    #[test]
    fn angles_sum_to_pi() {
        let v = [Point::new(0.1, 0.0), Point::new(1.3, 0.2), Point::new(0.4, 0.9)];
        let s: f64 = angles(v).iter().sum();
        assert!((s - core::f64::consts::PI).abs() < 1e-14);
    }
}
