//! Quadrature rules on triangles and on line segments.

use alloc::vec::Vec;

use crate::geometry::Point;

/// Barycentric coordinates and weights (summing to one) of the symmetric
/// 7-point rule, exact for polynomials of degree 5.
pub const TRIANGLE_7: [([f64; 3], f64); 7] = {
    const A1: f64 = 0.059_715_871_789_769_82;
    const B1: f64 = 0.470_142_064_105_115_1;
    const A2: f64 = 0.797_426_985_353_087_3;
    const B2: f64 = 0.101_286_507_323_456_33;
    const W1: f64 = 0.132_394_152_788_506_18;
    const W2: f64 = 0.125_939_180_544_827_15;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
        ([A1, B1, B1], W1),
        ([B1, A1, B1], W1),
        ([B1, B1, A1], W1),
        ([A2, B2, B2], W2),
        ([B2, A2, B2], W2),
        ([B2, B2, A2], W2),
    ]
};

/// Nodes in [0, 1] and weights (summing to one) of 5-point Gauss-Legendre.
pub const GAUSS_5: [(f64, f64); 5] = {
    const X1: f64 = 0.906_179_845_938_664;
    const X2: f64 = 0.538_469_310_105_683_1;
    const W1: f64 = 0.236_926_885_056_189_08;
    const W2: f64 = 0.478_628_670_499_366_47;
    const W0: f64 = 0.568_888_888_888_888_9;
    [
        (0.5 * (1.0 - X1), 0.5 * W1),
        (0.5 * (1.0 - X2), 0.5 * W2),
        (0.5, 0.5 * W0),
        (0.5 * (1.0 + X2), 0.5 * W2),
        (0.5 * (1.0 + X1), 0.5 * W1),
    ]
};

/// Quadrature points of [`TRIANGLE_7`] mapped to a triangle, with weights
/// scaled by its area.
pub fn triangle_points(v: [Point; 3], area: f64) -> impl Iterator<Item = (Point, [f64; 3], f64)> {
    TRIANGLE_7.iter().map(move |&(l, w)| {
        let p =
            Point::new(l[0] * v[0].x + l[1] * v[1].x + l[2] * v[2].x, l[0] * v[0].y + l[1] * v[1].y + l[2] * v[2].y);
        (p, l, w * area)
    })
}

/// Integral of `f` over a triangle with the 7-point rule.
pub fn integrate_triangle(v: [Point; 3], area: f64, f: impl Fn(Point) -> f64) -> f64 {
    triangle_points(v, area).map(|(p, _, w)| w * f(p)).sum()
}

/// Gauss-Legendre rule with `n` nodes on `[a, b]`, nodes by Newton iteration
/// on the Legendre polynomial.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..n {
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((mid - half * x, half * w));
    }
    rule
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}
