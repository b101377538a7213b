//! Problem data `(chi, g, f)`, the shift to a zero obstacle and the two
//! benchmark problems.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::field::{Combination, Constant, LaplacianOf, ScalarField, SharedField};
use crate::geometry::Point;
use crate::mesh::DomainSpec;
use crate::quadrature::gauss_legendre;
use crate::{Error, Result};

pub use crate::adapt::{reference_energy, ReferenceEnergy};

/// Boundary points sampled per polygon side when checking `chi <= g`.
const BOUNDARY_SAMPLES: usize = 256;

/// A known solution of a problem, or only its energy when it comes from a
/// fine reference mesh.
#[derive(Clone)]
pub struct ExactSolution {
    /// The solution of the original problem (before shifting the obstacle).
    pub u: Option<SharedField>,
    /// Energy of the exact solution of the zero-obstacle problem the solver sees.
    pub energy: f64,
}

/// Data of an obstacle problem on a polygonal domain. `chi = None` is the
/// zero obstacle.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: DomainSpec,
    pub chi: Option<SharedField>,
    pub g: SharedField,
    pub f: SharedField,
    pub exact: Option<ExactSolution>,
}

/// The equivalent problem with zero obstacle, data `(0, g - chi, f + lap chi)`.
/// Its solution plus `shift` solves the original problem.
#[derive(Clone)]
pub struct TransformedProblem {
    pub domain: DomainSpec,
    pub g: SharedField,
    pub f: SharedField,
    pub shift: Option<SharedField>,
}

impl DomainSpec {
    /// Corners of the boundary polygon, counterclockwise.
    pub fn boundary_polygon(&self) -> Vec<Point> {
        match *self {
            DomainSpec::Square { center: c, half_width: w } => vec![
                Point::new(c.x - w, c.y - w),
                Point::new(c.x + w, c.y - w),
                Point::new(c.x + w, c.y + w),
                Point::new(c.x - w, c.y + w),
            ],
            DomainSpec::LShape { center: c, half_width: w } => vec![
                Point::new(c.x, c.y - w),
                Point::new(c.x + w, c.y - w),
                Point::new(c.x + w, c.y + w),
                Point::new(c.x - w, c.y + w),
                Point::new(c.x - w, c.y),
                c,
            ],
        }
    }

    /// Evenly spaced points on every side of the boundary polygon.
    pub fn boundary_samples(&self, per_side: usize) -> impl Iterator<Item = Point> {
        let poly = self.boundary_polygon();
        let n = poly.len();
        (0..n).flat_map(move |i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            (0..per_side).map(move |k| a + (k as f64 / per_side as f64) * (b - a))
        })
    }
}

/// Applies the zero-obstacle transformation. Fails if `chi` has no analytic
/// Laplacian or if `g - chi` is negative at a sampled boundary point.
pub fn to_zero_obstacle(p: &ProblemSpec) -> Result<TransformedProblem> {
    let Some(chi) = p.chi.clone() else {
        return Ok(TransformedProblem { domain: p.domain, g: p.g.clone(), f: p.f.clone(), shift: None });
    };
    let probe = p.domain.boundary_polygon();
    let centroid = probe.iter().fold(Point::default(), |acc, &q| acc + q);
    let centroid = (1.0 / probe.len() as f64) * centroid;
    if probe.iter().chain(core::iter::once(&centroid)).any(|&q| chi.laplacian(q).is_none()) {
        return Err(Error::MissingLaplacian);
    }
    let g: SharedField = Arc::new(Combination { a: p.g.clone(), b: chi.clone(), sign: -1.0 });
    for q in p.domain.boundary_samples(BOUNDARY_SAMPLES) {
        let value = g.value(q);
        if value < -1e-12 {
            return Err(Error::ObstacleAboveData { x: q.x, y: q.y, value });
        }
    }
    let f: SharedField = Arc::new(Combination { a: p.f.clone(), b: Arc::new(LaplacianOf(chi.clone())), sign: 1.0 });
    Ok(TransformedProblem { domain: p.domain, g, f, shift: Some(chi) })
}

/// Radially symmetric solution of the first benchmark:
/// `u = r^2/2 - ln r - 1/2` for `r >= 1` and zero inside the unit disc.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example1Solution;

impl ScalarField for Example1Solution {
    fn value(&self, p: Point) -> f64 {
        let r = p.norm();
        if r >= 1.0 {
            0.5 * r * r - libm::log(r) - 0.5
        } else {
            0.0
        }
    }

    fn gradient(&self, p: Point) -> Option<Point> {
        let r2 = p.dot(p);
        Some(if r2 >= 1.0 { (1.0 - 1.0 / r2) * p } else { Point::default() })
    }

    fn laplacian(&self, p: Point) -> Option<f64> {
        Some(if p.norm() >= 1.0 { 2.0 } else { 0.0 })
    }
}

/// `J(u) = int 1/2 |u'|^2 + 2u` over `(-1.5, 1.5)^2`. The integrand is
/// radial, so on each of the eight symmetric sectors
/// `0 <= phi <= pi/4, 1 <= r <= 1.5 / cos(phi)` the radial integral has the
/// antiderivative `G(r) = 3/8 r^4 - r^2/2 + ln(r)/2 - r^2 ln r`.
pub fn example1_exact_energy() -> f64 {
    let antiderivative = |r: f64| {
        let lr = libm::log(r);
        0.375 * r * r * r * r - 0.5 * r * r + 0.5 * lr - r * r * lr
    };
    let inner = antiderivative(1.0);
    8.0 * gauss_legendre(40, 0.0, FRAC_PI_4)
        .iter()
        .map(|&(phi, w)| w * (antiderivative(1.5 / libm::cos(phi)) - inner))
        .sum::<f64>()
}

/// Zero obstacle, `f = -2` on `(-1.5, 1.5)^2`, Dirichlet data from the
/// radially symmetric exact solution with contact region `r < 1`.
pub fn example1() -> ProblemSpec {
    let u: SharedField = Arc::new(Example1Solution);
    ProblemSpec {
        name: "example1".into(),
        domain: DomainSpec::Square { center: Point::new(0.0, 0.0), half_width: 1.5 },
        chi: None,
        g: u.clone(),
        f: Arc::new(Constant(-2.0)),
        exact: Some(ExactSolution { u: Some(u), energy: example1_exact_energy() }),
    }
}

/// `chi = (sin(5(x + 1 - pi/10)) + 1) / 10` for `x < -1`, zero elsewhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example2Obstacle;

impl Example2Obstacle {
    fn argument(x: f64) -> f64 {
        5.0 * (x + 1.0 - PI / 10.0)
    }
}

impl ScalarField for Example2Obstacle {
    fn value(&self, p: Point) -> f64 {
        if p.x < -1.0 {
            0.1 * (libm::sin(Self::argument(p.x)) + 1.0)
        } else {
            0.0
        }
    }

    fn gradient(&self, p: Point) -> Option<Point> {
        let dx = if p.x < -1.0 { 0.5 * libm::cos(Self::argument(p.x)) } else { 0.0 };
        Some(Point::new(dx, 0.0))
    }

    fn laplacian(&self, p: Point) -> Option<f64> {
        Some(if p.x < -1.0 { -2.5 * libm::sin(Self::argument(p.x)) } else { 0.0 })
    }
}

/// Smooth radial cutoff `gamma_1` and its first two radial derivatives.
pub fn cutoff(r: f64) -> (f64, f64, f64) {
    let s = 2.0 * (r - 0.25);
    if s < 0.0 {
        (1.0, 0.0, 0.0)
    } else if s < 1.0 {
        let s2 = s * s;
        let value = -6.0 * s2 * s2 * s + 15.0 * s2 * s2 - 10.0 * s2 * s + 1.0;
        // d/dr = 2 d/ds
        let d1 = 2.0 * (-30.0 * s2 * s2 + 60.0 * s2 * s - 30.0 * s2);
        let d2 = 4.0 * (-120.0 * s2 * s + 180.0 * s2 - 60.0 * s);
        (value, d1, d2)
    } else {
        (0.0, 0.0, 0.0)
    }
}

/// Polar coordinates about the reentrant corner of the L-shape; the angle
/// runs counterclockwise from the edge on the negative y-axis, so it lies
/// in `[0, 3pi/2]` on the closed domain and `sin(2 phi / 3) >= 0` there.
pub fn lshape_polar(p: Point) -> (f64, f64) {
    let mut phi = libm::atan2(p.y, p.x) + FRAC_PI_2;
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    (p.norm(), phi)
}

/// Right-hand side of the second benchmark in polar coordinates:
/// `-lap(r^(2/3) sin(2phi/3) gamma_1(r)) - gamma_2(r)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example2Load;

impl ScalarField for Example2Load {
    fn value(&self, p: Point) -> f64 {
        let (r, phi) = lshape_polar(p);
        let gamma2 = if r <= 1.25 { 0.0 } else { 1.0 };
        let (_, d1, d2) = cutoff(r);
        if d1 == 0.0 && d2 == 0.0 {
            return -gamma2;
        }
        let angular = libm::sin(2.0 * phi / 3.0);
        -libm::cbrt(r * r) * angular * (d1 / r + d2) - 4.0 / 3.0 / libm::cbrt(r) * d1 * angular - gamma2
    }
}

/// The L-shape `(-2, 2)^2` without the lower-left quadrant, obstacle
/// [`Example2Obstacle`], `g = chi` on the boundary and load [`Example2Load`].
/// No exact solution is known.
pub fn example2() -> ProblemSpec {
    let chi: SharedField = Arc::new(Example2Obstacle);
    ProblemSpec {
        name: "example2".into(),
        domain: DomainSpec::LShape { center: Point::new(0.0, 0.0), half_width: 2.0 },
        chi: Some(chi.clone()),
        g: chi,
        f: Arc::new(Example2Load),
        exact: None,
    }
}

/// Zero obstacle with constant load and constant boundary value, used for
/// the degenerate cases of the adaptive loop.
pub fn constant_problem(domain: DomainSpec, f: f64, g: f64) -> ProblemSpec {
    ProblemSpec {
        name: "constant".into(),
        domain,
        chi: None,
        g: Arc::new(Constant(g)),
        f: Arc::new(Constant(f)),
        exact: None,
    }
}
