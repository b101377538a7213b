//! Scalar fields on the plane with optional analytic derivatives.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::geometry::Point;

pub trait ScalarField: Send + Sync {
    fn value(&self, p: Point) -> f64;

    fn gradient(&self, _p: Point) -> Option<Point> {
        None
    }

    fn laplacian(&self, _p: Point) -> Option<f64> {
        None
    }
}

pub type SharedField = Arc<dyn ScalarField>;

impl<F: ScalarField + ?Sized> ScalarField for Arc<F> {
    fn value(&self, p: Point) -> f64 {
        (**self).value(p)
    }
    fn gradient(&self, p: Point) -> Option<Point> {
        (**self).gradient(p)
    }
    fn laplacian(&self, p: Point) -> Option<f64> {
        (**self).laplacian(p)
    }
}

/// A closure as a field, without derivatives.
pub struct FnField<F>(pub F);

impl<F: Fn(Point) -> f64 + Send + Sync> ScalarField for FnField<F> {
    fn value(&self, p: Point) -> f64 {
        (self.0)(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl ScalarField for Constant {
    fn value(&self, _p: Point) -> f64 {
        self.0
    }
    fn gradient(&self, _p: Point) -> Option<Point> {
        Some(Point::default())
    }
    fn laplacian(&self, _p: Point) -> Option<f64> {
        Some(0.0)
    }
}

/// `a + b * sign`, used for the shifted data `g - chi` and `f + lap chi`.
pub struct Combination {
    pub a: SharedField,
    pub b: SharedField,
    pub sign: f64,
}

impl ScalarField for Combination {
    fn value(&self, p: Point) -> f64 {
        self.a.value(p) + self.sign * self.b.value(p)
    }
    fn gradient(&self, p: Point) -> Option<Point> {
        Some(self.a.gradient(p)? + self.sign * self.b.gradient(p)?)
    }
    fn laplacian(&self, p: Point) -> Option<f64> {
        Some(self.a.laplacian(p)? + self.sign * self.b.laplacian(p)?)
    }
}

/// The Laplacian of a field as a field of its own.
pub struct LaplacianOf(pub SharedField);

impl ScalarField for LaplacianOf {
    fn value(&self, p: Point) -> f64 {
        self.0.laplacian(p).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitVariable {
    X,
    Y,
    /// Distance from a center.
    Radius(Point),
}

/// Closed-form expressions with analytic gradient and Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    /// `sum coef * x^px * y^py`.
    Polynomial(Vec<(f64, u32, u32)>),
    /// `sum coef * r^power + log_coef * ln r`, `r = |p - center|`.
    Radial {
        center: Point,
        terms: Vec<(f64, f64)>,
        log_coef: f64,
    },
    /// `amplitude * sin(kx * x + ky * y + phase) + offset`.
    Sinusoidal {
        amplitude: f64,
        kx: f64,
        ky: f64,
        phase: f64,
        offset: f64,
    },
    /// `below` where the split variable is `< threshold`, `above` elsewhere.
    Piecewise {
        variable: SplitVariable,
        threshold: f64,
        below: Box<Expr>,
        above: Box<Expr>,
    },
    Sum(Vec<Expr>),
}

fn powi(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * x)
}

impl Expr {
    fn radius(center: Point, p: Point) -> (f64, Point) {
        let d = p - center;
        (d.norm(), d)
    }
}

impl ScalarField for Expr {
    fn value(&self, p: Point) -> f64 {
        match self {
            Expr::Constant(c) => *c,
            Expr::Polynomial(terms) => terms.iter().map(|&(c, i, j)| c * powi(p.x, i) * powi(p.y, j)).sum(),
            Expr::Radial { center, terms, log_coef } => {
                let (r, _) = Expr::radius(*center, p);
                let mut v: f64 = terms.iter().map(|&(c, k)| c * libm::pow(r, k)).sum();
                if *log_coef != 0.0 {
                    v += log_coef * libm::log(r);
                }
                v
            }
            Expr::Sinusoidal { amplitude, kx, ky, phase, offset } => {
                amplitude * libm::sin(kx * p.x + ky * p.y + phase) + offset
            }
            Expr::Piecewise { variable, threshold, below, above } => {
                if split_value(*variable, p) < *threshold {
                    below.value(p)
                } else {
                    above.value(p)
                }
            }
            Expr::Sum(parts) => parts.iter().map(|e| e.value(p)).sum(),
        }
    }

    fn gradient(&self, p: Point) -> Option<Point> {
        Some(match self {
            Expr::Constant(_) => Point::default(),
            Expr::Polynomial(terms) => terms.iter().fold(Point::default(), |acc, &(c, i, j)| {
                let dx = if i > 0 { c * i as f64 * powi(p.x, i - 1) * powi(p.y, j) } else { 0.0 };
                let dy = if j > 0 { c * j as f64 * powi(p.x, i) * powi(p.y, j - 1) } else { 0.0 };
                acc + Point::new(dx, dy)
            }),
            Expr::Radial { center, terms, log_coef } => {
                let (r, d) = Expr::radius(*center, p);
                if r == 0.0 {
                    return None;
                }
                let dr: f64 = terms.iter().map(|&(c, k)| c * k * libm::pow(r, k - 1.0)).sum::<f64>() + log_coef / r;
                (dr / r) * d
            }
            Expr::Sinusoidal { amplitude, kx, ky, phase, .. } => {
                let c = amplitude * libm::cos(kx * p.x + ky * p.y + phase);
                Point::new(c * kx, c * ky)
            }
            Expr::Piecewise { variable, threshold, below, above } => {
                return if split_value(*variable, p) < *threshold { below.gradient(p) } else { above.gradient(p) };
            }
            Expr::Sum(parts) => {
                let mut acc = Point::default();
                for e in parts {
                    acc = acc + e.gradient(p)?;
                }
                acc
            }
        })
    }

    fn laplacian(&self, p: Point) -> Option<f64> {
        Some(match self {
            Expr::Constant(_) => 0.0,
            Expr::Polynomial(terms) => terms
                .iter()
                .map(|&(c, i, j)| {
                    let xx = if i > 1 { (i * (i - 1)) as f64 * powi(p.x, i - 2) * powi(p.y, j) } else { 0.0 };
                    let yy = if j > 1 { (j * (j - 1)) as f64 * powi(p.x, i) * powi(p.y, j - 2) } else { 0.0 };
                    c * (xx + yy)
                })
                .sum(),
            Expr::Radial { center, terms, .. } => {
                // ln r is harmonic; lap r^k = k^2 r^(k-2)
                let (r, _) = Expr::radius(*center, p);
                if r == 0.0 {
                    return None;
                }
                terms.iter().map(|&(c, k)| c * k * k * libm::pow(r, k - 2.0)).sum()
            }
            Expr::Sinusoidal { amplitude, kx, ky, phase, .. } => {
                -amplitude * (kx * kx + ky * ky) * libm::sin(kx * p.x + ky * p.y + phase)
            }
            Expr::Piecewise { variable, threshold, below, above } => {
                return if split_value(*variable, p) < *threshold { below.laplacian(p) } else { above.laplacian(p) };
            }
            Expr::Sum(parts) => {
                let mut acc = 0.0;
                for e in parts {
                    acc += e.laplacian(p)?;
                }
                acc
            }
        })
    }
}

fn split_value(variable: SplitVariable, p: Point) -> f64 {
    match variable {
        SplitVariable::X => p.x,
        SplitVariable::Y => p.y,
        SplitVariable::Radius(c) => p.dist(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn fd_check(e: &Expr, p: Point) {
        let h = 1e-4;
        let f = |q: Point| e.value(q);
        let gx = (f(Point::new(p.x + h, p.y)) - f(Point::new(p.x - h, p.y))) / (2.0 * h);
        let gy = (f(Point::new(p.x, p.y + h)) - f(Point::new(p.x, p.y - h))) / (2.0 * h);
        let lap = (f(Point::new(p.x + h, p.y))
            + f(Point::new(p.x - h, p.y))
            + f(Point::new(p.x, p.y + h))
            + f(Point::new(p.x, p.y - h))
            - 4.0 * f(p))
            / (h * h);
        let g = e.gradient(p).unwrap();
        assert!((g.x - gx).abs() < 1e-6 && (g.y - gy).abs() < 1e-6, "{e:?}");
        assert!((e.laplacian(p).unwrap() - lap).abs() < 1e-4, "{e:?}");
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = Point::new(0.7, -0.4);
        fd_check(&Expr::Polynomial(vec![(2.0, 3, 1), (-1.0, 0, 2), (0.5, 1, 0)]), p);
        fd_check(
            &Expr::Radial { center: Point::new(0.1, 0.2), terms: vec![(0.5, 2.0), (1.0, 1.5)], log_coef: -1.0 },
            p,
        );
        fd_check(&Expr::Sinusoidal { amplitude: 0.3, kx: 2.0, ky: -1.0, phase: 0.4, offset: 1.0 }, p);
        fd_check(
            &Expr::Sum(vec![
                Expr::Constant(3.0),
                Expr::Piecewise {
                    variable: SplitVariable::X,
                    threshold: 0.0,
                    below: Box::new(Expr::Constant(0.0)),
                    above: Box::new(Expr::Polynomial(vec![(1.0, 2, 0)])),
                },
            ]),
            p,
        );
    }

    #[test]
    fn combination_and_laplacian_field() {
        let a: SharedField = Arc::new(Expr::Polynomial(vec![(1.0, 2, 0)]));
        let b: SharedField = Arc::new(Constant(1.0));
        let c = Combination { a: a.clone(), b, sign: -1.0 };
        assert_eq!(c.value(Point::new(2.0, 0.0)), 3.0);
        assert_eq!(c.laplacian(Point::new(2.0, 0.0)), Some(2.0));
        assert_eq!(LaplacianOf(a).value(Point::new(5.0, 1.0)), 2.0);
    }
}
