//! Dirichlet data on the polygonal boundary: nodal interpolation and the
//! data oscillations `apx(E)^2 = h_E ||(g - g_h)'||^2_{L^2(E)}`.
//!
//! Each boundary edge is its own arclength chart, running from its first
//! to its second endpoint (counterclockwise around the domain).

use alloc::vec::Vec;

use crate::field::ScalarField;
use crate::geometry::Point;
use crate::mesh::Mesh;
use crate::quadrature::GAUSS_5;
use crate::{Error, Result};

/// Relative step of the central difference used when the datum has no
/// analytic gradient.
pub const FD_RELATIVE_STEP: f64 = 1e-6;

/// Nodal interpolant `g_h` of the Dirichlet datum. Indexed by node; entries
/// at interior nodes are zero and carry no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTrace {
    pub values: Vec<f64>,
}

impl DiscreteTrace {
    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }
}

pub fn interpolate_boundary(g: &dyn ScalarField, mesh: &Mesh) -> DiscreteTrace {
    let values =
        mesh.nodes().iter().zip(mesh.boundary_nodes()).map(|(&p, &b)| if b { g.value(p) } else { 0.0 }).collect();
    DiscreteTrace { values }
}

/// Derivative of `g` at `p` in the unit direction `t`; analytic when the
/// field provides a gradient, else a central difference with step `step`.
pub fn arc_derivative(g: &dyn ScalarField, p: Point, t: Point, step: f64) -> f64 {
    match g.gradient(p) {
        Some(grad) => grad.dot(t),
        None => (g.value(p + step * t) - g.value(p - step * t)) / (2.0 * step),
    }
}

fn boundary_edge(mesh: &Mesh, edge: usize) -> Result<(Point, Point, [usize; 2], f64)> {
    let e = mesh.edge(edge)?;
    if !e.is_boundary() {
        return Err(Error::InteriorEdge(edge));
    }
    let [p, q] = e.endpoints;
    Ok((mesh.node(p), mesh.node(q), e.endpoints, e.length))
}

/// `||(g - g_h)'||^2_{L^2(E)}` by 5-point Gauss quadrature.
pub fn derivative_misfit(g: &dyn ScalarField, gl: &DiscreteTrace, mesh: &Mesh, edge: usize) -> Result<f64> {
    let (a, b, [p, q], h) = boundary_edge(mesh, edge)?;
    let t = (1.0 / h) * (b - a);
    let slope = (gl.value(q) - gl.value(p)) / h;
    let step = FD_RELATIVE_STEP * h;
    Ok(GAUSS_5
        .iter()
        .map(|&(s, w)| {
            let x = a + s * (b - a);
            let d = arc_derivative(g, x, t, step) - slope;
            w * h * d * d
        })
        .sum())
}

/// `apx(E)^2` for one boundary edge.
pub fn apx_indicator(g: &dyn ScalarField, gl: &DiscreteTrace, mesh: &Mesh, edge: usize) -> Result<f64> {
    let h = mesh.edge(edge)?.length;
    Ok(h * derivative_misfit(g, gl, mesh, edge)?)
}

/// `apx(E)^2` for every boundary edge, as `(edge id, value)`.
pub fn apx_indicators(g: &dyn ScalarField, gl: &DiscreteTrace, mesh: &Mesh) -> Vec<(usize, f64)> {
    mesh.boundary_edges().map(|(e, _)| (e, apx_indicator(g, gl, mesh, e).unwrap_or(0.0))).collect()
}

pub fn apx_total(indicators: &[(usize, f64)]) -> f64 {
    indicators.iter().map(|(_, v)| v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Constant, Expr};
    use crate::mesh::{build_initial_mesh, DomainSpec};
    use alloc::vec;

    fn unit_square() -> Mesh {
        build_initial_mesh(&DomainSpec::unit_square()).unwrap()
    }

    fn bottom_edge(m: &Mesh) -> usize {
        m.boundary_edges().find(|(_, e)| e.endpoints == [0, 1]).unwrap().0
    }

    #[test]
    fn constant_and_affine_data_are_reproduced() {
        let m = unit_square().refine_uniform().unwrap();
        let gl = interpolate_boundary(&Constant(1.5), &m);
        for v in 0..m.num_nodes() {
            if m.is_boundary_node(v) {
                assert_eq!(gl.value(v), 1.5);
            }
        }
        let affine = Expr::Polynomial(vec![(2.0, 1, 0), (-1.0, 0, 1), (0.3, 0, 0)]);
        let gl = interpolate_boundary(&affine, &m);
        assert!(apx_indicators(&affine, &gl, &m).iter().all(|&(_, v)| v.abs() < 1e-28));
    }

    #[test]
    fn quadratic_on_an_edge() {
        // g = x^2 on the bottom side: (g - g_h)' = 2s - 1, apx^2 = 1/3
        let m = unit_square();
        let g = Expr::Polynomial(vec![(1.0, 2, 0)]);
        let gl = interpolate_boundary(&g, &m);
        let e = bottom_edge(&m);
        assert!((apx_indicator(&g, &gl, &m, e).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        // without analytic gradient the finite-difference fallback agrees
        let fd = crate::field::FnField(|p: Point| p.x * p.x);
        assert!((apx_indicator(&fd, &gl, &m, e).unwrap() - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn interior_edge_is_rejected() {
        let m = unit_square();
        let (e, _) = m.interior_edges().next().unwrap();
        let gl = interpolate_boundary(&Constant(0.0), &m);
        assert_eq!(apx_indicator(&Constant(0.0), &gl, &m, e), Err(Error::InteriorEdge(e)));
    }

    #[test]
    fn uniform_refinement_scales_like_h_to_the_fourth() {
        // x^2 varies only along the horizontal sides
        let g = Expr::Polynomial(vec![(1.0, 2, 0)]);
        let m0 = unit_square();
        let m1 = m0.refine_uniform().unwrap();
        let t0 = apx_total(&apx_indicators(&g, &interpolate_boundary(&g, &m0), &m0));
        let t1 = apx_total(&apx_indicators(&g, &interpolate_boundary(&g, &m1), &m1));
        assert!((t0 - 2.0 / 3.0).abs() < 1e-14);
        assert!((t1 / t0 - 0.125).abs() < 1e-12);
        assert_eq!(apx_total(&[]), 0.0);
    }

    #[test]
    fn sons_do_not_exceed_father() {
        let g = Expr::Polynomial(vec![(1.0, 2, 0)]);
        let m0 = unit_square();
        let e = bottom_edge(&m0);
        let m1 = m0.refine(&[e]).unwrap();
        let father = apx_indicator(&g, &interpolate_boundary(&g, &m0), &m0, e).unwrap();
        let gl1 = interpolate_boundary(&g, &m1);
        let sons: f64 = m1
            .boundary_edges()
            .filter(|(_, ed)| ed.endpoints.iter().all(|&v| m1.node(v).y == 0.0))
            .map(|(id, _)| apx_indicator(&g, &gl1, &m1, id).unwrap())
            .sum();
        assert!(sons <= father);
        assert!((sons - father / 8.0).abs() < 1e-14);
    }
}
