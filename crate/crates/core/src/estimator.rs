//! Residual error estimator
//!
//! `rho^2 = sum_{interior E} (eta(E)^2 + osc(E)^2) + sum_{boundary E} (apx(E)^2 + osc(E)^2)`
//!
//! with normal-jump terms `eta`, patch oscillations of `f` on interior edges,
//! element residuals on boundary edges and the Dirichlet oscillations `apx`.

use alloc::vec::Vec;

use crate::boundary::{self, DiscreteTrace};
use crate::fem::element_gradient;
use crate::field::ScalarField;
use crate::geometry::Point;
use crate::mesh::{EdgeKind, Mesh};
use crate::quadrature::{self, TRIANGLE_7};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndicatorKind {
    Interior,
    Boundary,
}

/// Squared indicators of one edge. `eta2` vanishes on boundary edges and
/// `apx2` on interior edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeIndicator {
    pub kind: IndicatorKind,
    pub eta2: f64,
    pub osc2: f64,
    pub apx2: f64,
}

impl EdgeIndicator {
    /// The edge's share of `rho^2`, the quantity Dörfler marking works on.
    pub fn contribution(&self) -> f64 {
        self.eta2 + self.osc2 + self.apx2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSet {
    /// Indexed by edge id.
    pub edges: Vec<EdgeIndicator>,
    pub rho2: f64,
    /// `rho^2` without the Dirichlet oscillations.
    pub rho_tilde2: f64,
    pub apx2: f64,
}

impl IndicatorSet {
    pub fn from_edges(edges: Vec<EdgeIndicator>) -> Self {
        let rho2 = edges.iter().map(EdgeIndicator::contribution).sum();
        let apx2: f64 = edges.iter().map(|e| e.apx2).sum();
        let rho_tilde2 = edges.iter().map(|e| e.eta2 + e.osc2).sum();
        Self { edges, rho2, rho_tilde2, apx2 }
    }

    pub fn rho(&self) -> f64 {
        libm::sqrt(self.rho2)
    }

    pub fn contributions(&self) -> Vec<f64> {
        self.edges.iter().map(EdgeIndicator::contribution).collect()
    }
}

fn interior_pair(mesh: &Mesh, edge: usize) -> Result<(usize, usize)> {
    match mesh.edge(edge)?.kind {
        EdgeKind::Interior { plus, minus } => Ok((plus, minus)),
        EdgeKind::Boundary { .. } => Err(Error::BoundaryEdge(edge)),
    }
}

/// Unit normal of an edge, pointing out of the triangle whose orientation
/// the endpoints follow.
fn edge_normal(mesh: &Mesh, edge: usize) -> Point {
    let e = &mesh.edges()[edge];
    let [p, q] = e.endpoints.map(|v| mesh.node(v));
    let t = (1.0 / e.length) * (q - p);
    Point::new(t.y, -t.x)
}

/// `eta(E)^2 = h_E^2 [grad U . n]^2`.
pub fn jump_indicator(mesh: &Mesh, u: &[f64], edge: usize) -> Result<f64> {
    let (plus, minus) = interior_pair(mesh, edge)?;
    let jump = (element_gradient(mesh, plus, u) - element_gradient(mesh, minus, u)).dot(edge_normal(mesh, edge));
    let h = mesh.edges()[edge].length;
    Ok(h * h * jump * jump)
}

/// `|w| * sum w_q (f_q - mean)^2` over quadrature samples `(f_q, w_q)`.
fn weighted_variance(samples: impl Iterator<Item = (f64, f64)> + Clone) -> f64 {
    let (mass, moment) = samples.clone().fold((0.0, 0.0), |(m, s), (f, w)| (m + w, s + w * f));
    let mean = moment / mass;
    mass * samples.map(|(f, w)| w * (f - mean) * (f - mean)).sum::<f64>()
}

/// `osc(E)^2 = |patch| ||f - mean_patch f||^2` on the two triangles of `E`.
pub fn interior_osc(mesh: &Mesh, f: &dyn ScalarField, edge: usize) -> Result<f64> {
    let (plus, minus) = interior_pair(mesh, edge)?;
    let mut samples = Vec::with_capacity(14);
    for t in [plus, minus] {
        samples.extend(quadrature::triangle_points(mesh.vertices(t), mesh.area(t)).map(|(p, _, w)| (f.value(p), w)));
    }
    Ok(weighted_variance(samples.iter().copied()))
}

/// `osc(E)^2 = |T| ||f||^2_{L^2(T)}` for the triangle `T` of a boundary edge.
pub fn boundary_residual(mesh: &Mesh, f: &dyn ScalarField, edge: usize) -> Result<f64> {
    match mesh.edge(edge)?.kind {
        EdgeKind::Boundary { triangle } => {
            let a = mesh.area(triangle);
            Ok(a * quadrature::integrate_triangle(mesh.vertices(triangle), a, |p| {
                let v = f.value(p);
                v * v
            }))
        }
        EdgeKind::Interior { .. } => Err(Error::InteriorEdge(edge)),
    }
}

/// All edge indicators of a discrete solution `u` with load `f` and
/// Dirichlet datum `g` interpolated by `gl`.
pub fn assemble_indicators(
    mesh: &Mesh,
    u: &[f64],
    f: &dyn ScalarField,
    g: &dyn ScalarField,
    gl: &DiscreteTrace,
) -> Result<IndicatorSet> {
    if u.len() != mesh.num_nodes() {
        return Err(Error::Dimension { expected: mesh.num_nodes(), got: u.len() });
    }
    // f at the quadrature points of every triangle, weights scaled by area
    let samples: Vec<[(f64, f64); 7]> = (0..mesh.num_triangles())
        .map(|t| {
            let mut s = [(0.0, 0.0); 7];
            for (slot, (p, _, w)) in s.iter_mut().zip(quadrature::triangle_points(mesh.vertices(t), mesh.area(t))) {
                *slot = (f.value(p), w);
            }
            s
        })
        .collect();
    debug_assert_eq!(TRIANGLE_7.len(), 7);
    let gradients: Vec<Point> = (0..mesh.num_triangles()).map(|t| element_gradient(mesh, t, u)).collect();

    let mut edges = Vec::with_capacity(mesh.num_edges());
    for (id, e) in mesh.edges().iter().enumerate() {
        let ind = match e.kind {
            EdgeKind::Interior { plus, minus } => {
                let jump = (gradients[plus] - gradients[minus]).dot(edge_normal(mesh, id));
                let osc2 = weighted_variance(samples[plus].iter().chain(samples[minus].iter()).copied());
                EdgeIndicator {
                    kind: IndicatorKind::Interior,
                    eta2: e.length * e.length * jump * jump,
                    osc2,
                    apx2: 0.0,
                }
            }
            EdgeKind::Boundary { triangle } => {
                let norm2: f64 = samples[triangle].iter().map(|&(v, w)| w * v * v).sum();
                EdgeIndicator {
                    kind: IndicatorKind::Boundary,
                    eta2: 0.0,
                    osc2: mesh.area(triangle) * norm2,
                    apx2: boundary::apx_indicator(g, gl, mesh, id)?,
                }
            }
        };
        edges.push(ind);
    }
    Ok(IndicatorSet::from_edges(edges))
}
