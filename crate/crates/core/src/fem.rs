//! P1 finite elements: assembly, energies and prolongation between nested meshes.
//!
//! Discrete functions are plain nodal vectors indexed like the mesh nodes.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::ScalarField;
use crate::geometry::{self, Point};
use crate::linalg::CsrMatrix;
use crate::mesh::Mesh;
use crate::quadrature;
use crate::{Error, Result};

/// Sparse matrix of `int grad phi_i . grad phi_j`.
pub type StiffnessMatrix = CsrMatrix;

/// Element stiffness matrix of a counterclockwise triangle.
pub fn local_stiffness(v: [Point; 3]) -> [[f64; 3]; 3] {
    let area = geometry::signed_area(v[0], v[1], v[2]);
    let g = geometry::barycentric_gradients(v);
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * g[i].dot(g[j]);
        }
    }
    k
}

pub fn assemble_stiffness(mesh: &Mesh) -> Result<StiffnessMatrix> {
    let n = mesh.num_nodes();
    let mut pattern: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for e in mesh.edges() {
        let [p, q] = e.endpoints;
        pattern[p].push(q);
        pattern[q].push(p);
    }
    let mut k = CsrMatrix::from_pattern(n, pattern);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        if !(mesh.area(t) > 0.0) {
            return Err(Error::DegenerateTriangle(t));
        }
        let local = local_stiffness(mesh.vertices(t));
        for i in 0..3 {
            for j in 0..3 {
                k.add(tri.vertices[i], tri.vertices[j], local[i][j]);
            }
        }
    }
    Ok(k)
}

/// Load vector `(f, phi_i)` by the 7-point degree-5 rule.
pub fn assemble_load(mesh: &Mesh, f: &dyn ScalarField) -> Vec<f64> {
    let mut b = vec![0.0; mesh.num_nodes()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for (p, lambda, w) in quadrature::triangle_points(mesh.vertices(t), mesh.area(t)) {
            let fw = w * f.value(p);
            for i in 0..3 {
                b[tri.vertices[i]] += fw * lambda[i];
            }
        }
    }
    b
}

fn check_len(mesh_nodes: usize, v: &[f64]) -> Result<()> {
    if v.len() != mesh_nodes {
        return Err(Error::Dimension { expected: mesh_nodes, got: v.len() });
    }
    Ok(())
}

/// `1/2 V^T K V - b^T V`.
pub fn energy(k: &StiffnessMatrix, b: &[f64], v: &[f64]) -> Result<f64> {
    check_len(k.dim(), v)?;
    check_len(k.dim(), b)?;
    let bv: f64 = b.iter().zip(v).map(|(x, y)| x * y).sum();
    Ok(0.5 * k.quadratic_form(v, v) - bv)
}

/// Energy norm `(V^T K V)^(1/2)`.
pub fn energy_norm(k: &StiffnessMatrix, v: &[f64]) -> f64 {
    libm::sqrt(k.quadratic_form(v, v).max(0.0))
}

/// `|||V - W|||` for two nodal vectors on the same mesh.
pub fn energy_norm_diff(k: &StiffnessMatrix, v: &[f64], w: &[f64]) -> Result<f64> {
    check_len(k.dim(), v)?;
    check_len(k.dim(), w)?;
    let d: Vec<f64> = v.iter().zip(w).map(|(a, b)| a - b).collect();
    Ok(energy_norm(k, &d))
}

/// Nodal values of a coarse P1 function on its refinement. New nodes are
/// edge midpoints and get the mean of the edge's endpoint values.
pub fn prolong(v: &[f64], coarse: &Mesh, fine: &Mesh) -> Result<Vec<f64>> {
    check_len(coarse.num_nodes(), v)?;
    let lineage = fine.lineage().ok_or(Error::NotNested("fine mesh has no parent"))?;
    if lineage.coarse_nodes != coarse.num_nodes() || fine.level() != coarse.level() + 1 {
        return Err(Error::NotNested("fine mesh was not refined from this mesh"));
    }
    if coarse.nodes() != &fine.nodes()[..coarse.num_nodes()] {
        return Err(Error::NotNested("shared nodes differ"));
    }
    let mut out = Vec::with_capacity(fine.num_nodes());
    out.extend_from_slice(v);
    for (k, &[p, q]) in lineage.midpoint_parents.iter().enumerate() {
        let z = fine.node(coarse.num_nodes() + k);
        if z.dist(coarse.node(p).midpoint(coarse.node(q))) > 1e-12 * (1.0 + z.norm()) {
            return Err(Error::NotNested("new node is not an edge midpoint"));
        }
        out.push(0.5 * (v[p] + v[q]));
    }
    Ok(out)
}

/// Nodal interpolant of a field.
pub fn interpolate(mesh: &Mesh, u: &dyn ScalarField) -> Vec<f64> {
    mesh.nodes().iter().map(|&p| u.value(p)).collect()
}

/// Constant gradient of a P1 function on triangle `t`.
pub fn element_gradient(mesh: &Mesh, t: usize, v: &[f64]) -> Point {
    let tri = &mesh.triangles()[t];
    let g = geometry::barycentric_gradients(mesh.vertices(t));
    (0..3).fold(Point::default(), |acc, i| acc + v[tri.vertices[i]] * g[i])
}

/// Squared `L^2` and `H^1`-seminorm errors of a P1 function against a
/// field with analytic gradient, by the 7-point rule on every triangle.
pub fn h1_error_squared(mesh: &Mesh, v: &[f64], exact: &dyn ScalarField) -> Result<(f64, f64)> {
    check_len(mesh.num_nodes(), v)?;
    let mut l2 = 0.0;
    let mut semi = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let grad = element_gradient(mesh, t, v);
        for (p, lambda, w) in quadrature::triangle_points(mesh.vertices(t), mesh.area(t)) {
            let vh: f64 = (0..3).map(|i| lambda[i] * v[tri.vertices[i]]).sum();
            let d = exact.value(p) - vh;
            let g = exact.gradient(p).ok_or(Error::InvalidParameter("exact solution needs a gradient"))? - grad;
            l2 += w * d * d;
            semi += w * g.dot(g);
        }
    }
    Ok((l2, semi))
}
