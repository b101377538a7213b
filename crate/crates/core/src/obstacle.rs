//! Discrete obstacle problem with zero obstacle:
//! minimize `1/2 V^T K V - b^T V` over `V >= 0` with `V = g_h` on the boundary.
//!
//! [`solve_obstacle`] is the primal-dual active set method; [`projected_sor_solve`]
//! is an independent projected Gauss-Seidel/SOR iteration used to cross-check it.
//! The multiplier is `lambda = K U - b` at interior nodes: it vanishes on the
//! inactive set and is nonnegative on the active set.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::boundary::DiscreteTrace;
use crate::fem::StiffnessMatrix;
use crate::linalg::{self, CsrMatrix};
use crate::mesh::Mesh;
use crate::{Error, Result};

pub const PDAS_MAX_ITERATIONS: usize = 100;
pub const SOR_MAX_SWEEPS: usize = 100_000;
pub const SOR_TOLERANCE: f64 = 1e-12;
/// Complementarity parameter of the active set update `lambda - c U > 0`.
pub const PDAS_C: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    /// Nodal values of `U`.
    pub values: Vec<f64>,
    /// Interior nodes where `U = 0`, increasing.
    pub active: Vec<usize>,
    /// `K U - b` at interior nodes, zero at boundary nodes.
    pub multiplier: Vec<f64>,
    /// Active set iterations or relaxation sweeps.
    pub iterations: usize,
}

impl DiscreteSolution {
    pub fn active_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.values.len()];
        for &i in &self.active {
            mask[i] = true;
        }
        mask
    }
}

fn check_inputs(mesh: &Mesh, k: &StiffnessMatrix, b: &[f64], gl: &DiscreteTrace) -> Result<()> {
    let n = mesh.num_nodes();
    for len in [k.dim(), b.len(), gl.values.len()] {
        if len != n {
            return Err(Error::Dimension { expected: n, got: len });
        }
    }
    if b.iter().chain(&gl.values).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("load vector or boundary data"));
    }
    for v in 0..n {
        if mesh.is_boundary_node(v) && gl.value(v) < 0.0 {
            return Err(Error::InfeasibleBoundary { node: v, value: gl.value(v) });
        }
    }
    Ok(())
}

fn multiplier(mesh: &Mesh, k: &StiffnessMatrix, b: &[f64], u: &[f64]) -> Vec<f64> {
    let mut lambda = k.mul_vec(u);
    for (i, l) in lambda.iter_mut().enumerate() {
        *l = if mesh.is_boundary_node(i) { 0.0 } else { *l - b[i] };
    }
    lambda
}

/// Solves `K_FF U_F = b_F - K_F* U_*` on the free (inactive interior) nodes,
/// with `U` fixed to `g_h` on the boundary and to zero on the active set.
fn solve_free(
    mesh: &Mesh,
    k: &StiffnessMatrix,
    b: &[f64],
    gl: &DiscreteTrace,
    active: &[bool],
    guess: &[f64],
) -> Result<Vec<f64>> {
    let n = mesh.num_nodes();
    let mut u = vec![0.0; n];
    let mut local = vec![usize::MAX; n];
    let mut free = Vec::new();
    for i in 0..n {
        if mesh.is_boundary_node(i) {
            u[i] = gl.value(i);
        } else if !active[i] {
            local[i] = free.len();
            free.push(i);
        }
    }
    let rhs: Vec<f64> = free
        .iter()
        .map(|&i| b[i] - k.row(i).filter(|&(j, _)| local[j] == usize::MAX).map(|(j, v)| v * u[j]).sum::<f64>())
        .collect();
    let sub: CsrMatrix = k.principal_submatrix(&free, &local);
    let x0: Vec<f64> = free.iter().map(|&i| guess[i]).collect();
    let x = linalg::solve_spd(&sub, &rhs, &x0)?;
    for (&i, xi) in free.iter().zip(x) {
        u[i] = xi;
    }
    Ok(u)
}

/// Primal-dual active set solve from an empty active set.
pub fn solve_obstacle(mesh: &Mesh, k: &StiffnessMatrix, b: &[f64], gl: &DiscreteTrace) -> Result<DiscreteSolution> {
    let n = mesh.num_nodes();
    solve_obstacle_warm(mesh, k, b, gl, &vec![false; n], &vec![0.0; n]).map_err(Error::from)
}

/// Failure of the active set iteration; non-convergence keeps the last iterate.
#[derive(Debug, Clone, PartialEq)]
pub enum PdasError {
    Solver(Error),
    NotConverged { last: Box<DiscreteSolution> },
}

impl From<Error> for PdasError {
    fn from(e: Error) -> Self {
        PdasError::Solver(e)
    }
}

impl From<PdasError> for Error {
    fn from(e: PdasError) -> Self {
        match e {
            PdasError::Solver(e) => e,
            PdasError::NotConverged { .. } => {
                Error::NoConvergence { solver: "active set", iterations: PDAS_MAX_ITERATIONS }
            }
        }
    }
}

/// Primal-dual active set solve starting from `initial_active` (a node mask;
/// boundary entries are ignored) with `guess` as the starting point of
/// iterative inner solves.
pub fn solve_obstacle_warm(
    mesh: &Mesh,
    k: &StiffnessMatrix,
    b: &[f64],
    gl: &DiscreteTrace,
    initial_active: &[bool],
    guess: &[f64],
) -> core::result::Result<DiscreteSolution, PdasError> {
    check_inputs(mesh, k, b, gl)?;
    let n = mesh.num_nodes();
    if initial_active.len() != n || guess.len() != n {
        return Err(Error::Dimension { expected: n, got: initial_active.len().min(guess.len()) }.into());
    }
    let mut active: Vec<bool> = (0..n).map(|i| initial_active[i] && !mesh.is_boundary_node(i)).collect();
    let mut u = guess.to_vec();
    let u_scale = gl.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let b_scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let (u_tol, l_tol) = (1e-13 * u_scale, 1e-13 * b_scale);

    for it in 1..=PDAS_MAX_ITERATIONS {
        u = solve_free(mesh, k, b, gl, &active, &u)?;
        let mut lambda = multiplier(mesh, k, b, &u);
        for i in 0..n {
            if !active[i] {
                lambda[i] = 0.0;
            }
        }
        let next: Vec<bool> = (0..n).map(|i| !mesh.is_boundary_node(i) && lambda[i] - PDAS_C * u[i] > 0.0).collect();
        // stop on a fixed point, or when the iterate is feasible up to round-off
        let feasible = (0..n).all(|i| if active[i] { lambda[i] >= -l_tol } else { u[i] >= -u_tol });
        if next == active || feasible {
            return Ok(finish(mesh, k, b, u, active, it));
        }
        active = next;
    }
    let lambda = multiplier(mesh, k, b, &u);
    let last = DiscreteSolution {
        active: (0..n).filter(|&i| active[i]).collect(),
        values: u,
        multiplier: lambda,
        iterations: PDAS_MAX_ITERATIONS,
    };
    Err(PdasError::NotConverged { last: Box::new(last) })
}

/// Moves round-off negatives on the inactive set onto the obstacle and
/// recomputes the multiplier.
fn finish(
    mesh: &Mesh,
    k: &StiffnessMatrix,
    b: &[f64],
    mut u: Vec<f64>,
    mut active: Vec<bool>,
    iterations: usize,
) -> DiscreteSolution {
    for i in 0..u.len() {
        if !mesh.is_boundary_node(i) && (active[i] || u[i] < 0.0) {
            u[i] = 0.0;
            active[i] = true;
        }
    }
    let multiplier = multiplier(mesh, k, b, &u);
    DiscreteSolution { active: (0..u.len()).filter(|&i| active[i]).collect(), values: u, multiplier, iterations }
}

/// Projected SOR: Gauss-Seidel sweeps with relaxation `omega` and
/// projection onto `U >= 0`, until the largest nodal update is below
/// [`SOR_TOLERANCE`].
pub fn projected_sor_solve(
    mesh: &Mesh,
    k: &StiffnessMatrix,
    b: &[f64],
    gl: &DiscreteTrace,
    omega: f64,
) -> Result<DiscreteSolution> {
    if !(omega > 0.0 && omega < 2.0) {
        return Err(Error::InvalidParameter("relaxation must lie in (0, 2)"));
    }
    check_inputs(mesh, k, b, gl)?;
    let n = mesh.num_nodes();
    let mut u: Vec<f64> = (0..n).map(|i| if mesh.is_boundary_node(i) { gl.value(i) } else { 0.0 }).collect();
    let interior: Vec<usize> = mesh.interior_nodes().collect();
    let diag = k.diagonal();
    for sweep in 1..=SOR_MAX_SWEEPS {
        let mut largest = 0.0f64;
        for &i in &interior {
            let off: f64 = k.row(i).filter(|&(j, _)| j != i).map(|(j, v)| v * u[j]).sum();
            let gs = (b[i] - off) / diag[i];
            let next = ((1.0 - omega) * u[i] + omega * gs).max(0.0);
            largest = largest.max((next - u[i]).abs());
            u[i] = next;
        }
        if largest < SOR_TOLERANCE {
            let active: Vec<usize> = interior.iter().copied().filter(|&i| u[i] == 0.0).collect();
            let multiplier = multiplier(mesh, k, b, &u);
            return Ok(DiscreteSolution { values: u, active, multiplier, iterations: sweep });
        }
    }
    Err(Error::NoConvergence { solver: "projected SOR", iterations: SOR_MAX_SWEEPS })
}

/// Largest violations of the discrete complementarity system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktReport {
    /// `max(-U_i)` over all nodes.
    pub negativity: f64,
    /// `max(-lambda_i)` over the active set.
    pub multiplier_sign: f64,
    /// `max |lambda_i|` over the inactive interior nodes.
    pub inactive_residual: f64,
    /// `max |U_i|` over the active set.
    pub active_gap: f64,
}

impl KktReport {
    pub fn max_violation(&self) -> f64 {
        self.negativity.max(self.multiplier_sign).max(self.inactive_residual).max(self.active_gap)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// Recomputes `lambda = K U - b` and measures the complementarity
/// conditions against the active set stored in `sol`.
pub fn check_kkt(mesh: &Mesh, sol: &DiscreteSolution, k: &StiffnessMatrix, b: &[f64]) -> KktReport {
    let lambda = multiplier(mesh, k, b, &sol.values);
    let active = sol.active_mask();
    let mut report = KktReport::default();
    for (i, &u) in sol.values.iter().enumerate() {
        report.negativity = report.negativity.max(-u);
        if mesh.is_boundary_node(i) {
            continue;
        }
        if active[i] {
            report.multiplier_sign = report.multiplier_sign.max(-lambda[i]);
            report.active_gap = report.active_gap.max(u.abs());
        } else {
            report.inactive_residual = report.inactive_residual.max(lambda[i].abs());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::interpolate_boundary;
    use crate::fem::{assemble_load, assemble_stiffness, energy};
    use crate::field::Constant;
    use crate::mesh::{build_initial_mesh, DomainSpec};

    fn square(levels: usize) -> Mesh {
        let mut m = build_initial_mesh(&DomainSpec::unit_square()).unwrap();
        for _ in 0..levels {
            m = m.refine_uniform().unwrap();
        }
        m
    }

    fn system(m: &Mesh, f: f64) -> (StiffnessMatrix, Vec<f64>, DiscreteTrace) {
        (assemble_stiffness(m).unwrap(), assemble_load(m, &Constant(f)), interpolate_boundary(&Constant(0.0), m))
    }

    #[test]
    fn downward_force_gives_zero() {
        let m = square(3);
        let (k, b, gl) = system(&m, -2.0);
        let sol = solve_obstacle(&m, &k, &b, &gl).unwrap();
        assert!(sol.values.iter().all(|&v| v == 0.0));
        assert_eq!(sol.active.len(), m.interior_nodes().count());
        assert_eq!(check_kkt(&m, &sol, &k, &b).max_violation(), 0.0);
        let sor = projected_sor_solve(&m, &k, &b, &gl, 1.5).unwrap();
        assert!(sor.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn upward_force_matches_linear_solve() {
        let m = square(4);
        let (k, b, gl) = system(&m, 1.0);
        let sol = solve_obstacle(&m, &k, &b, &gl).unwrap();
        assert!(sol.active.is_empty());
        let mut free = vec![usize::MAX; m.num_nodes()];
        let interior: Vec<usize> = m.interior_nodes().collect();
        for (l, &i) in interior.iter().enumerate() {
            free[i] = l;
        }
        let sub = k.principal_submatrix(&interior, &free);
        let rhs: Vec<f64> = interior.iter().map(|&i| b[i]).collect();
        let mut x = vec![0.0; interior.len()];
        crate::linalg::conjugate_gradient(&sub, &rhs, &mut x, 1e-14, 10_000).unwrap();
        for (l, &i) in interior.iter().enumerate() {
            assert!((sol.values[i] - x[l]).abs() < 1e-10);
            assert!(x[l] > 0.0);
        }
    }

    #[test]
    fn negative_boundary_data_is_infeasible() {
        let m = square(1);
        let (k, b, _) = system(&m, 1.0);
        let gl = interpolate_boundary(&Constant(-0.1), &m);
        assert!(matches!(solve_obstacle(&m, &k, &b, &gl), Err(Error::InfeasibleBoundary { .. })));
        assert!(matches!(projected_sor_solve(&m, &k, &b, &gl, 1.0), Err(Error::InfeasibleBoundary { .. })));
    }

    #[test]
    fn relaxation_parameter_is_checked() {
        let m = square(1);
        let (k, b, gl) = system(&m, 1.0);
        assert!(projected_sor_solve(&m, &k, &b, &gl, 2.0).is_err());
        assert!(projected_sor_solve(&m, &k, &b, &gl, 0.0).is_err());
    }

    #[test]
    fn perturbation_is_detected_by_kkt() {
        let m = square(3);
        let (k, b, gl) = system(&m, 1.0);
        let mut sol = solve_obstacle(&m, &k, &b, &gl).unwrap();
        let before = check_kkt(&m, &sol, &k, &b);
        assert!(before.holds(1e-10));
        let i = m.interior_nodes().next().unwrap();
        sol.values[i] += 1e-3;
        let expect = 1e-3 * k.row(i).map(|(_, v)| v.abs()).fold(0.0, f64::max);
        let after = check_kkt(&m, &sol, &k, &b);
        assert!((after.inactive_residual - expect).abs() < 1e-9);
    }

    #[test]
    fn mixed_contact_agrees_with_sor() {
        // force pushing down on the left half and up on the right half
        let m = square(3);
        let k = assemble_stiffness(&m).unwrap();
        let f = crate::field::FnField(|p: crate::Point| if p.x < 0.5 { -4.0 } else { 6.0 });
        let b = assemble_load(&m, &f);
        let gl = interpolate_boundary(&Constant(0.0), &m);
        let pdas = solve_obstacle(&m, &k, &b, &gl).unwrap();
        let sor = projected_sor_solve(&m, &k, &b, &gl, 1.6).unwrap();
        assert!(!pdas.active.is_empty());
        for (a, s) in pdas.values.iter().zip(&sor.values) {
            assert!((a - s).abs() < 1e-9);
        }
        assert!(check_kkt(&m, &pdas, &k, &b).holds(1e-12));
        let ep = energy(&k, &b, &pdas.values).unwrap();
        let es = energy(&k, &b, &sor.values).unwrap();
        assert!(ep <= es + 1e-14);
    }
}
