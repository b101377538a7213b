//! Random obstacle problems on small random meshes, for cross-checking the
//! active set solver against projected SOR.

use std::sync::Arc;

use afem_core::boundary::{interpolate_boundary, DiscreteTrace};
use afem_core::fem::{assemble_load, assemble_stiffness, StiffnessMatrix};
use afem_core::field::{Expr, ScalarField};
use afem_core::mesh::{build_initial_mesh, DomainSpec, Mesh};
use afem_core::obstacle::{check_kkt, projected_sor_solve, solve_obstacle, DiscreteSolution, KktReport};
use afem_core::problems::ProblemSpec;
use afem_core::Point;
use rand::seq::SliceRandom;
use rand::Rng;

/// Relaxation used for the projected SOR reference solves.
pub const SOR_OMEGA: f64 = 1.5;

/// A discrete zero-obstacle system on a random mesh.
pub struct Instance {
    pub mesh: Mesh,
    pub problem: ProblemSpec,
    pub stiffness: StiffnessMatrix,
    pub load: Vec<f64>,
    pub trace: DiscreteTrace,
}

fn random_domain<R: Rng>(rng: &mut R) -> DomainSpec {
    let center = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let half_width = rng.gen_range(0.5..2.0);
    if rng.gen_bool(0.5) {
        DomainSpec::Square { center, half_width }
    } else {
        DomainSpec::LShape { center, half_width }
    }
}

/// Refines random edge subsets of an initial mesh while the node count
/// stays at most `max_nodes`.
pub fn random_mesh<R: Rng>(rng: &mut R, domain: &DomainSpec, max_nodes: usize) -> Mesh {
    let mut mesh = build_initial_mesh(domain).expect("built-in domains mesh");
    for _ in 0..64 {
        let mut edges: Vec<usize> = (0..mesh.num_edges()).collect();
        edges.shuffle(rng);
        let take = rng.gen_range(1..=edges.len().min(8));
        let fine = mesh.refine(&edges[..take]).expect("refinement of valid edges");
        if fine.num_nodes() > max_nodes {
            break;
        }
        mesh = fine;
    }
    mesh
}

/// Polynomial with total degree at most 2 and coefficients in `[-scale, scale]`.
pub fn random_quadratic<R: Rng>(rng: &mut R, scale: f64) -> Vec<(f64, u32, u32)> {
    [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        .iter()
        .map(|&(i, j)| (rng.gen_range(-scale..scale), i, j))
        .collect()
}

/// Random square or L-shaped domain, random mesh with at most `max_nodes`
/// nodes, random quadratic load with a negative constant part (so that
/// contact occurs) and boundary data `(a + bx + cy)^2 + d >= 0`.
pub fn random_instance<R: Rng>(rng: &mut R, max_nodes: usize) -> Instance {
    let domain = random_domain(rng);
    let mesh = random_mesh(rng, &domain, max_nodes);
    let mut load = random_quadratic(rng, 8.0);
    load[0].0 = rng.gen_range(-30.0..-5.0);
    let f = Expr::Polynomial(load);
    let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let d = rng.gen_range(0.0..0.5);
    let g = Expr::Polynomial(vec![
        (a * a + d, 0, 0),
        (2.0 * a * b, 1, 0),
        (2.0 * a * c, 0, 1),
        (b * b, 2, 0),
        (2.0 * b * c, 1, 1),
        (c * c, 0, 2),
    ]);
    let problem = ProblemSpec { name: "random".into(), domain, chi: None, g: Arc::new(g), f: Arc::new(f), exact: None };
    let stiffness = assemble_stiffness(&mesh).expect("nondegenerate mesh");
    let load = assemble_load(&mesh, problem.f.as_ref());
    let trace = interpolate_boundary(problem.g.as_ref(), &mesh);
    Instance { mesh, problem, stiffness, load, trace }
}

/// Outcome of solving one instance with both solvers.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub nodes: usize,
    pub active: usize,
    pub max_difference: f64,
    pub pdas_kkt: KktReport,
    pub sor_kkt: KktReport,
    pub pdas: DiscreteSolution,
    pub sor: DiscreteSolution,
}

pub fn compare_solvers(inst: &Instance) -> afem_core::Result<Comparison> {
    let pdas = solve_obstacle(&inst.mesh, &inst.stiffness, &inst.load, &inst.trace)?;
    let sor = projected_sor_solve(&inst.mesh, &inst.stiffness, &inst.load, &inst.trace, SOR_OMEGA)?;
    let max_difference = pdas.values.iter().zip(&sor.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Comparison {
        nodes: inst.mesh.num_nodes(),
        active: pdas.active.len(),
        max_difference,
        pdas_kkt: check_kkt(&inst.mesh, &pdas, &inst.stiffness, &inst.load),
        sor_kkt: check_kkt(&inst.mesh, &sor, &inst.stiffness, &inst.load),
        pdas,
        sor,
    })
}

/// Smallest value of `g` over the boundary nodes of the instance mesh.
pub fn boundary_minimum(inst: &Instance) -> f64 {
    inst.mesh
        .nodes()
        .iter()
        .zip(inst.mesh.boundary_nodes())
        .filter(|(_, &b)| b)
        .map(|(&p, _)| inst.problem.g.value(p))
        .fold(f64::INFINITY, f64::min)
}
