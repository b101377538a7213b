//! Dörfler marking and the solve, estimate, mark, refine loop.

use alloc::vec;
use alloc::vec::Vec;

use crate::boundary::interpolate_boundary;
use crate::estimator::{assemble_indicators, IndicatorSet};
use crate::fem::{self, assemble_load, assemble_stiffness};
use crate::field::{Combination, SharedField};
use crate::mesh::{build_initial_mesh, Mesh};
use crate::obstacle::{solve_obstacle_warm, DiscreteSolution};
use crate::problems::{to_zero_obstacle, ProblemSpec, TransformedProblem};
use crate::{Error, Result};

pub const DEFAULT_MAX_ELEMENTS: usize = 50_000;
pub const DEFAULT_MAX_LEVEL: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct MarkingResult {
    /// Marked edge ids, in decreasing order of contribution.
    pub marked: Vec<usize>,
    pub theta: f64,
    /// Marked share of `rho^2`.
    pub achieved_fraction: f64,
}

/// Smallest set of edges whose contributions reach `theta` times the total:
/// edges sorted by decreasing contribution (ties by increasing id) and taken
/// greedily.
pub fn dorfler_mark_contributions(contributions: &[f64], theta: f64) -> Result<MarkingResult> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter("theta must lie in (0, 1)"));
    }
    let total: f64 = contributions.iter().sum();
    if !total.is_finite() {
        return Err(Error::NonFinite("estimator"));
    }
    if !(total > 0.0) {
        return Err(Error::ZeroEstimator);
    }
    let mut order: Vec<usize> = (0..contributions.len()).collect();
    order.sort_by(|&a, &b| contributions[b].total_cmp(&contributions[a]).then(a.cmp(&b)));
    let goal = theta * total;
    let mut sum = 0.0;
    let mut count = order.len();
    for (k, &e) in order.iter().enumerate() {
        sum += contributions[e];
        if sum >= goal {
            count = k + 1;
            break;
        }
    }
    order.truncate(count);
    let marked_sum: f64 = order.iter().map(|&e| contributions[e]).sum();
    Ok(MarkingResult { marked: order, theta, achieved_fraction: marked_sum / total })
}

pub fn dorfler_mark(indicators: &IndicatorSet, theta: f64) -> Result<MarkingResult> {
    dorfler_mark_contributions(&indicators.contributions(), theta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// Dörfler marking with parameter `theta`.
    Adaptive { theta: f64 },
    /// Every edge marked.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCriteria {
    /// Stop once a level has at least this many elements.
    pub max_elements: usize,
    /// Stop once this level has been solved.
    pub max_level: usize,
}

impl Default for StopCriteria {
    fn default() -> Self {
        Self { max_elements: DEFAULT_MAX_ELEMENTS, max_level: DEFAULT_MAX_LEVEL }
    }
}

/// Source of wall-clock time in milliseconds; the core crate has no clock.
pub trait Clock {
    fn now_ms(&mut self) -> f64;
}

/// A clock that always reads zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_ms(&mut self) -> f64 {
        0.0
    }
}

/// Everything recorded for one level of the loop.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopRecord {
    pub level: usize,
    /// Number of elements.
    pub elements: usize,
    pub nodes: usize,
    pub rho: f64,
    pub rho_tilde: f64,
    pub apx: f64,
    /// Discrete energy of the zero-obstacle problem.
    pub energy: f64,
    /// `|J(U) - J(u)|` when an exact or reference energy is known.
    pub eps: Option<f64>,
    /// `||u - U||_{H^1}` when the exact solution is known.
    pub h1_error: Option<f64>,
    /// `|||U - U_prev|||` on this level's mesh.
    pub update_norm: Option<f64>,
    pub pdas_iterations: usize,
    /// Number of edges marked on this level (zero on the last level).
    pub marked: usize,
    pub wall_ms: f64,
}

/// Final state of a loop run.
#[derive(Debug, Clone)]
pub struct AdaptiveRun {
    pub records: Vec<LoopRecord>,
    pub mesh: Mesh,
    pub solution: DiscreteSolution,
    pub indicators: IndicatorSet,
}

/// A failed run with the records of the levels completed before the failure.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub error: Error,
    pub records: Vec<LoopRecord>,
}

/// Output of one solve/estimate pass.
pub struct LevelSolve {
    pub stiffness: fem::StiffnessMatrix,
    pub solution: DiscreteSolution,
    pub energy: f64,
}

/// Assembles and solves the zero-obstacle problem on `mesh`, warm-started
/// from a previous active set and iterate given as node masks/vectors on
/// this mesh.
pub fn solve_level(
    data: &TransformedProblem,
    mesh: &Mesh,
    active: Option<&[bool]>,
    guess: Option<&[f64]>,
) -> Result<LevelSolve> {
    let n = mesh.num_nodes();
    let k = assemble_stiffness(mesh)?;
    let b = assemble_load(mesh, data.f.as_ref());
    let gl = interpolate_boundary(data.g.as_ref(), mesh);
    let no_active = vec![false; n];
    let zero = vec![0.0; n];
    let solution = solve_obstacle_warm(mesh, &k, &b, &gl, active.unwrap_or(&no_active), guess.unwrap_or(&zero))
        .map_err(Error::from)?;
    let energy = fem::energy(&k, &b, &solution.values)?;
    Ok(LevelSolve { stiffness: k, solution, energy })
}

/// Runs the loop on `problem` until the stop criteria hold or the
/// estimator vanishes.
pub fn run(
    problem: &ProblemSpec,
    strategy: Strategy,
    stop: StopCriteria,
    clock: &mut dyn Clock,
) -> core::result::Result<AdaptiveRun, RunFailure> {
    let mut records = Vec::new();
    match run_inner(problem, strategy, stop, clock, &mut records) {
        Ok(mut out) => {
            out.records = records;
            Ok(out)
        }
        Err(error) => Err(RunFailure { error, records }),
    }
}

/// Algorithm loop with Dörfler marking.
pub fn run_adaptive(
    problem: &ProblemSpec,
    theta: f64,
    stop: StopCriteria,
    clock: &mut dyn Clock,
) -> core::result::Result<AdaptiveRun, RunFailure> {
    run(problem, Strategy::Adaptive { theta }, stop, clock)
}

/// The same loop with every edge marked on every level.
pub fn run_uniform(
    problem: &ProblemSpec,
    stop: StopCriteria,
    clock: &mut dyn Clock,
) -> core::result::Result<AdaptiveRun, RunFailure> {
    run(problem, Strategy::Uniform, stop, clock)
}

fn run_inner(
    problem: &ProblemSpec,
    strategy: Strategy,
    stop: StopCriteria,
    clock: &mut dyn Clock,
    records: &mut Vec<LoopRecord>,
) -> Result<AdaptiveRun> {
    if let Strategy::Adaptive { theta } = strategy {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParameter("theta must lie in (0, 1)"));
        }
    }
    let data = to_zero_obstacle(problem)?;
    // exact solution in the shifted frame, for H^1 errors
    let exact_shifted: Option<SharedField> =
        problem.exact.as_ref().and_then(|ex| ex.u.clone()).map(|u| match &data.shift {
            Some(chi) => alloc::sync::Arc::new(Combination { a: u, b: chi.clone(), sign: -1.0 }) as SharedField,
            None => u,
        });

    let mut mesh = build_initial_mesh(&problem.domain)?;
    let mut warm: Option<(Vec<bool>, Vec<f64>)> = None;
    let mut previous: Option<(Mesh, Vec<f64>)> = None;
    loop {
        let start = clock.now_ms();
        let level = solve_level(&data, &mesh, warm.as_ref().map(|w| &w.0[..]), warm.as_ref().map(|w| &w.1[..]))?;
        let gl = interpolate_boundary(data.g.as_ref(), &mesh);
        let indicators = assemble_indicators(&mesh, &level.solution.values, data.f.as_ref(), data.g.as_ref(), &gl)?;
        if !indicators.rho2.is_finite() {
            return Err(Error::NonFinite("estimator"));
        }

        let update_norm = match &previous {
            Some((coarse, u)) => {
                let p = fem::prolong(u, coarse, &mesh)?;
                Some(fem::energy_norm_diff(&level.stiffness, &level.solution.values, &p)?)
            }
            None => None,
        };
        let h1_error = match &exact_shifted {
            Some(u) if u.gradient(mesh.node(0)).is_some() => {
                let (l2, semi) = fem::h1_error_squared(&mesh, &level.solution.values, u.as_ref())?;
                Some(libm::sqrt(l2 + semi))
            }
            _ => None,
        };

        let done =
            indicators.rho2 == 0.0 || mesh.num_triangles() >= stop.max_elements || mesh.level() >= stop.max_level;
        let marking = if done {
            None
        } else {
            Some(match strategy {
                Strategy::Adaptive { theta } => dorfler_mark(&indicators, theta)?.marked,
                Strategy::Uniform => (0..mesh.num_edges()).collect(),
            })
        };

        records.push(LoopRecord {
            level: mesh.level(),
            elements: mesh.num_triangles(),
            nodes: mesh.num_nodes(),
            rho: indicators.rho(),
            rho_tilde: libm::sqrt(indicators.rho_tilde2),
            apx: libm::sqrt(indicators.apx2),
            energy: level.energy,
            eps: problem.exact.as_ref().map(|ex| (level.energy - ex.energy).abs()),
            h1_error,
            update_norm,
            pdas_iterations: level.solution.iterations,
            marked: marking.as_ref().map_or(0, Vec::len),
            wall_ms: 0.0,
        });

        let Some(marked) = marking else {
            if let Some(last) = records.last_mut() {
                last.wall_ms = clock.now_ms() - start;
            }
            return Ok(AdaptiveRun { records: Vec::new(), mesh, solution: level.solution, indicators });
        };
        let fine = mesh.refine(&marked)?;
        let u_fine = fem::prolong(&level.solution.values, &mesh, &fine)?;
        let mut active = level.solution.active_mask();
        active.resize(fine.num_nodes(), false);
        warm = Some((active, u_fine));
        previous = Some((mesh, level.solution.values));
        mesh = fine;
        if let Some(last) = records.last_mut() {
            last.wall_ms = clock.now_ms() - start;
        }
    }
}

/// Energy of the Galerkin solution on the finest uniform refinement of the
/// initial mesh with at most `max_elements` elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceEnergy {
    pub energy: f64,
    pub elements: usize,
    /// `(elements, energy)` of every uniform level up to the reference.
    pub history: Vec<(usize, f64)>,
}

impl ReferenceEnergy {
    /// Estimate of `|J(U_ref) - J(u)|` by Aitken extrapolation of the
    /// last three uniform energies, if the differences contract.
    pub fn error_estimate(&self) -> Option<f64> {
        let n = self.history.len();
        if n < 3 {
            return None;
        }
        let d1 = self.history[n - 2].1 - self.history[n - 3].1;
        let d2 = self.history[n - 1].1 - self.history[n - 2].1;
        let q = d2 / d1;
        if !(q.abs() < 1.0) || !q.is_finite() {
            return None;
        }
        Some((d2 * q / (1.0 - q)).abs())
    }
}

/// Solves on successive uniform refinements (nested iteration) and returns
/// the energy on the largest one with at most `max_elements` elements.
pub fn reference_energy(problem: &ProblemSpec, max_elements: usize) -> Result<ReferenceEnergy> {
    let data = to_zero_obstacle(problem)?;
    let mut mesh = build_initial_mesh(&problem.domain)?;
    if mesh.num_triangles() > max_elements {
        return Err(Error::InvalidParameter("reference element budget below the initial mesh"));
    }
    let mut warm: Option<(Vec<bool>, Vec<f64>)> = None;
    let mut history = Vec::new();
    loop {
        let level = solve_level(&data, &mesh, warm.as_ref().map(|w| &w.0[..]), warm.as_ref().map(|w| &w.1[..]))?;
        history.push((mesh.num_triangles(), level.energy));
        if 4 * mesh.num_triangles() > max_elements {
            return Ok(ReferenceEnergy { energy: level.energy, elements: mesh.num_triangles(), history });
        }
        let fine = mesh.refine_uniform()?;
        let u = fem::prolong(&level.solution.values, &mesh, &fine)?;
        let mut active = level.solution.active_mask();
        active.resize(fine.num_nodes(), false);
        warm = Some((active, u));
        mesh = fine;
    }
}
