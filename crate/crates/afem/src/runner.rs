use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use afem_core::adapt::{run, Clock, LoopRecord, ReferenceEnergy, Strategy};
use afem_core::estimator::IndicatorSet;
use afem_core::mesh::Mesh;
use afem_core::problems::{example1, example2, reference_energy, ExactSolution, ProblemSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Mode, ProblemChoice, RunConfig};
use crate::custom::CustomProblem;
use crate::error::{AfemError, Result};
use crate::formats::{write_indicators, write_levels, write_mesh, LevelRow};
use crate::instances::{compare_solvers, random_instance, Comparison};

/// Milliseconds since construction.
#[derive(Debug, Clone, Copy)]
pub struct StdClock(Instant);

impl Default for StdClock {
    fn default() -> Self {
        StdClock(Instant::now())
    }
}

impl Clock for StdClock {
    fn now_ms(&mut self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

pub fn load_problem(choice: &ProblemChoice) -> Result<ProblemSpec> {
    match choice {
        ProblemChoice::Example1 => Ok(example1()),
        ProblemChoice::Example2 => Ok(example2()),
        ProblemChoice::Custom(path) => CustomProblem::load(path)?.to_problem(),
    }
}

/// Attaches a uniform reference energy with at most `elements` elements
/// when the problem has no known energy and `elements > 0`.
pub fn attach_reference(problem: &mut ProblemSpec, elements: usize) -> Result<Option<ReferenceEnergy>> {
    if problem.exact.is_some() || elements == 0 {
        return Ok(None);
    }
    let reference = reference_energy(problem, elements)?;
    problem.exact = Some(ExactSolution { u: None, energy: reference.energy });
    Ok(Some(reference))
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<LoopRecord>,
    pub reference: Option<ReferenceEnergy>,
    pub mesh: Mesh,
    pub indicators: IndicatorSet,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| AfemError::io(path, e))
}

fn emit_levels(records: &[LoopRecord], cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let rows: Vec<LevelRow> = records.iter().map(LevelRow::from).collect();
    match &cfg.out {
        Some(path) => write_levels(&rows, create(path)?),
        None => write_levels(&rows, stdout),
    }
}

/// Runs the configured loop and writes the level CSV (to `stdout` when no
/// output path is set) and the requested dumps. A failing loop still writes
/// the levels it completed.
pub fn execute(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut problem = load_problem(&cfg.problem)?;
    let reference = attach_reference(&mut problem, cfg.reference_elements)?;
    let strategy = match cfg.mode {
        Mode::Adaptive => Strategy::Adaptive { theta: cfg.theta },
        Mode::Uniform => Strategy::Uniform,
    };
    let out = match run(&problem, strategy, cfg.stop, &mut StdClock::default()) {
        Ok(out) => out,
        Err(failure) => {
            emit_levels(&failure.records, cfg, stdout)?;
            return Err(AfemError::Aborted { error: failure.error, records: failure.records });
        }
    };
    emit_levels(&out.records, cfg, stdout)?;
    if let Some(path) = &cfg.dump_mesh {
        write_mesh(&out.mesh, create(path)?).map_err(|e| AfemError::io(path, e))?;
    }
    if let Some(path) = &cfg.dump_indicators {
        write_indicators(&out.indicators, create(path)?)?;
    }
    Ok(RunOutcome { records: out.records, reference, mesh: out.mesh, indicators: out.indicators })
}

/// Solves `cases` random instances with both obstacle solvers.
pub fn cross_check(seed: u64, cases: usize, max_nodes: usize) -> Result<Vec<Comparison>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases).map(|_| compare_solvers(&random_instance(&mut rng, max_nodes)).map_err(AfemError::from)).collect()
}
