use afem_core::adapt::{
    dorfler_mark, dorfler_mark_contributions, run_adaptive, run_uniform, solve_level, NoClock, StopCriteria,
};
use afem_core::boundary::interpolate_boundary;
use afem_core::estimator::assemble_indicators;
use afem_core::mesh::{build_initial_mesh, DomainSpec};
use afem_core::problems::{
    constant_problem, example1, example1_exact_energy, example2, reference_energy, to_zero_obstacle,
};
use afem_core::Error;

fn stop(max_elements: usize) -> StopCriteria {
    StopCriteria { max_elements, max_level: 60 }
}

#[test]
fn zero_data_stops_at_level_zero() {
    let p = constant_problem(DomainSpec::unit_square(), 0.0, 0.0);
    let run = run_adaptive(&p, 0.5, stop(1000), &mut NoClock).unwrap();
    assert_eq!(run.records.len(), 1);
    assert_eq!(run.records[0].rho, 0.0);
    assert_eq!(run.records[0].marked, 0);
}

#[test]
fn downward_load_on_zero_obstacle_gives_zero() {
    let p = constant_problem(DomainSpec::unit_square(), -2.0, 0.0);
    let run = run_uniform(&p, stop(2000), &mut NoClock).unwrap();
    assert!(run.records.len() >= 5);
    assert!(run.solution.values.iter().all(|&v| v == 0.0));
    let data = to_zero_obstacle(&p).unwrap();
    let mut mesh = build_initial_mesh(&p.domain).unwrap();
    for _ in 0..4 {
        let s = solve_level(&data, &mesh, None, None).unwrap();
        assert!(s.solution.values.iter().all(|&v| v == 0.0));
        assert_eq!(s.energy, 0.0);
        mesh = mesh.refine_uniform().unwrap();
    }
}

#[test]
fn estimator_decays_for_all_marking_parameters() {
    let p = example1();
    for theta in [0.4, 0.6, 0.8] {
        let run = run_adaptive(&p, theta, stop(4000), &mut NoClock).unwrap();
        let r = &run.records;
        assert!(r.last().unwrap().rho < 0.1 * r[0].rho, "theta {theta}");
        assert!(r.windows(2).all(|w| w[1].elements > w[0].elements));
        assert!(r.last().unwrap().elements >= 4000);
        let eps: Vec<f64> = r.iter().map(|x| x.eps.unwrap()).collect();
        assert!(eps.iter().all(|&e| e >= 0.0));
        assert!(eps.last().unwrap() < &(0.01 * eps[0]));
    }
}

#[test]
fn every_level_marks_enough() {
    let p = example1();
    let data = to_zero_obstacle(&p).unwrap();
    let mut mesh = build_initial_mesh(&p.domain).unwrap();
    for _ in 0..8 {
        let s = solve_level(&data, &mesh, None, None).unwrap();
        let gl = interpolate_boundary(data.g.as_ref(), &mesh);
        let ind = assemble_indicators(&mesh, &s.solution.values, data.f.as_ref(), data.g.as_ref(), &gl).unwrap();
        let m = dorfler_mark(&ind, 0.5).unwrap();
        assert!(m.achieved_fraction >= 0.5);
        let sum: f64 = m.marked.iter().map(|&e| ind.edges[e].contribution()).sum();
        assert!((sum / ind.rho2 - m.achieved_fraction).abs() < 1e-12);
        mesh = mesh.refine(&m.marked).unwrap();
    }
}

#[test]
fn marking_examples() {
    let c = [4.0, 3.0, 2.0, 1.0];
    assert_eq!(dorfler_mark_contributions(&c, 0.4).unwrap().marked, vec![0]);
    assert_eq!(dorfler_mark_contributions(&c, 0.8).unwrap().marked, vec![0, 1, 2]);
    assert_eq!(dorfler_mark_contributions(&[0.0; 3], 0.5), Err(Error::ZeroEstimator));
    assert!(dorfler_mark_contributions(&c, 1.0).is_err());
}

#[test]
fn equal_contributions_near_one_mark_everything() {
    let mesh = build_initial_mesh(&DomainSpec::LShape { center: Default::default(), half_width: 2.0 }).unwrap();
    let mut m = mesh;
    for _ in 0..3 {
        let all = dorfler_mark_contributions(&vec![0.7; m.num_edges()], 1.0 - 1e-12).unwrap();
        assert_eq!(all.marked.len(), m.num_edges());
        let fine = m.refine(&all.marked).unwrap();
        assert_eq!(fine, m.refine_uniform().unwrap());
        m = fine;
    }
}

#[test]
fn invalid_theta_is_rejected() {
    let p = example1();
    for theta in [0.0, 1.0, 1.5, -0.1, f64::NAN] {
        let err = run_adaptive(&p, theta, stop(100), &mut NoClock).unwrap_err();
        assert!(matches!(err.error, Error::InvalidParameter(_)));
        assert!(err.records.is_empty());
    }
}

#[test]
fn level_cap_stops_the_loop() {
    let run =
        run_adaptive(&example1(), 0.3, StopCriteria { max_elements: 1 << 30, max_level: 3 }, &mut NoClock).unwrap();
    assert_eq!(run.records.len(), 4);
    assert_eq!(run.records.last().unwrap().level, 3);
}

#[test]
fn uniform_reference_energy_is_close_to_the_exact_energy() {
    let r = reference_energy(&example1(), 100_000).unwrap();
    assert_eq!(r.elements, 32768);
    assert!((r.energy - example1_exact_energy()).abs() < 1e-3);
    let est = r.error_estimate().unwrap();
    assert!(est > 0.1 * (r.energy - example1_exact_energy()).abs() && est < 1e-3);
}

#[test]
fn estimator_reduction_along_adaptive_runs() {
    for problem in [example1(), example2()] {
        for theta in [0.4, 0.6, 0.8] {
            let run = run_adaptive(&problem, theta, stop(8000), &mut NoClock).unwrap();
            for w in run.records.windows(2) {
                let d = w[1].update_norm.unwrap();
                let bound = (1.0 - theta / 4.0) * w[0].rho.powi(2) + d * d + 0.1 * w[0].rho.powi(2);
                assert!(w[1].rho.powi(2) <= bound, "{} theta {theta} level {}", problem.name, w[1].level);
            }
        }
    }
}
