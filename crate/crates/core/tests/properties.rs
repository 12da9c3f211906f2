use discspec_core::heat::{evolve_cn, generic_datum, HeatProblem};
use discspec_core::sl_solver::solve_lowest;
use discspec_core::spectrum::{assemble_spectrum, mode_truncation};
use discspec_core::{BoundaryCondition, MetricSpec, ModeProblem};
use proptest::prelude::*;

fn log_delta() -> impl Strategy<Value = f64> {
    (-8.0f64..0.5).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coordinates_round_trip(delta in log_delta(), r in 0.0f64..=1.0) {
        let spec = MetricSpec::peaked(delta).unwrap();
        let z = spec.z_of_r(r).unwrap();
        prop_assert!((0.0..=1.0).contains(&z));
        prop_assert!((spec.r_of_z(z).unwrap() - r).abs() < 1e-9);
    }

    #[test]
    fn curvature_is_positive(delta in log_delta(), r in 0.0f64..=1.0) {
        let spec = MetricSpec::peaked(delta).unwrap();
        prop_assert!(spec.gaussian_curvature(r).unwrap() > 0.0);
    }

    #[test]
    fn neumann_never_exceeds_dirichlet(delta in log_delta(), k in 0u32..4) {
        let spec = MetricSpec::peaked(delta).unwrap();
        let n = solve_lowest(&ModeProblem::new(spec.clone(), k, BoundaryCondition::Neumann, 256), 4).unwrap();
        let d = solve_lowest(&ModeProblem::new(spec, k, BoundaryCondition::Dirichlet, 256), 4).unwrap();
        for (a, b) in n.iter().zip(&d) {
            prop_assert!(a.lambda <= b.lambda);
        }
    }

    #[test]
    fn eigenvectors_oscillate(delta in log_delta(), k in 0u32..4, neumann in any::<bool>()) {
        let bc = if neumann { BoundaryCondition::Neumann } else { BoundaryCondition::Dirichlet };
        let spec = MetricSpec::peaked(delta).unwrap();
        let pairs = solve_lowest(&ModeProblem::new(spec, k, bc, 512), 5).unwrap();
        for p in &pairs {
            prop_assert_eq!(p.sign_changes(1e-9), p.j - 1);
            prop_assert!(p.lambda >= 0.0);
        }
        prop_assert!(pairs.windows(2).all(|w| w[0].lambda < w[1].lambda));
    }

    #[test]
    fn spectrum_is_sorted_and_complete(delta in log_delta(), m in 1usize..10) {
        let spec = MetricSpec::peaked(delta).unwrap();
        let table = assemble_spectrum(&spec, BoundaryCondition::Dirichlet, m, 256).unwrap();
        prop_assert!(table.entries.len() >= m);
        prop_assert!(table.entries.windows(2).all(|w| w[0].value <= w[1].value));
        let top = table.value(m).unwrap();
        prop_assert!(mode_truncation(&spec, top) <= table.mode_cutoff);
        for e in &table.entries {
            prop_assert_eq!(e.invariant, e.k == 0);
            prop_assert_eq!(e.multiplicity, if e.k == 0 { 1 } else { 2 });
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn neumann_heat_is_conserved(delta in log_delta()) {
        let problem = HeatProblem {
            spec: MetricSpec::peaked(delta).unwrap(),
            terms: generic_datum(129).unwrap(),
            bc: BoundaryCondition::Neumann,
            n: 128,
            t_end: 0.3,
            output_times: vec![0.0, 0.1, 0.3],
            grid: (17, 8),
        };
        let run = evolve_cn(&problem, 1e-2).unwrap();
        let h0 = run.states[0].heat_content;
        for s in &run.states {
            prop_assert!((s.heat_content - h0).abs() <= 1e-8 * h0.abs());
        }
    }
}
