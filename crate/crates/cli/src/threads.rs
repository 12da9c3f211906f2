use discspec_core::sl_solver::solve_lowest;
use discspec_core::spectrum::ModeSolver;
use discspec_core::{EigenPair, ModeProblem, Result};

/// Distributes mode jobs round-robin over scoped worker threads.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    pub threads: usize,
}

impl Threaded {
    pub fn new(threads: Option<usize>) -> Self {
        let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
        Threaded { threads }
    }
}

impl ModeSolver for Threaded {
    fn solve(&self, jobs: &[(ModeProblem, usize)]) -> Result<Vec<Vec<EigenPair>>> {
        let workers = self.threads.min(jobs.len());
        if workers <= 1 {
            return jobs.iter().map(|(p, c)| solve_lowest(p, *c)).collect();
        }
        let mut slots: Vec<Option<Result<Vec<EigenPair>>>> = (0..jobs.len()).map(|_| None).collect();
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    s.spawn(move || {
                        (w..jobs.len())
                            .step_by(workers)
                            .map(|i| (i, solve_lowest(&jobs[i].0, jobs[i].1)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("mode worker panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        slots.into_iter().map(|r| r.expect("every job is assigned")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use discspec_core::spectrum::Sequential;
    use discspec_core::{BoundaryCondition, MetricSpec};

    #[test]
    fn matches_sequential_in_order() {
        let spec = MetricSpec::peaked(0.01).unwrap();
        let jobs: Vec<_> =
            (0..5).map(|k| (ModeProblem::new(spec.clone(), k, BoundaryCondition::Dirichlet, 256), 3)).collect();
        let a = Threaded { threads: 3 }.solve(&jobs).unwrap();
        let b = Sequential.solve(&jobs).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let lx: Vec<f64> = x.iter().map(|p| p.lambda).collect();
            let ly: Vec<f64> = y.iter().map(|p| p.lambda).collect();
            assert_eq!(lx, ly);
            assert_eq!(x[0].k, y[0].k);
        }
    }

    #[test]
    fn first_error_in_job_order() {
        let spec = MetricSpec::flat_disc();
        let jobs = vec![
            (ModeProblem::new(spec.clone(), 0, BoundaryCondition::Dirichlet, 64), 2),
            (ModeProblem::new(spec.clone(), 1, BoundaryCondition::Dirichlet, 64), 100),
            (ModeProblem::new(spec, 2, BoundaryCondition::Dirichlet, 8), 1),
        ];
        let err = Threaded { threads: 2 }.solve(&jobs).unwrap_err();
        assert!(matches!(err, discspec_core::Error::Resolution { .. }), "{err:?}");
    }
}
