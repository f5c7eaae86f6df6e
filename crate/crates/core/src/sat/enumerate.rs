use super::{Cnf, Lit, SatError, SolveResult, Solver, SolverConfig, Var};

/// Streams models that are pairwise distinct on `projection`, adding one
/// blocking clause per model.
#[derive(Debug)]
pub struct ModelEnumerator {
    solver: Solver,
    projection: Vec<Var>,
    remaining: usize,
    done: bool,
}

pub fn enumerate(cnf: &Cnf, projection: &[Var], limit: usize) -> ModelEnumerator {
    ModelEnumerator::new(
        Solver::from_cnf(cnf, SolverConfig::from_env()),
        projection,
        limit,
    )
}

impl ModelEnumerator {
    pub fn new(solver: Solver, projection: &[Var], limit: usize) -> Self {
        let mut projection = projection.to_vec();
        projection.sort_unstable();
        projection.dedup();
        ModelEnumerator {
            solver,
            projection,
            remaining: limit,
            done: limit == 0,
        }
    }
}

impl Iterator for ModelEnumerator {
    /// Values of the projection variables, in ascending variable order.
    type Item = Result<Vec<(Var, bool)>, SatError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.solver.solve(&[]) {
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
            Ok(SolveResult::Unsat { .. }) => {
                self.done = true;
                None
            }
            Ok(SolveResult::Sat(model)) => {
                let projected: Vec<(Var, bool)> = self
                    .projection
                    .iter()
                    .map(|&v| (v, v.index() < model.values().len() && model.value(v)))
                    .collect();
                let block: Vec<Lit> = projected
                    .iter()
                    .map(|&(v, val)| Lit::new(v, !val))
                    .collect();
                if block.is_empty() || !self.solver.add_clause(&block) {
                    self.done = true;
                }
                self.remaining -= 1;
                if self.remaining == 0 {
                    self.done = true;
                }
                Some(Ok(projected))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_models_on_one_projected_var() {
        let cnf = Cnf::with_vars(2);
        let models: Vec<_> = enumerate(&cnf, &[Var(0)], 10)
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(models.len(), 2);
    }

    #[test]
    fn limit_zero_is_empty() {
        let cnf = Cnf::with_vars(3);
        assert_eq!(enumerate(&cnf, &[Var(0)], 0).count(), 0);
    }
}
