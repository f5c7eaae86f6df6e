mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tracer_core::sat::{
    enumerate, export_dimacs, parse_dimacs, solve, SolveResult, Solver, SolverConfig,
    Var,
};

#[test]
fn agrees_with_dpll_on_random_cnfs() {
    let mut rng = StdRng::seed_from_u64(0x5a7);
    let mut sat_count = 0;
    for _ in 0..1000 {
        let (nv, clauses) = common::random_cnf(&mut rng);
        let expected = common::dpll(&clauses, &mut vec![0; nv as usize]);
        let cnf = common::to_cnf(nv, &clauses);
        match solve(&cnf, &[]).unwrap() {
            SolveResult::Sat(model) => {
                assert!(expected, "engine says SAT, oracle says UNSAT: {clauses:?}");
                assert!(cnf.eval(model.values()));
                sat_count += 1;
            }
            SolveResult::Unsat { .. } => {
                assert!(!expected, "engine says UNSAT, oracle says SAT: {clauses:?}")
            }
        }
    }
    // the generator should exercise both verdicts
    assert!(sat_count > 100 && sat_count < 900, "sat_count = {sat_count}");
}

#[test]
fn pigeonhole_4_3_is_unsat() {
    assert!(!solve(&common::pigeonhole(4, 3), &[]).unwrap().is_sat());
    assert!(solve(&common::pigeonhole(3, 3), &[]).unwrap().is_sat());
}

#[test]
fn enumeration_matches_exhaustive_projected_count() {
    let mut rng = StdRng::seed_from_u64(42);
    for _ in 0..150 {
        let nv = rng.gen_range(1..=16u32);
        let nc = rng.gen_range(0..=(nv as usize * 2));
        let clauses: Vec<Vec<i32>> = (0..nc)
            .map(|_| {
                (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let v = rng.gen_range(1..=nv) as i32;
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        let proj_len = rng.gen_range(0..=nv.min(6));
        let projection: Vec<Var> = (0..proj_len).map(Var).collect();
        // exhaustive: distinct projections of satisfying assignments
        let mut seen = std::collections::BTreeSet::new();
        for bits in 0u32..(1 << nv) {
            let ok = clauses.iter().all(|c| {
                c.iter().any(|&l| {
                    let val = bits >> (l.unsigned_abs() - 1) & 1 == 1;
                    val == (l > 0)
                })
            });
            if ok {
                seen.insert(bits & ((1u32 << proj_len) - 1));
            }
        }
        let cnf = common::to_cnf(nv, &clauses);
        let models: Vec<_> = enumerate(&cnf, &projection, usize::MAX)
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(models.len(), seen.len(), "clauses {clauses:?}");
        let distinct: std::collections::BTreeSet<_> = models.into_iter().collect();
        assert_eq!(distinct.len(), seen.len());
    }
}

#[test]
fn dimacs_export_is_deterministic_and_reparses() {
    let mut rng = StdRng::seed_from_u64(7);
    let (nv, clauses) = common::random_cnf(&mut rng);
    let cnf = common::to_cnf(nv, &clauses);
    let a = export_dimacs(&cnf);
    let b = export_dimacs(&cnf.clone());
    assert_eq!(a, b);
    assert_eq!(parse_dimacs(&a).unwrap(), cnf);
}

#[test]
fn incremental_clauses_between_solves() {
    let mut s = Solver::new(SolverConfig::default());
    let x = s.new_var();
    let y = s.new_var();
    s.add_clause(&[x.pos(), y.pos()]);
    let m = s.solve(&[]).unwrap();
    assert!(m.is_sat());
    s.add_clause(&[x.neg()]);
    let m = s.solve(&[]).unwrap();
    assert!(m.model().unwrap().value(y));
    s.add_clause(&[y.neg()]);
    assert!(!s.solve(&[]).unwrap().is_sat());
}
