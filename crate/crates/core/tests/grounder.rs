mod common;

use rand::rngs::StdRng;
use rand::SeedableRng;
use tracer_core::grounder::{Circuit, Node, Polarity};
use tracer_core::sat::Var;

#[test]
fn sat_valuations_match_exhaustive_evaluation() {
    let mut rng = StdRng::seed_from_u64(0x6720);
    for i in 0..200 {
        let (spec, bounds, src) = common::random_problem(&mut rng, 10);
        let expected = common::brute_force(&spec, &bounds);
        let full = common::by_sat(&spec, &bounds, Polarity::Full);
        assert_eq!(full, expected, "case {i}:\n{src}");
        let pg = common::by_sat(&spec, &bounds, Polarity::Pg);
        assert_eq!(pg, expected, "case {i} (pg):\n{src}");
        match common::by_session(&spec, &bounds) {
            Some(m) => assert!(expected.contains(&m), "case {i} (lazy model):\n{src}"),
            None => assert!(expected.is_empty(), "case {i} (lazy unsat):\n{src}"),
        }
    }
}

#[test]
fn rule_facts_agree_between_lazy_and_eager() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut rule_cases = 0;
    for _ in 0..150 {
        let (spec, bounds, src) = common::random_problem_with(&mut rng, 8, common::rule_formula);
        if spec.facts.iter().any(|f| f.name == "F" && f.rules.is_some()) {
            rule_cases += 1;
        }
        let expected = common::brute_force(&spec, &bounds);
        match common::by_session(&spec, &bounds) {
            Some(m) => assert!(expected.contains(&m), "{src}"),
            None => assert!(expected.is_empty(), "{src}"),
        }
    }
    assert!(rule_cases > 100, "only {rule_cases} rule-shaped facts generated");
}

#[test]
fn constant_roots() {
    let c = Circuit::new();
    let t = tracer_core::grounder::to_cnf(&c, Node::TRUE, 0, Polarity::Full);
    assert_eq!(t.num_clauses(), 0);
    let f = tracer_core::grounder::to_cnf(&c, Node::FALSE, 0, Polarity::Full);
    assert_eq!(f.num_clauses(), 2);
    assert!(!tracer_core::sat::solve(&f, &[]).unwrap().is_sat());
}

#[test]
fn top_level_disjunction_is_one_clause() {
    let mut c = Circuit::new();
    let xs: Vec<Node> = (0..3).map(|i| c.input(Var(i))).collect();
    let or = c.or(xs.clone());
    let cnf = tracer_core::grounder::to_cnf(&c, or, 3, Polarity::Full);
    assert_eq!(cnf.num_clauses(), 1);
    assert_eq!(cnf.num_vars(), 3);
}
