mod common;

use common::{data, SUBSUMPTIONS, SUBSUMPTION_ONTOLOGY};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tracer_core::dl::{
    detect_trace, parse_concept, parse_ontology, Concept, DetectedTrace, Ontology, Reasoner, Role, SidpAxiom,
    TraceDetector, TraceKind,
};

fn c(s: &str) -> Concept {
    parse_concept(s).unwrap()
}

fn sidp_ontology() -> Ontology {
    parse_ontology(&data("sidp.ontology")).unwrap()
}

fn axiom(id: &str, subject: &str, role: &str, location: &str) -> SidpAxiom {
    SidpAxiom::new(id, c(subject), Concept::exists(Role::named(role).inv(), c(location)))
}

#[test]
fn contradiction_is_unsatisfiable() {
    let mut r = Reasoner::new(&Ontology::default()).unwrap();
    assert!(!r.is_satisfiable(&c("and(A not(A))")).unwrap());
}

#[test]
fn disjoint_filler_is_unsatisfiable() {
    let o = parse_ontology("DisjointClasses(HA FT)").unwrap();
    let mut r = Reasoner::new(&o).unwrap();
    assert!(!r.is_satisfiable(&c("some(r and(HA FT))")).unwrap());
    assert!(r.is_satisfiable(&c("and(some(r HA) some(r FT))")).unwrap());
}

#[test]
fn functional_role_merges_successors() {
    let o = parse_ontology("DisjointClasses(HA FT)\nFunctionalObjectProperty(in)").unwrap();
    let mut r = Reasoner::new(&o).unwrap();
    assert!(!r.is_satisfiable(&c("and(Bracket some(in HA) some(in FT))")).unwrap());
    let o = parse_ontology("DisjointClasses(HA FT)").unwrap();
    let mut r = Reasoner::new(&o).unwrap();
    assert!(r.is_satisfiable(&c("and(Bracket some(in HA) some(in FT))")).unwrap());
}

#[test]
fn subsumption_suite() {
    let o = parse_ontology(SUBSUMPTION_ONTOLOGY).unwrap();
    let mut r = Reasoner::new(&o).unwrap();
    for (sup, sub, expected) in SUBSUMPTIONS {
        assert_eq!(r.subsumes(&c(sup), &c(sub)).unwrap(), expected, "{sub} ⊑ {sup}");
    }
}

#[test]
fn existential_monotonicity() {
    let o = parse_ontology("SubClassOf(HAAlpha HA)").unwrap();
    let mut r = Reasoner::new(&o).unwrap();
    assert!(r.subsumes(&c("some(in HA)"), &c("some(in HAAlpha)")).unwrap());
    assert!(r.subsumes(&Concept::Top, &c("X")).unwrap());
    assert!(!r.subsumes(&c("X"), &c("Y")).unwrap());
}

#[test]
fn table_rows_from_the_kernel() {
    let o = sidp_ontology();
    let r2 = axiom("r2", "AdhesiveBondedBracket", "use", "HydraulicArea");
    let r4 = axiom("r4", "Bracket", "use", "HydraulicArea");
    let r5 = axiom("r5", "Bracket", "install", "HydraulicArea");
    let r6 = axiom("r6", "Bracket", "install", "FuelTank");
    assert_eq!(
        detect_trace(&r5, &r6, &o).unwrap(),
        vec![DetectedTrace::new(TraceKind::Conflicts, "r5", "r6")]
    );
    assert_eq!(
        detect_trace(&r2, &r4, &o).unwrap(),
        vec![DetectedTrace::new(TraceKind::Refines, "r2", "r4")]
    );
    assert_eq!(
        detect_trace(&r5, &r4, &o).unwrap(),
        vec![DetectedTrace::new(TraceKind::Requires, "r4", "r5")]
    );
}

#[test]
fn equal_axioms_give_one_equals_trace() {
    let o = sidp_ontology();
    let a = axiom("a", "Bracket", "use", "HydraulicArea");
    let b = SidpAxiom::new("b", c("and(Bracket Bracket)"), c("some(inv(use) HydraulicArea)"));
    assert_eq!(
        detect_trace(&a, &b, &o).unwrap(),
        vec![DetectedTrace::new(TraceKind::Equals, "a", "b")]
    );
}

fn random_concept(rng: &mut StdRng, depth: u32) -> Concept {
    let atoms = ["A", "B", "C", "D"];
    let roles = [Role::named("r"), Role::named("s"), Role::named("r").inv(), Role::named("s").inv()];
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..10) {
            0 => Concept::Top,
            1 => Concept::not(Concept::atomic(atoms[rng.gen_range(0..4)])),
            _ => Concept::atomic(atoms[rng.gen_range(0..4)]),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => Concept::and(vec![random_concept(rng, d), random_concept(rng, d)]),
        1 => Concept::or(vec![random_concept(rng, d), random_concept(rng, d)]),
        2 => Concept::not(random_concept(rng, d)),
        3 => Concept::forall(roles[rng.gen_range(0..4)].clone(), random_concept(rng, d)),
        _ => Concept::exists(roles[rng.gen_range(0..4)].clone(), random_concept(rng, d)),
    }
}

const RANDOM_ONTOLOGY: &str = "\
SubClassOf(A B)
DisjointClasses(B C)
SubObjectPropertyOf(r s)
FunctionalObjectProperty(inv(s))
";

#[test]
fn nnf_is_canonical_and_prints_back() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..300 {
        let x = random_concept(&mut rng, 4);
        let n = x.nnf();
        assert_eq!(n.nnf(), n);
        assert_eq!(parse_concept(&x.to_string()).unwrap(), x);
        let swapped = match &n {
            Concept::And(cs) => Concept::And(cs.iter().rev().cloned().collect()),
            other => other.clone(),
        };
        assert_eq!(swapped.nnf(), n);
    }
}

#[test]
fn subsumption_is_reflexive_and_transitive() {
    let o = parse_ontology(RANDOM_ONTOLOGY).unwrap();
    let mut r = Reasoner::new(&o).unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    let corpus: Vec<Concept> = (0..30).map(|_| random_concept(&mut rng, 3)).collect();
    let n = corpus.len();
    let mut m = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            // m[i][j]: corpus[i] ⊑ corpus[j]
            m[i][j] = r.subsumes(&corpus[j], &corpus[i]).unwrap();
        }
        assert!(m[i][i], "{} not reflexive", corpus[i]);
    }
    let mut chains = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if m[i][j] && m[j][k] && i != j && j != k {
                    chains += 1;
                    assert!(m[i][k], "{} ⊑ {} ⊑ {}", corpus[i], corpus[j], corpus[k]);
                }
            }
        }
    }
    assert!(chains > 0);
}

#[test]
fn conflicts_are_symmetric_and_equals_is_an_equivalence() {
    let o = parse_ontology(RANDOM_ONTOLOGY).unwrap();
    let mut det = TraceDetector::new(&o).unwrap();
    let mut rng = StdRng::seed_from_u64(5);
    let mut corpus: Vec<SidpAxiom> = Vec::new();
    for i in 0..12 {
        let subject = random_concept(&mut rng, 1);
        let predicate = random_concept(&mut rng, 2);
        corpus.push(SidpAxiom::new(&format!("a{i}"), subject.clone(), predicate.clone()));
        // renamed copy: same formula under another id
        corpus.push(SidpAxiom::new(&format!("b{i}"), predicate, subject));
    }
    let n = corpus.len();
    let mut eq = vec![vec![false; n]; n];
    let mut conflicting = vec![vec![false; n]; n];
    for i in 0..n {
        eq[i][i] = true;
        for j in 0..n {
            if i == j {
                continue;
            }
            let ij = det.detect(&corpus[i], &corpus[j]).unwrap();
            let ji = det.detect(&corpus[j], &corpus[i]).unwrap();
            let conf = |v: &[DetectedTrace]| v.iter().any(|t| t.kind == TraceKind::Conflicts);
            assert_eq!(conf(&ij), conf(&ji));
            conflicting[i][j] = conf(&ij);
            eq[i][j] = ij.iter().any(|t| t.kind == TraceKind::Equals);
        }
    }
    for i in 0..n {
        // an unsatisfiable formula conflicts with its copy instead
        assert!(eq[i ^ 1][i] || conflicting[i ^ 1][i], "swapped conjuncts must be equal");
        for j in 0..n {
            assert_eq!(eq[i][j], eq[j][i]);
            for k in 0..n {
                if eq[i][j] && eq[j][k] {
                    assert!(eq[i][k]);
                }
            }
        }
    }
}

/// Extension of a concept over a three-element domain with atoms A, B and
/// one role r given as a 3x3 adjacency bitmask.
fn extension(c: &Concept, a: u8, b: u8, r: u16) -> u8 {
    let edge = |x: usize, y: usize, inverse: bool| {
        let (x, y) = if inverse { (y, x) } else { (x, y) };
        r >> (x * 3 + y) & 1 == 1
    };
    match c {
        Concept::Top => 0b111,
        Concept::Bottom => 0,
        Concept::Atomic(n) if n == "A" => a,
        Concept::Atomic(_) => b,
        Concept::Not(x) => !extension(x, a, b, r) & 0b111,
        Concept::And(xs) => xs.iter().fold(0b111, |m, x| m & extension(x, a, b, r)),
        Concept::Or(xs) => xs.iter().fold(0, |m, x| m | extension(x, a, b, r)),
        Concept::Exists(role, f) => {
            let fe = extension(f, a, b, r);
            (0..3)
                .filter(|&x| (0..3).any(|y| edge(x, y, role.inverse) && fe >> y & 1 == 1))
                .fold(0, |m, x| m | 1 << x)
        }
        Concept::Forall(role, f) => {
            let fe = extension(f, a, b, r);
            (0..3)
                .filter(|&x| (0..3).all(|y| !edge(x, y, role.inverse) || fe >> y & 1 == 1))
                .fold(0, |m, x| m | 1 << x)
        }
    }
}

fn forall_free(rng: &mut StdRng, depth: u32, budget: &mut u32) -> Concept {
    let atom = |rng: &mut StdRng| Concept::atomic(["A", "B"][rng.gen_range(0..2)]);
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.3) { Concept::not(atom(rng)) } else { atom(rng) };
    }
    match rng.gen_range(0..3) {
        0 => Concept::and(vec![forall_free(rng, depth - 1, budget), forall_free(rng, depth - 1, budget)]),
        1 => Concept::or(vec![forall_free(rng, depth - 1, budget), forall_free(rng, depth - 1, budget)]),
        _ if *budget > 0 => {
            *budget -= 1;
            let role = if rng.gen_bool(0.5) { Role::named("r") } else { Role::named("r").inv() };
            Concept::exists(role, forall_free(rng, depth - 1, budget))
        }
        _ => atom(rng),
    }
}

#[test]
fn tableau_agrees_with_bounded_models() {
    let mut r = Reasoner::new(&Ontology::default()).unwrap();
    let mut rng = StdRng::seed_from_u64(9);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..300 {
        // at most two existentials, so a model needs at most three elements
        let mut budget = 2;
        let x = forall_free(&mut rng, 4, &mut budget);
        let oracle = (0..8u8).any(|a| (0..8u8).any(|b| (0..512u16).any(|e| extension(&x, a, b, e) != 0)));
        assert_eq!(r.is_satisfiable(&x).unwrap(), oracle, "{x}");
        if oracle {
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    assert!(sat > 0 && unsat > 0, "{sat} {unsat}");
}

fn with_forall(rng: &mut StdRng, depth: u32, budget: &mut u32) -> Concept {
    if depth > 0 && rng.gen_bool(0.25) {
        let role = if rng.gen_bool(0.5) { Role::named("r") } else { Role::named("r").inv() };
        return Concept::forall(role, with_forall(rng, depth - 1, budget));
    }
    match forall_free(rng, depth.min(1), budget) {
        Concept::And(_) | Concept::Or(_) if depth > 0 => {
            let l = with_forall(rng, depth - 1, budget);
            let r = with_forall(rng, depth - 1, budget);
            if rng.gen_bool(0.5) {
                Concept::and(vec![l, r])
            } else {
                Concept::or(vec![l, r])
            }
        }
        other => other,
    }
}

#[test]
fn tableau_agrees_with_bounded_models_under_universals() {
    let mut r = Reasoner::new(&Ontology::default()).unwrap();
    let mut rng = StdRng::seed_from_u64(21);
    for _ in 0..300 {
        let mut budget = 2;
        let x = with_forall(&mut rng, 4, &mut budget);
        let oracle = (0..8u8).any(|a| (0..8u8).any(|b| (0..512u16).any(|e| extension(&x, a, b, e) != 0)));
        assert_eq!(r.is_satisfiable(&x).unwrap(), oracle, "{x}");
    }
}
