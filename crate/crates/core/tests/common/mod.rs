#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::Rng;
use tracer_core::analyses::{problem_cnf, Session};
use tracer_core::forl::{load_spec, TypedSpec};
use tracer_core::grounder::{Polarity, VarMap};
use tracer_core::model::{Origin, TraceLink, TraceLocation, TraceabilityInformation};
use tracer_core::relational::{eval_formula, Bounds, TupleSet, Universe};
use tracer_core::sat::{enumerate, Cnf, Lit, Var};

pub fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn unary(rng: &mut StdRng, depth: u32, scope: usize) -> String {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..3) {
            0 if scope > 0 => VARS[rng.gen_range(0..scope)].to_string(),
            1 => "univ".to_string(),
            _ => "A".to_string(),
        };
    }
    match rng.gen_range(0..5) {
        0 => format!("{}.{}", unary(rng, depth - 1, scope), binary(rng, depth - 1, scope)),
        1 => format!("{}.{}", binary(rng, depth - 1, scope), unary(rng, depth - 1, scope)),
        2 => format!("({} + {})", unary(rng, depth - 1, scope), unary(rng, depth - 1, scope)),
        3 => format!("({} & {})", unary(rng, depth - 1, scope), unary(rng, depth - 1, scope)),
        _ => format!("({} - {})", unary(rng, depth - 1, scope), unary(rng, depth - 1, scope)),
    }
}

fn binary(rng: &mut StdRng, depth: u32, scope: usize) -> String {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    if leaf {
        return match rng.gen_range(0..5) {
            0 => "iden".to_string(),
            1 | 2 => "r".to_string(),
            _ => "s".to_string(),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..9) {
        0 => format!("~{}", binary(rng, d, scope)),
        1 => format!("^{}", binary(rng, d, scope)),
        2 => format!("*{}", binary(rng, d, scope)),
        3 => format!("({} + {})", binary(rng, d, scope), binary(rng, d, scope)),
        4 => format!("({} & {})", binary(rng, d, scope), binary(rng, d, scope)),
        5 => format!("({} - {})", binary(rng, d, scope), binary(rng, d, scope)),
        6 => format!("({} -> {})", unary(rng, d, scope), unary(rng, d, scope)),
        _ => format!("({}.{})", binary(rng, d, scope), binary(rng, d, scope)),
    }
}

fn expr(rng: &mut StdRng, depth: u32, scope: usize, arity: usize) -> String {
    if arity == 1 {
        unary(rng, depth, scope)
    } else {
        binary(rng, depth, scope)
    }
}

/// A random closed formula over sig `A` and binary fields `r`, `s`.
pub fn formula(rng: &mut StdRng, depth: u32, scope: usize) -> String {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    let d = depth.saturating_sub(1);
    if leaf {
        let arity = rng.gen_range(1..=2);
        return match rng.gen_range(0..4) {
            0 => format!("{} in {}", expr(rng, d, scope, arity), expr(rng, d, scope, arity)),
            1 => format!("{} = {}", expr(rng, d, scope, arity), expr(rng, d, scope, arity)),
            2 => format!("{} not in {}", expr(rng, d, scope, arity), expr(rng, d, scope, arity)),
            _ => {
                let m = ["no", "some", "lone", "one"][rng.gen_range(0..4)];
                format!("{m} {}", expr(rng, d, scope, arity))
            }
        };
    }
    match rng.gen_range(0..7) {
        0 => format!("not ({})", formula(rng, d, scope)),
        1 => format!("({}) and ({})", formula(rng, d, scope), formula(rng, d, scope)),
        2 => format!("({}) or ({})", formula(rng, d, scope), formula(rng, d, scope)),
        3 => format!("({}) implies ({})", formula(rng, d, scope), formula(rng, d, scope)),
        4 => format!("({}) iff ({})", formula(rng, d, scope), formula(rng, d, scope)),
        _ if scope < VARS.len() => {
            let q = ["all", "some", "no"][rng.gen_range(0..3)];
            let v = VARS[scope];
            let bound = unary(rng, 1, scope);
            format!("({q} {v}: {bound} | {})", formula(rng, d, scope + 1))
        }
        _ => format!("({}) and ({})", formula(rng, d, scope), formula(rng, d, scope)),
    }
}

/// A random fact of rule shape: a conjunction of membership atoms implying
/// a membership, an equality, or falsity.
pub fn rule_formula(rng: &mut StdRng) -> String {
    let vars = ["x", "y", "z"];
    let atom = |rng: &mut StdRng| {
        let rel = ["r", "s", "~r", "~s", "r.s", "(r & s)", "(r + s)"][rng.gen_range(0..7)];
        format!("{}->{} in {rel}", vars[rng.gen_range(0..3)], vars[rng.gen_range(0..3)])
    };
    let n = rng.gen_range(1..=2);
    let body: Vec<String> = (0..n).map(|_| atom(rng)).collect();
    let head = match rng.gen_range(0..6) {
        0 => "x = y".to_string(),
        1 => "no A".to_string(),
        _ => {
            let rel = ["r", "s", "~r"][rng.gen_range(0..3)];
            format!("{}->{} in {rel}", vars[rng.gen_range(0..3)], vars[rng.gen_range(0..3)])
        }
    };
    format!("all x, y, z: A | {} implies {head}", body.join(" and "))
}

/// A spec with one random fact, and bounds over at most four atoms where
/// `A` is exact and `r`, `s` have at most `max_free` free tuples together.
pub fn random_problem(rng: &mut StdRng, max_free: usize) -> (TypedSpec, Bounds, String) {
    random_problem_with(rng, max_free, |rng| formula(rng, 3, 0))
}

pub fn random_problem_with(
    rng: &mut StdRng,
    max_free: usize,
    mut gen: impl FnMut(&mut StdRng) -> String,
) -> (TypedSpec, Bounds, String) {
    loop {
        let f = gen(rng);
        let src = format!("sig A {{ r: set A, s: set A }}\nfact F {{ {f} }}\n");
        let Ok(spec) = load_spec(&src) else { continue };
        let n = rng.gen_range(1..=4usize);
        let universe = Universe::new((0..n).map(|i| format!("a{i}")));
        let all = TupleSet::unary(0..n as u32);
        let pairs = TupleSet::all(2, n);
        let mut lower = vec![all.clone(), TupleSet::empty(2), TupleSet::empty(2)];
        let mut upper = vec![all, TupleSet::empty(2), TupleSet::empty(2)];
        let mut free = 0;
        for r in 1..3 {
            for t in pairs.iter() {
                match rng.gen_range(0..4) {
                    0 => {
                        lower[r].insert(t.clone());
                        upper[r].insert(t.clone());
                    }
                    1 | 2 if free < max_free => {
                        upper[r].insert(t.clone());
                        free += 1;
                    }
                    _ => {}
                }
            }
        }
        return (spec, Bounds { universe, lower, upper }, src);
    }
}

/// Free-tuple valuations (bitmasks over the var map) satisfying every fact,
/// by exhaustive evaluation.
pub fn brute_force(spec: &TypedSpec, bounds: &Bounds) -> BTreeSet<u64> {
    let vm = VarMap::new(bounds);
    let n = bounds.universe.len();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << vm.len()) {
        let values = vm.decode_with(bounds, |v| mask >> v.0 & 1 == 1);
        let ok = spec.facts.iter().all(|f| {
            let mut env = vec![0; f.num_vars()];
            eval_formula(&f.formula, &values, n, &mut env)
        });
        if ok {
            out.insert(mask);
        }
    }
    out
}

/// The same set via grounding, Tseitin and model enumeration.
pub fn by_sat(spec: &TypedSpec, bounds: &Bounds, polarity: Polarity) -> BTreeSet<u64> {
    let facts: Vec<usize> = (0..spec.facts.len()).collect();
    let (cnf, vm) = problem_cnf(spec, bounds, &facts, polarity);
    let proj: Vec<Var> = vm.vars().collect();
    enumerate(&cnf, &proj, usize::MAX)
        .map(|m| {
            m.unwrap()
                .iter()
                .fold(0u64, |acc, &(v, b)| acc | ((b as u64) << v.0))
        })
        .collect()
}

/// Satisfiability via the lazy session, with its model as a bitmask.
pub fn by_session(spec: &TypedSpec, bounds: &Bounds) -> Option<u64> {
    let facts: Vec<usize> = (0..spec.facts.len()).collect();
    let mut s = Session::new(spec, bounds.clone(), &facts, false);
    s.solve(&[])
        .unwrap()
        .map(|v| v.true_vars.iter().fold(0u64, |acc, v| acc | (1 << v.0)))
}

pub const SUBSUMPTION_ONTOLOGY: &str = "\
SubClassOf(AdhesiveBondedBracket Bracket)
SubClassOf(HydraulicAreaAlpha HydraulicArea)
DisjointClasses(HydraulicArea FuelTank)
SubObjectPropertyOf(use install)
FunctionalObjectProperty(inv(install))
SubClassOf(Bracket Part)
SubClassOf(Part some(madeOf Material))
";

/// (super, sub, expected) over [`SUBSUMPTION_ONTOLOGY`], each checked by hand.
pub const SUBSUMPTIONS: [(&str, &str, bool); 30] = [
    ("Bracket", "AdhesiveBondedBracket", true),
    ("AdhesiveBondedBracket", "Bracket", false),
    ("Part", "AdhesiveBondedBracket", true),
    ("some(madeOf Material)", "AdhesiveBondedBracket", true),
    ("some(use HydraulicArea)", "some(use HydraulicAreaAlpha)", true),
    ("some(use HydraulicAreaAlpha)", "some(use HydraulicArea)", false),
    ("some(install HydraulicArea)", "some(use HydraulicArea)", true),
    ("some(use HydraulicArea)", "some(install HydraulicArea)", false),
    ("some(inv(install) Thing)", "some(inv(use) FuelTank)", true),
    ("Thing", "Bracket", true),
    ("Bracket", "Nothing", true),
    ("Bracket", "Part", false),
    ("not(FuelTank)", "HydraulicArea", true),
    ("not(FuelTank)", "HydraulicAreaAlpha", true),
    ("not(HydraulicArea)", "FuelTank", true),
    ("FuelTank", "not(HydraulicArea)", false),
    ("all(inv(install) not(FuelTank))", "some(inv(install) HydraulicArea)", true),
    ("all(inv(use) HydraulicArea)", "some(inv(install) HydraulicArea)", true),
    ("all(inv(install) HydraulicArea)", "some(inv(use) HydraulicArea)", true),
    ("all(install HydraulicArea)", "some(install HydraulicArea)", false),
    ("Nothing", "some(inv(install) and(HydraulicArea FuelTank))", true),
    ("Nothing", "and(some(inv(install) HydraulicArea) some(inv(use) FuelTank))", true),
    ("Nothing", "and(some(inv(use) HydraulicArea) some(inv(use) FuelTank))", true),
    ("Nothing", "and(some(use HydraulicArea) some(use FuelTank))", false),
    ("or(Bracket FuelTank)", "AdhesiveBondedBracket", true),
    ("Bracket", "or(AdhesiveBondedBracket Part)", false),
    ("Bracket", "and(Part some(use all(inv(use) Bracket)))", true),
    ("all(use some(inv(use) Thing))", "Thing", true),
    ("not(some(use Thing))", "not(some(install Thing))", true),
    ("not(some(install Thing))", "not(some(use Thing))", false),
];

pub const DIGRAPH_SPEC: &str = "\
sig Node {
  contains: set Node,
  requires: set Node,
  refines: set Node
}
fact ContainsIrreflexive { all a: Node | not a->a in contains }
fact RequiresIrreflexive { all a: Node | not a->a in requires }
fact RefinesIrreflexive { all a: Node | not a->a in refines }
fact ContainsAntisymmetric { all a, b: Node | a->b in contains and b->a in contains implies a = b }
fact RequiresAntisymmetric { all a, b: Node | a->b in requires and b->a in requires implies a = b }
fact RefinesAntisymmetric { all a, b: Node | a->b in refines and b->a in refines implies a = b }
";

/// A consistent SIDP workspace: every link points from a lower to a higher
/// artifact index and each artifact is contained at most once.
pub fn random_sidp_workspace(rng: &mut StdRng, artifacts: usize, traces: usize) -> TraceabilityInformation {
    let mut info = TraceabilityInformation::new();
    for i in 0..artifacts {
        let id = format!("a{i:03}");
        info.add_location(TraceLocation::file(&id, &format!("{id}.txt"))).unwrap();
        let sig = if rng.gen_bool(0.5) { "Requirement" } else { "Specification" };
        info.types.insert(id, sig.to_string());
    }
    let mut contained = BTreeSet::new();
    let mut seen = BTreeSet::new();
    while info.links.len() < traces {
        let a = rng.gen_range(0..artifacts - 1);
        let b = rng.gen_range(a + 1..artifacts);
        let rel = ["requires", "refines", "contains", "conflicts"][rng.gen_range(0..4)];
        if (rel == "contains" && !contained.insert(b)) || !seen.insert((rel, a, b)) {
            continue;
        }
        let id = info.fresh_id("l");
        info.add_link(TraceLink {
            id,
            endpoints: vec![format!("a{a:03}"), format!("a{b:03}")],
            relation: Some(rel.to_string()),
            origin: Origin::Manual,
        })
        .unwrap();
    }
    info
}

/// Plain recursive DPLL over DIMACS-style integer clauses. Shares nothing
/// with the CDCL engine.
pub fn dpll(clauses: &[Vec<i32>], assignment: &mut Vec<i8>) -> bool {
    loop {
        let mut unit = None;
        for c in clauses {
            let mut unassigned = None;
            let mut count = 0;
            let mut sat = false;
            for &l in c {
                let v = assignment[(l.unsigned_abs() - 1) as usize];
                if v == 0 {
                    count += 1;
                    unassigned = Some(l);
                } else if (v > 0) == (l > 0) {
                    sat = true;
                    break;
                }
            }
            if sat {
                continue;
            }
            if count == 0 {
                return false;
            }
            if count == 1 {
                unit = unassigned;
                break;
            }
        }
        match unit {
            Some(l) => assignment[(l.unsigned_abs() - 1) as usize] = if l > 0 { 1 } else { -1 },
            None => break,
        }
    }
    let Some(v) = assignment.iter().position(|&a| a == 0) else {
        return true;
    };
    for val in [1i8, -1] {
        let mut next = assignment.clone();
        next[v] = val;
        if dpll(clauses, &mut next) {
            *assignment = next;
            return true;
        }
    }
    false
}

pub fn random_cnf(rng: &mut StdRng) -> (u32, Vec<Vec<i32>>) {
    let nv = rng.gen_range(1..=20u32);
    let ratio = rng.gen_range(1.0..6.0);
    let nc = ((nv as f64) * ratio) as usize;
    let clauses = (0..nc)
        .map(|_| {
            let k = if rng.gen_bool(0.05) { 1 } else { rng.gen_range(2..=3usize) };
            (0..k)
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
    (nv, clauses)
}

pub fn to_cnf(nv: u32, clauses: &[Vec<i32>]) -> Cnf {
    let mut cnf = Cnf::with_vars(nv);
    for c in clauses {
        cnf.add_clause(c.iter().map(|&l| Lit::from_dimacs(l)));
    }
    cnf
}

pub fn pigeonhole(pigeons: u32, holes: u32) -> Cnf {
    let var = |i: u32, j: u32| Var(i * holes + j);
    let mut cnf = Cnf::with_vars(pigeons * holes);
    for i in 0..pigeons {
        cnf.add_clause((0..holes).map(|j| var(i, j).pos()));
    }
    for j in 0..holes {
        for a in 0..pigeons {
            for b in a + 1..pigeons {
                cnf.add_clause([var(a, j).neg(), var(b, j).neg()]);
            }
        }
    }
    cnf
}

/// Names of the `DIGRAPH_SPEC` facts that the edge list violates, by direct
/// inspection of the graph.
pub fn digraph_violations(edges: &[(&str, usize, usize)]) -> Vec<String> {
    let mut out = Vec::new();
    for rel in ["contains", "requires", "refines"] {
        let title = format!("{}{}", rel[..1].to_uppercase(), &rel[1..]);
        let has = |a: usize, b: usize| edges.iter().any(|&(r, x, y)| r == rel && x == a && y == b);
        if edges.iter().any(|&(r, x, y)| r == rel && x == y) {
            out.push(format!("{title}Irreflexive"));
        }
        if edges.iter().any(|&(r, x, y)| r == rel && x != y && has(y, x)) {
            out.push(format!("{title}Antisymmetric"));
        }
    }
    out
}
