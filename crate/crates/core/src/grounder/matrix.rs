use std::collections::{BTreeMap, HashMap};

use super::circuit::{Circuit, Node};
use super::VarMap;
use crate::forl::ir::{Expr, ExprKind, Formula, MultTest, Quantifier};
use crate::relational::{Atom, Bounds, Tuple};

/// Sparse boolean matrix: absent tuples are FALSE.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub arity: usize,
    pub cells: BTreeMap<Tuple, Node>,
}

impl Matrix {
    pub fn empty(arity: usize) -> Self {
        Matrix {
            arity,
            cells: BTreeMap::new(),
        }
    }

    pub fn get(&self, t: &[Atom]) -> Node {
        self.cells.get(t).copied().unwrap_or(Node::FALSE)
    }

    fn set(&mut self, t: Tuple, n: Node) {
        if n == Node::FALSE {
            self.cells.remove(&t);
        } else {
            self.cells.insert(t, n);
        }
    }
}

/// Translates expressions to matrices and formulas to circuit nodes.
pub struct Grounder<'a> {
    bounds: &'a Bounds,
    var_map: &'a VarMap,
    circuit: Circuit,
    leaves: HashMap<usize, Matrix>,
    // Variable-free subexpressions by address, valid within one
    // `ground_formula` call.
    memo: HashMap<*const Expr, Matrix>,
}

impl<'a> Grounder<'a> {
    pub fn new(bounds: &'a Bounds, var_map: &'a VarMap) -> Self {
        Grounder {
            bounds,
            var_map,
            circuit: Circuit::new(),
            leaves: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    pub fn circuit(&mut self) -> &mut Circuit {
        &mut self.circuit
    }

    pub fn into_circuit(self) -> Circuit {
        self.circuit
    }

    pub fn ground_formula(&mut self, f: &Formula, num_vars: usize) -> Node {
        self.memo.clear();
        let mut env = vec![0; num_vars];
        let n = self.formula(f, &mut env);
        self.memo.clear();
        n
    }

    fn n(&self) -> usize {
        self.bounds.universe.len()
    }

    fn leaf(&mut self, r: usize) -> Matrix {
        if let Some(m) = self.leaves.get(&r) {
            return m.clone();
        }
        let mut m = Matrix::empty(self.bounds.upper[r].arity());
        for t in self.bounds.upper[r].iter() {
            let node = if self.bounds.lower[r].contains(t) {
                Node::TRUE
            } else {
                let v = self.var_map.var(r, t).expect("free tuple has a variable");
                self.circuit.input(v)
            };
            m.cells.insert(t.clone(), node);
        }
        self.leaves.insert(r, m.clone());
        m
    }

    pub fn expr(&mut self, e: &Expr, env: &[Atom]) -> Matrix {
        let closed = !has_var(e);
        if closed {
            if let Some(m) = self.memo.get(&(e as *const Expr)) {
                return m.clone();
            }
        }
        let m = self.expr_uncached(e, env);
        if closed {
            self.memo.insert(e as *const Expr, m.clone());
        }
        m
    }

    fn expr_uncached(&mut self, e: &Expr, env: &[Atom]) -> Matrix {
        let n = self.n() as Atom;
        match &e.kind {
            ExprKind::Rel(r) => self.leaf(*r),
            ExprKind::Var(v) => {
                let mut m = Matrix::empty(1);
                m.cells.insert(vec![env[*v]], Node::TRUE);
                m
            }
            ExprKind::Univ => {
                let mut m = Matrix::empty(1);
                for a in 0..n {
                    m.cells.insert(vec![a], Node::TRUE);
                }
                m
            }
            ExprKind::Iden => self.iden(),
            ExprKind::None => Matrix::empty(e.arity),
            ExprKind::Union(a, b) => {
                let a = self.expr(a, env);
                let b = self.expr(b, env);
                self.union(&a, &b)
            }
            ExprKind::Intersect(a, b) => {
                let a = self.expr(a, env);
                let b = self.expr(b, env);
                let mut m = Matrix::empty(a.arity);
                for (t, &x) in &a.cells {
                    if let Some(&y) = b.cells.get(t) {
                        let c = self.circuit.and2(x, y);
                        m.set(t.clone(), c);
                    }
                }
                m
            }
            ExprKind::Difference(a, b) => {
                let a = self.expr(a, env);
                let b = self.expr(b, env);
                let mut m = Matrix::empty(a.arity);
                for (t, &x) in &a.cells {
                    let c = self.circuit.and2(x, !b.get(t));
                    m.set(t.clone(), c);
                }
                m
            }
            ExprKind::Product(a, b) => {
                let a = self.expr(a, env);
                let b = self.expr(b, env);
                let mut m = Matrix::empty(a.arity + b.arity);
                for (s, &x) in &a.cells {
                    for (t, &y) in &b.cells {
                        let mut st = s.clone();
                        st.extend_from_slice(t);
                        let c = self.circuit.and2(x, y);
                        m.set(st, c);
                    }
                }
                m
            }
            ExprKind::Join(a, b) => {
                let a = self.expr(a, env);
                let b = self.expr(b, env);
                self.join(&a, &b)
            }
            ExprKind::Transpose(a) => {
                let a = self.expr(a, env);
                let mut m = Matrix::empty(2);
                for (t, &x) in &a.cells {
                    m.cells.insert(vec![t[1], t[0]], x);
                }
                m
            }
            ExprKind::Closure(a) => {
                let a = self.expr(a, env);
                self.closure(a)
            }
            ExprKind::ReflexiveClosure(a) => {
                let a = self.expr(a, env);
                let c = self.closure(a);
                let i = self.iden();
                self.union(&c, &i)
            }
        }
    }

    fn iden(&self) -> Matrix {
        let mut m = Matrix::empty(2);
        for a in 0..self.n() as Atom {
            m.cells.insert(vec![a, a], Node::TRUE);
        }
        m
    }

    fn union(&mut self, a: &Matrix, b: &Matrix) -> Matrix {
        let mut m = a.clone();
        for (t, &y) in &b.cells {
            let x = m.get(t);
            let c = self.circuit.or2(x, y);
            m.set(t.clone(), c);
        }
        m
    }

    fn join(&mut self, a: &Matrix, b: &Matrix) -> Matrix {
        let mut by_first: HashMap<Atom, Vec<(&Tuple, Node)>> = HashMap::new();
        for (t, &y) in &b.cells {
            by_first.entry(t[0]).or_default().push((t, y));
        }
        let mut terms: BTreeMap<Tuple, Vec<Node>> = BTreeMap::new();
        for (s, &x) in &a.cells {
            if let Some(bs) = by_first.get(&s[s.len() - 1]) {
                for &(t, y) in bs {
                    let mut st = s[..s.len() - 1].to_vec();
                    st.extend_from_slice(&t[1..]);
                    let c = self.circuit.and2(x, y);
                    terms.entry(st).or_default().push(c);
                }
            }
        }
        let mut m = Matrix::empty(a.arity + b.arity - 2);
        for (t, ns) in terms {
            let c = self.circuit.or(ns);
            m.set(t, c);
        }
        m
    }

    /// Transitive closure by iterative squaring: after k rounds the matrix
    /// covers paths of length up to 2^k.
    fn closure(&mut self, a: Matrix) -> Matrix {
        let mut r = a;
        let mut len = 1usize;
        while len < self.n() {
            let sq = self.join(&r, &r);
            let next = self.union(&r, &sq);
            if next == r {
                break;
            }
            r = next;
            len *= 2;
        }
        r
    }

    pub fn formula(&mut self, f: &Formula, env: &mut Vec<Atom>) -> Node {
        match f {
            Formula::True => Node::TRUE,
            Formula::False => Node::FALSE,
            Formula::In(a, b) => {
                let a = self.expr(a, env);
                let b = self.expr(b, env);
                self.subset(&a, &b)
            }
            Formula::Equal(a, b) => {
                let a = self.expr(a, env);
                let b = self.expr(b, env);
                let x = self.subset(&a, &b);
                let y = self.subset(&b, &a);
                self.circuit.and2(x, y)
            }
            Formula::Mult(t, e) => {
                let m = self.expr(e, env);
                let cells: Vec<Node> = m.cells.values().copied().collect();
                match t {
                    MultTest::No => self.circuit.and(cells.iter().map(|&c| !c)),
                    MultTest::Some => self.circuit.or(cells),
                    MultTest::Lone => self.circuit.at_most_one(&cells),
                    MultTest::One => {
                        let some = self.circuit.or(cells.iter().copied());
                        let lone = self.circuit.at_most_one(&cells);
                        self.circuit.and2(some, lone)
                    }
                }
            }
            Formula::Not(g) => !self.formula(g, env),
            Formula::And(fs) => {
                let mut ns = Vec::with_capacity(fs.len());
                for g in fs {
                    let n = self.formula(g, env);
                    if n == Node::FALSE {
                        return Node::FALSE;
                    }
                    ns.push(n);
                }
                self.circuit.and(ns)
            }
            Formula::Or(fs) => {
                let mut ns = Vec::with_capacity(fs.len());
                for g in fs {
                    let n = self.formula(g, env);
                    if n == Node::TRUE {
                        return Node::TRUE;
                    }
                    ns.push(n);
                }
                self.circuit.or(ns)
            }
            Formula::Implies(a, b) => {
                let x = self.formula(a, env);
                if x == Node::FALSE {
                    return Node::TRUE;
                }
                let y = self.formula(b, env);
                self.circuit.implies(x, y)
            }
            Formula::Iff(a, b) => {
                let x = self.formula(a, env);
                let y = self.formula(b, env);
                self.circuit.iff(x, y)
            }
            Formula::Quant {
                quantifier,
                var,
                bound,
                body,
            } => {
                let dom = self.expr(bound, env);
                if env.len() <= *var {
                    env.resize(*var + 1, 0);
                }
                let mut ns = Vec::with_capacity(dom.cells.len());
                for (t, &member) in &dom.cells {
                    env[*var] = t[0];
                    let b = self.formula(body, env);
                    let n = match quantifier {
                        Quantifier::All => self.circuit.implies(member, b),
                        Quantifier::Some => self.circuit.and2(member, b),
                    };
                    match (quantifier, n) {
                        (Quantifier::All, Node::FALSE) => return Node::FALSE,
                        (Quantifier::Some, Node::TRUE) => return Node::TRUE,
                        _ => ns.push(n),
                    }
                }
                match quantifier {
                    Quantifier::All => self.circuit.and(ns),
                    Quantifier::Some => self.circuit.or(ns),
                }
            }
        }
    }

    fn subset(&mut self, a: &Matrix, b: &Matrix) -> Node {
        let mut ns = Vec::with_capacity(a.cells.len());
        for (t, &x) in &a.cells {
            let n = self.circuit.implies(x, b.get(t));
            if n == Node::FALSE {
                return Node::FALSE;
            }
            ns.push(n);
        }
        self.circuit.and(ns)
    }
}

fn has_var(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Var(_) => true,
        ExprKind::Rel(_) | ExprKind::Univ | ExprKind::Iden | ExprKind::None => false,
        ExprKind::Join(a, b)
        | ExprKind::Product(a, b)
        | ExprKind::Union(a, b)
        | ExprKind::Intersect(a, b)
        | ExprKind::Difference(a, b) => has_var(a) || has_var(b),
        ExprKind::Transpose(a) | ExprKind::Closure(a) | ExprKind::ReflexiveClosure(a) => has_var(a),
    }
}
