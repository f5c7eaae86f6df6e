use std::collections::HashMap;
use std::ops::Not;

use crate::sat::Var;

/// Edge into the circuit: gate index plus a negation bit. Gate 0 is the
/// constant TRUE, so `Node::FALSE` is its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node(u32);

impl Node {
    pub const TRUE: Node = Node(0);
    pub const FALSE: Node = Node(1);

    pub fn gate(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_const(self) -> bool {
        self.gate() == 0
    }

    fn from_gate(g: usize, negated: bool) -> Node {
        Node((g as u32) << 1 | negated as u32)
    }
}

impl Not for Node {
    type Output = Node;
    fn not(self) -> Node {
        Node(self.0 ^ 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    True,
    Input(Var),
    And(Vec<Node>),
}

/// Hash-consed and-inverter graph: structurally equal gates are the same
/// gate, so node identity is structural equality.
#[derive(Debug, Clone)]
pub struct Circuit {
    gates: Vec<Gate>,
    ands: HashMap<Vec<Node>, u32>,
    inputs: HashMap<Var, u32>,
}

impl Default for Circuit {
    fn default() -> Self {
        Circuit::new()
    }
}

impl Circuit {
    pub fn new() -> Self {
        Circuit {
            gates: vec![Gate::True],
            ands: HashMap::new(),
            inputs: HashMap::new(),
        }
    }

    pub fn gate(&self, g: usize) -> &Gate {
        &self.gates[g]
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn constant(&self, b: bool) -> Node {
        if b {
            Node::TRUE
        } else {
            Node::FALSE
        }
    }

    pub fn input(&mut self, v: Var) -> Node {
        if let Some(&g) = self.inputs.get(&v) {
            return Node::from_gate(g as usize, false);
        }
        let g = self.gates.len();
        self.gates.push(Gate::Input(v));
        self.inputs.insert(v, g as u32);
        Node::from_gate(g, false)
    }

    pub fn and<I: IntoIterator<Item = Node>>(&mut self, nodes: I) -> Node {
        let mut kids: Vec<Node> = Vec::new();
        for n in nodes {
            if n == Node::FALSE {
                return Node::FALSE;
            }
            if n != Node::TRUE {
                kids.push(n);
            }
        }
        kids.sort_unstable();
        kids.dedup();
        // x and not x
        if kids.windows(2).any(|w| w[0] == !w[1]) {
            return Node::FALSE;
        }
        match kids.len() {
            0 => Node::TRUE,
            1 => kids[0],
            _ => {
                if let Some(&g) = self.ands.get(&kids) {
                    return Node::from_gate(g as usize, false);
                }
                let g = self.gates.len();
                self.gates.push(Gate::And(kids.clone()));
                self.ands.insert(kids, g as u32);
                Node::from_gate(g, false)
            }
        }
    }

    pub fn or<I: IntoIterator<Item = Node>>(&mut self, nodes: I) -> Node {
        let negated: Vec<Node> = nodes.into_iter().map(|n| !n).collect();
        !self.and(negated)
    }

    pub fn and2(&mut self, a: Node, b: Node) -> Node {
        self.and([a, b])
    }

    pub fn or2(&mut self, a: Node, b: Node) -> Node {
        self.or([a, b])
    }

    pub fn implies(&mut self, a: Node, b: Node) -> Node {
        self.or([!a, b])
    }

    pub fn iff(&mut self, a: Node, b: Node) -> Node {
        let x = self.implies(a, b);
        let y = self.implies(b, a);
        self.and([x, y])
    }

    /// At most one of `nodes` holds, using a linear chain of prefix ORs.
    pub fn at_most_one(&mut self, nodes: &[Node]) -> Node {
        let mut seen = Node::FALSE;
        let mut ok = Vec::with_capacity(nodes.len());
        for &n in nodes {
            ok.push(self.implies(n, !seen));
            seen = self.or2(seen, n);
        }
        self.and(ok)
    }

    /// Evaluates under an input assignment.
    pub fn eval(&self, root: Node, input: &dyn Fn(Var) -> bool) -> bool {
        let mut memo: HashMap<usize, bool> = HashMap::new();
        self.eval_gate(root.gate(), input, &mut memo) ^ root.is_negated()
    }

    fn eval_gate(&self, g: usize, input: &dyn Fn(Var) -> bool, memo: &mut HashMap<usize, bool>) -> bool {
        if let Some(&v) = memo.get(&g) {
            return v;
        }
        let v = match &self.gates[g] {
            Gate::True => true,
            Gate::Input(x) => input(*x),
            Gate::And(kids) => kids
                .iter()
                .all(|k| self.eval_gate(k.gate(), input, memo) ^ k.is_negated()),
        };
        memo.insert(g, v);
        v
    }
}
