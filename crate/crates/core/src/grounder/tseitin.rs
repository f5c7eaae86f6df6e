use super::circuit::{Circuit, Gate, Node};
use crate::sat::{Cnf, Lit, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarity {
    /// Both implications for every gate.
    #[default]
    Full,
    /// Plaisted-Greenbaum: only the implications each gate's occurrences need.
    Pg,
}

const POS: u8 = 1;
const NEG: u8 = 2;

/// Incremental Tseitin encoder. Inputs keep their own variable numbers;
/// AND gates get auxiliary variables numbered from `num_inputs` upward in
/// the order they are first reached.
pub struct TseitinEncoder {
    polarity: Polarity,
    next_var: u32,
    gate_var: Vec<Option<Var>>,
    emitted: Vec<u8>,
    work: Vec<(usize, u8)>,
}

impl TseitinEncoder {
    pub fn new(num_inputs: u32, polarity: Polarity) -> Self {
        TseitinEncoder {
            polarity,
            next_var: num_inputs,
            gate_var: Vec::new(),
            emitted: Vec::new(),
            work: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.next_var
    }

    /// Auxiliary variables with the gate each one names.
    pub fn aux_vars(&self) -> impl Iterator<Item = (Var, usize)> + '_ {
        self.gate_var
            .iter()
            .enumerate()
            .filter_map(|(g, v)| v.map(|v| (v, g)))
    }

    /// Clauses asserting `root`. Top-level conjunctions become separate
    /// clauses and top-level disjunctions become single clauses.
    pub fn assert_root(&mut self, circuit: &Circuit, root: Node) -> Vec<Vec<Lit>> {
        let mut out = Vec::new();
        if root == Node::TRUE {
            return out;
        }
        if root == Node::FALSE {
            let x = Var(self.next_var);
            self.next_var += 1;
            out.push(vec![x.pos()]);
            out.push(vec![x.neg()]);
            return out;
        }
        let mut stack = vec![root];
        let mut top = Vec::new();
        while let Some(n) = stack.pop() {
            match circuit.gate(n.gate()) {
                Gate::And(kids) if !n.is_negated() => stack.extend(kids.iter().rev()),
                _ => top.push(n),
            }
        }
        for n in top {
            let clause = match circuit.gate(n.gate()) {
                Gate::And(kids) if n.is_negated() => {
                    let kids = kids.clone();
                    kids.iter().map(|&k| !self.lit(circuit, k, NEG)).collect()
                }
                _ => vec![self.lit(circuit, n, POS)],
            };
            push_clause(&mut out, clause);
            self.drain(circuit, &mut out);
        }
        out
    }

    /// Literal for `n`, scheduling definitions for the polarity `want` in
    /// which `n` occurs.
    fn lit(&mut self, circuit: &Circuit, n: Node, want: u8) -> Lit {
        let g = n.gate();
        let var = match circuit.gate(g) {
            Gate::Input(v) => *v,
            Gate::True => unreachable!("constants are folded away"),
            Gate::And(_) => {
                if self.gate_var.len() <= g {
                    self.gate_var.resize(g + 1, None);
                    self.emitted.resize(g + 1, 0);
                }
                let v = match self.gate_var[g] {
                    Some(v) => v,
                    None => {
                        let v = Var(self.next_var);
                        self.next_var += 1;
                        self.gate_var[g] = Some(v);
                        v
                    }
                };
                let need = match self.polarity {
                    Polarity::Full => POS | NEG,
                    Polarity::Pg if n.is_negated() => flip(want),
                    Polarity::Pg => want,
                };
                let missing = need & !self.emitted[g];
                if missing != 0 {
                    self.emitted[g] |= missing;
                    self.work.push((g, missing));
                }
                v
            }
        };
        Lit::new(var, !n.is_negated())
    }

    fn drain(&mut self, circuit: &Circuit, out: &mut Vec<Vec<Lit>>) {
        while let Some((g, bits)) = self.work.pop() {
            let Gate::And(kids) = circuit.gate(g) else {
                unreachable!()
            };
            let gv = self.gate_var[g].expect("scheduled gate has a variable");
            if bits & POS != 0 {
                for &k in kids {
                    let l = self.lit(circuit, k, POS);
                    push_clause(out, vec![gv.neg(), l]);
                }
            }
            if bits & NEG != 0 {
                let mut clause = vec![gv.pos()];
                for &k in kids {
                    clause.push(!self.lit(circuit, k, NEG));
                }
                push_clause(out, clause);
            }
        }
    }
}

fn flip(p: u8) -> u8 {
    ((p & POS) << 1) | ((p & NEG) >> 1)
}

fn push_clause(out: &mut Vec<Vec<Lit>>, mut clause: Vec<Lit>) {
    clause.sort_unstable();
    clause.dedup();
    if clause.windows(2).any(|w| w[0] == !w[1]) {
        return;
    }
    out.push(clause);
}

/// Equisatisfiable CNF for `root`, with inputs as variables `0..num_inputs`.
pub fn to_cnf(circuit: &Circuit, root: Node, num_inputs: u32, polarity: Polarity) -> Cnf {
    let mut enc = TseitinEncoder::new(num_inputs, polarity);
    let clauses = enc.assert_root(circuit, root);
    let mut cnf = Cnf::with_vars(enc.num_vars());
    for c in clauses {
        cnf.add_clause(c);
    }
    cnf
}
