use std::collections::{BTreeSet, HashMap, HashSet};

use super::{Concept, DlError, Ontology, Role};

/// Default bound on completion-graph nodes created by one satisfiability test.
pub const NODE_BUDGET: usize = 20_000;

type Cid = u32;
type RoleId = u32;

fn inv(r: RoleId) -> RoleId {
    r ^ 1
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum C {
    Top,
    Bottom,
    Atom(u32),
    Neg(u32),
    And(Vec<Cid>),
    Or(Vec<Cid>),
    Some(RoleId, Cid),
    All(RoleId, Cid),
}

#[derive(Debug, Clone)]
struct TNode {
    label: BTreeSet<Cid>,
    parent: Option<usize>,
    /// Roles on the edge from the parent to this node.
    edge: BTreeSet<RoleId>,
    children: Vec<usize>,
    alive: bool,
}

#[derive(Debug, Clone)]
struct Graph {
    nodes: Vec<TNode>,
}

impl Graph {
    fn add(&mut self, x: usize, c: Cid) -> bool {
        self.nodes[x].label.insert(c)
    }

    fn alive(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].alive)
    }

    fn prune(&mut self, x: usize) {
        let mut stack = vec![x];
        while let Some(n) = stack.pop() {
            self.nodes[n].alive = false;
            stack.extend(self.nodes[n].children.iter().copied());
        }
        if let Some(p) = self.nodes[x].parent {
            self.nodes[p].children.retain(|&c| c != x);
        }
    }
}

/// Tableau reasoner for ALCHIF with general concept inclusions. Inclusions
/// with an atomic left-hand side are unfolded lazily; the rest are
/// internalized into every node.
#[derive(Debug, Clone)]
pub struct Reasoner {
    concept_names: HashMap<String, u32>,
    role_names: HashMap<String, u32>,
    arena: Vec<C>,
    index: HashMap<C, Cid>,
    unfold: HashMap<u32, Vec<Cid>>,
    general: Vec<Cid>,
    role_sub: HashSet<(RoleId, RoleId)>,
    functional: Vec<RoleId>,
    cache: HashMap<Cid, bool>,
    budget: usize,
    created: usize,
}

impl Reasoner {
    pub fn new(onto: &Ontology) -> Result<Self, DlError> {
        Self::with_budget(onto, NODE_BUDGET)
    }

    pub fn with_budget(onto: &Ontology, budget: usize) -> Result<Self, DlError> {
        let mut r = Reasoner {
            concept_names: HashMap::new(),
            role_names: HashMap::new(),
            arena: Vec::new(),
            index: HashMap::new(),
            unfold: HashMap::new(),
            general: Vec::new(),
            role_sub: HashSet::new(),
            functional: Vec::new(),
            cache: HashMap::new(),
            budget,
            created: 0,
        };
        for (a, b) in &onto.subclass {
            r.inclusion(a, b);
        }
        for (a, b) in &onto.disjoint {
            if matches!(b, Concept::Atomic(_)) && !matches!(a, Concept::Atomic(_)) {
                r.inclusion(b, &Concept::not(a.clone()));
            } else {
                r.inclusion(a, &Concept::not(b.clone()));
            }
        }
        let mut edges: Vec<(RoleId, RoleId)> = Vec::new();
        for (s, t) in &onto.role_inclusions {
            let (s, t) = (r.role(s), r.role(t));
            edges.push((s, t));
            edges.push((inv(s), inv(t)));
        }
        let mut closure: HashSet<(RoleId, RoleId)> = edges.iter().copied().collect();
        loop {
            let mut next = closure.clone();
            for &(a, b) in &closure {
                for &(c, d) in &closure {
                    if b == c {
                        next.insert((a, d));
                    }
                }
            }
            if next.len() == closure.len() {
                break;
            }
            closure = next;
        }
        for &(a, b) in &closure {
            if a == b || closure.contains(&(b, a)) {
                let name = r
                    .role_names
                    .iter()
                    .find(|(_, &id)| id == a >> 1)
                    .map(|(n, _)| n.clone())
                    .unwrap_or_default();
                return Err(DlError::CyclicRoles(name));
            }
        }
        r.role_sub = closure;
        for f in &onto.functional {
            let id = r.role(f);
            r.functional.push(id);
        }
        Ok(r)
    }

    fn inclusion(&mut self, a: &Concept, b: &Concept) {
        let lhs = a.nnf();
        let rhs = self.intern(&b.nnf());
        if let Concept::Atomic(name) = &lhs {
            let id = self.concept_name(name);
            self.unfold.entry(id).or_default().push(rhs);
        } else {
            let l = self.intern(&lhs);
            let nl = self.neg(l);
            let g = self.mk_or(vec![nl, rhs]);
            self.general.push(g);
        }
    }

    fn concept_name(&mut self, name: &str) -> u32 {
        let n = self.concept_names.len() as u32;
        *self.concept_names.entry(name.to_string()).or_insert(n)
    }

    fn role(&mut self, r: &Role) -> RoleId {
        let n = self.role_names.len() as u32;
        let id = *self.role_names.entry(r.name.clone()).or_insert(n);
        id << 1 | r.inverse as u32
    }

    fn mk(&mut self, c: C) -> Cid {
        if let Some(&id) = self.index.get(&c) {
            return id;
        }
        let id = self.arena.len() as Cid;
        self.arena.push(c.clone());
        self.index.insert(c, id);
        id
    }

    fn mk_junction(&mut self, conj: bool, parts: Vec<Cid>) -> Cid {
        let mut items = Vec::new();
        for p in parts {
            match &self.arena[p as usize] {
                C::And(xs) if conj => items.extend(xs.iter().copied()),
                C::Or(xs) if !conj => items.extend(xs.iter().copied()),
                C::Top if conj => {}
                C::Bottom if !conj => {}
                C::Bottom if conj => return self.mk(C::Bottom),
                C::Top if !conj => return self.mk(C::Top),
                _ => items.push(p),
            }
        }
        items.sort_unstable();
        items.dedup();
        match items.len() {
            0 => self.mk(if conj { C::Top } else { C::Bottom }),
            1 => items[0],
            _ => self.mk(if conj { C::And(items) } else { C::Or(items) }),
        }
    }

    fn mk_or(&mut self, parts: Vec<Cid>) -> Cid {
        self.mk_junction(false, parts)
    }

    /// Interns a concept already in negation normal form.
    fn intern(&mut self, c: &Concept) -> Cid {
        match c {
            Concept::Top => self.mk(C::Top),
            Concept::Bottom => self.mk(C::Bottom),
            Concept::Atomic(n) => {
                let id = self.concept_name(n);
                self.mk(C::Atom(id))
            }
            Concept::Not(inner) => match inner.as_ref() {
                Concept::Atomic(n) => {
                    let id = self.concept_name(n);
                    self.mk(C::Neg(id))
                }
                _ => {
                    let n = c.nnf();
                    self.intern(&n)
                }
            },
            Concept::And(cs) | Concept::Or(cs) => {
                let parts: Vec<Cid> = cs.iter().map(|c| self.intern(c)).collect();
                self.mk_junction(matches!(c, Concept::And(_)), parts)
            }
            Concept::Exists(r, f) | Concept::Forall(r, f) => {
                let r = self.role(r);
                let f = self.intern(f);
                if matches!(c, Concept::Exists(..)) {
                    self.mk(C::Some(r, f))
                } else {
                    self.mk(C::All(r, f))
                }
            }
        }
    }

    fn neg(&mut self, c: Cid) -> Cid {
        match self.arena[c as usize].clone() {
            C::Top => self.mk(C::Bottom),
            C::Bottom => self.mk(C::Top),
            C::Atom(a) => self.mk(C::Neg(a)),
            C::Neg(a) => self.mk(C::Atom(a)),
            C::And(xs) => {
                let parts = xs.into_iter().map(|x| self.neg(x)).collect();
                self.mk_junction(false, parts)
            }
            C::Or(xs) => {
                let parts = xs.into_iter().map(|x| self.neg(x)).collect();
                self.mk_junction(true, parts)
            }
            C::Some(r, f) => {
                let nf = self.neg(f);
                self.mk(C::All(r, nf))
            }
            C::All(r, f) => {
                let nf = self.neg(f);
                self.mk(C::Some(r, nf))
            }
        }
    }

    pub fn is_satisfiable(&mut self, c: &Concept) -> Result<bool, DlError> {
        let root = self.intern(&c.nnf());
        if let Some(&v) = self.cache.get(&root) {
            return Ok(v);
        }
        let g = Graph {
            nodes: vec![TNode {
                label: BTreeSet::from([root]),
                parent: None,
                edge: BTreeSet::new(),
                children: Vec::new(),
                alive: true,
            }],
        };
        self.created = 1;
        let v = self.expand(g)?;
        self.cache.insert(root, v);
        Ok(v)
    }

    /// `sub ⊑ sup` with respect to the ontology.
    pub fn subsumes(&mut self, sup: &Concept, sub: &Concept) -> Result<bool, DlError> {
        let test = Concept::and(vec![sub.clone(), Concept::not(sup.clone())]);
        Ok(!self.is_satisfiable(&test)?)
    }

    fn sub_role(&self, s: RoleId, r: RoleId) -> bool {
        s == r || self.role_sub.contains(&(s, r))
    }

    fn neighbors(&self, g: &Graph, x: usize, r: RoleId) -> Vec<usize> {
        let n = &g.nodes[x];
        let mut out: Vec<usize> = n
            .children
            .iter()
            .copied()
            .filter(|&c| g.nodes[c].edge.iter().any(|&s| self.sub_role(s, r)))
            .collect();
        if let Some(p) = n.parent {
            if n.edge.iter().any(|&s| self.sub_role(inv(s), r)) {
                out.push(p);
            }
        }
        out
    }

    fn directly_blocked(&self, g: &Graph, x: usize) -> bool {
        let Some(xp) = g.nodes[x].parent else { return false };
        let mut y = xp;
        loop {
            let Some(yp) = g.nodes[y].parent else { return false };
            if g.nodes[y].label == g.nodes[x].label
                && g.nodes[yp].label == g.nodes[xp].label
                && g.nodes[y].edge == g.nodes[x].edge
            {
                return true;
            }
            y = yp;
        }
    }

    fn indirectly_blocked(&self, g: &Graph, x: usize) -> bool {
        let mut a = g.nodes[x].parent;
        while let Some(p) = a {
            if self.directly_blocked(g, p) {
                return true;
            }
            a = g.nodes[p].parent;
        }
        false
    }

    fn clash(&self, g: &Graph) -> bool {
        g.alive().any(|x| {
            let l = &g.nodes[x].label;
            l.iter().any(|&c| match self.arena[c as usize] {
                C::Bottom => true,
                C::Atom(a) => self.index.get(&C::Neg(a)).is_some_and(|n| l.contains(n)),
                _ => false,
            })
        })
    }

    /// Applies ⊓, unfolding, internalization and ∀ until nothing changes.
    fn saturate(&self, g: &mut Graph) -> bool {
        let mut changed_any = false;
        loop {
            let mut changed = false;
            for x in g.alive().collect::<Vec<_>>() {
                if self.indirectly_blocked(g, x) {
                    continue;
                }
                for &c in &self.general {
                    changed |= g.add(x, c);
                }
                let label: Vec<Cid> = g.nodes[x].label.iter().copied().collect();
                for c in label {
                    match &self.arena[c as usize] {
                        C::And(cs) => {
                            for &d in cs {
                                changed |= g.add(x, d);
                            }
                        }
                        C::Atom(a) => {
                            if let Some(ds) = self.unfold.get(a) {
                                for &d in ds {
                                    changed |= g.add(x, d);
                                }
                            }
                        }
                        C::All(r, d) => {
                            for y in self.neighbors(g, x, *r) {
                                changed |= g.add(y, *d);
                            }
                        }
                        _ => {}
                    }
                }
            }
            if !changed {
                return changed_any;
            }
            changed_any = true;
        }
    }

    /// Merges two neighbors of some node over a functional role. Returns
    /// whether a merge happened.
    fn merge_step(&self, g: &mut Graph) -> bool {
        for x in g.alive().collect::<Vec<_>>() {
            if self.indirectly_blocked(g, x) {
                continue;
            }
            for &f in &self.functional {
                let ns = self.neighbors(g, x, f);
                if ns.len() < 2 {
                    continue;
                }
                let parent = g.nodes[x].parent;
                let (keep, gone) = match parent {
                    Some(p) if ns.contains(&p) => (p, *ns.iter().find(|&&n| n != p).unwrap()),
                    _ => (ns[0], ns[1]),
                };
                let label = g.nodes[gone].label.clone();
                let edge = g.nodes[gone].edge.clone();
                g.nodes[keep].label.extend(label);
                if Some(keep) == parent {
                    g.nodes[x].edge.extend(edge.into_iter().map(inv));
                } else {
                    g.nodes[keep].edge.extend(edge);
                }
                g.prune(gone);
                return true;
            }
        }
        false
    }

    fn expand(&mut self, mut g: Graph) -> Result<bool, DlError> {
        loop {
            loop {
                self.saturate(&mut g);
                if self.clash(&g) {
                    return Ok(false);
                }
                if !self.merge_step(&mut g) {
                    break;
                }
            }
            let mut choice = None;
            'or: for x in g.alive() {
                if self.indirectly_blocked(&g, x) {
                    continue;
                }
                for &c in &g.nodes[x].label {
                    if let C::Or(ds) = &self.arena[c as usize] {
                        if !ds.iter().any(|d| g.nodes[x].label.contains(d)) {
                            choice = Some((x, ds.clone()));
                            break 'or;
                        }
                    }
                }
            }
            if let Some((x, ds)) = choice {
                for d in ds {
                    let mut branch = g.clone();
                    branch.add(x, d);
                    if self.expand(branch)? {
                        return Ok(true);
                    }
                }
                return Ok(false);
            }
            let mut gen = None;
            'some: for x in g.alive() {
                if self.indirectly_blocked(&g, x) || self.directly_blocked(&g, x) {
                    continue;
                }
                for &c in &g.nodes[x].label {
                    if let C::Some(r, d) = self.arena[c as usize] {
                        let found = self
                            .neighbors(&g, x, r)
                            .iter()
                            .any(|&y| g.nodes[y].label.contains(&d));
                        if !found {
                            gen = Some((x, r, d));
                            break 'some;
                        }
                    }
                }
            }
            let Some((x, r, d)) = gen else { return Ok(true) };
            self.created += 1;
            if self.created > self.budget {
                return Err(DlError::ResourceLimit(self.budget));
            }
            let id = g.nodes.len();
            g.nodes.push(TNode {
                label: BTreeSet::from([d]),
                parent: Some(x),
                edge: BTreeSet::from([r]),
                children: Vec::new(),
                alive: true,
            });
            g.nodes[x].children.push(id);
        }
    }
}
