use super::{Cnf, Lit, SatError, Var, CONFLICT_LIMIT_ENV};

/// Tuning knobs. Defaults favour reproducibility over raw speed.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// VSIDS activity decay (applied by bumping the increment).
    pub var_decay: f64,
    pub clause_decay: f64,
    /// Conflicts per Luby unit.
    pub restart_base: u64,
    /// Polarity picked for fresh decisions. `false` makes the first model of
    /// a Horn formula its least model.
    pub default_polarity: bool,
    /// Reuse the last assigned polarity on re-decisions.
    pub phase_saving: bool,
    /// Per-`solve` conflict budget; `None` means unlimited.
    pub conflict_limit: Option<u64>,
    /// Learnt-clause database size, as a fraction of original clauses,
    /// before the first reduction.
    pub learnt_fraction: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            var_decay: 0.95,
            clause_decay: 0.999,
            restart_base: 100,
            default_polarity: false,
            phase_saving: false,
            conflict_limit: None,
            learnt_fraction: 0.5,
        }
    }
}

impl SolverConfig {
    /// Defaults, with the conflict limit taken from `TRACER_SAT_CONFLICT_LIMIT`
    /// when set.
    pub fn from_env() -> Self {
        let mut cfg = SolverConfig::default();
        if let Ok(v) = std::env::var(CONFLICT_LIMIT_ENV) {
            if let Ok(n) = v.trim().parse::<u64>() {
                cfg.conflict_limit = Some(n);
            }
        }
        cfg
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub learnt: u64,
}

/// Total assignment returned with a satisfiable verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn value(&self, var: Var) -> bool {
        self.values[var.index()]
    }

    pub fn lit(&self, lit: Lit) -> bool {
        self.value(lit.var()) == lit.is_positive()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn true_vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v)
            .map(|(i, _)| Var(i as u32))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Model),
    /// `core` lists indices into the assumption slice whose conjunction is
    /// already contradictory. `None` means unsatisfiable without assumptions.
    Unsat { core: Option<Vec<usize>> },
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SolveResult::Sat(m) => Some(m),
            SolveResult::Unsat { .. } => None,
        }
    }
}

const UNDEF: u8 = 2;

type ClauseRef = u32;

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: ClauseRef,
    blocker: Lit,
}

/// Max-heap on variable activity; ties go to the lower variable index.
#[derive(Debug, Clone, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn better(a: u32, b: u32, act: &[f64]) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn grow(&mut self, n: usize) {
        self.pos.resize(n, None);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize].is_some()
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = Some(i);
        self.sift_up(i, act);
    }

    fn increased(&mut self, v: u32, act: &[f64]) {
        if let Some(i) = self.pos[v as usize] {
            self.sift_up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if Self::better(v, self.heap[p], act) {
                self.heap[i] = self.heap[p];
                self.pos[self.heap[i] as usize] = Some(i);
                i = p;
            } else {
                break;
            }
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && Self::better(self.heap[r], self.heap[l], act) {
                r
            } else {
                l
            };
            if Self::better(self.heap[c], v, act) {
                self.heap[i] = self.heap[c];
                self.pos[self.heap[i] as usize] = Some(i);
                i = c;
            } else {
                break;
            }
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }
}

/// Luby sequence value for index `i` (0-based): 1 1 2 1 1 2 4 ...
fn luby(mut i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1u64 << seq
}

/// Incremental CDCL solver. Clauses may be added between `solve` calls.
#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    clauses: Vec<Clause>,
    /// Indices of non-learnt clauses, kept for the model self-check.
    originals: Vec<ClauseRef>,
    learnts: Vec<ClauseRef>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<u8>,
    phase: Vec<bool>,
    level: Vec<u32>,
    reason: Vec<Option<ClauseRef>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    seen: Vec<bool>,
    /// Unit clauses, kept so the self-check can see them.
    units: Vec<Lit>,
    ok: bool,
    max_learnts: f64,
    stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(SolverConfig::default())
    }
}

impl Solver {
    pub fn new(config: SolverConfig) -> Self {
        Solver {
            config,
            clauses: Vec::new(),
            originals: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            phase: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            seen: Vec::new(),
            units: Vec::new(),
            ok: true,
            max_learnts: 0.0,
            stats: SolverStats::default(),
        }
    }

    pub fn from_cnf(cnf: &Cnf, config: SolverConfig) -> Self {
        let mut s = Solver::new(config);
        s.ensure_vars(cnf.num_vars());
        for c in cnf.clauses() {
            s.add_clause(c);
        }
        s
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    pub fn num_vars(&self) -> u32 {
        self.assigns.len() as u32
    }

    pub fn num_clauses(&self) -> usize {
        self.originals.len() + self.units.len()
    }

    /// `false` once the clause set is known to be unsatisfiable at level 0.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.num_vars());
        self.ensure_vars(v.0 + 1);
        v
    }

    pub fn ensure_vars(&mut self, n: u32) {
        let n = n as usize;
        if n <= self.assigns.len() {
            return;
        }
        let old = self.assigns.len();
        self.assigns.resize(n, UNDEF);
        self.phase.resize(n, self.config.default_polarity);
        self.level.resize(n, 0);
        self.reason.resize(n, None);
        self.activity.resize(n, 0.0);
        self.seen.resize(n, false);
        self.watches.resize(2 * n, Vec::new());
        self.heap.grow(n);
        for v in old..n {
            self.heap.insert(v as u32, &self.activity);
        }
    }

    #[inline]
    fn value(&self, l: Lit) -> u8 {
        let a = self.assigns[l.var().index()];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ (!l.is_positive()) as u8
        }
    }

    #[inline]
    fn is_true(&self, l: Lit) -> bool {
        self.value(l) == 1
    }

    #[inline]
    fn is_false(&self, l: Lit) -> bool {
        self.value(l) == 0
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause at decision level 0. Returns `false` if the database
    /// became trivially unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        if let Some(max) = lits.iter().map(|l| l.var().0 + 1).max() {
            self.ensure_vars(max);
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        for w in c.windows(2) {
            if w[0] == !w[1] {
                return true;
            }
        }
        // keep the full clause around for the model self-check before
        // simplifying against level-0 assignments
        let mut simplified = Vec::with_capacity(c.len());
        for &l in &c {
            match self.value(l) {
                1 => return true,
                0 => {}
                _ => simplified.push(l),
            }
        }
        match simplified.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.units.push(simplified[0]);
                self.enqueue(simplified[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                let cref = self.alloc(simplified, false);
                self.originals.push(cref);
                self.attach(cref);
                true
            }
        }
    }

    fn alloc(&mut self, lits: Vec<Lit>, learnt: bool) -> ClauseRef {
        let cref = self.clauses.len() as ClauseRef;
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        cref
    }

    fn attach(&mut self, cref: ClauseRef) {
        let c = &self.clauses[cref as usize];
        let (a, b) = (c.lits[0], c.lits[1]);
        self.watches[a.code()].push(Watcher { cref, blocker: b });
        self.watches[b.code()].push(Watcher { cref, blocker: a });
    }

    fn enqueue(&mut self, l: Lit, reason: Option<ClauseRef>) {
        let v = l.var().index();
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = l.is_positive() as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<ClauseRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.clauses[w.cref as usize].deleted {
                    continue;
                }
                if self.is_true(w.blocker) {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.is_true(first) {
                    ws[j] = Watcher {
                        cref: w.cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                let len = self.clauses[cref].lits.len();
                for k in 2..len {
                    let lk = self.clauses[cref].lits[k];
                    if !self.is_false(lk) {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[lk.code()].push(Watcher {
                            cref: w.cref,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                j += 1;
                if self.is_false(first) {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            // watches pushed onto `false_lit` during this pass cannot exist:
            // a replacement watch is never the false literal itself
            let extra = std::mem::take(&mut self.watches[false_lit.code()]);
            ws.extend(extra);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: Var) {
        let i = v.index();
        self.activity[i] += self.var_inc;
        if self.activity[i] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v.0, &self.activity);
    }

    fn bump_clause(&mut self, cref: ClauseRef) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: ClauseRef) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit::new(Var(0), true)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level();
        loop {
            self.bump_clause(confl);
            let lits = self.clauses[confl as usize].lits.clone();
            let start = if p.is_some() { 1 } else { 0 };
            for &q in &lits[start..] {
                let v = q.var();
                if !self.seen[v.index()] && self.level[v.index()] > 0 {
                    self.seen[v.index()] = true;
                    self.bump_var(v);
                    if self.level[v.index()] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let pl = self.trail[index];
            p = Some(pl);
            self.seen[pl.var().index()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[pl.var().index()].expect("implied literal has a reason");
            // the reason clause lists the implied literal first
            let lits = &mut self.clauses[confl as usize].lits;
            if lits[0] != pl {
                let pos = lits.iter().position(|&x| x == pl).unwrap();
                lits.swap(0, pos);
            }
        }
        learnt[0] = !p.unwrap();

        // drop literals implied by other literals of the clause
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &l)| i == 0 || !self.redundant(l))
            .collect();
        for &l in &learnt {
            self.seen[l.var().index()] = false;
        }
        let mut out: Vec<Lit> = learnt
            .iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(l, _)| *l)
            .collect();

        let bt = if out.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..out.len() {
                if self.level[out[i].var().index()] > self.level[out[max_i].var().index()] {
                    max_i = i;
                }
            }
            out.swap(1, max_i);
            self.level[out[1].var().index()]
        };
        (out, bt)
    }

    /// Local minimisation: a literal is redundant when every other literal of
    /// its reason is already in the clause (`seen`) or fixed at level 0.
    fn redundant(&self, l: Lit) -> bool {
        match self.reason[l.var().index()] {
            None => false,
            Some(r) => self.clauses[r as usize].lits.iter().all(|q| {
                q.var() == l.var() || self.seen[q.var().index()] || self.level[q.var().index()] == 0
            }),
        }
    }

    /// Collects the assumptions responsible for `p` being false.
    fn analyze_final(&mut self, p: Lit) -> Vec<Lit> {
        let mut out = vec![p];
        if self.decision_level() == 0 {
            return out;
        }
        self.seen[p.var().index()] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let x = self.trail[i].var();
            if !self.seen[x.index()] {
                continue;
            }
            match self.reason[x.index()] {
                None => {
                    if self.level[x.index()] > 0 {
                        out.push(!self.trail[i]);
                    }
                }
                Some(r) => {
                    for &q in &self.clauses[r as usize].lits[1..] {
                        if self.level[q.var().index()] > 0 {
                            self.seen[q.var().index()] = true;
                        }
                    }
                }
            }
            self.seen[x.index()] = false;
        }
        self.seen[p.var().index()] = false;
        out
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            if self.config.phase_saving {
                self.phase[v] = l.is_positive();
            }
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.trail.len();
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == UNDEF {
                return Some(Lit::new(Var(v), self.phase[v as usize]));
            }
        }
        None
    }

    fn locked(&self, cref: ClauseRef) -> bool {
        let c = &self.clauses[cref as usize];
        let l0 = c.lits[0];
        self.is_true(l0) && self.reason[l0.var().index()] == Some(cref)
    }

    fn reduce_db(&mut self) {
        let mut ls = std::mem::take(&mut self.learnts);
        ls.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            ca.activity
                .partial_cmp(&cb.activity)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let half = ls.len() / 2;
        let mut kept = Vec::with_capacity(ls.len());
        for (i, cref) in ls.into_iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i < half && c.lits.len() > 2 && !self.locked(cref) {
                self.clauses[cref as usize].deleted = true;
                self.clauses[cref as usize].lits = Vec::new();
            } else {
                kept.push(cref);
            }
        }
        kept.sort_unstable();
        self.learnts = kept;
    }

    /// Runs CDCL search under `assumptions`. The solver is back at decision
    /// level 0 afterwards, so clauses can be added for the next call.
    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SolveResult, SatError> {
        if !self.ok {
            return Ok(SolveResult::Unsat { core: None });
        }
        for a in assumptions {
            self.ensure_vars(a.var().0 + 1);
        }
        if self.propagate().is_some() {
            self.ok = false;
            return Ok(SolveResult::Unsat { core: None });
        }
        self.max_learnts = (self.originals.len() as f64 * self.config.learnt_fraction).max(1000.0);
        let mut conflicts_this_call = 0u64;
        let mut restart_idx = 0u64;
        loop {
            let budget = luby(restart_idx) * self.config.restart_base;
            restart_idx += 1;
            match self.search(budget, assumptions, &mut conflicts_this_call) {
                Searched::Sat => {
                    let values: Vec<bool> = self.assigns.iter().map(|&a| a == 1).collect();
                    self.cancel_until(0);
                    let model = Model { values };
                    self.self_check(&model)?;
                    return Ok(SolveResult::Sat(model));
                }
                Searched::Unsat(core) => {
                    self.cancel_until(0);
                    let core = core.map(|lits| {
                        let mut idx: Vec<usize> = lits
                            .iter()
                            .filter_map(|l| assumptions.iter().position(|a| *a == !*l))
                            .collect();
                        idx.sort_unstable();
                        idx.dedup();
                        idx
                    });
                    return Ok(SolveResult::Unsat { core });
                }
                Searched::Restart => {
                    self.stats.restarts += 1;
                    self.cancel_until(0);
                }
                Searched::Limit(limit) => {
                    self.cancel_until(0);
                    return Err(SatError::ConflictLimit { limit });
                }
            }
        }
    }

    fn search(&mut self, budget: u64, assumptions: &[Lit], total: &mut u64) -> Searched {
        let mut local = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                local += 1;
                *total += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Searched::Unsat(None);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.units.push(learnt[0]);
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let cref = self.alloc(learnt, true);
                    self.learnts.push(cref);
                    self.attach(cref);
                    self.bump_clause(cref);
                    self.enqueue(asserting, Some(cref));
                    self.stats.learnt += 1;
                }
                self.var_inc /= self.config.var_decay;
                self.cla_inc /= self.config.clause_decay;
                if let Some(limit) = self.config.conflict_limit {
                    if *total >= limit {
                        return Searched::Limit(limit);
                    }
                }
            } else {
                if local >= budget {
                    return Searched::Restart;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while (self.decision_level() as usize) < assumptions.len() {
                    let p = assumptions[self.decision_level() as usize];
                    if self.is_true(p) {
                        self.trail_lim.push(self.trail.len());
                    } else if self.is_false(p) {
                        let core = self.analyze_final(!p);
                        return Searched::Unsat(Some(core));
                    } else {
                        next = Some(p);
                        break;
                    }
                }
                let lit = match next {
                    Some(l) => l,
                    None => match self.pick_branch() {
                        Some(l) => {
                            self.stats.decisions += 1;
                            l
                        }
                        None => return Searched::Sat,
                    },
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(lit, None);
            }
        }
    }

    fn self_check(&self, model: &Model) -> Result<(), SatError> {
        for (i, &cref) in self.originals.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if !c.lits.iter().any(|&l| model.lit(l)) {
                return Err(SatError::SelfCheck { clause: i });
            }
        }
        for (i, &u) in self.units.iter().enumerate() {
            if !model.lit(u) {
                return Err(SatError::SelfCheck {
                    clause: self.originals.len() + i,
                });
            }
        }
        Ok(())
    }
}

enum Searched {
    Sat,
    Unsat(Option<Vec<Lit>>),
    Restart,
    Limit(u64),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(xs: &[i32]) -> Vec<Lit> {
        xs.iter().map(|&x| Lit::from_dimacs(x)).collect()
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn empty_clause_set_is_sat() {
        let mut s = Solver::default();
        assert!(s.solve(&[]).unwrap().is_sat());
    }

    #[test]
    fn two_units_against_binary() {
        let mut cnf = Cnf::new();
        cnf.add_clause(lits(&[1, 2]));
        cnf.add_clause(lits(&[-1]));
        cnf.add_clause(lits(&[-2]));
        let r = super::super::solve(&cnf, &[]).unwrap();
        assert_eq!(r, SolveResult::Unsat { core: None });
    }

    #[test]
    fn assumption_core_names_the_culprits() {
        let mut s = Solver::default();
        s.add_clause(&lits(&[-1, -2]));
        s.add_clause(&lits(&[3, 4]));
        let assumptions = lits(&[3, 1, 2]);
        match s.solve(&assumptions).unwrap() {
            SolveResult::Unsat { core: Some(core) } => assert_eq!(core, vec![1, 2]),
            other => panic!("unexpected {other:?}"),
        }
        // still usable without the assumptions
        assert!(s.solve(&[]).unwrap().is_sat());
    }

    #[test]
    fn default_polarity_is_false() {
        let mut s = Solver::default();
        s.add_clause(&lits(&[1, 2, 3]));
        let m = s.solve(&[]).unwrap();
        let m = m.model().unwrap();
        assert_eq!(m.true_vars().count(), 1);
    }

    #[test]
    fn conflict_limit_is_reported() {
        // PHP(5,4) needs more than a handful of conflicts
        let cnf = pigeonhole(5, 4);
        let mut cfg = SolverConfig::default();
        cfg.conflict_limit = Some(3);
        let mut s = Solver::from_cnf(&cnf, cfg);
        assert_eq!(s.solve(&[]), Err(SatError::ConflictLimit { limit: 3 }));
    }

    fn pigeonhole(p: u32, h: u32) -> Cnf {
        let var = |i: u32, j: u32| Var(i * h + j);
        let mut cnf = Cnf::with_vars(p * h);
        for i in 0..p {
            cnf.add_clause((0..h).map(|j| var(i, j).pos()));
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    cnf.add_clause([var(a, j).neg(), var(b, j).neg()]);
                }
            }
        }
        cnf
    }
}
