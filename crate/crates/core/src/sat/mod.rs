//! Incremental CDCL SAT solver with assumption-based core extraction.
//!
//! Two-watched-literal propagation, first-UIP learning with local clause
//! minimization, VSIDS branching with phase saving, geometric restarts and
//! activity-based learned clause reduction. All heuristics are
//! deterministic for a given seed.

mod dimacs;
mod heap;

pub use dimacs::{parse_dimacs, DimacsError};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::limits::Limits;
use crate::model::{Clause, CnfFormula, Lit, Var};
use heap::VarHeap;

/// Answer of [`Solver::solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A total model over all solver variables, indexed by variable.
    Sat(Vec<bool>),
    /// A subset of the assumptions that is inconsistent with the formula.
    /// An empty core means the formula alone is unsatisfiable.
    Unsat(Vec<Lit>),
    /// The configured [`Limits`] were hit before an answer was found.
    Interrupted,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveOutcome::Unsat(_))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SatStats {
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

type CRef = u32;

#[derive(Debug, Clone)]
struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    activity: f64,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: CRef,
    blocker: Lit,
}

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

#[inline]
fn lit_value(assigns: &[i8], l: Lit) -> i8 {
    let v = assigns[l.var().idx()];
    if l.is_pos() {
        v
    } else {
        -v
    }
}

enum SearchResult {
    Sat,
    Unsat(Vec<Lit>),
    Restart,
    Interrupted,
}

#[derive(Debug, Clone)]
pub struct Solver {
    arena: Vec<ClauseData>,
    free: Vec<CRef>,
    learnts: Vec<CRef>,
    n_original: usize,
    watches: Vec<Vec<Watcher>>,

    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<CRef>>,
    polarity: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    activity: Vec<f64>,
    var_inc: f64,
    var_decay: f64,
    cla_inc: f64,
    cla_decay: f64,
    order: VarHeap,
    seen: Vec<bool>,

    ok: bool,
    rng: ChaCha8Rng,
    max_learnts: f64,
    restart_first: u64,
    restart_inc: f64,
    minimize_cores: bool,
    limits: Limits,
    stats: SatStats,
}

impl Default for Solver {
    fn default() -> Self {
        Self::with_seed(0)
    }
}

impl Solver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_seed(seed: u64) -> Self {
        Solver {
            arena: Vec::new(),
            free: Vec::new(),
            learnts: Vec::new(),
            n_original: 0,
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            var_decay: 0.95,
            cla_inc: 1.0,
            cla_decay: 0.999,
            order: VarHeap::default(),
            seen: Vec::new(),
            ok: true,
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_learnts: 0.0,
            restart_first: 100,
            restart_inc: 1.5,
            minimize_cores: false,
            limits: Limits::none(),
            stats: SatStats::default(),
        }
    }

    /// Loads a whole formula into a fresh solver.
    pub fn from_cnf(cnf: &CnfFormula, seed: u64) -> Self {
        let mut s = Self::with_seed(seed);
        s.ensure_vars(cnf.n_vars());
        for c in cnf.clauses() {
            s.add_clause(c.lits());
        }
        s
    }

    pub fn set_limits(&mut self, limits: Limits) {
        self.limits = limits;
    }

    /// Shrink every core by iterative deletion before returning it.
    pub fn set_minimize_cores(&mut self, on: bool) {
        self.minimize_cores = on;
    }

    pub fn stats(&self) -> &SatStats {
        &self.stats
    }

    pub fn n_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn n_clauses(&self) -> usize {
        self.n_original
    }

    /// False once the formula is known to be unsatisfiable without
    /// assumptions.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var::new(self.assigns.len());
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(None);
        self.polarity.push(false);
        // small seeded jitter breaks activity ties differently per seed
        self.activity.push(self.rng.gen::<f64>() * 1e-5);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.order.grow(self.assigns.len());
        self.order.insert(v.idx(), &self.activity);
        v
    }

    pub fn ensure_vars(&mut self, n: usize) {
        while self.assigns.len() < n {
            self.new_var();
        }
    }

    #[inline]
    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        lit_value(&self.assigns, l)
    }

    /// Permanently conjoins a clause. The empty clause (or any clause that is
    /// false at the top level) puts the solver in a permanently
    /// unsatisfiable state.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        if let Some(max) = lits.iter().map(|l| l.var().idx()).max() {
            self.ensure_vars(max + 1);
        }
        if !self.ok {
            return;
        }
        debug_assert_eq!(self.decision_level(), 0);
        let mut ps: Vec<Lit> = lits.to_vec();
        ps.sort_unstable();
        ps.dedup();
        let mut out = Vec::with_capacity(ps.len());
        for (i, &l) in ps.iter().enumerate() {
            if i + 1 < ps.len() && ps[i + 1] == !l {
                return; // tautology
            }
            match self.value(l) {
                TRUE => return,
                FALSE => {}
                _ => out.push(l),
            }
        }
        self.n_original += 1;
        match out.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(out[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                let cr = self.alloc(out, false);
                self.attach(cr);
            }
        }
    }

    pub fn add(&mut self, clause: &Clause) {
        self.add_clause(clause.lits());
    }

    pub fn add_cnf(&mut self, cnf: &CnfFormula) {
        self.ensure_vars(cnf.n_vars());
        for c in cnf.clauses() {
            self.add_clause(c.lits());
        }
    }

    fn alloc(&mut self, lits: Vec<Lit>, learnt: bool) -> CRef {
        let data = ClauseData {
            lits,
            learnt,
            activity: 0.0,
        };
        if let Some(cr) = self.free.pop() {
            self.arena[cr as usize] = data;
            cr
        } else {
            self.arena.push(data);
            (self.arena.len() - 1) as CRef
        }
    }

    fn attach(&mut self, cr: CRef) {
        let c = &self.arena[cr as usize].lits;
        let (a, b) = (c[0], c[1]);
        self.watches[(!a).code()].push(Watcher { cref: cr, blocker: b });
        self.watches[(!b).code()].push(Watcher { cref: cr, blocker: a });
    }

    fn detach_and_free(&mut self, cr: CRef) {
        let (a, b) = {
            let c = &self.arena[cr as usize].lits;
            (c[0], c[1])
        };
        self.watches[(!a).code()].retain(|w| w.cref != cr);
        self.watches[(!b).code()].retain(|w| w.cref != cr);
        self.arena[cr as usize].lits = Vec::new();
        self.free.push(cr);
    }

    fn enqueue(&mut self, l: Lit, reason: Option<CRef>) {
        let v = l.var().idx();
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = if l.is_pos() { TRUE } else { FALSE };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<CRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.assigns, w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let lits = &mut self.arena[w.cref as usize].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let nw = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && lit_value(&self.assigns, first) == TRUE {
                    ws[j] = nw;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if lit_value(&self.assigns, lits[k]) != FALSE {
                        lits.swap(1, k);
                        let watch_on = !lits[1];
                        self.watches[watch_on.code()].push(nw);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if lit_value(&self.assigns, first) == FALSE {
                    conflict = Some(w.cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    let v = first.var().idx();
                    self.assigns[v] = if first.is_pos() { TRUE } else { FALSE };
                    self.level[v] = self.trail_lim.len() as u32;
                    self.reason[v] = Some(w.cref);
                    self.trail.push(first);
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().idx();
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.polarity[v] = l.is_pos();
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cr: CRef) {
        let c = &mut self.arena[cr as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.arena[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: CRef) -> (Vec<Lit>, usize) {
        let mut learnt = vec![Lit::from_code(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let dl = self.decision_level() as u32;
        loop {
            if self.arena[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            let n = self.arena[confl as usize].lits.len();
            for k in start..n {
                let q = self.arena[confl as usize].lits[k];
                let v = q.var().idx();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= dl {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().idx()] {
                    break;
                }
            }
            let pl = self.trail[index];
            p = Some(pl);
            self.seen[pl.var().idx()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[pl.var().idx()].expect("implied literal without reason");
        }
        learnt[0] = !p.unwrap();

        // local minimization: drop literals implied by other learnt literals
        let to_clear = learnt.clone();
        let mut kept = 1;
        for i in 1..learnt.len() {
            let v = learnt[i].var().idx();
            let redundant = match self.reason[v] {
                None => false,
                Some(r) => self.arena[r as usize].lits[1..].iter().all(|q| {
                    let qv = q.var().idx();
                    self.seen[qv] || self.level[qv] == 0
                }),
            };
            if !redundant {
                learnt[kept] = learnt[i];
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for l in &to_clear {
            self.seen[l.var().idx()] = false;
        }

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().idx()] > self.level[learnt[max_i].var().idx()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().idx()] as usize
        };
        (learnt, bt)
    }

    /// Collects the assumptions responsible for `p` (an assumption) being
    /// false.
    fn analyze_final(&mut self, p: Lit) -> Vec<Lit> {
        let mut core = vec![p];
        if self.decision_level() == 0 {
            return core;
        }
        self.seen[p.var().idx()] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().idx();
            if !self.seen[v] {
                continue;
            }
            match self.reason[v] {
                None => {
                    debug_assert!(self.level[v] > 0);
                    core.push(l);
                }
                Some(r) => {
                    for k in 1..self.arena[r as usize].lits.len() {
                        let q = self.arena[r as usize].lits[k].var().idx();
                        if self.level[q] > 0 {
                            self.seen[q] = true;
                        }
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[p.var().idx()] = false;
        core.sort_unstable();
        core.dedup();
        core
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(Lit::new(Var::new(v), self.polarity[v]));
            }
        }
        None
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<CRef> = Vec::new();
        let mut keep: Vec<CRef> = Vec::new();
        for &cr in &self.learnts {
            let c = &self.arena[cr as usize];
            let first = c.lits[0];
            let locked = self.reason[first.var().idx()] == Some(cr) && self.value(first) == TRUE;
            if c.lits.len() <= 2 || locked {
                keep.push(cr);
            } else {
                cands.push(cr);
            }
        }
        cands.sort_by(|a, b| {
            self.arena[*a as usize]
                .activity
                .total_cmp(&self.arena[*b as usize].activity)
        });
        let cut = cands.len() / 2;
        for &cr in &cands[..cut] {
            self.detach_and_free(cr);
        }
        keep.extend_from_slice(&cands[cut..]);
        self.learnts = keep;
    }

    fn search(&mut self, assumptions: &[Lit], conflict_budget: u64) -> SearchResult {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SearchResult::Unsat(Vec::new());
                }
                debug_assert!(
                    self.arena[confl as usize].lits.iter().all(|&q| self.value(q) == FALSE),
                    "conflict clause not falsified"
                );
                debug_assert!(
                    self.arena[confl as usize].lits.iter().any(|&q| self.level[q.var().idx()] as usize == self.decision_level()),
                    "conflict clause has no literal at the current level"
                );
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let cr = self.alloc(learnt, true);
                    self.attach(cr);
                    self.learnts.push(cr);
                    self.bump_clause(cr);
                    self.enqueue(asserting, Some(cr));
                }
                self.var_inc /= self.var_decay;
                self.cla_inc /= self.cla_decay;
                if conflicts.is_multiple_of(32) && self.limits.exhausted() {
                    return SearchResult::Interrupted;
                }
            } else {
                if conflicts >= conflict_budget {
                    return SearchResult::Restart;
                }
                let mut next = None;
                while self.decision_level() < assumptions.len() {
                    let p = assumptions[self.decision_level()];
                    match self.value(p) {
                        TRUE => self.trail_lim.push(self.trail.len()),
                        FALSE => {
                            let core = self.analyze_final(p);
                            return SearchResult::Unsat(core);
                        }
                        _ => {
                            next = Some(p);
                            break;
                        }
                    }
                }
                let next = match next {
                    Some(p) => p,
                    None => {
                        self.stats.decisions += 1;
                        if self.stats.decisions.is_multiple_of(1024) && self.limits.exhausted() {
                            return SearchResult::Interrupted;
                        }
                        match self.pick_branch() {
                            Some(l) => l,
                            None => return SearchResult::Sat,
                        }
                    }
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, None);
            }
        }
    }

    fn solve_plain(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        self.stats.solves += 1;
        if let Some(max) = assumptions.iter().map(|l| l.var().idx()).max() {
            self.ensure_vars(max + 1);
        }
        if !self.ok {
            return SolveOutcome::Unsat(Vec::new());
        }
        if self.limits.exhausted() {
            return SolveOutcome::Interrupted;
        }
        self.max_learnts = (self.n_original as f64 / 3.0).max(1000.0);
        let mut budget = self.restart_first as f64;
        let outcome = loop {
            match self.search(assumptions, budget as u64) {
                SearchResult::Sat => {
                    let model = self.assigns.iter().map(|&a| a == TRUE).collect();
                    break SolveOutcome::Sat(model);
                }
                SearchResult::Unsat(core) => break SolveOutcome::Unsat(core),
                SearchResult::Interrupted => break SolveOutcome::Interrupted,
                SearchResult::Restart => {
                    self.stats.restarts += 1;
                    budget *= self.restart_inc;
                    self.cancel_until(0);
                    if self.learnts.len() as f64 >= self.max_learnts {
                        self.reduce_db();
                        self.max_learnts *= 1.1;
                    }
                    if self.limits.exhausted() {
                        break SolveOutcome::Interrupted;
                    }
                }
            }
        };
        self.cancel_until(0);
        outcome
    }

    /// Solves the formula under `assumptions`.
    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        let out = self.solve_plain(assumptions);
        if let (true, SolveOutcome::Unsat(core)) = (self.minimize_cores, &out) {
            if core.len() > 1 {
                return self.shrink_core(core.clone());
            }
        }
        out
    }

    /// Deletion-based core minimization: drop each literal in turn and keep
    /// the (possibly smaller) core whenever the rest stays unsatisfiable.
    fn shrink_core(&mut self, mut core: Vec<Lit>) -> SolveOutcome {
        let mut i = 0;
        while i < core.len() {
            let candidate: Vec<Lit> = core
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &l)| l)
                .collect();
            match self.solve_plain(&candidate) {
                SolveOutcome::Unsat(smaller) => {
                    // `smaller` is a subset of `candidate`; keep the order of
                    // `core` so the scan index stays meaningful
                    core.retain(|l| smaller.contains(l));
                }
                SolveOutcome::Sat(_) => i += 1,
                SolveOutcome::Interrupted => break,
            }
        }
        SolveOutcome::Unsat(core)
    }
}
