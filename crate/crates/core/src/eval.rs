//! The lax team-semantics evaluator.
//!
//! Two strategies share one implementation:
//!
//! * [`Strategy::Reference`] applies the satisfaction rules literally: every
//!   cover for `\/`, every supplement team for `E`, no shortcuts. It is the
//!   oracle for the exhaustive checks.
//! * [`Strategy::Accelerated`] evaluates first-order subformulas row by row
//!   (flatness), restricts teams to the free variables of each subformula
//!   before evaluating (locality), and searches consecutive existential
//!   quantifiers jointly with early rejection. With
//!   [`EvalOptions::pruning`] it also replaces the search by the maximal
//!   choice when every atom below is upwards closed.
//!
//! Verdicts of both strategies are memoized per (subformula, team) inside an
//! [`Evaluator`], which can be reused for many teams over the same model.

use crate::atoms::{AtomDefinition, AtomError, AtomRegistry, Builtin};
use crate::model::{duplicate, team_project, team_restrict, CompiledFo, Elem, Model, ModelError, Team};
use crate::syntax::{flatten, free_variables, is_first_order, AtomCall, Formula, Var};
use rustc_hash::FxHashMap;
use std::collections::BTreeSet;
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Atom(#[from] AtomError),
    #[error("free variable `{0}` is not in the team's domain")]
    FreeVariable(Var),
    #[error("`{0}` is not a sentence")]
    NotSentence(String),
    #[error("evaluation exceeded its work budget of {0} steps")]
    BudgetExceeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Reference,
    #[default]
    Accelerated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub strategy: Strategy,
    /// Use the maximal choice for `E` and `\/` over upwards closed material.
    /// Only consulted by the accelerated strategy.
    pub pruning: bool,
    /// Memo entries kept before the cache is flushed.
    pub memo_cap: usize,
    /// Abort after this many covers, choice functions and subteams.
    pub budget: Option<u64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { strategy: Strategy::Accelerated, pruning: true, memo_cap: 1 << 20, budget: None }
    }
}

impl EvalOptions {
    /// Literal rules, no pruning: the assumption-free oracle.
    pub fn oracle() -> Self {
        EvalOptions { strategy: Strategy::Reference, pruning: false, ..Self::default() }
    }

    /// Flatness and locality shortcuts without the upwards-closure pruning.
    pub fn accelerated_unpruned() -> Self {
        EvalOptions { pruning: false, ..Self::default() }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct EvalStats {
    /// Rule applications (memo hits included).
    pub nodes: u64,
    pub covers: u64,
    pub choice_functions: u64,
    pub subteams: u64,
    pub memo_hits: u64,
}

impl EvalStats {
    fn work(&self) -> u64 {
        self.covers + self.choice_functions + self.subteams
    }
}

#[derive(Debug, Clone)]
enum Kind<'a> {
    Literal,
    Atom(&'a AtomDefinition, AtomCall),
    Or(usize, usize),
    And(usize, usize),
    Exists(Var, usize),
    Forall(Var, usize),
    Possibly(usize),
    Restricted(usize, Rc<CompiledFo>, Vec<Var>),
}

/// Conjunct roles in the joint existential search.
#[derive(Debug, Clone)]
enum Conjunct {
    /// First-order: filters candidate values row by row.
    Fo(usize),
    /// `const` over block variables only: fixes one global value.
    ConstBlock(Vec<usize>),
    /// Downwards closed atom: checked on every partial team.
    Down(usize),
    Other(usize),
}

#[derive(Debug, Clone)]
struct Block {
    vars: Vec<Var>,
    body: usize,
    conjuncts: Vec<Conjunct>,
}

#[derive(Debug, Clone)]
struct Node<'a> {
    kind: Kind<'a>,
    formula: Formula,
    fv: Vec<Var>,
    /// Compiled form when first-order, with `fv` as free slots.
    fo: Option<Rc<CompiledFo>>,
    /// Compiled flattening, with `fv` as free slots.
    flat: Rc<CompiledFo>,
    /// Every atom below is verified upwards closed.
    upwards: bool,
    block: Option<Block>,
}

pub struct Evaluator<'a> {
    model: &'a Model,
    nodes: Rc<Vec<Node<'a>>>,
    root: usize,
    options: EvalOptions,
    memo: FxHashMap<(usize, Team), bool>,
    stats: EvalStats,
    exhausted: bool,
}

impl<'a> Evaluator<'a> {
    /// Prepares `phi` for evaluation over `model`, checking its symbols and
    /// atom arities.
    pub fn new(model: &'a Model, registry: &'a AtomRegistry, phi: &Formula, options: EvalOptions) -> Result<Self, EvalError> {
        model.check_signature(phi)?;
        let mut nodes = Vec::new();
        let root = prepare(phi, model, registry, &mut nodes)?;
        Ok(Evaluator { model, nodes: Rc::new(nodes), root, options, memo: FxHashMap::default(), stats: EvalStats::default(), exhausted: false })
    }

    pub fn formula(&self) -> &Formula {
        &self.nodes[self.root].formula
    }

    pub fn free_variables(&self) -> &[Var] {
        &self.nodes[self.root].fv
    }

    /// `M ⊨_X φ`.
    pub fn eval(&mut self, team: &Team) -> Result<bool, EvalError> {
        if let Some(v) = self.nodes[self.root].fv.iter().find(|v| team.column(v).is_none()) {
            return Err(EvalError::FreeVariable(v.clone()));
        }
        self.exhausted = false;
        let start = self.stats.work();
        let verdict = self.node(self.root, team);
        if self.exhausted {
            self.memo.clear();
            return Err(EvalError::BudgetExceeded(self.options.budget.unwrap_or(0).min(self.stats.work() - start)));
        }
        if self.memo.len() > self.options.memo_cap {
            self.memo.clear();
        }
        Ok(verdict)
    }

    pub fn stats(&self) -> EvalStats {
        self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats = EvalStats::default();
    }

    fn spend(&mut self, field: fn(&mut EvalStats) -> &mut u64, n: u64) -> bool {
        *field(&mut self.stats) += n;
        if let Some(b) = self.options.budget {
            if self.stats.work() > b {
                self.exhausted = true;
            }
        }
        !self.exhausted
    }

    fn accelerated(&self) -> bool {
        self.options.strategy == Strategy::Accelerated
    }

    fn node(&mut self, id: usize, team: &Team) -> bool {
        if self.exhausted {
            return false;
        }
        self.stats.nodes += 1;
        let nodes = self.nodes.clone();
        let node = &nodes[id];
        let team = if self.accelerated() {
            if let Some(fo) = &node.fo {
                return all_rows(fo, &node.fv, team);
            }
            if team.vars() != node.fv.as_slice() {
                team_restrict(team, &node.fv).expect("free variables are in the team")
            } else {
                team.clone()
            }
        } else {
            team.clone()
        };
        let key = (id, team);
        if let Some(&v) = self.memo.get(&key) {
            self.stats.memo_hits += 1;
            return v;
        }
        let team = &key.1;
        let verdict = match &node.kind {
            Kind::Literal => all_rows(node.fo.as_ref().expect("literals are first-order"), &node.fv, team),
            Kind::Atom(def, call) => {
                let rel = team_project(team, &call.args()).expect("atom arguments are in the team");
                def.holds(call, &rel, self.model.size())
            }
            Kind::And(a, b) => self.node(*a, team) && self.node(*b, team),
            Kind::Or(a, b) => self.or(node, *a, *b, team),
            Kind::Exists(v, body) => match &node.block {
                Some(block) if self.accelerated() => self.exists_block(node, block, team),
                _ => self.exists(v, *body, team),
            },
            Kind::Forall(v, body) => {
                let dup = duplicate(team, v, self.model);
                self.node(*body, &dup)
            }
            Kind::Possibly(body) => self.possibly(*body, team),
            Kind::Restricted(body, theta, theta_fv) => {
                let part = filter_rows(theta, theta_fv, team, true);
                self.node(*body, &part)
            }
        };
        if !self.exhausted {
            self.memo.insert(key, verdict);
        }
        verdict
    }

    fn or(&mut self, node: &Node, a: usize, b: usize, team: &Team) -> bool {
        if self.accelerated() && self.options.pruning && node.upwards {
            let nodes = self.nodes.clone();
            let y = filter_rows(&nodes[a].flat, &nodes[a].fv, team, true);
            let z = filter_rows(&nodes[b].flat, &nodes[b].fv, team, true);
            let covered = y.len() + z.len() >= team.len() && team.rows().iter().all(|r| y.rows().binary_search(r).is_ok() || z.rows().binary_search(r).is_ok());
            self.stats.covers += 1;
            return covered && self.node(a, &y) && self.node(b, &z);
        }
        let n = team.len();
        if n > 20 {
            self.exhausted = true;
            return false;
        }
        if self.accelerated() {
            // a first-order side is satisfied exactly by the subteams of its
            // satisfying rows, so the other side must cover the rest
            let nodes = self.nodes.clone();
            for (fo_side, other) in [(a, b), (b, a)] {
                if let Some(fo) = &nodes[fo_side].fo {
                    let sat = row_mask(fo, &nodes[fo_side].fv, team);
                    let must = full_mask(n) & !sat;
                    let free_rows = sat;
                    let mut sub = free_rows;
                    loop {
                        if !self.spend(|s| &mut s.covers, 1) {
                            return false;
                        }
                        if self.node(other, &team.subteam(must | sub)) {
                            return true;
                        }
                        if sub == 0 {
                            return false;
                        }
                        sub = (sub - 1) & free_rows;
                    }
                }
            }
        }
        // Y ⊨ a and Z ⊨ b with Y ∪ Z = X: tabulate both sides over all
        // subteams, close the right side under subsets, and look for Y whose
        // complement is covered.
        let size = 1usize << n;
        if !self.spend(|s| &mut s.subteams, 2 * size as u64) {
            return false;
        }
        let mut right = vec![false; size];
        for (mask, slot) in right.iter_mut().enumerate() {
            *slot = self.node(b, &team.subteam(mask as u64));
        }
        for bit in 0..n {
            for mask in 0..size {
                if mask >> bit & 1 == 0 && right[mask | 1 << bit] {
                    right[mask] = true;
                }
            }
        }
        let full = size - 1;
        for mask in 0..size {
            self.stats.covers += 1;
            if right[full & !mask] && self.node(a, &team.subteam(mask as u64)) {
                return true;
            }
            if self.exhausted {
                return false;
            }
        }
        false
    }

    /// Literal rule: rows that differ only in `v` yield the same extensions,
    /// so each class of such rows picks a nonempty set of values.
    fn exists(&mut self, v: &Var, body: usize, team: &Team) -> bool {
        let rest: Vec<Var> = team.vars().iter().filter(|w| *w != v).cloned().collect();
        let base = team_restrict(team, &rest).expect("subset of team variables");
        let d = self.model.size();
        let per_class = (1u64 << d) - 1;
        let classes = base.len();
        let Some(total) = per_class.checked_pow(classes as u32) else {
            self.exhausted = true;
            return false;
        };
        let mut vars = rest.clone();
        vars.push(v.clone());
        vars.sort();
        let pos = vars.iter().position(|w| w == v).expect("just inserted");
        for code in 0..total {
            if !self.spend(|s| &mut s.choice_functions, 1) {
                return false;
            }
            let mut c = code;
            let mut rows = Vec::new();
            for row in base.rows() {
                let set = c % per_class + 1;
                c /= per_class;
                for m in 0..d as Elem {
                    if set >> m & 1 == 1 {
                        let mut r = row.clone();
                        r.insert(pos, m);
                        rows.push(r);
                    }
                }
            }
            if self.node(body, &Team::from_sorted(vars.clone(), rows)) {
                return true;
            }
        }
        false
    }

    fn possibly(&mut self, body: usize, team: &Team) -> bool {
        let n = team.len();
        if n > 20 {
            self.exhausted = true;
            return false;
        }
        for mask in 1..1u64 << n {
            if !self.spend(|s| &mut s.subteams, 1) {
                return false;
            }
            if self.node(body, &team.subteam(mask)) {
                return true;
            }
        }
        false
    }

    /// Joint search over a block of existential quantifiers: a team over the
    /// block variables is any set of extensions containing at least one
    /// extension of every row.
    fn exists_block(&mut self, node: &Node, block: &Block, team: &Team) -> bool {
        let nodes = self.nodes.clone();
        if block.vars.is_empty() {
            return self.node(block.body, team);
        }
        let mut vars: Vec<Var> = team.vars().iter().chain(&block.vars).cloned().collect();
        vars.sort();
        let block_pos: Vec<usize> = block.vars.iter().map(|v| vars.iter().position(|w| w == v).expect("present")).collect();
        let old_pos: Vec<usize> = team.vars().iter().map(|v| vars.iter().position(|w| w == v).expect("present")).collect();
        let d = self.model.size();
        let tuples = crate::model::all_tuples(d, block.vars.len());
        let extend = |row: &[Elem], t: &[Elem]| {
            let mut r = vec![0; vars.len()];
            for (i, &p) in old_pos.iter().enumerate() {
                r[p] = row[i];
            }
            for (i, &p) in block_pos.iter().enumerate() {
                r[p] = t[i];
            }
            r
        };

        if self.options.pruning && node.upwards {
            let body = &nodes[block.body];
            let cols = columns(&body.fv, &vars);
            let mut rows = Vec::new();
            for row in team.rows() {
                let before = rows.len();
                for t in &tuples {
                    let r = extend(row, t);
                    if eval_row(&body.flat, &cols, &r) {
                        rows.push(r);
                    }
                }
                if rows.len() == before {
                    return false;
                }
            }
            self.stats.choice_functions += 1;
            return self.node(block.body, &Team::from_sorted(vars, rows));
        }

        // candidate extensions of each row under the first-order conjuncts
        let mut base: Vec<Vec<Vec<Elem>>> = Vec::with_capacity(team.len());
        for row in team.rows() {
            let mut c = Vec::new();
            'tuple: for t in &tuples {
                let r = extend(row, t);
                for conj in &block.conjuncts {
                    if let Conjunct::Fo(id) = conj {
                        let n = &nodes[*id];
                        if !eval_row(n.fo.as_ref().expect("first-order conjunct"), &columns(&n.fv, &vars), &r) {
                            continue 'tuple;
                        }
                    }
                }
                c.push(r);
            }
            if c.is_empty() {
                return false;
            }
            base.push(c);
        }
        // global values for constancy atoms over block variables
        let consts: Vec<Vec<usize>> = block
            .conjuncts
            .iter()
            .filter_map(|c| match c {
                Conjunct::ConstBlock(args) => Some(args.iter().map(|&i| block_pos[i]).collect()),
                _ => None,
            })
            .collect();
        let const_width: usize = consts.iter().map(Vec::len).sum();
        for fixed in crate::model::all_tuples(d, const_width) {
            let mut cands = base.clone();
            for rows in cands.iter_mut() {
                rows.retain(|r| {
                    let mut k = 0;
                    consts.iter().all(|cols| {
                        cols.iter().all(|&c| {
                            let ok = r[c] == fixed[k];
                            k += 1;
                            ok
                        })
                    })
                });
            }
            if cands.iter().any(Vec::is_empty) {
                continue;
            }
            if cands.iter().any(|c| c.len() > 16) {
                self.exhausted = true;
                return false;
            }
            if self.search_rows(block, &vars, &cands, 0, &mut Vec::new()) {
                return true;
            }
            if self.exhausted {
                return false;
            }
        }
        false
    }

    fn search_rows(&mut self, block: &Block, vars: &[Var], cands: &[Vec<Vec<Elem>>], i: usize, chosen: &mut Vec<Vec<Elem>>) -> bool {
        let nodes = self.nodes.clone();
        if i == cands.len() {
            if !self.spend(|s| &mut s.choice_functions, 1) {
                return false;
            }
            let team = Team::from_sorted(vars.to_vec(), chosen.clone());
            return block.conjuncts.iter().all(|c| match c {
                Conjunct::Other(id) => self.node(*id, &team),
                _ => true,
            });
        }
        let options = &cands[i];
        for mask in 1..1u32 << options.len() {
            let before = chosen.len();
            chosen.extend(options.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, r)| r.clone()));
            let partial_ok = block.conjuncts.iter().all(|c| match c {
                Conjunct::Down(id) => {
                    let Kind::Atom(def, call) = &nodes[*id].kind else { unreachable!("downwards conjuncts are atoms") };
                    let cols = columns(&call.args(), vars);
                    let rel = chosen.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
                    def.holds(call, &rel, self.model.size())
                }
                _ => true,
            });
            if partial_ok && self.search_rows(block, vars, cands, i + 1, chosen) {
                return true;
            }
            chosen.truncate(before);
            if self.exhausted {
                return false;
            }
        }
        false
    }

    /// A trace of the first satisfying branch: the cover chosen for every
    /// disjunction and the supplement chosen for every quantifier.
    pub fn explain(&mut self, team: &Team) -> Result<Vec<String>, EvalError> {
        let verdict = self.eval(team)?;
        let mut out = vec![format!("{} on {}: {}", self.formula(), show_team(self.model, team), verdict)];
        if verdict {
            self.trace(self.root, team, 1, &mut out);
        }
        Ok(out)
    }

    fn trace(&mut self, id: usize, team: &Team, depth: usize, out: &mut Vec<String>) {
        let nodes = self.nodes.clone();
        let node = &nodes[id];
        let pad = "  ".repeat(depth);
        let show = |t: &Team| show_team(self.model, t);
        match &node.kind {
            Kind::Or(a, b) => {
                let n = team.len();
                for code in 0..3u64.pow(n as u32) {
                    let (mut y, mut z, mut c) = (0u64, 0u64, code);
                    for i in 0..n {
                        match c % 3 {
                            0 => y |= 1 << i,
                            1 => z |= 1 << i,
                            _ => {
                                y |= 1 << i;
                                z |= 1 << i;
                            }
                        }
                        c /= 3;
                    }
                    let (ty, tz) = (team.subteam(y), team.subteam(z));
                    if self.node(*a, &ty) && self.node(*b, &tz) {
                        out.push(format!("{pad}split {}: left {} | right {}", node.formula, show(&ty), show(&tz)));
                        self.trace(*a, &ty, depth + 1, out);
                        self.trace(*b, &tz, depth + 1, out);
                        return;
                    }
                }
            }
            Kind::And(a, b) => {
                self.trace(*a, team, depth, out);
                self.trace(*b, team, depth, out);
            }
            Kind::Exists(v, body) => {
                let rest: Vec<Var> = team.vars().iter().filter(|w| *w != v).cloned().collect();
                let base = team_restrict(team, &rest).expect("subset");
                let d = self.model.size();
                let per_class = (1u64 << d) - 1;
                let Some(total) = per_class.checked_pow(base.len() as u32) else { return };
                for code in 0..total.min(1 << 22) {
                    let mut c = code;
                    let mut h = Vec::new();
                    for _ in base.rows() {
                        let set = c % per_class + 1;
                        c /= per_class;
                        h.push((0..d as Elem).filter(|m| set >> m & 1 == 1).map(|m| vec![m]).collect());
                    }
                    let sup = crate::model::supplement(&base, &h, std::slice::from_ref(v)).expect("total nonempty choice");
                    if self.node(*body, &sup) {
                        out.push(format!("{pad}choose {v}: {}", show(&sup)));
                        self.trace(*body, &sup, depth + 1, out);
                        return;
                    }
                }
                out.push(format!("{pad}choose {v}: (search space too large to trace)"));
            }
            Kind::Forall(v, body) => {
                let dup = duplicate(team, v, self.model);
                out.push(format!("{pad}all {v}: {}", show(&dup)));
                self.trace(*body, &dup, depth + 1, out);
            }
            Kind::Possibly(body) => {
                for mask in 1..1u64 << team.len().min(20) {
                    let y = team.subteam(mask);
                    if self.node(*body, &y) {
                        out.push(format!("{pad}possible on {}", show(&y)));
                        self.trace(*body, &y, depth + 1, out);
                        return;
                    }
                }
            }
            Kind::Restricted(body, theta, fv) => {
                let part = filter_rows(theta, fv, team, true);
                out.push(format!("{pad}restrict to {}", show(&part)));
                self.trace(*body, &part, depth + 1, out);
            }
            Kind::Literal | Kind::Atom(..) => out.push(format!("{pad}{} holds on {}", node.formula, show(team))),
        }
    }
}

pub fn show_team(model: &Model, team: &Team) -> String {
    let rows: Vec<String> = team
        .rows()
        .iter()
        .map(|r| {
            let parts: Vec<String> = team.vars().iter().zip(r).map(|(v, &e)| format!("{v}:{}", model.element_name(e))).collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    format!("[{}]", rows.join(" "))
}

fn columns(vars: &[Var], team_vars: &[Var]) -> Vec<usize> {
    vars.iter().map(|v| team_vars.iter().position(|w| w == v).expect("variable in team")).collect()
}

fn eval_row(prog: &CompiledFo, cols: &[usize], row: &[Elem]) -> bool {
    let mut env: Vec<Elem> = cols.iter().map(|&c| row[c]).collect();
    prog.eval(&mut env, &[])
}

fn row_mask(prog: &CompiledFo, fv: &[Var], team: &Team) -> u64 {
    let cols = columns(fv, team.vars());
    team.rows().iter().enumerate().filter(|(_, r)| eval_row(prog, &cols, r)).fold(0, |m, (i, _)| m | 1 << i)
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn all_rows(prog: &CompiledFo, fv: &[Var], team: &Team) -> bool {
    let cols = columns(fv, team.vars());
    team.rows().iter().all(|r| eval_row(prog, &cols, r))
}

fn filter_rows(prog: &CompiledFo, fv: &[Var], team: &Team, keep: bool) -> Team {
    let cols = columns(fv, team.vars());
    team.filter(|_, r| eval_row(prog, &cols, r) == keep)
}

fn prepare<'a>(phi: &Formula, model: &Model, registry: &'a AtomRegistry, nodes: &mut Vec<Node<'a>>) -> Result<usize, EvalError> {
    let fv: Vec<Var> = free_variables(phi).into_iter().collect();
    let compile = |f: &Formula, vars: &[Var]| CompiledFo::compile(f, model, vars, &[]).map(Rc::new);
    let (kind, upwards) = match phi {
        Formula::Top | Formula::Bottom | Formula::Rel { .. } | Formula::Eq { .. } => (Kind::Literal, true),
        Formula::Dep(call) => {
            let def = registry.lookup(call)?;
            def.shape.validate(call).map_err(|message| AtomError::Shape { name: call.name.clone(), message })?;
            (Kind::Atom(def, call.clone()), def.upwards_closed && !def.unchecked)
        }
        Formula::Or(a, b) | Formula::And(a, b) => {
            let (ia, ib) = (prepare(a, model, registry, nodes)?, prepare(b, model, registry, nodes)?);
            let up = nodes[ia].upwards && nodes[ib].upwards;
            (if matches!(phi, Formula::Or(..)) { Kind::Or(ia, ib) } else { Kind::And(ia, ib) }, up)
        }
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            let ia = prepare(a, model, registry, nodes)?;
            let up = nodes[ia].upwards;
            (if matches!(phi, Formula::Exists(..)) { Kind::Exists(v.clone(), ia) } else { Kind::Forall(v.clone(), ia) }, up)
        }
        Formula::Possibly(a) => {
            let ia = prepare(a, model, registry, nodes)?;
            (Kind::Possibly(ia), true)
        }
        Formula::RestrictedBy(a, theta) => {
            let ia = prepare(a, model, registry, nodes)?;
            let theta_fv: Vec<Var> = free_variables(theta).into_iter().collect();
            (Kind::Restricted(ia, compile(theta, &theta_fv)?, theta_fv), nodes[ia].upwards)
        }
    };
    let fo = if is_first_order(phi) { Some(compile(phi, &fv)?) } else { None };
    let flat = compile(&flatten(phi), &fv)?;
    let mut node = Node { kind, formula: phi.clone(), fv, fo, flat, upwards, block: None };
    if let Kind::Exists(..) = node.kind {
        node.block = Some(block_of(phi, nodes));
    }
    nodes.push(node);
    Ok(nodes.len() - 1)
}

/// Collects the maximal run of existential quantifiers over distinct
/// variables starting at `phi` and classifies the conjuncts of its body.
/// Children are already prepared, so node ids are found by walking down.
fn block_of(phi: &Formula, nodes: &[Node]) -> Block {
    let mut vars = Vec::new();
    let mut f = phi;
    while let Formula::Exists(v, body) = f {
        if vars.contains(v) {
            break;
        }
        vars.push(v.clone());
        f = body;
    }
    // the body is the most recently prepared node with this formula
    let body = nodes.iter().rposition(|n| &n.formula == f).expect("body prepared");
    let body_fv: BTreeSet<&Var> = nodes[body].fv.iter().collect();
    vars.retain(|v| body_fv.contains(v));
    let mut conjuncts = Vec::new();
    collect_conjuncts(body, nodes, &vars, &mut conjuncts);
    Block { vars, body, conjuncts }
}

fn collect_conjuncts(id: usize, nodes: &[Node], block: &[Var], out: &mut Vec<Conjunct>) {
    let node = &nodes[id];
    if node.fo.is_some() {
        out.push(Conjunct::Fo(id));
        return;
    }
    match &node.kind {
        Kind::And(a, b) => {
            collect_conjuncts(*a, nodes, block, out);
            collect_conjuncts(*b, nodes, block, out);
        }
        Kind::Atom(def, call) if def.is_builtin(Builtin::Const) && call.args().iter().all(|v| block.contains(v)) => {
            out.push(Conjunct::ConstBlock(call.args().iter().map(|v| block.iter().position(|b| b == v).expect("block var")).collect()));
        }
        Kind::Atom(def, _) if def.downwards_closed && !def.unchecked => out.push(Conjunct::Down(id)),
        _ => out.push(Conjunct::Other(id)),
    }
}

/// `M ⊨_X φ` with the built-in atoms and default options.
pub fn eval(model: &Model, team: &Team, phi: &Formula) -> Result<bool, EvalError> {
    Evaluator::new(model, AtomRegistry::builtin_ref(), phi, EvalOptions::default())?.eval(team)
}

/// `M ⊨_{{∅}} φ` for a sentence.
pub fn sentence_true(model: &Model, registry: &AtomRegistry, phi: &Formula, options: EvalOptions) -> Result<bool, EvalError> {
    if !free_variables(phi).is_empty() {
        return Err(EvalError::NotSentence(phi.to_string()));
    }
    Evaluator::new(model, registry, phi, options)?.eval(&Team::unit())
}

/// Verdict plus the work counters of a single evaluation.
pub fn eval_with_stats(model: &Model, registry: &AtomRegistry, team: &Team, phi: &Formula, options: EvalOptions) -> Result<(bool, EvalStats), EvalError> {
    let mut ev = Evaluator::new(model, registry, phi, options)?;
    let v = ev.eval(team)?;
    Ok((v, ev.stats()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, vars};

    fn model_p() -> Model {
        Model::with_size(2).unwrap().with_relation("P", 1, &[&["a"]]).unwrap()
    }

    fn both(model: &Model, team: &Team, src: &str) -> bool {
        let phi = parse(src).unwrap();
        let reg = AtomRegistry::builtin_ref();
        let r = Evaluator::new(model, reg, &phi, EvalOptions::oracle()).unwrap().eval(team).unwrap();
        for opts in [EvalOptions::accelerated_unpruned(), EvalOptions::default()] {
            assert_eq!(Evaluator::new(model, reg, &phi, opts).unwrap().eval(team).unwrap(), r, "{src} with {opts:?}");
        }
        r
    }

    #[test]
    fn sentences_on_the_unit_team() {
        let m = model_p();
        let unit = Team::unit();
        assert!(both(&m, &unit, "E x. E y. x != y"));
        assert!(both(&m, &unit, "NE"));
        assert!(both(&m, &unit, "A x. total(x)"));
        assert!(both(&m, &unit, "E x. P(x)"));
        assert!(!both(&m, &unit, "A x. P(x)"));
    }

    #[test]
    fn empty_team_follows_the_rules() {
        let m = model_p();
        let empty = Team::empty(vars(&["x"]));
        assert!(!both(&m, &empty, "NE"));
        assert!(both(&m, &empty, "P(x) /\\ !P(x)"));
        assert!(both(&m, &empty, "dep(x;x)"));
        assert!(!both(&m, &empty, "poss(T)"));
    }

    #[test]
    fn disjunction_splits_the_team() {
        let m = model_p();
        let x = Team::new(vars(&["x"]), vec![vec![0], vec![1]]).unwrap();
        assert!(both(&m, &x, "P(x) \\/ !P(x)"));
        assert!(!both(&m, &x, "P(x) \\/ NE /\\ P(x)"));
        assert!(both(&m, &x, "(P(x) /\\ NE) \\/ (!P(x) /\\ NE)"));
        assert!(!both(&m, &x, "const(x) \\/ F"));
        assert!(both(&m, &x, "const(x) \\/ const(x)"));
    }

    #[test]
    fn existential_choice() {
        let m = model_p();
        let x = Team::new(vars(&["x"]), vec![vec![0], vec![1]]).unwrap();
        assert!(both(&m, &x, "E y. (const(y) /\\ P(y))"));
        assert!(!both(&m, &x, "E y. (dep(y;x) /\\ x != y) /\\ F"));
        assert!(both(&m, &x, "E y. (x != y /\\ inconst(y))"));
        assert!(!both(&m, &x, "E y. (x != y /\\ const(y))"));
        assert!(!both(&m, &x, "E y. E z. (y != z /\\ const(y) /\\ total(z))"));
        assert!(both(&m, &x, "E y. E z. (y != x /\\ const(z) /\\ total(y))"));
    }

    #[test]
    fn inclusion_and_its_negation() {
        let m = Model::with_size(2).unwrap();
        let x = Team::new(vars(&["x", "y"]), vec![vec![0, 0], vec![1, 0]]).unwrap();
        // X(x) = {a, b} and X(y) = {a}
        assert!(!both(&m, &x, "incl(x;y)"));
        assert!(both(&m, &x, "incl(y;x)"));
        assert!(!both(&m, &x, "incl(x;y) /\\ nonincl(y;x)"));
        assert!(both(&m, &x, "nonincl(x;y)"));
    }

    #[test]
    fn restriction_and_possibility() {
        let m = model_p();
        let x = Team::new(vars(&["x"]), vec![vec![0], vec![1]]).unwrap();
        assert!(!both(&m, &x, "restrict(NE ; x != x)"));
        assert!(both(&m, &x, "restrict(const(x) ; P(x))"));
        assert!(both(&m, &x, "poss(P(x))"));
        assert!(!both(&m, &x, "poss(P(x) /\\ !P(x))"));
    }

    #[test]
    fn stats_count_work() {
        let m = model_p();
        let x = Team::new(vars(&["x"]), vec![vec![0], vec![1]]).unwrap();
        let reg = AtomRegistry::builtin_ref();
        let (v, s) = eval_with_stats(&m, reg, &x, &parse("P(x) \\/ T").unwrap(), EvalOptions::oracle()).unwrap();
        assert!(v);
        assert!(s.covers <= 9);
        let (_, s) = eval_with_stats(&m, reg, &x, &parse("P(x)").unwrap(), EvalOptions::oracle()).unwrap();
        assert_eq!(s.covers, 0);
    }

    #[test]
    fn budget_is_enforced() {
        let m = Model::with_size(3).unwrap();
        let x = Team::new(vars(&["x"]), vec![vec![0], vec![1], vec![2]]).unwrap();
        let phi = parse("E y. E z. (NE \\/ y = z) /\\ F").unwrap();
        let mut ev = Evaluator::new(&m, AtomRegistry::builtin_ref(), &phi, EvalOptions::oracle().with_budget(10)).unwrap();
        assert!(matches!(ev.eval(&x), Err(EvalError::BudgetExceeded(_))));
    }

    #[test]
    fn missing_free_variable_is_an_error() {
        let m = model_p();
        let phi = parse("P(y)").unwrap();
        let mut ev = Evaluator::new(&m, AtomRegistry::builtin_ref(), &phi, EvalOptions::oracle()).unwrap();
        assert_eq!(ev.eval(&Team::unit()), Err(EvalError::FreeVariable(Var::new("y"))));
    }

    #[test]
    fn explain_reports_a_split() {
        let m = model_p();
        let x = Team::new(vars(&["x"]), vec![vec![0], vec![1]]).unwrap();
        let phi = parse("P(x) \\/ !P(x)").unwrap();
        let mut ev = Evaluator::new(&m, AtomRegistry::builtin_ref(), &phi, EvalOptions::oracle()).unwrap();
        let lines = ev.explain(&x).unwrap();
        assert!(lines[1].contains("split"), "{lines:?}");
    }
}
