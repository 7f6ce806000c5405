//! Finite structures, teams, and the team algebra.

use crate::syntax::{is_first_order, Formula, Term, Var};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

/// Domain elements are indices into [`Model::domain`].
pub type Elem = u32;

/// A set of tuples; the relation `X(x)` induced by a team, or a table of a model.
pub type TupleSet = BTreeSet<Vec<Elem>>;

pub type Assignment = BTreeMap<Var, Elem>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("a model needs at least two elements, got {0}")]
    DomainTooSmall(usize),
    #[error("duplicate domain element `{0}`")]
    DuplicateElement(String),
    #[error("unknown domain element `{0}`")]
    UnknownElement(String),
    #[error("element index {0} is outside the domain")]
    ElementOutOfRange(Elem),
    #[error("relation `{name}` has arity {arity} but a tuple of width {width}")]
    TupleWidth { name: String, arity: usize, width: usize },
    #[error("relation `{name}` is used with arity {used} but declared with arity {declared}")]
    ArityMismatch { name: String, used: usize, declared: usize },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("variable `{0}` is not in the team's domain")]
    UnknownVariable(Var),
    #[error("variable `{0}` is unbound")]
    UnboundVariable(Var),
    #[error("variable `{0}` occurs twice in a variable tuple")]
    DuplicateVariable(Var),
    #[error("team row has width {width}, expected {expected}")]
    RowWidth { width: usize, expected: usize },
    #[error("choice function is not total: {got} values for {rows} assignments")]
    ChoiceNotTotal { got: usize, rows: usize },
    #[error("choice function assigns an empty set to assignment {0}")]
    EmptyChoice(usize),
    #[error("choice functions need a positive width")]
    ZeroWidth,
    #[error("choice space too large: {0} candidate tuples per assignment")]
    ChoiceSpaceTooLarge(usize),
    #[error("not a first-order formula: {0}")]
    NotFirstOrder(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    pub arity: usize,
    pub tuples: TupleSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Model {
    domain: Vec<String>,
    relations: BTreeMap<String, Relation>,
    constants: BTreeMap<String, Elem>,
}

impl Model {
    pub fn new<S: Into<String>>(domain: impl IntoIterator<Item = S>) -> Result<Self, ModelError> {
        let domain: Vec<String> = domain.into_iter().map(Into::into).collect();
        if domain.len() < 2 {
            return Err(ModelError::DomainTooSmall(domain.len()));
        }
        let mut seen = BTreeSet::new();
        for d in &domain {
            if !seen.insert(d) {
                return Err(ModelError::DuplicateElement(d.clone()));
            }
        }
        Ok(Model { domain, relations: BTreeMap::new(), constants: BTreeMap::new() })
    }

    /// A model on `n` elements named `a, b, c, ...` (then `e26, e27, ...`).
    pub fn with_size(n: usize) -> Result<Self, ModelError> {
        Model::new((0..n).map(element_label))
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.domain.len() as Elem
    }

    pub fn element(&self, name: &str) -> Option<Elem> {
        self.domain.iter().position(|d| d == name).map(|i| i as Elem)
    }

    pub fn element_name(&self, e: Elem) -> &str {
        &self.domain[e as usize]
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn constants(&self) -> &BTreeMap<String, Elem> {
        &self.constants
    }

    pub fn constant(&self, name: &str) -> Option<Elem> {
        self.constants.get(name).copied()
    }

    pub fn add_relation(&mut self, name: impl Into<String>, arity: usize, tuples: impl IntoIterator<Item = Vec<Elem>>) -> Result<(), ModelError> {
        let name = name.into();
        let mut set = TupleSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(ModelError::TupleWidth { name, arity, width: t.len() });
            }
            if let Some(&e) = t.iter().find(|&&e| e as usize >= self.domain.len()) {
                return Err(ModelError::ElementOutOfRange(e));
            }
            set.insert(t);
        }
        self.relations.insert(name, Relation { arity, tuples: set });
        Ok(())
    }

    /// Adds a relation given by element names.
    pub fn with_relation(mut self, name: &str, arity: usize, tuples: &[&[&str]]) -> Result<Self, ModelError> {
        let rows = tuples
            .iter()
            .map(|t| t.iter().map(|n| self.element(n).ok_or_else(|| ModelError::UnknownElement(n.to_string()))).collect())
            .collect::<Result<Vec<Vec<Elem>>, _>>()?;
        self.add_relation(name, arity, rows)?;
        Ok(self)
    }

    pub fn set_constant(&mut self, name: impl Into<String>, e: Elem) -> Result<(), ModelError> {
        if e as usize >= self.domain.len() {
            return Err(ModelError::ElementOutOfRange(e));
        }
        self.constants.insert(name.into(), e);
        Ok(())
    }

    /// The isomorphic copy obtained by sending element `e` to `perm[e]`.
    pub fn permuted(&self, perm: &[Elem]) -> Model {
        let mut domain = self.domain.clone();
        for (i, &p) in perm.iter().enumerate() {
            domain[p as usize] = self.domain[i].clone();
        }
        let relations = self
            .relations
            .iter()
            .map(|(n, r)| (n.clone(), Relation { arity: r.arity, tuples: r.tuples.iter().map(|t| permute_tuple(t, perm)).collect() }))
            .collect();
        let constants = self.constants.iter().map(|(n, &e)| (n.clone(), perm[e as usize])).collect();
        Model { domain, relations, constants }
    }

    /// Checks that every relation and constant of `phi` is interpreted with
    /// the right arity.
    pub fn check_signature(&self, phi: &Formula) -> Result<(), ModelError> {
        for (name, used) in phi.relation_symbols() {
            let rel = self.relation(&name).ok_or_else(|| ModelError::UnknownRelation(name.clone()))?;
            if rel.arity != used {
                return Err(ModelError::ArityMismatch { name, used, declared: rel.arity });
            }
        }
        for c in phi.constant_symbols() {
            if self.constant(&c).is_none() {
                return Err(ModelError::UnknownConstant(c));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let mut m = Model::new(file.domain)?;
        for (name, c) in file.constants {
            let e = m.element(&c).ok_or(ModelError::UnknownElement(c))?;
            m.set_constant(name, e)?;
        }
        for (name, r) in file.relations {
            let rows = r
                .tuples
                .iter()
                .map(|t| t.iter().map(|n| m.element(n).ok_or_else(|| ModelError::UnknownElement(n.clone()))).collect())
                .collect::<Result<Vec<Vec<Elem>>, _>>()?;
            m.add_relation(name, r.arity, rows)?;
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let name = |e: &Elem| self.domain[*e as usize].clone();
        let file = ModelFile {
            domain: self.domain.clone(),
            constants: self.constants.iter().map(|(n, e)| (n.clone(), name(e))).collect(),
            relations: self
                .relations
                .iter()
                .map(|(n, r)| (n.clone(), RelationFile { arity: r.arity, tuples: r.tuples.iter().map(|t| t.iter().map(name).collect()).collect() }))
                .collect(),
        };
        serde_json::to_string(&file).expect("model serializes")
    }
}

fn permute_tuple(t: &[Elem], perm: &[Elem]) -> Vec<Elem> {
    t.iter().map(|&e| perm[e as usize]).collect()
}

/// Canonical element names: `a` through `z`, then `e26`, `e27`, ...
pub fn element_label(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("e{i}")
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    domain: Vec<String>,
    #[serde(default)]
    constants: BTreeMap<String, String>,
    #[serde(default)]
    relations: BTreeMap<String, RelationFile>,
}

#[derive(Serialize, Deserialize)]
struct RelationFile {
    arity: usize,
    tuples: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct TeamFile {
    vars: Vec<Var>,
    rows: Vec<Vec<String>>,
}

/// A finite set of assignments with a common variable domain.
///
/// Variables are kept sorted and rows sorted without duplicates, so equal
/// teams have equal representations. The empty team (no rows) and the unit
/// team `{∅}` (no variables, one empty row) are distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Team {
    vars: Vec<Var>,
    rows: Vec<Vec<Elem>>,
}

impl Team {
    pub fn new(vars: Vec<Var>, rows: Vec<Vec<Elem>>) -> Result<Self, ModelError> {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&a, &b| vars[a].cmp(&vars[b]));
        for w in order.windows(2) {
            if vars[w[0]] == vars[w[1]] {
                return Err(ModelError::DuplicateVariable(vars[w[0]].clone()));
            }
        }
        for r in &rows {
            if r.len() != vars.len() {
                return Err(ModelError::RowWidth { width: r.len(), expected: vars.len() });
            }
        }
        let sorted_vars = order.iter().map(|&i| vars[i].clone()).collect();
        let rows = rows.into_iter().map(|r| order.iter().map(|&i| r[i]).collect()).collect();
        Ok(Team::from_sorted(sorted_vars, rows))
    }

    /// Builds a team from already sorted variables; rows are normalized.
    pub(crate) fn from_sorted(vars: Vec<Var>, mut rows: Vec<Vec<Elem>>) -> Self {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        rows.sort_unstable();
        rows.dedup();
        Team { vars, rows }
    }

    /// The empty team over `vars`.
    pub fn empty(vars: Vec<Var>) -> Self {
        Team::new(vars, vec![]).expect("distinct variables")
    }

    /// The team `{∅}` containing only the empty assignment.
    pub fn unit() -> Self {
        Team { vars: vec![], rows: vec![vec![]] }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rows(&self) -> &[Vec<Elem>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, v: &Var) -> Option<usize> {
        self.vars.binary_search(v).ok()
    }

    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.rows.iter().map(|r| self.vars.iter().cloned().zip(r.iter().copied()).collect())
    }

    /// The subteam of rows whose index satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(usize, &[Elem]) -> bool) -> Team {
        let rows = self.rows.iter().enumerate().filter(|(i, r)| keep(*i, r)).map(|(_, r)| r.clone()).collect();
        Team { vars: self.vars.clone(), rows }
    }

    /// The subteam selected by the bits of `mask` (row `i` kept iff bit `i` set).
    pub fn subteam(&self, mask: u64) -> Team {
        self.filter(|i, _| mask >> i & 1 == 1)
    }

    pub fn is_subteam_of(&self, other: &Team) -> bool {
        self.vars == other.vars && self.rows.iter().all(|r| other.rows.binary_search(r).is_ok())
    }

    pub fn permuted(&self, perm: &[Elem]) -> Team {
        Team::from_sorted(self.vars.clone(), self.rows.iter().map(|r| permute_tuple(r, perm)).collect())
    }

    fn columns(&self, vars: &[Var]) -> Result<Vec<usize>, ModelError> {
        vars.iter().map(|v| self.column(v).ok_or_else(|| ModelError::UnknownVariable(v.clone()))).collect()
    }

    pub fn from_json(model: &Model, text: &str) -> Result<Self, ModelError> {
        let file: TeamFile = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let rows = file
            .rows
            .iter()
            .map(|r| r.iter().map(|n| model.element(n).ok_or_else(|| ModelError::UnknownElement(n.clone()))).collect())
            .collect::<Result<Vec<Vec<Elem>>, _>>()?;
        Team::new(file.vars, rows)
    }

    pub fn to_json(&self, model: &Model) -> String {
        let file = TeamFile {
            vars: self.vars.clone(),
            rows: self.rows.iter().map(|r| r.iter().map(|&e| model.element_name(e).to_string()).collect()).collect(),
        };
        serde_json::to_string(&file).expect("team serializes")
    }
}

/// `X ↾ v`: assignments restricted to `vars`, duplicates merged.
pub fn team_restrict(team: &Team, vars: &[Var]) -> Result<Team, ModelError> {
    let mut keep: Vec<Var> = vars.to_vec();
    keep.sort();
    keep.dedup();
    let cols = team.columns(&keep)?;
    Ok(Team::from_sorted(keep, team.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect()))
}

/// `X(x)`: the relation `{s(x) : s ∈ X}`; repetitions in `tuple` allowed.
pub fn team_project(team: &Team, tuple: &[Var]) -> Result<TupleSet, ModelError> {
    let cols = team.columns(tuple)?;
    Ok(team.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect())
}

/// `X[M/v]`, overwriting `v` if the team already has it.
pub fn duplicate(team: &Team, v: &Var, model: &Model) -> Team {
    let all: Vec<Vec<Elem>> = model.elements().map(|e| vec![e]).collect();
    let choice = vec![all; team.len()];
    supplement(team, &choice, std::slice::from_ref(v)).expect("full choice is total and nonempty")
}

/// A choice function: for the `i`-th row of the team, a nonempty set of
/// value tuples.
pub type ChoiceFunction = Vec<Vec<Vec<Elem>>>;

/// `X[H/v]`: every row extended (or overwritten) by each tuple chosen for it.
pub fn supplement(team: &Team, h: &ChoiceFunction, new_vars: &[Var]) -> Result<Team, ModelError> {
    if h.len() != team.len() {
        return Err(ModelError::ChoiceNotTotal { got: h.len(), rows: team.len() });
    }
    let mut seen = BTreeSet::new();
    for v in new_vars {
        if !seen.insert(v) {
            return Err(ModelError::DuplicateVariable(v.clone()));
        }
    }
    let mut vars: Vec<Var> = team.vars.iter().filter(|v| !new_vars.contains(v)).cloned().collect();
    vars.extend(new_vars.iter().cloned());
    vars.sort();
    // for each output column: Ok(old column) or Err(index into the chosen tuple)
    let sources: Vec<Result<usize, usize>> = vars
        .iter()
        .map(|v| match new_vars.iter().position(|n| n == v) {
            Some(k) => Err(k),
            None => Ok(team.column(v).expect("kept variable")),
        })
        .collect();
    let mut rows = Vec::new();
    for (i, (row, choices)) in team.rows.iter().zip(h).enumerate() {
        if choices.is_empty() {
            return Err(ModelError::EmptyChoice(i));
        }
        for m in choices {
            if m.len() != new_vars.len() {
                return Err(ModelError::RowWidth { width: m.len(), expected: new_vars.len() });
            }
            rows.push(sources.iter().map(|s| match s {
                Ok(c) => row[*c],
                Err(k) => m[*k],
            }).collect());
        }
    }
    Ok(Team::from_sorted(vars, rows))
}

/// Every ordered pair `(Y, Z)` of subteams with `Y ∪ Z = X`: each row goes to
/// `Y` only, `Z` only, or both, giving `3^|X|` pairs.
pub fn enumerate_covers(team: &Team) -> impl Iterator<Item = (Team, Team)> + '_ {
    let n = team.len() as u32;
    (0..3u64.pow(n)).map(move |mut code| {
        let (mut y, mut z) = (Vec::new(), Vec::new());
        for row in &team.rows {
            match code % 3 {
                0 => y.push(row.clone()),
                1 => z.push(row.clone()),
                _ => {
                    y.push(row.clone());
                    z.push(row.clone());
                }
            }
            code /= 3;
        }
        (Team { vars: team.vars.clone(), rows: y }, Team { vars: team.vars.clone(), rows: z })
    })
}

/// All tuples over the model's domain of the given width, in lexicographic order.
pub fn all_tuples(domain_size: usize, width: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![vec![]];
    for _ in 0..width {
        out = out
            .into_iter()
            .flat_map(|t| (0..domain_size as Elem).map(move |e| {
                let mut t = t.clone();
                t.push(e);
                t
            }))
            .collect();
    }
    out
}

/// Every choice function `H: X → P(M^width) \ {∅}`; there are
/// `(2^(|M|^width) - 1)^|X|` of them.
pub fn enumerate_choice_functions(team: &Team, width: usize, model: &Model) -> Result<impl Iterator<Item = ChoiceFunction>, ModelError> {
    if width == 0 {
        return Err(ModelError::ZeroWidth);
    }
    let tuples = all_tuples(model.size(), width);
    if tuples.len() > 20 {
        return Err(ModelError::ChoiceSpaceTooLarge(tuples.len()));
    }
    let per_row = (1u64 << tuples.len()) - 1;
    let rows = team.len();
    let total = per_row.checked_pow(rows as u32).ok_or(ModelError::ChoiceSpaceTooLarge(tuples.len()))?;
    Ok((0..total).map(move |mut code| {
        (0..rows)
            .map(|_| {
                let mask = code % per_row + 1;
                code /= per_row;
                tuples.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()).collect()
            })
            .collect()
    }))
}

/// Tarski truth of a first-order formula under a single assignment.
pub fn tarski_eval(model: &Model, s: &Assignment, theta: &Formula) -> Result<bool, ModelError> {
    let free: Vec<Var> = s.keys().cloned().collect();
    let prog = CompiledFo::compile(theta, model, &free, &[])?;
    let mut env: Vec<Elem> = s.values().copied().collect();
    Ok(prog.eval(&mut env, &[]))
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Const(Elem),
}

#[derive(Debug, Clone)]
enum Node {
    True,
    False,
    Rel { positive: bool, rel: usize, args: Vec<Slot> },
    Eq { positive: bool, left: Slot, right: Slot },
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    Forall(usize, Box<Node>),
}

/// A relation table indexed densely by tuple code.
#[derive(Debug, Clone)]
pub struct DenseRelation {
    arity: usize,
    base: usize,
    bits: Vec<bool>,
}

impl DenseRelation {
    pub fn new(domain_size: usize, arity: usize, tuples: &TupleSet) -> Self {
        let mut bits = vec![false; domain_size.pow(arity as u32)];
        for t in tuples {
            bits[code(domain_size, t.iter().copied())] = true;
        }
        DenseRelation { arity, base: domain_size, bits }
    }

    #[inline]
    fn contains(&self, tuple: impl Iterator<Item = Elem>) -> bool {
        self.bits[code(self.base, tuple)]
    }
}

#[inline]
fn code(base: usize, tuple: impl Iterator<Item = Elem>) -> usize {
    tuple.fold(0, |acc, e| acc * base + e as usize)
}

/// A first-order formula compiled against a model: relation symbols resolved
/// to tables, variables to environment slots.
///
/// Free variables occupy slots `0..free.len()` in the given order. Relations
/// named in `external` are not looked up in the model; their tables are
/// supplied per call to [`CompiledFo::eval`], in the same order.
#[derive(Debug, Clone)]
pub struct CompiledFo {
    root: Node,
    slots: usize,
    tables: Vec<DenseRelation>,
    n_free: usize,
    domain: usize,
}

impl CompiledFo {
    pub fn compile(theta: &Formula, model: &Model, free: &[Var], external: &[(&str, usize)]) -> Result<Self, ModelError> {
        if !is_first_order(theta) {
            return Err(ModelError::NotFirstOrder(theta.to_string()));
        }
        let mut c = Compiler { model, external, scope: free.iter().cloned().zip(0..).collect(), slots: free.len(), tables: Vec::new(), table_index: HashMap::new() };
        let root = c.node(theta)?;
        Ok(CompiledFo { root, slots: c.slots, tables: c.tables, n_free: free.len(), domain: model.size() })
    }

    /// Evaluates with `env[..free.len()]` holding the free variables' values.
    pub fn eval(&self, env: &mut Vec<Elem>, external: &[&DenseRelation]) -> bool {
        debug_assert!(env.len() >= self.n_free);
        env.resize(self.slots, 0);
        self.eval_node(&self.root, env, external)
    }

    fn table<'a>(&'a self, rel: usize, external: &'a [&'a DenseRelation]) -> &'a DenseRelation {
        if rel < external.len() {
            external[rel]
        } else {
            &self.tables[rel - external.len()]
        }
    }

    fn eval_node(&self, node: &Node, env: &mut [Elem], external: &[&DenseRelation]) -> bool {
        let get = |s: &Slot, env: &[Elem]| match *s {
            Slot::Var(i) => env[i],
            Slot::Const(e) => e,
        };
        match node {
            Node::True => true,
            Node::False => false,
            Node::Rel { positive, rel, args } => {
                let t = self.table(*rel, external);
                debug_assert_eq!(t.arity, args.len());
                t.contains(args.iter().map(|a| get(a, env))) == *positive
            }
            Node::Eq { positive, left, right } => (get(left, env) == get(right, env)) == *positive,
            Node::And(a, b) => self.eval_node(a, env, external) && self.eval_node(b, env, external),
            Node::Or(a, b) => self.eval_node(a, env, external) || self.eval_node(b, env, external),
            Node::Exists(slot, body) => {
                let size = self.domain;
                (0..size as Elem).any(|e| {
                    env[*slot] = e;
                    self.eval_node(body, env, external)
                })
            }
            Node::Forall(slot, body) => {
                let size = self.domain;
                (0..size as Elem).all(|e| {
                    env[*slot] = e;
                    self.eval_node(body, env, external)
                })
            }
        }
    }
}

struct Compiler<'a> {
    model: &'a Model,
    external: &'a [(&'a str, usize)],
    scope: Vec<(Var, usize)>,
    slots: usize,
    tables: Vec<DenseRelation>,
    table_index: HashMap<String, usize>,
}

impl Compiler<'_> {
    fn slot(&self, t: &Term) -> Result<Slot, ModelError> {
        match t {
            Term::Var(v) => self.scope.iter().rev().find(|(s, _)| s == v).map(|&(_, i)| Slot::Var(i)).ok_or_else(|| ModelError::UnboundVariable(v.clone())),
            Term::Const(c) => self.model.constant(c).map(Slot::Const).ok_or_else(|| ModelError::UnknownConstant(c.clone())),
        }
    }

    fn relation(&mut self, name: &str, used: usize) -> Result<usize, ModelError> {
        if let Some(i) = self.external.iter().position(|(n, _)| *n == name) {
            let declared = self.external[i].1;
            if declared != used {
                return Err(ModelError::ArityMismatch { name: name.into(), used, declared });
            }
            return Ok(i);
        }
        if let Some(&i) = self.table_index.get(name) {
            return Ok(i + self.external.len());
        }
        let rel = self.model.relation(name).ok_or_else(|| ModelError::UnknownRelation(name.into()))?;
        if rel.arity != used {
            return Err(ModelError::ArityMismatch { name: name.into(), used, declared: rel.arity });
        }
        self.tables.push(DenseRelation::new(self.model.size(), rel.arity, &rel.tuples));
        self.table_index.insert(name.into(), self.tables.len() - 1);
        Ok(self.tables.len() - 1 + self.external.len())
    }

    fn node(&mut self, f: &Formula) -> Result<Node, ModelError> {
        Ok(match f {
            Formula::Top => Node::True,
            Formula::Bottom => Node::False,
            Formula::Rel { positive, name, args } => {
                let rel = self.relation(name, args.len())?;
                Node::Rel { positive: *positive, rel, args: args.iter().map(|a| self.slot(a)).collect::<Result<_, _>>()? }
            }
            Formula::Eq { positive, left, right } => Node::Eq { positive: *positive, left: self.slot(left)?, right: self.slot(right)? },
            Formula::And(a, b) => Node::And(Box::new(self.node(a)?), Box::new(self.node(b)?)),
            Formula::Or(a, b) => Node::Or(Box::new(self.node(a)?), Box::new(self.node(b)?)),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((v.clone(), slot));
                let inner = self.node(body);
                self.scope.pop();
                let inner = Box::new(inner?);
                if matches!(f, Formula::Exists(..)) {
                    Node::Exists(slot, inner)
                } else {
                    Node::Forall(slot, inner)
                }
            }
            Formula::Dep(_) | Formula::Possibly(_) | Formula::RestrictedBy(..) => unreachable!("checked first-order"),
        })
    }
}
