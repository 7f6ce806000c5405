//! The dependency-atom registry.
//!
//! Every atom is evaluated on the relation `X(x)` a team induces on the
//! atom's argument tuple, never on the team itself, so locality holds by
//! construction. Atoms with a first-order definition `D*(S)` expose it for
//! the translator; closure flags and bounds are metadata that the checkers
//! in this module verify by exhaustive search.

use crate::model::{all_tuples, team_project, CompiledFo, DenseRelation, Elem, Model, ModelError, Team, TupleSet};
use crate::syntax::{
    conjunction, disjunction, free_variables, inequalities, is_first_order, terms, AtomCall, Formula, FreshVars, ParseError, Parser, Term, Var,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtomError {
    #[error("unknown atom `{0}`")]
    Unknown(String),
    #[error("bad arguments for `{name}`: {message}")]
    Shape { name: String, message: String },
    #[error("atom `{0}` is already registered")]
    Duplicate(String),
    #[error("definition of `{name}` is not a sentence over {{R, =}}: {message}")]
    BadDefinition { name: String, message: String },
    #[error("declared property `{property}` of `{name}` fails: {counterexample}")]
    Rejected { name: String, property: String, counterexample: Box<Counterexample> },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed atom file: {0}")]
    Json(String),
}

/// Argument layout of an atom: how many `;`-separated groups, whether the
/// first two must have equal length, and whether a numeric parameter leads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomShape {
    pub groups: usize,
    pub equal_lengths: bool,
    pub param: bool,
    /// Total arity, for atoms defined by a sentence over a fixed-arity `R`.
    pub fixed_arity: Option<usize>,
}

impl AtomShape {
    fn groups(n: usize) -> Self {
        AtomShape { groups: n, equal_lengths: false, param: false, fixed_arity: None }
    }

    fn paired() -> Self {
        AtomShape { equal_lengths: true, ..Self::groups(2) }
    }

    pub fn validate(&self, call: &AtomCall) -> Result<(), String> {
        if call.groups.len() != self.groups {
            return Err(format!("expected {} argument group(s), found {}", self.groups, call.groups.len()));
        }
        if self.equal_lengths && call.groups[0].len() != call.groups[1].len() {
            return Err(format!("tuples must have equal length, found {} and {}", call.groups[0].len(), call.groups[1].len()));
        }
        match (self.param, call.param) {
            (true, None) => return Err("missing numeric parameter".into()),
            (true, Some(0)) => return Err("parameter must be at least 1".into()),
            (false, Some(_)) => return Err("unexpected numeric parameter".into()),
            _ => {}
        }
        if let Some(n) = self.fixed_arity {
            if call.arity() != n {
                return Err(format!("expected {n} argument(s), found {}", call.arity()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Dep,
    Const,
    Excl,
    Incl,
    Indep,
    Cindep,
    NonEmpty,
    Intersect,
    Inconst,
    Big,
    Total,
    Nondep,
    Nonexcl,
    Nonincl,
    Noncindep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Semantics {
    Builtin(Builtin),
    /// Satisfied iff the sentence holds with `R` read as `X(x)`.
    Custom(Formula),
}

/// Least size of a satisfying subteam, as declared for an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bound {
    Fixed(usize),
    /// The atom's numeric parameter (`big(n;x)` is `n`-bounded).
    Param,
    Unbounded,
    Undeclared,
}

impl Bound {
    pub fn for_call(&self, call: &AtomCall) -> Option<usize> {
        match self {
            Bound::Fixed(k) => Some(*k),
            Bound::Param => call.param,
            Bound::Unbounded | Bound::Undeclared => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Fixed(k) => write!(f, "{k}"),
            Bound::Param => f.write_str("n"),
            Bound::Unbounded => f.write_str("unbounded"),
            Bound::Undeclared => f.write_str("-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomDefinition {
    pub name: String,
    pub shape: AtomShape,
    pub semantics: Semantics,
    pub upwards_closed: bool,
    pub downwards_closed: bool,
    pub bound: Bound,
    /// Registered with `--unchecked`: the declared flags were not verified.
    pub unchecked: bool,
}

/// Splits a tuple into the atom's argument groups.
fn split<'a>(t: &'a [Elem], lens: &[usize]) -> Vec<&'a [Elem]> {
    let mut out = Vec::with_capacity(lens.len());
    let mut at = 0;
    for &l in lens {
        out.push(&t[at..at + l]);
        at += l;
    }
    out
}

fn cat(parts: &[&[Elem]]) -> Vec<Elem> {
    parts.concat()
}

impl AtomDefinition {
    /// Whether `(dom, rel)` belongs to the dependency, where `rel` is the
    /// relation induced on the concatenated argument groups of `call`.
    pub fn holds(&self, call: &AtomCall, rel: &TupleSet, domain_size: usize) -> bool {
        let lens = call.group_lengths();
        match &self.semantics {
            Semantics::Custom(def) => {
                let model = Model::with_size(domain_size).expect("domain has two elements");
                let prog = CompiledFo::compile(def, &model, &[], &[("R", call.arity())]).expect("definition validated at registration");
                prog.eval(&mut Vec::new(), &[&DenseRelation::new(domain_size, call.arity(), rel)])
            }
            Semantics::Builtin(kind) => builtin_holds(*kind, &lens, call.param, rel, domain_size),
        }
    }

    /// `M ⊨_X D x`: the atom applied to the team's projection on its arguments.
    pub fn eval(&self, model: &Model, team: &Team, call: &AtomCall) -> Result<bool, AtomError> {
        self.shape.validate(call).map_err(|message| AtomError::Shape { name: call.name.clone(), message })?;
        let rel = team_project(team, &call.args())?;
        Ok(self.holds(call, &rel, model.size()))
    }

    /// `D*(S)` for this instance: a first-order sentence over the relation
    /// symbol `rel` of arity `call.arity()`, using bound variables from
    /// `fresh`.
    pub fn fo_definition(&self, call: &AtomCall, rel: &str, fresh: &mut FreshVars) -> Option<Formula> {
        let lens = call.group_lengths();
        match &self.semantics {
            Semantics::Custom(def) => Some(rename_custom(def, rel, fresh)),
            Semantics::Builtin(kind) => Some(builtin_definition(*kind, &lens, call.param, rel, fresh)),
        }
    }

    pub fn is_builtin(&self, kind: Builtin) -> bool {
        self.semantics == Semantics::Builtin(kind)
    }
}

fn builtin_holds(kind: Builtin, lens: &[usize], param: Option<usize>, rel: &TupleSet, dom: usize) -> bool {
    let parts = || rel.iter().map(|t| split(t, lens));
    match kind {
        Builtin::Dep => parts().all(|a| parts().all(|b| a[0] != b[0] || a[1] == b[1])),
        Builtin::Const => rel.len() <= 1,
        Builtin::Excl => parts().all(|a| parts().all(|b| a[0] != b[1])),
        Builtin::Incl => parts().all(|a| parts().any(|b| a[0] == b[1])),
        Builtin::Indep => parts().all(|a| parts().all(|b| rel.contains(&cat(&[a[0], b[1]])))),
        Builtin::Cindep => parts().all(|a| parts().all(|b| a[2] != b[2] || rel.contains(&cat(&[a[0], b[1], a[2]])))),
        Builtin::NonEmpty => !rel.is_empty(),
        Builtin::Intersect => parts().any(|a| a[0] == a[1]),
        Builtin::Inconst => rel.len() > 1,
        Builtin::Big => rel.len() >= param.unwrap_or(1),
        Builtin::Total => rel.len() == dom.pow(lens.iter().sum::<usize>() as u32),
        Builtin::Nondep => parts().any(|a| parts().any(|b| a[0] == b[0] && a[1] != b[1])),
        Builtin::Nonexcl => parts().any(|a| parts().any(|b| a[0] == b[1])),
        Builtin::Nonincl => parts().any(|a| parts().all(|b| a[0] != b[1])),
        // some s, s' agree on z, and no s'' matches s on xz and s' on yz
        Builtin::Noncindep => parts().any(|a| parts().any(|b| a[2] == b[2] && !rel.contains(&cat(&[a[0], b[1], a[2]])))),
    }
}

fn s_lit(rel: &str, positive: bool, args: &[&[Var]]) -> Formula {
    Formula::Rel { positive, name: rel.into(), args: args.iter().flat_map(|a| terms(a)).collect() }
}

fn tuple_eq(a: &[Var], b: &[Var]) -> Formula {
    conjunction(a.iter().zip(b).map(|(x, y)| Formula::eq(Term::Var(x.clone()), Term::Var(y.clone()))))
}

fn tuple_neq(a: &[Var], b: &[Var]) -> Formula {
    inequalities(&terms(a), &terms(b))
}

fn builtin_definition(kind: Builtin, lens: &[usize], param: Option<usize>, rel: &str, fresh: &mut FreshVars) -> Formula {
    let mut tuple = |n: usize| fresh.fresh_tuple(n);
    let all = |groups: &[&Vec<Var>], body: Formula| Formula::forall_all(&groups.iter().flat_map(|g| g.iter().cloned()).collect::<Vec<_>>(), body);
    let some = |groups: &[&Vec<Var>], body: Formula| Formula::exists_all(&groups.iter().flat_map(|g| g.iter().cloned()).collect::<Vec<_>>(), body);
    match kind {
        Builtin::Dep => {
            let (a, b, c) = (tuple(lens[0]), tuple(lens[1]), tuple(lens[1]));
            all(&[&a, &b, &c], disjunction([s_lit(rel, false, &[&a, &b]), s_lit(rel, false, &[&a, &c]), tuple_eq(&b, &c)]))
        }
        Builtin::Const => {
            let (a, b) = (tuple(lens[0]), tuple(lens[0]));
            all(&[&a, &b], disjunction([s_lit(rel, false, &[&a]), s_lit(rel, false, &[&b]), tuple_eq(&a, &b)]))
        }
        Builtin::Excl => {
            let (a, b, c) = (tuple(lens[0]), tuple(lens[1]), tuple(lens[0]));
            all(&[&a, &b, &c], Formula::or(s_lit(rel, false, &[&a, &b]), s_lit(rel, false, &[&c, &a])))
        }
        Builtin::Incl => {
            let (a, b) = (tuple(lens[0]), tuple(lens[1]));
            let c = tuple(lens[0]);
            all(&[&a, &b], Formula::or(s_lit(rel, false, &[&a, &b]), some(&[&c], s_lit(rel, true, &[&c, &a]))))
        }
        Builtin::Indep => {
            let (a, b, c, d) = (tuple(lens[0]), tuple(lens[1]), tuple(lens[0]), tuple(lens[1]));
            all(&[&a, &b, &c, &d], disjunction([s_lit(rel, false, &[&a, &b]), s_lit(rel, false, &[&c, &d]), s_lit(rel, true, &[&a, &d])]))
        }
        Builtin::Cindep => {
            let (a, b, e, c, d) = (tuple(lens[0]), tuple(lens[1]), tuple(lens[2]), tuple(lens[0]), tuple(lens[1]));
            all(
                &[&a, &b, &e, &c, &d],
                disjunction([s_lit(rel, false, &[&a, &b, &e]), s_lit(rel, false, &[&c, &d, &e]), s_lit(rel, true, &[&a, &d, &e])]),
            )
        }
        Builtin::NonEmpty => {
            let n: usize = lens.iter().sum();
            let a = tuple(n);
            some(&[&a], s_lit(rel, true, &[&a]))
        }
        Builtin::Intersect => {
            let a = tuple(lens[0]);
            some(&[&a], s_lit(rel, true, &[&a, &a]))
        }
        Builtin::Inconst => {
            let (a, b) = (tuple(lens[0]), tuple(lens[0]));
            some(&[&a, &b], conjunction([s_lit(rel, true, &[&a]), s_lit(rel, true, &[&b]), tuple_neq(&a, &b)]))
        }
        Builtin::Big => {
            let n = param.unwrap_or(1);
            let ts: Vec<Vec<Var>> = (0..n).map(|_| tuple(lens[0])).collect();
            let mut parts: Vec<Formula> = ts.iter().map(|t| s_lit(rel, true, &[t])).collect();
            for i in 0..n {
                for j in i + 1..n {
                    parts.push(tuple_neq(&ts[i], &ts[j]));
                }
            }
            some(&ts.iter().collect::<Vec<_>>(), conjunction(parts))
        }
        Builtin::Total => {
            let a = tuple(lens[0]);
            all(&[&a], s_lit(rel, true, &[&a]))
        }
        Builtin::Nondep => {
            let (a, b, c) = (tuple(lens[0]), tuple(lens[1]), tuple(lens[1]));
            some(&[&a, &b, &c], conjunction([s_lit(rel, true, &[&a, &b]), s_lit(rel, true, &[&a, &c]), tuple_neq(&b, &c)]))
        }
        Builtin::Nonexcl => {
            let (a, b, c) = (tuple(lens[0]), tuple(lens[1]), tuple(lens[0]));
            some(&[&a, &b, &c], Formula::and(s_lit(rel, true, &[&a, &b]), s_lit(rel, true, &[&c, &a])))
        }
        Builtin::Nonincl => {
            let (a, b, c) = (tuple(lens[0]), tuple(lens[1]), tuple(lens[0]));
            some(&[&a, &b], Formula::and(s_lit(rel, true, &[&a, &b]), all(&[&c], s_lit(rel, false, &[&c, &a]))))
        }
        Builtin::Noncindep => {
            let (a, b, e, c, d) = (tuple(lens[0]), tuple(lens[1]), tuple(lens[2]), tuple(lens[0]), tuple(lens[1]));
            some(
                &[&a, &b, &e, &c, &d],
                conjunction([s_lit(rel, true, &[&a, &b, &e]), s_lit(rel, true, &[&c, &d, &e]), s_lit(rel, false, &[&a, &d, &e])]),
            )
        }
    }
}

/// Renames `R` to `rel` and every bound variable of a custom definition to a
/// fresh one.
fn rename_custom(def: &Formula, rel: &str, fresh: &mut FreshVars) -> Formula {
    fn go(f: &Formula, rel: &str, env: &mut Vec<(Var, Var)>, fresh: &mut FreshVars) -> Formula {
        let term = |t: &Term, env: &Vec<(Var, Var)>| match t {
            Term::Var(v) => Term::Var(env.iter().rev().find(|(o, _)| o == v).map_or_else(|| v.clone(), |(_, n)| n.clone())),
            c => c.clone(),
        };
        match f {
            Formula::Rel { positive, name, args } => Formula::Rel {
                positive: *positive,
                name: if name == "R" { rel.into() } else { name.clone() },
                args: args.iter().map(|a| term(a, env)).collect(),
            },
            Formula::Eq { positive, left, right } => Formula::Eq { positive: *positive, left: term(left, env), right: term(right, env) },
            Formula::Or(a, b) => Formula::or(go(a, rel, env, fresh), go(b, rel, env, fresh)),
            Formula::And(a, b) => Formula::and(go(a, rel, env, fresh), go(b, rel, env, fresh)),
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let n = fresh.fresh();
                env.push((v.clone(), n.clone()));
                let body = go(a, rel, env, fresh);
                env.pop();
                if matches!(f, Formula::Exists(..)) {
                    Formula::exists(n, body)
                } else {
                    Formula::forall(n, body)
                }
            }
            other => other.clone(),
        }
    }
    go(def, rel, &mut Vec::new(), fresh)
}

/// The built-in atoms.
pub fn builtin_catalog() -> Vec<AtomDefinition> {
    use Builtin::*;
    let def = |name: &str, shape: AtomShape, kind, up, down, bound| AtomDefinition {
        name: name.into(),
        shape,
        semantics: Semantics::Builtin(kind),
        upwards_closed: up,
        downwards_closed: down,
        bound,
        unchecked: false,
    };
    let g = AtomShape::groups;
    vec![
        def("dep", g(2), Dep, false, true, Bound::Fixed(0)),
        def("const", g(1), Const, false, true, Bound::Fixed(0)),
        def("excl", AtomShape::paired(), Excl, false, true, Bound::Fixed(0)),
        def("incl", AtomShape::paired(), Incl, false, false, Bound::Fixed(0)),
        def("indep", g(2), Indep, false, false, Bound::Fixed(0)),
        def("cindep", g(3), Cindep, false, false, Bound::Fixed(0)),
        def("NE", g(0), NonEmpty, true, false, Bound::Fixed(1)),
        def("intersect", AtomShape::paired(), Intersect, true, false, Bound::Fixed(1)),
        def("inconst", g(1), Inconst, true, false, Bound::Fixed(2)),
        def("big", AtomShape { param: true, ..g(1) }, Big, true, false, Bound::Param),
        def("total", g(1), Total, true, false, Bound::Unbounded),
        def("nondep", g(2), Nondep, true, false, Bound::Fixed(2)),
        def("nonexcl", AtomShape::paired(), Nonexcl, true, false, Bound::Fixed(2)),
        def("nonincl", AtomShape::paired(), Nonincl, false, false, Bound::Fixed(1)),
        def("noncindep", g(3), Noncindep, false, false, Bound::Fixed(2)),
    ]
}

/// Custom atom file contents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CustomAtom {
    pub name: String,
    pub arity: usize,
    /// First-order sentence over `R` (of the given arity) and `=`.
    pub definition: String,
    #[serde(default)]
    pub upwards_closed: bool,
    #[serde(default)]
    pub downwards_closed: bool,
    #[serde(default)]
    pub bound: Option<usize>,
}

impl CustomAtom {
    pub fn from_json(text: &str) -> Result<Self, AtomError> {
        serde_json::from_str(text).map_err(|e| AtomError::Json(e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct AtomRegistry {
    atoms: BTreeMap<String, AtomDefinition>,
}

impl Default for AtomRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl AtomRegistry {
    pub fn builtin() -> Self {
        AtomRegistry { atoms: builtin_catalog().into_iter().map(|d| (d.name.clone(), d)).collect() }
    }

    /// A shared copy of the built-in registry.
    pub fn builtin_ref() -> &'static AtomRegistry {
        static REG: OnceLock<AtomRegistry> = OnceLock::new();
        REG.get_or_init(AtomRegistry::builtin)
    }

    pub fn get(&self, name: &str) -> Option<&AtomDefinition> {
        self.atoms.get(name)
    }

    pub fn lookup(&self, call: &AtomCall) -> Result<&AtomDefinition, AtomError> {
        self.get(&call.name).ok_or_else(|| AtomError::Unknown(call.name.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &AtomDefinition> {
        self.atoms.values()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Registers an atom defined by a first-order sentence over `R`.
    ///
    /// Declared flags are checked exhaustively first, on domains up to
    /// `max(3, k + 1)` and relations up to `max(4, k + 1)` tuples where `k` is
    /// the declared bound; `unchecked` skips the checks and marks the atom.
    pub fn register_custom(&mut self, spec: &CustomAtom, unchecked: bool) -> Result<&AtomDefinition, AtomError> {
        if self.atoms.contains_key(&spec.name) {
            return Err(AtomError::Duplicate(spec.name.clone()));
        }
        if !spec.name.starts_with(|c: char| c.is_ascii_alphabetic()) || !spec.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(AtomError::BadDefinition { name: spec.name.clone(), message: "atom names are alphanumeric identifiers".into() });
        }
        let bad = |message: String| AtomError::BadDefinition { name: spec.name.clone(), message };
        let def = Parser::new(self).parse(&spec.definition)?;
        if !is_first_order(&def) {
            return Err(bad("definition must be first-order".into()));
        }
        let free = free_variables(&def);
        if !free.is_empty() {
            return Err(bad(format!("free variables {}", free.iter().map(Var::as_str).collect::<Vec<_>>().join(", "))));
        }
        for (name, arity) in def.relation_symbols() {
            if name != "R" || arity != spec.arity {
                return Err(bad(format!("uses relation {name}/{arity}; only R/{} is allowed", spec.arity)));
            }
        }
        if let Some(c) = def.constant_symbols().into_iter().next() {
            return Err(bad(format!("uses constant `{c}`")));
        }
        let atom = AtomDefinition {
            name: spec.name.clone(),
            shape: AtomShape { groups: 1, equal_lengths: false, param: false, fixed_arity: Some(spec.arity) },
            semantics: Semantics::Custom(def),
            upwards_closed: spec.upwards_closed,
            downwards_closed: spec.downwards_closed,
            bound: spec.bound.map_or(Bound::Undeclared, Bound::Fixed),
            unchecked,
        };
        if !unchecked {
            let k = spec.bound.unwrap_or(0);
            verify_declared(&atom, 3.max(k + 1), 4.max(k + 1))?;
        }
        self.atoms.insert(spec.name.clone(), atom);
        Ok(&self.atoms[&spec.name])
    }
}

/// A relation on which a checked property fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub call: Box<AtomCall>,
    pub domain_size: usize,
    /// For closure checks, the pair `(R, S)` with `R ⊆ S`; otherwise `R` only.
    pub relation: TupleSet,
    pub larger: Option<TupleSet>,
    pub note: String,
}

fn show_relation(r: &TupleSet) -> String {
    let rows: Vec<String> = r.iter().map(|t| t.iter().map(|&e| crate::model::element_label(e as usize)).collect::<Vec<_>>().join(",")).map(|t| format!("({t})")).collect();
    format!("{{{}}}", rows.join(", "))
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on a {}-element domain with R = {}", self.call, self.domain_size, show_relation(&self.relation))?;
        if let Some(s) = &self.larger {
            write!(f, " ⊆ S = {}", show_relation(s))?;
        }
        if !self.note.is_empty() {
            write!(f, " ({})", self.note)?;
        }
        Ok(())
    }
}

impl Counterexample {
    pub fn to_json(&self) -> serde_json::Value {
        let rel = |r: &TupleSet| -> Vec<Vec<String>> { r.iter().map(|t| t.iter().map(|&e| crate::model::element_label(e as usize)).collect()).collect() };
        serde_json::json!({
            "atom": self.call.to_string(),
            "domain_size": self.domain_size,
            "relation": rel(&self.relation),
            "larger": self.larger.as_ref().map(rel),
            "note": self.note,
        })
    }
}

/// All relations on `dom^arity` with at most `max_rel` tuples, smallest first.
pub fn relations_up_to(domain_size: usize, arity: usize, max_rel: usize) -> Vec<TupleSet> {
    let universe = all_tuples(domain_size, arity);
    let mut out = Vec::new();
    for k in 0..=max_rel.min(universe.len()) {
        combinations(universe.len(), k, &mut |idx| out.push(idx.iter().map(|&i| universe[i].clone()).collect()));
    }
    out
}

/// Calls `f` with every `k`-subset of `0..n`, in lexicographic order.
pub fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f)
}

fn subrelations(r: &TupleSet, max: usize) -> Vec<TupleSet> {
    let items: Vec<&Vec<Elem>> = r.iter().collect();
    let mut out = Vec::new();
    for k in 0..=max.min(items.len()) {
        combinations(items.len(), k, &mut |idx| out.push(idx.iter().map(|&i| items[i].clone()).collect()));
    }
    out
}

fn counterexample(call: &AtomCall, dom: usize, relation: TupleSet, larger: Option<TupleSet>, note: &str) -> Counterexample {
    Counterexample { call: Box::new(call.clone()), domain_size: dom, relation, larger, note: note.into() }
}

/// `R ⊆ S` and `D(R)` imply `D(S)`, for all `|dom| ≤ max_dom`, `|S| ≤ max_rel`.
pub fn check_upwards_closed(atom: &AtomDefinition, call: &AtomCall, max_dom: usize, max_rel: usize) -> Result<(), Counterexample> {
    for dom in 2..=max_dom {
        for s in relations_up_to(dom, call.arity(), max_rel) {
            if atom.holds(call, &s, dom) {
                continue;
            }
            // largest subrelations first, so the reported pair differs minimally
            if let Some(r) = subrelations(&s, s.len()).into_iter().filter(|r| atom.holds(call, r, dom)).min_by_key(|r| std::cmp::Reverse(r.len())) {
                return Err(counterexample(call, dom, r, Some(s), "holds on R but not on S"));
            }
        }
    }
    Ok(())
}

/// `R ⊆ S` and `D(S)` imply `D(R)`.
pub fn check_downwards_closed(atom: &AtomDefinition, call: &AtomCall, max_dom: usize, max_rel: usize) -> Result<(), Counterexample> {
    for dom in 2..=max_dom {
        for s in relations_up_to(dom, call.arity(), max_rel) {
            if !atom.holds(call, &s, dom) {
                continue;
            }
            if let Some(r) = subrelations(&s, s.len()).into_iter().find(|r| !atom.holds(call, r, dom)) {
                return Err(counterexample(call, dom, r, Some(s), "holds on S but not on R"));
            }
        }
    }
    Ok(())
}

/// Whenever `D(R)`, some `R' ⊆ R` with `|R'| ≤ kappa` has `D(R')`.
pub fn check_boundedness(atom: &AtomDefinition, call: &AtomCall, kappa: usize, max_dom: usize, max_rel: usize) -> Result<(), Counterexample> {
    for dom in 2..=max_dom {
        for r in relations_up_to(dom, call.arity(), max_rel) {
            if atom.holds(call, &r, dom) && !subrelations(&r, kappa).iter().any(|y| atom.holds(call, y, dom)) {
                return Err(counterexample(call, dom, r, None, &format!("no satisfying subrelation of size at most {kappa}")));
            }
        }
    }
    Ok(())
}

/// The direct semantics agrees with Tarski truth of `D*(S)`, and with itself
/// under every permutation of the domain.
pub fn check_fo_agreement(atom: &AtomDefinition, call: &AtomCall, max_dom: usize, max_rel: usize) -> Result<(), Counterexample> {
    let mut fresh = FreshVars::new();
    let Some(def) = atom.fo_definition(call, "S", &mut fresh) else { return Ok(()) };
    for dom in 2..=max_dom {
        let model = Model::with_size(dom).expect("two elements");
        let prog = CompiledFo::compile(&def, &model, &[], &[("S", call.arity())]).expect("definition compiles");
        let perms = permutations(dom);
        for r in relations_up_to(dom, call.arity(), max_rel) {
            let direct = atom.holds(call, &r, dom);
            let table = DenseRelation::new(dom, call.arity(), &r);
            if prog.eval(&mut Vec::new(), &[&table]) != direct {
                return Err(counterexample(call, dom, r, None, &format!("direct semantics says {direct}, first-order definition disagrees")));
            }
            for p in &perms {
                let image: TupleSet = r.iter().map(|t| t.iter().map(|&e| p[e as usize]).collect()).collect();
                if atom.holds(call, &image, dom) != direct {
                    return Err(counterexample(call, dom, r, Some(image), "verdict changes under a permutation of the domain"));
                }
            }
        }
    }
    Ok(())
}

/// All permutations of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    let mut cur: Vec<Elem> = (0..n as Elem).collect();
    fn heap(k: usize, cur: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            cur.swap(j, k - 1);
        }
    }
    heap(n, &mut cur, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Representative instances used when checking an atom: every argument
/// group of length 1 or 2, total arity at most 3, and for parametric atoms
/// parameters 1 to 3.
pub fn sample_calls(atom: &AtomDefinition) -> Vec<AtomCall> {
    let name = atom.name.clone();
    if let Some(n) = atom.shape.fixed_arity {
        let vars = (0..n).map(|i| Var::new(format!("x{i}"))).collect();
        return vec![AtomCall::new(name, vec![vars])];
    }
    let mut length_choices: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..atom.shape.groups {
        length_choices = length_choices.into_iter().flat_map(|p| [1, 2].map(|l| [p.clone(), vec![l]].concat())).collect();
    }
    length_choices.retain(|ls| ls.iter().sum::<usize>() <= 3 && (!atom.shape.equal_lengths || ls[0] == ls[1]));
    let params: Vec<Option<usize>> = if atom.shape.param { (1..=3).map(Some).collect() } else { vec![None] };
    let mut out = Vec::new();
    for ls in &length_choices {
        let mut next = 0;
        let groups: Vec<Vec<Var>> = ls
            .iter()
            .map(|&l| {
                let g = (next..next + l).map(|i| Var::new(format!("x{i}"))).collect();
                next += l;
                g
            })
            .collect();
        for p in &params {
            out.push(AtomCall { name: name.clone(), param: *p, groups: groups.clone() });
        }
    }
    out
}

/// Verifies every declared flag and bound of `atom` on its sample instances.
pub fn verify_declared(atom: &AtomDefinition, max_dom: usize, max_rel: usize) -> Result<(), AtomError> {
    let reject = |property: &str, counterexample: Counterexample| AtomError::Rejected { name: atom.name.clone(), property: property.into(), counterexample: Box::new(counterexample) };
    for call in sample_calls(atom) {
        check_fo_agreement(atom, &call, max_dom, max_rel).map_err(|c| reject("first-order definition", c))?;
        if atom.upwards_closed {
            check_upwards_closed(atom, &call, max_dom, max_rel).map_err(|c| reject("upwards closed", c))?;
        }
        if atom.downwards_closed {
            check_downwards_closed(atom, &call, max_dom, max_rel).map_err(|c| reject("downwards closed", c))?;
        }
        if let Some(k) = atom.bound.for_call(&call) {
            check_boundedness(atom, &call, k, max_dom, max_rel).map_err(|c| reject(&format!("bound {k}"), c))?;
        }
    }
    Ok(())
}
