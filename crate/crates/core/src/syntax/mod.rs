//! Formula syntax: the negation-normal-form AST, its concrete grammar, and
//! the purely syntactic rewrites (dualization, flattening, restriction,
//! possibility desugaring).

mod parser;
mod printer;
mod transform;

pub use parser::{parse, ParseError, Parser};
pub use transform::{
    conjunction, desugar_possibility, disjunction, equalities, flatten, free_variables,
    inequalities, is_clean, is_first_order, negate_fo, restrict, NotFirstOrder,
};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Prefix reserved for machine-introduced symbols. User variables may not
/// start with it.
pub const RESERVED_PREFIX: char = '_';

/// A variable name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// Terms are variables or constant symbols; there are no function symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Const(String),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => v.fmt(f),
            Term::Const(c) => f.write_str(c),
        }
    }
}

/// An occurrence of a dependency atom.
///
/// Arguments are split into the groups written between `;` (and `|` for the
/// third group of the conditional atoms). The atom is evaluated on the
/// relation induced by the concatenation of all groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomCall {
    pub name: String,
    /// Numeric parameter, e.g. the `n` of `big(n;x)`.
    pub param: Option<usize>,
    pub groups: Vec<Vec<Var>>,
}

impl AtomCall {
    pub fn new(name: impl Into<String>, groups: Vec<Vec<Var>>) -> Self {
        AtomCall { name: name.into(), param: None, groups }
    }

    pub fn with_param(name: impl Into<String>, param: usize, groups: Vec<Vec<Var>>) -> Self {
        AtomCall { name: name.into(), param: Some(param), groups }
    }

    /// The argument tuple: all groups concatenated, repetitions kept.
    pub fn args(&self) -> Vec<Var> {
        self.groups.iter().flatten().cloned().collect()
    }

    pub fn arity(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn group_lengths(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }
}

/// A formula of first-order logic with dependency atoms, in negation normal
/// form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bottom,
    Rel { positive: bool, name: String, args: Vec<Term> },
    Eq { positive: bool, left: Term, right: Term },
    Dep(AtomCall),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    /// Holds on a team iff some nonempty subteam satisfies the body.
    Possibly(Box<Formula>),
    /// `RestrictedBy(phi, theta)`: `phi` evaluated on the part of the team
    /// satisfying the first-order `theta`.
    RestrictedBy(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn rel(name: &str, args: &[&str]) -> Self {
        Formula::Rel { positive: true, name: name.into(), args: args.iter().map(|a| Term::var(a)).collect() }
    }

    pub fn not_rel(name: &str, args: &[&str]) -> Self {
        Formula::Rel { positive: false, name: name.into(), args: args.iter().map(|a| Term::var(a)).collect() }
    }

    pub fn eq(left: Term, right: Term) -> Self {
        Formula::Eq { positive: true, left, right }
    }

    pub fn neq(left: Term, right: Term) -> Self {
        Formula::Eq { positive: false, left, right }
    }

    pub fn atom(call: AtomCall) -> Self {
        Formula::Dep(call)
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<Var>, body: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<Var>, body: Formula) -> Self {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn possibly(body: Formula) -> Self {
        Formula::Possibly(Box::new(body))
    }

    pub fn restricted_by(body: Formula, theta: Formula) -> Self {
        Formula::RestrictedBy(Box::new(body), Box::new(theta))
    }

    /// Nests `body` under `exists v1. exists v2. ...`.
    pub fn exists_all(vars: &[Var], body: Formula) -> Self {
        vars.iter().rev().fold(body, |acc, v| Formula::exists(v.clone(), acc))
    }

    pub fn forall_all(vars: &[Var], body: Formula) -> Self {
        vars.iter().rev().fold(body, |acc, v| Formula::forall(v.clone(), acc))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Rel { .. } | Formula::Eq { .. } | Formula::Dep(_) => 1,
            Formula::Or(a, b) | Formula::And(a, b) | Formula::RestrictedBy(a, b) => 1 + a.size() + b.size(),
            Formula::Exists(_, a) | Formula::Forall(_, a) | Formula::Possibly(a) => 1 + a.size(),
        }
    }

    /// Connective depth: literals and atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Rel { .. } | Formula::Eq { .. } | Formula::Dep(_) => 0,
            Formula::Or(a, b) | Formula::And(a, b) | Formula::RestrictedBy(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Exists(_, a) | Formula::Forall(_, a) | Formula::Possibly(a) => 1 + a.depth(),
        }
    }

    /// All dependency atom occurrences, in left-to-right order.
    pub fn atoms(&self) -> Vec<&AtomCall> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Dep(call) = f {
                out.push(call);
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Or(a, b) | Formula::And(a, b) | Formula::RestrictedBy(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Exists(_, a) | Formula::Forall(_, a) | Formula::Possibly(a) => a.visit(f),
            _ => {}
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Rel { args, .. } => out.extend(args.iter().filter_map(Term::as_var).cloned()),
            Formula::Eq { left, right, .. } => out.extend([left, right].into_iter().filter_map(Term::as_var).cloned()),
            Formula::Dep(call) => out.extend(call.args()),
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Names of the relation symbols used, with the arities they are used at.
    pub fn relation_symbols(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Rel { name, args, .. } = f {
                out.insert((name.clone(), args.len()));
            }
        });
        out
    }

    pub fn constant_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut add = |t: &Term| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        };
        self.visit(&mut |f| match f {
            Formula::Rel { args, .. } => args.iter().for_each(&mut add),
            Formula::Eq { left, right, .. } => {
                add(left);
                add(right);
            }
            _ => {}
        });
        out
    }
}

/// Supplier of fresh variables from the reserved namespace `_v0, _v1, ...`.
///
/// A supply built with [`FreshVars::avoiding`] starts past every reserved
/// name already used by the given formulas, so repeated rewriting never
/// collides with earlier output.
#[derive(Clone, Debug, Default)]
pub struct FreshVars {
    next: usize,
    issued: Vec<Var>,
}

impl FreshVars {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn avoiding<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Self {
        let mut next = 0;
        for f in formulas {
            for v in f.all_variables() {
                if let Some(n) = v.as_str().strip_prefix("_v").and_then(|s| s.parse::<usize>().ok()) {
                    next = next.max(n + 1);
                }
            }
        }
        FreshVars { next, issued: Vec::new() }
    }

    /// Also skips past `v` if it is a reserved name.
    pub fn avoid(mut self, v: &Var) -> Self {
        if let Some(n) = v.as_str().strip_prefix("_v").and_then(|s| s.parse::<usize>().ok()) {
            self.next = self.next.max(n + 1);
        }
        self
    }

    pub fn fresh(&mut self) -> Var {
        let v = Var::new(format!("_v{}", self.next));
        self.next += 1;
        self.issued.push(v.clone());
        v
    }

    pub fn fresh_tuple(&mut self, n: usize) -> Vec<Var> {
        (0..n).map(|_| self.fresh()).collect()
    }

    /// Every variable issued so far, in order.
    pub fn issued(&self) -> &[Var] {
        &self.issued
    }
}

pub fn vars(names: &[&str]) -> Vec<Var> {
    names.iter().map(|n| Var::new(*n)).collect()
}

pub fn terms(vars: &[Var]) -> Vec<Term> {
    vars.iter().cloned().map(Term::Var).collect()
}
