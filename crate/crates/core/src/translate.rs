//! Compilation of formulas with constancy and upwards closed atoms into
//! first-order sentences over one extra relation symbol.
//!
//! For `phi(x1..xk)` the result is a sentence `phi*(_R)` with `_R` of arity
//! `k` such that `M ⊨_X phi` iff `(M, X(x1..xk)) ⊨ phi*(_R)`.
//!
//! Stages, in order:
//!
//! 1. [`desugar_negated_atoms`]: `nonincl` and `noncindep` become constancy,
//!    possibility and first-order material.
//! 2. [`desugar_possibility`]: `poss` becomes constancy, `inconst` and
//!    `restrict`.
//! 3. [`eliminate_constancy`]: `const(y)` becomes `y = v` for fresh `v`,
//!    which the final sentence quantifies existentially at the top.
//! 4. [`to_clean`]: disjunctions and existentials become first-order, moving
//!    the dependency material under `restrict`.
//! 5. [`build_sentence`]: structural translation of the clean formula,
//!    tracking the current team as a first-order membership formula.

use crate::atoms::{AtomError, AtomRegistry, Builtin};
use crate::syntax::{
    conjunction, desugar_possibility, flatten, free_variables, inequalities, is_clean, is_first_order, negate_fo, terms, AtomCall, Formula,
    FreshVars, Term, Var,
};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Name of the relation symbol standing for the team.
pub const TEAM_RELATION: &str = "_R";
const PROJECTION: &str = "_S";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Atom(#[from] AtomError),
    #[error("atom `{0}` is neither constancy nor upwards closed; only upwards closed atoms and constancy can be translated")]
    NotUpwardsClosed(String),
    #[error("free variable `{0}` is missing from the variable tuple")]
    MissingVariable(Var),
    #[error("variable `{0}` occurs twice in the variable tuple")]
    DuplicateVariable(Var),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TranslateOptions {
    /// Order of the team variables; defaults to the sorted free variables.
    pub vars: Option<Vec<Var>>,
    pub simplify: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslateStats {
    pub input_size: usize,
    pub clean_size: usize,
    pub output_size: usize,
    pub output_depth: usize,
    pub constants: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationResult {
    pub target: Formula,
    pub sentence: Formula,
    /// The team variables, in the column order of `_R`.
    pub tuple: Vec<Var>,
    /// Stage outputs, in pipeline order.
    pub stages: Vec<(&'static str, Formula)>,
    /// Variables introduced for constancy atoms.
    pub constants: Vec<Var>,
    pub fresh: Vec<Var>,
    pub stats: TranslateStats,
}

impl TranslationResult {
    pub fn relation(&self) -> (&'static str, usize) {
        (TEAM_RELATION, self.tuple.len())
    }

    /// For a sentence, the translation read on the team `{∅}`: the nullary
    /// `_R()` is replaced by `T`, leaving a sentence over the model's own
    /// signature. `None` when there are team variables.
    pub fn plain_sentence(&self) -> Option<Formula> {
        self.tuple.is_empty().then(|| simplify(&nullary_true(&self.sentence)))
    }
}

/// Runs the whole pipeline.
pub fn translate(phi: &Formula, registry: &AtomRegistry, options: &TranslateOptions) -> Result<TranslationResult, TranslateError> {
    let fv = free_variables(phi);
    let tuple = match &options.vars {
        Some(vs) => {
            let mut seen = BTreeSet::new();
            for v in vs {
                if !seen.insert(v) {
                    return Err(TranslateError::DuplicateVariable(v.clone()));
                }
            }
            if let Some(v) = fv.iter().find(|v| !seen.contains(v)) {
                return Err(TranslateError::MissingVariable(v.clone()));
            }
            vs.clone()
        }
        None => fv.into_iter().collect(),
    };
    for call in phi.atoms() {
        let def = registry.lookup(call)?;
        def.shape.validate(call).map_err(|message| AtomError::Shape { name: call.name.clone(), message })?;
        let macro_atom = def.is_builtin(Builtin::Nonincl) || def.is_builtin(Builtin::Noncindep);
        if !(def.upwards_closed || def.is_builtin(Builtin::Const) || macro_atom) {
            return Err(TranslateError::NotUpwardsClosed(call.name.clone()));
        }
    }
    let mut fresh = FreshVars::avoiding([phi]);
    for v in &tuple {
        fresh = fresh.avoid(v);
    }
    let mut stages = Vec::new();
    let s1 = desugar_negated_atoms(phi, registry, &mut fresh);
    stages.push(("negated atoms", s1.clone()));
    let s2 = desugar_possibility(&s1, &mut fresh);
    stages.push(("possibility", s2.clone()));
    let (s3, constants) = eliminate_constancy(&s2, registry, &mut fresh);
    stages.push(("constancy", s3.clone()));
    let s4 = to_clean(&s3);
    debug_assert!(is_clean(&s4));
    stages.push(("clean", s4.clone()));
    let body = build_sentence(&s4, &Membership::Base(tuple.clone()), registry, &mut fresh)?;
    let mut sentence = Formula::exists_all(&constants, body);
    if options.simplify {
        sentence = simplify(&sentence);
    }
    let stats = TranslateStats {
        input_size: phi.size(),
        clean_size: s4.size(),
        output_size: sentence.size(),
        output_depth: sentence.depth(),
        constants: constants.len(),
    };
    Ok(TranslationResult { target: phi.clone(), sentence, tuple, stages, constants, fresh: fresh.issued().to_vec(), stats })
}

/// `nonincl(x;y)` becomes `E z. (const(z) /\ poss(z = x) /\ z != y)` and
/// `noncindep(x;y|w)` becomes
/// `E p q r. (const(p,q,r) /\ poss(p = x /\ r = w) /\ poss(q = y /\ r = w) /\ (p,q,r) != (x,y,w))`.
pub fn desugar_negated_atoms(phi: &Formula, registry: &AtomRegistry, fresh: &mut FreshVars) -> Formula {
    let rec = |f: &Formula, fresh: &mut FreshVars| desugar_negated_atoms(f, registry, fresh);
    match phi {
        Formula::Dep(call) => {
            let Some(def) = registry.get(&call.name) else { return phi.clone() };
            let t = |vs: &[Var]| terms(vs);
            if def.is_builtin(Builtin::Nonincl) {
                let (x, y) = (&call.groups[0], &call.groups[1]);
                let z = fresh.fresh_tuple(x.len());
                let body = conjunction([
                    Formula::Dep(AtomCall::new("const", vec![z.clone()])),
                    Formula::possibly(tuple_equal(&t(&z), &t(x))),
                    inequalities(&t(&z), &t(y)),
                ]);
                Formula::exists_all(&z, body)
            } else if def.is_builtin(Builtin::Noncindep) {
                let (x, y, w) = (&call.groups[0], &call.groups[1], &call.groups[2]);
                let (p, q, r) = (fresh.fresh_tuple(x.len()), fresh.fresh_tuple(y.len()), fresh.fresh_tuple(w.len()));
                let pqr: Vec<Var> = p.iter().chain(&q).chain(&r).cloned().collect();
                let xyw: Vec<Var> = x.iter().chain(y).chain(w).cloned().collect();
                let pr: Vec<Var> = p.iter().chain(&r).cloned().collect();
                let xw: Vec<Var> = x.iter().chain(w).cloned().collect();
                let qr: Vec<Var> = q.iter().chain(&r).cloned().collect();
                let yw: Vec<Var> = y.iter().chain(w).cloned().collect();
                let body = conjunction([
                    Formula::Dep(AtomCall::new("const", vec![pqr.clone()])),
                    Formula::possibly(tuple_equal(&t(&pr), &t(&xw))),
                    Formula::possibly(tuple_equal(&t(&qr), &t(&yw))),
                    inequalities(&t(&pqr), &t(&xyw)),
                ]);
                Formula::exists_all(&pqr, body)
            } else {
                phi.clone()
            }
        }
        Formula::Or(a, b) => Formula::or(rec(a, fresh), rec(b, fresh)),
        Formula::And(a, b) => Formula::and(rec(a, fresh), rec(b, fresh)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), rec(a, fresh)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), rec(a, fresh)),
        Formula::Possibly(a) => Formula::possibly(rec(a, fresh)),
        Formula::RestrictedBy(a, theta) => Formula::restricted_by(rec(a, fresh), (**theta).clone()),
        _ => phi.clone(),
    }
}

fn tuple_equal(a: &[Term], b: &[Term]) -> Formula {
    conjunction(a.iter().zip(b).map(|(l, r)| Formula::eq(l.clone(), r.clone())))
}

/// Replaces every `const(y)` by `y = v` with fresh `v`, returning the new
/// variables. `M ⊨_X phi` iff some values `c` for them give
/// `M ⊨_{X[c/v]} phi'`.
pub fn eliminate_constancy(phi: &Formula, registry: &AtomRegistry, fresh: &mut FreshVars) -> (Formula, Vec<Var>) {
    fn go(phi: &Formula, registry: &AtomRegistry, fresh: &mut FreshVars, out: &mut Vec<Var>) -> Formula {
        match phi {
            Formula::Dep(call) if registry.get(&call.name).is_some_and(|d| d.is_builtin(Builtin::Const)) => {
                let ys = call.args();
                let vs = fresh.fresh_tuple(ys.len());
                out.extend(vs.iter().cloned());
                tuple_equal(&terms(&ys), &terms(&vs))
            }
            Formula::Or(a, b) => Formula::or(go(a, registry, fresh, out), go(b, registry, fresh, out)),
            Formula::And(a, b) => Formula::and(go(a, registry, fresh, out), go(b, registry, fresh, out)),
            Formula::Exists(v, a) => Formula::exists(v.clone(), go(a, registry, fresh, out)),
            Formula::Forall(v, a) => Formula::forall(v.clone(), go(a, registry, fresh, out)),
            Formula::Possibly(a) => Formula::possibly(go(a, registry, fresh, out)),
            Formula::RestrictedBy(a, theta) => Formula::restricted_by(go(a, registry, fresh, out), (**theta).clone()),
            _ => phi.clone(),
        }
    }
    let mut out = Vec::new();
    let f = go(phi, registry, fresh, &mut out);
    (f, out)
}

/// Pushes dependency material out of disjunctions and existentials:
///
/// * `a \/ b` becomes `(a^f \/ b^f) /\ restrict(a' ; a^f) /\ restrict(b' ; b^f)`
/// * `E v. a` becomes `(E v. a^f) /\ A v. restrict(a' ; a^f)`
///
/// where `^f` is the flattening and `'` the recursive result. Sound when
/// every atom is upwards closed.
pub fn to_clean(phi: &Formula) -> Formula {
    if is_first_order(phi) {
        return phi.clone();
    }
    match phi {
        Formula::Or(a, b) => {
            let (fa, fb) = (flatten(a), flatten(b));
            conjunction([
                Formula::or(fa.clone(), fb.clone()),
                Formula::restricted_by(to_clean(a), fa),
                Formula::restricted_by(to_clean(b), fb),
            ])
        }
        Formula::Exists(v, a) => {
            let fa = flatten(a);
            Formula::and(Formula::exists(v.clone(), fa.clone()), Formula::forall(v.clone(), Formula::restricted_by(to_clean(a), fa)))
        }
        Formula::And(a, b) => Formula::and(to_clean(a), to_clean(b)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), to_clean(a)),
        Formula::Possibly(a) => Formula::possibly(to_clean(a)),
        Formula::RestrictedBy(a, theta) => Formula::restricted_by(to_clean(a), (**theta).clone()),
        _ => phi.clone(),
    }
}

/// The current team as a first-order condition on its variables.
#[derive(Debug, Clone)]
pub enum Membership {
    /// The rows of `_R`, columns named by the variables.
    Base(Vec<Var>),
    /// The rows of `inner` satisfying the condition.
    Restricted(Box<Membership>, Formula),
    /// `inner` duplicated along a variable; the new variable list is `vars`.
    Extended { inner: Box<Membership>, var: Var, vars: Vec<Var> },
}

impl Membership {
    pub fn vars(&self) -> &[Var] {
        match self {
            Membership::Base(vs) => vs,
            Membership::Restricted(inner, _) => inner.vars(),
            Membership::Extended { vars, .. } => vars,
        }
    }

    /// Membership of the row whose values are `args`, one per variable.
    pub fn member(&self, args: &[Term], fresh: &mut FreshVars) -> Formula {
        match self {
            Membership::Base(_) => Formula::Rel { positive: true, name: TEAM_RELATION.into(), args: args.to_vec() },
            Membership::Restricted(inner, theta) => {
                let map: BTreeMap<Var, Term> = inner.vars().iter().cloned().zip(args.iter().cloned()).collect();
                Formula::and(inner.member(args, fresh), substitute(theta, &map))
            }
            Membership::Extended { inner, var, vars } => {
                let pos = vars.iter().position(|v| v == var).expect("extended variable listed");
                if inner.vars().contains(var) {
                    // the old value of an overwritten variable is arbitrary
                    let w = fresh.fresh();
                    let mut old = args.to_vec();
                    old[pos] = Term::Var(w.clone());
                    Formula::exists(w, inner.member(&old, fresh))
                } else {
                    let mut old = args.to_vec();
                    old.remove(pos);
                    inner.member(&old, fresh)
                }
            }
        }
    }
}

/// Capture-free substitution for free variables of a first-order formula.
/// Bound variables in the image are assumed fresh.
pub fn substitute(phi: &Formula, map: &BTreeMap<Var, Term>) -> Formula {
    let term = |t: &Term| match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        c => c.clone(),
    };
    match phi {
        Formula::Rel { positive, name, args } => Formula::Rel { positive: *positive, name: name.clone(), args: args.iter().map(term).collect() },
        Formula::Eq { positive, left, right } => Formula::Eq { positive: *positive, left: term(left), right: term(right) },
        Formula::Or(a, b) => Formula::or(substitute(a, map), substitute(b, map)),
        Formula::And(a, b) => Formula::and(substitute(a, map), substitute(b, map)),
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            let mut inner = map.clone();
            inner.remove(v);
            let body = substitute(a, &inner);
            if matches!(phi, Formula::Exists(..)) {
                Formula::exists(v.clone(), body)
            } else {
                Formula::forall(v.clone(), body)
            }
        }
        Formula::Dep(call) => {
            let groups = call.groups.iter().map(|g| g.iter().map(|v| map.get(v).and_then(Term::as_var).cloned().unwrap_or_else(|| v.clone())).collect()).collect();
            Formula::Dep(AtomCall { groups, ..call.clone() })
        }
        Formula::Possibly(a) => Formula::possibly(substitute(a, map)),
        Formula::RestrictedBy(a, theta) => Formula::restricted_by(substitute(a, map), substitute(theta, map)),
        Formula::Top | Formula::Bottom => phi.clone(),
    }
}

/// Translates a clean formula evaluated on the team described by `team`.
pub fn build_sentence(phi: &Formula, team: &Membership, registry: &AtomRegistry, fresh: &mut FreshVars) -> Result<Formula, TranslateError> {
    let vars = team.vars().to_vec();
    let here = terms(&vars);
    if is_first_order(phi) {
        // every row satisfies phi
        let guard = negate_fo(&team.member(&here, fresh)).expect("membership is first-order");
        return Ok(Formula::forall_all(&vars, Formula::or(guard, phi.clone())));
    }
    match phi {
        Formula::Dep(call) => {
            let def = registry.lookup(call)?;
            let Some(def_fo) = def.fo_definition(call, PROJECTION, fresh) else {
                return Err(TranslateError::NotUpwardsClosed(call.name.clone()));
            };
            let args = terms(&call.args());
            Ok(replace_projection(&def_fo, &mut |ys: &[Term], fresh: &mut FreshVars| {
                // ys is the projection of some row onto the atom's arguments
                let body = Formula::and(team.member(&here, fresh), tuple_equal(ys, &args));
                Formula::exists_all(&vars, body)
            }, fresh))
        }
        Formula::And(a, b) => Ok(Formula::and(build_sentence(a, team, registry, fresh)?, build_sentence(b, team, registry, fresh)?)),
        Formula::Forall(v, a) => {
            let mut new_vars = vars.clone();
            if !new_vars.contains(v) {
                new_vars.push(v.clone());
            }
            let ext = Membership::Extended { inner: Box::new(team.clone()), var: v.clone(), vars: new_vars };
            build_sentence(a, &ext, registry, fresh)
        }
        Formula::RestrictedBy(a, theta) => build_sentence(a, &Membership::Restricted(Box::new(team.clone()), (**theta).clone()), registry, fresh),
        _ => unreachable!("clean formulas have first-order disjunctions and existentials and no possibility"),
    }
}

/// Replaces every occurrence of the projection symbol using `f`, which
/// receives the occurrence's arguments. Bound variables of `phi` are fresh,
/// so the team variables introduced by `f` cannot be captured.
fn replace_projection(phi: &Formula, f: &mut impl FnMut(&[Term], &mut FreshVars) -> Formula, fresh: &mut FreshVars) -> Formula {
    match phi {
        Formula::Rel { positive, name, args } if name == PROJECTION => {
            let m = f(args, fresh);
            if *positive {
                m
            } else {
                negate_fo(&m).expect("first-order")
            }
        }
        Formula::Or(a, b) => Formula::or(replace_projection(a, f, fresh), replace_projection(b, f, fresh)),
        Formula::And(a, b) => Formula::and(replace_projection(a, f, fresh), replace_projection(b, f, fresh)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), replace_projection(a, f, fresh)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), replace_projection(a, f, fresh)),
        _ => phi.clone(),
    }
}

fn nullary_true(phi: &Formula) -> Formula {
    match phi {
        Formula::Rel { positive, name, args } if name == TEAM_RELATION && args.is_empty() => {
            if *positive {
                Formula::Top
            } else {
                Formula::Bottom
            }
        }
        Formula::Or(a, b) => Formula::or(nullary_true(a), nullary_true(b)),
        Formula::And(a, b) => Formula::and(nullary_true(a), nullary_true(b)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), nullary_true(a)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), nullary_true(a)),
        _ => phi.clone(),
    }
}

/// Folds `T`/`F`, drops quantifiers over unused variables and rewrites
/// trivial equalities. Preserves truth on every model.
pub fn simplify(phi: &Formula) -> Formula {
    match phi {
        Formula::Eq { positive, left, right } if left == right => {
            if *positive {
                Formula::Top
            } else {
                Formula::Bottom
            }
        }
        Formula::And(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Bottom, _) | (_, Formula::Bottom) => Formula::Bottom,
            (Formula::Top, x) | (x, Formula::Top) => x,
            (x, y) => Formula::and(x, y),
        },
        Formula::Or(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Top, _) | (_, Formula::Top) => Formula::Top,
            (Formula::Bottom, x) | (x, Formula::Bottom) => x,
            (x, y) => Formula::or(x, y),
        },
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            let body = simplify(a);
            if !free_variables(&body).contains(v) {
                body
            } else if matches!(phi, Formula::Exists(..)) {
                Formula::exists(v.clone(), body)
            } else {
                Formula::forall(v.clone(), body)
            }
        }
        Formula::Possibly(a) => Formula::possibly(simplify(a)),
        Formula::RestrictedBy(a, theta) => Formula::restricted_by(simplify(a), simplify(theta)),
        _ => phi.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{EvalOptions, Evaluator};
    use crate::model::{CompiledFo, DenseRelation, Model, Team};
    use crate::syntax::{parse, vars};

    fn agrees(src: &str, model: &Model, teams: &[Team]) {
        let phi = parse(src).unwrap();
        let reg = AtomRegistry::builtin_ref();
        let opts = TranslateOptions { vars: Some(teams[0].vars().to_vec()), simplify: false };
        let tr = translate(&phi, reg, &opts).unwrap();
        let (name, k) = tr.relation();
        let prog = CompiledFo::compile(&tr.sentence, model, &[], &[(name, k)]).unwrap();
        let mut ev = Evaluator::new(model, reg, &phi, EvalOptions::oracle()).unwrap();
        for team in teams {
            let rel = DenseRelation::new(model.size(), k, &team.rows().iter().cloned().collect());
            let fo = prog.eval(&mut Vec::new(), &[&rel]);
            assert_eq!(ev.eval(team).unwrap(), fo, "{src} on {:?}", team.rows());
        }
    }

    fn all_teams(vs: &[&str], n: usize) -> Vec<Team> {
        let rows = crate::model::all_tuples(n, vs.len());
        (0..1u64 << rows.len()).map(|m| Team::new(vars(vs), rows.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, r)| r.clone()).collect()).unwrap()).collect()
    }

    #[test]
    fn sentences_translate_to_plain_first_order() {
        let m = Model::with_size(2).unwrap().with_relation("P", 1, &[&["a"]]).unwrap();
        for src in ["NE", "E x. (P(x) /\\ total(x))", "A x. E y. (x != y /\\ inconst(y))", "E x. const(x) /\\ E y. P(y)"] {
            agrees(src, &m, &[Team::unit(), Team::empty(Vec::new())]);
            let phi = parse(src).unwrap();
            let tr = translate(&phi, AtomRegistry::builtin_ref(), &TranslateOptions::default()).unwrap();
            let plain = tr.plain_sentence().unwrap();
            assert!(!plain.relation_symbols().iter().any(|(n, _)| n == TEAM_RELATION));
            let direct = crate::eval::sentence_true(&m, AtomRegistry::builtin_ref(), &phi, EvalOptions::oracle()).unwrap();
            assert_eq!(crate::model::tarski_eval(&m, &Default::default(), &plain).unwrap(), direct, "{src}");
        }
    }

    #[test]
    fn open_formulas_match_the_evaluator() {
        let m = Model::with_size(2).unwrap().with_relation("P", 1, &[&["a"]]).unwrap();
        let teams = all_teams(&["x", "y"], 2);
        for src in [
            "NE \\/ P(x)",
            "const(x) \\/ const(x)",
            "E y. (total(y) /\\ x != y) \\/ P(x)",
            "A y. nondep(x;y)",
            "intersect(x;y) /\\ inconst(x)",
            "nonincl(x;y)",
            "noncindep(x;y|x)",
            "poss(x = y) /\\ big(2;y)",
            "restrict(const(y) ; P(x)) \\/ nonexcl(x;y)",
        ] {
            agrees(src, &m, &teams);
        }
    }

    #[test]
    fn clean_output_of_the_rewrite() {
        let phi = parse("E y. total(y)").unwrap();
        assert_eq!(to_clean(&phi).to_string(), "(E y. T) /\\ A y. restrict(total(y) ; T)");
        assert!(is_clean(&to_clean(&parse("NE \\/ E x. NE").unwrap())));
    }

    #[test]
    fn constancy_becomes_equations() {
        let phi = parse("const(x,y) /\\ P(x)").unwrap();
        let mut fresh = FreshVars::avoiding([&phi]);
        let (out, vs) = eliminate_constancy(&phi, AtomRegistry::builtin_ref(), &mut fresh);
        assert_eq!(vs, vars(&["_v0", "_v1"]));
        assert_eq!(out.to_string(), "x = _v0 /\\ y = _v1 /\\ P(x)");
    }

    #[test]
    fn downwards_closed_atoms_are_rejected() {
        let phi = parse("dep(x;y)").unwrap();
        assert_eq!(translate(&phi, AtomRegistry::builtin_ref(), &TranslateOptions::default()), Err(TranslateError::NotUpwardsClosed("dep".into())));
    }

    #[test]
    fn variable_tuple_is_checked() {
        let phi = parse("P(x) /\\ NE").unwrap();
        let reg = AtomRegistry::builtin_ref();
        let opts = TranslateOptions { vars: Some(vars(&["y"])), simplify: false };
        assert_eq!(translate(&phi, reg, &opts), Err(TranslateError::MissingVariable(Var::new("x"))));
        let opts = TranslateOptions { vars: Some(vars(&["x", "x"])), simplify: false };
        assert_eq!(translate(&phi, reg, &opts), Err(TranslateError::DuplicateVariable(Var::new("x"))));
    }

    #[test]
    fn simplification_folds_constants() {
        assert_eq!(simplify(&parse("T /\\ (F \\/ P(x))").unwrap()), parse("P(x)").unwrap());
        assert_eq!(simplify(&parse("E y. x = x").unwrap()), Formula::Top);
    }
}
