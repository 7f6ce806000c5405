use super::{AtomCall, Formula, FreshVars, Term, Var};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected a first-order formula, found `{0}`")]
pub struct NotFirstOrder(pub String);

/// Free variables; atom arguments count as free occurrences.
pub fn free_variables(phi: &Formula) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    collect_free(phi, &mut Vec::new(), &mut out);
    out
}

fn collect_free(phi: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    let mut add = |v: &Var, bound: &Vec<Var>| {
        if !bound.contains(v) {
            out.insert(v.clone());
        }
    };
    match phi {
        Formula::Top | Formula::Bottom => {}
        Formula::Rel { args, .. } => args.iter().filter_map(Term::as_var).for_each(|v| add(v, bound)),
        Formula::Eq { left, right, .. } => [left, right].into_iter().filter_map(Term::as_var).for_each(|v| add(v, bound)),
        Formula::Dep(call) => call.groups.iter().flatten().for_each(|v| add(v, bound)),
        Formula::Or(a, b) | Formula::And(a, b) | Formula::RestrictedBy(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Formula::Possibly(a) => collect_free(a, bound, out),
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            bound.push(v.clone());
            collect_free(a, bound, out);
            bound.pop();
        }
    }
}

/// True when the formula has no dependency atoms, `poss` or `restrict` nodes.
pub fn is_first_order(phi: &Formula) -> bool {
    match phi {
        Formula::Top | Formula::Bottom | Formula::Rel { .. } | Formula::Eq { .. } => true,
        Formula::Dep(_) | Formula::Possibly(_) | Formula::RestrictedBy(..) => false,
        Formula::Or(a, b) | Formula::And(a, b) => is_first_order(a) && is_first_order(b),
        Formula::Exists(_, a) | Formula::Forall(_, a) => is_first_order(a),
    }
}

/// Every disjunction is first-order or a `restrict` node, and every
/// existential subformula is first-order.
pub fn is_clean(phi: &Formula) -> bool {
    match phi {
        Formula::Or(..) | Formula::Exists(..) => is_first_order(phi),
        Formula::And(a, b) => is_clean(a) && is_clean(b),
        Formula::Forall(_, a) | Formula::Possibly(a) => is_clean(a),
        Formula::RestrictedBy(a, _) => is_clean(a),
        _ => true,
    }
}

/// Negation of a first-order formula, pushed to the literals.
pub fn negate_fo(theta: &Formula) -> Result<Formula, NotFirstOrder> {
    Ok(match theta {
        Formula::Top => Formula::Bottom,
        Formula::Bottom => Formula::Top,
        Formula::Rel { positive, name, args } => Formula::Rel { positive: !positive, name: name.clone(), args: args.clone() },
        Formula::Eq { positive, left, right } => Formula::Eq { positive: !positive, left: left.clone(), right: right.clone() },
        Formula::Or(a, b) => Formula::and(negate_fo(a)?, negate_fo(b)?),
        Formula::And(a, b) => Formula::or(negate_fo(a)?, negate_fo(b)?),
        Formula::Exists(v, a) => Formula::forall(v.clone(), negate_fo(a)?),
        Formula::Forall(v, a) => Formula::exists(v.clone(), negate_fo(a)?),
        Formula::Dep(_) | Formula::Possibly(_) | Formula::RestrictedBy(..) => return Err(NotFirstOrder(theta.to_string())),
    })
}

/// The flattening: dependency atoms and `poss` nodes become `T`, `restrict`
/// nodes are expanded into their first-order disjunction.
pub fn flatten(phi: &Formula) -> Formula {
    match phi {
        Formula::Top | Formula::Bottom | Formula::Rel { .. } | Formula::Eq { .. } => phi.clone(),
        Formula::Dep(_) | Formula::Possibly(_) => Formula::Top,
        Formula::Or(a, b) => Formula::or(flatten(a), flatten(b)),
        Formula::And(a, b) => Formula::and(flatten(a), flatten(b)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), flatten(a)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), flatten(a)),
        Formula::RestrictedBy(a, theta) => {
            let neg = negate_fo(theta).expect("restrict condition is first-order");
            Formula::or(neg, Formula::and((**theta).clone(), flatten(a)))
        }
    }
}

/// `(!theta) \/ (theta /\ phi)`.
pub fn restrict(phi: Formula, theta: &Formula) -> Result<Formula, NotFirstOrder> {
    Ok(Formula::or(negate_fo(theta)?, Formula::and(theta.clone(), phi)))
}

/// Left-nested conjunction; the empty conjunction is `T`.
pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
    parts.into_iter().reduce(Formula::and).unwrap_or(Formula::Top)
}

/// Left-nested disjunction; the empty disjunction is `F`.
pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
    parts.into_iter().reduce(Formula::or).unwrap_or(Formula::Bottom)
}

/// Componentwise `left = right` for tuples of equal length.
pub fn equalities(left: &[Term], right: &[Term]) -> Formula {
    assert_eq!(left.len(), right.len());
    conjunction(left.iter().zip(right).map(|(l, r)| Formula::eq(l.clone(), r.clone())))
}

/// Tuple inequality: some component differs.
pub fn inequalities(left: &[Term], right: &[Term]) -> Formula {
    assert_eq!(left.len(), right.len());
    disjunction(left.iter().zip(right).map(|(l, r)| Formula::neq(l.clone(), r.clone())))
}

/// Replaces every `poss(psi)` node, innermost first, by
///
/// `E u0. E u1. E v. (const(u0) /\ const(u1) /\ (v = u0 \/ v = u1) /\ restrict(psi ; v = u1) /\ inconst(v))`
///
/// with `u0, u1, v` taken from `fresh`. Equivalent to the original on models
/// with at least two elements.
pub fn desugar_possibility(phi: &Formula, fresh: &mut FreshVars) -> Formula {
    match phi {
        Formula::Top | Formula::Bottom | Formula::Rel { .. } | Formula::Eq { .. } | Formula::Dep(_) => phi.clone(),
        Formula::Or(a, b) => Formula::or(desugar_possibility(a, fresh), desugar_possibility(b, fresh)),
        Formula::And(a, b) => Formula::and(desugar_possibility(a, fresh), desugar_possibility(b, fresh)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), desugar_possibility(a, fresh)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), desugar_possibility(a, fresh)),
        Formula::RestrictedBy(a, theta) => Formula::restricted_by(desugar_possibility(a, fresh), (**theta).clone()),
        Formula::Possibly(a) => {
            let psi = desugar_possibility(a, fresh);
            let (u0, u1, v) = (fresh.fresh(), fresh.fresh(), fresh.fresh());
            let t = |x: &Var| Term::Var(x.clone());
            let body = conjunction([
                Formula::Dep(AtomCall::new("const", vec![vec![u0.clone()]])),
                Formula::Dep(AtomCall::new("const", vec![vec![u1.clone()]])),
                Formula::or(Formula::eq(t(&v), t(&u0)), Formula::eq(t(&v), t(&u1))),
                Formula::restricted_by(psi, Formula::eq(t(&v), t(&u1))),
                Formula::Dep(AtomCall::new("inconst", vec![vec![v.clone()]])),
            ]);
            Formula::exists_all(&[u0, u1, v], body)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn negation_dualizes() {
        assert_eq!(negate_fo(&p("x = y")).unwrap(), p("x != y"));
        assert_eq!(negate_fo(&p("P(x) /\\ Q(y)")).unwrap(), p("!P(x) \\/ !Q(y)"));
        assert_eq!(negate_fo(&p("A x. P(x)")).unwrap(), p("E x. !P(x)"));
        assert!(negate_fo(&p("NE")).is_err());
    }

    #[test]
    fn flattening_replaces_atoms() {
        assert_eq!(flatten(&p("NE")), Formula::Top);
        assert_eq!(flatten(&p("P(x) \\/ dep(x;y)")), p("P(x) \\/ T"));
        let fo = p("A x. E y. (P(x) \\/ x != y)");
        assert_eq!(flatten(&fo), fo);
        assert_eq!(flatten(&p("restrict(NE ; P(x))")), p("!P(x) \\/ (P(x) /\\ T)"));
        assert_eq!(flatten(&p("poss(NE)")), Formula::Top);
    }

    #[test]
    fn restriction_template() {
        assert_eq!(restrict(p("NE"), &p("P(x)")).unwrap(), p("!P(x) \\/ (P(x) /\\ NE)"));
        assert_eq!(restrict(p("NE"), &Formula::Top).unwrap(), p("F \\/ (T /\\ NE)"));
        assert!(restrict(p("NE"), &p("NE")).is_err());
    }

    #[test]
    fn free_variable_examples() {
        assert_eq!(free_variables(&p("dep(x;y)")), ["x", "y"].map(Var::from).into());
        assert_eq!(free_variables(&p("E x. P(x,y)")), [Var::from("y")].into());
        assert!(free_variables(&p("NE")).is_empty());
        assert_eq!(free_variables(&p("P(x) /\\ E x. P(x)")), [Var::from("x")].into());
    }

    #[test]
    fn cleanliness() {
        assert!(is_clean(&p("A x. E y. (P(x) \\/ x = y)")));
        assert!(!is_clean(&p("NE \\/ NE")));
        assert!(!is_clean(&p("E x. total(x)")));
        assert!(is_clean(&p("restrict(NE ; P(x)) /\\ A y. total(y)")));
    }

    #[test]
    fn possibility_desugaring_shape() {
        let phi = p("poss(x = y)");
        let mut fresh = FreshVars::avoiding([&phi]);
        let out = desugar_possibility(&phi, &mut fresh);
        let expected = Parser::new(crate::atoms::AtomRegistry::builtin_ref())
            .allow_reserved(true)
            .parse(
                "E _v0. E _v1. E _v2. (const(_v0) /\\ const(_v1) /\\ (_v2 = _v0 \\/ _v2 = _v1) \
                 /\\ restrict(x = y ; _v2 = _v1) /\\ inconst(_v2))",
            )
            .unwrap();
        assert_eq!(out, expected);
        let plain = p("P(x) \\/ NE");
        assert_eq!(desugar_possibility(&plain, &mut fresh), plain);
    }

    #[test]
    fn nested_possibility_is_desugared_innermost_first() {
        let phi = p("poss(poss(P(x)))");
        let mut fresh = FreshVars::avoiding([&phi]);
        let out = desugar_possibility(&phi, &mut fresh);
        let mut saw_poss = false;
        out.visit(&mut |f| saw_poss |= matches!(f, Formula::Possibly(_)));
        assert!(!saw_poss);
        // inner occurrence takes _v0.._v2, outer _v3.._v5
        assert!(matches!(&out, Formula::Exists(v, _) if v.as_str() == "_v3"));
    }

    use crate::syntax::Parser;
}
