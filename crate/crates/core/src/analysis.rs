//! Heights of formulas and small satisfying subteams.
//!
//! The height of a formula is the sum of the declared bounds of its atom
//! instances; constancy contributes 0 and first-order material nothing. A
//! team satisfying a formula of finite height `h` has a satisfying subteam
//! with at most `h` rows.

use crate::atoms::{combinations, AtomRegistry, Bound, Builtin};
use crate::eval::{EvalError, EvalOptions, Evaluator};
use crate::model::{Model, Team};
use crate::syntax::{AtomCall, Formula, Var};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("atom `{0}` is neither constancy nor upwards closed")]
    OutOfScope(String),
    #[error("`{0}` has no height: only atoms, literals and connectives are measured")]
    Unsupported(String),
    #[error("the formula has an atom without a finite bound")]
    UnboundedHeight,
    #[error("the team does not satisfy the formula")]
    NotSatisfied,
    #[error("no satisfying subteam with at most {height} rows: {formula} on {team}")]
    WitnessNotFound { formula: String, team: String, height: usize },
    #[error("a bound of 0 admits no instance count for n = {0}")]
    ZeroBound(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Height {
    /// `None` when some atom instance has no finite bound.
    pub value: Option<usize>,
    /// One entry per atom instance, in pre-order.
    pub contributions: Vec<(String, Option<usize>)>,
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Some(h) => write!(f, "{h}"),
            None => f.write_str("unbounded"),
        }
    }
}

pub fn compute_height(phi: &Formula, registry: &AtomRegistry) -> Result<Height, AnalysisError> {
    let mut contributions = Vec::new();
    collect(phi, registry, &mut contributions)?;
    let value = contributions.iter().try_fold(0usize, |acc, (_, b)| b.map(|b| acc + b));
    Ok(Height { value, contributions })
}

fn collect(phi: &Formula, registry: &AtomRegistry, out: &mut Vec<(String, Option<usize>)>) -> Result<(), AnalysisError> {
    match phi {
        Formula::Top | Formula::Bottom | Formula::Rel { .. } | Formula::Eq { .. } => Ok(()),
        Formula::Dep(call) => {
            out.push((call.to_string(), atom_bound(call, registry)?));
            Ok(())
        }
        Formula::Or(a, b) | Formula::And(a, b) => {
            collect(a, registry, out)?;
            collect(b, registry, out)
        }
        Formula::Exists(_, a) | Formula::Forall(_, a) => collect(a, registry, out),
        Formula::Possibly(_) | Formula::RestrictedBy(..) => Err(AnalysisError::Unsupported(phi.to_string())),
    }
}

fn atom_bound(call: &AtomCall, registry: &AtomRegistry) -> Result<Option<usize>, AnalysisError> {
    let def = registry.get(&call.name).ok_or_else(|| AnalysisError::OutOfScope(call.name.clone()))?;
    if def.is_builtin(Builtin::Const) {
        return Ok(Some(0));
    }
    if !def.upwards_closed {
        return Err(AnalysisError::OutOfScope(call.name.clone()));
    }
    Ok(match def.bound {
        Bound::Unbounded | Bound::Undeclared => None,
        _ => def.bound.for_call(call),
    })
}

/// A smallest satisfying subteam, searched by size up to the height.
pub fn find_small_witness(model: &Model, registry: &AtomRegistry, team: &Team, phi: &Formula) -> Result<Team, AnalysisError> {
    let height = compute_height(phi, registry)?.value.ok_or(AnalysisError::UnboundedHeight)?;
    let mut ev = Evaluator::new(model, registry, phi, EvalOptions::oracle())?;
    if !ev.eval(team)? {
        return Err(AnalysisError::NotSatisfied);
    }
    small_witness_with(&mut ev, team, height).ok_or_else(|| AnalysisError::WitnessNotFound {
        formula: phi.to_string(),
        team: team.to_json(model),
        height,
    })
}

/// Size-ordered search with a prepared evaluator; `None` if no subteam of at
/// most `max_rows` rows satisfies the formula.
pub fn small_witness_with(ev: &mut Evaluator, team: &Team, max_rows: usize) -> Option<Team> {
    for k in 0..=max_rows.min(team.len()) {
        let mut found = None;
        combinations(team.len(), k, &mut |idx: &[usize]| {
            if found.is_none() {
                let mask = idx.iter().fold(0u64, |m, &i| m | 1 << i);
                let sub = team.subteam(mask);
                if ev.eval(&sub).unwrap_or(false) {
                    found = Some(sub);
                }
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct TotalityWitness {
    pub model: Model,
    pub team: Team,
    /// `total(x)` holds on the team.
    pub satisfied: bool,
    /// Subteams of at most `n` rows checked, none satisfying `total(x)`.
    pub small_subteams_checked: usize,
    pub small_subteam_satisfies: bool,
}

impl TotalityWitness {
    pub fn holds(&self) -> bool {
        self.satisfied && !self.small_subteam_satisfies
    }
}

/// An `n+1`-element model and the team `{∅}[M/x]`: `total(x)` holds, but on
/// no subteam with at most `n` rows.
pub fn totality_unboundedness_witness(n: usize) -> Result<TotalityWitness, AnalysisError> {
    let model = Model::with_size(n + 1).map_err(EvalError::from)?;
    let x = Var::new("x");
    let team = crate::model::duplicate(&Team::unit(), &x, &model);
    let phi = Formula::atom(AtomCall::new("total", vec![vec![x]]));
    let mut ev = Evaluator::new(&model, AtomRegistry::builtin_ref(), &phi, EvalOptions::oracle())?;
    let satisfied = ev.eval(&team)?;
    let (mut checked, mut small) = (0, false);
    for k in 0..=n.min(team.len()) {
        combinations(team.len(), k, &mut |idx: &[usize]| {
            let sub = team.subteam(idx.iter().fold(0u64, |m, &i| m | 1 << i));
            checked += 1;
            small |= ev.eval(&sub).unwrap_or(true);
        });
    }
    Ok(TotalityWitness { model, team, satisfied, small_subteams_checked: checked, small_subteam_satisfies: small })
}

/// A formula equivalent to `n`-bigness built from `k`-bounded atoms needs at
/// least `⌈n/k⌉` of them.
pub fn min_atom_instances_lower_bound(k: usize, n: usize) -> Result<usize, AnalysisError> {
    match (k, n) {
        (0, 0) => Ok(0),
        (0, n) => Err(AnalysisError::ZeroBound(n)),
        (k, n) => Ok(n.div_ceil(k)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, vars};

    fn ht(src: &str) -> Option<usize> {
        compute_height(&parse(src).unwrap(), AtomRegistry::builtin_ref()).unwrap().value
    }

    #[test]
    fn heights_add_up() {
        assert_eq!(ht("A x. (P(x) \\/ x = x)"), Some(0));
        assert_eq!(ht("NE /\\ inconst(x)"), Some(3));
        assert_eq!(ht("const(x) \\/ big(3;x)"), Some(3));
        assert_eq!(ht("E x. total(x)"), None);
        assert!(matches!(compute_height(&parse("dep(x;y)").unwrap(), AtomRegistry::builtin_ref()), Err(AnalysisError::OutOfScope(_))));
    }

    #[test]
    fn witnesses_are_small() {
        let m = Model::with_size(3).unwrap();
        let reg = AtomRegistry::builtin_ref();
        let team = Team::new(vars(&["x", "y"]), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![2, 2]]).unwrap();
        let w = find_small_witness(&m, reg, &team, &parse("nondep(x;y)").unwrap()).unwrap();
        assert_eq!(w.rows(), &[vec![0, 0], vec![0, 1]]);
        assert_eq!(find_small_witness(&m, reg, &team, &parse("NE").unwrap()).unwrap().len(), 1);
        assert!(find_small_witness(&m, reg, &team, &parse("x = y").unwrap()).is_err());
        assert!(find_small_witness(&m, reg, &team, &parse("x = y \\/ T").unwrap()).unwrap().is_empty());
    }

    #[test]
    fn totality_needs_every_row() {
        for n in 1..=3 {
            let w = totality_unboundedness_witness(n).unwrap();
            assert_eq!(w.team.len(), n + 1);
            assert!(w.holds());
        }
    }

    #[test]
    fn instance_lower_bound() {
        assert_eq!(min_atom_instances_lower_bound(2, 5), Ok(3));
        assert_eq!(min_atom_instances_lower_bound(1, 1), Ok(1));
        assert_eq!(min_atom_instances_lower_bound(3, 3), Ok(1));
        assert!(min_atom_instances_lower_bound(0, 2).is_err());
    }
}
