//! Exhaustive checking over small models and teams.
//!
//! A [`Grid`] fixes the models (every domain size from 2 up to a maximum,
//! every interpretation of a signature) and the teams (every set of at most
//! `max_rows` assignments). The checks here compare two verdicts at every
//! grid point and report the points where they differ. Unless stated
//! otherwise the team-semantic side uses the literal reference evaluator.

use crate::analysis::{compute_height, small_witness_with};
use crate::atoms::{combinations, permutations, AtomRegistry};
use crate::eval::{EvalError, EvalOptions, Evaluator};
use crate::model::{all_tuples, CompiledFo, DenseRelation, Elem, Model, ModelError, Team, TupleSet};
use crate::syntax::{flatten, free_variables, is_first_order, AtomCall, Formula, Var};
use crate::translate::{translate, TranslateError, TranslateOptions};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("models need at least 2 elements, got a maximum of {0}")]
    DomainTooSmall(usize),
    #[error("bad grid `{0}`: expected MAX_DOM:MAX_ROWS")]
    BadGrid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
}

pub type Signature = Vec<(String, usize)>;

/// Every model with 2 to `max_dom` elements over `signature`, by domain size
/// and then by relation tables. With `up_to_iso`, only the first model of
/// every isomorphism class is kept.
pub fn enumerate_models(signature: &[(String, usize)], max_dom: usize, up_to_iso: bool) -> Result<Vec<Model>, HarnessError> {
    if max_dom < 2 {
        return Err(HarnessError::DomainTooSmall(max_dom));
    }
    let mut out = Vec::new();
    for n in 2..=max_dom {
        let tables: Vec<Vec<Vec<Elem>>> = signature.iter().map(|(_, k)| all_tuples(n, *k)).collect();
        let bits: usize = tables.iter().map(Vec::len).sum();
        if bits >= 32 {
            return Err(HarnessError::Model(ModelError::ChoiceSpaceTooLarge(bits)));
        }
        let perms = if up_to_iso { permutations(n) } else { Vec::new() };
        let mut seen = BTreeSet::new();
        for code in 0..1u64 << bits {
            let mut m = Model::with_size(n)?;
            let mut at = 0;
            for ((name, k), tuples) in signature.iter().zip(&tables) {
                let chosen = tuples.iter().enumerate().filter(|(i, _)| code >> (at + i) & 1 == 1).map(|(_, t)| t.clone());
                m.add_relation(name.clone(), *k, chosen.collect::<Vec<_>>())?;
                at += tuples.len();
            }
            if up_to_iso {
                let canon = perms.iter().map(|p| relation_key(&m.permuted(p))).min().expect("at least the identity");
                if !seen.insert(canon) {
                    continue;
                }
            }
            out.push(m);
        }
    }
    Ok(out)
}

fn relation_key(m: &Model) -> Vec<TupleSet> {
    m.relations().values().map(|r| r.tuples.clone()).collect()
}

/// Every team over `vars` with at most `max_rows` rows, by size and then
/// lexicographically, starting with the empty team.
pub fn enumerate_teams(model: &Model, vars: &[Var], max_rows: usize) -> Vec<Team> {
    let mut sorted = vars.to_vec();
    sorted.sort();
    let rows = all_tuples(model.size(), sorted.len());
    let mut out = Vec::new();
    for k in 0..=max_rows.min(rows.len()) {
        combinations(rows.len(), k, &mut |idx: &[usize]| {
            out.push(Team::new(sorted.clone(), idx.iter().map(|&i| rows[i].clone()).collect()).expect("well-formed rows"));
        });
    }
    out
}

/// Models and team sizes to check over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub signature: Signature,
    pub max_dom: usize,
    pub max_rows: usize,
    pub up_to_iso: bool,
}

impl Grid {
    pub fn new(signature: Signature, max_dom: usize, max_rows: usize) -> Self {
        Grid { signature, max_dom, max_rows, up_to_iso: false }
    }

    /// One unary relation `P`, domains of 2 and 3 elements, at most 4 rows.
    pub fn default_unary() -> Self {
        Grid::new(vec![("P".into(), 1)], 3, 4)
    }

    /// Reads `MAX_DOM:MAX_ROWS` from `TEAMSEM_GRID` if set.
    pub fn from_env(self) -> Result<Self, HarnessError> {
        match std::env::var("TEAMSEM_GRID") {
            Ok(s) => self.with_spec(&s),
            Err(_) => Ok(self),
        }
    }

    pub fn with_spec(mut self, spec: &str) -> Result<Self, HarnessError> {
        let bad = || HarnessError::BadGrid(spec.into());
        let (d, r) = spec.split_once(':').ok_or_else(bad)?;
        self.max_dom = d.trim().parse().map_err(|_| bad())?;
        self.max_rows = r.trim().parse().map_err(|_| bad())?;
        if self.max_dom < 2 {
            return Err(HarnessError::DomainTooSmall(self.max_dom));
        }
        Ok(self)
    }

    pub fn models(&self) -> Result<Vec<Model>, HarnessError> {
        enumerate_models(&self.signature, self.max_dom, self.up_to_iso)
    }
}

/// One disagreement, with enough data to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub subject: String,
    pub model: serde_json::Value,
    pub team: serde_json::Value,
    pub left: bool,
    pub right: bool,
}

/// A verdict pair at one grid point, kept for verbose output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Point {
    pub subject: String,
    pub model: usize,
    pub team: serde_json::Value,
    pub left: bool,
    pub right: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub check: String,
    pub subjects: usize,
    pub points: usize,
    pub mismatches: Vec<Mismatch>,
    #[serde(skip)]
    pub details: Vec<Point>,
}

impl Report {
    pub fn new(check: impl Into<String>) -> Self {
        Report { check: check.into(), subjects: 0, points: 0, mismatches: Vec::new(), details: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn merge(&mut self, other: Report) {
        self.subjects += other.subjects;
        self.points += other.points;
        self.mismatches.extend(other.mismatches);
        self.details.extend(other.details);
    }

    /// The summary object, one line.
    pub fn summary_json(&self) -> String {
        serde_json::json!({
            "check": self.check,
            "subjects": self.subjects,
            "points": self.points,
            "mismatches": self.mismatches.len(),
            "passed": self.passed(),
            "first_mismatch": self.mismatches.first(),
        })
        .to_string()
    }

    /// One JSON object per recorded grid point, then the summary.
    pub fn json_lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self.details.iter().map(|p| serde_json::to_string(p).expect("serializable")).collect();
        out.push(self.summary_json());
        out
    }
}

fn json(text: String) -> serde_json::Value {
    serde_json::from_str(&text).expect("models and teams serialize to JSON")
}

/// Runs `point(model, team) -> (left, right)` over every grid point in
/// parallel over models, merging in grid order.
fn run_grid<F>(check: &str, subject: &str, grid: &Grid, verbose: bool, point: F) -> Result<Report, HarnessError>
where
    F: Fn(&Model, &mut dyn FnMut(&Team, bool, bool)) -> Result<(), HarnessError> + Sync,
{
    let models = grid.models()?;
    let parts: Vec<Result<Report, HarnessError>> = models
        .par_iter()
        .enumerate()
        .map(|(mi, m)| {
            let mut r = Report::new(check);
            point(m, &mut |team: &Team, left: bool, right: bool| {
                r.points += 1;
                if left != right {
                    r.mismatches.push(Mismatch { subject: subject.into(), model: json(m.to_json()), team: json(team.to_json(m)), left, right });
                }
                if verbose {
                    r.details.push(Point { subject: subject.into(), model: mi, team: json(team.to_json(m)), left, right });
                }
            })?;
            Ok(r)
        })
        .collect();
    let mut report = Report::new(check);
    report.subjects = 1;
    for p in parts {
        report.merge(p?);
    }
    Ok(report)
}

/// `M ⊨_X phi` against the translation evaluated with `_R := X(tuple)`.
pub fn check_translation_equivalence(phi: &Formula, tuple: Option<&[Var]>, grid: &Grid, registry: &AtomRegistry, verbose: bool) -> Result<Report, HarnessError> {
    let opts = TranslateOptions { vars: tuple.map(<[Var]>::to_vec), simplify: false };
    let tr = translate(phi, registry, &opts)?;
    check_sentence_against(phi, &tr.sentence, &tr.tuple, grid, registry, verbose)
}

/// The comparison behind [`check_translation_equivalence`], for an arbitrary
/// candidate sentence over `_R`.
pub fn check_sentence_against(phi: &Formula, sentence: &Formula, tuple: &[Var], grid: &Grid, registry: &AtomRegistry, verbose: bool) -> Result<Report, HarnessError> {
    let k = tuple.len();
    let rows = grid.max_rows;
    run_grid("translation", &phi.to_string(), grid, verbose, |m, record| {
        let prog = CompiledFo::compile(sentence, m, &[], &[(crate::translate::TEAM_RELATION, k)])?;
        let mut ev = Evaluator::new(m, registry, phi, EvalOptions::oracle())?;
        let mut env = Vec::new();
        for team in enumerate_teams(m, tuple, rows) {
            let rel: TupleSet = crate::model::team_project(&team, tuple)?;
            let fo = prog.eval(&mut env, &[&DenseRelation::new(m.size(), k, &rel)]);
            record(&team, ev.eval(&team)?, fo);
        }
        Ok(())
    })
}

/// Pointwise comparison of two formulas.
pub fn check_formula_equivalence(
    phi: &Formula,
    psi: &Formula,
    vars: &[Var],
    grid: &Grid,
    registry: &AtomRegistry,
    options: EvalOptions,
    verbose: bool,
) -> Result<Report, HarnessError> {
    let subject = format!("{phi}  vs  {psi}");
    let rows = grid.max_rows;
    run_grid("equivalence", &subject, grid, verbose, |m, record| {
        let mut left = Evaluator::new(m, registry, phi, options)?;
        let mut right = Evaluator::new(m, registry, psi, options)?;
        for team in enumerate_teams(m, vars, rows) {
            record(&team, left.eval(&team)?, right.eval(&team)?);
        }
        Ok(())
    })
}

/// Team evaluation of first-order formulas against row-by-row Tarski
/// evaluation.
pub fn check_flatness(formulas: &[Formula], vars: &[Var], grid: &Grid, registry: &AtomRegistry) -> Result<Report, HarnessError> {
    let mut report = Report::new("flatness");
    for phi in formulas.iter().filter(|f| is_first_order(f)) {
        let rows = grid.max_rows;
        let r = run_grid("flatness", &phi.to_string(), grid, false, |m, record| {
            let mut ev = Evaluator::new(m, registry, phi, EvalOptions::oracle())?;
            let fv: Vec<Var> = free_variables(phi).into_iter().collect();
            let prog = CompiledFo::compile(phi, m, &fv, &[])?;
            for team in enumerate_teams(m, vars, rows) {
                let cols: Vec<usize> = fv.iter().map(|v| team.column(v).expect("grid teams cover the variables")).collect();
                let rowwise = team.rows().iter().all(|r| prog.eval(&mut cols.iter().map(|&c| r[c]).collect(), &[]));
                record(&team, ev.eval(&team)?, rowwise);
            }
            Ok(())
        })?;
        report.merge(r);
    }
    Ok(report)
}

/// Verdicts are unchanged when the team is restricted to the free variables.
pub fn check_locality(formulas: &[Formula], vars: &[Var], grid: &Grid, registry: &AtomRegistry) -> Result<Report, HarnessError> {
    let mut report = Report::new("locality");
    for phi in formulas {
        let fv: Vec<Var> = free_variables(phi).into_iter().collect();
        let rows = grid.max_rows;
        let r = run_grid("locality", &phi.to_string(), grid, false, |m, record| {
            let mut ev = Evaluator::new(m, registry, phi, EvalOptions::oracle())?;
            for team in enumerate_teams(m, vars, rows) {
                let small = crate::model::team_restrict(&team, &fv)?;
                record(&team, ev.eval(&team)?, ev.eval(&small)?);
            }
            Ok(())
        })?;
        report.merge(r);
    }
    Ok(report)
}

/// For formulas whose atoms are all upwards closed:
///
/// * `M ⊨_X phi` implies every row of `X` satisfies `phi^f`;
/// * `X ⊆ Y`, `M ⊨_X phi` and `M ⊨_Y phi^f` imply `M ⊨_Y phi`.
///
/// A violation is reported with `left = true, right = false`.
pub fn check_upflat(formulas: &[Formula], vars: &[Var], grid: &Grid, registry: &AtomRegistry) -> Result<Report, HarnessError> {
    let mut report = Report::new("upflat");
    for phi in formulas {
        let flat = flatten(phi);
        let fv: Vec<Var> = free_variables(phi).into_iter().collect();
        let rows = grid.max_rows;
        let r = run_grid("upflat", &phi.to_string(), grid, false, |m, record| {
            let mut ev = Evaluator::new(m, registry, phi, EvalOptions::oracle())?;
            let prog = CompiledFo::compile(&flat, m, &fv, &[])?;
            for y in enumerate_teams(m, vars, rows) {
                let cols: Vec<usize> = fv.iter().map(|v| y.column(v).expect("grid teams cover the variables")).collect();
                let flat_rows: u64 = y.rows().iter().enumerate().filter(|(_, r)| prog.eval(&mut cols.iter().map(|&c| r[c]).collect(), &[])).fold(0, |m, (i, _)| m | 1 << i);
                let y_flat = flat_rows.count_ones() as usize == y.len();
                let y_sat = ev.eval(&y)?;
                // flattening implication on Y itself
                record(&y, true, !y_sat || y_flat);
                if y_flat && !y_sat {
                    for mask in 0..1u64 << y.len() {
                        let x = y.subteam(mask);
                        if ev.eval(&x)? {
                            record(&x, true, false);
                            break;
                        }
                    }
                }
            }
            Ok(())
        })?;
        report.merge(r);
    }
    Ok(report)
}

/// Every satisfying point of a finite-height formula has a satisfying
/// subteam within the height. A failure is reported with `left = true`.
pub fn check_height(formulas: &[Formula], vars: &[Var], grid: &Grid, registry: &AtomRegistry) -> Result<Report, HarnessError> {
    let mut report = Report::new("height");
    for phi in formulas {
        let Ok(h) = compute_height(phi, registry) else { continue };
        let Some(h) = h.value else { continue };
        let rows = grid.max_rows;
        let r = run_grid("height", &phi.to_string(), grid, false, |m, record| {
            let mut ev = Evaluator::new(m, registry, phi, EvalOptions::oracle())?;
            for team in enumerate_teams(m, vars, rows) {
                if ev.eval(&team)? {
                    let found = small_witness_with(&mut ev, &team, h).is_some();
                    record(&team, true, found);
                }
            }
            Ok(())
        })?;
        report.merge(r);
    }
    Ok(report)
}

/// Verdicts are preserved by renaming the elements of the model.
pub fn check_isomorphism_invariance(formulas: &[Formula], vars: &[Var], grid: &Grid, registry: &AtomRegistry) -> Result<Report, HarnessError> {
    let mut report = Report::new("isomorphism");
    for phi in formulas {
        let rows = grid.max_rows;
        let r = run_grid("isomorphism", &phi.to_string(), grid, false, |m, record| {
            let mut ev = Evaluator::new(m, registry, phi, EvalOptions::oracle())?;
            // one non-trivial permutation: reverse the domain
            let perm: Vec<Elem> = (0..m.size() as Elem).rev().collect();
            let pm = m.permuted(&perm);
            let mut pev = Evaluator::new(&pm, registry, phi, EvalOptions::oracle())?;
            for team in enumerate_teams(m, vars, rows) {
                record(&team, ev.eval(&team)?, pev.eval(&team.permuted(&perm))?);
            }
            Ok(())
        })?;
        report.merge(r);
    }
    Ok(report)
}

/// Formulas built level by level: level 0 holds the leaves, level `d`
/// combines each level `d-1` formula with every leaf by `\/` and `/\` (on
/// either side) and quantifies it over every variable. `per_level` keeps an
/// evenly spaced selection of each level so the corpus stays small.
#[derive(Debug, Clone)]
pub struct FormulaSpace {
    pub leaves: Vec<Formula>,
    pub vars: Vec<Var>,
    pub max_depth: usize,
    pub per_level: Option<usize>,
}

impl FormulaSpace {
    /// Literals over unary `relations` and the variables, plus the given atom
    /// instances.
    pub fn new(relations: &[&str], vars: &[Var], atoms: Vec<AtomCall>, max_depth: usize) -> Self {
        let mut leaves = Vec::new();
        for r in relations {
            for v in vars {
                leaves.push(Formula::rel(r, &[v.as_str()]));
                leaves.push(Formula::not_rel(r, &[v.as_str()]));
            }
        }
        for (i, a) in vars.iter().enumerate() {
            for b in &vars[i + 1..] {
                let (ta, tb) = (crate::syntax::Term::Var(a.clone()), crate::syntax::Term::Var(b.clone()));
                leaves.push(Formula::eq(ta.clone(), tb.clone()));
                leaves.push(Formula::neq(ta, tb));
            }
        }
        leaves.extend(atoms.into_iter().map(Formula::atom));
        FormulaSpace { leaves, vars: vars.to_vec(), max_depth, per_level: None }
    }

    pub fn per_level(mut self, n: usize) -> Self {
        self.per_level = Some(n);
        self
    }
}

/// Every instance of the named atoms with single-variable argument groups.
/// Names may carry a parameter, as in `big(2)`.
pub fn atom_instances(registry: &AtomRegistry, names: &[&str], vars: &[Var]) -> Vec<AtomCall> {
    let mut out = Vec::new();
    for spec in names {
        let (name, param) = match spec.split_once('(') {
            Some((n, rest)) => (n, rest.trim_end_matches(')').parse().ok()),
            None => (*spec, None),
        };
        let Some(def) = registry.get(name) else { continue };
        let g = def.shape.groups;
        let width = def.shape.fixed_arity.unwrap_or(1);
        for choice in all_tuples(vars.len(), g * width) {
            let groups: Vec<Vec<Var>> = choice.chunks(width.max(1)).map(|c| c.iter().map(|&i| vars[i as usize].clone()).collect()).collect();
            let groups = if g == 0 { Vec::new() } else { groups };
            out.push(AtomCall { name: name.into(), param, groups });
            if g == 0 {
                break;
            }
        }
    }
    out
}

/// The corpus described by `space`: deterministic and free of duplicates.
pub fn generate_formulas(space: &FormulaSpace) -> Vec<Formula> {
    let mut seen = BTreeSet::new();
    let mut corpus = Vec::new();
    let mut level: Vec<Formula> = space.leaves.iter().filter(|f| seen.insert((*f).clone())).cloned().collect();
    corpus.extend(level.iter().cloned());
    for _ in 0..space.max_depth {
        let mut next = Vec::new();
        for f in &level {
            for leaf in &space.leaves {
                next.push(Formula::or(f.clone(), leaf.clone()));
                next.push(Formula::and(f.clone(), leaf.clone()));
                next.push(Formula::or(leaf.clone(), f.clone()));
            }
            for v in &space.vars {
                next.push(Formula::exists(v.clone(), f.clone()));
                next.push(Formula::forall(v.clone(), f.clone()));
            }
        }
        next.retain(|f| seen.insert(f.clone()));
        if let Some(cap) = space.per_level {
            next = evenly_spaced(next, cap);
        }
        corpus.extend(next.iter().cloned());
        level = next;
    }
    corpus
}

fn evenly_spaced<T>(items: Vec<T>, cap: usize) -> Vec<T> {
    let n = items.len();
    if n <= cap || cap == 0 {
        return if cap == 0 { Vec::new() } else { items };
    }
    let keep: BTreeSet<usize> = (0..cap).map(|i| i * n / cap).collect();
    items.into_iter().enumerate().filter(|(i, _)| keep.contains(i)).map(|(_, x)| x).collect()
}

/// Preset corpora over the variables `x, y` and one unary relation `P`.
///
/// Quantifiers reuse `x` and `y`, so every team met during evaluation has at
/// most two columns.
pub mod corpus {
    use super::{atom_instances, generate_formulas, FormulaSpace};
    use crate::atoms::AtomRegistry;
    use crate::syntax::{vars, Formula, Var};

    pub const UPWARDS_ATOMS: [&str; 7] = ["NE", "intersect", "inconst", "big(2)", "total", "nondep", "nonexcl"];
    pub const OTHER_ATOMS: [&str; 5] = ["dep", "excl", "incl", "indep", "nonincl"];
    /// Formulas kept per depth level.
    pub const DEFAULT_PER_LEVEL: usize = 400;

    pub fn xy() -> Vec<Var> {
        vars(&["x", "y"])
    }

    fn build(atoms: &[&str], max_depth: usize, per_level: usize) -> Vec<Formula> {
        let xy = xy();
        let calls = atom_instances(AtomRegistry::builtin_ref(), atoms, &xy);
        generate_formulas(&FormulaSpace::new(&["P"], &xy, calls, max_depth).per_level(per_level))
    }

    /// Upwards closed atoms and constancy.
    pub fn translation(max_depth: usize, per_level: usize) -> Vec<Formula> {
        let atoms: Vec<&str> = UPWARDS_ATOMS.iter().copied().chain(["const"]).collect();
        build(&atoms, max_depth, per_level)
    }

    pub fn upwards(max_depth: usize, per_level: usize) -> Vec<Formula> {
        build(&UPWARDS_ATOMS, max_depth, per_level)
    }

    pub fn first_order(max_depth: usize, per_level: usize) -> Vec<Formula> {
        build(&[], max_depth, per_level)
    }

    /// Every built-in atom family except the three-group ones.
    pub fn mixed(max_depth: usize, per_level: usize) -> Vec<Formula> {
        let atoms: Vec<&str> = UPWARDS_ATOMS.iter().chain(&OTHER_ATOMS).copied().chain(["const"]).collect();
        build(&atoms, max_depth, per_level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, vars};

    fn sig(items: &[(&str, usize)]) -> Signature {
        items.iter().map(|(n, k)| (n.to_string(), *k)).collect()
    }

    #[test]
    fn model_counts() {
        assert_eq!(enumerate_models(&sig(&[("P", 1)]), 2, false).unwrap().len(), 4);
        assert_eq!(enumerate_models(&sig(&[("P", 1)]), 2, true).unwrap().len(), 3);
        assert_eq!(enumerate_models(&sig(&[]), 2, true).unwrap().len(), 1);
        assert_eq!(enumerate_models(&sig(&[("R", 2)]), 2, false).unwrap().len(), 16);
        assert_eq!(enumerate_models(&sig(&[("P", 1)]), 3, false).unwrap().len(), 12);
        assert!(enumerate_models(&sig(&[]), 1, false).is_err());
    }

    #[test]
    fn team_counts() {
        let m = Model::with_size(2).unwrap();
        assert_eq!(enumerate_teams(&m, &vars(&["x"]), 2).len(), 4);
        assert_eq!(enumerate_teams(&m, &vars(&["x"]), 0).len(), 1);
        assert_eq!(enumerate_teams(&m, &vars(&["x", "y"]), 4).len(), 16);
        let m3 = Model::with_size(3).unwrap();
        assert_eq!(enumerate_teams(&m3, &vars(&["x", "y"]), 4).len(), 256);
    }

    #[test]
    fn generation_is_deterministic_and_layered() {
        let reg = AtomRegistry::builtin_ref();
        let xs = vars(&["x"]);
        let space = FormulaSpace::new(&["P"], &xs, atom_instances(reg, &["NE"], &xs), 1);
        let corpus = generate_formulas(&space);
        assert!(corpus.contains(&parse("NE \\/ P(x)").unwrap()));
        assert_eq!(corpus, generate_formulas(&space));
        let leaves = generate_formulas(&FormulaSpace { max_depth: 0, ..space.clone() });
        assert!(leaves.iter().all(|f| f.depth() == 0));
        let capped = generate_formulas(&space.per_level(5));
        assert_eq!(capped.len(), leaves.len() + 5);
    }

    #[test]
    fn atom_instances_cover_argument_choices() {
        let reg = AtomRegistry::builtin_ref();
        let xy = vars(&["x", "y"]);
        let calls = atom_instances(reg, &["NE", "intersect", "big(2)"], &xy);
        let shown: Vec<String> = calls.iter().map(|c| c.to_string()).collect();
        assert_eq!(shown, ["NE", "intersect(x;x)", "intersect(x;y)", "intersect(y;x)", "intersect(y;y)", "big(2;x)", "big(2;y)"]);
    }

    #[test]
    fn translation_check_finds_corrupted_targets() {
        let reg = AtomRegistry::builtin_ref();
        let grid = Grid::new(sig(&[("P", 1)]), 2, 2);
        let phi = parse("NE").unwrap();
        assert!(check_translation_equivalence(&phi, None, &grid, reg, false).unwrap().passed());
        let tot = parse("total(x)").unwrap();
        assert!(check_translation_equivalence(&tot, None, &grid, reg, false).unwrap().passed());
        // dropping the team relation leaves a sentence that ignores X
        let bad = check_sentence_against(&tot, &Formula::Top, &vars(&["x"]), &grid, reg, false).unwrap();
        assert!(!bad.passed());
    }

    #[test]
    fn equivalence_of_possibility_and_its_desugaring() {
        let reg = AtomRegistry::builtin_ref();
        let grid = Grid::new(sig(&[("P", 1)]), 3, 3);
        let phi = parse("poss(P(x))").unwrap();
        let mut fresh = crate::syntax::FreshVars::avoiding([&phi]);
        let psi = crate::syntax::desugar_possibility(&phi, &mut fresh);
        let r = check_formula_equivalence(&phi, &psi, &vars(&["x"]), &grid, reg, EvalOptions::accelerated_unpruned(), true).unwrap();
        assert!(r.passed(), "{}", r.summary_json());
        assert_eq!(r.details.len(), r.points);
    }

    #[test]
    fn upflat_check_rejects_downwards_closed_atoms() {
        let reg = AtomRegistry::builtin_ref();
        let grid = Grid::new(sig(&[("P", 1)]), 2, 2);
        let xs = vars(&["x"]);
        assert!(check_upflat(&[parse("NE \\/ P(x)").unwrap()], &xs, &grid, reg).unwrap().passed());
        assert!(!check_upflat(&[parse("const(x)").unwrap()], &xs, &grid, reg).unwrap().passed());
    }

    #[test]
    fn grid_spec_parsing() {
        let g = Grid::default_unary().with_spec("2:3").unwrap();
        assert_eq!((g.max_dom, g.max_rows), (2, 3));
        assert!(Grid::default_unary().with_spec("3").is_err());
        assert!(Grid::default_unary().with_spec("1:3").is_err());
    }
}
