use proptest::prelude::*;
use teamsem::harness::{self, enumerate_teams, Grid};
use teamsem::model::{team_project, team_restrict};
use teamsem::syntax::{flatten, free_variables, is_first_order, negate_fo, vars};
use teamsem::{parse, translate, AtomRegistry, EvalOptions, Evaluator, Formula, Model, Team, Var};

const LEAVES: [&str; 12] = ["P(x)", "!P(y)", "x = y", "x != y", "T", "F", "NE", "nondep(x;y)", "inconst(x)", "total(y)", "big(2;x)", "const(y)"];
const EMPTY_OK_LEAVES: [&str; 8] = ["P(x)", "!P(y)", "x = y", "F", "const(y)", "dep(x;y)", "excl(x;y)", "incl(x;y)"];
const FO_LEAVES: [&str; 6] = ["P(x)", "!P(y)", "x = y", "x != y", "T", "F"];

fn formulas(leaves: &'static [&'static str], depth: u32, modal: bool) -> BoxedStrategy<Formula> {
    let leaf = prop::sample::select(leaves).prop_map(|s| parse(s).unwrap());
    leaf.prop_recursive(depth, 24, 2, move |inner| {
        let var = prop::sample::select(vec!["x", "y"]).prop_map(Var::new);
        let mut options = vec![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)).boxed(),
            (var.clone(), inner.clone()).prop_map(|(v, a)| Formula::exists(v, a)).boxed(),
            (var, inner.clone()).prop_map(|(v, a)| Formula::forall(v, a)).boxed(),
        ];
        if modal {
            options.push(inner.clone().prop_map(Formula::possibly).boxed());
            options.push(inner.prop_map(|a| Formula::restricted_by(a, parse("P(x)").unwrap())).boxed());
        }
        prop::strategy::Union::new(options)
    })
    .boxed()
}

fn model_p(size: usize, p: &[u32]) -> Model {
    let mut m = Model::with_size(size).unwrap();
    m.add_relation("P", 1, p.iter().map(|&e| vec![e])).unwrap();
    m
}

/// A small model with `P` and a team over `{x, y}`.
fn point(size: usize, rows: usize) -> impl Strategy<Value = (Model, Team)> {
    let elems = size as u32;
    (prop::collection::vec(0..elems, 0..=size), prop::collection::vec((0..elems, 0..elems), 0..=rows)).prop_map(move |(p, rs)| {
        let team = Team::new(vars(&["x", "y"]), rs.into_iter().map(|(a, b)| vec![a, b]).collect()).unwrap();
        (model_p(size, &p), team)
    })
}

fn eval_with(m: &Model, phi: &Formula, team: &Team, options: EvalOptions) -> bool {
    Evaluator::new(m, AtomRegistry::builtin_ref(), phi, options).unwrap().eval(team).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(phi in formulas(&LEAVES, 4, true)) {
        prop_assert_eq!(parse(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn dualization_is_an_involution(theta in formulas(&FO_LEAVES, 4, false)) {
        let twice = negate_fo(&negate_fo(&theta).unwrap()).unwrap();
        prop_assert_eq!(twice, theta);
    }

    #[test]
    fn flattening_is_idempotent_and_first_order(phi in formulas(&LEAVES, 4, true)) {
        let f = flatten(&phi);
        prop_assert!(is_first_order(&f));
        prop_assert_eq!(flatten(&f), f.clone());
        prop_assert!(free_variables(&f).is_subset(&free_variables(&phi)));
    }

    #[test]
    fn restriction_and_projection_agree((_, team) in point(3, 6)) {
        let x = vars(&["x"]);
        let r = team_restrict(&team, &x).unwrap();
        prop_assert!(r.len() <= team.len());
        prop_assert_eq!(r.is_empty(), team.is_empty());
        let projected: Vec<Vec<u32>> = team_project(&team, &x).unwrap().into_iter().collect();
        prop_assert_eq!(projected, r.rows().to_vec());
        prop_assert_eq!(team_restrict(&r, &x).unwrap(), r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Both strategies, pruned or not, give the literal reference verdict.
    #[test]
    fn strategies_agree(phi in formulas(&LEAVES, 3, true), (m, team) in point(2, 3)) {
        let reference = eval_with(&m, &phi, &team, EvalOptions::oracle());
        prop_assert_eq!(eval_with(&m, &phi, &team, EvalOptions::default()), reference);
        prop_assert_eq!(eval_with(&m, &phi, &team, EvalOptions::accelerated_unpruned()), reference);
        let pruned_reference = EvalOptions { strategy: teamsem::Strategy::Reference, ..EvalOptions::default() };
        prop_assert_eq!(eval_with(&m, &phi, &team, pruned_reference), reference);
    }

    /// Without atoms that demand rows, the empty team satisfies everything.
    #[test]
    fn empty_team_property(phi in formulas(&EMPTY_OK_LEAVES, 3, false), (m, _) in point(3, 0)) {
        prop_assert!(eval_with(&m, &phi, &Team::empty(vars(&["x", "y"])), EvalOptions::default()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_translations_are_sound(phi in formulas(&LEAVES[..11], 3, false)) {
        let grid = Grid::new(vec![("P".into(), 1)], 2, 3);
        let r = harness::check_translation_equivalence(&phi, Some(&vars(&["x", "y"])), &grid, AtomRegistry::builtin_ref(), false).unwrap();
        prop_assert!(r.passed(), "{}", r.summary_json());
    }
}

#[test]
fn isomorphism_spot_check() {
    let formulas: Vec<Formula> = ["E y. (nondep(x;y) /\\ P(y))", "A x. (total(x) \\/ P(x))", "poss(x = y) /\\ inconst(y)", "big(2;x) \\/ !P(x)", "nonincl(x;y)", "dep(x;y) \\/ excl(x;y)"]
        .iter()
        .map(|s| parse(s).unwrap())
        .collect();
    let r = harness::check_isomorphism_invariance(&formulas, &vars(&["x", "y"]), &Grid::default_unary(), AtomRegistry::builtin_ref()).unwrap();
    assert!(r.passed(), "{}", r.summary_json());
    assert_eq!(r.subjects, formulas.len());
}

#[test]
fn grid_enumeration_counts() {
    let sig = vec![("P".to_string(), 1)];
    assert_eq!(harness::enumerate_models(&sig, 2, false).unwrap().len(), 4);
    assert_eq!(harness::enumerate_models(&sig, 2, true).unwrap().len(), 3);
    assert_eq!(harness::enumerate_models(&[], 2, true).unwrap().len(), 1);
    assert_eq!(harness::enumerate_models(&[("R".to_string(), 2)], 2, false).unwrap().len(), 16);
    let m = Model::with_size(2).unwrap();
    assert_eq!(enumerate_teams(&m, &vars(&["x"]), 2).len(), 4);
    assert_eq!(enumerate_teams(&m, &vars(&["x"]), 0).len(), 1);
    assert_eq!(enumerate_teams(&m, &vars(&["x", "y"]), 4).len(), 16);
}

#[test]
fn sentences_on_the_unit_team() {
    let m = model_p(2, &[0]);
    let reg = AtomRegistry::builtin_ref();
    for (src, want) in [("E x. P(x)", true), ("NE", true), ("A x. total(x)", true), ("A x. P(x)", false), ("E x. inconst(x)", true)] {
        assert_eq!(teamsem::sentence_true(&m, reg, &parse(src).unwrap(), EvalOptions::oracle()).unwrap(), want, "{src}");
    }
}

#[test]
fn translation_is_deterministic() {
    let phi = parse("E y. (nondep(x;y) /\\ const(y)) \\/ P(x)").unwrap();
    let reg = AtomRegistry::builtin_ref();
    let a = translate(&phi, reg, &Default::default()).unwrap();
    let b = translate(&phi, reg, &Default::default()).unwrap();
    assert_eq!(a.sentence.to_string(), b.sentence.to_string());
}

#[test]
fn corpus_sizes_are_pinned() {
    use teamsem::harness::corpus;
    let per = corpus::DEFAULT_PER_LEVEL;
    assert_eq!(corpus::translation(3, per).len(), 1227);
    assert_eq!(corpus::first_order(3, per).len(), 902);
    assert_eq!(corpus::upwards(3, per).len(), 1225);
    assert_eq!(corpus::mixed(3, per).len(), 1247);
    assert_eq!(corpus::translation(2, 50).len(), 127);
}
