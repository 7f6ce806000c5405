//! Fixtures shared by the benchmarks.

use teamsem::harness::enumerate_teams;
use teamsem::syntax::vars;
use teamsem::{parse, Formula, Model, Team};

/// Formulas exercising each evaluator rule: a split, an existential block,
/// a universal, possibility and a translated corpus shape.
pub const FORMULAS: [(&str, &str); 6] = [
    ("literal", "P(x) /\\ x != y"),
    ("split", "nondep(x;y) \\/ P(x)"),
    ("choice", "E y. (inconst(y) /\\ P(y))"),
    ("universal", "A y. (nonexcl(x;y) \\/ P(y))"),
    ("possibility", "poss(x = y /\\ NE)"),
    ("nested", "E x. (NE \\/ total(x)) /\\ A y. (big(2;y) \\/ P(y))"),
];

pub fn formula(src: &str) -> Formula {
    parse(src).expect("benchmark formulas parse")
}

/// A 3-element model with `P = {a, b}`.
pub fn model() -> Model {
    let mut m = Model::with_size(3).expect("three elements");
    m.add_relation("P", 1, [vec![0], vec![1]]).expect("unary relation");
    m
}

/// Every team over `{x, y}` with at most `rows` rows.
pub fn teams(m: &Model, rows: usize) -> Vec<Team> {
    enumerate_teams(m, &vars(&["x", "y"]), rows)
}
