use std::collections::BTreeMap;
use teamsem::model::{
    duplicate, enumerate_choice_functions, enumerate_covers, supplement, tarski_eval, team_project, team_restrict, Assignment,
};
use teamsem::syntax::vars;
use teamsem::{parse, Model, Team, Var};

fn abc() -> Model {
    Model::new(["a", "b", "c"]).unwrap()
}

fn team(m: &Model, vs: &[&str], rows: &[&[&str]]) -> Team {
    let rows = rows.iter().map(|r| r.iter().map(|n| m.element(n).unwrap()).collect()).collect();
    Team::new(vars(vs), rows).unwrap()
}

#[test]
fn restriction_merges_assignments() {
    let m = abc();
    let x = team(&m, &["x", "y"], &[&["a", "b"], &["a", "c"]]);
    let r = team_restrict(&x, &vars(&["x"])).unwrap();
    assert_eq!(r, team(&m, &["x"], &[&["a"]]));
    assert_eq!(team_restrict(&x, &vars(&["y", "x"])).unwrap(), x);
    let empty = Team::empty(vars(&["x", "y"]));
    assert!(team_restrict(&empty, &vars(&["x"])).unwrap().is_empty());
    assert!(team_restrict(&x, &vars(&["z"])).is_err());
}

#[test]
fn projection_keeps_repetitions() {
    let m = abc();
    let x = team(&m, &["x"], &[&["a"], &["b"]]);
    assert_eq!(team_project(&x, &vars(&["x"])).unwrap().into_iter().collect::<Vec<_>>(), vec![vec![0], vec![1]]);
    assert!(team_project(&Team::empty(vars(&["x"])), &vars(&["x"])).unwrap().is_empty());
    let xy = team(&m, &["x", "y"], &[&["a", "b"]]);
    assert_eq!(team_project(&xy, &vars(&["x", "x", "y"])).unwrap().into_iter().collect::<Vec<_>>(), vec![vec![0, 0, 1]]);
}

#[test]
fn duplication() {
    let m = Model::new(["a", "b"]).unwrap();
    let x = Var::new("x");
    assert_eq!(duplicate(&Team::unit(), &x, &m), team(&m, &["x"], &[&["a"], &["b"]]));
    assert!(duplicate(&Team::empty(vec![]), &x, &m).is_empty());
    // an existing column is overwritten, not added
    let t = team(&m, &["x", "y"], &[&["a", "a"], &["a", "b"]]);
    let d = duplicate(&t, &x, &m);
    assert_eq!(d.vars(), t.vars());
    assert_eq!(d, team(&m, &["x", "y"], &[&["a", "a"], &["a", "b"], &["b", "a"], &["b", "b"]]));
}

#[test]
fn supplementation() {
    let m = abc();
    let t = team(&m, &["x"], &[&["a"], &["b"]]);
    let v = vars(&["v"]);
    let constant = supplement(&t, &vec![vec![vec![0]]; 2], &v).unwrap();
    assert_eq!(constant, team(&m, &["v", "x"], &[&["a", "a"], &["a", "b"]]));
    let full = supplement(&t, &vec![vec![vec![0], vec![1], vec![2]]; 2], &v).unwrap();
    assert_eq!(full.len(), 6);
    // {x:a} gets v in {a, c}, {x:b} gets v = b
    let mixed = supplement(&t, &vec![vec![vec![0], vec![2]], vec![vec![1]]], &v).unwrap();
    assert_eq!(mixed, team(&m, &["v", "x"], &[&["a", "a"], &["c", "a"], &["b", "b"]]));
    assert!(supplement(&t, &vec![vec![vec![0]]], &v).is_err());
    assert!(supplement(&t, &vec![vec![], vec![vec![0]]], &v).is_err());
}

#[test]
fn cover_counts() {
    let m = abc();
    let counts: Vec<usize> = (0..=2)
        .map(|n| {
            let rows: Vec<&[&str]> = [&["a"][..], &["b"][..]][..n].to_vec();
            enumerate_covers(&team(&m, &["x"], &rows)).count()
        })
        .collect();
    assert_eq!(counts, [1, 3, 9]);
    for (y, z) in enumerate_covers(&team(&m, &["x"], &[&["a"], &["b"]])) {
        let mut both: Vec<_> = y.rows().iter().chain(z.rows()).cloned().collect();
        both.sort();
        both.dedup();
        assert_eq!(both.len(), 2);
    }
}

#[test]
fn choice_function_counts() {
    let m = Model::new(["a", "b"]).unwrap();
    let one = team(&m, &["x"], &[&["a"]]);
    let two = team(&m, &["x"], &[&["a"], &["b"]]);
    assert_eq!(enumerate_choice_functions(&one, 1, &m).unwrap().count(), 3);
    assert_eq!(enumerate_choice_functions(&Team::empty(vars(&["x"])), 1, &m).unwrap().count(), 1);
    assert_eq!(enumerate_choice_functions(&two, 1, &m).unwrap().count(), 9);
    assert!(enumerate_choice_functions(&two, 0, &m).is_err());
}

#[test]
fn tarski_examples() {
    let m = Model::new(["a", "b"]).unwrap().with_relation("P", 1, &[&["a"]]).unwrap().with_relation("R", 2, &[&["a", "b"], &["b", "b"]]).unwrap();
    let s: Assignment = BTreeMap::from([(Var::new("x"), 0)]);
    assert!(tarski_eval(&m, &s, &parse("P(x)").unwrap()).unwrap());
    assert!(tarski_eval(&m, &s, &parse("E y. y != x").unwrap()).unwrap());
    assert!(tarski_eval(&m, &Assignment::new(), &parse("A x. E y. R(x,y)").unwrap()).unwrap());
    assert!(!tarski_eval(&m, &Assignment::new(), &parse("A x. E y. R(y,x)").unwrap()).unwrap());
    assert!(tarski_eval(&m, &Assignment::new(), &parse("NE").unwrap()).is_err());
}

#[test]
fn json_round_trip() {
    let m = Model::new(["a", "b"]).unwrap().with_relation("P", 1, &[&["b"]]).unwrap();
    let back = Model::from_json(&m.to_json()).unwrap();
    assert_eq!(back, m);
    let t = team(&m, &["y", "x"], &[&["a", "b"], &["b", "b"]]);
    assert_eq!(Team::from_json(&m, &t.to_json(&m)).unwrap(), t);
    assert!(Team::from_json(&m, r#"{"vars":["x"],"rows":[["q"]]}"#).is_err());
}
