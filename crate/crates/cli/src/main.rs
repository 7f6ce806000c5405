//! `teamsem`: parse, evaluate, translate and check team-semantic formulas.
//!
//! Exit codes: 0 success, 1 counterexample or failed check, 2 usage, input
//! or parse error.

use clap::{Args, Parser as ClapParser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use teamsem::analysis::{compute_height, find_small_witness, min_atom_instances_lower_bound, AnalysisError};
use teamsem::atoms::{check_boundedness, check_upwards_closed, check_downwards_closed, sample_calls, CustomAtom};
use teamsem::harness::{self, corpus, Grid, Report};
use teamsem::syntax::{desugar_possibility, free_variables, is_clean, is_first_order, FreshVars};
use teamsem::translate::desugar_negated_atoms;
use teamsem::{
    AtomCall, AtomRegistry, EvalOptions, Evaluator, Formula, Model, Parser, Team, Term, TranslateOptions, Var,
};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    /// The check found a counterexample; the payload is already printed.
    #[error("{0}")]
    Counterexample(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Counterexample(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

type CliResult = Result<(), CliError>;

#[derive(ClapParser)]
#[command(name = "teamsem", version, about = "Team semantics workbench")]
struct Cli {
    /// Worker threads for exhaustive checks.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Custom atom files to load before running the command.
    #[arg(long = "atoms", global = true, value_name = "FILE")]
    atom_files: Vec<PathBuf>,
    /// Load custom atoms without verifying their declared flags.
    #[arg(long, global = true)]
    unchecked: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its structure.
    Parse {
        formula: String,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a formula on a team of a model.
    Eval(EvalArgs),
    /// Compile a formula into a first-order sentence over `_R`.
    Translate(TranslateArgs),
    /// Exhaustive property checks.
    #[command(subcommand)]
    Check(CheckCommand),
    /// List or register dependency atoms.
    #[command(subcommand)]
    Atoms(AtomsCommand),
    /// Height of a formula and a smallest satisfying subteam.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct EvalArgs {
    formula: String,
    #[arg(long)]
    model: PathBuf,
    /// Team file; required unless `--sentence`.
    #[arg(long)]
    team: Option<PathBuf>,
    /// Evaluate on the team containing only the empty assignment.
    #[arg(long, conflicts_with = "team")]
    sentence: bool,
    #[arg(long)]
    stats: bool,
    /// Print the split and choice trace of a satisfying evaluation.
    #[arg(long)]
    witness: bool,
    /// Use the literal reference evaluator without pruning.
    #[arg(long)]
    oracle: bool,
    /// Abort after this many rule applications.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct TranslateArgs {
    formula: String,
    /// Team variables in column order, comma separated.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    #[arg(long)]
    simplify: bool,
    /// Check the translation over the default grid before printing.
    #[arg(long)]
    verify: bool,
    /// Print a JSON object with the sentence, stages and statistics.
    #[arg(long)]
    json: bool,
    /// Write the statistics as JSON to this file.
    #[arg(long, value_name = "FILE")]
    sidecar: Option<PathBuf>,
    /// Grid for `--verify` as `MAX_DOM:MAX_ROWS`.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Upwards (or downwards) closure of an atom on its sample instances.
    Closure {
        atom: String,
        #[arg(long)]
        downwards: bool,
        #[command(flatten)]
        scale: Scale,
    },
    /// Whether every satisfying relation has a satisfying subrelation of at most `k` tuples.
    Bound {
        atom: String,
        k: usize,
        #[command(flatten)]
        scale: Scale,
    },
    /// Pointwise equivalence of two formulas over the grid.
    Equiv {
        left: String,
        right: String,
        /// Team variables; defaults to the free variables of both sides.
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        /// Use the literal reference evaluator (slow on nested quantifiers).
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run one of the exhaustive property suites over a generated corpus.
    Theorem {
        name: TheoremName,
        /// Maximum formula depth.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Formulas kept per generation level.
        #[arg(long, default_value_t = corpus::DEFAULT_PER_LEVEL)]
        per_level: usize,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Args)]
struct Scale {
    #[arg(long)]
    max_dom: Option<usize>,
    #[arg(long)]
    max_rel: Option<usize>,
}

#[derive(Args)]
struct GridArgs {
    /// `MAX_DOM:MAX_ROWS`; defaults to `TEAMSEM_GRID` or `3:4`.
    #[arg(long)]
    grid: Option<String>,
    /// One JSON line per grid point before the summary.
    #[arg(long)]
    verbose: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremName {
    Translation,
    Flatness,
    Locality,
    Upflat,
    Possibility,
    Macros,
    Height,
    Isomorphism,
}

#[derive(Subcommand)]
enum AtomsCommand {
    /// Print the catalog.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Verify a custom atom file and print its catalog entry.
    Register { file: PathBuf },
}

#[derive(Args)]
struct AnalyzeArgs {
    formula: String,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    team: PathBuf,
    /// Also report how many atoms of the formula's largest bound a
    /// definition of `n`-bigness needs.
    #[arg(long, value_name = "N")]
    big: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let mut registry = AtomRegistry::builtin();
    for path in &cli.atom_files {
        let spec = CustomAtom::from_json(&read(path)?).map_err(input)?;
        registry.register_custom(&spec, cli.unchecked).map_err(input)?;
    }
    match cli.command {
        Command::Parse { formula, json } => cmd_parse(&registry, &formula, json),
        Command::Eval(args) => cmd_eval(&registry, args),
        Command::Translate(args) => cmd_translate(&registry, args),
        Command::Check(c) => cmd_check(&registry, c),
        Command::Atoms(AtomsCommand::List { json }) => cmd_atoms_list(&registry, json),
        Command::Atoms(AtomsCommand::Register { file }) => cmd_atoms_register(&mut registry, &file, cli.unchecked),
        Command::Analyze(args) => cmd_analyze(&registry, args),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_with(registry: &AtomRegistry, model: Option<&Model>, text: &str) -> Result<Formula, CliError> {
    let mut p = Parser::new(registry);
    if let Some(m) = model {
        p = p.with_constants(m.constants().keys().cloned());
    }
    p.parse(text).map_err(input)
}

fn var_list(names: &[String]) -> Vec<Var> {
    names.iter().map(|n| Var::new(n.trim())).collect()
}

fn names(vs: impl IntoIterator<Item = Var>) -> Vec<String> {
    vs.into_iter().map(|v| v.as_str().to_string()).collect()
}

fn term_json(t: &Term) -> Value {
    match t {
        Term::Var(v) => json!({"var": v.as_str()}),
        Term::Const(c) => json!({"const": c}),
    }
}

fn ast_json(phi: &Formula) -> Value {
    match phi {
        Formula::Top => json!("T"),
        Formula::Bottom => json!("F"),
        Formula::Rel { positive, name, args } => {
            json!({"rel": name, "positive": positive, "args": args.iter().map(term_json).collect::<Vec<_>>()})
        }
        Formula::Eq { positive, left, right } => json!({"eq": [term_json(left), term_json(right)], "positive": positive}),
        Formula::Dep(call) => json!({"atom": call.name, "param": call.param, "groups": call.groups.iter().map(|g| names(g.iter().cloned())).collect::<Vec<_>>()}),
        Formula::Or(a, b) => json!({"or": [ast_json(a), ast_json(b)]}),
        Formula::And(a, b) => json!({"and": [ast_json(a), ast_json(b)]}),
        Formula::Exists(v, a) => json!({"exists": v.as_str(), "body": ast_json(a)}),
        Formula::Forall(v, a) => json!({"forall": v.as_str(), "body": ast_json(a)}),
        Formula::Possibly(a) => json!({"poss": ast_json(a)}),
        Formula::RestrictedBy(a, t) => json!({"restrict": ast_json(a), "by": ast_json(t)}),
    }
}

fn ast_lines(phi: &Formula, depth: usize, out: &mut Vec<String>) {
    let pad = "  ".repeat(depth);
    match phi {
        Formula::Or(a, b) | Formula::And(a, b) => {
            out.push(format!("{pad}{}", if matches!(phi, Formula::Or(..)) { "or" } else { "and" }));
            ast_lines(a, depth + 1, out);
            ast_lines(b, depth + 1, out);
        }
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            out.push(format!("{pad}{} {v}", if matches!(phi, Formula::Exists(..)) { "exists" } else { "forall" }));
            ast_lines(a, depth + 1, out);
        }
        Formula::Possibly(a) => {
            out.push(format!("{pad}poss"));
            ast_lines(a, depth + 1, out);
        }
        Formula::RestrictedBy(a, t) => {
            out.push(format!("{pad}restrict by {t}"));
            ast_lines(a, depth + 1, out);
        }
        leaf => out.push(format!("{pad}{leaf}")),
    }
}

fn cmd_parse(registry: &AtomRegistry, text: &str, as_json: bool) -> CliResult {
    let phi = parse_with(registry, None, text)?;
    let fv = names(free_variables(&phi));
    if as_json {
        let v = json!({
            "formula": phi.to_string(),
            "ast": ast_json(&phi),
            "free_variables": fv,
            "first_order": is_first_order(&phi),
            "clean": is_clean(&phi),
        });
        println!("{v}");
    } else {
        println!("{phi}");
        let mut lines = Vec::new();
        ast_lines(&phi, 1, &mut lines);
        for l in lines {
            println!("{l}");
        }
        println!("free variables: {}", if fv.is_empty() { "none".into() } else { fv.join(", ") });
        println!("first-order: {}", is_first_order(&phi));
        println!("clean: {}", is_clean(&phi));
    }
    Ok(())
}

fn load_model(path: &Path) -> Result<Model, CliError> {
    Model::from_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_team(model: &Model, path: &Path) -> Result<Team, CliError> {
    Team::from_json(model, &read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn cmd_eval(registry: &AtomRegistry, args: EvalArgs) -> CliResult {
    let model = load_model(&args.model)?;
    let phi = parse_with(registry, Some(&model), &args.formula)?;
    let team = match (&args.team, args.sentence) {
        (Some(p), _) => load_team(&model, p)?,
        (None, true) => Team::unit(),
        (None, false) => return Err(CliError::Input("either --team FILE or --sentence is required".into())),
    };
    let mut options = if args.oracle { EvalOptions::oracle() } else { EvalOptions::default() };
    options.budget = args.budget;
    let mut ev = Evaluator::new(&model, registry, &phi, options).map_err(input)?;
    let verdict = ev.eval(&team).map_err(input)?;
    println!("{verdict}");
    if args.witness && verdict {
        for l in ev.explain(&team).map_err(input)?.iter().skip(1) {
            println!("{l}");
        }
    }
    if args.stats {
        println!("{}", serde_json::to_string(&ev.stats()).expect("stats serialize"));
    }
    Ok(())
}

fn grid_for(phi: &[&Formula], spec: Option<&str>) -> Result<Grid, CliError> {
    let mut sig: Vec<(String, usize)> = phi.iter().flat_map(|f| f.relation_symbols()).collect();
    sig.sort();
    sig.dedup();
    if sig.is_empty() {
        sig.push(("P".into(), 1));
    }
    let grid = Grid { signature: sig, ..Grid::default_unary() }.from_env().map_err(input)?;
    match spec {
        Some(s) => grid.with_spec(s).map_err(input),
        None => Ok(grid),
    }
}

fn unchecked_atoms(registry: &AtomRegistry, phi: &Formula) -> Vec<String> {
    let mut out: Vec<String> = phi.atoms().iter().filter(|a| registry.get(&a.name).is_some_and(|d| d.unchecked)).map(|a| a.name.clone()).collect();
    out.sort();
    out.dedup();
    out
}

fn cmd_translate(registry: &AtomRegistry, args: TranslateArgs) -> CliResult {
    let phi = parse_with(registry, None, &args.formula)?;
    let opts = TranslateOptions { vars: args.vars.as_deref().map(var_list), simplify: args.simplify };
    let tr = teamsem::translate(&phi, registry, &opts).map_err(input)?;
    let unchecked = unchecked_atoms(registry, &phi);
    for name in &unchecked {
        eprintln!("warning: atom `{name}` was registered unchecked; its upwards closure is assumed, not verified");
    }
    if args.verify {
        let grid = grid_for(&[&phi], args.grid.as_deref())?;
        let report = harness::check_translation_equivalence(&phi, Some(&tr.tuple), &grid, registry, false).map_err(input)?;
        if !report.passed() {
            println!("{}", report.summary_json());
            return Err(CliError::Counterexample(format!("translation disagrees with evaluation at {} grid points", report.mismatches.len())));
        }
        eprintln!("verified at {} grid points", report.points);
    }
    let sidecar = json!({
        "formula": phi.to_string(),
        "relation": tr.relation().0,
        "tuple": names(tr.tuple.iter().cloned()),
        "constants": names(tr.constants.iter().cloned()),
        "simplified": args.simplify,
        "unchecked_atoms": unchecked,
        "stats": tr.stats,
    });
    if let Some(path) = &args.sidecar {
        std::fs::write(path, format!("{sidecar}\n")).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    if args.json {
        let mut v = sidecar;
        v["sentence"] = json!(tr.sentence.to_string());
        v["stages"] = tr.stages.iter().map(|(name, f)| json!({"stage": name, "formula": f.to_string()})).collect();
        println!("{v}");
    } else {
        println!("{}", tr.sentence);
    }
    Ok(())
}

fn print_report(report: &Report, verbose: bool) -> CliResult {
    if verbose {
        for l in report.json_lines() {
            println!("{l}");
        }
    } else {
        println!("{}", report.summary_json());
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Counterexample(format!("{}: {} mismatches", report.check, report.mismatches.len())))
    }
}

fn lookup_atom<'r>(registry: &'r AtomRegistry, name: &str) -> Result<&'r teamsem::AtomDefinition, CliError> {
    registry.get(name).ok_or_else(|| CliError::Input(format!("unknown atom `{name}`")))
}

fn run_atom_check(
    label: &str,
    def: &teamsem::AtomDefinition,
    check: impl Fn(&AtomCall) -> Result<(), teamsem::atoms::Counterexample>,
) -> CliResult {
    let calls = sample_calls(def);
    for call in &calls {
        if let Err(c) = check(call) {
            println!("{}", json!({"check": label, "atom": def.name, "passed": false, "counterexample": c.to_json()}));
            return Err(CliError::Counterexample(format!("{label} fails: {c}")));
        }
    }
    println!("{}", json!({"check": label, "atom": def.name, "passed": true, "instances": calls.len()}));
    Ok(())
}

fn cmd_check(registry: &AtomRegistry, c: CheckCommand) -> CliResult {
    match c {
        CheckCommand::Closure { atom, downwards, scale } => {
            let def = lookup_atom(registry, &atom)?;
            let (d, r) = (scale.max_dom.unwrap_or(3), scale.max_rel.unwrap_or(4));
            if downwards {
                run_atom_check("downwards closed", def, |call| check_downwards_closed(def, call, d, r))
            } else {
                run_atom_check("upwards closed", def, |call| check_upwards_closed(def, call, d, r))
            }
        }
        CheckCommand::Bound { atom, k, scale } => {
            let def = lookup_atom(registry, &atom)?;
            let (d, r) = (scale.max_dom.unwrap_or(3.max(k + 1)), scale.max_rel.unwrap_or(4.max(k + 1)));
            run_atom_check(&format!("bound {k}"), def, |call| check_boundedness(def, call, k, d, r))
        }
        CheckCommand::Equiv { left, right, vars, oracle, grid } => {
            let (a, b) = (parse_with(registry, None, &left)?, parse_with(registry, None, &right)?);
            let vs = match vars {
                Some(v) => var_list(&v),
                None => free_variables(&a).into_iter().chain(free_variables(&b)).collect::<std::collections::BTreeSet<_>>().into_iter().collect(),
            };
            let g = grid_for(&[&a, &b], grid.grid.as_deref())?;
            let options = if oracle { EvalOptions::oracle() } else { EvalOptions::accelerated_unpruned() };
            let r = harness::check_formula_equivalence(&a, &b, &vs, &g, registry, options, grid.verbose).map_err(input)?;
            print_report(&r, grid.verbose)
        }
        CheckCommand::Theorem { name, depth, per_level, grid } => {
            let g = grid_for(&[], grid.grid.as_deref())?;
            let r = run_theorem(registry, name, depth, per_level, &g, grid.verbose).map_err(input)?;
            print_report(&r, grid.verbose)
        }
    }
}

fn run_theorem(registry: &AtomRegistry, name: TheoremName, depth: usize, per: usize, g: &Grid, verbose: bool) -> Result<Report, harness::HarnessError> {
    let xy = corpus::xy();
    let each = |check: &str, formulas: Vec<Formula>, f: &dyn Fn(&Formula) -> Result<Report, harness::HarnessError>| {
        let mut total = Report::new(check);
        for phi in &formulas {
            total.merge(f(phi)?);
        }
        Ok(total)
    };
    match name {
        TheoremName::Translation => each("translation", corpus::translation(depth, per), &|phi| harness::check_translation_equivalence(phi, Some(&xy), g, registry, verbose)),
        TheoremName::Flatness => harness::check_flatness(&corpus::first_order(depth, per), &xy, g, registry),
        TheoremName::Locality => harness::check_locality(&corpus::mixed(depth, per), &xy, g, registry),
        TheoremName::Upflat => harness::check_upflat(&corpus::upwards(depth, per), &xy, g, registry),
        TheoremName::Height => harness::check_height(&corpus::translation(depth, per), &xy, g, registry),
        TheoremName::Isomorphism => harness::check_isomorphism_invariance(&corpus::mixed(depth, per), &xy, g, registry),
        TheoremName::Possibility => each("possibility", corpus::translation(depth.saturating_sub(1), per), &|psi| {
            let phi = Formula::possibly(psi.clone());
            let mut fresh = FreshVars::avoiding([&phi]);
            let sugar = desugar_possibility(&phi, &mut fresh);
            harness::check_formula_equivalence(&phi, &sugar, &xy, g, registry, EvalOptions::accelerated_unpruned(), verbose)
        }),
        TheoremName::Macros => {
            let mut calls = Vec::new();
            for name in ["nonincl", "noncindep"] {
                let def = registry.get(name).expect("built-in atom");
                calls.extend(sample_calls(def).into_iter().filter(|c| c.arity() <= 3));
            }
            let atoms: Vec<Formula> = calls.into_iter().map(Formula::atom).collect();
            each("macros", atoms, &|atom| {
                let mut fresh = FreshVars::avoiding([atom]);
                let expanded = desugar_negated_atoms(atom, registry, &mut fresh);
                let vs: Vec<Var> = free_variables(atom).into_iter().collect();
                harness::check_formula_equivalence(atom, &expanded, &vs, g, registry, EvalOptions::accelerated_unpruned(), verbose)
            })
        }
    }
}

fn atom_entry(def: &teamsem::AtomDefinition) -> Value {
    let arity = match def.shape.fixed_arity {
        Some(n) => n.to_string(),
        None => format!("{} groups", def.shape.groups),
    };
    json!({
        "name": def.name,
        "arity": arity,
        "parametric": def.shape.param,
        "upwards_closed": def.upwards_closed,
        "downwards_closed": def.downwards_closed,
        "bound": def.bound.to_string(),
        "unchecked": def.unchecked,
    })
}

fn cmd_atoms_list(registry: &AtomRegistry, as_json: bool) -> CliResult {
    let mut out = std::io::stdout().lock();
    for def in registry.iter() {
        let line = if as_json {
            atom_entry(def).to_string()
        } else {
            let flags = [(def.upwards_closed, "upwards"), (def.downwards_closed, "downwards"), (def.unchecked, "unchecked")]
                .iter()
                .filter(|(on, _)| *on)
                .map(|(_, s)| *s)
                .collect::<Vec<_>>()
                .join(",");
            format!("{:<10} {:<9} bound {:<9} {}", def.name, atom_entry(def)["arity"].as_str().unwrap_or_default(), def.bound.to_string(), flags)
        };
        // a closed pipe ends the listing
        if writeln!(out, "{}", line.trim_end()).is_err() {
            break;
        }
    }
    Ok(())
}

fn cmd_atoms_register(registry: &mut AtomRegistry, file: &Path, unchecked: bool) -> CliResult {
    let spec = CustomAtom::from_json(&read(file)?).map_err(input)?;
    match registry.register_custom(&spec, unchecked) {
        Ok(def) => {
            println!("{}", atom_entry(def));
            Ok(())
        }
        Err(teamsem::AtomError::Rejected { name, property, counterexample }) => {
            println!("{}", json!({"atom": name, "rejected": property, "counterexample": counterexample.to_json()}));
            Err(CliError::Counterexample(format!("declared property `{property}` of `{name}` fails: {counterexample}")))
        }
        Err(e) => Err(input(e)),
    }
}

fn cmd_analyze(registry: &AtomRegistry, args: AnalyzeArgs) -> CliResult {
    let model = load_model(&args.model)?;
    let phi = parse_with(registry, Some(&model), &args.formula)?;
    let team = load_team(&model, &args.team)?;
    let height = compute_height(&phi, registry).map_err(input)?;
    let (witness, status) = match find_small_witness(&model, registry, &team, &phi) {
        Ok(w) => (Some(w), "found"),
        Err(AnalysisError::UnboundedHeight) => (None, "unbounded height"),
        Err(AnalysisError::NotSatisfied) => (None, "team does not satisfy the formula"),
        Err(e @ AnalysisError::WitnessNotFound { .. }) => {
            println!("{}", json!({"height": height.value, "witness": null, "witness_size": null, "status": e.to_string()}));
            return Err(CliError::Counterexample(e.to_string()));
        }
        Err(e) => return Err(input(e)),
    };
    let mut report = json!({
        "height": height.value,
        "contributions": height.contributions,
        "witness": witness.as_ref().map(|w| serde_json::from_str::<Value>(&w.to_json(&model)).expect("team serializes")),
        "witness_size": witness.as_ref().map(Team::len),
        "status": status,
    });
    if let Some(n) = args.big {
        let k = height.contributions.iter().filter_map(|(_, b)| *b).max().unwrap_or(0);
        report["bigness"] = json!({
            "n": n,
            "atom_bound": k,
            "min_instances": min_atom_instances_lower_bound(k, n).ok(),
        });
    }
    println!("{report}");
    Ok(())
}
