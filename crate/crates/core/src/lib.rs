//! First-order team semantics with dependency atoms.
//!
//! * [`syntax`]: formulas, parsing, printing and syntactic rewrites.
//! * [`model`]: finite structures, teams and the team algebra.
//! * [`atoms`]: the dependency-atom registry and its property checkers.
//! * [`eval`]: the lax team-semantics evaluator.
//! * [`translate`]: compilation of formulas with upwards closed and
//!   constancy atoms into first-order sentences.
//! * [`analysis`]: heights and small satisfying subteams.
//! * [`harness`]: exhaustive enumeration of models, teams and formulas, and
//!   the equivalence checks built on it.

pub mod analysis;
pub mod atoms;
pub mod eval;
pub mod harness;
pub mod model;
pub mod syntax;
pub mod translate;

pub use eval::{eval, eval_with_stats, sentence_true, EvalError, EvalOptions, EvalStats, Evaluator, Strategy};
pub use atoms::{AtomDefinition, AtomError, AtomRegistry, Bound};

pub use model::{Elem, Model, ModelError, Team};
pub use translate::{translate, TranslateError, TranslateOptions, TranslationResult};
pub use syntax::{parse, AtomCall, Formula, ParseError, Parser, Term, Var};

