//! LTLf formulas: hash-consed negation normal form, parsing, trace semantics.

mod alphabet;
mod ast;
mod eval;
mod formula;
mod intern;
mod parser;
mod spec;
mod trace;

pub use alphabet::{Alphabet, Proposition, SpecError};
pub use ast::Expr;
pub use eval::{evaluate, Evaluator};
pub use formula::{canonicalize, decompose, xnf, Formula, FormulaKind};
pub use parser::{parse_expr, parse_formula, ParseError};
pub use spec::SynthesisSpec;
pub use trace::{for_each_trace, EmptyTraceError, Letter, Trace};
