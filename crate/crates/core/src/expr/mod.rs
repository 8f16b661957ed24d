//! Scalar functions `f` and `h`: parsing, evaluation and exact derivative jets.

mod builtin;
mod function;
mod parse;
mod taylor;

pub use builtin::{
    cantor_big_h, cantor_distance, cantor_endpoints, cantor_h, cantor_position, Builtin,
    CantorPos, CANTOR_MAX_DIGITS, CANTOR_TABLE_DEPTH,
};
pub use function::{Jet, ScalarFunction};
pub use parse::{parse, BinOp, Expression, Func};
pub use taylor::{Taylor, MAX_ORDER};

/// Parses `src` into an expression tree.
pub fn parse_expression(src: &str) -> crate::error::Result<Expression> {
    parse(src)
}

/// Derivatives of `func` at `x` up to `order`.
pub fn eval_jet(func: &ScalarFunction, x: f64, order: usize) -> crate::error::Result<Jet> {
    func.eval_jet(x, order)
}

/// Named builtin constructor, e.g. `builtin("flat_bump", &[0.0, 1.0])`.
pub fn builtin(name: &str, params: &[f64]) -> crate::error::Result<ScalarFunction> {
    ScalarFunction::builtin(name, params)
}
