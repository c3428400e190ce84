//! Ways to supply a utility function besides closed-form closures.

mod expr;
mod tabular;

pub use expr::{Expr, ExprError, ExprUtility};
pub use tabular::{TabularError, TabularUtility};
