//! A small arithmetic language for utilities.
//!
//! ```text
//! expr    := compare
//! compare := sum (("<" | "<=" | ">" | ">=" | "==" | "!=") sum)?
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?
//! atom    := number | name | name "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! Names are `a` (the action label, counted from 1), `mu1 .. muN` (population
//! shares, also counted from 1), `z` (alias of `mu1`), and any user constant.
//! Comparisons evaluate to 1 or 0. `if(c, x, y)` only evaluates the branch it
//! takes, so `if(z > 0, P / z, 0)` is safe at `z = 0`. Other functions are
//! `min`, `max`, `abs`, `sqrt`, `exp` and `ln`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::game::{Distribution, Utility, UtilityKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("function `{name}` takes {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("`{name}` refers to action {index} but the game has {count} actions")]
    ComponentOutOfRange {
        name: String,
        index: usize,
        count: usize,
    },
    #[error("expected {expected} per-action expressions, got {found}")]
    ExpressionCount { expected: usize, found: usize },
    #[error("a game needs at least two actions, got {0}")]
    TooFewActions(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    If,
    Min,
    Max,
    Abs,
    Sqrt,
    Exp,
    Ln,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "if" => (Func::If, 3),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            "abs" => (Func::Abs, 1),
            "sqrt" => (Func::Sqrt, 1),
            "exp" => (Func::Exp, 1),
            "ln" => (Func::Ln, 1),
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Action,
    Share(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn eval(&self, action_label: f64, mu: &[f64]) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Action => action_label,
            Node::Share(i) => mu[*i],
            Node::Neg(x) => -x.eval(action_label, mu),
            Node::Bin(op, l, r) => {
                let l = l.eval(action_label, mu);
                let r = r.eval(action_label, mu);
                let b = |c: bool| if c { 1.0 } else { 0.0 };
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                    BinOp::Pow => l.powf(r),
                    BinOp::Lt => b(l < r),
                    BinOp::Le => b(l <= r),
                    BinOp::Gt => b(l > r),
                    BinOp::Ge => b(l >= r),
                    BinOp::Eq => b(l == r),
                    BinOp::Ne => b(l != r),
                }
            }
            Node::Call(f, args) => {
                let arg = |i: usize| args[i].eval(action_label, mu);
                match f {
                    Func::If => {
                        if arg(0) != 0.0 {
                            arg(1)
                        } else {
                            arg(2)
                        }
                    }
                    Func::Min => arg(0).min(arg(1)),
                    Func::Max => arg(0).max(arg(1)),
                    Func::Abs => arg(0).abs(),
                    Func::Sqrt => arg(0).sqrt(),
                    Func::Exp => arg(0).exp(),
                    Func::Ln => arg(0).ln(),
                }
            }
        }
    }
}

/// A compiled expression over the action label and population shares.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    /// Parses `source` for a game with `actions` actions. Constants are
    /// substituted at compile time.
    pub fn parse(
        source: &str,
        actions: usize,
        constants: &BTreeMap<String, f64>,
    ) -> Result<Self, ExprError> {
        let mut p = Parser {
            src: source.as_bytes(),
            pos: 0,
            actions,
            constants,
        };
        let root = p.compare()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expr {
            source: source.to_string(),
            root,
        })
    }

    /// Evaluates with `action` counted from zero.
    pub fn eval(&self, action: usize, mu: &[f64]) -> f64 {
        self.root.eval((action + 1) as f64, mu)
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    actions: usize,
    constants: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExprError {
        ExprError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn compare(&mut self) -> Result<Node, ExprError> {
        let lhs = self.sum()?;
        // Two-character operators first.
        let op = if self.eat("<=") {
            BinOp::Le
        } else if self.eat(">=") {
            BinOp::Ge
        } else if self.eat("==") {
            BinOp::Eq
        } else if self.eat("!=") {
            BinOp::Ne
        } else if self.eat("<") {
            BinOp::Lt
        } else if self.eat(">") {
            BinOp::Gt
        } else {
            return Ok(lhs);
        };
        let rhs = self.sum()?;
        Ok(Node::Bin(op, Box::new(lhs), Box::new(rhs)))
    }

    fn sum(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.compare()?;
                if !self.eat(")") {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.name(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        // Optional exponent: 1e-3, 2.5E+4.
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == digits {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Node::Num).map_err(|_| ExprError::Parse {
            pos: start,
            msg: format!("bad number `{text}`"),
        })
    }

    fn name(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .to_string();

        if self.peek() == Some(b'(') {
            let (func, arity) =
                Func::lookup(&name).ok_or_else(|| ExprError::UnknownFunction(name.clone()))?;
            self.pos += 1;
            let mut args = vec![self.compare()?];
            while self.eat(",") {
                args.push(self.compare()?);
            }
            if !self.eat(")") {
                return Err(self.error("expected `)` after arguments"));
            }
            if args.len() != arity {
                return Err(ExprError::Arity {
                    name,
                    expected: arity,
                    found: args.len(),
                });
            }
            return Ok(Node::Call(func, args));
        }

        if let Some(&v) = self.constants.get(&name) {
            return Ok(Node::Num(v));
        }
        match name.as_str() {
            "a" => Ok(Node::Action),
            "z" => Ok(Node::Share(0)),
            _ => {
                if let Some(index) = name.strip_prefix("mu").and_then(|s| s.parse::<usize>().ok()) {
                    if index == 0 || index > self.actions {
                        return Err(ExprError::ComponentOutOfRange {
                            name,
                            index,
                            count: self.actions,
                        });
                    }
                    return Ok(Node::Share(index - 1));
                }
                Err(ExprError::UnknownName(name))
            }
        }
    }
}

/// Utility defined by expressions, either one per action or a single one
/// branching on `a`.
#[derive(Clone, Debug)]
pub struct ExprUtility {
    count: usize,
    exprs: Vec<Expr>,
}

impl ExprUtility {
    pub fn per_action<S: AsRef<str>>(
        sources: &[S],
        constants: &BTreeMap<String, f64>,
    ) -> Result<Self, ExprError> {
        let count = sources.len();
        if count < 2 {
            return Err(ExprError::TooFewActions(count));
        }
        let exprs = sources
            .iter()
            .map(|s| Expr::parse(s.as_ref(), count, constants))
            .collect::<Result<_, _>>()?;
        Ok(ExprUtility { count, exprs })
    }

    pub fn single(
        source: &str,
        count: usize,
        constants: &BTreeMap<String, f64>,
    ) -> Result<Self, ExprError> {
        if count < 2 {
            return Err(ExprError::TooFewActions(count));
        }
        Ok(ExprUtility {
            count,
            exprs: vec![Expr::parse(source, count, constants)?],
        })
    }
}

impl Utility for ExprUtility {
    fn action_count(&self) -> usize {
        self.count
    }

    fn eval(&self, action: usize, mu: &Distribution) -> f64 {
        let e = if self.exprs.len() == 1 {
            &self.exprs[0]
        } else {
            &self.exprs[action]
        };
        e.eval(action, mu.weights())
    }

    fn kind(&self) -> UtilityKind {
        UtilityKind::Expression
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, action: usize, mu: &[f64]) -> f64 {
        let consts = BTreeMap::from([("gamma".to_string(), 2.0), ("P".to_string(), 0.6)]);
        Expr::parse(src, mu.len(), &consts).unwrap().eval(action, mu)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2 * 3", 0, &[0.5, 0.5]), 7.0);
        assert_eq!(eval("(1 + 2) * 3", 0, &[0.5, 0.5]), 9.0);
        assert_eq!(eval("-2^2", 0, &[0.5, 0.5]), -4.0);
        assert_eq!(eval("2^3^2", 0, &[0.5, 0.5]), 512.0);
        assert_eq!(eval("8 / 4 / 2", 0, &[0.5, 0.5]), 1.0);
        assert_eq!(eval("1 - 2 - 3", 0, &[0.5, 0.5]), -4.0);
        assert_eq!(eval("2 * -3", 0, &[0.5, 0.5]), -6.0);
        assert_eq!(eval("1.5e1 + .5", 0, &[0.5, 0.5]), 15.5);
    }

    #[test]
    fn names_and_functions() {
        assert_eq!(eval("-gamma * z", 0, &[0.25, 0.75]), -0.5);
        assert_eq!(eval("mu2", 0, &[0.25, 0.75]), 0.75);
        assert_eq!(eval("a", 2, &[0.2, 0.3, 0.5]), 3.0);
        assert_eq!(eval("(a == 1) * (1 - z) + (a == 2) * (1 - z) / 2", 1, &[0.5, 0.5]), 0.25);
        assert_eq!(eval("if(z > 0, P / z, 0)", 0, &[0.0, 1.0]), 0.0);
        assert_eq!(eval("if(z > 0, P / z, 0)", 0, &[0.5, 0.5]), 1.2);
        assert_eq!(eval("max(z, mu2) - min(z, mu2)", 0, &[0.25, 0.75]), 0.5);
        assert_eq!(eval("abs(-3) + sqrt(4) + ln(exp(1))", 0, &[0.5, 0.5]), 6.0);
        assert_eq!(eval("(z <= 0.5) + (z >= 0.5) + (z != 0.5) + (z < 1)", 0, &[0.5, 0.5]), 3.0);
    }

    #[test]
    fn errors() {
        let c = BTreeMap::new();
        assert!(matches!(Expr::parse("q + 1", 2, &c), Err(ExprError::UnknownName(_))));
        assert!(matches!(Expr::parse("foo(1)", 2, &c), Err(ExprError::UnknownFunction(_))));
        assert!(matches!(Expr::parse("min(1)", 2, &c), Err(ExprError::Arity { .. })));
        assert!(matches!(
            Expr::parse("mu3", 2, &c),
            Err(ExprError::ComponentOutOfRange { index: 3, .. })
        ));
        assert!(matches!(Expr::parse("(1 + 2", 2, &c), Err(ExprError::Parse { .. })));
        assert!(matches!(Expr::parse("1 2", 2, &c), Err(ExprError::Parse { .. })));
        assert!(matches!(Expr::parse("", 2, &c), Err(ExprError::Parse { .. })));
        assert!(ExprUtility::per_action(&["1"], &c).is_err());
    }

    #[test]
    fn utility_forms_agree() {
        let c = BTreeMap::new();
        let per = ExprUtility::per_action(&["1 - z", "(1 - z) / 2"], &c).unwrap();
        let single = ExprUtility::single("if(a == 1, 1 - z, (1 - z) / 2)", 2, &c).unwrap();
        for k in 0..=10 {
            let mu = Distribution::two_action(k as f64 / 10.0).unwrap();
            for a in 0..2 {
                assert_eq!(per.eval(a, &mu).to_bits(), single.eval(a, &mu).to_bits());
            }
        }
        assert_eq!(per.kind(), UtilityKind::Expression);
    }
}
