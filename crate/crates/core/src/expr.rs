//! A small arithmetic-expression language in the chart variables `u`, `v`.
//!
//! Grammar (usual precedence, `^` right-associative and binding tighter than unary minus):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'u' | 'v' | 'pi' | 'e' | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Functions: `sin cos exp log ln sinh cosh tanh sech sqrt atan`.
//! Expressions evaluate on [`MultiJet`]s, so a parsed height function yields exact
//! derivatives for `graph(...)` surfaces.

use thiserror::Error;

use crate::jets::{jet_compose, Elementary, JetError, MultiJet, Var};

/// Maximum nesting depth accepted by the parser.
pub const MAX_DEPTH: usize = 64;

/// Maximum input length accepted by the parser (bytes).
pub const MAX_LEN: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("unexpected character {ch:?} at byte {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unexpected token at byte {0}")]
    UnexpectedToken(usize),
    #[error("unknown identifier {0:?}")]
    UnknownIdent(String),
    #[error("invalid number {0:?}")]
    InvalidNumber(String),
    #[error("expression nests deeper than {MAX_DEPTH} levels")]
    TooDeep,
    #[error("expression longer than {MAX_LEN} bytes")]
    TooLong,
    #[error("empty expression")]
    Empty,
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Elementary, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part: e or E followed by optional sign and digits
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let x: f64 = text.parse().map_err(|_| ExprError::InvalidNumber(text.to_string()))?;
            out.push((Tok::Num(x), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(ExprError::UnexpectedChar { ch, pos: i });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(usize::MAX)
    }

    fn enter(&mut self) -> Result<(), ExprError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(ExprError::TooDeep)
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        self.enter()?;
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.bump();
            let rhs = self.term()?;
            lhs = if c == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.bump();
            let rhs = self.unary()?;
            lhs = if c == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        self.enter()?;
        let r = match self.peek() {
            Some(Tok::Op('-')) => {
                self.bump();
                Expr::Neg(Box::new(self.unary()?))
            }
            Some(Tok::Op('+')) => {
                self.bump();
                self.unary()?
            }
            _ => self.power()?,
        };
        self.depth -= 1;
        Ok(r)
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let at = self.here();
        match self.bump() {
            None => Err(ExprError::UnexpectedEnd),
            Some(Tok::Num(x)) => Ok(Expr::Num(x)),
            Some(Tok::Op('(')) => {
                let e = self.expr()?;
                self.expect_close()?;
                Ok(e)
            }
            Some(Tok::Op(_)) => Err(ExprError::UnexpectedToken(at)),
            Some(Tok::Ident(name)) => match name.as_str() {
                "u" => Ok(Expr::Var(Var::U)),
                "v" => Ok(Expr::Var(Var::V)),
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                "e" => Ok(Expr::Num(std::f64::consts::E)),
                _ => {
                    let f = function_by_name(&name).ok_or(ExprError::UnknownIdent(name))?;
                    match self.bump() {
                        Some(Tok::Op('(')) => {}
                        None => return Err(ExprError::UnexpectedEnd),
                        Some(_) => return Err(ExprError::UnexpectedToken(self.prev_pos())),
                    }
                    let arg = self.expr()?;
                    self.expect_close()?;
                    Ok(Expr::Call(f, Box::new(arg)))
                }
            },
        }
    }

    fn prev_pos(&self) -> usize {
        self.toks.get(self.pos.saturating_sub(1)).map(|t| t.1).unwrap_or(0)
    }

    fn expect_close(&mut self) -> Result<(), ExprError> {
        match self.bump() {
            Some(Tok::Op(')')) => Ok(()),
            None => Err(ExprError::UnexpectedEnd),
            Some(_) => Err(ExprError::UnexpectedToken(self.prev_pos())),
        }
    }
}

fn function_by_name(name: &str) -> Option<Elementary> {
    Some(match name {
        "sin" => Elementary::Sin,
        "cos" => Elementary::Cos,
        "exp" => Elementary::Exp,
        "log" | "ln" => Elementary::Log,
        "sinh" => Elementary::Sinh,
        "cosh" => Elementary::Cosh,
        "tanh" => Elementary::Tanh,
        "sech" => Elementary::Sech,
        "sqrt" => Elementary::Sqrt,
        "atan" => Elementary::Atan,
        _ => return None,
    })
}

/// Parse an expression in `u`, `v`.
pub fn parse_expr(src: &str) -> Result<Expr, ExprError> {
    if src.len() > MAX_LEN {
        return Err(ExprError::TooLong);
    }
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(ExprError::Empty);
    }
    let mut p = Parser { toks, pos: 0, depth: 0 };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(ExprError::UnexpectedToken(p.here()));
    }
    Ok(e)
}

impl Expr {
    /// Evaluate on jets of the chart variables.
    pub fn eval_jet(&self, u: &MultiJet, v: &MultiJet) -> Result<MultiJet, JetError> {
        let k = u.order().min(v.order());
        Ok(match self {
            Expr::Num(x) => MultiJet::constant(*x, k),
            Expr::Var(Var::U) => *u,
            Expr::Var(Var::V) => *v,
            Expr::Neg(a) => -a.eval_jet(u, v)?,
            Expr::Add(a, b) => a.eval_jet(u, v)? + b.eval_jet(u, v)?,
            Expr::Sub(a, b) => a.eval_jet(u, v)? - b.eval_jet(u, v)?,
            Expr::Mul(a, b) => a.eval_jet(u, v)? * b.eval_jet(u, v)?,
            Expr::Div(a, b) => a.eval_jet(u, v)?.div_jet(&b.eval_jet(u, v)?)?,
            Expr::Pow(a, b) => {
                let base = a.eval_jet(u, v)?;
                match b.constant_value() {
                    Some(p) => jet_compose(Elementary::Pow(p), &base)?,
                    None => (b.eval_jet(u, v)? * base.ln()?).exp()?,
                }
            }
            Expr::Call(f, a) => jet_compose(*f, &a.eval_jet(u, v)?)?,
        })
    }

    /// Evaluate at a chart point (order-0 jets).
    pub fn eval(&self, u: f64, v: f64) -> Result<f64, JetError> {
        let uj = MultiJet::constant(u, 0);
        let vj = MultiJet::constant(v, 0);
        Ok(self.eval_jet(&uj, &vj)?.value())
    }

    /// The value of a variable-free subexpression.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Expr::Num(x) => Some(*x),
            Expr::Var(_) => None,
            Expr::Neg(a) => a.constant_value().map(|x| -x),
            _ => {
                if self.mentions_variables() {
                    None
                } else {
                    self.eval(0.0, 0.0).ok()
                }
            }
        }
    }

    fn mentions_variables(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(_) => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.mentions_variables(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.mentions_variables() || b.mentions_variables()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1 + 2*3^2 - 4/2").unwrap();
        assert_eq!(e.eval(0.0, 0.0).unwrap(), 17.0);
        let e = parse_expr("2^3^2").unwrap();
        assert_eq!(e.eval(0.0, 0.0).unwrap(), 512.0);
        let e = parse_expr("-u^2").unwrap();
        assert_eq!(e.eval(3.0, 0.0).unwrap(), -9.0);
    }

    #[test]
    fn functions_and_constants() {
        let e = parse_expr("sin(pi/2) + log(e) + sqrt(4) + sech(0)").unwrap();
        assert_relative_eq!(e.eval(0.0, 0.0).unwrap(), 5.0, epsilon = 1e-15);
        let e = parse_expr("1.5e-1*u + 2E2*v").unwrap();
        assert_relative_eq!(e.eval(1.0, 1.0).unwrap(), 200.15, epsilon = 1e-12);
    }

    #[test]
    fn jets_of_parsed_expression() {
        let e = parse_expr("(u^2 + v^2)/2").unwrap();
        let u = MultiJet::variable(0.5, Var::U, 3);
        let v = MultiJet::variable(-1.0, Var::V, 3);
        let g = e.eval_jet(&u, &v).unwrap();
        assert_relative_eq!(g.partial(2, 0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(g.partial(1, 1).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(g.partial(0, 1).unwrap(), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn variable_exponent_uses_exp_log() {
        let e = parse_expr("u^v").unwrap();
        assert_relative_eq!(e.eval(2.0, 3.0).unwrap(), 8.0, epsilon = 1e-13);
    }

    #[test]
    fn malformed_inputs_are_errors() {
        assert_eq!(parse_expr(""), Err(ExprError::Empty));
        assert!(matches!(parse_expr("u +"), Err(ExprError::UnexpectedEnd)));
        assert!(matches!(parse_expr("w"), Err(ExprError::UnknownIdent(_))));
        assert!(matches!(parse_expr("u $ v"), Err(ExprError::UnexpectedChar { .. })));
        assert!(matches!(parse_expr("sin u"), Err(ExprError::UnexpectedToken(_))));
        assert!(matches!(parse_expr("(u"), Err(ExprError::UnexpectedEnd)));
        assert!(matches!(parse_expr("u)"), Err(ExprError::UnexpectedToken(_))));
        assert!(matches!(parse_expr("1..2"), Err(ExprError::InvalidNumber(_))));
        let deep = "(".repeat(200) + "u" + &")".repeat(200);
        assert_eq!(parse_expr(&deep), Err(ExprError::TooDeep));
        let minus = "-".repeat(500) + "u";
        assert_eq!(parse_expr(&minus), Err(ExprError::TooDeep));
    }
}
