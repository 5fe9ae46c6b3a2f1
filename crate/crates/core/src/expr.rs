//! Integer and boolean expressions over program variables.

use std::fmt;

use crate::error::StaticError;
use crate::trace::State;

/// A reference to a declared variable, resolved to its slot in a [`State`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    pub name: String,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "=",
            BinOp::Ne => "/=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul => 6,
        }
    }

    fn is_comparison(self) -> bool {
        self.precedence() == 4
    }

    /// Operand and result types.
    fn signature(self) -> (Type, Type) {
        match self {
            BinOp::Add | BinOp::Sub | BinOp::Mul => (Type::Int, Type::Int),
            BinOp::And | BinOp::Or => (Type::Bool, Type::Bool),
            _ => (Type::Int, Type::Bool),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Type {
    Int,
    Bool,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Type::Int => "integer",
            Type::Bool => "boolean",
        })
    }
}

/// Result of evaluating an expression. Integers are evaluated in `i128`
/// with saturating arithmetic; saturated values never fit a declared domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Int(i128),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(VarRef),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Self {
        Expr::Int(n)
    }

    pub fn truth(b: bool) -> Self {
        Expr::Bool(b)
    }

    pub fn var(name: impl Into<String>, index: usize) -> Self {
        Expr::Var(VarRef {
            name: name.into(),
            index,
        })
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn negate(e: Expr) -> Self {
        Expr::Not(Box::new(e))
    }

    pub fn eq(lhs: Expr, rhs: Expr) -> Self {
        Self::binary(BinOp::Eq, lhs, rhs)
    }

    pub fn and(lhs: Expr, rhs: Expr) -> Self {
        Self::binary(BinOp::And, lhs, rhs)
    }

    pub fn or(lhs: Expr, rhs: Expr) -> Self {
        Self::binary(BinOp::Or, lhs, rhs)
    }

    /// Static type, or the first type error found.
    pub fn type_of(&self) -> Result<Type, StaticError> {
        match self {
            Expr::Int(_) | Expr::Var(_) => Ok(Type::Int),
            Expr::Bool(_) => Ok(Type::Bool),
            Expr::Neg(e) => expect(e, Type::Int, "operand of unary '-'").map(|_| Type::Int),
            Expr::Not(e) => expect(e, Type::Bool, "operand of 'not'").map(|_| Type::Bool),
            Expr::Binary(op, l, r) => {
                let (operand, result) = op.signature();
                let what = format!("operand of '{}'", op.symbol());
                expect(l, operand, &what)?;
                expect(r, operand, &what)?;
                Ok(result)
            }
        }
    }

    /// Variables referenced, in first-occurrence order.
    pub fn vars(&self) -> Vec<&VarRef> {
        fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a VarRef>) {
            match e {
                Expr::Int(_) | Expr::Bool(_) => {}
                Expr::Var(v) => {
                    if !out.contains(&v) {
                        out.push(v)
                    }
                }
                Expr::Neg(e) | Expr::Not(e) => walk(e, out),
                Expr::Binary(_, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// `s[e]`: the value of this expression in state `s`.
    ///
    /// Total on well-typed expressions whose variables index into `s`.
    pub fn eval(&self, s: &State) -> Value {
        match self {
            Expr::Int(n) => Value::Int(*n as i128),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Var(v) => Value::Int(s.get(v.index) as i128),
            Expr::Neg(e) => Value::Int(e.int_value(s).saturating_neg()),
            Expr::Not(e) => Value::Bool(!e.holds(s)),
            Expr::Binary(op, l, r) => match op {
                BinOp::And => Value::Bool(l.holds(s) && r.holds(s)),
                BinOp::Or => Value::Bool(l.holds(s) || r.holds(s)),
                _ => {
                    let (a, b) = (l.int_value(s), r.int_value(s));
                    match op {
                        BinOp::Add => Value::Int(a.saturating_add(b)),
                        BinOp::Sub => Value::Int(a.saturating_sub(b)),
                        BinOp::Mul => Value::Int(a.saturating_mul(b)),
                        BinOp::Eq => Value::Bool(a == b),
                        BinOp::Ne => Value::Bool(a != b),
                        BinOp::Lt => Value::Bool(a < b),
                        BinOp::Le => Value::Bool(a <= b),
                        BinOp::Gt => Value::Bool(a > b),
                        BinOp::Ge => Value::Bool(a >= b),
                        BinOp::And | BinOp::Or => unreachable!(),
                    }
                }
            },
        }
    }

    /// Boolean value in `s`; a non-boolean expression never holds.
    pub fn holds(&self, s: &State) -> bool {
        self.eval(s) == Value::Bool(true)
    }

    /// Integer value in `s`; booleans read as 0/1 (unreachable after type checking).
    pub fn int_value(&self, s: &State) -> i128 {
        match self.eval(s) {
            Value::Int(n) => n,
            Value::Bool(b) => b as i128,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Not(_) => 3,
            Expr::Neg(_) => 7,
            Expr::Int(n) if *n < 0 => 7,
            _ => 8,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            f.write_str("(")?;
        }
        match self {
            Expr::Int(n) => write!(f, "{n}")?,
            Expr::Bool(true) => f.write_str("True")?,
            Expr::Bool(false) => f.write_str("False")?,
            Expr::Var(v) => f.write_str(&v.name)?,
            Expr::Neg(e) => {
                f.write_str("-")?;
                // "-(1)" keeps the literal from folding into Int(-1); "-(-x)" avoids a "--" comment.
                let inner_min = match **e {
                    Expr::Int(_) | Expr::Neg(_) => 9,
                    _ => 7,
                };
                e.fmt_prec(f, inner_min)?;
            }
            Expr::Not(e) => {
                f.write_str("not ")?;
                e.fmt_prec(f, 5)?;
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                let left_min = if op.is_comparison() { p + 1 } else { p };
                l.fmt_prec(f, left_min)?;
                write!(f, " {} ", op.symbol())?;
                r.fmt_prec(f, p + 1)?;
            }
        }
        if prec < min {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn expect(e: &Expr, want: Type, what: &str) -> Result<(), StaticError> {
    let got = e.type_of()?;
    if got != want {
        return Err(StaticError::Type(format!(
            "{what} must be {want}, found {got} expression `{e}`"
        )));
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(values: &[i64]) -> State {
        State::new(values.to_vec())
    }

    #[test]
    fn product_after_assignments() {
        // x := 2; y := 5 leaves s with x = 2, y = 5
        let s = st(&[2, 5]);
        let e = Expr::binary(BinOp::Mul, Expr::var("x", 0), Expr::var("y", 1));
        assert_eq!(e.eval(&s), Value::Int(10));
    }

    #[test]
    fn equality_and_subtraction() {
        let zero = Expr::eq(Expr::var("x", 0), Expr::int(0));
        assert!(zero.holds(&st(&[0])));
        assert!(!zero.holds(&st(&[3])));
        let dec = Expr::binary(BinOp::Sub, Expr::var("x", 0), Expr::int(1));
        assert_eq!(dec.eval(&st(&[3])), Value::Int(2));
    }

    #[test]
    fn type_errors() {
        assert_eq!(Expr::var("x", 0).type_of().unwrap(), Type::Int);
        assert!(Expr::negate(Expr::var("x", 0)).type_of().is_err());
        assert!(Expr::and(Expr::truth(true), Expr::int(1))
            .type_of()
            .is_err());
        assert!(Expr::binary(BinOp::Add, Expr::truth(true), Expr::int(1))
            .type_of()
            .is_err());
    }

    #[test]
    fn saturating_arithmetic_is_total() {
        let big = Expr::binary(
            BinOp::Mul,
            Expr::binary(BinOp::Mul, Expr::int(i64::MAX), Expr::int(i64::MAX)),
            Expr::int(i64::MAX),
        );
        assert_eq!(big.eval(&st(&[])), Value::Int(i128::MAX));
    }

    #[test]
    fn display_parenthesizes_minimally() {
        let x = || Expr::var("x", 0);
        let e = Expr::negate(Expr::eq(x(), Expr::int(0)));
        assert_eq!(e.to_string(), "not (x = 0)");
        let e = Expr::binary(BinOp::Sub, x(), Expr::binary(BinOp::Sub, Expr::int(1), x()));
        assert_eq!(e.to_string(), "x - (1 - x)");
        let e = Expr::binary(
            BinOp::Mul,
            Expr::binary(BinOp::Add, x(), Expr::int(1)),
            Expr::int(-2),
        );
        assert_eq!(e.to_string(), "(x + 1) * -2");
        assert_eq!(Expr::Neg(Box::new(Expr::int(1))).to_string(), "-(1)");
        let e = Expr::or(
            Expr::and(Expr::truth(true), Expr::truth(false)),
            Expr::negate(Expr::truth(true)),
        );
        assert_eq!(e.to_string(), "True and False or not True");
    }
}
