//! Recursive-descent parser.
//!
//! ```text
//! program := decl* instr
//! decl    := "var" ID ":" INT ".." INT ";"
//! instr   := seq ("|" seq)*
//! seq     := atom (";" atom)* [";"]
//! atom    := "skip" | "fail" | "check" expr "end"
//!          | [ID ":"] ID ":=" expr
//!          | "if" expr "then" instr ["else" instr] "end"
//!          | "until" expr "loop" instr "end"
//!          | "repeat" instr "until" expr
//!          | "(" instr ")"
//! expr    := and ("or" and)*
//! and     := not ("and" not)*
//! not     := "not" not | cmp
//! cmp     := sum [("=" | "/=" | "!=" | "<" | "<=" | ">" | ">=") sum]
//! sum     := prod (("+" | "-") prod)*
//! prod    := unary ("*" unary)*
//! unary   := "-" unary | INT | ID | "True" | "False" | "(" expr ")"
//! ```
//!
//! `;` binds tighter than `|`. A `-` directly before a literal folds into it.

use std::collections::HashMap;

use super::ast::{Instr, Program};
use super::lexer::{lex, Kw, Tok, Token};
use crate::error::StaticError;
use crate::expr::{BinOp, Expr, Type, VarRef};
use crate::trace::{StepLabel, TestSpec, VarDomain};

pub fn parse(src: &str) -> Result<Program, StaticError> {
    let mut p = Parser::new(src, &[])?;
    let decls = p.decls()?;
    let body = p.instr()?;
    p.expect_eof()?;
    Ok(Program { decls, body })
}

/// Parses an instruction against existing declarations.
pub fn parse_instr(decls: &[VarDomain], src: &str) -> Result<Instr, StaticError> {
    let mut p = Parser::new(src, decls)?;
    let body = p.instr()?;
    p.expect_eof()?;
    Ok(body)
}

/// Parses an expression and checks that it has type `want`.
pub fn parse_expr(decls: &[VarDomain], src: &str, want: Type) -> Result<Expr, StaticError> {
    let mut p = Parser::new(src, decls)?;
    let e = p.typed_expr(want)?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a test: `expr` or `at LABEL: expr`.
pub fn parse_test(decls: &[VarDomain], src: &str) -> Result<TestSpec, StaticError> {
    let mut p = Parser::new(src, decls)?;
    let anchor = match (&p.peek().tok, &p.peek_at(1).tok, &p.peek_at(2).tok) {
        (Tok::Ident(at), Tok::Ident(label), Tok::Colon) if at == "at" => {
            let label = StepLabel::new(label);
            p.pos += 3;
            Some(label)
        }
        _ => None,
    };
    let predicate = p.typed_expr(Type::Bool)?;
    p.expect_eof()?;
    Ok(TestSpec { predicate, anchor })
}

/// Parses `x=3,y=0` style input bindings into a conjunction of equalities.
pub fn parse_bindings(decls: &[VarDomain], src: &str) -> Result<Expr, StaticError> {
    let mut p = Parser::new(src, decls)?;
    let mut conj: Option<Expr> = None;
    loop {
        let var = p.var_ref()?;
        p.expect(Tok::Eq, "`=`")?;
        let value = p.unary()?;
        p.require_type(&value, Type::Int)?;
        let eq = Expr::eq(Expr::Var(var), value);
        conj = Some(match conj {
            None => eq,
            Some(c) => Expr::and(c, eq),
        });
        if p.peek().tok == Tok::Comma {
            p.pos += 1;
        } else {
            break;
        }
    }
    p.expect_eof()?;
    Ok(conj.expect("at least one binding"))
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    vars: HashMap<String, usize>,
    decls: Vec<VarDomain>,
}

impl Parser {
    fn new(src: &str, decls: &[VarDomain]) -> Result<Self, StaticError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            vars: decls
                .iter()
                .enumerate()
                .map(|(i, d)| (d.name.clone(), i))
                .collect(),
            decls: decls.to_vec(),
        })
    }

    fn peek(&self) -> &Token {
        self.peek_at(0)
    }

    fn peek_at(&self, n: usize) -> &Token {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i]
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, message: impl Into<String>) -> StaticError {
        StaticError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn unexpected(&self, wanted: &str) -> StaticError {
        let t = self.peek();
        self.error_at(t, format!("expected {wanted}, found {}", describe(&t.tok)))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<Token, StaticError> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expect_kw(&mut self, kw: Kw) -> Result<Token, StaticError> {
        let wanted = format!("`{}`", kw_text(kw));
        self.expect(Tok::Kw(kw), &wanted)
    }

    fn expect_eof(&mut self) -> Result<(), StaticError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn ident(&mut self) -> Result<(String, Token), StaticError> {
        match self.peek().tok.clone() {
            Tok::Ident(name) => Ok((name, self.next())),
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn signed_int(&mut self) -> Result<i64, StaticError> {
        let negative = self.eat(&Tok::Minus);
        let t = self.next();
        match t.tok {
            Tok::Int(n) => literal(n, negative)
                .ok_or_else(|| self.error_at(&t, format!("integer literal {n} is out of range"))),
            _ => Err(self.error_at(&t, format!("expected integer, found {}", describe(&t.tok)))),
        }
    }

    fn decls(&mut self) -> Result<Vec<VarDomain>, StaticError> {
        while self.eat(&Tok::Kw(Kw::Var)) {
            let (name, _) = self.ident()?;
            self.expect(Tok::Colon, "`:`")?;
            let lo = self.signed_int()?;
            self.expect(Tok::DotDot, "`..`")?;
            let hi = self.signed_int()?;
            self.expect(Tok::Semi, "`;`")?;
            if self.vars.contains_key(&name) {
                return Err(StaticError::DuplicateDecl(name));
            }
            if lo > hi {
                return Err(StaticError::EmptyDomain { name, lo, hi });
            }
            self.vars.insert(name.clone(), self.decls.len());
            self.decls.push(VarDomain::new(name, lo, hi));
        }
        Ok(self.decls.clone())
    }

    fn instr(&mut self) -> Result<Instr, StaticError> {
        let mut left = self.seq()?;
        while self.eat(&Tok::Bar) {
            let right = self.seq()?;
            left = Instr::choice(left, right);
        }
        Ok(left)
    }

    fn seq(&mut self) -> Result<Instr, StaticError> {
        let mut items = vec![self.atom()?];
        while self.eat(&Tok::Semi) {
            if matches!(
                self.peek().tok,
                Tok::Kw(Kw::End) | Tok::Kw(Kw::Else) | Tok::Eof | Tok::RParen | Tok::Bar
            ) {
                break;
            }
            items.push(self.atom()?);
        }
        Ok(Instr::seq(items))
    }

    fn atom(&mut self) -> Result<Instr, StaticError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Kw(Kw::Skip) => {
                self.pos += 1;
                Ok(Instr::Skip)
            }
            Tok::Kw(Kw::Fail) => {
                self.pos += 1;
                Ok(Instr::Fail)
            }
            Tok::Kw(Kw::Check) => {
                self.pos += 1;
                let p = self.typed_expr(Type::Bool)?;
                self.expect_kw(Kw::End)?;
                Ok(Instr::Check(p))
            }
            Tok::Kw(Kw::If) => {
                self.pos += 1;
                let cond = self.typed_expr(Type::Bool)?;
                self.expect_kw(Kw::Then)?;
                let then = Box::new(self.instr()?);
                let otherwise = if self.eat(&Tok::Kw(Kw::Else)) {
                    Some(Box::new(self.instr()?))
                } else {
                    None
                };
                self.expect_kw(Kw::End)?;
                Ok(Instr::If {
                    cond,
                    then,
                    otherwise,
                })
            }
            Tok::Kw(Kw::Until) => {
                self.pos += 1;
                let exit = self.typed_expr(Type::Bool)?;
                self.expect_kw(Kw::Loop)?;
                let body = Box::new(self.instr()?);
                self.expect_kw(Kw::End)?;
                Ok(Instr::Until {
                    exit,
                    body,
                    site: StepLabel::at(t.line, t.col),
                })
            }
            Tok::Kw(Kw::Repeat) => {
                self.pos += 1;
                let body = Box::new(self.instr()?);
                self.expect_kw(Kw::Until)?;
                let exit = self.typed_expr(Type::Bool)?;
                Ok(Instr::RepeatUntil {
                    body,
                    exit,
                    site: StepLabel::at(t.line, t.col),
                })
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.instr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(first) => {
                let (label, explicit) = if self.peek_at(1).tok == Tok::Colon {
                    let label = StepLabel::new(first);
                    self.pos += 2;
                    (label, true)
                } else {
                    (StepLabel::at(t.line, t.col), false)
                };
                let target = self.var_ref()?;
                self.expect(Tok::Assign, "`:=`")?;
                let value = self.typed_expr(Type::Int)?;
                Ok(Instr::Assign {
                    target,
                    value,
                    label,
                    explicit,
                })
            }
            _ => Err(self.unexpected("instruction")),
        }
    }

    fn var_ref(&mut self) -> Result<VarRef, StaticError> {
        let (name, _) = self.ident()?;
        match self.vars.get(&name) {
            Some(&index) => Ok(VarRef { name, index }),
            None => Err(StaticError::Undeclared(name)),
        }
    }

    fn require_type(&self, e: &Expr, want: Type) -> Result<(), StaticError> {
        let got = e.type_of()?;
        if got != want {
            return Err(StaticError::Type(format!(
                "expected {want} expression, found {got} expression `{e}`"
            )));
        }
        Ok(())
    }

    fn typed_expr(&mut self, want: Type) -> Result<Expr, StaticError> {
        let e = self.expr()?;
        self.require_type(&e, want)?;
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, StaticError> {
        let mut left = self.and()?;
        while self.eat(&Tok::Kw(Kw::Or)) {
            left = Expr::or(left, self.and()?);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Expr, StaticError> {
        let mut left = self.not()?;
        while self.eat(&Tok::Kw(Kw::And)) {
            left = Expr::and(left, self.not()?);
        }
        Ok(left)
    }

    fn not(&mut self) -> Result<Expr, StaticError> {
        if self.eat(&Tok::Kw(Kw::Not)) {
            Ok(Expr::negate(self.not()?))
        } else {
            self.cmp()
        }
    }

    fn cmp(&mut self) -> Result<Expr, StaticError> {
        let left = self.sum()?;
        let op = match self.peek().tok {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(left),
        };
        self.pos += 1;
        Ok(Expr::binary(op, left, self.sum()?))
    }

    fn sum(&mut self) -> Result<Expr, StaticError> {
        let mut left = self.prod()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(left),
            };
            self.pos += 1;
            left = Expr::binary(op, left, self.prod()?);
        }
    }

    fn prod(&mut self) -> Result<Expr, StaticError> {
        let mut left = self.unary()?;
        while self.eat(&Tok::Star) {
            left = Expr::binary(BinOp::Mul, left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, StaticError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Minus => {
                if let Tok::Int(_) = self.peek_at(1).tok {
                    return self.signed_int().map(Expr::Int);
                }
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Int(_) => self.signed_int().map(Expr::Int),
            Tok::Kw(Kw::True) => {
                self.pos += 1;
                Ok(Expr::Bool(true))
            }
            Tok::Kw(Kw::False) => {
                self.pos += 1;
                Ok(Expr::Bool(false))
            }
            Tok::Ident(_) => self.var_ref().map(Expr::Var),
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

fn literal(n: u64, negative: bool) -> Option<i64> {
    if negative {
        0i64.checked_sub_unsigned(n)
    } else {
        i64::try_from(n).ok()
    }
}

fn kw_text(kw: Kw) -> &'static str {
    match kw {
        Kw::Var => "var",
        Kw::Skip => "skip",
        Kw::Fail => "fail",
        Kw::Check => "check",
        Kw::End => "end",
        Kw::If => "if",
        Kw::Then => "then",
        Kw::Else => "else",
        Kw::Until => "until",
        Kw::Loop => "loop",
        Kw::Repeat => "repeat",
        Kw::Not => "not",
        Kw::And => "and",
        Kw::Or => "or",
        Kw::True => "True",
        Kw::False => "False",
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("integer {n}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Kw(k) => format!("`{}`", kw_text(*k)),
        Tok::Eof => "end of input".to_string(),
        other => {
            let s = match other {
                Tok::Semi => ";",
                Tok::Colon => ":",
                Tok::Assign => ":=",
                Tok::DotDot => "..",
                Tok::Bar => "|",
                Tok::Comma => ",",
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::Plus => "+",
                Tok::Minus => "-",
                Tok::Star => "*",
                Tok::Eq => "=",
                Tok::Ne => "/=",
                Tok::Lt => "<",
                Tok::Le => "<=",
                Tok::Gt => ">",
                Tok::Ge => ">=",
                _ => unreachable!(),
            };
            format!("`{s}`")
        }
    }
}
