//! Canonical source rendering.

use std::fmt::Write;

use super::ast::{Instr, Program};

/// Which assignment labels to print.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelMode {
    /// Only labels written explicitly in the source.
    Explicit,
    /// Every label, so that re-parsing preserves step annotations exactly.
    All,
    None,
}

/// Canonical text of a program: one declaration per line, then the body on one line.
pub fn pretty(p: &Program) -> String {
    pretty_with(p, LabelMode::Explicit)
}

pub fn pretty_with(p: &Program, labels: LabelMode) -> String {
    let mut out = String::new();
    for d in &p.decls {
        writeln!(out, "var {}: {}..{};", d.name, d.lo, d.hi).unwrap();
    }
    out.push_str(&pretty_instr(&p.body, labels));
    out.push('\n');
    out
}

pub fn pretty_instr(i: &Instr, labels: LabelMode) -> String {
    let mut out = String::new();
    write_instr(&mut out, i, labels);
    out
}

fn write_instr(out: &mut String, i: &Instr, labels: LabelMode) {
    match i {
        Instr::Skip => out.push_str("skip"),
        Instr::Fail => out.push_str("fail"),
        Instr::Check(p) => write!(out, "check {p} end").unwrap(),
        Instr::Assign {
            target,
            value,
            label,
            explicit,
        } => {
            let show = match labels {
                LabelMode::All => true,
                LabelMode::Explicit => *explicit,
                LabelMode::None => false,
            };
            if show {
                write!(out, "{label}: ").unwrap();
            }
            write!(out, "{} := {value}", target.name).unwrap();
        }
        Instr::Seq(items) => {
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str("; ");
                }
                if matches!(item, Instr::Seq(_)) {
                    out.push('(');
                    write_instr(out, item, labels);
                    out.push(')');
                } else {
                    write_instr(out, item, labels);
                }
            }
        }
        Instr::If {
            cond,
            then,
            otherwise,
        } => {
            write!(out, "if {cond} then ").unwrap();
            write_instr(out, then, labels);
            if let Some(o) = otherwise {
                out.push_str(" else ");
                write_instr(out, o, labels);
            }
            out.push_str(" end");
        }
        Instr::Choice(a, b) => {
            out.push('(');
            write_instr(out, a, labels);
            out.push_str(" | ");
            write_instr(out, b, labels);
            out.push(')');
        }
        Instr::Until { exit, body, .. } => {
            write!(out, "until {exit} loop ").unwrap();
            write_instr(out, body, labels);
            out.push_str(" end");
        }
        Instr::RepeatUntil { body, exit, .. } => {
            out.push_str("repeat ");
            write_instr(out, body, labels);
            write!(out, " until {exit}").unwrap();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse;
    use super::*;

    #[test]
    fn canonical_text_is_a_fixpoint() {
        for src in [
            "var x: 0..3;\nuntil x = 0 loop x := x - 1 end\n",
            "var x: 0..3;\nuntil x = 0 loop (x := x - 1 | x := 0) end\n",
            "var x: 0..2;\nrepeat x := 2; (skip; fail) until not (x = 0) or True\n",
            "var x: -1..1;\nvar y: 0..1;\nif x < y then a: x := -1 * -(1) else check x /= 0 end end\n",
        ] {
            let p = parse(src).unwrap();
            assert_eq!(pretty(&p), src);
        }
    }

    #[test]
    fn label_modes() {
        let p = parse("var x: 0..1; a: x := 1; x := 0").unwrap();
        assert_eq!(
            pretty_with(&p, LabelMode::Explicit),
            "var x: 0..1;\na: x := 1; x := 0\n"
        );
        assert_eq!(
            pretty_with(&p, LabelMode::All),
            "var x: 0..1;\na: x := 1; L1_25: x := 0\n"
        );
        assert_eq!(
            pretty_with(&p, LabelMode::None),
            "var x: 0..1;\nx := 1; x := 0\n"
        );
    }

    #[test]
    fn repeat_renders_as_repeat_until() {
        let p = parse("var x: 0..1; repeat x := 1 until x = 1").unwrap();
        assert_eq!(
            pretty_instr(&p.body, LabelMode::Explicit),
            "repeat x := 1 until x = 1"
        );
    }
}
