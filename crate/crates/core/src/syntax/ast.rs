use crate::expr::{Expr, VarRef};
use crate::trace::{StepLabel, VarDomain};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<VarDomain>,
    pub body: Instr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instr {
    Skip,
    Fail,
    Check(Expr),
    Assign {
        target: VarRef,
        value: Expr,
        label: StepLabel,
        /// Written in the source as `label: x := e`, rather than derived from the position.
        explicit: bool,
    },
    /// Two or more instructions.
    Seq(Vec<Instr>),
    If {
        cond: Expr,
        then: Box<Instr>,
        otherwise: Option<Box<Instr>>,
    },
    Choice(Box<Instr>, Box<Instr>),
    Until {
        exit: Expr,
        body: Box<Instr>,
        site: StepLabel,
    },
    RepeatUntil {
        body: Box<Instr>,
        exit: Expr,
        site: StepLabel,
    },
}

/// A loop found in a program.
#[derive(Debug, Clone, Copy)]
pub struct LoopRef<'a> {
    pub exit: &'a Expr,
    pub body: &'a Instr,
    pub site: &'a StepLabel,
    pub node: &'a Instr,
}

impl Instr {
    /// `target := value` labelled by `label`.
    pub fn assign(target: VarRef, value: Expr, label: StepLabel) -> Self {
        Instr::Assign {
            target,
            value,
            label,
            explicit: true,
        }
    }

    /// Sequence of `items`, collapsing the degenerate cases.
    pub fn seq(mut items: Vec<Instr>) -> Self {
        match items.len() {
            0 => Instr::Skip,
            1 => items.pop().unwrap(),
            _ => Instr::Seq(items),
        }
    }

    pub fn choice(a: Instr, b: Instr) -> Self {
        Instr::Choice(Box::new(a), Box::new(b))
    }

    pub fn if_then(cond: Expr, then: Instr) -> Self {
        Instr::If {
            cond,
            then: Box::new(then),
            otherwise: None,
        }
    }

    pub fn until(exit: Expr, body: Instr, site: StepLabel) -> Self {
        Instr::Until {
            exit,
            body: Box::new(body),
            site,
        }
    }

    /// `until` loops in pre-order, including those nested in bodies and the
    /// loop part of `repeat` instructions.
    pub fn loops(&self) -> Vec<LoopRef<'_>> {
        fn walk<'a>(i: &'a Instr, out: &mut Vec<LoopRef<'a>>) {
            match i {
                Instr::Skip | Instr::Fail | Instr::Check(_) | Instr::Assign { .. } => {}
                Instr::Seq(items) => items.iter().for_each(|i| walk(i, out)),
                Instr::If {
                    then, otherwise, ..
                } => {
                    walk(then, out);
                    if let Some(o) = otherwise {
                        walk(o, out);
                    }
                }
                Instr::Choice(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Instr::Until { exit, body, site } | Instr::RepeatUntil { body, exit, site } => {
                    out.push(LoopRef {
                        exit,
                        body,
                        site,
                        node: i,
                    });
                    walk(body, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Whether the instruction contains a loop of either kind.
    pub fn has_loop(&self) -> bool {
        !self.loops().is_empty()
    }

    /// Copy with position-derived labels and loop sites replaced by a
    /// placeholder, so that ASTs parsed from differently laid-out text compare equal.
    pub fn erase_positions(&self) -> Instr {
        let anon = || StepLabel::new("_");
        match self {
            Instr::Skip | Instr::Fail | Instr::Check(_) => self.clone(),
            Instr::Assign {
                target,
                value,
                label,
                explicit,
            } => Instr::Assign {
                target: target.clone(),
                value: value.clone(),
                label: if *explicit { label.clone() } else { anon() },
                explicit: *explicit,
            },
            Instr::Seq(items) => Instr::Seq(items.iter().map(Instr::erase_positions).collect()),
            Instr::If {
                cond,
                then,
                otherwise,
            } => Instr::If {
                cond: cond.clone(),
                then: Box::new(then.erase_positions()),
                otherwise: otherwise.as_ref().map(|o| Box::new(o.erase_positions())),
            },
            Instr::Choice(a, b) => Instr::choice(a.erase_positions(), b.erase_positions()),
            Instr::Until { exit, body, .. } => Instr::Until {
                exit: exit.clone(),
                body: Box::new(body.erase_positions()),
                site: anon(),
            },
            Instr::RepeatUntil { body, exit, .. } => Instr::RepeatUntil {
                body: Box::new(body.erase_positions()),
                exit: exit.clone(),
                site: anon(),
            },
        }
    }
}

impl Program {
    pub fn erase_positions(&self) -> Program {
        Program {
            decls: self.decls.clone(),
            body: self.body.erase_positions(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.decls.iter().map(|d| d.name.clone()).collect()
    }
}
