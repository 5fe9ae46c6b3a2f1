//! Command-line interface.
//!
//! Exit codes: 0 success, 1 findings, 2 usage or input errors, 3 resource caps.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::corpus;
use crate::denote::{denote, EvalConfig, LoopOutcome, DEFAULT_FUEL, DEFAULT_TRACESET_CAP};
use crate::error::Error;
use crate::expr::Expr;
use crate::lawcheck::{self, gen::GenConfig, mutants::MUTANTS, Law, Verdict, REGISTRY};
use crate::syntax::{
    parse, parse_bindings, parse_test, pretty_with, state_space, LabelMode, LoopRef, Program,
};
use crate::traceset::{Standard, StateUniverse, DEFAULT_STATE_CAP};
use crate::unroll::{
    bug_matrix, emit_unrolled, min_unroll_level, unroll_program, unroll_report, BugSpec, MinLevel,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "unrollsem",
    version,
    about = "Trace-set semantics and loop unrolling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the trace-set denotation of a program.
    Eval {
        #[command(flatten)]
        prog: ProgramArgs,
    },
    /// Compare each loop approximation with the corresponding unrolling.
    Unroll {
        #[command(flatten)]
        prog: ProgramArgs,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        max_level: u32,
        #[command(flatten)]
        pick: LoopPick,
    },
    /// Print the unrolled source of a loop.
    Emit {
        #[command(flatten)]
        prog: ProgramArgs,
        #[arg(long)]
        level: u32,
        #[command(flatten)]
        pick: LoopPick,
        /// Omit step labels.
        #[arg(long)]
        no_labels: bool,
        /// Print the whole program with every loop unrolled.
        #[arg(long)]
        full: bool,
    },
    /// Smallest unrolling level at which a test is witnessed.
    MinLevel {
        #[command(flatten)]
        prog: ProgramArgs,
        #[arg(long)]
        test: String,
        #[command(flatten)]
        pick: LoopPick,
    },
    /// Which bugs of a suite are found at each unrolling level.
    Bugs {
        #[command(flatten)]
        prog: ProgramArgs,
        /// Bug suite file: one `name: test` per line.
        #[arg(long)]
        bugs: String,
        /// Comma-separated levels; defaults to 0 through --max-level.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<u32>,
        #[arg(long, default_value_t = 4)]
        max_level: u32,
    },
    /// Check the algebraic laws.
    Laws {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 3)]
        universe: usize,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 8)]
        max_card: usize,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u32,
        /// Check only the named laws.
        #[arg(long = "law")]
        laws: Vec<String>,
        /// Run against a deliberately broken operator set.
        #[arg(long)]
        mutant: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct ProgramArgs {
    /// Program file, or the name of a bundled example.
    program: String,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u32,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    #[arg(long, default_value_t = DEFAULT_TRACESET_CAP)]
    set_cap: usize,
    /// Initial condition, e.g. "x=3,y=0".
    #[arg(long)]
    input: Option<String>,
    /// Treat out-of-domain assignments as errors.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct LoopPick {
    /// Which loop, counting in source order from 0.
    #[arg(long = "loop", default_value_t = 0)]
    index: usize,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<crate::error::StaticError> for Failure {
    fn from(e: crate::error::StaticError) -> Self {
        Failure::Lib(e.into())
    }
}

impl From<crate::error::ResourceError> for Failure {
    fn from(e: crate::error::ResourceError) -> Self {
        Failure::Lib(e.into())
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Lib(Error::Resource(_)) => EXIT_RESOURCE,
            Failure::Lib(Error::OutOfDomain { .. } | Error::Consistency(_)) => EXIT_FINDINGS,
            Failure::Lib(_) => EXIT_USAGE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

/// Output of a successful command.
struct Report {
    command: &'static str,
    config: Json,
    result: Json,
    diagnostics: Json,
    text: String,
    code: i32,
}

fn envelope(r: &Report) -> String {
    let v = json!({
        "command": r.command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": r.config,
        "result": r.result,
        "diagnostics": r.diagnostics,
    });
    serde_json::to_string_pretty(&v).expect("serializable")
}

fn to_json<T: Serialize>(v: &T) -> Json {
    serde_json::to_value(v).expect("serializable")
}

/// Runs the command line `args` (including the program name), printing to
/// standard output and standard error, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let json = match &cli.command {
        Command::Eval { prog }
        | Command::Unroll { prog, .. }
        | Command::Emit { prog, .. }
        | Command::MinLevel { prog, .. }
        | Command::Bugs { prog, .. } => prog.json,
        Command::Laws { json, .. } => *json,
    };
    match execute(cli.command) {
        Ok(report) => {
            if json {
                println!("{}", envelope(&report));
            } else {
                print!("{}", report.text);
            }
            report.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn load_source(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        return std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {arg}: {e}")));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    corpus::get(stem)
        .map(|e| e.source.to_string())
        .ok_or_else(|| Failure::Usage(format!("no such file or bundled example: {arg}")))
}

struct Loaded {
    program: Program,
    universe: StateUniverse,
    cfg: EvalConfig,
    init: Option<Expr>,
}

impl ProgramArgs {
    fn load(&self) -> Result<Loaded, Failure> {
        let program = parse(&load_source(&self.program)?)?;
        let cfg = EvalConfig {
            fuel: self.fuel,
            state_cap: self.state_cap,
            traceset_cap: self.set_cap,
            strict_domain: self.strict,
        };
        let universe = state_space(&program.decls, cfg.state_cap)?;
        let init = match &self.input {
            Some(s) => Some(parse_bindings(&program.decls, s)?),
            None => None,
        };
        Ok(Loaded {
            program,
            universe,
            cfg,
            init,
        })
    }

    fn config(&self, extra: Json) -> Json {
        let mut v = json!({
            "program": self.program,
            "fuel": self.fuel,
            "state_cap": self.state_cap,
            "set_cap": self.set_cap,
            "input": self.input,
            "strict": self.strict,
        });
        if let (Json::Object(m), Json::Object(e)) = (&mut v, extra) {
            m.extend(e);
        }
        v
    }
}

fn pick_loop<'a>(p: &'a Program, pick: &LoopPick) -> Result<LoopRef<'a>, Failure> {
    let loops = p.body.loops();
    if loops.is_empty() {
        return Err(Error::NoLoop.into());
    }
    let n = loops.len();
    loops.into_iter().nth(pick.index).ok_or_else(|| {
        Failure::Usage(format!(
            "--loop {} out of range: program has {n} loop(s)",
            pick.index
        ))
    })
}

fn execute(command: Command) -> Result<Report, Failure> {
    match command {
        Command::Eval { prog } => eval(&prog),
        Command::Unroll {
            prog,
            max_level,
            pick,
        } => unroll(&prog, max_level, &pick),
        Command::Emit {
            prog,
            level,
            pick,
            no_labels,
            full,
        } => emit(&prog, level, &pick, no_labels, full),
        Command::MinLevel { prog, test, pick } => min_level(&prog, &test, &pick),
        Command::Bugs {
            prog,
            bugs,
            levels,
            max_level,
        } => bugs_cmd(&prog, &bugs, levels, max_level),
        Command::Laws {
            seed,
            cases,
            universe,
            max_len,
            max_card,
            fuel,
            laws,
            mutant,
            ..
        } => {
            let cfg = GenConfig {
                universe_size: universe,
                max_len,
                max_card,
                cases,
                seed,
                labels: true,
                fuel,
            };
            laws_cmd(cfg, &laws, mutant.as_deref())
        }
    }
}

fn eval(prog: &ProgramArgs) -> Result<Report, Failure> {
    let l = prog.load()?;
    let d = denote(&l.program.body, &l.universe, &l.cfg)?;
    let traces = match &l.init {
        Some(c) => d.traces.restrict(c),
        None => d.traces,
    };
    let names = l.universe.names();
    let mut text = String::new();
    for x in &traces {
        writeln!(text, "{x}").unwrap();
    }
    writeln!(text, "{} trace(s), {}", traces.len(), traces.exactness()).unwrap();
    if d.diagnostics.dropped_out_of_domain > 0 {
        writeln!(
            text,
            "dropped out-of-domain steps: {}",
            d.diagnostics.dropped_out_of_domain
        )
        .unwrap();
    }
    for r in &d.diagnostics.loops {
        match r.outcome {
            LoopOutcome::Saturated { index } => {
                writeln!(text, "loop {}: saturated at {index}", r.site)
            }
            LoopOutcome::Truncated { fuel } => {
                writeln!(text, "loop {}: truncated at fuel {fuel}", r.site)
            }
        }
        .unwrap();
    }
    Ok(Report {
        command: "eval",
        config: prog.config(json!({})),
        result: traces.to_json(&names),
        diagnostics: to_json(&d.diagnostics),
        text,
        code: EXIT_OK,
    })
}

fn unroll(prog: &ProgramArgs, max_level: u32, pick: &LoopPick) -> Result<Report, Failure> {
    let l = prog.load()?;
    let lp = pick_loop(&l.program, pick)?;
    let report = unroll_report(lp.exit, lp.body, &l.universe, max_level, &l.cfg)?;
    let mut text = String::new();
    writeln!(text, "loop {}: until {}", lp.site, lp.exit).unwrap();
    writeln!(text, "level  traces  added  exactness  equivalent").unwrap();
    for r in &report.levels {
        writeln!(
            text,
            "{:>5}  {:>6}  {:>5}  {:<9}  {}",
            r.level,
            r.cardinality,
            r.added,
            r.exactness.to_string(),
            if r.equivalent { "yes" } else { "NO" }
        )
        .unwrap();
    }
    match report.saturation {
        Some(k) => writeln!(text, "saturated at {k}").unwrap(),
        None => writeln!(text, "not saturated within {max_level}").unwrap(),
    }
    let code = if report.all_equivalent {
        EXIT_OK
    } else {
        EXIT_FINDINGS
    };
    Ok(Report {
        command: "unroll",
        config: prog.config(json!({ "max_level": max_level, "loop": pick.index })),
        result: to_json(&report),
        diagnostics: json!({ "site": lp.site.as_str() }),
        text,
        code,
    })
}

fn emit(
    prog: &ProgramArgs,
    level: u32,
    pick: &LoopPick,
    no_labels: bool,
    full: bool,
) -> Result<Report, Failure> {
    let l = prog.load()?;
    let mode = if no_labels {
        LabelMode::None
    } else {
        LabelMode::All
    };
    let source = if full {
        if !l.program.body.has_loop() {
            return Err(Error::NoLoop.into());
        }
        let p = Program {
            decls: l.program.decls.clone(),
            body: unroll_program(&l.program.body, level),
        };
        pretty_with(&p, mode)
    } else {
        let lp = pick_loop(&l.program, pick)?;
        let mut s = emit_unrolled(lp.node, level, mode).expect("loop node");
        s.push('\n');
        s
    };
    Ok(Report {
        command: "emit",
        config: prog.config(
            json!({ "level": level, "loop": pick.index, "labels": !no_labels, "full": full }),
        ),
        result: json!({ "source": source }),
        diagnostics: json!({}),
        text: source,
        code: EXIT_OK,
    })
}

fn min_level(prog: &ProgramArgs, test: &str, pick: &LoopPick) -> Result<Report, Failure> {
    let l = prog.load()?;
    let lp = pick_loop(&l.program, pick)?;
    let t = parse_test(&l.program.decls, test)?;
    let found = min_unroll_level(lp.exit, lp.body, &l.universe, &t, &l.cfg, l.init.as_ref())?;
    let text = match found {
        MinLevel::Found { level } => format!("{level}\n"),
        MinLevel::NotFound { fuel, exactness } => format!("not-found({fuel}) [{exactness}]\n"),
    };
    Ok(Report {
        command: "min-level",
        config: prog.config(json!({ "test": test, "loop": pick.index })),
        result: to_json(&found),
        diagnostics: json!({ "site": lp.site.as_str() }),
        text,
        code: EXIT_OK,
    })
}

fn bugs_cmd(
    prog: &ProgramArgs,
    bugs_path: &str,
    levels: Vec<u32>,
    max_level: u32,
) -> Result<Report, Failure> {
    let l = prog.load()?;
    let text = std::fs::read_to_string(bugs_path)
        .map_err(|e| Failure::Usage(format!("cannot read {bugs_path}: {e}")))?;
    let bugs = BugSpec::parse_suite(&l.program.decls, &text)?;
    let levels = if levels.is_empty() {
        (0..=max_level).collect()
    } else {
        levels
    };
    let config = prog.config(json!({ "bugs": bugs_path, "levels": levels }));
    let (matrix, code, diagnostics) = match bug_matrix(
        &l.program.body,
        &l.universe,
        &bugs,
        &levels,
        &l.cfg,
        l.init.as_ref(),
    ) {
        Ok(m) => (m, EXIT_OK, json!({ "monotone": true })),
        Err(Error::Consistency(msg)) => {
            if prog.json {
                let r = Report {
                    command: "bugs",
                    config,
                    result: Json::Null,
                    diagnostics: json!({ "monotone": false, "error": msg }),
                    text: String::new(),
                    code: EXIT_FINDINGS,
                };
                return Ok(r);
            }
            return Err(Error::Consistency(msg).into());
        }
        Err(e) => return Err(e.into()),
    };
    let width = matrix
        .rows
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(3)
        .max(3);
    let mut out = format!("{:width$}", "bug");
    for lv in &matrix.levels {
        write!(out, " {lv:>3}").unwrap();
    }
    out.push('\n');
    for row in &matrix.rows {
        write!(out, "{:width$}", row.name).unwrap();
        for &f in &row.found {
            write!(out, " {:>3}", if f { "x" } else { "." }).unwrap();
        }
        out.push('\n');
    }
    Ok(Report {
        command: "bugs",
        config,
        result: to_json(&matrix),
        diagnostics,
        text: out,
        code,
    })
}

fn laws_cmd(cfg: GenConfig, names: &[String], mutant: Option<&str>) -> Result<Report, Failure> {
    let selected: Vec<Law> = if names.is_empty() {
        REGISTRY.to_vec()
    } else {
        names
            .iter()
            .map(|n| {
                lawcheck::lookup(n)
                    .copied()
                    .ok_or_else(|| Failure::Usage(format!("unknown law `{n}`")))
            })
            .collect::<Result<_, _>>()?
    };
    let alg = match mutant {
        None => &Standard as &dyn crate::traceset::Algebra,
        Some(m) => MUTANTS
            .iter()
            .find(|(n, _)| *n == m)
            .map(|(_, a)| *a)
            .ok_or_else(|| Failure::Usage(format!("unknown mutant `{m}`")))?,
    };
    let report = lawcheck::run_selected(alg, &cfg, &selected)?;
    let mut text = String::new();
    for r in &report.laws {
        let status = match (r.expected, r.control) {
            (true, false) => "PASS",
            (true, true) => "PASS (control refuted)",
            (false, false) => "FAIL",
            (false, true) => "FAIL (control not refuted)",
        };
        writeln!(
            text,
            "{status:<26} {:<24} exhaustive={} random={}",
            r.name, r.exhaustive_cases, r.random_cases
        )
        .unwrap();
        if let Some(c) = &r.counterexample {
            if r.verdict == Verdict::Fail {
                writeln!(
                    text,
                    "    {} counterexample: {}",
                    c.phase,
                    c.operands.join("; ")
                )
                .unwrap();
                writeln!(text, "    lhs: {}", c.lhs).unwrap();
                writeln!(text, "    rhs: {}", c.rhs).unwrap();
            }
        }
    }
    let failed = report.laws.iter().filter(|r| !r.expected).count();
    writeln!(
        text,
        "{} law(s), {failed} unexpected result(s)",
        report.laws.len()
    )
    .unwrap();
    let config = json!({ "generation": report.config, "mutant": mutant, "laws": names });
    Ok(Report {
        command: "laws",
        config,
        result: json!({ "laws": report.laws, "passed": report.passed }),
        diagnostics: json!({ "failed": failed }),
        text,
        code: if report.passed {
            EXIT_OK
        } else {
            EXIT_FINDINGS
        },
    })
}
