//! Command implementations for the `ccs` executable.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use anyhow::{bail, Context, Result};
use ccs_core::equiv::{equiv, weak_traces, EquivKind, EquivReport};
use ccs_core::laws::{check_law, expand, find_law, law_catalog, simplify_nil_summands, LawReport};
use ccs_core::lts::{build_lts, export_dot, export_json, LtsLimits};
use ccs_core::parser::{parse_program, render};
use ccs_core::semantics::{transitions, SemanticsConfig, Transition};
use ccs_core::syntax::Process;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exit code for "checked and not related" or "some law failed".
pub const EXIT_NEGATIVE: i32 = 1;
/// Exit code for input, semantic and limit errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Args)]
pub struct CliConfig {
    /// Maximum number of states explored when building a transition system.
    #[arg(long, global = true, env = "CCS_MAX_STATES", default_value = "10000", value_parser = positive)]
    pub max_states: usize,
    /// Maximum number of edges explored when building a transition system.
    #[arg(long, global = true, default_value = "100000", value_parser = positive)]
    pub max_edges: usize,
    /// Maximum summed size, in syntax nodes, of all state terms.
    #[arg(long, global = true, default_value = "2000000", value_parser = positive)]
    pub max_total_size: usize,
    /// Maximum nesting of recursion unfoldings within one step.
    #[arg(long = "max-depth", global = true, default_value = "64", value_parser = positive)]
    pub max_unfold_depth: usize,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
}

impl CliConfig {
    pub fn limits(&self) -> LtsLimits {
        LtsLimits { max_states: self.max_states, max_edges: self.max_edges, max_total_size: self.max_total_size }
    }

    pub fn semantics(&self) -> SemanticsConfig {
        SemanticsConfig::new(self.max_unfold_depth)
    }
}

impl Default for CliConfig {
    fn default() -> Self {
        let limits = LtsLimits::default();
        CliConfig {
            max_states: limits.max_states,
            max_edges: limits.max_edges,
            max_total_size: limits.max_total_size,
            max_unfold_depth: SemanticsConfig::default().max_unfold_depth,
            format: Format::Text,
        }
    }
}

/// Toolkit for CCS processes. TERM arguments are process expressions, or
/// `@file` to read a program of `Name = P;` definitions ending in a term.
#[derive(Debug, Parser)]
#[command(name = "ccs", version)]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Args)]
#[group(multiple = false)]
pub struct KindFlags {
    /// Strong bisimilarity (default).
    #[arg(long)]
    pub strong: bool,
    /// Weak bisimilarity.
    #[arg(long)]
    pub weak: bool,
    /// Rooted weak bisimilarity (observation congruence).
    #[arg(long)]
    pub rooted: bool,
}

impl KindFlags {
    pub fn kind(&self) -> EquivKind {
        if self.weak {
            EquivKind::Weak
        } else if self.rooted {
            EquivKind::RootedWeak
        } else {
            EquivKind::Strong
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every transition of a process.
    Trans { term: String },
    /// Build the reachable transition system.
    Lts { term: String },
    /// Decide bisimilarity of two processes. Exits 0 if related, 1 if not.
    Eq {
        left: String,
        right: String,
        #[command(flatten)]
        kind: KindFlags,
    },
    /// Apply the expansion law to `p | q` where p and q are sums of prefixes.
    Expand {
        term: String,
        /// Drop `0` summands from the result.
        #[arg(long)]
        simplify: bool,
        /// Confirm the result is strongly bisimilar to the input.
        #[arg(long)]
        check: bool,
    },
    /// Verify algebraic laws on random instances.
    Laws {
        /// Check every law in the catalog.
        #[arg(long, conflicts_with_all = ["law", "list"])]
        all: bool,
        /// Check a single law by name.
        #[arg(long, conflicts_with = "list")]
        law: Option<String>,
        /// Print the catalog without checking anything.
        #[arg(long)]
        list: bool,
        #[arg(long, default_value = "50")]
        samples: usize,
        #[arg(long, default_value = "0")]
        seed: u64,
    },
    /// List the weak traces of a process up to a length.
    Traces {
        term: String,
        #[arg(long, default_value = "3")]
        len: usize,
    },
    /// Step through a process interactively.
    Repl { term: String },
}

/// Reads a term argument: `@path` loads a program file, anything else is
/// parsed as a program text directly.
pub fn load_term(arg: &str) -> Result<Process> {
    let (text, origin) = match arg.strip_prefix('@') {
        Some(path) => (std::fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?, path),
        None => (arg.to_string(), "argument"),
    };
    parse_program(&text).with_context(|| format!("parse error in {origin}"))
}

fn json_string_pairs(ts: &[Transition]) -> String {
    let pairs: Vec<[String; 2]> = ts.iter().map(|t| [t.action.to_string(), render(&t.target)]).collect();
    serde_json::to_string(&pairs).expect("pairs serialize")
}

pub fn cmd_trans(term: &str, cfg: &CliConfig) -> Result<String> {
    let p = load_term(term)?;
    let ts = transitions(&p, &cfg.semantics())?;
    match cfg.format {
        Format::Json => Ok(json_string_pairs(ts.as_slice()) + "\n"),
        Format::Dot => bail!("dot output is only available for `lts`"),
        Format::Text => {
            let mut out = String::new();
            for t in &ts {
                let _ = writeln!(out, "{} -> {}", t.action, render(&t.target));
            }
            out.push_str("and no other transitions\n");
            Ok(out)
        }
    }
}

pub fn cmd_lts(term: &str, cfg: &CliConfig) -> Result<String> {
    let p = load_term(term)?;
    let lts = build_lts(&p, &cfg.limits(), &cfg.semantics())?;
    Ok(match cfg.format {
        Format::Json => export_json(&lts) + "\n",
        Format::Dot => export_dot(&lts),
        Format::Text => {
            let mut out = format!("{} states, {} edges, root s{}\n", lts.num_states(), lts.edges().len(), lts.root());
            for s in lts.states() {
                let _ = writeln!(out, "s{}: {}", s.id, s.text);
            }
            for e in lts.edges() {
                let _ = writeln!(out, "s{} --{}-> s{}", e.from, e.action, e.to);
            }
            out
        }
    })
}

fn report_text(r: &EquivReport) -> String {
    let mut out = format!("{}: {}\n", r.kind, if r.related { "related" } else { "not related" });
    if let Some(part) = &r.witness {
        let blocks: Vec<String> = part
            .blocks()
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|s| format!("s{s}")).collect::<Vec<_>>().join(", ")))
            .collect();
        let _ = writeln!(out, "classes: {}", blocks.join(" "));
    }
    if let Some(d) = &r.distinguishing {
        let side = if d.state == r.roots.0 { "left" } else { "right" };
        let _ = writeln!(
            out,
            "distinguishing: the {side} process ({}) can do {} and the other cannot match it",
            r.lts.state(d.state).text,
            d.action
        );
    }
    out
}

/// Returns the rendered report and whether the processes are related.
pub fn cmd_eq(left: &str, right: &str, kind: EquivKind, cfg: &CliConfig) -> Result<(String, bool)> {
    let p = load_term(left)?;
    let q = load_term(right)?;
    let report = equiv(kind, &p, &q, &cfg.limits(), &cfg.semantics())?;
    let text = match cfg.format {
        Format::Json => report.to_json() + "\n",
        Format::Dot => bail!("dot output is only available for `lts`"),
        Format::Text => report_text(&report),
    };
    Ok((text, report.related))
}

/// Returns the rendered expansion and, with `check`, whether it is strongly
/// bisimilar to the input.
pub fn cmd_expand(term: &str, simplify: bool, check: bool, cfg: &CliConfig) -> Result<(String, Option<bool>)> {
    let p = load_term(term)?;
    let Process::Par(l, r) = &p else {
        bail!("expected a parallel composition `p | q` of two sums of prefixes");
    };
    let mut e = expand(l, r)?;
    if simplify {
        e = simplify_nil_summands(&e);
    }
    let checked = if check { Some(equiv(EquivKind::Strong, &e, &p, &cfg.limits(), &cfg.semantics())?.related) } else { None };
    let text = match cfg.format {
        Format::Json => {
            serde_json::json!({ "expansion": render(&e), "bisimilar": checked }).to_string() + "\n"
        }
        Format::Dot => bail!("dot output is only available for `lts`"),
        Format::Text => {
            let mut out = render(&e) + "\n";
            match checked {
                Some(true) => out.push_str("check: strongly bisimilar to the input\n"),
                Some(false) => out.push_str("check: NOT strongly bisimilar to the input\n"),
                None => {}
            }
            out
        }
    };
    Ok((text, checked))
}

pub enum LawSelection<'a> {
    All,
    One(&'a str),
}

/// Returns the result table and whether every instance passed.
pub fn cmd_laws(selection: LawSelection<'_>, samples: usize, seed: u64, cfg: &CliConfig) -> Result<(String, bool)> {
    let names: Vec<&str> = match selection {
        LawSelection::All => law_catalog().iter().map(|l| l.name).collect(),
        LawSelection::One(name) => vec![find_law(name)?.name],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reports: Vec<LawReport> = names
        .iter()
        .map(|n| check_law(n, samples, &mut rng, &cfg.limits(), &cfg.semantics()))
        .collect::<Result<_, _>>()?;
    let ok = reports.iter().all(LawReport::all_passed);
    let text = match cfg.format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| serde_json::json!({ "law": r.name, "samples": r.samples, "passed": r.passed }))
                .collect();
            serde_json::Value::Array(rows).to_string() + "\n"
        }
        Format::Dot => bail!("dot output is only available for `lts`"),
        Format::Text => {
            let width = names.iter().map(|n| n.len()).max().unwrap_or(0);
            let mut out = String::new();
            for r in &reports {
                let verdict = if r.all_passed() { "pass" } else { "FAIL" };
                let _ = writeln!(out, "{:<width$}  {:>4}/{:<4} {verdict}", r.name, r.passed, r.samples);
                if let Some(f) = &r.first_failure {
                    let _ = writeln!(out, "    counterexample: {}  ~  {}", f.lhs, f.rhs);
                }
            }
            let passed = reports.iter().filter(|r| r.all_passed()).count();
            let _ = writeln!(out, "{passed}/{} laws passed (seed {seed})", reports.len());
            out
        }
    };
    Ok((text, ok))
}

pub fn cmd_law_list(cfg: &CliConfig) -> Result<String> {
    match cfg.format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = law_catalog()
                .iter()
                .map(|l| serde_json::json!({ "law": l.name, "statement": l.statement }))
                .collect();
            Ok(serde_json::Value::Array(rows).to_string() + "\n")
        }
        Format::Dot => bail!("dot output is only available for `lts`"),
        Format::Text => {
            let mut out = String::new();
            for l in law_catalog() {
                let _ = writeln!(out, "{:<26} {}", l.name, l.statement);
            }
            Ok(out)
        }
    }
}

pub fn cmd_traces(term: &str, len: usize, cfg: &CliConfig) -> Result<String> {
    let p = load_term(term)?;
    let traces = weak_traces(&p, len, &cfg.limits(), &cfg.semantics())?;
    let words: Vec<Vec<String>> = traces.iter().map(|t| t.iter().map(|l| l.to_string()).collect()).collect();
    match cfg.format {
        Format::Json => Ok(serde_json::to_string(&words).expect("traces serialize") + "\n"),
        Format::Dot => bail!("dot output is only available for `lts`"),
        Format::Text => {
            let mut out = String::new();
            for w in &words {
                if w.is_empty() {
                    out.push_str("(empty)\n");
                } else {
                    let _ = writeln!(out, "{}", w.join(" "));
                }
            }
            Ok(out)
        }
    }
}

/// Line-oriented stepping session. Enter a transition number to take it,
/// `u` to undo the last step and `q` to quit.
pub struct Repl {
    history: Vec<Process>,
    cfg: SemanticsConfig,
}

impl Repl {
    pub fn new(start: Process, cfg: SemanticsConfig) -> Self {
        Repl { history: vec![start], cfg }
    }

    pub fn current(&self) -> &Process {
        self.history.last().expect("history is never empty")
    }

    pub fn depth(&self) -> usize {
        self.history.len() - 1
    }

    fn show<W: Write>(&self, out: &mut W, ts: &[Transition]) -> io::Result<()> {
        writeln!(out, "current: {}", render(self.current()))?;
        if ts.is_empty() {
            writeln!(out, "  no transitions")?;
        }
        for (i, t) in ts.iter().enumerate() {
            writeln!(out, "  [{}] {} -> {}", i + 1, t.action, render(&t.target))?;
        }
        Ok(())
    }

    /// Runs until `q` or end of input.
    pub fn run<R: BufRead, W: Write>(&mut self, input: R, out: &mut W) -> Result<()> {
        let mut ts = transitions(self.current(), &self.cfg)?;
        self.show(out, ts.as_slice())?;
        let mut lines = input.lines();
        loop {
            write!(out, "> ")?;
            out.flush()?;
            let Some(line) = lines.next() else { break };
            let line = line?;
            match line.trim() {
                "q" | "quit" => break,
                "u" | "undo" => {
                    if self.history.len() > 1 {
                        self.history.pop();
                        ts = transitions(self.current(), &self.cfg)?;
                        self.show(out, ts.as_slice())?;
                    } else {
                        writeln!(out, "nothing to undo")?;
                    }
                }
                "" => {}
                other => match other.parse::<usize>() {
                    Ok(k) if (1..=ts.len()).contains(&k) => {
                        let next = ts.as_slice()[k - 1].target.clone();
                        self.history.push(next);
                        ts = transitions(self.current(), &self.cfg)?;
                        self.show(out, ts.as_slice())?;
                    }
                    Ok(k) => writeln!(out, "no transition {k}; choose 1..{}", ts.len())?,
                    Err(_) => writeln!(out, "enter a transition number, `u` to undo or `q` to quit")?,
                },
            }
        }
        Ok(())
    }
}

/// Runs one command, writing its output to `out`, and returns the exit code.
pub fn run<W: Write>(cli: Cli, out: &mut W) -> Result<i32> {
    let cfg = &cli.config;
    let negative = |ok: bool| if ok { 0 } else { EXIT_NEGATIVE };
    match cli.command {
        Command::Trans { term } => {
            out.write_all(cmd_trans(&term, cfg)?.as_bytes())?;
            Ok(0)
        }
        Command::Lts { term } => {
            out.write_all(cmd_lts(&term, cfg)?.as_bytes())?;
            Ok(0)
        }
        Command::Eq { left, right, kind } => {
            let (text, related) = cmd_eq(&left, &right, kind.kind(), cfg)?;
            out.write_all(text.as_bytes())?;
            Ok(negative(related))
        }
        Command::Expand { term, simplify, check } => {
            let (text, checked) = cmd_expand(&term, simplify, check, cfg)?;
            out.write_all(text.as_bytes())?;
            Ok(negative(checked != Some(false)))
        }
        Command::Laws { all, law, list, samples, seed } => {
            if list {
                out.write_all(cmd_law_list(cfg)?.as_bytes())?;
                return Ok(0);
            }
            let selection = match (&law, all) {
                (Some(name), _) => LawSelection::One(name),
                (None, true) => LawSelection::All,
                (None, false) => bail!("choose --all, --law NAME or --list"),
            };
            let (text, ok) = cmd_laws(selection, samples, seed, cfg)?;
            out.write_all(text.as_bytes())?;
            Ok(negative(ok))
        }
        Command::Traces { term, len } => {
            out.write_all(cmd_traces(&term, len, cfg)?.as_bytes())?;
            Ok(0)
        }
        Command::Repl { term } => {
            let p = load_term(&term)?;
            let stdin = io::stdin();
            Repl::new(p, cfg.semantics()).run(stdin.lock(), out)?;
            Ok(0)
        }
    }
}
