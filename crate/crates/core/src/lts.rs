//! Reachable labeled transition systems of closed processes, and their
//! DOT / JSON exports.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::parser::render;
use crate::semantics::{check_process, transitions, SemanticsConfig, SemanticsError};
use crate::syntax::{Action, Identifier, Process};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("state space exceeded {0} states")]
    StateSpaceExceeded(usize),
    #[error("edge count exceeded {0} edges")]
    EdgeSpaceExceeded(usize),
    #[error("state terms exceeded {0} syntax nodes in total")]
    TermSpaceExceeded(usize),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LtsLimits {
    pub max_states: usize,
    pub max_edges: usize,
    /// Bound on the summed size of all stored state terms. Terms can grow
    /// with every step (`rec X. (a.X + tau.(b.0 | 'b.X) \ {b})`), and
    /// memory then runs out long before `max_states` is reached.
    pub max_total_size: usize,
}

impl Default for LtsLimits {
    fn default() -> Self {
        LtsLimits { max_states: 10_000, max_edges: 100_000, max_total_size: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub id: StateId,
    pub process: Process,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: StateId,
    pub action: Action,
    pub to: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    states: Vec<State>,
    edges: Vec<Edge>,
    root: StateId,
    /// Outgoing edge indices per state.
    out: Vec<Vec<usize>>,
}

impl Lts {
    fn assemble(states: Vec<State>, edges: Vec<Edge>, root: StateId) -> Self {
        let mut out = vec![Vec::new(); states.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.from].push(i);
        }
        Lts { states, edges, root, out }
    }

    /// An LTS given directly by its edges, not derived from a process. Each
    /// state `i` carries the placeholder term `s{i}`.
    ///
    /// Panics if an edge mentions a state `>= num_states` or `root` is out of
    /// range.
    pub fn from_edges(num_states: usize, root: StateId, edges: impl IntoIterator<Item = (StateId, Action, StateId)>) -> Self {
        assert!(root < num_states.max(1), "root out of range");
        let states = (0..num_states.max(1))
            .map(|i| {
                let text = format!("s{i}");
                let process = Process::Var(Identifier::new(text.clone()).expect("valid placeholder"));
                State { id: i, process, text }
            })
            .collect::<Vec<_>>();
        let mut seen = std::collections::HashSet::new();
        let mut list = Vec::new();
        for (from, action, to) in edges {
            assert!(from < states.len() && to < states.len(), "edge endpoint out of range");
            let e = Edge { from, action, to };
            if seen.insert(e.clone()) {
                list.push(e);
            }
        }
        Self::assemble(states, list, root)
    }

    pub fn root(&self) -> StateId {
        self.root
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, id: StateId) -> &State {
        &self.states[id]
    }

    pub fn outgoing(&self, s: StateId) -> impl Iterator<Item = &Edge> + '_ {
        self.out[s].iter().map(move |&i| &self.edges[i])
    }

    /// Disjoint union of two systems. States of `other` are shifted by
    /// `self.num_states()`; returns the union (rooted at `self`'s root) and
    /// the shifted root of `other`.
    pub fn disjoint_union(&self, other: &Lts) -> (Lts, StateId) {
        let offset = self.states.len();
        let mut states = self.states.clone();
        states.extend(other.states.iter().map(|s| State { id: s.id + offset, ..s.clone() }));
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge { from: e.from + offset, action: e.action.clone(), to: e.to + offset }));
        (Self::assemble(states, edges, self.root), other.root + offset)
    }
}

/// Renames every `rec` binder to `X0, X1, ...`, numbering binders in
/// post-order (inner binders before outer ones, left before right).
///
/// Expects a closed process; alpha-equivalent closed terms map to the same
/// result.
pub fn canonicalize(p: &Process) -> Process {
    fn number(p: &Process, counter: &mut usize, order: &mut Vec<usize>) {
        match p {
            Process::Nil | Process::Var(_) => {}
            Process::Prefix(_, b) | Process::Restr(_, b) | Process::Relab(b, _) => number(b, counter, order),
            Process::Sum(l, r) | Process::Par(l, r) => {
                number(l, counter, order);
                number(r, counter, order);
            }
            Process::Rec(_, b) => {
                let slot = order.len();
                order.push(0);
                number(b, counter, order);
                order[slot] = *counter;
                *counter += 1;
            }
        }
    }

    fn rename(p: &Process, order: &[usize], next: &mut usize, env: &mut Vec<(Identifier, Identifier)>) -> Process {
        match p {
            Process::Nil => Process::Nil,
            Process::Var(x) => match env.iter().rev().find(|(old, _)| old == x) {
                Some((_, new)) => Process::Var(new.clone()),
                None => Process::Var(x.clone()),
            },
            Process::Prefix(u, b) => Process::prefix(u.clone(), rename(b, order, next, env)),
            Process::Sum(l, r) => {
                let l = rename(l, order, next, env);
                Process::sum(l, rename(r, order, next, env))
            }
            Process::Par(l, r) => {
                let l = rename(l, order, next, env);
                Process::par(l, rename(r, order, next, env))
            }
            Process::Restr(names, b) => Process::Restr(names.clone(), Box::new(rename(b, order, next, env))),
            Process::Relab(b, rf) => Process::relab(rename(b, order, next, env), rf.clone()),
            Process::Rec(x, b) => {
                let fresh = Identifier::new(format!("X{}", order[*next])).expect("valid canonical name");
                *next += 1;
                env.push((x.clone(), fresh.clone()));
                let body = rename(b, order, next, env);
                env.pop();
                Process::rec(fresh, body)
            }
        }
    }

    let mut order = Vec::new();
    number(p, &mut 0, &mut order);
    rename(p, &order, &mut 0, &mut Vec::new())
}

/// Breadth-first exploration of the states reachable from `root`.
pub fn build_lts(root: &Process, limits: &LtsLimits, cfg: &SemanticsConfig) -> Result<Lts, LtsError> {
    check_process(root)?;
    let start = canonicalize(root);
    let mut total_size = start.size();
    if total_size > limits.max_total_size {
        return Err(LtsError::TermSpaceExceeded(limits.max_total_size));
    }
    let mut index: HashMap<Process, StateId> = HashMap::new();
    let mut states = vec![State { id: 0, text: render(&start), process: start.clone() }];
    index.insert(start, 0);
    let mut edges: Vec<Edge> = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(s) = queue.pop_front() {
        let ts = transitions(&states[s].process, cfg)?;
        let first_edge = edges.len();
        for t in ts {
            let target = canonicalize(&t.target);
            let to = match index.get(&target) {
                Some(&id) => id,
                None => {
                    let id = states.len();
                    if id >= limits.max_states {
                        return Err(LtsError::StateSpaceExceeded(limits.max_states));
                    }
                    total_size += target.size();
                    if total_size > limits.max_total_size {
                        return Err(LtsError::TermSpaceExceeded(limits.max_total_size));
                    }
                    states.push(State { id, text: render(&target), process: target.clone() });
                    index.insert(target, id);
                    queue.push_back(id);
                    id
                }
            };
            let edge = Edge { from: s, action: t.action, to };
            if edges[first_edge..].contains(&edge) {
                continue;
            }
            if edges.len() >= limits.max_edges {
                return Err(LtsError::EdgeSpaceExceeded(limits.max_edges));
            }
            edges.push(edge);
        }
    }
    Ok(Lts::assemble(states, edges, 0))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn export_dot(lts: &Lts) -> String {
    let mut out = String::from("digraph lts {\n    rankdir=LR;\n");
    for s in lts.states() {
        let shape = if s.id == lts.root() { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "    s{} [label=\"{}\", shape={}];", s.id, dot_escape(&s.text), shape);
    }
    for e in lts.edges() {
        let _ = writeln!(out, "    s{} -> s{} [label=\"{}\"];", e.from, e.to, dot_escape(&e.action.to_string()));
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct JsonState<'a> {
    id: StateId,
    term: &'a str,
}

#[derive(Serialize)]
struct JsonEdge {
    from: StateId,
    action: String,
    to: StateId,
}

#[derive(Serialize)]
struct JsonLts<'a> {
    root: StateId,
    states: Vec<JsonState<'a>>,
    edges: Vec<JsonEdge>,
}

pub fn export_json(lts: &Lts) -> String {
    let doc = JsonLts {
        root: lts.root(),
        states: lts.states().iter().map(|s| JsonState { id: s.id, term: &s.text }).collect(),
        edges: lts
            .edges()
            .iter()
            .map(|e| JsonEdge { from: e.from, action: e.action.to_string(), to: e.to })
            .collect(),
    };
    serde_json::to_string(&doc).expect("LTS serializes")
}
