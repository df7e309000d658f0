//! Strong, weak and rooted weak bisimilarity on finite labeled transition
//! systems.
//!
//! Bisimilarity is computed as the coarsest stable partition: start from a
//! single block and split blocks by the set of `(action, target block)`
//! pairs each state can reach, until no block splits. Weak bisimilarity runs
//! the same refinement on the saturated system, where a visible move is
//! `EPS ; --l-> ; EPS` and a tau move is `EPS` (zero or more taus).
//!
//! [`check_bisimulation`] evaluates the transfer condition directly on a
//! candidate relation. It shares no code with the refinement and is used to
//! validate witnesses.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::lts::{build_lts, Lts, LtsError, LtsLimits, StateId};
use crate::semantics::SemanticsConfig;
use crate::syntax::{Action, Label, Process};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivKind {
    Strong,
    Weak,
    RootedWeak,
}

impl std::fmt::Display for EquivKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EquivKind::Strong => "strong",
            EquivKind::Weak => "weak",
            EquivKind::RootedWeak => "rooted_weak",
        })
    }
}

/// Which transfer condition [`check_bisimulation`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BisimKind {
    Strong,
    Weak,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<StateId>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Builds a partition from a block index per state. Blocks are
    /// renumbered in order of their smallest state.
    pub fn from_block_of(raw: &[usize]) -> Self {
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let mut blocks: Vec<Vec<StateId>> = Vec::new();
        let mut block_of = Vec::with_capacity(raw.len());
        for (s, b) in raw.iter().enumerate() {
            let next = renumber.len();
            let id = *renumber.entry(*b).or_insert(next);
            if id == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[id].push(s);
            block_of.push(id);
        }
        Partition { blocks, block_of }
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, s: StateId) -> usize {
        self.block_of[s]
    }

    pub fn same_block(&self, a: StateId, b: StateId) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    /// All pairs of states sharing a block.
    pub fn to_relation(&self) -> Relation {
        let mut rel = Relation::new();
        for block in &self.blocks {
            for &a in block {
                for &b in block {
                    rel.insert(a, b);
                }
            }
        }
        rel
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relation {
    pairs: BTreeSet<(StateId, StateId)>,
}

impl Relation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity(n: usize) -> Self {
        (0..n).map(|s| (s, s)).collect()
    }

    pub fn insert(&mut self, a: StateId, b: StateId) -> bool {
        self.pairs.insert((a, b))
    }

    pub fn remove(&mut self, a: StateId, b: StateId) -> bool {
        self.pairs.remove(&(a, b))
    }

    pub fn contains(&self, a: StateId, b: StateId) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.pairs.iter().copied()
    }

    /// States related to `a`, ascending.
    pub fn image(&self, a: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.pairs.range((a, 0)..=(a, StateId::MAX)).map(|&(_, b)| b)
    }
}

impl FromIterator<(StateId, StateId)> for Relation {
    fn from_iter<I: IntoIterator<Item = (StateId, StateId)>>(iter: I) -> Self {
        Relation { pairs: iter.into_iter().collect() }
    }
}

/// Reflexive-transitive closure of the tau edges.
pub fn compute_eps(lts: &Lts) -> Relation {
    let mut rel = Relation::new();
    for (s, reach) in eps_closures(lts).into_iter().enumerate() {
        for t in reach {
            rel.insert(s, t);
        }
    }
    rel
}

fn eps_closures(lts: &Lts) -> Vec<Vec<StateId>> {
    (0..lts.num_states())
        .map(|s| {
            let mut seen = vec![false; lts.num_states()];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for e in lts.outgoing(x) {
                    if e.action.is_tau() && !seen[e.to] {
                        seen[e.to] = true;
                        queue.push_back(e.to);
                    }
                }
            }
            (0..seen.len()).filter(|&t| seen[t]).collect()
        })
        .collect()
}

/// An LTS together with its weak transition relations.
#[derive(Debug, Clone)]
pub struct SaturatedLts {
    base: Lts,
    eps: Relation,
    eps_succ: Vec<Vec<StateId>>,
    weak_edges: Vec<(StateId, Label, StateId)>,
    weak_tau_edges: Vec<(StateId, StateId)>,
    weak_out: Vec<Vec<(Label, StateId)>>,
    weak_tau_out: Vec<Vec<StateId>>,
}

impl SaturatedLts {
    pub fn base(&self) -> &Lts {
        &self.base
    }

    pub fn eps(&self) -> &Relation {
        &self.eps
    }

    /// `s` and every state reachable from it by taus, ascending.
    pub fn eps_successors(&self, s: StateId) -> &[StateId] {
        &self.eps_succ[s]
    }

    /// All `(s, l, t)` with `s ==l=>> t`.
    pub fn weak_edges(&self) -> &[(StateId, Label, StateId)] {
        &self.weak_edges
    }

    /// All `(s, t)` with `s ==tau=>> t`, i.e. at least one tau step.
    pub fn weak_tau_edges(&self) -> &[(StateId, StateId)] {
        &self.weak_tau_edges
    }

    pub fn weak_successors(&self, s: StateId) -> &[(Label, StateId)] {
        &self.weak_out[s]
    }

    pub fn weak_tau_successors(&self, s: StateId) -> &[StateId] {
        &self.weak_tau_out[s]
    }

    /// Targets of `s ==u=>>`. For tau this requires at least one tau step.
    pub fn weak_move_targets(&self, s: StateId, u: &Action) -> Vec<StateId> {
        match u {
            Action::Tau => self.weak_tau_out[s].clone(),
            Action::Visible(l) => self.weak_out[s].iter().filter(|(m, _)| m == l).map(|&(_, t)| t).collect(),
        }
    }
}

pub fn saturate(lts: &Lts) -> SaturatedLts {
    let n = lts.num_states();
    let eps_succ = eps_closures(lts);
    let mut weak: BTreeSet<(StateId, Label, StateId)> = BTreeSet::new();
    let mut weak_tau: BTreeSet<(StateId, StateId)> = BTreeSet::new();
    for s in 0..n {
        for &s1 in &eps_succ[s] {
            for e in lts.outgoing(s1) {
                for &t in &eps_succ[e.to] {
                    match &e.action {
                        Action::Tau => {
                            weak_tau.insert((s, t));
                        }
                        Action::Visible(l) => {
                            weak.insert((s, l.clone(), t));
                        }
                    }
                }
            }
        }
    }
    let mut weak_out = vec![Vec::new(); n];
    for (s, l, t) in &weak {
        weak_out[*s].push((l.clone(), *t));
    }
    let mut weak_tau_out = vec![Vec::new(); n];
    for &(s, t) in &weak_tau {
        weak_tau_out[s].push(t);
    }
    let mut eps = Relation::new();
    for (s, reach) in eps_succ.iter().enumerate() {
        for &t in reach {
            eps.insert(s, t);
        }
    }
    SaturatedLts {
        base: lts.clone(),
        eps,
        eps_succ,
        weak_edges: weak.into_iter().collect(),
        weak_tau_edges: weak_tau.into_iter().collect(),
        weak_out,
        weak_tau_out,
    }
}

/// Coarsest partition of `0..moves.len()` stable under the given moves.
fn refine(moves: &[Vec<(Action, StateId)>]) -> Partition {
    let n = moves.len();
    let mut block_of = vec![0usize; n];
    let mut count = usize::from(n > 0);
    loop {
        let mut ids: HashMap<(usize, Vec<(Action, usize)>), usize> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for s in 0..n {
            let mut sig: Vec<(Action, usize)> = moves[s].iter().map(|(a, t)| (a.clone(), block_of[*t])).collect();
            sig.sort();
            sig.dedup();
            let fresh = ids.len();
            next.push(*ids.entry((block_of[s], sig)).or_insert(fresh));
        }
        let new_count = ids.len();
        block_of = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    Partition::from_block_of(&block_of)
}

/// Strong bisimilarity classes of `lts`.
pub fn strong_bisim_partition(lts: &Lts) -> Partition {
    let moves: Vec<Vec<(Action, StateId)>> = (0..lts.num_states())
        .map(|s| lts.outgoing(s).map(|e| (e.action.clone(), e.to)).collect())
        .collect();
    refine(&moves)
}

/// Weak bisimilarity classes of the saturated system.
pub fn weak_bisim_partition(sat: &SaturatedLts) -> Partition {
    let moves: Vec<Vec<(Action, StateId)>> = (0..sat.base.num_states())
        .map(|s| {
            let visible = sat.weak_out[s].iter().map(|(l, t)| (Action::Visible(l.clone()), *t));
            let silent = sat.eps_succ[s].iter().map(|&t| (Action::Tau, t));
            visible.chain(silent).collect()
        })
        .collect();
    refine(&moves)
}

/// A state and an action whose move from that state has no matching answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distinguishing {
    pub state: StateId,
    pub action: Action,
}

#[derive(Debug, Clone)]
pub struct EquivReport {
    pub kind: EquivKind,
    pub related: bool,
    /// Bisimilarity classes of the joint system, when related.
    pub witness: Option<Partition>,
    /// Where the transfer condition fails, when not related.
    pub distinguishing: Option<Distinguishing>,
    /// The joint system both processes were explored into.
    pub lts: Lts,
    pub roots: (StateId, StateId),
}

#[derive(Serialize)]
struct JsonDistinguishing {
    state: StateId,
    action: String,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    kind: EquivKind,
    related: bool,
    blocks: &'a [Vec<StateId>],
    distinguishing: Option<JsonDistinguishing>,
}

impl EquivReport {
    pub fn to_json(&self) -> String {
        let doc = JsonReport {
            kind: self.kind,
            related: self.related,
            blocks: self.witness.as_ref().map(|p| p.blocks()).unwrap_or(&[]),
            distinguishing: self
                .distinguishing
                .as_ref()
                .map(|d| JsonDistinguishing { state: d.state, action: d.action.to_string() }),
        };
        serde_json::to_string(&doc).expect("report serializes")
    }
}

fn unmatched_strong(lts: &Lts, part: &Partition, p: StateId, q: StateId) -> Option<Action> {
    lts.outgoing(p)
        .find(|e| !lts.outgoing(q).any(|f| f.action == e.action && part.same_block(e.to, f.to)))
        .map(|e| e.action.clone())
}

/// A base move of `p` that `q` cannot answer. With `rooted`, a tau move
/// must be answered by at least one tau; otherwise by zero or more.
fn unmatched_weak(sat: &SaturatedLts, part: &Partition, p: StateId, q: StateId, rooted: bool) -> Option<Action> {
    sat.base
        .outgoing(p)
        .find(|e| {
            let answers: Vec<StateId> = match &e.action {
                Action::Visible(_) => sat.weak_move_targets(q, &e.action),
                Action::Tau if rooted => sat.weak_tau_out[q].clone(),
                Action::Tau => sat.eps_succ[q].clone(),
            };
            !answers.into_iter().any(|t| part.same_block(e.to, t))
        })
        .map(|e| e.action.clone())
}

fn distinguish(
    p: StateId,
    q: StateId,
    mut unmatched: impl FnMut(StateId, StateId) -> Option<Action>,
) -> Option<Distinguishing> {
    unmatched(p, q)
        .map(|action| Distinguishing { state: p, action })
        .or_else(|| unmatched(q, p).map(|action| Distinguishing { state: q, action }))
}

/// Compares two states of one system.
pub fn compare_states(lts: Lts, left: StateId, right: StateId, kind: EquivKind) -> EquivReport {
    let (related, witness, distinguishing) = match kind {
        EquivKind::Strong => {
            let part = strong_bisim_partition(&lts);
            if part.same_block(left, right) {
                (true, Some(part), None)
            } else {
                let d = distinguish(left, right, |a, b| unmatched_strong(&lts, &part, a, b));
                (false, None, d)
            }
        }
        EquivKind::Weak | EquivKind::RootedWeak => {
            let sat = saturate(&lts);
            let part = weak_bisim_partition(&sat);
            let rooted = kind == EquivKind::RootedWeak;
            let d = distinguish(left, right, |a, b| unmatched_weak(&sat, &part, a, b, rooted));
            let related = if rooted { d.is_none() } else { part.same_block(left, right) };
            if related {
                (true, Some(part), None)
            } else {
                // Roots in different weak classes always leave some root move
                // unanswered; the fallback is unreachable in practice.
                let d = d.unwrap_or(Distinguishing { state: left, action: Action::Tau });
                (false, None, Some(d))
            }
        }
    };
    EquivReport { kind, related, witness, distinguishing, lts, roots: (left, right) }
}

fn joint(p: &Process, q: &Process, limits: &LtsLimits, cfg: &SemanticsConfig) -> Result<(Lts, StateId, StateId), LtsError> {
    let left = build_lts(p, limits, cfg)?;
    let right = build_lts(q, limits, cfg)?;
    let (lts, right_root) = left.disjoint_union(&right);
    Ok((lts, left.root(), right_root))
}

pub fn equiv(
    kind: EquivKind,
    p: &Process,
    q: &Process,
    limits: &LtsLimits,
    cfg: &SemanticsConfig,
) -> Result<EquivReport, LtsError> {
    let (lts, a, b) = joint(p, q, limits, cfg)?;
    Ok(compare_states(lts, a, b, kind))
}

pub fn strong_equiv(p: &Process, q: &Process, limits: &LtsLimits, cfg: &SemanticsConfig) -> Result<EquivReport, LtsError> {
    equiv(EquivKind::Strong, p, q, limits, cfg)
}

pub fn weak_equiv(p: &Process, q: &Process, limits: &LtsLimits, cfg: &SemanticsConfig) -> Result<EquivReport, LtsError> {
    equiv(EquivKind::Weak, p, q, limits, cfg)
}

pub fn rooted_weak_equiv(
    p: &Process,
    q: &Process,
    limits: &LtsLimits,
    cfg: &SemanticsConfig,
) -> Result<EquivReport, LtsError> {
    equiv(EquivKind::RootedWeak, p, q, limits, cfg)
}

/// States reachable from `from` along a path whose visible labels spell
/// `trace` (taus are skipped).
pub fn weak_trace_targets(sat: &SaturatedLts, from: StateId, trace: &[Label]) -> BTreeSet<StateId> {
    let mut current: BTreeSet<StateId> = sat.eps_succ[from].iter().copied().collect();
    for l in trace {
        current = current
            .iter()
            .flat_map(|&s| sat.weak_out[s].iter().filter(|(m, _)| m == l).map(|&(_, t)| t))
            .collect();
        if current.is_empty() {
            break;
        }
    }
    current
}

pub fn weak_trace_check(p: &Process, trace: &[Label], limits: &LtsLimits, cfg: &SemanticsConfig) -> Result<bool, LtsError> {
    let lts = build_lts(p, limits, cfg)?;
    let sat = saturate(&lts);
    Ok(!weak_trace_targets(&sat, lts.root(), trace).is_empty())
}

/// Visible labels occurring on some edge of `lts`, sorted.
pub fn alphabet(lts: &Lts) -> Vec<Label> {
    let set: BTreeSet<Label> = lts
        .edges()
        .iter()
        .filter_map(|e| match &e.action {
            Action::Visible(l) => Some(l.clone()),
            Action::Tau => None,
        })
        .collect();
    set.into_iter().collect()
}

/// Every weak trace of length at most `max_len` starting at `from`, shortest
/// first and in label order within a length.
pub fn weak_traces_from(sat: &SaturatedLts, from: StateId, max_len: usize) -> Vec<Vec<Label>> {
    let labels = alphabet(&sat.base);
    let start: BTreeSet<StateId> = sat.eps_succ[from].iter().copied().collect();
    let mut out = vec![Vec::new()];
    let mut layer = vec![(Vec::<Label>::new(), start)];
    for _ in 0..max_len {
        let mut next_layer = Vec::new();
        for (trace, states) in &layer {
            for l in &labels {
                let next: BTreeSet<StateId> = states
                    .iter()
                    .flat_map(|&s| sat.weak_out[s].iter().filter(|(m, _)| m == l).map(|&(_, t)| t))
                    .collect();
                if !next.is_empty() {
                    let mut t = trace.clone();
                    t.push(l.clone());
                    out.push(t.clone());
                    next_layer.push((t, next));
                }
            }
        }
        layer = next_layer;
    }
    out
}

pub fn weak_traces(p: &Process, max_len: usize, limits: &LtsLimits, cfg: &SemanticsConfig) -> Result<Vec<Vec<Label>>, LtsError> {
    let lts = build_lts(p, limits, cfg)?;
    let sat = saturate(&lts);
    Ok(weak_traces_from(&sat, lts.root(), max_len))
}

/// Does `rel` satisfy the (strong or weak) bisimulation transfer condition
/// in both directions for every pair?
pub fn check_bisimulation(lts: &Lts, rel: &Relation, kind: BisimKind) -> bool {
    let n = lts.num_states();
    if rel.iter().any(|(a, b)| a >= n || b >= n) {
        return false;
    }
    match kind {
        BisimKind::Strong => rel.iter().all(|(p, q)| {
            strong_transfer(lts, rel, p, q, false) && strong_transfer(lts, rel, q, p, true)
        }),
        BisimKind::Weak => check_weak_bisimulation(&saturate(lts), rel),
    }
}

// Every move p --u-> p1 has q --u-> q1 with (p1, q1) in rel (or (q1, p1)
// when `flipped`).
fn strong_transfer(lts: &Lts, rel: &Relation, p: StateId, q: StateId, flipped: bool) -> bool {
    lts.outgoing(p).all(|e| {
        lts.outgoing(q).any(|f| {
            f.action == e.action && if flipped { rel.contains(f.to, e.to) } else { rel.contains(e.to, f.to) }
        })
    })
}

pub fn check_weak_bisimulation(sat: &SaturatedLts, rel: &Relation) -> bool {
    let n = sat.base.num_states();
    if rel.iter().any(|(a, b)| a >= n || b >= n) {
        return false;
    }
    rel.iter().all(|(p, q)| weak_transfer(sat, rel, p, q, false) && weak_transfer(sat, rel, q, p, true))
}

fn weak_transfer(sat: &SaturatedLts, rel: &Relation, p: StateId, q: StateId, flipped: bool) -> bool {
    let related = |a: StateId, b: StateId| if flipped { rel.contains(b, a) } else { rel.contains(a, b) };
    sat.base.outgoing(p).all(|e| match &e.action {
        Action::Visible(l) => sat.weak_out[q].iter().any(|(m, t)| m == l && related(e.to, *t)),
        Action::Tau => sat.eps_succ[q].iter().any(|&t| related(e.to, t)),
    })
}
