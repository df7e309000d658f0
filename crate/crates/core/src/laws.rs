//! Strong algebraic laws as checkable schemas, and the expansion law.
//!
//! A law is instantiated from a map of metavariable bindings and verified by
//! deciding strong bisimilarity of the two sides.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::equiv::strong_equiv;
use crate::gen::TermGen;
use crate::lts::{LtsError, LtsLimits};
use crate::parser::render;
use crate::semantics::SemanticsConfig;
use crate::syntax::{
    apply_relabeling, ccs_subst_unchecked, compl_label, Action, Identifier, Label, NameSet, Process,
    Relabeling,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawError {
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error("missing binding for `{0}`")]
    MissingBinding(String),
    #[error("binding `{name}` must be {expected}")]
    BindingKind { name: String, expected: MetaKind },
    #[error("term is not a prefix")]
    NotAPrefix,
    #[error("sum must have at least one summand")]
    EmptySum,
    #[error("not a sum of prefixes: {0}")]
    NotPrefixedSum(String),
    #[error(transparent)]
    Lts(#[from] LtsError),
}

// ---------------------------------------------------------------------------
// Expansion law

/// One summand `u.p` of a prefixed sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixedSummand {
    pub action: Action,
    pub body: Process,
}

impl PrefixedSummand {
    pub fn new(action: Action, body: Process) -> Self {
        PrefixedSummand { action, body }
    }

    pub fn from_process(p: &Process) -> Result<Self, LawError> {
        Ok(PrefixedSummand { action: pref_act(p)?, body: pref_proc(p)? })
    }

    pub fn to_process(&self) -> Process {
        Process::prefix(self.action.clone(), self.body.clone())
    }
}

pub fn is_prefix(p: &Process) -> bool {
    matches!(p, Process::Prefix(..))
}

pub fn pref_act(p: &Process) -> Result<Action, LawError> {
    match p {
        Process::Prefix(u, _) => Ok(u.clone()),
        _ => Err(LawError::NotAPrefix),
    }
}

pub fn pref_proc(p: &Process) -> Result<Process, LawError> {
    match p {
        Process::Prefix(_, b) => Ok((**b).clone()),
        _ => Err(LawError::NotAPrefix),
    }
}

/// Left-nested sum `(...(p0 + p1) + ...) + pn`.
pub fn sigma(fs: &[Process]) -> Result<Process, LawError> {
    let (first, rest) = fs.split_first().ok_or(LawError::EmptySum)?;
    Ok(rest.iter().fold(first.clone(), |acc, f| Process::sum(acc, f.clone())))
}

fn sync_one(u: &Action, p: &Process, g: &PrefixedSummand) -> Option<Process> {
    match (u, &g.action) {
        (Action::Visible(l), Action::Visible(m)) if *l == compl_label(m) => {
            Some(Process::prefix(Action::Tau, Process::par(p.clone(), g.body.clone())))
        }
        _ => None,
    }
}

/// Synchronizations of `u.p` against the summands `gs`, following the
/// definitional recursion: the first summand contributes `0` when it cannot
/// synchronize, later ones contribute nothing.
pub fn sync(u: &Action, p: &Process, gs: &[PrefixedSummand]) -> Result<Process, LawError> {
    let (first, rest) = gs.split_first().ok_or(LawError::EmptySum)?;
    let mut acc = sync_one(u, p, first).unwrap_or(Process::Nil);
    for g in rest {
        if let Some(t) = sync_one(u, p, g) {
            acc = Process::sum(t, acc);
        }
    }
    Ok(acc)
}

/// `sync(u_0, p_0, gs) + sync(u_1, p_1, gs) + ...`, left-nested.
pub fn all_sync(fs: &[PrefixedSummand], gs: &[PrefixedSummand]) -> Result<Process, LawError> {
    if gs.is_empty() {
        return Err(LawError::EmptySum);
    }
    let parts = fs.iter().map(|f| sync(&f.action, &f.body, gs)).collect::<Result<Vec<_>, _>>()?;
    sigma(&parts)
}

/// The summands of a sum of prefixes, left to right.
pub fn summands(p: &Process) -> Result<Vec<PrefixedSummand>, LawError> {
    fn walk(p: &Process, out: &mut Vec<PrefixedSummand>) -> bool {
        match p {
            Process::Sum(l, r) => walk(l, out) && walk(r, out),
            Process::Prefix(u, b) => {
                out.push(PrefixedSummand::new(u.clone(), (**b).clone()));
                true
            }
            _ => false,
        }
    }
    let mut out = Vec::new();
    if walk(p, &mut out) {
        Ok(out)
    } else {
        Err(LawError::NotPrefixedSum(render(p)))
    }
}

/// Expansion of `p | q` for prefixed sums `p = Σ μ_i.p_i`, `q = Σ μ'_j.q_j`:
/// `(Σ μ_i.(p_i | q) + Σ μ'_j.(p | q_j)) + all_sync`.
pub fn expand(p: &Process, q: &Process) -> Result<Process, LawError> {
    let fs = summands(p)?;
    let gs = summands(q)?;
    let left: Vec<Process> =
        fs.iter().map(|f| Process::prefix(f.action.clone(), Process::par(f.body.clone(), q.clone()))).collect();
    let right: Vec<Process> =
        gs.iter().map(|g| Process::prefix(g.action.clone(), Process::par(p.clone(), g.body.clone()))).collect();
    Ok(Process::sum(Process::sum(sigma(&left)?, sigma(&right)?), all_sync(&fs, &gs)?))
}

/// Drops `0` summands from every sum, recursively. A sum of only `0`s
/// becomes `0`.
pub fn simplify_nil_summands(p: &Process) -> Process {
    match p {
        Process::Nil | Process::Var(_) => p.clone(),
        Process::Prefix(u, b) => Process::prefix(u.clone(), simplify_nil_summands(b)),
        Process::Sum(l, r) => match (simplify_nil_summands(l), simplify_nil_summands(r)) {
            (Process::Nil, r) => r,
            (l, Process::Nil) => l,
            (l, r) => Process::sum(l, r),
        },
        Process::Par(l, r) => Process::par(simplify_nil_summands(l), simplify_nil_summands(r)),
        Process::Restr(names, b) => Process::Restr(names.clone(), Box::new(simplify_nil_summands(b))),
        Process::Relab(b, rf) => Process::relab(simplify_nil_summands(b), rf.clone()),
        Process::Rec(x, b) => Process::rec(x.clone(), simplify_nil_summands(b)),
    }
}

// ---------------------------------------------------------------------------
// Law catalog

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawFamily {
    Sum,
    Par,
    Restriction,
    Relabeling,
    Recursion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaKind {
    Process,
    Action,
    Label,
    Names,
    Relabeling,
    Identifier,
}

impl fmt::Display for MetaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetaKind::Process => "a process",
            MetaKind::Action => "an action",
            MetaKind::Label => "a label",
            MetaKind::Names => "a set of names",
            MetaKind::Relabeling => "a relabeling",
            MetaKind::Identifier => "an identifier",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LawSchema {
    pub name: &'static str,
    pub family: LawFamily,
    /// The law in concrete syntax, side condition first.
    pub statement: &'static str,
    pub metavars: &'static [(&'static str, MetaKind)],
}

use MetaKind as K;

const E1: &[(&str, MetaKind)] = &[("E", K::Process)];
const E2: &[(&str, MetaKind)] = &[("E", K::Process), ("E'", K::Process)];
const E3: &[(&str, MetaKind)] = &[("E", K::Process), ("E'", K::Process), ("E''", K::Process)];
const U_E2: &[(&str, MetaKind)] = &[("u", K::Action), ("E", K::Process), ("E'", K::Process)];
const L2_E2: &[(&str, MetaKind)] = &[("l", K::Label), ("l'", K::Label), ("E", K::Process), ("E'", K::Process)];
const RL: &[(&str, MetaKind)] = &[("L", K::Names)];
const RL_E1: &[(&str, MetaKind)] = &[("L", K::Names), ("E", K::Process)];
const RL_E2: &[(&str, MetaKind)] = &[("L", K::Names), ("E", K::Process), ("E'", K::Process)];
const RL_L_E1: &[(&str, MetaKind)] = &[("l", K::Label), ("L", K::Names), ("E", K::Process)];
const RF: &[(&str, MetaKind)] = &[("rf", K::Relabeling)];
const RF_E2: &[(&str, MetaKind)] = &[("rf", K::Relabeling), ("E", K::Process), ("E'", K::Process)];
const RF_U_E1: &[(&str, MetaKind)] = &[("rf", K::Relabeling), ("u", K::Action), ("E", K::Process)];
const X_E1: &[(&str, MetaKind)] = &[("X", K::Identifier), ("E", K::Process)];
const S_UV: &[(&str, MetaKind)] = &[("s", K::Identifier), ("u", K::Action), ("v", K::Action)];
const S_U: &[(&str, MetaKind)] = &[("s", K::Identifier), ("u", K::Action)];

const fn law(
    name: &'static str,
    family: LawFamily,
    statement: &'static str,
    metavars: &'static [(&'static str, MetaKind)],
) -> LawSchema {
    LawSchema { name, family, statement, metavars }
}

static CATALOG: [LawSchema; 28] = [
    law("STRONG_SUM_IDENT_R", LawFamily::Sum, "E + 0 ~ E", E1),
    law("STRONG_SUM_IDEMP", LawFamily::Sum, "E + E ~ E", E1),
    law("STRONG_SUM_COMM", LawFamily::Sum, "E + E' ~ E' + E", E2),
    law("STRONG_SUM_IDENT_L", LawFamily::Sum, "0 + E ~ E", E1),
    law("STRONG_SUM_ASSOC_R", LawFamily::Sum, "E + E' + E'' ~ E + (E' + E'')", E3),
    law("STRONG_SUM_ASSOC_L", LawFamily::Sum, "E + (E' + E'') ~ E + E' + E''", E3),
    law("STRONG_SUM_MID_IDEMP", LawFamily::Sum, "E + E' + E ~ E' + E", E2),
    law("STRONG_LEFT_SUM_MID_IDEMP", LawFamily::Sum, "E + E' + E'' + E' ~ E + E'' + E'", E3),
    law("STRONG_PAR_IDENT_R", LawFamily::Par, "E | 0 ~ E", E1),
    law("STRONG_PAR_COMM", LawFamily::Par, "E | E' ~ E' | E", E2),
    law("STRONG_PAR_IDENT_L", LawFamily::Par, "0 | E ~ E", E1),
    law("STRONG_PAR_ASSOC", LawFamily::Par, "E | E' | E'' ~ E | (E' | E'')", E3),
    law("STRONG_PAR_PREF_TAU", LawFamily::Par, "u.E | tau.E' ~ u.(E | tau.E') + tau.(u.E | E')", U_E2),
    law("STRONG_PAR_TAU_PREF", LawFamily::Par, "tau.E | u.E' ~ tau.(E | u.E') + u.(tau.E | E')", U_E2),
    law("STRONG_PAR_TAU_TAU", LawFamily::Par, "tau.E | tau.E' ~ tau.(E | tau.E') + tau.(tau.E | E')", E2),
    law(
        "STRONG_PAR_PREF_NO_SYNCR",
        LawFamily::Par,
        "l != compl l' => l.E | l'.E' ~ l.(E | l'.E') + l'.(l.E | E')",
        L2_E2,
    ),
    law(
        "STRONG_PAR_PREF_SYNCR",
        LawFamily::Par,
        "l = compl l' => l.E | l'.E' ~ l.(E | l'.E') + l'.(l.E | E') + tau.(E | E')",
        L2_E2,
    ),
    law("STRONG_RESTR_NIL", LawFamily::Restriction, "0 \\ L ~ 0", RL),
    law("STRONG_RESTR_SUM", LawFamily::Restriction, "(E + E') \\ L ~ E \\ L + E' \\ L", RL_E2),
    law("STRONG_RESTR_PREFIX_TAU", LawFamily::Restriction, "(tau.E) \\ L ~ tau.(E \\ L)", RL_E1),
    law("STRONG_RESTR_PR_LAB_NIL", LawFamily::Restriction, "name(l) in L => (l.E) \\ L ~ 0", RL_L_E1),
    law(
        "STRONG_RESTR_PREFIX_LABEL",
        LawFamily::Restriction,
        "name(l) not in L => (l.E) \\ L ~ l.(E \\ L)",
        RL_L_E1,
    ),
    law("STRONG_RELAB_NIL", LawFamily::Relabeling, "0[rf] ~ 0", RF),
    law("STRONG_RELAB_SUM", LawFamily::Relabeling, "(E + E')[rf] ~ E[rf] + E'[rf]", RF_E2),
    law("STRONG_RELAB_PREFIX", LawFamily::Relabeling, "(u.E)[rf] ~ rf(u).(E[rf])", RF_U_E1),
    law("STRONG_UNFOLDING", LawFamily::Recursion, "rec X. E ~ E{rec X. E / X}", X_E1),
    law("STRONG_PREF_REC_EQUIV", LawFamily::Recursion, "u.rec s. v.u.s ~ rec s. u.v.s", S_UV),
    law("STRONG_REC_ACT2", LawFamily::Recursion, "rec s. u.u.s ~ rec s. u.s", S_U),
];

pub fn law_catalog() -> &'static [LawSchema] {
    &CATALOG
}

pub fn find_law(name: &str) -> Result<&'static LawSchema, LawError> {
    CATALOG.iter().find(|l| l.name == name).ok_or_else(|| LawError::UnknownLaw(name.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Process(Process),
    Action(Action),
    Label(Label),
    Names(NameSet),
    Relabeling(Relabeling),
    Ident(Identifier),
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Process(p) => write!(f, "{p}"),
            Binding::Action(u) => write!(f, "{u}"),
            Binding::Label(l) => write!(f, "{l}"),
            Binding::Names(names) => {
                let list: Vec<&str> = names.iter().map(|n| n.as_str()).collect();
                write!(f, "{{{}}}", list.join(", "))
            }
            Binding::Relabeling(rf) => write!(f, "{rf}"),
            Binding::Ident(x) => write!(f, "{}", x.as_str()),
        }
    }
}

pub type Bindings = BTreeMap<String, Binding>;

struct Env<'a>(&'a Bindings);

impl Env<'_> {
    fn get(&self, name: &str) -> Result<&Binding, LawError> {
        self.0.get(name).ok_or_else(|| LawError::MissingBinding(name.to_string()))
    }

    fn wrong(name: &str, expected: MetaKind) -> LawError {
        LawError::BindingKind { name: name.to_string(), expected }
    }

    fn process(&self, name: &str) -> Result<Process, LawError> {
        match self.get(name)? {
            Binding::Process(p) => Ok(p.clone()),
            _ => Err(Self::wrong(name, K::Process)),
        }
    }

    /// A label is accepted where an action is expected.
    fn action(&self, name: &str) -> Result<Action, LawError> {
        match self.get(name)? {
            Binding::Action(u) => Ok(u.clone()),
            Binding::Label(l) => Ok(Action::Visible(l.clone())),
            _ => Err(Self::wrong(name, K::Action)),
        }
    }

    fn label(&self, name: &str) -> Result<Label, LawError> {
        match self.get(name)? {
            Binding::Label(l) | Binding::Action(Action::Visible(l)) => Ok(l.clone()),
            _ => Err(Self::wrong(name, K::Label)),
        }
    }

    fn names(&self, name: &str) -> Result<NameSet, LawError> {
        match self.get(name)? {
            Binding::Names(s) => Ok(s.clone()),
            _ => Err(Self::wrong(name, K::Names)),
        }
    }

    fn relabeling(&self, name: &str) -> Result<Relabeling, LawError> {
        match self.get(name)? {
            Binding::Relabeling(rf) => Ok(rf.clone()),
            _ => Err(Self::wrong(name, K::Relabeling)),
        }
    }

    fn ident(&self, name: &str) -> Result<Identifier, LawError> {
        match self.get(name)? {
            Binding::Ident(x) => Ok(x.clone()),
            _ => Err(Self::wrong(name, K::Identifier)),
        }
    }
}

/// Both sides of a law under `bindings`, and whether its side condition holds.
pub fn instantiate(name: &str, bindings: &Bindings) -> Result<(Process, Process, bool), LawError> {
    use Process as P;
    let schema = find_law(name)?;
    let b = Env(bindings);
    let sum = P::sum;
    let par = P::par;
    let pre = P::prefix;
    let tau = |p: P| P::prefix(Action::Tau, p);
    let restr = |l: &NameSet, p: P| P::Restr(l.clone(), Box::new(p));
    let relab = |p: P, rf: &Relabeling| P::relab(p, rf.clone());

    let out = match schema.name {
        "STRONG_SUM_IDENT_R" => {
            let e = b.process("E")?;
            (sum(e.clone(), P::Nil), e, true)
        }
        "STRONG_SUM_IDEMP" => {
            let e = b.process("E")?;
            (sum(e.clone(), e.clone()), e, true)
        }
        "STRONG_SUM_COMM" => {
            let (e, e1) = (b.process("E")?, b.process("E'")?);
            (sum(e.clone(), e1.clone()), sum(e1, e), true)
        }
        "STRONG_SUM_IDENT_L" => {
            let e = b.process("E")?;
            (sum(P::Nil, e.clone()), e, true)
        }
        "STRONG_SUM_ASSOC_R" => {
            let (e, e1, e2) = (b.process("E")?, b.process("E'")?, b.process("E''")?);
            (sum(sum(e.clone(), e1.clone()), e2.clone()), sum(e, sum(e1, e2)), true)
        }
        "STRONG_SUM_ASSOC_L" => {
            let (e, e1, e2) = (b.process("E")?, b.process("E'")?, b.process("E''")?);
            (sum(e.clone(), sum(e1.clone(), e2.clone())), sum(sum(e, e1), e2), true)
        }
        "STRONG_SUM_MID_IDEMP" => {
            let (e, e1) = (b.process("E")?, b.process("E'")?);
            (sum(sum(e.clone(), e1.clone()), e.clone()), sum(e1, e), true)
        }
        "STRONG_LEFT_SUM_MID_IDEMP" => {
            let (e, e1, e2) = (b.process("E")?, b.process("E'")?, b.process("E''")?);
            (sum(sum(sum(e.clone(), e1.clone()), e2.clone()), e1.clone()), sum(sum(e, e2), e1), true)
        }
        "STRONG_PAR_IDENT_R" => {
            let e = b.process("E")?;
            (par(e.clone(), P::Nil), e, true)
        }
        "STRONG_PAR_COMM" => {
            let (e, e1) = (b.process("E")?, b.process("E'")?);
            (par(e.clone(), e1.clone()), par(e1, e), true)
        }
        "STRONG_PAR_IDENT_L" => {
            let e = b.process("E")?;
            (par(P::Nil, e.clone()), e, true)
        }
        "STRONG_PAR_ASSOC" => {
            let (e, e1, e2) = (b.process("E")?, b.process("E'")?, b.process("E''")?);
            (par(par(e.clone(), e1.clone()), e2.clone()), par(e, par(e1, e2)), true)
        }
        "STRONG_PAR_PREF_TAU" => {
            let (u, e, e1) = (b.action("u")?, b.process("E")?, b.process("E'")?);
            let lhs = par(pre(u.clone(), e.clone()), tau(e1.clone()));
            let rhs = sum(pre(u.clone(), par(e.clone(), tau(e1.clone()))), tau(par(pre(u, e), e1)));
            (lhs, rhs, true)
        }
        "STRONG_PAR_TAU_PREF" => {
            let (u, e, e1) = (b.action("u")?, b.process("E")?, b.process("E'")?);
            let lhs = par(tau(e.clone()), pre(u.clone(), e1.clone()));
            let rhs = sum(tau(par(e.clone(), pre(u.clone(), e1.clone()))), pre(u, par(tau(e), e1)));
            (lhs, rhs, true)
        }
        "STRONG_PAR_TAU_TAU" => {
            let (e, e1) = (b.process("E")?, b.process("E'")?);
            let lhs = par(tau(e.clone()), tau(e1.clone()));
            let rhs = sum(tau(par(e.clone(), tau(e1.clone()))), tau(par(tau(e), e1)));
            (lhs, rhs, true)
        }
        "STRONG_PAR_PREF_NO_SYNCR" | "STRONG_PAR_PREF_SYNCR" => {
            let (l, l1) = (b.label("l")?, b.label("l'")?);
            let (e, e1) = (b.process("E")?, b.process("E'")?);
            let (ul, ul1) = (Action::Visible(l.clone()), Action::Visible(l1.clone()));
            let lhs = par(pre(ul.clone(), e.clone()), pre(ul1.clone(), e1.clone()));
            let interleave = sum(
                pre(ul.clone(), par(e.clone(), pre(ul1.clone(), e1.clone()))),
                pre(ul1, par(pre(ul, e.clone()), e1.clone())),
            );
            let complementary = l == compl_label(&l1);
            if schema.name == "STRONG_PAR_PREF_SYNCR" {
                (lhs, sum(interleave, tau(par(e, e1))), complementary)
            } else {
                (lhs, interleave, !complementary)
            }
        }
        "STRONG_RESTR_NIL" => {
            let l = b.names("L")?;
            (restr(&l, P::Nil), P::Nil, true)
        }
        "STRONG_RESTR_SUM" => {
            let (l, e, e1) = (b.names("L")?, b.process("E")?, b.process("E'")?);
            (restr(&l, sum(e.clone(), e1.clone())), sum(restr(&l, e), restr(&l, e1)), true)
        }
        "STRONG_RESTR_PREFIX_TAU" => {
            let (l, e) = (b.names("L")?, b.process("E")?);
            (restr(&l, tau(e.clone())), tau(restr(&l, e)), true)
        }
        "STRONG_RESTR_PR_LAB_NIL" => {
            let (lab, l, e) = (b.label("l")?, b.names("L")?, b.process("E")?);
            let hit = l.contains(&lab.name);
            (restr(&l, pre(Action::Visible(lab), e)), P::Nil, hit)
        }
        "STRONG_RESTR_PREFIX_LABEL" => {
            let (lab, l, e) = (b.label("l")?, b.names("L")?, b.process("E")?);
            let hit = l.contains(&lab.name);
            let u = Action::Visible(lab);
            (restr(&l, pre(u.clone(), e.clone())), pre(u, restr(&l, e)), !hit)
        }
        "STRONG_RELAB_NIL" => {
            let rf = b.relabeling("rf")?;
            (relab(P::Nil, &rf), P::Nil, true)
        }
        "STRONG_RELAB_SUM" => {
            let (rf, e, e1) = (b.relabeling("rf")?, b.process("E")?, b.process("E'")?);
            (relab(sum(e.clone(), e1.clone()), &rf), sum(relab(e, &rf), relab(e1, &rf)), true)
        }
        "STRONG_RELAB_PREFIX" => {
            let (rf, u, e) = (b.relabeling("rf")?, b.action("u")?, b.process("E")?);
            let mapped = apply_relabeling(&rf, &u);
            (relab(pre(u, e.clone()), &rf), pre(mapped, relab(e, &rf)), true)
        }
        "STRONG_UNFOLDING" => {
            let (x, e) = (b.ident("X")?, b.process("E")?);
            let lhs = P::rec(x.clone(), e.clone());
            let rhs = ccs_subst_unchecked(&e, &lhs, &x);
            (lhs, rhs, true)
        }
        "STRONG_PREF_REC_EQUIV" => {
            let (s, u, v) = (b.ident("s")?, b.action("u")?, b.action("v")?);
            let var = P::var(s.clone());
            let lhs = pre(u.clone(), P::rec(s.clone(), pre(v.clone(), pre(u.clone(), var.clone()))));
            let rhs = P::rec(s, pre(u, pre(v, var)));
            (lhs, rhs, true)
        }
        "STRONG_REC_ACT2" => {
            let (s, u) = (b.ident("s")?, b.action("u")?);
            let var = P::var(s.clone());
            let lhs = P::rec(s.clone(), pre(u.clone(), pre(u.clone(), var.clone())));
            let rhs = P::rec(s, pre(u, var));
            (lhs, rhs, true)
        }
        other => unreachable!("catalog law `{other}` has no instantiation"),
    };
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawInstance {
    pub law_name: String,
    pub lhs: Process,
    pub rhs: Process,
    pub side_conditions_met: bool,
    /// Strong bisimilarity of the two sides; `None` when the side condition
    /// fails and nothing was checked.
    pub related: Option<bool>,
}

impl LawInstance {
    /// True when the side condition holds and the sides are bisimilar.
    pub fn holds(&self) -> bool {
        self.side_conditions_met && self.related == Some(true)
    }
}

pub fn verify_law(
    name: &str,
    bindings: &Bindings,
    limits: &LtsLimits,
    cfg: &SemanticsConfig,
) -> Result<LawInstance, LawError> {
    let (lhs, rhs, side_conditions_met) = instantiate(name, bindings)?;
    let related = if side_conditions_met { Some(strong_equiv(&lhs, &rhs, limits, cfg)?.related) } else { None };
    Ok(LawInstance { law_name: name.to_string(), lhs, rhs, side_conditions_met, related })
}

/// Random bindings for a law that satisfy its side condition.
pub fn sample_bindings<R: Rng + ?Sized>(name: &str, gen: &TermGen, rng: &mut R) -> Result<Bindings, LawError> {
    let schema = find_law(name)?;
    let mut out = Bindings::new();
    for &(var, kind) in schema.metavars {
        let value = match kind {
            K::Process => Binding::Process(gen.closed(rng)),
            K::Action => Binding::Action(gen.action(rng)),
            K::Label => Binding::Label(gen.label(rng)),
            K::Names => Binding::Names(gen.name_set(rng)),
            K::Relabeling => Binding::Relabeling(gen.relabeling(rng)),
            K::Identifier => Binding::Ident(Identifier::new(var).expect("metavariable is an identifier")),
        };
        out.insert(var.to_string(), value);
    }
    match schema.name {
        "STRONG_UNFOLDING" => {
            let x = Identifier::new("X").expect("valid");
            out.insert("E".into(), Binding::Process(gen.body_over(rng, &x)));
        }
        "STRONG_PAR_PREF_SYNCR" => {
            let l = gen.label(rng);
            out.insert("l'".into(), Binding::Label(compl_label(&l)));
            out.insert("l".into(), Binding::Label(l));
        }
        "STRONG_PAR_PREF_NO_SYNCR" => {
            let l = gen.label(rng);
            let l1 = loop {
                let c = gen.label(rng);
                if l != compl_label(&c) {
                    break c;
                }
            };
            out.insert("l".into(), Binding::Label(l));
            out.insert("l'".into(), Binding::Label(l1));
        }
        "STRONG_RESTR_PR_LAB_NIL" => {
            let l = gen.label(rng);
            let mut set = gen.name_set(rng);
            set.insert(l.name.clone());
            out.insert("L".into(), Binding::Names(set));
            out.insert("l".into(), Binding::Label(l));
        }
        "STRONG_RESTR_PREFIX_LABEL" => {
            let l = gen.label(rng);
            let mut set = gen.name_set(rng);
            set.remove(&l.name);
            out.insert("L".into(), Binding::Names(set));
            out.insert("l".into(), Binding::Label(l));
        }
        _ => {}
    }
    Ok(out)
}

/// Outcome of checking one law on a batch of random instances.
#[derive(Debug, Clone)]
pub struct LawReport {
    pub name: &'static str,
    pub samples: usize,
    pub passed: usize,
    pub first_failure: Option<LawInstance>,
}

impl LawReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.samples
    }
}

/// Verifies `samples` random instances of a law. Terms have depth at most 3
/// over the alphabet `a, b, c`.
pub fn check_law<R: Rng + ?Sized>(
    name: &str,
    samples: usize,
    rng: &mut R,
    limits: &LtsLimits,
    cfg: &SemanticsConfig,
) -> Result<LawReport, LawError> {
    let schema = find_law(name)?;
    let gen = TermGen::new(3, 3);
    let mut passed = 0;
    let mut first_failure = None;
    for _ in 0..samples {
        let bindings = sample_bindings(name, &gen, rng)?;
        let inst = verify_law(name, &bindings, limits, cfg)?;
        if inst.holds() {
            passed += 1;
        } else if first_failure.is_none() {
            first_failure = Some(inst);
        }
    }
    Ok(LawReport { name: schema.name, samples, passed, first_failure })
}
