//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;

use ccs_core::lts::Lts;
use ccs_core::semantics::{transitions, SemanticsConfig};
use ccs_core::syntax::{Action, Identifier, Label, Name, Polarity, Process, Relabeling};

pub type Moves = BTreeSet<(Action, Process)>;

// ---------------------------------------------------------------------------
// Substitution and SOS, written directly from the rules.

pub fn subst(e: &Process, by: &Process, x: &Identifier) -> Process {
    match e {
        Process::Nil => Process::Nil,
        Process::Var(y) if y == x => by.clone(),
        Process::Var(y) => Process::Var(y.clone()),
        Process::Prefix(u, b) => Process::Prefix(u.clone(), Box::new(subst(b, by, x))),
        Process::Sum(l, r) => Process::Sum(Box::new(subst(l, by, x)), Box::new(subst(r, by, x))),
        Process::Par(l, r) => Process::Par(Box::new(subst(l, by, x)), Box::new(subst(r, by, x))),
        Process::Restr(ls, b) => Process::Restr(ls.clone(), Box::new(subst(b, by, x))),
        Process::Relab(b, rf) => Process::Relab(Box::new(subst(b, by, x)), rf.clone()),
        Process::Rec(y, _) if y == x => e.clone(),
        Process::Rec(y, b) => Process::Rec(y.clone(), Box::new(subst(b, by, x))),
    }
}

fn complement(l: &Label) -> Label {
    let polarity = match l.polarity {
        Polarity::Input => Polarity::Output,
        Polarity::Output => Polarity::Input,
    };
    Label { polarity, name: l.name.clone() }
}

fn relabel(rf: &Relabeling, u: &Action) -> Action {
    match u {
        Action::Tau => Action::Tau,
        Action::Visible(l) => match rf.pairs().iter().find(|(_, old)| *old == l.name) {
            Some((new, _)) => Action::Visible(Label { polarity: l.polarity, name: new.clone() }),
            None => u.clone(),
        },
    }
}

/// Forward enumeration of every derivable `(u, E')`. Recursion is unfolded
/// at most `fuel` times along any branch.
pub fn naive_moves(p: &Process, fuel: usize) -> Moves {
    let mut out = Moves::new();
    match p {
        Process::Nil | Process::Var(_) => {}
        Process::Prefix(u, b) => {
            out.insert((u.clone(), (**b).clone()));
        }
        Process::Sum(l, r) => {
            out.extend(naive_moves(l, fuel));
            out.extend(naive_moves(r, fuel));
        }
        Process::Par(l, r) => {
            let lm = naive_moves(l, fuel);
            let rm = naive_moves(r, fuel);
            for (u, t) in &lm {
                out.insert((u.clone(), Process::Par(Box::new(t.clone()), r.clone())));
            }
            for (u, t) in &rm {
                out.insert((u.clone(), Process::Par(l.clone(), Box::new(t.clone()))));
            }
            for (u, t) in &lm {
                for (v, s) in &rm {
                    if let (Action::Visible(a), Action::Visible(b)) = (u, v) {
                        if *b == complement(a) {
                            out.insert((Action::Tau, Process::Par(Box::new(t.clone()), Box::new(s.clone()))));
                        }
                    }
                }
            }
        }
        Process::Restr(names, b) => {
            for (u, t) in naive_moves(b, fuel) {
                let blocked = matches!(&u, Action::Visible(l) if names.contains(&l.name));
                if !blocked {
                    out.insert((u, Process::Restr(names.clone(), Box::new(t))));
                }
            }
        }
        Process::Relab(b, rf) => {
            for (u, t) in naive_moves(b, fuel) {
                out.insert((relabel(rf, &u), Process::Relab(Box::new(t), rf.clone())));
            }
        }
        Process::Rec(x, b) => {
            if fuel > 0 {
                out.extend(naive_moves(&subst(b, p, x), fuel - 1));
            }
        }
    }
    out
}

fn names_in(p: &Process, out: &mut BTreeSet<Name>) {
    match p {
        Process::Nil | Process::Var(_) => {}
        Process::Prefix(u, b) => {
            if let Action::Visible(l) = u {
                out.insert(l.name.clone());
            }
            names_in(b, out);
        }
        Process::Sum(l, r) | Process::Par(l, r) => {
            names_in(l, out);
            names_in(r, out);
        }
        Process::Restr(ls, b) => {
            out.extend(ls.iter().cloned());
            names_in(b, out);
        }
        Process::Relab(b, rf) => {
            for (new, old) in rf.pairs() {
                out.insert(new.clone());
                out.insert(old.clone());
            }
            names_in(b, out);
        }
        Process::Rec(_, b) => names_in(b, out),
    }
}

fn candidate_actions(p: &Process) -> Vec<Action> {
    let mut names = BTreeSet::new();
    names_in(p, &mut names);
    let mut out = vec![Action::Tau];
    for n in names {
        out.push(Action::Visible(Label { polarity: Polarity::Input, name: n.clone() }));
        out.push(Action::Visible(Label { polarity: Polarity::Output, name: n }));
    }
    out
}

/// Is `p --u-> target` derivable? Works backwards from the conclusion by
/// inverting each rule.
pub fn derivable(p: &Process, u: &Action, target: &Process, fuel: usize) -> bool {
    match p {
        Process::Nil | Process::Var(_) => false,
        Process::Prefix(v, b) => v == u && **b == *target,
        Process::Sum(l, r) => derivable(l, u, target, fuel) || derivable(r, u, target, fuel),
        Process::Par(l, r) => {
            let Process::Par(tl, tr) = target else { return false };
            if tr == r && derivable(l, u, tl, fuel) {
                return true;
            }
            if tl == l && derivable(r, u, tr, fuel) {
                return true;
            }
            if u.is_tau() {
                let actions = candidate_actions(p);
                return actions.iter().any(|m| match m {
                    Action::Visible(a) => {
                        derivable(l, m, tl, fuel) && derivable(r, &Action::Visible(complement(a)), tr, fuel)
                    }
                    Action::Tau => false,
                });
            }
            false
        }
        Process::Restr(names, b) => {
            let Process::Restr(tn, tb) = target else { return false };
            let blocked = matches!(u, Action::Visible(l) if names.contains(&l.name));
            tn == names && !blocked && derivable(b, u, tb, fuel)
        }
        Process::Relab(b, rf) => {
            let Process::Relab(tb, trf) = target else { return false };
            trf == rf && candidate_actions(p).iter().any(|v| relabel(rf, v) == *u && derivable(b, v, tb, fuel))
        }
        Process::Rec(x, b) => fuel > 0 && derivable(&subst(b, p, x), u, target, fuel - 1),
    }
}

pub fn library_moves(p: &Process) -> Moves {
    transitions(p, &SemanticsConfig::default())
        .expect("closed guarded term")
        .into_iter()
        .map(|t| (t.action, t.target))
        .collect()
}

// ---------------------------------------------------------------------------
// Greatest fixed points by deleting violating pairs.

pub type Matrix = Vec<Vec<bool>>;

/// Largest strong bisimulation: start from all pairs and delete any pair
/// where some move of one side has no matching move of the other.
pub fn naive_strong_gfp(lts: &Lts) -> Matrix {
    let n = lts.num_states();
    let mut rel = vec![vec![true; n]; n];
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in 0..n {
                if !rel[p][q] {
                    continue;
                }
                let forth = lts.outgoing(p).all(|e| lts.outgoing(q).any(|f| f.action == e.action && rel[e.to][f.to]));
                let back = lts.outgoing(q).all(|f| lts.outgoing(p).any(|e| e.action == f.action && rel[e.to][f.to]));
                if !(forth && back) {
                    rel[p][q] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

/// Reachability by zero or more taus.
pub fn tau_star(lts: &Lts) -> Matrix {
    let n = lts.num_states();
    let mut r = vec![vec![false; n]; n];
    for (s, row) in r.iter_mut().enumerate() {
        row[s] = true;
    }
    for e in lts.edges() {
        if e.action.is_tau() {
            r[e.from][e.to] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// `q ==u^=>> t`: tau* for tau, tau* u tau* otherwise.
pub fn weak_hat_targets(lts: &Lts, star: &Matrix, q: usize, u: &Action) -> Vec<usize> {
    let n = lts.num_states();
    if u.is_tau() {
        return (0..n).filter(|&t| star[q][t]).collect();
    }
    let mut out = BTreeSet::new();
    for a in (0..n).filter(|&a| star[q][a]) {
        for e in lts.outgoing(a) {
            if e.action == *u {
                out.extend((0..n).filter(|&t| star[e.to][t]));
            }
        }
    }
    out.into_iter().collect()
}

/// Largest weak bisimulation, by the same deletion scheme with weak answers.
pub fn naive_weak_gfp(lts: &Lts) -> Matrix {
    let n = lts.num_states();
    let star = tau_star(lts);
    let answers: Vec<Vec<(Action, Vec<usize>)>> = (0..n)
        .map(|q| {
            let mut acts: Vec<Action> = lts.edges().iter().map(|e| e.action.clone()).collect();
            acts.sort();
            acts.dedup();
            acts.into_iter().map(|a| {
                let t = weak_hat_targets(lts, &star, q, &a);
                (a, t)
            }).collect()
        })
        .collect();
    let hat = |q: usize, u: &Action| -> &Vec<usize> {
        &answers[q].iter().find(|(a, _)| a == u).expect("action occurs").1
    };
    let mut rel = vec![vec![true; n]; n];
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in 0..n {
                if !rel[p][q] {
                    continue;
                }
                let forth = lts.outgoing(p).all(|e| hat(q, &e.action).iter().any(|&t| rel[e.to][t]));
                let back = lts.outgoing(q).all(|f| hat(p, &f.action).iter().any(|&t| rel[t][f.to]));
                if !(forth && back) {
                    rel[p][q] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

// ---------------------------------------------------------------------------
// Prefixed sums

pub fn seven_actions() -> Vec<Action> {
    let n = |s: &str| Name::new(s).unwrap();
    vec![
        Action::input(n("a")),
        Action::input(n("b")),
        Action::input(n("c")),
        Action::output(n("a")),
        Action::output(n("b")),
        Action::output(n("c")),
        Action::Tau,
    ]
}

/// `u_0.b_0 + u_1.b_1 + ...`, left-nested.
pub fn prefixed_sum(parts: &[(Action, Process)]) -> Process {
    let mut it = parts.iter().map(|(u, b)| Process::prefix(u.clone(), b.clone()));
    let first = it.next().expect("at least one summand");
    it.fold(first, Process::sum)
}

pub fn complementary(u: &Action, v: &Action) -> bool {
    matches!((u, v), (Action::Visible(a), Action::Visible(b)) if *b == complement(a))
}
