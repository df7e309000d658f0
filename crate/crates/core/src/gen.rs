//! Seeded random generation of actions, processes and small LTSs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lts::Lts;
use crate::syntax::{free_vars, Action, Identifier, Label, Name, NameSet, Polarity, Process, Relabeling};

const BINDERS: [&str; 2] = ["X", "Y"];

#[derive(Clone)]
struct Slot {
    var: Identifier,
    guarded: bool,
    usable: bool,
}

/// Generator for random terms over a fixed alphabet of channel names.
#[derive(Debug, Clone)]
pub struct TermGen {
    pub alphabet: Vec<Name>,
    pub max_depth: usize,
    pub allow_rec: bool,
}

impl TermGen {
    /// Alphabet `a, b, c, ...` of the given size.
    pub fn new(alphabet_size: usize, max_depth: usize) -> Self {
        assert!((1..=26).contains(&alphabet_size));
        let alphabet = (0..alphabet_size)
            .map(|i| Name::new(((b'a' + i as u8) as char).to_string()).expect("single letter"))
            .collect();
        TermGen { alphabet, max_depth, allow_rec: true }
    }

    pub fn name<R: Rng + ?Sized>(&self, rng: &mut R) -> Name {
        self.alphabet.choose(rng).expect("nonempty alphabet").clone()
    }

    pub fn label<R: Rng + ?Sized>(&self, rng: &mut R) -> Label {
        let polarity = if rng.gen_bool(0.5) { Polarity::Input } else { Polarity::Output };
        Label { polarity, name: self.name(rng) }
    }

    /// Tau with probability `1 / (2 |alphabet| + 1)`, otherwise a label.
    pub fn action<R: Rng + ?Sized>(&self, rng: &mut R) -> Action {
        if rng.gen_range(0..=2 * self.alphabet.len()) == 0 {
            Action::Tau
        } else {
            Action::Visible(self.label(rng))
        }
    }

    /// Every action over the alphabet: inputs, outputs, then tau.
    pub fn all_actions(&self) -> Vec<Action> {
        let mut out: Vec<Action> = self.alphabet.iter().map(|n| Action::input(n.clone())).collect();
        out.extend(self.alphabet.iter().map(|n| Action::output(n.clone())));
        out.push(Action::Tau);
        out
    }

    /// A nonempty subset of the alphabet.
    pub fn name_set<R: Rng + ?Sized>(&self, rng: &mut R) -> NameSet {
        let mut set: NameSet = self.alphabet.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
        if set.is_empty() {
            set.insert(self.name(rng));
        }
        set
    }

    /// One or two pairs with distinct `old` names.
    pub fn relabeling<R: Rng + ?Sized>(&self, rng: &mut R) -> Relabeling {
        let count = rng.gen_range(1..=2.min(self.alphabet.len()));
        let olds: Vec<Name> = self.alphabet.choose_multiple(rng, count).cloned().collect();
        Relabeling::from_names(olds.into_iter().map(|old| (self.name(rng), old))).expect("distinct old names")
    }

    /// A closed, weakly guarded term with a finite reachable state space.
    pub fn closed<R: Rng + ?Sized>(&self, rng: &mut R) -> Process {
        self.term(rng, self.max_depth, &mut Vec::new())
    }

    /// A body for `rec x. _`: `x` may occur free, but only under a prefix and
    /// never beneath a parallel, restriction or relabeling operator.
    pub fn body_over<R: Rng + ?Sized>(&self, rng: &mut R, x: &Identifier) -> Process {
        let mut ctx = vec![Slot { var: x.clone(), guarded: false, usable: true }];
        let mut body = self.term(rng, self.max_depth, &mut ctx);
        // Prefer bodies that actually recurse.
        for _ in 0..8 {
            if free_vars(&body).contains(x) {
                break;
            }
            body = self.term(rng, self.max_depth, &mut ctx);
        }
        body
    }

    fn usable_vars(ctx: &[Slot]) -> Vec<Identifier> {
        let mut out: Vec<Identifier> = Vec::new();
        let mut seen: Vec<&Identifier> = Vec::new();
        for slot in ctx.iter().rev() {
            if seen.contains(&&slot.var) {
                continue;
            }
            seen.push(&slot.var);
            if slot.guarded && slot.usable {
                out.push(slot.var.clone());
            }
        }
        out
    }

    fn term<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize, ctx: &mut Vec<Slot>) -> Process {
        let vars = Self::usable_vars(ctx);
        if depth == 0 {
            if !vars.is_empty() && rng.gen_bool(0.7) {
                return Process::Var(vars.choose(rng).expect("nonempty").clone());
            }
            return Process::Nil;
        }
        let rec_weight = if self.allow_rec { 1 } else { 0 };
        let var_weight = if vars.is_empty() { 0 } else { 3 };
        // nil, prefix, sum, par, restr, relab, rec, var
        let weights = [1, 6, 3, 2, 1, 1, rec_weight, var_weight];
        let total: u32 = weights.iter().sum();
        let mut pick = rng.gen_range(0..total);
        let mut choice = 0;
        for (i, w) in weights.iter().enumerate() {
            if pick < *w {
                choice = i;
                break;
            }
            pick -= w;
        }
        match choice {
            0 => Process::Nil,
            1 => {
                let u = self.action(rng);
                let mut inner: Vec<Slot> = ctx.iter().map(|s| Slot { guarded: true, ..s.clone() }).collect();
                Process::prefix(u, self.term(rng, depth - 1, &mut inner))
            }
            2 => {
                let l = self.term(rng, depth - 1, ctx);
                Process::sum(l, self.term(rng, depth - 1, ctx))
            }
            3..=5 => {
                let mut inner: Vec<Slot> = ctx.iter().map(|s| Slot { usable: false, ..s.clone() }).collect();
                match choice {
                    3 => {
                        let l = self.term(rng, depth - 1, &mut inner);
                        Process::par(l, self.term(rng, depth - 1, &mut inner))
                    }
                    4 => {
                        let names = self.name_set(rng);
                        Process::Restr(names, Box::new(self.term(rng, depth - 1, &mut inner)))
                    }
                    _ => {
                        let rf = self.relabeling(rng);
                        Process::relab(self.term(rng, depth - 1, &mut inner), rf)
                    }
                }
            }
            6 => {
                let x = Identifier::new(*BINDERS.choose(rng).expect("nonempty")).expect("valid binder");
                ctx.push(Slot { var: x.clone(), guarded: false, usable: true });
                let body = self.term(rng, depth - 1, ctx);
                ctx.pop();
                Process::rec(x, body)
            }
            _ => Process::Var(vars.choose(rng).expect("nonempty").clone()),
        }
    }
}

/// Arbitrary syntax trees of height at most `depth`, including open and
/// unguarded terms. Used to exercise the parser and printer.
pub fn any_term<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> Process {
    const NAMES: [&str; 5] = ["a", "b", "c", "ask-esp", "x_1"];
    const IDENTS: [&str; 4] = ["X", "Y", "VM", "P-2"];
    let name = |rng: &mut R| Name::new(*NAMES.choose(rng).expect("nonempty")).expect("valid");
    let ident = |rng: &mut R| Identifier::new(*IDENTS.choose(rng).expect("nonempty")).expect("valid");
    if depth == 0 {
        return if rng.gen_bool(0.5) { Process::Nil } else { Process::Var(ident(rng)) };
    }
    match rng.gen_range(0..8) {
        0 => Process::Nil,
        1 => Process::Var(ident(rng)),
        2 => {
            let u = match rng.gen_range(0..3) {
                0 => Action::Tau,
                1 => Action::input(name(rng)),
                _ => Action::output(name(rng)),
            };
            Process::prefix(u, any_term(rng, depth - 1))
        }
        3 => {
            let l = any_term(rng, depth - 1);
            Process::sum(l, any_term(rng, depth - 1))
        }
        4 => {
            let l = any_term(rng, depth - 1);
            Process::par(l, any_term(rng, depth - 1))
        }
        5 => {
            let count = rng.gen_range(1..=3);
            let names: NameSet = (0..count).map(|_| name(rng)).collect();
            Process::Restr(names, Box::new(any_term(rng, depth - 1)))
        }
        6 => {
            let count = rng.gen_range(1..=3);
            let olds: Vec<&str> = NAMES.choose_multiple(rng, count).copied().collect();
            let rf = Relabeling::from_names(olds.into_iter().map(|o| (name(rng), Name::new(o).expect("valid"))))
                .expect("distinct old names");
            Process::relab(any_term(rng, depth - 1), rf)
        }
        _ => {
            let x = ident(rng);
            Process::rec(x, any_term(rng, depth - 1))
        }
    }
}

/// A random LTS with `1..=max_states` states and `0..=max_edges` edges
/// labeled from `actions`. State 0 is the root.
pub fn random_lts<R: Rng + ?Sized>(rng: &mut R, max_states: usize, max_edges: usize, actions: &[Action]) -> Lts {
    let n = rng.gen_range(1..=max_states);
    let m = rng.gen_range(0..=max_edges);
    let edges: Vec<(usize, Action, usize)> = (0..m)
        .map(|_| {
            let a = actions.choose(rng).expect("nonempty actions").clone();
            (rng.gen_range(0..n), a, rng.gen_range(0..n))
        })
        .collect();
    Lts::from_edges(n, 0, edges)
}
