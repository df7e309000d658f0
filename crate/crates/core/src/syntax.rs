//! Labels, actions, relabelings and CCS process terms, together with the
//! purely syntactic operations the transition rules are built on.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("invalid name `{0}`: expected [A-Za-z][A-Za-z0-9_-]* and not a keyword")]
    InvalidName(String),
    #[error("tau has no label")]
    TauHasNoLabel,
    #[error("relabeling maps `{0}` more than once")]
    DuplicateRelabel(String),
    #[error("relabeling pair {new}/{old} mixes input and output polarity")]
    MixedPolarity { new: String, old: String },
    #[error("substituting for `{var}` would capture free identifier `{captured}`")]
    CaptureRisk { var: String, captured: String },
}

const KEYWORDS: [&str; 2] = ["tau", "rec"];

fn is_valid_lexeme(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') && !KEYWORDS.contains(&s)
}

/// A channel name. Shared lexical class with [`Identifier`], but a distinct type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(String);

impl Name {
    pub fn new(s: impl Into<String>) -> Result<Self, SyntaxError> {
        let s = s.into();
        if is_valid_lexeme(&s) {
            Ok(Name(s))
        } else {
            Err(SyntaxError::InvalidName(s))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Name of a recursion binder (`rec X. ...`) or a process variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Identifier(String);

impl Identifier {
    pub fn new(s: impl Into<String>) -> Result<Self, SyntaxError> {
        let s = s.into();
        if is_valid_lexeme(&s) {
            Ok(Identifier(s))
        } else {
            Err(SyntaxError::InvalidName(s))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Input,
    Output,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Input => Polarity::Output,
            Polarity::Output => Polarity::Input,
        }
    }
}

/// A visible action: `a` (input) or `'a` (output). Tau is not a label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub polarity: Polarity,
    pub name: Name,
}

impl Label {
    pub fn input(name: Name) -> Self {
        Label { polarity: Polarity::Input, name }
    }

    pub fn output(name: Name) -> Self {
        Label { polarity: Polarity::Output, name }
    }

    pub fn is_input(&self) -> bool {
        self.polarity == Polarity::Input
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Input => write!(f, "{}", self.name),
            Polarity::Output => write!(f, "'{}", self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    Tau,
    Visible(Label),
}

impl Action {
    pub fn input(name: Name) -> Self {
        Action::Visible(Label::input(name))
    }

    pub fn output(name: Name) -> Self {
        Action::Visible(Label::output(name))
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }

    /// Sort key used for deterministic transition order: inputs by name,
    /// then outputs by name, then tau.
    pub fn order_key(&self) -> (u8, &str) {
        match self {
            Action::Visible(l) if l.is_input() => (0, l.name.as_str()),
            Action::Visible(l) => (1, l.name.as_str()),
            Action::Tau => (2, ""),
        }
    }
}

impl Ord for Action {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for Action {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Tau => f.write_str("tau"),
            Action::Visible(l) => write!(f, "{l}"),
        }
    }
}

impl From<Label> for Action {
    fn from(l: Label) -> Self {
        Action::Visible(l)
    }
}

pub fn compl_label(l: &Label) -> Label {
    Label { polarity: l.polarity.flip(), name: l.name.clone() }
}

pub fn compl_action(u: &Action) -> Action {
    match u {
        Action::Tau => Action::Tau,
        Action::Visible(l) => Action::Visible(compl_label(l)),
    }
}

pub fn label_of(u: &Action) -> Result<&Label, SyntaxError> {
    match u {
        Action::Tau => Err(SyntaxError::TauHasNoLabel),
        Action::Visible(l) => Ok(l),
    }
}

/// A finite relabeling `[new/old, ...]`, extended to a total function on
/// labels that is the identity outside the listed names and commutes with
/// complement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Relabeling {
    pairs: Vec<(Name, Name)>,
}

impl Relabeling {
    /// Builds a relabeling from `(new, old)` label pairs. Pairs written on
    /// output labels are normalized to their input form; a pair mixing
    /// polarities is rejected, as is any `old` name listed twice.
    pub fn new(pairs: impl IntoIterator<Item = (Label, Label)>) -> Result<Self, SyntaxError> {
        let mut out: Vec<(Name, Name)> = Vec::new();
        for (new, old) in pairs {
            if new.polarity != old.polarity {
                return Err(SyntaxError::MixedPolarity {
                    new: new.to_string(),
                    old: old.to_string(),
                });
            }
            if out.iter().any(|(_, o)| *o == old.name) {
                return Err(SyntaxError::DuplicateRelabel(old.name.to_string()));
            }
            out.push((new.name, old.name));
        }
        Ok(Relabeling { pairs: out })
    }

    pub fn from_names(pairs: impl IntoIterator<Item = (Name, Name)>) -> Result<Self, SyntaxError> {
        Self::new(pairs.into_iter().map(|(n, o)| (Label::input(n), Label::input(o))))
    }

    /// `(new, old)` pairs, input polarity.
    pub fn pairs(&self) -> &[(Name, Name)] {
        &self.pairs
    }

    pub fn apply_label(&self, l: &Label) -> Label {
        match self.pairs.iter().find(|(_, old)| *old == l.name) {
            Some((new, _)) => Label { polarity: l.polarity, name: new.clone() },
            None => l.clone(),
        }
    }
}

impl fmt::Display for Relabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (new, old)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{new}/{old}")?;
        }
        f.write_str("]")
    }
}

pub fn apply_relabeling(rf: &Relabeling, u: &Action) -> Action {
    match u {
        Action::Tau => Action::Tau,
        Action::Visible(l) => Action::Visible(rf.apply_label(l)),
    }
}

/// Restriction sets hold bare names; restricting `a` blocks both `a` and `'a`.
pub type NameSet = BTreeSet<Name>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    Nil,
    Prefix(Action, Box<Process>),
    Sum(Box<Process>, Box<Process>),
    Par(Box<Process>, Box<Process>),
    Restr(NameSet, Box<Process>),
    Relab(Box<Process>, Relabeling),
    Rec(Identifier, Box<Process>),
    Var(Identifier),
}

impl Process {
    pub fn prefix(u: Action, body: Process) -> Self {
        Process::Prefix(u, Box::new(body))
    }

    pub fn sum(l: Process, r: Process) -> Self {
        Process::Sum(Box::new(l), Box::new(r))
    }

    pub fn par(l: Process, r: Process) -> Self {
        Process::Par(Box::new(l), Box::new(r))
    }

    pub fn restr(names: impl IntoIterator<Item = Name>, body: Process) -> Self {
        Process::Restr(names.into_iter().collect(), Box::new(body))
    }

    pub fn relab(body: Process, rf: Relabeling) -> Self {
        Process::Relab(Box::new(body), rf)
    }

    pub fn rec(x: Identifier, body: Process) -> Self {
        Process::Rec(x, Box::new(body))
    }

    pub fn var(x: Identifier) -> Self {
        Process::Var(x)
    }

    pub fn is_closed(&self) -> bool {
        free_vars(self).is_empty()
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Process::Nil | Process::Var(_) => 1,
            Process::Prefix(_, b) | Process::Restr(_, b) | Process::Relab(b, _) | Process::Rec(_, b) => {
                1 + b.size()
            }
            Process::Sum(l, r) | Process::Par(l, r) => 1 + l.size() + r.size(),
        }
    }
}

/// Capture-naive substitution of `ep` for the free occurrences of `x` in `e`.
///
/// Callers must make sure `ep` has no free identifier bound by a `rec` of `e`
/// that encloses an occurrence of `x`; [`ccs_subst`] checks this.
pub fn ccs_subst_unchecked(e: &Process, ep: &Process, x: &Identifier) -> Process {
    match e {
        Process::Nil => Process::Nil,
        Process::Prefix(u, b) => Process::prefix(u.clone(), ccs_subst_unchecked(b, ep, x)),
        Process::Sum(l, r) => Process::sum(ccs_subst_unchecked(l, ep, x), ccs_subst_unchecked(r, ep, x)),
        Process::Par(l, r) => Process::par(ccs_subst_unchecked(l, ep, x), ccs_subst_unchecked(r, ep, x)),
        Process::Restr(names, b) => Process::Restr(names.clone(), Box::new(ccs_subst_unchecked(b, ep, x))),
        Process::Relab(b, rf) => Process::relab(ccs_subst_unchecked(b, ep, x), rf.clone()),
        Process::Var(y) => {
            if y == x {
                ep.clone()
            } else {
                Process::Var(y.clone())
            }
        }
        Process::Rec(y, b) => {
            if y == x {
                e.clone()
            } else {
                Process::rec(y.clone(), ccs_subst_unchecked(b, ep, x))
            }
        }
    }
}

/// Substitution that refuses inputs on which the capture-naive definition
/// would bind a free identifier of `ep`.
pub fn ccs_subst(e: &Process, ep: &Process, x: &Identifier) -> Result<Process, SyntaxError> {
    let fv = free_vars(ep);
    if !fv.is_empty() {
        let mut binders = Vec::new();
        if let Some(captured) = find_capture(e, x, &fv, &mut binders) {
            return Err(SyntaxError::CaptureRisk {
                var: x.to_string(),
                captured: captured.to_string(),
            });
        }
    }
    Ok(ccs_subst_unchecked(e, ep, x))
}

fn find_capture<'a>(
    e: &'a Process,
    x: &Identifier,
    fv: &BTreeSet<Identifier>,
    binders: &mut Vec<&'a Identifier>,
) -> Option<Identifier> {
    match e {
        Process::Nil => None,
        Process::Var(y) => {
            if y == x {
                binders.iter().find(|b| fv.contains(**b)).map(|b| (*b).clone())
            } else {
                None
            }
        }
        Process::Prefix(_, b) | Process::Restr(_, b) | Process::Relab(b, _) => find_capture(b, x, fv, binders),
        Process::Sum(l, r) | Process::Par(l, r) => {
            find_capture(l, x, fv, binders).or_else(|| find_capture(r, x, fv, binders))
        }
        Process::Rec(y, b) => {
            if y == x {
                return None;
            }
            binders.push(y);
            let found = find_capture(b, x, fv, binders);
            binders.pop();
            found
        }
    }
}

pub fn free_vars(p: &Process) -> BTreeSet<Identifier> {
    fn go(p: &Process, bound: &mut Vec<Identifier>, out: &mut BTreeSet<Identifier>) {
        match p {
            Process::Nil => {}
            Process::Var(y) => {
                if !bound.contains(y) {
                    out.insert(y.clone());
                }
            }
            Process::Prefix(_, b) | Process::Restr(_, b) | Process::Relab(b, _) => go(b, bound, out),
            Process::Sum(l, r) | Process::Par(l, r) => {
                go(l, bound, out);
                go(r, bound, out);
            }
            Process::Rec(y, b) => {
                bound.push(y.clone());
                go(b, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(p, &mut Vec::new(), &mut out);
    out
}

/// True iff `x` occurs free in `p` somewhere not underneath a prefix.
fn occurs_unguarded(p: &Process, x: &Identifier) -> bool {
    match p {
        Process::Nil | Process::Prefix(..) => false,
        Process::Var(y) => y == x,
        Process::Sum(l, r) | Process::Par(l, r) => occurs_unguarded(l, x) || occurs_unguarded(r, x),
        Process::Restr(_, b) | Process::Relab(b, _) => occurs_unguarded(b, x),
        Process::Rec(y, b) => y != x && occurs_unguarded(b, x),
    }
}

/// The first `rec` binder (in pre-order) whose variable occurs unguarded in
/// its own body.
pub fn first_unguarded_binder(p: &Process) -> Option<&Identifier> {
    match p {
        Process::Nil | Process::Var(_) => None,
        Process::Prefix(_, b) | Process::Restr(_, b) | Process::Relab(b, _) => first_unguarded_binder(b),
        Process::Sum(l, r) | Process::Par(l, r) => first_unguarded_binder(l).or_else(|| first_unguarded_binder(r)),
        Process::Rec(x, b) => {
            if occurs_unguarded(b, x) {
                Some(x)
            } else {
                first_unguarded_binder(b)
            }
        }
    }
}

pub fn is_weakly_guarded(p: &Process) -> bool {
    first_unguarded_binder(p).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s).unwrap()
    }

    fn id(s: &str) -> Identifier {
        Identifier::new(s).unwrap()
    }

    #[test]
    fn complement_flips_polarity() {
        assert_eq!(compl_label(&Label::input(n("a"))), Label::output(n("a")));
        assert_eq!(compl_label(&Label::output(n("a"))), Label::input(n("a")));
        let l = Label::output(n("x"));
        assert_eq!(compl_label(&compl_label(&l)), l);
    }

    #[test]
    fn complement_of_actions() {
        assert_eq!(compl_action(&Action::Tau), Action::Tau);
        assert_eq!(compl_action(&Action::input(n("a"))), Action::output(n("a")));
        let u = Action::output(n("b"));
        assert_eq!(compl_action(&compl_action(&u)), u);
    }

    #[test]
    fn label_projection() {
        assert_eq!(label_of(&Action::input(n("a"))).unwrap(), &Label::input(n("a")));
        assert_eq!(label_of(&Action::output(n("x"))).unwrap(), &Label::output(n("x")));
        assert_eq!(label_of(&Action::Tau), Err(SyntaxError::TauHasNoLabel));
    }

    #[test]
    fn relabeling_application() {
        let rf = Relabeling::from_names([(n("b"), n("a"))]).unwrap();
        assert_eq!(apply_relabeling(&rf, &Action::input(n("a"))), Action::input(n("b")));
        assert_eq!(apply_relabeling(&rf, &Action::output(n("a"))), Action::output(n("b")));
        assert_eq!(apply_relabeling(&rf, &Action::input(n("c"))), Action::input(n("c")));
        assert_eq!(apply_relabeling(&rf, &Action::Tau), Action::Tau);
    }

    #[test]
    fn relabeling_normalizes_output_pairs() {
        let rf = Relabeling::new([(Label::output(n("b")), Label::output(n("a")))]).unwrap();
        assert_eq!(rf, Relabeling::from_names([(n("b"), n("a"))]).unwrap());
    }

    #[test]
    fn relabeling_rejects_duplicates_and_mixed_pairs() {
        assert_eq!(
            Relabeling::from_names([(n("b"), n("a")), (n("c"), n("a"))]),
            Err(SyntaxError::DuplicateRelabel("a".into()))
        );
        assert!(matches!(
            Relabeling::new([(Label::input(n("b")), Label::output(n("a")))]),
            Err(SyntaxError::MixedPolarity { .. })
        ));
    }

    #[test]
    fn names_are_validated() {
        assert!(Name::new("ask-esp").is_ok());
        assert!(Name::new("a_1").is_ok());
        assert!(Name::new("").is_err());
        assert!(Name::new("1a").is_err());
        assert!(Name::new("a b").is_err());
        assert!(Name::new("tau").is_err());
        assert!(Identifier::new("rec").is_err());
    }

    #[test]
    fn substitution_clauses() {
        let x = id("X");
        let p = Process::prefix(Action::input(n("a")), Process::Nil);
        assert_eq!(ccs_subst(&Process::var(x.clone()), &p, &x).unwrap(), p);
        assert_eq!(ccs_subst(&Process::Nil, &p, &x).unwrap(), Process::Nil);
        let shadow = Process::rec(x.clone(), Process::prefix(Action::Tau, Process::var(x.clone())));
        assert_eq!(ccs_subst(&shadow, &p, &x).unwrap(), shadow);
        let other = Process::var(id("Y"));
        assert_eq!(ccs_subst(&other, &p, &x).unwrap(), other);
    }

    #[test]
    fn substitution_capture_is_rejected() {
        // rec Y. a.X  with X := Y would bind the substituted Y.
        let e = Process::rec(id("Y"), Process::prefix(Action::input(n("a")), Process::var(id("X"))));
        let err = ccs_subst(&e, &Process::var(id("Y")), &id("X")).unwrap_err();
        assert_eq!(err, SyntaxError::CaptureRisk { var: "X".into(), captured: "Y".into() });
        // No occurrence of X under the binder: nothing to capture.
        let e2 = Process::sum(Process::rec(id("Y"), Process::var(id("Y"))), Process::var(id("X")));
        assert!(ccs_subst(&e2, &Process::var(id("Y")), &id("X")).is_ok());
    }

    #[test]
    fn free_variables() {
        let x = id("X");
        assert!(free_vars(&Process::Nil).is_empty());
        let body = Process::prefix(Action::input(n("a")), Process::var(x.clone()));
        assert!(free_vars(&Process::rec(x.clone(), body.clone())).is_empty());
        assert_eq!(free_vars(&body), BTreeSet::from([x]));
    }

    #[test]
    fn guardedness() {
        let x = id("X");
        let a0 = Process::prefix(Action::input(n("a")), Process::Nil);
        assert!(is_weakly_guarded(&Process::rec(
            x.clone(),
            Process::prefix(Action::input(n("a")), Process::var(x.clone()))
        )));
        assert!(!is_weakly_guarded(&Process::rec(x.clone(), Process::sum(Process::var(x.clone()), a0))));
        assert!(is_weakly_guarded(&Process::Nil));
        // An inner rec rebinding X hides the outer variable.
        let inner = Process::rec(x.clone(), Process::prefix(Action::Tau, Process::var(x.clone())));
        assert!(is_weakly_guarded(&Process::rec(x.clone(), inner)));
        // Unguarded occurrence of the outer variable inside an inner rec.
        let y = id("Y");
        let nested = Process::rec(x.clone(), Process::rec(y, Process::var(x.clone())));
        assert!(!is_weakly_guarded(&nested));
    }
}
