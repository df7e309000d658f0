//! One-step transitions of a CCS process under the SOS rules
//! PREFIX, SUM1/2, PAR1/2/3, RESTR, RELAB and REC.
//!
//! [`transitions`] is exhaustive: it returns every `(u, E')` with
//! `P --u-> E'` derivable, and nothing else.

use thiserror::Error;

use crate::parser::render;
use crate::syntax::{
    apply_relabeling, ccs_subst_unchecked, compl_label, first_unguarded_binder, free_vars, Action, Identifier,
    Process,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("process has free variable `{0}`")]
    FreeVariable(Identifier),
    #[error("recursion on `{0}` is not guarded by a prefix")]
    UnguardedRecursion(Identifier),
    #[error("recursion unfolding exceeded depth {0}")]
    DepthExceeded(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemanticsConfig {
    pub max_unfold_depth: usize,
}

impl SemanticsConfig {
    pub fn new(max_unfold_depth: usize) -> Self {
        SemanticsConfig { max_unfold_depth: max_unfold_depth.max(1) }
    }
}

impl Default for SemanticsConfig {
    fn default() -> Self {
        SemanticsConfig { max_unfold_depth: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub action: Action,
    pub target: Process,
}

/// Deduplicated transitions, ordered by action (inputs, outputs, tau) and
/// then by the rendered target.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransitionSet {
    items: Vec<Transition>,
}

impl TransitionSet {
    fn from_unsorted(raw: Vec<Transition>) -> Self {
        let mut keyed: Vec<(String, Transition)> = raw.into_iter().map(|t| (render(&t.target), t)).collect();
        keyed.sort_by(|(ra, a), (rb, b)| a.action.cmp(&b.action).then_with(|| ra.cmp(rb)));
        keyed.dedup_by(|(_, a), (_, b)| a == b);
        TransitionSet { items: keyed.into_iter().map(|(_, t)| t).collect() }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Transition> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Transition] {
        &self.items
    }

    pub fn contains(&self, action: &Action, target: &Process) -> bool {
        self.items.iter().any(|t| t.action == *action && t.target == *target)
    }
}

impl IntoIterator for TransitionSet {
    type Item = Transition;
    type IntoIter = std::vec::IntoIter<Transition>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.into_iter()
    }
}

impl<'a> IntoIterator for &'a TransitionSet {
    type Item = &'a Transition;
    type IntoIter = std::slice::Iter<'a, Transition>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Checks the preconditions shared by every transition query.
pub fn check_process(p: &Process) -> Result<(), SemanticsError> {
    if let Some(x) = free_vars(p).into_iter().next() {
        return Err(SemanticsError::FreeVariable(x));
    }
    if let Some(x) = first_unguarded_binder(p) {
        return Err(SemanticsError::UnguardedRecursion(x.clone()));
    }
    Ok(())
}

pub fn transitions(p: &Process, cfg: &SemanticsConfig) -> Result<TransitionSet, SemanticsError> {
    check_process(p)?;
    let mut raw = Vec::new();
    derive(p, cfg, 0, &mut raw)?;
    Ok(TransitionSet::from_unsorted(raw))
}

/// Targets reachable from `p` by exactly one `u` step.
pub fn step(p: &Process, u: &Action, cfg: &SemanticsConfig) -> Result<Vec<Process>, SemanticsError> {
    Ok(transitions(p, cfg)?
        .into_iter()
        .filter(|t| t.action == *u)
        .map(|t| t.target)
        .collect())
}

fn derive(p: &Process, cfg: &SemanticsConfig, depth: usize, out: &mut Vec<Transition>) -> Result<(), SemanticsError> {
    match p {
        Process::Nil => {}
        // Closedness is checked up front; a bare variable has no moves.
        Process::Var(_) => {}
        Process::Prefix(u, body) => out.push(Transition { action: u.clone(), target: (**body).clone() }),
        Process::Sum(l, r) => {
            derive(l, cfg, depth, out)?;
            derive(r, cfg, depth, out)?;
        }
        Process::Par(l, r) => {
            let mut left = Vec::new();
            let mut right = Vec::new();
            derive(l, cfg, depth, &mut left)?;
            derive(r, cfg, depth, &mut right)?;
            let mut sync = Vec::new();
            for lt in &left {
                let Action::Visible(ll) = &lt.action else { continue };
                let want = compl_label(ll);
                for rt in &right {
                    if matches!(&rt.action, Action::Visible(rl) if *rl == want) {
                        sync.push(Transition {
                            action: Action::Tau,
                            target: Process::par(lt.target.clone(), rt.target.clone()),
                        });
                    }
                }
            }
            for t in left {
                out.push(Transition { action: t.action, target: Process::par(t.target, (**r).clone()) });
            }
            for t in right {
                out.push(Transition { action: t.action, target: Process::par((**l).clone(), t.target) });
            }
            out.extend(sync);
        }
        Process::Restr(names, body) => {
            let mut inner = Vec::new();
            derive(body, cfg, depth, &mut inner)?;
            for t in inner {
                let allowed = match &t.action {
                    Action::Tau => true,
                    Action::Visible(l) => !names.contains(&l.name),
                };
                if allowed {
                    out.push(Transition { action: t.action, target: Process::Restr(names.clone(), Box::new(t.target)) });
                }
            }
        }
        Process::Relab(body, rf) => {
            let mut inner = Vec::new();
            derive(body, cfg, depth, &mut inner)?;
            for t in inner {
                out.push(Transition {
                    action: apply_relabeling(rf, &t.action),
                    target: Process::relab(t.target, rf.clone()),
                });
            }
        }
        Process::Rec(x, body) => {
            if depth >= cfg.max_unfold_depth {
                return Err(SemanticsError::DepthExceeded(cfg.max_unfold_depth));
            }
            let unfolded = ccs_subst_unchecked(body, p, x);
            derive(&unfolded, cfg, depth + 1, out)?;
        }
    }
    Ok(())
}
