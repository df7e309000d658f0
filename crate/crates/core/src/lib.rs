//! Parsing, operational semantics, transition systems, bisimilarity and
//! algebraic laws for CCS.

pub mod equiv;
pub mod gen;
pub mod laws;
pub mod lts;
pub mod parser;
pub mod semantics;
pub mod syntax;

pub use equiv::{equiv, rooted_weak_equiv, strong_equiv, weak_equiv, EquivKind, EquivReport};
pub use lts::{build_lts, export_dot, export_json, Lts, LtsError, LtsLimits};
pub use parser::{parse, parse_program, render, ParseError};
pub use semantics::{step, transitions, SemanticsConfig, SemanticsError, Transition, TransitionSet};
pub use syntax::{Action, Identifier, Label, Name, Process, Relabeling};
