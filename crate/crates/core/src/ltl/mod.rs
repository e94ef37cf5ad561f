//! LTL formulas: syntax tree, text syntax, size/depth metrics and the
//! built-in benchmark corpus.

mod corpus;
mod parser;
pub mod random;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use corpus::{corpus, Corpus, CorpusEntry};
pub use parser::{parse, ParseError};

/// An LTL formula. Subtrees are reference counted, so cloning is cheap and
/// formulas can be shared across threads.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Arc<str>),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Next(Arc<Formula>),
    Globally(Arc<Formula>),
    Finally(Arc<Formula>),
    Until(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Arc::new(l), Arc::new(r))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Arc::new(f))
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::Globally(Arc::new(f))
    }

    pub fn finally(f: Formula) -> Formula {
        Formula::Finally(Arc::new(f))
    }

    pub fn until(l: Formula, r: Formula) -> Formula {
        Formula::Until(Arc::new(l), Arc::new(r))
    }

    /// Direct subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) => vec![],
            Formula::Not(f) | Formula::Next(f) | Formula::Globally(f) | Formula::Finally(f) => {
                vec![f]
            }
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Until(l, r) => {
                vec![l, r]
            }
        }
    }

    fn operator_count(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            _ => {
                1 + self
                    .children()
                    .into_iter()
                    .map(Formula::operator_count)
                    .sum::<usize>()
            }
        }
    }

    /// Number of operators and connectives. A bare atom counts as 1, which
    /// is the convention the reference corpus metrics follow.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            f => f.operator_count(),
        }
    }

    /// Maximum operator nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            f => {
                1 + f
                    .children()
                    .into_iter()
                    .map(Formula::depth)
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    /// Distinct atom names, sorted.
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::Atom(name) => {
                    out.insert(&**name);
                }
                f => stack.extend(f.children()),
            }
        }
        out
    }
}

/// Canonical rendering: every binary subformula is parenthesized and unary
/// operators are followed by a space (`!` excepted), so the output parses
/// back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(name) => f.write_str(name),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::Next(g) => write!(f, "X {g}"),
            Formula::Globally(g) => write!(f, "G {g}"),
            Formula::Finally(g) => write!(f, "F {g}"),
            Formula::And(l, r) => write!(f, "({l} & {r})"),
            Formula::Or(l, r) => write!(f, "({l} | {r})"),
            Formula::Implies(l, r) => write!(f, "({l} -> {r})"),
            Formula::Until(l, r) => write!(f, "({l} U {r})"),
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
