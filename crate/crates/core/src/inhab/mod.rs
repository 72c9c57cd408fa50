//! Inhabitation for repositories of intersection-typed combinators.
//!
//! Given a [`Repository`] and a goal type, [`build_grammar`] computes a
//! [`TreeGrammar`] whose derivations are exactly the combinatory terms
//! inhabiting the goal. [`enumerate`] walks that grammar lazily in order of
//! term size.

mod cover;
mod enumerate;
mod explain;
mod grammar;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::typesys::{intersect, organize, subtype, PathSet, Type};

pub use self::cover::{cover_failures, covers, covers_for_paths, Cover};
pub use self::enumerate::{count_by_size, enumerate, Enumeration, SpinePruner, SpineStep, TermFilter};
pub use self::explain::{explain_cover, ArityCheck, ArityGroup, CoverTrace, Rejection, TargetPathReport};
pub use self::grammar::{
    build_grammar, Diagnostics, EventRecord, GrammarBuild, GrammarEvent, ReplayError, Rule,
    TreeGrammar,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InhabError {
    #[error("unknown combinator `{0}`")]
    UnknownCombinator(String),
    #[error("malformed term: {0}")]
    TermSyntax(String),
}

/// The combinators available for synthesis, each with a normalized type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repository {
    entries: BTreeMap<String, Type>,
}

impl Repository {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces a combinator.
    pub fn insert(&mut self, name: impl Into<String>, ty: Type) {
        self.entries.insert(name.into(), ty.normalize());
    }

    pub fn get(&self, name: &str) -> Option<&Type> {
        self.entries.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Type)> {
        self.entries.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub(crate) fn organized(&self) -> Vec<(String, PathSet)> {
        self.entries
            .iter()
            .map(|(n, t)| (n.clone(), organize(t)))
            .collect()
    }

    /// Computes the type of an applicative term bottom-up.
    ///
    /// An application `c(a1, .., ak)` gets the intersection of the
    /// k-remainders of those paths of `c` whose first k arguments accept the
    /// argument types. The result is `Top` when no path applies.
    pub fn type_of(&self, term: &Term) -> Result<Type, InhabError> {
        let sigma = self
            .get(&term.combinator)
            .ok_or_else(|| InhabError::UnknownCombinator(term.combinator.clone()))?;
        let arg_types = term
            .args
            .iter()
            .map(|a| self.type_of(a))
            .collect::<Result<Vec<_>, _>>()?;
        let k = arg_types.len();
        Ok(intersect(
            organize(sigma)
                .into_iter()
                .filter(|p| {
                    p.arity() >= k
                        && arg_types
                            .iter()
                            .zip(&p.args)
                            .all(|(actual, formal)| subtype(actual, formal))
                })
                .map(|p| p.remainder(k).to_type()),
        ))
    }

    /// Whether `term` inhabits `goal` in this repository.
    pub fn check(&self, term: &Term, goal: &Type) -> bool {
        self.type_of(term).is_ok_and(|t| subtype(&t, goal))
    }
}

impl FromIterator<(String, Type)> for Repository {
    fn from_iter<I: IntoIterator<Item = (String, Type)>>(iter: I) -> Self {
        let mut repo = Repository::new();
        for (name, ty) in iter {
            repo.insert(name, ty);
        }
        repo
    }
}

/// A combinatory term: a combinator applied to argument terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub combinator: String,
    pub args: Vec<Term>,
}

impl Term {
    pub fn leaf(combinator: impl Into<String>) -> Self {
        Term {
            combinator: combinator.into(),
            args: Vec::new(),
        }
    }

    pub fn apply(combinator: impl Into<String>, args: Vec<Term>) -> Self {
        Term {
            combinator: combinator.into(),
            args,
        }
    }

    /// Number of combinator nodes.
    pub fn size(&self) -> usize {
        1 + self.args.iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.args.iter().map(Term::depth).max().unwrap_or(0)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.combinator)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                a.fmt(f)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for Term {
    type Err = InhabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rest = s.trim_start();
        let term = parse_term(&mut rest)?;
        if !rest.trim().is_empty() {
            return Err(InhabError::TermSyntax(format!("trailing input `{}`", rest.trim())));
        }
        Ok(term)
    }
}

fn parse_term(input: &mut &str) -> Result<Term, InhabError> {
    let end = input
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .unwrap_or(input.len());
    if end == 0 {
        return Err(InhabError::TermSyntax(format!("expected a combinator name at `{input}`")));
    }
    let name = input[..end].to_string();
    *input = input[end..].trim_start();
    let mut args = Vec::new();
    if let Some(after) = input.strip_prefix('(') {
        *input = after.trim_start();
        if let Some(after) = input.strip_prefix(')') {
            *input = after;
        } else {
            loop {
                args.push(parse_term(input)?);
                *input = input.trim_start();
                if let Some(after) = input.strip_prefix(',') {
                    *input = after.trim_start();
                } else if let Some(after) = input.strip_prefix(')') {
                    *input = after;
                    break;
                } else {
                    return Err(InhabError::TermSyntax(format!("expected `,` or `)` at `{input}`")));
                }
            }
        }
    }
    *input = input.trim_start();
    Ok(Term::apply(name, args))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typesys::parse_type;

    #[test]
    fn term_display_and_parse() {
        let t: Term = "down(left(down(start)))".parse().unwrap();
        assert_eq!(t.size(), 4);
        assert_eq!(t.depth(), 4);
        assert_eq!(t.to_string(), "down(left(down(start)))");
        let pair: Term = "f(a, g(b))".parse().unwrap();
        assert_eq!(pair.size(), 4);
        assert_eq!(pair.depth(), 3);
        assert_eq!(pair.to_string(), "f(a, g(b))");
        assert_eq!("start()".parse::<Term>().unwrap(), Term::leaf("start"));
        assert!("f(a".parse::<Term>().is_err());
        assert!("f) x".parse::<Term>().is_err());
    }

    #[test]
    fn type_of_applies_matching_paths() {
        let mut repo = Repository::new();
        repo.insert("start", parse_type("MovementPlan & Pos(1,2)").unwrap());
        repo.insert(
            "down",
            parse_type("(MovementPlan -> MovementPlan) & (Pos(1,2) -> Pos(2,2)) & (Pos(0,0) -> Pos(1,0))")
                .unwrap(),
        );
        let term: Term = "down(start)".parse().unwrap();
        assert_eq!(
            repo.type_of(&term).unwrap(),
            parse_type("MovementPlan & Pos(2,2)").unwrap()
        );
        assert!(repo.check(&term, &parse_type("Pos(2,2)").unwrap()));
        assert!(!repo.check(&term, &parse_type("Pos(1,0)").unwrap()));
        assert_eq!(
            repo.type_of(&"nope".parse().unwrap()),
            Err(InhabError::UnknownCombinator("nope".into()))
        );
    }
}
