use std::cell::RefCell;

use serde::Serialize;
use thiserror::Error;

use super::{accepts, decode, encode, spine_pruner, Constraint, DecodeError, Labyrinth, MovementPlan};
use crate::inhab::{build_grammar, enumerate, Diagnostics, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthOptions {
    pub max_solutions: usize,
    /// Largest plan length explored. Derived from the constraints when absent.
    pub max_depth: Option<usize>,
    pub constraints: Vec<Constraint>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            max_solutions: 10,
            max_depth: None,
            constraints: Vec::new(),
        }
    }
}

impl SynthOptions {
    /// The explicit depth, else the tightest bound implied by the constraints:
    /// a simple path has fewer moves than there are free cells, and
    /// `maxLength(n)` caps plans at `n` moves.
    pub fn resolve_depth(&self, lab: &Labyrinth) -> Result<usize, SynthError> {
        if let Some(d) = self.max_depth {
            return Ok(d);
        }
        self.constraints
            .iter()
            .filter_map(|c| match c {
                Constraint::SimplePath => Some(lab.free_count()),
                Constraint::MaxLength(n) => Some(*n),
                Constraint::NoImmediateReversal => None,
            })
            .min()
            .ok_or(SynthError::DepthRequired)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("maxDepth is required unless a simplePath or maxLength constraint bounds the search")]
    DepthRequired,
    #[error("synthesized term `{term}` does not decode: {source}")]
    Decode { term: String, source: DecodeError },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub index: usize,
    pub term: Term,
    pub plan: MovementPlan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum WarningKind {
    UnusedCombinator,
    Uninhabited,
}

impl WarningKind {
    /// Wire name, as in `lab/synth/warning`.
    pub fn name(self) -> &'static str {
        match self {
            WarningKind::UnusedCombinator => "unusedCombinator",
            WarningKind::Uninhabited => "uninhabited",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Warning {
    pub kind: WarningKind,
    pub detail: String,
}

impl Warning {
    pub fn from_diagnostics(diag: &Diagnostics) -> Vec<Warning> {
        let unused = diag.unused_combinators.iter().map(|c| Warning {
            kind: WarningKind::UnusedCombinator,
            detail: c.clone(),
        });
        let uninhabited = diag.uninhabited_targets.iter().map(|t| Warning {
            kind: WarningKind::Uninhabited,
            detail: t.to_string(),
        });
        unused.chain(uninhabited).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutcome {
    pub solutions: Vec<Solution>,
    /// Every plan within the depth bound was inspected.
    pub exhaustive: bool,
    pub max_depth: usize,
    pub diagnostics: Diagnostics,
    pub warnings: Vec<Warning>,
}

/// Encodes the labyrinth, builds its grammar and returns the shortest plans
/// satisfying all constraints.
pub fn synthesize(lab: &Labyrinth, opts: &SynthOptions) -> Result<SynthOutcome, SynthError> {
    let max_depth = opts.resolve_depth(lab)?;
    let (repo, goal) = encode(lab);
    let build = build_grammar(&repo, &goal);
    let failure: RefCell<Option<SynthError>> = RefCell::new(None);
    let constraints = opts.constraints.clone();
    let filter = |term: &Term| match decode(term, lab) {
        Ok(plan) => accepts(&constraints, &plan),
        Err(source) => {
            failure.borrow_mut().get_or_insert(SynthError::Decode {
                term: term.to_string(),
                source,
            });
            false
        }
    };
    let mut terms = enumerate(&build.grammar, max_depth, opts.max_solutions, Some(Box::new(filter)));
    if let Some(pruner) = spine_pruner(&opts.constraints) {
        terms = terms.with_pruner(pruner);
    }
    let mut solutions = Vec::new();
    for term in terms.by_ref() {
        if failure.borrow().is_some() {
            break;
        }
        // accepted terms decoded fine inside the filter
        let plan = decode(&term, lab).expect("filter accepted an undecodable term");
        solutions.push(Solution {
            index: solutions.len(),
            term,
            plan,
        });
    }
    let exhaustive = terms.is_exhausted();
    drop(terms);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    Ok(SynthOutcome {
        solutions,
        exhaustive,
        max_depth,
        warnings: Warning::from_diagnostics(&build.diagnostics),
        diagnostics: build.diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::{parse_labyrinth, Cell, MazeFormat};

    fn fig1() -> Labyrinth {
        parse_labyrinth("...\n.#S\n...\n#G#\n", MazeFormat::Ascii).unwrap()
    }

    #[test]
    fn depth_resolution() {
        let lab = fig1();
        let mut opts = SynthOptions::default();
        assert_eq!(opts.resolve_depth(&lab), Err(SynthError::DepthRequired));
        opts.constraints = vec![Constraint::NoImmediateReversal];
        assert_eq!(opts.resolve_depth(&lab), Err(SynthError::DepthRequired));
        opts.constraints.push(Constraint::SimplePath);
        assert_eq!(opts.resolve_depth(&lab), Ok(9));
        opts.constraints.push(Constraint::MaxLength(4));
        assert_eq!(opts.resolve_depth(&lab), Ok(4));
        opts.max_depth = Some(20);
        assert_eq!(opts.resolve_depth(&lab), Ok(20));
    }

    #[test]
    fn simple_paths_of_fig1() {
        let out = synthesize(
            &fig1(),
            &SynthOptions {
                max_solutions: 10,
                max_depth: None,
                constraints: vec![Constraint::SimplePath],
            },
        )
        .unwrap();
        assert!(out.exhaustive);
        let lens: Vec<usize> = out.solutions.iter().map(|s| s.plan.len()).collect();
        assert_eq!(lens, vec![3, 7]);
        assert_eq!(out.solutions[0].term.to_string(), "down(left(down(start)))");
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn stopping_at_max_solutions_is_not_exhaustive() {
        let out = synthesize(
            &fig1(),
            &SynthOptions {
                max_solutions: 1,
                max_depth: None,
                constraints: vec![Constraint::SimplePath],
            },
        )
        .unwrap();
        assert_eq!(out.solutions.len(), 1);
        assert!(!out.exhaustive);
    }

    #[test]
    fn unreachable_goal_warns() {
        let lab = parse_labyrinth("S#.\n##G\n", MazeFormat::Ascii).unwrap();
        let out = synthesize(
            &lab,
            &SynthOptions {
                constraints: vec![Constraint::SimplePath],
                ..SynthOptions::default()
            },
        )
        .unwrap();
        assert!(out.solutions.is_empty());
        assert!(out.exhaustive);
        assert!(!out.diagnostics.goal_inhabited);
        assert!(out.warnings.contains(&Warning {
            kind: WarningKind::Uninhabited,
            detail: "MovementPlan & Pos(1,2)".into()
        }));
        assert_eq!(lab.goal(), Cell(1, 2));
    }
}
