use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::encode::START;
use super::{Cell, Labyrinth, Move};
use crate::inhab::Term;

/// A sequence of moves together with the cells it visits.
///
/// `cells` has one more entry than `moves`; `cells[0]` is the start.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MovementPlan {
    pub moves: Vec<Move>,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("ill-formed term: {0}")]
    IllFormedTerm(String),
    #[error("step {step} ({mv}) from {from} leaves the grid or hits a blocked cell")]
    InvalidStep { step: usize, mv: Move, from: Cell },
}

impl MovementPlan {
    /// The empty plan standing at `start`.
    pub fn at(start: Cell) -> Self {
        MovementPlan {
            moves: Vec::new(),
            cells: vec![start],
        }
    }

    /// Replays `moves` from `start`, rejecting steps into walls or off the grid.
    pub fn from_moves(lab: &Labyrinth, start: Cell, moves: &[Move]) -> Result<Self, DecodeError> {
        let mut plan = MovementPlan::at(start);
        for (step, &mv) in moves.iter().enumerate() {
            let from = plan.end();
            let to = lab
                .free_step(from, mv)
                .ok_or(DecodeError::InvalidStep { step, mv, from })?;
            plan.moves.push(mv);
            plan.cells.push(to);
        }
        Ok(plan)
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn end(&self) -> Cell {
        *self.cells.last().expect("a plan always has a first cell")
    }

    /// `down;left;down`, or `-` for the empty plan.
    pub fn moves_text(&self) -> String {
        if self.moves.is_empty() {
            return "-".to_string();
        }
        self.moves.iter().map(|m| m.name()).collect::<Vec<_>>().join(";")
    }

    /// `(1,2)->(2,2)->(2,1)`
    pub fn cells_text(&self) -> String {
        self.cells
            .iter()
            .map(Cell::to_string)
            .collect::<Vec<_>>()
            .join("->")
    }
}

impl fmt::Display for MovementPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}  {}", self.moves_text(), self.cells_text())
    }
}

/// Interprets a term built from the maze repository as a movement plan.
pub fn decode(term: &Term, lab: &Labyrinth) -> Result<MovementPlan, DecodeError> {
    let mut moves = Vec::new();
    let mut node = term;
    loop {
        if node.combinator == START {
            if !node.args.is_empty() {
                return Err(DecodeError::IllFormedTerm(format!(
                    "`{START}` takes no arguments, got {}",
                    node.args.len()
                )));
            }
            break;
        }
        let mv: Move = node
            .combinator
            .parse()
            .map_err(|_| DecodeError::IllFormedTerm(format!("unknown combinator `{}`", node.combinator)))?;
        match node.args.as_slice() {
            [inner] => {
                moves.push(mv);
                node = inner;
            }
            [] => {
                return Err(DecodeError::IllFormedTerm(format!(
                    "innermost node is `{mv}`, expected `{START}`"
                )))
            }
            more => {
                return Err(DecodeError::IllFormedTerm(format!(
                    "`{mv}` takes one argument, got {}",
                    more.len()
                )))
            }
        }
    }
    moves.reverse();
    MovementPlan::from_moves(lab, lab.start(), &moves)
}

/// The term whose decoding is `plan`: the last move is the outermost node.
pub fn plan_to_term(plan: &MovementPlan) -> Term {
    plan.moves
        .iter()
        .fold(Term::leaf(START), |inner, mv| Term::apply(mv.name(), vec![inner]))
}
