//! Grid labyrinths and their encoding as combinator repositories.
//!
//! Coordinates are `(row, col)`; rows grow downward, so `down` adds one to
//! the row. Each of the four directions becomes a combinator whose type lists
//! every valid one-step move as a `Pos(a) -> Pos(b)` arrow, next to
//! `MovementPlan -> MovementPlan`. The `start` combinator has type
//! `MovementPlan & Pos(start)`.

mod constraint;
mod encode;
mod oracle;
mod parse;
mod plan;
mod synth;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::constraint::{accepts, spine_pruner, Constraint};
pub use self::encode::{encode, START};
pub use self::oracle::{oracle_simple_paths, oracle_walks};
pub use self::parse::{parse_labyrinth, MazeFormat};
pub use self::plan::{decode, plan_to_term, DecodeError, MovementPlan};
pub use self::synth::{synthesize, Solution, SynthError, SynthOptions, SynthOutcome, Warning, WarningKind};

/// Upper bound on `rows * cols`.
pub const MAX_CELLS: usize = 10_000;

/// A grid cell `(row, col)`; serialized as `[row, col]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell(pub usize, pub usize);

impl Cell {
    pub fn row(self) -> usize {
        self.0
    }

    pub fn col(self) -> usize {
        self.1
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Up,
    Down,
    Left,
    Right,
}

impl Move {
    /// Fixed direction order used wherever directions are iterated.
    pub const ALL: [Move; 4] = [Move::Up, Move::Down, Move::Left, Move::Right];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Move::Up => (-1, 0),
            Move::Down => (1, 0),
            Move::Left => (0, -1),
            Move::Right => (0, 1),
        }
    }

    pub fn inverse(self) -> Move {
        match self {
            Move::Up => Move::Down,
            Move::Down => Move::Up,
            Move::Left => Move::Right,
            Move::Right => Move::Left,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Move::Up => "up",
            Move::Down => "down",
            Move::Left => "left",
            Move::Right => "right",
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Move {
    type Err = MazeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Move::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| MazeError::UnknownMove(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MazeError {
    #[error("labyrinth must have at least one row and one column")]
    Empty,
    #[error("labyrinth of {rows}x{cols} exceeds {MAX_CELLS} cells")]
    TooLarge { rows: usize, cols: usize },
    #[error("{what} {cell} is out of bounds")]
    OutOfBounds { what: &'static str, cell: Cell },
    #[error("{what} {cell} is blocked")]
    OnBlocked { what: &'static str, cell: Cell },
    #[error("line {line} has {found} columns, expected {expected}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("unexpected character `{ch}` at line {line}, column {col}")]
    BadChar { line: usize, col: usize, ch: char },
    #[error("no `{0}` marker in labyrinth")]
    MissingMarker(char),
    #[error("more than one `{0}` marker in labyrinth")]
    DuplicateMarker(char),
    #[error("malformed labyrinth JSON: {0}")]
    Json(String),
    #[error("unknown move `{0}`")]
    UnknownMove(String),
    #[error("unknown labyrinth format `{0}`")]
    UnknownFormat(String),
}

/// JSON form of a labyrinth, shared with the bridge's `lab/maze/set` payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MazeSpec {
    pub rows: usize,
    pub cols: usize,
    pub blocked: Vec<Cell>,
    pub start: Cell,
    pub goal: Cell,
}

/// A validated rectangular grid with blocked cells, a start and a goal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MazeSpec", into = "MazeSpec")]
pub struct Labyrinth {
    rows: usize,
    cols: usize,
    blocked: BTreeSet<Cell>,
    start: Cell,
    goal: Cell,
}

impl Labyrinth {
    pub fn new(
        rows: usize,
        cols: usize,
        blocked: impl IntoIterator<Item = Cell>,
        start: Cell,
        goal: Cell,
    ) -> Result<Self, MazeError> {
        if rows == 0 || cols == 0 {
            return Err(MazeError::Empty);
        }
        if rows.saturating_mul(cols) > MAX_CELLS {
            return Err(MazeError::TooLarge { rows, cols });
        }
        let lab = Labyrinth {
            rows,
            cols,
            blocked: blocked.into_iter().collect(),
            start,
            goal,
        };
        if let Some(&cell) = lab.blocked.iter().find(|c| !lab.contains(**c)) {
            return Err(MazeError::OutOfBounds { what: "blocked cell", cell });
        }
        for (what, cell) in [("start", start), ("goal", goal)] {
            if !lab.contains(cell) {
                return Err(MazeError::OutOfBounds { what, cell });
            }
            if lab.blocked.contains(&cell) {
                return Err(MazeError::OnBlocked { what, cell });
            }
        }
        Ok(lab)
    }

    /// An obstacle-free grid.
    pub fn open(rows: usize, cols: usize, start: Cell, goal: Cell) -> Result<Self, MazeError> {
        Self::new(rows, cols, [], start, goal)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    pub fn goal(&self) -> Cell {
        self.goal
    }

    pub fn blocked(&self) -> &BTreeSet<Cell> {
        &self.blocked
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.0 < self.rows && cell.1 < self.cols
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        self.contains(cell) && !self.blocked.contains(&cell)
    }

    /// Free cells in row-major order.
    pub fn free_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.rows)
            .flat_map(move |r| (0..self.cols).map(move |c| Cell(r, c)))
            .filter(|c| !self.blocked.contains(c))
    }

    pub fn free_count(&self) -> usize {
        self.rows * self.cols - self.blocked.len()
    }

    /// The cell one move away, if it lies inside the grid (blocked or not).
    pub fn step(&self, from: Cell, mv: Move) -> Option<Cell> {
        let (dr, dc) = mv.delta();
        let r = from.0.checked_add_signed(dr as isize)?;
        let c = from.1.checked_add_signed(dc as isize)?;
        let to = Cell(r, c);
        self.contains(to).then_some(to)
    }

    /// The cell one move away, if it is free.
    pub fn free_step(&self, from: Cell, mv: Move) -> Option<Cell> {
        self.step(from, mv).filter(|c| !self.blocked.contains(c))
    }

    pub fn to_spec(&self) -> MazeSpec {
        MazeSpec {
            rows: self.rows,
            cols: self.cols,
            blocked: self.blocked.iter().copied().collect(),
            start: self.start,
            goal: self.goal,
        }
    }

    /// ASCII rendering using `.`, `#`, `S` and `G` (`S` wins when start = goal).
    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            for c in 0..self.cols {
                let cell = Cell(r, c);
                out.push(if cell == self.start {
                    'S'
                } else if cell == self.goal {
                    'G'
                } else if self.blocked.contains(&cell) {
                    '#'
                } else {
                    '.'
                });
            }
            out.push('\n');
        }
        out
    }
}

impl TryFrom<MazeSpec> for Labyrinth {
    type Error = MazeError;

    fn try_from(spec: MazeSpec) -> Result<Self, Self::Error> {
        Labyrinth::new(spec.rows, spec.cols, spec.blocked, spec.start, spec.goal)
    }
}

impl From<Labyrinth> for MazeSpec {
    fn from(lab: Labyrinth) -> Self {
        lab.to_spec()
    }
}
