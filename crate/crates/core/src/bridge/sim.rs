use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use super::protocol::{HaltCause, RobotHalt, RobotPosition, LASER_FRAME, ROBOT_HALT, ROBOT_POSITION};
use super::{render_frame, Envelope};
use crate::maze::{Cell, Labyrinth, Move, MovementPlan};

/// Id of the robot registered on every `maze/set`.
pub const DEFAULT_ROBOT: &str = "r1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("unknown robot `{0}`")]
    UnknownRobot(String),
    #[error("cell {0} is out of bounds")]
    OutOfBounds(Cell),
    #[error("cell {cell} is occupied by robot `{robot}`")]
    Occupied { cell: Cell, robot: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Robot {
    pub cell: Cell,
    pub pending: VecDeque<Move>,
    pub tick_ms: u64,
}

impl Robot {
    pub fn is_moving(&self) -> bool {
        !self.pending.is_empty()
    }
}

/// The simulated lab: the maze plans are synthesized against, the physical
/// world (which may gain or lose obstacles), robots and the logical clock.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimState {
    pub model: Labyrinth,
    pub world_blocked: BTreeSet<Cell>,
    pub robots: BTreeMap<String, Robot>,
    pub tick: u64,
}

impl SimState {
    /// A fresh world with [`DEFAULT_ROBOT`] idle at the start cell.
    pub fn new(model: Labyrinth) -> Self {
        let robot = Robot {
            cell: model.start(),
            pending: VecDeque::new(),
            tick_ms: 0,
        };
        SimState {
            world_blocked: model.blocked().clone(),
            robots: BTreeMap::from([(DEFAULT_ROBOT.to_string(), robot)]),
            model,
            tick: 0,
        }
    }

    pub fn is_busy(&self) -> bool {
        self.robots.values().any(Robot::is_moving)
    }

    pub fn frame(&self) -> Envelope {
        Envelope::new(LASER_FRAME, &render_frame(self))
    }

    /// Queues `moves` for `robot`, replacing any unfinished plan. An empty
    /// plan completes at once.
    pub fn execute(&mut self, robot: &str, moves: &[Move], tick_ms: u64) -> Result<Vec<Envelope>, SimError> {
        let r = self
            .robots
            .get_mut(robot)
            .ok_or_else(|| SimError::UnknownRobot(robot.to_string()))?;
        r.pending = moves.iter().copied().collect();
        r.tick_ms = tick_ms;
        if moves.is_empty() {
            return Ok(vec![halt(robot, HaltCause::PlanComplete, r.cell)]);
        }
        Ok(Vec::new())
    }

    /// Advances the clock by one tick, moving every busy robot one step.
    pub fn step(&mut self) -> Vec<Envelope> {
        let busy: Vec<String> = self
            .robots
            .iter()
            .filter(|(_, r)| r.is_moving())
            .map(|(id, _)| id.clone())
            .collect();
        self.advance(&busy)
    }

    /// Advances the clock by one tick for a single robot.
    pub fn step_robot(&mut self, robot: &str) -> Vec<Envelope> {
        match self.robots.get(robot) {
            Some(r) if r.is_moving() => self.advance(&[robot.to_string()]),
            _ => Vec::new(),
        }
    }

    fn advance(&mut self, ids: &[String]) -> Vec<Envelope> {
        if ids.is_empty() {
            return Vec::new();
        }
        self.tick += 1;
        let mut out = Vec::new();
        let mut moved = false;
        for id in ids {
            let occupied: BTreeSet<Cell> = self
                .robots
                .iter()
                .filter(|(other, _)| *other != id)
                .map(|(_, r)| r.cell)
                .collect();
            let r = self.robots.get_mut(id).expect("ids come from the robot map");
            let mv = r.pending.pop_front().expect("only moving robots advance");
            let here = r.cell;
            let cause = match self.model.free_step(here, mv) {
                None => Some(HaltCause::SpecError),
                Some(next) if self.world_blocked.contains(&next) || occupied.contains(&next) => {
                    Some(HaltCause::WorldFailure)
                }
                Some(next) => {
                    r.cell = next;
                    moved = true;
                    out.push(Envelope::new(
                        ROBOT_POSITION,
                        &RobotPosition {
                            robot: id.clone(),
                            cell: next,
                            t: self.tick,
                        },
                    ));
                    r.pending.is_empty().then_some(HaltCause::PlanComplete)
                }
            };
            if let Some(cause) = cause {
                r.pending.clear();
                out.push(halt(id, cause, r.cell));
            }
        }
        if moved {
            out.push(self.frame());
        }
        out
    }

    /// Blocks or clears a cell of the physical world only; the synthesis
    /// model is unchanged.
    pub fn set_obstacle(&mut self, cell: Cell, blocked: bool) -> Result<Vec<Envelope>, SimError> {
        if !self.model.contains(cell) {
            return Err(SimError::OutOfBounds(cell));
        }
        if blocked {
            if let Some((id, _)) = self.robots.iter().find(|(_, r)| r.cell == cell) {
                return Err(SimError::Occupied {
                    cell,
                    robot: id.clone(),
                });
            }
            self.world_blocked.insert(cell);
        } else {
            self.world_blocked.remove(&cell);
        }
        Ok(vec![self.frame()])
    }
}

fn halt(robot: &str, cause: HaltCause, cell: Cell) -> Envelope {
    Envelope::new(
        ROBOT_HALT,
        &RobotHalt {
            robot: robot.to_string(),
            cause,
            cell,
        },
    )
}

/// Runs `plan` for `robot` to completion without outside interference and
/// returns everything the simulator publishes on the way.
pub fn execute_plan(state: &mut SimState, robot: &str, plan: &MovementPlan) -> Result<Vec<Envelope>, SimError> {
    let mut out = state.execute(robot, &plan.moves, 0)?;
    while state.robots[robot].is_moving() {
        out.extend(state.step_robot(robot));
    }
    Ok(out)
}
