use super::{Labyrinth, Move};
use crate::inhab::Repository;
use crate::typesys::{intersect, Type};

/// Name of the combinator providing the start position.
pub const START: &str = "start";

fn pos(cell: super::Cell) -> Type {
    Type::pos(cell.0 as i64, cell.1 as i64)
}

/// Encodes a labyrinth as a repository and the goal type
/// `MovementPlan & Pos(goal)`.
///
/// A direction without any valid move keeps the type
/// `MovementPlan -> MovementPlan`.
pub fn encode(lab: &Labyrinth) -> (Repository, Type) {
    let plan = Type::movement_plan();
    let mut repo = Repository::new();
    repo.insert(START, intersect([plan.clone(), pos(lab.start())]));
    for mv in Move::ALL {
        let mut conjuncts = vec![Type::arrow(plan.clone(), plan.clone())];
        conjuncts.extend(lab.free_cells().filter_map(|from| {
            lab.free_step(from, mv)
                .map(|to| Type::arrow(pos(from), pos(to)))
        }));
        repo.insert(mv.name(), intersect(conjuncts));
    }
    (repo, intersect([plan, pos(lab.goal())]))
}
