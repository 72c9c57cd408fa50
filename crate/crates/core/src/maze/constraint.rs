use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Move, MovementPlan};
use crate::inhab::{SpinePruner, SpineStep};
use crate::typesys::{Type, POS};

/// Structural restriction on synthesized plans.
///
/// Serialized as `"simplePath"`, `"noImmediateReversal"` or `{"maxLength": n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Constraint {
    /// No cell is visited twice.
    SimplePath,
    /// No move is directly followed by its inverse.
    NoImmediateReversal,
    /// At most this many moves.
    MaxLength(usize),
}

impl Constraint {
    pub fn accepts(self, plan: &MovementPlan) -> bool {
        match self {
            Constraint::SimplePath => {
                let distinct: BTreeSet<_> = plan.cells.iter().collect();
                distinct.len() == plan.cells.len()
            }
            Constraint::NoImmediateReversal => plan.moves.windows(2).all(|w| w[1] != w[0].inverse()),
            Constraint::MaxLength(n) => plan.len() <= n,
        }
    }
}

/// Conjunction of all constraints.
pub fn accepts(constraints: &[Constraint], plan: &MovementPlan) -> bool {
    constraints.iter().all(|c| c.accepts(plan))
}

/// `Pos(r,c)` component of a grammar key.
fn key_cell(key: &Type) -> Option<(i64, i64)> {
    key.members().iter().find_map(|m| match m {
        Type::Constructor(c) if c.name == POS && c.args.len() == 2 => Some((c.args[0], c.args[1])),
        _ => None,
    })
}

/// Search-time counterpart of [`accepts`] for maze grammars.
///
/// The spine of a maze term lists the plan's cells backwards from the goal,
/// each paired with the move that entered it. Both checks hold for every
/// stretch of an accepted plan, so rejecting a spine never loses a solution.
/// `maxLength` is already enforced by the depth bound.
pub fn spine_pruner(constraints: &[Constraint]) -> Option<SpinePruner> {
    let simple = constraints.contains(&Constraint::SimplePath);
    let no_reversal = constraints.contains(&Constraint::NoImmediateReversal);
    if !simple && !no_reversal {
        return None;
    }
    Some(Arc::new(move |spine: &[SpineStep<'_>]| {
        let Some((newest, older)) = spine.split_last() else {
            return true;
        };
        if no_reversal {
            if let Some(prev) = older.last() {
                let outer = prev.combinator.parse::<Move>();
                let inner = newest.combinator.parse::<Move>();
                if let (Ok(outer), Ok(inner)) = (outer, inner) {
                    if outer == inner.inverse() {
                        return false;
                    }
                }
            }
        }
        if simple {
            let cell = key_cell(newest.target);
            if cell.is_some() && older.iter().any(|s| key_cell(s.target) == cell) {
                return false;
            }
        }
        true
    }))
}
