//! Brute-force references for checking synthesis results.
//!
//! Neither function touches types or grammars; both work directly on the
//! free-cell adjacency of the grid.

use std::collections::{BTreeMap, BTreeSet};

use super::{Cell, Labyrinth, Move, MovementPlan};

/// Number of start-to-goal walks of each length `0..=max_len`.
///
/// Lengths without any walk are omitted. Counts saturate at `u64::MAX`.
pub fn oracle_walks(lab: &Labyrinth, max_len: usize) -> BTreeMap<usize, u64> {
    let (rows, cols) = (lab.rows(), lab.cols());
    let index = |c: Cell| c.0 * cols + c.1;
    let mut ways = vec![0u64; rows * cols];
    ways[index(lab.start())] = 1;
    let mut out = BTreeMap::new();
    for len in 0..=max_len {
        let at_goal = ways[index(lab.goal())];
        if at_goal > 0 {
            out.insert(len, at_goal);
        }
        if len == max_len {
            break;
        }
        let mut next = vec![0u64; rows * cols];
        for cell in lab.free_cells() {
            let here = ways[index(cell)];
            if here == 0 {
                continue;
            }
            for mv in Move::ALL {
                if let Some(to) = lab.free_step(cell, mv) {
                    let slot = &mut next[index(to)];
                    *slot = slot.saturating_add(here);
                }
            }
        }
        ways = next;
    }
    out
}

/// Every start-to-goal path that visits no cell twice, found by depth-first
/// search trying `up`, `down`, `left`, `right` in that order.
pub fn oracle_simple_paths(lab: &Labyrinth) -> Vec<MovementPlan> {
    let mut found = Vec::new();
    let mut plan = MovementPlan::at(lab.start());
    let mut visited = BTreeSet::from([lab.start()]);
    dfs(lab, &mut plan, &mut visited, &mut found);
    found
}

fn dfs(lab: &Labyrinth, plan: &mut MovementPlan, visited: &mut BTreeSet<Cell>, found: &mut Vec<MovementPlan>) {
    let here = plan.end();
    if here == lab.goal() {
        found.push(plan.clone());
        return;
    }
    for mv in Move::ALL {
        let Some(to) = lab.free_step(here, mv) else {
            continue;
        };
        if !visited.insert(to) {
            continue;
        }
        plan.moves.push(mv);
        plan.cells.push(to);
        dfs(lab, plan, visited, found);
        plan.moves.pop();
        plan.cells.pop();
        visited.remove(&to);
    }
}
