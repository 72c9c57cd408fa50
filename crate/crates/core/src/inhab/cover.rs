use std::collections::BTreeSet;

use serde::Serialize;

use crate::typesys::{intersect, organize, Path, PathSet, Type};

/// A minimal selection of paths of one arity whose joint targets cover a goal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Cover {
    pub arity: usize,
    #[serde(serialize_with = "display_paths")]
    pub selected_paths: Vec<Path>,
    pub arg_types: Vec<Type>,
}

pub(crate) fn display_paths<S: serde::Serializer>(paths: &[Path], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(paths.iter().map(|p| p.to_string()))
}

/// All minimal covers of `target` by the paths of `sigma`, ordered by arity
/// and then by selected paths. An empty result means no cover exists.
pub fn covers(sigma: &Type, target: &Type) -> Vec<Cover> {
    covers_for_paths(&organize(sigma), target)
}

/// Paths of `paths` that, split after `k` arguments, have a remainder `<= q`.
pub(crate) fn candidates<'a>(paths: &'a PathSet, k: usize, q: &Path) -> Vec<&'a Path> {
    paths
        .iter()
        .filter(|p| p.arity() >= k && p.remainder(k).is_subpath_of(q))
        .collect()
}

pub(crate) fn max_arity(paths: &PathSet) -> usize {
    paths.iter().map(Path::arity).max().unwrap_or(0)
}

/// Like [`covers`], for an already organized combinator type.
pub fn covers_for_paths(paths: &PathSet, target: &Type) -> Vec<Cover> {
    let target = target.normalize();
    if target.is_top() {
        // Every combinator inhabits omega on its own.
        return vec![Cover {
            arity: 0,
            selected_paths: Vec::new(),
            arg_types: Vec::new(),
        }];
    }
    let targets: Vec<Path> = organize(&target).into_iter().collect();
    let mut out = BTreeSet::new();
    for k in 0..=max_arity(paths) {
        let per_target: Vec<Vec<&Path>> = targets.iter().map(|q| candidates(paths, k, q)).collect();
        if per_target.iter().any(Vec::is_empty) {
            continue;
        }
        for selection in minimal_selections(&targets, &per_target, k) {
            let arg_types = (0..k)
                .map(|i| intersect(selection.iter().map(|p| p.args[i].clone())))
                .collect();
            out.insert(Cover {
                arity: k,
                selected_paths: selection.into_iter().cloned().collect(),
                arg_types,
            });
        }
    }
    out.into_iter().collect()
}

/// Enumerates one candidate per target path and keeps the minimal sets.
///
/// Every minimal cover shows up: each of its members is the sole coverer of
/// some target path, so picking that member there and any member elsewhere
/// reproduces it.
fn minimal_selections<'a>(
    targets: &[Path],
    per_target: &[Vec<&'a Path>],
    k: usize,
) -> BTreeSet<BTreeSet<&'a Path>> {
    let mut found = BTreeSet::new();
    let mut choice = vec![0usize; per_target.len()];
    loop {
        let selection: BTreeSet<&Path> = choice
            .iter()
            .zip(per_target)
            .map(|(&i, cands)| cands[i])
            .collect();
        if is_minimal(&selection, targets, k) {
            found.insert(selection);
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return found;
            }
            choice[pos] += 1;
            if choice[pos] < per_target[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

fn is_minimal(selection: &BTreeSet<&Path>, targets: &[Path], k: usize) -> bool {
    selection.iter().all(|dropped| {
        !targets.iter().all(|q| {
            selection
                .iter()
                .any(|p| p != dropped && p.remainder(k).is_subpath_of(q))
        })
    })
}

/// Human-readable reasons why no cover of `target` exists, one per
/// uncovered target path and arity. Empty when a cover exists.
pub fn cover_failures(paths: &PathSet, target: &Type) -> Vec<String> {
    let target = target.normalize();
    if target.is_top() {
        return Vec::new();
    }
    if paths.is_empty() {
        return vec!["combinator type is omega and has no paths".to_string()];
    }
    let targets: Vec<Path> = organize(&target).into_iter().collect();
    let mut reasons = Vec::new();
    for k in 0..=max_arity(paths) {
        let uncovered: Vec<&Path> = targets
            .iter()
            .filter(|q| candidates(paths, k, q).is_empty())
            .collect();
        if uncovered.is_empty() {
            return Vec::new();
        }
        for q in uncovered {
            reasons.push(format!("no path of arity {k} has head <= {q}"));
        }
    }
    reasons
}
