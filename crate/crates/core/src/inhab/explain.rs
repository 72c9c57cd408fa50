use std::collections::BTreeMap;

use serde::Serialize;

use super::cover::{cover_failures, covers_for_paths, display_paths, max_arity, Cover};
use super::{InhabError, Repository};
use crate::typesys::{organize, Path, Type};

/// Paths of the combinator type sharing one arity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArityGroup {
    pub arity: usize,
    #[serde(serialize_with = "display_paths")]
    pub paths: Vec<Path>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    #[serde(serialize_with = "display_path")]
    pub path: Path,
    pub reason: String,
}

fn display_path<S: serde::Serializer>(path: &Path, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(path)
}

/// How one target path fares when combinator paths are split after `arity` arguments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArityCheck {
    pub arity: usize,
    #[serde(serialize_with = "display_paths")]
    pub candidates: Vec<Path>,
    pub rejected: Vec<Rejection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetPathReport {
    #[serde(serialize_with = "display_path")]
    pub target_path: Path,
    pub checks: Vec<ArityCheck>,
}

/// Step-by-step account of covering a target with one combinator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverTrace {
    pub combinator: String,
    pub combinator_type: Type,
    pub target: Type,
    pub paths_by_arity: Vec<ArityGroup>,
    pub target_paths: Vec<TargetPathReport>,
    pub covers: Vec<Cover>,
    pub failures: Vec<String>,
}

impl CoverTrace {
    pub fn succeeded(&self) -> bool {
        !self.covers.is_empty()
    }
}

/// Explains how (or why not) `combinator` covers `target`.
pub fn explain_cover(repo: &Repository, combinator: &str, target: &Type) -> Result<CoverTrace, InhabError> {
    let sigma = repo
        .get(combinator)
        .ok_or_else(|| InhabError::UnknownCombinator(combinator.to_string()))?;
    let target = target.normalize();
    let paths = organize(sigma);

    let mut groups: BTreeMap<usize, Vec<Path>> = BTreeMap::new();
    for p in &paths {
        groups.entry(p.arity()).or_default().push(p.clone());
    }
    let paths_by_arity = groups
        .into_iter()
        .map(|(arity, paths)| ArityGroup { arity, paths })
        .collect();

    let target_paths = organize(&target)
        .into_iter()
        .map(|q| {
            let checks = (0..=max_arity(&paths))
                .map(|k| {
                    let mut candidates = Vec::new();
                    let mut rejected = Vec::new();
                    for p in paths.iter().filter(|p| p.arity() >= k) {
                        let rest = p.remainder(k);
                        if rest.is_subpath_of(&q) {
                            candidates.push(p.clone());
                        } else {
                            rejected.push(Rejection {
                                path: p.clone(),
                                reason: format!("{rest} is not <= {q}"),
                            });
                        }
                    }
                    ArityCheck {
                        arity: k,
                        candidates,
                        rejected,
                    }
                })
                .collect();
            TargetPathReport {
                target_path: q,
                checks,
            }
        })
        .collect();

    Ok(CoverTrace {
        combinator: combinator.to_string(),
        combinator_type: sigma.clone(),
        covers: covers_for_paths(&paths, &target),
        failures: cover_failures(&paths, &target),
        target,
        paths_by_arity,
        target_paths,
    })
}
