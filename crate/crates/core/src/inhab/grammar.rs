use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::cover::{cover_failures, covers_for_paths};
use super::Repository;
use crate::typesys::Type;

/// Right-hand side of a grammar rule: `combinator(args..)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub combinator: String,
    pub args: Vec<Type>,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.combinator)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// Tree grammar whose derivations from `goal` are the inhabitants of `goal`.
///
/// Nodes are types, hyperedges are rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeGrammar {
    goal: Type,
    rules: BTreeMap<Type, BTreeSet<Rule>>,
}

impl TreeGrammar {
    pub fn new(goal: Type) -> Self {
        TreeGrammar {
            goal,
            rules: BTreeMap::new(),
        }
    }

    pub fn goal(&self) -> &Type {
        &self.goal
    }

    pub fn rules_for(&self, key: &Type) -> Option<&BTreeSet<Rule>> {
        self.rules.get(key)
    }

    pub fn contains(&self, key: &Type) -> bool {
        self.rules.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &Type> {
        self.rules.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Type, &BTreeSet<Rule>)> {
        self.rules.iter()
    }

    pub fn key_count(&self) -> usize {
        self.rules.len()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Canonical text form, one `TYPE <- combinator(TYPE, ..)` line per rule.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Rebuilds a grammar from its event log. The goal is the first queued target.
    pub fn replay(events: &[EventRecord]) -> Result<TreeGrammar, ReplayError> {
        let goal = events
            .iter()
            .find_map(|e| match &e.event {
                GrammarEvent::TargetQueued { target } => Some(target.clone()),
                _ => None,
            })
            .ok_or(ReplayError::NoGoal)?;
        let mut grammar = TreeGrammar::new(goal);
        for (expected, record) in events.iter().enumerate() {
            if record.seq != expected {
                return Err(ReplayError::OutOfOrder {
                    expected,
                    found: record.seq,
                });
            }
            grammar.apply(&record.event)?;
        }
        Ok(grammar)
    }

    fn apply(&mut self, event: &GrammarEvent) -> Result<(), ReplayError> {
        match event {
            GrammarEvent::TargetQueued { target } => {
                self.rules.entry(target.clone()).or_default();
            }
            GrammarEvent::RuleAdded {
                target,
                combinator,
                args,
            } => {
                self.rules
                    .get_mut(target)
                    .ok_or_else(|| ReplayError::UnknownTarget(target.to_string()))?
                    .insert(Rule {
                        combinator: combinator.clone(),
                        args: args.clone(),
                    });
            }
            GrammarEvent::CoverFailed { .. } | GrammarEvent::TargetUninhabited { .. } => {}
            GrammarEvent::Pruned { target } => self.remove_key(target),
        }
        Ok(())
    }

    fn remove_key(&mut self, key: &Type) {
        self.rules.remove(key);
        for rules in self.rules.values_mut() {
            rules.retain(|r| !r.args.contains(key));
        }
    }

    fn successors(&self, key: &Type) -> impl Iterator<Item = &Type> {
        self.rules
            .get(key)
            .into_iter()
            .flatten()
            .flat_map(|r| r.args.iter())
    }

    /// Keys reachable from the goal, the goal included when present.
    fn reachable(&self) -> BTreeSet<&Type> {
        let mut seen = BTreeSet::new();
        if !self.rules.contains_key(&self.goal) {
            return seen;
        }
        let mut stack = vec![&self.goal];
        while let Some(k) = stack.pop() {
            if seen.insert(k) {
                stack.extend(self.successors(k));
            }
        }
        seen
    }

    /// Whether some key reachable from the goal lies on a cycle of rules,
    /// i.e. the goal has infinitely many inhabitants (after pruning).
    pub fn is_infinite(&self) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: BTreeMap<&Type, Mark> = BTreeMap::new();
        if !self.rules.contains_key(&self.goal) {
            return false;
        }
        // iterative DFS with an explicit successor cursor
        let mut stack: Vec<(&Type, Vec<&Type>)> = vec![(&self.goal, self.successors(&self.goal).collect())];
        marks.insert(&self.goal, Mark::Open);
        while let Some((node, pending)) = stack.last_mut() {
            match pending.pop() {
                Some(next) => match marks.get(next) {
                    Some(Mark::Open) => return true,
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(next, Mark::Open);
                        let succ = self.successors(next).collect();
                        stack.push((next, succ));
                    }
                },
                None => {
                    marks.insert(node, Mark::Done);
                    stack.pop();
                }
            }
        }
        false
    }
}

impl fmt::Display for TreeGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (key, rules) in &self.rules {
            for rule in rules {
                writeln!(f, "{key} <- {rule}")?;
            }
        }
        Ok(())
    }
}

/// JSON form: `{"goal": T, "rules": [{"target": T, "combinator": c, "args": [T..]}..]}`
/// with rules in canonical order.
impl Serialize for TreeGrammar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Flat<'a> {
            target: &'a Type,
            combinator: &'a str,
            args: &'a [Type],
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            goal: &'a Type,
            rules: Vec<Flat<'a>>,
        }
        let rules = self
            .iter()
            .flat_map(|(target, rs)| {
                rs.iter().map(move |r| Flat {
                    target,
                    combinator: &r.combinator,
                    args: &r.args,
                })
            })
            .collect();
        Doc {
            goal: &self.goal,
            rules,
        }
        .serialize(s)
    }
}

/// One step of grammar construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "camelCase")]
pub enum GrammarEvent {
    TargetQueued {
        target: Type,
    },
    RuleAdded {
        target: Type,
        combinator: String,
        args: Vec<Type>,
    },
    CoverFailed {
        target: Type,
        combinator: String,
        reason: String,
    },
    TargetUninhabited {
        target: Type,
    },
    /// The key and every rule mentioning it are removed.
    Pruned {
        target: Type,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: usize,
    #[serde(flatten)]
    pub event: GrammarEvent,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("event log queues no goal")]
    NoGoal,
    #[error("event {found} out of order, expected sequence number {expected}")]
    OutOfOrder { expected: usize, found: usize },
    #[error("rule added for unqueued target {0}")]
    UnknownTarget(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostics {
    /// Combinators labelling no rule of the pruned grammar.
    pub unused_combinators: BTreeSet<String>,
    /// Targets reached from the goal that derive no finite term.
    pub uninhabited_targets: BTreeSet<Type>,
    pub goal_inhabited: bool,
    pub grammar_infinite: bool,
}

#[derive(Debug, Clone)]
pub struct GrammarBuild {
    pub grammar: TreeGrammar,
    pub events: Vec<EventRecord>,
    pub diagnostics: Diagnostics,
}

struct Log(Vec<EventRecord>);

impl Log {
    fn push(&mut self, event: GrammarEvent) {
        let seq = self.0.len();
        self.0.push(EventRecord { seq, event });
    }
}

/// Builds the pruned tree grammar of all inhabitants of `goal`.
///
/// Targets are processed breadth-first from the goal; every combinator is
/// tried against every target and each minimal cover becomes a rule. Keys
/// that derive no finite term are then pruned (least fixpoint), followed by
/// keys no longer reachable from the goal.
pub fn build_grammar(repo: &Repository, goal: &Type) -> GrammarBuild {
    let goal = goal.normalize();
    let organized = repo.organized();
    let mut log = Log(Vec::new());
    let mut grammar = TreeGrammar::new(goal.clone());
    let mut queue = VecDeque::new();

    grammar.rules.insert(goal.clone(), BTreeSet::new());
    queue.push_back(goal.clone());
    log.push(GrammarEvent::TargetQueued { target: goal.clone() });

    while let Some(target) = queue.pop_front() {
        for (name, paths) in &organized {
            let found = covers_for_paths(paths, &target);
            if found.is_empty() {
                log.push(GrammarEvent::CoverFailed {
                    target: target.clone(),
                    combinator: name.clone(),
                    reason: cover_failures(paths, &target).join("; "),
                });
                continue;
            }
            for cover in found {
                let rule = Rule {
                    combinator: name.clone(),
                    args: cover.arg_types,
                };
                let added = grammar.rules.get_mut(&target).unwrap().insert(rule.clone());
                if !added {
                    continue;
                }
                log.push(GrammarEvent::RuleAdded {
                    target: target.clone(),
                    combinator: rule.combinator,
                    args: rule.args.clone(),
                });
                for arg in rule.args {
                    if !grammar.rules.contains_key(&arg) {
                        grammar.rules.insert(arg.clone(), BTreeSet::new());
                        log.push(GrammarEvent::TargetQueued { target: arg.clone() });
                        queue.push_back(arg);
                    }
                }
            }
        }
    }

    let productive = productive_keys(&grammar);
    let unproductive: Vec<Type> = grammar
        .rules
        .keys()
        .filter(|k| !productive.contains(*k))
        .cloned()
        .collect();
    for key in &unproductive {
        log.push(GrammarEvent::TargetUninhabited { target: key.clone() });
    }
    for key in &unproductive {
        grammar.remove_key(key);
        log.push(GrammarEvent::Pruned { target: key.clone() });
    }

    let reachable: BTreeSet<Type> = grammar.reachable().into_iter().cloned().collect();
    let unreachable: Vec<Type> = grammar
        .rules
        .keys()
        .filter(|k| !reachable.contains(*k))
        .cloned()
        .collect();
    for key in unreachable {
        grammar.remove_key(&key);
        log.push(GrammarEvent::Pruned { target: key });
    }

    let used: BTreeSet<&str> = grammar
        .rules
        .values()
        .flatten()
        .map(|r| r.combinator.as_str())
        .collect();
    let diagnostics = Diagnostics {
        unused_combinators: repo
            .names()
            .filter(|n| !used.contains(n))
            .map(str::to_string)
            .collect(),
        uninhabited_targets: unproductive.into_iter().collect(),
        goal_inhabited: productive.contains(&goal),
        grammar_infinite: grammar.is_infinite(),
    };
    GrammarBuild {
        grammar,
        events: log.0,
        diagnostics,
    }
}

fn productive_keys(grammar: &TreeGrammar) -> BTreeSet<Type> {
    let mut productive: BTreeSet<Type> = BTreeSet::new();
    loop {
        let mut changed = false;
        for (key, rules) in &grammar.rules {
            if productive.contains(key) {
                continue;
            }
            if rules
                .iter()
                .any(|r| r.args.iter().all(|a| productive.contains(a)))
            {
                productive.insert(key.clone());
                changed = true;
            }
        }
        if !changed {
            return productive;
        }
    }
}
