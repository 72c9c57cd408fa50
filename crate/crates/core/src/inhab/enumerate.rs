use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Term, TreeGrammar};
use crate::typesys::Type;

/// Predicate deciding whether an enumerated term is reported.
pub type TermFilter<'f> = Box<dyn FnMut(&Term) -> bool + 'f>;

/// One node on the chain from the root to the node being expanded: the
/// combinator chosen there and the grammar key it inhabits.
#[derive(Debug, Clone, Copy)]
pub struct SpineStep<'a> {
    pub combinator: &'a str,
    pub target: &'a Type,
}

/// Rejects partial terms by their root-to-node chain (root first).
///
/// It must only reject chains that no accepted complete term can contain;
/// it prunes the search and never replaces the term filter.
pub type SpinePruner = Arc<dyn Fn(&[SpineStep<'_>]) -> bool + Send + Sync>;

/// Grammar with keys replaced by indices and per-size term counts.
struct Indexed {
    keys: Vec<Type>,
    names: Vec<String>,
    /// rules[key] = list of (combinator index, argument key indices)
    rules: Vec<Vec<(usize, Vec<usize>)>>,
    /// counts[key][size], saturating
    counts: Vec<Vec<u64>>,
}

impl Indexed {
    fn new(grammar: &TreeGrammar, max_size: usize) -> (Self, Option<usize>) {
        let keys: BTreeMap<_, usize> = grammar.keys().enumerate().map(|(i, k)| (k, i)).collect();
        let mut names: Vec<String> = grammar
            .iter()
            .flat_map(|(_, rs)| rs.iter().map(|r| r.combinator.clone()))
            .collect();
        names.sort();
        names.dedup();
        let rules = grammar
            .iter()
            .map(|(_, rs)| {
                rs.iter()
                    .map(|r| {
                        let c = names.binary_search(&r.combinator).unwrap();
                        (c, r.args.iter().map(|a| keys[a]).collect())
                    })
                    .collect()
            })
            .collect();
        let mut ix = Indexed {
            keys: grammar.keys().cloned().collect(),
            names,
            rules,
            counts: vec![vec![0; max_size + 1]; keys.len()],
        };
        for size in 1..=max_size {
            for key in 0..ix.rules.len() {
                let total = ix.rules[key]
                    .iter()
                    .map(|(_, args)| ix.rule_count(args, size - 1))
                    .fold(0u64, u64::saturating_add);
                ix.counts[key][size] = total;
            }
        }
        let goal = keys.get(grammar.goal()).copied();
        (ix, goal)
    }

    fn admits(&self, pruner: &Option<SpinePruner>, spine: &[(usize, usize)]) -> bool {
        let Some(pruner) = pruner else {
            return true;
        };
        let steps: Vec<SpineStep<'_>> = spine
            .iter()
            .map(|&(comb, key)| SpineStep {
                combinator: &self.names[comb],
                target: &self.keys[key],
            })
            .collect();
        pruner(&steps)
    }

    /// Number of argument tuples for `args` with total size `budget`.
    fn rule_count(&self, args: &[usize], budget: usize) -> u64 {
        match args {
            [] => u64::from(budget == 0),
            [only] => self.counts[*only].get(budget).copied().unwrap_or(0),
            [first, rest @ ..] => {
                let mut total = 0u64;
                for part in 1..=budget.saturating_sub(rest.len()) {
                    let here = self.counts[*first][part];
                    if here == 0 {
                        continue;
                    }
                    total = total.saturating_add(here.saturating_mul(self.rule_count(rest, budget - part)));
                }
                total
            }
        }
    }
}

type Terms = Box<dyn Iterator<Item = Term>>;
type Tuples = Box<dyn Iterator<Item = Vec<Term>>>;

/// Shared state of one enumeration run.
#[derive(Clone)]
struct Ctx {
    ix: Arc<Indexed>,
    pruner: Option<SpinePruner>,
}

/// Lazily yields all terms of `key` with exactly `size` nodes, in rule order.
/// `spine` lists (combinator, key) pairs of the ancestors, root first.
fn terms_of(ctx: Ctx, key: usize, size: usize, spine: Vec<(usize, usize)>) -> Terms {
    if size == 0 || ctx.ix.counts[key][size] == 0 {
        return Box::new(std::iter::empty());
    }
    let nrules = ctx.ix.rules[key].len();
    Box::new((0..nrules).flat_map(move |r| {
        let (comb, args) = ctx.ix.rules[key][r].clone();
        if ctx.ix.rule_count(&args, size - 1) == 0 {
            return Box::new(std::iter::empty()) as Terms;
        }
        let mut spine = spine.clone();
        spine.push((comb, key));
        if !ctx.ix.admits(&ctx.pruner, &spine) {
            return Box::new(std::iter::empty());
        }
        let name = ctx.ix.names[comb].clone();
        Box::new(
            tuples(ctx.clone(), args, size - 1, spine).map(move |children| Term::apply(name.clone(), children)),
        )
    }))
}

/// Lazily yields argument tuples for `args` with total size `budget`, the
/// first argument's size increasing slowest.
fn tuples(ctx: Ctx, args: Vec<usize>, budget: usize, spine: Vec<(usize, usize)>) -> Tuples {
    if args.is_empty() {
        return if budget == 0 {
            Box::new(std::iter::once(Vec::new()))
        } else {
            Box::new(std::iter::empty())
        };
    }
    let rest_len = args.len() - 1;
    Box::new((1..=budget.saturating_sub(rest_len)).flat_map(move |part| {
        let first = args[0];
        let rest: Vec<usize> = args[1..].to_vec();
        if ctx.ix.counts[first][part] == 0 || ctx.ix.rule_count(&rest, budget - part) == 0 {
            return Box::new(std::iter::empty()) as Tuples;
        }
        let ctx2 = ctx.clone();
        let spine2 = spine.clone();
        Box::new(terms_of(ctx.clone(), first, part, spine.clone()).flat_map(move |head| {
            tuples(ctx2.clone(), rest.clone(), budget - part, spine2.clone()).map(move |mut tail| {
                tail.insert(0, head.clone());
                tail
            })
        }))
    }))
}

/// Lazy size-ordered enumeration of the goal's inhabitants.
///
/// Terms of size `1..=max_depth + 1` are visited in nondecreasing size; within
/// a size, rules are taken in canonical order. At most `max_count` terms
/// accepted by the filter are yielded; rejected terms do not count.
pub struct Enumeration<'f> {
    ctx: Ctx,
    goal: Option<usize>,
    max_size: usize,
    max_count: usize,
    size: usize,
    current: Option<Terms>,
    filter: Option<TermFilter<'f>>,
    accepted: usize,
    inspected: usize,
    exhausted: bool,
}

impl<'f> Enumeration<'f> {
    /// Installs a spine pruner; call before the first `next`.
    pub fn with_pruner(mut self, pruner: SpinePruner) -> Self {
        self.ctx.pruner = Some(pruner);
        self
    }

    /// True once every term within the size bound has been inspected.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn inspected(&self) -> usize {
        self.inspected
    }

    pub fn accepted(&self) -> usize {
        self.accepted
    }

    /// Largest term size visited.
    pub fn max_size(&self) -> usize {
        self.max_size
    }
}

impl Iterator for Enumeration<'_> {
    type Item = Term;

    fn next(&mut self) -> Option<Term> {
        let goal = match self.goal {
            Some(g) => g,
            None => {
                self.exhausted = true;
                return None;
            }
        };
        if self.accepted >= self.max_count || self.exhausted {
            return None;
        }
        loop {
            if self.current.is_none() {
                self.size += 1;
                if self.size > self.max_size {
                    self.exhausted = true;
                    return None;
                }
                if self.ctx.ix.counts[goal][self.size] == 0 {
                    continue;
                }
                self.current = Some(terms_of(self.ctx.clone(), goal, self.size, Vec::new()));
            }
            match self.current.as_mut().unwrap().next() {
                None => self.current = None,
                Some(term) => {
                    self.inspected += 1;
                    let keep = self.filter.as_mut().is_none_or(|f| f(&term));
                    if keep {
                        self.accepted += 1;
                        return Some(term);
                    }
                }
            }
        }
    }
}

/// Starts a lazy enumeration of `grammar`'s goal.
pub fn enumerate<'f>(
    grammar: &TreeGrammar,
    max_depth: usize,
    max_count: usize,
    filter: Option<TermFilter<'f>>,
) -> Enumeration<'f> {
    let max_size = max_depth + 1;
    let (ix, goal) = Indexed::new(grammar, max_size);
    Enumeration {
        ctx: Ctx {
            ix: Arc::new(ix),
            pruner: None,
        },
        goal,
        max_size,
        max_count,
        size: 0,
        current: None,
        filter,
        accepted: 0,
        inspected: 0,
        exhausted: false,
    }
}

/// Number of goal inhabitants of each size `0..=max_depth + 1` (saturating).
pub fn count_by_size(grammar: &TreeGrammar, max_depth: usize) -> Vec<u64> {
    let (ix, goal) = Indexed::new(grammar, max_depth + 1);
    match goal {
        Some(g) => ix.counts[g].clone(),
        None => vec![0; max_depth + 2],
    }
}
