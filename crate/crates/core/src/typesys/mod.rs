//! Intersection types over integer-parameterized constructors.
//!
//! Every [`Type`] built through the public constructors ([`Type::arrow`],
//! [`intersect`], [`parse_type`], ...) is kept in *normal form*: an
//! intersection of paths, where a path is a curried arrow chain ending in a
//! constructor. Paths subsumed by another path are dropped and the remaining
//! ones are sorted by the derived `Ord`. Two normal forms are equal exactly
//! when the types are subtypes of each other.

mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use self::parse::{parse_type, TypeParseError};

/// Name of the plan constructor used by the maze encoding.
pub const MOVEMENT_PLAN: &str = "MovementPlan";
/// Name of the position constructor used by the maze encoding.
pub const POS: &str = "Pos";

/// A constructor with integer literal arguments, e.g. `Pos(1,2)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ctor {
    pub name: String,
    pub args: Vec<i64>,
}

impl Ctor {
    pub fn new(name: impl Into<String>, args: Vec<i64>) -> Self {
        Ctor {
            name: name.into(),
            args,
        }
    }
}

impl fmt::Display for Ctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// An intersection type.
///
/// The variant order doubles as the kind tag of the canonical order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Constructor(Ctor),
    Arrow(Box<Type>, Box<Type>),
    /// At least two members, sorted, without duplicates or nested intersections.
    Intersection(Vec<Type>),
    /// The empty intersection (`omega`).
    Top,
}

/// One component of an organized type: `args[0] -> ... -> args[k-1] -> head`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub args: Vec<Type>,
    pub head: Ctor,
}

pub type PathSet = BTreeSet<Path>;

impl Path {
    pub fn new(args: Vec<Type>, head: Ctor) -> Self {
        Path { args, head }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// The arrow chain this path denotes.
    pub fn to_type(&self) -> Type {
        self.args
            .iter()
            .rev()
            .fold(Type::Constructor(self.head.clone()), |acc, arg| {
                Type::Arrow(Box::new(arg.clone()), Box::new(acc))
            })
    }

    /// The type left after consuming the first `k` arguments.
    pub fn remainder(&self, k: usize) -> Path {
        Path {
            args: self.args[k..].to_vec(),
            head: self.head.clone(),
        }
    }

    /// Path subtyping: same arity and head, arguments contravariant.
    pub fn is_subpath_of(&self, other: &Path) -> bool {
        self.args.len() == other.args.len()
            && self.head == other.head
            && self
                .args
                .iter()
                .zip(&other.args)
                .all(|(mine, theirs)| subtype(theirs, mine))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_type().fmt(f)
    }
}

impl Type {
    /// Nullary constructor.
    pub fn atom(name: impl Into<String>) -> Type {
        Type::Constructor(Ctor::new(name, Vec::new()))
    }

    pub fn ctor(name: impl Into<String>, args: Vec<i64>) -> Type {
        Type::Constructor(Ctor::new(name, args))
    }

    pub fn movement_plan() -> Type {
        Type::atom(MOVEMENT_PLAN)
    }

    pub fn pos(row: i64, col: i64) -> Type {
        Type::ctor(POS, vec![row, col])
    }

    /// Normalized arrow `source -> target`.
    pub fn arrow(source: Type, target: Type) -> Type {
        Type::Arrow(Box::new(source), Box::new(target)).normalize()
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Type::Top)
    }

    /// Top-level conjuncts; `Top` has none.
    pub fn members(&self) -> &[Type] {
        match self {
            Type::Intersection(ms) => ms,
            Type::Top => &[],
            other => std::slice::from_ref(other),
        }
    }

    /// Brings the type into normal form.
    pub fn normalize(&self) -> Type {
        rebuild(reduce(organize(self)))
    }

    /// Whether the type is already in normal form.
    pub fn is_normal(&self) -> bool {
        self.normalize() == *self
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Constructor(c) => c.fmt(f),
            Type::Arrow(source, target) => {
                if matches!(**source, Type::Arrow(..)) {
                    write!(f, "({source})")?;
                } else {
                    write!(f, "{source}")?;
                }
                write!(f, " -> {target}")
            }
            Type::Intersection(ms) => {
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    match m {
                        Type::Arrow(..) | Type::Intersection(_) => write!(f, "({m})")?,
                        _ => write!(f, "{m}")?,
                    }
                }
                Ok(())
            }
            Type::Top => f.write_str("omega"),
        }
    }
}

impl FromStr for Type {
    type Err = TypeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_type(s)
    }
}

impl Serialize for Type {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Type {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_type(&text).map_err(serde::de::Error::custom)
    }
}

/// Splits a type into its set of paths.
///
/// Arrow targets distribute over intersections, `Top` contributes nothing and
/// argument types are normalized, so organizing is idempotent.
pub fn organize(t: &Type) -> PathSet {
    let mut out = PathSet::new();
    organize_into(t, &mut out);
    out
}

fn organize_into(t: &Type, out: &mut PathSet) {
    match t {
        Type::Constructor(c) => {
            out.insert(Path::new(Vec::new(), c.clone()));
        }
        Type::Arrow(source, target) => {
            let source = source.normalize();
            for p in organize(target) {
                let mut args = Vec::with_capacity(p.args.len() + 1);
                args.push(source.clone());
                args.extend(p.args);
                out.insert(Path::new(args, p.head));
            }
        }
        Type::Intersection(ms) => {
            for m in ms {
                organize_into(m, out);
            }
        }
        Type::Top => {}
    }
}

/// Drops every path that is a supertype of another path in the set.
fn reduce(paths: PathSet) -> Vec<Path> {
    let paths: Vec<Path> = paths.into_iter().collect();
    paths
        .iter()
        .enumerate()
        .filter(|(i, p)| {
            !paths.iter().enumerate().any(|(j, q)| {
                // Equivalent distinct paths cannot occur once arguments are
                // normalized; keep the first by order if they ever do.
                j != *i && q.is_subpath_of(p) && (j < *i || !p.is_subpath_of(q))
            })
        })
        .map(|(_, p)| p.clone())
        .collect()
}

fn rebuild(paths: Vec<Path>) -> Type {
    let mut members: Vec<Type> = paths.iter().map(Path::to_type).collect();
    members.sort();
    members.dedup();
    match members.len() {
        0 => Type::Top,
        1 => members.pop().unwrap(),
        _ => Type::Intersection(members),
    }
}

/// Canonical intersection of a list of types.
pub fn intersect<I>(ts: I) -> Type
where
    I: IntoIterator<Item = Type>,
{
    Type::Intersection(ts.into_iter().collect()).normalize()
}

/// Decides `a <= b`.
pub fn subtype(a: &Type, b: &Type) -> bool {
    let lower = organize(a);
    organize(b)
        .iter()
        .all(|q| lower.iter().any(|p| p.is_subpath_of(q)))
}

/// `a <= b` and `b <= a`.
pub fn equivalent(a: &Type, b: &Type) -> bool {
    subtype(a, b) && subtype(b, a)
}
