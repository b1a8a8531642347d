//! First-order logic over colored graphs: syntax, evaluation, interpretations,
//! rank-q types and the Ehrenfeucht-Fraïssé game.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Not;

use thiserror::Error;

use crate::graph::{ball, ColoredGraph, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("variable {0} has no value")]
    Unassigned(Var),
    #[error("formula is not symmetric: holds for ({0}, {1}) but not for ({1}, {0})")]
    Asymmetric(usize, usize),
    #[error("interpretation formula may only use free variables x1 and x2, found {0}")]
    BadFreeVariable(Var),
    #[error("{what} {got} exceeds the cap {cap}")]
    CapExceeded { what: &'static str, got: usize, cap: usize },
    #[error("parse error at token {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Free variables are `x1, x2, ...`; bound variables are `y1, y2, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Free(usize),
    Bound(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Free(i) => write!(f, "x{i}"),
            Var::Bound(i) => write!(f, "y{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Edge(Var, Var),
    Color(usize, Var),
    Eq(Var, Var),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(usize, Box<Formula>),
    Forall(usize, Box<Formula>),
}

pub fn x(i: usize) -> Var {
    Var::Free(i)
}

pub fn y(i: usize) -> Var {
    Var::Bound(i)
}

impl std::ops::Not for Formula {
    type Output = Formula;

    fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
}

impl Formula {
    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn exists(i: usize, body: Formula) -> Formula {
        Formula::Exists(i, Box::new(body))
    }

    pub fn forall(i: usize, body: Formula) -> Formula {
        Formula::Forall(i, Box::new(body))
    }

    pub fn quantifier_rank(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Edge(..) | Formula::Color(..) | Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_rank(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::quantifier_rank).max().unwrap_or(0),
            Formula::Implies(a, b) => a.quantifier_rank().max(b.quantifier_rank()),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_rank(),
        }
    }

    /// Variables occurring free.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut vec![], &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<usize>, out: &mut BTreeSet<Var>) {
        let mut see = |v: &Var| match v {
            Var::Bound(i) if bound.contains(i) => {}
            other => {
                out.insert(*other);
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Edge(a, b) | Formula::Eq(a, b) => {
                see(a);
                see(b);
            }
            Formula::Color(_, a) => see(a),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(i, f) | Formula::Forall(i, f) => {
                bound.push(*i);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, fs: &[Formula]| {
            write!(f, "({head}")?;
            for g in fs {
                write!(f, " {g}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Edge(a, b) => write!(f, "(E {a} {b})"),
            Formula::Color(c, a) => write!(f, "(color {c} {a})"),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(fs) => list(f, "and", fs),
            Formula::Or(fs) => list(f, "or", fs),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Exists(i, g) => write!(f, "(exists y{i} {g})"),
            Formula::Forall(i, g) => write!(f, "(forall y{i} {g})"),
        }
    }
}

/// Parses the s-expression syntax produced by `Display`.
///
/// ```text
/// phi := true | false | (E v v) | (= v v) | (color c v) | (not phi)
///      | (and phi*) | (or phi*) | (implies phi phi)
///      | (exists yN phi) | (forall yN phi)
/// v   := xN | yN
/// ```
pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    let tokens: Vec<String> = text
        .replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_owned)
        .collect();
    let mut p = Parser { tokens, pos: 0 };
    let f = p.formula()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("trailing input"));
    }
    Ok(f)
}

struct Parser {
    tokens: Vec<String>,
    pos: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> LogicError {
        LogicError::Parse { pos: self.pos, msg: msg.to_owned() }
    }

    fn next(&mut self) -> Result<String, LogicError> {
        let t = self.tokens.get(self.pos).cloned().ok_or_else(|| self.error("unexpected end"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: &str) -> Result<(), LogicError> {
        let got = self.next()?;
        if got == want {
            Ok(())
        } else {
            self.pos -= 1;
            Err(self.error(&format!("expected `{want}`, found `{got}`")))
        }
    }

    fn number(&mut self) -> Result<usize, LogicError> {
        let t = self.next()?;
        t.parse().map_err(|_| {
            self.pos -= 1;
            self.error(&format!("expected a number, found `{t}`"))
        })
    }

    fn var(&mut self) -> Result<Var, LogicError> {
        let t = self.next()?;
        let index = |s: &str| s.parse::<usize>().ok();
        match (t.chars().next(), index(&t[t.len().min(1)..])) {
            (Some('x'), Some(i)) => Ok(Var::Free(i)),
            (Some('y'), Some(i)) => Ok(Var::Bound(i)),
            _ => {
                self.pos -= 1;
                Err(self.error(&format!("expected a variable, found `{t}`")))
            }
        }
    }

    fn bound_index(&mut self) -> Result<usize, LogicError> {
        match self.var()? {
            Var::Bound(i) => Ok(i),
            Var::Free(_) => {
                self.pos -= 1;
                Err(self.error("quantifiers bind y-variables only"))
            }
        }
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        let head = self.next()?;
        match head.as_str() {
            "true" => return Ok(Formula::True),
            "false" => return Ok(Formula::False),
            "(" => {}
            _ => {
                self.pos -= 1;
                return Err(self.error(&format!("unexpected `{head}`")));
            }
        }
        let op = self.next()?;
        let f = match op.as_str() {
            "E" => Formula::Edge(self.var()?, self.var()?),
            "=" => Formula::Eq(self.var()?, self.var()?),
            "color" => Formula::Color(self.number()?, self.var()?),
            "not" => self.formula()?.not(),
            "implies" => self.formula()?.implies(self.formula()?),
            "exists" => Formula::exists(self.bound_index()?, self.formula()?),
            "forall" => Formula::forall(self.bound_index()?, self.formula()?),
            "and" | "or" => {
                let mut parts = vec![];
                while self.tokens.get(self.pos).map(String::as_str) != Some(")") {
                    parts.push(self.formula()?);
                }
                if op == "and" {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                }
            }
            _ => {
                self.pos -= 1;
                return Err(self.error(&format!("unknown operator `{op}`")));
            }
        };
        self.expect(")")?;
        Ok(f)
    }
}

/// Values of variables during evaluation.
#[derive(Debug, Clone, Default)]
pub struct Assignment {
    free: Vec<Option<usize>>,
    bound: Vec<Option<usize>>,
}

impl Assignment {
    /// `x1 = tuple[0]`, `x2 = tuple[1]`, ...
    pub fn from_tuple(tuple: &[usize]) -> Self {
        let mut a = Assignment::default();
        for (i, &v) in tuple.iter().enumerate() {
            a.set(Var::Free(i + 1), Some(v));
        }
        a
    }

    pub fn get(&self, var: Var) -> Option<usize> {
        let (slots, i) = match var {
            Var::Free(i) => (&self.free, i),
            Var::Bound(i) => (&self.bound, i),
        };
        slots.get(i).copied().flatten()
    }

    pub fn set(&mut self, var: Var, value: Option<usize>) -> Option<usize> {
        let (slots, i) = match var {
            Var::Free(i) => (&mut self.free, i),
            Var::Bound(i) => (&mut self.bound, i),
        };
        if slots.len() <= i {
            slots.resize(i + 1, None);
        }
        std::mem::replace(&mut slots[i], value)
    }
}

pub fn eval_formula(s: &ColoredGraph, phi: &Formula, assignment: &Assignment) -> Result<bool, LogicError> {
    let mut a = assignment.clone();
    eval(s, phi, &mut a)
}

fn eval(s: &ColoredGraph, phi: &Formula, a: &mut Assignment) -> Result<bool, LogicError> {
    let val = |a: &Assignment, v: Var| a.get(v).ok_or(LogicError::Unassigned(v));
    Ok(match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Edge(u, v) => s.graph.has_edge(val(a, *u)?, val(a, *v)?),
        Formula::Color(c, v) => s.colors[val(a, *v)?] == *c,
        Formula::Eq(u, v) => val(a, *u)? == val(a, *v)?,
        Formula::Not(f) => !eval(s, f, a)?,
        Formula::And(fs) => {
            for f in fs {
                if !eval(s, f, a)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(fs) => {
            for f in fs {
                if eval(s, f, a)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Implies(p, q) => !eval(s, p, a)? || eval(s, q, a)?,
        Formula::Exists(i, f) | Formula::Forall(i, f) => {
            let want = matches!(phi, Formula::Exists(..));
            let saved = a.get(Var::Bound(*i));
            let mut result = !want;
            for w in s.graph.vertices() {
                a.set(Var::Bound(*i), Some(w));
                if eval(s, f, a)? == want {
                    result = want;
                    break;
                }
            }
            a.set(Var::Bound(*i), saved);
            result
        }
    })
}

/// Graph on `V(g)` whose edges are the pairs `u != v` with `g |= xi(u, v)`.
pub fn interpret(g: &ColoredGraph, xi: &Formula) -> Result<Graph, LogicError> {
    if let Some(v) = xi.free_vars().into_iter().find(|v| !matches!(v, Var::Free(1) | Var::Free(2))) {
        return Err(LogicError::BadFreeVariable(v));
    }
    let n = g.vertex_count();
    let mut out = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let forward = eval_formula(g, xi, &Assignment::from_tuple(&[u, v]))?;
            let backward = eval_formula(g, xi, &Assignment::from_tuple(&[v, u]))?;
            match (forward, backward) {
                (true, true) => out.add_edge(u, v),
                (false, false) => {}
                (true, false) => return Err(LogicError::Asymmetric(u, v)),
                (false, true) => return Err(LogicError::Asymmetric(v, u)),
            }
        }
    }
    Ok(out)
}

/// Per-instance locality evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Locality {
    Holds,
    /// The formula's truth value changes when evaluated inside the ball.
    BallMismatch { tuple: Vec<usize> },
    /// A satisfying tuple has two entries farther apart than `r`.
    TooFar { tuple: Vec<usize> },
}

/// Checks, for every tuple of the given arity (at most 2), that `xi` evaluates the same in `g`
/// and in the `r`-ball around the tuple, and that satisfying tuples have diameter at most `r`.
pub fn check_strong_locality(g: &ColoredGraph, xi: &Formula, arity: usize, r: usize) -> Result<Locality, LogicError> {
    if arity > 2 {
        return Err(LogicError::CapExceeded { what: "arity", got: arity, cap: 2 });
    }
    let n = g.vertex_count();
    let tuples: Vec<Vec<usize>> = match arity {
        0 => vec![vec![]],
        1 => (0..n).map(|v| vec![v]).collect(),
        _ => (0..n).flat_map(|u| (0..n).map(move |v| vec![u, v])).collect(),
    };
    for t in tuples {
        let whole = eval_formula(g, xi, &Assignment::from_tuple(&t))?;
        let local = if t.is_empty() {
            whole
        } else {
            let b = ball(&g.graph, &t, r).expect("tuple is nonempty");
            let colors = b.vertices.iter().map(|&v| g.colors[v]).collect();
            let sub = ColoredGraph::new(b.graph.clone(), colors);
            let mapped: Vec<usize> = t.iter().map(|&v| b.local_id(v).expect("centre in ball")).collect();
            eval_formula(&sub, xi, &Assignment::from_tuple(&mapped))?
        };
        if whole != local {
            return Ok(Locality::BallMismatch { tuple: t });
        }
        if whole && t.len() == 2 && g.graph.distance(t[0], t[1]).is_none_or(|d| d > r) {
            return Ok(Locality::TooFar { tuple: t });
        }
    }
    Ok(Locality::Holds)
}

/// Interned identifier of a rank-q type. Equal ids within one [`TypeTable`] mean equal types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeId(pub u32);

/// Interned identifier of an atomic type (colors, equalities and edges inside a tuple).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicId(pub u32);

pub const DEFAULT_MAX_RANK: usize = 3;
pub const DEFAULT_MAX_TUPLE: usize = 4;

const EMPTY_ATOMIC: AtomicId = AtomicId(0);

/// Hash-consing table for atomic and rank-q types.
///
/// The atomic type of `t + w` is keyed by the atomic type of `t` plus the facts relating `w` to `t`;
/// the rank-`q+1` type is keyed by the atomic type and the set of rank-`q` types of all
/// one-vertex extensions.
#[derive(Debug, Clone)]
pub struct TypeTable {
    pub max_rank: usize,
    pub max_tuple: usize,
    atomic: HashMap<(AtomicId, Vec<usize>), AtomicId>,
    types: HashMap<(usize, AtomicId, Vec<TypeId>), TypeId>,
}

impl Default for TypeTable {
    fn default() -> Self {
        TypeTable::new(DEFAULT_MAX_RANK, DEFAULT_MAX_TUPLE)
    }
}

impl TypeTable {
    pub fn new(max_rank: usize, max_tuple: usize) -> Self {
        TypeTable { max_rank, max_tuple, atomic: HashMap::new(), types: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    fn extend_atomic(&mut self, s: &ColoredGraph, base: AtomicId, tuple: &[usize], w: usize) -> AtomicId {
        let mut facts = Vec::with_capacity(tuple.len() + 1);
        facts.push(s.colors[w]);
        facts.extend(tuple.iter().map(|&t| {
            if t == w {
                2
            } else {
                usize::from(s.graph.has_edge(t, w))
            }
        }));
        let next = AtomicId(self.atomic.len() as u32 + 1);
        *self.atomic.entry((base, facts)).or_insert(next)
    }

    pub fn atomic_type(&mut self, s: &ColoredGraph, tuple: &[usize]) -> AtomicId {
        let mut id = EMPTY_ATOMIC;
        for i in 0..tuple.len() {
            id = self.extend_atomic(s, id, &tuple[..i], tuple[i]);
        }
        id
    }

    fn intern(&mut self, rank: usize, atomic: AtomicId, mut children: Vec<TypeId>) -> TypeId {
        children.sort_unstable();
        children.dedup();
        let next = TypeId(self.types.len() as u32);
        *self.types.entry((rank, atomic, children)).or_insert(next)
    }

    /// Rank-`q` type of `tuple` in `s`.
    pub fn rank_type(&mut self, s: &ColoredGraph, tuple: &[usize], q: usize) -> Result<TypeId, LogicError> {
        if q > self.max_rank {
            return Err(LogicError::CapExceeded { what: "rank", got: q, cap: self.max_rank });
        }
        if tuple.len() > self.max_tuple {
            return Err(LogicError::CapExceeded { what: "tuple length", got: tuple.len(), cap: self.max_tuple });
        }
        let atomic = self.atomic_type(s, tuple);
        let mut buf = tuple.to_vec();
        Ok(self.type_of(s, &mut buf, atomic, q))
    }

    fn type_of(&mut self, s: &ColoredGraph, tuple: &mut Vec<usize>, atomic: AtomicId, q: usize) -> TypeId {
        if q == 0 {
            return self.intern(0, atomic, vec![]);
        }
        let mut children = Vec::with_capacity(s.vertex_count());
        for w in s.graph.vertices() {
            let ext = self.extend_atomic(s, atomic, tuple, w);
            tuple.push(w);
            children.push(self.type_of(s, tuple, ext, q - 1));
            tuple.pop();
        }
        self.intern(q, atomic, children)
    }
}

/// Convenience wrapper around [`TypeTable::rank_type`].
pub fn rank_type(table: &mut TypeTable, s: &ColoredGraph, tuple: &[usize], q: usize) -> Result<TypeId, LogicError> {
    table.rank_type(s, tuple, q)
}

fn partial_iso(s1: &ColoredGraph, t1: &[usize], s2: &ColoredGraph, t2: &[usize]) -> bool {
    t1.len() == t2.len()
        && (0..t1.len()).all(|i| {
            s1.colors[t1[i]] == s2.colors[t2[i]]
                && (0..i).all(|j| {
                    (t1[i] == t1[j]) == (t2[i] == t2[j])
                        && s1.graph.has_edge(t1[i], t1[j]) == s2.graph.has_edge(t2[i], t2[j])
                })
        })
}

/// Whether Duplicator wins the `q`-round game starting from `(t1, t2)`.
pub fn ef_equivalent(
    s1: &ColoredGraph,
    t1: &[usize],
    s2: &ColoredGraph,
    t2: &[usize],
    q: usize,
) -> Result<bool, LogicError> {
    if q > DEFAULT_MAX_RANK {
        return Err(LogicError::CapExceeded { what: "rank", got: q, cap: DEFAULT_MAX_RANK });
    }
    if t1.len().max(t2.len()) > DEFAULT_MAX_TUPLE {
        let got = t1.len().max(t2.len());
        return Err(LogicError::CapExceeded { what: "tuple length", got, cap: DEFAULT_MAX_TUPLE });
    }
    Ok(duplicator_wins(s1, &mut t1.to_vec(), s2, &mut t2.to_vec(), q))
}

fn duplicator_wins(s1: &ColoredGraph, t1: &mut Vec<usize>, s2: &ColoredGraph, t2: &mut Vec<usize>, q: usize) -> bool {
    if !partial_iso(s1, t1, s2, t2) {
        return false;
    }
    if q == 0 {
        return true;
    }
    // Spoiler may move in either structure; Duplicator answers in the other.
    let answers = |a: &ColoredGraph, ta: &mut Vec<usize>, b: &ColoredGraph, tb: &mut Vec<usize>, swapped: bool| {
        a.graph.vertices().all(|pick| {
            ta.push(pick);
            let ok = b.graph.vertices().any(|reply| {
                tb.push(reply);
                let win = if swapped {
                    duplicator_wins(b, tb, a, ta, q - 1)
                } else {
                    duplicator_wins(a, ta, b, tb, q - 1)
                };
                tb.pop();
                win
            });
            ta.pop();
            ok
        })
    };
    answers(s1, t1, s2, t2, false) && answers(s2, t2, s1, t1, true)
}

/// A named formula known to be strongly local with the given radius.
#[derive(Debug, Clone)]
pub struct LibraryFormula {
    pub name: &'static str,
    pub formula: Formula,
    pub radius: usize,
}

/// Strongly local binary formulas over 2-colored graphs (colors 0 and 1) used by tests and the CLI.
pub fn strongly_local_library() -> Vec<LibraryFormula> {
    let e = |a, b| Formula::Edge(a, b);
    let neq = Formula::Eq(x(1), x(2)).not();
    let common = |extra: Option<Formula>| {
        let mut parts = vec![e(x(1), y(1)), e(y(1), x(2))];
        parts.extend(extra);
        Formula::exists(1, Formula::And(parts))
    };
    let same_color = Formula::Or(vec![
        Formula::And(vec![Formula::Color(0, x(1)), Formula::Color(0, x(2))]),
        Formula::And(vec![Formula::Color(1, x(1)), Formula::Color(1, x(2))]),
    ]);
    vec![
        LibraryFormula { name: "edge", formula: e(x(1), x(2)), radius: 1 },
        LibraryFormula { name: "never", formula: Formula::False, radius: 1 },
        LibraryFormula {
            name: "edge_same_color",
            formula: Formula::And(vec![e(x(1), x(2)), same_color]),
            radius: 1,
        },
        LibraryFormula {
            name: "edge_in_triangle",
            formula: Formula::And(vec![e(x(1), x(2)), common(None)]),
            radius: 1,
        },
        LibraryFormula {
            name: "distance_at_most_two",
            formula: Formula::And(vec![neq.clone(), Formula::Or(vec![e(x(1), x(2)), common(None)])]),
            radius: 2,
        },
        LibraryFormula {
            name: "black_common_neighbour",
            formula: Formula::And(vec![neq.clone(), common(Some(Formula::Color(1, y(1))))]),
            radius: 2,
        },
        LibraryFormula {
            name: "edge_with_white_closed_neighbour",
            formula: Formula::And(vec![
                e(x(1), x(2)),
                Formula::Or(vec![
                    Formula::exists(
                        1,
                        Formula::And(vec![
                            e(x(1), y(1)),
                            Formula::forall(2, e(y(1), y(2)).implies(Formula::Color(0, y(2)))),
                        ]),
                    ),
                    Formula::exists(
                        1,
                        Formula::And(vec![
                            e(x(2), y(1)),
                            Formula::forall(2, e(y(1), y(2)).implies(Formula::Color(0, y(2)))),
                        ]),
                    ),
                ]),
            ]),
            radius: 2,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{power, Generator};

    fn plain(g: Graph) -> ColoredGraph {
        ColoredGraph::uncolored(g)
    }

    fn path(n: usize) -> ColoredGraph {
        plain(Generator::Path(n).build().unwrap())
    }

    fn dist2() -> Formula {
        Formula::Or(vec![
            Formula::Edge(x(1), x(2)),
            Formula::exists(1, Formula::And(vec![Formula::Edge(x(1), y(1)), Formula::Edge(y(1), x(2))])),
        ])
    }

    #[test]
    fn eval_examples() {
        let k2 = path(2);
        assert!(eval_formula(&k2, &Formula::Edge(x(1), x(2)), &Assignment::from_tuple(&[0, 1])).unwrap());
        let lone = path(1);
        let f = Formula::exists(1, Formula::Edge(x(1), y(1)));
        assert!(!eval_formula(&lone, &f, &Assignment::from_tuple(&[0])).unwrap());
        let p4 = path(4);
        assert!(!eval_formula(&p4, &dist2(), &Assignment::from_tuple(&[0, 3])).unwrap());
        assert!(eval_formula(&p4, &dist2(), &Assignment::from_tuple(&[0, 2])).unwrap());
        assert_eq!(
            eval_formula(&p4, &dist2(), &Assignment::from_tuple(&[0])),
            Err(LogicError::Unassigned(x(2)))
        );
    }

    #[test]
    fn parse_round_trip() {
        let text = "(and (E x1 x2) (not (= x1 x2)) (exists y1 (or (color 1 y1) (forall y2 (implies (E y1 y2) false)))))";
        let f = parse_formula(text).unwrap();
        assert_eq!(f.to_string(), text);
        assert_eq!(f.quantifier_rank(), 2);
        assert_eq!(f.free_vars(), BTreeSet::from([x(1), x(2)]));
        assert!(parse_formula("(E x1)").is_err());
        assert!(parse_formula("(exists x1 true)").is_err());
        assert!(parse_formula("(E x1 x2) true").is_err());
    }

    #[test]
    fn interpret_examples() {
        let p4 = path(4);
        assert_eq!(interpret(&p4, &Formula::Edge(x(1), x(2))).unwrap(), p4.graph);
        assert_eq!(
            interpret(&p4, &dist2()).unwrap(),
            power(&p4.graph, 2, false).unwrap()
        );
        let two = ColoredGraph::new(Graph::new(4), vec![0, 1, 0, 1]);
        let same = Formula::And(vec![
            Formula::Eq(x(1), x(2)).not(),
            Formula::Or(vec![
                Formula::And(vec![Formula::Color(0, x(1)), Formula::Color(0, x(2))]),
                Formula::And(vec![Formula::Color(1, x(1)), Formula::Color(1, x(2))]),
            ]),
        ]);
        let g = interpret(&two, &same).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2), (1, 3)]);
        let asym = Formula::Color(1, x(1));
        assert!(matches!(interpret(&two, &asym), Err(LogicError::Asymmetric(..))));
        assert!(matches!(interpret(&two, &Formula::Edge(x(1), x(3))), Err(LogicError::BadFreeVariable(_))));
    }

    #[test]
    fn locality_examples() {
        let g = plain(Generator::Grid2d(2, 3).build().unwrap());
        assert_eq!(check_strong_locality(&g, &Formula::Edge(x(1), x(2)), 2, 1).unwrap(), Locality::Holds);
        let d2 = Formula::And(vec![Formula::Eq(x(1), x(2)).not(), dist2()]);
        assert_eq!(check_strong_locality(&path(6), &d2, 2, 2).unwrap(), Locality::Holds);
        let non_edge = Formula::Edge(x(1), x(2)).not();
        assert!(matches!(
            check_strong_locality(&path(4), &non_edge, 2, 1).unwrap(),
            Locality::TooFar { .. }
        ));
    }

    #[test]
    fn library_is_local_on_a_sample() {
        let g = Generator::Grid2d(3, 3).build().unwrap();
        let colored = ColoredGraph::new(g, (0..9).map(|v| v % 2).collect());
        for entry in strongly_local_library() {
            assert!(entry.formula.quantifier_rank() <= 2, "{}", entry.name);
            assert_eq!(
                check_strong_locality(&colored, &entry.formula, 2, entry.radius).unwrap(),
                Locality::Holds,
                "{}",
                entry.name
            );
            interpret(&colored, &entry.formula).unwrap();
        }
    }

    #[test]
    fn type_examples() {
        let p3 = path(3);
        let mut table = TypeTable::default();
        for q in 0..=3 {
            assert_eq!(table.rank_type(&p3, &[0], q).unwrap(), table.rank_type(&p3, &[2], q).unwrap());
        }
        assert_eq!(table.rank_type(&p3, &[0], 0).unwrap(), table.rank_type(&p3, &[1], 0).unwrap());
        assert_ne!(table.rank_type(&p3, &[0], 1).unwrap(), table.rank_type(&p3, &[1], 1).unwrap());
        assert!(table.rank_type(&p3, &[0], 4).is_err());
        assert!(table.rank_type(&p3, &[0, 1, 2, 0, 1], 1).is_err());
    }

    #[test]
    fn ef_examples() {
        let p3 = path(3);
        assert!(ef_equivalent(&p3, &[1], &p3, &[1], 3).unwrap());
        assert!(!ef_equivalent(&p3, &[0], &p3, &[1], 1).unwrap());
        assert!(ef_equivalent(&p3, &[0], &p3, &[1], 0).unwrap());
    }
}
