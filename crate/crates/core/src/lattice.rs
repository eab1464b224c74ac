//! Finite complete lattices given by tables, and the real unit interval.
//!
//! Every algorithm in this crate is written against the [`Lattice`] trait so
//! the same transform code runs on a Hasse-diagram lattice and on `[0, 1]`.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while building or querying a lattice.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice has no elements")]
    Empty,
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element `{0}`")]
    UnknownLabel(String),
    #[error("order relation contains a cycle through `{0}` and `{1}`")]
    CyclicOrder(String, String),
    #[error("`{a}` and `{b}` have no unique {bound}")]
    NotALattice {
        a: String,
        b: String,
        bound: &'static str,
    },
    #[error("the {0} of an empty family is undefined in strict mode")]
    EmptyFamily(&'static str),
}

/// What `join_of` / `meet_of` do with an empty family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmptyFamily {
    /// Reject with [`LatticeError::EmptyFamily`].
    #[default]
    Strict,
    /// `join(∅) = bottom`, `meet(∅) = top`.
    Convention,
}

/// A complete lattice `(L, ∨, ∧, 0, 1)`.
///
/// `points` is the set used by checkers: all of `L` for finite lattices, a
/// uniform grid for the unit interval (`is_exhaustive` tells which).
pub trait Lattice: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Value: Copy + Debug + PartialEq + Send + Sync;

    fn bottom(&self) -> Self::Value;
    fn top(&self) -> Self::Value;
    fn join(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn meet(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn leq(&self, a: Self::Value, b: Self::Value) -> bool;

    /// Equality up to the carrier's tolerance.
    fn same(&self, a: Self::Value, b: Self::Value) -> bool {
        self.leq(a, b) && self.leq(b, a)
    }

    fn points(&self) -> Vec<Self::Value>;
    fn is_exhaustive(&self) -> bool;
    /// Index of `v` in `points()`, for finite carriers.
    fn index_of(&self, v: Self::Value) -> Option<usize>;
    fn is_chain(&self) -> bool;

    fn label(&self, v: Self::Value) -> String;
    fn parse(&self, s: &str) -> Option<Self::Value>;

    /// Numeric view, only for the unit interval.
    fn as_real(&self, _v: Self::Value) -> Option<f64> {
        None
    }
    fn from_real(&self, _x: f64) -> Option<Self::Value> {
        None
    }

    fn is_bottom(&self, v: Self::Value) -> bool {
        self.same(v, self.bottom())
    }
    fn is_top(&self, v: Self::Value) -> bool {
        self.same(v, self.top())
    }

    /// Join of a family; `None` when the family is empty.
    fn join_all<I: IntoIterator<Item = Self::Value>>(&self, it: I) -> Option<Self::Value> {
        it.into_iter().reduce(|a, b| self.join(a, b))
    }

    fn meet_all<I: IntoIterator<Item = Self::Value>>(&self, it: I) -> Option<Self::Value> {
        it.into_iter().reduce(|a, b| self.meet(a, b))
    }

    fn join_of(&self, family: &[Self::Value], mode: EmptyFamily) -> Result<Self::Value, LatticeError> {
        match (self.join_all(family.iter().copied()), mode) {
            (Some(v), _) => Ok(v),
            (None, EmptyFamily::Convention) => Ok(self.bottom()),
            (None, EmptyFamily::Strict) => Err(LatticeError::EmptyFamily("join")),
        }
    }

    fn meet_of(&self, family: &[Self::Value], mode: EmptyFamily) -> Result<Self::Value, LatticeError> {
        match (self.meet_all(family.iter().copied()), mode) {
            (Some(v), _) => Ok(v),
            (None, EmptyFamily::Convention) => Ok(self.top()),
            (None, EmptyFamily::Strict) => Err(LatticeError::EmptyFamily("meet")),
        }
    }

    fn leq_all(&self, a: &[Self::Value], b: &[Self::Value]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| self.leq(x, y))
    }

    fn same_all(&self, a: &[Self::Value], b: &[Self::Value]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| self.same(x, y))
    }

    fn labels_of(&self, vs: &[Self::Value]) -> String {
        let parts: Vec<String> = vs.iter().map(|&v| self.label(v)).collect();
        format!("({})", parts.join(","))
    }
}

/// Handle of an element of a [`TableLattice`]: its position in the label list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u32);

impl Elem {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite lattice stored as an order matrix plus join and meet tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableLattice {
    labels: Vec<String>,
    leq: Vec<bool>,
    join: Vec<Elem>,
    meet: Vec<Elem>,
    bottom: Elem,
    top: Elem,
}

impl TableLattice {
    /// Builds the lattice whose order is the reflexive-transitive closure of
    /// `covers` (pairs `(lower, upper)`).
    pub fn build<S: AsRef<str>>(labels: &[S], covers: &[(S, S)]) -> Result<Self, LatticeError> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let n = labels.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(LatticeError::DuplicateLabel(l.clone()));
            }
        }
        let find = |s: &str| {
            labels
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| LatticeError::UnknownLabel(s.to_string()))
        };

        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (lo, hi) in covers {
            let (a, b) = (find(lo.as_ref())?, find(hi.as_ref())?);
            if a == b {
                return Err(LatticeError::CyclicOrder(labels[a].clone(), labels[b].clone()));
            }
            leq[a * n + b] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(LatticeError::CyclicOrder(labels[i].clone(), labels[j].clone()));
                }
            }
        }

        let bound = |i: usize, j: usize, upper: bool| -> Option<usize> {
            let is_bound = |k: usize| {
                if upper {
                    leq[i * n + k] && leq[j * n + k]
                } else {
                    leq[k * n + i] && leq[k * n + j]
                }
            };
            let bounds: Vec<usize> = (0..n).filter(|&k| is_bound(k)).collect();
            bounds.iter().copied().find(|&k| {
                bounds
                    .iter()
                    .all(|&m| if upper { leq[k * n + m] } else { leq[m * n + k] })
            })
        };

        let mut join = vec![Elem(0); n * n];
        let mut meet = vec![Elem(0); n * n];
        for i in 0..n {
            for j in 0..n {
                let lub = bound(i, j, true).ok_or_else(|| LatticeError::NotALattice {
                    a: labels[i].clone(),
                    b: labels[j].clone(),
                    bound: "least upper bound",
                })?;
                let glb = bound(i, j, false).ok_or_else(|| LatticeError::NotALattice {
                    a: labels[i].clone(),
                    b: labels[j].clone(),
                    bound: "greatest lower bound",
                })?;
                join[i * n + j] = Elem(lub as u32);
                meet[i * n + j] = Elem(glb as u32);
            }
        }

        // Pairwise bounds give every finite nonempty subset a bound; the
        // extremes are the bounds of the whole carrier.
        let top = (1..n).fold(0, |acc, k| join[acc * n + k].index());
        let bottom = (1..n).fold(0, |acc, k| meet[acc * n + k].index());
        debug_assert!((0..n).all(|e| leq[bottom * n + e] && leq[e * n + top]));

        Ok(TableLattice {
            labels,
            leq,
            join,
            meet,
            bottom: Elem(bottom as u32),
            top: Elem(top as u32),
        })
    }

    /// The chain `0 < 1 < … < n-1`.
    pub fn chain(n: usize) -> Self {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let covers: Vec<(String, String)> = (1..n).map(|i| (labels[i - 1].clone(), labels[i].clone())).collect();
        Self::build(&labels, &covers).expect("a chain is a lattice")
    }

    /// The eight-element lattice `0 < p < {q, r}`, `r < t`, `{q, r} < s`,
    /// `{s, t} < u < 1`.
    pub fn figure1() -> Self {
        let labels = ["0", "p", "q", "r", "s", "t", "u", "1"];
        let covers = [
            ("0", "p"),
            ("p", "q"),
            ("p", "r"),
            ("q", "s"),
            ("r", "s"),
            ("r", "t"),
            ("s", "u"),
            ("t", "u"),
            ("u", "1"),
        ];
        Self::build(&labels, &covers).expect("figure 1 is a lattice")
    }

    /// Cartesian product with componentwise order; labels are `a|b`.
    pub fn product(a: &TableLattice, b: &TableLattice) -> Self {
        let mut labels = Vec::with_capacity(a.len() * b.len());
        for la in &a.labels {
            for lb in &b.labels {
                labels.push(format!("{la}|{lb}"));
            }
        }
        let mut covers = Vec::new();
        for (x1, x2) in a.covers() {
            for lb in &b.labels {
                covers.push((format!("{}|{lb}", a.labels[x1.index()]), format!("{}|{lb}", a.labels[x2.index()])));
            }
        }
        for (y1, y2) in b.covers() {
            for la in &a.labels {
                covers.push((format!("{la}|{}", b.labels[y1.index()]), format!("{la}|{}", b.labels[y2.index()])));
            }
        }
        Self::build(&labels, &covers).expect("a product of lattices is a lattice")
    }

    /// The order dual: same elements, reversed order.
    pub fn dual(&self) -> Result<Self, LatticeError> {
        let covers: Vec<(String, String)> = self
            .covers()
            .into_iter()
            .map(|(a, b)| (self.labels[b.index()].clone(), self.labels[a.index()].clone()))
            .collect();
        Self::build(&self.labels, &covers)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elem(&self, label: &str) -> Option<Elem> {
        self.labels.iter().position(|l| l == label).map(|i| Elem(i as u32))
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.labels.len() as u32).map(Elem)
    }

    /// Covering pairs `(a, b)` with `a < b` and nothing strictly between.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let n = self.len();
        let lt = |i: usize, j: usize| i != j && self.leq[i * n + j];
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) && !(0..n).any(|k| lt(i, k) && lt(k, j)) {
                    out.push((Elem(i as u32), Elem(j as u32)));
                }
            }
        }
        out
    }

    pub fn join_table(&self) -> &[Elem] {
        &self.join
    }

    pub fn meet_table(&self) -> &[Elem] {
        &self.meet
    }
}

impl Lattice for TableLattice {
    type Value = Elem;

    fn bottom(&self) -> Elem {
        self.bottom
    }
    fn top(&self) -> Elem {
        self.top
    }
    #[inline]
    fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a.index() * self.labels.len() + b.index()]
    }
    #[inline]
    fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a.index() * self.labels.len() + b.index()]
    }
    #[inline]
    fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a.index() * self.labels.len() + b.index()]
    }
    #[inline]
    fn same(&self, a: Elem, b: Elem) -> bool {
        a == b
    }
    fn points(&self) -> Vec<Elem> {
        self.elements().collect()
    }
    fn is_exhaustive(&self) -> bool {
        true
    }
    #[inline]
    fn index_of(&self, v: Elem) -> Option<usize> {
        (v.index() < self.labels.len()).then_some(v.index())
    }
    fn is_chain(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.leq[i * n + j] || self.leq[j * n + i]))
    }
    fn label(&self, v: Elem) -> String {
        self.labels[v.index()].clone()
    }
    fn parse(&self, s: &str) -> Option<Elem> {
        self.elem(s)
    }
}

/// The real unit interval with max/min as join/meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitInterval {
    /// Comparison tolerance.
    pub epsilon: f64,
    /// Number of grid points used by sampled checks.
    pub grid: usize,
}

impl Default for UnitInterval {
    fn default() -> Self {
        UnitInterval { epsilon: 1e-9, grid: 101 }
    }
}

impl UnitInterval {
    pub fn with_grid(grid: usize) -> Self {
        UnitInterval { grid: grid.max(2), ..Self::default() }
    }
}

impl Lattice for UnitInterval {
    type Value = f64;

    fn bottom(&self) -> f64 {
        0.0
    }
    fn top(&self) -> f64 {
        1.0
    }
    #[inline]
    fn join(&self, a: f64, b: f64) -> f64 {
        a.max(b)
    }
    #[inline]
    fn meet(&self, a: f64, b: f64) -> f64 {
        a.min(b)
    }
    #[inline]
    fn leq(&self, a: f64, b: f64) -> bool {
        a <= b + self.epsilon
    }
    #[inline]
    fn same(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.epsilon
    }
    fn points(&self) -> Vec<f64> {
        let last = (self.grid - 1) as f64;
        (0..self.grid).map(|i| i as f64 / last).collect()
    }
    fn is_exhaustive(&self) -> bool {
        false
    }
    fn index_of(&self, _v: f64) -> Option<usize> {
        None
    }
    fn is_chain(&self) -> bool {
        true
    }
    fn label(&self, v: f64) -> String {
        format!("{v}")
    }
    fn parse(&self, s: &str) -> Option<f64> {
        let x: f64 = s.trim().parse().ok()?;
        (x >= -self.epsilon && x <= 1.0 + self.epsilon).then(|| x.clamp(0.0, 1.0))
    }
    fn as_real(&self, v: f64) -> Option<f64> {
        Some(v)
    }
    fn from_real(&self, x: f64) -> Option<f64> {
        (x >= -self.epsilon && x <= 1.0 + self.epsilon).then(|| x.clamp(0.0, 1.0))
    }
}
