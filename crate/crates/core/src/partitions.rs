//! Finite universes, L-fuzzy sets and L-fuzzy partitions.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lattice::Lattice;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("universe has no points")]
    EmptyUniverse,
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("partition has no members")]
    NoMembers,
    #[error("duplicate member label `{0}`")]
    DuplicateMember(String),
    #[error("member `{member}` has {found} values for {expected} points")]
    LengthMismatch {
        member: String,
        expected: usize,
        found: usize,
    },
    #[error("member `{0}` is not normal (empty core)")]
    NotNormal(String),
    #[error("point `{point}` lies in the cores of both `{first}` and `{second}`")]
    CoresOverlap {
        point: String,
        first: String,
        second: String,
    },
    #[error("point `{0}` lies in no core")]
    CoresDontCover(String),
    #[error("blocks do not partition the universe: {0}")]
    BlocksInvalid(String),
    #[error("decay profiles need the unit interval")]
    NeedsUnitInterval,
}

/// An ordered, nonempty set of distinct point labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    points: Vec<String>,
}

impl Universe {
    pub fn new<S: Into<String>>(points: impl IntoIterator<Item = S>) -> Result<Self, PartitionError> {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        if points.is_empty() {
            return Err(PartitionError::EmptyUniverse);
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(PartitionError::DuplicatePoint(p.clone()));
            }
        }
        Ok(Universe { points })
    }

    /// `x1, …, xn`.
    pub fn indexed(n: usize) -> Self {
        Universe::new((1..=n).map(|i| format!("x{i}"))).expect("n > 0 and labels distinct")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }
}

/// `1_S`: top on `subset`, bottom elsewhere.
pub fn characteristic_set<L: Lattice, S: AsRef<str>>(l: &L, universe: &Universe, subset: &[S]) -> Result<Vec<L::Value>, PartitionError> {
    let mut f = vec![l.bottom(); universe.len()];
    for s in subset {
        let i = universe
            .index_of(s.as_ref())
            .ok_or_else(|| PartitionError::UnknownPoint(s.as_ref().to_string()))?;
        f[i] = l.top();
    }
    Ok(f)
}

/// `1_{x}` by point index.
pub fn singleton<L: Lattice>(l: &L, n: usize, x: usize) -> Vec<L::Value> {
    let mut f = vec![l.bottom(); n];
    f[x] = l.top();
    f
}

pub fn constant<L: Lattice>(n: usize, u: L::Value) -> Vec<L::Value> {
    vec![u; n]
}

/// Indices where `f` is top.
pub fn core<L: Lattice>(l: &L, f: &[L::Value]) -> Vec<usize> {
    (0..f.len()).filter(|&i| l.is_top(f[i])).collect()
}

/// `(a,b,c)` rendering of a fuzzy set.
pub fn format_set<L: Lattice>(l: &L, f: &[L::Value]) -> String {
    l.labels_of(f)
}

/// Inverse of [`format_set`].
pub fn parse_set<L: Lattice>(l: &L, s: &str) -> Option<Vec<L::Value>> {
    let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    if inner.is_empty() {
        return Some(vec![]);
    }
    inner.split(',').map(|t| l.parse(t.trim())).collect()
}

/// Fuzzy sets produced by [`enumerate_fuzzy_sets`].
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration<V> {
    pub sets: Vec<V>,
    /// True when `sets` is all of `L^X`.
    pub exhaustive: bool,
}

/// All of `L^X` in lexicographic order (first point most significant) when
/// `|L|^|X| ≤ budget`, otherwise `budget` sets drawn uniformly with a
/// ChaCha8 stream seeded by `seed`. On the unit interval `L` is the grid.
pub fn enumerate_fuzzy_sets<L: Lattice>(l: &L, points: usize, budget: usize, seed: u64) -> Enumeration<Vec<L::Value>> {
    let pts = l.points();
    let m = pts.len();
    let budget = budget.max(1);
    let total = u32::try_from(points).ok().and_then(|p| m.checked_pow(p));
    match total {
        Some(total) if total <= budget => {
            let sets = (0..total)
                .map(|mut k| {
                    let mut f = vec![pts[0]; points];
                    for slot in (0..points).rev() {
                        f[slot] = pts[k % m];
                        k /= m;
                    }
                    f
                })
                .collect();
            Enumeration {
                sets,
                exhaustive: l.is_exhaustive(),
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sets = (0..budget)
                .map(|_| (0..points).map(|_| pts[rng.random_range(0..m)]).collect())
                .collect();
            Enumeration { sets, exhaustive: false }
        }
    }
}

/// Normal L-fuzzy sets whose cores partition the universe.
#[derive(Debug, Clone)]
pub struct LFuzzyPartition<L: Lattice> {
    carrier: Arc<L>,
    universe: Universe,
    labels: Vec<String>,
    members: Vec<Vec<L::Value>>,
    cores: Vec<Vec<usize>>,
    index_map: Vec<usize>,
}

impl<L: Lattice> PartialEq for LFuzzyPartition<L> {
    fn eq(&self, other: &Self) -> bool {
        *self.carrier == *other.carrier
            && self.universe == other.universe
            && self.labels == other.labels
            && self
                .members
                .iter()
                .zip(&other.members)
                .all(|(a, b)| self.carrier.same_all(a, b))
    }
}

/// Checks normality and the core condition, computing cores and `k`.
pub fn validate_partition<L: Lattice, S: Into<String>>(
    carrier: Arc<L>,
    universe: Universe,
    members: Vec<(S, Vec<L::Value>)>,
) -> Result<LFuzzyPartition<L>, PartitionError> {
    if members.is_empty() {
        return Err(PartitionError::NoMembers);
    }
    let n = universe.len();
    let (labels, members): (Vec<String>, Vec<Vec<L::Value>>) = members.into_iter().map(|(s, m)| (s.into(), m)).unzip();
    for (i, label) in labels.iter().enumerate() {
        if labels[..i].contains(label) {
            return Err(PartitionError::DuplicateMember(label.clone()));
        }
    }
    for (label, m) in labels.iter().zip(&members) {
        if m.len() != n {
            return Err(PartitionError::LengthMismatch {
                member: label.clone(),
                expected: n,
                found: m.len(),
            });
        }
    }
    let cores: Vec<Vec<usize>> = members.iter().map(|m| core(&*carrier, m)).collect();
    if let Some(j) = cores.iter().position(Vec::is_empty) {
        return Err(PartitionError::NotNormal(labels[j].clone()));
    }
    let mut index_map = vec![usize::MAX; n];
    for x in 0..n {
        for (j, c) in cores.iter().enumerate() {
            if c.contains(&x) {
                if index_map[x] != usize::MAX {
                    return Err(PartitionError::CoresOverlap {
                        point: universe.points[x].clone(),
                        first: labels[index_map[x]].clone(),
                        second: labels[j].clone(),
                    });
                }
                index_map[x] = j;
            }
        }
        if index_map[x] == usize::MAX {
            return Err(PartitionError::CoresDontCover(universe.points[x].clone()));
        }
    }
    Ok(LFuzzyPartition {
        carrier,
        universe,
        labels,
        members,
        cores,
        index_map,
    })
}

impl<L: Lattice> LFuzzyPartition<L> {
    pub fn carrier(&self) -> &Arc<L> {
        &self.carrier
    }

    pub fn lattice(&self) -> &L {
        &self.carrier
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn members(&self) -> &[Vec<L::Value>] {
        &self.members
    }

    pub fn cores(&self) -> &[Vec<usize>] {
        &self.cores
    }

    /// `k(x)`: the member whose core contains `x`.
    pub fn index_map(&self) -> &[usize] {
        &self.index_map
    }

    /// `|J|`
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `|X|`
    pub fn points(&self) -> usize {
        self.universe.len()
    }

    #[inline]
    pub fn value(&self, j: usize, x: usize) -> L::Value {
        self.members[j][x]
    }

    pub fn on_carrier(&self, other: &L) -> bool {
        std::ptr::eq(&*self.carrier, other) || *self.carrier == *other
    }

    /// The same partition with `A_j(x)` replaced, revalidated.
    pub fn with_value(&self, j: usize, x: usize, v: L::Value) -> Result<Self, PartitionError> {
        let mut members = self.members.clone();
        members[j][x] = v;
        validate_partition(
            self.carrier.clone(),
            self.universe.clone(),
            self.labels.iter().cloned().zip(members).collect(),
        )
    }

    /// Revalidates the members, which must reproduce `self`.
    pub fn revalidate(&self) -> Result<Self, PartitionError> {
        validate_partition(
            self.carrier.clone(),
            self.universe.clone(),
            self.labels.iter().cloned().zip(self.members.iter().cloned()).collect(),
        )
    }
}

fn check_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Vec<usize>, PartitionError> {
    let mut owner = vec![usize::MAX; n];
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(PartitionError::BlocksInvalid(format!("block {} is empty", b + 1)));
        }
        for &x in block {
            if x >= n {
                return Err(PartitionError::BlocksInvalid(format!("point index {x} out of range")));
            }
            if owner[x] != usize::MAX {
                return Err(PartitionError::BlocksInvalid(format!("point index {x} in two blocks")));
            }
            owner[x] = b;
        }
    }
    if let Some(x) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(PartitionError::BlocksInvalid(format!("point index {x} in no block")));
    }
    Ok(owner)
}

/// `A_j` is top on block `j` and `spread` elsewhere. Members are `A1, A2, …`.
pub fn block_partition<L: Lattice>(
    carrier: Arc<L>,
    universe: Universe,
    blocks: &[Vec<usize>],
    spread: L::Value,
) -> Result<LFuzzyPartition<L>, PartitionError> {
    let owner = check_blocks(universe.len(), blocks)?;
    let top = carrier.top();
    let members = (0..blocks.len())
        .map(|b| {
            let m = owner.iter().map(|&o| if o == b { top } else { spread }).collect();
            (format!("A{}", b + 1), m)
        })
        .collect();
    validate_partition(carrier, universe, members)
}

/// Contiguous blocks of equal length; the remainder goes to the last block.
pub fn equal_blocks(n: usize, count: usize) -> Result<Vec<Vec<usize>>, PartitionError> {
    if count == 0 || count > n {
        return Err(PartitionError::BlocksInvalid(format!("{count} blocks for {n} points")));
    }
    let len = n / count;
    Ok((0..count)
        .map(|b| {
            let end = if b + 1 == count { n } else { (b + 1) * len };
            (b * len..end).collect()
        })
        .collect())
}

fn decay<L: Lattice>(l: &L, d: usize, width: f64) -> Result<L::Value, PartitionError> {
    let v = if d == 0 { 1.0 } else { (1.0 - d as f64 / width).max(0.0) };
    l.from_real(v).ok_or(PartitionError::NeedsUnitInterval)
}

/// On the unit interval: `A_j(x) = max(0, 1 - d/w)` where `d` is the index
/// distance from `x` to block `j`; in-block values are 1.
pub fn decay_partition<L: Lattice>(
    carrier: Arc<L>,
    universe: Universe,
    blocks: &[Vec<usize>],
    width: f64,
) -> Result<LFuzzyPartition<L>, PartitionError> {
    check_blocks(universe.len(), blocks)?;
    if width <= 0.0 || width.is_nan() {
        return Err(PartitionError::BlocksInvalid(format!("decay width {width}")));
    }
    let mut members = Vec::with_capacity(blocks.len());
    for (b, block) in blocks.iter().enumerate() {
        let m = (0..universe.len())
            .map(|x| {
                let d = block.iter().map(|&k| k.abs_diff(x)).min().expect("nonempty block");
                decay(&*carrier, d, width)
            })
            .collect::<Result<Vec<_>, _>>()?;
        members.push((format!("A{}", b + 1), m));
    }
    validate_partition(carrier, universe, members)
}

/// Row-major image grid cut into `tile × tile` squares (edge tiles absorb the
/// remainder). Decay uses the Chebyshev distance to the tile.
pub fn tile_partition<L: Lattice>(
    carrier: Arc<L>,
    width: usize,
    height: usize,
    tile: usize,
    decay_width: f64,
) -> Result<LFuzzyPartition<L>, PartitionError> {
    if tile == 0 || width == 0 || height == 0 {
        return Err(PartitionError::BlocksInvalid("zero-sized image or tile".into()));
    }
    if decay_width <= 0.0 || decay_width.is_nan() {
        return Err(PartitionError::BlocksInvalid(format!("decay width {decay_width}")));
    }
    let cols = equal_blocks(width, (width / tile).max(1))?;
    let rows = equal_blocks(height, (height / tile).max(1))?;
    let span = |r: &Vec<usize>, i: usize| {
        let (lo, hi) = (r[0], *r.last().expect("nonempty"));
        if i < lo {
            lo - i
        } else {
            i.saturating_sub(hi)
        }
    };
    let universe = Universe::new((0..width * height).map(|i| format!("p{}_{}", i / width, i % width)))?;
    let mut members = Vec::new();
    for (ri, rr) in rows.iter().enumerate() {
        for (ci, cc) in cols.iter().enumerate() {
            let m = (0..width * height)
                .map(|i| {
                    let d = span(rr, i / width).max(span(cc, i % width));
                    decay(&*carrier, d, decay_width)
                })
                .collect::<Result<Vec<_>, _>>()?;
            members.push((format!("A{}_{}", ri + 1, ci + 1), m));
        }
    }
    validate_partition(carrier, universe, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Elem, TableLattice, UnitInterval};

    fn fig1() -> Arc<TableLattice> {
        Arc::new(TableLattice::figure1())
    }

    fn vals(l: &TableLattice, s: &str) -> Vec<Elem> {
        s.split(',').map(|x| l.elem(x).unwrap()).collect()
    }

    #[test]
    fn characteristic_sets() {
        let l = fig1();
        let x = Universe::indexed(3);
        assert_eq!(characteristic_set(&*l, &x, &["x1"]).unwrap(), vals(&l, "1,0,0"));
        assert_eq!(characteristic_set(&*l, &x, &["x1", "x2", "x3"]).unwrap(), vals(&l, "1,1,1"));
        let s = characteristic_set(&*l, &x, &["x2", "x3"]).unwrap();
        assert_eq!(core(&*l, &s), vec![1, 2]);
        assert_eq!(
            characteristic_set(&*l, &x, &["x9"]).unwrap_err(),
            PartitionError::UnknownPoint("x9".into())
        );
    }

    #[test]
    fn example_partition() {
        let l = fig1();
        let p = validate_partition(
            l.clone(),
            Universe::indexed(3),
            vec![("A1", vals(&l, "1,p,q")), ("A2", vals(&l, "s,1,u")), ("A3", vals(&l, "s,p,1"))],
        )
        .unwrap();
        assert_eq!(p.cores(), &[vec![0], vec![1], vec![2]]);
        assert_eq!(p.index_map(), &[0, 1, 2]);
        assert_eq!(p.revalidate().unwrap(), p);
    }

    #[test]
    fn partition_errors() {
        let l = fig1();
        let x = Universe::indexed(3);
        let err = validate_partition(l.clone(), x.clone(), vec![("A1", vals(&l, "1,1,q")), ("A2", vals(&l, "s,1,1"))]).unwrap_err();
        assert_eq!(
            err,
            PartitionError::CoresOverlap {
                point: "x2".into(),
                first: "A1".into(),
                second: "A2".into()
            }
        );
        let err = validate_partition(l.clone(), x.clone(), vec![("A1", vals(&l, "1,p,q")), ("A2", vals(&l, "s,p,q"))]).unwrap_err();
        assert_eq!(err, PartitionError::NotNormal("A2".into()));
        let err = validate_partition(l.clone(), x.clone(), vec![("A1", vals(&l, "1,p,q"))]).unwrap_err();
        assert_eq!(err, PartitionError::CoresDontCover("x2".into()));
        let one = validate_partition(l.clone(), x.clone(), vec![("A1", vals(&l, "1,1,1"))]).unwrap();
        assert_eq!(one.len(), 1);
        let none: Vec<(&str, Vec<Elem>)> = vec![];
        assert_eq!(validate_partition(l, x, none).unwrap_err(), PartitionError::NoMembers);
    }

    #[test]
    fn blocks() {
        let l = fig1();
        let x = Universe::indexed(3);
        let crisp = block_partition(l.clone(), x.clone(), &[vec![0], vec![1], vec![2]], l.bottom()).unwrap();
        assert_eq!(crisp.members()[1], vals(&l, "0,1,0"));
        let p = block_partition(l.clone(), x.clone(), &[vec![0, 1], vec![2]], l.elem("p").unwrap()).unwrap();
        assert_eq!(p.members(), &[vals(&l, "1,1,p"), vals(&l, "p,p,1")]);
        assert!(matches!(
            block_partition(l.clone(), x, &[vec![0], vec![2]], l.bottom()),
            Err(PartitionError::BlocksInvalid(_))
        ));
    }

    #[test]
    fn equal_blocks_and_decay() {
        assert_eq!(equal_blocks(10, 3).unwrap(), vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8, 9]]);
        assert!(equal_blocks(3, 4).is_err());
        let u = Arc::new(UnitInterval::default());
        let p = decay_partition(u.clone(), Universe::indexed(64), &equal_blocks(64, 4).unwrap(), 16.0).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.value(0, 16), 1.0 - 1.0 / 16.0);
        assert_eq!(p.value(0, 40), 0.0);
        let l = fig1();
        assert_eq!(
            decay_partition(l, Universe::indexed(4), &[vec![0, 1], vec![2, 3]], 2.0).unwrap_err(),
            PartitionError::NeedsUnitInterval
        );
    }

    #[test]
    fn enumeration() {
        let c2 = TableLattice::chain(2);
        let e = enumerate_fuzzy_sets(&c2, 2, 100, 0);
        assert!(e.exhaustive);
        let want: Vec<Vec<Elem>> = [[0, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|p| p.iter().map(|&i| Elem(i)).collect())
            .collect();
        assert_eq!(e.sets, want);
        let l = TableLattice::figure1();
        assert_eq!(enumerate_fuzzy_sets(&l, 3, 1000, 0).sets.len(), 512);
        let a = enumerate_fuzzy_sets(&l, 6, 500, 7);
        assert!(!a.exhaustive);
        assert_eq!(a.sets.len(), 500);
        assert_eq!(a, enumerate_fuzzy_sets(&l, 6, 500, 7));
        assert_ne!(a, enumerate_fuzzy_sets(&l, 6, 500, 8));
    }

    #[test]
    fn set_rendering() {
        let l = TableLattice::figure1();
        let f = vals(&l, "p,q,u");
        assert_eq!(format_set(&l, &f), "(p,q,u)");
        assert_eq!(parse_set(&l, "(p,q,u)").unwrap(), f);
        assert_eq!(parse_set(&l, "(p,z)"), None);
    }

    #[test]
    fn tiles() {
        let u = Arc::new(UnitInterval::default());
        let p = tile_partition(u, 8, 8, 4, 4.0).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.points(), 64);
        assert_eq!(p.value(0, 4), 0.75);
        assert_eq!(p.value(3, 0), 0.0);
        assert_eq!(p.value(3, 27), 0.75);
    }
}
