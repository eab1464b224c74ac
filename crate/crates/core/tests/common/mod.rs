//! A second, deliberately naive implementation of lattices, implicators and
//! transforms, used as a differential oracle. It shares no code with the
//! library: orders are written down directly and every bound is found by
//! scanning all elements.

#![allow(dead_code)]

use rand::Rng;

#[derive(Debug, Clone)]
pub struct Oracle {
    pub labels: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl Oracle {
    fn from_leq(labels: Vec<String>, le: impl Fn(usize, usize) -> bool) -> Self {
        let n = labels.len();
        let leq = (0..n).map(|a| (0..n).map(|b| le(a, b)).collect()).collect();
        Oracle { labels, leq }
    }

    pub fn chain(n: usize) -> Self {
        Self::from_leq((0..n).map(|i| i.to_string()).collect(), |a, b| a <= b)
    }

    pub fn figure1() -> Self {
        let labels: Vec<String> = ["0", "p", "q", "r", "s", "t", "u", "1"].iter().map(|s| s.to_string()).collect();
        let above: [&str; 8] = ["0pqrstu1", "pqrstu1", "qsu1", "rstu1", "su1", "tu1", "u1", "1"];
        let l2 = labels.clone();
        Self::from_leq(labels, move |a, b| above[a].contains(l2[b].as_str()))
    }

    /// `chain(2) × chain(2)` with labels `a|b`.
    pub fn square() -> Self {
        let labels: Vec<String> = ["0|0", "0|1", "1|0", "1|1"].iter().map(|s| s.to_string()).collect();
        Self::from_leq(labels, |a, b| (a >> 1) <= (b >> 1) && (a & 1) <= (b & 1))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn bottom(&self) -> usize {
        (0..self.len()).find(|&a| (0..self.len()).all(|b| self.le(a, b))).unwrap()
    }

    pub fn top(&self) -> usize {
        (0..self.len()).find(|&a| (0..self.len()).all(|b| self.le(b, a))).unwrap()
    }

    /// Least upper bound of a nonempty family.
    pub fn sup(&self, xs: &[usize]) -> usize {
        let ub: Vec<usize> = (0..self.len()).filter(|&u| xs.iter().all(|&x| self.le(x, u))).collect();
        *ub.iter().find(|&&u| ub.iter().all(|&v| self.le(u, v))).unwrap()
    }

    pub fn inf(&self, xs: &[usize]) -> usize {
        let lb: Vec<usize> = (0..self.len()).filter(|&u| xs.iter().all(|&x| self.le(u, x))).collect();
        *lb.iter().find(|&&u| lb.iter().all(|&v| self.le(v, u))).unwrap()
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.inf(&[a, b])
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.sup(&[a, b])
    }

    /// `sup { w : u ∧ w ≤ v }`
    pub fn residual(&self, u: usize, v: usize) -> usize {
        let ws: Vec<usize> = (0..self.len()).filter(|&w| self.le(self.meet(u, w), v)).collect();
        self.sup(&ws)
    }

    /// `inf { w : u ∨ w ≥ v }`
    pub fn coresidual(&self, u: usize, v: usize) -> usize {
        let ws: Vec<usize> = (0..self.len()).filter(|&w| self.le(v, self.join(u, w))).collect();
        self.inf(&ws)
    }

    pub fn induced_neg(&self, u: usize) -> usize {
        self.residual(u, self.bottom())
    }

    pub fn index(&self, label: &str) -> usize {
        self.labels.iter().position(|l| l == label).unwrap()
    }
}

/// A random context: members are rows over `x`, every point in exactly one
/// core, off-core values below top.
#[derive(Debug, Clone)]
pub struct Ctx {
    pub members: Vec<Vec<usize>>,
    pub f: Vec<usize>,
}

pub fn random_ctx(o: &Oracle, rng: &mut impl Rng, max_points: usize) -> Ctx {
    let n = rng.random_range(1..=max_points);
    let m = rng.random_range(1..=n);
    // First m points seed the m cores, the rest pick one at random.
    let mut owner: Vec<usize> = (0..n).map(|x| if x < m { x } else { rng.random_range(0..m) }).collect();
    for i in (1..n).rev() {
        let k = rng.random_range(0..=i);
        owner.swap(i, k);
    }
    let top = o.top();
    let non_top: Vec<usize> = (0..o.len()).filter(|&v| v != top).collect();
    let members = (0..m)
        .map(|j| {
            (0..n)
                .map(|x| if owner[x] == j { top } else { non_top[rng.random_range(0..non_top.len())] })
                .collect()
        })
        .collect();
    let f = (0..n).map(|_| rng.random_range(0..o.len())).collect();
    Ctx { members, f }
}

/// Kind names as used by the library.
pub const KINDS: [&str; 4] = ["upper-theta", "lower-eta", "upper-coresidual", "lower-residual"];

/// Direct components with θ = ∧, η = ∨, derived implicators and negator `neg`.
pub fn direct(o: &Oracle, kind: &str, members: &[Vec<usize>], neg: &dyn Fn(usize) -> usize, f: &[usize]) -> Vec<usize> {
    members
        .iter()
        .map(|a| {
            let terms: Vec<usize> = (0..f.len())
                .map(|x| match kind {
                    "upper-theta" => o.meet(a[x], f[x]),
                    "lower-eta" => o.join(neg(a[x]), f[x]),
                    "upper-coresidual" => o.coresidual(neg(a[x]), f[x]),
                    "lower-residual" => o.residual(a[x], f[x]),
                    _ => unreachable!(),
                })
                .collect();
            if kind.starts_with("upper") {
                o.sup(&terms)
            } else {
                o.inf(&terms)
            }
        })
        .collect()
}

pub fn inverse(o: &Oracle, kind: &str, members: &[Vec<usize>], neg: &dyn Fn(usize) -> usize, comps: &[usize]) -> Vec<usize> {
    let n = members[0].len();
    (0..n)
        .map(|x| {
            let terms: Vec<usize> = members
                .iter()
                .zip(comps)
                .map(|(a, &c)| match kind {
                    "upper-theta" => o.residual(a[x], c),
                    "lower-eta" => o.coresidual(neg(a[x]), c),
                    "upper-coresidual" => o.join(neg(a[x]), c),
                    "lower-residual" => o.meet(a[x], c),
                    _ => unreachable!(),
                })
                .collect();
            if kind.starts_with("upper") {
                o.inf(&terms)
            } else {
                o.sup(&terms)
            }
        })
        .collect()
}
