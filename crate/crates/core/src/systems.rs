//! Upper and lower transformation systems: opaque operators `L^X → L^Y`
//! checked against join (meet) preservation, compatibility with a
//! connective, and the singleton condition.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectives::{
    connective_properties, Connective, ConnectiveKind, Coverage, Negator, ValidationReport, Violation, MAX_REPORTED,
};
use crate::exec::Exec;
use crate::lattice::Lattice;
use crate::partitions::{
    enumerate_fuzzy_sets, format_set, parse_set, singleton, validate_partition, LFuzzyPartition, PartitionError, Universe,
};
use crate::transforms::{direct_components, DirectKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("onto map misses `{0}`")]
    NotOnto(String),
    #[error("onto map has {found} entries for {expected} points")]
    OntoLength { expected: usize, found: usize },
    #[error("operator returned {found} values, expected {expected}")]
    OperatorOutput { expected: usize, found: usize },
    #[error("a {system} system needs a {expected} connective, got {found}")]
    KindMismatch {
        system: SystemKind,
        expected: ConnectiveKind,
        found: ConnectiveKind,
    },
    #[error("wrong validator for a {0} system")]
    WrongValidator(SystemKind),
    #[error("a {0} system needs a negator")]
    MissingNegator(SystemKind),
    #[error("operands live on different carriers")]
    CarrierMismatch,
    #[error("extracted sets are not a partition: {0}")]
    ExtractionNotPartition(PartitionError),
    #[error("extracted partition's index map differs from the onto map at `{0}`")]
    OntoMismatch(String),
    #[error("systems differ in universe or index set")]
    ShapeMismatch,
    #[error("negator is not involutive")]
    NotInvolutive,
    #[error("no operator output supplied for input {0}")]
    MissingInput(String),
}

/// Which connective a system is determined by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemKind {
    #[serde(rename = "theta")]
    Theta,
    #[serde(rename = "I_eta")]
    CoResidual,
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "I_theta")]
    Residual,
}

impl SystemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Theta => "theta",
            SystemKind::CoResidual => "I_eta",
            SystemKind::Eta => "eta",
            SystemKind::Residual => "I_theta",
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(self, SystemKind::Theta | SystemKind::CoResidual)
    }

    pub fn connective(self) -> ConnectiveKind {
        self.direct().connective()
    }

    pub fn direct(self) -> DirectKind {
        match self {
            SystemKind::Theta => DirectKind::UpperTheta,
            SystemKind::CoResidual => DirectKind::UpperCoresidual,
            SystemKind::Eta => DirectKind::LowerEta,
            SystemKind::Residual => DirectKind::LowerResidual,
        }
    }

    pub fn of(kind: DirectKind) -> SystemKind {
        match kind {
            DirectKind::UpperTheta => SystemKind::Theta,
            DirectKind::UpperCoresidual => SystemKind::CoResidual,
            DirectKind::LowerEta => SystemKind::Eta,
            DirectKind::LowerResidual => SystemKind::Residual,
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An evaluation contract `L^X → L^Y`.
pub trait SystemOperator<L: Lattice>: Send + Sync {
    fn apply(&self, f: &[L::Value]) -> Result<Vec<L::Value>, SystemError>;
}

/// The direct transform over a partition.
pub struct PartitionOperator<L: Lattice> {
    pub kind: DirectKind,
    pub partition: LFuzzyPartition<L>,
    pub connective: Connective<L>,
    pub negator: Option<Negator<L>>,
}

impl<L: Lattice> SystemOperator<L> for PartitionOperator<L> {
    fn apply(&self, f: &[L::Value]) -> Result<Vec<L::Value>, SystemError> {
        Ok(direct_components(
            Exec::Sequential,
            self.kind,
            &self.partition,
            &self.connective,
            self.negator.as_ref(),
            f,
        ))
    }
}

pub struct IdentityOperator;

impl<L: Lattice> SystemOperator<L> for IdentityOperator {
    fn apply(&self, f: &[L::Value]) -> Result<Vec<L::Value>, SystemError> {
        Ok(f.to_vec())
    }
}

/// Wraps a closure.
pub struct FnOperator<F>(pub F);

impl<L, F> SystemOperator<L> for FnOperator<F>
where
    L: Lattice,
    F: Fn(&[L::Value]) -> Vec<L::Value> + Send + Sync,
{
    fn apply(&self, f: &[L::Value]) -> Result<Vec<L::Value>, SystemError> {
        Ok((self.0)(f))
    }
}

/// Outputs supplied by an external party for a known list of inputs.
pub struct TabulatedOperator<L: Lattice> {
    carrier: Arc<L>,
    outputs: HashMap<String, Vec<L::Value>>,
}

impl<L: Lattice> TabulatedOperator<L> {
    pub fn new(carrier: Arc<L>, pairs: impl IntoIterator<Item = (Vec<L::Value>, Vec<L::Value>)>) -> Self {
        let outputs = pairs.into_iter().map(|(i, o)| (format_set(&*carrier, &i), o)).collect();
        TabulatedOperator { carrier, outputs }
    }
}

impl<L: Lattice> SystemOperator<L> for TabulatedOperator<L> {
    fn apply(&self, f: &[L::Value]) -> Result<Vec<L::Value>, SystemError> {
        let key = format_set(&*self.carrier, f);
        self.outputs.get(&key).cloned().ok_or(SystemError::MissingInput(key))
    }
}

struct Recorder<L: Lattice> {
    carrier: Arc<L>,
    width: usize,
    seen: Mutex<Vec<Vec<L::Value>>>,
}

impl<L: Lattice> SystemOperator<L> for Recorder<L> {
    fn apply(&self, f: &[L::Value]) -> Result<Vec<L::Value>, SystemError> {
        self.seen.lock().expect("recorder lock").push(f.to_vec());
        Ok(vec![self.carrier.bottom(); self.width])
    }
}

/// `(X, Y, onto, operator)` together with the connective kind and, for
/// systems that need one, a negator.
#[derive(Clone)]
pub struct TransformationSystem<L: Lattice> {
    carrier: Arc<L>,
    universe: Universe,
    index: Vec<String>,
    onto: Vec<usize>,
    kind: SystemKind,
    operator: Arc<dyn SystemOperator<L>>,
    negator: Option<Negator<L>>,
}

impl<L: Lattice> fmt::Debug for TransformationSystem<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformationSystem")
            .field("kind", &self.kind)
            .field("universe", &self.universe)
            .field("index", &self.index)
            .field("onto", &self.onto)
            .finish_non_exhaustive()
    }
}

impl<L: Lattice> TransformationSystem<L> {
    pub fn new(
        carrier: Arc<L>,
        universe: Universe,
        index: Vec<String>,
        onto: Vec<usize>,
        kind: SystemKind,
        operator: Arc<dyn SystemOperator<L>>,
        negator: Option<Negator<L>>,
    ) -> Result<Self, SystemError> {
        if onto.len() != universe.len() {
            return Err(SystemError::OntoLength {
                expected: universe.len(),
                found: onto.len(),
            });
        }
        for (y, label) in index.iter().enumerate() {
            if !onto.contains(&y) {
                return Err(SystemError::NotOnto(label.clone()));
            }
        }
        if let Some(&bad) = onto.iter().find(|&&y| y >= index.len()) {
            return Err(SystemError::NotOnto(format!("index {bad}")));
        }
        if negator.as_ref().is_some_and(|n| !n.on_carrier(&carrier)) {
            return Err(SystemError::CarrierMismatch);
        }
        Ok(TransformationSystem {
            carrier,
            universe,
            index,
            onto,
            kind,
            operator,
            negator,
        })
    }

    /// `X = Y`, identity onto map, identity operator.
    pub fn identity(carrier: Arc<L>, universe: Universe, kind: SystemKind, negator: Option<Negator<L>>) -> Self {
        let index = universe.points().to_vec();
        let onto = (0..universe.len()).collect();
        Self::new(carrier, universe, index, onto, kind, Arc::new(IdentityOperator), negator).expect("identity is onto")
    }

    pub fn apply(&self, f: &[L::Value]) -> Result<Vec<L::Value>, SystemError> {
        let out = self.operator.apply(f)?;
        if out.len() != self.index.len() {
            return Err(SystemError::OperatorOutput {
                expected: self.index.len(),
                found: out.len(),
            });
        }
        Ok(out)
    }

    pub fn with_operator(&self, operator: Arc<dyn SystemOperator<L>>) -> Self {
        TransformationSystem { operator, ..self.clone() }
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn index(&self) -> &[String] {
        &self.index
    }

    pub fn onto(&self) -> &[usize] {
        &self.onto
    }

    pub fn negator(&self) -> Option<&Negator<L>> {
        self.negator.as_ref()
    }

    pub fn lattice(&self) -> &L {
        &self.carrier
    }

    pub fn carrier(&self) -> &Arc<L> {
        &self.carrier
    }
}

/// Seed used by the validators unless told otherwise.
pub const DEFAULT_SEED: u64 = 0x5eed;
/// Cap on the pair families checked for join (meet) preservation.
pub const PAIR_CAP: usize = 1 << 15;
/// Cap on the triple families.
pub const TRIPLE_CAP: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemCheck {
    pub budget: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SystemCheck {
    fn default() -> Self {
        SystemCheck {
            budget: 4096,
            seed: DEFAULT_SEED,
            exec: Exec::default(),
        }
    }
}

fn binomial(m: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(m.checked_sub(i)?)? / (i + 1);
    }
    Some(acc)
}

/// `k`-subsets of `0..m`: all of them in lexicographic order when there are
/// at most `cap`, otherwise `cap` seeded draws.
pub(crate) fn families(m: usize, k: usize, cap: usize, seed: u64) -> (Vec<Vec<usize>>, bool) {
    if m < k {
        return (vec![], true);
    }
    match binomial(m, k) {
        Some(total) if total <= cap => {
            let mut out = Vec::with_capacity(total);
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                out.push(idx.clone());
                let Some(i) = (0..k).rev().find(|&i| idx[i] < m - k + i) else {
                    break;
                };
                idx[i] += 1;
                for t in i + 1..k {
                    idx[t] = idx[t - 1] + 1;
                }
            }
            (out, true)
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = (0..cap)
                .map(|_| {
                    let mut v = sample(&mut rng, m, k).into_vec();
                    v.sort_unstable();
                    v
                })
                .collect();
            (out, false)
        }
    }
}

fn fold_sets<L: Lattice>(l: &L, sets: &[&[L::Value]], join: bool) -> Vec<L::Value> {
    (0..sets[0].len())
        .map(|x| {
            let vals = sets.iter().map(|s| s[x]);
            if join { l.join_all(vals) } else { l.meet_all(vals) }.expect("nonempty family")
        })
        .collect()
}

fn pointwise<L: Lattice>(c: &Connective<L>, u: L::Value, f: &[L::Value]) -> Vec<L::Value> {
    f.iter().map(|&v| c.apply(u, v)).collect()
}

/// Upper systems: axioms `i` (joins), `ii` (compatibility), `iii` (singletons).
pub fn validate_upper_system<L: Lattice>(sys: &TransformationSystem<L>, conn: &Connective<L>) -> Result<ValidationReport, SystemError> {
    validate_system(sys, conn, &SystemCheck::default(), true)
}

pub fn validate_upper_system_with<L: Lattice>(
    sys: &TransformationSystem<L>,
    conn: &Connective<L>,
    opts: &SystemCheck,
) -> Result<ValidationReport, SystemError> {
    validate_system(sys, conn, opts, true)
}

/// Lower systems: meets, compatibility, and `N(H[N(1_x)])(y) = 1 ⇔ y = v(x)`.
pub fn validate_lower_system<L: Lattice>(sys: &TransformationSystem<L>, conn: &Connective<L>) -> Result<ValidationReport, SystemError> {
    validate_system(sys, conn, &SystemCheck::default(), false)
}

pub fn validate_lower_system_with<L: Lattice>(
    sys: &TransformationSystem<L>,
    conn: &Connective<L>,
    opts: &SystemCheck,
) -> Result<ValidationReport, SystemError> {
    validate_system(sys, conn, opts, false)
}

fn validate_system<L: Lattice>(
    sys: &TransformationSystem<L>,
    conn: &Connective<L>,
    opts: &SystemCheck,
    upper: bool,
) -> Result<ValidationReport, SystemError> {
    if sys.kind.is_upper() != upper {
        return Err(SystemError::WrongValidator(sys.kind));
    }
    if conn.kind() != sys.kind.connective() {
        return Err(SystemError::KindMismatch {
            system: sys.kind,
            expected: sys.kind.connective(),
            found: conn.kind(),
        });
    }
    let l = sys.lattice();
    if !conn.on_carrier(l) {
        return Err(SystemError::CarrierMismatch);
    }
    let neg = if upper {
        None
    } else {
        Some(sys.negator().ok_or(SystemError::MissingNegator(sys.kind))?)
    };
    let n = sys.universe.len();
    let en = enumerate_fuzzy_sets(l, n, opts.budget, opts.seed);
    let sets = &en.sets;
    let exec = opts.exec.for_size(sets.len() * n);
    let outs = exec.map(0..sets.len(), |i| sys.apply(&sets[i])).into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut cases: u64 = 0;
    let mut violations = Vec::new();

    // (i) preservation of joins (upper) or meets (lower).
    let (pairs, all_pairs) = families(sets.len(), 2, PAIR_CAP, opts.seed);
    let (triples, all_triples) = families(sets.len(), 3, TRIPLE_CAP, opts.seed ^ 1);
    let fams: Vec<Vec<usize>> = pairs.into_iter().chain(triples).collect();
    let found = exec.filter_map(0..fams.len(), |i| {
        let fam = &fams[i];
        let ins: Vec<&[L::Value]> = fam.iter().map(|&k| sets[k].as_slice()).collect();
        let outs_f: Vec<&[L::Value]> = fam.iter().map(|&k| outs[k].as_slice()).collect();
        let lhs = match sys.apply(&fold_sets(l, &ins, upper)) {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        let rhs = fold_sets(l, &outs_f, upper);
        (!l.same_all(&lhs, &rhs)).then(|| {
            Ok(Violation {
                axiom: "i".into(),
                witness: ins.iter().map(|s| format_set(l, s)).collect(),
            })
        })
    });
    cases += fams.len() as u64;
    for r in found {
        violations.push(r?);
    }

    // (ii) F(u, op[f]) = op[F(u, f)] for every constant u.
    let pts = l.points();
    let total = pts.len() * sets.len();
    let found = exec.filter_map(0..total, |i| {
        let (u, f) = (pts[i / sets.len()], &sets[i % sets.len()]);
        let lhs = match sys.apply(&pointwise(conn, u, f)) {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        let rhs = pointwise(conn, u, &outs[i % sets.len()]);
        (!l.same_all(&lhs, &rhs)).then(|| {
            Ok(Violation {
                axiom: "ii".into(),
                witness: vec![l.label(u), format_set(l, f)],
            })
        })
    });
    cases += total as u64;
    for r in found {
        violations.push(r?);
    }

    // (iii) the singleton condition.
    for x in 0..n {
        let out = singleton_response(sys, neg, x)?;
        for (y, &v) in out.iter().enumerate() {
            cases += 1;
            if l.is_top(v) != (sys.onto[x] == y) {
                violations.push(Violation {
                    axiom: "iii".into(),
                    witness: vec![sys.universe.points()[x].clone(), sys.index[y].clone()],
                });
            }
        }
    }

    let count = violations.len() as u64;
    let violations = cap_per_axiom(violations);
    let coverage = if !l.is_exhaustive() {
        Coverage::Sampled
    } else if en.exhaustive && all_pairs && all_triples {
        Coverage::Exhaustive
    } else {
        Coverage::Partial
    };
    Ok(ValidationReport {
        subject: format!("{} system ({})", if upper { "upper" } else { "lower" }, sys.kind),
        passed: count == 0,
        checked_cases: cases,
        coverage,
        violation_count: count,
        violations,
        skipped: vec![],
    })
}

/// Sorted, keeping at most `MAX_REPORTED` witnesses per axiom.
fn cap_per_axiom(mut v: Vec<Violation>) -> Vec<Violation> {
    v.sort();
    let mut out: Vec<Violation> = Vec::with_capacity(v.len().min(4 * MAX_REPORTED));
    let mut run = 0;
    for x in v {
        run = if out.last().is_some_and(|p| p.axiom == x.axiom) { run + 1 } else { 0 };
        if run < MAX_REPORTED {
            out.push(x);
        }
    }
    out
}

/// `U[1_x]`, or `N(H[N(1_x)])` for lower systems.
fn singleton_response<L: Lattice>(
    sys: &TransformationSystem<L>,
    neg: Option<&Negator<L>>,
    x: usize,
) -> Result<Vec<L::Value>, SystemError> {
    let one = singleton(sys.lattice(), sys.universe.len(), x);
    match neg {
        None => sys.apply(&one),
        Some(n) => Ok(n.apply_all(&sys.apply(&n.apply_all(&one))?)),
    }
}

pub fn replay_system<L: Lattice>(
    sys: &TransformationSystem<L>,
    conn: &Connective<L>,
    v: &Violation,
) -> Result<bool, SystemError> {
    let l = sys.lattice();
    let upper = sys.kind.is_upper();
    let bad = |s: &str| SystemError::MissingInput(s.to_string());
    match v.axiom.as_str() {
        "i" => {
            let sets = v
                .witness
                .iter()
                .map(|s| parse_set(l, s).ok_or_else(|| bad(s)))
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&[L::Value]> = sets.iter().map(Vec::as_slice).collect();
            let lhs = sys.apply(&fold_sets(l, &refs, upper))?;
            let outs = sets.iter().map(|s| sys.apply(s)).collect::<Result<Vec<_>, _>>()?;
            let orefs: Vec<&[L::Value]> = outs.iter().map(Vec::as_slice).collect();
            Ok(!l.same_all(&lhs, &fold_sets(l, &orefs, upper)))
        }
        "ii" => {
            let u = l.parse(&v.witness[0]).ok_or_else(|| bad(&v.witness[0]))?;
            let f = parse_set(l, &v.witness[1]).ok_or_else(|| bad(&v.witness[1]))?;
            let lhs = sys.apply(&pointwise(conn, u, &f))?;
            Ok(!l.same_all(&lhs, &pointwise(conn, u, &sys.apply(&f)?)))
        }
        "iii" => {
            let x = sys.universe.index_of(&v.witness[0]).ok_or_else(|| bad(&v.witness[0]))?;
            let y = sys.index.iter().position(|s| *s == v.witness[1]).ok_or_else(|| bad(&v.witness[1]))?;
            let neg = if upper { None } else { sys.negator() };
            let out = singleton_response(sys, neg, x)?;
            Ok(l.is_top(out[y]) != (sys.onto[x] == y))
        }
        _ => Ok(false),
    }
}

/// `Y = J`, onto map `k`, operator the direct transform of `kind`.
///
/// Lower residual systems without an explicit negator get the one induced
/// by the implicator.
pub fn system_from_partition<L: Lattice>(
    p: &LFuzzyPartition<L>,
    kind: DirectKind,
    conn: &Connective<L>,
    neg: Option<&Negator<L>>,
) -> Result<TransformationSystem<L>, SystemError> {
    let sk = SystemKind::of(kind);
    if conn.kind() != kind.connective() {
        return Err(SystemError::KindMismatch {
            system: sk,
            expected: kind.connective(),
            found: conn.kind(),
        });
    }
    if !conn.on_carrier(p.lattice()) {
        return Err(SystemError::CarrierMismatch);
    }
    if kind.needs_negator() && neg.is_none() {
        return Err(SystemError::MissingNegator(sk));
    }
    let negator = match (kind, neg) {
        (DirectKind::UpperTheta, _) => None,
        (DirectKind::LowerResidual, None) => Some(Negator::induced(conn).expect("residual implicator")),
        (_, n) => n.cloned(),
    };
    let op = PartitionOperator {
        kind,
        partition: p.clone(),
        connective: conn.clone(),
        negator: negator.clone(),
    };
    TransformationSystem::new(
        p.carrier().clone(),
        p.universe().clone(),
        p.labels().to_vec(),
        p.index_map().to_vec(),
        sk,
        Arc::new(op),
        negator,
    )
}

/// Recovers the partition behind a system.
///
/// * `theta`: `A_y(x) = U[1_x](y)`
/// * `eta`: `A_y(x) = N(H[N(1_x)])(y)`
/// * `I_eta`: `A_y(x) = N(∨{v : U[v·1_x](y) = 0})`, with `v·1_x` equal to `v` at `x`, 0 elsewhere
/// * `I_theta`: `A_y(x) = ∧{v : H[v at x, 1 elsewhere](y) = 1}`
pub fn partition_from_system<L: Lattice>(sys: &TransformationSystem<L>) -> Result<LFuzzyPartition<L>, SystemError> {
    let l = sys.lattice();
    let (n, m) = (sys.universe.len(), sys.index.len());
    let mut members = vec![vec![l.bottom(); n]; m];
    let need_neg = || sys.negator().ok_or(SystemError::MissingNegator(sys.kind));
    let pts = l.points();
    for x in 0..n {
        let col: Vec<L::Value> = match sys.kind {
            SystemKind::Theta => sys.apply(&singleton(l, n, x))?,
            SystemKind::Eta => singleton_response(sys, Some(need_neg()?), x)?,
            SystemKind::CoResidual => {
                let neg = need_neg()?;
                let mut best: Vec<Option<L::Value>> = vec![None; m];
                for &v in &pts {
                    let mut g = vec![l.bottom(); n];
                    g[x] = v;
                    let out = sys.apply(&g)?;
                    for y in 0..m {
                        if l.is_bottom(out[y]) {
                            best[y] = Some(best[y].map_or(v, |b| l.join(b, v)));
                        }
                    }
                }
                best.into_iter().map(|b| neg.apply(b.unwrap_or(l.bottom()))).collect()
            }
            SystemKind::Residual => {
                let mut best: Vec<Option<L::Value>> = vec![None; m];
                for &v in &pts {
                    let mut g = vec![l.top(); n];
                    g[x] = v;
                    let out = sys.apply(&g)?;
                    for y in 0..m {
                        if l.is_top(out[y]) {
                            best[y] = Some(best[y].map_or(v, |b| l.meet(b, v)));
                        }
                    }
                }
                best.into_iter().map(|b| b.unwrap_or(l.top())).collect()
            }
        };
        for y in 0..m {
            members[y][x] = col[y];
        }
    }
    let p = validate_partition(
        sys.carrier.clone(),
        sys.universe.clone(),
        sys.index.iter().cloned().zip(members).collect(),
    )
    .map_err(SystemError::ExtractionNotPartition)?;
    if let Some(x) = (0..n).find(|&x| p.index_map()[x] != sys.onto[x]) {
        return Err(SystemError::OntoMismatch(sys.universe.points()[x].clone()));
    }
    Ok(p)
}

/// Whether two systems agree on every enumerated input.
pub fn same_operator<L: Lattice>(a: &TransformationSystem<L>, b: &TransformationSystem<L>, opts: &SystemCheck) -> Result<Option<Vec<L::Value>>, SystemError> {
    let l = a.lattice();
    let en = enumerate_fuzzy_sets(l, a.universe.len(), opts.budget, opts.seed);
    for f in &en.sets {
        if !l.same_all(&a.apply(f)?, &b.apply(f)?) {
            return Ok(Some(f.clone()));
        }
    }
    Ok(None)
}

/// `U[f] = N(H[N(f)])` and `H[f] = N(U[N(f)])` on the enumerated family,
/// then agreement of the extracted partitions.
pub fn check_system_duality<L: Lattice>(
    upper: &TransformationSystem<L>,
    lower: &TransformationSystem<L>,
    n: &Negator<L>,
    opts: &SystemCheck,
) -> Result<ValidationReport, SystemError> {
    if !upper.kind.is_upper() || lower.kind.is_upper() {
        return Err(SystemError::WrongValidator(if upper.kind.is_upper() { lower.kind } else { upper.kind }));
    }
    if upper.universe != lower.universe || upper.index != lower.index {
        return Err(SystemError::ShapeMismatch);
    }
    let l = upper.lattice();
    if !n.on_carrier(l) || *lower.carrier != *upper.carrier {
        return Err(SystemError::CarrierMismatch);
    }
    if !n.is_involutive() {
        return Err(SystemError::NotInvolutive);
    }
    let en = enumerate_fuzzy_sets(l, upper.universe.len(), opts.budget, opts.seed);
    let exec = opts.exec.for_size(en.sets.len() * upper.universe.len());
    let found = exec.map(0..en.sets.len(), |i| -> Result<Vec<Violation>, SystemError> {
        let f = &en.sets[i];
        let nf = n.apply_all(f);
        let mut out = vec![];
        if !l.same_all(&upper.apply(f)?, &n.apply_all(&lower.apply(&nf)?)) {
            out.push(Violation {
                axiom: "U=N(H(N))".into(),
                witness: vec![format_set(l, f)],
            });
        }
        if !l.same_all(&lower.apply(f)?, &n.apply_all(&upper.apply(&nf)?)) {
            out.push(Violation {
                axiom: "H=N(U(N))".into(),
                witness: vec![format_set(l, f)],
            });
        }
        Ok(out)
    });
    let mut violations = vec![];
    for r in found {
        violations.extend(r?);
    }
    let mut cases = 2 * en.sets.len() as u64;
    if violations.is_empty() {
        cases += 1;
        let shared = match (partition_from_system(upper), partition_from_system(lower)) {
            (Ok(a), Ok(b)) if a == b => None,
            (Ok(_), Ok(_)) => Some("partitions differ".to_string()),
            (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
        };
        if let Some(why) = shared {
            violations.push(Violation {
                axiom: "shared-partition".into(),
                witness: vec![why],
            });
        }
    }
    let count = violations.len() as u64;
    let violations = cap_per_axiom(violations);
    Ok(ValidationReport {
        subject: format!("system duality {}/{} under {}", upper.kind, lower.kind, n.name()),
        passed: count == 0,
        checked_cases: cases,
        coverage: if en.exhaustive { Coverage::Exhaustive } else { Coverage::Sampled },
        violation_count: count,
        violations,
        skipped: vec![],
    })
}

/// The singleton decompositions of an arbitrary `f`:
///
/// * `i-theta`: `f = ∨_x θ(f(x), 1_x)`
/// * `i-eta`: `f = ∧_x η(f(x), N(1_x))`
/// * `ii-I_eta`: `f = ∨_x I_η(N'(f(x)), 1_x)` with `N'` induced by `I_η`
/// * `ii-I_theta`: `f = ∧_x I_θ(N''(f(x)), N''(1_x))` with `N''` induced by `I_θ`
///
/// Clauses `i` need neutral elements; clauses `ii` need both induced
/// negators involutive. Unmet clauses are listed in `skipped`.
pub fn singleton_decomposition_check<L: Lattice>(
    theta: &Connective<L>,
    eta: &Connective<L>,
    n: Option<&Negator<L>>,
    implicators: (&Connective<L>, &Connective<L>),
    points: usize,
    opts: &SystemCheck,
) -> Result<ValidationReport, SystemError> {
    let l = theta.lattice();
    let (ith, ieta) = implicators;
    if [eta, ith, ieta].iter().any(|c| !c.on_carrier(l)) || n.is_some_and(|n| !n.on_carrier(l)) {
        return Err(SystemError::CarrierMismatch);
    }
    let nith = Negator::induced(ith).map_err(|_| SystemError::MissingNegator(SystemKind::Residual))?;
    let nieta = Negator::induced(ieta).map_err(|_| SystemError::MissingNegator(SystemKind::CoResidual))?;

    let mut skipped = vec![];
    let mut clauses: Vec<&str> = vec![];
    if connective_properties(theta).neutral == Some(true) {
        clauses.push("i-theta");
    } else {
        skipped.push("i-theta: 1 is not neutral for theta".to_string());
    }
    match n {
        Some(_) if connective_properties(eta).neutral == Some(true) => clauses.push("i-eta"),
        Some(_) => skipped.push("i-eta: 0 is not neutral for eta".to_string()),
        None => skipped.push("i-eta: no negator".to_string()),
    }
    if nith.is_involutive() && nieta.is_involutive() {
        clauses.extend(["ii-I_eta", "ii-I_theta"]);
    } else {
        skipped.push("ii: induced negators are not both involutive".to_string());
    }

    let en = enumerate_fuzzy_sets(l, points, opts.budget, opts.seed);
    let ones: Vec<Vec<L::Value>> = (0..points).map(|x| singleton(l, points, x)).collect();
    let rebuild = |clause: &str, f: &[L::Value]| -> Vec<L::Value> {
        (0..points)
            .map(|y| {
                let terms = (0..points).map(|x| {
                    let one = ones[x][y];
                    match clause {
                        "i-theta" => theta.apply(f[x], one),
                        "i-eta" => eta.apply(f[x], n.expect("gated").apply(one)),
                        "ii-I_eta" => ieta.apply(nieta.apply(f[x]), one),
                        _ => ith.apply(nith.apply(f[x]), nith.apply(one)),
                    }
                });
                match clause {
                    "i-theta" | "ii-I_eta" => l.join_all(terms),
                    _ => l.meet_all(terms),
                }
                .expect("nonempty universe")
            })
            .collect()
    };
    let mut violations = vec![];
    let mut cases = 0;
    for f in &en.sets {
        for &c in &clauses {
            cases += 1;
            if !l.same_all(&rebuild(c, f), f) {
                violations.push(Violation {
                    axiom: c.to_string(),
                    witness: vec![format_set(l, f)],
                });
            }
        }
    }
    let count = violations.len() as u64;
    let violations = cap_per_axiom(violations);
    Ok(ValidationReport {
        subject: "singleton decomposition".into(),
        passed: count == 0,
        checked_cases: cases,
        coverage: if en.exhaustive { Coverage::Exhaustive } else { Coverage::Sampled },
        violation_count: count,
        violations,
        skipped,
    })
}

/// Inputs the validator will query, for operators evaluated elsewhere.
#[allow(clippy::too_many_arguments)]
pub fn batch_request<L: Lattice>(
    carrier: Arc<L>,
    universe: Universe,
    index: Vec<String>,
    onto: Vec<usize>,
    kind: SystemKind,
    negator: Option<Negator<L>>,
    conn: &Connective<L>,
    opts: &SystemCheck,
) -> Result<Vec<Vec<L::Value>>, SystemError> {
    let recorder = Arc::new(Recorder {
        carrier: carrier.clone(),
        width: index.len(),
        seen: Mutex::new(vec![]),
    });
    let sys = TransformationSystem::new(carrier.clone(), universe, index, onto, kind, recorder.clone(), negator)?;
    let seq = SystemCheck {
        exec: Exec::Sequential,
        ..*opts
    };
    validate_system(&sys, conn, &seq, kind.is_upper())?;
    let seen = std::mem::take(&mut *recorder.seen.lock().expect("recorder lock"));
    let mut keys = std::collections::HashSet::new();
    Ok(seen.into_iter().filter(|f| keys.insert(format_set(&*carrier, f))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectives::{derive_coresidual, derive_residual, ClosedForm};
    use crate::lattice::{Elem, TableLattice};

    fn vals(l: &TableLattice, s: &str) -> Vec<Elem> {
        s.split(',').map(|x| l.elem(x).unwrap()).collect()
    }

    struct Fx {
        l: Arc<TableLattice>,
        p: LFuzzyPartition<TableLattice>,
        n: Negator<TableLattice>,
        theta: Connective<TableLattice>,
        eta: Connective<TableLattice>,
        ith: Connective<TableLattice>,
        ieta: Connective<TableLattice>,
    }

    fn fx() -> Fx {
        let l = Arc::new(TableLattice::figure1());
        let p = validate_partition(
            l.clone(),
            Universe::indexed(3),
            vec![("A1", vals(&l, "1,p,q")), ("A2", vals(&l, "s,1,u")), ("A3", vals(&l, "s,p,1"))],
        )
        .unwrap();
        let n = Negator::from_table(l.clone(), "N", vals(&l, "1,u,t,s,r,q,p,0")).unwrap();
        let theta = Connective::closed(l.clone(), ClosedForm::Meet).unwrap();
        let eta = Connective::closed(l.clone(), ClosedForm::Join).unwrap();
        let ith = derive_residual(&theta).unwrap();
        let ieta = derive_coresidual(&eta).unwrap();
        Fx { l, p, n, theta, eta, ith, ieta }
    }

    #[test]
    fn families_enumerate_and_sample() {
        let (all, complete) = families(4, 2, 100, 0);
        assert!(complete);
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let (some, complete) = families(100, 3, 50, 9);
        assert!(!complete);
        assert_eq!(some.len(), 50);
        assert_eq!(some, families(100, 3, 50, 9).0);
    }

    #[test]
    fn identity_systems() {
        let f = fx();
        let u = TransformationSystem::identity(f.l.clone(), Universe::indexed(3), SystemKind::Theta, None);
        assert!(validate_upper_system(&u, &f.theta).unwrap().passed);
        let h = TransformationSystem::identity(f.l.clone(), Universe::indexed(3), SystemKind::Eta, Some(f.n.clone()));
        assert!(validate_lower_system(&h, &f.eta).unwrap().passed);
        let crisp = partition_from_system(&u).unwrap();
        assert_eq!(crisp.members()[0], vals(&f.l, "1,0,0"));
        let d = check_system_duality(&u, &h, &f.n, &SystemCheck::default()).unwrap();
        assert!(d.passed, "{d:?}");
    }

    #[test]
    fn constant_operators_fail_singletons() {
        let f = fx();
        let top = f.l.top();
        let u = TransformationSystem::identity(f.l.clone(), Universe::indexed(3), SystemKind::Theta, None)
            .with_operator(Arc::new(FnOperator(move |g: &[Elem]| vec![top; g.len()])));
        let r = validate_upper_system(&u, &f.theta).unwrap();
        assert!(r.violations.iter().any(|v| v.axiom == "iii"));
        for v in &r.violations {
            assert!(replay_system(&u, &f.theta, v).unwrap());
        }
        let bot = f.l.bottom();
        let h = TransformationSystem::identity(f.l.clone(), Universe::indexed(3), SystemKind::Eta, Some(f.n.clone()))
            .with_operator(Arc::new(FnOperator(move |g: &[Elem]| vec![bot; g.len()])));
        let r = validate_lower_system(&h, &f.eta).unwrap();
        assert!(r.violations.iter().any(|v| v.axiom == "iii"));
    }

    #[test]
    fn systems_from_example_partition() {
        let f = fx();
        let u = system_from_partition(&f.p, DirectKind::UpperTheta, &f.theta, None).unwrap();
        assert!(validate_upper_system(&u, &f.theta).unwrap().passed);
        let h = system_from_partition(&f.p, DirectKind::LowerEta, &f.eta, Some(&f.n)).unwrap();
        assert!(validate_lower_system(&h, &f.eta).unwrap().passed);
        let g = vals(&f.l, "p,q,u");
        assert_eq!(u.apply(&g).unwrap(), vals(&f.l, "q,u,u"));
        let hr = system_from_partition(&f.p, DirectKind::LowerResidual, &f.ith, None).unwrap();
        assert_eq!(hr.apply(&g).unwrap(), vals(&f.l, "p,p,p"));
        assert!(matches!(
            system_from_partition(&f.p, DirectKind::UpperTheta, &f.eta, None),
            Err(SystemError::KindMismatch { .. })
        ));
    }

    #[test]
    fn round_trips_all_kinds() {
        let f = fx();
        let cases = [
            (DirectKind::UpperTheta, &f.theta),
            (DirectKind::LowerEta, &f.eta),
            (DirectKind::UpperCoresidual, &f.ieta),
            (DirectKind::LowerResidual, &f.ith),
        ];
        for (kind, conn) in cases {
            let s = system_from_partition(&f.p, kind, conn, Some(&f.n)).unwrap();
            let back = partition_from_system(&s).unwrap();
            assert_eq!(back, f.p, "{kind}");
            let again = system_from_partition(&back, kind, conn, Some(&f.n)).unwrap();
            assert_eq!(same_operator(&s, &again, &SystemCheck::default()).unwrap(), None);
        }
    }

    #[test]
    fn duality_detects_different_partitions() {
        let f = fx();
        let u = system_from_partition(&f.p, DirectKind::UpperTheta, &f.theta, None).unwrap();
        let h = system_from_partition(&f.p, DirectKind::LowerEta, &f.eta, Some(&f.n)).unwrap();
        let r = check_system_duality(&u, &h, &f.n, &SystemCheck::default()).unwrap();
        assert!(r.passed, "{r:?}");
        let p2 = f.p.with_value(0, 1, f.l.bottom()).unwrap();
        let h2 = system_from_partition(&p2, DirectKind::LowerEta, &f.eta, Some(&f.n)).unwrap();
        let r = check_system_duality(&u, &h2, &f.n, &SystemCheck::default()).unwrap();
        assert!(!r.passed);
        assert!(!r.violations[0].witness.is_empty());
    }

    #[test]
    fn decomposition() {
        let f = fx();
        let opts = SystemCheck::default();
        let r = singleton_decomposition_check(&f.theta, &f.eta, Some(&f.n), (&f.ith, &f.ieta), 2, &opts).unwrap();
        assert!(r.passed);
        assert_eq!(r.checked_cases, 2 * 64);
        assert_eq!(r.skipped.len(), 1);
    }

    #[test]
    fn batch_protocol() {
        let f = fx();
        let sys = system_from_partition(&f.p, DirectKind::UpperTheta, &f.theta, None).unwrap();
        let opts = SystemCheck {
            budget: 27,
            ..SystemCheck::default()
        };
        let inputs = batch_request(
            f.l.clone(),
            Universe::indexed(3),
            f.p.labels().to_vec(),
            f.p.index_map().to_vec(),
            SystemKind::Theta,
            None,
            &f.theta,
            &opts,
        )
        .unwrap();
        let pairs: Vec<_> = inputs.iter().map(|i| (i.clone(), sys.apply(i).unwrap())).collect();
        let external = sys.with_operator(Arc::new(TabulatedOperator::new(f.l.clone(), pairs)));
        let r = validate_upper_system_with(&external, &f.theta, &opts).unwrap();
        assert_eq!(r, validate_upper_system_with(&sys, &f.theta, &opts).unwrap());
    }
}
