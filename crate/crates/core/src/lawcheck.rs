//! Registry of algebraic laws, each checked over enumerated (or seeded
//! sampled) cases with a three-valued outcome.
//!
//! A law is skipped as `hypothesis-not-met` when one of its gates fails on
//! the context; otherwise it is `passed` or `failed` with a witness that
//! [`replay_law`] re-evaluates.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectives::{
    adjointness_check, check_duality, connective_properties, derive_coresidual, derive_residual, has_exchange,
    validate_grouping_with, validate_negator, validate_overlap_with, Connective, ConnectiveError, ConnectiveKind, Coverage,
    Negator,
};
use crate::exec::Exec;
use crate::lattice::Lattice;
pub use crate::partitions::enumerate_fuzzy_sets;
use crate::partitions::{constant, format_set, parse_set, singleton, LFuzzyPartition};
use crate::systems::{
    check_system_duality, partition_from_system, same_operator, system_from_partition, validate_lower_system_with,
    validate_upper_system_with, SystemCheck, DEFAULT_SEED,
};
use crate::transforms::{direct_components, inverse_values, DirectKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LawError {
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error("context slots live on different carriers")]
    CarrierMismatch,
    #[error("slot `{slot}` needs a {expected} connective, got {found}")]
    KindMismatch {
        slot: &'static str,
        expected: ConnectiveKind,
        found: ConnectiveKind,
    },
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("cannot parse witness entry `{0}`")]
    BadWitness(String),
    #[error(transparent)]
    Connective(#[from] ConnectiveError),
}

/// At most this many cases per law; larger spaces are sampled.
pub const CASE_CAP: u64 = 1 << 18;
/// Cap on the comparison partitions generated for monotonicity in `P`.
pub const COMPARISON_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LawOptions {
    pub budget: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for LawOptions {
    fn default() -> Self {
        LawOptions {
            budget: 4096,
            seed: DEFAULT_SEED,
            exec: Exec::default(),
        }
    }
}

/// Structural facts the hypothesis gates read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Facts {
    pub theta_overlap: bool,
    pub eta_grouping: bool,
    pub theta_adjoint: bool,
    pub eta_adjoint: bool,
    pub negator: bool,
    pub n_involutive: bool,
    pub n_strict: bool,
    pub theta_eta_dual: bool,
    pub implicators_dual: bool,
    pub theta_ep: bool,
    pub eta_ep: bool,
    pub ith_ep: bool,
    pub ieta_ep: bool,
    pub theta_neutral: bool,
    pub eta_neutral: bool,
    pub theta_deflation: bool,
    pub eta_deflation: bool,
    pub nith_involutive: bool,
    pub nieta_involutive: bool,
    pub double_residuation: bool,
    pub double_coresiduation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hyp {
    ThetaOverlap,
    EtaGrouping,
    ThetaAdjoint,
    EtaAdjoint,
    Negator,
    NInvolutive,
    ThetaEtaDual,
    ImplicatorsDual,
    ThetaEp,
    EtaEp,
    IthEp,
    IetaEp,
    ThetaNeutral,
    EtaNeutral,
    ThetaDeflation,
    EtaDeflation,
    NithInvolutive,
    NietaInvolutive,
    DoubleResiduation,
    DoubleCoresiduation,
}

impl Hyp {
    pub fn describe(self) -> &'static str {
        match self {
            Hyp::ThetaOverlap => "theta is an overlap map",
            Hyp::EtaGrouping => "eta is a grouping map",
            Hyp::ThetaAdjoint => "(theta, I_theta) is an adjoint pair",
            Hyp::EtaAdjoint => "(eta, I_eta) is an adjoint pair",
            Hyp::Negator => "a negator N is supplied",
            Hyp::NInvolutive => "N is involutive",
            Hyp::ThetaEtaDual => "theta and eta are dual under N",
            Hyp::ImplicatorsDual => "I_theta and I_eta are dual under N",
            Hyp::ThetaEp => "theta has EP",
            Hyp::EtaEp => "eta has EP",
            Hyp::IthEp => "I_theta has EP",
            Hyp::IetaEp => "I_eta has EP",
            Hyp::ThetaNeutral => "1 is neutral for theta",
            Hyp::EtaNeutral => "0 is neutral for eta",
            Hyp::ThetaDeflation => "theta is deflation",
            Hyp::EtaDeflation => "eta is deflation",
            Hyp::NithInvolutive => "N_I_theta is involutive",
            Hyp::NietaInvolutive => "N_I_eta is involutive",
            Hyp::DoubleResiduation => "meet_v I_theta(I_theta(u,v),v) = u",
            Hyp::DoubleCoresiduation => "join_v I_eta(I_eta(u,v),v) = u",
        }
    }

    fn holds(self, f: &Facts) -> bool {
        match self {
            Hyp::ThetaOverlap => f.theta_overlap,
            Hyp::EtaGrouping => f.eta_grouping,
            Hyp::ThetaAdjoint => f.theta_adjoint,
            Hyp::EtaAdjoint => f.eta_adjoint,
            Hyp::Negator => f.negator,
            Hyp::NInvolutive => f.n_involutive,
            Hyp::ThetaEtaDual => f.theta_eta_dual,
            Hyp::ImplicatorsDual => f.implicators_dual,
            Hyp::ThetaEp => f.theta_ep,
            Hyp::EtaEp => f.eta_ep,
            Hyp::IthEp => f.ith_ep,
            Hyp::IetaEp => f.ieta_ep,
            Hyp::ThetaNeutral => f.theta_neutral,
            Hyp::EtaNeutral => f.eta_neutral,
            Hyp::ThetaDeflation => f.theta_deflation,
            Hyp::EtaDeflation => f.eta_deflation,
            Hyp::NithInvolutive => f.nith_involutive,
            Hyp::NietaInvolutive => f.nieta_involutive,
            Hyp::DoubleResiduation => f.double_residuation,
            Hyp::DoubleCoresiduation => f.double_coresiduation,
        }
    }
}

/// One quantified variable of a law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    /// An element of `L` (grid point on the unit interval).
    Elem,
    /// An enumerated fuzzy set on `X`.
    Set,
    /// A member index `j`.
    J,
    /// A point `x`.
    X,
    /// A comparison partition `B ≥ A`.
    Cmp,
}

/// Values bound to a law's dimensions, grouped by kind in dimension order.
#[derive(Debug, Clone, PartialEq)]
pub struct Case<V> {
    pub elems: Vec<V>,
    pub sets: Vec<Vec<V>>,
    pub js: Vec<usize>,
    pub xs: Vec<usize>,
    pub cmps: Vec<usize>,
}

impl<V> Default for Case<V> {
    fn default() -> Self {
        Case {
            elems: vec![],
            sets: vec![],
            js: vec![],
            xs: vec![],
            cmps: vec![],
        }
    }
}

type Check<L> = fn(&LawContext<L>, &Case<<L as Lattice>::Value>) -> Option<String>;

pub struct Law<L: Lattice> {
    pub id: &'static str,
    /// The law's formula in compact notation.
    pub anchor: &'static str,
    pub hyps: &'static [Hyp],
    pub dims: &'static [Dim],
    check: Check<L>,
}

/// Everything a law may quantify over.
pub struct LawContext<L: Lattice> {
    pub lattice: Arc<L>,
    pub theta: Connective<L>,
    pub eta: Connective<L>,
    pub negator: Option<Negator<L>>,
    pub ith: Connective<L>,
    pub ieta: Connective<L>,
    pub partition: LFuzzyPartition<L>,
    pub options: LawOptions,
    pub facts: Facts,
    nith: Negator<L>,
    nieta: Negator<L>,
    points: Vec<L::Value>,
    sets: Vec<Vec<L::Value>>,
    sets_exhaustive: bool,
    comparisons: Vec<LFuzzyPartition<L>>,
}

impl<L: Lattice> LawContext<L> {
    pub fn new(
        theta: Connective<L>,
        eta: Connective<L>,
        negator: Option<Negator<L>>,
        ith: Connective<L>,
        ieta: Connective<L>,
        partition: LFuzzyPartition<L>,
        options: LawOptions,
    ) -> Result<Self, LawError> {
        let lattice = theta.carrier().clone();
        let l = &*lattice;
        let slots = [
            ("theta", &theta, ConnectiveKind::Overlap),
            ("eta", &eta, ConnectiveKind::Grouping),
            ("I_theta", &ith, ConnectiveKind::Residual),
            ("I_eta", &ieta, ConnectiveKind::CoResidual),
        ];
        for (slot, c, expected) in slots {
            if !c.on_carrier(l) {
                return Err(LawError::CarrierMismatch);
            }
            if c.kind() != expected {
                return Err(LawError::KindMismatch {
                    slot,
                    expected,
                    found: c.kind(),
                });
            }
        }
        if !partition.on_carrier(l) || negator.as_ref().is_some_and(|n| !n.on_carrier(l)) {
            return Err(LawError::CarrierMismatch);
        }
        if options.budget == 0 {
            return Err(LawError::ZeroBudget);
        }
        let nith = Negator::induced(&ith)?;
        let nieta = Negator::induced(&ieta)?;
        let points = l.points();
        let en = enumerate_fuzzy_sets(l, partition.points(), options.budget, options.seed);
        let comparisons = comparisons(&partition);
        let facts = facts(&theta, &eta, negator.as_ref(), &ith, &ieta, &nith, &nieta, options.exec)?;
        Ok(LawContext {
            lattice,
            theta,
            eta,
            negator,
            ith,
            ieta,
            partition,
            options,
            facts,
            nith,
            nieta,
            points,
            sets: en.sets,
            sets_exhaustive: en.exhaustive,
            comparisons,
        })
    }

    /// Context whose implicators are derived from `theta` and `eta`.
    pub fn derived(
        theta: Connective<L>,
        eta: Connective<L>,
        negator: Option<Negator<L>>,
        partition: LFuzzyPartition<L>,
        options: LawOptions,
    ) -> Result<Self, LawError> {
        let ith = derive_residual(&theta)?;
        let ieta = derive_coresidual(&eta)?;
        Self::new(theta, eta, negator, ith, ieta, partition, options)
    }

    pub fn lattice(&self) -> &L {
        &self.lattice
    }

    pub fn sets(&self) -> &[Vec<L::Value>] {
        &self.sets
    }

    pub fn comparisons(&self) -> &[LFuzzyPartition<L>] {
        &self.comparisons
    }

    fn size(&self, d: Dim) -> u64 {
        (match d {
            Dim::Elem => self.points.len(),
            Dim::Set => self.sets.len(),
            Dim::J => self.partition.len(),
            Dim::X => self.partition.points(),
            Dim::Cmp => self.comparisons.len(),
        }) as u64
    }

    fn case(&self, dims: &[Dim], idx: &[usize]) -> Case<L::Value> {
        let mut c = Case::default();
        for (d, &i) in dims.iter().zip(idx) {
            match d {
                Dim::Elem => c.elems.push(self.points[i]),
                Dim::Set => c.sets.push(self.sets[i].clone()),
                Dim::J => c.js.push(i),
                Dim::X => c.xs.push(i),
                Dim::Cmp => c.cmps.push(i),
            }
        }
        c
    }

    fn render(&self, dims: &[Dim], c: &Case<L::Value>) -> Vec<String> {
        let l = self.lattice();
        let (mut e, mut s, mut j, mut x, mut k) = (0, 0, 0, 0, 0);
        dims.iter()
            .map(|d| match d {
                Dim::Elem => {
                    e += 1;
                    l.label(c.elems[e - 1])
                }
                Dim::Set => {
                    s += 1;
                    format_set(l, &c.sets[s - 1])
                }
                Dim::J => {
                    j += 1;
                    self.partition.labels()[c.js[j - 1]].clone()
                }
                Dim::X => {
                    x += 1;
                    self.partition.universe().points()[c.xs[x - 1]].clone()
                }
                Dim::Cmp => {
                    k += 1;
                    format!("cmp#{}", c.cmps[k - 1])
                }
            })
            .collect()
    }

    fn parse(&self, dims: &[Dim], witness: &[String]) -> Result<Case<L::Value>, LawError> {
        let l = self.lattice();
        let bad = |s: &str| LawError::BadWitness(s.to_string());
        if witness.len() < dims.len() {
            return Err(bad(&witness.join(" ")));
        }
        let mut c = Case::default();
        for (d, w) in dims.iter().zip(witness) {
            match d {
                Dim::Elem => c.elems.push(l.parse(w).ok_or_else(|| bad(w))?),
                Dim::Set => {
                    let f = parse_set(l, w).filter(|f| f.len() == self.partition.points());
                    c.sets.push(f.ok_or_else(|| bad(w))?);
                }
                Dim::J => c.js.push(self.partition.labels().iter().position(|s| s == w).ok_or_else(|| bad(w))?),
                Dim::X => c.xs.push(self.partition.universe().index_of(w).ok_or_else(|| bad(w))?),
                Dim::Cmp => {
                    let k: usize = w.strip_prefix("cmp#").and_then(|n| n.parse().ok()).ok_or_else(|| bad(w))?;
                    if k >= self.comparisons.len() {
                        return Err(bad(w));
                    }
                    c.cmps.push(k);
                }
            }
        }
        Ok(c)
    }

    // Transform helpers. Kinds that need a negator use `N`; callers are
    // gated on `Hyp::Negator`.

    fn conn(&self, kind: DirectKind) -> &Connective<L> {
        match kind {
            DirectKind::UpperTheta => &self.theta,
            DirectKind::LowerEta => &self.eta,
            DirectKind::UpperCoresidual => &self.ieta,
            DirectKind::LowerResidual => &self.ith,
        }
    }

    fn partner(&self, kind: DirectKind) -> &Connective<L> {
        match kind {
            DirectKind::UpperTheta => &self.ith,
            DirectKind::LowerEta => &self.ieta,
            DirectKind::UpperCoresidual => &self.eta,
            DirectKind::LowerResidual => &self.theta,
        }
    }

    fn tr_with(&self, p: &LFuzzyPartition<L>, kind: DirectKind, neg: Option<&Negator<L>>, f: &[L::Value]) -> Vec<L::Value> {
        direct_components(Exec::Sequential, kind, p, self.conn(kind), neg, f)
    }

    fn tr(&self, kind: DirectKind, f: &[L::Value]) -> Vec<L::Value> {
        self.tr_with(&self.partition, kind, self.negator.as_ref(), f)
    }

    fn at(&self, kind: DirectKind, f: &[L::Value], j: usize) -> L::Value {
        self.tr(kind, f)[j]
    }

    fn inv(&self, kind: DirectKind, comps: &[L::Value]) -> Vec<L::Value> {
        inverse_values(
            Exec::Sequential,
            kind,
            &self.partition,
            self.partner(kind),
            self.negator.as_ref(),
            comps,
        )
    }

    fn n(&self) -> &Negator<L> {
        self.negator.as_ref().expect("gated on a negator")
    }

    fn a(&self, j: usize, x: usize) -> L::Value {
        self.partition.value(j, x)
    }

    fn na(&self, j: usize, x: usize) -> L::Value {
        self.n().apply(self.a(j, x))
    }

    fn npts(&self) -> usize {
        self.partition.points()
    }
}

#[allow(clippy::too_many_arguments)]
fn facts<L: Lattice>(
    theta: &Connective<L>,
    eta: &Connective<L>,
    n: Option<&Negator<L>>,
    ith: &Connective<L>,
    ieta: &Connective<L>,
    nith: &Negator<L>,
    nieta: &Negator<L>,
    exec: Exec,
) -> Result<Facts, LawError> {
    let l = theta.lattice();
    let pts = l.points();
    let tp = connective_properties(theta);
    let ep = connective_properties(eta);
    let mut f = Facts {
        theta_overlap: validate_overlap_with(theta, l, exec)?.passed,
        eta_grouping: validate_grouping_with(eta, l, exec)?.passed,
        theta_adjoint: adjointness_check(theta, ith)?.passed,
        eta_adjoint: adjointness_check(eta, ieta)?.passed,
        negator: n.is_some(),
        theta_ep: tp.ep,
        eta_ep: ep.ep,
        ith_ep: has_exchange(ith),
        ieta_ep: has_exchange(ieta),
        theta_neutral: tp.neutral == Some(true),
        eta_neutral: ep.neutral == Some(true),
        theta_deflation: tp.deflation == Some(true),
        eta_deflation: ep.deflation == Some(true),
        nith_involutive: nith.is_involutive(),
        nieta_involutive: nieta.is_involutive(),
        double_residuation: pts.iter().all(|&u| {
            l.same(l.meet_all(pts.iter().map(|&v| ith.apply(ith.apply(u, v), v))).expect("nonempty"), u)
        }),
        double_coresiduation: pts.iter().all(|&u| {
            l.same(l.join_all(pts.iter().map(|&v| ieta.apply(ieta.apply(u, v), v))).expect("nonempty"), u)
        }),
        ..Facts::default()
    };
    if let Some(n) = n {
        let report = validate_negator(n, l)?;
        f.n_involutive = report.report.passed && report.involutive;
        f.n_strict = match report.strict {
            Some(s) => s,
            None => pts.iter().all(|&u| {
                pts.iter()
                    .all(|&v| !l.leq(u, v) || l.same(u, v) || (l.leq(n.apply(v), n.apply(u)) && !l.same(n.apply(v), n.apply(u))))
            }),
        };
        let d = check_duality(theta, eta, n, Some((ith, ieta)))?;
        let bad = |ax: &str| d.violations.iter().any(|v| v.axiom == ax);
        f.theta_eta_dual = !bad("eta(N,N)=N(theta)") && !bad("theta(N,N)=N(eta)");
        f.implicators_dual = f.n_involutive && !bad("I_eta(N,N)=N(I_theta)") && !bad("I_theta(N,N)=N(I_eta)");
    }
    Ok(f)
}

/// `P` itself followed by every partition obtained by raising one off-core
/// value `A_j(x)` to a larger non-top element.
fn comparisons<L: Lattice>(p: &LFuzzyPartition<L>) -> Vec<LFuzzyPartition<L>> {
    let l = p.lattice();
    let pts = l.points();
    let mut out = vec![p.clone()];
    'outer: for j in 0..p.len() {
        for x in 0..p.points() {
            let a = p.value(j, x);
            if l.is_top(a) {
                continue;
            }
            for &v in &pts {
                if out.len() >= COMPARISON_CAP {
                    break 'outer;
                }
                if l.leq(a, v) && !l.same(a, v) && !l.is_top(v) {
                    if let Ok(q) = p.with_value(j, x, v) {
                        out.push(q);
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LawStatus {
    Passed,
    Failed { witness: Vec<String> },
    HypothesisNotMet { unmet: Vec<String> },
}

impl LawStatus {
    pub fn label(&self) -> &'static str {
        match self {
            LawStatus::Passed => "passed",
            LawStatus::Failed { .. } => "failed",
            LawStatus::HypothesisNotMet { .. } => "hypothesis-not-met",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub id: String,
    pub anchor: String,
    #[serde(flatten)]
    pub status: LawStatus,
    pub cases: u64,
    pub coverage: Coverage,
}

impl LawReport {
    pub fn failed(&self) -> bool {
        matches!(self.status, LawStatus::Failed { .. })
    }
}

/// Ids in suite order.
pub fn law_ids() -> Vec<&'static str> {
    let mut ids: Vec<&'static str> = registry::<crate::lattice::TableLattice>().iter().map(|l| l.id).collect();
    ids.sort_by_key(|id| id_key(id));
    ids
}

pub fn run_law<L: Lattice>(id: &str, ctx: &LawContext<L>) -> Result<LawReport, LawError> {
    let law = registry::<L>()
        .into_iter()
        .find(|l| l.id == id)
        .ok_or_else(|| LawError::UnknownLaw(id.to_string()))?;
    Ok(evaluate(&law, ctx))
}

/// Every registered law, sorted by [`id_key`].
pub fn run_suite<L: Lattice>(ctx: &LawContext<L>) -> Vec<LawReport> {
    let mut laws = registry::<L>();
    laws.sort_by_key(|l| id_key(l.id));
    laws.iter().map(|law| evaluate(law, ctx)).collect()
}

/// Sort key for ids such as `L2.3.iv`: the letter prefix, then each dotted
/// segment as a number (roman numerals included).
pub fn id_key(id: &str) -> (String, Vec<u32>) {
    let split = id.find(|c: char| c.is_ascii_digit()).unwrap_or(id.len());
    let roman = |s: &str| {
        let digit = |c| match c {
            'i' => 1,
            'v' => 5,
            'x' => 10,
            _ => 0,
        };
        let ds: Vec<u32> = s.chars().map(digit).collect();
        (0..ds.len())
            .map(|k| if ds.get(k + 1).is_some_and(|&n| n > ds[k]) { -(ds[k] as i64) } else { ds[k] as i64 })
            .sum::<i64>() as u32
    };
    let segs = id[split..]
        .split('.')
        .map(|seg| seg.parse().unwrap_or_else(|_| roman(seg)))
        .collect();
    (id[..split].to_string(), segs)
}

/// True when the law still fails on `witness`.
pub fn replay_law<L: Lattice>(id: &str, ctx: &LawContext<L>, witness: &[String]) -> Result<bool, LawError> {
    let law = registry::<L>()
        .into_iter()
        .find(|l| l.id == id)
        .ok_or_else(|| LawError::UnknownLaw(id.to_string()))?;
    let case = ctx.parse(law.dims, witness)?;
    Ok((law.check)(ctx, &case).is_some())
}

fn evaluate<L: Lattice>(law: &Law<L>, ctx: &LawContext<L>) -> LawReport {
    let mut report = LawReport {
        id: law.id.to_string(),
        anchor: law.anchor.to_string(),
        status: LawStatus::Passed,
        cases: 0,
        coverage: Coverage::Exhaustive,
    };
    let unmet: Vec<String> = law
        .hyps
        .iter()
        .filter(|h| !h.holds(&ctx.facts))
        .map(|h| h.describe().to_string())
        .collect();
    if !unmet.is_empty() {
        report.status = LawStatus::HypothesisNotMet { unmet };
        return report;
    }
    let sizes: Vec<u64> = law.dims.iter().map(|&d| ctx.size(d)).collect();
    let total = sizes.iter().try_fold(1u64, |acc, &s| acc.checked_mul(s));
    let (count, sampled) = match total {
        Some(t) if t <= CASE_CAP => (t, None),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.options.seed);
            let draws: Vec<Vec<usize>> = (0..CASE_CAP)
                .map(|_| sizes.iter().map(|&s| rng.random_range(0..s) as usize).collect())
                .collect();
            (CASE_CAP, Some(draws))
        }
    };
    let decode = |i: u64| -> Vec<usize> {
        match &sampled {
            Some(d) => d[i as usize].clone(),
            None => {
                let mut k = i;
                let mut idx = vec![0; sizes.len()];
                for (slot, &s) in sizes.iter().enumerate().rev() {
                    idx[slot] = (k % s) as usize;
                    k /= s;
                }
                idx
            }
        }
    };
    let exec = ctx.options.exec.for_size((count as usize).saturating_mul(8));
    let hit = exec.find_first(0..count, |i| (law.check)(ctx, &ctx.case(law.dims, &decode(i))).is_some());
    let uses_sets = law.dims.contains(&Dim::Set) || law.dims.is_empty();
    report.coverage = if !ctx.lattice().is_exhaustive() {
        Coverage::Sampled
    } else if sampled.is_some() || (uses_sets && !ctx.sets_exhaustive) {
        Coverage::Partial
    } else {
        Coverage::Exhaustive
    };
    match hit {
        None => report.cases = count,
        Some(i) => {
            let case = ctx.case(law.dims, &decode(i));
            let note = (law.check)(ctx, &case).unwrap_or_default();
            let mut witness = ctx.render(law.dims, &case);
            if !note.is_empty() {
                witness.push(note);
            }
            report.cases = i + 1;
            report.status = LawStatus::Failed { witness };
        }
    }
    report
}

/// Aligned text table of reports.
pub fn render_table(reports: &[LawReport]) -> String {
    let rows: Vec<[String; 5]> = reports
        .iter()
        .map(|r| {
            let detail = match &r.status {
                LawStatus::Passed => String::new(),
                LawStatus::Failed { witness } => witness.join(" "),
                LawStatus::HypothesisNotMet { unmet } => unmet.join("; "),
            };
            let coverage = serde_json::to_value(r.coverage)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            [r.id.clone(), r.status.label().to_string(), r.cases.to_string(), coverage, detail]
        })
        .collect();
    let header = ["law", "status", "cases", "coverage", "detail"].map(String::from);
    let mut width = [0usize; 4];
    for row in std::iter::once(&header).chain(&rows) {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(&header).chain(&rows) {
        for (i, cell) in row.iter().enumerate() {
            if i < 4 {
                let _ = write!(out, "{cell:<w$}  ", w = width[i]);
            } else {
                out.push_str(cell);
            }
        }
        let trimmed = out.trim_end().len();
        out.truncate(trimmed);
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Law bodies.

fn first_fail(clauses: &[(&str, bool)]) -> Option<String> {
    clauses.iter().find(|(_, ok)| !ok).map(|(name, _)| name.to_string())
}

fn pw<L: Lattice>(c: &Connective<L>, f: &[L::Value], u: L::Value) -> Vec<L::Value> {
    f.iter().map(|&v| c.apply(v, u)).collect()
}

fn pw_left<L: Lattice>(c: &Connective<L>, u: L::Value, f: &[L::Value]) -> Vec<L::Value> {
    f.iter().map(|&v| c.apply(u, v)).collect()
}

fn fold<L: Lattice>(l: &L, join: bool, it: impl IntoIterator<Item = L::Value>) -> L::Value {
    if join { l.join_all(it) } else { l.meet_all(it) }.expect("nonempty family")
}

fn fold_sets<L: Lattice>(l: &L, join: bool, sets: &[Vec<L::Value>]) -> Vec<L::Value> {
    (0..sets[0].len()).map(|x| fold(l, join, sets.iter().map(|s| s[x]))).collect()
}

fn flag(name: &str, v: bool) -> String {
    format!("{name}={v}")
}

fn implicator_boundaries<L: Lattice>(ctx: &LawContext<L>, dual: bool) -> Option<String> {
    let l = ctx.lattice();
    let (o, i) = (l.bottom(), l.top());
    if dual {
        let c = &ctx.ieta;
        first_fail(&[
            ("I(0,0)=0", l.is_bottom(c.apply(o, o))),
            ("I(1,1)=0", l.is_bottom(c.apply(i, i))),
            ("I(0,1)=1", l.is_top(c.apply(o, i))),
        ])
    } else {
        let c = &ctx.ith;
        first_fail(&[
            ("I(0,0)=1", l.is_top(c.apply(o, o))),
            ("I(1,1)=1", l.is_top(c.apply(i, i))),
            ("I(1,0)=0", l.is_bottom(c.apply(i, o))),
        ])
    }
}

fn implicator_monotone<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>, dual: bool) -> Option<String> {
    let l = ctx.lattice();
    let imp = if dual { &ctx.ieta } else { &ctx.ith };
    let (u, v, w) = (c.elems[0], c.elems[1], c.elems[2]);
    if !l.leq(u, v) {
        return None;
    }
    first_fail(&[
        ("antitone in the first argument", l.leq(imp.apply(v, w), imp.apply(u, w))),
        ("monotone in the second argument", l.leq(imp.apply(w, u), imp.apply(w, v))),
    ])
}

fn implicator_op_np<L: Lattice>(ctx: &LawContext<L>, dual: bool) -> Option<String> {
    let (imp, base) = if dual { (&ctx.ieta, &ctx.eta) } else { (&ctx.ith, &ctx.theta) };
    let p = connective_properties(imp);
    let op_np = p.op == Some(true) && p.np == Some(true);
    let neutral = connective_properties(base).neutral == Some(true);
    (op_np != neutral).then(|| format!("{} {}", flag("op&np", op_np), flag("neutral", neutral)))
}

fn implicator_ip<L: Lattice>(ctx: &LawContext<L>, dual: bool) -> Option<String> {
    let (imp, base) = if dual { (&ctx.ieta, &ctx.eta) } else { (&ctx.ith, &ctx.theta) };
    let ip = connective_properties(imp).ip == Some(true);
    let deflation = connective_properties(base).deflation == Some(true);
    (ip != deflation).then(|| format!("{} {}", flag("ip", ip), flag("deflation", deflation)))
}

fn implicator_ep<L: Lattice>(ctx: &LawContext<L>, dual: bool) -> Option<String> {
    let (a, b) = if dual {
        (ctx.facts.ieta_ep, ctx.facts.eta_ep)
    } else {
        (ctx.facts.ith_ep, ctx.facts.theta_ep)
    };
    (a != b).then(|| format!("{} {}", flag("implicator ep", a), flag("connective ep", b)))
}

fn implicator_adjoint_bounds<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>, dual: bool) -> Option<String> {
    let l = ctx.lattice();
    let (u, v) = (c.elems[0], c.elems[1]);
    if dual {
        let (e, i) = (&ctx.eta, &ctx.ieta);
        first_fail(&[
            ("eta(u,I(u,v)) >= v", l.leq(v, e.apply(u, i.apply(u, v)))),
            ("I(u,eta(u,v)) <= v", l.leq(i.apply(u, e.apply(u, v)), v)),
            (
                "I(eta(u,v),1) = I(u,I(v,1))",
                l.same(i.apply(e.apply(u, v), l.top()), i.apply(u, i.apply(v, l.top()))),
            ),
        ])
    } else {
        let (t, i) = (&ctx.theta, &ctx.ith);
        first_fail(&[
            ("theta(u,I(u,v)) <= v", l.leq(t.apply(u, i.apply(u, v)), v)),
            ("I(u,theta(u,v)) >= v", l.leq(v, i.apply(u, t.apply(u, v)))),
            (
                "I(theta(u,v),0) = I(u,I(v,0))",
                l.same(i.apply(t.apply(u, v), l.bottom()), i.apply(u, i.apply(v, l.bottom()))),
            ),
        ])
    }
}

fn implicator_families<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>, dual: bool) -> Option<String> {
    let l = ctx.lattice();
    let u = c.elems[0];
    let vs = &c.elems[1..4];
    if dual {
        let i = &ctx.ieta;
        first_fail(&[
            (
                "I(u, join v) = join I(u,v)",
                l.same(i.apply(u, fold(l, true, vs.iter().copied())), fold(l, true, vs.iter().map(|&v| i.apply(u, v)))),
            ),
            (
                "I(meet v, u) = join I(v,u)",
                l.same(i.apply(fold(l, false, vs.iter().copied()), u), fold(l, true, vs.iter().map(|&v| i.apply(v, u)))),
            ),
        ])
    } else {
        let i = &ctx.ith;
        first_fail(&[
            (
                "I(u, meet v) = meet I(u,v)",
                l.same(i.apply(u, fold(l, false, vs.iter().copied())), fold(l, false, vs.iter().map(|&v| i.apply(u, v)))),
            ),
            (
                "I(join v, u) = meet I(v,u)",
                l.same(i.apply(fold(l, true, vs.iter().copied()), u), fold(l, false, vs.iter().map(|&v| i.apply(v, u)))),
            ),
        ])
    }
}

fn implicator_inequality<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>, dual: bool) -> Option<String> {
    let l = ctx.lattice();
    let u = c.elems[0];
    let vs = &c.elems[1..4];
    if dual {
        let i = &ctx.ieta;
        let lhs = i.apply(u, fold(l, false, vs.iter().copied()));
        let rhs = fold(l, false, vs.iter().map(|&v| i.apply(u, v)));
        (!l.leq(lhs, rhs)).then(String::new)
    } else {
        let i = &ctx.ith;
        let lhs = i.apply(u, fold(l, true, vs.iter().copied()));
        let rhs = fold(l, true, vs.iter().map(|&v| i.apply(u, v)));
        (!l.leq(rhs, lhs)).then(String::new)
    }
}

fn implicator_curry<L: Lattice>(ctx: &LawContext<L>, dual: bool) -> Option<String> {
    let l = ctx.lattice();
    let (base, i, ep) = if dual {
        (&ctx.eta, &ctx.ieta, ctx.facts.eta_ep)
    } else {
        (&ctx.theta, &ctx.ith, ctx.facts.theta_ep)
    };
    let pts = &ctx.points;
    let identity = pts.iter().all(|&u| {
        pts.iter()
            .all(|&v| pts.iter().all(|&w| l.same(i.apply(base.apply(u, v), w), i.apply(u, i.apply(v, w)))))
    });
    (identity != ep).then(|| format!("{} {}", flag("ep", ep), flag("curry identity", identity)))
}

const UT: DirectKind = DirectKind::UpperTheta;
const LE: DirectKind = DirectKind::LowerEta;
const UC: DirectKind = DirectKind::UpperCoresidual;
const LR: DirectKind = DirectKind::LowerResidual;

fn p3_3<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let (f, j) = (&c.sets[0], c.js[0]);
    let (ith, ieta) = (&ctx.ith, &ctx.ieta);
    let pts = &ctx.points;
    let meet_u = |kind| fold(l, false, pts.iter().map(|&u| ith.apply(ctx.at(kind, &pw(ith, f, u), j), u)));
    let join_u = |kind| fold(l, true, pts.iter().map(|&u| ieta.apply(ctx.at(kind, &pw(ieta, f, u), j), u)));
    first_fail(&[
        ("i: lower I_theta via upper theta", l.same(ctx.at(LR, f, j), meet_u(UT))),
        ("i: upper theta via lower I_theta", l.same(ctx.at(UT, f, j), meet_u(LR))),
        ("ii: lower eta via upper I_eta", l.same(ctx.at(LE, f, j), join_u(UC))),
        ("ii: upper I_eta via lower eta", l.same(ctx.at(UC, f, j), join_u(LE))),
    ])
}

fn p3_4<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let (f, j) = (&c.sets[0], c.js[0]);
    let (ith, ieta, n) = (&ctx.ith, &ctx.ieta, ctx.n());
    let nf = n.apply_all(f);
    let pts = &ctx.points;
    // g_u = I(N f, N u) with I = I_eta or I_theta.
    let g = |imp: &Connective<L>, u: L::Value| pw(imp, &nf, n.apply(u));
    let meet_u = |kind, imp| fold(l, false, pts.iter().map(|&u| ith.apply(n.apply(ctx.at(kind, &g(imp, u), j)), u)));
    let join_u = |kind, imp| fold(l, true, pts.iter().map(|&u| ieta.apply(n.apply(ctx.at(kind, &g(imp, u), j)), u)));
    first_fail(&[
        ("i", l.same(ctx.at(UT, f, j), meet_u(UC, ieta))),
        ("ii", l.same(ctx.at(UC, f, j), join_u(UT, ith))),
        ("iii", l.same(ctx.at(LE, f, j), join_u(LR, ith))),
        ("iv", l.same(ctx.at(LR, f, j), meet_u(LE, ieta))),
    ])
}

fn induced_duality<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>, upper: DirectKind, lower: DirectKind, n: &Negator<L>) -> Option<String> {
    let l = ctx.lattice();
    let (f, j) = (&c.sets[0], c.js[0]);
    let p = &ctx.partition;
    let nf = n.apply_all(f);
    let t = |k, g: &[L::Value]| ctx.tr_with(p, k, Some(n), g)[j];
    first_fail(&[
        ("i", l.same(t(upper, f), n.apply(t(lower, &nf)))),
        ("ii", l.same(t(lower, f), n.apply(t(upper, &nf)))),
    ])
}

fn p3_7<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let (b, f, j) = (&ctx.comparisons[c.cmps[0]], &c.sets[0], c.js[0]);
    let a = &ctx.partition;
    let neg = ctx.negator.as_ref();
    let t = |p, k| ctx.tr_with(p, k, neg, f)[j];
    first_fail(&[
        ("upper theta grows", l.leq(t(a, UT), t(b, UT))),
        ("lower eta shrinks", l.leq(t(b, LE), t(a, LE))),
        ("upper I_eta grows", l.leq(t(a, UC), t(b, UC))),
        ("lower I_theta shrinks", l.leq(t(b, LR), t(a, LR))),
    ])
}

fn core_bounds<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>, neutral: bool) -> Option<String> {
    let l = ctx.lattice();
    let (f, j, x) = (&c.sets[0], c.js[0], c.xs[0]);
    if !l.is_top(ctx.a(j, x)) {
        return None;
    }
    let fx = f[x];
    let (one, zero) = (l.top(), l.bottom());
    let b = |v: L::Value| if neutral { fx } else { v };
    first_fail(&[
        ("upper theta", l.leq(b(ctx.theta.apply(one, fx)), ctx.at(UT, f, j))),
        ("lower eta", l.leq(ctx.at(LE, f, j), b(ctx.eta.apply(zero, fx)))),
        ("upper I_eta", l.leq(b(ctx.ieta.apply(zero, fx)), ctx.at(UC, f, j))),
        ("lower I_theta", l.leq(ctx.at(LR, f, j), b(ctx.ith.apply(one, fx)))),
    ])
}

fn p3_9<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let (f, g) = (&c.sets[0], &c.sets[1]);
    if !l.leq_all(f, g) {
        return None;
    }
    DirectKind::ALL
        .into_iter()
        .find(|&k| !l.leq_all(&ctx.tr(k, f), &ctx.tr(k, g)))
        .map(|k| k.as_str().to_string())
}

fn p3_10<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let (u, f) = (c.elems[0], &c.sets[0]);
    let j = c.js[0];
    DirectKind::ALL
        .into_iter()
        .find(|&k| {
            let conn = ctx.conn(k);
            !l.same(ctx.at(k, &pw_left(conn, u, f), j), conn.apply(u, ctx.at(k, f, j)))
        })
        .map(|k| k.as_str().to_string())
}

fn p3_11<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let j = c.js[0];
    DirectKind::ALL
        .into_iter()
        .find(|&k| {
            let up = k.is_upper();
            let lhs = ctx.at(k, &fold_sets(l, up, &c.sets), j);
            let rhs = fold(l, up, c.sets.iter().map(|f| ctx.at(k, f, j)));
            !l.same(lhs, rhs)
        })
        .map(|k| k.as_str().to_string())
}

fn meet_na<L: Lattice>(ctx: &LawContext<L>, j: usize) -> L::Value {
    fold(ctx.lattice(), false, (0..ctx.npts()).map(|x| ctx.na(j, x)))
}

fn p3_12<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let (u, j) = (c.elems[0], c.js[0]);
    let k = constant::<L>(ctx.npts(), u);
    let m = meet_na(ctx, j);
    first_fail(&[
        ("upper theta = theta(1,u)", l.same(ctx.at(UT, &k, j), ctx.theta.apply(l.top(), u))),
        ("lower I_theta = I_theta(1,u)", l.same(ctx.at(LR, &k, j), ctx.ith.apply(l.top(), u))),
        ("lower eta = eta(meet N(A_j), u)", l.same(ctx.at(LE, &k, j), ctx.eta.apply(m, u))),
        ("upper I_eta = I_eta(meet N(A_j), u)", l.same(ctx.at(UC, &k, j), ctx.ieta.apply(m, u))),
        ("lower eta = eta(0,u)", l.same(ctx.at(LE, &k, j), ctx.eta.apply(l.bottom(), u))),
        ("upper I_eta = I_eta(0,u)", l.same(ctx.at(UC, &k, j), ctx.ieta.apply(l.bottom(), u))),
    ])
}

fn c3_2<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let (u, j) = (c.elems[0], c.js[0]);
    let k = constant::<L>(ctx.npts(), u);
    DirectKind::ALL
        .into_iter()
        .find(|&kind| !l.same(ctx.at(kind, &k, j), u))
        .map(|kind| kind.as_str().to_string())
}

fn p3_13<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let j = c.js[0];
    let n = ctx.npts();
    let (zero, one) = (l.bottom(), l.top());
    let all_le = ctx
        .points
        .iter()
        .all(|&u| l.same(ctx.at(LE, &constant::<L>(n, u), j), ctx.eta.apply(zero, u)));
    let zero_le = l.is_bottom(ctx.at(LE, &constant::<L>(n, zero), j));
    let all_uc = ctx
        .points
        .iter()
        .all(|&u| l.same(ctx.at(UC, &constant::<L>(n, u), j), ctx.ieta.apply(zero, u)));
    let one_uc = l.is_top(ctx.at(UC, &constant::<L>(n, one), j));
    first_fail(&[("i", all_le == zero_le), ("ii", all_uc == one_uc)])
}

/// `c` bounds every `term(x)` from above (`upper`) or below, and is the
/// least (greatest) element of `L` doing so.
fn extremal<L: Lattice>(ctx: &LawContext<L>, c: L::Value, terms: &[L::Value], upper: bool) -> bool {
    let l = ctx.lattice();
    let bounds = |u: L::Value| terms.iter().all(|&t| if upper { l.leq(t, u) } else { l.leq(u, t) });
    bounds(c)
        && ctx
            .points
            .iter()
            .filter(|&&u| bounds(u))
            .all(|&u| if upper { l.leq(c, u) } else { l.leq(u, c) })
}

fn terms<L: Lattice>(ctx: &LawContext<L>, kind: DirectKind, f: &[L::Value], j: usize) -> Vec<L::Value> {
    let conn = ctx.conn(kind);
    (0..ctx.npts())
        .map(|x| match kind {
            UT | LR => conn.apply(ctx.a(j, x), f[x]),
            _ => conn.apply(ctx.na(j, x), f[x]),
        })
        .collect()
}

fn least_greatest<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>, upper: DirectKind, lower: DirectKind) -> Option<String> {
    let (f, j) = (&c.sets[0], c.js[0]);
    first_fail(&[
        ("i", extremal(ctx, ctx.at(upper, f, j), &terms(ctx, upper, f, j), true)),
        ("ii", extremal(ctx, ctx.at(lower, f, j), &terms(ctx, lower, f, j), false)),
    ])
}

/// `pred` holds on all of `members` and on `c`, and `c` is least (greatest)
/// among all elements satisfying `pred`.
fn extremal_pred<L: Lattice>(ctx: &LawContext<L>, c: L::Value, members: &[L::Value], upper: bool, pred: impl Fn(L::Value) -> bool) -> bool {
    let l = ctx.lattice();
    members.iter().all(|&u| pred(u))
        && pred(c)
        && ctx
            .points
            .iter()
            .filter(|&&u| pred(u))
            .all(|&u| if upper { l.leq(c, u) } else { l.leq(u, c) })
}

fn bound_set<L: Lattice>(ctx: &LawContext<L>, t: &[L::Value], upper: bool) -> Vec<L::Value> {
    let l = ctx.lattice();
    ctx.points
        .iter()
        .copied()
        .filter(|&u| t.iter().all(|&v| if upper { l.leq(v, u) } else { l.leq(u, v) }))
        .collect()
}

fn p3_16<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let (f, j) = (&c.sets[0], c.js[0]);
    let (tu, tl) = (terms(ctx, UT, f, j), terms(ctx, LE, f, j));
    let i = extremal_pred(ctx, ctx.at(UT, f, j), &bound_set(ctx, &tu, true), true, |u| {
        l.is_top(fold(l, false, tu.iter().map(|&t| ctx.ith.apply(t, u))))
    });
    let ii = extremal_pred(ctx, ctx.at(LE, f, j), &bound_set(ctx, &tl, false), false, |v| {
        l.is_bottom(fold(l, true, tl.iter().map(|&t| ctx.ieta.apply(t, v))))
    });
    first_fail(&[("i", i), ("ii", ii)])
}

fn p3_17<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let (f, j) = (&c.sets[0], c.js[0]);
    let (tu, tl) = (terms(ctx, UC, f, j), terms(ctx, LR, f, j));
    let i = extremal_pred(ctx, ctx.at(UC, f, j), &bound_set(ctx, &tu, true), true, |u| {
        l.is_bottom(fold(l, true, tu.iter().map(|&t| ctx.ieta.apply(u, t))))
    });
    let ii = extremal_pred(ctx, ctx.at(LR, f, j), &bound_set(ctx, &tl, false), false, |v| {
        l.is_top(fold(l, false, tl.iter().map(|&t| ctx.ith.apply(v, t))))
    });
    first_fail(&[("i", i), ("ii", ii)])
}

fn sandwich<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>, upper: DirectKind, lower: DirectKind) -> Option<String> {
    let l = ctx.lattice();
    let f = &c.sets[0];
    let hi = ctx.inv(upper, &ctx.tr(upper, f));
    let lo = ctx.inv(lower, &ctx.tr(lower, f));
    first_fail(&[("f <= upper inverse", l.leq_all(f, &hi)), ("lower inverse <= f", l.leq_all(&lo, f))])
}

fn stability<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>, upper: DirectKind, lower: DirectKind) -> Option<String> {
    let l = ctx.lattice();
    let (f, j) = (&c.sets[0], c.js[0]);
    let again = |k| {
        let comps = ctx.tr(k, f);
        l.same(comps[j], ctx.at(k, &ctx.inv(k, &comps), j))
    };
    first_fail(&[("i", again(upper)), ("ii", again(lower))])
}

fn d5_i<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let f = &c.sets[0];
    let n = ctx.npts();
    let ones: Vec<Vec<L::Value>> = (0..n).map(|x| singleton(l, n, x)).collect();
    let a: Vec<L::Value> = (0..n)
        .map(|y| fold(l, true, (0..n).map(|x| ctx.theta.apply(f[x], ones[x][y]))))
        .collect();
    let b: Vec<L::Value> = (0..n)
        .map(|y| fold(l, false, (0..n).map(|x| ctx.eta.apply(f[x], ctx.n().apply(ones[x][y])))))
        .collect();
    first_fail(&[("join of theta", l.same_all(&a, f)), ("meet of eta", l.same_all(&b, f))])
}

fn d5_ii<L: Lattice>(ctx: &LawContext<L>, c: &Case<L::Value>) -> Option<String> {
    let l = ctx.lattice();
    let f = &c.sets[0];
    let n = ctx.npts();
    let (ni, ne) = (&ctx.nith, &ctx.nieta);
    let ones: Vec<Vec<L::Value>> = (0..n).map(|x| singleton(l, n, x)).collect();
    let a: Vec<L::Value> = (0..n)
        .map(|y| fold(l, true, (0..n).map(|x| ctx.ieta.apply(ne.apply(f[x]), ones[x][y]))))
        .collect();
    let b: Vec<L::Value> = (0..n)
        .map(|y| fold(l, false, (0..n).map(|x| ctx.ith.apply(ni.apply(f[x]), ni.apply(ones[x][y])))))
        .collect();
    first_fail(&[("join of I_eta", l.same_all(&a, f)), ("meet of I_theta", l.same_all(&b, f))])
}

fn system_check<L: Lattice>(ctx: &LawContext<L>) -> SystemCheck {
    SystemCheck {
        budget: ctx.options.budget,
        seed: ctx.options.seed,
        exec: ctx.options.exec,
    }
}

fn round_trip<L: Lattice>(ctx: &LawContext<L>, kind: DirectKind, neg: Option<&Negator<L>>) -> Option<String> {
    let conn = ctx.conn(kind);
    let opts = system_check(ctx);
    let sys = match system_from_partition(&ctx.partition, kind, conn, neg) {
        Ok(s) => s,
        Err(e) => return Some(e.to_string()),
    };
    let report = if kind.is_upper() {
        validate_upper_system_with(&sys, conn, &opts)
    } else {
        validate_lower_system_with(&sys, conn, &opts)
    };
    match report {
        Ok(r) if !r.passed => {
            let v = &r.violations[0];
            return Some(format!("axiom {} at {}", v.axiom, v.witness.join(" ")));
        }
        Err(e) => return Some(e.to_string()),
        Ok(_) => {}
    }
    let back = match partition_from_system(&sys) {
        Ok(p) => p,
        Err(e) => return Some(e.to_string()),
    };
    if back != ctx.partition {
        return Some("extracted partition differs".into());
    }
    let again = match system_from_partition(&back, kind, conn, neg) {
        Ok(s) => s,
        Err(e) => return Some(e.to_string()),
    };
    match same_operator(&sys, &again, &opts) {
        Ok(None) => None,
        Ok(Some(f)) => Some(format!("operators differ at {}", format_set(ctx.lattice(), &f))),
        Err(e) => Some(e.to_string()),
    }
}

fn system_duality<L: Lattice>(
    ctx: &LawContext<L>,
    upper: (DirectKind, Option<&Negator<L>>),
    lower: (DirectKind, Option<&Negator<L>>),
    n: &Negator<L>,
) -> Option<String> {
    let build = |(k, neg)| system_from_partition(&ctx.partition, k, ctx.conn(k), neg);
    let (u, h) = match (build(upper), build(lower)) {
        (Ok(u), Ok(h)) => (u, h),
        (Err(e), _) | (_, Err(e)) => return Some(e.to_string()),
    };
    match check_system_duality(&u, &h, n, &system_check(ctx)) {
        Ok(r) if r.passed => None,
        Ok(r) => {
            let v = &r.violations[0];
            Some(format!("{} at {}", v.axiom, v.witness.join(" ")))
        }
        Err(e) => Some(e.to_string()),
    }
}

use Dim::{Cmp, Elem, Set, J, X};
use Hyp::*;

const E3: &[Dim] = &[Elem, Elem, Elem];
const E2: &[Dim] = &[Elem, Elem];
const E4: &[Dim] = &[Elem, Elem, Elem, Elem];
const SJ: &[Dim] = &[Set, J];
const ONE: &[Dim] = &[];
const LEM: &[Hyp] = &[ThetaOverlap, ThetaAdjoint];
const DUAL: &[Hyp] = &[EtaGrouping, EtaAdjoint];
const TRANSFORMS: &[Hyp] = &[Negator, ThetaAdjoint, EtaAdjoint];
const BRIDGE: &[Hyp] = &[
    NInvolutive,
    ThetaEtaDual,
    ImplicatorsDual,
    ThetaEp,
    EtaEp,
    ThetaAdjoint,
    EtaAdjoint,
    DoubleResiduation,
    DoubleCoresiduation,
];

macro_rules! law {
    ($id:expr, $anchor:expr, $hyps:expr, $dims:expr, $check:expr) => {
        Law {
            id: $id,
            anchor: $anchor,
            hyps: $hyps,
            dims: $dims,
            check: $check,
        }
    };
}

/// The fixed law registry.
pub fn registry<L: Lattice>() -> Vec<Law<L>> {
    vec![
        law!("L2.1", "theta(u,v) <= w <=> u <= I_theta(v,w); eta(u,v) >= w <=> u >= I_eta(v,w)", &[ThetaOverlap, EtaGrouping], E3, |ctx, c| {
            let args = [c.elems[0], c.elems[1], c.elems[2]];
            let ok = |conn: &Connective<L>, imp: &Connective<L>| {
                ["forward", "backward"]
                    .into_iter()
                    .all(|ax| crate::connectives::adjointness_holds(conn, imp, ax, &args))
            };
            first_fail(&[("theta/I_theta", ok(&ctx.theta, &ctx.ith)), ("eta/I_eta", ok(&ctx.eta, &ctx.ieta))])
        }),
        law!("L2.2.i", "I_theta(0,0) = I_theta(1,1) = 1, I_theta(1,0) = 0", LEM, ONE, |ctx, _| implicator_boundaries(ctx, false)),
        law!("L2.2.ii", "u <= v => I_theta(u,w) >= I_theta(v,w), I_theta(w,u) <= I_theta(w,v)", LEM, E3, |ctx, c| implicator_monotone(ctx, c, false)),
        law!("L2.2.iii", "I_theta has OP and NP <=> 1 is neutral for theta", LEM, ONE, |ctx, _| implicator_op_np(ctx, false)),
        law!("L2.2.iv", "I_theta(u,u) = 1 <=> theta is deflation", LEM, ONE, |ctx, _| implicator_ip(ctx, false)),
        law!("L2.2.v", "I_theta has EP <=> theta has EP", LEM, ONE, |ctx, _| implicator_ep(ctx, false)),
        law!("L2.3.i", "theta(u,I_theta(u,v)) <= v <= I_theta(u,theta(u,v)); I_theta(theta(u,v),0) = I_theta(u,I_theta(v,0))", LEM, E2, |ctx, c| implicator_adjoint_bounds(ctx, c, false)),
        law!("L2.3.ii", "I_theta(u, meet v_i) = meet I_theta(u,v_i); I_theta(join u_i, v) = meet I_theta(u_i,v)", LEM, E4, |ctx, c| implicator_families(ctx, c, false)),
        law!("L2.3.iii", "I_theta(u, join v_i) >= join I_theta(u,v_i)", LEM, E4, |ctx, c| implicator_inequality(ctx, c, false)),
        law!("L2.3.iv", "theta has EP <=> I_theta(theta(u,v),w) = I_theta(u,I_theta(v,w))", LEM, ONE, |ctx, _| implicator_curry(ctx, false)),
        law!("D2.i", "I_eta(0,0) = I_eta(1,1) = 0, I_eta(0,1) = 1", DUAL, ONE, |ctx, _| implicator_boundaries(ctx, true)),
        law!("D2.ii", "u <= v => I_eta(u,w) >= I_eta(v,w), I_eta(w,u) <= I_eta(w,v)", DUAL, E3, |ctx, c| implicator_monotone(ctx, c, true)),
        law!("D2.iii", "I_eta has OP and NP <=> 0 is neutral for eta", DUAL, ONE, |ctx, _| implicator_op_np(ctx, true)),
        law!("D2.iv", "I_eta(u,u) = 0 <=> eta is deflation", DUAL, ONE, |ctx, _| implicator_ip(ctx, true)),
        law!("D2.v", "I_eta has EP <=> eta has EP", DUAL, ONE, |ctx, _| implicator_ep(ctx, true)),
        law!("D2.vi", "eta(u,I_eta(u,v)) >= v >= I_eta(u,eta(u,v)); I_eta(eta(u,v),1) = I_eta(u,I_eta(v,1))", DUAL, E2, |ctx, c| implicator_adjoint_bounds(ctx, c, true)),
        law!("D2.vii", "I_eta(u, join v_i) = join I_eta(u,v_i); I_eta(meet u_i, v) = join I_eta(u_i,v)", DUAL, E4, |ctx, c| implicator_families(ctx, c, true)),
        law!("D2.viii", "I_eta(u, meet v_i) <= meet I_eta(u,v_i)", DUAL, E4, |ctx, c| implicator_inequality(ctx, c, true)),
        law!("D2.ix", "eta has EP <=> I_eta(eta(u,v),w) = I_eta(u,I_eta(v,w))", DUAL, ONE, |ctx, _| implicator_curry(ctx, true)),
        law!("P3.1", "F^theta_j[f] = N(F_eta_j[N f]); F_eta_j[f] = N(F^theta_j[N f])", &[NInvolutive, ThetaEtaDual], SJ, |ctx, c| {
            induced_duality(ctx, c, UT, LE, ctx.n())
        }),
        law!("P3.2", "F^I_eta_j[f] = N(F_I_theta_j[N f]); F_I_theta_j[f] = N(F^I_eta_j[N f])", &[NInvolutive, ImplicatorsDual], SJ, |ctx, c| {
            induced_duality(ctx, c, UC, LR, ctx.n())
        }),
        law!("P3.3", "F_I_theta_j[f] = meet_u I_theta(F^theta_j[I_theta(f,u)], u) and the three companion identities", BRIDGE, SJ, p3_3),
        law!("P3.4", "F^theta_j[f] = meet_u I_theta(N(F^I_eta_j[I_eta(N f, N u)]), u) and the three companion identities", BRIDGE, SJ, p3_4),
        law!("P3.5", "F^theta_j[f] = N'(F_I_theta_j[N' f]) with N' = I_theta(-,0)", &[NithInvolutive, ThetaAdjoint], SJ, |ctx, c| {
            induced_duality(ctx, c, UT, LR, &ctx.nith)
        }),
        law!("P3.6", "F_eta_j[f] = N''(F^I_eta_j[N'' f]) with N'' = I_eta(-,1)", &[NietaInvolutive, EtaAdjoint], SJ, |ctx, c| {
            induced_duality(ctx, c, UC, LE, &ctx.nieta)
        }),
        law!("P3.7", "A_j <= B_j => F^theta_j, F^I_eta_j grow and F_eta_j, F_I_theta_j shrink", TRANSFORMS, &[Cmp, Set, J], p3_7),
        law!("P3.8", "x in core(A_j) => F^theta_j[f] >= theta(1,f(x)), F_eta_j[f] <= eta(0,f(x)), F^I_eta_j[f] >= I_eta(0,f(x)), F_I_theta_j[f] <= I_theta(1,f(x))", TRANSFORMS, &[Set, J, X], |ctx, c| core_bounds(ctx, c, false)),
        law!("C3.1", "x in core(A_j) => F^theta_j[f] >= f(x) >= F_eta_j[f], F^I_eta_j[f] >= f(x) >= F_I_theta_j[f]", &[Negator, ThetaAdjoint, EtaAdjoint, ThetaNeutral, EtaNeutral], &[Set, J, X], |ctx, c| core_bounds(ctx, c, true)),
        law!("P3.9", "f <= g => F_j[f] <= F_j[g] for all four kinds", TRANSFORMS, &[Set, Set], p3_9),
        law!("P3.10", "F_j[c(u,f)] = c(u, F_j[f]) for each kind's connective c", &[Negator, ThetaAdjoint, EtaAdjoint, ThetaEp, EtaEp, IthEp, IetaEp], &[Elem, Set, J], p3_10),
        law!("P3.11", "F^_j[join f_k] = join F^_j[f_k]; F__j[meet f_k] = meet F__j[f_k]", TRANSFORMS, &[Set, Set, Set, J], p3_11),
        law!("P3.12", "F^theta_j[u] = theta(1,u), F_I_theta_j[u] = I_theta(1,u), F_eta_j[u] = eta(meet_x N(A_j(x)), u), F^I_eta_j[u] = I_eta(meet_x N(A_j(x)), u)", TRANSFORMS, &[Elem, J], p3_12),
        law!("C3.2", "with neutral elements every transform fixes constants", &[Negator, ThetaAdjoint, EtaAdjoint, ThetaNeutral, EtaNeutral], &[Elem, J], c3_2),
        law!("P3.13", "(F_eta_j[u] = eta(0,u) for all u) <=> F_eta_j[0] = 0; (F^I_eta_j[u] = I_eta(0,u) for all u) <=> F^I_eta_j[1] = 1", TRANSFORMS, &[J], p3_13),
        law!("P3.14", "F^theta_j[f] = least upper bound of theta(A_j(x),f(x)); F_eta_j[f] = greatest lower bound of eta(N(A_j(x)),f(x))", TRANSFORMS, SJ, |ctx, c| least_greatest(ctx, c, UT, LE)),
        law!("P3.15", "F^I_eta_j[f] = least upper bound of I_eta(N(A_j(x)),f(x)); F_I_theta_j[f] = greatest lower bound of I_theta(A_j(x),f(x))", TRANSFORMS, SJ, |ctx, c| least_greatest(ctx, c, UC, LR)),
        law!("P3.16", "F^theta_j[f] = least u with meet_x I_theta(theta(A_j(x),f(x)),u) = 1; F_eta_j[f] = greatest v with join_x I_eta(eta(N(A_j(x)),f(x)),v) = 0", &[Negator, ThetaAdjoint, EtaAdjoint, ThetaDeflation, EtaDeflation], SJ, p3_16),
        law!("P3.17", "F^I_eta_j[f] = least u with join_x I_eta(u, I_eta(N(A_j(x)),f(x))) = 0; F_I_theta_j[f] = greatest v with meet_x I_theta(v, I_theta(A_j(x),f(x))) = 1", &[Negator, ThetaAdjoint, EtaAdjoint, ThetaDeflation, EtaDeflation], SJ, p3_17),
        law!("P4.1", "f <= inverse(I_theta, F^theta[f]); inverse(theta, F_I_theta[f]) <= f", &[ThetaAdjoint], &[Set], |ctx, c| sandwich(ctx, c, UT, LR)),
        law!("P4.2", "f <= inverse(eta, F^I_eta[f]); inverse(I_eta, F_eta[f]) <= f", &[Negator, EtaAdjoint], &[Set], |ctx, c| sandwich(ctx, c, UC, LE)),
        law!("P4.3", "F^theta_j[inverse(I_theta, F^theta[f])] = F^theta_j[f]; F_I_theta_j[inverse(theta, F_I_theta[f])] = F_I_theta_j[f]", &[ThetaAdjoint], SJ, |ctx, c| stability(ctx, c, UT, LR)),
        law!("P4.4", "F^I_eta_j[inverse(eta, F^I_eta[f])] = F^I_eta_j[f]; F_eta_j[inverse(I_eta, F_eta[f])] = F_eta_j[f]", &[Negator, EtaAdjoint], SJ, |ctx, c| stability(ctx, c, UC, LE)),
        law!("D5.i", "f = join_x theta(f(x), 1_x) = meet_x eta(f(x), N(1_x))", &[Negator, ThetaNeutral, EtaNeutral], &[Set], d5_i),
        law!("D5.ii", "f = join_x I_eta(N''(f(x)), 1_x) = meet_x I_theta(N'(f(x)), N'(1_x))", &[NithInvolutive, NietaInvolutive, ThetaAdjoint, EtaAdjoint], &[Set], d5_ii),
        law!("P5.1", "partition -> upper theta system -> partition is the identity", &[ThetaOverlap, ThetaNeutral, ThetaEp], ONE, |ctx, _| {
            round_trip(ctx, UT, None)
        }),
        law!("P5.2", "partition -> upper I_eta system -> partition is the identity", &[Negator, EtaAdjoint, IetaEp, NietaInvolutive], ONE, |ctx, _| {
            round_trip(ctx, UC, ctx.negator.as_ref())
        }),
        law!("P5.3", "partition -> lower eta system -> partition is the identity", &[EtaGrouping, EtaEp, EtaNeutral, NInvolutive], ONE, |ctx, _| {
            round_trip(ctx, LE, ctx.negator.as_ref())
        }),
        law!("P5.4", "partition -> lower I_theta system -> partition is the identity", &[ThetaAdjoint, IthEp, NithInvolutive], ONE, |ctx, _| {
            round_trip(ctx, LR, None)
        }),
        law!("P5.5", "U_theta[f] = N(H_eta[N f]) and H_eta[f] = N(U_theta[N f]) with a shared partition", &[NInvolutive, ThetaEtaDual], ONE, |ctx, _| {
            system_duality(ctx, (UT, None), (LE, ctx.negator.as_ref()), ctx.n())
        }),
        law!("P5.6", "U_I_eta[f] = N(H_I_theta[N f]) and H_I_theta[f] = N(U_I_eta[N f]) with a shared partition", &[NInvolutive, ImplicatorsDual, ThetaAdjoint, EtaAdjoint], ONE, |ctx, _| {
            system_duality(ctx, (UC, ctx.negator.as_ref()), (LR, ctx.negator.as_ref()), ctx.n())
        }),
        law!("P5.7", "U_theta[f] = N'(H_I_theta[N' f]) and H_I_theta[f] = N'(U_theta[N' f]) with a shared partition", &[NithInvolutive, ThetaAdjoint], ONE, |ctx, _| {
            system_duality(ctx, (UT, None), (LR, Some(&ctx.nith)), &ctx.nith)
        }),
        law!("P5.8", "U_I_eta[f] = N''(H_eta[N'' f]) and H_eta[f] = N''(U_I_eta[N'' f]) with a shared partition", &[NietaInvolutive, EtaAdjoint], ONE, |ctx, _| {
            system_duality(ctx, (UC, Some(&ctx.nieta)), (LE, Some(&ctx.nieta)), &ctx.nieta)
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectives::ClosedForm;
    use crate::lattice::{Elem, TableLattice};
    use crate::partitions::{validate_partition, Universe};

    fn vals(l: &TableLattice, s: &str) -> Vec<Elem> {
        s.split(',').map(|x| l.elem(x).unwrap()).collect()
    }

    fn fig1_ctx(ieta: Option<ClosedForm>) -> LawContext<TableLattice> {
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
        let ieta = match ieta {
            Some(form) => Connective::closed(l.clone(), form).unwrap(),
            None => derive_coresidual(&eta).unwrap(),
        };
        LawContext::new(theta, eta, Some(n), ith, ieta, p, LawOptions::default()).unwrap()
    }

    #[test]
    fn registry_ids_are_unique() {
        let ids = law_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
        assert!(ids.contains(&"P3.11") && ids.contains(&"D2.ix") && ids.contains(&"P5.8"));
    }

    #[test]
    fn figure1_suite_never_fails() {
        let ctx = fig1_ctx(None);
        for r in run_suite(&ctx) {
            assert!(!r.failed(), "{r:?}");
        }
    }

    #[test]
    fn sandwich_is_exhaustive() {
        let ctx = fig1_ctx(None);
        let r = run_law("P4.1", &ctx).unwrap();
        assert_eq!(r.status, LawStatus::Passed);
        assert_eq!(r.cases, 512);
        assert_eq!(r.coverage, Coverage::Exhaustive);
    }

    #[test]
    fn missing_negator_gates() {
        let mut ctx = fig1_ctx(None);
        ctx.negator = None;
        ctx.facts.negator = false;
        ctx.facts.n_involutive = false;
        let r = run_law("P3.1", &ctx).unwrap();
        assert!(matches!(r.status, LawStatus::HypothesisNotMet { .. }));
    }

    #[test]
    fn ex22_breaks_adjointness_with_replayable_witness() {
        let ctx = fig1_ctx(Some(ClosedForm::Ex22));
        let r = run_law("L2.1", &ctx).unwrap();
        let LawStatus::Failed { witness } = &r.status else {
            panic!("{r:?}");
        };
        assert!(replay_law("L2.1", &ctx, witness).unwrap());
    }

    #[test]
    fn ids_sort_naturally() {
        let ids = law_ids();
        let pos = |id| ids.iter().position(|&x| x == id).unwrap();
        assert!(pos("D2.v") < pos("D2.ix"));
        assert!(pos("P3.2") < pos("P3.10"));
        assert!(pos("C3.2") < pos("D2.i") && pos("L2.3.iv") < pos("P3.1"));
    }

    #[test]
    fn unknown_law() {
        let ctx = fig1_ctx(None);
        assert_eq!(run_law("P9.9", &ctx).unwrap_err(), LawError::UnknownLaw("P9.9".into()));
    }

    #[test]
    fn suite_is_deterministic() {
        let ctx = fig1_ctx(None);
        let a = serde_json::to_string(&run_suite(&ctx)).unwrap();
        let b = serde_json::to_string(&run_suite(&ctx)).unwrap();
        assert_eq!(a, b);
        assert!(render_table(&run_suite(&ctx)).starts_with("law"));
    }
}
