//! Overlap and grouping maps, negators and the implicators they induce.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::lattice::{EmptyFamily, Lattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConnectiveError {
    #[error("operands live on different carriers")]
    CarrierMismatch,
    #[error("expected a {expected} connective, got {found}")]
    KindMismatch {
        expected: ConnectiveKind,
        found: ConnectiveKind,
    },
    #[error("closed form `{0}` needs the unit interval")]
    NeedsUnitInterval(ClosedForm),
    #[error("no registered closed form for the implicator of `{0}` on the unit interval")]
    NoClosedForm(String),
    #[error("tables need a finite carrier")]
    NotFinite,
    #[error("table has {found} entries where {expected} were expected")]
    TableShape { expected: usize, found: usize },
    #[error("`{0}` is not an element of the carrier")]
    UnknownValue(String),
    #[error("unknown closed form `{0}`")]
    UnknownForm(String),
    #[error("`{0}` is not an implicator")]
    NotAnImplicator(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnectiveKind {
    Overlap,
    Grouping,
    #[serde(rename = "residual-implicator")]
    Residual,
    #[serde(rename = "co-residual-implicator")]
    CoResidual,
}

impl ConnectiveKind {
    pub fn is_implicator(self) -> bool {
        matches!(self, ConnectiveKind::Residual | ConnectiveKind::CoResidual)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConnectiveKind::Overlap => "overlap",
            ConnectiveKind::Grouping => "grouping",
            ConnectiveKind::Residual => "residual-implicator",
            ConnectiveKind::CoResidual => "co-residual-implicator",
        }
    }
}

impl fmt::Display for ConnectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Named formulas. `Meet`, `Join`, `Godel` and `Ex22` make sense on any
/// lattice; the rest are arithmetic and need the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClosedForm {
    /// `u ∧ v`
    #[serde(rename = "theta_M")]
    Meet,
    /// `u ∨ v`
    #[serde(rename = "eta_M")]
    Join,
    #[serde(rename = "product")]
    Product,
    /// `u + v - uv`
    #[serde(rename = "probsum")]
    ProbSum,
    /// `1` if `u ≤ v`, else `v`
    #[serde(rename = "godel")]
    Godel,
    /// `1` if `u ≤ v`, else `v / u`
    #[serde(rename = "goguen")]
    Goguen,
    /// `0` if `u ≥ v`, else `v`
    #[serde(rename = "dual-godel")]
    DualGodel,
    /// `0` if `u ≥ v`, else `(v - u) / (1 - u)`
    #[serde(rename = "dual-goguen")]
    DualGoguen,
    /// `0` if `u ≤ v`, else `u`. Kept for replaying printed values; it is
    /// not the co-residual of the join.
    #[serde(rename = "ex22")]
    Ex22,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 9] = [
        ClosedForm::Meet,
        ClosedForm::Join,
        ClosedForm::Product,
        ClosedForm::ProbSum,
        ClosedForm::Godel,
        ClosedForm::Goguen,
        ClosedForm::DualGodel,
        ClosedForm::DualGoguen,
        ClosedForm::Ex22,
    ];

    pub fn kind(self) -> ConnectiveKind {
        use ClosedForm::*;
        match self {
            Meet | Product => ConnectiveKind::Overlap,
            Join | ProbSum => ConnectiveKind::Grouping,
            Godel | Goguen => ConnectiveKind::Residual,
            DualGodel | DualGoguen | Ex22 => ConnectiveKind::CoResidual,
        }
    }

    pub fn name(self) -> &'static str {
        use ClosedForm::*;
        match self {
            Meet => "theta_M",
            Join => "eta_M",
            Product => "product",
            ProbSum => "probsum",
            Godel => "godel",
            Goguen => "goguen",
            DualGodel => "dual-godel",
            DualGoguen => "dual-goguen",
            Ex22 => "ex22",
        }
    }

    pub fn parse(s: &str) -> Option<ClosedForm> {
        use ClosedForm::*;
        let form = match s.trim().to_ascii_lowercase().as_str() {
            "theta_m" | "min" | "meet" => Meet,
            "eta_m" | "max" | "join" => Join,
            "product" | "prod" => Product,
            "probsum" | "probabilistic-sum" => ProbSum,
            "godel" | "gödel" => Godel,
            "goguen" => Goguen,
            "dual-godel" | "dual-gödel" => DualGodel,
            "dual-goguen" => DualGoguen,
            "ex22" | "ex2.2" => Ex22,
            _ => return None,
        };
        Some(form)
    }

    pub fn lattice_generic(self) -> bool {
        matches!(self, ClosedForm::Meet | ClosedForm::Join | ClosedForm::Godel | ClosedForm::Ex22)
    }

    /// The registered residual (overlap) or co-residual (grouping) partner.
    pub fn implicator(self) -> Option<ClosedForm> {
        match self {
            ClosedForm::Meet => Some(ClosedForm::Godel),
            ClosedForm::Product => Some(ClosedForm::Goguen),
            ClosedForm::Join => Some(ClosedForm::DualGodel),
            ClosedForm::ProbSum => Some(ClosedForm::DualGoguen),
            _ => None,
        }
    }

    fn eval<L: Lattice>(self, l: &L, a: L::Value, b: L::Value) -> L::Value {
        use ClosedForm::*;
        match self {
            Meet => l.meet(a, b),
            Join => l.join(a, b),
            Godel => {
                if l.leq(a, b) {
                    l.top()
                } else {
                    b
                }
            }
            DualGodel => {
                if l.leq(b, a) {
                    l.bottom()
                } else {
                    b
                }
            }
            Ex22 => {
                if l.leq(a, b) {
                    l.bottom()
                } else {
                    a
                }
            }
            Product | ProbSum | Goguen | DualGoguen => {
                let x = l.as_real(a).expect("checked at construction");
                let y = l.as_real(b).expect("checked at construction");
                let r = match self {
                    Product => x * y,
                    ProbSum => x + y - x * y,
                    Goguen if l.leq(a, b) => 1.0,
                    Goguen => y / x,
                    DualGoguen if l.leq(b, a) => 0.0,
                    DualGoguen => (y - x) / (1.0 - x),
                    _ => unreachable!(),
                };
                l.from_real(r.clamp(0.0, 1.0)).expect("unit interval accepts [0,1]")
            }
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a connective was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    Table,
    Closed(ClosedForm),
    /// Residual or co-residual computed from another connective.
    Derived(String),
}

/// A binary operation on a carrier tagged with its role. On finite carriers
/// the full table is materialized, so `apply` is a lookup.
#[derive(Debug, Clone)]
pub struct Connective<L: Lattice> {
    carrier: Arc<L>,
    kind: ConnectiveKind,
    name: String,
    form: Form,
    closed: Option<ClosedForm>,
    table: Option<Arc<[L::Value]>>,
    n: usize,
}

impl<L: Lattice> Connective<L> {
    /// A connective from a row-major table over `carrier.points()`.
    pub fn from_table(
        carrier: Arc<L>,
        kind: ConnectiveKind,
        name: impl Into<String>,
        rows: Vec<Vec<L::Value>>,
    ) -> Result<Self, ConnectiveError> {
        if !carrier.is_exhaustive() {
            return Err(ConnectiveError::NotFinite);
        }
        let n = carrier.points().len();
        if rows.len() != n {
            return Err(ConnectiveError::TableShape { expected: n, found: rows.len() });
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(ConnectiveError::TableShape { expected: n, found: row.len() });
            }
            for v in row {
                if carrier.index_of(v).is_none() {
                    return Err(ConnectiveError::UnknownValue(format!("{v:?}")));
                }
                flat.push(v);
            }
        }
        Ok(Connective {
            carrier,
            kind,
            name: name.into(),
            form: Form::Table,
            closed: None,
            table: Some(flat.into()),
            n,
        })
    }

    /// A named closed form; its kind is implied by the formula.
    pub fn closed(carrier: Arc<L>, form: ClosedForm) -> Result<Self, ConnectiveError> {
        if !form.lattice_generic() && carrier.as_real(carrier.top()).is_none() {
            return Err(ConnectiveError::NeedsUnitInterval(form));
        }
        let mut c = Connective {
            carrier,
            kind: form.kind(),
            name: form.name().to_string(),
            form: Form::Closed(form),
            closed: Some(form),
            table: None,
            n: 0,
        };
        c.materialize();
        Ok(c)
    }

    /// Tabulates `f` over the points of a finite carrier.
    pub fn from_fn<F>(carrier: Arc<L>, kind: ConnectiveKind, name: impl Into<String>, f: F) -> Result<Self, ConnectiveError>
    where
        F: Fn(L::Value, L::Value) -> L::Value,
    {
        if !carrier.is_exhaustive() {
            return Err(ConnectiveError::NotFinite);
        }
        let pts = carrier.points();
        let rows = pts.iter().map(|&a| pts.iter().map(|&b| f(a, b)).collect()).collect();
        Self::from_table(carrier, kind, name, rows)
    }

    fn materialize(&mut self) {
        if !self.carrier.is_exhaustive() {
            return;
        }
        let pts = self.carrier.points();
        let form = self.closed.expect("only closed forms are lazy");
        let mut flat = Vec::with_capacity(pts.len() * pts.len());
        for &a in &pts {
            for &b in &pts {
                flat.push(form.eval(&*self.carrier, a, b));
            }
        }
        self.n = pts.len();
        self.table = Some(flat.into());
    }

    #[inline]
    pub fn apply(&self, a: L::Value, b: L::Value) -> L::Value {
        match &self.table {
            Some(t) => {
                let i = self.carrier.index_of(a).expect("value of this carrier");
                let j = self.carrier.index_of(b).expect("value of this carrier");
                t[i * self.n + j]
            }
            None => self.closed.expect("lazy connectives are closed forms").eval(&*self.carrier, a, b),
        }
    }

    pub fn kind(&self) -> ConnectiveKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed
    }

    pub fn carrier(&self) -> &Arc<L> {
        &self.carrier
    }

    pub fn lattice(&self) -> &L {
        &self.carrier
    }

    pub fn on_carrier(&self, other: &L) -> bool {
        std::ptr::eq(&*self.carrier, other) || *self.carrier == *other
    }

    /// Rows of the table over `carrier.points()`, for finite carriers.
    pub fn rows(&self) -> Option<Vec<Vec<L::Value>>> {
        let t = self.table.as_ref()?;
        Some(t.chunks(self.n).map(|r| r.to_vec()).collect())
    }

    /// Entry-wise equality on the carrier's points.
    pub fn agrees_with(&self, other: &Connective<L>) -> bool {
        let l = self.lattice();
        let pts = l.points();
        pts.iter()
            .all(|&a| pts.iter().all(|&b| l.same(self.apply(a, b), other.apply(a, b))))
    }

    fn expect_kind(&self, expected: ConnectiveKind) -> Result<(), ConnectiveError> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(ConnectiveError::KindMismatch { expected, found: self.kind })
        }
    }
}

#[derive(Debug, Clone)]
enum NegatorRule<L: Lattice> {
    Table,
    Standard,
    Induced(Box<Connective<L>>),
}

/// An order-reversing unary map with `N(0) = 1`, `N(1) = 0`.
#[derive(Debug, Clone)]
pub struct Negator<L: Lattice> {
    carrier: Arc<L>,
    name: String,
    rule: NegatorRule<L>,
    table: Option<Arc<[L::Value]>>,
}

impl<L: Lattice> Negator<L> {
    /// Values listed in the order of `carrier.points()`.
    pub fn from_table(carrier: Arc<L>, name: impl Into<String>, values: Vec<L::Value>) -> Result<Self, ConnectiveError> {
        if !carrier.is_exhaustive() {
            return Err(ConnectiveError::NotFinite);
        }
        let n = carrier.points().len();
        if values.len() != n {
            return Err(ConnectiveError::TableShape { expected: n, found: values.len() });
        }
        if let Some(v) = values.iter().find(|&&v| carrier.index_of(v).is_none()) {
            return Err(ConnectiveError::UnknownValue(format!("{v:?}")));
        }
        Ok(Negator {
            carrier,
            name: name.into(),
            rule: NegatorRule::Table,
            table: Some(values.into()),
        })
    }

    /// `u ↦ 1 - u`.
    pub fn standard(carrier: Arc<L>) -> Result<Self, ConnectiveError> {
        if carrier.as_real(carrier.top()).is_none() {
            return Err(ConnectiveError::NeedsUnitInterval(ClosedForm::Product));
        }
        Ok(Negator {
            carrier,
            name: "standard".into(),
            rule: NegatorRule::Standard,
            table: None,
        })
    }

    /// `N(u) = I(u, 0)` for a residual, `N(u) = I(u, 1)` for a co-residual.
    pub fn induced(implicator: &Connective<L>) -> Result<Self, ConnectiveError> {
        if !implicator.kind().is_implicator() {
            return Err(ConnectiveError::NotAnImplicator(implicator.name().to_string()));
        }
        let carrier = implicator.carrier().clone();
        let mut neg = Negator {
            carrier: carrier.clone(),
            name: format!("N[{}]", implicator.name()),
            rule: NegatorRule::Induced(Box::new(implicator.clone())),
            table: None,
        };
        if carrier.is_exhaustive() {
            let vals: Vec<L::Value> = carrier.points().into_iter().map(|u| neg.apply(u)).collect();
            neg.table = Some(vals.into());
        }
        Ok(neg)
    }

    #[inline]
    pub fn apply(&self, u: L::Value) -> L::Value {
        if let Some(t) = &self.table {
            return t[self.carrier.index_of(u).expect("value of this carrier")];
        }
        match &self.rule {
            NegatorRule::Standard => {
                let x = self.carrier.as_real(u).expect("unit interval");
                self.carrier.from_real(1.0 - x).expect("unit interval")
            }
            NegatorRule::Induced(imp) => {
                let c = if imp.kind() == ConnectiveKind::Residual {
                    self.carrier.bottom()
                } else {
                    self.carrier.top()
                };
                imp.apply(u, c)
            }
            NegatorRule::Table => unreachable!("tables are always materialized"),
        }
    }

    pub fn apply_all(&self, f: &[L::Value]) -> Vec<L::Value> {
        f.iter().map(|&u| self.apply(u)).collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn carrier(&self) -> &Arc<L> {
        &self.carrier
    }

    pub fn on_carrier(&self, other: &L) -> bool {
        std::ptr::eq(&*self.carrier, other) || *self.carrier == *other
    }

    pub fn values(&self) -> Option<&[L::Value]> {
        self.table.as_deref()
    }

    pub fn is_involutive(&self) -> bool {
        let l = &*self.carrier;
        l.points().into_iter().all(|u| l.same(self.apply(self.apply(u)), u))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coverage {
    /// Every case of the quantifier was checked.
    Exhaustive,
    /// Finite carrier, but families were restricted.
    Partial,
    /// Grid sampling on the unit interval; evidence, not proof.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: String,
    pub witness: Vec<String>,
}

impl Violation {
    fn new<L: Lattice>(axiom: &str, l: &L, args: &[L::Value]) -> Self {
        Violation {
            axiom: axiom.to_string(),
            witness: args.iter().map(|&v| l.label(v)).collect(),
        }
    }
}

/// At most this many violations are kept; `violation_count` has the total.
pub const MAX_REPORTED: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub subject: String,
    pub passed: bool,
    pub checked_cases: u64,
    pub coverage: Coverage,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
}

#[derive(Default)]
struct Tally {
    checked: u64,
    violations: Vec<Violation>,
}

impl Tally {
    fn absorb(&mut self, other: Tally) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
    }

    fn finish(mut self, subject: String, coverage: Coverage, skipped: Vec<String>) -> ValidationReport {
        self.violations.sort();
        self.violations.dedup();
        let count = self.violations.len() as u64;
        self.violations.truncate(MAX_REPORTED);
        ValidationReport {
            subject,
            passed: count == 0,
            checked_cases: self.checked,
            coverage,
            violation_count: count,
            violations: self.violations,
            skipped,
        }
    }
}

fn coverage_of<L: Lattice>(l: &L) -> Coverage {
    if l.is_exhaustive() {
        Coverage::Exhaustive
    } else {
        Coverage::Sampled
    }
}

/// Runs `check` on every `arity`-tuple of points, splitting on the first slot.
fn sweep<L, F>(l: &L, pts: &[L::Value], arity: usize, exec: Exec, check: F) -> Tally
where
    L: Lattice,
    F: Fn(&[L::Value]) -> Vec<&'static str> + Sync + Send,
{
    let n = pts.len();
    let rest = n.pow(arity as u32 - 1);
    let parts = exec.for_size(n * rest).map(0..n, |first| {
        let mut t = Tally::default();
        let mut tuple = vec![pts[first]; arity];
        for r in 0..rest {
            let mut k = r;
            for slot in (1..arity).rev() {
                tuple[slot] = pts[k % n];
                k /= n;
            }
            for ax in check(&tuple) {
                t.violations.push(Violation::new(ax, l, &tuple));
            }
            t.checked += 1;
        }
        t
    });
    let mut total = Tally::default();
    for p in parts {
        total.absorb(p);
    }
    total
}

/// Families for the distributivity axioms, and whether they are all of them.
fn families<L: Lattice>(l: &L, pts: &[L::Value]) -> (Vec<Vec<L::Value>>, bool) {
    let n = pts.len();
    if l.is_exhaustive() && n <= 8 {
        let fams = (1u32..(1 << n))
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| pts[i]).collect())
            .collect();
        return (fams, true);
    }
    let mut fams: Vec<Vec<L::Value>> = Vec::new();
    for i in 0..n {
        for j in i..n {
            fams.push(vec![pts[i], pts[j]]);
        }
    }
    fams.push(pts.to_vec());
    (fams, false)
}

/// Whether overlap (or grouping) axiom `axiom` holds at `args`.
///
/// Pair axioms take `(u, v)`, `iv` takes `(u, v, w)`, and the `v-*` axioms
/// take a head element followed by a nonempty family.
pub fn connective_axiom_holds<L: Lattice>(c: &Connective<L>, axiom: &str, args: &[L::Value]) -> bool {
    let l = c.lattice();
    let grouping = c.kind() == ConnectiveKind::Grouping;
    match axiom {
        "i" => l.same(c.apply(args[0], args[1]), c.apply(args[1], args[0])),
        "ii" => {
            let (u, v) = (args[0], args[1]);
            let zero = l.is_bottom(c.apply(u, v));
            let rhs = if grouping {
                l.is_bottom(u) && l.is_bottom(v)
            } else {
                l.is_bottom(u) || l.is_bottom(v)
            };
            zero == rhs
        }
        "iii" => {
            let (u, v) = (args[0], args[1]);
            let one = l.is_top(c.apply(u, v));
            let rhs = if grouping {
                l.is_top(u) || l.is_top(v)
            } else {
                l.is_top(u) && l.is_top(v)
            };
            one == rhs
        }
        "iv" => {
            let (u, v, w) = (args[0], args[1], args[2]);
            !l.leq(v, w) || l.leq(c.apply(u, v), c.apply(u, w))
        }
        "v-join" => {
            let (u, fam) = (args[0], &args[1..]);
            let lhs = c.apply(u, l.join_all(fam.iter().copied()).expect("nonempty"));
            let rhs = l.join_all(fam.iter().map(|&v| c.apply(u, v))).expect("nonempty");
            l.same(lhs, rhs)
        }
        "v-meet" => {
            let (v, fam) = (args[0], &args[1..]);
            let lhs = c.apply(l.meet_all(fam.iter().copied()).expect("nonempty"), v);
            let rhs = l.meet_all(fam.iter().map(|&u| c.apply(u, v))).expect("nonempty");
            l.same(lhs, rhs)
        }
        _ => false,
    }
}

fn validate_binary<L: Lattice>(c: &Connective<L>, l: &L, expected: ConnectiveKind, exec: Exec) -> Result<ValidationReport, ConnectiveError> {
    if !c.on_carrier(l) {
        return Err(ConnectiveError::CarrierMismatch);
    }
    c.expect_kind(expected)?;
    let pts = l.points();
    let mut tally = sweep(l, &pts, 2, exec, |t| {
        ["i", "ii", "iii"]
            .into_iter()
            .filter(|ax| !connective_axiom_holds(c, ax, t))
            .collect()
    });
    tally.absorb(sweep(l, &pts, 3, exec, |t| {
        if connective_axiom_holds(c, "iv", t) {
            vec![]
        } else {
            vec!["iv"]
        }
    }));

    let (fams, complete) = families(l, &pts);
    let parts = exec.for_size(pts.len() * fams.len()).map(0..pts.len(), |i| {
        let mut t = Tally::default();
        let mut args = Vec::with_capacity(9);
        for fam in &fams {
            args.clear();
            args.push(pts[i]);
            args.extend_from_slice(fam);
            for ax in ["v-join", "v-meet"] {
                if !connective_axiom_holds(c, ax, &args) {
                    t.violations.push(Violation::new(ax, l, &args));
                }
                t.checked += 1;
            }
        }
        t
    });
    for p in parts {
        tally.absorb(p);
    }

    let coverage = match coverage_of(l) {
        Coverage::Exhaustive if !complete => Coverage::Partial,
        c => c,
    };
    Ok(tally.finish(format!("{} {}", expected, c.name()), coverage, vec![]))
}

/// Checks the overlap axioms: symmetry, no zero divisors, `θ = 1` only at
/// `(1, 1)`, monotonicity and distributivity over families.
pub fn validate_overlap<L: Lattice>(c: &Connective<L>, l: &L) -> Result<ValidationReport, ConnectiveError> {
    validate_overlap_with(c, l, Exec::default())
}

pub fn validate_overlap_with<L: Lattice>(c: &Connective<L>, l: &L, exec: Exec) -> Result<ValidationReport, ConnectiveError> {
    validate_binary(c, l, ConnectiveKind::Overlap, exec)
}

/// The order-dual axioms for grouping maps.
pub fn validate_grouping<L: Lattice>(c: &Connective<L>, l: &L) -> Result<ValidationReport, ConnectiveError> {
    validate_grouping_with(c, l, Exec::default())
}

pub fn validate_grouping_with<L: Lattice>(c: &Connective<L>, l: &L, exec: Exec) -> Result<ValidationReport, ConnectiveError> {
    validate_binary(c, l, ConnectiveKind::Grouping, exec)
}

/// Re-evaluates a reported violation. `Ok(true)` means it still fails.
pub fn replay_connective<L: Lattice>(c: &Connective<L>, v: &Violation) -> Result<bool, ConnectiveError> {
    let args = parse_all(c.lattice(), &v.witness)?;
    Ok(!connective_axiom_holds(c, &v.axiom, &args))
}

fn parse_all<L: Lattice>(l: &L, labels: &[String]) -> Result<Vec<L::Value>, ConnectiveError> {
    labels
        .iter()
        .map(|s| l.parse(s).ok_or_else(|| ConnectiveError::UnknownValue(s.clone())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegatorReport {
    pub report: ValidationReport,
    pub involutive: bool,
    /// `None` where strictness is not meaningful (non-chains).
    pub strict: Option<bool>,
}

pub fn negator_axiom_holds<L: Lattice>(n: &Negator<L>, axiom: &str, args: &[L::Value]) -> bool {
    let l = &**n.carrier();
    match axiom {
        "N(0)=1" => l.is_top(n.apply(l.bottom())),
        "N(1)=0" => l.is_bottom(n.apply(l.top())),
        "antitone" => !l.leq(args[0], args[1]) || l.leq(n.apply(args[1]), n.apply(args[0])),
        _ => false,
    }
}

/// Checks boundary values and antitonicity; reports involution and strictness.
pub fn validate_negator<L: Lattice>(n: &Negator<L>, l: &L) -> Result<NegatorReport, ConnectiveError> {
    if !n.on_carrier(l) {
        return Err(ConnectiveError::CarrierMismatch);
    }
    let mut tally = Tally::default();
    for ax in ["N(0)=1", "N(1)=0"] {
        tally.checked += 1;
        if !negator_axiom_holds(n, ax, &[]) {
            tally.violations.push(Violation::new(ax, l, &[]));
        }
    }
    let pts = l.points();
    tally.absorb(sweep(l, &pts, 2, Exec::Sequential, |t| {
        if negator_axiom_holds(n, "antitone", t) {
            vec![]
        } else {
            vec!["antitone"]
        }
    }));
    let involutive = n.is_involutive();
    let strict = if !l.is_chain() {
        None
    } else if l.is_exhaustive() {
        let injective = pts
            .iter()
            .all(|&a| pts.iter().all(|&b| l.same(a, b) || !l.same(n.apply(a), n.apply(b))));
        Some(injective && tally.violations.is_empty())
    } else {
        // Strictly decreasing on the grid with no jump wider than a few steps.
        let step = 1.0 / (pts.len() - 1) as f64;
        let vals: Vec<f64> = pts.iter().map(|&u| l.as_real(n.apply(u)).unwrap_or(f64::NAN)).collect();
        Some(vals.windows(2).all(|w| w[1] < w[0] && w[0] - w[1] <= 5.0 * step + 1e-12))
    };
    let report = tally.finish(format!("negator {}", n.name()), coverage_of(l), vec![]);
    Ok(NegatorReport { report, involutive, strict })
}

/// `I_θ(u, v) = ∨{w : θ(u, w) ≤ v}`.
pub fn derive_residual<L: Lattice>(theta: &Connective<L>) -> Result<Connective<L>, ConnectiveError> {
    theta.expect_kind(ConnectiveKind::Overlap)?;
    derive(theta, ConnectiveKind::Residual)
}

/// `I_η(u, v) = ∧{w : η(u, w) ≥ v}`.
pub fn derive_coresidual<L: Lattice>(eta: &Connective<L>) -> Result<Connective<L>, ConnectiveError> {
    eta.expect_kind(ConnectiveKind::Grouping)?;
    derive(eta, ConnectiveKind::CoResidual)
}

fn derive<L: Lattice>(base: &Connective<L>, kind: ConnectiveKind) -> Result<Connective<L>, ConnectiveError> {
    let carrier = base.carrier().clone();
    let name = format!("I[{}]", base.name());
    if !carrier.is_exhaustive() {
        let form = base
            .closed_form()
            .and_then(ClosedForm::implicator)
            .ok_or_else(|| ConnectiveError::NoClosedForm(base.name().to_string()))?;
        let mut c = Connective::closed(carrier, form)?;
        c.name = name;
        c.form = Form::Derived(base.name().to_string());
        return Ok(c);
    }
    let l = &*carrier;
    let pts = l.points();
    let residual = kind == ConnectiveKind::Residual;
    let rows = pts
        .iter()
        .map(|&u| {
            pts.iter()
                .map(|&v| {
                    let set: Vec<L::Value> = pts
                        .iter()
                        .copied()
                        .filter(|&w| {
                            let t = base.apply(u, w);
                            if residual {
                                l.leq(t, v)
                            } else {
                                l.leq(v, t)
                            }
                        })
                        .collect();
                    if residual {
                        l.join_of(&set, EmptyFamily::Convention).expect("convention mode")
                    } else {
                        l.meet_of(&set, EmptyFamily::Convention).expect("convention mode")
                    }
                })
                .collect()
        })
        .collect();
    let mut c = Connective::from_table(carrier.clone(), kind, name, rows)?;
    c.form = Form::Derived(base.name().to_string());
    Ok(c)
}

/// `N(u) = I(u, 0)` or `N(u) = I(u, 1)`.
pub fn induced_negator<L: Lattice>(implicator: &Connective<L>) -> Result<Negator<L>, ConnectiveError> {
    Negator::induced(implicator)
}

pub fn duality_holds<L: Lattice>(
    axiom: &str,
    theta: &Connective<L>,
    eta: &Connective<L>,
    n: &Negator<L>,
    implicators: Option<(&Connective<L>, &Connective<L>)>,
    u: L::Value,
    v: L::Value,
) -> bool {
    let l = theta.lattice();
    let (nu, nv) = (n.apply(u), n.apply(v));
    match (axiom, implicators) {
        ("eta(N,N)=N(theta)", _) => l.same(eta.apply(nu, nv), n.apply(theta.apply(u, v))),
        ("theta(N,N)=N(eta)", _) => l.same(theta.apply(nu, nv), n.apply(eta.apply(u, v))),
        ("I_eta(N,N)=N(I_theta)", Some((ith, ieta))) => l.same(ieta.apply(nu, nv), n.apply(ith.apply(u, v))),
        ("I_theta(N,N)=N(I_eta)", Some((ith, ieta))) => l.same(ith.apply(nu, nv), n.apply(ieta.apply(u, v))),
        _ => false,
    }
}

/// Checks that `θ` and `η` (and optionally the implicators) are dual under `N`.
pub fn check_duality<L: Lattice>(
    theta: &Connective<L>,
    eta: &Connective<L>,
    n: &Negator<L>,
    implicators: Option<(&Connective<L>, &Connective<L>)>,
) -> Result<ValidationReport, ConnectiveError> {
    let l = theta.lattice();
    if !eta.on_carrier(l) || !n.on_carrier(l) || implicators.is_some_and(|(a, b)| !a.on_carrier(l) || !b.on_carrier(l)) {
        return Err(ConnectiveError::CarrierMismatch);
    }
    let mut axioms = vec!["eta(N,N)=N(theta)", "theta(N,N)=N(eta)"];
    let mut skipped = vec![];
    if implicators.is_some() {
        if n.is_involutive() {
            axioms.extend(["I_eta(N,N)=N(I_theta)", "I_theta(N,N)=N(I_eta)"]);
        } else {
            skipped.push("implicator duality: negator is not involutive".to_string());
        }
    }
    let pts = l.points();
    let tally = sweep(l, &pts, 2, Exec::default(), |t| {
        axioms
            .iter()
            .copied()
            .filter(|ax| !duality_holds(ax, theta, eta, n, implicators, t[0], t[1]))
            .collect()
    });
    Ok(tally.finish(format!("duality {}/{} under {}", theta.name(), eta.name(), n.name()), coverage_of(l), skipped))
}

/// Property flags. Overlap and grouping maps fill the first four,
/// implicators the last four (EP is shared).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Properties {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neutral: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deflation: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inflation: Option<bool>,
    pub ep: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub np: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ip: Option<bool>,
}

/// Exchange principle `c(u, c(v, w)) = c(v, c(u, w))`.
pub fn has_exchange<L: Lattice>(c: &Connective<L>) -> bool {
    let l = c.lattice();
    let pts = l.points();
    let bad = sweep(l, &pts, 3, Exec::default(), |t| {
        let (u, v, w) = (t[0], t[1], t[2]);
        if l.same(c.apply(u, c.apply(v, w)), c.apply(v, c.apply(u, w))) {
            vec![]
        } else {
            vec!["ep"]
        }
    });
    bad.violations.is_empty()
}

pub fn connective_properties<L: Lattice>(c: &Connective<L>) -> Properties {
    let l = c.lattice();
    let pts = l.points();
    let all = |p: &dyn Fn(L::Value) -> bool| pts.iter().all(|&u| p(u));
    let mut props = Properties {
        ep: has_exchange(c),
        ..Properties::default()
    };
    match c.kind() {
        ConnectiveKind::Overlap => {
            let one = l.top();
            props.neutral = Some(all(&|u| l.same(c.apply(one, u), u)));
            props.deflation = Some(all(&|u| l.leq(c.apply(one, u), u)));
            props.inflation = Some(all(&|u| l.leq(u, c.apply(one, u))));
        }
        ConnectiveKind::Grouping => {
            let zero = l.bottom();
            props.neutral = Some(all(&|u| l.same(c.apply(zero, u), u)));
            props.deflation = Some(all(&|u| l.leq(u, c.apply(zero, u))));
            props.inflation = Some(all(&|u| l.leq(c.apply(zero, u), u)));
        }
        ConnectiveKind::Residual => {
            let one = l.top();
            props.op = Some(all(&|u| pts.iter().all(|&v| l.leq(u, v) == l.is_top(c.apply(u, v)))));
            props.np = Some(all(&|u| l.same(c.apply(one, u), u)));
            props.ip = Some(all(&|u| l.is_top(c.apply(u, u))));
        }
        ConnectiveKind::CoResidual => {
            let zero = l.bottom();
            props.op = Some(all(&|u| pts.iter().all(|&v| l.leq(v, u) == l.is_bottom(c.apply(u, v)))));
            props.np = Some(all(&|u| l.same(c.apply(zero, u), u)));
            props.ip = Some(all(&|u| l.is_bottom(c.apply(u, u))));
        }
    }
    props
}

/// `θ(u, v) ≤ w ⇔ u ≤ I(v, w)`, or for grouping maps `η(u, v) ≥ w ⇔ u ≥ I(v, w)`.
/// Axiom `forward` is the left-to-right implication.
pub fn adjointness_holds<L: Lattice>(c: &Connective<L>, imp: &Connective<L>, axiom: &str, args: &[L::Value]) -> bool {
    let l = c.lattice();
    let (u, v, w) = (args[0], args[1], args[2]);
    let (lhs, rhs) = if c.kind() == ConnectiveKind::Grouping {
        (l.leq(w, c.apply(u, v)), l.leq(imp.apply(v, w), u))
    } else {
        (l.leq(c.apply(u, v), w), l.leq(u, imp.apply(v, w)))
    };
    match axiom {
        "forward" => !lhs || rhs,
        "backward" => !rhs || lhs,
        _ => false,
    }
}

/// Exhaustive (or grid) check of the adjoint-pair property over all triples.
pub fn adjointness_check<L: Lattice>(c: &Connective<L>, imp: &Connective<L>) -> Result<ValidationReport, ConnectiveError> {
    let l = c.lattice();
    if !imp.on_carrier(l) {
        return Err(ConnectiveError::CarrierMismatch);
    }
    let expected = match c.kind() {
        ConnectiveKind::Overlap => ConnectiveKind::Residual,
        ConnectiveKind::Grouping => ConnectiveKind::CoResidual,
        other => {
            return Err(ConnectiveError::KindMismatch {
                expected: ConnectiveKind::Overlap,
                found: other,
            })
        }
    };
    imp.expect_kind(expected)?;
    let pts = l.points();
    let tally = sweep(l, &pts, 3, Exec::default(), |t| {
        ["forward", "backward"]
            .into_iter()
            .filter(|ax| !adjointness_holds(c, imp, ax, t))
            .collect()
    });
    Ok(tally.finish(format!("adjointness {}/{}", c.name(), imp.name()), coverage_of(l), vec![]))
}

pub fn replay_adjointness<L: Lattice>(c: &Connective<L>, imp: &Connective<L>, v: &Violation) -> Result<bool, ConnectiveError> {
    let args = parse_all(c.lattice(), &v.witness)?;
    Ok(!adjointness_holds(c, imp, &v.axiom, &args))
}
