//! File formats: lattice, connective, negator, partition, transform and
//! system JSON; one-real-per-line CSV signals; PGM P2/P5 images.
//!
//! Lattice values are written as labels on finite carriers and as numbers on
//! the unit interval. Readers accept either spelling.

use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectives::{ClosedForm, Connective, ConnectiveError, ConnectiveKind, Form, Negator};
use crate::lattice::{Lattice, LatticeError, TableLattice};
use crate::partitions::{validate_partition, LFuzzyPartition, PartitionError, Universe};
use crate::systems::{system_from_partition, SystemError, SystemKind, TransformationSystem};
use crate::transforms::{DirectKind, DirectTransform};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("PGM: {0}")]
    Pgm(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("unknown lattice element `{0}`")]
    UnknownElement(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Connective(#[from] ConnectiveError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    System(#[from] SystemError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// One lattice value in a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Real(f64),
    Label(String),
}

pub fn to_cell<L: Lattice>(l: &L, v: L::Value) -> Cell {
    match l.as_real(v) {
        Some(x) => Cell::Real(x),
        None => Cell::Label(l.label(v)),
    }
}

pub fn from_cell<L: Lattice>(l: &L, c: &Cell) -> Result<L::Value, IoError> {
    match c {
        Cell::Label(s) => l.parse(s).ok_or_else(|| IoError::UnknownElement(s.clone())),
        Cell::Real(x) => l
            .from_real(*x)
            .or_else(|| l.parse(&x.to_string()))
            .ok_or_else(|| IoError::UnknownElement(x.to_string())),
    }
}

fn cells<L: Lattice>(l: &L, vs: &[L::Value]) -> Vec<Cell> {
    vs.iter().map(|&v| to_cell(l, v)).collect()
}

fn values<L: Lattice>(l: &L, cs: &[Cell]) -> Result<Vec<L::Value>, IoError> {
    cs.iter().map(|c| from_cell(l, c)).collect()
}

// Lattices.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<Tables>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tables {
    pub join: Vec<Vec<String>>,
    pub meet: Vec<Vec<String>>,
}

pub fn parse_lattice(text: &str) -> Result<TableLattice, IoError> {
    let j: LatticeJson = serde_json::from_str(text)?;
    Ok(TableLattice::build(&j.elements, &j.covers)?)
}

pub fn lattice_json(l: &TableLattice) -> LatticeJson {
    let labels = l.labels();
    let n = labels.len();
    let table = |t: &[crate::lattice::Elem]| -> Vec<Vec<String>> {
        (0..n).map(|i| (0..n).map(|k| labels[t[i * n + k].index()].clone()).collect()).collect()
    };
    LatticeJson {
        elements: labels.to_vec(),
        covers: l
            .covers()
            .into_iter()
            .map(|(a, b)| (labels[a.index()].clone(), labels[b.index()].clone()))
            .collect(),
        tables: Some(Tables {
            join: table(l.join_table()),
            meet: table(l.meet_table()),
        }),
    }
}

pub fn write_lattice(l: &TableLattice) -> String {
    pretty(&lattice_json(l))
}

// Connectives and negators.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectiveJson {
    pub kind: ConnectiveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Free-form reference to the carrier; not interpreted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<Cell>>>,
}

pub fn connective_from_json<L: Lattice>(carrier: Arc<L>, j: &ConnectiveJson) -> Result<Connective<L>, IoError> {
    match (&j.closed_form, &j.table) {
        (Some(name), None) => {
            let form = ClosedForm::parse(name).ok_or_else(|| IoError::Invalid(format!("unknown closed form `{name}`")))?;
            if form.kind() != j.kind {
                return Err(IoError::Invalid(format!("closed form `{name}` is a {}, not a {}", form.kind(), j.kind)));
            }
            let c = Connective::closed(carrier, form)?;
            Ok(match &j.name {
                Some(n) => c.with_name(n.clone()),
                None => c,
            })
        }
        (None, Some(rows)) => {
            let rows = rows
                .iter()
                .map(|r| values(&*carrier, r))
                .collect::<Result<Vec<_>, _>>()?;
            let name = j.name.clone().unwrap_or_else(|| format!("{}-table", j.kind));
            Ok(Connective::from_table(carrier, j.kind, name, rows)?)
        }
        _ => Err(IoError::Invalid("connective needs exactly one of `closed_form` and `table`".into())),
    }
}

pub fn parse_connective<L: Lattice>(carrier: Arc<L>, text: &str) -> Result<Connective<L>, IoError> {
    connective_from_json(carrier, &serde_json::from_str(text)?)
}

/// Closed forms are written by name, everything else as a table.
pub fn connective_json<L: Lattice>(c: &Connective<L>) -> ConnectiveJson {
    let l = c.lattice();
    let closed = match c.form() {
        Form::Closed(f) => Some(f.name().to_string()),
        _ => None,
    };
    let table = match (&closed, c.rows()) {
        (None, Some(rows)) => Some(rows.iter().map(|r| cells(l, r)).collect()),
        _ => None,
    };
    ConnectiveJson {
        kind: c.kind(),
        name: Some(c.name().to_string()),
        lattice: None,
        closed_form: closed,
        table,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegatorJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// `N(u)` for each element, in element order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Cell>>,
    /// `u ↦ 1 - u` on the unit interval.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub standard: bool,
}

pub fn negator_from_json<L: Lattice>(carrier: Arc<L>, j: &NegatorJson) -> Result<Negator<L>, IoError> {
    match (&j.table, j.standard) {
        (Some(t), false) => {
            let vals = values(&*carrier, t)?;
            Ok(Negator::from_table(carrier, j.name.clone().unwrap_or_else(|| "N".into()), vals)?)
        }
        (None, true) => Ok(Negator::standard(carrier)?),
        _ => Err(IoError::Invalid("negator needs exactly one of `table` and `standard`".into())),
    }
}

pub fn parse_negator<L: Lattice>(carrier: Arc<L>, text: &str) -> Result<Negator<L>, IoError> {
    negator_from_json(carrier, &serde_json::from_str(text)?)
}

pub fn negator_json<L: Lattice>(n: &Negator<L>) -> NegatorJson {
    let l = n.carrier();
    match n.values() {
        Some(v) => NegatorJson {
            name: Some(n.name().to_string()),
            table: Some(cells(&**l, v)),
            standard: false,
        },
        None => NegatorJson {
            name: Some(n.name().to_string()),
            table: None,
            standard: true,
        },
    }
}

// Partitions.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub universe: Vec<String>,
    pub members: IndexMap<String, Vec<Cell>>,
}

pub fn partition_from_json<L: Lattice>(carrier: Arc<L>, j: &PartitionJson) -> Result<LFuzzyPartition<L>, IoError> {
    let universe = Universe::new(j.universe.iter().cloned())?;
    let members = j
        .members
        .iter()
        .map(|(k, v)| Ok((k.clone(), values(&*carrier, v)?)))
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(validate_partition(carrier, universe, members)?)
}

pub fn parse_partition<L: Lattice>(carrier: Arc<L>, text: &str) -> Result<LFuzzyPartition<L>, IoError> {
    partition_from_json(carrier, &serde_json::from_str(text)?)
}

pub fn partition_json<L: Lattice>(p: &LFuzzyPartition<L>) -> PartitionJson {
    let l = p.lattice();
    PartitionJson {
        universe: p.universe().points().to_vec(),
        members: p
            .labels()
            .iter()
            .zip(p.members())
            .map(|(k, m)| (k.clone(), cells(l, m)))
            .collect(),
    }
}

// Transform results.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformJson {
    pub kind: DirectKind,
    pub components: IndexMap<String, Cell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connective: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negator: Option<String>,
}

pub fn transform_json<L: Lattice>(l: &L, t: &DirectTransform<L::Value>) -> TransformJson {
    TransformJson {
        kind: t.kind,
        components: t.labels.iter().cloned().zip(cells(l, &t.components)).collect(),
        connective: Some(t.connective.clone()),
        negator: t.negator.clone(),
    }
}

/// Components in the partition's member order; every member must be present.
pub fn transform_from_json<L: Lattice>(p: &LFuzzyPartition<L>, j: &TransformJson) -> Result<DirectTransform<L::Value>, IoError> {
    let l = p.lattice();
    if j.components.len() != p.len() {
        return Err(IoError::Invalid(format!("{} components for {} members", j.components.len(), p.len())));
    }
    let components = p
        .labels()
        .iter()
        .map(|k| {
            let c = j.components.get(k).ok_or_else(|| IoError::Invalid(format!("missing component `{k}`")))?;
            from_cell(l, c)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DirectTransform {
        kind: j.kind,
        labels: p.labels().to_vec(),
        components,
        connective: j.connective.clone().unwrap_or_default(),
        negator: j.negator.clone(),
    })
}

// Systems.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub kind: SystemKind,
    pub partition: PartitionJson,
    pub connective: ConnectiveJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negator: Option<NegatorJson>,
}

/// `(X, Y, onto, operator)` where the operator is a partition bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub universe: Vec<String>,
    pub index: Vec<String>,
    pub onto: IndexMap<String, String>,
    pub operator: OperatorJson,
}

pub fn system_json<L: Lattice>(p: &LFuzzyPartition<L>, kind: SystemKind, conn: &Connective<L>, neg: Option<&Negator<L>>) -> SystemJson {
    SystemJson {
        universe: p.universe().points().to_vec(),
        index: p.labels().to_vec(),
        onto: p
            .universe()
            .points()
            .iter()
            .zip(p.index_map())
            .map(|(x, &j)| (x.clone(), p.labels()[j].clone()))
            .collect(),
        operator: OperatorJson {
            kind,
            partition: partition_json(p),
            connective: connective_json(conn),
            negator: neg.map(negator_json),
        },
    }
}

/// Builds the system and checks the stated `X`, `Y` and onto map against the
/// ones the partition determines.
pub fn system_from_json<L: Lattice>(carrier: Arc<L>, j: &SystemJson) -> Result<TransformationSystem<L>, IoError> {
    let p = partition_from_json(carrier.clone(), &j.operator.partition)?;
    let conn = connective_from_json(carrier.clone(), &j.operator.connective)?;
    let neg = j
        .operator
        .negator
        .as_ref()
        .map(|n| negator_from_json(carrier, n))
        .transpose()?;
    let sys = system_from_partition(&p, j.operator.kind.direct(), &conn, neg.as_ref())?;
    let onto: Option<Vec<usize>> = j
        .universe
        .iter()
        .map(|x| j.onto.get(x).and_then(|y| j.index.iter().position(|k| k == y)))
        .collect();
    if j.universe != sys.universe().points() || j.index != sys.index() {
        return Err(IoError::Invalid("universe or index set differs from the partition's".into()));
    }
    let onto = onto.ok_or_else(|| IoError::Invalid("onto map is incomplete".into()))?;
    if let Some(x) = (0..onto.len()).find(|&x| onto[x] != sys.onto()[x]) {
        return Err(SystemError::OntoMismatch(j.universe[x].clone()).into());
    }
    Ok(sys)
}

/// A batch exchange: the validator's requested inputs and, once the caller
/// has run its operator, the matching outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchJson {
    pub inputs: Vec<Vec<Cell>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<Vec<Cell>>>,
}

pub fn batch_json<L: Lattice>(l: &L, inputs: &[Vec<L::Value>]) -> BatchJson {
    BatchJson {
        inputs: inputs.iter().map(|f| cells(l, f)).collect(),
        outputs: None,
    }
}

pub fn batch_pairs<L: Lattice>(l: &L, b: &BatchJson) -> Result<Vec<(Vec<L::Value>, Vec<L::Value>)>, IoError> {
    let outs = b.outputs.as_ref().ok_or_else(|| IoError::Invalid("batch has no outputs".into()))?;
    if outs.len() != b.inputs.len() {
        return Err(IoError::Invalid(format!("{} outputs for {} inputs", outs.len(), b.inputs.len())));
    }
    b.inputs
        .iter()
        .zip(outs)
        .map(|(i, o)| Ok((values(l, i)?, values(l, o)?)))
        .collect()
}

pub fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

// Signals.

/// One real per line (extra comma-separated fields are ignored); blank
/// lines and `#` comments are skipped.
pub fn parse_csv(text: &str) -> Result<Vec<f64>, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = vec![];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IoError::Csv {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = rec.get(0).unwrap_or("");
        if field.is_empty() && rec.len() == 1 {
            continue;
        }
        let x: f64 = field.parse().map_err(|_| IoError::Csv {
            line,
            message: format!("not a number: `{field}`"),
        })?;
        if !x.is_finite() {
            return Err(IoError::Csv {
                line,
                message: format!("not finite: `{field}`"),
            });
        }
        out.push(x);
    }
    if out.is_empty() {
        return Err(IoError::Csv {
            line: 0,
            message: "no samples".into(),
        });
    }
    Ok(out)
}

pub fn write_csv(xs: &[f64]) -> String {
    let mut w = csv::Writer::from_writer(vec![]);
    for x in xs {
        w.write_record([x.to_string()]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Min-max rescaling into `[0, 1]`. A constant input maps to zeros and the
/// flag is set.
pub fn min_max(xs: &[f64]) -> (Vec<f64>, bool) {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        return (vec![0.0; xs.len()], true);
    }
    (xs.iter().map(|x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0)).collect(), false)
}

// Images.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmEncoding {
    Plain,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub encoding: PgmEncoding,
    /// Row-major gray levels.
    pub pixels: Vec<u16>,
}

impl Pgm {
    pub fn to_unit(&self) -> Vec<f64> {
        let m = f64::from(self.maxval);
        self.pixels.iter().map(|&p| f64::from(p) / m).collect()
    }

    /// Gray level `floor(u * maxval + 1/2)`, clamped.
    pub fn quantize(u: f64, maxval: u16) -> u16 {
        let m = f64::from(maxval);
        (u.clamp(0.0, 1.0) * m + 0.5).floor().min(m) as u16
    }

    pub fn from_unit(width: usize, height: usize, maxval: u16, encoding: PgmEncoding, us: &[f64]) -> Pgm {
        Pgm {
            width,
            height,
            maxval,
            encoding,
            pixels: us.iter().map(|&u| Pgm::quantize(u, maxval)).collect(),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        match self.encoding {
            PgmEncoding::Plain => {
                let mut s = format!("P2\n{} {}\n{}\n", self.width, self.height, self.maxval);
                for row in self.pixels.chunks(self.width.max(1)) {
                    let line: Vec<String> = row.iter().map(u16::to_string).collect();
                    s.push_str(&line.join(" "));
                    s.push('\n');
                }
                s.into_bytes()
            }
            PgmEncoding::Raw => {
                let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
                for &p in &self.pixels {
                    if self.maxval < 256 {
                        out.push(p as u8);
                    } else {
                        out.extend_from_slice(&p.to_be_bytes());
                    }
                }
                out
            }
        }
    }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn token(&mut self) -> Result<&str, IoError> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() && self.bytes[self.pos] != b'#' {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(IoError::Pgm("truncated header".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| IoError::Pgm("non-ASCII header".into()))
    }

    fn number(&mut self, what: &str) -> Result<usize, IoError> {
        let t = self.token()?;
        t.parse().map_err(|_| IoError::Pgm(format!("bad {what} `{t}`")))
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Pgm, IoError> {
    let mut h = Header { bytes, pos: 0 };
    let encoding = match h.token()? {
        "P2" => PgmEncoding::Plain,
        "P5" => PgmEncoding::Raw,
        other => return Err(IoError::UnsupportedFormat(format!("PGM magic `{other}`"))),
    };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(IoError::Pgm("empty image".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(IoError::Pgm(format!("maxval {maxval} out of range")));
    }
    let maxval = maxval as u16;
    let n = width * height;
    let pixels: Vec<u16> = match encoding {
        PgmEncoding::Plain => (0..n)
            .map(|_| {
                let v = h.number("pixel")?;
                u16::try_from(v).ok().filter(|&p| p <= maxval).ok_or_else(|| IoError::Pgm(format!("pixel {v} above maxval")))
            })
            .collect::<Result<_, _>>()?,
        PgmEncoding::Raw => {
            // Exactly one whitespace byte separates the header from the raster.
            let start = h.pos + 1;
            let wide = maxval > 255;
            let need = n * if wide { 2 } else { 1 };
            let raster = bytes
                .get(start..start + need)
                .ok_or_else(|| IoError::Pgm(format!("raster has fewer than {need} bytes")))?;
            let px: Vec<u16> = if wide {
                raster.chunks(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
            } else {
                raster.iter().map(|&b| u16::from(b)).collect()
            };
            if let Some(p) = px.iter().find(|&&p| p > maxval) {
                return Err(IoError::Pgm(format!("pixel {p} above maxval")));
            }
            px
        }
    };
    Ok(Pgm {
        width,
        height,
        maxval,
        encoding,
        pixels,
    })
}
