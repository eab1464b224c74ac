//! Resolving `--lattice`, connective, negator and partition arguments.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use lattice_ft::connectives::{derive_coresidual, derive_residual};
use lattice_ft::io;
use lattice_ft::partitions::{block_partition, validate_partition};
use lattice_ft::{ClosedForm, Connective, ConnectiveKind, LFuzzyPartition, Lattice, Negator, TableLattice, UnitInterval, Universe};

/// The carrier chosen on the command line.
pub enum Carrier {
    Table { lattice: Arc<TableLattice>, builtin: Builtin },
    Unit(Arc<UnitInterval>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Figure1,
    Chain,
    File,
}

/// `fig1` / `figure1`, `chain:N`, `unit`, or a lattice JSON path.
pub fn carrier(spec: &str) -> Result<Carrier> {
    let s = spec.trim();
    match s.to_ascii_lowercase().as_str() {
        "fig1" | "figure1" => {
            return Ok(Carrier::Table {
                lattice: Arc::new(TableLattice::figure1()),
                builtin: Builtin::Figure1,
            })
        }
        "unit" | "[0,1]" => return Ok(Carrier::Unit(Arc::new(UnitInterval::default()))),
        _ => {}
    }
    if let Some(n) = s.strip_prefix("chain:") {
        let n: usize = n.parse().with_context(|| format!("bad chain length `{n}`"))?;
        if n < 2 {
            bail!("a chain needs at least two elements");
        }
        return Ok(Carrier::Table {
            lattice: Arc::new(TableLattice::chain(n)),
            builtin: Builtin::Chain,
        });
    }
    let text = read(Path::new(s))?;
    let lattice = io::parse_lattice(&text).with_context(|| format!("in {s}"))?;
    Ok(Carrier::Table {
        lattice: Arc::new(lattice),
        builtin: Builtin::File,
    })
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// A closed-form name or a connective JSON path; the kind must match.
pub fn connective<L: Lattice>(carrier: &Arc<L>, spec: &str, kind: ConnectiveKind) -> Result<Connective<L>> {
    let path = Path::new(spec);
    let c = if path.is_file() {
        io::parse_connective(carrier.clone(), &read(path)?).with_context(|| format!("in {spec}"))?
    } else {
        let form = ClosedForm::parse(spec).ok_or_else(|| anyhow!("`{spec}` is neither a file nor a known closed form"))?;
        Connective::closed(carrier.clone(), form)?
    };
    if c.kind() != kind {
        bail!("`{spec}` is a {}, expected a {kind}", c.kind());
    }
    Ok(c)
}

/// `derived` (or absent) takes the residual of `theta`.
pub fn residual<L: Lattice>(carrier: &Arc<L>, spec: Option<&str>, theta: &Connective<L>) -> Result<Connective<L>> {
    match spec {
        None | Some("derived") => derived(carrier, theta, ConnectiveKind::Residual),
        Some(s) => connective(carrier, s, ConnectiveKind::Residual),
    }
}

pub fn coresidual<L: Lattice>(carrier: &Arc<L>, spec: Option<&str>, eta: &Connective<L>) -> Result<Connective<L>> {
    match spec {
        None | Some("derived") => derived(carrier, eta, ConnectiveKind::CoResidual),
        Some(s) => connective(carrier, s, ConnectiveKind::CoResidual),
    }
}

/// On finite carriers the adjoint is tabulated; on the unit interval the
/// registered closed-form partner is used.
fn derived<L: Lattice>(carrier: &Arc<L>, base: &Connective<L>, kind: ConnectiveKind) -> Result<Connective<L>> {
    if carrier.is_exhaustive() {
        return Ok(if kind == ConnectiveKind::Residual {
            derive_residual(base)?
        } else {
            derive_coresidual(base)?
        });
    }
    let form = base
        .closed_form()
        .and_then(ClosedForm::implicator)
        .ok_or_else(|| anyhow!("`{}` has no registered adjoint on the unit interval", base.name()))?;
    Ok(Connective::closed(carrier.clone(), form)?)
}

/// `none`, `standard`, a JSON path, or (absent) the carrier's default:
/// the worked-example negator on figure1, order reversal on chains and
/// `1 - u` on the unit interval.
pub fn negator_table(l: &Arc<TableLattice>, builtin: Builtin, spec: Option<&str>) -> Result<Option<Negator<TableLattice>>> {
    match spec {
        Some("none") => Ok(None),
        Some(s) => Ok(Some(io::parse_negator(l.clone(), &read(Path::new(s))?).with_context(|| format!("in {s}"))?)),
        None => Ok(match builtin {
            Builtin::Figure1 => Some(figure1_negator(l)),
            Builtin::Chain => {
                let mut vals: Vec<_> = l.elements().collect();
                vals.reverse();
                Some(Negator::from_table(l.clone(), "reversal", vals)?)
            }
            Builtin::File => None,
        }),
    }
}

pub fn negator_unit(u: &Arc<UnitInterval>, spec: Option<&str>) -> Result<Option<Negator<UnitInterval>>> {
    match spec {
        Some("none") => Ok(None),
        None | Some("standard") => Ok(Some(Negator::standard(u.clone())?)),
        Some(s) => Ok(Some(io::parse_negator(u.clone(), &read(Path::new(s))?).with_context(|| format!("in {s}"))?)),
    }
}

/// A JSON partition, or `points` singletons-by-block with `spread` off the
/// cores (bottom by default).
pub fn partition<L: Lattice>(
    carrier: &Arc<L>,
    file: Option<&Path>,
    points: usize,
    blocks: Option<usize>,
    spread: Option<&str>,
) -> Result<LFuzzyPartition<L>> {
    if let Some(path) = file {
        return io::parse_partition(carrier.clone(), &read(path)?).with_context(|| format!("in {}", path.display()));
    }
    let spread = match spread {
        Some(s) => carrier.parse(s).ok_or_else(|| anyhow!("unknown element `{s}`"))?,
        None => carrier.bottom(),
    };
    let blocks = lattice_ft::partitions::equal_blocks(points, blocks.unwrap_or(points))?;
    Ok(block_partition(carrier.clone(), Universe::indexed(points), &blocks, spread)?)
}

fn elems(l: &TableLattice, s: &str) -> Vec<lattice_ft::Elem> {
    s.split(',').map(|x| l.elem(x).expect("figure1 label")).collect()
}

/// `N` on figure1: `0↔1, p↔u, q↔t, r↔s`.
pub fn figure1_negator(l: &Arc<TableLattice>) -> Negator<TableLattice> {
    Negator::from_table(l.clone(), "N", elems(l, "1,u,t,s,r,q,p,0")).expect("figure1 negator")
}

/// `A1 = (1,p,q)`, `A2 = (s,1,u)`, `A3 = (s,p,1)` on `x1, x2, x3`.
pub fn figure1_partition(l: &Arc<TableLattice>) -> LFuzzyPartition<TableLattice> {
    validate_partition(
        l.clone(),
        Universe::indexed(3),
        vec![("A1", elems(l, "1,p,q")), ("A2", elems(l, "s,1,u")), ("A3", elems(l, "s,p,1"))],
    )
    .expect("figure1 partition")
}

/// `f = (p, q, u)`.
pub fn figure1_signal(l: &TableLattice) -> Vec<lattice_ft::Elem> {
    elems(l, "p,q,u")
}

pub fn figure1_elems(l: &TableLattice, s: &str) -> Vec<lattice_ft::Elem> {
    elems(l, s)
}
