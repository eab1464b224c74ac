//! Compression and reconstruction of CSV signals and PGM images on `[0, 1]`.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use lattice_ft::io::{self, Pgm, PgmEncoding, TransformJson};
use lattice_ft::partitions::{block_partition, decay_partition, equal_blocks, tile_partition};
use lattice_ft::transforms::{direct_transform, inverse_transform};
use lattice_ft::{ClosedForm, Connective, DirectKind, LFuzzyPartition, Lattice, Negator, UnitInterval, Universe};
use serde::{Deserialize, Serialize};

/// How the partition was built; stored in the components file so that the
/// reconstruction needs nothing else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase")]
pub enum Layout {
    Csv {
        points: usize,
        blocks: usize,
        /// Decay width; absent for a flat `spread` profile.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spread: Option<f64>,
    },
    Pgm {
        width: usize,
        height: usize,
        maxval: u16,
        raw: bool,
        tile: usize,
        decay: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentsFile {
    #[serde(flatten)]
    pub transform: TransformJson,
    /// Closed form used by the matched inverse.
    pub inverse: String,
    pub layout: Layout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Normalize {
    /// Min-max rescaling into `[0, 1]`.
    #[default]
    Minmax,
    /// Values must already lie in `[0, 1]`.
    None,
}

#[derive(Debug, Clone)]
pub struct TransformParams {
    pub kind: DirectKind,
    pub overlap: String,
    pub grouping: String,
    pub residual: Option<String>,
    pub coresidual: Option<String>,
    pub blocks: usize,
    pub width: Option<f64>,
    pub spread: Option<f64>,
    pub tile: usize,
    pub normalize: Normalize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub points: usize,
    pub components: usize,
    pub max_abs_deviation: f64,
    pub mean_abs_deviation: f64,
    /// Upper kinds reconstruct from above, lower kinds from below.
    pub sandwich: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub struct Outcome {
    pub components: ComponentsFile,
    pub input: Vec<f64>,
    pub reconstruction: Vec<f64>,
    pub summary: Summary,
}

fn unit() -> Arc<UnitInterval> {
    Arc::new(UnitInterval::default())
}

fn closed(u: &Arc<UnitInterval>, name: &str) -> Result<Connective<UnitInterval>> {
    let form = ClosedForm::parse(name).ok_or_else(|| anyhow!("unknown closed form `{name}`"))?;
    Ok(Connective::closed(u.clone(), form)?)
}

fn partner(base: &Connective<UnitInterval>, given: Option<&str>, u: &Arc<UnitInterval>) -> Result<Connective<UnitInterval>> {
    match given {
        Some(name) => closed(u, name),
        None => {
            let form = base
                .closed_form()
                .and_then(ClosedForm::implicator)
                .ok_or_else(|| anyhow!("`{}` has no registered adjoint", base.name()))?;
            Ok(Connective::closed(u.clone(), form)?)
        }
    }
}

/// `(direct, inverse)` connectives for `kind`.
fn connectives(u: &Arc<UnitInterval>, p: &TransformParams) -> Result<(Connective<UnitInterval>, Connective<UnitInterval>)> {
    let theta = closed(u, &p.overlap)?;
    let eta = closed(u, &p.grouping)?;
    let ith = partner(&theta, p.residual.as_deref(), u)?;
    let ieta = partner(&eta, p.coresidual.as_deref(), u)?;
    let pair = match p.kind {
        DirectKind::UpperTheta => (theta, ith),
        DirectKind::LowerResidual => (ith, theta),
        DirectKind::UpperCoresidual => (ieta, eta),
        DirectKind::LowerEta => (eta, ieta),
    };
    for (c, want) in [(&pair.0, p.kind.connective()), (&pair.1, p.kind.inverse_connective())] {
        if c.kind() != want {
            bail!("`{}` is a {}, {} needs a {want}", c.name(), c.kind(), p.kind);
        }
    }
    Ok(pair)
}

fn partition(u: &Arc<UnitInterval>, layout: &Layout) -> Result<LFuzzyPartition<UnitInterval>> {
    Ok(match *layout {
        Layout::Csv {
            points,
            blocks,
            width,
            spread,
        } => {
            let b = equal_blocks(points, blocks)?;
            match (width, spread) {
                (_, Some(s)) => block_partition(u.clone(), Universe::indexed(points), &b, s)?,
                (Some(w), None) => decay_partition(u.clone(), Universe::indexed(points), &b, w)?,
                (None, None) => bail!("layout needs a decay width or a spread"),
            }
        }
        Layout::Pgm {
            width,
            height,
            tile,
            decay,
            ..
        } => tile_partition(u.clone(), width, height, tile, decay)?,
    })
}

enum Input {
    Signal(Vec<f64>),
    Image(Pgm),
}

fn load(path: &Path) -> Result<Input> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        return Ok(Input::Image(io::parse_pgm(&bytes)?));
    }
    if bytes.first() == Some(&b'P') {
        return Err(io::IoError::UnsupportedFormat(format!("{} is a netpbm file but not a PGM", path.display())).into());
    }
    let text = String::from_utf8(bytes).map_err(|_| anyhow!("unsupported format: {} is neither CSV nor PGM", path.display()))?;
    Ok(Input::Signal(io::parse_csv(&text).with_context(|| format!("in {}", path.display()))?))
}

fn negator(u: &Arc<UnitInterval>, kind: DirectKind) -> Result<Option<Negator<UnitInterval>>> {
    Ok(if kind.needs_negator() {
        Some(Negator::standard(u.clone())?)
    } else {
        None
    })
}

pub fn transform(path: &Path, p: &TransformParams) -> Result<Outcome> {
    let u = unit();
    let mut warnings = vec![];
    let (values, layout) = match load(path)? {
        Input::Signal(xs) => {
            let values = match p.normalize {
                Normalize::Minmax => {
                    let (v, degenerate) = io::min_max(&xs);
                    if degenerate {
                        warnings.push("constant input normalized to all zeros".to_string());
                    }
                    v
                }
                Normalize::None => {
                    if let Some(x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                        bail!("sample {x} lies outside [0, 1]; use --normalize minmax");
                    }
                    xs
                }
            };
            let n = values.len();
            if p.blocks == 0 || p.blocks > n {
                bail!("{} blocks for {n} samples", p.blocks);
            }
            let layout = Layout::Csv {
                points: n,
                blocks: p.blocks,
                width: if p.spread.is_some() { None } else { Some(p.width.unwrap_or((n / p.blocks) as f64)) },
                spread: p.spread,
            };
            (values, layout)
        }
        Input::Image(img) => {
            let layout = Layout::Pgm {
                width: img.width,
                height: img.height,
                maxval: img.maxval,
                raw: img.encoding == PgmEncoding::Raw,
                tile: p.tile,
                decay: p.width.unwrap_or(p.tile as f64),
            };
            (img.to_unit(), layout)
        }
    };
    let part = partition(&u, &layout)?;
    let (direct, inverse) = connectives(&u, p)?;
    let neg = negator(&u, p.kind)?;
    let t = direct_transform(p.kind, &part, &direct, neg.as_ref(), &values)?;
    let recon = inverse_transform(&part, &inverse, neg.as_ref(), &t)?;
    let summary = summarize(&u, p.kind, &values, &recon, t.components.len(), warnings);
    Ok(Outcome {
        components: ComponentsFile {
            transform: io::transform_json(&*u, &t),
            inverse: inverse.name().to_string(),
            layout,
        },
        input: values,
        reconstruction: recon,
        summary,
    })
}

fn summarize(u: &UnitInterval, kind: DirectKind, f: &[f64], recon: &[f64], components: usize, warnings: Vec<String>) -> Summary {
    let dev: Vec<f64> = f.iter().zip(recon).map(|(a, b)| (a - b).abs()).collect();
    let sandwich = f
        .iter()
        .zip(recon)
        .all(|(&x, &r)| if kind.is_upper() { u.leq(x, r) } else { u.leq(r, x) });
    Summary {
        points: f.len(),
        components,
        max_abs_deviation: dev.iter().copied().fold(0.0, f64::max),
        mean_abs_deviation: dev.iter().sum::<f64>() / dev.len().max(1) as f64,
        sandwich,
        warnings,
    }
}

/// Inverse transform of a components file.
pub fn reconstruct(file: &ComponentsFile) -> Result<Vec<f64>> {
    let u = unit();
    let part = partition(&u, &file.layout)?;
    let t = io::transform_from_json(&part, &file.transform)?;
    let inverse = closed(&u, &file.inverse)?;
    if inverse.kind() != t.kind.inverse_connective() {
        bail!("`{}` cannot invert {}", file.inverse, t.kind);
    }
    let neg = negator(&u, t.kind)?;
    Ok(inverse_transform(&part, &inverse, neg.as_ref(), &t)?)
}

/// Reconstruction bytes in the input's format.
pub fn encode(layout: &Layout, values: &[f64]) -> Vec<u8> {
    match *layout {
        Layout::Csv { .. } => io::write_csv(values).into_bytes(),
        Layout::Pgm {
            width,
            height,
            maxval,
            raw,
            ..
        } => {
            let enc = if raw { PgmEncoding::Raw } else { PgmEncoding::Plain };
            Pgm::from_unit(width, height, maxval, enc, values).encode()
        }
    }
}

/// Deviation and sandwich figures of a reconstruction against the original.
pub fn compare(file: &ComponentsFile, original: &Path, normalize: Normalize, recon: &[f64]) -> Result<Summary> {
    let f = match (load(original)?, &file.layout) {
        (Input::Signal(xs), Layout::Csv { .. }) if normalize == Normalize::Minmax => io::min_max(&xs).0,
        (Input::Signal(xs), Layout::Csv { .. }) => xs,
        (Input::Image(img), Layout::Pgm { .. }) => img.to_unit(),
        _ => bail!("{} does not match the components layout", original.display()),
    };
    if f.len() != recon.len() {
        bail!("{} has {} points, the components describe {}", original.display(), f.len(), recon.len());
    }
    Ok(summarize(&UnitInterval::default(), file.transform.kind, &f, recon, file.transform.components.len(), vec![]))
}
