//! The `lattice-ft` command line.

pub mod example;
pub mod signal;
pub mod structures;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_ft::connectives::{validate_grouping, validate_negator, validate_overlap};
use lattice_ft::io;
use lattice_ft::lawcheck::{render_table, run_law, run_suite, LawContext, LawOptions, LawReport};
use lattice_ft::systems::DEFAULT_SEED;
use lattice_ft::{ConnectiveKind, DirectKind, Lattice, Negator};
use serde_json::{json, Value};

use crate::signal::{ComponentsFile, Normalize, TransformParams};
use crate::structures::{Builtin, Carrier};

#[derive(Debug, Parser)]
#[command(name = "lattice-ft", version, about = "Lattice-valued F-transforms from overlap and grouping maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a lattice and any supplied connectives, negator and partition.
    Check(CheckArgs),
    /// Run the law registry on a context.
    Laws(LawsArgs),
    /// Replay the figure1 worked example against its printed values.
    #[command(name = "paper-example")]
    WorkedExample(OutputArgs),
    /// Direct transform of a CSV signal or PGM image, plus its reconstruction.
    Transform(TransformArgs),
    /// Inverse transform of a components file.
    Reconstruct(ReconstructArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StructureArgs {
    /// `fig1`, `chain:N`, `unit`, or a lattice JSON file.
    #[arg(long, default_value = "fig1")]
    pub lattice: String,
    /// Closed-form name or connective JSON file.
    #[arg(long)]
    pub overlap: Option<String>,
    #[arg(long)]
    pub grouping: Option<String>,
    /// Residual implicator; `derived` (the default) takes the adjoint of the overlap.
    #[arg(long)]
    pub residual: Option<String>,
    /// Co-residual implicator; `derived` (the default) takes the adjoint of the grouping.
    #[arg(long)]
    pub coresidual: Option<String>,
    /// `none`, `standard`, or a negator JSON file.
    #[arg(long)]
    pub negator: Option<String>,
    /// Partition JSON file.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Universe size for a generated partition.
    #[arg(long, default_value_t = 3)]
    pub points: usize,
    /// Block count for a generated partition (default: one block per point).
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Off-core value of a generated partition (default: bottom).
    #[arg(long)]
    pub spread: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub structure: StructureArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LawsArgs {
    #[command(flatten)]
    pub structure: StructureArgs,
    /// Run only these laws.
    #[arg(long = "law")]
    pub laws: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Enumeration budget for fuzzy sets.
    #[arg(long, default_value_t = 4096)]
    pub budget: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    UpperTheta,
    LowerEta,
    UpperCoresidual,
    LowerResidual,
}

impl From<KindArg> for DirectKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::UpperTheta => DirectKind::UpperTheta,
            KindArg::LowerEta => DirectKind::LowerEta,
            KindArg::UpperCoresidual => DirectKind::UpperCoresidual,
            KindArg::LowerResidual => DirectKind::LowerResidual,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    /// CSV signal (one real per line) or PGM image.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::UpperTheta)]
    pub kind: KindArg,
    #[arg(long, default_value = "min")]
    pub overlap: String,
    #[arg(long, default_value = "max")]
    pub grouping: String,
    /// Defaults to the registered adjoint of the overlap.
    #[arg(long)]
    pub residual: Option<String>,
    /// Defaults to the registered adjoint of the grouping.
    #[arg(long)]
    pub coresidual: Option<String>,
    /// Signal blocks.
    #[arg(long, default_value_t = 8)]
    pub blocks: usize,
    /// Decay width (default: block length for signals, tile size for images).
    #[arg(long)]
    pub width: Option<f64>,
    /// Flat off-core value instead of a decay profile (signals only).
    #[arg(long)]
    pub spread: Option<f64>,
    /// Image tile size.
    #[arg(long, default_value_t = 2)]
    pub tile: usize,
    #[arg(long, value_enum, default_value_t = Normalize::Minmax)]
    pub normalize: Normalize,
    /// Components JSON (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reconstruction in the input's format.
    #[arg(long)]
    pub reconstruction: Option<PathBuf>,
    /// Summary format on stderr.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    /// Components JSON written by `transform`.
    pub components: PathBuf,
    /// Reconstruction path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Original input, for a deviation summary on stderr.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// How the original input was normalized.
    #[arg(long, value_enum, default_value_t = Normalize::Minmax)]
    pub normalize: Normalize,
}

/// Process exit code: 0 on success, 1 when a check or law failed.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Check(a) => check(&a),
        Command::Laws(a) => laws(&a),
        Command::WorkedExample(o) => worked_example(&o),
        Command::Transform(a) => transform(&a),
        Command::Reconstruct(a) => reconstruct(&a),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes)?;
            Ok(so.flush()?)
        }
    }
}

fn check(a: &CheckArgs) -> Result<i32> {
    let (reports, ok) = match structures::carrier(&a.structure.lattice)? {
        Carrier::Table { lattice, builtin } => {
            let neg = structures::negator_table(&lattice, builtin, a.structure.negator.as_deref())?;
            check_on(&lattice, &a.structure, neg.filter(|_| a.structure.negator.is_some()))?
        }
        Carrier::Unit(u) => {
            let neg = structures::negator_unit(&u, a.structure.negator.as_deref())?;
            check_on(&u, &a.structure, neg.filter(|_| a.structure.negator.is_some()))?
        }
    };
    let text = match a.output.format {
        Format::Json => io::pretty(&reports),
        Format::Table => check_table(&reports),
    };
    emit(a.output.out.as_deref(), text.as_bytes())?;
    Ok(if ok { 0 } else { 1 })
}

fn check_on<L: Lattice>(l: &Arc<L>, s: &StructureArgs, neg: Option<Negator<L>>) -> Result<(Vec<Value>, bool)> {
    let mut out = vec![json!({"subject": "lattice", "passed": true, "elements": if l.is_exhaustive() { l.points().len() } else { 0 }})];
    let mut ok = true;
    let mut push = |v: Value, passed: bool| {
        ok &= passed;
        out.push(v);
    };
    if let Some(spec) = &s.overlap {
        let r = validate_overlap(&structures::connective(l, spec, ConnectiveKind::Overlap)?, l)?;
        push(serde_json::to_value(&r)?, r.passed);
    }
    if let Some(spec) = &s.grouping {
        let r = validate_grouping(&structures::connective(l, spec, ConnectiveKind::Grouping)?, l)?;
        push(serde_json::to_value(&r)?, r.passed);
    }
    if let Some(n) = neg {
        let r = validate_negator(&n, l)?;
        push(serde_json::to_value(&r)?, r.report.passed);
    }
    if s.partition.is_some() {
        let p = structures::partition(l, s.partition.as_deref(), s.points, s.blocks, s.spread.as_deref())?;
        push(json!({"subject": "partition", "passed": true, "members": p.len(), "points": p.points()}), true);
    }
    Ok((out, ok))
}

fn check_table(reports: &[Value]) -> String {
    let mut s = String::new();
    for r in reports {
        let subject = r
            .get("subject")
            .or_else(|| r.get("report").and_then(|x| x.get("subject")))
            .and_then(Value::as_str)
            .unwrap_or("?");
        let passed = r
            .get("passed")
            .or_else(|| r.get("report").and_then(|x| x.get("passed")))
            .and_then(Value::as_bool)
            .unwrap_or(false);
        s.push_str(&format!("{subject:<24} {}\n", if passed { "passed" } else { "failed" }));
        let body = r.get("report").unwrap_or(r);
        if let Some(v) = body.get("violations").and_then(Value::as_array) {
            for w in v.iter().take(8) {
                s.push_str(&format!("  {}: {}\n", w["axiom"].as_str().unwrap_or("?"), w["witness"]));
            }
        }
    }
    s
}

fn laws(a: &LawsArgs) -> Result<i32> {
    let opts = LawOptions {
        budget: a.budget,
        seed: a.seed,
        ..LawOptions::default()
    };
    let reports = match structures::carrier(&a.structure.lattice)? {
        Carrier::Table { lattice, builtin } => {
            let neg = structures::negator_table(&lattice, builtin, a.structure.negator.as_deref())?;
            let p = if builtin == Builtin::Figure1 && a.structure.partition.is_none() && a.structure.blocks.is_none() {
                structures::figure1_partition(&lattice)
            } else {
                let s = &a.structure;
                structures::partition(&lattice, s.partition.as_deref(), s.points, s.blocks, s.spread.as_deref())?
            };
            suite(&lattice, &a.structure, neg, p, opts, &a.laws)?
        }
        Carrier::Unit(u) => {
            let neg = structures::negator_unit(&u, a.structure.negator.as_deref())?;
            let s = &a.structure;
            let p = structures::partition(&u, s.partition.as_deref(), s.points, s.blocks, s.spread.as_deref())?;
            suite(&u, &a.structure, neg, p, opts, &a.laws)?
        }
    };
    let text = match a.output.format {
        Format::Json => io::pretty(&reports),
        Format::Table => render_table(&reports),
    };
    emit(a.output.out.as_deref(), text.as_bytes())?;
    Ok(if reports.iter().any(LawReport::failed) { 1 } else { 0 })
}

/// The law context a `laws` invocation describes.
pub fn law_context<L: Lattice>(
    l: &Arc<L>,
    s: &StructureArgs,
    neg: Option<Negator<L>>,
    p: lattice_ft::LFuzzyPartition<L>,
    opts: LawOptions,
) -> Result<LawContext<L>> {
    let theta = structures::connective(l, s.overlap.as_deref().unwrap_or("theta_M"), ConnectiveKind::Overlap)?;
    let eta = structures::connective(l, s.grouping.as_deref().unwrap_or("eta_M"), ConnectiveKind::Grouping)?;
    let ith = structures::residual(l, s.residual.as_deref(), &theta)?;
    let ieta = structures::coresidual(l, s.coresidual.as_deref(), &eta)?;
    Ok(LawContext::new(theta, eta, neg, ith, ieta, p, opts)?)
}

fn suite<L: Lattice>(
    l: &Arc<L>,
    s: &StructureArgs,
    neg: Option<Negator<L>>,
    p: lattice_ft::LFuzzyPartition<L>,
    opts: LawOptions,
    only: &[String],
) -> Result<Vec<LawReport>> {
    let ctx = law_context(l, s, neg, p, opts)?;
    if only.is_empty() {
        return Ok(run_suite(&ctx));
    }
    Ok(only.iter().map(|id| run_law(id, &ctx)).collect::<Result<_, _>>()?)
}

fn worked_example(o: &OutputArgs) -> Result<i32> {
    let rows = example::rows();
    let text = match o.format {
        Format::Json => io::pretty(&rows),
        Format::Table => example::render(&rows),
    };
    emit(o.out.as_deref(), text.as_bytes())?;
    Ok(if example::acceptable(&rows) { 0 } else { 1 })
}

fn transform(a: &TransformArgs) -> Result<i32> {
    let params = TransformParams {
        kind: a.kind.into(),
        overlap: a.overlap.clone(),
        grouping: a.grouping.clone(),
        residual: a.residual.clone(),
        coresidual: a.coresidual.clone(),
        blocks: a.blocks,
        width: a.width,
        spread: a.spread,
        tile: a.tile,
        normalize: a.normalize,
    };
    let outcome = signal::transform(&a.input, &params)?;
    emit(a.out.as_deref(), io::pretty(&outcome.components).as_bytes())?;
    if let Some(path) = &a.reconstruction {
        let bytes = signal::encode(&outcome.components.layout, &outcome.reconstruction);
        std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
    }
    report_summary(&outcome.summary, a.format);
    Ok(if outcome.summary.sandwich { 0 } else { 1 })
}

fn report_summary(s: &signal::Summary, format: Format) {
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    match format {
        Format::Json => eprint!("{}", io::pretty(s)),
        Format::Table => eprintln!(
            "points {}  components {}  max |f - f^| {:.6}  mean |f - f^| {:.6}  sandwich {}",
            s.points,
            s.components,
            s.max_abs_deviation,
            s.mean_abs_deviation,
            if s.sandwich { "holds" } else { "VIOLATED" }
        ),
    }
}

fn reconstruct(a: &ReconstructArgs) -> Result<i32> {
    let text = structures::read(&a.components)?;
    let file: ComponentsFile = serde_json::from_str(&text).map_err(io::IoError::from).with_context(|| format!("in {}", a.components.display()))?;
    let values = signal::reconstruct(&file)?;
    emit(a.out.as_deref(), &signal::encode(&file.layout, &values))?;
    if let Some(original) = &a.input {
        let s = signal::compare(&file, original, a.normalize, &values)?;
        report_summary(&s, Format::Table);
        return Ok(if s.sandwich { 0 } else { 1 });
    }
    Ok(0)
}
