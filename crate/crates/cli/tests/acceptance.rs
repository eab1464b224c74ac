//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line
//! with its measured figures; the test fails if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use lattice_ft::connectives::{adjointness_check, derive_coresidual, derive_residual};
use lattice_ft::lawcheck::{run_law, LawStatus};
use lattice_ft::partitions::{block_partition, enumerate_fuzzy_sets, validate_partition};
use lattice_ft::systems::{partition_from_system, same_operator, system_from_partition, SystemCheck};
use lattice_ft::transforms::{direct_transform, inverse_transform, inverse_transform_with};
use lattice_ft::{
    ClosedForm, Connective, DirectKind, Elem, Exec, LFuzzyPartition, Lattice, LawContext, LawOptions, Negator, TableLattice,
    Universe,
};
use lattice_ft_cli::example::{self, RowStatus};
use lattice_ft_cli::structures::{figure1_negator, figure1_partition};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXAMPLE_LIMIT: Duration = Duration::from_secs(1);
const SANDWICH_LIMIT: Duration = Duration::from_secs(10);
const CLI_LIMIT: Duration = Duration::from_secs(1);
const LAWS_LIMIT: Duration = Duration::from_secs(60);
const CLI_TOLERANCE: f64 = 1e-9;
const ORACLE_CONTEXTS: u64 = 200;
const ROUND_TRIP_BUDGET: usize = 4096;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn three_lattices() -> Vec<(&'static str, Arc<TableLattice>)> {
    vec![
        ("chain(4)", Arc::new(TableLattice::chain(4))),
        ("chain(5)", Arc::new(TableLattice::chain(5))),
        ("figure1", Arc::new(TableLattice::figure1())),
    ]
}

fn meet_join(l: &Arc<TableLattice>) -> (Connective<TableLattice>, Connective<TableLattice>) {
    (Connective::closed(l.clone(), ClosedForm::Meet).unwrap(), Connective::closed(l.clone(), ClosedForm::Join).unwrap())
}

fn crisp(l: &Arc<TableLattice>, n: usize) -> LFuzzyPartition<TableLattice> {
    let blocks: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
    block_partition(l.clone(), Universe::indexed(n), &blocks, l.bottom()).unwrap()
}

fn direct_example() -> Outcome {
    let start = Instant::now();
    let rows = example::rows();
    let direct = &rows[..12];
    let matches = direct.iter().filter(|r| r.status == RowStatus::Match).count();
    let odd: Vec<_> = direct.iter().enumerate().filter(|(_, r)| r.status != RowStatus::Match).collect();
    let o = common::Oracle::figure1();
    let idx = |s: &str| s.split(',').map(|x| o.index(x)).collect::<Vec<_>>();
    let table = idx("1,u,t,s,r,q,p,0");
    let members = vec![idx("1,p,q"), idx("s,1,u"), idx("s,p,1")];
    let fold = common::direct(&o, "lower-eta", &members, &|u| table[u], &idx("p,q,u"));
    // rows 3..6 are the lower-eta components
    let only_known = odd.iter().all(|(i, r)| *i == 4 && r.printed == "r" && r.computed == o.labels[fold[1]]);
    let elapsed = start.elapsed();
    outcome(
        matches >= 11 && only_known && elapsed < EXAMPLE_LIMIT,
        format!("{matches}/12 printed values, oracle component 2 = {}, {elapsed:.2?}", o.labels[fold[1]]),
    )
}

fn inverse_example() -> Outcome {
    let start = Instant::now();
    let rows = example::rows();
    let matches = rows[12..].iter().filter(|r| r.status == RowStatus::Match).count();
    let elapsed = start.elapsed();
    outcome(matches == 12 && elapsed < EXAMPLE_LIMIT, format!("{matches}/12 printed values, {elapsed:.2?}"))
}

fn adjointness() -> Outcome {
    let mut ok = true;
    let mut parts = vec![];
    for (name, l) in three_lattices() {
        let (m, j) = meet_join(&l);
        let n3 = (l.len() as u64).pow(3);
        for (c, imp) in [(&m, derive_residual(&m).unwrap()), (&j, derive_coresidual(&j).unwrap())] {
            let r = adjointness_check(c, &imp).unwrap();
            ok &= r.passed && r.violation_count == 0 && r.checked_cases == n3;
            parts.push(format!("{name} {}: {}/{n3}", c.name(), r.checked_cases));
        }
    }
    outcome(ok, parts.join(", "))
}

fn implicator_laws() -> Outcome {
    let ids: Vec<&str> = lattice_ft::lawcheck::law_ids()
        .into_iter()
        .filter(|id| id.starts_with("L2.2") || id.starts_with("L2.3") || id.starts_with("D2."))
        .collect();
    let mut failed = vec![];
    let mut skipped = 0;
    for (name, l) in three_lattices() {
        let (m, j) = meet_join(&l);
        let ctx = LawContext::derived(m, j, None, crisp(&l, 2), LawOptions::default()).unwrap();
        for id in &ids {
            match run_law(id, &ctx).unwrap().status {
                LawStatus::Passed => {}
                LawStatus::HypothesisNotMet { .. } => skipped += 1,
                LawStatus::Failed { .. } => failed.push(format!("{name} {id}")),
            }
        }
    }
    outcome(
        failed.is_empty(),
        format!("{} laws x 3 lattices, {} failed {failed:?}, {skipped} hypothesis-not-met", ids.len(), failed.len()),
    )
}

fn sandwich_and_stability() -> Outcome {
    let start = Instant::now();
    let l = Arc::new(TableLattice::figure1());
    let p = figure1_partition(&l);
    let n = figure1_negator(&l);
    let (m, j) = meet_join(&l);
    let (ith, ieta) = (derive_residual(&m).unwrap(), derive_coresidual(&j).unwrap());
    let sets = enumerate_fuzzy_sets(&*l, 3, 512, 0);
    let mut violations = 0;
    for f in &sets.sets {
        for (k, d, i) in [
            (DirectKind::UpperTheta, &m, &ith),
            (DirectKind::LowerResidual, &ith, &m),
            (DirectKind::LowerEta, &j, &ieta),
            (DirectKind::UpperCoresidual, &ieta, &j),
        ] {
            let t = direct_transform(k, &p, d, Some(&n), f).unwrap();
            let back = inverse_transform(&p, i, Some(&n), &t).unwrap();
            let sandwich = if k.is_upper() { l.leq_all(f, &back) } else { l.leq_all(&back, f) };
            let stable = direct_transform(k, &p, d, Some(&n), &back).unwrap().components == t.components;
            violations += usize::from(!sandwich) + usize::from(!stable);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        sets.exhaustive && sets.sets.len() == 512 && violations == 0 && elapsed < SANDWICH_LIMIT,
        format!("{} f x 4 kinds, {violations} violations, {elapsed:.2?}", sets.sets.len()),
    )
}

fn round_trips() -> Outcome {
    let mut bad = vec![];
    let mut runs = 0;
    let fig = Arc::new(TableLattice::figure1());
    let c3 = Arc::new(TableLattice::chain(3));
    let c3p = validate_partition(
        c3.clone(),
        Universe::indexed(3),
        vec![("A1", vec![Elem(2), Elem(1), Elem(0)]), ("A2", vec![Elem(1), Elem(2), Elem(2)])],
    )
    .unwrap();
    let c3n = Negator::from_table(c3.clone(), "reversal", vec![Elem(2), Elem(1), Elem(0)]).unwrap();
    let cases = [("figure1", &fig, figure1_partition(&fig), figure1_negator(&fig)), ("chain(3)", &c3, c3p, c3n)];
    let opts = SystemCheck {
        budget: ROUND_TRIP_BUDGET,
        ..SystemCheck::default()
    };
    for (name, l, p, n) in cases {
        let (m, j) = meet_join(l);
        let (ith, ieta) = (derive_residual(&m).unwrap(), derive_coresidual(&j).unwrap());
        for (k, c) in [
            (DirectKind::UpperTheta, &m),
            (DirectKind::LowerEta, &j),
            (DirectKind::UpperCoresidual, &ieta),
            (DirectKind::LowerResidual, &ith),
        ] {
            runs += 1;
            let sys = system_from_partition(&p, k, c, Some(&n)).unwrap();
            let back = partition_from_system(&sys).unwrap();
            if back.members() != p.members() {
                bad.push(format!("{name} {k}: partition"));
                continue;
            }
            let again = system_from_partition(&back, k, c, Some(&n)).unwrap();
            if same_operator(&sys, &again, &opts).unwrap().is_some() {
                bad.push(format!("{name} {k}: operator"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{runs} round trips, failures {bad:?}"))
}

fn duality() -> Outcome {
    let ids = ["P3.1", "P3.2", "P5.5", "P5.6", "P5.7", "P5.8"];
    let l = Arc::new(TableLattice::figure1());
    let (m, j) = meet_join(&l);
    let with = LawContext::derived(m.clone(), j.clone(), Some(figure1_negator(&l)), figure1_partition(&l), LawOptions::default()).unwrap();
    let without = LawContext::derived(m, j, None, figure1_partition(&l), LawOptions::default()).unwrap();
    let mut summary = vec![];
    let mut ok = true;
    for id in ids {
        let a = run_law(id, &with).unwrap();
        let b = run_law(id, &without).unwrap();
        ok &= !a.failed() && matches!(b.status, LawStatus::HypothesisNotMet { .. });
        summary.push(format!("{id} {}/{}", a.status.label(), b.status.label()));
    }
    outcome(ok, format!("with N / without N: {}", summary.join(", ")))
}

fn differential_oracle() -> Outcome {
    let mut mismatches = 0;
    let mut compared = 0;
    for seed in 0..ORACLE_CONTEXTS {
        let (o, lib) = match seed % 6 {
            w @ 0..=3 => (common::Oracle::chain(3 + w as usize), TableLattice::chain(3 + w as usize)),
            4 => (common::Oracle::figure1(), TableLattice::figure1()),
            _ => (common::Oracle::square(), TableLattice::product(&TableLattice::chain(2), &TableLattice::chain(2))),
        };
        let l = Arc::new(lib);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = common::random_ctx(&o, &mut rng, 4);
        let to_lib = |i: usize| l.elem(&o.labels[i]).unwrap();
        let to_o = |v: &[Elem]| v.iter().map(|&e| o.index(&l.labels()[e.index()])).collect::<Vec<_>>();
        let members = ctx
            .members
            .iter()
            .enumerate()
            .map(|(j, m)| (format!("A{}", j + 1), m.iter().map(|&i| to_lib(i)).collect()))
            .collect();
        let p = validate_partition(l.clone(), Universe::indexed(ctx.f.len()), members).unwrap();
        let (m, j) = meet_join(&l);
        let (ith, ieta) = (derive_residual(&m).unwrap(), derive_coresidual(&j).unwrap());
        let n = Negator::induced(&ith).unwrap();
        let f: Vec<Elem> = ctx.f.iter().map(|&i| to_lib(i)).collect();
        for (k, name) in DirectKind::ALL.into_iter().zip(common::KINDS) {
            let (d, i) = match k {
                DirectKind::UpperTheta => (&m, &ith),
                DirectKind::LowerEta => (&j, &ieta),
                DirectKind::UpperCoresidual => (&ieta, &j),
                DirectKind::LowerResidual => (&ith, &m),
            };
            let t = direct_transform(k, &p, d, Some(&n), &f).unwrap();
            let want = common::direct(&o, name, &ctx.members, &|u| o.induced_neg(u), &ctx.f);
            let back = inverse_transform_with(Exec::Sequential, &p, i, Some(&n), k, &t.components).unwrap();
            let want_back = common::inverse(&o, name, &ctx.members, &|u| o.induced_neg(u), &want);
            compared += 2;
            mismatches += usize::from(to_o(&t.components) != want) + usize::from(to_o(&back) != want_back);
        }
    }
    outcome(mismatches == 0, format!("{ORACLE_CONTEXTS} contexts, {compared} transforms compared, {mismatches} mismatches"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lattice-ft"))
}

fn read_csv(path: &Path) -> Vec<f64> {
    lattice_ft::io::parse_csv(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn cli_ramp() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ramp.csv");
    let ramp: Vec<f64> = (0..64).map(f64::from).collect();
    std::fs::write(&input, lattice_ft::io::write_csv(&ramp)).unwrap();
    let (comps, recon) = (dir.path().join("c.json"), dir.path().join("r.csv"));
    let start = Instant::now();
    let status = bin()
        .args(["transform", "--kind", "upper-theta", "--overlap", "min", "--residual", "godel", "--blocks", "8"])
        .arg(&input)
        .arg("--out")
        .arg(&comps)
        .arg("--reconstruction")
        .arg(&recon)
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    if !status.status.success() {
        return outcome(false, String::from_utf8_lossy(&status.stderr).into_owned());
    }
    let back = read_csv(&recon);
    let norm: Vec<f64> = ramp.iter().map(|x| x / 63.0).collect();
    let worst = norm.iter().zip(&back).map(|(f, r)| f - r).fold(f64::NEG_INFINITY, f64::max);
    let sandwich = back.len() == 64 && worst <= CLI_TOLERANCE;
    let comps2 = dir.path().join("c2.json");
    let again = bin()
        .args(["transform", "--kind", "upper-theta", "--overlap", "min", "--residual", "godel", "--blocks", "8", "--normalize", "none"])
        .arg(&recon)
        .arg("--out")
        .arg(&comps2)
        .output()
        .unwrap();
    let idempotent = again.status.success() && std::fs::read(&comps).unwrap() == std::fs::read(&comps2).unwrap();
    outcome(
        sandwich && idempotent && elapsed < CLI_LIMIT,
        format!("max(f - f^) = {worst:.3e}, components idempotent: {idempotent}, {elapsed:.2?}"),
    )
}

fn laws_subcommand() -> Outcome {
    let start = Instant::now();
    let out = bin().args(["laws", "--lattice", "fig1", "--format", "json"]).output().unwrap();
    let elapsed = start.elapsed();
    let reports: Vec<serde_json::Value> = match serde_json::from_slice(&out.stdout) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("unparsable report: {e}")),
    };
    let count = |s: &str| reports.iter().filter(|r| r["status"] == s).count();
    outcome(
        out.status.success() && count("failed") == 0 && elapsed < LAWS_LIMIT,
        format!(
            "{} laws: {} passed, {} failed, {} hypothesis-not-met, {elapsed:.2?}",
            reports.len(),
            count("passed"),
            count("failed"),
            count("hypothesis-not-met")
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("worked example, direct components", direct_example),
        ("worked example, inverse values", inverse_example),
        ("adjointness on chain(4), chain(5), figure1", adjointness),
        ("implicator lemmas and dual list", implicator_laws),
        ("sandwich and stability over all 512 f", sandwich_and_stability),
        ("partition/system round trips", round_trips),
        ("duality suite", duality),
        ("differential oracle", differential_oracle),
        ("CLI ramp data path", cli_ramp),
        ("laws subcommand on figure1", laws_subcommand),
    ];
    // written straight to the handle so the lines show without --nocapture
    let mut out = std::io::stdout().lock();
    let mut failed = vec![];
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        writeln!(out, "{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail).unwrap();
        if !o.pass {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
