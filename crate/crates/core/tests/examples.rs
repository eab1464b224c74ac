use std::sync::Arc;

use lattice_ft::connectives::{
    adjointness_check, check_duality, connective_properties, derive_coresidual, derive_residual, induced_negator,
    validate_grouping, validate_negator, validate_overlap,
};
use lattice_ft::lattice::{EmptyFamily, LatticeError};
use lattice_ft::lawcheck::{run_law, LawStatus};
use lattice_ft::partitions::{
    block_partition, characteristic_set, core, decay_partition, enumerate_fuzzy_sets, equal_blocks, validate_partition,
    PartitionError,
};
use lattice_ft::systems::{
    check_system_duality, partition_from_system, system_from_partition, validate_lower_system, validate_upper_system,
    FnOperator, SystemCheck,
};
use lattice_ft::transforms::{direct_transform, inverse_transform_with};
use lattice_ft::{
    ClosedForm, Connective, DirectKind, Elem, Exec, LFuzzyPartition, Lattice, LawContext, LawOptions, Negator,
    SystemKind, TableLattice, TransformationSystem, UnitInterval, Universe,
};

fn fig1() -> Arc<TableLattice> {
    Arc::new(TableLattice::figure1())
}

fn e(l: &TableLattice, s: &str) -> Elem {
    l.elem(s).unwrap()
}

fn es(l: &TableLattice, s: &str) -> Vec<Elem> {
    s.split(',').map(|x| e(l, x)).collect()
}

fn neg_n(l: &Arc<TableLattice>) -> Negator<TableLattice> {
    Negator::from_table(l.clone(), "N", es(l, "1,u,t,s,r,q,p,0")).unwrap()
}

fn part(l: &Arc<TableLattice>) -> LFuzzyPartition<TableLattice> {
    validate_partition(
        l.clone(),
        Universe::indexed(3),
        vec![("A1", es(l, "1,p,q")), ("A2", es(l, "s,1,u")), ("A3", es(l, "s,p,1"))],
    )
    .unwrap()
}

fn closed<L: Lattice>(l: &Arc<L>, f: ClosedForm) -> Connective<L> {
    Connective::closed(l.clone(), f).unwrap()
}

#[test]
fn two_chain_is_min_max() {
    let l = TableLattice::build(&["0", "1"], &[("0", "1")]).unwrap();
    let (a, b) = (e(&l, "0"), e(&l, "1"));
    assert_eq!((l.join(a, b), l.meet(a, b)), (b, a));
}

#[test]
fn figure1_meets_and_joins() {
    let l = fig1();
    assert_eq!(l.meet(e(&l, "q"), e(&l, "r")), e(&l, "p"));
    assert_eq!(l.join(e(&l, "s"), e(&l, "t")), e(&l, "u"));
    for x in l.elements() {
        assert_eq!(l.meet(x, x), x);
    }
    assert_eq!(l.join_of(&es(&l, "q,r"), EmptyFamily::Strict).unwrap(), e(&l, "s"));
    assert_eq!(l.meet_of(&es(&l, "t"), EmptyFamily::Strict).unwrap(), e(&l, "t"));
    let c = TableLattice::chain(5);
    assert_eq!(c.join_of(&es(&c, "1,3,2"), EmptyFamily::Strict).unwrap(), e(&c, "3"));
}

#[test]
fn antichain_is_rejected() {
    let err = TableLattice::build::<&str>(&["a", "b"], &[]).unwrap_err();
    assert!(matches!(err, LatticeError::NotALattice { .. }), "{err:?}");
}

#[test]
fn connective_validators() {
    let l = fig1();
    // meet and join on figure1: the validator is the authority, so only
    // report consistency is asserted
    for r in [validate_overlap(&closed(&l, ClosedForm::Meet), &l).unwrap(), validate_grouping(&closed(&l, ClosedForm::Join), &l).unwrap()] {
        assert_eq!(r.passed, r.violation_count == 0);
    }
    let u = Arc::new(UnitInterval::default());
    assert!(validate_overlap(&closed(&u, ClosedForm::Product), &u).unwrap().passed);
    assert!(validate_grouping(&closed(&u, ClosedForm::ProbSum), &u).unwrap().passed);

    let c2 = Arc::new(TableLattice::chain(2));
    let (z, o) = (e(&c2, "0"), e(&c2, "1"));
    let bad = Connective::from_table(c2.clone(), lattice_ft::ConnectiveKind::Overlap, "bad", vec![vec![z, o], vec![z, o]]).unwrap();
    let r = validate_overlap(&bad, &c2).unwrap();
    assert!(!r.passed);
    assert!(r.violations.iter().any(|v| v.axiom == "ii"), "{:?}", r.violations);
    let bad = Connective::from_table(c2.clone(), lattice_ft::ConnectiveKind::Grouping, "bad", vec![vec![z, o], vec![z, o]]).unwrap();
    let r = validate_grouping(&bad, &c2).unwrap();
    assert!(r.violations.iter().any(|v| v.axiom == "iii"), "{:?}", r.violations);
}

#[test]
fn negators() {
    let l = fig1();
    let r = validate_negator(&neg_n(&l), &l).unwrap();
    assert!(r.report.passed && r.involutive);
    let u = Arc::new(UnitInterval::default());
    let r = validate_negator(&Negator::standard(u.clone()).unwrap(), &u).unwrap();
    assert!(r.report.passed && r.involutive);
    let id = Negator::from_table(l.clone(), "id", l.elements().collect()).unwrap();
    assert!(!validate_negator(&id, &l).unwrap().report.passed);
}

#[test]
fn implicators() {
    let u = Arc::new(UnitInterval::default());
    let i = derive_residual(&closed(&u, ClosedForm::Meet)).unwrap();
    for (a, b) in [(0.3, 0.7), (0.7, 0.3), (0.5, 0.5), (1.0, 0.0), (0.0, 0.0)] {
        let want = if a <= b { 1.0 } else { b };
        assert!((i.apply(a, b) - want).abs() < 1e-9, "I({a},{b})");
    }
    let l = fig1();
    let i = derive_residual(&closed(&l, ClosedForm::Meet)).unwrap();
    assert_eq!(i.apply(e(&l, "q"), e(&l, "r")), e(&l, "t"));

    let c3 = Arc::new(TableLattice::chain(3));
    let ie = derive_coresidual(&closed(&c3, ClosedForm::Join)).unwrap();
    assert_eq!(ie.apply(e(&c3, "2"), e(&c3, "1")), e(&c3, "0"));
    assert_eq!(ie.apply(e(&c3, "0"), e(&c3, "2")), e(&c3, "2"));
    let ex = closed(&u, ClosedForm::Ex22);
    assert_eq!((ex.apply(0.3, 0.7), ex.apply(0.7, 0.3)), (0.0, 0.7));

    let n = induced_negator(&closed(&u, ClosedForm::Godel)).unwrap();
    assert_eq!((n.apply(0.0), n.apply(0.2), n.apply(1.0)), (1.0, 0.0, 0.0));
}

#[test]
fn chain_residual_matches_closed_form() {
    for n in 2..7 {
        let l = Arc::new(TableLattice::chain(n));
        let i = derive_residual(&closed(&l, ClosedForm::Meet)).unwrap();
        for a in l.elements() {
            for b in l.elements() {
                assert_eq!(i.apply(a, b), if a <= b { l.top() } else { b });
            }
        }
    }
}

#[test]
fn duality() {
    let u = Arc::new(UnitInterval::default());
    let n = Negator::standard(u.clone()).unwrap();
    assert!(check_duality(&closed(&u, ClosedForm::Meet), &closed(&u, ClosedForm::Join), &n, None).unwrap().passed);
    let r = check_duality(&closed(&u, ClosedForm::Product), &closed(&u, ClosedForm::Join), &n, None).unwrap();
    assert!(!r.passed && !r.violations.is_empty());
    let l = fig1();
    let r = check_duality(&closed(&l, ClosedForm::Meet), &closed(&l, ClosedForm::Join), &neg_n(&l), None).unwrap();
    assert_eq!(r.checked_cases, 64);
}

#[test]
fn properties_and_adjointness() {
    let l = fig1();
    let p = connective_properties(&closed(&l, ClosedForm::Meet));
    assert_eq!(p.neutral, Some(true));
    assert!(p.ep);
    let u = Arc::new(UnitInterval::default());
    let p = connective_properties(&closed(&u, ClosedForm::Product));
    assert_eq!((p.deflation, p.inflation), (Some(true), Some(true)));

    let m = closed(&l, ClosedForm::Meet);
    let r = adjointness_check(&m, &derive_residual(&m).unwrap()).unwrap();
    assert!(r.passed);
    assert_eq!(r.checked_cases, 512);
    assert!(adjointness_check(&closed(&u, ClosedForm::Meet), &closed(&u, ClosedForm::Godel)).unwrap().passed);
    let c3 = Arc::new(TableLattice::chain(3));
    assert!(!adjointness_check(&closed(&c3, ClosedForm::Join), &closed(&c3, ClosedForm::Ex22)).unwrap().passed);
}

#[test]
fn characteristic_sets() {
    let l = fig1();
    let x = Universe::indexed(3);
    let one = characteristic_set(&*l, &x, &["x1"]).unwrap();
    assert_eq!(one, es(&l, "1,0,0"));
    let all = characteristic_set(&*l, &x, &["x1", "x2", "x3"]).unwrap();
    assert_eq!(all, es(&l, "1,1,1"));
    assert_eq!(core(&*l, &characteristic_set(&*l, &x, &["x1", "x3"]).unwrap()), vec![0, 2]);
}

#[test]
fn partitions() {
    let l = fig1();
    let p = part(&l);
    assert_eq!(p.cores(), &[vec![0], vec![1], vec![2]]);
    assert_eq!(p.index_map(), &[0, 1, 2]);
    let one = validate_partition(l.clone(), Universe::indexed(3), vec![("A", es(&l, "1,1,1"))]).unwrap();
    assert_eq!(one.len(), 1);
    let err = validate_partition(l.clone(), Universe::indexed(3), vec![("A1", es(&l, "1,1,q")), ("A2", es(&l, "s,1,1"))]).unwrap_err();
    assert!(matches!(err, PartitionError::CoresOverlap { .. }), "{err:?}");

    let crisp = block_partition(l.clone(), Universe::indexed(3), &[vec![0], vec![1], vec![2]], l.bottom()).unwrap();
    assert_eq!(crisp.members()[1], es(&l, "0,1,0"));
    let b = block_partition(l.clone(), Universe::indexed(3), &[vec![0, 1], vec![2]], e(&l, "p")).unwrap();
    assert_eq!(b.members(), &[es(&l, "1,1,p"), es(&l, "p,p,1")]);

    let u = Arc::new(UnitInterval::default());
    let d = decay_partition(u.clone(), Universe::indexed(64), &equal_blocks(64, 4).unwrap(), 16.0).unwrap();
    assert!(d.revalidate().is_ok());
    assert_eq!(d.len(), 4);
}

#[test]
fn enumeration() {
    let c2 = TableLattice::chain(2);
    let en = enumerate_fuzzy_sets(&c2, 2, 100, 0);
    assert!(en.exhaustive);
    assert_eq!(en.sets, vec![es(&c2, "0,0"), es(&c2, "0,1"), es(&c2, "1,0"), es(&c2, "1,1")]);
    let l = TableLattice::figure1();
    let en = enumerate_fuzzy_sets(&l, 3, 1000, 0);
    assert!(en.exhaustive);
    assert_eq!(en.sets.len(), 512);
    let a = enumerate_fuzzy_sets(&l, 6, 500, 7);
    assert!(!a.exhaustive);
    assert_eq!(a.sets.len(), 500);
    assert_eq!(a.sets, enumerate_fuzzy_sets(&l, 6, 500, 7).sets);
}

#[test]
fn worked_direct_transforms() {
    let l = fig1();
    let p = part(&l);
    let n = neg_n(&l);
    let f = es(&l, "p,q,u");
    let m = closed(&l, ClosedForm::Meet);
    let j = closed(&l, ClosedForm::Join);
    let ith = derive_residual(&m).unwrap();
    let run = |k, c: &Connective<TableLattice>| direct_transform(k, &p, c, Some(&n), &f).unwrap().components;
    assert_eq!(run(DirectKind::UpperTheta, &m), es(&l, "q,u,u"));
    assert_eq!(run(DirectKind::LowerResidual, &ith), es(&l, "p,p,p"));
    assert_eq!(run(DirectKind::UpperCoresidual, &closed(&l, ClosedForm::Ex22)), es(&l, "u,r,u"));
    // the printed second and third components are r, r; the fold gives p, r
    assert_eq!(run(DirectKind::LowerEta, &j), es(&l, "p,p,r"));
    let zero = direct_transform(DirectKind::UpperTheta, &p, &m, None, &es(&l, "0,0,0")).unwrap();
    assert_eq!(zero.components, es(&l, "0,0,0"));
}

#[test]
fn worked_inverse_transforms() {
    let l = fig1();
    let p = part(&l);
    let n = neg_n(&l);
    let m = closed(&l, ClosedForm::Meet);
    let ith = derive_residual(&m).unwrap();
    let inv = |k, c: &Connective<TableLattice>, comps: &str| inverse_transform_with(Exec::Sequential, &p, c, Some(&n), k, &es(&l, comps)).unwrap();
    assert_eq!(inv(DirectKind::UpperTheta, &ith, "q,u,u"), es(&l, "q,u,u"));
    assert_eq!(inv(DirectKind::LowerResidual, &m, "p,p,p"), es(&l, "p,p,p"));
    assert_eq!(inv(DirectKind::UpperCoresidual, &closed(&l, ClosedForm::Join), "u,r,u"), es(&l, "r,r,r"));
    assert_eq!(inv(DirectKind::LowerEta, &closed(&l, ClosedForm::Ex22), "p,r,r"), es(&l, "0,u,t"));

    let u = Arc::new(UnitInterval::default());
    let up = decay_partition(u.clone(), Universe::indexed(8), &equal_blocks(8, 2).unwrap(), 2.0).unwrap();
    let g = closed(&u, ClosedForm::Godel);
    let top = inverse_transform_with(Exec::Sequential, &up, &g, None, DirectKind::UpperTheta, &[1.0, 1.0]).unwrap();
    assert!(top.iter().all(|&x| x == 1.0));
}

#[test]
fn constant_signal_reconstructs_exactly() {
    let u = Arc::new(UnitInterval::default());
    let p = decay_partition(u.clone(), Universe::indexed(16), &equal_blocks(16, 4).unwrap(), 4.0).unwrap();
    let f = vec![0.5; 16];
    let m = closed(&u, ClosedForm::Meet);
    let t = direct_transform(DirectKind::UpperTheta, &p, &m, None, &f).unwrap();
    assert!(t.components.iter().all(|&c| (c - 0.5).abs() < 1e-12));
    let back = inverse_transform_with(Exec::Sequential, &p, &closed(&u, ClosedForm::Godel), None, DirectKind::UpperTheta, &t.components).unwrap();
    assert!(back.iter().all(|&x| (x - 0.5).abs() < 1e-12));
}

#[test]
fn identity_systems_pass() {
    let l = fig1();
    let x = Universe::indexed(3);
    let up = TransformationSystem::identity(l.clone(), x.clone(), SystemKind::Theta, None);
    assert!(validate_upper_system(&up, &closed(&l, ClosedForm::Meet)).unwrap().passed);
    let lo = TransformationSystem::identity(l.clone(), x.clone(), SystemKind::Eta, Some(neg_n(&l)));
    assert!(validate_lower_system(&lo, &closed(&l, ClosedForm::Join)).unwrap().passed);
    assert!(check_system_duality(&up, &lo, &neg_n(&l), &SystemCheck::default()).unwrap().passed);
    let crisp = partition_from_system(&up).unwrap();
    assert_eq!(crisp.members()[0], es(&l, "1,0,0"));
}

#[test]
fn constant_operators_fail_the_singleton_axiom() {
    let l = fig1();
    let x = Universe::indexed(3);
    let top = l.top();
    let up = TransformationSystem::identity(l.clone(), x.clone(), SystemKind::Theta, None)
        .with_operator(Arc::new(FnOperator(move |f: &[Elem]| vec![top; f.len()])));
    let r = validate_upper_system(&up, &closed(&l, ClosedForm::Meet)).unwrap();
    assert!(r.violations.iter().any(|v| v.axiom.starts_with("iii")), "{:?}", r.violations);
    let bot = l.bottom();
    let lo = TransformationSystem::identity(l.clone(), x, SystemKind::Eta, Some(neg_n(&l)))
        .with_operator(Arc::new(FnOperator(move |f: &[Elem]| vec![bot; f.len()])));
    let r = validate_lower_system(&lo, &closed(&l, ClosedForm::Join)).unwrap();
    assert!(r.violations.iter().any(|v| v.axiom.starts_with("iii")), "{:?}", r.violations);
}

#[test]
fn systems_from_the_worked_partition() {
    let l = fig1();
    let p = part(&l);
    let n = neg_n(&l);
    let m = closed(&l, ClosedForm::Meet);
    let j = closed(&l, ClosedForm::Join);
    let up = system_from_partition(&p, DirectKind::UpperTheta, &m, None).unwrap();
    assert!(validate_upper_system(&up, &m).unwrap().passed);
    assert_eq!(partition_from_system(&up).unwrap().members(), p.members());
    let lo = system_from_partition(&p, DirectKind::LowerEta, &j, Some(&n)).unwrap();
    assert!(validate_lower_system(&lo, &j).unwrap().passed);
    assert_eq!(partition_from_system(&lo).unwrap().members(), p.members());
    assert!(check_system_duality(&up, &lo, &n, &SystemCheck::default()).unwrap().passed);

    for f in enumerate_fuzzy_sets(&*l, 3, 1000, 0).sets {
        let t = direct_transform(DirectKind::UpperTheta, &p, &m, None, &f).unwrap();
        assert_eq!(up.apply(&f).unwrap(), t.components);
    }

    let lowered = p.with_value(0, 1, e(&l, "0")).unwrap();
    let other = system_from_partition(&lowered, DirectKind::LowerEta, &j, Some(&n)).unwrap();
    assert!(!check_system_duality(&up, &other, &n, &SystemCheck::default()).unwrap().passed);
}

#[test]
fn law_examples() {
    let l = fig1();
    let ctx = LawContext::derived(closed(&l, ClosedForm::Meet), closed(&l, ClosedForm::Join), None, part(&l), LawOptions::default()).unwrap();
    let r = run_law("P4.1", &ctx).unwrap();
    assert_eq!(r.status, LawStatus::Passed);
    assert_eq!(r.cases, 512);
    assert!(matches!(run_law("P3.1", &ctx).unwrap().status, LawStatus::HypothesisNotMet { .. }));

    let c3 = Arc::new(TableLattice::chain(3));
    let p3 = block_partition(c3.clone(), Universe::indexed(3), &[vec![0], vec![1], vec![2]], c3.bottom()).unwrap();
    let m = closed(&c3, ClosedForm::Meet);
    let ctx = LawContext::new(
        m.clone(),
        closed(&c3, ClosedForm::Join),
        None,
        derive_residual(&m).unwrap(),
        closed(&c3, ClosedForm::Ex22),
        p3,
        LawOptions::default(),
    )
    .unwrap();
    assert!(run_law("L2.1", &ctx).unwrap().failed());
}
