use tanglefloer::chain::{quotient_boundary, Analysis, SignKind, Variant};
use tanglefloer::classify::{validate, ValidationReport};
use tanglefloer::grading::validate_grading;
use tanglefloer::homology::{homology_of, Homology};
use tanglefloer::tgl;
use tanglefloer::tracer::{builtin_map, trace, TraceParams, TraceResult};

fn run(tau: f64, budget: f64) -> TraceResult {
    let m = builtin_map("henon", &[tau, 0.3]).unwrap();
    let mut p = TraceParams::default();
    p.growth.budget = budget;
    trace(m.as_ref(), (0.0, 0.0), &p).unwrap()
}

fn primary_homology(a: &Analysis) -> Homology {
    homology_of(&quotient_boundary(a, Variant::Primary, SignKind::M).unwrap()).unwrap()
}

fn ranks(h: &Homology) -> Vec<(i64, usize)> {
    h.nonzero().iter().map(|(k, g)| (*k, g.free_rank)).collect()
}

#[test]
fn quadratic_family_has_one_branch_pair() {
    let r = run(0.0, 10.0);
    let v = validate(&r.tangle);
    assert!(v.is_ok(), "{:?}", v.errors);
    assert_eq!(ValidationReport::contractible_pairs(&r.tangle).len(), 1);
    let a = Analysis::new(r.tangle).unwrap();
    assert!(validate_grading(&a.tangle, &a.class, &a.grading).is_ok());
    let primary: Vec<i64> = a
        .class
        .by_orbit
        .iter()
        .filter(|(_, c)| c.primary)
        .map(|(o, _)| a.grading.mu[o])
        .collect();
    assert_eq!(primary.len(), 2);
    assert_eq!(ranks(&primary_homology(&a)), vec![(1, 1), (2, 1)]);
}

#[test]
fn cubic_family_has_four_branch_pairs() {
    let r = run(1.0, 10.0);
    assert!(validate(&r.tangle).is_ok());
    assert_eq!(ValidationReport::contractible_pairs(&r.tangle).len(), 4);
    let a = Analysis::new(r.tangle).unwrap();
    assert!(validate_grading(&a.tangle, &a.class, &a.grading).is_ok());
    let h = primary_homology(&a);
    assert!(!h.group(3).is_zero());
    assert_eq!(ranks(&h), vec![(2, 2), (3, 2)]);
}

#[test]
fn homology_does_not_depend_on_the_budget() {
    for tau in [0.0, 1.0] {
        let hs: Vec<_> = [8.0, 15.0]
            .iter()
            .map(|&b| ranks(&primary_homology(&Analysis::new(run(tau, b).tangle).unwrap())))
            .collect();
        assert_eq!(hs[0], hs[1], "τ = {tau}");
    }
}

#[test]
fn short_budget_gives_empty_tangle() {
    let r = run(0.0, 0.5);
    assert!(r.tangle.is_empty());
    assert!(!validate(&r.tangle).csi);
}

#[test]
fn traced_files_round_trip_and_repeat() {
    let a = run(1.0, 8.0);
    let b = run(1.0, 8.0);
    let text = tgl::emit(&a.tangle);
    assert_eq!(text, tgl::emit(&b.tangle));
    assert!(text.contains("polyline u+"));
    assert_eq!(tgl::parse(&text).unwrap(), a.tangle);
}
