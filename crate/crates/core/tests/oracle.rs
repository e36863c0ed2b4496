use widthcalc::exponent::{analyze, build_objective, AffinePiece, Family, FeasibleSet, PieceTag, PiecewiseMax};
use widthcalc::oracle::{
    check_domination, check_scaling_identities, cross_validate, grid_minimize, random_spec, reference_objective, Lcg64,
};
use widthcalc::params::{int, rat};
use widthcalc::ProblemSpec;

fn spec(p: &[(i64, i64)], r: &[(i64, i64)], q: (i64, i64)) -> ProblemSpec {
    let v = |xs: &[(i64, i64)]| xs.iter().map(|&(a, b)| rat(a, b)).collect();
    ProblemSpec::new(v(p), v(r), rat(q.0, q.1)).unwrap()
}

#[test]
fn grid_brackets_the_symmetric_example() {
    let s = spec(&[(3, 1), (3, 1)], &[(1, 1), (1, 1)], (2, 1));
    let g = grid_minimize(&reference_objective(&s), &FeasibleSet::for_spec(&s), 100).unwrap();
    assert!(g.best_value >= rat(1, 2) && g.best_value <= rat(1, 2) + rat(3, 100));
    assert!(g.brackets(&rat(1, 2)));
}

#[test]
fn constant_objective_is_flat_on_the_grid() {
    let piece = AffinePiece { coeffs: vec![int(0); 3], s_coeff: int(0), constant: rat(7, 3), tag: PieceTag::single(Family::H1, 0) };
    let obj = PiecewiseMax { pieces: vec![piece], dim: 3, has_s: false };
    let g = grid_minimize(&obj, &FeasibleSet::simplex(3), 12).unwrap();
    assert_eq!(g.best_value, rat(7, 3));
    assert_eq!(g.gap_bound, int(0));
}

#[test]
fn reference_objective_agrees_with_the_library_at_its_minimum() {
    let mut rng = Lcg64::new(3);
    for k in 0..40 {
        let s = random_spec(&mut rng, k % 2 == 0);
        let lp = analyze(&s).unwrap();
        assert_eq!(reference_objective(&s).eval(&lp.argmin), build_objective(&s).eval(&lp.argmin), "{s}");
    }
}

#[test]
fn identities_at_a_thousand_points() {
    let s = spec(&[(5, 1), (3, 2), (3, 1)], &[(1, 1), (1, 2), (2, 1)], (7, 2));
    let rep = check_scaling_identities(&s, 1000, 42);
    assert!(rep.violations.is_empty(), "{:?}", rep.violations);
    let rep = check_domination(&s, 1000, 42);
    assert!(rep.violations.is_empty());
    assert!(rep.checks > 0);
}

#[test]
fn cross_validation_is_clean_and_reproducible() {
    let a = cross_validate(6, 17);
    assert_eq!(a.violations(), 0, "{a:#?}");
    assert_eq!(a, cross_validate(6, 17));
    assert!(a.strata.iter().all(|s| s.matches == 6));
}
