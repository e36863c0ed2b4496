use proptest::prelude::*;
use widthcalc::closedform::{check_compact, check_dop_usl, check_noncompact_t3};
use widthcalc::exponent::{analyze, build_objective, candidate_vertices, classify_region, region_systems, Compactness, FeasibleSet, Point};
use widthcalc::params::{int, rat};
use widthcalc::{ProblemSpec, Rational};

fn ratio(lo: i64, hi: i64, den: i64) -> impl Strategy<Value = Rational> {
    (lo * den..=hi * den).prop_map(move |k| rat(k, den))
}

/// `p` in `(1, 8]`, `r` in `[1/4, 4]`, dimension 2 or 3.
fn spec_with_q(q: impl Strategy<Value = Rational>) -> impl Strategy<Value = ProblemSpec> {
    (2usize..=3, q).prop_flat_map(|(d, q)| {
        (
            prop::collection::vec(ratio(1, 8, 8).prop_filter("p > 1", |p| *p > int(1)), d),
            prop::collection::vec(ratio(1, 16, 4).prop_map(|x| x / int(4)), d),
            Just(q),
        )
            .prop_map(|(p, r, q)| ProblemSpec::new(p, r, q).unwrap())
    })
}

fn any_spec() -> impl Strategy<Value = ProblemSpec> {
    spec_with_q(ratio(1, 8, 8).prop_filter("q > 1", |q| *q > int(1)))
}

fn large_q_generic() -> impl Strategy<Value = ProblemSpec> {
    spec_with_q(ratio(2, 8, 8).prop_filter("q > 2", |q| *q > int(2)))
        .prop_filter("p away from 2 and q", |s| s.p().iter().all(|p| *p != int(2) && p != s.q()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn permuting_coordinates_permutes_the_minimiser(spec in any_spec(), rot in 0usize..3) {
        let d = spec.dim();
        let perm: Vec<usize> = (0..d).map(|j| (j + rot) % d).collect();
        let a = analyze(&spec).unwrap();
        let b = analyze(&spec.permuted(&perm).unwrap()).unwrap();
        prop_assert_eq!(&a.theta, &b.theta);
        prop_assert_eq!(a.unique, b.unique);
        if a.unique {
            let moved: Vec<Rational> = perm.iter().map(|&k| a.argmin.alpha[k].clone()).collect();
            prop_assert_eq!(moved, b.argmin.alpha);
            prop_assert_eq!(a.argmin.s, b.argmin.s);
        }
    }

    #[test]
    fn sign_of_the_minimum_decides_compactness(spec in any_spec()) {
        let lp = analyze(&spec).unwrap();
        prop_assert_eq!(lp.compact, Compactness::of_theta(&lp.theta));
        // the converse fails: a negative margin can still leave a positive minimum
        if check_compact(&spec) && check_noncompact_t3(&spec) != Some(true) {
            prop_assert!(lp.theta > int(0));
        }
    }

    #[test]
    fn minimum_is_at_a_candidate_vertex(spec in large_q_generic()) {
        prop_assume!(check_dop_usl(&spec));
        let obj = build_objective(&spec);
        let best = candidate_vertices(&spec).unwrap()[..3].iter().map(|v| obj.eval(v)).min().unwrap();
        prop_assert_eq!(analyze(&spec).unwrap().theta, best);
    }

    #[test]
    fn region_systems_pick_the_attaining_pieces(spec in large_q_generic(), k in prop::collection::vec(0i64..=12, 3), t in 0i64..=8) {
        let d = spec.dim();
        let k = &k[..d];
        prop_assume!(k.iter().any(|&x| x > 0));
        let top = spec.q() / int(2);
        let s = int(1) + (&top - int(1)) * rat(t, 8);
        let total: i64 = k.iter().sum();
        let point = Point::new(k.iter().map(|&x| &s * rat(x, total)).collect(), s);
        prop_assert!(FeasibleSet::for_spec(&spec).contains(&point));
        let obj = build_objective(&spec);
        let mut got = region_systems(&spec, &point).unwrap();
        let mut want = obj.active(&point);
        got.sort();
        want.sort();
        prop_assert_eq!(&got, &want);
        let tag = classify_region(&spec, &point).unwrap();
        let piece = obj.pieces.iter().find(|p| p.tag == tag).unwrap();
        prop_assert_eq!(piece.eval(&point.alpha, &point.s), obj.eval(&point));
    }
}

#[test]
fn worked_values() {
    let cases = [
        (vec![int(3), int(3)], vec![int(1), int(1)], int(2), rat(1, 2)),
        (vec![rat(3, 2), rat(3, 2)], vec![int(1), int(1)], int(2), rat(1, 3)),
        (vec![int(3), int(3)], vec![int(1), int(1)], int(4), rat(1, 2)),
        (vec![int(8), rat(8, 5)], vec![int(1), rat(1, 4)], int(2), rat(3, 16)),
    ];
    for (p, r, q, theta) in cases {
        let res = analyze(&ProblemSpec::new(p, r, q).unwrap()).unwrap();
        assert_eq!(res.theta, theta);
        assert!(res.unique);
    }
}
