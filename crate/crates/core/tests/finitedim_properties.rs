use num_traits::ToPrimitive;
use proptest::prelude::*;
use widthcalc::finitedim::{intersection_order, single_ball_order, BallSpec, IntersectionSpec, Magnitude};
use widthcalc::oracle::{random_intersection, Lcg64};
use widthcalc::params::{int, rat, NormIndex};
use widthcalc::Rational;

fn log2_of(factors: &[(u64, Rational)]) -> f64 {
    factors.iter().map(|(b, e)| (*b as f64).log2() * e.to_f64().unwrap()).sum()
}

fn product(factors: &[(u64, Rational)]) -> Magnitude {
    factors.iter().fold(Magnitude::one(), |acc, (b, e)| acc.mul(&Magnitude::power(*b, e.clone())))
}

fn factors() -> impl Strategy<Value = Vec<(u64, Rational)>> {
    prop::collection::vec((2u64..=60, -24i64..=24, 1i64..=6).prop_map(|(b, n, d)| (b, rat(n, d))), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn magnitude_order_matches_logarithms(a in factors(), b in factors()) {
        let (x, y) = (product(&a), product(&b));
        let gap = log2_of(&a) - log2_of(&b);
        if gap > 1e-6 {
            prop_assert!(x > y);
        } else if gap < -1e-6 {
            prop_assert!(x < y);
        }
        prop_assert_eq!(x.mul(&y).div(&y), x.clone());
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.cmp(&y), y.recip().cmp(&x.recip()));
    }

    #[test]
    fn adding_a_ball_never_increases_the_order(seed in any::<u64>(), large in any::<bool>(), pick in 0usize..4) {
        let mut rng = Lcg64::new(seed);
        let Some(spec) = random_intersection(&mut rng, large) else { return Ok(()) };
        let base = intersection_order(&spec).unwrap();
        let extra = spec.balls[pick % spec.balls.len()].clone();
        let extra = BallSpec::new(extra.p, extra.nu.mul(&Magnitude::from_rational(&rat(1, 3)))).unwrap();
        let mut balls = spec.balls.clone();
        balls.push(extra);
        let bigger = IntersectionSpec::new(spec.big_n, spec.n, spec.q.clone(), balls).unwrap();
        prop_assert!(intersection_order(&bigger).unwrap().value <= base.value);
    }

    #[test]
    fn scaling_every_radius_scales_the_order(seed in any::<u64>(), large in any::<bool>(), c in 1i64..=9) {
        let mut rng = Lcg64::new(seed);
        let Some(spec) = random_intersection(&mut rng, large) else { return Ok(()) };
        let c = Magnitude::from_rational(&rat(c, 4));
        let balls = spec.balls.iter().map(|b| BallSpec::new(b.p.clone(), b.nu.mul(&c)).unwrap()).collect();
        let scaled = IntersectionSpec::new(spec.big_n, spec.n, spec.q.clone(), balls).unwrap();
        prop_assert_eq!(intersection_order(&scaled).unwrap().value, intersection_order(&spec).unwrap().value.mul(&c));
    }
}

#[test]
fn single_ball_below_p_is_exact() {
    let ps = [int(1), rat(3, 2), int(2), int(3), int(6)];
    for big_n in [8u64, 30, 97] {
        for n in [0, 1, big_n / 2, big_n - 1] {
            for (i, q) in ps.iter().enumerate() {
                for p in &ps[i..] {
                    let got = single_ball_order(&NormIndex::Finite(p.clone()), &NormIndex::Finite(q.clone()), n, big_n).unwrap();
                    assert!(got.exact);
                    assert_eq!(got.value, Magnitude::power(big_n - n, q.recip() - p.recip()));
                }
            }
        }
    }
}

#[test]
fn intersection_examples() {
    let balls = vec![BallSpec::parse("inf:1/4").unwrap(), BallSpec::parse("1:1").unwrap()];
    let spec = IntersectionSpec::new(16, 4, NormIndex::Finite(int(2)), balls).unwrap();
    let order = intersection_order(&spec).unwrap();
    assert_eq!(order.value, Magnitude::from_rational(&rat(1, 2)));
    assert_eq!(order.branch.label(), "cross-λ(1,2)");
    let cert = order.certificate.unwrap();
    assert!(cert.certificate.all_hold());

    let spec = IntersectionSpec::new(10, 5, NormIndex::Finite(int(1)), vec![BallSpec::parse("2:1").unwrap()]).unwrap();
    assert_eq!(intersection_order(&spec).unwrap().value.to_string(), "5^(1/2)");

    let spec = IntersectionSpec::new(16, 9, NormIndex::Finite(int(2)), vec![BallSpec::parse("1:1").unwrap()]).unwrap();
    assert!(intersection_order(&spec).is_err());
}
