//! Random parameter draws aimed at each explicit-formula regime.

use crate::closedform::{classify, RegimeCase};
use crate::params::{int, rat, ProblemSpec, Rational};

use super::rng::Lcg64;

const DEN: i64 = 8;

fn draw(rng: &mut Lcg64, lo: Rational, hi: Rational) -> Rational {
    rng.rational(&lo, &hi, DEN)
}

fn smoothness(rng: &mut Lcg64, d: usize) -> Vec<Rational> {
    (0..d).map(|_| draw(rng, rat(1, 4), int(4))).collect()
}

/// One draw shaped for `case`. The result is only a candidate: callers keep
/// it when [`classify`] agrees.
pub fn propose(case: RegimeCase, rng: &mut Lcg64) -> Option<ProblemSpec> {
    let two = int(2);
    let small_d = |rng: &mut Lcg64| if rng.coin() { 2 } else { 3 };
    let (mut p, mut r, q): (Vec<Rational>, Vec<Rational>, Rational) = match case {
        RegimeCase::T1_1 => {
            let q = draw(rng, rat(9, 8), int(4));
            let d = if q <= two { small_d(rng) } else { 2 };
            let p = (0..d).map(|_| draw(rng, q.clone(), &q + int(6))).collect();
            (p, smoothness(rng, d), q)
        }
        RegimeCase::T1_2a | RegimeCase::T1_2b => {
            let q = draw(rng, rat(9, 8), two.clone());
            let d = small_d(rng);
            let mut p: Vec<Rational> = (0..d).map(|_| draw(rng, rat(9, 8), q.clone())).collect();
            if case == RegimeCase::T1_2b {
                let k = rng.below(d as u64) as usize;
                p[k] = draw(rng, &q + rat(1, 8), &q + int(6));
            }
            (p, smoothness(rng, d), q)
        }
        RegimeCase::T1_3a | RegimeCase::T1_3b | RegimeCase::T1_3c => {
            let q = draw(rng, rat(17, 8), int(8));
            let below2 = |rng: &mut Lcg64| draw(rng, rat(9, 8), two.clone());
            let above2 = |rng: &mut Lcg64, q: &Rational| draw(rng, two.clone(), q + int(4));
            let p = match case {
                RegimeCase::T1_3a => vec![below2(rng), below2(rng)],
                RegimeCase::T1_3b => vec![above2(rng, &q), draw(rng, two.clone(), q.clone())],
                _ => vec![below2(rng), draw(rng, rat(17, 8), &q + int(4))],
            };
            (p, smoothness(rng, 2), q)
        }
        RegimeCase::T4_1 | RegimeCase::T4_2a | RegimeCase::T4_2b => {
            let q = match case {
                RegimeCase::T4_1 => draw(rng, rat(9, 8), two.clone()),
                _ => draw(rng, rat(17, 8), int(8)),
            };
            let p1 = draw(rng, &q + rat(1, 8), &q + int(6));
            let p2 = match case {
                RegimeCase::T4_2a => draw(rng, two.clone(), q.clone()),
                RegimeCase::T4_2b => draw(rng, rat(9, 8), two.clone()),
                _ => draw(rng, rat(9, 8), q.clone()),
            };
            let spread = p2.recip() - p1.recip();
            if spread <= int(0) {
                return None;
            }
            let r2 = rng.rational(&rat(1, 64), &spread, 64);
            let r1 = draw(rng, rat(1, 4), int(4));
            (vec![p1, p2], vec![r1, r2], q)
        }
        _ => return None,
    };
    // random coordinate order, to exercise permutation handling
    let mut perm: Vec<usize> = (0..p.len()).collect();
    rng.shuffle(&mut perm);
    p = perm.iter().map(|&k| p[k].clone()).collect();
    r = perm.iter().map(|&k| r[k].clone()).collect();
    ProblemSpec::new(p, r, q).ok()
}

/// Draw until a spec lands in `case`. Gives up after `max_attempts` draws.
/// Returns the sampled parameters and the number of draws used.
pub fn sample_case(case: RegimeCase, rng: &mut Lcg64, max_attempts: usize) -> (Option<ProblemSpec>, usize) {
    for attempt in 1..=max_attempts {
        if let Some(spec) = propose(case, rng) {
            if classify(&spec).theorem_case == case {
                return (Some(spec), attempt);
            }
        }
    }
    (None, max_attempts)
}

/// Specs with every `p_k <= q` for which some sum `Σ_i (1/r_i)(1/p_i - 1/p_j)` reaches 1.
pub fn sample_noncompact(rng: &mut Lcg64, max_attempts: usize) -> Option<ProblemSpec> {
    for _ in 0..max_attempts {
        let q = draw(rng, rat(9, 8), int(6));
        let d = rng.range(2, 3) as usize;
        let p: Vec<Rational> = (0..d).map(|_| draw(rng, rat(9, 8), q.clone())).collect();
        let r: Vec<Rational> = (0..d).map(|_| rng.rational(&rat(1, 16), &int(2), 16)).collect();
        if let Ok(spec) = ProblemSpec::new(p, r, q) {
            if crate::closedform::check_noncompact_t3(&spec) == Some(true) {
                return Some(spec);
            }
        }
    }
    None
}

/// An unconstrained spec: `d` in `2..=4`, `p` in `(1, 8]`, `r` in `[1/4, 4]`,
/// and `q` above 2 when `large_q` is set, in `(1, 2]` otherwise.
pub fn random_spec(rng: &mut Lcg64, large_q: bool) -> ProblemSpec {
    loop {
        let d = rng.range(2, 4) as usize;
        let q = if large_q { draw(rng, rat(17, 8), int(8)) } else { draw(rng, rat(9, 8), int(2)) };
        let p: Vec<Rational> = (0..d).map(|_| draw(rng, rat(9, 8), int(8))).collect();
        if let Ok(spec) = ProblemSpec::new(p, smoothness(rng, d), q) {
            return spec;
        }
    }
}
