//! Exact identities between the objectives and the block exponents, checked
//! at seeded random rational points.

use serde::Serialize;

use crate::exponent::{build_objective, build_small_q_objective, PiecewiseMax};
use crate::finitedim::{domination_checks, phi, psi_n};
use crate::params::{int, rat, ProblemSpec, Rational};

use super::crossval::Witness;
use super::display::{reference_objective, reference_small_q};
use super::rng::Lcg64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub spec: String,
    pub points: usize,
    pub checks: usize,
    pub violations: Vec<Witness>,
}

/// `k/Σk · total` with random `k_j` in `0..=64`, not all zero.
fn on_face(rng: &mut Lcg64, d: usize, total: &Rational) -> Vec<Rational> {
    loop {
        let k: Vec<i64> = (0..d).map(|_| rng.range(0, 64)).collect();
        let sum: i64 = k.iter().sum();
        if sum > 0 {
            return k.iter().map(|&x| total * rat(x, sum)).collect();
        }
    }
}

fn positive_vector(rng: &mut Lcg64, d: usize) -> Vec<Rational> {
    (0..d).map(|_| rng.rational(&rat(1, 64), &int(16), 64)).collect()
}

fn eval(obj: &PiecewiseMax, alpha: &[Rational], s: &Rational) -> Rational {
    obj.eval_at(alpha, s)
}

/// At `points` random points:
///
/// * `φ(t) = |t|·h(t/|t|)` and `φ(c·t) = c·φ(t)`;
/// * for `q > 2`, `h̃(α, q/2) = (q/2)·h(2α/q)` on the face `Σα = q/2`;
/// * for `q > 2`, `ψ_n(t, τ) = h̃(t/L, τ/L)·L` with `L = log n`, and at
///   `τ = (q/2)L` also `ψ_n = (q/2)·h(2t/(qL))·L`.
///
/// Each identity is checked against both the exponent module's objectives and
/// the independent reference transcription. Any residual is a violation.
pub fn check_scaling_identities(spec: &ProblemSpec, points: usize, seed: u64) -> IdentityReport {
    let mut rng = Lcg64::new(seed);
    let d = spec.dim();
    let q = spec.q().clone();
    let large = q > int(2);
    let half_q = &q / int(2);
    let h = build_small_q_objective(spec);
    let h_ref = reference_small_q(spec);
    let ht = build_objective(spec);
    let ht_ref = reference_objective(spec);
    let one = int(1);
    let mut checks = 0;
    let mut violations = Vec::new();
    let mut check = |ok: bool, what: &str, at: String| {
        checks += 1;
        if !ok {
            violations.push(Witness { spec: spec.to_string(), detail: format!("{what} fails at {at}") });
        }
    };
    for _ in 0..points {
        let t = positive_vector(&mut rng, d);
        let total: Rational = t.iter().sum();
        let alpha: Vec<Rational> = t.iter().map(|x| x / &total).collect();
        let f = phi(spec, &t).expect("dimensions match");
        for (name, obj) in [("φ = |t|·h", &h), ("φ = |t|·h (reference)", &h_ref)] {
            check(f == &total * eval(obj, &alpha, &one), name, format!("t = {t:?}"));
        }
        let c = rng.rational(&rat(1, 8), &int(8), 64);
        let ct: Vec<Rational> = t.iter().map(|x| x * &c).collect();
        check(phi(spec, &ct).expect("dimensions match") == &f * &c, "φ homogeneity", format!("t = {t:?}, c = {c}"));

        if !large {
            continue;
        }
        let a = on_face(&mut rng, d, &half_q);
        let scaled: Vec<Rational> = a.iter().map(|x| x / &half_q).collect();
        for (name, big, small) in [("h̃(α, q/2) = (q/2)·h(2α/q)", &ht, &h), ("reference h̃(α, q/2) = (q/2)·h(2α/q)", &ht_ref, &h_ref)] {
            check(eval(big, &a, &half_q) == &half_q * eval(small, &scaled, &one), name, format!("α = {a:?}"));
        }

        let log_n = rng.rational(&rat(1, 2), &int(32), 16);
        let tau = rng.rational(&rat(1, 4), &(&half_q * &log_n * int(2)), 16);
        let psi = psi_n(spec, &t, &tau, &log_n).expect("q > 2");
        let t_over: Vec<Rational> = t.iter().map(|x| x / &log_n).collect();
        for (name, obj) in [("ψ_n = h̃(t/L, τ/L)·L", &ht), ("ψ_n = h̃(t/L, τ/L)·L (reference)", &ht_ref)] {
            check(psi == eval(obj, &t_over, &(&tau / &log_n)) * &log_n, name, format!("t = {t:?}, τ = {tau}, L = {log_n}"));
        }
        // on the top face τ = (q/2)L
        let top = &half_q * &log_n;
        let tt = on_face(&mut rng, d, &top);
        let psi_top = psi_n(spec, &tt, &top, &log_n).expect("q > 2");
        let inner: Vec<Rational> = tt.iter().map(|x| x / &top).collect();
        check(
            psi_top == &half_q * eval(&h, &inner, &one) * &log_n,
            "ψ_n at τ = (q/2)L",
            format!("t = {tt:?}, L = {log_n}"),
        );
    }
    IdentityReport { spec: spec.to_string(), points, checks, violations }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominationReport {
    pub spec: String,
    pub blocks: usize,
    pub checks: usize,
    pub violations: Vec<Witness>,
}

/// The `μ` terms are dominated for every pair at `blocks` random integer
/// block vectors `m̄` with entries in `1..=40`. Needs `q > 2`.
pub fn check_domination(spec: &ProblemSpec, blocks: usize, seed: u64) -> DominationReport {
    let mut rng = Lcg64::new(seed);
    let mut checks = 0;
    let mut violations = Vec::new();
    for _ in 0..blocks {
        let m: Vec<Rational> = (0..spec.dim()).map(|_| int(rng.range(1, 40))).collect();
        let Ok(list) = domination_checks(spec, &m) else { break };
        for c in list {
            checks += 1;
            // recompute rather than trust the flag
            if c.lhs > c.rhs || !c.holds {
                violations.push(Witness {
                    spec: spec.to_string(),
                    detail: format!("pair ({}, {}) at m = {m:?}: {} > {}", c.i + 1, c.j + 1, c.lhs, c.rhs),
                });
            }
        }
    }
    DominationReport { spec: spec.to_string(), blocks, checks, violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_for_large_q() {
        let spec = ProblemSpec::new(vec![int(6), rat(3, 2), int(3)], vec![int(1), rat(1, 2), int(2)], int(4)).unwrap();
        let rep = check_scaling_identities(&spec, 100, 42);
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
        assert_eq!(rep.checks, 100 * 8);
    }

    #[test]
    fn identities_hold_for_small_q() {
        let spec = ProblemSpec::new(vec![int(4), rat(4, 3)], vec![int(1), rat(1, 3)], int(2)).unwrap();
        let rep = check_scaling_identities(&spec, 100, 7);
        assert!(rep.violations.is_empty());
        assert_eq!(rep.checks, 300);
    }

    #[test]
    fn domination_sweep() {
        let spec = ProblemSpec::new(vec![int(6), rat(3, 2), int(3)], vec![int(1), rat(1, 2), int(2)], int(4)).unwrap();
        let rep = check_domination(&spec, 200, 3);
        assert!(rep.violations.is_empty());
        assert_eq!(rep.checks, 400);
    }
}
