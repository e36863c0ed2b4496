//! Random ball intersections and an independent re-check of every
//! lower-bound certificate the classifier emits.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::finitedim::{
    classify_branch, intersection_order, vk_lower_bound, BallSpec, BranchClassification, CertificateKind,
    IntersectionSpec, Magnitude,
};
use crate::params::{int, rat, NormIndex};

use super::crossval::Witness;
use super::rng::Lcg64;

/// A random intersection of two to four balls in `l_q^N`, `N = 2^a`, with
/// `n` drawn from the admissible range. `None` when that range is empty.
pub fn random_intersection(rng: &mut Lcg64, large_q: bool) -> Option<IntersectionSpec> {
    let a = rng.range(4, 14) as u32;
    let big_n = 1u64 << a;
    let q = if large_q { rng.rational(&rat(9, 4), &int(8), 4) } else { rng.rational(&int(1), &int(2), 4) };
    let lo = if large_q { Magnitude::power(big_n, int(2) / &q).ceil_u64()? } else { 0 };
    let hi = big_n / 2;
    if lo > hi {
        return None;
    }
    let n = lo + rng.below(hi - lo + 1);
    let count = rng.range(2, 4) as usize;
    let mut balls = Vec::with_capacity(count);
    for _ in 0..count {
        let p = if rng.below(8) == 0 {
            NormIndex::Infinite
        } else {
            let mut p = rng.rational(&int(1), &int(12), 4);
            while p == q || p == int(2) {
                p = rng.rational(&int(1), &int(12), 4);
            }
            NormIndex::Finite(p)
        };
        // radii 2^e·c: powers of two keep some ties exact
        let e = rng.rational(&int(-6), &int(6), 6);
        let c = if rng.coin() { int(1) } else { rng.rational(&rat(1, 4), &int(4), 8) };
        let nu = Magnitude::power(2, e).mul(&Magnitude::from_rational(&c));
        balls.push(BallSpec::new(p, nu).ok()?);
    }
    IntersectionSpec::new(big_n, n, NormIndex::Finite(q), balls).ok()
}

fn describe(spec: &IntersectionSpec) -> String {
    let balls: Vec<String> = spec.balls.iter().map(|b| format!("{}:{}", b.p, b.nu)).collect();
    format!("N={} n={} q={} balls={}", spec.big_n, spec.n, spec.q, balls.join(","))
}

/// Problems with `class` as a certificate for `spec`, found without looking
/// at the certificate's own verdicts.
pub fn audit_certificate(spec: &IntersectionSpec, class: &BranchClassification) -> Vec<String> {
    let cert = &class.certificate;
    let mut problems = Vec::new();
    let q = spec.q.as_finite().expect("classified specs have finite q").clone();
    if cert.k == 0 || cert.k > spec.big_n {
        problems.push(format!("k = {} outside [1, N]", cert.k));
        return problems;
    }
    match cert.kind {
        CertificateKind::B1Inclusion if cert.k != 1 => problems.push("B1 inclusion with k != 1".into()),
        CertificateKind::BinfInclusion if cert.k != spec.big_n => problems.push("Binf inclusion with k != N".into()),
        _ => {}
    }
    let factor = if cert.kind == CertificateKind::VkInclusion { 2 } else { 1 };
    // a vertex of scale·V_k has l_p norm scale·k^(1/p)
    for (g, ball) in spec.balls.iter().enumerate() {
        let lhs = cert.scale.mul(&Magnitude::power(cert.k, ball.p.recip()));
        if lhs > ball.nu.mul(&Magnitude::from_u64(factor)) {
            problems.push(format!("scale·V_k leaves {factor}·ball {}", g + 1));
        }
    }
    for c in &cert.checked {
        if !c.recheck() {
            problems.push(format!("recorded inequality fails: {}", c.label));
        }
    }
    match vk_lower_bound(cert.k, spec.big_n, spec.n, &q) {
        Ok(v) if cert.scale.mul(&v) == cert.certified_value => {}
        Ok(_) => problems.push("certified value differs from scale·d_n(V_k)".into()),
        Err(e) => problems.push(format!("V_k bound unavailable: {e}")),
    }
    if cert.lower_bound > cert.certified_value.mul(&Magnitude::from_u64(2)) {
        problems.push("closed-form bound exceeds twice the certified value".into());
    }
    match intersection_order(spec) {
        Ok(order) => {
            let own = class.term();
            match order.terms.iter().find(|t| t.same_source(&own)) {
                Some(t) if t.value == cert.lower_bound => {}
                Some(t) => problems.push(format!("bound {} differs from term {} = {}", cert.lower_bound, t.label(), t.value)),
                None => problems.push(format!("no term {} in the order formula", own.label())),
            }
            if order.value != cert.lower_bound {
                problems.push(format!("bound {} differs from the order {}", cert.lower_bound, order.value));
            }
        }
        Err(e) => problems.push(format!("order formula failed: {e}")),
    }
    problems
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub requested: usize,
    pub classified: usize,
    pub unclassified: usize,
    pub draws: usize,
    pub by_case: BTreeMap<String, usize>,
    pub violations: Vec<Witness>,
}

/// Draws intersections (alternating `q <= 2` and `q > 2`) until `samples` of
/// them fall into an explicit case, auditing each certificate.
pub fn certificate_sweep(samples: usize, seed: u64) -> CertificateReport {
    let mut rng = Lcg64::new(seed);
    let mut rep = CertificateReport {
        requested: samples,
        classified: 0,
        unclassified: 0,
        draws: 0,
        by_case: BTreeMap::new(),
        violations: Vec::new(),
    };
    let max_draws = samples.saturating_mul(100);
    while rep.classified < samples && rep.draws < max_draws {
        let large = rep.draws % 2 == 1;
        rep.draws += 1;
        let Some(spec) = random_intersection(&mut rng, large) else { continue };
        match classify_branch(&spec) {
            Ok(Some(class)) => {
                rep.classified += 1;
                let key = format!("{} q{}2", class.case, if large { ">" } else { "<=" });
                *rep.by_case.entry(key).or_default() += 1;
                for problem in audit_certificate(&spec, &class) {
                    rep.violations.push(Witness { spec: describe(&spec), detail: format!("{}: {problem}", class.label()) });
                }
            }
            Ok(None) => rep.unclassified += 1,
            Err(e) => rep.violations.push(Witness { spec: describe(&spec), detail: format!("classification failed: {e}") }),
        }
    }
    if rep.classified < samples {
        rep.violations.push(Witness {
            spec: String::new(),
            detail: format!("only {} of {samples} draws were classified", rep.classified),
        });
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_is_clean_and_covers_cases() {
        let rep = certificate_sweep(300, 11);
        assert!(rep.violations.is_empty(), "{:#?}", &rep.violations[..rep.violations.len().min(5)]);
        assert_eq!(rep.classified, 300);
        for case in ["octahedron", "cube", "mid-range", "cross-q", "cross-2"] {
            assert!(rep.by_case.keys().any(|k| k.starts_with(case)), "{case} never drawn: {:?}", rep.by_case);
        }
    }
}
