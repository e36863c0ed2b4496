//! Explicit cases for intersections of balls, each with a certificate: a
//! scaled `V_k` body (`V_1 = B_1`, `V_N = B_∞`) that fits inside `2·M_0`,
//! which turns a known lower bound for `d_n(V_k, l_q^N)` into one for `M_0`.

use std::fmt;

use num_traits::One;
use serde::{Serialize, Serializer};

use super::{IntersectionSpec, Magnitude, Term, TermKind};
use crate::error::{Error, Result};
use crate::params::{half, interpolation_weight, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaCase {
    /// The smallest ball has `p < q` (`p < 2` when `q > 2`).
    Octahedron,
    /// A ball with `p > q` dominates after rescaling by `N^(1/p_β - 1/p_α)`.
    Cube,
    /// A ball with `2 < p < q` dominates (`q > 2` only).
    MidRange,
    /// A pair `p_α > q > p_β` balanced through `λ`.
    CrossQ,
    /// A pair `p_α > 2 > p_β` balanced through `λ̃` (`q > 2` only).
    Cross2,
}

impl LemmaCase {
    pub fn label(self) -> &'static str {
        match self {
            LemmaCase::Octahedron => "octahedron",
            LemmaCase::Cube => "cube",
            LemmaCase::MidRange => "mid-range",
            LemmaCase::CrossQ => "cross-q",
            LemmaCase::Cross2 => "cross-2",
        }
    }

    /// The term of the order formula this case singles out.
    pub fn term_kind(self) -> TermKind {
        match self {
            LemmaCase::Octahedron => TermKind::SmallP,
            LemmaCase::Cube => TermKind::LargeP,
            LemmaCase::MidRange => TermKind::MidP,
            LemmaCase::CrossQ => TermKind::CrossQ,
            LemmaCase::Cross2 => TermKind::Cross2,
        }
    }
}

impl fmt::Display for LemmaCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for LemmaCase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    #[serde(rename = "B1-inclusion")]
    B1Inclusion,
    #[serde(rename = "Binf-inclusion")]
    BinfInclusion,
    #[serde(rename = "Vk-inclusion")]
    VkInclusion,
}

/// `lhs <= factor · rhs`, evaluated exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckedInequality {
    pub label: String,
    pub gamma: Option<usize>,
    pub lhs: Magnitude,
    pub rhs: Magnitude,
    pub factor: u32,
    pub holds: bool,
}

impl CheckedInequality {
    fn new(label: impl Into<String>, gamma: Option<usize>, lhs: Magnitude, rhs: Magnitude, factor: u32) -> Self {
        let holds = lhs <= rhs.mul(&Magnitude::from_u64(factor as u64));
        CheckedInequality { label: label.into(), gamma, lhs, rhs, factor, holds }
    }

    /// Re-evaluates the inequality instead of trusting `holds`.
    pub fn recheck(&self) -> bool {
        self.lhs <= self.rhs.mul(&Magnitude::from_u64(self.factor as u64))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerBoundCertificate {
    pub kind: CertificateKind,
    pub k: u64,
    /// The real number that `k` rounds, when the construction uses one.
    pub l: Option<Magnitude>,
    /// The body is `scale · V_k`.
    pub scale: Magnitude,
    pub checked: Vec<CheckedInequality>,
    /// `scale · (lower bound for d_n(V_k, l_q^N))`.
    pub certified_value: Magnitude,
    /// The closed-form lower bound, equal to a term of the order formula.
    pub lower_bound: Magnitude,
    pub expression: String,
}

impl LowerBoundCertificate {
    pub fn all_hold(&self) -> bool {
        self.checked.iter().all(CheckedInequality::recheck)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchClassification {
    pub case: LemmaCase,
    pub alpha: usize,
    pub beta: Option<usize>,
    pub certificate: LowerBoundCertificate,
    /// Later cases whose hypotheses also hold.
    pub overlaps: Vec<String>,
}

impl BranchClassification {
    pub fn label(&self) -> String {
        match self.beta {
            Some(b) => format!("{}({},{})", self.case, self.alpha + 1, b + 1),
            None => format!("{}({})", self.case, self.alpha + 1),
        }
    }

    /// The order-formula term this case certifies.
    pub fn term(&self) -> Term {
        Term::new(self.case.term_kind(), Some(self.alpha), self.beta, self.certificate.lower_bound.clone())
    }
}

/// Lower bound (up to constants) for `d_n(V_k, l_q^N)`: `k^(1/q)` when
/// `q <= 2` or `n <= min{N^(2/q) k^(1-2/q), N/2}`, otherwise
/// `k^(1/2) n^(-1/2) N^(1/q)`.
pub fn vk_lower_bound(k: u64, big_n: u64, n: u64, q: &Rational) -> Result<Magnitude> {
    if k == 0 || k > big_n {
        return Err(Error::Range(format!("k = {k} must lie in [1, N] = [1, {big_n}]")));
    }
    if 2 * n as u128 > big_n as u128 {
        return Err(Error::Range(format!("n = {n} exceeds N/2")));
    }
    if *q < Rational::one() {
        return Err(Error::InvalidParameter(format!("q = {q} must be at least 1")));
    }
    let two = Rational::from_integer(2.into());
    let first = Magnitude::power(k, q.recip());
    if *q <= two {
        return Ok(first);
    }
    let threshold = Magnitude::power(big_n, &two / q).mul(&Magnitude::power(k, Rational::one() - &two / q));
    if Magnitude::from_u64(n) <= threshold {
        return Ok(first);
    }
    Ok(Magnitude::power(k, half()).mul(&Magnitude::power(n, -half())).mul(&Magnitude::power(big_n, q.recip())))
}

struct Ctx<'a> {
    spec: &'a IntersectionSpec,
    q: Rational,
    iq: Rational,
    ip: Vec<Rational>,
    small: bool,
    /// `n^(1/2) N^(-1/q)`, only for `q > 2`
    x: Magnitude,
}

impl Ctx<'_> {
    fn nu(&self, a: usize) -> &Magnitude {
        &self.spec.balls[a].nu
    }

    fn n_pow(&self, e: Rational) -> Magnitude {
        Magnitude::power(self.spec.big_n, e)
    }

    fn x_pow(&self, e: &Rational) -> Magnitude {
        self.x.pow(&(e / (half() - &self.iq)))
    }

    /// `ν_a^(1-w) ν_b^w` with `target = (1-w)/p_a + w/p_b`.
    fn mix(&self, a: usize, b: usize, target: &Rational) -> Magnitude {
        let w = interpolation_weight(target, &self.ip[a], &self.ip[b]).expect("distinct exponents");
        self.nu(a).pow(&(Rational::one() - &w)).mul(&self.nu(b).pow(&w))
    }

    fn balls(&self) -> std::ops::Range<usize> {
        0..self.spec.balls.len()
    }

    /// Hypotheses of `case` with the given indices.
    fn holds(&self, case: LemmaCase, a: usize, b: Option<usize>) -> bool {
        let ih = half();
        let ip = &self.ip;
        match case {
            LemmaCase::Octahedron => {
                let bound = if self.small { &self.iq } else { &ih };
                ip[a] > *bound && self.balls().all(|g| self.nu(a) <= self.nu(g))
            }
            LemmaCase::Cube => {
                ip[a] < self.iq && self.balls().all(|g| self.nu(a).mul(&self.n_pow(&ip[g] - &ip[a])) <= *self.nu(g))
            }
            LemmaCase::MidRange => {
                !self.small
                    && ip[a] > self.iq
                    && ip[a] < ih
                    && self.balls().all(|g| self.nu(a).mul(&self.x_pow(&(&ip[g] - &ip[a]))) <= *self.nu(g))
            }
            LemmaCase::CrossQ => {
                let b = b.expect("pair");
                if !(ip[a] < self.iq && ip[b] > self.iq) || !self.balanced(a, b, &self.iq) {
                    return false;
                }
                let (na, nb) = (self.nu(a), self.nu(b));
                let lower = nb.mul(&self.n_pow(&ip[a] - &ip[b])) <= *na;
                let upper = if self.small { na <= nb } else { *na <= nb.mul(&self.x_pow(&(&ip[a] - &ip[b]))) };
                lower && upper
            }
            LemmaCase::Cross2 => {
                let b = b.expect("pair");
                if self.small || !(ip[a] < ih && ip[b] > ih) || !self.balanced(a, b, &ih) {
                    return false;
                }
                let (na, nb) = (self.nu(a), self.nu(b));
                na <= nb && nb.mul(&self.x_pow(&(&ip[a] - &ip[b]))) <= *na
            }
        }
    }

    /// The pair `(a, b)` is the best among pairs sharing one of its members.
    fn balanced(&self, a: usize, b: usize, target: &Rational) -> bool {
        let v = self.mix(a, b, target);
        self.balls().all(|g| {
            let ok_low = self.ip[g] <= *target || v <= self.mix(a, g, target);
            let ok_high = self.ip[g] >= *target || v <= self.mix(g, b, target);
            ok_low && ok_high
        })
    }

    fn certificate(&self, case: LemmaCase, a: usize, b: Option<usize>) -> Result<LowerBoundCertificate> {
        let spec = self.spec;
        let big_n = spec.big_n;
        let ih = half();
        let g = if self.small { Magnitude::one() } else { spec.gluskin_factor(&self.q) };
        // scale, k, l, factor, closed-form bound, kind, expression
        let (scale, k, l, factor, bound, kind, expr) = match case {
            LemmaCase::Octahedron => {
                let bound = self.nu(a).mul(&g);
                let expr = if self.small { format!("ν_{}", a + 1) } else { format!("ν_{}·n^(-1/2)·N^(1/q)", a + 1) };
                (self.nu(a).clone(), 1, None, 1, bound, CertificateKind::B1Inclusion, expr)
            }
            LemmaCase::Cube => {
                let scale = self.nu(a).mul(&self.n_pow(-self.ip[a].clone()));
                let bound = self.nu(a).mul(&self.n_pow(&self.iq - &self.ip[a]));
                (scale, big_n, None, 1, bound, CertificateKind::BinfInclusion, format!("ν_{}·N^(1/q-1/p_{})", a + 1, a + 1))
            }
            LemmaCase::MidRange => {
                let l = self.x.pow(&(ih.clone() - &self.iq).recip());
                let k = l.ceil_u64().ok_or_else(|| Error::Range("k does not fit".into()))?;
                let scale = self.nu(a).mul(&Magnitude::power(k, -self.ip[a].clone()));
                let w = (&self.ip[a] - &self.iq) / (&ih - &self.iq);
                let bound = self.nu(a).mul(&g.pow(&w));
                let expr = format!("ν_{}·(n^(-1/2)·N^(1/q))^((1/p_{}-1/q)/(1/2-1/q))", a + 1, a + 1);
                (scale, k, Some(l), 2, bound, CertificateKind::VkInclusion, expr)
            }
            LemmaCase::CrossQ | LemmaCase::Cross2 => {
                let b = b.expect("pair");
                let target = if case == LemmaCase::CrossQ { self.iq.clone() } else { ih.clone() };
                // ν_a / ν_b = l^(1/p_a - 1/p_b)
                let l = self.nu(a).div(self.nu(b)).pow(&(&self.ip[a] - &self.ip[b]).recip());
                let k = if case == LemmaCase::CrossQ { l.ceil_u64() } else { l.floor_u64() }
                    .ok_or_else(|| Error::Range("k does not fit".into()))?;
                let mixed = self.mix(a, b, &target);
                let scale = mixed.mul(&Magnitude::power(k, -target.clone()));
                let (bound, expr) = if case == LemmaCase::CrossQ {
                    (mixed, format!("ν_{a1}^(1-λ)·ν_{b1}^λ", a1 = a + 1, b1 = b + 1))
                } else {
                    (mixed.mul(&g), format!("ν_{a1}^(1-λ̃)·ν_{b1}^λ̃·n^(-1/2)·N^(1/q)", a1 = a + 1, b1 = b + 1))
                };
                (scale, k, Some(l), 2, bound, CertificateKind::VkInclusion, expr)
            }
        };
        let mut checked = vec![
            CheckedInequality::new("1 <= k", None, Magnitude::one(), Magnitude::from_u64(k), 1),
            CheckedInequality::new("k <= N", None, Magnitude::from_u64(k), Magnitude::from_u64(big_n), 1),
        ];
        // vertices of V_k have l_p norm k^(1/p)
        for gamma in self.balls() {
            checked.push(CheckedInequality::new(
                format!("scale·k^(1/p_{0}) <= {factor}·ν_{0}", gamma + 1),
                Some(gamma),
                scale.mul(&Magnitude::power(k, self.ip[gamma].clone())),
                self.nu(gamma).clone(),
                factor,
            ));
        }
        if !self.small && kind == CertificateKind::VkInclusion {
            let two = Rational::from_integer(2.into());
            let threshold = Magnitude::power(big_n, &two / &self.q).mul(&Magnitude::power(k, Rational::one() - &two / &self.q));
            let n = Magnitude::from_u64(spec.n);
            if case == LemmaCase::Cross2 {
                checked.push(CheckedInequality::new("N^(2/q)·k^(1-2/q) <= n", None, threshold, n, 1));
            } else {
                checked.push(CheckedInequality::new("n <= N^(2/q)·k^(1-2/q)", None, n, threshold, 1));
            }
        }
        let certified_value = scale.mul(&vk_lower_bound(k, big_n, spec.n, &self.q)?);
        // rounding l to k costs at most a factor of 2
        checked.push(CheckedInequality::new("bound <= 2·certified", None, bound.clone(), certified_value.clone(), 2));
        Ok(LowerBoundCertificate { kind, k, l, scale, checked, certified_value, lower_bound: bound, expression: expr })
    }
}

/// Finds the first explicit case (in the order octahedron, cube, mid-range,
/// cross-q, cross-2; balls in input order) whose hypotheses hold and builds
/// its certificate. `Ok(None)` means no case applies: the cases are
/// sufficient conditions and do not cover every configuration.
///
/// Requires `p_α != q` for every ball when `q <= 2`, and `p_α ∉ {2, q}`
/// with `N^(2/q) <= n` when `q > 2`; always `n <= N/2`.
pub fn classify_branch(spec: &IntersectionSpec) -> Result<Option<BranchClassification>> {
    let q = spec.finite_q()?.clone();
    spec.check_half()?;
    let two = Rational::from_integer(2.into());
    let small = q <= two;
    let iq = q.recip();
    let ip: Vec<Rational> = spec.balls.iter().map(|b| b.p.recip()).collect();
    if ip.iter().any(|x| *x == iq) {
        return Err(Error::Domain("the explicit cases need p_α != q for every ball".into()));
    }
    let x = if small {
        Magnitude::one()
    } else {
        if ip.iter().any(|x| *x == half()) {
            return Err(Error::Domain("the explicit cases for q > 2 need p_α != 2 for every ball".into()));
        }
        spec.check_lower(&q)?;
        Magnitude::power(spec.n, half()).mul(&Magnitude::power(spec.big_n, -iq.clone()))
    };
    let ctx = Ctx { spec, q, iq, ip, small, x };
    let cases = [LemmaCase::Octahedron, LemmaCase::Cube, LemmaCase::MidRange, LemmaCase::CrossQ, LemmaCase::Cross2];
    let mut hits: Vec<(LemmaCase, usize, Option<usize>)> = Vec::new();
    for case in cases {
        let pairs = matches!(case, LemmaCase::CrossQ | LemmaCase::Cross2);
        for a in ctx.balls() {
            if pairs {
                for b in ctx.balls().filter(|&b| b != a) {
                    if ctx.holds(case, a, Some(b)) {
                        hits.push((case, a, Some(b)));
                    }
                }
            } else if ctx.holds(case, a, None) {
                hits.push((case, a, None));
            }
        }
    }
    let Some(&(case, alpha, beta)) = hits.first() else { return Ok(None) };
    let overlaps: Vec<String> = hits[1..]
        .iter()
        .map(|(c, a, b)| match b {
            Some(b) => format!("{c}({},{})", a + 1, b + 1),
            None => format!("{c}({})", a + 1),
        })
        .collect();
    if !overlaps.is_empty() {
        log::debug!("several explicit cases apply; using {case}, also {}", overlaps.join(", "));
    }
    let certificate = ctx.certificate(case, alpha, beta)?;
    Ok(Some(BranchClassification { case, alpha, beta, certificate, overlaps }))
}

/// The certificate's bound against the order formula, for tests and the
/// verification report: `(matches its own term, equals the minimum)`.
#[cfg(test)]
pub(crate) fn compare_with_formula(spec: &IntersectionSpec, class: &BranchClassification) -> Result<(bool, bool)> {
    let order = super::intersection_order(spec)?;
    let own = class.term();
    let term_ok = order.terms.iter().any(|t| t.same_source(&own) && t.value == own.value);
    Ok((term_ok, order.value == class.certificate.lower_bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finitedim::BallSpec;
    use crate::params::{int, rat, NormIndex};

    fn ball(p: &str, nu: Magnitude) -> BallSpec {
        BallSpec::new(p.parse().unwrap(), nu).unwrap()
    }

    #[test]
    fn vk_bound_examples() {
        assert_eq!(vk_lower_bound(1, 16, 4, &int(2)).unwrap(), Magnitude::one());
        assert_eq!(vk_lower_bound(16, 256, 8, &int(4)).unwrap(), Magnitude::from_u64(2));
        assert_eq!(vk_lower_bound(4, 256, 128, &int(4)).unwrap(), Magnitude::power(2, rat(-1, 2)));
        assert!(vk_lower_bound(0, 16, 4, &int(2)).is_err());
        assert!(vk_lower_bound(4, 16, 9, &int(2)).is_err());
    }

    #[test]
    fn boundary_of_cube_and_cross() {
        // ν_a = ν_b · 16^(1/4 - 3/4): the cube and cross cases meet
        let nb = Magnitude::one();
        let na = nb.mul(&Magnitude::power(16, rat(-1, 2)));
        let spec = IntersectionSpec::new(16, 4, NormIndex::Finite(int(2)), vec![ball("4", na), ball("4/3", nb)]).unwrap();
        let c = classify_branch(&spec).unwrap().unwrap();
        assert_eq!(c.case, LemmaCase::Cube);
        assert_eq!(c.overlaps, vec!["cross-q(1,2)".to_string()]);
        assert!(c.certificate.all_hold());
        assert_eq!(compare_with_formula(&spec, &c).unwrap(), (true, true));
    }

    #[test]
    fn cross_case_interior() {
        // ν_a / ν_b = 1/2 = l^(1/4 - 3/4), so l = 4
        let nb = Magnitude::one();
        let na = Magnitude::power(16, rat(-1, 4));
        let spec = IntersectionSpec::new(16, 4, NormIndex::Finite(int(2)), vec![ball("4", na), ball("4/3", nb)]).unwrap();
        let c = classify_branch(&spec).unwrap().unwrap();
        assert_eq!(c.case, LemmaCase::CrossQ);
        assert_eq!(c.certificate.k, 4);
        assert_eq!(c.certificate.kind, CertificateKind::VkInclusion);
        assert!(c.certificate.all_hold());
        assert_eq!(compare_with_formula(&spec, &c).unwrap(), (true, true));
    }

    #[test]
    fn octahedron_when_small_ball_is_smallest() {
        let spec = IntersectionSpec::new(
            32,
            8,
            NormIndex::Finite(int(2)),
            vec![ball("3/2", Magnitude::from_rational(&rat(1, 3))), ball("5", Magnitude::one())],
        )
        .unwrap();
        let c = classify_branch(&spec).unwrap().unwrap();
        assert_eq!(c.case, LemmaCase::Octahedron);
        assert_eq!(c.certificate.kind, CertificateKind::B1Inclusion);
        assert_eq!(compare_with_formula(&spec, &c).unwrap(), (true, true));
    }

    #[test]
    fn mid_range_for_large_q() {
        // N^(2/q) = 16 = n
        let spec = IntersectionSpec::new(
            256,
            16,
            NormIndex::Finite(int(4)),
            vec![ball("8", Magnitude::one()), ball("3", Magnitude::from_rational(&rat(1, 4)))],
        )
        .unwrap();
        let c = classify_branch(&spec).unwrap().unwrap();
        assert_eq!(c.case, LemmaCase::MidRange);
        assert_eq!(c.alpha, 1);
        assert!(c.certificate.all_hold());
        let w = (rat(1, 3) - rat(1, 4)) / (rat(1, 2) - rat(1, 4));
        let expect = Magnitude::from_rational(&rat(1, 4)).mul(&Magnitude::power(16, rat(-1, 2)).mul(&Magnitude::power(256, rat(1, 4))).pow(&w));
        assert_eq!(c.certificate.lower_bound, expect);
        assert_eq!(compare_with_formula(&spec, &c).unwrap(), (true, true));
    }

    #[test]
    fn hypotheses_are_enforced() {
        let spec = IntersectionSpec::new(16, 4, NormIndex::Finite(int(2)), vec![ball("2", Magnitude::one()), ball("3", Magnitude::one())]).unwrap();
        assert!(classify_branch(&spec).is_err());
        let zero_n = IntersectionSpec::new(16, 0, NormIndex::Finite(int(2)), vec![ball("3/2", Magnitude::one())]).unwrap();
        assert!(classify_branch(&zero_n).unwrap().is_some());
    }
}
