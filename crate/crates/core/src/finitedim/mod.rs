//! Kolmogorov widths of finite-dimensional balls and of their intersections,
//! up to constants, together with lower-bound certificates and the
//! discretised exponent functions used for dyadic blocks.

mod discrete;
mod lemmas;
mod magnitude;

use std::fmt;

use num_traits::{One, Signed};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::{half, interpolation_weight, NormIndex, ProblemSpec, Rational};

pub use discrete::{domination_checks, phi, psi_n, DominationCheck};
pub use lemmas::{
    classify_branch, vk_lower_bound, BranchClassification, CertificateKind, CheckedInequality, LemmaCase,
    LowerBoundCertificate,
};
pub use magnitude::Magnitude;

/// The ball `ν·B_p^N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallSpec {
    #[serde(serialize_with = "ser_display")]
    pub p: NormIndex,
    pub nu: Magnitude,
}

impl BallSpec {
    pub fn new(p: NormIndex, nu: Magnitude) -> Result<Self> {
        if let NormIndex::Finite(p) = &p {
            if *p < Rational::one() {
                return Err(Error::InvalidParameter(format!("ball exponent p = {p} must be at least 1")));
            }
        }
        if nu.is_zero() {
            return Err(Error::InvalidParameter("ball radius must be positive".into()));
        }
        Ok(BallSpec { p, nu })
    }

    /// Parses `p:nu`, for example `inf:1/4` or `4/3:2`.
    pub fn parse(s: &str) -> Result<Self> {
        let (p, nu) = s.split_once(':').ok_or_else(|| Error::Parse {
            input: s.to_string(),
            reason: "expected p:nu".into(),
        })?;
        let p: NormIndex = p.parse()?;
        let nu = crate::params::parse_rational(nu)?;
        if !nu.is_positive() {
            return Err(Error::InvalidParameter(format!("ball radius {nu} must be positive")));
        }
        Self::new(p, Magnitude::from_rational(&nu))
    }
}

fn ser_display<T: fmt::Display, S: Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

/// `M_0 = ∩ ν_α B_{p_α}^N` measured in `l_q^N`, with width budget `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionSpec {
    pub big_n: u64,
    pub n: u64,
    #[serde(serialize_with = "ser_display")]
    pub q: NormIndex,
    pub balls: Vec<BallSpec>,
}

impl IntersectionSpec {
    pub fn new(big_n: u64, n: u64, q: NormIndex, balls: Vec<BallSpec>) -> Result<Self> {
        if big_n == 0 {
            return Err(Error::InvalidParameter("dimension N must be positive".into()));
        }
        if n > big_n {
            return Err(Error::Range(format!("n = {n} exceeds N = {big_n}")));
        }
        if let NormIndex::Finite(q) = &q {
            if *q < Rational::one() {
                return Err(Error::InvalidParameter(format!("q = {q} must be at least 1")));
            }
        }
        if balls.is_empty() {
            return Err(Error::InvalidParameter("at least one ball is required".into()));
        }
        Ok(IntersectionSpec { big_n, n, q, balls })
    }

    pub(crate) fn finite_q(&self) -> Result<&Rational> {
        self.q.as_finite().ok_or_else(|| Error::Domain("q = inf is only meaningful for a single ball".into()))
    }

    /// `n <= N/2`.
    pub(crate) fn check_half(&self) -> Result<()> {
        if 2 * self.n as u128 > self.big_n as u128 {
            return Err(Error::Range(format!(
                "n = {} exceeds N/2 = {}/2; the order formulas hold only for n <= N/2",
                self.n, self.big_n
            )));
        }
        Ok(())
    }

    /// `N^(2/q) <= n`, needed for `q > 2`.
    pub(crate) fn check_lower(&self, q: &Rational) -> Result<()> {
        let floor = Magnitude::power(self.big_n, Rational::from_integer(2.into()) / q);
        if Magnitude::from_u64(self.n) < floor {
            return Err(Error::Range(format!(
                "n = {} is below N^(2/q) = {}^(2/{q}); the order formula for q > 2 needs N^(2/q) <= n",
                self.n, self.big_n
            )));
        }
        Ok(())
    }

    /// `n^(-1/2) N^(1/q)`.
    pub(crate) fn gluskin_factor(&self, q: &Rational) -> Magnitude {
        Magnitude::power(self.n, -half()).mul(&Magnitude::power(self.big_n, q.recip()))
    }
}

/// Which formula a term comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermKind {
    /// `(N - n)^(1/q - 1/p)` for `q <= p`, an exact value.
    Exact,
    /// The width is of order 1.
    Constant,
    /// `(n^(-1/2) N^(1/q))^ω` for a single ball with `p < q`, `q > 2`.
    Gluskin,
    /// `ν N^(1/q - 1/p)`, from balls with `p >= q`.
    LargeP,
    /// `ν (n^(-1/2) N^(1/q))^((1/p - 1/q)/(1/2 - 1/q))`, from `2 <= p <= q`.
    MidP,
    /// `ν` when `q <= 2`, `ν n^(-1/2) N^(1/q)` when `q > 2`.
    SmallP,
    /// `ν_α^(1-λ) ν_β^λ` for `p_α > q > p_β`.
    CrossQ,
    /// `ν_α^(1-λ̃) ν_β^λ̃ n^(-1/2) N^(1/q)` for `p_α > 2 > p_β`.
    Cross2,
}

impl TermKind {
    pub fn label(self) -> &'static str {
        match self {
            TermKind::Exact => "exact",
            TermKind::Constant => "constant",
            TermKind::Gluskin => "gluskin",
            TermKind::LargeP => "large-p",
            TermKind::MidP => "mid-p",
            TermKind::SmallP => "small-p",
            TermKind::CrossQ => "cross-λ",
            TermKind::Cross2 => "cross-λ̃",
        }
    }
}

/// One candidate in the minimum. Ball indices are 0-based, shown 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub kind: TermKind,
    pub alpha: Option<usize>,
    pub beta: Option<usize>,
    pub value: Magnitude,
}

impl Term {
    fn new(kind: TermKind, alpha: Option<usize>, beta: Option<usize>, value: Magnitude) -> Self {
        Term { kind, alpha, beta, value }
    }

    pub fn label(&self) -> String {
        match (self.alpha, self.beta) {
            (Some(a), Some(b)) => format!("{}({},{})", self.kind.label(), a + 1, b + 1),
            (Some(a), None) => format!("{}({})", self.kind.label(), a + 1),
            _ => self.kind.label().to_string(),
        }
    }

    pub fn same_source(&self, other: &Term) -> bool {
        self.kind == other.kind && self.alpha == other.alpha && self.beta == other.beta
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Term", 2)?;
        st.serialize_field("label", &self.label())?;
        st.serialize_field("value", &self.value)?;
        st.end()
    }
}

/// A width up to constants: the smallest term, every term evaluated, and a
/// lower-bound certificate when one of the explicit cases applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WidthOrder {
    pub value: Magnitude,
    pub branch: Term,
    /// True when `value` is the width itself, not only its order.
    pub exact: bool,
    pub terms: Vec<Term>,
    pub certificate: Option<BranchClassification>,
}

impl WidthOrder {
    fn from_terms(terms: Vec<Term>, exact: bool) -> Self {
        // first minimum wins, so ties resolve in formula order
        let mut best = 0;
        for (i, t) in terms.iter().enumerate() {
            if t.value < terms[best].value {
                best = i;
            }
        }
        WidthOrder { value: terms[best].value.clone(), branch: terms[best].clone(), exact, terms, certificate: None }
    }

    fn scaled(mut self, nu: &Magnitude, alpha: usize) -> Self {
        self.value = self.value.mul(nu);
        for t in self.terms.iter_mut().chain(std::iter::once(&mut self.branch)) {
            t.value = t.value.mul(nu);
            t.alpha = Some(alpha);
        }
        self
    }
}

/// Order of `d_n(B_p^N, l_q^N)`.
///
/// For `q <= p` this is the exact value `(N - n)^(1/q - 1/p)` (zero at `n = N`).
/// For `p < q` it is `1` when `q <= 2` and `min{1, n^(-1/2) N^(1/q)}^ω` with
/// `ω = min{1, (1/p - 1/q)/(1/2 - 1/q)}` when `q > 2`; those need `n <= N/2`.
pub fn single_ball_order(p: &NormIndex, q: &NormIndex, n: u64, big_n: u64) -> Result<WidthOrder> {
    for (name, x) in [("p", p), ("q", q)] {
        if let NormIndex::Finite(x) = x {
            if *x < Rational::one() {
                return Err(Error::InvalidParameter(format!("{name} = {x} must be at least 1")));
            }
        }
    }
    if n > big_n {
        return Err(Error::Range(format!("n = {n} exceeds N = {big_n}")));
    }
    let (ip, iq) = (p.recip(), q.recip());
    if iq >= ip {
        let value = if n == big_n { Magnitude::zero() } else { Magnitude::power(big_n - n, &iq - &ip) };
        return Ok(WidthOrder::from_terms(vec![Term::new(TermKind::Exact, None, None, value)], true));
    }
    let q = q.as_finite().ok_or_else(|| Error::Domain("p < q = inf is outside the known single-ball orders".into()))?;
    if 2 * n as u128 > big_n as u128 {
        return Err(Error::Range(format!("n = {n} exceeds N/2 = {big_n}/2, required when p < q")));
    }
    let two = Rational::from_integer(2.into());
    let constant = || WidthOrder::from_terms(vec![Term::new(TermKind::Constant, None, None, Magnitude::one())], false);
    if *q <= two || n == 0 {
        return Ok(constant());
    }
    let x = Magnitude::power(n, -half()).mul(&Magnitude::power(big_n, iq.clone()));
    if x >= Magnitude::one() {
        return Ok(constant());
    }
    let omega = ((&ip - &iq) / (half() - &iq)).min(Rational::one());
    Ok(WidthOrder::from_terms(vec![Term::new(TermKind::Gluskin, None, None, x.pow(&omega))], false))
}

/// Order of `d_n(M_0, l_q^N)` as the minimum over all terms. A single ball
/// reduces to [`single_ball_order`].
pub fn intersection_order(spec: &IntersectionSpec) -> Result<WidthOrder> {
    if spec.balls.len() == 1 {
        let b = &spec.balls[0];
        return Ok(single_ball_order(&b.p, &spec.q, spec.n, spec.big_n)?.scaled(&b.nu, 0));
    }
    let q = spec.finite_q()?.clone();
    spec.check_half()?;
    let two = Rational::from_integer(2.into());
    let iq = q.recip();
    let big_n = spec.big_n;
    let balls = &spec.balls;
    let mut terms = Vec::new();
    let cross = |a: usize, b: usize, target: &Rational| -> Result<Magnitude> {
        let w = interpolation_weight(target, &balls[a].p.recip(), &balls[b].p.recip())?;
        Ok(balls[a].nu.pow(&(Rational::one() - &w)).mul(&balls[b].nu.pow(&w)))
    };
    let large = |i: usize, x: &BallSpec| Term::new(TermKind::LargeP, Some(i), None, x.nu.mul(&Magnitude::power(big_n, &iq - x.p.recip())));
    if q <= two {
        for (i, x) in balls.iter().enumerate() {
            if x.p.recip() <= iq {
                terms.push(large(i, x));
            }
        }
        for (i, x) in balls.iter().enumerate() {
            if x.p.recip() >= iq {
                terms.push(Term::new(TermKind::SmallP, Some(i), None, x.nu.clone()));
            }
        }
        for (a, xa) in balls.iter().enumerate() {
            for (b, xb) in balls.iter().enumerate() {
                if xa.p.recip() < iq && xb.p.recip() > iq {
                    terms.push(Term::new(TermKind::CrossQ, Some(a), Some(b), cross(a, b, &iq)?));
                }
            }
        }
    } else {
        spec.check_lower(&q)?;
        let g = spec.gluskin_factor(&q);
        let ih = half();
        for (i, x) in balls.iter().enumerate() {
            if x.p.recip() <= iq {
                terms.push(large(i, x));
            }
        }
        for (i, x) in balls.iter().enumerate() {
            let ip = x.p.recip();
            if ip >= iq && ip <= ih {
                let w = (&ip - &iq) / (&ih - &iq);
                terms.push(Term::new(TermKind::MidP, Some(i), None, x.nu.mul(&g.pow(&w))));
            }
        }
        for (i, x) in balls.iter().enumerate() {
            if x.p.recip() >= ih {
                terms.push(Term::new(TermKind::SmallP, Some(i), None, x.nu.mul(&g)));
            }
        }
        for (a, xa) in balls.iter().enumerate() {
            for (b, xb) in balls.iter().enumerate() {
                if xa.p.recip() < iq && xb.p.recip() > iq {
                    terms.push(Term::new(TermKind::CrossQ, Some(a), Some(b), cross(a, b, &iq)?));
                }
            }
        }
        for (a, xa) in balls.iter().enumerate() {
            for (b, xb) in balls.iter().enumerate() {
                if xa.p.recip() < ih && xb.p.recip() > ih {
                    terms.push(Term::new(TermKind::Cross2, Some(a), Some(b), cross(a, b, &ih)?.mul(&g)));
                }
            }
        }
    }
    let mut order = WidthOrder::from_terms(terms, false);
    // a certificate is attached only when an explicit case applies
    order.certificate = classify_branch(spec).ok().flatten();
    Ok(order)
}

/// A dyadic block `m̄`, with `m = m_1 + … + m_d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DyadicBlock {
    pub m_vec: Vec<u32>,
}

impl DyadicBlock {
    pub fn new(m_vec: Vec<u32>) -> Result<Self> {
        if m_vec.is_empty() || m_vec.iter().any(|&m| m == 0) {
            return Err(Error::InvalidParameter("block entries must be positive".into()));
        }
        if m_vec.iter().map(|&m| m as u64).sum::<u64>() > 62 {
            return Err(Error::Range("block size m must not exceed 62".into()));
        }
        Ok(DyadicBlock { m_vec })
    }

    pub fn m(&self) -> u32 {
        self.m_vec.iter().sum()
    }

    /// `∩_j 2^(-m_j r_j - m/q + m/p_j) B_{p_j}^(2^m)` in `l_q^(2^m)`.
    pub fn intersection(&self, spec: &ProblemSpec, n: u64) -> Result<IntersectionSpec> {
        if self.m_vec.len() != spec.dim() {
            return Err(Error::LengthMismatch { expected: spec.dim(), got: self.m_vec.len() });
        }
        let m = Rational::from_integer(self.m().into());
        let balls = (0..spec.dim())
            .map(|j| {
                let e = -(Rational::from_integer(self.m_vec[j].into()) * &spec.r()[j]) - &m / spec.q() + &m / &spec.p()[j];
                BallSpec::new(NormIndex::Finite(spec.p()[j].clone()), Magnitude::power(2, e))
            })
            .collect::<Result<Vec<_>>>()?;
        IntersectionSpec::new(1u64 << self.m(), n, NormIndex::Finite(spec.q().clone()), balls)
    }
}

pub fn dyadic_block_order(spec: &ProblemSpec, block: &DyadicBlock, n: u64) -> Result<WidthOrder> {
    intersection_order(&block.intersection(spec, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{int, rat};

    fn fin(x: Rational) -> NormIndex {
        NormIndex::Finite(x)
    }

    #[test]
    fn single_ball_examples() {
        let w = single_ball_order(&fin(int(2)), &fin(int(1)), 5, 10).unwrap();
        assert!(w.exact);
        assert_eq!(w.value, Magnitude::power(5, rat(1, 2)));
        let w = single_ball_order(&fin(int(1)), &fin(int(2)), 50, 100).unwrap();
        assert_eq!(w.value, Magnitude::one());
        let w = single_ball_order(&fin(int(2)), &fin(int(4)), 8, 16).unwrap();
        assert_eq!(w.value, Magnitude::power(2, rat(-1, 2)));
        assert_eq!(w.branch.kind, TermKind::Gluskin);
        assert!(single_ball_order(&fin(int(1)), &fin(int(2)), 9, 16).is_err());
        assert!(single_ball_order(&fin(int(3)), &fin(int(2)), 7, 7).unwrap().value.is_zero());
    }

    #[test]
    fn cross_term_example() {
        let balls = vec![BallSpec::parse("inf:1/4").unwrap(), BallSpec::parse("1:1").unwrap()];
        let spec = IntersectionSpec::new(16, 4, fin(int(2)), balls).unwrap();
        let w = intersection_order(&spec).unwrap();
        assert_eq!(w.value.to_rational(), Some(rat(1, 2)));
        assert_eq!(w.branch.kind, TermKind::CrossQ);
        assert_eq!(w.branch.label(), "cross-λ(1,2)");
        assert_eq!(w.terms.len(), 3);
    }

    #[test]
    fn larger_copy_is_never_selected() {
        let balls = vec![BallSpec::parse("3:1/5").unwrap(), BallSpec::parse("3:2/5").unwrap()];
        let spec = IntersectionSpec::new(64, 8, fin(int(2)), balls).unwrap();
        let w = intersection_order(&spec).unwrap();
        assert_eq!(w.branch.alpha, Some(0));
    }

    #[test]
    fn ranges_are_enforced() {
        let balls = vec![BallSpec::parse("3:1").unwrap(), BallSpec::parse("3/2:1").unwrap()];
        assert!(intersection_order(&IntersectionSpec::new(16, 9, fin(int(2)), balls.clone()).unwrap()).is_err());
        // N^(2/q) = 16 > n = 8
        assert!(intersection_order(&IntersectionSpec::new(256, 8, fin(int(4)), balls).unwrap()).is_err());
        assert!(BallSpec::parse("1/2:1").is_err());
        assert!(BallSpec::parse("2:0").is_err());
    }

    #[test]
    fn dyadic_radii() {
        let spec = ProblemSpec::new(vec![int(3), int(3)], vec![int(1), int(1)], int(2)).unwrap();
        let block = DyadicBlock::new(vec![3, 3]).unwrap();
        let inter = block.intersection(&spec, 8).unwrap();
        assert_eq!(inter.big_n, 64);
        for b in &inter.balls {
            assert_eq!(b.nu, Magnitude::power(2, int(-4)));
        }
        let w = dyadic_block_order(&spec, &block, 8).unwrap();
        assert_eq!(w.value.log2_exact(), Some(int(-3)));
    }
}
