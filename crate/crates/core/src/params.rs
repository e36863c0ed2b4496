//! Parameter vectors, harmonic means, index partitions and interpolation weights.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact rational number. Always reduced, denominator positive.
pub type Rational = BigRational;

/// Largest dimension accepted by [`ProblemSpec`].
pub const MAX_DIM: usize = 16;

/// `n / d` as a [`Rational`]. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn half() -> Rational {
    rat(1, 2)
}

/// Parse `"a/b"` or an integer. Decimal notation is rejected on purpose:
/// `0.1` has no exact binary meaning and silently rounding it would defeat
/// the point of exact arithmetic.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let fail = |reason: &str| Error::Parse { input: input.to_string(), reason: reason.to_string() };
    if s.is_empty() {
        return Err(fail("empty"));
    }
    if s.contains(['.', 'e', 'E']) {
        return Err(fail("decimals are not accepted, write a fraction such as 3/2"));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| fail("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| fail("bad denominator"))?;
    if den.is_zero() {
        return Err(fail("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Comma separated list of rationals.
pub fn parse_rational_list(input: &str) -> Result<Vec<Rational>> {
    input.split(',').map(parse_rational).collect()
}

/// An exponent of a Lebesgue norm, allowed to be infinite.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NormIndex {
    Finite(Rational),
    Infinite,
}

impl NormIndex {
    pub fn finite(p: Rational) -> Self {
        NormIndex::Finite(p)
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(&self) -> Rational {
        match self {
            NormIndex::Finite(p) => p.recip(),
            NormIndex::Infinite => Rational::zero(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, NormIndex::Infinite)
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            NormIndex::Finite(p) => Some(p),
            NormIndex::Infinite => None,
        }
    }
}

impl PartialOrd for NormIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NormIndex {
    // Larger exponent means smaller reciprocal.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.recip().cmp(&self.recip())
    }
}

impl fmt::Display for NormIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormIndex::Finite(p) => write!(f, "{p}"),
            NormIndex::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for NormIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(NormIndex::Infinite),
            other => parse_rational(other).map(NormIndex::Finite),
        }
    }
}

/// The parameters `(p, r, q)` of an anisotropic Sobolev class measured in `L_q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProblemSpec {
    p: Vec<Rational>,
    r: Vec<Rational>,
    q: Rational,
}

impl ProblemSpec {
    pub fn new(p: Vec<Rational>, r: Vec<Rational>, q: Rational) -> Result<Self> {
        let d = p.len();
        if r.len() != d {
            return Err(Error::LengthMismatch { expected: d, got: r.len() });
        }
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::InvalidParameter(format!("dimension {d} is outside 2..={MAX_DIM}")));
        }
        let one = Rational::one();
        for (j, pj) in p.iter().enumerate() {
            if *pj <= one {
                return Err(Error::InvalidParameter(format!("p_{} = {pj} must exceed 1", j + 1)));
            }
        }
        for (j, rj) in r.iter().enumerate() {
            if !rj.is_positive() {
                return Err(Error::InvalidParameter(format!("r_{} = {rj} must be positive", j + 1)));
            }
        }
        if q <= one {
            return Err(Error::InvalidParameter(format!("q = {q} must exceed 1")));
        }
        Ok(ProblemSpec { p, r, q })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[Rational] {
        &self.p
    }

    pub fn r(&self) -> &[Rational] {
        &self.r
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    /// Apply a permutation: coordinate `j` of the result is coordinate `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), got: perm.len() });
        }
        let mut seen = vec![false; perm.len()];
        for &k in perm {
            if k >= perm.len() || std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        Ok(ProblemSpec {
            p: perm.iter().map(|&k| self.p[k].clone()).collect(),
            r: perm.iter().map(|&k| self.r[k].clone()).collect(),
            q: self.q.clone(),
        })
    }

    /// `q <= 2`, the regime with a single simplex as the feasible set.
    pub fn small_q(&self) -> bool {
        self.q <= int(2)
    }

    /// `<r>/d = 1 / Σ 1/r_j`.
    pub fn mean_r_over_d(&self) -> Rational {
        harmonic_mean(&self.r).expect("validated") / int(self.dim() as i64)
    }

    /// `<r>/<p∘r> = Σ 1/(p_j r_j) / Σ 1/r_j`.
    pub fn mean_ratio(&self) -> Rational {
        let pr = hadamard(&self.p, &self.r).expect("validated");
        harmonic_mean(&self.r).expect("validated") / harmonic_mean(&pr).expect("validated")
    }

    pub fn partition(&self) -> IndexPartition {
        partition_indices(&self.p, &self.q)
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "p=({}) r=({}) q={}", join(&self.p), join(&self.r), self.q)
    }
}

/// `d / Σ 1/a_j`.
pub fn harmonic_mean(a: &[Rational]) -> Result<Rational> {
    if a.is_empty() {
        return Err(Error::InvalidParameter("harmonic mean of an empty vector".into()));
    }
    let mut sum = Rational::zero();
    for x in a {
        if !x.is_positive() {
            return Err(Error::InvalidParameter(format!("harmonic mean needs positive entries, got {x}")));
        }
        sum += x.recip();
    }
    Ok(int(a.len() as i64) / sum)
}

/// Coordinatewise product.
pub fn hadamard(a: &[Rational], b: &[Rational]) -> Result<Vec<Rational>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x * y).collect())
}

/// Index sets of coordinates grouped by how `p_j` compares with `q` (and with 2).
/// Indices are zero based. Unprimed sets are closed, primed sets are open.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum IndexPartition {
    /// `q <= 2`.
    SmallQ {
        /// `p_j >= q`
        i0: Vec<usize>,
        /// `p_j <= q`
        j0: Vec<usize>,
        /// `p_j > q`
        i0_open: Vec<usize>,
        /// `p_j < q`
        j0_open: Vec<usize>,
    },
    /// `q > 2`.
    LargeQ {
        /// `p_j >= q`
        i: Vec<usize>,
        /// `2 <= p_j <= q`
        j: Vec<usize>,
        /// `p_j <= 2`
        k: Vec<usize>,
        /// `p_j > q`
        i_open: Vec<usize>,
        /// `2 < p_j < q`
        j_open: Vec<usize>,
        /// `p_j < 2`
        k_open: Vec<usize>,
    },
}

pub fn partition_indices(p: &[Rational], q: &Rational) -> IndexPartition {
    let two = int(2);
    let pick = |f: &dyn Fn(&Rational) -> bool| -> Vec<usize> {
        p.iter().enumerate().filter(|(_, x)| f(x)).map(|(j, _)| j).collect()
    };
    if *q <= two {
        partition_small_q(p, q)
    } else {
        IndexPartition::LargeQ {
            i: pick(&|x| x >= q),
            j: pick(&|x| *x >= two && x <= q),
            k: pick(&|x| *x <= two),
            i_open: pick(&|x| x > q),
            j_open: pick(&|x| *x > two && x < q),
            k_open: pick(&|x| *x < two),
        }
    }
}

/// The `q <= 2` style partition, built for any `q`. The objective of the
/// small-`q` regime is also meaningful (and needed) for `q > 2`.
pub fn partition_small_q(p: &[Rational], q: &Rational) -> IndexPartition {
    let pick = |f: &dyn Fn(&Rational) -> bool| -> Vec<usize> {
        p.iter().enumerate().filter(|(_, x)| f(x)).map(|(j, _)| j).collect()
    };
    IndexPartition::SmallQ {
        i0: pick(&|x| x >= q),
        j0: pick(&|x| x <= q),
        i0_open: pick(&|x| x > q),
        j0_open: pick(&|x| x < q),
    }
}

/// The weight `w` with `target = (1-w)·x_i + w·x_j`.
pub fn interpolation_weight(target: &Rational, x_i: &Rational, x_j: &Rational) -> Result<Rational> {
    if x_i == x_j {
        return Err(Error::Domain("interpolation between equal endpoints".into()));
    }
    Ok((target - x_i) / (x_j - x_i))
}

/// Interpolation weights `λ_ij` (towards `1/q`) and `μ_ij` (towards `1/2`),
/// computed on demand for admissible index pairs only.
#[derive(Debug, Clone)]
pub struct InterpCoeffs<'a> {
    spec: &'a ProblemSpec,
    partition: IndexPartition,
}

impl<'a> InterpCoeffs<'a> {
    pub fn new(spec: &'a ProblemSpec) -> Self {
        InterpCoeffs { spec, partition: spec.partition() }
    }

    pub fn partition(&self) -> &IndexPartition {
        &self.partition
    }

    /// `λ_ij = (1/q - 1/p_i) / (1/p_j - 1/p_i)`.
    pub fn lambda(&self, a: usize, b: usize) -> Result<Rational> {
        let ok = match &self.partition {
            IndexPartition::SmallQ { i0_open, j0_open, .. } => i0_open.contains(&a) && j0_open.contains(&b),
            IndexPartition::LargeQ { i_open, j_open, k, .. } => {
                i_open.contains(&a) && (j_open.contains(&b) || k.contains(&b))
            }
        };
        if !ok {
            return Err(Error::Domain(format!("lambda is not defined for the pair ({}, {})", a + 1, b + 1)));
        }
        let p = self.spec.p();
        interpolation_weight(&self.spec.q().recip(), &p[a].recip(), &p[b].recip())
    }

    /// `μ_ij = (1/2 - 1/p_i) / (1/p_j - 1/p_i)`, only when `q > 2`.
    pub fn mu(&self, a: usize, b: usize) -> Result<Rational> {
        let ok = match &self.partition {
            IndexPartition::SmallQ { .. } => false,
            IndexPartition::LargeQ { i, j_open, k_open, .. } => {
                (i.contains(&a) || j_open.contains(&a)) && k_open.contains(&b)
            }
        };
        if !ok {
            return Err(Error::Domain(format!("mu is not defined for the pair ({}, {})", a + 1, b + 1)));
        }
        let p = self.spec.p();
        interpolation_weight(&half(), &p[a].recip(), &p[b].recip())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(p: &[(i64, i64)], r: &[(i64, i64)], q: (i64, i64)) -> ProblemSpec {
        ProblemSpec::new(
            p.iter().map(|&(a, b)| rat(a, b)).collect(),
            r.iter().map(|&(a, b)| rat(a, b)).collect(),
            rat(q.0, q.1),
        )
        .unwrap()
    }

    #[test]
    fn harmonic_mean_of_one_and_two() {
        assert_eq!(harmonic_mean(&[int(1), int(2)]).unwrap(), rat(4, 3));
        assert!(harmonic_mean(&[int(1), int(0)]).is_err());
        assert!(harmonic_mean(&[int(1), int(-2)]).is_err());
    }

    #[test]
    fn hadamard_checks_lengths() {
        assert_eq!(hadamard(&[int(2), int(3)], &[rat(1, 2), int(2)]).unwrap(), vec![int(1), int(6)]);
        assert!(matches!(hadamard(&[int(1)], &[]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn validation() {
        assert!(ProblemSpec::new(vec![int(2)], vec![int(1)], int(2)).is_err());
        assert!(ProblemSpec::new(vec![int(1), int(2)], vec![int(1), int(1)], int(2)).is_err());
        assert!(ProblemSpec::new(vec![int(2), int(2)], vec![int(0), int(1)], int(2)).is_err());
        assert!(ProblemSpec::new(vec![int(2), int(2)], vec![int(1), int(1)], int(1)).is_err());
        assert!(ProblemSpec::new(vec![int(2); 17], vec![int(1); 17], int(2)).is_err());
        assert!(ProblemSpec::new(vec![int(2); 16], vec![int(1); 16], int(2)).is_ok());
    }

    #[test]
    fn partition_large_q() {
        let s = spec(&[(5, 1), (3, 1), (3, 2)], &[(1, 1); 3], (4, 1));
        assert_eq!(
            s.partition(),
            IndexPartition::LargeQ {
                i: vec![0],
                j: vec![1],
                k: vec![2],
                i_open: vec![0],
                j_open: vec![1],
                k_open: vec![2],
            }
        );
    }

    #[test]
    fn partition_boundaries_are_shared() {
        let s = spec(&[(2, 1), (4, 1), (3, 2)], &[(1, 1); 3], (2, 1));
        assert_eq!(
            s.partition(),
            IndexPartition::SmallQ { i0: vec![0, 1], j0: vec![0, 2], i0_open: vec![1], j0_open: vec![2] }
        );
        let s = spec(&[(2, 1), (4, 1), (3, 1)], &[(1, 1); 3], (4, 1));
        assert_eq!(
            s.partition(),
            IndexPartition::LargeQ {
                i: vec![1],
                j: vec![0, 1, 2],
                k: vec![0],
                i_open: vec![],
                j_open: vec![2],
                k_open: vec![],
            }
        );
    }

    #[test]
    fn lambda_and_mu_examples() {
        let s = spec(&[(6, 1), (3, 2)], &[(1, 1); 2], (2, 1));
        assert_eq!(InterpCoeffs::new(&s).lambda(0, 1).unwrap(), rat(2, 3));
        // at q = 2 the two weights coincide; mu itself needs q > 2
        let s = spec(&[(4, 1), (4, 3)], &[(1, 1); 2], (2, 1));
        let c = InterpCoeffs::new(&s);
        assert_eq!(c.lambda(0, 1).unwrap(), rat(1, 2));
        assert_eq!(interpolation_weight(&half(), &rat(1, 4), &rat(3, 4)).unwrap(), rat(1, 2));
        assert!(c.mu(0, 1).is_err());
        assert!(c.lambda(1, 0).is_err());
    }

    #[test]
    fn mu_for_large_q() {
        let s = spec(&[(5, 1), (3, 1), (3, 2)], &[(1, 1); 3], (4, 1));
        let c = InterpCoeffs::new(&s);
        // 1/2 = (1-mu)/5 + mu*2/3
        assert_eq!(c.mu(0, 2).unwrap(), rat(9, 14));
        assert_eq!(c.mu(1, 2).unwrap(), rat(1, 2));
        assert!(c.mu(2, 0).is_err());
        // lambda to an index in K is allowed, to one in I is not
        assert!(c.lambda(0, 2).is_ok());
        assert!(c.lambda(0, 0).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational(" -4 ").unwrap(), int(-4));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert_eq!("inf".parse::<NormIndex>().unwrap(), NormIndex::Infinite);
        assert_eq!(NormIndex::Infinite.recip(), int(0));
        assert!(NormIndex::Infinite > NormIndex::Finite(int(100)));
    }
}
