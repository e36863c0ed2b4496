//! `φ` and `ψ_n`: the exponents of dyadic blocks, as functions of the block
//! sizes `t_j` (real stand-ins for `m_j`). Logarithms are base 2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::ser_rational;
use crate::params::{half, interpolation_weight, ProblemSpec, Rational};

fn weight(target: &Rational, pi: &Rational, pj: &Rational) -> Rational {
    interpolation_weight(target, &pi.recip(), &pj.recip()).expect("p_i != p_j for a crossing pair")
}

fn max_of(values: impl Iterator<Item = Rational>) -> Rational {
    values.max().expect("at least one piece")
}

/// `φ(t) = max{ max_{p_j>=q} r_j t_j, max_{p_j<=q} (r_j t_j + t/q - t/p_j),
/// max_{p_i>q>p_j} ((1-λ_ij) r_i t_i + λ_ij r_j t_j) }` with `t = Σ t_j`.
pub fn phi(spec: &ProblemSpec, t: &[Rational]) -> Result<Rational> {
    if t.len() != spec.dim() {
        return Err(Error::LengthMismatch { expected: spec.dim(), got: t.len() });
    }
    let (p, r, q) = (spec.p(), spec.r(), spec.q());
    let total: Rational = t.iter().sum();
    let d = spec.dim();
    let mut vals = Vec::new();
    for j in 0..d {
        if p[j] >= *q {
            vals.push(&r[j] * &t[j]);
        }
        if p[j] <= *q {
            vals.push(&r[j] * &t[j] + &total / q - &total / &p[j]);
        }
    }
    for i in 0..d {
        for j in 0..d {
            if p[i] > *q && p[j] < *q {
                let l = weight(&q.recip(), &p[i], &p[j]);
                vals.push((Rational::from_integer(1.into()) - &l) * &r[i] * &t[i] + &l * &r[j] * &t[j]);
            }
        }
    }
    Ok(max_of(vals.into_iter()))
}

/// `ψ_n(t_1, …, t_d, t)` for `q > 2`, with `log n` supplied as `log2_n`.
pub fn psi_n(spec: &ProblemSpec, t: &[Rational], total: &Rational, log2_n: &Rational) -> Result<Rational> {
    if t.len() != spec.dim() {
        return Err(Error::LengthMismatch { expected: spec.dim(), got: t.len() });
    }
    let (p, r, q) = (spec.p(), spec.r(), spec.q());
    let two = Rational::from_integer(2.into());
    if *q <= two {
        return Err(Error::Domain("ψ_n is defined for q > 2".into()));
    }
    if *log2_n <= Rational::from_integer(0.into()) {
        return Err(Error::InvalidParameter("log n must be positive".into()));
    }
    let h = half();
    let one = Rational::from_integer(1.into());
    let d = spec.dim();
    let mut vals = Vec::new();
    for j in 0..d {
        // j ∈ I
        if p[j] >= *q {
            vals.push(&r[j] * &t[j]);
        }
        // j ∈ J
        if p[j] >= two && p[j] <= *q {
            let w = (p[j].recip() - q.recip()) / (&h - q.recip());
            vals.push(&r[j] * &t[j] - &h * &w * total + &h * &w * log2_n);
        }
        // j ∈ K
        if p[j] <= two {
            vals.push(&r[j] * &t[j] - total / &p[j] + &h * log2_n);
        }
    }
    for i in 0..d {
        for j in 0..d {
            // i ∈ I', j ∈ J' ∪ K
            if p[i] > *q && p[j] < *q {
                let l = weight(&q.recip(), &p[i], &p[j]);
                vals.push((&one - &l) * &r[i] * &t[i] + &l * &r[j] * &t[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            // i ∈ I ∪ J', j ∈ K'
            if p[i] > two && p[j] < two {
                let m = weight(&h, &p[i], &p[j]);
                vals.push((&one - &m) * &r[i] * &t[i] + &m * &r[j] * &t[j] - total / &two + &h * log2_n);
            }
        }
    }
    Ok(max_of(vals.into_iter()))
}

/// One instance of the domination of a `μ` term in the block-size bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominationCheck {
    pub i: usize,
    pub j: usize,
    /// `(1-μ_ij) r_i m_i + μ_ij r_j m_j + m/q - m/2`
    #[serde(serialize_with = "ser_rational")]
    pub lhs: Rational,
    /// For `p_i > q`: `max{(1-λ_ij) r_i m_i + λ_ij r_j m_j, r_j m_j + m/q - m/p_j}`;
    /// for `2 < p_i <= q`: `max{r_i m_i + m/q - m/p_i, r_j m_j + m/q - m/p_j}`.
    #[serde(serialize_with = "ser_rational")]
    pub rhs: Rational,
    pub holds: bool,
}

/// The `μ` terms are dominated for every pair `p_i > 2 > p_j`, which is why
/// they drop out of the bound on a block. `q > 2` only.
pub fn domination_checks(spec: &ProblemSpec, m: &[Rational]) -> Result<Vec<DominationCheck>> {
    if m.len() != spec.dim() {
        return Err(Error::LengthMismatch { expected: spec.dim(), got: m.len() });
    }
    let (p, r, q) = (spec.p(), spec.r(), spec.q());
    let two = Rational::from_integer(2.into());
    if *q <= two {
        return Err(Error::Domain("the domination inequalities concern q > 2".into()));
    }
    let one = Rational::from_integer(1.into());
    let total: Rational = m.iter().sum();
    let mut out = Vec::new();
    for i in 0..spec.dim() {
        for j in 0..spec.dim() {
            if !(p[i] > two && p[j] < two) {
                continue;
            }
            let mu = weight(&half(), &p[i], &p[j]);
            let lhs = (&one - &mu) * &r[i] * &m[i] + &mu * &r[j] * &m[j] + &total / q - &total / &two;
            let j_term = &r[j] * &m[j] + &total / q - &total / &p[j];
            let rhs = if p[i] > *q {
                let l = weight(&q.recip(), &p[i], &p[j]);
                ((&one - &l) * &r[i] * &m[i] + &l * &r[j] * &m[j]).max(j_term)
            } else {
                (&r[i] * &m[i] + &total / q - &total / &p[i]).max(j_term)
            };
            out.push(DominationCheck { i, j, holds: lhs <= rhs, lhs, rhs });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{int, rat};

    #[test]
    fn phi_example() {
        let spec = ProblemSpec::new(vec![int(3), int(3)], vec![int(1), int(1)], int(2)).unwrap();
        assert_eq!(phi(&spec, &[int(1), int(1)]).unwrap(), int(1));
    }

    #[test]
    fn phi_is_homogeneous() {
        let spec = ProblemSpec::new(vec![int(5), rat(3, 2)], vec![rat(1, 2), int(2)], int(2)).unwrap();
        let t = [rat(3, 7), rat(5, 2)];
        let c = rat(9, 4);
        let ct: Vec<Rational> = t.iter().map(|x| x * &c).collect();
        assert_eq!(phi(&spec, &ct).unwrap(), phi(&spec, &t).unwrap() * c);
    }

    #[test]
    fn domination_holds() {
        let spec = ProblemSpec::new(vec![int(6), rat(3, 2), int(3)], vec![int(1), rat(1, 2), int(2)], int(4)).unwrap();
        let checks = domination_checks(&spec, &[int(3), int(1), int(4)]).unwrap();
        assert_eq!(checks.len(), 2);
        assert!(checks.iter().all(|c| c.holds));
    }

    #[test]
    fn psi_requires_large_q() {
        let spec = ProblemSpec::new(vec![int(3), int(3)], vec![int(1), int(1)], int(2)).unwrap();
        assert!(psi_n(&spec, &[int(1), int(1)], &int(2), &int(3)).is_err());
    }
}
