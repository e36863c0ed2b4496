//! An independent transcription of the objective, used as the brute-force
//! reference. It deliberately shares no construction code with `exponent`:
//! index sets and interpolation weights are recomputed inline here.

use num_traits::Zero;

use crate::exponent::{AffinePiece, Family, PieceTag, PiecewiseMax};
use crate::params::{ProblemSpec, Rational};

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn unit(d: usize, j: usize, c: Rational) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); d];
    v[j] = c;
    v
}

fn mix(d: usize, i: usize, j: usize, ci: Rational, cj: Rational) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); d];
    v[i] = ci;
    v[j] = cj;
    v
}

/// The reference objective: `h` when `q <= 2`, `h̃` otherwise.
pub fn reference_objective(spec: &ProblemSpec) -> PiecewiseMax {
    if *spec.q() <= r(2) {
        reference_small_q(spec)
    } else {
        reference_large_q(spec)
    }
}

/// `h` written out for any `q`, the left factor of the scaling identity when `q > 2`.
pub fn reference_small_q(spec: &ProblemSpec) -> PiecewiseMax {
    let d = spec.dim();
    let (p, rr, q) = (spec.p(), spec.r(), spec.q());
    let inv = |x: &Rational| r(1) / x;
    let mut pieces = Vec::new();
    let mut add = |coeffs: Vec<Rational>, constant: Rational, tag: PieceTag| {
        pieces.push(AffinePiece { coeffs, s_coeff: r(0), constant, tag });
    };
    for j in 0..d {
        if p[j] >= *q {
            add(unit(d, j, rr[j].clone()), r(0), PieceTag::single(Family::H1, j));
        }
    }
    for j in 0..d {
        if p[j] <= *q {
            add(unit(d, j, rr[j].clone()), inv(q) - inv(&p[j]), PieceTag::single(Family::H2, j));
        }
    }
    for i in 0..d {
        for j in 0..d {
            if p[i] > *q && p[j] < *q {
                // 1/q = (1 - λ)/p_i + λ/p_j
                let lam = (inv(q) - inv(&p[i])) / (inv(&p[j]) - inv(&p[i]));
                let c = mix(d, i, j, (r(1) - &lam) * &rr[i], &lam * &rr[j]);
                add(c, r(0), PieceTag::pair(Family::H3, i, j));
            }
        }
    }
    PiecewiseMax { pieces, dim: d, has_s: false }
}

fn reference_large_q(spec: &ProblemSpec) -> PiecewiseMax {
    let d = spec.dim();
    let (p, rr, q) = (spec.p(), spec.r(), spec.q());
    let two = r(2);
    let inv = |x: &Rational| r(1) / x;
    let mut pieces = Vec::new();
    let mut add = |coeffs: Vec<Rational>, s_coeff: Rational, constant: Rational, tag: PieceTag| {
        pieces.push(AffinePiece { coeffs, s_coeff, constant, tag });
    };
    let half = r(1) / &two;
    for j in 0..d {
        if p[j] >= *q {
            add(unit(d, j, rr[j].clone()), r(0), r(0), PieceTag::single(Family::Tilde1, j));
        }
    }
    for j in 0..d {
        if p[j] >= two && p[j] <= *q {
            // r_j α_j - (1/2)·((1/p_j - 1/q)/(1/2 - 1/q))·(s - 1)
            let k = (inv(&p[j]) - inv(q)) / (&half - inv(q)) * &half;
            add(unit(d, j, rr[j].clone()), -k.clone(), k, PieceTag::single(Family::Tilde2, j));
        }
    }
    for j in 0..d {
        if p[j] <= two {
            add(unit(d, j, rr[j].clone()), -inv(&p[j]), half.clone(), PieceTag::single(Family::Tilde3, j));
        }
    }
    for i in 0..d {
        for j in 0..d {
            if p[i] > *q && p[j] < *q {
                let lam = (inv(q) - inv(&p[i])) / (inv(&p[j]) - inv(&p[i]));
                let c = mix(d, i, j, (r(1) - &lam) * &rr[i], &lam * &rr[j]);
                add(c, r(0), r(0), PieceTag::pair(Family::Tilde4, i, j));
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            if p[i] > two && p[j] < two {
                let mu = (&half - inv(&p[i])) / (inv(&p[j]) - inv(&p[i]));
                let c = mix(d, i, j, (r(1) - &mu) * &rr[i], &mu * &rr[j]);
                add(c, -half.clone(), half.clone(), PieceTag::pair(Family::Tilde5, i, j));
            }
        }
    }
    PiecewiseMax { pieces, dim: d, has_s: true }
}
