use num_traits::Zero;

use super::{AffinePiece, Family, PieceTag, PiecewiseMax};
use crate::params::{half, int, interpolation_weight, partition_small_q, IndexPartition, InterpCoeffs, ProblemSpec, Rational};

/// `h` for `q <= 2`, `h̃` for `q > 2`.
pub fn build_objective(spec: &ProblemSpec) -> PiecewiseMax {
    if spec.small_q() {
        build_small_q_objective(spec)
    } else {
        build_large_q_objective(spec)
    }
}

fn piece(d: usize, terms: &[(usize, Rational)], s_coeff: Rational, constant: Rational, tag: PieceTag) -> AffinePiece {
    let mut coeffs = vec![Rational::zero(); d];
    for (j, c) in terms {
        coeffs[*j] += c;
    }
    AffinePiece { coeffs, s_coeff, constant, tag }
}

/// The small-`q` objective `h(α)`, built with the index sets of `q` whatever
/// its value. For `q > 2` it is the function appearing in the scaling identity
/// `h̃(α, q/2) = (q/2)·h(2α/q)`.
pub fn build_small_q_objective(spec: &ProblemSpec) -> PiecewiseMax {
    let (d, p, r) = (spec.dim(), spec.p(), spec.r());
    let inv_q = spec.q().recip();
    let IndexPartition::SmallQ { i0, j0, i0_open, j0_open } = partition_small_q(p, spec.q()) else {
        unreachable!()
    };
    let zero = Rational::zero;
    let mut pieces = Vec::new();
    for &j in &i0 {
        pieces.push(piece(d, &[(j, r[j].clone())], zero(), zero(), PieceTag::single(Family::H1, j)));
    }
    for &j in &j0 {
        let c = &inv_q - p[j].recip();
        pieces.push(piece(d, &[(j, r[j].clone())], zero(), c, PieceTag::single(Family::H2, j)));
    }
    for &i in &i0_open {
        for &j in &j0_open {
            let lambda = interpolation_weight(&inv_q, &p[i].recip(), &p[j].recip()).expect("p_i > q > p_j");
            let terms = [(i, (int(1) - &lambda) * &r[i]), (j, &lambda * &r[j])];
            pieces.push(piece(d, &terms, zero(), zero(), PieceTag::pair(Family::H3, i, j)));
        }
    }
    PiecewiseMax { pieces, dim: d, has_s: false }
}

fn build_large_q_objective(spec: &ProblemSpec) -> PiecewiseMax {
    let (d, p, r) = (spec.dim(), spec.p(), spec.r());
    let coeffs = InterpCoeffs::new(spec);
    let IndexPartition::LargeQ { i, j, k, i_open, j_open, k_open } = coeffs.partition().clone() else {
        unreachable!("large q objective needs q > 2")
    };
    let inv_q = spec.q().recip();
    let gap = half() - &inv_q;
    let zero = Rational::zero;
    let mut pieces = Vec::new();
    for &a in &i {
        pieces.push(piece(d, &[(a, r[a].clone())], zero(), zero(), PieceTag::single(Family::Tilde1, a)));
    }
    for &a in &j {
        // - (w/2)(s - 1) with w = (1/p - 1/q)/(1/2 - 1/q)
        let w_half = (p[a].recip() - &inv_q) / &gap / int(2);
        pieces.push(piece(d, &[(a, r[a].clone())], -w_half.clone(), w_half, PieceTag::single(Family::Tilde2, a)));
    }
    for &a in &k {
        pieces.push(piece(d, &[(a, r[a].clone())], -p[a].recip(), half(), PieceTag::single(Family::Tilde3, a)));
    }
    for &a in &i_open {
        for &b in j_open.iter().chain(&k) {
            let lambda = coeffs.lambda(a, b).expect("admissible pair");
            let terms = [(a, (int(1) - &lambda) * &r[a]), (b, &lambda * &r[b])];
            pieces.push(piece(d, &terms, zero(), zero(), PieceTag::pair(Family::Tilde4, a, b)));
        }
    }
    for &a in i.iter().chain(&j_open) {
        for &b in &k_open {
            let mu = coeffs.mu(a, b).expect("admissible pair");
            let terms = [(a, (int(1) - &mu) * &r[a]), (b, &mu * &r[b])];
            pieces.push(piece(d, &terms, -half(), half(), PieceTag::pair(Family::Tilde5, a, b)));
        }
    }
    PiecewiseMax { pieces, dim: d, has_s: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Point;
    use crate::params::rat;

    fn spec(p: &[Rational], r: &[Rational], q: Rational) -> ProblemSpec {
        ProblemSpec::new(p.to_vec(), r.to_vec(), q).unwrap()
    }

    #[test]
    fn small_q_pieces() {
        let s = spec(&[int(4), rat(4, 3)], &[int(1), rat(1, 2)], int(2));
        let h = build_objective(&s);
        let tags: Vec<String> = h.pieces.iter().map(|p| p.tag.to_string()).collect();
        assert_eq!(tags, ["h1(1)", "h2(2)", "h3(1,2)"]);
        // h2(2) = α2/2 - 3/4 + 1/2
        assert_eq!(h.pieces[1].constant, rat(-1, 4));
        assert_eq!(h.pieces[2].coeffs, vec![rat(1, 2), rat(1, 4)]);
    }

    #[test]
    fn large_q_pieces() {
        let s = spec(&[int(5), int(3), rat(3, 2)], &vec![int(1); 3], int(4));
        let h = build_objective(&s);
        let tags: Vec<String> = h.pieces.iter().map(|p| p.tag.to_string()).collect();
        assert_eq!(tags, ["ht1(1)", "ht2(2)", "ht3(3)", "ht4(1,2)", "ht4(1,3)", "ht5(1,3)", "ht5(2,3)"]);
        // at s = 1 the ht2 piece is just r·α
        let at = Point::new(vec![int(0), int(1), int(0)], int(1));
        assert_eq!(h.pieces[1].eval(&at.alpha, &at.s), int(1));
    }

    #[test]
    fn example_values_at_s_one() {
        let s = spec(&[int(3), int(3)], &[int(1), int(1)], int(4));
        let h = build_objective(&s);
        assert_eq!(h.eval(&Point::new(vec![rat(1, 2), rat(1, 2)], int(1))), rat(1, 2));
        assert_eq!(h.eval(&Point::new(vec![int(1), int(1)], int(2))), rat(5, 6));
    }
}
