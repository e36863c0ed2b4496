//! Brute-force minimisation on a rational lattice with a certified gap.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{FeasibleSet, PiecewiseMax, Point};
use crate::format::ser_rational;
use crate::params::Rational;

/// Upper limit on lattice points visited by one call.
pub const POINT_BUDGET: u64 = 1 << 20;

/// Environment variable overriding the default resolution.
pub const GRID_ENV: &str = "WIDTHCALC_GRID";

/// `64·d` unless `WIDTHCALC_GRID` holds a positive integer.
pub fn default_grid(dim: usize) -> u64 {
    std::env::var(GRID_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|g| *g > 0)
        .unwrap_or(64 * dim as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridResult {
    #[serde(serialize_with = "ser_rational")]
    pub best_value: Rational,
    pub best_point: Point,
    /// `best_value - gap_bound <= min <= best_value`.
    #[serde(serialize_with = "ser_rational")]
    pub gap_bound: Rational,
    pub grid: u64,
    pub points: u64,
}

impl GridResult {
    pub fn brackets(&self, theta: &Rational) -> bool {
        &(&self.best_value - &self.gap_bound) <= theta && theta <= &self.best_value
    }
}

fn binom(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Lattice points the call would visit.
pub fn grid_size(dim: usize, levels: u64, g: u64) -> u128 {
    binom(g + dim as u64 - 1, dim as u64 - 1) * levels as u128
}

/// Minimise `obj` over lattice points `α = s·k/G` (`Σk = G`) on `G + 1`
/// evenly spaced levels of `s` (one level when `s` is fixed).
///
/// Every lattice value is exact, so `best_value >= min`. Rounding the true
/// minimiser to the lattice moves each coordinate by less than `s_upper/G`
/// and `s` by at most one level, which gives
/// `gap = Σ_j max_k |c_kj| · s_upper/G + (max|c_s| + max|c_α|)·(s_upper - s_lower)/G`.
pub fn grid_minimize(obj: &PiecewiseMax, feas: &FeasibleSet, g: u64) -> Result<GridResult> {
    let d = obj.dim;
    if g == 0 || d == 0 || feas.dim != d || obj.pieces.is_empty() {
        return Err(Error::InvalidParameter("grid needs G > 0 and a non-empty objective".into()));
    }
    let spread = &feas.s_upper - &feas.s_lower;
    let levels: Vec<Rational> = if spread.is_zero() {
        vec![feas.s_lower.clone()]
    } else {
        (0..=g).map(|i| &feas.s_lower + &spread * Rational::new(i.into(), g.into())).collect()
    };
    let total = grid_size(d, levels.len() as u64, g);
    if total > POINT_BUDGET as u128 {
        return Err(Error::Range(format!("grid of {total} points exceeds the budget of {POINT_BUDGET}")));
    }

    // integer α coefficients C_kj = c_kj · D
    let den = obj
        .pieces
        .iter()
        .flat_map(|p| p.coeffs.iter())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Option<Vec<Vec<i128>>> = obj
        .pieces
        .iter()
        .map(|p| p.coeffs.iter().map(|c| (c.numer() * (&den / c.denom())).to_i128()).collect())
        .collect();

    let mut best: Option<(Rational, Point)> = None;
    for s in &levels {
        let found = match &ints {
            Some(ints) => level_fast(obj, ints, &den, s, d, g),
            None => None,
        }
        .unwrap_or_else(|| level_exact(obj, s, d, g));
        if best.as_ref().map_or(true, |(v, _)| found.0 < *v) {
            best = Some(found);
        }
    }
    let (best_value, best_point) = best.expect("at least one level");

    let g_r = Rational::from_integer(g.into());
    let max_abs = |f: &dyn Fn(&crate::exponent::AffinePiece) -> Rational| {
        obj.pieces.iter().map(f).max().unwrap_or_else(Rational::zero)
    };
    let per_coord: Rational = (0..d).map(|j| max_abs(&|p| p.coeffs[j].abs())).sum();
    let c_alpha = (0..d).map(|j| max_abs(&|p| p.coeffs[j].abs())).max().unwrap_or_else(Rational::zero);
    let c_s = max_abs(&|p| p.s_coeff.abs());
    let gap_bound = per_coord * &feas.s_upper / &g_r + (c_s + c_alpha) * &spread / &g_r;
    Ok(GridResult { best_value, best_point, gap_bound, grid: g, points: total as u64 })
}

/// Visit every composition of `g` into `d` parts.
fn compositions(d: usize, g: u64, mut visit: impl FnMut(&[u64])) {
    let mut k = vec![0u64; d];
    k[d - 1] = g;
    loop {
        visit(&k);
        // odometer over the first d-1 parts, the last part takes the rest
        let mut j = d - 1;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            if k[d - 1] > 0 {
                k[j] += 1;
                k[d - 1] -= 1;
                break;
            }
            k[d - 1] += k[j];
            k[j] = 0;
        }
    }
}

fn point_at(s: &Rational, k: &[u64], g: u64) -> Point {
    let alpha = k.iter().map(|&x| s * Rational::new(x.into(), g.into())).collect();
    Point::new(alpha, s.clone())
}

/// Level minimum with all values scaled to a common integer denominator.
/// `None` when something does not fit in `i128`.
fn level_fast(obj: &PiecewiseMax, ints: &[Vec<i128>], den: &BigInt, s: &Rational, d: usize, g: u64) -> Option<(Rational, Point)> {
    // value_k = a·S_k + B_k with a = s/(G·D), S_k = Σ_j C_kj k_j
    let a = s / Rational::from_integer(den * BigInt::from(g));
    let b: Vec<Rational> = obj.pieces.iter().map(|p| &p.s_coeff * s + &p.constant).collect();
    let m = b.iter().fold(a.denom().clone(), |acc, x| acc.lcm(x.denom()));
    let scale = (a.numer() * (&m / a.denom())).to_i128()?;
    let offs: Option<Vec<i128>> = b.iter().map(|x| (x.numer() * (&m / x.denom())).to_i128()).collect();
    let offs = offs?;
    let max_c = ints.iter().flatten().map(|c| c.unsigned_abs()).max().unwrap_or(0);
    // |S_k| <= G·max|C|; make sure scale·S_k + off cannot overflow
    let bound = (g as u128).checked_mul(max_c)?.checked_mul(scale.unsigned_abs())?;
    let off_max = offs.iter().map(|o| o.unsigned_abs()).max().unwrap_or(0);
    if bound.checked_add(off_max)? > i128::MAX as u128 {
        return None;
    }
    let mut best: Option<(i128, Vec<u64>)> = None;
    compositions(d, g, |k| {
        let mut top = i128::MIN;
        for (c, off) in ints.iter().zip(&offs) {
            let sk: i128 = c.iter().zip(k).map(|(ci, &kj)| ci * kj as i128).sum();
            top = top.max(scale * sk + off);
        }
        if best.as_ref().map_or(true, |(v, _)| top < *v) {
            best = Some((top, k.to_vec()));
        }
    });
    let (v, k) = best?;
    Some((Rational::new(v.into(), m), point_at(s, &k, g)))
}

fn level_exact(obj: &PiecewiseMax, s: &Rational, d: usize, g: u64) -> (Rational, Point) {
    let mut best: Option<(Rational, Vec<u64>)> = None;
    compositions(d, g, |k| {
        let pt = point_at(s, k, g);
        let v = obj.eval(&pt);
        if best.as_ref().map_or(true, |(b, _)| v < *b) {
            best = Some((v, k.to_vec()));
        }
    });
    let (v, k) = best.expect("non-empty lattice");
    (v, point_at(s, &k, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{AffinePiece, Family, PieceTag};
    use crate::params::{int, rat};

    #[test]
    fn composition_count() {
        let mut n = 0;
        compositions(3, 4, |k| {
            assert_eq!(k.iter().sum::<u64>(), 4);
            n += 1;
        });
        assert_eq!(n, 15);
        assert_eq!(grid_size(3, 1, 4), 15);
    }

    #[test]
    fn constant_objective_has_zero_gap() {
        let obj = PiecewiseMax {
            pieces: vec![AffinePiece {
                coeffs: vec![int(0); 3],
                s_coeff: int(0),
                constant: rat(7, 3),
                tag: PieceTag::single(Family::H1, 0),
            }],
            dim: 3,
            has_s: false,
        };
        let res = grid_minimize(&obj, &FeasibleSet::simplex(3), 8).unwrap();
        assert_eq!(res.best_value, rat(7, 3));
        assert_eq!(res.gap_bound, int(0));
    }

    #[test]
    fn gap_halves_when_grid_doubles() {
        let spec = crate::ProblemSpec::new(vec![int(3), rat(3, 2)], vec![int(1), rat(1, 3)], int(4)).unwrap();
        let obj = super::super::reference_objective(&spec);
        let feas = FeasibleSet::for_spec(&spec);
        let a = grid_minimize(&obj, &feas, 16).unwrap();
        let b = grid_minimize(&obj, &feas, 32).unwrap();
        assert_eq!(a.gap_bound, b.gap_bound * int(2));
        assert!(b.best_value <= a.best_value);
    }

    #[test]
    fn fast_and_exact_levels_agree() {
        let spec = crate::ProblemSpec::new(vec![int(5), rat(7, 4), int(3)], vec![rat(2, 3), int(1), rat(5, 2)], int(4)).unwrap();
        let obj = super::super::reference_objective(&spec);
        let den = obj.pieces.iter().flat_map(|p| p.coeffs.iter()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<Vec<i128>> = obj
            .pieces
            .iter()
            .map(|p| p.coeffs.iter().map(|c| (c.numer() * (&den / c.denom())).to_i128().unwrap()).collect())
            .collect();
        for s in [int(1), rat(3, 2), int(2)] {
            let fast = level_fast(&obj, &ints, &den, &s, 3, 12).unwrap();
            let exact = level_exact(&obj, &s, 3, 12);
            assert_eq!(fast.0, exact.0);
            assert_eq!(obj.eval(&fast.1), fast.0);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let spec = crate::ProblemSpec::new(vec![int(3); 4], vec![int(1); 4], int(4)).unwrap();
        let obj = super::super::reference_objective(&spec);
        assert!(matches!(grid_minimize(&obj, &FeasibleSet::for_spec(&spec), 512), Err(Error::Range(_))));
    }
}
