//! The piecewise-linear objective and its exact minimisation.
//!
//! The order exponent is `min h` over the simplex (`q <= 2`) or `min h̃` over
//! the truncated cone `{(α, s) : α >= 0, Σα = s, 1 <= s <= q/2}` (`q > 2`).
//! Both objectives are maxima of affine pieces, so the minimum is the optimum
//! of the epigraph LP `min t` subject to `t >= piece(α, s)` for every piece.

mod objective;
mod region;
pub mod simplex;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::{ser_rational, ser_rationals};
use crate::params::{int, ProblemSpec, Rational};
use simplex::{LinearProgram, LpOutcome, Relation};

pub use objective::{build_objective, build_small_q_objective};
pub use region::{candidate_vertices, classify_region, region_systems};

/// Which family of the objective a piece belongs to. `H*` are the pieces of
/// the `q <= 2` objective `h`, `Tilde*` those of the `q > 2` objective `h̃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    H1,
    H2,
    H3,
    Tilde1,
    Tilde2,
    Tilde3,
    Tilde4,
    Tilde5,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::H1 => "h1",
            Family::H2 => "h2",
            Family::H3 => "h3",
            Family::Tilde1 => "ht1",
            Family::Tilde2 => "ht2",
            Family::Tilde3 => "ht3",
            Family::Tilde4 => "ht4",
            Family::Tilde5 => "ht5",
        };
        f.write_str(s)
    }
}

/// Provenance of a piece: its family and the (zero based) indices it was built from.
/// Single index families leave `i` empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PieceTag {
    pub family: Family,
    pub i: Option<usize>,
    pub j: usize,
}

impl PieceTag {
    pub fn single(family: Family, j: usize) -> Self {
        PieceTag { family, i: None, j }
    }

    pub fn pair(family: Family, i: usize, j: usize) -> Self {
        PieceTag { family, i: Some(i), j }
    }
}

impl fmt::Display for PieceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.i {
            Some(i) => write!(f, "{}({},{})", self.family, i + 1, self.j + 1),
            None => write!(f, "{}({})", self.family, self.j + 1),
        }
    }
}

impl Serialize for PieceTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `coeffs·α + s_coeff·s + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffinePiece {
    pub coeffs: Vec<Rational>,
    pub s_coeff: Rational,
    pub constant: Rational,
    pub tag: PieceTag,
}

impl AffinePiece {
    pub fn eval(&self, alpha: &[Rational], s: &Rational) -> Rational {
        let mut v = &self.s_coeff * s + &self.constant;
        for (c, a) in self.coeffs.iter().zip(alpha) {
            if !c.is_zero() {
                v += c * a;
            }
        }
        v
    }
}

/// Pointwise maximum of affine pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseMax {
    pub pieces: Vec<AffinePiece>,
    pub dim: usize,
    /// Whether `s` is a free variable (the `q > 2` objective).
    pub has_s: bool,
}

impl PiecewiseMax {
    pub fn eval(&self, point: &Point) -> Rational {
        self.eval_at(&point.alpha, &point.s)
    }

    pub fn eval_at(&self, alpha: &[Rational], s: &Rational) -> Rational {
        self.pieces.iter().map(|p| p.eval(alpha, s)).max().expect("objective has at least one piece")
    }

    /// Tags of the pieces attaining the maximum at `point`.
    pub fn active(&self, point: &Point) -> Vec<PieceTag> {
        let values: Vec<_> = self.pieces.iter().map(|p| p.eval(&point.alpha, &point.s)).collect();
        let top = values.iter().max().expect("objective has at least one piece");
        self.pieces.iter().zip(&values).filter(|(_, v)| *v == top).map(|(p, _)| p.tag).collect()
    }
}

/// A point `(α, s)`. For `q <= 2` the second coordinate is always 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Point {
    #[serde(serialize_with = "ser_rationals")]
    pub alpha: Vec<Rational>,
    #[serde(serialize_with = "ser_rational")]
    pub s: Rational,
}

impl Point {
    pub fn new(alpha: Vec<Rational>, s: Rational) -> Self {
        Point { alpha, s }
    }

    /// A point of the simplex, `s = 1`.
    pub fn on_simplex(alpha: Vec<Rational>) -> Self {
        Point { alpha, s: Rational::one() }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.alpha.iter().map(|x| x.to_string()).collect();
        write!(f, "α=({}) s={}", a.join(","), self.s)
    }
}

/// `{(α, s) : α >= 0, Σα = s, s_lower <= s <= s_upper}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleSet {
    pub dim: usize,
    pub s_lower: Rational,
    pub s_upper: Rational,
}

impl FeasibleSet {
    pub fn for_spec(spec: &ProblemSpec) -> Self {
        let s_upper = if spec.small_q() { Rational::one() } else { spec.q() / int(2) };
        FeasibleSet { dim: spec.dim(), s_lower: Rational::one(), s_upper }
    }

    pub fn simplex(dim: usize) -> Self {
        FeasibleSet { dim, s_lower: Rational::one(), s_upper: Rational::one() }
    }

    pub fn contains(&self, point: &Point) -> bool {
        point.alpha.len() == self.dim
            && point.alpha.iter().all(|a| !a.is_negative())
            && point.alpha.iter().sum::<Rational>() == point.s
            && self.s_lower <= point.s
            && point.s <= self.s_upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compactness {
    Compact,
    NotCompact,
    Boundary,
}

impl Compactness {
    pub fn of_theta(theta: &Rational) -> Self {
        if theta.is_positive() {
            Compactness::Compact
        } else if theta.is_negative() {
            Compactness::NotCompact
        } else {
            Compactness::Boundary
        }
    }
}

impl fmt::Display for Compactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Compactness::Compact => "compact",
            Compactness::NotCompact => "not-compact",
            Compactness::Boundary => "boundary",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentResult {
    #[serde(serialize_with = "ser_rational")]
    pub theta: Rational,
    pub argmin: Point,
    pub unique: bool,
    pub active_pieces: Vec<PieceTag>,
    pub compact: Compactness,
}

/// Build the objective for `spec` and minimise it.
pub fn analyze(spec: &ProblemSpec) -> Result<ExponentResult> {
    minimize(&build_objective(spec), &FeasibleSet::for_spec(spec))
}

/// Exact minimum of `obj` over `feas` via the epigraph LP.
pub fn minimize(obj: &PiecewiseMax, feas: &FeasibleSet) -> Result<ExponentResult> {
    if obj.pieces.is_empty() {
        return Err(Error::InvalidParameter("objective has no pieces".into()));
    }
    if obj.dim != feas.dim || obj.pieces.iter().any(|p| p.coeffs.len() != obj.dim) {
        return Err(Error::LengthMismatch { expected: feas.dim, got: obj.dim });
    }
    if feas.s_lower > feas.s_upper || !feas.s_lower.is_positive() {
        return Err(Error::InvalidParameter("empty feasible set".into()));
    }
    let d = obj.dim;
    // variables: α_1..α_d, u = s - s_lower, t+, t-
    let (u, tp, tm) = (d, d + 1, d + 2);
    let width = d + 3;
    let unit = |k: usize, c: Rational| {
        let mut v = vec![Rational::zero(); width];
        v[k] = c;
        v
    };
    let mut objective = unit(tp, int(1));
    objective[tm] = int(-1);
    let mut lp = LinearProgram::minimize(objective);
    let mut sum = vec![int(1); width];
    sum[u] = int(-1);
    sum[tp] = int(0);
    sum[tm] = int(0);
    lp.constrain(sum, Relation::Eq, feas.s_lower.clone());
    lp.constrain(unit(u, int(1)), Relation::Le, &feas.s_upper - &feas.s_lower);
    for piece in &obj.pieces {
        // t - c·α - c_s·u >= c_s·s_lower + c_0
        let mut row: Vec<Rational> = piece.coeffs.iter().map(|c| -c).collect();
        row.push(-piece.s_coeff.clone());
        row.push(int(1));
        row.push(int(-1));
        lp.constrain(row, Relation::Ge, &piece.s_coeff * &feas.s_lower + &piece.constant);
    }
    let sol = match lp.solve() {
        LpOutcome::Optimal(sol) => sol,
        other => return Err(Error::Solver(format!("epigraph LP ended as {other:?}"))),
    };
    let point = Point::new(sol.x[..d].to_vec(), &feas.s_lower + &sol.x[u]);
    let theta = sol.value;
    if obj.eval(&point) != theta {
        return Err(Error::Solver("LP optimum does not match the objective at the argmin".into()));
    }
    let unique = uniqueness_check(obj, feas, &point)?;
    Ok(ExponentResult {
        active_pieces: obj.active(&point),
        compact: Compactness::of_theta(&theta),
        argmin: point,
        unique,
        theta,
    })
}

/// Whether `point`, a minimiser of `obj` over `feas`, is the only one.
///
/// The set of minimisers is a polytope containing `point`. It is a single
/// point exactly when no feasible direction `v != 0` keeps every active piece
/// from increasing, i.e. when the cone
/// `{v : v tangent to feas at point, ∇piece·v <= 0 for active pieces}`
/// is `{0}`. That is decided by maximising `±v_j` over the cone cut to a box.
pub fn uniqueness_check(obj: &PiecewiseMax, feas: &FeasibleSet, point: &Point) -> Result<bool> {
    if !feas.contains(point) {
        return Err(Error::Domain(format!("{point} is not feasible")));
    }
    let d = obj.dim;
    let top = obj.eval(point);
    let active: Vec<&AffinePiece> = obj.pieces.iter().filter(|p| p.eval(&point.alpha, &point.s) == top).collect();
    // variables: v+ (d + 1 entries, the last one for s), then v-
    let width = 2 * (d + 1);
    let split = |v: &[Rational]| -> Vec<Rational> {
        v.iter().cloned().chain(v.iter().map(|x| -x)).collect()
    };
    let mut base = LinearProgram::minimize(vec![int(0); width]);
    let mut row = vec![int(1); d + 1];
    row[d] = int(-1);
    base.constrain(split(&row), Relation::Eq, int(0));
    let e = |k: usize| {
        let mut v = vec![int(0); d + 1];
        v[k] = int(1);
        v
    };
    for (j, a) in point.alpha.iter().enumerate() {
        if a.is_zero() {
            base.constrain(split(&e(j)), Relation::Ge, int(0));
        }
    }
    if point.s == feas.s_lower {
        base.constrain(split(&e(d)), Relation::Ge, int(0));
    }
    if point.s == feas.s_upper {
        base.constrain(split(&e(d)), Relation::Le, int(0));
    }
    for p in active {
        let mut g = p.coeffs.clone();
        g.push(p.s_coeff.clone());
        base.constrain(split(&g), Relation::Le, int(0));
    }
    for k in 0..width {
        let mut v = vec![int(0); width];
        v[k] = int(1);
        base.constrain(v, Relation::Le, int(1));
    }
    // v_s = Σ v_α, so checking the α directions is enough
    for j in 0..d {
        for sign in [1, -1] {
            let mut target = vec![int(0); d + 1];
            target[j] = int(sign);
            match base.clone().with_max_objective(split(&target)).solve() {
                LpOutcome::Optimal(sol) if sol.value.is_negative() => return Ok(false),
                LpOutcome::Optimal(_) => {}
                other => return Err(Error::Solver(format!("direction LP ended as {other:?}"))),
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::rat;

    fn spec(p: &[Rational], r: &[Rational], q: Rational) -> ProblemSpec {
        ProblemSpec::new(p.to_vec(), r.to_vec(), q).unwrap()
    }

    #[test]
    fn symmetric_small_q() {
        let res = analyze(&spec(&[int(3), int(3)], &[int(1), int(1)], int(2))).unwrap();
        assert_eq!(res.theta, rat(1, 2));
        assert_eq!(res.argmin.alpha, vec![rat(1, 2), rat(1, 2)]);
        assert!(res.unique);
        assert_eq!(res.compact, Compactness::Compact);
    }

    #[test]
    fn below_q() {
        let res = analyze(&spec(&[rat(3, 2), rat(3, 2)], &[int(1), int(1)], int(2))).unwrap();
        assert_eq!(res.theta, rat(1, 3));
        assert!(res.unique);
    }

    #[test]
    fn large_q_minimum_sits_on_the_bottom_face() {
        let res = analyze(&spec(&[int(3), int(3)], &[int(1), int(1)], int(4))).unwrap();
        assert_eq!(res.theta, rat(1, 2));
        assert_eq!(res.argmin.s, int(1));
        assert!(res.unique);
    }

    #[test]
    fn flat_objective_is_not_unique() {
        let obj = PiecewiseMax {
            pieces: vec![AffinePiece {
                coeffs: vec![int(0), int(0)],
                s_coeff: int(0),
                constant: int(1),
                tag: PieceTag::single(Family::H1, 0),
            }],
            dim: 2,
            has_s: false,
        };
        let res = minimize(&obj, &FeasibleSet::simplex(2)).unwrap();
        assert_eq!(res.theta, int(1));
        assert!(!res.unique);
    }

    #[test]
    fn edge_of_minimisers_is_detected() {
        // max(α1, 1/2) on the simplex: minimisers are α1 in [0, 1/2]
        let mk = |c: Vec<Rational>, k: Rational| AffinePiece {
            coeffs: c,
            s_coeff: int(0),
            constant: k,
            tag: PieceTag::single(Family::H1, 0),
        };
        let obj = PiecewiseMax {
            pieces: vec![mk(vec![int(1), int(0)], int(0)), mk(vec![int(0), int(0)], rat(1, 2))],
            dim: 2,
            has_s: false,
        };
        let res = minimize(&obj, &FeasibleSet::simplex(2)).unwrap();
        assert_eq!(res.theta, rat(1, 2));
        assert!(!res.unique);
        assert!(!uniqueness_check(&obj, &FeasibleSet::simplex(2), &Point::on_simplex(vec![rat(1, 2), rat(1, 2)])).unwrap());
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let obj = build_objective(&spec(&[int(3), int(3)], &[int(1), int(1)], int(2)));
        assert!(minimize(&obj, &FeasibleSet::simplex(3)).is_err());
    }
}
