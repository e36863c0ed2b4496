//! Candidate minimisers for `q > 2` and the inequality systems that say which
//! piece of `h̃` attains the maximum at a point.

use num_traits::Zero;

use crate::closedform::check_dop_usl;

use super::{Family, FeasibleSet, PieceTag, Point};
use crate::error::{Error, Result};
use crate::params::{half, int, IndexPartition, ProblemSpec, Rational};

fn large_q(spec: &ProblemSpec) -> Result<()> {
    if spec.small_q() {
        return Err(Error::Domain("needs q > 2".into()));
    }
    Ok(())
}

/// The four points `ξ¹..ξ⁴` among which the minimum of `h̃` lies:
/// `α¹_j ∝ 1/r_j`, `α²` equalises `r_jα_j - 1/p_j`, `α³ = (q/2)α²`,
/// `α⁴ = (q/2)α¹`, with `s = 1` for the first two and `s = q/2` for the rest.
pub fn candidate_vertices(spec: &ProblemSpec) -> Result<[Point; 4]> {
    large_q(spec)?;
    if !check_dop_usl(spec) {
        return Err(Error::Domain("candidate vertices need Σ_i (1/r_i)(1/p_i - 1/p_j) < 1 for all j".into()));
    }
    let (p, r) = (spec.p(), spec.r());
    let inv_r_sum: Rational = r.iter().map(|x| x.recip()).sum();
    let a1: Vec<Rational> = r.iter().map(|rj| rj.recip() / &inv_r_sum).collect();
    let a2: Vec<Rational> = (0..spec.dim())
        .map(|j| {
            let s: Rational = (0..spec.dim()).map(|i| r[i].recip() * (p[i].recip() - p[j].recip())).sum();
            (int(1) - s) / (&r[j] * &inv_r_sum)
        })
        .collect();
    let top = spec.q() / int(2);
    let scale = |a: &[Rational]| a.iter().map(|x| x * &top).collect::<Vec<_>>();
    Ok([
        Point::new(a1.clone(), int(1)),
        Point::new(a2.clone(), int(1)),
        Point::new(scale(&a2), top.clone()),
        Point::new(scale(&a1), top.clone()),
    ])
}

struct Sets {
    i: Vec<usize>,
    j: Vec<usize>,
    k: Vec<usize>,
}

fn generic_sets(spec: &ProblemSpec) -> Result<Sets> {
    large_q(spec)?;
    let two = int(2);
    if spec.p().iter().any(|x| *x == two || x == spec.q()) {
        return Err(Error::Domain("region systems need every p_j different from 2 and q".into()));
    }
    match spec.partition() {
        IndexPartition::LargeQ { i, j, k, .. } => Ok(Sets { i, j, k }),
        IndexPartition::SmallQ { .. } => unreachable!(),
    }
}

/// Every piece of `h̃` whose inequality system holds at `point`. The systems
/// are phrased through slopes between the points `(1/p_k, r_k α_k)` and hold
/// exactly when the piece attains the maximum.
pub fn region_systems(spec: &ProblemSpec, point: &Point) -> Result<Vec<PieceTag>> {
    let sets = generic_sets(spec)?;
    if !FeasibleSet::for_spec(spec).contains(point) {
        return Err(Error::Domain(format!("{point} is not feasible")));
    }
    let a: Vec<Rational> = point.alpha.iter().zip(spec.r()).map(|(x, r)| x * r).collect();
    let x: Vec<Rational> = spec.p().iter().map(|p| p.recip()).collect();
    let s = &point.s;
    let sigma = s - int(1);
    let gap2 = (half() - spec.q().recip()) * int(2);
    // (x_a - x_b)(s - 1) / (2(1/2 - 1/q))
    let drift = |u: usize, v: usize| (&x[u] - &x[v]) * &sigma / &gap2;
    let slope = |u: usize, v: usize| (&a[u] - &a[v]) / (&x[u] - &x[v]);
    let all = 0..spec.dim();
    let jk: Vec<usize> = sets.j.iter().chain(&sets.k).copied().collect();
    let ij: Vec<usize> = sets.i.iter().chain(&sets.j).copied().collect();

    let mut out = Vec::new();
    for &j in &sets.i {
        if all.clone().all(|i| a[j] >= a[i]) {
            out.push(PieceTag::single(Family::Tilde1, j));
        }
    }
    for &j in &sets.j {
        if all.clone().all(|i| &a[j] - &a[i] >= drift(j, i)) {
            out.push(PieceTag::single(Family::Tilde2, j));
        }
    }
    for &j in &sets.k {
        if all.clone().all(|i| &a[j] - &a[i] >= s * (&x[j] - &x[i])) {
            out.push(PieceTag::single(Family::Tilde3, j));
        }
    }
    for &i in &sets.i {
        for &j in &jk {
            let d = &a[i] - &a[j];
            let ok = d <= Rational::zero()
                && d >= drift(i, j)
                && jk.iter().all(|&k| k == i || slope(i, j) >= slope(i, k))
                && sets.i.iter().all(|&k| k == j || slope(i, j) <= slope(k, j));
            if ok {
                out.push(PieceTag::pair(Family::Tilde4, i, j));
            }
        }
    }
    for &i in &ij {
        for &j in &sets.k {
            let d = &a[i] - &a[j];
            let ok = d <= drift(i, j)
                && d >= s * (&x[i] - &x[j])
                && sets.k.iter().all(|&k| k == i || slope(i, j) >= slope(i, k))
                && ij.iter().all(|&k| k == j || slope(i, j) <= slope(k, j));
            if ok {
                out.push(PieceTag::pair(Family::Tilde5, i, j));
            }
        }
    }
    Ok(out)
}

/// The first piece, in construction order, whose inequality system holds at `point`.
pub fn classify_region(spec: &ProblemSpec, point: &Point) -> Result<PieceTag> {
    region_systems(spec, point)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Domain(format!("no region contains {point}")))
}

/// Same answer, obtained by evaluating every piece.
#[cfg(test)]
pub(crate) fn attaining_pieces(spec: &ProblemSpec, point: &Point) -> Vec<PieceTag> {
    super::build_objective(spec).active(point)
}
