//! Two-phase dense tableau simplex over exact rationals, Bland's pivoting rule.
//!
//! Problems here have a handful of variables and a few dozen rows, so a dense
//! tableau is the simplest thing that works. Bland's rule rules out cycling,
//! which matters because the epigraph LPs are highly degenerate.

use num_traits::{Signed, Zero};

use crate::params::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

/// Minimise `c·x` over `x >= 0` subject to the rows.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<Rational>,
    rows: Vec<(Vec<Rational>, Relation, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn minimize(objective: Vec<Rational>) -> Self {
        LinearProgram { num_vars: objective.len(), objective, rows: Vec::new() }
    }

    pub fn maximize(objective: Vec<Rational>) -> Self {
        Self::minimize(objective.into_iter().map(|c| -c).collect())
    }

    /// Same constraints, new objective to maximise.
    pub fn with_max_objective(mut self, objective: Vec<Rational>) -> Self {
        assert_eq!(objective.len(), self.num_vars, "objective width");
        self.objective = objective.into_iter().map(|c| -c).collect();
        self
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constrain(&mut self, coeffs: Vec<Rational>, rel: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    /// `m` rows of `cols + 1` entries; the last entry is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    n: usize,
    cols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let rows: Vec<_> = lp
            .rows
            .iter()
            .map(|(a, rel, b)| {
                if b.is_negative() {
                    (a.iter().map(|x| -x).collect::<Vec<_>>(), rel.flipped(), -b)
                } else {
                    (a.clone(), *rel, b.clone())
                }
            })
            .collect();
        let slacks = rows.iter().filter(|(_, rel, _)| *rel != Relation::Eq).count();
        let artificials = rows.iter().filter(|(_, rel, _)| *rel != Relation::Le).count();
        let first_artificial = n + slacks;
        let cols = first_artificial + artificials;
        let mut t = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let (mut s, mut a) = (n, first_artificial);
        for (coeffs, rel, rhs) in rows {
            let mut row = vec![Rational::zero(); cols + 1];
            row[..n].clone_from_slice(&coeffs);
            row[cols] = rhs;
            match rel {
                Relation::Le => {
                    row[s] = Rational::from_integer(1.into());
                    basis.push(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = Rational::from_integer((-1).into());
                    row[a] = Rational::from_integer(1.into());
                    basis.push(a);
                    s += 1;
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = Rational::from_integer(1.into());
                    basis.push(a);
                    a += 1;
                }
            }
            t.push(row);
        }
        Tableau { t, basis, n, cols, first_artificial }
    }

    fn run(mut self, objective: &[Rational]) -> LpOutcome {
        if self.first_artificial < self.cols {
            let mut phase1 = vec![Rational::zero(); self.cols];
            for c in &mut phase1[self.first_artificial..] {
                *c = Rational::from_integer(1.into());
            }
            if self.optimize(&phase1, self.cols).is_err() {
                unreachable!("phase one is bounded below by zero");
            }
            if self.value(&phase1).is_positive() {
                return LpOutcome::Infeasible;
            }
            self.expel_artificials();
        }
        let mut cost = vec![Rational::zero(); self.cols];
        cost[..self.n].clone_from_slice(objective);
        if self.optimize(&cost, self.first_artificial).is_err() {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.t[i][self.cols].clone();
            }
        }
        LpOutcome::Optimal(LpSolution { value: self.value(&cost), x })
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().enumerate().map(|(i, &b)| &cost[b] * &self.t[i][self.cols]).sum()
    }

    /// Pivot until optimal; only columns below `allowed` may enter.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> Result<(), ()> {
        loop {
            let entering = (0..allowed).find(|&j| !self.basis.contains(&j) && self.reduced_cost(cost, j).is_negative());
            let Some(j) = entering else { return Ok(()) };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[i][self.cols] / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((i, _)) = leave else { return Err(()) };
            self.pivot(i, j);
        }
    }

    fn reduced_cost(&self, cost: &[Rational], j: usize) -> Rational {
        let mut z = cost[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.t[i][j].is_zero() {
                z -= &cost[b] * &self.t[i][j];
            }
        }
        z
    }

    fn pivot(&mut self, i: usize, j: usize) {
        let p = self.t[i][j].clone();
        for x in self.t[i].iter_mut() {
            if !x.is_zero() {
                *x /= &p;
            }
        }
        let pivot_row = self.t[i].clone();
        for (k, row) in self.t.iter_mut().enumerate() {
            if k == i || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[i] = j;
    }

    /// After a successful phase one, artificials still in the basis sit at zero.
    /// Swap them out, or drop their row when it is a linear combination of others.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.t.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| !self.t[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.t.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn textbook_example() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::maximize(vec![int(3), int(5)]);
        lp.constrain(vec![int(1), int(0)], Relation::Le, int(4));
        lp.constrain(vec![int(0), int(2)], Relation::Le, int(12));
        lp.constrain(vec![int(3), int(2)], Relation::Le, int(18));
        let LpOutcome::Optimal(sol) = lp.solve() else { panic!() };
        assert_eq!(sol.value, int(-36));
        assert_eq!(sol.x, vec![int(2), int(6)]);
    }

    #[test]
    fn equality_and_infeasibility() {
        let mut lp = LinearProgram::minimize(vec![int(1), int(2)]);
        lp.constrain(vec![int(1), int(1)], Relation::Eq, int(1));
        lp.constrain(vec![int(1), int(-1)], Relation::Ge, rat(-1, 2));
        let LpOutcome::Optimal(sol) = lp.solve() else { panic!() };
        assert_eq!(sol.value, int(1));
        lp.constrain(vec![int(1), int(0)], Relation::Ge, int(2));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::minimize(vec![int(-1), int(0)]);
        lp.constrain(vec![int(1), int(-1)], Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::minimize(vec![int(1), int(1), int(0)]);
        lp.constrain(vec![int(1), int(1), int(1)], Relation::Eq, int(2));
        lp.constrain(vec![int(2), int(2), int(2)], Relation::Eq, int(4));
        let LpOutcome::Optimal(sol) = lp.solve() else { panic!() };
        assert_eq!(sol.value, int(0));
        assert_eq!(sol.x, vec![int(0), int(0), int(2)]);
    }

    /// Brute force: every basis of the equality form, keep the best feasible one.
    fn brute_force(lp: &LinearProgram) -> Option<Rational> {
        let m = lp.rows.len();
        let n = lp.num_vars + m;
        let mut a = vec![vec![Rational::zero(); n]; m];
        let mut b = vec![Rational::zero(); m];
        let mut c = vec![Rational::zero(); n];
        c[..lp.num_vars].clone_from_slice(&lp.objective);
        for (i, (row, rel, rhs)) in lp.rows.iter().enumerate() {
            a[i][..lp.num_vars].clone_from_slice(row);
            a[i][lp.num_vars + i] = match rel {
                Relation::Le => int(1),
                Relation::Ge => int(-1),
                Relation::Eq => int(0),
            };
            b[i] = rhs.clone();
        }
        let mut best: Option<Rational> = None;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let cols: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
            let Some(xb) = solve_square(&a, &b, &cols) else { continue };
            if xb.iter().any(|x| x.is_negative()) {
                continue;
            }
            let v: Rational = cols.iter().zip(&xb).map(|(&j, x)| &c[j] * x).sum();
            if best.as_ref().map_or(true, |bv| v < *bv) {
                best = Some(v);
            }
        }
        best
    }

    fn solve_square(a: &[Vec<Rational>], b: &[Rational], cols: &[usize]) -> Option<Vec<Rational>> {
        let m = b.len();
        let mut mat: Vec<Vec<Rational>> =
            (0..m).map(|i| cols.iter().map(|&j| a[i][j].clone()).chain([b[i].clone()]).collect()).collect();
        for col in 0..m {
            let piv = (col..m).find(|&r| !mat[r][col].is_zero())?;
            mat.swap(col, piv);
            let p = mat[col][col].clone();
            for x in mat[col].iter_mut() {
                *x /= &p;
            }
            for r in 0..m {
                if r != col && !mat[r][col].is_zero() {
                    let f = mat[r][col].clone();
                    let pr = mat[col].clone();
                    for (x, y) in mat[r].iter_mut().zip(&pr) {
                        *x -= &f * y;
                    }
                }
            }
        }
        Some(mat.into_iter().map(|row| row[m].clone()).collect())
    }

    fn small() -> impl Strategy<Value = Rational> {
        (-4i64..=4, 1i64..=3).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn agrees_with_vertex_enumeration(
            c in prop::collection::vec(small(), 3),
            rows in prop::collection::vec((prop::collection::vec(small(), 3), 0u8..3, small()), 1..4),
        ) {
            let mut lp = LinearProgram::minimize(c);
            for (coeffs, rel, rhs) in rows {
                let rel = [Relation::Le, Relation::Ge, Relation::Eq][rel as usize];
                lp.constrain(coeffs, rel, rhs);
            }
            // a box keeps the problem bounded so vertex enumeration is conclusive
            for j in 0..3 {
                let mut e = vec![int(0); 3];
                e[j] = int(1);
                lp.constrain(e, Relation::Le, int(5));
            }
            match (lp.solve(), brute_force(&lp)) {
                (LpOutcome::Optimal(sol), Some(v)) => {
                    prop_assert_eq!(&sol.value, &v);
                    for (row, rel, rhs) in &lp.rows {
                        let lhs: Rational = row.iter().zip(&sol.x).map(|(a, x)| a * x).sum();
                        let ok = match rel {
                            Relation::Le => lhs <= *rhs,
                            Relation::Ge => lhs >= *rhs,
                            Relation::Eq => lhs == *rhs,
                        };
                        prop_assert!(ok);
                    }
                }
                (LpOutcome::Infeasible, None) => {}
                (got, want) => prop_assert!(false, "simplex {:?} vs brute force {:?}", got, want),
            }
        }
    }
}
