//! Explicit formulas for the exponent and the screens that decide when they apply.

use std::fmt;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::format::{ser_opt_rational, ser_rational};
use crate::params::{half, int, interpolation_weight, ProblemSpec, Rational};

/// Which explicit formula produced the exponent, or why none did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeCase {
    /// every `p_j >= q`
    T1_1,
    /// `q <= 2`, every `p_j <= q`
    T1_2a,
    /// `q <= 2`, mixed
    T1_2b,
    /// `q > 2`, every `p_j <= 2`
    T1_3a,
    /// `q > 2`, every `p_j >= 2`, some `p_j < q`
    T1_3b,
    /// `q > 2`, exponents on both sides of 2
    T1_3c,
    /// `d = 2`, `q <= 2`, one smoothness too small for the sum condition
    T4_1,
    /// the same with `q > 2 <= p_2`
    T4_2a,
    /// the same with `p_2 < 2 < q`
    T4_2b,
    /// every `p_j <= q` and the sum condition fails: no compact embedding
    T3NonCompact,
    /// the embedding margin is not positive
    NotCompact,
    Uncovered,
}

impl RegimeCase {
    pub fn label(self) -> &'static str {
        match self {
            RegimeCase::T1_1 => "T1.1",
            RegimeCase::T1_2a => "T1.2a",
            RegimeCase::T1_2b => "T1.2b",
            RegimeCase::T1_3a => "T1.3a",
            RegimeCase::T1_3b => "T1.3b",
            RegimeCase::T1_3c => "T1.3c",
            RegimeCase::T4_1 => "T4.1",
            RegimeCase::T4_2a => "T4.2a",
            RegimeCase::T4_2b => "T4.2b",
            RegimeCase::T3NonCompact => "T3-noncompact",
            RegimeCase::NotCompact => "noncompact",
            RegimeCase::Uncovered => "uncovered",
        }
    }

    pub const COVERED: [RegimeCase; 9] = [
        RegimeCase::T1_1,
        RegimeCase::T1_2a,
        RegimeCase::T1_2b,
        RegimeCase::T1_3a,
        RegimeCase::T1_3b,
        RegimeCase::T1_3c,
        RegimeCase::T4_1,
        RegimeCase::T4_2a,
        RegimeCase::T4_2b,
    ];
}

impl fmt::Display for RegimeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for RegimeCase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedValue {
    pub name: &'static str,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
}

fn named(name: &'static str, value: Rational) -> NamedValue {
    NamedValue { name, value }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegimeReport {
    pub bounded: bool,
    pub compact: bool,
    pub dop_usl_holds: bool,
    pub theorem_case: RegimeCase,
    /// The candidate values whose minimum is the exponent.
    pub thetas: Vec<NamedValue>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub exponent: Option<Rational>,
    /// A formula was excluded only because two candidates coincide.
    pub tie: bool,
    pub notes: Vec<String>,
}

impl RegimeReport {
    fn screened(spec: &ProblemSpec) -> Self {
        let margin = embedding_margin(spec);
        RegimeReport {
            bounded: !margin.is_negative(),
            compact: margin.is_positive(),
            dop_usl_holds: check_dop_usl(spec),
            theorem_case: RegimeCase::Uncovered,
            thetas: Vec::new(),
            exponent: None,
            tie: false,
            notes: Vec::new(),
        }
    }

    pub fn theta(&self, name: &str) -> Option<&Rational> {
        self.thetas.iter().find(|t| t.name == name).map(|t| &t.value)
    }

    fn settle(mut self, case: RegimeCase, thetas: Vec<NamedValue>, pick: Pick) -> Self {
        let values: Vec<&Rational> = thetas.iter().map(|t| &t.value).collect();
        let min = values.iter().copied().min().cloned();
        let ok = match pick {
            Pick::Only => true,
            Pick::Strict => min.as_ref().is_some_and(|m| values.iter().filter(|v| **v == m).count() == 1),
        };
        self.thetas = thetas;
        if ok {
            self.theorem_case = case;
            self.exponent = min;
        } else {
            self.tie = true;
            self.notes.push(format!("{case} excluded: the smallest candidates coincide"));
        }
        self
    }
}

enum Pick {
    Only,
    Strict,
}

/// `<r>/d + 1/q - <r>/<p∘r>`. Its sign decides boundedness and compactness
/// of the embedding into `L_q`.
pub fn embedding_margin(spec: &ProblemSpec) -> Rational {
    spec.mean_r_over_d() + spec.q().recip() - spec.mean_ratio()
}

pub fn check_bounded(spec: &ProblemSpec) -> bool {
    !embedding_margin(spec).is_negative()
}

pub fn check_compact(spec: &ProblemSpec) -> bool {
    embedding_margin(spec).is_positive()
}

/// `Σ_i (1/r_i)(1/p_i - 1/p_j)` for each `j`.
pub fn dop_usl_sums(spec: &ProblemSpec) -> Vec<Rational> {
    let (p, r) = (spec.p(), spec.r());
    (0..spec.dim())
        .map(|j| (0..spec.dim()).map(|i| r[i].recip() * (p[i].recip() - p[j].recip())).sum())
        .collect()
}

/// Every sum `Σ_i (1/r_i)(1/p_i - 1/p_j)` is below 1.
pub fn check_dop_usl(spec: &ProblemSpec) -> bool {
    dop_usl_sums(spec).iter().all(|s| *s < Rational::one())
}

/// `None` unless every `p_k <= q`; then whether some sum reaches 1, which
/// rules out a compact embedding.
pub fn check_noncompact_t3(spec: &ProblemSpec) -> Option<bool> {
    if spec.p().iter().any(|p| p > spec.q()) {
        return None;
    }
    Some(dop_usl_sums(spec).iter().any(|s| *s >= Rational::one()))
}

/// `θ1 = <r>/d`, `θ2 = <r>/d + 1/2 - <r>/<p∘r>`, `θ3 = (q/2)(<r>/d + 1/q - <r>/<p∘r>)`.
pub fn large_q_thetas(spec: &ProblemSpec) -> [Rational; 3] {
    let t1 = spec.mean_r_over_d();
    let t2 = &t1 + half() - spec.mean_ratio();
    let t3 = spec.q() / int(2) * embedding_margin(spec);
    [t1, t2, t3]
}

/// The explicit formula for compact embeddings under the sum condition.
pub fn theorem1_exponent(spec: &ProblemSpec) -> RegimeReport {
    let mut rep = RegimeReport::screened(spec);
    let q = spec.q();
    let t1 = spec.mean_r_over_d();
    if !rep.compact {
        rep.notes.push("the embedding margin is not positive".into());
        return rep;
    }
    if spec.p().iter().all(|p| p >= q) {
        return rep.settle(RegimeCase::T1_1, vec![named("theta1", t1)], Pick::Only);
    }
    if !rep.dop_usl_holds {
        rep.notes.push("the sum condition fails".into());
        return rep;
    }
    if spec.small_q() {
        let tq = embedding_margin(spec);
        if spec.p().iter().all(|p| p <= q) {
            return rep.settle(RegimeCase::T1_2a, vec![named("theta_q", tq)], Pick::Only);
        }
        return rep.settle(RegimeCase::T1_2b, vec![named("theta1", t1), named("theta_q", tq)], Pick::Strict);
    }
    let [t1, t2, t3] = large_q_thetas(spec);
    let two = int(2);
    if spec.p().iter().all(|p| *p <= two) {
        rep.settle(RegimeCase::T1_3a, vec![named("theta2", t2), named("theta3", t3)], Pick::Strict)
    } else if spec.p().iter().all(|p| *p >= two) {
        rep.settle(RegimeCase::T1_3b, vec![named("theta1", t1), named("theta3", t3)], Pick::Strict)
    } else {
        let thetas = vec![named("theta1", t1), named("theta2", t2), named("theta3", t3)];
        rep.settle(RegimeCase::T1_3c, thetas, Pick::Strict)
    }
}

/// Two variables with `1 < p_2 < q < p_1` and `r_2 <= 1/p_2 - 1/p_1`, where
/// the sum condition fails. The coordinates may come in either order.
/// `None` when the hypotheses do not hold.
pub fn theorem4_exponent(spec: &ProblemSpec) -> Option<RegimeReport> {
    if spec.dim() != 2 {
        return None;
    }
    let (p, r, q) = (spec.p(), spec.r(), spec.q());
    let (hi, lo) = if p[0] > p[1] { (0, 1) } else { (1, 0) };
    let (p1, p2, r2) = (&p[hi], &p[lo], &r[lo]);
    let spread = p2.recip() - p1.recip();
    if !(p2 < q && q < p1) || *r2 > spread {
        return None;
    }
    let rep = RegimeReport::screened(spec);
    let t1 = spec.mean_r_over_d();
    let lambda = interpolation_weight(&q.recip(), &p1.recip(), &p2.recip()).expect("p_1 > p_2");
    let mut rep = if spec.small_q() {
        rep.settle(RegimeCase::T4_1, vec![named("theta1", t1), named("lambda_r2", &lambda * r2)], Pick::Strict)
    } else {
        let s_hat = (int(1) - r2 * (int(1) - int(2) / q) / &spread).recip();
        let t2 = &s_hat * &lambda * r2;
        if *p2 >= int(2) {
            rep.settle(RegimeCase::T4_2a, vec![named("theta1", t1), named("s_hat_lambda_r2", t2)], Pick::Strict)
        } else {
            let mu = interpolation_weight(&half(), &p1.recip(), &p2.recip()).expect("p_1 > p_2");
            let thetas = vec![named("theta1", t1), named("s_hat_lambda_r2", t2), named("mu_r2", mu * r2)];
            rep.settle(RegimeCase::T4_2b, thetas, Pick::Strict)
        }
    };
    if rep.exponent.as_ref().is_some_and(|e| e.is_positive()) && !rep.compact {
        rep.notes.push(
            "the embedding margin is not positive although the explicit formula gives a positive exponent; \
             a coordinate with p_j > q already bounds the class in L_q"
                .into(),
        );
    }
    Some(rep)
}

/// Run the screens in order: non-compactness under `p <= q`, the two
/// variable formula, the embedding margin, then the general formula.
pub fn classify(spec: &ProblemSpec) -> RegimeReport {
    if check_noncompact_t3(spec) == Some(true) {
        let mut rep = RegimeReport::screened(spec);
        if rep.compact {
            rep.notes.push("the embedding margin is positive, which contradicts the sum screen".into());
        }
        rep.compact = false;
        rep.theorem_case = RegimeCase::T3NonCompact;
        return rep;
    }
    if let Some(rep) = theorem4_exponent(spec) {
        return rep;
    }
    let rep = theorem1_exponent(spec);
    if !rep.compact {
        let mut rep = RegimeReport::screened(spec);
        rep.theorem_case = RegimeCase::NotCompact;
        return rep;
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::rat;

    fn spec(p: &[Rational], r: &[Rational], q: Rational) -> ProblemSpec {
        ProblemSpec::new(p.to_vec(), r.to_vec(), q).unwrap()
    }

    #[test]
    fn all_above_q() {
        let rep = classify(&spec(&[int(3), int(3)], &[int(1), int(1)], int(2)));
        assert_eq!(rep.theorem_case, RegimeCase::T1_1);
        assert_eq!(rep.exponent, Some(rat(1, 2)));
    }

    #[test]
    fn all_below_q() {
        let rep = classify(&spec(&[rat(3, 2), rat(3, 2)], &[int(1), int(1)], int(2)));
        assert_eq!(rep.theorem_case, RegimeCase::T1_2a);
        assert_eq!(rep.exponent, Some(rat(1, 3)));
    }

    #[test]
    fn large_q_candidates() {
        let s = spec(&[int(3), int(3)], &[int(1), int(1)], int(4));
        assert_eq!(large_q_thetas(&s), [rat(1, 2), rat(2, 3), rat(5, 6)]);
        let rep = classify(&s);
        assert_eq!(rep.theorem_case, RegimeCase::T1_3b);
        assert_eq!(rep.exponent, Some(rat(1, 2)));
    }

    #[test]
    fn two_variable_formula() {
        let rep = classify(&spec(&[int(4), rat(4, 3)], &[int(1), rat(1, 2)], int(2)));
        assert_eq!(rep.theorem_case, RegimeCase::T4_1);
        assert_eq!(rep.exponent, Some(rat(1, 4)));
        let rep = classify(&spec(&[int(8), rat(8, 5)], &[int(1), rat(1, 4)], int(2)));
        assert_eq!(rep.exponent, Some(rat(3, 16)));
        // order of the coordinates does not matter
        let rep = classify(&spec(&[rat(8, 5), int(8)], &[rat(1, 4), int(1)], int(2)));
        assert_eq!(rep.exponent, Some(rat(3, 16)));
    }

    #[test]
    fn sum_screen_forces_noncompactness() {
        let s = spec(&[int(2), rat(4, 3)], &[int(1), rat(1, 4)], int(2));
        assert_eq!(check_noncompact_t3(&s), Some(true));
        assert_eq!(embedding_margin(&s), int(0));
        let rep = classify(&s);
        assert_eq!(rep.theorem_case, RegimeCase::T3NonCompact);
        assert!(!rep.compact && rep.bounded);
        assert!(check_noncompact_t3(&spec(&[int(3), int(2)], &[int(1), int(1)], int(2))).is_none());
    }

    #[test]
    fn ties_are_reported() {
        // mixed q <= 2 with <r>/<p∘r> = 1/q: p = (3, 3/2), r = (1, 1), q = 2
        let s = spec(&[int(3), rat(3, 2)], &[int(1), int(1)], int(2));
        assert_eq!(s.mean_ratio(), rat(1, 2));
        let rep = theorem1_exponent(&s);
        assert!(rep.tie);
        assert_eq!(rep.theorem_case, RegimeCase::Uncovered);
        assert_eq!(rep.exponent, None);
    }

    #[test]
    fn margin_and_sums() {
        let s = spec(&[int(4), rat(4, 3)], &[int(1), rat(1, 2)], int(2));
        assert_eq!(embedding_margin(&s), rat(1, 3) + rat(1, 2) - (rat(1, 4) + rat(3, 2)) / int(3));
        assert_eq!(dop_usl_sums(&s), vec![int(1) * (rat(1, 4) - rat(1, 4)) + int(2) * (rat(3, 4) - rat(1, 4)), rat(-1, 2)]);
        assert!(!check_dop_usl(&s));
    }
}
