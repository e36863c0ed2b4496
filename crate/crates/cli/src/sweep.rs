use rayon::prelude::*;
use serde::Serialize;
use widthcalc::closedform::classify;
use widthcalc::exponent::analyze;
use widthcalc::finitedim::{dyadic_block_order, DyadicBlock};
use widthcalc::format::decimal;
use widthcalc::params::{int, parse_rational, parse_rational_list};
use widthcalc::{ProblemSpec, Rational};

use crate::args::{Format, SweepArgs};
use crate::commands::{exponent_status, json, parse_spec, Outcome};
use crate::error::{CliError, EXIT_OK};

#[cfg(test)]
const CSV_HEADER: &str = "varying,value,theta_num,theta_den,theta_decimal,regime,unique,compact,status";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Varying {
    Q,
    P(usize),
    R(usize),
    NBudget,
}

impl Varying {
    fn parse(s: &str, d: usize) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("cannot vary {s:?}: expected q, p_j, r_j or n-budget"));
        let index = |rest: &str| -> Result<usize, CliError> {
            let j: usize = rest.trim_start_matches('_').parse().map_err(|_| bad())?;
            if j == 0 || j > d {
                return Err(CliError::Usage(format!("index {j} in {s:?} is outside 1..={d}")));
            }
            Ok(j - 1)
        };
        match s {
            "q" => Ok(Varying::Q),
            "n-budget" | "n" => Ok(Varying::NBudget),
            _ if s.starts_with('p') => Ok(Varying::P(index(&s[1..])?)),
            _ if s.starts_with('r') => Ok(Varying::R(index(&s[1..])?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub name: String,
    pub varying: Varying,
    pub from: Rational,
    pub to: Rational,
    pub steps: usize,
    pub base: ProblemSpec,
    pub block: Option<DyadicBlock>,
}

impl SweepPlan {
    pub fn from_args(a: &SweepArgs) -> Result<Self, CliError> {
        let base = parse_spec(&a.spec)?;
        let name = a.varying.clone().ok_or_else(|| CliError::Usage("missing --varying".into()))?;
        let varying = Varying::parse(&name, base.dim())?;
        let from = parse_rational(a.from.as_deref().ok_or_else(|| CliError::Usage("missing --from".into()))?)?;
        let to = parse_rational(a.to.as_deref().ok_or_else(|| CliError::Usage("missing --to".into()))?)?;
        let steps = a.steps.ok_or_else(|| CliError::Usage("missing --steps".into()))?;
        if steps == 0 {
            return Err(CliError::Usage("--steps must be at least 1".into()));
        }
        if from >= to {
            return Err(CliError::Usage(format!("--from {from} must be below --to {to}")));
        }
        let block = match (&a.block, varying) {
            (Some(b), _) => {
                let m = parse_rational_list(b)?
                    .into_iter()
                    .map(|x| {
                        if x.is_integer() && x >= int(1) && x <= int(62) {
                            Ok(x.to_integer().try_into().expect("at most 62"))
                        } else {
                            Err(CliError::Usage(format!("block entry {x} must be an integer in 1..=62")))
                        }
                    })
                    .collect::<Result<Vec<u32>, _>>()?;
                Some(DyadicBlock::new(m)?)
            }
            (None, Varying::NBudget) => return Err(CliError::Usage("an n-budget sweep needs --block".into())),
            (None, _) => None,
        };
        Ok(SweepPlan { name, varying, from, to, steps, base, block })
    }

    /// `from + k (to - from) / (steps - 1)`; a single step sits at `from`.
    pub fn value(&self, k: usize) -> Rational {
        if self.steps == 1 {
            return self.from.clone();
        }
        &self.from + (&self.to - &self.from) * Rational::new((k as i64).into(), ((self.steps - 1) as i64).into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub varying: String,
    pub value: String,
    pub theta_num: String,
    pub theta_den: String,
    pub theta_decimal: String,
    pub regime: String,
    pub unique: String,
    pub compact: String,
    pub status: String,
}

impl Row {
    fn failed(plan: &SweepPlan, v: &Rational, reason: String) -> Self {
        Row {
            varying: plan.name.clone(),
            value: v.to_string(),
            theta_num: String::new(),
            theta_den: String::new(),
            theta_decimal: String::new(),
            regime: String::new(),
            unique: String::new(),
            compact: String::new(),
            status: format!("error: {reason}"),
        }
    }

    fn with_theta(plan: &SweepPlan, v: &Rational, theta: &Rational) -> Self {
        let mut row = Row::failed(plan, v, String::new());
        row.theta_num = theta.numer().to_string();
        row.theta_den = theta.denom().to_string();
        row.theta_decimal = decimal(theta);
        row
    }
}

fn spec_at(plan: &SweepPlan, v: &Rational) -> widthcalc::Result<ProblemSpec> {
    let (mut p, mut r, mut q) = (plan.base.p().to_vec(), plan.base.r().to_vec(), plan.base.q().clone());
    match plan.varying {
        Varying::Q => q = v.clone(),
        Varying::P(j) => p[j] = v.clone(),
        Varying::R(j) => r[j] = v.clone(),
        Varying::NBudget => {}
    }
    ProblemSpec::new(p, r, q)
}

fn exponent_row(plan: &SweepPlan, v: &Rational) -> Row {
    let spec = match spec_at(plan, v) {
        Ok(s) => s,
        Err(e) => return Row::failed(plan, v, e.to_string()),
    };
    let regime = classify(&spec);
    match analyze(&spec) {
        Ok(lp) => {
            let (status, _, _) = exponent_status(&regime, &lp);
            let mut row = Row::with_theta(plan, v, &lp.theta);
            row.regime = regime.theorem_case.to_string();
            row.unique = lp.unique.to_string();
            row.compact = regime.compact.to_string();
            row.status = status.to_string();
            row
        }
        Err(e) => Row::failed(plan, v, e.to_string()),
    }
}

/// `-log_n` of the block width at `n = 2^v`.
fn budget_row(plan: &SweepPlan, v: &Rational) -> Row {
    let block = plan.block.as_ref().expect("checked when the plan was built");
    if !v.is_integer() || *v < int(1) || *v > int(62) {
        return Row::failed(plan, v, "log2 n must be an integer in 1..=62".into());
    }
    let log_n: u32 = v.to_integer().try_into().expect("at most 62");
    let order = match dyadic_block_order(&plan.base, block, 1u64 << log_n) {
        Ok(o) => o,
        Err(e) => return Row::failed(plan, v, e.to_string()),
    };
    let Some(l) = order.value.log2_exact() else {
        return Row::failed(plan, v, format!("width {} is not a power of two", order.value));
    };
    let theta = -l / Rational::from_integer(log_n.into());
    let mut row = Row::with_theta(plan, v, &theta);
    row.regime = order.branch.label();
    row.status = "ok".into();
    row
}

pub fn rows(plan: &SweepPlan) -> Vec<Row> {
    // indexed parallel iteration keeps step order
    (0..plan.steps)
        .into_par_iter()
        .map(|k| {
            let v = plan.value(k);
            match plan.varying {
                Varying::NBudget => budget_row(plan, &v),
                _ => exponent_row(plan, &v),
            }
        })
        .collect()
}

pub fn run(a: &SweepArgs, format: Format) -> Result<Outcome, CliError> {
    let plan = SweepPlan::from_args(a)?;
    let rows = rows(&plan);
    let text = match format {
        Format::Json => json(&rows)?,
        Format::Text => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                w.serialize(row)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8")
        }
    };
    if let Some(path) = &a.output {
        std::fs::write(path, &text)?;
        return Ok(Outcome { text: String::new(), code: EXIT_OK });
    }
    Ok(Outcome { text, code: EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;
    use widthcalc::params::rat;

    fn plan(varying: Varying, from: Rational, to: Rational, steps: usize) -> SweepPlan {
        let base = ProblemSpec::new(vec![int(2), int(2)], vec![int(1), int(1)], int(2)).unwrap();
        SweepPlan { name: "q".into(), varying, from, to, steps, base, block: None }
    }

    #[test]
    fn step_values() {
        let p = plan(Varying::Q, rat(3, 2), int(3), 4);
        let v: Vec<Rational> = (0..4).map(|k| p.value(k)).collect();
        assert_eq!(v, vec![rat(3, 2), int(2), rat(5, 2), int(3)]);
        assert_eq!(plan(Varying::Q, rat(3, 2), int(3), 1).value(0), rat(3, 2));
    }

    #[test]
    fn varying_names() {
        assert_eq!(Varying::parse("p_2", 2).unwrap(), Varying::P(1));
        assert_eq!(Varying::parse("r1", 2).unwrap(), Varying::R(0));
        assert!(Varying::parse("p_3", 2).is_err());
        assert!(Varying::parse("s", 2).is_err());
    }

    #[test]
    fn invalid_steps_become_rows() {
        let p = plan(Varying::Q, rat(1, 2), rat(3, 2), 3);
        let rows = rows(&p);
        assert_eq!(rows.len(), 3);
        assert!(rows[0].status.starts_with("error"));
        assert!(rows[1].status.starts_with("error"));
        assert!(!rows[2].status.starts_with("error"));
    }

    #[test]
    fn header_matches_row_fields() {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(&rows(&plan(Varying::Q, rat(3, 2), int(3), 1))[0]).unwrap();
        let out = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(out.lines().next().unwrap(), CSV_HEADER);
    }
}
