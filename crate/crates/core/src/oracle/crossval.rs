//! Closed forms against the LP against the grid, stratified by regime.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::closedform::{classify, RegimeCase};
use crate::exponent::{build_objective, minimize, FeasibleSet, PiecewiseMax};
use crate::params::ProblemSpec;

use super::display::reference_objective;
use super::grid::{grid_minimize, grid_size, POINT_BUDGET};
use super::rng::Lcg64;
use super::sampling::sample_case;

/// A deliberate defect, used to show that verification notices one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Negate the first non-zero α coefficient of the first piece handed to the LP.
    FlipSign,
}

impl Fault {
    pub(crate) fn apply(self, obj: &mut PiecewiseMax) {
        match self {
            Fault::FlipSign => {
                for piece in &mut obj.pieces {
                    if let Some(c) = piece.coeffs.iter_mut().find(|c| !c.is_zero()) {
                        *c = -c.clone();
                        return;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CrossValidationOptions {
    pub samples: usize,
    pub seed: u64,
    /// Grid resolution is `grid_factor · d`; `None` means the default resolution.
    pub grid_factor: Option<u64>,
    /// Skip the grid bracket entirely when false.
    pub check_grid: bool,
    pub fault: Option<Fault>,
    pub max_attempts_per_sample: usize,
}

impl CrossValidationOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        CrossValidationOptions { samples, seed, grid_factor: None, check_grid: true, fault: None, max_attempts_per_sample: 400 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub spec: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StratumReport {
    pub case: RegimeCase,
    pub requested: usize,
    pub sampled: usize,
    pub draws: usize,
    pub matches: usize,
    pub unique: usize,
    pub grid_checked: usize,
    pub mismatches: Vec<Witness>,
    pub non_unique: Vec<Witness>,
    pub grid_failures: Vec<Witness>,
}

impl StratumReport {
    pub fn violations(&self) -> usize {
        self.mismatches.len() + self.grid_failures.len() + (self.requested - self.sampled)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossValidationReport {
    pub samples: usize,
    pub seed: u64,
    pub strata: Vec<StratumReport>,
}

impl CrossValidationReport {
    pub fn violations(&self) -> usize {
        self.strata.iter().map(StratumReport::violations).sum()
    }
}

pub fn cross_validate(sample_count: usize, seed: u64) -> CrossValidationReport {
    cross_validate_with(&CrossValidationOptions::new(sample_count, seed))
}

/// For every covered regime, draw specs in it and check
/// closed form = LP minimum exactly, and LP minimum inside the grid bracket.
pub fn cross_validate_with(opts: &CrossValidationOptions) -> CrossValidationReport {
    let strata = RegimeCase::COVERED
        .iter()
        .enumerate()
        .map(|(k, &case)| {
            // one stream per stratum, so strata do not shift each other
            let mut rng = Lcg64::new(opts.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64 + 1)));
            run_stratum(case, &mut rng, opts)
        })
        .collect();
    CrossValidationReport { samples: opts.samples, seed: opts.seed, strata }
}

fn run_stratum(case: RegimeCase, rng: &mut Lcg64, opts: &CrossValidationOptions) -> StratumReport {
    let mut rep = StratumReport {
        case,
        requested: opts.samples,
        sampled: 0,
        draws: 0,
        matches: 0,
        unique: 0,
        grid_checked: 0,
        mismatches: Vec::new(),
        non_unique: Vec::new(),
        grid_failures: Vec::new(),
    };
    for _ in 0..opts.samples {
        let (spec, draws) = sample_case(case, rng, opts.max_attempts_per_sample);
        rep.draws += draws;
        let Some(spec) = spec else { continue };
        rep.sampled += 1;
        check_one(&spec, opts, &mut rep);
    }
    rep
}

fn check_one(spec: &ProblemSpec, opts: &CrossValidationOptions, rep: &mut StratumReport) {
    let witness = |detail: String| Witness { spec: spec.to_string(), detail };
    let closed = classify(spec).exponent.expect("sampled inside a covered regime");
    let mut obj = build_objective(spec);
    if let Some(f) = opts.fault {
        f.apply(&mut obj);
    }
    let feas = FeasibleSet::for_spec(spec);
    let lp = match minimize(&obj, &feas) {
        Ok(lp) => lp,
        Err(e) => {
            rep.mismatches.push(witness(format!("LP failed: {e}")));
            return;
        }
    };
    if lp.theta == closed {
        rep.matches += 1;
    } else {
        rep.mismatches.push(witness(format!("closed form {closed} but LP minimum {}", lp.theta)));
    }
    if lp.unique {
        rep.unique += 1;
    } else {
        rep.non_unique.push(witness(format!("minimum {} attained on a face; one minimiser {}", lp.theta, lp.argmin)));
    }
    if !closed.is_positive() {
        rep.mismatches.push(witness(format!("covered regime with non-positive exponent {closed}")));
    }

    if !opts.check_grid {
        return;
    }
    let reference = reference_objective(spec);
    let base_g = opts.grid_factor.map_or_else(|| super::grid::default_grid(spec.dim()), |f| f * spec.dim() as u64);
    let g = base_g;
    let fits = |g: u64| {
        let levels = if feas.s_lower == feas.s_upper { 1 } else { g + 1 };
        grid_size(spec.dim(), levels, g) <= POINT_BUDGET as u128
    };
    if !fits(g) {
        return;
    }
    // a failed bracket is retried once at 4G before it counts
    let mut g = g;
    loop {
        match grid_minimize(&reference, &feas, g) {
            Ok(grid) if grid.brackets(&lp.theta) => {
                rep.grid_checked += 1;
                return;
            }
            Ok(grid) if g == base_g && fits(4 * g) => {
                log::debug!("{spec}: bracket [{}, {}] misses {} at G = {g}, refining", &grid.best_value - &grid.gap_bound, grid.best_value, lp.theta);
                g *= 4;
            }
            Ok(grid) => {
                rep.grid_checked += 1;
                rep.grid_failures.push(witness(format!(
                    "LP minimum {} outside grid bracket [{}, {}] at G = {g}",
                    lp.theta,
                    &grid.best_value - &grid.gap_bound,
                    grid.best_value
                )));
                return;
            }
            Err(e) => {
                rep.grid_failures.push(witness(format!("grid failed: {e}")));
                return;
            }
        }
    }
}
