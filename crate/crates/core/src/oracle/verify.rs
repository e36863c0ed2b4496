//! The whole verification suite behind one call, with a deterministic report.

use std::fmt;

use num_traits::Signed;
use serde::Serialize;

use crate::closedform::classify;
use crate::exponent::analyze;

use super::certificates::{certificate_sweep, CertificateReport};
use super::crossval::{cross_validate_with, CrossValidationOptions, CrossValidationReport, Fault, Witness};
use super::identities::{check_domination, check_scaling_identities, DominationReport, IdentityReport};
use super::rng::Lcg64;
use super::sampling::{random_spec, sample_noncompact};

/// Points per spec for the identity checks and block vectors per spec for
/// the domination checks.
pub const IDENTITY_POINTS: usize = 1000;
pub const DOMINATION_BLOCKS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoncompactReport {
    pub requested: usize,
    pub sampled: usize,
    /// Specs where the LP exponent is `<= 0`.
    pub nonpositive: usize,
    pub contradictions: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub samples: usize,
    pub seed: u64,
    pub fault: Option<Fault>,
    pub cross_validation: CrossValidationReport,
    pub identities: Vec<IdentityReport>,
    pub domination: Vec<DominationReport>,
    pub certificates: CertificateReport,
    pub noncompact: NoncompactReport,
}

impl VerificationReport {
    pub fn violations(&self) -> usize {
        self.cross_validation.violations()
            + self.identities.iter().map(|r| r.violations.len()).sum::<usize>()
            + self.domination.iter().map(|r| r.violations.len()).sum::<usize>()
            + self.certificates.violations.len()
            + self.noncompact.contradictions.len()
            + (self.noncompact.requested - self.noncompact.sampled)
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

/// Seeds of the sub-checks, derived from the top seed so each part has its own stream.
fn sub_seed(seed: u64, part: u64) -> u64 {
    seed.wrapping_add(part.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Runs with `samples` specs per regime stratum and certificate sweep size
/// `samples`; the identity checks use `min(samples, 50)` specs, the
/// domination and non-compactness checks `min(samples, 20)` and
/// `min(samples, 100)`.
pub fn run_verification(samples: usize, seed: u64, fault: Option<Fault>) -> VerificationReport {
    let mut opts = CrossValidationOptions::new(samples, seed);
    opts.fault = fault;
    let cross_validation = cross_validate_with(&opts);

    let mut rng = Lcg64::new(sub_seed(seed, 1));
    let identities = (0..samples.min(50))
        .map(|k| {
            let spec = random_spec(&mut rng, k % 2 == 0);
            check_scaling_identities(&spec, IDENTITY_POINTS, sub_seed(seed, 100 + k as u64))
        })
        .collect();

    let mut rng = Lcg64::new(sub_seed(seed, 2));
    let domination = (0..samples.min(20))
        .map(|k| {
            let spec = random_spec(&mut rng, true);
            check_domination(&spec, DOMINATION_BLOCKS, sub_seed(seed, 200 + k as u64))
        })
        .collect();

    let certificates = certificate_sweep(samples, sub_seed(seed, 3));
    let noncompact = noncompact_check(samples.min(100), sub_seed(seed, 4));
    VerificationReport { samples, seed, fault, cross_validation, identities, domination, certificates, noncompact }
}

/// Specs the embedding criterion calls non-compact must not come with a
/// positive exponent and a compact verdict.
pub fn noncompact_check(samples: usize, seed: u64) -> NoncompactReport {
    let mut rng = Lcg64::new(seed);
    let mut rep = NoncompactReport { requested: samples, sampled: 0, nonpositive: 0, contradictions: Vec::new() };
    for _ in 0..samples {
        let Some(spec) = sample_noncompact(&mut rng, 1000) else { continue };
        rep.sampled += 1;
        let closed = classify(&spec);
        let witness = |detail: String| Witness { spec: spec.to_string(), detail };
        match analyze(&spec) {
            Ok(lp) => {
                if !lp.theta.is_positive() {
                    rep.nonpositive += 1;
                } else if closed.compact || closed.exponent.is_some() {
                    rep.contradictions.push(witness(format!("exponent {} certified for a non-compact embedding", lp.theta)));
                }
            }
            Err(e) => rep.contradictions.push(witness(format!("LP failed: {e}"))),
        }
    }
    rep
}

fn write_witnesses(f: &mut fmt::Formatter<'_>, list: &[Witness]) -> fmt::Result {
    for w in list {
        writeln!(f, "    {} :: {}", w.spec, w.detail)?;
    }
    Ok(())
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verification report: samples={} seed={}", self.samples, self.seed)?;
        if let Some(fault) = self.fault {
            writeln!(f, "injected fault: {fault:?}")?;
        }
        writeln!(f, "cross-validation")?;
        for s in &self.cross_validation.strata {
            writeln!(
                f,
                "  {:<6} sampled {}/{} draws {} exact {} unique {} grid {} violations {}",
                s.case.label(),
                s.sampled,
                s.requested,
                s.draws,
                s.matches,
                s.unique,
                s.grid_checked,
                s.violations()
            )?;
            write_witnesses(f, &s.mismatches)?;
            write_witnesses(f, &s.grid_failures)?;
            for w in &s.non_unique {
                writeln!(f, "    non-unique (not a violation) {} :: {}", w.spec, w.detail)?;
            }
        }
        let checks: usize = self.identities.iter().map(|r| r.checks).sum();
        let bad: usize = self.identities.iter().map(|r| r.violations.len()).sum();
        writeln!(f, "scaling identities: specs {} checks {checks} violations {bad}", self.identities.len())?;
        for r in &self.identities {
            write_witnesses(f, &r.violations)?;
        }
        let checks: usize = self.domination.iter().map(|r| r.checks).sum();
        let bad: usize = self.domination.iter().map(|r| r.violations.len()).sum();
        writeln!(f, "domination: specs {} checks {checks} violations {bad}", self.domination.len())?;
        for r in &self.domination {
            write_witnesses(f, &r.violations)?;
        }
        let c = &self.certificates;
        writeln!(
            f,
            "certificates: classified {}/{} draws {} unclassified {} violations {}",
            c.classified,
            c.requested,
            c.draws,
            c.unclassified,
            c.violations.len()
        )?;
        for (case, count) in &c.by_case {
            writeln!(f, "  {case:<16} {count}")?;
        }
        write_witnesses(f, &c.violations)?;
        let n = &self.noncompact;
        writeln!(
            f,
            "non-compact: sampled {}/{} exponent<=0 {} contradictions {}",
            n.sampled,
            n.requested,
            n.nonpositive,
            n.contradictions.len()
        )?;
        write_witnesses(f, &n.contradictions)?;
        write!(f, "total violations: {}", self.violations())
    }
}
