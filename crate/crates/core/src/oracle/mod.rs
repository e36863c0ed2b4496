//! Independent checks: a brute-force grid, a second transcription of the
//! objective, regime-targeted sampling and the cross-validation driver.

mod certificates;
mod crossval;
mod display;
mod grid;
mod identities;
mod rng;
mod sampling;
mod verify;

pub use crossval::{
    cross_validate, cross_validate_with, CrossValidationOptions, CrossValidationReport, Fault, StratumReport, Witness,
};
pub use certificates::{audit_certificate, certificate_sweep, random_intersection, CertificateReport};
pub use display::{reference_objective, reference_small_q};
pub use grid::{default_grid, grid_minimize, grid_size, GridResult, GRID_ENV, POINT_BUDGET};
pub use identities::{check_domination, check_scaling_identities, DominationReport, IdentityReport};
pub use rng::Lcg64;
pub use sampling::{propose, random_spec, sample_case, sample_noncompact};
pub use verify::{noncompact_check, run_verification, NoncompactReport, VerificationReport, DOMINATION_BLOCKS, IDENTITY_POINTS};
