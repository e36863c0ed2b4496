//! Order exponents of Kolmogorov widths of periodic anisotropic Sobolev classes.
//!
//! All quantities are computed with exact rationals. The crate is organised the
//! way the computation flows: [`params`] holds the parameter vectors,
//! [`exponent`] minimises the piecewise-linear objective whose minimum is the
//! order exponent, [`closedform`] evaluates the explicit formulas,
//! [`finitedim`] handles widths of finite-dimensional ball intersections and
//! [`oracle`] checks everything against brute force.
//!
//! ```
//! use widthcalc::{exponent, params::{int, rat}, ProblemSpec};
//!
//! let spec = ProblemSpec::new(vec![int(3), int(3)], vec![int(1), int(1)], int(2)).unwrap();
//! let res = exponent::analyze(&spec).unwrap();
//! assert_eq!(res.theta, rat(1, 2));
//! assert!(res.unique);
//! ```

pub mod closedform;
pub mod error;
pub mod exponent;
pub mod finitedim;
pub mod format;
pub mod oracle;
pub mod params;

pub use error::{Error, Result};
pub use params::{ProblemSpec, Rational};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/exponent.md")]
    mod exponent {}
    #[doc = include_str!("../../../book/src/closed-forms.md")]
    mod closed_forms {}
    #[doc = include_str!("../../../book/src/finite.md")]
    mod finite {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
