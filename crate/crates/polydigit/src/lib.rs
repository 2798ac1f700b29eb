//! Exact arithmetic for the base-q digit sums of polynomial values.
//!
//! The crate revolves around the ratio s_q(p(n)) / s_q(n) for an integer
//! polynomial p of degree h ≥ 2 with positive leading coefficient. It
//! provides:
//!
//! - [`digitsum`]: base-q expansions, the digit-sum function, and its exact
//!   splitting/carry identities (fast evaluators plus checked verifiers);
//! - [`intpoly`]: exact integer polynomials, the degree-4 carrier polynomial
//!   whose powers have bounded digit sums, and coefficient bounds;
//! - [`witness`]: explicit constructions of n with arbitrarily small ratio,
//!   with machine-checkable certificates and the N^α density family;
//! - [`bounds`]: upper bounds on the ratio and the B_h-set construction
//!   forcing large ratios, plus the negative-coefficient growth bound;
//! - [`search`]: exhaustive, parallel, deterministic record scans with a
//!   native fixed-width fast path and resumable checkpoints;
//! - [`verify`]: the end-to-end verification suite behind `polydigit
//!   verify-paper` and the acceptance tests.
//!
//! Every certificate is exact: ratios are rationals, comparisons are integer
//! comparisons, and no floating point enters any inequality check.

pub mod bounds;
pub mod cli;
pub mod digitsum;
pub mod error;
pub mod intpoly;
pub mod search;
pub mod verify;
pub mod witness;

pub use digitsum::{digit_length, digit_sum, to_digits, Base, DigitString};
pub use error::{Error, Result};
pub use intpoly::{parse_poly, IntPolynomial, StudyPolynomial};
pub use witness::RatioRecord;
