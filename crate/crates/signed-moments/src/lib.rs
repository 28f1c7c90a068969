//! Truncated moment problems for *signed* measures: decide when a moment
//! sequence on a prescribed support set admits a finitely atomic signed
//! representing measure, and build one when it does.
//!
//! The pieces fit together like this:
//!
//! - [`moments`] — multi-indices, polynomials, moment sequences, and atomic
//!   signed measures, generic over exact rational or `f64` arithmetic
//!   through the [`scalar::Scalar`] trait;
//! - [`support`] — a small catalog of closed support sets that can be
//!   sampled, tested for membership, and probed for escape directions;
//! - [`analysis`] — the decision side: evaluation-rank density checks,
//!   growth tests, the bounded-growth dimension count, and a classifier
//!   that turns the evidence into a verdict;
//! - [`construct`] — the synthesis side: interpolation at prescribed nodes,
//!   general node-search construction, variation minimisation, and
//!   independent verification;
//! - [`json`] — the file formats behind the command line, with exact
//!   rationals written as `"n/d"` strings;
//! - [`fixtures`] — the end-to-end demonstrations driven by `demo` and the
//!   acceptance tests.

pub mod analysis;
pub mod cli;
pub mod construct;
pub mod fixtures;
pub mod guide;
pub mod json;

/// Compiles the README's example as a doctest without touching the public
/// API docs.
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub struct ReadmeDoctests;
pub mod linalg;
pub mod moments;
pub mod scalar;
pub mod simplex;
pub mod support;
