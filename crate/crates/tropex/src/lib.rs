//! Exact-arithmetic computations for tropical and exploded geometry.
//!
//! The crate provides the tropical semiring `tℝ` and the exploded semiring
//! `ℂ⟨tℝ⟩` with exact rational exponents and Gaussian-rational coefficients,
//! integral affine polytopes and their face/stratum calculus, coordinate
//! charts with smooth-monomial bases, tropical polynomials with corner loci
//! and regular subdivisions, explosion and refinement of combinatorial data,
//! lattice-aware fiber products, degeneration families, strata operators,
//! and a CLI with JSON and SVG output.
//!
//! See the guide under `book/` for worked examples; its code snippets are
//! compiled and run as doc-tests of this crate.

pub mod arith;
pub mod charts;
pub mod complex;
pub mod cone;
pub mod geometry;
pub mod convex;
pub mod lattice;
pub mod parse;
pub mod polytope;
pub mod semiring;
pub mod strata;
pub mod troppoly;

pub(crate) mod linprog;
