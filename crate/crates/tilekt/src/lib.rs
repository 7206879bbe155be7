//! K-theory of the stable, unstable and asymptotic C*-algebras of
//! one-dimensional and two-dimensional block substitution tilings.
//!
//! The library builds the stable cochain complex of a substitution tiling
//! (coboundary matrices with substitution-homotopy connecting maps),
//! evaluates direct limits of finitely generated abelian groups with exact
//! integer arithmetic, and assembles the K-groups of the three algebras.
//!
//! Entry points:
//! - [`tiling1d::Substitution1D`] and [`tiling2d::BlockSubstitution2D`]
//!   describe substitution rules;
//! - [`chaincx::stable_cohomology`] / [`chaincx::stable_transpose_homology`]
//!   compute the limit groups of a [`chaincx::StableComplex`];
//! - [`ktheory::k_theory_report`] assembles K-groups;
//! - [`abgroup::limit_free`] evaluates `lim(A, Z^n)` on its own;
//! - [`cli`] backs the `tilekt` binary.

pub mod abgroup;
pub mod chaincx;
pub mod cli;
pub mod exactmat;
pub mod ktheory;
pub mod tiling1d;
pub mod tiling2d;
