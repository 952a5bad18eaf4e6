//! Exact computations with p-permutation modules of finite groups.
//!
//! Everything here is exact: matrices over small finite fields `F_q`, ring
//! elements with arbitrary-precision rational coefficients, and character-like
//! invariants with coefficients in a cyclotomic field `Q(zeta_m)`.  No floating
//! point is used anywhere.
//!
//! The main entry point is [`context::GroupCtx`], which bundles a permutation
//! group with a prime `p` and lazily computes, for the group and its subgroups:
//!
//! * the subgroup lattice with conjugacy classes and Moebius function,
//! * projective indecomposable modules of the relevant quotient groups,
//! * the classification of indecomposable p-permutation modules by pairs
//!   (vertex, module of the normalizer quotient),
//! * the subring spanned by the inflation-projective ("exprojective") classes,
//! * species (exact character-like ring homomorphisms) and their dual
//!   idempotents, and
//! * the canonical induction map into the cofixed group of exprojective
//!   classes over all subgroups, together with its verification suite.

pub mod builtins;
pub mod calt;
pub mod config;
pub mod context;
pub mod cyclo;
pub mod error;
pub mod field;
pub mod group;
pub mod homs;
pub mod lattice;
pub mod matrix;
pub mod module;
pub mod names;
pub mod perm;
pub mod report;
pub mod tring;
pub mod verify;

pub use config::RunConfig;
pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
