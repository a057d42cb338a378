//! Information-theoretic non-Markovianity measures for open quantum systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`]: dense density matrices on labelled tensor-product spaces,
//!   channels and seeded random instances.
//! * [`info`]: entropies, relative entropies, (conditional) mutual
//!   information and the Petz recovery map.
//! * [`measures`]: BLP, telescopic BLP, LFS and the conditional-mutual-information
//!   measures evaluated on sampled trajectories.
//! * [`dephasing`]: a two-qubit model with two bosonic baths whose modes are
//!   either entangled (two-mode squeezed) or only classically correlated.
//! * [`oracle`]: brute-force verification suites.
//! * [`cli`]: JSON-configured experiment runner behind the `nonmarkov` binary.

// `!(x > 0.0)` rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dephasing;
pub mod error;
pub mod info;
pub mod linalg;
pub mod measures;
pub mod oracle;
pub mod qstate;

pub use error::{Error, Result};
