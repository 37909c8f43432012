// SPDX-License-Identifier: Apache-2.0

//! Weighted topological entropy and pressure of factor maps between subshifts.
//!
//! For a factor map `pi: X -> Y` between shifts given by a 1-block code, a
//! weight `w` in `[0, 1]` and a locally constant potential `f`, the crate
//! computes the weighted partition sums
//!
//! ```text
//! Z_N = sum_{v in L_N(Y)} ( sum_{u in L_N(X), pi(u) = v} exp(sup_[u] S_N f) )^w
//! ```
//!
//! and turns them into certified enclosures of their growth rate, the
//! weighted topological pressure. The measure-theoretic side (Markov measures,
//! entropy of their images, the weighted measure value and its optimization)
//! and Bedford–McMullen carpet dimensions are built on top.

pub mod carpets;
pub mod cli;
pub mod cover;
pub mod error;
pub mod io;
pub mod limits;
pub mod measures;
pub mod numeric;
pub mod random;
pub mod symbolic;
pub mod variational;

pub use error::{Error, Result};
pub use limits::Limits;
