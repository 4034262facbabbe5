//! Consistent semigroups on discretized `L_p` scales and numerical checks of
//! the variation-of-constants inequality `T(t) <= S(t) + ∫ S(t-s) B T(s) ds`
//! in its time-domain, resolvent and generator forms.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::redundant_guards)]

pub mod error;
pub mod numerics;
pub mod parallel;
pub mod scenarios;
pub mod semigroups;
pub mod spaces;
pub mod verifier;

pub use error::{Error, Result};
pub use parallel::Execution;
