//! Volume products of unit p-balls in `R^n`.
//!
//! `M(n, p) = |B_p^n| |B_q^n|` with `1/p + 1/q = 1` is computed two ways:
//! through gamma functions ([`volume::mprod_gamma`]) and through a gamma-free
//! infinite product ([`volume::mprod_product`]) evaluated by the
//! [`engine`]. The remaining modules check the surrounding identities,
//! bounds and derivative claims numerically.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod error;
pub mod identities;
pub mod special;
pub mod sum;
pub mod verify;
pub mod volume;

pub use engine::{eval_log_product, ProductEval, TailMode, TruncationPolicy};
pub use error::{Error, Result};
pub use identities::{IdentityReport, Verdict};
pub use volume::{mprod_gamma, mprod_product, BallSpec, HolderPair};
