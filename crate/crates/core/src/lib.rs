//! Nested reset counter systems (k-NRCS) and the ordinal machinery around
//! their coverability problem.
//!
//! * [`ordinal`]: Cantor normal form ordinals below ε₀ and the Hardy,
//!   Cichoń and fast-growing hierarchies.
//! * [`nmwqo`]: nested-multiset normed wqos, derivatives and bad-sequence search.
//! * [`nrcs`]: the machine model, step semantics and the induced-subgraph order.
//! * [`coverability`]: backward coverability and a bounded forward explorer.
//! * [`encoding`]: ordinals as trees and the Hardy rewrite system.
//! * [`gadgets`]: generated lower-bound machines and their perfect runs.
//! * [`reductions`]: Minsky machines, budgeted resets and chained instances.

pub mod coverability;
pub mod encoding;
pub mod gadgets;
pub mod nmwqo;
pub mod nrcs;
pub mod ordinal;
pub mod reductions;

use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, One, ToPrimitive, Zero};

/// Natural-number scalar used by the hierarchy evaluators and bounds.
pub trait Natural:
    Clone
    + Ord
    + std::fmt::Debug
    + std::fmt::Display
    + Zero
    + One
    + CheckedAdd
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
{
}

impl<T> Natural for T where
    T: Clone
        + Ord
        + std::fmt::Debug
        + std::fmt::Display
        + Zero
        + One
        + CheckedAdd
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
{
}

/// Arbitrary-precision naturals, the default scalar.
pub type Nat = num_bigint::BigUint;

pub use nrcs::{Config, Label, Nrcs, Transition};
pub use ordinal::{ControlFunction, Ordinal};
