//! Exact-arithmetic verification of the covering, chain and tree-cover
//! computations behind the lonely runner problem with `d + 1` runners.

pub mod analysis;
pub mod chains;
pub mod error;
pub mod geometry;
pub mod intervals;
pub mod polytope;
pub mod rational;
pub mod treecover;

pub use error::{Error, Result};
pub use intervals::{Interval, IntervalSet};
pub use rational::{q, Rational};
