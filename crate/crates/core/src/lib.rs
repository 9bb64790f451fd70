//! Exact counts of unordered factorizations `f(n)` and vector partitions
//! `p(alpha)`, certified lower bounds for `p(alpha)`, and enumeration of the
//! distinct values of `f` up to a threshold.
//!
//! Module map:
//!
//! * [`bigcomb`]: partition numbers, Bell numbers, binomials, `sigma`.
//! * [`interval`]: outward-rounded dyadic interval arithmetic.
//! * [`factorizations`]: `f(n)` and explicit factorization lists.
//! * [`vpart`]: `p(alpha)` by recursion, enumeration and generating series.
//! * [`bounds`]: the `z(alpha)`/`N` machinery, both lower bounds for
//!   `p(alpha)`, and the auxiliary inequality sweeps.
//! * [`fcount`]: feasible tuples `p(alpha) <= x` and the value set.
//! * [`cache`]: the `VPCACHE v1` persistent memo file.

pub mod bigcomb;
pub mod bounds;
pub mod cache;
pub mod error;
pub mod factorizations;
pub mod fcount;
pub mod interval;
pub mod serial;
pub mod vpart;

pub use num_bigint::BigUint as BigNat;
pub use num_rational::BigRational as BigRat;

pub use error::{Error, Result};
pub use interval::RealInterval;
pub use vpart::Alpha;
