//! Exact-arithmetic laboratory for bounded exponential sums.
//!
//! The crate builds the factorial-shifted sets `A(f) = {n + f(n)!}` and the
//! digit-constrained sets `E(f, a)`, evaluates partial sums
//! `S_A(α, N) = Σ_{n ∈ A, n ≤ N} e(nα)` with exact phase reduction, and checks
//! the boundedness, periodicity and dimension estimates that go with them.
//!
//! Modules:
//! - [`factoradic`]: factorial-base digits of reals in `[0, 1)` with rigorous tail bounds.
//! - [`expsum`]: compensated streaming sums, closed-form Dirichlet bounds.
//! - [`construction`]: growth/weight registries, `A(f)`, `E(f, a)`, sums over `A(f)`.
//! - [`periodicity`]: power series on sectors, ultimate-period detection, period collapse.
//! - [`dimension`]: exact cylinder counts, the cylinder measure and mass checks.

pub mod construction;
pub mod dimension;
pub mod error;
pub mod expsum;
pub mod factoradic;
pub mod periodicity;

pub use error::{Error, Result};
pub use factoradic::{ExactFraction, FactoradicReal, TailPolicy};
