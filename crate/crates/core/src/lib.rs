//! Closed-form decay and survival laws for a two-level system, together with an
//! independent numerical-quadrature oracle used to cross-check every closed form.
//!
//! The crate is `no_std` (it needs `alloc` for adaptive quadrature work lists and
//! survival curves). All quantities are in natural units, `ħ = c = k_B = 1`.
//!
//! Modules, bottom-up:
//!
//! * [`specfun`]: sine and cosine integrals, the cosine-deficit integral, Heaviside step.
//! * [`quadrature`]: adaptive Gauss–Kronrod integration, principal values, the
//!   iε-regulated response integrals and regulator extrapolation.
//! * [`decay`]: classical exponential decay, the short-time quadratic law and the
//!   repeated-measurement product law.
//! * [`response_first`]: vacuum response of the two-level system over one interval.
//! * [`response_second`]: response in a flat-band many-particle field state.
//! * [`pipeline`]: N-measurement survival, the continuous-observation limit and curves.
#![no_std]
// Negated comparisons reject NaN; node tables carry full tabulated digits.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod linalg;

pub mod decay;
pub mod pipeline;
pub mod quadrature;
pub mod response_first;
pub mod response_second;
pub mod specfun;

pub use error::{Error, Result};
