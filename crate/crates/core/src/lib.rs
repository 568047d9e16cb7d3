//! A two-dimensional harmonic oscillator on a time-dependent noncommutative
//! background.
//!
//! The pipeline runs background fields θ(t), Ω(t) → coefficients a, b, c →
//! Ermakov-Pinney width σ(t) → Lewis-Riesenfeld eigenstates and coherent
//! states → uncertainty products checked against their generalized bounds.
//!
//! ```
//! use ncosc::background::PhysicalConstants;
//! use ncosc::ep::{chiellini_exponential, ep_residual};
//!
//! let (bg, sol) = chiellini_exponential(5.0, 2.0, 2.0, PhysicalConstants::default()).unwrap();
//! assert!(ep_residual(&sol, &bg, 0.3).unwrap() < 1e-12);
//! ```

// `!(x > 0.0)` is how NaN gets rejected along with the bad values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod background;
pub mod coherent;
pub mod ep;
pub mod error;
pub mod expectations;
pub mod harness;
pub mod ode;
pub mod optimize;
pub mod quadrature;
pub mod special_fn;
pub mod states;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/background.md")]
    mod background {}
    #[doc = include_str!("../../../book/src/ermakov_pinney.md")]
    mod ermakov_pinney {}
    #[doc = include_str!("../../../book/src/eigenstates.md")]
    mod eigenstates {}
    #[doc = include_str!("../../../book/src/uncertainty.md")]
    mod uncertainty {}
    #[doc = include_str!("../../../book/src/coherent_states.md")]
    mod coherent_states {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
