//! Markov chain on the non-negative integers attached to the type II
//! Jacobi-Piñeiro multiple orthogonal polynomials.
//!
//! The transition matrix `P` is banded (one band above the diagonal, two
//! below) and factors as `P = P_L · P_U`, where both factors are themselves
//! stochastic: `P_L` is a pure-death chain absorbed at 0 and `P_U` is a
//! pure-birth chain. For `alpha = 1/M`, `beta = 1/N` with positive integers
//! `M`, `N` and a non-negative integer `gamma`, each factor is realized by a
//! ball-drawing experiment, and one step of `P` is one run of each experiment
//! in turn.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is generic over
//! [`Scalar`], so the same formulas run in `f64` and in exact
//! [`Rational`] arithmetic.
//!
//! ```
//! use jpurn_core::{coefficients, IntegerParameters};
//! use jpurn_core::Rational;
//!
//! let ip = IntegerParameters::new(2, 3, 1).unwrap();
//! let c = coefficients::lu_coefficients_rational(&ip, 2).unwrap();
//! assert_eq!(c.t[2], Rational::new(14.into(), 297.into()));
//! ```
#![no_std]
#![deny(missing_debug_implementations)]

extern crate alloc;

pub mod banded;
pub mod chain_analysis;
pub mod coefficients;
mod error;
pub mod rng;
mod scalar;
pub mod urn_sim;

pub use banded::BandedMatrix;
pub use coefficients::{IntegerParameters, LuCoefficients, Parameters, TransitionRow};
pub use error::{Error, Violation};
pub use rng::RngStream;
pub use scalar::{Rational, Scalar, REAL_TOLERANCE};
