//! Gaussian covariance-matrix toolkit for continuous-variable QKD.
//!
//! The crate computes symplectic spectra, entropies, Gaussian discord and
//! Devetak-Winter key rates for two protocols: a device-dependent protocol
//! built on a separable two-mode Gaussian state attacked by an entangling
//! cloner, and the ideal EPR protocol over a pure-loss channel.
//!
//! Conventions: hbar = 2, vacuum variance 1, quadratures ordered
//! `(q1, p1, q2, p2, ...)`, entropies in bits.

pub mod discord;
pub mod error;
pub mod info;
pub mod protocols;
pub mod sampling;
pub mod symplectic;
pub mod verify;

pub use error::{Error, Result, Security};
