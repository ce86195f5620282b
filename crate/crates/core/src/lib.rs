//! Two-photon generalized binomial states in a single-mode cavity.
//!
//! The crate simulates the resonant atom-cavity protocol that writes a
//! two-photon generalized binomial state (2GBS) into an initially empty cavity
//! using two prepared two-level atoms, and the single-shot read-out of that
//! state with a probe atom followed by a decoding Ramsey zone.
//!
//! Modules:
//!
//! - [`fock`]: state vectors on a truncated Fock space, the atom, and the
//!   atom-field product space; binomial and Γ states; overlaps and projections.
//! - [`jc`]: resonant Jaynes-Cummings evolution (closed form and a
//!   matrix-exponential oracle), free field evolution, Ramsey unitaries.
//! - [`protocol`]: the generation and measurement pipelines, the interaction
//!   time scan, the analytic and Monte Carlo error budgets, lifetime checks.
//! - [`angular`]: Holstein-Primakoff operators for two photons and the
//!   pseudo angular momentum whose eigenbasis is the 2GBS triple.
//!
//! Conventions: ℏ = 1, interaction picture at resonance, inner products are
//! conjugate-linear in the first argument.

#![forbid(unsafe_code)]

pub mod angular;
pub mod fock;
pub mod jc;
pub mod protocol;

mod error;
mod tolerance;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use tolerance::{Tolerances, TOL};
