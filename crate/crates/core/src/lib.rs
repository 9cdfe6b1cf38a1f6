//! Time-sliced phase-space path integrals for noncommutative quantum
//! mechanics.
//!
//! The coordinate algebra `[Q^l, Q^j] = -2iħθ^{lj}` is realized on a
//! canonical pair as `Q = X + θK`. Everything in this crate works with that
//! realization on a periodic position lattice and its Fourier-dual momentum
//! lattice:
//!
//! * [`params`], [`grid`], [`potential`] and [`config`] hold the shared
//!   physical types.
//! * [`star`] implements the Grönewold-Moyal product `V ⋆ ψ` as a
//!   pseudodifferential operator with symbol `V(x + θk)`.
//! * [`weyl`] computes ordering-index-α symbols of grid operators.
//! * [`slicer`] builds α-parameterized short-time propagators and composes
//!   them into the discretized Feynman kernel.
//! * [`phi`] reproduces the Gaussian source functional and its derivatives in
//!   exact rational arithmetic.
//! * [`oracle`] provides independent reference evolutions (dense spectral
//!   propagator and split-step integrator).

#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod exec;
pub mod field;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod oracle;
pub mod params;
pub mod phi;
pub mod poly;
pub mod potential;
pub mod slicer;
pub mod star;
pub mod weyl;

pub use error::{Error, Result};
pub use field::ComplexField;
pub use grid::PhaseSpaceGrid;
pub use kernel::{OperatorKernel, PropagatorKernel};
pub use params::{PhysicsParams, ThetaMatrix};
pub use potential::Potential;

pub use num_complex::Complex64 as C64;
