//! Opportunistic beamforming (OBF) with wireless-powered 1-bit feedback.
//!
//! Terminals are scattered as a Poisson point process on an annulus around a
//! co-located access point and power beacon. Each terminal harvests energy
//! through an `L`-element rectenna array (DC- or RF-combined) and, if the
//! harvested power supports one bit on the unfaded uplink, reports whether
//! its SINR on a preassigned beam clears the target threshold.
//!
//! The crate carries both halves of the problem:
//!
//! - [`analytic`]: closed-form idle probabilities, thinned feedback
//!   intensities, the spatially averaged SINR CDF and the beam outage
//!   probability with its high-power floor.
//! - [`sim`]: a per-slot Monte-Carlo engine for the same protocol plus the
//!   random-assignment and full-feedback benchmarks.
//!
//! Supporting modules: [`specfun`] (gamma family), [`quad`] (adaptive
//! Gauss-Kronrod), [`geometry`], [`channel`] and [`energy`].
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod channel;
pub mod energy;
mod error;
pub mod geometry;
pub mod quad;
pub mod scenario;
pub mod sim;
pub mod specfun;
pub mod units;

pub use error::{Error, Result};
pub use scenario::Scenario;
