//! A single operating point of the system, in linear units.

use crate::energy::HarvestParams;
use crate::geometry::AnnulusRegion;
use crate::{Error, Result};

/// Largest rectenna array accepted; keeps `Γ(m + 1/α)` comfortably finite.
pub const MAX_ELEMENTS: u32 = 128;

/// Physical and protocol constants for one (P_t, P_h) point.
///
/// `p_t` is the quantity that appears in the SINR noise term `d^α / P_t`.
/// Everything is linear: `delta` is the SINR threshold as a ratio, powers
/// are in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub region: AnnulusRegion,
    /// Transmit antennas at the access point, which is also the beam count `M`.
    pub beams: u32,
    /// Receive antennas per terminal (`N`), combined by selection.
    pub rx_antennas: u32,
    pub alpha: f64,
    /// Terminal density per m².
    pub lambda: f64,
    pub delta: f64,
    pub p_t: f64,
    /// Noise variance; sets the one-bit uplink requirement `P ≥ d^α σ²`.
    pub sigma2: f64,
    pub harvest: HarvestParams,
}

impl Default for Scenario {
    /// Reference deployment: 2-10 m annulus, α = 3, M = N = 2, L = 4,
    /// Δ = 10 dB, λ = 0.1, σ² = −10 dBm, ideal combiners, P_t = P_h = 1 W.
    fn default() -> Self {
        Scenario {
            region: AnnulusRegion::new(2.0, 10.0).expect("valid reference annulus"),
            beams: 2,
            rx_antennas: 2,
            alpha: 3.0,
            lambda: 0.1,
            delta: 10.0,
            p_t: 1.0,
            sigma2: 1e-4,
            harvest: HarvestParams::default(),
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.beams < 1 {
            return Err(Error::invalid(
                "M",
                self.beams as f64,
                "need at least one beam",
            ));
        }
        if self.rx_antennas < 1 {
            return Err(Error::invalid(
                "N",
                self.rx_antennas as f64,
                "need at least one antenna",
            ));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::invalid(
                "alpha",
                self.alpha,
                "path-loss exponent must exceed 2",
            ));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::invalid(
                "lambda",
                self.lambda,
                "density must be finite and >= 0",
            ));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::invalid(
                "delta",
                self.delta,
                "threshold must be positive",
            ));
        }
        if !(self.p_t > 0.0) || !self.p_t.is_finite() {
            return Err(Error::invalid(
                "p_t",
                self.p_t,
                "transmit power must be positive",
            ));
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::invalid(
                "sigma2",
                self.sigma2,
                "noise power must be positive",
            ));
        }
        self.harvest.validate()
    }

    /// Per-beam terminal density `λ/M`.
    pub fn beam_density(&self) -> f64 {
        self.lambda / self.beams as f64
    }
}
