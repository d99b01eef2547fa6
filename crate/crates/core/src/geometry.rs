//! Terminal placement: a homogeneous Poisson point process on an annulus.
//!
//! Only radial distances are kept. Every downstream quantity depends on a
//! terminal's position through its distance to the origin alone.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::sqrt;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::{Error, Result};

/// Coverage annulus `ξ ≤ r ≤ ρ` around the co-located AP and power beacon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusRegion {
    xi: f64,
    rho: f64,
}

impl AnnulusRegion {
    pub fn new(xi: f64, rho: f64) -> Result<Self> {
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(Error::invalid(
                "xi",
                xi,
                "exclusion radius must be finite and >= 0",
            ));
        }
        if !(rho > xi) || !rho.is_finite() {
            return Err(Error::invalid(
                "rho",
                rho,
                "outer radius must exceed the exclusion radius",
            ));
        }
        Ok(AnnulusRegion { xi, rho })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `ρ² − ξ²`.
    pub fn radial_span(&self) -> f64 {
        self.rho * self.rho - self.xi * self.xi
    }

    /// `π(ρ² − ξ²)`.
    pub fn area(&self) -> f64 {
        PI * self.radial_span()
    }

    /// CDF of the distance of a uniform point: `(r² − ξ²)/(ρ² − ξ²)`.
    pub fn radial_cdf(&self, r: f64) -> f64 {
        if r <= self.xi {
            0.0
        } else if r >= self.rho {
            1.0
        } else {
            (r * r - self.xi * self.xi) / self.radial_span()
        }
    }

    /// Radial density `2r/(ρ² − ξ²)` on `[ξ, ρ]`.
    pub fn radial_pdf(&self, r: f64) -> f64 {
        if r < self.xi || r > self.rho {
            0.0
        } else {
            2.0 * r / self.radial_span()
        }
    }

    /// Distance of a uniformly placed point, by inverting [`radial_cdf`](Self::radial_cdf).
    pub fn sample_distance<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        sqrt(self.xi * self.xi + u * self.radial_span())
    }
}

pub fn annulus_area(region: &AnnulusRegion) -> f64 {
    region.area()
}

/// Distances of the terminals sampled in one slot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TerminalField {
    distances: Vec<f64>,
}

impl TerminalField {
    pub fn from_distances(distances: Vec<f64>) -> Self {
        TerminalField { distances }
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn count(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

/// Draws the number of terminals in one slot, `Poisson(λ|𝓑|)`.
///
/// Holds the precomputed Poisson sampler so the per-trial cost is one draw.
#[derive(Debug, Clone, Copy)]
pub struct PointCount {
    poisson: Option<Poisson<f64>>,
}

impl PointCount {
    pub fn new(region: &AnnulusRegion, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(
                "lambda",
                lambda,
                "density must be finite and >= 0",
            ));
        }
        let mean = lambda * region.area();
        let poisson = if mean > 0.0 {
            Some(
                Poisson::new(mean)
                    .map_err(|_| Error::invalid("lambda", lambda, "Poisson mean out of range"))?,
            )
        } else {
            None
        };
        Ok(PointCount { poisson })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.poisson {
            Some(p) => p.sample(rng) as usize,
            None => 0,
        }
    }
}

/// One realisation of the PPP with density `lambda` on `region`.
pub fn sample_ppp<R: Rng + ?Sized>(
    region: &AnnulusRegion,
    lambda: f64,
    rng: &mut R,
) -> Result<TerminalField> {
    let count = PointCount::new(region, lambda)?.sample(rng);
    let distances = (0..count).map(|_| region.sample_distance(rng)).collect();
    Ok(TerminalField { distances })
}

/// Splits a field by a per-terminal predicate, which may use `rng` for
/// independent (p-)thinning.
pub fn thin<R, F>(field: &TerminalField, rng: &mut R, mut keep: F) -> (TerminalField, TerminalField)
where
    R: Rng + ?Sized,
    F: FnMut(f64, &mut R) -> bool,
{
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for &d in &field.distances {
        if keep(d, rng) {
            kept.push(d);
        } else {
            dropped.push(d);
        }
    }
    (
        TerminalField { distances: kept },
        TerminalField { distances: dropped },
    )
}
