//! Rectenna-array energy harvesting and the one-bit uplink activity test.
//!
//! Both topologies keep only the second-order (square-law) term of the diode
//! response, so harvested power is proportional to received power:
//!
//! - DC combiner: one rectifier per element, `P = k_d d^{-α} Σ_j |g_j|²`
//! - RF combiner: elements summed before one rectifier, `P = k_r d^{-α} |Σ_j g_j|²`
//!
//! with `k = ζ e I_s P_h / (μ V_T)²`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::pow;
use num_complex::Complex64;
use rand::Rng;

use crate::channel::complex_gaussian;
use crate::scenario::MAX_ELEMENTS;
use crate::{Error, Result};

/// Rectenna array topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Combiner {
    Dc,
    Rf,
}

impl Combiner {
    pub const ALL: [Combiner; 2] = [Combiner::Dc, Combiner::Rf];

    pub fn as_str(self) -> &'static str {
        match self {
            Combiner::Dc => "dc",
            Combiner::Rf => "rf",
        }
    }
}

impl fmt::Display for Combiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Combiner {
    type Err = &'static str;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "dc" | "DC" => Ok(Combiner::Dc),
            "rf" | "RF" => Ok(Combiner::Rf),
            _ => Err("combiner must be `dc` or `rf`"),
        }
    }
}

/// Diode, combiner and power-beacon constants.
#[derive(Debug, Clone, PartialEq)]
pub struct HarvestParams {
    /// Reverse saturation current `I_s` (A).
    pub i_s: f64,
    /// Ideality factor `μ ∈ [1, 2]`.
    pub mu: f64,
    /// Thermal voltage `V_T` (V).
    pub v_t: f64,
    pub zeta_d: f64,
    pub zeta_r: f64,
    pub e_d: f64,
    pub e_r: f64,
    /// Power beacon transmit power `P_h` (W).
    pub p_h: f64,
    /// Rectenna elements `L`.
    pub elements: u32,
}

impl Default for HarvestParams {
    fn default() -> Self {
        HarvestParams {
            i_s: 1e-3,
            mu: 2.0,
            v_t: 0.028_85,
            zeta_d: 0.9,
            zeta_r: 0.9,
            e_d: 1.0,
            e_r: 1.0,
            p_h: 1.0,
            elements: 4,
        }
    }
}

fn efficiency(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, v, "efficiency must lie in (0, 1]"))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, v, "must be positive and finite"))
    }
}

impl HarvestParams {
    pub fn validate(&self) -> Result<()> {
        positive("i_s", self.i_s)?;
        if !(1.0..=2.0).contains(&self.mu) {
            return Err(Error::invalid(
                "mu",
                self.mu,
                "ideality factor must lie in [1, 2]",
            ));
        }
        positive("v_t", self.v_t)?;
        efficiency("zeta_d", self.zeta_d)?;
        efficiency("zeta_r", self.zeta_r)?;
        efficiency("e_d", self.e_d)?;
        efficiency("e_r", self.e_r)?;
        positive("p_h", self.p_h)?;
        if self.elements < 1 || self.elements > MAX_ELEMENTS {
            return Err(Error::invalid(
                "L",
                self.elements as f64,
                "rectenna elements must be in 1..=128",
            ));
        }
        Ok(())
    }

    /// `I_s P_h / (μ V_T)²`, the square-law gain shared by both topologies.
    fn diode_gain(&self) -> f64 {
        let mv = self.mu * self.v_t;
        self.i_s * self.p_h / (mv * mv)
    }

    /// `ζ_d e_d I_s P_h / (μV_T)²`.
    pub fn dc_gain(&self) -> f64 {
        self.zeta_d * self.e_d * self.diode_gain()
    }

    /// `ζ_r e_r I_s P_h / (μV_T)²`.
    pub fn rf_gain(&self) -> f64 {
        self.zeta_r * self.e_r * self.diode_gain()
    }
}

/// Normalised activity thresholds: a terminal at distance `d` is active iff
/// `Z ≥ G d^{2α}` (DC) or `Z₁ ≥ Y d^{2α}` (RF).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub g: f64,
    pub y: f64,
}

impl DerivedConstants {
    /// `G = (μV_T)²σ²/(ζ_d e_d I_s P_h)`, `Y = (μV_T)²σ²/(ζ_r e_r I_s P_h)`.
    pub fn new(p: &HarvestParams, sigma2: f64) -> Result<Self> {
        p.validate()?;
        positive("sigma2", sigma2)?;
        let mv2 = (p.mu * p.v_t) * (p.mu * p.v_t);
        let common = mv2 * sigma2 / (p.i_s * p.p_h);
        let g = common / (p.zeta_d * p.e_d);
        let y = common / (p.zeta_r * p.e_r);
        positive("G", g)?;
        positive("Y", y)?;
        Ok(DerivedConstants { g, y })
    }

    pub fn for_combiner(&self, combiner: Combiner) -> f64 {
        match combiner {
            Combiner::Dc => self.g,
            Combiner::Rf => self.y,
        }
    }
}

/// Power-beacon-to-rectenna channels `g_1..g_L` of one terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct WptDraw {
    g: Vec<Complex64>,
}

impl WptDraw {
    pub fn sample<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Self {
        WptDraw {
            g: (0..l).map(|_| complex_gaussian(rng)).collect(),
        }
    }

    pub fn from_channels(g: Vec<Complex64>) -> Self {
        WptDraw { g }
    }

    pub(crate) fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for c in self.g.iter_mut() {
            *c = complex_gaussian(rng);
        }
    }

    pub fn channels(&self) -> &[Complex64] {
        &self.g
    }

    /// `Z = Σ_j |g_j|²`, Gamma(L, 1) distributed.
    pub fn sum_power(&self) -> f64 {
        self.g.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Z₁ = |Σ_j g_j|²`, exponential with mean `L`.
    pub fn combined_power(&self) -> f64 {
        self.g.iter().sum::<Complex64>().norm_sqr()
    }
}

pub fn harvest_dc(draw: &WptDraw, d: f64, p: &HarvestParams, alpha: f64) -> f64 {
    p.dc_gain() * draw.sum_power() / pow(d, alpha)
}

pub fn harvest_rf(draw: &WptDraw, d: f64, p: &HarvestParams, alpha: f64) -> f64 {
    p.rf_gain() * draw.combined_power() / pow(d, alpha)
}

pub fn harvest(combiner: Combiner, draw: &WptDraw, d: f64, p: &HarvestParams, alpha: f64) -> f64 {
    match combiner {
        Combiner::Dc => harvest_dc(draw, d, p, alpha),
        Combiner::Rf => harvest_rf(draw, d, p, alpha),
    }
}

/// Whether the harvested power carries one bit over the unfaded uplink:
/// `log2(1 + P/(d^α σ²)) ≥ 1`, i.e. `P ≥ d^α σ²`.
pub fn is_active(p_harvest: f64, d: f64, sigma2: f64, alpha: f64) -> bool {
    p_harvest >= pow(d, alpha) * sigma2
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_channels_harvest_nothing() {
        let p = HarvestParams::default();
        let draw = WptDraw::from_channels(vec![c(0.0, 0.0); 4]);
        assert_eq!(harvest_dc(&draw, 3.0, &p, 3.0), 0.0);
        assert_eq!(harvest_rf(&draw, 3.0, &p, 3.0), 0.0);
        assert!(!is_active(0.0, 3.0, 1e-4, 3.0));
    }

    #[test]
    fn direct_substitution() {
        let p = HarvestParams {
            elements: 2,
            ..HarvestParams::default()
        };
        let draw = WptDraw::from_channels(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let want = 2.0 * p.zeta_d * p.e_d * p.i_s * p.p_h / (p.mu * p.v_t * p.mu * p.v_t);
        assert!((harvest_dc(&draw, 1.0, &p, 3.0) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn linear_in_beacon_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = HarvestParams::default();
        let p2 = HarvestParams {
            p_h: 2.0 * p.p_h,
            ..p.clone()
        };
        for _ in 0..100 {
            let draw = WptDraw::sample(4, &mut rng);
            assert_eq!(
                harvest_dc(&draw, 4.0, &p2, 3.0),
                2.0 * harvest_dc(&draw, 4.0, &p, 3.0)
            );
            assert_eq!(
                harvest_rf(&draw, 4.0, &p2, 3.0),
                2.0 * harvest_rf(&draw, 4.0, &p, 3.0)
            );
        }
    }

    #[test]
    fn single_element_combiners_coincide() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let p = HarvestParams {
            elements: 1,
            ..HarvestParams::default()
        };
        for _ in 0..100 {
            let draw = WptDraw::sample(1, &mut rng);
            let dc = harvest_dc(&draw, 5.0, &p, 3.0);
            let rf = harvest_rf(&draw, 5.0, &p, 3.0);
            assert!((dc - rf).abs() <= 1e-15 * dc);
        }
    }

    #[test]
    fn rf_phase_cancellation() {
        let p = HarvestParams::default();
        let a = c(0.7, -0.2);
        let draw = WptDraw::from_channels(vec![a, -a]);
        assert_eq!(harvest_rf(&draw, 2.0, &p, 3.0), 0.0);
        let dc = harvest_dc(&draw, 2.0, &p, 3.0);
        assert!((dc - 2.0 * a.norm_sqr() * p.dc_gain() / 8.0).abs() < 1e-15);
    }

    #[test]
    fn phase_rotation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p = HarvestParams::default();
        let draw = WptDraw::sample(4, &mut rng);
        let rotated = WptDraw::from_channels(
            draw.channels()
                .iter()
                .enumerate()
                .map(|(j, g)| g * Complex64::from_polar(1.0, 0.9 * j as f64 + 0.3))
                .collect(),
        );
        let dc = harvest_dc(&draw, 3.0, &p, 3.0);
        assert!((harvest_dc(&rotated, 3.0, &p, 3.0) - dc).abs() < 1e-14 * dc);
        let rf = harvest_rf(&draw, 3.0, &p, 3.0);
        assert!((harvest_rf(&rotated, 3.0, &p, 3.0) - rf).abs() > 1e-6 * rf);
    }

    #[test]
    fn activity_boundary_is_inclusive() {
        let d: f64 = 2.0;
        let sigma2 = 0.25;
        assert!(is_active(8.0 * 0.25, d, sigma2, 3.0));
        assert!(!is_active(8.0 * 0.25 * (1.0 - 1e-12), d, sigma2, 3.0));
    }

    #[test]
    fn dc_activity_reduces_to_gamma_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let p = HarvestParams::default();
        let sigma2 = 1e-4;
        let k = DerivedConstants::new(&p, sigma2).unwrap();
        let d: f64 = 6.5;
        let mut mismatches = 0;
        for _ in 0..100_000 {
            let draw = WptDraw::sample(4, &mut rng);
            let by_power = is_active(harvest_dc(&draw, d, &p, 3.0), d, sigma2, 3.0);
            let by_gamma = draw.sum_power() >= k.g * pow(d, 6.0);
            if by_power != by_gamma {
                mismatches += 1;
            }
        }
        assert_eq!(mismatches, 0);
    }

    #[test]
    fn derived_constants() {
        let p = HarvestParams::default();
        let k = DerivedConstants::new(&p, 1e-4).unwrap();
        assert_eq!(k.g, k.y);
        let want = (2.0 * 0.028_85f64).powi(2) * 1e-4 / (0.9 * 1e-3 * 1.0);
        assert!((k.g - want).abs() < 1e-15 * want);
        let half = HarvestParams { e_d: 0.5, ..p };
        let k2 = DerivedConstants::new(&half, 1e-4).unwrap();
        assert!((k2.g - 2.0 * k.g).abs() < 1e-15 * k.g);
        assert_eq!(k2.y, k.y);
        assert!(DerivedConstants::new(&HarvestParams::default(), 0.0).is_err());
    }

    #[test]
    fn validation() {
        let bad = HarvestParams {
            mu: 2.5,
            ..HarvestParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = HarvestParams {
            e_r: 1.2,
            ..HarvestParams::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!("rf".parse::<Combiner>().unwrap(), Combiner::Rf);
        assert!("ac".parse::<Combiner>().is_err());
    }
}
