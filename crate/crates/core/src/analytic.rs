//! Closed-form outage analysis.
//!
//! The chain is: idle probability of a terminal (harvested power too low for
//! the one-bit uplink) → density of feedback-capable terminals per beam →
//! spatially averaged SINR CDF `F_Γ` → beam outage probability, plus the
//! high-power floor where every terminal can feed back.

use libm::{exp, expm1, pow};

use crate::energy::{Combiner, DerivedConstants};
use crate::geometry::AnnulusRegion;
use crate::quad;
use crate::scenario::MAX_ELEMENTS;
use crate::specfun::{gamma_fn, upper_gamma_diff};
use crate::{Error, Result, Scenario};

/// Probabilities may overshoot [0, 1] by this much before it is an error.
const PROB_SLACK: f64 = 1e-12;

/// Below this SINR argument the binomial form of `F_Γ` is not used.
const CLOSED_FORM_MIN_X: f64 = 1e-3;
/// Largest tolerated `(1 + Σ|terms|)/|F_Γ|` for the alternating sum.
const CLOSED_FORM_MAX_CONDITION: f64 = 1e8;

/// Everything the closed forms need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticInputs {
    pub region: AnnulusRegion,
    pub beams: u32,
    pub rx_antennas: u32,
    pub elements: u32,
    pub alpha: f64,
    pub lambda: f64,
    /// Linear SINR threshold Δ.
    pub delta: f64,
    pub p_t: f64,
    pub constants: DerivedConstants,
}

impl AnalyticInputs {
    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        s.validate()?;
        let inputs = AnalyticInputs {
            region: s.region,
            beams: s.beams,
            rx_antennas: s.rx_antennas,
            elements: s.harvest.elements,
            alpha: s.alpha,
            lambda: s.lambda,
            delta: s.delta,
            p_t: s.p_t,
            constants: DerivedConstants::new(&s.harvest, s.sigma2)?,
        };
        Ok(inputs)
    }

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
        if self.elements < 1 || self.elements > MAX_ELEMENTS {
            return Err(Error::invalid(
                "L",
                self.elements as f64,
                "rectenna elements must be in 1..=128",
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
        if !(self.delta > 0.0) {
            return Err(Error::invalid(
                "delta",
                self.delta,
                "threshold must be positive",
            ));
        }
        if !(self.p_t > 0.0) {
            return Err(Error::invalid(
                "p_t",
                self.p_t,
                "transmit power must be positive",
            ));
        }
        Ok(())
    }

    /// `λ_l = λ/M`.
    pub fn beam_density(&self) -> f64 {
        self.lambda / self.beams as f64
    }
}

/// Accepts `v` as a probability, absorbing rounding excursions.
fn probability(quantity: &'static str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else if (-PROB_SLACK..=1.0 + PROB_SLACK).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Error::Consistency { quantity, value: v })
    }
}

fn check_scale(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            name,
            v,
            "harvesting constant must be positive",
        ))
    }
}

/// `1 − Π^D`: fraction of terminals whose DC-combined harvest clears the
/// uplink requirement, averaged over the annulus.
fn feedback_fraction_dc(inp: &AnalyticInputs) -> Result<f64> {
    let g = inp.constants.g;
    check_scale("idle_prob_dc", g)?;
    let a = inp.alpha;
    let lo = g * pow(inp.region.xi(), 2.0 * a);
    let hi = g * pow(inp.region.rho(), 2.0 * a);
    let mut sum = 0.0;
    let mut factorial = 1.0;
    for m in 0..inp.elements {
        if m > 0 {
            factorial *= m as f64;
        }
        sum += upper_gamma_diff(m as f64 + 1.0 / a, lo, hi)? / factorial;
    }
    Ok(sum / (a * inp.region.radial_span() * pow(g, 1.0 / a)))
}

/// `1 − Π^R` for the RF combiner.
fn feedback_fraction_rf(inp: &AnalyticInputs) -> Result<f64> {
    let y = inp.constants.y;
    check_scale("idle_prob_rf", y)?;
    let a = inp.alpha;
    let l = inp.elements as f64;
    let scale = y / l;
    let diff = upper_gamma_diff(
        1.0 / a,
        scale * pow(inp.region.xi(), 2.0 * a),
        scale * pow(inp.region.rho(), 2.0 * a),
    )?;
    Ok(pow(l, 1.0 / a) * diff / (a * inp.region.radial_span() * pow(y, 1.0 / a)))
}

/// Probability that a terminal can return its feedback bit, `1 − Π^Q`.
pub fn feedback_prob(inp: &AnalyticInputs, combiner: Combiner) -> Result<f64> {
    inp.validate()?;
    let v = match combiner {
        Combiner::Dc => feedback_fraction_dc(inp)?,
        Combiner::Rf => feedback_fraction_rf(inp)?,
    };
    probability("feedback probability", v)
}

/// `Π^D`, the idle probability under DC combining.
///
/// `Z = Σ|g_j|² ~ Gamma(L,1)`, so averaging `P(Z < G r^{2α})` over the
/// radial density gives
/// `1 − [α(ρ²−ξ²)G^{1/α}]⁻¹ Σ_{m<L} [Γ(m+1/α, Gξ^{2α}) − Γ(m+1/α, Gρ^{2α})]/m!`.
pub fn idle_prob_dc(inp: &AnalyticInputs) -> Result<f64> {
    let fb = feedback_prob(inp, Combiner::Dc)?;
    probability("idle probability (dc)", 1.0 - fb)
}

/// `Π^R`, the idle probability under RF combining, with
/// `Z₁ = |Σ g_j|² ~ Exp(mean L)`.
pub fn idle_prob_rf(inp: &AnalyticInputs) -> Result<f64> {
    let fb = feedback_prob(inp, Combiner::Rf)?;
    probability("idle probability (rf)", 1.0 - fb)
}

pub fn idle_prob(inp: &AnalyticInputs, combiner: Combiner) -> Result<f64> {
    match combiner {
        Combiner::Dc => idle_prob_dc(inp),
        Combiner::Rf => idle_prob_rf(inp),
    }
}

/// Density of feedback-capable terminals on one beam, `λ_l^Q = (λ/M)(1 − Π^Q)`.
pub fn active_intensity(inp: &AnalyticInputs, combiner: Combiner) -> Result<f64> {
    Ok(inp.beam_density() * feedback_prob(inp, combiner)?)
}

/// Density of terminals on one beam that cannot feed back, `(λ/M) Π^Q`.
pub fn silent_intensity(inp: &AnalyticInputs, combiner: Combiner) -> Result<f64> {
    Ok(inp.beam_density() * idle_prob(inp, combiner)?)
}

/// `λ_l^Q` evaluated term by term in its expanded closed form, independently
/// of [`active_intensity`]; the two must agree to rounding.
pub fn active_intensity_closed_form(inp: &AnalyticInputs, combiner: Combiner) -> Result<f64> {
    inp.validate()?;
    let a = inp.alpha;
    let m_beams = inp.beams as f64;
    let span = inp.region.radial_span();
    let (xi, rho) = (inp.region.xi(), inp.region.rho());
    match combiner {
        Combiner::Dc => {
            let g = inp.constants.g;
            check_scale("active_intensity_closed_form", g)?;
            let lead = inp.lambda / (m_beams * span);
            let mut total = 0.0;
            for m in 0..inp.elements {
                let s = m as f64 + 1.0 / a;
                let num = upper_gamma_diff(s, g * pow(xi, 2.0 * a), g * pow(rho, 2.0 * a))?;
                total += num / (a * pow(g, 1.0 / a) * gamma_fn(m as f64 + 1.0)?);
            }
            Ok(lead * total)
        }
        Combiner::Rf => {
            let y = inp.constants.y;
            check_scale("active_intensity_closed_form", y)?;
            let l = inp.elements as f64;
            let bracket =
                upper_gamma_diff(1.0 / a, y / l * pow(xi, 2.0 * a), y / l * pow(rho, 2.0 * a))?;
            Ok(inp.lambda * pow(l, 1.0 / a) * bracket / (m_beams * a * span * pow(y, 1.0 / a)))
        }
    }
}

/// SINR CDF of a terminal at distance `d`:
/// `[1 − e^{−x d^α/P_t}/(x+1)^{M−1}]^N`.
pub fn sinr_cdf_conditional(x: f64, d: f64, inp: &AnalyticInputs) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let tail = exp(-x * pow(d, inp.alpha) / inp.p_t) / pow(x + 1.0, inp.beams as f64 - 1.0);
    pow(1.0 - tail, inp.rx_antennas as f64)
}

/// `F_Γ(x)` by adaptive quadrature of the conditional CDF against the
/// radial density. Used wherever the binomial closed form is ill-conditioned.
pub fn sinr_cdf_quadrature(x: f64, inp: &AnalyticInputs) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let region = inp.region;
    quad::integrate(
        |r| sinr_cdf_conditional(x, r, inp) * region.radial_pdf(r),
        region.xi(),
        region.rho(),
        1e-14,
        1e-13,
    )
    .value
}

/// Binomial closed form of `F_Γ(x)` and its condition estimate.
fn sinr_cdf_closed_form(x: f64, inp: &AnalyticInputs) -> Result<(f64, f64)> {
    let a = inp.alpha;
    let n = inp.rx_antennas;
    let two_over_a = 2.0 / a;
    let interference = inp.beams as f64 - 1.0;
    let lead = 2.0 / (a * inp.region.radial_span()) * pow(inp.p_t / x, two_over_a);
    let xi_a = pow(inp.region.xi(), a);
    let rho_a = pow(inp.region.rho(), a);

    let mut signed = 0.0;
    let mut magnitude = 0.0;
    let mut binom = 1.0;
    for m in 1..=n {
        binom *= (n - m + 1) as f64 / m as f64;
        let mf = m as f64;
        let k = x * mf / inp.p_t;
        let diff = upper_gamma_diff(two_over_a, k * xi_a, k * rho_a)?;
        let term = binom * diff / (pow(mf, two_over_a) * pow(x + 1.0, mf * interference));
        magnitude += term;
        signed += if m % 2 == 1 { -term } else { term };
    }
    let value = 1.0 + lead * signed;
    let condition = (1.0 + lead * magnitude) / value.abs();
    Ok((value, condition))
}

/// Spatially averaged SINR CDF `F_Γ(x)` of a terminal's observed beam.
pub fn sinr_cdf(x: f64, inp: &AnalyticInputs) -> Result<f64> {
    inp.validate()?;
    if !(x >= 0.0) {
        return Err(Error::domain("sinr_cdf", x, "x >= 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    if x >= CLOSED_FORM_MIN_X {
        let (value, condition) = sinr_cdf_closed_form(x, inp)?;
        if value.is_finite() && value > 0.0 && condition <= CLOSED_FORM_MAX_CONDITION {
            return probability("sinr cdf", value);
        }
    }
    probability("sinr cdf", sinr_cdf_quadrature(x, inp))
}

/// Interference-limited CDF `[1 − (x+1)^{−(M−1)}]^N` (noise term → 0).
pub fn sinr_cdf_asymptotic(x: f64, beams: u32, rx_antennas: u32) -> f64 {
    if x <= 0.0 || beams <= 1 {
        return 0.0;
    }
    pow(
        1.0 - pow(x + 1.0, -(beams as f64 - 1.0)),
        rx_antennas as f64,
    )
}

/// Outage probability of one beam under one-bit feedback.
///
/// With `A = λ_l^Q|𝓑|` feedback-capable and `S = (λ/M)Π^Q|𝓑|` silent
/// terminals on average and `F = F_Γ(Δ)`:
/// `e^{−A(1−F)} [e^{−S} + (1 − e^{−S}) F]`.
pub fn beam_outage(inp: &AnalyticInputs, combiner: Combiner) -> Result<f64> {
    let f = sinr_cdf(inp.delta, inp)?;
    let area = inp.region.area();
    let active = active_intensity(inp, combiner)? * area;
    let silent = silent_intensity(inp, combiner)? * area;
    let no_positive = exp(-active * (1.0 - f));
    let fallback = exp(-silent) + (-expm1(-silent)) * f;
    probability("beam outage", no_positive * fallback)
}

/// High-power floor `e^{−(λ/M)|𝓑|(1 − F_Γ^∞(Δ))}`, where every terminal
/// feeds back and the noise term vanishes.
pub fn beam_outage_asymptotic(inp: &AnalyticInputs) -> Result<f64> {
    inp.validate()?;
    let f = sinr_cdf_asymptotic(inp.delta, inp.beams, inp.rx_antennas);
    probability(
        "asymptotic beam outage",
        exp(-inp.beam_density() * inp.region.area() * (1.0 - f)),
    )
}
