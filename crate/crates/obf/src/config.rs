//! TOML sweep configuration.
//!
//! Powers and thresholds are kept in the units the user wrote (dB, dBm) so
//! a parsed config serializes back to the same document; conversion to
//! linear units happens when a [`Scenario`] is built for a sweep point.

use obf_core::energy::{Combiner, HarvestParams};
use obf_core::geometry::AnnulusRegion;
use obf_core::scenario::MAX_ELEMENTS;
use obf_core::sim::{Coupling, SimMode, SinrSampler};
use obf_core::units::{db_to_linear, dbm_to_watts};
use obf_core::Scenario;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        reason: reason.into(),
    }
}

/// A scalar or a list, for keys that may be swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(alias = "M")]
    m: Option<u32>,
    #[serde(alias = "N")]
    n: Option<u32>,
    #[serde(alias = "L")]
    l: Option<u32>,
    alpha: Option<f64>,
    rho_m: Option<f64>,
    xi_m: Option<f64>,
    lambda_per_m2: Option<f64>,
    delta_db: Option<f64>,
    pt_dbm: Option<OneOrMany>,
    ph_dbm: Option<OneOrMany>,
    sigma2_dbm: Option<f64>,
    i_s_amps: Option<f64>,
    mu: Option<f64>,
    v_t_volts: Option<f64>,
    zeta_dc: Option<f64>,
    zeta_rf: Option<f64>,
    e_dc: Option<f64>,
    e_rf: Option<f64>,
    trials: Option<u64>,
    seed: Option<u64>,
    modes: Option<Vec<String>>,
    sinr_sampler: Option<String>,
    pt_over_noise: Option<bool>,
    workers: Option<usize>,
}

/// Validated sweep configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemParams {
    pub m: u32,
    pub n: u32,
    pub l: u32,
    pub alpha: f64,
    pub rho_m: f64,
    pub xi_m: f64,
    pub lambda_per_m2: f64,
    pub delta_db: f64,
    pub pt_dbm: Vec<f64>,
    /// `None` locks P_h to P_t at every point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ph_dbm: Option<Vec<f64>>,
    pub sigma2_dbm: f64,
    pub i_s_amps: f64,
    pub mu: f64,
    pub v_t_volts: f64,
    pub zeta_dc: f64,
    pub zeta_rf: f64,
    pub e_dc: f64,
    pub e_rf: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(serialize_with = "ser_modes")]
    pub modes: Vec<SimMode>,
    #[serde(serialize_with = "ser_display")]
    pub sinr_sampler: SinrSampler,
    /// Scale the SINR transmit power by 1/σ², i.e. read P_t as a
    /// transmit SNR rather than an absolute power.
    pub pt_over_noise: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn ser_modes<S: serde::Serializer>(modes: &[SimMode], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(modes.iter().map(|m| m.to_string()))
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn default_modes() -> Vec<SimMode> {
    let mut modes = Vec::new();
    for c in Combiner::ALL {
        for cp in [Coupling::Coupled, Coupling::Decoupled] {
            modes.push(SimMode::one_bit(c, cp));
        }
    }
    modes.push(SimMode::random_assignment());
    modes.push(SimMode::full_feedback());
    modes
}

pub const DEFAULT_TRIALS: u64 = 100_000;

/// Parses and validates a TOML config. Only `pt_dbm` is required.
pub fn parse_config(text: &str) -> Result<SystemParams, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let h = HarvestParams::default();
    let modes = match raw.modes {
        None => default_modes(),
        Some(list) => list
            .iter()
            .map(|s| {
                s.parse::<SimMode>()
                    .map_err(|e| invalid("modes", format!("{s:?}: {e}")))
            })
            .collect::<Result<_, _>>()?,
    };
    let sinr_sampler = match raw.sinr_sampler {
        None => SinrSampler::default(),
        Some(s) => s.parse().map_err(|e: &str| invalid("sinr_sampler", e))?,
    };
    let params = SystemParams {
        m: raw.m.unwrap_or(2),
        n: raw.n.unwrap_or(2),
        l: raw.l.unwrap_or(h.elements),
        alpha: raw.alpha.unwrap_or(3.0),
        rho_m: raw.rho_m.unwrap_or(10.0),
        xi_m: raw.xi_m.unwrap_or(2.0),
        lambda_per_m2: raw.lambda_per_m2.unwrap_or(0.1),
        delta_db: raw.delta_db.unwrap_or(10.0),
        pt_dbm: raw
            .pt_dbm
            .ok_or(ConfigError::MissingKey("pt_dbm"))?
            .into_vec(),
        ph_dbm: raw.ph_dbm.map(OneOrMany::into_vec),
        sigma2_dbm: raw.sigma2_dbm.unwrap_or(-10.0),
        i_s_amps: raw.i_s_amps.unwrap_or(h.i_s),
        mu: raw.mu.unwrap_or(h.mu),
        v_t_volts: raw.v_t_volts.unwrap_or(h.v_t),
        zeta_dc: raw.zeta_dc.unwrap_or(h.zeta_d),
        zeta_rf: raw.zeta_rf.unwrap_or(h.zeta_r),
        e_dc: raw.e_dc.unwrap_or(h.e_d),
        e_rf: raw.e_rf.unwrap_or(h.e_r),
        trials: raw.trials.unwrap_or(DEFAULT_TRIALS),
        seed: raw.seed.unwrap_or(0),
        modes,
        sinr_sampler,
        pt_over_noise: raw.pt_over_noise.unwrap_or(false),
        workers: raw.workers,
    };
    params.validate()?;
    Ok(params)
}

fn finite(key: &'static str, x: f64) -> Result<(), ConfigError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("{x} is not finite")))
    }
}

fn positive(key: &'static str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("{x} must be positive")))
    }
}

fn efficiency(key: &'static str, x: f64) -> Result<(), ConfigError> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(invalid(key, format!("{x} must lie in (0, 1]")))
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, v) in [("m", self.m), ("n", self.n), ("l", self.l)] {
            if v < 1 {
                return Err(invalid(key, "must be at least 1"));
            }
        }
        if self.l > MAX_ELEMENTS {
            return Err(invalid(
                "l",
                format!("at most {MAX_ELEMENTS} rectenna elements"),
            ));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", format!("{} must exceed 2", self.alpha)));
        }
        positive("xi_m", self.xi_m)?;
        positive("rho_m", self.rho_m)?;
        if self.xi_m >= self.rho_m {
            return Err(invalid(
                "xi_m",
                format!("{} must be below rho_m = {}", self.xi_m, self.rho_m),
            ));
        }
        if !(self.lambda_per_m2 >= 0.0 && self.lambda_per_m2.is_finite()) {
            return Err(invalid(
                "lambda_per_m2",
                format!("{} must be >= 0", self.lambda_per_m2),
            ));
        }
        finite("delta_db", self.delta_db)?;
        finite("sigma2_dbm", self.sigma2_dbm)?;
        if self.pt_dbm.is_empty() {
            return Err(invalid("pt_dbm", "empty sweep"));
        }
        for &p in &self.pt_dbm {
            finite("pt_dbm", p)?;
        }
        if let Some(ph) = &self.ph_dbm {
            if ph.len() != 1 && ph.len() != self.pt_dbm.len() {
                return Err(invalid(
                    "ph_dbm",
                    format!(
                        "{} entries, expected 1 or {} to pair with pt_dbm",
                        ph.len(),
                        self.pt_dbm.len()
                    ),
                ));
            }
            for &p in ph {
                finite("ph_dbm", p)?;
            }
        }
        positive("i_s_amps", self.i_s_amps)?;
        positive("mu", self.mu)?;
        positive("v_t_volts", self.v_t_volts)?;
        efficiency("zeta_dc", self.zeta_dc)?;
        efficiency("zeta_rf", self.zeta_rf)?;
        efficiency("e_dc", self.e_dc)?;
        efficiency("e_rf", self.e_rf)?;
        if self.trials < 1 {
            return Err(invalid("trials", "need at least one trial"));
        }
        if self.modes.is_empty() {
            return Err(invalid("modes", "no modes to run"));
        }
        if self.workers == Some(0) {
            return Err(invalid("workers", "need at least one worker"));
        }
        // catches anything the linear conversions push out of range
        for (pt, ph) in self.points() {
            self.scenario(pt, ph)
                .map_err(|e| invalid("pt_dbm", format!("at ({pt}, {ph}) dBm: {e}")))?;
        }
        Ok(())
    }

    /// `(pt_dbm, ph_dbm)` pairs in sweep order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        match &self.ph_dbm {
            None => self.pt_dbm.iter().map(|&p| (p, p)).collect(),
            Some(ph) if ph.len() == 1 => self.pt_dbm.iter().map(|&p| (p, ph[0])).collect(),
            Some(ph) => self
                .pt_dbm
                .iter()
                .copied()
                .zip(ph.iter().copied())
                .collect(),
        }
    }

    /// Linear-unit scenario for one sweep point.
    pub fn scenario(&self, pt_dbm: f64, ph_dbm: f64) -> obf_core::Result<Scenario> {
        let sigma2 = dbm_to_watts(self.sigma2_dbm);
        let p_t = dbm_to_watts(pt_dbm);
        let s = Scenario {
            region: AnnulusRegion::new(self.xi_m, self.rho_m)?,
            beams: self.m,
            rx_antennas: self.n,
            alpha: self.alpha,
            lambda: self.lambda_per_m2,
            delta: db_to_linear(self.delta_db),
            p_t: if self.pt_over_noise {
                p_t / sigma2
            } else {
                p_t
            },
            sigma2,
            harvest: HarvestParams {
                i_s: self.i_s_amps,
                mu: self.mu,
                v_t: self.v_t_volts,
                zeta_d: self.zeta_dc,
                zeta_r: self.zeta_rf,
                e_d: self.e_dc,
                e_r: self.e_rf,
                p_h: dbm_to_watts(ph_dbm),
                elements: self.l,
            },
        };
        s.validate()?;
        Ok(s)
    }

    /// TOML text that parses back to `self`.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("params serialize to TOML")
    }
}
