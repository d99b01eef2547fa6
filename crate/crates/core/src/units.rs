//! dB / dBm conversions. Everything inside the crate is linear (watts).

use libm::{log10, pow};

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    pow(10.0, db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * log10(x)
}

/// dBm to watts: `10^((dbm - 30)/10)`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    pow(10.0, (dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * log10(w) + 30.0
}
