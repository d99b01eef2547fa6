//! Parallel sweep over power points and modes.
//!
//! Work is split into fixed-size trial chunks that do not depend on the
//! worker count. Each trial draws from its own `(seed, trial)` stream and
//! outage counts are summed as integers, so any pool size yields the same
//! rows.

use crate::config::SystemParams;
use obf_core::analytic::{beam_outage, beam_outage_asymptotic, AnalyticInputs};
use obf_core::sim::{OutageEstimate, SimMode, Simulator};
use obf_core::Scenario;
use rayon::prelude::*;
use thiserror::Error;

/// Trials per work item.
pub const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub pt_dbm: f64,
    pub ph_dbm: f64,
    pub mode: SimMode,
    pub estimate: OutageEstimate,
    /// Closed-form outage, one-bit modes only.
    pub analytic: Option<f64>,
    pub asymptotic: Option<f64>,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("at pt = {pt_dbm} dBm, ph = {ph_dbm} dBm{}: {source}", mode.map(|m| format!(", mode {m}")).unwrap_or_default())]
    Point {
        pt_dbm: f64,
        ph_dbm: f64,
        mode: Option<SimMode>,
        source: obf_core::Error,
    },
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

struct Task {
    point: usize,
    mode: usize,
    first: u64,
    end: u64,
}

/// Runs every `(point, mode)` pair of `params` on `workers` threads.
pub fn run_sweep(params: &SystemParams, workers: usize) -> Result<Vec<SweepRow>, SweepError> {
    let points = params.points();
    let scenarios: Vec<Scenario> = points
        .iter()
        .map(|&(pt, ph)| {
            params.scenario(pt, ph).map_err(|source| SweepError::Point {
                pt_dbm: pt,
                ph_dbm: ph,
                mode: None,
                source,
            })
        })
        .collect::<Result<_, _>>()?;

    let modes = &params.modes;
    let mut tasks = Vec::new();
    for point in 0..points.len() {
        for mode in 0..modes.len() {
            let mut first = 0;
            while first < params.trials {
                let end = (first + CHUNK).min(params.trials);
                tasks.push(Task {
                    point,
                    mode,
                    first,
                    end,
                });
                first = end;
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()?;
    let counts: Vec<Result<u64, SweepError>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let mode = modes[t.mode];
                let mut sim =
                    Simulator::with_sampler(&scenarios[t.point], mode, params.sinr_sampler)
                        .map_err(|source| SweepError::Point {
                            pt_dbm: points[t.point].0,
                            ph_dbm: points[t.point].1,
                            mode: Some(mode),
                            source,
                        })?;
                Ok(sim.count_outages(params.seed, t.first..t.end, 0))
            })
            .collect()
    });

    let mut outages = vec![0u64; points.len() * modes.len()];
    for (t, c) in tasks.iter().zip(counts) {
        outages[t.point * modes.len() + t.mode] += c?;
    }

    let mut rows = Vec::with_capacity(outages.len());
    for (i, (&(pt, ph), scenario)) in points.iter().zip(&scenarios).enumerate() {
        for (j, &mode) in modes.iter().enumerate() {
            let at = |source| SweepError::Point {
                pt_dbm: pt,
                ph_dbm: ph,
                mode: Some(mode),
                source,
            };
            let (analytic, asymptotic) = if mode.is_one_bit() {
                let inp = AnalyticInputs::from_scenario(scenario).map_err(at)?;
                (
                    Some(beam_outage(&inp, mode.combiner).map_err(at)?),
                    Some(beam_outage_asymptotic(&inp).map_err(at)?),
                )
            } else {
                (None, None)
            };
            rows.push(SweepRow {
                pt_dbm: pt,
                ph_dbm: ph,
                mode,
                estimate: OutageEstimate::from_counts(
                    outages[i * modes.len() + j],
                    params.trials,
                    params.seed,
                ),
                analytic,
                asymptotic,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use obf_core::energy::Combiner;
    use obf_core::sim::{estimate_outage_on_beam, Coupling};

    #[test]
    fn empty_region_gives_certain_outage() {
        let p = parse_config(
            "pt_dbm = 30\nlambda_per_m2 = 0.0\ntrials = 500\nmodes = [\"one_bit:dc\"]",
        )
        .unwrap();
        let rows = run_sweep(&p, 2).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].estimate.p_hat, 1.0);
        assert_eq!(rows[0].analytic, Some(1.0));
    }

    #[test]
    fn rows_follow_point_then_mode_order() {
        let p = parse_config("pt_dbm = [40, 20]\ntrials = 300").unwrap();
        let rows = run_sweep(&p, 3).unwrap();
        assert_eq!(rows.len(), 2 * p.modes.len());
        for (k, row) in rows.iter().enumerate() {
            assert_eq!(row.pt_dbm, p.pt_dbm[k / p.modes.len()]);
            assert_eq!(row.mode, p.modes[k % p.modes.len()]);
            assert_eq!(row.analytic.is_some(), row.mode.is_one_bit());
            assert_eq!(row.asymptotic.is_some(), row.mode.is_one_bit());
        }
    }

    #[test]
    fn chunked_counts_equal_the_serial_estimate() {
        let text = format!(
            "pt_dbm = 45\ntrials = {}\nseed = 3\npt_over_noise = true",
            2 * CHUNK + 17
        );
        let p = parse_config(&text).unwrap();
        let rows = run_sweep(&p, 4).unwrap();
        let s = p.scenario(45.0, 45.0).unwrap();
        for row in rows {
            let serial =
                estimate_outage_on_beam(&s, row.mode, p.sinr_sampler, p.trials, 3, 0).unwrap();
            assert_eq!(row.estimate, serial, "{}", row.mode);
        }
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let p = parse_config("pt_dbm = [20, 35]\ntrials = 9000\nseed = 11\npt_over_noise = true")
            .unwrap();
        let one = run_sweep(&p, 1).unwrap();
        for w in [2, 5] {
            assert_eq!(run_sweep(&p, w).unwrap(), one);
        }
    }

    #[test]
    fn high_power_analytic_meets_asymptote() {
        let p = parse_config(
            "pt_dbm = 100\ntrials = 1\nmodes = [\"one_bit:dc\", \"one_bit:rf:decoupled\"]",
        )
        .unwrap();
        for row in run_sweep(&p, 1).unwrap() {
            let (a, b) = (row.analytic.unwrap(), row.asymptotic.unwrap());
            assert!((a - b).abs() < 1e-3);
            assert!((b - 0.0730).abs() < 1e-4);
        }
        assert_eq!(
            p.modes[1],
            SimMode::one_bit(Combiner::Rf, Coupling::Decoupled)
        );
    }
}
