#![allow(dead_code)]

use obf_core::units::dbm_to_watts;
use obf_core::Scenario;

/// Reference deployment with P_t = P_h = `p_dbm`.
pub fn scenario_at(p_dbm: f64) -> Scenario {
    let mut s = Scenario::default();
    s.p_t = dbm_to_watts(p_dbm);
    s.harvest.p_h = dbm_to_watts(p_dbm);
    s
}

/// One-sample Kolmogorov-Smirnov sup-distance against `cdf`.
pub fn ks_one_sample(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov sup-distance.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut worst) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        worst = worst.max((i as f64 / na - j as f64 / nb).abs());
    }
    worst
}

/// Composite Simpson rule with `panels` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels.is_multiple_of(2));
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// `|a - b| <= k * se`, with a readable failure message.
pub fn assert_within_se(label: &str, a: f64, b: f64, se: f64, k: f64) {
    assert!(
        (a - b).abs() <= k * se,
        "{label}: {a} vs {b} differ by {} > {k} SE ({se})",
        (a - b).abs()
    );
}
