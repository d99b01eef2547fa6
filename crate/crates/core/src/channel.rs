//! Downlink physical layer: random orthonormal beams, per-beam SINR and
//! selection combining across the receive antennas.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use libm::{pow, sqrt};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

/// Circularly-symmetric complex Gaussian with unit total variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// `M` orthonormal beamforming vectors in `C^M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSet {
    m: usize,
    // column-major: beam l occupies [l*m, (l+1)*m)
    data: Vec<Complex64>,
}

impl BeamSet {
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Beam `l`, zero-based.
    pub fn beam(&self, l: usize) -> &[Complex64] {
        &self.data[l * self.m..(l + 1) * self.m]
    }

    /// Largest deviation of the Gram matrix `UᴴU` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.m {
            for b in 0..self.m {
                let ip = inner(self.beam(a), self.beam(b));
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((ip - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// `aᴴ b`.
fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Draws a Haar-distributed unitary basis.
///
/// Gram-Schmidt on the columns of an i.i.d. complex Gaussian matrix is the
/// QR decomposition whose triangular factor has a positive real diagonal,
/// which is the normalisation that makes `Q` exactly Haar. Each column is
/// orthogonalised twice to keep the Gram error near machine precision.
pub fn draw_beams<R: Rng + ?Sized>(m: usize, rng: &mut R) -> BeamSet {
    assert!(m >= 1, "need at least one beam");
    let mut data: Vec<Complex64> = (0..m * m).map(|_| complex_gaussian(rng)).collect();
    for k in 0..m {
        for _pass in 0..2 {
            for j in 0..k {
                let (done, rest) = data.split_at_mut(k * m);
                let qj = &done[j * m..(j + 1) * m];
                let col = &mut rest[..m];
                let proj = inner(qj, col);
                for (c, q) in col.iter_mut().zip(qj) {
                    *c -= proj * q;
                }
            }
        }
        let col = &mut data[k * m..(k + 1) * m];
        let norm = sqrt(col.iter().map(|c| c.norm_sqr()).sum::<f64>());
        for c in col.iter_mut() {
            *c /= norm;
        }
    }
    BeamSet { m, data }
}

/// Downlink channel of one terminal: `N` rows of `M` coefficients, row `j`
/// being `h_jᵀ` for receive antenna `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DownlinkDraw {
    n: usize,
    m: usize,
    h: Vec<Complex64>,
}

impl DownlinkDraw {
    pub fn sample<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Self {
        let h = (0..n * m).map(|_| complex_gaussian(rng)).collect();
        DownlinkDraw { n, m, h }
    }

    /// Builds a draw from `n` rows of equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let m = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == m), "ragged channel rows");
        DownlinkDraw {
            n: rows.len(),
            m,
            h: rows.iter().flatten().copied().collect(),
        }
    }

    pub(crate) fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for c in self.h.iter_mut() {
            *c = complex_gaussian(rng);
        }
    }

    pub fn antennas(&self) -> usize {
        self.n
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        &self.h[j * self.m..(j + 1) * self.m]
    }
}

/// Noise term of the SINR, `d^α / P_t`.
#[inline]
pub fn noise_term(d: f64, alpha: f64, p_t: f64) -> f64 {
    pow(d, alpha) / p_t
}

/// SINR of beam `l` (zero-based) at one antenna:
/// `|hᵀu_l|² / (d^α/P_t + Σ_{m≠l} |hᵀu_m|²)`.
pub fn beam_sinr(
    h_row: &[Complex64],
    beams: &BeamSet,
    l: usize,
    d: f64,
    alpha: f64,
    p_t: f64,
) -> f64 {
    let noise = noise_term(d, alpha, p_t);
    let mut signal = 0.0;
    let mut interference = 0.0;
    for m in 0..beams.len() {
        let gain: Complex64 = h_row.iter().zip(beams.beam(m)).map(|(h, u)| h * u).sum();
        if m == l {
            signal = gain.norm_sqr();
        } else {
            interference += gain.norm_sqr();
        }
    }
    signal / (noise + interference)
}

/// Selection-combined SINR of beam `l`: the best antenna's [`beam_sinr`].
pub fn sc_sinr(h: &DownlinkDraw, beams: &BeamSet, l: usize, d: f64, alpha: f64, p_t: f64) -> f64 {
    (0..h.antennas())
        .map(|j| beam_sinr(h.row(j), beams, l, d, alpha, p_t))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Samples the selection-combined SINR without building beams.
///
/// The projections of an i.i.d. CN(0,1) vector onto orthonormal beams are
/// themselves i.i.d. CN(0,1), so each antenna sees `X/(d^α/P_t + S)` with
/// `X ~ Exp(1)` and `S` a sum of `M − 1` unit exponentials.
pub fn sinr_direct_sample<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    d: f64,
    alpha: f64,
    p_t: f64,
    rng: &mut R,
) -> f64 {
    let noise = noise_term(d, alpha, p_t);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..n {
        let signal: f64 = Exp1.sample(rng);
        let interference: f64 = (1..m).map(|_| -> f64 { Exp1.sample(rng) }).sum();
        best = best.max(signal / (noise + interference));
    }
    best
}

/// Direct-sampler SINRs for every beam at once, each selection-combined on
/// its own best antenna. Writes `out[l]` for `l < out.len()` (= `M`).
pub fn sinr_direct_all_beams<R: Rng + ?Sized>(
    n: usize,
    noise: f64,
    out: &mut [f64],
    scratch: &mut Vec<f64>,
    rng: &mut R,
) {
    let m = out.len();
    out.fill(f64::NEG_INFINITY);
    scratch.clear();
    scratch.resize(m, 0.0);
    for _ in 0..n {
        let mut total = 0.0;
        for x in scratch.iter_mut() {
            *x = Exp1.sample(rng);
            total += *x;
        }
        for (o, &x) in out.iter_mut().zip(scratch.iter()) {
            *o = o.max(x / (noise + (total - x)));
        }
    }
}

/// Constructive counterpart of [`sinr_direct_all_beams`].
pub fn sc_sinr_all_beams(
    h: &DownlinkDraw,
    beams: &BeamSet,
    d: f64,
    alpha: f64,
    p_t: f64,
    out: &mut [f64],
) {
    for (l, o) in out.iter_mut().enumerate() {
        *o = sc_sinr(h, beams, l, d, alpha, p_t);
    }
}

/// Zero-filled `N × M` draw, for buffer reuse.
pub(crate) fn empty_draw(n: usize, m: usize) -> DownlinkDraw {
    DownlinkDraw {
        n,
        m,
        h: vec![Complex64::new(0.0, 0.0); n * m],
    }
}
