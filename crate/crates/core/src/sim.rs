//! Per-slot Monte-Carlo engine.
//!
//! One trial is one time slot: sample the terminal field, preassign beams,
//! evaluate each terminal's energy state and SINR, then resolve every beam
//! according to the scheme. Trial `t` of a run with seed `s` always draws
//! from ChaCha8 stream `t` of key `s`, so any partition of the trial range
//! across workers reproduces the serial result exactly.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use libm::sqrt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{self, BeamSet, DownlinkDraw};
use crate::energy::{self, Combiner, WptDraw};
use crate::geometry::PointCount;
use crate::{Error, Result, Scenario};

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.576;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Preassigned beam, wireless-powered 1-bit feedback.
    OneBit,
    /// No feedback: each beam goes to a uniformly chosen terminal.
    RandomAssignment,
    /// Every terminal reports its SINR on every beam; best terminal wins.
    FullFeedback,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::OneBit => "one_bit",
            Scheme::RandomAssignment => "random_assignment",
            Scheme::FullFeedback => "full_feedback",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Whether a terminal's SINR uses its own distance (coupled) or an
/// independently resampled one (decoupled). The decoupled form makes
/// activity and SINR independent, which is the structure the closed-form
/// outage assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coupling {
    Coupled,
    Decoupled,
}

impl Coupling {
    pub fn as_str(self) -> &'static str {
        match self {
            Coupling::Coupled => "coupled",
            Coupling::Decoupled => "decoupled",
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// How per-terminal SINRs are generated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SinrSampler {
    /// Exponential projections, no beam construction.
    #[default]
    Direct,
    /// Haar beams per slot and a full `N × M` channel per terminal.
    Constructive,
}

impl SinrSampler {
    pub fn as_str(self) -> &'static str {
        match self {
            SinrSampler::Direct => "direct",
            SinrSampler::Constructive => "constructive",
        }
    }
}

impl fmt::Display for SinrSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for SinrSampler {
    type Err = &'static str;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "direct" => Ok(SinrSampler::Direct),
            "constructive" => Ok(SinrSampler::Constructive),
            _ => Err("sinr sampler must be `direct` or `constructive`"),
        }
    }
}

/// Scheme plus the combiner and coupling that apply to one-bit feedback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimMode {
    pub scheme: Scheme,
    pub combiner: Combiner,
    pub coupling: Coupling,
}

impl SimMode {
    pub const fn one_bit(combiner: Combiner, coupling: Coupling) -> Self {
        SimMode {
            scheme: Scheme::OneBit,
            combiner,
            coupling,
        }
    }

    pub const fn random_assignment() -> Self {
        SimMode {
            scheme: Scheme::RandomAssignment,
            combiner: Combiner::Dc,
            coupling: Coupling::Coupled,
        }
    }

    pub const fn full_feedback() -> Self {
        SimMode {
            scheme: Scheme::FullFeedback,
            combiner: Combiner::Dc,
            coupling: Coupling::Coupled,
        }
    }

    pub fn is_one_bit(&self) -> bool {
        self.scheme == Scheme::OneBit
    }
}

impl fmt::Display for SimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one_bit() {
            write!(f, "{}:{}:{}", self.scheme, self.combiner, self.coupling)
        } else {
            write!(f, "{}", self.scheme)
        }
    }
}

impl FromStr for SimMode {
    type Err = &'static str;

    /// `one_bit:<dc|rf>[:<coupled|decoupled>]`, `random_assignment` or
    /// `full_feedback`. One-bit coupling defaults to `coupled`.
    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        let mut parts = s.trim().split(':');
        match parts.next() {
            Some("one_bit") => {
                let combiner = parts
                    .next()
                    .ok_or("one_bit mode needs a combiner, e.g. one_bit:dc")?
                    .parse()?;
                let coupling = match parts.next() {
                    None | Some("coupled") => Coupling::Coupled,
                    Some("decoupled") => Coupling::Decoupled,
                    Some(_) => return Err("coupling must be `coupled` or `decoupled`"),
                };
                if parts.next().is_some() {
                    return Err("too many `:` fields in mode");
                }
                Ok(SimMode::one_bit(combiner, coupling))
            }
            Some("random_assignment") if parts.next().is_none() => Ok(SimMode::random_assignment()),
            Some("full_feedback") if parts.next().is_none() => Ok(SimMode::full_feedback()),
            _ => {
                Err("mode must be one_bit:<dc|rf>[:<coupling>], random_assignment or full_feedback")
            }
        }
    }
}

/// One sampled terminal after the energy and SINR steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Terminal {
    pub distance: f64,
    /// Preassigned beam, zero-based.
    pub beam: usize,
    /// Can power its feedback bit this slot.
    pub active: bool,
    /// Selection-combined SINR on the preassigned beam.
    pub sinr: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BeamCounts {
    /// Terminals able to send feedback.
    pub feedback: usize,
    /// Terminals that could not (or, without feedback, did not) report.
    pub silent: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub beam_outage: Vec<bool>,
    pub counts: Vec<BeamCounts>,
}

/// Outage frequency with a 99% normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub outages: u64,
    pub trials: u64,
    pub ci_halfwidth: f64,
    pub seed: u64,
}

impl OutageEstimate {
    pub fn from_counts(outages: u64, trials: u64, seed: u64) -> Self {
        assert!(trials > 0 && outages <= trials);
        let p_hat = outages as f64 / trials as f64;
        OutageEstimate {
            p_hat,
            outages,
            trials,
            ci_halfwidth: Z_99 * sqrt(p_hat * (1.0 - p_hat) / trials as f64),
            seed,
        }
    }

    /// Binomial standard error `sqrt(p(1−p)/n)`.
    pub fn standard_error(&self) -> f64 {
        self.ci_halfwidth / Z_99
    }

    /// Fewer than ten expected events: the estimate is not trustworthy.
    pub fn is_rare_event(&self) -> bool {
        self.p_hat < 10.0 / self.trials as f64
    }
}

/// RNG for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Reusable per-worker simulation state.
#[derive(Debug, Clone)]
pub struct Simulator {
    scenario: Scenario,
    mode: SimMode,
    sampler: SinrSampler,
    count: PointCount,
    terminals: Vec<Terminal>,
    wpt: WptDraw,
    downlink: DownlinkDraw,
    beam_sinrs: Vec<f64>,
    best_on_beam: Vec<f64>,
    scratch: Vec<f64>,
}

impl Simulator {
    pub fn new(scenario: &Scenario, mode: SimMode) -> Result<Self> {
        Self::with_sampler(scenario, mode, SinrSampler::Direct)
    }

    pub fn with_sampler(scenario: &Scenario, mode: SimMode, sampler: SinrSampler) -> Result<Self> {
        scenario.validate()?;
        let m = scenario.beams as usize;
        let n = scenario.rx_antennas as usize;
        let l = scenario.harvest.elements as usize;
        Ok(Simulator {
            scenario: scenario.clone(),
            mode,
            sampler,
            count: PointCount::new(&scenario.region, scenario.lambda)?,
            terminals: Vec::new(),
            wpt: WptDraw::from_channels(vec![Default::default(); l]),
            downlink: channel::empty_draw(n, m),
            beam_sinrs: vec![0.0; m],
            best_on_beam: vec![0.0; m],
            scratch: Vec::with_capacity(m),
        })
    }

    pub fn mode(&self) -> SimMode {
        self.mode
    }

    /// Terminals of the most recent trial.
    pub fn terminals(&self) -> &[Terminal] {
        &self.terminals
    }

    /// Runs one slot.
    pub fn run_trial<R: Rng + ?Sized>(&mut self, rng: &mut R) -> TrialRecord {
        let m = self.scenario.beams as usize;
        let mut outage = vec![true; m];
        let mut counts = vec![BeamCounts::default(); m];
        self.simulate_slot(rng, &mut outage, &mut counts);
        TrialRecord {
            beam_outage: outage,
            counts,
        }
    }

    /// Counts outages of `beam` over trials `range` of the run seeded `seed`.
    pub fn count_outages(&mut self, seed: u64, range: Range<u64>, beam: usize) -> u64 {
        let m = self.scenario.beams as usize;
        assert!(beam < m, "beam index out of range");
        let mut outage = vec![true; m];
        let mut counts = vec![BeamCounts::default(); m];
        let mut hits = 0;
        for trial in range {
            let mut rng = trial_rng(seed, trial);
            self.simulate_slot(&mut rng, &mut outage, &mut counts);
            hits += outage[beam] as u64;
        }
        hits
    }

    fn simulate_slot<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        outage: &mut [bool],
        counts: &mut [BeamCounts],
    ) {
        let s = &self.scenario;
        let m = s.beams as usize;
        outage.fill(true);
        counts.fill(BeamCounts::default());

        // (1) field, (2) beam preassignment
        let count = self.count.sample(rng);
        self.terminals.clear();
        for _ in 0..count {
            let distance = s.region.sample_distance(rng);
            self.terminals.push(Terminal {
                distance,
                beam: 0,
                active: true,
                sinr: 0.0,
            });
        }
        for t in self.terminals.iter_mut() {
            t.beam = rng.random_range(0..m);
        }

        let beams = match self.sampler {
            SinrSampler::Constructive => Some(channel::draw_beams(m, rng)),
            SinrSampler::Direct => None,
        };

        match self.mode.scheme {
            Scheme::OneBit => self.one_bit_slot(rng, beams.as_ref(), outage, counts),
            Scheme::RandomAssignment => {
                self.random_assignment_slot(rng, beams.as_ref(), outage, counts)
            }
            Scheme::FullFeedback => self.full_feedback_slot(rng, beams.as_ref(), outage, counts),
        }
    }

    /// SC SINR on `beam` for a terminal whose SINR-relevant distance is `d`.
    fn sample_sinr<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        beams: Option<&BeamSet>,
        beam: usize,
        d: f64,
    ) -> f64 {
        let s = &self.scenario;
        match beams {
            None => channel::sinr_direct_sample(
                s.beams as usize,
                s.rx_antennas as usize,
                d,
                s.alpha,
                s.p_t,
                rng,
            ),
            Some(b) => {
                self.downlink.resample(rng);
                channel::sc_sinr(&self.downlink, b, beam, d, s.alpha, s.p_t)
            }
        }
    }

    fn one_bit_slot<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        beams: Option<&BeamSet>,
        outage: &mut [bool],
        counts: &mut [BeamCounts],
    ) {
        let combiner = self.mode.combiner;
        let coupling = self.mode.coupling;
        for i in 0..self.terminals.len() {
            let t = self.terminals[i];
            // (3) energy
            self.wpt.resample(rng);
            let s = &self.scenario;
            let harvested = energy::harvest(combiner, &self.wpt, t.distance, &s.harvest, s.alpha);
            let active = energy::is_active(harvested, t.distance, s.sigma2, s.alpha);
            // (4) SINR on the preassigned beam
            let d = match coupling {
                Coupling::Coupled => t.distance,
                Coupling::Decoupled => s.region.sample_distance(rng),
            };
            let sinr = self.sample_sinr(rng, beams, t.beam, d);
            let t = &mut self.terminals[i];
            t.active = active;
            t.sinr = sinr;
        }

        // (5) per-beam resolution
        let delta = self.scenario.delta;
        for (b, (out, c)) in outage.iter_mut().zip(counts.iter_mut()).enumerate() {
            let mut positive = false;
            for t in self.terminals.iter().filter(|t| t.beam == b) {
                c.total += 1;
                if t.active {
                    c.feedback += 1;
                    positive |= t.sinr >= delta;
                } else {
                    c.silent += 1;
                }
            }
            *out = if positive {
                false
            } else if c.silent > 0 {
                // no positive report: a uniformly chosen silent terminal gets the beam
                let pick = rng.random_range(0..c.silent);
                let chosen = self
                    .terminals
                    .iter()
                    .filter(|t| t.beam == b && !t.active)
                    .nth(pick)
                    .expect("pick < silent count");
                chosen.sinr < delta
            } else {
                // only negative reports (or nobody): any choice is in outage
                true
            };
        }
    }

    fn random_assignment_slot<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        beams: Option<&BeamSet>,
        outage: &mut [bool],
        counts: &mut [BeamCounts],
    ) {
        for i in 0..self.terminals.len() {
            let t = self.terminals[i];
            let sinr = self.sample_sinr(rng, beams, t.beam, t.distance);
            self.terminals[i].sinr = sinr;
            self.terminals[i].active = false;
        }
        let delta = self.scenario.delta;
        for (b, (out, c)) in outage.iter_mut().zip(counts.iter_mut()).enumerate() {
            c.total = self.terminals.iter().filter(|t| t.beam == b).count();
            c.silent = c.total;
            *out = if c.total == 0 {
                true
            } else {
                let pick = rng.random_range(0..c.total);
                let chosen = self
                    .terminals
                    .iter()
                    .filter(|t| t.beam == b)
                    .nth(pick)
                    .expect("pick < total");
                chosen.sinr < delta
            };
        }
    }

    fn full_feedback_slot<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        beams: Option<&BeamSet>,
        outage: &mut [bool],
        counts: &mut [BeamCounts],
    ) {
        let s = &self.scenario;
        let n = s.rx_antennas as usize;
        self.best_on_beam.fill(f64::NEG_INFINITY);
        for i in 0..self.terminals.len() {
            let t = self.terminals[i];
            match beams {
                None => {
                    let noise = channel::noise_term(t.distance, s.alpha, s.p_t);
                    channel::sinr_direct_all_beams(
                        n,
                        noise,
                        &mut self.beam_sinrs,
                        &mut self.scratch,
                        rng,
                    );
                }
                Some(b) => {
                    self.downlink.resample(rng);
                    channel::sc_sinr_all_beams(
                        &self.downlink,
                        b,
                        t.distance,
                        s.alpha,
                        s.p_t,
                        &mut self.beam_sinrs,
                    );
                }
            }
            for (best, &v) in self.best_on_beam.iter_mut().zip(&self.beam_sinrs) {
                *best = best.max(v);
            }
            self.terminals[i].sinr = self.beam_sinrs[t.beam];
        }
        let total = self.terminals.len();
        for ((out, c), &best) in outage
            .iter_mut()
            .zip(counts.iter_mut())
            .zip(&self.best_on_beam)
        {
            // every terminal competes for every beam
            *c = BeamCounts {
                feedback: total,
                silent: 0,
                total,
            };
            *out = best < s.delta;
        }
    }
}

/// Runs one slot with a fresh simulator.
pub fn run_trial<R: Rng + ?Sized>(
    scenario: &Scenario,
    mode: SimMode,
    rng: &mut R,
) -> Result<TrialRecord> {
    Ok(Simulator::new(scenario, mode)?.run_trial(rng))
}

/// Serial estimate of the outage probability of beam `beam`.
pub fn estimate_outage_on_beam(
    scenario: &Scenario,
    mode: SimMode,
    sampler: SinrSampler,
    trials: u64,
    seed: u64,
    beam: usize,
) -> Result<OutageEstimate> {
    if trials == 0 {
        return Err(Error::invalid("trials", 0.0, "need at least one trial"));
    }
    if beam >= scenario.beams as usize {
        return Err(Error::invalid(
            "beam",
            beam as f64,
            "beam index out of range",
        ));
    }
    let mut sim = Simulator::with_sampler(scenario, mode, sampler)?;
    let outages = sim.count_outages(seed, 0..trials, beam);
    Ok(OutageEstimate::from_counts(outages, trials, seed))
}

/// Serial estimate of the first beam's outage probability (beams are
/// exchangeable) with the default sampler.
pub fn estimate_outage(
    scenario: &Scenario,
    mode: SimMode,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    estimate_outage_on_beam(scenario, mode, SinrSampler::Direct, trials, seed, 0)
}
