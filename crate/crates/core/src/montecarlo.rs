//! Sampled detection records.
//!
//! Each trial draws one frequency tuple from `|amplitude|²` by inverse CDF
//! over the state's entries in lexicographic tuple order. The generator is
//! ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `SeedableRng::seed_from_u64`, and uniforms come from `Rng::gen::<f64>()`;
//! both are portable, so a `(state, trials, seed)` triple reproduces the
//! same record on every platform.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::Frequency;
use crate::measurement::NarrowbandDetector;
use crate::state::{BinTuple, Channel, ChannelId, PhotonState};

/// Name of the generator, recorded in result provenance.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.3, seed_from_u64)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRun {
    pub seed: u64,
    pub trials: u64,
    pub channels: Vec<Channel>,
    pub events: Vec<BinTuple>,
}

impl SampleRun {
    pub fn position(&self, id: ChannelId) -> Option<usize> {
        self.channels.iter().position(|c| c.id == id)
    }

    pub fn event_frequencies(&self, event: &[usize]) -> Vec<Frequency> {
        event
            .iter()
            .zip(&self.channels)
            .map(|(&k, c)| c.grid.center(k))
            .collect()
    }

    /// Number of events that fire `detector`.
    pub fn firing_count(&self, detector: &NarrowbandDetector) -> Result<u64> {
        let pos = self
            .position(detector.channel())
            .ok_or(Error::MissingChannel(detector.channel()))?;
        let grid = self.channels[pos].grid;
        Ok(self
            .events
            .iter()
            .filter(|e| detector.accepts(grid.center(e[pos])))
            .count() as u64)
    }
}

pub fn sample_frequencies(state: &PhotonState, trials: u64, seed: u64) -> Result<SampleRun> {
    if trials == 0 {
        return Err(Error::InvalidSampling("trials must be at least 1".into()));
    }
    state.require_normalized()?;

    let tuples: Vec<&BinTuple> = state.iter().map(|(t, _)| t).collect();
    let mut cdf = Vec::with_capacity(tuples.len());
    let mut acc = 0.0;
    for (_, a) in state.iter() {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let events = (0..trials)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * total;
            let i = cdf.partition_point(|&c| c <= u).min(tuples.len() - 1);
            tuples[i].clone()
        })
        .collect();

    Ok(SampleRun {
        seed,
        trials,
        channels: state.channels().to_vec(),
        events,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramCell {
    pub center_a: Frequency,
    pub center_b: Frequency,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceHistogram {
    pub channel_a: ChannelId,
    pub channel_b: ChannelId,
    pub bandwidth_a: Frequency,
    pub bandwidth_b: Frequency,
    pub cells: Vec<HistogramCell>,
    /// Events that fell in no cell.
    pub unassigned: u64,
    pub trials: u64,
}

impl CoincidenceHistogram {
    pub fn counts(&self) -> Vec<u64> {
        self.cells.iter().map(|c| c.count).collect()
    }

    /// Counts summed over `center_b`, keyed by `center_a`.
    pub fn marginal_a(&self) -> BTreeMap<Frequency, u64> {
        let mut m = BTreeMap::new();
        for c in &self.cells {
            *m.entry(c.center_a).or_default() += c.count;
        }
        m
    }

    pub fn marginal_b(&self) -> BTreeMap<Frequency, u64> {
        let mut m = BTreeMap::new();
        for c in &self.cells {
            *m.entry(c.center_b).or_default() += c.count;
        }
        m
    }
}

/// Bins sampled events into coincidence cells. `det_a` and `det_b` fix the
/// channels and bandwidths; each `(Ω_a, Ω_b)` in `sweep` retunes them. An
/// event is counted in the first cell where both detectors fire, so counts
/// plus `unassigned` always equal the number of trials.
pub fn coincidence_histogram(
    run: &SampleRun,
    det_a: &NarrowbandDetector,
    det_b: &NarrowbandDetector,
    sweep: &[(Frequency, Frequency)],
) -> Result<CoincidenceHistogram> {
    if run.events.is_empty() {
        return Err(Error::InvalidSampling("run has no events".into()));
    }
    if det_a.channel() == det_b.channel() {
        return Err(Error::InvalidMeasurement(format!(
            "both detectors watch {}",
            det_a.channel()
        )));
    }
    let pa = run
        .position(det_a.channel())
        .ok_or(Error::MissingChannel(det_a.channel()))?;
    let pb = run
        .position(det_b.channel())
        .ok_or(Error::MissingChannel(det_b.channel()))?;
    let ga = run.channels[pa].grid;
    let gb = run.channels[pb].grid;
    let detectors: Vec<(NarrowbandDetector, NarrowbandDetector)> = sweep
        .iter()
        .map(|&(a, b)| (det_a.tuned_to(a), det_b.tuned_to(b)))
        .collect();

    let mut counts = vec![0u64; sweep.len()];
    let mut unassigned = 0;
    for e in &run.events {
        let (wa, wb) = (ga.center(e[pa]), gb.center(e[pb]));
        match detectors
            .iter()
            .position(|(da, db)| da.accepts(wa) && db.accepts(wb))
        {
            Some(i) => counts[i] += 1,
            None => unassigned += 1,
        }
    }
    Ok(CoincidenceHistogram {
        channel_a: det_a.channel(),
        channel_b: det_b.channel(),
        bandwidth_a: det_a.bandwidth(),
        bandwidth_b: det_b.bandwidth(),
        cells: sweep
            .iter()
            .zip(counts)
            .map(|(&(center_a, center_b), count)| HistogramCell {
                center_a,
                center_b,
                count,
            })
            .collect(),
        unassigned,
        trials: run.trials,
    })
}

/// Pearson statistic `Σ (O - E)² / E` over cells with `E > 0`.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .fold(0.0, |acc, x| acc + x)
}
