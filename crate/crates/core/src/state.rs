//! Sparse multi-channel photon states.
//!
//! A [`PhotonState`] is a fixed-photon-number pure state: one photon per
//! channel, each channel carrying its own [`FrequencyGrid`]. Amplitudes are
//! stored sparsely, keyed by the tuple of bin indices (one per channel, in
//! channel-list order). The map is ordered, so iteration is lexicographic
//! in the tuple and every derived quantity is platform independent.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::{Frequency, FrequencyGrid};

/// Relative modulus below which amplitudes are dropped.
pub const PRUNE_RELATIVE: f64 = 1e-14;

/// Tolerance on `|norm - 1|` for a state to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-12;

pub type BinTuple = Vec<usize>;

/// Optical arm a photon travels in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelId {
    Ch1,
    Ch2,
    Ch3,
    Ch4,
    In,
    Out,
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ChannelId::Ch1 => "ch1",
            ChannelId::Ch2 => "ch2",
            ChannelId::Ch3 => "ch3",
            ChannelId::Ch4 => "ch4",
            ChannelId::In => "in",
            ChannelId::Out => "out",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub id: ChannelId,
    pub grid: FrequencyGrid,
}

impl Channel {
    pub fn new(id: ChannelId, grid: FrequencyGrid) -> Self {
        Channel { id, grid }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhotonState {
    channels: Vec<Channel>,
    amplitudes: BTreeMap<BinTuple, Complex64>,
}

impl PhotonState {
    /// Builds a state from `(tuple, amplitude)` pairs. Repeated tuples are
    /// summed coherently, then negligible entries are pruned.
    pub fn from_entries<I>(channels: Vec<Channel>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BinTuple, Complex64)>,
    {
        check_distinct(&channels)?;
        let mut amplitudes: BTreeMap<BinTuple, Complex64> = BTreeMap::new();
        for (tuple, amp) in entries {
            if !(amp.re.is_finite() && amp.im.is_finite()) {
                return Err(Error::NonFiniteAmplitude);
            }
            check_tuple(&channels, &tuple)?;
            *amplitudes.entry(tuple).or_default() += amp;
        }
        Ok(PhotonState::assemble(channels, amplitudes))
    }

    /// Builds a state from frequency tuples; each frequency must be a bin
    /// center of its channel's grid.
    pub fn from_frequencies<I>(channels: Vec<Channel>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<Frequency>, Complex64)>,
    {
        let mut tuples = Vec::new();
        for (freqs, amp) in entries {
            if freqs.len() != channels.len() {
                return Err(Error::InvalidTuple(format!(
                    "{} frequencies for {} channels",
                    freqs.len(),
                    channels.len()
                )));
            }
            let tuple = freqs
                .iter()
                .zip(&channels)
                .map(|(&w, ch)| {
                    ch.grid.exact_bin(w).ok_or_else(|| {
                        Error::InvalidTuple(format!("{w} is not a bin center of {}", ch.id))
                    })
                })
                .collect::<Result<BinTuple>>()?;
            tuples.push((tuple, amp));
        }
        PhotonState::from_entries(channels, tuples)
    }

    /// Single-photon monochromatic state `|omega>` on a one-bin grid.
    pub fn monochromatic(id: ChannelId, omega: Frequency, spacing: Frequency) -> Result<Self> {
        let grid = FrequencyGrid::new(omega, spacing, 1)?;
        PhotonState::from_entries(
            vec![Channel::new(id, grid)],
            [(vec![0], Complex64::new(1.0, 0.0))],
        )
    }

    /// Internal constructor for already-validated maps; applies pruning.
    pub(crate) fn assemble(
        channels: Vec<Channel>,
        mut amplitudes: BTreeMap<BinTuple, Complex64>,
    ) -> Self {
        let max = amplitudes.values().map(|a| a.norm()).fold(0.0, f64::max);
        let cutoff = PRUNE_RELATIVE * max;
        amplitudes.retain(|_, a| {
            let m = a.norm();
            m > 0.0 && m >= cutoff
        });
        PhotonState {
            channels,
            amplitudes,
        }
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel_ids(&self) -> Vec<ChannelId> {
        self.channels.iter().map(|c| c.id).collect()
    }

    pub fn position(&self, id: ChannelId) -> Option<usize> {
        self.channels.iter().position(|c| c.id == id)
    }

    pub fn require(&self, id: ChannelId) -> Result<usize> {
        self.position(id).ok_or(Error::MissingChannel(id))
    }

    pub fn grid(&self, id: ChannelId) -> Option<&FrequencyGrid> {
        self.channels.iter().find(|c| c.id == id).map(|c| &c.grid)
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, tuple: &[usize]) -> Complex64 {
        self.amplitudes.get(tuple).copied().unwrap_or_default()
    }

    /// Entries in lexicographic tuple order.
    pub fn iter(&self) -> impl Iterator<Item = (&BinTuple, &Complex64)> {
        self.amplitudes.iter()
    }

    /// Bin centers addressed by `tuple`.
    pub fn frequencies(&self, tuple: &[usize]) -> Vec<Frequency> {
        tuple
            .iter()
            .zip(&self.channels)
            .map(|(&k, ch)| ch.grid.center(k))
            .collect()
    }

    /// Amplitudes keyed by frequency tuple instead of bin tuple, for
    /// comparing states whose grids differ.
    pub fn by_frequency(&self) -> BTreeMap<Vec<Frequency>, Complex64> {
        self.amplitudes
            .iter()
            .map(|(t, a)| (self.frequencies(t), *a))
            .collect()
    }

    /// Largest entrywise modulus difference, matching entries by frequency
    /// tuple so that states on different grids can be compared.
    pub fn max_abs_diff(&self, other: &PhotonState) -> f64 {
        let a = self.by_frequency();
        let b = other.by_frequency();
        a.keys()
            .chain(b.keys())
            .map(|k| {
                let x = a.get(k).copied().unwrap_or_default();
                let y = b.get(k).copied().unwrap_or_default();
                (x - y).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes
            .values()
            .map(|a| a.norm_sqr())
            .fold(0.0, |acc, p| acc + p)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm: self.norm() })
        }
    }

    pub fn normalize(&self) -> Result<PhotonState> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> PhotonState {
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(t, a)| (t.clone(), a * factor))
            .collect();
        PhotonState::assemble(self.channels.clone(), amplitudes)
    }

    /// Keeps only the entries for which `keep` returns true.
    pub fn filter<F>(&self, mut keep: F) -> PhotonState
    where
        F: FnMut(&[usize], Complex64) -> bool,
    {
        PhotonState {
            channels: self.channels.clone(),
            amplitudes: self
                .amplitudes
                .iter()
                .filter(|(t, a)| keep(t, **a))
                .map(|(t, a)| (t.clone(), *a))
                .collect(),
        }
    }

    /// `<self|other>`. Both states must have the same channel list.
    pub fn inner(&self, other: &PhotonState) -> Result<Complex64> {
        if self.channels != other.channels {
            return Err(Error::InvalidTuple(
                "inner product needs identical channel lists".into(),
            ));
        }
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::default();
        for (t, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(t) {
                acc += if conj_small {
                    a.conj() * b
                } else {
                    b.conj() * a
                };
            }
        }
        Ok(acc)
    }

    /// Removes `ids` from every tuple and from the channel list. Entries
    /// that collide after removal are added coherently.
    pub fn remove_channels(&self, ids: &[ChannelId]) -> Result<PhotonState> {
        let mut drop = vec![false; self.channels.len()];
        for &id in ids {
            drop[self.require(id)?] = true;
        }
        let channels = self
            .channels
            .iter()
            .zip(&drop)
            .filter(|(_, d)| !**d)
            .map(|(c, _)| *c)
            .collect();
        let mut amplitudes: BTreeMap<BinTuple, Complex64> = BTreeMap::new();
        for (t, a) in &self.amplitudes {
            let reduced: BinTuple = t
                .iter()
                .zip(&drop)
                .filter(|(_, d)| !**d)
                .map(|(k, _)| *k)
                .collect();
            *amplitudes.entry(reduced).or_default() += a;
        }
        Ok(PhotonState::assemble(channels, amplitudes))
    }
}

/// `a ⊗ b`: channel lists are concatenated, amplitudes multiplied.
pub fn tensor_product(a: &PhotonState, b: &PhotonState) -> Result<PhotonState> {
    if let Some(c) = a.channels.iter().find(|c| b.position(c.id).is_some()) {
        return Err(Error::OverlappingChannels(c.id));
    }
    let channels = a.channels.iter().chain(&b.channels).copied().collect();
    let mut amplitudes = BTreeMap::new();
    for (ta, xa) in &a.amplitudes {
        for (tb, xb) in &b.amplitudes {
            let mut t = Vec::with_capacity(ta.len() + tb.len());
            t.extend_from_slice(ta);
            t.extend_from_slice(tb);
            amplitudes.insert(t, xa * xb);
        }
    }
    Ok(PhotonState::assemble(channels, amplitudes))
}

fn check_distinct(channels: &[Channel]) -> Result<()> {
    for (i, c) in channels.iter().enumerate() {
        if channels[..i].iter().any(|d| d.id == c.id) {
            return Err(Error::DuplicateChannel(c.id));
        }
    }
    Ok(())
}

fn check_tuple(channels: &[Channel], tuple: &[usize]) -> Result<()> {
    if tuple.len() != channels.len() {
        return Err(Error::InvalidTuple(format!(
            "tuple of length {} for {} channels",
            tuple.len(),
            channels.len()
        )));
    }
    for (k, ch) in tuple.iter().zip(channels) {
        if *k >= ch.grid.bins() {
            return Err(Error::InvalidTuple(format!(
                "bin {k} out of range for {} ({} bins)",
                ch.id,
                ch.grid.bins()
            )));
        }
    }
    Ok(())
}
