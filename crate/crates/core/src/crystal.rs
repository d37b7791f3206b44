//! First-order action of a χ(2) crystal under perfect phase matching.
//!
//! A splitting crystal turns one pump photon at `Ω` into a pair
//! `|ω>|Ω - ω>` weighted by a spectral profile; a merging crystal turns two
//! photons into one at their sum frequency. Only the component linear in
//! the coupling is produced; the unconverted (identity) part of the
//! scattering operator is not tracked.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::{Frequency, FrequencyGrid};
use crate::spectrum::SpectralAmplitude;
use crate::state::{BinTuple, Channel, ChannelId, PhotonState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrystalMode {
    Split,
    Merge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrystalSpec {
    chi: f64,
    mode: CrystalMode,
    inputs: Vec<ChannelId>,
    outputs: Vec<ChannelId>,
}

impl CrystalSpec {
    pub fn new(
        chi: f64,
        mode: CrystalMode,
        inputs: Vec<ChannelId>,
        outputs: Vec<ChannelId>,
    ) -> Result<Self> {
        if !(chi > 0.0 && chi.is_finite()) {
            return Err(Error::InvalidCrystal(format!(
                "coupling must be positive, got {chi}"
            )));
        }
        let (n_in, n_out) = match mode {
            CrystalMode::Split => (1, 2),
            CrystalMode::Merge => (2, 1),
        };
        if inputs.len() != n_in || outputs.len() != n_out {
            return Err(Error::InvalidCrystal(format!(
                "{mode:?} needs {n_in} input and {n_out} output channels, got {} and {}",
                inputs.len(),
                outputs.len()
            )));
        }
        if inputs.len() == 2 && inputs[0] == inputs[1] {
            return Err(Error::InvalidCrystal("merge inputs must differ".into()));
        }
        if outputs.len() == 2 && outputs[0] == outputs[1] {
            return Err(Error::InvalidCrystal("split outputs must differ".into()));
        }
        Ok(CrystalSpec {
            chi,
            mode,
            inputs,
            outputs,
        })
    }

    pub fn split(chi: f64, input: ChannelId, out_a: ChannelId, out_b: ChannelId) -> Result<Self> {
        CrystalSpec::new(chi, CrystalMode::Split, vec![input], vec![out_a, out_b])
    }

    pub fn merge(chi: f64, in_a: ChannelId, in_b: ChannelId, out: ChannelId) -> Result<Self> {
        CrystalSpec::new(chi, CrystalMode::Merge, vec![in_a, in_b], vec![out])
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn mode(&self) -> CrystalMode {
        self.mode
    }

    pub fn inputs(&self) -> &[ChannelId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[ChannelId] {
        &self.outputs
    }

    /// Down-converts the pump photon on the input channel.
    ///
    /// The first output channel carries the profile's grid; the second
    /// carries the lattice of differences `Ω - ω`, trimmed to positive
    /// frequencies. Both outputs take the input channel's place in the
    /// channel list. The result is unnormalized and scaled by `chi`.
    pub fn apply_split(
        &self,
        state: &PhotonState,
        weight: &SpectralAmplitude,
    ) -> Result<PhotonState> {
        if self.mode != CrystalMode::Split {
            return Err(Error::InvalidCrystal(
                "apply_split on a merging crystal".into(),
            ));
        }
        let input = self.inputs[0];
        let (out_a, out_b) = (self.outputs[0], self.outputs[1]);
        let pos = state.require(input)?;
        for &out in &self.outputs {
            if out != input && state.position(out).is_some() {
                return Err(Error::OverlappingChannels(out));
            }
        }

        let pump = state.channels()[pos].grid;
        let w = *weight.grid();
        if pump.bins() > 1 && pump.spacing() != w.spacing() {
            return Err(Error::SpacingMismatch {
                left: pump.spacing(),
                right: w.spacing(),
            });
        }
        // Difference lattice: index p + (N_w - 1 - k) for pump bin p, weight bin k.
        let raw_start = pump.start() - w.last_center();
        let raw_bins = pump.bins() + w.bins() - 1;
        let spacing = w.spacing();
        let trim = first_positive(raw_start, spacing, raw_bins).ok_or_else(|| {
            Error::EmptySupport(format!(
                "no positive idler frequency for pump {} and profile {}",
                pump, w
            ))
        })?;
        let idler =
            FrequencyGrid::new(raw_start + spacing * trim as i64, spacing, raw_bins - trim)?;

        let mut channels: Vec<Channel> = Vec::with_capacity(state.channels().len() + 1);
        channels.extend_from_slice(&state.channels()[..pos]);
        channels.push(Channel::new(out_a, w));
        channels.push(Channel::new(out_b, idler));
        channels.extend_from_slice(&state.channels()[pos + 1..]);

        let chi = Complex64::new(self.chi, 0.0);
        let mut amplitudes: BTreeMap<BinTuple, Complex64> = BTreeMap::new();
        for (tuple, amp) in state.iter() {
            let p = tuple[pos];
            for (k, f) in weight.values().iter().enumerate() {
                if *f == Complex64::default() {
                    continue;
                }
                let j = p + (w.bins() - 1 - k);
                if j < trim {
                    continue;
                }
                let mut t = Vec::with_capacity(tuple.len() + 1);
                t.extend_from_slice(&tuple[..pos]);
                t.push(k);
                t.push(j - trim);
                t.extend_from_slice(&tuple[pos + 1..]);
                *amplitudes.entry(t).or_default() += chi * amp * f;
            }
        }
        Ok(PhotonState::assemble(channels, amplitudes))
    }

    /// Up-converts the two input photons into one at their sum frequency.
    ///
    /// The output channel replaces the first input in the channel list and
    /// carries the sum lattice of the two input grids. Pairs with equal
    /// sums add coherently. The result is unnormalized and scaled by `chi`.
    pub fn apply_merge(&self, state: &PhotonState) -> Result<PhotonState> {
        if self.mode != CrystalMode::Merge {
            return Err(Error::InvalidCrystal(
                "apply_merge on a splitting crystal".into(),
            ));
        }
        let (in_a, in_b, out) = (self.inputs[0], self.inputs[1], self.outputs[0]);
        let pa = state.require(in_a)?;
        let pb = state.require(in_b)?;
        if out != in_a && out != in_b && state.position(out).is_some() {
            return Err(Error::OverlappingChannels(out));
        }
        let ga = state.channels()[pa].grid;
        let gb = state.channels()[pb].grid;
        let sum_grid = ga.sum_lattice(&gb)?;

        let channels: Vec<Channel> = state
            .channels()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pb)
            .map(|(i, c)| {
                if i == pa {
                    Channel::new(out, sum_grid)
                } else {
                    *c
                }
            })
            .collect();

        let chi = Complex64::new(self.chi, 0.0);
        let mut amplitudes: BTreeMap<BinTuple, Complex64> = BTreeMap::new();
        for (tuple, amp) in state.iter() {
            let t: BinTuple = tuple
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != pb)
                .map(|(i, &k)| if i == pa { tuple[pa] + tuple[pb] } else { k })
                .collect();
            *amplitudes.entry(t).or_default() += chi * amp;
        }
        Ok(PhotonState::assemble(channels, amplitudes))
    }
}

fn first_positive(start: Frequency, spacing: Frequency, bins: usize) -> Option<usize> {
    if start.is_positive() {
        return Some(0);
    }
    // smallest j with start + j*spacing > 0
    let j = ((-start).quanta() / spacing.quanta() + 1) as usize;
    (j < bins).then_some(j)
}

/// Normalized biphoton `Σ_k f(ω_k) |ω_k>_a ⊗ |Ω - ω_k>_b` from a
/// monochromatic pump at `pump`.
pub fn spdc_biphoton(
    pump: Frequency,
    weight: &SpectralAmplitude,
    chan_a: ChannelId,
    chan_b: ChannelId,
) -> Result<PhotonState> {
    if chan_a == chan_b {
        return Err(Error::DuplicateChannel(chan_a));
    }
    if !pump.is_positive() {
        return Err(Error::EmptySupport(format!(
            "pump frequency {pump} is not positive"
        )));
    }
    let crystal = CrystalSpec::split(1.0, ChannelId::In, chan_a, chan_b)?;
    let pump_state = PhotonState::monochromatic(ChannelId::In, pump, weight.grid().spacing())?;
    let pair = crystal.apply_split(&pump_state, weight)?;
    if pair.is_empty() {
        return Err(Error::EmptySupport(format!(
            "profile on {} has no weight below pump {pump}",
            weight.grid()
        )));
    }
    pair.normalize()
}

/// First-order sum-frequency component of `state` with `chan_a`, `chan_b`
/// merged into `chan_out`.
pub fn sum_frequency_merge(
    state: &PhotonState,
    chan_a: ChannelId,
    chan_b: ChannelId,
    chan_out: ChannelId,
    chi: f64,
) -> Result<PhotonState> {
    CrystalSpec::merge(chi, chan_a, chan_b, chan_out)?.apply_merge(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn freq(x: f64) -> Frequency {
        Frequency::new(x).unwrap()
    }

    fn desk_grid() -> FrequencyGrid {
        FrequencyGrid::from_units(0.8, 0.05, 8).unwrap()
    }

    #[test]
    fn flat_biphoton_pairs() {
        let f = SpectralAmplitude::flat(desk_grid());
        let s = spdc_biphoton(freq(2.0), &f, ChannelId::Ch1, ChannelId::Ch2).unwrap();
        assert_eq!(s.len(), 8);
        let a = 1.0 / 8f64.sqrt();
        let freqs: Vec<_> = s.by_frequency().into_iter().collect();
        assert_eq!(freqs[0].0, vec![freq(0.8), freq(1.2)]);
        assert_eq!(freqs[7].0, vec![freq(1.15), freq(0.85)]);
        for (w, amp) in &freqs {
            assert_eq!(w[0] + w[1], freq(2.0));
            assert!((amp.re - a).abs() < 1e-15 && amp.im == 0.0);
        }
    }

    #[test]
    fn idler_grid_is_trimmed_to_positive_frequencies() {
        let g = FrequencyGrid::from_units(0.8, 0.05, 8).unwrap();
        let f = SpectralAmplitude::flat(g);
        let s = spdc_biphoton(freq(1.0), &f, ChannelId::Ch1, ChannelId::Ch2).unwrap();
        // ω < 1.0 only: 0.8 .. 0.95
        assert_eq!(s.len(), 4);
        let idler = s.grid(ChannelId::Ch2).unwrap();
        assert_eq!(idler.start(), freq(0.05));
        for (w, _) in s.by_frequency() {
            assert!(w[1].is_positive());
            assert_eq!(w[0] + w[1], freq(1.0));
        }
    }

    #[test]
    fn empty_support_is_rejected() {
        let f = SpectralAmplitude::flat(desk_grid());
        assert!(matches!(
            spdc_biphoton(freq(0.7), &f, ChannelId::Ch1, ChannelId::Ch2),
            Err(Error::EmptySupport(_))
        ));
        let zero = SpectralAmplitude::new(desk_grid(), vec![Complex64::default(); 8]).unwrap();
        assert!(matches!(
            spdc_biphoton(freq(2.0), &zero, ChannelId::Ch1, ChannelId::Ch2),
            Err(Error::EmptySupport(_))
        ));
    }

    #[test]
    fn merge_single_pair() {
        let s = PhotonState::from_frequencies(
            vec![
                Channel::new(
                    ChannelId::Ch2,
                    FrequencyGrid::from_units(1.0, 0.05, 1).unwrap(),
                ),
                Channel::new(
                    ChannelId::Ch3,
                    FrequencyGrid::from_units(1.1, 0.05, 1).unwrap(),
                ),
            ],
            [(vec![freq(1.0), freq(1.1)], Complex64::new(1.0, 0.0))],
        )
        .unwrap();
        let m =
            sum_frequency_merge(&s, ChannelId::Ch2, ChannelId::Ch3, ChannelId::Out, 0.01).unwrap();
        assert_eq!(m.channel_ids(), vec![ChannelId::Out]);
        let entries = m.by_frequency();
        assert_eq!(entries.len(), 1);
        let amp = entries[&vec![freq(2.1)]];
        assert!((amp.re - 0.01).abs() < 1e-15);
    }

    #[test]
    fn merge_of_anticorrelated_pair_collapses_to_pump() {
        let f = SpectralAmplitude::flat(desk_grid());
        let s = spdc_biphoton(freq(2.0), &f, ChannelId::Ch2, ChannelId::Ch3).unwrap();
        let m =
            sum_frequency_merge(&s, ChannelId::Ch2, ChannelId::Ch3, ChannelId::Out, 1.0).unwrap();
        assert_eq!(m.len(), 1);
        let amp = m.by_frequency()[&vec![freq(2.0)]];
        assert!((amp.re - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn merge_keeps_other_channels_in_place() {
        let f = SpectralAmplitude::flat(desk_grid());
        let phi = spdc_biphoton(freq(2.0), &f, ChannelId::Ch1, ChannelId::Ch2).unwrap();
        let psi = spdc_biphoton(freq(2.2), &f, ChannelId::Ch3, ChannelId::Ch4).unwrap();
        let both = crate::state::tensor_product(&phi, &psi).unwrap();
        let m = sum_frequency_merge(&both, ChannelId::Ch2, ChannelId::Ch3, ChannelId::Out, 0.5)
            .unwrap();
        assert_eq!(
            m.channel_ids(),
            vec![ChannelId::Ch1, ChannelId::Out, ChannelId::Ch4]
        );
        assert_eq!(m.len(), 64);
        assert!((m.norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn merge_errors() {
        let f = SpectralAmplitude::flat(desk_grid());
        let s = spdc_biphoton(freq(2.0), &f, ChannelId::Ch1, ChannelId::Ch2).unwrap();
        assert!(matches!(
            sum_frequency_merge(&s, ChannelId::Ch2, ChannelId::Ch3, ChannelId::Out, 1.0),
            Err(Error::MissingChannel(ChannelId::Ch3))
        ));
        assert!(matches!(
            sum_frequency_merge(&s, ChannelId::Ch1, ChannelId::Ch2, ChannelId::Out, 0.0),
            Err(Error::InvalidCrystal(_))
        ));
        let odd = PhotonState::from_entries(
            vec![
                Channel::new(
                    ChannelId::Ch1,
                    FrequencyGrid::from_units(1.0, 0.05, 2).unwrap(),
                ),
                Channel::new(
                    ChannelId::Ch2,
                    FrequencyGrid::from_units(1.0, 0.04, 2).unwrap(),
                ),
            ],
            [(vec![0, 0], Complex64::new(1.0, 0.0))],
        )
        .unwrap();
        assert!(matches!(
            sum_frequency_merge(&odd, ChannelId::Ch1, ChannelId::Ch2, ChannelId::Out, 1.0),
            Err(Error::SpacingMismatch { .. })
        ));
    }

    #[test]
    fn crystal_shape_validation() {
        assert!(CrystalSpec::new(
            1.0,
            CrystalMode::Split,
            vec![ChannelId::In],
            vec![ChannelId::Ch1]
        )
        .is_err());
        assert!(CrystalSpec::new(
            1.0,
            CrystalMode::Merge,
            vec![ChannelId::Ch2],
            vec![ChannelId::Out]
        )
        .is_err());
        assert!(CrystalSpec::merge(1.0, ChannelId::Ch2, ChannelId::Ch2, ChannelId::Out).is_err());
        assert!(CrystalSpec::split(-1.0, ChannelId::In, ChannelId::Ch1, ChannelId::Ch2).is_err());
    }
}
