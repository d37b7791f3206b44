//! End-to-end entanglement swap.
//!
//! Crystal I down-converts a pump at `Ω_I` into photons 1 and 2, crystal II
//! a pump at `Ω_II` into photons 3 and 4. Photons 2 and 3 are then either
//! projected onto a frequency-sum window (`IdealProjector`) or merged in
//! crystal III and the sum photon detected in the same band
//! (`PhysicalMergeDetect`). Conditioned on success, photons 1 and 4 are left
//! in a state whose frequencies satisfy `ω1 + ω4 = Ω_I + Ω_II - Ω_III`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::crystal::{spdc_biphoton, sum_frequency_merge};
use crate::error::{Error, Result};
use crate::frequency::{Frequency, FrequencyGrid};
use crate::measurement::{
    coincidence_probability, detect_and_absorb, project_frequency_sum, FrequencySumWindow,
    NarrowbandDetector,
};
use crate::schmidt::schmidt_decompose;
use crate::spectrum::SpectralAmplitude;
use crate::state::{tensor_product, Channel, ChannelId, PhotonState};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwapPath {
    #[default]
    #[serde(rename = "ideal")]
    IdealProjector,
    #[serde(rename = "physical")]
    PhysicalMergeDetect,
}

impl std::str::FromStr for SwapPath {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ideal" => Ok(SwapPath::IdealProjector),
            "physical" => Ok(SwapPath::PhysicalMergeDetect),
            other => Err(format!(
                "unknown path `{other}` (expected `ideal` or `physical`)"
            )),
        }
    }
}

impl std::fmt::Display for SwapPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SwapPath::IdealProjector => "ideal",
            SwapPath::PhysicalMergeDetect => "physical",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwapConfig {
    pub omega_i: Frequency,
    pub omega_ii: Frequency,
    pub omega_iii: Frequency,
    pub f: SpectralAmplitude,
    pub g: SpectralAmplitude,
    pub window_width: Frequency,
    pub chi_i: f64,
    pub chi_ii: f64,
    pub chi_iii: f64,
    pub path: SwapPath,
}

impl SwapConfig {
    /// Unit couplings, ideal projector, window one bin wide.
    pub fn new(
        omega_i: Frequency,
        omega_ii: Frequency,
        omega_iii: Frequency,
        f: SpectralAmplitude,
        g: SpectralAmplitude,
    ) -> Self {
        let window_width = f.grid().spacing();
        SwapConfig {
            omega_i,
            omega_ii,
            omega_iii,
            f,
            g,
            window_width,
            chi_i: 1.0,
            chi_ii: 1.0,
            chi_iii: 1.0,
            path: SwapPath::IdealProjector,
        }
    }

    pub fn with_path(mut self, path: SwapPath) -> Self {
        self.path = path;
        self
    }

    pub fn with_window_width(mut self, width: Frequency) -> Self {
        self.window_width = width;
        self
    }

    pub fn with_couplings(mut self, chi_i: f64, chi_ii: f64, chi_iii: f64) -> Self {
        self.chi_i = chi_i;
        self.chi_ii = chi_ii;
        self.chi_iii = chi_iii;
        self
    }

    /// `Ω_I + Ω_II - Ω_III`.
    pub fn sum_invariant(&self) -> Frequency {
        self.omega_i + self.omega_ii - self.omega_iii
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("omega_i", self.omega_i),
            ("omega_ii", self.omega_ii),
            ("omega_iii", self.omega_iii),
            ("window_width", self.window_width),
        ] {
            if !w.is_positive() {
                return Err(Error::InvalidSwapConfig(format!(
                    "{name} = {w} must be positive"
                )));
            }
        }
        for (name, chi) in [
            ("chi_i", self.chi_i),
            ("chi_ii", self.chi_ii),
            ("chi_iii", self.chi_iii),
        ] {
            if !(chi > 0.0 && chi.is_finite()) {
                return Err(Error::InvalidSwapConfig(format!(
                    "{name} = {chi} must be positive"
                )));
            }
        }
        if self.f.grid().spacing() != self.g.grid().spacing() {
            return Err(Error::SpacingMismatch {
                left: self.f.grid().spacing(),
                right: self.g.grid().spacing(),
            });
        }
        Ok(())
    }
}

/// `(Ω1, Ω4, probability)` for one pair of detector settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceCell {
    pub omega_1: Frequency,
    pub omega_4: Frequency,
    pub probability: f64,
}

/// Post-selected photon 1-4 state for one captured value of `ω1 + ω4`.
#[derive(Clone, Debug, PartialEq)]
pub struct SumBranch {
    pub pair_sum: Frequency,
    /// Absolute probability of this branch (sums to the success probability).
    pub probability: f64,
    pub state: PhotonState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwapResult {
    pub path: SwapPath,
    /// For the physical path, relative to the first-order merge sector.
    pub success_probability: f64,
    /// Overall factor omitted from `success_probability`: `χ_III²` for the
    /// physical path, 1 for the ideal projector.
    pub merge_scale: f64,
    /// Pair-generation rate factor `χ_I² χ_II²`, reported only.
    pub pair_scale: f64,
    /// Most probable branch (ties to the lowest sum). For a one-bin window
    /// this is the only branch.
    pub post_state_14: PhotonState,
    pub entanglement_entropy: f64,
    pub schmidt_coefficients: Vec<f64>,
    pub sum_invariant: Frequency,
    pub coincidence_table: Vec<CoincidenceCell>,
    pub branches: Vec<SumBranch>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SwapOutcome {
    Heralded(Box<SwapResult>),
    /// The window captured no amplitude; success probability is zero.
    NotHeralded {
        path: SwapPath,
        window_lo: Frequency,
        window_width: Frequency,
        sum_invariant: Frequency,
    },
}

impl SwapOutcome {
    pub fn heralded(&self) -> Option<&SwapResult> {
        match self {
            SwapOutcome::Heralded(r) => Some(r),
            SwapOutcome::NotHeralded { .. } => None,
        }
    }

    pub fn into_heralded(self) -> Option<SwapResult> {
        match self {
            SwapOutcome::Heralded(r) => Some(*r),
            SwapOutcome::NotHeralded { .. } => None,
        }
    }

    pub fn success_probability(&self) -> f64 {
        self.heralded().map_or(0.0, |r| r.success_probability)
    }
}

/// The two independent biphotons `|Φ>_{12} ⊗ |Ψ>_{34}`.
pub fn initial_state(config: &SwapConfig) -> Result<PhotonState> {
    let phi = spdc_biphoton(config.omega_i, &config.f, ChannelId::Ch1, ChannelId::Ch2)?;
    let psi = spdc_biphoton(config.omega_ii, &config.g, ChannelId::Ch3, ChannelId::Ch4)?;
    tensor_product(&phi, &psi)
}

pub fn run_swap(config: &SwapConfig) -> Result<SwapOutcome> {
    config.validate()?;
    let initial = initial_state(config)?;

    let (probability, post, merge_scale) = match config.path {
        SwapPath::IdealProjector => {
            let window = FrequencySumWindow::new(
                (ChannelId::Ch2, ChannelId::Ch3),
                config.omega_iii,
                config.window_width,
            )?;
            let (hit, _) = project_frequency_sum(&initial, &window)?;
            let post = match hit.post_state {
                Some(s) => s
                    .remove_channels(&[ChannelId::Ch2, ChannelId::Ch3])?
                    .normalize()?,
                None => return Ok(not_heralded(config)),
            };
            (hit.probability, post, 1.0)
        }
        SwapPath::PhysicalMergeDetect => {
            let merged = sum_frequency_merge(
                &initial,
                ChannelId::Ch2,
                ChannelId::Ch3,
                ChannelId::Out,
                config.chi_iii,
            )?;
            let first_order = merged.normalize()?;
            let detector = NarrowbandDetector::spanning(
                ChannelId::Out,
                config.omega_iii,
                config.window_width,
            )?;
            let hit = detect_and_absorb(&first_order, &detector)?;
            let post = match hit.post_state {
                Some(s) => s,
                None => return Ok(not_heralded(config)),
            };
            (hit.probability, post, config.chi_iii * config.chi_iii)
        }
    };

    let branches = split_by_pair_sum(&post, probability)?;
    let main = branches
        .iter()
        .fold(None::<&SumBranch>, |best, b| match best {
            Some(x) if x.probability >= b.probability => Some(x),
            _ => Some(b),
        })
        .expect("heralded state has at least one branch");
    let post_state_14 = main.state.clone();
    let schmidt = schmidt_decompose(&post_state_14, &[ChannelId::Ch1])?;

    let g1 = *post_state_14.grid(ChannelId::Ch1).expect("ch1 present");
    let g4 = *post_state_14.grid(ChannelId::Ch4).expect("ch4 present");
    let sweep: Vec<(Frequency, Frequency)> = g1
        .centers()
        .flat_map(|w1| g4.centers().map(move |w4| (w1, w4)))
        .collect();

    let mut result = SwapResult {
        path: config.path,
        success_probability: probability,
        merge_scale,
        pair_scale: (config.chi_i * config.chi_ii).powi(2),
        post_state_14,
        entanglement_entropy: schmidt.entropy,
        schmidt_coefficients: schmidt.coefficients,
        sum_invariant: config.sum_invariant(),
        coincidence_table: Vec::new(),
        branches,
    };
    result.coincidence_table = verify_epr(&result, &sweep)?;
    Ok(SwapOutcome::Heralded(Box::new(result)))
}

fn not_heralded(config: &SwapConfig) -> SwapOutcome {
    SwapOutcome::NotHeralded {
        path: config.path,
        window_lo: config.omega_iii,
        window_width: config.window_width,
        sum_invariant: config.sum_invariant(),
    }
}

fn split_by_pair_sum(post: &PhotonState, probability: f64) -> Result<Vec<SumBranch>> {
    let p1 = post.require(ChannelId::Ch1)?;
    let p4 = post.require(ChannelId::Ch4)?;
    let g1 = post.channels()[p1].grid;
    let g4 = post.channels()[p4].grid;
    let pair_sum = |t: &[usize]| g1.center(t[p1]) + g4.center(t[p4]);

    let mut weights: BTreeMap<Frequency, f64> = BTreeMap::new();
    for (t, a) in post.iter() {
        *weights.entry(pair_sum(t)).or_default() += a.norm_sqr();
    }
    weights
        .into_iter()
        .map(|(sum, w)| {
            let state = post.filter(|t, _| pair_sum(t) == sum).normalize()?;
            Ok(SumBranch {
                pair_sum: sum,
                probability: probability * w,
                state,
            })
        })
        .collect()
}

/// Coincidence probabilities of one-bin detectors on photons 1 and 4.
pub fn verify_epr(
    result: &SwapResult,
    detector_pairs: &[(Frequency, Frequency)],
) -> Result<Vec<CoincidenceCell>> {
    let state = &result.post_state_14;
    let bw1 = state
        .grid(ChannelId::Ch1)
        .ok_or(Error::MissingChannel(ChannelId::Ch1))?
        .spacing();
    let bw4 = state
        .grid(ChannelId::Ch4)
        .ok_or(Error::MissingChannel(ChannelId::Ch4))?
        .spacing();
    detector_pairs
        .iter()
        .map(|&(w1, w4)| {
            let d1 = NarrowbandDetector::new(ChannelId::Ch1, w1, bw1)?;
            let d4 = NarrowbandDetector::new(ChannelId::Ch4, w4, bw4)?;
            Ok(CoincidenceCell {
                omega_1: w1,
                omega_4: w4,
                probability: coincidence_probability(state, &d1, &d4)?,
            })
        })
        .collect()
}

/// Photon 1-4 state written down directly:
/// `Σ f(ω1) g(Ω - Ω_I + ω1) |ω1> ⊗ |Ω_II + Ω_I - Ω - ω1>` for the captured
/// sum `Ω`, restricted to positive frequencies of photons 2 and 4 and
/// normalized. Photon 4 lives on the smallest grid covering its support.
pub fn swapped_state_closed_form(
    omega_i: Frequency,
    omega_ii: Frequency,
    omega_sum: Frequency,
    f: &SpectralAmplitude,
    g: &SpectralAmplitude,
) -> Result<PhotonState> {
    let mut terms: Vec<(Frequency, Frequency, Complex64)> = Vec::new();
    for (k, w1) in f.grid().centers().enumerate() {
        let w2 = omega_i - w1;
        let w3 = omega_sum - w2;
        let w4 = omega_ii + omega_i - omega_sum - w1;
        if !w2.is_positive() || !w4.is_positive() {
            continue;
        }
        let amp = f.value(k) * g.at(w3);
        if amp != Complex64::default() {
            terms.push((w1, w4, amp));
        }
    }
    let lo = terms.iter().map(|t| t.1).min().ok_or_else(|| {
        Error::EmptySupport(format!(
            "no photon 1-4 support for captured sum {omega_sum}"
        ))
    })?;
    let hi = terms.iter().map(|t| t.1).max().expect("nonempty");
    let spacing = f.grid().spacing();
    let bins = ((hi - lo).quanta() / spacing.quanta()) as usize + 1;
    let g4 = FrequencyGrid::new(lo, spacing, bins)?;
    PhotonState::from_frequencies(
        vec![
            Channel::new(ChannelId::Ch1, *f.grid()),
            Channel::new(ChannelId::Ch4, g4),
        ],
        terms.into_iter().map(|(w1, w4, a)| (vec![w1, w4], a)),
    )?
    .normalize()
}
