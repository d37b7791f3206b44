//! Frequency-sum projectors, narrow-band detectors and the joint
//! time-of-arrival density of a photon pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::Frequency;
use crate::state::{ChannelId, PhotonState};

/// Window `[omega_lo, omega_lo + width)` on the frequency sum of two
/// channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencySumWindow {
    channels: (ChannelId, ChannelId),
    omega_lo: Frequency,
    width: Frequency,
}

impl FrequencySumWindow {
    pub fn new(
        channels: (ChannelId, ChannelId),
        omega_lo: Frequency,
        width: Frequency,
    ) -> Result<Self> {
        if channels.0 == channels.1 {
            return Err(Error::InvalidMeasurement(format!(
                "window needs two distinct channels, got {} twice",
                channels.0
            )));
        }
        if !omega_lo.is_positive() || !width.is_positive() {
            return Err(Error::InvalidMeasurement(format!(
                "window [{omega_lo}, +{width}) must have positive edge and width"
            )));
        }
        Ok(FrequencySumWindow {
            channels,
            omega_lo,
            width,
        })
    }

    pub fn channels(&self) -> (ChannelId, ChannelId) {
        self.channels
    }

    pub fn omega_lo(&self) -> Frequency {
        self.omega_lo
    }

    pub fn width(&self) -> Frequency {
        self.width
    }

    pub fn contains(&self, sum: Frequency) -> bool {
        sum >= self.omega_lo && sum < self.omega_lo + self.width
    }
}

/// Ideal absorbing detector with acceptance `[center - bw/2, center + bw/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NarrowbandDetector {
    channel: ChannelId,
    center: Frequency,
    bandwidth: Frequency,
}

impl NarrowbandDetector {
    pub fn new(channel: ChannelId, center: Frequency, bandwidth: Frequency) -> Result<Self> {
        if !bandwidth.is_positive() {
            return Err(Error::InvalidMeasurement(format!(
                "detector bandwidth must be positive, got {bandwidth}"
            )));
        }
        Ok(NarrowbandDetector {
            channel,
            center,
            bandwidth,
        })
    }

    /// Detector whose acceptance interval is exactly `[lo, lo + width)`.
    /// An odd `width` in quanta places the center half a quantum low.
    pub fn spanning(channel: ChannelId, lo: Frequency, width: Frequency) -> Result<Self> {
        let center = lo + Frequency::from_quanta(width.quanta().div_euclid(2));
        NarrowbandDetector::new(channel, center, width)
    }

    pub fn channel(&self) -> ChannelId {
        self.channel
    }

    pub fn center(&self) -> Frequency {
        self.center
    }

    pub fn bandwidth(&self) -> Frequency {
        self.bandwidth
    }

    /// Same detector retuned to `center`.
    pub fn tuned_to(&self, center: Frequency) -> Self {
        NarrowbandDetector { center, ..*self }
    }

    pub fn accepts(&self, omega: Frequency) -> bool {
        // doubled to keep half-bandwidths exact
        let w = 2 * omega.quanta() as i128;
        let c = 2 * self.center.quanta() as i128;
        let b = self.bandwidth.quanta() as i128;
        w >= c - b && w < c + b
    }
}

/// One outcome of a two-valued projective measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome {
    /// 1 for the projector, 0 for its complement.
    pub outcome: u8,
    pub probability: f64,
    /// Normalized conditional state; absent when `probability` is zero.
    pub post_state: Option<PhotonState>,
}

impl MeasurementOutcome {
    fn from_component(outcome: u8, component: PhotonState) -> Self {
        let probability = component.norm_sqr();
        let post_state = if component.is_empty() {
            None
        } else {
            component.normalize().ok()
        };
        MeasurementOutcome {
            outcome,
            probability,
            post_state,
        }
    }
}

/// Unnormalized `(P ψ, (1 - P) ψ)` for the frequency-sum projector.
pub fn frequency_sum_components(
    state: &PhotonState,
    window: &FrequencySumWindow,
) -> Result<(PhotonState, PhotonState)> {
    let (a, b) = window.channels();
    let pa = state.require(a)?;
    let pb = state.require(b)?;
    let ga = state.channels()[pa].grid;
    let gb = state.channels()[pb].grid;
    let inside = |t: &[usize]| window.contains(ga.center(t[pa]) + gb.center(t[pb]));
    Ok((
        state.filter(|t, _| inside(t)),
        state.filter(|t, _| !inside(t)),
    ))
}

/// Measures the projector onto `window` and its complement.
/// Returns `(outcome 1, outcome 0)`.
pub fn project_frequency_sum(
    state: &PhotonState,
    window: &FrequencySumWindow,
) -> Result<(MeasurementOutcome, MeasurementOutcome)> {
    state.require_normalized()?;
    let (inside, outside) = frequency_sum_components(state, window)?;
    Ok((
        MeasurementOutcome::from_component(1, inside),
        MeasurementOutcome::from_component(0, outside),
    ))
}

/// Result of a detector firing: the firing probability and the normalized
/// state of the remaining photons.
#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub probability: f64,
    pub post_state: Option<PhotonState>,
}

/// Fires `detector` on `state` and absorbs the detected photon.
pub fn detect_and_absorb(state: &PhotonState, detector: &NarrowbandDetector) -> Result<Detection> {
    state.require_normalized()?;
    let pos = state.require(detector.channel())?;
    let grid = state.channels()[pos].grid;
    let fired = state.filter(|t, _| detector.accepts(grid.center(t[pos])));
    let probability = fired.norm_sqr();
    let post_state = if fired.is_empty() {
        None
    } else {
        Some(fired.remove_channels(&[detector.channel()])?.normalize()?)
    };
    Ok(Detection {
        probability,
        post_state,
    })
}

/// Probability that both detectors fire.
pub fn coincidence_probability(
    state: &PhotonState,
    det_a: &NarrowbandDetector,
    det_b: &NarrowbandDetector,
) -> Result<f64> {
    state.require_normalized()?;
    if det_a.channel() == det_b.channel() {
        return Err(Error::InvalidMeasurement(format!(
            "both detectors watch {}",
            det_a.channel()
        )));
    }
    let pa = state.require(det_a.channel())?;
    let pb = state.require(det_b.channel())?;
    let ga = state.channels()[pa].grid;
    let gb = state.channels()[pb].grid;
    Ok(state
        .iter()
        .filter(|(t, _)| det_a.accepts(ga.center(t[pa])) && det_b.accepts(gb.center(t[pb])))
        .map(|(_, a)| a.norm_sqr())
        .fold(0.0, |acc, p| acc + p))
}

/// Uniform sampling of the time axis: `t_start + i * delta_t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub delta_t: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, delta_t: f64, samples: usize) -> Result<Self> {
        if !t_start.is_finite() || !(delta_t > 0.0 && delta_t.is_finite()) {
            return Err(Error::InvalidTimeGrid(format!(
                "need finite start and positive spacing, got start {t_start}, spacing {delta_t}"
            )));
        }
        if samples == 0 {
            return Err(Error::InvalidTimeGrid(
                "sample count must be at least 1".into(),
            ));
        }
        Ok(TimeGrid {
            t_start,
            delta_t,
            samples,
        })
    }

    /// `samples` points symmetric about zero with spacing `delta_t`.
    pub fn centered(delta_t: f64, samples: usize) -> Result<Self> {
        let half = (samples.saturating_sub(1)) as f64 * delta_t / 2.0;
        TimeGrid::new(-half, delta_t, samples)
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.delta_t
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples).map(move |i| self.time(i))
    }
}

/// Joint density of detection times, row-major with `t1` as the row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeDensity {
    pub grid: TimeGrid,
    pub channels: (ChannelId, ChannelId),
    pub values: Vec<f64>,
}

impl TimeDensity {
    pub fn at(&self, i1: usize, i2: usize) -> f64 {
        self.values[i1 * self.grid.samples + i2]
    }

    pub fn row(&self, i1: usize) -> &[f64] {
        let n = self.grid.samples;
        &self.values[i1 * n..(i1 + 1) * n]
    }

    /// Discrete integral `Σ density * Δt²`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.delta_t * self.grid.delta_t
    }
}

/// Density of the registration times `(t1, t2)` of the photons in
/// `chan_a` and `chan_b`, from the kernel `e^{-i ω_a t1 - i ω_b t2}`.
/// Renormalized so that the discrete integral over the grid is 1.
pub fn joint_time_density(
    state: &PhotonState,
    chan_a: ChannelId,
    chan_b: ChannelId,
    grid: &TimeGrid,
) -> Result<TimeDensity> {
    if state.channels().len() != 2 {
        return Err(Error::NotTwoPhoton(state.channels().len()));
    }
    if chan_a == chan_b {
        return Err(Error::InvalidMeasurement(
            "time density needs two channels".into(),
        ));
    }
    state.require_normalized()?;
    let pa = state.require(chan_a)?;
    let pb = state.require(chan_b)?;
    let ga = state.channels()[pa].grid;
    let gb = state.channels()[pb].grid;

    let entries: Vec<(f64, f64, Complex64)> = state
        .iter()
        .map(|(t, a)| (ga.center(t[pa]).units(), gb.center(t[pb]).units(), *a))
        .collect();
    let n = grid.samples;
    let row = |i1: usize| -> Vec<f64> {
        let t1 = grid.time(i1);
        let first: Vec<Complex64> = entries
            .iter()
            .map(|(wa, _, amp)| amp * Complex64::from_polar(1.0, -wa * t1))
            .collect();
        (0..n)
            .map(|i2| {
                let t2 = grid.time(i2);
                let mut acc = Complex64::default();
                for (x, (_, wb, _)) in first.iter().zip(&entries) {
                    acc += x * Complex64::from_polar(1.0, -wb * t2);
                }
                acc.norm_sqr()
            })
            .collect()
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = (0..n).map(row).collect();

    let mut values: Vec<f64> = rows.into_iter().flatten().collect();
    let total: f64 = values.iter().sum::<f64>() * grid.delta_t * grid.delta_t;
    if total.is_nan() || total <= 0.0 {
        return Err(Error::InvalidTimeGrid(
            "density vanishes on every sample".into(),
        ));
    }
    values.iter_mut().for_each(|v| *v /= total);
    Ok(TimeDensity {
        grid: *grid,
        channels: (chan_a, chan_b),
        values,
    })
}

/// Full width at half maximum of a sampled peak, with linear
/// interpolation of the two half-maximum crossings around the global
/// maximum. `None` if the peak is not bracketed inside the samples.
pub fn half_max_width(samples: &[f64], spacing: f64) -> Option<f64> {
    let (peak, &max) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    let half = max / 2.0;
    let left = (1..=peak).rev().find(|&i| samples[i - 1] < half).map(|i| {
        let (lo, hi) = (samples[i - 1], samples[i]);
        (i - 1) as f64 + (half - lo) / (hi - lo)
    })?;
    let right = (peak..samples.len() - 1)
        .find(|&i| samples[i + 1] < half)
        .map(|i| {
            let (hi, lo) = (samples[i], samples[i + 1]);
            i as f64 + (hi - half) / (hi - lo)
        })?;
    Some((right - left) * spacing)
}
