//! Browser bindings for the freqswap demo page.
//!
//! Three operations back the page: the joint detection-time density of a
//! biphoton, the photon 1-4 coincidence map after the swap, and a sampled
//! coincidence histogram. The source frequencies are fixed to the desk
//! setup (spacing 0.05, pumps 2.0 and 2.2); the page varies bin counts,
//! profile shape, the sum window and the measurement path.

use freqswap::montecarlo::chi_square;
use freqswap::{
    coincidence_histogram, joint_time_density, run_swap, sample_frequencies, spdc_biphoton,
    ChannelId, Frequency, FrequencyGrid, NarrowbandDetector, PhotonState, SpectralAmplitude,
    SwapConfig, SwapPath, SwapResult, TimeGrid,
};
use wasm_bindgen::prelude::*;

const SPACING: f64 = 0.05;
const PUMP_I: f64 = 2.0;
const PUMP_II: f64 = 2.2;
const F_START: f64 = 0.8;
const G_START: f64 = 0.9;

/// Page controls.
#[wasm_bindgen]
#[derive(Clone, Copy, Debug)]
pub struct DemoConfig {
    pub f_bins: u32,
    pub g_bins: u32,
    /// Gaussian rms width in bins; 0 selects flat profiles.
    pub profile_width: f64,
    /// Lower edge of the sum window.
    pub omega_iii: f64,
    pub window_bins: u32,
    /// Merge-and-detect instead of the ideal projector.
    pub physical: bool,
}

#[wasm_bindgen]
impl DemoConfig {
    #[wasm_bindgen(constructor)]
    pub fn new() -> DemoConfig {
        DemoConfig {
            f_bins: 8,
            g_bins: 8,
            profile_width: 0.0,
            omega_iii: 2.1,
            window_bins: 1,
            physical: false,
        }
    }
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig::new()
    }
}

fn freq(x: f64) -> Result<Frequency, String> {
    Frequency::new(x).map_err(|e| e.to_string())
}

fn profile(start: f64, bins: u32, width: f64) -> Result<SpectralAmplitude, String> {
    if bins == 0 || bins > 64 {
        return Err(format!("bin count must be 1..=64, got {bins}"));
    }
    let grid =
        FrequencyGrid::from_units(start, SPACING, bins as usize).map_err(|e| e.to_string())?;
    if width > 0.0 {
        let center = start + SPACING * (bins - 1) as f64 / 2.0;
        SpectralAmplitude::gaussian(grid, center, width * SPACING).map_err(|e| e.to_string())
    } else {
        Ok(SpectralAmplitude::flat(grid))
    }
}

fn swap_config(cfg: &DemoConfig) -> Result<SwapConfig, String> {
    let f = profile(F_START, cfg.f_bins, cfg.profile_width)?;
    let g = profile(G_START, cfg.g_bins, cfg.profile_width)?;
    if cfg.window_bins == 0 {
        return Err("window must span at least one bin".into());
    }
    let path = if cfg.physical {
        SwapPath::PhysicalMergeDetect
    } else {
        SwapPath::IdealProjector
    };
    Ok(
        SwapConfig::new(freq(PUMP_I)?, freq(PUMP_II)?, freq(cfg.omega_iii)?, f, g)
            .with_window_width(freq(SPACING * cfg.window_bins as f64)?)
            .with_path(path),
    )
}

fn heralded(cfg: &DemoConfig) -> Result<Option<SwapResult>, String> {
    let config = swap_config(cfg)?;
    Ok(run_swap(&config)
        .map_err(|e| e.to_string())?
        .into_heralded())
}

/// Sampled `(t1, t2)` density, row-major with `t1` as the row.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct DensityView {
    samples: usize,
    t_start: f64,
    delta_t: f64,
    values: Vec<f64>,
    peak_width: f64,
}

#[wasm_bindgen]
impl DensityView {
    #[wasm_bindgen(getter)]
    pub fn samples(&self) -> usize {
        self.samples
    }

    #[wasm_bindgen(getter)]
    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    #[wasm_bindgen(getter)]
    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    /// Full width at half maximum of the central cut, NaN if unbracketed.
    #[wasm_bindgen(getter)]
    pub fn peak_width(&self) -> f64 {
        self.peak_width
    }
}

/// Density for `pair` = "12" (source I) or "14" (swapped pair).
pub fn density(
    cfg: &DemoConfig,
    pair: &str,
    samples: usize,
    delta_t: f64,
) -> Result<DensityView, String> {
    let state: PhotonState = match pair {
        "12" => {
            let f = profile(F_START, cfg.f_bins, cfg.profile_width)?;
            spdc_biphoton(freq(PUMP_I)?, &f, ChannelId::Ch1, ChannelId::Ch2)
                .map_err(|e| e.to_string())?
        }
        "14" => {
            heralded(cfg)?
                .ok_or("the sum window post-selects nothing")?
                .post_state_14
        }
        other => return Err(format!("unknown pair {other:?}")),
    };
    if !(2..=401).contains(&samples) {
        return Err(format!("samples must be 2..=401, got {samples}"));
    }
    let grid = TimeGrid::centered(delta_t, samples).map_err(|e| e.to_string())?;
    let ids = state.channel_ids();
    let d = joint_time_density(&state, ids[0], ids[1], &grid).map_err(|e| e.to_string())?;
    let mid = samples / 2;
    let cut: Vec<f64> = (0..samples).map(|i| d.at(i, mid)).collect();
    Ok(DensityView {
        samples,
        t_start: grid.t_start,
        delta_t,
        peak_width: freqswap::measurement::half_max_width(&cut, delta_t).unwrap_or(f64::NAN),
        values: d.values,
    })
}

#[wasm_bindgen(js_name = timeDensity)]
pub fn time_density(
    cfg: &DemoConfig,
    pair: &str,
    samples: usize,
    delta_t: f64,
) -> Result<DensityView, JsError> {
    density(cfg, pair, samples, delta_t).map_err(|e| JsError::new(&e))
}

/// Coincidence map of photons 1 and 4, `omega_1` as the row.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct SwapView {
    heralded: bool,
    success_probability: f64,
    entropy: f64,
    schmidt_rank: usize,
    omega_1: Vec<f64>,
    omega_4: Vec<f64>,
    probabilities: Vec<f64>,
    branch_sums: Vec<f64>,
    branch_probabilities: Vec<f64>,
}

#[wasm_bindgen]
impl SwapView {
    #[wasm_bindgen(getter)]
    pub fn heralded(&self) -> bool {
        self.heralded
    }

    #[wasm_bindgen(getter)]
    pub fn success_probability(&self) -> f64 {
        self.success_probability
    }

    #[wasm_bindgen(getter)]
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    #[wasm_bindgen(getter)]
    pub fn schmidt_rank(&self) -> usize {
        self.schmidt_rank
    }

    #[wasm_bindgen(getter)]
    pub fn omega_1(&self) -> Vec<f64> {
        self.omega_1.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn omega_4(&self) -> Vec<f64> {
        self.omega_4.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn probabilities(&self) -> Vec<f64> {
        self.probabilities.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn branch_sums(&self) -> Vec<f64> {
        self.branch_sums.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn branch_probabilities(&self) -> Vec<f64> {
        self.branch_probabilities.clone()
    }
}

fn axes(r: &SwapResult) -> (Vec<f64>, Vec<f64>) {
    let s = &r.post_state_14;
    let g1 = s.grid(ChannelId::Ch1).expect("photon 1 present");
    let g4 = s.grid(ChannelId::Ch4).expect("photon 4 present");
    (
        g1.centers().map(|w| w.units()).collect(),
        g4.centers().map(|w| w.units()).collect(),
    )
}

pub fn coincidence_map(cfg: &DemoConfig) -> Result<SwapView, String> {
    let Some(r) = heralded(cfg)? else {
        return Ok(SwapView {
            heralded: false,
            success_probability: 0.0,
            entropy: 0.0,
            schmidt_rank: 0,
            omega_1: Vec::new(),
            omega_4: Vec::new(),
            probabilities: Vec::new(),
            branch_sums: Vec::new(),
            branch_probabilities: Vec::new(),
        });
    };
    let (omega_1, omega_4) = axes(&r);
    Ok(SwapView {
        heralded: true,
        success_probability: r.success_probability,
        entropy: r.entanglement_entropy,
        schmidt_rank: r.schmidt_coefficients.len(),
        omega_1,
        omega_4,
        probabilities: r.coincidence_table.iter().map(|c| c.probability).collect(),
        branch_sums: r.branches.iter().map(|b| b.pair_sum.units()).collect(),
        branch_probabilities: r.branches.iter().map(|b| b.probability).collect(),
    })
}

#[wasm_bindgen(js_name = swapMap)]
pub fn swap_map(cfg: &DemoConfig) -> Result<SwapView, JsError> {
    coincidence_map(cfg).map_err(|e| JsError::new(&e))
}

/// Sampled counts on the same cells as [`SwapView`].
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct HistogramView {
    omega_1: Vec<f64>,
    omega_4: Vec<f64>,
    counts: Vec<f64>,
    expected: Vec<f64>,
    chi_square: f64,
    trials: u32,
}

#[wasm_bindgen]
impl HistogramView {
    #[wasm_bindgen(getter)]
    pub fn omega_1(&self) -> Vec<f64> {
        self.omega_1.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn omega_4(&self) -> Vec<f64> {
        self.omega_4.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn counts(&self) -> Vec<f64> {
        self.counts.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn expected(&self) -> Vec<f64> {
        self.expected.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn chi_square(&self) -> f64 {
        self.chi_square
    }

    #[wasm_bindgen(getter)]
    pub fn trials(&self) -> u32 {
        self.trials
    }
}

pub fn histogram(cfg: &DemoConfig, trials: u32, seed: u32) -> Result<HistogramView, String> {
    if trials == 0 || trials > 1_000_000 {
        return Err(format!("trials must be 1..=1000000, got {trials}"));
    }
    let r = heralded(cfg)?.ok_or("the sum window post-selects nothing")?;
    let state = &r.post_state_14;
    let run = sample_frequencies(state, trials as u64, seed as u64).map_err(|e| e.to_string())?;
    let g1 = *state.grid(ChannelId::Ch1).expect("photon 1 present");
    let g4 = *state.grid(ChannelId::Ch4).expect("photon 4 present");
    let det1 = NarrowbandDetector::new(ChannelId::Ch1, g1.center(0), g1.spacing())
        .map_err(|e| e.to_string())?;
    let det4 = NarrowbandDetector::new(ChannelId::Ch4, g4.center(0), g4.spacing())
        .map_err(|e| e.to_string())?;
    let sweep: Vec<_> = r
        .coincidence_table
        .iter()
        .map(|c| (c.omega_1, c.omega_4))
        .collect();
    let hist = coincidence_histogram(&run, &det1, &det4, &sweep).map_err(|e| e.to_string())?;
    let expected: Vec<f64> = r
        .coincidence_table
        .iter()
        .map(|c| c.probability * trials as f64)
        .collect();
    let (omega_1, omega_4) = axes(&r);
    Ok(HistogramView {
        omega_1,
        omega_4,
        chi_square: chi_square(&hist.counts(), &expected),
        counts: hist.counts().iter().map(|&c| c as f64).collect(),
        expected,
        trials,
    })
}

#[wasm_bindgen(js_name = sampleHistogram)]
pub fn sample_histogram(
    cfg: &DemoConfig,
    trials: u32,
    seed: u32,
) -> Result<HistogramView, JsError> {
    histogram(cfg, trials, seed).map_err(|e| JsError::new(&e))
}
