//! Simulation of frequency entanglement swapping between two biphotons.
//!
//! Two χ(2) crystals each down-convert a monochromatic pump photon into a
//! frequency-anticorrelated pair. The inner photons of the two pairs are
//! merged in a third crystal and the sum-frequency photon is detected in a
//! narrow band; conditioned on that detection, the outer photons (which
//! never interacted) share a fixed frequency sum.
//!
//! The crate is organised bottom-up:
//!
//! - [`frequency`]: exact fixed-point frequencies and bin lattices
//! - [`state`], [`spectrum`], [`schmidt`]: sparse photon states and their
//!   bipartite structure
//! - [`crystal`]: first-order split and merge
//! - [`measurement`]: frequency-sum projector, detectors, time-of-arrival
//!   density
//! - [`protocol`]: the end-to-end swap
//! - [`montecarlo`]: sampled detection records and histograms
//! - [`config`], [`report`]: experiment files and result bundles

pub mod config;
pub mod crystal;
pub mod error;
pub mod frequency;
pub mod measurement;
pub mod montecarlo;
pub mod protocol;
pub mod report;
pub mod schmidt;
pub mod spectrum;
pub mod state;

pub use crystal::{spdc_biphoton, sum_frequency_merge, CrystalMode, CrystalSpec};
pub use error::{Error, Result};
pub use frequency::{Frequency, FrequencyGrid};
pub use measurement::{
    coincidence_probability, detect_and_absorb, frequency_sum_components, joint_time_density,
    project_frequency_sum, FrequencySumWindow, MeasurementOutcome, NarrowbandDetector, TimeDensity,
    TimeGrid,
};
pub use montecarlo::{coincidence_histogram, sample_frequencies, CoincidenceHistogram, SampleRun};
pub use protocol::{run_swap, verify_epr, SwapConfig, SwapOutcome, SwapPath, SwapResult};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};
pub use spectrum::SpectralAmplitude;
pub use state::{tensor_product, Channel, ChannelId, PhotonState};
