use thiserror::Error;

use crate::frequency::Frequency;
use crate::state::ChannelId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("frequency {0} is not finite or exceeds the supported range")]
    FrequencyOutOfRange(f64),

    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("bin spacings differ: {left} vs {right}")]
    SpacingMismatch { left: Frequency, right: Frequency },

    #[error("spectral amplitude has {found} values for a {expected}-bin grid")]
    AmplitudeCountMismatch { expected: usize, found: usize },

    #[error("amplitude is not finite")]
    NonFiniteAmplitude,

    #[error("channel {0} appears more than once")]
    DuplicateChannel(ChannelId),

    #[error("both states carry channel {0}")]
    OverlappingChannels(ChannelId),

    #[error("state has no channel {0}")]
    MissingChannel(ChannelId),

    #[error("invalid bin tuple: {0}")]
    InvalidTuple(String),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid bipartition: {0}")]
    InvalidPartition(String),

    #[error("empty support: {0}")]
    EmptySupport(String),

    #[error("invalid crystal: {0}")]
    InvalidCrystal(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("expected a two-photon state on exactly two channels, found {0}")]
    NotTwoPhoton(usize),

    #[error("invalid sampling request: {0}")]
    InvalidSampling(String),

    #[error("invalid swap configuration: {0}")]
    InvalidSwapConfig(String),
}
