use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::{Frequency, FrequencyGrid};

/// A complex spectral weight tabulated on a frequency grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralAmplitude {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl SpectralAmplitude {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.bins() {
            return Err(Error::AmplitudeCountMismatch {
                expected: grid.bins(),
                found: values.len(),
            });
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFiniteAmplitude);
        }
        Ok(SpectralAmplitude { grid, values })
    }

    /// Unit weight on every bin.
    pub fn flat(grid: FrequencyGrid) -> Self {
        SpectralAmplitude {
            grid,
            values: vec![Complex64::new(1.0, 0.0); grid.bins()],
        }
    }

    /// Tabulates `profile` at each bin center.
    pub fn from_fn<F>(grid: FrequencyGrid, mut profile: F) -> Result<Self>
    where
        F: FnMut(Frequency) -> Complex64,
    {
        let values = grid.centers().map(&mut profile).collect();
        SpectralAmplitude::new(grid, values)
    }

    /// Real Gaussian envelope centered at `center` with rms width `sigma`.
    pub fn gaussian(grid: FrequencyGrid, center: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "gaussian width must be positive, got {sigma}"
            )));
        }
        SpectralAmplitude::from_fn(grid, |w| {
            let x = (w.units() - center) / sigma;
            Complex64::new((-0.5 * x * x).exp(), 0.0)
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> Complex64 {
        self.values[k]
    }

    /// Weight at an exact bin center, zero off the grid.
    pub fn at(&self, omega: Frequency) -> Complex64 {
        self.grid
            .exact_bin(omega)
            .map(|k| self.values[k])
            .unwrap_or_default()
    }
}
