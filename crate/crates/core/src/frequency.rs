//! Exact frequency arithmetic and the bin lattices every channel lives on.
//!
//! Angular frequencies are stored as signed fixed-point integers with a
//! quantum of 1e-12 arbitrary units. Bin centers, pair sums and differences
//! are therefore computed without rounding, so identities such as
//! `omega_a + omega_b == pump` hold exactly rather than to a tolerance.
//! Conversion to `f64` only happens where a phase or a plot coordinate is
//! needed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of fixed-point quanta per arbitrary frequency unit.
pub const QUANTA_PER_UNIT: i64 = 1_000_000_000_000;

/// Largest magnitude accepted by [`Frequency::new`], in arbitrary units.
pub const MAX_ABS_UNITS: f64 = 1.0e6;

/// An angular frequency in arbitrary units, held on an exact 1e-12 lattice.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(try_from = "f64", into = "f64")]
pub struct Frequency(i64);

impl Frequency {
    pub const ZERO: Frequency = Frequency(0);

    /// Rounds `units` to the nearest quantum.
    pub fn new(units: f64) -> Result<Self> {
        if !units.is_finite() || units.abs() > MAX_ABS_UNITS {
            return Err(Error::FrequencyOutOfRange(units));
        }
        Ok(Frequency((units * QUANTA_PER_UNIT as f64).round() as i64))
    }

    pub const fn from_quanta(quanta: i64) -> Self {
        Frequency(quanta)
    }

    pub const fn quanta(self) -> i64 {
        self.0
    }

    pub fn units(self) -> f64 {
        self.0 as f64 / QUANTA_PER_UNIT as f64
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl TryFrom<f64> for Frequency {
    type Error = Error;

    fn try_from(units: f64) -> Result<Self> {
        Frequency::new(units)
    }
}

impl From<Frequency> for f64 {
    fn from(f: Frequency) -> f64 {
        f.units()
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.units())
    }
}

impl Add for Frequency {
    type Output = Frequency;
    fn add(self, rhs: Frequency) -> Frequency {
        Frequency(self.0 + rhs.0)
    }
}

impl Sub for Frequency {
    type Output = Frequency;
    fn sub(self, rhs: Frequency) -> Frequency {
        Frequency(self.0 - rhs.0)
    }
}

impl Neg for Frequency {
    type Output = Frequency;
    fn neg(self) -> Frequency {
        Frequency(-self.0)
    }
}

impl Mul<i64> for Frequency {
    type Output = Frequency;
    fn mul(self, rhs: i64) -> Frequency {
        Frequency(self.0 * rhs)
    }
}

/// Arithmetic lattice of positive bin centers: `start + k * spacing` for
/// `k` in `0..bins`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrequencyGrid {
    start: Frequency,
    spacing: Frequency,
    bins: usize,
}

impl FrequencyGrid {
    pub fn new(start: Frequency, spacing: Frequency, bins: usize) -> Result<Self> {
        if !start.is_positive() {
            return Err(Error::InvalidGrid(format!(
                "center of bin 0 must be positive, got {start}"
            )));
        }
        if !spacing.is_positive() {
            return Err(Error::InvalidGrid(format!(
                "bin spacing must be positive, got {spacing}"
            )));
        }
        if bins == 0 {
            return Err(Error::InvalidGrid("bin count must be at least 1".into()));
        }
        Ok(FrequencyGrid {
            start,
            spacing,
            bins,
        })
    }

    /// Convenience constructor from plain `f64` units.
    pub fn from_units(start: f64, spacing: f64, bins: usize) -> Result<Self> {
        FrequencyGrid::new(Frequency::new(start)?, Frequency::new(spacing)?, bins)
    }

    pub fn start(&self) -> Frequency {
        self.start
    }

    pub fn spacing(&self) -> Frequency {
        self.spacing
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Center of bin `k`. `k` may lie outside `0..bins`; the lattice
    /// extends naturally.
    pub fn center(&self, k: usize) -> Frequency {
        self.start + self.spacing * k as i64
    }

    pub fn last_center(&self) -> Frequency {
        self.center(self.bins - 1)
    }

    pub fn centers(&self) -> impl ExactSizeIterator<Item = Frequency> + '_ {
        (0..self.bins).map(move |k| self.center(k))
    }

    /// Bin whose center lies within half a spacing of `omega`. A value
    /// exactly between two in-range centers goes to the lower bin.
    pub fn bin_of(&self, omega: Frequency) -> Option<usize> {
        let offset = (omega - self.start).quanta() as i128;
        let spacing = self.spacing.quanta() as i128;
        let lower = offset.div_euclid(spacing);
        let rem = offset.rem_euclid(spacing);
        let in_range = |k: i128| k >= 0 && k < self.bins as i128;
        let k = match (2 * rem).cmp(&spacing) {
            std::cmp::Ordering::Less => lower,
            std::cmp::Ordering::Greater => lower + 1,
            std::cmp::Ordering::Equal if in_range(lower) => lower,
            std::cmp::Ordering::Equal => lower + 1,
        };
        in_range(k).then_some(k as usize)
    }

    /// Bin whose center equals `omega` exactly.
    pub fn exact_bin(&self, omega: Frequency) -> Option<usize> {
        let offset = (omega - self.start).quanta();
        let spacing = self.spacing.quanta();
        if offset < 0 || offset % spacing != 0 {
            return None;
        }
        let k = (offset / spacing) as usize;
        (k < self.bins).then_some(k)
    }

    /// Lattice of all pairwise center sums with `other`: bin 0 is the sum
    /// of the two bin-0 centers and there are `self.bins + other.bins - 1`
    /// bins. Both grids must share a spacing.
    pub fn sum_lattice(&self, other: &FrequencyGrid) -> Result<FrequencyGrid> {
        if self.spacing != other.spacing {
            return Err(Error::SpacingMismatch {
                left: self.spacing,
                right: other.spacing,
            });
        }
        FrequencyGrid::new(
            self.start + other.start,
            self.spacing,
            self.bins + other.bins - 1,
        )
    }
}

impl fmt::Display for FrequencyGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{} .. {}] step {} ({} bins)",
            self.start,
            self.last_center(),
            self.spacing,
            self.bins
        )
    }
}
