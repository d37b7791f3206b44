//! Schmidt decomposition of a pure state across a channel bipartition.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{BinTuple, ChannelId, PhotonState};

/// Singular values below this fraction of the largest are treated as zero.
const RANK_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtDecomposition {
    /// Nonnegative, in descending order.
    pub coefficients: Vec<f64>,
    /// Entanglement entropy in nats.
    pub entropy: f64,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }
}

/// `-sum p ln p` over the squared coefficients, with `0 ln 0 = 0`.
pub fn entropy_of(coefficients: &[f64]) -> f64 {
    coefficients
        .iter()
        .map(|c| c * c)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .fold(0.0, |acc, x| acc + x)
}

/// Decomposes `state` across `left | rest`.
///
/// Only populated left and right sub-tuples become rows and columns of the
/// coefficient matrix, so the SVD runs on the support rather than the full
/// grid product.
pub fn schmidt_decompose(state: &PhotonState, left: &[ChannelId]) -> Result<SchmidtDecomposition> {
    state.require_normalized()?;
    if left.is_empty() {
        return Err(Error::InvalidPartition("left side is empty".into()));
    }
    let mut on_left = vec![false; state.channels().len()];
    for &id in left {
        let pos = state.require(id)?;
        if on_left[pos] {
            return Err(Error::InvalidPartition(format!("{id} listed twice")));
        }
        on_left[pos] = true;
    }
    if on_left.iter().all(|&l| l) {
        return Err(Error::InvalidPartition(
            "left side covers every channel".into(),
        ));
    }

    let mut rows: BTreeMap<BinTuple, usize> = BTreeMap::new();
    let mut cols: BTreeMap<BinTuple, usize> = BTreeMap::new();
    let mut entries = Vec::with_capacity(state.len());
    for (tuple, amp) in state.iter() {
        let (l, r): (Vec<_>, Vec<_>) = tuple
            .iter()
            .zip(&on_left)
            .partition(|(_, is_left)| **is_left);
        let l: BinTuple = l.into_iter().map(|(k, _)| *k).collect();
        let r: BinTuple = r.into_iter().map(|(k, _)| *k).collect();
        let n = rows.len();
        let i = *rows.entry(l).or_insert(n);
        let n = cols.len();
        let j = *cols.entry(r).or_insert(n);
        entries.push((i, j, *amp));
    }

    let mut m = DMatrix::<Complex64>::zeros(rows.len(), cols.len());
    for (i, j, a) in entries {
        m[(i, j)] = a;
    }
    let mut coefficients: Vec<f64> = m
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    let top = coefficients.first().copied().unwrap_or(0.0);
    coefficients.retain(|&s| s > RANK_CUTOFF * top);

    let entropy = entropy_of(&coefficients);
    Ok(SchmidtDecomposition {
        coefficients,
        entropy,
    })
}
