//! Result bundles and plot-ready tables.
//!
//! A bundle is written as one JSON document; each table inside it is also
//! written as CSV whose header cells read `name [unit]`.

use serde::{Deserialize, Serialize};

use crate::frequency::Frequency;
use crate::measurement::{half_max_width, TimeDensity};
use crate::montecarlo::CoincidenceHistogram;
use crate::protocol::{CoincidenceCell, SwapOutcome, SwapPath, SwapResult};
use crate::schmidt::SchmidtDecomposition;
use crate::state::PhotonState;

pub const FREQUENCY_UNIT: &str = "arb. angular frequency";
pub const TIME_UNIT: &str = "arb. time (inverse frequency)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub description: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self
            .columns
            .iter()
            .map(|c| format!("{} [{}]", c.name, c.unit))
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for row in &self.rows {
            let line = row
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiphotonSummary {
    pub source: String,
    pub pump: Frequency,
    pub entries: usize,
    pub schmidt_coefficients: Vec<f64>,
    pub entropy_nats: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub pair: String,
    /// Width of the `t1` cut through the middle `t2` sample.
    pub central_peak_fwhm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSummary {
    pub pair_sum: Frequency,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwapStatus {
    Heralded,
    EmptyPostSelection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapSummary {
    pub status: SwapStatus,
    pub path: SwapPath,
    pub success_probability: f64,
    /// Factor left out of `success_probability` (`χ_III²` on the physical path).
    pub merge_scale: f64,
    pub pair_scale: f64,
    pub sum_invariant: Frequency,
    pub entanglement_entropy_nats: Option<f64>,
    pub schmidt_coefficients: Vec<f64>,
    pub branches: Vec<BranchSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub swap: SwapSummary,
    pub trials: u64,
    pub seed: u64,
    pub rng: String,
    /// Events whose `ω1 + ω4` misses the sum invariant.
    pub off_line_events: u64,
    pub chi_square: f64,
    pub chi_square_dof: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Summary {
    Biphoton { sources: Vec<BiphotonSummary> },
    TimeCoincidence { densities: Vec<DensitySummary> },
    Swap(SwapSummary),
    Sample(SampleSummary),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub tool_version: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

impl Provenance {
    pub fn new(config_sha256: String) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config_sha256,
            seed: None,
            trials: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub summary: Summary,
    pub tables: Vec<Table>,
    pub provenance: Provenance,
}

impl ResultBundle {
    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("bundles contain only finite numbers");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

pub fn biphoton_summary(
    source: &str,
    pump: Frequency,
    state: &PhotonState,
    schmidt: &SchmidtDecomposition,
) -> BiphotonSummary {
    BiphotonSummary {
        source: source.into(),
        pump,
        entries: state.len(),
        schmidt_coefficients: schmidt.coefficients.clone(),
        entropy_nats: schmidt.entropy,
    }
}

/// Two-photon spectrum: one row per stored entry.
pub fn spectrum_table(name: &str, description: &str, state: &PhotonState) -> Table {
    let ids = state.channel_ids();
    let mut columns: Vec<Column> = ids
        .iter()
        .map(|id| Column::new(&format!("omega_{id}"), FREQUENCY_UNIT))
        .collect();
    columns.push(Column::new("amplitude_re", "1"));
    columns.push(Column::new("amplitude_im", "1"));
    columns.push(Column::new("probability", "1"));
    let rows = state
        .iter()
        .map(|(t, a)| {
            let mut row: Vec<f64> = state.frequencies(t).iter().map(|w| w.units()).collect();
            row.extend([a.re, a.im, a.norm_sqr()]);
            row
        })
        .collect();
    Table {
        name: name.into(),
        description: description.into(),
        columns,
        rows,
    }
}

pub fn density_table(name: &str, density: &TimeDensity) -> Table {
    let n = density.grid.samples;
    let (a, b) = density.channels;
    let rows = (0..n)
        .flat_map(|i1| (0..n).map(move |i2| (i1, i2)))
        .map(|(i1, i2)| {
            vec![
                density.grid.time(i1),
                density.grid.time(i2),
                density.at(i1, i2),
            ]
        })
        .collect();
    Table {
        name: name.into(),
        description: format!(
            "joint detection-time density of {a} and {b}, normalized over the grid"
        ),
        columns: vec![
            Column::new(&format!("t_{a}"), TIME_UNIT),
            Column::new(&format!("t_{b}"), TIME_UNIT),
            Column::new("density", "1/time^2"),
        ],
        rows,
    }
}

pub fn density_summary(pair: &str, density: &TimeDensity) -> DensitySummary {
    let mid = density.grid.samples / 2;
    let cut: Vec<f64> = (0..density.grid.samples)
        .map(|i| density.at(i, mid))
        .collect();
    DensitySummary {
        pair: pair.into(),
        central_peak_fwhm: half_max_width(&cut, density.grid.delta_t),
    }
}

pub fn coincidence_table(cells: &[CoincidenceCell]) -> Table {
    Table {
        name: "coincidence_sweep".into(),
        description:
            "probability that one-bin detectors on photons 1 and 4 fire together, given the herald"
                .into(),
        columns: vec![
            Column::new("omega_1", FREQUENCY_UNIT),
            Column::new("omega_4", FREQUENCY_UNIT),
            Column::new("probability", "1"),
        ],
        rows: cells
            .iter()
            .map(|c| vec![c.omega_1.units(), c.omega_4.units(), c.probability])
            .collect(),
    }
}

pub fn histogram_table(hist: &CoincidenceHistogram, expected: &[f64]) -> Table {
    Table {
        name: "coincidence_histogram".into(),
        description: format!(
            "sampled coincidence counts on {} x {}; {} of {} events fell in no cell",
            hist.channel_a, hist.channel_b, hist.unassigned, hist.trials
        ),
        columns: vec![
            Column::new(&format!("omega_{}", hist.channel_a), FREQUENCY_UNIT),
            Column::new(&format!("omega_{}", hist.channel_b), FREQUENCY_UNIT),
            Column::new("count", "events"),
            Column::new("expected", "events"),
        ],
        rows: hist
            .cells
            .iter()
            .zip(expected)
            .map(|(c, e)| vec![c.center_a.units(), c.center_b.units(), c.count as f64, *e])
            .collect(),
    }
}

pub fn swap_summary(outcome: &SwapOutcome) -> SwapSummary {
    match outcome {
        SwapOutcome::Heralded(r) => heralded_summary(r),
        SwapOutcome::NotHeralded {
            path,
            sum_invariant,
            ..
        } => SwapSummary {
            status: SwapStatus::EmptyPostSelection,
            path: *path,
            success_probability: 0.0,
            merge_scale: 1.0,
            pair_scale: 1.0,
            sum_invariant: *sum_invariant,
            entanglement_entropy_nats: None,
            schmidt_coefficients: Vec::new(),
            branches: Vec::new(),
        },
    }
}

fn heralded_summary(r: &SwapResult) -> SwapSummary {
    SwapSummary {
        status: SwapStatus::Heralded,
        path: r.path,
        success_probability: r.success_probability,
        merge_scale: r.merge_scale,
        pair_scale: r.pair_scale,
        sum_invariant: r.sum_invariant,
        entanglement_entropy_nats: Some(r.entanglement_entropy),
        schmidt_coefficients: r.schmidt_coefficients.clone(),
        branches: r
            .branches
            .iter()
            .map(|b| BranchSummary {
                pair_sum: b.pair_sum,
                probability: b.probability,
            })
            .collect(),
    }
}
