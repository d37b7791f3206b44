use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use freqswap::config::{parse_experiment, ExperimentFile};
use freqswap::montecarlo::chi_square;
use freqswap::report::{self, ResultBundle, SampleSummary, Summary, SwapSummary, Table};
use freqswap::{
    coincidence_histogram, joint_time_density, run_swap, sample_frequencies, schmidt_decompose,
    spdc_biphoton, ChannelId, NarrowbandDetector, SwapConfig, SwapOutcome, SwapResult,
};

use crate::RunArgs;

pub enum Status {
    Done,
    EmptyPostSelection,
}

struct Loaded {
    doc: ExperimentFile,
    config: SwapConfig,
    hash: String,
}

fn load(args: &RunArgs) -> Result<Loaded> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("cannot read {}", args.config.display()))?;
    let doc = parse_experiment(&text).with_context(|| format!("{}", args.config.display()))?;
    let mut config = doc
        .swap_config()
        .with_context(|| format!("{}", args.config.display()))?;
    if let Some(p) = args.path {
        config = config.with_path(p.into());
    }
    config
        .validate()
        .with_context(|| format!("{}", args.config.display()))?;
    let hash = doc.content_hash();
    Ok(Loaded { doc, config, hash })
}

fn write_outputs(out: &Path, bundle: &ResultBundle, extra: &[Table]) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    for table in bundle.tables.iter().chain(extra) {
        let path = out.join(table.file_name());
        fs::write(&path, table.to_csv())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    let path = out.join("summary.json");
    fs::write(&path, bundle.to_json())
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn swap_outcome(loaded: &Loaded) -> Result<SwapOutcome> {
    run_swap(&loaded.config).context("swap failed")
}

pub fn biphoton(args: &RunArgs) -> Result<Status> {
    let loaded = load(args)?;
    let c = &loaded.config;
    let sources = [
        ("source_i", c.omega_i, &c.f, ChannelId::Ch1, ChannelId::Ch2),
        (
            "source_ii",
            c.omega_ii,
            &c.g,
            ChannelId::Ch3,
            ChannelId::Ch4,
        ),
    ];
    let mut summaries = Vec::new();
    let mut tables = Vec::new();
    for (name, pump, weight, a, b) in sources {
        let state = spdc_biphoton(pump, weight, a, b).context(name)?;
        let schmidt = schmidt_decompose(&state, &[a])?;
        eprintln!(
            "{name}: {} pairs, entropy {:.6} nats",
            state.len(),
            schmidt.entropy
        );
        summaries.push(report::biphoton_summary(name, pump, &state, &schmidt));
        tables.push(report::spectrum_table(
            &format!("spectrum_{name}"),
            &format!("normalized biphoton amplitude of {name} ({a}, {b})"),
            &state,
        ));
    }
    let bundle = ResultBundle {
        summary: Summary::Biphoton { sources: summaries },
        tables,
        provenance: report::Provenance::new(loaded.hash),
    };
    write_outputs(&args.out, &bundle, &[])?;
    Ok(Status::Done)
}

pub fn time_coincidence(args: &RunArgs) -> Result<Status> {
    let loaded = load(args)?;
    let c = &loaded.config;
    let grid = loaded.doc.time_grid();

    let mut pairs = vec![
        (
            "pair_12",
            spdc_biphoton(c.omega_i, &c.f, ChannelId::Ch1, ChannelId::Ch2)?,
        ),
        (
            "pair_34",
            spdc_biphoton(c.omega_ii, &c.g, ChannelId::Ch3, ChannelId::Ch4)?,
        ),
    ];
    match swap_outcome(&loaded)?.into_heralded() {
        Some(r) => pairs.push(("pair_14", r.post_state_14)),
        None => eprintln!("swap not heralded; swapped-pair density omitted"),
    }

    let mut summaries = Vec::new();
    let mut grids = Vec::new();
    for (name, state) in &pairs {
        let ids = state.channel_ids();
        let density = joint_time_density(state, ids[0], ids[1], &grid)?;
        summaries.push(report::density_summary(name, &density));
        grids.push(report::density_table(&format!("density_{name}"), &density));
    }
    let bundle = ResultBundle {
        summary: Summary::TimeCoincidence {
            densities: summaries,
        },
        tables: Vec::new(),
        provenance: report::Provenance::new(loaded.hash),
    };
    write_outputs(&args.out, &bundle, &grids)?;
    Ok(Status::Done)
}

fn announce(summary: &SwapSummary) {
    match summary.entanglement_entropy_nats {
        Some(s) => eprintln!(
            "heralded: success probability {:.6}, photon 1-4 entropy {s:.6} nats",
            summary.success_probability
        ),
        None => eprintln!(
            "empty post-selection: no amplitude reaches the sum window (ω1 + ω4 invariant {})",
            summary.sum_invariant
        ),
    }
}

pub fn swap(args: &RunArgs) -> Result<Status> {
    let loaded = load(args)?;
    let outcome = swap_outcome(&loaded)?;
    let summary = report::swap_summary(&outcome);
    announce(&summary);
    let tables = match outcome.heralded() {
        Some(r) if loaded.doc.outputs().coincidence_sweep => {
            vec![report::coincidence_table(&r.coincidence_table)]
        }
        _ => Vec::new(),
    };
    let bundle = ResultBundle {
        summary: Summary::Swap(summary),
        tables,
        provenance: report::Provenance::new(loaded.hash),
    };
    write_outputs(&args.out, &bundle, &[])?;
    Ok(match outcome {
        SwapOutcome::Heralded(_) => Status::Done,
        SwapOutcome::NotHeralded { .. } => Status::EmptyPostSelection,
    })
}

pub fn sample(args: &RunArgs) -> Result<Status> {
    let loaded = load(args)?;
    let sampling = loaded.doc.sampling();
    let seed = args.seed.unwrap_or(sampling.seed);
    let trials = args.trials.unwrap_or(sampling.trials);
    if trials == 0 {
        anyhow::bail!("--trials must be at least 1");
    }

    let outcome = swap_outcome(&loaded)?;
    let swap = report::swap_summary(&outcome);
    announce(&swap);
    let mut provenance = report::Provenance::new(loaded.hash);
    provenance.seed = Some(seed);
    provenance.trials = Some(trials);

    let Some(result) = outcome.heralded() else {
        let bundle = ResultBundle {
            summary: Summary::Sample(SampleSummary {
                swap,
                trials,
                seed,
                rng: freqswap::montecarlo::RNG_ALGORITHM.into(),
                off_line_events: 0,
                chi_square: 0.0,
                chi_square_dof: 0,
            }),
            tables: Vec::new(),
            provenance,
        };
        write_outputs(&args.out, &bundle, &[])?;
        return Ok(Status::EmptyPostSelection);
    };

    let (summary, table) = sample_heralded(result, swap, seed, trials)?;
    eprintln!(
        "{trials} events, chi-square {:.3} with {} degrees of freedom",
        summary.chi_square, summary.chi_square_dof
    );
    let tables = if loaded.doc.outputs().histogram {
        vec![table]
    } else {
        Vec::new()
    };
    let bundle = ResultBundle {
        summary: Summary::Sample(summary),
        tables,
        provenance,
    };
    write_outputs(&args.out, &bundle, &[])?;
    Ok(Status::Done)
}

fn sample_heralded(
    result: &SwapResult,
    swap: SwapSummary,
    seed: u64,
    trials: u64,
) -> Result<(SampleSummary, Table)> {
    let state = &result.post_state_14;
    let run = sample_frequencies(state, trials, seed)?;
    let g1 = *state.grid(ChannelId::Ch1).expect("photon 1 present");
    let g4 = *state.grid(ChannelId::Ch4).expect("photon 4 present");

    let sweep: Vec<_> = result
        .coincidence_table
        .iter()
        .map(|c| (c.omega_1, c.omega_4))
        .collect();
    let expected: Vec<f64> = result
        .coincidence_table
        .iter()
        .map(|c| c.probability * trials as f64)
        .collect();
    let det1 = NarrowbandDetector::new(ChannelId::Ch1, g1.center(0), g1.spacing())?;
    let det4 = NarrowbandDetector::new(ChannelId::Ch4, g4.center(0), g4.spacing())?;
    let hist = coincidence_histogram(&run, &det1, &det4, &sweep)?;

    let p1 = run.position(ChannelId::Ch1).expect("photon 1 sampled");
    let p4 = run.position(ChannelId::Ch4).expect("photon 4 sampled");
    let line = result
        .branches
        .iter()
        .find(|b| b.state == *state)
        .map(|b| b.pair_sum)
        .expect("post state is one of the branches");
    let off_line = run
        .events
        .iter()
        .filter(|e| g1.center(e[p1]) + g4.center(e[p4]) != line)
        .count() as u64;

    let supported = expected.iter().filter(|&&e| e > 0.0).count();
    let summary = SampleSummary {
        swap,
        trials,
        seed,
        rng: freqswap::montecarlo::RNG_ALGORITHM.into(),
        off_line_events: off_line,
        chi_square: chi_square(&hist.counts(), &expected),
        chi_square_dof: supported.saturating_sub(1),
    };
    Ok((summary, report::histogram_table(&hist, &expected)))
}
