//! Seeded replicate batches and theory-versus-simulation tables.
//!
//! Replicate `i` of grid row `r` runs with a seed derived from
//! `(master_seed, r, i)` alone, so results do not depend on scheduling or
//! on the number of worker threads. Results are collected in replicate
//! order before any aggregation.

use std::io::Write;

use rayon::prelude::*;

use crate::engine::{self, EAConfig, RunResult, TieRule};
use crate::error::{Error, Result};
use crate::problem::{InitPolicy, RoyalRoadLayout};
use crate::theory::{theory_report, ModelParams, TheoryReport};

/// Header of the summary CSV.
pub const SUMMARY_HEADER: [&str; 14] = [
    "n",
    "K",
    "M",
    "mu",
    "lambda",
    "exact",
    "approx",
    "asymptotic_scale",
    "empirical_mean",
    "empirical_std",
    "ci95",
    "hits",
    "runs",
    "master_seed",
];

/// Header of the per-replicate CSV.
pub const RAW_HEADER: [&str; 4] = ["row_index", "replicate", "seed", "hit_generation"];

/// z-value of the two-sided 95% normal interval.
const Z95: f64 = 1.96;

/// One grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridRow {
    pub layout: RoyalRoadLayout,
    pub mu: usize,
    pub lambda: usize,
}

impl GridRow {
    pub fn new(layout: RoyalRoadLayout, mu: usize, lambda: usize) -> Result<Self> {
        engine::validate_sizes(mu, lambda)?;
        Ok(Self { layout, mu, lambda })
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.layout, self.mu, self.lambda)
    }
}

/// What a replicate that never hits contributes to the empirical mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MissPolicy {
    /// Misses are left out; statistics condition on hitting.
    #[default]
    Exclude,
    /// Misses count as the full generation budget.
    CountAsBudget,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub rows: Vec<GridRow>,
    pub runs_per_row: usize,
    pub max_generations: usize,
    pub master_seed: u64,
    pub init_policy: InitPolicy,
    pub tie_rule: TieRule,
    pub miss_policy: MissPolicy,
    /// Worker thread cap; `None` uses the available parallelism.
    pub workers: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(
        rows: Vec<GridRow>,
        runs_per_row: usize,
        max_generations: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            rows,
            runs_per_row,
            max_generations,
            master_seed,
            init_policy: InitPolicy::default(),
            tie_rule: TieRule::default(),
            miss_policy: MissPolicy::default(),
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs_per_row == 0 {
            return Err(Error::invalid("runs must be at least 1"));
        }
        if self.max_generations == 0 {
            return Err(Error::invalid("max_generations must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers must be at least 1"));
        }
        for row in &self.rows {
            engine::validate_sizes(row.mu, row.lambda)?;
        }
        Ok(())
    }

    fn config_for(&self, row: &GridRow, seed: u64) -> EAConfig {
        EAConfig {
            mu: row.mu,
            lambda: row.lambda,
            max_generations: self.max_generations,
            init_policy: self.init_policy,
            tie_rule: self.tie_rule,
            seed,
        }
    }

    /// Runs every replicate of every row, in a thread pool capped at
    /// `workers`. Results are ordered by row, then replicate.
    pub fn run_all(&self) -> Result<Vec<Vec<RunResult>>> {
        self.validate()?;
        self.with_pool(|| {
            self.rows
                .iter()
                .enumerate()
                .map(|(r, row)| self.run_row(r, row))
                .collect::<Result<Vec<_>>>()
        })?
    }

    /// Replicates of one row.
    pub fn run_row(&self, row_index: usize, row: &GridRow) -> Result<Vec<RunResult>> {
        (0..self.runs_per_row)
            .into_par_iter()
            .map(|i| {
                let seed = child_seed(self.master_seed, row_index, i);
                engine::run(&self.config_for(row, seed), &row.layout)
            })
            .collect()
    }

    /// Runs the grid and summarizes each row against its theory values.
    pub fn summarize_all(&self) -> Result<Vec<SummaryRow>> {
        let results = self.run_all()?;
        self.rows
            .iter()
            .zip(&results)
            .map(|(row, runs)| {
                let theory = theory_report(&row.params()?)?;
                summarize(runs, &theory, row, self)
            })
            .collect()
    }

    fn with_pool<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(job()),
            Some(threads) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
                Ok(pool.install(job))
            }
        }
    }
}

/// Seed of replicate `replicate` of row `row_index`.
///
/// SplitMix64 finalizer applied to a counter built from the master seed and
/// the two indices.
pub fn child_seed(master_seed: u64, row_index: usize, replicate: usize) -> u64 {
    let mut z = master_seed
        .wrapping_add((row_index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add((replicate as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Replicates of a single row with the default engine settings.
pub fn run_replicates(
    row: &GridRow,
    row_index: usize,
    runs: usize,
    max_generations: usize,
    master_seed: u64,
) -> Result<Vec<RunResult>> {
    let spec = ExperimentSpec::new(vec![*row], runs, max_generations, master_seed);
    spec.validate()?;
    spec.run_row(row_index, row)
}

/// Empirical statistics of the first hitting time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Empirical {
    pub mean: f64,
    pub std: f64,
    pub ci95_half_width: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub row: GridRow,
    pub theory: TheoryReport,
    /// `None` when no replicate contributed (zero hits under `Exclude`).
    pub empirical: Option<Empirical>,
    /// Mean with misses counted as the budget, reported alongside whichever
    /// policy produced `empirical`.
    pub mean_with_misses_at_budget: f64,
    pub hits: usize,
    pub runs: usize,
    pub master_seed: u64,
    pub miss_policy: MissPolicy,
}

impl SummaryRow {
    /// True when the row has no empirical statistics.
    pub fn flagged(&self) -> bool {
        self.empirical.is_none()
    }
}

/// Mean, unbiased standard deviation and normal 95% half-width.
///
/// Computed from exact integer sums, so the result does not depend on the
/// order of the samples.
pub fn hitting_statistics(samples: &[u64]) -> Option<Empirical> {
    if samples.is_empty() {
        return None;
    }
    let count = samples.len() as u128;
    let sum: u128 = samples.iter().map(|&x| x as u128).sum();
    let sum_sq: u128 = samples.iter().map(|&x| (x as u128) * (x as u128)).sum();
    let mean = sum as f64 / count as f64;
    let std = if count > 1 {
        // n Σx² - (Σx)² = n(n-1) s²
        let spread = count * sum_sq - sum * sum;
        (spread as f64 / (count * (count - 1)) as f64).sqrt()
    } else {
        0.0
    };
    Some(Empirical {
        mean,
        std,
        ci95_half_width: Z95 * std / (count as f64).sqrt(),
    })
}

/// Aggregates replicate results of one row.
pub fn summarize(
    results: &[RunResult],
    theory: &TheoryReport,
    row: &GridRow,
    spec: &ExperimentSpec,
) -> Result<SummaryRow> {
    if results.is_empty() {
        return Err(Error::invalid("cannot summarize an empty result set"));
    }
    let budget = spec.max_generations as u64;
    let hit_times: Vec<u64> = results
        .iter()
        .filter_map(|r| r.hit_generation.map(|t| t as u64))
        .collect();
    let censored: Vec<u64> = results
        .iter()
        .map(|r| r.hit_generation.map_or(budget, |t| t as u64))
        .collect();
    let empirical = match spec.miss_policy {
        MissPolicy::Exclude => hitting_statistics(&hit_times),
        MissPolicy::CountAsBudget => hitting_statistics(&censored),
    };
    let mean_with_misses_at_budget = hitting_statistics(&censored).map_or(f64::NAN, |e| e.mean);
    Ok(SummaryRow {
        row: *row,
        theory: *theory,
        empirical,
        mean_with_misses_at_budget,
        hits: hit_times.len(),
        runs: results.len(),
        master_seed: spec.master_seed,
        miss_policy: spec.miss_policy,
    })
}

/// Grid of the published comparison: n ∈ {32, 64, 128} with M = 8, and
/// μ = λ ∈ {4, 10, 20, 30}, in that order.
pub fn table2_rows() -> Vec<GridRow> {
    let mut rows = Vec::with_capacity(12);
    for n in [32, 64, 128] {
        let layout = RoyalRoadLayout::new(n / 8, 8).expect("valid grid layout");
        for mu in [4, 10, 20, 30] {
            rows.push(GridRow {
                layout,
                mu,
                lambda: mu,
            });
        }
    }
    rows
}

/// Default replicate count of the comparison table.
pub const TABLE2_DEFAULT_RUNS: usize = 400;
/// Generation budget of every comparison run.
pub const TABLE2_GENERATIONS: usize = 2000;

pub fn table2_spec(runs_per_row: usize, master_seed: u64) -> ExperimentSpec {
    ExperimentSpec::new(table2_rows(), runs_per_row, TABLE2_GENERATIONS, master_seed)
}

/// Runs the comparison grid and returns one summary per row, in grid order.
pub fn table2_experiment(spec: &ExperimentSpec) -> Result<Vec<SummaryRow>> {
    spec.summarize_all()
}

/// Formats `x` with six significant digits in plain decimal notation.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 {
            "0".to_owned()
        } else {
            x.to_string()
        };
    }
    // Round first so that e.g. 999999.7 picks the right exponent.
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    let magnitude = rounded.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{rounded:.decimals$}")
}

fn opt_sig6(x: Option<f64>) -> String {
    x.map(format_sig6).unwrap_or_default()
}

/// Writes the summary table: header plus one line per row.
pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for s in rows {
        let layout = &s.row.layout;
        let e = s.empirical;
        w.write_record([
            layout.n().to_string(),
            layout.bins().to_string(),
            layout.bin_size().to_string(),
            s.row.mu.to_string(),
            s.row.lambda.to_string(),
            format_sig6(s.theory.exact),
            opt_sig6(s.theory.approx),
            format_sig6(s.theory.asymptotic_scale),
            opt_sig6(e.map(|e| e.mean)),
            opt_sig6(e.map(|e| e.std)),
            opt_sig6(e.map(|e| e.ci95_half_width)),
            s.hits.to_string(),
            s.runs.to_string(),
            s.master_seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes per-replicate hitting times; rows follow `results` order.
pub fn write_raw_csv<W: Write>(
    spec: &ExperimentSpec,
    results: &[Vec<RunResult>],
    out: W,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(RAW_HEADER)?;
    for (r, runs) in results.iter().enumerate() {
        for (i, run) in runs.iter().enumerate() {
            w.write_record([
                r.to_string(),
                i.to_string(),
                child_seed(spec.master_seed, r, i).to_string(),
                run.hit_generation
                    .map(|t| t.to_string())
                    .unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
