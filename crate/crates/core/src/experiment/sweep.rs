//! Sweep execution and the CSV record format.

use std::io;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classic::Outcome;
use crate::rstar::{rstar_plan, validate_params, ParamViolation, RStarParams};

use super::corpus::MapTask;
use super::seed::run_seed;
use super::series::SweepSeries;

/// One CSV row: one R* run on one map with one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub map_id: String,
    pub family: String,
    pub seed: u64,
    pub algo: String,
    pub delta: u64,
    pub k_succ: u32,
    pub m_budget: u64,
    pub w: f64,
    pub solved: bool,
    pub length: u64,
    pub cells: u64,
    pub time_ms: f64,
    pub sparse_states: u64,
    pub local_searches: u64,
    pub failed_local: u64,
    pub series: String,
}

/// CSV column order.
pub const CSV_COLUMNS: [&str; 16] = [
    "map_id",
    "family",
    "seed",
    "algo",
    "delta",
    "k_succ",
    "m_budget",
    "w",
    "solved",
    "length",
    "cells",
    "time_ms",
    "sparse_states",
    "local_searches",
    "failed_local",
    "series",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepOptions {
    pub repetitions: usize,
    pub base_seed: u64,
    /// Worker threads; `1` runs sequentially, `0` uses every available core.
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            repetitions: 3,
            base_seed: 0,
            workers: 0,
        }
    }
}

/// A configuration left out of a sweep because it breaks a parameter bound.
#[derive(Clone, Debug, PartialEq)]
pub struct SkippedConfig {
    pub series: String,
    pub config_index: usize,
    pub params: RStarParams,
    pub violations: Vec<ParamViolation>,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOutput {
    /// Canonical order: map, then configuration, then repetition.
    pub records: Vec<RunRecord>,
    pub skipped: Vec<SkippedConfig>,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{map_id}: {message}")]
    Run { map_id: String, message: String },
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv header mismatch: expected {expected}, found {found}")]
    Header { expected: String, found: String },
}

struct Job<'a> {
    map: &'a MapTask,
    series: &'a str,
    config_index: usize,
    params: RStarParams,
    repetition: usize,
}

fn run_job(job: &Job<'_>, base_seed: u64) -> Result<RunRecord, SweepError> {
    let entry = &job.map.entry;
    let seed = run_seed(base_seed, &entry.map_id, job.config_index, job.repetition);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result = rstar_plan(
        &job.map.grid,
        entry.task.s,
        entry.task.g,
        &job.params,
        &mut rng,
    )
    .map_err(|e| SweepError::Run {
        map_id: entry.map_id.clone(),
        message: e.to_string(),
    })?;
    let st = result.stats;
    Ok(RunRecord {
        map_id: entry.map_id.clone(),
        family: entry.family.to_string(),
        seed,
        algo: "rstar".into(),
        delta: job.params.delta,
        k_succ: job.params.k_succ,
        m_budget: job.params.m_budget,
        w: job.params.w.as_f64(),
        solved: result.outcome == Outcome::Found,
        length: st.length,
        cells: st.cells,
        time_ms: st.wall_time_ms,
        sparse_states: st.sparse_states,
        local_searches: st.local_searches,
        failed_local: st.failed_local,
        series: job.series.into(),
    })
}

#[cfg(feature = "parallel")]
fn execute(jobs: &[Job<'_>], opts: &SweepOptions) -> Result<Vec<RunRecord>, SweepError> {
    use rayon::prelude::*;

    if opts.workers == 1 {
        return jobs.iter().map(|j| run_job(j, opts.base_seed)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| SweepError::Pool(e.to_string()))?;
    // indexed collect keeps canonical order
    pool.install(|| {
        jobs.par_iter()
            .map(|j| run_job(j, opts.base_seed))
            .collect()
    })
}

#[cfg(not(feature = "parallel"))]
fn execute(jobs: &[Job<'_>], opts: &SweepOptions) -> Result<Vec<RunRecord>, SweepError> {
    jobs.iter().map(|j| run_job(j, opts.base_seed)).collect()
}

/// Runs every (map, configuration, repetition) triple.
///
/// Configurations are indexed globally across `series` in order; that index, the map id
/// and the repetition determine each run's seed. Unsolved runs are recorded with
/// `solved = false`; configurations that break a bound are reported in `skipped`.
pub fn run_sweep(
    corpus: &[MapTask],
    series: &[SweepSeries],
    opts: &SweepOptions,
) -> Result<SweepOutput, SweepError> {
    let mut configs = Vec::new();
    let mut skipped = Vec::new();
    for s in series {
        for &params in &s.configs {
            let config_index = configs.len() + skipped.len();
            match validate_params(&params) {
                Ok(()) => configs.push((s.name.as_str(), config_index, params)),
                Err(violations) => skipped.push(SkippedConfig {
                    series: s.name.to_string(),
                    config_index,
                    params,
                    violations,
                }),
            }
        }
    }

    let mut jobs = Vec::with_capacity(corpus.len() * configs.len() * opts.repetitions);
    for map in corpus {
        for &(series, config_index, params) in &configs {
            for repetition in 0..opts.repetitions {
                jobs.push(Job {
                    map,
                    series,
                    config_index,
                    params,
                    repetition,
                });
            }
        }
    }
    Ok(SweepOutput {
        records: execute(&jobs, opts)?,
        skipped,
    })
}

/// Writes records as CSV with a header row and `\n` line endings.
pub fn write_csv<W: io::Write>(records: &[RunRecord], out: W) -> Result<(), SweepError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn to_csv_string(records: &[RunRecord]) -> Result<String, SweepError> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Reads records written by [`write_csv`], checking the header.
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<RunRecord>, SweepError> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_COLUMNS {
        return Err(SweepError::Header {
            expected: CSV_COLUMNS.join(","),
            found: header.join(","),
        });
    }
    r.deserialize()
        .map(|row| row.map_err(SweepError::from))
        .collect()
}
