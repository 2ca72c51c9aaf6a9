//! Per-series aggregation of run records and the plain-text summary table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::series::{Param, SeriesName};
use super::sweep::RunRecord;

/// Aggregates for one (series, parameter value) group. Means and medians cover solved runs.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub series: String,
    pub param: &'static str,
    pub value: u64,
    pub runs: usize,
    pub solved: usize,
    pub solve_rate: f64,
    pub mean_cells: f64,
    pub median_cells: f64,
    pub mean_time_ms: f64,
    pub median_time_ms: f64,
    pub mean_length: f64,
    pub median_length: f64,
    /// `mean_cells` over the smallest `mean_cells` in the series.
    pub cells_ratio: f64,
    pub time_ratio: f64,
    pub length_ratio: f64,
}

fn varying_param(series: &str) -> Param {
    series
        .parse::<SeriesName>()
        .map(SeriesName::varying)
        .unwrap_or(Param::Delta)
}

fn value_of(param: Param, r: &RunRecord) -> u64 {
    match param {
        Param::Delta => r.delta,
        Param::K => r.k_succ as u64,
        Param::M => r.m_budget,
    }
}

/// Mean and median of a sample, summed in sorted order so the result is independent of
/// input order. Empty samples give NaN.
fn mean_median(mut xs: Vec<f64>) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    xs.sort_by(f64::total_cmp);
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let mid = xs.len() / 2;
    let median = if xs.len().is_multiple_of(2) {
        (xs[mid - 1] + xs[mid]) / 2.0
    } else {
        xs[mid]
    };
    (mean, median)
}

fn series_rank(name: &str) -> (usize, String) {
    match name.parse::<SeriesName>() {
        Ok(n) => (n as usize, String::new()),
        Err(_) => (SeriesName::ALL.len(), name.to_owned()),
    }
}

/// Groups records by (series, varying-parameter value). Rows are ordered by series
/// (m, K, Δ, then others by name) and ascending value.
pub fn aggregate(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<((usize, String), u64), Vec<&RunRecord>> = BTreeMap::new();
    let mut names: BTreeMap<(usize, String), &str> = BTreeMap::new();
    for r in records {
        let rank = series_rank(&r.series);
        names.entry(rank.clone()).or_insert(&r.series);
        let value = value_of(varying_param(&r.series), r);
        groups.entry((rank, value)).or_default().push(r);
    }

    let mut rows: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((rank, value), group)| {
            let series = names[&rank];
            let solved: Vec<&&RunRecord> = group.iter().filter(|r| r.solved).collect();
            let (mean_cells, median_cells) =
                mean_median(solved.iter().map(|r| r.cells as f64).collect());
            let (mean_time_ms, median_time_ms) =
                mean_median(solved.iter().map(|r| r.time_ms).collect());
            let (mean_length, median_length) =
                mean_median(solved.iter().map(|r| r.length as f64).collect());
            SummaryRow {
                series: series.to_owned(),
                param: varying_param(series).as_str(),
                value,
                runs: group.len(),
                solved: solved.len(),
                solve_rate: solved.len() as f64 / group.len() as f64,
                mean_cells,
                median_cells,
                mean_time_ms,
                median_time_ms,
                mean_length,
                median_length,
                cells_ratio: f64::NAN,
                time_ratio: f64::NAN,
                length_ratio: f64::NAN,
            }
        })
        .collect();

    let mut start = 0;
    while start < rows.len() {
        let end = start
            + rows[start..]
                .iter()
                .take_while(|r| r.series == rows[start].series)
                .count();
        let best = |f: fn(&SummaryRow) -> f64| {
            rows[start..end]
                .iter()
                .map(f)
                .filter(|v| !v.is_nan())
                .fold(f64::INFINITY, f64::min)
        };
        let (bc, bt, bl) = (
            best(|r| r.mean_cells),
            best(|r| r.mean_time_ms),
            best(|r| r.mean_length),
        );
        for r in &mut rows[start..end] {
            r.cells_ratio = r.mean_cells / bc;
            r.time_ratio = r.mean_time_ms / bt;
            r.length_ratio = r.mean_length / bl;
        }
        start = end;
    }
    rows
}

/// Rows belonging to one series.
pub fn series_rows<'a>(rows: &'a [SummaryRow], series: &str) -> Vec<&'a SummaryRow> {
    rows.iter().filter(|r| r.series == series).collect()
}

/// Largest over smallest of a column within a set of rows.
pub fn spread(rows: &[&SummaryRow], column: fn(&SummaryRow) -> f64) -> f64 {
    let values: Vec<f64> = rows
        .iter()
        .map(|r| column(r))
        .filter(|v| !v.is_nan())
        .collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Fixed-width summary table.
pub fn format_table(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<13} {:<9} {:>6} {:>5} {:>7} {:>11} {:>11} {:>10} {:>10} {:>10} {:>10} {:>7} {:>7} {:>7}",
        "series",
        "param",
        "value",
        "runs",
        "solved",
        "mean_cells",
        "med_cells",
        "mean_ms",
        "med_ms",
        "mean_len",
        "med_len",
        "cells_x",
        "time_x",
        "len_x"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<13} {:<9} {:>6} {:>5} {:>6.1}% {:>11.1} {:>11.1} {:>10.3} {:>10.3} {:>10.1} {:>10.1} {:>7.3} {:>7.3} {:>7.3}",
            r.series,
            r.param,
            r.value,
            r.runs,
            100.0 * r.solve_rate,
            r.mean_cells,
            r.median_cells,
            r.mean_time_ms,
            r.median_time_ms,
            r.mean_length,
            r.median_length,
            r.cells_ratio,
            r.time_ratio,
            r.length_ratio
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn rec(series: &str, delta: u64, k: u32, m: u64, length: u64, time_ms: f64) -> RunRecord {
        RunRecord {
            map_id: "m".into(),
            family: "rects".into(),
            seed: 0,
            algo: "rstar".into(),
            delta,
            k_succ: k,
            m_budget: m,
            w: 3.0,
            solved: true,
            length,
            cells: length / 2,
            time_ms,
            sparse_states: 1,
            local_searches: 1,
            failed_local: 0,
            series: series.into(),
        }
    }

    #[test]
    fn single_record() {
        let rows = aggregate(&[rec("k_series", 200, 10, 40, 2400, 1.5)]);
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!((r.param, r.value, r.runs, r.solved), ("k_succ", 10, 1, 1));
        assert_eq!(r.mean_length, 2400.0);
        assert_eq!(r.median_length, 2400.0);
        assert_eq!(r.mean_time_ms, 1.5);
        assert_eq!(r.time_ratio, 1.0);
    }

    #[test]
    fn two_record_mean() {
        let rows = aggregate(&[
            rec("m_series", 200, 20, 40, 100, 1.0),
            rec("m_series", 200, 20, 40, 200, 3.0),
        ]);
        assert_eq!(rows[0].mean_length, 150.0);
        assert_eq!(rows[0].median_time_ms, 2.0);
    }

    #[test]
    fn groups_ratios_and_unsolved_runs() {
        let mut unsolved = rec("m_series", 200, 20, 80, 0, 9.0);
        unsolved.solved = false;
        let rows = aggregate(&[
            rec("m_series", 200, 20, 40, 2000, 1.0),
            rec("m_series", 200, 20, 80, 2200, 4.0),
            unsolved,
            rec("delta_series", 100, 5, 20, 2100, 2.0),
        ]);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].series, "m_series");
        let m80 = &rows[1];
        assert_eq!((m80.value, m80.runs, m80.solved), (80, 2, 1));
        assert_eq!(m80.solve_rate, 0.5);
        assert_eq!(m80.time_ratio, 4.0);
        assert!((m80.length_ratio - 1.1).abs() < 1e-12);
        assert_eq!(rows[2].param, "delta");
        let m = series_rows(&rows, "m_series");
        assert_eq!(spread(&m, |r| r.mean_time_ms), 4.0);
    }

    #[test]
    fn aggregation_is_order_independent() {
        let mut records = Vec::new();
        for i in 0..60u64 {
            let series = ["m_series", "k_series", "delta_series"][(i % 3) as usize];
            records.push(rec(
                series,
                200 + 100 * (i % 2),
                10 + (i % 4) as u32,
                40 + 20 * (i % 5),
                2000 + 37 * i,
                0.1 * (i as f64).sqrt() + 1e-3 * i as f64,
            ));
        }
        let base = aggregate(&records);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            records.shuffle(&mut rng);
            assert_eq!(format!("{:?}", aggregate(&records)), format!("{base:?}"));
        }
        assert!(format_table(&base).lines().count() == base.len() + 1);
    }
}
