//! Experiment harness: map corpora, the three parameter sweep series, sweep execution,
//! CSV records and summary reports.

pub mod corpus;
pub mod report;
pub mod seed;
pub mod series;
pub mod sweep;

pub use corpus::{
    generate_corpus, load_corpus, parse_manifest, write_corpus, CorpusEntry, CorpusError,
    CorpusSpec, Family, MapTask, MANIFEST_FILE,
};
pub use report::{aggregate, format_table, series_rows, spread, SummaryRow};
pub use seed::{run_seed, SeedHasher};
pub use series::{
    config_count, default_series, default_series_scaled, Param, SeriesError, SeriesName,
    SweepSeries,
};
pub use sweep::{
    read_csv, run_sweep, to_csv_string, write_csv, RunRecord, SkippedConfig, SweepError,
    SweepOptions, SweepOutput, CSV_COLUMNS,
};
