//! Map corpora and their manifest files.
//!
//! A manifest has one record per map:
//! `<map_id> <family> <seed> <rows> <cols> <blocked_fraction> <s_i> <s_j> <g_i> <g_j> <file>`,
//! with `file` relative to the manifest's directory.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{load_map, octile_dist, save_map, Cell, Grid, MapParseError, C_HV};
use crate::mapgen::{generate, place_task, GenConfig, GenError, PlacementError, TaskSpec};

use super::seed::SeedHasher;

pub const MANIFEST_FILE: &str = "manifest.txt";
const PLACEMENT_ATTEMPTS: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Rects,
    Tetris,
    /// Externally supplied maps.
    City,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Rects => "rects",
            Family::Tetris => "tetris",
            Family::City => "city",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rects" => Ok(Family::Rects),
            "tetris" => Ok(Family::Tetris),
            "city" => Ok(Family::City),
            _ => Err(format!("unknown map family `{s}`")),
        }
    }
}

/// One manifest record.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub map_id: String,
    pub family: Family,
    pub seed: u64,
    pub rows: u32,
    pub cols: u32,
    pub blocked_fraction: f64,
    pub task: TaskSpec,
    pub file: PathBuf,
}

impl CorpusEntry {
    pub fn to_record(&self) -> String {
        format!(
            "{} {} {} {} {} {:.6} {} {} {} {} {}",
            self.map_id,
            self.family,
            self.seed,
            self.rows,
            self.cols,
            self.blocked_fraction,
            self.task.s.i,
            self.task.s.j,
            self.task.g.i,
            self.task.g.j,
            self.file.display()
        )
    }
}

/// A manifest entry with its grid in memory.
#[derive(Clone, Debug)]
pub struct MapTask {
    pub entry: CorpusEntry,
    pub grid: Arc<Grid>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}:{line}: {message}")]
    Manifest {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Map {
        path: PathBuf,
        source: MapParseError,
    },
    #[error("{path}: map is {got_rows}x{got_cols}, manifest says {rows}x{cols}")]
    DimensionMismatch {
        path: PathBuf,
        rows: u32,
        cols: u32,
        got_rows: u32,
        got_cols: u32,
    },
    #[error("{map_id}: start or goal is not traversable")]
    BadTask { map_id: String },
    #[error("map generation failed: {0}")]
    Generate(#[from] GenError),
    #[error("{family} map {index}: no solvable start/goal placement after {attempts} regenerations ({last})")]
    Placement {
        family: Family,
        index: usize,
        attempts: u64,
        last: PlacementError,
    },
    #[error("family {0} cannot be generated; supply its maps through a manifest")]
    NotGenerated(Family),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Parameters for generating one family of maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorpusSpec {
    pub family: Family,
    pub rows: u32,
    pub cols: u32,
    pub threshold: f64,
    pub count: usize,
    pub seed: u64,
}

impl CorpusSpec {
    /// 201x201 maps at 30% blocked, tasks 2000 units apart.
    pub fn desk(family: Family, count: usize, seed: u64) -> Self {
        CorpusSpec {
            family,
            rows: 201,
            cols: 201,
            threshold: 0.30,
            count,
            seed,
        }
    }
}

/// Generates `count` maps, each with a solvable left-to-right task spanning the grid.
/// A map without a solvable placement is regenerated from a fresh derived seed.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<MapTask>, CorpusError> {
    let target = C_HV * (spec.cols as u64).saturating_sub(1);
    let mut out = Vec::with_capacity(spec.count);
    for index in 0..spec.count {
        let mut last = PlacementError::NoSolvablePlacement;
        let mut placed = None;
        for attempt in 0..PLACEMENT_ATTEMPTS {
            let seed = SeedHasher::new(spec.seed)
                .str("map")
                .str(spec.family.as_str())
                .u64(index as u64)
                .u64(attempt)
                .finish();
            let config = match spec.family {
                Family::Rects => GenConfig::rects(spec.rows, spec.cols, spec.threshold, seed),
                Family::Tetris => {
                    GenConfig::tetrominoes(spec.rows, spec.cols, spec.threshold, seed)
                }
                Family::City => return Err(CorpusError::NotGenerated(Family::City)),
            };
            let grid = generate(&config)?.grid;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7461_736b);
            match place_task(&grid, target, &mut rng) {
                Ok(task) => {
                    placed = Some((seed, grid, task));
                    break;
                }
                Err(e) => last = e,
            }
        }
        let Some((seed, grid, task)) = placed else {
            return Err(CorpusError::Placement {
                family: spec.family,
                index,
                attempts: PLACEMENT_ATTEMPTS,
                last,
            });
        };
        let map_id = format!("{}-{index:03}", spec.family);
        out.push(MapTask {
            entry: CorpusEntry {
                file: PathBuf::from(format!("{map_id}.map")),
                map_id,
                family: spec.family,
                seed,
                rows: grid.rows(),
                cols: grid.cols(),
                blocked_fraction: grid.blocked_fraction(),
                task,
            },
            grid: Arc::new(grid),
        });
    }
    Ok(out)
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every map file and a manifest into `dir`; returns the manifest path.
///
/// Records are appended to an existing manifest, so several families can share a directory.
pub fn write_corpus(tasks: &[MapTask], dir: &Path) -> Result<PathBuf, CorpusError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let manifest = dir.join(MANIFEST_FILE);
    let mut existing = match fs::read_to_string(&manifest) {
        Ok(text) => text,
        Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(io_err(&manifest)(e)),
    };
    let mut kept: Vec<String> = existing
        .lines()
        .filter(|l| {
            let id = l.split_whitespace().next();
            !tasks.iter().any(|t| Some(t.entry.map_id.as_str()) == id)
        })
        .map(str::to_owned)
        .collect();
    for t in tasks {
        let path = dir.join(&t.entry.file);
        fs::write(&path, save_map(&t.grid)).map_err(io_err(&path))?;
        kept.push(t.entry.to_record());
    }
    existing.clear();
    for line in kept {
        existing.push_str(&line);
        existing.push('\n');
    }
    fs::write(&manifest, existing).map_err(io_err(&manifest))?;
    Ok(manifest)
}

/// Parses manifest text. Blank lines and `#` comments are skipped.
pub fn parse_manifest(text: &str, path: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| CorpusError::Manifest {
            path: path.to_path_buf(),
            line: n + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 11 {
            return Err(bad(format!("expected 11 fields, found {}", fields.len())));
        }
        fn num<T: FromStr>(s: &str, what: &str) -> Result<T, String> {
            s.parse().map_err(|_| format!("invalid {what} `{s}`"))
        }
        let parsed = (|| -> Result<CorpusEntry, String> {
            let s = Cell::new(num(fields[6], "s_i")?, num(fields[7], "s_j")?);
            let g = Cell::new(num(fields[8], "g_i")?, num(fields[9], "g_j")?);
            Ok(CorpusEntry {
                map_id: fields[0].to_string(),
                family: fields[1].parse()?,
                seed: num(fields[2], "seed")?,
                rows: num(fields[3], "rows")?,
                cols: num(fields[4], "cols")?,
                blocked_fraction: num(fields[5], "blocked_fraction")?,
                task: TaskSpec {
                    s,
                    g,
                    target_dist: octile_dist(s, g),
                },
                file: PathBuf::from(fields[10]),
            })
        })();
        out.push(parsed.map_err(bad)?);
    }
    Ok(out)
}

/// Loads a manifest and every map it lists.
pub fn load_corpus(manifest: &Path) -> Result<Vec<MapTask>, CorpusError> {
    let text = fs::read_to_string(manifest).map_err(io_err(manifest))?;
    let entries = parse_manifest(&text, manifest)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    entries
        .into_iter()
        .map(|entry| {
            let path = base.join(&entry.file);
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            let grid = load_map(&text).map_err(|source| CorpusError::Map {
                path: path.clone(),
                source,
            })?;
            if (grid.rows(), grid.cols()) != (entry.rows, entry.cols) {
                return Err(CorpusError::DimensionMismatch {
                    path,
                    rows: entry.rows,
                    cols: entry.cols,
                    got_rows: grid.rows(),
                    got_cols: grid.cols(),
                });
            }
            if grid.is_blocked(entry.task.s) || grid.is_blocked(entry.task.g) {
                return Err(CorpusError::BadTask {
                    map_id: entry.map_id,
                });
            }
            Ok(MapTask {
                entry,
                grid: Arc::new(grid),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classic::reachable;

    #[test]
    fn generated_corpus_is_solvable_and_deterministic() {
        let spec = CorpusSpec {
            family: Family::Tetris,
            rows: 41,
            cols: 41,
            threshold: 0.3,
            count: 4,
            seed: 17,
        };
        let a = generate_corpus(&spec).unwrap();
        let b = generate_corpus(&spec).unwrap();
        assert_eq!(a.len(), 4);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.entry, y.entry);
            assert_eq!(x.grid, y.grid);
            let t = x.entry.task;
            assert_eq!(t.target_dist, 400);
            assert!(reachable(&x.grid, t.s, t.g));
        }
        assert_eq!(a[2].entry.map_id, "tetris-002");
    }

    #[test]
    fn city_family_is_not_generated() {
        let spec = CorpusSpec::desk(Family::City, 1, 0);
        assert!(matches!(
            generate_corpus(&spec),
            Err(CorpusError::NotGenerated(Family::City))
        ));
    }

    #[test]
    fn manifest_errors_name_the_line() {
        let text = "# corpus\n\nm1 rects 1 10 10 0.3 0 0 0 9 m1.map\nm2 rects x 10 10 0.3 0 0 0 9 m2.map\n";
        let err = parse_manifest(text, Path::new("man.txt")).unwrap_err();
        assert!(
            err.to_string().starts_with("man.txt:4: invalid seed"),
            "{err}"
        );
        let err = parse_manifest("a b c\n", Path::new("m")).unwrap_err();
        assert!(err.to_string().contains("expected 11 fields"));
    }

    #[test]
    fn write_and_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rects = generate_corpus(&CorpusSpec {
            family: Family::Rects,
            rows: 30,
            cols: 30,
            threshold: 0.25,
            count: 2,
            seed: 3,
        })
        .unwrap();
        let tetris = generate_corpus(&CorpusSpec {
            family: Family::Tetris,
            rows: 30,
            cols: 30,
            threshold: 0.25,
            count: 2,
            seed: 3,
        })
        .unwrap();
        write_corpus(&rects, dir.path()).unwrap();
        let manifest = write_corpus(&tetris, dir.path()).unwrap();
        // rewriting a family replaces its records instead of duplicating them
        write_corpus(&rects, dir.path()).unwrap();

        let loaded = load_corpus(&manifest).unwrap();
        assert_eq!(loaded.len(), 4);
        for t in rects.iter().chain(&tetris) {
            let l = loaded
                .iter()
                .find(|l| l.entry.map_id == t.entry.map_id)
                .unwrap();
            assert_eq!(l.grid, t.grid);
            assert_eq!(l.entry.task, t.entry.task);
            assert!((l.entry.blocked_fraction - t.entry.blocked_fraction).abs() < 1e-6);
        }
    }
}
