//! Procedural test maps: random rectangles or scaled tetrominoes dropped one at a time
//! until a blocked-cell threshold is reached, plus opposite-edge task placement.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::{octile_dist, Cell, Cost, Grid, C_HV};

/// Reference grid side for which the default obstacle sizes were chosen.
pub const REFERENCE_SIDE: u32 = 501;
const RECT_SIDE_AT_REFERENCE: u32 = 30;
const TETROMINO_SCALE_AT_REFERENCE: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObstacleSpec {
    Rectangle {
        w_min: u32,
        w_max: u32,
        h_min: u32,
        h_max: u32,
    },
    Tetromino {
        scale_min: u32,
        scale_max: u32,
    },
}

impl ObstacleSpec {
    /// Default rectangle sizes: 1..30 cells per side at 501x501, scaled with the grid.
    pub fn default_rects(rows: u32, cols: u32) -> Self {
        let side = scaled(RECT_SIDE_AT_REFERENCE, rows.min(cols));
        ObstacleSpec::Rectangle {
            w_min: 1,
            w_max: side,
            h_min: 1,
            h_max: side,
        }
    }

    /// Default tetromino scales: 1..8 at 501x501, scaled with the grid.
    pub fn default_tetrominoes(rows: u32, cols: u32) -> Self {
        ObstacleSpec::Tetromino {
            scale_min: 1,
            scale_max: scaled(TETROMINO_SCALE_AT_REFERENCE, rows.min(cols)),
        }
    }

    /// Largest number of cells one obstacle can cover.
    pub fn max_area(&self) -> u64 {
        match *self {
            ObstacleSpec::Rectangle { w_max, h_max, .. } => w_max as u64 * h_max as u64,
            ObstacleSpec::Tetromino { scale_max, .. } => 4 * scale_max as u64 * scale_max as u64,
        }
    }
}

fn scaled(at_reference: u32, side: u32) -> u32 {
    ((at_reference as u64 * side as u64 + REFERENCE_SIDE as u64 / 2) / REFERENCE_SIDE as u64).max(1)
        as u32
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenConfig {
    pub rows: u32,
    pub cols: u32,
    pub blocked_threshold: f64,
    pub obstacles: ObstacleSpec,
    pub seed: u64,
}

impl GenConfig {
    pub fn rects(rows: u32, cols: u32, blocked_threshold: f64, seed: u64) -> Self {
        GenConfig {
            rows,
            cols,
            blocked_threshold,
            obstacles: ObstacleSpec::default_rects(rows, cols),
            seed,
        }
    }

    pub fn tetrominoes(rows: u32, cols: u32, blocked_threshold: f64, seed: u64) -> Self {
        GenConfig {
            rows,
            cols,
            blocked_threshold,
            obstacles: ObstacleSpec::default_tetrominoes(rows, cols),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(GenError::InvalidConfig(format!(
                "grid dimensions must be positive (got {}x{})",
                self.rows, self.cols
            )));
        }
        if !(0.0..1.0).contains(&self.blocked_threshold) {
            return Err(GenError::InvalidConfig(format!(
                "blocked threshold must be in [0, 1) (got {})",
                self.blocked_threshold
            )));
        }
        let range_ok = |lo: u32, hi: u32| lo >= 1 && lo <= hi;
        let ok = match self.obstacles {
            ObstacleSpec::Rectangle {
                w_min,
                w_max,
                h_min,
                h_max,
            } => range_ok(w_min, w_max) && range_ok(h_min, h_max),
            ObstacleSpec::Tetromino {
                scale_min,
                scale_max,
            } => range_ok(scale_min, scale_max),
        };
        if !ok {
            return Err(GenError::InvalidConfig(format!(
                "obstacle size ranges must be nonempty and positive: {:?}",
                self.obstacles
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("blocked threshold {threshold} not reached after {attempts} placement attempts (blocked fraction {reached:.4})")]
    ThresholdUnreachable {
        threshold: f64,
        attempts: u64,
        reached: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TetrominoKind {
    I,
    O,
    T,
    S,
    Z,
    L,
    J,
}

impl TetrominoKind {
    pub const ALL: [TetrominoKind; 7] = [
        TetrominoKind::I,
        TetrominoKind::O,
        TetrominoKind::T,
        TetrominoKind::S,
        TetrominoKind::Z,
        TetrominoKind::L,
        TetrominoKind::J,
    ];

    /// Base cells as `(row, col)`.
    fn base(self) -> [(i32, i32); 4] {
        match self {
            TetrominoKind::I => [(0, 0), (0, 1), (0, 2), (0, 3)],
            TetrominoKind::O => [(0, 0), (0, 1), (1, 0), (1, 1)],
            TetrominoKind::T => [(0, 0), (0, 1), (0, 2), (1, 1)],
            TetrominoKind::S => [(0, 1), (0, 2), (1, 0), (1, 1)],
            TetrominoKind::Z => [(0, 0), (0, 1), (1, 1), (1, 2)],
            TetrominoKind::L => [(0, 0), (1, 0), (2, 0), (2, 1)],
            TetrominoKind::J => [(0, 1), (1, 1), (2, 1), (2, 0)],
        }
    }

    /// Cells after `quarter_turns` clockwise rotations, normalized to a zero origin.
    pub fn rotated(self, quarter_turns: u8) -> [(u32, u32); 4] {
        let mut cells = self.base();
        for _ in 0..quarter_turns % 4 {
            for c in &mut cells {
                *c = (c.1, -c.0);
            }
        }
        let min_r = cells.iter().map(|c| c.0).min().unwrap_or(0);
        let min_c = cells.iter().map(|c| c.1).min().unwrap_or(0);
        cells.map(|(r, c)| ((r - min_r) as u32, (c - min_c) as u32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StampShape {
    Rect {
        height: u32,
        width: u32,
    },
    Tetromino {
        kind: TetrominoKind,
        rotation: u8,
        scale: u32,
    },
}

impl StampShape {
    /// Bounding box as `(height, width)`.
    pub fn extent(&self) -> (u32, u32) {
        match *self {
            StampShape::Rect { height, width } => (height, width),
            StampShape::Tetromino {
                kind,
                rotation,
                scale,
            } => {
                let cells = kind.rotated(rotation);
                let h = cells.iter().map(|c| c.0).max().unwrap_or(0) + 1;
                let w = cells.iter().map(|c| c.1).max().unwrap_or(0) + 1;
                (h * scale, w * scale)
            }
        }
    }
}

/// One placed obstacle: shape plus top-left anchor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stamp {
    pub shape: StampShape,
    pub anchor: Cell,
}

impl Stamp {
    pub fn cells(&self) -> Vec<Cell> {
        let Cell { i: ai, j: aj } = self.anchor;
        match self.shape {
            StampShape::Rect { height, width } => (0..height)
                .flat_map(|di| (0..width).map(move |dj| Cell::new(ai + di, aj + dj)))
                .collect(),
            StampShape::Tetromino {
                kind,
                rotation,
                scale,
            } => kind
                .rotated(rotation)
                .into_iter()
                .flat_map(|(r, c)| {
                    (0..scale).flat_map(move |di| {
                        (0..scale)
                            .map(move |dj| Cell::new(ai + r * scale + di, aj + c * scale + dj))
                    })
                })
                .collect(),
        }
    }
}

/// A generated map and the obstacles that built it, in placement order.
#[derive(Clone, Debug)]
pub struct GeneratedMap {
    pub grid: Grid,
    pub stamps: Vec<Stamp>,
}

fn draw_shape<R: Rng + ?Sized>(spec: &ObstacleSpec, rng: &mut R) -> StampShape {
    match *spec {
        ObstacleSpec::Rectangle {
            w_min,
            w_max,
            h_min,
            h_max,
        } => {
            let width = rng.gen_range(w_min..=w_max);
            let height = rng.gen_range(h_min..=h_max);
            if rng.gen_bool(0.5) {
                StampShape::Rect {
                    height: width,
                    width: height,
                }
            } else {
                StampShape::Rect { height, width }
            }
        }
        ObstacleSpec::Tetromino {
            scale_min,
            scale_max,
        } => StampShape::Tetromino {
            kind: *TetrominoKind::ALL.choose(rng).expect("nonempty"),
            rotation: rng.gen_range(0..4),
            scale: rng.gen_range(scale_min..=scale_max),
        },
    }
}

/// Generates a map from `config`, seeding the stream from `config.seed`.
pub fn generate(config: &GenConfig) -> Result<GeneratedMap, GenError> {
    generate_with_rng(config, &mut ChaCha8Rng::seed_from_u64(config.seed))
}

/// Places obstacles one at a time at uniform positions until the blocked fraction
/// reaches the threshold. Obstacles lie fully inside the grid and may overlap.
pub fn generate_with_rng<R: Rng + ?Sized>(
    config: &GenConfig,
    rng: &mut R,
) -> Result<GeneratedMap, GenError> {
    config.validate()?;
    let (rows, cols) = (config.rows, config.cols);
    let total = rows as u64 * cols as u64;
    let mut blocked = vec![false; total as usize];
    let mut count = 0u64;
    let mut stamps = Vec::new();

    let reached = |count: u64| count as f64 / total as f64 >= config.blocked_threshold;
    let max_attempts = 64 * total + 1_000;
    let mut attempts = 0u64;
    let mut misfits = 0u64;

    while !reached(count) {
        if attempts == max_attempts || misfits == 1_000 {
            return Err(GenError::ThresholdUnreachable {
                threshold: config.blocked_threshold,
                attempts,
                reached: count as f64 / total as f64,
            });
        }
        attempts += 1;
        let shape = draw_shape(&config.obstacles, rng);
        let (h, w) = shape.extent();
        if h > rows || w > cols {
            misfits += 1;
            continue;
        }
        misfits = 0;
        let anchor = Cell::new(rng.gen_range(0..=rows - h), rng.gen_range(0..=cols - w));
        let stamp = Stamp { shape, anchor };
        for c in stamp.cells() {
            let idx = c.i as usize * cols as usize + c.j as usize;
            if !blocked[idx] {
                blocked[idx] = true;
                count += 1;
            }
        }
        stamps.push(stamp);
    }

    let grid = Grid::from_blocked(rows, cols, blocked).expect("validated dimensions");
    Ok(GeneratedMap { grid, stamps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaskSpec {
    pub s: Cell,
    pub g: Cell,
    pub target_dist: Cost,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlacementError {
    #[error("target distance {target} does not span the grid ({rows}x{cols}) edge to edge")]
    BadTarget { target: Cost, rows: u32, cols: u32 },
    #[error("no row or column connects opposite edges")]
    NoSolvablePlacement,
}

/// Connected-component label per cell under the grid's move rules; blocked cells get `u32::MAX`.
pub fn component_labels(grid: &Grid) -> Vec<u32> {
    let mut labels = vec![u32::MAX; grid.len()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..grid.len() {
        if labels[start] != u32::MAX || grid.blocked_mask()[start] {
            continue;
        }
        labels[start] = next;
        queue.push_back(grid.cell_at(start));
        while let Some(cell) = queue.pop_front() {
            grid.for_each_neighbor(cell, |n, _| {
                let idx = grid.index(n);
                if labels[idx] == u32::MAX {
                    labels[idx] = next;
                    queue.push_back(n);
                }
            });
        }
        next += 1;
    }
    labels
}

/// Picks start and goal on opposite edges, `target_dist` apart, and mutually reachable.
///
/// `target_dist = C_HV * (cols - 1)` places them on the left and right edges of one row;
/// `C_HV * (rows - 1)` on the top and bottom edges of one column. The row (or column) is
/// drawn uniformly among those whose endpoints are connected.
pub fn place_task<R: Rng + ?Sized>(
    grid: &Grid,
    target_dist: Cost,
    rng: &mut R,
) -> Result<TaskSpec, PlacementError> {
    let (rows, cols) = (grid.rows(), grid.cols());
    let horizontal = target_dist == C_HV * (cols as Cost - 1);
    let vertical = target_dist == C_HV * (rows as Cost - 1);
    if target_dist == 0 || !(horizontal || vertical) {
        return Err(PlacementError::BadTarget {
            target: target_dist,
            rows,
            cols,
        });
    }
    let labels = component_labels(grid);
    let connected = |a: Cell, b: Cell| {
        let (la, lb) = (labels[grid.index(a)], labels[grid.index(b)]);
        la != u32::MAX && la == lb
    };
    let candidates: Vec<(Cell, Cell)> = if horizontal {
        (0..rows)
            .map(|r| (Cell::new(r, 0), Cell::new(r, cols - 1)))
            .filter(|&(s, g)| connected(s, g))
            .collect()
    } else {
        (0..cols)
            .map(|c| (Cell::new(0, c), Cell::new(rows - 1, c)))
            .filter(|&(s, g)| connected(s, g))
            .collect()
    };
    let &(s, g) = candidates
        .choose(rng)
        .ok_or(PlacementError::NoSolvablePlacement)?;
    debug_assert_eq!(octile_dist(s, g), target_dist);
    Ok(TaskSpec { s, g, target_dist })
}
