//! 8-connected grid world: cells, the octile metric, paths and the map text format.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

/// Integer path cost. All costs are expressed in these units.
pub type Cost = u64;

/// Cost of a horizontal or vertical step.
pub const C_HV: Cost = 10;
/// Cost of a diagonal step.
pub const C_D: Cost = 14;

/// Neighbor offsets in row-major order. Neighbor enumeration always follows this order.
pub const OFFSETS8: [(i32, i32); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// A cell position: `i` is the row, `j` the column, origin at the top-left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cell {
    pub i: u32,
    pub j: u32,
}

impl Cell {
    pub const fn new(i: u32, j: u32) -> Self {
        Cell { i, j }
    }

    /// Adds a signed offset, returning `None` if the result would be negative.
    #[inline]
    pub fn offset(self, di: i32, dj: i32) -> Option<Cell> {
        let i = self.i as i64 + di as i64;
        let j = self.j as i64 + dj as i64;
        if i < 0 || j < 0 || i > u32::MAX as i64 || j > u32::MAX as i64 {
            return None;
        }
        Some(Cell::new(i as u32, j as u32))
    }

    /// Chebyshev distance in cells.
    pub fn chebyshev(self, other: Cell) -> u32 {
        self.i.abs_diff(other.i).max(self.j.abs_diff(other.j))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.i, self.j)
    }
}

impl From<(u32, u32)> for Cell {
    fn from((i, j): (u32, u32)) -> Self {
        Cell::new(i, j)
    }
}

/// Octile (diagonal) distance between two cells in cost units.
#[inline]
pub fn octile_dist(a: Cell, b: Cell) -> Cost {
    let di = a.i.abs_diff(b.i) as Cost;
    let dj = a.j.abs_diff(b.j) as Cost;
    let diag = di.min(dj);
    C_D * diag + C_HV * (di + dj - 2 * diag)
}

/// How diagonal moves interact with blocked orthogonal neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CornerRule {
    /// A diagonal move needs both orthogonally adjacent cells free.
    #[default]
    NoCut,
    /// A diagonal move needs at least one orthogonally adjacent cell free.
    CutOneCorner,
    /// Diagonal moves ignore orthogonal neighbors.
    CutAll,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("cell {0} is outside the {1}x{2} grid")]
    OutOfBounds(Cell, u32, u32),
    #[error("cell {0} is blocked")]
    Blocked(Cell),
    #[error("grid dimensions must be positive (got {0}x{1})")]
    EmptyGrid(u32, u32),
    #[error("blocked vector has {got} entries, expected {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("step {index} from {from} to {to} is not an 8-adjacent move")]
    NotAdjacent { index: usize, from: Cell, to: Cell },
    #[error("cell {cell} at position {index} is not traversable")]
    NotTraversable { index: usize, cell: Cell },
    #[error("step {index} from {from} to {to} cuts a blocked corner")]
    CutsCorner { index: usize, from: Cell, to: Cell },
    #[error("path starts at {got}, expected {expected}")]
    WrongStart { expected: Cell, got: Cell },
    #[error("path ends at {got}, expected {expected}")]
    WrongEnd { expected: Cell, got: Cell },
    #[error("path is empty")]
    Empty,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapParseError {
    #[error("line {line}: expected `{expected}`, found `{found}`")]
    BadHeader {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: invalid dimension `{value}`")]
    BadDimension { line: usize, value: String },
    #[error("line {line}: map row {row} has {got} cells, expected {expected}")]
    RowLength {
        line: usize,
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("line {line}: unknown glyph `{glyph}` in map row {row}")]
    UnknownGlyph {
        line: usize,
        row: usize,
        glyph: char,
    },
    #[error("line {line}: expected {expected} map rows, found {got}")]
    MissingRows {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: unexpected content after the last map row")]
    TrailingContent { line: usize },
}

/// Immutable traversability field.
#[derive(Clone, PartialEq, Eq)]
pub struct Grid {
    rows: u32,
    cols: u32,
    blocked: Vec<bool>,
    corner_rule: CornerRule,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("blocked", &self.blocked_count())
            .field("corner_rule", &self.corner_rule)
            .finish()
    }
}

impl Grid {
    /// Builds a grid from a row-major blocked mask.
    pub fn from_blocked(rows: u32, cols: u32, blocked: Vec<bool>) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::EmptyGrid(rows, cols));
        }
        let expected = rows as usize * cols as usize;
        if blocked.len() != expected {
            return Err(GridError::SizeMismatch {
                expected,
                got: blocked.len(),
            });
        }
        Ok(Grid {
            rows,
            cols,
            blocked,
            corner_rule: CornerRule::default(),
        })
    }

    /// An obstacle-free grid.
    pub fn empty(rows: u32, cols: u32) -> Result<Self, GridError> {
        Self::from_blocked(rows, cols, vec![false; rows as usize * cols as usize])
    }

    /// Builds a grid from a predicate over cells.
    pub fn from_fn(
        rows: u32,
        cols: u32,
        mut is_blocked: impl FnMut(Cell) -> bool,
    ) -> Result<Self, GridError> {
        let mut blocked = Vec::with_capacity(rows as usize * cols as usize);
        for i in 0..rows {
            for j in 0..cols {
                blocked.push(is_blocked(Cell::new(i, j)));
            }
        }
        Self::from_blocked(rows, cols, blocked)
    }

    pub fn with_corner_rule(mut self, rule: CornerRule) -> Self {
        self.corner_rule = rule;
        self
    }

    pub fn corner_rule(&self) -> CornerRule {
        self.corner_rule
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.blocked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocked.is_empty()
    }

    #[inline]
    pub fn in_bounds(&self, c: Cell) -> bool {
        c.i < self.rows && c.j < self.cols
    }

    /// Row-major linear index. The cell must be in bounds.
    #[inline]
    pub fn index(&self, c: Cell) -> usize {
        debug_assert!(self.in_bounds(c));
        c.i as usize * self.cols as usize + c.j as usize
    }

    #[inline]
    pub fn cell_at(&self, index: usize) -> Cell {
        let cols = self.cols as usize;
        Cell::new((index / cols) as u32, (index % cols) as u32)
    }

    /// True for blocked or out-of-bounds cells.
    #[inline]
    pub fn is_blocked(&self, c: Cell) -> bool {
        !self.in_bounds(c) || self.blocked[self.index(c)]
    }

    #[inline]
    pub fn is_traversable(&self, c: Cell) -> bool {
        !self.is_blocked(c)
    }

    pub fn blocked_count(&self) -> usize {
        self.blocked.iter().filter(|&&b| b).count()
    }

    pub fn blocked_fraction(&self) -> f64 {
        self.blocked_count() as f64 / self.len() as f64
    }

    pub fn blocked_mask(&self) -> &[bool] {
        &self.blocked
    }

    /// Errors unless `c` is in bounds and traversable.
    pub fn check_traversable(&self, c: Cell) -> Result<(), GridError> {
        if !self.in_bounds(c) {
            return Err(GridError::OutOfBounds(c, self.rows, self.cols));
        }
        if self.blocked[self.index(c)] {
            return Err(GridError::Blocked(c));
        }
        Ok(())
    }

    /// Whether the single move `from -> from + (di, dj)` is legal. `from` is assumed traversable.
    #[inline]
    pub fn can_step(&self, from: Cell, di: i32, dj: i32) -> bool {
        let Some(to) = from.offset(di, dj) else {
            return false;
        };
        if self.is_blocked(to) {
            return false;
        }
        if di != 0 && dj != 0 {
            let side_a = from.offset(di, 0).is_none_or(|c| self.is_blocked(c));
            let side_b = from.offset(0, dj).is_none_or(|c| self.is_blocked(c));
            match self.corner_rule {
                CornerRule::NoCut => !(side_a || side_b),
                CornerRule::CutOneCorner => !(side_a && side_b),
                CornerRule::CutAll => true,
            }
        } else {
            true
        }
    }

    /// Calls `f(neighbor, step_cost)` for every legal move out of `c`, in [`OFFSETS8`] order.
    #[inline]
    pub fn for_each_neighbor(&self, c: Cell, mut f: impl FnMut(Cell, Cost)) {
        for &(di, dj) in &OFFSETS8 {
            if self.can_step(c, di, dj) {
                let cost = if di != 0 && dj != 0 { C_D } else { C_HV };
                // can_step guarantees the offset exists
                f(
                    Cell::new(
                        (c.i as i64 + di as i64) as u32,
                        (c.j as i64 + dj as i64) as u32,
                    ),
                    cost,
                );
            }
        }
    }

    /// Legal 8-connected neighbors of a traversable cell.
    pub fn neighbors8(&self, c: Cell) -> Result<Vec<Cell>, GridError> {
        self.check_traversable(c)?;
        let mut out = Vec::with_capacity(8);
        self.for_each_neighbor(c, |n, _| out.push(n));
        Ok(out)
    }

    /// Checks adjacency, traversability and the corner rule for every step.
    pub fn validate_path(&self, path: &[Cell]) -> Result<(), PathError> {
        for (index, &cell) in path.iter().enumerate() {
            if self.is_blocked(cell) {
                return Err(PathError::NotTraversable { index, cell });
            }
        }
        for (index, w) in path.windows(2).enumerate() {
            let (from, to) = (w[0], w[1]);
            if from.chebyshev(to) != 1 {
                return Err(PathError::NotAdjacent { index, from, to });
            }
            let di = to.i as i32 - from.i as i32;
            let dj = to.j as i32 - from.j as i32;
            if !self.can_step(from, di, dj) {
                return Err(PathError::CutsCorner { index, from, to });
            }
        }
        Ok(())
    }

    /// [`Grid::validate_path`] plus endpoint checks.
    pub fn validate_path_between(&self, path: &[Cell], s: Cell, g: Cell) -> Result<(), PathError> {
        let (first, last) = match (path.first(), path.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(PathError::Empty),
        };
        if first != s {
            return Err(PathError::WrongStart {
                expected: s,
                got: first,
            });
        }
        if last != g {
            return Err(PathError::WrongEnd {
                expected: g,
                got: last,
            });
        }
        self.validate_path(path)
    }
}

/// Sum of step costs along a path. Empty and single-cell paths cost 0.
pub fn path_length(path: &[Cell]) -> Result<Cost, PathError> {
    path.windows(2).enumerate().try_fold(0, |acc, (index, w)| {
        let (from, to) = (w[0], w[1]);
        match (from.i.abs_diff(to.i), from.j.abs_diff(to.j)) {
            (1, 1) => Ok(acc + C_D),
            (0, 1) | (1, 0) => Ok(acc + C_HV),
            _ => Err(PathError::NotAdjacent { index, from, to }),
        }
    })
}

const GLYPH_FREE: char = '.';
const GLYPH_BLOCKED: char = '@';

/// Parses the `type octile` map text format.
pub fn load_map(text: &str) -> Result<Grid, MapParseError> {
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l.trim_end()));

    let mut header = |expected: &'static str| -> Result<(usize, String), MapParseError> {
        let (line, found) = lines.next().unwrap_or((0, ""));
        let line = if line == 0 { usize::MAX } else { line };
        let found = found.to_string();
        let mut words = found.split_whitespace();
        if words.next() != Some(expected) {
            return Err(MapParseError::BadHeader {
                line,
                expected,
                found,
            });
        }
        let rest = words.collect::<Vec<_>>().join(" ");
        Ok((line, rest))
    };

    let (line, kind) = header("type")?;
    if kind != "octile" {
        return Err(MapParseError::BadHeader {
            line,
            expected: "type octile",
            found: format!("type {kind}"),
        });
    }
    let dim = |(line, value): (usize, String)| -> Result<u32, MapParseError> {
        match value.parse::<u32>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(MapParseError::BadDimension { line, value }),
        }
    };
    let rows = dim(header("height")?)?;
    let cols = dim(header("width")?)?;
    let (line, rest) = header("map")?;
    if !rest.is_empty() {
        return Err(MapParseError::BadHeader {
            line,
            expected: "map",
            found: format!("map {rest}"),
        });
    }

    let mut blocked = Vec::with_capacity(rows as usize * cols as usize);
    let mut last_line = line;
    for row in 0..rows as usize {
        let Some((line, content)) = lines.next() else {
            return Err(MapParseError::MissingRows {
                line: last_line + 1,
                expected: rows as usize,
                got: row,
            });
        };
        last_line = line;
        let mut count = 0;
        for glyph in content.chars() {
            match glyph {
                GLYPH_FREE => blocked.push(false),
                GLYPH_BLOCKED => blocked.push(true),
                other => {
                    return Err(MapParseError::UnknownGlyph {
                        line,
                        row,
                        glyph: other,
                    })
                }
            }
            count += 1;
        }
        if count != cols as usize {
            return Err(MapParseError::RowLength {
                line,
                row,
                got: count,
                expected: cols as usize,
            });
        }
    }
    if let Some((line, _)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(MapParseError::TrailingContent { line });
    }
    // dimensions are positive and the mask is complete
    Ok(Grid::from_blocked(rows, cols, blocked).expect("validated map dimensions"))
}

/// Serializes a grid in the `type octile` map text format.
pub fn save_map(grid: &Grid) -> String {
    let mut out = String::with_capacity(grid.len() + grid.rows() as usize + 48);
    let _ = write!(
        out,
        "type octile\nheight {}\nwidth {}\nmap\n",
        grid.rows(),
        grid.cols()
    );
    for row in grid.blocked.chunks(grid.cols() as usize) {
        out.extend(
            row.iter()
                .map(|&b| if b { GLYPH_BLOCKED } else { GLYPH_FREE }),
        );
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(i: u32, j: u32) -> Cell {
        Cell::new(i, j)
    }

    #[test]
    fn octile_examples() {
        assert_eq!(octile_dist(c(0, 0), c(0, 0)), 0);
        assert_eq!(octile_dist(c(0, 0), c(3, 4)), 52);
        assert_eq!(octile_dist(c(250, 0), c(250, 500)), 5000);
    }

    #[test]
    fn octile_is_a_metric_on_10x10() {
        let cells: Vec<Cell> = (0..10)
            .flat_map(|i| (0..10).map(move |j| c(i, j)))
            .collect();
        for &a in &cells {
            assert_eq!(octile_dist(a, a), 0);
            for &b in &cells {
                let ab = octile_dist(a, b);
                assert_eq!(ab, octile_dist(b, a));
                if a != b {
                    assert!(ab > 0);
                }
                for &x in &cells {
                    assert!(ab <= octile_dist(a, x) + octile_dist(x, b));
                }
            }
        }
    }

    #[test]
    fn neighbor_counts() {
        let g = Grid::empty(5, 5).unwrap();
        assert_eq!(g.neighbors8(c(2, 2)).unwrap().len(), 8);
        assert_eq!(
            g.neighbors8(c(0, 0)).unwrap(),
            vec![c(0, 1), c(1, 0), c(1, 1)]
        );
    }

    #[test]
    fn neighbor_order_is_row_major() {
        let g = Grid::empty(3, 3).unwrap();
        assert_eq!(
            g.neighbors8(c(1, 1)).unwrap(),
            vec![
                c(0, 0),
                c(0, 1),
                c(0, 2),
                c(1, 0),
                c(1, 2),
                c(2, 0),
                c(2, 1),
                c(2, 2)
            ]
        );
    }

    #[test]
    fn corner_rule_excludes_cut_diagonal() {
        // north (1,2) and east (2,3) of (2,2) blocked
        let g = Grid::from_fn(5, 5, |x| x == c(1, 2) || x == c(2, 3)).unwrap();
        let n = g.neighbors8(c(2, 2)).unwrap();
        // Hand enumeration: N, E blocked; NE needs both free -> out; NW needs N -> out;
        // SE needs E -> out. Remaining: W, SW, S.
        assert_eq!(n, vec![c(2, 1), c(3, 1), c(3, 2)]);
        assert!(!n.contains(&c(1, 3)));

        let one = g.clone().with_corner_rule(CornerRule::CutOneCorner);
        let n = one.neighbors8(c(2, 2)).unwrap();
        assert!(!n.contains(&c(1, 3)));
        assert!(n.contains(&c(1, 1)));

        let all = g.with_corner_rule(CornerRule::CutAll);
        assert!(all.neighbors8(c(2, 2)).unwrap().contains(&c(1, 3)));
    }

    #[test]
    fn neighbors_of_bad_cells_error() {
        let g = Grid::from_fn(3, 3, |x| x == c(1, 1)).unwrap();
        assert_eq!(g.neighbors8(c(1, 1)), Err(GridError::Blocked(c(1, 1))));
        assert!(matches!(
            g.neighbors8(c(3, 0)),
            Err(GridError::OutOfBounds(..))
        ));
    }

    #[test]
    fn path_length_examples() {
        assert_eq!(path_length(&[]), Ok(0));
        assert_eq!(path_length(&[c(0, 0)]), Ok(0));
        assert_eq!(path_length(&[c(0, 0), c(1, 1), c(1, 2)]), Ok(24));
        assert_eq!(
            path_length(&[c(0, 0), c(0, 1), c(0, 3)]),
            Err(PathError::NotAdjacent {
                index: 1,
                from: c(0, 1),
                to: c(0, 3)
            })
        );
        // repeated cell is not a move
        assert!(path_length(&[c(0, 0), c(0, 0)]).is_err());
    }

    #[test]
    fn validate_path_flags_corner_cut() {
        let g = Grid::from_fn(3, 3, |x| x == c(0, 1)).unwrap();
        assert_eq!(
            g.validate_path(&[c(0, 0), c(1, 1)]),
            Err(PathError::CutsCorner {
                index: 0,
                from: c(0, 0),
                to: c(1, 1)
            })
        );
        assert!(g.validate_path(&[c(0, 0), c(1, 0), c(1, 1)]).is_ok());
        assert!(g
            .validate_path_between(&[c(0, 0), c(1, 0)], c(0, 0), c(1, 1))
            .is_err());
    }

    #[test]
    fn load_small_map() {
        let g = load_map("type octile\nheight 2\nwidth 2\nmap\n..\n..\n").unwrap();
        assert_eq!((g.rows(), g.cols()), (2, 2));
        assert_eq!(g.blocked_fraction(), 0.0);
    }

    #[test]
    fn load_errors_carry_line_numbers() {
        let short = "type octile\nheight 2\nwidth 3\nmap\n...\n..\n";
        assert_eq!(
            load_map(short),
            Err(MapParseError::RowLength {
                line: 6,
                row: 1,
                got: 2,
                expected: 3
            })
        );
        let glyph = "type octile\nheight 1\nwidth 2\nmap\n.T\n";
        assert_eq!(
            load_map(glyph),
            Err(MapParseError::UnknownGlyph {
                line: 5,
                row: 0,
                glyph: 'T'
            })
        );
        assert!(matches!(
            load_map("type grid\nheight 1\nwidth 1\nmap\n.\n"),
            Err(MapParseError::BadHeader { line: 1, .. })
        ));
        assert!(matches!(
            load_map("type octile\nheight x\nwidth 1\nmap\n.\n"),
            Err(MapParseError::BadDimension { line: 2, .. })
        ));
        assert!(matches!(
            load_map("type octile\nheight 2\nwidth 1\nmap\n.\n"),
            Err(MapParseError::MissingRows { got: 1, .. })
        ));
        assert!(matches!(
            load_map("type octile\nheight 1\nwidth 1\nmap\n.\n@\n"),
            Err(MapParseError::TrailingContent { line: 6 })
        ));
    }

    #[test]
    fn save_emits_exact_format() {
        let g = Grid::from_fn(2, 3, |x| x == c(1, 2)).unwrap();
        assert_eq!(
            save_map(&g),
            "type octile\nheight 2\nwidth 3\nmap\n...\n..@\n"
        );
    }
}
