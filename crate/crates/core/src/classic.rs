//! A*, weighted A* with an expansion budget, and uniform-cost oracles.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::time::Instant;

use thiserror::Error;

use crate::grid::{octile_dist, Cell, Cost, Grid, GridError};

/// A sequence of 8-adjacent cells.
pub type Path = Vec<Cell>;

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("invalid endpoint: {0}")]
    Endpoint(#[from] GridError),
    #[error("heuristic weight must be a finite number >= 1 (got {0})")]
    BadWeight(f64),
    #[error("expansion limit must be at least 1")]
    ZeroLimit,
}

/// Heuristic weight `w >= 1`, kept as an exact fraction so priorities stay integral.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Weight {
    num: u64,
    den: u64,
}

impl Weight {
    pub const ONE: Weight = Weight { num: 1, den: 1 };

    /// Weight with three decimal digits of precision.
    pub fn new(w: f64) -> Result<Self, SearchError> {
        if !w.is_finite() || !(1.0..=1e6).contains(&w) {
            return Err(SearchError::BadWeight(w));
        }
        Ok(Self::from_ratio((w * 1000.0).round() as u64, 1000))
    }

    pub fn from_ratio(num: u64, den: u64) -> Self {
        assert!(den > 0 && num >= den, "weight must be a ratio >= 1");
        let d = gcd(num, den);
        Weight {
            num: num / d,
            den: den / d,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `den * (g + w * h)`: the priority `g + w*h` scaled to an integer.
    #[inline]
    pub fn priority(self, g: Cost, h: Cost) -> u64 {
        g * self.den + h * self.num
    }

    /// Scale applied by [`Weight::priority`].
    pub fn denominator(self) -> u64 {
        self.den
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({}/{})", self.num, self.den)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchLimits {
    /// `None` means unlimited.
    pub max_expansions: Option<u64>,
}

impl SearchLimits {
    pub const UNLIMITED: SearchLimits = SearchLimits {
        max_expansions: None,
    };

    pub fn expansions(n: u64) -> Self {
        SearchLimits {
            max_expansions: Some(n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Found,
    BudgetExhausted,
    SpaceExhausted,
}

impl Outcome {
    pub fn is_found(self) -> bool {
        self == Outcome::Found
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SearchStats {
    pub expansions: u64,
    pub generated: u64,
    pub open_size_final: u64,
    pub closed_size_final: u64,
    /// Distinct states ever stored in OPEN or CLOSED.
    pub cells: u64,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub outcome: Outcome,
    /// Present iff `outcome` is [`Outcome::Found`].
    pub path: Option<Path>,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn length(&self) -> Option<Cost> {
        self.path
            .as_deref()
            .map(|p| crate::grid::path_length(p).expect("search paths are 8-adjacent"))
    }
}

const NO_PARENT: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq)]
struct OpenEntry {
    f: u64,
    g: Cost,
    seq: u64,
    node: u32,
}

impl Ord for OpenEntry {
    // BinaryHeap pops the maximum: lowest f, then highest g, then earliest insertion.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .cmp(&self.f)
            .then(self.g.cmp(&other.g))
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reusable weighted A* engine.
///
/// Node bookkeeping lives in a grid-sized table invalidated by a generation stamp,
/// so repeated short searches on the same grid do not reallocate.
#[derive(Default)]
pub struct LocalPlanner {
    // per-cell tables; an entry is live only when its stamp equals `stamp`
    seen: Vec<u32>,
    closed: Vec<u32>,
    parent: Vec<u32>,
    g: Vec<Cost>,
    stamp: u32,
    heap: BinaryHeap<OpenEntry>,
}

impl LocalPlanner {
    pub fn new() -> Self {
        Self::default()
    }

    fn reset(&mut self, grid: &Grid) {
        self.heap.clear();
        if self.seen.len() != grid.len() || self.stamp == u32::MAX {
            // zeroed allocations are lazily mapped, so short searches on big grids stay cheap
            self.seen = vec![0; grid.len()];
            self.closed = vec![0; grid.len()];
            self.parent = vec![0; grid.len()];
            self.g = vec![0; grid.len()];
            self.stamp = 0;
        }
        self.stamp += 1;
    }

    /// Weighted A* from `s` to `g` with priority `g_cost + w * octile(., g)`.
    ///
    /// A step is one expansion. Popping the goal ends the search and is not counted.
    /// Expanded states are never reopened. The search reports
    /// [`Outcome::BudgetExhausted`] when the next non-goal pop would exceed the limit.
    pub fn search(
        &mut self,
        grid: &Grid,
        s: Cell,
        g: Cell,
        w: Weight,
        limits: SearchLimits,
    ) -> Result<SearchResult, SearchError> {
        let started = Instant::now();
        grid.check_traversable(s)?;
        grid.check_traversable(g)?;
        if limits.max_expansions == Some(0) {
            return Err(SearchError::ZeroLimit);
        }
        let limit = limits.max_expansions.unwrap_or(u64::MAX);

        self.reset(grid);
        let stamp = self.stamp;
        let goal = grid.index(g) as u32;
        let mut stats = SearchStats::default();
        let mut seq = 0u64;

        let start = grid.index(s) as u32;
        self.seen[start as usize] = stamp;
        self.parent[start as usize] = NO_PARENT;
        self.g[start as usize] = 0;
        stats.cells = 1;
        self.heap.push(OpenEntry {
            f: w.priority(0, octile_dist(s, g)),
            g: 0,
            seq,
            node: start,
        });

        let mut outcome = Outcome::SpaceExhausted;
        while let Some(entry) = self.heap.pop() {
            let node = entry.node as usize;
            if self.closed[node] == stamp || entry.g != self.g[node] {
                continue;
            }
            if entry.node == goal {
                self.closed[node] = stamp;
                stats.closed_size_final += 1;
                outcome = Outcome::Found;
                break;
            }
            if stats.expansions == limit {
                outcome = Outcome::BudgetExhausted;
                break;
            }
            self.closed[node] = stamp;
            stats.closed_size_final += 1;
            stats.expansions += 1;

            let cell = grid.cell_at(node);
            let Self {
                seen,
                closed,
                parent,
                g: g_table,
                heap,
                ..
            } = self;
            grid.for_each_neighbor(cell, |next, step| {
                let idx = grid.index(next);
                let new_g = entry.g + step;
                if seen[idx] == stamp {
                    if closed[idx] == stamp || new_g >= g_table[idx] {
                        return;
                    }
                } else {
                    seen[idx] = stamp;
                    stats.cells += 1;
                }
                parent[idx] = entry.node;
                g_table[idx] = new_g;
                seq += 1;
                stats.generated += 1;
                heap.push(OpenEntry {
                    f: w.priority(new_g, octile_dist(next, g)),
                    g: new_g,
                    seq,
                    node: idx as u32,
                });
            });
        }

        stats.open_size_final = stats.cells - stats.closed_size_final;
        let path = (outcome == Outcome::Found).then(|| {
            let mut path = Vec::new();
            let mut at = goal;
            while at != NO_PARENT {
                path.push(grid.cell_at(at as usize));
                at = self.parent[at as usize];
            }
            path.reverse();
            path
        });
        stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        Ok(SearchResult {
            outcome,
            path,
            stats,
        })
    }
}

/// Weighted A* with a fresh engine. See [`LocalPlanner::search`].
pub fn weighted_astar(
    grid: &Grid,
    s: Cell,
    g: Cell,
    w: Weight,
    limits: SearchLimits,
) -> Result<SearchResult, SearchError> {
    LocalPlanner::new().search(grid, s, g, w, limits)
}

/// Unweighted, unlimited A*; returns optimal paths.
pub fn astar(grid: &Grid, s: Cell, g: Cell) -> Result<SearchResult, SearchError> {
    weighted_astar(grid, s, g, Weight::ONE, SearchLimits::UNLIMITED)
}

/// Exact shortest-path cost by uniform-cost search, `None` if unreachable.
///
/// Uses no heuristic and shares only the move rules with the A* engine.
pub fn dijkstra_oracle(grid: &Grid, s: Cell, g: Cell) -> Option<Cost> {
    if grid.is_blocked(s) || grid.is_blocked(g) {
        return None;
    }
    let mut dist = vec![Cost::MAX; grid.len()];
    let mut heap = BinaryHeap::new();
    dist[grid.index(s)] = 0;
    heap.push(std::cmp::Reverse((0, grid.index(s))));
    while let Some(std::cmp::Reverse((d, idx))) = heap.pop() {
        if d > dist[idx] {
            continue;
        }
        let cell = grid.cell_at(idx);
        if cell == g {
            return Some(d);
        }
        grid.for_each_neighbor(cell, |next, step| {
            let n = grid.index(next);
            if d + step < dist[n] {
                dist[n] = d + step;
                heap.push(std::cmp::Reverse((d + step, n)));
            }
        });
    }
    None
}

/// Whether `g` is reachable from `s` under the grid's move rules (breadth-first flood).
pub fn reachable(grid: &Grid, s: Cell, g: Cell) -> bool {
    if grid.is_blocked(s) || grid.is_blocked(g) {
        return false;
    }
    let mut seen = vec![false; grid.len()];
    let mut queue = VecDeque::from([s]);
    seen[grid.index(s)] = true;
    while let Some(cell) = queue.pop_front() {
        if cell == g {
            return true;
        }
        grid.for_each_neighbor(cell, |next, _| {
            let n = grid.index(next);
            if !seen[n] {
                seen[n] = true;
                queue.push_back(next);
            }
        });
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::path_length;

    fn c(i: u32, j: u32) -> Cell {
        Cell::new(i, j)
    }

    fn boxed_goal() -> Grid {
        // goal (5,5) surrounded by a ring of blocked cells
        Grid::from_fn(11, 11, |x| x.chebyshev(c(5, 5)) == 1).unwrap()
    }

    #[test]
    fn straight_line_budget_is_exact() {
        let g = Grid::empty(21, 21).unwrap();
        for w in [
            Weight::ONE,
            Weight::new(1.5).unwrap(),
            Weight::new(3.0).unwrap(),
        ] {
            let r =
                weighted_astar(&g, c(10, 10), c(10, 15), w, SearchLimits::expansions(5)).unwrap();
            assert_eq!(r.outcome, Outcome::Found);
            assert_eq!(r.stats.expansions, 5);
            assert_eq!(r.length(), Some(50));

            let r =
                weighted_astar(&g, c(10, 10), c(10, 15), w, SearchLimits::expansions(4)).unwrap();
            assert_eq!(r.outcome, Outcome::BudgetExhausted);
            assert_eq!(r.stats.expansions, 4);
            assert!(r.path.is_none());
        }
    }

    #[test]
    fn sealed_goal_exhausts_space() {
        let g = boxed_goal();
        let r = astar(&g, c(0, 0), c(5, 5)).unwrap();
        assert_eq!(r.outcome, Outcome::SpaceExhausted);
        assert!(r.path.is_none());
        assert_eq!(dijkstra_oracle(&g, c(0, 0), c(5, 5)), None);
        assert!(!reachable(&g, c(0, 0), c(5, 5)));
    }

    #[test]
    fn empty_grid_diagonal() {
        let g = Grid::empty(8, 8).unwrap();
        let r = astar(&g, c(0, 0), c(5, 5)).unwrap();
        assert_eq!(r.length(), Some(70));
        assert_eq!(dijkstra_oracle(&g, c(0, 0), c(3, 4)), Some(52));
        assert_eq!(dijkstra_oracle(&g, c(2, 2), c(2, 2)), Some(0));
    }

    #[test]
    fn blocked_endpoint_is_an_error() {
        let g = boxed_goal();
        assert!(matches!(
            astar(&g, c(4, 4), c(0, 0)),
            Err(SearchError::Endpoint(GridError::Blocked(_)))
        ));
        assert!(matches!(
            astar(&g, c(0, 0), c(11, 0)),
            Err(SearchError::Endpoint(GridError::OutOfBounds(..)))
        ));
    }

    #[test]
    fn stats_invariants() {
        let g = Grid::from_fn(30, 30, |x| x.j == 15 && x.i < 25).unwrap();
        let r = astar(&g, c(5, 2), c(5, 28)).unwrap();
        let s = r.stats;
        assert!(s.cells >= s.closed_size_final);
        assert!(s.expansions <= s.closed_size_final);
        assert_eq!(s.cells, s.open_size_final + s.closed_size_final);
        let path = r.path.unwrap();
        g.validate_path_between(&path, c(5, 2), c(5, 28)).unwrap();
        assert_eq!(
            path_length(&path).ok(),
            dijkstra_oracle(&g, c(5, 2), c(5, 28))
        );
    }

    #[test]
    fn weight_parsing() {
        assert_eq!(Weight::new(3.0).unwrap(), Weight::from_ratio(3, 1));
        assert_eq!(Weight::new(1.5).unwrap(), Weight::from_ratio(3, 2));
        assert!(Weight::new(0.5).is_err());
        assert!(Weight::new(f64::NAN).is_err());
        assert_eq!(Weight::new(1.5).unwrap().priority(10, 4), 32);
    }

    #[test]
    fn zero_limit_rejected() {
        let g = Grid::empty(3, 3).unwrap();
        assert_eq!(
            weighted_astar(
                &g,
                c(0, 0),
                c(2, 2),
                Weight::ONE,
                SearchLimits::expansions(0)
            ),
            Err(SearchError::ZeroLimit)
        );
    }
}
