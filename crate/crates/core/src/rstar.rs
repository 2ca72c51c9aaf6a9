//! R*: randomized sparse search over sampled waypoints, with weighted A* solving the
//! local path between each waypoint and its predecessor.
//!
//! Each selected waypoint first gets its local path attempted under a small expansion
//! budget. Waypoints whose local search runs out of budget are labeled AVOID and kept
//! in OPEN; they are only selected once no regular waypoint is left, and are retried
//! with a geometrically larger budget. Waypoints with a solved local path are expanded:
//! `K` successors are sampled from the midpoint-circle ring of radius `delta`, and the
//! goal is added whenever it lies within `delta`.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::time::Instant;

use rand::Rng;
use thiserror::Error;

use crate::classic::{LocalPlanner, Outcome, Path, SearchLimits, Weight};
use crate::grid::{octile_dist, path_length, Cell, Cost, Grid, GridError, C_HV};
use crate::ring::{radius_for_delta, sample_successors};

/// Default multiplier applied to the local budget on each retry of an AVOID waypoint.
pub const DEFAULT_ESCALATION: u64 = 2;
/// Smallest number of successors per expansion.
pub const MIN_SUCCESSORS: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RStarParams {
    /// Distance between a waypoint and its successors, in cost units.
    pub delta: Cost,
    /// Successors sampled per expansion.
    pub k_succ: u32,
    /// Expansion budget of a first local search attempt.
    pub m_budget: u64,
    pub w: Weight,
    /// Budget multiplier for retried AVOID waypoints.
    pub escalation: u64,
}

impl RStarParams {
    pub fn new(delta: Cost, k_succ: u32, m_budget: u64, w: Weight) -> Self {
        RStarParams {
            delta,
            k_succ,
            m_budget,
            w,
            escalation: DEFAULT_ESCALATION,
        }
    }
}

/// Largest meaningful `K` for a given `delta`: `ceil(6 * delta / C_HV)`.
pub fn max_successors(delta: Cost) -> u32 {
    (6 * delta).div_ceil(C_HV).min(u32::MAX as Cost) as u32
}

/// Smallest `m` that lets a local search cross one ring radius in free space.
pub fn min_budget(delta: Cost) -> u64 {
    radius_for_delta(delta) as u64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamViolation {
    DeltaTooSmall { delta: Cost },
    TooFewSuccessors { k: u32 },
    TooManySuccessors { k: u32, max: u32 },
    BudgetTooSmall { m: u64, min: u64 },
    EscalationTooSmall { escalation: u64 },
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ParamViolation::DeltaTooSmall { delta } => {
                write!(f, "Δ ≥ c_hv = {C_HV} (got Δ={delta})")
            }
            ParamViolation::TooFewSuccessors { k } => {
                write!(f, "K ≥ {MIN_SUCCESSORS} (got K={k})")
            }
            ParamViolation::TooManySuccessors { k, max } => {
                write!(f, "K ≤ 6·Δ/10 = {max} (got K={k})")
            }
            ParamViolation::BudgetTooSmall { m, min } => {
                write!(f, "m ≥ Δ/10 = {min} (got m={m})")
            }
            ParamViolation::EscalationTooSmall { escalation } => {
                write!(f, "escalation ≥ 2 (got {escalation})")
            }
        }
    }
}

/// Checks every parameter bound and returns all violations.
pub fn validate_params(p: &RStarParams) -> Result<(), Vec<ParamViolation>> {
    let mut violations = Vec::new();
    if p.delta < C_HV {
        violations.push(ParamViolation::DeltaTooSmall { delta: p.delta });
    }
    if p.k_succ < MIN_SUCCESSORS {
        violations.push(ParamViolation::TooFewSuccessors { k: p.k_succ });
    }
    let max = max_successors(p.delta);
    if p.k_succ > max {
        violations.push(ParamViolation::TooManySuccessors { k: p.k_succ, max });
    }
    let min = min_budget(p.delta);
    if p.m_budget < min {
        violations.push(ParamViolation::BudgetTooSmall { m: p.m_budget, min });
    }
    if p.escalation < 2 {
        violations.push(ParamViolation::EscalationTooSmall {
            escalation: p.escalation,
        });
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RStarError {
    #[error("invalid parameters: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidParams(Vec<ParamViolation>),
    #[error("invalid endpoint: {0}")]
    Endpoint(#[from] GridError),
    #[error("start and goal are the same cell {0}")]
    SameEndpoints(Cell),
    #[error("waypoint chain is inconsistent: {0}")]
    Inconsistent(String),
}

/// Parameters derived from the start and goal alone:
/// `delta = dist/10` (to a multiple of `C_HV`), `K = max(10, delta/20)`, `m = delta/5`.
pub fn auto_params(s: Cell, g: Cell, w: Weight) -> Result<RStarParams, RStarError> {
    if s == g {
        return Err(RStarError::SameEndpoints(s));
    }
    let dist = octile_dist(s, g);
    // dist/10 rounded half up to a multiple of C_HV
    let delta = ((dist + 5 * C_HV) / (10 * C_HV) * C_HV).max(C_HV);
    let k = ((delta + 10) / 20)
        .max(10)
        .min(max_successors(delta) as Cost) as u32;
    let m = ((2 * delta + 5) / 10).max(min_budget(delta));
    Ok(RStarParams::new(delta, k, m, w))
}

pub type StateId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalStatus {
    NoneNeeded,
    Pending,
    Solved,
    Failed,
}

/// A waypoint of the sparse search.
#[derive(Clone, Debug)]
pub struct SparseState {
    pub cell: Cell,
    pub pred: Option<StateId>,
    /// Solved local lengths along the chain; the last link is an octile estimate while pending.
    pub g_cost: Cost,
    pub h_cost: Cost,
    pub avoid: bool,
    pub local_status: LocalStatus,
    pub local_path: Option<Path>,
    pub retry_count: u32,
    closed: bool,
    version: u32,
}

impl SparseState {
    fn start(cell: Cell, goal: Cell) -> Self {
        SparseState {
            cell,
            pred: None,
            g_cost: 0,
            h_cost: octile_dist(cell, goal),
            avoid: false,
            local_status: LocalStatus::NoneNeeded,
            local_path: None,
            retry_count: 0,
            closed: false,
            version: 0,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RStarStats {
    pub sparse_states: u64,
    /// Waypoints expanded (moved to CLOSED).
    pub expansions: u64,
    pub local_searches: u64,
    pub failed_local: u64,
    /// Sum of OPEN/CLOSED cells over all local searches.
    pub local_cells: u64,
    /// `sparse_states + local_cells`.
    pub cells: u64,
    pub wall_time_ms: f64,
    /// Path length; 0 when no path was found.
    pub length: Cost,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RStarResult {
    pub outcome: Outcome,
    /// Present iff `outcome` is [`Outcome::Found`].
    pub path: Option<Path>,
    /// Local paths of the waypoints on the returned chain, start to goal; `path` is their
    /// concatenation with junction cells kept once.
    pub segments: Vec<Path>,
    pub stats: RStarStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    /// Local path found; the waypoint is re-queued with its solved cost.
    Solved,
    /// Local search ran out of budget; the waypoint is labeled AVOID.
    Avoid,
    /// Local search exhausted the reachable space; the waypoint is dropped.
    Unreachable,
    Expand,
    Goal,
    /// OPEN ran empty; the goal is attached to the best CLOSED waypoint.
    Fallback,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceEvent::Solved => "solved",
            TraceEvent::Avoid => "avoid",
            TraceEvent::Unreachable => "unreachable",
            TraceEvent::Expand => "expand",
            TraceEvent::Goal => "goal",
            TraceEvent::Fallback => "fallback",
        })
    }
}

/// One selection of a waypoint from OPEN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub step: u64,
    pub cell: Cell,
    /// `g + w*h` at selection time.
    pub f: f64,
    pub g: Cost,
    pub avoid: bool,
    pub event: TraceEvent,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {} {}",
            self.step,
            self.cell.i,
            self.cell.j,
            self.f,
            self.g,
            u8::from(self.avoid),
            self.event
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct OpenEntry {
    f: u64,
    g: Cost,
    seq: u64,
    id: StateId,
    version: u32,
}

impl Ord for OpenEntry {
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

/// OPEN split into regular and AVOID waypoints, both with lazy deletion.
#[derive(Default)]
struct OpenList {
    regular: BinaryHeap<OpenEntry>,
    avoid: BinaryHeap<OpenEntry>,
    seq: u64,
}

impl OpenList {
    fn push(&mut self, states: &mut [SparseState], id: StateId, w: Weight) {
        let st = &mut states[id];
        st.version += 1;
        self.seq += 1;
        let entry = OpenEntry {
            f: w.priority(st.g_cost, st.h_cost),
            g: st.g_cost,
            seq: self.seq,
            id,
            version: st.version,
        };
        if st.avoid {
            self.avoid.push(entry);
        } else {
            self.regular.push(entry);
        }
    }

    /// Pops the best live regular waypoint, falling back to the best AVOID waypoint.
    fn pop(&mut self, states: &[SparseState]) -> Option<StateId> {
        let live = |e: &OpenEntry| {
            let st = &states[e.id];
            st.version == e.version && !st.closed && st.local_status != LocalStatus::Failed
        };
        for heap in [&mut self.regular, &mut self.avoid] {
            while let Some(e) = heap.pop() {
                if live(&e) {
                    return Some(e.id);
                }
            }
        }
        None
    }
}

/// Joins the local paths along the predecessor chain ending at `goal_state`.
pub fn reconstruct(states: &[SparseState], goal_state: StateId) -> Result<Path, RStarError> {
    let chain = chain_segments(states, goal_state)?;
    let mut path: Path = Vec::new();
    for local in &chain {
        match path.last() {
            None => path.extend_from_slice(local),
            Some(&junction) => {
                if local.first() != Some(&junction) {
                    return Err(RStarError::Inconsistent(format!(
                        "local path does not start at junction {junction}"
                    )));
                }
                path.extend_from_slice(&local[1..]);
            }
        }
    }
    if path.is_empty() {
        path.push(states[goal_state].cell);
    }
    Ok(path)
}

/// Local paths along the predecessor chain ending at `goal_state`, start first.
fn chain_segments(states: &[SparseState], goal_state: StateId) -> Result<Vec<Path>, RStarError> {
    let mut chain = Vec::new();
    let mut at = Some(goal_state);
    while let Some(id) = at {
        let st = &states[id];
        match (st.pred, st.local_status, &st.local_path) {
            (None, _, _) => break,
            (Some(_), LocalStatus::Solved, Some(p)) => chain.push(p),
            _ => {
                return Err(RStarError::Inconsistent(format!(
                    "waypoint {} has no solved local path",
                    st.cell
                )))
            }
        }
        if chain.len() > states.len() {
            return Err(RStarError::Inconsistent("predecessor cycle".into()));
        }
        at = st.pred;
    }
    chain.reverse();
    Ok(chain.into_iter().cloned().collect())
}

/// R* planner state for one query.
struct Planner<'a, R: ?Sized> {
    grid: &'a Grid,
    goal: Cell,
    params: RStarParams,
    rng: &'a mut R,
    local: LocalPlanner,
    states: Vec<SparseState>,
    by_cell: HashMap<Cell, StateId>,
    open: OpenList,
    stats: RStarStats,
    trace: Option<Vec<TraceRecord>>,
}

impl<R: Rng + ?Sized> Planner<'_, R> {
    fn record(&mut self, step: u64, id: StateId, avoid: bool, event: TraceEvent) {
        if let Some(trace) = self.trace.as_mut() {
            let st = &self.states[id];
            let w = self.params.w;
            trace.push(TraceRecord {
                step,
                cell: st.cell,
                f: w.priority(st.g_cost, st.h_cost) as f64 / w.denominator() as f64,
                g: st.g_cost,
                avoid,
                event,
            });
        }
    }

    fn local_budget(&self, retries: u32) -> u64 {
        let cap = self.grid.len() as u64;
        let mut budget = self.params.m_budget;
        for _ in 0..retries {
            budget = budget.saturating_mul(self.params.escalation);
            if budget >= cap {
                break;
            }
        }
        budget.min(cap).max(1)
    }

    fn solve_local(&mut self, step: u64, id: StateId) {
        let st = &self.states[id];
        let pred = st.pred.expect("pending waypoints have a predecessor");
        let was_avoid = st.avoid;
        let budget = self.local_budget(st.retry_count);
        let from = self.states[pred].cell;
        let result = self
            .local
            .search(
                self.grid,
                from,
                st.cell,
                self.params.w,
                SearchLimits::expansions(budget),
            )
            .expect("waypoints are traversable cells");
        self.stats.local_searches += 1;
        self.stats.local_cells += result.stats.cells;

        match result.outcome {
            Outcome::Found => {
                let path = result.path.expect("found searches carry a path");
                let len = path_length(&path).expect("search paths are 8-adjacent");
                let g = self.states[pred].g_cost + len;
                let st = &mut self.states[id];
                st.local_path = Some(path);
                st.local_status = LocalStatus::Solved;
                st.g_cost = g;
                st.avoid = false;
                self.record(step, id, was_avoid, TraceEvent::Solved);
                self.open.push(&mut self.states, id, self.params.w);
            }
            Outcome::BudgetExhausted => {
                self.stats.failed_local += 1;
                let st = &mut self.states[id];
                st.avoid = true;
                st.retry_count += 1;
                self.record(step, id, was_avoid, TraceEvent::Avoid);
                self.open.push(&mut self.states, id, self.params.w);
            }
            Outcome::SpaceExhausted => {
                self.stats.failed_local += 1;
                self.states[id].local_status = LocalStatus::Failed;
                self.record(step, id, was_avoid, TraceEvent::Unreachable);
            }
        }
    }

    fn add_pending(&mut self, cell: Cell, pred: StateId, g: Cost) -> StateId {
        let sid = self.states.len();
        self.states.push(SparseState {
            cell,
            pred: Some(pred),
            g_cost: g,
            h_cost: octile_dist(cell, self.goal),
            avoid: false,
            local_status: LocalStatus::Pending,
            local_path: None,
            retry_count: 0,
            closed: false,
            version: 0,
        });
        self.stats.sparse_states += 1;
        self.open.push(&mut self.states, sid, self.params.w);
        sid
    }

    /// Called when OPEN runs empty. Sampled waypoints can all land outside the start's
    /// component, so the goal is attached to the CLOSED waypoint with the lowest `f`; its
    /// escalating local search then settles reachability. Returns false once the goal has
    /// been proven unreachable.
    fn attach_goal(&mut self, step: u64) -> bool {
        if self.by_cell.contains_key(&self.goal) {
            // a goal that exists while OPEN is empty has failed its local search
            return false;
        }
        let w = self.params.w;
        let best = self
            .states
            .iter()
            .enumerate()
            .filter(|(_, st)| st.closed)
            .min_by_key(|(id, st)| (w.priority(st.g_cost, st.h_cost), *id))
            .map(|(id, _)| id)
            .expect("the start is always expanded");
        let g = self.states[best].g_cost + octile_dist(self.states[best].cell, self.goal);
        self.by_cell.insert(self.goal, self.states.len());
        let sid = self.add_pending(self.goal, best, g);
        self.record(step, sid, false, TraceEvent::Fallback);
        true
    }

    fn expand(&mut self, step: u64, id: StateId) {
        self.states[id].closed = true;
        self.stats.expansions += 1;
        self.record(step, id, false, TraceEvent::Expand);

        let center = self.states[id].cell;
        let base_g = self.states[id].g_cost;
        let mut successors = sample_successors(
            self.grid,
            center,
            self.params.delta,
            self.params.k_succ as usize,
            &mut *self.rng,
        );
        if octile_dist(self.goal, center) <= self.params.delta && !successors.contains(&self.goal) {
            successors.push(self.goal);
        }

        for cell in successors {
            let g = base_g + octile_dist(center, cell);
            match self.by_cell.entry(cell) {
                Entry::Vacant(slot) => {
                    slot.insert(self.states.len());
                    self.add_pending(cell, id, g);
                }
                Entry::Occupied(slot) => {
                    let sid = *slot.get();
                    let st = &mut self.states[sid];
                    let frozen =
                        st.closed || st.pred.is_none() || st.local_status == LocalStatus::Failed;
                    // a link whose local search ran out of budget costs infinity, so any
                    // other predecessor improves on it
                    let improves = g < st.g_cost || (st.avoid && st.pred != Some(id));
                    if frozen || !improves {
                        continue;
                    }
                    st.pred = Some(id);
                    st.g_cost = g;
                    st.local_status = LocalStatus::Pending;
                    st.local_path = None;
                    st.avoid = false;
                    st.retry_count = 0;
                    self.open.push(&mut self.states, sid, self.params.w);
                }
            }
        }
    }

    fn run(&mut self, s: Cell) -> Result<Option<StateId>, RStarError> {
        self.states.push(SparseState::start(s, self.goal));
        self.by_cell.insert(s, 0);
        self.stats.sparse_states = 1;
        self.open.push(&mut self.states, 0, self.params.w);

        let mut step = 0u64;
        loop {
            let Some(id) = self.open.pop(&self.states) else {
                if self.attach_goal(step) {
                    continue;
                }
                return Ok(None);
            };
            step += 1;
            match self.states[id].local_status {
                LocalStatus::Pending => self.solve_local(step, id),
                LocalStatus::Solved | LocalStatus::NoneNeeded => {
                    if self.states[id].cell == self.goal {
                        self.record(step, id, false, TraceEvent::Goal);
                        return Ok(Some(id));
                    }
                    self.expand(step, id);
                }
                LocalStatus::Failed => unreachable!("failed waypoints are never popped"),
            }
        }
    }
}

fn plan<R: Rng + ?Sized>(
    grid: &Grid,
    s: Cell,
    g: Cell,
    params: &RStarParams,
    rng: &mut R,
    trace: Option<Vec<TraceRecord>>,
) -> Result<(RStarResult, Option<Vec<TraceRecord>>), RStarError> {
    let started = Instant::now();
    validate_params(params).map_err(RStarError::InvalidParams)?;
    grid.check_traversable(s)?;
    grid.check_traversable(g)?;
    if s == g {
        return Err(RStarError::SameEndpoints(s));
    }

    let mut planner = Planner {
        grid,
        goal: g,
        params: *params,
        rng,
        local: LocalPlanner::new(),
        states: Vec::new(),
        by_cell: HashMap::new(),
        open: OpenList::default(),
        stats: RStarStats::default(),
        trace,
    };
    let (path, segments) = match planner.run(s)? {
        Some(goal) => (
            Some(reconstruct(&planner.states, goal)?),
            chain_segments(&planner.states, goal)?,
        ),
        None => (None, Vec::new()),
    };

    let mut stats = planner.stats;
    stats.cells = stats.sparse_states + stats.local_cells;
    let outcome = match &path {
        Some(p) => {
            stats.length = path_length(p).expect("joined local paths are 8-adjacent");
            Outcome::Found
        }
        None => Outcome::SpaceExhausted,
    };
    stats.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok((
        RStarResult {
            outcome,
            path,
            segments,
            stats,
        },
        planner.trace,
    ))
}

/// Runs R* from `s` to `g`. Results are a deterministic function of the inputs and the rng stream.
pub fn rstar_plan<R: Rng + ?Sized>(
    grid: &Grid,
    s: Cell,
    g: Cell,
    params: &RStarParams,
    rng: &mut R,
) -> Result<RStarResult, RStarError> {
    plan(grid, s, g, params, rng, None).map(|(r, _)| r)
}

/// [`rstar_plan`] that also returns one [`TraceRecord`] per selection from OPEN.
pub fn rstar_plan_traced<R: Rng + ?Sized>(
    grid: &Grid,
    s: Cell,
    g: Cell,
    params: &RStarParams,
    rng: &mut R,
) -> Result<(RStarResult, Vec<TraceRecord>), RStarError> {
    plan(grid, s, g, params, rng, Some(Vec::new())).map(|(r, t)| (r, t.unwrap_or_default()))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::classic::{dijkstra_oracle, weighted_astar};
    use crate::grid::CornerRule;

    fn c(i: u32, j: u32) -> Cell {
        Cell::new(i, j)
    }

    fn w3() -> Weight {
        Weight::new(3.0).unwrap()
    }

    #[test]
    fn empty_open_falls_back_to_the_goal() {
        // a diagonal corridor slips between diagonal ring cells, so the start has no successors
        let grid = Grid::from_fn(30, 30, |c| c.i != c.j)
            .unwrap()
            .with_corner_rule(CornerRule::CutAll);
        let p = RStarParams::new(50, 10, 10, w3());
        let (r, trace) = rstar_plan_traced(
            &grid,
            c(0, 0),
            c(29, 29),
            &p,
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        assert_eq!(r.outcome, Outcome::Found);
        assert_eq!(r.stats.length, 29 * 14);
        assert_eq!(r.stats.sparse_states, 2);
        let events: Vec<TraceEvent> = trace.iter().map(|t| t.event).collect();
        assert_eq!(
            events,
            [
                TraceEvent::Expand,
                TraceEvent::Fallback,
                TraceEvent::Avoid,
                TraceEvent::Avoid,
                TraceEvent::Solved,
                TraceEvent::Goal
            ]
        );
    }

    #[test]
    fn recommended_values_validate() {
        assert_eq!(
            validate_params(&RStarParams::new(500, 25, 100, w3())),
            Ok(())
        );
    }

    #[test]
    fn budget_below_radius_is_reported() {
        let v = validate_params(&RStarParams::new(500, 25, 40, w3())).unwrap_err();
        assert_eq!(v, vec![ParamViolation::BudgetTooSmall { m: 40, min: 50 }]);
        assert_eq!(v[0].to_string(), "m ≥ Δ/10 = 50 (got m=40)");
    }

    #[test]
    fn too_many_successors_is_reported() {
        let v = validate_params(&RStarParams::new(500, 400, 100, w3())).unwrap_err();
        assert_eq!(
            v,
            vec![ParamViolation::TooManySuccessors { k: 400, max: 300 }]
        );
        assert!(v[0].to_string().starts_with("K ≤ 6·Δ/10 = 300"));
    }

    #[test]
    fn all_violations_are_listed() {
        let mut p = RStarParams::new(5, 1, 0, w3());
        p.escalation = 1;
        let v = validate_params(&p).unwrap_err();
        assert_eq!(v.len(), 4);
        assert!(v.contains(&ParamViolation::DeltaTooSmall { delta: 5 }));
        assert!(v.contains(&ParamViolation::TooFewSuccessors { k: 1 }));
        assert!(v.contains(&ParamViolation::BudgetTooSmall { m: 0, min: 1 }));
        assert!(v.contains(&ParamViolation::EscalationTooSmall { escalation: 1 }));
    }

    #[test]
    fn auto_params_examples() {
        let p = auto_params(c(250, 0), c(250, 500), w3()).unwrap();
        assert_eq!((p.delta, p.k_succ, p.m_budget), (500, 25, 100));
        assert_eq!(p.w, w3());
        assert_eq!(p.escalation, 2);

        let p = auto_params(c(0, 0), c(0, 100), w3()).unwrap();
        assert_eq!((p.delta, p.k_succ, p.m_budget), (100, 10, 20));

        let p = auto_params(c(0, 0), c(0, 20), w3()).unwrap();
        assert_eq!((p.delta, p.k_succ, p.m_budget), (20, 10, 4));

        assert_eq!(
            auto_params(c(1, 1), c(1, 1), w3()),
            Err(RStarError::SameEndpoints(c(1, 1)))
        );
    }

    #[test]
    fn auto_params_always_validate() {
        for d in 1..400u32 {
            let p = auto_params(c(0, 0), c(d / 3, d), w3()).unwrap();
            assert_eq!(validate_params(&p), Ok(()), "d={d} {p:?}");
        }
    }

    #[test]
    fn goal_within_delta_uses_one_local_path() {
        let grid = Grid::empty(40, 40).unwrap();
        let (s, g) = (c(20, 5), c(23, 30));
        let params = RStarParams::new(300, 10, 60, w3());
        assert!(octile_dist(s, g) <= params.delta);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = rstar_plan(&grid, s, g, &params, &mut rng).unwrap();
        let direct = weighted_astar(&grid, s, g, w3(), SearchLimits::expansions(60)).unwrap();
        assert_eq!(r.path, direct.path);
        assert_eq!(r.stats.local_searches, 1);
        assert_eq!(r.stats.expansions, 1);
    }

    #[test]
    fn free_space_long_task() {
        let grid = Grid::empty(101, 101).unwrap();
        let (s, g) = (c(50, 0), c(50, 100));
        let params = auto_params(s, g, w3()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = rstar_plan(&grid, s, g, &params, &mut rng).unwrap();
        assert_eq!(r.outcome, Outcome::Found);
        let path = r.path.unwrap();
        grid.validate_path_between(&path, s, g).unwrap();
        assert!(r.stats.length >= 1000 && r.stats.length <= 3000);
        assert_eq!(r.stats.cells, r.stats.sparse_states + r.stats.local_cells);
    }

    #[test]
    fn detour_around_wall_triggers_avoid() {
        // wall with a single gap near the bottom
        let grid = Grid::from_fn(60, 60, |x| x.j == 30 && x.i < 55).unwrap();
        let (s, g) = (c(10, 5), c(10, 55));
        let params = RStarParams::new(100, 10, 10, w3());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (r, trace) = rstar_plan_traced(&grid, s, g, &params, &mut rng).unwrap();
        assert_eq!(r.outcome, Outcome::Found);
        grid.validate_path_between(r.path.as_ref().unwrap(), s, g)
            .unwrap();
        assert!(r.stats.failed_local > 0);
        assert!(trace.iter().any(|t| t.event == TraceEvent::Avoid));
        assert!(r.stats.length >= dijkstra_oracle(&grid, s, g).unwrap());
    }

    #[test]
    fn sealed_goal_exhausts_space() {
        let grid = Grid::from_fn(30, 30, |x| x.chebyshev(c(15, 25)) == 2).unwrap();
        let params = RStarParams::new(50, 5, 10, w3());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = rstar_plan(&grid, c(15, 2), c(15, 25), &params, &mut rng).unwrap();
        assert_eq!(r.outcome, Outcome::SpaceExhausted);
        assert!(r.path.is_none());
    }

    #[test]
    fn invalid_inputs_rejected_before_search() {
        let grid = Grid::from_fn(10, 10, |x| x == c(0, 0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bad = RStarParams::new(50, 2, 5, w3());
        assert!(matches!(
            rstar_plan(&grid, c(1, 1), c(8, 8), &bad, &mut rng),
            Err(RStarError::InvalidParams(_))
        ));
        let ok = RStarParams::new(50, 5, 5, w3());
        assert!(matches!(
            rstar_plan(&grid, c(0, 0), c(8, 8), &ok, &mut rng),
            Err(RStarError::Endpoint(GridError::Blocked(_)))
        ));
        assert!(matches!(
            rstar_plan(&grid, c(3, 3), c(3, 3), &ok, &mut rng),
            Err(RStarError::SameEndpoints(_))
        ));
    }

    fn solved(cell: Cell, pred: Option<StateId>, path: Option<Path>) -> SparseState {
        let mut st = SparseState::start(cell, cell);
        st.pred = pred;
        if path.is_some() {
            st.local_status = LocalStatus::Solved;
        }
        st.local_path = path;
        st
    }

    #[test]
    fn reconstruct_joins_at_junctions() {
        let a = c(0, 0);
        let b = c(0, 2);
        let d = c(1, 3);
        let states = vec![
            solved(a, None, None),
            solved(b, Some(0), Some(vec![a, c(0, 1), b])),
            solved(d, Some(1), Some(vec![b, d])),
        ];
        assert_eq!(reconstruct(&states, 1).unwrap(), vec![a, c(0, 1), b]);
        assert_eq!(reconstruct(&states, 2).unwrap(), vec![a, c(0, 1), b, d]);

        let mut broken = states.clone();
        broken[1].local_status = LocalStatus::Pending;
        assert!(matches!(
            reconstruct(&broken, 2),
            Err(RStarError::Inconsistent(_))
        ));
    }

    #[test]
    fn escalated_budget_is_capped_by_grid_size() {
        let grid = Grid::empty(10, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let planner = Planner {
            grid: &grid,
            goal: c(9, 9),
            params: RStarParams::new(30, 3, 7, w3()),
            rng: &mut rng,
            local: LocalPlanner::new(),
            states: Vec::new(),
            by_cell: HashMap::new(),
            open: OpenList::default(),
            stats: RStarStats::default(),
            trace: None,
        };
        assert_eq!(planner.local_budget(0), 7);
        assert_eq!(planner.local_budget(2), 28);
        assert_eq!(planner.local_budget(5), 100);
        assert_eq!(planner.local_budget(80), 100);
    }
}
