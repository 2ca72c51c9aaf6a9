//! Successor rings: midpoint-circle rasterization around a cell and random sampling from it.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::grid::{Cell, Cost, Grid, C_HV};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("ring radius must be at least 1 cell (got {0})")]
    ZeroRadius(u32),
}

/// Offsets `(di, dj)` of a rasterized circle, in canonical angular order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingOffsets {
    radius: u32,
    offsets: Vec<(i32, i32)>,
}

impl RingOffsets {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn offsets(&self) -> &[(i32, i32)] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// Ring radius in cells for a successor distance in cost units: `round(delta / C_HV)`, at least 1.
pub fn radius_for_delta(delta: Cost) -> u32 {
    let r = (delta + C_HV / 2) / C_HV;
    r.clamp(1, u32::MAX as Cost) as u32
}

/// Midpoint circle rasterization of radius `r`, first octant walked from the +j axis.
fn rasterize(r: u32) -> Vec<(i32, i32)> {
    let r = r as i32;
    let mut x = r;
    let mut y = 0;
    let mut err = 1 - r;
    let mut points = Vec::with_capacity(8 * r as usize + 8);
    while x >= y {
        for (a, b) in [(x, y), (y, x)] {
            points.extend([(a, b), (-a, b), (a, -b), (-a, -b)]);
        }
        y += 1;
        if err < 0 {
            err += 2 * y + 1;
        } else {
            x -= 1;
            err += 2 * (y - x) + 1;
        }
    }
    points
}

/// Angle of an offset measured counter-clockwise from the +j axis, rows growing downward.
fn angle(&(di, dj): &(i32, i32)) -> f64 {
    let a = (-(di as f64)).atan2(dj as f64);
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

fn build(r: u32) -> RingOffsets {
    let mut offsets = rasterize(r);
    offsets.sort_unstable();
    offsets.dedup();
    offsets.sort_by(|a, b| angle(a).total_cmp(&angle(b)).then(a.cmp(b)));
    RingOffsets { radius: r, offsets }
}

fn cache() -> &'static RwLock<HashMap<u32, Arc<RingOffsets>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<RingOffsets>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Deduplicated midpoint-circle offsets for radius `r`, memoized per radius.
pub fn enumerate_ring(r: u32) -> Result<Arc<RingOffsets>, RingError> {
    if r == 0 {
        return Err(RingError::ZeroRadius(r));
    }
    if let Some(ring) = cache().read().unwrap_or_else(|e| e.into_inner()).get(&r) {
        return Ok(Arc::clone(ring));
    }
    let ring = Arc::new(build(r));
    let mut guard = cache().write().unwrap_or_else(|e| e.into_inner());
    Ok(Arc::clone(guard.entry(r).or_insert(ring)))
}

/// In-bounds traversable cells on the ring around `center`, in canonical angular order.
pub fn ring_cells(grid: &Grid, center: Cell, r: u32) -> Result<Vec<Cell>, RingError> {
    let ring = enumerate_ring(r)?;
    Ok(ring
        .offsets()
        .iter()
        .filter_map(|&(di, dj)| center.offset(di, dj))
        .filter(|&c| grid.is_traversable(c))
        .collect())
}

/// Draws `min(k, |ring|)` distinct traversable ring cells at distance `delta` from `center`,
/// uniformly without replacement.
pub fn sample_successors<R: Rng + ?Sized>(
    grid: &Grid,
    center: Cell,
    delta: Cost,
    k: usize,
    rng: &mut R,
) -> Vec<Cell> {
    let r = radius_for_delta(delta);
    // radius_for_delta never returns 0
    let mut cells = ring_cells(grid, center, r).expect("radius is at least 1");
    if k >= cells.len() {
        return cells;
    }
    let (picked, _) = cells.partial_shuffle(rng, k);
    picked.to_vec()
}
