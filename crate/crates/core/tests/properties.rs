use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rstar_core::ring::radius_for_delta;
use rstar_core::{
    astar, dijkstra_oracle, load_map, octile_dist, path_length, reachable, ring_cells, rstar_plan,
    sample_successors, save_map, weighted_astar, Cell, CornerRule, Grid, Outcome, RStarParams,
    SearchLimits, Weight,
};

/// Random grid with two distinct free cells.
fn task(max_side: u32) -> impl Strategy<Value = (Grid, Cell, Cell)> {
    (
        3..=max_side,
        3..=max_side,
        0.0..0.45f64,
        any::<u64>(),
        0..3u8,
    )
        .prop_filter_map(
            "needs two free cells",
            |(rows, cols, density, seed, rule)| {
                let mut x = seed | 1;
                let mut next = move || {
                    x ^= x << 13;
                    x ^= x >> 7;
                    x ^= x << 17;
                    x
                };
                let rule = [
                    CornerRule::NoCut,
                    CornerRule::CutOneCorner,
                    CornerRule::CutAll,
                ][rule as usize];
                let blocked = (0..rows * cols)
                    .map(|_| (next() % 10_000) as f64 / 10_000.0 < density)
                    .collect();
                let grid = Grid::from_blocked(rows, cols, blocked)
                    .ok()?
                    .with_corner_rule(rule);
                let free: Vec<Cell> = (0..grid.len())
                    .map(|k| grid.cell_at(k))
                    .filter(|&c| grid.is_traversable(c))
                    .collect();
                if free.len() < 2 {
                    return None;
                }
                let s = free[(next() % free.len() as u64) as usize];
                let g = free[(next() % free.len() as u64) as usize];
                (s != g).then_some((grid, s, g))
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn astar_paths_are_admissible_and_optimal((grid, s, g) in task(24)) {
        let r = astar(&grid, s, g).unwrap();
        match dijkstra_oracle(&grid, s, g) {
            Some(d) => {
                let path = r.path.expect("solvable");
                prop_assert!(grid.validate_path_between(&path, s, g).is_ok());
                let len = path_length(&path).unwrap();
                prop_assert!(len >= octile_dist(s, g));
                prop_assert_eq!(len, d);
            }
            None => prop_assert_eq!(r.outcome, Outcome::SpaceExhausted),
        }
    }

    #[test]
    fn wastar_respects_the_weight_bound((grid, s, g) in task(24), w in 1.0..5.0f64) {
        let w = Weight::new(w).unwrap();
        let r = weighted_astar(&grid, s, g, w, SearchLimits::UNLIMITED).unwrap();
        if let Some(d) = dijkstra_oracle(&grid, s, g) {
            let len = r.length().expect("solvable");
            prop_assert!(grid.validate_path_between(r.path.as_ref().unwrap(), s, g).is_ok());
            prop_assert!(len as f64 <= w.as_f64() * d as f64 + 1e-9, "{} > {} * {}", len, w.as_f64(), d);
        }
        prop_assert!(r.stats.cells >= r.stats.closed_size_final);
        prop_assert!(r.stats.expansions <= r.stats.closed_size_final);
    }

    #[test]
    fn neighbors_are_symmetric_single_steps((grid, s, _g) in task(16)) {
        let ns = grid.neighbors8(s).unwrap();
        prop_assert!(ns.len() <= 8);
        let distinct: BTreeSet<_> = ns.iter().collect();
        prop_assert_eq!(distinct.len(), ns.len());
        for n in ns {
            prop_assert!(grid.is_traversable(n));
            prop_assert_eq!(s.chebyshev(n), 1);
            prop_assert!(grid.neighbors8(n).unwrap().contains(&s));
        }
    }

    #[test]
    fn maps_survive_a_save_load_round_trip((grid, _s, _g) in task(30)) {
        let grid = grid.with_corner_rule(CornerRule::NoCut);
        let text = save_map(&grid);
        prop_assert_eq!(load_map(&text).unwrap(), grid);
    }

    #[test]
    fn sampled_successors_are_distinct_ring_cells(
        (grid, s, _g) in task(40),
        delta in 10..120u64,
        k in 1..40usize,
        seed in any::<u64>(),
    ) {
        let ring = ring_cells(&grid, s, radius_for_delta(delta)).unwrap();
        let picked = sample_successors(&grid, s, delta, k, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(picked.len(), k.min(ring.len()));
        let distinct: BTreeSet<_> = picked.iter().collect();
        prop_assert_eq!(distinct.len(), picked.len());
        prop_assert!(picked.iter().all(|c| ring.contains(c)));
        let again = sample_successors(&grid, s, delta, k, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(picked, again);
    }

    #[test]
    fn a_larger_budget_returns_the_same_path(
        (grid, s, g) in task(24),
        w in 1.0..4.0f64,
        extra in 0..500u64,
    ) {
        let w = Weight::new(w).unwrap();
        let full = weighted_astar(&grid, s, g, w, SearchLimits::UNLIMITED).unwrap();
        prop_assume!(full.outcome == Outcome::Found);
        // the goal pop is not an expansion, so the unlimited run's count is the tight budget
        let tight = full.stats.expansions;
        let at = weighted_astar(&grid, s, g, w, SearchLimits::expansions(tight.max(1))).unwrap();
        let above = weighted_astar(&grid, s, g, w, SearchLimits::expansions(tight + extra)).unwrap();
        prop_assert_eq!(&at.path, &full.path);
        prop_assert_eq!(&above.path, &full.path);
        if tight > 1 {
            let below = weighted_astar(&grid, s, g, w, SearchLimits::expansions(tight - 1)).unwrap();
            prop_assert_eq!(below.outcome, Outcome::BudgetExhausted);
        }
    }

    #[test]
    fn rstar_results_are_consistent(
        (grid, s, g) in task(40),
        delta_cells in 1..8u64,
        k in 3..12u32,
        seed in any::<u64>(),
    ) {
        let delta = 10 * delta_cells;
        let k = k.min(rstar_core::rstar::max_successors(delta));
        let m = radius_for_delta(delta) as u64;
        let w = Weight::new(3.0).unwrap();
        let params = RStarParams::new(delta, k, m, w);
        let r = rstar_plan(&grid, s, g, &params, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();

        prop_assert_eq!(r.stats.cells, r.stats.sparse_states + r.stats.local_cells);
        prop_assert!(r.stats.failed_local <= r.stats.local_searches);
        prop_assert!(r.stats.cells >= r.stats.sparse_states);
        prop_assert_eq!(r.outcome == Outcome::Found, reachable(&grid, s, g));

        if let Some(path) = &r.path {
            prop_assert!(grid.validate_path_between(path, s, g).is_ok());
            prop_assert!(r.stats.length >= octile_dist(s, g));
            let mut total = 0;
            for seg in &r.segments {
                let (a, b) = (seg[0], *seg.last().unwrap());
                let len = path_length(seg).unwrap();
                let best = dijkstra_oracle(&grid, a, b).expect("segment endpoints connect");
                prop_assert!(len <= 3 * best, "segment {:?}->{:?}: {} > 3 * {}", a, b, len, best);
                total += len;
            }
            prop_assert_eq!(total, r.stats.length);
        } else {
            prop_assert!(r.segments.is_empty());
        }
    }
}
