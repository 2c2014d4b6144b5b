//! Tour construction heuristics. Both start from city 0.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::AtspInstance;

pub fn nearest_neighbour(a: &AtspInstance) -> Vec<usize> {
    let n = a.cities();
    if n == 0 {
        return Vec::new();
    }
    let mut visited = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    let mut current = 0;
    visited[0] = true;
    tour.push(0);
    for _ in 1..n {
        let mut best: Option<(usize, f64)> = None;
        for c in (0..n).filter(|&c| !visited[c]) {
            let d = a.weight(current, c);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((c, d));
            }
        }
        let (next, _) = best.expect("an unvisited city remains");
        visited[next] = true;
        tour.push(next);
        current = next;
    }
    tour
}

/// Selects the unvisited city farthest from the tour, measuring
/// `min over tour cities t of (d(t, c) + d(c, t)) / 2`, and inserts it where
/// the tour grows least.
pub fn furthest_insertion(a: &AtspInstance) -> Vec<usize> {
    let n = a.cities();
    if n == 0 {
        return Vec::new();
    }
    let sym = |i: usize, j: usize| (a.weight(i, j) + a.weight(j, i)) / 2.0;
    let mut in_tour = vec![false; n];
    in_tour[0] = true;
    let mut tour = vec![0];
    // Distance of each city to the current tour.
    let mut dist: Vec<f64> = (0..n).map(|c| sym(0, c)).collect();
    for _ in 1..n {
        let mut pick: Option<usize> = None;
        for c in (0..n).filter(|&c| !in_tour[c]) {
            if pick.is_none_or(|p| dist[c] > dist[p]) {
                pick = Some(c);
            }
        }
        let c = pick.expect("an unvisited city remains");
        let len = tour.len();
        let mut best_pos = 0;
        let mut best_inc = f64::INFINITY;
        for p in 0..len {
            let (u, v) = (tour[p], tour[(p + 1) % len]);
            let inc = a.weight(u, c) + a.weight(c, v) - a.weight(u, v);
            if inc < best_inc {
                best_inc = inc;
                best_pos = p;
            }
        }
        tour.insert(best_pos + 1, c);
        in_tour[c] = true;
        for o in (0..n).filter(|&o| !in_tour[o]) {
            dist[o] = dist[o].min(sym(c, o));
        }
    }
    tour
}
