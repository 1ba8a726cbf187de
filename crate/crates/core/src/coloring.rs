//! Initial colorings.
//!
//! Both routines visit super-nodes in DSATUR order: highest saturation
//! (distinct colors among colored neighbours) first, then highest degree,
//! then smallest id. Classic DSATUR gives each vertex its smallest free
//! color; the nearest-centroid variant gives it the free cluster whose
//! centroid is closest.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use crate::constraints::SuperNodeGraph;
use crate::error::{Error, Result};
use crate::kempe::SwapSettings;
use crate::model::{Assignment, Centroids, Problem};
use crate::solver::shift::{ks_shift, Matching};

/// Distinct colors among the colored neighbours of `v`.
pub fn saturation_degree(g: &SuperNodeGraph, partial: &[Option<usize>], v: usize) -> usize {
    let mut seen: Vec<usize> = g.neighbors(v).iter().filter_map(|&w| partial[w]).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// DSATUR traversal; `choose(v, forbidden)` picks a color for `v` given the
/// sorted colors of its colored neighbours, or `None` to abort.
fn dsatur_order<F>(g: &SuperNodeGraph, mut choose: F) -> Option<Vec<usize>>
where
    F: FnMut(usize, &[usize]) -> Option<usize>,
{
    let m = g.len();
    let mut color: Vec<Option<usize>> = vec![None; m];
    let mut forbidden: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut queue: BTreeSet<(usize, usize, Reverse<usize>)> = (0..m).map(|v| (0, g.degree(v), Reverse(v))).collect();
    while let Some((_, _, Reverse(v))) = queue.pop_last() {
        let c = choose(v, &forbidden[v])?;
        color[v] = Some(c);
        for &w in g.neighbors(v) {
            if color[w].is_some() {
                continue;
            }
            if let Err(pos) = forbidden[w].binary_search(&c) {
                let key = (forbidden[w].len(), g.degree(w), Reverse(w));
                queue.remove(&key);
                forbidden[w].insert(pos, c);
                queue.insert((forbidden[w].len(), g.degree(w), Reverse(w)));
            }
        }
    }
    Some(color.into_iter().map(|c| c.expect("every vertex visited")).collect())
}

/// Classic DSATUR. Uses colors `0..c` where `c` is returned as the assignment's `k`.
pub fn dsatur_color(g: &SuperNodeGraph) -> Assignment {
    let colors = dsatur_order(g, |_, forbidden| {
        let mut c = 0;
        for &f in forbidden {
            if f == c {
                c += 1;
            } else if f > c {
                break;
            }
        }
        Some(c)
    })
    .expect("classic DSATUR never aborts");
    let k = colors.iter().max().map_or(1, |&c| c + 1);
    Assignment::new(colors, k).expect("colors below their max")
}

/// DSATUR order, each vertex to its nearest admissible centroid. `None` when
/// some vertex has every cluster blocked by its neighbours.
pub fn dsatur_nearest(problem: &Problem, mu: &Centroids) -> Option<Assignment> {
    let k = mu.k();
    let colors = dsatur_order(problem.graph(), |v, forbidden| {
        let mut best: Option<(usize, f64)> = None;
        for c in 0..k {
            if forbidden.binary_search(&c).is_ok() {
                continue;
            }
            let d = problem.node_cost(v, mu.get(c));
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((c, d));
            }
        }
        best.map(|(c, _)| c)
    })?;
    Some(Assignment::new(colors, k).expect("colors below k"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitRoute {
    /// Nearest-centroid DSATUR succeeded and was shifted toward the centroids.
    NearestCentroid,
    /// Nearest-centroid DSATUR got stuck; classic DSATUR fit within `k` colors.
    ClassicDsatur,
}

/// Initial feasible assignment for `k = mu.k()` clusters.
///
/// Fails with [`Error::Infeasible`] when neither DSATUR variant finds a
/// coloring with at most `k` colors.
pub fn dsatur_assignment(
    problem: &Problem,
    mu: &Centroids,
    alpha: f64,
    settings: &SwapSettings,
) -> Result<(Assignment, InitRoute)> {
    let k = mu.k();
    if let Some(u) = dsatur_nearest(problem, mu) {
        let shifted = ks_shift(problem, &u, mu, mu, alpha, Matching::Hungarian, settings);
        return Ok((shifted, InitRoute::NearestCentroid));
    }
    let classic = dsatur_color(problem.graph());
    if classic.k() <= k {
        let u = Assignment::new(classic.into_vec(), k)?;
        Ok((u, InitRoute::ClassicDsatur))
    } else {
        Err(Error::Infeasible { k })
    }
}
