//! Diameter of `dr^2 + f(r)^2 g_{S^k}` on an interval.
//!
//! Two points at radii `r1`, `r2` and fiber angle `theta` are joined by a
//! minimizing geodesic inside the totally geodesic surface
//! `dr^2 + f^2 dtheta^2`, and reflections fold any path into
//! `theta in [0, pi]`. So the diameter is computed on that strip: grid
//! nodes, edges along a coprime stencil with Simpson lengths, Dijkstra from
//! every `theta = 0` node.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use super::{param, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphResolution {
    pub r_points: usize,
    pub theta_points: usize,
    /// Largest step of an edge in grid units.
    pub stencil: usize,
}

impl Default for GraphResolution {
    fn default() -> Self {
        GraphResolution {
            r_points: 61,
            theta_points: 61,
            stencil: 5,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn stencil(k: usize) -> Vec<(i64, i64)> {
    let k = k as i64;
    let mut out = Vec::new();
    for di in -k..=k {
        for dj in -k..=k {
            if (di, dj) != (0, 0)
                && gcd(di.unsigned_abs() as usize, dj.unsigned_abs() as usize) == 1
            {
                out.push((di, dj));
            }
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct Graph {
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    fn shortest_from(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.adjacency.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Reverse((Dist(0.0), source)));
        while let Some(Reverse((Dist(d), v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, len) in &self.adjacency[v] {
                let nd = d + len;
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Reverse((Dist(nd), w)));
                }
            }
        }
        dist
    }
}

/// Estimated intrinsic diameter; `f` must be positive inside `interval`
/// and may vanish at the ends (closing points).
pub fn rotational_diameter<F>(
    f: F,
    interval: (f64, f64),
    n_fiber: usize,
    res: GraphResolution,
) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return param(format!("degenerate interval [{lo}, {hi}]"));
    }
    if n_fiber == 0 {
        return param("the fiber sphere must have dimension at least 1".into());
    }
    if res.r_points < 2 || res.theta_points < 2 || res.stencil == 0 {
        return param(format!("resolution {res:?} too coarse"));
    }
    let (nr, nt) = (res.r_points, res.theta_points);
    let dr = (hi - lo) / (nr - 1) as f64;
    let dt = std::f64::consts::PI / (nt - 1) as f64;
    let radius = |i: f64| lo + i * dr;

    let mut fv = Vec::with_capacity(2 * nr - 1);
    for h in 0..(2 * nr - 1) {
        let v = f(radius(h as f64 / 2.0));
        let interior = h > 0 && h < 2 * nr - 2;
        // Rounding at a closing end may give a tiny negative value.
        let v = if interior || v < -1e-12 {
            v
        } else {
            v.max(0.0)
        };
        if !v.is_finite() || v < 0.0 || (interior && v == 0.0) {
            return param(format!(
                "f = {v} at r = {} is not positive",
                radius(h as f64 / 2.0)
            ));
        }
        fv.push(v);
    }
    // Half-grid samples cover midpoints of even steps; odd steps call f.
    let edge_length = |i: usize, di: i64, dj: i64| {
        let r0 = radius(i as f64);
        let (a, b) = (di as f64 * dr, dj as f64 * dt);
        let speed = |fr: f64| (a * a + fr * fr * b * b).sqrt();
        let mid = if di % 2 == 0 {
            fv[(2 * i as i64 + di) as usize]
        } else {
            f(r0 + 0.5 * a)
        };
        let end = fv[(2 * (i as i64 + di)) as usize];
        (speed(fv[2 * i]) + 4.0 * speed(mid) + speed(end)) / 6.0
    };

    let offsets = stencil(res.stencil);
    let node = |i: usize, j: usize| i * nt + j;
    let adjacency: Vec<Vec<(usize, f64)>> = (0..nr * nt)
        .into_par_iter()
        .map(|v| {
            let (i, j) = (v / nt, v % nt);
            offsets
                .iter()
                .filter_map(|&(di, dj)| {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= nr as i64 || jj >= nt as i64 {
                        return None;
                    }
                    Some((node(ii as usize, jj as usize), edge_length(i, di, dj)))
                })
                .collect()
        })
        .collect();
    let graph = Graph { adjacency };

    let diameter = (0..nr)
        .into_par_iter()
        .map(|i| {
            graph
                .shortest_from(node(i, 0))
                .into_iter()
                .fold(0.0_f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(diameter)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrendPoint {
    pub k: usize,
    pub diameter: f64,
}

/// Diameters of a user-supplied family `k -> (f_k, interval_k)`.
pub fn diameter_trend<Fam, F>(
    family: Fam,
    ks: &[usize],
    n_fiber: usize,
    res: GraphResolution,
) -> Result<Vec<TrendPoint>>
where
    Fam: Fn(usize) -> (F, (f64, f64)),
    F: Fn(f64) -> f64 + Sync,
{
    ks.iter()
        .map(|&k| {
            let (f, interval) = family(k);
            Ok(TrendPoint {
                k,
                diameter: rotational_diameter(f, interval, n_fiber, res)?,
            })
        })
        .collect()
}
