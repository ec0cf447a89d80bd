//! Ranks of paths inside the tower over a vertex.
//!
//! Paths from the root to a vertex are ordered reverse lexicographically, the
//! last edge being most significant. That order is the order in which the
//! Vershik map visits them.

use crate::diagram::OrderedBratteliDiagram;
use crate::error::{Error, Result};
use crate::path::{Edge, PathPrefix};

/// Path counts from the root, one row per level.
#[derive(Clone, Debug)]
pub struct PathCounts {
    rows: Vec<Vec<u128>>,
}

impl PathCounts {
    pub fn new(d: &OrderedBratteliDiagram, depth: usize) -> Result<Self> {
        Ok(PathCounts {
            rows: d.path_counts(depth)?,
        })
    }

    pub fn get(&self, level: usize, v: usize) -> u128 {
        self.rows[level][v]
    }

    pub fn row(&self, level: usize) -> &[u128] {
        &self.rows[level]
    }

    pub fn depth(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn total(&self, level: usize) -> u128 {
        self.rows[level].iter().sum()
    }
}

/// Position of `p` among all paths to its terminal vertex.
pub fn tower_rank(d: &OrderedBratteliDiagram, counts: &PathCounts, p: &PathPrefix) -> Result<u128> {
    let mut rank: u128 = 0;
    for (i, e) in p.edges().iter().enumerate() {
        let level = d.level(i + 1)?;
        let below: u128 = level.fiber(e.range)[..e.rank].iter().map(|&s| counts.get(i, s)).sum();
        rank = rank.checked_add(below).ok_or(Error::CountOverflow(i + 1))?;
    }
    Ok(rank)
}

/// The path to `v ∈ V_n` with the given tower rank.
pub fn tower_unrank(
    d: &OrderedBratteliDiagram,
    counts: &PathCounts,
    n: usize,
    v: usize,
    rank: u128,
) -> Result<PathPrefix> {
    if rank >= counts.get(n, v) {
        return Err(Error::InvalidInput(format!(
            "rank {rank} exceeds the {} paths to vertex {v} at level {n}",
            counts.get(n, v)
        )));
    }
    let mut edges = vec![Edge { range: 0, rank: 0 }; n];
    let mut cur = v;
    let mut r = rank;
    for k in (1..=n).rev() {
        let fiber = d.level(k)?.fiber(cur);
        let mut chosen = None;
        for (j, &s) in fiber.iter().enumerate() {
            let c = counts.get(k - 1, s);
            if r < c {
                chosen = Some((j, s));
                break;
            }
            r -= c;
        }
        let (j, s) = chosen.expect("rank below the tower height");
        edges[k - 1] = Edge { range: cur, rank: j };
        cur = s;
    }
    Ok(PathPrefix::from_edges(edges))
}

/// All paths from `V_i` (starting anywhere) to `w ∈ V_j`, in tower order.
/// Each path lists the edges at levels `i+1..=j`.
pub fn paths_between(d: &OrderedBratteliDiagram, i: usize, j: usize, w: usize) -> Result<Vec<Vec<Edge>>> {
    if j == i {
        return Ok(vec![Vec::new()]);
    }
    let level = d.level(j)?;
    let mut out = Vec::new();
    for (rank, &s) in level.fiber(w).iter().enumerate() {
        for mut p in paths_between(d, i, j - 1, s)? {
            p.push(Edge { range: w, rank });
            out.push(p);
        }
    }
    Ok(out)
}

/// Vertex at level `i` where a path of edges at levels `i+1..=j` starts.
pub fn start_vertex(d: &OrderedBratteliDiagram, i: usize, edges: &[Edge]) -> Result<usize> {
    match edges.first() {
        None => Err(Error::InvalidInput("empty segment has no start".into())),
        Some(e) => Ok(d.level(i + 1)?.source(e.range, e.rank)),
    }
}
