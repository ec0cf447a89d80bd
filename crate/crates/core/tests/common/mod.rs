//! Brute-force oracles shared by the integration tests. Everything here works
//! by plain enumeration over the level data and never calls the library's
//! counting, ranking or stepping code.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use bratteli::diagram::{Extreme, OrderedBratteliDiagram};
use bratteli::generate::{random_diagram, random_premorphism, GenOptions};
use bratteli::path::{Edge, EventuallyPeriodicPath, PathPrefix};
use bratteli::premorphism::Premorphism;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Instances small enough for exhaustive enumeration at depth 6 or 7.
pub fn small_opts() -> GenOptions {
    GenOptions {
        max_width: 3,
        max_fiber: 3,
        max_preamble: 2,
        max_cycle: 3,
        max_extras: 2,
    }
}

pub fn random_instance(rng: &mut ChaCha8Rng, opts: &GenOptions) -> Premorphism {
    let b = random_diagram(rng, opts).unwrap();
    random_premorphism(rng, &b, opts).unwrap()
}

/// Every root path to level `n`, grouped by terminal vertex and sorted so the
/// last edge is most significant.
pub fn towers(d: &OrderedBratteliDiagram, n: usize) -> Vec<Vec<PathPrefix>> {
    let mut by_vertex: Vec<Vec<Vec<Edge>>> = vec![vec![Vec::new()]];
    for k in 1..=n {
        let level = d.level(k).unwrap();
        let mut next = vec![Vec::new(); level.width()];
        for (v, fiber) in level.fibers().iter().enumerate() {
            for (rank, &s) in fiber.iter().enumerate() {
                for p in &by_vertex[s] {
                    let mut q = p.clone();
                    q.push(Edge { range: v, rank });
                    next[v].push(q);
                }
            }
        }
        by_vertex = next;
    }
    by_vertex
        .into_iter()
        .map(|mut paths| {
            paths.sort_by_key(|p| p.iter().rev().map(|e| e.rank).collect::<Vec<_>>());
            paths.into_iter().map(PathPrefix::from_edges).collect()
        })
        .collect()
}

pub fn all_paths(d: &OrderedBratteliDiagram, n: usize) -> Vec<PathPrefix> {
    towers(d, n).into_iter().flatten().collect()
}

pub fn tower_counts(d: &OrderedBratteliDiagram, n: usize) -> Vec<u128> {
    towers(d, n).iter().map(|t| t.len() as u128).collect()
}

/// Next path in the tower of the same vertex, `None` at the top.
pub fn oracle_step(d: &OrderedBratteliDiagram, p: &PathPrefix) -> Option<PathPrefix> {
    let n = p.len();
    let tower = &towers(d, n)[p.vertex_at(n)];
    let i = tower.iter().position(|q| q == p).unwrap();
    tower.get(i + 1).cloned()
}

/// Position-in-tower lookup tables for one level.
pub struct TowerIndex {
    pub towers: Vec<Vec<PathPrefix>>,
    pos: HashMap<PathPrefix, usize>,
}

impl TowerIndex {
    pub fn new(d: &OrderedBratteliDiagram, n: usize) -> Self {
        let towers = towers(d, n);
        let pos = towers
            .iter()
            .flat_map(|t| t.iter().enumerate().map(|(i, p)| (p.clone(), i)))
            .collect();
        TowerIndex { towers, pos }
    }

    pub fn position(&self, p: &PathPrefix) -> usize {
        self.pos[p]
    }
}

/// The induced map at level `n` on all target prefixes of length `f_n`:
/// position `r` in the tower over `w` goes to position `r` in the
/// concatenation of the source towers listed by the fiber of `w`.
pub fn oracle_induced_table(f: &Premorphism, n: usize) -> HashMap<PathPrefix, PathPrefix> {
    let c = TowerIndex::new(f.target(), f.f(n));
    let b = towers(f.source(), n);
    let layer = f.layer(n).unwrap();
    let mut out = HashMap::new();
    for (w, tower) in c.towers.iter().enumerate() {
        let concat: Vec<&PathPrefix> = layer.fiber(w).iter().flat_map(|&v| b[v].iter()).collect();
        assert_eq!(concat.len(), tower.len(), "tower heights differ over {w} at level {n}");
        for (r, p) in tower.iter().enumerate() {
            out.insert(p.clone(), concat[r].clone());
        }
    }
    out
}

/// Number of infinite extreme paths, from how many vertices at one cycle
/// level sit below arbitrarily long extreme chains.
pub fn oracle_extreme_count(d: &OrderedBratteliDiagram, kind: Extreme) -> usize {
    let (p, c) = (d.preamble_len(), d.period());
    let base = p + c;
    let w = (base..=base + c).map(|n| d.width(n).unwrap()).max().unwrap();
    let top = base + c * (w + 2);
    let mut hits = BTreeSet::new();
    for v in 0..d.width(top).unwrap() {
        let mut cur = v;
        for n in (base + 1..=top).rev() {
            let fiber = d.level(n).unwrap().fiber(cur);
            cur = fiber[match kind {
                Extreme::Min => 0,
                Extreme::Max => fiber.len() - 1,
            }];
        }
        hits.insert(cur);
    }
    hits.len()
}

/// A random eventually periodic path: after the preamble the edge choice is a
/// fixed random function of the cycle position and current vertex.
pub fn random_path<R: Rng>(rng: &mut R, d: &OrderedBratteliDiagram) -> EventuallyPeriodicPath {
    let (p, c) = (d.preamble_len(), d.period());
    let outgoing = |n: usize, s: usize| -> Vec<Edge> {
        let level = d.level(n).unwrap();
        let mut out = Vec::new();
        for (v, fiber) in level.fibers().iter().enumerate() {
            for (rank, &src) in fiber.iter().enumerate() {
                if src == s {
                    out.push(Edge { range: v, rank });
                }
            }
        }
        out
    };
    let mut choice: HashMap<(usize, usize), Edge> = HashMap::new();
    let mut edges = Vec::new();
    let mut cur = 0;
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut n = 0;
    loop {
        if n >= p && (n - p) % c == 0 {
            if let Some(&start) = seen.get(&cur) {
                let prefix = PathPrefix::from_edges(edges[..start].to_vec());
                let period = edges[start..].to_vec();
                return EventuallyPeriodicPath::new(d, prefix, period).unwrap();
            }
            seen.insert(cur, n);
        }
        let e = if n < p {
            *outgoing(n + 1, cur).choose(rng).unwrap()
        } else {
            let key = ((n - p) % c, cur);
            match choice.get(&key) {
                Some(&e) => e,
                None => {
                    let e = *outgoing(n + 1, cur).choose(rng).unwrap();
                    choice.insert(key, e);
                    e
                }
            }
        };
        edges.push(e);
        cur = e.range;
        n += 1;
    }
}

/// Whether any two vertices of one cycle level connect through some number of
/// whole cycles, by breadth-first reachability.
pub fn oracle_simple(d: &OrderedBratteliDiagram) -> bool {
    let (p, c) = (d.preamble_len(), d.period());
    let w = d.width(p).unwrap();
    let step = |from: &BTreeSet<usize>| -> BTreeSet<usize> {
        let mut cur = from.clone();
        for n in p + 1..=p + c {
            let level = d.level(n).unwrap();
            cur = (0..level.width())
                .filter(|&v| level.fiber(v).iter().any(|s| cur.contains(s)))
                .collect();
        }
        cur
    };
    // Simple iff the cycle matrix is primitive: some power reaches everything
    // from every vertex. Powers up to w^2 suffice.
    let mut sets: Vec<BTreeSet<usize>> = (0..w).map(|v| BTreeSet::from([v])).collect();
    for _ in 0..w * w + 1 {
        sets = sets.iter().map(step).collect();
        if sets.iter().all(|s| s.len() == w) {
            return true;
        }
    }
    false
}

/// Rotates one non-constant fiber of a random layer `F_n` with `n ≥ 1` inside
/// the stored preamble and cycle. Returns the mutated premorphism and `n`.
pub fn mutate<R: Rng>(rng: &mut R, f: &Premorphism) -> Option<(Premorphism, usize)> {
    let stored = f.layers_preamble().len() + f.layers_cycle().len();
    let mut spots = Vec::new();
    for n in 1..stored {
        for (w, fiber) in f.layer(n).unwrap().fibers().iter().enumerate() {
            if fiber.iter().any(|&s| s != fiber[0]) {
                spots.push((n, w));
            }
        }
    }
    let &(n, w) = spots.choose(rng)?;
    let mut g = f.clone();
    g.layer_mut(n).unwrap().fibers_mut()[w].rotate_left(1);
    Some((g, n))
}

/// Whether `level` is a copy of `n` or `n + 1` under the periodicity of the
/// stored layers.
pub fn near_mutation(f: &Premorphism, n: usize, level: usize) -> bool {
    let p = f.layers_preamble().len();
    let c = f.layers_cycle().len();
    [n, n + 1].iter().any(|&m| {
        if m < p || level < p {
            level == m
        } else {
            (level - p) % c == (m - p) % c
        }
    })
}
