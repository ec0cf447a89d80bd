//! Eventually periodic ordered Bratteli diagrams.
//!
//! A diagram is stored as a root vertex, a finite preamble of levels and a
//! cycle of levels repeated forever. Inside a level every vertex owns its
//! range fiber: `fibers[v][rank]` is the index of the source vertex in the
//! previous level, rank 0 being the minimal edge.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{Edge, EventuallyPeriodicPath, PathPrefix};
use crate::report::ValidationReport;

pub const DEFAULT_ROOT: &str = "v0";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub source: String,
    pub range: String,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
}

/// Raw serialized form of a diagram, before validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
    pub preamble: Vec<LevelSpec>,
    pub cycle: Vec<LevelSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extreme {
    Max,
    Min,
}

impl Extreme {
    /// Rank of the extreme edge in a fiber of the given size.
    pub fn rank(self, fiber_len: usize) -> usize {
        match self {
            Extreme::Max => fiber_len - 1,
            Extreme::Min => 0,
        }
    }

    pub fn opposite(self) -> Extreme {
        match self {
            Extreme::Max => Extreme::Min,
            Extreme::Min => Extreme::Max,
        }
    }
}

/// One edge level between `V_{n-1}` and `V_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Level {
    vertices: Vec<String>,
    fibers: Vec<Vec<usize>>,
}

impl Level {
    /// Builds a level without checking it against its neighbours.
    pub fn new(vertices: Vec<String>, fibers: Vec<Vec<usize>>) -> Self {
        assert_eq!(vertices.len(), fibers.len(), "one fiber per vertex");
        Level { vertices, fibers }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    pub fn fiber(&self, v: usize) -> &[usize] {
        &self.fibers[v]
    }

    pub fn width(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.fibers.iter().map(Vec::len).sum()
    }

    pub fn source(&self, range: usize, rank: usize) -> usize {
        self.fibers[range][rank]
    }

    pub fn is_extreme(&self, range: usize, rank: usize, kind: Extreme) -> bool {
        rank == kind.rank(self.fibers[range].len())
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn to_spec(&self, sources: &[String]) -> LevelSpec {
        let mut edges = Vec::with_capacity(self.edge_count());
        for (v, fiber) in self.fibers.iter().enumerate() {
            for (rank, &s) in fiber.iter().enumerate() {
                edges.push(EdgeSpec {
                    source: sources[s].clone(),
                    range: self.vertices[v].clone(),
                    rank,
                });
            }
        }
        LevelSpec {
            vertices: self.vertices.clone(),
            edges,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderedBratteliDiagram {
    root: Vec<String>,
    preamble: Vec<Level>,
    cycle: Vec<Level>,
}

/// `rows[i][j]` counts edges from `V_{n-1}[j]` to `V_n[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    pub rows: Vec<Vec<u128>>,
}

impl AdjacencyMatrix {
    /// Matrix product `self · other`, so that `M_2 · M_1` maps `V_0` counts to `V_2`.
    pub fn mul(&self, other: &AdjacencyMatrix) -> AdjacencyMatrix {
        let inner = other.rows.len();
        let cols = other.rows.first().map_or(0, Vec::len);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                assert_eq!(row.len(), inner, "dimension mismatch");
                (0..cols)
                    .map(|j| (0..inner).map(|k| row[k] * other.rows[k][j]).sum())
                    .collect()
            })
            .collect();
        AdjacencyMatrix { rows }
    }

    pub fn is_positive(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&x| x > 0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremeSet {
    pub kind: Extreme,
    pub count: usize,
    pub witnesses: Vec<EventuallyPeriodicPath>,
}

pub fn validate_diagram(spec: &DiagramSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let root = spec.root.clone().unwrap_or_else(|| DEFAULT_ROOT.to_string());
    let levels: Vec<&LevelSpec> = spec.preamble.iter().chain(spec.cycle.iter()).collect();
    if levels.is_empty() {
        report.push(0, "diagram", "no levels");
        return report;
    }
    let mut prev: Vec<String> = vec![root];
    let last = levels.len();
    for (i, level) in levels.iter().enumerate() {
        let n = i + 1;
        check_level(&mut report, n, &prev, level);
        prev = level.vertices.clone();
    }
    if !spec.cycle.is_empty() {
        let boundary: Vec<String> = match spec.preamble.last() {
            Some(l) => l.vertices.clone(),
            None => vec![spec.root.clone().unwrap_or_else(|| DEFAULT_ROOT.to_string())],
        };
        let end = &spec.cycle.last().unwrap().vertices;
        if *end != boundary {
            report.push(
                last,
                "cycle",
                format!(
                    "last cycle level has vertices {:?} but the cycle starts from {:?}",
                    end, boundary
                ),
            );
        }
    }
    report
}

fn check_level(
    report: &mut ValidationReport,
    n: usize,
    prev: &[String],
    level: &LevelSpec,
) {
    if level.vertices.is_empty() {
        report.push(n, "level", "no vertices");
    }
    let mut seen = HashSet::new();
    for v in &level.vertices {
        if !seen.insert(v.as_str()) {
            report.push(n, format!("vertex {v}"), "duplicate vertex name");
        }
    }
    let mut fibers: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut used_sources = HashSet::new();
    for e in &level.edges {
        let mut ok = true;
        if !prev.contains(&e.source) {
            report.push(
                n,
                format!("edge {}->{} rank {}", e.source, e.range, e.rank),
                "source is not a vertex of the previous level",
            );
            ok = false;
        }
        if !level.vertices.contains(&e.range) {
            report.push(
                n,
                format!("edge {}->{} rank {}", e.source, e.range, e.rank),
                "range is not a vertex of this level",
            );
            ok = false;
        }
        if ok {
            used_sources.insert(e.source.as_str());
            fibers.entry(e.range.as_str()).or_default().push(e.rank);
        }
    }
    for v in &level.vertices {
        match fibers.get(v.as_str()) {
            None => report.push(n, format!("vertex {v}"), "no incoming edge"),
            Some(ranks) => {
                let mut sorted = ranks.clone();
                sorted.sort_unstable();
                if sorted.iter().enumerate().any(|(i, &r)| i != r) {
                    report.push(
                        n,
                        format!("fiber of {v}"),
                        format!("ranks {sorted:?} are not exactly 0..{}", sorted.len()),
                    );
                }
            }
        }
    }
    for s in prev {
        if !used_sources.contains(s.as_str()) {
            report.push(n, format!("vertex {s}"), "no outgoing edge into this level");
        }
    }
}

fn level_from_spec(prev: &[String], spec: &LevelSpec) -> Level {
    let mut fibers: Vec<Vec<(usize, usize)>> = vec![Vec::new(); spec.vertices.len()];
    for e in &spec.edges {
        let s = prev.iter().position(|p| *p == e.source).expect("validated");
        let r = spec.vertices.iter().position(|v| *v == e.range).expect("validated");
        fibers[r].push((e.rank, s));
    }
    let fibers = fibers
        .into_iter()
        .map(|mut f| {
            f.sort_unstable();
            f.into_iter().map(|(_, s)| s).collect()
        })
        .collect();
    Level::new(spec.vertices.clone(), fibers)
}

impl OrderedBratteliDiagram {
    pub fn from_spec(spec: &DiagramSpec) -> Result<Self> {
        validate_diagram(spec).into_result()?;
        let root = vec![spec.root.clone().unwrap_or_else(|| DEFAULT_ROOT.to_string())];
        let mut prev = root.clone();
        let mut build = |levels: &[LevelSpec]| {
            levels
                .iter()
                .map(|l| {
                    let level = level_from_spec(&prev, l);
                    prev = l.vertices.clone();
                    level
                })
                .collect::<Vec<_>>()
        };
        let preamble = build(&spec.preamble);
        let cycle = build(&spec.cycle);
        Ok(OrderedBratteliDiagram {
            root,
            preamble,
            cycle,
        })
    }

    /// Builds and validates a diagram from index-based levels.
    pub fn new(root: &str, preamble: Vec<Level>, cycle: Vec<Level>) -> Result<Self> {
        let d = OrderedBratteliDiagram {
            root: vec![root.to_string()],
            preamble,
            cycle,
        };
        // Index-based levels may reference sources out of range; the spec
        // round trip would panic on those, so check indices first.
        let mut prev_width = 1;
        for (i, l) in d.preamble.iter().chain(d.cycle.iter()).enumerate() {
            for fiber in &l.fibers {
                if fiber.iter().any(|&s| s >= prev_width) {
                    let mut r = ValidationReport::default();
                    r.push(i + 1, "level", "source index out of range");
                    return Err(Error::Validation(r));
                }
            }
            prev_width = l.width();
        }
        validate_diagram(&d.to_spec()).into_result()?;
        Ok(d)
    }

    pub fn to_spec(&self) -> DiagramSpec {
        let mut prev = self.root.clone();
        let mut conv = |levels: &[Level]| {
            levels
                .iter()
                .map(|l| {
                    let s = l.to_spec(&prev);
                    prev = l.vertices.clone();
                    s
                })
                .collect::<Vec<_>>()
        };
        let preamble = conv(&self.preamble);
        let cycle = conv(&self.cycle);
        DiagramSpec {
            root: if self.root[0] == DEFAULT_ROOT {
                None
            } else {
                Some(self.root[0].clone())
            },
            preamble,
            cycle,
        }
    }

    pub fn root(&self) -> &str {
        &self.root[0]
    }

    pub fn preamble_len(&self) -> usize {
        self.preamble.len()
    }

    /// Cycle length; zero for a finite diagram.
    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_finite(&self) -> bool {
        self.cycle.is_empty()
    }

    pub fn preamble_levels(&self) -> &[Level] {
        &self.preamble
    }

    pub fn cycle_levels(&self) -> &[Level] {
        &self.cycle
    }

    /// Number of levels a finite diagram has; `usize::MAX` for periodic ones.
    pub fn available_depth(&self) -> usize {
        if self.is_finite() {
            self.preamble.len()
        } else {
            usize::MAX
        }
    }

    pub fn require_depth(&self, n: usize) -> Result<()> {
        if n > self.available_depth() {
            Err(Error::FiniteDiagramExhausted {
                level: n,
                available: self.preamble.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn require_periodic(&self) -> Result<()> {
        if self.is_finite() {
            Err(Error::FiniteDiagramExhausted {
                level: self.preamble.len() + 1,
                available: self.preamble.len(),
            })
        } else {
            Ok(())
        }
    }

    /// The smallest level index carrying the same data as level `n`.
    /// Levels `0..=preamble_len` map to themselves.
    pub fn canonical_level(&self, n: usize) -> usize {
        let p = self.preamble.len();
        if n <= p || self.cycle.is_empty() {
            n
        } else {
            p + 1 + (n - p - 1) % self.cycle.len()
        }
    }

    /// Edge level `n ≥ 1`.
    pub fn level(&self, n: usize) -> Result<&Level> {
        assert!(n >= 1, "edge levels start at 1");
        self.require_depth(n)?;
        let p = self.preamble.len();
        if n <= p {
            Ok(&self.preamble[n - 1])
        } else {
            Ok(&self.cycle[(n - p - 1) % self.cycle.len()])
        }
    }

    pub fn vertices(&self, n: usize) -> Result<&[String]> {
        if n == 0 {
            Ok(&self.root)
        } else {
            Ok(self.level(n)?.vertices())
        }
    }

    pub fn width(&self, n: usize) -> Result<usize> {
        Ok(self.vertices(n)?.len())
    }

    pub fn unroll(&self, n: usize) -> Result<Vec<LevelSpec>> {
        self.require_depth(n)?;
        let mut out = Vec::with_capacity(n);
        for k in 1..=n {
            out.push(self.level(k)?.to_spec(self.vertices(k - 1)?));
        }
        Ok(out)
    }

    /// Path counts from the root: entry `[n][v]` counts paths to `v ∈ V_n`.
    pub fn path_counts(&self, depth: usize) -> Result<Vec<Vec<u128>>> {
        self.require_depth(depth)?;
        let mut counts = vec![vec![1u128]];
        for n in 1..=depth {
            let level = self.level(n)?;
            let prev = &counts[n - 1];
            let mut row = Vec::with_capacity(level.width());
            for fiber in level.fibers() {
                let mut total: u128 = 0;
                for &s in fiber {
                    total = total.checked_add(prev[s]).ok_or(Error::CountOverflow(n))?;
                }
                row.push(total);
            }
            counts.push(row);
        }
        Ok(counts)
    }

    pub fn adjacency_matrix(&self, n: usize) -> Result<AdjacencyMatrix> {
        let level = self.level(n)?;
        let cols = self.width(n - 1)?;
        let rows = level
            .fibers()
            .iter()
            .map(|fiber| {
                let mut row = vec![0u128; cols];
                for &s in fiber {
                    row[s] += 1;
                }
                row
            })
            .collect();
        Ok(AdjacencyMatrix { rows })
    }

    /// Product `M_j ⋯ M_{i+1}`: entry `[a][b]` counts paths from `V_i[b]` to `V_j[a]`.
    pub fn window_matrix(&self, i: usize, j: usize) -> Result<AdjacencyMatrix> {
        assert!(i < j, "window needs i < j");
        let mut acc = self.adjacency_matrix(i + 1)?;
        for n in i + 2..=j {
            acc = self.adjacency_matrix(n)?.mul(&acc);
        }
        Ok(acc)
    }

    pub fn is_simple_window(&self, i: usize, j: usize) -> Result<bool> {
        self.require_depth(j)?;
        // Boolean reachability avoids overflow on long windows.
        let wi = self.width(i)?;
        let mut reach: Vec<Vec<bool>> = (0..wi).map(|b| (0..wi).map(|x| x == b).collect()).collect();
        for n in i + 1..=j {
            let level = self.level(n)?;
            reach = reach
                .iter()
                .map(|r| level.fibers().iter().map(|f| f.iter().any(|&s| r[s])).collect())
                .collect();
        }
        Ok(reach.iter().all(|r| r.iter().all(|&x| x)))
    }

    /// Whether the periodic diagram is simple: some power of the one-cycle
    /// boundary matrix is strictly positive.
    pub fn is_simple(&self) -> Result<bool> {
        self.require_periodic()?;
        let p = self.preamble.len();
        let c = self.cycle.len();
        let w = self.width(p)?;
        let bound = (w - 1) * (w - 1) + 1;
        // reach[b][a]: a at boundary level p + k c is reachable from b at level p.
        let mut reach: Vec<Vec<bool>> = (0..w).map(|b| (0..w).map(|x| x == b).collect()).collect();
        for _ in 0..bound.max(1) {
            for n in p + 1..=p + c {
                let level = self.level(n)?;
                reach = reach
                    .iter()
                    .map(|r| level.fibers().iter().map(|f| f.iter().any(|&s| r[s])).collect())
                    .collect();
            }
            if reach.iter().all(|r| r.iter().all(|&x| x)) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn extreme_successor_map(&self, n: usize, kind: Extreme) -> Result<Vec<usize>> {
        let level = self.level(n)?;
        Ok(level
            .fibers()
            .iter()
            .map(|f| f[kind.rank(f.len())])
            .collect())
    }

    /// Extreme edges from the root down to `v ∈ V_n`, the unique all-extreme prefix ending at `v`.
    pub fn extreme_prefix_to(&self, n: usize, v: usize, kind: Extreme) -> Result<PathPrefix> {
        let mut edges = vec![Edge { range: 0, rank: 0 }; n];
        let mut cur = v;
        for k in (1..=n).rev() {
            let level = self.level(k)?;
            let rank = kind.rank(level.fiber(cur).len());
            edges[k - 1] = Edge { range: cur, rank };
            cur = level.source(cur, rank);
        }
        Ok(PathPrefix::from_edges(edges))
    }

    /// Exact count of infinite extreme paths with one witness per path.
    pub fn count_extreme_paths(&self, kind: Extreme) -> Result<ExtremeSet> {
        self.require_periodic()?;
        let p = self.preamble.len();
        let c = self.cycle.len();
        let w = self.width(p)?;
        let maps: Vec<Vec<usize>> = (p + 1..=p + c)
            .map(|n| self.extreme_successor_map(n, kind))
            .collect::<Result<_>>()?;
        // phi sends a boundary vertex at level p + c back to level p.
        let phi: Vec<usize> = (0..w)
            .map(|u| maps.iter().rev().fold(u, |cur, m| m[cur]))
            .collect();
        let mut image: Vec<bool> = vec![true; w];
        loop {
            let mut next = vec![false; w];
            for u in 0..w {
                if image[u] {
                    next[phi[u]] = true;
                }
            }
            if next == image {
                break;
            }
            image = next;
        }
        let mut witnesses = Vec::new();
        for u in 0..w {
            if !image[u] {
                continue;
            }
            // Orbit of u under phi: u_k at level p + k c satisfies phi(u_{k+1}) = u_k.
            let mut orbit = vec![u];
            let mut cur = phi[u];
            while cur != u {
                orbit.push(cur);
                cur = phi[cur];
            }
            let q = orbit.len();
            // u_k = phi^{-k}(u) = phi^{q - k mod q}(u) = orbit[(q - k % q) % q]
            let vertex_at = |k: usize| orbit[(q - k % q) % q];
            let prefix = self.extreme_prefix_to(p, u, kind)?;
            let mut tail = Vec::with_capacity(q * c);
            for k in 0..q {
                let top = vertex_at(k + 1);
                let mut seg = vec![Edge { range: 0, rank: 0 }; c];
                let mut cur = top;
                for j in (0..c).rev() {
                    let level = &self.cycle[j];
                    let rank = kind.rank(level.fiber(cur).len());
                    seg[j] = Edge { range: cur, rank };
                    cur = level.source(cur, rank);
                }
                debug_assert_eq!(cur, vertex_at(k));
                tail.extend(seg);
            }
            witnesses.push(EventuallyPeriodicPath::new(self, prefix, tail)?);
        }
        witnesses.sort();
        witnesses.dedup();
        Ok(ExtremeSet {
            kind,
            count: witnesses.len(),
            witnesses,
        })
    }

    /// Whether every infinite extension of `prefix` is an extreme path of the given kind.
    pub fn cylinder_in_extreme(&self, prefix: &PathPrefix, kind: Extreme) -> Result<bool> {
        self.require_periodic()?;
        prefix.validate(self)?;
        for (i, e) in prefix.edges().iter().enumerate() {
            if !self.level(i + 1)?.is_extreme(e.range, e.rank, kind) {
                return Ok(false);
            }
        }
        let mut n = prefix.len();
        let mut reach = vec![false; self.width(n)?];
        reach[prefix.terminal(self)?] = true;
        let mut seen = HashSet::new();
        loop {
            if n >= self.preamble.len() && !seen.insert((self.canonical_level(n), reach.clone())) {
                return Ok(true);
            }
            let level = self.level(n + 1)?;
            let mut next = vec![false; level.width()];
            for (v, fiber) in level.fibers().iter().enumerate() {
                for (rank, &s) in fiber.iter().enumerate() {
                    if reach[s] {
                        if rank != kind.rank(fiber.len()) {
                            return Ok(false);
                        }
                        next[v] = true;
                    }
                }
            }
            reach = next;
            n += 1;
        }
    }

    /// Whether the path space has infinitely many points.
    pub fn is_path_space_infinite(&self) -> Result<bool> {
        self.require_periodic()?;
        let p = self.preamble.len();
        let c = self.cycle.len();
        // Totals never decrease, and a strict increase over one cycle repeats forever.
        let counts = self.path_counts(p + c)?;
        let total = |n: usize| counts[n].iter().sum::<u128>();
        Ok(total(p + c) > total(p))
    }

    /// Telescopes the levels between consecutive cuts into single levels.
    /// The result is a finite diagram with one level per cut.
    pub fn telescope(&self, cuts: &[usize], depth: usize) -> Result<OrderedBratteliDiagram> {
        if cuts.is_empty() {
            return Err(Error::InvalidInput("no cuts".into()));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) || cuts[0] == 0 {
            return Err(Error::InvalidInput(format!(
                "cuts {cuts:?} must be strictly increasing and positive"
            )));
        }
        if *cuts.last().unwrap() > depth {
            return Err(Error::InvalidInput(format!("cuts {cuts:?} exceed depth {depth}")));
        }
        self.require_depth(depth)?;
        let mut levels = Vec::with_capacity(cuts.len());
        let mut from = 0;
        for &to in cuts {
            levels.push(self.composite_level(from, to)?);
            from = to;
        }
        OrderedBratteliDiagram::new(self.root(), levels, Vec::new())
    }

    /// Level from `V_i` to `V_j` whose fibers list the sources at `V_i` of all
    /// paths, in reverse lexicographic order.
    pub fn composite_level(&self, i: usize, j: usize) -> Result<Level> {
        assert!(i < j);
        let mut fibers: Vec<Vec<usize>> = self.level(i + 1)?.fibers().to_vec();
        for n in i + 2..=j {
            let level = self.level(n)?;
            fibers = level
                .fibers()
                .iter()
                .map(|f| f.iter().flat_map(|&s| fibers[s].iter().copied()).collect())
                .collect();
        }
        Ok(Level::new(self.vertices(j)?.to_vec(), fibers))
    }

    /// Same diagram with the vertices of level `n` permuted so that new index
    /// `k` holds old vertex `order[k]`, for every level listed in `orders`.
    pub fn relabel(&self, orders: &BTreeMap<usize, Vec<usize>>) -> Result<OrderedBratteliDiagram> {
        let lvl_count = self.preamble.len() + self.cycle.len();
        if !self.cycle.is_empty() && orders.get(&self.preamble.len()) != orders.get(&lvl_count) {
            return Err(Error::InvalidInput(
                "relabeling must agree on both ends of the cycle".into(),
            ));
        }
        let inv = |n: usize| -> Option<Vec<usize>> {
            orders.get(&n).map(|o| {
                let mut inv = vec![0; o.len()];
                for (k, &old) in o.iter().enumerate() {
                    inv[old] = k;
                }
                inv
            })
        };
        let mut all: Vec<Level> = Vec::with_capacity(lvl_count);
        for n in 1..=lvl_count {
            let level = self.level(n)?;
            let prev_inv = inv(n - 1);
            let (vertices, fibers): (Vec<String>, Vec<Vec<usize>>) = match orders.get(&n) {
                Some(o) => o
                    .iter()
                    .map(|&old| (level.vertices[old].clone(), level.fibers[old].clone()))
                    .unzip(),
                None => (level.vertices.clone(), level.fibers.clone()),
            };
            let fibers = fibers
                .into_iter()
                .map(|f| match &prev_inv {
                    Some(pi) => f.into_iter().map(|s| pi[s]).collect(),
                    None => f,
                })
                .collect();
            all.push(Level::new(vertices, fibers));
        }
        let cycle = all.split_off(self.preamble.len());
        OrderedBratteliDiagram::new(self.root(), all, cycle)
    }
}
