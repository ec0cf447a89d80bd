//! Ordered premorphisms `f: B → C` and the induced maps `X_C → X_B`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::diagram::OrderedBratteliDiagram;
use crate::edgeset::{compose_edge_sets, mismatched_fibers, OrderedEdgeSet};
use crate::error::{Error, Result};
use crate::path::{Edge, EventuallyPeriodicPath, PathPrefix};
use crate::report::ValidationReport;
use crate::tower::{paths_between, start_vertex, tower_rank, tower_unrank, PathCounts};

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        a.max(b)
    } else {
        a / gcd(a, b) * b
    }
}

/// `f_n = preamble[n]` inside the preamble, then `step` per level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelMap {
    pub preamble: Vec<usize>,
    pub step: usize,
}

impl LevelMap {
    pub fn identity() -> Self {
        LevelMap {
            preamble: vec![0],
            step: 1,
        }
    }

    pub fn at(&self, n: usize) -> usize {
        let len = self.preamble.len();
        if n < len {
            self.preamble[n]
        } else {
            self.preamble[len - 1] + self.step * (n - len + 1)
        }
    }

    /// First index from which the map is arithmetic.
    pub fn threshold(&self) -> usize {
        self.preamble.len() - 1
    }

    pub fn check(&self) -> Result<()> {
        if self.preamble.first() != Some(&0) {
            return Err(Error::InvalidInput("level map must start with f_0 = 0".into()));
        }
        if self.preamble.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("level map must be non-decreasing".into()));
        }
        if self.step == 0 {
            return Err(Error::InvalidInput("level map step must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Premorphism {
    source: OrderedBratteliDiagram,
    target: OrderedBratteliDiagram,
    level_map: LevelMap,
    layers_preamble: Vec<OrderedEdgeSet>,
    layers_cycle: Vec<OrderedEdgeSet>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberBound {
    pub bound: usize,
    /// Every vertex has exactly one outgoing premorphism edge.
    pub globally_injective: bool,
}

impl Premorphism {
    /// Checks shapes only; ordered commutativity is checked by [`validate_premorphism`].
    pub fn new(
        source: OrderedBratteliDiagram,
        target: OrderedBratteliDiagram,
        level_map: LevelMap,
        layers_preamble: Vec<OrderedEdgeSet>,
        layers_cycle: Vec<OrderedEdgeSet>,
    ) -> Result<Self> {
        level_map.check()?;
        if layers_preamble.is_empty() && layers_cycle.is_empty() {
            return Err(Error::InvalidInput("premorphism has no layers".into()));
        }
        let f = Premorphism {
            source,
            target,
            level_map,
            layers_preamble,
            layers_cycle,
        };
        let horizon = f.certified_depth().min(f.available_depth());
        for n in 0..=horizon {
            let layer = f.layer(n)?;
            if layer.domain() != f.source.vertices(n)? {
                return Err(Error::DomainMismatch(format!(
                    "layer {n} starts from {:?}, expected {:?}",
                    layer.domain(),
                    f.source.vertices(n)?
                )));
            }
            let fn_ = f.f(n);
            if layer.codomain() != f.target.vertices(fn_)? {
                return Err(Error::DomainMismatch(format!(
                    "layer {n} ends in {:?}, expected target level {fn_} {:?}",
                    layer.codomain(),
                    f.target.vertices(fn_)?
                )));
            }
        }
        Ok(f)
    }

    pub fn identity(d: &OrderedBratteliDiagram) -> Self {
        let pre = (0..=d.preamble_len())
            .map(|n| OrderedEdgeSet::identity(d.vertices(n).expect("level exists")))
            .collect();
        let cycle = (1..=d.period())
            .map(|j| OrderedEdgeSet::identity(d.vertices(d.preamble_len() + j).expect("level exists")))
            .collect();
        Premorphism {
            source: d.clone(),
            target: d.clone(),
            level_map: LevelMap::identity(),
            layers_preamble: pre,
            layers_cycle: cycle,
        }
    }

    pub fn source(&self) -> &OrderedBratteliDiagram {
        &self.source
    }

    pub fn target(&self) -> &OrderedBratteliDiagram {
        &self.target
    }

    pub fn level_map(&self) -> &LevelMap {
        &self.level_map
    }

    pub fn layers_preamble(&self) -> &[OrderedEdgeSet] {
        &self.layers_preamble
    }

    pub fn layers_cycle(&self) -> &[OrderedEdgeSet] {
        &self.layers_cycle
    }

    pub fn f(&self, n: usize) -> usize {
        self.level_map.at(n)
    }

    pub fn layer(&self, n: usize) -> Result<&OrderedEdgeSet> {
        let p = self.layers_preamble.len();
        if n < p {
            Ok(&self.layers_preamble[n])
        } else if self.layers_cycle.is_empty() {
            Err(Error::FiniteDiagramExhausted { level: n, available: p })
        } else {
            Ok(&self.layers_cycle[(n - p) % self.layers_cycle.len()])
        }
    }

    pub fn layer_mut(&mut self, n: usize) -> Option<&mut OrderedEdgeSet> {
        let p = self.layers_preamble.len();
        if n < p {
            Some(&mut self.layers_preamble[n])
        } else if self.layers_cycle.is_empty() {
            None
        } else {
            let c = self.layers_cycle.len();
            Some(&mut self.layers_cycle[(n - p) % c])
        }
    }

    pub fn is_periodic(&self) -> bool {
        !self.layers_cycle.is_empty() && !self.source.is_finite() && !self.target.is_finite()
    }

    /// Largest `n` for which `F_n`, `V_n` and `W_{f_n}` all exist.
    pub fn available_depth(&self) -> usize {
        if self.is_periodic() {
            return usize::MAX;
        }
        let mut n = 0;
        while n < 100_000
            && self.layer(n + 1).is_ok()
            && n < self.source.available_depth()
            && self.f(n + 1) <= self.target.available_depth()
        {
            n += 1;
        }
        n
    }

    /// `(N0, P)`: from level `N0` on all data repeats with period `P`.
    pub fn periodicity(&self) -> Option<(usize, usize)> {
        if !self.is_periodic() {
            return None;
        }
        let mut n0 = self
            .source
            .preamble_len()
            .max(self.layers_preamble.len())
            .max(self.level_map.threshold());
        while self.f(n0) < self.target.preamble_len() {
            n0 += 1;
        }
        let cc = self.target.period();
        let p = lcm(
            lcm(self.source.period(), self.layers_cycle.len()),
            cc / gcd(cc, self.level_map.step),
        );
        Some((n0, p))
    }

    /// Number of squares whose check certifies every level.
    pub fn certified_depth(&self) -> usize {
        match self.periodicity() {
            Some((n0, p)) => n0 + p,
            None => self.available_depth(),
        }
    }

    /// `S_{i,j}` of the target as an edge set; identity when `i = j`.
    pub fn target_window(&self, i: usize, j: usize) -> Result<OrderedEdgeSet> {
        if i == j {
            Ok(OrderedEdgeSet::identity(self.target.vertices(i)?))
        } else {
            let level = self.target.composite_level(i, j)?;
            Ok(OrderedEdgeSet::from_level(self.target.vertices(i)?, &level))
        }
    }

    /// The two sides `E_{n+1}∘F_{n+1}` and `F_n∘S_{f_n,f_{n+1}}` of square `n`.
    pub fn square(&self, n: usize) -> Result<(OrderedEdgeSet, OrderedEdgeSet)> {
        let e = OrderedEdgeSet::from_level(self.source.vertices(n)?, self.source.level(n + 1)?);
        let lhs = compose_edge_sets(&e, self.layer(n + 1)?)?;
        let s = self.target_window(self.f(n), self.f(n + 1))?;
        let rhs = compose_edge_sets(self.layer(n)?, &s)?;
        Ok((lhs, rhs))
    }
}

/// Shapes, surjectivity and ordered commutativity of squares `0..depth`.
/// A failing square between levels `n` and `n + 1` is reported at level `n + 1`.
pub fn validate_premorphism(f: &Premorphism, depth: usize) -> ValidationReport {
    let mut report = ValidationReport::default();
    let depth = depth.min(f.available_depth());
    match f.layer(0) {
        Ok(l) if l.len() == 1 => {}
        Ok(l) => report.push(0, "layer 0", format!("has {} edges, expected a singleton", l.len())),
        Err(e) => report.push(0, "layer 0", e.to_string()),
    }
    for n in 0..=depth {
        match f.layer(n) {
            Ok(l) => l.check(n, "premorphism", &mut report),
            Err(e) => report.push(n, format!("layer {n}"), e.to_string()),
        }
    }
    for n in 0..depth {
        match f.square(n) {
            Ok((lhs, rhs)) => match mismatched_fibers(&lhs, &rhs) {
                Ok(bad) => {
                    for w in bad {
                        report.push(
                            n + 1,
                            format!("fiber of {}", lhs.codomain()[w]),
                            "the two composites order their edges differently",
                        );
                    }
                }
                Err(e) => report.push(n + 1, "square", e.to_string()),
            },
            Err(e) => report.push(n + 1, "square", e.to_string()),
        }
    }
    report
}

/// Image in `B` of the first `f_n` edges of `c_prefix`.
pub fn induced_map_at(f: &Premorphism, n: usize, c_prefix: &PathPrefix) -> Result<PathPrefix> {
    let fn_ = f.f(n);
    if c_prefix.len() < fn_ {
        return Err(Error::PrefixLengthMismatch { len: c_prefix.len() });
    }
    let c = c_prefix.truncate(fn_);
    c.validate(f.target())?;
    let c_counts = PathCounts::new(f.target(), fn_)?;
    let b_counts = PathCounts::new(f.source(), n)?;
    induced_with_counts(f, n, &c, &c_counts, &b_counts)
}

/// `induced_map_at` on a validated prefix of length exactly `f_n`, with path
/// counts covering `f_n` in the target and `n` in the source.
pub(crate) fn induced_with_counts(
    f: &Premorphism,
    n: usize,
    c: &PathPrefix,
    c_counts: &PathCounts,
    b_counts: &PathCounts,
) -> Result<PathPrefix> {
    let w = c.vertex_at(f.f(n));
    let mut r = tower_rank(f.target(), c_counts, c)?;
    for &v in f.layer(n)?.fiber(w) {
        let size = b_counts.get(n, v);
        if r < size {
            return tower_unrank(f.source(), b_counts, n, v, r);
        }
        r -= size;
    }
    Err(Error::InvalidInput(format!(
        "tower heights disagree at level {n}; the premorphism does not commute"
    )))
}

/// Induced image of a prefix whose length is some `f_n`; the largest such `n` is used.
pub fn induced_map_prefix(f: &Premorphism, c_prefix: &PathPrefix) -> Result<PathPrefix> {
    let len = c_prefix.len();
    let mut found = None;
    let mut n = 0;
    while f.f(n) <= len {
        if f.f(n) == len {
            found = Some(n);
        }
        n += 1;
        if n > f.available_depth() {
            break;
        }
    }
    match found {
        Some(n) => induced_map_at(f, n, c_prefix),
        None => Err(Error::PrefixLengthMismatch { len }),
    }
}

/// All prefixes of length `f_n` in `C` mapped onto `b_prefix`.
pub fn preimage_prefixes(f: &Premorphism, b_prefix: &PathPrefix) -> Result<Vec<PathPrefix>> {
    b_prefix.validate(f.source())?;
    let n = b_prefix.len();
    let fn_ = f.f(n);
    let b_counts = PathCounts::new(f.source(), n)?;
    let c_counts = PathCounts::new(f.target(), fn_)?;
    let v = b_prefix.vertex_at(n);
    let rho = tower_rank(f.source(), &b_counts, b_prefix)?;
    let mut out = Vec::new();
    let layer = f.layer(n)?;
    for (w, fiber) in layer.fibers().iter().enumerate() {
        let mut offset: u128 = 0;
        for &s in fiber {
            if s == v {
                out.push(tower_unrank(f.target(), &c_counts, fn_, w, offset + rho)?);
            }
            offset += b_counts.get(n, s);
        }
    }
    Ok(out)
}

/// A premorphism edge: target vertex `w` and position in the fiber of `w`.
type LayerEdge = (usize, usize);

/// `E_{n+1}∘F_{n+1}` at `w`: (position in the `F_{n+1}` fiber, rank of the `E_{n+1}` edge).
fn square_lhs(f: &Premorphism, n: usize, w: usize) -> Result<Vec<(usize, usize)>> {
    let level = f.source().level(n + 1)?;
    let mut out = Vec::new();
    for (pos, &v) in f.layer(n + 1)?.fiber(w).iter().enumerate() {
        for rank in 0..level.fiber(v).len() {
            out.push((pos, rank));
        }
    }
    Ok(out)
}

/// `F_n∘S_{f_n,f_{n+1}}` at `w`: (target segment, position in the `F_n` fiber at its start).
fn square_rhs(f: &Premorphism, n: usize, w: usize) -> Result<Vec<(Vec<Edge>, usize, usize)>> {
    let (a, b) = (f.f(n), f.f(n + 1));
    let layer = f.layer(n)?;
    let mut out = Vec::new();
    for seg in paths_between(f.target(), a, b, w)? {
        let start = if a == b { w } else { start_vertex(f.target(), a, &seg)? };
        for pos in 0..layer.fiber(start).len() {
            out.push((seg.clone(), start, pos));
        }
    }
    Ok(out)
}

/// Lifts a premorphism edge at level `n` along a target segment to level `n + 1`,
/// returning the new premorphism edge and the source edge at level `n + 1`.
fn lift_forward(f: &Premorphism, n: usize, state: LayerEdge, seg: &[Edge], w_next: usize) -> Result<(LayerEdge, Edge)> {
    let rhs = square_rhs(f, n, w_next)?;
    let idx = rhs
        .iter()
        .position(|(s, start, pos)| s.as_slice() == seg && *start == state.0 && *pos == state.1)
        .ok_or_else(|| Error::InvalidInput(format!("segment not found in square {n}")))?;
    let lhs = square_lhs(f, n, w_next)?;
    let (pos, rank) = *lhs
        .get(idx)
        .ok_or_else(|| Error::InvalidInput(format!("square {n} does not commute")))?;
    let v = f.layer(n + 1)?.fiber(w_next)[pos];
    Ok(((w_next, pos), Edge { range: v, rank }))
}

/// Inverse of [`lift_forward`]: from a premorphism edge at level `n + 1` and the
/// source edge at that level, the premorphism edge at level `n` and the target segment.
fn lift_backward(f: &Premorphism, n: usize, state: LayerEdge, b_edge: Edge) -> Result<(LayerEdge, Vec<Edge>)> {
    let (w, pos) = state;
    let level = f.source().level(n + 1)?;
    let fiber = f.layer(n + 1)?.fiber(w);
    let idx: usize = fiber[..pos].iter().map(|&v| level.fiber(v).len()).sum::<usize>() + b_edge.rank;
    let rhs = square_rhs(f, n, w)?;
    let (seg, start, p) = rhs
        .into_iter()
        .nth(idx)
        .ok_or_else(|| Error::InvalidInput(format!("square {n} does not commute")))?;
    Ok(((start, p), seg))
}

/// Exact image of an infinite path of `C` under the induced map.
pub fn induced_map_infinite(f: &Premorphism, x: &EventuallyPeriodicPath) -> Result<EventuallyPeriodicPath> {
    let (n0, period) = f
        .periodicity()
        .ok_or_else(|| Error::InvalidInput("infinite paths need a periodic premorphism".into()))?;
    let (px, lx) = x.shape();
    let mut state: LayerEdge = (0, 0);
    let mut edges: Vec<Edge> = Vec::new();
    let mut seen: HashMap<(usize, usize, LayerEdge), usize> = HashMap::new();
    let mut n = 0;
    loop {
        let fn_ = f.f(n);
        if n >= n0 && fn_ >= px {
            let key = (n % period, (fn_ - px) % lx, state);
            if let Some(&n1) = seen.get(&key) {
                let prefix = PathPrefix::from_edges(edges[..n1].to_vec());
                let tail = edges[n1..n].to_vec();
                return EventuallyPeriodicPath::new(f.source(), prefix, tail);
            }
            seen.insert(key, n);
        }
        let next_f = f.f(n + 1);
        let seg = x.segment(fn_, next_f);
        let w_next = x.vertex_at(next_f);
        let (next, e) = lift_forward(f, n, state, &seg, w_next)?;
        edges.push(e);
        state = next;
        n += 1;
    }
}

/// Every infinite path of `C` mapped onto `y`, found as backward-coherent chains
/// of premorphism edges over one stabilized period.
pub fn infinite_preimages(f: &Premorphism, y: &EventuallyPeriodicPath) -> Result<Vec<EventuallyPeriodicPath>> {
    let (n0f, pf) = f
        .periodicity()
        .ok_or_else(|| Error::InvalidInput("infinite paths need a periodic premorphism".into()))?;
    let (py, ly) = y.shape();
    let n0 = n0f.max(py);
    let q = lcm(pf, ly);
    let states_at = |n: usize| -> Result<Vec<LayerEdge>> {
        let v = y.vertex_at(n);
        let mut out = Vec::new();
        for (w, fiber) in f.layer(n)?.fibers().iter().enumerate() {
            for (pos, &s) in fiber.iter().enumerate() {
                if s == v {
                    out.push((w, pos));
                }
            }
        }
        Ok(out)
    };
    // Walk a state at level `hi` down to level `lo`, collecting target edges.
    let descend = |hi: usize, lo: usize, state: LayerEdge| -> Result<(LayerEdge, Vec<Edge>)> {
        let mut segs: Vec<Vec<Edge>> = Vec::new();
        let mut cur = state;
        for n in (lo..hi).rev() {
            let (prev, seg) = lift_backward(f, n, cur, y.edge_at(n + 1))?;
            segs.push(seg);
            cur = prev;
        }
        segs.reverse();
        Ok((cur, segs.concat()))
    };
    let states = states_at(n0)?;
    debug_assert_eq!(states, states_at(n0 + q)?);
    let psi: Vec<usize> = states
        .iter()
        .map(|&s| {
            let (down, _) = descend(n0 + q, n0, s)?;
            Ok(states.iter().position(|&t| t == down).expect("periodic state"))
        })
        .collect::<Result<_>>()?;
    let mut image = vec![true; states.len()];
    loop {
        let mut next = vec![false; states.len()];
        for (u, &img) in image.iter().enumerate() {
            if img {
                next[psi[u]] = true;
            }
        }
        if next == image {
            break;
        }
        image = next;
    }
    let mut out = Vec::new();
    for u in 0..states.len() {
        if !image[u] {
            continue;
        }
        let mut orbit = vec![u];
        let mut cur = psi[u];
        while cur != u {
            orbit.push(cur);
            cur = psi[cur];
        }
        let len = orbit.len();
        let at = |k: usize| states[orbit[(len - k % len) % len]];
        let (root, prefix) = descend(n0, 0, at(0))?;
        debug_assert_eq!(root.0, 0);
        let mut tail = Vec::new();
        for k in 0..len {
            let (landed, seg) = descend(n0 + (k + 1) * q, n0 + k * q, at(k + 1))?;
            debug_assert_eq!(landed, at(k));
            tail.extend(seg);
        }
        out.push(EventuallyPeriodicPath::new(
            f.target(),
            PathPrefix::from_edges(prefix),
            tail,
        )?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `#s_f^{-1}(v)` for every vertex of `V_n`.
pub fn source_fiber_sizes(f: &Premorphism, n: usize) -> Result<Vec<usize>> {
    Ok(f.layer(n)?.source_multiplicities())
}

/// Bound on the number of preimages of `y`, read off the premorphism edges
/// leaving the vertices `y` passes through.
pub fn fiber_bound(f: &Premorphism, y: &EventuallyPeriodicPath) -> Result<FiberBound> {
    let horizon = match f.periodicity() {
        Some((n0, p)) => {
            let (py, ly) = y.shape();
            n0.max(py) + lcm(p, ly)
        }
        None => f.available_depth(),
    };
    let mut bound = 0;
    let mut injective = true;
    for n in 0..=horizon {
        let sizes = source_fiber_sizes(f, n)?;
        bound = bound.max(sizes[y.vertex_at(n)]);
        injective &= sizes.iter().all(|&s| s == 1);
    }
    Ok(FiberBound {
        bound,
        globally_injective: injective,
    })
}

fn same_diagrams(f: &Premorphism, g: &Premorphism) -> Result<()> {
    if f.source() != g.source() || f.target() != g.target() {
        Err(Error::DiagramMismatch(
            "premorphisms do not share source and target diagrams".into(),
        ))
    } else {
        Ok(())
    }
}

/// Levels `n < depth` at which `F_n∘S_{f_n,m}` and `G_n∘S_{g_n,m}` differ, `m = max(f_n, g_n)`.
pub fn equivalence_failures(f: &Premorphism, g: &Premorphism, depth: usize) -> Result<Vec<usize>> {
    same_diagrams(f, g)?;
    let depth = depth.min(f.available_depth()).min(g.available_depth());
    let mut out = Vec::new();
    for n in 0..depth {
        let m = f.f(n).max(g.f(n));
        let a = compose_edge_sets(f.layer(n)?, &f.target_window(f.f(n), m)?)?;
        let b = compose_edge_sets(g.layer(n)?, &g.target_window(g.f(n), m)?)?;
        if !mismatched_fibers(&a, &b)?.is_empty() {
            out.push(n);
        }
    }
    Ok(out)
}

pub fn premorphisms_equivalent(f: &Premorphism, g: &Premorphism, depth: usize) -> Result<bool> {
    Ok(equivalence_failures(f, g, depth)?.is_empty())
}

/// Depth that certifies equivalence when both level maps share their step.
pub fn equivalence_depth(f: &Premorphism, g: &Premorphism) -> usize {
    match (f.periodicity(), g.periodicity()) {
        (Some((a, p)), Some((b, q))) => a.max(b) + lcm(p, q) + 1,
        _ => f.available_depth().min(g.available_depth()),
    }
}

/// Builds a premorphism from a layer function on a certified window.
fn from_layers(
    source: &OrderedBratteliDiagram,
    target: &OrderedBratteliDiagram,
    level_map: LevelMap,
    n0: usize,
    period: usize,
    layer: impl Fn(usize) -> Result<OrderedEdgeSet>,
) -> Result<Premorphism> {
    let pre = (0..n0).map(&layer).collect::<Result<Vec<_>>>()?;
    let cyc = (n0..n0 + period).map(&layer).collect::<Result<Vec<_>>>()?;
    Premorphism::new(source.clone(), target.clone(), level_map, pre, cyc)
}

/// `B → C` followed by `C → D`: level map `n ↦ g_{f_n}`, layers `F_n` then `G_{f_n}`.
pub fn compose_premorphisms(f: &Premorphism, g: &Premorphism) -> Result<Premorphism> {
    if f.target() != g.source() {
        return Err(Error::DiagramMismatch(
            "the first premorphism does not land where the second starts".into(),
        ));
    }
    let ((nf, pf), (ng, pg)) = match (f.periodicity(), g.periodicity()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidInput("composition needs periodic premorphisms".into())),
    };
    let mut n0 = nf;
    while f.f(n0) < ng {
        n0 += 1;
    }
    let step_f = f.level_map().step;
    let period = lcm(pf, pg / gcd(pg, step_f));
    let h = |n: usize| g.f(f.f(n));
    let level_map = LevelMap {
        preamble: (0..=n0).map(h).collect(),
        step: step_f * g.level_map().step,
    };
    from_layers(f.source(), g.target(), level_map, n0, period, |n| {
        compose_edge_sets(f.layer(n)?, g.layer(f.f(n))?)
    })
}

/// The same induced map reached one target level later: `g_n = f_n + 1` for `n ≥ 1`.
pub fn delay_premorphism(f: &Premorphism) -> Result<Premorphism> {
    let (n0, period) = f
        .periodicity()
        .ok_or_else(|| Error::InvalidInput("delay needs a periodic premorphism".into()))?;
    let n0 = n0.max(1);
    let g = |n: usize| if n == 0 { 0 } else { f.f(n) + 1 };
    let level_map = LevelMap {
        preamble: (0..=n0).map(g).collect(),
        step: f.level_map().step,
    };
    from_layers(f.source(), f.target(), level_map, n0, period, |n| {
        if n == 0 {
            Ok(f.layer(0)?.clone())
        } else {
            compose_edge_sets(f.layer(n)?, &f.target_window(f.f(n), f.f(n) + 1)?)
        }
    })
}
