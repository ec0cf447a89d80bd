//! Finite path prefixes and eventually periodic infinite paths.

use serde::{Deserialize, Serialize};

use crate::diagram::{Extreme, OrderedBratteliDiagram};
use crate::error::{Error, Result};

/// An edge identified by its range vertex index and rank; the level is the
/// position inside the enclosing path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub range: usize,
    pub rank: usize,
}

/// Edge `i` of a prefix lives at level `i + 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathPrefix {
    edges: Vec<Edge>,
}

impl PathPrefix {
    pub fn from_edges(edges: Vec<Edge>) -> Self {
        PathPrefix { edges }
    }

    pub fn empty() -> Self {
        PathPrefix { edges: Vec::new() }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn into_edges(self) -> Vec<Edge> {
        self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.rank).collect()
    }

    pub fn push(&mut self, e: Edge) {
        self.edges.push(e);
    }

    pub fn truncate(&self, k: usize) -> PathPrefix {
        PathPrefix {
            edges: self.edges[..k.min(self.edges.len())].to_vec(),
        }
    }

    pub fn concat(&self, other: &[Edge]) -> PathPrefix {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(other);
        PathPrefix { edges }
    }

    /// Vertex index at level `n` (0 is the root).
    pub fn vertex_at(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            self.edges[n - 1].range
        }
    }

    pub fn terminal(&self, d: &OrderedBratteliDiagram) -> Result<usize> {
        self.validate(d)?;
        Ok(self.vertex_at(self.len()))
    }

    pub fn validate(&self, d: &OrderedBratteliDiagram) -> Result<()> {
        if self.edges.is_empty() {
            return Ok(());
        }
        d.require_depth(self.len())
            .map_err(|_| Error::InvalidPrefix(format!("length {} exceeds the diagram", self.len())))?;
        let mut prev = 0;
        for (i, e) in self.edges.iter().enumerate() {
            let level = d.level(i + 1)?;
            if e.range >= level.width() {
                return Err(Error::InvalidPrefix(format!(
                    "level {}: vertex index {} out of range",
                    i + 1,
                    e.range
                )));
            }
            let fiber = level.fiber(e.range);
            if e.rank >= fiber.len() {
                return Err(Error::InvalidPrefix(format!(
                    "level {}: rank {} exceeds fiber of {}",
                    i + 1,
                    e.rank,
                    level.vertices()[e.range]
                )));
            }
            if fiber[e.rank] != prev {
                return Err(Error::InvalidPrefix(format!(
                    "level {}: edge does not start where the previous edge ends",
                    i + 1
                )));
            }
            prev = e.range;
        }
        Ok(())
    }

    pub fn is_all_extreme(&self, d: &OrderedBratteliDiagram, kind: Extreme) -> Result<bool> {
        for (i, e) in self.edges.iter().enumerate() {
            if !d.level(i + 1)?.is_extreme(e.range, e.rank, kind) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_spec(&self, d: &OrderedBratteliDiagram) -> Result<PathSpec> {
        Ok(PathSpec {
            prefix: prefix_specs(d, &self.edges, 0)?,
            tail: None,
        })
    }

    pub fn from_spec(d: &OrderedBratteliDiagram, spec: &PathSpec) -> Result<PathPrefix> {
        if spec.tail.is_some() {
            return Err(Error::InvalidPrefix("expected a finite prefix without tail".into()));
        }
        let p = parse_prefix(d, &spec.prefix)?;
        p.validate(d)?;
        Ok(p)
    }
}

fn prefix_specs(d: &OrderedBratteliDiagram, edges: &[Edge], offset: usize) -> Result<Vec<PrefixEdgeSpec>> {
    edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let level = offset + i + 1;
            Ok(PrefixEdgeSpec {
                level,
                range: d.vertices(level)?[e.range].clone(),
                rank: e.rank,
            })
        })
        .collect()
}

fn parse_prefix(d: &OrderedBratteliDiagram, specs: &[PrefixEdgeSpec]) -> Result<PathPrefix> {
    let mut edges = Vec::with_capacity(specs.len());
    for (i, e) in specs.iter().enumerate() {
        if e.level != i + 1 {
            return Err(Error::InvalidPrefix(format!(
                "edge {} is labelled level {}, expected {}",
                i,
                e.level,
                i + 1
            )));
        }
        d.require_depth(e.level)
            .map_err(|_| Error::InvalidPrefix(format!("level {} exceeds the diagram", e.level)))?;
        let range = d
            .level(e.level)?
            .vertex_index(&e.range)
            .ok_or_else(|| Error::InvalidPrefix(format!("level {}: unknown vertex {}", e.level, e.range)))?;
        edges.push(Edge { range, rank: e.rank });
    }
    Ok(PathPrefix { edges })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixEdgeSpec {
    pub level: usize,
    pub range: String,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailEdgeSpec {
    pub range: String,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSpec {
    AllMax,
    AllMin,
    Periodic(Vec<TailEdgeSpec>),
}

/// Serialized path: a prefix alone, or a prefix with an infinite tail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSpec {
    pub prefix: Vec<PrefixEdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailSpec>,
}

/// An infinite path: a prefix followed by a block of edges repeated forever.
///
/// Kept in canonical form: the prefix covers at least the preamble, the
/// period is the shortest one that is a multiple of the cycle length, and
/// the prefix is as short as possible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventuallyPeriodicPath {
    prefix: PathPrefix,
    period: Vec<Edge>,
}

impl EventuallyPeriodicPath {
    pub fn new(d: &OrderedBratteliDiagram, prefix: PathPrefix, period: Vec<Edge>) -> Result<Self> {
        d.require_periodic()?;
        let c = d.period();
        if prefix.len() < d.preamble_len() {
            return Err(Error::InvalidPath(format!(
                "prefix of length {} does not cover the preamble of length {}",
                prefix.len(),
                d.preamble_len()
            )));
        }
        if period.is_empty() || !period.len().is_multiple_of(c) {
            return Err(Error::InvalidPath(format!(
                "tail of length {} is not a positive multiple of the cycle length {}",
                period.len(),
                c
            )));
        }
        prefix.validate(d).map_err(|e| Error::InvalidPath(e.to_string()))?;
        // Two passes over the tail cover the wrap-around chaining.
        let p = prefix.len();
        let mut prev = prefix.vertex_at(p);
        for j in 0..2 * period.len() {
            let e = period[j % period.len()];
            let level = d.level(p + j + 1)?;
            if e.range >= level.width() || e.rank >= level.fiber(e.range).len() {
                return Err(Error::InvalidPath(format!("tail edge at level {} does not exist", p + j + 1)));
            }
            if level.source(e.range, e.rank) != prev {
                return Err(Error::InvalidPath(format!("tail does not chain at level {}", p + j + 1)));
            }
            prev = e.range;
        }
        let mut x = EventuallyPeriodicPath { prefix, period };
        x.normalize(d);
        Ok(x)
    }

    fn normalize(&mut self, d: &OrderedBratteliDiagram) {
        let c = d.period();
        let len = self.period.len();
        for m in (c..=len).step_by(c) {
            if len.is_multiple_of(m) && (0..len).all(|j| self.period[j] == self.period[j % m]) {
                self.period.truncate(m);
                break;
            }
        }
        while self.prefix.len() > d.preamble_len() && self.prefix.edges.last() == self.period.last() {
            let e = self.prefix.edges.pop().unwrap();
            self.period.pop();
            self.period.insert(0, e);
        }
    }

    pub fn prefix(&self) -> &PathPrefix {
        &self.prefix
    }

    pub fn period(&self) -> &[Edge] {
        &self.period
    }

    /// Edge at level `n ≥ 1`.
    pub fn edge_at(&self, n: usize) -> Edge {
        let p = self.prefix.len();
        if n <= p {
            self.prefix.edges[n - 1]
        } else {
            self.period[(n - p - 1) % self.period.len()]
        }
    }

    pub fn vertex_at(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            self.edge_at(n).range
        }
    }

    pub fn truncate(&self, k: usize) -> PathPrefix {
        PathPrefix::from_edges((1..=k).map(|n| self.edge_at(n)).collect())
    }

    /// Edges at levels `from + 1 ..= to`.
    pub fn segment(&self, from: usize, to: usize) -> Vec<Edge> {
        (from + 1..=to).map(|n| self.edge_at(n)).collect()
    }

    /// Levels after which the path is periodic, and the period length in levels.
    pub fn shape(&self) -> (usize, usize) {
        (self.prefix.len(), self.period.len())
    }

    /// Rebuild from an explicit split; used when a caller extends the prefix.
    pub fn resplit(&self, d: &OrderedBratteliDiagram, prefix_len: usize) -> Result<Self> {
        let prefix = self.truncate(prefix_len);
        let period = self.segment(prefix_len, prefix_len + self.period.len());
        EventuallyPeriodicPath::new(d, prefix, period)
    }

    /// First level whose edge is not extreme, if any.
    pub fn first_non_extreme(&self, d: &OrderedBratteliDiagram, kind: Extreme) -> Result<Option<usize>> {
        let end = self.prefix.len() + self.period.len();
        for n in 1..=end {
            let e = self.edge_at(n);
            if !d.level(n)?.is_extreme(e.range, e.rank, kind) {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    pub fn is_all_extreme(&self, d: &OrderedBratteliDiagram, kind: Extreme) -> Result<bool> {
        Ok(self.first_non_extreme(d, kind)?.is_none())
    }

    /// Extreme from some level on: decided by the periodic block alone.
    pub fn is_eventually_extreme(&self, d: &OrderedBratteliDiagram, kind: Extreme) -> Result<bool> {
        let p = self.prefix.len();
        for (j, e) in self.period.iter().enumerate() {
            if !d.level(p + j + 1)?.is_extreme(e.range, e.rank, kind) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn from_spec(d: &OrderedBratteliDiagram, spec: &PathSpec) -> Result<Self> {
        d.require_periodic()?;
        let prefix = parse_prefix(d, &spec.prefix)?;
        prefix.validate(d).map_err(|e| Error::InvalidPath(e.to_string()))?;
        let p = prefix.len();
        match &spec.tail {
            None => Err(Error::InvalidPath("infinite path needs a tail".into())),
            Some(TailSpec::Periodic(tail)) => {
                let mut period = Vec::with_capacity(tail.len());
                for (j, e) in tail.iter().enumerate() {
                    let level = d.level(p + j + 1)?;
                    let range = level.vertex_index(&e.range).ok_or_else(|| {
                        Error::InvalidPath(format!("level {}: unknown vertex {}", p + j + 1, e.range))
                    })?;
                    period.push(Edge { range, rank: e.rank });
                }
                EventuallyPeriodicPath::new(d, prefix, period)
            }
            Some(TailSpec::AllMax) => extreme_continuation(d, prefix, Extreme::Max),
            Some(TailSpec::AllMin) => extreme_continuation(d, prefix, Extreme::Min),
        }
    }

    pub fn to_spec(&self, d: &OrderedBratteliDiagram) -> Result<PathSpec> {
        let p = self.prefix.len();
        for kind in [Extreme::Max, Extreme::Min] {
            if self.is_eventually_extreme(d, kind)? {
                let u = self.vertex_at(p);
                let matching = d
                    .count_extreme_paths(kind)?
                    .witnesses
                    .into_iter()
                    .filter(|w| w.vertex_at(p) == u)
                    .count();
                if matching == 1 {
                    return Ok(PathSpec {
                        prefix: prefix_specs(d, self.prefix.edges(), 0)?,
                        tail: Some(match kind {
                            Extreme::Max => TailSpec::AllMax,
                            Extreme::Min => TailSpec::AllMin,
                        }),
                    });
                }
            }
        }
        let tail = self
            .period
            .iter()
            .enumerate()
            .map(|(j, e)| {
                Ok(TailEdgeSpec {
                    range: d.vertices(p + j + 1)?[e.range].clone(),
                    rank: e.rank,
                })
            })
            .collect::<Result<_>>()?;
        Ok(PathSpec {
            prefix: prefix_specs(d, self.prefix.edges(), 0)?,
            tail: Some(TailSpec::Periodic(tail)),
        })
    }
}

/// Completes `prefix` by the unique all-extreme continuation from its terminal vertex.
pub fn extreme_continuation(
    d: &OrderedBratteliDiagram,
    prefix: PathPrefix,
    kind: Extreme,
) -> Result<EventuallyPeriodicPath> {
    let p = prefix.len();
    let u = prefix.vertex_at(p);
    let mut matching: Vec<EventuallyPeriodicPath> = d
        .count_extreme_paths(kind)?
        .witnesses
        .into_iter()
        .filter(|w| w.vertex_at(p) == u)
        .collect();
    let w = match matching.len() {
        0 => {
            return Err(Error::InvalidPath(format!(
                "no infinite {kind:?} continuation from level {p}"
            )))
        }
        1 => matching.pop().unwrap(),
        k => {
            return Err(Error::InvalidPath(format!(
                "{k} different {kind:?} continuations from level {p}; give the tail explicitly"
            )))
        }
    };
    let start = p.max(w.prefix.len());
    let mut edges = prefix.into_edges();
    edges.extend(w.segment(p, start));
    let period = w.segment(start, start + w.period.len());
    EventuallyPeriodicPath::new(d, PathPrefix::from_edges(edges), period)
}
