//! Ordered bipartite edge sets and their composition.

use serde::{Deserialize, Serialize};

use crate::diagram::{EdgeSpec, Level};
use crate::error::{Error, Result};
use crate::report::ValidationReport;

/// Edges from `domain` to `codomain`; `fibers[w][rank]` is a domain index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderedEdgeSet {
    domain: Vec<String>,
    codomain: Vec<String>,
    fibers: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeSetSpec(pub Vec<EdgeSpec>);

impl OrderedEdgeSet {
    pub fn new(domain: Vec<String>, codomain: Vec<String>, fibers: Vec<Vec<usize>>) -> Self {
        assert_eq!(codomain.len(), fibers.len(), "one fiber per codomain vertex");
        debug_assert!(fibers.iter().flatten().all(|&s| s < domain.len()));
        OrderedEdgeSet {
            domain,
            codomain,
            fibers,
        }
    }

    pub fn from_level(domain: &[String], level: &Level) -> Self {
        OrderedEdgeSet::new(domain.to_vec(), level.vertices().to_vec(), level.fibers().to_vec())
    }

    /// One rank-0 edge `v → v` per vertex.
    pub fn identity(vertices: &[String]) -> Self {
        OrderedEdgeSet::new(
            vertices.to_vec(),
            vertices.to_vec(),
            (0..vertices.len()).map(|v| vec![v]).collect(),
        )
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn codomain(&self) -> &[String] {
        &self.codomain
    }

    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    pub fn fiber(&self, w: usize) -> &[usize] {
        &self.fibers[w]
    }

    pub fn fibers_mut(&mut self) -> &mut Vec<Vec<usize>> {
        &mut self.fibers
    }

    pub fn len(&self) -> usize {
        self.fibers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of edges leaving each domain vertex.
    pub fn source_multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.domain.len()];
        for &s in self.fibers.iter().flatten() {
            m[s] += 1;
        }
        m
    }

    /// Surjectivity of source and range maps, reported against `level`.
    pub fn check(&self, level: usize, what: &str, report: &mut ValidationReport) {
        for (w, f) in self.fibers.iter().enumerate() {
            if f.is_empty() {
                report.push(level, format!("{what} fiber of {}", self.codomain[w]), "empty fiber");
            }
        }
        for (v, m) in self.source_multiplicities().into_iter().enumerate() {
            if m == 0 {
                report.push(level, format!("{what} vertex {}", self.domain[v]), "no outgoing edge");
            }
        }
    }

    pub fn to_spec(&self) -> EdgeSetSpec {
        let mut edges = Vec::with_capacity(self.len());
        for (w, f) in self.fibers.iter().enumerate() {
            for (rank, &s) in f.iter().enumerate() {
                edges.push(EdgeSpec {
                    source: self.domain[s].clone(),
                    range: self.codomain[w].clone(),
                    rank,
                });
            }
        }
        EdgeSetSpec(edges)
    }

    pub fn from_spec(domain: &[String], codomain: &[String], spec: &EdgeSetSpec) -> Result<Self> {
        let mut fibers: Vec<Vec<(usize, usize)>> = vec![Vec::new(); codomain.len()];
        for e in &spec.0 {
            let s = domain
                .iter()
                .position(|v| *v == e.source)
                .ok_or_else(|| Error::InvalidInput(format!("edge source {} is not in {:?}", e.source, domain)))?;
            let r = codomain
                .iter()
                .position(|v| *v == e.range)
                .ok_or_else(|| Error::InvalidInput(format!("edge range {} is not in {:?}", e.range, codomain)))?;
            fibers[r].push((e.rank, s));
        }
        let mut out = Vec::with_capacity(fibers.len());
        for (w, mut f) in fibers.into_iter().enumerate() {
            f.sort_unstable();
            if f.iter().enumerate().any(|(i, &(r, _))| i != r) {
                return Err(Error::InvalidInput(format!(
                    "ranks in the fiber of {} are not exactly 0..{}",
                    codomain[w],
                    f.len()
                )));
            }
            out.push(f.into_iter().map(|(_, s)| s).collect());
        }
        Ok(OrderedEdgeSet::new(domain.to_vec(), codomain.to_vec(), out))
    }
}

/// `F` then `G`: pairs `(t, g)` with `r(t) = s(g)`, ordered with the `G` edge most significant.
pub fn compose_edge_sets(f: &OrderedEdgeSet, g: &OrderedEdgeSet) -> Result<OrderedEdgeSet> {
    if f.codomain != g.domain {
        return Err(Error::DomainMismatch(format!(
            "codomain {:?} does not match domain {:?}",
            f.codomain, g.domain
        )));
    }
    let fibers = g
        .fibers
        .iter()
        .map(|gf| gf.iter().flat_map(|&v| f.fibers[v].iter().copied()).collect())
        .collect();
    Ok(OrderedEdgeSet::new(f.domain.clone(), g.codomain.clone(), fibers))
}

/// Equal source sequences in every fiber.
pub fn order_isomorphic(f: &OrderedEdgeSet, g: &OrderedEdgeSet) -> Result<bool> {
    Ok(mismatched_fibers(f, g)?.is_empty())
}

/// Codomain indices whose fibers differ.
pub fn mismatched_fibers(f: &OrderedEdgeSet, g: &OrderedEdgeSet) -> Result<Vec<usize>> {
    if f.domain != g.domain || f.codomain != g.codomain {
        return Err(Error::DomainMismatch(
            "edge sets have different domains or codomains".into(),
        ));
    }
    Ok((0..f.fibers.len()).filter(|&w| f.fibers[w] != g.fibers[w]).collect())
}
