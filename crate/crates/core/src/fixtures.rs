//! Built-in example systems.
//!
//! Each fixture bundles named parts: diagrams (`b`, `c`, `b_prime`),
//! premorphisms (`f`), extension rules (`ext_b`, `ext_c`) and distinguished
//! paths (`z`, `y`, `x`). Fixture levels are written as lists of
//! `(vertex, sources in rank order)`.

use crate::constructor::build_counterexample;
use crate::diagram::{DiagramSpec, EdgeSpec, Extreme, LevelSpec, OrderedBratteliDiagram};
use crate::dynamics::NaturalExtensionRule;
use crate::edgeset::OrderedEdgeSet;
use crate::error::{Error, Result};
use crate::path::EventuallyPeriodicPath;
use crate::premorphism::{LevelMap, Premorphism};

#[derive(Clone, Debug)]
pub enum Part {
    Diagram(OrderedBratteliDiagram),
    Premorphism(Premorphism),
    Rule(NaturalExtensionRule),
    Path(EventuallyPeriodicPath),
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub parts: Vec<(&'static str, Part)>,
}

impl Fixture {
    pub fn part(&self, name: &str) -> Option<&Part> {
        self.parts.iter().find(|(n, _)| *n == name).map(|(_, p)| p)
    }

    pub fn diagram(&self, name: &str) -> Result<&OrderedBratteliDiagram> {
        match self.part(name) {
            Some(Part::Diagram(d)) => Ok(d),
            _ => Err(self.missing(name, "diagram")),
        }
    }

    pub fn premorphism(&self, name: &str) -> Result<&Premorphism> {
        match self.part(name) {
            Some(Part::Premorphism(f)) => Ok(f),
            _ => Err(self.missing(name, "premorphism")),
        }
    }

    pub fn rule(&self, name: &str) -> Result<&NaturalExtensionRule> {
        match self.part(name) {
            Some(Part::Rule(r)) => Ok(r),
            _ => Err(self.missing(name, "extension rule")),
        }
    }

    pub fn path(&self, name: &str) -> Result<&EventuallyPeriodicPath> {
        match self.part(name) {
            Some(Part::Path(p)) => Ok(p),
            _ => Err(self.missing(name, "path")),
        }
    }

    fn missing(&self, part: &str, kind: &str) -> Error {
        Error::InvalidInput(format!("fixture {} has no {kind} part {part:?}", self.name))
    }
}

pub const FIXTURE_NAMES: [&str; 9] = [
    "two-odometer",
    "rank2",
    "cantor-left",
    "cantor-right",
    "decisive-case1",
    "decisive-case2",
    "mixed-extremes",
    "construction",
    "construction-decisive-case1",
];

pub fn fixture(name: &str) -> Result<Fixture> {
    match name {
        "two-odometer" => two_odometer(),
        "rank2" => rank2(),
        "cantor-left" => cantor_left(),
        "cantor-right" => cantor_right(),
        "decisive-case1" => decisive_case1(),
        "decisive-case2" => decisive_case2(),
        "mixed-extremes" => mixed_extremes(),
        "construction" => construction("construction", disjoint_odometers()?),
        "construction-decisive-case1" => {
            let f = decisive_case1()?;
            construction(
                "construction-decisive-case1",
                (
                    f.diagram("b")?.clone(),
                    f.path("z")?.clone(),
                    f.path("y")?.clone(),
                    f.rule("ext_b")?.clone(),
                ),
            )
        }
        _ => Err(Error::InvalidInput(format!(
            "unknown fixture {name:?}; known: {}",
            FIXTURE_NAMES.join(", ")
        ))),
    }
}

pub fn all_fixtures() -> Result<Vec<Fixture>> {
    FIXTURE_NAMES.iter().map(|n| fixture(n)).collect()
}

fn level(fibers: &[(&str, &[&str])]) -> LevelSpec {
    LevelSpec {
        vertices: fibers.iter().map(|(v, _)| v.to_string()).collect(),
        edges: fibers
            .iter()
            .flat_map(|(v, sources)| {
                sources.iter().enumerate().map(move |(rank, s)| EdgeSpec {
                    source: s.to_string(),
                    range: v.to_string(),
                    rank,
                })
            })
            .collect(),
    }
}

fn diagram(root: &str, preamble: Vec<LevelSpec>, cycle: Vec<LevelSpec>) -> Result<OrderedBratteliDiagram> {
    OrderedBratteliDiagram::from_spec(&DiagramSpec {
        root: Some(root.to_string()),
        preamble,
        cycle,
    })
}

/// The extreme path of the given kind passing through `vertex` on the first
/// cycle level.
pub fn extreme_through(d: &OrderedBratteliDiagram, kind: Extreme, vertex: &str) -> Result<EventuallyPeriodicPath> {
    let n = d.preamble_len() + 1;
    let v = d
        .level(n)?
        .vertex_index(vertex)
        .ok_or_else(|| Error::InvalidInput(format!("no vertex {vertex} at level {n}")))?;
    let mut hits = d
        .count_extreme_paths(kind)?
        .witnesses
        .into_iter()
        .filter(|p| p.vertex_at(n) == v);
    match (hits.next(), hits.next()) {
        (Some(p), None) => Ok(p),
        _ => Err(Error::InvalidInput(format!(
            "no unique {kind:?} path through {vertex} at level {n}"
        ))),
    }
}

/// Rule sending the max path through each `from` vertex to the min path through `to`.
fn rule(d: &OrderedBratteliDiagram, pairs: &[(&str, &str)]) -> Result<NaturalExtensionRule> {
    let pairs = pairs
        .iter()
        .map(|(a, b)| Ok((extreme_through(d, Extreme::Max, a)?, extreme_through(d, Extreme::Min, b)?)))
        .collect::<Result<Vec<_>>>()?;
    NaturalExtensionRule::new(d, pairs)
}

fn two_odometer() -> Result<Fixture> {
    let b = diagram("v0", vec![], vec![level(&[("v0", &["v0", "v0"])])])?;
    let ext = NaturalExtensionRule::unique_min(&b)?;
    Ok(Fixture {
        name: "two-odometer",
        summary: "binary adding machine: one vertex per level, two edges",
        parts: vec![
            ("f", Part::Premorphism(Premorphism::identity(&b))),
            ("ext_b", Part::Rule(ext.clone())),
            ("ext_c", Part::Rule(ext)),
            ("b", Part::Diagram(b.clone())),
            ("c", Part::Diagram(b)),
        ],
    })
}

/// Two vertices per level with alternating cross edges, mapped onto a single
/// vertex per level whose fibers pair up the two towers.
fn rank2() -> Result<Fixture> {
    let b = diagram(
        "r",
        vec![
            level(&[("v0", &["r"]), ("v1", &["r"])]),
            level(&[
                ("v0", &["v0", "v1", "v0"]),
                ("v1", &["v1", "v0", "v1", "v0", "v1", "v0", "v1"]),
            ]),
        ],
        vec![level(&[("v0", &["v0", "v1", "v0"]), ("v1", &["v1", "v0", "v1", "v0", "v1"])])],
    )?;
    let c = diagram(
        "r",
        vec![level(&[("w", &["r", "r"])]), level(&[("w", &["w"; 5])])],
        vec![level(&[("w", &["w"; 4])])],
    )?;
    let ext_b = rule(&b, &[("v0", "v1"), ("v1", "v0")])?;
    let ext_c = NaturalExtensionRule::unique_min(&c)?;
    let vb = |n: usize| b.vertices(n).map(<[String]>::to_vec);
    let vc = |n: usize| c.vertices(n).map(<[String]>::to_vec);
    let pair = |n: usize| -> Result<OrderedEdgeSet> { Ok(OrderedEdgeSet::new(vb(n)?, vc(n)?, vec![vec![0, 1]])) };
    let f = Premorphism::new(
        b.clone(),
        c.clone(),
        LevelMap::identity(),
        vec![OrderedEdgeSet::identity(&vb(0)?), pair(1)?, pair(2)?],
        vec![pair(3)?],
    )?;
    Ok(Fixture {
        name: "rank2",
        summary: "two towers with alternating cross edges; the induced map onto the single-tower diagram is a conjugacy",
        parts: vec![
            ("b", Part::Diagram(b)),
            ("c", Part::Diagram(c)),
            ("f", Part::Premorphism(f)),
            ("ext_b", Part::Rule(ext_b)),
            ("ext_c", Part::Rule(ext_c)),
        ],
    })
}

/// Two min paths and two max paths exchanged by the extension; conjugate to the
/// binary odometer.
fn cantor_left() -> Result<Fixture> {
    let b = diagram(
        "r",
        vec![level(&[("v0", &["r"]), ("v1", &["r"])])],
        vec![level(&[("v0", &["v0", "v1", "v0"]), ("v1", &["v1"])])],
    )?;
    let ext = rule(&b, &[("v0", "v1"), ("v1", "v0")])?;
    Ok(Fixture {
        name: "cantor-left",
        summary: "rank-two diagram whose extension swaps the two extreme pairs",
        parts: vec![("b", Part::Diagram(b)), ("ext_b", Part::Rule(ext))],
    })
}

/// Two odometers of different heights side by side.
fn cantor_right() -> Result<Fixture> {
    let b = diagram(
        "r",
        vec![level(&[("w0", &["r"]), ("w1", &["r", "r"])])],
        vec![level(&[("w0", &["w0", "w0"]), ("w1", &["w1", "w1"])])],
    )?;
    let ext = rule(&b, &[("w0", "w0"), ("w1", "w1")])?;
    Ok(Fixture {
        name: "cantor-right",
        summary: "disjoint union of two binary odometers",
        parts: vec![("b", Part::Diagram(b)), ("ext_b", Part::Rule(ext))],
    })
}

/// Simple diagram where the chosen min path is never maximal and the chosen
/// max path is never minimal.
fn decisive_case1() -> Result<Fixture> {
    let b = diagram(
        "r",
        vec![level(&[("a", &["r"]), ("b", &["r"])])],
        vec![level(&[("a", &["a", "b", "a"]), ("b", &["b", "a", "b"])])],
    )?;
    let ext = rule(&b, &[("a", "b"), ("b", "a")])?;
    let z = extreme_through(&b, Extreme::Min, "a")?;
    let y = extreme_through(&b, Extreme::Max, "a")?;
    Ok(Fixture {
        name: "decisive-case1",
        summary: "z not eventually maximal, y not eventually minimal",
        parts: vec![
            ("b", Part::Diagram(b)),
            ("ext_b", Part::Rule(ext)),
            ("z", Part::Path(z)),
            ("y", Part::Path(y)),
        ],
    })
}

/// Both chosen paths are extreme in both senses and the max set has empty
/// interior.
fn decisive_case2() -> Result<Fixture> {
    let b = diagram(
        "r",
        vec![level(&[("a", &["r"]), ("b", &["r"]), ("c", &["r"])])],
        vec![level(&[("a", &["a"]), ("b", &["a", "b", "c"]), ("c", &["c"])])],
    )?;
    let ext = rule(&b, &[("a", "a"), ("c", "c")])?;
    let z = extreme_through(&b, Extreme::Min, "c")?;
    let y = extreme_through(&b, Extreme::Max, "a")?;
    Ok(Fixture {
        name: "decisive-case2",
        summary: "z eventually maximal, y eventually minimal, max set with empty interior",
        parts: vec![
            ("b", Part::Diagram(b)),
            ("ext_b", Part::Rule(ext)),
            ("z", Part::Path(z)),
            ("y", Part::Path(y)),
        ],
    })
}

/// z is eventually maximal while y is not eventually minimal.
fn mixed_extremes() -> Result<Fixture> {
    let b = diagram(
        "r",
        vec![level(&[("a", &["r"]), ("e", &["r"])])],
        vec![level(&[("a", &["a"]), ("e", &["e", "a", "e"])])],
    )?;
    let ext = rule(&b, &[("a", "a"), ("e", "e")])?;
    let z = extreme_through(&b, Extreme::Min, "a")?;
    let y = extreme_through(&b, Extreme::Max, "e")?;
    Ok(Fixture {
        name: "mixed-extremes",
        summary: "z eventually maximal, y not eventually minimal",
        parts: vec![
            ("b", Part::Diagram(b)),
            ("ext_b", Part::Rule(ext)),
            ("z", Part::Path(z)),
            ("y", Part::Path(y)),
        ],
    })
}

type ConstructionInput = (
    OrderedBratteliDiagram,
    EventuallyPeriodicPath,
    EventuallyPeriodicPath,
    NaturalExtensionRule,
);

fn disjoint_odometers() -> Result<ConstructionInput> {
    let b = diagram(
        "r",
        vec![level(&[("a", &["r", "r"]), ("b", &["r", "r"])])],
        vec![level(&[("a", &["a", "a"]), ("b", &["b", "b"])])],
    )?;
    let ext = rule(&b, &[("a", "a"), ("b", "b")])?;
    let z = extreme_through(&b, Extreme::Min, "a")?;
    let y = extreme_through(&b, Extreme::Max, "b")?;
    Ok((b, z, y, ext))
}

fn construction(name: &'static str, (b, z, y, ext_b): ConstructionInput) -> Result<Fixture> {
    let res = build_counterexample(&b, &z, &y)?;
    let ext_c = res.lift_extension(&ext_b)?;
    Ok(Fixture {
        name,
        summary: "an isolated path x is added so that the induced map sends x to y and its successor to z",
        parts: vec![
            ("b", Part::Diagram(b)),
            ("c", Part::Diagram(res.b_prime.clone())),
            ("f", Part::Premorphism(res.premorphism.clone())),
            ("ext_b", Part::Rule(ext_b)),
            ("ext_c", Part::Rule(ext_c)),
            ("z", Part::Path(z)),
            ("y", Part::Path(y)),
            ("x", Part::Path(res.x.clone())),
            ("tx", Part::Path(res.tx)),
        ],
    })
}
