//! Vershik successor and predecessor, extension rules and orbits.

use serde::{Deserialize, Serialize};

use crate::diagram::{Extreme, OrderedBratteliDiagram};
use crate::error::{Error, Result};
use crate::path::{Edge, EventuallyPeriodicPath, PathPrefix, PathSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Determined(PathPrefix),
    /// Every edge is extreme, so the prefix alone does not fix the result.
    NeedsExtension,
}

impl StepResult {
    pub fn determined(self) -> Option<PathPrefix> {
        match self {
            StepResult::Determined(p) => Some(p),
            StepResult::NeedsExtension => None,
        }
    }
}

/// `toward = Max` is the successor, `Min` the predecessor.
fn step_edges(d: &OrderedBratteliDiagram, edges: &mut [Edge], toward: Extreme) -> Result<bool> {
    for l in 0..edges.len() {
        let level = d.level(l + 1)?;
        let e = edges[l];
        if level.is_extreme(e.range, e.rank, toward) {
            continue;
        }
        let rank = match toward {
            Extreme::Max => e.rank + 1,
            Extreme::Min => e.rank - 1,
        };
        edges[l].rank = rank;
        let src = level.source(e.range, rank);
        let reset = d.extreme_prefix_to(l, src, toward.opposite())?;
        edges[..l].copy_from_slice(reset.edges());
        return Ok(true);
    }
    Ok(false)
}

pub fn vershik_step(d: &OrderedBratteliDiagram, p: &PathPrefix) -> Result<StepResult> {
    p.validate(d)?;
    let mut edges = p.edges().to_vec();
    Ok(if step_edges(d, &mut edges, Extreme::Max)? {
        StepResult::Determined(PathPrefix::from_edges(edges))
    } else {
        StepResult::NeedsExtension
    })
}

pub fn vershik_predecessor(d: &OrderedBratteliDiagram, p: &PathPrefix) -> Result<StepResult> {
    p.validate(d)?;
    let mut edges = p.edges().to_vec();
    Ok(if step_edges(d, &mut edges, Extreme::Min)? {
        StepResult::Determined(PathPrefix::from_edges(edges))
    } else {
        StepResult::NeedsExtension
    })
}

/// Where the Vershik map sends each infinite max path.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NaturalExtensionRule {
    pairs: Vec<(EventuallyPeriodicPath, EventuallyPeriodicPath)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionPairSpec {
    pub max: PathSpec,
    pub min: PathSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionRuleSpec {
    pub pairs: Vec<ExtensionPairSpec>,
}

impl NaturalExtensionRule {
    /// Checks that every max path gets exactly one image and that images are min paths.
    pub fn new(
        d: &OrderedBratteliDiagram,
        pairs: Vec<(EventuallyPeriodicPath, EventuallyPeriodicPath)>,
    ) -> Result<Self> {
        let maxes = d.count_extreme_paths(Extreme::Max)?;
        for (x, y) in &pairs {
            if !x.is_all_extreme(d, Extreme::Max)? {
                return Err(Error::NotExtreme("extension rule domain contains a non-max path".into()));
            }
            if !y.is_all_extreme(d, Extreme::Min)? {
                return Err(Error::NotExtreme("extension rule image is not a min path".into()));
            }
        }
        for w in &maxes.witnesses {
            let hits = pairs.iter().filter(|(x, _)| x == w).count();
            if hits != 1 {
                return Err(Error::InvalidInput(format!(
                    "extension rule assigns {hits} images to a max path"
                )));
            }
        }
        Ok(NaturalExtensionRule { pairs })
    }

    /// Sends every max path to the unique min path.
    pub fn unique_min(d: &OrderedBratteliDiagram) -> Result<Self> {
        let mins = d.count_extreme_paths(Extreme::Min)?;
        if mins.count != 1 {
            return Err(Error::MaxPathNoExtension(format!(
                "diagram has {} min paths, so there is no default extension",
                mins.count
            )));
        }
        let z = mins.witnesses[0].clone();
        let pairs = d
            .count_extreme_paths(Extreme::Max)?
            .witnesses
            .into_iter()
            .map(|y| (y, z.clone()))
            .collect();
        Ok(NaturalExtensionRule { pairs })
    }

    pub fn pairs(&self) -> &[(EventuallyPeriodicPath, EventuallyPeriodicPath)] {
        &self.pairs
    }

    pub fn image(&self, x: &EventuallyPeriodicPath) -> Option<&EventuallyPeriodicPath> {
        self.pairs.iter().find(|(m, _)| m == x).map(|(_, z)| z)
    }

    /// Whether distinct max paths go to distinct min paths covering all of them.
    pub fn is_bijective(&self, d: &OrderedBratteliDiagram) -> Result<bool> {
        let mins = d.count_extreme_paths(Extreme::Min)?;
        let mut images: Vec<&EventuallyPeriodicPath> = self.pairs.iter().map(|(_, z)| z).collect();
        images.sort();
        images.dedup();
        Ok(images.len() == self.pairs.len() && images.len() == mins.count)
    }

    pub fn to_spec(&self, d: &OrderedBratteliDiagram) -> Result<ExtensionRuleSpec> {
        Ok(ExtensionRuleSpec {
            pairs: self
                .pairs
                .iter()
                .map(|(x, z)| {
                    Ok(ExtensionPairSpec {
                        max: x.to_spec(d)?,
                        min: z.to_spec(d)?,
                    })
                })
                .collect::<Result<_>>()?,
        })
    }

    pub fn from_spec(d: &OrderedBratteliDiagram, spec: &ExtensionRuleSpec) -> Result<Self> {
        let pairs = spec
            .pairs
            .iter()
            .map(|p| {
                Ok((
                    EventuallyPeriodicPath::from_spec(d, &p.max)?,
                    EventuallyPeriodicPath::from_spec(d, &p.min)?,
                ))
            })
            .collect::<Result<_>>()?;
        NaturalExtensionRule::new(d, pairs)
    }
}

fn extend_max(
    d: &OrderedBratteliDiagram,
    x: &EventuallyPeriodicPath,
    ext: Option<&NaturalExtensionRule>,
) -> Result<EventuallyPeriodicPath> {
    if let Some(rule) = ext {
        return rule
            .image(x)
            .cloned()
            .ok_or_else(|| Error::MaxPathNoExtension("max path missing from the extension rule".into()));
    }
    let mins = d.count_extreme_paths(Extreme::Min)?;
    if mins.count == 1 {
        Ok(mins.witnesses.into_iter().next().unwrap())
    } else {
        Err(Error::MaxPathNoExtension(format!(
            "no rule given and the diagram has {} min paths",
            mins.count
        )))
    }
}

pub fn vershik_step_infinite(
    d: &OrderedBratteliDiagram,
    x: &EventuallyPeriodicPath,
    ext: Option<&NaturalExtensionRule>,
) -> Result<EventuallyPeriodicPath> {
    match x.first_non_extreme(d, Extreme::Max)? {
        None => extend_max(d, x, ext),
        Some(l) => {
            let (p, len) = x.shape();
            // Split so the changed edge sits inside the prefix; the tail is untouched.
            let cut = if l <= p { p } else { p + len * (l - p).div_ceil(len) };
            let mut edges = x.truncate(cut).into_edges();
            let changed = step_edges(d, &mut edges, Extreme::Max)?;
            debug_assert!(changed);
            EventuallyPeriodicPath::new(d, PathPrefix::from_edges(edges), x.segment(cut, cut + len))
        }
    }
}

pub fn is_eventually_extreme(d: &OrderedBratteliDiagram, x: &EventuallyPeriodicPath, kind: Extreme) -> Result<bool> {
    x.is_eventually_extreme(d, kind)
}

pub fn orbit_segment(
    d: &OrderedBratteliDiagram,
    x: &EventuallyPeriodicPath,
    len: usize,
    ext: Option<&NaturalExtensionRule>,
) -> Result<Vec<EventuallyPeriodicPath>> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return Ok(out);
    }
    out.push(x.clone());
    while out.len() < len {
        let next = vershik_step_infinite(d, out.last().unwrap(), ext)?;
        out.push(next);
    }
    Ok(out)
}

/// Depth-`k` prefixes of `x, Tx, …, T^{len-1}x`.
pub fn truncation_itinerary(
    d: &OrderedBratteliDiagram,
    x: &EventuallyPeriodicPath,
    k: usize,
    len: usize,
    ext: Option<&NaturalExtensionRule>,
) -> Result<Vec<PathPrefix>> {
    Ok(orbit_segment(d, x, len, ext)?
        .iter()
        .map(|y| y.truncate(k))
        .collect())
}
