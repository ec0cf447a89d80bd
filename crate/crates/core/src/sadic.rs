//! Word morphisms read off diagram levels and premorphism layers, tower words,
//! truncation codes and the block-code pipeline of an induced map.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::diagram::{AdjacencyMatrix, Extreme, OrderedBratteliDiagram};
use crate::dynamics::{truncation_itinerary, NaturalExtensionRule};
use crate::error::{Error, Result};
use crate::path::{EventuallyPeriodicPath, PathPrefix};
use crate::premorphism::{induced_map_at, induced_map_infinite, infinite_preimages, Premorphism};
use crate::tower::{paths_between, PathCounts, tower_unrank};

/// A non-erasing map from domain letters to words over the codomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SadicMorphism {
    domain: Vec<String>,
    codomain: Vec<String>,
    images: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismSpec {
    pub alphabet: Vec<String>,
    pub images: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismExport {
    pub levels: Vec<MorphismSpec>,
}

impl SadicMorphism {
    pub fn new(domain: Vec<String>, codomain: Vec<String>, images: Vec<Vec<usize>>) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::InvalidInput("one image per domain letter".into()));
        }
        if let Some(a) = images.iter().position(Vec::is_empty) {
            return Err(Error::InvalidInput(format!("image of {} is empty", domain[a])));
        }
        if images.iter().flatten().any(|&b| b >= codomain.len()) {
            return Err(Error::InvalidInput("image letter outside the codomain".into()));
        }
        Ok(SadicMorphism {
            domain,
            codomain,
            images,
        })
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn codomain(&self) -> &[String] {
        &self.codomain
    }

    pub fn image(&self, a: usize) -> &[usize] {
        &self.images[a]
    }

    pub fn images(&self) -> &[Vec<usize>] {
        &self.images
    }

    pub fn apply(&self, word: &[usize]) -> Vec<usize> {
        word.iter().flat_map(|&a| self.images[a].iter().copied()).collect()
    }

    /// `self` after `inner`: `a ↦ self(inner(a))`.
    pub fn after(&self, inner: &SadicMorphism) -> Result<SadicMorphism> {
        if inner.codomain != self.domain {
            return Err(Error::DomainMismatch(format!(
                "cannot substitute {:?} into words over {:?}",
                self.domain, inner.codomain
            )));
        }
        SadicMorphism::new(
            inner.domain.clone(),
            self.codomain.clone(),
            inner.images.iter().map(|w| self.apply(w)).collect(),
        )
    }

    /// Rows indexed by domain letters, columns by codomain letters.
    pub fn incidence_matrix(&self) -> AdjacencyMatrix {
        let rows = self
            .images
            .iter()
            .map(|w| {
                let mut row = vec![0u128; self.codomain.len()];
                for &b in w {
                    row[b] += 1;
                }
                row
            })
            .collect();
        AdjacencyMatrix { rows }
    }

    pub fn to_spec(&self) -> MorphismSpec {
        MorphismSpec {
            alphabet: self.domain.clone(),
            images: self
                .domain
                .iter()
                .zip(&self.images)
                .map(|(a, w)| (a.clone(), w.iter().map(|&b| self.codomain[b].clone()).collect()))
                .collect(),
        }
    }
}

pub fn is_letter_surjective(m: &SadicMorphism) -> bool {
    let mut seen = vec![false; m.codomain.len()];
    for &b in m.images.iter().flatten() {
        seen[b] = true;
    }
    seen.into_iter().all(|s| s)
}

/// `V_i → V_{i-1}*`: each vertex reads the sources of its fiber in rank order.
pub fn extract_morphism(d: &OrderedBratteliDiagram, i: usize) -> Result<SadicMorphism> {
    let level = d.level(i)?;
    SadicMorphism::new(level.vertices().to_vec(), d.vertices(i - 1)?.to_vec(), level.fibers().to_vec())
}

/// `σ_{i+1} ∘ ⋯ ∘ σ_j : V_j → V_i*`.
pub fn compose_morphisms(d: &OrderedBratteliDiagram, i: usize, j: usize) -> Result<SadicMorphism> {
    if i >= j {
        return Err(Error::InvalidInput(format!("composite needs i < j, got ({i}, {j}]")));
    }
    let mut m = extract_morphism(d, j)?;
    for k in (i + 1..j).rev() {
        m = extract_morphism(d, k)?.after(&m)?;
    }
    Ok(m)
}

/// `η_k : W_{f_k} → V_k*` reading the `F_k` fibers.
pub fn premorphism_eta(f: &Premorphism, k: usize) -> Result<SadicMorphism> {
    let layer = f.layer(k)?;
    SadicMorphism::new(layer.codomain().to_vec(), layer.domain().to_vec(), layer.fibers().to_vec())
}

/// `η_0, …, η_depth`.
pub fn premorphism_to_eta(f: &Premorphism, depth: usize) -> Result<Vec<SadicMorphism>> {
    (0..=depth).map(|k| premorphism_eta(f, k)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectangleFailure {
    pub level: usize,
    pub symbol: String,
    /// `σ^B_k ∘ η_k` applied to the symbol.
    pub via_source: Vec<String>,
    /// `η_{k-1} ∘ σ^C_{(f_{k-1}, f_k]}` applied to the symbol.
    pub via_target: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectangleReport {
    pub commutes: bool,
    pub depth: usize,
    pub failing_levels: Vec<usize>,
    pub failures: Vec<RectangleFailure>,
}

/// Compares both word maps `W_{f_k} → V_{k-1}*` for `k = 1..=depth`.
pub fn check_commuting_rectangles(f: &Premorphism, depth: usize) -> Result<RectangleReport> {
    let depth = depth.min(f.available_depth());
    let mut failures = Vec::new();
    let mut failing_levels = Vec::new();
    let mut eta_prev = premorphism_eta(f, 0)?;
    for k in 1..=depth {
        let eta = premorphism_eta(f, k)?;
        let via_source = extract_morphism(f.source(), k)?.after(&eta)?;
        let (a, b) = (f.f(k - 1), f.f(k));
        let via_target = if a == b {
            eta_prev.clone()
        } else {
            eta_prev.after(&compose_morphisms(f.target(), a, b)?)?
        };
        if via_source.domain() != via_target.domain() {
            return Err(Error::DomainMismatch(format!("rectangle {k} has different corners")));
        }
        let mut bad = false;
        for (w, sym) in via_source.domain().iter().enumerate() {
            if via_source.image(w) != via_target.image(w) {
                bad = true;
                let names = |m: &SadicMorphism| m.image(w).iter().map(|&v| m.codomain()[v].clone()).collect();
                failures.push(RectangleFailure {
                    level: k,
                    symbol: sym.clone(),
                    via_source: names(&via_source),
                    via_target: names(&via_target),
                });
            }
        }
        if bad {
            failing_levels.push(k);
        }
        eta_prev = eta;
    }
    Ok(RectangleReport {
        commutes: failures.is_empty(),
        depth,
        failing_levels,
        failures,
    })
}

/// Serialized cylinder: the edge ranks of a prefix and its terminal vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CylinderLabel {
    pub ranks: Vec<usize>,
    pub vertex: String,
}

pub fn cylinder_label(d: &OrderedBratteliDiagram, p: &PathPrefix) -> Result<CylinderLabel> {
    let n = p.len();
    let vertex = d.vertices(n)?[p.terminal(d)?].clone();
    Ok(CylinderLabel { ranks: p.ranks(), vertex })
}

/// All root paths to `v ∈ V_n` in tower order.
pub fn tower_paths(d: &OrderedBratteliDiagram, n: usize, v: usize) -> Result<Vec<PathPrefix>> {
    let counts = PathCounts::new(d, n)?;
    (0..counts.get(n, v)).map(|r| tower_unrank(d, &counts, n, v, r)).collect()
}

/// The level-`k` reading of the tower over `v ∈ V_m`: depth-`k` truncations of
/// the root paths to `v` in tower order.
pub fn tower_word(d: &OrderedBratteliDiagram, k: usize, m: usize, v: usize) -> Result<Vec<PathPrefix>> {
    if k > m {
        return Err(Error::InvalidInput(format!("tower word needs k ≤ m, got k = {k}, m = {m}")));
    }
    let mut word = Vec::new();
    let mut towers: HashMap<usize, Vec<PathPrefix>> = HashMap::new();
    for seg in paths_between(d, k, m, v)? {
        let u = match seg.first() {
            Some(e) => d.level(k + 1)?.source(e.range, e.rank),
            None => v,
        };
        if let Entry::Vacant(e) = towers.entry(u) {
            e.insert(tower_paths(d, k, u)?);
        }
        word.extend(towers[&u].iter().cloned());
    }
    Ok(word)
}

/// Truncation from level-`from` cylinders to level-`to` cylinders.
#[derive(Clone, Debug)]
pub struct OneBlockCode {
    pub from: usize,
    pub to: usize,
    table: HashMap<PathPrefix, PathPrefix>,
}

impl OneBlockCode {
    pub fn truncation(d: &OrderedBratteliDiagram, from: usize, to: usize) -> Result<Self> {
        if to > from {
            return Err(Error::InvalidInput("truncation cannot lengthen cylinders".into()));
        }
        let mut table = HashMap::new();
        for v in 0..d.width(from)? {
            for p in tower_paths(d, from, v)? {
                let q = p.truncate(to);
                table.insert(p, q);
            }
        }
        Ok(OneBlockCode { from, to, table })
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, letter: &PathPrefix) -> Option<&PathPrefix> {
        self.table.get(letter)
    }

    pub fn apply(&self, word: &[PathPrefix]) -> Result<Vec<PathPrefix>> {
        word.iter()
            .map(|p| {
                self.table.get(p).cloned().ok_or_else(|| Error::PrefixLengthMismatch { len: p.len() })
            })
            .collect()
    }
}

/// The code `α_k` from level-`k` to level-`(k-1)` cylinders.
pub fn one_block_code(d: &OrderedBratteliDiagram, k: usize) -> Result<OneBlockCode> {
    if k == 0 {
        return Err(Error::InvalidInput("one-block code needs k ≥ 1".into()));
    }
    OneBlockCode::truncation(d, k, k - 1)
}

/// Where an orbit word of the pipeline stops agreeing with the orbit of the image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineWitness {
    pub start: EventuallyPeriodicPath,
    pub position: usize,
    /// The `C`-itinerary up to and including `position`.
    pub word: Vec<PathPrefix>,
    pub expected: PathPrefix,
    pub actual: PathPrefix,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub index: usize,
    pub word_len: usize,
    /// Letters of the level-`f_i` cylinder alphabet checked for `π_{i-1}∘γ_i = β_i∘π_i`.
    pub letters_checked: usize,
    pub truncation_commutes: bool,
    pub words_checked: usize,
    pub shift_commutes: bool,
    pub witnesses: Vec<PipelineWitness>,
}

impl PipelineReport {
    pub fn commutes(&self) -> bool {
        self.truncation_commutes && self.shift_commutes
    }
}

/// Realizes `π_i` as the 1-block code on level-`f_i` cylinders of `C` given by
/// the induced map, checks its compatibility with the truncation codes on the
/// whole cylinder alphabet, and checks on orbit words that the image of a
/// `C`-itinerary is the `B`-itinerary of the image point.
///
/// Orbits start at the preimages of the max paths of `B` and at the min paths
/// of `C`: any failure of equivariance shows up on one of these.
pub fn sliding_block_pipeline(
    f: &Premorphism,
    i: usize,
    word_len: usize,
    ext_b: &NaturalExtensionRule,
    ext_c: &NaturalExtensionRule,
) -> Result<PipelineReport> {
    if i == 0 {
        return Err(Error::InvalidInput("pipeline index must be at least 1".into()));
    }
    let (b, c) = (f.source(), f.target());
    let (fi, fp) = (f.f(i), f.f(i - 1));
    let gamma = OneBlockCode::truncation(c, fi, fp)?;
    let beta = one_block_code(b, i)?;

    let mut letters = 0;
    let mut truncation_commutes = true;
    for w in 0..c.width(fi)? {
        for p in tower_paths(c, fi, w)? {
            letters += 1;
            let lhs = induced_map_at(f, i - 1, &gamma.get(&p).cloned().unwrap())?;
            let rhs = beta.get(&induced_map_at(f, i, &p)?).cloned().unwrap();
            if lhs != rhs {
                truncation_commutes = false;
            }
        }
    }

    let mut starts = Vec::new();
    for y in b.count_extreme_paths(Extreme::Max)?.witnesses {
        starts.extend(infinite_preimages(f, &y)?);
    }
    starts.extend(c.count_extreme_paths(Extreme::Min)?.witnesses);
    starts.sort();
    starts.dedup();

    let mut witnesses = Vec::new();
    for x in &starts {
        let c_word = truncation_itinerary(c, x, fi, word_len, Some(ext_c))?;
        let image: Vec<PathPrefix> = c_word
            .iter()
            .map(|p| induced_map_at(f, i, p))
            .collect::<Result<_>>()?;
        let b_word = truncation_itinerary(b, &induced_map_infinite(f, x)?, i, word_len, Some(ext_b))?;
        if let Some(t) = (0..word_len).find(|&t| image[t] != b_word[t]) {
            witnesses.push(PipelineWitness {
                start: x.clone(),
                position: t,
                word: c_word[..=t].to_vec(),
                expected: b_word[t].clone(),
                actual: image[t].clone(),
            });
        }
    }
    Ok(PipelineReport {
        index: i,
        word_len,
        letters_checked: letters,
        truncation_commutes,
        words_checked: starts.len(),
        shift_commutes: witnesses.is_empty(),
        witnesses,
    })
}
