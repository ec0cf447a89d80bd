//! The isolated-orbit construction `B → B'`, decisiveness classification of
//! `B'`, unique-min witnessing and the rank-two odometer reduction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diagram::{Extreme, Level, OrderedBratteliDiagram};
use crate::dynamics::NaturalExtensionRule;
use crate::edgeset::OrderedEdgeSet;
use crate::error::{Error, Result};
use crate::path::{Edge, EventuallyPeriodicPath, PathPrefix};
use crate::premorphism::{induced_map_infinite, lcm, LevelMap, Premorphism};

/// Fiber data of the added vertex at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    /// Vertex `y` passes through; its fiber supplies the first block.
    pub y_vertex: String,
    /// Vertex `z` passes through; its fiber supplies the second block.
    pub z_vertex: String,
    /// Size of the fiber of `y_vertex` (`m_n`).
    pub m: usize,
    /// Size of the fiber of `z_vertex` (`ℓ_n`).
    pub l: usize,
    /// Size of the fiber of the added vertex.
    pub fiber_len: usize,
    /// Rank of the edge of `x` at this level.
    pub x_rank: usize,
    /// Rank of the edge of `T x` at this level.
    pub tx_rank: usize,
}

#[derive(Clone, Debug)]
pub struct ConstructionResult {
    pub b: OrderedBratteliDiagram,
    pub b_prime: OrderedBratteliDiagram,
    pub premorphism: Premorphism,
    pub x: EventuallyPeriodicPath,
    pub tx: EventuallyPeriodicPath,
    pub z: EventuallyPeriodicPath,
    pub y: EventuallyPeriodicPath,
    /// Name of the vertex added at every level `n ≥ 1`; always index 0.
    pub new_vertex: String,
    pub records: Vec<LevelRecord>,
}

fn fresh_name(b: &OrderedBratteliDiagram) -> String {
    let mut name = String::from("o");
    let taken = |s: &str| {
        b.preamble_levels()
            .iter()
            .chain(b.cycle_levels())
            .any(|l| l.vertices().iter().any(|v| v == s))
            || b.root() == s
    };
    while taken(&name) {
        name.push('\'');
    }
    name
}

/// Adds one vertex per level carrying an isolated path `x` whose image is `y`
/// and whose successor's image is `z`.
pub fn build_counterexample(
    b: &OrderedBratteliDiagram,
    z: &EventuallyPeriodicPath,
    y: &EventuallyPeriodicPath,
) -> Result<ConstructionResult> {
    b.require_periodic()?;
    if !z.is_all_extreme(b, Extreme::Min)? {
        return Err(Error::NotExtreme("z must be an infinite min path".into()));
    }
    if !y.is_all_extreme(b, Extreme::Max)? {
        return Err(Error::NotExtreme("y must be an infinite max path".into()));
    }
    let p0 = 1.max(b.preamble_len()).max(z.shape().0).max(y.shape().0);
    let period = lcm(lcm(b.period(), z.shape().1), y.shape().1);
    let new = fresh_name(b);
    let mut levels = Vec::with_capacity(p0 + period);
    let mut records = Vec::with_capacity(p0 + period);
    for n in 1..=p0 + period {
        let level = b.level(n)?;
        let shift = |s: usize| if n == 1 { s } else { s + 1 };
        let (yv, zv) = (y.vertex_at(n), z.vertex_at(n));
        let h = level.fiber(yv);
        let g = level.fiber(zv);
        let (m, l) = (h.len(), g.len());
        let new_fiber: Vec<usize> = if n == 1 {
            h.iter().chain(g.iter()).copied().collect()
        } else {
            h[..m - 1]
                .iter()
                .map(|&s| shift(s))
                .chain(std::iter::once(0))
                .chain(g[1..].iter().map(|&s| shift(s)))
                .collect()
        };
        let mut vertices = vec![new.clone()];
        vertices.extend(level.vertices().iter().cloned());
        let mut fibers = vec![new_fiber.clone()];
        fibers.extend(level.fibers().iter().map(|f| f.iter().map(|&s| shift(s)).collect()));
        levels.push(Level::new(vertices, fibers));
        records.push(LevelRecord {
            level: n,
            y_vertex: level.vertices()[yv].clone(),
            z_vertex: level.vertices()[zv].clone(),
            m,
            l,
            fiber_len: new_fiber.len(),
            x_rank: m - 1,
            tx_rank: if n == 1 { m } else { m - 1 },
        });
    }
    let cycle = levels.split_off(p0);
    let b_prime = OrderedBratteliDiagram::new(b.root(), levels, cycle)?;

    let layer = |n: usize| -> Result<OrderedEdgeSet> {
        let domain = b.vertices(n)?.to_vec();
        if n == 0 {
            return Ok(OrderedEdgeSet::identity(&domain));
        }
        let mut codomain = vec![new.clone()];
        codomain.extend(domain.iter().cloned());
        let mut fibers = vec![vec![y.vertex_at(n), z.vertex_at(n)]];
        fibers.extend((0..domain.len()).map(|v| vec![v]));
        Ok(OrderedEdgeSet::new(domain, codomain, fibers))
    };
    let pre = (0..=p0).map(layer).collect::<Result<Vec<_>>>()?;
    let cyc = (p0 + 1..=p0 + period).map(layer).collect::<Result<Vec<_>>>()?;
    let premorphism = Premorphism::new(b.clone(), b_prime.clone(), LevelMap::identity(), pre, cyc)?;

    let edge = |n: usize, tx: bool| {
        let r = &records[b_prime.canonical_level(n) - 1];
        Edge {
            range: 0,
            rank: if tx { r.tx_rank } else { r.x_rank },
        }
    };
    let build = |tx: bool| {
        EventuallyPeriodicPath::new(
            &b_prime,
            PathPrefix::from_edges((1..=p0).map(|n| edge(n, tx)).collect()),
            (p0 + 1..=p0 + period).map(|n| edge(n, tx)).collect(),
        )
    };
    let x = build(false)?;
    let tx = build(true)?;
    Ok(ConstructionResult {
        b: b.clone(),
        b_prime,
        premorphism,
        x,
        tx,
        z: z.clone(),
        y: y.clone(),
        new_vertex: new,
        records,
    })
}

impl ConstructionResult {
    /// The copy of a path of `B` inside `B'`.
    pub fn embed(&self, p: &EventuallyPeriodicPath) -> Result<EventuallyPeriodicPath> {
        let (pre, len) = p.shape();
        let start = pre.max(self.b_prime.preamble_len());
        let len = lcm(len, self.b_prime.period());
        let shift = |e: Edge| Edge {
            range: e.range + 1,
            rank: e.rank,
        };
        EventuallyPeriodicPath::new(
            &self.b_prime,
            PathPrefix::from_edges(p.truncate(start).edges().iter().map(|&e| shift(e)).collect()),
            p.segment(start, start + len).into_iter().map(shift).collect(),
        )
    }

    /// Whether a path of `B'` stays in the copy of `B`.
    pub fn avoids_new_vertex(&self, p: &EventuallyPeriodicPath) -> bool {
        let (pre, len) = p.shape();
        (1..=pre + len).all(|n| p.vertex_at(n) != 0)
    }

    /// Extension rule on `B'`: copies of max paths of `B` follow `ext_b`, and
    /// a max path inside the added vertex goes to the copy of the image of its projection.
    pub fn lift_extension(&self, ext_b: &NaturalExtensionRule) -> Result<NaturalExtensionRule> {
        let mut pairs = Vec::new();
        for w in self.b_prime.count_extreme_paths(Extreme::Max)?.witnesses {
            let projected = induced_map_infinite(&self.premorphism, &w)?;
            let image = ext_b
                .image(&projected)
                .ok_or_else(|| Error::MaxPathNoExtension("rule on B misses a max path".into()))?;
            pairs.push((w, self.embed(image)?));
        }
        NaturalExtensionRule::new(&self.b_prime, pairs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decisiveness {
    Decisive,
    NotDecisive,
    SemiDecisiveOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisivenessClassification {
    pub z_eventually_maximal: bool,
    pub y_eventually_minimal: bool,
    pub max_set_interior_empty: bool,
    /// Equal numbers of max and min paths and a bijective extension rule on `B`.
    pub b_surrogate_holds: bool,
    /// `B` simple with infinite path space.
    pub simple_shortcut: bool,
    /// 1 when neither `z` is eventually max nor `y` eventually min,
    /// 2 when both are and the max set has empty interior.
    pub matched_case: Option<u8>,
    pub verdict: Decisiveness,
}

/// Whether some cylinder lies inside the set of max paths.
pub fn max_set_has_interior(b: &OrderedBratteliDiagram) -> Result<bool> {
    b.require_periodic()?;
    for n in 0..=b.preamble_len() + b.period() {
        for v in 0..b.width(n)? {
            let p = b.extreme_prefix_to(n, v, Extreme::Max)?;
            if b.cylinder_in_extreme(&p, Extreme::Max)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Decides decisiveness of `B'` from `z`, `y` and `B`, assuming `B` decisive.
///
/// If the checkable part of that assumption fails the verdict is `NotDecisive`.
pub fn classify_decisiveness(
    b: &OrderedBratteliDiagram,
    z: &EventuallyPeriodicPath,
    y: &EventuallyPeriodicPath,
    ext_b: &NaturalExtensionRule,
) -> Result<DecisivenessClassification> {
    let maxes = b.count_extreme_paths(Extreme::Max)?;
    let mins = b.count_extreme_paths(Extreme::Min)?;
    let surrogate = maxes.count == mins.count && ext_b.is_bijective(b)?;
    let z_em = z.is_eventually_extreme(b, Extreme::Max)?;
    let y_em = y.is_eventually_extreme(b, Extreme::Min)?;
    let interior_empty = !max_set_has_interior(b)?;
    let simple_shortcut = surrogate && b.is_simple()? && b.is_path_space_infinite()?;
    let matched_case = if !z_em && !y_em {
        Some(1)
    } else if z_em && y_em && interior_empty {
        Some(2)
    } else {
        None
    };
    let verdict = if !surrogate {
        Decisiveness::NotDecisive
    } else if matched_case.is_some() || simple_shortcut {
        Decisiveness::Decisive
    } else {
        Decisiveness::SemiDecisiveOnly
    };
    Ok(DecisivenessClassification {
        z_eventually_maximal: z_em,
        y_eventually_minimal: y_em,
        max_set_interior_empty: interior_empty,
        b_surrogate_holds: surrogate,
        simple_shortcut,
        matched_case,
        verdict,
    })
}

#[derive(Clone, Debug)]
pub struct UniqueMin {
    pub unique: bool,
    pub count: usize,
    pub witnesses: Vec<EventuallyPeriodicPath>,
}

pub fn unique_min_witness(b: &OrderedBratteliDiagram) -> Result<UniqueMin> {
    let set = b.count_extreme_paths(Extreme::Min)?;
    Ok(UniqueMin {
        unique: set.count == 1,
        count: set.count,
        witnesses: set.witnesses,
    })
}

#[derive(Clone, Debug)]
pub enum Rank2Outcome {
    /// No cross edges after telescoping: the system splits into two odometers.
    TwoOdometers {
        telescoped: OrderedBratteliDiagram,
        odometers: [OrderedBratteliDiagram; 2],
    },
    /// Alternating cross edges: the telescoped diagram maps onto a rank-one
    /// diagram by a premorphism with singleton preimages.
    OdometerConjugacy {
        telescoped: OrderedBratteliDiagram,
        conjugate: OrderedBratteliDiagram,
        premorphism: Premorphism,
    },
}

/// Blocks tried for the cycle part, as multiples of the joint period of the
/// extreme paths.
const RANK2_BLOCKS: [usize; 4] = [0, 1, 2, 3];

pub fn rank2_reduce(b: &OrderedBratteliDiagram, ext: &NaturalExtensionRule) -> Result<Rank2Outcome> {
    b.require_periodic()?;
    let (pre, c) = (b.preamble_len(), b.period());
    for n in pre + 1..=pre + c {
        if b.width(n)? != 2 {
            return Err(Error::NotRank2(format!("level {n} has {} vertices", b.width(n)?)));
        }
    }
    let maxes = b.count_extreme_paths(Extreme::Max)?.witnesses;
    let mins = b.count_extreme_paths(Extreme::Min)?.witnesses;
    if maxes.len() != 2 || mins.len() != 2 {
        return Err(Error::NotRank2(format!(
            "{} max and {} min paths, expected two of each",
            maxes.len(),
            mins.len()
        )));
    }
    let images = maxes
        .iter()
        .map(|y| {
            ext.image(y)
                .cloned()
                .ok_or_else(|| Error::MaxPathNoExtension("pairing misses a max path".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let all = maxes.iter().chain(mins.iter());
    let pstar = all.clone().map(|p| p.shape().0).max().unwrap().max(pre).max(1);
    let joint = all.fold(c, |acc, p| lcm(acc, p.shape().1));

    for mult in RANK2_BLOCKS {
        let (cuts_pre, block): (Vec<usize>, usize) = if mult == 0 {
            // Level by level after the first level where the extreme paths separate.
            let sep = (1..=pstar + joint)
                .find(|&p| (p..=pstar + 2 * joint).all(|n| b.width(n).ok() == Some(2) && separated(&maxes, &mins, n)));
            match sep {
                Some(p) => ((p..=pstar.max(p)).collect(), 1),
                None => continue,
            }
        } else {
            if !separated(&maxes, &mins, pstar) {
                continue;
            }
            (vec![pstar], joint * mult)
        };
        let last = *cuts_pre.last().unwrap();
        let cycle_cuts: Vec<usize> = if block == 1 {
            (last + 1..=last + joint).collect()
        } else {
            vec![last + block]
        };
        if let Some(outcome) = try_rank2(b, &maxes, &mins, &images, &cuts_pre, &cycle_cuts)? {
            return Ok(outcome);
        }
    }
    Err(Error::PatternMismatch(
        "neither separated odometers nor alternating cross edges found within three joint periods".into(),
    ))
}

fn separated(maxes: &[EventuallyPeriodicPath], mins: &[EventuallyPeriodicPath], n: usize) -> bool {
    maxes[0].vertex_at(n) != maxes[1].vertex_at(n) && mins[0].vertex_at(n) != mins[1].vertex_at(n)
}

fn try_rank2(
    b: &OrderedBratteliDiagram,
    maxes: &[EventuallyPeriodicPath],
    mins: &[EventuallyPeriodicPath],
    images: &[EventuallyPeriodicPath],
    cuts_pre: &[usize],
    cuts_cycle: &[usize],
) -> Result<Option<Rank2Outcome>> {
    let cuts: Vec<usize> = cuts_pre.iter().chain(cuts_cycle).copied().collect();
    let mut levels = Vec::with_capacity(cuts.len());
    let mut from = 0;
    for &to in &cuts {
        levels.push(b.composite_level(from, to)?);
        from = to;
    }
    let cycle = levels.split_off(cuts_pre.len());
    let telescoped = OrderedBratteliDiagram::new(b.root(), levels, cycle)?;
    // Put the first max path on index 0 everywhere.
    let mut orders = BTreeMap::new();
    for (m, &cut) in cuts.iter().enumerate() {
        let order = if maxes[0].vertex_at(cut) == 0 { vec![0, 1] } else { vec![1, 0] };
        orders.insert(m + 1, order);
    }
    if (1..=cuts.len()).any(|m| telescoped.width(m).ok() != Some(2)) {
        return Ok(None);
    }
    let t = telescoped.relabel(&orders)?;
    let on_zero = |p: &EventuallyPeriodicPath, cut: usize| p.vertex_at(cut) == orders[&cut_index(&cuts, cut)][0];
    // Which min path sits on index 0, and is it the same at every cut?
    let x0 = match mins.iter().position(|x| on_zero(x, cuts[0])) {
        Some(i) => i,
        None => return Ok(None),
    };
    if !cuts.iter().all(|&cut| on_zero(&mins[x0], cut)) {
        return Ok(None);
    }
    let same = images[0] == mins[x0];
    if images[1] != mins[if same { 1 - x0 } else { x0 }] {
        return Ok(None);
    }
    let depth = t.preamble_len() + t.period();
    for m in 2..=depth {
        let level = t.level(m)?;
        for k in 0..2 {
            let fiber = level.fiber(k);
            let ok = if same {
                fiber.iter().all(|&s| s == k)
            } else {
                fiber.len() % 2 == 1 && fiber.iter().enumerate().all(|(j, &s)| s == (k + j) % 2)
            };
            if !ok {
                return Ok(None);
            }
        }
    }
    let counts = t.path_counts(1)?;
    let root = t.root().to_string();
    if same {
        let odometer = |k: usize| -> Result<OrderedBratteliDiagram> {
            let first = Level::new(vec!["w".into()], vec![vec![0; counts[1][k] as usize]]);
            let sizes = |lv: &[Level]| -> Vec<Level> {
                lv.iter()
                    .map(|l| Level::new(vec!["w".into()], vec![vec![0; l.fiber(k).len()]]))
                    .collect()
            };
            let mut pre = vec![first];
            pre.extend(sizes(&t.preamble_levels()[1..]));
            OrderedBratteliDiagram::new(&root, pre, sizes(t.cycle_levels()))
        };
        return Ok(Some(Rank2Outcome::TwoOdometers {
            odometers: [odometer(0)?, odometer(1)?],
            telescoped: t,
        }));
    }
    let total = (counts[1][0] + counts[1][1]) as usize;
    let half = |lv: &[Level]| -> Vec<Level> {
        lv.iter()
            .map(|l| Level::new(vec!["w".into()], vec![vec![0; (l.fiber(0).len() + l.fiber(1).len()) / 2]]))
            .collect()
    };
    let mut pre = vec![Level::new(vec!["w".into()], vec![vec![0; total]])];
    pre.extend(half(&t.preamble_levels()[1..]));
    let conjugate = OrderedBratteliDiagram::new(&root, pre, half(t.cycle_levels()))?;
    let layer = |n: usize| -> Result<OrderedEdgeSet> {
        let domain = t.vertices(n)?.to_vec();
        if n == 0 {
            Ok(OrderedEdgeSet::identity(&domain))
        } else {
            Ok(OrderedEdgeSet::new(domain, vec!["w".into()], vec![vec![0, 1]]))
        }
    };
    let premorphism = Premorphism::new(
        t.clone(),
        conjugate.clone(),
        LevelMap::identity(),
        (0..=t.preamble_len()).map(layer).collect::<Result<_>>()?,
        (t.preamble_len() + 1..=t.preamble_len() + t.period())
            .map(layer)
            .collect::<Result<_>>()?,
    )?;
    Ok(Some(Rank2Outcome::OdometerConjugacy {
        telescoped: t,
        conjugate,
        premorphism,
    }))
}

fn cut_index(cuts: &[usize], cut: usize) -> usize {
    cuts.iter().position(|&c| c == cut).expect("known cut") + 1
}
