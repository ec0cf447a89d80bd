//! Seeded random instances for fuzzing: diagrams, premorphisms into them,
//! extension rules and doubled diagrams with a swap.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{Extreme, Level, OrderedBratteliDiagram};
use crate::dynamics::NaturalExtensionRule;
use crate::edgeset::OrderedEdgeSet;
use crate::error::Result;
use crate::premorphism::{LevelMap, Premorphism};

#[derive(Clone, Copy, Debug)]
pub struct GenOptions {
    pub max_width: usize,
    pub max_fiber: usize,
    pub max_preamble: usize,
    pub max_cycle: usize,
    /// Extra target vertices per level in random premorphisms.
    pub max_extras: usize,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            max_width: 4,
            max_fiber: 4,
            max_preamble: 2,
            max_cycle: 3,
            max_extras: 2,
        }
    }
}

const NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "g", "h", "k"];

fn names(width: usize) -> Vec<String> {
    NAMES[..width].iter().map(|s| s.to_string()).collect()
}

/// Fibers for a level of the given width over `prev` sources; every source
/// gets at least one outgoing edge.
fn random_fibers<R: Rng>(rng: &mut R, prev: usize, width: usize, max_fiber: usize) -> Vec<Vec<usize>> {
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); width];
    for s in 0..prev {
        let open: Vec<usize> = (0..width).filter(|&v| fibers[v].len() < max_fiber).collect();
        let v = *open.choose(rng).expect("capacity for every source");
        fibers[v].push(s);
    }
    for f in fibers.iter_mut() {
        let target = rng.gen_range(1..=max_fiber).max(f.len());
        while f.len() < target {
            f.push(rng.gen_range(0..prev));
        }
        f.shuffle(rng);
    }
    fibers
}

/// Root `a`; vertices of a level are named `a, b, c, …`.
pub fn random_diagram<R: Rng>(rng: &mut R, opts: &GenOptions) -> Result<OrderedBratteliDiagram> {
    let pre = rng.gen_range(0..=opts.max_preamble);
    let cyc = rng.gen_range(1..=opts.max_cycle);
    let mut widths = vec![1];
    for _ in 0..pre + cyc - 1 {
        widths.push(rng.gen_range(1..=opts.max_width));
    }
    widths.push(widths[pre]);
    let levels: Vec<Level> = (1..=pre + cyc)
        .map(|n| {
            let fibers = random_fibers(rng, widths[n - 1], widths[n], opts.max_fiber);
            Level::new(names(widths[n]), fibers)
        })
        .collect();
    let mut levels = levels;
    let cycle = levels.split_off(pre);
    OrderedBratteliDiagram::new("a", levels, cycle)
}

/// Retries until `accept` holds.
pub fn random_diagram_where<R: Rng>(
    rng: &mut R,
    opts: &GenOptions,
    accept: impl Fn(&OrderedBratteliDiagram) -> Result<bool>,
) -> Result<OrderedBratteliDiagram> {
    loop {
        let d = random_diagram(rng, opts)?;
        if accept(&d)? {
            return Ok(d);
        }
    }
}

/// Sends each max path to a random min path.
pub fn random_rule<R: Rng>(rng: &mut R, d: &OrderedBratteliDiagram) -> Result<NaturalExtensionRule> {
    let mins = d.count_extreme_paths(Extreme::Min)?.witnesses;
    let pairs = d
        .count_extreme_paths(Extreme::Max)?
        .witnesses
        .into_iter()
        .map(|y| (y, mins.choose(rng).expect("a min path exists").clone()))
        .collect();
    NaturalExtensionRule::new(d, pairs)
}

/// A premorphism from `b` onto a random target with the identity level map.
///
/// Each target level holds a copy of every source vertex plus a few extra
/// vertices, each standing for a word of source vertices; target edges are
/// read off by cutting the words of the next level into words of the
/// previous one, which makes every square commute.
pub fn random_premorphism<R: Rng>(rng: &mut R, b: &OrderedBratteliDiagram, opts: &GenOptions) -> Result<Premorphism> {
    b.require_periodic()?;
    let (p, c) = (b.preamble_len(), b.period());
    let canon = |n: usize| if n < p + c { n } else { p + (n - p) % c };

    // words[L][w]: the source word of target vertex w at canonical level L;
    // the first |V_L| entries are the copies.
    let mut words: Vec<Vec<Vec<usize>>> = Vec::with_capacity(p + c);
    for l in 0..p + c {
        let width = b.width(l)?;
        let mut ws: Vec<Vec<usize>> = (0..width).map(|v| vec![v]).collect();
        if l > 0 {
            for _ in 0..rng.gen_range(0..=opts.max_extras) {
                let len = rng.gen_range(1..=3);
                ws.push((0..len).map(|_| rng.gen_range(0..width)).collect());
            }
        }
        words.push(ws);
    }

    // parse[n - 1][w]: target fiber of w at level n, as indices into words[canon(n - 1)].
    let mut parse: Vec<Vec<Vec<usize>>> = Vec::with_capacity(p + c);
    for n in 1..=p + c {
        let (s, t) = (canon(n - 1), canon(n));
        let level = b.level(n)?;
        let copies = b.width(s)?;
        let mut fibers = Vec::new();
        for (w, word) in words[t].iter().enumerate() {
            let u: Vec<usize> = word.iter().flat_map(|&v| level.fiber(v).iter().copied()).collect();
            let mut fiber = Vec::new();
            let mut i = 0;
            while i < u.len() {
                let extras: Vec<usize> = (copies..words[s].len())
                    .filter(|&e| u[i..].starts_with(&words[s][e]))
                    .collect();
                let pick = if w >= b.width(t)? && !extras.is_empty() && rng.gen_bool(0.7) {
                    *extras.choose(rng).unwrap()
                } else {
                    u[i]
                };
                i += words[s][pick].len();
                fiber.push(pick);
            }
            fibers.push(fiber);
        }
        parse.push(fibers);
    }

    // Drop extras that never occur in a fiber of the next level.
    let mut alive: Vec<Vec<bool>> = words.iter().map(|ws| vec![true; ws.len()]).collect();
    loop {
        let mut changed = false;
        for l in 1..p + c {
            for e in b.width(l)?..words[l].len() {
                if !alive[l][e] {
                    continue;
                }
                let t = canon(l + 1);
                let used = parse[l].iter().enumerate().any(|(w, fib)| alive[t][w] && fib.contains(&e));
                if !used {
                    alive[l][e] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let index: Vec<Vec<usize>> = alive
        .iter()
        .map(|a| {
            let mut k = 0;
            a.iter()
                .map(|&x| {
                    let i = k;
                    k += usize::from(x);
                    i
                })
                .collect()
        })
        .collect();
    let vnames = |l: usize| -> Result<Vec<String>> {
        let copies = b.vertices(l)?.to_vec();
        let mut out = Vec::new();
        for w in 0..words[l].len() {
            if alive[l][w] {
                out.push(if w < copies.len() {
                    copies[w].clone()
                } else {
                    format!("x{}", w - copies.len())
                });
            }
        }
        Ok(out)
    };

    let mut levels = Vec::with_capacity(p + c);
    for n in 1..=p + c {
        let (s, t) = (canon(n - 1), canon(n));
        let fibers = (0..words[t].len())
            .filter(|&w| alive[t][w])
            .map(|w| parse[n - 1][w].iter().map(|&e| index[s][e]).collect())
            .collect();
        levels.push(Level::new(vnames(t)?, fibers));
    }
    let cycle = levels.split_off(p);
    let target = OrderedBratteliDiagram::new(b.root(), levels, cycle)?;

    let layer = |n: usize| -> Result<OrderedEdgeSet> {
        let l = canon(n);
        let fibers = (0..words[l].len())
            .filter(|&w| alive[l][w])
            .map(|w| words[l][w].clone())
            .collect();
        Ok(OrderedEdgeSet::new(b.vertices(n)?.to_vec(), vnames(l)?, fibers))
    };
    let pre = (0..=p).map(layer).collect::<Result<Vec<_>>>()?;
    let cyc = (p + 1..=p + c).map(layer).collect::<Result<Vec<_>>>()?;
    Premorphism::new(b.clone(), target, LevelMap::identity(), pre, cyc)
}

/// Two disjoint copies of `d` under a common root, with the premorphism that
/// exchanges them.
pub fn disjoint_double(d: &OrderedBratteliDiagram) -> Result<(OrderedBratteliDiagram, Premorphism)> {
    d.require_periodic()?;
    // The doubled cycle cannot end at the single root, so a cycle starting at
    // the root is unrolled once into the preamble.
    let (pre, cyc) = if d.preamble_len() == 0 {
        (d.period(), d.period())
    } else {
        (d.preamble_len(), d.period())
    };
    let mut levels = Vec::with_capacity(pre + cyc);
    for n in 1..=pre + cyc {
        let level = d.level(n)?;
        let prev = if n == 1 { 0 } else { d.width(n - 1)? };
        let mut vertices = Vec::new();
        let mut fibers = Vec::new();
        for k in 0..2 {
            for (v, name) in level.vertices().iter().enumerate() {
                vertices.push(format!("{name}.{k}"));
                fibers.push(level.fiber(v).iter().map(|&s| s + k * prev).collect());
            }
        }
        levels.push(Level::new(vertices, fibers));
    }
    let cycle = levels.split_off(pre);
    let dd = OrderedBratteliDiagram::new(d.root(), levels, cycle)?;
    let layer = |n: usize| -> Result<OrderedEdgeSet> {
        let vs = dd.vertices(n)?.to_vec();
        let half = vs.len() / 2;
        let fibers = if n == 0 {
            vec![vec![0]]
        } else {
            (0..vs.len()).map(|v| vec![(v + half) % vs.len()]).collect()
        };
        Ok(OrderedEdgeSet::new(vs.clone(), vs, fibers))
    };
    let pre_layers = (0..=pre).map(layer).collect::<Result<Vec<_>>>()?;
    let cyc_layers = (pre + 1..=pre + cyc).map(layer).collect::<Result<Vec<_>>>()?;
    let swap = Premorphism::new(dd.clone(), dd.clone(), LevelMap::identity(), pre_layers, cyc_layers)?;
    Ok((dd, swap))
}
