//! Checks whether the induced map of a premorphism intertwines the
//! (extended) Vershik maps.

use serde::{Deserialize, Serialize};

use crate::diagram::Extreme;
use crate::dynamics::{vershik_step, vershik_step_infinite, NaturalExtensionRule, StepResult};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::path::{EventuallyPeriodicPath, PathPrefix};
use crate::premorphism::{induced_map_at, induced_with_counts, infinite_preimages, Premorphism};
use crate::tower::{tower_rank, tower_unrank, PathCounts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A target prefix whose step maps somewhere other than the step of its image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixViolation {
    pub c_prefix: PathPrefix,
    pub expected: PathPrefix,
    pub actual: PathPrefix,
}

/// `x` maps onto a max path but the image of its successor is not the
/// extension of that max path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoringWitness {
    pub path: EventuallyPeriodicPath,
    pub max_path: EventuallyPeriodicPath,
    /// First source level where the two images differ.
    pub level: usize,
    pub expected_prefix: PathPrefix,
    pub actual_prefix: PathPrefix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivCondition {
    /// The preimage is itself a max path: minimal premorphism edges must
    /// lead from the extension of the max path to the successor.
    MaxPreimage,
    /// The preimage is not a max path; `k` is the first level at which its
    /// successor differs from it only through the changed edge.
    NonMaxPreimage { k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivConditionReport {
    pub max_path: EventuallyPeriodicPath,
    pub preimage: EventuallyPeriodicPath,
    pub condition: EquivCondition,
    pub holds: bool,
    pub failing_level: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct FactoringReport {
    pub verdict: Verdict,
    pub depth: usize,
    /// Source level at which the exhaustive prefix sweep ran.
    pub sweep_depth: usize,
    pub swept_prefixes: usize,
    pub prefix_violations: Vec<PrefixViolation>,
    pub witnesses: Vec<FactoringWitness>,
    pub equiv_conditions: Vec<EquivConditionReport>,
    pub preimages_checked: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct FactoringOptions {
    pub depth: usize,
    /// Largest number of target prefixes the sweep may enumerate.
    pub sweep_budget: u128,
    pub exec: Execution,
}

impl FactoringOptions {
    pub fn new(depth: usize) -> Self {
        FactoringOptions {
            depth,
            sweep_budget: 1 << 16,
            exec: Execution::default(),
        }
    }
}

pub fn check_factoring(
    f: &Premorphism,
    depth: usize,
    ext_b: &NaturalExtensionRule,
    ext_c: &NaturalExtensionRule,
) -> Result<FactoringReport> {
    check_factoring_with(f, ext_b, ext_c, FactoringOptions::new(depth))
}

pub fn check_factoring_with(
    f: &Premorphism,
    ext_b: &NaturalExtensionRule,
    ext_c: &NaturalExtensionRule,
    opts: FactoringOptions,
) -> Result<FactoringReport> {
    let depth = opts.depth.max(1);
    let (sweep_depth, swept, prefix_violations) = prefix_sweep(f, depth, opts.sweep_budget, opts.exec)?;

    let (b, c) = (f.source(), f.target());
    let mut witnesses = Vec::new();
    let mut conditions = Vec::new();
    let mut checked = 0;
    for y in b.count_extreme_paths(Extreme::Max)?.witnesses {
        let ty = ext_b
            .image(&y)
            .ok_or_else(|| Error::MaxPathNoExtension("source rule misses a max path".into()))?;
        let expected = ty.truncate(depth);
        for x in infinite_preimages(f, &y)? {
            checked += 1;
            let x_is_max = x.is_all_extreme(c, Extreme::Max)?;
            let tx = if x_is_max {
                ext_c
                    .image(&x)
                    .cloned()
                    .ok_or_else(|| Error::MaxPathNoExtension("target rule misses a max path".into()))?
            } else {
                vershik_step_infinite(c, &x, None)?
            };
            let actual = induced_map_at(f, depth, &tx.truncate(f.f(depth)))?;
            if let Some(i) = (0..depth).find(|&i| expected.edges()[i] != actual.edges()[i]) {
                witnesses.push(FactoringWitness {
                    path: x.clone(),
                    max_path: y.clone(),
                    level: i + 1,
                    expected_prefix: expected.truncate(i + 1),
                    actual_prefix: actual.truncate(i + 1),
                });
            }
            conditions.push(structural_condition(f, depth, &y, ty, &x, &tx, x_is_max)?);
        }
    }
    let verdict = if prefix_violations.is_empty() && witnesses.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(FactoringReport {
        verdict,
        depth,
        sweep_depth,
        swept_prefixes: swept,
        prefix_violations,
        witnesses,
        equiv_conditions: conditions,
        preimages_checked: checked,
    })
}

/// Equivariance on every target prefix of length `f_k` where both steps are
/// determined, for the largest `k ≤ depth` within the budget.
fn prefix_sweep(
    f: &Premorphism,
    depth: usize,
    budget: u128,
    exec: Execution,
) -> Result<(usize, usize, Vec<PrefixViolation>)> {
    let (b, c) = (f.source(), f.target());
    let mut k = depth.min(f.available_depth());
    let counts = loop {
        let counts = PathCounts::new(c, f.f(k))?;
        if counts.total(f.f(k)) <= budget || k == 0 {
            break counts;
        }
        k -= 1;
    };
    let level = f.f(k);
    let b_counts = PathCounts::new(b, k)?;
    let mut jobs: Vec<(usize, u128)> = Vec::new();
    for w in 0..c.width(level)? {
        for r in 0..counts.get(level, w) {
            jobs.push((w, r));
        }
    }
    let results = exec::map(exec, &jobs, |&(w, r)| -> Result<Option<PrefixViolation>> {
        let p = tower_unrank(c, &counts, level, w, r)?;
        let next = match vershik_step(c, &p)? {
            StepResult::Determined(q) => q,
            StepResult::NeedsExtension => return Ok(None),
        };
        let image = induced_with_counts(f, k, &p, &counts, &b_counts)?;
        let expected = match vershik_step(b, &image)? {
            StepResult::Determined(q) => q,
            StepResult::NeedsExtension => return Ok(None),
        };
        let actual = induced_with_counts(f, k, &next, &counts, &b_counts)?;
        Ok((actual != expected).then_some(PrefixViolation {
            c_prefix: p,
            expected,
            actual,
        }))
    });
    let mut violations = Vec::new();
    for r in results {
        if let Some(v) = r? {
            violations.push(v);
        }
    }
    Ok((k, jobs.len(), violations))
}

/// Condition phrased through premorphism edges: at each level the successor of
/// `x` must enter the block whose source is the vertex of the extension of `y`.
fn structural_condition(
    f: &Premorphism,
    depth: usize,
    y: &EventuallyPeriodicPath,
    ty: &EventuallyPeriodicPath,
    x: &EventuallyPeriodicPath,
    tx: &EventuallyPeriodicPath,
    x_is_max: bool,
) -> Result<EquivConditionReport> {
    let c = f.target();
    let (b, k) = if x_is_max {
        (f.source(), usize::MAX)
    } else {
        let l = x.first_non_extreme(c, Extreme::Max)?.expect("x is not a max path");
        let mut k = 0;
        while f.f(k) < l {
            k += 1;
        }
        (f.source(), k)
    };
    let b_counts = PathCounts::new(b, depth)?;
    let c_counts = PathCounts::new(c, f.f(depth))?;
    let mut failing = None;
    for n in 1..=depth {
        let target_vertex = ty.vertex_at(n);
        let ok = if n < k {
            // Minimal premorphism edge into the vertex of T x.
            let w = tx.vertex_at(f.f(n));
            f.layer(n)?.fiber(w)[0] == target_vertex
        } else {
            // Successor of the premorphism edge carrying x.
            let w = x.vertex_at(f.f(n));
            let mut r = tower_rank(c, &c_counts, &x.truncate(f.f(n)))?;
            let fiber = f.layer(n)?.fiber(w);
            let mut pos = None;
            for (i, &v) in fiber.iter().enumerate() {
                let size = b_counts.get(n, v);
                if r < size {
                    pos = Some(i);
                    break;
                }
                r -= size;
            }
            let pos = pos.ok_or_else(|| Error::InvalidInput("tower heights disagree".into()))?;
            fiber.get(pos + 1) == Some(&target_vertex)
        };
        if !ok {
            failing = Some(n);
            break;
        }
    }
    Ok(EquivConditionReport {
        max_path: y.clone(),
        preimage: x.clone(),
        condition: if x_is_max {
            EquivCondition::MaxPreimage
        } else {
            EquivCondition::NonMaxPreimage { k }
        },
        holds: failing.is_none(),
        failing_level: failing,
    })
}
