//! JSON loading and saving.
//!
//! Premorphism files refer to their diagrams inline, by file name (relative
//! to the premorphism file) or by fixture part (`"rank2:b"`).

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::diagram::{DiagramSpec, OrderedBratteliDiagram};
use crate::dynamics::{ExtensionRuleSpec, NaturalExtensionRule};
use crate::edgeset::{EdgeSetSpec, OrderedEdgeSet};
use crate::error::{Error, Result};
use crate::fixtures::fixture;
use crate::path::{EventuallyPeriodicPath, PathPrefix, PathSpec};
use crate::premorphism::{LevelMap, Premorphism};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DiagramRef {
    File { file: String },
    Fixture { fixture: String },
    Inline(DiagramSpec),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayersSpec {
    pub preamble: Vec<EdgeSetSpec>,
    pub cycle: Vec<EdgeSetSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PremorphismSpec {
    pub source: DiagramRef,
    pub target: DiagramRef,
    pub level_map: LevelMap,
    pub layers: LayersSpec,
}

pub fn parse_json<T: DeserializeOwned>(text: &str, context: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        context: context.to_string(),
        message: format!("line {} column {}: {e}", e.line(), e.column()),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        context: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_json(&text, &path.display().to_string())
}

/// Pretty JSON with a trailing newline; field order follows the type definitions.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value))?;
    Ok(())
}

pub fn diagram_from_json(text: &str) -> Result<OrderedBratteliDiagram> {
    OrderedBratteliDiagram::from_spec(&parse_json(text, "diagram")?)
}

pub fn load_diagram(path: &Path) -> Result<OrderedBratteliDiagram> {
    OrderedBratteliDiagram::from_spec(&read_json(path)?)
}

pub fn save_diagram(path: &Path, d: &OrderedBratteliDiagram) -> Result<()> {
    write_json(path, &d.to_spec())
}

/// Resolves `"name:part"`; a bare name means its `b` diagram.
pub fn fixture_diagram(reference: &str) -> Result<OrderedBratteliDiagram> {
    let (name, part) = reference.split_once(':').unwrap_or((reference, "b"));
    fixture(name)?.diagram(part).cloned()
}

pub fn resolve_diagram(r: &DiagramRef, base: &Path) -> Result<OrderedBratteliDiagram> {
    match r {
        DiagramRef::Inline(spec) => OrderedBratteliDiagram::from_spec(spec),
        DiagramRef::File { file } => load_diagram(&base.join(file)),
        DiagramRef::Fixture { fixture } => fixture_diagram(fixture),
    }
}

pub fn premorphism_from_spec(spec: &PremorphismSpec, base: &Path) -> Result<Premorphism> {
    let source = resolve_diagram(&spec.source, base)?;
    let target = resolve_diagram(&spec.target, base)?;
    spec.level_map.check()?;
    let n_pre = spec.layers.preamble.len();
    let layer = |n: usize, es: &EdgeSetSpec| -> Result<OrderedEdgeSet> {
        OrderedEdgeSet::from_spec(source.vertices(n)?, target.vertices(spec.level_map.at(n))?, es)
    };
    let pre = (spec.layers.preamble.iter().enumerate())
        .map(|(n, es)| layer(n, es))
        .collect::<Result<Vec<_>>>()?;
    let cyc = (spec.layers.cycle.iter().enumerate())
        .map(|(i, es)| layer(n_pre + i, es))
        .collect::<Result<Vec<_>>>()?;
    Premorphism::new(source, target, spec.level_map.clone(), pre, cyc)
}

/// Canonical form with both diagrams inline.
pub fn premorphism_to_spec(f: &Premorphism) -> PremorphismSpec {
    PremorphismSpec {
        source: DiagramRef::Inline(f.source().to_spec()),
        target: DiagramRef::Inline(f.target().to_spec()),
        level_map: f.level_map().clone(),
        layers: LayersSpec {
            preamble: f.layers_preamble().iter().map(OrderedEdgeSet::to_spec).collect(),
            cycle: f.layers_cycle().iter().map(OrderedEdgeSet::to_spec).collect(),
        },
    }
}

pub fn premorphism_from_json(text: &str) -> Result<Premorphism> {
    premorphism_from_spec(&parse_json(text, "premorphism")?, Path::new("."))
}

pub fn load_premorphism(path: &Path) -> Result<Premorphism> {
    let spec: PremorphismSpec = read_json(path)?;
    premorphism_from_spec(&spec, &parent_dir(path))
}

pub fn save_premorphism(path: &Path, f: &Premorphism) -> Result<()> {
    write_json(path, &premorphism_to_spec(f))
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}

/// A path file holds either a finite prefix or an infinite path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadedPath {
    Prefix(PathPrefix),
    Infinite(EventuallyPeriodicPath),
}

pub fn path_from_spec(d: &OrderedBratteliDiagram, spec: &PathSpec) -> Result<LoadedPath> {
    Ok(match spec.tail {
        None => LoadedPath::Prefix(PathPrefix::from_spec(d, spec)?),
        Some(_) => LoadedPath::Infinite(EventuallyPeriodicPath::from_spec(d, spec)?),
    })
}

pub fn load_path(d: &OrderedBratteliDiagram, path: &Path) -> Result<LoadedPath> {
    path_from_spec(d, &read_json(path)?)
}

pub fn load_prefix(d: &OrderedBratteliDiagram, path: &Path) -> Result<PathPrefix> {
    PathPrefix::from_spec(d, &read_json(path)?)
}

pub fn load_infinite_path(d: &OrderedBratteliDiagram, path: &Path) -> Result<EventuallyPeriodicPath> {
    EventuallyPeriodicPath::from_spec(d, &read_json(path)?)
}

pub fn load_rule(d: &OrderedBratteliDiagram, path: &Path) -> Result<NaturalExtensionRule> {
    let spec: ExtensionRuleSpec = read_json(path)?;
    NaturalExtensionRule::from_spec(d, &spec)
}

/// Serializable views of reports whose native form holds paths by index.
pub mod views {
    use serde::{Deserialize, Serialize};

    use crate::constructor::ConstructionResult;
    use crate::diagram::{ExtremeSet, OrderedBratteliDiagram};
    use crate::error::Result;
    use crate::factoring::{EquivCondition, FactoringReport, Verdict};
    use crate::path::{EventuallyPeriodicPath, PathPrefix, PathSpec, PrefixEdgeSpec};
    use crate::sadic::{cylinder_label, CylinderLabel, PipelineReport};

    fn edges(d: &OrderedBratteliDiagram, p: &PathPrefix) -> Result<Vec<PrefixEdgeSpec>> {
        Ok(p.to_spec(d)?.prefix)
    }

    fn path(d: &OrderedBratteliDiagram, p: &EventuallyPeriodicPath) -> Result<PathSpec> {
        p.to_spec(d)
    }

    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct WitnessJson {
        pub path: PathSpec,
        pub max_path: PathSpec,
        pub level: usize,
        pub expected_prefix: Vec<PrefixEdgeSpec>,
        pub actual_prefix: Vec<PrefixEdgeSpec>,
    }

    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct PrefixViolationJson {
        pub c_prefix: Vec<PrefixEdgeSpec>,
        pub expected: Vec<PrefixEdgeSpec>,
        pub actual: Vec<PrefixEdgeSpec>,
    }

    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct EquivConditionJson {
        pub max_path: PathSpec,
        pub preimage: PathSpec,
        pub condition: EquivCondition,
        pub holds: bool,
        pub failing_level: Option<usize>,
    }

    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct EquivConditionsJson {
        pub all_hold: bool,
        pub conditions: Vec<EquivConditionJson>,
    }

    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct FactoringReportJson {
        pub verdict: Verdict,
        pub depth: usize,
        pub sweep_depth: usize,
        pub swept_prefixes: usize,
        pub preimages_checked: usize,
        pub prefix_violations: Vec<PrefixViolationJson>,
        pub witnesses: Vec<WitnessJson>,
        pub equiv_conditions: EquivConditionsJson,
    }

    /// `b` is the source of the premorphism, `c` its target.
    pub fn factoring_report(
        b: &OrderedBratteliDiagram,
        c: &OrderedBratteliDiagram,
        r: &FactoringReport,
    ) -> Result<FactoringReportJson> {
        let conditions = r
            .equiv_conditions
            .iter()
            .map(|e| {
                Ok(EquivConditionJson {
                    max_path: path(b, &e.max_path)?,
                    preimage: path(c, &e.preimage)?,
                    condition: e.condition,
                    holds: e.holds,
                    failing_level: e.failing_level,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FactoringReportJson {
            verdict: r.verdict,
            depth: r.depth,
            sweep_depth: r.sweep_depth,
            swept_prefixes: r.swept_prefixes,
            preimages_checked: r.preimages_checked,
            prefix_violations: r
                .prefix_violations
                .iter()
                .map(|v| {
                    Ok(PrefixViolationJson {
                        c_prefix: edges(c, &v.c_prefix)?,
                        expected: edges(b, &v.expected)?,
                        actual: edges(b, &v.actual)?,
                    })
                })
                .collect::<Result<_>>()?,
            witnesses: r
                .witnesses
                .iter()
                .map(|w| {
                    Ok(WitnessJson {
                        path: path(c, &w.path)?,
                        max_path: path(b, &w.max_path)?,
                        level: w.level,
                        expected_prefix: edges(b, &w.expected_prefix)?,
                        actual_prefix: edges(b, &w.actual_prefix)?,
                    })
                })
                .collect::<Result<_>>()?,
            equiv_conditions: EquivConditionsJson {
                all_hold: conditions.iter().all(|c| c.holds),
                conditions,
            },
        })
    }

    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct ExtremeSetJson {
        pub kind: crate::diagram::Extreme,
        pub count: usize,
        pub witnesses: Vec<PathSpec>,
    }

    pub fn extreme_set(d: &OrderedBratteliDiagram, s: &ExtremeSet) -> Result<ExtremeSetJson> {
        Ok(ExtremeSetJson {
            kind: s.kind,
            count: s.count,
            witnesses: s.witnesses.iter().map(|p| path(d, p)).collect::<Result<_>>()?,
        })
    }

    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct PipelineWitnessJson {
        pub start: PathSpec,
        pub position: usize,
        pub word: Vec<CylinderLabel>,
        pub expected: CylinderLabel,
        pub actual: CylinderLabel,
    }

    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct PipelineReportJson {
        pub commutes: bool,
        pub index: usize,
        pub word_len: usize,
        pub letters_checked: usize,
        pub truncation_commutes: bool,
        pub words_checked: usize,
        pub shift_commutes: bool,
        pub witnesses: Vec<PipelineWitnessJson>,
    }

    pub fn pipeline_report(
        b: &OrderedBratteliDiagram,
        c: &OrderedBratteliDiagram,
        r: &PipelineReport,
    ) -> Result<PipelineReportJson> {
        Ok(PipelineReportJson {
            commutes: r.commutes(),
            index: r.index,
            word_len: r.word_len,
            letters_checked: r.letters_checked,
            truncation_commutes: r.truncation_commutes,
            words_checked: r.words_checked,
            shift_commutes: r.shift_commutes,
            witnesses: r
                .witnesses
                .iter()
                .map(|w| {
                    Ok(PipelineWitnessJson {
                        start: path(c, &w.start)?,
                        position: w.position,
                        word: w.word.iter().map(|p| cylinder_label(c, p)).collect::<Result<_>>()?,
                        expected: cylinder_label(b, &w.expected)?,
                        actual: cylinder_label(b, &w.actual)?,
                    })
                })
                .collect::<Result<_>>()?,
        })
    }

    #[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
    pub struct ConstructionJson {
        pub new_vertex: String,
        pub x: PathSpec,
        pub tx: PathSpec,
        pub records: Vec<crate::constructor::LevelRecord>,
    }

    pub fn construction(r: &ConstructionResult) -> Result<ConstructionJson> {
        Ok(ConstructionJson {
            new_vertex: r.new_vertex.clone(),
            x: path(&r.b_prime, &r.x)?,
            tx: path(&r.b_prime, &r.tx)?,
            records: r.records.clone(),
        })
    }
}
