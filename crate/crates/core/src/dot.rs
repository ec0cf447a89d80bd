//! Graphviz output.

use std::fmt::Write;

use crate::diagram::OrderedBratteliDiagram;
use crate::error::{Error, Result};
use crate::premorphism::Premorphism;

fn node(prefix: &str, level: usize, v: usize) -> String {
    format!("{prefix}_{level}_{v}")
}

fn clusters(out: &mut String, d: &OrderedBratteliDiagram, prefix: &str, depth: usize) -> Result<()> {
    for n in 0..=depth {
        let _ = writeln!(out, "  subgraph cluster_{prefix}_{n} {{");
        let _ = writeln!(out, "    label=\"{prefix} level {n}\"; rank=same; style=dotted;");
        for (v, name) in d.vertices(n)?.iter().enumerate() {
            let _ = writeln!(out, "    {} [label=\"{name}\"];", node(prefix, n, v));
        }
        let _ = writeln!(out, "  }}");
    }
    for n in 1..=depth {
        let level = d.level(n)?;
        for (v, fiber) in level.fibers().iter().enumerate() {
            for (rank, &s) in fiber.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  {} -> {} [label=\"{rank}\"];",
                    node(prefix, n - 1, s),
                    node(prefix, n, v)
                );
            }
        }
    }
    Ok(())
}

/// Levels `0..=depth` top to bottom, edges labelled by rank.
pub fn render_diagram(d: &OrderedBratteliDiagram, depth: usize) -> Result<String> {
    if depth == 0 {
        return Err(Error::InvalidInput("dot depth must be at least 1".into()));
    }
    d.require_depth(depth)?;
    let mut out = String::from("digraph bratteli {\n  rankdir=TB;\n");
    clusters(&mut out, d, "B", depth)?;
    out.push_str("}\n");
    Ok(out)
}

/// Both diagrams, with the premorphism layers `F_0..F_depth` as dashed arrows.
pub fn render_premorphism(f: &Premorphism, depth: usize) -> Result<String> {
    if depth == 0 {
        return Err(Error::InvalidInput("dot depth must be at least 1".into()));
    }
    let target_depth = f.f(depth);
    f.source().require_depth(depth)?;
    f.target().require_depth(target_depth)?;
    let mut out = String::from("digraph premorphism {\n  rankdir=TB;\n");
    clusters(&mut out, f.source(), "B", depth)?;
    clusters(&mut out, f.target(), "C", target_depth)?;
    for n in 0..=depth {
        let layer = f.layer(n)?;
        for (w, fiber) in layer.fibers().iter().enumerate() {
            for (rank, &v) in fiber.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  {} -> {} [style=dashed, constraint=false, label=\"{rank}\"];",
                    node("B", n, v),
                    node("C", f.f(n), w)
                );
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
