use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use bratteli::constructor::{
    build_counterexample, classify_decisiveness, rank2_reduce, Decisiveness, Rank2Outcome,
};
use bratteli::diagram::{validate_diagram, DiagramSpec, Extreme, OrderedBratteliDiagram};
use bratteli::dot::{render_diagram, render_premorphism};
use bratteli::dynamics::{orbit_segment, vershik_predecessor, vershik_step, NaturalExtensionRule, StepResult};
use bratteli::factoring::{check_factoring_with, FactoringOptions, Verdict};
use bratteli::fixtures::{fixture, Part, FIXTURE_NAMES};
use bratteli::generate::{random_diagram, random_premorphism, GenOptions};
use bratteli::io::{self, views, LoadedPath};
use bratteli::path::{EventuallyPeriodicPath, PathPrefix};
use bratteli::premorphism::{
    equivalence_depth, equivalence_failures, fiber_bound, induced_map_infinite, induced_map_prefix,
    preimage_prefixes, validate_premorphism, Premorphism,
};
use bratteli::sadic::{
    check_commuting_rectangles, extract_morphism, premorphism_eta, sliding_block_pipeline, MorphismExport,
};
use bratteli::{Error, Result};

/// Ordered Bratteli diagrams, Vershik maps and premorphisms.
///
/// Diagram, path and rule arguments take a JSON file or `fixture:NAME:PART`.
#[derive(Parser)]
#[command(name = "bratteli", version)]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DiagramArg {
    /// Diagram JSON file.
    #[arg(long)]
    diagram: Option<PathBuf>,
    /// Built-in fixture, `NAME` or `NAME:PART` (default part `b`).
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Args, Clone)]
struct PremorphismArg {
    /// Premorphism JSON file.
    #[arg(long)]
    premorphism: Option<PathBuf>,
    /// Built-in fixture, `NAME` or `NAME:PART` (default part `f`).
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Args, Clone)]
struct RulesArg {
    /// Extension rule of the source diagram; defaults to the fixture's `ext_b`
    /// or to the unique min path.
    #[arg(long)]
    ext_b: Option<String>,
    /// Extension rule of the target diagram; defaults like `--ext-b`.
    #[arg(long)]
    ext_c: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a diagram file against every structural invariant.
    Validate {
        #[command(flatten)]
        d: DiagramArg,
    },
    /// Compose the levels between consecutive cuts.
    Telescope {
        #[command(flatten)]
        d: DiagramArg,
        /// Strictly increasing positive levels, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        cuts: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vershik successor (or predecessor) of a finite prefix.
    Step {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long)]
        prefix: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Orbit of an infinite path.
    Orbit {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long)]
        path: String,
        #[arg(long, default_value_t = 10)]
        len: usize,
        #[arg(long)]
        ext: Option<String>,
    },
    /// Infinite max (or min) paths.
    Maxpaths {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long)]
        min: bool,
    },
    /// Check a premorphism: shapes, surjectivity, ordered commutativity.
    PremorphValidate {
        #[command(flatten)]
        f: PremorphismArg,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Induced image of a target prefix or infinite path.
    Apply {
        #[command(flatten)]
        f: PremorphismArg,
        #[arg(long)]
        path: String,
    },
    /// Target prefixes mapped onto a source prefix.
    Preimages {
        #[command(flatten)]
        f: PremorphismArg,
        #[arg(long)]
        prefix: String,
    },
    /// Bound on preimage counts along each max path (or a given path).
    FiberBound {
        #[command(flatten)]
        f: PremorphismArg,
        #[arg(long)]
        path: Option<String>,
    },
    /// Whether two premorphisms induce the same map.
    Equivalent {
        #[command(flatten)]
        f: PremorphismArg,
        /// The second premorphism: a file or `fixture:NAME:PART`.
        #[arg(long)]
        other: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Add an isolated path to a diagram so the induced map breaks factoring.
    Construct {
        #[command(flatten)]
        d: DiagramArg,
        /// Infinite min path z.
        #[arg(long)]
        min: String,
        /// Infinite max path y.
        #[arg(long)]
        max: String,
        /// Extension rule of the diagram; lifted to the new diagram when given.
        #[arg(long)]
        ext: Option<String>,
        /// Output directory for the new diagram, premorphism, paths and rule.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether the constructed diagram is decisive.
    ClassifyDecisive {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long)]
        min: String,
        #[arg(long)]
        max: String,
        #[arg(long)]
        ext: String,
    },
    /// Reduce a rank-two diagram to odometers.
    Rank2Reduce {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long)]
        ext: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check whether the induced map is a topological factoring.
    CheckFactoring {
        #[command(flatten)]
        f: PremorphismArg,
        #[command(flatten)]
        rules: RulesArg,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        /// Most target prefixes enumerated by the exhaustive sweep.
        #[arg(long, default_value_t = 1 << 16)]
        sweep_budget: u128,
    },
    /// Word morphisms of a diagram, or the layer morphisms of a premorphism.
    SadicExport {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long, conflicts_with_all = ["diagram", "fixture"])]
        premorphism: Option<String>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Compare both word maps around every premorphism rectangle.
    Rectangles {
        #[command(flatten)]
        f: PremorphismArg,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Block-code realization of the induced map on orbit words.
    Pipeline {
        #[command(flatten)]
        f: PremorphismArg,
        #[command(flatten)]
        rules: RulesArg,
        #[arg(long, default_value_t = 2)]
        index: usize,
        #[arg(long, default_value_t = 100)]
        len: usize,
    },
    /// Graphviz rendering.
    Dot {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long, conflicts_with_all = ["diagram", "fixture"])]
        premorphism: Option<String>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random diagram, or random premorphism into a random diagram.
    Random {
        #[arg(value_enum)]
        kind: RandomKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RandomKind {
    Diagram,
    Premorphism,
}

#[derive(Subcommand)]
enum FixtureAction {
    List,
    /// Write every part of a fixture as JSON files.
    Export {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Outcome of a subcommand: success or a failing verdict.
enum Status {
    Ok,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit<T: Serialize>(json: bool, value: &T, human: impl FnOnce() -> String) {
    if json {
        print!("{}", io::to_json(value));
    } else {
        println!("{}", human());
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Ok
    } else {
        Status::Fail
    }
}

fn split_fixture(reference: &str, default_part: &'static str) -> (String, String) {
    match reference.split_once(':') {
        Some((n, p)) => (n.to_string(), p.to_string()),
        None => (reference.to_string(), default_part.to_string()),
    }
}

fn fixture_part(reference: &str, default_part: &'static str) -> Result<Part> {
    let (name, part) = split_fixture(reference, default_part);
    let fx = fixture(&name)?;
    fx.part(&part)
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("fixture {name} has no part {part}")))
}

fn load_diagram(d: &DiagramArg) -> Result<OrderedBratteliDiagram> {
    match (&d.diagram, &d.fixture) {
        (Some(p), None) => io::load_diagram(p),
        (None, Some(r)) => match fixture_part(r, "b")? {
            Part::Diagram(d) => Ok(d),
            _ => Err(Error::InvalidInput(format!("{r} is not a diagram"))),
        },
        _ => Err(Error::InvalidInput("give exactly one of --diagram and --fixture".into())),
    }
}

fn premorphism_ref(r: &str) -> Result<Premorphism> {
    match r.strip_prefix("fixture:") {
        Some(rest) => match fixture_part(rest, "f")? {
            Part::Premorphism(f) => Ok(f),
            _ => Err(Error::InvalidInput(format!("{rest} is not a premorphism"))),
        },
        None => io::load_premorphism(Path::new(r)),
    }
}

fn load_premorphism(f: &PremorphismArg) -> Result<Premorphism> {
    match (&f.premorphism, &f.fixture) {
        (Some(p), None) => io::load_premorphism(p),
        (None, Some(r)) => premorphism_ref(&format!("fixture:{r}")),
        _ => Err(Error::InvalidInput("give exactly one of --premorphism and --fixture".into())),
    }
}

fn load_path(d: &OrderedBratteliDiagram, r: &str) -> Result<LoadedPath> {
    match r.strip_prefix("fixture:") {
        Some(rest) => match fixture_part(rest, "y")? {
            Part::Path(p) => Ok(LoadedPath::Infinite(p)),
            _ => Err(Error::InvalidInput(format!("{rest} is not a path"))),
        },
        None => io::load_path(d, Path::new(r)),
    }
}

fn load_infinite(d: &OrderedBratteliDiagram, r: &str) -> Result<EventuallyPeriodicPath> {
    match load_path(d, r)? {
        LoadedPath::Infinite(p) => Ok(p),
        LoadedPath::Prefix(_) => Err(Error::InvalidPath(format!("{r} has no infinite tail"))),
    }
}

fn load_prefix(d: &OrderedBratteliDiagram, r: &str) -> Result<PathPrefix> {
    match load_path(d, r)? {
        LoadedPath::Prefix(p) => Ok(p),
        LoadedPath::Infinite(_) => Err(Error::InvalidPath(format!("{r} is infinite; a prefix is expected"))),
    }
}

fn load_rule(d: &OrderedBratteliDiagram, r: &str) -> Result<NaturalExtensionRule> {
    match r.strip_prefix("fixture:") {
        Some(rest) => match fixture_part(rest, "ext_b")? {
            Part::Rule(rule) => Ok(rule),
            _ => Err(Error::InvalidInput(format!("{rest} is not an extension rule"))),
        },
        None => io::load_rule(d, Path::new(r)),
    }
}

/// Explicit rule, else the fixture's part, else the unique-min rule.
fn rule_or_default(
    d: &OrderedBratteliDiagram,
    explicit: &Option<String>,
    fixture_ref: &Option<String>,
    part: &str,
) -> Result<NaturalExtensionRule> {
    if let Some(r) = explicit {
        return load_rule(d, r);
    }
    if let Some(fx) = fixture_ref {
        let (name, _) = split_fixture(fx, "f");
        if let Some(Part::Rule(rule)) = fixture(&name)?.part(part) {
            return Ok(rule.clone());
        }
    }
    NaturalExtensionRule::unique_min(d)
}

fn prefix_text(d: &OrderedBratteliDiagram, p: &PathPrefix) -> String {
    p.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let name = d.vertices(i + 1).map(|v| v[e.range].clone()).unwrap_or_default();
            format!("{name}#{}", e.rank)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn infinite_text(d: &OrderedBratteliDiagram, x: &EventuallyPeriodicPath) -> String {
    let (p, l) = x.shape();
    let head = prefix_text(d, x.prefix());
    let tail = prefix_text(d, &x.truncate(p + l)).split(' ').skip(p).collect::<Vec<_>>().join(" ");
    format!("{head} ({tail})^∞")
}

fn write_out<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    match out {
        Some(p) => io::write_json(p, value),
        None => {
            print!("{}", io::to_json(value));
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<Status> {
    let json = cli.json;
    match &cli.command {
        Command::Validate { d } => {
            let spec: DiagramSpec = match (&d.diagram, &d.fixture) {
                (Some(p), None) => io::read_json(p)?,
                _ => load_diagram(d)?.to_spec(),
            };
            let report = validate_diagram(&spec);
            emit(json, &report, || {
                if report.is_valid() {
                    "valid".to_string()
                } else {
                    report.to_string()
                }
            });
            Ok(status(report.is_valid()))
        }
        Command::Telescope { d, cuts, out } => {
            let dg = load_diagram(d)?;
            let t = dg.telescope(cuts, *cuts.last().unwrap_or(&0))?;
            write_out(out, &t.to_spec())?;
            Ok(Status::Ok)
        }
        Command::Step { d, prefix, inverse } => {
            let dg = load_diagram(d)?;
            let p = load_prefix(&dg, prefix)?;
            let r = if *inverse {
                vershik_predecessor(&dg, &p)?
            } else {
                vershik_step(&dg, &p)?
            };
            match r {
                StepResult::Determined(q) => {
                    emit(json, &json!({"result": "determined", "prefix": q.to_spec(&dg)?}), || {
                        prefix_text(&dg, &q)
                    });
                }
                StepResult::NeedsExtension => {
                    emit(json, &json!({"result": "needs_extension"}), || {
                        "every edge is extreme; the step needs an extension rule".to_string()
                    });
                }
            }
            Ok(Status::Ok)
        }
        Command::Orbit { d, path, len, ext } => {
            let dg = load_diagram(d)?;
            let x = load_infinite(&dg, path)?;
            let rule = ext.as_ref().map(|r| load_rule(&dg, r)).transpose()?;
            let orbit = orbit_segment(&dg, &x, *len, rule.as_ref())?;
            let specs = orbit.iter().map(|p| p.to_spec(&dg)).collect::<Result<Vec<_>>>()?;
            emit(json, &specs, || {
                orbit.iter().map(|p| infinite_text(&dg, p)).collect::<Vec<_>>().join("\n")
            });
            Ok(Status::Ok)
        }
        Command::Maxpaths { d, min } => {
            let dg = load_diagram(d)?;
            let kind = if *min { Extreme::Min } else { Extreme::Max };
            let set = dg.count_extreme_paths(kind)?;
            emit(json, &views::extreme_set(&dg, &set)?, || {
                let mut s = format!("{} {:?} paths", set.count, kind);
                for w in &set.witnesses {
                    s.push_str(&format!("\n  {}", infinite_text(&dg, w)));
                }
                s
            });
            Ok(Status::Ok)
        }
        Command::PremorphValidate { f, depth } => {
            let f = load_premorphism(f)?;
            let depth = depth.unwrap_or_else(|| f.certified_depth());
            let report = validate_premorphism(&f, depth);
            emit(json, &report, || {
                if report.is_valid() {
                    format!("valid through depth {depth}")
                } else {
                    report.to_string()
                }
            });
            Ok(status(report.is_valid()))
        }
        Command::Apply { f, path } => {
            let f = load_premorphism(f)?;
            match load_path(f.target(), path)? {
                LoadedPath::Prefix(p) => {
                    let img = induced_map_prefix(&f, &p)?;
                    emit(json, &img.to_spec(f.source())?, || prefix_text(f.source(), &img));
                }
                LoadedPath::Infinite(x) => {
                    let img = induced_map_infinite(&f, &x)?;
                    emit(json, &img.to_spec(f.source())?, || infinite_text(f.source(), &img));
                }
            }
            Ok(Status::Ok)
        }
        Command::Preimages { f, prefix } => {
            let f = load_premorphism(f)?;
            let p = load_prefix(f.source(), prefix)?;
            let pre = preimage_prefixes(&f, &p)?;
            let specs = pre.iter().map(|q| q.to_spec(f.target())).collect::<Result<Vec<_>>>()?;
            emit(json, &specs, || {
                pre.iter().map(|q| prefix_text(f.target(), q)).collect::<Vec<_>>().join("\n")
            });
            Ok(Status::Ok)
        }
        Command::FiberBound { f, path } => {
            let f = load_premorphism(f)?;
            let ys = match path {
                Some(r) => vec![load_infinite(f.source(), r)?],
                None => f.source().count_extreme_paths(Extreme::Max)?.witnesses,
            };
            let mut rows = Vec::new();
            for y in &ys {
                rows.push(json!({"path": y.to_spec(f.source())?, "bound": fiber_bound(&f, y)?}));
            }
            emit(json, &rows, || {
                ys.iter()
                    .zip(&rows)
                    .map(|(y, r)| format!("{}  K = {}", infinite_text(f.source(), y), r["bound"]["bound"]))
                    .collect::<Vec<_>>()
                    .join("\n")
            });
            Ok(Status::Ok)
        }
        Command::Equivalent { f, other, depth } => {
            let f = load_premorphism(f)?;
            let g = premorphism_ref(other)?;
            let depth = depth.unwrap_or_else(|| equivalence_depth(&f, &g));
            let failures = equivalence_failures(&f, &g, depth)?;
            let eq = failures.is_empty();
            emit(json, &json!({"equivalent": eq, "depth": depth, "failing_levels": failures}), || {
                if eq {
                    format!("equivalent (checked through level {depth})")
                } else {
                    format!("not equivalent; levels {failures:?} differ")
                }
            });
            Ok(status(eq))
        }
        Command::Construct { d, min, max, ext, out } => {
            let b = load_diagram(d)?;
            let z = load_infinite(&b, min)?;
            let y = load_infinite(&b, max)?;
            let res = build_counterexample(&b, &z, &y)?;
            if let Some(r) = ext {
                let rule = load_rule(&b, r)?;
                if rule.image(&y) == Some(&z) {
                    eprintln!("warning: z is the image of y under the extension rule, so factoring is not broken");
                }
                if let Some(dir) = out {
                    let lifted = res.lift_extension(&rule)?;
                    std::fs::create_dir_all(dir)?;
                    io::write_json(&dir.join("ext_b.json"), &rule.to_spec(&b)?)?;
                    io::write_json(&dir.join("ext_c.json"), &lifted.to_spec(&res.b_prime)?)?;
                }
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(dir)?;
                io::save_diagram(&dir.join("b_prime.json"), &res.b_prime)?;
                io::save_premorphism(&dir.join("premorphism.json"), &res.premorphism)?;
                io::write_json(&dir.join("x.json"), &res.x.to_spec(&res.b_prime)?)?;
                io::write_json(&dir.join("tx.json"), &res.tx.to_spec(&res.b_prime)?)?;
            }
            let view = views::construction(&res)?;
            emit(json, &view, || {
                format!(
                    "new vertex {} on every level\nx  = {}\nTx = {}",
                    res.new_vertex,
                    infinite_text(&res.b_prime, &res.x),
                    infinite_text(&res.b_prime, &res.tx)
                )
            });
            Ok(Status::Ok)
        }
        Command::ClassifyDecisive { d, min, max, ext } => {
            let b = load_diagram(d)?;
            let z = load_infinite(&b, min)?;
            let y = load_infinite(&b, max)?;
            let rule = load_rule(&b, ext)?;
            let c = classify_decisiveness(&b, &z, &y, &rule)?;
            emit(json, &c, || {
                format!(
                    "{:?} (case {})\n  z eventually max: {}\n  y eventually min: {}\n  max set interior empty: {}\n  surrogate: {}\n  simple shortcut: {}",
                    c.verdict,
                    c.matched_case.map_or("none".to_string(), |k| k.to_string()),
                    c.z_eventually_maximal,
                    c.y_eventually_minimal,
                    c.max_set_interior_empty,
                    c.b_surrogate_holds,
                    c.simple_shortcut
                )
            });
            Ok(status(c.verdict == Decisiveness::Decisive))
        }
        Command::Rank2Reduce { d, ext, out } => {
            let b = load_diagram(d)?;
            let rule = load_rule(&b, ext)?;
            match rank2_reduce(&b, &rule)? {
                Rank2Outcome::TwoOdometers { telescoped, odometers } => {
                    if let Some(dir) = out {
                        std::fs::create_dir_all(dir)?;
                        io::save_diagram(&dir.join("telescoped.json"), &telescoped)?;
                        io::save_diagram(&dir.join("odometer0.json"), &odometers[0])?;
                        io::save_diagram(&dir.join("odometer1.json"), &odometers[1])?;
                    }
                    let v = json!({
                        "outcome": "two_odometers",
                        "telescoped": telescoped.to_spec(),
                        "odometers": [odometers[0].to_spec(), odometers[1].to_spec()],
                    });
                    emit(json, &v, || "two odometers".to_string());
                }
                Rank2Outcome::OdometerConjugacy { telescoped, conjugate, premorphism } => {
                    if let Some(dir) = out {
                        std::fs::create_dir_all(dir)?;
                        io::save_diagram(&dir.join("telescoped.json"), &telescoped)?;
                        io::save_diagram(&dir.join("conjugate.json"), &conjugate)?;
                        io::save_premorphism(&dir.join("premorphism.json"), &premorphism)?;
                    }
                    let v = json!({
                        "outcome": "odometer_conjugacy",
                        "telescoped": telescoped.to_spec(),
                        "conjugate": conjugate.to_spec(),
                        "premorphism": io::premorphism_to_spec(&premorphism),
                    });
                    emit(json, &v, || "conjugate to an odometer".to_string());
                }
            }
            Ok(Status::Ok)
        }
        Command::CheckFactoring { f: farg, rules, depth, sweep_budget } => {
            let f = load_premorphism(farg)?;
            let ext_b = rule_or_default(f.source(), &rules.ext_b, &farg.fixture, "ext_b")?;
            let ext_c = rule_or_default(f.target(), &rules.ext_c, &farg.fixture, "ext_c")?;
            let mut opts = FactoringOptions::new(*depth);
            opts.sweep_budget = *sweep_budget;
            let r = check_factoring_with(&f, &ext_b, &ext_c, opts)?;
            let view = views::factoring_report(f.source(), f.target(), &r)?;
            emit(json, &view, || {
                let mut s = format!(
                    "{:?}: swept {} prefixes at level {}, checked {} preimages of max paths",
                    r.verdict, r.swept_prefixes, r.sweep_depth, r.preimages_checked
                );
                for w in &r.witnesses {
                    s.push_str(&format!(
                        "\n  witness {} (images differ from level {})",
                        infinite_text(f.target(), &w.path),
                        w.level
                    ));
                }
                for v in &r.prefix_violations {
                    s.push_str(&format!("\n  prefix {} breaks equivariance", prefix_text(f.target(), &v.c_prefix)));
                }
                s
            });
            Ok(status(r.verdict == Verdict::Pass))
        }
        Command::SadicExport { d, premorphism, depth } => {
            let levels = match premorphism {
                Some(r) => {
                    let f = premorphism_ref(r)?;
                    (0..=*depth)
                        .map(|k| premorphism_eta(&f, k).map(|m| m.to_spec()))
                        .collect::<Result<Vec<_>>>()?
                }
                None => {
                    let dg = load_diagram(d)?;
                    (1..=*depth)
                        .map(|i| extract_morphism(&dg, i).map(|m| m.to_spec()))
                        .collect::<Result<Vec<_>>>()?
                }
            };
            let export = MorphismExport { levels };
            emit(json, &export, || {
                export
                    .levels
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let images = m
                            .images
                            .iter()
                            .map(|(a, w)| format!("{a} -> {}", w.join("")))
                            .collect::<Vec<_>>()
                            .join(", ");
                        format!("{i}: {images}")
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            });
            Ok(Status::Ok)
        }
        Command::Rectangles { f, depth } => {
            let f = load_premorphism(f)?;
            let depth = depth.unwrap_or_else(|| f.certified_depth());
            let r = check_commuting_rectangles(&f, depth)?;
            emit(json, &r, || {
                if r.commutes {
                    format!("all rectangles commute through level {}", r.depth)
                } else {
                    format!("rectangles fail at levels {:?}", r.failing_levels)
                }
            });
            Ok(status(r.commutes))
        }
        Command::Pipeline { f: farg, rules, index, len } => {
            let f = load_premorphism(farg)?;
            let ext_b = rule_or_default(f.source(), &rules.ext_b, &farg.fixture, "ext_b")?;
            let ext_c = rule_or_default(f.target(), &rules.ext_c, &farg.fixture, "ext_c")?;
            let r = sliding_block_pipeline(&f, *index, *len, &ext_b, &ext_c)?;
            let view = views::pipeline_report(f.source(), f.target(), &r)?;
            emit(json, &view, || {
                let mut s = format!(
                    "truncation rectangle: {} ({} letters); orbit words: {} ({} words of length {})",
                    r.truncation_commutes, r.letters_checked, r.shift_commutes, r.words_checked, r.word_len
                );
                for w in &r.witnesses {
                    s.push_str(&format!(
                        "\n  orbit of {} disagrees at position {}",
                        infinite_text(f.target(), &w.start),
                        w.position
                    ));
                }
                s
            });
            Ok(status(r.commutes()))
        }
        Command::Dot { d, premorphism, depth, out } => {
            let text = match premorphism {
                Some(r) => render_premorphism(&premorphism_ref(r)?, *depth)?,
                None => render_diagram(&load_diagram(d)?, *depth)?,
            };
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
            Ok(Status::Ok)
        }
        Command::Random { kind, seed, out } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let opts = GenOptions::default();
            let d = random_diagram(&mut rng, &opts)?;
            match kind {
                RandomKind::Diagram => write_out(out, &d.to_spec())?,
                RandomKind::Premorphism => {
                    write_out(out, &io::premorphism_to_spec(&random_premorphism(&mut rng, &d, &opts)?))?
                }
            }
            Ok(Status::Ok)
        }
        Command::Fixtures { action } => match action {
            FixtureAction::List => {
                let mut rows = Vec::new();
                for name in FIXTURE_NAMES {
                    let fx = fixture(name)?;
                    let parts: Vec<&str> = fx.parts.iter().map(|(n, _)| *n).collect();
                    rows.push(json!({"name": name, "summary": fx.summary, "parts": parts}));
                }
                emit(json, &rows, || {
                    rows.iter()
                        .map(|r| format!("{:<28} {}", r["name"].as_str().unwrap(), r["summary"].as_str().unwrap()))
                        .collect::<Vec<_>>()
                        .join("\n")
                });
                Ok(Status::Ok)
            }
            FixtureAction::Export { name, out } => {
                let fx = fixture(name)?;
                std::fs::create_dir_all(out)?;
                let b = fx.diagram("b").ok().cloned();
                let c = fx.diagram("c").ok().cloned();
                for (part, value) in &fx.parts {
                    let file = out.join(format!("{part}.json"));
                    // Rules and paths on the target diagram carry a `c` suffix or live on `c`.
                    let on = |target: bool| -> Result<&OrderedBratteliDiagram> {
                        let d = if target { c.as_ref() } else { b.as_ref() };
                        d.ok_or_else(|| Error::InvalidInput(format!("fixture {name} lacks a diagram for {part}")))
                    };
                    let on_target = matches!(*part, "ext_c" | "x" | "tx");
                    match value {
                        Part::Diagram(d) => io::save_diagram(&file, d)?,
                        Part::Premorphism(f) => io::save_premorphism(&file, f)?,
                        Part::Rule(r) => io::write_json(&file, &r.to_spec(on(on_target)?)?)?,
                        Part::Path(p) => io::write_json(&file, &p.to_spec(on(on_target)?)?)?,
                    }
                }
                emit(json, &json!({"exported": fx.parts.len(), "out": out}), || {
                    format!("wrote {} files to {}", fx.parts.len(), out.display())
                });
                Ok(Status::Ok)
            }
        },
    }
}
