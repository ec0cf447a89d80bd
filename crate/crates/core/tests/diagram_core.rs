mod common;

use std::collections::BTreeSet;

use bratteli::constructor::build_counterexample;
use bratteli::diagram::{validate_diagram, DiagramSpec, EdgeSpec, Extreme, Level, LevelSpec, OrderedBratteliDiagram};
use bratteli::fixtures::fixture;
use bratteli::generate::{random_diagram, GenOptions};
use bratteli::path::{Edge, PathPrefix};
use bratteli::Error;
use common::*;
use proptest::prelude::*;

fn odometer() -> OrderedBratteliDiagram {
    fixture("two-odometer").unwrap().diagram("b").unwrap().clone()
}

fn edge(source: &str, range: &str, rank: usize) -> EdgeSpec {
    EdgeSpec {
        source: source.into(),
        range: range.into(),
        rank,
    }
}

fn single(v: &str, sources: &[&str]) -> LevelSpec {
    LevelSpec {
        vertices: vec![v.into()],
        edges: sources.iter().enumerate().map(|(r, s)| edge(s, v, r)).collect(),
    }
}

#[test]
fn unroll_repeats_the_cycle() {
    let d = OrderedBratteliDiagram::from_spec(&DiagramSpec {
        root: None,
        preamble: vec![single("p1", &["v0"]), single("p2", &["p1", "p1"])],
        cycle: vec![single("c1", &["p2"]), single("c2", &["c1", "c1", "c1"])],
    })
    .unwrap_err();
    // The cycle must start and end on the same vertex set.
    assert!(matches!(d, Error::Validation(_)));

    let d = OrderedBratteliDiagram::from_spec(&DiagramSpec {
        root: None,
        preamble: vec![single("p", &["v0"]), single("p", &["p", "p"])],
        cycle: vec![single("p", &["p"]), single("p", &["p", "p", "p"])],
    })
    .unwrap();
    let levels = d.unroll(5).unwrap();
    let sizes: Vec<usize> = levels.iter().map(|l| l.edges.len()).collect();
    assert_eq!(sizes, vec![1, 2, 1, 3, 1]);
    assert_eq!(levels[4], levels[2]);

    let o = odometer();
    let three = o.unroll(3).unwrap();
    assert_eq!(three.len(), 3);
    assert!(three.iter().all(|l| l == &three[0] && l.edges.len() == 2));
    assert_eq!(o.unroll(1).unwrap()[0], o.cycle_levels()[0].to_spec(&["v0".to_string()]));
}

#[test]
fn finite_diagrams_run_out() {
    let d = OrderedBratteliDiagram::new("r", vec![Level::new(vec!["a".into()], vec![vec![0, 0]])], vec![]).unwrap();
    assert!(matches!(d.unroll(2), Err(Error::FiniteDiagramExhausted { level: 2, available: 1 })));
    assert!(matches!(d.count_extreme_paths(Extreme::Max), Err(Error::FiniteDiagramExhausted { .. })));
}

#[test]
fn telescoping_the_odometer() {
    let t = odometer().telescope(&[2], 2).unwrap();
    let level = t.level(1).unwrap();
    assert_eq!(level.edge_count(), 4);
    assert_eq!(level.fiber(0).len(), 4);
    assert!(t.is_finite());
}

#[test]
fn telescoping_every_level_changes_nothing() {
    let mut rng = rng(11);
    for _ in 0..20 {
        let d = random_diagram(&mut rng, &GenOptions::default()).unwrap();
        let t = d.telescope(&[1, 2, 3, 4], 4).unwrap();
        assert_eq!(t.unroll(4).unwrap(), d.unroll(4).unwrap());
    }
}

#[test]
fn telescoped_fibers_follow_tower_order() {
    let mut rng = rng(12);
    for _ in 0..20 {
        let d = random_diagram(&mut rng, &GenOptions::default()).unwrap();
        let t = d.telescope(&[3], 3).unwrap();
        let towers = towers(&d, 3);
        for (v, tower) in towers.iter().enumerate() {
            let sources: Vec<usize> = tower.iter().map(|p| p.vertex_at(0)).collect();
            assert_eq!(t.level(1).unwrap().fiber(v).len(), sources.len());
        }
        assert_eq!(tower_counts(&t, 1), tower_counts(&d, 3));
        // Telescoping [1,3] keeps level 1 and composes levels 2..3 in the
        // order in which their paths are listed by the oracle.
        let t = d.telescope(&[1, 3], 3).unwrap();
        let composite = t.level(2).unwrap();
        for (v, tower) in towers.iter().enumerate() {
            let mut seen: Vec<usize> = Vec::new();
            let mut last: Option<(usize, usize)> = None;
            for p in tower {
                let key = (p.edges()[1].rank, p.edges()[2].rank);
                if last != Some(key) {
                    seen.push(p.vertex_at(1));
                    last = Some(key);
                }
            }
            assert_eq!(composite.fiber(v), seen.as_slice());
        }
    }
}

#[test]
fn adjacency_examples() {
    let o = odometer();
    for n in 1..4 {
        assert_eq!(o.adjacency_matrix(n).unwrap().rows, vec![vec![2]]);
    }
    let d = OrderedBratteliDiagram::new(
        "r",
        vec![
            Level::new(vec!["a".into(), "b".into()], vec![vec![0], vec![0]]),
            Level::new(vec!["a".into(), "b".into()], vec![vec![0, 0, 1], vec![1]]),
        ],
        vec![],
    )
    .unwrap();
    assert_eq!(d.adjacency_matrix(2).unwrap().rows[0], vec![2, 1]);
}

#[test]
fn matrix_products_count_paths() {
    let mut rng = rng(13);
    for _ in 0..30 {
        let d = random_diagram(&mut rng, &GenOptions::default()).unwrap();
        for j in 1..=6 {
            let m = d.window_matrix(0, j).unwrap();
            let counts: Vec<u128> = m.rows.iter().map(|r| r[0]).collect();
            assert_eq!(counts, tower_counts(&d, j));
            assert_eq!(d.path_counts(j).unwrap()[j], counts);
        }
    }
}

#[test]
fn simple_windows_match_reachability() {
    let o = odometer();
    assert!(o.is_simple_window(0, 1).unwrap());
    let mut rng = rng(14);
    for _ in 0..30 {
        let d = random_diagram(&mut rng, &GenOptions::default()).unwrap();
        for i in 0..4 {
            for j in i + 1..=5 {
                let mut reach: Vec<BTreeSet<usize>> = (0..d.width(i).unwrap()).map(|v| BTreeSet::from([v])).collect();
                for n in i + 1..=j {
                    let level = d.level(n).unwrap();
                    reach = reach
                        .iter()
                        .map(|r| (0..level.width()).filter(|&v| level.fiber(v).iter().any(|s| r.contains(s))).collect())
                        .collect();
                }
                let all = reach.iter().all(|r| r.len() == d.width(j).unwrap());
                assert_eq!(d.is_simple_window(i, j).unwrap(), all, "window ({i},{j})");
                assert_eq!(d.window_matrix(i, j).unwrap().is_positive(), all);
            }
        }
        assert_eq!(d.is_simple().unwrap(), oracle_simple(&d));
    }
}

#[test]
fn constructed_diagram_is_not_simple() {
    let fx = fixture("construction").unwrap();
    let c = fx.diagram("c").unwrap();
    assert!(!c.is_simple().unwrap());
    // Windows from the root are trivially full.
    for i in 1..4 {
        for j in i + 1..=6 {
            assert!(!c.is_simple_window(i, j).unwrap());
        }
    }
}

#[test]
fn extreme_successor_examples() {
    let o = odometer();
    assert_eq!(o.extreme_successor_map(1, Extreme::Max).unwrap(), vec![0]);
    let d = OrderedBratteliDiagram::new(
        "r",
        vec![
            Level::new(vec!["a".into(), "b".into()], vec![vec![0], vec![0]]),
            Level::new(vec!["v".into()], vec![vec![0, 1]]),
        ],
        vec![],
    )
    .unwrap();
    assert_eq!(d.extreme_successor_map(2, Extreme::Max).unwrap(), vec![1]);
    assert_eq!(d.extreme_successor_map(2, Extreme::Min).unwrap(), vec![0]);
}

#[test]
fn extreme_counts() {
    let o = odometer();
    assert_eq!(o.count_extreme_paths(Extreme::Max).unwrap().count, 1);
    assert_eq!(o.count_extreme_paths(Extreme::Min).unwrap().count, 1);
    let mut rng = rng(15);
    for _ in 0..60 {
        let d = random_diagram(&mut rng, &GenOptions::default()).unwrap();
        for kind in [Extreme::Max, Extreme::Min] {
            let set = d.count_extreme_paths(kind).unwrap();
            assert_eq!(set.count, oracle_extreme_count(&d, kind));
            assert_eq!(set.witnesses.len(), set.count);
            for w in &set.witnesses {
                assert!(w.is_all_extreme(&d, kind).unwrap());
            }
        }
    }
}

#[test]
fn construction_keeps_the_max_paths() {
    for name in ["construction", "construction-decisive-case1"] {
        let fx = fixture(name).unwrap();
        let (b, c) = (fx.diagram("b").unwrap(), fx.diagram("c").unwrap());
        assert_eq!(
            b.count_extreme_paths(Extreme::Max).unwrap().count,
            c.count_extreme_paths(Extreme::Max).unwrap().count
        );
    }
}

#[test]
fn cylinders_inside_extreme_sets() {
    let o = odometer();
    let p = PathPrefix::from_edges(vec![Edge { range: 0, rank: 1 }]);
    assert!(!o.cylinder_in_extreme(&p, Extreme::Max).unwrap());

    let chain = OrderedBratteliDiagram::new(
        "r",
        vec![Level::new(vec!["a".into()], vec![vec![0, 0]])],
        vec![Level::new(vec!["a".into()], vec![vec![0]])],
    )
    .unwrap();
    let top = PathPrefix::from_edges(vec![Edge { range: 0, rank: 1 }]);
    assert!(chain.cylinder_in_extreme(&top, Extreme::Max).unwrap());

    // Brute force over a horizon long enough for the reachable vertex sets
    // to repeat, memoized on (level, vertex).
    let mut rng = rng(16);
    for _ in 0..30 {
        let d = random_diagram(&mut rng, &GenOptions::default()).unwrap();
        let horizon = d.preamble_len() + d.period() * 18;
        for kind in [Extreme::Max, Extreme::Min] {
            let mut ok = vec![vec![true; d.width(horizon).unwrap()]];
            for n in (0..horizon).rev() {
                let level = d.level(n + 1).unwrap();
                let above = ok.last().unwrap().clone();
                let row = (0..d.width(n).unwrap())
                    .map(|s| {
                        level.fibers().iter().enumerate().all(|(v, fiber)| {
                            fiber
                                .iter()
                                .enumerate()
                                .all(|(rank, &src)| src != s || (level.is_extreme(v, rank, kind) && above[v]))
                        })
                    })
                    .collect();
                ok.push(row);
            }
            ok.reverse();
            for n in 0..=2 {
                for v in 0..d.width(n).unwrap() {
                    let p = d.extreme_prefix_to(n, v, kind).unwrap();
                    assert_eq!(d.cylinder_in_extreme(&p, kind).unwrap(), ok[n][v]);
                }
            }
        }
    }
}

#[test]
fn validation_rejects_bad_levels() {
    let missing_rank0 = DiagramSpec {
        root: None,
        preamble: vec![],
        cycle: vec![LevelSpec {
            vertices: vec!["v0".into()],
            edges: vec![edge("v0", "v0", 1)],
        }],
    };
    assert!(!validate_diagram(&missing_rank0).is_valid());
    assert!(matches!(OrderedBratteliDiagram::from_spec(&missing_rank0), Err(Error::Validation(_))));

    let unknown_source = DiagramSpec {
        root: None,
        preamble: vec![single("a", &["nowhere"])],
        cycle: vec![single("a", &["a"])],
    };
    assert!(!validate_diagram(&unknown_source).is_valid());

    let duplicate = DiagramSpec {
        root: None,
        preamble: vec![],
        cycle: vec![LevelSpec {
            vertices: vec!["v0".into()],
            edges: vec![edge("v0", "v0", 0), edge("v0", "v0", 0)],
        }],
    };
    assert!(!validate_diagram(&duplicate).is_valid());
}

#[test]
fn telescopes_and_constructions_validate() {
    let mut rng = rng(17);
    for _ in 0..20 {
        let d = random_diagram(&mut rng, &GenOptions::default()).unwrap();
        let t = d.telescope(&[2, 5], 5).unwrap();
        assert!(validate_diagram(&t.to_spec()).is_valid());
        assert_eq!(tower_counts(&t, 2), tower_counts(&d, 5));
    }
    let c = fixture("construction").unwrap();
    assert!(validate_diagram(&c.diagram("c").unwrap().to_spec()).is_valid());
}

#[test]
fn fuzzed_constructions_validate() {
    let mut rng = rng(18);
    let mut built = 0;
    while built < 10 {
        let b = random_diagram(&mut rng, &GenOptions::default()).unwrap();
        let z = b.count_extreme_paths(Extreme::Min).unwrap().witnesses[0].clone();
        let y = b.count_extreme_paths(Extreme::Max).unwrap().witnesses[0].clone();
        let res = build_counterexample(&b, &z, &y).unwrap();
        assert!(validate_diagram(&res.b_prime.to_spec()).is_valid());
        built += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spec_round_trip(seed in any::<u64>()) {
        let d = random_diagram(&mut rng(seed), &GenOptions::default()).unwrap();
        let back = OrderedBratteliDiagram::from_spec(&d.to_spec()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn telescope_preserves_counts(seed in any::<u64>(), a in 1usize..4, b in 4usize..7) {
        let d = random_diagram(&mut rng(seed), &GenOptions::default()).unwrap();
        let t = d.telescope(&[a, b], b).unwrap();
        prop_assert_eq!(tower_counts(&t, 1), tower_counts(&d, a));
        prop_assert_eq!(tower_counts(&t, 2), tower_counts(&d, b));
    }
}
