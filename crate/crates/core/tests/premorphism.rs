mod common;

use std::collections::HashSet;

use bratteli::diagram::Extreme;
use bratteli::edgeset::{compose_edge_sets, order_isomorphic, OrderedEdgeSet};
use bratteli::factoring::{check_factoring, Verdict};
use bratteli::fixtures::fixture;
use bratteli::generate::{disjoint_double, random_diagram, random_premorphism, GenOptions};
use bratteli::premorphism::{
    compose_premorphisms, delay_premorphism, equivalence_depth, fiber_bound, induced_map_at, induced_map_infinite,
    induced_map_prefix, preimage_prefixes, premorphisms_equivalent, validate_premorphism, Premorphism,
};
use bratteli::Error;
use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn names(n: &[&str]) -> Vec<String> {
    n.iter().map(|s| s.to_string()).collect()
}

#[test]
fn composing_edge_sets() {
    let f = OrderedEdgeSet::new(names(&["u"]), names(&["v"]), vec![vec![0]]);
    let g = OrderedEdgeSet::new(names(&["v"]), names(&["w"]), vec![vec![0]]);
    assert_eq!(compose_edge_sets(&f, &g).unwrap().fibers(), &[vec![0]]);

    let f = OrderedEdgeSet::new(names(&["a", "b"]), names(&["v"]), vec![vec![0, 1]]);
    let g = OrderedEdgeSet::new(names(&["v"]), names(&["w"]), vec![vec![0, 0]]);
    assert_eq!(compose_edge_sets(&f, &g).unwrap().fibers(), &[vec![0, 1, 0, 1]]);

    let h = OrderedEdgeSet::new(names(&["x"]), names(&["w"]), vec![vec![0]]);
    assert!(matches!(compose_edge_sets(&f, &h), Err(Error::DomainMismatch(_))));
}

fn random_edge_set<R: Rng>(rng: &mut R, domain: usize, codomain: usize) -> OrderedEdgeSet {
    let mut fibers: Vec<Vec<usize>> = (0..codomain).map(|_| vec![rng.gen_range(0..domain)]).collect();
    for s in 0..domain {
        fibers[rng.gen_range(0..codomain)].push(s);
    }
    for f in fibers.iter_mut() {
        for _ in 0..rng.gen_range(0..3) {
            f.push(rng.gen_range(0..domain));
        }
        f.shuffle(rng);
    }
    let dom = (0..domain).map(|i| format!("d{i}")).collect();
    let cod = (0..codomain).map(|i| format!("c{i}")).collect();
    OrderedEdgeSet::new(dom, cod, fibers)
}

#[test]
fn composite_fibers_multiply() {
    let mut rng = rng(31);
    for _ in 0..100 {
        let (a, b, c) = (rng.gen_range(1..4), rng.gen_range(1..4), rng.gen_range(1..4));
        let f = random_edge_set(&mut rng, a, b);
        let mut g = random_edge_set(&mut rng, b, c);
        let dom: Vec<String> = f.codomain().to_vec();
        g = OrderedEdgeSet::new(dom, g.codomain().to_vec(), g.fibers().to_vec());
        let h = compose_edge_sets(&f, &g).unwrap();
        for w in 0..c {
            // Enumerate pairs with the G edge most significant.
            let mut pairs = Vec::new();
            for &v in g.fiber(w) {
                for &u in f.fiber(v) {
                    pairs.push(u);
                }
            }
            assert_eq!(h.fiber(w), pairs.as_slice());
            let size: usize = (0..b).map(|v| f.fiber(v).len() * g.fiber(w).iter().filter(|&&x| x == v).count()).sum();
            assert_eq!(h.fiber(w).len(), size);
        }
    }
}

#[test]
fn order_isomorphism() {
    let f = OrderedEdgeSet::new(names(&["a", "b"]), names(&["w"]), vec![vec![0, 1]]);
    let g = OrderedEdgeSet::new(names(&["a", "b"]), names(&["w"]), vec![vec![1, 0]]);
    assert!(order_isomorphic(&f, &f).unwrap());
    assert!(!order_isomorphic(&f, &g).unwrap());
    let h = OrderedEdgeSet::new(names(&["a"]), names(&["w"]), vec![vec![0]]);
    assert!(matches!(order_isomorphic(&f, &h), Err(Error::DomainMismatch(_))));
}

#[test]
fn composites_determine_factors_of_matching_sizes() {
    // If E∘F ≅ E∘G and F, G have equal fiber sizes, the concatenations split
    // at the same places, so F ≅ G.
    let mut rng = rng(32);
    let mut hits = 0;
    for _ in 0..5000 {
        let (a, b) = (rng.gen_range(1..3), rng.gen_range(1..3));
        let f = random_edge_set(&mut rng, a, b);
        let mut fibers = f.fibers().to_vec();
        for fb in fibers.iter_mut() {
            for s in fb.iter_mut() {
                if rng.gen_bool(0.2) {
                    *s = rng.gen_range(0..a);
                }
            }
        }
        let g = OrderedEdgeSet::new(f.domain().to_vec(), f.codomain().to_vec(), fibers);
        let e = random_edge_set(&mut rng, b, 2);
        let e = OrderedEdgeSet::new(f.codomain().to_vec(), e.codomain().to_vec(), e.fibers().to_vec());
        let (ef, eg) = (compose_edge_sets(&f, &e).unwrap(), compose_edge_sets(&g, &e).unwrap());
        if order_isomorphic(&ef, &eg).unwrap() {
            hits += 1;
            assert!(order_isomorphic(&f, &g).unwrap());
        }
    }
    assert!(hits > 100);
}

#[test]
fn identity_premorphisms() {
    let mut rng = rng(33);
    for _ in 0..20 {
        let d = random_diagram(&mut rng, &GenOptions::default()).unwrap();
        let id = Premorphism::identity(&d);
        assert!(validate_premorphism(&id, id.certified_depth()).is_valid());
        for p in all_paths(&d, 4) {
            assert_eq!(induced_map_prefix(&id, &p).unwrap(), p);
            assert_eq!(preimage_prefixes(&id, &p).unwrap(), vec![p.clone()]);
        }
        let y = random_path(&mut rng, &d);
        assert_eq!(fiber_bound(&id, &y).unwrap().bound, 1);
        assert!(fiber_bound(&id, &y).unwrap().globally_injective);
        assert_eq!(induced_map_infinite(&id, &y).unwrap(), y);
    }
}

#[test]
fn constructed_premorphism() {
    let fx = fixture("construction").unwrap();
    let f = fx.premorphism("f").unwrap();
    assert!(validate_premorphism(f, f.certified_depth()).is_valid());
    let (x, y, z) = (fx.path("x").unwrap(), fx.path("y").unwrap(), fx.path("z").unwrap());
    for n in 0..=12 {
        let image = induced_map_at(f, n, &x.truncate(f.f(n))).unwrap();
        assert_eq!(image, y.truncate(n));
        assert!(preimage_prefixes(f, &y.truncate(n)).unwrap().contains(&x.truncate(f.f(n))));
    }
    assert_eq!(&induced_map_infinite(f, x).unwrap(), y);
    assert_eq!(&induced_map_infinite(f, fx.path("tx").unwrap()).unwrap(), z);
    assert_eq!(fiber_bound(f, y).unwrap().bound, 2);
    assert_eq!(fiber_bound(f, z).unwrap().bound, 2);
    assert!(!fiber_bound(f, y).unwrap().globally_injective);
}

#[test]
fn mutations_break_validity_nearby() {
    let mut rng = rng(34);
    let mut done = 0;
    while done < 40 {
        let f = random_instance(&mut rng, &GenOptions::default());
        assert!(validate_premorphism(&f, f.certified_depth()).is_valid());
        let Some((g, n)) = mutate(&mut rng, &f) else { continue };
        let report = validate_premorphism(&g, g.certified_depth() + 2);
        let levels = report.failing_levels();
        assert!(!levels.is_empty());
        assert!(levels.iter().all(|&l| near_mutation(&g, n, l)), "mutation at {n}, failures at {levels:?}");
        done += 1;
    }
}

#[test]
fn induced_maps_match_the_oracle() {
    let mut rng = rng(35);
    for _ in 0..30 {
        let f = random_instance(&mut rng, &small_opts());
        for n in 0..=5 {
            let table = oracle_induced_table(&f, n);
            for (c, b) in &table {
                assert_eq!(&induced_map_at(&f, n, c).unwrap(), b);
                if n > 0 {
                    // Shorter prefixes map to truncations.
                    assert_eq!(induced_map_at(&f, n - 1, c).unwrap(), b.truncate(n - 1));
                }
            }
        }
    }
}

#[test]
fn preimages_partition_the_target_prefixes() {
    let mut rng = rng(36);
    for _ in 0..30 {
        let f = random_instance(&mut rng, &small_opts());
        for n in 0..=5 {
            let mut seen = HashSet::new();
            for b in all_paths(f.source(), n) {
                let pre = preimage_prefixes(&f, &b).unwrap();
                assert!(!pre.is_empty());
                for c in pre {
                    assert_eq!(induced_map_at(&f, n, &c).unwrap(), b);
                    assert!(seen.insert(c));
                }
            }
            assert_eq!(seen.len(), all_paths(f.target(), f.f(n)).len());
        }
    }
}

#[test]
fn fiber_bounds_dominate() {
    let mut rng = rng(37);
    for _ in 0..30 {
        let f = random_instance(&mut rng, &small_opts());
        for _ in 0..5 {
            let y = random_path(&mut rng, f.source());
            let k = fiber_bound(&f, &y).unwrap().bound;
            for n in 0..=5 {
                let count = preimage_prefixes(&f, &y.truncate(n)).unwrap().len();
                assert!(count <= k);
            }
        }
    }
}

fn induced_agree(f: &Premorphism, g: &Premorphism, depth: usize) -> bool {
    (0..=depth).all(|n| {
        let m = f.f(n).max(g.f(n));
        all_paths(f.target(), m)
            .iter()
            .all(|c| induced_map_at(f, n, c).unwrap() == induced_map_at(g, n, c).unwrap())
    })
}

#[test]
fn equivalence_matches_prefix_images() {
    let mut rng = rng(38);
    for _ in 0..10 {
        let f = random_instance(&mut rng, &small_opts());
        assert!(premorphisms_equivalent(&f, &f, 8).unwrap());
        let g = delay_premorphism(&f).unwrap();
        assert!(validate_premorphism(&g, g.certified_depth()).is_valid());
        assert!(premorphisms_equivalent(&f, &g, equivalence_depth(&f, &g)).unwrap());
        assert!(induced_agree(&f, &g, 4));

        let b = random_diagram(&mut rng, &small_opts()).unwrap();
        let (d2, swap) = disjoint_double(&b).unwrap();
        let h = random_premorphism(&mut rng, &d2, &small_opts()).unwrap();
        let k = compose_premorphisms(&swap, &h).unwrap();
        assert!(validate_premorphism(&k, k.certified_depth()).is_valid());
        assert!(!premorphisms_equivalent(&h, &k, equivalence_depth(&h, &k)).unwrap());
        assert!(!induced_agree(&h, &k, 4));
    }
}

#[test]
fn composite_induces_composite_map() {
    let mut rng = rng(39);
    for _ in 0..15 {
        let f = random_instance(&mut rng, &small_opts());
        let g = random_premorphism(&mut rng, f.target(), &small_opts()).unwrap();
        let h = compose_premorphisms(&f, &g).unwrap();
        assert!(validate_premorphism(&h, h.certified_depth()).is_valid());
        for n in 0..=4 {
            for d in all_paths(h.target(), h.f(n)) {
                let via = induced_map_at(&g, f.f(n), &d).unwrap();
                assert_eq!(induced_map_at(&h, n, &d).unwrap(), induced_map_at(&f, n, &via).unwrap());
            }
        }
        let id = Premorphism::identity(f.source());
        let left = compose_premorphisms(&id, &f).unwrap();
        assert!(premorphisms_equivalent(&left, &f, equivalence_depth(&left, &f)).unwrap());
    }
}

#[test]
fn composing_with_identity_keeps_the_counterexample() {
    let fx = fixture("construction").unwrap();
    let f = fx.premorphism("f").unwrap();
    let g = compose_premorphisms(f, &Premorphism::identity(f.target())).unwrap();
    let r = check_factoring(&g, 12, fx.rule("ext_b").unwrap(), fx.rule("ext_c").unwrap()).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.witnesses.len(), 1);
    assert_eq!(&r.witnesses[0].path, fx.path("x").unwrap());
}

#[test]
fn min_and_max_prefixes_are_preserved() {
    let mut rng = rng(40);
    for _ in 0..30 {
        let f = random_instance(&mut rng, &small_opts());
        for n in 0..=5 {
            for c in all_paths(f.target(), f.f(n)) {
                let b = induced_map_at(&f, n, &c).unwrap();
                for kind in [Extreme::Min, Extreme::Max] {
                    if c.is_all_extreme(f.target(), kind).unwrap() {
                        assert!(b.is_all_extreme(f.source(), kind).unwrap());
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_premorphisms_validate(seed in any::<u64>()) {
        let f = random_instance(&mut rng(seed), &GenOptions::default());
        prop_assert!(validate_premorphism(&f, f.certified_depth()).is_valid());
    }

    #[test]
    fn longer_prefixes_extend_shorter_images(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let f = random_instance(&mut rng(seed), &small_opts());
        let paths = all_paths(f.target(), f.f(5));
        let c = pick.get(&paths);
        let top = induced_map_at(&f, 5, c).unwrap();
        for n in 0..5 {
            prop_assert_eq!(induced_map_at(&f, n, c).unwrap(), top.truncate(n));
        }
    }
}
