//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints its own PASS/FAIL line; exits non-zero if any criterion fails.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use bratteli::constructor::{
    build_counterexample, classify_decisiveness, rank2_reduce, unique_min_witness, Decisiveness, Rank2Outcome,
};
use bratteli::diagram::{Extreme, OrderedBratteliDiagram};
use bratteli::dynamics::{vershik_predecessor, vershik_step, NaturalExtensionRule, StepResult};
use bratteli::factoring::{check_factoring, Verdict};
use bratteli::fixtures::fixture;
use bratteli::generate::{disjoint_double, random_diagram, random_premorphism, random_rule, GenOptions};
use bratteli::path::{EventuallyPeriodicPath, PathPrefix};
use bratteli::premorphism::{
    compose_premorphisms, delay_premorphism, equivalence_depth, fiber_bound, induced_map_at, preimage_prefixes,
    premorphisms_equivalent, validate_premorphism, Premorphism,
};
use bratteli::sadic::{
    check_commuting_rectangles, compose_morphisms, one_block_code, sliding_block_pipeline, tower_word,
};
use common::*;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

struct Instance {
    f: Premorphism,
    ext_b: NaturalExtensionRule,
    ext_c: NaturalExtensionRule,
}

/// Random `B` with at least two min paths, `z` and `y` extreme, and a rule on
/// `B` that sends `y` to a min path other than `z`.
fn fuzzed_counterexample(rng: &mut ChaCha8Rng) -> (bratteli::constructor::ConstructionResult, Instance) {
    loop {
        let b = random_diagram(rng, &GenOptions::default()).unwrap();
        let mins = b.count_extreme_paths(Extreme::Min).unwrap().witnesses;
        if mins.len() < 2 {
            continue;
        }
        let maxes = b.count_extreme_paths(Extreme::Max).unwrap().witnesses;
        let y = maxes.choose(rng).unwrap().clone();
        let z = mins.choose(rng).unwrap().clone();
        let other = mins.iter().find(|m| **m != z).unwrap().clone();
        let pairs = maxes
            .iter()
            .map(|m| (m.clone(), if *m == y { other.clone() } else { mins.choose(rng).unwrap().clone() }))
            .collect();
        let ext_b = NaturalExtensionRule::new(&b, pairs).unwrap();
        let res = build_counterexample(&b, &z, &y).unwrap();
        let ext_c = res.lift_extension(&ext_b).unwrap();
        let f = res.premorphism.clone();
        return (res, Instance { f, ext_b, ext_c });
    }
}

fn unique_min_instance(rng: &mut ChaCha8Rng, opts: &GenOptions) -> Instance {
    loop {
        let b = random_diagram(rng, opts).unwrap();
        if !unique_min_witness(&b).unwrap().unique {
            continue;
        }
        let f = random_premorphism(rng, &b, opts).unwrap();
        let ext_b = NaturalExtensionRule::unique_min(&b).unwrap();
        let ext_c = random_rule(rng, f.target()).unwrap();
        return Instance { f, ext_b, ext_c };
    }
}

fn criterion_1() {
    let fx = fixture("construction").unwrap();
    let res = build_counterexample(fx.diagram("b").unwrap(), fx.path("z").unwrap(), fx.path("y").unwrap()).unwrap();
    let fixture_case = Instance {
        f: res.premorphism.clone(),
        ext_b: fx.rule("ext_b").unwrap().clone(),
        ext_c: fx.rule("ext_c").unwrap().clone(),
    };
    let mut cases = vec![(res, fixture_case)];
    let mut rng = rng(101);
    cases.extend((0..50).map(|_| fuzzed_counterexample(&mut rng)));
    for (res, inst) in &cases {
        let f = &inst.f;
        assert!(validate_premorphism(f, f.certified_depth()).is_valid());
        for n in 0..=20 {
            assert_eq!(induced_map_at(f, n, &res.x.truncate(f.f(n))).unwrap(), res.y.truncate(n));
        }
        for n in 0..=3 {
            let table = oracle_induced_table(f, n);
            assert_eq!(table[&res.x.truncate(f.f(n))], res.y.truncate(n));
            assert_eq!(table[&res.tx.truncate(f.f(n))], res.z.truncate(n));
        }
        let r = check_factoring(f, 12, &inst.ext_b, &inst.ext_c).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let found: Vec<&EventuallyPeriodicPath> = r.witnesses.iter().map(|w| &w.path).collect();
        assert_eq!(found, vec![&res.x]);
    }
}

fn criterion_2() {
    let mut rng = rng(102);
    for _ in 0..50 {
        let inst = unique_min_instance(&mut rng, &GenOptions::default());
        let r = check_factoring(&inst.f, 12, &inst.ext_b, &inst.ext_c).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }
}

fn all_extreme(d: &OrderedBratteliDiagram, p: &PathPrefix, kind: Extreme) -> bool {
    p.edges().iter().enumerate().all(|(i, e)| {
        let size = d.level(i + 1).unwrap().fiber(e.range).len();
        e.rank == if kind == Extreme::Max { size - 1 } else { 0 }
    })
}

fn criterion_3() {
    let mut rng = rng(103);
    for _ in 0..25 {
        let f = random_instance(&mut rng, &small_opts());
        let (b, c) = (f.source(), f.target());
        for n in 0..=5 {
            let table = oracle_induced_table(&f, n);
            for (p, img) in &table {
                assert_eq!(&induced_map_at(&f, n, p).unwrap(), img);
            }
            let mut hit: HashMap<&PathPrefix, usize> = HashMap::new();
            for img in table.values() {
                *hit.entry(img).or_default() += 1;
            }
            for q in all_paths(b, n) {
                assert!(hit.contains_key(&q), "no preimage of {q:?}");
                assert!(!preimage_prefixes(&f, &q).unwrap().is_empty());
            }
            for (p, img) in &table {
                for kind in [Extreme::Min, Extreme::Max] {
                    if all_extreme(c, p, kind) {
                        assert!(all_extreme(b, img, kind));
                    }
                }
                if let (Some(next), Some(img_next)) = (oracle_step(c, p), oracle_step(b, img)) {
                    assert_eq!(table[&next], img_next);
                }
            }
        }
    }
}

fn oracle_agree(f: &Premorphism, g: &Premorphism, depth: usize) -> bool {
    (0..=depth).all(|n| {
        let (tf, tg) = (oracle_induced_table(f, n), oracle_induced_table(g, n));
        let m = f.f(n).max(g.f(n));
        all_paths(f.target(), m)
            .iter()
            .all(|c| tf[&c.truncate(f.f(n))] == tg[&c.truncate(g.f(n))])
    })
}

fn criterion_4() {
    let mut rng = rng(104);
    let opts = small_opts();
    for i in 0..20 {
        let (f, g) = if i % 2 == 0 {
            let f = random_instance(&mut rng, &opts);
            let g = delay_premorphism(&f).unwrap();
            (f, g)
        } else {
            let b = random_diagram(&mut rng, &opts).unwrap();
            let (d2, swap) = disjoint_double(&b).unwrap();
            let h = random_premorphism(&mut rng, &d2, &opts).unwrap();
            let k = compose_premorphisms(&swap, &h).unwrap();
            (h, k)
        };
        assert!(validate_premorphism(&g, g.certified_depth()).is_valid());
        let claimed = premorphisms_equivalent(&f, &g, equivalence_depth(&f, &g)).unwrap();
        assert_eq!(claimed, oracle_agree(&f, &g, 6));
        assert_eq!(claimed, i % 2 == 0);
    }
}

fn criterion_5() {
    let mut rng = rng(105);
    for _ in 0..25 {
        let f = random_instance(&mut rng, &small_opts());
        let tables: Vec<_> = (0..=5).map(|n| oracle_induced_table(&f, n)).collect();
        let mut ys = f.source().count_extreme_paths(Extreme::Max).unwrap().witnesses;
        ys.extend((0..4).map(|_| random_path(&mut rng, f.source())));
        for y in &ys {
            let k = fiber_bound(&f, y).unwrap().bound;
            for (n, table) in tables.iter().enumerate() {
                let target = y.truncate(n);
                let size = table.values().filter(|img| **img == target).count();
                assert!(size >= 1 && size <= k, "fiber of size {size} over bound {k}");
            }
        }
        let id = Premorphism::identity(f.source());
        for y in &ys {
            assert_eq!(fiber_bound(&id, y).unwrap().bound, 1);
        }
        for n in 0..=5 {
            let table = oracle_induced_table(&id, n);
            for q in all_paths(f.source(), n) {
                assert_eq!(table.values().filter(|img| **img == q).count(), 1);
                assert_eq!(preimage_prefixes(&id, &q).unwrap(), vec![q.clone()]);
            }
        }
    }
}

fn conjugacy(b: &OrderedBratteliDiagram, c: &OrderedBratteliDiagram, f: &Premorphism) {
    for n in 0..=10 {
        let (sb, sc): (u128, u128) = (tower_counts(b, n).iter().sum(), tower_counts(c, n).iter().sum());
        assert_eq!(sb, sc, "level {n}");
    }
    for n in 0..=6 {
        let table = oracle_induced_table(f, n);
        for q in all_paths(b, n) {
            assert_eq!(table.values().filter(|img| **img == q).count(), 1);
            assert_eq!(preimage_prefixes(f, &q).unwrap().len(), 1);
        }
    }
}

fn criterion_6() {
    let fx = fixture("rank2").unwrap();
    conjugacy(fx.diagram("b").unwrap(), fx.diagram("c").unwrap(), fx.premorphism("f").unwrap());
    match rank2_reduce(fx.diagram("b").unwrap(), fx.rule("ext_b").unwrap()).unwrap() {
        Rank2Outcome::OdometerConjugacy { telescoped, conjugate, premorphism } => {
            assert_eq!(conjugate.width(1).unwrap(), 1);
            conjugacy(&telescoped, &conjugate, &premorphism);
        }
        other => panic!("rank2 gave {other:?}"),
    }
    let right = fixture("cantor-right").unwrap();
    assert!(matches!(
        rank2_reduce(right.diagram("b").unwrap(), right.rule("ext_b").unwrap()).unwrap(),
        Rank2Outcome::TwoOdometers { .. }
    ));
    let left = fixture("cantor-left").unwrap();
    assert!(matches!(
        rank2_reduce(left.diagram("b").unwrap(), left.rule("ext_b").unwrap()).unwrap(),
        Rank2Outcome::OdometerConjugacy { .. }
    ));
}

fn criterion_7() {
    let classify = |name: &str| {
        let fx = fixture(name).unwrap();
        classify_decisiveness(
            fx.diagram("b").unwrap(),
            fx.path("z").unwrap(),
            fx.path("y").unwrap(),
            fx.rule("ext_b").unwrap(),
        )
        .unwrap()
    };
    let one = classify("decisive-case1");
    assert_eq!((one.matched_case, one.verdict), (Some(1), Decisiveness::Decisive));
    let two = classify("decisive-case2");
    assert_eq!((two.matched_case, two.verdict), (Some(2), Decisiveness::Decisive));
    let mixed = classify("mixed-extremes");
    assert!(mixed.z_eventually_maximal && !mixed.y_eventually_minimal);
    assert!(matches!(mixed.verdict, Decisiveness::NotDecisive | Decisiveness::SemiDecisiveOnly));
}

fn criterion_8() {
    let mut rng = rng(108);
    let mut done = 0;
    while done < 50 {
        let f = random_instance(&mut rng, &GenOptions::default());
        let depth = f.certified_depth() + 2;
        assert!(validate_premorphism(&f, depth).is_valid());
        assert!(check_commuting_rectangles(&f, depth).unwrap().commutes);
        let Some((g, n)) = mutate(&mut rng, &f) else { continue };
        let report = validate_premorphism(&g, depth);
        let rect = check_commuting_rectangles(&g, depth).unwrap();
        assert!(!report.is_valid() && !rect.commutes);
        assert_eq!(rect.failing_levels, report.failing_levels());
        assert!(rect.failing_levels.iter().all(|&l| near_mutation(&g, n, l)));
        done += 1;
    }

    for _ in 0..20 {
        let d = random_diagram(&mut rng, &small_opts()).unwrap();
        for n in 1..=6 {
            let sigma = compose_morphisms(&d, 0, n).unwrap();
            let counts = tower_counts(&d, n);
            let towers = towers(&d, n);
            for v in 0..d.width(n).unwrap() {
                assert_eq!(sigma.image(v).len() as u128, counts[v]);
                for k in 1..=n {
                    let word = tower_word(&d, k, n, v).unwrap();
                    let expected: Vec<PathPrefix> = towers[v].iter().map(|p| p.truncate(k)).collect();
                    assert_eq!(word, expected);
                    let coarse = one_block_code(&d, k).unwrap().apply(&word).unwrap();
                    assert_eq!(coarse, tower_word(&d, k - 1, n, v).unwrap());
                }
            }
        }
    }

    let mut passed = 0;
    while passed < 10 {
        let inst = unique_min_instance(&mut rng, &GenOptions::default());
        if check_factoring(&inst.f, 12, &inst.ext_b, &inst.ext_c).unwrap().verdict != Verdict::Pass {
            continue;
        }
        for i in 1..=3 {
            assert!(sliding_block_pipeline(&inst.f, i, 100, &inst.ext_b, &inst.ext_c).unwrap().commutes());
        }
        passed += 1;
    }
    let fx = fixture("rank2").unwrap();
    let r = sliding_block_pipeline(fx.premorphism("f").unwrap(), 2, 100, fx.rule("ext_b").unwrap(), fx.rule("ext_c").unwrap())
        .unwrap();
    assert!(r.commutes());

    let fx = fixture("construction").unwrap();
    let r = sliding_block_pipeline(fx.premorphism("f").unwrap(), 4, 100, fx.rule("ext_b").unwrap(), fx.rule("ext_c").unwrap())
        .unwrap();
    assert!(!r.commutes());
    assert!(r.witnesses.iter().any(|w| &w.start == fx.path("x").unwrap() && !w.word.is_empty()));
}

fn criterion_9() {
    let mut rng = rng(109);
    for _ in 0..40 {
        let d = random_diagram(&mut rng, &small_opts()).unwrap();
        for n in 0..=5 {
            for tower in towers(&d, n) {
                for (i, p) in tower.iter().enumerate() {
                    let expected_next = match tower.get(i + 1) {
                        Some(q) => StepResult::Determined(q.clone()),
                        None => StepResult::NeedsExtension,
                    };
                    assert_eq!(vershik_step(&d, p).unwrap(), expected_next);
                    let expected_prev = match i {
                        0 => StepResult::NeedsExtension,
                        _ => StepResult::Determined(tower[i - 1].clone()),
                    };
                    assert_eq!(vershik_predecessor(&d, p).unwrap(), expected_prev);
                    if let StepResult::Determined(q) = vershik_step(&d, p).unwrap() {
                        assert_eq!(vershik_predecessor(&d, &q).unwrap(), StepResult::Determined(p.clone()));
                    }
                }
            }
        }
    }
}

fn main() {
    let criteria: [(&str, fn(), Duration); 9] = [
        ("counterexample reproduction", criterion_1, Duration::from_secs(30)),
        ("unique min path gives a factoring", criterion_2, Duration::from_secs(60)),
        ("prefix surjectivity, extremes, equivariance", criterion_3, Duration::from_secs(60)),
        ("equivalence vs brute-force prefix images", criterion_4, Duration::from_secs(60)),
        ("fiber bounds dominate", criterion_5, Duration::from_secs(30)),
        ("rank-two reductions", criterion_6, Duration::from_secs(10)),
        ("decisiveness classification", criterion_7, Duration::from_secs(10)),
        ("word morphisms and block codes", criterion_8, Duration::from_secs(120)),
        ("step round trip and tower sweep", criterion_9, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let ok = outcome.is_ok() && elapsed <= *budget;
        if !ok {
            failed += 1;
        }
        let note = if outcome.is_ok() && !ok { " (over time budget)" } else { "" };
        println!(
            "criterion {}: {} {name} [{:.2}s of {}s]{note}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
