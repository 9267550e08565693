use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use asymorph::homogenize::{
    asymptotic_homogeneity, stagewise_bound, synthesize_sequences, grouped_regular_profile, HomogeneityWitness,
    SynthesisPolicy,
};
use asymorph::metric::{entropy_profile, ultrametrize, word_space, WordSpaceSpec};
use asymorph::morphism::{check_l2_preconditions, verify_asymorphism, MultiMap};
use asymorph::rational::int;
use asymorph::tower::{
    ball_tower, degree_profile, entropy_from_degrees, level_subtower, regular_tower, DegreeProfile, RawNode,
    RawTower,
};
use asymorph::{Dist, FiniteUltraSpace, NetConvention, SizeCaps, Tower};

fn caps() -> SizeCaps {
    SizeCaps::default()
}

/// Every node above level 1 gets `1..=max_degree` children.
fn random_tower(seed: u64, height: u32, max_degree: u64) -> Tower {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = vec![RawNode {
        id: "top".into(),
        level: height,
        parent: None,
    }];
    let mut frontier = vec!["top".to_string()];
    for level in (1..height).rev() {
        let mut next = Vec::new();
        for p in &frontier {
            for _ in 0..rng.gen_range(1..=max_degree) {
                let id = format!("{level}:{}", next.len());
                nodes.push(RawNode {
                    id: id.clone(),
                    level,
                    parent: Some(p.clone()),
                });
                next.push(id);
            }
        }
        frontier = next;
    }
    Tower::new(RawTower { height, nodes }).unwrap()
}

/// Distinct integers on a line, chain-ultrametrized.
fn random_ultra(seed: u64, n: usize) -> FiniteUltraSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vals: Vec<i64> = Vec::new();
    while vals.len() < n {
        let v = rng.gen_range(0..200);
        if !vals.contains(&v) {
            vals.push(v);
        }
    }
    let ids = (0..n).map(|i| format!("p{i:02}")).collect();
    let line = FiniteUltraSpace::from_fn(ids, &caps(), |i, j| int((vals[i] - vals[j]).abs())).unwrap();
    ultrametrize(&line, &[int(3), int(10), int(30), int(200)], &caps()).unwrap()
}

fn random_map(seed: u64, src: &Arc<FiniteUltraSpace>, tgt: &Arc<FiniteUltraSpace>) -> MultiMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for x in 0..src.len() {
        for _ in 0..rng.gen_range(0..3) {
            pairs.push((x, rng.gen_range(0..tgt.len())));
        }
    }
    MultiMap::new(src.clone(), tgt.clone(), pairs).unwrap()
}

fn spaces(seed: u64) -> [Arc<FiniteUltraSpace>; 4] {
    [0, 1, 2, 3].map(|k| Arc::new(random_ultra(seed * 4 + k, 4 + (seed + k) as usize % 5).with_name(format!("s{k}"))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(seed in 0u64..10_000) {
        let [a, b, c, d] = spaces(seed);
        let (f, g, h) = (random_map(seed, &a, &b), random_map(seed + 1, &b, &c), random_map(seed + 2, &c, &d));
        let left = f.then(&g).unwrap().then(&h).unwrap();
        let right = f.then(&g.then(&h).unwrap()).unwrap();
        prop_assert_eq!(left.pairs(), right.pairs());
    }

    #[test]
    fn inverse_reverses_composition(seed in 0u64..10_000) {
        let [a, b, c, _] = spaces(seed);
        let (f, g) = (random_map(seed, &a, &b), random_map(seed + 1, &b, &c));
        let lhs = f.then(&g).unwrap().inverse();
        let rhs = g.inverse().then(&f.inverse()).unwrap();
        prop_assert_eq!(lhs.pairs(), rhs.pairs());
        let twice = f.inverse().inverse();
        prop_assert_eq!(twice.pairs(), f.pairs());
    }

    #[test]
    fn composed_modulus_below_stagewise(seed in 0u64..10_000) {
        let [a, b, c, _] = spaces(seed);
        let (f, g) = (random_map(seed, &a, &b), random_map(seed + 1, &b, &c));
        let (cf, cg) = (verify_asymorphism(&f), verify_asymorphism(&g));
        let fg = verify_asymorphism(&f.then(&g).unwrap());
        let report = stagewise_bound(&fg, &[&cf, &cg]);
        prop_assert!(report.is_valid(), "{:?}", report.violations);
    }

    #[test]
    fn degrees_give_closed_entropy(seed in 0u64..10_000, height in 2u32..=5) {
        let t = random_tower(seed, height, 4);
        let base = t.base_space(&caps()).unwrap();
        for i in 0..height {
            for j in i..height {
                let (eps, delta) = (int(2 * i as i64), int(2 * j as i64));
                let brute = entropy_profile(&base, &[eps], &[delta], NetConvention::Closed, &caps()).unwrap();
                let e = &brute.entries[0];
                prop_assert_eq!(entropy_from_degrees(&t, i, j).unwrap(), (e.large, e.small));
            }
        }
    }

    #[test]
    fn next_map_is_an_asymorphism(seed in 0u64..10_000, height in 3u32..=5, mask in 0u32..16) {
        let t = random_tower(seed, height, 3);
        let mut levels: Vec<u32> = (1..height).filter(|l| mask & (1 << (l - 1)) != 0).collect();
        levels.push(height);
        let sub = level_subtower(&t, &levels).unwrap();
        let src = Arc::new(t.base_space(&caps()).unwrap());
        let tgt = Arc::new(sub.tower.base_space(&caps()).unwrap());
        let next = MultiMap::from_fn(src, tgt, &sub.next_map).unwrap();
        prop_assert!(next.is_function() && next.is_surjective());
        let cert = verify_asymorphism(&next);
        prop_assert!(cert.is_asymorphism() && cert.passed());
        prop_assert!(cert.forward_modulus.finite && cert.backward_modulus.finite);
    }

    #[test]
    fn ball_tower_distances_follow_radii(seed in 0u64..10_000, n in 2usize..24) {
        let x = random_ultra(seed, n);
        let radii: Vec<Dist> = x.scale().to_vec();
        let bt = ball_tower(&x, &radii).unwrap();
        let base = bt.tower.base();
        for p in 0..n {
            for q in 0..n {
                let d = x.dist(p, q);
                let level = radii.iter().position(|r| d <= *r).unwrap() as u64 + 1;
                let tp = bt.tower.path_metric(base[bt.point_to_base[p]], base[bt.point_to_base[q]]);
                prop_assert_eq!(tp, 2 * (level - 1));
            }
        }
    }

    #[test]
    fn regular_towers_are_homogeneous(ks in proptest::collection::vec(1u64..5, 1..6)) {
        let t = regular_tower(&ks, ks.len() as u32 + 1, &caps()).unwrap();
        let p = degree_profile(&t);
        prop_assert!(p.is_homogeneous());
        prop_assert_eq!(&p, &DegreeProfile::regular(&ks).unwrap());
        prop_assert_eq!(asymptotic_homogeneity(&p).unwrap().bound, asymorph::Big::from_integer(1.into()));
    }

    #[test]
    fn synthesis_output_is_verified(k in 2u64..=5, height in 5u32..=14) {
        let p = DegreeProfile::regular(&vec![k; height as usize - 1]).unwrap();
        let w = HomogeneityWitness::default_for(&p).unwrap();
        if let Ok(s) = synthesize_sequences(&p, 2, &w, SynthesisPolicy::Integral) {
            prop_assert!(s.verification.report.is_valid());
            prop_assert!(s.tail_report.is_valid());
            let grouped = p.regroup(&s.n).unwrap();
            let again = check_l2_preconditions(&grouped, &grouped_regular_profile(2, &s.m).unwrap(), &s.sequences()).unwrap();
            prop_assert!(again.report.is_valid());
            for i in 0..s.a.len() {
                prop_assert!(&s.b[i] / &s.a[i] >= w.tail(s.n[i], height));
            }
        }
    }
}

#[test]
fn word_spaces_are_ultrametric() {
    for a in [2, 3, 5] {
        for l in 1..=5 {
            let w = word_space(&WordSpaceSpec::new(a, l), &caps()).unwrap();
            assert!(asymorph::metric::validate_ultrametric(&w).is_valid());
            if w.len() <= 256 {
                assert!(asymorph::metric::validate_ultrametric_exhaustive(&w).is_valid());
            }
        }
    }
}
