mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sandpile_core::lattice::{build_wired_region, Shape};
use sandpile_core::sandpile::*;
use sandpile_core::{Node, SandpileConfig, WiredGraph};

fn config_strategy(g: &WiredGraph, max: u32) -> impl Strategy<Value = SandpileConfig> {
    prop::collection::vec(0..max, g.len()).prop_map(SandpileConfig::new)
}

#[test]
fn burning_agrees_with_ampleness_on_every_stable_configuration() {
    for case in small_graphs() {
        let g = &case.graph;
        let n = g.len();
        let total: usize = (0..n).map(|v| g.degree(v)).product();
        let mut heights = vec![0u32; n];
        for mut code in 0..total {
            for (v, h) in heights.iter_mut().enumerate() {
                *h = (code % g.degree(v)) as u32;
                code /= g.degree(v);
            }
            let eta = SandpileConfig::new(heights.clone());
            assert_eq!(is_recurrent(g, &eta).unwrap(), is_ample(g, &eta), "{} {:?}", case.name, eta.heights);
        }
    }
}

#[test]
fn two_vertex_chain_is_uniform_on_recurrent_states() {
    let g = two_vertex();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut eta = SandpileConfig::max_stable(&g);
    let mut counts = std::collections::HashMap::new();
    let steps = 100_000;
    for _ in 0..steps {
        let v = rng.gen_range(0..2);
        eta = add_and_stabilize(&g, &eta, Node::Site(v)).unwrap().0;
        *counts.entry(eta.heights.clone()).or_insert(0u32) += 1;
    }
    assert_eq!(counts.len(), 3);
    for (state, c) in counts {
        assert!((c as f64 / steps as f64 - 1.0 / 3.0).abs() < 0.01, "{state:?}: {c}");
    }
}

#[test]
fn adding_to_the_sink_is_an_error() {
    let g = two_vertex();
    let eta = SandpileConfig::max_stable(&g);
    assert!(add_and_stabilize(&g, &eta, Node::Sink).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn stabilization_is_abelian(
        eta in config_strategy(&build_wired_region(2, Shape::Ball { radius: 3 }).unwrap(), 12),
        a in any::<u64>(),
        b in any::<u64>(),
    ) {
        let g = build_wired_region(2, Shape::Ball { radius: 3 }).unwrap();
        let (x, rx) = stabilize(&g, &eta, ToppleOrder::Random(a)).unwrap();
        let (y, ry) = stabilize(&g, &eta, ToppleOrder::Random(b)).unwrap();
        let (z, rz) = stabilize(&g, &eta, ToppleOrder::Fifo).unwrap();
        prop_assert!(x.is_stable(&g));
        prop_assert_eq!(&x, &y);
        prop_assert_eq!(&x, &z);
        prop_assert_eq!(&rx, &ry);
        prop_assert_eq!(&rx, &rz);
    }

    #[test]
    fn grains_are_conserved(eta in config_strategy(&build_wired_region(3, Shape::Box { side: 3 }).unwrap(), 20)) {
        let g = build_wired_region(3, Shape::Box { side: 3 }).unwrap();
        let (x, r) = stabilize(&g, &eta, ToppleOrder::Fifo).unwrap();
        prop_assert_eq!(eta.mass(), x.mass() + r.grains_to_sink);
        // every toppling at v sends exactly its sink multiplicity to the sink
        let lost: u64 = (0..g.len()).map(|v| r.topplings[v] * g.sink_multiplicity(v) as u64).sum();
        prop_assert_eq!(lost, r.grains_to_sink);
    }

    #[test]
    fn stabilizing_a_recurrent_config_plus_grains_stays_recurrent(
        seed in any::<u64>(),
        extra in prop::collection::vec(0usize..9, 1..20),
    ) {
        let g = box2x2();
        let anchor = sandpile_core::Anchor::new(vec![vec![pt(&[0, 0])]]).unwrap();
        let mut eta = sandpile_core::bijection::anchored_inverse(&g, &sandpile_core::wilson::sample_ust(&g, seed), &anchor).unwrap();
        for v in extra {
            eta = add_and_stabilize(&g, &eta, Node::Site(v % g.len())).unwrap().0;
            prop_assert!(is_ample(&g, &eta));
        }
    }
}
