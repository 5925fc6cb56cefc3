use annihil_core::hypervolume::estimate_volume;
use annihil_core::instance::Instance;
use annihil_core::montecarlo::{order_invariance_probe, simulate, Policy, SimConfig};
use annihil_core::rational::Rational;
use annihil_core::recursive::p_a_wins_recursive;

fn exact(inst: &Instance) -> Rational {
    p_a_wins_recursive(inst).unwrap().into_inner()
}

#[test]
fn unbiased_across_seeds() {
    let instances = [
        Instance::from_ints(&[30, 20], &[15, 36]).unwrap(),
        Instance::from_ints(&[1], &[1, 1]).unwrap(),
        Instance::from_ints(&[2, 1], &[1]).unwrap(),
        Instance::from_ints(&[1, 1, 1], &[1, 1]).unwrap(),
    ];
    let runs_per_instance = 50;
    let mut agreeing = 0;
    for inst in &instances {
        let p = exact(inst);
        for seed in 0..runs_per_instance {
            let r = simulate(inst, &SimConfig::new(4_000, seed)).unwrap();
            agreeing += r.agrees_with(&p, 4.0) as usize;
        }
    }
    let total = instances.len() * runs_per_instance as usize;
    assert!(agreeing * 100 >= total * 99, "{agreeing}/{total} runs within 4 sigma");
}

#[test]
fn probe_orderings_all_agree() {
    let inst = Instance::from_ints(&[30, 20], &[15, 36]).unwrap();
    let p = exact(&inst);
    let runs = order_invariance_probe(&inst, &SimConfig::new(50_000, 21), 5).unwrap();
    // Only 2·2 orderings exist.
    assert_eq!(runs.len(), 4);
    for (ordering, report) in &runs {
        assert_eq!(ordering.canonical_key(), inst.canonical_key());
        assert!(report.agrees_with(&p, 4.0), "{ordering:?}: {report:?}");
    }

    let inst = Instance::from_ints(&[5, 3, 1, 4], &[2, 6, 1]).unwrap();
    let p = exact(&inst);
    let runs = order_invariance_probe(&inst, &SimConfig::new(30_000, 4), 5).unwrap();
    assert_eq!(runs.len(), 5);
    let mut seeds: Vec<u64> = runs.iter().map(|(_, r)| r.seed).collect();
    seeds.dedup();
    assert_eq!(seeds.len(), 5);
    for (_, report) in &runs {
        assert!(report.agrees_with(&p, 4.0), "{report:?}");
    }
}

#[test]
fn random_pairing_policy_gives_same_probability() {
    let inst = Instance::from_ints(&[5, 3, 1, 4], &[2, 6, 1]).unwrap();
    let p = exact(&inst);
    let cfg = SimConfig::new(100_000, 13).with_policy(Policy::RandomAdjacent);
    let r = simulate(&inst, &cfg).unwrap();
    assert_eq!(r.policy, Policy::RandomAdjacent);
    assert!(r.agrees_with(&p, 4.0), "{r:?} vs {p}");
}

#[test]
fn hypervolume_matches_exact_on_mixed_instance() {
    let inst = Instance::from_ints(&[5, 3, 1], &[2, 6]).unwrap();
    let v = estimate_volume(&inst, 200_000, 17).unwrap();
    assert!(v.agrees_with(&exact(&inst), 4.0), "{v:?}");

    // Same draws, sides swapped: hit counts are complementary.
    let swapped = estimate_volume(&Instance::from_ints(&[2, 6], &[5, 3, 1]).unwrap(), 200_000, 17).unwrap();
    let total = v.estimate + swapped.estimate;
    assert!((total - 1.0).abs() < 0.01, "{total}");
}
