use std::sync::Arc;

use coorbit::sampling::random_unit_windows;
use coorbit::{upper_bound_exact, CoorbitConfig, FiniteGroupAction, GroupSpec, Selector};
use coorbit_oracle::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn group(spec: GroupSpec) -> Arc<FiniteGroupAction> {
    Arc::new(FiniteGroupAction::build(&spec).unwrap())
}

#[test]
fn naive_embed_of_zero_is_zero() {
    let cfg = CoorbitConfig::new(
        group(GroupSpec::Dihedral { n: 4 }),
        random_unit_windows(3, 4, 2),
        Selector::top_k(3, 3),
    )
    .unwrap();
    assert!(naive_embed(&cfg, &[0.0; 4]).unwrap().iter().all(|&v| v == 0.0));
}

#[test]
fn naive_embed_scalar_sign_flip() {
    let cfg = CoorbitConfig::new(
        group(GroupSpec::SignFlips { d: 1 }),
        vec![vec![1.0]],
        Selector::full(2, 1),
    )
    .unwrap();
    assert_eq!(naive_embed(&cfg, &[-3.0]).unwrap(), vec![3.0, -3.0]);
}

#[test]
fn naive_embed_rejects_wrong_length() {
    let cfg = CoorbitConfig::max_filter(group(GroupSpec::Cyclic { n: 3 }), vec![vec![1.0, 0.0, 0.0]])
        .unwrap();
    assert_eq!(
        naive_embed(&cfg, &[1.0, 2.0]),
        Err(OracleError::DimensionMismatch { expected: 3, got: 2 })
    );
}

#[test]
fn naive_embed_agrees_with_embed() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in [
        GroupSpec::Cyclic { n: 5 },
        GroupSpec::Dihedral { n: 3 },
        GroupSpec::SignFlips { d: 2 },
    ] {
        let g = group(spec);
        let n = g.order();
        let ws = random_unit_windows(2, g.dim(), 3);
        let cfg = CoorbitConfig::new(g, ws, Selector::full(n, 2)).unwrap();
        for _ in 0..200 {
            let x: Vec<f64> = (0..cfg.dim()).map(|_| rng.random_range(-4.0..4.0)).collect();
            let fast = cfg.embed(&x).unwrap();
            let slow = naive_embed(&cfg, &x).unwrap();
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn single_rank_bound_is_squared_window_norm() {
    let cfg = CoorbitConfig::max_filter(group(GroupSpec::Cyclic { n: 4 }), vec![vec![1.0, 2.0, -2.0, 0.0]])
        .unwrap();
    assert!((naive_upper_bound(&cfg).unwrap() - 9.0).abs() < 1e-12);
}

#[test]
fn sign_flip_bound_matches_four_case_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let w = vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let cfg = CoorbitConfig::max_filter(group(GroupSpec::SignFlips { d: 2 }), vec![w.clone()]).unwrap();
        // each candidate is a rank-one matrix with eigenvalue ‖w‖²
        let expected = w[0] * w[0] + w[1] * w[1];
        assert!((naive_upper_bound(&cfg).unwrap() - expected).abs() < 1e-12);
        assert!((upper_bound_exact(&cfg).unwrap() - expected.sqrt()).abs() < 1e-10);
    }
}

#[test]
fn naive_bound_agrees_with_exact_bound() {
    for (spec, p, k) in [
        (GroupSpec::Cyclic { n: 4 }, 2, 2),
        (GroupSpec::Dihedral { n: 3 }, 2, 2),
        (GroupSpec::SignFlips { d: 3 }, 1, 3),
        (GroupSpec::Cyclic { n: 3 }, 3, 1),
    ] {
        let g = group(spec);
        let cfg = CoorbitConfig::new(g.clone(), random_unit_windows(p, g.dim(), 8), Selector::top_k(p, k)).unwrap();
        let naive = naive_upper_bound(&cfg).unwrap().sqrt();
        assert!((naive - upper_bound_exact(&cfg).unwrap()).abs() <= 1e-10);
    }
}

#[test]
fn naive_bound_refuses_large_enumerations() {
    let g = group(GroupSpec::Cyclic { n: 12 });
    let cfg = CoorbitConfig::new(g, random_unit_windows(2, 12, 1), Selector::top_k(2, 4)).unwrap();
    assert!(matches!(
        naive_upper_bound(&cfg),
        Err(OracleError::EnumerationTooLarge { .. })
    ));
}

#[test]
fn sphere_ratio_is_one_for_isometry() {
    let cfg = CoorbitConfig::new(
        group(GroupSpec::Trivial { d: 3 }),
        vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        Selector::full(1, 3),
    )
    .unwrap();
    assert!((sphere_min_ratio(&cfg, 2).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn sphere_ratio_vanishes_for_non_injective_config() {
    // a single window ignores the orthogonal complement of its direction
    let cfg = CoorbitConfig::max_filter(group(GroupSpec::Trivial { d: 2 }), vec![vec![1.0, 0.0]]).unwrap();
    assert!(sphere_min_ratio(&cfg, 4).unwrap() < 1e-3);
}

#[test]
fn sphere_ratio_is_monotone_under_refinement() {
    let g = group(GroupSpec::Cyclic { n: 3 });
    let cfg = CoorbitConfig::new(g, random_unit_windows(4, 3, 21), Selector::top_k(4, 2)).unwrap();
    let mut last = f64::INFINITY;
    for r in 1..=4 {
        let m = sphere_min_ratio(&cfg, r).unwrap();
        assert!(m <= last, "resolution {r}: {m} > {last}");
        last = m;
    }
    assert!(last > 0.0);
}

#[test]
fn sphere_ratio_needs_small_dimension() {
    let cfg = CoorbitConfig::max_filter(group(GroupSpec::Cyclic { n: 4 }), random_unit_windows(2, 4, 1)).unwrap();
    assert_eq!(sphere_min_ratio(&cfg, 1), Err(OracleError::DimensionTooLarge { dim: 4 }));
}
