use std::sync::Arc;

use coorbit::lipschitz::pair_ratio;
use coorbit::linalg::{dist, norm, scale, sub};
use coorbit::sampling::random_unit_windows;
use coorbit::{
    quotient_distance, upper_bound_exact, CoorbitConfig, FiniteGroupAction, GroupSpec, Selector,
};
use proptest::prelude::*;

fn specs() -> Vec<GroupSpec> {
    vec![
        GroupSpec::Trivial { d: 3 },
        GroupSpec::Cyclic { n: 2 },
        GroupSpec::Cyclic { n: 3 },
        GroupSpec::Cyclic { n: 5 },
        GroupSpec::Dihedral { n: 4 },
        GroupSpec::SignFlips { d: 1 },
        GroupSpec::SignFlips { d: 3 },
        GroupSpec::Permutations {
            d: 3,
            generators: vec![vec![1, 0, 2], vec![1, 2, 0]],
        },
        GroupSpec::Explicit {
            d: 2,
            generators: vec![{
                let (s, c) = (std::f64::consts::FRAC_PI_3).sin_cos();
                vec![c, -s, s, c]
            }],
        },
    ]
}

fn group(idx: usize) -> Arc<FiniteGroupAction> {
    let spec = &specs()[idx % specs().len()];
    Arc::new(FiniteGroupAction::build(spec).unwrap())
}

fn config(idx: usize, p: usize, seed: u64, full: bool) -> CoorbitConfig {
    let g = group(idx);
    let n = g.order();
    let ws = random_unit_windows(p, g.dim(), seed);
    let sel = if full { Selector::full(n, p) } else { Selector::top_k(p, n.min(2)) };
    CoorbitConfig::new(g, ws, sel).unwrap()
}

fn point(raw: &[f64], d: usize) -> Vec<f64> {
    raw.iter().cycle().take(d).copied().collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let s = norm(a).max(norm(b)).max(1.0);
    a.iter().zip(b).all(|(u, v)| (u - v).abs() <= tol * s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn embedding_is_constant_on_orbits(
        idx in 0usize..9, p in 1usize..4, seed in any::<u64>(), full in any::<bool>(),
        raw in prop::collection::vec(-5.0f64..5.0, 5), h in 0usize..64,
    ) {
        let cfg = config(idx, p, seed, full);
        let x = point(&raw, cfg.dim());
        let gx = cfg.group().apply(h % cfg.group().order(), &x).unwrap();
        prop_assert!(close(&cfg.embed(&x).unwrap(), &cfg.embed(&gx).unwrap(), 1e-10));
    }

    #[test]
    fn embedding_is_positively_homogeneous(
        idx in 0usize..9, p in 1usize..4, seed in any::<u64>(), full in any::<bool>(),
        raw in prop::collection::vec(-5.0f64..5.0, 5), t in 0.0f64..50.0,
    ) {
        let cfg = config(idx, p, seed, full);
        let x = point(&raw, cfg.dim());
        let lhs = cfg.embed(&scale(&x, t)).unwrap();
        let rhs = scale(&cfg.embed(&x).unwrap(), t);
        prop_assert!(close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn group_tables_satisfy_axioms(idx in 0usize..9) {
        let g = group(idx);
        prop_assert!(g.validate().is_ok());
        let n = g.order();
        for a in 0..n {
            prop_assert_eq!(g.compose(a, g.inverse(a)), 0);
            for b in 0..n {
                for c in 0..n {
                    prop_assert_eq!(g.compose(g.compose(a, b), c), g.compose(a, g.compose(b, c)));
                }
            }
        }
    }

    #[test]
    fn orbit_is_shared_by_its_points(
        idx in 0usize..9, raw in prop::collection::vec(-2i32..3, 5), h in 0usize..64,
    ) {
        // small integer coordinates produce repeated entries and nontrivial stabilizers
        let g = group(idx);
        let x: Vec<f64> = point(&raw.iter().map(|&v| v as f64).collect::<Vec<_>>(), g.dim());
        let orbit = g.orbit(&x).unwrap();
        prop_assert_eq!(g.order() % orbit.points.len(), 0);
        let gx = g.apply(h % g.order(), &x).unwrap();
        let other = g.orbit(&gx).unwrap();
        prop_assert_eq!(orbit.points.len(), other.points.len());
        for pt in &other.points {
            prop_assert!(orbit.points.iter().any(|q| dist(q, pt) < 1e-9));
        }
    }

    #[test]
    fn stabilizer_is_a_subgroup(idx in 0usize..9, raw in prop::collection::vec(-2i32..3, 5)) {
        let g = group(idx);
        let z: Vec<f64> = point(&raw.iter().map(|&v| v as f64).collect::<Vec<_>>(), g.dim());
        let h = g.stabilizer(&z).unwrap();
        prop_assert!(h.contains(&0));
        for &a in &h {
            prop_assert!(h.contains(&g.inverse(a)));
            for &b in &h {
                prop_assert!(h.contains(&g.compose(a, b)));
            }
            prop_assert!(dist(&g.apply(a, &z).unwrap(), &z) <= 1e-9 * norm(&z).max(1.0));
        }
        prop_assert_eq!(h.len() * g.orbit(&z).unwrap().points.len(), g.order());
    }

    #[test]
    fn quotient_distance_is_a_pseudometric(
        idx in 0usize..9,
        a in prop::collection::vec(-3.0f64..3.0, 5),
        b in prop::collection::vec(-3.0f64..3.0, 5),
        c in prop::collection::vec(-3.0f64..3.0, 5),
        h in 0usize..64, k in 0usize..64,
    ) {
        let g = group(idx);
        let d = g.dim();
        let (x, y, z) = (point(&a, d), point(&b, d), point(&c, d));
        let dxy = quotient_distance(&g, &x, &y).unwrap().distance;
        let dyx = quotient_distance(&g, &y, &x).unwrap().distance;
        let dxz = quotient_distance(&g, &x, &z).unwrap().distance;
        let dzy = quotient_distance(&g, &z, &y).unwrap().distance;
        prop_assert!(dxy >= 0.0);
        prop_assert!(quotient_distance(&g, &x, &x).unwrap().distance <= 1e-12);
        prop_assert!((dxy - dyx).abs() <= 1e-12);
        prop_assert!(dxy <= dxz + dzy + 1e-12);
        prop_assert!(dxy <= dist(&x, &y) + 1e-12);
        let gx = g.apply(h % g.order(), &x).unwrap();
        let ky = g.apply(k % g.order(), &y).unwrap();
        prop_assert!((quotient_distance(&g, &gx, &ky).unwrap().distance - dxy).abs() <= 1e-12);
    }

    #[test]
    fn separation_radius_detects_inequivalent_neighbours(
        idx in 0usize..9,
        a in prop::collection::vec(-3.0f64..3.0, 5),
        dir in prop::collection::vec(-1.0f64..1.0, 5),
        frac in 0.01f64..0.99,
    ) {
        let g = group(idx);
        let d = g.dim();
        let z = point(&a, d);
        let rho = g.separation_radius(&z).unwrap();
        prop_assume!(rho > 1e-6 && norm(&point(&dir, d)) > 1e-3);
        let u = point(&dir, d);
        let x = coorbit::linalg::add(&z, &scale(&u, frac * rho / 4.0 / norm(&u)));
        // near z the quotient distance to any point within rho/4 is attained on the stabilizer
        let h = g.stabilizer(&z).unwrap();
        let y = coorbit::linalg::add(&z, &scale(&u, -frac * rho / 4.0 / norm(&u)));
        let best_h = h
            .iter()
            .map(|&e| dist(&x, &g.apply(e, &y).unwrap()))
            .fold(f64::INFINITY, f64::min);
        let q = quotient_distance(&g, &x, &y).unwrap().distance;
        prop_assert!((q - best_h).abs() <= 1e-12 * (1.0 + norm(&z)));
        // outside the stabilizer, U_g z is at least rho away from z
        for e in 0..g.order() {
            if !h.contains(&e) {
                prop_assert!(dist(&g.apply(e, &z).unwrap(), &z) >= rho - 1e-12);
            }
        }
        prop_assert!(dist(&x, &z) < rho / 2.0);
    }

    #[test]
    fn upper_bound_is_never_violated(
        idx in 0usize..9, p in 1usize..4, seed in any::<u64>(), full in any::<bool>(),
        a in prop::collection::vec(-3.0f64..3.0, 5),
        b in prop::collection::vec(-3.0f64..3.0, 5),
    ) {
        let cfg = config(idx, p, seed, full);
        let bound = upper_bound_exact(&cfg).unwrap();
        let (x, y) = (point(&a, cfg.dim()), point(&b, cfg.dim()));
        if let Some((ratio, _)) = pair_ratio(&cfg, &x, &y).unwrap() {
            prop_assert!(ratio <= bound * (1.0 + 1e-8), "{ratio} > {bound}");
        }
    }

    #[test]
    fn exact_bound_ignores_window_orbit_representative(
        idx in 0usize..9, p in 1usize..4, seed in any::<u64>(), full in any::<bool>(),
        moves in prop::collection::vec(0usize..64, 3),
    ) {
        let cfg = config(idx, p, seed, full);
        let g = cfg.group_arc().clone();
        let moved: Vec<Vec<f64>> = cfg
            .windows()
            .iter()
            .zip(&moves)
            .map(|(w, &m)| g.apply(m % g.order(), w).unwrap())
            .collect();
        let other = CoorbitConfig::new(g, moved, cfg.selector().clone()).unwrap();
        let (b0, b1) = (upper_bound_exact(&cfg).unwrap(), upper_bound_exact(&other).unwrap());
        prop_assert!((b0 - b1).abs() <= 1e-10 * b0.max(1.0));
        // moving windows within their orbits leaves the embedding unchanged
        let x = sub(&cfg.windows()[0], &[0.5; 5][..cfg.dim()]);
        prop_assert!(close(&cfg.embed(&x).unwrap(), &other.embed(&x).unwrap(), 1e-12));
    }
}
