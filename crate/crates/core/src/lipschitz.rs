//! Upper Lipschitz bounds from window frame operators, and sampled estimates of
//! the lower Lipschitz constant of `Φ_{w,S}` with respect to the quotient metric.
//!
//! The upper bound is `√B` with
//!
//! ```text
//! B = max_{σ_i ⊂ G, |σ_i| = m_i} λ_max( Σ_i Σ_{g∈σ_i} U_g w_i w_iᵀ U_gᵀ )
//! ```
//!
//! computed by exhaustive enumeration when feasible. Taking `σ_i = G` for every
//! window gives a cheaper bound that is never smaller.
//!
//! There is no closed form for the lower constant; [`estimate_lower_bound`]
//! only reports the smallest ratio it observes.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coorbit::CoorbitConfig;
use crate::error::{Error, Result};
use crate::linalg::{add, dist, lambda_max, scale};
use crate::quotient::quotient_distance;
use crate::sampling::{rng, unit_vector};

/// Default cap on `Π_i C(N, m_i)` for exact enumeration.
pub const DEFAULT_ENUM_CAP: f64 = 1e6;

/// `C(n, k)` as a float (saturates to infinity instead of overflowing).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64).round()
}

/// Number of candidate subset tuples the exact bound has to visit.
pub fn enumeration_size(cfg: &CoorbitConfig) -> f64 {
    let n = cfg.group().order();
    (0..cfg.num_windows())
        .map(|i| binomial(n, cfg.ranks(i).len()))
        .product()
}

/// Lexicographic `k`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut t = k;
        loop {
            if t == 0 {
                self.done = true;
                break;
            }
            t -= 1;
            if self.idx[t] < self.n - k + t {
                self.idx[t] += 1;
                for s in t + 1..k {
                    self.idx[s] = self.idx[s - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

fn rank_one(u: &[f64]) -> DMatrix<f64> {
    let d = u.len();
    DMatrix::from_fn(d, d, |r, c| u[r] * u[c])
}

struct FrameTerms {
    // terms[i][g] = U_g w_i w_iᵀ U_gᵀ
    terms: Vec<Vec<DMatrix<f64>>>,
    sizes: Vec<usize>,
    dim: usize,
}

impl FrameTerms {
    fn new(cfg: &CoorbitConfig) -> Self {
        let n = cfg.group().order();
        let active: Vec<usize> = (0..cfg.num_windows())
            .filter(|&i| !cfg.ranks(i).is_empty())
            .collect();
        let terms = active
            .iter()
            .map(|&i| (0..n).map(|g| rank_one(cfg.window_image(i, g))).collect())
            .collect();
        let sizes = active.iter().map(|&i| cfg.ranks(i).len()).collect();
        Self {
            terms,
            sizes,
            dim: cfg.dim(),
        }
    }

    fn with_subset(&self, level: usize, base: &DMatrix<f64>, subset: &[usize]) -> DMatrix<f64> {
        let mut acc = base.clone();
        for &g in subset {
            acc += &self.terms[level][g];
        }
        acc
    }

    fn best_from(&self, level: usize, partial: DMatrix<f64>) -> f64 {
        if level == self.terms.len() {
            return lambda_max(partial);
        }
        let n = self.terms[level].len();
        Combinations::new(n, self.sizes[level])
            .map(|c| self.best_from(level + 1, self.with_subset(level, &partial, &c)))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Exact `√B` by enumerating every subset tuple, capped at `enum_cap` tuples.
pub fn upper_bound_exact_with_cap(cfg: &CoorbitConfig, enum_cap: f64) -> Result<f64> {
    let count = enumeration_size(cfg);
    if count > enum_cap {
        return Err(Error::EnumerationTooLarge {
            count,
            cap: enum_cap,
        });
    }
    let frame = FrameTerms::new(cfg);
    let zero = DMatrix::zeros(frame.dim, frame.dim);
    let n = cfg.group().order();
    let first: Vec<Vec<usize>> = Combinations::new(n, frame.sizes[0]).collect();
    let b = first
        .par_iter()
        .map(|c| frame.best_from(1, frame.with_subset(0, &zero, c)))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(b.max(0.0).sqrt())
}

/// Exact `√B` with the default enumeration cap.
pub fn upper_bound_exact(cfg: &CoorbitConfig) -> Result<f64> {
    upper_bound_exact_with_cap(cfg, DEFAULT_ENUM_CAP)
}

/// `√λ_max(Σ_i Σ_{g∈G} U_g w_i w_iᵀ U_gᵀ)`, summed over windows with at least
/// one selected rank.
pub fn upper_bound_relaxed(cfg: &CoorbitConfig) -> f64 {
    let frame = FrameTerms::new(cfg);
    let mut acc = DMatrix::zeros(frame.dim, frame.dim);
    for per_window in &frame.terms {
        for t in per_window {
            acc += t;
        }
    }
    lambda_max(acc).max(0.0).sqrt()
}

/// How pairs are drawn by [`estimate_lower_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingPlan {
    /// Number of sampled pairs.
    pub pairs: usize,
    pub seed: u64,
    /// Perturbation steps spent refining the worst pair found by sampling.
    pub refine_steps: usize,
    /// Fraction of pairs drawn as `(x, x + εu)` with `ε ∈ [1e-3, 1]` log-uniform;
    /// the rest are independent unit vectors.
    pub near_fraction: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            pairs: 10_000,
            seed: 0,
            refine_steps: 500,
            near_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub ratio: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleStats {
    pub requested: usize,
    pub retained: usize,
    pub refine_steps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    /// `√B`, absent when enumeration exceeds the cap.
    pub upper_bound_exact: Option<f64>,
    pub upper_bound_relaxed: f64,
    /// Smallest observed `‖Φ(x) − Φ(y)‖ / d([x],[y])`.
    pub lower_bound_empirical: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub witness_pair: WitnessPair,
    pub samples: SampleStats,
    /// Ratios exceeding `upper_bound_relaxed · (1 + ratio_tol)`. Always zero
    /// unless something is broken.
    pub upper_violations: usize,
}

/// `‖Φ(x) − Φ(y)‖ / d([x],[y])` and `d([x],[y])`, or `None` when the pair is
/// within `sep_floor` of being equivalent.
pub fn pair_ratio(cfg: &CoorbitConfig, x: &[f64], y: &[f64]) -> Result<Option<(f64, f64)>> {
    let d = quotient_distance(cfg.group(), x, y)?.distance;
    if !(d > cfg.group().tolerances().sep_floor) {
        return Ok(None);
    }
    let num = dist(&cfg.embed(x)?, &cfg.embed(y)?);
    Ok(Some((num / d, d)))
}

/// Samples pairs, keeps the smallest ratio, then runs a random local descent
/// around the worst pair. Identical inputs give identical reports.
pub fn estimate_lower_bound(cfg: &CoorbitConfig, plan: &SamplingPlan) -> Result<LipschitzReport> {
    let dim = cfg.dim();
    let tol = *cfg.group().tolerances();
    let upper_relaxed = upper_bound_relaxed(cfg);
    let upper_exact = match upper_bound_exact(cfg) {
        Ok(b) => Some(b),
        Err(Error::EnumerationTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let ceiling = upper_relaxed * (1.0 + tol.ratio);

    let mut r = rng(plan.seed);
    let mut retained = 0usize;
    let mut sum = 0.0;
    let mut max_ratio: f64 = 0.0;
    let mut violations = 0usize;
    let mut best: Option<WitnessPair> = None;

    let mut observe = |x: Vec<f64>, y: Vec<f64>, best: &mut Option<WitnessPair>| -> Result<bool> {
        let Some((ratio, distance)) = pair_ratio(cfg, &x, &y)? else {
            return Ok(false);
        };
        retained += 1;
        sum += ratio;
        max_ratio = max_ratio.max(ratio);
        if ratio > ceiling {
            violations += 1;
        }
        let improved = best.as_ref().is_none_or(|b| ratio < b.ratio);
        if improved {
            *best = Some(WitnessPair {
                x,
                y,
                ratio,
                distance,
            });
        }
        Ok(improved)
    };

    for _ in 0..plan.pairs {
        let x = unit_vector(&mut r, dim);
        let y = if r.random::<f64>() < plan.near_fraction {
            let eps = 10f64.powf(-3.0 * r.random::<f64>());
            add(&x, &scale(&unit_vector(&mut r, dim), eps))
        } else {
            unit_vector(&mut r, dim)
        };
        observe(x, y, &mut best)?;
    }

    if best.is_some() {
        let mut step = 0.1;
        for _ in 0..plan.refine_steps {
            let w = best.as_ref().expect("witness present");
            let s = step * w.distance;
            let x = add(&w.x, &scale(&unit_vector(&mut r, dim), s));
            let y = add(&w.y, &scale(&unit_vector(&mut r, dim), s));
            if observe(x, y, &mut best)? {
                step = (step * 1.5).min(1.0);
            } else {
                step *= 0.7;
                if step < 1e-6 {
                    step = 0.1;
                }
            }
        }
    }

    let witness = best.ok_or(Error::AllPairsEquivalent)?;
    Ok(LipschitzReport {
        upper_bound_exact: upper_exact,
        upper_bound_relaxed: upper_relaxed,
        lower_bound_empirical: witness.ratio,
        max_ratio,
        mean_ratio: sum / retained as f64,
        witness_pair: witness,
        samples: SampleStats {
            requested: plan.pairs,
            retained,
            refine_steps: plan.refine_steps,
            seed: plan.seed,
        },
        upper_violations: violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coorbit::Selector;
    use crate::group::{FiniteGroupAction, GroupSpec};
    use crate::sampling::random_unit_windows;
    use std::sync::Arc;

    fn group(spec: GroupSpec) -> Arc<FiniteGroupAction> {
        Arc::new(FiniteGroupAction::build(&spec).unwrap())
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(8, 0), 1.0);
        assert_eq!(binomial(8, 8), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(40, 20), 137_846_528_820.0);
    }

    #[test]
    fn combinations_enumerate_all_subsets() {
        let all: Vec<Vec<usize>> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(3, 3).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn single_rank_bound_is_window_norm() {
        let w = vec![0.5, -1.0, 2.0, 0.25];
        let wn = crate::linalg::norm(&w);
        let cfg = CoorbitConfig::max_filter(group(GroupSpec::Dihedral { n: 4 }), vec![w]).unwrap();
        let b = upper_bound_exact(&cfg).unwrap();
        assert!((b - wn).abs() < 1e-12);
    }

    #[test]
    fn full_rank_selection_equals_relaxed_bound() {
        let cfg = CoorbitConfig::new(
            group(GroupSpec::Cyclic { n: 4 }),
            random_unit_windows(1, 4, 2),
            Selector::full(4, 1),
        )
        .unwrap();
        let exact = upper_bound_exact(&cfg).unwrap();
        assert!((exact - upper_bound_relaxed(&cfg)).abs() < 1e-12);
    }

    #[test]
    fn scalar_sign_flip_bounds() {
        let cfg = CoorbitConfig::max_filter(group(GroupSpec::SignFlips { d: 1 }), vec![vec![1.0]])
            .unwrap();
        assert!((upper_bound_exact(&cfg).unwrap() - 1.0).abs() < 1e-15);
        assert!((upper_bound_relaxed(&cfg) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_windows_under_trivial_group() {
        let ws = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let cfg = CoorbitConfig::max_filter(group(GroupSpec::Trivial { d: 3 }), ws).unwrap();
        assert!((upper_bound_relaxed(&cfg) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let cfg = CoorbitConfig::new(
            group(GroupSpec::Cyclic { n: 8 }),
            random_unit_windows(4, 8, 1),
            Selector::top_k(4, 4),
        )
        .unwrap();
        assert_eq!(enumeration_size(&cfg), 70f64.powi(4));
        assert!(matches!(
            upper_bound_exact(&cfg),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn exact_bound_is_below_relaxed() {
        let cfg = CoorbitConfig::new(
            group(GroupSpec::Dihedral { n: 4 }),
            random_unit_windows(2, 4, 7),
            Selector::from_pairs([(1, 1), (3, 1), (2, 2)]),
        )
        .unwrap();
        assert!(upper_bound_exact(&cfg).unwrap() <= upper_bound_relaxed(&cfg) + 1e-12);
    }

    #[test]
    fn trivial_group_isometry_has_unit_ratio() {
        let ws = vec![vec![0.6, 0.8], vec![-0.8, 0.6]];
        let cfg = CoorbitConfig::max_filter(group(GroupSpec::Trivial { d: 2 }), ws).unwrap();
        let plan = SamplingPlan {
            pairs: 500,
            seed: 3,
            refine_steps: 50,
            near_fraction: 0.3,
        };
        let rep = estimate_lower_bound(&cfg, &plan).unwrap();
        assert!((rep.lower_bound_empirical - 1.0).abs() < 1e-12);
        assert!((rep.max_ratio - 1.0).abs() < 1e-12);
        assert_eq!(rep.upper_violations, 0);
    }

    #[test]
    fn constant_direction_drives_lower_bound_to_zero() {
        // one window along e1: Φ ignores the second coordinate entirely
        let cfg = CoorbitConfig::max_filter(group(GroupSpec::Trivial { d: 2 }), vec![vec![1.0, 0.0]])
            .unwrap();
        let plan = SamplingPlan {
            pairs: 20_000,
            seed: 5,
            ..SamplingPlan::default()
        };
        let rep = estimate_lower_bound(&cfg, &plan).unwrap();
        assert!(rep.lower_bound_empirical < 1e-3, "{}", rep.lower_bound_empirical);
    }

    #[test]
    fn scaling_pairs_leaves_ratio_unchanged() {
        let cfg = CoorbitConfig::max_filter(
            group(GroupSpec::Cyclic { n: 5 }),
            random_unit_windows(10, 5, 4),
        )
        .unwrap();
        let x = [0.1, 0.9, -0.3, 0.4, 0.2];
        let y = [-0.5, 0.2, 0.7, 0.0, 0.3];
        let (r1, _) = pair_ratio(&cfg, &x, &y).unwrap().unwrap();
        let (r2, _) = pair_ratio(&cfg, &scale(&x, 2.0), &scale(&y, 2.0)).unwrap().unwrap();
        assert!((r1 - r2).abs() < 1e-12 * r1);
    }

    #[test]
    fn equivalent_only_sampling_is_an_error() {
        // a 1-d sign flip on a single window: all unit pairs are ±1, hence equivalent
        let cfg = CoorbitConfig::max_filter(group(GroupSpec::SignFlips { d: 1 }), vec![vec![1.0]])
            .unwrap();
        let plan = SamplingPlan {
            pairs: 100,
            seed: 1,
            refine_steps: 10,
            near_fraction: 0.0,
        };
        assert_eq!(
            estimate_lower_bound(&cfg, &plan).unwrap_err(),
            Error::AllPairsEquivalent
        );
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = CoorbitConfig::max_filter(
            group(GroupSpec::Cyclic { n: 4 }),
            random_unit_windows(6, 4, 2),
        )
        .unwrap();
        let plan = SamplingPlan {
            pairs: 2_000,
            seed: 99,
            refine_steps: 100,
            near_fraction: 0.25,
        };
        let a = estimate_lower_bound(&cfg, &plan).unwrap();
        let b = estimate_lower_bound(&cfg, &plan).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.upper_violations, 0);
    }
}
