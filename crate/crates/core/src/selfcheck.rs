//! Sampled structural invariants of coorbit level sets and gaps.
//!
//! Each check draws random inputs and counts violations of one property:
//!
//! - `rank-counting`: at most `j − 1` orbit values lie strictly above the
//!   rank-`j` value and at most `N − j` strictly below; tied ranks share level
//!   sets, and a strict drop after rank `j` splits the group into the `j` top
//!   elements and the `N − j` others.
//! - `level-set-nesting`: for `‖y‖ < Δ^{i,j}(x)/2` the level set of `x + y` is
//!   contained in that of `x`, and the strict above/below sets only grow.
//! - `ray-stability`: `L^{i,j}(x + c₁y) = L^{i,j}(x + c₂y)` whenever
//!   `max(c₁, c₂)‖y‖ < Δ^{i,j}(x)/4`.
//! - `scaling`: `L(tx) = L(x)`, `Δ(tx) = tΔ(x)` and `Δ(x) > 0` for `x ≠ 0`.
//! - `perturbation-chain`: a geometrically shrinking chain `z₁, …, z_k` keeps
//!   its level sets and gap (within a factor 4) under coefficient jitter and
//!   small additive noise.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use crate::coorbit::{CoorbitConfig, WindowCoorbit};
use crate::error::Result;
use crate::linalg::{add, norm, scale};
use crate::sampling::{rng, unit_vector};

/// Relative tolerance for `Δ(tx) = tΔ(x)`.
pub const SCALING_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub checks: usize,
    pub violations: usize,
    /// First few violation descriptions.
    pub examples: Vec<String>,
}

impl InvariantCheck {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            checks: 0,
            violations: 0,
            examples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.examples.len() < 5 {
                self.examples.push(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn set(v: Vec<usize>) -> BTreeSet<usize> {
    v.into_iter().collect()
}

fn complement(n: usize, s: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..n).filter(|g| !s.contains(g)).collect()
}

// Random nonzero vector with norm in [0.1, 10].
fn sample_point<R: Rng>(r: &mut R, dim: usize) -> Vec<f64> {
    let s = 10f64.powf(r.random_range(-1.0..1.0));
    scale(&unit_vector(r, dim), s)
}

/// Rank counting and the tie/strict-drop structure of consecutive ranks.
pub fn check_rank_counting(cfg: &CoorbitConfig, trials: usize, seed: u64) -> Result<InvariantCheck> {
    let mut out = InvariantCheck::new("rank-counting");
    let mut r = rng(seed);
    let n = cfg.group().order();
    for _ in 0..trials {
        let x = sample_point(&mut r, cfg.dim());
        for i in 0..cfg.num_windows() {
            let col = cfg.analyze(i, &x)?;
            let prods = col.products();
            let levels: Vec<BTreeSet<usize>> = (0..n).map(|j| set(col.level_set(j))).collect();
            for j in 0..n {
                let v = col.value(j);
                let above = prods.iter().filter(|&&p| p > v).count();
                let below = prods.iter().filter(|&&p| p < v).count();
                out.record(above <= j && below < n - j, || {
                    format!("window {i} rank {}: {above} above, {below} below", j + 1)
                });
            }
            for j in 0..n.saturating_sub(1) {
                let (a, b) = (col.value(j), col.value(j + 1));
                if col.ties(a, b) {
                    out.record(levels[j] == levels[j + 1], || {
                        format!("window {i} ranks {}/{} tie but level sets differ", j + 1, j + 2)
                    });
                } else {
                    let top: BTreeSet<usize> = levels[..=j].iter().flatten().copied().collect();
                    let bottom: BTreeSet<usize> = levels[j + 1..].iter().flatten().copied().collect();
                    let ok = a > b
                        && levels[j] != levels[j + 1]
                        && top.len() == j + 1
                        && bottom.len() == n - j - 1
                        && set(col.strictly_above(j + 1)) == top
                        && set(col.strictly_below(j)) == bottom;
                    out.record(ok, || {
                        format!("window {i} strict drop after rank {} has bad structure", j + 1)
                    });
                }
            }
        }
    }
    Ok(out)
}

/// The five inclusions for perturbations shorter than half the gap.
pub fn check_nesting(cfg: &CoorbitConfig, trials: usize, seed: u64) -> Result<InvariantCheck> {
    let mut out = InvariantCheck::new("level-set-nesting");
    let mut r = rng(seed);
    let n = cfg.group().order();
    for _ in 0..trials {
        let x = sample_point(&mut r, cfg.dim());
        for i in 0..cfg.num_windows() {
            let cx = cfg.analyze(i, &x)?;
            for j in 0..n {
                let radius = r.random_range(0.0..0.95) * cx.gap(j) / 2.0;
                let y = scale(&unit_vector(&mut r, cfg.dim()), radius);
                let cxy = cfg.analyze(i, &add(&x, &y))?;
                let ok = nested(&cx, &cxy, j, n);
                out.record(ok, || format!("window {i} rank {}: inclusion fails", j + 1));
            }
        }
    }
    Ok(out)
}

fn nested(cx: &WindowCoorbit, cxy: &WindowCoorbit, j: usize, n: usize) -> bool {
    let above_x = set(cx.strictly_above(j));
    let below_x = set(cx.strictly_below(j));
    let above_xy = set(cxy.strictly_above(j));
    let below_xy = set(cxy.strictly_below(j));
    set(cxy.level_set(j)).is_subset(&set(cx.level_set(j)))
        && above_x.is_subset(&above_xy)
        && below_x.is_subset(&below_xy)
        && complement(n, &below_xy).is_subset(&complement(n, &below_x))
        && complement(n, &above_xy).is_subset(&complement(n, &above_x))
}

/// Level sets agree at two points on a short ray from `x`.
pub fn check_ray_stability(cfg: &CoorbitConfig, trials: usize, seed: u64) -> Result<InvariantCheck> {
    let mut out = InvariantCheck::new("ray-stability");
    let mut r = rng(seed);
    let n = cfg.group().order();
    for _ in 0..trials {
        let x = sample_point(&mut r, cfg.dim());
        for i in 0..cfg.num_windows() {
            let cx = cfg.analyze(i, &x)?;
            for j in 0..n {
                let c1: f64 = r.random_range(0.01..1.0);
                let c2: f64 = r.random_range(0.01..1.0);
                let len = r.random_range(0.0..0.95) * cx.gap(j) / 4.0 / c1.max(c2);
                let y = scale(&unit_vector(&mut r, cfg.dim()), len);
                let l1 = cfg.analyze(i, &add(&x, &scale(&y, c1)))?.level_set(j);
                let l2 = cfg.analyze(i, &add(&x, &scale(&y, c2)))?.level_set(j);
                out.record(l1 == l2, || format!("window {i} rank {}: {l1:?} vs {l2:?}", j + 1));
            }
        }
    }
    Ok(out)
}

/// Positive scaling preserves level sets and scales gaps; gaps are positive.
pub fn check_scaling(cfg: &CoorbitConfig, trials: usize, seed: u64) -> Result<InvariantCheck> {
    let mut out = InvariantCheck::new("scaling");
    let mut r = rng(seed);
    let n = cfg.group().order();
    for _ in 0..trials {
        let x = sample_point(&mut r, cfg.dim());
        let t = 10f64.powf(r.random_range(-2.0..2.0));
        let tx = scale(&x, t);
        for i in 0..cfg.num_windows() {
            let cx = cfg.analyze(i, &x)?;
            let ctx = cfg.analyze(i, &tx)?;
            for j in 0..n {
                let (gx, gtx) = (cx.gap(j), ctx.gap(j));
                let ok = cx.level_set(j) == ctx.level_set(j)
                    && gx > 0.0
                    && (gtx - t * gx).abs() <= SCALING_REL_TOL * t * gx;
                out.record(ok, || {
                    format!("window {i} rank {}: t = {t}, Δ(x) = {gx}, Δ(tx) = {gtx}", j + 1)
                });
            }
        }
    }
    Ok(out)
}

/// Jittered sums of a shrinking chain keep their level sets, their cumulative
/// level sets from either side, and their gap within a factor of four.
pub fn check_perturbation_chain(
    cfg: &CoorbitConfig,
    trials: usize,
    seed: u64,
) -> Result<InvariantCheck> {
    let mut out = InvariantCheck::new("perturbation-chain");
    let mut r = rng(seed);
    let n = cfg.group().order();
    let dim = cfg.dim();
    for _ in 0..trials {
        let i = r.random_range(0..cfg.num_windows());
        let j = r.random_range(0..n);
        let k = r.random_range(2..=4usize);
        let gap_at = |v: &[f64]| -> Result<f64> { Ok(cfg.analyze(i, v)?.gap(j)) };

        let mut chain = vec![unit_vector(&mut r, dim)];
        let mut partial = chain[0].clone();
        for _ in 1..k {
            let limit = (gap_at(&partial)? / 4.0).min(norm(chain.last().unwrap()) / 4.0);
            let z = scale(&unit_vector(&mut r, dim), r.random_range(0.1..0.99) * limit);
            partial = add(&partial, &z);
            chain.push(z);
        }
        let base_gap = gap_at(&partial)?;
        let spread = base_gap / (16.0 * k as f64);
        let coeffs: Vec<f64> = (0..k)
            .map(|_| 1.0 + r.random_range(-0.99..0.99) * spread)
            .collect();
        let jittered = chain
            .iter()
            .zip(&coeffs)
            .fold(vec![0.0; dim], |acc, (z, a)| add(&acc, &scale(z, *a)));

        let c_base = cfg.analyze(i, &partial)?;
        let c_jit = cfg.analyze(i, &jittered)?;
        let g_jit = c_jit.gap(j);
        let gap_ok = g_jit / 4.0 < base_gap && base_gap < 4.0 * g_jit;
        let level_ok = c_base.level_set(j) == c_jit.level_set(j);
        let upper_ok = c_base.strictly_below(j) == c_jit.strictly_below(j);
        let lower_ok = c_base.strictly_above(j) == c_jit.strictly_above(j);

        let e = scale(&unit_vector(&mut r, dim), r.random_range(0.0..0.99) * base_gap / 16.0);
        let noisy_ok = cfg.analyze(i, &add(&jittered, &e))?.level_set(j)
            == cfg.analyze(i, &add(&partial, &e))?.level_set(j);

        out.record(gap_ok && level_ok && upper_ok && lower_ok && noisy_ok, || {
            format!(
                "window {i} rank {} chain of {k}: gap {gap_ok}, level {level_ok}, \
                 upper {upper_ok}, lower {lower_ok}, noise {noisy_ok}",
                j + 1
            )
        });
    }
    Ok(out)
}

/// Runs every check with `trials` random draws each.
pub fn run_invariant_suite(cfg: &CoorbitConfig, trials: usize, seed: u64) -> Result<Vec<InvariantCheck>> {
    Ok(vec![
        check_rank_counting(cfg, trials, seed)?,
        check_nesting(cfg, trials, seed.wrapping_add(1))?,
        check_ray_stability(cfg, trials, seed.wrapping_add(2))?,
        check_scaling(cfg, trials, seed.wrapping_add(3))?,
        check_perturbation_chain(cfg, trials, seed.wrapping_add(4))?,
    ])
}
