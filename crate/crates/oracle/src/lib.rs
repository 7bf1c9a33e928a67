//! Slow, literal reference implementations used to cross-check `coorbit`.
//!
//! Nothing here calls into the numerical code of the main crate. Only the raw
//! group matrices, the windows and the selected `(rank, window)` pairs are read
//! from a [`CoorbitConfig`]; every product, sort, eigenvalue and distance is
//! recomputed from scratch.

use std::fmt;

use coorbit::CoorbitConfig;

/// Largest `Π_i C(N, m_i)` that [`naive_upper_bound`] will enumerate.
pub const NAIVE_ENUM_CAP: f64 = 1e4;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    DimensionMismatch { expected: usize, got: usize },
    EnumerationTooLarge { count: f64, cap: f64 },
    DimensionTooLarge { dim: usize },
    NoSeparatedPairs,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { expected, got } => {
                write!(f, "expected a vector of length {expected}, got {got}")
            }
            Self::EnumerationTooLarge { count, cap } => {
                write!(f, "{count} subset tuples exceeds the oracle cap of {cap}")
            }
            Self::DimensionTooLarge { dim } => write!(f, "sphere grid needs d <= 3, got {dim}"),
            Self::NoSeparatedPairs => write!(f, "no grid pair is separated in the quotient"),
        }
    }
}

impl std::error::Error for OracleError {}

pub type Result<T> = std::result::Result<T, OracleError>;

fn act(cfg: &CoorbitConfig, g: usize, v: &[f64]) -> Vec<f64> {
    let d = cfg.dim();
    let u = cfg.group().matrix(g);
    (0..d)
        .map(|r| (0..d).map(|c| u[r * d + c] * v[c]).sum())
        .collect()
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Φ(x)` by computing all `N` products per window, sorting, and indexing.
pub fn naive_embed(cfg: &CoorbitConfig, x: &[f64]) -> Result<Vec<f64>> {
    let d = cfg.dim();
    if x.len() != d {
        return Err(OracleError::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    let n = cfg.group().order();
    let mut out = Vec::new();
    for &(rank, window) in cfg.selector().pairs() {
        let w = &cfg.windows()[window - 1];
        let mut vals: Vec<f64> = (0..n).map(|g| inner(&act(cfg, g, w), x)).collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        out.push(vals[rank - 1]);
    }
    Ok(out)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let scale: f64 = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u64..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&g| m >> g & 1 == 1).collect())
        .collect()
}

/// `B = max λ_max(Σ_i Σ_{g∈σ_i} U_g w_i (U_g w_i)ᵀ)` over every choice of
/// subsets `|σ_i| = m_i`, by brute force. Returns `B`, not `√B`.
pub fn naive_upper_bound(cfg: &CoorbitConfig) -> Result<f64> {
    let n = cfg.group().order();
    let d = cfg.dim();
    let p = cfg.windows().len();
    let mut sizes = vec![0usize; p];
    for &(_, window) in cfg.selector().pairs() {
        sizes[window - 1] += 1;
    }
    let count: f64 = sizes
        .iter()
        .filter(|&&m| m > 0)
        .map(|&m| (0..m).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64))
        .product();
    if count > NAIVE_ENUM_CAP || n >= 64 {
        return Err(OracleError::EnumerationTooLarge {
            count,
            cap: NAIVE_ENUM_CAP,
        });
    }
    let choices: Vec<(usize, Vec<Vec<usize>>)> = (0..p)
        .filter(|&i| sizes[i] > 0)
        .map(|i| (i, subsets_of_size(n, sizes[i])))
        .collect();
    let images: Vec<Vec<Vec<f64>>> = cfg
        .windows()
        .iter()
        .map(|w| (0..n).map(|g| act(cfg, g, w)).collect())
        .collect();

    let mut best = f64::NEG_INFINITY;
    let mut cursor = vec![0usize; choices.len()];
    loop {
        let mut m = vec![vec![0.0; d]; d];
        for (slot, (i, subsets)) in choices.iter().enumerate() {
            for &g in &subsets[cursor[slot]] {
                let v = &images[*i][g];
                for r in 0..d {
                    for c in 0..d {
                        m[r][c] += v[r] * v[c];
                    }
                }
            }
        }
        let top = jacobi_eigenvalues(m).into_iter().fold(f64::NEG_INFINITY, f64::max);
        best = best.max(top);

        let mut slot = 0;
        loop {
            if slot == cursor.len() {
                return Ok(best);
            }
            cursor[slot] += 1;
            if cursor[slot] < choices[slot].1.len() {
                break;
            }
            cursor[slot] = 0;
            slot += 1;
        }
    }
}

/// `min_g ‖x − U_g y‖` by direct enumeration.
pub fn naive_quotient_distance(cfg: &CoorbitConfig, x: &[f64], y: &[f64]) -> f64 {
    (0..cfg.group().order())
        .map(|g| {
            let gy = act(cfg, g, y);
            x.iter().zip(&gy).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Unit vectors from the boundary of the cube `[−1, 1]^d` sampled at spacing
/// `2^{1−resolution}`. Each resolution contains the previous one.
pub fn sphere_grid(dim: usize, resolution: u32) -> Vec<Vec<f64>> {
    let steps = 1usize << resolution;
    let coord = |k: usize| -1.0 + 2.0 * k as f64 / steps as f64;
    let total = (steps + 1).pow(dim as u32);
    let mut out = Vec::new();
    for flat in 0..total {
        let mut rem = flat;
        let ks: Vec<usize> = (0..dim)
            .map(|_| {
                let k = rem % (steps + 1);
                rem /= steps + 1;
                k
            })
            .collect();
        if !ks.iter().any(|&k| k == 0 || k == steps) {
            continue;
        }
        let v: Vec<f64> = ks.into_iter().map(coord).collect();
        let n = inner(&v, &v).sqrt();
        out.push(v.into_iter().map(|c| c / n).collect());
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereScan {
    pub min_ratio: f64,
    pub points: usize,
    pub pairs: usize,
    pub witness: (Vec<f64>, Vec<f64>),
}

/// Smallest `‖Φ(x) − Φ(y)‖ / d([x],[y])` over pairs of grid points on the unit
/// sphere separated by more than the configured floor.
pub fn sphere_scan(cfg: &CoorbitConfig, resolution: u32) -> Result<SphereScan> {
    let d = cfg.dim();
    if d > 3 {
        return Err(OracleError::DimensionTooLarge { dim: d });
    }
    let floor = cfg.group().tolerances().sep_floor;
    let grid = sphere_grid(d, resolution);
    let phis: Vec<Vec<f64>> = grid
        .iter()
        .map(|x| naive_embed(cfg, x))
        .collect::<Result<_>>()?;
    let mut best: Option<(f64, usize, usize)> = None;
    let mut pairs = 0;
    for a in 0..grid.len() {
        for b in a + 1..grid.len() {
            let q = naive_quotient_distance(cfg, &grid[a], &grid[b]);
            if q <= floor {
                continue;
            }
            pairs += 1;
            let num = phis[a]
                .iter()
                .zip(&phis[b])
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                .sqrt();
            let r = num / q;
            if best.is_none_or(|(m, _, _)| r < m) {
                best = Some((r, a, b));
            }
        }
    }
    let (min_ratio, a, b) = best.ok_or(OracleError::NoSeparatedPairs)?;
    Ok(SphereScan {
        min_ratio,
        points: grid.len(),
        pairs,
        witness: (grid[a].clone(), grid[b].clone()),
    })
}

/// Minimum ratio from [`sphere_scan`].
pub fn sphere_min_ratio(cfg: &CoorbitConfig, resolution: u32) -> Result<f64> {
    Ok(sphere_scan(cfg, resolution)?.min_ratio)
}
