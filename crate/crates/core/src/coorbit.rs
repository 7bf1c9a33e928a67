//! Sorted coorbits, the assembled embedding `Φ_{w,S}`, and the level-set and
//! gap diagnostics attached to each rank.
//!
//! Indexing: the selector uses 1-based `(rank, window)` pairs, matching the
//! usual notation for `S ⊂ [N] × [p]`. Every other method takes 0-based
//! window and rank indices.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::FiniteGroupAction;
use crate::linalg::{dot, norm};

/// Nonincreasing copy of `v`.
pub fn sort_desc(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// The selector set `S` as 1-based `(rank, window)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selector {
    pairs: Vec<(usize, usize)>,
}

impl Selector {
    /// Pairs are kept sorted by window, then rank. Range and duplicate checks
    /// happen when the selector is attached to a [`CoorbitConfig`].
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_by_key(|&(rank, window)| (window, rank));
        Self { pairs }
    }

    /// `S_max = {(1, k) : k ∈ [p]}`.
    pub fn max_filter(windows: usize) -> Self {
        Self::top_k(windows, 1)
    }

    /// Ranks `1..=k` for every window.
    pub fn top_k(windows: usize, k: usize) -> Self {
        Self::from_pairs((1..=windows).flat_map(|i| (1..=k).map(move |j| (j, i))))
    }

    /// Every rank of every window.
    pub fn full(order: usize, windows: usize) -> Self {
        Self::top_k(windows, order)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Windows plus selector defining `Φ_{w,S}` over a group action.
#[derive(Debug, Clone)]
pub struct CoorbitConfig {
    group: Arc<FiniteGroupAction>,
    windows: Vec<Vec<f64>>,
    window_norms: Vec<f64>,
    selector: Selector,
    ranks: Vec<Vec<usize>>,
    // per window, row-major N × d block of U_g w_i
    orbits: Vec<Vec<f64>>,
}

/// One coordinate of a sorted coorbit with its level set and gap.
#[derive(Debug, Clone, PartialEq)]
pub struct CoorbitValue {
    pub window: usize,
    pub rank: usize,
    pub value: f64,
    pub level_set: Vec<usize>,
    pub gap: f64,
}

/// All `N` inner products `⟨U_g w_i, x⟩` for one window, sorted once and
/// shared by every rank.
#[derive(Debug, Clone)]
pub struct WindowCoorbit {
    products: Vec<f64>,
    order: Vec<usize>,
    eps: f64,
    window_norm: f64,
    x_norm: f64,
}

impl WindowCoorbit {
    fn new(products: Vec<f64>, window_norm: f64, x_norm: f64, tie: f64) -> Self {
        let mut order: Vec<usize> = (0..products.len()).collect();
        // stable: exact ties keep ascending element index
        order.sort_by(|&a, &b| products[b].total_cmp(&products[a]));
        Self {
            products,
            order,
            eps: tie * window_norm * x_norm,
            window_norm,
            x_norm,
        }
    }

    /// Inner products indexed by group element.
    pub fn products(&self) -> &[f64] {
        &self.products
    }

    /// The sorted coorbit `↓⟨U_g w_i, x⟩`.
    pub fn sorted(&self) -> Vec<f64> {
        self.order.iter().map(|&g| self.products[g]).collect()
    }

    /// `Φ_{i,j}(x)` for 0-based rank `j`.
    pub fn value(&self, j: usize) -> f64 {
        self.products[self.order[j]]
    }

    /// The element sitting at sorted position `j`; it achieves `Φ_{i,j}(x)`.
    pub fn element_at(&self, j: usize) -> usize {
        self.order[j]
    }

    /// Absolute tie threshold used for every comparison on this coorbit.
    pub fn tie_eps(&self) -> f64 {
        self.eps
    }

    /// Whether two products are equal under the tie threshold.
    pub fn ties(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.eps
    }

    // Sorted positions [lo, hi] whose values tie with rank j.
    fn block(&self, j: usize) -> (usize, usize) {
        let v = self.value(j);
        let mut lo = j;
        while lo > 0 && self.ties(self.value(lo - 1), v) {
            lo -= 1;
        }
        let mut hi = j;
        while hi + 1 < self.order.len() && self.ties(self.value(hi + 1), v) {
            hi += 1;
        }
        (lo, hi)
    }

    fn elements(&self, positions: std::ops::Range<usize>) -> Vec<usize> {
        let mut out = self.order[positions].to_vec();
        out.sort_unstable();
        out
    }

    /// `L^{i,j}(x)`: elements whose product ties with `Φ_{i,j}(x)`.
    pub fn level_set(&self, j: usize) -> Vec<usize> {
        let (lo, hi) = self.block(j);
        self.elements(lo..hi + 1)
    }

    /// Elements with product strictly above `Φ_{i,j}(x)`.
    pub fn strictly_above(&self, j: usize) -> Vec<usize> {
        let (lo, _) = self.block(j);
        self.elements(0..lo)
    }

    /// Elements with product strictly below `Φ_{i,j}(x)`.
    pub fn strictly_below(&self, j: usize) -> Vec<usize> {
        let (_, hi) = self.block(j);
        self.elements(hi + 1..self.order.len())
    }

    /// `Δ^{i,j}(x)`: distance from `Φ_{i,j}(x)` to the nearest other orbit
    /// value, divided by `‖w_i‖`; `‖x‖/‖w_i‖` when the level set is all of `G`.
    pub fn gap(&self, j: usize) -> f64 {
        let (lo, hi) = self.block(j);
        let n = self.order.len();
        if lo == 0 && hi + 1 == n {
            return self.x_norm / self.window_norm;
        }
        let v = self.value(j);
        let mut best = f64::INFINITY;
        if lo > 0 {
            best = best.min(self.value(lo - 1) - v);
        }
        if hi + 1 < n {
            best = best.min(v - self.value(hi + 1));
        }
        best / self.window_norm
    }
}

impl CoorbitConfig {
    pub fn new(
        group: Arc<FiniteGroupAction>,
        windows: Vec<Vec<f64>>,
        selector: Selector,
    ) -> Result<Self> {
        let n = group.order();
        let p = windows.len();
        let mut window_norms = Vec::with_capacity(p);
        for (index, w) in windows.iter().enumerate() {
            group.check_dim(w)?;
            let wn = norm(w);
            if !(wn > 0.0) {
                return Err(Error::ZeroWindow { index });
            }
            window_norms.push(wn);
        }
        if selector.is_empty() {
            return Err(Error::InvalidSelector("selector is empty (m = 0)".into()));
        }
        let mut ranks = vec![Vec::new(); p];
        for &(rank, window) in selector.pairs() {
            if window == 0 || window > p {
                return Err(Error::InvalidSelector(format!(
                    "window {window} outside 1..={p}"
                )));
            }
            if rank == 0 || rank > n {
                return Err(Error::InvalidSelector(format!(
                    "rank {rank} outside 1..={n}"
                )));
            }
            let slot = &mut ranks[window - 1];
            if slot.last() == Some(&(rank - 1)) {
                return Err(Error::InvalidSelector(format!(
                    "duplicate pair ({rank}, {window})"
                )));
            }
            slot.push(rank - 1);
        }
        let orbits = windows
            .iter()
            .map(|w| (0..n).flat_map(|g| group.apply_unchecked(g, w)).collect())
            .collect();
        Ok(Self {
            group,
            windows,
            window_norms,
            selector,
            ranks,
            orbits,
        })
    }

    /// Max filter bank: rank 1 of every window.
    pub fn max_filter(group: Arc<FiniteGroupAction>, windows: Vec<Vec<f64>>) -> Result<Self> {
        let p = windows.len();
        Self::new(group, windows, Selector::max_filter(p))
    }

    pub fn group(&self) -> &FiniteGroupAction {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroupAction> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.group.dim()
    }

    pub fn windows(&self) -> &[Vec<f64>] {
        &self.windows
    }

    pub fn window_norm(&self, i: usize) -> f64 {
        self.window_norms[i]
    }

    /// `p`
    pub fn num_windows(&self) -> usize {
        self.windows.len()
    }

    /// `m = |S|`
    pub fn embedding_dim(&self) -> usize {
        self.selector.len()
    }

    pub fn selector(&self) -> &Selector {
        &self.selector
    }

    /// Selected 0-based ranks of window `i`, ascending.
    pub fn ranks(&self, i: usize) -> &[usize] {
        &self.ranks[i]
    }

    /// `U_g w_i`.
    pub fn window_image(&self, i: usize, g: usize) -> &[f64] {
        let d = self.dim();
        &self.orbits[i][g * d..(g + 1) * d]
    }

    /// `(window, rank)` of every embedding coordinate, 0-based, in output order.
    pub fn coordinates(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ranks
            .iter()
            .enumerate()
            .flat_map(|(i, rs)| rs.iter().map(move |&j| (i, j)))
    }

    fn check_window(&self, i: usize) -> Result<()> {
        if i >= self.windows.len() {
            return Err(Error::WindowIndexOutOfRange {
                index: i,
                count: self.windows.len(),
            });
        }
        Ok(())
    }

    fn check_rank(&self, j: usize) -> Result<()> {
        let n = self.group.order();
        if j >= n {
            return Err(Error::RankOutOfRange { index: j, order: n });
        }
        Ok(())
    }

    fn analyze_unchecked(&self, i: usize, x: &[f64], x_norm: f64) -> WindowCoorbit {
        let d = self.dim();
        let products = self.orbits[i].chunks_exact(d).map(|u| dot(u, x)).collect();
        WindowCoorbit::new(
            products,
            self.window_norms[i],
            x_norm,
            self.group.tolerances().tie,
        )
    }

    /// Inner products of `x` against the orbit of window `i`, sorted.
    pub fn analyze(&self, i: usize, x: &[f64]) -> Result<WindowCoorbit> {
        self.group.check_dim(x)?;
        self.check_window(i)?;
        Ok(self.analyze_unchecked(i, x, norm(x)))
    }

    /// `↓⟨U_g w_i, x⟩_{g∈G}`, length `N`.
    pub fn coorbit_column(&self, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.analyze(i, x)?.sorted())
    }

    /// `Φ_{w,S}(x) ∈ ℝ^m`, windows ascending then ranks ascending.
    pub fn embed(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.group.check_dim(x)?;
        let xn = norm(x);
        let mut out = Vec::with_capacity(self.embedding_dim());
        for (i, rs) in self.ranks.iter().enumerate() {
            if rs.is_empty() {
                continue;
            }
            let col = self.analyze_unchecked(i, x, xn);
            out.extend(rs.iter().map(|&j| col.value(j)));
        }
        Ok(out)
    }

    /// Embeds every row, in parallel, preserving order.
    pub fn embed_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        xs.par_iter().map(|x| self.embed(x)).collect()
    }

    /// For each embedding coordinate, a group element achieving its value.
    pub fn realized_elements(&self, x: &[f64]) -> Result<Vec<usize>> {
        self.group.check_dim(x)?;
        let xn = norm(x);
        let mut out = Vec::with_capacity(self.embedding_dim());
        for (i, rs) in self.ranks.iter().enumerate() {
            if rs.is_empty() {
                continue;
            }
            let col = self.analyze_unchecked(i, x, xn);
            out.extend(rs.iter().map(|&j| col.element_at(j)));
        }
        Ok(out)
    }

    /// Rows `U_g w_i` of the linear map that agrees with `Φ` on the cell
    /// containing `x` (`m × d`, one row per embedding coordinate).
    pub fn local_linear_map(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        let elems = self.realized_elements(x)?;
        Ok(self
            .coordinates()
            .zip(elems)
            .map(|((i, _), g)| self.window_image(i, g).to_vec())
            .collect())
    }

    pub fn level_set(&self, i: usize, j: usize, x: &[f64]) -> Result<Vec<usize>> {
        self.check_rank(j)?;
        Ok(self.analyze(i, x)?.level_set(j))
    }

    pub fn gap(&self, i: usize, j: usize, x: &[f64]) -> Result<f64> {
        self.check_rank(j)?;
        Ok(self.analyze(i, x)?.gap(j))
    }

    /// `min_{i,j} Δ^{i,j}(x)` over all windows and all ranks.
    pub fn global_gap(&self, x: &[f64]) -> Result<f64> {
        self.group.check_dim(x)?;
        let xn = norm(x);
        let n = self.group.order();
        Ok((0..self.num_windows())
            .map(|i| {
                let col = self.analyze_unchecked(i, x, xn);
                (0..n).map(|j| col.gap(j)).fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min))
    }

    /// Every rank of window `i` with its level set and gap.
    pub fn coorbit_values(&self, i: usize, x: &[f64]) -> Result<Vec<CoorbitValue>> {
        let col = self.analyze(i, x)?;
        Ok((0..self.group.order())
            .map(|j| CoorbitValue {
                window: i,
                rank: j,
                value: col.value(j),
                level_set: col.level_set(j),
                gap: col.gap(j),
            })
            .collect())
    }
}
