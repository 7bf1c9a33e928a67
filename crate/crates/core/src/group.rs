//! Finite groups acting orthogonally on `ℝ^d`.
//!
//! A [`FiniteGroupAction`] stores every group element as a dense `d × d`
//! matrix together with its composition table. Element `0` is always the
//! identity. When every generator is a signed permutation the closure and the
//! action use a permutation representation internally; results are identical.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dist, norm};
use crate::tolerance::Tolerances;

/// Default cap on the number of elements produced by a closure.
pub const DEFAULT_MAX_ORDER: usize = 10_080;

/// Description of a group to build.
///
/// Permutation generators are image lists: `[1, 0, 2]` maps `e₀ → e₁`,
/// `e₁ → e₀`, `e₂ → e₂`. Explicit generators are row-major `d × d` matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Trivial { d: usize },
    /// Cyclic coordinate shifts on `ℝⁿ`.
    Cyclic { n: usize },
    /// Shifts and the coordinate reversal on `ℝⁿ`.
    Dihedral { n: usize },
    /// All sign changes `diag(±1, …, ±1)` on `ℝᵈ`.
    SignFlips { d: usize },
    Permutations { d: usize, generators: Vec<Vec<usize>> },
    Explicit { d: usize, generators: Vec<Vec<f64>> },
}

impl GroupSpec {
    pub fn dim(&self) -> usize {
        match self {
            GroupSpec::Trivial { d }
            | GroupSpec::SignFlips { d }
            | GroupSpec::Permutations { d, .. }
            | GroupSpec::Explicit { d, .. } => *d,
            GroupSpec::Cyclic { n } | GroupSpec::Dihedral { n } => *n,
        }
    }

    fn label(&self) -> String {
        match self {
            GroupSpec::Trivial { d } => format!("trivial-{d}"),
            GroupSpec::Cyclic { n } => format!("cyclic-{n}"),
            GroupSpec::Dihedral { n } => format!("dihedral-{n}"),
            GroupSpec::SignFlips { d } => format!("sign-flips-{d}"),
            GroupSpec::Permutations { d, .. } => format!("permutations-{d}"),
            GroupSpec::Explicit { d, .. } => format!("explicit-{d}"),
        }
    }

    fn generators(&self) -> Result<Vec<Vec<f64>>> {
        let d = self.dim();
        let gens = match self {
            GroupSpec::Trivial { .. } => Vec::new(),
            GroupSpec::Cyclic { n } => vec![perm_matrix(&shift(*n))],
            GroupSpec::Dihedral { n } => {
                let reversal: Vec<usize> = (0..*n).rev().collect();
                vec![perm_matrix(&shift(*n)), perm_matrix(&reversal)]
            }
            GroupSpec::SignFlips { d } => (0..*d)
                .map(|k| {
                    let mut m = identity(*d);
                    m[k * d + k] = -1.0;
                    m
                })
                .collect(),
            GroupSpec::Permutations { generators, .. } => {
                let mut out = Vec::with_capacity(generators.len());
                for (index, p) in generators.iter().enumerate() {
                    if p.len() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: p.len(),
                        });
                    }
                    let mut seen = vec![false; d];
                    for &img in p {
                        if img >= d || std::mem::replace(&mut seen[img], true) {
                            return Err(Error::InvalidGroup(format!(
                                "generator {index} is not a permutation of 0..{d}"
                            )));
                        }
                    }
                    out.push(perm_matrix(p));
                }
                out
            }
            GroupSpec::Explicit { generators, .. } => generators.clone(),
        };
        Ok(gens)
    }
}

/// Options for [`FiniteGroupAction::build_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupOptions {
    pub tol: Tolerances,
    pub max_order: usize,
}

impl Default for GroupOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct SignedPerm {
    /// `U e_j = ±e_{perm[j]}`
    perm: Vec<usize>,
    negative: Vec<bool>,
}

impl SignedPerm {
    fn identity(d: usize) -> Self {
        Self {
            perm: (0..d).collect(),
            negative: vec![false; d],
        }
    }

    /// `self · other`, i.e. apply `other` first.
    fn compose(&self, other: &SignedPerm) -> SignedPerm {
        let perm = other.perm.iter().map(|&k| self.perm[k]).collect();
        let negative = other
            .perm
            .iter()
            .zip(&other.negative)
            .map(|(&k, &n)| n ^ self.negative[k])
            .collect();
        SignedPerm { perm, negative }
    }

    fn from_matrix(m: &[f64], d: usize, tol: f64) -> Option<SignedPerm> {
        let mut perm = Vec::with_capacity(d);
        let mut negative = Vec::with_capacity(d);
        for col in 0..d {
            let mut hit = None;
            for row in 0..d {
                let v = m[row * d + col];
                if (v.abs() - 1.0).abs() <= tol {
                    if hit.is_some() {
                        return None;
                    }
                    hit = Some((row, v < 0.0));
                } else if v.abs() > tol {
                    return None;
                }
            }
            let (row, neg) = hit?;
            perm.push(row);
            negative.push(neg);
        }
        Some(SignedPerm { perm, negative })
    }

    fn to_matrix(&self) -> Vec<f64> {
        let d = self.perm.len();
        let mut m = vec![0.0; d * d];
        for (col, (&row, &neg)) in self.perm.iter().zip(&self.negative).enumerate() {
            m[row * d + col] = if neg { -1.0 } else { 1.0 };
        }
        m
    }
}

#[derive(Debug, Clone)]
struct PermAction {
    perm: Vec<usize>,
    sign: Vec<f64>,
}

/// A finite group acting on `ℝ^d` through orthogonal matrices.
///
/// Immutable after construction; share it behind an `Arc`.
#[derive(Debug, Clone)]
pub struct FiniteGroupAction {
    dim: usize,
    order: usize,
    matrices: Vec<f64>,
    cayley: Vec<usize>,
    inverses: Vec<usize>,
    label: String,
    fast: Option<Vec<PermAction>>,
    tol: Tolerances,
}

/// The orbit `{U_g x : g ∈ G}` of a vector, with the elements reaching each point.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSet {
    pub base: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub achieving_elements: Vec<Vec<usize>>,
}

impl FiniteGroupAction {
    pub fn build(spec: &GroupSpec) -> Result<Self> {
        Self::build_with(spec, &GroupOptions::default())
    }

    pub fn build_with(spec: &GroupSpec, opts: &GroupOptions) -> Result<Self> {
        let gens = spec.generators()?;
        Self::from_generators(spec.dim(), &gens, spec.label(), opts)
    }

    /// Closes a list of row-major generator matrices under composition.
    pub fn from_generators(
        dim: usize,
        generators: &[Vec<f64>],
        label: impl Into<String>,
        opts: &GroupOptions,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DegenerateDimension { dim });
        }
        let tol = opts.tol;
        for (index, g) in generators.iter().enumerate() {
            if g.len() != dim * dim {
                return Err(Error::DimensionMismatch {
                    expected: dim * dim,
                    got: g.len(),
                });
            }
            let deviation = orthogonality_defect(g, dim);
            if !(deviation <= tol.orth) {
                return Err(Error::NonOrthogonalGenerator { index, deviation });
            }
        }

        let signed: Option<Vec<SignedPerm>> = generators
            .iter()
            .map(|g| SignedPerm::from_matrix(g, dim, tol.orth))
            .collect();

        let (matrices, cayley, fast) = match signed {
            Some(gens) => {
                let (elements, cayley) = close_signed(dim, &gens, opts.max_order)?;
                let matrices = elements.iter().flat_map(|e| e.to_matrix()).collect();
                let fast = elements
                    .iter()
                    .map(|e| PermAction {
                        perm: e.perm.clone(),
                        sign: e.negative.iter().map(|&n| if n { -1.0 } else { 1.0 }).collect(),
                    })
                    .collect();
                (matrices, cayley, Some(fast))
            }
            None => {
                let (matrices, cayley) = close_dense(dim, generators, opts.max_order)?;
                (matrices, cayley, None)
            }
        };

        let order = matrices.len() / (dim * dim);
        let mut inverses = vec![usize::MAX; order];
        for g in 0..order {
            for h in 0..order {
                if cayley[g * order + h] == 0 {
                    inverses[g] = h;
                    break;
                }
            }
            if inverses[g] == usize::MAX {
                return Err(Error::InvalidGroup(format!("element {g} has no inverse")));
            }
        }

        Ok(Self {
            dim,
            order,
            matrices,
            cayley,
            inverses,
            label: label.into(),
            fast,
            tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of elements `N = |G|`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Row-major matrix of element `g`.
    pub fn matrix(&self, g: usize) -> &[f64] {
        let s = self.dim * self.dim;
        &self.matrices[g * s..(g + 1) * s]
    }

    /// Index of `g·h`.
    pub fn compose(&self, g: usize, h: usize) -> usize {
        self.cayley[g * self.order + h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn cayley_table(&self) -> &[usize] {
        &self.cayley
    }

    /// True when every element is a signed permutation matrix.
    pub fn is_signed_permutation(&self) -> bool {
        self.fast.is_some()
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `U_g x`.
    pub fn apply(&self, g: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.dim];
        self.apply_into(g, x, &mut out);
        Ok(out)
    }

    pub(crate) fn apply_into(&self, g: usize, x: &[f64], out: &mut [f64]) {
        match &self.fast {
            Some(fast) => {
                let a = &fast[g];
                for j in 0..self.dim {
                    out[a.perm[j]] = a.sign[j] * x[j];
                }
            }
            None => {
                let m = self.matrix(g);
                for (row, o) in m.chunks_exact(self.dim).zip(out.iter_mut()) {
                    *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
        }
    }

    pub(crate) fn apply_unchecked(&self, g: usize, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply_into(g, x, &mut out);
        out
    }

    /// Exhaustively checks the group axioms and orthogonality.
    pub fn validate(&self) -> Result<()> {
        let (d, n, tol) = (self.dim, self.order, self.tol.orth);
        let fail = |msg: String| Err(Error::InvalidGroup(msg));

        let id = identity(d);
        if max_abs_diff(self.matrix(0), &id) > tol {
            return fail("element 0 is not the identity".into());
        }
        for g in 0..n {
            let dev = orthogonality_defect(self.matrix(g), d);
            if !(dev <= tol) {
                return Err(Error::NonOrthogonalGenerator {
                    index: g,
                    deviation: dev,
                });
            }
        }
        for g in 0..n {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for h in 0..n {
                let gh = self.compose(g, h);
                let hg = self.compose(h, g);
                if gh >= n || std::mem::replace(&mut row[gh], true) {
                    return fail(format!("row {g} of the Cayley table is not a permutation"));
                }
                if hg >= n || std::mem::replace(&mut col[hg], true) {
                    return fail(format!("column {g} of the Cayley table is not a permutation"));
                }
                let prod = matmul(self.matrix(g), self.matrix(h), d);
                if max_abs_diff(&prod, self.matrix(gh)) > tol {
                    return fail(format!("U_{g}·U_{h} differs from U_{gh}"));
                }
            }
            let inv = self.inverse(g);
            if self.compose(g, inv) != 0 || self.compose(inv, g) != 0 {
                return fail(format!("inverse of element {g} is wrong"));
            }
        }
        Ok(())
    }

    /// The orbit of `x`, deduplicated within `dedup · max(1, ‖x‖)`.
    ///
    /// Points are listed in order of their first achieving element, so the
    /// first point is `x` itself.
    pub fn orbit(&self, x: &[f64]) -> Result<OrbitSet> {
        self.check_dim(x)?;
        let eps = self.tol.dedup * norm(x).max(1.0);
        let fixers: Vec<usize> = (0..self.order)
            .filter(|&g| dist(&self.apply_unchecked(g, x), x) <= eps)
            .collect();
        let stab = self.subgroup_generated_by(&fixers);

        let mut assigned = vec![false; self.order];
        let mut points = Vec::new();
        let mut achieving_elements = Vec::new();
        for g in 0..self.order {
            if assigned[g] {
                continue;
            }
            let mut coset: Vec<usize> = stab.iter().map(|&h| self.compose(g, h)).collect();
            coset.sort_unstable();
            for &c in &coset {
                assigned[c] = true;
            }
            points.push(self.apply_unchecked(g, x));
            achieving_elements.push(coset);
        }
        Ok(OrbitSet {
            base: x.to_vec(),
            points,
            achieving_elements,
        })
    }

    /// Stabilizer `H(z) = {g : U_g z = z}` as sorted element indices.
    ///
    /// Membership is `‖U_g z − z‖ ≤ stab·‖z‖`, or `≤ stab` when `z = 0`. The
    /// result is closed under composition.
    pub fn stabilizer(&self, z: &[f64]) -> Result<Vec<usize>> {
        self.check_dim(z)?;
        let zn = norm(z);
        let eps = if zn == 0.0 {
            self.tol.stab
        } else {
            self.tol.stab * zn
        };
        let fixers: Vec<usize> = (0..self.order)
            .filter(|&g| dist(&self.apply_unchecked(g, z), z) <= eps)
            .collect();
        Ok(self.subgroup_generated_by(&fixers))
    }

    /// Separation radius `ρ₀(z)`: the smallest displacement `‖z − U_g z‖` over
    /// elements outside the stabilizer, or `‖z‖` when the stabilizer is all of `G`.
    pub fn separation_radius(&self, z: &[f64]) -> Result<f64> {
        let stab = self.stabilizer(z)?;
        if stab.len() == self.order {
            return Ok(norm(z));
        }
        let inside: HashSet<usize> = stab.into_iter().collect();
        Ok((0..self.order)
            .filter(|g| !inside.contains(g))
            .map(|g| dist(z, &self.apply_unchecked(g, z)))
            .fold(f64::INFINITY, f64::min))
    }

    /// Smallest subgroup containing `elements` (always contains the identity).
    pub fn subgroup_generated_by(&self, elements: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut out = vec![0];
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(a) = queue.pop_front() {
            for &s in elements {
                let b = self.compose(a, s);
                if !member[b] {
                    member[b] = true;
                    out.push(b);
                    queue.push_back(b);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for k in 0..d {
        m[k * d + k] = 1.0;
    }
    m
}

/// Image list of the cyclic shift `e_k → e_{k+1 mod n}`.
fn shift(n: usize) -> Vec<usize> {
    (0..n).map(|k| (k + 1) % n).collect()
}

fn perm_matrix(p: &[usize]) -> Vec<f64> {
    let d = p.len();
    let mut m = vec![0.0; d * d];
    for (col, &row) in p.iter().enumerate() {
        m[row * d + col] = 1.0;
    }
    m
}

fn matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `‖UᵀU − I‖_∞` (entrywise max).
pub(crate) fn orthogonality_defect(u: &[f64], d: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let s: f64 = (0..d).map(|k| u[k * d + i] * u[k * d + j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = (s - target).abs();
            if dev.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(dev);
        }
    }
    worst
}

fn close_signed(
    d: usize,
    gens: &[SignedPerm],
    cap: usize,
) -> Result<(Vec<SignedPerm>, Vec<usize>)> {
    let mut elements = vec![SignedPerm::identity(d)];
    let mut index: HashMap<SignedPerm, usize> = HashMap::from([(elements[0].clone(), 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        for s in gens {
            let b = elements[a].compose(s);
            if !index.contains_key(&b) {
                if elements.len() == cap {
                    return Err(Error::ClosureExceedsCap { cap });
                }
                index.insert(b.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(b);
            }
        }
    }
    let n = elements.len();
    let mut cayley = vec![0; n * n];
    for g in 0..n {
        for h in 0..n {
            cayley[g * n + h] = index[&elements[g].compose(&elements[h])];
        }
    }
    Ok((elements, cayley))
}

// Hash key for dense matrices: entries snapped to a 1e-6 grid. Composition
// error of orthogonal matrices stays many orders of magnitude below that.
fn dense_key(m: &[f64]) -> Vec<i64> {
    m.iter().map(|v| (v * 1e6).round() as i64).collect()
}

fn close_dense(d: usize, gens: &[Vec<f64>], cap: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    let s = d * d;
    let mut matrices = identity(d);
    let mut index: HashMap<Vec<i64>, usize> = HashMap::from([(dense_key(&matrices), 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        for gen in gens {
            let b = matmul(&matrices[a * s..(a + 1) * s], gen, d);
            let key = dense_key(&b);
            if !index.contains_key(&key) {
                let n = matrices.len() / s;
                if n == cap {
                    return Err(Error::ClosureExceedsCap { cap });
                }
                index.insert(key, n);
                queue.push_back(n);
                matrices.extend_from_slice(&b);
            }
        }
    }
    let n = matrices.len() / s;
    let mut cayley = vec![0; n * n];
    for g in 0..n {
        for h in 0..n {
            let p = matmul(&matrices[g * s..(g + 1) * s], &matrices[h * s..(h + 1) * s], d);
            cayley[g * n + h] = *index.get(&dense_key(&p)).ok_or_else(|| {
                Error::InvalidGroup(format!("product of elements {g} and {h} left the closure"))
            })?;
        }
    }
    Ok((matrices, cayley))
}
