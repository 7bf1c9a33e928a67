//! Linear reduction `Ψ = ℓ ∘ Φ` of the coorbit embedding to `q` (default `2d`)
//! dimensions, empirical injectivity checks, and the kernel-alignment lower
//! bound `c_ℓ · σ_min(ℓ)` over an explicit union of subspaces.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::coorbit::CoorbitConfig;
use crate::error::{Error, Result};
use crate::linalg::{
    self, dist, from_row_major, from_rows, matvec, norm, project_out_rows, range_basis,
    row_space_basis, spectral_norm,
};
use crate::quotient::quotient_distance;
use crate::sampling::{gaussian_vector, rng, rng_stream, unit_vector};

const MAX_ATTEMPTS: usize = 16;

/// A full-rank linear map `ℝ^cols → ℝ^rows`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionMap {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows × cols`.
    pub matrix: Vec<f64>,
    /// Nonincreasing, length `min(rows, cols)`.
    pub singular_values: Vec<f64>,
    pub seed: u64,
}

impl ProjectionMap {
    /// Wraps an explicit matrix. Rank is not checked here.
    pub fn from_matrix(rows: usize, cols: usize, matrix: Vec<f64>, seed: u64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DegenerateDimension { dim: 0 });
        }
        if matrix.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: matrix.len(),
            });
        }
        let singular_values = linalg::singular_values(&from_row_major(&matrix, rows, cols));
        Ok(Self {
            rows,
            cols,
            matrix,
            singular_values,
            seed,
        })
    }

    fn as_dmatrix(&self) -> DMatrix<f64> {
        from_row_major(&self.matrix, self.rows, self.cols)
    }

    /// `ℓ(v)`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(matvec(&self.matrix, self.rows, self.cols, v))
    }

    /// `σ₁(ℓ) = ‖ℓ‖`.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values[0]
    }

    /// Smallest of the `min(rows, cols)` singular values.
    pub fn smallest_singular_value(&self) -> f64 {
        *self.singular_values.last().expect("nonempty")
    }

    pub fn is_full_rank(&self, rel_tol: f64) -> bool {
        self.smallest_singular_value() > rel_tol * self.operator_norm()
    }
}

/// Gaussian `q × m` map from a seeded generator, redrawn from a fresh
/// sub-stream (up to 16 times) if it comes out rank deficient.
pub fn random_projection(m: usize, q: usize, seed: u64) -> Result<ProjectionMap> {
    random_projection_with_tol(m, q, seed, crate::Tolerances::default().svd)
}

pub fn random_projection_with_tol(
    m: usize,
    q: usize,
    seed: u64,
    svd_tol: f64,
) -> Result<ProjectionMap> {
    if m == 0 || q == 0 {
        return Err(Error::DegenerateDimension { dim: 0 });
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut r = rng_stream(seed, attempt as u64);
        let matrix = gaussian_vector(&mut r, q * m);
        let proj = ProjectionMap::from_matrix(q, m, matrix, seed)?;
        if proj.is_full_rank(svd_tol) {
            return Ok(proj);
        }
    }
    Err(Error::GenericityFailure {
        attempts: MAX_ATTEMPTS,
    })
}

/// `Ψ_{w,S,ℓ}(x) = ℓ(Φ_{w,S}(x))`.
pub fn project_embed(cfg: &CoorbitConfig, proj: &ProjectionMap, x: &[f64]) -> Result<Vec<f64>> {
    if proj.cols != cfg.embedding_dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.embedding_dim(),
            got: proj.cols,
        });
    }
    proj.apply(&cfg.embed(x)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    /// Two independent unit vectors.
    Independent,
    /// `(x, U_g x)`; must never collide with a non-equivalent point.
    Orbit,
    /// `x` and a short step from it, along a null direction of the local
    /// linear map when one exists.
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Collision {
    pub kind: PairKind,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub embedding_distance: f64,
    pub quotient_distance: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PairCounts {
    pub independent: usize,
    pub orbit: usize,
    pub local: usize,
    /// Local pairs whose step followed an exact null direction.
    pub kernel_probes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub projected: bool,
    pub output_dim: usize,
    pub pairs: PairCounts,
    pub violations: usize,
    /// Orbit pairs whose outputs differ by more than the collision tolerance.
    pub invariance_failures: usize,
    /// Up to ten collisions.
    pub witnesses: Vec<Collision>,
    /// Smallest `‖Ψ(x) − Ψ(y)‖ / d([x],[y])` over non-equivalent pairs.
    pub min_separation_ratio: Option<f64>,
}

const MAX_WITNESSES: usize = 10;

/// Searches for pairs that the (optionally projected) embedding fails to
/// separate. A pair is a violation when `‖Ψ(x) − Ψ(y)‖ ≤ tol·(1 + ‖Φ(x)‖)`
/// while `d([x],[y]) > sep_floor`.
///
/// Trial `t` draws an independent, orbit, or local pair for `t mod 3` equal to
/// 0, 1, or 2 respectively.
pub fn check_injectivity(
    cfg: &CoorbitConfig,
    proj: Option<&ProjectionMap>,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<SeparationReport> {
    let group = cfg.group();
    let dim = cfg.dim();
    let tols = *group.tolerances();
    if let Some(p) = proj {
        if p.cols != cfg.embedding_dim() {
            return Err(Error::DimensionMismatch {
                expected: cfg.embedding_dim(),
                got: p.cols,
            });
        }
    }
    let output = |phi: &[f64]| -> Vec<f64> {
        match proj {
            Some(p) => matvec(&p.matrix, p.rows, p.cols, phi),
            None => phi.to_vec(),
        }
    };

    let mut r = rng(seed);
    let mut report = SeparationReport {
        trials,
        seed,
        tol,
        projected: proj.is_some(),
        output_dim: proj.map_or(cfg.embedding_dim(), |p| p.rows),
        pairs: PairCounts::default(),
        violations: 0,
        invariance_failures: 0,
        witnesses: Vec::new(),
        min_separation_ratio: None,
    };

    for t in 0..trials {
        let x = unit_vector(&mut r, dim);
        let (kind, y) = match t % 3 {
            0 => {
                report.pairs.independent += 1;
                (PairKind::Independent, unit_vector(&mut r, dim))
            }
            1 => {
                report.pairs.orbit += 1;
                let g = r.random_range(0..group.order());
                (PairKind::Orbit, group.apply(g, &x)?)
            }
            _ => {
                report.pairs.local += 1;
                let (dir, is_null) = local_direction(cfg, proj, &x, &mut r, tols.svd)?;
                if is_null {
                    report.pairs.kernel_probes += 1;
                }
                let step = 0.2 * cfg.global_gap(&x)?.min(group.separation_radius(&x)?);
                (PairKind::Local, linalg::add(&x, &linalg::scale(&dir, step)))
            }
        };

        let phi_x = cfg.embed(&x)?;
        let out_x = output(&phi_x);
        let out_y = output(&cfg.embed(&y)?);
        let gap = dist(&out_x, &out_y);
        let threshold = tol * (1.0 + norm(&phi_x));
        let qd = quotient_distance(group, &x, &y)?.distance;

        if kind == PairKind::Orbit && gap > threshold {
            report.invariance_failures += 1;
        }
        if qd > tols.sep_floor {
            let ratio = gap / qd;
            report.min_separation_ratio =
                Some(report.min_separation_ratio.map_or(ratio, |m| m.min(ratio)));
            if gap <= threshold {
                report.violations += 1;
                if report.witnesses.len() < MAX_WITNESSES {
                    report.witnesses.push(Collision {
                        kind,
                        x: x.clone(),
                        y,
                        embedding_distance: gap,
                        quotient_distance: qd,
                    });
                }
            }
        }
    }
    Ok(report)
}

// Unit direction for a local pair, and whether it lies in the null space of
// the local linear map `x ↦ ℓ(A_x x)`.
fn local_direction<R: Rng>(
    cfg: &CoorbitConfig,
    proj: Option<&ProjectionMap>,
    x: &[f64],
    r: &mut R,
    svd_tol: f64,
) -> Result<(Vec<f64>, bool)> {
    let dim = cfg.dim();
    let a = from_rows(&cfg.local_linear_map(x)?, dim);
    let jac = match proj {
        Some(p) => p.as_dmatrix() * a,
        None => a,
    };
    let rows = row_space_basis(&jac, svd_tol);
    let probe = gaussian_vector(r, dim);
    let residual = project_out_rows(&rows, &probe);
    let rn = norm(&residual);
    if rn > 1e-6 * norm(&probe) {
        Ok((residual.iter().map(|v| v / rn).collect(), true))
    } else {
        Ok((unit_vector(r, dim), false))
    }
}

/// A subspace of `ℝ^ambient` given by orthonormal basis vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Subspace {
    pub basis: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// A finite union of subspaces of `ℝ^ambient`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceFamily {
    pub ambient: usize,
    pub members: Vec<Subspace>,
}

impl SubspaceFamily {
    /// Checks that every basis is orthonormal within `orth_tol`.
    pub fn new(ambient: usize, members: Vec<Vec<Vec<f64>>>, orth_tol: f64) -> Result<Self> {
        for (a, basis) in members.iter().enumerate() {
            for (i, u) in basis.iter().enumerate() {
                if u.len() != ambient {
                    return Err(Error::DimensionMismatch {
                        expected: ambient,
                        got: u.len(),
                    });
                }
                for (j, v) in basis.iter().enumerate().skip(i) {
                    let target = if i == j { 1.0 } else { 0.0 };
                    if (linalg::dot(u, v) - target).abs() > orth_tol {
                        return Err(Error::InvalidSubspace(format!(
                            "member {a} basis is not orthonormal (vectors {i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            ambient,
            members: members.into_iter().map(|basis| Subspace { basis }).collect(),
        })
    }

    /// Orthonormal basis of the column space of each matrix (given as rows).
    pub fn from_spanning_rows(ambient: usize, spans: &[Vec<Vec<f64>>], svd_tol: f64) -> Result<Self> {
        let mut members = Vec::with_capacity(spans.len());
        for span in spans {
            if span.is_empty() {
                members.push(Subspace { basis: Vec::new() });
                continue;
            }
            let cols = span[0].len();
            if span.iter().any(|r| r.len() != cols) || span.len() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    got: span.len(),
                });
            }
            members.push(basis_of(&from_rows(span, cols), svd_tol));
        }
        Ok(Self { ambient, members })
    }
}

fn basis_of(m: &DMatrix<f64>, svd_tol: f64) -> Subspace {
    let b = range_basis(m, svd_tol);
    Subspace {
        basis: (0..b.ncols())
            .map(|c| b.column(c).iter().copied().collect())
            .collect(),
    }
}

/// `c_{a,ℓ} = (1 − ‖Q_a Q_ℓ‖²)^{1/2}` for every member `F_a`, where `Q_a`
/// projects onto `F_a` and `Q_ℓ` onto `ker ℓ`.
pub fn kernel_alignment(proj: &ProjectionMap, fam: &SubspaceFamily, svd_tol: f64) -> Result<Vec<f64>> {
    if fam.ambient != proj.cols {
        return Err(Error::DimensionMismatch {
            expected: proj.cols,
            got: fam.ambient,
        });
    }
    let m = proj.cols;
    let row_space = row_space_basis(&proj.as_dmatrix(), svd_tol);
    let kernel_proj = DMatrix::identity(m, m) - row_space.transpose() * &row_space;
    Ok(fam
        .members
        .iter()
        .map(|member| {
            if member.basis.is_empty() {
                return 1.0;
            }
            let b = DMatrix::from_fn(m, member.dim(), |r, c| member.basis[c][r]);
            let qa = &b * b.transpose();
            let s = spectral_norm(&(qa * &kernel_proj));
            (1.0 - s * s).max(0.0).sqrt()
        })
        .collect())
}

/// `c_ℓ · σ_min(ℓ)`, a lower bound for `‖ℓ(v)‖` over unit `v` in the union.
pub fn subspace_lower_bound(proj: &ProjectionMap, fam: &SubspaceFamily) -> Result<f64> {
    subspace_lower_bound_with_tol(proj, fam, crate::Tolerances::default().svd)
}

pub fn subspace_lower_bound_with_tol(
    proj: &ProjectionMap,
    fam: &SubspaceFamily,
    svd_tol: f64,
) -> Result<f64> {
    let coeffs = kernel_alignment(proj, fam, svd_tol)?;
    let mut c = 1.0f64;
    for (member, &ca) in coeffs.iter().enumerate() {
        if ca <= svd_tol {
            return Err(Error::KernelIntersectsFamily {
                member,
                coefficient: ca,
            });
        }
        c = c.min(ca);
    }
    Ok(c * proj.smallest_singular_value())
}

/// Group elements chosen for each embedding coordinate on the `x` side and
/// on the `y` side: the per-window rank-to-element maps, flattened in
/// embedding order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DifferenceAssignment {
    pub x_elements: Vec<usize>,
    pub y_elements: Vec<usize>,
}

/// The assignment realized by a concrete pair: `Φ(x) − Φ(y) = L(x, y)`.
pub fn harvest_assignment(cfg: &CoorbitConfig, x: &[f64], y: &[f64]) -> Result<DifferenceAssignment> {
    Ok(DifferenceAssignment {
        x_elements: cfg.realized_elements(x)?,
        y_elements: cfg.realized_elements(y)?,
    })
}

/// `m × 2d` matrix of `(x, y) ↦ L(x, y)` for one assignment.
pub fn difference_map(cfg: &CoorbitConfig, assignment: &DifferenceAssignment) -> Result<Vec<Vec<f64>>> {
    let m = cfg.embedding_dim();
    let n = cfg.group().order();
    for side in [&assignment.x_elements, &assignment.y_elements] {
        if side.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: side.len(),
            });
        }
        if let Some(&g) = side.iter().find(|&&g| g >= n) {
            return Err(Error::InvalidGroup(format!("element {g} out of range (N = {n})")));
        }
    }
    Ok(cfg
        .coordinates()
        .enumerate()
        .map(|(k, (i, _))| {
            let mut row = cfg.window_image(i, assignment.x_elements[k]).to_vec();
            row.extend(cfg.window_image(i, assignment.y_elements[k]).iter().map(|v| -v));
            row
        })
        .collect())
}

/// Ranges of the difference maps, one subspace of `ℝ^m` per assignment.
pub fn build_difference_ranges(
    cfg: &CoorbitConfig,
    assignments: &[DifferenceAssignment],
) -> Result<SubspaceFamily> {
    let svd_tol = cfg.group().tolerances().svd;
    let spans = assignments
        .iter()
        .map(|a| difference_map(cfg, a))
        .collect::<Result<Vec<_>>>()?;
    SubspaceFamily::from_spanning_rows(cfg.embedding_dim(), &spans, svd_tol)
}
