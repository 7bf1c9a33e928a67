//! Python bindings. Reports come back as plain dicts; every library error is
//! raised as `ValueError`.

use std::sync::Arc;

use coorbit::lipschitz::upper_bound_relaxed;
use coorbit::projection::random_projection_with_tol;
use coorbit::{
    check_injectivity, estimate_lower_bound, quotient_distance, run_invariant_suite,
    upper_bound_exact, CoorbitConfig, Error, FiniteGroupAction, GroupSpec, ProjectionMap,
    SamplingPlan, Selector,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A finite group acting orthogonally on `R^d`.
#[pyclass(frozen, name = "Group", module = "coorbit")]
struct PyGroup {
    inner: Arc<FiniteGroupAction>,
}

impl PyGroup {
    fn build(spec: GroupSpec) -> PyResult<Self> {
        let inner = FiniteGroupAction::build(&spec).map_err(err)?;
        Ok(Self {
            inner: Arc::new(inner),
        })
    }
}

#[pymethods]
impl PyGroup {
    #[staticmethod]
    fn trivial(d: usize) -> PyResult<Self> {
        Self::build(GroupSpec::Trivial { d })
    }

    #[staticmethod]
    fn cyclic(n: usize) -> PyResult<Self> {
        Self::build(GroupSpec::Cyclic { n })
    }

    #[staticmethod]
    fn dihedral(n: usize) -> PyResult<Self> {
        Self::build(GroupSpec::Dihedral { n })
    }

    #[staticmethod]
    fn sign_flips(d: usize) -> PyResult<Self> {
        Self::build(GroupSpec::SignFlips { d })
    }

    /// Generated by permutations given as 0-based image lists.
    #[staticmethod]
    fn permutations(d: usize, generators: Vec<Vec<usize>>) -> PyResult<Self> {
        Self::build(GroupSpec::Permutations { d, generators })
    }

    /// Generated by orthogonal matrices given as lists of rows.
    #[staticmethod]
    fn from_matrices(generators: Vec<Vec<Vec<f64>>>) -> PyResult<Self> {
        let d = generators.first().map_or(0, Vec::len);
        let flat = generators
            .into_iter()
            .map(|m| {
                if m.len() != d || m.iter().any(|r| r.len() != d) {
                    return Err(PyValueError::new_err("generators must be d x d"));
                }
                Ok(m.concat())
            })
            .collect::<PyResult<Vec<_>>>()?;
        Self::build(GroupSpec::Explicit {
            d,
            generators: flat,
        })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    fn matrix(&self, g: usize) -> PyResult<Vec<Vec<f64>>> {
        if g >= self.inner.order() {
            return Err(PyValueError::new_err(format!("element {g} out of range")));
        }
        Ok(self.inner.matrix(g).chunks(self.inner.dim()).map(<[f64]>::to_vec).collect())
    }

    fn apply(&self, g: usize, x: Vec<f64>) -> PyResult<Vec<f64>> {
        if g >= self.inner.order() {
            return Err(PyValueError::new_err(format!("element {g} out of range")));
        }
        self.inner.apply(g, &x).map_err(err)
    }

    fn compose(&self, g: usize, h: usize) -> PyResult<usize> {
        let n = self.inner.order();
        if g >= n || h >= n {
            return Err(PyValueError::new_err("element out of range"));
        }
        Ok(self.inner.compose(g, h))
    }

    fn inverse(&self, g: usize) -> PyResult<usize> {
        if g >= self.inner.order() {
            return Err(PyValueError::new_err(format!("element {g} out of range")));
        }
        Ok(self.inner.inverse(g))
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(err)
    }

    /// Distinct points of the orbit of `x`.
    fn orbit(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(self.inner.orbit(&x).map_err(err)?.points)
    }

    fn stabilizer(&self, z: Vec<f64>) -> PyResult<Vec<usize>> {
        self.inner.stabilizer(&z).map_err(err)
    }

    fn separation_radius(&self, z: Vec<f64>) -> PyResult<f64> {
        self.inner.separation_radius(&z).map_err(err)
    }

    /// `(distance, aligner)` with `distance = min_g ‖x − U_g y‖`.
    fn distance(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, usize)> {
        let a = quotient_distance(&self.inner, &x, &y).map_err(err)?;
        Ok((a.distance, a.aligner))
    }

    fn __repr__(&self) -> String {
        format!("Group({}, order={}, dim={})", self.inner.label(), self.inner.order(), self.inner.dim())
    }
}

/// Coorbit embedding for a group, windows and selected ranks.
///
/// Pass at most one of `top_k` (the `k` largest values per window), `full`
/// (every rank) or `pairs` (1-based `(rank, window)`); the default keeps the
/// maximum only.
#[pyclass(frozen, name = "CoorbitEmbedding", module = "coorbit")]
struct PyEmbedding {
    inner: CoorbitConfig,
}

#[pymethods]
impl PyEmbedding {
    #[new]
    #[pyo3(signature = (group, windows, *, top_k=None, full=false, pairs=None))]
    fn new(
        group: &PyGroup,
        windows: Vec<Vec<f64>>,
        top_k: Option<usize>,
        full: bool,
        pairs: Option<Vec<(usize, usize)>>,
    ) -> PyResult<Self> {
        let p = windows.len();
        let n = group.inner.order();
        let chosen = top_k.is_some() as u8 + full as u8 + pairs.is_some() as u8;
        if chosen > 1 {
            return Err(PyValueError::new_err("give at most one of top_k, full, pairs"));
        }
        let selector = match (top_k, pairs) {
            (Some(k), _) if k == 0 || k > n => {
                return Err(PyValueError::new_err(format!("top_k must lie in 1..={n}")))
            }
            (Some(k), _) => Selector::top_k(p, k),
            (None, Some(pairs)) => Selector::from_pairs(pairs),
            (None, None) if full => Selector::full(n, p),
            (None, None) => Selector::max_filter(p),
        };
        let inner = CoorbitConfig::new(group.inner.clone(), windows, selector).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn embedding_dim(&self) -> usize {
        self.inner.embedding_dim()
    }

    #[getter]
    fn windows(&self) -> Vec<Vec<f64>> {
        self.inner.windows().to_vec()
    }

    #[getter]
    fn group(&self) -> PyGroup {
        PyGroup {
            inner: self.inner.group_arc().clone(),
        }
    }

    /// 1-based `(rank, window)` pairs in output order.
    #[getter]
    fn pairs(&self) -> Vec<(usize, usize)> {
        self.inner.selector().pairs().to_vec()
    }

    fn embed(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.embed(&x).map_err(err)
    }

    fn embed_batch(&self, py: Python<'_>, xs: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        py.detach(|| self.inner.embed_batch(&xs)).map_err(err)
    }

    /// 0-based window `i` and rank `j`.
    fn level_set(&self, i: usize, j: usize, x: Vec<f64>) -> PyResult<Vec<usize>> {
        self.inner.level_set(i, j, &x).map_err(err)
    }

    fn gap(&self, i: usize, j: usize, x: Vec<f64>) -> PyResult<f64> {
        self.inner.gap(i, j, &x).map_err(err)
    }

    /// `None` when exhaustive enumeration is too large.
    fn upper_bound_exact(&self) -> Option<f64> {
        upper_bound_exact(&self.inner).ok()
    }

    fn upper_bound_relaxed(&self) -> f64 {
        upper_bound_relaxed(&self.inner)
    }

    #[pyo3(signature = (pairs=10_000, seed=0, refine_steps=500, near_fraction=0.25))]
    fn lipschitz<'py>(
        &self,
        py: Python<'py>,
        pairs: usize,
        seed: u64,
        refine_steps: usize,
        near_fraction: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let plan = SamplingPlan {
            pairs,
            seed,
            refine_steps,
            near_fraction,
        };
        let report = py.detach(|| estimate_lower_bound(&self.inner, &plan)).map_err(err)?;
        to_py(py, &report)
    }

    /// Collision search for `Ψ = ℓ ∘ Φ`; `projection=None` checks `Φ` itself.
    #[pyo3(signature = (trials=10_000, seed=0, projection=None, tol=1e-9))]
    fn inject_check<'py>(
        &self,
        py: Python<'py>,
        trials: usize,
        seed: u64,
        projection: Option<&PyProjection>,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let proj = projection.map(|p| &p.inner);
        let report = py
            .detach(|| check_injectivity(&self.inner, proj, trials, seed, tol))
            .map_err(err)?;
        to_py(py, &report)
    }

    #[pyo3(signature = (trials=1000, seed=0))]
    fn selftest<'py>(&self, py: Python<'py>, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let checks = py.detach(|| run_invariant_suite(&self.inner, trials, seed)).map_err(err)?;
        to_py(py, &checks)
    }

    fn __repr__(&self) -> String {
        format!(
            "CoorbitEmbedding({}, windows={}, embedding_dim={})",
            self.inner.group().label(),
            self.inner.num_windows(),
            self.inner.embedding_dim()
        )
    }
}

/// Seeded Gaussian linear map `R^m -> R^q`.
#[pyclass(frozen, name = "Projection", module = "coorbit")]
struct PyProjection {
    inner: ProjectionMap,
}

#[pymethods]
impl PyProjection {
    #[staticmethod]
    #[pyo3(signature = (m, q, seed=0))]
    fn random(m: usize, q: usize, seed: u64) -> PyResult<Self> {
        let inner = random_projection_with_tol(m, q, seed, coorbit::Tolerances::default().svd).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows, self.inner.cols)
    }

    #[getter]
    fn singular_values(&self) -> Vec<f64> {
        self.inner.singular_values.clone()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        self.inner.matrix.chunks(self.inner.cols).map(<[f64]>::to_vec).collect()
    }

    fn apply(&self, v: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply(&v).map_err(err)
    }

    /// `ℓ(Φ(x))`.
    fn project_embed(&self, embedding: &PyEmbedding, x: Vec<f64>) -> PyResult<Vec<f64>> {
        coorbit::project_embed(&embedding.inner, &self.inner, &x).map_err(err)
    }
}

/// `count` seeded random unit vectors in `R^dim`.
#[pyfunction]
#[pyo3(signature = (count, dim, seed=0))]
fn random_unit_windows(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    coorbit::sampling::random_unit_windows(count, dim, seed)
}

#[pymodule]
fn _coorbit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PyEmbedding>()?;
    m.add_class::<PyProjection>()?;
    m.add_function(wrap_pyfunction!(random_unit_windows, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
