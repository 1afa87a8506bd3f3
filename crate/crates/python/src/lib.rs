//! Python bindings for `anker_rank`.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use anker_rank::baselines::{err_fit, order_by_score, ranksvm_fit, RankSvmConfig};
use anker_rank::data::{
    choose_normalization_scope, ks_two_sample as ks_test, load_dataset as load, minmax_fit_apply,
    zscore_fit_apply, FeatureSchema, FeatureVector, RankedDataset, RankedQuery, Ranking,
};
use anker_rank::eval::{parse_methods, ranking_loss as loss, run_experiment, ExperimentConfig};
use anker_rank::kernel::{self, KernelSpec, KernelVariant};
use anker_rank::ranker::{btl, AnkerConfig, AnkerModel, PreferenceMatrix};
use anker_rank::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        Error::NonFinite(_) | Error::Json(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn spec(variant: &str) -> PyResult<KernelSpec> {
    variant.parse::<KernelVariant>().map(KernelSpec::new).map_err(to_py)
}

fn vectors(rows: Vec<Vec<f64>>) -> Vec<FeatureVector> {
    rows.into_iter().map(FeatureVector).collect()
}

fn matrix(rows: &[Vec<f64>]) -> PyResult<nalgebra::DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[pyfunction]
fn scalar_kernel(u: f64, v: f64) -> PyResult<f64> {
    kernel::scalar_kernel(u, v).map_err(to_py)
}

#[pyfunction]
fn proportion_degree(a: f64, b: f64, c: f64, d: f64) -> PyResult<f64> {
    kernel::proportion_degree(a, b, c, d).map_err(to_py)
}

/// Kernel between the item pairs `p = (a, b)` and `q = (c, d)`.
#[pyfunction]
#[pyo3(signature = (p, q, variant = "poly2"))]
fn pair_kernel(p: (Vec<f64>, Vec<f64>), q: (Vec<f64>, Vec<f64>), variant: &str) -> PyResult<f64> {
    let (a, b) = (FeatureVector(p.0), FeatureVector(p.1));
    let (c, d) = (FeatureVector(q.0), FeatureVector(q.1));
    kernel::pair_kernel((&a, &b), (&c, &d), spec(variant)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (pairs, variant = "poly2"))]
fn gram_matrix(pairs: Vec<(Vec<f64>, Vec<f64>)>, variant: &str) -> PyResult<Vec<Vec<f64>>> {
    let pairs: Vec<(FeatureVector, FeatureVector)> =
        pairs.into_iter().map(|(a, b)| (FeatureVector(a), FeatureVector(b))).collect();
    let gram = kernel::gram_matrix(&pairs, spec(variant)?).map_err(to_py)?;
    Ok((0..gram.len()).map(|i| (0..gram.len()).map(|j| gram.get(i, j)).collect()).collect())
}

#[pyfunction]
fn min_eigenvalue(m: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(kernel::min_eigenvalue(&matrix(&m)?))
}

#[pyfunction]
#[pyo3(signature = (m, tol = 1e-8))]
fn is_psd(m: Vec<Vec<f64>>, tol: f64) -> PyResult<bool> {
    kernel::is_psd(&matrix(&m)?, tol).map_err(to_py)
}

/// Returns `(statistic, p_value, rejected)`.
#[pyfunction]
#[pyo3(signature = (a, b, alpha = 0.05))]
fn ks_two_sample(a: Vec<f64>, b: Vec<f64>, alpha: f64) -> PyResult<(f64, f64, bool)> {
    let d = ks_test(&a, &b, alpha).map_err(to_py)?;
    Ok((d.statistic, d.p_value, d.rejected))
}

/// Normalises rows with statistics fitted on the rows themselves.
#[pyfunction]
#[pyo3(signature = (rows, mode = "minmax"))]
fn normalize(rows: Vec<Vec<f64>>, mode: &str) -> PyResult<Vec<Vec<f64>>> {
    let rows = vectors(rows);
    let (out, _) = match mode {
        "minmax" => minmax_fit_apply(&rows, None),
        "zscore" => zscore_fit_apply(&rows, None),
        other => return Err(PyValueError::new_err(format!("unknown mode '{other}'"))),
    }
    .map_err(to_py)?;
    Ok(out.into_iter().map(FeatureVector::into_inner).collect())
}

/// Fraction of discordant pairs between two position vectors.
#[pyfunction]
fn ranking_loss(pi: Vec<usize>, pi_star: Vec<usize>) -> PyResult<f64> {
    loss(&pi, &pi_star).map_err(to_py)
}

/// Returns `(theta, iterations, converged)`.
#[pyfunction]
#[pyo3(signature = (p, tol = btl::DEFAULT_TOL, max_iter = btl::DEFAULT_MAX_ITER))]
fn btl_fit(p: Vec<Vec<f64>>, tol: f64, max_iter: usize) -> PyResult<(Vec<f64>, usize, bool)> {
    let p = PreferenceMatrix::new(p).map_err(to_py)?;
    let fit = btl::btl_fit(&p, tol, max_iter).map_err(to_py)?;
    Ok((fit.params.theta, fit.iterations, fit.converged))
}

#[pyfunction]
fn rank_from_theta(theta: Vec<f64>) -> Vec<usize> {
    btl::rank_from_theta(&theta)
}

/// Ranked training data.
#[pyclass(name = "Dataset", module = "pyanker")]
struct PyDataset {
    inner: RankedDataset,
}

#[pymethods]
impl PyDataset {
    /// `queries` is a list of `(id, items, ordering)` with `ordering`
    /// listing item indices best first.
    #[new]
    fn new(feature_names: Vec<String>, queries: Vec<(String, Vec<Vec<f64>>, Vec<usize>)>) -> PyResult<Self> {
        let queries = queries
            .into_iter()
            .map(|(id, items, ordering)| {
                let ranking = Ranking::from_ordering(&ordering)?;
                RankedQuery::new(id, vectors(items), ranking)
            })
            .collect::<anker_rank::Result<Vec<_>>>()
            .map_err(to_py)?;
        let inner = RankedDataset {
            schema: FeatureSchema::numeric(feature_names),
            queries,
        };
        if let Some(q) = inner.queries.iter().find(|q| q.items.iter().any(|x| x.dim() != inner.dim())) {
            return Err(PyValueError::new_err(format!("query '{}' has items of the wrong dimension", q.id)));
        }
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        load(path).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.schema.names.clone()
    }

    #[getter]
    fn num_queries(&self) -> usize {
        self.inner.queries.len()
    }

    /// `(id, items, ordering)` per query.
    fn queries(&self) -> Vec<(String, Vec<Vec<f64>>, Vec<usize>)> {
        self.inner
            .queries
            .iter()
            .map(|q| (q.id.clone(), q.items.iter().map(|x| x.0.clone()).collect(), q.ranking.ordering()))
            .collect()
    }

    /// `"train+test"` or `"test-only"`.
    #[pyo3(signature = (test, alpha = 0.05))]
    fn normalization_scope(&self, test: &PyDataset, alpha: f64) -> PyResult<String> {
        choose_normalization_scope(&self.inner, &test.inner, alpha)
            .map(|s| s.to_string())
            .map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.queries.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(features={}, queries={}, items={})",
            self.inner.dim(),
            self.inner.queries.len(),
            self.inner.num_items()
        )
    }
}

/// Analogy-kernel SVM with Platt calibration and BTL aggregation.
#[pyclass(name = "AnkerRanker", module = "pyanker")]
struct PyAnkerRanker {
    config: AnkerConfig,
    seed: u64,
    model: Option<AnkerModel>,
}

impl PyAnkerRanker {
    fn model(&self) -> PyResult<&AnkerModel> {
        self.model
            .as_ref()
            .ok_or_else(|| PyRuntimeError::new_err("ranker is not fitted"))
    }
}

#[pymethods]
impl PyAnkerRanker {
    #[new]
    #[pyo3(signature = (kernel = "poly2", c = None, pair_cap = None, normalize = None, seed = 42))]
    fn new(kernel: &str, c: Option<f64>, pair_cap: Option<usize>, normalize: Option<&str>, seed: u64) -> PyResult<Self> {
        let scope = normalize.map(|s| s.parse()).transpose().map_err(to_py)?;
        Ok(Self {
            config: AnkerConfig {
                kernel: spec(kernel)?,
                c,
                pair_cap,
                scope,
                ..AnkerConfig::default()
            },
            seed,
            model: None,
        })
    }

    /// Fits on `train`; `items` are the objects to be ranked later and
    /// determine the test-side normalisation.
    fn fit(&mut self, py: Python<'_>, train: &PyDataset, items: Vec<Vec<f64>>) -> PyResult<()> {
        let items = vectors(items);
        let model = py
            .detach(|| AnkerModel::fit(&train.inner, &items, &self.config, self.seed))
            .map_err(to_py)?;
        self.model = Some(model);
        Ok(())
    }

    /// Returns `(ordering, theta)` with `ordering` best first.
    fn rank(&self, items: Vec<Vec<f64>>) -> PyResult<(Vec<usize>, Vec<f64>)> {
        let pred = self.model()?.rank(&vectors(items)).map_err(to_py)?;
        Ok((pred.ordering, pred.theta))
    }

    fn preference_matrix(&self, items: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let p = self.model()?.preference_matrix(&vectors(items)).map_err(to_py)?;
        Ok(p.rows())
    }

    #[getter]
    fn c(&self) -> PyResult<f64> {
        Ok(self.model()?.svm.c)
    }

    #[getter]
    fn num_support(&self) -> PyResult<usize> {
        Ok(self.model()?.svm.num_support())
    }

    fn to_json(&self) -> PyResult<String> {
        self.model()?.to_json().map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let model = AnkerModel::from_json(text).map_err(to_py)?;
        Ok(Self {
            config: AnkerConfig {
                kernel: model.kernel,
                ..AnkerConfig::default()
            },
            seed: 0,
            model: Some(model),
        })
    }
}

/// Ordering of `items` under the expected-rank regression baseline.
#[pyfunction]
fn err_rank(train: &PyDataset, items: Vec<Vec<f64>>) -> PyResult<Vec<usize>> {
    let model = err_fit(&train.inner).map_err(to_py)?;
    Ok(order_by_score(&model.scores(&vectors(items)), false))
}

/// Ordering of `items` under a linear RankSVM.
#[pyfunction]
#[pyo3(signature = (train, items, c = None, seed = 42))]
fn ranksvm_rank(py: Python<'_>, train: &PyDataset, items: Vec<Vec<f64>>, c: Option<f64>, seed: u64) -> PyResult<Vec<usize>> {
    let config = RankSvmConfig {
        c,
        ..RankSvmConfig::default()
    };
    let model = py.detach(|| ranksvm_fit(&train.inner, &config, seed)).map_err(to_py)?;
    Ok(order_by_score(&model.scores(&vectors(items)), true))
}

/// Runs the repeated train/test protocol; one dict per method.
#[pyfunction]
#[pyo3(signature = (train, test, methods = "anker,err,ranksvm,able2rank", repeats = 20, seed = 42))]
fn benchmark<'py>(
    py: Python<'py>,
    train: &PyDataset,
    test: &PyDataset,
    methods: &str,
    repeats: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let methods = parse_methods(methods).map_err(to_py)?;
    let results = py
        .detach(|| {
            run_experiment(
                "python",
                &train.inner,
                &test.inner,
                &methods,
                repeats,
                seed,
                &ExperimentConfig::default(),
            )
        })
        .map_err(to_py)?;
    results
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("method", r.method.name())?;
            d.set_item("mean", r.mean)?;
            d.set_item("std", r.std)?;
            d.set_item("rank", r.rank)?;
            d.set_item("losses", r.losses)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn pyanker(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(scalar_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(proportion_degree, m)?)?;
    m.add_function(wrap_pyfunction!(pair_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(gram_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(min_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(is_psd, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(ranking_loss, m)?)?;
    m.add_function(wrap_pyfunction!(btl_fit, m)?)?;
    m.add_function(wrap_pyfunction!(rank_from_theta, m)?)?;
    m.add_function(wrap_pyfunction!(err_rank, m)?)?;
    m.add_function(wrap_pyfunction!(ranksvm_rank, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark, m)?)?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyAnkerRanker>()?;
    Ok(())
}
