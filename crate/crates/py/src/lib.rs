//! Python bindings for `fmetric`.
//!
//! Reports and covers come back as plain dicts (the same JSON the CLI prints).
//! Point arguments are ids, not indices.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde_json::Value;

use fmetric::cantor::CANTOR_TOL;
use fmetric::ffunc::{log_grid, WORKING_RANGE};
use fmetric::{
    ball, brute_force_min_chain, cantor_check, check_d3, check_f1, check_fip, check_metric_axioms,
    check_tb_equivalence, diameters, equivalence_report, greedy_net, load_instance,
    load_instance_path, metrize_with_witnesses, min_chain_sum, shrink_generator, validate_family,
    AlphaMode, Builtin, ControlPair, DistMatrix, FFunction, FMetricInstance, GeneratorConfig,
    Geometry, InducedMetric, MetricKind, VerdictReport, WeightDistribution,
};

fn err(e: fmetric::Error) -> PyErr {
    if e.is_numeric() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn report_to_py<'py>(py: Python<'py>, r: &VerdictReport) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?
        .call_method1("loads", (r.to_json_pretty(),))
}

fn metric_kind(s: &str) -> PyResult<MetricKind> {
    s.parse().map_err(PyValueError::new_err)
}

/// A built-in name, or any Python callable `t -> float`.
fn resolve_f(f: &Bound<'_, PyAny>) -> PyResult<FFunction> {
    if let Ok(name) = f.cast::<PyString>() {
        return Builtin::from_name(name.to_str()?)
            .map(Into::into)
            .map_err(err);
    }
    if !f.is_callable() {
        return Err(PyValueError::new_err(
            "f must be a built-in name or a callable",
        ));
    }
    let name = f
        .getattr("__name__")
        .and_then(|n| n.extract::<String>())
        .unwrap_or_else(|_| "python".into());
    let callable: Arc<Py<PyAny>> = Arc::new(f.clone().unbind());
    // a raising callable surfaces as a non-finite value
    Ok(FFunction::custom(name, BTreeMap::new(), move |t| {
        Python::attach(|py| {
            callable
                .call1(py, (t,))
                .and_then(|v| v.extract::<f64>(py))
                .unwrap_or(f64::NAN)
        })
    }))
}

/// A finite F-metric space with its induced metric.
#[pyclass(name = "Instance", module = "fmetric_py", frozen)]
struct PyInstance {
    geo: Geometry,
}

impl PyInstance {
    fn wrap(inst: FMetricInstance) -> Self {
        PyInstance {
            geo: Geometry::new(inst),
        }
    }

    fn inst(&self) -> &FMetricInstance {
        self.geo.instance()
    }

    fn index(&self, id: &str) -> PyResult<usize> {
        self.inst().index_of(id).map_err(err)
    }

    fn set(&self, ids: Option<Vec<String>>) -> PyResult<Vec<usize>> {
        match ids {
            Some(ids) => self.inst().indices_of(&ids).map_err(err),
            None => Ok(self.geo.all_points()),
        }
    }

    fn family(&self, family: Vec<Vec<String>>) -> PyResult<Vec<Vec<usize>>> {
        family
            .iter()
            .map(|s| self.inst().indices_of(s).map_err(err))
            .collect()
    }
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (points, rows, f = None, alpha = 0.0))]
    fn new(
        points: Vec<String>,
        rows: Vec<Vec<f64>>,
        f: Option<&Bound<'_, PyAny>>,
        alpha: f64,
    ) -> PyResult<Self> {
        let f = match f {
            Some(f) => resolve_f(f)?,
            None => Builtin::Ln.into(),
        };
        let control = ControlPair::new(f, alpha).map_err(err)?;
        let matrix = DistMatrix::from_rows(&rows).map_err(err)?;
        FMetricInstance::new(points, matrix, control)
            .map(Self::wrap)
            .map_err(err)
    }

    /// Parse an instance document (`points`, `D`, `f`, `alpha`).
    #[staticmethod]
    fn from_json(document: &str) -> PyResult<Self> {
        load_instance(document).map(Self::wrap).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        load_instance_path(path).map(Self::wrap).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inst().to_json()
    }

    #[getter]
    fn points(&self) -> Vec<String> {
        self.inst().points().to_vec()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inst().control().alpha()
    }

    #[getter]
    fn f_name(&self) -> String {
        self.inst().control().f().name().to_owned()
    }

    fn __len__(&self) -> usize {
        self.inst().size()
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(n={}, f={}, alpha={})",
            self.inst().size(),
            self.f_name(),
            self.alpha()
        )
    }

    /// The same matrix under a different control pair.
    #[pyo3(signature = (f, alpha))]
    fn with_control(&self, f: &Bound<'_, PyAny>, alpha: f64) -> PyResult<Self> {
        let control = ControlPair::new(resolve_f(f)?, alpha).map_err(err)?;
        Ok(Self::wrap(self.inst().with_control(control)))
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        self.inst().matrix().to_rows()
    }

    fn dist(&self, x: &str, y: &str) -> PyResult<f64> {
        Ok(self.inst().dist(self.index(x)?, self.index(y)?))
    }

    fn diameter(&self) -> f64 {
        self.inst().diameter()
    }

    /// Minimal chain from `x` to `y` as `(ids, total)`.
    fn min_chain_sum(&self, x: &str, y: &str) -> PyResult<(Vec<String>, f64)> {
        let c = min_chain_sum(self.inst(), self.index(x)?, self.index(y)?).map_err(err)?;
        Ok((c.ids(self.inst()), c.total))
    }

    fn brute_force_min_chain(&self, x: &str, y: &str) -> PyResult<(Vec<String>, f64)> {
        let c = brute_force_min_chain(self.inst(), self.index(x)?, self.index(y)?).map_err(err)?;
        Ok((c.ids(self.inst()), c.total))
    }

    /// F1 on the working range plus the chain inequality.
    fn verify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let mut report = VerdictReport::new("verify", "D is an F-metric controlled by (f, alpha)");
        let grid = log_grid(WORKING_RANGE.0, WORKING_RANGE.1, 1000);
        report.push_section(check_f1(self.inst().control().f(), &grid).map_err(err)?);
        report.push_section(check_d3(self.inst()).map_err(err)?);
        report_to_py(py, &report)
    }

    fn check_d3<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report_to_py(py, &check_d3(self.inst()).map_err(err)?)
    }

    /// The induced metric as `{"points", "d"}`, plus `"witnesses"` on request.
    #[pyo3(signature = (witness = false))]
    fn metrize<'py>(&self, py: Python<'py>, witness: bool) -> PyResult<Bound<'py, PyAny>> {
        let file = if witness {
            metrize_with_witnesses(self.inst()).to_file()
        } else {
            self.geo.metric().to_file()
        };
        to_py(py, &serde_json::to_value(file).expect("serializable"))
    }

    fn induced_matrix(&self) -> Vec<Vec<f64>> {
        self.geo.metric().matrix().to_rows()
    }

    /// Open ball members, as ids.
    #[pyo3(signature = (center, radius, metric = "D"))]
    fn ball(&self, center: &str, radius: f64, metric: &str) -> PyResult<Vec<String>> {
        let b = ball(&self.geo, self.index(center)?, radius, metric_kind(metric)?).map_err(err)?;
        Ok(b.members
            .iter()
            .map(|&i| self.inst().id(i).to_owned())
            .collect())
    }

    /// `(diam_D, diam_d)` of a set of ids.
    fn diameters(&self, set: Vec<String>) -> PyResult<(f64, f64)> {
        let dp = diameters(&self.geo, &self.set(Some(set))?).map_err(err)?;
        Ok((dp.diam_original, dp.diam_induced))
    }

    #[pyo3(signature = (eps, metric = "D", set = None))]
    fn greedy_net<'py>(
        &self,
        py: Python<'py>,
        eps: f64,
        metric: &str,
        set: Option<Vec<String>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cover =
            greedy_net(&self.geo, &self.set(set)?, eps, metric_kind(metric)?).map_err(err)?;
        to_py(py, &cover.to_json(self.inst()))
    }

    #[pyo3(signature = (eps, set = None))]
    fn check_tb<'py>(
        &self,
        py: Python<'py>,
        eps: f64,
        set: Option<Vec<String>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let r = check_tb_equivalence(&self.geo, &self.set(set)?, eps).map_err(err)?;
        report_to_py(py, &r)
    }

    fn check_fip<'py>(
        &self,
        py: Python<'py>,
        family: Vec<Vec<String>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let fam = self.family(family)?;
        report_to_py(py, &check_fip(self.inst(), &fam).map_err(err)?)
    }

    /// Cantor check on a given nested family, or on a generated one when
    /// `family` is omitted. Returns `(report, traces_csv)`.
    #[pyo3(signature = (family = None, seed = 0, steps = None, tol = CANTOR_TOL))]
    fn cantor<'py>(
        &self,
        py: Python<'py>,
        family: Option<Vec<Vec<String>>>,
        seed: u64,
        steps: Option<usize>,
        tol: f64,
    ) -> PyResult<(Bound<'py, PyAny>, String)> {
        let nf = match family {
            Some(f) => validate_family(&self.geo, &self.family(f)?),
            None => shrink_generator(&self.geo, seed, steps.unwrap_or(self.inst().size())),
        }
        .map_err(err)?;
        let r = cantor_check(&self.geo, &nf, tol).map_err(err)?;
        Ok((report_to_py(py, &r)?, nf.traces_csv()))
    }

    /// The full equivalence report.
    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        report_to_py(py, &equivalence_report(self.inst()).map_err(err)?)
    }
}

/// Evaluate a built-in F-function.
#[pyfunction]
fn eval_f(f: &str, t: f64) -> PyResult<f64> {
    let f: FFunction = Builtin::from_name(f).map_err(err)?.into();
    f.eval(t).map_err(err)
}

/// Largest delta (capped at the working range) with `f(t) < y` on `(0, delta)`.
#[pyfunction]
fn delta_for(f: &Bound<'_, PyAny>, y: f64) -> PyResult<f64> {
    fmetric::delta_for(&resolve_f(f)?, y).map_err(err)
}

/// Seeded random instance. `alpha=None` calibrates the smallest valid alpha.
#[pyfunction]
#[pyo3(signature = (n, f = "ln", seed = 0, alpha = None, dist = "uniform:0.1,10"))]
fn generate(n: usize, f: &str, seed: u64, alpha: Option<f64>, dist: &str) -> PyResult<PyInstance> {
    let config = GeneratorConfig {
        n_points: n,
        weights: WeightDistribution::parse(dist).map_err(err)?,
        f: Builtin::from_name(f).map_err(err)?,
        alpha: alpha.map_or(AlphaMode::Calibrated, AlphaMode::Fixed),
        seed,
    };
    fmetric::generate(&config)
        .map(PyInstance::wrap)
        .map_err(err)
}

/// Metric axioms on an arbitrary matrix, e.g. one computed elsewhere.
#[pyfunction]
fn check_metric<'py>(
    py: Python<'py>,
    points: Vec<String>,
    rows: Vec<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let d = DistMatrix::from_rows(&rows).map_err(err)?;
    let m = InducedMetric::from_matrix(points, d).map_err(err)?;
    report_to_py(py, &check_metric_axioms(&m))
}

#[pymodule]
pub fn fmetric_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(eval_f, m)?)?;
    m.add_function(wrap_pyfunction!(delta_for, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(check_metric, m)?)?;
    m.add(
        "BUILTINS",
        Builtin::ALL.iter().map(|b| b.name()).collect::<Vec<_>>(),
    )?;
    Ok(())
}
