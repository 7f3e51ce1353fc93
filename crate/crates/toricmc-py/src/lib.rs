//! Python bindings. Integer matrices cross as lists of Python ints, weights
//! as `fractions.Fraction` (plain ints work too), floating data as floats.
//! Library errors surface as `ValueError`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use toricmc::amodel::AModel;
use toricmc::cycles::cycle_census;
use toricmc::design::{design_of, indicator_poly, monomial_basis, TermOrder};
use toricmc::graph::{is_realizable, Realizability, TransitionGraph};
use toricmc::lattice::{hilbert_basis_of_span, DEFAULT_MAX_CANDIDATES};
use toricmc::matrix::IntMatrix;
use toricmc::reversible::{default_cuts, Combiner, KolmogorovVerdict, ReversibleParam};
use toricmc::tmc::{Homogeneity, TmcParam};

fn err(e: toricmc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A log-linear model: a nonnegative integer matrix with all-ones first row
/// and a positive rational weight per outcome.
#[pyclass(name = "Model")]
#[derive(Clone)]
struct PyModel {
    inner: AModel,
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (rows, mu=None, row_labels=None, col_labels=None))]
    fn new(
        rows: Vec<Vec<BigInt>>,
        mu: Option<Vec<BigRational>>,
        row_labels: Option<Vec<String>>,
        col_labels: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let matrix = IntMatrix::from_rows(&rows).map_err(err)?;
        let mu = mu.unwrap_or_else(|| {
            vec![BigRational::from_integer(1.into()); matrix.cols()]
        });
        let inner = AModel::with_labels(matrix, mu, row_labels, col_labels).map_err(err)?;
        Ok(PyModel { inner })
    }

    fn rows(&self) -> Vec<Vec<BigInt>> {
        let m = self.inner.matrix();
        (0..m.rows()).map(|i| m.row_vec(i)).collect()
    }

    fn mu(&self) -> Vec<BigRational> {
        self.inner.mu().to_vec()
    }

    fn row_labels(&self) -> Option<Vec<String>> {
        self.inner.row_labels().map(|l| l.to_vec())
    }

    fn col_labels(&self) -> Option<Vec<String>> {
        self.inner.col_labels().map(|l| l.to_vec())
    }

    /// Normalized density at parameter point t (length = number of rows).
    fn density(&self, t: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.density(&t).map_err(err)?.values)
    }

    /// Basis of the integer kernel of the transposed matrix: the exponent
    /// vectors of the model's binomial invariants.
    fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        self.inner.kernel_basis().vectors().to_vec()
    }

    /// Binomial invariants as (plus, minus) exponent pairs.
    fn invariants(&self) -> Vec<(Vec<BigInt>, Vec<BigInt>)> {
        self.inner
            .invariants()
            .into_iter()
            .map(|b| (b.plus, b.minus))
            .collect()
    }

    /// Graver-basis invariants: one per conformally minimal kernel element.
    #[pyo3(signature = (max_candidates=None))]
    fn graver_invariants(
        &self,
        max_candidates: Option<usize>,
    ) -> PyResult<Vec<(Vec<BigInt>, Vec<BigInt>)>> {
        let max = max_candidates.unwrap_or(DEFAULT_MAX_CANDIDATES);
        Ok(self
            .inner
            .graver_invariants(max)
            .map_err(err)?
            .into_iter()
            .map(|g| {
                let b = toricmc::amodel::Binomial::from_kernel_vector(&g.vector);
                (b.plus, b.minus)
            })
            .collect())
    }

    /// Hilbert basis of the nonnegative lattice points in the row span, with
    /// the all-ones vector stripped.
    #[pyo3(signature = (max_candidates=None))]
    fn hilbert_basis(&self, max_candidates: Option<usize>) -> PyResult<Vec<Vec<BigInt>>> {
        let max = max_candidates.unwrap_or(DEFAULT_MAX_CANDIDATES);
        Ok(hilbert_basis_of_span(self.inner.matrix(), max)
            .map_err(err)?
            .vectors()
            .to_vec())
    }

    /// Model whose rows are the all-ones vector followed by the Hilbert
    /// basis; its nonnegative parameter range is the closure of this model's.
    #[pyo3(signature = (max_candidates=None))]
    fn closure(&self, max_candidates: Option<usize>) -> PyResult<PyModel> {
        let max = max_candidates.unwrap_or(DEFAULT_MAX_CANDIDATES);
        Ok(PyModel { inner: self.inner.closure(max).map_err(err)? })
    }

    /// Face obtained by sending the parameters of the given rows to zero:
    /// returns (support column indices, restricted model).
    fn face(&self, zero_rows: Vec<usize>) -> PyResult<(Vec<usize>, PyModel)> {
        let (support, model) = self.inner.face(&zero_rows).map_err(err)?;
        Ok((support, PyModel { inner: model }))
    }

    /// True when parameter points s and t induce the same density.
    #[pyo3(signature = (s, t, tol=1e-9))]
    fn confounded(&self, s: Vec<f64>, t: Vec<f64>, tol: f64) -> PyResult<bool> {
        self.inner.confounded(&s, &t, tol).map_err(err)
    }

    /// True when the two models have the same rational row span and weights.
    fn equivalent(&self, other: &PyModel) -> PyResult<bool> {
        self.inner.equivalent(&other.inner).map_err(err)
    }

    /// Monomial basis of functions on the design of support points, in
    /// degree-reverse-lexicographic order.
    fn monomial_basis(&self) -> PyResult<Vec<Vec<u32>>> {
        let design = design_of(&self.inner).map_err(err)?;
        let order = TermOrder::degrevlex(design.dim());
        monomial_basis(&design, &order).map_err(err)
    }

    /// Indicator polynomial of one design point as a list of
    /// (exponent vector, coefficient) terms.
    fn indicator(&self, point: Vec<BigInt>) -> PyResult<Vec<(Vec<u32>, BigRational)>> {
        let design = design_of(&self.inner).map_err(err)?;
        let f = indicator_poly(&design, &point).map_err(err)?;
        Ok(f.terms().iter().map(|(m, c)| (m.clone(), c.clone())).collect())
    }

    /// Moment E[X^alpha] at parameter point t, computed by differentiating
    /// the normalizing constant.
    fn moment(&self, t: Vec<f64>, alpha: Vec<u32>) -> PyResult<f64> {
        toricmc::design::moment(&self.inner, &t, &alpha).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model({} rows x {} outcomes)",
            self.inner.matrix().rows(),
            self.inner.matrix().cols()
        )
    }
}

/// A finite directed graph with optional loops; the support structure of a
/// transition matrix.
#[pyclass(name = "Graph")]
#[derive(Clone)]
struct PyGraph {
    inner: TransitionGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (vertices, arcs, loops=None))]
    fn new(
        vertices: Vec<String>,
        arcs: Vec<(usize, usize)>,
        loops: Option<Vec<usize>>,
    ) -> PyResult<Self> {
        let inner =
            TransitionGraph::new(vertices, arcs, loops.unwrap_or_default()).map_err(err)?;
        Ok(PyGraph { inner })
    }

    /// Complete graph on k vertices labeled "0".."k-1", all arcs both ways.
    #[staticmethod]
    #[pyo3(signature = (k, loops=true))]
    fn complete(k: usize, loops: bool) -> PyGraph {
        let inner = if loops {
            TransitionGraph::complete_with_loops(k)
        } else {
            TransitionGraph::complete_without_loops(k)
        };
        PyGraph { inner }
    }

    fn vertices(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn arcs(&self) -> Vec<(usize, usize)> {
        self.inner.arcs().to_vec()
    }

    fn loops(&self) -> Vec<usize> {
        self.inner.loops().to_vec()
    }

    /// Cycle counts by length under the three conventions: a dict with keys
    /// "oriented", "unoriented", "undirected", each mapping length to count.
    #[pyo3(signature = (max_candidates=None))]
    fn cycle_census(
        &self,
        max_candidates: Option<usize>,
    ) -> PyResult<BTreeMap<String, BTreeMap<usize, usize>>> {
        let max = max_candidates.unwrap_or(DEFAULT_MAX_CANDIDATES);
        let census = cycle_census(&self.inner, max).map_err(err)?;
        let mut out = BTreeMap::new();
        out.insert("oriented".to_string(), census.oriented_by_length);
        out.insert("unoriented".to_string(), census.unoriented_by_length);
        out.insert("undirected".to_string(), census.undirected_by_length);
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph({} vertices, {} arcs, {} loops)",
            self.inner.len(),
            self.inner.arcs().len(),
            self.inner.loops().len()
        )
    }
}

/// Cycle-product reversibility test. Returns None when every cycle balances,
/// otherwise the vertex labels of the first violating cycle.
#[pyfunction]
#[pyo3(signature = (graph, p, tol=1e-9, max_candidates=None))]
fn kolmogorov_check(
    graph: &PyGraph,
    p: Vec<Vec<f64>>,
    tol: f64,
    max_candidates: Option<usize>,
) -> PyResult<Option<Vec<String>>> {
    let max = max_candidates.unwrap_or(DEFAULT_MAX_CANDIDATES);
    match toricmc::reversible::kolmogorov_check(&graph.inner, &p, tol, max).map_err(err)? {
        KolmogorovVerdict::Reversible => Ok(None),
        KolmogorovVerdict::Violation(cycle) => Ok(Some(
            cycle
                .states()
                .iter()
                .map(|&v| graph.inner.label(v).to_string())
                .collect(),
        )),
    }
}

/// Solve detailed balance for a stationary weight vector. Returns the
/// normalized weights, or None when the chain is not reversible.
#[pyfunction]
#[pyo3(signature = (graph, p, tol=1e-9))]
fn detailed_balance_solve(
    graph: &PyGraph,
    p: Vec<Vec<f64>>,
    tol: f64,
) -> PyResult<Option<Vec<f64>>> {
    toricmc::reversible::detailed_balance_solve(&graph.inner, &p, tol).map_err(err)
}

/// Kullback-Leibler divergence between the n-step path law and its time
/// reversal, started from the stationary distribution pi.
#[pyfunction]
#[pyo3(signature = (graph, pi, p, n, tol=1e-9))]
fn reversal_divergence(
    graph: &PyGraph,
    pi: Vec<f64>,
    p: Vec<Vec<f64>>,
    n: usize,
    tol: f64,
) -> PyResult<f64> {
    toricmc::reversible::reversal_divergence(&graph.inner, &pi, &p, n, tol).map_err(err)
}

/// Build a reversible chain from a symmetric proposal joint q by combining
/// q(v,w) with q(w,v). Combiner is "min", "harmonic", or "product".
#[pyfunction]
fn metropolis(graph: &PyGraph, q: Vec<Vec<f64>>, combiner: &str) -> PyResult<Vec<Vec<f64>>> {
    let f = match combiner {
        "min" => Combiner::Min,
        "harmonic" => Combiner::Harmonic,
        "product" => Combiner::Product,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown combiner {:?}; expected \"min\", \"harmonic\", or \"product\"",
                other
            )))
        }
    };
    toricmc::reversible::metropolis_reversible(&graph.inner, &q, &f).map_err(err)
}

/// Stationary distribution of an irreducible stochastic matrix.
#[pyfunction]
fn stationary_distribution(p: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
    toricmc::tmc::stationary_distribution(&p).map_err(err)
}

/// Assemble a reversible transition matrix from edge weights s (symmetric on
/// arcs) and per-vertex cut weights t (one per vertex except the first).
/// Returns (P, kappa).
#[pyfunction]
#[pyo3(signature = (graph, s, t, loops=None))]
fn reversible_from_params(
    graph: &PyGraph,
    s: Vec<Vec<f64>>,
    t: Vec<f64>,
    loops: Option<Vec<f64>>,
) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let loops = loops.unwrap_or_else(|| vec![0.0; graph.inner.len()]);
    let rp = ReversibleParam::new(&graph.inner, s, default_cuts(&graph.inner), t, loops)
        .map_err(err)?;
    toricmc::reversible::reversible_from_params(&graph.inner, &rp).map_err(err)
}

/// Recover (s, t, loops) from a reversible transition matrix; inverse of
/// reversible_from_params on off-diagonal entries.
#[pyfunction]
#[pyo3(signature = (graph, p, tol=1e-9))]
fn params_from_reversible(
    graph: &PyGraph,
    p: Vec<Vec<f64>>,
    tol: f64,
) -> PyResult<(Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> {
    let rp = toricmc::reversible::params_from_reversible(&graph.inner, &p, tol).map_err(err)?;
    Ok((rp.s().to_vec(), rp.t().to_vec(), rp.loops().to_vec()))
}

/// Normalizing constant of the trajectory family of length n under arc
/// weights, an initial-state weight, and a global weight t0.
#[pyfunction]
fn partition_function(
    graph: &PyGraph,
    t0: f64,
    init: Vec<f64>,
    weights: Vec<Vec<f64>>,
    n: usize,
) -> PyResult<f64> {
    let param = TmcParam::new(&graph.inner, t0, init, weights).map_err(err)?;
    Ok(toricmc::tmc::partition_function(&graph.inner, &param, n))
}

/// Expected transition counts over trajectories of length n.
#[pyfunction]
fn expected_counts(
    graph: &PyGraph,
    t0: f64,
    init: Vec<f64>,
    weights: Vec<Vec<f64>>,
    n: usize,
) -> PyResult<Vec<Vec<f64>>> {
    let param = TmcParam::new(&graph.inner, t0, init, weights).map_err(err)?;
    Ok(toricmc::tmc::expected_counts(&graph.inner, &param, n))
}

/// Common row sum when the weights describe a Markov chain up to scale,
/// None otherwise.
#[pyfunction]
#[pyo3(signature = (graph, weights, tol=1e-9))]
fn homogeneity(graph: &PyGraph, weights: Vec<Vec<f64>>, tol: f64) -> PyResult<Option<f64>> {
    let k = graph.inner.len();
    let param = TmcParam::new(&graph.inner, 1.0, vec![1.0; k], weights).map_err(err)?;
    match toricmc::tmc::homogeneity_check(&graph.inner, &param, tol) {
        Homogeneity::IsMc { s } => Ok(Some(s)),
        Homogeneity::NotMc { .. } => Ok(None),
    }
}

/// Whether a count matrix is the transition count of some trajectory on the
/// graph: (verdict, description).
#[pyfunction]
fn realizable(graph: &PyGraph, counts: Vec<Vec<u64>>) -> PyResult<(bool, String)> {
    match is_realizable(&counts, &graph.inner) {
        Realizability::Closed => Ok((true, "closed".to_string())),
        Realizability::Open { start, end } => Ok((
            true,
            format!(
                "open {} -> {}",
                graph.inner.label(start),
                graph.inner.label(end)
            ),
        )),
        Realizability::NotRealizable(reason) => Ok((false, reason)),
    }
}

#[pymodule]
fn toricmc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(kolmogorov_check, m)?)?;
    m.add_function(wrap_pyfunction!(detailed_balance_solve, m)?)?;
    m.add_function(wrap_pyfunction!(reversal_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(metropolis, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(reversible_from_params, m)?)?;
    m.add_function(wrap_pyfunction!(params_from_reversible, m)?)?;
    m.add_function(wrap_pyfunction!(partition_function, m)?)?;
    m.add_function(wrap_pyfunction!(expected_counts, m)?)?;
    m.add_function(wrap_pyfunction!(homogeneity, m)?)?;
    m.add_function(wrap_pyfunction!(realizable, m)?)?;
    m.add("DEFAULT_MAX_CANDIDATES", DEFAULT_MAX_CANDIDATES)?;
    Ok(())
}
