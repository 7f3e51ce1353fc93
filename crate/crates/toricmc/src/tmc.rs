//! Toric Markov chains: trajectory weights `q(w;t) = t_0 t_{w_0} prod t_a^{N_a}`,
//! the row-sum homogeneity criterion, transfer-matrix partition functions,
//! and expected transition counts via forward-mode differentiation of the
//! recursion.

use crate::error::{Error, Result};
use crate::graph::{enumerate_trajectories, transition_count, Trajectory, TransitionCount,
                   TransitionGraph};

/// Weights of a toric Markov chain: a global factor, one initial weight per
/// vertex, and one positive weight per arc and loop.
#[derive(Debug, Clone)]
pub struct TmcParam {
    t0: f64,
    init: Vec<f64>,
    weight: Vec<Vec<f64>>,
}

impl TmcParam {
    /// `weight` must be positive exactly on the arcs and loops of the graph
    /// and zero elsewhere; `init` nonnegative with at least one positive.
    pub fn new(
        graph: &TransitionGraph,
        t0: f64,
        init: Vec<f64>,
        weight: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let k = graph.len();
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::NonPositiveParameter("t0".into()));
        }
        if init.len() != k {
            return Err(Error::DimensionMismatch("one initial weight per vertex".into()));
        }
        if init.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::NonPositiveParameter("initial weights".into()));
        }
        if init.iter().all(|x| *x == 0.0) {
            return Err(Error::NonPositiveParameter(
                "at least one initial weight must be positive".into(),
            ));
        }
        if weight.len() != k || weight.iter().any(|row| row.len() != k) {
            return Err(Error::DimensionMismatch(format!(
                "weight matrix must be {}x{}",
                k, k
            )));
        }
        for v in 0..k {
            for w in 0..k {
                let x = weight[v][w];
                if !x.is_finite() {
                    return Err(Error::NonPositiveParameter(format!(
                        "weight {} -> {}",
                        graph.label(v),
                        graph.label(w)
                    )));
                }
                if graph.has_step(v, w) && !(x > 0.0) {
                    return Err(Error::NonPositiveParameter(format!(
                        "weight {} -> {}",
                        graph.label(v),
                        graph.label(w)
                    )));
                }
                if !graph.has_step(v, w) && x != 0.0 {
                    return Err(Error::Input(format!(
                        "weight off the graph at {} -> {}",
                        graph.label(v),
                        graph.label(w)
                    )));
                }
            }
        }
        Ok(TmcParam { t0, init, weight })
    }

    /// All weights one.
    pub fn uniform(graph: &TransitionGraph) -> Self {
        let k = graph.len();
        let mut weight = vec![vec![0.0; k]; k];
        for (v, w) in graph.steps() {
            weight[v][w] = 1.0;
        }
        TmcParam { t0: 1.0, init: vec![1.0; k], weight }
    }

    /// A transition matrix as a TMC: t0 = 1, initial weights from `pi`.
    pub fn from_chain(
        graph: &TransitionGraph,
        pi: Vec<f64>,
        p: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::new(graph, 1.0, pi, p)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn init(&self) -> &[f64] {
        &self.init
    }

    pub fn weight(&self) -> &[Vec<f64>] {
        &self.weight
    }

    /// Row sums `S(v) = sum_w t_{v->w}`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.weight.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn set_t0(&mut self, t0: f64) -> Result<()> {
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::NonPositiveParameter("t0".into()));
        }
        self.t0 = t0;
        Ok(())
    }
}

/// `t_0 t_{w_0} prod_a t_a^{N_a(w)}`.
pub fn tmc_density(graph: &TransitionGraph, t: &TmcParam, traj: &Trajectory) -> Result<f64> {
    let mut q = t.t0 * t.init[traj.start()];
    for s in traj.states().windows(2) {
        if !graph.has_step(s[0], s[1]) {
            return Err(Error::InvalidTrajectory {
                from: graph.label(s[0]).to_string(),
                to: graph.label(s[1]).to_string(),
            });
        }
        q *= t.weight[s[0]][s[1]];
    }
    if q == 0.0 {
        return Err(Error::ZeroWeightOnPath);
    }
    Ok(q)
}

/// Row-sum homogeneity: the weights define a Markov chain exactly when
/// `S(v)` is constant.
#[derive(Debug, Clone, PartialEq)]
pub enum Homogeneity {
    /// Common row sum.
    IsMc { s: f64 },
    /// Two vertices whose row sums differ beyond tolerance.
    NotMc { v: usize, w: usize },
}

pub fn homogeneity_check(graph: &TransitionGraph, t: &TmcParam, tol: f64) -> Homogeneity {
    let _ = graph;
    let s = t.row_sums();
    let (mut lo, mut hi) = (0usize, 0usize);
    for v in 1..s.len() {
        if s[v] < s[lo] {
            lo = v;
        }
        if s[v] > s[hi] {
            hi = v;
        }
    }
    let scale = 1f64.max(s[hi].abs());
    if s[hi] - s[lo] <= tol * scale {
        Homogeneity::IsMc { s: s.iter().sum::<f64>() / s.len() as f64 }
    } else {
        Homogeneity::NotMc { v: hi, w: lo }
    }
}

/// `P_{v->w} = t_{v->w} / S(v)`: row-stochastic, supported exactly on the
/// arcs and loops.
pub fn normalize_to_mc(graph: &TransitionGraph, t: &TmcParam) -> Result<Vec<Vec<f64>>> {
    let s = t.row_sums();
    for (v, sv) in s.iter().enumerate() {
        if *sv <= 0.0 {
            return Err(Error::ZeroRowSum(graph.label(v).to_string()));
        }
    }
    Ok(t.weight
        .iter()
        .zip(&s)
        .map(|(row, sv)| row.iter().map(|x| x / sv).collect())
        .collect())
}

/// `Z = t_0 sum_v t_v (T^n 1)_v` where `T` is the weight matrix.
pub fn partition_function(graph: &TransitionGraph, t: &TmcParam, n: usize) -> f64 {
    let _ = graph;
    let k = t.init.len();
    let mut u = vec![1.0f64; k];
    for _ in 0..n {
        let mut next = vec![0.0f64; k];
        for v in 0..k {
            let mut acc = 0.0;
            for w in 0..k {
                acc += t.weight[v][w] * u[w];
            }
            next[v] = acc;
        }
        u = next;
    }
    t.t0 * t.init.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>()
}

/// Value plus first derivative with respect to a single weight.
#[derive(Debug, Clone, Copy)]
struct Dual {
    v: f64,
    d: f64,
}

impl Dual {
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, d: self.v * o.d + self.d * o.v }
    }
}

/// `E[N_a] = t_a (d/dt_a) Z / Z` per arc and loop, by running the transfer
/// recursion over dual numbers once per weight.
pub fn expected_counts(graph: &TransitionGraph, t: &TmcParam, n: usize) -> Vec<Vec<f64>> {
    let k = t.init.len();
    let z = partition_function(graph, t, n);
    let mut out = vec![vec![0.0f64; k]; k];
    for (a, b) in graph.steps() {
        let mut u = vec![Dual { v: 1.0, d: 0.0 }; k];
        for _ in 0..n {
            let mut next = vec![Dual { v: 0.0, d: 0.0 }; k];
            for v in 0..k {
                let mut acc = Dual { v: 0.0, d: 0.0 };
                for w in 0..k {
                    let coeff = Dual {
                        v: t.weight[v][w],
                        d: if (v, w) == (a, b) { 1.0 } else { 0.0 },
                    };
                    let term = coeff.mul(u[w]);
                    acc.v += term.v;
                    acc.d += term.d;
                }
                next[v] = acc;
            }
            u = next;
        }
        let mut dz = 0.0;
        for v in 0..k {
            dz += t.init[v] * u[v].d;
        }
        dz *= t.t0;
        out[a][b] = t.weight[a][b] * dz / z;
    }
    out
}

/// `E_t[N_a] - N_a(observed)` per arc; the normal equations of maximum
/// likelihood set this to zero.
pub fn mle_residual(
    graph: &TransitionGraph,
    t: &TmcParam,
    observed: &TransitionCount,
    n: usize,
) -> Result<Vec<Vec<f64>>> {
    let k = graph.len();
    if observed.n.len() != k || observed.n.iter().any(|row| row.len() != k) {
        return Err(Error::DimensionMismatch(format!(
            "observed counts must be {}x{}",
            k, k
        )));
    }
    if observed.total() != n as u64 {
        return Err(Error::DimensionMismatch(format!(
            "observed counts total {} but the chain length is {}",
            observed.total(),
            n
        )));
    }
    for v in 0..k {
        for w in 0..k {
            if observed.n[v][w] > 0 && !graph.has_step(v, w) {
                return Err(Error::Input(format!(
                    "observed count off the graph at {} -> {}",
                    graph.label(v),
                    graph.label(w)
                )));
            }
        }
    }
    let e = expected_counts(graph, t, n);
    Ok((0..k)
        .map(|v| (0..k).map(|w| e[v][w] - observed.n[v][w] as f64).collect())
        .collect())
}

/// `(sum_v pi(v) P_{v->w} - pi(w))_w`.
pub fn stationarity_residual(
    graph: &TransitionGraph,
    pi: &[f64],
    p: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let k = graph.len();
    if pi.len() != k || p.len() != k || p.iter().any(|row| row.len() != k) {
        return Err(Error::DimensionMismatch("pi and P must match the graph".into()));
    }
    Ok((0..k)
        .map(|w| (0..k).map(|v| pi[v] * p[v][w]).sum::<f64>() - pi[w])
        .collect())
}

/// Stationary distribution of a row-stochastic matrix by direct solve of
/// the balance equations; unique when the support is connected.
pub fn stationary_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = p.len();
    if k == 0 || p.iter().any(|row| row.len() != k) {
        return Err(Error::DimensionMismatch("square matrix required".into()));
    }
    // Equations: balance at vertices 0..k-2, total mass 1 in the last row.
    let mut a = vec![vec![0.0f64; k + 1]; k];
    for w in 0..k - 1 {
        for v in 0..k {
            a[w][v] = p[v][w] - if v == w { 1.0 } else { 0.0 };
        }
    }
    for v in 0..k {
        a[k - 1][v] = 1.0;
    }
    a[k - 1][k] = 1.0;
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::SingularSystem);
        }
        a.swap(col, piv);
        let d = a[col][col];
        for x in a[col].iter_mut() {
            *x /= d;
        }
        for i in 0..k {
            if i != col && a[i][col] != 0.0 {
                let f = a[i][col];
                for j in col..=k {
                    let upd = a[col][j] * f;
                    a[i][j] -= upd;
                }
            }
        }
    }
    Ok(a.iter().map(|row| row[k]).collect())
}

/// Brute-force partition function; the enumeration oracle for the DP.
pub fn partition_function_enumerated(
    graph: &TransitionGraph,
    t: &TmcParam,
    n: usize,
) -> f64 {
    enumerate_trajectories(graph, n)
        .iter()
        .map(|w| {
            let mut q = t.t0() * t.init()[w.start()];
            for s in w.states().windows(2) {
                q *= t.weight()[s[0]][s[1]];
            }
            q
        })
        .sum()
}

/// Brute-force expected counts; the enumeration oracle for the dual-number
/// route.
pub fn expected_counts_enumerated(
    graph: &TransitionGraph,
    t: &TmcParam,
    n: usize,
) -> Vec<Vec<f64>> {
    let k = graph.len();
    let mut acc = vec![vec![0.0f64; k]; k];
    let mut z = 0.0;
    for w in enumerate_trajectories(graph, n) {
        let mut q = t.t0() * t.init()[w.start()];
        for s in w.states().windows(2) {
            q *= t.weight()[s[0]][s[1]];
        }
        z += q;
        let c = transition_count(graph, &w).unwrap();
        for v in 0..k {
            for u in 0..k {
                acc[v][u] += q * c.n[v][u] as f64;
            }
        }
    }
    for row in acc.iter_mut() {
        for x in row.iter_mut() {
            *x /= z;
        }
    }
    acc
}
