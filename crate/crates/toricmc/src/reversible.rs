//! Reversible chains on a symmetric-support transition graph: trajectory
//! reversal, the Kolmogorov cycle criterion and its binomial generators,
//! detailed balance, the cocycle-matrix parameterization in both directions,
//! reversal divergence, and Metropolis-type constructions from a joint
//! proposal.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::amodel::Binomial;
use crate::cycles::{enumerate_cycles, Cycle};
use crate::error::{Error, Result};
use crate::graph::{Trajectory, TransitionGraph};
use crate::matrix::{normalize_sign, rational_rank, IntMatrix};

/// Row-stochastic on the graph: nonnegative, rows sum to one within `tol`,
/// and positive exactly on arcs and loops.
pub fn validate_transition_matrix(
    graph: &TransitionGraph,
    p: &[Vec<f64>],
    tol: f64,
) -> Result<()> {
    let k = graph.len();
    if p.len() != k || p.iter().any(|row| row.len() != k) {
        return Err(Error::DimensionMismatch(format!(
            "transition matrix must be {}x{}",
            k, k
        )));
    }
    for v in 0..k {
        let mut sum = 0.0;
        for w in 0..k {
            let x = p[v][w];
            if !x.is_finite() || x < 0.0 {
                return Err(Error::Input(format!(
                    "entry {} -> {} is not a probability",
                    graph.label(v),
                    graph.label(w)
                )));
            }
            if x > 0.0 && !graph.has_step(v, w) {
                return Err(Error::Input(format!(
                    "positive probability off the graph at {} -> {}",
                    graph.label(v),
                    graph.label(w)
                )));
            }
            if x == 0.0 && graph.has_step(v, w) {
                return Err(Error::Input(format!(
                    "zero probability on the graph step {} -> {}",
                    graph.label(v),
                    graph.label(w)
                )));
            }
            sum += x;
        }
        if (sum - 1.0).abs() > tol {
            return Err(Error::Input(format!(
                "row {} sums to {}",
                graph.label(v),
                sum
            )));
        }
    }
    Ok(())
}

fn require_symmetric_arcs(graph: &TransitionGraph) -> Result<()> {
    for &(v, w) in graph.arcs() {
        if !graph.has_arc(w, v) {
            return Err(Error::SupportAsymmetry(
                graph.label(v).to_string(),
                graph.label(w).to_string(),
            ));
        }
    }
    Ok(())
}

/// States in reverse order; every reversed step must be available.
pub fn reversal(graph: &TransitionGraph, traj: &Trajectory) -> Result<Trajectory> {
    let rev = traj.reversed();
    for s in rev.windows(2) {
        if !graph.has_step(s[0], s[1]) {
            return Err(Error::ArcMissingReverse(
                graph.label(s[1]).to_string(),
                graph.label(s[0]).to_string(),
            ));
        }
    }
    Trajectory::new(graph, rev)
}

/// `pi(w_0) prod P` along the trajectory.
pub fn trajectory_probability(
    graph: &TransitionGraph,
    pi: &[f64],
    p: &[Vec<f64>],
    traj: &Trajectory,
) -> Result<f64> {
    let k = graph.len();
    if pi.len() != k || p.len() != k {
        return Err(Error::DimensionMismatch("pi and P must match the graph".into()));
    }
    let mut out = pi[traj.start()];
    for s in traj.states().windows(2) {
        out *= p[s[0]][s[1]];
    }
    Ok(out)
}

/// Probability of the reversed trajectory under the same law:
/// `pi(w_n) prod P` over the reversed steps.
pub fn reversed_probability(
    graph: &TransitionGraph,
    pi: &[f64],
    p: &[Vec<f64>],
    traj: &Trajectory,
) -> Result<f64> {
    let rev = reversal(graph, traj)?;
    trajectory_probability(graph, pi, p, &rev)
}

/// Kullback-Leibler divergence between the n-step path law of the
/// stationary chain and that of its reversal:
/// `n sum_{v,w} J(v,w) log(J(v,w)/J(w,v))` with the two-step joint
/// `J(v,w) = pi(v) P_{v->w}`.
pub fn reversal_divergence(
    graph: &TransitionGraph,
    pi: &[f64],
    p: &[Vec<f64>],
    n: usize,
    stationarity_tol: f64,
) -> Result<f64> {
    validate_transition_matrix(graph, p, 1e-9)?;
    require_symmetric_arcs(graph)?;
    let k = graph.len();
    if pi.len() != k {
        return Err(Error::DimensionMismatch("one pi entry per vertex".into()));
    }
    let res = (0..k)
        .map(|w| ((0..k).map(|v| pi[v] * p[v][w]).sum::<f64>() - pi[w]).abs())
        .fold(0.0f64, f64::max);
    if res > stationarity_tol {
        return Err(Error::StationarityViolated(res));
    }
    let mut d = 0.0;
    for v in 0..k {
        for w in 0..k {
            let j = pi[v] * p[v][w];
            if j > 0.0 {
                let jr = pi[w] * p[w][v];
                if jr <= 0.0 {
                    return Err(Error::SupportAsymmetry(
                        graph.label(v).to_string(),
                        graph.label(w).to_string(),
                    ));
                }
                d += j * (j / jr).ln();
            }
        }
    }
    Ok(n as f64 * d)
}

/// Outcome of the cycle-product reversibility test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KolmogorovVerdict {
    Reversible,
    /// First cycle (in canonical order) whose forward and backward products
    /// differ.
    Violation(Cycle),
}

/// Compares `prod P` over every elementary cycle of length >= 3 with the
/// product over its reversal; loops and 2-cycles are identities.
pub fn kolmogorov_check(
    graph: &TransitionGraph,
    p: &[Vec<f64>],
    tol: f64,
    max_candidates: usize,
) -> Result<KolmogorovVerdict> {
    validate_transition_matrix(graph, p, 1e-9)?;
    require_symmetric_arcs(graph)?;
    for c in enumerate_cycles(graph, max_candidates)? {
        if c.len() < 3 {
            continue;
        }
        let fwd: f64 = c.arcs().iter().map(|&(v, w)| p[v][w]).product();
        let rev: f64 = c.arcs().iter().map(|&(v, w)| p[w][v]).product();
        let scale = 1f64.max(fwd.abs()).max(rev.abs());
        if (fwd - rev).abs() > tol * scale {
            return Ok(KolmogorovVerdict::Violation(c));
        }
    }
    Ok(KolmogorovVerdict::Reversible)
}

/// One binomial per +- pair of cycles of length >= 3, over the arc
/// variables: the exponents are the positive and negative parts of the
/// cycle vector, hence square-free. Loops and 2-cycles contribute nothing.
pub fn k_ideal_generators(
    graph: &TransitionGraph,
    max_candidates: usize,
) -> Result<Vec<Binomial>> {
    require_symmetric_arcs(graph)?;
    let mut vectors: Vec<Vec<BigInt>> = enumerate_cycles(graph, max_candidates)?
        .iter()
        .filter(|c| c.len() >= 3)
        .map(|c| normalize_sign(c.vector(graph)))
        .collect();
    vectors.sort();
    vectors.dedup();
    Ok(vectors
        .iter()
        .map(|z| Binomial::from_kernel_vector(z))
        .collect())
}

/// Detailed-balance weights: propagates kappa along a spanning tree of the
/// symmetric support and verifies the remaining arcs. `None` when some
/// non-tree arc breaks the balance, which happens exactly when the
/// Kolmogorov check fails.
pub fn detailed_balance_solve(
    graph: &TransitionGraph,
    p: &[Vec<f64>],
    tol: f64,
) -> Result<Option<Vec<f64>>> {
    validate_transition_matrix(graph, p, 1e-9)?;
    require_symmetric_arcs(graph)?;
    let k = graph.len();
    let mut kappa = vec![0.0f64; k];
    kappa[0] = 1.0;
    let mut visited = vec![false; k];
    visited[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut tree: Vec<(usize, usize)> = Vec::new();
    while let Some(v) = queue.pop_front() {
        for &w in graph.out_neighbors(v) {
            if w != v && !visited[w] {
                visited[w] = true;
                kappa[w] = kappa[v] * p[v][w] / p[w][v];
                tree.push((v, w));
                queue.push_back(w);
            }
        }
    }
    // The graph is connected, so every vertex received a weight.
    debug_assert!(visited.iter().all(|x| *x));
    for &(v, w) in graph.arcs() {
        let lhs = kappa[v] * p[v][w];
        let rhs = kappa[w] * p[w][v];
        let scale = 1f64.max(lhs.abs()).max(rhs.abs());
        if (lhs - rhs).abs() > tol * scale {
            return Ok(None);
        }
    }
    let total: f64 = kappa.iter().sum();
    Ok(Some(kappa.iter().map(|x| x / total).collect()))
}

/// Rows indexed by undirected edges and then by the selected cuts, columns
/// by the graph's arcs. Edge rows carry 1 on both orientations; a cut row
/// carries +1 on arcs leaving the cut and -1 on arcs entering it.
#[derive(Debug, Clone)]
pub struct CocycleMatrix {
    pub matrix: IntMatrix,
    pub edges: Vec<(usize, usize)>,
    pub cuts: Vec<Vec<usize>>,
}

/// Singleton cuts for every vertex except the reference vertex 0.
pub fn default_cuts(graph: &TransitionGraph) -> Vec<Vec<usize>> {
    (1..graph.len()).map(|v| vec![v]).collect()
}

pub fn cocycle_matrix(graph: &TransitionGraph, cuts: &[Vec<usize>]) -> Result<CocycleMatrix> {
    require_symmetric_arcs(graph)?;
    let k = graph.len();
    let arcs = graph.arcs();
    let mut edges: Vec<(usize, usize)> = arcs
        .iter()
        .filter(|&&(v, w)| v < w)
        .cloned()
        .collect();
    edges.sort();
    let mut in_cut = Vec::with_capacity(cuts.len());
    for cut in cuts {
        let mut mask = vec![false; k];
        for &v in cut {
            if v >= k {
                return Err(Error::Input(format!("cut vertex {} out of range", v)));
            }
            if mask[v] {
                return Err(Error::Input("cut repeats a vertex".into()));
            }
            mask[v] = true;
        }
        let size = mask.iter().filter(|x| **x).count();
        if size == 0 || size == k {
            return Err(Error::Input("cuts must be proper nonempty vertex subsets".into()));
        }
        in_cut.push(mask);
    }
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(edges.len() + cuts.len());
    for &(v, w) in &edges {
        let row = arcs
            .iter()
            .map(|&(a, b)| {
                if (a, b) == (v, w) || (a, b) == (w, v) {
                    BigInt::from(1)
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        rows.push(row);
    }
    let cut_start = rows.len();
    for mask in &in_cut {
        let row = arcs
            .iter()
            .map(|&(a, b)| match (mask[a], mask[b]) {
                (true, false) => BigInt::from(1),
                (false, true) => BigInt::from(-1),
                _ => BigInt::zero(),
            })
            .collect();
        rows.push(row);
    }
    let cut_block: Vec<Vec<num_rational::BigRational>> = rows[cut_start..]
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| num_rational::BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    if rational_rank(&cut_block) != cuts.len() {
        return Err(Error::DependentCuts);
    }
    Ok(CocycleMatrix {
        matrix: IntMatrix::from_rows(&rows)?,
        edges,
        cuts: cuts.to_vec(),
    })
}

/// Parameters of the cocycle parameterization: symmetric edge weights, one
/// positive weight per cut, and the recorded loop masses.
#[derive(Debug, Clone)]
pub struct ReversibleParam {
    s: Vec<Vec<f64>>,
    cuts: Vec<Vec<usize>>,
    t: Vec<f64>,
    loops: Vec<f64>,
}

impl ReversibleParam {
    /// `s` must be symmetric and positive on the graph's arcs (other
    /// entries are ignored); `t` positive, one per cut; `loops` nonnegative
    /// and supported on the graph's loops. The cut family must give
    /// independent cut rows.
    pub fn new(
        graph: &TransitionGraph,
        s: Vec<Vec<f64>>,
        cuts: Vec<Vec<usize>>,
        t: Vec<f64>,
        loops: Vec<f64>,
    ) -> Result<Self> {
        let k = graph.len();
        if s.len() != k || s.iter().any(|row| row.len() != k) {
            return Err(Error::DimensionMismatch(format!("s must be {}x{}", k, k)));
        }
        for &(v, w) in graph.arcs() {
            if !(s[v][w] > 0.0) || !s[v][w].is_finite() {
                return Err(Error::NonPositiveParameter(format!(
                    "s({}, {})",
                    graph.label(v),
                    graph.label(w)
                )));
            }
            if (s[v][w] - s[w][v]).abs() > 0.0 {
                return Err(Error::Input(format!(
                    "s is not symmetric at ({}, {})",
                    graph.label(v),
                    graph.label(w)
                )));
            }
        }
        if t.len() != cuts.len() {
            return Err(Error::DimensionMismatch("one t per cut".into()));
        }
        if t.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return Err(Error::NonPositiveParameter("cut weights".into()));
        }
        cocycle_matrix(graph, &cuts)?;
        if loops.len() != k {
            return Err(Error::DimensionMismatch("one loop weight per vertex".into()));
        }
        for (v, &x) in loops.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::NonPositiveParameter(format!(
                    "loop weight at {}",
                    graph.label(v)
                )));
            }
            if x > 0.0 && !graph.has_loop(v) {
                return Err(Error::Input(format!(
                    "loop weight at {} but the graph has no loop there",
                    graph.label(v)
                )));
            }
        }
        Ok(ReversibleParam { s, cuts, t, loops })
    }

    pub fn s(&self) -> &[Vec<f64>] {
        &self.s
    }

    pub fn cuts(&self) -> &[Vec<usize>] {
        &self.cuts
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn loops(&self) -> &[f64] {
        &self.loops
    }

    pub fn with_t(&self, t: Vec<f64>) -> Self {
        ReversibleParam { s: self.s.clone(), cuts: self.cuts.clone(), t, loops: self.loops.clone() }
    }
}

/// Builds the reversible kernel
/// `P_{v->w} = s(v,w) prod_{B: v in B, w not in B} t_B prod_{B: w in B, v not in B} 1/t_B`
/// off the diagonal, gives loops whatever mass the rows have left, and
/// returns it with the balanced weights `kappa(v) ~ prod_{B: v in B} t_B^{-2}`.
pub fn reversible_from_params(
    graph: &TransitionGraph,
    rp: &ReversibleParam,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let k = graph.len();
    let mut p = vec![vec![0.0f64; k]; k];
    for &(v, w) in graph.arcs() {
        let mut x = rp.s[v][w];
        for (mask, &t) in rp.cuts.iter().zip(&rp.t) {
            let v_in = mask.contains(&v);
            let w_in = mask.contains(&w);
            if v_in && !w_in {
                x *= t;
            } else if w_in && !v_in {
                x /= t;
            }
        }
        p[v][w] = x;
    }
    for v in 0..k {
        let off: f64 = (0..k).filter(|&w| w != v).map(|w| p[v][w]).sum();
        let resid = 1.0 - off;
        if resid < -1e-12 {
            return Err(Error::RowSumExceedsOne(graph.label(v).to_string()));
        }
        let resid = resid.max(0.0);
        if graph.has_loop(v) {
            if resid == 0.0 {
                return Err(Error::Input(format!(
                    "no mass left for the loop at {}",
                    graph.label(v)
                )));
            }
            p[v][v] = resid;
        } else if resid > 1e-12 {
            return Err(Error::Input(format!(
                "residual mass {:.3e} at {} but the graph has no loop there",
                resid,
                graph.label(v)
            )));
        }
    }
    let mut kappa = vec![1.0f64; k];
    for (mask, &t) in rp.cuts.iter().zip(&rp.t) {
        for &v in mask {
            kappa[v] /= t * t;
        }
    }
    let total: f64 = kappa.iter().sum();
    for x in kappa.iter_mut() {
        *x /= total;
    }
    for &(v, w) in graph.arcs() {
        let lhs = kappa[v] * p[v][w];
        let rhs = kappa[w] * p[w][v];
        debug_assert!(
            (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1e-300),
            "detailed balance failed on {} -> {}",
            v,
            w
        );
    }
    Ok((p, kappa))
}

/// Recovers the parameterization of a reversible kernel: unique symmetric
/// part `s(v,w) = sqrt(P_{v->w} P_{w->v})`, singleton cuts against the
/// reference vertex 0, `t_{{v}} = sqrt(kappa(0)/kappa(v))`, and the
/// diagonal as loop masses.
pub fn params_from_reversible(
    graph: &TransitionGraph,
    p: &[Vec<f64>],
    tol: f64,
) -> Result<ReversibleParam> {
    let Some(kappa) = detailed_balance_solve(graph, p, tol)? else {
        return Err(Error::NotReversible(
            "detailed balance has no solution".into(),
        ));
    };
    let k = graph.len();
    let mut s = vec![vec![0.0f64; k]; k];
    for &(v, w) in graph.arcs() {
        s[v][w] = (p[v][w] * p[w][v]).sqrt();
    }
    let cuts = default_cuts(graph);
    let t = (1..k).map(|v| (kappa[0] / kappa[v]).sqrt()).collect();
    let loops = (0..k).map(|v| p[v][v]).collect();
    ReversibleParam::new(graph, s, cuts, t, loops)
}

/// Symmetric combiner for the Metropolis construction; must never exceed
/// the smaller argument.
#[derive(Debug, Clone, Copy)]
pub enum Combiner {
    Min,
    /// u v / (u + v)
    Harmonic,
    /// u v, valid for subprobability entries
    Product,
    Custom(fn(f64, f64) -> f64),
}

impl Combiner {
    pub fn apply(&self, u: f64, v: f64) -> f64 {
        match self {
            Combiner::Min => u.min(v),
            Combiner::Harmonic => {
                if u + v == 0.0 {
                    0.0
                } else {
                    u * v / (u + v)
                }
            }
            Combiner::Product => u * v,
            Combiner::Custom(f) => f(u, v),
        }
    }
}

/// Row margins of a joint matrix.
pub fn joint_margins(q: &[Vec<f64>]) -> Vec<f64> {
    q.iter().map(|row| row.iter().sum()).collect()
}

/// Metropolis-type symmetrization of a joint proposal `Q` on V x V:
/// `P(x,y) = f(Q(x,y), Q(y,x))` off the diagonal and whatever mass keeps
/// the row margins on it. The result is symmetric off-diagonal with the
/// same margins as `Q`, hence a reversible two-step joint.
pub fn metropolis_reversible(
    graph: &TransitionGraph,
    q: &[Vec<f64>],
    f: &Combiner,
) -> Result<Vec<Vec<f64>>> {
    require_symmetric_arcs(graph)?;
    let k = graph.len();
    if q.len() != k || q.iter().any(|row| row.len() != k) {
        return Err(Error::DimensionMismatch(format!("joint must be {}x{}", k, k)));
    }
    for v in 0..k {
        for w in 0..k {
            let x = q[v][w];
            if !x.is_finite() || x < 0.0 {
                return Err(Error::Input(format!(
                    "joint entry ({}, {}) is negative",
                    graph.label(v),
                    graph.label(w)
                )));
            }
            if v != w && graph.has_arc(v, w) && !(x > 0.0) {
                return Err(Error::NonPositiveParameter(format!(
                    "Q({}, {})",
                    graph.label(v),
                    graph.label(w)
                )));
            }
            if v != w && !graph.has_arc(v, w) && x != 0.0 {
                return Err(Error::Input(format!(
                    "joint mass off the graph at ({}, {})",
                    graph.label(v),
                    graph.label(w)
                )));
            }
        }
    }
    let pi = joint_margins(q);
    let mut p = vec![vec![0.0f64; k]; k];
    for &(v, w) in graph.arcs() {
        if v < w {
            let val = f.apply(q[v][w], q[w][v]);
            if val > q[v][w].min(q[w][v]) * (1.0 + 1e-12) || val < 0.0 {
                return Err(Error::CombinerViolation(
                    graph.label(v).to_string(),
                    graph.label(w).to_string(),
                ));
            }
            p[v][w] = val;
            p[w][v] = val;
        }
    }
    for v in 0..k {
        let off: f64 = (0..k).filter(|&w| w != v).map(|w| p[v][w]).sum();
        let diag = pi[v] - off;
        debug_assert!(diag >= -1e-12);
        p[v][v] = diag.max(0.0);
    }
    Ok(p)
}

/// `prod_a P_a^{N_a(c)}` for each cycle.
pub fn cycle_monomials(
    graph: &TransitionGraph,
    p: &[Vec<f64>],
    cycles: &[Cycle],
) -> Result<BTreeMap<Cycle, f64>> {
    let k = graph.len();
    if p.len() != k || p.iter().any(|row| row.len() != k) {
        return Err(Error::DimensionMismatch(format!("matrix must be {}x{}", k, k)));
    }
    Ok(cycles
        .iter()
        .map(|c| {
            let value: f64 = c.arcs().iter().map(|&(v, w)| p[v][w]).product();
            (c.clone(), value)
        })
        .collect())
}
