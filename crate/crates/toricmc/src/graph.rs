//! Directed transition graphs with separate arc and loop sets, trajectories
//! over them, transition counts, and the Euler-type realizability test for
//! count matrices.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Connected directed graph on labeled vertices. Arcs join distinct
/// vertices; loops are kept apart because several statistics treat them
/// differently.
#[derive(Debug, Clone)]
pub struct TransitionGraph {
    labels: Vec<String>,
    arcs: Vec<(usize, usize)>,
    loops: Vec<usize>,
    out: Vec<Vec<usize>>,
    step: Vec<Vec<bool>>,
}

impl TransitionGraph {
    pub fn new(
        labels: Vec<String>,
        arcs: Vec<(usize, usize)>,
        loops: Vec<usize>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        {
            let mut seen = HashSet::new();
            for l in &labels {
                if !seen.insert(l.clone()) {
                    return Err(Error::InvalidGraph(format!("duplicate vertex label {}", l)));
                }
            }
        }
        let mut step = vec![vec![false; n]; n];
        for &(v, w) in &arcs {
            if v >= n || w >= n {
                return Err(Error::InvalidGraph("arc endpoint out of range".into()));
            }
            if v == w {
                return Err(Error::InvalidGraph(format!(
                    "{} -> {} must be declared as a loop",
                    labels[v], labels[v]
                )));
            }
            if step[v][w] {
                return Err(Error::InvalidGraph(format!(
                    "duplicate arc {} -> {}",
                    labels[v], labels[w]
                )));
            }
            step[v][w] = true;
        }
        for &v in &loops {
            if v >= n {
                return Err(Error::InvalidGraph("loop vertex out of range".into()));
            }
            if step[v][v] {
                return Err(Error::InvalidGraph(format!("duplicate loop at {}", labels[v])));
            }
            step[v][v] = true;
        }
        // Connectivity of (V, arcs) as an undirected graph; loops never
        // connect anything.
        if n > 1 {
            let mut reached = vec![false; n];
            let mut stack = vec![0usize];
            reached[0] = true;
            while let Some(v) = stack.pop() {
                for w in 0..n {
                    if (step[v][w] || step[w][v]) && v != w && !reached[w] {
                        reached[w] = true;
                        stack.push(w);
                    }
                }
            }
            if let Some(v) = reached.iter().position(|r| !r) {
                return Err(Error::InvalidGraph(format!(
                    "vertex {} is disconnected",
                    labels[v]
                )));
            }
        }
        let out = (0..n)
            .map(|v| (0..n).filter(|&w| step[v][w]).collect())
            .collect();
        Ok(TransitionGraph { labels, arcs, loops, out, step })
    }

    pub fn complete_with_loops(k: usize) -> Self {
        let labels = (0..k).map(|i| i.to_string()).collect();
        let arcs = (0..k)
            .flat_map(|v| (0..k).filter(move |&w| w != v).map(move |w| (v, w)))
            .collect();
        let loops = (0..k).collect();
        TransitionGraph::new(labels, arcs, loops).expect("complete graph is valid")
    }

    pub fn complete_without_loops(k: usize) -> Self {
        let labels = (0..k).map(|i| i.to_string()).collect();
        let arcs = (0..k)
            .flat_map(|v| (0..k).filter(move |&w| w != v).map(move |w| (v, w)))
            .collect();
        TransitionGraph::new(labels, arcs, vec![]).expect("complete graph is valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn loops(&self) -> &[usize] {
        &self.loops
    }

    /// Arcs and loops together, loops as (v, v).
    pub fn steps(&self) -> Vec<(usize, usize)> {
        let mut s = self.arcs.clone();
        s.extend(self.loops.iter().map(|&v| (v, v)));
        s
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn has_arc(&self, v: usize, w: usize) -> bool {
        v != w && self.step[v][w]
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.step[v][v]
    }

    /// Arc or loop.
    pub fn has_step(&self, v: usize, w: usize) -> bool {
        self.step[v][w]
    }
}

/// State sequence `w_0 .. w_n`; each consecutive pair must be a step of the
/// graph it is validated against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    states: Vec<usize>,
}

impl Trajectory {
    pub fn new(graph: &TransitionGraph, states: Vec<usize>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Input("trajectory needs at least one state".into()));
        }
        for &s in &states {
            if s >= graph.len() {
                return Err(Error::Input(format!("state index {} out of range", s)));
            }
        }
        for k in 1..states.len() {
            let (v, w) = (states[k - 1], states[k]);
            if !graph.has_step(v, w) {
                return Err(Error::InvalidTrajectory {
                    from: graph.label(v).to_string(),
                    to: graph.label(w).to_string(),
                });
            }
        }
        Ok(Trajectory { states })
    }

    pub fn from_labels(graph: &TransitionGraph, labels: &[&str]) -> Result<Self> {
        let states = labels
            .iter()
            .map(|l| {
                graph
                    .index_of(l)
                    .ok_or_else(|| Error::Input(format!("unknown state label {}", l)))
            })
            .collect::<Result<_>>()?;
        Trajectory::new(graph, states)
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn start(&self) -> usize {
        self.states[0]
    }

    pub fn end(&self) -> usize {
        *self.states.last().unwrap()
    }

    /// Number of transitions (one less than the number of states).
    pub fn transitions(&self) -> usize {
        self.states.len() - 1
    }

    /// States in reverse order. Only a trajectory of a graph whose arc set
    /// is symmetric is guaranteed to stay valid.
    pub fn reversed(&self) -> Vec<usize> {
        self.states.iter().rev().cloned().collect()
    }
}

/// Transition counts of one trajectory: `n[v][w]` is the number of steps
/// v -> w; start and end vertices are kept because the count matrix alone
/// does not determine them for closed paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionCount {
    pub n: Vec<Vec<u64>>,
    pub start: usize,
    pub end: usize,
}

impl TransitionCount {
    pub fn total(&self) -> u64 {
        self.n.iter().flatten().sum()
    }

    /// Out-degree minus in-degree per vertex.
    pub fn balance(&self) -> Vec<i64> {
        let k = self.n.len();
        (0..k)
            .map(|v| {
                let out: u64 = self.n[v].iter().sum();
                let inn: u64 = (0..k).map(|w| self.n[w][v]).sum();
                out as i64 - inn as i64
            })
            .collect()
    }
}

pub fn transition_count(graph: &TransitionGraph, traj: &Trajectory) -> Result<TransitionCount> {
    let k = graph.len();
    let mut n = vec![vec![0u64; k]; k];
    for s in traj.states().windows(2) {
        let (v, w) = (s[0], s[1]);
        if !graph.has_step(v, w) {
            return Err(Error::InvalidTrajectory {
                from: graph.label(v).to_string(),
                to: graph.label(w).to_string(),
            });
        }
        n[v][w] += 1;
    }
    Ok(TransitionCount { n, start: traj.start(), end: traj.end() })
}

/// Verdict of the count-realizability test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realizability {
    /// Some closed trajectory has these counts (any start vertex on the
    /// support works).
    Closed,
    /// Some trajectory from `start` to `end` has these counts.
    Open { start: usize, end: usize },
    NotRealizable(String),
}

/// Euler-path criterion: a nonnegative count matrix comes from a trajectory
/// iff its positive support lies on the graph, is connected as an undirected
/// graph, and the out-minus-in balance is zero everywhere (closed) or +1 at
/// one vertex and -1 at another (open). The zero matrix counts as closed.
pub fn is_realizable(n: &[Vec<u64>], graph: &TransitionGraph) -> Realizability {
    let k = graph.len();
    if n.len() != k || n.iter().any(|row| row.len() != k) {
        return Realizability::NotRealizable(format!("count matrix is not {}x{}", k, k));
    }
    for v in 0..k {
        for w in 0..k {
            if n[v][w] > 0 && !graph.has_step(v, w) {
                return Realizability::NotRealizable(format!(
                    "positive count off the graph at {} -> {}",
                    graph.label(v),
                    graph.label(w)
                ));
            }
        }
    }
    // Undirected connectivity of the vertices touched by positive counts.
    let touched: Vec<usize> = (0..k)
        .filter(|&v| (0..k).any(|w| n[v][w] > 0 || n[w][v] > 0))
        .collect();
    if let Some(&root) = touched.first() {
        let mut reached = vec![false; k];
        reached[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for w in 0..k {
                if (n[v][w] > 0 || n[w][v] > 0) && !reached[w] {
                    reached[w] = true;
                    stack.push(w);
                }
            }
        }
        if let Some(&v) = touched.iter().find(|&&v| !reached[v]) {
            return Realizability::NotRealizable(format!(
                "support is disconnected; {} unreachable",
                graph.label(v)
            ));
        }
    }
    let balance: Vec<i64> = (0..k)
        .map(|v| {
            let out: u64 = n[v].iter().sum();
            let inn: u64 = (0..k).map(|w| n[w][v]).sum();
            out as i64 - inn as i64
        })
        .collect();
    let plus: Vec<usize> = (0..k).filter(|&v| balance[v] > 0).collect();
    let minus: Vec<usize> = (0..k).filter(|&v| balance[v] < 0).collect();
    if plus.is_empty() && minus.is_empty() {
        Realizability::Closed
    } else if plus.len() == 1 && minus.len() == 1 && balance[plus[0]] == 1 && balance[minus[0]] == -1
    {
        Realizability::Open { start: plus[0], end: minus[0] }
    } else {
        Realizability::NotRealizable(format!(
            "flow balance defects at {} vertices",
            plus.len() + minus.len()
        ))
    }
}

/// All trajectories with exactly `n` transitions. Exponential in `n`; meant
/// for small instances and test oracles.
pub fn enumerate_trajectories(graph: &TransitionGraph, n: usize) -> Vec<Trajectory> {
    let mut out = Vec::new();
    let mut states = Vec::with_capacity(n + 1);
    fn rec(
        graph: &TransitionGraph,
        n: usize,
        states: &mut Vec<usize>,
        out: &mut Vec<Trajectory>,
    ) {
        if states.len() == n + 1 {
            out.push(Trajectory { states: states.clone() });
            return;
        }
        let v = *states.last().unwrap();
        for &w in graph.out_neighbors(v) {
            states.push(w);
            rec(graph, n, states, out);
            states.pop();
        }
    }
    for v in 0..graph.len() {
        states.push(v);
        rec(graph, n, &mut states, &mut out);
        states.pop();
    }
    out
}
