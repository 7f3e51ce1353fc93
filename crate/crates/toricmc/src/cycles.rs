//! Elementary cycles of a transition graph: enumeration with a canonical
//! order, signed cycle vectors over the arc set, the cycle lattice,
//! first-repeat trajectory decomposition, and the cycle census under the
//! three common counting conventions.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::graph::{Trajectory, TransitionGraph};
use crate::lattice::LatticeBasis;

/// Elementary directed cycle, stored as the vertex rotation that starts at
/// the smallest vertex. A loop is `[v]`, a 2-cycle `[v, w]`; the closing arc
/// back to the first vertex is implicit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle {
    states: Vec<usize>,
}

impl Cycle {
    /// Accepts any rotation of an elementary cycle and canonicalizes it.
    pub fn new(graph: &TransitionGraph, states: Vec<usize>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Input("cycle needs at least one vertex".into()));
        }
        for &v in &states {
            if v >= graph.len() {
                return Err(Error::Input(format!("vertex index {} out of range", v)));
            }
        }
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                if states[i] == states[j] {
                    return Err(Error::Input("cycle repeats a vertex".into()));
                }
            }
        }
        let k = states.len();
        for i in 0..k {
            let (v, w) = (states[i], states[(i + 1) % k]);
            if k == 1 {
                if !graph.has_loop(v) {
                    return Err(Error::Input(format!("no loop at {}", graph.label(v))));
                }
            } else if !graph.has_arc(v, w) {
                return Err(Error::InvalidTrajectory {
                    from: graph.label(v).to_string(),
                    to: graph.label(w).to_string(),
                });
            }
        }
        Ok(Self::canonical(states))
    }

    fn canonical(states: Vec<usize>) -> Cycle {
        let min_pos = states
            .iter()
            .enumerate()
            .min_by_key(|(_, v)| **v)
            .map(|(i, _)| i)
            .unwrap();
        let mut rot = Vec::with_capacity(states.len());
        rot.extend_from_slice(&states[min_pos..]);
        rot.extend_from_slice(&states[..min_pos]);
        Cycle { states: rot }
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    /// Number of arcs (equals the number of vertices).
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Arcs in traversal order, the closing arc last.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let k = self.states.len();
        (0..k)
            .map(|i| (self.states[i], self.states[(i + 1) % k]))
            .collect()
    }

    /// Same trail traversed backwards. Loops and 2-cycles are their own
    /// reversal.
    pub fn reversed(&self) -> Cycle {
        let mut rev = vec![self.states[0]];
        rev.extend(self.states[1..].iter().rev());
        Cycle::canonical(rev)
    }

    /// V x V usage counts of the cycle's arcs.
    pub fn count_matrix(&self, k: usize) -> Vec<Vec<u64>> {
        let mut n = vec![vec![0u64; k]; k];
        for (v, w) in self.arcs() {
            n[v][w] += 1;
        }
        n
    }

    /// Signed arc-usage vector over the graph's arc list:
    /// `z_a = N_a - N_{r(a)}`. Zero for loops and 2-cycles; +1 on used arcs
    /// and -1 on their reverses for longer cycles.
    pub fn vector(&self, graph: &TransitionGraph) -> Vec<BigInt> {
        let c = self.count_matrix(graph.len());
        graph
            .arcs()
            .iter()
            .map(|&(v, w)| BigInt::from(c[v][w] as i64 - c[w][v] as i64))
            .collect()
    }
}

/// All elementary directed cycles, loops included, sorted by length and then
/// by vertex sequence. Each cycle is rooted at its smallest vertex during
/// the search, so every rotation class appears exactly once.
pub fn enumerate_cycles(
    graph: &TransitionGraph,
    max_candidates: usize,
) -> Result<Vec<Cycle>> {
    let k = graph.len();
    let mut out: Vec<Cycle> = graph.loops().iter().map(|&v| Cycle { states: vec![v] }).collect();
    let mut work = 0usize;

    fn dfs(
        graph: &TransitionGraph,
        root: usize,
        path: &mut Vec<usize>,
        in_path: &mut Vec<bool>,
        out: &mut Vec<Cycle>,
        work: &mut usize,
        cap: usize,
    ) -> Result<()> {
        let v = *path.last().unwrap();
        for &w in graph.out_neighbors(v) {
            *work += 1;
            if *work > cap {
                return Err(Error::EnumerationBudgetExceeded { candidates: *work, cap });
            }
            if w == root && path.len() >= 2 {
                out.push(Cycle { states: path.clone() });
            } else if w > root && !in_path[w] {
                path.push(w);
                in_path[w] = true;
                dfs(graph, root, path, in_path, out, work, cap)?;
                in_path[w] = false;
                path.pop();
            }
        }
        Ok(())
    }

    for root in 0..k {
        let mut path = vec![root];
        let mut in_path = vec![false; k];
        in_path[root] = true;
        dfs(graph, root, &mut path, &mut in_path, &mut out, &mut work, max_candidates)?;
    }
    out.sort_by(|a, b| (a.len(), &a.states).cmp(&(b.len(), &b.states)));
    Ok(out)
}

/// Basis of the integer lattice spanned by the cycle vectors (only cycles of
/// length >= 3 contribute; shorter ones have the zero vector).
pub fn cycle_lattice_basis(
    graph: &TransitionGraph,
    max_candidates: usize,
) -> Result<LatticeBasis> {
    let vectors: Vec<Vec<BigInt>> = enumerate_cycles(graph, max_candidates)?
        .iter()
        .filter(|c| c.len() >= 3)
        .map(|c| c.vector(graph))
        .collect();
    if vectors.is_empty() {
        return LatticeBasis::new(graph.arcs().len(), vec![]);
    }
    let m = crate::matrix::IntMatrix::from_rows(&vectors)?;
    Ok(LatticeBasis::from_row_span(&m))
}

/// Splits a trajectory into an elementary remainder and a multiset of
/// cycles: scan forward, and each time a vertex repeats, excise the cycle
/// the repeat closes. Counts satisfy `N(w) = N(remainder) + sum m(c) N(c)`.
pub fn decompose_trajectory(
    graph: &TransitionGraph,
    traj: &Trajectory,
) -> Result<(Trajectory, BTreeMap<Cycle, u64>)> {
    let k = graph.len();
    let mut pos: Vec<Option<usize>> = vec![None; k];
    let states = traj.states();
    let mut stack: Vec<usize> = vec![states[0]];
    pos[states[0]] = Some(0);
    let mut cycles: BTreeMap<Cycle, u64> = BTreeMap::new();
    for &v in &states[1..] {
        if !graph.has_step(*stack.last().unwrap(), v) {
            return Err(Error::InvalidTrajectory {
                from: graph.label(*stack.last().unwrap()).to_string(),
                to: graph.label(v).to_string(),
            });
        }
        match pos[v] {
            Some(h) => {
                let cycle = Cycle::canonical(stack[h..].to_vec());
                *cycles.entry(cycle).or_insert(0) += 1;
                for &u in &stack[h + 1..] {
                    pos[u] = None;
                }
                stack.truncate(h + 1);
            }
            None => {
                pos[v] = Some(stack.len());
                stack.push(v);
            }
        }
    }
    let remainder = Trajectory::new(graph, stack)?;
    Ok((remainder, cycles))
}

/// Cycle counts under three conventions: oriented rotation classes,
/// orientation-free classes (a cycle identified with its reversal), and the
/// undirected reading (loops plus orientation-free cycles of length >= 3;
/// a 2-cycle is just an edge there).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCensus {
    pub oriented_by_length: BTreeMap<usize, usize>,
    pub unoriented_by_length: BTreeMap<usize, usize>,
    pub undirected_by_length: BTreeMap<usize, usize>,
}

impl CycleCensus {
    pub fn oriented_total(&self) -> usize {
        self.oriented_by_length.values().sum()
    }

    pub fn unoriented_total(&self) -> usize {
        self.unoriented_by_length.values().sum()
    }

    pub fn undirected_total(&self) -> usize {
        self.undirected_by_length.values().sum()
    }
}

pub fn cycle_census(graph: &TransitionGraph, max_candidates: usize) -> Result<CycleCensus> {
    let cycles = enumerate_cycles(graph, max_candidates)?;
    let mut oriented: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &cycles {
        *oriented.entry(c.len()).or_insert(0) += 1;
    }
    let mut unoriented: BTreeMap<usize, usize> = BTreeMap::new();
    let mut seen: std::collections::HashSet<&Cycle> = std::collections::HashSet::new();
    let mut reps: Vec<&Cycle> = Vec::new();
    for c in &cycles {
        if seen.contains(c) {
            continue;
        }
        reps.push(c);
        seen.insert(c);
        let r = c.reversed();
        if let Some(twin) = cycles.iter().find(|x| **x == r) {
            seen.insert(twin);
        }
    }
    for c in &reps {
        *unoriented.entry(c.len()).or_insert(0) += 1;
    }
    let undirected: BTreeMap<usize, usize> = unoriented
        .iter()
        .filter(|(len, _)| **len != 2)
        .map(|(len, n)| (*len, *n))
        .collect();
    Ok(CycleCensus {
        oriented_by_length: oriented,
        unoriented_by_length: unoriented,
        undirected_by_length: undirected,
    })
}
