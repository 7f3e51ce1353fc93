//! Hilbert bases of `{y in Z_{>=0}^n : K y = 0}` and Graver bases of integer
//! lattices. Both run completion procedures with a hard candidate budget and
//! report [`Error::EnumerationBudgetExceeded`] instead of truncating.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{normalize_sign, rational_rank, IntMatrix};

/// Default candidate budget for the completion loops.
pub const DEFAULT_MAX_CANDIDATES: usize = 1_000_000;

/// Ambient-dimension cap for Graver computations. The completion degrades
/// quickly with dimension; anything above this is almost certainly a mistake
/// at the scales this crate targets.
pub const GRAVER_DIM_CAP: usize = 24;

/// `z1` is conformally smaller than `z2`: componentwise, signs agree (no
/// cancellation) and magnitudes do not exceed.
pub fn conformal(z1: &[BigInt], z2: &[BigInt]) -> Result<bool> {
    if z1.len() != z2.len() {
        return Err(Error::DimensionMismatch(format!(
            "conformal: {} vs {}",
            z1.len(),
            z2.len()
        )));
    }
    Ok(z1.iter().zip(z2).all(|(a, b)| {
        (a.sign() * b.sign()) != num_bigint::Sign::Minus && a.abs() <= b.abs()
    }))
}

/// A set of linearly independent integer vectors generating a lattice.
#[derive(Debug, Clone)]
pub struct LatticeBasis {
    ambient_dim: usize,
    vectors: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    pub fn new(ambient_dim: usize, vectors: Vec<Vec<BigInt>>) -> Result<Self> {
        for v in &vectors {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "lattice vector length {} vs ambient {}",
                    v.len(),
                    ambient_dim
                )));
            }
        }
        let rat: Vec<_> = vectors
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| num_rational::BigRational::from_integer(x.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        if rational_rank(&rat) != vectors.len() {
            return Err(Error::InvalidModel(
                "lattice basis vectors are linearly dependent".into(),
            ));
        }
        Ok(LatticeBasis { ambient_dim, vectors })
    }

    /// Lattice generated by the rows of `m` (basis extracted via HNF).
    pub fn from_row_span(m: &IntMatrix) -> Self {
        LatticeBasis {
            ambient_dim: m.cols(),
            vectors: m.row_lattice_basis(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }
}

/// Minimal generating set of `{y in Z_{>=0}^n : K y = 0}` for `K` spanning the
/// rational kernel of a model matrix, with the all-ones vector (always present
/// when the model has a constant row) stripped; the closure operation puts it
/// back as row zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertBasis {
    ambient_dim: usize,
    vectors: Vec<Vec<BigInt>>,
}

impl HilbertBasis {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }
}

/// One Graver basis element, reported up to sign with the first nonzero entry
/// positive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GraverElement {
    pub vector: Vec<BigInt>,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).fold(BigInt::zero(), |s, v| s + v)
}

/// Shorten lattice generators by repeated integer projections (size
/// reduction, no swap step). Unimodular row operations only, so the row
/// lattice is unchanged; the completion loops branch far less from short
/// generators. Terminates: every accepted update strictly decreases an
/// integer norm.
fn reduce_generators(mut b: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    use num_integer::Integer;
    let norm = |v: &[BigInt]| dot(v, v);
    let mut changed = true;
    while changed {
        changed = false;
        b.sort_by_cached_key(|r| norm(r));
        for i in 0..b.len() {
            for j in 0..b.len() {
                if i == j {
                    continue;
                }
                let nj = norm(&b[j]);
                if nj.is_zero() {
                    continue;
                }
                let dij = dot(&b[i], &b[j]);
                // Round dij/nj to the nearest integer (nj > 0).
                let two = BigInt::from(2);
                let q = (&dij * &two + &nj).div_floor(&(&nj * &two));
                if q.is_zero() {
                    continue;
                }
                let cand: Vec<BigInt> =
                    b[i].iter().zip(&b[j]).map(|(a, c)| a - &q * c).collect();
                if norm(&cand) < norm(&b[i]) {
                    b[i] = cand;
                    changed = true;
                }
            }
        }
    }
    b
}

/// Hilbert basis of the monoid `Z_{>=0}^n  ∩  RowSpan_Q(a)`, computed as the
/// minimal nonzero solutions of `K y = 0, y >= 0` where `K` is a basis of the
/// integer kernel of `a`. Completion in degree order (Contejean-Devie
/// branching rule `<K y, K e_j> < 0`), pruning against solutions already
/// found. Requires a constant all-ones first row so the all-ones vector is a
/// monoid element; that vector is removed from the returned set.
pub fn hilbert_basis_of_span(a: &IntMatrix, max_candidates: usize) -> Result<HilbertBasis> {
    let n = a.cols();
    if n == 0 {
        return Err(Error::InvalidModel("matrix has no columns".into()));
    }
    if !(0..n).all(|j| a.get(0, j) == &BigInt::from(1)) {
        return Err(Error::InvalidModel(
            "first row must be constant one; the monoid needs the all-ones element".into(),
        ));
    }
    let kernel = reduce_generators(a.integer_kernel_basis());
    let k = IntMatrix::from_rows(&kernel)?;
    let krows = k.rows();

    // Columns K e_j of the kernel matrix.
    let kcols: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..krows).map(|i| k.get(i, j).clone()).collect())
        .collect();

    // With kernel entries and the budget both below 2^31, every intermediate
    // fits: y entries stay <= candidates < 2^31, so |(K y)_i| < 2^62 and the
    // branching dot products fit in i128. Fall back to big integers otherwise.
    let small_bound = BigInt::from(1i64 << 31);
    let small = max_candidates < (1usize << 31)
        && kcols
            .iter()
            .all(|col| col.iter().all(|x| x.abs() < small_bound));
    let solutions: Vec<Vec<BigInt>> = if small {
        let kcols_small: Vec<Vec<i64>> = kcols
            .iter()
            .map(|col| col.iter().map(|x| x.try_into().unwrap()).collect())
            .collect();
        completion_i64(n, &kcols_small, max_candidates)?
            .into_iter()
            .map(|y| y.into_iter().map(BigInt::from).collect())
            .collect()
    } else {
        completion_bigint(n, &kcols, max_candidates)?
    };

    let ones = vec![BigInt::from(1); n];
    let mut vectors: Vec<Vec<BigInt>> = solutions.into_iter().filter(|v| *v != ones).collect();
    vectors.sort();

    // Minimality audit: the monoid is cancellative, so a non-minimal vector
    // dominates another one; the completion's degree order should already rule
    // this out.
    for i in 0..vectors.len() {
        for j in 0..vectors.len() {
            if i == j {
                continue;
            }
            if vectors[i].iter().zip(&vectors[j]).all(|(a, b)| a <= b) {
                return Err(Error::InvalidModel(format!(
                    "hilbert basis candidate {:?} dominated by {:?}",
                    vectors[j], vectors[i]
                )));
            }
        }
    }
    for v in &vectors {
        if !v.iter().any(|x| x.is_zero()) {
            return Err(Error::InvalidModel(format!(
                "hilbert basis vector {:?} has no zero coordinate",
                v
            )));
        }
    }
    Ok(HilbertBasis { ambient_dim: n, vectors })
}

fn completion_bigint(
    n: usize,
    kcols: &[Vec<BigInt>],
    max_candidates: usize,
) -> Result<Vec<Vec<BigInt>>> {
    let mut solutions: Vec<Vec<BigInt>> = Vec::new();
    let mut frontier: Vec<(Vec<BigInt>, Vec<BigInt>)> = Vec::new();
    let mut seen: HashSet<Vec<BigInt>> = HashSet::new();
    let mut candidates = 0usize;
    for j in 0..n {
        let mut y = vec![BigInt::zero(); n];
        y[j] = BigInt::from(1);
        let ky = kcols[j].clone();
        seen.insert(y.clone());
        frontier.push((y, ky));
        candidates += 1;
    }

    while !frontier.is_empty() {
        // First sweep: harvest this degree's solutions so the extension sweep
        // can prune against all of them.
        let mut remaining: Vec<(Vec<BigInt>, Vec<BigInt>)> = Vec::new();
        for (y, ky) in frontier.drain(..) {
            if ky.iter().all(|x| x.is_zero()) {
                solutions.push(y);
            } else {
                remaining.push((y, ky));
            }
        }
        let mut next: Vec<(Vec<BigInt>, Vec<BigInt>)> = Vec::new();
        for (y, ky) in remaining {
            for j in 0..n {
                if !dot(&ky, &kcols[j]).is_negative() {
                    continue;
                }
                let mut y2 = y.clone();
                y2[j] += 1;
                if seen.contains(&y2) {
                    continue;
                }
                if solutions
                    .iter()
                    .any(|s| s.iter().zip(&y2).all(|(a, b)| a <= b))
                {
                    continue;
                }
                candidates += 1;
                if candidates > max_candidates {
                    return Err(Error::EnumerationBudgetExceeded {
                        candidates,
                        cap: max_candidates,
                    });
                }
                let ky2: Vec<BigInt> =
                    ky.iter().zip(&kcols[j]).map(|(a, b)| a + b).collect();
                seen.insert(y2.clone());
                next.push((y2, ky2));
            }
        }
        frontier = next;
    }
    Ok(solutions)
}

// Same sweep in machine integers; see the bound argument at the call site.
fn completion_i64(
    n: usize,
    kcols: &[Vec<i64>],
    max_candidates: usize,
) -> Result<Vec<Vec<i64>>> {
    let mut solutions: Vec<Vec<i64>> = Vec::new();
    let mut frontier: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut candidates = 0usize;
    for j in 0..n {
        let mut y = vec![0i64; n];
        y[j] = 1;
        seen.insert(y.clone());
        frontier.push((y, kcols[j].clone()));
        candidates += 1;
    }

    while !frontier.is_empty() {
        let mut remaining: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
        for (y, ky) in frontier.drain(..) {
            if ky.iter().all(|&x| x == 0) {
                solutions.push(y);
            } else {
                remaining.push((y, ky));
            }
        }
        let mut next: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
        for (y, ky) in remaining {
            for j in 0..n {
                let d: i128 = ky
                    .iter()
                    .zip(&kcols[j])
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum();
                if d >= 0 {
                    continue;
                }
                let mut y2 = y.clone();
                y2[j] += 1;
                if seen.contains(&y2) {
                    continue;
                }
                if solutions
                    .iter()
                    .any(|s| s.iter().zip(&y2).all(|(a, b)| a <= b))
                {
                    continue;
                }
                candidates += 1;
                if candidates > max_candidates {
                    return Err(Error::EnumerationBudgetExceeded {
                        candidates,
                        cap: max_candidates,
                    });
                }
                let ky2: Vec<i64> = ky.iter().zip(&kcols[j]).map(|(a, b)| a + b).collect();
                seen.insert(y2.clone());
                next.push((y2, ky2));
            }
        }
        frontier = next;
    }
    Ok(solutions)
}

fn conformal_le(a: &[BigInt], b: &[BigInt]) -> bool {
    a.iter().zip(b).all(|(x, y)| {
        (x.sign() * y.sign()) != num_bigint::Sign::Minus && x.abs() <= y.abs()
    })
}

fn normal_form(mut r: Vec<BigInt>, g: &[Vec<BigInt>]) -> Vec<BigInt> {
    'outer: loop {
        if r.iter().all(|x| x.is_zero()) {
            return r;
        }
        for h in g {
            if conformal_le(h, &r) {
                for (x, y) in r.iter_mut().zip(h) {
                    *x -= y;
                }
                continue 'outer;
            }
        }
        return r;
    }
}

/// Graver basis: all conformally minimal nonzero elements of the lattice, up
/// to sign. Completion a la Pottier: close `{±basis}` under "sum, then reduce
/// conformally"; minimize at the end.
pub fn graver_basis(l: &LatticeBasis, max_candidates: usize) -> Result<Vec<GraverElement>> {
    let n = l.ambient_dim();
    if n > GRAVER_DIM_CAP {
        return Err(Error::AmbientDimensionTooLarge { dim: n, cap: GRAVER_DIM_CAP });
    }
    let mut g: Vec<Vec<BigInt>> = Vec::new();
    let mut in_g: HashSet<Vec<BigInt>> = HashSet::new();
    let mut queue: VecDeque<Vec<BigInt>> = VecDeque::new();
    let push = |v: Vec<BigInt>,
                    g: &mut Vec<Vec<BigInt>>,
                    in_g: &mut HashSet<Vec<BigInt>>,
                    queue: &mut VecDeque<Vec<BigInt>>| {
        if v.iter().all(|x| x.is_zero()) || in_g.contains(&v) {
            return;
        }
        for h in g.iter() {
            let s: Vec<BigInt> = h.iter().zip(&v).map(|(a, b)| a + b).collect();
            queue.push_back(s);
        }
        in_g.insert(v.clone());
        g.push(v);
    };

    for v in reduce_generators(l.vectors().to_vec()) {
        push(v.iter().map(|x| -x.clone()).collect(), &mut g, &mut in_g, &mut queue);
        push(v, &mut g, &mut in_g, &mut queue);
    }

    let mut processed = 0usize;
    while let Some(s) = queue.pop_front() {
        processed += 1;
        if processed > max_candidates || g.len() > max_candidates {
            return Err(Error::EnumerationBudgetExceeded {
                candidates: processed,
                cap: max_candidates,
            });
        }
        let r = normal_form(s, &g);
        push(r, &mut g, &mut in_g, &mut queue);
    }

    // Keep the conformally minimal elements, one representative per ± pair.
    let mut minimal: Vec<Vec<BigInt>> = Vec::new();
    for (i, v) in g.iter().enumerate() {
        let dominated = g
            .iter()
            .enumerate()
            .any(|(j, h)| j != i && conformal_le(h, v));
        if !dominated {
            minimal.push(v.clone());
        }
    }
    let mut out: Vec<GraverElement> = minimal
        .into_iter()
        .map(|v| GraverElement { vector: normalize_sign(v) })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn biv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| bi(x)).collect()
    }

    #[test]
    fn conformal_basics() {
        assert!(conformal(&biv(&[1, 0, -1]), &biv(&[2, 0, -3])).unwrap());
        assert!(!conformal(&biv(&[1, 0, 1]), &biv(&[2, 0, -3])).unwrap());
        assert!(!conformal(&biv(&[3, 0, 0]), &biv(&[2, 0, 0])).unwrap());
        // Reflexive, and zero is below everything.
        assert!(conformal(&biv(&[1, -2]), &biv(&[1, -2])).unwrap());
        assert!(conformal(&biv(&[0, 0]), &biv(&[1, -2])).unwrap());
    }

    #[test]
    fn hilbert_basis_of_binomial_model() {
        let a = IntMatrix::from_i64_rows(&[vec![1; 6], vec![0, 1, 2, 3, 4, 5]]).unwrap();
        let h = hilbert_basis_of_span(&a, DEFAULT_MAX_CANDIDATES).unwrap();
        assert_eq!(
            h.vectors(),
            &[biv(&[0, 1, 2, 3, 4, 5]), biv(&[5, 4, 3, 2, 1, 0])]
        );
    }

    #[test]
    fn hilbert_basis_of_saturated_model_is_unit_vectors() {
        // Full-column-rank model (the whole simplex): empty kernel system, so
        // every unit vector is minimal.
        let a = IntMatrix::from_i64_rows(&[vec![1, 1, 1], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let h = hilbert_basis_of_span(&a, DEFAULT_MAX_CANDIDATES).unwrap();
        assert_eq!(
            h.vectors(),
            &[biv(&[0, 0, 1]), biv(&[0, 1, 0]), biv(&[1, 0, 0])]
        );
    }

    #[test]
    fn hilbert_basis_of_constant_row_only() {
        // RowSpan is the constants; the only minimal monoid element is the
        // all-ones vector, which is stripped by convention.
        let a = IntMatrix::from_i64_rows(&[vec![1, 1, 1]]).unwrap();
        let h = hilbert_basis_of_span(&a, DEFAULT_MAX_CANDIDATES).unwrap();
        assert!(h.vectors().is_empty());
    }

    #[test]
    fn hilbert_budget_error() {
        let a = IntMatrix::from_i64_rows(&[vec![1; 6], vec![0, 1, 2, 3, 4, 5]]).unwrap();
        let err = hilbert_basis_of_span(&a, 10).unwrap_err();
        assert!(matches!(err, Error::EnumerationBudgetExceeded { .. }));
    }

    #[test]
    fn hilbert_minimality_brute_force() {
        // No returned vector decomposes as a sum of two nonzero monoid
        // elements: enumerate the box under each vector.
        let a = IntMatrix::from_i64_rows(&[vec![1; 6], vec![0, 1, 2, 3, 4, 5]]).unwrap();
        let kernel = IntMatrix::from_rows(&a.integer_kernel_basis()).unwrap();
        let h = hilbert_basis_of_span(&a, DEFAULT_MAX_CANDIDATES).unwrap();
        for v in h.vectors() {
            let mut stack = vec![Vec::<BigInt>::new()];
            let mut box_points: Vec<Vec<BigInt>> = Vec::new();
            while let Some(p) = stack.pop() {
                if p.len() == v.len() {
                    box_points.push(p);
                    continue;
                }
                let lim: i64 = 6;
                let mut c = BigInt::zero();
                while c <= v[p.len()] && c <= bi(lim) {
                    let mut q = p.clone();
                    q.push(c.clone());
                    stack.push(q);
                    c += 1;
                }
            }
            for u in &box_points {
                if u.iter().all(|x| x.is_zero()) || u == v {
                    continue;
                }
                let in_monoid = kernel
                    .mul_vec(u)
                    .unwrap()
                    .iter()
                    .all(|x| x.is_zero());
                if in_monoid {
                    let w: Vec<BigInt> = v.iter().zip(u).map(|(a, b)| a - b).collect();
                    let w_in_monoid = kernel
                        .mul_vec(&w)
                        .unwrap()
                        .iter()
                        .all(|x| x.is_zero());
                    assert!(
                        !w_in_monoid || w.iter().all(|x| x.is_zero()),
                        "vector {:?} splits as {:?} + {:?}",
                        v,
                        u,
                        w
                    );
                }
            }
        }
    }

    #[test]
    fn graver_of_rank_one_lattice() {
        let l = LatticeBasis::new(3, vec![biv(&[1, 1, -1])]).unwrap();
        let g = graver_basis(&l, DEFAULT_MAX_CANDIDATES).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].vector, biv(&[1, 1, -1]));
    }

    #[test]
    fn graver_matches_brute_force_on_triangle_flow_lattice() {
        // Circulations of the triangle on both orientations: rank one,
        // generated by the directed triangle flow. Brute force all lattice
        // vectors with max-norm <= 3 and filter the conformally minimal ones.
        let t = biv(&[1, 1, 1, -1, -1, -1]);
        let l = LatticeBasis::new(6, vec![t.clone()]).unwrap();
        let g = graver_basis(&l, DEFAULT_MAX_CANDIDATES).unwrap();
        let mut expected: Vec<Vec<BigInt>> = Vec::new();
        let members: Vec<Vec<BigInt>> = (-3i64..=3)
            .map(|c| t.iter().map(|x| x * bi(c)).collect())
            .filter(|v: &Vec<BigInt>| v.iter().any(|x| !x.is_zero()))
            .collect();
        for v in &members {
            let minimal = !members
                .iter()
                .any(|u| u != v && conformal_le(u, v));
            if minimal {
                expected.push(normalize_sign(v.clone()));
            }
        }
        expected.sort();
        expected.dedup();
        let got: Vec<Vec<BigInt>> = g.into_iter().map(|e| e.vector).collect();
        assert_eq!(got, expected);
        assert_eq!(got, vec![biv(&[1, 1, 1, -1, -1, -1])]);
    }

    #[test]
    fn graver_of_simplex_kernel_lattice() {
        // Kernel lattice of [1 1 1 1]: the unit-vector differences.
        let l = LatticeBasis::new(4, vec![biv(&[1, -1, 0, 0]), biv(&[0, 1, -1, 0]), biv(&[0, 0, 1, -1])])
            .unwrap();
        let g = graver_basis(&l, DEFAULT_MAX_CANDIDATES).unwrap();
        // Differences of unit vectors are exactly the conformally minimal
        // elements of this lattice.
        let mut expected: Vec<Vec<BigInt>> = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if i < j {
                    let mut v = vec![bi(0); 4];
                    v[i] = bi(1);
                    v[j] = bi(-1);
                    expected.push(v);
                }
            }
        }
        expected.sort();
        let got: Vec<Vec<BigInt>> = g.into_iter().map(|e| e.vector).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn graver_dimension_cap() {
        let l = LatticeBasis::new(25, vec![]).unwrap();
        assert!(matches!(
            graver_basis(&l, DEFAULT_MAX_CANDIDATES),
            Err(Error::AmbientDimensionTooLarge { .. })
        ));
    }
}
