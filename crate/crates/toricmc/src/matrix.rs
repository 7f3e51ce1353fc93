//! Arbitrary-precision integer matrices and the exact linear algebra the rest
//! of the crate is built on: Hermite normal form with a unimodular transform,
//! saturated integer kernel bases, and rational rank / span / determinant
//! routines. No floating point enters here.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix over `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<BigInt>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    r.len(),
                    ncols
                )));
            }
        }
        Ok(IntMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.iter().flatten().cloned().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let big: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(&big)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![BigInt::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigInt::one();
        }
        IntMatrix { rows: n, cols: n, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.row(i).to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.get(k, j);
                    let cur = out.get(i, j) + add;
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    /// Multiply by a column vector.
    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} cols, vector has {}",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .fold(BigInt::zero(), |acc, x| acc + x)
            })
            .collect())
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(|x| x.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    /// row_a -= q * row_b
    fn sub_scaled_row(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(a, j) - q * self.get(b, j);
            self.set(a, j, v);
        }
    }

    /// Row-style Hermite normal form. Returns `(H, U)` with `U * self = H`,
    /// `U` unimodular, `H` in row echelon with positive pivots and entries
    /// above each pivot reduced into `[0, pivot)`. Zero rows sink to the
    /// bottom.
    pub fn hermite_normal_form(&self) -> (IntMatrix, IntMatrix) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut pivot_row = 0usize;
        for col in 0..self.cols {
            if pivot_row >= self.rows {
                break;
            }
            loop {
                // Bring the entry of least magnitude in this column to the
                // pivot position, then reduce everything below it.
                let mut best: Option<usize> = None;
                for i in pivot_row..self.rows {
                    if h.get(i, col).is_zero() {
                        continue;
                    }
                    best = match best {
                        None => Some(i),
                        Some(b) if h.get(i, col).abs() < h.get(b, col).abs() => Some(i),
                        keep => keep,
                    };
                }
                let Some(b) = best else { break };
                h.swap_rows(pivot_row, b);
                u.swap_rows(pivot_row, b);
                if h.get(pivot_row, col).is_negative() {
                    h.negate_row(pivot_row);
                    u.negate_row(pivot_row);
                }
                let pivot = h.get(pivot_row, col).clone();
                let mut clean = true;
                for i in pivot_row + 1..self.rows {
                    if h.get(i, col).is_zero() {
                        continue;
                    }
                    let q = h.get(i, col).div_floor(&pivot);
                    h.sub_scaled_row(i, pivot_row, &q);
                    u.sub_scaled_row(i, pivot_row, &q);
                    if !h.get(i, col).is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
            if !h.get(pivot_row, col).is_zero() {
                let pivot = h.get(pivot_row, col).clone();
                for i in 0..pivot_row {
                    let q = h.get(i, col).div_floor(&pivot);
                    h.sub_scaled_row(i, pivot_row, &q);
                    u.sub_scaled_row(i, pivot_row, &q);
                }
                pivot_row += 1;
            }
        }
        (h, u)
    }

    /// Rank over `Q` (= number of nonzero HNF rows).
    pub fn rank(&self) -> usize {
        let (h, _) = self.hermite_normal_form();
        (0..h.rows).filter(|&i| !h.is_zero_row(i)).count()
    }

    /// Basis of the saturated kernel lattice `{k in Z^cols : self * k = 0}`.
    /// Vectors are sign-normalized (first nonzero entry positive) and sorted
    /// lexicographically. The count is `cols - rank`.
    pub fn integer_kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let t = self.transpose();
        let (h, u) = t.hermite_normal_form();
        let mut out: Vec<Vec<BigInt>> = Vec::new();
        for i in 0..h.rows() {
            if h.is_zero_row(i) {
                out.push(normalize_sign(u.row_vec(i)));
            }
        }
        out.sort();
        out
    }

    /// Basis of the lattice generated by the rows of `self` (the nonzero rows
    /// of its HNF; row operations are unimodular so the row lattice is
    /// unchanged).
    pub fn row_lattice_basis(&self) -> Vec<Vec<BigInt>> {
        let (h, _) = self.hermite_normal_form();
        (0..h.rows())
            .filter(|&i| !h.is_zero_row(i))
            .map(|i| h.row_vec(i))
            .collect()
    }

    /// Does `v` lie in the lattice generated by the rows of `self`?
    pub fn row_lattice_contains(&self, v: &[BigInt]) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} vs {} columns",
                v.len(),
                self.cols
            )));
        }
        let (h, _) = self.hermite_normal_form();
        let mut rem = v.to_vec();
        for i in 0..h.rows() {
            if h.is_zero_row(i) {
                break;
            }
            let pcol = (0..h.cols()).find(|&j| !h.get(i, j).is_zero()).unwrap();
            if rem[pcol].is_zero() {
                continue;
            }
            let (q, r) = rem[pcol].div_rem(h.get(i, pcol));
            if !r.is_zero() {
                return Ok(false);
            }
            for j in 0..h.cols() {
                let x = &rem[j] - &q * h.get(i, j);
                rem[j] = x;
            }
        }
        Ok(rem.iter().all(|x| x.is_zero()))
    }

    pub fn to_rational_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| BigRational::from_integer(x.clone()))
                    .collect()
            })
            .collect()
    }

    /// Exact determinant of a square matrix.
    pub fn det_rational(&self) -> Result<BigRational> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "determinant of {}x{}",
                self.rows, self.cols
            )));
        }
        let mut m = self.to_rational_rows();
        let n = self.rows;
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
                return Ok(BigRational::zero());
            };
            if p != col {
                m.swap(p, col);
                det = -det;
            }
            let pivot = m[col][col].clone();
            det *= &pivot;
            for i in col + 1..n {
                if m[i][col].is_zero() {
                    continue;
                }
                let f = &m[i][col] / &pivot;
                for j in col..n {
                    let x = &m[i][j] - &f * &m[col][j];
                    m[i][j] = x;
                }
            }
        }
        Ok(det)
    }
}

/// Flip the sign so the first nonzero entry is positive.
pub fn normalize_sign(mut v: Vec<BigInt>) -> Vec<BigInt> {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
    v
}

/// In-place reduced row echelon form over `Q`; returns the rank.
pub fn rref_rational(m: &mut Vec<Vec<BigRational>>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let rows = m.len();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        let Some(p) = (pivot_row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let pivot = m[pivot_row][col].clone();
        for x in m[pivot_row].iter_mut() {
            *x /= pivot.clone();
        }
        for i in 0..rows {
            if i == pivot_row || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..cols {
                let x = &m[i][j] - &f * &m[pivot_row][j];
                m[i][j] = x;
            }
        }
        pivot_row += 1;
    }
    pivot_row
}

pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m = rows.to_vec();
    rref_rational(&mut m)
}

/// Is `v` in the rational row span of `rows`?
pub fn row_span_contains(rows: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    let base = rational_rank(rows);
    let mut stacked = rows.to_vec();
    stacked.push(v.to_vec());
    rational_rank(&stacked) == base
}

/// Equality of rational row spans.
pub fn spans_equal(a: &IntMatrix, b: &IntMatrix) -> Result<bool> {
    if a.cols() != b.cols() {
        return Err(Error::SampleSpaceMismatch(format!(
            "{} vs {} sample points",
            a.cols(),
            b.cols()
        )));
    }
    let ra = a.to_rational_rows();
    let rb = b.to_rational_rows();
    let rank_a = rational_rank(&ra);
    let rank_b = rational_rank(&rb);
    if rank_a != rank_b {
        return Ok(false);
    }
    let mut stacked = ra;
    stacked.extend(rb);
    Ok(rational_rank(&stacked) == rank_a)
}

/// Solve `A c = b` exactly; `A` square. Errors when singular.
pub fn solve_linear_rational(
    a: &[Vec<BigRational>],
    b: &[BigRational],
) -> Result<Vec<BigRational>> {
    let n = a.len();
    if n == 0 || a[0].len() != n || b.len() != n {
        return Err(Error::DimensionMismatch("solve_linear_rational".into()));
    }
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return Err(Error::SingularSystem);
        };
        m.swap(p, col);
        let pivot = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x /= pivot.clone();
        }
        for i in 0..n {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in col..=n {
                let x = &m[i][j] - &f * &m[col][j];
                m[i][j] = x;
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn hnf_of_rank_one_matrix() {
        let m = IntMatrix::from_i64_rows(&[vec![2, 4], vec![1, 2]]).unwrap();
        let (h, u) = m.hermite_normal_form();
        assert_eq!(u.mul(&m).unwrap(), h);
        assert_eq!(h.row_vec(0), vec![bi(1), bi(2)]);
        assert!(h.is_zero_row(1));
        assert_eq!(u.det_rational().unwrap().abs(), BigRational::one());
    }

    #[test]
    fn hnf_identity_fixed_point() {
        let m = IntMatrix::identity(3);
        let (h, u) = m.hermite_normal_form();
        assert_eq!(h, IntMatrix::identity(3));
        assert_eq!(u, IntMatrix::identity(3));
    }

    #[test]
    fn hnf_rank_of_binomial_matrix() {
        let m = IntMatrix::from_i64_rows(&[vec![1; 6], vec![0, 1, 2, 3, 4, 5]]).unwrap();
        // Oracle: rational row reduction.
        assert_eq!(rational_rank(&m.to_rational_rows()), 2);
        assert_eq!(m.rank(), 2);
        let (h, u) = m.hermite_normal_form();
        assert_eq!(u.mul(&m).unwrap(), h);
    }

    #[test]
    fn kernel_of_full_rank_square_is_empty() {
        let m = IntMatrix::from_i64_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        assert!(m.integer_kernel_basis().is_empty());
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = IntMatrix::from_i64_rows(&[vec![1; 6], vec![0, 1, 2, 3, 4, 5]]).unwrap();
        let k = m.integer_kernel_basis();
        assert_eq!(k.len(), 4);
        for v in &k {
            assert!(m.mul_vec(v).unwrap().iter().all(|x| x.is_zero()));
        }
        // Second-difference vectors lie in the integer span of the basis.
        let basis = IntMatrix::from_rows(&k).unwrap();
        for s in 0..4 {
            let mut d = vec![bi(0); 6];
            d[s] = bi(1);
            d[s + 1] = bi(-2);
            d[s + 2] = bi(1);
            assert!(basis.row_lattice_contains(&d).unwrap());
        }
    }

    #[test]
    fn kernel_is_saturated_on_small_random_matrices() {
        // Deterministic pseudo-random small matrices; brute-force all integer
        // kernel vectors with entries in [-5,5] and confirm each lies in the
        // integer span of the returned basis.
        let mut state = 0x243f6a88u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 7) as i64 - 3
        };
        for _ in 0..20 {
            let rows: Vec<Vec<i64>> = (0..2).map(|_| (0..4).map(|_| next()).collect()).collect();
            let m = IntMatrix::from_i64_rows(&rows).unwrap();
            let k = m.integer_kernel_basis();
            assert_eq!(k.len(), 4 - m.rank());
            let basis = IntMatrix::from_rows(&k).unwrap();
            for a in -5i64..=5 {
                for b in -5i64..=5 {
                    for c in -5i64..=5 {
                        for d in -5i64..=5 {
                            let v = vec![bi(a), bi(b), bi(c), bi(d)];
                            let img = m.mul_vec(&v).unwrap();
                            if img.iter().all(|x| x.is_zero()) {
                                assert!(
                                    basis.row_lattice_contains(&v).unwrap(),
                                    "saturation failed for {:?} on {:?}",
                                    v,
                                    rows
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn interaction_kernel_of_seven_row_design() {
        // 7x8 model matrix for three binary factors with all pairwise
        // interactions: kernel is spanned by the three-way interaction.
        let m = IntMatrix::from_i64_rows(&[
            vec![1, 1, 1, 1, 1, 1, 1, 1],
            vec![0, 1, 0, 1, 0, 1, 0, 1],
            vec![0, 0, 1, 1, 0, 0, 1, 1],
            vec![0, 0, 0, 0, 1, 1, 1, 1],
            vec![0, 1, 1, 0, 0, 1, 1, 0],
            vec![0, 1, 0, 1, 1, 0, 1, 0],
            vec![0, 0, 1, 1, 1, 1, 0, 0],
        ])
        .unwrap();
        let k = m.integer_kernel_basis();
        assert_eq!(k.len(), 1);
        let expect: Vec<BigInt> = [1, -1, -1, 1, -1, 1, 1, -1].iter().map(|&x| bi(x)).collect();
        assert_eq!(k[0], expect);
    }

    #[test]
    fn span_equality_and_containment() {
        let a = IntMatrix::from_i64_rows(&[vec![1, 1, 1], vec![0, 1, 2]]).unwrap();
        let b = IntMatrix::from_i64_rows(&[vec![1, 1, 1], vec![0, 1, 2], vec![2, 1, 0]]).unwrap();
        assert!(spans_equal(&a, &b).unwrap());
        let c = IntMatrix::from_i64_rows(&[vec![1, 0, 0]]).unwrap();
        assert!(!spans_equal(&a, &c).unwrap());
    }

    #[test]
    fn solve_rational_roundtrip() {
        let a: Vec<Vec<BigRational>> =
            IntMatrix::from_i64_rows(&[vec![2, 1], vec![1, 3]]).unwrap().to_rational_rows();
        let b = vec![
            BigRational::from_integer(bi(5)),
            BigRational::from_integer(bi(10)),
        ];
        let x = solve_linear_rational(&a, &b).unwrap();
        assert_eq!(x[0], BigRational::new(bi(1), bi(1)));
        assert_eq!(x[1], BigRational::new(bi(3), bi(1)));
    }
}
