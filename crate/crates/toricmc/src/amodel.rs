//! Monomial models: `q(x;t) = prod_i t_i^{A_i(x)}` against a positive base
//! measure `mu` on a finite sample space, with the convention `0^0 = 1`.
//! Row zero of the model matrix is constant one, so densities never depend on
//! `t_0` after normalization.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{graver_basis, hilbert_basis_of_span, GraverElement, LatticeBasis};
use crate::matrix::{spans_equal, IntMatrix};

/// Log-linear model: nonnegative integer matrix with a constant first row,
/// plus a strictly positive weight per sample point.
#[derive(Debug, Clone)]
pub struct AModel {
    matrix: IntMatrix,
    mu: Vec<BigRational>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

/// Density values relative to the model's base measure: `sum_x p(x) mu(x) = 1`.
#[derive(Debug, Clone)]
pub struct Density {
    pub values: Vec<f64>,
}

impl Density {
    /// Indices with strictly positive density.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// A difference of two monomials `prod_a v_a^{plus_a} - prod_a v_a^{minus_a}`
/// with disjoint supports, derived from an integer kernel vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Binomial {
    pub plus: Vec<BigInt>,
    pub minus: Vec<BigInt>,
}

impl Binomial {
    pub fn from_kernel_vector(k: &[BigInt]) -> Self {
        let plus = k
            .iter()
            .map(|x| if x.is_positive() { x.clone() } else { BigInt::zero() })
            .collect();
        let minus = k
            .iter()
            .map(|x| if x.is_negative() { -x.clone() } else { BigInt::zero() })
            .collect();
        Binomial { plus, minus }
    }

    /// `plus - minus` as a signed vector.
    pub fn exponent(&self) -> Vec<BigInt> {
        self.plus.iter().zip(&self.minus).map(|(p, m)| p - m).collect()
    }

    /// Total degree of each side agrees (automatic when the kernel vector is
    /// orthogonal to a constant row).
    pub fn is_homogeneous(&self) -> bool {
        let s: BigInt = self.plus.iter().fold(BigInt::zero(), |a, x| a + x);
        let t: BigInt = self.minus.iter().fold(BigInt::zero(), |a, x| a + x);
        s == t
    }

    fn monomial(exps: &[BigInt], v: &[f64]) -> f64 {
        exps.iter()
            .zip(v)
            .map(|(e, x)| pow_f64(*x, e))
            .product()
    }

    pub fn evaluate(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.plus.len() {
            return Err(Error::DimensionMismatch(format!(
                "binomial on {} variables evaluated at {} values",
                self.plus.len(),
                v.len()
            )));
        }
        Ok(Self::monomial(&self.plus, v) - Self::monomial(&self.minus, v))
    }

    /// Does the binomial vanish at `v`, relative to the monomial scale?
    pub fn check(&self, v: &[f64], tol: f64) -> Result<bool> {
        if v.len() != self.plus.len() {
            return Err(Error::DimensionMismatch(format!(
                "binomial on {} variables checked at {} values",
                self.plus.len(),
                v.len()
            )));
        }
        let m1 = Self::monomial(&self.plus, v);
        let m2 = Self::monomial(&self.minus, v);
        let scale = 1f64.max(m1.abs()).max(m2.abs());
        Ok((m1 - m2).abs() <= tol * scale)
    }
}

/// `x^e` with the convention `0^0 = 1`; `e` is a nonnegative integer.
pub(crate) fn pow_f64(x: f64, e: &BigInt) -> f64 {
    if e.is_zero() {
        return 1.0;
    }
    let n = e.to_i32().expect("exponent fits i32");
    x.powi(n)
}

fn ln_checked(x: f64, what: &str) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::NonPositiveParameter(what.to_string()));
    }
    Ok(x.ln())
}

/// Relative sup-norm distance between two vectors.
pub(crate) fn rel_sup_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = a
        .iter()
        .chain(b)
        .fold(0f64, |acc, x| acc.max(x.abs()))
        .max(1e-300);
    a.iter()
        .zip(b)
        .fold(0f64, |acc, (x, y)| acc.max((x - y).abs()))
        / scale
}

impl AModel {
    pub fn new(matrix: IntMatrix, mu: Vec<BigRational>) -> Result<Self> {
        Self::with_labels(matrix, mu, None, None)
    }

    pub fn with_labels(
        matrix: IntMatrix,
        mu: Vec<BigRational>,
        row_labels: Option<Vec<String>>,
        col_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return Err(Error::InvalidModel("model matrix is empty".into()));
        }
        for j in 0..matrix.cols() {
            if matrix.get(0, j) != &BigInt::one() {
                return Err(Error::InvalidModel(
                    "first matrix row must be constant one".into(),
                ));
            }
        }
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                if matrix.get(i, j).is_negative() {
                    return Err(Error::InvalidModel(format!(
                        "negative exponent at ({}, {})",
                        i, j
                    )));
                }
            }
        }
        if mu.len() != matrix.cols() {
            return Err(Error::InvalidModel(format!(
                "mu has {} entries for {} sample points",
                mu.len(),
                matrix.cols()
            )));
        }
        if mu.iter().any(|m| !m.is_positive()) {
            return Err(Error::InvalidModel("mu must be strictly positive".into()));
        }
        if let Some(rl) = &row_labels {
            if rl.len() != matrix.rows() {
                return Err(Error::InvalidModel("row label count mismatch".into()));
            }
        }
        if let Some(cl) = &col_labels {
            if cl.len() != matrix.cols() {
                return Err(Error::InvalidModel("column label count mismatch".into()));
            }
        }
        Ok(AModel { matrix, mu, row_labels, col_labels })
    }

    /// Counting measure.
    pub fn with_uniform_weights(matrix: IntMatrix) -> Result<Self> {
        let mu = vec![BigRational::one(); matrix.cols()];
        Self::new(matrix, mu)
    }

    /// `mu(x) = C(n, x)` for the model on `{0, .., n}`; the weight that makes
    /// the one-parameter power model a binomial family.
    pub fn with_binomial_weights(matrix: IntMatrix) -> Result<Self> {
        let n = matrix.cols() - 1;
        let mu = (0..=n)
            .map(|k| BigRational::from_integer(binomial_coefficient(n, k)))
            .collect();
        Self::new(matrix, mu)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn mu(&self) -> &[BigRational] {
        &self.mu
    }

    pub fn mu_f64(&self) -> Vec<f64> {
        self.mu.iter().map(|m| m.to_f64().unwrap()).collect()
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    /// Number of sample points.
    pub fn points(&self) -> usize {
        self.matrix.cols()
    }

    /// Number of parameters (matrix rows, including the constant row).
    pub fn param_len(&self) -> usize {
        self.matrix.rows()
    }

    fn check_param(&self, t: &[f64]) -> Result<()> {
        if t.len() != self.param_len() {
            return Err(Error::DimensionMismatch(format!(
                "parameter point has {} coordinates, model has {} rows",
                t.len(),
                self.param_len()
            )));
        }
        if t.iter().any(|x| *x < 0.0 || !x.is_finite()) {
            return Err(Error::NonPositiveParameter(
                "parameter coordinates must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// `q(x;t) = prod_i t_i^{A_i(x)}`, `0^0 = 1`. Zero coordinates are
    /// allowed; a parameter that kills every point is degenerate.
    pub fn unnormalized_density(&self, t: &[f64]) -> Result<Vec<f64>> {
        self.check_param(t)?;
        let q: Vec<f64> = (0..self.points())
            .map(|x| {
                (0..self.param_len())
                    .map(|i| pow_f64(t[i], self.matrix.get(i, x)))
                    .product()
            })
            .collect();
        if q.iter().all(|v| *v == 0.0) {
            return Err(Error::DegenerateParameter);
        }
        Ok(q)
    }

    /// Normalized density with respect to `mu`: `p = q / Z`,
    /// `Z = sum_x q(x) mu(x)`.
    pub fn density(&self, t: &[f64]) -> Result<Density> {
        let q = self.unnormalized_density(t)?;
        let mu = self.mu_f64();
        let z: f64 = q.iter().zip(&mu).map(|(a, b)| a * b).sum();
        if z <= 0.0 {
            return Err(Error::DegenerateParameter);
        }
        Ok(Density { values: q.iter().map(|v| v / z).collect() })
    }

    /// Do `s` and `t` give the same density? Checked two ways: directly on
    /// the normalized densities, and through the log-parameter criterion
    /// (`(log t - log s)` applied to the matrix must be a constant function
    /// on the sample space; the constant soaks up the normalization, and may
    /// be zero). Both verdicts are returned by [`AModel::confounded_detail`];
    /// this method requires the interior (strictly positive parameters) and
    /// returns the direct comparison.
    pub fn confounded(&self, s: &[f64], t: &[f64], tol: f64) -> Result<bool> {
        Ok(self.confounded_detail(s, t, tol)?.0)
    }

    /// (direct density comparison, log-linear criterion)
    pub fn confounded_detail(&self, s: &[f64], t: &[f64], tol: f64) -> Result<(bool, bool)> {
        self.check_param(s)?;
        self.check_param(t)?;
        let delta: Vec<f64> = s
            .iter()
            .zip(t)
            .enumerate()
            .map(|(i, (a, b))| {
                Ok(ln_checked(*b, &format!("t[{}]", i))? - ln_checked(*a, &format!("s[{}]", i))?)
            })
            .collect::<Result<_>>()?;
        let r: Vec<f64> = (0..self.points())
            .map(|x| {
                (0..self.param_len())
                    .map(|i| delta[i] * self.matrix.get(i, x).to_f64().unwrap())
                    .sum()
            })
            .collect();
        let rmax = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let rmin = r.iter().cloned().fold(f64::INFINITY, f64::min);
        let scale = 1f64.max(rmax.abs()).max(rmin.abs());
        let linear = (rmax - rmin) <= tol * scale;

        let ps = self.density(s)?;
        let pt = self.density(t)?;
        let direct = rel_sup_diff(&ps.values, &pt.values) <= tol;
        Ok((direct, linear))
    }

    /// Equal rational row spans (same sample space required). Models with
    /// equal spans have the same interior densities for a shared `mu`.
    pub fn equivalent(&self, other: &AModel) -> Result<bool> {
        if self.points() != other.points() {
            return Err(Error::SampleSpaceMismatch(format!(
                "{} vs {} sample points",
                self.points(),
                other.points()
            )));
        }
        spans_equal(&self.matrix, &other.matrix)
    }

    /// Basis of the saturated integer kernel of the model matrix.
    pub fn kernel_basis(&self) -> LatticeBasis {
        LatticeBasis::new(self.points(), self.matrix.integer_kernel_basis())
            .expect("kernel basis is independent")
    }

    /// One binomial per kernel basis vector; each vanishes on every density
    /// in the model.
    pub fn invariants(&self) -> Vec<Binomial> {
        self.kernel_basis()
            .vectors()
            .iter()
            .map(|k| Binomial::from_kernel_vector(k))
            .collect()
    }

    /// Graver basis of the kernel lattice: the full set of primitive
    /// binomial exponents (a superset of the kernel-basis invariants).
    pub fn graver_invariants(&self, max_candidates: usize) -> Result<Vec<GraverElement>> {
        graver_basis(&self.kernel_basis(), max_candidates)
    }

    /// The monoid closure: an equivalent model whose rows are the all-ones
    /// row followed by the Hilbert basis of the nonnegative part of the row
    /// span. Its nonnegative-parameter densities realize the boundary.
    pub fn closure(&self, max_candidates: usize) -> Result<AModel> {
        let hb = hilbert_basis_of_span(&self.matrix, max_candidates)?;
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(hb.vectors().len() + 1);
        rows.push(vec![BigInt::one(); self.points()]);
        rows.extend(hb.vectors().iter().cloned());
        let h = IntMatrix::from_rows(&rows)?;
        let model = AModel::with_labels(
            h,
            self.mu.clone(),
            None,
            self.col_labels.clone(),
        )?;
        if !self.equivalent(&model)? {
            return Err(Error::InvalidModel(
                "closure changed the rational row span".into(),
            ));
        }
        Ok(model)
    }

    /// Face of the nonnegative model: sample points where every listed row
    /// vanishes, with those rows deleted. Zeroing the corresponding
    /// parameters concentrates the density on this face.
    pub fn face(&self, zero_rows: &[usize]) -> Result<(Vec<usize>, AModel)> {
        for &r in zero_rows {
            if r == 0 || r >= self.param_len() {
                return Err(Error::InvalidModel(format!(
                    "face row {} out of range (row 0 cannot be zeroed)",
                    r
                )));
            }
        }
        let support: Vec<usize> = (0..self.points())
            .filter(|&x| zero_rows.iter().all(|&r| self.matrix.get(r, x).is_zero()))
            .collect();
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        let keep_rows: Vec<usize> =
            (0..self.param_len()).filter(|r| !zero_rows.contains(r)).collect();
        let rows: Vec<Vec<BigInt>> = keep_rows
            .iter()
            .map(|&r| support.iter().map(|&x| self.matrix.get(r, x).clone()).collect())
            .collect();
        let mu: Vec<BigRational> = support.iter().map(|&x| self.mu[x].clone()).collect();
        let col_labels = self
            .col_labels
            .as_ref()
            .map(|cl| support.iter().map(|&x| cl[x].clone()).collect());
        let row_labels = self
            .row_labels
            .as_ref()
            .map(|rl| keep_rows.iter().map(|&r| rl[r].clone()).collect());
        let model = AModel::with_labels(IntMatrix::from_rows(&rows)?, mu, row_labels, col_labels)?;
        Ok((support, model))
    }

    /// `sum_x C_i(x) q(x;t)` for each row of `c`.
    pub fn constraint_residual(&self, c: &IntMatrix, t: &[f64]) -> Result<Vec<f64>> {
        if c.cols() != self.points() {
            return Err(Error::SampleSpaceMismatch(format!(
                "constraint matrix has {} columns for {} points",
                c.cols(),
                self.points()
            )));
        }
        let q = self.unnormalized_density(t)?;
        Ok((0..c.rows())
            .map(|i| {
                (0..c.cols())
                    .map(|x| c.get(i, x).to_f64().unwrap() * q[x])
                    .sum()
            })
            .collect())
    }
}

/// Does the density path `t_seq` (parameters of `hmodel` whose `zero_rows`
/// coordinates head to zero) end at the conditional density on the face?
/// Compares the final density against the face submodel's density at the
/// matching remaining parameters, in sup norm.
pub fn limit_is_conditional(
    hmodel: &AModel,
    zero_rows: &[usize],
    t_seq: &[Vec<f64>],
    tol: f64,
) -> Result<bool> {
    let Some(t_last) = t_seq.last() else {
        return Err(Error::Input("empty parameter sequence".into()));
    };
    let (support, face) = hmodel.face(zero_rows)?;
    let keep_rows: Vec<usize> =
        (0..hmodel.param_len()).filter(|r| !zero_rows.contains(r)).collect();
    let t_face: Vec<f64> = keep_rows.iter().map(|&r| t_last[r]).collect();
    let pf = face.density(&t_face)?;
    let mut target = vec![0f64; hmodel.points()];
    for (k, &x) in support.iter().enumerate() {
        target[x] = pf.values[k];
    }
    let p = hmodel.density(t_last)?;
    Ok(rel_sup_diff(&p.values, &target) <= tol)
}

pub fn binomial_coefficient(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut c = BigInt::one();
    for i in 0..k.min(n - k) {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::DEFAULT_MAX_CANDIDATES;

    fn binomial_model() -> AModel {
        let a = IntMatrix::from_i64_rows(&[vec![1; 6], vec![0, 1, 2, 3, 4, 5]]).unwrap();
        AModel::with_binomial_weights(a).unwrap()
    }

    fn b_model() -> AModel {
        let b = IntMatrix::from_i64_rows(&[
            vec![1; 6],
            vec![0, 1, 2, 3, 4, 5],
            vec![5, 4, 3, 2, 1, 0],
        ])
        .unwrap();
        AModel::with_binomial_weights(b).unwrap()
    }

    #[test]
    fn unnormalized_powers() {
        let m = binomial_model();
        let q = m.unnormalized_density(&[1.0, 2.0]).unwrap();
        assert_eq!(q, vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0]);
    }

    #[test]
    fn two_parameter_form_matches() {
        // q(x) = t1^x t2^(5-x) for the three-row variant.
        let m = b_model();
        let (t1, t2) = (1.7, 0.6);
        let q = m.unnormalized_density(&[1.0, t1, t2]).unwrap();
        for x in 0..6 {
            let expect = t1.powi(x as i32) * t2.powi((5 - x) as i32);
            assert!((q[x] - expect).abs() <= 1e-12 * expect.abs());
        }
    }

    #[test]
    fn zero_parameter_concentrates() {
        // t1 = 0 keeps only x = 0 (0^0 = 1).
        let m = binomial_model();
        let q = m.unnormalized_density(&[1.0, 0.0]).unwrap();
        assert_eq!(q, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let p = m.density(&[1.0, 0.0]).unwrap();
        assert_eq!(p.support(), vec![0]);
        assert!((p.values[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_is_binomial_family() {
        let m = binomial_model();
        let p = m.density(&[1.0, 1.0]).unwrap();
        // Uniform-weighted: p(x) = 1/2^5 relative to mu = C(5,x).
        for v in &p.values {
            assert!((v - 1.0 / 32.0).abs() < 1e-15);
        }
        let t1 = 2.5;
        let p = m.density(&[3.0, t1]).unwrap();
        for x in 0..6 {
            let expect = t1.powi(x as i32) / (1.0 + t1).powi(5);
            assert!((p.values[x] - expect).abs() <= 1e-12 * expect);
        }
        // sum p mu = 1
        let total: f64 = p
            .values
            .iter()
            .zip(m.mu_f64())
            .map(|(a, b)| a * b)
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invariants_vanish_on_model_densities() {
        let m = binomial_model();
        let invs = m.invariants();
        assert_eq!(invs.len(), 4);
        for inv in &invs {
            assert!(inv.is_homogeneous());
        }
        let mut t1: f64 = 0.37;
        for _ in 0..20 {
            t1 = (t1 * 7.13).rem_euclid(10.0) + 1e-3;
            let q = m.unnormalized_density(&[1.0, t1]).unwrap();
            for inv in &invs {
                assert!(inv.check(&q, 1e-9).unwrap(), "t1 = {}", t1);
            }
        }
        // A non-kernel exponent does not vanish.
        let sq = Binomial {
            plus: [1, 0, 0, 0, 0, 0].iter().map(|&x| BigInt::from(x)).collect(),
            minus: [0, 1, 0, 0, 0, 0].iter().map(|&x| BigInt::from(x)).collect(),
        };
        let q = m.unnormalized_density(&[1.0, 2.0]).unwrap();
        assert!(!sq.check(&q, 1e-9).unwrap());
    }

    #[test]
    fn second_difference_binomial_vanishes() {
        let m = binomial_model();
        let k: Vec<BigInt> = [1, -2, 1, 0, 0, 0].iter().map(|&x| BigInt::from(x)).collect();
        let inv = Binomial::from_kernel_vector(&k);
        let q = m.unnormalized_density(&[1.0, 3.7]).unwrap();
        // q(0) q(2) = q(1)^2
        assert!(inv.check(&q, 1e-9).unwrap());
    }

    #[test]
    fn confounding_scaling_both_routes() {
        let m = b_model();
        let s = [1.0, 1.3, 0.8];
        let lam = 2.9;
        let t = [1.0, 1.3 * lam, 0.8 * lam];
        let (direct, linear) = m.confounded_detail(&s, &t, 1e-9).unwrap();
        assert!(direct && linear);
        let t2 = [1.0, 1.3 * lam, 0.8];
        let (direct, linear) = m.confounded_detail(&s, &t2, 1e-9).unwrap();
        assert!(!direct && !linear);
    }

    #[test]
    fn confounding_routes_agree_on_random_pairs() {
        let mut state = 0x9e3779b9u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) * 2.0 + 0.05
        };
        let m = b_model();
        for i in 0..100 {
            let s = [next(), next(), next()];
            // Half the pairs confounded by construction, half generic.
            let t = if i % 2 == 0 {
                let lam = next();
                [s[0] * next(), s[1] * lam, s[2] * lam]
            } else {
                [next(), next(), next()]
            };
            let (direct, linear) = m.confounded_detail(&s, &t, 1e-9).unwrap();
            assert_eq!(direct, linear, "s={:?} t={:?}", s, t);
            if i % 2 == 0 {
                assert!(direct);
            }
        }
    }

    #[test]
    fn equivalence_of_binomial_and_b_model() {
        let a = binomial_model();
        let b = b_model();
        assert!(a.equivalent(&b).unwrap());
        let c = AModel::with_uniform_weights(
            IntMatrix::from_i64_rows(&[vec![1; 6], vec![0, 0, 0, 1, 1, 1]]).unwrap(),
        )
        .unwrap();
        assert!(!a.equivalent(&c).unwrap());
    }

    #[test]
    fn closure_of_binomial_model() {
        let m = binomial_model();
        let h = m.closure(DEFAULT_MAX_CANDIDATES).unwrap();
        let rows = h.matrix().to_rows();
        let as_i64: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect())
            .collect();
        assert_eq!(
            as_i64,
            vec![
                vec![1, 1, 1, 1, 1, 1],
                vec![0, 1, 2, 3, 4, 5],
                vec![5, 4, 3, 2, 1, 0]
            ]
        );
        assert!(m.equivalent(&h).unwrap());
    }

    #[test]
    fn face_of_closure_is_point_mass() {
        let m = binomial_model().closure(DEFAULT_MAX_CANDIDATES).unwrap();
        // Zeroing the ascending row leaves only x = 0.
        let (support, sub) = m.face(&[1]).unwrap();
        assert_eq!(support, vec![0]);
        assert_eq!(sub.points(), 1);
        // Zeroing both rays empties the support.
        assert!(matches!(m.face(&[1, 2]), Err(Error::EmptySupport)));
    }

    #[test]
    fn limit_reaches_face_conditional() {
        let h = binomial_model().closure(DEFAULT_MAX_CANDIDATES).unwrap();
        // Send the ascending ray's parameter to zero: conditional on x = 0.
        let seq: Vec<Vec<f64>> = [1e-1, 1e-2, 1e-4, 1e-8]
            .iter()
            .map(|&eps| vec![1.0, eps, 1.0])
            .collect();
        assert!(limit_is_conditional(&h, &[1], &seq, 1e-6).unwrap());
        // A sequence that stays interior does not.
        let seq2 = vec![vec![1.0, 0.9, 1.0]];
        assert!(!limit_is_conditional(&h, &[1], &seq2, 1e-6).unwrap());
    }

    #[test]
    fn constraint_residual_evaluates() {
        let m = binomial_model();
        let c = IntMatrix::from_i64_rows(&[vec![1, -1, 0, 0, 0, 0]]).unwrap();
        let r = m.constraint_residual(&c, &[1.0, 2.0]).unwrap();
        assert!((r[0] - (1.0 - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_models() {
        let no_ones = IntMatrix::from_i64_rows(&[vec![0, 1], vec![1, 1]]).unwrap();
        assert!(AModel::with_uniform_weights(no_ones).is_err());
        let neg = IntMatrix::from_i64_rows(&[vec![1, 1], vec![-1, 0]]).unwrap();
        assert!(AModel::with_uniform_weights(neg).is_err());
        let ok = IntMatrix::from_i64_rows(&[vec![1, 1]]).unwrap();
        let bad_mu = vec![BigRational::zero(), BigRational::one()];
        assert!(AModel::new(ok, bad_mu).is_err());
    }

    #[test]
    fn degenerate_parameter_detected() {
        let m = binomial_model();
        assert!(matches!(
            m.unnormalized_density(&[0.0, 0.0]),
            Err(Error::DegenerateParameter)
        ));
    }
}
