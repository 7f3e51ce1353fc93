//! Designs (finite sets of distinct integer points), term orders, the
//! Buchberger-Moller monomial basis of the vanishing ideal, indicator
//! polynomials, and the moment calculus that acts on the sparse partition
//! polynomial by scaling the term at x with f(x).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::amodel::{pow_f64, AModel, Binomial};
use crate::error::{Error, Result};
use crate::matrix::solve_linear_rational;

pub type Monomial = Vec<u32>;

/// Degree-reverse-lexicographic term order with an explicit significance
/// order on the variables (`vars[0]` is the most significant).
#[derive(Debug, Clone)]
pub struct TermOrder {
    vars: Vec<usize>,
}

impl TermOrder {
    /// degrevlex with the natural variable order `x_0 > x_1 > ..`.
    pub fn degrevlex(nvars: usize) -> Self {
        TermOrder { vars: (0..nvars).collect() }
    }

    pub fn degrevlex_with_vars(vars: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; vars.len()];
        for &v in &vars {
            if v >= vars.len() || seen[v] {
                return Err(Error::Input("variable order must be a permutation".into()));
            }
            seen[v] = true;
        }
        Ok(TermOrder { vars })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// `Greater` means `a` is the larger monomial. Ties in total degree are
    /// broken by the last nonzero entry of `a - b` (in significance order):
    /// negative means `a` is larger.
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        let da: u64 = a.iter().map(|&x| x as u64).sum();
        let db: u64 = b.iter().map(|&x| x as u64).sum();
        if da != db {
            return da.cmp(&db);
        }
        for &v in self.vars.iter().rev() {
            if a[v] != b[v] {
                return if a[v] < b[v] { Ordering::Greater } else { Ordering::Less };
            }
        }
        Ordering::Equal
    }
}

/// Finite set of distinct nonnegative integer points with positive weights.
#[derive(Debug, Clone)]
pub struct Design {
    points: Vec<Vec<BigInt>>,
    weights: Vec<BigRational>,
}

impl Design {
    pub fn new(points: Vec<Vec<BigInt>>, weights: Vec<BigRational>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Input("design needs at least one point".into()));
        }
        let dim = points[0].len();
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(
                    "design points have mixed dimensions".into(),
                ));
            }
            if p.iter().any(|x| x.is_negative()) {
                return Err(Error::Input("design points must be nonnegative".into()));
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::DuplicateColumns(i, j));
                }
            }
        }
        if weights.len() != points.len() {
            return Err(Error::DimensionMismatch("one weight per design point".into()));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Input("design weights must be positive".into()));
        }
        Ok(Design { points, weights })
    }

    pub fn with_uniform_weights(points: Vec<Vec<BigInt>>) -> Result<Self> {
        let w = vec![BigRational::one(); points.len()];
        Design::new(points, w)
    }

    pub fn points(&self) -> &[Vec<BigInt>] {
        &self.points
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn index_of(&self, p: &[BigInt]) -> Option<usize> {
        self.points.iter().position(|q| q.as_slice() == p)
    }
}

/// Columns of the model matrix without the constant row, weighted by `mu`.
pub fn design_of(model: &AModel) -> Result<Design> {
    let a = model.matrix();
    let points: Vec<Vec<BigInt>> = (0..a.cols())
        .map(|x| (1..a.rows()).map(|i| a.get(i, x).clone()).collect())
        .collect();
    Design::new(points, model.mu().to_vec())
}

fn monomial_value(alpha: &[u32], p: &[BigInt]) -> BigRational {
    let mut v = BigInt::one();
    for (a, x) in alpha.iter().zip(p) {
        if *a > 0 {
            v *= Pow::pow(x, *a);
        }
    }
    BigRational::from_integer(v)
}

fn divides(lead: &[u32], m: &[u32]) -> bool {
    lead.iter().zip(m).all(|(a, b)| a <= b)
}

/// Buchberger-Moller over the rationals: the standard monomials of the
/// vanishing ideal of the design, ascending in the term order. Exactly
/// `d.len()` monomials come back, and their evaluation matrix on the design
/// is nonsingular.
pub fn monomial_basis(d: &Design, order: &TermOrder) -> Result<Vec<Monomial>> {
    if order.nvars() != d.dim() {
        return Err(Error::DimensionMismatch(format!(
            "term order on {} variables for a {}-dimensional design",
            order.nvars(),
            d.dim()
        )));
    }
    let n = d.len();
    let m = d.dim();
    let mut standard: Vec<Monomial> = Vec::with_capacity(n);
    let mut lead_terms: Vec<Monomial> = Vec::new();
    // Reduced evaluation vectors of the standard monomials, each with its
    // pivot coordinate.
    let mut reduced: Vec<(usize, Vec<BigRational>)> = Vec::new();

    let mut pending: Vec<Monomial> = vec![vec![0u32; m]];
    let mut seen: HashSet<Monomial> = pending.iter().cloned().collect();

    while standard.len() < n && !pending.is_empty() {
        let mut best = 0;
        for i in 1..pending.len() {
            if order.cmp(&pending[i], &pending[best]) == Ordering::Less {
                best = i;
            }
        }
        let cand = pending.swap_remove(best);
        if lead_terms.iter().any(|lt| divides(lt, &cand)) {
            continue;
        }
        let mut v: Vec<BigRational> =
            d.points.iter().map(|p| monomial_value(&cand, p)).collect();
        for (piv, row) in &reduced {
            if !v[*piv].is_zero() {
                let c = v[*piv].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= &c * r;
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => lead_terms.push(cand),
            Some(piv) => {
                let c = v[piv].clone();
                for x in v.iter_mut() {
                    *x /= &c;
                }
                reduced.push((piv, v));
                for i in 0..m {
                    let mut succ = cand.clone();
                    succ[i] += 1;
                    if seen.insert(succ.clone()) {
                        pending.push(succ);
                    }
                }
                standard.push(cand);
            }
        }
    }
    assert_eq!(standard.len(), n, "vanishing ideal has {} standard monomials", n);
    standard.sort_by(|a, b| order.cmp(a, b));
    Ok(standard)
}

/// Sparse polynomial as a map from exponent vectors to rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyOnDesign {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PolyOnDesign {
    pub fn zero(nvars: usize) -> Self {
        PolyOnDesign { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn monomial(alpha: Monomial) -> Self {
        let nvars = alpha.len();
        let mut p = Self::zero(nvars);
        p.add_term(alpha, BigRational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn add_term(&mut self, alpha: Monomial, c: BigRational) {
        assert_eq!(alpha.len(), self.nvars);
        let entry = self.terms.entry(alpha).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            let key: Vec<Monomial> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &PolyOnDesign) -> PolyOnDesign {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn evaluate(&self, p: &[BigInt]) -> BigRational {
        self.terms
            .iter()
            .map(|(a, c)| c * monomial_value(a, p))
            .fold(BigRational::zero(), |acc, x| acc + x)
    }

    pub fn evaluate_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| {
                let m: f64 = a
                    .iter()
                    .zip(x)
                    .map(|(e, v)| v.powi(*e as i32))
                    .product();
                c.to_f64().unwrap() * m
            })
            .sum()
    }
}

/// The partition polynomial `Z(t) = sum_x t^x mu(x)`: one term per design
/// point with positive coefficient. Operator images reuse the type but may
/// drop terms whose coefficient vanishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPoly {
    nvars: usize,
    terms: BTreeMap<Vec<BigInt>, BigRational>,
}

impl PartitionPoly {
    pub fn of_design(d: &Design) -> Self {
        let terms = d
            .points
            .iter()
            .cloned()
            .zip(d.weights.iter().cloned())
            .collect();
        PartitionPoly { nvars: d.dim(), terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<BigInt>, BigRational> {
        &self.terms
    }

    pub fn evaluate_f64(&self, t: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(x, c)| {
                let m: f64 = x.iter().zip(t).map(|(e, v)| pow_f64(*v, e)).product();
                c.to_f64().unwrap() * m
            })
            .sum()
    }

    pub fn evaluate_rational(&self, t: &[BigRational]) -> BigRational {
        self.terms
            .iter()
            .map(|(x, c)| {
                let m = x
                    .iter()
                    .zip(t)
                    .map(|(e, v)| {
                        let exp = e.to_u32().expect("exponent fits u32");
                        if exp == 0 { BigRational::one() } else { Pow::pow(v, exp) }
                    })
                    .fold(BigRational::one(), |acc, y| acc * y);
                c * m
            })
            .fold(BigRational::zero(), |acc, x| acc + x)
    }
}

/// The action of `f` under `x_i -> t_i d/dt_i` on the sparse partition
/// polynomial: scale the term at `x` by `f(x)`. Terms scaled to zero are
/// dropped.
pub fn apply_operator(f: &PolyOnDesign, z: &PartitionPoly) -> Result<PartitionPoly> {
    if f.nvars() != z.nvars() {
        return Err(Error::DimensionMismatch(format!(
            "operator on {} variables applied to a polynomial in {}",
            f.nvars(),
            z.nvars()
        )));
    }
    let mut terms = BTreeMap::new();
    for (x, c) in &z.terms {
        let fx = f.evaluate(x);
        if !fx.is_zero() && !c.is_zero() {
            terms.insert(x.clone(), c * fx);
        }
    }
    Ok(PartitionPoly { nvars: z.nvars, terms })
}

/// Indicator polynomials of every design point, expressed in the given
/// monomial basis: `f_a(b) = delta_ab` exactly.
pub fn indicator_polys(d: &Design, basis: &[Monomial]) -> Result<Vec<PolyOnDesign>> {
    let n = d.len();
    if basis.len() != n {
        return Err(Error::DimensionMismatch(
            "monomial basis size must match design size".into(),
        ));
    }
    let eval: Vec<Vec<BigRational>> = d
        .points
        .iter()
        .map(|p| basis.iter().map(|alpha| monomial_value(alpha, p)).collect())
        .collect();
    let mut out = Vec::with_capacity(n);
    for a in 0..n {
        let mut rhs = vec![BigRational::zero(); n];
        rhs[a] = BigRational::one();
        let coeffs = solve_linear_rational(&eval, &rhs)?;
        let mut f = PolyOnDesign::zero(d.dim());
        for (alpha, c) in basis.iter().zip(coeffs) {
            if !c.is_zero() {
                f.add_term(alpha.clone(), c);
            }
        }
        out.push(f);
    }
    Ok(out)
}

/// Indicator polynomial of the point `a` in the degrevlex monomial basis.
pub fn indicator_poly(d: &Design, a: &[BigInt]) -> Result<PolyOnDesign> {
    let idx = d.index_of(a).ok_or(Error::PointNotInDesign)?;
    let basis = monomial_basis(d, &TermOrder::degrevlex(d.dim()))?;
    Ok(indicator_polys(d, &basis)?.swap_remove(idx))
}

fn check_positive_param(model: &AModel, t: &[f64]) -> Result<()> {
    if t.len() != model.param_len() {
        return Err(Error::DimensionMismatch(format!(
            "parameter point has {} coordinates, model has {} rows",
            t.len(),
            model.param_len()
        )));
    }
    if t.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::NonPositiveParameter(
            "moment calculus needs strictly positive parameters".into(),
        ));
    }
    Ok(())
}

/// `E_t[X^alpha]` through the operator route: apply the monomial operator to
/// `Z`, evaluate, and normalize by `Z(t)`.
pub fn moment(model: &AModel, t: &[f64], alpha: &[u32]) -> Result<f64> {
    check_positive_param(model, t)?;
    let d = design_of(model)?;
    if alpha.len() != d.dim() {
        return Err(Error::DimensionMismatch(format!(
            "moment exponent has {} coordinates for a {}-dimensional design",
            alpha.len(),
            d.dim()
        )));
    }
    let z = PartitionPoly::of_design(&d);
    let f = PolyOnDesign::monomial(alpha.to_vec());
    let num = apply_operator(&f, &z)?.evaluate_f64(&t[1..]);
    let den = z.evaluate_f64(&t[1..]);
    Ok(num / den)
}

/// `E_t[X^alpha]` by direct weighted summation; the oracle for [`moment`].
pub fn moment_direct(model: &AModel, t: &[f64], alpha: &[u32]) -> Result<f64> {
    check_positive_param(model, t)?;
    let a = model.matrix();
    if alpha.len() + 1 != a.rows() {
        return Err(Error::DimensionMismatch(
            "one moment exponent per non-constant matrix row".into(),
        ));
    }
    let p = model.density(t)?;
    let mu = model.mu_f64();
    Ok((0..a.cols())
        .map(|x| {
            let xa: f64 = alpha
                .iter()
                .enumerate()
                .map(|(i, e)| a.get(i + 1, x).to_f64().unwrap().powi(*e as i32))
                .product();
            xa * p.values[x] * mu[x]
        })
        .sum())
}

/// Evaluates the binomial at the mu-adjusted operator images
/// `(A(f_a) . Z)(t) / mu(a) = t^a` and returns the residual, which vanishes
/// for binomials from the model's toric ideal.
pub fn toric_moment_identity(model: &AModel, t: &[f64], b: &Binomial) -> Result<f64> {
    check_positive_param(model, t)?;
    let d = design_of(model)?;
    if b.plus.len() != d.len() {
        return Err(Error::DimensionMismatch(format!(
            "binomial on {} variables for a design of {} points",
            b.plus.len(),
            d.len()
        )));
    }
    let z = PartitionPoly::of_design(&d);
    let basis = monomial_basis(&d, &TermOrder::degrevlex(d.dim()))?;
    let indicators = indicator_polys(&d, &basis)?;
    let mut values = Vec::with_capacity(d.len());
    for (fa, w) in indicators.iter().zip(d.weights()) {
        let image = apply_operator(fa, &z)?;
        let ua = image.evaluate_f64(&t[1..]);
        values.push(ua / w.to_f64().unwrap());
    }
    b.evaluate(&values)
}
