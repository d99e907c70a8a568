//! Exact sparse multivariate Laurent polynomials over the rationals.
//!
//! Coefficients are [`rug::Rational`]; exponents are signed. Numeric
//! evaluation goes through [`ComplexBig`] at a caller-chosen precision.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rug::{Complex, Float, Rational};
use thiserror::Error;

use crate::numeric::{ComplexBig, Precision};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("point has {got} coordinates, polynomial has {nvars} variables")]
    PointLength { got: usize, nvars: usize },
    #[error("coordinate {var} is zero but appears with a negative exponent")]
    ZeroCoordinate { var: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Exponent vector of a Laurent monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponents(Vec<i32>);

impl Exponents {
    pub fn new(exps: Vec<i32>) -> Self {
        Exponents(exps)
    }

    pub fn zero(nvars: usize) -> Self {
        Exponents(vec![0; nvars])
    }

    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Exponents(e)
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    fn add(&self, other: &Exponents) -> Exponents {
        Exponents(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Graded-lexicographic comparison: total degree first, then lex.
    pub fn grlex_cmp(&self, other: &Exponents) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl std::ops::Index<usize> for Exponents {
    type Output = i32;
    fn index(&self, i: usize) -> &i32 {
        &self.0[i]
    }
}

/// Sparse Laurent polynomial with exact rational coefficients.
///
/// No stored coefficient is zero and every key has length `nvars`.
#[derive(Debug, Clone)]
pub struct LaurentPoly {
    nvars: usize,
    names: Vec<String>,
    terms: HashMap<Exponents, Rational>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.terms == other.terms
    }
}

fn default_names(nvars: usize) -> Vec<String> {
    if nvars == 1 {
        vec!["x".to_string()]
    } else {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        Self::zero_named(default_names(nvars))
    }

    pub fn zero_named(names: Vec<String>) -> Self {
        LaurentPoly {
            nvars: names.len(),
            names,
            terms: HashMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: impl Into<Rational>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Exponents::zero(nvars), c.into());
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    /// The monomial `var` (with coefficient 1).
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Exponents::unit(nvars, var), Rational::from(1));
        p
    }

    pub fn monomial(exps: Vec<i32>, c: impl Into<Rational>) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(Exponents(exps), c.into());
        p
    }

    pub fn from_terms<I>(names: Vec<String>, terms: I) -> Result<Self, LaurentError>
    where
        I: IntoIterator<Item = (Vec<i32>, Rational)>,
    {
        let mut p = Self::zero_named(names);
        for (e, c) in terms {
            if e.len() != p.nvars {
                return Err(LaurentError::VarCountMismatch {
                    left: p.nvars,
                    right: e.len(),
                });
            }
            p.add_term(Exponents(e), c);
        }
        Ok(p)
    }

    /// Replace display names; the count must match.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, LaurentError> {
        if names.len() != self.nvars {
            return Err(LaurentError::VarCountMismatch {
                left: self.nvars,
                right: names.len(),
            });
        }
        self.names = names;
        Ok(self)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[i32]) -> Rational {
        self.terms
            .get(&Exponents(exps.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    /// Terms in descending graded-lex order.
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.grlex_cmp(a.0));
        v
    }

    fn add_term(&mut self, e: Exponents, c: Rational) {
        if c == 0 {
            return;
        }
        match self.terms.entry(e) {
            std::collections::hash_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<(), LaurentError> {
        if self.nvars != other.nvars {
            return Err(LaurentError::VarCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), Rational::from(-c));
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero_named(self.names.clone());
        if *c == 0 {
            return out;
        }
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), Rational::from(v * c));
        }
        out
    }

    /// Exact product by sparse convolution.
    pub fn mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_same(other)?;
        let mut acc: HashMap<Exponents, Rational> =
            HashMap::with_capacity(self.terms.len().saturating_mul(other.terms.len()).min(1 << 20));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let prod = Rational::from(ca * cb);
                match acc.entry(ea.add(eb)) {
                    std::collections::hash_map::Entry::Occupied(mut o) => *o.get_mut() += prod,
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                }
            }
        }
        acc.retain(|_, c| *c != 0);
        Ok(LaurentPoly {
            nvars: self.nvars,
            names: self.names.clone(),
            terms: acc,
        })
    }

    /// `self^m` by repeated squaring; `pow(0)` is 1.
    pub fn pow(&self, m: u32) -> Self {
        let mut result = Self::one(self.nvars).with_names_unchecked(self.names.clone());
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same nvars");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same nvars");
            }
        }
        result
    }

    fn with_names_unchecked(mut self, names: Vec<String>) -> Self {
        self.names = names;
        self
    }

    pub fn partial_derivative(&self, var: usize) -> Result<Self, LaurentError> {
        if var >= self.nvars {
            return Err(LaurentError::IndexOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let mut out = Self::zero_named(self.names.clone());
        for (e, c) in &self.terms {
            let k = e.0[var];
            if k == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne.0[var] -= 1;
            out.terms.insert(ne, Rational::from(c * k));
        }
        Ok(out)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Exponents::zero(self.nvars))
            .cloned()
            .unwrap_or_default()
    }

    /// Largest absolute exponent of each variable, split by sign: `(min, max)`.
    fn exponent_range(&self) -> Vec<(i32, i32)> {
        let mut r = vec![(0, 0); self.nvars];
        for e in self.terms.keys() {
            for (slot, &x) in r.iter_mut().zip(&e.0) {
                slot.0 = slot.0.min(x);
                slot.1 = slot.1.max(x);
            }
        }
        r
    }

    pub fn evaluate(&self, point: &[ComplexBig], prec: Precision) -> Result<ComplexBig, LaurentError> {
        let table = PowerTable::new(self, point, prec)?;
        Ok(table.eval(self))
    }

    pub fn gradient_at(
        &self,
        point: &[ComplexBig],
        prec: Precision,
    ) -> Result<Vec<ComplexBig>, LaurentError> {
        Derivatives::new(self).gradient_at(point, prec)
    }

    pub fn hessian_at(
        &self,
        point: &[ComplexBig],
        prec: Precision,
    ) -> Result<Vec<Vec<ComplexBig>>, LaurentError> {
        Derivatives::new(self).hessian_at(point, prec)
    }

    /// Parse the text form produced by `Display`, with variables named `names`.
    pub fn parse_with_names(s: &str, names: Vec<String>) -> Result<Self, LaurentError> {
        let mut p = Self::zero_named(names);
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(p);
        }
        for raw in s.split(" + ") {
            let raw = raw.trim();
            let (coeff, rest) = match raw.split_once('*') {
                Some((c, r)) => (c.trim(), r.trim()),
                None => (raw, ""),
            };
            let c = Rational::from_str(coeff)
                .map_err(|_| LaurentError::Parse(format!("bad coefficient `{coeff}`")))?;
            let mut e = vec![0i32; p.nvars];
            for factor in rest.split_whitespace() {
                let (name, exp) = factor
                    .split_once('^')
                    .ok_or_else(|| LaurentError::Parse(format!("bad factor `{factor}`")))?;
                let idx = p
                    .names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| LaurentError::Parse(format!("unknown variable `{name}`")))?;
                let k: i32 = exp
                    .parse()
                    .map_err(|_| LaurentError::Parse(format!("bad exponent `{exp}`")))?;
                e[idx] += k;
            }
            p.add_term(Exponents(e), c);
        }
        Ok(p)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if !e.is_zero() {
                write!(f, " *")?;
                for (name, &k) in self.names.iter().zip(e.as_slice()) {
                    if k != 0 {
                        write!(f, " {name}^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses with variable names collected from the text in order of first
/// appearance. Use [`LaurentPoly::parse_with_names`] to fix the variable set.
impl FromStr for LaurentPoly {
    type Err = LaurentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut names: Vec<String> = Vec::new();
        for tok in s.split_whitespace() {
            if let Some((name, _)) = tok.split_once('^') {
                if !names.iter().any(|n| n == name) {
                    names.push(name.to_string());
                }
            }
        }
        Self::parse_with_names(s, names)
    }
}

/// Per-variable integer powers of an evaluation point.
struct PowerTable {
    prec: u32,
    // powers[v][k - offset[v]] = z_v^k
    powers: Vec<Vec<ComplexBig>>,
    offset: Vec<i32>,
}

impl PowerTable {
    fn new(p: &LaurentPoly, point: &[ComplexBig], prec: Precision) -> Result<Self, LaurentError> {
        if point.len() != p.nvars {
            return Err(LaurentError::PointLength {
                got: point.len(),
                nvars: p.nvars,
            });
        }
        let bits = prec.bits();
        let ranges = p.exponent_range();
        let mut powers = Vec::with_capacity(p.nvars);
        let mut offset = Vec::with_capacity(p.nvars);
        for (v, &(lo, hi)) in ranges.iter().enumerate() {
            let z = Complex::with_val(bits, &point[v]);
            if lo < 0 && z.real().is_zero() && z.imag().is_zero() {
                return Err(LaurentError::ZeroCoordinate { var: v });
            }
            let len = (hi - lo + 1) as usize;
            let mut row = vec![Complex::new(bits); len];
            let zero_idx = (-lo) as usize;
            row[zero_idx] = Complex::with_val(bits, 1);
            for k in 1..=hi as usize {
                row[zero_idx + k] = Complex::with_val(bits, &row[zero_idx + k - 1] * &z);
            }
            if lo < 0 {
                let inv = Complex::with_val(bits, z.recip_ref());
                for k in 1..=(-lo) as usize {
                    row[zero_idx - k] = Complex::with_val(bits, &row[zero_idx - k + 1] * &inv);
                }
            }
            powers.push(row);
            offset.push(lo);
        }
        Ok(PowerTable {
            prec: bits,
            powers,
            offset,
        })
    }

    fn eval(&self, p: &LaurentPoly) -> ComplexBig {
        // Sum in a fixed term order so results do not depend on hash layout.
        let mut terms: Vec<_> = p.terms.iter().collect();
        terms.sort_by(|a, b| b.0.grlex_cmp(a.0));
        let mut acc = Complex::new(self.prec);
        for (e, c) in terms {
            let mut m = Complex::with_val(self.prec, (Float::with_val(self.prec, c), 0));
            for (v, &k) in e.as_slice().iter().enumerate() {
                if k != 0 {
                    m *= &self.powers[v][(k - self.offset[v]) as usize];
                }
            }
            acc += m;
        }
        acc
    }
}

/// First and second formal derivatives of a polynomial, computed once and
/// evaluated many times.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub f: LaurentPoly,
    pub grad: Vec<LaurentPoly>,
    /// Upper triangle, row-major: `hess[i][j - i]` is d^2 f / dz_i dz_j.
    hess_upper: Vec<Vec<LaurentPoly>>,
    // Union polynomial used only to size the power table.
    support: LaurentPoly,
}

impl Derivatives {
    pub fn new(f: &LaurentPoly) -> Self {
        let n = f.nvars();
        let grad: Vec<_> = (0..n)
            .map(|i| f.partial_derivative(i).expect("index in range"))
            .collect();
        let hess_upper: Vec<Vec<_>> = (0..n)
            .map(|i| {
                (i..n)
                    .map(|j| grad[i].partial_derivative(j).expect("index in range"))
                    .collect()
            })
            .collect();
        let mut support = LaurentPoly::zero(n);
        let all = std::iter::once(f)
            .chain(grad.iter())
            .chain(hess_upper.iter().flatten());
        for p in all {
            for (e, _) in p.terms() {
                support.add_term(e.clone(), Rational::from(1));
            }
        }
        Derivatives {
            f: f.clone(),
            grad,
            hess_upper,
            support,
        }
    }

    pub fn nvars(&self) -> usize {
        self.f.nvars()
    }

    fn table(&self, point: &[ComplexBig], prec: Precision) -> Result<PowerTable, LaurentError> {
        // The zero-coordinate check must reflect f's own exponents.
        PowerTable::new(&self.f, point, prec)?;
        PowerTable::new(&self.support, point, prec)
    }

    pub fn value_at(&self, point: &[ComplexBig], prec: Precision) -> Result<ComplexBig, LaurentError> {
        Ok(self.table(point, prec)?.eval(&self.f))
    }

    pub fn gradient_at(
        &self,
        point: &[ComplexBig],
        prec: Precision,
    ) -> Result<Vec<ComplexBig>, LaurentError> {
        let t = self.table(point, prec)?;
        Ok(self.grad.iter().map(|g| t.eval(g)).collect())
    }

    pub fn hessian_at(
        &self,
        point: &[ComplexBig],
        prec: Precision,
    ) -> Result<Vec<Vec<ComplexBig>>, LaurentError> {
        let t = self.table(point, prec)?;
        Ok(self.hessian_with(&t))
    }

    fn hessian_with(&self, t: &PowerTable) -> Vec<Vec<ComplexBig>> {
        let n = self.nvars();
        let mut h = vec![vec![Complex::new(t.prec); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = t.eval(&self.hess_upper[i][j - i]);
                h[j][i] = v.clone();
                h[i][j] = v;
            }
        }
        h
    }

    /// Value, gradient and Hessian at one point with a shared power table.
    pub fn all_at(
        &self,
        point: &[ComplexBig],
        prec: Precision,
    ) -> Result<(ComplexBig, Vec<ComplexBig>, Vec<Vec<ComplexBig>>), LaurentError> {
        let t = self.table(point, prec)?;
        let value = t.eval(&self.f);
        let grad = self.grad.iter().map(|g| t.eval(g)).collect();
        Ok((value, grad, self.hessian_with(&t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_plus_inv() -> LaurentPoly {
        LaurentPoly::monomial(vec![1], 1)
            .add(&LaurentPoly::monomial(vec![-1], 1))
            .unwrap()
    }

    fn c(re: f64, im: f64) -> ComplexBig {
        Complex::with_val(128, (re, im))
    }

    #[test]
    fn square_of_x_plus_inverse() {
        let p = x_plus_inv();
        let sq = p.mul(&p).unwrap();
        assert_eq!(sq.coeff(&[2]), 1);
        assert_eq!(sq.coeff(&[0]), 2);
        assert_eq!(sq.coeff(&[-2]), 1);
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(p.pow(2), sq);
        assert_eq!(p.pow(1), p);
        assert_eq!(p.mul(&LaurentPoly::one(1)).unwrap(), p);
    }

    #[test]
    fn conic_times_x_clears_denominator() {
        // (x+1)^2 / x = x + 2 + x^-1
        let conic = "1 * x^1 + 2 + 1 * x^-1".parse::<LaurentPoly>().unwrap();
        let prod = conic.mul(&LaurentPoly::var(1, 0)).unwrap();
        let expected = LaurentPoly::from_terms(
            vec!["x".into()],
            [(vec![2], 1.into()), (vec![1], 2.into()), (vec![0], 1.into())],
        )
        .unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn mismatched_variable_counts_error() {
        let a = LaurentPoly::one(1);
        let b = LaurentPoly::one(2);
        assert_eq!(
            a.mul(&b).unwrap_err(),
            LaurentError::VarCountMismatch { left: 1, right: 2 }
        );
    }

    #[test]
    fn constant_terms() {
        let p = x_plus_inv();
        assert_eq!(p.add(&LaurentPoly::constant(1, 2)).unwrap().constant_term(), 2);
        // central binomial coefficient C(4,2)
        assert_eq!(p.pow(4).constant_term(), 6);
        assert_eq!(LaurentPoly::monomial(vec![1, 1], 1).constant_term(), 0);
        // y1 + y2 + 1/(y1 y2): cubed, the (1,1,1) split contributes 3! = 6
        let q = LaurentPoly::from_terms(
            vec!["y1".into(), "y2".into()],
            [
                (vec![1, 0], 1.into()),
                (vec![0, 1], 1.into()),
                (vec![-1, -1], 1.into()),
            ],
        )
        .unwrap();
        assert_eq!(q.pow(3).constant_term(), 6);
        assert_eq!(q.pow(0), LaurentPoly::one(2));
    }

    #[test]
    fn derivatives() {
        let p = x_plus_inv();
        let d = p.partial_derivative(0).unwrap();
        assert_eq!(d.coeff(&[0]), 1);
        assert_eq!(d.coeff(&[-2]), -1);
        assert_eq!(d.num_terms(), 2);
        let x2 = LaurentPoly::monomial(vec![2, 0], 1);
        assert!(x2.partial_derivative(1).unwrap().is_zero());
        assert_eq!(
            x2.partial_derivative(2).unwrap_err(),
            LaurentError::IndexOutOfRange { index: 2, nvars: 2 }
        );
    }

    #[test]
    fn evaluation() {
        let prec = Precision::new(128).unwrap();
        let p = x_plus_inv();
        let v = p.evaluate(&[c(1.0, 0.0)], prec).unwrap();
        assert_eq!(v, Complex::with_val(128, (2, 0)));
        let v = p.evaluate(&[c(0.0, 1.0)], prec).unwrap();
        assert!(v.real().is_zero() && v.imag().is_zero());
        let conic = "1 * x^1 + 2 + 1 * x^-1".parse::<LaurentPoly>().unwrap();
        assert_eq!(
            conic.evaluate(&[c(1.0, 0.0)], prec).unwrap(),
            Complex::with_val(128, 4)
        );
        assert_eq!(
            p.evaluate(&[c(0.0, 0.0)], prec).unwrap_err(),
            LaurentError::ZeroCoordinate { var: 0 }
        );
        // zero coordinate is fine without negative exponents
        let q = LaurentPoly::monomial(vec![2], 3);
        assert!(q.evaluate(&[c(0.0, 0.0)], prec).is_ok());
        assert_eq!(
            p.evaluate(&[c(1.0, 0.0), c(1.0, 0.0)], prec).unwrap_err(),
            LaurentError::PointLength { got: 2, nvars: 1 }
        );
    }

    #[test]
    fn gradient_and_hessian() {
        let prec = Precision::new(128).unwrap();
        let p = x_plus_inv();
        let g = p.gradient_at(&[c(1.0, 0.0)], prec).unwrap();
        assert!(g[0].real().is_zero());
        let g = p.gradient_at(&[c(2.0, 0.0)], prec).unwrap();
        assert_eq!(*g[0].real(), 0.75);
        let h = p.hessian_at(&[c(1.0, 0.0)], prec).unwrap();
        assert_eq!(*h[0][0].real(), 2);

        let xy = LaurentPoly::monomial(vec![1, 1], 1);
        let h = xy.hessian_at(&[c(1.0, 0.0), c(1.0, 0.0)], prec).unwrap();
        assert_eq!(*h[0][0].real(), 0);
        assert_eq!(*h[0][1].real(), 1);
        assert_eq!(*h[1][0].real(), 1);
        assert_eq!(*h[1][1].real(), 0);
    }

    #[test]
    fn conic_second_derivative() {
        // (x+1)^2/x = x + 2 + 1/x; second derivative 2/x^3 -> 2 at x = 1
        let conic = "1 * x^1 + 2 + 1 * x^-1".parse::<LaurentPoly>().unwrap();
        let d2 = conic.partial_derivative(0).unwrap().partial_derivative(0).unwrap();
        assert_eq!(d2, LaurentPoly::monomial(vec![-3], 2).with_names(vec!["x".into()]).unwrap());
        let prec = Precision::new(128).unwrap();
        let h = conic.hessian_at(&[c(1.0, 0.0)], prec).unwrap();
        assert_eq!(*h[0][0].real(), 2);
    }

    #[test]
    fn display_is_grlex_descending_and_parses_back() {
        let p = "3 * x^-1 y^2 + -1/2 + 1 * x^2".parse::<LaurentPoly>().unwrap();
        let s = p.to_string();
        assert_eq!(s, "1 * x^2 + 3 * x^-1 y^2 + -1/2");
        let back = LaurentPoly::parse_with_names(&s, p.names().to_vec()).unwrap();
        assert_eq!(back, p);
        assert_eq!(LaurentPoly::zero(2).to_string(), "0");
        assert!("2 * q".parse::<LaurentPoly>().is_err());
        assert!(LaurentPoly::parse_with_names("1 * z^1", vec!["x".into()]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        const NV: usize = 3;

        fn poly() -> impl Strategy<Value = LaurentPoly> {
            prop::collection::vec((prop::collection::vec(-2i32..3, NV), -4i64..5, 1i64..4), 0..6).prop_map(
                |terms| {
                    terms.into_iter().fold(LaurentPoly::zero(NV), |acc, (e, n, d)| {
                        acc.add(&LaurentPoly::monomial(e, Rational::from((n, d)))).unwrap()
                    })
                },
            )
        }

        fn point() -> impl Strategy<Value = Vec<(f64, f64)>> {
            prop::collection::vec((0.5f64..2.0, 0.0f64..std::f64::consts::TAU), NV)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn ring_laws(p in poly(), q in poly(), r in poly()) {
                prop_assert_eq!(p.mul(&q).unwrap(), q.mul(&p).unwrap());
                prop_assert_eq!(p.mul(&q).unwrap().mul(&r).unwrap(), p.mul(&q.mul(&r).unwrap()).unwrap());
                prop_assert_eq!(
                    p.add(&q).unwrap().mul(&r).unwrap(),
                    p.mul(&r).unwrap().add(&q.mul(&r).unwrap()).unwrap()
                );
                prop_assert!(p.sub(&p).unwrap().is_zero());
                prop_assert_eq!(p.pow(3), p.mul(&p).unwrap().mul(&p).unwrap());
            }

            #[test]
            fn leibniz(p in poly(), q in poly(), var in 0..NV) {
                let lhs = p.mul(&q).unwrap().partial_derivative(var).unwrap();
                let rhs = p.partial_derivative(var).unwrap().mul(&q).unwrap()
                    .add(&p.mul(&q.partial_derivative(var).unwrap()).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn gradient_matches_central_differences(p in poly(), pt in point()) {
                let prec = Precision::default();
                let z: Vec<ComplexBig> = pt
                    .iter()
                    .map(|&(r, th)| Complex::with_val(256, (r * th.cos(), r * th.sin())))
                    .collect();
                let grad = p.gradient_at(&z, prec).unwrap();
                let h = Float::with_val(256, Float::i_exp(1, -100));
                for v in 0..NV {
                    let mut zp = z.clone();
                    let mut zm = z.clone();
                    zp[v] += &h;
                    zm[v] -= &h;
                    let fd = Complex::with_val(256, p.evaluate(&zp, prec).unwrap() - p.evaluate(&zm, prec).unwrap())
                        / Complex::with_val(256, &h * 2u32);
                    let err = Float::with_val(256, Complex::with_val(256, &fd - &grad[v]).abs_ref());
                    prop_assert!(err < 1e-40, "var {} err {}", v, err);
                }
            }
        }
    }
}
