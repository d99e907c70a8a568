//! Ordinary-double-point certification.
//!
//! Two independent routes: the numeric Hessian of f_X at a torus critical
//! point (full rank means a Morse point), and the exact quadratic part of the
//! local chart polynomial
//!
//! G = prod_i (a_{i,1} + ... + a_{i,d_i-1} + d_i)^{d_i}
//!     + (b_1 + ... + b_{i_X-1} - t) prod_{i,j} (a_{i,j} + 1) prod_s (b_s + t)
//!
//! over Q[t]/(t^{i_X} - d), where t stands for a root alpha of t^{i_X} = d.
//! The two matrices live in different coordinates; only their
//! nondegeneracy is compared.

use std::collections::HashMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::critical::{CriticalPointRecord, Tolerances};
use crate::laurent::{Exponents, LaurentError, LaurentPoly};
use crate::model::CiModel;
use crate::numeric::{self, ComplexBig, DecimalComplex, Precision};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HessianError {
    #[error("chart polynomial has nonzero {order} part: {detail}")]
    NonvanishingLowOrder { order: &'static str, detail: String },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Element of Q[t]/(t^m - d), stored as coefficients of 1, t, ..., t^{m-1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RadicalExt {
    coeffs: Vec<Rational>,
    d: Integer,
}

impl RadicalExt {
    pub fn zero(m: u32, d: &Integer) -> Self {
        RadicalExt {
            coeffs: vec![Rational::new(); m as usize],
            d: d.clone(),
        }
    }

    pub fn from_rational(m: u32, d: &Integer, c: impl Into<Rational>) -> Self {
        let mut r = Self::zero(m, d);
        r.coeffs[0] = c.into();
        r
    }

    /// t^e reduced with t^m = d.
    pub fn t_pow(m: u32, d: &Integer, e: u32) -> Self {
        let mut r = Self::zero(m, d);
        let d_part = d.clone().pow(e / m);
        r.coeffs[(e % m) as usize] = Rational::from(d_part);
        r
    }

    pub fn degree_bound(&self) -> u32 {
        self.coeffs.len() as u32
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        RadicalExt {
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| Rational::from(a + b))
                .collect(),
            d: self.d.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RadicalExt {
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| Rational::from(a - b))
                .collect(),
            d: self.d.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RadicalExt {
            coeffs: self.coeffs.iter().map(|a| Rational::from(a * c)).collect(),
            d: self.d.clone(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = self.coeffs.len();
        let mut out = Self::zero(m as u32, &self.d);
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if *b == 0 {
                    continue;
                }
                let prod = Rational::from(a * b);
                if i + j >= m {
                    out.coeffs[i + j - m] += prod * &self.d;
                } else {
                    out.coeffs[i + j] += prod;
                }
            }
        }
        out
    }

    /// Value at a chosen root t of t^m = d.
    pub fn eval(&self, t: &ComplexBig) -> ComplexBig {
        let bits = t.prec().0;
        let mut acc = Complex::new(bits);
        let mut tp = Complex::with_val(bits, 1);
        for c in &self.coeffs {
            if *c != 0 {
                acc += Complex::with_val(bits, &tp * Float::with_val(bits, c));
            }
            tp *= t;
        }
        acc
    }
}

impl fmt::Display for RadicalExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(e, c)| match e {
                0 => c.to_string(),
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{e}"),
            })
            .collect();
        let poly = if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        };
        let m = self.coeffs.len();
        if m == 1 {
            write!(f, "{poly} mod t - {}", self.d)
        } else {
            write!(f, "{poly} mod t^{m} - {}", self.d)
        }
    }
}

/// G in the variables a_{i,j} (i = 1..k, j = 1..d_i-1) then b_s (s = 1..i_X-1),
/// with coefficients in Q[t]/(t^{i_X} - d).
#[derive(Debug, Clone)]
pub struct ChartPolynomial {
    pub model: CiModel,
    pub branch: u32,
    pub names: Vec<String>,
    terms: HashMap<Exponents, RadicalExt>,
}

pub fn chart_variable_names(model: &CiModel) -> Vec<String> {
    model
        .var_names()
        .iter()
        .map(|n| {
            n.strip_prefix('x')
                .map(|rest| format!("a{rest}"))
                .or_else(|| n.strip_prefix('y').map(|rest| format!("b{rest}")))
                .unwrap_or_else(|| n.clone())
        })
        .collect()
}

impl ChartPolynomial {
    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn coeff(&self, exps: &[i32]) -> RadicalExt {
        self.terms
            .get(&Exponents::new(exps.to_vec()))
            .cloned()
            .unwrap_or_else(|| RadicalExt::zero(self.model.index(), self.model.dconst()))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms of total degree `deg`.
    pub fn homogeneous_part(&self, deg: i64) -> Vec<(&Exponents, &RadicalExt)> {
        let mut v: Vec<_> = self
            .terms
            .iter()
            .filter(|(e, _)| e.total_degree() == deg)
            .collect();
        v.sort_by(|a, b| b.0.grlex_cmp(a.0));
        v
    }

    pub fn low_order_vanishes(&self) -> bool {
        self.homogeneous_part(0).is_empty() && self.homogeneous_part(1).is_empty()
    }
}

/// Expand G exactly. Constant and linear parts must vanish.
pub fn build_chart_polynomial(model: &CiModel, branch: u32) -> Result<ChartPolynomial, HessianError> {
    let n = model.dim() as usize;
    let nv = n + 1; // chart variables then t
    let t_var = n;
    let var = |v| LaurentPoly::var(nv, v);
    let cst = |c: i64| LaurentPoly::constant(nv, c);

    let mut first = LaurentPoly::one(nv);
    for (block, &d) in model.x_blocks().iter().zip(model.degrees()) {
        let mut lin = cst(d as i64);
        for v in block.clone() {
            lin = lin.add(&var(v))?;
        }
        first = first.mul(&lin.pow(d))?;
    }
    let mut sum_b_minus_t = LaurentPoly::zero(nv).sub(&var(t_var))?;
    for v in model.y_block() {
        sum_b_minus_t = sum_b_minus_t.add(&var(v))?;
    }
    let mut second = sum_b_minus_t;
    for block in model.x_blocks() {
        for v in block {
            second = second.mul(&var(v).add(&cst(1))?)?;
        }
    }
    for v in model.y_block() {
        second = second.mul(&var(v).add(&var(t_var))?)?;
    }
    let g = first.add(&second)?;

    let (m, d) = (model.index(), model.dconst());
    let mut terms: HashMap<Exponents, RadicalExt> = HashMap::new();
    for (e, c) in g.terms() {
        let te = e[t_var];
        debug_assert!(te >= 0);
        let key = Exponents::new(e.as_slice()[..n].to_vec());
        let contrib = RadicalExt::t_pow(m, d, te as u32).scale(c);
        let entry = terms.entry(key).or_insert_with(|| RadicalExt::zero(m, d));
        *entry = entry.add(&contrib);
    }
    terms.retain(|_, v| !v.is_zero());
    let chart = ChartPolynomial {
        model: model.clone(),
        branch,
        names: chart_variable_names(model),
        terms,
    };
    for (deg, order) in [(0, "constant"), (1, "linear")] {
        let part = chart.homogeneous_part(deg);
        if !part.is_empty() {
            let detail = part
                .iter()
                .map(|(e, c)| format!("{:?}: {c}", e.as_slice()))
                .collect::<Vec<_>>()
                .join("; ");
            return Err(HessianError::NonvanishingLowOrder { order, detail });
        }
    }
    Ok(chart)
}

pub type ExactMatrix = Vec<Vec<RadicalExt>>;

/// H_uu = 2 * coeff(v_u^2), H_uv = coeff(v_u v_v).
pub fn extract_quadratic_matrix(g: &ChartPolynomial) -> ExactMatrix {
    let n = g.nvars();
    let (m, d) = (g.model.index(), g.model.dconst());
    let mut h = vec![vec![RadicalExt::zero(m, d); n]; n];
    for (e, c) in g.homogeneous_part(2) {
        let support: Vec<usize> = (0..n).filter(|&v| e[v] != 0).collect();
        match support.as_slice() {
            [u] => h[*u][*u] = c.scale(&Rational::from(2)),
            [u, v] => {
                h[*u][*v] = c.clone();
                h[*v][*u] = c.clone();
            }
            _ => unreachable!("degree-2 monomial with nonnegative exponents"),
        }
    }
    h
}

/// Diagonal convention for the x-blocks of the closed-form matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// x-block diagonal 2 D_i.
    DoubledDiagonal,
    /// x-block diagonal D_i, the Hessian of the expanded G.
    Expansion,
}

/// D_i = (d_i - 1) d / d_i.
pub fn big_d(model: &CiModel, di: u32) -> Rational {
    Rational::from((Integer::from(model.dconst() * (di - 1)), Integer::from(di)))
}

/// Block-diagonal closed form: per degree a (d_i - 1)-block with off-diagonal
/// M_i = D_i - d, and a (i_X - 1)-block with diagonal 2 t^{i_X-2} and
/// off-diagonal t^{i_X-2}.
pub fn closed_form_matrix(model: &CiModel, convention: Convention) -> ExactMatrix {
    let n = model.dim() as usize;
    let (m, d) = (model.index(), model.dconst());
    let mut h = vec![vec![RadicalExt::zero(m, d); n]; n];
    for (block, &di) in model.x_blocks().iter().zip(model.degrees()) {
        let dd = big_d(model, di);
        let mm = Rational::from(&dd - d);
        let diag = match convention {
            Convention::DoubledDiagonal => Rational::from(&dd * 2u32),
            Convention::Expansion => dd.clone(),
        };
        for u in block.clone() {
            for v in block.clone() {
                let val = if u == v { diag.clone() } else { mm.clone() };
                h[u][v] = RadicalExt::from_rational(m, d, val);
            }
        }
    }
    if m >= 2 {
        let tp = RadicalExt::t_pow(m, d, m - 2);
        for u in model.y_block() {
            for v in model.y_block() {
                h[u][v] = if u == v { tp.scale(&Rational::from(2)) } else { tp.clone() };
            }
        }
    }
    h
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionMatch {
    pub doubled_diagonal: bool,
    pub expansion: bool,
}

impl ConventionMatch {
    pub fn unique(&self) -> Option<Convention> {
        match (self.doubled_diagonal, self.expansion) {
            (true, false) => Some(Convention::DoubledDiagonal),
            (false, true) => Some(Convention::Expansion),
            _ => None,
        }
    }
}

pub fn convention_match(extracted: &ExactMatrix, model: &CiModel) -> ConventionMatch {
    ConventionMatch {
        doubled_diagonal: *extracted == closed_form_matrix(model, Convention::DoubledDiagonal),
        expansion: *extracted == closed_form_matrix(model, Convention::Expansion),
    }
}

/// Determinant of the m x m matrix with diagonal b and off-diagonal a.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformBlockDet {
    pub determinant: Rational,
    pub is_zero: bool,
}

/// det = (b - a)^{m-1} (b + (m-1) a).
pub fn easy_lemma_det(a: &Rational, b: &Rational, m: u32) -> UniformBlockDet {
    assert!(m >= 1, "matrix size must be positive");
    let diff = Rational::from(b - a);
    let mut det = b + Rational::from(a * (m - 1));
    for _ in 1..m {
        det *= &diff;
    }
    let is_zero = det == 0;
    UniformBlockDet { determinant: det, is_zero }
}

#[derive(Debug, Clone)]
pub struct Factor {
    pub value: RadicalExt,
    pub exponent: u32,
}

#[derive(Debug, Clone)]
pub struct BlockFactors {
    pub label: String,
    pub size: u32,
    pub diagonal: RadicalExt,
    pub off_diagonal: RadicalExt,
    /// (b - a) with exponent size - 1, then (b + (size - 1) a) with exponent 1.
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone)]
pub struct Nondegeneracy {
    pub blocks: Vec<BlockFactors>,
    /// Every factor with positive exponent is a nonzero ring element.
    pub exact_nonzero: bool,
    /// Every such factor is also nonzero at t = alpha (positive real root).
    pub numeric_nonzero: bool,
}

impl Nondegeneracy {
    pub fn nondegenerate(&self) -> bool {
        self.exact_nonzero && self.numeric_nonzero
    }
}

fn block_factors(label: String, size: u32, diag: RadicalExt, off: RadicalExt) -> BlockFactors {
    let k = Rational::from(size - 1);
    let factors = vec![
        Factor {
            value: diag.sub(&off),
            exponent: size - 1,
        },
        Factor {
            value: diag.add(&off.scale(&k)),
            exponent: 1,
        },
    ];
    BlockFactors {
        label,
        size,
        diagonal: diag,
        off_diagonal: off,
        factors,
    }
}

/// Factors (b - a) and (b + (m - 1) a) of every block of the closed-form matrix.
pub fn block_nondegeneracy(model: &CiModel, convention: Convention, prec: Precision) -> Nondegeneracy {
    let h = closed_form_matrix(model, convention);
    let (m, d) = (model.index(), model.dconst());
    let mut blocks = Vec::new();
    for (i, block) in model.x_blocks().into_iter().enumerate() {
        let size = block.len() as u32;
        let off = if size > 1 {
            h[block.start][block.start + 1].clone()
        } else {
            RadicalExt::from_rational(m, d, big_d(model, model.degrees()[i]) - Rational::from(d))
        };
        blocks.push(block_factors(format!("x{}", i + 1), size, h[block.start][block.start].clone(), off));
    }
    let yb = model.y_block();
    if !yb.is_empty() {
        let size = yb.len() as u32;
        let tp = RadicalExt::t_pow(m, d, m - 2);
        blocks.push(block_factors("y".to_string(), size, h[yb.start][yb.start].clone(), tp));
    }
    let alpha = Complex::with_val(prec.bits(), numeric::real_root(d, m, prec));
    let live = || blocks.iter().flat_map(|b| b.factors.iter()).filter(|f| f.exponent > 0);
    let exact_nonzero = live().all(|f| !f.value.is_zero());
    let numeric_nonzero = live().all(|f| {
        let v = f.value.eval(&alpha);
        !(v.real().is_zero() && v.imag().is_zero())
            && numeric::abs(&v) > numeric::pow10(prec, -40)
    });
    Nondegeneracy {
        blocks,
        exact_nonzero,
        numeric_nonzero,
    }
}

#[derive(Debug, Clone)]
pub struct HessianReport {
    pub numeric_hessian: Vec<Vec<ComplexBig>>,
    pub singular_values: Vec<Float>,
    pub rank: usize,
    pub certified: bool,
    pub branch: Option<u32>,
    pub extracted_matrix: ExactMatrix,
    pub closed_form_expansion: ExactMatrix,
    pub closed_form_doubled: ExactMatrix,
    pub convention_match: ConventionMatch,
    pub chart_low_order_vanishes: bool,
    pub block_factors: Nondegeneracy,
    /// Factor values at t = alpha * exp(2 pi i r / i_X) for the point's branch.
    pub branch_factor_values: Vec<ComplexBig>,
}

/// Numeric rank of the Hessian of f_X at `point`, bundled with the exact
/// chart analysis. Rank n certifies an ordinary double point.
pub fn certify_odp(
    model: &CiModel,
    point: &CriticalPointRecord,
    prec: Precision,
    tol: &Tolerances,
) -> Result<HessianReport, HessianError> {
    let f = model.build_givental();
    let numeric_hessian = f.hessian_at(&point.coordinates, prec)?;
    let singular_values = numeric::singular_values(&numeric_hessian);
    let threshold = singular_values
        .first()
        .map(|s| Float::with_val(prec.bits(), s * numeric::float(prec, tol.rank_threshold)))
        .unwrap_or_else(|| Float::new(prec.bits()));
    let rank = singular_values.iter().filter(|s| **s > threshold && !s.is_zero()).count();

    let branch = point.branch.unwrap_or(0);
    let chart = build_chart_polynomial(model, branch)?;
    let extracted_matrix = extract_quadratic_matrix(&chart);
    let convention_match = convention_match(&extracted_matrix, model);
    let block_factors = block_nondegeneracy(model, Convention::Expansion, prec);
    let alpha = numeric::real_root(model.dconst(), model.index(), prec);
    let t = numeric::root_of_unity(branch, model.index(), prec) * alpha;
    let branch_factor_values = block_factors
        .blocks
        .iter()
        .flat_map(|b| b.factors.iter())
        .filter(|f| f.exponent > 0)
        .map(|f| f.value.eval(&t))
        .collect();
    Ok(HessianReport {
        rank,
        certified: rank == model.dim() as usize,
        branch: point.branch,
        numeric_hessian,
        singular_values,
        closed_form_expansion: closed_form_matrix(model, Convention::Expansion),
        closed_form_doubled: closed_form_matrix(model, Convention::DoubledDiagonal),
        extracted_matrix,
        convention_match,
        chart_low_order_vanishes: chart.low_order_vanishes(),
        block_factors,
        branch_factor_values,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FactorJson {
    pub value: String,
    pub exponent: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BlockJson {
    pub label: String,
    pub size: u32,
    pub diagonal: String,
    pub off_diagonal: String,
    pub factors: Vec<FactorJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HessianReportJson {
    pub branch: Option<u32>,
    pub numeric_hessian: Vec<Vec<DecimalComplex>>,
    pub singular_values: Vec<String>,
    pub rank: usize,
    pub certified: bool,
    pub extracted_matrix: Vec<Vec<String>>,
    pub closed_form_expansion: Vec<Vec<String>>,
    pub closed_form_doubled: Vec<Vec<String>>,
    pub convention_match: ConventionMatch,
    pub chart_low_order_vanishes: bool,
    pub blocks: Vec<BlockJson>,
    pub factors_nonzero_exact: bool,
    pub factors_nonzero_numeric: bool,
    pub branch_factor_values: Vec<DecimalComplex>,
}

fn exact_strings(m: &ExactMatrix) -> Vec<Vec<String>> {
    m.iter().map(|row| row.iter().map(|e| e.to_string()).collect()).collect()
}

impl HessianReport {
    pub fn to_json(&self, digits: usize) -> HessianReportJson {
        HessianReportJson {
            branch: self.branch,
            numeric_hessian: self
                .numeric_hessian
                .iter()
                .map(|row| row.iter().map(|z| DecimalComplex::new(z, digits)).collect())
                .collect(),
            singular_values: self.singular_values.iter().map(|s| numeric::decimal(s, digits)).collect(),
            rank: self.rank,
            certified: self.certified,
            extracted_matrix: exact_strings(&self.extracted_matrix),
            closed_form_expansion: exact_strings(&self.closed_form_expansion),
            closed_form_doubled: exact_strings(&self.closed_form_doubled),
            convention_match: self.convention_match,
            chart_low_order_vanishes: self.chart_low_order_vanishes,
            blocks: self
                .block_factors
                .blocks
                .iter()
                .map(|b| BlockJson {
                    label: b.label.clone(),
                    size: b.size,
                    diagonal: b.diagonal.to_string(),
                    off_diagonal: b.off_diagonal.to_string(),
                    factors: b
                        .factors
                        .iter()
                        .map(|f| FactorJson {
                            value: f.value.to_string(),
                            exponent: f.exponent,
                        })
                        .collect(),
                })
                .collect(),
            factors_nonzero_exact: self.block_factors.exact_nonzero,
            factors_nonzero_numeric: self.block_factors.numeric_nonzero,
            branch_factor_values: self
                .branch_factor_values
                .iter()
                .map(|z| DecimalComplex::new(z, digits))
                .collect(),
        }
    }
}
