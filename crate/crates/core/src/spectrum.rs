//! Spectrum of quantum multiplication by c_1 = i_X h on the h-subring
//! span{h^0, ..., h^n} with h^{n+1} = d h^{n+1-i_X} (q = 1).
//!
//! The primitive part of the cohomology only adds zero eigenvalues and is
//! not modeled.

use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::model::CiModel;
use crate::numeric::{self, ComplexBig, DecimalComplex, Precision};

pub const PRIMITIVE_NOTE: &str = "primitive part omitted";

/// Matrix of multiplication by h in the basis h^0..h^n: column j < n maps
/// h^j to h^{j+1}; the last column carries d in row n + 1 - i_X.
pub fn companion_matrix(model: &CiModel) -> Vec<Vec<Integer>> {
    let size = model.dim() as usize + 1;
    let mut c = vec![vec![Integer::new(); size]; size];
    for j in 0..size - 1 {
        c[j + 1][j] = Integer::from(1);
    }
    c[size - model.index() as usize][size - 1] = model.dconst().clone();
    c
}

/// Coefficients of det(lambda I - A), lowest degree first, by
/// Faddeev-LeVerrier in exact rationals.
pub fn characteristic_polynomial(a: &[Vec<Integer>]) -> Vec<Integer> {
    let n = a.len();
    let a: Vec<Vec<Rational>> = a
        .iter()
        .map(|row| row.iter().map(Rational::from).collect())
        .collect();
    let mut coeffs = vec![Rational::new(); n + 1];
    coeffs[n] = Rational::from(1);
    // M_0 = 0, c_n = 1; M_k = A M_{k-1} + c_{n-k+1} I; c_{n-k} = -tr(A M_k) / k
    let mut m = vec![vec![Rational::new(); n]; n];
    for k in 1..=n {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        let am = matmul(&a, &m);
        let trace: Rational = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -trace / Rational::from(k as u32);
        m = am;
    }
    coeffs
        .into_iter()
        .map(|c| {
            debug_assert_eq!(*c.denom(), 1);
            c.into_numer_denom().0
        })
        .collect()
}

fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let mut out = vec![vec![Rational::new(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                if b[k][j] != 0 {
                    out[i][j] += Rational::from(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    out
}

/// lambda^{n+1} - d lambda^{n+1-i_X}, lowest degree first.
pub fn expected_characteristic_polynomial(model: &CiModel) -> Vec<Integer> {
    let size = model.dim() as usize + 1;
    let mut c = vec![Integer::new(); size + 1];
    c[size] = Integer::from(1);
    c[size - model.index() as usize] -= model.dconst();
    c
}

/// Eigenvalues of c_1 = i_X h: zero with multiplicity n + 1 - i_X, then
/// i_X alpha exp(2 pi i r / i_X) for r = 0..i_X-1.
pub fn c1_spectrum(model: &CiModel, prec: Precision) -> Vec<ComplexBig> {
    let zeros = (model.dim() + 1 - model.index()) as usize;
    let alpha = numeric::real_root(model.dconst(), model.index(), prec);
    let mut out = vec![Complex::new(prec.bits()); zeros];
    for r in 0..model.index() {
        let mu = numeric::root_of_unity(r, model.index(), prec) * &alpha;
        out.push(mu * model.index());
    }
    out
}

/// Eigenvalues of i_X times the companion matrix by dense QR. Simple roots
/// come out to working precision; the defective zero block only to about
/// eps^{1/multiplicity}.
pub fn c1_spectrum_qr(model: &CiModel, prec: Precision) -> Vec<ComplexBig> {
    let h: Vec<Vec<ComplexBig>> = companion_matrix(model)
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| Complex::with_val(prec.bits(), x * Integer::from(model.index())))
                .collect()
        })
        .collect();
    numeric::hessenberg_eigenvalues(h)
}

fn sort_by_arg(v: &mut [ComplexBig], prec: Precision) {
    let snap = numeric::pow10(prec, -30);
    v.sort_by(|a, b| numeric::cmp_float(&numeric::arg_key(a, &snap), &numeric::arg_key(b, &snap)));
}

fn rel_err(a: &ComplexBig, b: &ComplexBig) -> Float {
    let bits = a.prec().0;
    let diff = numeric::abs(&Complex::with_val(bits, a - b));
    Float::with_val(bits, diff / numeric::abs(a))
}

/// Greedy pairing: each eigenvalue in argument order takes the nearest
/// unused value. Returns (eigenvalue index, value index, relative error).
fn greedy_pairs(eig: &[ComplexBig], vals: &[ComplexBig]) -> Vec<(usize, usize, Float)> {
    let mut used = vec![false; vals.len()];
    let mut pairs = Vec::new();
    for (i, e) in eig.iter().enumerate() {
        let best = vals
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, v)| (j, rel_err(e, v)))
            .min_by(|a, b| numeric::cmp_float(&a.1, &b.1));
        if let Some((j, err)) = best {
            used[j] = true;
            pairs.push((i, j, err));
        }
    }
    pairs
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub eigenvalues_c1: Vec<ComplexBig>,
    pub zero_multiplicity: usize,
    /// Sorted by argument.
    pub nonzero_values: Vec<ComplexBig>,
    /// Sorted by argument.
    pub critical_values: Vec<ComplexBig>,
    pub pairing: Vec<(usize, usize)>,
    pub matched: bool,
    pub max_pairing_error: Option<Float>,
    pub rotation_closed: bool,
    pub char_poly_exact: bool,
    pub qr_nonzero_max_error: Float,
    pub qr_zero_cluster_max_abs: Float,
    pub note: &'static str,
}

/// Compare the nonzero c_1-spectrum with located critical values. Matched
/// iff both lists have i_X entries and every pairing error is below `tol`
/// (relative).
pub fn match_spectrum(
    model: &CiModel,
    critical_values: &[ComplexBig],
    tol: f64,
    prec: Precision,
) -> SpectrumReport {
    let eig = c1_spectrum(model, prec);
    let ix = model.index() as usize;
    let zero_multiplicity = eig.len() - ix;
    let mut nonzero_values = eig[zero_multiplicity..].to_vec();
    sort_by_arg(&mut nonzero_values, prec);
    let mut crit = critical_values.to_vec();
    sort_by_arg(&mut crit, prec);

    let pairs = greedy_pairs(&nonzero_values, &crit);
    let max_pairing_error = pairs
        .iter()
        .map(|p| p.2.clone())
        .max_by(numeric::cmp_float);
    let tol_f = numeric::float(prec, tol);
    let matched = crit.len() == ix
        && pairs.len() == ix
        && pairs.iter().all(|p| p.2 < tol_f);

    let eps = numeric::root_of_unity(1, model.index(), prec);
    let rotated: Vec<ComplexBig> = nonzero_values
        .iter()
        .map(|v| Complex::with_val(prec.bits(), v * &eps))
        .collect();
    let rotation_closed = greedy_pairs(&rotated, &nonzero_values)
        .iter()
        .all(|p| p.2 < tol_f);

    let char_poly_exact =
        characteristic_polynomial(&companion_matrix(model)) == expected_characteristic_polynomial(model);

    let mut qr = c1_spectrum_qr(model, prec);
    qr.sort_by(|a, b| numeric::cmp_float(&numeric::abs(a), &numeric::abs(b)));
    let qr_zero_cluster_max_abs = numeric::max_abs(&qr[..zero_multiplicity], prec);
    let mut qr_nonzero = qr[zero_multiplicity..].to_vec();
    sort_by_arg(&mut qr_nonzero, prec);
    let qr_nonzero_max_error = greedy_pairs(&nonzero_values, &qr_nonzero)
        .into_iter()
        .map(|p| p.2)
        .fold(Float::new(prec.bits()), |a, b| if b > a { b } else { a });

    SpectrumReport {
        eigenvalues_c1: eig,
        zero_multiplicity,
        nonzero_values,
        critical_values: crit,
        pairing: pairs.iter().map(|p| (p.0, p.1)).collect(),
        matched,
        max_pairing_error,
        rotation_closed,
        char_poly_exact,
        qr_nonzero_max_error,
        qr_zero_cluster_max_abs,
        note: PRIMITIVE_NOTE,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectrumReportJson {
    pub companion_matrix: Vec<Vec<String>>,
    pub characteristic_polynomial: Vec<String>,
    pub char_poly_exact: bool,
    pub eigenvalues_c1: Vec<DecimalComplex>,
    pub zero_multiplicity: usize,
    pub nonzero_values: Vec<DecimalComplex>,
    pub critical_values: Vec<DecimalComplex>,
    pub pairing: Vec<[usize; 2]>,
    pub matched: bool,
    pub max_pairing_error: Option<String>,
    pub rotation_closed: bool,
    pub qr_nonzero_max_error: String,
    pub qr_zero_cluster_max_abs: String,
    pub note: String,
}

impl SpectrumReport {
    pub fn to_json(&self, model: &CiModel, digits: usize) -> SpectrumReportJson {
        let dc = |v: &[ComplexBig]| v.iter().map(|z| DecimalComplex::new(z, digits)).collect();
        SpectrumReportJson {
            companion_matrix: companion_matrix(model)
                .iter()
                .map(|row| row.iter().map(|x| x.to_string()).collect())
                .collect(),
            characteristic_polynomial: characteristic_polynomial(&companion_matrix(model))
                .iter()
                .map(|x| x.to_string())
                .collect(),
            char_poly_exact: self.char_poly_exact,
            eigenvalues_c1: dc(&self.eigenvalues_c1),
            zero_multiplicity: self.zero_multiplicity,
            nonzero_values: dc(&self.nonzero_values),
            critical_values: dc(&self.critical_values),
            pairing: self.pairing.iter().map(|p| [p.0, p.1]).collect(),
            matched: self.matched,
            max_pairing_error: self.max_pairing_error.as_ref().map(|e| numeric::decimal(e, 6)),
            rotation_closed: self.rotation_closed,
            qr_nonzero_max_error: numeric::decimal(&self.qr_nonzero_max_error, 6),
            qr_zero_cluster_max_abs: numeric::decimal(&self.qr_zero_cluster_max_abs, 6),
            note: self.note.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> CiModel {
        s.parse().unwrap()
    }

    fn ints(rows: &[Vec<i64>]) -> Vec<Vec<Integer>> {
        rows.iter().map(|r| r.iter().map(|&x| Integer::from(x)).collect()).collect()
    }

    #[test]
    fn companion_examples() {
        assert_eq!(companion_matrix(&m("@1")), ints(&[vec![0, 1], vec![1, 0]]));
        assert_eq!(
            companion_matrix(&m("3@3")),
            ints(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 27]])
        );
        assert_eq!(
            companion_matrix(&m("2@3")),
            ints(&[vec![0, 0, 0], vec![1, 0, 4], vec![0, 1, 0]])
        );
    }

    #[test]
    fn faddeev_leverrier_small() {
        // [[1,2],[3,4]]: lambda^2 - 5 lambda - 2
        let a = ints(&[vec![1, 2], vec![3, 4]]);
        let want: Vec<Integer> = [-2, -5, 1].iter().map(|&x| Integer::from(x)).collect();
        assert_eq!(characteristic_polynomial(&a), want);
        for s in ["@1", "@3", "2@3", "3@3", "4@4", "2,3@5"] {
            let model = m(s);
            assert_eq!(
                characteristic_polynomial(&companion_matrix(&model)),
                expected_characteristic_polynomial(&model),
                "{s}"
            );
        }
    }

    #[test]
    fn c1_examples() {
        let prec = Precision::default();
        let close = |z: &ComplexBig, re: f64, im: f64| {
            numeric::abs(&Complex::with_val(256, z - numeric::complex(prec, re, im))) < 1e-60
        };
        let p1 = c1_spectrum(&m("@1"), prec);
        assert!(close(&p1[0], 2.0, 0.0) && close(&p1[1], -2.0, 0.0));
        let q = c1_spectrum(&m("2@3"), prec);
        assert_eq!(q.len(), 3);
        assert!(close(&q[0], 0.0, 0.0) && close(&q[1], 4.0, 0.0) && close(&q[2], -4.0, 0.0));
        let p2 = c1_spectrum(&m("@2"), prec);
        let w = numeric::complex(prec, -1.5, 1.5 * 3f64.sqrt());
        assert!(numeric::abs(&Complex::with_val(256, &p2[1] - w)) < 1e-14);
    }

    #[test]
    fn match_against_expected_values() {
        let prec = Precision::default();
        for s in ["@3", "2@3", "3@4", "2,3@5"] {
            let model = m(s);
            let mut vals = model.expected_critical_values(prec);
            vals.reverse();
            let rep = match_spectrum(&model, &vals, 1e-20, prec);
            assert!(rep.matched, "{s}");
            assert!(rep.rotation_closed);
            assert!(rep.char_poly_exact);
            assert!(rep.qr_nonzero_max_error < 1e-20, "{s}");
            assert_eq!(rep.zero_multiplicity, (model.dim() + 1 - model.index()) as usize);
        }
        let model = m("2@3");
        let vals = model.expected_critical_values(prec);
        assert!(!match_spectrum(&model, &vals[..1], 1e-20, prec).matched);
        let off = vec![vals[0].clone(), Complex::with_val(256, &vals[1] * 1.001f64)];
        assert!(!match_spectrum(&model, &off, 1e-20, prec).matched);
    }
}
