//! Arbitrary-precision numeric helpers: precision handling, roots of unity,
//! dense complex linear solves and small eigenvalue solvers.

use std::cmp::Ordering;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Complex number with an explicit MPFR precision.
pub type ComplexBig = Complex;

pub const MIN_PRECISION_BITS: u32 = 64;
pub const DEFAULT_PRECISION_BITS: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("precision must be at least {MIN_PRECISION_BITS} bits, got {0}")]
pub struct PrecisionError(pub u32);

/// Working precision in bits; always at least 64.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Precision(u32);

impl Precision {
    pub fn new(bits: u32) -> Result<Self, PrecisionError> {
        if bits < MIN_PRECISION_BITS {
            Err(PrecisionError(bits))
        } else {
            Ok(Precision(bits))
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `2^-(bits/2)`, the tolerance used for identities that lose about half
    /// the working digits.
    pub fn half_tolerance(self) -> Float {
        Float::with_val(self.0, Float::i_exp(1, -((self.0 / 2) as i32)))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision(DEFAULT_PRECISION_BITS)
    }
}

impl TryFrom<u32> for Precision {
    type Error = PrecisionError;
    fn try_from(v: u32) -> Result<Self, Self::Error> {
        Precision::new(v)
    }
}

impl From<Precision> for u32 {
    fn from(p: Precision) -> u32 {
        p.0
    }
}

pub fn float(prec: Precision, v: f64) -> Float {
    Float::with_val(prec.bits(), v)
}

pub fn complex(prec: Precision, re: f64, im: f64) -> ComplexBig {
    Complex::with_val(prec.bits(), (re, im))
}

/// `10^exp` at the given precision.
pub fn pow10(prec: Precision, exp: i32) -> Float {
    Float::with_val(prec.bits(), 10).pow(exp)
}

/// `exp(2 pi i r / m)`.
pub fn root_of_unity(r: u32, m: u32, prec: Precision) -> ComplexBig {
    let bits = prec.bits();
    if m == 0 || r.is_multiple_of(m) {
        return Complex::with_val(bits, 1);
    }
    // Exact values where they exist keep symmetric outputs exact.
    let r = r % m;
    if 4 * r == m {
        return Complex::with_val(bits, (0, 1));
    }
    if 2 * r == m {
        return Complex::with_val(bits, -1);
    }
    if 4 * r == 3 * m {
        return Complex::with_val(bits, (0, -1));
    }
    let pi = Float::with_val(bits, Constant::Pi);
    let theta = Float::with_val(bits, &pi * (2 * r)) / m;
    let (s, c) = theta.sin_cos(Float::new(bits));
    Complex::with_val(bits, (c, s))
}

/// Positive real `m`-th root of a nonnegative integer.
pub fn real_root(d: &Integer, m: u32, prec: Precision) -> Float {
    let bits = prec.bits();
    let x = Float::with_val(bits, d);
    if m == 1 {
        return x;
    }
    if let Some(exact) = exact_integer_root(d, m) {
        return Float::with_val(bits, &exact);
    }
    x.root(m)
}

fn exact_integer_root(d: &Integer, m: u32) -> Option<Integer> {
    let r = Integer::from(d.root_ref(m));
    if r.clone().pow(m) == *d {
        Some(r)
    } else {
        None
    }
}

pub fn abs(z: &ComplexBig) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

pub fn max_abs(v: &[ComplexBig], prec: Precision) -> Float {
    v.iter()
        .map(abs)
        .fold(Float::new(prec.bits()), |acc, x| if x > acc { x } else { acc })
}

/// Euclidean norm of a complex vector.
pub fn norm2(v: &[ComplexBig]) -> Float {
    let bits = v.first().map_or(64, |z| z.prec().0);
    v.iter()
        .fold(Float::new(bits), |acc, z| acc + Float::with_val(bits, z.norm_ref()))
        .sqrt()
}

/// Argument normalized to `[0, 2 pi)`, with values within `snap` of a full
/// turn folded to 0 so that negative reals sort as `pi` irrespective of the
/// sign of a rounding-level imaginary part.
pub fn arg_key(z: &ComplexBig, snap: &Float) -> Float {
    let bits = z.prec().0;
    let scale = abs(z);
    let im_tiny = Float::with_val(bits, z.imag().abs_ref()) <= Float::with_val(bits, &scale * snap);
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    if im_tiny {
        return if z.real().is_sign_negative() && !z.real().is_zero() {
            Float::with_val(bits, Constant::Pi)
        } else {
            Float::new(bits)
        };
    }
    let mut a = Float::with_val(bits, z.arg_ref());
    if a.is_sign_negative() {
        a += &two_pi;
    }
    a
}

pub fn cmp_float(a: &Float, b: &Float) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot falls below `rel_threshold` times the largest
/// entry of `a`.
pub fn solve_complex(
    mut a: Vec<Vec<ComplexBig>>,
    mut b: Vec<ComplexBig>,
    rel_threshold: &Float,
) -> Option<Vec<ComplexBig>> {
    let n = b.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let bits = b[0].prec().0;
    let scale = a
        .iter()
        .flatten()
        .map(abs)
        .fold(Float::new(bits), |acc, x| if x > acc { x } else { acc });
    if scale.is_zero() {
        return None;
    }
    let cutoff = Float::with_val(bits, &scale * rel_threshold);
    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, abs(&a[r][col])))
            .max_by(|x, y| cmp_float(&x.1, &y.1))
            .expect("non-empty range");
        if piv_abs <= cutoff {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Complex::with_val(bits, a[col][col].recip_ref());
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = Complex::with_val(bits, &a[r][col] * &inv);
            for c in col..n {
                let t = Complex::with_val(bits, &factor * &a[col][c]);
                a[r][c] -= t;
            }
            let t = Complex::with_val(bits, &factor * &b[col]);
            b[r] -= t;
        }
    }
    let mut x = vec![Complex::new(bits); n];
    for r in (0..n).rev() {
        let mut s = b[r].clone();
        for c in r + 1..n {
            s -= Complex::with_val(bits, &a[r][c] * &x[c]);
        }
        x[r] = s / &a[r][r];
    }
    Some(x)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending.
pub fn symmetric_eigenvalues(mut a: Vec<Vec<Float>>) -> Vec<Float> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let bits = a[0][0].prec();
    let frob = a
        .iter()
        .flatten()
        .fold(Float::new(bits), |acc, x| acc + Float::with_val(bits, x.square_ref()));
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 8));
    let stop = Float::with_val(bits, &frob * &eps) * &eps;
    for _sweep in 0..100 {
        let mut off = Float::new(bits);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += Float::with_val(bits, a[i][j].square_ref());
                }
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].is_zero() {
                    continue;
                }
                // theta = (a_qq - a_pp) / (2 a_pq), t = sgn(theta) / (|theta| + sqrt(theta^2 + 1))
                let theta = Float::with_val(bits, &a[q][q] - &a[p][p]) / Float::with_val(bits, &a[p][q] * 2u32);
                let root = (Float::with_val(bits, theta.square_ref()) + 1u32).sqrt();
                let denom = Float::with_val(bits, theta.abs_ref()) + root;
                let mut t = Float::with_val(bits, 1) / denom;
                if theta.is_sign_negative() {
                    t = -t;
                }
                let c = (Float::with_val(bits, t.square_ref()) + 1u32).sqrt().recip();
                let s = Float::with_val(bits, &t * &c);
                for k in 0..n {
                    let akp = a[k][p].clone();
                    let akq = a[k][q].clone();
                    a[k][p] = Float::with_val(bits, &c * &akp) - Float::with_val(bits, &s * &akq);
                    a[k][q] = Float::with_val(bits, &s * &akp) + Float::with_val(bits, &c * &akq);
                }
                for k in 0..n {
                    let apk = a[p][k].clone();
                    let aqk = a[q][k].clone();
                    a[p][k] = Float::with_val(bits, &c * &apk) - Float::with_val(bits, &s * &aqk);
                    a[q][k] = Float::with_val(bits, &s * &apk) + Float::with_val(bits, &c * &aqk);
                }
            }
        }
    }
    let mut ev: Vec<Float> = (0..n).map(|i| a[i][i].clone()).collect();
    ev.sort_by(cmp_float);
    ev
}

/// Singular values of a complex matrix, sorted descending.
///
/// Uses the eigenvalues of `A^H A` through its real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, in which every eigenvalue appears twice.
pub fn singular_values(a: &[Vec<ComplexBig>]) -> Vec<Float> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let bits = a[0][0].prec().0;
    let mut gram = vec![vec![Complex::new(bits); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex::new(bits);
            for row in a {
                let conj = Complex::with_val(bits, row[i].conj_ref());
                s += Complex::with_val(bits, &conj * &row[j]);
            }
            gram[i][j] = s;
        }
    }
    let mut emb = vec![vec![Float::new(bits); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let re = gram[i][j].real().clone();
            let im = gram[i][j].imag().clone();
            emb[i][j] = re.clone();
            emb[i + n][j + n] = re;
            emb[i][j + n] = Float::with_val(bits, -&im);
            emb[i + n][j] = im;
        }
    }
    let ev = symmetric_eigenvalues(emb);
    let mut sv: Vec<Float> = ev
        .chunks(2)
        .map(|pair| {
            let m = Float::with_val(bits, &pair[0] + &pair[1]) / 2u32;
            if m.is_sign_negative() {
                Float::new(bits)
            } else {
                m.sqrt()
            }
        })
        .collect();
    sv.sort_by(|x, y| cmp_float(y, x));
    sv
}

/// Eigenvalues of an upper Hessenberg complex matrix by the single-shift QR
/// algorithm with Wilkinson shifts and deflation.
pub fn hessenberg_eigenvalues(mut h: Vec<Vec<ComplexBig>>) -> Vec<ComplexBig> {
    let n = h.len();
    if n == 0 {
        return Vec::new();
    }
    let bits = h[0][0].prec().0;
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 4));
    let norm = h
        .iter()
        .flatten()
        .map(abs)
        .fold(Float::new(bits), |acc, x| if x > acc { x } else { acc });
    let floor = Float::with_val(bits, &norm * &eps);
    let mut eig = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iter = 0usize;
    loop {
        if hi == 0 {
            eig.push(h[0][0].clone());
            break;
        }
        // find the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = abs(&h[lo][lo - 1]);
            let diag = Float::with_val(bits, abs(&h[lo][lo]) + abs(&h[lo - 1][lo - 1]));
            let tol = Float::with_val(bits, &diag * &eps);
            if sub <= tol || sub <= floor {
                h[lo][lo - 1] = Complex::new(bits);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig.push(h[hi][hi].clone());
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 1000 {
            // give up on this block; report the diagonal
            for i in (lo..=hi).rev() {
                eig.push(h[i][i].clone());
            }
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            iter = 0;
            continue;
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift
            let s = Float::with_val(bits, abs(&h[hi][hi - 1]) * 0.75);
            Complex::with_val(bits, &h[hi][hi] + &s)
        } else {
            wilkinson_shift(&h[hi - 1][hi - 1], &h[hi - 1][hi], &h[hi][hi - 1], &h[hi][hi])
        };
        for i in lo..=hi {
            h[i][i] -= &mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let a = h[k][k].clone();
            let b = h[k + 1][k].clone();
            let r2 = Float::with_val(bits, a.norm_ref()) + Float::with_val(bits, b.norm_ref());
            let r = r2.sqrt();
            if r.is_zero() {
                rots.push(None);
                continue;
            }
            let c = Complex::with_val(bits, &a / &r);
            let s = Complex::with_val(bits, &b / &r);
            let cc = Complex::with_val(bits, c.conj_ref());
            let sc = Complex::with_val(bits, s.conj_ref());
            for col in k..=hi {
                let x = h[k][col].clone();
                let y = h[k + 1][col].clone();
                h[k][col] = Complex::with_val(bits, &cc * &x) + Complex::with_val(bits, &sc * &y);
                h[k + 1][col] = Complex::with_val(bits, &c * &y) - Complex::with_val(bits, &s * &x);
            }
            rots.push(Some((c, s)));
        }
        for (idx, rot) in rots.into_iter().enumerate() {
            let k = lo + idx;
            let Some((c, s)) = rot else { continue };
            let cc = Complex::with_val(bits, c.conj_ref());
            let sc = Complex::with_val(bits, s.conj_ref());
            let last = (k + 2).min(hi);
            for row in h.iter_mut().take(last + 1).skip(lo) {
                let x = row[k].clone();
                let y = row[k + 1].clone();
                row[k] = Complex::with_val(bits, &x * &c) + Complex::with_val(bits, &y * &s);
                row[k + 1] = Complex::with_val(bits, &y * &cc) - Complex::with_val(bits, &x * &sc);
            }
        }
        for i in lo..=hi {
            h[i][i] += &mu;
        }
    }
    eig
}

fn wilkinson_shift(a: &ComplexBig, b: &ComplexBig, c: &ComplexBig, d: &ComplexBig) -> ComplexBig {
    let bits = a.prec().0;
    // eigenvalues of [[a, b], [c, d]]: (a+d)/2 +- sqrt(((a-d)/2)^2 + bc)
    let half_tr = Complex::with_val(bits, a + d) / 2u32;
    let half_diff = Complex::with_val(bits, a - d) / 2u32;
    let disc = Complex::with_val(bits, half_diff.square_ref()) + Complex::with_val(bits, b * c);
    let root = disc.sqrt();
    let l1 = Complex::with_val(bits, &half_tr + &root);
    let l2 = Complex::with_val(bits, &half_tr - &root);
    let e1 = abs(&Complex::with_val(bits, &l1 - d));
    let e2 = abs(&Complex::with_val(bits, &l2 - d));
    if e1 <= e2 {
        l1
    } else {
        l2
    }
}

/// Decimal string with `digits` significant digits.
pub fn decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalComplex {
    pub re: String,
    pub im: String,
}

impl DecimalComplex {
    pub fn new(z: &ComplexBig, digits: usize) -> Self {
        DecimalComplex {
            re: decimal(z.real(), digits),
            im: decimal(z.imag(), digits),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::new(256).unwrap()
    }

    #[test]
    fn precision_floor() {
        assert!(Precision::new(63).is_err());
        assert_eq!(Precision::new(64).unwrap().bits(), 64);
        assert_eq!(Precision::default().bits(), 256);
    }

    #[test]
    fn roots_of_unity_close_up() {
        for m in 1..8 {
            for r in 0..m {
                let z = root_of_unity(r, m, p());
                let zm = Complex::with_val(256, z.pow(m));
                let err = abs(&(zm - Complex::with_val(256, 1)));
                assert!(err < pow10(p(), -70), "r={r} m={m}");
            }
        }
        assert_eq!(root_of_unity(1, 2, p()), Complex::with_val(256, -1));
    }

    #[test]
    fn real_roots() {
        assert_eq!(real_root(&Integer::from(27), 3, p()), 3);
        assert_eq!(real_root(&Integer::from(16), 2, p()), 4);
        let r = real_root(&Integer::from(27), 2, p());
        let sq = Float::with_val(256, r.square_ref());
        assert!(Float::with_val(256, sq - 27u32).abs() < pow10(p(), -70));
    }

    #[test]
    fn solve_small_system() {
        let a = vec![
            vec![complex(p(), 2.0, 0.0), complex(p(), 1.0, 1.0)],
            vec![complex(p(), 0.0, 1.0), complex(p(), 3.0, 0.0)],
        ];
        let x_true = vec![complex(p(), 1.0, -2.0), complex(p(), 0.5, 0.25)];
        let b: Vec<_> = (0..2)
            .map(|i| {
                Complex::with_val(256, &a[i][0] * &x_true[0]) + Complex::with_val(256, &a[i][1] * &x_true[1])
            })
            .collect();
        let x = solve_complex(a, b, &pow10(p(), -60)).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!(abs(&Complex::with_val(256, u - v)) < pow10(p(), -70));
        }
        let sing = vec![
            vec![complex(p(), 1.0, 0.0), complex(p(), 2.0, 0.0)],
            vec![complex(p(), 2.0, 0.0), complex(p(), 4.0, 0.0)],
        ];
        assert!(solve_complex(sing, vec![complex(p(), 1.0, 0.0); 2], &pow10(p(), -60)).is_none());
    }

    #[test]
    fn jacobi_and_singular_values() {
        let m = vec![
            vec![float(p(), 2.0), float(p(), 1.0)],
            vec![float(p(), 1.0), float(p(), 2.0)],
        ];
        let ev = symmetric_eigenvalues(m);
        assert!(Float::with_val(256, &ev[0] - 1u32).abs() < pow10(p(), -70));
        assert!(Float::with_val(256, &ev[1] - 3u32).abs() < pow10(p(), -70));
        // complex symmetric [[0, i], [i, 0]] has singular values 1, 1
        let a = vec![
            vec![complex(p(), 0.0, 0.0), complex(p(), 0.0, 1.0)],
            vec![complex(p(), 0.0, 1.0), complex(p(), 0.0, 0.0)],
        ];
        let sv = singular_values(&a);
        for s in sv {
            assert!(Float::with_val(256, s - 1u32).abs() < pow10(p(), -70));
        }
        // rank one with norm 2 |1 + i| = sqrt(8)
        let rank1 = vec![vec![complex(p(), 1.0, 1.0); 2]; 2];
        let sv = singular_values(&rank1);
        let want = Float::with_val(256, 8).sqrt();
        assert!(Float::with_val(256, &sv[0] - &want).abs() < pow10(p(), -70));
        assert!(sv[1] < pow10(p(), -35));
    }

    #[test]
    fn hessenberg_qr_on_companion() {
        // x^4 = 1: eigenvalues 1, i, -1, -i
        let n = 4;
        let mut c = vec![vec![Complex::new(256); n]; n];
        for i in 1..n {
            c[i][i - 1] = Complex::with_val(256, 1);
        }
        c[0][n - 1] = Complex::with_val(256, 1);
        let ev = hessenberg_eigenvalues(c);
        assert_eq!(ev.len(), 4);
        for z in &ev {
            let z4 = Complex::with_val(256, z.clone().pow(4u32)) - 1u32;
            assert!(abs(&Complex::with_val(256, z4)) < pow10(p(), -60));
        }
    }

    #[test]
    fn arg_key_folds_negative_reals() {
        let snap = pow10(p(), -40);
        let minus = Complex::with_val(256, (-4.0, -1e-60));
        let k = arg_key(&minus, &snap);
        assert_eq!(k, Float::with_val(256, Constant::Pi));
        let plus_tiny = Complex::with_val(256, (4.0, -1e-60));
        assert!(arg_key(&plus_tiny, &snap).is_zero());
    }
}
