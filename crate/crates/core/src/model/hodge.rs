//! Hodge number h^{1,n-1} of a smooth complete intersection from Hirzebruch's
//! generating function for the chi_y genus:
//!
//! sum_N chi_y(X_N) z^N = 1/((1+zy)(1-z)) * prod_j ((1+zy)^{d_j} - (1-z)^{d_j}) / ((1+zy)^{d_j} + y(1-z)^{d_j})
//!
//! where X_N is the intersection of the given degrees in P^N. Series are
//! truncated in both y and z; every denominator has constant term 1, so all
//! arithmetic stays in Z.

use rug::Integer;

/// Bivariate series truncated at y^{ymax}, z^{zmax}; `c[a][b]` is the
/// coefficient of y^a z^b.
#[derive(Clone, Debug)]
struct Series {
    c: Vec<Vec<Integer>>,
}

impl Series {
    fn zero(ymax: usize, zmax: usize) -> Self {
        Series {
            c: vec![vec![Integer::new(); zmax + 1]; ymax + 1],
        }
    }

    fn ymax(&self) -> usize {
        self.c.len() - 1
    }

    fn zmax(&self) -> usize {
        self.c[0].len() - 1
    }

    fn one(ymax: usize, zmax: usize) -> Self {
        let mut s = Self::zero(ymax, zmax);
        s.c[0][0] = Integer::from(1);
        s
    }

    fn mul(&self, o: &Series) -> Series {
        let (ym, zm) = (self.ymax(), self.zmax());
        let mut out = Series::zero(ym, zm);
        for a1 in 0..=ym {
            for b1 in 0..=zm {
                if self.c[a1][b1] == 0 {
                    continue;
                }
                for a2 in 0..=ym - a1 {
                    for b2 in 0..=zm - b1 {
                        if o.c[a2][b2] != 0 {
                            out.c[a1 + a2][b1 + b2] += Integer::from(&self.c[a1][b1] * &o.c[a2][b2]);
                        }
                    }
                }
            }
        }
        out
    }

    fn add(&self, o: &Series, sign: i32) -> Series {
        let mut out = self.clone();
        for (row, orow) in out.c.iter_mut().zip(&o.c) {
            for (x, y) in row.iter_mut().zip(orow) {
                if sign >= 0 {
                    *x += y;
                } else {
                    *x -= y;
                }
            }
        }
        out
    }

    fn pow(&self, e: u32) -> Series {
        let mut r = Series::one(self.ymax(), self.zmax());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Inverse of a series with constant term 1, by `inv = sum_k (1 - s)^k`
    /// which terminates under truncation.
    fn inverse(&self) -> Series {
        assert_eq!(self.c[0][0], 1, "constant term must be 1");
        let (ym, zm) = (self.ymax(), self.zmax());
        let one = Series::one(ym, zm);
        let t = one.add(self, -1);
        let mut acc = one.clone();
        let mut power = one;
        for _ in 0..(ym + zm) {
            power = power.mul(&t);
            acc = acc.add(&power, 1);
        }
        acc
    }
}

/// Coefficients chi^p (p = 0..=n) of the chi_y genus of the complete
/// intersection of `degrees` in P^`ambient`.
pub fn chi_y(degrees: &[u32], ambient: u32) -> Vec<Integer> {
    let n = ambient as usize - degrees.len();
    let (ym, zm) = (n, ambient as usize);
    let mk = |terms: &[(usize, usize, i64)]| {
        let mut s = Series::zero(ym, zm);
        for &(a, b, v) in terms {
            if a <= ym && b <= zm {
                s.c[a][b] += v;
            }
        }
        s
    };
    let one_plus_zy = mk(&[(0, 0, 1), (1, 1, 1)]);
    let one_minus_z = mk(&[(0, 0, 1), (0, 1, -1)]);
    let y = mk(&[(1, 0, 1)]);
    let mut g = one_plus_zy.mul(&one_minus_z).inverse();
    for &d in degrees {
        let p = one_plus_zy.pow(d);
        let q = one_minus_z.pow(d);
        let num = p.add(&q, -1);
        let den = p.add(&y.mul(&q), 1);
        g = g.mul(&num).mul(&den.inverse());
    }
    (0..=n).map(|a| g.c[a][zm].clone()).collect()
}

/// h^{1,n-1} for n >= 2. By the Lefschetz theorem h^{p,q} = delta_{pq}
/// outside the middle degree, so chi^1 = -h^{1,1} + (-1)^{n-1} h^{1,n-1}
/// with h^{1,1} = 1 when n >= 3; for n = 2 all of chi^1 is -h^{1,1}.
pub fn h1_nm1(degrees: &[u32], ambient: u32) -> Integer {
    let n = ambient as usize - degrees.len();
    assert!(n >= 2, "h^(1,n-1) needs n >= 2");
    let chi = chi_y(degrees, ambient);
    if n == 2 {
        return Integer::from(-&chi[1]);
    }
    let v = Integer::from(&chi[1] + 1);
    if n % 2 == 1 {
        v
    } else {
        -v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_y_of_projective_space_is_alternating() {
        // chi^p(P^n) = (-1)^p
        for n in 1..5u32 {
            let chi = chi_y(&[], n);
            for (p, c) in chi.iter().enumerate() {
                assert_eq!(*c, if p % 2 == 0 { 1 } else { -1 });
            }
        }
    }

    #[test]
    fn known_hodge_numbers() {
        assert_eq!(h1_nm1(&[3], 4), 5);
        assert_eq!(h1_nm1(&[4], 4), 30);
        assert_eq!(h1_nm1(&[2, 2], 5), 2);
        assert_eq!(h1_nm1(&[3], 3), 7); // cubic surface: h^{1,1} = 7
        assert_eq!(h1_nm1(&[2], 3), 2); // P^1 x P^1
        assert_eq!(h1_nm1(&[5], 4), 101); // quintic threefold
        assert_eq!(h1_nm1(&[], 3), 0);
        assert_eq!(h1_nm1(&[2], 4), 0);
    }

    #[test]
    fn euler_characteristic_from_chi_y() {
        // chi_{-1} is the topological Euler characteristic: cubic surface 9,
        // quartic K3 24
        let e = |deg: &[u32], n: u32| -> Integer {
            chi_y(deg, n)
                .iter()
                .enumerate()
                .map(|(p, c)| if p % 2 == 0 { c.clone() } else { Integer::from(-c) })
                .sum()
        };
        assert_eq!(e(&[3], 3), 9);
        assert_eq!(e(&[4], 3), 24);
        assert_eq!(e(&[3], 4), -6);
    }
}
