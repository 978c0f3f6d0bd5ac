//! Small dense linear algebra over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QMatrix = Vec<Vec<BigRational>>;

pub fn qint(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn qfrac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Reduced row echelon form; returns the pivot columns.
#[allow(clippy::needless_range_loop)]
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    rref(&mut m.clone()).len()
}

/// Basis of the right kernel `{x : m x = 0}`.
pub fn kernel(m: &QMatrix) -> Vec<Vec<BigRational>> {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); cols];
            x[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -a[r][f].clone();
            }
            x
        })
        .collect()
}

#[allow(clippy::needless_range_loop)]
pub fn det(m: &QMatrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..n {
                    let v = &a[c][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
    }
    d
}

pub fn inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut a: QMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    let pivots = rref(&mut a);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose(m: &QMatrix) -> QMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn matmul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let k = b.len();
    let cols = if k == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..k).fold(BigRational::zero(), |s, i| s + &row[i] * &b[i][j]))
                .collect()
        })
        .collect()
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |s, (x, y)| s + x * y)
}

/// `v B` for a row vector `v` and matrix `B`.
pub fn vec_mat(v: &[BigRational], b: &QMatrix) -> Vec<BigRational> {
    let cols = if b.is_empty() { 0 } else { b[0].len() };
    (0..cols)
        .map(|j| {
            v.iter()
                .zip(b)
                .fold(BigRational::zero(), |s, (x, r)| s + x * &r[j])
        })
        .collect()
}

pub fn is_integral(v: &[BigRational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

pub fn max_abs(m: &QMatrix) -> BigRational {
    m.iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> QMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&v| qint(v)).collect())
            .collect()
    }

    #[test]
    fn det_and_inverse() {
        let m = mat(&[&[2, 1], &[1, 1]]);
        assert_eq!(det(&m), qint(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, mat(&[&[1, -1], &[-1, 2]]));
        assert_eq!(matmul(&m, &inv), mat(&[&[1, 0], &[0, 1]]));
        assert!(inverse(&mat(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&m), 1);
        let k = kernel(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &m {
                assert!(dot(row, v).is_zero());
            }
        }
    }
}
