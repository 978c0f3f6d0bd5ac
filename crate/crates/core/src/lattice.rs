//! Exact geometry of `Z^d`, `D_d` and `E8`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::ball::RealBall;
use crate::error::{Error, Result};
use crate::linalg::{self, qfrac, qint, QMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    Z,
    D,
    E8,
}

impl LatticeKind {
    pub fn parse(s: &str) -> Result<LatticeKind> {
        match s.to_ascii_lowercase().as_str() {
            "z" | "zd" => Ok(LatticeKind::Z),
            "d" | "dd" => Ok(LatticeKind::D),
            "e8" => Ok(LatticeKind::E8),
            _ => Err(Error::Parse(format!("unknown lattice {s:?}"))),
        }
    }
}

/// Rows of `matrix` generate the lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    pub name: String,
    pub kind: Option<LatticeKind>,
    pub matrix: QMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormShell {
    pub squared_norm: BigRational,
    pub count: u64,
    pub representatives: Option<Vec<Vec<BigRational>>>,
}

pub fn make_lattice(kind: LatticeKind, d: usize) -> Result<LatticeBasis> {
    if d == 0 || (kind == LatticeKind::E8 && d != 8) {
        return Err(Error::BadDimension(d));
    }
    let unit = |i: usize| -> Vec<BigRational> {
        (0..d)
            .map(|j| if i == j { qint(1) } else { qint(0) })
            .collect()
    };
    let matrix: QMatrix = match kind {
        LatticeKind::Z => (0..d).map(unit).collect(),
        LatticeKind::D => {
            if d == 1 {
                vec![vec![qint(2)]]
            } else {
                let mut rows: QMatrix = (0..d - 1)
                    .map(|i| {
                        let mut r = unit(i);
                        r[i + 1] = qint(-1);
                        r
                    })
                    .collect();
                let mut last = unit(d - 1);
                last[d - 2] = qint(1);
                rows.push(last);
                rows
            }
        }
        LatticeKind::E8 => {
            let mut rows: QMatrix = vec![unit(0).into_iter().map(|x| x * qint(2)).collect()];
            for i in 1..7 {
                let mut r = unit(i);
                r[i - 1] = qint(-1);
                rows.push(r);
            }
            rows.push(vec![qfrac(1, 2); 8]);
            rows
        }
    };
    let name = match kind {
        LatticeKind::Z => format!("Z{d}"),
        LatticeKind::D => format!("D{d}"),
        LatticeKind::E8 => "E8".to_string(),
    };
    Ok(LatticeBasis {
        name,
        kind: Some(kind),
        matrix,
    })
}

impl LatticeBasis {
    pub fn from_matrix(name: &str, matrix: QMatrix) -> Result<LatticeBasis> {
        let d = matrix.len();
        if d == 0 || matrix.iter().any(|r| r.len() != d) || linalg::det(&matrix).is_zero() {
            return Err(Error::BadDimension(d));
        }
        Ok(LatticeBasis {
            name: name.to_string(),
            kind: None,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn gram(&self) -> QMatrix {
        linalg::matmul(&self.matrix, &linalg::transpose(&self.matrix))
    }

    pub fn covolume(&self) -> BigRational {
        linalg::det(&self.matrix).abs()
    }

    /// Inverse transpose of the basis matrix.
    pub fn dual_basis(&self) -> LatticeBasis {
        let inv = linalg::inverse(&self.matrix).expect("basis is nonsingular");
        LatticeBasis {
            name: format!("{}*", self.name),
            kind: None,
            matrix: linalg::transpose(&inv),
        }
    }

    /// Coordinates of `v` in this basis.
    pub fn coordinates(&self, v: &[BigRational]) -> Vec<BigRational> {
        let inv = linalg::inverse(&self.matrix).expect("basis is nonsingular");
        linalg::vec_mat(v, &inv)
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        linalg::is_integral(&self.coordinates(v))
    }

    /// Whether both bases generate the same lattice.
    pub fn same_lattice(&self, other: &LatticeBasis) -> bool {
        self.dim() == other.dim()
            && self.matrix.iter().all(|r| other.contains(r))
            && other.matrix.iter().all(|r| self.contains(r))
    }

    /// Smallest positive integer `s` with `s * matrix` integral.
    fn scale(&self) -> BigInt {
        self.matrix
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Every shell with `0 < |x|^2 <= max_norm`, in increasing norm order.
    pub fn enumerate_shells(&self, max_norm: &BigRational) -> Vec<NormShell> {
        self.enumerate(max_norm, 0)
    }

    /// As [`enumerate_shells`](Self::enumerate_shells), also keeping up to
    /// `max_reps` vectors per shell (in a deterministic order).
    pub fn enumerate_shells_with_reps(
        &self,
        max_norm: &BigRational,
        max_reps: usize,
    ) -> Vec<NormShell> {
        self.enumerate(max_norm, max_reps.max(1))
    }

    fn enumerate(&self, max_norm: &BigRational, max_reps: usize) -> Vec<NormShell> {
        let s = self.scale();
        let s2 = &s * &s;
        let basis: Vec<Vec<i64>> = self
            .matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        (x * BigRational::from_integer(s.clone()))
                            .to_integer()
                            .to_i64()
                            .expect("small basis")
                    })
                    .collect()
            })
            .collect();
        // bound on the scaled integer norm
        let bound = (max_norm * BigRational::from_integer(s2.clone()))
            .floor()
            .to_integer()
            .to_i64()
            .expect("norm bound fits in i64");
        let search = Search::new(&basis, bound);
        let outer = search.outer_range();
        let parts: Vec<Shells> = outer
            .into_par_iter()
            .map(|x_last| search.run_from(x_last, max_reps))
            .collect();
        let mut merged: Shells = BTreeMap::new();
        for part in parts {
            for (k, (c, reps)) in part {
                let e = merged.entry(k).or_insert((0, Vec::new()));
                e.0 += c;
                for r in reps {
                    if e.1.len() < max_reps {
                        e.1.push(r);
                    }
                }
            }
        }
        let sq = BigRational::from_integer(s.clone());
        merged
            .into_iter()
            .filter(|(k, _)| *k > 0)
            .map(|(k, (count, reps))| NormShell {
                squared_norm: BigRational::new(BigInt::from(k), s2.clone()),
                count,
                representatives: (max_reps > 0).then(|| {
                    reps.into_iter()
                        .map(|v| v.into_iter().map(|x| qint(x) / &sq).collect())
                        .collect()
                }),
            })
            .collect()
    }

    /// Theta coefficients `N(k)` = number of vectors of squared norm `k`, for
    /// integral squared norms `0..=max_norm`.
    pub fn theta_coefficients(&self, max_norm: u64) -> Vec<u64> {
        let mut out = vec![0u64; max_norm as usize + 1];
        out[0] = 1;
        for sh in self.enumerate_shells(&qint(max_norm as i64)) {
            if sh.squared_norm.is_integer() {
                let k = sh.squared_norm.to_integer().to_usize().expect("small norm");
                out[k] = sh.count;
            }
        }
        out
    }

    /// Minimal nonzero squared norm.
    pub fn min_norm(&self) -> BigRational {
        // every basis row is a nonzero vector, so its norm bounds the minimum
        let bound = self
            .matrix
            .iter()
            .map(|r| linalg::dot(r, r))
            .min()
            .expect("nonempty basis");
        self.enumerate_shells(&bound)
            .first()
            .map(|s| s.squared_norm.clone())
            .expect("basis rows give a nonempty shell")
    }

    /// Center density times ball volume: `pi^(d/2) r^d / (Gamma(d/2+1) covol)`
    /// with `r` half the minimal distance.
    pub fn packing_density(&self, prec: u32) -> RealBall {
        packing_density_from(self.dim(), &self.min_norm(), &self.covolume(), prec)
    }

    /// Nearest lattice vector to `x` and its squared distance.
    pub fn closest_vector(&self, x: &[BigRational]) -> Result<(Vec<BigRational>, BigRational)> {
        let v = match self.kind {
            Some(LatticeKind::Z) => round_z(x),
            Some(LatticeKind::D) => round_d(x),
            Some(LatticeKind::E8) => round_e8(x),
            None => return Err(Error::UnsupportedLattice(self.name.clone())),
        };
        let d = dist2(x, &v);
        Ok((v, d))
    }
}

/// Density for dimension `d`, minimal squared norm `mn` and covolume `covol`.
pub fn packing_density_from(
    d: usize,
    mn: &BigRational,
    covol: &BigRational,
    prec: u32,
) -> RealBall {
    let w = prec + 32;
    let pi = RealBall::pi(w);
    let quarter = mn / qint(4);
    let h = (d / 2) as u32;
    let v = if d.is_multiple_of(2) {
        // pi^(d/2) (mn/4)^(d/2) / ((d/2)! covol)
        let mut fact = BigInt::one();
        for i in 2..=h {
            fact *= i;
        }
        let c = pow_q(&quarter, h) / (BigRational::from_integer(fact) * covol);
        pi.pow(h).mul_rational(&c)
    } else {
        // Gamma(d/2 + 1) = d!! sqrt(pi) / 2^((d+1)/2)
        let mut dfact = BigInt::one();
        let mut i = d as u64;
        while i > 1 {
            dfact *= i;
            i -= 2;
        }
        let c = pow_q(&quarter, h) * qint(1i64 << d.div_ceil(2))
            / (qint(2) * BigRational::from_integer(dfact) * covol);
        let root = RealBall::from_rational(mn, w).sqrt();
        &pi.pow(h).mul_rational(&c) * &root
    };
    v.with_prec(prec)
}

fn pow_q(x: &BigRational, n: u32) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, _| acc * x)
}

/// Fincke–Pohst enumeration of integer coefficient vectors with exact norms.
/// Squared norm to (count, sample representatives).
type Shells = BTreeMap<i64, (u64, Vec<Vec<i64>>)>;

struct Search<'a> {
    basis: &'a [Vec<i64>],
    bound: i64,
    /// `q[i][i]` and the upper-triangular `q[i][j]` of the quadratic form.
    q: Vec<Vec<f64>>,
}

impl<'a> Search<'a> {
    fn new(basis: &'a [Vec<i64>], bound: i64) -> Search<'a> {
        let n = basis.len();
        let gram: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        basis[i]
                            .iter()
                            .zip(&basis[j])
                            .map(|(a, b)| (a * b) as f64)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        // Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
        let mut q = gram.clone();
        for i in 0..n {
            for j in i + 1..n {
                q[j][i] = q[i][j];
                q[i][j] /= q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    q[k][l] -= q[k][i] * q[i][l];
                }
            }
        }
        Search { basis, bound, q }
    }

    fn slack(&self) -> f64 {
        1e-7 * (1.0 + self.bound as f64)
    }

    fn range(&self, i: usize, center: f64, remaining: f64) -> (i64, i64) {
        let r = ((remaining + self.slack()).max(0.0) / self.q[i][i]).sqrt() + 1e-9;
        ((center - r).ceil() as i64, (center + r).floor() as i64)
    }

    fn outer_range(&self) -> Vec<i64> {
        let n = self.basis.len();
        let (lo, hi) = self.range(n - 1, 0.0, self.bound as f64);
        (lo..=hi).collect()
    }

    fn run_from(&self, x_last: i64, max_reps: usize) -> Shells {
        let n = self.basis.len();
        let dim = self.basis[0].len();
        let mut out = BTreeMap::new();
        let mut x = vec![0i64; n];
        x[n - 1] = x_last;
        let mut acc = vec![0i64; dim];
        for (a, b) in acc.iter_mut().zip(&self.basis[n - 1]) {
            *a = b * x_last;
        }
        let centered = x_last as f64;
        let used = self.q[n - 1][n - 1] * centered * centered;
        if used > self.bound as f64 + self.slack() {
            return out;
        }
        self.descend(
            n - 1,
            &mut x,
            &mut acc,
            self.bound as f64 - used,
            max_reps,
            &mut out,
        );
        out
    }

    fn descend(
        &self,
        level: usize,
        x: &mut Vec<i64>,
        acc: &mut Vec<i64>,
        remaining: f64,
        max_reps: usize,
        out: &mut Shells,
    ) {
        if level == 0 {
            let norm: i64 = acc.iter().map(|v| v * v).sum();
            if norm <= self.bound {
                let e = out.entry(norm).or_insert((0, Vec::new()));
                e.0 += 1;
                if e.1.len() < max_reps {
                    e.1.push(acc.clone());
                }
            }
            return;
        }
        let i = level - 1;
        let n = x.len();
        let center: f64 = -(i + 1..n).map(|j| self.q[i][j] * x[j] as f64).sum::<f64>();
        let (lo, hi) = self.range(i, center, remaining);
        for xi in lo..=hi {
            let d = xi as f64 - center;
            let rem = remaining - self.q[i][i] * d * d;
            if rem < -self.slack() {
                continue;
            }
            x[i] = xi;
            for (a, b) in acc.iter_mut().zip(&self.basis[i]) {
                *a += b * xi;
            }
            self.descend(i, x, acc, rem, max_reps, out);
            for (a, b) in acc.iter_mut().zip(&self.basis[i]) {
                *a -= b * xi;
            }
        }
        x[i] = 0;
    }
}

fn dist2(x: &[BigRational], v: &[BigRational]) -> BigRational {
    x.iter()
        .zip(v)
        .fold(BigRational::zero(), |s, (a, b)| s + (a - b) * (a - b))
}

/// Nearest integer, ties to the smaller one.
fn round_half_down(x: &BigRational) -> BigInt {
    (x - qfrac(1, 2)).ceil().to_integer()
}

fn round_z(x: &[BigRational]) -> Vec<BigRational> {
    x.iter()
        .map(|c| BigRational::from_integer(round_half_down(c)))
        .collect()
}

fn round_d(x: &[BigRational]) -> Vec<BigRational> {
    let f: Vec<BigInt> = x.iter().map(round_half_down).collect();
    let parity_even = f.iter().fold(BigInt::zero(), |s, v| s + v).is_even();
    let mut v: Vec<BigRational> = f.iter().cloned().map(BigRational::from_integer).collect();
    if parity_even {
        return v;
    }
    let half = qfrac(1, 2);
    let err: Vec<BigRational> = x.iter().zip(&v).map(|(a, b)| a - b).collect();
    // a tied coordinate can be moved up at no cost; moving the last one is lexicographically smallest
    if let Some(i) = (0..x.len()).rev().find(|&i| err[i] == -half.clone()) {
        v[i] += qint(1);
        return v;
    }
    // otherwise move the cheapest coordinate (cost 1 - 2|e|) to its other neighbour
    let cost: Vec<BigRational> = err.iter().map(|e| qint(1) - qint(2) * e.abs()).collect();
    let best = cost.iter().min().expect("nonempty").clone();
    let cands: Vec<(usize, i64)> = (0..x.len())
        .filter(|&i| cost[i] == best)
        .map(|i| (i, if err[i].is_positive() { 1 } else { -1 }))
        .collect();
    let pick = cands
        .iter()
        .find(|(_, s)| *s < 0)
        .or_else(|| cands.last())
        .expect("some candidate");
    v[pick.0] += qint(pick.1);
    v
}

fn round_e8(x: &[BigRational]) -> Vec<BigRational> {
    let h = qfrac(1, 2);
    let a = round_d(x);
    let shifted: Vec<BigRational> = x.iter().map(|c| c - &h).collect();
    let b: Vec<BigRational> = round_d(&shifted).into_iter().map(|c| c + &h).collect();
    let (da, db) = (dist2(x, &a), dist2(x, &b));
    if da < db || (da == db && a <= b) {
        a
    } else {
        b
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hole {
    pub point: Vec<BigRational>,
    pub nearest: Vec<BigRational>,
    pub dist2: BigRational,
}

/// The shallow hole `(1, 0, ..., 0)` and deep hole `(1/2, ..., 1/2)` of `D_d`.
pub fn holes_dd(d: usize) -> Result<(Hole, Hole)> {
    if d < 3 {
        return Err(Error::BadDimension(d));
    }
    let l = make_lattice(LatticeKind::D, d)?;
    let mut shallow = vec![qint(0); d];
    shallow[0] = qint(1);
    let deep = vec![qfrac(1, 2); d];
    let mk = |p: Vec<BigRational>| -> Result<Hole> {
        let (nearest, dist2) = l.closest_vector(&p)?;
        Ok(Hole {
            point: p,
            nearest,
            dist2,
        })
    };
    Ok((mk(shallow)?, mk(deep)?))
}

/// Squared distance to the lattice over the grid `s u + t v`, `s, t` in
/// `[-range, range]` with the given step.
pub fn slice_grid(
    l: &LatticeBasis,
    u: &[BigRational],
    v: &[BigRational],
    range: &BigRational,
    step: &BigRational,
) -> Result<Vec<(BigRational, BigRational, BigRational)>> {
    if u.len() != l.dim() || v.len() != l.dim() {
        return Err(Error::BadDimension(u.len()));
    }
    if !step.is_positive() {
        return Err(Error::Parse("slice step must be positive".into()));
    }
    let n = (range / step).floor().to_integer().to_i64().unwrap_or(0);
    let coords: Vec<BigRational> = (-n..=n).map(|k| qint(k) * step).collect();
    let pairs: Vec<(BigRational, BigRational)> = coords
        .iter()
        .flat_map(|s| coords.iter().map(move |t| (s.clone(), t.clone())))
        .collect();
    pairs
        .into_par_iter()
        .map(|(s, t)| {
            let p: Vec<BigRational> = u.iter().zip(v).map(|(a, b)| a * &s + b * &t).collect();
            let (_, d) = l.closest_vector(&p)?;
            Ok((s, t, d))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv(v: &[(i64, i64)]) -> Vec<BigRational> {
        v.iter().map(|&(n, d)| qfrac(n, d)).collect()
    }

    #[test]
    fn covolumes() {
        assert_eq!(
            make_lattice(LatticeKind::E8, 8).unwrap().covolume(),
            qint(1)
        );
        for d in 1..=9 {
            assert_eq!(make_lattice(LatticeKind::D, d).unwrap().covolume(), qint(2));
            assert_eq!(make_lattice(LatticeKind::Z, d).unwrap().covolume(), qint(1));
        }
        assert_eq!(
            make_lattice(LatticeKind::E8, 7),
            Err(Error::BadDimension(7))
        );
    }

    #[test]
    fn e8_glue_doubles_into_d8() {
        let d8 = make_lattice(LatticeKind::D, 8).unwrap();
        assert!(d8.contains(&vec![qint(1); 8]));
        assert!(!d8.contains(&vec![qfrac(1, 2); 8]));
        let e8 = make_lattice(LatticeKind::E8, 8).unwrap();
        assert!(e8.contains(&vec![qfrac(1, 2); 8]));
        assert!(d8.matrix.iter().all(|r| e8.contains(r)));
    }

    #[test]
    fn small_shells() {
        let z8 = make_lattice(LatticeKind::Z, 8).unwrap();
        let sh = z8.enumerate_shells(&qint(2));
        assert_eq!(sh.len(), 2);
        assert_eq!((sh[0].count, sh[1].count), (16, 112));
        let e8 = make_lattice(LatticeKind::E8, 8).unwrap();
        let sh = e8.enumerate_shells(&qint(4));
        assert_eq!(
            sh.iter().map(|s| s.count).collect::<Vec<_>>(),
            vec![240, 2160]
        );
    }

    #[test]
    fn representatives_have_the_shell_norm() {
        let e8 = make_lattice(LatticeKind::E8, 8).unwrap();
        let sh = e8.enumerate_shells_with_reps(&qint(2), 1000);
        let reps = sh[0].representatives.as_ref().unwrap();
        assert_eq!(reps.len(), 240);
        for r in reps {
            assert_eq!(linalg::dot(r, r), qint(2));
            assert!(e8.contains(r));
        }
    }

    #[test]
    fn e8_is_self_dual() {
        let e8 = make_lattice(LatticeKind::E8, 8).unwrap();
        assert!(e8.dual_basis().same_lattice(&e8));
        let d4 = make_lattice(LatticeKind::D, 4).unwrap();
        assert!(!d4.dual_basis().same_lattice(&d4));
    }

    #[test]
    fn d_rounding_ties() {
        let d8 = make_lattice(LatticeKind::D, 8).unwrap();
        let mut x = vec![qint(0); 8];
        x[0] = qint(1);
        let (v, d) = d8.closest_vector(&x).unwrap();
        assert_eq!(d, qint(1));
        // nearest points are 0, 2e1 and e1 +- ej; the origin is lexicographically smallest
        assert_eq!(v, vec![qint(0); 8]);
        let (v, d) = d8
            .closest_vector(&qv(&[
                (1, 2),
                (1, 2),
                (0, 1),
                (0, 1),
                (0, 1),
                (0, 1),
                (0, 1),
                (1, 1),
            ]))
            .unwrap();
        assert_eq!(d, qfrac(1, 2));
        assert_eq!(
            v,
            qv(&[
                (0, 1),
                (1, 1),
                (0, 1),
                (0, 1),
                (0, 1),
                (0, 1),
                (0, 1),
                (1, 1)
            ])
        );
    }

    #[test]
    fn e8_decoder() {
        let e8 = make_lattice(LatticeKind::E8, 8).unwrap();
        let (v, d) = e8.closest_vector(&vec![qint(0); 8]).unwrap();
        assert_eq!((v, d), (vec![qint(0); 8], qint(0)));
        let (_, d) = e8.closest_vector(&vec![qfrac(1, 2); 8]).unwrap();
        assert_eq!(d, qint(0));
    }

    #[test]
    fn holes() {
        let (s, dp) = holes_dd(8).unwrap();
        assert_eq!(s.dist2, qint(1));
        assert_eq!(dp.dist2, qint(2));
        assert_eq!(holes_dd(3).unwrap().1.dist2, qfrac(3, 4));
        let (s4, d4) = holes_dd(4).unwrap();
        assert_eq!(s4.dist2, d4.dist2);
        assert!(holes_dd(2).is_err());
    }

    #[test]
    fn densities() {
        let z1 = make_lattice(LatticeKind::Z, 1).unwrap();
        assert!(z1.packing_density(128).contains_rational(&qint(1)));
        let e8 = make_lattice(LatticeKind::E8, 8).unwrap();
        let d = e8.packing_density(128);
        assert!((d.mid_f64() - 0.253_669_507_901_048).abs() < 1e-16);
        let d3 = make_lattice(LatticeKind::D, 3).unwrap();
        assert!((d3.packing_density(128).mid_f64() - 0.740_480_489_693_061).abs() < 1e-16);
    }
}
