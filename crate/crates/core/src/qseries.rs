//! Truncated Laurent series in `q^(1/2)` with exact rational coefficients.
//!
//! Index `m` stands for the monomial `q^(m/2)`. A series knows every
//! coefficient with `m < trunc_index`; coefficients at or above it are unknown.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Truncation index used for exact (finite) series.
pub const EXACT: i64 = i64::MAX / 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: BTreeMap<i64, BigRational>,
    min_index: i64,
    trunc_index: i64,
}

fn ratio(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QSeries {
    /// The zero series known on `[min_index, trunc_index)`.
    pub fn zero(min_index: i64, trunc_index: i64) -> QSeries {
        assert!(min_index <= trunc_index, "min_index above trunc_index");
        QSeries {
            coeffs: BTreeMap::new(),
            min_index,
            trunc_index,
        }
    }

    /// Exact constant series.
    pub fn constant(c: BigRational) -> QSeries {
        QSeries::monomial(0, c)
    }

    pub fn one() -> QSeries {
        QSeries::constant(BigRational::one())
    }

    /// Exact monomial `c q^(m/2)`.
    pub fn monomial(m: i64, c: BigRational) -> QSeries {
        QSeries::from_terms(m, EXACT, [(m, c)])
    }

    /// Builds a series from `(index, coefficient)` pairs; zeros and entries outside
    /// the window are dropped, repeated indices are summed.
    pub fn from_terms<I>(min_index: i64, trunc_index: i64, terms: I) -> QSeries
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut s = QSeries::zero(min_index, trunc_index);
        for (m, c) in terms {
            if m < min_index || m >= trunc_index {
                continue;
            }
            let e = s.coeffs.entry(m).or_insert_with(BigRational::zero);
            *e += c;
        }
        s.coeffs.retain(|_, c| !c.is_zero());
        s
    }

    /// Builds an integer-coefficient series from a slice starting at `min_index`.
    pub fn from_ints(min_index: i64, trunc_index: i64, values: &[i64]) -> QSeries {
        QSeries::from_terms(
            min_index,
            trunc_index,
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (min_index + i as i64, ratio(*v))),
        )
    }

    pub fn min_index(&self) -> i64 {
        self.min_index
    }

    pub fn trunc_index(&self) -> i64 {
        self.trunc_index
    }

    pub fn is_exact(&self) -> bool {
        self.trunc_index >= EXACT / 2
    }

    /// Coefficient at `m`, or `None` if it lies at or beyond the truncation index.
    pub fn coeff(&self, m: i64) -> Option<BigRational> {
        if m >= self.trunc_index {
            None
        } else {
            Some(
                self.coeffs
                    .get(&m)
                    .cloned()
                    .unwrap_or_else(BigRational::zero),
            )
        }
    }

    /// Nonzero terms in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &BigRational)> + '_ {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Lowest index with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Highest stored nonzero index.
    pub fn degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// True when no nonzero coefficient is known.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Whether only integer powers of `q` appear.
    pub fn is_integral_in_q(&self) -> bool {
        self.coeffs.keys().all(|m| m % 2 == 0)
    }

    /// Whether every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// Discard everything at or beyond `t` (no-op when `t` is not smaller).
    pub fn truncate(&self, t: i64) -> QSeries {
        let t = t.min(self.trunc_index).max(self.min_index);
        QSeries {
            coeffs: self
                .coeffs
                .range(..t)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            min_index: self.min_index,
            trunc_index: t,
        }
    }

    /// Equality of coefficients on the common known window.
    pub fn agrees_with(&self, other: &QSeries) -> bool {
        let t = self.trunc_index.min(other.trunc_index);
        self.truncate(t).coeffs == other.truncate(t).coeffs
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, -c)).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, k: &BigRational) -> QSeries {
        if k.is_zero() {
            return QSeries::zero(self.min_index, self.trunc_index);
        }
        QSeries {
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, c * k)).collect(),
            ..self.clone()
        }
    }

    pub fn scale_int(&self, k: i64) -> QSeries {
        self.scale(&ratio(k))
    }

    /// Multiply by `q^(s/2)`.
    pub fn shift_index(&self, s: i64) -> QSeries {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (m + s, c.clone()))
                .collect(),
            min_index: self.min_index + s,
            trunc_index: if self.is_exact() {
                EXACT
            } else {
                self.trunc_index.saturating_add(s).min(EXACT)
            },
        }
    }

    pub fn add(&self, o: &QSeries) -> QSeries {
        let t = self.trunc_index.min(o.trunc_index);
        let lo = self.min_index.min(o.min_index).min(t);
        let terms = self
            .coeffs
            .range(..t)
            .chain(o.coeffs.range(..t))
            .map(|(m, c)| (*m, c.clone()));
        QSeries::from_terms(lo, t, terms)
    }

    pub fn sub(&self, o: &QSeries) -> QSeries {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        let t = if self.is_exact() && o.is_exact() {
            EXACT
        } else {
            self.min_index
                .saturating_add(o.trunc_index)
                .min(self.trunc_index.saturating_add(o.min_index))
                .min(EXACT)
        };
        let lo = (self.min_index + o.min_index).min(t);
        if self.is_zero() || o.is_zero() {
            return QSeries::zero(lo, t);
        }
        let (da, a) = self.integer_window(t - o.min_index);
        let (db, b) = o.integer_window(t - self.min_index);
        if a.is_empty() || b.is_empty() {
            return QSeries::zero(lo, t);
        }
        let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (ma, ca) in &a {
            for (mb, cb) in &b {
                let m = ma + mb;
                if m >= t {
                    break;
                }
                let e = acc.entry(m).or_insert_with(BigInt::zero);
                *e += ca * cb;
            }
        }
        let den = da * db;
        let coeffs = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(m, v)| (m, BigRational::new(v, den.clone())))
            .collect();
        QSeries {
            coeffs,
            min_index: lo,
            trunc_index: t,
        }
    }

    /// Terms below `limit` rescaled to integers by a common denominator.
    fn integer_window(&self, limit: i64) -> (BigInt, Vec<(i64, BigInt)>) {
        let terms: Vec<_> = self.coeffs.range(..limit).collect();
        let den = terms
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let ints = terms
            .into_iter()
            .map(|(m, c)| (*m, c.numer() * (&den / c.denom())))
            .collect();
        (den, ints)
    }

    pub fn pow(&self, n: u32) -> QSeries {
        let mut result = QSeries::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Reciprocal, known below index `order`.
    pub fn invert(&self, order: i64) -> Result<QSeries> {
        let v = self.valuation().ok_or(Error::ZeroSeries)?;
        let have = self.trunc_index.saturating_sub(2 * v);
        if order > have {
            return Err(Error::InsufficientOrder { have, want: order });
        }
        let lo = -v;
        if order <= lo {
            return Ok(QSeries::zero(order, order));
        }
        let n_terms = (order - lo) as usize;
        let a0_inv = self.coeffs[&v].recip();
        let a: Vec<(usize, &BigRational)> = self
            .coeffs
            .range(v + 1..v + n_terms as i64)
            .map(|(m, c)| ((m - v) as usize, c))
            .collect();
        let mut b: Vec<BigRational> = Vec::with_capacity(n_terms);
        b.push(a0_inv.clone());
        for n in 1..n_terms {
            let mut s = BigRational::zero();
            for (k, ak) in &a {
                if *k > n {
                    break;
                }
                let bn = &b[n - k];
                if !bn.is_zero() {
                    s += *ak * bn;
                }
            }
            b.push(-(s * &a0_inv));
        }
        Ok(QSeries::from_terms(
            lo,
            order,
            b.into_iter().enumerate().map(|(i, c)| (lo + i as i64, c)),
        ))
    }

    /// `self / o`, with the quotient known below `order`.
    pub fn div(&self, o: &QSeries, order: i64) -> Result<QSeries> {
        let v = o.valuation().ok_or(Error::ZeroSeries)?;
        // quotient at index n needs self up to n + v and 1/o up to n - self.min
        let inv_order = order - self.min_index;
        let inv = o.invert(inv_order.max(-v))?;
        let q = self.mul(&inv);
        if q.trunc_index < order {
            return Err(Error::InsufficientOrder {
                have: q.trunc_index,
                want: order,
            });
        }
        Ok(q.truncate(order))
    }

    /// The substitution `z -> z + 1`, i.e. `q^(1/2) -> -q^(1/2)`.
    pub fn shift_t(&self) -> QSeries {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (*m, if m.is_odd() { -c } else { c.clone() }))
                .collect(),
            ..self.clone()
        }
    }

    /// `(index, numerator, denominator)` triples of the nonzero known terms.
    pub fn rows(&self) -> Vec<(i64, BigInt, BigInt)> {
        self.coeffs
            .iter()
            .map(|(m, c)| (*m, c.numer().clone(), c.denom().clone()))
            .collect()
    }

    /// CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,numerator,denominator\n");
        for (m, n, d) in self.rows() {
            out.push_str(&format!("{m},{n},{d}\n"));
        }
        out
    }

    /// JSON object mapping each index to `"num/den"`, in increasing index order.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (m, n, d) in self.rows() {
            map.insert(m.to_string(), serde_json::Value::String(format!("{n}/{d}")));
        }
        serde_json::Value::Object(map)
    }

    /// Largest `|c_m|` over the stored terms.
    pub fn max_abs_coeff(&self) -> BigRational {
        self.coeffs
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

impl fmt::Display for QSeries {
    /// Human-readable form such as `q^(-1) + 8q^(-1/2) - 240 + O(q^2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in &self.coeffs {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = monomial_text(*m);
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}{mono}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        if !self.is_exact() {
            let t = monomial_text(self.trunc_index);
            let t = if t.is_empty() { "1".to_string() } else { t };
            write!(f, " + O({t})")?;
        }
        Ok(())
    }
}

fn monomial_text(m: i64) -> String {
    match (m, m % 2 == 0) {
        (0, _) => String::new(),
        (2, _) => "q".to_string(),
        (_, true) => format!("q^{}", m / 2),
        (_, false) => format!("q^({m}/2)"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn difference_of_squares() {
        let a = QSeries::from_ints(0, EXACT, &[1, 0, 1]);
        let b = QSeries::from_ints(0, EXACT, &[1, 0, -1]);
        assert_eq!(a.mul(&b), QSeries::from_ints(0, EXACT, &[1, 0, 0, 0, -1]));
    }

    #[test]
    fn additive_inverse_is_empty() {
        let a = QSeries::from_ints(-1, EXACT, &[1, 0, 1]);
        assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn mul_truncation_is_tightest() {
        let a = QSeries::from_ints(-2, 10, &[1]);
        let b = QSeries::from_ints(0, 6, &[1, 1]);
        let p = a.mul(&b);
        assert_eq!(p.trunc_index(), 4);
        assert_eq!(p.min_index(), -2);
    }

    #[test]
    fn geometric_inverse() {
        let a = QSeries::from_ints(0, EXACT, &[1, 0, -1]);
        let inv = a.invert(8).unwrap();
        assert_eq!(inv, QSeries::from_ints(0, 8, &[1, 0, 1, 0, 1, 0, 1]));
        assert_eq!(inv.trunc_index(), 8);
    }

    #[test]
    fn monomial_inverse() {
        let a = QSeries::monomial(1, BigRational::one());
        let inv = a.invert(2).unwrap();
        assert_eq!(
            inv.iter().collect::<Vec<_>>(),
            vec![(-1, &BigRational::one())]
        );
    }

    #[test]
    fn invert_errors() {
        assert_eq!(QSeries::zero(0, 10).invert(4), Err(Error::ZeroSeries));
        let a = QSeries::from_ints(0, 6, &[1, 1]);
        assert!(matches!(a.invert(8), Err(Error::InsufficientOrder { .. })));
        let b = QSeries::from_ints(2, 10, &[3, 1]);
        assert!(b.invert(6).is_ok());
        assert!(b.invert(7).is_err());
    }

    #[test]
    fn rational_inverse() {
        let a = QSeries::from_terms(0, EXACT, [(0, q(2, 3)), (1, q(1, 5))]);
        let inv = a.invert(20).unwrap();
        let p = a.mul(&inv);
        assert_eq!(p.truncate(20), QSeries::one().truncate(20));
    }

    #[test]
    fn shift_t_flips_odd_indices() {
        let a = QSeries::from_ints(-1, 5, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(
            a.shift_t(),
            QSeries::from_ints(-1, 5, &[-1, 2, -3, 4, -5, 6])
        );
        assert_eq!(a.shift_t().shift_t(), a);
    }

    #[test]
    fn display() {
        let s = QSeries::from_ints(-2, 2, &[1, 8, -240, -6176]);
        assert_eq!(s.to_string(), "q^-1 + 8q^(-1/2) - 240 - 6176q^(1/2) + O(q)");
    }

    #[test]
    fn csv_and_json() {
        let s = QSeries::from_terms(0, 4, [(0, q(1, 2)), (3, q(-4, 1))]);
        assert_eq!(s.to_csv(), "m,numerator,denominator\n0,1,2\n3,-4,1\n");
        assert_eq!(s.to_json().to_string(), r#"{"0":"1/2","3":"-4/1"}"#);
    }
}
