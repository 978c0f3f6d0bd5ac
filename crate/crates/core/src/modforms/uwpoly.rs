//! Homogeneous polynomials in the level-2 generators `U` and `W`, with the
//! weight-preserving action of `S` and `T` (with `V = U - W` eliminated).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qseries::QSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    S,
    T,
    TInv,
}

/// A word in `S`, `T`, `T^-1`, applied left to right: `p|ST = (p|S)|T`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SlashWord {
    pub letters: Vec<Letter>,
}

impl SlashWord {
    pub fn identity() -> SlashWord {
        SlashWord::default()
    }

    pub fn new(letters: Vec<Letter>) -> SlashWord {
        SlashWord { letters }
    }

    /// Number of `T` and `T^-1` letters.
    pub fn t_count(&self) -> usize {
        self.letters.iter().filter(|l| **l != Letter::S).count()
    }
}

impl FromStr for SlashWord {
    type Err = Error;

    /// Parses strings like `"TS"`, `"ST^-1S"` or `"1"` (identity).
    fn from_str(s: &str) -> Result<SlashWord> {
        let s = s.trim();
        if s.is_empty() || s == "1" || s.eq_ignore_ascii_case("id") {
            return Ok(SlashWord::identity());
        }
        let mut letters = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix("T^-1") {
                letters.push(Letter::TInv);
                rest = r;
            } else if let Some(r) = rest.strip_prefix('T') {
                letters.push(Letter::T);
                rest = r;
            } else if let Some(r) = rest.strip_prefix('S') {
                letters.push(Letter::S);
                rest = r;
            } else {
                return Err(Error::Parse(format!("bad slash word {s:?}")));
            }
        }
        Ok(SlashWord { letters })
    }
}

impl fmt::Display for SlashWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            match l {
                Letter::S => write!(f, "S")?,
                Letter::T => write!(f, "T")?,
                Letter::TInv => write!(f, "T^-1")?,
            }
        }
        Ok(())
    }
}

/// `sum c_{a,b} U^a W^b` with every term of total degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UWPoly {
    terms: BTreeMap<(u32, u32), BigRational>,
    degree: u32,
}

impl UWPoly {
    pub fn zero(degree: u32) -> UWPoly {
        UWPoly {
            terms: BTreeMap::new(),
            degree,
        }
    }

    pub fn u() -> UWPoly {
        UWPoly::monomial(1, 0, BigRational::one())
    }

    pub fn w() -> UWPoly {
        UWPoly::monomial(0, 1, BigRational::one())
    }

    pub fn constant(c: BigRational) -> UWPoly {
        UWPoly::monomial(0, 0, c)
    }

    pub fn monomial(a: u32, b: u32, c: BigRational) -> UWPoly {
        let mut p = UWPoly::zero(a + b);
        if !c.is_zero() {
            p.terms.insert((a, b), c);
        }
        p
    }

    /// Integer-coefficient polynomial from `(a, b, c)` triples; panics on
    /// mixed degrees.
    pub fn from_int_terms(terms: &[(u32, u32, i64)]) -> UWPoly {
        let degree = terms.first().map(|t| t.0 + t.1).unwrap_or(0);
        let mut p = UWPoly::zero(degree);
        for &(a, b, c) in terms {
            assert_eq!(a + b, degree, "inhomogeneous UWPoly");
            p = p.add(&UWPoly::monomial(a, b, BigRational::from_integer(c.into())));
        }
        p
    }

    /// Modular weight `2 * degree`.
    pub fn weight(&self) -> i64 {
        2 * self.degree as i64
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &BigRational)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// Coefficient of `U^a W^b`.
    pub fn coeff(&self, a: u32, b: u32) -> BigRational {
        self.terms
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Coefficients of `U^d, U^(d-1) W, ..., W^d`.
    pub fn coeff_vector(&self) -> Vec<BigRational> {
        (0..=self.degree)
            .map(|b| self.coeff(self.degree - b, b))
            .collect()
    }

    pub fn from_coeff_vector(degree: u32, v: &[BigRational]) -> UWPoly {
        let mut p = UWPoly::zero(degree);
        for (b, c) in v.iter().enumerate() {
            if !c.is_zero() {
                p.terms.insert((degree - b as u32, b as u32), c.clone());
            }
        }
        p
    }

    pub fn add(&self, o: &UWPoly) -> UWPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        assert_eq!(self.degree, o.degree, "adding UWPolys of different weight");
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            let e = terms.entry(*k).or_insert_with(BigRational::zero);
            *e += c;
        }
        terms.retain(|_, c| !c.is_zero());
        UWPoly {
            terms,
            degree: self.degree,
        }
    }

    pub fn neg(&self) -> UWPoly {
        self.scale(&-BigRational::one())
    }

    pub fn sub(&self, o: &UWPoly) -> UWPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &BigRational) -> UWPoly {
        if k.is_zero() {
            return UWPoly::zero(self.degree);
        }
        UWPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
            degree: self.degree,
        }
    }

    pub fn scale_int(&self, k: i64) -> UWPoly {
        self.scale(&BigRational::from_integer(k.into()))
    }

    pub fn mul(&self, o: &UWPoly) -> UWPoly {
        let mut terms: BTreeMap<(u32, u32), BigRational> = BTreeMap::new();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                let e = terms
                    .entry((a1 + a2, b1 + b2))
                    .or_insert_with(BigRational::zero);
                *e += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        UWPoly {
            terms,
            degree: self.degree + o.degree,
        }
    }

    pub fn pow(&self, n: u32) -> UWPoly {
        (0..n).fold(UWPoly::constant(BigRational::one()), |acc, _| acc.mul(self))
    }

    /// Substitute `U -> pu`, `W -> pw` (both of degree one).
    fn substitute(&self, pu: &UWPoly, pw: &UWPoly) -> UWPoly {
        let mut out = UWPoly::zero(self.degree);
        for ((a, b), c) in &self.terms {
            out = out.add(&pu.pow(*a).mul(&pw.pow(*b)).scale(c));
        }
        out
    }

    /// Action of a single generator.
    pub fn slash_letter(&self, l: Letter) -> UWPoly {
        match l {
            // T and T^-1 both send q^(1/2) to -q^(1/2), swapping U and W
            Letter::T | Letter::TInv => self.substitute(&UWPoly::w(), &UWPoly::u()),
            Letter::S => self.substitute(&UWPoly::u().neg(), &UWPoly::w().sub(&UWPoly::u())),
        }
    }

    pub fn slash(&self, word: &SlashWord) -> UWPoly {
        word.letters
            .iter()
            .fold(self.clone(), |p, l| p.slash_letter(*l))
    }

    /// Evaluate on given `U` and `W` series.
    pub fn to_qseries(&self, u: &QSeries, w: &QSeries) -> QSeries {
        let d = self.degree;
        let mut upow = vec![QSeries::one()];
        let mut wpow = vec![QSeries::one()];
        for i in 1..=d as usize {
            upow.push(upow[i - 1].mul(u));
            wpow.push(wpow[i - 1].mul(w));
        }
        let mut out: Option<QSeries> = None;
        for ((a, b), c) in &self.terms {
            let t = upow[*a as usize].mul(&wpow[*b as usize]).scale(c);
            out = Some(match out {
                Some(o) => o.add(&t),
                None => t,
            });
        }
        out.unwrap_or_else(|| u.mul(w).scale(&BigRational::zero()))
    }
}

impl fmt::Display for UWPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest power of U first
        let mut first = true;
        for ((a, b), c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match (a, b) {
                (0, 0) => String::new(),
                _ => format!("{}{}", power("U", *a), power("W", *b)),
            };
            if mono.is_empty() || !abs.is_one() {
                write!(f, "{abs}")?;
            }
            write!(f, "{mono}")?;
        }
        Ok(())
    }
}

fn power(x: &str, e: u32) -> String {
    match e {
        0 => String::new(),
        1 => x.to_string(),
        _ => format!("{x}^{e}"),
    }
}

impl FromStr for UWPoly {
    type Err = Error;

    /// Parses sums like `"U^5 - 6U^3W^2 + 4U^2W^3"`.
    fn from_str(s: &str) -> Result<UWPoly> {
        let bad = || Error::Parse(format!("bad UW polynomial {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut pieces = Vec::new();
        let mut cur = String::new();
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') {
                pieces.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        pieces.push(cur);
        let mut out: Option<UWPoly> = None;
        for piece in pieces {
            let (sign, body) = match piece.strip_prefix('-') {
                Some(b) => (-1, b),
                None => (1, piece.strip_prefix('+').unwrap_or(&piece)),
            };
            let split = body.find(['U', 'W']).unwrap_or(body.len());
            let (num, vars) = body.split_at(split);
            let num = num.trim_end_matches('*');
            let c: BigRational = if num.is_empty() {
                BigRational::one()
            } else if let Some((n, d)) = num.split_once('/') {
                BigRational::new(
                    n.parse::<BigInt>().map_err(|_| bad())?,
                    d.parse::<BigInt>().map_err(|_| bad())?,
                )
            } else {
                BigRational::from_integer(num.parse::<BigInt>().map_err(|_| bad())?)
            };
            let (mut a, mut b) = (0u32, 0u32);
            let mut rest = vars;
            while let Some(ch) = rest.chars().next() {
                rest = &rest[1..];
                let mut e = 1u32;
                if let Some(r) = rest.strip_prefix('^') {
                    let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
                    e = r[..end].parse().map_err(|_| bad())?;
                    rest = &r[end..];
                }
                rest = rest.trim_start_matches('*');
                match ch {
                    'U' => a += e,
                    'W' => b += e,
                    _ => return Err(bad()),
                }
            }
            let term = UWPoly::monomial(a, b, c * BigRational::from_integer(sign.into()));
            out = Some(match out {
                None => term,
                Some(p) if p.degree == term.degree || p.is_zero() || term.is_zero() => p.add(&term),
                Some(_) => return Err(bad()),
            });
        }
        out.ok_or_else(bad)
    }
}
