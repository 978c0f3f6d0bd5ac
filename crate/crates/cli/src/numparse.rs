//! Exact parsing of command-line numbers: decimals, rationals and `sqrt(x)`.

use magic8::RealBall;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// A decimal such as `-1.25e-3`, or a rational `p/q`.
pub fn rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.contains('/') {
        let q: BigRational = s.parse().map_err(|_| format!("bad rational {s:?}"))?;
        return Ok(q);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (
            &s[..i],
            s[i + 1..]
                .parse::<i32>()
                .map_err(|_| format!("bad exponent in {s:?}"))?,
        ),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let neg = int.starts_with('-');
    let int = int.trim_start_matches(['-', '+']);
    if int.is_empty() && frac.is_empty() {
        return Err(format!("bad number {s:?}"));
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(format!("bad number {s:?}"));
    }
    let digits: BigInt = format!("0{int}{frac}").parse().expect("digits");
    let ten = BigInt::from(10);
    let scale = exp - frac.len() as i32;
    let mut q = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// A real number given exactly or as the square root of an exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Num {
    Exact(BigRational),
    Sqrt(BigRational),
}

impl Num {
    pub fn parse(s: &str) -> Result<Num, String> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let q = rational(inner)?;
            if q.is_negative() {
                return Err(format!("square root of a negative number in {s:?}"));
            }
            return Ok(Num::Sqrt(q));
        }
        rational(t).map(Num::Exact)
    }

    pub fn ball(&self, prec: u32) -> RealBall {
        match self {
            Num::Exact(q) => RealBall::from_rational(q, prec),
            Num::Sqrt(q) if q.is_zero() => RealBall::zero(prec),
            Num::Sqrt(q) => RealBall::from_rational(q, prec + 16).sqrt().with_prec(prec),
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Num::Exact(q) if q.is_negative())
    }
}

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Num::Exact(q) => write!(f, "{q}"),
            Num::Sqrt(q) => write!(f, "sqrt({q})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(rational("1.7").unwrap(), q(17, 10));
        assert_eq!(rational("-0.015").unwrap(), q(-3, 200));
        assert_eq!(rational("2").unwrap(), q(2, 1));
        assert_eq!(rational(".5").unwrap(), q(1, 2));
        assert_eq!(rational("1.5e2").unwrap(), q(150, 1));
        assert_eq!(rational("25e-2").unwrap(), q(1, 4));
        assert_eq!(rational("3/6").unwrap(), q(1, 2));
    }

    #[test]
    fn malformed_numbers_are_rejected() {
        for s in ["", "-", "1.2.3", "abc", "1e", "1/0x", "sqrt(-2)"] {
            assert!(Num::parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn square_roots() {
        assert_eq!(Num::parse("sqrt(2)").unwrap(), Num::Sqrt(q(2, 1)));
        let b = Num::parse("sqrt(2)").unwrap().ball(128);
        assert!((b.mid_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(b.rad_f64() < 1e-30);
        assert_eq!(Num::parse("sqrt(0)").unwrap().ball(64).mid_f64(), 0.0);
    }
}
