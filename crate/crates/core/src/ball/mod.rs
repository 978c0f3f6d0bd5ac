//! Midpoint–radius real balls over arbitrary-precision dyadic midpoints.
//!
//! A [`RealBall`] represents every real number in `[mid - rad, mid + rad]`.
//! Every operation returns a ball containing the exact image of every point of
//! its inputs, so comparisons made on balls (`is_positive`, `contains_zero`, …)
//! are sound statements about the underlying reals.

mod elementary;
mod mag;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use mag::Mag;

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 192;

/// Extra bits carried internally on top of the requested precision.
pub const GUARD_BITS: u32 = 32;

#[derive(Clone, Debug)]
pub struct RealBall {
    man: BigInt,
    exp: i64,
    rad: Mag,
    prec: u32,
}

impl RealBall {
    fn rounded(man: BigInt, exp: i64, rad: Mag, prec: u32) -> RealBall {
        let bits = man.bits();
        if bits <= prec as u64 {
            return RealBall {
                man,
                exp,
                rad,
                prec,
            };
        }
        let sh = bits - prec as u64;
        let m = &man >> sh;
        let e = exp + sh as i64;
        RealBall {
            man: m,
            exp: e,
            rad: rad.add(Mag::pow2(e)),
            prec,
        }
    }

    pub fn zero(prec: u32) -> RealBall {
        RealBall {
            man: BigInt::zero(),
            exp: 0,
            rad: Mag::ZERO,
            prec,
        }
    }

    pub fn one(prec: u32) -> RealBall {
        RealBall::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> RealBall {
        RealBall::rounded(BigInt::from(v), 0, Mag::ZERO, prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> RealBall {
        RealBall::rounded(v.clone(), 0, Mag::ZERO, prec)
    }

    /// The dyadic number `man * 2^exp`, rounded to `prec` bits.
    pub fn from_dyadic(man: BigInt, exp: i64, prec: u32) -> RealBall {
        RealBall::rounded(man, exp, Mag::ZERO, prec)
    }

    /// Exact conversion of a finite `f64` (then rounded to `prec`).
    pub fn from_f64(x: f64, prec: u32) -> RealBall {
        assert!(x.is_finite(), "RealBall::from_f64 needs a finite value");
        let (m, e) = mag::decompose_f64(x);
        let m = if x < 0.0 {
            -BigInt::from(m)
        } else {
            BigInt::from(m)
        };
        RealBall::rounded(m, e, Mag::ZERO, prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> RealBall {
        let n = q.numer();
        let d = q.denom();
        if d.is_one() {
            return RealBall::from_bigint(n, prec);
        }
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz).is_one() {
            return RealBall::rounded(n.clone(), -(tz as i64), Mag::ZERO, prec);
        }
        // quotient carries at least prec + 2 bits; truncation error below one unit
        let s = prec as i64 + 2 + d.bits() as i64 - n.bits() as i64;
        let s = s.max(0);
        let q_int = (n << s as u64).div_floor(d);
        RealBall::rounded(q_int, -s, Mag::pow2(-s), prec)
    }

    /// A ball containing the closed interval `[lo, hi]`.
    pub fn from_interval(lo: &BigRational, hi: &BigRational, prec: u32) -> RealBall {
        let two = BigRational::from_integer(BigInt::from(2));
        let mid = (lo + hi) / &two;
        let half = ((hi - lo) / &two).abs();
        let m = RealBall::from_rational(&mid, prec);
        let h = RealBall::from_rational(&half, prec);
        m.add_error(h.abs_upper())
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Re-round to a new precision (never shrinks the enclosure).
    pub fn with_prec(&self, prec: u32) -> RealBall {
        RealBall::rounded(self.man.clone(), self.exp, self.rad, prec)
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    pub fn mid_f64(&self) -> f64 {
        dyadic_to_f64(&self.man, self.exp)
    }

    /// The midpoint as an exact ball of radius zero.
    pub fn mid(&self) -> RealBall {
        RealBall {
            man: self.man.clone(),
            exp: self.exp,
            rad: Mag::ZERO,
            prec: self.prec,
        }
    }

    /// Midpoint as an exact rational.
    pub fn mid_rational(&self) -> BigRational {
        dyadic_to_rational(&self.man, self.exp)
    }

    pub fn add_error(&self, e: Mag) -> RealBall {
        RealBall {
            man: self.man.clone(),
            exp: self.exp,
            rad: self.rad.add(e),
            prec: self.prec,
        }
    }

    pub fn mid_abs_upper(&self) -> Mag {
        Mag::from_bigint_up(&self.man, self.exp)
    }

    fn mid_abs_lower(&self) -> Mag {
        Mag::from_bigint_down(&self.man, self.exp)
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        self.mid_abs_upper().add(self.rad)
    }

    /// Lower bound on `|x|` over the ball (zero when the ball contains 0).
    pub fn abs_lower(&self) -> Mag {
        self.mid_abs_lower().sub_lower(self.rad)
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive() && self.mid_abs_lower() > self.rad
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative() && self.mid_abs_lower() > self.rad
    }

    pub fn is_nonnegative(&self) -> bool {
        self.is_positive() || self.mid_abs_upper() <= self.rad && self.man.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// Lower endpoint, rounded down, as an exact rational.
    pub fn lower_rational(&self) -> BigRational {
        self.mid_rational() - mag_to_rational(self.rad)
    }

    /// Upper endpoint, rounded up, as an exact rational.
    pub fn upper_rational(&self) -> BigRational {
        self.mid_rational() + mag_to_rational(self.rad)
    }

    pub fn lower_f64(&self) -> f64 {
        self.mid_f64() - self.rad_f64()
    }

    pub fn upper_f64(&self) -> f64 {
        self.mid_f64() + self.rad_f64()
    }

    /// Whether the exact rational `q` lies in the ball.
    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let d = (self.mid_rational() - q).abs();
        d <= mag_to_rational(self.rad)
    }

    /// Whether `other` is entirely contained in `self`.
    pub fn contains(&self, other: &RealBall) -> bool {
        self.lower_rational() <= other.lower_rational()
            && other.upper_rational() <= self.upper_rational()
    }

    pub fn overlaps(&self, other: &RealBall) -> bool {
        self.lower_rational() <= other.upper_rational()
            && other.lower_rational() <= self.upper_rational()
    }

    /// Smallest ball (up to rounding) containing both inputs.
    pub fn union(&self, other: &RealBall) -> RealBall {
        let lo = self.lower_rational().min(other.lower_rational());
        let hi = self.upper_rational().max(other.upper_rational());
        RealBall::from_interval(&lo, &hi, self.prec.max(other.prec))
    }

    /// Multiply by `2^e` exactly.
    pub fn mul_2exp(&self, e: i64) -> RealBall {
        RealBall {
            man: self.man.clone(),
            exp: self.exp + e,
            rad: self.rad.mul_2exp(e),
            prec: self.prec,
        }
    }

    pub fn mul_i64(&self, k: i64) -> RealBall {
        let m = &self.man * k;
        let r = self.rad.mul(Mag::from_u64(k.unsigned_abs()));
        RealBall::rounded(m, self.exp, r, self.prec)
    }

    pub fn mul_rational(&self, q: &BigRational) -> RealBall {
        self * &RealBall::from_rational(q, self.prec)
    }

    /// Division by a positive machine integer.
    pub fn div_u64(&self, d: u64) -> RealBall {
        assert!(d != 0, "division by zero");
        if d.is_power_of_two() {
            return self.mul_2exp(-(d.trailing_zeros() as i64));
        }
        let prec = self.prec;
        let s = (prec as i64 + 2 + 64 - self.man.bits() as i64).max(0);
        let q = (&self.man << s as u64).div_floor(&BigInt::from(d));
        let err = Mag::pow2(self.exp - s);
        let rad = self.rad.div(Mag::from_u64(d)).add(err);
        RealBall::rounded(q, self.exp - s, rad, prec)
    }

    pub fn sqr(&self) -> RealBall {
        self * self
    }

    pub fn abs(&self) -> RealBall {
        if self.man.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// `self / other`, or `None` when `other` contains zero.
    pub fn checked_div(&self, other: &RealBall) -> Option<RealBall> {
        let denom_low = other.abs_lower();
        if denom_low.is_zero() {
            return None;
        }
        let prec = self.prec.max(other.prec);
        let s = (prec as i64 + 2 + other.man.bits() as i64 - self.man.bits() as i64).max(0);
        let q = (&self.man << s as u64).div_floor(&other.man);
        let qexp = self.exp - other.exp - s;
        let err = Mag::pow2(qexp);
        let q_abs = Mag::from_bigint_up(&q, qexp).add(err);
        let rad = self.rad.add(q_abs.mul(other.rad)).div(denom_low).add(err);
        Some(RealBall::rounded(q, qexp, rad, prec))
    }

    pub fn recip(&self) -> Option<RealBall> {
        RealBall::one(self.prec).checked_div(self)
    }

    pub fn pow(&self, n: u32) -> RealBall {
        let mut result = RealBall::one(self.prec);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr();
            }
        }
        result
    }

    /// Integer power with a possibly negative exponent.
    pub fn powi(&self, n: i32) -> Option<RealBall> {
        if n >= 0 {
            Some(self.pow(n as u32))
        } else {
            self.pow(n.unsigned_abs()).recip()
        }
    }

    /// Square root; a ball straddling zero maps to `[0, sqrt(upper)]`.
    pub fn sqrt(&self) -> RealBall {
        let prec = self.prec;
        if !self.is_positive() {
            let up = if self.man.is_positive() {
                self.abs_upper()
            } else {
                self.rad
            };
            let s = up.sqrt_up().mul_2exp(-1);
            let (m, e) = s.parts();
            return RealBall {
                man: BigInt::from(m),
                exp: e,
                rad: s,
                prec,
            };
        }
        // scale so the integer root carries about prec + 2 bits
        let want = 2 * (prec as i64 + 2);
        let mut sh = want - self.man.bits() as i64;
        if (self.exp - sh) % 2 != 0 {
            sh += 1;
        }
        let scaled = if sh >= 0 {
            &self.man << sh as u64
        } else {
            &self.man >> (-sh) as u64
        };
        // right shifts truncate; fold the loss into an extra unit below
        let root = scaled.sqrt();
        let e = (self.exp - sh) / 2;
        let rounding = Mag::pow2(e).mul_2exp(1);
        let lower = self.abs_lower();
        // |sqrt(x) - sqrt(m)| <= r / sqrt(m - r)
        let prop = self
            .rad
            .div(lower.sqrt_up().mul_2exp(-1).max(Mag::pow2(-100000)));
        let prop = if self.rad.is_zero() { Mag::ZERO } else { prop };
        RealBall::rounded(root, e, rounding.add(prop), prec)
    }

    /// Compact decimal rendering `mid ± rad` with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        format!(
            "{} ± {}",
            dyadic_to_decimal(&self.man, self.exp, digits),
            mag_to_decimal(self.rad)
        )
    }

    /// Midpoint only, with `digits` significant digits.
    pub fn mid_decimal(&self, digits: usize) -> String {
        dyadic_to_decimal(&self.man, self.exp, digits)
    }

    pub fn rad_decimal(&self) -> String {
        mag_to_decimal(self.rad)
    }

    /// Number of significant decimal digits justified by `prec`.
    pub fn decimal_digits(prec: u32) -> usize {
        ((prec as f64) * std::f64::consts::LOG10_2).floor() as usize
    }
}

impl fmt::Display for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = RealBall::decimal_digits(self.prec).min(60);
        write!(f, "{}", self.to_decimal(digits))
    }
}

impl<'a> Add<&'a RealBall> for &'a RealBall {
    type Output = RealBall;
    fn add(self, o: &RealBall) -> RealBall {
        let prec = self.prec.max(o.prec);
        let (man, exp) = if self.exp == o.exp {
            (&self.man + &o.man, self.exp)
        } else if self.exp > o.exp {
            ((&self.man << (self.exp - o.exp) as u64) + &o.man, o.exp)
        } else {
            (&self.man + (&o.man << (o.exp - self.exp) as u64), self.exp)
        };
        RealBall::rounded(man, exp, self.rad.add(o.rad), prec)
    }
}

impl<'a> Sub<&'a RealBall> for &'a RealBall {
    type Output = RealBall;
    fn sub(self, o: &RealBall) -> RealBall {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RealBall> for &'a RealBall {
    type Output = RealBall;
    fn mul(self, o: &RealBall) -> RealBall {
        let prec = self.prec.max(o.prec);
        let man = &self.man * &o.man;
        let exp = self.exp + o.exp;
        let rad = if self.rad.is_zero() && o.rad.is_zero() {
            Mag::ZERO
        } else {
            self.mid_abs_upper()
                .mul(o.rad)
                .add(o.mid_abs_upper().mul(self.rad))
                .add(self.rad.mul(o.rad))
        };
        RealBall::rounded(man, exp, rad, prec)
    }
}

impl Neg for &RealBall {
    type Output = RealBall;
    fn neg(self) -> RealBall {
        RealBall {
            man: -&self.man,
            exp: self.exp,
            rad: self.rad,
            prec: self.prec,
        }
    }
}

impl Neg for RealBall {
    type Output = RealBall;
    fn neg(self) -> RealBall {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<RealBall> for RealBall {
            type Output = RealBall;
            fn $m(self, o: RealBall) -> RealBall {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a RealBall> for RealBall {
            type Output = RealBall;
            fn $m(self, o: &RealBall) -> RealBall {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<RealBall> for &'a RealBall {
            type Output = RealBall;
            fn $m(self, o: RealBall) -> RealBall {
                self.$m(&o)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

pub(crate) fn mag_to_rational(m: Mag) -> BigRational {
    let (man, exp) = m.parts();
    dyadic_to_rational(&BigInt::from(man), exp)
}

fn dyadic_to_rational(man: &BigInt, exp: i64) -> BigRational {
    if exp >= 0 {
        BigRational::from_integer(man << exp as u64)
    } else {
        BigRational::new(man.clone(), BigInt::one() << (-exp) as u64)
    }
}

fn dyadic_to_f64(man: &BigInt, exp: i64) -> f64 {
    if man.is_zero() {
        return 0.0;
    }
    let bits = man.bits() as i64;
    let sh = (bits - 60).max(0);
    let top = (man >> sh as u64).to_f64().unwrap_or(0.0);
    let e = exp + sh;
    if e > 1100 {
        return top.signum() * f64::INFINITY;
    }
    if e < -1200 {
        // split the scaling so subnormal results are not lost to overflow in powi
        return top * 2f64.powi(-600) * 2f64.powi((e + 600).max(-1100) as i32);
    }
    top * 2f64.powi(e as i32)
}

fn dyadic_to_decimal(man: &BigInt, exp: i64, digits: usize) -> String {
    if man.is_zero() {
        return "0".to_string();
    }
    let neg = man.is_negative();
    let a = man.abs();
    // decimal exponent estimate of |value|
    let log10 = (a.bits() as f64 - 1.0 + exp as f64) * std::f64::consts::LOG10_2;
    let mut e10 = log10.floor() as i64;
    let mut text = None;
    for _ in 0..3 {
        // scaled = |value| * 10^(digits-1-e10), rounded to nearest integer
        let p = digits as i64 - 1 - e10;
        let mut num = a.clone();
        let mut den = BigInt::one();
        if p >= 0 {
            num *= BigInt::from(10u32).pow(p as u32);
        } else {
            den *= BigInt::from(10u32).pow((-p) as u32);
        }
        if exp >= 0 {
            num <<= exp as u64;
        } else {
            den <<= (-exp) as u64;
        }
        let (q, r) = num.div_rem(&den);
        let q = if (r << 1u32) >= den { q + 1 } else { q };
        let s = q.to_string();
        if s.len() > digits {
            e10 += 1;
            continue;
        }
        if s.len() < digits {
            e10 -= 1;
            continue;
        }
        text = Some(s);
        break;
    }
    let s = text.unwrap_or_else(|| "0".repeat(digits));
    let mantissa = if s.len() > 1 {
        format!("{}.{}", &s[..1], &s[1..])
    } else {
        s
    };
    let sign = if neg { "-" } else { "" };
    if (-5..=20).contains(&e10) && digits as i64 > e10 {
        // plain positional notation for moderate magnitudes
        let digits_str: String = mantissa.chars().filter(|c| *c != '.').collect();
        if e10 >= 0 {
            let int_len = (e10 + 1) as usize;
            let (i, f) = digits_str.split_at(int_len.min(digits_str.len()));
            if f.is_empty() {
                format!("{sign}{i}")
            } else {
                format!("{sign}{i}.{f}")
            }
        } else {
            let zeros = "0".repeat((-e10 - 1) as usize);
            format!("{sign}0.{zeros}{digits_str}")
        }
    } else {
        format!("{sign}{mantissa}e{e10}")
    }
}

fn mag_to_decimal(m: Mag) -> String {
    if m.is_zero() {
        return "0".to_string();
    }
    let l10 = m.log2() * std::f64::consts::LOG10_2;
    let mut e = l10.floor() as i64;
    let mut mant = 10f64.powf(l10 - e as f64);
    // round the printed mantissa up so the printed radius stays an upper bound
    mant = (mant * 100.0 * (1.0 + 1e-12)).ceil() / 100.0;
    if mant >= 10.0 {
        mant /= 10.0;
        e += 1;
    }
    format!("{mant:.2}e{e}")
}
