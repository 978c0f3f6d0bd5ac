//! Constants and elementary functions on balls.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::{Mag, RealBall, GUARD_BITS};

/// Sums `first + first*ratio_1 + ...` where successive terms come from `next`,
/// stopping once a term drops below `2^-bits`. `next` must shrink terms by at
/// least half from the first term on, so the omitted tail is bounded by twice
/// the first omitted term.
fn geometric_series<F>(first: RealBall, bits: u32, mut next: F) -> RealBall
where
    F: FnMut(&RealBall, u64) -> RealBall,
{
    let eps = Mag::pow2(-(bits as i64) - 2);
    let mut sum = first.clone();
    let mut term = first;
    let mut j = 1u64;
    loop {
        term = next(&term, j);
        let up = term.abs_upper();
        if up <= eps {
            return sum.add_error(up.mul_2exp(1));
        }
        sum = &sum + &term;
        j += 1;
    }
}

fn cache() -> &'static Mutex<HashMap<(u8, u32), RealBall>> {
    static C: OnceLock<Mutex<HashMap<(u8, u32), RealBall>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(tag: u8, prec: u32, f: fn(u32) -> RealBall) -> RealBall {
    // round the key up so nearby precisions share an entry
    let key = prec.div_ceil(64) * 64;
    if let Some(v) = cache().lock().expect("constant cache").get(&(tag, key)) {
        return v.with_prec(prec);
    }
    let v = f(key);
    cache()
        .lock()
        .expect("constant cache")
        .insert((tag, key), v.clone());
    v.with_prec(prec)
}

/// `sum_k (sign)^k x^(2k+1)/(2k+1)` for `x = 1/n`, i.e. atan or atanh of `1/n`.
fn arc_series(n: i64, alternating: bool, w: u32) -> RealBall {
    let x = RealBall::from_rational(&BigRational::new(1.into(), n.into()), w);
    let x2 = x.sqr();
    // carry the bare power separately so the divisions do not compound
    let mut power = x.clone();
    let mut sum = x.clone();
    let eps = Mag::pow2(-(w as i64) - 2);
    let mut k = 1u64;
    loop {
        power = &power * &x2;
        let t = power.div_u64(2 * k + 1);
        let up = t.abs_upper();
        if up <= eps {
            return sum.add_error(up.mul_2exp(1));
        }
        sum = if alternating && k % 2 == 1 {
            &sum - &t
        } else {
            &sum + &t
        };
        k += 1;
    }
}

fn compute_pi(prec: u32) -> RealBall {
    let w = prec + GUARD_BITS;
    let a = arc_series(5, true, w).mul_i64(16);
    let b = arc_series(239, true, w).mul_i64(4);
    (&a - &b).with_prec(prec)
}

fn compute_ln2(prec: u32) -> RealBall {
    let w = prec + GUARD_BITS;
    arc_series(3, false, w).mul_2exp(1).with_prec(prec)
}

/// An enclosure of pi at `prec` bits.
pub fn pi(prec: u32) -> RealBall {
    cached(0, prec, compute_pi)
}

/// An enclosure of ln 2 at `prec` bits.
pub fn ln2(prec: u32) -> RealBall {
    cached(1, prec, compute_ln2)
}

/// Nearest integer to the midpoint of `x / c` (computed in f64 after scaling).
fn nearest_multiple(x: &RealBall, c: f64) -> i64 {
    let v = x.mid_f64() / c;
    assert!(v.abs() < 1e15, "argument too large for reduction");
    v.round() as i64
}

impl RealBall {
    pub fn pi(prec: u32) -> RealBall {
        pi(prec)
    }

    pub fn ln2(prec: u32) -> RealBall {
        ln2(prec)
    }

    /// `e^x`.
    pub fn exp(&self) -> RealBall {
        let prec = self.prec;
        let k = nearest_multiple(self, std::f64::consts::LN_2);
        let kbits = 64 - k.unsigned_abs().leading_zeros();
        let halvings: i64 = 16;
        let w = prec + GUARD_BITS + halvings as u32 + kbits;
        let x = self.with_prec(w);
        let r = if k == 0 {
            x
        } else {
            &x - &ln2(w + kbits).mul_i64(k).with_prec(w)
        };
        let y = r.mul_2exp(-halvings);
        // |y| is far below 1/2, so each term shrinks by at least half
        assert!(
            y.abs_upper() < Mag::pow2(-2),
            "exp argument reduction left a wide ball"
        );
        let one = RealBall::one(w);
        let mut s = geometric_series(one, w, |t, j| (t * &y).div_u64(j));
        for _ in 0..halvings {
            s = s.sqr();
        }
        s.mul_2exp(k).with_prec(prec)
    }

    /// `(sin x, cos x)`.
    pub fn sin_cos(&self) -> (RealBall, RealBall) {
        let prec = self.prec;
        if self.rad > Mag::pow2(-1) {
            let unit = RealBall::zero(prec).add_error(Mag::from_u64(1));
            return (unit.clone(), unit);
        }
        let k = nearest_multiple(self, std::f64::consts::FRAC_PI_2);
        let kbits = 64 - k.unsigned_abs().leading_zeros();
        let w = prec + GUARD_BITS + kbits;
        let x = self.with_prec(w);
        let r = if k == 0 {
            x
        } else {
            let half_pi = pi(w + kbits).mul_2exp(-1);
            &x - &half_pi.mul_i64(k).with_prec(w)
        };
        // |r| <= pi/4 + 1/2 + slop, so successive ratios are below 1/2 once j >= 2,
        // which is all the tail bound needs since terms only get small there
        let r2 = r.sqr();
        let s = geometric_series(r.clone(), w, |t, j| {
            -((t * &r2).div_u64((2 * j) * (2 * j + 1)))
        });
        let c = geometric_series(RealBall::one(w), w, |t, j| {
            -((t * &r2).div_u64((2 * j - 1) * (2 * j)))
        });
        let (s, c) = match k.rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        };
        (clamp_unit(s.with_prec(prec)), clamp_unit(c.with_prec(prec)))
    }

    pub fn sin(&self) -> RealBall {
        self.sin_cos().0
    }

    pub fn cos(&self) -> RealBall {
        self.sin_cos().1
    }

    /// `sin(x)/x`, continuous at zero.
    pub fn sinc(&self) -> RealBall {
        self.sinc_jet().0
    }

    /// `(sinc x, d/dx sinc x)`.
    pub fn sinc_jet(&self) -> (RealBall, RealBall) {
        let prec = self.prec;
        if self.abs_upper() < Mag::from_u64(1) {
            let w = prec + GUARD_BITS;
            let x = self.with_prec(w);
            let x2 = x.sqr();
            // sinc = sum (-1)^j x^(2j)/(2j+1)!
            let v = geometric_series(RealBall::one(w), w, |t, j| {
                -((t * &x2).div_u64((2 * j) * (2 * j + 1)))
            });
            // sinc' = sum_{j>=1} (-1)^j 2j x^(2j-1)/(2j+1)! = x * sum_{j>=0} (-1)^(j+1) (2j+2) x^(2j)/(2j+3)!
            let first = RealBall::from_rational(&BigRational::new((-1).into(), 3.into()), w);
            let d = geometric_series(first, w, |t, j| -((t * &x2).div_u64(2 * j * (2 * j + 3))));
            return (v.with_prec(prec), (&d * &x).with_prec(prec));
        }
        let (s, c) = self.sin_cos();
        let v = s.checked_div(self).expect("nonzero argument");
        let d = (&(&c * self) - &s)
            .checked_div(&self.sqr())
            .expect("nonzero argument");
        (v, d)
    }

    /// Midpoint rounded to the nearest integer, if it fits in an `i64`.
    pub fn mid_round_i64(&self) -> Option<i64> {
        let q = self.mid_rational();
        q.round().to_integer().to_i64()
    }

    /// `n!` as an exact ball (rounded to `prec`).
    pub fn factorial(n: u32, prec: u32) -> RealBall {
        let mut v = BigInt::from(1);
        for i in 2..=n {
            v *= i;
        }
        RealBall::from_bigint(&v, prec)
    }

    /// Sign of a ball: `Some(1)`, `Some(-1)`, or `None` if it straddles zero.
    pub fn sign(&self) -> Option<i8> {
        if self.is_positive() {
            Some(1)
        } else if self.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    /// The exact value of a magnitude.
    pub fn from_mag(m: Mag, prec: u32) -> RealBall {
        let (man, exp) = m.parts();
        RealBall::from_dyadic(BigInt::from(man), exp, prec)
    }

    /// `|x|` upper bound as an exact positive rational.
    pub fn abs_upper_rational(&self) -> BigRational {
        super::mag_to_rational(self.abs_upper()).abs()
    }
}

/// Intersect with `[-1, 1]` when that shrinks the enclosure.
fn clamp_unit(b: RealBall) -> RealBall {
    if b.rad > Mag::from_u64(1) && b.mid_abs_upper() <= b.rad {
        RealBall::zero(b.prec).add_error(Mag::from_u64(1))
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let p = pi(256);
        assert!(p
            .mid_decimal(40)
            .starts_with("3.14159265358979323846264338327950288419"));
        assert!(p.rad_f64() < 1e-70);
    }

    #[test]
    fn ln2_digits() {
        let l = ln2(192);
        assert!(l
            .mid_decimal(30)
            .starts_with("0.693147180559945309417232121458"));
    }

    #[test]
    fn exp_matches_f64() {
        for x in [-30.5, -1.0, 0.0, 0.25, 1.0, 7.3, 80.0] {
            let b = RealBall::from_f64(x, 128).exp();
            let rel = (b.mid_f64() - f64::exp(x)).abs() / f64::exp(x);
            assert!(rel < 1e-14, "x = {x}");
            assert!(b.rad_f64() / f64::exp(x) < 1e-30);
        }
    }

    #[test]
    fn exp_one_digits() {
        let e = RealBall::one(200).exp();
        assert!(e
            .mid_decimal(40)
            .starts_with("2.718281828459045235360287471352662497757"));
    }

    #[test]
    fn sin_cos_match_f64() {
        for x in [-10.0, -2.0, 0.0, 0.3, 1.57, 3.0, 100.0] {
            let (s, c) = RealBall::from_f64(x, 128).sin_cos();
            assert!((s.mid_f64() - f64::sin(x)).abs() < 1e-14, "x = {x}");
            assert!((c.mid_f64() - f64::cos(x)).abs() < 1e-14, "x = {x}");
            assert!(s.rad_f64() < 1e-30);
        }
    }

    #[test]
    fn sin_of_pi_contains_zero() {
        let p = pi(192);
        let s = p.sin();
        assert!(s.contains_zero());
        assert!(s.rad_f64() < 1e-50);
    }

    #[test]
    fn sinc_jet_agrees_across_branches() {
        for x in [0.0, 0.1, 0.9, 1.1, 2.5] {
            let (v, d) = RealBall::from_f64(x, 128).sinc_jet();
            let (fv, fd) = if x == 0.0 {
                (1.0, 0.0)
            } else {
                (x.sin() / x, (x * x.cos() - x.sin()) / (x * x))
            };
            assert!((v.mid_f64() - fv).abs() < 1e-14, "x = {x}");
            assert!((d.mid_f64() - fd).abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn wide_ball_encloses_exp_range() {
        let x = RealBall::from_f64(1.0, 128).add_error(Mag::pow2(-4));
        let e = x.exp();
        assert!(e.contains_rational(&BigRational::new(27183.into(), 10000.into())));
        assert!(e.lower_f64() <= f64::exp(1.0 - 1.0 / 16.0));
        assert!(e.upper_f64() >= f64::exp(1.0 + 1.0 / 16.0));
    }
}
