//! Nonnegative magnitudes with directed rounding, used as ball radii.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

const BITS: u32 = 30;
const TOP: u128 = 1 << BITS;

/// A nonnegative number `man * 2^exp` with a 30-bit mantissa.
///
/// Arithmetic rounds in the direction named by the method (`*_up` methods are
/// the default), so a `Mag` produced by `add`/`mul`/`div` is always an upper
/// bound of the exact result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mag {
    man: u64,
    exp: i64,
}

impl Mag {
    pub const ZERO: Mag = Mag { man: 0, exp: 0 };

    fn norm(man: u128, exp: i64, up: bool) -> Mag {
        if man == 0 {
            return Mag::ZERO;
        }
        let bits = 128 - man.leading_zeros();
        if bits > BITS {
            let sh = bits - BITS;
            let lost = man & ((1u128 << sh) - 1) != 0;
            let mut m = man >> sh;
            let mut e = exp + sh as i64;
            if up && lost {
                m += 1;
                if m == TOP {
                    m >>= 1;
                    e += 1;
                }
            }
            Mag {
                man: m as u64,
                exp: e,
            }
        } else {
            let sh = BITS - bits;
            Mag {
                man: (man << sh) as u64,
                exp: exp - sh as i64,
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Mag {
        Mag {
            man: 1 << (BITS - 1),
            exp: e - (BITS as i64 - 1),
        }
    }

    pub fn from_u64(v: u64) -> Mag {
        Mag::norm(v as u128, 0, true)
    }

    /// Upper bound of `|m| * 2^e`.
    pub fn from_bigint_up(m: &BigInt, e: i64) -> Mag {
        Self::from_bigint(m, e, true)
    }

    /// Lower bound of `|m| * 2^e`.
    pub fn from_bigint_down(m: &BigInt, e: i64) -> Mag {
        Self::from_bigint(m, e, false)
    }

    fn from_bigint(m: &BigInt, e: i64, up: bool) -> Mag {
        if m.is_zero() {
            return Mag::ZERO;
        }
        let a = m.abs();
        let bits = a.bits();
        if bits <= 100 {
            let v: u128 = a.try_into().expect("fits in 100 bits");
            return Mag::norm(v, e, up);
        }
        let sh = bits - 64;
        let top: BigInt = &a >> sh;
        let lost = !(&a - (&top << sh)).is_zero();
        let v: u128 = top.try_into().expect("fits in 64 bits");
        let v = if up && lost { v + 1 } else { v };
        Mag::norm(v, e + sh as i64, up)
    }

    /// Upper bound for a finite nonnegative `f64`.
    pub fn from_f64_up(x: f64) -> Mag {
        assert!(
            x >= 0.0 && x.is_finite(),
            "Mag::from_f64_up needs a finite nonnegative value"
        );
        if x == 0.0 {
            return Mag::ZERO;
        }
        let (m, e) = decompose_f64(x);
        Mag::norm(m as u128, e, true)
    }

    /// Approximate value; may underflow to zero or overflow to infinity.
    pub fn to_f64(&self) -> f64 {
        if self.man == 0 {
            return 0.0;
        }
        (self.man as f64) * 2f64.powi(self.exp.clamp(-2000, 2000) as i32)
    }

    /// Approximate base-2 logarithm (`-inf` for zero).
    pub fn log2(&self) -> f64 {
        if self.man == 0 {
            return f64::NEG_INFINITY;
        }
        (self.man as f64).log2() + self.exp as f64
    }

    /// Smallest `e` with `self < 2^e`.
    pub fn exp_bound(&self) -> i64 {
        self.exp + BITS as i64
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, o: Mag) -> Mag {
        if self.man == 0 {
            return o;
        }
        if o.man == 0 {
            return self;
        }
        let (a, b) = if self.exp >= o.exp {
            (self, o)
        } else {
            (o, self)
        };
        let sh = a.exp - b.exp;
        if sh > 64 {
            return Mag::norm(a.man as u128 + 1, a.exp, true);
        }
        Mag::norm(((a.man as u128) << sh) + b.man as u128, b.exp, true)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: Mag) -> Mag {
        if self.man == 0 || o.man == 0 {
            return Mag::ZERO;
        }
        Mag::norm(self.man as u128 * o.man as u128, self.exp + o.exp, true)
    }

    /// Upper bound of `self / o`; `o` must be nonzero.
    #[allow(clippy::should_implement_trait)]
    pub fn div(self, o: Mag) -> Mag {
        assert!(o.man != 0, "Mag division by zero");
        if self.man == 0 {
            return Mag::ZERO;
        }
        let n = (self.man as u128) << 64;
        let d = o.man as u128;
        let q = n.div_ceil(d);
        Mag::norm(q, self.exp - o.exp - 64, true)
    }

    /// Lower bound of `max(self - o, 0)`.
    pub fn sub_lower(self, o: Mag) -> Mag {
        if o.man == 0 {
            return self;
        }
        if self <= o {
            return Mag::ZERO;
        }
        // here self > o, so self.exp >= o.exp
        let sh = self.exp - o.exp;
        if sh > 64 {
            return Mag::norm(self.man as u128 - 1, self.exp, false);
        }
        Mag::norm(((self.man as u128) << sh) - o.man as u128, o.exp, false)
    }

    /// Upper bound of `self * 2^e`.
    pub fn mul_2exp(self, e: i64) -> Mag {
        if self.man == 0 {
            return self;
        }
        Mag {
            man: self.man,
            exp: self.exp + e,
        }
    }

    pub fn max(self, o: Mag) -> Mag {
        if self >= o {
            self
        } else {
            o
        }
    }

    /// Upper bound of `sqrt(self)`.
    pub fn sqrt_up(self) -> Mag {
        if self.man == 0 {
            return self;
        }
        // make the exponent even and widen the mantissa before the integer root
        let (m, e) = if self.exp % 2 == 0 {
            ((self.man as u128) << 64, self.exp - 64)
        } else {
            ((self.man as u128) << 65, self.exp - 65)
        };
        let mut r = (m as f64).sqrt() as u128;
        while r * r > m {
            r -= 1;
        }
        while (r + 1) * (r + 1) <= m {
            r += 1;
        }
        if r * r < m {
            r += 1;
        }
        Mag::norm(r, e / 2, true)
    }

    /// Split into an exact `(mantissa, exponent)` pair.
    pub fn parts(&self) -> (u64, i64) {
        (self.man, self.exp)
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mag {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self.man == 0, o.man == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            // normalized mantissas share a bit length, so exponents decide first
            _ => self.exp.cmp(&o.exp).then(self.man.cmp(&o.man)),
        }
    }
}

/// `x = m * 2^e` exactly, with `m` an odd-or-zero 53-bit integer.
pub(crate) fn decompose_f64(x: f64) -> (u64, i64) {
    let bits = x.abs().to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_field == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_field - 1075)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_and_mul_round_up() {
        let a = Mag::from_u64(3);
        let b = Mag::from_u64(5);
        assert_eq!(a.add(b).to_f64(), 8.0);
        assert_eq!(a.mul(b).to_f64(), 15.0);
        let third = Mag::from_u64(1).div(Mag::from_u64(3));
        assert!(third.to_f64() >= 1.0 / 3.0);
        assert!(third.to_f64() < 1.0 / 3.0 + 1e-8);
    }

    #[test]
    fn sub_lower_is_a_lower_bound() {
        let a = Mag::from_u64(10);
        let b = Mag::from_u64(3);
        assert_eq!(a.sub_lower(b).to_f64(), 7.0);
        assert!(b.sub_lower(a).is_zero());
        let tiny = Mag::pow2(-200);
        assert!(a.sub_lower(tiny).to_f64() <= 10.0);
    }

    #[test]
    fn sqrt_up_bounds() {
        for v in [1u64, 2, 3, 10, 1 << 40] {
            let s = Mag::from_u64(v).sqrt_up().to_f64();
            assert!(s * s >= v as f64);
            assert!(s <= (v as f64).sqrt() * (1.0 + 1e-8));
        }
    }

    #[test]
    fn ordering_matches_values() {
        assert!(Mag::pow2(-3) < Mag::pow2(-2));
        assert!(Mag::from_u64(7) > Mag::from_u64(6));
        assert!(Mag::ZERO < Mag::pow2(-1000));
    }
}
