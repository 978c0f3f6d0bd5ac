//! Coefficientwise majorants: closed-form functions `B(x)` with
//! `B(x) >= sum |c_m| x^m` for `0 < x < 1`, used to bound series tails.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::ball::RealBall;
use crate::modforms::UWPoly;
use crate::qseries::QSeries;

#[derive(Clone, Debug, PartialEq)]
pub enum Majorant {
    /// A nonnegative constant.
    Const(BigRational),
    /// `x^m`.
    Monomial(i64),
    /// `1 + 2 sum_{n >= 1} x^(n^2)`, the theta sum in the index variable.
    Theta,
    /// Bounds for `E2`, `E4`, `E6` built from `sum_{d} d^k q^d / (1 - q)`, `q = x^2`.
    E2,
    E4,
    E6,
    /// `x^2 exp(24 q / (1 - q))`.
    Delta,
    /// `x^-2 exp(24 q / (1 - q)^2)`.
    DeltaInv,
    Sum(Vec<Majorant>),
    Prod(Vec<Majorant>),
    Pow(Box<Majorant>, u32),
}

/// Theta terms summed exactly before the geometric remainder.
const THETA_TERMS: i64 = 8;

impl Majorant {
    pub fn constant(c: &BigRational) -> Majorant {
        Majorant::Const(c.abs())
    }

    pub fn scaled(c: &BigRational, m: Majorant) -> Majorant {
        Majorant::Prod(vec![Majorant::constant(c), m])
    }

    /// Exact majorant of a finitely supported series.
    pub fn polynomial(s: &QSeries) -> Majorant {
        Majorant::Sum(
            s.iter()
                .map(|(m, c)| Majorant::Prod(vec![Majorant::constant(c), Majorant::Monomial(m)]))
                .collect(),
        )
    }

    /// Majorant of `p(U, W)`: both `U` and `W` are bounded by `theta^4`.
    pub fn uw_poly(p: &UWPoly) -> Majorant {
        let total = p.terms().fold(BigRational::zero(), |s, (_, c)| s + c.abs());
        Majorant::Prod(vec![
            Majorant::Const(total),
            Majorant::Pow(Box::new(Majorant::Theta), 4 * p.degree()),
        ])
    }

    /// Majorant of `p(U, W) / Delta`.
    pub fn uw_over_delta(p: &UWPoly) -> Majorant {
        Majorant::Prod(vec![Majorant::uw_poly(p), Majorant::DeltaInv])
    }

    /// Value at `x`, or `None` if `x` is not certainly inside `(0, 1)`.
    ///
    /// The upper endpoint of the returned ball bounds the majorant over every
    /// point of `x`.
    pub fn eval(&self, x: &RealBall) -> Option<RealBall> {
        let prec = x.prec();
        let one = RealBall::one(prec);
        if !x.is_positive() || !(&one - x).is_positive() {
            return None;
        }
        let q = x.sqr();
        let one_minus_q = &one - &q;
        Some(match self {
            Majorant::Const(c) => RealBall::from_rational(c, prec),
            Majorant::Monomial(m) => x.powi(*m as i32)?,
            Majorant::Theta => {
                let mut s = one.clone();
                for n in 1..=THETA_TERMS {
                    s = &s + &x.pow((n * n) as u32).mul_2exp(1);
                }
                let k = THETA_TERMS + 1;
                let rem = x.pow((k * k) as u32).mul_2exp(1).checked_div(&(&one - x))?;
                &s + &rem
            }
            Majorant::E2 => {
                let d = one_minus_q.pow(3);
                &one + &q.mul_i64(24).checked_div(&d)?
            }
            Majorant::E4 => {
                let poly = &(&one + &q.mul_i64(4)) + &q.sqr();
                &one + &(&q * &poly).mul_i64(240).checked_div(&one_minus_q.pow(5))?
            }
            Majorant::E6 => {
                let q2 = q.sqr();
                let poly = &(&(&(&one + &q.mul_i64(26)) + &q2.mul_i64(66))
                    + &(&q2 * &q).mul_i64(26))
                    + &q2.sqr();
                &one + &(&q * &poly).mul_i64(504).checked_div(&one_minus_q.pow(7))?
            }
            Majorant::Delta => {
                let e = q.mul_i64(24).checked_div(&one_minus_q)?.exp();
                &q * &e
            }
            Majorant::DeltaInv => {
                let e = q.mul_i64(24).checked_div(&one_minus_q.sqr())?.exp();
                e.checked_div(&q)?
            }
            Majorant::Sum(v) => {
                let mut s = RealBall::zero(prec);
                for m in v {
                    s = &s + &m.eval(x)?;
                }
                s
            }
            Majorant::Prod(v) => {
                let mut s = one.clone();
                for m in v {
                    s = &s * &m.eval(x)?;
                }
                s
            }
            Majorant::Pow(m, n) => m.eval(x)?.pow(*n),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::{self, DeltaMethod, FormBank};
    use num_traits::ToPrimitive;

    /// `sum |c_m| x^m` over the known coefficients of `s`.
    fn abs_sum(s: &QSeries, x: f64) -> f64 {
        s.iter()
            .map(|(m, c)| c.abs().to_f64().unwrap() * x.powi(m as i32))
            .sum()
    }

    #[test]
    fn majorants_dominate_known_coefficients() {
        let bank = FormBank::new(80);
        let delta_inv = bank.delta.invert(80).unwrap();
        let psi_num = modforms::psi_numerator();
        let cases: Vec<(QSeries, Majorant)> = vec![
            (bank.e2.clone(), Majorant::E2),
            (bank.e4.clone(), Majorant::E4),
            (bank.e6.clone(), Majorant::E6),
            (modforms::delta(80, DeltaMethod::Product), Majorant::Delta),
            (delta_inv, Majorant::DeltaInv),
            (bank.u.clone(), Majorant::Pow(Box::new(Majorant::Theta), 4)),
            (bank.psi(), Majorant::uw_over_delta(&psi_num)),
        ];
        for x in [0.05, 0.2, 0.4] {
            let xb = RealBall::from_f64(x, 128);
            for (s, m) in &cases {
                let bound = m.eval(&xb).unwrap().upper_f64();
                assert!(abs_sum(s, x) <= bound * (1.0 + 1e-12), "x = {x}, {m:?}");
            }
        }
    }

    #[test]
    fn out_of_range_is_refused() {
        assert!(Majorant::Theta.eval(&RealBall::from_f64(1.5, 64)).is_none());
        assert!(Majorant::E4.eval(&RealBall::zero(64)).is_none());
    }
}
