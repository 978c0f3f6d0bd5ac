//! Evaluation of `sum_k t^k pi^-p S_k(y)` on the imaginary axis with a
//! rigorous truncation bound.
//!
//! In the large-`t` regime `y = e^(-pi t)`; in the small-`t` regime the series
//! come from a modular transformation and `y = e^(-pi / t)`. Either way `y` is
//! the half-integer variable `q^(1/2)`, so index `m` contributes `y^m`.

use num_rational::BigRational;
use num_traits::Signed;

use crate::ball::{Mag, RealBall};
use crate::error::{Error, Result};
use crate::qseries::QSeries;

use super::majorant::Majorant;

/// One term `t^k pi^-p S(y)`; `maj` majorizes `S` coefficientwise.
#[derive(Clone, Debug)]
pub struct RegimeTerm {
    pub k: i32,
    pub p: u32,
    pub series: QSeries,
    pub maj: Majorant,
}

#[derive(Clone, Debug)]
pub struct Regime {
    pub terms: Vec<RegimeTerm>,
    /// Whether `y = e^(-pi/t)` rather than `e^(-pi t)`.
    pub small: bool,
}

impl Regime {
    pub fn new(small: bool) -> Regime {
        Regime {
            terms: Vec::new(),
            small,
        }
    }

    /// Adds a term, merging with an existing term of the same `(k, p)`.
    pub fn with_term(mut self, k: i32, p: u32, series: QSeries, maj: Majorant) -> Regime {
        if let Some(t) = self.terms.iter_mut().find(|t| t.k == k && t.p == p) {
            t.series = t.series.add(&series);
            t.maj = Majorant::Sum(vec![t.maj.clone(), maj]);
        } else {
            self.terms.push(RegimeTerm { k, p, series, maj });
        }
        self
    }

    pub fn add(&self, o: &Regime) -> Regime {
        assert_eq!(self.small, o.small, "adding regimes of different kinds");
        o.terms.iter().fold(self.clone(), |acc, t| {
            acc.with_term(t.k, t.p, t.series.clone(), t.maj.clone())
        })
    }

    /// Multiply by `c pi^-p`.
    pub fn scale_pi(&self, c: &BigRational, p: u32) -> Regime {
        Regime {
            terms: self
                .terms
                .iter()
                .map(|t| RegimeTerm {
                    k: t.k,
                    p: t.p + p,
                    series: t.series.scale(c),
                    maj: Majorant::scaled(c, t.maj.clone()),
                })
                .collect(),
            small: self.small,
        }
    }

    /// Smallest index with a nonzero coefficient across all terms.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.iter().filter_map(|t| t.series.valuation()).min()
    }

    pub fn prepare(&self, prec: u32) -> PreparedRegime {
        let wp = prec + crate::ball::GUARD_BITS;
        let pi = RealBall::pi(wp);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let min = t.series.min_index();
                let top = t.series.degree().map_or(min, |d| d + 1);
                let end = t.series.trunc_index().min(top.max(min));
                let coeffs = (min..end)
                    .map(|m| match t.series.coeff(m) {
                        Some(c) => RealBall::from_rational(&c, wp),
                        None => RealBall::zero(wp),
                    })
                    .collect();
                PreparedTerm {
                    k: t.k,
                    pi_factor: pi.pow(t.p).recip().expect("pi is nonzero"),
                    min,
                    coeffs,
                    trunc: t.series.trunc_index(),
                    maj: t.maj.clone(),
                    abs_coeffs: (min..end)
                        .map(|m| {
                            t.series.coeff(m).map_or(RealBall::zero(64), |c| {
                                RealBall::from_rational(&c.abs(), 64)
                            })
                        })
                        .collect(),
                }
            })
            .collect();
        PreparedRegime {
            terms,
            small: self.small,
            prec,
            wp,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct PreparedTerm {
    pub(crate) k: i32,
    pub(crate) pi_factor: RealBall,
    pub(crate) min: i64,
    /// Coefficients for indices `min..min + coeffs.len()`; beyond that all
    /// known coefficients are zero up to `trunc`.
    pub(crate) coeffs: Vec<RealBall>,
    pub(crate) trunc: i64,
    pub(crate) maj: Majorant,
    abs_coeffs: Vec<RealBall>,
}

/// A [`Regime`] with coefficients converted to balls at a fixed precision.
#[derive(Clone, Debug)]
pub struct PreparedRegime {
    pub(crate) terms: Vec<PreparedTerm>,
    pub small: bool,
    prec: u32,
    wp: u32,
}

/// `sum_{m >= n} |c_m| y^m <= (y / x)^n B(x)` for `y <= x < 1`.
pub(crate) fn tail_bound(maj: &Majorant, y: &RealBall, x: &RealBall, n: i64) -> Option<Mag> {
    let b = maj.eval(x)?;
    let r = y.checked_div(x)?;
    let f = r.powi(i32::try_from(n).ok()?)?;
    Some((&f * &b).abs_upper())
}

/// Upper bound for `x` as a 64-bit ball point.
fn upper_point(x: &RealBall) -> RealBall {
    RealBall::from_rational(&x.upper_rational(), 64).with_prec(64)
}

impl PreparedTerm {
    /// `sum c_m y^m` with tail bound so the absolute error stays below `2^-target`
    /// after multiplication by `scale`.
    fn sum(&self, y: &RealBall, scale_log2: f64, target: u32, wp: u32) -> Result<RealBall> {
        let y_up = upper_point(y);
        let x = y_up.sqrt();
        let xf = x.upper_f64();
        // also rejects NaN
        if xf.is_nan() || xf >= 1.0 {
            return Err(Error::PrecisionExhausted(target));
        }
        let b = self
            .maj
            .eval(&x)
            .ok_or(Error::PrecisionExhausted(target))?
            .upper_f64();
        let need = (target as f64 + b.log2().max(0.0) + scale_log2.max(0.0) + 2.0) / (-xf.log2());
        let known = self.min + self.coeffs.len() as i64;
        let mut n = (need.ceil() as i64).max(self.min);
        if self.trunc == crate::qseries::EXACT {
            n = known;
        } else if n > self.trunc {
            return Err(Error::PrecisionExhausted(target));
        }
        let used = ((n - self.min).max(0) as usize).min(self.coeffs.len());
        let mut acc = RealBall::zero(wp);
        for c in self.coeffs[..used].iter().rev() {
            acc = &(&acc * y) + c;
        }
        let lead = y
            .powi(i32::try_from(self.min).expect("index fits"))
            .ok_or(Error::PrecisionExhausted(target))?;
        let val = &acc * &lead;
        if n >= self.trunc || self.trunc == crate::qseries::EXACT {
            return Ok(val);
        }
        let tail = tail_bound(&self.maj, &y_up, &x, n).ok_or(Error::PrecisionExhausted(target))?;
        Ok(val.add_error(tail))
    }

    /// Upper bound for `sum |c_m| Y^m` over every `|y| <= Y`, valid when all
    /// coefficients sit at nonnegative indices.
    fn abs_bound(&self, y_max: &RealBall) -> Option<RealBall> {
        let negative = (-self.min).clamp(0, self.abs_coeffs.len() as i64) as usize;
        if self.abs_coeffs[..negative]
            .iter()
            .any(|c| !c.contains_zero())
        {
            return None;
        }
        let y = upper_point(y_max);
        let x = y.sqrt();
        let n = (self.min + self.abs_coeffs.len() as i64).min(self.min + 80);
        let used = (n - self.min) as usize;
        let mut acc = RealBall::zero(64);
        for c in self.abs_coeffs[..used].iter().rev() {
            acc = &(&acc * &y) + c;
        }
        let val = &acc * &y.powi(self.min as i32)?;
        let known = self.min + self.abs_coeffs.len() as i64;
        if n >= self.trunc || (self.trunc == crate::qseries::EXACT && n == known) {
            return Some(val);
        }
        let tail = tail_bound(&self.maj, &y, &x, n)?;
        Some(val.add_error(tail))
    }
}

impl PreparedRegime {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `y` as a function of `t` for this regime.
    pub fn y_of(&self, t: &RealBall) -> Result<RealBall> {
        let t = t.with_prec(self.wp);
        if !t.is_positive() {
            return Err(Error::NonpositiveT);
        }
        let v = if self.small {
            t.recip().ok_or(Error::NonpositiveT)?
        } else {
            t
        };
        Ok((-(&RealBall::pi(self.wp) * &v)).exp())
    }

    /// Value at `t > 0`, with absolute truncation error below `2^-prec`.
    pub fn eval(&self, t: &RealBall) -> Result<RealBall> {
        let y = self.y_of(t)?;
        let t = t.with_prec(self.wp);
        let mut total = RealBall::zero(self.wp);
        for term in &self.terms {
            let tk = t.powi(term.k).ok_or(Error::NonpositiveT)?;
            let scale = &tk * &term.pi_factor;
            let scale_log2 = scale.abs_upper().log2();
            let s = term.sum(&y, scale_log2, self.prec + 4, self.wp)?;
            total = &total + &(&scale * &s);
        }
        Ok(total.with_prec(self.prec))
    }

    /// Upper bound for `|F(t)|` over complex `t` with `|t| <= t_max` and
    /// `|y| <= y_max`; needs every term to have `k >= 0` and support at `m >= 0`.
    pub fn abs_bound(&self, t_max: &RealBall, y_max: &RealBall) -> Option<RealBall> {
        let t_max = upper_point(t_max);
        let mut total = RealBall::zero(64);
        for term in &self.terms {
            if term.k < 0 {
                return None;
            }
            let s = term.abs_bound(y_max)?;
            let f = &t_max.pow(term.k as u32) * &term.pi_factor.with_prec(64);
            total = &total + &(&f * &s);
        }
        Some(upper_point(&total))
    }
}
