//! Laplace transforms `L(u) = int_0^inf F(t) e^(-pi t u) dt` of profiles on the
//! imaginary axis, continued analytically past the poles of the growing terms.
//!
//! Writing the large-`t` expansion as head terms (`n <= 0`, which do not
//! decay) plus a decaying tail, the transform splits at `t = 1` as
//!
//! ```text
//! L(u) = sum_head c (k!/(pi(n+u))^(k+1) - E_k(pi(n+u)))
//!      + int_0^1 F(t) e^(-pi t u) dt
//!      + sum_tail c Gamma_k(pi(m+u))
//! ```
//!
//! with `E_k(b) = int_0^1 t^k e^(-bt) dt` (entire in `b`) and
//! `Gamma_k(a) = int_1^inf t^k e^(-at) dt`. Only the first sum has poles, and
//! callers multiplying by a sine factor cancel them in closed form.

use num_rational::BigRational;
use num_traits::Zero;

use crate::ball::{Mag, RealBall, GUARD_BITS};
use crate::error::{Error, Result};
use crate::qseries::QSeries;

use super::quadrature::{rho_for_disc, GaussLegendre};
use super::series_eval::Regime;

/// Which combination of forms a profile represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    Psi,
    Phi,
    PhiPlusPsi,
    PhiMinusPsi,
    PsiSingleShifted,
}

/// `coeff * pi^-p * t^k * e^(-pi n t)` with `n <= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadTerm {
    pub k: u32,
    pub p: u32,
    pub coeff: BigRational,
    pub n: i64,
}

impl HeadTerm {
    /// `coeff * pi^-p` as a ball.
    pub fn value(&self, prec: u32) -> RealBall {
        let pi = RealBall::pi(prec).pow(self.p);
        RealBall::from_rational(&self.coeff, prec)
            .checked_div(&pi)
            .expect("pi is nonzero")
    }
}

#[derive(Clone, Debug)]
pub struct LaplaceProfile {
    pub source: Source,
    pub head: Vec<HeadTerm>,
    /// Large-`t` terms restricted to indices `m >= 1`.
    pub tail: Regime,
    /// The whole function in the small-`t` regime.
    pub small: Regime,
}

/// Multiplier applied to the transform before poles are cancelled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prefactor {
    One,
    /// `4 sin^2(pi u / 2)`, double zeros at even `u`.
    SinSqHalf,
    /// `sin(pi u)`, simple zeros at every integer.
    Sin,
}

/// Value and first derivative.
#[derive(Clone, Debug)]
pub struct Jet {
    pub v: RealBall,
    pub d: RealBall,
}

impl Jet {
    fn scale(&self, c: &RealBall) -> Jet {
        Jet {
            v: &self.v * c,
            d: &self.d * c,
        }
    }
}

/// Panel ends for the quadrature on `(0, 1]`, as `(num, 64)`.
const BREAKS_64THS: [i64; 12] = [1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64];
const GL_NODES: usize = 40;
/// Ratio of the analyticity disc radius to the panel centre.
const DISC_RATIO: f64 = 0.6;

impl LaplaceProfile {
    pub fn new(source: Source, large: &Regime, small: &Regime) -> LaplaceProfile {
        assert!(!large.small && small.small);
        let mut head = Vec::new();
        let mut tail = Regime::new(false);
        for t in &large.terms {
            let k = u32::try_from(t.k).expect("large-t powers are nonnegative");
            for (m, c) in t.series.iter().filter(|(m, _)| *m <= 0) {
                head.push(HeadTerm {
                    k,
                    p: t.p,
                    coeff: c.clone(),
                    n: m,
                });
            }
            let rest = QSeries::from_terms(
                1.max(t.series.min_index()),
                t.series.trunc_index(),
                t.series
                    .iter()
                    .filter(|(m, _)| *m >= 1)
                    .map(|(m, c)| (m, c.clone())),
            );
            tail = tail.with_term(t.k, t.p, rest, t.maj.clone());
        }
        head.sort_by_key(|a| (a.n, a.k, a.p));
        LaplaceProfile {
            source,
            head,
            tail,
            small: small.clone(),
        }
    }

    /// Head terms with the given `(k, n)`, one per pi power.
    pub fn head_terms(&self, k: u32, n: i64) -> Vec<&HeadTerm> {
        self.head.iter().filter(|h| h.k == k && h.n == n).collect()
    }

    pub fn prepare(&self, prec: u32) -> Result<PreparedLaplace> {
        PreparedLaplace::new(self, prec)
    }
}

#[derive(Clone, Debug)]
struct TailTerm {
    k: u32,
    /// `c_m pi^-p e^(-pi m)` for `m = 1..n`.
    d: Vec<RealBall>,
}

/// A profile with everything independent of `u` precomputed.
#[derive(Clone, Debug)]
pub struct PreparedLaplace {
    prec: u32,
    wp: u32,
    head: Vec<(HeadTerm, RealBall)>,
    tail: Vec<TailTerm>,
    tail_err: Mag,
    tail_err_d: Mag,
    /// `(t_i, w_i F(t_i))` over `(1/64, 1]`.
    nodes: Vec<(RealBall, RealBall)>,
    quad_err: Mag,
    quad_err_d: Mag,
}

/// `sum_{j=0}^{k} k!/(k-j)!`.
fn gamma_const(k: u32) -> u64 {
    let mut s = 0u64;
    let mut f = 1u64;
    for j in 0..=k as u64 {
        s += f;
        f *= k as u64 - j;
    }
    s
}

/// `E_k(b) = int_0^1 t^k e^(-bt) dt`.
pub fn e_k(k: u32, b: &RealBall) -> RealBall {
    let prec = b.prec();
    if b.abs_lower() <= Mag::from_u64(8) {
        // sum_j (-b)^j / (j! (k + j + 1))
        let w = prec + 16;
        let b = b.with_prec(w);
        let mut term = RealBall::one(w);
        let mut s = RealBall::zero(w);
        let mut j = 0u64;
        loop {
            s = &s + &term.div_u64(k as u64 + j + 1);
            j += 1;
            term = -(&term * &b).div_u64(j);
            if j > 20 && term.abs_upper() < Mag::pow2(-(w as i64) - 4) {
                break;
            }
        }
        // remaining terms shrink by at least half each step since j > 2|b|
        return s.add_error(term.abs_upper().mul_2exp(1)).with_prec(prec);
    }
    let fk = RealBall::factorial(k, prec);
    let inv = b.recip().expect("|b| > 8");
    let main = &fk * &inv.pow(k + 1);
    &main - &(&gamma_poly(k, &inv) * &(-b).exp())
}

/// `sum_{j=0}^{k} k!/(k-j)! a^-(j+1)` given `inv = 1/a`.
fn gamma_poly(k: u32, inv: &RealBall) -> RealBall {
    let prec = inv.prec();
    let mut s = RealBall::zero(prec);
    let mut f = 1i64;
    let mut p = inv.clone();
    for j in 0..=k as i64 {
        s = &s + &p.mul_i64(f);
        f *= k as i64 - j;
        p = &p * inv;
    }
    s
}

/// `Gamma_k(a) = int_1^inf t^k e^(-at) dt` for `a > 0`.
pub fn gamma_k(k: u32, a: &RealBall) -> RealBall {
    let inv = a.recip().expect("a > 0");
    &gamma_poly(k, &inv) * &(-a).exp()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl PreparedLaplace {
    fn new(p: &LaplaceProfile, prec: u32) -> Result<PreparedLaplace> {
        let wp = prec + GUARD_BITS;
        let target = prec as i64 + 8;
        let pi = RealBall::pi(wp);
        let head = p.head.iter().map(|h| (h.clone(), h.value(wp))).collect();

        // [1, inf): e^(-pi (m+u)) <= e^(-pi m), tail bound uses X0 = e^(-pi/2)
        let y0 = (-pi.clone()).exp();
        let x0 = RealBall::from_rational(&(-pi.mul_2exp(-1)).exp().upper_rational(), 64);
        let mut tail = Vec::new();
        let mut tail_err = Mag::ZERO;
        let mut tail_err_d = Mag::ZERO;
        for t in &p.tail.terms {
            let k = t.k as u32;
            let b = t
                .maj
                .eval(&x0)
                .ok_or(Error::PrecisionExhausted(prec))?
                .abs_upper();
            let ck = gamma_const(k + 1) as f64;
            let need =
                (target as f64 + b.log2().max(0.0) + (ck * 4.0).log2()) / -x0.upper_f64().log2();
            let n = (need.ceil() as i64).max(1);
            if n > t.series.trunc_index() {
                return Err(Error::PrecisionExhausted(prec));
            }
            let pf = pi.pow(t.p).recip().expect("pi is nonzero");
            let mut d = Vec::with_capacity(n as usize);
            let mut ym = y0.clone();
            for m in 1..n {
                let c = t.series.coeff(m).unwrap_or_else(BigRational::zero);
                d.push(&(&RealBall::from_rational(&c, wp) * &pf) * &ym);
                ym = &ym * &y0;
            }
            let xn = x0.pow(n as u32).abs_upper().mul(b);
            let pf_up = pf.abs_upper();
            tail_err = tail_err.add(xn.mul(pf_up).mul(Mag::from_u64(gamma_const(k))));
            tail_err_d = tail_err_d.add(
                xn.mul(pf_up)
                    .mul(Mag::from_u64(gamma_const(k + 1)))
                    .mul(Mag::from_u64(4)),
            );
            tail.push(TailTerm { k, d });
        }

        // (0, 1]: Gauss-Legendre panels on the small-t regime
        match p.small.valuation() {
            Some(v) if v >= 1 => {}
            _ => {
                return Err(Error::SlowConvergence(
                    "small-t profile does not decay".into(),
                ))
            }
        }
        let small = p.small.prepare(wp);
        let gl = GaussLegendre::cached(GL_NODES, wp);
        let mut nodes = Vec::new();
        let mut quad_err = Mag::ZERO;
        let mut quad_err_d = Mag::ZERO;
        for w in BREAKS_64THS.windows(2) {
            let (a, b) = (rat(w[0], 64), rat(w[1], 64));
            let (ab, bb) = (
                RealBall::from_rational(&a, wp),
                RealBall::from_rational(&b, wp),
            );
            for (t, wt) in gl.on_interval(&ab, &bb) {
                let f = small.eval(&t)?;
                nodes.push((t, &wt * &f));
            }
            let c = (w[0] + w[1]) as f64 / 128.0;
            let hw = (w[1] - w[0]) as f64 / 128.0;
            let r = DISC_RATIO * c;
            let t_max = RealBall::from_f64(c + r, 64);
            let y_max = (-(&RealBall::pi(64) * &t_max.recip().expect("positive"))).exp();
            let m = small
                .abs_bound(&t_max, &y_max)
                .ok_or(Error::SlowConvergence(
                    "no bound for small-t profile".into(),
                ))?
                .abs_upper();
            let e = gl.error_bound(hw, rho_for_disc(hw, r), m);
            quad_err = quad_err.add(e);
            quad_err_d = quad_err_d.add(e.mul(Mag::from_f64_up(4.0 * (c + r))));
        }
        // (0, eps]: |int| <= eps sup|F|, the sup taken at eps by monotonicity
        let eps = RealBall::from_rational(&rat(BREAKS_64THS[0], 64), 64);
        let y_eps = (-(&RealBall::pi(64) * &eps.recip().expect("positive"))).exp();
        let sup = small
            .abs_bound(&eps, &y_eps)
            .ok_or(Error::SlowConvergence(
                "no bound for small-t profile".into(),
            ))?
            .abs_upper();
        let eps_up = eps.abs_upper();
        quad_err = quad_err.add(sup.mul(eps_up));
        quad_err_d = quad_err_d.add(sup.mul(eps_up).mul(eps_up).mul(Mag::from_u64(4)));

        Ok(PreparedLaplace {
            prec,
            wp,
            head,
            tail,
            tail_err,
            tail_err_d,
            nodes,
            quad_err,
            quad_err_d,
        })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Analytic error bounds: `(quadrature, quadrature derivative, tail, tail derivative)`.
    pub fn error_budget(&self) -> [Mag; 4] {
        [
            self.quad_err,
            self.quad_err_d,
            self.tail_err,
            self.tail_err_d,
        ]
    }

    pub fn head(&self) -> impl Iterator<Item = &HeadTerm> {
        self.head.iter().map(|(h, _)| h)
    }

    /// The pole-free part: `-sum_head c E_k + int_0^1 + tail`, with derivative.
    fn rest(&self, u: &RealBall) -> Jet {
        let wp = self.wp;
        let pi = RealBall::pi(wp);
        let mut v = RealBall::zero(wp);
        let mut d = RealBall::zero(wp);
        for (h, c) in &self.head {
            let b = &pi * &(u + &RealBall::from_i64(h.n, wp));
            v = &v - &(c * &e_k(h.k, &b));
            d = &d + &(&(c * &pi) * &e_k(h.k + 1, &b));
        }

        // slightly negative u only arises from rounding; widen the error bounds
        let neg = (-u.lower_f64()).max(0.0);
        let widen = Mag::from_f64_up((1.6 * std::f64::consts::PI * neg).exp() * (1.0 + 1e-9));

        let mut q = RealBall::zero(wp);
        let mut qd = RealBall::zero(wp);
        for (t, g) in &self.nodes {
            let e = &(-(&(&pi * t) * u)).exp() * g;
            qd = &qd - &(&(&e * t) * &pi);
            q = &q + &e;
        }
        v = &v + &q.add_error(self.quad_err.mul(widen));
        d = &d + &qd.add_error(self.quad_err_d.mul(widen));

        let n_max = self.tail.iter().map(|t| t.d.len()).max().unwrap_or(0);
        let mut tv = RealBall::zero(wp);
        let mut td = RealBall::zero(wp);
        for i in 0..n_max {
            let m = i as i64 + 1;
            let inv = (&pi * &(u + &RealBall::from_i64(m, wp)))
                .recip()
                .expect("m + u > 0");
            for t in &self.tail {
                if let Some(dm) = t.d.get(i) {
                    tv = &tv + &(dm * &gamma_poly(t.k, &inv));
                    td = &td - &(dm * &gamma_poly(t.k + 1, &inv));
                }
            }
        }
        let eu = (-(&pi * u)).exp();
        v = &v + &(&tv * &eu).add_error(self.tail_err.mul(widen));
        d = &d + &(&(&td * &eu) * &pi).add_error(self.tail_err_d.mul(widen));
        Jet { v, d }
    }

    /// `pre(u) * L(u)` and its `u`-derivative, cancelling head poles against
    /// zeros of the prefactor where possible.
    pub fn transform(&self, pre: Prefactor, u: &RealBall) -> Result<Jet> {
        let wp = self.wp;
        let u = u.with_prec(wp);
        let pi = RealBall::pi(wp);
        let pu = &pi * &u;
        let (pv, pd) = match pre {
            Prefactor::One => (RealBall::one(wp), RealBall::zero(wp)),
            Prefactor::SinSqHalf => {
                let (s, c) = pu.sin_cos();
                (
                    (&RealBall::one(wp) - &c).mul_2exp(1),
                    (&s * &pi).mul_2exp(1),
                )
            }
            Prefactor::Sin => {
                let (s, c) = pu.sin_cos();
                (s, &c * &pi)
            }
        };
        let r = self.rest(&u);
        let mut v = &pv * &r.v;
        let mut d = &(&pd * &r.v) + &(&pv * &r.d);
        for (h, c) in &self.head {
            let j = head_jet(pre, h, &u, &pv, &pd)?.scale(c);
            v = &v + &j.v;
            d = &d + &j.d;
        }
        Ok(Jet {
            v: v.with_prec(self.prec),
            d: d.with_prec(self.prec),
        })
    }

    /// The continued transform `L(u)` itself.
    pub fn eval(&self, u: &RealBall) -> Result<RealBall> {
        Ok(self.transform(Prefactor::One, u)?.v)
    }
}

/// `pre(u) k! / (pi (u + n))^(k+1)` and its derivative.
fn head_jet(
    pre: Prefactor,
    h: &HeadTerm,
    u: &RealBall,
    pv: &RealBall,
    pd: &RealBall,
) -> Result<Jet> {
    let wp = u.prec();
    let pi = RealBall::pi(wp);
    let u0 = -h.n;
    let hh = u + &RealBall::from_i64(h.n, wp);
    let near = hh.abs_upper() < Mag::pow2(-1);
    if near {
        match (pre, h.k) {
            (Prefactor::SinSqHalf, k) if u0 % 2 == 0 && k <= 1 => {
                let (s, sd) = (&pi * &hh).mul_2exp(-1).sinc_jet();
                let s2 = s.sqr();
                return Ok(if k == 0 {
                    let v = &(&pi * &hh) * &s2;
                    let d = &(&pi * &s2) + &(&(&(&pi.sqr() * &hh) * &s) * &sd);
                    Jet { v, d }
                } else {
                    Jet {
                        v: s2,
                        d: &(&pi * &s) * &sd,
                    }
                });
            }
            (Prefactor::Sin, 0) => {
                let (s, sd) = (&pi * &hh).sinc_jet();
                let sign = if u0.rem_euclid(2) == 0 { 1 } else { -1 };
                return Ok(Jet {
                    v: s.mul_i64(sign),
                    d: (&pi * &sd).mul_i64(sign),
                });
            }
            _ => {}
        }
    }
    if hh.contains_zero() {
        return Err(Error::PoleAtU(u0));
    }
    let x = &pi * &hh;
    let base = &RealBall::factorial(h.k, wp) * &x.recip().expect("nonzero").pow(h.k + 1);
    let based = (&(&base * &pi) * &x.recip().expect("nonzero")).mul_i64(-(h.k as i64 + 1));
    Ok(Jet {
        v: pv * &base,
        d: &(pd * &base) + &(pv * &based),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &RealBall, b: &RealBall, tol: f64) -> bool {
        (a - b).abs_upper().to_f64() < tol
    }

    #[test]
    fn e_k_matches_closed_form_on_both_branches() {
        let prec = 160;
        for (k, b) in [
            (0u32, 3.0),
            (1, -5.5),
            (2, 7.9),
            (0, 8.1),
            (3, 20.0),
            (1, -6.2),
        ] {
            let bb = RealBall::from_f64(b, prec);
            let got = e_k(k, &bb);
            // integrate t^k e^(-bt) over [0,1] with a 30-point rule
            let gl = GaussLegendre::cached(30, prec);
            let num = gl
                .on_interval(&RealBall::zero(prec), &RealBall::one(prec))
                .iter()
                .fold(RealBall::zero(prec), |s, (t, w)| {
                    &s + &(w * &(&t.pow(k) * &(-(t * &bb)).exp()))
                });
            assert!(close(&got, &num, 1e-30), "k={k} b={b}: {got} vs {num}");
        }
    }

    #[test]
    fn gamma_k_splits_the_full_integral() {
        // int_0^inf t^k e^(-at) = k!/a^(k+1) = E_k(a) + Gamma_k(a)
        let prec = 128;
        let a = RealBall::from_f64(2.5, prec);
        for k in 0..4 {
            let full = &RealBall::factorial(k, prec) * &a.recip().unwrap().pow(k + 1);
            let split = &e_k(k, &a) + &gamma_k(k, &a);
            assert!(close(&full, &split, 1e-30));
        }
    }
}
