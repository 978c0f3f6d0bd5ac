//! Gauss–Legendre rules with certified node enclosures and the Bernstein
//! ellipse error bound.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::ball::{Mag, RealBall};

type RuleCache = HashMap<(usize, u32), Arc<GaussLegendre>>;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub n: usize,
    pub nodes: Vec<RealBall>,
    pub weights: Vec<RealBall>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: &RealBall) -> (RealBall, RealBall) {
    let prec = x.prec();
    let mut p0 = RealBall::one(prec);
    let mut p1 = x.clone();
    for j in 1..n {
        let j = j as i64;
        let p2 = (&(x * &p1).mul_i64(2 * j + 1) - &p0.mul_i64(j)).div_u64((j + 1) as u64);
        p0 = p1;
        p1 = p2;
    }
    // (x^2 - 1) P_n' = n (x P_n - P_{n-1})
    let num = (&(x * &p1) - &p0).mul_i64(n as i64);
    let den = &x.sqr() - &RealBall::one(prec);
    let d = num.checked_div(&den).expect("node strictly inside (-1, 1)");
    (p1, d)
}

fn legendre_f64(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 1..n {
        let j = j as f64;
        let p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// One root of `P_n` enclosed by an interval Newton step.
fn certified_root(n: usize, guess: f64, prec: u32) -> RealBall {
    let mut x = guess;
    for _ in 0..6 {
        let (p, d) = legendre_f64(n, x);
        x -= p / d;
    }
    let mut xb = RealBall::from_f64(x, prec);
    let mut bits = 40u32;
    while bits < prec + 8 {
        let (p, d) = legendre(n, &xb);
        xb = (&xb - &p.checked_div(&d).expect("simple root")).mid();
        bits *= 2;
    }
    let (p, d) = legendre(n, &xb);
    xb = (&xb - &p.checked_div(&d).expect("simple root")).mid();
    let mut r = Mag::pow2(-(prec as i64) + 16);
    loop {
        let region = xb.add_error(r);
        let (_, dr) = legendre(n, &region);
        let (p, _) = legendre(n, &xb);
        let step = p
            .checked_div(&dr)
            .expect("derivative bounded away from zero");
        let image = &xb - &step;
        if region.contains(&image) && image.rad() < region.rad() {
            return image;
        }
        r = r.mul_2exp(4);
        assert!(r < Mag::pow2(-20), "node certification failed");
    }
}

impl GaussLegendre {
    pub fn new(n: usize, prec: u32) -> GaussLegendre {
        // the recurrence loses bits near the ends; certify at a higher precision
        let wp = prec + 64;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let guess = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let x = certified_root(n, guess, wp);
            let (_, d) = legendre(n, &x);
            let one = RealBall::one(wp);
            let w = RealBall::from_i64(2, wp)
                .checked_div(&(&(&one - &x.sqr()) * &d.sqr()))
                .expect("weight denominator is positive");
            nodes.push(x.with_prec(prec));
            weights.push(w.with_prec(prec));
        }
        GaussLegendre { n, nodes, weights }
    }

    /// Cached rule, computed once per `(n, prec)`.
    pub fn cached(n: usize, prec: u32) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<RuleCache>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(g) = cache.lock().unwrap().get(&(n, prec)) {
            return g.clone();
        }
        let g = Arc::new(GaussLegendre::new(n, prec));
        cache.lock().unwrap().insert((n, prec), g.clone());
        g
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: &RealBall, b: &RealBall) -> Vec<(RealBall, RealBall)> {
        let c = (a + b).mul_2exp(-1);
        let h = (b - a).mul_2exp(-1);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (&c + &(&h * x), &h * w))
            .collect()
    }

    /// Error bound for a panel of half-width `hw` when the integrand is
    /// analytic and bounded by `m` inside the Bernstein ellipse with
    /// parameter `rho`: `hw * 64/15 * M * rho^(-2n) / (rho^2 - 1)`.
    pub fn error_bound(&self, hw: f64, rho: f64, m: Mag) -> Mag {
        assert!(rho > 1.0);
        // log2 of every factor but M, rounded up generously
        let log2 = (hw * 64.0 / 15.0 / (rho * rho - 1.0)).log2() - 2.0 * self.n as f64 * rho.log2();
        let e = (log2 + 1e-6).ceil() as i64 + 1;
        m.mul(Mag::pow2(e))
    }
}

/// Ellipse parameter for the largest ellipse with foci at the panel ends that
/// fits in a disc of radius `r` about the panel centre, rounded down.
pub fn rho_for_disc(hw: f64, r: f64) -> f64 {
    let s = r / hw;
    (s + (s * s - 1.0).sqrt()) * (1.0 - 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let g = GaussLegendre::new(10, 128);
        // int_{-1}^{1} x^18 dx = 2/19
        let s = g
            .nodes
            .iter()
            .zip(&g.weights)
            .fold(RealBall::zero(128), |s, (x, w)| &s + &(w * &x.pow(18)));
        let exact =
            RealBall::from_rational(&num_rational::BigRational::new(2.into(), 19.into()), 128);
        assert!(s.overlaps(&exact));
        assert!(s.rad_f64() < 1e-30);
    }

    #[test]
    fn nodes_are_distinct_and_weights_sum_to_two() {
        let g = GaussLegendre::cached(40, 160);
        let total = g.weights.iter().fold(RealBall::zero(160), |s, w| &s + w);
        assert!(total.contains_rational(&num_rational::BigRational::from_integer(2.into())));
        for i in 1..g.n {
            assert!((&g.nodes[i] - &g.nodes[i - 1]).is_positive());
        }
    }

    #[test]
    fn exponential_integral_within_bound() {
        // int_0^1 e^x dx = e - 1
        let g = GaussLegendre::cached(12, 128);
        let (a, b) = (RealBall::zero(128), RealBall::one(128));
        let s = g
            .on_interval(&a, &b)
            .iter()
            .fold(RealBall::zero(128), |s, (t, w)| &s + &(w * &t.exp()));
        let e1 = &RealBall::one(128).exp() - &RealBall::one(128);
        let rho = rho_for_disc(0.5, 2.0);
        let bound = g.error_bound(0.5, rho, Mag::from_f64_up(2.5f64.exp()));
        assert!((&s - &e1).abs_upper() <= bound);
        assert!(bound.to_f64() < 1e-20);
    }
}
