//! Radial Fourier transform in dimension 8 as a Bessel-kernel integral,
//! independent of the Laplace representation:
//! `F(rho) = 2 pi rho^-3 int_0^inf f(r) J_3(2 pi rho r) r^4 dr`.
//!
//! The integral is truncated at `r_max` and discretized by Gauss–Legendre
//! panels; the result carries arithmetic error only, not discretization error.

use rayon::prelude::*;

use crate::ball::{Mag, RealBall};
use crate::error::{Error, Result};

use super::quadrature::GaussLegendre;

const PANEL: f64 = 0.25;
const PANEL_NODES: usize = 24;

/// `J_3(x)` from its power series with a rigorous truncation bound.
pub fn bessel_j3(x: &RealBall) -> RealBall {
    let prec = x.prec();
    // the largest term is about e^|x|; carry enough bits to absorb the cancellation
    let ax = x.abs_upper().to_f64();
    let wp = prec + (ax * std::f64::consts::LOG2_E).ceil() as u32 + 16;
    let h = x.with_prec(wp).mul_2exp(-1);
    let h2 = h.sqr();
    let mut term = h.pow(3).div_u64(6);
    let mut s = RealBall::zero(wp);
    let mut j = 0u64;
    loop {
        s = &s + &term;
        term = -(&term * &h2).div_u64((j + 1) * (j + 4));
        j += 1;
        // once j >= |x| the ratio (x/2)^2 / ((j+1)(j+4)) is below 1/4
        if j as f64 >= ax && term.abs_upper() < Mag::pow2(-(wp as i64)) {
            break;
        }
    }
    s.add_error(term.abs_upper().mul_2exp(1)).with_prec(prec)
}

/// Quadrature nodes `r_i` with `w_i f(r_i) r_i^4` precomputed.
#[derive(Clone, Debug)]
pub struct RadialSamples {
    pub prec: u32,
    pub r_max: f64,
    pub nodes: Vec<(RealBall, RealBall)>,
}

impl RadialSamples {
    pub fn new<F>(f: F, r_max: f64, prec: u32) -> Result<RadialSamples>
    where
        F: Fn(&RealBall) -> Result<RealBall> + Sync,
    {
        let gl = GaussLegendre::cached(PANEL_NODES, prec);
        let panels = (r_max / PANEL).ceil() as usize;
        let points: Vec<(RealBall, RealBall)> = (0..panels)
            .flat_map(|i| {
                let a = RealBall::from_f64(i as f64 * PANEL, prec);
                let b = RealBall::from_f64((i + 1) as f64 * PANEL, prec);
                gl.on_interval(&a, &b)
            })
            .collect();
        let nodes = points
            .par_iter()
            .map(|(r, w)| Ok((r.clone(), &(w * &f(r)?) * &r.pow(4))))
            .collect::<Result<Vec<_>>>()?;
        Ok(RadialSamples {
            prec,
            r_max: panels as f64 * PANEL,
            nodes,
        })
    }
}

/// Eight-dimensional radial Fourier transform of the sampled function at `rho`.
pub fn radial_fourier_oracle(samples: &RadialSamples, rho: &RealBall) -> Result<RealBall> {
    let r = rho.mid_f64();
    if !(0.1..=4.0).contains(&r) {
        return Err(Error::SlowConvergence(format!(
            "radius {r} outside the oracle range [0.1, 4]"
        )));
    }
    let prec = samples.prec;
    // the kernel amplifies the width of its argument by up to e^x, so the
    // argument is formed at extra precision from the exact node midpoints
    let x_max = 2.0 * std::f64::consts::PI * rho.upper_f64() * samples.r_max;
    let wp = prec + (x_max * std::f64::consts::LOG2_E).ceil() as u32 + 16;
    let two_pi_rho = (&RealBall::pi(wp) * &rho.with_prec(wp)).mul_2exp(1);
    let rho = rho.with_prec(prec);
    let s = samples
        .nodes
        .iter()
        .fold(RealBall::zero(prec), |s, (ri, gi)| {
            let x = &two_pi_rho * &ri.mid().with_prec(wp);
            &s + &(gi * &bessel_j3(&x).with_prec(prec))
        });
    let scale = (&RealBall::pi(prec) * &rho.pow(3).recip().expect("rho > 0")).mul_2exp(1);
    Ok(&s * &scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j3_matches_reference_values() {
        // J_3(1) and J_3(10)
        let a = bessel_j3(&RealBall::from_i64(1, 128));
        assert!((a.mid_f64() - 0.019_563_353_982_668_406).abs() < 1e-16);
        let b = bessel_j3(&RealBall::from_i64(10, 128));
        assert!((b.mid_f64() - 0.058_379_379_305_186_81).abs() < 1e-15);
        assert!(b.rad_f64() < 1e-30);
    }

    #[test]
    fn gaussian_is_its_own_transform() {
        let prec = 96;
        let s = RadialSamples::new(|r| Ok((-(&RealBall::pi(prec) * &r.sqr())).exp()), 7.0, prec)
            .unwrap();
        for rho in [0.5, 1.0, 1.7] {
            let rb = RealBall::from_f64(rho, prec);
            let got = radial_fourier_oracle(&s, &rb).unwrap();
            let want = (-(&RealBall::pi(prec) * &rb.sqr())).exp();
            assert!((&got - &want).abs_upper().to_f64() < 1e-15, "{rho}: {got}");
        }
    }

    #[test]
    fn out_of_range_radius_is_refused() {
        let s = RadialSamples::new(|_| Ok(RealBall::one(64)), 1.0, 64).unwrap();
        assert!(matches!(
            radial_fourier_oracle(&s, &RealBall::from_f64(9.0, 64)),
            Err(Error::SlowConvergence(_))
        ));
    }
}
