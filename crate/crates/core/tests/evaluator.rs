use magic8::ball::RealBall;
use magic8::evaluator::{
    self, radial_fourier_oracle, Forms, GaussLegendre, MagicFn, RadialSamples, Source,
};

const PREC: u32 = 192;

fn ball(x: f64, prec: u32) -> RealBall {
    RealBall::from_f64(x, prec)
}

fn q(n: i64, d: i64, prec: u32) -> RealBall {
    RealBall::from_rational(&num_rational::BigRational::new(n.into(), d.into()), prec)
}

#[test]
fn laplace_transform_agrees_with_direct_quadrature() {
    // plain Gauss-Legendre panels over the pointwise q-expansions
    let forms = Forms::standard();
    let bundle = forms.bundle(PREC).unwrap();
    let u = RealBall::from_i64(3, PREC);
    let fast = bundle.laplace(Source::Psi, &u).unwrap();
    let profile = forms.profile("psi").unwrap();
    let (small, large) = (profile.small.prepare(PREC), profile.large.prepare(PREC));
    let gl = GaussLegendre::cached(40, PREC);
    let pi = RealBall::pi(PREC);
    let mut cuts: Vec<RealBall> = (0..=7).rev().map(|k| q(1, 1 << k, PREC)).collect();
    cuts.extend((2..=48).map(|k| RealBall::from_i64(k, PREC)));
    let mut slow = RealBall::zero(PREC);
    for w in cuts.windows(2) {
        for (t, wt) in gl.on_interval(&w[0], &w[1]) {
            let f = if t.mid_f64() < 1.0 { &small } else { &large };
            let f = f.eval(&t).unwrap();
            slow = &slow + &(&(&f * &(-(&(&pi * &t) * &u)).exp()) * &wt);
        }
    }
    // psi(it) e^(-3 pi t) ~ 2 e^(-pi t); the omitted tail beyond t = 48 is
    // about 2 e^(-48 pi) / pi < 1e-65
    let diff = (&fast - &slow).abs_upper().to_f64();
    assert!(diff < 1e-30, "{fast} vs {slow}: {diff:e}");
}

#[test]
fn eigenfunction_oracle() {
    let prec = 96;
    let bundle = Forms::standard().bundle(prec).unwrap();
    for (which, sign) in [(MagicFn::FMinus, -1.0), (MagicFn::FPlus, 1.0)] {
        let samples = RadialSamples::new(|r| bundle.eval(which, r), 7.0, prec).unwrap();
        for r in [1.0, 1.7, 2.4] {
            let rb = ball(r, prec);
            let t = radial_fourier_oracle(&samples, &rb).unwrap();
            let f = bundle.eval(which, &rb).unwrap();
            let gap = (t.mid_f64() - sign * f.mid_f64()).abs() + t.rad_f64() + f.rad_f64();
            assert!(gap < 1e-8, "{which} at {r}: transform {t}, value {f}");
        }
    }
}

#[test]
fn magic_function_is_its_own_transform_up_to_fhat() {
    let prec = 96;
    let bundle = Forms::standard().bundle(prec).unwrap();
    let samples = RadialSamples::new(|r| bundle.eval(MagicFn::F, r), 7.0, prec).unwrap();
    for r in [0.5, 1.3, 2.0] {
        let rb = ball(r, prec);
        let t = radial_fourier_oracle(&samples, &rb).unwrap();
        let fhat = bundle.eval(MagicFn::FHat, &rb).unwrap();
        assert!(
            (t.mid_f64() - fhat.mid_f64()).abs() < 1e-8,
            "{r}: {t} vs {fhat}"
        );
    }
}

#[test]
fn psi_is_positive_on_the_axis() {
    for (n, d) in [(1, 10), (1, 1), (10, 1)] {
        let v = evaluator::eval_form_it("psi", &q(n, d, PREC), PREC).unwrap();
        assert!(v.is_positive(), "psi(i {n}/{d}) = {v}");
    }
    let tiny = evaluator::eval_form_it("psi", &q(1, 20, PREC), PREC).unwrap();
    assert!(tiny.is_positive() && tiny.upper_f64() < 1e-10, "{tiny}");
}

#[test]
fn normalization_constants_match_closed_forms() {
    let b = evaluator::normalize(PREC).unwrap();
    let pi = RealBall::pi(PREC);
    let c_plus = pi.div_u64(8640);
    let c_minus = -(pi.mul_i64(480).recip().unwrap());
    assert!(
        (&b.c_plus - &c_plus).abs_upper().to_f64() < 1e-30,
        "{}",
        b.c_plus
    );
    assert!(
        (&b.c_minus - &c_minus).abs_upper().to_f64() < 1e-30,
        "{}",
        b.c_minus
    );
    assert_eq!(b.rho, num_rational::BigRational::from_integer((-18).into()));
    assert_eq!(b.rho_pi_power, 2);
}

#[test]
fn derivative_matches_finite_difference() {
    let bundle = Forms::standard().bundle(PREC).unwrap();
    let h = 1e-12;
    for which in MagicFn::ALL {
        for r in [0.7, 1.9] {
            let d = bundle.deriv(which, &ball(r, PREC)).unwrap().mid_f64();
            let up = bundle.eval(which, &ball(r + h, PREC)).unwrap().mid_f64();
            let dn = bundle.eval(which, &ball(r - h, PREC)).unwrap().mid_f64();
            let fd = (up - dn) / (2.0 * h);
            assert!(
                (d - fd).abs() < 1e-3 * d.abs().max(1e-2),
                "{which} {r}: {d} vs {fd}"
            );
        }
    }
}

#[test]
fn magic_function_decomposes_into_eigenfunctions() {
    let bundle = Forms::standard().bundle(PREC).unwrap();
    for r in [0.3, 1.1, 2.6] {
        let rb = ball(r, PREC);
        let f = bundle.eval(MagicFn::F, &rb).unwrap();
        let fhat = bundle.eval(MagicFn::FHat, &rb).unwrap();
        let fp = bundle.eval(MagicFn::FPlus, &rb).unwrap();
        let fm = bundle.eval(MagicFn::FMinus, &rb).unwrap();
        assert!((&f - &(&fp + &fm)).abs_upper().to_f64() < 1e-40);
        assert!((&fhat - &(&fp - &fm)).abs_upper().to_f64() < 1e-40);
    }
}

/// The figure's drawing coordinates appear to be (2r, 2f); these readings are
/// informational and checked loosely.
#[test]
fn figure_readings_are_close() {
    let bundle = Forms::standard().bundle(PREC).unwrap();
    let f = |r: f64| bundle.eval(MagicFn::F, &ball(r, PREC)).unwrap().mid_f64();
    assert!((f(0.15) - 0.94132365).abs() < 1e-7);
    assert!(f(1.0) > 0.0 && f(1.5) < 0.0);
    let pi = std::f64::consts::PI;
    let scaled = |r: f64| (2.0 * pi * r).exp() * r.powf(3.5) * f(r) / 300.0;
    for r in [1.5, 2.5, 3.0] {
        let s = scaled(r);
        assert!(s < 0.0 && s > -1.0, "{r}: {s}");
    }
    // r = 2 is one of the double roots
    assert!(scaled(2.0).abs() < 1e-20);
}
