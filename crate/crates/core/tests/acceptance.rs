//! End-to-end acceptance: one PASS/FAIL line per criterion, tolerances pinned.

mod support;

use std::time::{Duration, Instant};

use magic8::ball::RealBall;
use magic8::certify::{self, Status};
use magic8::evaluator::{profile_names, radial_fourier_oracle, Forms, MagicFn, RadialSamples};
use magic8::lattice::{make_lattice, LatticeKind};
use magic8::modforms::{SlashWord, UWPoly};
use magic8::qseries::{QSeries, EXACT};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PREC: u32 = 192;

type Verdict = Result<String, String>;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn sqrt_int(n: i64) -> RealBall {
    RealBall::from_i64(n, PREC + 16).sqrt().with_prec(PREC)
}

/// `|v - target| < tol`, judged on the enclosure.
fn within(label: &str, v: &RealBall, target: i64, tol: f64) -> Result<(), String> {
    let gap = (v - &RealBall::from_i64(target, v.prec()))
        .abs_upper()
        .to_f64();
    if gap < tol {
        Ok(())
    } else {
        Err(format!("{label} = {v} misses {target} by up to {gap:e}"))
    }
}

fn status(r: &certify::CheckResult) -> Result<(), String> {
    if r.status == Status::Pass {
        Ok(())
    } else {
        Err(format!("{} {}: {:?}", r.check_id, r.status, r.witness))
    }
}

fn criterion(n: u32, name: &str, budget: Option<Duration>, run: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let mut verdict = run();
    let took = start.elapsed();
    if let (Ok(_), Some(b)) = (&verdict, budget) {
        if took > b {
            verdict = Err(format!("took {took:.1?}, budget {b:?}"));
        }
    }
    let (tag, detail) = match &verdict {
        Ok(d) => ("PASS", d.as_str()),
        Err(d) => ("FAIL", d.as_str()),
    };
    println!(
        "criterion {n:>2}: {tag}  {name}  [{:.2}s]  {detail}",
        took.as_secs_f64()
    );
    verdict.is_ok()
}

fn golden() -> Verdict {
    let r = certify::verify_golden_expansions();
    status(&r)?;
    let w = r.witness.unwrap();
    Ok(format!(
        "{} expansions, {} coefficients exact",
        w["expansions"], w["coefficients"]
    ))
}

fn psi_identity() -> Verdict {
    let r = certify::check_psi_identity();
    status(&r)?;
    let w = r.witness.unwrap();
    Ok(format!(
        "W^3(5U^2 - 5UW + 2W^2) = -5 alpha + 2 beta = {}",
        w["lhs"].as_str().unwrap_or_default()
    ))
}

fn theta() -> Verdict {
    let e8 = make_lattice(LatticeKind::E8, 8).map_err(|e| e.to_string())?;
    let shells = e8.enumerate_shells(&q(40, 1));
    for n in 1..=20u64 {
        let count = shells
            .iter()
            .find(|s| s.squared_norm == q(2 * n as i64, 1))
            .map_or(0, |s| s.count);
        let want = 240 * support::sigma3(n);
        if count != want {
            return Err(format!("N_{n} = {count}, expected {want}"));
        }
    }
    if shells
        .iter()
        .any(|s| !s.squared_norm.is_integer() || s.squared_norm.to_integer().bit(0))
    {
        return Err("odd or fractional norm in E8".into());
    }
    Ok(format!(
        "N_1 = {}, N_n = 240 sigma_3(n) for n = 1..20",
        shells[0].count
    ))
}

fn g_values() -> Verdict {
    let b = Forms::standard().bundle(PREC).map_err(|e| e.to_string())?;
    let g = |n: i64| b.g(&sqrt_int(n)).map_err(|e| e.to_string());
    within("g(0)", &g(0)?, -240, 1e-25)?;
    within("g(1)", &g(1)?, 8, 1e-25)?;
    within("g(sqrt 2)", &g(2)?, 1, 1e-25)?;
    for n in 3..=12 {
        within(&format!("g(sqrt {n})"), &g(n)?, 0, 1e-25)?;
    }
    status(&certify::check_poisson_shells())?;
    Ok("g table within 1e-25; Z8 and E8 shell sums vanish exactly".into())
}

fn roots() -> Verdict {
    let b = Forms::standard().bundle(PREC).map_err(|e| e.to_string())?;
    let e = |w: MagicFn, r: &RealBall| b.eval(w, r).map_err(|e| e.to_string());
    let d = |w: MagicFn, r: &RealBall| b.deriv(w, r).map_err(|e| e.to_string());
    let zero = RealBall::zero(PREC);
    let tol = 1e-20;
    within("f(0)", &e(MagicFn::F, &zero)?, 1, tol)?;
    within("fhat(0)", &e(MagicFn::FHat, &zero)?, 1, tol)?;
    let r2 = sqrt_int(2);
    within("f(sqrt 2)", &e(MagicFn::F, &r2)?, 0, tol)?;
    within("fhat'(sqrt 2)", &d(MagicFn::FHat, &r2)?, 0, tol)?;
    let slope = d(MagicFn::F, &r2)?;
    if slope.contains_zero() {
        return Err(format!("f'(sqrt 2) = {slope} does not exclude 0"));
    }
    for n in 2..=10 {
        let r = sqrt_int(2 * n);
        within(&format!("f(sqrt {})", 2 * n), &e(MagicFn::F, &r)?, 0, tol)?;
        within(&format!("f'(sqrt {})", 2 * n), &d(MagicFn::F, &r)?, 0, tol)?;
    }
    Ok(format!("f'(sqrt 2) = {}", slope.to_decimal(20)))
}

fn signs() -> Verdict {
    let cert = certify::verify_signs(&q(1, 20), &q(20, 1), PREC);
    let mut lines = Vec::new();
    for target in [
        certify::SignTarget::PhiPlusPsi,
        certify::SignTarget::PhiMinusPsi,
    ] {
        let c = cert.check(target).ok_or("missing check")?;
        if c.status != Status::Pass {
            return Err(format!("{target:?}: {} {:?}", c.status, c.failing));
        }
        for b in &c.end_bounds {
            println!(
                "    {target:?} {:?} end at t = {}: lead {} (index {}, t^{}), log10 margin {:.1}",
                b.side, b.threshold, b.lead_coeff, b.lead_index, b.lead_t_power, b.log10_margin
            );
            if !b.holds {
                return Err(format!("{target:?} {:?} end bound does not hold", b.side));
            }
        }
        lines.push(format!("{target:?}: {} pieces", c.pieces.len()));
    }
    Ok(lines.join(", "))
}

fn oracle() -> Verdict {
    let prec = 96;
    let b = Forms::standard().bundle(prec).map_err(|e| e.to_string())?;
    let mut worst = 0f64;
    for (which, sign) in [(MagicFn::FMinus, -1.0), (MagicFn::FPlus, 1.0)] {
        let samples =
            RadialSamples::new(|r| b.eval(which, r), 7.0, prec).map_err(|e| e.to_string())?;
        for r in [1.0, 1.7, 2.4] {
            let rb = RealBall::from_f64(r, prec);
            let t = radial_fourier_oracle(&samples, &rb).map_err(|e| e.to_string())?;
            let f = b.eval(which, &rb).map_err(|e| e.to_string())?;
            let gap = (t.mid_f64() - sign * f.mid_f64()).abs() + t.rad_f64() + f.rad_f64();
            if gap >= 1e-8 {
                return Err(format!("{which} at {r}: transform {t}, value {f}"));
            }
            worst = worst.max(gap);
        }
    }
    Ok(format!("largest discrepancy {worst:.1e}"))
}

fn density() -> Verdict {
    let e8 = make_lattice(LatticeKind::E8, 8).map_err(|e| e.to_string())?;
    let d3 = make_lattice(LatticeKind::D, 3).map_err(|e| e.to_string())?;
    let de8 = e8.packing_density(PREC);
    let exact = RealBall::pi(PREC).pow(4).div_u64(384);
    if !de8.overlaps(&exact) || de8.rad_f64() > 1e-40 {
        return Err(format!("E8 density {de8} vs pi^4/384 = {exact}"));
    }
    for (name, v, printed) in [
        ("E8", &de8, certify::FIGURE3_E8),
        ("D3", &d3.packing_density(PREC), certify::FIGURE3_D3),
    ] {
        let digits = printed.trim_start_matches("0.");
        let p = BigRational::new(
            digits.parse::<BigInt>().unwrap(),
            BigInt::from(10).pow(digits.len() as u32),
        );
        let gap = (v - &RealBall::from_rational(&p, PREC))
            .abs_upper()
            .to_f64();
        if gap >= 0.5e-16 {
            return Err(format!("{name}: {v} vs printed {printed}"));
        }
    }
    Ok(format!("E8 {}", de8.mid_decimal(24)))
}

fn regimes() -> Verdict {
    let forms = Forms::standard();
    let one = RealBall::one(PREC);
    for name in profile_names() {
        let a = forms
            .eval_regime(name, &one, false, PREC)
            .map_err(|e| e.to_string())?;
        let b = forms
            .eval_regime(name, &one, true, PREC)
            .map_err(|e| e.to_string())?;
        if !a.overlaps(&b) {
            return Err(format!("{name}: {a} vs {b}"));
        }
    }
    let b = magic8::evaluator::normalize(PREC).map_err(|e| e.to_string())?;
    let pi = RealBall::pi(PREC);
    let cp = (&b.c_plus - &pi.div_u64(8640)).abs_upper().to_f64();
    let cm = (&b.c_minus + &pi.mul_i64(480).recip().unwrap())
        .abs_upper()
        .to_f64();
    if cp >= 1e-30 || cm >= 1e-30 {
        return Err(format!("c_plus off by {cp:e}, c_minus off by {cm:e}"));
    }
    Ok(format!(
        "{} forms agree at t = 1; c_plus, c_minus within 1e-30",
        profile_names().len()
    ))
}

fn random_series(rng: &mut ChaCha8Rng) -> QSeries {
    let lo = rng.gen_range(-3..3);
    let n = rng.gen_range(0..6);
    QSeries::from_terms(
        lo,
        EXACT,
        (0..n).map(|i| (lo + i, q(rng.gen_range(-9..10), rng.gen_range(1..4)))),
    )
}

fn properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // ring axioms and truncation soundness
    for _ in 0..200 {
        let (a, b, c) = (
            random_series(&mut rng),
            random_series(&mut rng),
            random_series(&mut rng),
        );
        let ok = a.add(&b) == b.add(&a)
            && a.mul(&b) == b.mul(&a)
            && a.mul(&b).mul(&c) == a.mul(&b.mul(&c))
            && a.mul(&b.add(&c)) == a.mul(&b).add(&a.mul(&c));
        if !ok {
            return Err(format!("ring axiom fails for {a}, {b}, {c}"));
        }
        let ta = a.min_index() + rng.gen_range(0..8);
        let tb = b.min_index() + rng.gen_range(0..8);
        if !a.truncate(ta).mul(&b.truncate(tb)).agrees_with(&a.mul(&b)) {
            return Err(format!("truncated product of {a}, {b} is unsound"));
        }
    }
    // slash relations
    status(&certify::check_slash_relations())?;
    let s2: SlashWord = "SS".parse().unwrap();
    let st3: SlashWord = "STSTST".parse().unwrap();
    for _ in 0..100 {
        let deg = rng.gen_range(1..6u32);
        let terms: Vec<(u32, u32, i64)> = (0..=deg)
            .map(|j| (deg - j, j, rng.gen_range(-9..10)))
            .collect();
        let p = UWPoly::from_int_terms(&terms);
        if p.slash(&s2) != p || p.slash(&st3) != p {
            return Err(format!("slash relation fails on {p}"));
        }
    }
    // closest vector against exhaustive search
    let mut checked = 0;
    for trial in 0..100 {
        let (kind, d) = match trial % 3 {
            0 => (LatticeKind::Z, rng.gen_range(1..=8)),
            1 => (LatticeKind::D, rng.gen_range(2..=8)),
            _ => (LatticeKind::E8, 8),
        };
        let l = make_lattice(kind, d).unwrap();
        let x: Vec<BigRational> = (0..d)
            .map(|_| q(rng.gen_range(-40..=40), rng.gen_range(1..=12)))
            .collect();
        let (v, dist) = l.closest_vector(&x).map_err(|e| e.to_string())?;
        if !l.contains(&v) || dist != support::brute_force_cvp(kind, &x) {
            return Err(format!("closest vector disagrees for {kind:?} at {x:?}"));
        }
        checked += 1;
    }
    Ok(format!(
        "ring, truncation, slash relations; {checked} closest-vector targets"
    ))
}

#[test]
fn acceptance_criteria() {
    let secs = Duration::from_secs;
    let results = [
        criterion(1, "golden q-expansions", Some(secs(10)), golden),
        criterion(2, "psi identity", None, psi_identity),
        criterion(3, "E8 theta series", Some(secs(30)), theta),
        criterion(4, "g values and shell Poisson sums", None, g_values),
        criterion(5, "magic-function roots", Some(secs(120)), roots),
        criterion(6, "sign certificate on [1/20, 20]", Some(secs(300)), signs),
        criterion(7, "eigenfunction oracle", None, oracle),
        criterion(8, "density endpoint", None, density),
        criterion(9, "regime agreement and normalization", None, regimes),
        criterion(10, "property suites", None, properties),
    ];
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
