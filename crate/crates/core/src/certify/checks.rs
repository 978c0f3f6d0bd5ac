//! Roots, special values, Poisson identities, the packing bound and the
//! algebraic invariants behind them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::ball::RealBall;
use crate::error::Result;
use crate::evaluator::{profile_names, Forms, MagicBundle, MagicFn};
use crate::lattice::{make_lattice, LatticeKind};
use crate::modforms::{self, divisor_sigma, Letter, SlashWord, UWPoly};

use super::{timed, CheckResult, Status};

/// Enclosures of exact values must be this tight to count as a pass.
const VALUE_TOL: f64 = 1e-20;

/// The special values of `g` are checked more tightly.
const G_TOL: f64 = 1e-25;

/// Closed-form values used as independent cross-checks of the normalization.
const NORM_TOL: f64 = 1e-30;

/// Packing densities as plotted: E8 in dimension 8 and D3 in dimension 3.
pub const FIGURE3_E8: &str = "0.2536695079010480";
pub const FIGURE3_D3: &str = "0.7404804896930610";

/// `g` at radius `sqrt(n)`: nonzero only for `n <= 2`.
const G_TABLE: [(u64, i64); 3] = [(0, -240), (1, 8), (2, 1)];

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Decides whether `v` equals `target`: pass when the enclosure contains it
/// and is within `tol`, fail when it certainly misses it.
fn judge_value(v: &RealBall, target: &BigRational, tol: f64) -> Status {
    let d = &v.with_prec(v.prec()) - &RealBall::from_rational(target, v.prec());
    if !d.contains_zero() {
        Status::Fail
    } else if d.abs_upper().to_f64() <= tol {
        Status::Pass
    } else {
        Status::Inconclusive
    }
}

fn ball_json(label: &str, v: &RealBall) -> Value {
    json!({"at": label, "mid": v.mid_decimal(24), "rad": v.rad_f64()})
}

fn sqrt_of(n: u64, prec: u32) -> RealBall {
    RealBall::from_i64(n as i64, prec + 16).sqrt()
}

fn err_result(id: &str, prec: u32, e: crate::Error) -> CheckResult {
    CheckResult::new(
        id,
        Status::Inconclusive,
        json!({"error": e.to_string()}),
        prec,
    )
}

/// Value and derivative conditions at the lattice radii.
pub fn verify_roots_with(forms: &Forms, n_max: u32, prec: u32) -> CheckResult {
    let id = "roots";
    if n_max < 2 {
        return CheckResult::new(
            id,
            Status::Inconclusive,
            json!({"error": "n_max must be at least 2"}),
            prec,
        );
    }
    let b = match forms.bundle(prec) {
        Ok(b) => b,
        Err(e) => return err_result(id, prec, e),
    };
    // (label, function, derivative?, radius^2, target)
    let mut items: Vec<(String, MagicFn, bool, u64, i64)> = vec![
        ("f(0)".into(), MagicFn::F, false, 0, 1),
        ("fhat(0)".into(), MagicFn::FHat, false, 0, 1),
        ("f(sqrt2)".into(), MagicFn::F, false, 2, 0),
    ];
    for n in 1..=n_max as u64 {
        let r2 = 2 * n;
        if n >= 2 {
            items.push((format!("f(sqrt{r2})"), MagicFn::F, false, r2, 0));
            items.push((format!("f'(sqrt{r2})"), MagicFn::F, true, r2, 0));
        }
        items.push((format!("fhat(sqrt{r2})"), MagicFn::FHat, false, r2, 0));
        items.push((format!("fhat'(sqrt{r2})"), MagicFn::FHat, true, r2, 0));
    }
    let eval = |which: MagicFn, deriv: bool, r2: u64| -> Result<RealBall> {
        let r = sqrt_of(r2, prec);
        if deriv {
            b.deriv(which, &r)
        } else {
            b.eval(which, &r)
        }
    };
    let results: Vec<(Status, Value)> = items
        .par_iter()
        .map(
            |(label, which, deriv, r2, target)| match eval(*which, *deriv, *r2) {
                Ok(v) => (
                    judge_value(&v, &int(*target), VALUE_TOL),
                    ball_json(label, &v),
                ),
                Err(e) => (
                    Status::Inconclusive,
                    json!({"at": label, "error": e.to_string()}),
                ),
            },
        )
        .collect();
    // the sign change at sqrt 2 needs an enclosure away from zero
    let (change, change_json) = match eval(MagicFn::F, true, 2) {
        Ok(v) if v.contains_zero() => (Status::Inconclusive, ball_json("f'(sqrt2)", &v)),
        Ok(v) => (Status::Pass, ball_json("f'(sqrt2)", &v)),
        Err(e) => (
            Status::Inconclusive,
            json!({"at": "f'(sqrt2)", "error": e.to_string()}),
        ),
    };
    let status = results.iter().fold(change, |s, (t, _)| s.and(*t));
    let max_rad = results
        .iter()
        .filter_map(|(_, v)| v["rad"].as_f64())
        .fold(0.0, f64::max);
    CheckResult::new(
        id,
        status,
        json!({
            "n_max": n_max,
            "max_radius": max_rad,
            "sign_change": change_json,
            "values": results.into_iter().map(|(_, v)| v).collect::<Vec<_>>(),
        }),
        prec,
    )
}

/// [`verify_roots_with`] at the default order.
pub fn verify_roots(n_max: u32, prec: u32) -> CheckResult {
    timed(|| verify_roots_with(Forms::standard(), n_max, prec))
}

/// `g(0) = -240`, `g(1) = 8`, `g(sqrt 2) = 1` and `g(sqrt n) = 0` for `3 <= n <= 12`.
pub fn check_g_values(forms: &Forms, prec: u32) -> CheckResult {
    let id = "g_values";
    let b = match forms.bundle(prec) {
        Ok(b) => b,
        Err(e) => return err_result(id, prec, e),
    };
    let results: Vec<(Status, Value)> = (0..=12u64)
        .into_par_iter()
        .map(|n| {
            let target = G_TABLE.iter().find(|(m, _)| *m == n).map_or(0, |(_, g)| *g);
            let label = format!("g(sqrt{n})");
            match b.g(&sqrt_of(n, prec)) {
                Ok(v) => (judge_value(&v, &int(target), G_TOL), ball_json(&label, &v)),
                Err(e) => (
                    Status::Inconclusive,
                    json!({"at": label, "error": e.to_string()}),
                ),
            }
        })
        .collect();
    let status = results.iter().fold(Status::Pass, |s, (t, _)| s.and(*t));
    CheckResult::new(
        id,
        status,
        json!({"values": results.into_iter().map(|(_, v)| v).collect::<Vec<_>>()}),
        prec,
    )
}

/// `sum_n N(n) g(sqrt n)` over the enumerated shells of `Z^8` and `E8`.
pub fn check_poisson_shells() -> CheckResult {
    let mut sums = Vec::new();
    let mut status = Status::Pass;
    for kind in [LatticeKind::Z, LatticeKind::E8] {
        let l = make_lattice(kind, 8).expect("dimension 8");
        let counts = l.theta_coefficients(2);
        let total: i64 = G_TABLE
            .iter()
            .map(|(n, g)| counts[*n as usize] as i64 * g)
            .sum();
        if total != 0 {
            status = Status::Fail;
        }
        sums.push(json!({
            "lattice": l.name,
            "counts": counts,
            "sum": total,
        }));
    }
    CheckResult::new("poisson_shells", status, json!({"sums": sums}), 0)
}

/// E8 shell counts against `240 sigma_3(n)` for squared norms `2n <= 40`.
pub fn check_theta_e8() -> CheckResult {
    let l = make_lattice(LatticeKind::E8, 8).expect("dimension 8");
    let counts = l.theta_coefficients(40);
    let mut bad = Vec::new();
    for (k, c) in counts.iter().enumerate().skip(1) {
        let want = if k % 2 == 1 {
            BigInt::from(0)
        } else {
            divisor_sigma(3, k as u64 / 2) * 240
        };
        if BigInt::from(*c) != want {
            bad.push(json!({"norm": k, "count": c, "expected": want.to_string()}));
        }
    }
    let status = if bad.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    };
    CheckResult::new(
        "theta_e8",
        status,
        json!({"max_norm": 40, "roots": counts[2], "mismatches": bad}),
        0,
    )
}

/// `sum_{x in E8} e^(-pi s |x|^2) = s^-4 sum_{y in E8} e^(-pi |y|^2 / s)` at `s = 2`.
pub fn check_gaussian_poisson(prec: u32) -> CheckResult {
    let s = BigRational::from_integer(2.into());
    let wp = prec + 32;
    let pi = RealBall::pi(wp);
    // theta_E8 at q = e^(-2 pi a): terms below 1e-30, then sigma_3(n) <= 1.21 n^3
    let theta = |a: &BigRational| -> (RealBall, usize) {
        let x = (-(&pi * &RealBall::from_rational(a, wp)).mul_2exp(1)).exp();
        let mut sum = RealBall::one(wp);
        let mut n = 1u64;
        loop {
            let term = x
                .pow(n as u32)
                .mul_rational(&BigRational::from_integer(divisor_sigma(3, n) * 240));
            sum = &sum + &term;
            n += 1;
            if term.abs_upper().to_f64() < 1e-30 && n > 4 {
                break;
            }
        }
        let xf = x.upper_f64();
        let nf = n as f64;
        let ratio = xf * ((nf + 1.0) / nf).powi(3);
        let tail = 291.0 * nf.powi(3) * xf.powf(nf) / (1.0 - ratio);
        (sum.add_error(crate::Mag::from_f64_up(tail)), n as usize - 1)
    };
    let (lhs, n_l) = theta(&s);
    let (rhs, n_r) = theta(&s.recip());
    let rhs = rhs.div_u64(16);
    let d = &lhs - &rhs;
    let status = if !d.contains_zero() {
        Status::Fail
    } else if d.abs_upper().to_f64() <= VALUE_TOL {
        Status::Pass
    } else {
        Status::Inconclusive
    };
    CheckResult::new(
        "gaussian_poisson",
        status,
        json!({
            "s": s.to_string(),
            "lhs": ball_json("lattice side", &lhs),
            "rhs": ball_json("dual side", &rhs),
            "shells": [n_l, n_r],
        }),
        prec,
    )
}

/// Truncated `sum_{x in E8} f(x)` over squared norms up to 20.
pub fn check_e8_sum(forms: &Forms, prec: u32) -> CheckResult {
    let id = "e8_sum";
    let b = match forms.bundle(prec) {
        Ok(b) => b,
        Err(e) => return err_result(id, prec, e),
    };
    let counts = make_lattice(LatticeKind::E8, 8)
        .expect("dimension 8")
        .theta_coefficients(20);
    let terms: Result<Vec<RealBall>> = counts
        .par_iter()
        .enumerate()
        .filter(|(_, c)| **c > 0)
        .map(|(k, c)| {
            Ok(b.eval(MagicFn::F, &sqrt_of(k as u64, prec))?
                .mul_i64(*c as i64))
        })
        .collect();
    match terms {
        Ok(t) => {
            let s = t.iter().fold(RealBall::zero(prec), |s, x| &s + x);
            CheckResult::new(
                id,
                judge_value(&s, &BigRational::one(), VALUE_TOL),
                json!({"max_norm": 20, "sum": ball_json("sum", &s)}),
                prec,
            )
        }
        Err(e) => err_result(id, prec, e),
    }
}

/// The bound `vol(B^8) (r/2)^8 f(0) / fhat(0)` at `r = sqrt 2` against the
/// E8 density, `pi^4/384` and the plotted values.
pub fn check_lp_bound(forms: &Forms, prec: u32) -> CheckResult {
    let id = "lp_bound";
    let b = match forms.bundle(prec) {
        Ok(b) => b,
        Err(e) => return err_result(id, prec, e),
    };
    let zero = RealBall::zero(prec);
    let (f0, fh0) = match (b.eval(MagicFn::F, &zero), b.eval(MagicFn::FHat, &zero)) {
        (Ok(a), Ok(c)) => (a, c),
        (Err(e), _) | (_, Err(e)) => return err_result(id, prec, e),
    };
    let pi4 = RealBall::pi(prec + 16).pow(4).div_u64(384);
    let bound = match f0.checked_div(&fh0) {
        Some(r) => &pi4 * &r,
        None => {
            return CheckResult::new(
                id,
                Status::Inconclusive,
                json!({"error": "fhat(0) encloses 0"}),
                prec,
            )
        }
    };
    let e8 = make_lattice(LatticeKind::E8, 8).expect("dimension 8");
    let d3 = make_lattice(LatticeKind::D, 3).expect("dimension 3");
    let density = e8.packing_density(prec);
    let d3_density = d3.packing_density(prec);
    let mut status = Status::Pass;
    // bound and density coincide
    let gap = &bound - &density;
    if !gap.contains_zero() {
        status = Status::Fail;
    } else if gap.abs_upper().to_f64() > VALUE_TOL {
        status = Status::Inconclusive;
    }
    if !density.overlaps(&pi4) {
        status = Status::Fail;
    }
    // sixteen printed digits: half a unit in the last place
    let half_ulp = BigRational::new(5.into(), BigInt::from(10).pow(17));
    let close = |v: &RealBall, datum: &str| -> Status {
        let q = decimal_rational(datum);
        let d = v - &RealBall::from_rational(&q, prec);
        let h = half_ulp.to_f64().expect("small");
        if d.abs_upper().to_f64() <= h {
            Status::Pass
        } else if d.abs_lower().to_f64() > h {
            Status::Fail
        } else {
            Status::Inconclusive
        }
    };
    status = status
        .and(close(&density, FIGURE3_E8))
        .and(close(&d3_density, FIGURE3_D3));
    CheckResult::new(
        id,
        status,
        json!({
            "bound": ball_json("f(0)/fhat(0) bound", &bound),
            "e8_density": ball_json("E8", &density),
            "pi4_over_384": pi4.mid_decimal(24),
            "d3_density": ball_json("D3", &d3_density),
            "plotted": {"E8": FIGURE3_E8, "D3": FIGURE3_D3},
        }),
        prec,
    )
}

/// Parses a plain decimal such as `0.25` exactly.
pub(crate) fn decimal_rational(s: &str) -> BigRational {
    let (int_part, frac) = s.split_once('.').unwrap_or((s, ""));
    let den = BigInt::from(10).pow(frac.len() as u32);
    let num: BigInt = format!("{int_part}{frac}")
        .parse()
        .expect("decimal literal");
    BigRational::new(num, den)
}

/// Sampled sign conditions: `f <= 0` on `[sqrt 2, 8]` and `fhat >= 0` on `[0, 8]`.
pub fn check_radial_sweep(forms: &Forms, prec: u32) -> CheckResult {
    let id = "radial_sweep";
    let b = match forms.bundle(prec) {
        Ok(b) => b,
        Err(e) => return err_result(id, prec, e),
    };
    let step = 1.0 / 16.0;
    let mut points: Vec<(MagicFn, RealBall)> = Vec::new();
    let root2 = sqrt_of(2, prec);
    for i in 0.. {
        let r = &root2 + &RealBall::from_f64(i as f64 * step, prec);
        if r.mid_f64() > 8.0 {
            break;
        }
        points.push((MagicFn::F, r));
    }
    for i in 0..=128 {
        points.push((MagicFn::FHat, RealBall::from_f64(i as f64 * step, prec)));
    }
    let results: Vec<(Status, Option<Value>)> = points
        .par_iter()
        .map(|(which, r)| sweep_point(&b, *which, r))
        .collect();
    let status = results.iter().fold(Status::Pass, |s, (t, _)| s.and(*t));
    let flagged: Vec<Value> = results.into_iter().filter_map(|(_, v)| v).collect();
    CheckResult::new(
        id,
        status,
        json!({"points": points.len(), "step": step, "flagged": flagged}),
        prec,
    )
}

fn sweep_point(b: &MagicBundle, which: MagicFn, r: &RealBall) -> (Status, Option<Value>) {
    let label = format!("{}({})", which, r.mid_decimal(6));
    let v = match b.eval(which, r) {
        Ok(v) => v,
        Err(e) => {
            return (
                Status::Inconclusive,
                Some(json!({"at": label, "error": e.to_string()})),
            )
        }
    };
    // f must be nonpositive, fhat nonnegative
    let v = if which == MagicFn::F { -v } else { v };
    if v.is_nonnegative() {
        (Status::Pass, None)
    } else if v.is_negative() {
        (Status::Fail, Some(ball_json(&label, &v)))
    } else if v.abs_upper().to_f64() <= VALUE_TOL {
        // a root, up to the enclosure
        (Status::Pass, None)
    } else {
        (Status::Inconclusive, Some(ball_json(&label, &v)))
    }
}

/// Both regimes of every named form agree at `t = 1`.
pub fn check_regimes(forms: &Forms, prec: u32) -> CheckResult {
    let one = RealBall::one(prec);
    let results: Vec<(Status, Value)> = profile_names()
        .par_iter()
        .map(|name| {
            let pair = forms
                .eval_regime(name, &one, false, prec)
                .and_then(|a| Ok((a, forms.eval_regime(name, &one, true, prec)?)));
            match pair {
                Ok((a, b)) => {
                    let s = if a.overlaps(&b) {
                        Status::Pass
                    } else {
                        Status::Fail
                    };
                    let d = &a - &b;
                    (
                        s,
                        json!({"form": name, "difference": d.mid_f64(), "radius": d.rad_f64()}),
                    )
                }
                Err(e) => (
                    Status::Inconclusive,
                    json!({"form": name, "error": e.to_string()}),
                ),
            }
        })
        .collect();
    let status = results.iter().fold(Status::Pass, |s, (t, _)| s.and(*t));
    CheckResult::new(
        "regimes",
        status,
        json!({"forms": results.into_iter().map(|(_, v)| v).collect::<Vec<_>>()}),
        prec,
    )
}

/// The computed normalization against `pi/8640` and `-1/(480 pi)`.
pub fn check_normalization(forms: &Forms, prec: u32) -> CheckResult {
    let id = "normalization";
    let b = match forms.bundle(prec) {
        Ok(b) => b,
        Err(e) => return err_result(id, prec, e),
    };
    let pi = RealBall::pi(prec + 16);
    let plus = pi.div_u64(8640);
    let minus = -pi.mul_i64(480).recip().expect("pi is nonzero");
    let judge = |got: &RealBall, want: &RealBall| {
        let d = got - want;
        if d.abs_lower().to_f64() > NORM_TOL {
            Status::Fail
        } else if d.abs_upper().to_f64() <= NORM_TOL {
            Status::Pass
        } else {
            Status::Inconclusive
        }
    };
    let status = judge(&b.c_plus, &plus).and(judge(&b.c_minus, &minus));
    CheckResult::new(
        id,
        status,
        json!({
            "c_plus": ball_json("c_plus", &b.c_plus),
            "c_minus": ball_json("c_minus", &b.c_minus),
            "c_plus_closed_form": "pi/8640",
            "c_minus_closed_form": "-1/(480 pi)",
            "ratio": format!("{} pi^-{}", b.rho, b.rho_pi_power),
        }),
        prec,
    )
}

/// `W^3 (5U^2 - 5UW + 2W^2) = -5 alpha + 2 beta` as polynomials.
pub fn check_psi_identity() -> CheckResult {
    let lhs = modforms::psi_numerator();
    let rhs = modforms::psi_numerator_from_basis();
    let status = if lhs == rhs {
        Status::Pass
    } else {
        Status::Fail
    };
    CheckResult::new(
        "psi_identity",
        status,
        json!({"lhs": lhs.to_string(), "rhs": rhs.to_string()}),
        0,
    )
}

/// `S^2` and `(ST)^3` act trivially in even weight; the single-root
/// numerators are `S`-fixed and the double-root numerators satisfy
/// `p = p|T + p|S`.
pub fn check_slash_relations() -> CheckResult {
    let s2 = SlashWord::new(vec![Letter::S, Letter::S]);
    let st3: SlashWord = "STSTST".parse().expect("valid word");
    let s = SlashWord::new(vec![Letter::S]);
    let t = SlashWord::new(vec![Letter::T]);
    let mut bad = Vec::new();
    for degree in 1..=5u32 {
        for j in 0..=degree {
            let m = UWPoly::monomial(degree - j, j, BigRational::one());
            for w in [&s2, &st3] {
                if m.slash(w) != m {
                    bad.push(format!("{m} | {w}"));
                }
            }
        }
    }
    let (a1, b1, g1) = modforms::single_root_basis();
    for p in [&a1, &b1, &g1] {
        if p.slash(&s) != *p {
            bad.push(format!("{p} | S"));
        }
    }
    let (a2, b2) = modforms::double_root_basis();
    for p in [&a2, &b2] {
        if p.slash(&t).add(&p.slash(&s)) != *p {
            bad.push(format!("{p} functional equation"));
        }
    }
    let status = if bad.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    };
    CheckResult::new("slash_relations", status, json!({"violations": bad}), 0)
}

/// Shell identities, the truncated E8 sum, the bound and the radial sweep.
pub fn verify_poisson_and_lp(prec: u32) -> CheckResult {
    timed(|| {
        let forms = Forms::standard();
        let parts = [
            check_poisson_shells(),
            check_gaussian_poisson(prec),
            check_e8_sum(forms, prec),
            check_lp_bound(forms, prec),
            check_radial_sweep(forms, prec),
        ];
        let status = parts.iter().fold(Status::Pass, |s, r| s.and(r.status));
        let witness: Vec<Value> = parts
            .iter()
            .map(|r| json!({"check_id": r.check_id, "status": r.status, "witness": r.witness}))
            .collect();
        CheckResult::new("poisson_and_lp", status, json!(witness), prec)
    })
}
