//! Sign certificates on the imaginary axis: bisection with enclosures on a
//! bounded range, and explicit domination by the leading term beyond it.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ball::RealBall;
use crate::error::{Error, Result};
use crate::evaluator::{tail_bound, Forms, PreparedRegime, Regime, Source};
use crate::qseries::EXACT;

use super::{ratstr, CheckResult, Status};

/// Required ratio of the leading bracket to the remainder at each end.
pub const END_MARGIN: f64 = 1e10;

/// Explicit coefficients summed before the majorant tail at the ends.
const END_TERMS: i64 = 120;

/// Bisection depth below which a piece is declared inconclusive.
const MAX_DEPTH: u32 = 40;

/// Evaluations allowed per target before giving up.
const EVAL_BUDGET: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    fn of(b: &RealBall) -> Option<Sign> {
        if b.is_positive() {
            Some(Sign::Positive)
        } else if b.is_negative() {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    fn opposite(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// The functions whose sign is certified, all on `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignTarget {
    /// `c_plus phi(it) + c_minus psi(it)`, expected negative.
    PhiPlusPsi,
    /// `c_plus phi(it) - c_minus psi(it)`, expected positive.
    PhiMinusPsi,
    /// `psi(it)`, expected positive.
    Psi,
}

impl SignTarget {
    pub const ALL: [SignTarget; 3] = [
        SignTarget::PhiPlusPsi,
        SignTarget::PhiMinusPsi,
        SignTarget::Psi,
    ];

    pub fn check_id(self) -> &'static str {
        match self {
            SignTarget::PhiPlusPsi => "signs.phi_plus_psi",
            SignTarget::PhiMinusPsi => "signs.phi_minus_psi",
            SignTarget::Psi => "signs.psi",
        }
    }

    pub fn expected(self) -> Sign {
        match self {
            SignTarget::PhiPlusPsi => Sign::Negative,
            _ => Sign::Positive,
        }
    }

    fn source(self) -> Source {
        match self {
            SignTarget::PhiPlusPsi => Source::PhiPlusPsi,
            SignTarget::PhiMinusPsi => Source::PhiMinusPsi,
            SignTarget::Psi => Source::Psi,
        }
    }
}

impl fmt::Display for SignTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.check_id())
    }
}

/// One certified subinterval with the enclosure of the (normalized) values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(with = "ratstr")]
    pub lo: BigRational,
    #[serde(with = "ratstr")]
    pub hi: BigRational,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    /// `(0, t_lo]`.
    Small,
    /// `[t_hi, inf)`.
    Large,
}

/// Domination of the leading term beyond a threshold.
///
/// With `V = t` (large end) or `V = 1/t` (small end) and `y = e^(-pi V)`,
/// the function is `y^m0 V^K (bracket + rest)` where `bracket` comes from
/// the lowest index and `|rest|` is bounded at the threshold; both bounds
/// are monotone in `V`, so `bracket > rest` there fixes the sign beyond it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndBound {
    pub side: End,
    #[serde(with = "ratstr")]
    pub threshold: BigRational,
    pub lead_index: i64,
    pub lead_t_power: i32,
    pub lead_coeff: String,
    /// The leading coefficient times the normalization factor.
    pub normalized_lead: String,
    pub bracket_lower: f64,
    pub rest_upper: f64,
    pub log10_margin: f64,
    pub sign: Option<Sign>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignCheck {
    pub target: SignTarget,
    pub expected: Sign,
    pub status: Status,
    pub pieces: Vec<Piece>,
    pub end_bounds: Vec<EndBound>,
    /// Smallest distance from zero over all piece enclosures.
    pub min_gap: Option<f64>,
    /// The narrowest subinterval that could not be certified.
    pub failing: Option<(String, String)>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignCertificate {
    #[serde(with = "ratstr")]
    pub t_lo: BigRational,
    #[serde(with = "ratstr")]
    pub t_hi: BigRational,
    pub prec: u32,
    pub checks: Vec<SignCheck>,
}

/// Evaluates one target on `t`-intervals.
struct Evaluator {
    large: PreparedRegime,
    small: PreparedRegime,
    /// Positive normalization factor applied to reported enclosures.
    scale: RealBall,
    prec: u32,
    evals: AtomicUsize,
}

impl Evaluator {
    fn new(forms: &Forms, target: SignTarget, prec: u32) -> Result<Evaluator> {
        let fp = forms.source_profile(target.source())?;
        let scale = match target {
            SignTarget::Psi => RealBall::one(prec),
            _ => forms.bundle(prec)?.c_plus.clone(),
        };
        if !scale.is_positive() {
            return Err(Error::DegenerateHead);
        }
        Ok(Evaluator {
            large: fp.large.prepare(prec),
            small: fp.small.prepare(prec),
            scale,
            prec,
            evals: AtomicUsize::new(0),
        })
    }

    /// Enclosure of the normalized function over `[lo, hi]`.
    fn eval(&self, lo: &BigRational, hi: &BigRational) -> Result<RealBall> {
        self.evals.fetch_add(1, Ordering::Relaxed);
        let t = RealBall::from_interval(lo, hi, self.prec + 16);
        let two = BigRational::from_integer(2.into());
        let small = (lo + hi) / two < BigRational::one();
        let r = if small { &self.small } else { &self.large };
        Ok(&r.eval(&t)? * &self.scale)
    }
}

struct Stuck {
    lo: BigRational,
    hi: BigRational,
    status: Status,
}

/// Narrower failures win; a genuine failure beats an inconclusive piece.
fn worse(a: Box<Stuck>, b: Box<Stuck>) -> Box<Stuck> {
    match (a.status, b.status) {
        (Status::Fail, Status::Inconclusive) => a,
        (Status::Inconclusive, Status::Fail) => b,
        _ if (&b.hi - &b.lo) < (&a.hi - &a.lo) => b,
        _ => a,
    }
}

fn piece(lo: &BigRational, hi: &BigRational, v: &RealBall) -> Piece {
    Piece {
        lo: lo.clone(),
        hi: hi.clone(),
        lower: v.lower_f64(),
        upper: v.upper_f64(),
    }
}

fn tile(
    ev: &Evaluator,
    want: Sign,
    lo: &BigRational,
    hi: &BigRational,
    depth: u32,
) -> std::result::Result<Vec<Piece>, Box<Stuck>> {
    let v = ev.eval(lo, hi);
    if let Ok(v) = &v {
        match Sign::of(v) {
            Some(s) if s == want => return Ok(vec![piece(lo, hi, v)]),
            // the whole enclosure is on the wrong side
            Some(_) => {
                return Err(Box::new(Stuck {
                    lo: lo.clone(),
                    hi: hi.clone(),
                    status: Status::Fail,
                }))
            }
            None => {}
        }
    }
    // once the enclosure is at the absolute error floor, halving cannot help
    let floor = v
        .as_ref()
        .is_ok_and(|v| v.abs_upper().log2() < -(ev.prec as f64) + 8.0);
    if depth >= MAX_DEPTH || floor || ev.evals.load(Ordering::Relaxed) >= EVAL_BUDGET {
        return Err(Box::new(Stuck {
            lo: lo.clone(),
            hi: hi.clone(),
            status: Status::Inconclusive,
        }));
    }
    let mid = (lo + hi) / BigRational::from_integer(2.into());
    let (a, b) = rayon::join(
        || tile(ev, want, lo, &mid, depth + 1),
        || tile(ev, want, &mid, hi, depth + 1),
    );
    match (a, b) {
        (Ok(mut a), Ok(b)) => {
            a.extend(b);
            Ok(a)
        }
        (Err(e), Ok(_)) | (Ok(_), Err(e)) => Err(e),
        (Err(x), Err(y)) => Err(worse(x, y)),
    }
}

/// Lower and upper bounds of `c pi^-p V^j` for the exponent bookkeeping.
fn scaled(c: &BigRational, p: u32, v: &RealBall, j: i32) -> Result<RealBall> {
    let prec = v.prec();
    let pi = RealBall::pi(prec).pow(p);
    let vj = v.powi(j).ok_or(Error::NonpositiveT)?;
    (&RealBall::from_rational(c, prec) * &vj)
        .checked_div(&pi)
        .ok_or(Error::DegenerateHead)
}

/// Analytic bound for `(0, threshold]` (small) or `[threshold, inf)` (large).
pub(crate) fn end_bound(
    regime: &Regime,
    side: End,
    threshold: &BigRational,
    scale: &RealBall,
    prec: u32,
) -> Result<EndBound> {
    let wp = prec + 32;
    if !threshold.is_positive() {
        return Err(Error::NonpositiveT);
    }
    let v_rat = match side {
        End::Large => threshold.clone(),
        End::Small => threshold.recip(),
    };
    let v = RealBall::from_rational(&v_rat, wp);
    let pi = RealBall::pi(wp);
    let y = (-(&pi * &v)).exp();
    let y_up = RealBall::from_rational(&y.upper_rational(), wp);
    let x = y_up.sqrt();
    let expo = |k: i32| match side {
        End::Large => k,
        End::Small => -k,
    };
    let m0 = regime.valuation().ok_or(Error::ZeroSeries)?;
    let lead: Vec<_> = regime
        .terms
        .iter()
        .filter_map(|t| t.series.coeff(m0).filter(|c| !c.is_zero()).map(|c| (t, c)))
        .collect();
    let big_k = lead
        .iter()
        .map(|(t, _)| expo(t.k))
        .max()
        .ok_or(Error::ZeroSeries)?;

    let mut a_k = RealBall::zero(wp);
    let mut lower_part = RealBall::zero(wp);
    for (t, c) in &lead {
        let e = expo(t.k);
        if e == big_k {
            a_k = &a_k + &scaled(c, t.p, &v, 0)?;
        } else {
            lower_part = &lower_part + &scaled(&c.abs(), t.p, &v, e - big_k)?;
        }
    }
    let bracket = &a_k.abs() - &lower_part;

    let mut rest = RealBall::zero(wp);
    let v_low = v.lower_f64();
    for t in &regime.terms {
        let j = expo(t.k) - big_k;
        // V^j y^n is decreasing for V >= j / (pi n); n >= 1 below
        if j as f64 > std::f64::consts::PI * v_low {
            return Err(Error::SlowConvergence(format!(
                "exponent gap {j} is not dominated at V = {v_low}"
            )));
        }
        let s = &t.series;
        let known_end = if s.trunc_index() == EXACT {
            s.degree().map_or(m0 + 1, |d| d + 1)
        } else {
            s.trunc_index()
        };
        let top = known_end.min(m0 + END_TERMS).max(m0 + 1);
        let mut sum = RealBall::zero(wp);
        for m in ((m0 + 1)..top).rev() {
            let c = s.coeff(m).map_or_else(BigRational::zero, |c| c.abs());
            sum = &(&sum * &y) + &RealBall::from_rational(&c, wp);
        }
        sum = &sum * &y;
        if top < s.trunc_index() {
            let tail = tail_bound(&t.maj, &y_up, &x, top)
                .ok_or_else(|| Error::SlowConvergence("majorant out of range".into()))?;
            let shift = y.powi(-(m0 as i32)).ok_or(Error::DegenerateHead)?;
            sum = &sum + &(&RealBall::from_mag(tail, wp) * &shift);
        }
        rest = &rest + &(&sum * &scaled(&BigRational::one(), t.p, &v, j)?);
    }
    let b_low = bracket.lower_f64();
    let r_up = rest.upper_f64();
    let margin = if r_up > 0.0 { b_low / r_up } else { f64::MAX };
    let holds = b_low > 0.0 && margin >= END_MARGIN;
    Ok(EndBound {
        side,
        threshold: threshold.clone(),
        lead_index: m0,
        lead_t_power: match side {
            End::Large => big_k,
            End::Small => -big_k,
        },
        lead_coeff: a_k.to_decimal(20),
        normalized_lead: (&a_k * scale).to_decimal(20),
        bracket_lower: b_low,
        rest_upper: r_up,
        log10_margin: margin.log10(),
        sign: Sign::of(&a_k),
        holds,
    })
}

fn check_target(
    forms: &Forms,
    target: SignTarget,
    t_lo: &BigRational,
    t_hi: &BigRational,
    prec: u32,
) -> SignCheck {
    let want = target.expected();
    let mut out = SignCheck {
        target,
        expected: want,
        status: Status::Inconclusive,
        pieces: Vec::new(),
        end_bounds: Vec::new(),
        min_gap: None,
        failing: None,
        note: None,
    };
    let valid = t_lo.is_positive() && t_lo < &BigRational::one() && t_hi > &BigRational::one();
    if !valid {
        out.note = Some("need 0 < t_lo < 1 < t_hi".into());
        return out;
    }
    let ev = match Evaluator::new(forms, target, prec) {
        Ok(e) => e,
        Err(e) => {
            out.note = Some(e.to_string());
            return out;
        }
    };
    let profile = forms.source_profile(target.source());
    let mut status = Status::Pass;
    match &profile {
        Ok(fp) => {
            for (regime, side, th) in [(&fp.small, End::Small, t_lo), (&fp.large, End::Large, t_hi)]
            {
                match end_bound(regime, side, th, &ev.scale, prec) {
                    Ok(b) => {
                        status = status.and(end_status(&b, want));
                        out.end_bounds.push(b);
                    }
                    Err(e) => {
                        status = status.and(Status::Inconclusive);
                        out.note = Some(e.to_string());
                    }
                }
            }
        }
        Err(e) => {
            status = Status::Inconclusive;
            out.note = Some(e.to_string());
        }
    }
    let one = BigRational::one();
    let halves = [(t_lo.clone(), one.clone()), (one, t_hi.clone())];
    let tiles: Vec<_> = halves
        .iter()
        .map(|(a, b)| tile(&ev, want, a, b, 0))
        .collect();
    for t in tiles {
        match t {
            Ok(p) => out.pieces.extend(p),
            Err(s) => {
                status = status.and(s.status);
                let narrower = out
                    .failing
                    .as_ref()
                    .is_none_or(|_| s.status == Status::Fail);
                if narrower {
                    out.failing = Some((s.lo.to_string(), s.hi.to_string()));
                }
            }
        }
    }
    out.min_gap = min_gap(&out.pieces);
    out.status = status;
    out
}

fn end_status(b: &EndBound, want: Sign) -> Status {
    match b.sign {
        Some(s) if s == want && b.holds => Status::Pass,
        // a certified leading term of the wrong sign dominating its remainder
        Some(s) if s == want.opposite() && b.holds => Status::Fail,
        _ => Status::Inconclusive,
    }
}

fn min_gap(pieces: &[Piece]) -> Option<f64> {
    pieces
        .iter()
        .map(|p| p.lower.abs().min(p.upper.abs()))
        .min_by(|a, b| a.total_cmp(b))
}

/// Certifies the two sign inequalities and the positivity of `psi` on
/// `t > 0`, using the given forms.
pub fn verify_signs_with(
    forms: &Forms,
    t_lo: &BigRational,
    t_hi: &BigRational,
    prec: u32,
) -> SignCertificate {
    use rayon::prelude::*;
    let checks = SignTarget::ALL
        .par_iter()
        .map(|t| check_target(forms, *t, t_lo, t_hi, prec))
        .collect();
    SignCertificate {
        t_lo: t_lo.clone(),
        t_hi: t_hi.clone(),
        prec,
        checks,
    }
}

/// [`verify_signs_with`] at the default order.
pub fn verify_signs(t_lo: &BigRational, t_hi: &BigRational, prec: u32) -> SignCertificate {
    verify_signs_with(Forms::standard(), t_lo, t_hi, prec)
}

impl SignCertificate {
    pub fn status(&self) -> Status {
        self.checks
            .iter()
            .fold(Status::Pass, |s, c| s.and(c.status))
    }

    pub fn check(&self, target: SignTarget) -> Option<&SignCheck> {
        self.checks.iter().find(|c| c.target == target)
    }

    pub fn check_results(&self) -> Vec<CheckResult> {
        self.checks
            .iter()
            .map(|c| {
                let witness = json!({
                    "expected": c.expected,
                    "t_lo": self.t_lo.to_string(),
                    "t_hi": self.t_hi.to_string(),
                    "pieces": c.pieces.len(),
                    "min_gap": c.min_gap,
                    "end_bounds": c.end_bounds,
                    "failing": c.failing,
                    "note": c.note,
                });
                CheckResult::new(c.target.check_id(), c.status, witness, self.prec)
            })
            .collect()
    }

    /// Re-verifies the recorded pieces and end bounds without bisection.
    pub fn replay(&self, forms: &Forms) -> Status {
        let mut status = Status::Pass;
        for c in &self.checks {
            status = status.and(replay_check(forms, c, &self.t_lo, &self.t_hi, self.prec));
        }
        status
    }
}

fn replay_check(
    forms: &Forms,
    c: &SignCheck,
    t_lo: &BigRational,
    t_hi: &BigRational,
    prec: u32,
) -> Status {
    if c.status != Status::Pass {
        return c.status;
    }
    // the pieces must tile [t_lo, t_hi] exactly
    let tiles = c.pieces.first().map(|p| &p.lo) == Some(t_lo)
        && c.pieces.last().map(|p| &p.hi) == Some(t_hi)
        && c.pieces.windows(2).all(|w| w[0].hi == w[1].lo)
        && c.pieces.iter().all(|p| p.lo < p.hi);
    if !tiles {
        return Status::Fail;
    }
    let ev = match Evaluator::new(forms, c.target, prec) {
        Ok(e) => e,
        Err(_) => return Status::Inconclusive,
    };
    use rayon::prelude::*;
    let pieces_ok = c.pieces.par_iter().all(|p| {
        ev.eval(&p.lo, &p.hi)
            .map(|v| Sign::of(&v) == Some(c.expected))
            .unwrap_or(false)
    });
    let fp = match forms.source_profile(c.target.source()) {
        Ok(fp) => fp,
        Err(_) => return Status::Inconclusive,
    };
    let ends_ok = [(&fp.small, End::Small, t_lo), (&fp.large, End::Large, t_hi)]
        .into_iter()
        .all(|(r, side, th)| {
            end_bound(r, side, th, &ev.scale, prec)
                .is_ok_and(|b| end_status(&b, c.expected) == Status::Pass)
        });
    if pieces_ok && ends_ok {
        Status::Pass
    } else {
        Status::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn one() -> RealBall {
        RealBall::one(96)
    }

    #[test]
    fn end_bounds_have_the_expected_leads() {
        let forms = Forms::new(120);
        let plus = forms.source_profile(Source::PhiPlusPsi).unwrap();
        let large = end_bound(&plus.large, End::Large, &q(20, 1), &one(), 96).unwrap();
        assert_eq!(large.lead_index, -2);
        assert_eq!(large.sign, Some(Sign::Negative));
        assert!(large.holds, "{large:?}");
        let small = end_bound(&plus.small, End::Small, &q(1, 20), &one(), 96).unwrap();
        assert_eq!(small.lead_t_power, 2);
        assert_eq!(small.sign, Some(Sign::Negative));
        assert!(small.holds, "{small:?}");

        let minus = forms.source_profile(Source::PhiMinusPsi).unwrap();
        let large = end_bound(&minus.large, End::Large, &q(20, 1), &one(), 96).unwrap();
        assert_eq!((large.lead_index, large.lead_t_power), (0, 1));
        assert_eq!(large.sign, Some(Sign::Positive));
        assert!(large.holds);
    }

    #[test]
    fn end_bound_is_not_claimed_too_close_to_one() {
        // at t = 1 the next index is only e^-pi below the lead
        let forms = Forms::new(120);
        let plus = forms.source_profile(Source::PhiPlusPsi).unwrap();
        let b = end_bound(&plus.large, End::Large, &q(1, 1), &one(), 96).unwrap();
        assert!(!b.holds);
    }

    #[test]
    fn short_range_certificate_replays() {
        let forms = Forms::new(120);
        let cert = verify_signs_with(&forms, &q(1, 4), &q(4, 1), 96);
        // ends this close to 1 are not dominated; the pieces still certify
        for c in &cert.checks {
            assert!(c.failing.is_none(), "{:?}", c.failing);
            assert!(c.min_gap.unwrap() > 0.0);
        }
        let json = serde_json::to_string(&cert).unwrap();
        let back: SignCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn bad_range_is_inconclusive() {
        let forms = Forms::new(60);
        let cert = verify_signs_with(&forms, &q(2, 1), &q(4, 1), 64);
        assert!(cert.checks.iter().all(|c| c.status == Status::Inconclusive));
    }
}
