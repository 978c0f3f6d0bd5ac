//! Verification suite: every check produces a [`CheckResult`] whose status
//! is decided from enclosures or exact arithmetic.

mod checks;
mod golden;
mod signs;

use std::sync::Mutex;
use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::evaluator::Forms;

pub use checks::{
    check_e8_sum, check_g_values, check_gaussian_poisson, check_lp_bound, check_normalization,
    check_poisson_shells, check_psi_identity, check_radial_sweep, check_regimes,
    check_slash_relations, check_theta_e8, verify_poisson_and_lp, verify_roots, verify_roots_with,
    FIGURE3_D3, FIGURE3_E8,
};
pub use golden::{check_golden, golden_table, verify_golden_expansions, GoldenExpansion};
pub use signs::{
    verify_signs, verify_signs_with, End, EndBound, Piece, Sign, SignCertificate, SignCheck,
    SignTarget, END_MARGIN,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    /// Combined status: any failure fails, otherwise any doubt is inconclusive.
    pub fn and(self, o: Status) -> Status {
        match (self, o) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Pass,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub status: Status,
    pub witness: Option<serde_json::Value>,
    pub prec_used: u32,
    /// Wall-clock seconds.
    pub elapsed: f64,
}

impl CheckResult {
    pub fn new(check_id: &str, status: Status, witness: serde_json::Value, prec_used: u32) -> Self {
        CheckResult {
            check_id: check_id.to_string(),
            status,
            witness: Some(witness),
            prec_used,
            elapsed: 0.0,
        }
    }
}

/// Runs `f` and stamps the elapsed time on its result.
pub(crate) fn timed(f: impl FnOnce() -> CheckResult) -> CheckResult {
    let start = Instant::now();
    let mut r = f();
    r.elapsed = start.elapsed().as_secs_f64();
    r
}

/// Groups of checks selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Golden,
    Signs,
    Roots,
    Poisson,
    All,
}

impl std::str::FromStr for Suite {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Suite> {
        Ok(match s {
            "golden" => Suite::Golden,
            "signs" => Suite::Signs,
            "roots" => Suite::Roots,
            "poisson" => Suite::Poisson,
            "all" => Suite::All,
            _ => return Err(crate::Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub prec: u32,
    pub t_lo: BigRational,
    pub t_hi: BigRational,
    pub n_max: u32,
}

impl VerifyOptions {
    pub fn new(prec: u32) -> VerifyOptions {
        VerifyOptions {
            prec,
            t_lo: BigRational::new(1.into(), 20.into()),
            t_hi: BigRational::from_integer(20.into()),
            n_max: 10,
        }
    }
}

type Job<'a> = Box<dyn Fn() -> Vec<CheckResult> + Send + Sync + 'a>;

/// Runs a suite in parallel; results are ordered by `check_id`.
pub fn run_suite(forms: &Forms, suite: Suite, opts: &VerifyOptions) -> Vec<CheckResult> {
    run_suite_with_certificate(forms, suite, opts).0
}

/// [`run_suite`], also returning the sign certificate when the suite built one.
pub fn run_suite_with_certificate(
    forms: &Forms,
    suite: Suite,
    opts: &VerifyOptions,
) -> (Vec<CheckResult>, Option<SignCertificate>) {
    let prec = opts.prec;
    let cert_slot: Mutex<Option<SignCertificate>> = Mutex::new(None);
    let slot = &cert_slot;
    let mut jobs: Vec<Job> = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Golden {
        jobs.push(Box::new(move || {
            vec![timed(|| check_golden(forms.bank(), &golden_table()))]
        }));
        jobs.push(Box::new(|| vec![timed(check_psi_identity)]));
    }
    if all || suite == Suite::Signs {
        jobs.push(Box::new(move || {
            let start = Instant::now();
            let cert = verify_signs_with(forms, &opts.t_lo, &opts.t_hi, prec);
            let mut out = cert.check_results();
            let each = start.elapsed().as_secs_f64() / out.len().max(1) as f64;
            for r in &mut out {
                r.elapsed = each;
            }
            *slot.lock().expect("certificate slot") = Some(cert);
            out
        }));
    }
    if all || suite == Suite::Roots {
        jobs.push(Box::new(move || {
            vec![timed(|| verify_roots_with(forms, opts.n_max, prec))]
        }));
        jobs.push(Box::new(move || {
            vec![timed(|| check_g_values(forms, prec))]
        }));
    }
    if all || suite == Suite::Poisson {
        jobs.push(Box::new(|| vec![timed(check_poisson_shells)]));
        jobs.push(Box::new(|| vec![timed(check_theta_e8)]));
        jobs.push(Box::new(move || {
            vec![timed(|| check_gaussian_poisson(prec))]
        }));
        jobs.push(Box::new(move || vec![timed(|| check_e8_sum(forms, prec))]));
        jobs.push(Box::new(move || {
            vec![timed(|| check_lp_bound(forms, prec))]
        }));
        jobs.push(Box::new(move || {
            vec![timed(|| check_radial_sweep(forms, prec))]
        }));
    }
    if all {
        jobs.push(Box::new(move || vec![timed(|| check_regimes(forms, prec))]));
        jobs.push(Box::new(move || {
            vec![timed(|| check_normalization(forms, prec))]
        }));
        jobs.push(Box::new(|| vec![timed(check_slash_relations)]));
    }
    let mut out: Vec<CheckResult> = jobs.par_iter().flat_map(|j| j()).collect();
    drop(jobs);
    out.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    (out, cert_slot.into_inner().expect("certificate slot"))
}

/// Every check at the default order and thresholds.
pub fn full_report(prec: u32) -> Vec<CheckResult> {
    run_suite(Forms::standard(), Suite::All, &VerifyOptions::new(prec))
}

/// Overall status of a report.
pub fn overall(results: &[CheckResult]) -> Status {
    results.iter().fold(Status::Pass, |s, r| s.and(r.status))
}

/// Serde helper storing rationals as `"p/q"` strings.
pub(crate) mod ratstr {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_combination() {
        assert_eq!(Status::Pass.and(Status::Pass), Status::Pass);
        assert_eq!(Status::Pass.and(Status::Inconclusive), Status::Inconclusive);
        assert_eq!(Status::Inconclusive.and(Status::Fail), Status::Fail);
    }

    #[test]
    fn check_result_serializes_with_upper_case_status() {
        let r = CheckResult::new("x", Status::Inconclusive, serde_json::json!({"a": 1}), 64);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["status"], "INCONCLUSIVE");
        assert_eq!(v["prec_used"], 64);
        let back: CheckResult = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
