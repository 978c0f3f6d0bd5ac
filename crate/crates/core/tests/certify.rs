use magic8::certify::{
    self, check_golden, golden_table, run_suite, Sign, SignTarget, Status, Suite, VerifyOptions,
};
use magic8::evaluator::Forms;
use magic8::modforms::FormBank;
use num_rational::BigRational;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn low_precision_report_has_doubt_but_no_failure() {
    let report = certify::full_report(32);
    assert!(
        report.iter().all(|r| r.status != Status::Fail),
        "{report:#?}"
    );
    assert!(report.iter().any(|r| r.status == Status::Inconclusive));
    assert_eq!(certify::overall(&report), Status::Inconclusive);
    // exact checks do not depend on the working precision
    for id in [
        "golden",
        "psi_identity",
        "poisson_shells",
        "theta_e8",
        "slash_relations",
    ] {
        let r = report.iter().find(|r| r.check_id == id).unwrap();
        assert_eq!(r.status, Status::Pass, "{id}");
    }
}

#[test]
fn report_is_sorted_and_complete() {
    let forms = Forms::standard();
    let opts = VerifyOptions::new(128);
    let report = run_suite(forms, Suite::Poisson, &opts);
    let ids: Vec<&str> = report.iter().map(|r| r.check_id.as_str()).collect();
    assert_eq!(
        ids,
        [
            "e8_sum",
            "gaussian_poisson",
            "lp_bound",
            "poisson_shells",
            "radial_sweep",
            "theta_e8"
        ]
    );
    assert!(
        report.iter().all(|r| r.status == Status::Pass),
        "{report:#?}"
    );
}

#[test]
fn sign_certificate_replays_and_detects_tampering() {
    let forms = Forms::standard();
    let cert = certify::verify_signs_with(forms, &q(1, 10), &q(10, 1), 128);
    assert_eq!(cert.status(), Status::Pass);
    for target in [SignTarget::PhiPlusPsi, SignTarget::PhiMinusPsi] {
        let c = cert.check(target).unwrap();
        assert_eq!(c.end_bounds.len(), 2);
        assert!(c
            .end_bounds
            .iter()
            .all(|b| b.holds && b.log10_margin >= 10.0));
    }
    assert_eq!(
        cert.check(SignTarget::PhiPlusPsi).unwrap().expected,
        Sign::Negative
    );
    assert_eq!(cert.replay(forms), Status::Pass);

    // a gap in the tiling
    let mut gap = cert.clone();
    gap.checks[0].pieces.remove(3);
    assert_eq!(gap.replay(forms), Status::Fail);

    // a claim about a range the pieces do not cover
    let mut wider = cert.clone();
    wider.t_hi = q(11, 1);
    assert_eq!(wider.replay(forms), Status::Fail);

    // a false sign claim cannot be re-verified
    let mut flipped = cert.clone();
    flipped.checks[0].expected = Sign::Positive;
    assert_ne!(flipped.replay(forms), Status::Pass);
}

#[test]
fn golden_check_is_independent_of_order() {
    for order in [12, 60, 200] {
        let r = check_golden(&FormBank::new(order), &golden_table());
        assert_eq!(r.status, Status::Pass, "order {order}: {:?}", r.witness);
    }
}

#[test]
fn roots_at_high_precision_are_tight() {
    let r = certify::verify_roots_with(Forms::standard(), 10, 192);
    assert_eq!(r.status, Status::Pass);
    let w = serde_json::to_string(&r.witness).unwrap();
    assert!(w.contains("sqrt"), "{w}");
}
