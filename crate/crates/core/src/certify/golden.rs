//! Printed leading coefficients of the weight -2 forms, compared exactly.

use num_rational::BigRational;
use serde_json::json;

use crate::evaluator::Forms;
use crate::modforms::{self, FormBank, SlashWord, UWPoly};

use super::{CheckResult, Status};

/// `(numerator | word) / Delta` should start with `coeffs` at index `first`;
/// indices between the series start and `first` must vanish.
#[derive(Clone, Debug)]
pub struct GoldenExpansion {
    pub id: &'static str,
    pub numerator: UWPoly,
    pub word: SlashWord,
    pub first: i64,
    pub coeffs: Vec<i64>,
}

fn entry(
    id: &'static str,
    numerator: &UWPoly,
    word: &str,
    first: i64,
    coeffs: &[i64],
) -> GoldenExpansion {
    GoldenExpansion {
        id,
        numerator: numerator.clone(),
        word: word.parse().expect("valid word"),
        first,
        coeffs: coeffs.to_vec(),
    }
}

pub fn golden_table() -> Vec<GoldenExpansion> {
    let (a1, b1, g1) = modforms::single_root_basis();
    let (a2, b2) = modforms::double_root_basis();
    let ps = modforms::psi_single_numerator();
    let psi = modforms::psi_numerator();
    vec![
        entry("alpha1", &a1, "1", -2, &[-1, -40, 752]),
        entry("alpha1|TS", &a1, "TS", 0, &[-1024, 0, 90112]),
        entry("beta1", &b1, "1", -1, &[-16, 256]),
        entry("beta1|TS", &b1, "TS", 0, &[-512, 0, -20480]),
        entry("gamma1", &g1, "1", 0, &[256, -10240]),
        entry("gamma1|TS", &g1, "TS", -2, &[-2, 0, -32]),
        entry("alpha2", &a2, "1", -1, &[-16, 768]),
        entry("beta2", &b2, "1", -2, &[1, -40, 2064]),
        entry("psi_single", &ps, "1", -2, &[1, 8, -240, -6176]),
        entry("psi_single|T", &ps, "T", -2, &[1, -8, -240, 6176]),
        entry("psi", &psi, "1", -2, &[2, 0, 288]),
    ]
}

/// Compares every printed coefficient, and the vanishing below it.
pub fn check_golden(bank: &FormBank, table: &[GoldenExpansion]) -> CheckResult {
    let mut mismatches = Vec::new();
    let mut checked = 0usize;
    for g in table {
        let s = match bank.cusp_expansion(&g.numerator, &g.word) {
            Ok(s) => s,
            Err(e) => {
                mismatches.push(json!({"id": g.id, "error": e.to_string()}));
                continue;
            }
        };
        let last = g.first + g.coeffs.len() as i64;
        for m in s.min_index().min(g.first)..last {
            let want = if m < g.first {
                0
            } else {
                g.coeffs[(m - g.first) as usize]
            };
            let want = BigRational::from_integer(want.into());
            checked += 1;
            match s.coeff(m) {
                Some(c) if c == want => {}
                got => mismatches.push(json!({
                    "id": g.id,
                    "index": m,
                    "expected": want.to_string(),
                    "got": got.map(|c| c.to_string()),
                })),
            }
        }
    }
    let status = if mismatches.is_empty() {
        Status::Pass
    } else {
        Status::Fail
    };
    CheckResult::new(
        "golden",
        status,
        json!({"expansions": table.len(), "coefficients": checked, "mismatches": mismatches}),
        0,
    )
}

/// The printed expansions at the default order.
pub fn verify_golden_expansions() -> CheckResult {
    super::timed(|| check_golden(Forms::standard().bank(), &golden_table()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_expansions_match() {
        let r = check_golden(&FormBank::new(40), &golden_table());
        assert_eq!(r.status, Status::Pass, "{:?}", r.witness);
    }

    #[test]
    fn perturbed_coefficient_is_reported_with_its_index() {
        let mut table = golden_table();
        table[0].coeffs[1] += 1;
        let r = check_golden(&FormBank::new(40), &table);
        assert_eq!(r.status, Status::Fail);
        let w = r.witness.unwrap();
        assert_eq!(w["mismatches"][0]["id"], "alpha1");
        assert_eq!(w["mismatches"][0]["index"], -1);
    }

    #[test]
    fn perturbed_numerator_fails() {
        let mut table = golden_table();
        let bump = UWPoly::from_int_terms(&[(5, 0, 1)]);
        table[0].numerator = table[0].numerator.add(&bump);
        let r = check_golden(&FormBank::new(40), &table);
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn status_is_stable_under_higher_order() {
        let low = check_golden(&FormBank::new(20), &golden_table());
        let high = check_golden(&FormBank::new(120), &golden_table());
        assert_eq!(low.status, Status::Pass);
        assert_eq!(high.status, Status::Pass);
        assert_eq!(low.witness, high.witness);
    }
}
