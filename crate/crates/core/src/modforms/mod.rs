//! The modular and quasimodular forms behind the magic function.
//!
//! Every form is an exact [`QSeries`]; forms built as `P(U, W) / Delta` are
//! also available as [`UWPoly`] numerators so the slash action can be applied
//! exactly.

mod quasi;
mod uwpoly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use quasi::{QuasiProfile, QuasiTerm};
pub use uwpoly::{Letter, SlashWord, UWPoly};

use crate::error::{Error, Result};
use crate::linalg;
use crate::qseries::QSeries;

/// Extra indices carried by intermediate series so that quotients by `Delta`
/// are still known to the requested order.
const WORK_MARGIN: i64 = 4;

/// `sigma_k(n)`, the sum of the `k`-th powers of the divisors of `n`.
pub fn divisor_sigma(k: u32, n: u64) -> BigInt {
    assert!(k >= 1 && n >= 1, "divisor_sigma needs k, n >= 1");
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    s
}

/// `sigma_k(n)` for all `1 <= n < limit`, with index 0 unused.
fn sigma_table(k: u32, limit: u64) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); limit.max(1) as usize];
    for d in 1..limit {
        let dk = BigInt::from(d).pow(k);
        let mut m = d;
        while m < limit {
            t[m as usize] += &dk;
            m += d;
        }
    }
    t
}

/// Normalized Eisenstein series `E_k` for `k` in `{2, 4, 6}`, known below index `order`.
pub fn eisenstein(k: u32, order: i64) -> Result<QSeries> {
    let (c, sk) = match k {
        2 => (-24, 1),
        4 => (240, 3),
        6 => (-504, 5),
        _ => return Err(Error::UnsupportedWeight(k)),
    };
    let order = order.max(1);
    let n_max = ((order - 1) / 2) as u64;
    let sig = sigma_table(sk, n_max + 1);
    let terms = std::iter::once((0, BigRational::one())).chain((1..=n_max).map(|n| {
        (
            2 * n as i64,
            BigRational::from_integer(&sig[n as usize] * c),
        )
    }));
    Ok(QSeries::from_terms(0, order, terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaMethod {
    /// `(E4^3 - E6^2) / 1728`.
    Polynomial,
    /// `q prod (1 - q^n)^24`.
    Product,
}

/// The discriminant `Delta`, known below index `order`.
pub fn delta(order: i64, method: DeltaMethod) -> QSeries {
    let order = order.max(2);
    match method {
        DeltaMethod::Polynomial => {
            let e4 = eisenstein(4, order).expect("weight 4");
            let e6 = eisenstein(6, order).expect("weight 6");
            e4.pow(3)
                .sub(&e6.pow(2))
                .scale(&BigRational::new(1.into(), 1728.into()))
                .truncate(order)
        }
        DeltaMethod::Product => {
            // prod (1 - q^n) as a dense vector over integer powers of q, then ^24
            let n_terms = ((order - 2 + 1) / 2).max(0) as usize;
            let mut e = vec![BigInt::zero(); n_terms];
            if n_terms > 0 {
                e[0] = BigInt::one();
            }
            for n in 1..n_terms {
                for i in (n..n_terms).rev() {
                    let v = e[i - n].clone();
                    e[i] -= v;
                }
            }
            let trunc = 2 * n_terms as i64;
            let euler = QSeries::from_terms(
                0,
                trunc,
                e.into_iter()
                    .enumerate()
                    .map(|(i, c)| (2 * i as i64, BigRational::from_integer(c))),
            );
            let d = euler.pow(24).shift_index(2).truncate(order);
            // same window as the polynomial method so the two compare structurally
            QSeries::from_terms(0, d.trunc_index(), d.iter().map(|(m, c)| (m, c.clone())))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaForm {
    U,
    V,
    W,
}

/// `sum_{n in Z} q^(n^2/2)`, known below index `order`.
pub fn jacobi_theta(order: i64) -> QSeries {
    let mut terms = vec![(0, BigRational::one())];
    let mut n = 1i64;
    while n * n < order {
        terms.push((n * n, BigRational::from_integer(2.into())));
        n += 1;
    }
    QSeries::from_terms(0, order.max(0), terms)
}

/// The level-2 forms `U = theta^4`, `W = U|T`, `V = U - W`.
pub fn theta_gamma2(which: ThetaForm, order: i64) -> QSeries {
    let u = jacobi_theta(order).pow(4);
    match which {
        ThetaForm::U => u,
        ThetaForm::W => u.shift_t(),
        ThetaForm::V => u.sub(&u.shift_t()),
    }
}

/// Numerators of the single-root basis, `p / Delta` being `S`-invariant.
pub fn single_root_basis() -> (UWPoly, UWPoly, UWPoly) {
    (
        UWPoly::from_int_terms(&[(5, 0, 1), (3, 2, -6), (2, 3, 4)]),
        UWPoly::from_int_terms(&[(4, 1, 1), (3, 2, -3), (2, 3, 2)]),
        UWPoly::from_int_terms(&[(3, 2, -1), (2, 3, 4), (1, 4, -5), (0, 5, 2)]),
    )
}

/// Numerators of the double-root basis.
pub fn double_root_basis() -> (UWPoly, UWPoly) {
    (
        UWPoly::from_int_terms(&[(4, 1, 2), (3, 2, -4), (2, 3, 1), (1, 4, 1)]),
        UWPoly::from_int_terms(&[(4, 1, 5), (3, 2, -10), (2, 3, 5), (0, 5, 1)]),
    )
}

/// Numerator of the single-root form, `2 beta - alpha`.
pub fn psi_single_numerator() -> UWPoly {
    let (a, b, _) = single_root_basis();
    b.scale_int(2).sub(&a)
}

/// Numerator of the double-root form, `W^3 (5U^2 - 5UW + 2W^2)`.
pub fn psi_numerator() -> UWPoly {
    UWPoly::w()
        .pow(3)
        .mul(&UWPoly::from_int_terms(&[(2, 0, 5), (1, 1, -5), (0, 2, 2)]))
}

/// Numerator of the double-root form as `-5 alpha + 2 beta`.
pub fn psi_numerator_from_basis() -> UWPoly {
    let (a, b) = double_root_basis();
    a.scale_int(-5).add(&b.scale_int(2))
}

/// Basis of the weight-10 polynomials fixed by `S`.
pub fn s_invariant_weight10() -> Vec<UWPoly> {
    let degree = 5u32;
    let s = SlashWord::new(vec![Letter::S]);
    // column j is the image of the j-th monomial U^(5-j) W^j, minus itself
    let cols: Vec<Vec<BigRational>> = (0..=degree)
        .map(|j| {
            let m = UWPoly::monomial(degree - j, j, BigRational::one());
            m.slash(&s).sub(&m).coeff_vector()
        })
        .collect();
    let mat = linalg::transpose(&cols);
    linalg::kernel(&mat)
        .into_iter()
        .map(|v| UWPoly::from_coeff_vector(degree, &v))
        .collect()
}

/// All the exact series needed downstream, computed once for a given order.
#[derive(Clone, Debug)]
pub struct FormBank {
    order: i64,
    pub e2: QSeries,
    pub e4: QSeries,
    pub e6: QSeries,
    pub delta: QSeries,
    pub u: QSeries,
    pub w: QSeries,
    delta_inv: QSeries,
}

impl FormBank {
    /// Builds every base series so that derived forms are known below `order`.
    pub fn new(order: i64) -> FormBank {
        let work = order + WORK_MARGIN;
        let e2 = eisenstein(2, work).expect("weight 2");
        let e4 = eisenstein(4, work).expect("weight 4");
        let e6 = eisenstein(6, work).expect("weight 6");
        let delta = delta(work, DeltaMethod::Product);
        let u = theta_gamma2(ThetaForm::U, work);
        let w = u.shift_t();
        let delta_inv = delta.invert(work - 4).expect("Delta is invertible");
        FormBank {
            order,
            e2,
            e4,
            e6,
            delta,
            u,
            w,
            delta_inv,
        }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn v(&self) -> QSeries {
        self.u.sub(&self.w)
    }

    /// `x / Delta` for a holomorphic `x` (min index 0), known below the bank's order.
    pub fn over_delta(&self, x: &QSeries) -> QSeries {
        x.mul(&self.delta_inv).truncate(self.order)
    }

    /// q-expansion of `(p|word) / Delta`; `p` must have weight 10.
    pub fn cusp_expansion(&self, p: &UWPoly, word: &SlashWord) -> Result<QSeries> {
        if p.weight() != 10 {
            return Err(Error::WeightMismatch {
                expected: 10,
                got: p.weight(),
            });
        }
        Ok(self.over_delta(&p.slash(word).to_qseries(&self.u, &self.w)))
    }

    /// `E2 E4 - E6`, which starts at `720 q`.
    fn e2e4_minus_e6(&self) -> QSeries {
        self.e2.mul(&self.e4).sub(&self.e6)
    }

    /// `(E2 E4 - E6)^2 / Delta`.
    pub fn phi_a(&self) -> QSeries {
        self.over_delta(&self.e2e4_minus_e6().pow(2))
    }

    /// `E4 (E2 E4 - E6) / Delta`.
    pub fn phi_b(&self) -> QSeries {
        self.over_delta(&self.e4.mul(&self.e2e4_minus_e6()))
    }

    /// `E4^2 / Delta`.
    pub fn phi_c(&self) -> QSeries {
        self.over_delta(&self.e4.pow(2))
    }

    pub fn psi_single(&self) -> QSeries {
        self.over_delta(&psi_single_numerator().to_qseries(&self.u, &self.w))
    }

    pub fn psi(&self) -> QSeries {
        self.over_delta(&psi_numerator().to_qseries(&self.u, &self.w))
    }

    /// `chi` and the three-term profile of `phi` on the imaginary axis.
    ///
    /// With `chi(z) = A(z)` and `phi(z) = z^2 chi(-1/z)`, the weight-two law
    /// `E2(-1/z) = z^2 E2(z) - 6iz/pi` turns `phi(it)` into
    /// `-t^2 A(it) + (12 t/pi) B(it) - (36/pi^2) C(it)`.
    pub fn chi_phi(&self) -> (QSeries, QuasiProfile) {
        let a = self.phi_a();
        let b = self.phi_b();
        let c = self.phi_c();
        let phi = QuasiProfile::new()
            .with_term(2, 0, a.neg())
            .with_term(1, 1, b.scale_int(12))
            .with_term(0, 2, c.scale_int(-36));
        (a, phi)
    }

    /// Looks up a form by its command-line name.
    pub fn named(&self, name: &str) -> Result<QSeries> {
        let (a1, b1, g1) = single_root_basis();
        let (a2, b2) = double_root_basis();
        let id = SlashWord::identity();
        let s = match name {
            "E2" => self.e2.truncate(self.order),
            "E4" => self.e4.truncate(self.order),
            "E6" => self.e6.truncate(self.order),
            "Delta" => self.delta.truncate(self.order),
            "U" => self.u.truncate(self.order),
            "V" => self.v().truncate(self.order),
            "W" => self.w.truncate(self.order),
            "alpha1" => self.cusp_expansion(&a1, &id)?,
            "beta1" => self.cusp_expansion(&b1, &id)?,
            "gamma1" => self.cusp_expansion(&g1, &id)?,
            "alpha2" => self.cusp_expansion(&a2, &id)?,
            "beta2" => self.cusp_expansion(&b2, &id)?,
            "psi_single" => self.psi_single(),
            "psi" => self.psi(),
            "chi" | "phiA" => self.phi_a(),
            "phiB" => self.phi_b(),
            "phiC" => self.phi_c(),
            _ => return Err(Error::UnknownForm(name.to_string())),
        };
        Ok(s)
    }
    /// `named` after a slash word; only forms with a U/W numerator accept one.
    pub fn named_slashed(&self, name: &str, word: &SlashWord) -> Result<QSeries> {
        if word.letters.is_empty() {
            return self.named(name);
        }
        let (a1, b1, g1) = single_root_basis();
        let (a2, b2) = double_root_basis();
        let num = match name {
            "U" => UWPoly::u(),
            "W" => UWPoly::w(),
            "V" => UWPoly::u().sub(&UWPoly::w()),
            "alpha1" => a1,
            "beta1" => b1,
            "gamma1" => g1,
            "alpha2" => a2,
            "beta2" => b2,
            "psi_single" => psi_single_numerator(),
            "psi" => psi_numerator(),
            _ if FORM_NAMES.contains(&name) => {
                return Err(Error::Parse(format!(
                    "{name} is not a U/W polynomial form and takes no slash word"
                )))
            }
            _ => return Err(Error::UnknownForm(name.to_string())),
        };
        if num.weight() == 10 {
            return self.cusp_expansion(&num, word);
        }
        Ok(num
            .slash(word)
            .to_qseries(&self.u, &self.w)
            .truncate(self.order))
    }
}

/// Names accepted by [`FormBank::named`].
pub const FORM_NAMES: &[&str] = &[
    "E2",
    "E4",
    "E6",
    "Delta",
    "U",
    "V",
    "W",
    "alpha1",
    "beta1",
    "gamma1",
    "alpha2",
    "beta2",
    "psi_single",
    "psi",
    "chi",
    "phiA",
    "phiB",
    "phiC",
];

pub fn cusp_expansion(p: &UWPoly, word: &SlashWord, order: i64) -> Result<QSeries> {
    FormBank::new(order).cusp_expansion(p, word)
}

pub fn build_single_root(order: i64) -> (UWPoly, UWPoly, UWPoly, QSeries) {
    let (a, b, g) = single_root_basis();
    (a, b, g, FormBank::new(order).psi_single())
}

pub fn build_psi(order: i64) -> QSeries {
    FormBank::new(order).psi()
}

pub fn build_chi_phi(order: i64) -> (QSeries, QuasiProfile) {
    FormBank::new(order).chi_phi()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &QSeries, upto: i64) -> Vec<(i64, i64)> {
        s.iter()
            .filter(|(m, _)| *m < upto)
            .map(|(m, c)| (m, c.to_integer().try_into().unwrap()))
            .collect()
    }

    #[test]
    fn sigma_values() {
        assert_eq!(divisor_sigma(3, 1), 1.into());
        assert_eq!(divisor_sigma(3, 2), 9.into());
        assert_eq!(divisor_sigma(5, 2), 33.into());
        assert_eq!(divisor_sigma(1, 12), 28.into());
        let t = sigma_table(3, 30);
        for n in 1..30 {
            assert_eq!(t[n as usize], divisor_sigma(3, n));
        }
    }

    #[test]
    fn eisenstein_leading_terms() {
        let e4 = eisenstein(4, 8).unwrap();
        assert_eq!(ints(&e4, 8), vec![(0, 1), (2, 240), (4, 2160), (6, 6720)]);
        let e6 = eisenstein(6, 6).unwrap();
        assert_eq!(ints(&e6, 6), vec![(0, 1), (2, -504), (4, -16632)]);
        let e2 = eisenstein(2, 8).unwrap();
        assert_eq!(ints(&e2, 8), vec![(0, 1), (2, -24), (4, -72), (6, -96)]);
        assert_eq!(eisenstein(8, 4), Err(Error::UnsupportedWeight(8)));
    }

    #[test]
    fn delta_methods_agree() {
        let a = delta(60, DeltaMethod::Polynomial);
        let b = delta(60, DeltaMethod::Product);
        assert_eq!(a, b);
        assert_eq!(ints(&b, 10), vec![(2, 1), (4, -24), (6, 252), (8, -1472)]);
    }

    #[test]
    fn theta_forms() {
        let u = theta_gamma2(ThetaForm::U, 5);
        assert_eq!(ints(&u, 5), vec![(0, 1), (1, 8), (2, 24), (3, 32), (4, 24)]);
        let v = theta_gamma2(ThetaForm::V, 5);
        assert_eq!(ints(&v, 5), vec![(1, 16), (3, 64)]);
    }

    #[test]
    fn s_invariant_space_is_three_dimensional() {
        let basis = s_invariant_weight10();
        assert_eq!(basis.len(), 3);
        let (a, b, g) = single_root_basis();
        let mut rows: Vec<Vec<BigRational>> = basis.iter().map(|p| p.coeff_vector()).collect();
        let base_rank = linalg::rank(&rows);
        for p in [a, b, g] {
            rows.push(p.coeff_vector());
            assert_eq!(linalg::rank(&rows), base_rank);
            rows.pop();
        }
    }

    #[test]
    fn psi_numerators_agree() {
        assert_eq!(psi_numerator(), psi_numerator_from_basis());
    }

    #[test]
    fn cusp_expansion_rejects_wrong_weight() {
        let bank = FormBank::new(12);
        let err = bank.cusp_expansion(&UWPoly::u(), &SlashWord::identity());
        assert_eq!(
            err,
            Err(Error::WeightMismatch {
                expected: 10,
                got: 2
            })
        );
    }
}
