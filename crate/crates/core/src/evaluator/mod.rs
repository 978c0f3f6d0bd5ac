//! Certified evaluation on the imaginary axis, Laplace representations of the
//! eigenfunctions, the normalized magic function and an independent radial
//! Fourier transform.
//!
//! Every form has two representations: its own expansion in `y = e^(-pi t)`
//! (used for `t >= 1`) and a modular transform of it in `y = e^(-pi/t)` (used
//! for `t < 1`). The point `t = 1` is fixed by `S`, so both converge equally
//! well there.

mod laplace;
mod magic;
mod majorant;
mod oracle;
mod quadrature;
mod series_eval;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;

pub use laplace::{
    e_k, gamma_k, HeadTerm, Jet, LaplaceProfile, Prefactor, PreparedLaplace, Source,
};
pub use magic::{MagicBundle, MagicFn};
pub use majorant::Majorant;
pub use oracle::{bessel_j3, radial_fourier_oracle, RadialSamples};
pub use quadrature::GaussLegendre;
pub(crate) use series_eval::tail_bound;
pub use series_eval::{PreparedRegime, Regime, RegimeTerm};

use crate::ball::RealBall;
use crate::error::{Error, Result};
use crate::modforms::{self, FormBank, SlashWord, UWPoly};
use crate::qseries::{QSeries, EXACT};

/// Default truncation index for the form bank.
pub const DEFAULT_ORDER: i64 = 240;

/// Names accepted by [`Forms::profile`]: every named q-series plus `phi`.
pub fn profile_names() -> Vec<&'static str> {
    let mut v = modforms::FORM_NAMES.to_vec();
    v.push("phi");
    v
}

/// The two regimes of one function on the imaginary axis.
#[derive(Clone, Debug)]
pub struct FormProfile {
    pub large: Regime,
    pub small: Regime,
}

/// Forms, profiles and prepared magic-function data at a fixed order.
pub struct Forms {
    bank: FormBank,
    bundles: Mutex<HashMap<u32, Arc<MagicBundle>>>,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn s_word() -> SlashWord {
    "S".parse().expect("valid word")
}

impl Forms {
    pub fn new(order: i64) -> Forms {
        Forms {
            bank: FormBank::new(order),
            bundles: Mutex::new(HashMap::new()),
        }
    }

    /// Shared instance at [`DEFAULT_ORDER`].
    pub fn standard() -> &'static Forms {
        static F: OnceLock<Forms> = OnceLock::new();
        F.get_or_init(|| Forms::new(DEFAULT_ORDER))
    }

    pub fn bank(&self) -> &FormBank {
        &self.bank
    }

    /// Majorant of `E2 E4 - E6`.
    fn maj_x() -> Majorant {
        Majorant::Sum(vec![
            Majorant::Prod(vec![Majorant::E2, Majorant::E4]),
            Majorant::E6,
        ])
    }

    fn maj_a() -> Majorant {
        Majorant::Prod(vec![
            Majorant::Pow(Box::new(Self::maj_x()), 2),
            Majorant::DeltaInv,
        ])
    }

    fn maj_b() -> Majorant {
        Majorant::Prod(vec![Majorant::E4, Self::maj_x(), Majorant::DeltaInv])
    }

    fn maj_c() -> Majorant {
        Majorant::Prod(vec![
            Majorant::Pow(Box::new(Majorant::E4), 2),
            Majorant::DeltaInv,
        ])
    }

    fn theta4() -> Majorant {
        Majorant::Pow(Box::new(Majorant::Theta), 4)
    }

    /// `P / Delta` of weight -2: `F(it) = -t^2 ((P|S)/Delta)(i/t)`.
    fn over_delta_profile(&self, p: &UWPoly) -> Result<FormProfile> {
        let large = self.bank.cusp_expansion(p, &SlashWord::identity())?;
        let ps = p.slash(&s_word());
        let small = self.bank.cusp_expansion(&ps, &SlashWord::identity())?;
        Ok(FormProfile {
            large: Regime::new(false).with_term(0, 0, large, Majorant::uw_over_delta(p)),
            small: Regime::new(true).with_term(2, 0, small.neg(), Majorant::uw_over_delta(&ps)),
        })
    }

    fn simple(
        large: QSeries,
        maj: Majorant,
        k: i32,
        small: QSeries,
        small_maj: Majorant,
    ) -> FormProfile {
        FormProfile {
            large: Regime::new(false).with_term(0, 0, large, maj),
            small: Regime::new(true).with_term(k, 0, small, small_maj),
        }
    }

    /// Both regimes of a named function.
    pub fn profile(&self, name: &str) -> Result<FormProfile> {
        let b = &self.bank;
        let o = b.order();
        let (a1, b1, g1) = modforms::single_root_basis();
        let (a2, b2) = modforms::double_root_basis();
        let phi_a = || b.phi_a();
        let phi_b = || b.phi_b();
        let phi_c = || b.phi_c();
        Ok(match name {
            "E2" => {
                let e2 = b.e2.truncate(o);
                let six = QSeries::from_ints(0, EXACT, &[6]);
                FormProfile {
                    large: Regime::new(false).with_term(0, 0, e2.clone(), Majorant::E2),
                    small: Regime::new(true)
                        .with_term(-2, 0, e2.neg(), Majorant::E2)
                        .with_term(-1, 1, six.clone(), Majorant::polynomial(&six)),
                }
            }
            "E4" => Self::simple(
                b.e4.truncate(o),
                Majorant::E4,
                -4,
                b.e4.truncate(o),
                Majorant::E4,
            ),
            "E6" => Self::simple(
                b.e6.truncate(o),
                Majorant::E6,
                -6,
                b.e6.truncate(o).neg(),
                Majorant::E6,
            ),
            "Delta" => {
                let d = b.delta.truncate(o);
                Self::simple(d.clone(), Majorant::Delta, -12, d, Majorant::Delta)
            }
            "U" => {
                let u = b.u.truncate(o);
                Self::simple(u.clone(), Self::theta4(), -2, u, Self::theta4())
            }
            "W" => {
                let v2 = Majorant::scaled(&int(2), Self::theta4());
                Self::simple(b.w.truncate(o), Self::theta4(), -2, b.v().truncate(o), v2)
            }
            "V" => {
                let v2 = Majorant::scaled(&int(2), Self::theta4());
                Self::simple(b.v().truncate(o), v2, -2, b.w.truncate(o), Self::theta4())
            }
            "alpha1" => self.over_delta_profile(&a1)?,
            "beta1" => self.over_delta_profile(&b1)?,
            "gamma1" => self.over_delta_profile(&g1)?,
            "alpha2" => self.over_delta_profile(&a2)?,
            "beta2" => self.over_delta_profile(&b2)?,
            "psi_single" => self.over_delta_profile(&modforms::psi_single_numerator())?,
            "psi" => self.over_delta_profile(&modforms::psi_numerator())?,
            // A(it) = A(i/t) - (12t/pi) B(i/t) + (36t^2/pi^2) C(i/t)
            "chi" | "phiA" => FormProfile {
                large: Regime::new(false).with_term(0, 0, phi_a(), Self::maj_a()),
                small: Regime::new(true)
                    .with_term(0, 0, phi_a(), Self::maj_a())
                    .with_term(
                        1,
                        1,
                        phi_b().scale_int(-12),
                        Majorant::scaled(&int(12), Self::maj_b()),
                    )
                    .with_term(
                        2,
                        2,
                        phi_c().scale_int(36),
                        Majorant::scaled(&int(36), Self::maj_c()),
                    ),
            },
            // B(it) = -t^2 B(i/t) + (6t^3/pi) C(i/t)
            "phiB" => FormProfile {
                large: Regime::new(false).with_term(0, 0, phi_b(), Self::maj_b()),
                small: Regime::new(true)
                    .with_term(2, 0, phi_b().neg(), Self::maj_b())
                    .with_term(
                        3,
                        1,
                        phi_c().scale_int(6),
                        Majorant::scaled(&int(6), Self::maj_c()),
                    ),
            },
            "phiC" => FormProfile {
                large: Regime::new(false).with_term(0, 0, phi_c(), Self::maj_c()),
                small: Regime::new(true).with_term(4, 0, phi_c(), Self::maj_c()),
            },
            "phi" => self.phi_profile(),
            _ => return Err(Error::UnknownForm(name.to_string())),
        })
    }

    /// `phi(it) = -t^2 A(it) + (12t/pi) B(it) - (36/pi^2) C(it)` for large `t`
    /// and `-t^2 A(i/t)` for small `t`.
    pub fn phi_profile(&self) -> FormProfile {
        let (a, quasi) = self.bank.chi_phi();
        let mut large = Regime::new(false);
        for t in &quasi.terms {
            let maj = match (t.t_power, t.pi_power) {
                (2, 0) => Self::maj_a(),
                (1, 1) => Majorant::scaled(&int(12), Self::maj_b()),
                _ => Majorant::scaled(&int(36), Self::maj_c()),
            };
            large = large.with_term(t.t_power, t.pi_power, t.series.clone(), maj);
        }
        FormProfile {
            large,
            small: Regime::new(true).with_term(2, 0, a.neg(), Self::maj_a()),
        }
    }

    /// `psi_single(it + 1)`: the expansion with `q^(1/2) -> -q^(1/2)`, and
    /// `-t^2 (psi_single|TS)(i/t)` for small `t`.
    pub fn shifted_single_profile(&self) -> Result<FormProfile> {
        let p = modforms::psi_single_numerator();
        let large = self.bank.psi_single().shift_t();
        let pts = p.slash(&"TS".parse().expect("valid word"));
        let small = self.bank.cusp_expansion(&pts, &SlashWord::identity())?;
        Ok(FormProfile {
            large: Regime::new(false).with_term(0, 0, large, Majorant::uw_over_delta(&p)),
            small: Regime::new(true).with_term(2, 0, small.neg(), Majorant::uw_over_delta(&pts)),
        })
    }

    /// Evaluates a named function at `it` in the given regime.
    pub fn eval_regime(
        &self,
        name: &str,
        t: &RealBall,
        small: bool,
        prec: u32,
    ) -> Result<RealBall> {
        let p = self.profile(name)?;
        let r = if small { &p.small } else { &p.large };
        r.prepare(prec).eval(t)
    }

    /// Evaluates a named function at `it`, choosing the regime by `t`.
    pub fn eval_it(&self, name: &str, t: &RealBall, prec: u32) -> Result<RealBall> {
        if !t.is_positive() {
            return Err(Error::NonpositiveT);
        }
        let small = t.mid_f64() < 1.0;
        self.eval_regime(name, t, small, prec)
    }

    /// Both regimes of one of the magic-function sources; the two
    /// combinations use the normalization ratio from [`magic::ratio`].
    pub fn source_profile(&self, source: Source) -> Result<FormProfile> {
        let phi = self.phi_profile();
        let psi = self.profile("psi")?;
        let (rho, dp) = magic::ratio(
            &LaplaceProfile::new(Source::Phi, &phi.large, &phi.small),
            &LaplaceProfile::new(Source::Psi, &psi.large, &psi.small),
        )?;
        let combine = |sign: i64| {
            let c = &rho * int(sign);
            FormProfile {
                large: phi.large.add(&psi.large.scale_pi(&c, dp)),
                small: phi.small.add(&psi.small.scale_pi(&c, dp)),
            }
        };
        Ok(match source {
            Source::Psi => psi.clone(),
            Source::Phi => phi.clone(),
            Source::PhiPlusPsi => combine(1),
            Source::PhiMinusPsi => combine(-1),
            Source::PsiSingleShifted => self.shifted_single_profile()?,
        })
    }

    /// Laplace profile of one of the magic-function sources.
    pub fn laplace_profile(&self, source: Source) -> Result<LaplaceProfile> {
        let fp = self.source_profile(source)?;
        Ok(LaplaceProfile::new(source, &fp.large, &fp.small))
    }

    /// Prepared magic-function data at `prec`, built once and shared.
    pub fn bundle(&self, prec: u32) -> Result<Arc<MagicBundle>> {
        if let Some(b) = self.bundles.lock().unwrap().get(&prec) {
            return Ok(b.clone());
        }
        let b = Arc::new(MagicBundle::new(self, prec)?);
        self.bundles.lock().unwrap().insert(prec, b.clone());
        Ok(b)
    }
}

/// Value of a named form at `it` (see [`profile_names`]).
pub fn eval_form_it(name: &str, t: &RealBall, prec: u32) -> Result<RealBall> {
    Forms::standard().eval_it(name, t, prec)
}

/// `f`, `fhat`, `fplus` or `fminus` at radius `r`.
pub fn magic_eval(which: MagicFn, r: &RealBall, prec: u32) -> Result<RealBall> {
    Forms::standard().bundle(prec)?.eval(which, r)
}

/// Radial derivative of `f`, `fhat`, `fplus` or `fminus` at radius `r`.
pub fn magic_deriv(which: MagicFn, r: &RealBall, prec: u32) -> Result<RealBall> {
    Forms::standard().bundle(prec)?.deriv(which, r)
}

/// The single-root eigenfunction `g` at radius `r`.
pub fn g_eval(r: &RealBall, prec: u32) -> Result<RealBall> {
    Forms::standard().bundle(prec)?.g(r)
}

/// Normalization data at `prec`.
pub fn normalize(prec: u32) -> Result<Arc<MagicBundle>> {
    Forms::standard().bundle(prec)
}
