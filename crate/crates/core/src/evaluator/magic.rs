//! The normalized eigenfunctions `f+`, `f-`, their combinations `f` and
//! `fhat`, and the single-root function `g`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;

use crate::ball::RealBall;
use crate::error::{Error, Result};

use super::laplace::{LaplaceProfile, Prefactor, PreparedLaplace, Source};
use super::Forms;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MagicFn {
    F,
    FHat,
    FPlus,
    FMinus,
}

impl MagicFn {
    pub const ALL: [MagicFn; 4] = [MagicFn::F, MagicFn::FHat, MagicFn::FPlus, MagicFn::FMinus];

    pub fn name(self) -> &'static str {
        match self {
            MagicFn::F => "f",
            MagicFn::FHat => "fhat",
            MagicFn::FPlus => "fplus",
            MagicFn::FMinus => "fminus",
        }
    }
}

impl fmt::Display for MagicFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MagicFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<MagicFn> {
        MagicFn::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownForm(s.to_string()))
    }
}

/// `(rho, d)` with `c_minus / c_plus = rho * pi^-d`: the ratio that makes the
/// `e^(2 pi t)` coefficients of `c_plus phi` and `c_minus psi` equal.
pub(crate) fn ratio(phi: &LaplaceProfile, psi: &LaplaceProfile) -> Result<(BigRational, u32)> {
    let a = single_head(phi, 0, -2)?;
    let b = single_head(psi, 0, -2)?;
    if b.coeff.is_zero() || a.p < b.p {
        return Err(Error::DegenerateHead);
    }
    Ok((&a.coeff / &b.coeff, a.p - b.p))
}

fn single_head(p: &LaplaceProfile, k: u32, n: i64) -> Result<&super::HeadTerm> {
    match p.head_terms(k, n).as_slice() {
        [h] => Ok(h),
        _ => Err(Error::DegenerateHead),
    }
}

/// Normalization constants and prepared profiles at one precision.
pub struct MagicBundle {
    pub prec: u32,
    /// Scale of `phi` making `f+(0) = 1`.
    pub c_plus: RealBall,
    /// Scale of `psi` matching the `e^(2 pi t)` coefficient of `c_plus phi`.
    pub c_minus: RealBall,
    /// `c_minus / c_plus = rho * pi^-rho_pi_power`.
    pub rho: BigRational,
    pub rho_pi_power: u32,
    pub profiles: Vec<LaplaceProfile>,
    f: PreparedLaplace,
    fhat: PreparedLaplace,
    fplus: PreparedLaplace,
    fminus: PreparedLaplace,
    g: PreparedLaplace,
}

impl MagicBundle {
    pub fn new(forms: &Forms, prec: u32) -> Result<MagicBundle> {
        let sources = [
            Source::PhiPlusPsi,
            Source::PhiMinusPsi,
            Source::Phi,
            Source::Psi,
            Source::PsiSingleShifted,
        ];
        let profiles = sources
            .iter()
            .map(|s| forms.laplace_profile(*s))
            .collect::<Result<Vec<_>>>()?;
        let (phi, psi) = (&profiles[2], &profiles[3]);
        let lin = single_head(phi, 1, 0)?;
        let lin_val = lin.value(prec + 32);
        if lin_val.contains_zero() {
            return Err(Error::DegenerateHead);
        }
        let c_plus = lin_val.recip().ok_or(Error::DegenerateHead)?;
        let (rho, rho_pi_power) = ratio(phi, psi)?;
        let pi_d = RealBall::pi(prec + 32).pow(rho_pi_power);
        let c_minus = (&c_plus * &RealBall::from_rational(&rho, prec + 32))
            .checked_div(&pi_d)
            .ok_or(Error::DegenerateHead)?;

        use rayon::prelude::*;
        let mut prepared = profiles
            .par_iter()
            .map(|p| p.prepare(prec))
            .collect::<Result<Vec<_>>>()?
            .into_iter();
        let mut next = || prepared.next().expect("five profiles");
        Ok(MagicBundle {
            prec,
            c_plus: c_plus.with_prec(prec),
            c_minus: c_minus.with_prec(prec),
            rho,
            rho_pi_power,
            f: next(),
            fhat: next(),
            fplus: next(),
            fminus: next(),
            g: next(),
            profiles,
        })
    }

    pub fn profile(&self, source: Source) -> &LaplaceProfile {
        self.profiles
            .iter()
            .find(|p| p.source == source)
            .expect("all sources are built")
    }

    fn parts(&self, which: MagicFn) -> (&PreparedLaplace, &RealBall) {
        match which {
            MagicFn::F => (&self.f, &self.c_plus),
            MagicFn::FHat => (&self.fhat, &self.c_plus),
            MagicFn::FPlus => (&self.fplus, &self.c_plus),
            MagicFn::FMinus => (&self.fminus, &self.c_minus),
        }
    }

    fn jet(&self, which: MagicFn, r: &RealBall) -> Result<(RealBall, RealBall)> {
        let (p, c) = self.parts(which);
        let j = p.transform(Prefactor::SinSqHalf, &r.sqr())?;
        let d = (&(&j.d * c) * r).mul_2exp(1);
        Ok(((&j.v * c).with_prec(self.prec), d.with_prec(self.prec)))
    }

    /// Value at radius `r`.
    pub fn eval(&self, which: MagicFn, r: &RealBall) -> Result<RealBall> {
        Ok(self.jet(which, r)?.0)
    }

    /// Radial derivative at `r`.
    pub fn deriv(&self, which: MagicFn, r: &RealBall) -> Result<RealBall> {
        Ok(self.jet(which, r)?.1)
    }

    /// `g(r) = sin(pi r^2) int_0^inf psi_single(it + 1) e^(-pi t r^2) dt`.
    pub fn g(&self, r: &RealBall) -> Result<RealBall> {
        Ok(self
            .g
            .transform(Prefactor::Sin, &r.sqr())?
            .v
            .with_prec(self.prec))
    }

    /// Radial derivative of `g`.
    pub fn g_deriv(&self, r: &RealBall) -> Result<RealBall> {
        let j = self.g.transform(Prefactor::Sin, &r.sqr())?;
        Ok((&j.d * r).mul_2exp(1).with_prec(self.prec))
    }

    pub fn prepared(&self, source: Source) -> &PreparedLaplace {
        match source {
            Source::PhiPlusPsi => &self.f,
            Source::PhiMinusPsi => &self.fhat,
            Source::Phi => &self.fplus,
            Source::Psi => &self.fminus,
            Source::PsiSingleShifted => &self.g,
        }
    }

    /// The continued transform of one source at `u`, without prefactor.
    pub fn laplace(&self, source: Source, u: &RealBall) -> Result<RealBall> {
        self.prepared(source).eval(u)
    }
}
