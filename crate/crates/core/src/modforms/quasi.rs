//! Real functions on the imaginary axis written as `sum t^k pi^-p F(q)`.

use std::fmt;

use num_rational::BigRational;

use crate::qseries::QSeries;

/// One term `t^k * pi^-p * series(q)` with `q = e^(-2 pi t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiTerm {
    pub t_power: i32,
    pub pi_power: u32,
    pub series: QSeries,
}

/// A finite sum of [`QuasiTerm`]s; signs are carried by the series.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QuasiProfile {
    pub terms: Vec<QuasiTerm>,
}

impl QuasiProfile {
    pub fn new() -> QuasiProfile {
        QuasiProfile::default()
    }

    pub fn single(series: QSeries) -> QuasiProfile {
        QuasiProfile::new().with_term(0, 0, series)
    }

    /// Adds a term, merging with an existing term of the same `(k, p)`.
    pub fn with_term(mut self, t_power: i32, pi_power: u32, series: QSeries) -> QuasiProfile {
        if let Some(t) = self
            .terms
            .iter_mut()
            .find(|t| t.t_power == t_power && t.pi_power == pi_power)
        {
            t.series = t.series.add(&series);
        } else {
            self.terms.push(QuasiTerm {
                t_power,
                pi_power,
                series,
            });
            self.terms
                .sort_by_key(|t| (std::cmp::Reverse(t.t_power), t.pi_power));
        }
        self
    }

    pub fn add(&self, o: &QuasiProfile) -> QuasiProfile {
        o.terms.iter().fold(self.clone(), |acc, t| {
            acc.with_term(t.t_power, t.pi_power, t.series.clone())
        })
    }

    /// Multiply by the exact rational `c`.
    pub fn scale(&self, c: &BigRational) -> QuasiProfile {
        QuasiProfile {
            terms: self
                .terms
                .iter()
                .map(|t| QuasiTerm {
                    series: t.series.scale(c),
                    ..t.clone()
                })
                .collect(),
        }
    }

    /// Multiply by `c * pi^-p` (raising every term's pi power by `p`).
    pub fn scale_pi(&self, c: &BigRational, p: u32) -> QuasiProfile {
        QuasiProfile {
            terms: self
                .terms
                .iter()
                .map(|t| QuasiTerm {
                    t_power: t.t_power,
                    pi_power: t.pi_power + p,
                    series: t.series.scale(c),
                })
                .collect(),
        }
    }

    pub fn neg(&self) -> QuasiProfile {
        self.scale(&-BigRational::from_integer(1.into()))
    }

    pub fn term(&self, t_power: i32, pi_power: u32) -> Option<&QSeries> {
        self.terms
            .iter()
            .find(|t| t.t_power == t_power && t.pi_power == pi_power)
            .map(|t| &t.series)
    }

    /// Smallest truncation index over all terms.
    pub fn trunc_index(&self) -> i64 {
        self.terms
            .iter()
            .map(|t| t.series.trunc_index())
            .min()
            .unwrap_or(i64::MAX)
    }

    /// Lowest index with a nonzero coefficient in any term.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.iter().filter_map(|t| t.series.valuation()).min()
    }
}

impl fmt::Display for QuasiProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "t^{} pi^-{} [{}]", t.t_power, t.pi_power, t.series)?;
        }
        Ok(())
    }
}
