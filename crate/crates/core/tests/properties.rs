mod support;

use magic8::ball::RealBall;
use magic8::lattice::{make_lattice, LatticeKind};
use magic8::modforms::{FormBank, Letter, SlashWord, UWPoly};
use magic8::qseries::{QSeries, EXACT};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Finite Laurent polynomial: small integer/rational coefficients on a short window.
fn poly() -> impl Strategy<Value = QSeries> {
    (-3i64..3, prop::collection::vec((-9i64..10, 1i64..4), 0..6)).prop_map(|(lo, cs)| {
        QSeries::from_terms(
            lo,
            EXACT,
            cs.iter()
                .enumerate()
                .map(|(i, (n, d))| (lo + i as i64, q(*n, *d))),
        )
    })
}

fn truncated() -> impl Strategy<Value = (QSeries, i64)> {
    (poly(), 0i64..8).prop_map(|(p, t)| {
        let t = p.min_index() + t;
        (p, t)
    })
}

/// Nonzero-constant-term polynomial in nonnegative indices, hence invertible.
fn unit() -> impl Strategy<Value = QSeries> {
    (1i64..5, prop::collection::vec(-5i64..6, 0..5)).prop_map(|(c0, rest)| {
        let mut v = vec![c0];
        v.extend(rest);
        QSeries::from_ints(0, EXACT, &v)
    })
}

fn uw(degree: u32) -> impl Strategy<Value = UWPoly> {
    prop::collection::vec(-6i64..7, (degree + 1) as usize).prop_map(move |cs| {
        let terms: Vec<(u32, u32, i64)> = cs
            .iter()
            .enumerate()
            .map(|(j, c)| (degree - j as u32, j as u32, *c))
            .collect();
        UWPoly::from_int_terms(&terms)
    })
}

fn word() -> impl Strategy<Value = SlashWord> {
    prop::collection::vec(
        prop_oneof![Just(Letter::S), Just(Letter::T), Just(Letter::TInv)],
        0..6,
    )
    .prop_map(SlashWord::new)
}

fn bank() -> &'static FormBank {
    static BANK: std::sync::OnceLock<FormBank> = std::sync::OnceLock::new();
    BANK.get_or_init(|| FormBank::new(24))
}

/// Sum of a series at `q^(1/2) = x` in f64, over its known coefficients.
fn eval_f64(s: &QSeries, x: f64) -> f64 {
    s.iter()
        .map(|(m, c)| {
            let c: f64 = c.numer().to_string().parse::<f64>().unwrap()
                / c.denom().to_string().parse::<f64>().unwrap();
            c * x.powi(m as i32)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.mul(&QSeries::one()).agrees_with(&a));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn truncated_products_agree_with_exact_products(
        (a, ta) in truncated(),
        (b, tb) in truncated(),
    ) {
        let exact = a.mul(&b);
        let approx = a.truncate(ta).mul(&b.truncate(tb));
        prop_assert!(approx.agrees_with(&exact));
        // the known window is exactly what the operands justify
        let expected = (ta + b.min_index()).min(tb + a.min_index());
        prop_assert_eq!(approx.trunc_index(), expected.max(approx.min_index()));
        let sum = a.truncate(ta).add(&b.truncate(tb));
        prop_assert!(sum.agrees_with(&a.add(&b)));
        prop_assert_eq!(sum.trunc_index(), ta.min(tb));
    }

    #[test]
    fn inverses_are_sound(u in unit(), order in 1i64..12) {
        let inv = u.invert(order).unwrap();
        prop_assert!(inv.trunc_index() >= order);
        prop_assert!(inv.mul(&u).agrees_with(&QSeries::one()));
        // raising the order only adds coefficients
        let more = u.invert(order + 5).unwrap();
        prop_assert!(more.agrees_with(&inv));
    }

    #[test]
    fn powers_match_repeated_products(a in poly(), n in 0u32..4) {
        let mut p = QSeries::one();
        for _ in 0..n {
            p = p.mul(&a);
        }
        prop_assert!(a.pow(n).agrees_with(&p));
    }

    #[test]
    fn slash_group_relations(p in uw(3), w in word()) {
        let s2: SlashWord = "SS".parse().unwrap();
        let st3: SlashWord = "STSTST".parse().unwrap();
        let tt: SlashWord = "TT^-1".parse().unwrap();
        prop_assert_eq!(p.slash(&s2), p.clone());
        prop_assert_eq!(p.slash(&st3), p.clone());
        prop_assert_eq!(p.slash(&tt), p.clone());
        // a word and its letters applied one at a time
        let stepwise = w.letters.iter().fold(p.clone(), |acc, l| acc.slash_letter(*l));
        prop_assert_eq!(p.slash(&w), stepwise);
    }

    #[test]
    fn slash_is_a_ring_action(a in uw(2), b in uw(1), w in word()) {
        prop_assert_eq!(a.mul(&b).slash(&w), a.slash(&w).mul(&b.slash(&w)));
        prop_assert_eq!(a.add(&a.scale_int(3)).slash(&w), a.slash(&w).scale_int(4));
    }

    #[test]
    fn t_slash_matches_the_q_expansion(p in uw(2)) {
        // z -> z + 1 sends q^(1/2) to -q^(1/2)
        let bk = bank();
        let t = SlashWord::new(vec![Letter::T]);
        let lhs = p.slash(&t).to_qseries(&bk.u, &bk.w);
        let rhs = p.to_qseries(&bk.u, &bk.w).shift_t();
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn s_slash_matches_values_at_i(p in uw(2)) {
        // at the fixed point z = i, (f|S)(i) = i^(-k) f(i) with k = 2 deg
        let bk = bank();
        let s = SlashWord::new(vec![Letter::S]);
        let x = (-std::f64::consts::PI).exp();
        let lhs = eval_f64(&p.slash(&s).to_qseries(&bk.u, &bk.w), x);
        let rhs = eval_f64(&p.to_qseries(&bk.u, &bk.w), x) * if p.degree() % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn ball_arithmetic_encloses_rational_results(
        (an, ad) in (-1000i64..1000, 1i64..200),
        (bn, bd) in (-1000i64..1000, 1i64..200),
        prec in 24u32..160,
    ) {
        let (a, b) = (q(an, ad), q(bn, bd));
        let (x, y) = (RealBall::from_rational(&a, prec), RealBall::from_rational(&b, prec));
        prop_assert!(x.contains_rational(&a));
        prop_assert!((&x + &y).contains_rational(&(&a + &b)));
        prop_assert!((&x - &y).contains_rational(&(&a - &b)));
        prop_assert!((&x * &y).contains_rational(&(&a * &b)));
        if !b.is_zero() {
            prop_assert!(x.checked_div(&y).unwrap().contains_rational(&(&a / &b)));
        }
    }

    #[test]
    fn elementary_functions_enclose_f64_values(x in -20.0f64..20.0) {
        let b = RealBall::from_f64(x, 128);
        let e = b.exp();
        prop_assert!((e.mid_f64() - x.exp()).abs() <= 1e-14 * x.exp());
        let (s, c) = b.sin_cos();
        prop_assert!((s.mid_f64() - x.sin()).abs() < 1e-14);
        prop_assert!((c.mid_f64() - x.cos()).abs() < 1e-14);
        prop_assert!(e.rad_f64() <= 1e-30 * x.exp().max(1.0));
    }
}

#[test]
fn closest_vector_matches_brute_force_on_random_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ede8);
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
        let (v, dist) = l.closest_vector(&x).unwrap();
        assert!(l.contains(&v), "{kind:?} {d}: {v:?} not in lattice");
        let direct: BigRational = x.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum();
        assert_eq!(direct, dist);
        assert_eq!(
            dist,
            support::brute_force_cvp(kind, &x),
            "{kind:?} d={d} x={x:?}"
        );
    }
}

#[test]
fn closest_vector_returns_a_lattice_point_for_lattice_inputs() {
    let e8 = make_lattice(LatticeKind::E8, 8).unwrap();
    for row in &e8.matrix {
        let (v, d) = e8.closest_vector(row).unwrap();
        assert_eq!(&v, row);
        assert!(d.is_zero());
    }
}
