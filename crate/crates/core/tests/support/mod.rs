//! Shared oracles for the integration tests.

#![allow(dead_code)]

use magic8::lattice::LatticeKind;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// Squared distance from `x` to the nearest lattice point in the box of
/// radius 3 around the rounded target, by exhaustive search with pruning.
pub fn brute_force_cvp(kind: LatticeKind, x: &[BigRational]) -> BigRational {
    let d = x.len();
    let mut best: Option<BigRational> = None;
    let cosets: Vec<BigRational> = match kind {
        LatticeKind::E8 => vec![BigRational::zero(), half()],
        _ => vec![BigRational::zero()],
    };
    for shift in &cosets {
        let mut cur = Vec::with_capacity(d);
        search(kind, x, shift, &mut cur, BigRational::zero(), &mut best);
    }
    best.expect("box contains lattice points")
}

fn search(
    kind: LatticeKind,
    x: &[BigRational],
    shift: &BigRational,
    cur: &mut Vec<BigRational>,
    partial: BigRational,
    best: &mut Option<BigRational>,
) {
    if let Some(b) = best {
        if &partial > b {
            return;
        }
    }
    let i = cur.len();
    if i == x.len() {
        let ok = match kind {
            LatticeKind::Z => true,
            // D_d: even coordinate sum; E8 = D8 plus its half-integer coset
            LatticeKind::D | LatticeKind::E8 => {
                let s: BigRational = cur.iter().sum();
                let s = s - shift * BigRational::from_integer(BigInt::from(x.len() as i64));
                (s / BigRational::from_integer(2.into())).is_integer()
            }
        };
        if ok && best.as_ref().is_none_or(|b| &partial < b) {
            *best = Some(partial);
        }
        return;
    }
    let centre = (&x[i] - shift).round().to_integer();
    for k in -3i64..=3 {
        let c = BigRational::from_integer(&centre + BigInt::from(k)) + shift;
        let diff = &c - &x[i];
        cur.push(c);
        search(kind, x, shift, cur, &partial + &diff * &diff, best);
        cur.pop();
    }
}

/// `sigma_3(n)` by trial division.
pub fn sigma3(n: u64) -> u64 {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| d * d * d)
        .sum()
}
