//! Closed-form bounds, equality certificates, and extremal constructions,
//! evaluated in exact integer arithmetic so the degree engine can be
//! cross-checked against them. Integer roots go through binary search on
//! powers; floating point never enters.

use num_bigint::BigInt;

use crate::groups::{canonical_class_rep, CharacterSet};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoundKind {
    LowerBound,
    UpperBound,
    Exact,
    Conjectural,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoundReport {
    pub name: &'static str,
    pub value: u64,
    pub kind: BoundKind,
    pub certificate: Option<String>,
}

/// Trial division is plenty at the scales this library targets.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Least integer t with `t^m >= order`.
pub fn int_root_lower_bound(order: u128, m: u32) -> u128 {
    assert!(order >= 1 && m >= 1);
    let pow_at_least = |t: u128| BigInt::from(t).pow(m) >= BigInt::from(order);
    let mut lo = 1u128; // pow(lo) < order unless order == 1
    let mut hi = 1u128;
    while !pow_at_least(hi) {
        hi *= 2;
    }
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if pow_at_least(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if pow_at_least(lo) {
        lo
    } else {
        hi
    }
}

/// `gamma^m < 2*order` forces beta = gamma.
pub fn close_implies_equal(order: u128, m: u32, gamma: u64) -> bool {
    BigInt::from(gamma).pow(m) < BigInt::from(2u8) * BigInt::from(order)
}

// ---------------------------------------------------------------------------
// Two distinct nontrivial characters mod an odd prime
// ---------------------------------------------------------------------------

/// One way round the pair: `b*A1 = A2 (mod p)` and `p = q*b + r`, `0 < r < b`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Orientation {
    pub b: u64,
    pub q: u64,
    pub r: u64,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwoCharProfile {
    pub p: u64,
    pub a1: u64,
    pub a2: u64,
    pub fwd: Orientation,
    /// Roles of A1, A2 swapped; `fwd.b * rev.b = 1 (mod p)`.
    pub rev: Orientation,
    /// A1 + A2 = 0 (mod p), equivalently b = p - 1. The one pair shape
    /// with beta = p.
    pub inverse_pair: bool,
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // extended Euclid on i128; p prime and a nonzero mod p
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(p as i128) as u64
}

fn orientation(p: u64, b: u64) -> Orientation {
    Orientation {
        b,
        q: p / b,
        r: p % b,
    }
}

pub fn two_char_profile(p: u64, a1: u64, a2: u64) -> Result<TwoCharProfile> {
    if p < 3 || !is_prime(p) || p.is_multiple_of(2) {
        return Err(Error::BadInput(format!("{p} is not an odd prime")));
    }
    let (a1, a2) = (a1 % p, a2 % p);
    if a1 == 0 || a2 == 0 || a1 == a2 {
        return Err(Error::BadInput(format!(
            "need two distinct nonzero characters mod {p}, got {a1} and {a2}"
        )));
    }
    let b = (a2 as u128 * mod_inverse(a1, p) as u128 % p as u128) as u64;
    let b_rev = mod_inverse(b, p);
    let inverse_pair = (a1 + a2) % p == 0;
    debug_assert_eq!(inverse_pair, b == p - 1);
    Ok(TwoCharProfile {
        p,
        a1,
        a2,
        fwd: orientation(p, b),
        rev: orientation(p, b_rev),
        inverse_pair,
    })
}

// q*(b - r + 1) >= r*(r + b - 3), the integer form of the sufficient
// condition for equality in the q + b + r - 1 formula. Subsumes q >= r(r-1).
fn qbr_exact(o: &Orientation) -> bool {
    let lhs = o.q as u128 * (o.b - o.r + 1) as u128;
    let rhs = o.r as u128 * (o.r + o.b - 3) as u128;
    lhs >= rhs
}

/// The `q + b + r - 1` upper bound for a two-character pair, minimized over
/// both orientations, marked Exact when the winning orientation satisfies
/// the high-quotient condition.
pub fn qbr_bound(prof: &TwoCharProfile) -> BoundReport {
    let candidates = [prof.fwd, prof.rev];
    let value = candidates
        .iter()
        .map(|o| o.q + o.b + o.r - 1)
        .min()
        .expect("two orientations");
    let witness = candidates
        .iter()
        .find(|o| o.q + o.b + o.r - 1 == value && qbr_exact(o));
    match witness {
        Some(o) => BoundReport {
            name: "q+b+r-1",
            value,
            kind: BoundKind::Exact,
            certificate: Some(format!(
                "(b,q,r)=({},{},{}) satisfies q(b-r+1) >= r(r+b-3)",
                o.b, o.q, o.r
            )),
        },
        None => BoundReport {
            name: "q+b+r-1",
            value,
            kind: BoundKind::UpperBound,
            certificate: None,
        },
    }
}

/// `(p+3)/2` bounds beta for every non-inverse pair mod an odd prime;
/// absent for inverse pairs, where beta = p instead.
pub fn half_bound(p: u64, a1: u64, a2: u64) -> Result<Option<u64>> {
    let prof = two_char_profile(p, a1, a2)?;
    Ok(if prof.inverse_pair {
        None
    } else {
        Some((p + 3) / 2)
    })
}

/// The conjectured sharp upper bound `ceil(n / ceil(m/2))` on beta over all
/// supports of m distinct nontrivial characters mod n.
pub fn conjecture_bound(n: u64, m: u64) -> u64 {
    assert!(m >= 1);
    n.div_ceil(m.div_ceil(2))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SqrtLowerBound {
    pub bound: u64,
    /// Present exactly when the bound is attained by some m=2 class:
    /// p = 3, or p = d^2 - 3d + 1 with d >= 4, attaining class {1, d^2-4d+2}.
    pub extremal: Option<ExtremalClass>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtremalClass {
    pub d: u64,
    pub class: Vec<u64>,
}

/// `ceil(sqrt(p) + 1)`, the two-character lower bound on beta = gamma,
/// with the attaining class when one exists.
pub fn sqrt_lower_bound(p: u64) -> Result<SqrtLowerBound> {
    if p < 3 || !is_prime(p) || p.is_multiple_of(2) {
        return Err(Error::BadInput(format!("{p} is not an odd prime")));
    }
    // ceil(sqrt(p)+1) = ceil(sqrt(p)) + 1 since a prime is never a square
    let bound = int_root_lower_bound(p as u128, 2) as u64 + 1;
    let extremal = if p == 3 {
        Some(ExtremalClass {
            d: 3,
            class: vec![1, 2],
        })
    } else {
        // p = d^2 - 3d + 1  <=>  4p + 5 = (2d - 3)^2
        let target = 4 * p as u128 + 5;
        let s = int_root_lower_bound(target, 2);
        if s * s == target && s % 2 == 1 && s >= 5 {
            let d = ((s + 3) / 2) as u64;
            let class = canonical_class_rep(p, &[1, (d * d - 4 * d + 2) % p])?;
            Some(ExtremalClass { d, class })
        } else {
            None
        }
    };
    Ok(SqrtLowerBound { bound, extremal })
}

/// The extremal support `S_m` over `Z/n`: `{+-1, ..., +-m/2}` for even m,
/// `{+-1, ..., +-(m-1)/2, (m+1)/2}` for odd m, together with its predicted
/// beta = gamma value `max(3, ceil(n / ceil(m/2)))`.
pub fn build_extremal_sm(n: u64, m: u64) -> Result<(CharacterSet, u64)> {
    if n < 3 || m < 1 || m >= n {
        return Err(Error::BadRange(format!(
            "need n >= 3 and 1 <= m < n, got n={n} m={m}"
        )));
    }
    let mut residues = Vec::with_capacity(m as usize);
    for a in 1..=m / 2 {
        residues.push(a);
        residues.push(n - a);
    }
    if m % 2 == 1 {
        residues.push(m.div_ceil(2));
    }
    let set = CharacterSet::from_cyclic(n, &residues)?;
    debug_assert_eq!(set.len() as u64, m);
    Ok((set, 3.max(conjecture_bound(n, m))))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct HardFloor {
    pub floor: u64,
    pub all_involutions: bool,
}

/// Gamma is exactly 2 when every character in the support is an involution,
/// and at least 3 otherwise.
pub fn hard_floor(s: &CharacterSet) -> HardFloor {
    let all = s.chars().iter().all(|c| c.is_involution(s.group()));
    HardFloor {
        floor: if all { 2 } else { 3 },
        all_involutions: all,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{AbelianGroup, Character};

    #[test]
    fn integer_roots() {
        assert_eq!(int_root_lower_bound(9, 2), 3);
        assert_eq!(int_root_lower_bound(17, 3), 3); // 2^3 = 8 < 17 <= 27
        assert_eq!(int_root_lower_bound(1, 5), 1);
        for d in 2..=6u128 {
            for m in 1..=4u32 {
                assert_eq!(int_root_lower_bound(d.pow(m), m), d);
                assert_eq!(int_root_lower_bound(d.pow(m) + 1, m), d + 1);
            }
        }
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
    }

    #[test]
    fn profile_of_13_1_3() {
        let prof = two_char_profile(13, 1, 3).unwrap();
        assert_eq!(prof.fwd, Orientation { b: 3, q: 4, r: 1 });
        assert_eq!(prof.rev, Orientation { b: 9, q: 1, r: 4 });
        assert!(!prof.inverse_pair);
    }

    #[test]
    fn profile_of_41_1_34() {
        let prof = two_char_profile(41, 1, 34).unwrap();
        assert_eq!(prof.fwd, Orientation { b: 34, q: 1, r: 7 });
        assert_eq!(prof.rev, Orientation { b: 35, q: 1, r: 6 });
        assert!(!prof.inverse_pair);
    }

    #[test]
    fn profile_of_inverse_pair() {
        for p in [5u64, 13, 17] {
            let prof = two_char_profile(p, 1, p - 1).unwrap();
            assert_eq!(prof.fwd, Orientation { b: p - 1, q: 1, r: 1 });
            assert!(prof.inverse_pair);
        }
    }

    #[test]
    fn profile_rejects_bad_input() {
        assert!(two_char_profile(9, 1, 2).is_err());
        assert!(two_char_profile(2, 1, 1).is_err());
        assert!(two_char_profile(13, 0, 3).is_err());
        assert!(two_char_profile(13, 5, 5).is_err());
    }

    #[test]
    fn qbr_examples() {
        let r = qbr_bound(&two_char_profile(13, 1, 3).unwrap());
        assert_eq!((r.value, r.kind), (7, BoundKind::Exact));

        let r = qbr_bound(&two_char_profile(11, 1, 2).unwrap());
        assert_eq!((r.value, r.kind), (7, BoundKind::Exact));

        // q = q' = 1: only the (non-sharp) upper bound p remains
        let r = qbr_bound(&two_char_profile(41, 1, 34).unwrap());
        assert_eq!((r.value, r.kind), (41, BoundKind::UpperBound));
    }

    #[test]
    fn half_bound_examples() {
        assert_eq!(half_bound(13, 1, 3).unwrap(), Some(8));
        assert_eq!(half_bound(13, 1, 12).unwrap(), None);
        // {1, (p-1)/2} attains the bound, via the exact q+b+r-1 value
        let prof = two_char_profile(13, 1, 6).unwrap();
        let r = qbr_bound(&prof);
        assert_eq!((r.value, r.kind), (8, BoundKind::Exact));
        assert_eq!(half_bound(13, 1, 6).unwrap(), Some(8));
    }

    #[test]
    fn conjecture_bound_examples() {
        assert_eq!(conjecture_bound(11, 7), 3);
        assert_eq!(conjecture_bound(13, 4), 7);
        for p in [5u64, 7, 11, 13] {
            assert_eq!(conjecture_bound(p, 1), p);
        }
    }

    #[test]
    fn sqrt_lower_bound_examples() {
        let r = sqrt_lower_bound(11).unwrap();
        assert_eq!(r.bound, 5);
        assert_eq!(
            r.extremal,
            Some(ExtremalClass { d: 5, class: vec![1, 7] })
        );

        let r = sqrt_lower_bound(7).unwrap();
        assert_eq!(r.bound, 4);
        assert_eq!(r.extremal, None);

        let r = sqrt_lower_bound(3).unwrap();
        assert_eq!(r.bound, 3);
        assert!(r.extremal.is_some());

        // the attained primes in range
        let attained: Vec<u64> = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41]
            .into_iter()
            .filter(|&p| sqrt_lower_bound(p).unwrap().extremal.is_some())
            .collect();
        assert_eq!(attained, vec![3, 5, 11, 19, 29, 41]);
        assert_eq!(
            sqrt_lower_bound(41).unwrap().extremal.unwrap().class,
            vec![1, 34]
        );
    }

    #[test]
    fn extremal_sets() {
        let (s, predicted) = build_extremal_sm(11, 7).unwrap();
        let got: Vec<u64> = s.chars().iter().map(|c| c.residues()[0]).collect();
        assert_eq!(got, vec![1, 2, 3, 4, 8, 9, 10]); // {+-1, +-2, +-3, 4} mod 11
        assert_eq!(predicted, 3);

        let (s, predicted) = build_extremal_sm(13, 2).unwrap();
        let got: Vec<u64> = s.chars().iter().map(|c| c.residues()[0]).collect();
        assert_eq!(got, vec![1, 12]);
        assert_eq!(predicted, 13);

        let (s, predicted) = build_extremal_sm(12, 11).unwrap();
        assert_eq!(s.len(), 11); // every nonzero residue
        assert_eq!(predicted, 3);

        assert!(build_extremal_sm(11, 11).is_err());
        assert!(build_extremal_sm(2, 1).is_err());
    }

    #[test]
    fn hard_floor_examples() {
        let g = AbelianGroup::new(vec![2, 2]).unwrap();
        let raw = vec![
            Character::new(&g, vec![1, 0]).unwrap(),
            Character::new(&g, vec![0, 1]).unwrap(),
            Character::new(&g, vec![1, 1]).unwrap(),
        ];
        let s = CharacterSet::normalize_support(g, raw).unwrap();
        assert_eq!(hard_floor(&s).floor, 2);

        for residues in [&[1u64][..], &[2, 3], &[1, 4]] {
            let s = CharacterSet::from_cyclic(5, residues).unwrap();
            assert_eq!(hard_floor(&s).floor, 3);
        }

        let s = CharacterSet::from_cyclic(6, &[3]).unwrap();
        assert_eq!(hard_floor(&s).floor, 2);
    }

    #[test]
    fn closeness_certificate() {
        assert!(close_implies_equal(16, 2, 5)); // 25 < 32
        assert!(!close_implies_equal(17, 3, 5)); // 125 >= 34
        for (d, m) in [(3u64, 2u32), (4, 3), (5, 2)] {
            let order = (d as u128).pow(m);
            assert!(close_implies_equal(order, m, d));
        }
    }
}
