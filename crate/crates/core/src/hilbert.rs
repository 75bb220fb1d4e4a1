//! Hilbert-series numerator data for a two-character representation mod an
//! odd prime: the set D of nonzero degrees of lattice points inside the
//! fundamental square `[0,p)^2`. The series is `(1 + sum t^d) / (1-t^p)^2`.
//!
//! The enumeration is the naive p^2 scan of the square; at the supported
//! scales anything cleverer would be noise.

use std::fmt;

use crate::bounds::is_prime;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HilbertSeries2 {
    pub p: u64,
    pub a1: u64,
    pub a2: u64,
    /// The numerator exponent set D, strictly increasing, |D| = p - 1.
    pub exponents: Vec<u64>,
}

/// Degrees of the nonzero lattice points of `A1*x + A2*y = 0 (mod p)` in
/// the square `[0,p)^2`.
pub fn hilbert_numerator(p: u64, a1: u64, a2: u64) -> Result<HilbertSeries2> {
    if p < 3 || !is_prime(p) {
        return Err(Error::BadInput(format!("{p} is not an odd prime")));
    }
    let (a1, a2) = (a1 % p, a2 % p);
    if a1 == 0 || a2 == 0 || a1 == a2 {
        return Err(Error::BadInput(format!(
            "need two distinct nonzero characters mod {p}, got {a1} and {a2}"
        )));
    }
    let mut exponents = Vec::with_capacity(p as usize - 1);
    for x in 0..p {
        for y in 0..p {
            let dot = (a1 as u128 * x as u128 + a2 as u128 * y as u128) % p as u128;
            if (x, y) != (0, 0) && dot == 0 {
                exponents.push(x + y);
            }
        }
    }
    exponents.sort_unstable();
    if exponents.len() != p as usize - 1 || exponents.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Internal(format!(
            "degrees in the fundamental square are not distinct for p={p} ({a1},{a2})"
        )));
    }
    Ok(HilbertSeries2 { p, a1, a2, exponents })
}

/// The three structural properties of the exponent set. All must hold; a
/// false entry is a reportable discrepancy.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct HilbertProperties {
    /// D is stable under d -> 2p - d.
    pub symmetric: bool,
    /// Exactly one element in each nonzero residue class mod p, and p not in D.
    pub one_per_residue_class: bool,
    /// For every d in D, no element of D is congruent to p mod d.
    pub avoids_p_mod_d: bool,
}

impl HilbertProperties {
    pub fn all_hold(&self) -> bool {
        self.symmetric && self.one_per_residue_class && self.avoids_p_mod_d
    }
}

pub fn verify_hilbert_properties(h: &HilbertSeries2) -> HilbertProperties {
    let p = h.p;
    let d = &h.exponents;

    let symmetric = d.iter().all(|&e| d.binary_search(&(2 * p - e)).is_ok());

    let mut counts = vec![0usize; p as usize];
    for &e in d {
        counts[(e % p) as usize] += 1;
    }
    let one_per_residue_class =
        counts[0] == 0 && counts[1..].iter().all(|&c| c == 1);

    let avoids_p_mod_d = d
        .iter()
        .all(|&m| d.iter().all(|&e| e % m != p % m));

    HilbertProperties {
        symmetric,
        one_per_residue_class,
        avoids_p_mod_d,
    }
}

impl HilbertSeries2 {
    /// Which residues mod `modulus` are hit by some exponent.
    pub fn residue_coverage(&self, modulus: u64) -> Vec<bool> {
        let mut cover = vec![false; modulus as usize];
        for &e in &self.exponents {
            cover[(e % modulus) as usize] = true;
        }
        cover
    }

    /// Exponents d for which D covers every residue class mod d except
    /// p mod d. Exposed as data only; nothing is asserted about them.
    pub fn full_coverage_exponents(&self) -> Vec<u64> {
        self.exponents
            .iter()
            .copied()
            .filter(|&m| {
                let cover = self.residue_coverage(m);
                cover
                    .iter()
                    .enumerate()
                    .all(|(r, &hit)| hit == (r as u64 != self.p % m))
            })
            .collect()
    }
}

impl fmt::Display for HilbertSeries2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(1")?;
        for e in &self.exponents {
            write!(f, " + t^{e}")?;
        }
        write!(f, ")/(1-t^{})^2", self.p)
    }
}
