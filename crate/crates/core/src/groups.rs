//! Finite abelian groups as lists of cyclic factors, characters as residue
//! vectors, support normalization, and canonicalization of character sets
//! under the unit action (for cyclic groups).

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::linalg::{invariant_factors, IntMatrix};
use crate::{Error, Result};

/// A finite abelian group presented as a product of cyclic factors
/// `Z/n_1 x ... x Z/n_k`, each `n_i >= 2`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AbelianGroup {
    moduli: Vec<u64>,
    order: u128,
}

impl AbelianGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::BadInput("group needs at least one cyclic factor".into()));
        }
        if let Some(&bad) = moduli.iter().find(|&&n| n < 2) {
            return Err(Error::BadInput(format!("cyclic factor order {bad} < 2")));
        }
        let order = moduli
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
            .ok_or_else(|| Error::BadInput("group order overflows u128".into()))?;
        Ok(AbelianGroup { moduli, order })
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn num_factors(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn is_cyclic(&self) -> bool {
        self.moduli.len() == 1
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A character of an abelian group, stored as one residue per cyclic
/// factor, componentwise reduced. Trivial iff all residues are zero.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Character {
    residues: Vec<u64>,
}

impl Character {
    pub fn new(group: &AbelianGroup, residues: Vec<u64>) -> Result<Self> {
        if residues.len() != group.num_factors() {
            return Err(Error::DimensionMismatch {
                expected: group.num_factors(),
                got: residues.len(),
            });
        }
        let residues = residues
            .iter()
            .zip(group.moduli())
            .map(|(&r, &n)| r % n)
            .collect();
        Ok(Character { residues })
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn is_trivial(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }

    /// The inverse character.
    pub fn negated(&self, group: &AbelianGroup) -> Character {
        Character {
            residues: self
                .residues
                .iter()
                .zip(group.moduli())
                .map(|(&r, &n)| if r == 0 { 0 } else { n - r })
                .collect(),
        }
    }

    /// Order of the character in the dual group.
    pub fn dual_order(&self, group: &AbelianGroup) -> u64 {
        self.residues
            .iter()
            .zip(group.moduli())
            .map(|(&r, &n)| n / r.gcd(&n))
            .fold(1u64, |acc, o| acc.lcm(&o))
    }

    pub fn is_involution(&self, group: &AbelianGroup) -> bool {
        self.dual_order(group) == 2
    }
}

/// The normalized support of a representation: the strictly ordered set of
/// its distinct nontrivial characters. Generation and full-rank degrees
/// depend only on this set, so it is the canonical input everywhere.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharacterSet {
    group: AbelianGroup,
    chars: Vec<Character>,
}

impl CharacterSet {
    /// Drop trivial characters, merge duplicates, sort.
    pub fn normalize_support(group: AbelianGroup, raw: Vec<Character>) -> Result<Self> {
        let set: BTreeSet<Character> = raw.into_iter().filter(|c| !c.is_trivial()).collect();
        if set.is_empty() {
            return Err(Error::EmptySupport);
        }
        for c in &set {
            if c.residues().len() != group.num_factors() {
                return Err(Error::DimensionMismatch {
                    expected: group.num_factors(),
                    got: c.residues().len(),
                });
            }
        }
        Ok(CharacterSet {
            group,
            chars: set.into_iter().collect(),
        })
    }

    /// Support over `Z/n` given by nonzero residues, e.g. a class representative.
    pub fn from_cyclic(n: u64, residues: &[u64]) -> Result<Self> {
        let group = AbelianGroup::cyclic(n)?;
        let raw = residues
            .iter()
            .map(|&a| Character::new(&group, vec![a]))
            .collect::<Result<Vec<_>>>()?;
        Self::normalize_support(group, raw)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn chars(&self) -> &[Character] {
        &self.chars
    }

    /// Number of distinct nontrivial characters.
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        false // m >= 1 by construction
    }

    /// Set with every character inverted. Same lattice, same degrees.
    pub fn negated(&self) -> CharacterSet {
        let chars: BTreeSet<Character> =
            self.chars.iter().map(|c| c.negated(&self.group)).collect();
        CharacterSet {
            group: self.group.clone(),
            chars: chars.into_iter().collect(),
        }
    }

    /// The sub-support on the characters selected by `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Result<CharacterSet> {
        let chars: Vec<Character> = keep.iter().map(|&i| self.chars[i].clone()).collect();
        Self::normalize_support(self.group.clone(), chars)
    }

    /// Order of the subgroup of the dual group generated by the support,
    /// and whether the support is faithful (order equals |G|).
    ///
    /// Computed exactly: the subgroup order is `prod(n_i)` divided by the
    /// cokernel order of the lattice spanned by the character vectors
    /// together with `diag(n_i)`.
    pub fn image_order(&self) -> (u128, bool) {
        let k = self.group.num_factors();
        let mut rows: Vec<Vec<BigInt>> = self
            .chars
            .iter()
            .map(|c| c.residues().iter().map(|&r| BigInt::from(r)).collect())
            .collect();
        for (i, &n) in self.group.moduli().iter().enumerate() {
            let mut row = vec![BigInt::from(0); k];
            row[i] = BigInt::from(n);
            rows.push(row);
        }
        let stacked = IntMatrix::from_rows(rows, k);
        let cokernel: BigInt = invariant_factors(&stacked).iter().product();
        let cokernel = cokernel
            .to_u128()
            .expect("cokernel order divides the group order");
        let order = self.group.order() / cokernel;
        (order, order == self.group.order())
    }
}

impl fmt::Display for CharacterSet {
    /// The CLI grammar form: `17:8,10,11` or `2x3:(1,0),(0,2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.group)?;
        let parts: Vec<String> = self
            .chars
            .iter()
            .map(|c| {
                if self.group.is_cyclic() {
                    c.residues()[0].to_string()
                } else {
                    let inner: Vec<String> =
                        c.residues().iter().map(|r| r.to_string()).collect();
                    format!("({})", inner.join(","))
                }
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parse the CLI character-set grammar: `n:a1,a2,...` for cyclic groups,
/// `n1xn2x...:(a,b),(c,d),...` for products.
pub fn parse_character_set(text: &str) -> Result<CharacterSet> {
    let bad = |msg: &str| Error::BadInput(format!("{msg} in character set `{text}`"));
    let (group_part, chars_part) = text
        .split_once(':')
        .ok_or_else(|| bad("missing `:` separator"))?;
    let moduli = group_part
        .trim()
        .split('x')
        .map(|tok| tok.trim().parse::<u64>().map_err(|_| bad("bad factor order")))
        .collect::<Result<Vec<u64>>>()?;
    let group = AbelianGroup::new(moduli)?;

    let chars_part = chars_part.trim();
    let raw: Vec<Character> = if group.is_cyclic() {
        chars_part
            .split(',')
            .map(|tok| {
                let a = tok.trim().parse::<u64>().map_err(|_| bad("bad residue"))?;
                Character::new(&group, vec![a])
            })
            .collect::<Result<_>>()?
    } else {
        if !chars_part.starts_with('(') || !chars_part.ends_with(')') {
            return Err(bad("expected parenthesized residue tuples"));
        }
        let inner = &chars_part[1..chars_part.len() - 1];
        inner
            .split("),")
            .map(|tok| {
                let tok = tok.trim().trim_start_matches('(');
                let residues = tok
                    .split(',')
                    .map(|r| r.trim().parse::<u64>().map_err(|_| bad("bad residue")))
                    .collect::<Result<Vec<u64>>>()?;
                Character::new(&group, residues)
            })
            .collect::<Result<_>>()?
    };
    CharacterSet::normalize_support(group, raw)
}

// ---------------------------------------------------------------------------
// Unit action on subsets of Z/n \ {0}: canonical representatives and orbits
// ---------------------------------------------------------------------------

/// Units of `Z/n`, ascending.
pub fn units(n: u64) -> Vec<u64> {
    (1..n).filter(|u| u.gcd(&n) == 1).collect()
}

fn validate_residues(n: u64, s: &[u64]) -> Result<()> {
    if n < 2 {
        return Err(Error::BadInput(format!("modulus {n} < 2")));
    }
    if s.is_empty() {
        return Err(Error::BadInput("empty residue set".into()));
    }
    let mut seen = BTreeSet::new();
    for &a in s {
        if a % n == 0 {
            return Err(Error::BadInput(format!("residue {a} is zero mod {n}")));
        }
        if !seen.insert(a % n) {
            return Err(Error::BadInput(format!("duplicate residue {a} mod {n}")));
        }
    }
    Ok(())
}

fn mapped_sorted(n: u64, s: &[u64], u: u64, buf: &mut Vec<u64>) {
    buf.clear();
    buf.extend(s.iter().map(|&a| (a as u128 * u as u128 % n as u128) as u64));
    buf.sort_unstable();
}

/// Canonical representative of a support's equivalence class. Only the
/// cyclic unit action is implemented; multi-factor groups are rejected.
pub fn canonical_class_of(s: &CharacterSet) -> Result<Vec<u64>> {
    if !s.group().is_cyclic() {
        return Err(Error::NonCyclicGroup);
    }
    let residues: Vec<u64> = s.chars().iter().map(|c| c.residues()[0]).collect();
    canonical_class_rep(s.group().moduli()[0], &residues)
}

/// The lexicographically least sorted tuple in the orbit of `s` under
/// multiplication by units mod `n`.
pub fn canonical_class_rep(n: u64, s: &[u64]) -> Result<Vec<u64>> {
    validate_residues(n, s)?;
    let mut sorted: Vec<u64> = s.iter().map(|&a| a % n).collect();
    sorted.sort_unstable();
    let mut best = sorted.clone();
    let mut buf = Vec::with_capacity(s.len());
    for u in units(n) {
        mapped_sorted(n, &sorted, u, &mut buf);
        if buf < best {
            std::mem::swap(&mut best, &mut buf);
        }
    }
    Ok(best)
}

// `s` must be sorted and valid. Early-exits as soon as a smaller orbit
// element is seen; this is the hot path of class enumeration.
fn is_canonical(us: &[u64], n: u64, s: &[u64], buf: &mut Vec<u64>) -> bool {
    for &u in us {
        if u == 1 {
            continue;
        }
        mapped_sorted(n, s, u, buf);
        if buf.as_slice() < s {
            return false;
        }
    }
    true
}

/// Size of the orbit of `s` under the unit action: phi(n) / |stabilizer|.
pub fn orbit_size(n: u64, s: &[u64]) -> Result<u64> {
    validate_residues(n, s)?;
    let mut sorted: Vec<u64> = s.iter().map(|&a| a % n).collect();
    sorted.sort_unstable();
    let us = units(n);
    let mut buf = Vec::with_capacity(s.len());
    let stab = us
        .iter()
        .filter(|&&u| {
            mapped_sorted(n, &sorted, u, &mut buf);
            buf.as_slice() == sorted.as_slice()
        })
        .count() as u64;
    Ok(us.len() as u64 / stab)
}

/// `C(n, k)` in u128; panics on overflow (far beyond the supported scale).
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .expect("binomial overflows u128");
        acc /= (i + 1) as u128;
    }
    acc
}

/// First m-subset of `{1..=max}` in lex order.
pub(crate) fn first_subset(m: usize) -> Vec<u64> {
    (1..=m as u64).collect()
}

/// Advance `s` to the lex successor among m-subsets of `{1..=max}`.
/// Returns false when `s` was the last subset.
pub(crate) fn next_subset(s: &mut [u64], max: u64) -> bool {
    let m = s.len();
    for i in (0..m).rev() {
        if s[i] < max - (m - 1 - i) as u64 {
            s[i] += 1;
            for j in i + 1..m {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The m-subset of `{1..=max}` at lex rank `rank` (0-based).
pub(crate) fn subset_at_rank(max: u64, m: usize, mut rank: u128) -> Vec<u64> {
    let mut out = Vec::with_capacity(m);
    let mut lo = 1u64;
    for pos in 0..m {
        let remaining = (m - pos - 1) as u64;
        let mut v = lo;
        loop {
            let c = binomial(max - v, remaining);
            if rank < c {
                break;
            }
            rank -= c;
            v += 1;
        }
        out.push(v);
        lo = v + 1;
    }
    out
}

/// Stream of canonical class representatives of m-subsets of the nonzero
/// residues mod n, in lex order. Exactly one per unit orbit.
pub fn enumerate_classes(n: u64, m: usize) -> Result<ClassIter> {
    if n < 2 || m < 1 || m as u64 > n - 1 {
        return Err(Error::BadRange(format!(
            "need 1 <= m <= n-1, got n={n} m={m}"
        )));
    }
    Ok(ClassIter {
        n,
        units: units(n),
        current: Some(first_subset(m)),
        buf: Vec::with_capacity(m),
    })
}

pub struct ClassIter {
    n: u64,
    units: Vec<u64>,
    current: Option<Vec<u64>>,
    buf: Vec<u64>,
}

impl Iterator for ClassIter {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        loop {
            let cur = self.current.as_mut()?;
            let canonical = is_canonical(&self.units, self.n, cur, &mut self.buf);
            let item = if canonical { Some(cur.clone()) } else { None };
            if !next_subset(cur, self.n - 1) {
                self.current = None;
            }
            if let Some(item) = item {
                return Some(item);
            }
        }
    }
}

/// Canonical classes (with orbit sizes) among the m-subsets whose lex rank
/// lies in `[lo, hi)`. Workers split the rank space with this.
pub fn classes_in_rank_range(
    n: u64,
    m: usize,
    lo: u128,
    hi: u128,
) -> Result<Vec<(Vec<u64>, u64)>> {
    if n < 2 || m < 1 || m as u64 > n - 1 {
        return Err(Error::BadRange(format!(
            "need 1 <= m <= n-1, got n={n} m={m}"
        )));
    }
    let total = binomial(n - 1, m as u64);
    if hi > total || lo > hi {
        return Err(Error::BadRange(format!(
            "rank range {lo}..{hi} outside 0..{total}"
        )));
    }
    if lo == hi {
        return Ok(Vec::new());
    }
    let us = units(n);
    let phi = us.len() as u64;
    let mut buf = Vec::with_capacity(m);
    let mut out = Vec::new();
    let mut s = subset_at_rank(n - 1, m, lo);
    let mut rank = lo;
    loop {
        if is_canonical(&us, n, &s, &mut buf) {
            let stab = us
                .iter()
                .filter(|&&u| {
                    mapped_sorted(n, &s, u, &mut buf);
                    buf.as_slice() == s.as_slice()
                })
                .count() as u64;
            out.push((s.clone(), phi / stab));
        }
        rank += 1;
        if rank >= hi || !next_subset(&mut s, n - 1) {
            break;
        }
    }
    Ok(out)
}
