//! The degree engine: enumerate nonnegative lattice points of each total
//! degree and find the full-rank degree (gamma) and generation degree
//! (beta) of the representation lattice, with witnesses and a per-degree
//! rank/index trace.
//!
//! Enumeration is depth-first over compositions of the degree, pruned by
//! per-prefix residue feasibility: for each suffix length and remaining
//! budget, the set of reachable residue vectors is precomputed, so the
//! search only descends into prefixes that can still be completed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::groups::CharacterSet;
use crate::lattice::ReprLattice;
use crate::linalg::HnfBasis;
use crate::{Error, Result};

/// One row of the degree trace: what the points of degree exactly `degree`
/// contributed to the accumulated sublattice.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DegreeTraceRow {
    pub degree: u64,
    /// Lattice points of degree exactly `degree`.
    pub new_points: usize,
    /// Rank of the sublattice generated by all points of degree <= `degree`.
    pub rank: usize,
    /// Index of that sublattice in the full lattice, once the rank is full.
    /// Value 1 means generated.
    pub index_in_l: Option<BigInt>,
}

#[derive(Clone, Debug)]
pub struct DegreeResult {
    pub gamma: u64,
    pub beta: u64,
    /// `m` linearly independent nonnegative points of degree <= gamma,
    /// greedily chosen in encounter order.
    pub witnesses_gamma: Vec<Vec<u64>>,
    /// A generating set of nonnegative points of degree <= beta: the
    /// encountered points filtered to those that grew the sublattice.
    pub witnesses_beta: Vec<Vec<u64>>,
    pub trace: Vec<DegreeTraceRow>,
}

/// Result of a capped run: either the full answer, or how far it got
/// before hitting a user-imposed degree cap.
#[derive(Clone, Debug)]
pub enum DegreeOutcome {
    Complete(DegreeResult),
    CapReached {
        cap: u64,
        gamma: Option<u64>,
        trace: Vec<DegreeTraceRow>,
    },
}

/// All points `a` in `N^m` with `sum(a) = d` lying in the lattice, in
/// lexicographic order.
pub fn points_of_degree(lat: &ReprLattice, d: u64) -> Vec<Vec<u64>> {
    Enumerator::new(lat).points_of_degree(d)
}

/// Gamma and beta of the support, by accumulating simplex slices degree by
/// degree. The loop starts at degree 2 (no nontrivial character admits a
/// degree-1 invariant) and is capped by |G|, the non-modular Noether bound;
/// passing the cap is impossible for correct inputs and reported as a bug.
pub fn degree_invariants(s: &CharacterSet) -> Result<DegreeResult> {
    match degree_invariants_capped(s, None)? {
        DegreeOutcome::Complete(r) => Ok(r),
        DegreeOutcome::CapReached { .. } => unreachable!("no cap was set"),
    }
}

/// Same as [`degree_invariants`], stopping early at `max_degree` when given.
pub fn degree_invariants_capped(
    s: &CharacterSet,
    max_degree: Option<u64>,
) -> Result<DegreeOutcome> {
    let lat = ReprLattice::build(s.clone());
    let m = lat.ambient_rank();
    let order = s.group().order();
    let mut en = Enumerator::new(&lat);
    debug_assert!(en.points_of_degree(1).is_empty());

    let mut acc = HnfBasis::empty(m);
    let mut trace = Vec::new();
    let mut all_points: Vec<Vec<u64>> = Vec::new();
    let mut gamma = None;
    let mut d: u64 = 2;
    loop {
        if d as u128 > order {
            return Err(Error::Diverged { degree: d });
        }
        if let Some(cap) = max_degree {
            if d > cap {
                return Ok(DegreeOutcome::CapReached { cap, gamma, trace });
            }
        }
        let pts = en.points_of_degree(d);
        for p in &pts {
            acc.insert(&to_bigints(p))?;
        }
        let rank = acc.rank();
        let index_in_l = if rank == m {
            Some(relative_index(&acc, &lat)?)
        } else {
            None
        };
        if gamma.is_none() && rank == m {
            gamma = Some(d);
        }
        let generated = index_in_l.as_ref().is_some_and(One::is_one);
        trace.push(DegreeTraceRow {
            degree: d,
            new_points: pts.len(),
            rank,
            index_in_l,
        });
        all_points.extend(pts);
        if generated {
            let gamma = gamma.expect("full rank precedes generation");
            let witnesses_gamma = rank_witnesses(m, &all_points);
            let witnesses_beta = generating_witnesses(m, &all_points, lat.basis())?;
            return Ok(DegreeOutcome::Complete(DegreeResult {
                gamma,
                beta: d,
                witnesses_gamma,
                witnesses_beta,
                trace,
            }));
        }
        d += 1;
    }
}

/// Trace rows for every degree `1..=d_max`, regardless of where beta falls.
pub fn generation_profile(s: &CharacterSet, d_max: u64) -> Vec<DegreeTraceRow> {
    let lat = ReprLattice::build(s.clone());
    let m = lat.ambient_rank();
    let mut en = Enumerator::new(&lat);
    let mut acc = HnfBasis::empty(m);
    let mut trace = Vec::new();
    for d in 1..=d_max {
        let pts = en.points_of_degree(d);
        for p in &pts {
            acc.insert(&to_bigints(p))
                .expect("enumerated points have ambient length");
        }
        let rank = acc.rank();
        let index_in_l = if rank == m {
            Some(relative_index(&acc, &lat).expect("accumulated basis is full rank"))
        } else {
            None
        };
        trace.push(DegreeTraceRow {
            degree: d,
            new_points: pts.len(),
            rank,
            index_in_l,
        });
    }
    trace
}

fn to_bigints(p: &[u64]) -> Vec<BigInt> {
    p.iter().map(|&x| BigInt::from(x)).collect()
}

// [L : acc]; exact because acc is a sublattice of L.
fn relative_index(acc: &HnfBasis, lat: &ReprLattice) -> Result<BigInt> {
    let (q, r) = acc.det_index()?.div_rem(lat.index());
    debug_assert!(r.is_zero(), "accumulated lattice escaped L");
    Ok(q)
}

fn rank_witnesses(m: usize, points: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut b = HnfBasis::empty(m);
    let mut out = Vec::with_capacity(m);
    for p in points {
        let before = b.rank();
        b.insert(&to_bigints(p)).expect("witness has ambient length");
        if b.rank() > before {
            out.push(p.clone());
            if out.len() == m {
                break;
            }
        }
    }
    out
}

fn generating_witnesses(
    m: usize,
    points: &[Vec<u64>],
    target: &HnfBasis,
) -> Result<Vec<Vec<u64>>> {
    let mut b = HnfBasis::empty(m);
    let mut out = Vec::new();
    for p in points {
        if b.insert(&to_bigints(p))? {
            out.push(p.clone());
        }
    }
    if &b != target {
        return Err(Error::Internal(
            "generating witnesses do not span the lattice".into(),
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Simplex slice enumeration
// ---------------------------------------------------------------------------

// Residue-space sizes up to this many elements get full feasibility tables.
const PRUNE_G_LIMIT: usize = 4096;
const PRUNE_M_LIMIT: usize = 64;
const PRUNE_BYTES_LIMIT: usize = 256 << 20;

struct Enumerator {
    m: usize,
    moduli: Vec<u64>,
    chars: Vec<Vec<u64>>, // m rows of k residues
    prune: Option<Prune>,
}

type Bitset = Vec<u64>;

fn bs_new(words: usize) -> Bitset {
    vec![0u64; words]
}

fn bs_set(b: &mut Bitset, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn bs_get(b: &Bitset, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

// dst |= permuted(src)
fn bs_or_permuted(dst: &mut Bitset, src: &Bitset, perm: &[u32]) {
    for (w, &word) in src.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let bit = word.trailing_zeros() as usize;
            bs_set(dst, perm[w * 64 + bit] as usize);
            word &= word - 1;
        }
    }
}

// Reachability tables over the residue space (mixed-radix indexed):
// reach[j][t] is the set of residues expressible by coordinates j..m-1
// with total degree exactly t. Extended lazily as degrees grow.
struct Prune {
    words: usize,
    strides: Vec<usize>,
    perms: Vec<Vec<u32>>, // per character: residue index -> index + char
    neg: Vec<u32>,
    reach: Vec<Vec<Bitset>>, // (m+1) x (t_built+1)
    t_built: u64,
}

impl Prune {
    fn build(m: usize, moduli: &[u64], chars: &[Vec<u64>]) -> Option<Prune> {
        if m > PRUNE_M_LIMIT {
            return None;
        }
        let mut g: usize = 1;
        for &n in moduli {
            g = g.checked_mul(usize::try_from(n).ok()?)?;
            if g > PRUNE_G_LIMIT {
                return None;
            }
        }
        let words = g.div_ceil(64);
        let mut strides = vec![1usize; moduli.len()];
        for i in 1..moduli.len() {
            strides[i] = strides[i - 1] * moduli[i - 1] as usize;
        }
        let decompose = |idx: usize| -> Vec<u64> {
            moduli
                .iter()
                .zip(&strides)
                .map(|(&n, &s)| (idx / s % n as usize) as u64)
                .collect()
        };
        let compose = |res: &[u64]| -> usize {
            res.iter()
                .zip(&strides)
                .map(|(&r, &s)| r as usize * s)
                .sum()
        };
        let perms = chars
            .iter()
            .map(|c| {
                (0..g)
                    .map(|idx| {
                        let r = decompose(idx);
                        let sum: Vec<u64> = r
                            .iter()
                            .zip(c)
                            .zip(moduli)
                            .map(|((&a, &b), &n)| (a + b) % n)
                            .collect();
                        compose(&sum) as u32
                    })
                    .collect()
            })
            .collect();
        let neg = (0..g)
            .map(|idx| {
                let r = decompose(idx);
                let negated: Vec<u64> = r
                    .iter()
                    .zip(moduli)
                    .map(|(&a, &n)| if a == 0 { 0 } else { n - a })
                    .collect();
                compose(&negated) as u32
            })
            .collect();
        let mut zero_only = bs_new(words);
        bs_set(&mut zero_only, 0);
        let reach = vec![vec![zero_only]; m + 1];
        Some(Prune {
            words,
            strides,
            perms,
            neg,
            reach,
            t_built: 0,
        })
    }

    // Returns false if extending would blow the memory cap; the caller then
    // falls back to unpruned enumeration.
    fn extend_to(&mut self, m: usize, d: u64) -> bool {
        let projected = (m + 1) * (d as usize + 1) * self.words * 8;
        if projected > PRUNE_BYTES_LIMIT {
            return false;
        }
        while self.t_built < d {
            let t = (self.t_built + 1) as usize;
            self.reach[m].push(bs_new(self.words));
            for j in (0..m).rev() {
                let mut next = self.reach[j + 1][t].clone();
                let prev = &self.reach[j][t - 1];
                bs_or_permuted(&mut next, prev, &self.perms[j]);
                self.reach[j].push(next);
            }
            self.t_built += 1;
        }
        true
    }

    fn index_of(&self, residues: &[u64]) -> usize {
        residues
            .iter()
            .zip(&self.strides)
            .map(|(&r, &s)| r as usize * s)
            .sum()
    }
}

impl Enumerator {
    fn new(lat: &ReprLattice) -> Enumerator {
        let support = lat.support();
        let m = support.len();
        let moduli = support.group().moduli().to_vec();
        let chars: Vec<Vec<u64>> = support
            .chars()
            .iter()
            .map(|c| c.residues().to_vec())
            .collect();
        let prune = Prune::build(m, &moduli, &chars);
        Enumerator {
            m,
            moduli,
            chars,
            prune,
        }
    }

    fn points_of_degree(&mut self, d: u64) -> Vec<Vec<u64>> {
        if let Some(pr) = &mut self.prune {
            if !pr.extend_to(self.m, d) {
                self.prune = None;
            }
        }
        let mut out = Vec::new();
        let mut point = vec![0u64; self.m];
        let mut partial = vec![0u64; self.moduli.len()];
        self.dfs(0, d, &mut point, &mut partial, &mut out);
        out
    }

    fn dfs(
        &self,
        j: usize,
        remaining: u64,
        point: &mut Vec<u64>,
        partial: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if j == self.m - 1 {
            let closes = self
                .moduli
                .iter()
                .zip(&self.chars[j])
                .zip(partial.iter())
                .all(|((&n, &a), &acc)| {
                    (acc as u128 + remaining as u128 % n as u128 * (a as u128))
                        .is_multiple_of(n as u128)
                });
            if closes {
                point[j] = remaining;
                out.push(point.clone());
            }
            return;
        }
        if let Some(pr) = &self.prune {
            // the suffix j..m-1 must reach the negation of the partial sum
            let need = pr.neg[pr.index_of(partial)] as usize;
            if !bs_get(&pr.reach[j][remaining as usize], need) {
                return;
            }
        }
        for c in 0..=remaining {
            point[j] = c;
            self.dfs(j + 1, remaining - c, point, partial, out);
            if c < remaining {
                for (acc, (&a, &n)) in
                    partial.iter_mut().zip(self.chars[j].iter().zip(&self.moduli))
                {
                    *acc = (*acc + a) % n;
                }
            }
        }
        // undo the `remaining` additions of chars[j]
        for (acc, (&a, &n)) in partial
            .iter_mut()
            .zip(self.chars[j].iter().zip(&self.moduli))
        {
            let add = (n - a % n) % n;
            let total = (remaining % n) as u128 * add as u128 % n as u128;
            *acc = ((*acc as u128 + total) % n as u128) as u64;
        }
    }
}
