//! Exact integer matrix algebra: Hermite normal form, Smith invariant
//! factors, lattice indices, and kernels of congruence systems.
//!
//! Everything is arbitrary precision. The transform entries of a Hermite
//! reduction can exceed 64 bits even for small inputs, and a silent
//! overflow here would poison every downstream degree computation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Dense row-major matrix over the integers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let nr = rows.len();
        IntMatrix {
            rows: nr,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            cols,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }
}

// dst -= q * src
fn row_sub_mul(dst: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= q * s;
    }
}

/// Canonical Hermite-normal-form basis of an integer row lattice.
///
/// Row-style upper echelon: pivot entries are positive, entries above a
/// pivot are reduced into `[0, pivot)`, pivot columns strictly increase,
/// and there are no zero rows. Two generating sets of the same lattice
/// always produce identical `HnfBasis` values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HnfBasis {
    ambient: usize,
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl HnfBasis {
    /// The zero lattice inside `Z^ambient`.
    pub fn empty(ambient: usize) -> Self {
        HnfBasis {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.rows.clone(), self.ambient)
    }

    /// Index of the lattice in `Z^ambient`: the product of the pivots.
    pub fn det_index(&self) -> Result<BigInt> {
        if !self.is_full_rank() {
            return Err(Error::NotFullRank {
                rank: self.rank(),
                ambient: self.ambient,
            });
        }
        let mut d = BigInt::one();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            d *= &row[p];
        }
        Ok(d)
    }

    /// Adjoin `Z*v` to the lattice, keeping the basis canonical.
    /// Returns whether the lattice actually grew.
    pub fn insert(&mut self, v: &[BigInt]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        let mut v = v.to_vec();
        let mut changed = false;
        let mut col = 0;
        while col < self.ambient {
            if v[col].is_zero() {
                col += 1;
                continue;
            }
            match self.pivots.binary_search(&col) {
                Ok(i) => {
                    let (q, r) = v[col].div_rem(&self.rows[i][col]);
                    if r.is_zero() {
                        row_sub_mul(&mut v, &self.rows[i], &q);
                    } else {
                        // Replace the pivot row by the gcd combination and
                        // cancel v's entry in this column.
                        let a = self.rows[i][col].clone();
                        let b = v[col].clone();
                        let eg = a.extended_gcd(&b);
                        let au = &a / &eg.gcd;
                        let bu = &b / &eg.gcd;
                        let old = std::mem::take(&mut self.rows[i]);
                        let mut new_row = Vec::with_capacity(self.ambient);
                        let mut new_v = Vec::with_capacity(self.ambient);
                        for (ro, vo) in old.iter().zip(&v) {
                            new_row.push(&eg.x * ro + &eg.y * vo);
                            new_v.push(&au * vo - &bu * ro);
                        }
                        debug_assert!(new_row[col] == eg.gcd && new_v[col].is_zero());
                        self.rows[i] = new_row;
                        v = new_v;
                        changed = true;
                    }
                }
                Err(pos) => {
                    if v[col].is_negative() {
                        for x in v.iter_mut() {
                            *x = -std::mem::take(x);
                        }
                    }
                    self.rows.insert(pos, v);
                    self.pivots.insert(pos, col);
                    changed = true;
                    break;
                }
            }
        }
        if changed {
            self.reduce_above_pivots();
        }
        Ok(changed)
    }

    // Restore the canonical reduction: every entry above a pivot in [0, pivot).
    fn reduce_above_pivots(&mut self) {
        for i in 1..self.rows.len() {
            let (head, tail) = self.rows.split_at_mut(i);
            let pivot_row = &tail[0];
            let pc = self.pivots[i];
            for e in head.iter_mut() {
                let q = e[pc].div_floor(&pivot_row[pc]);
                row_sub_mul(e, pivot_row, &q);
            }
        }
    }

    /// Exact membership test by triangular reduction.
    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        let mut v = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            if !v[pc].is_zero() {
                let (q, r) = v[pc].div_rem(&row[pc]);
                if !r.is_zero() {
                    return Ok(false);
                }
                row_sub_mul(&mut v, row, &q);
            }
        }
        Ok(v.iter().all(Zero::is_zero))
    }
}

/// Canonical HNF of the row lattice of `m`.
pub fn hnf(m: &IntMatrix) -> HnfBasis {
    let mut basis = HnfBasis::empty(m.cols());
    for i in 0..m.rows() {
        basis
            .insert(m.row(i))
            .expect("row length equals ambient by construction");
    }
    basis
}

/// Canonical HNF of `lattice(b) + Z*v`.
pub fn hnf_insert(b: &HnfBasis, v: &[BigInt]) -> Result<HnfBasis> {
    let mut b = b.clone();
    b.insert(v)?;
    Ok(b)
}

/// Smith-normal-form invariant factors d_1 | d_2 | ... | d_r of `m`,
/// zero factors omitted.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let (nr, nc) = (m.rows(), m.cols());
    let mut a = m.row_vecs();
    let mut t = 0;
    while t < nr.min(nc) {
        // Move a nonzero entry of the trailing submatrix to (t, t).
        let Some((pi, pj)) = (t..nr)
            .flat_map(|i| (t..nc).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_zero())
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            for i in t + 1..nr {
                if !a[i][t].is_zero() {
                    gcd_combine_rows(&mut a, t, i);
                }
            }
            for j in t + 1..nc {
                if !a[t][j].is_zero() {
                    gcd_combine_cols(&mut a, t, j);
                }
            }
            // Column elimination can reintroduce entries below the pivot.
            if (t + 1..nr).all(|i| a[i][t].is_zero()) {
                break;
            }
        }
        t += 1;
    }
    let mut d: Vec<BigInt> = (0..t).map(|i| a[i][i].abs()).filter(|x| !x.is_zero()).collect();
    // diag(a, b) has invariant factors (gcd, lcm); sweep until divisibility holds
    loop {
        let mut stable = true;
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                if !(&d[j] % &d[i]).is_zero() {
                    let g = d[i].gcd(&d[j]);
                    let l = &d[i] * &d[j] / &g;
                    d[i] = g;
                    d[j] = l;
                    stable = false;
                }
            }
        }
        if stable {
            break;
        }
    }
    d
}

// Zero a[i][t] against pivot a[t][t] by a unimodular two-row operation.
fn gcd_combine_rows(a: &mut [Vec<BigInt>], t: usize, i: usize) {
    let (q, r) = a[i][t].div_rem(&a[t][t]);
    if r.is_zero() {
        let (head, tail) = a.split_at_mut(i);
        row_sub_mul(&mut tail[0], &head[t], &q);
        return;
    }
    let eg = a[t][t].extended_gcd(&a[i][t]);
    let au = &a[t][t] / &eg.gcd;
    let bu = &a[i][t] / &eg.gcd;
    let (head, tail) = a.split_at_mut(i);
    for (top, bot) in head[t].iter_mut().zip(tail[0].iter_mut()) {
        let (t0, b0) = (top.clone(), bot.clone());
        *top = &eg.x * &t0 + &eg.y * &b0;
        *bot = &au * &b0 - &bu * &t0;
    }
}

fn gcd_combine_cols(a: &mut [Vec<BigInt>], t: usize, j: usize) {
    let (q, r) = a[t][j].div_rem(&a[t][t]);
    if r.is_zero() {
        for row in a.iter_mut() {
            let s = &row[t] * &q;
            row[j] -= s;
        }
        return;
    }
    let eg = a[t][t].extended_gcd(&a[t][j]);
    let au = &a[t][t] / &eg.gcd;
    let bu = &a[t][j] / &eg.gcd;
    for row in a.iter_mut() {
        let left = row[t].clone();
        let right = row[j].clone();
        row[t] = &eg.x * &left + &eg.y * &right;
        row[j] = &au * &right - &bu * &left;
    }
}

/// A system of linear congruences, one modulus per row:
/// `sum_j coeffs[i][j] * a_j = 0 (mod moduli[i])`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CongruenceSystem {
    coeffs: IntMatrix,
    moduli: Vec<BigInt>,
}

impl CongruenceSystem {
    /// Coefficients are reduced rowwise into `[0, moduli[i])`.
    pub fn new(coeffs: IntMatrix, moduli: Vec<BigInt>) -> Result<Self> {
        if moduli.len() != coeffs.rows() {
            return Err(Error::BadInput(format!(
                "{} moduli for {} congruence rows",
                moduli.len(),
                coeffs.rows()
            )));
        }
        if let Some(bad) = moduli.iter().find(|n| **n < BigInt::one()) {
            return Err(Error::BadInput(format!("modulus {bad} is not positive")));
        }
        let mut coeffs = coeffs;
        for (i, n) in moduli.iter().enumerate() {
            for j in 0..coeffs.cols() {
                let r = coeffs.at(i, j).mod_floor(n);
                coeffs.set(i, j, r);
            }
        }
        Ok(CongruenceSystem { coeffs, moduli })
    }

    pub fn num_vars(&self) -> usize {
        self.coeffs.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn coeffs(&self) -> &IntMatrix {
        &self.coeffs
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    /// Do all congruences hold at `a`?
    pub fn holds(&self, a: &[BigInt]) -> Result<bool> {
        if a.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                got: a.len(),
            });
        }
        for i in 0..self.num_rows() {
            let mut acc = BigInt::zero();
            for (j, x) in a.iter().enumerate() {
                acc += self.coeffs.at(i, j) * x;
            }
            if !acc.mod_floor(&self.moduli[i]).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Full-rank HNF basis of the solution lattice of a congruence system.
///
/// The solutions of `C a = 0 (mod n, rowwise)` are the projection to the
/// `a`-block of the integer kernel of `(a, t) -> C a + diag(n) t`. The
/// kernel is read off the transform rows of an echelon reduction; full
/// rank is guaranteed because `n_i e_j` always solves the system.
pub fn kernel_of_congruences(sys: &CongruenceSystem) -> HnfBasis {
    let m = sys.num_vars();
    let k = sys.num_rows();
    // (m + k) x k: rows j < m carry the j-th variable's coefficients,
    // rows m + i carry diag(moduli).
    let mut b = IntMatrix::zeros(m + k, k);
    for i in 0..k {
        for j in 0..m {
            b.set(j, i, sys.coeffs.at(i, j).clone());
        }
        b.set(m + i, i, sys.moduli[i].clone());
    }
    let (u, rank) = echelon_with_transform(&mut b);
    let mut basis = HnfBasis::empty(m);
    for i in rank..m + k {
        basis
            .insert(&u.row(i)[..m])
            .expect("kernel row has ambient length");
    }
    debug_assert!(basis.is_full_rank());
    basis
}

// Row echelon via unimodular operations, tracking the transform U with
// U * b_in = b_out. Returns (U, rank); kernel rows of b_in are U[rank..].
fn echelon_with_transform(b: &mut IntMatrix) -> (IntMatrix, usize) {
    let n = b.rows();
    let c = b.cols();
    let mut bw = b.row_vecs();
    let mut uw = IntMatrix::identity(n).row_vecs();
    let mut pr = 0;
    for col in 0..c {
        let Some(pivot) = (pr..n).find(|&i| !bw[i][col].is_zero()) else {
            continue;
        };
        bw.swap(pr, pivot);
        uw.swap(pr, pivot);
        for i in pr + 1..n {
            if bw[i][col].is_zero() {
                continue;
            }
            let (q, r) = bw[i][col].div_rem(&bw[pr][col]);
            if r.is_zero() {
                let (bh, bt) = bw.split_at_mut(i);
                row_sub_mul(&mut bt[0], &bh[pr], &q);
                let (uh, ut) = uw.split_at_mut(i);
                row_sub_mul(&mut ut[0], &uh[pr], &q);
            } else {
                let eg = bw[pr][col].extended_gcd(&bw[i][col]);
                let au = &bw[pr][col] / &eg.gcd;
                let bu = &bw[i][col] / &eg.gcd;
                for w in [&mut bw, &mut uw] {
                    let (head, tail) = w.split_at_mut(i);
                    for (top, bot) in head[pr].iter_mut().zip(tail[0].iter_mut()) {
                        let (t0, b0) = (top.clone(), bot.clone());
                        *top = &eg.x * &t0 + &eg.y * &b0;
                        *bot = &au * &b0 - &bu * &t0;
                    }
                }
            }
        }
        pr += 1;
    }
    *b = IntMatrix::from_rows(bw, c);
    (IntMatrix::from_rows(uw, n), pr)
}
