//! The representation lattice of a character set: the exponent vectors of
//! invariant Laurent monomials, i.e. the integer solutions of the defining
//! congruence system. Its index in `Z^m` equals the order of the subgroup
//! generated by the support (= |G| exactly when the support is faithful).

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::groups::CharacterSet;
use crate::linalg::{kernel_of_congruences, CongruenceSystem, HnfBasis, IntMatrix};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct ReprLattice {
    support: CharacterSet,
    basis: HnfBasis,
    index: BigInt,
    system: CongruenceSystem,
    // congruence rows in machine integers for the enumeration hot path
    fast_rows: Vec<Vec<u64>>,
    fast_moduli: Vec<u64>,
}

impl ReprLattice {
    /// Solve the defining system: one congruence row per cyclic factor,
    /// one column per character.
    pub fn build(support: CharacterSet) -> ReprLattice {
        let m = support.len();
        let k = support.group().num_factors();
        let mut coeffs = IntMatrix::zeros(k, m);
        let mut fast_rows = vec![vec![0u64; m]; k];
        for (j, c) in support.chars().iter().enumerate() {
            for (i, &r) in c.residues().iter().enumerate() {
                coeffs.set(i, j, BigInt::from(r));
                fast_rows[i][j] = r;
            }
        }
        let moduli: Vec<BigInt> = support
            .group()
            .moduli()
            .iter()
            .map(|&n| BigInt::from(n))
            .collect();
        let fast_moduli = support.group().moduli().to_vec();
        let system = CongruenceSystem::new(coeffs, moduli)
            .expect("moduli count matches congruence rows");
        let basis = kernel_of_congruences(&system);
        let index = basis
            .det_index()
            .expect("congruence kernels are always full rank");
        ReprLattice {
            support,
            basis,
            index,
            system,
            fast_rows,
            fast_moduli,
        }
    }

    pub fn support(&self) -> &CharacterSet {
        &self.support
    }

    pub fn ambient_rank(&self) -> usize {
        self.basis.ambient()
    }

    pub fn basis(&self) -> &HnfBasis {
        &self.basis
    }

    /// Index of the lattice in `Z^m`; equals the image order of the support.
    pub fn index(&self) -> &BigInt {
        &self.index
    }

    pub fn index_u128(&self) -> u128 {
        self.index
            .to_u128()
            .expect("lattice index divides the group order")
    }

    pub fn is_faithful(&self) -> bool {
        self.index_u128() == self.support.group().order()
    }

    pub fn system(&self) -> &CongruenceSystem {
        &self.system
    }

    /// Membership via the defining congruences: k modular dot products,
    /// much cheaper than a triangular solve during enumeration.
    pub fn contains_point(&self, a: &[i64]) -> Result<bool> {
        if a.len() != self.ambient_rank() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_rank(),
                got: a.len(),
            });
        }
        Ok(self
            .fast_rows
            .iter()
            .zip(&self.fast_moduli)
            .all(|(row, &n)| {
                let mut acc: u128 = 0;
                for (&c, &x) in row.iter().zip(a) {
                    let x = x.rem_euclid(n as i64) as u128;
                    acc = (acc + c as u128 * x) % n as u128;
                }
                acc == 0
            }))
    }

    /// Membership via the HNF basis; used to cross-check `contains_point`.
    pub fn contains_via_basis(&self, a: &[i64]) -> Result<bool> {
        let v: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        self.basis.contains(&v)
    }
}
