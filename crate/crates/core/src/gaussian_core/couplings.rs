use super::field::Role;
use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_abs_diff, max_imag, CMat};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Particle {
    Fermion,
    Boson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    State,
    Operation,
    Hamiltonian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub dr: Vec<i64>,
    pub block: CMat,
}

/// Finite stencil of (displacement, 2n x 2n block) pairs.
///
/// Blocks are checked at construction for the pairing between +dr and -dr and
/// the reality structure that the role requires:
/// fermion states are real with B(-dr) = -B(dr)^T, boson states real with
/// B(-dr) = B(dr)^T, operations real, Hamiltonians (Majorana form) purely
/// imaginary with B(-dr) = B(dr)^dag.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSpaceCouplings {
    pub n: usize,
    pub dim: usize,
    pub particle: Particle,
    pub kind: Kind,
    pub terms: Vec<Term>,
}

const PAIRING_TOL: f64 = 1e-10;

impl RealSpaceCouplings {
    pub fn new(
        n: usize,
        dim: usize,
        particle: Particle,
        kind: Kind,
        terms: Vec<Term>,
    ) -> Result<Self> {
        Self::unchecked(n, dim, particle, kind, terms)?.checked()
    }

    /// Merge duplicate displacements and check shapes, without the pairing check.
    pub fn unchecked(
        n: usize,
        dim: usize,
        particle: Particle,
        kind: Kind,
        terms: Vec<Term>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n must be positive".into()));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::Config(format!("dimension {dim} not in 1..=3")));
        }
        if particle == Particle::Boson && kind == Kind::Hamiltonian {
            return Err(Error::Unsupported("bosonic Hamiltonian stencils".into()));
        }
        let mut merged: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
        for t in terms {
            if t.dr.len() != dim {
                return Err(Error::Dimension(format!(
                    "displacement {:?} has {} components, expected {dim}",
                    t.dr,
                    t.dr.len()
                )));
            }
            if t.block.nrows() != 2 * n || t.block.ncols() != 2 * n {
                return Err(Error::Dimension(format!(
                    "block at {:?} is {}x{}, expected {}x{}",
                    t.dr,
                    t.block.nrows(),
                    t.block.ncols(),
                    2 * n,
                    2 * n
                )));
            }
            if !crate::linalg::is_finite(&t.block) {
                return Err(Error::Invalid(format!("non-finite block at {:?}", t.dr)));
            }
            match merged.get_mut(&t.dr) {
                Some(b) => *b += &t.block,
                None => {
                    merged.insert(t.dr, t.block);
                }
            }
        }
        let terms = merged
            .into_iter()
            .map(|(dr, block)| Term { dr, block })
            .collect();
        Ok(RealSpaceCouplings { n, dim, particle, kind, terms })
    }

    fn checked(self) -> Result<Self> {
        let v = self.pairing_violation();
        if v > PAIRING_TOL * self.scale().max(1.0) {
            return Err(Error::Invalid(format!(
                "{:?} {:?} stencil violates its +dr/-dr pairing or reality by {v:.3e}",
                self.particle, self.kind
            )));
        }
        Ok(self)
    }

    pub fn role(&self) -> Role {
        Role::from_parts(self.particle, self.kind)
    }

    pub fn scale(&self) -> f64 {
        self.terms.iter().fold(0.0, |a, t| a.max(max_abs(&t.block)))
    }

    pub fn block(&self, dr: &[i64]) -> Option<&CMat> {
        self.terms.iter().find(|t| t.dr == dr).map(|t| &t.block)
    }

    /// Largest |dr_mu| over the stencil.
    pub fn range(&self) -> i64 {
        self.terms
            .iter()
            .flat_map(|t| t.dr.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Max violation of the role's pairing and reality requirements.
    pub fn pairing_violation(&self) -> f64 {
        let zero = CMat::zeros(2 * self.n, 2 * self.n);
        let mut worst: f64 = 0.0;
        for t in &self.terms {
            let neg: Vec<i64> = t.dr.iter().map(|x| -x).collect();
            let partner = self.block(&neg).unwrap_or(&zero);
            let (pair, real) = match self.role() {
                Role::FermionState => (
                    max_abs_diff(partner, &(-t.block.transpose())),
                    max_imag(&t.block),
                ),
                Role::BosonState => (
                    max_abs_diff(partner, &t.block.transpose()),
                    max_imag(&t.block),
                ),
                Role::FermionOp | Role::BosonOp => (0.0, max_imag(&t.block)),
                Role::Hamiltonian => (
                    max_abs_diff(partner, &t.block.adjoint()),
                    t.block.iter().fold(0.0f64, |a, z| a.max(z.re.abs())),
                ),
            };
            worst = worst.max(pair).max(real);
        }
        worst
    }

    /// Drop the imaginary (real, for Hamiltonians) rounding residue left by
    /// numerical inverse transforms.
    pub fn clean_reality(&mut self) {
        let ham = self.kind == Kind::Hamiltonian;
        for t in &mut self.terms {
            t.block = t.block.map(|z| {
                if ham {
                    crate::linalg::c(0.0, z.im)
                } else {
                    crate::linalg::c(z.re, 0.0)
                }
            });
        }
    }

    /// Terms scaled by a constant; used to build stencils from parts.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.block *= crate::linalg::c(s, 0.0);
        }
        out
    }

    /// Direct sum with another stencil of the same role, preserving an outer
    /// internal factor of size `outer` (1 for plain stacking, 2 for spinful
    /// layouts, 4 for spin (x) pseudo-spin).
    pub fn direct_sum(&self, other: &Self, outer: usize) -> Result<Self> {
        if self.role() != other.role() || self.dim != other.dim {
            return Err(Error::Dimension("direct sum of incompatible stencils".into()));
        }
        let (ia, ib) = super::ops::sum_embedding(self.n, other.n, outer)?;
        let n = self.n + other.n;
        let mut terms = Vec::new();
        for (src, idx) in [(self, &ia), (other, &ib)] {
            for t in &src.terms {
                let mut b = CMat::zeros(2 * n, 2 * n);
                for r in 0..t.block.nrows() {
                    for c in 0..t.block.ncols() {
                        b[(idx[r], idx[c])] = t.block[(r, c)];
                    }
                }
                terms.push(Term { dr: t.dr.clone(), block: b });
            }
        }
        RealSpaceCouplings::new(n, self.dim, self.particle, self.kind, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CMat};

    fn blk(v: [f64; 4]) -> CMat {
        CMat::from_row_slice(2, 2, &v.map(|x| c(x, 0.0)))
    }

    #[test]
    fn merges_duplicate_displacements() {
        let t = |v| Term { dr: vec![0], block: blk(v) };
        let s = RealSpaceCouplings::new(
            1,
            1,
            Particle::Fermion,
            Kind::Operation,
            vec![t([1.0, 0.0, 0.0, 0.0]), t([0.0, 0.0, 0.0, 1.0])],
        )
        .unwrap();
        assert_eq!(s.terms.len(), 1);
        assert_eq!(s.terms[0].block, blk([1.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn rejects_unpaired_state_terms() {
        let s = RealSpaceCouplings::new(
            1,
            1,
            Particle::Fermion,
            Kind::State,
            vec![Term { dr: vec![1], block: blk([0.0, 1.0, 0.0, 0.0]) }],
        );
        assert!(s.is_err());
    }

    #[test]
    fn rejects_wrong_shapes() {
        let s = RealSpaceCouplings::new(
            2,
            1,
            Particle::Fermion,
            Kind::Operation,
            vec![Term { dr: vec![0], block: blk([1.0, 0.0, 0.0, 1.0]) }],
        );
        assert!(matches!(s, Err(Error::Dimension(_))));
    }
}
