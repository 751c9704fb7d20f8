use super::couplings::{Kind, Particle};
use crate::bz_grid::BZGrid;
use crate::error::{Error, Result};
use crate::linalg::{eye, is_finite, max_abs_diff, CMat};
use crate::parallel;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    FermionState,
    BosonState,
    FermionOp,
    BosonOp,
    Hamiltonian,
}

impl Role {
    pub fn from_parts(particle: Particle, kind: Kind) -> Role {
        match (particle, kind) {
            (Particle::Fermion, Kind::State) => Role::FermionState,
            (Particle::Boson, Kind::State) => Role::BosonState,
            (Particle::Fermion, Kind::Operation) => Role::FermionOp,
            (Particle::Boson, Kind::Operation) => Role::BosonOp,
            (_, Kind::Hamiltonian) => Role::Hamiltonian,
        }
    }

    pub fn particle(self) -> Particle {
        match self {
            Role::BosonState | Role::BosonOp => Particle::Boson,
            _ => Particle::Fermion,
        }
    }

    pub fn kind(self) -> Kind {
        match self {
            Role::FermionState | Role::BosonState => Kind::State,
            Role::FermionOp | Role::BosonOp => Kind::Operation,
            Role::Hamiltonian => Kind::Hamiltonian,
        }
    }

    pub fn is_state(self) -> bool {
        self.kind() == Kind::State
    }

    pub fn is_op(self) -> bool {
        self.kind() == Kind::Operation
    }
}

/// One 2n x 2n complex matrix per grid point.
#[derive(Clone, Debug)]
pub struct MatrixField {
    pub grid: BZGrid,
    pub n: usize,
    pub role: Role,
    pub values: Vec<CMat>,
}

impl MatrixField {
    pub fn new(grid: BZGrid, n: usize, role: Role, values: Vec<CMat>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if v.nrows() != 2 * n || v.ncols() != 2 * n {
                return Err(Error::Dimension(format!(
                    "value {i} is {}x{}, expected {}x{}",
                    v.nrows(),
                    v.ncols(),
                    2 * n,
                    2 * n
                )));
            }
            if !is_finite(v) {
                return Err(Error::Invalid(format!("non-finite entry at grid point {i}")));
            }
        }
        Ok(MatrixField { grid, n, role, values })
    }

    /// Evaluate `f(k)` at every grid point.
    pub fn from_fn<F>(grid: &BZGrid, n: usize, role: Role, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> CMat + Sync + Send,
    {
        let values = parallel::map(grid.len(), |i| f(&grid.k(i)));
        MatrixField::new(grid.clone(), n, role, values)
    }

    pub fn constant(grid: &BZGrid, n: usize, role: Role, m: &CMat) -> Result<Self> {
        MatrixField::new(grid.clone(), n, role, vec![m.clone(); grid.len()])
    }

    pub fn fermion_vacuum(grid: &BZGrid, n: usize) -> Self {
        MatrixField::constant(grid, n, Role::FermionState, &super::fermion_vacuum_block(n))
            .expect("shape is consistent by construction")
    }

    pub fn identity(grid: &BZGrid, n: usize, role: Role) -> Self {
        MatrixField::constant(grid, n, role, &eye(2 * n))
            .expect("shape is consistent by construction")
    }

    pub fn at(&self, idx: usize) -> &CMat {
        &self.values[idx]
    }

    pub fn at_neg(&self, idx: usize) -> &CMat {
        &self.values[self.grid.negate_index(idx)]
    }

    /// Pointwise map producing a field of the given role.
    pub fn map<F>(&self, role: Role, f: F) -> Result<Self>
    where
        F: Fn(usize, &CMat) -> CMat + Sync + Send,
    {
        let values = parallel::map(self.grid.len(), |i| f(i, &self.values[i]));
        let n = values.first().map_or(self.n, |v| v.nrows() / 2);
        MatrixField::new(self.grid.clone(), n, role, values)
    }

    pub fn max_deviation_from_constant(&self) -> f64 {
        let first = &self.values[0];
        self.values
            .iter()
            .fold(0.0, |a, v| a.max(max_abs_diff(v, first)))
    }

    pub fn max_diff(&self, other: &MatrixField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |a, (x, y)| a.max(max_abs_diff(x, y)))
    }
}
