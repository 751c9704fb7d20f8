//! Model zoo: real-space stencils for the standard examples plus random
//! symmetric generators for property tests.

mod random;

pub use random::{
    base_map_3d, random_boson_op_field, random_boson_state_field, random_op_field,
    random_state, random_state_field, random_unitary_field, random_winding_unitary_3d, symmetry_group,
    RandomSpec,
};

use crate::bz_grid::BZGrid;
use crate::error::{Error, Result};
use crate::gaussian_core::{
    fourier, ground_state_covariance, inverse_fourier, Kind, MatrixField, Particle,
    RealSpaceCouplings, Term, DEFAULT_GAP_TOL,
};
use crate::linalg::{c, eye, kron, pauli, CMat, C64, ONE, ZERO};
use crate::symmetry::{AZClass, ReducedField, ReducedKind};
use std::collections::BTreeMap;

/// Number-conserving hopping T(k) or pairing D(k) written as a sum of
/// harmonics, M(k) = sum_dr M_dr e^{-i k.dr}, with n x n blocks.
#[derive(Clone, Debug)]
pub struct Harmonics {
    pub dim: usize,
    pub n: usize,
    pub terms: BTreeMap<Vec<i64>, CMat>,
}

impl Harmonics {
    pub fn new(dim: usize, n: usize) -> Self {
        Harmonics { dim, n, terms: BTreeMap::new() }
    }

    fn unit(&self, axis: usize, s: i64) -> Vec<i64> {
        let mut v = vec![0; self.dim];
        v[axis] = s;
        v
    }

    pub fn add(&mut self, dr: Vec<i64>, m: &CMat) -> &mut Self {
        let e = self.terms.entry(dr).or_insert_with(|| CMat::zeros(m.nrows(), m.ncols()));
        *e += m;
        self
    }

    pub fn constant(&mut self, m: &CMat) -> &mut Self {
        self.add(vec![0; self.dim], m)
    }

    /// m cos k_axis.
    pub fn cos(&mut self, axis: usize, m: &CMat) -> &mut Self {
        let h = m * c(0.5, 0.0);
        self.add(self.unit(axis, 1), &h);
        self.add(self.unit(axis, -1), &h)
    }

    /// m sin k_axis.
    pub fn sin(&mut self, axis: usize, m: &CMat) -> &mut Self {
        let h = m * c(0.0, -0.5);
        self.add(self.unit(axis, -1), &h);
        self.add(self.unit(axis, 1), &(-h))
    }

    pub fn get(&self, dr: &[i64]) -> CMat {
        self.terms.get(dr).cloned().unwrap_or_else(|| CMat::zeros(self.n, self.n))
    }
}

/// Majorana-form Hamiltonian stencil of the Bogoliubov-de Gennes operator
/// H(k) = [[T(k), D(k)], [D(k)^dag, -T(-k)*]], via h = -2 W^dag H W with
/// W = (1/2) [[1, i], [1, -i]] (x) 1_n.
pub fn bdg_couplings(t: &Harmonics, d: &Harmonics) -> Result<RealSpaceCouplings> {
    if t.dim != d.dim || t.n != d.n {
        return Err(Error::Dimension("hopping and pairing shapes differ".into()));
    }
    let n = t.n;
    let w = kron(
        &CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.0), c(0.0, -0.5)]),
        &eye(n),
    );
    let mut keys: Vec<Vec<i64>> = t.terms.keys().chain(d.terms.keys()).cloned().collect();
    keys.extend(keys.clone().into_iter().map(|k| k.iter().map(|x| -x).collect()));
    keys.sort();
    keys.dedup();
    let mut terms = Vec::new();
    for dr in keys {
        let neg: Vec<i64> = dr.iter().map(|x| -x).collect();
        let tt = t.get(&dr);
        let mut h = CMat::zeros(2 * n, 2 * n);
        h.view_mut((0, 0), (n, n)).copy_from(&tt);
        h.view_mut((0, n), (n, n)).copy_from(&d.get(&dr));
        h.view_mut((n, 0), (n, n)).copy_from(&d.get(&neg).adjoint());
        h.view_mut((n, n), (n, n)).copy_from(&(-tt.conjugate()));
        let block = w.adjoint() * h * &w * c(-2.0, 0.0);
        terms.push(Term { dr, block });
    }
    let mut s = RealSpaceCouplings::unchecked(n, t.dim, Particle::Fermion, Kind::Hamiltonian, terms)?;
    s.terms.retain(|t| crate::linalg::max_abs(&t.block) > 0.0);
    RealSpaceCouplings::new(s.n, s.dim, s.particle, s.kind, s.terms)
}

fn scalar(x: C64) -> CMat {
    CMat::from_element(1, 1, x)
}

/// Spinless p-wave wire; topological for |mu| < 2|t| when delta != 0.
pub fn kitaev_chain(mu: f64, t: f64, delta: f64) -> Result<RealSpaceCouplings> {
    let mut tk = Harmonics::new(1, 1);
    tk.constant(&scalar(c(-mu, 0.0))).cos(0, &scalar(c(-2.0 * t, 0.0)));
    let mut dk = Harmonics::new(1, 1);
    dk.add(vec![-1], &scalar(c(delta, 0.0))).add(vec![1], &scalar(c(-delta, 0.0)));
    bdg_couplings(&tk, &dk)
}

/// Spinless p + ip superconductor on the square lattice,
/// xi = -mu - 2t (cos kx + cos ky), D = delta (sin kx + i sin ky).
pub fn chiral_pip(mu: f64, t: f64, delta: f64) -> Result<RealSpaceCouplings> {
    let mut tk = Harmonics::new(2, 1);
    tk.constant(&scalar(c(-mu, 0.0)))
        .cos(0, &scalar(c(-2.0 * t, 0.0)))
        .cos(1, &scalar(c(-2.0 * t, 0.0)));
    let mut dk = Harmonics::new(2, 1);
    dk.sin(0, &scalar(c(delta, 0.0))).sin(1, &scalar(c(0.0, delta)));
    bdg_couplings(&tk, &dk)
}

/// Two-band hopping -[sin kx s_x + sin ky s_y + (m + cos kx + cos ky) s_z].
fn qwz_hopping(m: f64) -> Harmonics {
    let mut tk = Harmonics::new(2, 2);
    tk.sin(0, &(-pauli(1)))
        .sin(1, &(-pauli(2)))
        .constant(&(pauli(3) * c(-m, 0.0)))
        .cos(0, &(-pauli(3)))
        .cos(1, &(-pauli(3)));
    tk
}

/// Charge-conserving two-band Chern insulator; Chern number 1 for -2 < m < 0,
/// -1 for 0 < m < 2 and 0 for |m| > 2.
pub fn chern_insulator(m: f64) -> Result<RealSpaceCouplings> {
    let tk = qwz_hopping(m);
    bdg_couplings(&tk, &Harmonics::new(2, 2))
}

/// Conjugate copy h'(dr) = -V h(dr) V^T with V = sigma_z (x) 1, which flips the
/// sign of every Chern number.
pub fn time_reversed(h: &RealSpaceCouplings) -> Result<RealSpaceCouplings> {
    if h.kind != Kind::Hamiltonian {
        return Err(Error::Invalid("time_reversed takes a Hamiltonian stencil".into()));
    }
    let v = kron(&pauli(3), &eye(h.n));
    let terms = h
        .terms
        .iter()
        .map(|t| Term { dr: t.dr.clone(), block: -(&v * &t.block * &v) })
        .collect();
    RealSpaceCouplings::new(h.n, h.dim, h.particle, h.kind, terms)
}

/// Fermionic shift by `shift` sites along the first axis of a d = 1 chain:
/// V(k) = e^{i k shift} 1_{2n}.
pub fn lattice_translation(shift: i64, n: usize) -> Result<RealSpaceCouplings> {
    RealSpaceCouplings::new(
        n,
        1,
        Particle::Fermion,
        Kind::Operation,
        vec![Term { dr: vec![-shift], block: eye(2 * n) }],
    )
}

fn spin_blocks(up: &CMat, down: &CMat) -> CMat {
    let pu = (pauli(0) + pauli(3)) * c(0.5, 0.0);
    let pd = (pauli(0) - pauli(3)) * c(0.5, 0.0);
    kron(&pu, up) + kron(&pd, down)
}

/// Time-reversal-invariant insulator with n = 4 modes (spin (x) orbital): a
/// Chern block for spin up, its time-reversed partner for spin down, and an
/// optional Rashba coupling rashba (sin ky s_x - sin kx s_y) (x) tau_x.
pub fn qsh_model(m: f64, rashba: f64) -> Result<RealSpaceCouplings> {
    let up = qwz_hopping(m);
    let mut tk = Harmonics::new(2, 4);
    for (dr, b) in &up.terms {
        tk.add(dr.clone(), &spin_blocks(b, &b.conjugate()));
    }
    let r = c(rashba, 0.0);
    tk.sin(1, &(kron(&pauli(1), &pauli(1)) * r));
    tk.sin(0, &(kron(&pauli(2), &pauli(1)) * (-r)));
    bdg_couplings(&tk, &Harmonics::new(2, 4))
}

/// Cubic-lattice time-reversal-invariant insulator with n = 4:
/// T(k) = (m - sum cos k_i) s_0 tau_z + sum sin k_i s_i tau_x.
/// Strong phase for 1 < |m| < 3.
pub fn ti3d_model(m: f64) -> Result<RealSpaceCouplings> {
    let g0 = kron(&pauli(0), &pauli(3));
    let mut tk = Harmonics::new(3, 4);
    tk.constant(&(&g0 * c(m, 0.0)));
    for ax in 0..3 {
        tk.cos(ax, &(-&g0));
        tk.sin(ax, &kron(&pauli(ax + 1), &pauli(1)));
    }
    bdg_couplings(&tk, &Harmonics::new(3, 4))
}

/// Single-mode bosonic operation V(k) = e^{i w k} diag(e^r, e^{-r}): a squeezer
/// composed with a w-site translation. Its polar unitary part has winding w.
pub fn boson_squeezer_winding(w: i64, r: f64) -> Result<RealSpaceCouplings> {
    let d = CMat::from_row_slice(2, 2, &[c(r.exp(), 0.0), ZERO, ZERO, c((-r).exp(), 0.0)]);
    RealSpaceCouplings::new(1, 1, Particle::Boson, Kind::Operation, vec![Term { dr: vec![-w], block: d }])
}

fn seed_to_state(class: AZClass, grid: &BZGrid, n: usize, u: Vec<CMat>, range: usize) -> Result<RealSpaceCouplings> {
    let seed = ReducedField::new(ReducedKind::U, class, grid.clone(), n, u, None)?;
    let (state, _) = crate::disentangle::build_disentangler_bdg(&seed)?;
    let s = inverse_fourier(&state, range)?;
    RealSpaceCouplings::new(s.n, s.dim, s.particle, s.kind, s.terms)
}

/// Class DIII wire with n = 2 generated from the seed u(k) = diag(e^{ik}, 1);
/// its sewing-matrix index is nontrivial.
pub fn diii_wire() -> Result<RealSpaceCouplings> {
    let grid = BZGrid::cubic(1, 8)?;
    let u = grid
        .points()
        .iter()
        .map(|k| CMat::from_row_slice(2, 2, &[C64::from_polar(1.0, k[0]), ZERO, ZERO, ONE]))
        .collect();
    seed_to_state(AZClass::DIII, &grid, 2, u, 3)
}

/// Finite-range unitary seed prod_a R diag(e^{i k_a}, 1) with a fixed real rotation R.
pub fn layered_seed(k: &[f64], turns: usize) -> CMat {
    let (s, co) = (0.6f64.sin(), 0.6f64.cos());
    let r = CMat::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]);
    let mut u = eye(2);
    for _ in 0..turns {
        for &ka in k {
            let d = CMat::from_row_slice(2, 2, &[C64::from_polar(1.0, ka), ZERO, ZERO, ONE]);
            u = u * &r * d;
        }
    }
    u
}

/// Class CI state with n = 4 in dimension `dim` from the layered seed.
pub fn ci_model(dim: usize) -> Result<RealSpaceCouplings> {
    let grid = BZGrid::cubic(dim, 6)?;
    let u = grid.points().iter().map(|k| layered_seed(k, 1)).collect();
    seed_to_state(AZClass::CI, &grid, 4, u, 2)
}

/// On-site Hamiltonian h = sigma_y (x) 1_n whose ground state is the vacuum.
pub fn vacuum_model(dim: usize, n: usize) -> Result<RealSpaceCouplings> {
    let block = kron(&pauli(2), &eye(n));
    RealSpaceCouplings::new(n, dim, Particle::Fermion, Kind::Hamiltonian, vec![Term { dr: vec![0; dim], block }])
}

/// Ground-state covariance of a Hamiltonian stencil on a grid.
pub fn state_field(h: &RealSpaceCouplings, grid: &BZGrid) -> Result<MatrixField> {
    ground_state_covariance(&fourier(h, grid)?, DEFAULT_GAP_TOL)
}

/// Name + parameter lookup used by the command line and model files.
pub fn by_name(name: &str, params: &BTreeMap<String, f64>) -> Result<RealSpaceCouplings> {
    let p = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
    let known: &[&str] = match name {
        "kitaev" => &["mu", "t", "delta"],
        "pip" => &["mu", "t", "delta"],
        "chern" => &["m"],
        "qsh" => &["m", "rashba"],
        "ti3d" => &["m"],
        "translation" => &["shift", "n"],
        "squeezer" => &["w", "r"],
        "diii-wire" => &[],
        "ci" => &["dim"],
        "vacuum" => &["dim", "n"],
        _ => return Err(Error::Config(format!("unknown model '{name}'"))),
    };
    if let Some(bad) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::Config(format!("model '{name}' has no parameter '{bad}'")));
    }
    let int = |k: &str, d: f64| -> Result<i64> {
        let v = p(k, d);
        if v.fract() != 0.0 {
            return Err(Error::Config(format!("parameter '{k}' must be an integer")));
        }
        Ok(v as i64)
    };
    match name {
        "kitaev" => kitaev_chain(p("mu", 1.0), p("t", 1.0), p("delta", 1.0)),
        "pip" => chiral_pip(p("mu", 1.0), p("t", 1.0), p("delta", 1.0)),
        "chern" => chern_insulator(p("m", -1.0)),
        "qsh" => qsh_model(p("m", -1.0), p("rashba", 0.0)),
        "ti3d" => ti3d_model(p("m", 2.0)),
        "translation" => lattice_translation(int("shift", 1.0)?, int("n", 1.0)?.max(1) as usize),
        "squeezer" => boson_squeezer_winding(int("w", 1.0)?, p("r", 0.5)),
        "diii-wire" => diii_wire(),
        "vacuum" => vacuum_model(int("dim", 1.0)?.max(1) as usize, int("n", 1.0)?.max(1) as usize),
        _ => ci_model(int("dim", 1.0)? as usize),
    }
}

pub const MODEL_NAMES: [&str; 10] =
    ["kitaev", "pip", "chern", "qsh", "ti3d", "translation", "squeezer", "diii-wire", "ci", "vacuum"];

/// Symmetry class each named model is built for.
pub fn model_class(name: &str) -> Option<AZClass> {
    Some(match name {
        "kitaev" | "vacuum" => AZClass::BDI,
        "pip" => AZClass::D,
        "chern" | "translation" | "squeezer" => AZClass::A,
        "qsh" | "ti3d" => AZClass::AII,
        "diii-wire" => AZClass::DIII,
        "ci" => AZClass::CI,
        _ => return None,
    })
}
