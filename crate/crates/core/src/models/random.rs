use crate::bz_grid::BZGrid;
use crate::error::{Error, Result};
use crate::gaussian_core::{
    ground_state_covariance, fourier, Kind, MatrixField, Particle, RealSpaceCouplings, Role,
    SymplecticForm, Term, DEFAULT_GAP_TOL,
};
use crate::linalg::{c, expm, max_abs_diff, pauli, CMat, C64, I};
use crate::symmetry::{class_symmetries, AZClass, SymmetryMatrix};
use rand::Rng;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug)]
pub struct RandomSpec {
    pub n: usize,
    pub dim: usize,
    /// Max |dr_mu| of the generating stencil.
    pub range: i64,
    /// Sum of block norms of the random part; below 1 a fermion state stays
    /// gapped around the vacuum.
    pub strength: f64,
}

impl RandomSpec {
    pub fn new(n: usize, dim: usize, range: i64, strength: f64) -> Self {
        RandomSpec { n, dim, range, strength }
    }
}

/// Finite group generated by the symmetry matrices, each element paired with
/// -1 when it contains an odd number of antiunitary factors.
pub fn symmetry_group(syms: &[SymmetryMatrix], m: usize) -> Vec<(CMat, f64)> {
    let mut group: Vec<(CMat, f64)> = vec![(crate::linalg::eye(m), 1.0)];
    let mut frontier = 0;
    while frontier < group.len() {
        let (g, s) = group[frontier].clone();
        for sym in syms {
            let prod = sym.complex() * &g;
            let sign = if sym.antiunitary { -s } else { s };
            if !group.iter().any(|(h, _)| max_abs_diff(h, &prod) < 1e-12) {
                group.push((prod, sign));
            }
        }
        frontier += 1;
    }
    group
}

fn displacements(dim: usize, range: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|d| {
                (-range..=range).map(move |x| {
                    let mut e = d.clone();
                    e.push(x);
                    e
                })
            })
            .collect();
    }
    out
}

/// Real blocks with B(-dr) = pairing B(dr)^T.
fn random_stencil(dim: usize, m: usize, range: i64, pairing: f64, rng: &mut impl Rng) -> BTreeMap<Vec<i64>, CMat> {
    let mut out = BTreeMap::new();
    for dr in displacements(dim, range) {
        let neg: Vec<i64> = dr.iter().map(|x| -x).collect();
        if out.contains_key(&dr) {
            continue;
        }
        let x = CMat::from_fn(m, m, |_, _| c(rng.gen_range(-1.0..1.0), 0.0));
        if dr == neg {
            out.insert(dr, (&x + x.transpose() * c(pairing, 0.0)) * c(0.5, 0.0));
        } else {
            out.insert(neg, x.transpose() * c(pairing, 0.0));
            out.insert(dr, x);
        }
    }
    out
}

/// Average g B g^T (times the group sign when `signed`) over the group.
fn symmetrize(stencil: &mut BTreeMap<Vec<i64>, CMat>, group: &[(CMat, f64)], signed: bool) {
    let w = 1.0 / group.len() as f64;
    for b in stencil.values_mut() {
        let mut acc = CMat::zeros(b.nrows(), b.ncols());
        for (g, s) in group {
            let s = if signed { *s } else { 1.0 };
            acc += g * &*b * g.transpose() * c(s * w, 0.0);
        }
        *b = acc;
    }
}

fn rescale(stencil: &mut BTreeMap<Vec<i64>, CMat>, strength: f64) {
    let total: f64 = stencil.values().map(|b| b.norm()).sum();
    if total > 0.0 {
        for b in stencil.values_mut() {
            *b *= c(strength / total, 0.0);
        }
    }
}

fn evaluate(stencil: &BTreeMap<Vec<i64>, CMat>, k: &[f64]) -> CMat {
    let m = stencil.values().next().map_or(0, |b| b.nrows());
    let mut out = CMat::zeros(m, m);
    for (dr, b) in stencil {
        let ph: f64 = dr.iter().zip(k).map(|(&d, &kk)| d as f64 * kk).sum();
        out += b * C64::from_polar(1.0, -ph);
    }
    out
}

/// Majorana Hamiltonian stencil h(dr) = i A(dr) where A is the vacuum block plus
/// a random real stencil respecting the class's symmetries.
pub fn random_state(class: AZClass, spec: &RandomSpec, rng: &mut impl Rng) -> Result<RealSpaceCouplings> {
    let n = spec.n;
    let group = symmetry_group(&class_symmetries(class, n)?, 2 * n);
    let mut a = random_stencil(spec.dim, 2 * n, spec.range, -1.0, rng);
    symmetrize(&mut a, &group, true);
    rescale(&mut a, spec.strength);
    *a.entry(vec![0; spec.dim]).or_insert_with(|| CMat::zeros(2 * n, 2 * n)) +=
        crate::gaussian_core::fermion_vacuum_block(n);
    let terms = a.into_iter().map(|(dr, b)| Term { dr, block: b * I }).collect();
    RealSpaceCouplings::new(n, spec.dim, Particle::Fermion, Kind::Hamiltonian, terms)
}

/// Flattened random symmetric state on a grid; redraws (up to 20 times) when
/// a strong draw closes the gap.
pub fn random_state_field(class: AZClass, grid: &BZGrid, spec: &RandomSpec, rng: &mut impl Rng) -> Result<MatrixField> {
    let mut last = None;
    for _ in 0..20 {
        let h = random_state(class, spec, rng)?;
        match ground_state_covariance(&fourier(&h, grid)?, DEFAULT_GAP_TOL.max(1e-6)) {
            Ok(f) => return Ok(f),
            Err(e @ Error::Gapless { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// V(k) = exp(K(k)) with K a real stencil, K(-dr) = -K(dr)^T, commuting with
/// every symmetry of the class.
pub fn random_op_field(class: AZClass, grid: &BZGrid, spec: &RandomSpec, rng: &mut impl Rng) -> Result<MatrixField> {
    let n = spec.n;
    let group = symmetry_group(&class_symmetries(class, n)?, 2 * n);
    let mut k = random_stencil(grid.dim(), 2 * n, spec.range, -1.0, rng);
    symmetrize(&mut k, &group, false);
    rescale(&mut k, spec.strength);
    MatrixField::from_fn(grid, n, Role::FermionOp, |kk| expm(&evaluate(&k, kk)))
}

/// Gamma(k) = exp(K(k)) with K Hermitian, real in real space and
/// anticommuting with sigma, averaged over the given symmetries.
pub fn random_boson_state_field(
    syms: &[SymmetryMatrix],
    grid: &BZGrid,
    spec: &RandomSpec,
    rng: &mut impl Rng,
) -> Result<MatrixField> {
    let n = spec.n;
    let sigma = SymplecticForm::new(n).matrix();
    let mut k = random_stencil(grid.dim(), 2 * n, spec.range, 1.0, rng);
    for b in k.values_mut() {
        *b = (&*b + &sigma * &*b * &sigma) * c(0.5, 0.0);
    }
    symmetrize(&mut k, &symmetry_group(syms, 2 * n), false);
    rescale(&mut k, spec.strength);
    MatrixField::from_fn(grid, n, Role::BosonState, |kk| expm(&evaluate(&k, kk)))
}

/// V(k) = exp(sigma S(k)) with S Hermitian and real in real space.
pub fn random_boson_op_field(
    syms: &[SymmetryMatrix],
    grid: &BZGrid,
    spec: &RandomSpec,
    rng: &mut impl Rng,
) -> Result<MatrixField> {
    let n = spec.n;
    let sigma = SymplecticForm::new(n).matrix();
    let mut k = random_stencil(grid.dim(), 2 * n, spec.range, 1.0, rng);
    for b in k.values_mut() {
        *b = &sigma * &*b;
    }
    symmetrize(&mut k, &symmetry_group(syms, 2 * n), false);
    rescale(&mut k, spec.strength);
    MatrixField::from_fn(grid, n, Role::BosonOp, |kk| expm(&evaluate(&k, kk)))
}

/// u(k) = exp(i H(k)) with H an m x m Hermitian trigonometric polynomial of
/// degree `harmonics` and total coefficient norm `scale`.
pub fn random_unitary_field(grid: &BZGrid, m: usize, harmonics: i64, scale: f64, rng: &mut impl Rng) -> Vec<CMat> {
    let mut h: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
    for dr in displacements(grid.dim(), harmonics) {
        let neg: Vec<i64> = dr.iter().map(|x| -x).collect();
        if h.contains_key(&dr) {
            continue;
        }
        let x = CMat::from_fn(m, m, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        if dr == neg {
            h.insert(dr, (&x + x.adjoint()) * c(0.5, 0.0));
        } else {
            h.insert(neg, x.adjoint());
            h.insert(dr, x);
        }
    }
    rescale(&mut h, scale);
    crate::parallel::map(grid.len(), |i| expm(&(evaluate(&h, &grid.k(i)) * I)))
}

/// Normalized map (sin k . sigma + i (mass - sum cos k)) / norm on a d = 3 grid;
/// its winding is nonzero for 1 < |mass| < 3.
pub fn base_map_3d(grid: &BZGrid, mass: f64) -> Result<Vec<CMat>> {
    if grid.dim() != 3 {
        return Err(Error::Dimension("base map needs a three-dimensional grid".into()));
    }
    Ok(grid
        .points()
        .iter()
        .map(|k| {
            let mut u = CMat::zeros(2, 2);
            for a in 0..3 {
                u += pauli(a + 1) * c(k[a].sin(), 0.0);
            }
            let d0 = mass - k.iter().map(|x| x.cos()).sum::<f64>();
            u += crate::linalg::eye(2) * c(0.0, d0);
            let norm = (k.iter().map(|x| x.sin().powi(2)).sum::<f64>() + d0 * d0).sqrt();
            u / c(norm, 0.0)
        })
        .collect())
}

/// exp(i H_1) B exp(i H_2) on a d = 3 grid, with B the base map at a random
/// mass (winding -1, 0 or 1) or its adjoint, and H_1, H_2 random one-harmonic
/// generators. The winding of the result is that of B.
pub fn random_winding_unitary_3d(grid: &BZGrid, rng: &mut impl Rng) -> Result<Vec<CMat>> {
    let mass = match rng.gen_range(0..3) {
        0 => rng.gen_range(1.4..2.6),
        1 => -rng.gen_range(1.4..2.6),
        _ => rng.gen_range(3.6..4.5),
    };
    let flip = rng.gen_bool(0.5);
    let b = base_map_3d(grid, mass)?;
    let l = random_unitary_field(grid, 2, 1, 1.5, rng);
    let r = random_unitary_field(grid, 2, 1, 1.5, rng);
    Ok((0..grid.len())
        .map(|i| {
            let bi = if flip { b[i].adjoint() } else { b[i].clone() };
            &l[i] * bi * &r[i]
        })
        .collect())
}
