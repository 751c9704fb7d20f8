//! Fourier interpolation and differentiation of matrix fields on periodic
//! grids, and the d = 3 integrals built on them.

use super::{InvariantResult, GAP_TOL};
use crate::bz_grid::BZGrid;
use crate::error::{Error, Result};
use crate::gaussian_core::MatrixField;
use crate::linalg::{herm_sign, unitarize, CMat, C64};
use crate::symmetry::{extract_reduced, AZClass};
use rustfft::FftPlanner;
use std::f64::consts::PI;

fn fft_axis(data: &mut [C64], sizes: &[usize], axis: usize, inverse: bool, planner: &mut FftPlanner<f64>) {
    let n = sizes[axis];
    let stride: usize = sizes[axis + 1..].iter().product();
    let outer: usize = sizes[..axis].iter().product();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut line = vec![C64::new(0.0, 0.0); n];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            for j in 0..n {
                line[j] = data[base + j * stride];
            }
            fft.process(&mut line);
            for j in 0..n {
                data[base + j * stride] = line[j];
            }
        }
    }
}

fn fft_nd(data: &mut [C64], sizes: &[usize], inverse: bool, planner: &mut FftPlanner<f64>) {
    for ax in 0..sizes.len() {
        fft_axis(data, sizes, ax, inverse, planner);
    }
}

/// Signed frequency of FFT bin f; None for the Nyquist bin.
fn signed(f: usize, n: usize) -> Option<i64> {
    if 2 * f == n {
        None
    } else if 2 * f < n {
        Some(f as i64)
    } else {
        Some(f as i64 - n as i64)
    }
}

fn entries(values: &[CMat]) -> Vec<Vec<C64>> {
    let (r, c) = values[0].shape();
    (0..r * c)
        .map(|e| values.iter().map(|m| m[(e / c, e % c)]).collect())
        .collect()
}

fn assemble(ent: &[Vec<C64>], r: usize, c: usize) -> Vec<CMat> {
    let len = ent[0].len();
    (0..len)
        .map(|i| CMat::from_fn(r, c, |a, b| ent[a * c + b][i]))
        .collect()
}

fn multi(mut idx: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for ax in (0..sizes.len()).rev() {
        out[ax] = idx % sizes[ax];
        idx /= sizes[ax];
    }
    out
}

fn flat(m: &[usize], sizes: &[usize]) -> usize {
    m.iter().zip(sizes).fold(0, |acc, (&j, &n)| acc * n + j)
}

/// Trigonometric interpolation onto a grid `factor` times finer per axis
/// (Nyquist terms dropped).
pub fn upsample(values: &[CMat], sizes: &[usize], factor: usize) -> Vec<CMat> {
    let (r, c) = values[0].shape();
    let fine: Vec<usize> = sizes.iter().map(|n| n * factor).collect();
    let total: usize = sizes.iter().product();
    let fine_total: usize = fine.iter().product();
    let mut planner = FftPlanner::new();
    let ent: Vec<Vec<C64>> = entries(values)
        .into_iter()
        .map(|mut e| {
            fft_nd(&mut e, sizes, false, &mut planner);
            let mut big = vec![C64::new(0.0, 0.0); fine_total];
            for (f, v) in e.iter().enumerate() {
                let m = multi(f, sizes);
                let mut target = Vec::with_capacity(m.len());
                for (ax, &j) in m.iter().enumerate() {
                    match signed(j, sizes[ax]) {
                        Some(s) => target.push(s.rem_euclid(fine[ax] as i64) as usize),
                        None => break,
                    }
                }
                if target.len() == m.len() {
                    big[flat(&target, &fine)] = *v / total as f64;
                }
            }
            fft_nd(&mut big, &fine, true, &mut planner);
            big
        })
        .collect();
    assemble(&ent, r, c)
}

/// Spectral derivative d/dk_axis of a periodic matrix field.
pub fn derivative(values: &[CMat], sizes: &[usize], axis: usize) -> Vec<CMat> {
    let (r, c) = values[0].shape();
    let total: usize = sizes.iter().product();
    let mut planner = FftPlanner::new();
    let ent: Vec<Vec<C64>> = entries(values)
        .into_iter()
        .map(|mut e| {
            fft_nd(&mut e, sizes, false, &mut planner);
            for (f, v) in e.iter_mut().enumerate() {
                let j = multi(f, sizes)[axis];
                *v = match signed(j, sizes[axis]) {
                    Some(s) => *v * C64::new(0.0, s as f64 / total as f64),
                    None => C64::new(0.0, 0.0),
                };
            }
            fft_nd(&mut e, sizes, true, &mut planner);
            e
        })
        .collect();
    assemble(&ent, r, c)
}

fn degree_integral(q: &[CMat], sizes: &[usize]) -> Result<f64> {
    let d: Vec<Vec<CMat>> = (0..3).map(|ax| derivative(q, sizes, ax)).collect();
    let dens = crate::parallel::map(q.len(), |i| {
        let qi = q[i].adjoint();
        let a: Vec<CMat> = (0..3).map(|ax| &qi * &d[ax][i]).collect();
        let comm = &a[1] * &a[2] - &a[2] * &a[1];
        (&a[0] * comm).trace()
    });
    let cell: f64 = sizes.iter().map(|&n| 2.0 * PI / n as f64).product();
    let total: C64 = dens.iter().sum();
    Ok((total * cell / (8.0 * PI * PI)).re)
}

fn winding_at(grid: &BZGrid, q: &[CMat], factor: usize) -> Result<f64> {
    let fine: Vec<usize> = grid.sizes().iter().map(|n| n * factor).collect();
    let up = upsample(q, grid.sizes(), factor);
    let u = crate::parallel::try_map(up.len(), |i| unitarize(&up[i]))?;
    degree_integral(&u, &fine)
}

/// d = 3 winding (1 / 24 pi^2) int eps Tr(A A A), A = q^dag dq, evaluated on a
/// threefold trigonometric refinement of the grid re-projected to the unitary
/// group. `refinement_delta` compares against a twofold refinement.
pub fn winding_3d(grid: &BZGrid, q: &[CMat]) -> Result<InvariantResult> {
    if grid.dim() != 3 {
        return Err(Error::Dimension("winding_3d needs a three-dimensional grid".into()));
    }
    let raw = winding_at(grid, q, 3)?;
    let coarse = winding_at(grid, q, 2)?;
    let mut r = InvariantResult::integer("winding", raw, grid);
    r.refinement_delta = Some((raw - coarse).abs());
    Ok(r)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
            z -= dz;
            x[i] = z;
            if dz.abs() < 1e-15 {
                break;
            }
        }
    }
    (x, w)
}

/// Constant Hermitian M anticommuting with every h(k), from the null space of
/// the stacked linear constraints; flattened to M^2 = 1.
fn anticommuting_mass(h: &[CMat]) -> Result<CMat> {
    let n = h[0].nrows();
    let mut basis: Vec<CMat> = Vec::new();
    for a in 0..n {
        for b in a..n {
            let mut m = CMat::zeros(n, n);
            if a == b {
                m[(a, a)] = C64::new(1.0, 0.0);
                basis.push(m);
            } else {
                m[(a, b)] = C64::new(1.0, 0.0);
                m[(b, a)] = C64::new(1.0, 0.0);
                basis.push(m.clone());
                let mut m2 = CMat::zeros(n, n);
                m2[(a, b)] = C64::new(0.0, 1.0);
                m2[(b, a)] = C64::new(0.0, -1.0);
                basis.push(m2);
            }
        }
    }
    let p = basis.len();
    let mut gram = nalgebra::DMatrix::<f64>::zeros(p, p);
    for hk in h {
        let images: Vec<CMat> = basis.iter().map(|b| b * hk + hk * b).collect();
        for i in 0..p {
            for j in i..p {
                let v: f64 = images[i].iter().zip(images[j].iter()).map(|(x, y)| (x.conj() * y).re).sum();
                gram[(i, j)] += v;
                if i != j {
                    gram[(j, i)] += v;
                }
            }
        }
    }
    let eig = gram.clone().symmetric_eigen();
    let (imin, &lmin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let scale = gram.trace().max(1.0);
    if lmin > 1e-12 * scale {
        return Err(Error::Unsupported(
            "no constant mass term anticommutes with h(k); transgression unavailable".into(),
        ));
    }
    let v = eig.eigenvectors.column(imin);
    let m = basis.iter().zip(v.iter()).fold(CMat::zeros(n, n), |acc, (b, &c)| acc + b * C64::new(c, 0.0));
    herm_sign(&m, GAP_TOL).map_err(|g| Error::Degenerate(format!("mass term is singular (|eig| = {g:.3e})")))
}

fn permutations4() -> Vec<([usize; 4], f64)> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().any(|&x| std::mem::replace(&mut seen[x], true)) {
                        continue;
                    }
                    let mut inv = 0;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if p[i] > p[j] {
                                inv += 1;
                            }
                        }
                    }
                    out.push((p, if inv % 2 == 0 { 1.0 } else { -1.0 }));
                }
            }
        }
    }
    out
}

/// Chern-Simons 3-form of a class AII state in d = 3 (mod 1) by transgression:
/// the second Chern number of H(k, t) = cos t h(k) + sin t M over t in
/// [0, pi/2], where M is a constant mass anticommuting with the reduced h.
pub fn chern_simons_3d(state: &MatrixField) -> Result<InvariantResult> {
    if state.grid.dim() != 3 {
        return Err(Error::Dimension("chern_simons_3d needs d = 3".into()));
    }
    let r = extract_reduced(state, AZClass::AII)?;
    let h = &r.values;
    let sizes = state.grid.sizes();
    let mass = anticommuting_mass(h)?;
    let dh: Vec<Vec<CMat>> = (0..3).map(|ax| derivative(h, sizes, ax)).collect();
    let (nodes, weights) = gauss_legendre(10);
    let perms = permutations4();
    let dens = crate::parallel::map(h.len(), |i| {
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            let t = PI / 4.0 * (x + 1.0);
            let (s, c) = t.sin_cos();
            let hh = &h[i] * C64::new(c, 0.0) + &mass * C64::new(s, 0.0);
            let d: [CMat; 4] = [
                &dh[0][i] * C64::new(c, 0.0),
                &dh[1][i] * C64::new(c, 0.0),
                &dh[2][i] * C64::new(c, 0.0),
                &h[i] * C64::new(-s, 0.0) + &mass * C64::new(c, 0.0),
            ];
            let mut tr = C64::new(0.0, 0.0);
            for (p, sign) in &perms {
                let prod = &hh * &d[p[0]] * &d[p[1]] * &d[p[2]] * &d[p[3]];
                tr += prod.trace() * *sign;
            }
            acc += w * PI / 4.0 * tr.re;
        }
        acc
    });
    let raw = dens.iter().sum::<f64>() * state.grid.cell_volume() / (256.0 * PI * PI);
    Ok(InvariantResult::half_integer("cs", raw, &state.grid))
}
