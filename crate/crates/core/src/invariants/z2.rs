//! Time-reversal Z2 indices: the sewing-matrix index in d = 1 and the
//! Fu-Kane index in d = 2.

use super::{link, occupied_frames, InvariantResult, GAP_TOL};
use crate::bz_grid::BZGrid;
use crate::error::{Error, Result};
use crate::gaussian_core::{MatrixField, Role};
use crate::linalg::{det, eye, isy, kron, kron_all, pauli, pfaffian_complex, unitarize, unitary_power, unwrap_step, CMat, C64};
use crate::symmetry::{extract_reduced, require_class, AZClass};
use std::f64::consts::PI;

/// Hermitian field and the unitary part V of the antiunitary Theta psi = V psi*
/// that maps occupied bands at k to occupied bands at -k.
fn trs_source(state: &MatrixField, class: AZClass) -> Result<(Vec<CMat>, CMat)> {
    if state.role != Role::FermionState {
        return Err(Error::Invalid("time-reversal indices take a fermion state".into()));
    }
    match class {
        AZClass::DIII => {
            require_class(state, class, 1e-8)?;
            let g = state.values.iter().map(|x| x * crate::linalg::I).collect();
            Ok((g, kron_all(&[pauli(3), isy(), eye(state.n / 2)])))
        }
        AZClass::AII => {
            let r = extract_reduced(state, class)?;
            Ok((r.values, kron(&isy(), &eye(state.n / 2))))
        }
        AZClass::AI | AZClass::CI => Err(Error::Unsupported(format!(
            "time reversal squares to +1 in class {class}; no Kramers-pair index"
        ))),
        c => Err(Error::Unsupported(format!("class {c} has no time-reversal Z2 index here"))),
    }
}

/// Occupied frames along a closed d = 1 loop in a smooth periodic gauge:
/// parallel transport, then the holonomy spread evenly around the loop.
fn smooth_loop_gauge(frames: &[CMat]) -> Result<Vec<CMat>> {
    let n = frames.len();
    let mut out: Vec<CMat> = Vec::with_capacity(n);
    out.push(frames[0].clone());
    for j in 1..n {
        let raw = &frames[j];
        let w = unitarize(&(raw.adjoint() * &out[j - 1]))?;
        out.push(raw * w);
    }
    let hol = unitarize(&(out[0].adjoint() * &out[n - 1]))?;
    Ok(out
        .into_iter()
        .enumerate()
        .map(|(j, f)| f * unitary_power(&hol, -(j as f64) / n as f64))
        .collect())
}

/// Sewing-matrix Z2 in d = 1: prod over k = 0, pi of Pf w / sqrt(det w), with
/// w(k) = psi(-k)^dag V psi(k)* and the square root continued from 0 to pi.
/// Classes DIII (on G) and AII (on the reduced h).
pub fn sewing_z2(state: &MatrixField, class: AZClass) -> Result<InvariantResult> {
    if state.grid.dim() != 1 {
        return Err(Error::Dimension("the sewing index needs d = 1".into()));
    }
    let (h, v) = trs_source(state, class)?;
    let grid = &state.grid;
    let n = grid.len();
    let psi = smooth_loop_gauge(&occupied_frames(grid, &h, GAP_TOL)?)?;
    let half = n / 2;
    let w: Vec<CMat> = (0..=half)
        .map(|j| psi[(n - j) % n].adjoint() * &v * psi[j].conjugate())
        .collect();
    let mut phase = det(&w[0]).arg();
    let mut z = C64::new(1.0, 0.0);
    for j in 0..=half {
        if j > 0 {
            phase += unwrap_step(phase, det(&w[j]).arg());
        }
        if j == 0 || j == half {
            let wa = (&w[j] - w[j].transpose()) * C64::new(0.5, 0.0);
            z *= pfaffian_complex(&wa)? / C64::from_polar(1.0, phase / 2.0);
        }
    }
    let raw = z.arg() / PI;
    let mut r = InvariantResult::sign("sewing", (PI * raw).cos(), grid);
    r.raw = raw;
    Ok(r)
}

fn theta(v: &CMat, x: &CMat) -> CMat {
    v * x.conjugate()
}

/// Kramers-paired orthonormal frame [a_1..a_m, Theta a_1..Theta a_m] of the
/// span of `frame` at a time-reversal-invariant momentum.
pub fn kramers_frame(frame: &CMat, v: &CMat) -> Result<CMat> {
    let dim = frame.nrows();
    let total = frame.ncols();
    if total % 2 == 1 {
        return Err(Error::Degenerate("odd number of occupied bands under Kramers symmetry".into()));
    }
    let mut a: Vec<CMat> = Vec::new();
    let mut b: Vec<CMat> = Vec::new();
    for c in 0..total {
        if a.len() * 2 == total {
            break;
        }
        let mut x = frame.column(c).into_owned();
        for y in a.iter().chain(b.iter()) {
            let ov = (y.adjoint() * &x)[(0, 0)];
            x -= y * ov;
        }
        let norm = x.norm();
        if norm < 1e-6 {
            continue;
        }
        let x = CMat::from_column_slice(dim, 1, (x / C64::new(norm, 0.0)).as_slice());
        b.push(theta(v, &x));
        a.push(x);
    }
    if a.len() * 2 != total {
        return Err(Error::Degenerate("could not build a Kramers-paired frame".into()));
    }
    let mut out = CMat::zeros(dim, total);
    for (i, col) in a.iter().chain(b.iter()).enumerate() {
        out.set_column(i, &col.column(0));
    }
    Ok(out)
}

/// Frames along a time-reversal-invariant row (k_y = 0 or pi) obeying
/// chi_2(-k) = Theta chi_1(k), chi_1(-k) = -Theta chi_2(k).
fn constrained_row(grid: &BZGrid, h: &[CMat], v: &CMat, row: usize) -> Result<Vec<CMat>> {
    let nx = grid.sizes()[0];
    let idx = |i: usize| grid.index(&[i, row]);
    let mut out: Vec<Option<CMat>> = vec![None; nx];
    let raw: Vec<CMat> = occupied_frames(grid, &(0..nx).map(|i| h[idx(i)].clone()).collect::<Vec<_>>(), GAP_TOL)
        .map_err(|e| match e {
            Error::Gapless { min_abs_eig, .. } => Error::Gapless { k: grid.k(idx(0)), min_abs_eig },
            e => e,
        })?;
    for i in [0, nx / 2] {
        out[i] = Some(kramers_frame(&raw[i], v)?);
    }
    for i in 1..nx / 2 {
        let f = &raw[i];
        let m = f.ncols() / 2;
        let chi1 = f.columns(0, m).into_owned();
        let chi2 = f.columns(m, m).into_owned();
        let mut partner = CMat::zeros(f.nrows(), 2 * m);
        partner.columns_mut(0, m).copy_from(&(-theta(v, &chi2)));
        partner.columns_mut(m, m).copy_from(&theta(v, &chi1));
        out[nx - i] = Some(partner);
        out[i] = Some(f.clone());
    }
    Ok(out.into_iter().map(|f| f.unwrap()).collect())
}

/// Fu-Kane Z2 in d = 2 (class AII) by the lattice construction: link phases
/// along the two time-reversal-invariant rows in a Kramers-constrained gauge
/// minus the principal plaquette phases over half the zone, / 2 pi, mod 2.
pub fn fu_kane_z2(state: &MatrixField, class: AZClass) -> Result<InvariantResult> {
    if class != AZClass::AII {
        return Err(Error::Unsupported(format!("the Fu-Kane index is implemented for class AII, not {class}")));
    }
    let grid = &state.grid;
    if grid.dim() != 2 {
        return Err(Error::Dimension("the Fu-Kane index needs d = 2".into()));
    }
    let (h, v) = trs_source(state, class)?;
    let (nx, ny) = (grid.sizes()[0], grid.sizes()[1]);
    let half = ny / 2;
    let generic = occupied_frames(grid, &h, GAP_TOL)?;
    let bottom = constrained_row(grid, &h, &v, 0)?;
    let top = constrained_row(grid, &h, &v, half)?;
    let frame = |i: usize, j: usize| -> &CMat {
        let i = i % nx;
        if j == 0 {
            &bottom[i]
        } else if j == half {
            &top[i]
        } else {
            &generic[grid.index(&[i, j])]
        }
    };
    let row_phase = |j: usize| -> f64 { (0..nx).map(|i| link(frame(i, j), frame(i + 1, j)).arg()).sum() };
    let boundary = row_phase(0) - row_phase(half);
    let mut flux = 0.0;
    for j in 0..half {
        for i in 0..nx {
            let w = link(frame(i, j), frame(i + 1, j))
                * link(frame(i + 1, j), frame(i + 1, j + 1))
                * link(frame(i + 1, j + 1), frame(i, j + 1))
                * link(frame(i, j + 1), frame(i, j));
            flux += w.arg();
        }
    }
    let raw = (boundary - flux) / (2.0 * PI);
    Ok(InvariantResult::parity("fukane", raw, grid))
}
