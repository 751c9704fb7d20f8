use super::couplings::{RealSpaceCouplings, Term};
use super::field::{MatrixField, Role};
use crate::bz_grid::BZGrid;
use crate::error::{Error, Result};
use crate::linalg::{herm_sign, max_abs, CMat, C64, I};
use crate::parallel;
use serde::Serialize;

pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// values(k) = sum_dr block(dr) e^{-i k.dr}.
pub fn fourier(couplings: &RealSpaceCouplings, grid: &BZGrid) -> Result<MatrixField> {
    if couplings.dim != grid.dim() {
        return Err(Error::Dimension(format!(
            "stencil dimension {} vs grid dimension {}",
            couplings.dim,
            grid.dim()
        )));
    }
    let m = 2 * couplings.n;
    let values = parallel::map(grid.len(), |i| {
        let k = grid.k(i);
        let mut v = CMat::zeros(m, m);
        for t in &couplings.terms {
            let phase: f64 = t.dr.iter().zip(&k).map(|(&d, &kk)| d as f64 * kk).sum();
            v += &t.block * C64::from_polar(1.0, -phase);
        }
        v
    });
    MatrixField::new(grid.clone(), couplings.n, couplings.role(), values)
}

/// Real-space blocks with |dr_mu| <= max_range. At max_range = N/2 the
/// Nyquist coefficient is split evenly between +N/2 and -N/2, so the round
/// trip is exact whenever the support fits.
pub fn inverse_fourier(field: &MatrixField, max_range: usize) -> Result<RealSpaceCouplings> {
    let grid = &field.grid;
    if let Some(&n) = grid.sizes().iter().find(|&&n| max_range > n / 2) {
        return Err(Error::Config(format!(
            "max_range {max_range} exceeds half the axis size {n}"
        )));
    }
    let r = max_range as i64;
    let dim = grid.dim();
    let mut displacements: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..dim {
        displacements = displacements
            .into_iter()
            .flat_map(|d| {
                (-r..=r).map(move |x| {
                    let mut e = d.clone();
                    e.push(x);
                    e
                })
            })
            .collect();
    }
    let total = grid.len() as f64;
    let m = 2 * field.n;
    let blocks = parallel::map(displacements.len(), |j| {
        let dr = &displacements[j];
        let mut weight = 1.0 / total;
        for (ax, &d) in dr.iter().enumerate() {
            if d.unsigned_abs() as usize * 2 == grid.sizes()[ax] {
                weight *= 0.5;
            }
        }
        let mut b = CMat::zeros(m, m);
        for (i, v) in field.values.iter().enumerate() {
            let k = grid.k(i);
            let phase: f64 = dr.iter().zip(&k).map(|(&d, &kk)| d as f64 * kk).sum();
            b += v * C64::from_polar(weight, phase);
        }
        b
    });
    let scale = blocks.iter().fold(0.0f64, |a, b| a.max(max_abs(b)));
    let terms = displacements
        .into_iter()
        .zip(blocks)
        .filter(|(_, b)| max_abs(b) > 1e-14 * scale.max(1e-300))
        .map(|(dr, block)| Term { dr, block })
        .collect();
    let role = field.role;
    RealSpaceCouplings::unchecked(field.n, dim, role.particle(), role.kind(), terms)
}

/// Flatten a gapped Majorana Hamiltonian: i Gamma(k) = sign(h(k)).
pub fn ground_state_covariance(h: &MatrixField, gap_tol: f64) -> Result<MatrixField> {
    if h.role != Role::Hamiltonian {
        return Err(Error::Invalid(format!("expected a Hamiltonian field, got {:?}", h.role)));
    }
    let signs = parallel::map(h.grid.len(), |i| herm_sign(&h.values[i], gap_tol));
    let mut worst: Option<(usize, f64)> = None;
    for (i, s) in signs.iter().enumerate() {
        if let Err(gap) = s {
            if worst.map_or(true, |(_, g)| *gap < g) {
                worst = Some((i, *gap));
            }
        }
    }
    if let Some((i, gap)) = worst {
        return Err(Error::Gapless { k: h.grid.k(i), min_abs_eig: gap });
    }
    let values = signs.into_iter().map(|s| s.unwrap() * (-I)).collect();
    MatrixField::new(h.grid.clone(), h.n, Role::FermionState, values)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayEstimate {
    /// Fitted Gamma_0.
    pub amplitude: f64,
    /// Fitted decay length.
    pub length: f64,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    /// Set when all weight sits at dr = 0; no fit is performed then.
    pub zero_range: bool,
    /// (Chebyshev distance, max |entry| over that shell).
    pub shells: Vec<(usize, f64)>,
}

/// Log-linear fit of shell-maximum magnitude against distance. Empty shells
/// are clamped to 1e-16 of the largest entry so a finite stencil shows up as a
/// steep drop rather than being skipped.
pub fn decay_profile(couplings: &RealSpaceCouplings, max_range: usize) -> Result<DecayEstimate> {
    let mut shells = vec![0.0f64; max_range + 1];
    for t in &couplings.terms {
        let d = t.dr.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0);
        if d <= max_range {
            shells[d] = shells[d].max(max_abs(&t.block));
        }
    }
    let top = shells.iter().cloned().fold(0.0, f64::max);
    let shells: Vec<(usize, f64)> = shells.into_iter().enumerate().collect();
    if top == 0.0 || shells[1..].iter().all(|&(_, v)| v <= 1e-14 * top) {
        return Ok(DecayEstimate {
            amplitude: top,
            length: 0.0,
            residual: 0.0,
            zero_range: true,
            shells,
        });
    }
    let floor = 1e-16 * top;
    let pts: Vec<(f64, f64)> = shells
        .iter()
        .filter(|&&(d, _)| d >= 1 || max_range == 1)
        .map(|&(d, v)| (d as f64, v.max(floor).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Config("decay fit needs max_range >= 1".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    if slope >= 0.0 {
        return Err(Error::Degenerate(format!(
            "shell magnitudes do not decay (log slope {slope:.3e})"
        )));
    }
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayEstimate {
        amplitude: intercept.exp(),
        length: -1.0 / slope,
        residual,
        zero_range: false,
        shells,
    })
}

pub fn decay_profile_field(field: &MatrixField, max_range: usize) -> Result<DecayEstimate> {
    decay_profile(&inverse_fourier(field, max_range)?, max_range)
}

/// Ratio of the largest off-site block to the on-site block (max-norm).
pub fn offsite_mass_ratio(field: &MatrixField) -> Result<f64> {
    let r = field.grid.sizes().iter().min().copied().unwrap_or(4) / 2;
    let s = inverse_fourier(field, r)?;
    let zero = vec![0; field.grid.dim()];
    let onsite = s.block(&zero).map_or(0.0, max_abs);
    let off = s
        .terms
        .iter()
        .filter(|t| t.dr != zero)
        .fold(0.0f64, |a, t| a.max(max_abs(&t.block)));
    Ok(if onsite == 0.0 { f64::INFINITY } else { off / onsite })
}

/// Row/column positions of the two summands inside the direct sum, keeping an
/// outer internal factor of size `outer` outermost within each Majorana half.
pub(crate) fn sum_embedding(na: usize, nb: usize, outer: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if outer == 0 || na % outer != 0 || nb % outer != 0 {
        return Err(Error::Dimension(format!(
            "mode counts {na}, {nb} not divisible by the outer factor {outer}"
        )));
    }
    let (ma, mb) = (na / outer, nb / outer);
    let n = na + nb;
    let place = |m: usize, offset: usize, nn: usize| -> Vec<usize> {
        let mut v = Vec::with_capacity(2 * nn);
        for s in 0..2 {
            for o in 0..outer {
                for r in 0..m {
                    v.push(s * n + o * (ma + mb) + offset + r);
                }
            }
        }
        v
    };
    Ok((place(ma, 0, na), place(mb, ma, nb)))
}

/// Pointwise direct sum of two fields of the same role.
pub fn direct_sum(a: &MatrixField, b: &MatrixField, outer: usize) -> Result<MatrixField> {
    if a.role != b.role || a.grid != b.grid {
        return Err(Error::Dimension("direct sum of incompatible fields".into()));
    }
    let (ia, ib) = sum_embedding(a.n, b.n, outer)?;
    let n = a.n + b.n;
    let values = parallel::map(a.grid.len(), |i| {
        let mut m = CMat::zeros(2 * n, 2 * n);
        for (src, idx) in [(&a.values[i], &ia), (&b.values[i], &ib)] {
            for r in 0..src.nrows() {
                for cc in 0..src.ncols() {
                    m[(idx[r], idx[cc])] = src[(r, cc)];
                }
            }
        }
        m
    });
    MatrixField::new(a.grid.clone(), n, a.role, values)
}

/// Direct sum with a k-independent block (vacuum-like state or trivial op).
pub fn stack_with_ancilla(field: &MatrixField, block: &CMat, outer: usize) -> Result<MatrixField> {
    if block.nrows() != block.ncols() || block.nrows() % 2 != 0 {
        return Err(Error::Invalid("ancilla block must be square of even size".into()));
    }
    let nb = block.nrows() / 2;
    let anc = MatrixField::constant(&field.grid, nb, field.role, block)?;
    let report = super::validate(&anc, super::DEFAULT_TOL);
    if !report.pass {
        return Err(Error::Invalid(format!(
            "ancilla block is not a valid {:?} (max violation {:.3e})",
            field.role,
            report.max_violation()
        )));
    }
    direct_sum(field, &anc, outer)
}

/// Gamma'(k) = V(k) Gamma(k) V(k)^dag.
pub fn apply_op(op: &MatrixField, state: &MatrixField) -> Result<MatrixField> {
    let ok = matches!(
        (op.role, state.role),
        (Role::FermionOp, Role::FermionState) | (Role::BosonOp, Role::BosonState)
    );
    if !ok {
        return Err(Error::Dimension(format!(
            "cannot apply {:?} to {:?}",
            op.role, state.role
        )));
    }
    if op.n != state.n || op.grid != state.grid {
        return Err(Error::Dimension("operation and state shapes differ".into()));
    }
    state.map(state.role, |i, g| &op.values[i] * g * op.values[i].adjoint())
}

/// Pointwise product first-then-second: V(k) = second(k) first(k).
pub fn compose_ops(first: &MatrixField, second: &MatrixField) -> Result<MatrixField> {
    if first.role != second.role || !first.role.is_op() || first.n != second.n || first.grid != second.grid {
        return Err(Error::Dimension("cannot compose incompatible operations".into()));
    }
    first.map(first.role, |i, v| &second.values[i] * v)
}
