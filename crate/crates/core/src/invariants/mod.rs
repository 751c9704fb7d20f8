//! Topological invariants of gapped Hermitian fields, unitary fields and
//! fermionic states for d <= 3.
//!
//! Sign convention: q(k) = e^{ik} has winding +1.

mod spectral;
mod z2;

pub use spectral::{chern_simons_3d, derivative, gauss_legendre, upsample, winding_3d};
pub use z2::{fu_kane_z2, kramers_frame, sewing_z2};

use crate::bz_grid::BZGrid;
use crate::error::{Error, Result};
use crate::gaussian_core::{MatrixField, Role};
use crate::linalg::{det, eye, max_abs_diff, negative_subspace, pfaffian, real_part, unwrap_step, CMat, I};
use crate::symmetry::{extract_reduced, polar_unitarize, AZClass, ReducedField, ReducedKind};
use serde::Serialize;
use std::f64::consts::PI;

/// Results further than this from the nearest allowed value are reported as
/// not quantized.
pub const ROUND_TOL: f64 = 1e-2;
/// Half-integer detection window for Chern-Simons values.
pub const CS_TOL: f64 = 0.1;
pub const GAP_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct InvariantResult {
    pub name: String,
    /// Value before rounding.
    pub raw: f64,
    /// Integer for Z-valued invariants; +1 (trivial) or -1 (nontrivial) for Z2.
    pub value: i64,
    pub quantization_gap: f64,
    pub quantized: bool,
    pub grid: Vec<usize>,
    /// Change of `raw` between two resolutions, where a second one is computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement_delta: Option<f64>,
}

impl InvariantResult {
    pub fn integer(name: &str, raw: f64, grid: &BZGrid) -> Self {
        let value = raw.round();
        let gap = (raw - value).abs();
        InvariantResult {
            name: name.into(),
            raw,
            value: value as i64,
            quantization_gap: gap,
            quantized: gap <= ROUND_TOL,
            grid: grid.sizes().to_vec(),
            refinement_delta: None,
        }
    }

    /// Z2 from an integer-valued raw number: the parity of round(raw).
    pub fn parity(name: &str, raw: f64, grid: &BZGrid) -> Self {
        let mut r = Self::integer(name, raw, grid);
        r.value = if r.value.rem_euclid(2) == 0 { 1 } else { -1 };
        r
    }

    /// Z2 from a sign-like raw number in [-1, 1].
    pub fn sign(name: &str, raw: f64, grid: &BZGrid) -> Self {
        let value = if raw < 0.0 { -1 } else { 1 };
        let gap = (raw - value as f64).abs();
        InvariantResult {
            name: name.into(),
            raw,
            value,
            quantization_gap: gap,
            quantized: gap <= ROUND_TOL,
            grid: grid.sizes().to_vec(),
            refinement_delta: None,
        }
    }

    /// Z2 from a phase in units of 1 taken mod 1: near 1/2 is nontrivial.
    pub fn half_integer(name: &str, raw: f64, grid: &BZGrid) -> Self {
        let frac = raw.rem_euclid(1.0);
        let to_half = (frac - 0.5).abs();
        let to_zero = frac.min(1.0 - frac);
        let (value, gap) = if to_half < to_zero { (-1, to_half) } else { (1, to_zero) };
        InvariantResult {
            name: name.into(),
            raw,
            value,
            quantization_gap: gap,
            quantized: gap <= CS_TOL,
            grid: grid.sizes().to_vec(),
            refinement_delta: None,
        }
    }

    pub fn is_nontrivial(&self) -> bool {
        match self.name.as_str() {
            "chern" | "winding" => self.value != 0,
            _ => self.value == -1,
        }
    }
}

/// Hermitian matrices whose negative eigenspace defines the occupied bands:
/// h itself for Hamiltonians, G = i Gamma for fermion states.
pub fn hermitian_source(field: &MatrixField) -> Result<Vec<CMat>> {
    match field.role {
        Role::Hamiltonian => Ok(field.values.clone()),
        Role::FermionState => Ok(field.values.iter().map(|g| g * I).collect()),
        r => Err(Error::Invalid(format!("expected a Hamiltonian or fermion state, got {r:?}"))),
    }
}

/// Orthonormal occupied frames at every grid point; fails at the worst
/// gapless point.
pub fn occupied_frames(grid: &BZGrid, h: &[CMat], gap_tol: f64) -> Result<Vec<CMat>> {
    let out = crate::parallel::map(h.len(), |i| negative_subspace(&h[i]));
    let mut worst: Option<(usize, f64)> = None;
    for (i, (_, gap)) in out.iter().enumerate() {
        if *gap <= gap_tol && worst.map_or(true, |(_, g)| *gap < g) {
            worst = Some((i, *gap));
        }
    }
    if let Some((i, gap)) = worst {
        return Err(Error::Gapless { k: grid.k(i), min_abs_eig: gap });
    }
    let m = out[0].0.ncols();
    if let Some(i) = out.iter().position(|(f, _)| f.ncols() != m) {
        return Err(Error::Gapless { k: grid.k(i), min_abs_eig: 0.0 });
    }
    Ok(out.into_iter().map(|(f, _)| f).collect())
}

/// Normalized overlap det(a^dag b).
pub(crate) fn link(a: &CMat, b: &CMat) -> num_complex::Complex64 {
    let d = det(&(a.adjoint() * b));
    let n = d.norm();
    if n == 0.0 {
        d
    } else {
        d / n
    }
}

/// First Chern number of the occupied bands of a gapped Hermitian field on a
/// d = 2 grid, by plaquette link variables (integer on any grid).
pub fn chern_of(grid: &BZGrid, h: &[CMat]) -> Result<InvariantResult> {
    if grid.dim() != 2 {
        return Err(Error::Dimension(format!("Chern number needs d = 2, got {}", grid.dim())));
    }
    let psi = occupied_frames(grid, h, GAP_TOL)?;
    let plaq = grid.plaquettes_in(0, 1);
    let flux = crate::parallel::map(plaq.len(), |p| {
        let c = plaq[p].corners;
        let w = link(&psi[c[0]], &psi[c[1]])
            * link(&psi[c[1]], &psi[c[2]])
            * link(&psi[c[2]], &psi[c[3]])
            * link(&psi[c[3]], &psi[c[0]]);
        w.arg()
    });
    let raw = -flux.iter().sum::<f64>() / (2.0 * PI);
    Ok(InvariantResult::integer("chern", raw, grid))
}

/// Chern number of a Hamiltonian or of G = i Gamma for a state.
pub fn chern_number(field: &MatrixField) -> Result<InvariantResult> {
    chern_of(&field.grid, &hermitian_source(field)?)
}

fn check_unitary(q: &[CMat]) -> Result<()> {
    let m = q.first().map_or(0, |x| x.nrows());
    let one = eye(m);
    let worst = q.iter().fold(0.0f64, |a, x| a.max(max_abs_diff(&(x * x.adjoint()), &one)));
    if worst > 1e-6 {
        return Err(Error::Invalid(format!("field is not unitary (deviation {worst:.3e})")));
    }
    Ok(())
}

/// Winding of a unitary field: accumulated det phase for d = 1, the degree
/// integral for d = 3.
pub fn winding_number(grid: &BZGrid, q: &[CMat]) -> Result<InvariantResult> {
    check_unitary(q)?;
    match grid.dim() {
        1 => {
            let n = q.len();
            let phases: Vec<f64> = q.iter().map(|x| det(x).arg()).collect();
            let total: f64 = (0..n).map(|j| unwrap_step(phases[j], phases[(j + 1) % n])).sum();
            Ok(InvariantResult::integer("winding", total / (2.0 * PI), grid))
        }
        3 => winding_3d(grid, q),
        d => Err(Error::Dimension(format!("winding numbers are defined for d = 1, 3; got {d}"))),
    }
}

/// Winding of the reduced block of a state (q) or operation (u; the first
/// member for u-pairs).
pub fn winding_of_reduced(r: &ReducedField) -> Result<InvariantResult> {
    if r.kind == ReducedKind::H {
        return Err(Error::Invalid(format!("class {} states have no unitary block", r.class)));
    }
    winding_number(&r.grid, &r.values)
}

/// Winding of a fermion state or operation after reduction in `class`; boson
/// operations are first polar-unitarized and reduced as class A.
pub fn winding_of_field(field: &MatrixField, class: AZClass) -> Result<InvariantResult> {
    if field.role == Role::BosonOp {
        let (w, _) = polar_unitarize(field)?;
        let as_fermion = MatrixField::new(w.grid.clone(), w.n, Role::FermionOp, w.values)?;
        return winding_of_reduced(&extract_reduced(&as_fermion, AZClass::A)?);
    }
    winding_of_reduced(&extract_reduced(field, class)?)
}

fn real_pfaffian(m: &CMat) -> Result<f64> {
    if crate::linalg::max_imag(m) > 1e-8 {
        return Err(Error::Invalid("covariance is not real at a time-reversal-invariant momentum".into()));
    }
    let pf = pfaffian(&real_part(m))?;
    if pf.abs() < 1e-10 {
        return Err(Error::Degenerate(format!("vanishing Pfaffian ({pf:.3e})")));
    }
    Ok(pf)
}

/// d = 0 index sign Pf(Gamma) / Pf(Gamma_vac) of a single covariance matrix.
pub fn pfaffian_sign(gamma: &CMat) -> Result<f64> {
    let n = gamma.nrows() / 2;
    let vac = real_pfaffian(&crate::gaussian_core::fermion_vacuum_block(n))?;
    Ok(real_pfaffian(gamma)?.signum() * vac.signum())
}

/// d = 1 Pfaffian index sign[Pf Gamma(0) Pf Gamma(pi)].
pub fn pfaffian_z2(state: &MatrixField) -> Result<InvariantResult> {
    if state.role != Role::FermionState {
        return Err(Error::Invalid("the Pfaffian index takes a fermion state".into()));
    }
    if state.grid.dim() != 1 {
        return Err(Error::Dimension("the Pfaffian index field version needs d = 1".into()));
    }
    let half = state.grid.sizes()[0] / 2;
    let raw = real_pfaffian(&state.values[0])? * real_pfaffian(&state.values[half])?;
    Ok(InvariantResult::sign("pfaffian", raw, &state.grid))
}

/// Berry phase / 2pi (mod 1) of the occupied bands of a Hermitian field on a
/// d = 1 grid.
pub fn berry_phase(grid: &BZGrid, h: &[CMat]) -> Result<f64> {
    if grid.dim() != 1 {
        return Err(Error::Dimension("Berry phase needs d = 1".into()));
    }
    let psi = occupied_frames(grid, h, GAP_TOL)?;
    let n = psi.len();
    let w = (0..n).fold(num_complex::Complex64::new(1.0, 0.0), |acc, j| acc * link(&psi[j], &psi[(j + 1) % n]));
    Ok((-w.arg() / (2.0 * PI)).rem_euclid(1.0))
}

/// Chern-Simons Z2: Berry phase in d = 1 (reduced h for charge-conserving
/// classes, G otherwise) and the transgression integral in d = 3 (class AII).
pub fn chern_simons_halfint(state: &MatrixField, class: AZClass) -> Result<InvariantResult> {
    match state.grid.dim() {
        1 => {
            let h = match class {
                AZClass::A | AZClass::AI | AZClass::AII => extract_reduced(state, class)?.values,
                _ => {
                    crate::symmetry::require_class(state, class, 1e-8)?;
                    hermitian_source(state)?
                }
            };
            let raw = berry_phase(&state.grid, &h)?;
            Ok(InvariantResult::half_integer("cs", raw, &state.grid))
        }
        3 if class == AZClass::AII => chern_simons_3d(state),
        3 => Err(Error::Unsupported(format!(
            "the d = 3 Chern-Simons index is implemented for class AII only, not {class}"
        ))),
        d => Err(Error::Dimension(format!("Chern-Simons index needs d = 1 or 3, got {d}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantName {
    Chern,
    Winding,
    Pfaffian,
    Sewing,
    FuKane,
    Cs,
}

impl std::str::FromStr for InvariantName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "chern" => InvariantName::Chern,
            "winding" => InvariantName::Winding,
            "pfaffian" => InvariantName::Pfaffian,
            "sewing" => InvariantName::Sewing,
            "fukane" => InvariantName::FuKane,
            "cs" => InvariantName::Cs,
            _ => return Err(Error::Parse(format!("unknown invariant '{s}'"))),
        })
    }
}

/// Dispatch by name. Chern numbers of charge-conserving states are taken on
/// the reduced h.
pub fn evaluate(name: InvariantName, field: &MatrixField, class: AZClass) -> Result<InvariantResult> {
    match name {
        InvariantName::Chern => {
            if field.role == Role::FermionState && matches!(class, AZClass::A | AZClass::AI | AZClass::AII) {
                let r = extract_reduced(field, class)?;
                chern_of(&r.grid, &r.values)
            } else {
                chern_number(field)
            }
        }
        InvariantName::Winding => winding_of_field(field, class),
        InvariantName::Pfaffian => pfaffian_z2(field),
        InvariantName::Sewing => sewing_z2(field, class),
        InvariantName::FuKane => fu_kane_z2(field, class),
        InvariantName::Cs => chern_simons_halfint(field, class),
    }
}

/// Invariants that make sense for a given class, dimension and role.
pub fn applicable(class: AZClass, dim: usize, role: Role) -> Vec<InvariantName> {
    use InvariantName as N;
    let mut out = Vec::new();
    match role {
        Role::FermionState => {
            if dim == 2 && matches!(class, AZClass::A | AZClass::D | AZClass::C | AZClass::AI | AZClass::AII) {
                out.push(N::Chern);
            }
            if matches!(class, AZClass::AIII | AZClass::BDI | AZClass::CII) && dim == 1
                || matches!(class, AZClass::DIII | AZClass::CI | AZClass::AIII | AZClass::CII) && dim == 3
            {
                out.push(N::Winding);
            }
            if dim == 1 && matches!(class, AZClass::D | AZClass::BDI) {
                out.push(N::Pfaffian);
            }
            if dim == 1 && matches!(class, AZClass::DIII | AZClass::AII) {
                out.push(N::Sewing);
            }
            if dim == 2 && class == AZClass::AII {
                out.push(N::FuKane);
            }
            if dim == 1 || dim == 3 && class == AZClass::AII {
                out.push(N::Cs);
            }
        }
        Role::FermionOp | Role::BosonOp if dim == 1 || dim == 3 => out.push(N::Winding),
        Role::Hamiltonian if dim == 2 => out.push(N::Chern),
        _ => {}
    }
    out
}
