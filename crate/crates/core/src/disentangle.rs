//! Explicit disentanglers and the disentanglability decision.
//!
//! A disentangler is a fermion operation V with V Gamma_vac V^dag = Gamma;
//! applying V^dag to the state returns the correlation-free vacuum.

use crate::error::{Error, Result};
use crate::gaussian_core::{apply_op, offsite_mass_ratio, MatrixField, Role};
use crate::invariants::{self, InvariantName, InvariantResult};
use crate::linalg::{eye, CMat};
use crate::symmetry::{check_class, extract_reduced, reconstruct, vacuum_reduced, AZClass, ReducedField, ReducedKind};
use crate::tables::{homomorphism_info, HomomorphismInfo, KGroup};
use serde::Serialize;

/// Offsite-to-onsite mass ratio below which a state counts as correlation-free.
pub const CORRELATION_FREE_TOL: f64 = 1e-8;
/// Agreement required between the constructed and the requested state.
pub const ROUND_TRIP_TOL: f64 = 1e-8;

fn adjoint_op(op: &MatrixField) -> Result<MatrixField> {
    op.map(Role::FermionOp, |_, v| v.adjoint())
}

/// V^dag Gamma V.
pub fn disentangle_with(op: &MatrixField, state: &MatrixField) -> Result<MatrixField> {
    apply_op(&adjoint_op(op)?, state)
}

fn round_trip(op: &MatrixField, state: &MatrixField) -> Result<f64> {
    let vac = MatrixField::fermion_vacuum(&state.grid, state.n);
    Ok(apply_op(op, &vac)?.max_diff(state))
}

/// Disentangler of a chiral-class state in the gauge u_1 = q, u_2 = 1.
pub fn build_disentangler_chiral(state: &MatrixField, class: AZClass) -> Result<MatrixField> {
    if !class.is_chiral() {
        return Err(Error::Unsupported(format!("class {class} is not a chiral class")));
    }
    let q = extract_reduced(state, class)?;
    let one = |m: usize| vec![eye(m); q.values.len()];
    let m = q.values[0].nrows();
    let (first, second) = match class {
        AZClass::BDI => (q.values.clone(), one(m)),
        AZClass::AIII => (q.values.iter().map(|x| x * crate::linalg::c(0.0, -1.0)).collect(), one(m)),
        _ => {
            let q0 = vacuum_reduced(class, state.n)?;
            (one(m), q.values.iter().map(|x| x * q0.adjoint()).collect())
        }
    };
    let pair = ReducedField::new(ReducedKind::UPair, class, state.grid.clone(), state.n, first, Some(second))?;
    let op = reconstruct(&pair)?;
    let residual = round_trip(&op, state)?;
    if residual > ROUND_TRIP_TOL {
        return Err(Error::NonConvergence { residual, k: vec![] });
    }
    Ok(op)
}

/// State with reduced matrix q = u q_vac u(-k)^T (classes DIII, CI) and the
/// operation that generates it from the vacuum. The CI operation block is
/// u(-k)^*, since that block w yields q = -w(-k)^* w(k)^dag.
pub fn build_disentangler_bdg(u: &ReducedField) -> Result<(MatrixField, MatrixField)> {
    if !matches!(u.class, AZClass::DIII | AZClass::CI) || u.kind != ReducedKind::U {
        return Err(Error::Invalid(format!("expected a u field of class DIII or CI, got {:?} {}", u.kind, u.class)));
    }
    let values: Vec<CMat> = match u.class {
        AZClass::CI => (0..u.grid.len()).map(|i| u.values[u.grid.negate_index(i)].conjugate()).collect(),
        _ => u.values.clone(),
    };
    let op = reconstruct(&ReducedField::new(ReducedKind::U, u.class, u.grid.clone(), u.n, values, None)?)?;
    let vac = MatrixField::fermion_vacuum(&u.grid, u.n);
    let state = apply_op(&op, &vac)?;
    let q0 = vacuum_reduced(u.class, u.n)?;
    let q = extract_reduced(&state, u.class)?;
    let residual = (0..u.grid.len())
        .map(|i| {
            let expect = &u.values[i] * &q0 * u.values[u.grid.negate_index(i)].transpose();
            crate::linalg::max_abs_diff(&q.values[i], &expect)
        })
        .fold(0.0, f64::max);
    if residual > ROUND_TRIP_TOL {
        return Err(Error::NonConvergence { residual, k: vec![] });
    }
    Ok((state, op))
}

#[derive(Clone, Debug, Serialize)]
pub struct Decision {
    pub class: AZClass,
    pub d: usize,
    /// None when the invariant needed to decide is not computed numerically.
    pub verdict: Option<bool>,
    /// Answer based on the tables alone (no numerical invariant was needed or
    /// available).
    pub table_only: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant: Option<InvariantResult>,
    /// Invariant value that places the state outside the disentanglable subgroup.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<InvariantResult>,
    pub info: HomomorphismInfo,
    /// Offsite mass ratio of V^dag Gamma V for the returned disentangler.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_mass: Option<f64>,
    #[serde(skip)]
    pub op: Option<MatrixField>,
}

/// Invariant that detects the strong class of a state, where implemented.
fn deciding_invariant(class: AZClass, d: usize) -> Option<InvariantName> {
    use AZClass::*;
    use InvariantName as N;
    match (d, class) {
        (1, D | BDI) => Some(N::Pfaffian),
        (1, DIII | AII) => Some(N::Sewing),
        (1, AIII | CII) => Some(N::Winding),
        (2, A | D | C) => Some(N::Chern),
        (2, AII) => Some(N::FuKane),
        (3, DIII | CI | AIII) => Some(N::Winding),
        (3, AII) => Some(N::Cs),
        _ => None,
    }
}

fn in_image(image: KGroup, inv: &InvariantResult) -> bool {
    match image {
        KGroup::Zero => !inv.is_nontrivial(),
        KGroup::TwoZ | KGroup::TwoZxTwoZ => inv.value % 2 == 0,
        _ => true,
    }
}

/// Explicit disentangler for a state in the disentanglable subgroup: chiral
/// classes directly, BDI-symmetric class-D states through BDI, and the
/// identity for states that are already correlation-free.
fn find_op(state: &MatrixField, class: AZClass) -> Option<MatrixField> {
    if offsite_mass_ratio(state).is_ok_and(|r| r < CORRELATION_FREE_TOL) && state.max_deviation_from_constant() < 1e-12 {
        if MatrixField::fermion_vacuum(&state.grid, state.n).max_diff(state) < ROUND_TRIP_TOL {
            return Some(MatrixField::identity(&state.grid, state.n, Role::FermionOp));
        }
    }
    if class.is_chiral() {
        return build_disentangler_chiral(state, class).ok();
    }
    if class == AZClass::D && check_class(state, AZClass::BDI, 1e-8).is_ok_and(|c| c.iter().all(|x| x.pass)) {
        return build_disentangler_chiral(state, AZClass::BDI).ok();
    }
    None
}

/// Decide whether a symmetric state lies in the image of the symmetric
/// operations, with the invariant as certificate and, when constructible,
/// the disentangler.
pub fn is_disentanglable(state: &MatrixField, class: AZClass, d: usize) -> Result<Decision> {
    if state.role != Role::FermionState {
        return Err(Error::Invalid("disentanglability is decided for fermion states".into()));
    }
    if d != state.grid.dim() {
        return Err(Error::Dimension(format!("grid has d = {}, asked about d = {d}", state.grid.dim())));
    }
    crate::symmetry::require_class(state, class, 1e-8)?;
    let info = homomorphism_info(class, d);
    let invariant = match deciding_invariant(class, d) {
        Some(name) => Some(invariants::evaluate(name, state, class)?),
        None => None,
    };
    let full = info.image == info.state_group;
    let (verdict, table_only, obstruction) = match &invariant {
        _ if full => (Some(true), invariant.is_none(), None),
        Some(inv) if in_image(info.image, inv) => (Some(true), false, None),
        Some(inv) => (Some(false), false, Some(inv.clone())),
        None => (None, true, None),
    };
    let op = if verdict == Some(true) { find_op(state, class) } else { None };
    let residual_mass = match &op {
        Some(v) => Some(offsite_mass_ratio(&disentangle_with(v, state)?)?),
        None => None,
    };
    Ok(Decision { class, d, verdict, table_only, invariant, obstruction, info, residual_mass, op })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bz_grid::BZGrid;
    use crate::gaussian_core::{fourier, ground_state_covariance};
    use crate::models;

    fn kitaev(mu: f64, n: usize) -> MatrixField {
        let grid = BZGrid::cubic(1, n).unwrap();
        ground_state_covariance(&fourier(&models::kitaev_chain(mu, 1.0, 1.0).unwrap(), &grid).unwrap(), 1e-8).unwrap()
    }

    #[test]
    fn vacuum_needs_identity() {
        let grid = BZGrid::cubic(1, 8).unwrap();
        let vac = MatrixField::fermion_vacuum(&grid, 2);
        let op = build_disentangler_chiral(&vac, AZClass::BDI).unwrap();
        assert!(op.max_diff(&MatrixField::identity(&grid, 2, Role::FermionOp)) < 1e-12);
        let d = is_disentanglable(&vac, AZClass::D, 1).unwrap();
        assert_eq!(d.verdict, Some(true));
        assert!(d.op.is_some());
    }

    #[test]
    fn kitaev_bdi_disentangles() {
        let s = kitaev(1.0, 32);
        let op = build_disentangler_chiral(&s, AZClass::BDI).unwrap();
        let out = disentangle_with(&op, &s).unwrap();
        assert!(offsite_mass_ratio(&out).unwrap() < 1e-8);
        assert!(out.max_deviation_from_constant() < 1e-8);
    }

    #[test]
    fn kitaev_class_d_decision_has_op() {
        let d = is_disentanglable(&kitaev(1.0, 32), AZClass::D, 1).unwrap();
        assert_eq!(d.verdict, Some(true));
        assert!(d.residual_mass.unwrap() < 1e-8);
    }
}
