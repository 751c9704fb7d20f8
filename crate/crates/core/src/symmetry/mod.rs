//! Physical symmetries (time reversal, U(1), SU(2)), the tenfold class they
//! select, and the reduced matrices that parametrize symmetric states and
//! operations.
//!
//! Internal index layouts: spinful classes order the n modes as
//! spin (x) rest; the CII row orders them as spin (x) pseudo-spin (x) rest.

mod reduce;

pub use reduce::{extract_reduced, reconstruct, vacuum_reduced, ReducedField, ReducedKind};

use crate::error::{Error, Result};
use crate::gaussian_core::{MatrixField, Particle, Role, SymplecticForm};
use crate::linalg::{
    c, eye, isy, kron, kron_all, max_abs, max_abs_diff, pauli, polar, real_part, to_complex, CMat,
    RMat,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AZClass {
    A,
    AIII,
    AI,
    BDI,
    D,
    DIII,
    AII,
    CII,
    C,
    CI,
}

impl AZClass {
    pub const ALL: [AZClass; 10] = [
        AZClass::A,
        AZClass::AIII,
        AZClass::AI,
        AZClass::BDI,
        AZClass::D,
        AZClass::DIII,
        AZClass::AII,
        AZClass::CII,
        AZClass::C,
        AZClass::CI,
    ];

    pub fn index(self) -> usize {
        AZClass::ALL.iter().position(|&c| c == self).unwrap()
    }

    /// The physical symmetry row that selects this class.
    pub fn spec(self) -> SymmetrySpec {
        use Su2 as S;
        use Trs as T;
        let (trs, u1, su2) = match self {
            AZClass::A => (T::None, true, S::None),
            AZClass::AIII => (T::Minus, false, S::Z),
            AZClass::AI => (T::Plus, true, S::None),
            AZClass::BDI => (T::Plus, false, S::None),
            AZClass::D => (T::None, false, S::None),
            AZClass::DIII => (T::Minus, false, S::None),
            AZClass::AII => (T::Minus, true, S::None),
            AZClass::CII => (T::Minus, false, S::Other),
            AZClass::C => (T::None, false, S::Full),
            AZClass::CI => (T::Minus, false, S::Full),
        };
        SymmetrySpec { trs, u1, su2 }
    }

    /// Number of equal internal blocks the class layout requires (n must be divisible by it).
    pub fn layout_factor(self) -> usize {
        match self {
            AZClass::A | AZClass::AI | AZClass::BDI | AZClass::D => 1,
            AZClass::CII => 4,
            _ => 2,
        }
    }

    pub fn is_chiral(self) -> bool {
        matches!(self, AZClass::AIII | AZClass::BDI | AZClass::CII)
    }
}

impl fmt::Display for AZClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for AZClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        AZClass::ALL
            .iter()
            .copied()
            .find(|c| c.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown symmetry class '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trs {
    None,
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Su2 {
    None,
    Z,
    Full,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetrySpec {
    pub trs: Trs,
    pub u1: bool,
    pub su2: Su2,
}

/// Table lookup; combinations outside the ten admitted rows are rejected.
pub fn az_class(spec: &SymmetrySpec) -> Result<AZClass> {
    AZClass::ALL
        .iter()
        .copied()
        .find(|c| c.spec() == *spec)
        .ok_or_else(|| Error::Config(format!("symmetry combination {spec:?} is not tabulated")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymLabel {
    Phi,
    Rx,
    Rz,
    PseudoRx,
    PseudoRz,
    ThetaSpinless,
    ThetaSpinHalf,
}

#[derive(Clone, Debug)]
pub struct SymmetryMatrix {
    pub label: SymLabel,
    pub matrix: RMat,
    pub antiunitary: bool,
}

impl SymmetryMatrix {
    fn new(label: SymLabel, m: CMat, antiunitary: bool) -> Self {
        SymmetryMatrix { label, matrix: real_part(&m), antiunitary }
    }

    pub fn complex(&self) -> CMat {
        to_complex(&self.matrix)
    }

    /// +1 or -1.
    pub fn square_sign(&self) -> f64 {
        let m = &self.matrix;
        (m * m)[(0, 0)].signum()
    }
}

fn divide(n: usize, by: usize, what: &str) -> Result<usize> {
    if n % by != 0 || n == 0 {
        return Err(Error::Config(format!(
            "{what} requires the mode count to be a multiple of {by}, got n = {n}"
        )));
    }
    Ok(n / by)
}

pub fn symmetry_matrices(spec: &SymmetrySpec, n: usize) -> Result<Vec<SymmetryMatrix>> {
    az_class(spec)?;
    let mut out = Vec::new();
    let s = pauli;
    if spec.u1 {
        out.push(SymmetryMatrix::new(SymLabel::Phi, kron(&isy(), &eye(n)), false));
    }
    match spec.su2 {
        Su2::None => {}
        Su2::Z => {
            let r = divide(n, 2, "spin rotation")?;
            out.push(SymmetryMatrix::new(SymLabel::Rz, kron_all(&[isy(), s(3), eye(r)]), false));
        }
        Su2::Full => {
            let r = divide(n, 2, "spin rotation")?;
            out.push(SymmetryMatrix::new(SymLabel::Rx, kron_all(&[isy(), s(1), eye(r)]), false));
            out.push(SymmetryMatrix::new(SymLabel::Rz, kron_all(&[isy(), s(3), eye(r)]), false));
        }
        Su2::Other => {
            let r = divide(n, 4, "pseudo-spin rotation")?;
            out.push(SymmetryMatrix::new(
                SymLabel::PseudoRx,
                kron_all(&[isy(), s(0), s(1), eye(r)]),
                false,
            ));
            out.push(SymmetryMatrix::new(
                SymLabel::PseudoRz,
                kron_all(&[isy(), s(0), s(3), eye(r)]),
                false,
            ));
        }
    }
    match spec.trs {
        Trs::None => {}
        Trs::Plus => out.push(SymmetryMatrix::new(
            SymLabel::ThetaSpinless,
            kron(&s(3), &eye(n)),
            true,
        )),
        Trs::Minus => {
            let r = divide(n, 2, "spin-1/2 time reversal")?;
            out.push(SymmetryMatrix::new(
                SymLabel::ThetaSpinHalf,
                kron_all(&[s(3), isy(), eye(r)]),
                true,
            ));
        }
    }
    Ok(out)
}

pub fn class_symmetries(class: AZClass, n: usize) -> Result<Vec<SymmetryMatrix>> {
    symmetry_matrices(&class.spec(), n)
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryCheck {
    pub label: SymLabel,
    pub violation: f64,
    pub pass: bool,
}

/// Fermions: V Gamma V^T = +Gamma (unitary) or -Gamma (antiunitary) at each k;
/// bosons: V Gamma V^T = Gamma.
pub fn check_state_symmetry(state: &MatrixField, sym: &SymmetryMatrix, tol: f64) -> SymmetryCheck {
    let v = sym.complex();
    let sign = match state.role.particle() {
        Particle::Fermion if sym.antiunitary => -1.0,
        _ => 1.0,
    };
    let violation = crate::parallel::map(state.values.len(), |i| {
        let g = &state.values[i];
        max_abs_diff(&(&v * g * v.transpose()), &(g * c(sign, 0.0)))
    })
    .into_iter()
    .fold(0.0, f64::max);
    SymmetryCheck { label: sym.label, violation, pass: violation < tol }
}

/// [V(k), V_s] = 0 at each k.
pub fn check_op_symmetry(op: &MatrixField, sym: &SymmetryMatrix, tol: f64) -> SymmetryCheck {
    let v = sym.complex();
    let violation = crate::parallel::map(op.values.len(), |i| {
        let x = &op.values[i];
        max_abs(&(x * &v - &v * x))
    })
    .into_iter()
    .fold(0.0, f64::max);
    SymmetryCheck { label: sym.label, violation, pass: violation < tol }
}

/// Check a state or operation against every symmetry of a class.
pub fn check_class(field: &MatrixField, class: AZClass, tol: f64) -> Result<Vec<SymmetryCheck>> {
    let syms = class_symmetries(class, field.n)?;
    Ok(syms
        .iter()
        .map(|s| {
            if field.role.is_op() {
                check_op_symmetry(field, s, tol)
            } else {
                check_state_symmetry(field, s, tol)
            }
        })
        .collect())
}

pub fn require_class(field: &MatrixField, class: AZClass, tol: f64) -> Result<()> {
    for chk in check_class(field, class, tol)? {
        if !chk.pass {
            return Err(Error::Symmetry(format!(
                "{:?} violated by {:.3e} for class {class}",
                chk.label, chk.violation
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct Relation {
    pub name: String,
    pub violation: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmergentReport {
    pub relations: Vec<Relation>,
}

impl EmergentReport {
    pub fn holds(&self, name: &str) -> bool {
        self.relations.iter().any(|r| r.name == name && r.holds)
    }
}

/// Which Hamiltonian-style relations hold on G(k) = i Gamma(k).
pub fn check_emergent(state: &MatrixField, tol: f64) -> Result<EmergentReport> {
    if state.role != Role::FermionState {
        return Err(Error::Invalid("emergent symmetries are defined for fermion states".into()));
    }
    let n = state.n;
    let g: Vec<CMat> = state.values.iter().map(|x| x * crate::linalg::I).collect();
    let neg = |i: usize| &g[state.grid.negate_index(i)];
    let worst = |f: &dyn Fn(usize) -> f64| (0..g.len()).map(f).fold(0.0, f64::max);
    let mut relations = Vec::new();
    let mut push = |name: &str, v: f64| {
        relations.push(Relation { name: name.into(), violation: v, holds: v < tol })
    };
    push("phs", worst(&|i| max_abs(&(g[i].conjugate() + neg(i)))));
    let sz = kron(&pauli(3), &eye(n));
    push("sls_spinless", worst(&|i| max_abs(&(&sz * &g[i] + &g[i] * &sz))));
    let phi = SymplecticForm::new(n).matrix();
    push("u1", worst(&|i| max_abs(&(&phi * &g[i] - &g[i] * &phi))));
    push(
        "trs_spinless",
        worst(&|i| max_abs_diff(&(&sz * g[i].conjugate() * &sz), neg(i))),
    );
    if n % 2 == 0 {
        let t = kron_all(&[pauli(3), isy(), eye(n / 2)]);
        push(
            "trs_spinhalf",
            worst(&|i| max_abs_diff(&(&t * g[i].conjugate() * t.adjoint()), neg(i))),
        );
        push("sls_spinhalf", worst(&|i| max_abs(&(&t * &g[i] + &g[i] * &t))));
    }
    Ok(EmergentReport { relations })
}

/// X(k) = [[0, V], [V^dag, 0]]; returned with role Hamiltonian and 2n modes.
pub fn hermitianize(op: &MatrixField) -> Result<MatrixField> {
    if op.role != Role::FermionOp {
        return Err(Error::Invalid("hermitianization takes a fermion operation".into()));
    }
    let m = 2 * op.n;
    op.map(Role::Hamiltonian, |_, v| {
        let mut x = CMat::zeros(2 * m, 2 * m);
        x.view_mut((0, m), (m, m)).copy_from(v);
        x.view_mut((m, 0), (m, m)).copy_from(&v.adjoint());
        x
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HermitianizeReport {
    pub hermiticity: f64,
    pub involution: f64,
    pub reality: f64,
    pub particle_hole: f64,
}

/// Residuals of X = X^dag, X^2 = 1, X* = X(-k) and (sz (x) 1) X* (sz (x) 1) = -X(-k).
pub fn hermitianize_report(x: &MatrixField) -> HermitianizeReport {
    let m = 2 * x.n;
    let one = eye(m);
    let sz = kron(&pauli(3), &eye(m / 2));
    let mut r = HermitianizeReport { hermiticity: 0.0, involution: 0.0, reality: 0.0, particle_hole: 0.0 };
    for (i, v) in x.values.iter().enumerate() {
        let neg = x.at_neg(i);
        r.hermiticity = r.hermiticity.max(max_abs_diff(v, &v.adjoint()));
        r.involution = r.involution.max(max_abs_diff(&(v * v), &one));
        r.reality = r.reality.max(max_abs_diff(&v.conjugate(), neg));
        r.particle_hole = r
            .particle_hole
            .max(max_abs(&(&sz * v.conjugate() * &sz + neg)));
    }
    r
}

/// V_b(k) = W(k) P(k) with W unitary-symplectic and P positive symplectic.
pub fn polar_unitarize(op: &MatrixField) -> Result<(MatrixField, MatrixField)> {
    if op.role != Role::BosonOp {
        return Err(Error::Invalid("polar unitarization takes a boson operation".into()));
    }
    let parts = crate::parallel::try_map(op.values.len(), |i| polar(&op.values[i]))?;
    let (w, p): (Vec<CMat>, Vec<CMat>) = parts.into_iter().unzip();
    Ok((
        MatrixField::new(op.grid.clone(), op.n, Role::BosonOp, w)?,
        MatrixField::new(op.grid.clone(), op.n, Role::BosonOp, p)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_lookup_examples() {
        let a = SymmetrySpec { trs: Trs::None, u1: true, su2: Su2::None };
        assert_eq!(az_class(&a).unwrap(), AZClass::A);
        let bdi = SymmetrySpec { trs: Trs::Plus, u1: false, su2: Su2::None };
        assert_eq!(az_class(&bdi).unwrap(), AZClass::BDI);
        let ci = SymmetrySpec { trs: Trs::Minus, u1: false, su2: Su2::Full };
        assert_eq!(az_class(&ci).unwrap(), AZClass::CI);
        let bad = SymmetrySpec { trs: Trs::Plus, u1: true, su2: Su2::Full };
        assert!(az_class(&bad).is_err());
    }

    #[test]
    fn class_lookup_is_a_bijection() {
        let mut count = 0;
        for trs in [Trs::None, Trs::Plus, Trs::Minus] {
            for u1 in [false, true] {
                for su2 in [Su2::None, Su2::Z, Su2::Full, Su2::Other] {
                    if let Ok(c) = az_class(&SymmetrySpec { trs, u1, su2 }) {
                        assert_eq!(c.spec(), SymmetrySpec { trs, u1, su2 });
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 10);
    }

    #[test]
    fn explicit_matrices() {
        let spec = |trs, u1, su2| SymmetrySpec { trs, u1, su2 };
        let m = symmetry_matrices(&spec(Trs::Plus, false, Su2::None), 1).unwrap();
        assert_eq!(m[0].matrix, RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let m = symmetry_matrices(&spec(Trs::None, true, Su2::None), 1).unwrap();
        assert_eq!(m[0].matrix, RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let m = symmetry_matrices(&spec(Trs::Minus, false, Su2::Z), 2).unwrap();
        let rz = m.iter().find(|s| s.label == SymLabel::Rz).unwrap();
        let want = kron(&isy(), &pauli(3));
        assert_eq!(rz.matrix, real_part(&want));
        assert!(symmetry_matrices(&spec(Trs::Minus, false, Su2::None), 3).is_err());
    }

    #[test]
    fn matrices_are_orthogonal_with_labelled_squares() {
        for class in AZClass::ALL {
            for s in class_symmetries(class, 4).unwrap() {
                let m = &s.matrix;
                let o = (m * m.transpose() - RMat::identity(8, 8)).abs().max();
                assert!(o < 1e-12);
                let sq = m * m;
                let want = match s.label {
                    SymLabel::ThetaSpinless => 1.0,
                    _ => -1.0,
                };
                assert!((sq - RMat::identity(8, 8) * want).abs().max() < 1e-12, "{:?}", s.label);
            }
        }
    }
}
