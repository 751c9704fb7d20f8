use super::field::{MatrixField, Role};
use super::SymplecticForm;
use crate::linalg::{eigh, eye, max_abs, max_abs_diff};
use serde::Serialize;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub role: Role,
    pub tol: f64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ValidationReport {
    fn new(role: Role, tol: f64, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        ValidationReport { role, tol, checks, pass }
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.value)
    }

    /// Largest violation over checks that measure a residual.
    pub fn max_violation(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.name != "min_eigenvalue")
            .fold(0.0, |a, c| a.max(c.value))
    }
}

fn residual(name: &str, value: f64, tol: f64) -> Check {
    Check { name: name.into(), value, pass: value < tol }
}

fn role_check(field: &MatrixField, want: Role) -> Option<Check> {
    (field.role != want).then(|| Check {
        name: "role".into(),
        value: 1.0,
        pass: false,
    })
}

fn pointwise(field: &MatrixField, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    crate::parallel::map(field.values.len(), f)
        .into_iter()
        .fold(0.0, f64::max)
}

/// max over k of |Gamma(k)* - Gamma(-k)|.
fn reality(field: &MatrixField) -> f64 {
    pointwise(field, |i| {
        max_abs_diff(&field.values[i].conjugate(), field.at_neg(i))
    })
}

pub fn validate_fermion_state(field: &MatrixField, tol: f64) -> ValidationReport {
    let one = eye(2 * field.n);
    let mut checks: Vec<Check> = role_check(field, Role::FermionState).into_iter().collect();
    checks.push(residual(
        "antihermiticity",
        pointwise(field, |i| max_abs(&(&field.values[i] + field.values[i].adjoint()))),
        tol,
    ));
    checks.push(residual(
        "flatness",
        pointwise(field, |i| max_abs(&(&field.values[i] * &field.values[i] + &one))),
        tol,
    ));
    checks.push(residual("reality", reality(field), tol));
    ValidationReport::new(Role::FermionState, tol, checks)
}

pub fn validate_boson_state(field: &MatrixField, tol: f64) -> ValidationReport {
    let s = SymplecticForm::new(field.n).matrix();
    let mut checks: Vec<Check> = role_check(field, Role::BosonState).into_iter().collect();
    checks.push(residual(
        "hermiticity",
        pointwise(field, |i| max_abs(&(&field.values[i] - field.values[i].adjoint()))),
        tol,
    ));
    let min_eig = crate::parallel::map(field.values.len(), |i| eigh(&field.values[i]).0[0])
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    checks.push(Check {
        name: "min_eigenvalue".into(),
        value: min_eig,
        pass: min_eig > tol,
    });
    checks.push(residual(
        "symplectic_flatness",
        pointwise(field, |i| {
            let g = &field.values[i];
            max_abs_diff(&(g * &s * g), &s)
        }),
        tol,
    ));
    checks.push(residual("reality", reality(field), tol));
    ValidationReport::new(Role::BosonState, tol, checks)
}

pub fn validate_fermion_op(field: &MatrixField, tol: f64) -> ValidationReport {
    let one = eye(2 * field.n);
    let mut checks: Vec<Check> = role_check(field, Role::FermionOp).into_iter().collect();
    checks.push(residual(
        "unitarity",
        pointwise(field, |i| {
            max_abs_diff(&(&field.values[i] * field.values[i].adjoint()), &one)
        }),
        tol,
    ));
    checks.push(residual("reality", reality(field), tol));
    ValidationReport::new(Role::FermionOp, tol, checks)
}

pub fn validate_boson_op(field: &MatrixField, tol: f64) -> ValidationReport {
    let s = SymplecticForm::new(field.n).matrix();
    let mut checks: Vec<Check> = role_check(field, Role::BosonOp).into_iter().collect();
    checks.push(residual(
        "symplecticity",
        pointwise(field, |i| {
            let v = &field.values[i];
            max_abs_diff(&(v * &s * v.adjoint()), &s)
        }),
        tol,
    ));
    checks.push(residual("reality", reality(field), tol));
    ValidationReport::new(Role::BosonOp, tol, checks)
}

/// Majorana-form Hamiltonian: h(k) Hermitian with h(k)* = -h(-k).
pub fn validate_hamiltonian(field: &MatrixField, tol: f64) -> ValidationReport {
    let mut checks: Vec<Check> = role_check(field, Role::Hamiltonian).into_iter().collect();
    checks.push(residual(
        "hermiticity",
        pointwise(field, |i| max_abs(&(&field.values[i] - field.values[i].adjoint()))),
        tol,
    ));
    checks.push(residual(
        "particle_hole",
        pointwise(field, |i| max_abs(&(field.values[i].conjugate() + field.at_neg(i)))),
        tol,
    ));
    ValidationReport::new(Role::Hamiltonian, tol, checks)
}

/// Dispatch on the field's role.
pub fn validate(field: &MatrixField, tol: f64) -> ValidationReport {
    match field.role {
        Role::FermionState => validate_fermion_state(field, tol),
        Role::BosonState => validate_boson_state(field, tol),
        Role::FermionOp => validate_fermion_op(field, tol),
        Role::BosonOp => validate_boson_op(field, tol),
        Role::Hamiltonian => validate_hamiltonian(field, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bz_grid::make_grid;
    use crate::linalg::{c, CMat};

    #[test]
    fn vacuum_passes_and_zero_fails() {
        let g = make_grid(1, &[8]).unwrap();
        let vac = MatrixField::fermion_vacuum(&g, 2);
        assert!(validate_fermion_state(&vac, DEFAULT_TOL).pass);
        let zero = MatrixField::constant(&g, 1, Role::FermionState, &CMat::zeros(2, 2)).unwrap();
        let r = validate_fermion_state(&zero, DEFAULT_TOL);
        assert!(!r.pass);
        assert_eq!(r.value("flatness"), Some(1.0));
    }

    #[test]
    fn boson_state_examples() {
        let g = make_grid(1, &[8]).unwrap();
        let one = MatrixField::identity(&g, 1, Role::BosonState);
        assert!(validate_boson_state(&one, DEFAULT_TOL).pass);
        for r in [0.1, 0.7, 2.0] {
            let sq = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c((2.0 * r as f64).exp(), 0.0),
                c((-2.0 * r as f64).exp(), 0.0),
            ]));
            let f = MatrixField::constant(&g, 1, Role::BosonState, &sq).unwrap();
            assert!(validate_boson_state(&f, DEFAULT_TOL).pass, "r={r}");
        }
        let two = MatrixField::constant(&g, 1, Role::BosonState, &(eye(2) * c(2.0, 0.0))).unwrap();
        let r = validate_boson_state(&two, DEFAULT_TOL);
        assert!(!r.pass);
        assert!((r.value("symplectic_flatness").unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn op_examples() {
        let g = make_grid(1, &[8]).unwrap();
        assert!(validate_fermion_op(&MatrixField::identity(&g, 2, Role::FermionOp), DEFAULT_TOL).pass);
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(0.5, 0.0)]));
        let v = MatrixField::constant(&g, 1, Role::BosonOp, &d).unwrap();
        assert!(validate_boson_op(&v, DEFAULT_TOL).pass);
    }

    #[test]
    fn role_mismatch_fails() {
        let g = make_grid(1, &[8]).unwrap();
        let v = MatrixField::identity(&g, 1, Role::FermionOp);
        assert!(!validate_fermion_state(&v, DEFAULT_TOL).pass);
    }
}
