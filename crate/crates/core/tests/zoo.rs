//! Model zoo: validity, class membership and the invariants each model is
//! built to carry.

use gausstopo::gaussian_core::{direct_sum, fourier, validate, DEFAULT_TOL};
use gausstopo::invariants::{self, chern_number, evaluate, InvariantName};
use gausstopo::models::{self, state_field};
use gausstopo::symmetry::{check_class, extract_reduced, require_class};
use gausstopo::{AZClass, BZGrid, MatrixField};

fn grid(dim: usize, n: usize) -> BZGrid {
    BZGrid::cubic(dim, n).unwrap()
}

fn valid(f: &MatrixField) {
    let r = validate(f, DEFAULT_TOL);
    assert!(r.pass, "{r:?}");
}

fn in_class(f: &MatrixField, class: AZClass) {
    let checks = check_class(f, class, 1e-9).unwrap();
    assert!(checks.iter().all(|c| c.pass), "{class}: {checks:?}");
}

#[test]
fn kitaev_phases() {
    let g = grid(1, 64);
    for (mu, w, pf) in [(1.0, 1, -1), (-1.0, 1, -1), (3.0, 0, 1), (-3.0, 0, 1)] {
        let s = state_field(&models::kitaev_chain(mu, 1.0, 1.0).unwrap(), &g).unwrap();
        valid(&s);
        in_class(&s, AZClass::BDI);
        in_class(&s, AZClass::D);
        assert_eq!(evaluate(InvariantName::Winding, &s, AZClass::BDI).unwrap().value, w, "mu = {mu}");
        assert_eq!(evaluate(InvariantName::Pfaffian, &s, AZClass::D).unwrap().value, pf, "mu = {mu}");
    }
}

#[test]
fn kitaev_gap_closes_at_two_t() {
    let h = fourier(&models::kitaev_chain(2.0, 1.0, 1.0).unwrap(), &grid(1, 64)).unwrap();
    assert!(gausstopo::gaussian_core::ground_state_covariance(&h, 1e-8).is_err());
}

#[test]
fn doubled_kitaev_pfaffian_is_trivial() {
    let g = grid(1, 32);
    let s = state_field(&models::kitaev_chain(1.0, 1.0, 1.0).unwrap(), &g).unwrap();
    let d = direct_sum(&s, &s, 1).unwrap();
    assert_eq!(invariants::pfaffian_z2(&d).unwrap().value, 1);
    assert_eq!(evaluate(InvariantName::Winding, &d, AZClass::BDI).unwrap().value, 2);
}

#[test]
fn pip_chern_numbers() {
    let g = grid(2, 24);
    let h = models::chiral_pip(1.0, 1.0, 1.0).unwrap();
    let s = state_field(&h, &g).unwrap();
    valid(&s);
    in_class(&s, AZClass::D);
    assert_eq!(chern_number(&s).unwrap().value, 1);
    let doubled = direct_sum(&s, &s, 1).unwrap();
    assert_eq!(chern_number(&doubled).unwrap().value, 2);
    let conj = state_field(&models::time_reversed(&h).unwrap(), &g).unwrap();
    assert_eq!(chern_number(&conj).unwrap().value, -1);
    let triv = state_field(&models::chiral_pip(5.0, 1.0, 1.0).unwrap(), &g).unwrap();
    assert_eq!(chern_number(&triv).unwrap().value, 0);
}

#[test]
fn chern_insulator_window() {
    let g = grid(2, 24);
    for (m, want) in [(-1.0, 1), (1.0, -1), (3.0, 0), (-3.0, 0)] {
        let s = state_field(&models::chern_insulator(m).unwrap(), &g).unwrap();
        in_class(&s, AZClass::A);
        assert_eq!(evaluate(InvariantName::Chern, &s, AZClass::A).unwrap().value, want, "m = {m}");
        // the full Majorana field doubles the charge-conserving block
        assert_eq!(chern_number(&s).unwrap().value, 2 * want);
    }
}

#[test]
fn translation_windings() {
    let g = grid(1, 64);
    for shift in [-2, -1, 1, 2] {
        let op = fourier(&models::lattice_translation(shift, 1).unwrap(), &g).unwrap();
        valid(&op);
        assert_eq!(evaluate(InvariantName::Winding, &op, AZClass::A).unwrap().value, shift);
    }
}

#[test]
fn qsh_fu_kane() {
    let g = grid(2, 24);
    for (m, rashba, want) in [(-1.0, 0.0, -1), (-1.0, 0.3, -1), (3.0, 0.0, 1), (1.0, 0.2, -1)] {
        let s = state_field(&models::qsh_model(m, rashba).unwrap(), &g).unwrap();
        valid(&s);
        in_class(&s, AZClass::AII);
        assert_eq!(invariants::fu_kane_z2(&s, AZClass::AII).unwrap().value, want, "m = {m}, rashba = {rashba}");
    }
    let s = state_field(&models::qsh_model(-1.0, 0.2).unwrap(), &g).unwrap();
    let d = direct_sum(&s, &s, 2).unwrap();
    assert_eq!(invariants::fu_kane_z2(&d, AZClass::AII).unwrap().value, 1);
}

#[test]
fn ti3d_is_symmetric() {
    let s = state_field(&models::ti3d_model(2.0).unwrap(), &grid(3, 6)).unwrap();
    valid(&s);
    in_class(&s, AZClass::AII);
}

#[test]
fn diii_wire_sewing() {
    let g = grid(1, 32);
    let s = fourier(&models::diii_wire().unwrap(), &g).unwrap();
    valid(&s);
    in_class(&s, AZClass::DIII);
    assert_eq!(invariants::sewing_z2(&s, AZClass::DIII).unwrap().value, -1);
    let vac = MatrixField::fermion_vacuum(&g, 2);
    assert_eq!(invariants::sewing_z2(&vac, AZClass::DIII).unwrap().value, 1);
}

#[test]
fn ci_models_are_symmetric() {
    for dim in [1, 2, 3] {
        let s = fourier(&models::ci_model(dim).unwrap(), &grid(dim, 6)).unwrap();
        valid(&s);
        in_class(&s, AZClass::CI);
        require_class(&s, AZClass::CI, 1e-9).unwrap();
        extract_reduced(&s, AZClass::CI).unwrap();
    }
}

#[test]
fn squeezer_windings() {
    let g = grid(1, 32);
    for w in -2..=2 {
        let op = fourier(&models::boson_squeezer_winding(w, 0.4).unwrap(), &g).unwrap();
        valid(&op);
        assert_eq!(evaluate(InvariantName::Winding, &op, AZClass::A).unwrap().value, w);
    }
}
