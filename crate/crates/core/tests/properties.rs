//! Randomized checks of structural properties: Fourier round trips, closure
//! of valid fields under symmetric operations, hermitianization and polar
//! factors, and the additivity and invariance of topological invariants.

use gausstopo::deform::{connect_states, FieldPath};
use gausstopo::gaussian_core::{apply_op, direct_sum, fourier, ground_state_covariance, inverse_fourier, validate, DEFAULT_TOL};
use gausstopo::invariants::{chern_number, chern_of, evaluate, winding_number, InvariantName};
use gausstopo::linalg::{c, eigh, expm, eye, max_abs, max_abs_diff, CMat};
use gausstopo::models::{self, base_map_3d, random_boson_op_field, random_boson_state_field, random_op_field, random_state, random_state_field, random_unitary_field, state_field, RandomSpec};
use gausstopo::symmetry::{check_class, check_emergent, class_symmetries, check_op_symmetry, hermitianize, hermitianize_report, polar_unitarize};
use gausstopo::{AZClass, BZGrid, MatrixField, Role};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn class_strategy() -> impl Strategy<Value = AZClass> {
    prop::sample::select(AZClass::ALL.to_vec())
}

fn grid(dim: usize, n: usize) -> BZGrid {
    BZGrid::cubic(dim, n).unwrap()
}

fn symmetric(f: &MatrixField, class: AZClass) -> bool {
    check_class(f, class, 1e-8).unwrap().iter().all(|c| c.pass)
}

/// diag(e^{i w k}, 1, ...) on a d = 1 grid.
fn winding_diag(g: &BZGrid, m: usize, w: i64) -> Vec<CMat> {
    (0..g.len())
        .map(|i| {
            let mut u = eye(m);
            u[(0, 0)] = c(0.0, w as f64 * g.k(i)[0]).exp();
            u
        })
        .collect()
}

fn random_unitary_matrix(m: usize, rng: &mut impl Rng) -> CMat {
    let h = CMat::from_fn(m, m, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    expm(&((&h + h.adjoint()) * c(0.0, 1.0)))
}

fn kitaev(mu: f64, n: usize) -> MatrixField {
    state_field(&models::kitaev_chain(mu, 1.0, 1.0).unwrap(), &grid(1, n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fourier_round_trip(class in class_strategy(), dim in 1usize..3, range in 1i64..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_state(class, &RandomSpec::new(class.layout_factor(), dim, range, 0.8), &mut rng).unwrap();
        let field = fourier(&h, &grid(dim, 8)).unwrap();
        let back = inverse_fourier(&field, range as usize).unwrap();
        for t in &h.terms {
            let b = back.block(&t.dr).cloned().unwrap_or_else(|| CMat::zeros(t.block.nrows(), t.block.ncols()));
            prop_assert!(max_abs_diff(&b, &t.block) < 1e-12, "dr {:?}", t.dr);
        }
        for t in &back.terms {
            if h.block(&t.dr).is_none() {
                prop_assert!(max_abs(&t.block) < 1e-12);
            }
        }
    }

    #[test]
    fn ground_state_covariance_squares_to_minus_one(class in class_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_state(class, &RandomSpec::new(class.layout_factor(), 2, 1, 0.5), &mut rng).unwrap();
        let gamma = ground_state_covariance(&fourier(&h, &grid(2, 8)).unwrap(), 1e-8).unwrap();
        let one = eye(gamma.values[0].nrows());
        for g in &gamma.values {
            prop_assert!(max_abs(&(g * g + &one)) < 1e-10);
        }
    }

    #[test]
    fn fermion_ops_keep_states_valid(class in class_strategy(), dim in 1usize..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = grid(dim, 8);
        let spec = RandomSpec::new(class.layout_factor(), dim, 1, 0.8);
        let state = random_state_field(class, &g, &spec, &mut rng).unwrap();
        let op = random_op_field(class, &g, &spec, &mut rng).unwrap();
        prop_assert!(validate(&op, DEFAULT_TOL).pass);
        let out = apply_op(&op, &state).unwrap();
        let r = validate(&out, DEFAULT_TOL);
        prop_assert!(r.pass, "{:?}", r);
        prop_assert!(symmetric(&out, class));
    }

    #[test]
    fn boson_ops_keep_states_valid(dim in 1usize..3, n in 1usize..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = grid(dim, 6);
        let spec = RandomSpec::new(n, dim, 1, 0.6);
        let state = random_boson_state_field(&[], &g, &spec, &mut rng).unwrap();
        let op = random_boson_op_field(&[], &g, &spec, &mut rng).unwrap();
        prop_assert!(validate(&state, 1e-8).pass);
        prop_assert!(validate(&op, 1e-8).pass);
        let r = validate(&apply_op(&op, &state).unwrap(), 1e-8);
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn every_valid_state_has_emergent_particle_hole(class in class_strategy(), dim in 1usize..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state_field(class, &grid(dim, 8), &RandomSpec::new(class.layout_factor(), dim, 1, 1.0), &mut rng).unwrap();
        prop_assert!(check_emergent(&state, 1e-10).unwrap().holds("phs"));
    }

    #[test]
    fn hermitianized_ops_are_real_involutions(class in class_strategy(), dim in 1usize..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let op = random_op_field(class, &grid(dim, 8), &RandomSpec::new(class.layout_factor(), dim, 1, 1.0), &mut rng).unwrap();
        let x = hermitianize(&op).unwrap();
        prop_assert_eq!(x.role, Role::Hamiltonian);
        let r = hermitianize_report(&x);
        prop_assert!(r.hermiticity < 1e-12 && r.involution < 1e-10, "{:?}", r);
        prop_assert!(r.reality < 1e-10 && r.particle_hole < 1e-10, "{:?}", r);
    }

    #[test]
    fn winding_is_additive_and_reverses_under_transposed_reflection(w1 in -3i64..4, w2 in -3i64..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = grid(1, 64);
        let dress = |w: i64, rng: &mut ChaCha8Rng| -> Vec<CMat> {
            let l = random_unitary_field(&g, 2, 1, 1.0, rng);
            let r = random_unitary_field(&g, 2, 1, 1.0, rng);
            winding_diag(&g, 2, w).iter().enumerate().map(|(i, d)| &l[i] * d * &r[i]).collect()
        };
        let a = dress(w1, &mut rng);
        let b = dress(w2, &mut rng);
        prop_assert_eq!(winding_number(&g, &a).unwrap().value, w1);
        let prod: Vec<CMat> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        prop_assert_eq!(winding_number(&g, &prod).unwrap().value, w1 + w2);
        let transposed: Vec<CMat> = (0..g.len()).map(|i| a[g.negate_index(i)].transpose()).collect();
        prop_assert_eq!(winding_number(&g, &transposed).unwrap().value, -w1);
        let conjugated: Vec<CMat> = (0..g.len()).map(|i| a[g.negate_index(i)].conjugate()).collect();
        prop_assert_eq!(winding_number(&g, &conjugated).unwrap().value, w1);
    }

    #[test]
    fn chern_is_gauge_invariant(m in prop::sample::select(vec![-3.0, -1.0, 1.0, 3.0]), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = grid(2, 16);
        let h = fourier(&models::chern_insulator(m).unwrap(), &g).unwrap();
        let base = chern_number(&h).unwrap();
        prop_assert!(base.quantized);
        let u = random_unitary_matrix(h.values[0].nrows(), &mut rng);
        let rotated: Vec<CMat> = h.values.iter().map(|x| &u * x * u.adjoint()).collect();
        prop_assert_eq!(chern_of(&g, &rotated).unwrap().value, base.value);
    }

    #[test]
    fn bdi_invariants_add_under_direct_sum(mu1 in -3.5f64..3.5, mu2 in -3.5f64..3.5, seed in any::<u64>()) {
        prop_assume!((mu1.abs() - 2.0).abs() > 0.2 && (mu2.abs() - 2.0).abs() > 0.2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = grid(1, 32);
        let op = random_op_field(AZClass::BDI, &g, &RandomSpec::new(1, 1, 1, 0.8), &mut rng).unwrap();
        let a = apply_op(&op, &kitaev(mu1, 32)).unwrap();
        let b = kitaev(mu2, 32);
        let sum = direct_sum(&a, &b, 1).unwrap();
        for (name, combine) in [(InvariantName::Winding, 0), (InvariantName::Pfaffian, 1)] {
            let va = evaluate(name, &a, AZClass::BDI).unwrap().value;
            let vb = evaluate(name, &b, AZClass::BDI).unwrap().value;
            let vs = evaluate(name, &sum, AZClass::BDI).unwrap().value;
            prop_assert_eq!(vs, if combine == 0 { va + vb } else { va * vb });
        }
    }

    #[test]
    fn symmetric_ops_preserve_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = kitaev(1.0, 32);
        let op = random_op_field(AZClass::BDI, &k.grid, &RandomSpec::new(1, 1, 2, 1.5), &mut rng).unwrap();
        let moved = apply_op(&op, &k).unwrap();
        prop_assert_eq!(evaluate(InvariantName::Winding, &moved, AZClass::BDI).unwrap().value, 1);
        prop_assert_eq!(evaluate(InvariantName::Pfaffian, &moved, AZClass::D).unwrap().value, -1);

        let g = grid(2, 16);
        let pip = state_field(&models::chiral_pip(1.0, 1.0, 1.0).unwrap(), &g).unwrap();
        let op = random_op_field(AZClass::D, &g, &RandomSpec::new(1, 2, 1, 1.5), &mut rng).unwrap();
        let moved = apply_op(&op, &pip).unwrap();
        prop_assert_eq!(chern_number(&moved).unwrap().value, chern_number(&pip).unwrap().value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn polar_factors_of_symplectic_ops(dim in 1usize..3, n in 1usize..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let op = random_boson_op_field(&[], &grid(dim, 4), &RandomSpec::new(n, dim, 1, 1.0), &mut rng).unwrap();
        let (w, p) = polar_unitarize(&op).unwrap();
        prop_assert!(validate(&w, 1e-8).pass);
        prop_assert!(validate(&p, 1e-8).pass);
        let one = eye(2 * n);
        for i in 0..op.grid.len() {
            let (wi, pi) = (w.at(i), p.at(i));
            prop_assert!(max_abs_diff(&(wi * wi.adjoint()), &one) < 1e-10);
            prop_assert!(max_abs_diff(pi, &pi.adjoint()) < 1e-10);
            prop_assert!(eigh(pi).0.iter().all(|&x| x > 0.0));
            prop_assert!(max_abs_diff(&(wi * pi), op.at(i)) < 1e-9 * max_abs(op.at(i)).max(1.0));
        }
    }
}

#[test]
fn winding_3d_survives_transposed_reflection() {
    let g = grid(3, 12);
    for mass in [2.0, -2.0] {
        let u = base_map_3d(&g, mass).unwrap();
        let w = winding_number(&g, &u).unwrap();
        assert!(w.quantized && w.value != 0, "mass {mass}: {w:?}");
        let t: Vec<CMat> = (0..g.len()).map(|i| u[g.negate_index(i)].transpose()).collect();
        assert_eq!(winding_number(&g, &t).unwrap().value, w.value, "mass {mass}");
    }
}

#[test]
fn kitaev_phase_diagram_changes_only_at_gap_closings() {
    let g = grid(1, 64);
    for step in -14..=14 {
        let mu = step as f64 * 0.25;
        let h = fourier(&models::kitaev_chain(mu, 1.0, 1.0).unwrap(), &g).unwrap();
        let state = ground_state_covariance(&h, 1e-8);
        if mu.abs() == 2.0 {
            assert!(state.is_err(), "mu = {mu} should be gapless");
            continue;
        }
        let w = evaluate(InvariantName::Winding, &state.unwrap(), AZClass::BDI).unwrap().value;
        assert_eq!(w, i64::from(mu.abs() < 2.0), "mu = {mu}");
    }
}

#[test]
fn connecting_ops_are_symmetric_and_keep_invariants() {
    let path = FieldPath::sample(40, |l| Ok(kitaev(0.2 + 1.2 * l, 32))).unwrap();
    let conn = connect_states(&path, 1e-6).unwrap();
    for sym in class_symmetries(AZClass::BDI, 1).unwrap() {
        let chk = check_op_symmetry(&conn.op, &sym, 1e-8);
        assert!(chk.pass, "{chk:?}");
    }
    for other in [-1.0, 3.0] {
        let s = kitaev(other, 32);
        let before = evaluate(InvariantName::Winding, &s, AZClass::BDI).unwrap().value;
        let after = evaluate(InvariantName::Winding, &apply_op(&conn.op, &s).unwrap(), AZClass::BDI).unwrap().value;
        assert_eq!(before, after, "mu = {other}");
    }
}
