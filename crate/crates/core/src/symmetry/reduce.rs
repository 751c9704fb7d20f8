//! Canonical reduced matrices of symmetric states and operations.
//!
//! States are handled through G(k) = i Gamma(k); operations through V(k).
//! Each class has a fixed linear map to a smaller block (h, q or u) and back.

use super::{require_class, AZClass};
use crate::bz_grid::BZGrid;
use crate::error::{Error, Result};
use crate::gaussian_core::{MatrixField, Role};
use crate::linalg::{
    c, eye, isy, kron, kron_all, max_abs, max_abs_diff, pauli, vec_block, CMat, C64, I, ZERO,
};
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReducedKind {
    H,
    Q,
    U,
    UPair,
}

#[derive(Clone, Debug)]
pub struct ReducedField {
    pub kind: ReducedKind,
    pub class: AZClass,
    pub grid: BZGrid,
    /// Mode count of the full field this was extracted from.
    pub n: usize,
    pub values: Vec<CMat>,
    /// Second member of a u-pair.
    pub second: Option<Vec<CMat>>,
}

impl ReducedField {
    pub fn new(
        kind: ReducedKind,
        class: AZClass,
        grid: BZGrid,
        n: usize,
        values: Vec<CMat>,
        second: Option<Vec<CMat>>,
    ) -> Result<Self> {
        if values.len() != grid.len() || second.as_ref().is_some_and(|s| s.len() != grid.len()) {
            return Err(Error::Dimension("reduced field length differs from grid".into()));
        }
        if (kind == ReducedKind::UPair) != second.is_some() {
            return Err(Error::Invalid("only u-pairs carry a second component".into()));
        }
        Ok(ReducedField { kind, class, grid, n, values, second })
    }

    fn neg(&self, i: usize) -> usize {
        self.grid.negate_index(i)
    }

    /// Max residual of the class-specific relation (including flatness or unitarity).
    pub fn constraint_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let parts: Vec<&Vec<CMat>> = std::iter::once(&self.values).chain(self.second.as_ref()).collect();
        for vals in &parts {
            for v in vals.iter() {
                let m = v.nrows();
                let r = match self.kind {
                    ReducedKind::H => max_abs_diff(v, &v.adjoint()).max(max_abs_diff(&(v * v), &eye(m))),
                    _ => max_abs_diff(&(v * v.adjoint()), &eye(m)),
                };
                worst = worst.max(r);
            }
        }
        let vals = &self.values;
        for i in 0..vals.len() {
            let (x, xn) = (&vals[i], &vals[self.neg(i)]);
            let m = x.nrows();
            let tr = |k: usize| kron(&isy(), &eye(k));
            let r = match (self.kind, self.class) {
                (ReducedKind::H, AZClass::D) => max_abs(&(x.conjugate() + xn)),
                (ReducedKind::H, AZClass::AI) | (ReducedKind::U, AZClass::AI) => {
                    max_abs_diff(&x.conjugate(), xn)
                }
                (ReducedKind::H, AZClass::AII) | (ReducedKind::U, AZClass::AII) => {
                    let t = tr(m / 2);
                    max_abs_diff(&(&t * x.conjugate() * t.adjoint()), xn)
                }
                (ReducedKind::H, AZClass::C) => {
                    let t = tr(m / 2);
                    max_abs(&(&t * x.conjugate() * t.adjoint() + xn))
                }
                (ReducedKind::U, AZClass::C) | (ReducedKind::Q, AZClass::CII) | (ReducedKind::UPair, AZClass::CII) => {
                    let t = tr(m / 2);
                    max_abs_diff(&(&t * x.conjugate() * t.adjoint()), xn)
                }
                (ReducedKind::Q, AZClass::CI) => max_abs_diff(&x.transpose(), xn),
                (ReducedKind::Q, AZClass::BDI) => max_abs_diff(&x.conjugate(), xn),
                (ReducedKind::Q, AZClass::DIII) => max_abs(&(x.transpose() + xn)),
                _ => 0.0,
            };
            worst = worst.max(r);
        }
        worst
    }
}

fn em() -> [C64; 2] {
    [c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)]
}

fn ep() -> [C64; 2] {
    [c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]
}

/// (sigma_0 -/+ sigma_y)/2.
fn p_minus() -> CMat {
    (eye(2) - pauli(2)) * c(0.5, 0.0)
}

fn p_plus() -> CMat {
    (eye(2) + pauli(2)) * c(0.5, 0.0)
}

fn diag2(a: &CMat, b: &CMat) -> CMat {
    let (ra, rb) = (a.nrows(), b.nrows());
    let mut m = CMat::zeros(ra + rb, ra + rb);
    m.view_mut((0, 0), (ra, ra)).copy_from(a);
    m.view_mut((ra, ra), (rb, rb)).copy_from(b);
    m
}

/// diag(1_n, sigma_z (x) 1) with sigma_z on spin (C, CI, DIII) or on the pseudo-spin (CII).
fn d_spin(n: usize) -> CMat {
    diag2(&eye(n), &kron(&pauli(3), &eye(n / 2)))
}

fn d_pseudo(n: usize) -> CMat {
    diag2(&eye(n), &kron_all(&[pauli(0), pauli(3), eye(n / 4)]))
}

/// Swap (1/2) sum_mu sigma_mu (x) sigma_mu on (Majorana, spin), extended by 1_rest.
fn swap(rest: usize) -> CMat {
    let s = (0..4).fold(CMat::zeros(4, 4), |acc, mu| acc + kron(&pauli(mu), &pauli(mu)))
        * c(0.5, 0.0);
    kron(&s, &eye(rest))
}

fn block(m: &CMat, r: usize, cc: usize, h: usize, w: usize) -> CMat {
    m.view((r, cc), (h, w)).into_owned()
}

fn u1_reduce(g: &CMat, n: usize) -> CMat {
    let e = vec_block(&em(), n);
    e.adjoint() * g * e
}

/// P_- (x) x + sign P_+ (x) y.
fn u1_lift(x: &CMat, y: &CMat, sign: f64) -> CMat {
    kron(&p_minus(), x) + kron(&p_plus(), y) * c(sign, 0.0)
}

fn cii_sy(rest: usize) -> CMat {
    kron(&pauli(2), &eye(rest))
}

fn diii_q(g: &CMat, n: usize) -> CMat {
    let s = swap(n / 2);
    let b = &s * g * &s;
    let sz = kron(&pauli(3), &eye(n / 2));
    block(&b, 0, n, n, n) * sz - block(&b, 0, 0, n, n) * I
}

fn diii_lift(q: &CMat, n: usize) -> CMat {
    let s = swap(n / 2);
    let sz = kron(&pauli(3), &eye(n / 2));
    let a = q + q.adjoint();
    let d = q - q.adjoint();
    let half = c(0.5, 0.0);
    let mut b = CMat::zeros(2 * n, 2 * n);
    b.view_mut((0, 0), (n, n)).copy_from(&(&d * I * half));
    b.view_mut((0, n), (n, n)).copy_from(&(&a * &sz * half));
    b.view_mut((n, 0), (n, n)).copy_from(&(&sz * &a * half));
    b.view_mut((n, n), (n, n)).copy_from(&(&sz * &d * &sz * (-I) * half));
    &s * b * &s
}

fn ci_h_from_q(q: &CMat) -> CMat {
    let a = q + q.adjoint();
    let d = q - q.adjoint();
    let m = q.nrows();
    let half = c(0.5, 0.0);
    let mut h = CMat::zeros(2 * m, 2 * m);
    h.view_mut((0, 0), (m, m)).copy_from(&(&a * half));
    h.view_mut((0, m), (m, m)).copy_from(&(&d * I * half));
    h.view_mut((m, 0), (m, m)).copy_from(&(&d * I * half));
    h.view_mut((m, m), (m, m)).copy_from(&(&a * (-half)));
    h
}

fn cii_h_from_q(q: &CMat, rest: usize) -> CMat {
    let sy = cii_sy(rest);
    let a = q + q.adjoint();
    let d = q - q.adjoint();
    let m = q.nrows();
    let half = c(0.5, 0.0);
    let mut h = CMat::zeros(2 * m, 2 * m);
    h.view_mut((0, 0), (m, m)).copy_from(&(&d * I * half));
    h.view_mut((0, m), (m, m)).copy_from(&(&a * &sy * (-half)));
    h.view_mut((m, 0), (m, m)).copy_from(&(&sy * &a * (-half)));
    h.view_mut((m, m), (m, m)).copy_from(&(&sy * &d * &sy * (-I) * half));
    h
}

/// Joint eigenvectors (Majorana (x) spin) used for AIII operations.
fn aiii_vectors() -> ([C64; 4], [C64; 4]) {
    let h = c(0.5, 0.0);
    let ih = c(0.0, 0.5);
    ([h, -ih, -ih, h], [-h, -ih, ih, h])
}

/// Projector onto sigma_y (x) sigma_z = a, sigma_z (x) sigma_y = b.
fn aiii_projector(a: f64, b: f64) -> CMat {
    let ma = kron(&pauli(2), &pauli(3));
    let mb = kron(&pauli(3), &pauli(2));
    (eye(4) + ma * c(a, 0.0)) * (eye(4) + mb * c(b, 0.0)) * c(0.25, 0.0)
}

fn ci_op_vector() -> [C64; 4] {
    let e = em();
    [e[0], e[1], ZERO, ZERO]
}

fn check_layout(class: AZClass, n: usize) -> Result<()> {
    let f = class.layout_factor();
    if n % f != 0 {
        return Err(Error::Config(format!(
            "class {class} needs a mode count divisible by {f}, got {n}"
        )));
    }
    Ok(())
}

/// Reduced matrix of a symmetric fermion state or operation.
pub fn extract_reduced(field: &MatrixField, class: AZClass) -> Result<ReducedField> {
    check_layout(class, field.n)?;
    require_class(field, class, 1e-8)?;
    match field.role {
        Role::FermionState => extract_state(field, class),
        Role::FermionOp => extract_op(field, class),
        r => Err(Error::Invalid(format!("no reduced form for {r:?}"))),
    }
}

fn extract_state(field: &MatrixField, class: AZClass) -> Result<ReducedField> {
    let n = field.n;
    let g: Vec<CMat> = field.values.iter().map(|x| x * I).collect();
    let map = |f: &dyn Fn(&CMat) -> CMat| -> Vec<CMat> { g.iter().map(f).collect() };
    let (kind, values) = match class {
        AZClass::A | AZClass::AI | AZClass::AII => (ReducedKind::H, map(&|x| u1_reduce(x, n))),
        AZClass::D => (ReducedKind::H, g.clone()),
        AZClass::C => {
            let d = d_spin(n);
            (ReducedKind::H, map(&|x| u1_reduce(&(&d * x * &d), n)))
        }
        AZClass::CI => {
            let d = d_spin(n);
            let m = n / 2;
            (
                ReducedKind::Q,
                map(&|x| {
                    let h = u1_reduce(&(&d * x * &d), n);
                    block(&h, 0, 0, m, m) - block(&h, 0, m, m, m) * I
                }),
            )
        }
        AZClass::CII => {
            let d = d_pseudo(n);
            let m = n / 2;
            let sy = cii_sy(n / 4);
            (
                ReducedKind::Q,
                map(&|x| {
                    let h = u1_reduce(&(&d * x * &d), n);
                    -(block(&h, 0, m, m, m) * &sy) - block(&h, 0, 0, m, m) * I
                }),
            )
        }
        AZClass::BDI => (ReducedKind::Q, map(&|x| block(x, 0, n, n, n) * I)),
        AZClass::DIII => (ReducedKind::Q, map(&|x| diii_q(x, n))),
        AZClass::AIII => {
            let e = vec_block(&em(), n / 2);
            (ReducedKind::Q, map(&|x| e.adjoint() * diii_q(x, n) * &e))
        }
    };
    ReducedField::new(kind, class, field.grid.clone(), n, values, None)
}

fn extract_op(field: &MatrixField, class: AZClass) -> Result<ReducedField> {
    let n = field.n;
    let v = &field.values;
    let map = |f: &dyn Fn(&CMat) -> CMat| -> Vec<CMat> { v.iter().map(f).collect() };
    let grid = field.grid.clone();
    match class {
        AZClass::A | AZClass::AI | AZClass::AII => {
            ReducedField::new(ReducedKind::U, class, grid, n, map(&|x| u1_reduce(x, n)), None)
        }
        AZClass::D => ReducedField::new(ReducedKind::U, class, grid, n, v.clone(), None),
        AZClass::BDI => ReducedField::new(
            ReducedKind::UPair,
            class,
            grid,
            n,
            map(&|x| block(x, 0, 0, n, n)),
            Some(map(&|x| block(x, n, n, n, n))),
        ),
        AZClass::DIII => {
            let t = d_spin(n) * swap(n / 2);
            ReducedField::new(
                ReducedKind::U,
                class,
                grid,
                n,
                map(&|x| u1_reduce(&(&t * x * t.adjoint()), n)),
                None,
            )
        }
        AZClass::C => {
            let d = d_spin(n);
            ReducedField::new(ReducedKind::U, class, grid, n, map(&|x| u1_reduce(&(&d * x * &d), n)), None)
        }
        AZClass::CI => {
            let f = vec_block(&ci_op_vector(), n / 2);
            ReducedField::new(ReducedKind::U, class, grid, n, map(&|x| f.adjoint() * x * &f), None)
        }
        AZClass::CII => {
            let d = d_pseudo(n);
            let m = n / 2;
            let es = diag2(&eye(m), &cii_sy(n / 4));
            let e1 = vec_block(&em(), m);
            let e2 = vec_block(&ep(), m);
            let u: Vec<CMat> = map(&|x| {
                let u = u1_reduce(&(&d * x * &d), n);
                &es * u * &es
            });
            ReducedField::new(
                ReducedKind::UPair,
                class,
                grid,
                n,
                u.iter().map(|x| e1.adjoint() * x * &e1).collect(),
                Some(u.iter().map(|x| e2.adjoint() * x * &e2).collect()),
            )
        }
        AZClass::AIII => {
            let (fa, fb) = aiii_vectors();
            let fa = vec_block(&fa, n / 2);
            let fb = vec_block(&fb, n / 2);
            ReducedField::new(
                ReducedKind::UPair,
                class,
                grid,
                n,
                map(&|x| fa.adjoint() * x * &fa),
                Some(map(&|x| fb.adjoint() * x * &fb)),
            )
        }
    }
}

/// Inverse of `extract_reduced`: the full state (h, q kinds) or operation (u kinds).
pub fn reconstruct(r: &ReducedField) -> Result<MatrixField> {
    let n = r.n;
    check_layout(r.class, n)?;
    let len = r.grid.len();
    let neg = |i: usize| r.grid.negate_index(i);
    let v = &r.values;
    let expect = |m: usize| -> Result<()> {
        if v[0].nrows() != m {
            return Err(Error::Dimension(format!(
                "reduced block is {}x{}, class {} with n = {n} needs {m}x{m}",
                v[0].nrows(),
                v[0].ncols(),
                r.class
            )));
        }
        Ok(())
    };
    let state = matches!(r.kind, ReducedKind::H | ReducedKind::Q);
    let out: Vec<CMat> = match (r.kind, r.class) {
        (ReducedKind::H, AZClass::A | AZClass::AI | AZClass::AII) => {
            expect(n)?;
            (0..len).map(|i| u1_lift(&v[i], &v[neg(i)].conjugate(), -1.0)).collect()
        }
        (ReducedKind::H, AZClass::D) => {
            expect(2 * n)?;
            v.clone()
        }
        (ReducedKind::H, AZClass::C) => {
            expect(n)?;
            let d = d_spin(n);
            (0..len)
                .map(|i| &d * u1_lift(&v[i], &v[neg(i)].conjugate(), -1.0) * &d)
                .collect()
        }
        (ReducedKind::Q, AZClass::CI) => {
            expect(n / 2)?;
            let d = d_spin(n);
            (0..len)
                .map(|i| {
                    let h = ci_h_from_q(&v[i]);
                    let hn = ci_h_from_q(&v[neg(i)]);
                    &d * u1_lift(&h, &hn.conjugate(), -1.0) * &d
                })
                .collect()
        }
        (ReducedKind::Q, AZClass::CII) => {
            expect(n / 2)?;
            let d = d_pseudo(n);
            (0..len)
                .map(|i| {
                    let h = cii_h_from_q(&v[i], n / 4);
                    let hn = cii_h_from_q(&v[neg(i)], n / 4);
                    &d * u1_lift(&h, &hn.conjugate(), -1.0) * &d
                })
                .collect()
        }
        (ReducedKind::Q, AZClass::BDI) => {
            expect(n)?;
            v.iter()
                .map(|q| {
                    let off = q * (-I);
                    let mut g = CMat::zeros(2 * n, 2 * n);
                    g.view_mut((0, n), (n, n)).copy_from(&off);
                    g.view_mut((n, 0), (n, n)).copy_from(&off.adjoint());
                    g
                })
                .collect()
        }
        (ReducedKind::Q, AZClass::DIII) => {
            expect(n)?;
            v.iter().map(|q| diii_lift(q, n)).collect()
        }
        (ReducedKind::Q, AZClass::AIII) => {
            expect(n / 2)?;
            (0..len)
                .map(|i| {
                    let q = u1_lift(&v[i], &v[neg(i)].transpose(), -1.0);
                    diii_lift(&q, n)
                })
                .collect()
        }
        (ReducedKind::U, AZClass::A | AZClass::AI | AZClass::AII) => {
            expect(n)?;
            (0..len).map(|i| u1_lift(&v[i], &v[neg(i)].conjugate(), 1.0)).collect()
        }
        (ReducedKind::U, AZClass::D) => {
            expect(2 * n)?;
            v.clone()
        }
        (ReducedKind::UPair, AZClass::BDI) => {
            expect(n)?;
            let s = r.second.as_ref().unwrap();
            (0..len).map(|i| diag2(&v[i], &s[i])).collect()
        }
        (ReducedKind::U, AZClass::DIII) => {
            expect(n)?;
            let t = d_spin(n) * swap(n / 2);
            (0..len)
                .map(|i| t.adjoint() * u1_lift(&v[i], &v[neg(i)].conjugate(), 1.0) * &t)
                .collect()
        }
        (ReducedKind::U, AZClass::C) => {
            expect(n)?;
            let d = d_spin(n);
            (0..len)
                .map(|i| &d * u1_lift(&v[i], &v[neg(i)].conjugate(), 1.0) * &d)
                .collect()
        }
        (ReducedKind::U, AZClass::CI) => {
            expect(n / 2)?;
            let a = kron(&pauli(3), &pauli(2));
            let pm = (eye(4) - &a) * c(0.5, 0.0);
            let pp = (eye(4) + &a) * c(0.5, 0.0);
            (0..len)
                .map(|i| kron(&pm, &v[i]) + kron(&pp, &v[neg(i)].conjugate()))
                .collect()
        }
        (ReducedKind::UPair, AZClass::CII) => {
            expect(n / 2)?;
            let s = r.second.as_ref().unwrap();
            let m = n / 2;
            let es = diag2(&eye(m), &cii_sy(n / 4));
            let d = d_pseudo(n);
            let u: Vec<CMat> = (0..len)
                .map(|i| &es * (kron(&p_minus(), &v[i]) + kron(&p_plus(), &s[i])) * &es)
                .collect();
            (0..len)
                .map(|i| &d * u1_lift(&u[i], &u[neg(i)].conjugate(), 1.0) * &d)
                .collect()
        }
        (ReducedKind::UPair, AZClass::AIII) => {
            expect(n / 2)?;
            let s = r.second.as_ref().unwrap();
            let p = aiii_projector;
            (0..len)
                .map(|i| {
                    kron(&p(-1.0, -1.0), &v[i])
                        + kron(&p(1.0, 1.0), &v[neg(i)].conjugate())
                        + kron(&p(-1.0, 1.0), &s[i])
                        + kron(&p(1.0, -1.0), &s[neg(i)].conjugate())
                })
                .collect()
        }
        (k, cl) => {
            return Err(Error::Invalid(format!("no {k:?} form for class {cl}")));
        }
    };
    if state {
        let values = out.into_iter().map(|g| g * (-I)).collect();
        MatrixField::new(r.grid.clone(), n, Role::FermionState, values)
    } else {
        MatrixField::new(r.grid.clone(), n, Role::FermionOp, out)
    }
}

/// Reduced matrix of the vacuum state for a class (k-independent).
pub fn vacuum_reduced(class: AZClass, n: usize) -> Result<CMat> {
    let grid = BZGrid::cubic(1, 4)?;
    let vac = MatrixField::fermion_vacuum(&grid, n);
    Ok(extract_reduced(&vac, class)?.values[0].clone())
}
