//! Small dense complex matrix kernels shared by every module.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

/// Pauli matrices: 0 = identity, 1 = x, 2 = y, 3 = z.
pub fn pauli(i: usize) -> CMat {
    let z = ZERO;
    let o = ONE;
    match i {
        0 => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        1 => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        2 => CMat::from_row_slice(2, 2, &[z, -I, I, z]),
        3 => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("pauli index {i} out of range"),
    }
}

/// i sigma_y = [[0, 1], [-1, 0]].
pub fn isy() -> CMat {
    pauli(2) * I
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all(parts: &[CMat]) -> CMat {
    parts
        .iter()
        .fold(eye(1), |acc, p| kron(&acc, p))
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn max_imag(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.im.abs()))
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Column block v (x) 1_m, shape (len(v) m) x m.
pub fn vec_block(v: &[C64], m: usize) -> CMat {
    kron(&CMat::from_column_slice(v.len(), 1, v), &eye(m))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let n = m.nrows();
    let mut vecs = CMat::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Apply a real function to the spectrum of a Hermitian matrix.
pub fn herm_func(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&x| c(f(x), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// Matrix sign of a Hermitian matrix; on failure returns the smallest |eigenvalue|.
pub fn herm_sign(m: &CMat, gap_tol: f64) -> std::result::Result<CMat, f64> {
    let (vals, vecs) = eigh(m);
    let min = vals.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
    if min <= gap_tol {
        return Err(min);
    }
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&x| c(x.signum(), 0.0)),
    ));
    Ok(&vecs * d * vecs.adjoint())
}

/// Columns spanning the eigenvalue < 0 subspace, plus the smallest |eigenvalue|.
pub fn negative_subspace(m: &CMat) -> (CMat, f64) {
    let (vals, vecs) = eigh(m);
    let occ: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] < 0.0).collect();
    let gap = vals.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
    let mut out = CMat::zeros(m.nrows(), occ.len());
    for (j, &i) in occ.iter().enumerate() {
        out.set_column(j, &vecs.column(i));
    }
    (out, gap)
}

pub fn expm(m: &CMat) -> CMat {
    m.clone().exp()
}

pub fn det(m: &CMat) -> C64 {
    m.clone().determinant()
}

/// Polar decomposition m = W P with W unitary and P Hermitian positive semidefinite.
pub fn polar(m: &CMat) -> Result<(CMat, CMat)> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Degenerate("svd failed".into()))?;
    let vt = svd.v_t.ok_or_else(|| Error::Degenerate("svd failed".into()))?;
    if svd.singular_values.iter().any(|&s| s <= 1e-300) {
        return Err(Error::Degenerate("singular matrix in polar decomposition".into()));
    }
    let w = &u * &vt;
    let s = CMat::from_diagonal(&svd.singular_values.map(|x| c(x, 0.0)));
    let p = vt.adjoint() * s * &vt;
    Ok((w, hermitian_part(&p)))
}

/// Closest unitary (the polar factor).
pub fn unitarize(m: &CMat) -> Result<CMat> {
    Ok(polar(m)?.0)
}

/// Eigendecomposition of a normal (e.g. unitary) matrix via the complex Schur form.
pub fn normal_eig(m: &CMat) -> (Vec<C64>, CMat) {
    let schur = m.clone().schur();
    let (q, t) = schur.unpack();
    let vals = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    (vals, q)
}

/// u^t for unitary u, using the principal branch of the eigenphases.
pub fn unitary_power(u: &CMat, t: f64) -> CMat {
    let (vals, q) = normal_eig(u);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|z| C64::from_polar(1.0, z.arg() * t)),
    ));
    &q * d * q.adjoint()
}

/// Logarithm of a Hermitian positive-definite matrix.
pub fn log_posdef(m: &CMat) -> Result<CMat> {
    let (vals, _) = eigh(m);
    if vals.first().map_or(true, |&x| x <= 0.0) {
        return Err(Error::Invalid("matrix is not positive definite".into()));
    }
    Ok(herm_func(m, f64::ln))
}

/// Pfaffian of a real antisymmetric matrix by Householder skew-tridiagonalization.
pub fn pfaffian(a: &RMat) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Invalid("pfaffian needs a square matrix".into()));
    }
    let scale = a.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let asym = (a + a.transpose()).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if asym > 1e-10 * scale {
        return Err(Error::Invalid(format!(
            "matrix is not antisymmetric (|A + A^T| = {asym:.3e})"
        )));
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut a = a.clone();
    let mut pf = 1.0;
    for i in 0..n - 2 {
        let x: Vec<f64> = (i + 1..n).map(|r| a[(r, i)]).collect();
        let sigma: f64 = x[1..].iter().map(|v| v * v).sum();
        let (v, tau, alpha) = if sigma == 0.0 {
            (vec![0.0; x.len()], 0.0, x[0])
        } else {
            let norm_x = (x[0] * x[0] + sigma).sqrt();
            let mut v = x.clone();
            let alpha = if x[0] <= 0.0 {
                v[0] -= norm_x;
                norm_x
            } else {
                v[0] += norm_x;
                -norm_x
            };
            let nv = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            v.iter_mut().for_each(|t| *t /= nv);
            (v, 2.0, alpha)
        };
        a[(i + 1, i)] = alpha;
        a[(i, i + 1)] = -alpha;
        for r in i + 2..n {
            a[(r, i)] = 0.0;
            a[(i, r)] = 0.0;
        }
        if tau != 0.0 {
            let m = n - i - 1;
            let mut w = vec![0.0; m];
            for r in 0..m {
                let mut s = 0.0;
                for c in 0..m {
                    s += a[(i + 1 + r, i + 1 + c)] * v[c];
                }
                w[r] = tau * s;
            }
            for r in 0..m {
                for c in 0..m {
                    a[(i + 1 + r, i + 1 + c)] += v[r] * w[c] - w[r] * v[c];
                }
            }
            pf *= 1.0 - tau;
        }
        if i % 2 == 0 {
            pf *= -alpha;
        }
    }
    pf *= a[(n - 2, n - 1)];
    Ok(pf)
}

/// Pfaffian of a complex antisymmetric matrix by Parlett-Reid elimination with pivoting.
pub fn pfaffian_complex(a: &CMat) -> Result<C64> {
    let n = a.nrows();
    let scale = max_abs(a).max(1.0);
    let asym = max_abs(&(a + a.transpose()));
    if asym > 1e-8 * scale {
        return Err(Error::Invalid(format!(
            "matrix is not antisymmetric (|A + A^T| = {asym:.3e})"
        )));
    }
    if n % 2 == 1 {
        return Ok(ZERO);
    }
    let mut a = a.clone();
    let mut pf = ONE;
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        for r in k + 2..n {
            if a[(r, k)].norm() > a[(kp, k)].norm() {
                kp = r;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        if a[(k + 1, k)] == ZERO {
            return Ok(ZERO);
        }
        let piv = a[(k, k + 1)];
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<C64> = (k + 2..n).map(|c| a[(k, c)] / piv).collect();
            let col: Vec<C64> = (k + 2..n).map(|r| a[(r, k + 1)]).collect();
            for (ri, r) in (k + 2..n).enumerate() {
                for (ci, cc) in (k + 2..n).enumerate() {
                    a[(r, cc)] += tau[ri] * col[ci] - col[ri] * tau[ci];
                }
            }
        }
        k += 2;
    }
    Ok(pf)
}

/// Phase of a complex number as a continuous step relative to a reference angle.
pub fn unwrap_step(prev: f64, next: f64) -> f64 {
    let mut d = next - prev;
    while d > std::f64::consts::PI {
        d -= 2.0 * std::f64::consts::PI;
    }
    while d <= -std::f64::consts::PI {
        d += 2.0 * std::f64::consts::PI;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_skew(n: usize, rng: &mut ChaCha8Rng) -> RMat {
        let x = RMat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &x - x.transpose()
    }

    #[test]
    fn pfaffian_of_elementary_blocks() {
        let a = RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert_eq!(pfaffian(&a).unwrap(), 1.0);
        assert_eq!(pfaffian(&(-a)).unwrap(), -1.0);
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 4, 6, 8, 12, 16] {
            for _ in 0..5 {
                let a = random_skew(n, &mut rng);
                let pf = pfaffian(&a).unwrap();
                let d = a.clone().determinant();
                assert!((pf * pf - d).abs() <= 1e-8 * d.abs().max(1e-12), "n={n}");
                let pc = pfaffian_complex(&to_complex(&a)).unwrap();
                assert!((pc.re - pf).abs() <= 1e-9 * pf.abs().max(1.0));
            }
        }
    }

    #[test]
    fn pfaffian_rejects_symmetric_input() {
        assert!(pfaffian(&RMat::identity(2, 2)).is_err());
    }

    #[test]
    fn complex_pfaffian_squares_to_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 4, 6, 10] {
            let x = CMat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let a = &x - x.transpose();
            let pf = pfaffian_complex(&a).unwrap();
            let d = det(&a);
            assert!((pf * pf - d).norm() <= 1e-9 * d.norm().max(1.0));
        }
    }

    #[test]
    fn polar_factors_multiply_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = CMat::from_fn(4, 4, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let (w, p) = polar(&m).unwrap();
        assert!(max_abs_diff(&(&w * &p), &m) < 1e-12);
        assert!(max_abs_diff(&(w.adjoint() * &w), &eye(4)) < 1e-12);
        assert!(eigh(&p).0[0] > 0.0);
    }

    #[test]
    fn unitary_power_interpolates() {
        let h = CMat::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(-0.5, 0.0)]);
        let u = expm(&(&h * I));
        let half = unitary_power(&u, 0.5);
        assert!(max_abs_diff(&(&half * &half), &u) < 1e-12);
        assert!(max_abs_diff(&half, &expm(&(&h * c(0.0, 0.5)))) < 1e-12);
    }
}
