//! Explicit deformations: boson state trivialization, boson operation
//! unitarization, the operation that carries a state along a path, and path
//! validation.

use crate::error::{Error, Result};
use crate::gaussian_core::{decay_profile_field, validate, MatrixField, Particle, Role, SymplecticForm};
use crate::linalg::{c, eigh, hermitian_part, max_abs_diff, polar, unitarize, CMat};
use crate::parallel;
use crate::symmetry::{check_op_symmetry, check_state_symmetry, SymmetryMatrix};
use serde::Serialize;

pub const DEFAULT_STEPS: usize = 200;
pub const DEFAULT_PATH_TOL: f64 = 1e-6;

const SPACING_TOL: f64 = 1e-12;

/// Samples 0 = lambda_0 < ... < lambda_M = 1 of a field path.
#[derive(Clone, Debug)]
pub struct FieldPath {
    pub lambdas: Vec<f64>,
    pub fields: Vec<MatrixField>,
    pub role: Role,
}

impl FieldPath {
    pub fn new(lambdas: Vec<f64>, fields: Vec<MatrixField>) -> Result<Self> {
        if lambdas.len() != fields.len() || lambdas.len() < 2 {
            return Err(Error::Dimension(format!(
                "{} parameters for {} fields (need at least 2)",
                lambdas.len(),
                fields.len()
            )));
        }
        if lambdas[0] != 0.0 || *lambdas.last().unwrap() != 1.0 {
            return Err(Error::Invalid("path parameters must run from 0 to 1".into()));
        }
        if lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("path parameters must increase strictly".into()));
        }
        let first = &fields[0];
        if fields.iter().any(|f| f.role != first.role || f.n != first.n || f.grid != first.grid) {
            return Err(Error::Dimension("path samples differ in role, size or grid".into()));
        }
        let role = first.role;
        Ok(FieldPath { lambdas, fields, role })
    }

    /// M + 1 uniform samples of `f` on [0, 1].
    pub fn sample<F>(steps: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<MatrixField>,
    {
        if steps == 0 {
            return Err(Error::Config("a path needs at least one step".into()));
        }
        let lambdas: Vec<f64> = (0..=steps).map(|s| s as f64 / steps as f64).collect();
        let fields = lambdas.iter().map(|&l| f(l)).collect::<Result<Vec<_>>>()?;
        Self::new(lambdas, fields)
    }

    pub fn steps(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn start(&self) -> &MatrixField {
        &self.fields[0]
    }

    pub fn end(&self) -> &MatrixField {
        self.fields.last().unwrap()
    }

    fn uniform_step(&self) -> Option<f64> {
        let h = 1.0 / self.steps() as f64;
        self.lambdas
            .iter()
            .enumerate()
            .all(|(s, &l)| (l - s as f64 * h).abs() < SPACING_TOL)
            .then_some(h)
    }

    /// Per-k sample sequences regrouped into one field per sample.
    fn from_columns(lambdas: Vec<f64>, base: &MatrixField, role: Role, columns: Vec<Vec<CMat>>) -> Result<Self> {
        let m = lambdas.len();
        let mut per_sample: Vec<Vec<CMat>> = (0..m).map(|_| Vec::with_capacity(columns.len())).collect();
        for col in columns {
            for (s, x) in col.into_iter().enumerate() {
                per_sample[s].push(x);
            }
        }
        let fields = per_sample
            .into_iter()
            .map(|v| MatrixField::new(base.grid.clone(), base.n, role, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(lambdas, fields)
    }
}

fn uniform_lambdas(steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::Config("a path needs at least one step".into()));
    }
    Ok((0..=steps).map(|s| s as f64 / steps as f64).collect())
}

/// Q diag(f(e)) Q^dag from a stored eigendecomposition.
fn spectral(q: &CMat, vals: &[f64], f: impl Fn(f64) -> f64) -> CMat {
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&x| c(f(x), 0.0))));
    hermitian_part(&(q * d * q.adjoint()))
}

/// Gamma(k; lambda) = exp((1 - lambda) log Gamma(k)), ending at the identity.
pub fn trivialize_boson_state(state: &MatrixField, steps: usize) -> Result<FieldPath> {
    if state.role != Role::BosonState {
        return Err(Error::Invalid(format!("expected a boson state, got {:?}", state.role)));
    }
    let lambdas = uniform_lambdas(steps)?;
    let columns = parallel::try_map(state.grid.len(), |i| {
        let (vals, q) = eigh(&state.values[i]);
        if vals[0] <= 0.0 {
            return Err(Error::Invalid(format!(
                "boson covariance not positive definite at k = {:?} (min eigenvalue {:.3e})",
                state.grid.k(i),
                vals[0]
            )));
        }
        Ok(lambdas.iter().map(|&l| spectral(&q, &vals, |x| x.powf(1.0 - l))).collect::<Vec<_>>())
    })?;
    let mut path = FieldPath::from_columns(lambdas, state, Role::BosonState, columns)?;
    // the stored spectral product reproduces the input only to rounding
    path.fields[0] = state.clone();
    Ok(path)
}

/// V(k; lambda) = W(k) exp((1 - lambda) log P(k)) for the polar form V = W P.
pub fn unitarize_boson_op_path(op: &MatrixField, steps: usize) -> Result<FieldPath> {
    if op.role != Role::BosonOp {
        return Err(Error::Invalid(format!("expected a boson operation, got {:?}", op.role)));
    }
    let lambdas = uniform_lambdas(steps)?;
    let columns = parallel::try_map(op.grid.len(), |i| {
        let (w, p) = polar(&op.values[i])?;
        let (vals, q) = eigh(&p);
        Ok::<_, Error>(
            lambdas
                .iter()
                .map(|&l| &w * spectral(&q, &vals, |x| x.powf(1.0 - l)))
                .collect::<Vec<_>>(),
        )
    })?;
    let mut path = FieldPath::from_columns(lambdas, op, Role::BosonOp, columns)?;
    path.fields[0] = op.clone();
    Ok(path)
}

/// Closest symplectic matrix by the fixed-point iteration V <- (V + T(V)) / 2,
/// T(V) = -sigma V^{-dag} sigma, whose fixed points are the symplectic matrices.
fn symplectic_project(v: &CMat, s: &CMat) -> Result<CMat> {
    let mut x = v.clone();
    for _ in 0..8 {
        let inv = x
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("singular matrix in symplectic projection".into()))?;
        let t = -(s * inv.adjoint() * s);
        let next = (&x + t) * c(0.5, 0.0);
        let change = max_abs_diff(&next, &x);
        x = next;
        if change < 1e-15 {
            break;
        }
    }
    Ok(x)
}

/// d Gamma / d lambda at sample s by fourth-order finite differences
/// (central inside, one-sided at the two ends).
fn derivative(g: &[&CMat], s: usize, h: f64) -> CMat {
    let m = g.len() - 1;
    let comb = |idx: [usize; 5], w: [f64; 5]| -> CMat {
        let mut out = g[idx[0]] * c(w[0], 0.0);
        for j in 1..5 {
            out += g[idx[j]] * c(w[j], 0.0);
        }
        out * c(1.0 / (12.0 * h), 0.0)
    };
    match s {
        0 => comb([0, 1, 2, 3, 4], [-25.0, 48.0, -36.0, 16.0, -3.0]),
        1 => comb([0, 1, 2, 3, 4], [-3.0, -10.0, 18.0, -6.0, 1.0]),
        s if s == m - 1 => comb([m, m - 1, m - 2, m - 3, m - 4], [3.0, 10.0, -18.0, 6.0, -1.0]),
        s if s == m => comb([m, m - 1, m - 2, m - 3, m - 4], [25.0, -48.0, 36.0, -16.0, 3.0]),
        s => comb([s - 2, s - 1, s + 1, s + 2, s], [1.0, -8.0, 8.0, -1.0, 0.0]),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Connection {
    #[serde(skip)]
    pub op: MatrixField,
    /// max_k |Gamma(k; 1) - V(k) Gamma(k; 0) V(k)^dag|.
    pub residual: f64,
    pub worst_k: Vec<f64>,
    /// Unitarity (fermions) or symplecticity (bosons) violation of V.
    pub group_violation: f64,
    pub rk4_steps: usize,
}

/// Integrate dV/dlambda = K V with K_f = Gamma dGamma / 2 (fermions) or
/// K_b = Gamma sigma dGamma sigma / 2 (bosons) by fixed-step RK4 per k, step
/// 2 / M so that midpoints fall on odd samples, projecting back to the group
/// after each step.
pub fn connect_states(path: &FieldPath, path_tol: f64) -> Result<Connection> {
    let particle = match path.role {
        Role::FermionState => Particle::Fermion,
        Role::BosonState => Particle::Boson,
        r => return Err(Error::Invalid(format!("connect_states takes a path of states, got {r:?}"))),
    };
    let m = path.steps();
    if m < 4 || m % 2 == 1 {
        return Err(Error::Config(format!("need an even number of steps >= 4, got {m}")));
    }
    let h = path
        .uniform_step()
        .ok_or_else(|| Error::Config("connect_states needs uniformly spaced samples".into()))?;
    let base = path.start();
    let dim = 2 * base.n;
    let s = SymplecticForm::new(base.n).matrix();
    let half = c(0.5, 0.0);
    let per_k = parallel::try_map(base.grid.len(), |i| {
        let g: Vec<&CMat> = path.fields.iter().map(|f| &f.values[i]).collect();
        let gen = |j: usize| -> CMat {
            let dg = derivative(&g, j, h);
            match particle {
                Particle::Fermion => g[j] * dg * half,
                Particle::Boson => g[j] * &s * dg * &s * half,
            }
        };
        let step = 2.0 * h;
        let mut v = CMat::identity(dim, dim);
        let mut k_lo = gen(0);
        for j in (0..m).step_by(2) {
            let k_mid = gen(j + 1);
            let k_hi = gen(j + 2);
            let a = &k_lo * &v;
            let b = &k_mid * (&v + &a * c(step / 2.0, 0.0));
            let cc = &k_mid * (&v + &b * c(step / 2.0, 0.0));
            let d = &k_hi * (&v + &cc * c(step, 0.0));
            v += (a + (b + cc) * c(2.0, 0.0) + d) * c(step / 6.0, 0.0);
            v = match particle {
                Particle::Fermion => unitarize(&v)?,
                Particle::Boson => symplectic_project(&v, &s)?,
            };
            k_lo = k_hi;
        }
        let residual = max_abs_diff(&(&v * g[0] * v.adjoint()), g[m]);
        let group = match particle {
            Particle::Fermion => max_abs_diff(&(&v * v.adjoint()), &CMat::identity(dim, dim)),
            Particle::Boson => max_abs_diff(&(&v * &s * v.adjoint()), &s),
        };
        Ok::<_, Error>((v, residual, group))
    })?;
    let (mut worst, mut residual, mut group_violation) = (0, 0.0f64, 0.0f64);
    let mut values = Vec::with_capacity(per_k.len());
    for (i, (v, r, g)) in per_k.into_iter().enumerate() {
        if r > residual {
            residual = r;
            worst = i;
        }
        group_violation = group_violation.max(g);
        values.push(v);
    }
    let worst_k = base.grid.k(worst);
    if residual > path_tol || !residual.is_finite() {
        return Err(Error::NonConvergence { residual, k: worst_k });
    }
    let role = match particle {
        Particle::Fermion => Role::FermionOp,
        Particle::Boson => Role::BosonOp,
    };
    let op = MatrixField::new(base.grid.clone(), base.n, role, values)?;
    Ok(Connection { op, residual, worst_k, group_violation, rk4_steps: m / 2 })
}

/// log2 of the ratio of successive differences of V(1) for M, 2M, 4M steps.
pub fn convergence_order<F>(make_path: F, steps: usize) -> Result<f64>
where
    F: Fn(usize) -> Result<FieldPath>,
{
    let ops = [steps, 2 * steps, 4 * steps]
        .iter()
        .map(|&m| connect_states(&make_path(m)?, f64::INFINITY).map(|c| c.op))
        .collect::<Result<Vec<_>>>()?;
    let coarse = ops[0].max_diff(&ops[1]);
    let fine = ops[1].max_diff(&ops[2]);
    if fine == 0.0 {
        return Err(Error::Degenerate("step halving left V unchanged; order undefined".into()));
    }
    Ok((coarse / fine).log2())
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    pub index: usize,
    pub lambda: f64,
    pub endpoint: bool,
    pub constraint_violation: f64,
    pub symmetry_violation: f64,
    /// Fitted decay length of the real-space couplings; None when the fit fails.
    pub decay_length: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PathReport {
    pub samples: Vec<SampleReport>,
    /// Largest max-norm distance between neighbouring samples.
    pub max_step_distance: f64,
    pub failed: Vec<usize>,
    pub pass: bool,
}

/// Per-sample constraint and symmetry checks, locality and continuity.
pub fn validate_path(path: &FieldPath, syms: &[SymmetryMatrix], tol: f64) -> PathReport {
    let m = path.steps();
    let samples: Vec<SampleReport> = path
        .fields
        .iter()
        .enumerate()
        .map(|(idx, f)| {
            let constraint_violation = validate(f, tol).max_violation();
            let symmetry_violation = syms
                .iter()
                .map(|sym| {
                    if f.role.is_op() {
                        check_op_symmetry(f, sym, tol).violation
                    } else {
                        check_state_symmetry(f, sym, tol).violation
                    }
                })
                .fold(0.0, f64::max);
            let range = f.grid.sizes().iter().min().copied().unwrap_or(2) / 2;
            let decay_length = decay_profile_field(f, range.max(1)).ok().map(|d| d.length);
            let pass = validate(f, tol).pass && symmetry_violation < tol;
            SampleReport {
                index: idx,
                lambda: path.lambdas[idx],
                endpoint: idx == 0 || idx == m,
                constraint_violation,
                symmetry_violation,
                decay_length,
                pass,
            }
        })
        .collect();
    let max_step_distance = path.fields.windows(2).map(|w| w[0].max_diff(&w[1])).fold(0.0, f64::max);
    let failed: Vec<usize> = samples.iter().filter(|s| !s.pass).map(|s| s.index).collect();
    let pass = failed.is_empty();
    PathReport { samples, max_step_distance, failed, pass }
}
