//! Model files (JSON or TOML) and JSON field bundles.
//!
//! Model file: `{particle, kind, n, dim, terms: [{dr, re, im}]}` with 2n x 2n
//! blocks given as real and imaginary row lists; `im` may be omitted for
//! real blocks. An optional `symmetry` entry carries the symmetry spec.

use crate::bz_grid::BZGrid;
use crate::deform::FieldPath;
use crate::error::{Error, Result};
use crate::gaussian_core::{Kind, MatrixField, Particle, RealSpaceCouplings, Role, Term};
use crate::linalg::{c, CMat};
use crate::symmetry::SymmetrySpec;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockFile {
    pub dr: Vec<i64>,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub particle: Particle,
    pub kind: Kind,
    pub n: usize,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetrySpec>,
    pub terms: Vec<BlockFile>,
}

fn rows_to_mat(re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>, size: usize) -> Result<CMat> {
    let shape_ok = |rows: &[Vec<f64>]| rows.len() == size && rows.iter().all(|r| r.len() == size);
    if !shape_ok(re) || im.is_some_and(|x| !shape_ok(x)) {
        return Err(Error::Dimension(format!("block is not {size} x {size}")));
    }
    Ok(CMat::from_fn(size, size, |i, j| c(re[i][j], im.map_or(0.0, |x| x[i][j]))))
}

fn mat_to_rows(m: &CMat) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let rows = |f: fn(&crate::linalg::C64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
    (rows(|z| z.re), rows(|z| z.im))
}

fn block_file(dr: Vec<i64>, m: &CMat) -> BlockFile {
    let (re, im) = mat_to_rows(m);
    let im = im.iter().flatten().any(|&x| x != 0.0).then_some(im);
    BlockFile { dr, re, im }
}

impl ModelFile {
    pub fn from_couplings(h: &RealSpaceCouplings, symmetry: Option<SymmetrySpec>) -> Self {
        ModelFile {
            particle: h.particle,
            kind: h.kind,
            n: h.n,
            dim: h.dim,
            symmetry,
            terms: h.terms.iter().map(|t| block_file(t.dr.clone(), &t.block)).collect(),
        }
    }

    pub fn couplings(&self) -> Result<RealSpaceCouplings> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.dr.len() != self.dim {
                    return Err(Error::Dimension(format!("displacement {:?} in a d = {} model", t.dr, self.dim)));
                }
                Ok(Term { dr: t.dr.clone(), block: rows_to_mat(&t.re, t.im.as_ref(), 2 * self.n)? })
            })
            .collect::<Result<Vec<_>>>()?;
        RealSpaceCouplings::new(self.n, self.dim, self.particle, self.kind, terms)
    }

    pub fn role(&self) -> Role {
        Role::from_parts(self.particle, self.kind)
    }
}

/// Parse a model from text; TOML when `toml` is set, JSON otherwise.
pub fn parse_model(text: &str, toml: bool) -> Result<ModelFile> {
    if toml {
        ::toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    } else {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Read a model file; `.toml` files are parsed as TOML, everything else as JSON.
pub fn read_model(path: &Path) -> Result<ModelFile> {
    let text = std::fs::read_to_string(path)?;
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    parse_model(&text, is_toml)
}

pub fn model_json(model: &ModelFile) -> Result<String> {
    serde_json::to_string_pretty(model).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub role: Role,
    pub n: usize,
    pub grid: BZGrid,
    /// One matrix per grid point in grid index order.
    pub values: Vec<MatrixFile>,
}

impl FieldFile {
    pub fn from_field(f: &MatrixField) -> Self {
        let values = f
            .values
            .iter()
            .map(|m| {
                let (re, im) = mat_to_rows(m);
                MatrixFile { re, im }
            })
            .collect();
        FieldFile { role: f.role, n: f.n, grid: f.grid.clone(), values }
    }

    pub fn field(&self) -> Result<MatrixField> {
        let values = self
            .values
            .iter()
            .map(|m| rows_to_mat(&m.re, Some(&m.im), 2 * self.n))
            .collect::<Result<Vec<_>>>()?;
        MatrixField::new(self.grid.clone(), self.n, self.role, values)
    }
}

/// A sampled path: one field per parameter value.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathBundle {
    pub lambdas: Vec<f64>,
    pub fields: Vec<FieldFile>,
}

impl PathBundle {
    pub fn from_path(p: &FieldPath) -> Self {
        PathBundle { lambdas: p.lambdas.clone(), fields: p.fields.iter().map(FieldFile::from_field).collect() }
    }

    pub fn path(&self) -> Result<FieldPath> {
        let fields = self.fields.iter().map(FieldFile::field).collect::<Result<Vec<_>>>()?;
        FieldPath::new(self.lambdas.clone(), fields)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn model_round_trip_json_and_toml() {
        let h = models::qsh_model(-1.0, 0.3).unwrap();
        let file = ModelFile::from_couplings(&h, None);
        let json = model_json(&file).unwrap();
        assert_eq!(parse_model(&json, false).unwrap().couplings().unwrap(), h);
        let toml = ::toml::to_string(&file).unwrap();
        assert_eq!(parse_model(&toml, true).unwrap().couplings().unwrap(), h);
    }

    #[test]
    fn malformed_models_are_rejected() {
        let bad_shape = r#"{"particle":"fermion","kind":"state","n":1,"dim":1,"terms":[{"dr":[0],"re":[[0,1]]}]}"#;
        assert!(parse_model(bad_shape, false).unwrap().couplings().is_err());
        let unknown = r#"{"particle":"fermion","kind":"state","n":1,"dim":1,"terms":[],"extra":1}"#;
        assert!(parse_model(unknown, false).is_err());
        let bad_dr = r#"{"particle":"fermion","kind":"state","n":1,"dim":1,"terms":[{"dr":[0,0],"re":[[0,-1],[1,0]]}]}"#;
        assert!(parse_model(bad_dr, false).unwrap().couplings().is_err());
    }

    #[test]
    fn field_bundle_round_trip() {
        let grid = BZGrid::cubic(1, 8).unwrap();
        let s = models::state_field(&models::kitaev_chain(1.0, 1.0, 1.0).unwrap(), &grid).unwrap();
        let p = FieldPath::sample(2, |_| Ok(s.clone())).unwrap();
        let text = serde_json::to_string(&PathBundle::from_path(&p)).unwrap();
        let back: PathBundle = serde_json::from_str(&text).unwrap();
        let q = back.path().unwrap();
        assert_eq!(q.lambdas, p.lambdas);
        assert_eq!(q.fields[1].max_diff(&s), 0.0);
    }
}
