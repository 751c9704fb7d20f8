//! Discretized Brillouin torus with k_mu = 2 pi j_mu / N_mu mapped to (-pi, pi].

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BZGrid {
    dim: usize,
    sizes: Vec<usize>,
}

/// Elementary square spanned by two axes; corners run counterclockwise from `base`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plaquette {
    pub base: usize,
    pub axes: (usize, usize),
    pub corners: [usize; 4],
}

pub fn make_grid(dim: usize, sizes: &[usize]) -> Result<BZGrid> {
    BZGrid::new(dim, sizes)
}

pub fn trim_points(grid: &BZGrid) -> Vec<usize> {
    grid.trim_points()
}

pub fn negate_index(grid: &BZGrid, idx: usize) -> usize {
    grid.negate_index(idx)
}

impl BZGrid {
    pub fn new(dim: usize, sizes: &[usize]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Config(format!("grid dimension {dim} not in 1..=3")));
        }
        if sizes.len() != dim {
            return Err(Error::Config(format!(
                "expected {dim} axis sizes, got {}",
                sizes.len()
            )));
        }
        if let Some(&bad) = sizes.iter().find(|&&n| n < 4 || n % 2 == 1) {
            return Err(Error::Config(format!(
                "axis size {bad} must be even and at least 4"
            )));
        }
        Ok(BZGrid { dim, sizes: sizes.to_vec() })
    }

    /// Same size along every axis.
    pub fn cubic(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, &vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis 0 varies slowest.
    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for ax in (0..self.dim).rev() {
            out[ax] = idx % self.sizes[ax];
            idx /= self.sizes[ax];
        }
        out
    }

    pub fn index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&j, &n)| acc * n + j % n)
    }

    pub fn axis_k(&self, axis: usize, j: usize) -> f64 {
        let n = self.sizes[axis];
        let j = j % n;
        let k = 2.0 * PI * j as f64 / n as f64;
        if j > n / 2 {
            k - 2.0 * PI
        } else {
            k
        }
    }

    pub fn k(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(ax, &j)| self.axis_k(ax, j))
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.k(i)).collect()
    }

    pub fn negate_index(&self, idx: usize) -> usize {
        let m: Vec<usize> = self
            .multi_index(idx)
            .iter()
            .zip(&self.sizes)
            .map(|(&j, &n)| (n - j) % n)
            .collect();
        self.index(&m)
    }

    /// Neighbor `step` sites along `axis`, wrapping periodically.
    pub fn shift(&self, idx: usize, axis: usize, step: isize) -> usize {
        let mut m = self.multi_index(idx);
        let n = self.sizes[axis] as isize;
        m[axis] = (m[axis] as isize + step).rem_euclid(n) as usize;
        self.index(&m)
    }

    pub fn trim_points(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.negate_index(i) == i)
            .collect()
    }

    pub fn plaquettes(&self) -> Vec<Plaquette> {
        let mut out = Vec::new();
        for a in 0..self.dim {
            for b in a + 1..self.dim {
                out.extend(self.plaquettes_in(a, b));
            }
        }
        out
    }

    pub fn plaquettes_in(&self, a: usize, b: usize) -> Vec<Plaquette> {
        (0..self.len())
            .map(|base| {
                let p1 = self.shift(base, a, 1);
                let p2 = self.shift(p1, b, 1);
                let p3 = self.shift(base, b, 1);
                Plaquette { base, axes: (a, b), corners: [base, p1, p2, p3] }
            })
            .collect()
    }

    /// Volume element (2 pi)^d / N_total.
    pub fn cell_volume(&self) -> f64 {
        self.sizes
            .iter()
            .map(|&n| 2.0 * PI / n as f64)
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_dimensional_points() {
        let g = make_grid(1, &[4]).unwrap();
        let ks: Vec<f64> = g.points().into_iter().map(|k| k[0]).collect();
        assert_eq!(ks, vec![0.0, PI / 2.0, PI, -PI / 2.0]);
    }

    #[test]
    fn counts() {
        let g = make_grid(2, &[4, 4]).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.plaquettes().len(), 16);
        assert_eq!(trim_points(&g).len(), 4);
        assert_eq!(trim_points(&make_grid(3, &[4, 4, 4]).unwrap()).len(), 8);
        let t = trim_points(&make_grid(1, &[8]).unwrap());
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(make_grid(1, &[5]).is_err());
        assert!(make_grid(1, &[2]).is_err());
        assert!(make_grid(4, &[4, 4, 4, 4]).is_err());
        assert!(make_grid(2, &[4]).is_err());
    }

    #[test]
    fn negation_examples() {
        let g = make_grid(1, &[8]).unwrap();
        assert_eq!(g.negate_index(0), 0);
        assert_eq!(g.negate_index(4), 4);
        assert_eq!(g.k(g.negate_index(2))[0], -PI / 2.0);
    }

    proptest! {
        #[test]
        fn negation_is_an_involution(dim in 1usize..=3, half in prop::collection::vec(2usize..7, 3), seed in 0usize..10_000) {
            let sizes: Vec<usize> = half[..dim].iter().map(|h| 2 * h).collect();
            let g = make_grid(dim, &sizes).unwrap();
            let idx = seed % g.len();
            let neg = g.negate_index(idx);
            prop_assert_eq!(g.negate_index(neg), idx);
            for (a, b) in g.k(idx).iter().zip(g.k(neg)) {
                let s = (a + b).rem_euclid(2.0 * PI);
                prop_assert!(s < 1e-12 || (2.0 * PI - s) < 1e-12);
            }
            prop_assert_eq!(neg == idx, g.trim_points().contains(&idx));
        }

        #[test]
        fn plaquettes_cover_each_face_once(n0 in 2usize..5, n1 in 2usize..5, n2 in 2usize..5) {
            let g = make_grid(3, &[2 * n0, 2 * n1, 2 * n2]).unwrap();
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                let ps = g.plaquettes_in(a, b);
                prop_assert_eq!(ps.len(), g.len());
                let mut bases: Vec<usize> = ps.iter().map(|p| p.base).collect();
                bases.sort();
                bases.dedup();
                prop_assert_eq!(bases.len(), g.len());
            }
            prop_assert_eq!(g.plaquettes().len(), 3 * g.len());
        }
    }
}
