//! Small complex-symmetric matrix type with upper-triangle storage, plus a few
//! helpers shared by the theta and form modules. Storing only the upper
//! triangle makes symmetry exact by construction.

use nalgebra::DMatrix;

use crate::scalar::{cabs, Cx, Real};

/// Complex symmetric matrix, upper triangle stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<R: Real> {
    n: usize,
    data: Vec<Cx<R>>,
}

impl<R: Real> SymMatrix<R> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Cx::new(R::zero(), R::zero()); n * (n + 1) / 2],
        }
    }

    /// Build from a closure over upper-triangle index pairs (i <= j).
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> Cx<R>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let idx = m.index(i, j);
                m.data[idx] = f(i, j);
            }
        }
        m
    }

    /// Symmetrize an arbitrary square matrix by averaging off-diagonal pairs.
    pub fn from_dmatrix_symmetrized(m: &DMatrix<Cx<R>>) -> Self {
        let half = Cx::new(R::from_subset(&0.5), R::zero());
        Self::from_upper_fn(m.nrows(), |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                (m[(i, j)] + m[(j, i)]) * half
            }
        })
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.n);
        i * self.n - i * (i + 1) / 2 + j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Cx<R> {
        if i <= j {
            self.data[self.index(i, j)]
        } else {
            self.data[self.index(j, i)]
        }
    }

    #[inline]
    pub fn set_upper(&mut self, i: usize, j: usize, v: Cx<R>) {
        let idx = self.index(i, j);
        self.data[idx] = v;
    }

    #[inline]
    pub fn add_upper(&mut self, i: usize, j: usize, v: Cx<R>) {
        let idx = self.index(i, j);
        self.data[idx] += v;
    }

    pub fn upper(&self) -> &[Cx<R>] {
        &self.data
    }

    /// Iterate over stored entries as ((i, j), value) with i <= j.
    pub fn iter_upper(&self) -> impl Iterator<Item = ((usize, usize), Cx<R>)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (i..n).map(move |j| (i, j)))
            .zip(self.data.iter().copied())
    }

    pub fn to_dmatrix(&self) -> DMatrix<Cx<R>> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn scale(&self, c: Cx<R>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    /// Max entry modulus.
    pub fn norm_inf(&self) -> R {
        self.data
            .iter()
            .map(|&v| cabs(v))
            .fold(R::zero(), |a, b| a.max(b))
    }

    pub fn determinant(&self) -> Cx<R> {
        self.to_dmatrix().lu().determinant()
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<R> {
        let svd = self.to_dmatrix().svd(false, false);
        let mut sv: Vec<R> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sv
    }
}

/// Max entry-wise modulus difference between two square matrices.
pub fn max_abs_diff<R: Real>(a: &DMatrix<Cx<R>>, b: &DMatrix<Cx<R>>) -> R {
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| cabs(x - y))
        .fold(R::zero(), |acc, v| acc.max(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn storage_is_symmetric() {
        let m = SymMatrix::<f64>::from_upper_fn(3, |i, j| Complex::new((i + 10 * j) as f64, 1.0));
        assert_eq!(m.get(2, 1), m.get(1, 2));
        let d = m.to_dmatrix();
        assert_eq!(d[(2, 1)], d[(1, 2)]);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        // 3x3 symmetric with distinct entries
        let m = SymMatrix::<f64>::from_upper_fn(3, |i, j| {
            Complex::new(1.0 + (i * 3 + j) as f64, (i + j) as f64 * 0.25)
        });
        let a = m.to_dmatrix();
        let cof = a[(0, 0)] * (a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)])
            - a[(0, 1)] * (a[(1, 0)] * a[(2, 2)] - a[(1, 2)] * a[(2, 0)])
            + a[(0, 2)] * (a[(1, 0)] * a[(2, 1)] - a[(1, 1)] * a[(2, 0)]);
        assert!((m.determinant() - cof).norm() < 1e-12);
    }
}
