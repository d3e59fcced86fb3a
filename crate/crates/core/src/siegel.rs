//! Siegel upper half-space points and the integer symplectic group.
//!
//! A point is a g-by-g complex symmetric matrix with positive definite
//! imaginary part. Symmetry is exact by construction (upper-triangle
//! storage); positive definiteness is checked by a Cholesky attempt, so
//! borderline inputs are rejected without a tolerance. Symplectic matrices
//! are kept in exact 64-bit integers with overflow checks, because the group
//! law and the defining relation must hold exactly.

use nalgebra::{Cholesky, DMatrix, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::scalar::{cabs, rof, Cx, Real};

/// Point of the Siegel upper half-space H_g.
#[derive(Clone, Debug)]
pub struct SiegelPoint<R: Real> {
    mat: SymMatrix<R>,
}

impl<R: Real> SiegelPoint<R> {
    /// Build from a symmetric matrix, verifying positive definiteness of the
    /// imaginary part.
    pub fn from_sym(mat: SymMatrix<R>) -> Result<Self> {
        let p = Self { mat };
        if p.im_cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(p)
    }

    /// Build from a full matrix; fails if the symmetry defect exceeds `tol`
    /// or the imaginary part is not positive definite.
    pub fn from_matrix(m: &DMatrix<Cx<R>>, tol: R) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
        let defect = symmetry_defect(m);
        if defect > tol {
            return Err(Error::InvalidInput(format!(
                "symmetry defect {:.3e} exceeds tolerance",
                crate::scalar::tof(defect)
            )));
        }
        Self::from_sym(SymMatrix::from_dmatrix_symmetrized(m))
    }

    pub fn genus(&self) -> usize {
        self.mat.dim()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Cx<R> {
        self.mat.get(i, j)
    }

    pub fn sym(&self) -> &SymMatrix<R> {
        &self.mat
    }

    pub fn to_matrix(&self) -> DMatrix<Cx<R>> {
        self.mat.to_dmatrix()
    }

    pub fn re(&self) -> DMatrix<R> {
        let g = self.genus();
        DMatrix::from_fn(g, g, |i, j| self.entry(i, j).re)
    }

    pub fn im(&self) -> DMatrix<R> {
        let g = self.genus();
        DMatrix::from_fn(g, g, |i, j| self.entry(i, j).im)
    }

    pub fn im_cholesky(&self) -> Option<Cholesky<R, Dyn>> {
        Cholesky::new(self.im())
    }

    /// Smallest eigenvalue of Im Z.
    pub fn im_min_eigenvalue(&self) -> R {
        self.im()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(R::max_value().unwrap(), |a, b| a.min(b))
    }

    /// Translate by a real symmetric matrix (entries added to the real part).
    pub fn translate_sym(&self, d: &SymMatrix<R>) -> Result<Self> {
        Self::from_sym(self.mat.add(d))
    }
}

fn symmetry_defect<R: Real>(m: &DMatrix<Cx<R>>) -> R {
    let n = m.nrows();
    let mut d = R::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            d = d.max(cabs(m[(i, j)] - m[(j, i)]));
        }
    }
    d
}

/// Membership test for H_g: symmetry defect at most `tol` and positive
/// definite imaginary part. Total function.
pub fn is_siegel_point<R: Real>(m: &DMatrix<Cx<R>>, tol: R) -> bool {
    if m.nrows() != m.ncols() || m.is_empty() {
        return false;
    }
    if symmetry_defect(m) > tol {
        return false;
    }
    let g = m.nrows();
    let im = DMatrix::from_fn(g, g, |i, j| (m[(i, j)].im + m[(j, i)].im) * rof::<R>(0.5));
    Cholesky::new(im).is_some()
}

/// Element of Sp(2g, Z) stored as an exact integer 2g-by-2g matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticMatrix {
    g: usize,
    m: Vec<i64>, // row-major, dimension 2g x 2g
}

impl SymplecticMatrix {
    pub fn genus(&self) -> usize {
        self.g
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.m[i * 2 * self.g + j]
    }

    pub fn identity(g: usize) -> Self {
        let n = 2 * g;
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        Self { g, m }
    }

    /// The inversion generator: A = 0, B = -I, C = I, D = 0.
    pub fn inversion(g: usize) -> Self {
        let n = 2 * g;
        let mut m = vec![0i64; n * n];
        for i in 0..g {
            m[i * n + (g + i)] = -1;
            m[(g + i) * n + i] = 1;
        }
        Self { g, m }
    }

    /// Translation by a symmetric integer matrix: A = D = I, B = `b`, C = 0.
    pub fn translation(g: usize, b: &[i64]) -> Result<Self> {
        assert_eq!(b.len(), g * g);
        for i in 0..g {
            for j in 0..g {
                if b[i * g + j] != b[j * g + i] {
                    return Err(Error::InvalidInput("translation block not symmetric".into()));
                }
            }
        }
        let n = 2 * g;
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        for i in 0..g {
            for j in 0..g {
                m[i * n + (g + j)] = b[i * g + j];
            }
        }
        Self { g, m }.validated()
    }

    /// GL embedding diag(U, t(U)^{-1}) for unimodular integer `u` with known
    /// integer inverse `u_inv`.
    pub fn gl_embedding(g: usize, u: &[i64], u_inv: &[i64]) -> Result<Self> {
        let n = 2 * g;
        let mut m = vec![0i64; n * n];
        for i in 0..g {
            for j in 0..g {
                m[i * n + j] = u[i * g + j];
                // transpose-inverse block
                m[(g + i) * n + (g + j)] = u_inv[j * g + i];
            }
        }
        Self { g, m }.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.is_symplectic() {
            Ok(self)
        } else {
            Err(Error::InvalidInput("matrix is not symplectic".into()))
        }
    }

    /// Exact check of t(M) J M = J over the integers.
    pub fn is_symplectic(&self) -> bool {
        is_symplectic_matrix(self.g, &self.m)
    }

    /// Checked integer matrix product; errors instead of wrapping on overflow.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        assert_eq!(self.g, rhs.g);
        let n = 2 * self.g;
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: i128 = 0;
                for k in 0..n {
                    acc += self.m[i * n + k] as i128 * rhs.m[k * n + j] as i128;
                }
                out[i * n + j] =
                    i64::try_from(acc).map_err(|_| Error::Overflow("symplectic product"))?;
            }
        }
        Ok(Self { g: self.g, m: out })
    }

    /// Inverse via the symplectic relation: M^{-1} = J^{-1} t(M) J, exact.
    pub fn inverse(&self) -> Self {
        let g = self.g;
        let n = 2 * g;
        // M = (A B; C D) => M^{-1} = (t(D) -t(B); -t(C) t(A))
        let mut m = vec![0i64; n * n];
        for i in 0..g {
            for j in 0..g {
                m[i * n + j] = self.entry(g + j, g + i);
                m[i * n + (g + j)] = -self.entry(j, g + i);
                m[(g + i) * n + j] = -self.entry(g + j, i);
                m[(g + i) * n + (g + j)] = self.entry(j, i);
            }
        }
        Self { g, m }
    }

    /// Block accessor: 0 = A, 1 = B, 2 = C, 3 = D.
    fn block(&self, which: usize) -> DMatrix<i64> {
        let g = self.g;
        let (r0, c0) = (which / 2 * g, which % 2 * g);
        DMatrix::from_fn(g, g, |i, j| self.entry(r0 + i, c0 + j))
    }

    pub fn block_a(&self) -> DMatrix<i64> {
        self.block(0)
    }
    pub fn block_b(&self) -> DMatrix<i64> {
        self.block(1)
    }
    pub fn block_c(&self) -> DMatrix<i64> {
        self.block(2)
    }
    pub fn block_d(&self) -> DMatrix<i64> {
        self.block(3)
    }

    pub fn block_complex<R: Real>(&self, which: usize) -> DMatrix<Cx<R>> {
        let b = self.block(which);
        b.map(|v| Cx::new(rof(v as f64), R::zero()))
    }
}

/// Exact symplectic test for an arbitrary integer matrix of size 2g x 2g,
/// with the standard form J = (0 I; -I 0).
pub fn is_symplectic_matrix(g: usize, m: &[i64]) -> bool {
    let n = 2 * g;
    if m.len() != n * n {
        return false;
    }
    // (t(M) J M)_{ij} = sum_k M_{ki} (J M)_{kj}; JM swaps row blocks with sign.
    for i in 0..n {
        for j in 0..n {
            let mut acc: i128 = 0;
            for k in 0..g {
                // row k of J M is row g+k of M; row g+k of J M is -row k of M
                acc += m[k * n + i] as i128 * m[(g + k) * n + j] as i128;
                acc -= m[(g + k) * n + i] as i128 * m[k * n + j] as i128;
            }
            let expected: i128 = if j == i + g {
                1
            } else if i == j + g {
                -1
            } else {
                0
            };
            if acc != expected {
                return false;
            }
        }
    }
    true
}

/// Result of the modular action: the moved point and det(CZ + D).
pub struct ActionResult<R: Real> {
    pub point: SiegelPoint<R>,
    pub cocycle_det: Cx<R>,
}

/// Modular action Z -> (AZ + B)(CZ + D)^{-1} with its cocycle determinant.
pub fn symplectic_action<R: Real>(
    gamma: &SymplecticMatrix,
    z: &SiegelPoint<R>,
) -> Result<ActionResult<R>> {
    assert_eq!(gamma.genus(), z.genus(), "genus mismatch");
    let zm = z.to_matrix();
    let a = gamma.block_complex::<R>(0);
    let b = gamma.block_complex::<R>(1);
    let c = gamma.block_complex::<R>(2);
    let d = gamma.block_complex::<R>(3);
    let num = &a * &zm + b;
    let den = &c * &zm + d;
    let lu = den.transpose().lu();
    let det_t = lu.determinant();
    if cabs(det_t) == R::zero() {
        return Err(Error::SingularFactor);
    }
    // (num) (den)^{-1} = (t(den)^{-1} t(num))^T
    let solved = lu.solve(&num.transpose()).ok_or(Error::SingularFactor)?;
    let moved = solved.transpose();
    let point = SiegelPoint::from_matrix(&moved, rof(1e-8)).map_err(|_| Error::SingularFactor)?;
    Ok(ActionResult {
        point,
        cocycle_det: det_t, // det is transpose-invariant
    })
}

/// Deterministic pseudo-random symplectic matrix: a word of `word_length`
/// random generators (inversion, integer translations with entries in
/// {-1,0,1}, GL embeddings of elementary matrices).
pub fn random_symplectic(seed: u64, g: usize, word_length: usize) -> SymplecticMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SymplecticMatrix::identity(g);
    for _ in 0..word_length {
        let gen = match rng.random_range(0..3u8) {
            0 => SymplecticMatrix::inversion(g),
            1 => {
                let mut b = vec![0i64; g * g];
                for i in 0..g {
                    for j in i..g {
                        let v = rng.random_range(-1..=1i64);
                        b[i * g + j] = v;
                        b[j * g + i] = v;
                    }
                }
                SymplecticMatrix::translation(g, &b).expect("symmetric by construction")
            }
            _ => {
                // elementary U = I + c E_{ij}, i != j; inverse is I - c E_{ij}
                let mut u = vec![0i64; g * g];
                let mut u_inv = vec![0i64; g * g];
                for i in 0..g {
                    u[i * g + i] = 1;
                    u_inv[i * g + i] = 1;
                }
                if g > 1 {
                    let i = rng.random_range(0..g);
                    let mut j = rng.random_range(0..g - 1);
                    if j >= i {
                        j += 1;
                    }
                    let c = if rng.random_bool(0.5) { 1 } else { -1 };
                    u[i * g + j] = c;
                    u_inv[i * g + j] = -c;
                }
                SymplecticMatrix::gl_embedding(g, &u, &u_inv).expect("unimodular by construction")
            }
        };
        out = out.mul(&gen).expect("generator word overflow");
    }
    out
}

/// Deterministic pseudo-random Siegel point: symmetric real part uniform in
/// [-1/2, 1/2], imaginary part Q diag(lambda) t(Q) with lambda uniform in
/// [im_low, im_high] and Q a random orthogonal matrix.
pub fn random_siegel_point<R: Real>(seed: u64, g: usize, im_low: f64, im_high: f64) -> SiegelPoint<R> {
    assert!(0.0 < im_low && im_low <= im_high);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = DMatrix::<f64>::from_fn(g, g, |_, _| StandardNormal.sample(&mut rng));
    let q = gauss.qr().q();
    let lambda: Vec<f64> = (0..g).map(|_| rng.random_range(im_low..=im_high)).collect();
    let mut im = DMatrix::<f64>::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            let mut acc = 0.0;
            for k in 0..g {
                acc += q[(i, k)] * lambda[k] * q[(j, k)];
            }
            im[(i, j)] = acc;
        }
    }
    let re = DMatrix::<f64>::from_fn(g, g, |_, _| rng.random_range(-0.5..0.5));
    let mat = SymMatrix::from_upper_fn(g, |i, j| {
        let re_s = (re[(i, j)] + re[(j, i)]) * 0.5;
        let im_s = (im[(i, j)] + im[(j, i)]) * 0.5;
        Cx::new(rof(re_s), rof(im_s))
    });
    SiegelPoint::from_sym(mat).expect("constructed imaginary part is positive definite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn i_times_identity(g: usize) -> SiegelPoint<f64> {
        SiegelPoint::from_sym(SymMatrix::from_upper_fn(g, |i, j| {
            if i == j {
                Complex::new(0.0, 1.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        }))
        .unwrap()
    }

    #[test]
    fn membership_examples() {
        // i*I_4 is a Siegel point
        assert!(is_siegel_point(&i_times_identity(4).to_matrix(), 1e-12));
        // real identity is not (Im = 0)
        let m = DMatrix::from_fn(2, 2, |i, j| {
            Complex::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        });
        assert!(!is_siegel_point(&m, 1e-12));
        // [[i, 0.3],[0.3, 2i]] is
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(0.0, 1.0),
                Complex::new(0.3, 0.0),
                Complex::new(0.3, 0.0),
                Complex::new(0.0, 2.0),
            ],
        );
        assert!(is_siegel_point(&m, 1e-12));
    }

    #[test]
    fn symplectic_examples() {
        assert!(SymplecticMatrix::identity(3).is_symplectic());
        assert!(SymplecticMatrix::inversion(3).is_symplectic());
        let n = 4;
        let mut two = vec![0i64; n * n];
        for i in 0..n {
            two[i * n + i] = 2;
        }
        assert!(!is_symplectic_matrix(2, &two));
    }

    #[test]
    fn action_examples() {
        let z = i_times_identity(3);
        // identity fixes Z
        let r = symplectic_action(&SymplecticMatrix::identity(3), &z).unwrap();
        assert!(crate::linalg::max_abs_diff(&r.point.to_matrix(), &z.to_matrix()) < 1e-14);
        assert!((r.cocycle_det - Complex::new(1.0, 0.0)).norm() < 1e-14);
        // inversion fixes i*I
        let r = symplectic_action(&SymplecticMatrix::inversion(3), &z).unwrap();
        assert!(crate::linalg::max_abs_diff(&r.point.to_matrix(), &z.to_matrix()) < 1e-14);
        // translation adds B
        let b = vec![1, 0, 0, 0, -1, 2, 0, 2, 0];
        let t = SymplecticMatrix::translation(3, &b).unwrap();
        let r = symplectic_action(&t, &z).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = z.entry(i, j) + Complex::new(b[i * 3 + j] as f64, 0.0);
                assert!((r.point.entry(i, j) - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn random_symplectic_is_symplectic_and_deterministic() {
        for seed in 0..5u64 {
            let m = random_symplectic(seed, 4, 6);
            assert!(m.is_symplectic());
            assert_eq!(m, random_symplectic(seed, 4, 6));
        }
        assert_eq!(random_symplectic(7, 3, 0), SymplecticMatrix::identity(3));
    }

    #[test]
    fn random_siegel_point_is_valid_and_deterministic() {
        for seed in 0..5u64 {
            let z: SiegelPoint<f64> = random_siegel_point(seed, 4, 0.5, 0.9);
            assert!(is_siegel_point(&z.to_matrix(), 1e-12));
            let z2: SiegelPoint<f64> = random_siegel_point(seed, 4, 0.5, 0.9);
            assert_eq!(z.to_matrix(), z2.to_matrix());
            let lo = z.im_min_eigenvalue();
            assert!(lo > 0.4, "spectrum too small: {lo}");
        }
    }

    #[test]
    fn inverse_is_exact() {
        let m = random_symplectic(11, 3, 5);
        let prod = m.mul(&m.inverse()).unwrap();
        assert_eq!(prod, SymplecticMatrix::identity(3));
    }
}
