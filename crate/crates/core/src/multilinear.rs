//! Symmetric-power linear algebra: induced maps on Sym^n, the determinant
//! identity det(Sym^n A) = det(A)^{binom(g+n-1, n-1)}, the rho^(n) action of
//! the symplectic group on symmetric tensors of abelian differentials, and
//! the dimension/weight bookkeeping.
//!
//! One global monomial ordering (lexicographic non-decreasing index tuples)
//! is shared by every consumer of these matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{cabs, Cx, Real};
use crate::siegel::{SiegelPoint, SymplecticMatrix};

/// Dimension triple (M_n, N_n, K_n):
/// M_n = binom(g+n-1, n), N_n = (2n-1)(g-1) + delta_{n,1}, K_n = M_n - N_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    pub m: u64,
    pub n: u64,
    pub k: u64,
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i).expect("binomial overflow") / (i + 1);
    }
    acc
}

pub fn dims(g: u64, n: u64) -> Dims {
    assert!(g >= 2 && n >= 1);
    let m = binomial(g + n - 1, n);
    let nn = (2 * n - 1) * (g - 1) + u64::from(n == 1);
    Dims {
        m,
        n: nn,
        k: m - nn,
    }
}

/// Mumford weights: c_n = 6n^2 - 6n + 1 and d_n = c_n - binom(g+n-1, n-1).
pub fn mumford_weights(g: u64, n: u64) -> (i64, i64) {
    assert!(n >= 1);
    let c = (6 * n * n - 6 * n + 1) as i64;
    (c, c - binomial(g + n - 1, n - 1) as i64)
}

/// The ordered basis of non-decreasing n-tuples over {0..g-1} (0-based),
/// lexicographic. Length M_n.
#[derive(Clone, Debug)]
pub struct SymIndex {
    pub g: usize,
    pub n: usize,
    pub tuples: Vec<Vec<usize>>,
}

impl SymIndex {
    pub fn new(g: usize, n: usize) -> Self {
        let mut tuples = Vec::new();
        let mut cur = vec![0usize; n];
        loop {
            tuples.push(cur.clone());
            // next non-decreasing tuple
            let mut i = n;
            loop {
                if i == 0 {
                    return Self { g, n, tuples };
                }
                i -= 1;
                if cur[i] + 1 < g {
                    let v = cur[i] + 1;
                    for item in cur.iter_mut().skip(i) {
                        *item = v;
                    }
                    break;
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Position of the pair-index (i, j) in the n = 2 ordering.
    pub fn pair_position(&self, i: usize, j: usize) -> usize {
        assert_eq!(self.n, 2);
        let t = if i <= j { vec![i, j] } else { vec![j, i] };
        self.tuples.iter().position(|u| *u == t).expect("pair index")
    }

    fn multiplicity_factorial(tuple: &[usize]) -> f64 {
        let mut acc = 1.0;
        let mut run = 1usize;
        for w in tuple.windows(2) {
            if w[0] == w[1] {
                run += 1;
                acc *= run as f64;
            } else {
                run = 1;
            }
        }
        acc
    }
}

/// Permanent of the k x k complex matrix picked out by row/column index
/// tuples (direct permutation sum; k <= 4 in this crate).
fn permanent<R: Real>(a: &DMatrix<Cx<R>>, rows: &[usize], cols: &[usize]) -> Cx<R> {
    let k = rows.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = Cx::new(R::zero(), R::zero());
    loop {
        let mut prod = Cx::new(R::one(), R::zero());
        for (s, &p) in perm.iter().enumerate() {
            prod *= a[(rows[s], cols[p])];
        }
        total += prod;
        // next permutation (lexicographic)
        let mut i = k.wrapping_sub(1);
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            return total;
        }
        let mut j = k - 1;
        while perm[j] <= perm[i - 1] {
            j -= 1;
        }
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

/// Matrix of Sym^n A on the symmetrized monomial basis in the fixed
/// `SymIndex` ordering. Functorial: Sym^n(AB) = Sym^n(A) Sym^n(B).
pub fn sym_power_matrix<R: Real>(a: &DMatrix<Cx<R>>, n: usize) -> DMatrix<Cx<R>> {
    assert_eq!(a.nrows(), a.ncols());
    let g = a.nrows();
    let idx = SymIndex::new(g, n);
    let m = idx.len();
    let mut out = DMatrix::from_element(m, m, Cx::new(R::zero(), R::zero()));
    for (r, row_t) in idx.tuples.iter().enumerate() {
        let mu = SymIndex::multiplicity_factorial(row_t);
        let mu_inv = Cx::new(R::from_subset(&(1.0 / mu)), R::zero());
        for (c, col_t) in idx.tuples.iter().enumerate() {
            out[(r, c)] = permanent(a, row_t, col_t) * mu_inv;
        }
    }
    out
}

/// Both sides of the symmetric-power determinant identity
/// det(Sym^n A) = det(A)^{binom(g+n-1, n-1)} and their relative residual.
#[derive(Clone, Debug)]
pub struct WedgeDetReport<R: Real> {
    pub lhs: Cx<R>,
    pub rhs: Cx<R>,
    pub residual: R,
    pub exponent: u64,
}

pub fn check_wedge_det<R: Real>(a: &DMatrix<Cx<R>>, n: usize) -> Result<WedgeDetReport<R>> {
    let g = a.nrows() as u64;
    let det_a = a.clone().lu().determinant();
    if cabs(det_a) < R::from_subset(&1e-300) {
        return Err(Error::SingularInput);
    }
    let lhs = sym_power_matrix(a, n).lu().determinant();
    let exponent = binomial(g + n as u64 - 1, n as u64 - 1);
    let rhs = det_a.powu(exponent as u32);
    let residual = cabs(lhs - rhs) / cabs(rhs);
    Ok(WedgeDetReport {
        lhs,
        rhs,
        residual,
        exponent,
    })
}

/// rho^(n)(gamma, tau) = Sym^n( t((C tau + D)^{-1}) ) in the fixed ordering.
/// Its determinant is det(C tau + D)^{-binom(g+n-1, n-1)} and it satisfies
/// the cocycle rho(g2 g1, tau) = rho(g2, g1 tau) rho(g1, tau).
pub fn rho_action<R: Real>(
    gamma: &SymplecticMatrix,
    tau: &SiegelPoint<R>,
    n: usize,
) -> Result<DMatrix<Cx<R>>> {
    let g = tau.genus();
    assert_eq!(gamma.genus(), g);
    let c = gamma.block_complex::<R>(2);
    let d = gamma.block_complex::<R>(3);
    let den = &c * tau.to_matrix() + d;
    let lu = den.lu();
    if cabs(lu.determinant()) == R::zero() {
        return Err(Error::SingularFactor);
    }
    let inv = lu.try_inverse().ok_or(Error::SingularFactor)?;
    Ok(sym_power_matrix(&inv.transpose(), n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(seed: u64, g: usize) -> DMatrix<Cx<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(g, g, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn dims_examples() {
        assert_eq!(dims(4, 2), Dims { m: 10, n: 9, k: 1 });
        assert_eq!(dims(2, 2).k, 0);
        assert_eq!(dims(3, 2).k, 0);
        for g in 2..=6 {
            let d = dims(g, 1);
            assert_eq!((d.m, d.n, d.k), (g, g, 0));
        }
    }

    #[test]
    fn mumford_weight_examples() {
        assert_eq!(mumford_weights(4, 2).0, 13);
        assert_eq!(mumford_weights(4, 2).1, 8);
        assert_eq!(mumford_weights(4, 3), (37, 22));
    }

    #[test]
    fn sym_power_identity_and_diagonal() {
        let id = DMatrix::from_fn(2, 2, |i, j| {
            Complex::new(if i == j { 1.0f64 } else { 0.0 }, 0.0)
        });
        let s = sym_power_matrix(&id, 2);
        assert_eq!(s.nrows(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s[(i, j)] - Complex::new(expect, 0.0)).norm() < 1e-15);
            }
        }
        // diag(2,3): eigenvalues of Sym^2 are 4, 6, 9
        let a = DMatrix::from_fn(2, 2, |i, j| {
            Complex::new(if i == j { (i + 2) as f64 } else { 0.0 }, 0.0)
        });
        let s = sym_power_matrix(&a, 2);
        let mut diag: Vec<f64> = (0..3).map(|i| s[(i, i)].re).collect();
        diag.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(diag, vec![4.0, 6.0, 9.0]);
    }

    #[test]
    fn sym_power_is_functorial() {
        let a = random_matrix(5, 3);
        let b = random_matrix(6, 3);
        let lhs = sym_power_matrix(&(&a * &b), 2);
        let rhs = sym_power_matrix(&a, 2) * sym_power_matrix(&b, 2);
        let denom: f64 = rhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff: f64 = (lhs - rhs).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(diff / denom < 1e-10, "residual {}", diff / denom);
    }

    #[test]
    fn wedge_det_examples() {
        // g=2, n=2, diag(2,3): 4*6*9 = 216 = 6^3
        let a = DMatrix::from_fn(2, 2, |i, j| {
            Complex::new(if i == j { (i + 2) as f64 } else { 0.0 }, 0.0)
        });
        let rep = check_wedge_det(&a, 2).unwrap();
        assert_eq!(rep.exponent, 3);
        assert!((rep.lhs - Complex::new(216.0, 0.0)).norm() < 1e-9);
        assert!(rep.residual < 1e-12);
        // identity
        let id = DMatrix::from_fn(3, 3, |i, j| {
            Complex::new(if i == j { 1.0f64 } else { 0.0 }, 0.0)
        });
        let rep = check_wedge_det(&id, 3).unwrap();
        assert!((rep.lhs - Complex::new(1.0, 0.0)).norm() < 1e-12);
        // random matrices across (g, n)
        for g in 2..=4usize {
            for n in 1..=3usize {
                for seed in 0..20u64 {
                    let a = random_matrix(seed * 31 + (g * 10 + n) as u64, g);
                    let rep = check_wedge_det(&a, n).unwrap();
                    assert!(
                        rep.residual < 1e-9,
                        "g={g} n={n} seed={seed}: {:e}",
                        rep.residual
                    );
                }
            }
        }
    }

    #[test]
    fn singular_input_detected() {
        let z = DMatrix::from_element(3, 3, Complex::new(0.0f64, 0.0));
        assert!(matches!(check_wedge_det(&z, 2), Err(Error::SingularInput)));
    }
}
