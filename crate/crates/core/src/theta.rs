//! Riemann theta functions with half-integer characteristics.
//!
//! theta[a;b](z, Z) = sum over k in Z^g of
//!     exp( pi i t(k+a) Z (k+a) + 2 pi i t(k+a)(z+b) ),
//! with a, b in {0, 1/2}^g. Evaluation truncates the sum to the ellipsoid
//! t(k+a) Y (k+a) <= R^2 in the metric Y = Im Z, enumerated by recursive
//! coordinate bounds from the Cholesky factor of Y. The returned error bound
//! is a proven tail majorant obtained by comparison with one-dimensional
//! Gaussian integrals; derivative bounds multiply it by polynomial factors.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::scalar::{rof, Cx, Real};
use crate::siegel::SiegelPoint;

/// Cap on the summation radius (in the Im Z metric). Radii beyond this signal
/// an imaginary part too small for the precision budget.
pub const RADIUS_CAP: f64 = 40.0;

/// Cap on the number of enumerated lattice points per characteristic.
const MAX_POINTS: f64 = 2.0e7;

/// Half-integer theta characteristic: bit vectors with value bits/2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfCharacteristic {
    a_bits: Vec<u8>,
    b_bits: Vec<u8>,
}

impl HalfCharacteristic {
    pub fn new(a_bits: Vec<u8>, b_bits: Vec<u8>) -> Self {
        assert_eq!(a_bits.len(), b_bits.len());
        assert!(a_bits.iter().chain(b_bits.iter()).all(|&b| b <= 1));
        Self { a_bits, b_bits }
    }

    /// The zero characteristic of genus g.
    pub fn zero(g: usize) -> Self {
        Self::new(vec![0; g], vec![0; g])
    }

    pub fn genus(&self) -> usize {
        self.a_bits.len()
    }

    pub fn a_bits(&self) -> &[u8] {
        &self.a_bits
    }

    pub fn b_bits(&self) -> &[u8] {
        &self.b_bits
    }

    /// Characteristic shift a = a_bits / 2 as scalars.
    pub fn a_half<R: Real>(&self) -> Vec<R> {
        self.a_bits.iter().map(|&b| rof(b as f64 * 0.5)).collect()
    }

    pub fn b_half<R: Real>(&self) -> Vec<R> {
        self.b_bits.iter().map(|&b| rof(b as f64 * 0.5)).collect()
    }

    /// Parity e(delta) = (-1)^{4 t(a) b} in {+1, -1}.
    pub fn parity(&self) -> i8 {
        let dot: u32 = self
            .a_bits
            .iter()
            .zip(self.b_bits.iter())
            .map(|(&x, &y)| (x * y) as u32)
            .sum();
        if dot % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 1
    }
}

impl std::fmt::Display for HalfCharacteristic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = |bits: &[u8]| {
            bits.iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join("")
        };
        write!(f, "[{}|{}]", s(&self.a_bits), s(&self.b_bits))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityFilter {
    All,
    Even,
    Odd,
}

/// Enumerate characteristics in lexicographic order of (a_bits, b_bits),
/// most significant bit first.
pub fn enumerate_characteristics(g: usize, filter: ParityFilter) -> Vec<HalfCharacteristic> {
    assert!(g >= 1);
    let bits = |v: u32| -> Vec<u8> { (0..g).map(|i| ((v >> (g - 1 - i)) & 1) as u8).collect() };
    let mut out = Vec::new();
    for av in 0..(1u32 << g) {
        for bv in 0..(1u32 << g) {
            let ch = HalfCharacteristic::new(bits(av), bits(bv));
            let keep = match filter {
                ParityFilter::All => true,
                ParityFilter::Even => ch.is_even(),
                ParityFilter::Odd => !ch.is_even(),
            };
            if keep {
                out.push(ch);
            }
        }
    }
    out
}

/// Counts 2^{g-1}(2^g + 1) and 2^{g-1}(2^g - 1) of even and odd spin
/// structures.
pub fn spin_structure_counts(g: u32) -> (u64, u64) {
    let h = 1u64 << (g - 1);
    let p = 1u64 << g;
    (h * (p + 1), h * (p - 1))
}

/// How far to differentiate under the sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd)]
pub enum JetOrder {
    Value,
    Gradient,
    Hessian,
}

/// Truncated theta sum with z-derivative jets and tail majorants.
#[derive(Clone, Debug)]
pub struct ThetaJet<R: Real> {
    pub value: Cx<R>,
    /// Gradient in z (length g; empty unless requested).
    pub grad: Vec<Cx<R>>,
    /// Symmetric Hessian in z (dimension 0 unless requested).
    pub hess: SymMatrix<R>,
    /// Proven tail majorant for the value.
    pub err_bound: R,
    pub err_grad: R,
    pub err_hess: R,
    /// Sum of included term moduli; the natural scale for relative residuals.
    pub term_majorant: R,
    /// Summation radius actually used (Im Z metric).
    pub radius: R,
    pub points: u64,
}

struct Plan<R: Real> {
    g: usize,
    /// Full Z matrix rows (complex symmetric).
    z_rows: Vec<Vec<Cx<R>>>,
    /// z + b vector.
    zb: Vec<Cx<R>>,
    /// Characteristic shift a.
    a: Vec<R>,
    /// d_i = U_ii^2 of the Cholesky factor U (upper) of Y.
    d: Vec<R>,
    /// u[i][j] = U_ij / U_ii for j > i (offset by i+1).
    u: Vec<Vec<R>>,
    r2: R,
    order: JetOrder,
}

struct Accum<R: Real> {
    value: Cx<R>,
    grad: Vec<Cx<R>>,
    hess: Vec<Cx<R>>,
    majorant: R,
    xs: Vec<R>,
    points: u64,
}

impl<R: Real> Plan<R> {
    fn sum(&self, acc: &mut Accum<R>) {
        let zero = Cx::new(R::zero(), R::zero());
        self.recurse(self.g, self.r2, zero, zero, acc);
    }

    /// Fix coordinate `level-1` given coordinates level..g already chosen.
    fn recurse(&self, level: usize, rem: R, quad: Cx<R>, lin: Cx<R>, acc: &mut Accum<R>) {
        let i = level - 1;
        // center of the admissible interval in x_i from the Cholesky form
        let mut s = R::zero();
        for j in (i + 1)..self.g {
            s += self.u[i][j - i - 1] * acc.xs[j];
        }
        let w = (rem.max(R::zero()) / self.d[i]).sqrt();
        let lo = (-s - w - self.a[i]).ceil();
        let hi = (-s + w - self.a[i]).floor();
        // complex linear form L_i = sum_{j>i} Z_ij x_j
        let mut zlin = Cx::new(R::zero(), R::zero());
        for j in (i + 1)..self.g {
            zlin += self.z_rows[i][j] * acc.xs[j];
        }
        let mut k = lo;
        while k <= hi {
            let x = k + self.a[i];
            let t = x + s;
            let rem_next = rem - self.d[i] * t * t;
            if rem_next >= -rof::<R>(1e-12) {
                acc.xs[i] = x;
                let two = rof::<R>(2.0);
                let quad_next = quad + self.z_rows[i][i] * (x * x) + zlin * (two * x);
                let lin_next = lin + self.zb[i] * x;
                if i == 0 {
                    self.leaf(quad_next, lin_next, acc);
                } else {
                    self.recurse(i, rem_next.max(R::zero()), quad_next, lin_next, acc);
                }
            }
            k += R::one();
        }
    }

    #[inline]
    fn leaf(&self, quad: Cx<R>, lin: Cx<R>, acc: &mut Accum<R>) {
        let pi = R::pi();
        let two_pi = R::two_pi();
        // exponent = i*(pi*quad + 2*pi*lin)
        let w = quad * pi + lin * two_pi;
        let m = (-w.im).exp();
        let (sn, cs) = w.re.sin_cos();
        let term = Cx::new(m * cs, m * sn);
        acc.value += term;
        acc.majorant += m;
        acc.points += 1;
        if self.order >= JetOrder::Gradient {
            for j in 0..self.g {
                acc.grad[j] += term * acc.xs[j];
            }
            if self.order >= JetOrder::Hessian {
                let mut idx = 0;
                for i in 0..self.g {
                    let xi = acc.xs[i];
                    for j in i..self.g {
                        acc.hess[idx] += term * (xi * acc.xs[j]);
                        idx += 1;
                    }
                }
            }
        }
    }
}

/// Tail majorant at radius `r` (Im Z metric), by comparison with 1-D Gaussian
/// integrals: every omitted term has t(x)Yx > r^2; half the Gaussian weight
/// bounds the supremum, the other half sums over the full shifted lattice.
fn tail_bound<R: Real>(r: R, lambda_min: R, c_norm: R, g: usize) -> R {
    let pi = R::pi();
    let half = rof::<R>(0.5);
    let rp = r - c_norm;
    if rp <= R::zero() {
        return R::max_value().unwrap();
    }
    let kappa = half * pi * lambda_min;
    let s1 = R::one() + rof::<R>(2.0) * (-kappa).exp() + (pi / kappa).sqrt();
    let mut base = (pi * c_norm * c_norm).exp();
    for _ in 0..g {
        base *= s1;
    }
    base * (-half * pi * rp * rp).exp()
}

/// Evaluate theta[ch](z, Z) with derivatives up to `order`.
pub fn theta_with_order<R: Real>(
    ch: &HalfCharacteristic,
    z: &[Cx<R>],
    zz: &SiegelPoint<R>,
    eps: R,
    order: JetOrder,
) -> Result<ThetaJet<R>> {
    let g = zz.genus();
    assert_eq!(ch.genus(), g, "characteristic genus mismatch");
    assert_eq!(z.len(), g, "z length mismatch");
    assert!(eps > R::zero(), "eps must be positive");

    let y = zz.im();
    let chol = zz.im_cholesky().ok_or(Error::NotPositiveDefinite)?;
    let lambda_min = zz.im_min_eigenvalue();
    let a: Vec<R> = ch.a_half();
    let b: Vec<R> = ch.b_half();

    // q_Y norms of the characteristic shift and of the Gaussian center
    // c = Y^{-1} Im z.
    let q_y = |v: &[R]| -> R {
        let mut acc = R::zero();
        for i in 0..g {
            for j in 0..g {
                acc += v[i] * y[(i, j)] * v[j];
            }
        }
        acc
    };
    let a_eucl = a.iter().map(|&v| v * v).fold(R::zero(), |s, v| s + v).sqrt();
    let im_z: Vec<R> = z.iter().map(|c| c.im).collect();
    let c_vec = {
        let rhs = nalgebra::DVector::from_column_slice(&im_z);
        chol.solve(&rhs)
    };
    let c_norm = {
        let mut acc = R::zero();
        for i in 0..g {
            acc += im_z[i] * c_vec[i];
        }
        acc.max(R::zero()).sqrt()
    };

    // |T_0|, a crude positive lower bound for the term-sum majorant.
    let t0_mag = {
        let ac: Vec<R> = (0..g).map(|i| a[i] + c_vec[i]).collect();
        (R::pi() * (c_norm * c_norm - q_y(&ac))).exp()
    };

    // radius: the required radius comes from eps and the smallest eigenvalue
    // of Im Z, plus margins for the characteristic shift and the Gaussian
    // center; beyond the cap the imaginary part is too small for the
    // precision budget.
    let cap = rof::<R>(RADIUS_CAP);
    let mut r = (eps.recip().ln() / (R::pi() * lambda_min)).sqrt()
        + a_eucl
        + c_norm
        + rof::<R>(2.0);
    if r > cap {
        return Err(Error::NonConvergent {
            required: crate::scalar::tof(r),
            cap: RADIUS_CAP,
        });
    }
    // best-effort bump: tighten until the proven tail majorant sits below eps
    // relative to |T_0| (possible except in regimes where every term of this
    // characteristic is negligible anyway).
    let target = eps * t0_mag * rof::<R>(0.5);
    while tail_bound(r, lambda_min, c_norm, g) > target && r + rof::<R>(0.5) <= cap {
        r += rof::<R>(0.5);
    }

    // point-count guard: ellipsoid volume over the lattice determinant
    let chol_l = chol.l();
    let det_sqrt: R = (0..g).map(|i| chol_l[(i, i)]).fold(R::one(), |p, v| p * v);
    let ball_vol = match g {
        1 => rof::<R>(2.0) * r,
        2 => R::pi() * r * r,
        3 => rof::<R>(4.18879) * r * r * r,
        _ => rof::<R>(4.9348) * r * r * r * r, // pi^2/2 (genus 4); larger g is gated by cost anyway
    };
    let est_points = crate::scalar::tof(ball_vol / det_sqrt);
    if est_points > MAX_POINTS {
        return Err(Error::NonConvergent {
            required: crate::scalar::tof(r),
            cap: RADIUS_CAP,
        });
    }

    // Cholesky pieces for the recursive bounds: Y = t(U) U with U upper.
    let mut d = vec![R::zero(); g];
    let mut u = vec![Vec::new(); g];
    for i in 0..g {
        let uii = chol_l[(i, i)];
        d[i] = uii * uii;
        u[i] = ((i + 1)..g).map(|j| chol_l[(j, i)] / uii).collect();
    }

    let zb: Vec<Cx<R>> = (0..g).map(|i| z[i] + Cx::new(b[i], R::zero())).collect();
    let z_rows: Vec<Vec<Cx<R>>> = (0..g)
        .map(|i| (0..g).map(|j| zz.entry(i, j)).collect())
        .collect();

    let plan = Plan {
        g,
        z_rows,
        zb,
        a,
        d,
        u,
        r2: r * r,
        order,
    };
    let mut acc = Accum {
        value: Cx::new(R::zero(), R::zero()),
        grad: vec![Cx::new(R::zero(), R::zero()); g],
        hess: vec![Cx::new(R::zero(), R::zero()); g * (g + 1) / 2],
        majorant: R::zero(),
        xs: vec![R::zero(); g],
        points: 0,
    };
    plan.sum(&mut acc);

    let err = tail_bound(r, lambda_min, c_norm, g);
    let poly = R::two_pi() * r / lambda_min.sqrt();
    let two_pi_i = Cx::new(R::zero(), R::two_pi());

    let grad: Vec<Cx<R>> = if order >= JetOrder::Gradient {
        acc.grad.iter().map(|&v| v * two_pi_i).collect()
    } else {
        Vec::new()
    };
    let hess = if order >= JetOrder::Hessian {
        let factor = two_pi_i * two_pi_i;
        let mut h = SymMatrix::zeros(g);
        let mut idx = 0;
        for i in 0..g {
            for j in i..g {
                h.set_upper(i, j, acc.hess[idx] * factor);
                idx += 1;
            }
        }
        h
    } else {
        SymMatrix::zeros(0)
    };

    Ok(ThetaJet {
        value: acc.value,
        grad,
        hess,
        err_bound: err,
        err_grad: err * poly,
        err_hess: err * poly * poly,
        term_majorant: acc.majorant,
        radius: r,
        points: acc.points,
    })
}

/// Full jet (value, gradient, Hessian in z).
pub fn theta_jet<R: Real>(
    ch: &HalfCharacteristic,
    z: &[Cx<R>],
    zz: &SiegelPoint<R>,
    eps: R,
) -> Result<ThetaJet<R>> {
    theta_with_order(ch, z, zz, eps, JetOrder::Hessian)
}

/// Value-only evaluation.
pub fn theta_value<R: Real>(
    ch: &HalfCharacteristic,
    z: &[Cx<R>],
    zz: &SiegelPoint<R>,
    eps: R,
) -> Result<ThetaJet<R>> {
    theta_with_order(ch, z, zz, eps, JetOrder::Value)
}

/// Derivative of theta with respect to the period-matrix entries via the
/// term-by-term heat relation
///   d theta / d Z_jk = (2 pi i (1 + delta_jk))^{-1} d^2 theta / dz_j dz_k.
pub fn theta_dtau<R: Real>(
    ch: &HalfCharacteristic,
    z: &[Cx<R>],
    zz: &SiegelPoint<R>,
    eps: R,
) -> Result<SymMatrix<R>> {
    let jet = theta_jet(ch, z, zz, eps)?;
    Ok(heat_scale(&jet.hess))
}

/// Apply the heat-relation scaling to a z-Hessian.
pub fn heat_scale<R: Real>(hess: &SymMatrix<R>) -> SymMatrix<R> {
    let g = hess.dim();
    SymMatrix::from_upper_fn(g, |j, k| {
        let mult = if j == k { rof::<R>(2.0) } else { R::one() };
        let denom = Cx::new(R::zero(), R::two_pi() * mult);
        hess.get(j, k) / denom
    })
}

/// Evaluate all thetanulls (z = 0) for the given characteristics, in input
/// order. The map over characteristics runs in parallel; the result vector
/// preserves order, so reductions over it are deterministic.
pub fn thetanull_batch<R: Real>(
    chars: &[HalfCharacteristic],
    zz: &SiegelPoint<R>,
    eps: R,
    order: JetOrder,
) -> Result<Vec<ThetaJet<R>>> {
    let z = vec![Cx::new(R::zero(), R::zero()); zz.genus()];
    chars
        .par_iter()
        .map(|ch| theta_with_order(ch, &z, zz, eps, order))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::siegel::random_siegel_point;
    use num_complex::Complex;

    fn g1_point(im: f64) -> SiegelPoint<f64> {
        SiegelPoint::from_matrix(
            &nalgebra::DMatrix::from_element(1, 1, Complex::new(0.0, im)),
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn characteristic_counts() {
        for g in 1..=5u32 {
            let even = enumerate_characteristics(g as usize, ParityFilter::Even);
            let odd = enumerate_characteristics(g as usize, ParityFilter::Odd);
            let (ne, no) = spin_structure_counts(g);
            assert_eq!(even.len() as u64, ne);
            assert_eq!(odd.len() as u64, no);
            assert_eq!((even.len() + odd.len()) as u64, 1 << (2 * g));
        }
        // g=1: 3 even, 1 odd
        assert_eq!(spin_structure_counts(1), (3, 1));
        // g=4: 136 even, 120 odd
        assert_eq!(spin_structure_counts(4), (136, 120));
    }

    #[test]
    fn parity_example() {
        let ch = HalfCharacteristic::new(vec![1, 0, 0, 0], vec![1, 0, 0, 0]);
        assert_eq!(ch.parity(), -1);
    }

    #[test]
    fn enumeration_is_lexicographic_and_deterministic() {
        let all = enumerate_characteristics(2, ParityFilter::All);
        assert_eq!(all.len(), 16);
        assert_eq!(all[0], HalfCharacteristic::new(vec![0, 0], vec![0, 0]));
        assert_eq!(all[1], HalfCharacteristic::new(vec![0, 0], vec![0, 1]));
        assert_eq!(all[4], HalfCharacteristic::new(vec![0, 1], vec![0, 0]));
    }

    /// Independent 1-D oracle: direct summation of the defining series.
    fn g1_series_oracle(a: f64, b: f64, im: f64, n: i64) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for k in -n..=n {
            let x = k as f64 + a;
            // exponent: pi i x^2 (i im) + 2 pi i x b = pi(-x^2 im) + i 2 pi x b
            let e = Complex::new(-std::f64::consts::PI * x * x * im, 0.0)
                + Complex::new(0.0, 2.0 * std::f64::consts::PI * x * b);
            acc += e.exp();
        }
        acc
    }

    #[test]
    fn theta_value_at_i_matches_closed_form_and_oracle() {
        // theta[0,0](0, i) = pi^{1/4} / Gamma(3/4), cross-checked by the
        // direct-summation oracle.
        let ch = HalfCharacteristic::zero(1);
        let jet = theta_value(&ch, &[Complex::new(0.0, 0.0)], &g1_point(1.0), 1e-13).unwrap();
        let closed = 1.0864348112133080f64;
        assert!((jet.value.re - closed).abs() < 1e-12, "{}", jet.value.re);
        assert!(jet.value.im.abs() < 1e-14);
        let oracle = g1_series_oracle(0.0, 0.0, 1.0, 40);
        assert!((jet.value - oracle).norm() < 1e-13);
    }

    #[test]
    fn theta_value_at_2i_matches_partial_sum_oracle() {
        let ch = HalfCharacteristic::zero(1);
        let jet = theta_value(&ch, &[Complex::new(0.0, 0.0)], &g1_point(2.0), 1e-13).unwrap();
        // 3-term partial sum 1 + 2 e^{-2 pi} + 2 e^{-8 pi}
        let partial = 1.0
            + 2.0 * (-2.0 * std::f64::consts::PI).exp()
            + 2.0 * (-8.0 * std::f64::consts::PI).exp();
        assert!((jet.value.re - partial).abs() < 1e-10);
        assert!((jet.value.re - 1.0037348855).abs() < 1e-9);
    }

    #[test]
    fn odd_characteristic_vanishes_at_origin() {
        let z4: SiegelPoint<f64> = random_siegel_point(3, 4, 0.6, 1.0);
        let z = vec![Complex::new(0.0, 0.0); 4];
        for ch in enumerate_characteristics(4, ParityFilter::Odd).iter().take(6) {
            let jet = theta_value(ch, &z, &z4, 1e-13).unwrap();
            assert!(
                jet.value.norm() <= jet.err_bound + 1e-13 * jet.term_majorant,
                "odd thetanull {} = {:?}",
                ch,
                jet.value
            );
        }
    }

    #[test]
    fn even_characteristic_gradient_vanishes_at_origin() {
        let z4: SiegelPoint<f64> = random_siegel_point(4, 4, 0.6, 1.0);
        let z = vec![Complex::new(0.0, 0.0); 4];
        for ch in enumerate_characteristics(4, ParityFilter::Even).iter().take(6) {
            let jet = theta_jet(ch, &z, &z4, 1e-13).unwrap();
            for gcomp in &jet.grad {
                assert!(gcomp.norm() <= jet.err_grad + 1e-12 * jet.term_majorant);
            }
        }
    }

    #[test]
    fn doubling_radius_changes_value_within_err_bound() {
        let ch = HalfCharacteristic::new(vec![1, 0], vec![0, 1]);
        let zz: SiegelPoint<f64> = random_siegel_point(9, 2, 0.7, 1.2);
        let z = vec![Complex::new(0.05, 0.02), Complex::new(-0.03, 0.04)];
        let lo = theta_value(&ch, &z, &zz, 1e-9).unwrap();
        let hi = theta_value(&ch, &z, &zz, 1e-15).unwrap();
        assert!((lo.value - hi.value).norm() <= lo.err_bound);
        assert!(hi.err_bound < lo.err_bound);
    }

    #[test]
    fn nonconvergent_on_tiny_imaginary_part() {
        let zz = g1_point(1e-5);
        let ch = HalfCharacteristic::zero(1);
        let r = theta_value(&ch, &[Complex::new(0.0, 0.0)], &zz, 1e-13);
        assert!(matches!(r, Err(Error::NonConvergent { .. })));
    }

    #[test]
    fn jacobi_quartic_identity() {
        // theta[1|0]^4 + theta[0|1]^4 = theta[0|0]^4 at random genus-1 points
        for seed in 0..20u64 {
            let zz: SiegelPoint<f64> = random_siegel_point(seed, 1, 0.4, 2.0);
            let z = [Complex::new(0.0, 0.0)];
            let t2 = theta_value(&HalfCharacteristic::new(vec![1], vec![0]), &z, &zz, 1e-14)
                .unwrap()
                .value;
            let t4 = theta_value(&HalfCharacteristic::new(vec![0], vec![1]), &z, &zz, 1e-14)
                .unwrap()
                .value;
            let t3 = theta_value(&HalfCharacteristic::zero(1), &z, &zz, 1e-14)
                .unwrap()
                .value;
            let lhs = t2.powu(4) + t4.powu(4);
            let rhs = t3.powu(4);
            assert!(
                (lhs - rhs).norm() / rhs.norm() < 1e-12,
                "seed {seed}: {:?} vs {:?}",
                lhs,
                rhs
            );
        }
    }

    #[test]
    fn heat_relation_vs_g1_term_series() {
        // g=1: d theta / d Z = theta''(z)/(4 pi i); compare against the series
        // differentiated term by term.
        let ch = HalfCharacteristic::zero(1);
        let im = 0.9;
        let zz = g1_point(im);
        let z = [Complex::new(0.1, 0.05)];
        let dz = theta_dtau(&ch, &z, &zz, 1e-13).unwrap();
        let mut oracle = Complex::new(0.0, 0.0);
        for k in -40i64..=40 {
            let x = k as f64;
            let e = Complex::new(0.0, std::f64::consts::PI * x * x) * Complex::new(0.0, im)
                + Complex::new(0.0, 2.0 * std::f64::consts::PI * x) * z[0];
            // d/dZ of exp(pi i x^2 Z + 2 pi i x z) = pi i x^2 * term
            oracle += Complex::new(0.0, std::f64::consts::PI * x * x) * e.exp();
        }
        assert!((dz.get(0, 0) - oracle).norm() < 1e-11);
    }
}
