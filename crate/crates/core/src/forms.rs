//! Scalar and matrix modular forms built from thetanulls.
//!
//! F_g(Z) = 2^g sum_{delta even} theta^16[delta](0,Z)
//!          - ( sum_{delta even} theta^8[delta](0,Z) )^2
//! is the Schottky-Igusa form (weight 8); its zero set in H_4 is the closure
//! of the Jacobian locus. S_4 is its symmetrized period-matrix gradient,
//! computed analytically through the heat relation rather than by finite
//! differences, because cancellation in F_4 near the locus makes differencing
//! noisy. chi_k is the product of all even thetanulls. The Klein ratio
//! (det S_4)^2 / chi_68 avoids the square-root branch entirely.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::scalar::{cabs, rof, Cx, Real};
use crate::siegel::SiegelPoint;
use crate::theta::{
    enumerate_characteristics, thetanull_batch, JetOrder, ParityFilter, ThetaJet,
};

/// Value of a scalar form together with the positive scale used for
/// relative-residual reporting.
#[derive(Clone, Debug)]
pub struct FormValue<R: Real> {
    pub value: Cx<R>,
    pub scale: R,
}

fn even_jets<R: Real>(zz: &SiegelPoint<R>, eps: R, order: JetOrder) -> Result<Vec<ThetaJet<R>>> {
    let chars = enumerate_characteristics(zz.genus(), ParityFilter::Even);
    thetanull_batch(&chars, zz, eps, order)
}

fn f_from_jets<R: Real>(g: usize, jets: &[ThetaJet<R>]) -> FormValue<R> {
    let two_g = rof::<R>((1u64 << g) as f64);
    let mut t16 = Complex::new(R::zero(), R::zero());
    let mut t8 = Complex::new(R::zero(), R::zero());
    let mut m16 = R::zero();
    let mut m8 = R::zero();
    for jet in jets {
        let v8 = jet.value.powu(8);
        t8 += v8;
        t16 += v8 * v8;
        let a8 = cabs(v8);
        m8 += a8;
        m16 += a8 * a8;
    }
    FormValue {
        value: t16 * two_g - t8 * t8,
        scale: m16 * two_g + m8 * m8,
    }
}

/// Schottky-Igusa combination F_g(Z) with its scale
/// 2^g sum |theta|^16 + (sum |theta|^8)^2.
pub fn schottky_igusa<R: Real>(zz: &SiegelPoint<R>, eps: R) -> Result<FormValue<R>> {
    let jets = even_jets(zz, eps, JetOrder::Value)?;
    Ok(f_from_jets(zz.genus(), &jets))
}

/// F_g together with its analytic period-matrix gradient.
#[derive(Clone, Debug)]
pub struct SchottkyJet<R: Real> {
    pub form: FormValue<R>,
    /// Full gradient matrix dF/dZ_ij (off-diagonal entries are derivatives
    /// with respect to the independent upper-triangle coordinates).
    pub grad: SymMatrix<R>,
    /// S_4-style symmetrized gradient: (1 + delta_ij)/2 * dF/dZ_ij.
    pub quadric: SymMatrix<R>,
}

/// Analytic gradient by the chain rule through thetanull period derivatives:
/// dF/dZ_ij = sum_delta (2^g 16 theta^15 - 16 theta^7 sum theta^8) dtheta/dZ_ij.
pub fn schottky_igusa_jet<R: Real>(zz: &SiegelPoint<R>, eps: R) -> Result<SchottkyJet<R>> {
    let g = zz.genus();
    let jets = even_jets(zz, eps, JetOrder::Hessian)?;
    let form = f_from_jets(g, &jets);
    let two_g = rof::<R>((1u64 << g) as f64);
    let sixteen = rof::<R>(16.0);
    let t8: Cx<R> = jets
        .iter()
        .map(|j| j.value.powu(8))
        .fold(Complex::new(R::zero(), R::zero()), |a, b| a + b);
    // weighted Hessian sum: sum_delta w_delta Hess_z theta[delta](0)
    let mut raw = SymMatrix::<R>::zeros(g);
    for jet in &jets {
        let v7 = jet.value.powu(7);
        let w = (v7 * jet.value.powu(8) * two_g - v7 * t8) * sixteen;
        for ((i, j), h) in jet.hess.iter_upper() {
            raw.add_upper(i, j, h * w);
        }
    }
    // heat relation: dtheta/dZ_ij = Hess_ij / (2 pi i (1 + delta_ij)), so the
    // symmetrized gradient (1+delta_ij)/2 dF/dZ_ij is raw_ij / (4 pi i).
    let four_pi_i = Complex::new(R::zero(), R::two_pi() * rof::<R>(2.0));
    let quadric = raw.scale(Complex::new(R::one(), R::zero()) / four_pi_i);
    let grad = SymMatrix::from_upper_fn(g, |i, j| {
        let mult = if i == j { R::one() } else { rof::<R>(2.0) };
        quadric.get(i, j) * Complex::new(mult, R::zero())
    });
    Ok(SchottkyJet {
        form,
        grad,
        quadric,
    })
}

/// The S_4 quadric: (1 + delta_ij)/2 * dF_4/dZ_ij at a genus-4 point.
pub fn s4_matrix<R: Real>(zz: &SiegelPoint<R>, eps: R) -> Result<SymMatrix<R>> {
    assert_eq!(zz.genus(), 4, "S_4 is defined at genus 4");
    Ok(schottky_igusa_jet(zz, eps)?.quadric)
}

pub fn det_s4<R: Real>(zz: &SiegelPoint<R>, eps: R) -> Result<Cx<R>> {
    Ok(s4_matrix(zz, eps)?.determinant())
}

/// Product of all even thetanulls.
#[derive(Clone, Debug)]
pub struct ChiValue<R: Real> {
    pub value: Cx<R>,
    /// Modular weight k = 2^{g-2} (2^g + 1).
    pub weight: u64,
    /// Product of the per-characteristic term-sum majorants; the scale
    /// against which |chi| is compared for vanishing tests.
    pub majorant: R,
}

/// chi_k(Z) = prod_{delta even} theta[delta](0, Z), for g >= 2.
pub fn chi_product<R: Real>(zz: &SiegelPoint<R>, eps: R) -> Result<ChiValue<R>> {
    let g = zz.genus();
    assert!(g >= 2, "chi_k requires genus >= 2");
    let jets = even_jets(zz, eps, JetOrder::Value)?;
    let mut value = Complex::new(R::one(), R::zero());
    let mut majorant = R::one();
    for jet in &jets {
        value *= jet.value;
        majorant *= jet.term_majorant;
    }
    Ok(ChiValue {
        value,
        weight: (1u64 << (g - 2)) * ((1u64 << g) + 1),
        majorant,
    })
}

/// Relative floor below which chi_68 is treated as vanishing (hyperelliptic).
pub const CHI_FLOOR: f64 = 1e-30;

/// Branch-free Klein ratio (det S_4)^2 / chi_68. Constant (= d^2) on the
/// Jacobian locus. Fails with `NotOnLocus` if F_4 does not vanish to
/// `locus_tol`, and with `OnHyperellipticLocus` when chi_68 is below its
/// floor (both sides of the Klein formula vanish there).
pub fn klein_ratio<R: Real>(zz: &SiegelPoint<R>, eps: R, locus_tol: R) -> Result<Cx<R>> {
    assert_eq!(zz.genus(), 4);
    let jet = schottky_igusa_jet(zz, eps)?;
    let residual = cabs(jet.form.value) / jet.form.scale;
    if residual > locus_tol {
        return Err(Error::NotOnLocus {
            residual: crate::scalar::tof(residual),
            tol: crate::scalar::tof(locus_tol),
        });
    }
    let chi = chi_product(zz, eps)?;
    if cabs(chi.value) < rof::<R>(CHI_FLOOR) * chi.majorant {
        return Err(Error::OnHyperellipticLocus);
    }
    let det = jet.quadric.determinant();
    Ok(det * det / chi.value)
}
