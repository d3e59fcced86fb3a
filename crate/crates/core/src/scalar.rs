//! Scalar abstraction: every numerical routine in this crate is generic over a
//! real floating type `R` implementing [`Real`]. IEEE `f64` is the default and
//! the only type the CLI instantiates; tolerances quoted in the documentation
//! assume it. Complex arithmetic is `num_complex::Complex<R>` throughout.

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;

/// Real scalar for floating computations (`f64`, `f32`, or a compatible
/// extended-precision type implementing `nalgebra::RealField`).
pub trait Real: RealField + Copy {}

impl<T: RealField + Copy> Real for T {}

/// Complex number over the module scalar.
pub type Cx<R> = Complex<R>;

/// Exact widening conversion from an `f64` constant.
#[inline]
pub fn rof<R: Real>(x: f64) -> R {
    R::from_subset(&x)
}

/// Narrowing conversion to `f64` for reporting (NaN if unrepresentable).
#[inline]
pub fn tof<R: Real>(x: R) -> f64 {
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

/// Complex constant from `f64` parts.
#[inline]
pub fn cof<R: Real>(re: f64, im: f64) -> Cx<R> {
    Complex::new(rof(re), rof(im))
}

/// Complex exponential through the `ComplexField` impl of `Complex<R>`.
#[inline]
pub fn cexp<R: Real>(z: Cx<R>) -> Cx<R> {
    let m = z.re.exp();
    let (s, c) = z.im.sin_cos();
    Complex::new(m * c, m * s)
}

/// |z| without going through `Float`.
#[inline]
pub fn cabs<R: Real>(z: Cx<R>) -> R {
    ComplexField::modulus(z)
}

/// Relative difference |a - b| / max(|b|, floor).
pub fn rel_err<R: Real>(a: Cx<R>, b: Cx<R>, floor: R) -> R {
    cabs(a - b) / cabs(b).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cexp_matches_std() {
        let z = Complex::new(0.3f64, -1.7);
        let w = cexp(z);
        let e = z.exp();
        assert!((w - e).norm() < 1e-15);
    }

    #[test]
    fn conversions_are_exact() {
        let x: f64 = rof::<f64>(0.1234567890123);
        assert_eq!(x, 0.1234567890123);
    }
}
