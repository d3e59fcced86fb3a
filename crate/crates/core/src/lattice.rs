//! Even unimodular lattices E8+E8 and D16+, exact short-vector enumeration,
//! genus-1/2 Siegel theta series, and the difference identity
//! F_g(Z) = 2^{2g} ( Theta_{D16+}(Z) - Theta_{E8}(Z)^2 ).
//!
//! Bases are stored with doubled coordinates (rows are basis vectors times
//! two), so half-integer glue vectors stay in exact integers. Enumeration
//! recurses over coordinates with floating Cholesky bounds but keeps the norm
//! in exact integer arithmetic, so counts are exact. Norm counts for the
//! built-in lattices are also available through an exact coordinate-parity
//! convolution, which is what the theta series use at large radius.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::schottky_igusa;
use crate::scalar::{cabs, cexp, rof, Cx, Real};
use crate::siegel::SiegelPoint;

/// Which built-in construction a lattice came from (enables exact q-series
/// norm counts without enumeration).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Builtin {
    E8,
    E8E8,
    D16Plus,
}

/// Even unimodular lattice given by an exact basis (doubled coordinates) and
/// its integer Gram matrix.
#[derive(Clone, Debug)]
pub struct EvenLattice {
    rank: usize,
    /// Row-major rank x rank, rows are basis vectors scaled by 2.
    basis2: Vec<i64>,
    /// gram = basis . t(basis), exact.
    gram: Vec<i64>,
    builtin: Option<Builtin>,
}

impl EvenLattice {
    /// Validate and build: gram must equal basis.t(basis) exactly, have even
    /// diagonal, and determinant one.
    pub fn new(rank: usize, basis2: Vec<i64>) -> Result<Self> {
        Self::new_tagged(rank, basis2, None)
    }

    fn new_tagged(rank: usize, basis2: Vec<i64>, builtin: Option<Builtin>) -> Result<Self> {
        if basis2.len() != rank * rank {
            return Err(Error::InvalidInput("basis has wrong shape".into()));
        }
        let mut gram = vec![0i64; rank * rank];
        for i in 0..rank {
            for j in 0..rank {
                let mut acc: i128 = 0;
                for k in 0..rank {
                    acc += basis2[i * rank + k] as i128 * basis2[j * rank + k] as i128;
                }
                if acc % 4 != 0 {
                    return Err(Error::InvalidInput(
                        "basis inner products are not integral".into(),
                    ));
                }
                gram[i * rank + j] =
                    i64::try_from(acc / 4).map_err(|_| Error::Overflow("gram entry"))?;
            }
        }
        for i in 0..rank {
            if gram[i * rank + i] % 2 != 0 {
                return Err(Error::InvalidInput("lattice is not even".into()));
            }
        }
        if bareiss_det(rank, &gram)? != 1 {
            return Err(Error::InvalidInput("lattice is not unimodular".into()));
        }
        Ok(Self {
            rank,
            basis2,
            gram,
            builtin,
        })
    }

    /// E8 root lattice in the even coordinate system: D8 basis plus the
    /// half-integer glue vector.
    pub fn e8() -> Self {
        let mut b2 = vec![0i64; 64];
        b2[0] = 4; // 2 * e_1
        for i in 1..7 {
            b2[i * 8 + i - 1] = -2;
            b2[i * 8 + i] = 2;
        }
        for j in 0..8 {
            b2[7 * 8 + j] = 1; // (1/2, ..., 1/2)
        }
        Self::new_tagged(8, b2, Some(Builtin::E8)).expect("E8 basis is valid")
    }

    /// Orthogonal direct sum E8 + E8.
    pub fn e8_e8() -> Self {
        let e8 = Self::e8();
        let mut b2 = vec![0i64; 256];
        for i in 0..8 {
            for j in 0..8 {
                b2[i * 16 + j] = e8.basis2[i * 8 + j];
                b2[(8 + i) * 16 + (8 + j)] = e8.basis2[i * 8 + j];
            }
        }
        Self::new_tagged(16, b2, Some(Builtin::E8E8)).expect("E8+E8 basis is valid")
    }

    /// D16+ = D16 plus the glue class of (1/2, ..., 1/2); the D16 basis rows
    /// -e1-e2, e1-e2, e2-e3, ..., e15-e16 have the last slot replaced by the
    /// glue vector.
    pub fn d16_plus() -> Self {
        let n = 16;
        let mut b2 = vec![0i64; n * n];
        b2[0] = -2;
        b2[1] = -2;
        b2[n] = 2;
        b2[n + 1] = -2;
        for i in 2..15 {
            b2[i * n + i - 1] = 2;
            b2[i * n + i] = -2;
        }
        for j in 0..n {
            b2[15 * n + j] = 1;
        }
        Self::new_tagged(16, b2, Some(Builtin::D16Plus)).expect("D16+ basis is valid")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &[i64] {
        &self.gram
    }

    pub fn basis2(&self) -> &[i64] {
        &self.basis2
    }

    /// Ambient coordinates (times two) of the vector with the given basis
    /// coefficients.
    pub fn ambient2(&self, coeffs: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.rank];
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                for j in 0..self.rank {
                    out[j] += c * self.basis2[i * self.rank + j];
                }
            }
        }
        out
    }

    /// Exact norm map: norm -> number of lattice vectors of that norm, up to
    /// `max_norm`, by recursive bound propagation over coordinates.
    pub fn enumerate_vectors(&self, max_norm: i64) -> Result<BTreeMap<i64, u64>> {
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        counts.insert(0, 1);
        self.visit_canonical(max_norm, &mut |_c, norm| {
            *counts.entry(norm).or_insert(0) += 2; // v and -v
        })?;
        Ok(counts)
    }

    /// Visit every nonzero lattice vector of norm at most `max_norm` once per
    /// +-pair (the representative has its outermost nonzero coefficient
    /// positive), as (coefficients, norm).
    pub fn visit_canonical(
        &self,
        max_norm: i64,
        f: &mut impl FnMut(&[i64], i64),
    ) -> Result<()> {
        if max_norm < 0 {
            return Err(Error::InvalidInput("max_norm must be nonnegative".into()));
        }
        let n = self.rank;
        // floating Cholesky of the Gram matrix for the search bounds
        let gram_f = nalgebra::DMatrix::<f64>::from_fn(n, n, |i, j| self.gram[i * n + j] as f64);
        let chol = nalgebra::Cholesky::new(gram_f)
            .ok_or_else(|| Error::InvalidInput("gram matrix is not positive definite".into()))?;
        let l = chol.l();
        let mut d = vec![0.0f64; n];
        let mut u = vec![Vec::new(); n];
        for i in 0..n {
            let uii = l[(i, i)];
            d[i] = uii * uii;
            u[i] = ((i + 1)..n).map(|j| l[(j, i)] / uii).collect();
        }
        let mut st = Enum {
            lat: self,
            d,
            u,
            max_norm,
            coeffs: vec![0i64; n],
            lin: vec![0i128; n],
        };
        st.recurse(n, max_norm as f64 + 0.5, 0, true, f)
    }

    /// Full enumeration including both signs and the zero vector.
    pub fn visit_vectors(&self, max_norm: i64, f: &mut impl FnMut(&[i64], i64)) -> Result<()> {
        if max_norm >= 0 {
            f(&vec![0i64; self.rank], 0);
        }
        let mut neg = vec![0i64; self.rank];
        self.visit_canonical(max_norm, &mut |c, norm| {
            f(c, norm);
            for (o, &v) in neg.iter_mut().zip(c.iter()) {
                *o = -v;
            }
            f(&neg, norm);
        })
    }

    /// Exact norm counts: q-series convolution for the built-ins, recursive
    /// enumeration otherwise.
    pub fn norm_counts(&self, max_norm: i64) -> Result<BTreeMap<i64, u64>> {
        match self.builtin {
            Some(Builtin::E8) => Ok(parity_counts(8, max_norm)),
            Some(Builtin::D16Plus) => Ok(parity_counts(16, max_norm)),
            Some(Builtin::E8E8) => {
                let e8 = parity_counts(8, max_norm);
                let mut out = BTreeMap::new();
                for (&n1, &c1) in &e8 {
                    for (&n2, &c2) in &e8 {
                        if n1 + n2 <= max_norm {
                            *out.entry(n1 + n2).or_insert(0) += c1 * c2;
                        }
                    }
                }
                Ok(out)
            }
            None => self.enumerate_vectors(max_norm),
        }
    }
}

struct Enum<'a> {
    lat: &'a EvenLattice,
    d: Vec<f64>,
    u: Vec<Vec<f64>>,
    max_norm: i64,
    coeffs: Vec<i64>,
    lin: Vec<i128>, // lin[i] = sum_{j > i, fixed} gram[i][j] * c_j
}

impl Enum<'_> {
    fn recurse(
        &mut self,
        level: usize,
        rem: f64,
        norm_partial: i128,
        top_zero: bool,
        f: &mut impl FnMut(&[i64], i64),
    ) -> Result<()> {
        let i = level - 1;
        let n = self.lat.rank;
        let mut s = 0.0f64;
        for j in (i + 1)..n {
            s += self.u[i][j - i - 1] * self.coeffs[j] as f64;
        }
        let w = (rem.max(0.0) / self.d[i]).sqrt() + 1e-9;
        let lo = if top_zero { 0 } else { (-s - w).ceil() as i64 };
        let hi = (-s + w).floor() as i64;
        if lo.abs() > 1_000_000 || hi.abs() > 1_000_000 {
            return Err(Error::Overflow("enumeration bound"));
        }
        for k in lo..=hi {
            let t = k as f64 + s;
            let rem_next = rem - self.d[i] * t * t;
            if rem_next < -0.5 {
                continue;
            }
            self.coeffs[i] = k;
            let gii = self.lat.gram[i * n + i] as i128;
            let norm_next =
                norm_partial + gii * (k as i128) * (k as i128) + 2 * (k as i128) * self.lin[i];
            let zero_chain = top_zero && k == 0;
            if i == 0 {
                let norm = i64::try_from(norm_next).map_err(|_| Error::Overflow("norm"))?;
                if !zero_chain && norm <= self.max_norm {
                    f(&self.coeffs, norm);
                }
            } else {
                if k != 0 {
                    for ip in 0..i {
                        self.lin[ip] += self.lat.gram[ip * n + i] as i128 * k as i128;
                    }
                }
                self.recurse(i, rem_next.max(0.0), norm_next, zero_chain, f)?;
                if k != 0 {
                    for ip in 0..i {
                        self.lin[ip] -= self.lat.gram[ip * n + i] as i128 * k as i128;
                    }
                }
            }
        }
        self.coeffs[i] = 0;
        Ok(())
    }
}

/// Fraction-free Gaussian elimination determinant, exact in i128.
fn bareiss_det(n: usize, m: &[i64]) -> Result<i128> {
    let mut a: Vec<i128> = m.iter().map(|&v| v as i128).collect();
    let mut denom: i128 = 1;
    let mut sign: i128 = 1;
    for k in 0..n.saturating_sub(1) {
        if a[k * n + k] == 0 {
            let p = ((k + 1)..n).find(|&r| a[r * n + k] != 0);
            match p {
                Some(r) => {
                    for c in 0..n {
                        a.swap(k * n + c, r * n + c);
                    }
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = a[i * n + j]
                    .checked_mul(a[k * n + k])
                    .and_then(|x| x.checked_sub(a[i * n + k].checked_mul(a[k * n + j])?))
                    .ok_or(Error::Overflow("bareiss"))?;
                a[i * n + j] = num / denom;
            }
            a[i * n + k] = 0;
        }
        denom = a[k * n + k];
    }
    Ok(sign * a[(n - 1) * n + (n - 1)])
}

/// Exact norm counts for the coordinate-parity description
/// { d in Z^rank : all d_i of equal parity, sum d_i = 0 mod 4 } / 2,
/// which realizes E8 (rank 8) and D16+ (rank 16).
fn parity_counts(rank: usize, max_norm: i64) -> BTreeMap<i64, u64> {
    let n4 = (4 * max_norm).max(0) as usize;
    // state[m][k] = number of prefixes with coordinate sum = m (mod 4) and
    // squared doubled-norm k
    let fold = |vals: &[i64]| -> Vec<u64> {
        let mut state = vec![vec![0u64; n4 + 1]; 4];
        state[0][0] = 1;
        for _ in 0..rank {
            let mut next = vec![vec![0u64; n4 + 1]; 4];
            for m in 0..4usize {
                for k in 0..=n4 {
                    let c = state[m][k];
                    if c == 0 {
                        continue;
                    }
                    for &dv in vals {
                        let k2 = k + (dv * dv) as usize;
                        if k2 <= n4 {
                            let m2 = ((m as i64 + dv).rem_euclid(4)) as usize;
                            next[m2][k2] += c;
                        }
                    }
                }
            }
            state = next;
        }
        state.swap_remove(0)
    };
    let bound = (n4 as f64).sqrt() as i64 + 1;
    let evens: Vec<i64> = (-bound..=bound).filter(|d| d.rem_euclid(2) == 0).collect();
    let odds: Vec<i64> = (-bound..=bound).filter(|d| d.rem_euclid(2) == 1).collect();
    let even_part = fold(&evens);
    let odd_part = fold(&odds);
    let mut out = BTreeMap::new();
    for k4 in (0..=n4).step_by(4) {
        let c = even_part[k4] + odd_part[k4];
        if c > 0 {
            out.insert((k4 / 4) as i64, c);
        }
    }
    out
}

/// Polynomial bound on the norm-n shell count of the built-in lattices
/// (their genus-1 theta series are Eisenstein: 240 sigma_3 and 480 sigma_7
/// coefficients), used for honest tail majorants.
fn shell_count_bound(rank: usize, norm: i64) -> f64 {
    if norm <= 0 {
        return 1.0;
    }
    let m = (norm / 2) as f64;
    match rank {
        8 => 289.0 * m * m * m,  // 240 sigma_3(m) <= 240 zeta(3) m^3
        16 => 488.0 * m.powi(7), // 480 sigma_7(m) <= 480 zeta(7) m^7
        r => (1.0 + 2.0 * (norm as f64 / 2.0).sqrt()).powi(r as i32),
    }
}

/// Truncated Siegel theta series value with an honest tail majorant.
#[derive(Clone, Debug)]
pub struct SiegelThetaValue<R: Real> {
    pub value: Cx<R>,
    pub tail_bound: R,
    /// Total-norm truncation actually used.
    pub norm_cap: i64,
}

/// Genus-g Siegel theta series of an even lattice,
/// Theta(Z) = sum over g-tuples (v_1..v_g) of exp(pi i sum_jk Z_jk <v_j, v_k>),
/// truncated by a total-norm bound derived from eps and the smallest
/// eigenvalue of Im Z. Genus 1 and 2 are supported; genus 3 sits behind the
/// override flag (combinatorial blow-up), higher genus is refused.
pub fn siegel_theta<R: Real>(
    lat: &EvenLattice,
    zz: &SiegelPoint<R>,
    eps: R,
    genus3_override: bool,
) -> Result<SiegelThetaValue<R>> {
    match zz.genus() {
        1 => theta_genus1(lat, zz, eps),
        2 => theta_genus2(lat, zz, eps),
        3 if genus3_override => theta_genus3(lat, zz, eps),
        g => Err(Error::CostCapExceeded { genus: g }),
    }
}

/// Smallest even cap N whose bound-based tail is below target.
fn genus1_cap(rank: usize, lambda: f64, eps: f64, n_max: i64) -> Result<(i64, f64)> {
    let term =
        |n: i64| shell_count_bound(rank, n) * (-std::f64::consts::PI * lambda * n as f64).exp();
    let tail_from = |n0: i64| -> f64 {
        let mut acc = 0.0;
        let mut n = n0;
        loop {
            let t = term(n);
            acc += t;
            if t < 1e-4 * acc || n > n0 + 400 {
                return acc * 2.0; // geometric slack for the remainder
            }
            n += 2;
        }
    };
    let mut n = 2i64;
    while n <= n_max {
        let tail = tail_from(n + 2);
        if tail <= eps {
            return Ok((n, tail));
        }
        n += 2;
    }
    Err(Error::NonConvergent {
        required: n as f64,
        cap: n_max as f64,
    })
}

fn theta_genus1<R: Real>(
    lat: &EvenLattice,
    zz: &SiegelPoint<R>,
    eps: R,
) -> Result<SiegelThetaValue<R>> {
    let lambda = crate::scalar::tof(zz.im_min_eigenvalue());
    let epsf = crate::scalar::tof(eps);
    let (cap, tail) = genus1_cap(lat.rank(), lambda, epsf, 64)?;
    let counts = lat.norm_counts(cap)?;
    let z11 = zz.entry(0, 0);
    let mut value = Complex::new(R::zero(), R::zero());
    for (&n, &c) in &counts {
        let e = cexp(Cx::new(R::zero(), R::pi()) * z11 * rof::<R>(n as f64));
        value += e * rof::<R>(c as f64);
    }
    Ok(SiegelThetaValue {
        value,
        tail_bound: rof(tail),
        norm_cap: cap,
    })
}

/// Genus-2 truncation cap from eps and lambda_min using pair-count bounds.
fn genus2_cap(rank: usize, lambda: f64, eps: f64, t_max: i64) -> Result<(i64, f64)> {
    let pair_bound = |t: i64| -> f64 {
        let mut acc = 0.0;
        let mut a = 0i64;
        while a <= t {
            acc += shell_count_bound(rank, a) * shell_count_bound(rank, t - a);
            a += 2;
        }
        acc
    };
    let term = |t: i64| pair_bound(t) * (-std::f64::consts::PI * lambda * t as f64).exp();
    let tail_from = |t0: i64| -> f64 {
        let mut acc = 0.0;
        let mut t = t0;
        loop {
            let v = term(t);
            acc += v;
            if v < 1e-4 * acc || t > t0 + 200 {
                return acc * 2.0;
            }
            t += 2;
        }
    };
    let mut t = 2i64;
    while t <= t_max {
        let tail = tail_from(t + 2);
        if tail <= eps {
            return Ok((t, tail));
        }
        t += 2;
    }
    Err(Error::NonConvergent {
        required: t as f64,
        cap: t_max as f64,
    })
}

/// Dot product of ambient doubled coordinates, divided by 4 (exact for
/// integral lattices).
#[inline]
fn dot_amb2(a: &[i32], b: &[i32]) -> i64 {
    let mut acc: i64 = 0;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += (*x as i64) * (*y as i64);
    }
    debug_assert!(acc % 4 == 0);
    acc / 4
}

/// Canonical (one per +-pair) shell vectors in ambient doubled coordinates,
/// flattened with stride = rank.
fn shell_ambient(lat: &EvenLattice, norm: i64) -> Result<Vec<i32>> {
    let mut flat = Vec::new();
    lat.visit_canonical(norm, &mut |c, n| {
        if n == norm {
            let amb = lat.ambient2(c);
            flat.extend(amb.iter().map(|&v| v as i32));
        }
    })?;
    Ok(flat)
}

fn theta_genus2<R: Real>(
    lat: &EvenLattice,
    zz: &SiegelPoint<R>,
    eps: R,
) -> Result<SiegelThetaValue<R>> {
    let rank = lat.rank();
    let lambda = crate::scalar::tof(zz.im_min_eigenvalue());
    let epsf = crate::scalar::tof(eps);
    let (cap, tail) = genus2_cap(rank, lambda, epsf, 10)?;
    let counts = lat.norm_counts(cap)?;

    let z11 = zz.entry(0, 0);
    let z12 = zz.entry(0, 1);
    let z22 = zz.entry(1, 1);
    let pi_i = Cx::new(R::zero(), R::pi());
    let e_of = |n1: i64, n2: i64, h: i64| -> Cx<R> {
        cexp(
            pi_i * (z11 * rof::<R>(n1 as f64)
                + z12 * rof::<R>(2.0 * h as f64)
                + z22 * rof::<R>(n2 as f64)),
        )
    };

    // terms with v1 = 0 or v2 = 0
    let mut value = Complex::new(R::one(), R::zero()); // (0, 0)
    for (&n, &c) in counts.iter() {
        if n == 0 || n > cap {
            continue;
        }
        let w = rof::<R>(c as f64);
        value += e_of(0, n, 0) * w;
        value += e_of(n, 0, 0) * w;
    }

    // pair classes over nonzero shells: classes[(n1, n2, |h|)] counts ordered
    // pairs of signed vectors; exact integers, so the parallel merge is
    // deterministic.
    let mut shells: BTreeMap<i64, Vec<i32>> = BTreeMap::new();
    let mut n = 2i64;
    while n + 2 <= cap {
        let sh = shell_ambient(lat, n)?;
        if !sh.is_empty() {
            shells.insert(n, sh);
        }
        n += 2;
    }
    let shell_norms: Vec<i64> = shells.keys().copied().collect();
    let mut classes: BTreeMap<(i64, i64, i64), i64> = BTreeMap::new();
    for (ai, &na) in shell_norms.iter().enumerate() {
        for &nb in shell_norms.iter().skip(ai) {
            if na + nb > cap {
                break;
            }
            let sa = &shells[&na];
            let sb = &shells[&nb];
            let rows_a = sa.len() / rank;
            let partial: Vec<BTreeMap<i64, i64>> = (0..rows_a)
                .into_par_iter()
                .map(|ia| {
                    let va = &sa[ia * rank..(ia + 1) * rank];
                    let mut local: BTreeMap<i64, i64> = BTreeMap::new();
                    for vb in sb.chunks_exact(rank) {
                        let h = dot_amb2(va, vb).abs();
                        // 4 sign combinations: 2 with +h, 2 with -h
                        *local.entry(h).or_insert(0) += 4;
                    }
                    local
                })
                .collect();
            for local in partial {
                for (h, c) in local {
                    *classes.entry((na, nb, h)).or_insert(0) += c;
                }
            }
        }
    }
    for (&(n1, n2, h), &c4) in &classes {
        // the c4 ordered sign-pairs split evenly between +h and -h
        let half = rof::<R>(c4 as f64 * 0.5);
        let mut contrib = (e_of(n1, n2, h) + e_of(n1, n2, -h)) * half;
        if n1 != n2 {
            contrib += (e_of(n2, n1, h) + e_of(n2, n1, -h)) * half;
        }
        value += contrib;
    }

    Ok(SiegelThetaValue {
        value,
        tail_bound: rof(tail),
        norm_cap: cap,
    })
}

/// Genus 3 behind the override flag: direct sum over signed shell triples,
/// total norm capped at 6 (practical only for Im Z well above one).
fn theta_genus3<R: Real>(
    lat: &EvenLattice,
    zz: &SiegelPoint<R>,
    eps: R,
) -> Result<SiegelThetaValue<R>> {
    let rank = lat.rank();
    let lambda = crate::scalar::tof(zz.im_min_eigenvalue());
    let epsf = crate::scalar::tof(eps);
    let cap = 6i64;
    let crude_tail = {
        let t = cap + 2;
        let mut acc = 0.0;
        let mut a = 0i64;
        while a <= t {
            let mut b = 0i64;
            while a + b <= t {
                acc += shell_count_bound(rank, a)
                    * shell_count_bound(rank, b)
                    * shell_count_bound(rank, t - a - b);
                b += 2;
            }
            a += 2;
        }
        2.0 * acc * (-std::f64::consts::PI * lambda * t as f64).exp()
    };
    if crude_tail > epsf {
        return Err(Error::NonConvergent {
            required: (cap + 2) as f64,
            cap: cap as f64,
        });
    }
    let zm = zz.to_matrix();
    let pi_i = Cx::new(R::zero(), R::pi());

    let mut reps: Vec<(Vec<i32>, i64)> = vec![(vec![0i32; rank], 0)];
    let mut n = 2i64;
    while n <= cap {
        for v in shell_ambient(lat, n)?.chunks_exact(rank) {
            reps.push((v.to_vec(), n));
            reps.push((v.iter().map(|&x| -x).collect(), n));
        }
        n += 2;
    }
    let mut value = Complex::new(R::zero(), R::zero());
    for (v1, n1) in &reps {
        for (v2, n2) in &reps {
            if n1 + n2 > cap {
                continue;
            }
            let h12 = dot_amb2(v1, v2);
            for (v3, n3) in &reps {
                if n1 + n2 + n3 > cap {
                    continue;
                }
                let h13 = dot_amb2(v1, v3);
                let h23 = dot_amb2(v2, v3);
                let s = zm[(0, 0)] * rof::<R>(*n1 as f64)
                    + zm[(1, 1)] * rof::<R>(*n2 as f64)
                    + zm[(2, 2)] * rof::<R>(*n3 as f64)
                    + zm[(0, 1)] * rof::<R>(2.0 * h12 as f64)
                    + zm[(0, 2)] * rof::<R>(2.0 * h13 as f64)
                    + zm[(1, 2)] * rof::<R>(2.0 * h23 as f64);
                value += cexp(pi_i * s);
            }
        }
    }
    Ok(SiegelThetaValue {
        value,
        tail_bound: rof(crude_tail),
        norm_cap: cap,
    })
}

/// Report for the difference identity
/// F_g(Z) = 2^{2g} ( Theta_{D16+}(Z) - Theta_{E8}(Z)^2 ).
#[derive(Clone, Debug)]
pub struct DifferenceReport<R: Real> {
    pub f_value: Cx<R>,
    pub f_scale: R,
    pub lattice_side: Cx<R>,
    pub residual: R,
    pub theta_d16: SiegelThetaValue<R>,
    pub theta_e8: SiegelThetaValue<R>,
}

/// Evaluate both sides of the difference identity at Z (genus 1 or 2).
pub fn verify_difference<R: Real>(zz: &SiegelPoint<R>, eps: R) -> Result<DifferenceReport<R>> {
    let g = zz.genus();
    let f = schottky_igusa(zz, eps)?;
    let d16 = siegel_theta(&EvenLattice::d16_plus(), zz, eps, false)?;
    let e8 = siegel_theta(&EvenLattice::e8(), zz, eps, false)?;
    let two_2g = rof::<R>((1u64 << (2 * g)) as f64);
    let lattice_side = (d16.value - e8.value * e8.value) * two_2g;
    let residual = cabs(f.value - lattice_side) / f.scale;
    Ok(DifferenceReport {
        f_value: f.value,
        f_scale: f.scale,
        lattice_side,
        residual,
        theta_d16: d16,
        theta_e8: e8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    fn diag_point(entries: &[(f64, f64)]) -> SiegelPoint<f64> {
        let g = entries.len();
        SiegelPoint::from_sym(SymMatrix::from_upper_fn(g, |i, j| {
            if i == j {
                Complex::new(entries[i].0, entries[i].1)
            } else {
                Complex::new(0.0, 0.0)
            }
        }))
        .unwrap()
    }

    #[test]
    fn builtin_invariants_hold() {
        // constructors run the full even/unimodular validation
        assert_eq!(EvenLattice::e8().rank(), 8);
        assert_eq!(EvenLattice::e8_e8().rank(), 16);
        assert_eq!(EvenLattice::d16_plus().rank(), 16);
    }

    #[test]
    fn enumeration_counts_match_known_values() {
        let e8 = EvenLattice::e8();
        let c = e8.enumerate_vectors(8).unwrap();
        assert_eq!(c[&0], 1);
        assert_eq!(c[&2], 240);
        assert_eq!(c[&4], 2160);
        assert_eq!(c[&6], 6720);
        assert_eq!(c[&8], 17520);
        let d16 = EvenLattice::d16_plus();
        let c = d16.enumerate_vectors(4).unwrap();
        assert_eq!(c[&2], 480);
        assert_eq!(c[&4], 61920);
        let ee = EvenLattice::e8_e8();
        let c = ee.enumerate_vectors(4).unwrap();
        assert_eq!(c[&0], 1);
        assert_eq!(c[&2], 480);
        assert_eq!(c[&4], 61920);
    }

    #[test]
    fn series_counts_agree_with_enumeration() {
        for lat in [
            EvenLattice::e8(),
            EvenLattice::d16_plus(),
            EvenLattice::e8_e8(),
        ] {
            let a = lat.norm_counts(6).unwrap();
            let b = lat.enumerate_vectors(6).unwrap();
            assert_eq!(a, b, "rank {}", lat.rank());
        }
    }

    #[test]
    fn counts_are_even_for_positive_norms() {
        let c = EvenLattice::e8().enumerate_vectors(10).unwrap();
        for (&n, &cnt) in &c {
            if n > 0 {
                assert_eq!(cnt % 2, 0);
            }
        }
    }

    #[test]
    fn genus1_value_at_2i() {
        let zz = diag_point(&[(0.0, 2.0)]);
        let t = siegel_theta(&EvenLattice::e8_e8(), &zz, 1e-12, false).unwrap();
        // shell-sum oracle from enumerated counts
        let counts = EvenLattice::e8_e8()
            .enumerate_vectors(t.norm_cap.min(8))
            .unwrap();
        let mut oracle = 0.0f64;
        for (&n, &c) in &counts {
            oracle += c as f64 * (-2.0 * std::f64::consts::PI * n as f64).exp();
        }
        assert!((t.value.re - oracle).abs() < 1e-10);
        assert!((t.value.re - 1.0016745).abs() < 1e-6);
        assert!(t.value.im.abs() < 1e-14);
    }

    #[test]
    fn genus1_direct_sum_factorizes() {
        let zz = diag_point(&[(0.3, 1.3)]);
        let ee = siegel_theta(&EvenLattice::e8_e8(), &zz, 1e-13, false).unwrap();
        let e8 = siegel_theta(&EvenLattice::e8(), &zz, 1e-13, false).unwrap();
        let sq = e8.value * e8.value;
        assert!((ee.value - sq).norm() / sq.norm() < 1e-12);
    }

    #[test]
    fn genus3_gated_without_override() {
        let zz = diag_point(&[(0.0, 2.0), (0.0, 2.0), (0.0, 2.0)]);
        match siegel_theta(&EvenLattice::e8(), &zz, 1e-8, false) {
            Err(Error::CostCapExceeded { genus: 3 }) => {}
            other => panic!("expected cost cap, got {other:?}"),
        }
    }

    #[test]
    fn difference_identity_genus1_at_2i() {
        let zz = diag_point(&[(0.0, 2.0)]);
        let rep = verify_difference(&zz, 1e-12).unwrap();
        assert!(rep.residual < 1e-10, "residual {:e}", rep.residual);
    }
}
