//! Exact change of basis between the kernels g⁽ᵏ⁾ and the convolution
//! powers Z^{⊛k}, and the closed forms built on it.
//!
//! Z^{⊛n} = Σₖ c[n][k]·g⁽ᵏ⁾ and g⁽ⁿ⁾ = Σₖ C[n][k]·Z^{⊛k}, with g⁽⁰⁾ = Z^{⊛0} = 1.
//! Entry (n, k) carries the factor (ΔZ)^{n−k}.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinatorics::{
    bernoulli_number, bernoulli_poly_difference, binomial, factorial, stirling_first, stirling_second, GradedRational,
};
use crate::convolution::PeriodicFunction;
use crate::error::{Error, Result};
use crate::quadrature::cauchy_derivative;
use crate::scalar::{delta_z, Real};
use crate::weierstrass::Weierstrass;

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

fn sign(e: usize) -> BigRational {
    if e.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

fn check_range(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::OutOfRange(format!("coefficient index (n, k) = ({n}, {k}) needs 1 ≤ k ≤ n")));
    }
    Ok(())
}

/// c[n][k] = (−1)^{n−1}(ΔZ)^{n−k}(k−1)!/(n−1)!·s(n,k), 1 ≤ k ≤ n.
pub fn coeff_c(n: usize, k: usize) -> Result<GradedRational> {
    check_range(n, k)?;
    let f = rat(factorial(k as u64 - 1)) / rat(factorial(n as u64 - 1));
    Ok(GradedRational::new(sign(n - 1) * f * stirling_first(n, k)?, (n - k) as u32))
}

/// Constant term c[n][0]; c[0][0] = 1.
pub fn coeff_c0(n: usize) -> GradedRational {
    if n == 0 {
        return GradedRational::one();
    }
    let mut sum = BigRational::zero();
    for m in 1..=n + 1 {
        sum += stirling_first(n + 1, m).expect("in range") / rat(BigInt::from(m));
    }
    let half_pow = BigRational::new(BigInt::one(), BigInt::one() << n);
    let c = half_pow + sign(n + 1) / rat(factorial(n as u64)) * sum;
    GradedRational::new(c, n as u32)
}

/// c[n][0] from the recursion c[n][0] = (ΔZ/2)ⁿ − Σ_{k=1}^{n+1} c[n+1][k](ΔZ)^{k−1}/k!.
pub fn coeff_c0_recursive(n: usize) -> GradedRational {
    if n == 0 {
        return GradedRational::one();
    }
    let mut c = BigRational::new(BigInt::one(), BigInt::one() << n);
    for k in 1..=n + 1 {
        let entry = coeff_c(n + 1, k).expect("in range");
        c -= entry.coeff / rat(factorial(k as u64));
    }
    GradedRational::new(c, n as u32)
}

/// C[n][k] = (−1)^{k−1}(ΔZ)^{n−k}(k−1)!/(n−1)!·S(n,k), 1 ≤ k ≤ n.
#[allow(non_snake_case)]
pub fn coeff_C(n: usize, k: usize) -> Result<GradedRational> {
    check_range(n, k)?;
    let f = rat(factorial(k as u64 - 1)) / rat(factorial(n as u64 - 1));
    Ok(GradedRational::new(sign(k - 1) * f * stirling_second(n, k)?, (n - k) as u32))
}

/// C[n][k] through the closed sum
/// (−1)^{k−1}/(n−1)!·Σ_{t=0}^{k−1}(−1)^t(k−t)^{n−1}binom(k−1,t).
#[allow(non_snake_case)]
pub fn coeff_C_closed_sum(n: usize, k: usize) -> Result<GradedRational> {
    check_range(n, k)?;
    let mut sum = BigInt::zero();
    for t in 0..k {
        let term = BigInt::from(k - t).pow(n as u32 - 1) * binomial(k as u64 - 1, t as u64);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let c = sign(k - 1) * rat(sum) / rat(factorial(n as u64 - 1));
    Ok(GradedRational::new(c, (n - k) as u32))
}

/// Constant term C[n][0] = (ΔZ)ⁿ/n!·2Bₙ(1 − 2^{n−1}); C[0][0] = 1.
#[allow(non_snake_case)]
pub fn coeff_C0(n: usize) -> GradedRational {
    if n == 0 {
        return GradedRational::one();
    }
    let two_pow = rat(BigInt::one() << (n - 1));
    let c = bernoulli_number(n) * rat(BigInt::from(2)) * (BigRational::one() - two_pow) / rat(factorial(n as u64));
    GradedRational::new(c, n as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Z^{⊛n} in terms of g⁽ᵏ⁾.
    ZconvToKernel,
    /// g⁽ⁿ⁾ in terms of Z^{⊛k}.
    KernelToZconv,
}

/// Lower-triangular matrix of graded entries (n, k), 0 ≤ k ≤ n ≤ n_max,
/// including the constant column k = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix {
    pub kind: MatrixKind,
    pub n_max: usize,
    rows: Vec<Vec<GradedRational>>,
}

impl CoeffMatrix {
    pub fn build(kind: MatrixKind, n_max: usize) -> Self {
        let rows = (0..=n_max)
            .map(|n| {
                (0..=n)
                    .map(|k| match (kind, k) {
                        (MatrixKind::ZconvToKernel, 0) => coeff_c0(n),
                        (MatrixKind::KernelToZconv, 0) => coeff_C0(n),
                        (MatrixKind::ZconvToKernel, _) => coeff_c(n, k).expect("in range"),
                        (MatrixKind::KernelToZconv, _) => coeff_C(n, k).expect("in range"),
                    })
                    .collect()
            })
            .collect();
        Self { kind, n_max, rows }
    }

    /// Entry (n, k); zero above the diagonal.
    pub fn entry(&self, n: usize, k: usize) -> GradedRational {
        if k > n {
            return GradedRational::zero(0);
        }
        self.rows[n][k].clone()
    }

    pub fn row(&self, n: usize) -> &[GradedRational] {
        &self.rows[n]
    }

    /// Rows realized numerically with ΔZ = −2πi.
    pub fn to_complex<T: Real>(&self) -> Vec<Vec<Complex<T>>> {
        self.rows.iter().map(|r| r.iter().map(GradedRational::to_complex).collect()).collect()
    }
}

/// Verdict of composing the two transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseCheck {
    pub n_max: usize,
    /// First entry (row, column, value) of either product that differs from
    /// the identity.
    pub first_failure: Option<(usize, usize, GradedRational)>,
}

impl InverseCheck {
    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Exact check that c·C and C·c are both the identity on 0..=n_max.
pub fn matrix_inverse_check(n_max: usize) -> Result<InverseCheck> {
    let c = CoeffMatrix::build(MatrixKind::ZconvToKernel, n_max);
    let big_c = CoeffMatrix::build(MatrixKind::KernelToZconv, n_max);
    for (a, b) in [(&c, &big_c), (&big_c, &c)] {
        for n in 0..=n_max {
            for j in 0..=n {
                let mut acc = GradedRational::zero((n - j) as u32);
                for k in j..=n {
                    acc = acc.checked_add(&(&a.entry(n, k) * &b.entry(k, j)))?;
                }
                let expect = if n == j { GradedRational::one() } else { GradedRational::zero((n - j) as u32) };
                if acc.coeff != expect.coeff {
                    return Ok(InverseCheck { n_max, first_failure: Some((n, j, acc)) });
                }
            }
        }
    }
    Ok(InverseCheck { n_max, first_failure: None })
}

/// (−ΔZ)^{n−1}·∏_{k=1}^{n−1}(m−k)/(n−1)!, the residue of Z^{⊛n} at mτ.
#[allow(non_snake_case)]
pub fn residue_poly_V_exact(n: usize, m: i64) -> GradedRational {
    assert!(n >= 1, "residue polynomial needs n ≥ 1");
    let prod = (1..n as i64).fold(BigInt::one(), |acc, k| acc * BigInt::from(m - k));
    // (−ΔZ)^{n−1} = (−1)^{n−1}(ΔZ)^{n−1}
    GradedRational::new(sign(n - 1) * rat(prod) / rat(factorial(n as u64 - 1)), (n - 1) as u32)
}

#[allow(non_snake_case)]
pub fn residue_poly_V<T: Real>(n: usize, m: i64) -> Complex<T> {
    residue_poly_V_exact(n, m).to_complex()
}

/// Residue of g⁽ⁿ⁾ at mτ: mⁿ⁻¹(ΔZ)ⁿ⁻¹/(n−1)!, with 0⁰ = 1.
pub fn kernel_residue_exact(n: usize, m: i64) -> GradedRational {
    assert!(n >= 1, "kernel residue needs n ≥ 1");
    let p = BigInt::from(m).pow(n as u32 - 1);
    GradedRational::new(rat(p) / rat(factorial(n as u64 - 1)), (n - 1) as u32)
}

/// Closed-form evaluation of Z^{⊛n}, ℘^{⊛n}, Aₙ and the kernel
/// reconstruction, valid everywhere off Λ.
#[derive(Debug, Clone)]
pub struct BasisChange<T: Real> {
    wei: Arc<Weierstrass<T>>,
    c_rows: Vec<Vec<Complex<T>>>,
    big_c_rows: Vec<Vec<Complex<T>>>,
}

impl<T: Real> BasisChange<T> {
    /// Tables up to the configured kernel order.
    pub fn new(wei: Arc<Weierstrass<T>>) -> Self {
        let n_max = wei.params().kernel_max();
        Self {
            c_rows: CoeffMatrix::build(MatrixKind::ZconvToKernel, n_max).to_complex(),
            big_c_rows: CoeffMatrix::build(MatrixKind::KernelToZconv, n_max).to_complex(),
            wei,
        }
    }

    pub fn weierstrass(&self) -> &Arc<Weierstrass<T>> {
        &self.wei
    }

    pub fn n_max(&self) -> usize {
        self.c_rows.len() - 1
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            return Err(Error::OutOfRange(format!("order {n} exceeds table size {}", self.n_max())));
        }
        Ok(())
    }

    /// Z^{⊛n}(x) = Σₖ c[n][k] g⁽ᵏ⁾(x).
    pub fn z_conv_pow(&self, n: usize, x: Complex<T>) -> Result<Complex<T>> {
        self.check_order(n)?;
        if n == 0 {
            return Ok(Complex::new(T::one(), T::zero()));
        }
        let g = self.wei.theta().g_kernels(x, n)?;
        Ok(self.c_rows[n].iter().zip(&g).fold(Complex::new(T::zero(), T::zero()), |a, (c, g)| a + c * g))
    }

    /// g⁽ⁿ⁾(x) = Σₖ C[n][k] Z^{⊛k}(x).
    pub fn g_from_zconv(&self, n: usize, x: Complex<T>) -> Result<Complex<T>> {
        self.check_order(n)?;
        let mut acc = Complex::new(T::zero(), T::zero());
        for (k, c) in self.big_c_rows[n].iter().enumerate() {
            acc = acc + c * self.z_conv_pow(k, x)?;
        }
        Ok(acc)
    }

    /// ℘^{⊛n}(x) = (−1)ⁿ dⁿ/dxⁿ Z^{⊛n}(x) + (−1)ⁿe₂ⁿ.
    pub fn wp_conv_pow(&self, n: usize, x: Complex<T>) -> Result<Complex<T>> {
        self.check_order(n)?;
        if n == 0 {
            return Err(Error::OutOfRange("℘ convolution power needs n ≥ 1".into()));
        }
        let params = self.wei.params();
        params.check_off_lattice(x)?;
        let radius = params.lattice_distance(x) * T::lit(0.5);
        let d = cauchy_derivative(x, n as u32, radius, params.derivative_nodes(), |z| self.z_conv_pow(n, z))?;
        let e2n = self.wei.e2().powu(n as u32);
        let s = if n.is_multiple_of(2) { T::one() } else { -T::one() };
        Ok((d + e2n) * s)
    }

    /// Aₙ(x) = (ΔZ)ⁿBₙ(Z(x)/ΔZ).
    pub fn a_fn(&self, n: usize, x: Complex<T>) -> Result<Complex<T>> {
        let dz = delta_z::<T>();
        let z = self.wei.zeta_e(x)?;
        Ok(dz.powu(n as u32) * bernoulli_poly_difference(n).eval(&(z / dz)))
    }

    /// Z^{⊛n} as a closed-form periodic function with simple poles on Λ.
    pub fn z_conv_pow_function(self: &Arc<Self>, n: usize) -> PeriodicFunction<T> {
        let me = Arc::clone(self);
        let order = u32::from(n > 0);
        PeriodicFunction::closed_form_on_lattice(
            format!("Z^{n}"),
            Arc::new(move |x| me.z_conv_pow(n, x)),
            self.wei.params().tau().im,
            order,
        )
    }

    /// ℘^{⊛n} as a closed-form periodic function; pole order at most n + 1.
    pub fn wp_conv_pow_function(self: &Arc<Self>, n: usize) -> PeriodicFunction<T> {
        let me = Arc::clone(self);
        PeriodicFunction::closed_form_on_lattice(
            format!("wp^{n}"),
            Arc::new(move |x| me.wp_conv_pow(n, x)),
            self.wei.params().tau().im,
            n as u32 + 1,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::ratio;
    use crate::convolution::Convolver;
    use crate::quadrature::period_mean;
    use crate::torus::TorusParams;
    use crate::weierstrass::LaurentOptions;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(c: (i64, i64), p: u32) -> GradedRational {
        GradedRational::new(ratio(c.0, c.1), p)
    }

    fn basis() -> Arc<BasisChange<f64>> {
        Arc::new(BasisChange::new(Arc::new(Weierstrass::new(TorusParams::square()).unwrap())))
    }

    fn points(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(lo..hi))).collect()
    }

    #[test]
    fn listed_c_values() {
        assert_eq!(coeff_c(4, 2).unwrap(), g((-11, 6), 2));
        assert_eq!(coeff_c(5, 3).unwrap(), g((35, 12), 2));
        for n in 1..10 {
            assert_eq!(coeff_c(n, n).unwrap(), GradedRational::new(sign(n - 1), 0));
        }
        assert_eq!(coeff_c0(1), g((0, 1), 1));
        assert_eq!(coeff_c0(2), g((-1, 6), 2));
        assert_eq!(coeff_c0(4), g((-103, 360), 4));
        assert_eq!(coeff_c0(5), g((-43, 144), 5));
        assert!(coeff_c(3, 4).is_err());
        assert!(coeff_c(0, 0).is_err());
    }

    #[test]
    fn c0_two_routes_agree() {
        for n in 0..=15 {
            assert_eq!(coeff_c0(n), coeff_c0_recursive(n), "n = {n}");
        }
    }

    #[test]
    fn listed_big_c_values() {
        assert_eq!(coeff_C(4, 2).unwrap(), g((-7, 6), 2));
        assert_eq!(coeff_C(5, 2).unwrap(), g((-5, 8), 3));
        assert_eq!(coeff_C0(4), g((7, 360), 4));
        assert!(coeff_C0(3).is_zero());
        assert!(coeff_C0(5).is_zero());
        for n in 1..=14 {
            for k in 1..=n {
                assert_eq!(coeff_C(n, k).unwrap(), coeff_C_closed_sum(n, k).unwrap(), "({n}, {k})");
            }
        }
    }

    #[test]
    fn transforms_are_inverse() {
        assert!(matrix_inverse_check(2).unwrap().holds());
        assert!(matrix_inverse_check(12).unwrap().holds());
    }

    #[test]
    fn grading_and_shape() {
        let m = CoeffMatrix::build(MatrixKind::KernelToZconv, 6);
        for n in 0..=6 {
            for k in 0..=n {
                let e = m.entry(n, k);
                assert!(e.is_zero() || e.dz_power == (n - k) as u32);
            }
            assert!(m.entry(n, n + 1).is_zero());
        }
    }

    #[test]
    fn residue_polynomial_values() {
        for m in -3..6 {
            assert_eq!(residue_poly_V_exact(1, m), GradedRational::one());
        }
        assert!(residue_poly_V_exact(2, 1).is_zero());
        let v: Complex64 = residue_poly_V(3, 3);
        let two_pi_i = Complex64::new(0.0, std::f64::consts::TAU);
        assert!((v - two_pi_i * two_pi_i).norm() < 1e-12);
        assert_eq!(kernel_residue_exact(3, 0), GradedRational::zero(2));
        assert_eq!(kernel_residue_exact(1, 0), GradedRational::one());
    }

    #[test]
    fn zconv_one_is_z() {
        let b = basis();
        for x in points(5, 5, -0.9, 0.9) {
            let v = b.z_conv_pow(1, x).unwrap();
            assert!((v - b.weierstrass().zeta_e(x).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn zconv_two_matches_numeric_convolution() {
        let b = basis();
        let cv = Convolver::from_weierstrass(Arc::clone(b.weierstrass()));
        let z = cv.z();
        for x in points(6, 6, 0.15, 1.85) {
            let closed = b.z_conv_pow(2, x).unwrap();
            let numeric = cv.conv_plus(&z, &z, x).unwrap();
            assert!((closed - numeric).norm() < 1e-8, "{x}");
        }
    }

    #[test]
    fn zconv_residues_and_simple_poles() {
        let b = basis();
        for n in 1..=5 {
            for m in 0..=6i64 {
                let center = Complex64::new(0.0, m as f64);
                let opts = LaurentOptions { max_order: 2, regular_terms: 0, ..Default::default() };
                let l = b.weierstrass().laurent(|x| b.z_conv_pow(n, x), center, opts).unwrap();
                let expect: Complex64 = residue_poly_V(n, m);
                let err = (l.residue() - expect).norm();
                assert!(err <= 1e-7 * expect.norm().max(1.0), "n = {n}, m = {m}: {} vs {expect}", l.residue());
                assert!(l.singular_coeff(2).norm() < 1e-8, "n = {n}, m = {m}");
            }
        }
    }

    #[test]
    fn kernel_reconstruction() {
        let b = basis();
        let th = b.weierstrass().theta().clone();
        for x in points(7, 5, -0.8, 0.8) {
            for n in 0..=6 {
                let v = b.g_from_zconv(n, x).unwrap();
                let direct = th.g_kernel(n, x).unwrap();
                assert!((v - direct).norm() < 1e-8 * direct.norm().max(1.0), "n = {n}, x = {x}");
            }
        }
    }

    #[test]
    fn difference_recursion_and_collapse() {
        let b = basis();
        let dz = delta_z::<f64>();
        let tau = Complex64::new(0.0, 1.0);
        for x in points(8, 4, -0.4, 0.4) {
            for n in 1..=5usize {
                let lhs = b.z_conv_pow(n + 1, x + tau).unwrap() - b.z_conv_pow(n + 1, x).unwrap();
                let rhs = dz * ((dz / 2.0).powi(n as i32) - b.z_conv_pow(n, x).unwrap());
                assert!((lhs - rhs).norm() < 1e-7 * rhs.norm().max(1.0), "n = {n}");
            }
        }
        // Δ^{n−1} Z^{⊛n} − (−ΔZ)^{n−1} Z is constant
        let n = 4usize;
        let collapse = |x: Complex64| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let sgn = if (n - 1 - j).is_multiple_of(2) { 1.0 } else { -1.0 };
                let binom = (0..j).fold(1.0, |a, i| a * (n - 1 - i) as f64 / (i + 1) as f64);
                acc += b.z_conv_pow(n, x + tau * j as f64).unwrap() * sgn * binom;
            }
            acc - (-dz).powi(n as i32 - 1) * b.weierstrass().zeta_e(x).unwrap()
        };
        let ref_value = collapse(Complex64::new(0.3, 0.2));
        for x in points(9, 4, -0.4, 0.4) {
            assert!((collapse(x) - ref_value).norm() < 1e-7 * ref_value.norm().max(1.0));
        }
    }

    #[test]
    fn strip_integrals() {
        let b = basis();
        let dz = delta_z::<f64>();
        for n in 1..=5 {
            let v = period_mean(256, 0.0, 0.3, |x| b.z_conv_pow(n, x)).unwrap();
            assert!((v - (dz / 2.0).powi(n as i32)).norm() < 1e-8, "n = {n}");
        }
        for l in 2..=8usize {
            let v = period_mean(256, 0.5 / 256.0, 0.0, |x| b.weierstrass().theta().g_kernel(l, x)).unwrap();
            let expect = dz.powi(l as i32) * crate::scalar::rational_to_f64(&bernoulli_number(l))
                / crate::scalar::rational_to_f64(&rat(factorial(l as u64)));
            assert!((v - expect).norm() < 1e-9, "l = {l}: {v} vs {expect}");
        }
    }

    #[test]
    fn a_functions() {
        let b = basis();
        let dz = delta_z::<f64>();
        let tau = Complex64::new(0.0, 1.0);
        let x0 = Complex64::new(0.3, 0.1);
        assert!((b.a_fn(0, x0).unwrap() - 1.0).norm() < 1e-14);
        assert!((b.a_fn(1, x0).unwrap() - b.weierstrass().zeta_e(x0).unwrap()).norm() < 1e-14);
        for x in points(10, 20, -0.5, 0.5) {
            for n in 0..=4usize {
                let lhs = b.a_fn(n + 1, x + tau).unwrap() - b.a_fn(n + 1, x).unwrap();
                let z = b.weierstrass().zeta_e(x).unwrap();
                let rhs = dz * z.powi(n as i32);
                assert!((lhs - rhs).norm() < 1e-7 * rhs.norm().max(1.0), "n = {n}");
            }
        }
        // leading terms near a pole, where |Z| is large
        let x = Complex64::new(1e-4, 1e-4);
        let z = b.weierstrass().zeta_e(x).unwrap();
        for n in 1..=4usize {
            let rest = b.a_fn(n + 1, x).unwrap() - z.powi(n as i32 + 1) / (n as f64 + 1.0) + dz * z.powi(n as i32) * 0.5;
            assert!(rest.norm() < 10.0 * z.norm().powi(n as i32 - 1) * dz.norm().powi(2));
            assert!(rest.norm() < 1e-2 * z.norm().powi(n as i32) * dz.norm());
        }
    }

    #[test]
    fn wp_convolution_powers() {
        let b = basis();
        let w = Arc::clone(b.weierstrass());
        for x in points(11, 3, -0.8, 0.8) {
            assert!((b.wp_conv_pow(1, x).unwrap() - w.wp(x).unwrap()).norm() < 1e-8);
        }
        let cv = Convolver::from_weierstrass(Arc::clone(&w));
        let wp = cv.wp();
        for x in points(12, 4, 0.2, 1.8) {
            let closed = b.wp_conv_pow(2, x).unwrap();
            let numeric = cv.conv_plus(&wp, &wp, x).unwrap();
            assert!((closed - numeric).norm() < 1e-6, "{x}: {closed} vs {numeric}");
        }
        let f = b.wp_conv_pow_function(2);
        assert_eq!(f.pole_ledger()[0].max_order, 3);
    }
}
