//! Eisenstein's zeta Z(x) = ζ(x) − e₂x, Weierstrass ℘ and ℘′, the
//! Eisenstein series e₂, e₄, e₆, and numerical Laurent extraction.
//!
//! Z is the logarithmic derivative of θ. Its quasi-periodicity
//! Z(x + n + mτ) = Z(x) − 2πim is applied exactly while reducing x.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature::circle_offsets;
use crate::scalar::{imag_unit, Real};
use crate::theta::ThetaEvaluator;
use crate::torus::TorusParams;

/// Sample points for the e₄/e₆ linear system, as (Re x, Im x / Im τ).
const CUBIC_SAMPLE_POINTS: [(f64, f64); 4] = [(0.31, 0.17), (0.13, 0.41), (0.42, 0.29), (0.07, 0.23)];

/// Singular part (orders ≥ 1) and leading regular coefficients of a Laurent
/// expansion around `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentData<T: Real> {
    pub center: Complex<T>,
    pub radius: T,
    /// order ℓ ↦ coefficient of (x − center)^{−ℓ}
    pub singular: BTreeMap<usize, Complex<T>>,
    /// k ↦ coefficient of (x − center)^k
    pub regular: Vec<Complex<T>>,
}

impl<T: Real> LaurentData<T> {
    /// Coefficient of (x − center)^{−1}.
    pub fn residue(&self) -> Complex<T> {
        self.singular.get(&1).copied().unwrap_or_default()
    }

    pub fn singular_coeff(&self, order: usize) -> Complex<T> {
        self.singular.get(&order).copied().unwrap_or_default()
    }
}

/// Options for [`extract_laurent`].
#[derive(Debug, Clone, Copy)]
pub struct LaurentOptions<T: Real> {
    pub max_order: usize,
    pub regular_terms: usize,
    /// Circle radius; defaults to half the distance to the nearest other pole.
    pub radius: Option<T>,
    pub nodes: usize,
    /// Relative tolerance of the node-halving check, `None` to skip it.
    pub halving_tol: Option<T>,
}

impl<T: Real> Default for LaurentOptions<T> {
    fn default() -> Self {
        Self { max_order: 2, regular_terms: 1, radius: None, nodes: 128, halving_tol: Some(T::lit(1e-6)) }
    }
}

/// Laurent coefficients c_ℓ = (1/2πi)∮ f(z)(z − c)^{ℓ−1} dz on a circle
/// around `center`, by the trapezoid rule.
///
/// With the default radius the circle has radius half the distance from
/// `center` to the nearest lattice point other than itself, which suits
/// functions whose poles lie on Λ.
pub fn extract_laurent<T, F>(params: &TorusParams<T>, f: F, center: Complex<T>, opts: LaurentOptions<T>) -> Result<LaurentData<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Result<Complex<T>>,
{
    let radius = match opts.radius {
        Some(r) => r,
        None => {
            let d = params.lattice_distance(center);
            let gap = params.min_lattice_gap();
            // center on Λ: next pole one lattice gap away; otherwise the nearest lattice point
            let nearest = if d < gap * T::lit(1e-8) { gap } else { d.min(gap - d) };
            nearest * T::lit(0.5)
        }
    };
    if !(radius > params.pole_guard() * T::lit(10.0)) || !radius.is_finite() {
        return Err(Error::RadiusCollapse(format!("radius {radius} around {center}")));
    }
    let nodes = opts.nodes.max(8) & !1;
    let offsets = circle_offsets(radius, nodes);
    let values: Vec<Complex<T>> = offsets.iter().map(|&w| f(center + w)).collect::<Result<_>>()?;

    let coeff = |power: i32, stride: usize| -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        let mut count = 0usize;
        for (w, v) in offsets.iter().zip(&values).step_by(stride) {
            acc = acc + v * w.powi(power);
            count += 1;
        }
        acc / T::from_usize_lossy(count)
    };

    let mut singular = BTreeMap::new();
    let mut regular = Vec::new();
    let scale = values.iter().fold(T::zero(), |m, v| m.max(v.norm()));
    let check = |power: i32, full: Complex<T>| -> Result<()> {
        if let Some(tol) = opts.halving_tol {
            let half = coeff(power, 2);
            let bound = scale * radius.powi(power) * tol;
            let change = (full - half).norm();
            if change > bound && change > T::epsilon() * T::lit(100.0) * scale * radius.powi(power) {
                return Err(Error::NonConvergent {
                    change: change.to_f64().unwrap_or(f64::NAN),
                    tol: bound.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    };
    for order in 1..=opts.max_order {
        let power = order as i32;
        let c = coeff(power, 1);
        check(power, c)?;
        singular.insert(order, c);
    }
    for k in 0..opts.regular_terms {
        let power = -(k as i32);
        let c = coeff(power, 1);
        check(power, c)?;
        regular.push(c);
    }
    Ok(LaurentData { center, radius, singular, regular })
}

/// Weierstrass-type functions for a fixed torus, with e₂, e₄, e₆ cached.
#[derive(Debug, Clone)]
pub struct Weierstrass<T: Real> {
    theta: ThetaEvaluator<T>,
    e2: Complex<T>,
    e4: Complex<T>,
    e6: Complex<T>,
}

impl<T: Real> Weierstrass<T> {
    pub fn new(params: TorusParams<T>) -> Result<Self> {
        Self::from_theta(ThetaEvaluator::new(params))
    }

    pub fn from_theta(theta: ThetaEvaluator<T>) -> Result<Self> {
        let mut this = Self { theta, e2: Complex::default(), e4: Complex::default(), e6: Complex::default() };
        this.e2 = this.e2_series();
        let (e4, e6) = this.solve_e4_e6()?;
        this.e4 = e4;
        this.e6 = e6;
        Ok(this)
    }

    pub fn theta(&self) -> &ThetaEvaluator<T> {
        &self.theta
    }

    pub fn params(&self) -> &TorusParams<T> {
        self.theta.params()
    }

    /// e₂ = π²/3 − 8π² Σ qⁿ/(1 − qⁿ)², i.e. minus the x¹ coefficient of Z at 0.
    fn e2_series(&self) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        let q = self.params().q();
        let mut qn = q;
        let mut sum = Complex::new(T::zero(), T::zero());
        for _ in 0..self.theta.truncation_order() * 2 {
            sum = sum + qn / ((one - qn) * (one - qn));
            qn = qn * q;
        }
        let pi2 = T::PI() * T::PI();
        one * (pi2 / T::lit(3.0)) - sum * (T::lit(8.0) * pi2)
    }

    fn solve_e4_e6(&self) -> Result<(Complex<T>, Complex<T>)> {
        let tau_im = self.params().tau().im;
        let points: Vec<Complex<T>> = CUBIC_SAMPLE_POINTS
            .iter()
            .map(|&(re, im)| Complex::new(T::lit(re), T::lit(im) * tau_im))
            .collect();
        for pair in [(0, 1), (2, 3), (0, 2), (1, 3)] {
            let (x1, x2) = (points[pair.0], points[pair.1]);
            let (p1, p2) = (self.wp(x1)?, self.wp(x2)?);
            if (p1 - p2).norm() < T::lit(1e-6) * (p1.norm() + p2.norm()) {
                continue;
            }
            // ℘′² − 4℘³ = −60 e₄ ℘ − 120 e₆
            let r = |x: Complex<T>, p: Complex<T>| -> Result<Complex<T>> {
                let d = self.wp_prime(x)?;
                Ok(d * d - p * p * p * T::lit(4.0))
            };
            let (r1, r2) = (r(x1, p1)?, r(x2, p2)?);
            let e4 = -(r1 - r2) / ((p1 - p2) * T::lit(60.0));
            let e6 = -(r1 + e4 * p1 * T::lit(60.0)) / T::lit(120.0);
            return Ok((e4, e6));
        }
        Err(Error::DegenerateSystem("all sample pairs give nearly equal ℘ values".into()))
    }

    /// e₂ = ζ(x + 1) − ζ(x).
    pub fn e2(&self) -> Complex<T> {
        self.e2
    }

    /// (e₄, e₆) normalized by ℘′² = 4(℘³ − 15e₄℘ − 30e₆).
    pub fn e4_e6(&self) -> (Complex<T>, Complex<T>) {
        (self.e4, self.e6)
    }

    /// Eisenstein's zeta function Z(x) = d/dx log θ(x).
    pub fn zeta_e(&self, x: Complex<T>) -> Result<Complex<T>> {
        self.params().check_off_lattice(x)?;
        let (x0, m) = self.params().reduce_imag(x);
        let x1 = x0 - Complex::new(x0.re.round(), T::zero());
        Ok(self.theta.log_derivative_reduced(x1) - imag_unit::<T>() * T::TAU() * T::lit(m as f64))
    }

    /// Classical Weierstrass ζ(x) = Z(x) + e₂x.
    pub fn zeta(&self, x: Complex<T>) -> Result<Complex<T>> {
        Ok(self.zeta_e(x)? + self.e2 * x)
    }

    fn reduced(&self, x: Complex<T>) -> Result<Complex<T>> {
        self.params().check_off_lattice(x)?;
        let (x0, _) = self.params().reduce_imag(x);
        Ok(x0 - Complex::new(x0.re.round(), T::zero()))
    }

    /// Z′(x) = −℘(x) − e₂.
    pub fn zeta_e_prime(&self, x: Complex<T>) -> Result<Complex<T>> {
        let x1 = self.reduced(x)?;
        Ok(self.theta.log_derivative_derivs(x1).0)
    }

    /// ℘(x) = −Z′(x) − e₂.
    pub fn wp(&self, x: Complex<T>) -> Result<Complex<T>> {
        Ok(-self.zeta_e_prime(x)? - self.e2)
    }

    /// ℘′(x) = −Z″(x).
    pub fn wp_prime(&self, x: Complex<T>) -> Result<Complex<T>> {
        let x1 = self.reduced(x)?;
        Ok(-self.theta.log_derivative_derivs(x1).1)
    }

    /// ε(℘(x), ℘′(x)) = ℘′² − 4(℘³ − 15e₄℘ − 30e₆).
    pub fn cubic_residual(&self, x: Complex<T>) -> Result<Complex<T>> {
        let p = self.wp(x)?;
        let d = self.wp_prime(x)?;
        Ok(d * d - (p * p * p - self.e4 * p * T::lit(15.0) - self.e6 * T::lit(30.0)) * T::lit(4.0))
    }

    /// Laurent data of any function around `center` (see [`extract_laurent`]).
    pub fn laurent<F>(&self, f: F, center: Complex<T>, opts: LaurentOptions<T>) -> Result<LaurentData<T>>
    where
        F: Fn(Complex<T>) -> Result<Complex<T>>,
    {
        extract_laurent(self.params(), f, center, opts)
    }

    /// e₂ recomputed from the Laurent expansion of Z at the origin.
    pub fn extract_e2(&self) -> Result<Complex<T>> {
        let opts = LaurentOptions { max_order: 1, regular_terms: 2, ..LaurentOptions::default() };
        let data = self.laurent(|x| self.zeta_e(x), Complex::default(), opts)?;
        Ok(-data.regular[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ws() -> Weierstrass<f64> {
        Weierstrass::new(TorusParams::square()).unwrap()
    }

    fn points(seed: u64, n: usize) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Complex64::new(rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95))).collect()
    }

    const TWO_PI_I: Complex64 = Complex64::new(0.0, std::f64::consts::TAU);

    #[test]
    fn zeta_e_at_half_period() {
        assert!(ws().zeta_e(Complex64::new(0.5, 0.0)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn zeta_e_quasi_periodicity_grid() {
        let w = ws();
        let tau = w.params().tau();
        for x in points(1, 20) {
            let z = w.zeta_e(x).unwrap();
            for m in -2..=2 {
                for n in -2..=2 {
                    let shifted = x + tau * m as f64 + n as f64;
                    let d = w.zeta_e(shifted).unwrap() - z + TWO_PI_I * m as f64;
                    assert!(d.norm() < 1e-9, "m={m} n={n}: {d}");
                }
            }
        }
    }

    #[test]
    fn residue_of_zeta_e_and_wp() {
        let w = ws();
        let data = w.laurent(|x| w.zeta_e(x), Complex64::default(), LaurentOptions::default()).unwrap();
        assert!((data.residue() - 1.0).norm() < 1e-10);
        let data = w.laurent(|x| w.wp(x), Complex64::default(), LaurentOptions::default()).unwrap();
        assert!((data.singular_coeff(2) - 1.0).norm() < 1e-9);
        assert!(data.residue().norm() < 1e-9);
        assert!(data.regular[0].norm() < 1e-10, "constant term {}", data.regular[0]);
    }

    #[test]
    fn e2_series_matches_laurent_extraction() {
        let w = ws();
        let extracted = w.extract_e2().unwrap();
        assert!((extracted - w.e2()).norm() < 1e-10);
        // τ = i: e₂ = π (the classical value G₂(i) = π)
        assert!((w.e2() - std::f64::consts::PI).norm() < 1e-12);
    }

    #[test]
    fn zeta_quasi_periods() {
        let w = ws();
        let tau = w.params().tau();
        for x in points(2, 10) {
            let z = w.zeta(x).unwrap();
            assert!((w.zeta(x + 1.0).unwrap() - z - w.e2()).norm() < 1e-9);
            let expected = w.e2() * tau - TWO_PI_I;
            assert!((w.zeta(x + tau).unwrap() - z - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn wp_symmetries() {
        let w = ws();
        let tau = w.params().tau();
        for x in points(3, 20) {
            let p = w.wp(x).unwrap();
            assert!((w.wp(x + 1.0).unwrap() - p).norm() < 1e-9);
            assert!((w.wp(x + tau).unwrap() - p).norm() < 1e-9);
            assert!((w.wp(-x).unwrap() - p).norm() < 1e-10 * p.norm().max(1.0));
        }
        assert!(w.wp_prime(Complex64::new(0.5, 0.0)).unwrap().norm() < 1e-9);
    }

    #[test]
    fn wp_is_minus_zeta_derivative() {
        let w = ws();
        for x in points(4, 10) {
            let h = 1e-4;
            let d = (w.zeta(x + h).unwrap() - w.zeta(x - h).unwrap()) / (2.0 * h);
            let d_cauchy = crate::quadrature::cauchy_derivative(x, 1, 0.02, 64, |z| w.zeta(z)).unwrap();
            let p = w.wp(x).unwrap();
            assert!((d_cauchy + p).norm() < 1e-8 * p.norm().max(1.0));
            assert!((d + p).norm() < 1e-6 * p.norm().max(1.0));
        }
    }

    #[test]
    fn cubic_residual_vanishes() {
        let w = ws();
        for x in points(5, 100) {
            assert!(w.cubic_residual(x).unwrap().norm() < 1e-8);
        }
        let (e4, e6) = w.e4_e6();
        assert!(e6.norm() < 1e-8, "e6 = {e6}");
        assert!(e4.norm() > 1.0);
    }

    #[test]
    fn laurent_coefficients_of_wp_against_e4_e6() {
        let w = ws();
        let opts = LaurentOptions { max_order: 2, regular_terms: 5, ..LaurentOptions::default() };
        let data = w.laurent(|x| w.wp(x), Complex64::default(), opts).unwrap();
        let (e4, e6) = w.e4_e6();
        assert!((data.regular[2] - e4 * 3.0).norm() < 1e-8 * e4.norm());
        // with the cubic normalization g₃ = 120e₆ the x⁴ coefficient is g₃/28
        assert!((data.regular[4] - e6 * (30.0 / 7.0)).norm() < 1e-8);
    }

    #[test]
    fn generic_tau() {
        let w = Weierstrass::new(TorusParams::new(Complex64::new(0.23, 0.8)).unwrap()).unwrap();
        for x in points(6, 20) {
            assert!(w.cubic_residual(x).unwrap().norm() < 1e-7 * w.wp(x).unwrap().norm().powi(3).max(1.0));
        }
        let opts = LaurentOptions { max_order: 2, regular_terms: 5, ..LaurentOptions::default() };
        let data = w.laurent(|x| w.wp(x), Complex64::default(), opts).unwrap();
        let (e4, e6) = w.e4_e6();
        assert!(e6.norm() > 1.0);
        assert!((data.regular[2] - e4 * 3.0).norm() < 1e-8 * e4.norm());
        assert!((data.regular[4] - e6 * (30.0 / 7.0)).norm() < 1e-7 * e6.norm());
        let tau = w.params().tau();
        let x = Complex64::new(0.3, 0.2);
        let d = w.zeta_e(x + tau).unwrap() - w.zeta_e(x).unwrap() + TWO_PI_I;
        assert!(d.norm() < 1e-10);
    }

    #[test]
    fn laurent_rejects_collapsed_radius() {
        let w = ws();
        let opts = LaurentOptions { radius: Some(0.0), ..LaurentOptions::default() };
        assert!(matches!(w.laurent(|x| w.wp(x), Complex64::default(), opts), Err(Error::RadiusCollapse(_))));
    }
}
