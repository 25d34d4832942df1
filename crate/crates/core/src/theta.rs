//! Jacobi theta function, the Eisenstein–Kronecker function
//! F(x, y) = θ′(0)θ(x+y)/(θ(x)θ(y)) and the kernels g⁽ⁿ⁾ extracted from
//! its Laurent expansion in y.
//!
//! θ is evaluated from the triple product
//! θ(x) = q^{1/8}(z^{1/2} − z^{−1/2}) ∏(1−qⁿ)(1−qⁿz)(1−qⁿ/z), z = e^{2πix},
//! after reducing x into the strip |Im x| ≤ Im τ/2, |Re x| ≤ 1/2 with
//! θ(x+1) = −θ(x) and θ(x+τ) = −q^{−1/2}e^{−2πix}θ(x). The multiplier is
//! carried in logarithmic form so that quotients of far-away values do not
//! overflow.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature::circle_offsets;
use crate::scalar::{imag_unit, Real};
use crate::torus::TorusParams;

/// Theta value split as `core · exp(log_multiplier)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ThetaParts<T: Real> {
    pub core: Complex<T>,
    pub log_multiplier: Complex<T>,
}

#[derive(Debug, Clone)]
struct KernelRing<T: Real> {
    nodes: Vec<Complex<T>>,
    theta_core: Vec<Complex<T>>,
    theta_log: Vec<Complex<T>>,
}

/// Immutable theta evaluator for a fixed torus.
#[derive(Debug, Clone)]
pub struct ThetaEvaluator<T: Real> {
    params: TorusParams<T>,
    truncation_order: usize,
    q_eighth: Complex<T>,
    q_powers: Vec<Complex<T>>,
    theta_prime_zero: Complex<T>,
    ring: KernelRing<T>,
}

impl<T: Real> ThetaEvaluator<T> {
    pub fn new(params: TorusParams<T>) -> Self {
        let tau = params.tau();
        let q = params.q();
        // |qⁿ z^{±1}| ≤ e^{−2π Im τ (n − 1/2)} inside the reduced strip.
        let decay = T::TAU() * tau.im;
        let needed = (-params.series_tol().ln() / decay + T::lit(0.5)).ceil();
        let truncation_order = needed.to_usize().unwrap_or(1).max(1) + 2;
        let mut q_powers = Vec::with_capacity(truncation_order);
        let mut qn = q;
        for _ in 0..truncation_order {
            q_powers.push(qn);
            qn = qn * q;
        }
        let q_eighth = (Complex::new(T::zero(), T::TAU() / T::lit(8.0)) * tau).exp();
        let euler = q_powers
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |acc, qn| acc * (Complex::new(T::one(), T::zero()) - qn));
        let theta_prime_zero = imag_unit::<T>() * T::TAU() * q_eighth * euler * euler * euler;

        let mut this = Self {
            params,
            truncation_order,
            q_eighth,
            q_powers,
            theta_prime_zero,
            ring: KernelRing { nodes: Vec::new(), theta_core: Vec::new(), theta_log: Vec::new() },
        };
        let nodes = circle_offsets(this.params.ring_radius(), this.params.quad_points());
        let parts: Vec<ThetaParts<T>> = nodes.iter().map(|&y| this.parts(y)).collect();
        this.ring = KernelRing {
            theta_core: parts.iter().map(|p| p.core).collect(),
            theta_log: parts.iter().map(|p| p.log_multiplier).collect(),
            nodes,
        };
        this
    }

    pub fn params(&self) -> &TorusParams<T> {
        &self.params
    }

    /// Number of product factors retained.
    pub fn truncation_order(&self) -> usize {
        self.truncation_order
    }

    /// Reduce x by lattice shifts and evaluate the product at the reduced point.
    pub(crate) fn parts(&self, x: Complex<T>) -> ThetaParts<T> {
        let tau = self.params.tau();
        let (x0, m) = self.params.reduce_imag(x);
        let k = x0.re.round();
        let x1 = x0 - Complex::new(k, T::zero());
        let mf = T::lit(m as f64);
        let i = imag_unit::<T>();
        // θ(x0 + mτ) = (−1)^m q^{−m²/2} e^{−2πimx0} θ(x0), θ(x1 + k) = (−1)^k θ(x1)
        let log_multiplier = i * T::PI() * (k + mf) - i * T::PI() * tau * (mf * mf) - i * T::TAU() * mf * x0;
        ThetaParts { core: self.product(x1), log_multiplier }
    }

    fn product(&self, x: Complex<T>) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        let i = imag_unit::<T>();
        let z = (i * T::TAU() * x).exp();
        let zinv = one / z;
        let mut acc = (x * T::PI()).sin() * i * T::lit(2.0) * self.q_eighth;
        for qn in &self.q_powers {
            acc = acc * (one - qn) * (one - qn * z) * (one - qn * zinv);
        }
        acc
    }

    /// Odd Jacobi theta function with simple zeros on Λ.
    pub fn theta(&self, x: Complex<T>) -> Complex<T> {
        let p = self.parts(x);
        p.core * p.log_multiplier.exp()
    }

    /// θ′(0) = 2πi q^{1/8} ∏(1 − qⁿ)³.
    pub fn theta_prime_zero(&self) -> Complex<T> {
        self.theta_prime_zero
    }

    /// d/dx log θ at a point already reduced into the fundamental strip.
    pub(crate) fn log_derivative_reduced(&self, x: Complex<T>) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        let i = imag_unit::<T>();
        let pix = x * T::PI();
        let z = (i * T::TAU() * x).exp();
        let zinv = one / z;
        let mut series = Complex::new(T::zero(), T::zero());
        for qn in &self.q_powers {
            let u = qn * z;
            let w = qn * zinv;
            series = series + w / (one - w) - u / (one - u);
        }
        pix.cos() / pix.sin() * T::PI() + series * i * T::TAU()
    }

    /// First and second x-derivatives of d/dx log θ at a reduced point.
    pub(crate) fn log_derivative_derivs(&self, x: Complex<T>) -> (Complex<T>, Complex<T>) {
        let one = Complex::new(T::one(), T::zero());
        let i = imag_unit::<T>();
        let pi = T::PI();
        let pix = x * pi;
        let (s, c) = (pix.sin(), pix.cos());
        let z = (i * T::TAU() * x).exp();
        let zinv = one / z;
        let mut d1 = Complex::new(T::zero(), T::zero());
        let mut d2 = Complex::new(T::zero(), T::zero());
        for qn in &self.q_powers {
            let u = qn * z;
            let w = qn * zinv;
            let (du, dw) = (one - u, one - w);
            d1 = d1 + u / (du * du) + w / (dw * dw);
            d2 = d2 + u * (one + u) / (du * du * du) - w * (one + w) / (dw * dw * dw);
        }
        let pi2 = pi * pi;
        let first = -(one / (s * s)) * pi2 + d1 * (T::lit(4.0) * pi2);
        let second = c / (s * s * s) * (T::lit(2.0) * pi2 * pi) + d2 * i * (T::lit(8.0) * pi2 * pi);
        (first, second)
    }

    /// F(x, y) = θ′(0)θ(x+y)/(θ(x)θ(y)) for x, y ∉ Λ.
    pub fn eisenstein_kronecker(&self, x: Complex<T>, y: Complex<T>) -> Result<Complex<T>> {
        self.params.check_off_lattice(x)?;
        self.params.check_off_lattice(y)?;
        let px = self.parts(x);
        let py = self.parts(y);
        let pxy = self.parts(x + y);
        Ok(self.theta_prime_zero * pxy.core / (px.core * py.core)
            * (pxy.log_multiplier - px.log_multiplier - py.log_multiplier).exp())
    }

    /// g⁽⁰⁾(x), …, g⁽ⁿ⁾(x).
    ///
    /// The kernels are taken at x₀ = x − mτ in the central strip and shifted
    /// with g⁽ⁿ⁾(x₀ + mτ) = Σⱼ (mΔZ)ʲ/j!·g⁽ⁿ⁻ʲ⁾(x₀), which follows from
    /// F(x + τ, y) = e^{ΔZ·y}F(x, y). Integrating the shifted F on the ring
    /// directly would cancel a factor up to e^{2π|m|r}.
    pub fn g_kernels(&self, x: Complex<T>, n_max: usize) -> Result<Vec<Complex<T>>> {
        if n_max > self.params.kernel_max() {
            return Err(Error::OutOfRange(format!(
                "kernel order {n_max} exceeds configured maximum {}",
                self.params.kernel_max()
            )));
        }
        self.params.check_off_lattice(x)?;
        let (x0, m) = self.params.reduce_imag(x);
        let base = self.g_kernels_central(x0, n_max);
        if m == 0 {
            return Ok(base);
        }
        // (mΔZ)ʲ/j!
        let step = Complex::new(T::zero(), -T::TAU() * T::lit(m as f64));
        let mut shift = Vec::with_capacity(n_max + 1);
        let mut term = Complex::new(T::one(), T::zero());
        for j in 0..=n_max {
            shift.push(term);
            term = term * step / T::from_usize_lossy(j + 1);
        }
        Ok((0..=n_max)
            .map(|n| (0..=n).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + shift[j] * base[n - j]))
            .collect())
    }

    /// Ring integral g⁽ⁿ⁾(x) = (1/2πi)∮ F(x, y) y^{−n} dy on |y| = ring_radius.
    fn g_kernels_central(&self, x: Complex<T>, n_max: usize) -> Vec<Complex<T>> {
        let px = self.parts(x);
        let prefactor = self.theta_prime_zero / px.core;
        let mut out = vec![Complex::new(T::zero(), T::zero()); n_max + 1];
        for (j, &y) in self.ring.nodes.iter().enumerate() {
            let pxy = self.parts(x + y);
            let f = prefactor * pxy.core / self.ring.theta_core[j]
                * (pxy.log_multiplier - px.log_multiplier - self.ring.theta_log[j]).exp();
            // F·y^{1−n}, starting from n = 0
            let mut term = f * y;
            let yinv = Complex::new(T::one(), T::zero()) / y;
            for g in out.iter_mut() {
                *g = *g + term;
                term = term * yinv;
            }
        }
        let n = T::from_usize_lossy(self.ring.nodes.len());
        out.into_iter().map(|g| g / n).collect()
    }

    /// Single kernel g⁽ⁿ⁾(x).
    pub fn g_kernel(&self, n: usize, x: Complex<T>) -> Result<Complex<T>> {
        Ok(self.g_kernels(x, n)?[n])
    }
}
