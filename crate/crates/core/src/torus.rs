//! Modular parameter, numerical policy and lattice geometry for Λ = ℤ + τℤ.

use num_complex::Complex;


use crate::error::{Error, Result};
use crate::scalar::{delta_z, Real};

/// Fixed modular parameter τ together with every numerical knob used by the
/// evaluators. Immutable once built; the `with_*` methods consume and
/// re-validate.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusParams<T: Real> {
    tau: Complex<T>,
    q: Complex<T>,
    delta_z: Complex<T>,
    quad_points: usize,
    series_tol: T,
    ring_radius: T,
    pole_guard: T,
    contour_guard: T,
    laurent_nodes: usize,
    derivative_nodes: usize,
    kernel_max: usize,
}

impl<T: Real> TorusParams<T> {
    /// Parameters with the documented defaults: 256 quadrature nodes,
    /// q-series tolerance 1e-16 and kernel ring radius 0.4·min(1, Im τ).
    pub fn new(tau: Complex<T>) -> Result<Self> {
        let q = nome(tau)?;
        let ring_radius = T::lit(0.4) * T::one().min(tau.im);
        Ok(Self {
            tau,
            q,
            delta_z: delta_z(),
            quad_points: 256,
            series_tol: T::lit(1e-16),
            ring_radius,
            pole_guard: T::lit(1e-9),
            contour_guard: T::lit(0.05) * tau.im,
            laurent_nodes: 128,
            derivative_nodes: 64,
            kernel_max: 16,
        })
    }

    /// τ = i, the default torus of every test suite.
    pub fn square() -> Self {
        Self::new(Complex::new(T::zero(), T::one())).expect("tau = i is valid")
    }

    pub fn with_quad_points(mut self, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidConfig(format!("quad_points must be >= 4, got {n}")));
        }
        self.quad_points = n;
        Ok(self)
    }

    pub fn with_series_tol(mut self, tol: T) -> Result<Self> {
        if !(tol > T::zero() && tol < T::one()) {
            return Err(Error::InvalidConfig(format!("series_tol must lie in (0, 1), got {tol}")));
        }
        self.series_tol = tol;
        Ok(self)
    }

    pub fn with_ring_radius(mut self, r: T) -> Result<Self> {
        let limit = T::one().min(self.tau.im);
        if !(r > T::zero() && r < limit) {
            return Err(Error::InvalidConfig(format!(
                "ring_radius must lie in (0, min(1, Im tau) = {limit}), got {r}"
            )));
        }
        self.ring_radius = r;
        Ok(self)
    }

    pub fn with_pole_guard(mut self, g: T) -> Result<Self> {
        if !(g >= T::zero()) {
            return Err(Error::InvalidConfig(format!("pole_guard must be >= 0, got {g}")));
        }
        self.pole_guard = g;
        Ok(self)
    }

    pub fn with_laurent_nodes(mut self, n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidConfig(format!("laurent_nodes must be >= 8, got {n}")));
        }
        self.laurent_nodes = n;
        Ok(self)
    }

    pub fn with_kernel_max(mut self, n: usize) -> Result<Self> {
        self.kernel_max = n;
        Ok(self)
    }

    pub fn tau(&self) -> Complex<T> {
        self.tau
    }
    pub fn q(&self) -> Complex<T> {
        self.q
    }
    /// ΔZ = −2πi.
    pub fn delta_z(&self) -> Complex<T> {
        self.delta_z
    }
    pub fn quad_points(&self) -> usize {
        self.quad_points
    }
    pub fn series_tol(&self) -> T {
        self.series_tol
    }
    pub fn ring_radius(&self) -> T {
        self.ring_radius
    }
    /// Evaluators refuse points closer than this to Λ.
    pub fn pole_guard(&self) -> T {
        self.pole_guard
    }
    /// Minimum clearance between a convolution contour and any pole.
    pub fn contour_guard(&self) -> T {
        self.contour_guard
    }
    pub fn laurent_nodes(&self) -> usize {
        self.laurent_nodes
    }
    pub fn derivative_nodes(&self) -> usize {
        self.derivative_nodes
    }
    pub fn kernel_max(&self) -> usize {
        self.kernel_max
    }

    /// Length of the shortest nonzero lattice vector.
    pub fn min_lattice_gap(&self) -> T {
        let mut best = T::one();
        for m in 1..=3i32 {
            let mt = self.tau * T::lit(m as f64);
            let n0 = (-mt.re).round();
            for dn in -2..=2 {
                let v = mt + Complex::new(n0 + T::lit(dn as f64), T::zero());
                best = best.min(v.norm());
            }
        }
        best
    }

    /// Embed a lattice point as a complex number.
    pub fn embed(&self, p: LatticePoint) -> Complex<T> {
        self.tau * T::lit(p.m as f64) + Complex::new(T::lit(p.n as f64), T::zero())
    }

    /// Coordinates (u, v) with x = u + v·τ.
    pub fn lattice_coords(&self, x: Complex<T>) -> (T, T) {
        let v = x.im / self.tau.im;
        (x.re - v * self.tau.re, v)
    }

    /// Split x = x₀ + m·τ with |Im x₀| ≤ Im τ / 2.
    pub fn reduce_imag(&self, x: Complex<T>) -> (Complex<T>, i64) {
        let m = (x.im / self.tau.im).round();
        let x0 = x - self.tau * m;
        (x0, m.to_i64().unwrap_or(0))
    }

    /// Representative of x modulo Λ with lattice coordinates in [0, 1)².
    pub fn reduce_mod_lattice(&self, x: Complex<T>) -> Complex<T> {
        let (u, v) = self.lattice_coords(x);
        let fu = u - u.floor();
        let fv = v - v.floor();
        Complex::new(fu, T::zero()) + self.tau * fv
    }

    /// Euclidean distance from x to the nearest point of Λ.
    pub fn lattice_distance(&self, x: Complex<T>) -> T {
        let (_, v) = self.lattice_coords(x);
        let m0 = v.floor();
        let mut best = T::infinity();
        for dm in -1..=2 {
            let m = m0 + T::lit(dm as f64);
            let w = x - self.tau * m;
            let n0 = w.re.floor();
            for dn in -1..=2 {
                let d = w - Complex::new(n0 + T::lit(dn as f64), T::zero());
                best = best.min(d.norm());
            }
        }
        best
    }

    /// Error out when x is closer than the pole guard to Λ.
    pub fn check_off_lattice(&self, x: Complex<T>) -> Result<()> {
        let d = self.lattice_distance(x);
        if d <= self.pole_guard || !d.is_finite() {
            return Err(Error::PoleProximity {
                re: x.re.to_f64().unwrap_or(f64::NAN),
                im: x.im.to_f64().unwrap_or(f64::NAN),
                distance: d.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

/// The lattice point n + m·τ (the τ-direction index m comes first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub m: i64,
    pub n: i64,
}

impl LatticePoint {
    pub fn new(m: i64, n: i64) -> Self {
        Self { m, n }
    }
}

/// q = e^{2πiτ}.
pub fn nome<T: Real>(tau: Complex<T>) -> Result<Complex<T>> {
    if !(tau.im > T::zero()) {
        return Err(Error::InvalidTau(tau.im.to_f64().unwrap_or(f64::NAN)));
    }
    Ok((Complex::new(T::zero(), T::TAU()) * tau).exp())
}

/// Shift x by an integer so that Re(x) ∈ [0, 1).
pub fn reduce_real_period<T: Real>(x: Complex<T>) -> Complex<T> {
    let mut re = x.re - x.re.floor();
    if re >= T::one() {
        re = re - T::one();
    }
    Complex::new(re, x.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn nome_examples() {
        let q = nome(Complex64::new(0.0, 1.0)).unwrap();
        assert!((q.re - (-std::f64::consts::TAU).exp()).abs() < 1e-18);
        assert!(q.im.abs() < 1e-18);
        assert!((q.re - 1.8674427317079889e-3).abs() < 1e-15);

        let q = nome(Complex64::new(0.0, 20.0)).unwrap();
        assert!(q.norm() < 1e-54);

        let q = nome(Complex64::new(0.5, 1.0)).unwrap();
        assert!((q.re + (-std::f64::consts::TAU).exp()).abs() < 1e-15);
        assert!(q.im.abs() < 1e-15);
    }

    #[test]
    fn nome_rejects_lower_half_plane() {
        assert!(matches!(nome(Complex64::new(0.3, 0.0)), Err(Error::InvalidTau(_))));
        assert!(TorusParams::new(Complex64::new(0.0, -1.0)).is_err());
    }

    #[test]
    fn lattice_distance_examples() {
        let p = TorusParams::<f64>::square();
        assert_eq!(p.lattice_distance(Complex64::new(0.0, 0.0)), 0.0);
        assert!((p.lattice_distance(Complex64::new(0.5, 0.0)) - 0.5).abs() < 1e-15);
        let d = p.lattice_distance(Complex64::new(0.5, 0.5));
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn reduce_real_period_examples() {
        let r = reduce_real_period(Complex64::new(2.25, 0.5));
        assert!((r - Complex64::new(0.25, 0.5)).norm() < 1e-15);
        let r = reduce_real_period(Complex64::new(-0.1, 0.0));
        assert!((r.re - 0.9).abs() < 1e-15);
        let r = reduce_real_period(Complex64::new(0.0, 0.7));
        assert_eq!(r, Complex64::new(0.0, 0.7));
    }

    #[test]
    fn ring_radius_validation() {
        let p = TorusParams::<f64>::square();
        assert!((p.ring_radius() - 0.4).abs() < 1e-15);
        assert!(p.clone().with_ring_radius(1.0).is_err());
        assert!(p.clone().with_ring_radius(0.9).is_ok());
        let thin = TorusParams::new(Complex64::new(0.0, 0.5)).unwrap();
        assert!((thin.ring_radius() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn min_gap_and_reduction() {
        let p = TorusParams::new(Complex64::new(0.5, 0.6)).unwrap();
        assert!((p.min_lattice_gap() - (0.25f64 + 0.36).sqrt()).abs() < 1e-14);
        let (x0, m) = p.reduce_imag(Complex64::new(0.1, 1.3));
        assert_eq!(m, 2);
        assert!(x0.im.abs() <= 0.3 + 1e-15);
        let r = p.reduce_mod_lattice(p.tau() * 3.0 + Complex64::new(-2.0, 0.0) + 0.1);
        assert!((r - Complex64::new(0.1, 0.0)).norm() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn lattice_distance_is_lattice_invariant(
                re in -0.5f64..1.5, im in -1.0f64..1.0, m in -3i64..3, n in -3i64..3,
            ) {
                let p = TorusParams::new(Complex64::new(0.2, 1.1)).unwrap();
                let x = Complex64::new(re, im);
                let shifted = x + p.embed(LatticePoint::new(m, n));
                prop_assert!((p.lattice_distance(x) - p.lattice_distance(shifted)).abs() < 1e-12);
            }

            #[test]
            fn reduce_real_period_shifts_by_integer(re in -50.0f64..50.0, im in -2.0f64..2.0) {
                let x = Complex64::new(re, im);
                let r = reduce_real_period(x);
                prop_assert!(r.re >= 0.0 && r.re < 1.0);
                prop_assert_eq!(r.im, im);
                let k = x.re - r.re;
                prop_assert!((k - k.round()).abs() < 1e-9);
            }
        }
    }
}
