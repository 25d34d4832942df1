//! Trapezoid rules on periodic contours: real periods and circles.

use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;

/// Mean of `f` over one real period at fixed height:
/// (1/N) Σ f(offset + j/N + i·height), i.e. ∫₀¹ f(t + i·height) dt.
pub fn period_mean<T, F>(nodes: usize, offset: T, height: T, mut f: F) -> Result<Complex<T>>
where
    T: Real,
    F: FnMut(Complex<T>) -> Result<Complex<T>>,
{
    let n = T::from_usize_lossy(nodes);
    let mut acc = Complex::new(T::zero(), T::zero());
    for j in 0..nodes {
        let t = offset + T::from_usize_lossy(j) / n;
        acc = acc + f(Complex::new(t, height))?;
    }
    Ok(acc / n)
}

/// Equispaced nodes on the circle |z − center| = radius, returned as the
/// offsets w_j = radius·e^{2πij/N}.
pub fn circle_offsets<T: Real>(radius: T, nodes: usize) -> Vec<Complex<T>> {
    let n = T::from_usize_lossy(nodes);
    (0..nodes)
        .map(|j| Complex::from_polar(radius, T::TAU() * T::from_usize_lossy(j) / n))
        .collect()
}

/// k-th derivative of an analytic function by the Cauchy integral on a
/// circle: f⁽ᵏ⁾(x) = k!/(N) Σ f(x + w_j) w_j^{−k}.
pub fn cauchy_derivative<T, F>(x: Complex<T>, k: u32, radius: T, nodes: usize, mut f: F) -> Result<Complex<T>>
where
    T: Real,
    F: FnMut(Complex<T>) -> Result<Complex<T>>,
{
    let mut acc = Complex::new(T::zero(), T::zero());
    for w in circle_offsets(radius, nodes) {
        acc = acc + f(x + w)? * w.powi(-(k as i32));
    }
    let kfact = (1..=k).fold(T::one(), |a, i| a * T::lit(i as f64));
    Ok(acc * kfact / T::from_usize_lossy(nodes))
}
