//! Contour convolutions of 1-periodic meromorphic functions.
//!
//! (f ⊛₊ g)(x) = ∫ f(x − z) g(z) dz over one real period at a fixed height,
//! (f *₊ g)(x) the same with the contour just below ℝ. Both are realized by
//! the trapezoid rule, which converges geometrically for periodic analytic
//! integrands.
//!
//! A [`PeriodicFunction`] carries the open horizontal strips on which its
//! evaluator is analytic. Poles in the ledger sit on strip edges, so contour
//! guards are measured from those edges.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature::{cauchy_derivative, period_mean};
use crate::scalar::{two_pi_i, Real};
use crate::torus::TorusParams;
use crate::weierstrass::{extract_laurent, LaurentOptions, Weierstrass};

/// Point evaluator x ↦ f(x).
pub type Evaluator<T> = Arc<dyn Fn(Complex<T>) -> Result<Complex<T>> + Send + Sync>;

/// Rows of pole-free strips declared for closed-form functions with poles on Λ.
const CLOSED_FORM_ROWS: std::ops::RangeInclusive<i32> = -2..=2;

/// Open strip lo < Im x < hi; either bound may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strip<T: Real> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Strip<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }

    pub fn everywhere() -> Self {
        Self { lo: T::neg_infinity(), hi: T::infinity() }
    }

    pub fn contains(&self, height: T) -> bool {
        self.lo < height && height < self.hi
    }

    /// Distance from `height` to the nearer edge.
    pub fn edge_distance(&self, height: T) -> T {
        (height - self.lo).min(self.hi - height)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    fn intersect(&self, other: &Self) -> Option<Self> {
        let s = Self::new(self.lo.max(other.lo), self.hi.min(other.hi));
        (s.lo < s.hi).then_some(s)
    }

    fn shifted(&self, by: T) -> Self {
        Self::new(self.lo + by, self.hi + by)
    }
}

/// Location of a pole modulo Λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoleLocation<T: Real> {
    /// The lattice itself.
    Lattice,
    /// A torus point, stored with lattice coordinates in [0, 1)².
    Torus(Complex<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleEntry<T: Real> {
    pub location: PoleLocation<T>,
    pub max_order: u32,
}

impl<T: Real> PoleEntry<T> {
    pub fn lattice(max_order: u32) -> Self {
        Self { location: PoleLocation::Lattice, max_order }
    }
}

/// A 1-periodic function given by an evaluator, its analytic strips and a
/// pole ledger.
#[derive(Clone)]
pub struct PeriodicFunction<T: Real> {
    evaluator: Evaluator<T>,
    valid_strips: Vec<Strip<T>>,
    pole_ledger: Vec<PoleEntry<T>>,
    closed_form: bool,
    name: String,
}

impl<T: Real> fmt::Debug for PeriodicFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicFunction")
            .field("name", &self.name)
            .field("valid_strips", &self.valid_strips)
            .field("pole_ledger", &self.pole_ledger)
            .field("closed_form", &self.closed_form)
            .finish()
    }
}

impl<T: Real> PeriodicFunction<T> {
    /// A numerically realized function valid on the given strips only.
    pub fn new(
        name: impl Into<String>,
        evaluator: Evaluator<T>,
        valid_strips: Vec<Strip<T>>,
        pole_ledger: Vec<PoleEntry<T>>,
    ) -> Self {
        Self { evaluator, valid_strips, pole_ledger, closed_form: false, name: name.into() }
    }

    /// A closed-form function evaluable anywhere off its poles, all of which
    /// lie on Λ. Its declared strips are the pole-free rows around ℝ.
    pub fn closed_form_on_lattice(name: impl Into<String>, evaluator: Evaluator<T>, tau_im: T, max_order: u32) -> Self {
        let valid_strips = CLOSED_FORM_ROWS
            .map(|m| Strip::new(tau_im * T::lit(m as f64), tau_im * T::lit(m as f64 + 1.0)))
            .collect();
        let pole_ledger = if max_order == 0 { Vec::new() } else { vec![PoleEntry::lattice(max_order)] };
        Self { evaluator, valid_strips, pole_ledger, closed_form: true, name: name.into() }
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self {
            evaluator: Arc::new(move |_| Ok(c)),
            valid_strips: vec![Strip::everywhere()],
            pole_ledger: Vec::new(),
            closed_form: true,
            name: format!("{c}"),
        }
    }

    pub fn eval(&self, x: Complex<T>) -> Result<Complex<T>> {
        (self.evaluator)(x)
    }

    pub fn evaluator(&self) -> &Evaluator<T> {
        &self.evaluator
    }

    pub fn valid_strips(&self) -> &[Strip<T>] {
        &self.valid_strips
    }

    pub fn pole_ledger(&self) -> &[PoleEntry<T>] {
        &self.pole_ledger
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_closed_form(&self) -> bool {
        self.closed_form
    }

    /// The strip containing heights just above ℝ.
    pub fn upper_strip(&self) -> Option<Strip<T>> {
        self.valid_strips.iter().copied().find(|s| s.lo <= T::zero() && T::zero() < s.hi)
    }

    /// The strip containing heights just below ℝ.
    pub fn lower_strip(&self) -> Option<Strip<T>> {
        self.valid_strips.iter().copied().find(|s| s.lo < T::zero() && T::zero() <= s.hi)
    }

    /// Whether every ledger pole lies on Λ.
    pub fn poles_on_lattice(&self) -> bool {
        self.pole_ledger.iter().all(|p| p.location == PoleLocation::Lattice)
    }
}

/// Minkowski sum of two pole ledgers modulo Λ, with order bound
/// o_f + o_g − 1 at each summed location.
pub fn pole_ledger_conv<T: Real>(params: &TorusParams<T>, f: &[PoleEntry<T>], g: &[PoleEntry<T>]) -> Vec<PoleEntry<T>> {
    let mut out: Vec<PoleEntry<T>> = Vec::new();
    for a in f {
        for b in g {
            let order = (a.max_order + b.max_order).saturating_sub(1);
            if order == 0 {
                continue;
            }
            let location = match (a.location, b.location) {
                (PoleLocation::Lattice, PoleLocation::Lattice) => PoleLocation::Lattice,
                (PoleLocation::Lattice, PoleLocation::Torus(p)) | (PoleLocation::Torus(p), PoleLocation::Lattice) => {
                    PoleLocation::Torus(p)
                }
                (PoleLocation::Torus(p), PoleLocation::Torus(r)) => {
                    let s = p + r;
                    if params.lattice_distance(s) < T::lit(1e-12) {
                        PoleLocation::Lattice
                    } else {
                        PoleLocation::Torus(params.reduce_mod_lattice(s))
                    }
                }
            };
            let same = |e: &PoleEntry<T>| match (e.location, location) {
                (PoleLocation::Lattice, PoleLocation::Lattice) => true,
                (PoleLocation::Torus(u), PoleLocation::Torus(v)) => params.lattice_distance(u - v) < T::lit(1e-12),
                _ => false,
            };
            match out.iter_mut().find(|e| same(e)) {
                Some(e) => e.max_order = e.max_order.max(order),
                None => out.push(PoleEntry { location, max_order: order }),
            }
        }
    }
    out
}

/// Convolution engine for one torus, with closed-form constructors for the
/// standard functions.
#[derive(Debug, Clone)]
pub struct Convolver<T: Real> {
    wei: Arc<Weierstrass<T>>,
}

impl<T: Real> Convolver<T> {
    pub fn new(params: TorusParams<T>) -> Result<Self> {
        Ok(Self { wei: Arc::new(Weierstrass::new(params)?) })
    }

    pub fn from_weierstrass(wei: Arc<Weierstrass<T>>) -> Self {
        Self { wei }
    }

    pub fn weierstrass(&self) -> &Arc<Weierstrass<T>> {
        &self.wei
    }

    pub fn params(&self) -> &TorusParams<T> {
        self.wei.params()
    }

    fn tau_im(&self) -> T {
        self.params().tau().im
    }

    fn closed(&self, name: &str, order: u32, f: impl Fn(&Weierstrass<T>, Complex<T>) -> Result<Complex<T>> + Send + Sync + 'static) -> PeriodicFunction<T> {
        let wei = Arc::clone(&self.wei);
        PeriodicFunction::closed_form_on_lattice(name, Arc::new(move |x| f(&wei, x)), self.tau_im(), order)
    }

    /// Eisenstein's zeta Z.
    pub fn z(&self) -> PeriodicFunction<T> {
        self.closed("Z", 1, |w, x| w.zeta_e(x))
    }

    /// Z′ = −℘ − e₂.
    pub fn z_prime(&self) -> PeriodicFunction<T> {
        self.closed("Z'", 2, |w, x| w.zeta_e_prime(x))
    }

    pub fn wp(&self) -> PeriodicFunction<T> {
        self.closed("wp", 2, |w, x| w.wp(x))
    }

    pub fn wp_prime(&self) -> PeriodicFunction<T> {
        self.closed("wp'", 3, |w, x| w.wp_prime(x))
    }

    /// Kernel g⁽ⁿ⁾.
    pub fn kernel(&self, n: usize) -> PeriodicFunction<T> {
        self.closed(&format!("g{n}"), u32::from(n > 0), move |w, x| w.theta().g_kernel(n, x))
    }

    /// Δf(x) = f(x + τ) − f(x).
    pub fn difference(&self, f: &PeriodicFunction<T>) -> PeriodicFunction<T> {
        let tau = self.params().tau();
        let inner = Arc::clone(&f.evaluator);
        let evaluator: Evaluator<T> = Arc::new(move |x| Ok(inner(x + tau)? - inner(x)?));
        let valid_strips = if f.closed_form {
            f.valid_strips.clone()
        } else {
            f.valid_strips
                .iter()
                .flat_map(|s| f.valid_strips.iter().filter_map(move |t| s.intersect(&t.shifted(-tau.im))))
                .collect()
        };
        PeriodicFunction {
            evaluator,
            valid_strips,
            pole_ledger: f.pole_ledger.clone(),
            closed_form: f.closed_form,
            name: format!("D({})", f.name),
        }
    }

    /// Mean of f over one real period at the given height.
    pub fn period_integral(&self, f: &PeriodicFunction<T>, height: T) -> Result<Complex<T>> {
        period_mean(self.params().quad_points(), T::zero(), height, |z| f.eval(z))
    }

    fn guard(&self, strip: &Strip<T>, height: T) -> Result<()> {
        let guard = self.params().contour_guard();
        let distance = strip.edge_distance(height);
        if distance < guard {
            return Err(Error::ContourTooClose {
                height: height.to_f64().unwrap_or(f64::NAN),
                distance: distance.to_f64().unwrap_or(f64::NAN),
                guard: guard.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    fn strip_violation(x: Complex<T>, lo: T, hi: T) -> Error {
        Error::StripViolation {
            im: x.im.to_f64().unwrap_or(f64::NAN),
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// (f ⊛₊ g)(x) with the contour for g at height Im(x)/2.
    pub fn conv_plus(&self, f: &PeriodicFunction<T>, g: &PeriodicFunction<T>, x: Complex<T>) -> Result<Complex<T>> {
        self.conv_plus_split(f, g, x, x.im * T::lit(0.5))
    }

    /// (f ⊛₊ g)(x) with g sampled at height `h` and f at Im(x) − h.
    pub fn conv_plus_split(&self, f: &PeriodicFunction<T>, g: &PeriodicFunction<T>, x: Complex<T>, h: T) -> Result<Complex<T>> {
        let (sf, sg) = match (f.upper_strip(), g.upper_strip()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Self::strip_violation(x, T::zero(), T::zero())),
        };
        let hf = x.im - h;
        if !(x.im > T::zero()) || !sg.contains(h) || !sf.contains(hf) {
            return Err(Self::strip_violation(x, sf.lo.max(T::zero()) + sg.lo.max(T::zero()), sf.hi + sg.hi));
        }
        self.guard(&sg, h)?;
        self.guard(&sf, hf)?;
        period_mean(self.params().quad_points(), T::zero(), h, |z| Ok(f.eval(x - z)? * g.eval(z)?))
    }

    /// f ⊛₊ g as a numerically realized function on the sum of the upper
    /// strips, splitting heights in proportion to the strip widths.
    pub fn convolved(&self, f: &PeriodicFunction<T>, g: &PeriodicFunction<T>) -> Result<PeriodicFunction<T>> {
        let (sf, sg) = match (f.upper_strip(), g.upper_strip()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::InvalidConfig(format!("{} or {} has no strip above the real axis", f.name, g.name))),
        };
        let lo = sf.lo.max(T::zero()) + sg.lo.max(T::zero());
        let strip = Strip::new(lo, sf.hi + sg.hi);
        let ledger = pole_ledger_conv(self.params(), &f.pole_ledger, &g.pole_ledger);
        let (fc, gc, me) = (f.clone(), g.clone(), self.clone());
        let evaluator: Evaluator<T> = Arc::new(move |x| {
            let h = split_height(&sf, &sg, x.im);
            me.conv_plus_split(&fc, &gc, x, h)
        });
        Ok(PeriodicFunction::new(format!("({})*({})", f.name, g.name), evaluator, vec![strip], ledger))
    }

    /// n-fold convolution f₁ ⊛₊ ⋯ ⊛₊ fₙ at x with every contour at height
    /// Im(x)/n. The nested trapezoid sum is evaluated as iterated cyclic
    /// convolutions of the sampled factors, which is the same finite sum.
    pub fn conv_nfold(&self, fs: &[PeriodicFunction<T>], x: Complex<T>) -> Result<Complex<T>> {
        let n = fs.len();
        if n < 2 {
            return Err(Error::InvalidConfig("n-fold convolution needs at least two factors".into()));
        }
        let height = x.im / T::from_usize_lossy(n);
        for f in fs {
            let s = f.upper_strip().filter(|s| x.im > T::zero() && s.contains(height));
            match s {
                Some(s) => self.guard(&s, height)?,
                None => return Err(Self::strip_violation(x, T::zero(), self.tau_im() * T::from_usize_lossy(n))),
            }
        }
        let nodes = if n >= 3 { self.params().quad_points().min(128) } else { self.params().quad_points() };
        let nn = T::from_usize_lossy(nodes);
        let sample = |f: &PeriodicFunction<T>, offset: T, sign: T| -> Result<Vec<Complex<T>>> {
            (0..nodes)
                .map(|j| f.eval(Complex::new(offset + sign * T::from_usize_lossy(j) / nn, height)))
                .collect()
        };
        let mut acc = sample(&fs[1], T::zero(), T::one())?;
        for f in &fs[2..] {
            let b = sample(f, T::zero(), T::one())?;
            acc = cyclic_convolution(&acc, &b);
        }
        // f₁ at Re x − s/N for the summed offset s
        let first = sample(&fs[0], x.re, -T::one())?;
        let total = first.iter().zip(&acc).fold(Complex::new(T::zero(), T::zero()), |a, (u, v)| a + u * v);
        Ok(total / nn.powi(n as i32 - 1))
    }

    /// (f *₊ g)(x): contour Im z = −ε just below ℝ.
    ///
    /// The value does not depend on ε while the contour crosses no pole of
    /// the integrand, so ε is placed in the middle of the admissible range.
    pub fn conv_star(&self, f: &PeriodicFunction<T>, g: &PeriodicFunction<T>, x: Complex<T>) -> Result<Complex<T>> {
        let band = self.tau_im() * T::lit(0.5);
        if !(x.im >= T::zero() && x.im < band) {
            return Err(Self::strip_violation(x, T::zero(), band));
        }
        let (sf, sg) = match (f.upper_strip(), g.lower_strip()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Self::strip_violation(x, T::zero(), band)),
        };
        // −ε in sg, Im x + ε in sf, ε > 0
        let cap = self.tau_im();
        let lo = T::zero().max(-sg.hi).max(sf.lo - x.im);
        let hi = cap.min(-sg.lo).min(sf.hi - x.im);
        if !(lo < hi) {
            return Err(Self::strip_violation(x, T::zero(), band));
        }
        let eps = (lo + hi) * T::lit(0.5);
        self.guard(&Strip::new(lo, hi), eps)?;
        period_mean(self.params().quad_points(), T::zero(), -eps, |z| Ok(f.eval(x - z)? * g.eval(z)?))
    }

    /// |Δ(f⊛₊g)(x) − (Δf⊛₊g)(x) − 2πi·Res_{z=τ}[f(z)g(x+τ−z)]|.
    pub fn product_rule_residual(&self, f: &PeriodicFunction<T>, g: &PeriodicFunction<T>, x: Complex<T>) -> Result<T> {
        let params = self.params();
        params.check_off_lattice(x)?;
        let tau = params.tau();
        let lhs = self.conv_plus(f, g, x + tau)? - self.conv_plus(f, g, x)?;
        let df = self.difference(f);
        let radius = params.min_lattice_gap().min(params.lattice_distance(x)) * T::lit(0.5);
        let opts = LaurentOptions {
            max_order: 1,
            regular_terms: 0,
            radius: Some(radius),
            nodes: params.laurent_nodes(),
            halving_tol: None,
        };
        let residue = extract_laurent(params, |z| Ok(f.eval(z)? * g.eval(x + tau - z)?), tau, opts)?.residue();
        let rhs = self.conv_plus(&df, g, x)? + two_pi_i::<T>() * residue;
        Ok((lhs - rhs).norm())
    }

    /// d/dx of a function by Cauchy differentiation with the configured
    /// node count; the radius must keep the circle inside the function's strip.
    pub fn derivative(&self, f: &PeriodicFunction<T>, x: Complex<T>, k: u32, radius: T) -> Result<Complex<T>> {
        cauchy_derivative(x, k, radius, self.params().derivative_nodes(), |z| f.eval(z))
    }
}

/// Height of the g-contour when evaluating (f⊛₊g) at height y, proportional
/// to the widths of the two upper strips.
fn split_height<T: Real>(sf: &Strip<T>, sg: &Strip<T>, y: T) -> T {
    let lf = sf.lo.max(T::zero());
    let lg = sg.lo.max(T::zero());
    match (sf.is_bounded(), sg.is_bounded()) {
        (true, true) => {
            let (wf, wg) = (sf.hi - lf, sg.hi - lg);
            lg + (y - lf - lg) * wg / (wf + wg)
        }
        (false, true) => (lg + sg.hi) * T::lit(0.5),
        (true, false) => y - (lf + sf.hi) * T::lit(0.5),
        (false, false) => y * T::lit(0.5),
    }
}

/// c[s] = Σ_j a[j]·b[(s − j) mod N].
fn cyclic_convolution<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = a.len();
    (0..n)
        .map(|s| {
            (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + a[j] * b[(s + n - j) % n])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::delta_z;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn conv() -> Convolver<f64> {
        Convolver::new(TorusParams::square()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn strip_points(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| c(rng.gen_range(0.0..1.0), rng.gen_range(lo..hi))).collect()
    }

    #[test]
    fn constants() {
        let cv = conv();
        let one = PeriodicFunction::constant(c(1.0, 0.0));
        let v = cv.conv_plus(&one, &one, c(0.3, 0.7)).unwrap();
        assert!((v - 1.0).norm() < 1e-14);
        for x in strip_points(1, 5, 0.15, 1.85) {
            let v = cv.conv_plus(&one, &cv.z(), x).unwrap();
            assert!((v - delta_z::<f64>() / 2.0).norm() < 1e-9, "{x}: {v}");
        }
    }

    #[test]
    fn z_conv_z_matches_kernel_listing() {
        let cv = conv();
        let th = cv.weierstrass().theta().clone();
        let dz = delta_z::<f64>();
        for x in strip_points(2, 20, 0.15, 1.85) {
            let v = cv.conv_plus(&cv.z(), &cv.z(), x).unwrap();
            let g = th.g_kernels(x, 2).unwrap();
            let expect = -g[2] + dz * g[1] - dz * dz / 6.0;
            assert!((v - expect).norm() < 1e-8, "{x}: {v} vs {expect}");
        }
    }

    #[test]
    fn symmetric_split_and_commutativity() {
        let cv = conv();
        let (z, wp) = (cv.z(), cv.wp());
        for x in strip_points(3, 10, 0.2, 1.8) {
            let a = cv.conv_plus(&z, &wp, x).unwrap();
            let b = cv.conv_plus(&wp, &z, x).unwrap();
            assert!((a - b).norm() < 1e-9);
            // any split y₁ + y₂ = Im x inside both strips
            let h = (x.im - 0.5).clamp(0.1, 0.9).max(x.im * 0.5 - 0.2);
            let s = cv.conv_plus_split(&z, &wp, x, h).unwrap();
            assert!((a - s).norm() < 1e-9);
        }
    }

    #[test]
    fn strip_and_guard_errors() {
        let cv = conv();
        let z = cv.z();
        assert!(matches!(cv.conv_plus(&z, &z, c(0.2, 2.3)), Err(Error::StripViolation { .. })));
        assert!(matches!(cv.conv_plus(&z, &z, c(0.2, -0.3)), Err(Error::StripViolation { .. })));
        assert!(matches!(cv.conv_plus(&z, &z, c(0.2, 0.05)), Err(Error::ContourTooClose { .. })));
        assert!(cv.conv_nfold(&[z], c(0.2, 0.5)).is_err());
    }

    #[test]
    fn nfold_agrees_with_pairwise() {
        let cv = conv();
        let z = cv.z();
        let x = c(0.31, 0.83);
        let a = cv.conv_nfold(&[z.clone(), z.clone()], x).unwrap();
        let b = cv.conv_plus(&z, &z, x).unwrap();
        assert!((a - b).norm() < 1e-9);
        let zz = cv.convolved(&z, &z).unwrap();
        let three = cv.conv_nfold(&[z.clone(), z.clone(), z.clone()], c(0.27, 1.4)).unwrap();
        let iterated = cv.conv_plus_split(&zz, &z, c(0.27, 1.4), 1.4 / 3.0).unwrap();
        assert!((three - iterated).norm() < 1e-9);
    }

    #[test]
    fn triple_convolution_regular_at_tau_multiples() {
        let cv = conv();
        let z = cv.z();
        let fs = [z.clone(), z.clone(), z];
        for m in [1.0, 2.0] {
            let v = cv.conv_nfold(&fs, c(0.0, m)).unwrap();
            assert!(v.norm().is_finite());
        }
    }

    #[test]
    fn fubini() {
        let cv = conv();
        let dz = delta_z::<f64>();
        let one = PeriodicFunction::constant(c(1.0, 0.0));
        for n in 1..=4usize {
            let mut fs = vec![one.clone()];
            fs.extend(std::iter::repeat_n(cv.z(), n));
            let x = c(0.17, 0.6 * (n + 1) as f64);
            let v = cv.conv_nfold(&fs, x).unwrap();
            let expect = (dz / 2.0).powi(n as i32);
            assert!((v - expect).norm() < 1e-8, "n = {n}: {v} vs {expect}");
        }
    }

    #[test]
    fn associativity() {
        let cv = conv();
        let z = cv.z();
        let zz = cv.convolved(&z, &z).unwrap();
        for x in strip_points(4, 4, 0.3, 2.7) {
            let left = cv.convolved(&zz, &z).unwrap().eval(x).unwrap();
            let right = cv.convolved(&z, &zz).unwrap().eval(x).unwrap();
            assert!((left - right).norm() < 1e-7, "{x}: {left} vs {right}");
        }
    }

    #[test]
    fn star_minus_plus_is_residue() {
        let cv = conv();
        let z = cv.z();
        let w = cv.weierstrass();
        for x in [c(0.23, 0.2), c(0.61, 0.35), c(0.8, 0.12)] {
            let star = cv.conv_star(&z, &z, x).unwrap();
            let plus = cv.conv_plus(&z, &z, x).unwrap();
            let expect = two_pi_i::<f64>() * w.zeta_e(x).unwrap();
            assert!((star - plus - expect).norm() < 1e-7, "{x}");
        }
        // real x: finite
        assert!(cv.conv_star(&z, &z, c(0.4, 0.0)).unwrap().norm().is_finite());
    }

    #[test]
    fn star_equals_plus_without_residue() {
        let cv = conv();
        let one = PeriodicFunction::constant(c(1.0, 0.0));
        let g2 = cv.kernel(2);
        let x = c(0.37, 0.25);
        let a = cv.conv_star(&one, &g2, x).unwrap();
        let b = cv.conv_plus(&one, &g2, x).unwrap();
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn product_rule() {
        let cv = conv();
        let (z, wp) = (cv.z(), cv.wp());
        let one = PeriodicFunction::constant(c(1.0, 0.0));
        for x in [c(0.3, 0.4), c(0.72, 0.55)] {
            assert!(cv.product_rule_residual(&z, &z, x).unwrap() < 1e-7);
            assert!(cv.product_rule_residual(&one, &z, x).unwrap() < 1e-10);
            assert!(cv.product_rule_residual(&z, &wp, x).unwrap() < 1e-6);
        }
    }

    #[test]
    fn derivative_commutes() {
        let cv = conv();
        let (z, zp) = (cv.z(), cv.z_prime());
        let zz = cv.convolved(&z, &z).unwrap();
        let x = c(0.41, 0.9);
        let d = cv.derivative(&zz, x, 1, 0.3).unwrap();
        let v = cv.conv_plus(&zp, &z, x).unwrap();
        assert!((d - v).norm() < 1e-7, "{d} vs {v}");
    }

    #[test]
    fn doubling_nodes_converges() {
        let p = TorusParams::square();
        let a = Convolver::new(p.clone().with_quad_points(128).unwrap()).unwrap();
        let b = Convolver::new(p.with_quad_points(256).unwrap()).unwrap();
        let x = c(0.2, 1.0);
        let va = a.conv_plus(&a.z(), &a.wp(), x).unwrap();
        let vb = b.conv_plus(&b.z(), &b.wp(), x).unwrap();
        assert!((va - vb).norm() < 1e-11);
    }

    #[test]
    fn ledger_minkowski_sum() {
        let p = TorusParams::<f64>::square();
        let lat = [PoleEntry::lattice(1)];
        assert_eq!(pole_ledger_conv(&p, &lat, &lat), vec![PoleEntry::lattice(1)]);
        let a = [PoleEntry { location: PoleLocation::Torus(c(0.25, 0.1)), max_order: 1 }];
        let b = [PoleEntry { location: PoleLocation::Torus(c(0.5, 0.3)), max_order: 2 }];
        let r = pole_ledger_conv(&p, &a, &b);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].max_order, 2);
        match r[0].location {
            PoleLocation::Torus(s) => assert!((s - c(0.75, 0.4)).norm() < 1e-12),
            PoleLocation::Lattice => panic!("expected torus point"),
        }
        let neg = [PoleEntry { location: PoleLocation::Torus(p.reduce_mod_lattice(c(-0.25, -0.1))), max_order: 1 }];
        assert_eq!(pole_ledger_conv(&p, &a, &neg)[0].location, PoleLocation::Lattice);
        assert!(pole_ledger_conv(&p, &lat, &[]).is_empty());
    }

    #[test]
    fn convolved_strips_add() {
        let cv = conv();
        let z = cv.z();
        let zz = cv.convolved(&z, &z).unwrap();
        assert_eq!(zz.valid_strips(), &[Strip::new(0.0, 2.0)]);
        let d = cv.difference(&zz);
        assert_eq!(d.valid_strips(), &[Strip::new(0.0, 1.0)]);
        assert!(zz.poles_on_lattice());
        let zzz = cv.convolved(&zz, &z).unwrap();
        assert_eq!(zzz.valid_strips(), &[Strip::new(0.0, 3.0)]);
        assert!(zzz.eval(c(0.3, 2.5)).is_ok());
    }
}
