//! The polynomials pₙ(x) = Σₖ (−1)^{k−1}(k−1)!/(n−1)!·S(n,k)·xᵏ.
//!
//! They are the rows of the C matrix at ΔZ = 1 and the Taylor coefficients
//! in y of G(x, y) = x·eʸ/(1 − x + x·eʸ). Zeros are simple, lie in [0, 1]
//! and interlace between consecutive n; they are isolated here with exact
//! sign evaluation.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{bernoulli_number, factorial, stirling_second_int, RationalPolynomial};
use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Real};

/// Bisection stops once a bracket is narrower than this fraction of its
/// distance to the nearer end of [0, 1].
const RELATIVE_WIDTH_BITS: usize = 56;

/// Direct terms and Bernoulli corrections in the Hurwitz zeta sum.
const HURWITZ_DIRECT_TERMS: usize = 50;
const HURWITZ_CORRECTIONS: usize = 8;

/// pₙ with its index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnPolynomial {
    pub n: usize,
    pub poly: RationalPolynomial,
}

impl PnPolynomial {
    pub fn eval<T: Real>(&self, x: T) -> T {
        self.poly.eval(&x)
    }

    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        self.poly.eval(x)
    }
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// pₙ from Stirling numbers of the second kind.
pub fn p_poly(n: usize) -> Result<PnPolynomial> {
    if n == 0 {
        return Err(Error::OutOfRange("pₙ needs n ≥ 1".into()));
    }
    let denom = rat(factorial(n as u64 - 1));
    let mut coeffs = vec![BigRational::zero(); n + 1];
    for (k, c) in coeffs.iter_mut().enumerate().skip(1) {
        let v = rat(factorial(k as u64 - 1) * stirling_second_int(n, k)) / &denom;
        *c = if k % 2 == 1 { v } else { -v };
    }
    Ok(PnPolynomial { n, poly: RationalPolynomial::new(coeffs) })
}

/// p_{n+1} = x(1−x)pₙ′/n.
pub fn p_next(p: &PnPolynomial) -> PnPolynomial {
    let x_one_minus_x = RationalPolynomial::from_integers(&[0, 1, -1]);
    let scale = BigRational::new(BigInt::one(), BigInt::from(p.n));
    PnPolynomial { n: p.n + 1, poly: (&x_one_minus_x * &p.poly.derivative()).scale(&scale) }
}

/// Exact verdict on pₙ(1 − x) = (−1)ⁿpₙ(x).
pub fn p_symmetry_check(n: usize) -> Result<bool> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("reflection symmetry holds from n = 2, got n = {n}")));
    }
    let p = p_poly(n)?;
    let reflected = p.poly.compose(&RationalPolynomial::from_integers(&[1, -1]));
    let expect = if n.is_multiple_of(2) { p.poly.clone() } else { -&p.poly };
    Ok(reflected == expect)
}

/// Exact verdict on pₙ(1/2) = (−1)ⁿ(2ⁿ − 1)Bₙ/n! for n ≥ 2 and p₁(1/2) = 1/2.
pub fn p_half_check(n: usize) -> Result<bool> {
    let p = p_poly(n)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let lhs = p.eval_exact(&half);
    if n == 1 {
        return Ok(lhs == half);
    }
    let pow = rat((BigInt::one() << n) - 1);
    let mut rhs = pow * bernoulli_number(n) / rat(factorial(n as u64));
    if n % 2 == 1 {
        rhs = -rhs;
    }
    Ok(lhs == rhs)
}

/// Exact interval [lo, hi] holding one simple zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootBracket {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootBracket {
    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    /// The dyadic rational with the fewest bits in [lo, hi].
    pub fn shortest_inner_point(&self) -> BigRational {
        match (Dyadic::from_rational(&self.lo), Dyadic::from_rational(&self.hi)) {
            (Some(l), Some(h)) => {
                let e = l.exp.max(h.exp);
                let (a, b) = (l.rescaled(e), h.rescaled(e));
                for k in 0..=e {
                    let shift = e - k;
                    // ⌈a / 2^shift⌉
                    let c: BigInt = -((-&a) >> shift);
                    if (&c << shift) <= b {
                        return Dyadic { num: c, exp: k }.to_rational();
                    }
                }
                self.lo.clone()
            }
            _ => self.lo.clone(),
        }
    }

    pub fn midpoint(&self) -> f64 {
        rational_to_f64(&((&self.lo + &self.hi) / rat(BigInt::from(2))))
    }
}

/// Interior zeros of pₙ for every level, obtained from the previous level's
/// zeros as brackets.
#[derive(Debug, Clone)]
pub struct ZeroLevels {
    /// levels[n] holds the interior zeros of pₙ (n ≥ 2); levels 0 and 1 are empty.
    levels: Vec<Vec<RootBracket>>,
}

impl ZeroLevels {
    pub fn compute(n_max: usize) -> Result<Self> {
        let mut levels: Vec<Vec<RootBracket>> = vec![Vec::new(); n_max.max(2) + 1];
        for n in 3..=n_max {
            let q = interior_factor(n)?;
            let prev = &levels[n - 1];
            let zero = BigRational::zero();
            let one = BigRational::one();
            let mut out = Vec::with_capacity(n - 2);
            // one short dyadic inside each previous bracket keeps the bit
            // length from accumulating across levels
            let cuts: Vec<BigRational> = prev.iter().map(RootBracket::shortest_inner_point).collect();
            for j in 0..=prev.len() {
                let lo = if j == 0 { &zero } else { &cuts[j - 1] };
                let hi = if j == prev.len() { &one } else { &cuts[j] };
                let b = isolate(&q, lo, hi).map_err(|detail| Error::BracketFailure {
                    n,
                    index: j,
                    detail,
                })?;
                out.push(b);
            }
            levels[n] = out;
        }
        Ok(Self { levels })
    }

    pub fn n_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn interior(&self, n: usize) -> &[RootBracket] {
        &self.levels[n]
    }

    /// All zeros of pₙ ascending, endpoints exact.
    pub fn zeros(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![0.0],
            _ => std::iter::once(0.0)
                .chain(self.levels[n].iter().map(RootBracket::midpoint))
                .chain(std::iter::once(1.0))
                .collect(),
        }
    }

    /// Strict interlacing of the exact brackets of levels n and n + 1.
    pub fn interlaced(&self, n: usize) -> bool {
        if n < 2 || n + 1 > self.n_max() {
            return n == 1;
        }
        let (a, b) = (&self.levels[n], &self.levels[n + 1]);
        if b.len() != a.len() + 1 {
            return false;
        }
        let ordered = |v: &[RootBracket]| v.windows(2).all(|w| w[0].hi < w[1].lo);
        ordered(a)
            && ordered(b)
            && b.iter().all(|r| r.lo > BigRational::zero() && r.hi < BigRational::one())
            && a.iter().enumerate().all(|(j, r)| b[j].hi < r.lo && r.hi < b[j + 1].lo)
    }
}

/// Integer polynomial with the sign pattern of pₙ/(x(1−x)) on (0, 1).
fn interior_factor(n: usize) -> Result<Vec<BigInt>> {
    let p = p_poly(n)?;
    let (q, r) = p.poly.div_rem(&RationalPolynomial::from_integers(&[0, 1, -1]));
    debug_assert!(r.is_zero());
    Ok(q.primitive_integer())
}

/// Dyadic rational num/2^exp.
#[derive(Debug, Clone)]
struct Dyadic {
    num: BigInt,
    exp: usize,
}

impl Dyadic {
    fn from_rational(r: &BigRational) -> Option<Self> {
        let d = r.denom();
        let exp = d.trailing_zeros().unwrap_or(0) as usize;
        (*d == BigInt::one() << exp).then(|| Self { num: r.numer().clone(), exp })
    }

    fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp)
    }

    fn rescaled(&self, exp: usize) -> BigInt {
        &self.num << (exp - self.exp)
    }
}

/// Sign of Σ qₖ xᵏ at x = a/2^e, from Σ qₖ aᵏ 2^{e(d−k)}.
fn dyadic_sign(q: &[BigInt], a: &BigInt, e: usize) -> i8 {
    let mut it = q.iter().rev();
    let Some(lead) = it.next() else {
        return 0;
    };
    let mut acc = lead.clone();
    for (step, c) in it.enumerate() {
        acc = acc * a + (c << (e * (step + 1)));
    }
    if acc.is_positive() {
        1
    } else if acc.is_negative() {
        -1
    } else {
        0
    }
}

/// Bisection on a sign change of q inside (lo, hi), exact at every node.
fn isolate(q: &[BigInt], lo: &BigRational, hi: &BigRational) -> std::result::Result<RootBracket, String> {
    let describe = || format!("[{}, {}]", rational_to_f64(lo), rational_to_f64(hi));
    let (Some(dl), Some(dh)) = (Dyadic::from_rational(lo), Dyadic::from_rational(hi)) else {
        return Err(format!("non-dyadic bracket {}", describe()));
    };
    let mut e = dl.exp.max(dh.exp);
    let (mut a, mut b) = (dl.rescaled(e), dh.rescaled(e));
    let s_lo = dyadic_sign(q, &a, e);
    let s_hi = dyadic_sign(q, &b, e);
    if s_lo == 0 || s_hi == 0 {
        return Err(format!("zero at an end of {}", describe()));
    }
    if s_lo == s_hi {
        return Err(format!("no sign change on {}", describe()));
    }
    // the width test is relative to the distance from the ends of [0, 1],
    // since zeros of large n come exponentially close to them
    loop {
        let one = BigInt::one() << e;
        let near = (&a).min(&(&one - &b)).clone();
        if (&b - &a) << RELATIVE_WIDTH_BITS <= near {
            let lo = Dyadic { num: a, exp: e }.to_rational();
            let hi = Dyadic { num: b, exp: e }.to_rational();
            return Ok(RootBracket { lo, hi });
        }
        e += 1;
        a <<= 1;
        b <<= 1;
        let m = (&a + &b) >> 1;
        match dyadic_sign(q, &m, e) {
            0 => return Ok(RootBracket::point(Dyadic { num: m, exp: e }.to_rational())),
            s if s == s_lo => a = m,
            _ => b = m,
        }
    }
}

/// All zeros of pₙ in ascending order.
pub fn p_zeros(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::OutOfRange("pₙ needs n ≥ 1".into()));
    }
    Ok(ZeroLevels::compute(n)?.zeros(n))
}

/// y₀(x) = log((1 − x)/x) + iπ, the pole of G(x, ·) nearest the origin.
pub fn y0(x: f64) -> Complex<f64> {
    Complex::new(((1.0 - x) / x).ln(), std::f64::consts::PI)
}

/// Zero density ρ(x) = 1/(x(1 − x)|y₀|²) on (0, 1).
pub fn rho(x: f64) -> f64 {
    1.0 / (x * (1.0 - x) * y0(x).norm_sqr())
}

/// ∫₀ˣ ρ = 1/2 − arctan(log((1 − x)/x)/π)/π; the total mass is 1.
pub fn rho_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    0.5 - (((1.0 - x) / x).ln() / std::f64::consts::PI).atan() / std::f64::consts::PI
}

/// Kolmogorov–Smirnov distance between the interior zeros of pₙ and ρ.
pub fn zero_density_compare(n: usize) -> Result<f64> {
    let levels = ZeroLevels::compute(n)?;
    Ok(ks_distance(&levels.zeros(n)[1..n.max(2) - 1]))
}

/// Kolmogorov–Smirnov distance of an ascending sample from [`rho_cdf`].
pub fn ks_distance(sorted: &[f64]) -> f64 {
    let m = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = rho_cdf(x);
        d.max((i as f64 + 1.0) / m - f).max(f - i as f64 / m)
    })
}

/// Histogram of the interior zeros of pₙ on `bins` equal cells of (0, 1),
/// with the ρ mass of each cell, as (left edge, count / total, ρ mass).
pub fn zero_histogram(zeros: &[f64], bins: usize) -> Vec<(f64, f64, f64)> {
    let interior: Vec<f64> = zeros.iter().copied().filter(|&x| x > 0.0 && x < 1.0).collect();
    let total = interior.len().max(1) as f64;
    (0..bins)
        .map(|b| {
            let (a, c) = (b as f64 / bins as f64, (b + 1) as f64 / bins as f64);
            let count = interior.iter().filter(|&&x| x >= a && x < c).count() as f64;
            (a, count / total, rho_cdf(c) - rho_cdf(a))
        })
        .collect()
}

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0}(k + a)^{−s} for integer s ≥ 2, by direct
/// summation followed by an Euler–Maclaurin tail.
pub fn hurwitz_zeta<T: Real>(s: u32, a: Complex<T>) -> Result<Complex<T>> {
    if s < 2 {
        return Err(Error::OutOfRange(format!("Hurwitz zeta needs s ≥ 2, got {s}")));
    }
    if a.im == T::zero() && a.re <= T::zero() && a.re == a.re.round() {
        return Err(Error::HurwitzPole(a.re.to_f64().unwrap_or(f64::NAN)));
    }
    let si = s as i32;
    let mut sum = Complex::new(T::zero(), T::zero());
    for k in 0..HURWITZ_DIRECT_TERMS {
        sum = sum + (a + T::from_usize_lossy(k)).powi(-si);
    }
    let w = a + T::from_usize_lossy(HURWITZ_DIRECT_TERMS);
    let st = T::lit(s as f64);
    sum = sum + w.powi(1 - si) / (st - T::one()) + w.powi(-si) * T::lit(0.5);
    // Σ B_{2j}/(2j)!·s(s+1)⋯(s+2j−2)·w^{−s−2j+1}
    let mut rising = st;
    let mut fact = T::lit(2.0);
    for j in 1..=HURWITZ_CORRECTIONS {
        let b: T = crate::scalar::rational_to_real(&bernoulli_number(2 * j));
        sum = sum + w.powi(-si - 2 * j as i32 + 1) * (b / fact * rising);
        let (p, q) = (T::lit((2 * j) as f64), T::lit((2 * j + 1) as f64));
        rising = rising * (st + p - T::one()) * (st + p);
        fact = fact * q * (q + T::one());
    }
    Ok(sum)
}

/// Right-hand side −(2πi)^{−n}{ζ(n, a) + (−1)ⁿζ(n, 1 − a)} with a = y₀/(2πi).
pub fn p_hurwitz_value(n: usize, x: f64) -> Result<Complex<f64>> {
    let two_pi_i = Complex::new(0.0, std::f64::consts::TAU);
    let a = y0(x) / two_pi_i;
    let z1 = hurwitz_zeta(n as u32, a)?;
    let z2 = hurwitz_zeta(n as u32, Complex::new(1.0, 0.0) - a)?;
    let sgn = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(-(z1 + z2 * sgn) / two_pi_i.powi(n as i32))
}

/// |pₙ(x) − Hurwitz representation| for x ∈ (0, 1), n ≥ 2.
pub fn p_hurwitz_check(n: usize, x: f64) -> Result<f64> {
    if n < 2 || !(x > 0.0 && x < 1.0) {
        return Err(Error::OutOfRange(format!("Hurwitz form needs n ≥ 2 and 0 < x < 1, got n = {n}, x = {x}")));
    }
    let p: f64 = p_poly(n)?.eval(x);
    Ok((p_hurwitz_value(n, x)? - p).norm())
}

/// Outcome of comparing (−1)ⁿ/n!·Li₋ₙ(x) with p_{n+1}(1/(1 − x)) exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolylogCheck {
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl PolylogCheck {
    pub fn residual(&self) -> BigRational {
        (&self.lhs - &self.rhs).abs()
    }

    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Li₋ₙ(x) as an exact rational: (x·d/dx)ⁿ applied to x/(1 − x), carried
/// as N(x)/(1 − x)^k.
pub fn polylog_neg(n: usize, x: &BigRational) -> Result<BigRational> {
    let one = BigRational::one();
    if *x == one {
        return Err(Error::OutOfRange("Li₋ₙ has a pole at x = 1".into()));
    }
    let mut num = RationalPolynomial::from_integers(&[0, 1]);
    let mut k: i64 = 1;
    let one_minus = RationalPolynomial::from_integers(&[1, -1]);
    let xpoly = RationalPolynomial::from_integers(&[0, 1]);
    for _ in 0..n {
        // x·d/dx [N/(1−x)^k] = x[N′(1−x) + kN]/(1−x)^{k+1}
        let inner = &(&num.derivative() * &one_minus) + &num.scale(&rat(BigInt::from(k)));
        num = &xpoly * &inner;
        k += 1;
    }
    let denom = (&one - x).pow(k as i32);
    Ok(num.eval(x) / denom)
}

pub fn polylog_neg_check(n: usize, x: &BigRational) -> Result<PolylogCheck> {
    let li = polylog_neg(n, x)?;
    let mut lhs = li / rat(factorial(n as u64));
    if n % 2 == 1 {
        lhs = -lhs;
    }
    let u = BigRational::one() / (BigRational::one() - x);
    let rhs = p_poly(n + 1)?.eval_exact(&u);
    Ok(PolylogCheck { lhs, rhs })
}

/// G(x, y) = x·eʸ/(1 − x + x·eʸ).
pub fn generating_function(x: f64, y: f64) -> f64 {
    let e = y.exp();
    x * e / (1.0 - x + x * e)
}

/// Σ_{n=1}^{N} pₙ(x)·y^{n−1}.
pub fn generating_partial_sum(x: f64, y: f64, terms: usize) -> Result<f64> {
    let mut p = p_poly(1)?;
    let mut acc = 0.0;
    let mut ypow = 1.0;
    for _ in 0..terms {
        acc += p.eval(x) * ypow;
        ypow *= y;
        p = p_next(&p);
    }
    Ok(acc)
}
