//! Named verification suites.
//!
//! Every numeric check draws its sample points from a ChaCha8 stream keyed by
//! the global seed and the check id, so adding or reordering checks never
//! changes the points another check sees.

use std::sync::Arc;

use num_traits::{One, Zero};
use qetorus::basis_change::{
    coeff_C, coeff_C0, coeff_C_closed_sum, coeff_c, coeff_c0, coeff_c0_recursive, kernel_residue_exact, matrix_inverse_check,
    residue_poly_V,
};
use qetorus::combinatorics::{bernoulli_number, factorial, ratio, GradedRational};
use qetorus::conv_polynomials::{
    generating_function, generating_partial_sum, p_half_check, p_hurwitz_check, p_next, p_symmetry_check,
    polylog_neg_check, zero_density_compare,
};
use qetorus::quadrature::{cauchy_derivative, period_mean};
use qetorus::scalar::{delta_z, rational_to_f64, two_pi_i};
use qetorus::{
    p_poly, BasisChange, BigRational, Convolver, LaurentOptions, PeriodicFunction, Torus64, Weierstrass64, ZeroLevels, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{Check, Observation};

pub const SUITES: [&str; 6] = ["theta", "weierstrass", "kernels", "convolution", "basis", "polynomials"];

/// Shared evaluators for one verification run.
pub struct Ctx {
    pub params: Torus64,
    pub seed: u64,
    pub wei: Arc<Weierstrass64>,
    pub conv: Convolver<f64>,
    pub basis: Arc<BasisChange<f64>>,
}

#[derive(Debug, Default)]
pub struct SuiteOutput {
    pub checks: Vec<Check>,
    pub observations: Vec<Observation>,
}

impl SuiteOutput {
    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }
}

/// FNV-1a, used only to derive a stream number from a check id.
fn stream_id(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Largest value, with NaN winning so that a broken sample cannot hide.
fn worst(acc: f64, v: f64) -> f64 {
    if acc.is_nan() || v.is_nan() {
        f64::NAN
    } else {
        acc.max(v)
    }
}

fn max_over<I, F>(items: I, mut f: F) -> qetorus::Result<f64>
where
    I: IntoIterator,
    F: FnMut(I::Item) -> qetorus::Result<f64>,
{
    items.into_iter().try_fold(0.0, |acc, x| Ok(worst(acc, f(x)?)))
}

fn rel(err: C64, scale: C64) -> f64 {
    err.norm() / scale.norm().max(1.0)
}

fn graded(c: (i64, i64), p: u32) -> GradedRational {
    GradedRational::new(ratio(c.0, c.1), p)
}

impl Ctx {
    pub fn new(params: Torus64, seed: u64) -> qetorus::Result<Self> {
        let wei = Arc::new(Weierstrass64::new(params.clone())?);
        let conv = Convolver::from_weierstrass(Arc::clone(&wei));
        let basis = Arc::new(BasisChange::new(Arc::clone(&wei)));
        Ok(Self { params, seed, wei, conv, basis })
    }

    pub fn rng(&self, id: &str) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream_id(id));
        rng
    }

    /// Points u + v·τ with u ∈ [0, 1), v ∈ [lo, hi), at least `clearance`
    /// (in units of min(1, Im τ)) away from Λ.
    pub fn points(&self, id: &str, count: usize, lo: f64, hi: f64, clearance: f64) -> Vec<C64> {
        let mut rng = self.rng(id);
        let tau = self.params.tau();
        let min_dist = clearance * self.params.min_lattice_gap().min(1.0);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let x = C64::new(rng.gen_range(0.0..1.0), 0.0) + tau * rng.gen_range(lo..hi);
            if self.params.lattice_distance(x) >= min_dist {
                out.push(x);
            }
        }
        out
    }

    fn tau(&self) -> C64 {
        self.params.tau()
    }

    fn is_square(&self) -> bool {
        (self.tau() - C64::new(0.0, 1.0)).norm() < 1e-15
    }
}

pub fn run_suite(name: &str, ctx: &Ctx) -> Result<SuiteOutput, String> {
    let mut out = SuiteOutput::default();
    match name {
        "theta" => theta(ctx, &mut out),
        "weierstrass" => weierstrass(ctx, &mut out),
        "kernels" => kernels(ctx, &mut out),
        "convolution" => convolution(ctx, &mut out),
        "basis" => basis(ctx, &mut out),
        "polynomials" => polynomials(&mut out),
        "all" => {
            for s in SUITES {
                let part = run_suite(s, ctx)?;
                out.checks.extend(part.checks);
                out.observations.extend(part.observations);
            }
        }
        other => return Err(format!("unknown suite `{other}`; expected one of {}, all", SUITES.join(", "))),
    }
    Ok(out)
}

fn theta(ctx: &Ctx, out: &mut SuiteOutput) {
    let th = ctx.wei.theta();
    let tau = ctx.tau();

    out.push(Check::residual("theta.zero", "θ(0) = 0", th.theta(C64::default()).norm(), 1e-15));

    let pts = ctx.points("theta.odd", 20, -0.5, 0.5, 0.1);
    let r = max_over(&pts, |&x| {
        let t = th.theta(x);
        Ok(rel(th.theta(-x) + t, t))
    });
    out.push(Check::from_result("theta.odd", "θ(−x) = −θ(x)", r, 1e-12));

    let pts = ctx.points("theta.real_period", 20, -0.5, 0.5, 0.1);
    let r = max_over(&pts, |&x| {
        let t = th.theta(x);
        Ok(rel(th.theta(x + 1.0) + t, t))
    });
    out.push(Check::from_result("theta.real_period", "θ(x + 1) = −θ(x)", r, 1e-12));

    let h = 1e-5;
    let fd = (th.theta(C64::new(h, 0.0)) - th.theta(C64::new(-h, 0.0))) / (2.0 * h);
    let tp = th.theta_prime_zero();
    out.push(Check::residual("theta.prime_zero", "θ′(0) = lim (θ(h) − θ(−h))/2h", (fd - tp).norm() / tp.norm(), 1e-9));

    let mut rng = ctx.rng("ek.quasi_period");
    let pts = ctx.points("ek.quasi_period.x", 20, -0.5, 0.5, 0.15);
    let r = max_over(&pts, |&x| {
        let y = C64::new(rng.gen_range(0.1..0.9), 0.0) + tau * rng.gen_range(-0.4..0.4);
        let f = th.eisenstein_kronecker(x, y)?;
        let shifted = th.eisenstein_kronecker(x + tau, y)?;
        Ok((shifted - f * (-two_pi_i::<f64>() * y).exp()).norm())
    });
    out.push(Check::from_result("ek.quasi_period", "F(x + τ, y) = e^{−2πiy}F(x, y)", r, 1e-9));

    let xs = ctx.points("ek.symmetry.x", 20, -0.5, 0.5, 0.15);
    let ys = ctx.points("ek.symmetry.y", 20, -0.5, 0.5, 0.15);
    let r = max_over(xs.iter().zip(&ys), |(&x, &y)| {
        Ok((th.eisenstein_kronecker(x, y)? - th.eisenstein_kronecker(y, x)?).norm())
    });
    out.push(Check::from_result("ek.symmetry", "F(x, y) = F(y, x)", r, 1e-10));

    let ys = ctx.points("ek.residue", 5, -0.4, 0.4, 0.15);
    let opts = LaurentOptions { max_order: 1, regular_terms: 0, ..Default::default() };
    let r = max_over(&ys, |&y| {
        let l = ctx.wei.laurent(|x| th.eisenstein_kronecker(x, y), C64::default(), opts)?;
        Ok((l.residue() - 1.0).norm())
    });
    out.push(Check::from_result("ek.residue", "Res_{x=0} F(x, y) = 1", r, 1e-9));

    let pts = ctx.points("g.zero", 10, -0.5, 0.5, 0.1);
    let r = max_over(&pts, |&x| Ok((th.g_kernel(0, x)? - 1.0).norm()));
    out.push(Check::from_result("g.zero", "g⁽⁰⁾ = 1", r, 1e-12));

    let pts = ctx.points("g.one", 10, -0.5, 0.5, 0.1);
    let r = max_over(&pts, |&x| {
        let z = ctx.wei.zeta_e(x)?;
        Ok(rel(th.g_kernel(1, x)? - z, z))
    });
    out.push(Check::from_result("g.one", "g⁽¹⁾ = Z", r, 1e-10));
}

fn weierstrass(ctx: &Ctx, out: &mut SuiteOutput) {
    let w = &ctx.wei;
    let tau = ctx.tau();

    let pts = ctx.points("Z.period_tau", 50, -0.5, 0.5, 0.1);
    let r = max_over(&pts, |&x| Ok((w.zeta_e(x + tau)? - w.zeta_e(x)? + two_pi_i::<f64>()).norm()));
    out.push(Check::from_result("Z.period_tau", "Z(x + τ) − Z(x) = −2πi", r, 1e-10));

    let pts = ctx.points("Z.period_one", 50, -0.5, 0.5, 0.1);
    let r = max_over(&pts, |&x| Ok((w.zeta_e(x + 1.0)? - w.zeta_e(x)?).norm()));
    out.push(Check::from_result("Z.period_one", "Z(x + 1) = Z(x)", r, 1e-10));

    let r = w.zeta_e(C64::new(0.5, 0.0)).map(|z| z.norm());
    out.push(Check::from_result("Z.half_period", "Z(1/2) = 0", r, 1e-10));

    let r = w.laurent(|x| w.zeta_e(x), C64::default(), LaurentOptions::default()).map(|l| (l.residue() - 1.0).norm());
    out.push(Check::from_result("Z.residue", "Res_{x=0} Z = 1", r, 1e-10));

    let pts = ctx.points("wp.cubic", 100, -0.5, 0.5, 0.1);
    let r = max_over(&pts, |&x| Ok(w.cubic_residual(x)?.norm()));
    out.push(Check::from_result("wp.cubic", "℘′² = 4(℘³ − 15e₄℘ − 30e₆)", r, 1e-8));

    let pts = ctx.points("wp.derivative", 10, -0.5, 0.5, 0.15);
    let r = max_over(&pts, |&x| {
        let d = cauchy_derivative(x, 1, 0.05, 64, |z| w.zeta_e(z))?;
        let p = w.wp(x)?;
        Ok(rel(d + p + w.e2(), p))
    });
    out.push(Check::from_result("wp.derivative", "Z′ = −℘ − e₂", r, 1e-9));

    let pts = ctx.points("wp.periods", 20, -0.5, 0.5, 0.1);
    let r = max_over(&pts, |&x| {
        let p = w.wp(x)?;
        let a = (w.wp(x + 1.0)? - p).norm();
        let b = (w.wp(x + tau)? - p).norm();
        let c = (w.wp(-x)? - p).norm();
        Ok(a.max(b).max(c) / p.norm().max(1.0))
    });
    out.push(Check::from_result("wp.periods", "℘(x + 1) = ℘(x + τ) = ℘(−x) = ℘(x)", r, 1e-10));

    let r = w.extract_e2().map(|e| (e - w.e2()).norm());
    out.push(Check::from_result("e2.laurent", "e₂ = −(x-coefficient of Z at 0)", r, 1e-10));

    let opts = LaurentOptions { max_order: 2, regular_terms: 5, ..LaurentOptions::default() };
    let (e4, e6) = w.e4_e6();
    match w.laurent(|x| w.wp(x), C64::default(), opts) {
        Ok(l) => {
            out.push(Check::residual("wp.laurent_x2", "[x²]℘ = 3e₄", rel(l.regular[2] - e4 * 3.0, e4), 1e-8));
            out.push(Check::residual("wp.laurent_x4", "[x⁴]℘ = (30/7)e₆", rel(l.regular[4] - e6 * (30.0 / 7.0), e6), 1e-7));
            out.push(Check::residual("wp.laurent_x0", "[x⁰]℘ = 0", l.regular[0].norm(), 1e-10));
        }
        Err(e) => out.push(Check::failed("wp.laurent", "℘ = x⁻² + 3e₄x² + (30/7)e₆x⁴ + …", e)),
    }
    if ctx.is_square() {
        out.push(Check::residual("e6.square", "e₆(i) = 0", e6.norm(), 1e-8));
        out.push(Check::residual("e2.square", "e₂(i) = π", (w.e2() - std::f64::consts::PI).norm(), 1e-12));
    }
    out.observations.push(Observation { id: "e6.abs".into(), note: "|e₆(τ)|".into(), value: e6.norm() });
}

fn kernels(ctx: &Ctx, out: &mut SuiteOutput) {
    let w = &ctx.wei;
    let th = w.theta();
    let dz = delta_z::<f64>();

    let pts = ctx.points("g.listing_2", 20, -0.5, 0.5, 0.1);
    let r = max_over(&pts, |&x| {
        let (z, p) = (w.zeta_e(x)?, w.wp(x)?);
        Ok((th.g_kernel(2, x)? - (z * z * 0.5 - p * 0.5)).norm())
    });
    out.push(Check::from_result("g.listing_2", "g⁽²⁾ = ½Z² − ½℘", r, 1e-8));

    let pts = ctx.points("g.listing_3", 20, -0.5, 0.5, 0.1);
    let r = max_over(&pts, |&x| {
        let (z, p, pp) = (w.zeta_e(x)?, w.wp(x)?, w.wp_prime(x)?);
        Ok((th.g_kernel(3, x)? - (z * z * z / 6.0 - p * z * 0.5 - pp / 6.0)).norm())
    });
    out.push(Check::from_result("g.listing_3", "g⁽³⁾ = ⅙Z³ − ½℘Z − ⅙℘′", r, 1e-8));

    let opts = LaurentOptions { max_order: 1, regular_terms: 0, ..Default::default() };
    let cells: Vec<(usize, i64)> = (1..=5).flat_map(|n| (0..=5).map(move |m| (n, m))).collect();
    let r = max_over(&cells, |&(n, m)| {
        let center = ctx.tau() * m as f64;
        let l = w.laurent(|x| th.g_kernel(n, x), center, opts)?;
        let expect: C64 = kernel_residue_exact(n, m).to_complex();
        Ok(rel(l.residue() - expect, expect))
    });
    out.push(Check::from_result("g.residue_law", "Res_{x=mτ} g⁽ⁿ⁾ = (mΔZ)^{n−1}/(n−1)!, 0⁰ = 1", r, 1e-7));

    let nodes = ctx.params.quad_points();
    let offset = 0.5 / nodes as f64;
    let r = max_over(2..=8usize, |l| {
        let v = period_mean(nodes, offset, 0.0, |x| th.g_kernel(l, x))?;
        let b = rational_to_f64(&bernoulli_number(l)) / rational_to_f64(&BigRational::from_integer(factorial(l as u64)));
        Ok((v - dz.powi(l as i32) * b).norm())
    });
    out.push(Check::from_result("g.integral", "∫₀¹ g⁽ℓ⁾ = B_ℓ(ΔZ)^ℓ/ℓ!, ℓ = 2..8", r, 1e-9));

    let below = -0.25 * ctx.params.tau().im;
    let r = period_mean(nodes, 0.0, below, |x| w.zeta_e(x)).map(|v| (v + dz * 0.5).norm());
    out.push(Check::from_result("Z.integral_below", "∫ Z just below ℝ = −ΔZ/2", r, 1e-9));
}

fn convolution(ctx: &Ctx, out: &mut SuiteOutput) {
    let cv = &ctx.conv;
    let (z, wp) = (cv.z(), cv.wp());
    let one = PeriodicFunction::constant(C64::new(1.0, 0.0));
    let dz = delta_z::<f64>();

    let pts = ctx.points("conv.zz_closed_form", 20, 0.15, 1.85, 0.1);
    let r = max_over(&pts, |&x| Ok((cv.conv_plus(&z, &z, x)? - ctx.basis.z_conv_pow(2, x)?).norm()));
    out.push(Check::from_result("conv.zz_closed_form", "Z ⊛₊ Z = Σₖ c[2][k]g⁽ᵏ⁾", r, 1e-8));

    let pts = ctx.points("conv.commutativity", 10, 0.2, 1.8, 0.1);
    let r = max_over(&pts, |&x| Ok((cv.conv_plus(&z, &wp, x)? - cv.conv_plus(&wp, &z, x)?).norm()));
    out.push(Check::from_result("conv.commutativity", "Z ⊛₊ ℘ = ℘ ⊛₊ Z", r, 1e-9));

    let r = cv.convolved(&z, &z).and_then(|zz| {
        let left = cv.convolved(&zz, &z)?;
        let right = cv.convolved(&z, &zz)?;
        let pts = ctx.points("conv.associativity", 4, 0.3, 2.7, 0.1);
        max_over(&pts, |&x| Ok((left.eval(x)? - right.eval(x)?).norm()))
    });
    out.push(Check::from_result("conv.associativity", "(Z ⊛₊ Z) ⊛₊ Z = Z ⊛₊ (Z ⊛₊ Z)", r, 1e-7));

    let pts = ctx.points("conv.product_rule", 4, 0.3, 0.7, 0.1);
    let r = max_over(&pts, |&x| cv.product_rule_residual(&z, &z, x));
    out.push(Check::from_result("conv.product_rule", "Δ(f ⊛₊ g) = Δf ⊛₊ g + 2πi Res_{z=τ} f(z)g(x + τ − z)", r, 1e-7));

    let r = max_over(1..=4usize, |n| {
        let mut fs = vec![one.clone()];
        fs.extend(std::iter::repeat_n(z.clone(), n));
        let x = C64::new(0.17, 0.0) + ctx.tau() * (0.5 * (n + 1) as f64);
        Ok((cv.conv_nfold(&fs, x)? - (dz / 2.0).powi(n as i32)).norm())
    });
    out.push(Check::from_result("conv.fubini", "1 ⊛₊ Z^{⊛n} = (ΔZ/2)ⁿ, n ≤ 4", r, 1e-8));

    let pts = ctx.points("conv.star_minus_plus", 4, 0.1, 0.4, 0.1);
    let r = max_over(&pts, |&x| {
        let d = cv.conv_star(&z, &z, x)? - cv.conv_plus(&z, &z, x)?;
        Ok((d - two_pi_i::<f64>() * ctx.wei.zeta_e(x)?).norm())
    });
    out.push(Check::from_result("conv.star_minus_plus", "Z *₊ Z − Z ⊛₊ Z = 2πi Z", r, 1e-7));

    let pts = ctx.points("conv.wp_closed_form", 10, 0.2, 1.8, 0.1);
    let r = max_over(&pts, |&x| Ok((ctx.basis.wp_conv_pow(2, x)? - cv.conv_plus(&wp, &wp, x)?).norm()));
    out.push(Check::from_result("conv.wp_closed_form", "℘ ⊛₊ ℘ = dⁿ/dxⁿ Z^{⊛2} + e₂²", r, 1e-6));

    let x = C64::new(0.2, 0.0) + ctx.tau();
    let r = (|| {
        let coarse = Convolver::new(ctx.params.clone().with_quad_points(128)?)?;
        let fine = Convolver::new(ctx.params.clone().with_quad_points(256)?)?;
        let a = coarse.conv_plus(&coarse.z(), &coarse.wp(), x)?;
        let b = fine.conv_plus(&fine.z(), &fine.wp(), x)?;
        Ok((a - b).norm())
    })();
    out.push(Check::from_result("conv.node_doubling", "quadrature with 128 and 256 nodes agrees", r, 1e-10));
}

fn basis(ctx: &Ctx, out: &mut SuiteOutput) {
    let b = &ctx.basis;
    let w = &ctx.wei;
    let dz = delta_z::<f64>();
    let tau = ctx.tau();

    let r = matrix_inverse_check(12).map(|c| c.holds());
    out.push(match r {
        Ok(h) => Check::exact("basis.inverse", "c·C = C·c = I, n ≤ 12", h),
        Err(e) => Check::failed("basis.inverse", "c·C = C·c = I, n ≤ 12", e),
    });

    let spots = [
        ("basis.spot.c0_4", "c₀(4) = −103/360·(ΔZ)⁴", Ok(coeff_c0(4)), graded((-103, 360), 4)),
        ("basis.spot.C0_4", "C₀(4) = 7/360·(ΔZ)⁴", Ok(coeff_C0(4)), graded((7, 360), 4)),
        ("basis.spot.c_5_3", "c(5,3) = 35/12·(ΔZ)²", coeff_c(5, 3), graded((35, 12), 2)),
        ("basis.spot.C_5_2", "C(5,2) = −5/8·(ΔZ)³", coeff_C(5, 2), graded((-5, 8), 3)),
        ("basis.spot.c_4_2", "c(4,2) = −11/6·(ΔZ)²", coeff_c(4, 2), graded((-11, 6), 2)),
        ("basis.spot.c0_2", "c₀(2) = −(ΔZ)²/6", Ok(coeff_c0(2)), graded((-1, 6), 2)),
    ];
    for (id, anchor, got, expect) in spots {
        out.push(match got {
            Ok(v) => Check::exact(id, anchor, v == expect),
            Err(e) => Check::failed(id, anchor, e),
        });
    }

    let holds = (0..=15).all(|n| coeff_c0(n) == coeff_c0_recursive(n));
    out.push(Check::exact("basis.c0_routes", "c₀(n) closed form = recursion, n ≤ 15", holds));
    let holds = (1..=14).all(|n| (1..=n).all(|k| coeff_C(n, k).ok() == coeff_C_closed_sum(n, k).ok()));
    out.push(Check::exact("basis.C_routes", "C(n,k) Stirling form = closed sum, n ≤ 14", holds));

    let pts = ctx.points("basis.zconv_one", 10, -0.5, 0.5, 0.1);
    let r = max_over(&pts, |&x| {
        let z = w.zeta_e(x)?;
        Ok(rel(b.z_conv_pow(1, x)? - z, z))
    });
    out.push(Check::from_result("basis.zconv_one", "Z^{⊛1} = Z", r, 1e-10));

    let pts = ctx.points("basis.kernel_reconstruction", 5, -0.4, 0.4, 0.15);
    let r = max_over(&pts, |&x| {
        max_over(0..=6usize, |n| {
            let direct = w.theta().g_kernel(n, x)?;
            Ok(rel(b.g_from_zconv(n, x)? - direct, direct))
        })
    });
    out.push(Check::from_result("basis.kernel_reconstruction", "g⁽ⁿ⁾ = Σₖ C[n][k]Z^{⊛k}, n ≤ 6", r, 1e-8));

    let opts = LaurentOptions { max_order: 2, regular_terms: 0, ..Default::default() };
    let mut order_two = 0.0f64;
    let cells: Vec<(usize, i64)> = (1..=5).flat_map(|n| (0..=6).map(move |m| (n, m))).collect();
    let r = max_over(&cells, |&(n, m)| {
        let l = w.laurent(|x| b.z_conv_pow(n, x), tau * m as f64, opts)?;
        order_two = worst(order_two, l.singular_coeff(2).norm());
        let expect: C64 = residue_poly_V(n, m);
        Ok(rel(l.residue() - expect, expect))
    });
    let ok = r.is_ok();
    out.push(Check::from_result("basis.V_residues", "Res_{x=mτ} Z^{⊛n} = (−ΔZ)^{n−1}∏_{k<n−1}(m − k)/(n−1)!", r, 1e-7));
    if ok {
        out.push(Check::residual("basis.V_simple_poles", "[(x − mτ)⁻²] Z^{⊛n} = 0", order_two, 1e-8));
    }

    let pts = ctx.points("basis.difference", 4, -0.4, 0.4, 0.15);
    let r = max_over(&pts, |&x| {
        max_over(1..=5usize, |n| {
            let lhs = b.z_conv_pow(n + 1, x + tau)? - b.z_conv_pow(n + 1, x)?;
            let rhs = dz * ((dz / 2.0).powi(n as i32) - b.z_conv_pow(n, x)?);
            Ok(rel(lhs - rhs, rhs))
        })
    });
    out.push(Check::from_result("basis.difference", "ΔZ^{⊛(n+1)} = ΔZ((ΔZ/2)ⁿ − Z^{⊛n})", r, 1e-7));

    let r = max_over(1..=5usize, |n| {
        let v = period_mean(ctx.params.quad_points(), 0.0, 0.3 * tau.im, |x| b.z_conv_pow(n, x))?;
        Ok((v - (dz / 2.0).powi(n as i32)).norm())
    });
    out.push(Check::from_result("basis.strip_integral", "∫₀¹ Z^{⊛n}(t + iy) dt = (ΔZ/2)ⁿ, 0 < y < Im τ", r, 1e-8));

    let pts = ctx.points("basis.A_difference", 20, -0.5, 0.5, 0.15);
    let r = max_over(&pts, |&x| {
        let z = w.zeta_e(x)?;
        max_over(0..=4usize, |n| {
            let lhs = b.a_fn(n + 1, x + tau)? - b.a_fn(n + 1, x)?;
            Ok((lhs - dz * z.powi(n as i32)).norm())
        })
    });
    out.push(Check::from_result("basis.A_difference", "ΔA_{n+1} = ΔZ·Zⁿ, n ≤ 4", r, 1e-7));

    let pts = ctx.points("basis.wp_conv_one", 5, -0.5, 0.5, 0.15);
    let r = max_over(&pts, |&x| {
        let p = w.wp(x)?;
        Ok(rel(b.wp_conv_pow(1, x)? - p, p))
    });
    out.push(Check::from_result("basis.wp_conv_one", "℘^{⊛1} = ℘", r, 1e-8));
}

fn polynomials(out: &mut SuiteOutput) {
    let exact = |out: &mut SuiteOutput, id: &str, anchor: &str, r: qetorus::Result<bool>| {
        out.push(match r {
            Ok(h) => Check::exact(id, anchor, h),
            Err(e) => Check::failed(id, anchor, e),
        });
    };

    let r = (|| {
        let mut p = p_poly(1)?;
        for n in 2..=20 {
            p = p_next(&p);
            if p != p_poly(n)? {
                return Ok(false);
            }
        }
        Ok(true)
    })();
    exact(out, "poly.recursion", "p_{n+1} = x(1 − x)pₙ′/n, n ≤ 20", r);

    let r = (2..=25).try_fold(true, |acc, n| Ok(acc && p_symmetry_check(n)?));
    exact(out, "poly.symmetry", "pₙ(1 − x) = (−1)ⁿpₙ(x), 2 ≤ n ≤ 25", r);

    let r = (1..=12).try_fold(true, |acc, n| Ok(acc && p_half_check(n)?));
    exact(out, "poly.half", "pₙ(1/2) = (−1)ⁿ(2ⁿ − 1)Bₙ/n!, n ≤ 12", r);

    let r = ZeroLevels::compute(30).map(|z| (1..30).all(|n| z.interlaced(n)));
    exact(out, "poly.interlacing", "zeros of pₙ and p_{n+1} are simple and interlace, n ≤ 30", r);

    let r = (|| {
        let p2 = p_poly(2)?;
        Ok(p2.poly.coeffs() == [BigRational::zero(), BigRational::one(), -BigRational::one()])
    })();
    exact(out, "poly.p2", "p₂ = x(1 − x)", r);

    let cells: Vec<(usize, f64)> = (2..=6).flat_map(|n| [0.2, 0.5, 0.8].map(move |x| (n, x))).collect();
    let r = max_over(&cells, |&(n, x)| p_hurwitz_check(n, x));
    out.push(Check::from_result(
        "poly.hurwitz",
        "pₙ(x) = −(2πi)^{−n}(ζ(n, a) + (−1)ⁿζ(n, 1 − a)), a = y₀/2πi",
        r,
        1e-8,
    ));

    let xs = [ratio(-1, 1), ratio(1, 3), ratio(1, 2), ratio(2, 1)];
    let r = (1..=6).try_fold(true, |acc, n| {
        xs.iter().try_fold(acc, |acc, x| Ok::<_, qetorus::Error>(acc && polylog_neg_check(n, x)?.holds()))
    });
    exact(out, "poly.polylog", "(−1)ⁿLi₋ₙ(x)/n! = p_{n+1}(1/(1 − x)), 1 ≤ n ≤ 6", r);

    for (i, x) in xs.iter().enumerate() {
        if let Ok(c) = polylog_neg_check(0, x) {
            out.observations.push(Observation {
                id: format!("poly.polylog_n0.{i}"),
                note: format!("|Li₀(x) − p₁(1/(1 − x))| at x = {x}"),
                value: rational_to_f64(&c.residual()),
            });
        }
    }

    let r = max_over([(0.3, 0.5), (0.6, -0.8), (0.45, 1.2)], |(x, y)| {
        Ok((generating_partial_sum(x, y, 60)? - generating_function(x, y)).abs())
    });
    out.push(Check::from_result("poly.generating", "Σ pₙ(x)y^{n−1} = xeʸ/(1 − x + xeʸ)", r, 1e-10));

    let r = zero_density_compare(40);
    out.push(Check::from_result("poly.zero_density", "KS(zeros of p₄₀, ρ) < 0.06", r, 0.06));
}
