//! Command implementations. Each returns rendered output; `main` only does I/O.

use std::sync::Arc;
use std::time::Instant;

use qetorus::basis_change::{coeff_C, coeff_C0, coeff_c, coeff_c0};
use qetorus::combinatorics::GradedRational;
use qetorus::conv_polynomials::{ks_distance, zero_histogram};
use qetorus::{p_poly, BasisChange, Convolver, PeriodicFunction, Torus64, Weierstrass64, ZeroLevels, C64};
use serde_json::{json, Value};

use crate::format::{fmt17, json_complex, json_f64, json_rational};
use crate::report::{csv_field, params_json, VerifyReport};
use crate::suites::{run_suite, Ctx};

/// Largest order accepted by the exact-table commands.
pub const MAX_EXACT_ORDER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct Global {
    pub params: Torus64,
    pub seed: u64,
    pub format: Format,
}

pub const EVAL_FUNCTIONS: [&str; 11] = ["theta", "Z", "zeta", "wp", "wp_prime", "F", "g", "zconv", "wpconv", "conv", "A"];

#[derive(Debug, Clone, Default)]
pub struct EvalArgs {
    pub function: String,
    pub xs: Vec<C64>,
    /// Rectangle re_min, re_max, im_min, im_max and node counts per axis.
    pub grid: Option<Grid>,
    pub n: Option<usize>,
    pub y: Option<C64>,
    pub f: Option<String>,
    pub g: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub counts: (usize, usize),
}

impl Grid {
    /// Parse `re_min,re_max,im_min,im_max,n_re,n_im`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || format!("grid `{s}` must be re_min,re_max,im_min,im_max,n_re,n_im");
        if parts.len() != 6 {
            return Err(bad());
        }
        let f = |i: usize| parts[i].parse::<f64>().map_err(|_| bad());
        let u = |i: usize| parts[i].parse::<usize>().map_err(|_| bad());
        let g = Self { re: (f(0)?, f(1)?), im: (f(2)?, f(3)?), counts: (u(4)?, u(5)?) };
        if g.counts.0 == 0 || g.counts.1 == 0 {
            return Err(bad());
        }
        Ok(g)
    }

    pub fn points(&self) -> Vec<C64> {
        let axis = |(a, b): (f64, f64), n: usize, i: usize| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
        let (nr, ni) = self.counts;
        (0..ni)
            .flat_map(|j| (0..nr).map(move |i| C64::new(axis(self.re, nr, i), axis(self.im, ni, j))))
            .collect()
    }
}

type Pointwise = Box<dyn Fn(C64) -> qetorus::Result<C64>>;

struct Evaluators {
    wei: Arc<Weierstrass64>,
    conv: Convolver<f64>,
    basis: Arc<BasisChange<f64>>,
}

impl Evaluators {
    fn new(params: &Torus64) -> qetorus::Result<Self> {
        let wei = Arc::new(Weierstrass64::new(params.clone())?);
        Ok(Self {
            conv: Convolver::from_weierstrass(Arc::clone(&wei)),
            basis: Arc::new(BasisChange::new(Arc::clone(&wei))),
            wei,
        })
    }

    /// Periodic function by name: `1`, `Z`, `Zp`, `wp`, `wp_prime`, `gN`, `zconvN`, `wpconvN`.
    fn named(&self, name: &str) -> Result<PeriodicFunction<f64>, String> {
        let index = |prefix: &str| -> Option<Result<usize, String>> {
            name.strip_prefix(prefix)
                .filter(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
                .map(|rest| rest.parse::<usize>().map_err(|e| format!("`{name}`: {e}")))
        };
        match name {
            "1" => return Ok(PeriodicFunction::constant(C64::new(1.0, 0.0))),
            "Z" => return Ok(self.conv.z()),
            "Zp" => return Ok(self.conv.z_prime()),
            "wp" => return Ok(self.conv.wp()),
            "wp_prime" => return Ok(self.conv.wp_prime()),
            _ => {}
        }
        if let Some(n) = index("zconv") {
            return Ok(self.basis.z_conv_pow_function(n?));
        }
        if let Some(n) = index("wpconv") {
            return Ok(self.basis.wp_conv_pow_function(n?));
        }
        if let Some(n) = index("g") {
            return Ok(self.conv.kernel(n?));
        }
        Err(format!("unknown function `{name}`; expected 1, Z, Zp, wp, wp_prime, gN, zconvN or wpconvN"))
    }
}

fn need<T: Copy>(v: Option<T>, what: &str, function: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("--fn {function} needs {what}"))
}

fn pointwise(ev: &Evaluators, args: &EvalArgs) -> Result<Pointwise, String> {
    let w = Arc::clone(&ev.wei);
    let b = Arc::clone(&ev.basis);
    let name = args.function.as_str();
    Ok(match name {
        "theta" => Box::new(move |x| Ok(w.theta().theta(x))),
        "Z" => Box::new(move |x| w.zeta_e(x)),
        "zeta" => Box::new(move |x| w.zeta(x)),
        "wp" => Box::new(move |x| w.wp(x)),
        "wp_prime" => Box::new(move |x| w.wp_prime(x)),
        "F" => {
            let y = need(args.y, "--y", name)?;
            Box::new(move |x| w.theta().eisenstein_kronecker(x, y))
        }
        "g" => {
            let n = need(args.n, "--n", name)?;
            Box::new(move |x| w.theta().g_kernel(n, x))
        }
        "zconv" => {
            let n = need(args.n, "--n", name)?;
            Box::new(move |x| b.z_conv_pow(n, x))
        }
        "wpconv" => {
            let n = need(args.n, "--n", name)?;
            Box::new(move |x| b.wp_conv_pow(n, x))
        }
        "A" => {
            let n = need(args.n, "--n", name)?;
            Box::new(move |x| b.a_fn(n, x))
        }
        "conv" => {
            let f = ev.named(args.f.as_deref().ok_or("--fn conv needs --f")?)?;
            let g = ev.named(args.g.as_deref().ok_or("--fn conv needs --g")?)?;
            let conv = ev.conv.clone();
            Box::new(move |x| conv.conv_plus(&f, &g, x))
        }
        other => return Err(format!("unknown function `{other}`; expected one of {}", EVAL_FUNCTIONS.join(", "))),
    })
}

/// Evaluate a function at the given points. Failures at individual points
/// are reported in that row.
pub fn cmd_eval(global: &Global, args: &EvalArgs) -> Result<String, String> {
    let ev = Evaluators::new(&global.params).map_err(|e| e.to_string())?;
    let f = pointwise(&ev, args)?;
    let mut xs = args.xs.clone();
    if let Some(g) = &args.grid {
        xs.extend(g.points());
    }
    if xs.is_empty() {
        return Err("eval needs at least one --x or a --grid".into());
    }
    let rows: Vec<(C64, qetorus::Result<C64>)> = xs.iter().map(|&x| (x, f(x))).collect();
    // grids are always tabular
    let format = if args.grid.is_some() { Format::Csv } else { global.format };
    Ok(match format {
        Format::Csv => {
            let mut s = String::from("re_x,im_x,re_f,im_f,error\n");
            for (x, r) in &rows {
                let (re, im, err) = match r {
                    Ok(v) => (fmt17(v.re), fmt17(v.im), String::new()),
                    Err(e) => (String::new(), String::new(), csv_field(&e.to_string())),
                };
                s.push_str(&format!("{},{},{re},{im},{err}\n", fmt17(x.re), fmt17(x.im)));
            }
            s
        }
        Format::Json => {
            let values: Vec<Value> = rows
                .iter()
                .map(|(x, r)| match r {
                    Ok(v) => json!({ "x": json_complex(*x), "value": json_complex(*v), "error": null }),
                    Err(e) => json!({ "x": json_complex(*x), "value": null, "error": e.to_string() }),
                })
                .collect();
            let mut out = json!({
                "schema": 1,
                "fn": args.function,
                "params": params_json(&global.params),
                "values": values,
            });
            if let Some(n) = args.n {
                out["n"] = json!(n);
            }
            pretty(&out)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    /// Z^{⊛n} in terms of the kernels.
    SmallC,
    /// Kernels in terms of Z^{⊛n}.
    BigC,
    /// The polynomial pₙ.
    P,
}

impl CoeffKind {
    fn label(self) -> &'static str {
        match self {
            Self::SmallC => "c",
            Self::BigC => "C",
            Self::P => "p",
        }
    }
}

fn matrix_row(kind: CoeffKind, n: usize) -> qetorus::Result<Vec<GradedRational>> {
    let mut row = Vec::with_capacity(n + 1);
    row.push(match kind {
        CoeffKind::SmallC => coeff_c0(n),
        _ => coeff_C0(n),
    });
    for k in 1..=n {
        row.push(match kind {
            CoeffKind::SmallC => coeff_c(n, k)?,
            _ => coeff_C(n, k)?,
        });
    }
    Ok(row)
}

/// Exact coefficient row n of c or C, or the coefficients of pₙ.
pub fn cmd_coeffs(global: &Global, kind: CoeffKind, n: usize) -> Result<String, String> {
    if n > MAX_EXACT_ORDER {
        return Err(format!("--n {n} exceeds the maximum order {MAX_EXACT_ORDER}"));
    }
    // (k, rational, ΔZ power)
    let entries: Vec<(usize, qetorus::BigRational, Option<u32>)> = match kind {
        CoeffKind::P => {
            let p = p_poly(n).map_err(|e| e.to_string())?;
            (0..=n).map(|k| (k, p.poly.coeff(k), None)).collect()
        }
        _ => matrix_row(kind, n)
            .map_err(|e| e.to_string())?
            .into_iter()
            .enumerate()
            .map(|(k, g)| {
                // zero entries carry the grade of their position
                let power = if g.is_zero() { (n - k) as u32 } else { g.dz_power };
                (k, g.coeff, Some(power))
            })
            .collect(),
    };
    Ok(match global.format {
        Format::Csv => {
            let mut s = String::from(if kind == CoeffKind::P { "k,num,den\n" } else { "k,num,den,dz_power\n" });
            for (k, r, p) in &entries {
                match p {
                    Some(p) => s.push_str(&format!("{k},{},{},{p}\n", r.numer(), r.denom())),
                    None => s.push_str(&format!("{k},{},{}\n", r.numer(), r.denom())),
                }
            }
            s
        }
        Format::Json => {
            let items: Vec<Value> = entries
                .iter()
                .map(|(k, r, p)| {
                    let (num, den) = json_rational(r);
                    let mut v = json!({ "k": k, "num": num, "den": den });
                    if let Some(p) = p {
                        v["dz_power"] = json!(p);
                    }
                    v
                })
                .collect();
            let key = if kind == CoeffKind::P { "coefficients" } else { "entries" };
            let mut out = json!({ "schema": 1, "kind": kind.label(), "n": n });
            out[key] = Value::Array(items);
            pretty(&out)
        }
    })
}

/// Zeros of pₙ with a density histogram against ρ.
pub fn cmd_zeros(global: &Global, n: usize, bins: usize) -> Result<String, String> {
    if n == 0 || n > MAX_EXACT_ORDER {
        return Err(format!("--n must lie in 1..={MAX_EXACT_ORDER}"));
    }
    if bins == 0 {
        return Err("--bins must be positive".into());
    }
    let zeros = ZeroLevels::compute(n).map_err(|e| e.to_string())?.zeros(n);
    let hist = zero_histogram(&zeros, bins);
    let ks = if n >= 3 { Some(ks_distance(&zeros[1..n - 1])) } else { None };
    Ok(match global.format {
        Format::Csv => {
            let mut s = String::from("kind,index,x,fraction,rho_mass\n");
            for (i, z) in zeros.iter().enumerate() {
                s.push_str(&format!("zero,{i},{},,\n", fmt17(*z)));
            }
            for (i, (left, frac, mass)) in hist.iter().enumerate() {
                s.push_str(&format!("bin,{i},{},{},{}\n", fmt17(*left), fmt17(*frac), fmt17(*mass)));
            }
            s
        }
        Format::Json => pretty(&json!({
            "schema": 1,
            "n": n,
            "zeros": zeros.iter().map(|&z| json_f64(z)).collect::<Vec<_>>(),
            "ks_distance": ks.map_or(Value::Null, json_f64),
            "histogram": hist.iter().map(|(l, f, m)| json!({
                "left": json_f64(*l),
                "fraction": json_f64(*f),
                "rho_mass": json_f64(*m),
            })).collect::<Vec<_>>(),
        })),
    })
}

/// Run a suite; the flag is the overall verdict.
pub fn cmd_verify(global: &Global, suite: &str) -> Result<(String, bool), String> {
    let start = Instant::now();
    let ctx = Ctx::new(global.params.clone(), global.seed).map_err(|e| e.to_string())?;
    let output = run_suite(suite, &ctx)?;
    let mut report = VerifyReport::new(suite, global.seed, global.params.clone(), output.checks, output.observations);
    report.wall_time_s = start.elapsed().as_secs_f64();
    let pass = report.pass();
    let text = match global.format {
        Format::Json => pretty(&report.to_json()),
        Format::Csv => report.to_csv(),
    };
    Ok((text, pass))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
