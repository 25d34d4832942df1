//! Exact combinatorics: Stirling numbers of both kinds, Bernoulli numbers
//! and polynomials, and the graded coefficient ring ℚ·(ΔZ)^j.
//!
//! Stirling and Bernoulli values live in process-wide triangular tables that
//! only ever grow. A row is published under the write lock after it is
//! complete, so readers never observe a half-filled row.

mod graded;
mod polynomial;

pub use graded::GradedRational;
pub use polynomial::{sign_of_integer_poly, RationalPolynomial};

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Default)]
struct Tables {
    // s1[n][k], s2[n][k] for 0 <= k <= n
    s1: Vec<Vec<BigInt>>,
    s2: Vec<Vec<BigInt>>,
    bernoulli: Vec<BigRational>,
}

impl Tables {
    fn grow_stirling(&mut self, n: usize) {
        if self.s1.is_empty() {
            self.s1.push(vec![BigInt::one()]);
            self.s2.push(vec![BigInt::one()]);
        }
        while self.s1.len() <= n {
            let m = self.s1.len();
            let prev1 = &self.s1[m - 1];
            let prev2 = &self.s2[m - 1];
            let mut row1 = vec![BigInt::zero(); m + 1];
            let mut row2 = vec![BigInt::zero(); m + 1];
            let mm1 = BigInt::from(m - 1);
            for k in 1..=m {
                let left1 = &prev1[k - 1];
                let left2 = &prev2[k - 1];
                let (up1, up2) = if k < m {
                    (prev1[k].clone(), prev2[k].clone())
                } else {
                    (BigInt::zero(), BigInt::zero())
                };
                // s(m,k) = s(m-1,k-1) - (m-1) s(m-1,k);  S(m,k) = k S(m-1,k) + S(m-1,k-1)
                row1[k] = left1 - &mm1 * up1;
                row2[k] = left2 + BigInt::from(k) * up2;
            }
            self.s1.push(row1);
            self.s2.push(row2);
        }
    }

    fn grow_bernoulli(&mut self, n: usize) {
        while self.bernoulli.len() <= n {
            let j = self.bernoulli.len();
            if j == 0 {
                self.bernoulli.push(BigRational::one());
                continue;
            }
            // sum_{l=0}^{k-1} binom(k,l) B_l = 0 with k = j + 1, solved for B_j
            let k = j + 1;
            let mut acc = BigRational::zero();
            for (l, b) in self.bernoulli.iter().enumerate() {
                acc += BigRational::from_integer(binomial(k as u64, l as u64)) * b;
            }
            self.bernoulli.push(-acc / BigRational::from_integer(BigInt::from(k)));
        }
    }
}

fn tables() -> &'static RwLock<Tables> {
    static TABLES: OnceLock<RwLock<Tables>> = OnceLock::new();
    TABLES.get_or_init(|| RwLock::new(Tables::default()))
}

fn with_stirling<R>(n: usize, f: impl FnOnce(&Tables) -> R) -> R {
    {
        let guard = tables().read().expect("table lock poisoned");
        if guard.s1.len() > n {
            return f(&guard);
        }
    }
    let mut guard = tables().write().expect("table lock poisoned");
    guard.grow_stirling(n);
    f(&guard)
}

fn check_range(kind: &str, n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::OutOfRange(format!("{kind}({n},{k}) requires 1 <= k <= n")));
    }
    Ok(())
}

/// Signed Stirling number of the first kind s(n, k):
/// m(m−1)…(m−n+1) = Σ_k s(n,k) m^k.
pub fn stirling_first(n: usize, k: usize) -> Result<BigRational> {
    check_range("s", n, k)?;
    Ok(BigRational::from_integer(stirling_first_int(n, k)))
}

/// Stirling number of the second kind S(n, k) from the triangular recurrence.
pub fn stirling_second(n: usize, k: usize) -> Result<BigRational> {
    check_range("S", n, k)?;
    Ok(BigRational::from_integer(stirling_second_int(n, k)))
}

/// Integer-valued s(n, k) for any 0 ≤ k, n (zero outside the triangle).
pub fn stirling_first_int(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    with_stirling(n, |t| t.s1[n][k].clone())
}

/// Integer-valued S(n, k) for any 0 ≤ k, n (zero outside the triangle).
pub fn stirling_second_int(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    with_stirling(n, |t| t.s2[n][k].clone())
}

/// S(n, k) by inclusion–exclusion, independent of the recurrence table.
pub fn stirling_second_explicit(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for j in 0..=k {
        let term = binomial(k as u64, j as u64) * num_traits::pow(BigInt::from(k - j), n);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    let (q, r) = acc.div_rem(&factorial(k as u64));
    debug_assert!(r.is_zero());
    q
}

/// Bernoulli number B_n with B_1 = −1/2.
pub fn bernoulli_number(n: usize) -> BigRational {
    {
        let guard = tables().read().expect("table lock poisoned");
        if let Some(b) = guard.bernoulli.get(n) {
            return b.clone();
        }
    }
    let mut guard = tables().write().expect("table lock poisoned");
    guard.grow_bernoulli(n);
    guard.bernoulli[n].clone()
}

/// The normalized Bernoulli polynomial used for the functions Aₙ:
/// B₀(z) = 1, B₁(z) = z, and for n ≥ 2
/// Bₙ(z) = zⁿ/n − zⁿ⁻¹/2 + (1/n) Σ_{m≥2} binom(n,m) B_m z^{n−m},
/// normalized so that B_{n+1}(z+1) − B_{n+1}(z) = zⁿ.
pub fn bernoulli_poly_difference(n: usize) -> RationalPolynomial {
    match n {
        0 => RationalPolynomial::constant(BigRational::one()),
        1 => RationalPolynomial::monomial(1, BigRational::one()),
        _ => {
            let mut coeffs = vec![BigRational::zero(); n + 1];
            let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));
            for m in 0..=n {
                let c = BigRational::from_integer(binomial(n as u64, m as u64)) * bernoulli_number(m);
                coeffs[n - m] = c * &inv_n;
            }
            RationalPolynomial::new(coeffs)
        }
    }
}

/// n!
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient for non-negative arguments (0 when k > n).
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact rational m/d.
pub fn ratio(m: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(m), BigInt::from(d))
}

/// `BigRational` with an integer value.
pub fn int(m: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(m))
}
