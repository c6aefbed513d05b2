//! Scalar special functions: Hermite, Laguerre, Charlier, I_0 and the 2D
//! complex Hermite polynomials H_{m,n}(z1, z2).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::sum::{CompensatedSum, ComplexSum};

pub type ComplexScalar = Complex64;

/// Index pair (m, n) of H_{m,n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyIndex {
    pub m: u32,
    pub n: u32,
}

impl PolyIndex {
    pub fn new(m: u32, n: u32) -> Self {
        Self { m, n }
    }

    pub fn min(&self) -> u32 {
        self.m.min(self.n)
    }
}

/// A complex number in polar form, rho >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    rho: f64,
    theta: f64,
}

impl PolarPoint {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(rho.is_finite() && theta.is_finite()) || rho < 0.0 {
            return Err(Error::InvalidInput(format!(
                "polar point needs finite rho >= 0, got ({rho}, {theta})"
            )));
        }
        Ok(Self { rho, theta })
    }

    pub fn from_complex(z: Complex64) -> Self {
        let (rho, theta) = z.to_polar();
        Self { rho, theta }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.rho, self.theta)
    }
}

pub(crate) fn ensure_finite(name: &str, z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} is not finite: {z}")))
    }
}

// ---------------------------------------------------------------------------
// Combinatorics
// ---------------------------------------------------------------------------

const FACT_TABLE_LEN: usize = 171;

fn factorial_table() -> &'static [f64; FACT_TABLE_LEN] {
    static TABLE: OnceLock<[f64; FACT_TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; FACT_TABLE_LEN];
        // exact integers through 20!, rounded products beyond
        let mut exact: u64 = 1;
        for k in 1..=20u64 {
            exact *= k;
            t[k as usize] = exact as f64;
        }
        for k in 21..FACT_TABLE_LEN {
            t[k] = t[k - 1] * k as f64;
        }
        t
    })
}

/// n! as a double; overflows to +inf above 170.
pub fn factorial(n: u32) -> f64 {
    factorial_table()
        .get(n as usize)
        .copied()
        .unwrap_or(f64::INFINITY)
}

/// ln(n!) by accumulation of logarithms.
pub fn ln_factorial(n: u32) -> f64 {
    if (n as usize) < FACT_TABLE_LEN {
        return factorial(n).ln();
    }
    let mut acc = CompensatedSum::new();
    acc.add(factorial(170).ln());
    for k in 171..=n {
        acc.add((k as f64).ln());
    }
    acc.value()
}

/// binom(n, k) for nonnegative arguments; exact in u128 while it fits.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        match acc.checked_mul(n as u128 - i) {
            Some(v) => acc = v / (i + 1),
            None => return (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp(),
        }
    }
    acc as f64
}

/// binom(top, r) for any integer `top` (possibly negative) and r >= 0,
/// as the falling-factorial product top(top-1)...(top-r+1)/r!.
pub fn binomial_signed(top: i64, r: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..r as i64 {
        acc *= (top - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// c! / (k_1! ... k_N!) with c = sum k_i.
pub fn multinomial(parts: &[u32]) -> f64 {
    let mut total = 0u32;
    let mut acc = 1.0;
    for &k in parts {
        for i in 1..=k {
            total += 1;
            acc *= total as f64 / i as f64;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// One-variable families
// ---------------------------------------------------------------------------

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence.
/// Large n|x| may overflow; check `is_finite` on the result.
pub fn hermite(n: u32, x: Complex64) -> Complex64 {
    let two_x = 2.0 * x;
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = two_x;
    for k in 1..n {
        let next = two_x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn hermite_real(n: u32, x: f64) -> f64 {
    hermite(n, Complex64::new(x, 0.0)).re
}

/// H_0(x), ..., H_{n_max}(x).
pub fn hermite_table(n_max: u32, x: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(Complex64::new(1.0, 0.0));
    if n_max == 0 {
        return out;
    }
    out.push(2.0 * x);
    for k in 1..n_max as usize {
        let next = 2.0 * x * out[k] - 2.0 * k as f64 * out[k - 1];
        out.push(next);
    }
    out
}

/// Generalized Laguerre polynomial L_n^{(alpha)}(x) for any integer alpha,
/// from the finite series with product-form binomials.
pub fn laguerre(n: u32, alpha: i64, x: Complex64) -> Complex64 {
    let top = n as i64 + alpha;
    let mut acc = ComplexSum::new();
    let mut x_pow = Complex64::new(1.0, 0.0);
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * binomial_signed(top, n - k) / factorial(k);
        acc.add(coeff * x_pow);
        x_pow *= x;
    }
    acc.value()
}

/// L_0^{(alpha)}(x), ..., L_{n_max}^{(alpha)}(x) by the three-term recurrence
/// (k+1) L_{k+1} = (2k + alpha + 1 - x) L_k - (k + alpha) L_{k-1}.
///
/// The series in `laguerre` cancels catastrophically once n*|x| is large;
/// the recurrence does not.
pub fn laguerre_table(n_max: u32, alpha: i64, x: Complex64) -> Vec<Complex64> {
    let a = alpha as f64;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(Complex64::new(1.0, 0.0));
    if n_max == 0 {
        return out;
    }
    out.push(1.0 + a - x);
    for k in 1..n_max as usize {
        let kf = k as f64;
        let next = ((2.0 * kf + a + 1.0 - x) * out[k] - (kf + a) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

pub fn laguerre_real(n: u32, alpha: i64, x: f64) -> f64 {
    laguerre(n, alpha, Complex64::new(x, 0.0)).re
}

/// Charlier polynomial C_n(x; a) through L_n^{(x-n)}(a) = (-a)^n C_n(x; a) / n!.
pub fn charlier(n: u32, x: u32, a: f64) -> Result<f64> {
    if a == 0.0 {
        return Err(Error::ZeroParameter("a"));
    }
    let lag = laguerre_real(n, x as i64 - n as i64, a);
    Ok(factorial(n) * (-a).powi(-(n as i32)) * lag)
}

const I0_TOL: f64 = 1e-17;

/// Modified Bessel function I_0(x) from its power series.
pub fn bessel_i0(x: f64) -> f64 {
    bessel_i0_from_square(x * x)
}

/// I_0 evaluated from the square of its argument, s = x^2.
///
/// Negative s gives I_0(i sqrt|s|) = J_0(sqrt|s|), which the bilinear
/// Charlier closed form needs when uv < 0.
pub fn bessel_i0_from_square(s: f64) -> f64 {
    let quarter = s / 4.0;
    let mut acc = CompensatedSum::new();
    let mut term = 1.0;
    acc.add(term);
    let mut k = 1.0;
    loop {
        term *= quarter / (k * k);
        acc.add(term);
        if term.abs() <= I0_TOL * acc.value().abs() || k > 500.0 {
            break;
        }
        k += 1.0;
    }
    acc.value()
}

// ---------------------------------------------------------------------------
// 2D complex Hermite polynomials
// ---------------------------------------------------------------------------

/// H_{m,n}(z1, z2) = sum_k (-1)^k k! binom(m,k) binom(n,k) z1^{m-k} z2^{n-k}.
pub fn h2d_direct(idx: PolyIndex, z1: Complex64, z2: Complex64) -> Complex64 {
    let PolyIndex { m, n } = idx;
    let kmax = idx.min();
    let p1 = powers(z1, m);
    let p2 = powers(z2, n);
    let mut acc = ComplexSum::new();
    for k in 0..=kmax {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * factorial(k) * binomial(m, k) * binomial(n, k);
        acc.add(coeff * p1[(m - k) as usize] * p2[(n - k) as usize]);
    }
    acc.value()
}

/// H_{m,n}(w1, w2) through the Laguerre connection
/// (-1)^n n! w1^{m-n} L_n^{(m-n)}(w1 w2) for m >= n, mirrored for n >= m.
pub fn h2d_laguerre(idx: PolyIndex, w1: Complex64, w2: Complex64) -> Complex64 {
    if idx.m >= idx.n {
        laguerre_branch(idx.m, idx.n, w1, w2)
    } else {
        laguerre_branch(idx.n, idx.m, w2, w1)
    }
}

/// The m >= n branch, (-1)^n n! a^{m-n} L_n^{(m-n)}(a b). Also used with
/// m < n (negative superscript), where it requires a != 0.
pub(crate) fn laguerre_branch(m: u32, n: u32, a: Complex64, b: Complex64) -> Complex64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let shift = m as i32 - n as i32;
    sign * factorial(n) * a.powi(shift) * laguerre(n, shift as i64, a * b)
}

/// Partial sum of the generating function over m + n <= degree_cap:
/// sum H_{m,n}(z1,z2) u^m v^n / (m! n!).
pub fn gf_h2d_partial(
    z1: Complex64,
    z2: Complex64,
    u: Complex64,
    v: Complex64,
    degree_cap: u32,
) -> Complex64 {
    let pu = powers(u, degree_cap);
    let pv = powers(v, degree_cap);
    let mut acc = ComplexSum::new();
    for total in 0..=degree_cap {
        for m in 0..=total {
            let n = total - m;
            let coeff = pu[m as usize] * pv[n as usize] / (factorial(m) * factorial(n));
            acc.add(h2d_direct(PolyIndex::new(m, n), z1, z2) * coeff);
        }
    }
    acc.value()
}

/// Table of H_{r,c}(z1, z2) for r, c <= max via the Appell-type recurrences
/// H_{m+1,n} = z1 H_{m,n} - n H_{m,n-1}, H_{m,n+1} = z2 H_{m,n} - m H_{m-1,n}.
pub fn h2d_table(max: u32, z1: Complex64, z2: Complex64) -> Vec<Vec<Complex64>> {
    let size = max as usize + 1;
    let mut t = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    t[0][0] = Complex64::new(1.0, 0.0);
    for n in 1..size {
        t[0][n] = z2 * t[0][n - 1];
    }
    for m in 1..size {
        t[m][0] = z1 * t[m - 1][0];
        for n in 1..size {
            t[m][n] = z1 * t[m - 1][n] - n as f64 * t[m - 1][n - 1];
        }
    }
    t
}

pub(crate) fn powers(z: Complex64, max: u32) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(max as usize + 1);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..=max {
        out.push(p);
        p *= z;
    }
    out
}
