//! q-shifted factorials, 2D q-Hermite polynomials and the circle integrals
//! built on the q-Hermite weight.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::integral::Comparison;
use crate::ks::{ActiveDomain, SeriesResult};
use crate::multi_index::Compositions;
use crate::poly::ensure_finite;
use crate::quad::{periodic_trapezoid, refine, SELF_CONSISTENCY_TOL};
use crate::sum::ComplexSum;

/// Infinite products stop once |a| q^k falls below this.
pub const DEFAULT_PRODUCT_TOL: f64 = 1e-18;

/// A truncated series is rejected when its last nonzero shells exceed this
/// fraction of the partial sum.
pub const SERIES_TAIL_TOL: f64 = 1e-6;

/// Hard cap on the number of factors of an infinite product.
const MAX_FACTORS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QParameter {
    pub q: f64,
    pub product_tol: f64,
}

impl QParameter {
    pub fn new(q: f64) -> Result<Self> {
        Self::with_tol(q, DEFAULT_PRODUCT_TOL)
    }

    pub fn with_tol(q: f64, product_tol: f64) -> Result<Self> {
        let p = Self { q, product_tol };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.q.is_finite() || self.q <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "q must lie in (0,1), got {}",
                self.q
            )));
        }
        if self.q >= 1.0 {
            return Err(Error::DivergentProduct(self.q));
        }
        if !(self.product_tol > 0.0 && self.product_tol < 1.0) {
            return Err(Error::InvalidInput(format!(
                "product tolerance must lie in (0,1), got {}",
                self.product_tol
            )));
        }
        Ok(())
    }
}

/// Length of a q-shifted factorial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QCount {
    Finite(u32),
    Infinite,
}

/// (a;q)_n = prod_{k<n} (1 - a q^k), or the infinite product.
pub fn qpoch(a: Complex64, q: &QParameter, n: QCount) -> Result<Complex64> {
    ensure_finite("a", a)?;
    match n {
        QCount::Finite(n) => {
            let mut p = Complex64::new(1.0, 0.0);
            let mut qk = 1.0;
            for _ in 0..n {
                p *= 1.0 - a * qk;
                qk *= q.q;
            }
            Ok(p)
        }
        QCount::Infinite => {
            if !(q.q.abs() < 1.0) {
                return Err(Error::DivergentProduct(q.q));
            }
            q.validate()?;
            Ok(qpoch_inf(a, q))
        }
    }
}

fn qpoch_inf(a: Complex64, q: &QParameter) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    let mut t = a;
    let mut k = 0;
    while t.norm() >= q.product_tol && k < MAX_FACTORS {
        p *= 1.0 - t;
        t *= q.q;
        k += 1;
    }
    p
}

/// (q;q)_k for k = 0..=n.
pub fn q_factorials(n: u32, q: &QParameter) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 1.0;
    let mut qk = q.q;
    out.push(1.0);
    for _ in 0..n {
        acc *= 1.0 - qk;
        qk *= q.q;
        out.push(acc);
    }
    out
}

/// q^{binom(k,2)} for integer k of either sign.
pub fn q_triangular(q: f64, k: i64) -> f64 {
    q.powf((k * (k - 1)) as f64 / 2.0)
}

/// H_{m,n}(z1,z2|q) = (q;q)_m (q;q)_n sum_k (-1)^k q^{binom(k,2)} z1^{m-k} z2^{n-k}
///   / ((q;q)_{m-k} (q;q)_{n-k} (q;q)_k)
pub fn h2d_q(m: u32, n: u32, z1: Complex64, z2: Complex64, q: &QParameter) -> Result<Complex64> {
    q.validate()?;
    ensure_finite("z1", z1)?;
    ensure_finite("z2", z2)?;
    let f = q_factorials(m.max(n), q);
    Ok(f[m as usize] * f[n as usize] * h2d_q_scaled(m, n, z1, z2, q.q, &f))
}

fn h2d_q_scaled(m: u32, n: u32, z1: Complex64, z2: Complex64, q: f64, f: &[f64]) -> Complex64 {
    let mut acc = ComplexSum::new();
    for k in 0..=m.min(n) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign * q_triangular(q, k as i64)
            / (f[(m - k) as usize] * f[(n - k) as usize] * f[k as usize]);
        acc.add(c * z1.powu(m - k) * z2.powu(n - k));
    }
    acc.value()
}

/// Table of H_{m,n}(z1,z2|q) / ((q;q)_m (q;q)_n) for m, n <= max.
pub fn h2d_q_scaled_table(
    max: u32,
    z1: Complex64,
    z2: Complex64,
    q: &QParameter,
) -> Vec<Vec<Complex64>> {
    let f = q_factorials(max, q);
    (0..=max)
        .map(|m| {
            (0..=max)
                .map(|n| h2d_q_scaled(m, n, z1, z2, q.q, &f))
                .collect()
        })
        .collect()
}

/// (uv;q)_inf / ((u z1, v z2;q)_inf) against the double series truncated
/// at m + n <= degree_cap.
pub fn gf_h2d_q_check(
    z1: Complex64,
    z2: Complex64,
    u: Complex64,
    v: Complex64,
    q: &QParameter,
    degree_cap: u32,
) -> Result<Comparison> {
    q.validate()?;
    for (name, z) in [("z1", z1), ("z2", z2), ("u", u), ("v", v)] {
        ensure_finite(name, z)?;
    }
    if (u * z1).norm() >= 1.0 || (v * z2).norm() >= 1.0 {
        return Err(Error::DomainViolation(format!(
            "generating function needs |u z1| < 1 and |v z2| < 1, got {} and {}",
            (u * z1).norm(),
            (v * z2).norm()
        )));
    }
    let lhs = qpoch_inf(u * v, q) / (qpoch_inf(u * z1, q) * qpoch_inf(v * z2, q));
    let table = h2d_q_scaled_table(degree_cap, z1, z2, q);
    let mut acc = ComplexSum::new();
    for m in 0..=degree_cap {
        for n in 0..=degree_cap - m {
            acc.add(table[m as usize][n as usize] * u.powu(m) * v.powu(n));
        }
    }
    Ok(Comparison::exact(lhs, acc.value()))
}

/// (e^{2i theta}, e^{-2i theta}; q)_inf in the real form
/// prod_k (1 - 2 q^k cos 2theta + q^{2k}).
pub fn q_hermite_weight(theta: f64, q: &QParameter) -> f64 {
    let c2 = (2.0 * theta).cos();
    let mut p = 1.0;
    let mut qk = 1.0;
    let mut k = 0;
    while (k == 0 || qk >= q.product_tol) && k < MAX_FACTORS {
        p *= 1.0 - 2.0 * qk * c2 + qk * qk;
        qk *= q.q;
        k += 1;
    }
    p
}

/// 1 / (t e^{i theta}, t e^{-i theta}; q)_inf
fn inverse_pair(t: Complex64, cos_theta: f64, q: &QParameter) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    let mut tk = t;
    let mut k = 0;
    while tk.norm() >= q.product_tol && k < MAX_FACTORS {
        p *= 1.0 - 2.0 * tk * cos_theta + tk * tk;
        tk *= q.q;
        k += 1;
    }
    p.inv()
}

fn check_points(points: usize) -> Result<()> {
    if points < 2 {
        return Err(Error::InvalidInput(format!(
            "circle quadrature needs at least 2 points, got {points}"
        )));
    }
    Ok(())
}

/// Trapezoid integral over [-pi, pi) of f, with the doubling check.
fn full_circle(points: usize, f: impl Fn(f64) -> Complex64) -> Result<(Complex64, f64)> {
    check_points(points)?;
    let r = refine(points, SELF_CONSISTENCY_TOL, |p| {
        Ok(periodic_trapezoid(-PI, 2.0 * PI, p, &f))
    })?;
    Ok((r.value, r.change))
}

/// int_0^pi w(theta) / prod_j (t_j e^{i theta}, t_j e^{-i theta};q)_inf dtheta against
/// 2 pi (t1 t2 t3 t4;q)_inf / ((q;q)_inf prod_{j<k} (t_j t_k;q)_inf).
pub fn askey_wilson_integral(
    t: [Complex64; 4],
    q: &QParameter,
    points: usize,
) -> Result<Comparison> {
    q.validate()?;
    for (j, tj) in t.iter().enumerate() {
        ensure_finite(&format!("t{}", j + 1), *tj)?;
    }
    let tmax = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if tmax >= 1.0 {
        return Err(Error::DomainViolation(format!(
            "integral needs max |t_j| < 1, got {tmax}"
        )));
    }
    // the integrand is even and 2pi-periodic, so int_0^pi is half the full period
    let (full, change) = full_circle(points, |theta| {
        let ct = theta.cos();
        let mut v = Complex64::new(q_hermite_weight(theta, q), 0.0);
        for &tj in &t {
            v *= inverse_pair(tj, ct, q);
        }
        v
    })?;
    let quadrature = full / 2.0;
    let mut den = qpoch_inf(Complex64::new(q.q, 0.0), q);
    for a in 0..4 {
        for b in a + 1..4 {
            den *= qpoch_inf(t[a] * t[b], q);
        }
    }
    let closed = 2.0 * PI * qpoch_inf(t[0] * t[1] * t[2] * t[3], q) / den;
    let mut c = Comparison::exact(quadrature, closed);
    c.points = points;
    c.refinement_change = Some(change);
    Ok(c)
}

/// Which normalization of the moment integral reproduces the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentNormalization {
    /// int_{-pi}^{pi} ... dtheta/(2pi)
    FullPeriod,
    /// int_0^pi ... dtheta/(2pi)
    HalfPeriod,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    /// Full-period integral against the closed form.
    pub comparison: Comparison,
    /// int_0^pi e^{2ij theta} w(theta) dtheta/(2pi)
    pub half_period: Complex64,
    pub normalization: MomentNormalization,
}

/// Moments of the q-Hermite weight against
/// (-1)^j (q^{binom(j,2)} + q^{binom(-j,2)}) / (q;q)_inf.
pub fn q_moments_check(j: i64, q: &QParameter, points: usize) -> Result<MomentCheck> {
    q.validate()?;
    let (full, change) = full_circle(points, |theta| {
        Complex64::from_polar(q_hermite_weight(theta, q), 2.0 * j as f64 * theta)
    })?;
    let full = full / (2.0 * PI);
    // the integrand has period pi
    let half = full / 2.0;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let closed = Complex64::new(
        sign * (q_triangular(q.q, j) + q_triangular(q.q, -j))
            / qpoch_inf(Complex64::new(q.q, 0.0), q).re,
        0.0,
    );
    let tol = 1e-10 * (1.0 + closed.norm());
    let normalization = if (full - closed).norm() <= tol {
        MomentNormalization::FullPeriod
    } else if (half - closed).norm() <= tol {
        MomentNormalization::HalfPeriod
    } else {
        MomentNormalization::Neither
    };
    let mut comparison = Comparison::exact(full, closed);
    comparison.points = points;
    comparison.refinement_change = Some(change);
    Ok(MomentCheck {
        comparison,
        half_period: half,
        normalization,
    })
}

/// Outcome of a product-formula check: the closed form against the
/// truncated series and against the circle integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductCheck {
    pub series: Comparison,
    pub quadrature: Comparison,
    pub degree_cap: u32,
    pub term_count: u64,
    /// |sum of the last two shells| / (1 + |partial|)
    pub tail_estimate: f64,
}

/// (-1)^M (q^{binom(M,2)} + q^{binom(-M,2)}) / 2
fn signed_weight(q: f64, m: i64) -> f64 {
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sign * 0.5 * (q_triangular(q, m) + q_triangular(q, -m))
}

/// Summand of the two-generating-function product series at
/// (m1, n1, m2, n2); zero off the parity class m1 + m2 - n1 - n2 even.
pub fn asc_term(idx: [u32; 4], table: &[Vec<Complex64>], r: f64, s: f64, q: f64) -> Complex64 {
    let [m1, n1, m2, n2] = idx;
    let p = m1 as i64 + n2 as i64 - n1 as i64 - m2 as i64;
    if p % 2 != 0 {
        return Complex64::new(0.0, 0.0);
    }
    table[m1 as usize][n1 as usize]
        * table[m2 as usize][n2 as usize]
        * r.powi((m1 + m2) as i32)
        * s.powi((n1 + n2) as i32)
        * signed_weight(q, p / 2)
}

fn series_by_shells(
    parts: usize,
    cap: u32,
    mut term: impl FnMut(&[u32]) -> Complex64,
) -> Result<(Complex64, u64, f64)> {
    let mut total = ComplexSum::new();
    let mut norms = Vec::with_capacity(cap as usize + 1);
    let mut count = 0u64;
    for d in 0..=cap {
        let mut shell = ComplexSum::new();
        let mut it = Compositions::new(parts, d);
        while let Some(idx) = it.next_ref() {
            shell.add(term(idx));
            count += 1;
        }
        let v = shell.value();
        norms.push(v.norm());
        total.add(v);
    }
    let value = total.value();
    let tail = norms.iter().rev().take(2).sum::<f64>() / (1.0 + value.norm());
    if !(tail <= SERIES_TAIL_TOL) {
        let last = norms.last().copied().unwrap_or(0.0);
        return Err(Error::TruncationNotConverged(Box::new(SeriesResult {
            value,
            degree_reached: cap,
            last_shell_norm: last,
            term_count: count,
            shell_norms: norms,
            converged: false,
            domain: ActiveDomain::Unrestricted,
        })));
    }
    Ok((value, count, tail))
}

/// (rs, rs;q)_inf / (z1 z2 r s;q)_inf against the four-fold series over
/// m1 + n1 + m2 + n2 <= degree_cap with weight
/// (-1)^j (q^{binom(j,2)} + q^{binom(-j,2)})/2, j = (m1 + n2 - n1 - m2)/2,
/// and against (q;q)_inf/2 times the circle integral of the product of two
/// generating functions against the q-Hermite weight.
pub fn thm_asc_check(
    z1: Complex64,
    z2: Complex64,
    r: f64,
    s: f64,
    q: &QParameter,
    degree_cap: u32,
    points: usize,
) -> Result<ProductCheck> {
    q.validate()?;
    ensure_finite("z1", z1)?;
    ensure_finite("z2", z2)?;
    if !(r.is_finite() && s.is_finite()) {
        return Err(Error::InvalidInput("r and s must be finite".into()));
    }
    if (r * z1).norm() >= 1.0 || (s * z2).norm() >= 1.0 || (r * s).abs() >= 1.0 {
        return Err(Error::DomainViolation(format!(
            "product formula needs |r z1|, |s z2|, |rs| < 1, got {}, {}, {}",
            (r * z1).norm(),
            (s * z2).norm(),
            (r * s).abs()
        )));
    }
    let rs = Complex64::new(r * s, 0.0);
    let lhs = qpoch_inf(rs, q).powu(2) / qpoch_inf(z1 * z2 * rs, q);

    let table = h2d_q_scaled_table(degree_cap, z1, z2, q);
    let (series, term_count, tail) = series_by_shells(4, degree_cap, |idx| {
        asc_term([idx[0], idx[1], idx[2], idx[3]], &table, r, s, q.q)
    })?;

    let qq = qpoch_inf(Complex64::new(q.q, 0.0), q);
    let a = z1 * r;
    let b = z2 * s;
    let (integral, change) = full_circle(points, |theta| {
        let ct = theta.cos();
        q_hermite_weight(theta, q) * inverse_pair(a, ct, q) * inverse_pair(b, ct, q)
    })?;
    let from_quadrature = qpoch_inf(rs, q).powu(2) * integral / (2.0 * PI) * qq / 2.0;
    let mut quadrature = Comparison::exact(lhs, from_quadrature);
    quadrature.points = points;
    quadrature.refinement_change = Some(change);
    Ok(ProductCheck {
        series: Comparison::exact(lhs, series),
        quadrature,
        degree_cap,
        term_count,
        tail_estimate: tail,
    })
}

/// Four generating functions: Askey-Wilson parameters
/// (r1 z1, s1 z2, r2 z3, s2 z4). The closed form is
/// (r1s1, r1s1, r2s2, r2s2, t1t2t3t4;q)_inf / prod_{a<b} (t_a t_b;q)_inf and the
/// series runs over eight indices with total degree <= degree_cap.
#[allow(clippy::too_many_arguments)]
pub fn qks_check(
    z: [Complex64; 4],
    r1: f64,
    r2: f64,
    s1: f64,
    s2: f64,
    q: &QParameter,
    degree_cap: u32,
    points: usize,
) -> Result<ProductCheck> {
    q.validate()?;
    for (j, zj) in z.iter().enumerate() {
        ensure_finite(&format!("z{}", j + 1), *zj)?;
    }
    if ![r1, r2, s1, s2].iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput(
            "r and s parameters must be finite".into(),
        ));
    }
    let t = [z[0] * r1, z[1] * s1, z[2] * r2, z[3] * s2];
    let tmax = t.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if tmax >= 1.0 || (r1 * s1).abs() >= 1.0 || (r2 * s2).abs() >= 1.0 {
        return Err(Error::DomainViolation(format!(
            "four-fold formula needs |r1 z1|, |s1 z2|, |r2 z3|, |s2 z4|, |r1 s1|, |r2 s2| < 1 (max |t| = {tmax})"
        )));
    }
    let c = |x: f64| Complex64::new(x, 0.0);
    let pre = qpoch_inf(c(r1 * s1), q).powu(2) * qpoch_inf(c(r2 * s2), q).powu(2);
    let mut den = Complex64::new(1.0, 0.0);
    for a in 0..4 {
        for b in a + 1..4 {
            den *= qpoch_inf(t[a] * t[b], q);
        }
    }
    let lhs = pre * qpoch_inf(t[0] * t[1] * t[2] * t[3], q) / den;

    let t12 = h2d_q_scaled_table(degree_cap, z[0], z[1], q);
    let t34 = h2d_q_scaled_table(degree_cap, z[2], z[3], q);
    let pw = |x: f64| -> Vec<f64> { (0..=2 * degree_cap as i32).map(|k| x.powi(k)).collect() };
    let (pr1, ps1, pr2, ps2) = (pw(r1), pw(s1), pw(r2), pw(s2));
    let (series, term_count, tail) = series_by_shells(8, degree_cap, |k| {
        let [m1, n1, m2, n2, m3, n3, m4, n4] = [k[0], k[1], k[2], k[3], k[4], k[5], k[6], k[7]];
        let p = (m1 + n2 + m3 + n4) as i64 - (n1 + m2 + n3 + m4) as i64;
        if p % 2 != 0 {
            return Complex64::new(0.0, 0.0);
        }
        t12[m1 as usize][n1 as usize]
            * t12[m2 as usize][n2 as usize]
            * t34[m3 as usize][n3 as usize]
            * t34[m4 as usize][n4 as usize]
            * (pr1[(m1 + m2) as usize]
                * ps1[(n1 + n2) as usize]
                * pr2[(m3 + m4) as usize]
                * ps2[(n3 + n4) as usize]
                * signed_weight(q.q, p / 2))
    })?;

    let qq = qpoch_inf(c(q.q), q);
    let (integral, change) = full_circle(points, |theta| {
        let ct = theta.cos();
        let mut v = c(q_hermite_weight(theta, q));
        for &tj in &t {
            v *= inverse_pair(tj, ct, q);
        }
        v
    })?;
    let from_quadrature = pre * integral / (2.0 * PI) * qq / 2.0;
    let mut quadrature = Comparison::exact(lhs, from_quadrature);
    quadrature.points = points;
    quadrature.refinement_change = Some(change);
    Ok(ProductCheck {
        series: Comparison::exact(lhs, series),
        quadrature,
        degree_cap,
        term_count,
        tail_estimate: tail,
    })
}
