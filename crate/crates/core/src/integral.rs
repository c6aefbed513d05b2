//! Integral representations and mixed relations, each evaluated as a pair
//! (left side, right side) so the caller can judge the agreement.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ks::{HERMITIAN_TOL, SYMMETRY_TOL};
use crate::linalg::{cholesky_real, ComplexSquareMatrix};
use crate::poly::{binomial, ensure_finite, factorial, h2d_direct, hermite, laguerre, PolyIndex};
use crate::quad::{
    periodic_trapezoid, refine, GaussHermite, QuadratureKind, QuadratureSpec, SELF_CONSISTENCY_TOL,
};
use crate::sum::ComplexSum;

/// Default point count for circle integrals.
pub const CIRCLE_POINTS: usize = 256;

/// Both sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    /// Point count of the quadrature, 0 for finite sums.
    pub points: usize,
    /// Relative change of the quadrature value under point doubling.
    pub refinement_change: Option<f64>,
}

impl Comparison {
    pub fn exact(lhs: Complex64, rhs: Complex64) -> Self {
        Self {
            lhs,
            rhs,
            abs_err: (lhs - rhs).norm(),
            points: 0,
            refinement_change: None,
        }
    }

    fn quadrature(lhs: Complex64, rhs: Complex64, points: usize, change: f64) -> Self {
        Self {
            points,
            refinement_change: Some(change),
            ..Self::exact(lhs, rhs)
        }
    }

    /// abs_err / (1 + |lhs|)
    pub fn rel_err(&self) -> f64 {
        self.abs_err / (1.0 + self.lhs.norm())
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn expi(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, t)
}

fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => c(1.0),
        1 => Complex64::i(),
        2 => c(-1.0),
        _ => -Complex64::i(),
    }
}

fn check_finite_all(pairs: &[(&str, Complex64)]) -> Result<()> {
    for (name, z) in pairs {
        ensure_finite(name, *z)?;
    }
    Ok(())
}

fn check_real(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} is not finite")))
    }
}

fn require_gauss_hermite(spec: &QuadratureSpec) -> Result<()> {
    spec.validate()?;
    if spec.kind == QuadratureKind::PeriodicTrapezoid {
        return Err(Error::InvalidInput(
            "a Gauss-Hermite rule is required".into(),
        ));
    }
    Ok(())
}

fn circle(points: usize, f: impl Fn(f64) -> Complex64) -> Result<(Complex64, usize, f64)> {
    if points < 2 {
        return Err(Error::InvalidInput(format!(
            "circle quadrature needs at least 2 points, got {points}"
        )));
    }
    let r = refine(points, SELF_CONSISTENCY_TOL, |p| {
        Ok(periodic_trapezoid(0.0, 2.0 * PI, p, &f))
    })?;
    Ok((r.value, points, r.change))
}

/// H_n(x) e^{-x^2} against (-2i)^n / sqrt(pi) * int t^n e^{-t^2 + 2ixt} dt.
pub fn check_hermite_moment(n: u32, x: f64, spec: &QuadratureSpec) -> Result<Comparison> {
    spec.require(QuadratureKind::GaussHermite1d)?;
    check_real("x", x)?;
    let min_points = n as usize / 2 + 10;
    if spec.points < min_points {
        return Err(Error::InvalidInput(format!(
            "{} points cannot resolve degree {n}; need at least {min_points}",
            spec.points
        )));
    }
    let lhs = hermite(n, c(x)) * (-x * x).exp();
    let prefactor = i_pow(3 * n as i64) * 2f64.powi(n as i32) / PI.sqrt();
    let r = refine(spec.points, SELF_CONSISTENCY_TOL, |p| {
        let g = GaussHermite::cached(p);
        Ok(g.integrate(|t| t.powi(n as i32) * expi(2.0 * x * t)))
    })?;
    Ok(Comparison::quadrature(
        lhs,
        prefactor * r.value,
        spec.points,
        r.change,
    ))
}

/// e^{-z1 z2} H_{m,n}(z1, z2) against the plane integral
/// 1/(pi i^{m+n}) int conj(w)^m w^n exp(-|w|^2 + i z1 w + i z2 conj(w)).
pub fn check_h2d_moment(
    m: u32,
    n: u32,
    z1: Complex64,
    z2: Complex64,
    spec: &QuadratureSpec,
) -> Result<Comparison> {
    spec.require(QuadratureKind::GaussHermite2dTensor)?;
    check_finite_all(&[("z1", z1), ("z2", z2)])?;
    plane_points_ok(m, n, spec)?;
    let lhs = (-z1 * z2).exp() * h2d_direct(PolyIndex::new(m, n), z1, z2);
    let iu = Complex64::i();
    let r = refine(spec.points, SELF_CONSISTENCY_TOL, |p| {
        let g = GaussHermite::cached(p);
        Ok(g.integrate_tensor(2, |x| {
            let w = Complex64::new(x[0], x[1]);
            let wb = w.conj();
            wb.powu(m) * w.powu(n) * (iu * z1 * w + iu * z2 * wb).exp()
        }))
    })?;
    let rhs = r.value / (PI * i_pow((m + n) as i64));
    Ok(Comparison::quadrature(lhs, rhs, spec.points, r.change))
}

/// Conjugate-argument form: e^{-|z|^2} H_{m,n}(z, conj z) against
/// i^{m+n}/pi int w^m conj(w)^n exp(-|w|^2 - 2i Re(w conj z)).
pub fn check_h2d_moment_conjugate(
    m: u32,
    n: u32,
    z: Complex64,
    spec: &QuadratureSpec,
) -> Result<Comparison> {
    spec.require(QuadratureKind::GaussHermite2dTensor)?;
    ensure_finite("z", z)?;
    plane_points_ok(m, n, spec)?;
    let lhs = (-z.norm_sqr()).exp() * h2d_direct(PolyIndex::new(m, n), z, z.conj());
    let r = refine(spec.points, SELF_CONSISTENCY_TOL, |p| {
        let g = GaussHermite::cached(p);
        Ok(g.integrate_tensor(2, |x| {
            let w = Complex64::new(x[0], x[1]);
            w.powu(m) * w.conj().powu(n) * expi(-2.0 * (w * z.conj()).re)
        }))
    })?;
    let rhs = i_pow((m + n) as i64) / PI * r.value;
    Ok(Comparison::quadrature(lhs, rhs, spec.points, r.change))
}

fn plane_points_ok(m: u32, n: u32, spec: &QuadratureSpec) -> Result<()> {
    let min_points = (m + n) as usize / 2 + 10;
    if spec.points < min_points {
        return Err(Error::InvalidInput(format!(
            "{} points per axis cannot resolve degree {}; need at least {min_points}",
            spec.points,
            m + n
        )));
    }
    Ok(())
}

/// Circle form with H_{n+m+1} of a complex argument:
/// e^{-z1 z2} H_{m,n}(z1, z2), z1 = r1 e^{i theta1}, z2 = r2 e^{i theta2}, against
/// i/(2^{m+n+1} sqrt(pi)) int_0^{2pi} H_{n+m+1}(zeta/2) exp(-zeta^2/4 + i(n-m)phi) dphi
/// with zeta = r1 e^{i(theta1+phi)} + r2 e^{i(theta2-phi)}.
///
/// The integrand changes sign under phi -> phi + pi, so the integral is zero.
pub fn check_circle_rep(
    m: u32,
    n: u32,
    r1: f64,
    theta1: f64,
    r2: f64,
    theta2: f64,
    points: usize,
) -> Result<Comparison> {
    for (name, v) in [
        ("r1", r1),
        ("theta1", theta1),
        ("r2", r2),
        ("theta2", theta2),
    ] {
        check_real(name, v)?;
    }
    let z1 = Complex64::from_polar(r1, theta1);
    let z2 = Complex64::from_polar(r2, theta2);
    let lhs = (-z1 * z2).exp() * h2d_direct(PolyIndex::new(m, n), z1, z2);
    let k = n as f64 - m as f64;
    let (integral, p, change) = circle(points, |phi| {
        let zeta =
            Complex64::from_polar(r1, theta1 + phi) + Complex64::from_polar(r2, theta2 - phi);
        hermite(n + m + 1, zeta / 2.0) * (-zeta * zeta / 4.0 + Complex64::new(0.0, k * phi)).exp()
    })?;
    let rhs = Complex64::i() / (2f64.powi((m + n + 1) as i32) * PI.sqrt()) * integral;
    Ok(Comparison::quadrature(lhs, rhs, p, change))
}

/// Special case z1 = r e^{i theta}, z2 = r e^{-i theta} of [`check_circle_rep`].
pub fn check_circle_rep_conjugate(
    m: u32,
    n: u32,
    r: f64,
    theta: f64,
    points: usize,
) -> Result<Comparison> {
    check_real("r", r)?;
    check_real("theta", theta)?;
    let z = Complex64::from_polar(r, theta);
    let lhs = (-r * r).exp() * h2d_direct(PolyIndex::new(m, n), z, z.conj());
    let integral = cosine_circle(m, n, r, points)?;
    let rhs = Complex64::i() * expi((m as f64 - n as f64) * theta)
        / (2f64.powi((m + n + 1) as i32) * PI.sqrt())
        * integral.0;
    Ok(Comparison::quadrature(lhs, rhs, integral.1, integral.2))
}

/// i/(2 sqrt(pi)) int H_{n+m+1}(r cos phi) exp(-r^2 cos^2 phi + i(n-m)phi) dphi
/// against (-1)^n 2^{m+n} n! r^{m-n} e^{-r^2} L_n^{(m-n)}(r^2).
pub fn check_circle_rep_laguerre(m: u32, n: u32, r: f64, points: usize) -> Result<Comparison> {
    check_real("r", r)?;
    if r == 0.0 && m < n {
        return Err(Error::ZeroParameter("r"));
    }
    let integral = cosine_circle(m, n, r, points)?;
    let lhs = Complex64::i() / (2.0 * PI.sqrt()) * integral.0;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let rhs = sign
        * 2f64.powi((m + n) as i32)
        * factorial(n)
        * r.powi(m as i32 - n as i32)
        * (-r * r).exp()
        * laguerre(n, m as i64 - n as i64, c(r * r));
    Ok(Comparison::quadrature(lhs, rhs, integral.1, integral.2))
}

fn cosine_circle(m: u32, n: u32, r: f64, points: usize) -> Result<(Complex64, usize, f64)> {
    let k = n as f64 - m as f64;
    circle(points, |phi| {
        let x = r * phi.cos();
        hermite(n + m + 1, c(x)) * (-x * x).exp() * expi(k * phi)
    })
}

/// H_{m,n}(z1, z2) against the Fourier form
/// m! n! / ((m+n)! 2 pi) int_0^{2pi} H_{m+n}((z1 e^{i phi} + z2 e^{-i phi})/2) e^{i(n-m)phi} dphi.
pub fn check_circle_rep_fourier(
    m: u32,
    n: u32,
    z1: Complex64,
    z2: Complex64,
    points: usize,
) -> Result<Comparison> {
    check_finite_all(&[("z1", z1), ("z2", z2)])?;
    let lhs = h2d_direct(PolyIndex::new(m, n), z1, z2);
    let k = n as f64 - m as f64;
    let (integral, p, change) = circle(points, |phi| {
        hermite(m + n, (z1 * expi(phi) + z2 * expi(-phi)) / 2.0) * expi(k * phi)
    })?;
    let scale = factorial(m) * factorial(n) / (factorial(m + n) * 2.0 * PI);
    Ok(Comparison::quadrature(lhs, scale * integral, p, change))
}

/// Tensor quadrature of int exp(-X^T A X + 2i B^T X) dX after the change of
/// variables Y = L^T X (A = L L^T), against sqrt(pi^N / det A) e^{-B^T A^{-1} B}.
pub fn check_normal_integral_real(
    a: &[Vec<f64>],
    b: &[f64],
    spec: &QuadratureSpec,
) -> Result<Comparison> {
    require_gauss_hermite(spec)?;
    let dim = a.len();
    if dim == 0 || dim > 3 {
        return Err(Error::InvalidInput(format!(
            "real normal integral supports 1 to 3 dimensions, got {dim}"
        )));
    }
    if b.len() != dim || a.iter().any(|row| row.len() != dim) {
        return Err(Error::InvalidInput(
            "matrix and vector sizes disagree".into(),
        ));
    }
    for &x in a.iter().flatten().chain(b) {
        check_real("entry", x)?;
    }
    let mut asym = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            asym = asym.max((a[i][j] - a[j][i]).abs());
        }
    }
    if asym > SYMMETRY_TOL * (1.0 + asym.max(1.0)) {
        return Err(Error::Asymmetry(asym));
    }
    let l = cholesky_real(a)?;
    let det_l: f64 = (0..dim).map(|i| l[i][i]).product();
    // forward solve L c = B
    let mut cvec = vec![0.0; dim];
    for i in 0..dim {
        let s: f64 = (0..i).map(|k| l[i][k] * cvec[k]).sum();
        cvec[i] = (b[i] - s) / l[i][i];
    }
    let r = refine(spec.points, SELF_CONSISTENCY_TOL, |p| {
        let g = GaussHermite::cached(p);
        Ok(g.integrate_tensor(dim, |y| {
            let phase: f64 = y.iter().zip(&cvec).map(|(yi, ci)| yi * ci).sum();
            expi(2.0 * phase)
        }))
    })?;
    let lhs = r.value / det_l;

    let am = ComplexSquareMatrix::from_real_rows(a)?;
    let lu = am.lu()?;
    let bc: Vec<Complex64> = b.iter().map(|&x| c(x)).collect();
    let ainv_b = lu.solve(&bc);
    let quad: Complex64 = bc.iter().zip(&ainv_b).map(|(x, y)| x * y).sum();
    let rhs = (PI.powi(dim as i32) / lu.det()).sqrt() * (-quad).exp();
    Ok(Comparison::quadrature(lhs, rhs, spec.points, r.change))
}

/// int_{C^N} exp(-Z^*(I+H)Z + 2i Re(W^* Z)) against
/// pi^N exp(-W^*(I+H)^{-1}W) / det(I+H). The quadrature runs in 2N real
/// dimensions.
pub fn check_normal_integral_complex(
    h: &ComplexSquareMatrix,
    w: &[Complex64],
    spec: &QuadratureSpec,
) -> Result<Comparison> {
    require_gauss_hermite(spec)?;
    let dim = h.dim();
    if dim == 0 || dim > 2 {
        return Err(Error::InvalidInput(format!(
            "complex normal integral supports 1 or 2 dimensions, got {dim}"
        )));
    }
    if w.len() != dim {
        return Err(Error::InvalidInput(
            "matrix and vector sizes disagree".into(),
        ));
    }
    for (i, &z) in w.iter().enumerate() {
        ensure_finite(&format!("w[{i}]"), z)?;
    }
    let a = h.shifted_identity();
    if a.non_hermiticity() > HERMITIAN_TOL {
        return Err(Error::NotPd);
    }
    // Z^* A Z = [X;Y]^T [[Re A, -Im A], [Im A, Re A]] [X;Y]
    let n2 = 2 * dim;
    let mut m = vec![vec![0.0; n2]; n2];
    for i in 0..dim {
        for j in 0..dim {
            let z = a.get(i, j);
            m[i][j] = z.re;
            m[i + dim][j + dim] = z.re;
            m[i][j + dim] = -z.im;
            m[i + dim][j] = z.im;
        }
    }
    for i in 0..n2 {
        for j in 0..i {
            let avg = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = avg;
            m[j][i] = avg;
        }
    }
    let mut bvec = vec![0.0; n2];
    for (j, z) in w.iter().enumerate() {
        bvec[j] = z.re;
        bvec[j + dim] = z.im;
    }
    let l = cholesky_real(&m).map_err(|_| Error::NotPd)?;
    let det_l: f64 = (0..n2).map(|i| l[i][i]).product();
    let mut cvec = vec![0.0; n2];
    for i in 0..n2 {
        let s: f64 = (0..i).map(|k| l[i][k] * cvec[k]).sum();
        cvec[i] = (bvec[i] - s) / l[i][i];
    }
    let r = refine(spec.points, SELF_CONSISTENCY_TOL, |p| {
        let g = GaussHermite::cached(p);
        Ok(g.integrate_tensor(n2, |y| {
            let phase: f64 = y.iter().zip(&cvec).map(|(yi, ci)| yi * ci).sum();
            expi(2.0 * phase)
        }))
    })?;
    let lhs = r.value / det_l;

    let lu = a.lu()?;
    let sol = lu.solve(w);
    let quad: Complex64 = w.iter().zip(&sol).map(|(x, y)| x.conj() * y).sum();
    let rhs = PI.powi(dim as i32) * (-quad).exp() / lu.det();
    Ok(Comparison::quadrature(lhs, rhs, spec.points, r.change))
}

/// Power of rho in the squared-average Laguerre sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoPower {
    /// rho^{4j}; agrees with the circle average.
    Four,
    /// rho^{2j}
    Two,
}

/// Phase convention of the rotated product expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationPhase {
    /// i^{n-m} i^{j-k}
    Forward,
    /// i^{m-n} i^{k-j}
    Reversed,
}

/// Index range of the rotated product expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexBounds {
    /// j <= m, k <= n
    Full,
    /// j, k <= min(m, n)
    Min,
}

/// Relations between 1D and 2D Hermite polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum MixedRelation {
    /// H_n((w1+w2)/2) = z^n sum_j binom(n,j) H_{j,n-j}(z w1, w2/z) z^{-2j}
    SplitSum {
        n: u32,
        w1: Complex64,
        w2: Complex64,
        z: Complex64,
    },
    /// H_n(rho(z+1/z)/2) = n!/(-rho z)^n sum_j (-rho^2 z^2)^j/j! L_{n-j}^{(2j-n)}(rho^2)
    LaguerreSum { n: u32, rho: f64, z: Complex64 },
    /// The z = e^{i theta} case of `LaguerreSum`.
    CosineLaguerre { n: u32, rho: f64, theta: f64 },
    /// int_0^{2pi} H_n(rho cos t) e^{-ikt} dt, zero unless n+k is even.
    FourierCoefficient { n: u32, k: i32, rho: f64 },
    /// int_0^{2pi} H_n(rho cos t)^2 dt/(2pi) as a sum of squared Laguerre values.
    SquaredAverage { n: u32, rho: f64, power: RhoPower },
    /// H_{m,n}(w1 - i w2, w1 + i w2) as a double sum of H_{j+k}(w1) H_{m+n-j-k}(w2).
    RotatedProduct {
        m: u32,
        n: u32,
        w1: Complex64,
        w2: Complex64,
        phase: RotationPhase,
        bounds: IndexBounds,
    },
    /// H_{m,n}(z1+w1, z2+w2) e^{-(w1 w2 + z1 w2 + z2 w1)} as a series in w1, w2,
    /// truncated at j + k <= cap.
    Shift {
        m: u32,
        n: u32,
        z1: Complex64,
        z2: Complex64,
        w1: Complex64,
        w2: Complex64,
        cap: u32,
    },
    /// H_{m,n}(0,0) = delta_{mn} (-1)^n n!
    Origin { m: u32, n: u32 },
}

impl MixedRelation {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SplitSum { .. } => "split_sum",
            Self::LaguerreSum { .. } => "laguerre_sum",
            Self::CosineLaguerre { .. } => "cosine_laguerre",
            Self::FourierCoefficient { .. } => "fourier_coefficient",
            Self::SquaredAverage { .. } => "squared_average",
            Self::RotatedProduct { .. } => "rotated_product",
            Self::Shift { .. } => "shift",
            Self::Origin { .. } => "origin",
        }
    }
}

fn positive_rho(rho: f64) -> Result<()> {
    check_real("rho", rho)?;
    if rho == 0.0 {
        return Err(Error::ZeroParameter("rho"));
    }
    if rho < 0.0 {
        return Err(Error::InvalidInput("rho must be positive".into()));
    }
    Ok(())
}

fn laguerre_sum(n: u32, rho: f64, z: Complex64) -> Complex64 {
    let mut acc = ComplexSum::new();
    let t = -rho * rho * z * z;
    for j in 0..=n {
        acc.add(t.powu(j) / factorial(j) * laguerre(n - j, 2 * j as i64 - n as i64, c(rho * rho)));
    }
    factorial(n) / (-rho * z).powu(n) * acc.value()
}

/// Evaluates both sides of a mixed relation. Circle integrals use the
/// periodic trapezoid rule with `points` nodes.
pub fn check_mixed_relations(case: &MixedRelation, points: usize) -> Result<Comparison> {
    match *case {
        MixedRelation::SplitSum { n, w1, w2, z } => {
            check_finite_all(&[("w1", w1), ("w2", w2), ("z", z)])?;
            if z == Complex64::new(0.0, 0.0) {
                return Err(Error::ZeroParameter("z"));
            }
            let lhs = hermite(n, (w1 + w2) / 2.0);
            let mut acc = ComplexSum::new();
            for j in 0..=n {
                acc.add(
                    binomial(n, j)
                        * h2d_direct(PolyIndex::new(j, n - j), z * w1, w2 / z)
                        * z.powi(-2 * j as i32),
                );
            }
            Ok(Comparison::exact(lhs, z.powu(n) * acc.value()))
        }
        MixedRelation::LaguerreSum { n, rho, z } => {
            ensure_finite("z", z)?;
            positive_rho(rho)?;
            if z == Complex64::new(0.0, 0.0) {
                return Err(Error::ZeroParameter("z"));
            }
            let lhs = hermite(n, rho * (z + z.inv()) / 2.0);
            Ok(Comparison::exact(lhs, laguerre_sum(n, rho, z)))
        }
        MixedRelation::CosineLaguerre { n, rho, theta } => {
            positive_rho(rho)?;
            check_real("theta", theta)?;
            let lhs = hermite(n, c(rho * theta.cos()));
            Ok(Comparison::exact(lhs, laguerre_sum(n, rho, expi(theta))))
        }
        MixedRelation::FourierCoefficient { n, k, rho } => {
            positive_rho(rho)?;
            if k.unsigned_abs() > n {
                return Err(Error::InvalidInput(format!(
                    "|k| = {} exceeds n = {n}",
                    k.abs()
                )));
            }
            let (lhs, p, change) = circle(points, |t| {
                hermite(n, c(rho * t.cos())) * expi(-(k as f64) * t)
            })?;
            let nk = n as i64 + k as i64;
            let rhs = if nk % 2 != 0 {
                c(0.0)
            } else {
                let half_diff = (n as i64 - k as i64) / 2;
                let sign = if half_diff % 2 == 0 { 1.0 } else { -1.0 };
                2.0 * PI * factorial(n) * sign * rho.powi(k) / factorial((nk / 2) as u32)
                    * laguerre(half_diff as u32, k as i64, c(rho * rho))
            };
            Ok(Comparison::quadrature(lhs, rhs, p, change))
        }
        MixedRelation::SquaredAverage { n, rho, power } => {
            positive_rho(rho)?;
            let (avg, p, change) = circle(points, |t| hermite(n, c(rho * t.cos())).powu(2))?;
            let lhs = avg / (2.0 * PI);
            let step = match power {
                RhoPower::Four => 4,
                RhoPower::Two => 2,
            };
            let mut acc = ComplexSum::new();
            for j in 0..=n {
                let l = laguerre(n - j, 2 * j as i64 - n as i64, c(rho * rho));
                acc.add(rho.powi(step * j as i32) / factorial(j).powi(2) * l * l);
            }
            let rhs = factorial(n).powi(2) / rho.powi(2 * n as i32) * acc.value();
            Ok(Comparison::quadrature(lhs, rhs, p, change))
        }
        MixedRelation::RotatedProduct {
            m,
            n,
            w1,
            w2,
            phase,
            bounds,
        } => {
            check_finite_all(&[("w1", w1), ("w2", w2)])?;
            let iu = Complex64::i();
            let lhs = h2d_direct(PolyIndex::new(m, n), w1 - iu * w2, w1 + iu * w2);
            let (jmax, kmax) = match bounds {
                IndexBounds::Full => (m, n),
                IndexBounds::Min => (m.min(n), m.min(n)),
            };
            let h1: Vec<Complex64> = (0..=m + n).map(|d| hermite(d, w1)).collect();
            let h2: Vec<Complex64> = (0..=m + n).map(|d| hermite(d, w2)).collect();
            let sgn = match phase {
                RotationPhase::Forward => 1,
                RotationPhase::Reversed => -1,
            };
            let mut acc = ComplexSum::new();
            for j in 0..=jmax {
                for k in 0..=kmax {
                    acc.add(
                        binomial(m, j)
                            * binomial(n, k)
                            * i_pow(sgn * (j as i64 - k as i64))
                            * h1[(j + k) as usize]
                            * h2[(m + n - j - k) as usize],
                    );
                }
            }
            let rhs = i_pow(sgn * (n as i64 - m as i64)) / 2f64.powi((m + n) as i32) * acc.value();
            Ok(Comparison::exact(lhs, rhs))
        }
        MixedRelation::Shift {
            m,
            n,
            z1,
            z2,
            w1,
            w2,
            cap,
        } => {
            check_finite_all(&[("z1", z1), ("z2", z2), ("w1", w1), ("w2", w2)])?;
            let lhs = h2d_direct(PolyIndex::new(m, n), z1 + w1, z2 + w2)
                * (-(w1 * w2 + z1 * w2 + z2 * w1)).exp();
            let table = crate::poly::h2d_table(m.max(n) + cap, z1, z2);
            let mut acc = ComplexSum::new();
            for j in 0..=cap {
                for k in 0..=cap - j {
                    acc.add(
                        (-w1).powu(j) * (-w2).powu(k) / (factorial(j) * factorial(k))
                            * table[(m + k) as usize][(n + j) as usize],
                    );
                }
            }
            Ok(Comparison::exact(lhs, acc.value()))
        }
        MixedRelation::Origin { m, n } => {
            let zero = c(0.0);
            let lhs = h2d_direct(PolyIndex::new(m, n), zero, zero);
            let rhs = if m == n {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                c(sign * factorial(n))
            } else {
                zero
            };
            Ok(Comparison::exact(lhs, rhs))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gh1(p: usize) -> QuadratureSpec {
        QuadratureSpec::new(QuadratureKind::GaussHermite1d, p).unwrap()
    }

    fn gh2(p: usize) -> QuadratureSpec {
        QuadratureSpec::new(QuadratureKind::GaussHermite2dTensor, p).unwrap()
    }

    #[test]
    fn hermite_moment_examples() {
        let r = check_hermite_moment(0, 0.0, &gh1(20)).unwrap();
        assert!((r.lhs - 1.0).norm() < 1e-14 && r.abs_err < 1e-14);
        let r = check_hermite_moment(1, 0.0, &gh1(20)).unwrap();
        assert!(r.lhs.norm() < 1e-15 && r.abs_err < 1e-14);
        let r = check_hermite_moment(4, 0.7, &gh1(60)).unwrap();
        assert!(r.abs_err <= 1e-10, "{r:?}");
        assert!(check_hermite_moment(40, 0.7, &gh1(20)).is_err());
    }

    #[test]
    fn plane_moment_examples() {
        let zero = c(0.0);
        let r = check_h2d_moment(0, 0, zero, zero, &gh2(20)).unwrap();
        assert!(r.abs_err < 1e-14);
        let r = check_h2d_moment(1, 0, zero, zero, &gh2(20)).unwrap();
        assert!(r.lhs.norm() < 1e-15 && r.abs_err < 1e-14);
        let r = check_h2d_moment(
            2,
            1,
            Complex64::new(0.5, 0.2),
            Complex64::new(0.1, -0.3),
            &gh2(50),
        )
        .unwrap();
        assert!(r.abs_err <= 1e-9, "{r:?}");
        let r = check_h2d_moment_conjugate(3, 1, Complex64::new(0.4, -0.6), &gh2(40)).unwrap();
        assert!(r.abs_err <= 1e-10, "{r:?}");
    }

    #[test]
    fn complex_argument_circle_form_vanishes() {
        let r = check_circle_rep(0, 0, 1.0, 0.0, 1.0, 0.0, CIRCLE_POINTS).unwrap();
        assert!((r.lhs - (-1f64).exp()).norm() < 1e-15);
        assert!(r.rhs.norm() < 1e-14);
        let r = check_circle_rep(1, 0, 0.0, 0.0, 0.0, 0.0, CIRCLE_POINTS).unwrap();
        assert!(r.abs_err < 1e-14);
        let r = check_circle_rep(2, 1, 0.8, 0.4, 0.6, 1.1, CIRCLE_POINTS).unwrap();
        assert!(r.rhs.norm() < 1e-13 && r.lhs.norm() > 0.1);
    }

    #[test]
    fn general_and_conjugate_circle_forms_agree() {
        for &(m, n) in &[(0, 0), (2, 1), (3, 3), (1, 4)] {
            let g = check_circle_rep(m, n, 0.9, 0.3, 0.9, -0.3, CIRCLE_POINTS).unwrap();
            let s = check_circle_rep_conjugate(m, n, 0.9, 0.3, CIRCLE_POINTS).unwrap();
            assert!((g.rhs - s.rhs).norm() <= 1e-10);
            assert!((g.lhs - s.lhs).norm() <= 1e-12);
        }
    }

    #[test]
    fn laguerre_circle_closed_form_value() {
        let r = check_circle_rep_laguerre(2, 1, 0.8, CIRCLE_POINTS).unwrap();
        let expect = -8.0 * 0.8 * (-0.64f64).exp() * (2.0 - 0.64);
        assert!((r.rhs - expect).norm() < 1e-14);
        assert!(r.lhs.norm() < 1e-13);
        assert!(matches!(
            check_circle_rep_laguerre(0, 2, 0.0, 64),
            Err(Error::ZeroParameter("r"))
        ));
    }

    #[test]
    fn fourier_circle_form_holds() {
        for &(m, n) in &[(0, 0), (2, 1), (1, 3), (6, 6), (5, 2)] {
            let r = check_circle_rep_fourier(
                m,
                n,
                Complex64::new(0.5, 0.2),
                Complex64::new(0.1, -0.3),
                64,
            )
            .unwrap();
            assert!(r.abs_err < 1e-12 * (1.0 + r.lhs.norm()), "{m} {n} {r:?}");
        }
    }

    #[test]
    fn real_normal_integral_examples() {
        let r =
            check_normal_integral_real(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0], &gh2(10))
                .unwrap();
        assert!((r.rhs - PI).norm() < 1e-14 && r.abs_err < 1e-13);
        let r =
            check_normal_integral_real(&[vec![1.0, 0.0], vec![0.0, 2.0]], &[0.0, 0.0], &gh2(10))
                .unwrap();
        assert!((r.rhs - PI / 2f64.sqrt()).norm() < 1e-14);
        let r =
            check_normal_integral_real(&[vec![2.0, 0.5], vec![0.5, 1.0]], &[1.0, 0.0], &gh2(30))
                .unwrap();
        assert!(r.abs_err <= 1e-9, "{r:?}");
        assert!(matches!(
            check_normal_integral_real(&[vec![1.0, 2.0], vec![2.0, 1.0]], &[0.0, 0.0], &gh2(10)),
            Err(Error::NotSpd)
        ));
        assert!(matches!(
            check_normal_integral_real(&[vec![1.0, 0.1], vec![0.0, 1.0]], &[0.0, 0.0], &gh2(10)),
            Err(Error::Asymmetry(_))
        ));
    }

    #[test]
    fn complex_normal_integral_examples() {
        let zero = ComplexSquareMatrix::zeros(1);
        let r = check_normal_integral_complex(&zero, &[c(0.0)], &gh2(10)).unwrap();
        assert!((r.rhs - PI).norm() < 1e-14 && r.abs_err < 1e-13);
        let w = Complex64::new(0.6, -0.8);
        let r = check_normal_integral_complex(&zero, &[w], &gh2(24)).unwrap();
        assert!((r.rhs - PI * (-1.0f64).exp()).norm() < 1e-14 && r.abs_err < 1e-12);
        let h = ComplexSquareMatrix::from_real_rows(&[vec![0.4]]).unwrap();
        let r = check_normal_integral_complex(&h, &[c(1.0)], &gh2(24)).unwrap();
        assert!(r.abs_err <= 1e-8, "{r:?}");
        let h = ComplexSquareMatrix::from_rows(&[
            vec![c(0.3), Complex64::new(0.1, 0.2)],
            vec![Complex64::new(0.1, -0.2), c(-0.2)],
        ])
        .unwrap();
        let r = check_normal_integral_complex(&h, &[Complex64::new(0.3, 0.5), c(-0.4)], &gh2(16))
            .unwrap();
        assert!(r.abs_err <= 1e-8, "{r:?}");
        let bad = ComplexSquareMatrix::from_real_rows(&[vec![-1.5]]).unwrap();
        assert!(matches!(
            check_normal_integral_complex(&bad, &[c(0.0)], &gh2(10)),
            Err(Error::NotPd)
        ));
    }

    #[test]
    fn mixed_relation_examples() {
        let z = Complex64::new(0.7, 0.3);
        let r = check_mixed_relations(
            &MixedRelation::SplitSum {
                n: 0,
                w1: z,
                w2: z,
                z,
            },
            CIRCLE_POINTS,
        )
        .unwrap();
        assert!((r.lhs - 1.0).norm() < 1e-15 && r.abs_err < 1e-15);
        let r = check_mixed_relations(
            &MixedRelation::FourierCoefficient {
                n: 1,
                k: 0,
                rho: 1.0,
            },
            CIRCLE_POINTS,
        )
        .unwrap();
        assert!(r.lhs.norm() < 1e-14 && r.rhs == c(0.0));
        let r = check_mixed_relations(
            &MixedRelation::FourierCoefficient {
                n: 2,
                k: 0,
                rho: 1.0,
            },
            CIRCLE_POINTS,
        )
        .unwrap();
        assert!(r.rhs.norm() < 1e-14 && r.lhs.norm() < 1e-13);
        let r = check_mixed_relations(
            &MixedRelation::SquaredAverage {
                n: 1,
                rho: 1.0,
                power: RhoPower::Four,
            },
            CIRCLE_POINTS,
        )
        .unwrap();
        assert!((r.lhs - 2.0).norm() < 1e-14 && r.abs_err < 1e-13);
        let r = check_mixed_relations(
            &MixedRelation::Shift {
                m: 2,
                n: 3,
                z1: Complex64::new(0.3, 0.1),
                z2: Complex64::new(-0.2, 0.4),
                w1: c(0.0),
                w2: c(0.0),
                cap: 25,
            },
            CIRCLE_POINTS,
        )
        .unwrap();
        assert!(r.abs_err < 1e-15);
        assert!(matches!(
            check_mixed_relations(
                &MixedRelation::SplitSum {
                    n: 2,
                    w1: z,
                    w2: z,
                    z: c(0.0)
                },
                CIRCLE_POINTS
            ),
            Err(Error::ZeroParameter("z"))
        ));
    }

    #[test]
    fn mixed_relations_hold() {
        let w1 = Complex64::new(0.4, -0.2);
        let w2 = Complex64::new(-0.3, 0.5);
        let z = Complex64::new(0.7, 0.3);
        for n in 0..=8 {
            let cases = [
                MixedRelation::SplitSum { n, w1, w2, z },
                MixedRelation::LaguerreSum { n, rho: 0.8, z },
                MixedRelation::CosineLaguerre {
                    n,
                    rho: 1.3,
                    theta: 0.6,
                },
                MixedRelation::SquaredAverage {
                    n,
                    rho: 0.8,
                    power: RhoPower::Four,
                },
            ];
            for case in &cases {
                let r = check_mixed_relations(case, CIRCLE_POINTS).unwrap();
                assert!(r.rel_err() <= 1e-10, "{case:?} {r:?}");
            }
            for k in -(n as i32)..=(n as i32) {
                let r = check_mixed_relations(
                    &MixedRelation::FourierCoefficient { n, k, rho: 0.9 },
                    CIRCLE_POINTS,
                )
                .unwrap();
                assert!(r.rel_err() <= 1e-10, "n={n} k={k} {r:?}");
            }
        }
    }

    #[test]
    fn squared_average_low_power_disagrees() {
        let r = check_mixed_relations(
            &MixedRelation::SquaredAverage {
                n: 2,
                rho: 0.8,
                power: RhoPower::Two,
            },
            CIRCLE_POINTS,
        )
        .unwrap();
        assert!(r.rel_err() > 1e-3);
    }

    #[test]
    fn rotated_product_variants() {
        let w1 = Complex64::new(0.3, 0.2);
        let w2 = Complex64::new(-0.4, 0.1);
        for m in 0..=5 {
            for n in 0..=5 {
                let case = |phase, bounds| MixedRelation::RotatedProduct {
                    m,
                    n,
                    w1,
                    w2,
                    phase,
                    bounds,
                };
                let r = check_mixed_relations(&case(RotationPhase::Forward, IndexBounds::Full), 0)
                    .unwrap();
                assert!(r.rel_err() <= 1e-12, "{m} {n} {r:?}");
            }
        }
        let r = check_mixed_relations(
            &MixedRelation::RotatedProduct {
                m: 2,
                n: 1,
                w1,
                w2,
                phase: RotationPhase::Reversed,
                bounds: IndexBounds::Min,
            },
            0,
        )
        .unwrap();
        assert!(r.rel_err() > 1e-3);
    }

    #[test]
    fn shift_and_origin() {
        let r = check_mixed_relations(
            &MixedRelation::Shift {
                m: 2,
                n: 3,
                z1: Complex64::new(0.3, 0.1),
                z2: Complex64::new(-0.2, 0.4),
                w1: Complex64::new(0.2, -0.1),
                w2: Complex64::new(0.1, 0.3),
                cap: 25,
            },
            0,
        )
        .unwrap();
        assert!(r.rel_err() <= 1e-12, "{r:?}");
        for m in 0..=8 {
            for n in 0..=8 {
                let r = check_mixed_relations(&MixedRelation::Origin { m, n }, 0).unwrap();
                assert_eq!(r.abs_err, 0.0);
            }
        }
    }
}
