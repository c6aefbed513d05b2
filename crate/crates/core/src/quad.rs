//! Gauss–Hermite rules for the weight e^{-x^2} and the periodic trapezoid
//! rule.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::sum::ComplexSum;

/// Relative change allowed when the point count is doubled.
pub const SELF_CONSISTENCY_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    GaussHermite1d,
    GaussHermite2dTensor,
    PeriodicTrapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub kind: QuadratureKind,
    /// Points per axis.
    pub points: usize,
}

impl QuadratureSpec {
    pub fn new(kind: QuadratureKind, points: usize) -> Result<Self> {
        let s = Self { kind, points };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidInput(format!(
                "quadrature needs at least 2 points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self {
            kind: self.kind,
            points: 2 * self.points,
        }
    }

    pub fn require(&self, kind: QuadratureKind) -> Result<()> {
        self.validate()?;
        if self.kind != kind {
            return Err(Error::InvalidInput(format!(
                "expected a {kind:?} rule, got {:?}",
                self.kind
            )));
        }
        Ok(())
    }
}

/// Nodes (ascending) and weights of the n-point rule for weight e^{-x^2}.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Roots bracketed by Sturm-sequence bisection on the Jacobi matrix,
    /// then polished by Newton on the orthonormal recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one point");
        let nf = n as f64;
        // eigenvalues of the tridiagonal matrix with zero diagonal and
        // off-diagonal sqrt(k/2), k = 1..n-1
        let count_below = |x: f64| -> usize {
            let mut cnt = 0;
            let mut q = -x;
            if q < 0.0 {
                cnt += 1;
            }
            for k in 1..n {
                let e2 = k as f64 / 2.0;
                let prev = if q == 0.0 { f64::MIN_POSITIVE } else { q };
                q = -x - e2 / prev;
                if q < 0.0 {
                    cnt += 1;
                }
            }
            cnt
        };
        let bound = (2.0 * nf + 1.0).sqrt() + 1.0;
        let eval = |z: f64| -> (f64, f64) {
            let mut p1 = PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            (p1, (2.0 * nf).sqrt() * p2)
        };
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        for (i, (xi, wi)) in x.iter_mut().zip(w.iter_mut()).enumerate() {
            // i-th smallest eigenvalue
            let (mut lo, mut hi) = (-bound, bound);
            while hi - lo > 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
                let mid = 0.5 * (lo + hi);
                if count_below(mid) > i {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let mut z = 0.5 * (lo + hi);
            for _ in 0..3 {
                let (p1, d) = eval(z);
                let step = p1 / d;
                if !(step.abs() < hi - lo + 1e-12) {
                    break;
                }
                z -= step;
            }
            let pp = eval(z).1;
            *xi = z;
            *wi = 2.0 / (pp * pp);
        }
        // enforce exact symmetry
        for i in 0..n / 2 {
            let a = 0.5 * (x[n - 1 - i] - x[i]);
            let b = 0.5 * (w[i] + w[n - 1 - i]);
            x[i] = -a;
            x[n - 1 - i] = a;
            w[i] = b;
            w[n - 1 - i] = b;
        }
        if n % 2 == 1 {
            x[n / 2] = 0.0;
        }
        Self {
            nodes: x,
            weights: w,
        }
    }

    /// Shared, immutable rule for n points.
    pub fn cached(n: usize) -> Arc<GaussHermite> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussHermite::new(n)))
            .clone()
    }

    /// sum_i w_i f(x_i) ~ int f(x) e^{-x^2} dx
    pub fn integrate(&self, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(x));
        }
        acc.value()
    }

    /// Tensor rule in `dim` variables: ~ int f(x) e^{-|x|^2} dx.
    pub fn integrate_tensor(
        &self,
        dim: usize,
        mut f: impl FnMut(&[f64]) -> Complex64,
    ) -> Complex64 {
        let n = self.nodes.len();
        let mut idx = vec![0usize; dim];
        let mut x = vec![0.0; dim];
        let mut acc = ComplexSum::new();
        loop {
            let mut w = 1.0;
            for (d, &i) in idx.iter().enumerate() {
                x[d] = self.nodes[i];
                w *= self.weights[i];
            }
            if w != 0.0 {
                acc.add(w * f(&x));
            }
            let mut d = 0;
            loop {
                if d == dim {
                    return acc.value();
                }
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }
}

/// Uniform trapezoid rule over one period [start, start + period); exact
/// for trigonometric polynomials of degree below `points`.
pub fn periodic_trapezoid(
    start: f64,
    period: f64,
    points: usize,
    mut f: impl FnMut(f64) -> Complex64,
) -> Complex64 {
    let h = period / points as f64;
    let mut acc = ComplexSum::new();
    for k in 0..points {
        acc.add(f(start + k as f64 * h));
    }
    acc.value() * h
}

/// Result of a rule and its doubled refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refined {
    /// Value at the requested point count.
    pub value: Complex64,
    /// Value at twice the point count.
    pub doubled_value: Complex64,
    pub points: usize,
    pub doubled: usize,
    /// |v(2n) - v(n)| / (1 + |v(2n)|)
    pub change: f64,
}

/// Evaluates at `points` and `2 * points`; fails with
/// QuadratureUnderResolved unless the relative change is below `tol`.
pub fn refine(
    points: usize,
    tol: f64,
    mut eval: impl FnMut(usize) -> Result<Complex64>,
) -> Result<Refined> {
    let coarse = eval(points)?;
    let fine = eval(2 * points)?;
    let change = (fine - coarse).norm() / (1.0 + fine.norm());
    if !(change < tol) {
        return Err(Error::QuadratureUnderResolved {
            points,
            doubled: 2 * points,
            change,
        });
    }
    Ok(Refined {
        value: coarse,
        doubled_value: fine,
        points,
        doubled: 2 * points,
        change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn low_order_rules() {
        let g = GaussHermite::new(2);
        assert!((g.nodes[1] - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((g.weights[0] - PI.sqrt() / 2.0).abs() < 1e-14);
        let g = GaussHermite::new(3);
        assert_eq!(g.nodes[1], 0.0);
        assert!((g.weights[1] - 2.0 * PI.sqrt() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn moments_exact() {
        // int x^{2k} e^{-x^2} = Gamma(k + 1/2)
        for &n in &[10usize, 40, 101, 200] {
            let g = GaussHermite::new(n);
            assert!(g.nodes.windows(2).all(|p| p[0] < p[1]));
            let mut gamma = PI.sqrt();
            for k in 0..n.min(30) {
                let v = g.integrate(|x| r(x.powi(2 * k as i32))).re;
                assert!((v - gamma).abs() <= 1e-12 * gamma, "n={n} k={k}");
                gamma *= k as f64 + 0.5;
            }
        }
    }

    #[test]
    fn oscillatory_gaussian() {
        // int cos(2 a x) e^{-x^2} = sqrt(pi) e^{-a^2}
        let g = GaussHermite::new(60);
        let a = 1.3;
        let v = g.integrate(|x| Complex64::new(0.0, 2.0 * a * x).exp());
        assert!((v - r(PI.sqrt() * (-a * a).exp())).norm() < 1e-14);
    }

    #[test]
    fn tensor_rule() {
        let g = GaussHermite::new(12);
        let v = g.integrate_tensor(3, |x| r(1.0 + x[0] * x[0] * x[2] * x[2]));
        let expect = PI.powf(1.5) * (1.0 + 0.25);
        assert!((v.re - expect).abs() < 1e-13);
    }

    #[test]
    fn trapezoid_exact_on_trig_polynomials() {
        let v = periodic_trapezoid(0.0, 2.0 * PI, 16, |t| r((3.0 * t).cos().powi(2)));
        assert!((v.re - PI).abs() < 1e-14);
        let v = periodic_trapezoid(0.0, 2.0 * PI, 16, |t| Complex64::new(0.0, 5.0 * t).exp());
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn refinement_flags_unresolved() {
        let ok = refine(40, 1e-11, |n| {
            Ok(GaussHermite::cached(n).integrate(|x| r(x.cos())))
        })
        .unwrap();
        assert!(ok.change < 1e-11);
        let bad = refine(4, 1e-11, |n| {
            Ok(GaussHermite::new(n).integrate(|x| r((5.0 * x).cos())))
        });
        assert!(matches!(bad, Err(Error::QuadratureUnderResolved { .. })));
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(QuadratureKind::PeriodicTrapezoid, 1).is_err());
        let s = QuadratureSpec::new(QuadratureKind::GaussHermite1d, 30).unwrap();
        assert_eq!(s.doubled().points, 60);
        assert!(s.require(QuadratureKind::PeriodicTrapezoid).is_err());
    }
}
