//! Small dense complex matrices: partial-pivot LU, determinant, solve,
//! inverse, a 1-norm condition estimate and Cholesky factorizations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::ensure_finite;

/// Condition estimates at or above this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

pub type ComplexVector = Vec<Complex64>;

impl ComplexSquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            m.data[j * dim + j] = ONE;
        }
        m
    }

    /// Row-major entries; rejects non-square or non-finite input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidInput("matrix is not square".into()));
            }
            for &z in row {
                ensure_finite("matrix entry", z)?;
                data.push(z);
            }
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.dim + j] = z;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data
            .chunks(self.dim)
            .map(<[Complex64]>::to_vec)
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| {
            (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum()
        })
    }

    pub fn matvec(&self, v: &[Complex64]) -> ComplexVector {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|k| self.get(i, k) * v[k]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    /// I + self.
    pub fn shifted_identity(&self) -> Self {
        self.add(&Self::identity(self.dim))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.im.abs() <= tol)
    }

    /// max |a_ij - a_ji|
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }

    /// max |a_ij - conj(a_ji)|, diagonal included.
    pub fn non_hermiticity(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..=i {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::factor(self)
    }

    pub fn det(&self) -> Result<Complex64> {
        Ok(self.lu()?.det())
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        lu.check_conditioning(self)?;
        Ok(lu.inverse())
    }
}

/// PA = LU with unit-diagonal L, stored compactly.
#[derive(Debug, Clone)]
pub struct Lu {
    dim: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn factor(a: &ComplexSquareMatrix) -> Result<Self> {
        let n = a.dim;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| lu[i * n + k].norm().total_cmp(&lu[j * n + k].norm()))
                .unwrap_or(k);
            if lu[pivot * n + k].norm() == 0.0 {
                return Err(Error::IllConditioned(f64::INFINITY));
            }
            if pivot != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot * n + j);
                }
                perm.swap(k, pivot);
                swaps += 1;
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let l = lu[i * n + k] / d;
                lu[i * n + k] = l;
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= l * u;
                }
            }
        }
        Ok(Self {
            dim: n,
            lu,
            perm,
            swaps,
        })
    }

    pub fn det(&self) -> Complex64 {
        let n = self.dim;
        let mut d = if self.swaps.is_multiple_of(2) {
            ONE
        } else {
            -ONE
        };
        for k in 0..n {
            d *= self.lu[k * n + k];
        }
        d
    }

    pub fn solve(&self, b: &[Complex64]) -> ComplexVector {
        let n = self.dim;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[i * n + k];
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[i * n + k];
                let xk = x[k];
                x[i] -= u * xk;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    pub fn inverse(&self) -> ComplexSquareMatrix {
        let n = self.dim;
        let mut inv = ComplexSquareMatrix::zeros(n);
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv.set(i, j, v);
            }
        }
        inv
    }

    /// ||A||_1 ||A^{-1}||_1, computed exactly (the matrices here are tiny).
    pub fn condition_estimate(&self, a: &ComplexSquareMatrix) -> f64 {
        a.one_norm() * self.inverse().one_norm()
    }

    pub fn check_conditioning(&self, a: &ComplexSquareMatrix) -> Result<()> {
        let cond = self.condition_estimate(a);
        if !(cond < MAX_CONDITION) {
            return Err(Error::IllConditioned(cond));
        }
        Ok(())
    }
}

/// Lower-triangular L with A = L L^T for real symmetric positive definite A.
pub fn cholesky_real(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        if a[i].len() != n {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
        for j in 0..=i {
            if (a[i][j] - a[j][i]).abs() > 1e-14 * (1.0 + a[i][j].abs()) {
                return Err(Error::NotSpd);
            }
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) {
                    return Err(Error::NotSpd);
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Lower-triangular L with A = L L^* for Hermitian positive definite A.
pub fn cholesky_complex(a: &ComplexSquareMatrix) -> Result<ComplexSquareMatrix> {
    let n = a.dim;
    if a.non_hermiticity() > 1e-12 {
        return Err(Error::NotPd);
    }
    let mut l = ComplexSquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let s: Complex64 = (0..j).map(|k| l.get(i, k) * l.get(j, k).conj()).sum();
            if i == j {
                let d = a.get(i, i).re - s.re;
                if !(d > 0.0) {
                    return Err(Error::NotPd);
                }
                l.set(i, i, Complex64::new(d.sqrt(), 0.0));
            } else {
                let v = (a.get(i, j) - s) / l.get(j, j);
                l.set(i, j, v);
            }
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> ComplexSquareMatrix {
        ComplexSquareMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(2.0, 1.0), c(-1.0, 0.5)],
            vec![c(1.0, -1.0), c(0.5, 0.0), c(3.0, 0.0)],
            vec![c(2.0, 0.3), c(-1.0, 1.0), c(0.25, -0.5)],
        ])
        .unwrap()
    }

    fn det3_cofactor(a: &ComplexSquareMatrix) -> Complex64 {
        let g = |i, j| a.get(i, j);
        g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
            - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let a = sample();
        let d = a.det().unwrap();
        assert!((d - det3_cofactor(&a)).norm() < 1e-13);
    }

    #[test]
    fn inverse_round_trip() {
        let a = sample();
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { ONE } else { ZERO };
                assert!((prod.get(i, j) - expected).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn singular_and_ill_conditioned_rejected() {
        let s = ComplexSquareMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(s.inverse(), Err(Error::IllConditioned(_))));
        let near =
            ComplexSquareMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-14]]).unwrap();
        assert!(matches!(near.inverse(), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn norms() {
        assert!((ComplexSquareMatrix::identity(2).frobenius_norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(ComplexSquareMatrix::zeros(3).frobenius_norm(), 0.0);
        let mut m = ComplexSquareMatrix::zeros(2);
        m.set(1, 0, c(0.0, 3.0));
        assert_eq!(m.frobenius_norm(), 3.0);
        assert_eq!(ComplexSquareMatrix::identity(3).max_norm(), 1.0);
        let m = ComplexSquareMatrix::from_real_rows(&[vec![0.2, -0.2], vec![-0.2, 0.2]]).unwrap();
        assert_eq!(m.max_norm(), 0.2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ComplexSquareMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)]]).is_err());
        assert!(ComplexSquareMatrix::from_rows(&[vec![c(f64::NAN, 0.0)]]).is_err());
    }

    #[test]
    fn cholesky_factors() {
        let a = vec![vec![2.0, 0.5], vec![0.5, 1.0]];
        let l = cholesky_real(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let v: f64 = (0..2).map(|k| l[i][k] * l[j][k]).sum();
                assert!((v - a[i][j]).abs() < 1e-15);
            }
        }
        assert!(matches!(
            cholesky_real(&[vec![1.0, 2.0], vec![2.0, 1.0]]),
            Err(Error::NotSpd)
        ));

        let h = ComplexSquareMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.3, 0.4)],
            vec![c(0.3, -0.4), c(1.0, 0.0)],
        ])
        .unwrap();
        let l = cholesky_complex(&h).unwrap();
        let back = l.matmul(&l.adjoint());
        for (x, y) in back.entries().iter().zip(h.entries()) {
            assert!((x - y).norm() < 1e-15);
        }
        let not_herm = ComplexSquareMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.3, 0.4)],
            vec![c(0.3, 0.4), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(cholesky_complex(&not_herm), Err(Error::NotPd)));
    }
}
