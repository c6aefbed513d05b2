//! Kibble–Slepian multilinear generating functions: closed-form left sides
//! through dense linear algebra and shell-truncated right sides.
//!
//! Every right side here has the shape
//!
//! ```text
//! sum_K  prod_cells a_cell^{k_cell} / k_cell!  *  prod_j T_j(p_j(K), q_j(K))
//! ```
//!
//! where each cell of K bumps two counters and T_j is a precomputed factor
//! table. The real series, the complex series, its Laguerre form and the two
//! monomial expansions differ only in the cell weights and the tables.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexSquareMatrix, ComplexVector, Lu};
use crate::multi_index::{shell_size, support_cells};
use crate::poly::{
    ensure_finite, factorial, h2d_table, hermite_table, laguerre_table, powers, PolarPoint,
};
use crate::sum::ComplexSum;

/// Symmetry tolerance for real S.
pub const SYMMETRY_TOL: f64 = 1e-14;
/// Hermitian detection tolerance for the complex domain policy.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Shells smaller than this run on the calling thread.
const PARALLEL_THRESHOLD: f64 = 20_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub max_degree: u32,
    pub shell_tol: f64,
    pub quiet_shells: u32,
}

impl TruncationPolicy {
    pub fn new(max_degree: u32, shell_tol: f64, quiet_shells: u32) -> Result<Self> {
        let p = Self {
            max_degree,
            shell_tol,
            quiet_shells,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shell_tol > 0.0 && self.shell_tol < 1.0) {
            return Err(Error::InvalidInput(format!(
                "shell_tol must lie in (0, 1), got {}",
                self.shell_tol
            )));
        }
        if self.quiet_shells == 0 {
            return Err(Error::InvalidInput(
                "quiet_shells must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Degree cap 30, for the real series.
    pub fn real_default() -> Self {
        Self {
            max_degree: 30,
            shell_tol: 1e-12,
            quiet_shells: 3,
        }
    }

    /// The complex series near the edge of the max-norm ball decays like
    /// (N |H|_inf)^d, so the cap is much higher.
    pub fn complex_default() -> Self {
        Self {
            max_degree: 160,
            shell_tol: 1e-12,
            quiet_shells: 3,
        }
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self::real_default()
    }
}

/// Which convergence condition admitted the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveDomain {
    /// Real symmetric S with Frobenius norm below 1.
    Frobenius,
    /// General complex H with max |h_jk| < 1/N.
    MaxNormBall,
    /// Hermitian H outside the max-norm ball but with Frobenius norm below 1.
    HermitianFrobenius,
    /// No domain check applies (monomial expansions converge everywhere).
    Unrestricted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: Complex64,
    pub degree_reached: u32,
    pub last_shell_norm: f64,
    pub term_count: u64,
    /// |shell sum| for degrees 0..=degree_reached.
    pub shell_norms: Vec<f64>,
    pub converged: bool,
    pub domain: ActiveDomain,
}

// ---------------------------------------------------------------------------
// Norms and domains
// ---------------------------------------------------------------------------

pub fn frobenius_norm(m: &ComplexSquareMatrix) -> f64 {
    m.frobenius_norm()
}

pub fn max_norm(m: &ComplexSquareMatrix) -> f64 {
    m.max_norm()
}

pub fn in_domain_real(s: &ComplexSquareMatrix) -> bool {
    s.frobenius_norm() < 1.0
}

/// max |h_jk| < 1/N.
pub fn in_domain_complex(h: &ComplexSquareMatrix) -> bool {
    h.max_norm() * (h.dim() as f64) < 1.0
}

/// Domain that admits H for the complex series: the max-norm ball for any
/// H, or Frobenius norm below 1 for Hermitian H.
pub fn complex_domain(h: &ComplexSquareMatrix) -> Option<ActiveDomain> {
    if in_domain_complex(h) {
        Some(ActiveDomain::MaxNormBall)
    } else if h.non_hermiticity() <= HERMITIAN_TOL && h.frobenius_norm() < 1.0 {
        Some(ActiveDomain::HermitianFrobenius)
    } else {
        None
    }
}

fn require_complex_domain(h: &ComplexSquareMatrix) -> Result<ActiveDomain> {
    complex_domain(h).ok_or_else(|| {
        Error::DomainViolation(format!(
            "max |h_jk| = {} is not below 1/N = {} and H is not Hermitian with Frobenius norm < 1",
            h.max_norm(),
            1.0 / h.dim() as f64
        ))
    })
}

/// Box neighbourhood of a Hermitian center H0: |h_jj - h0_jj| < delta_jj
/// and, for l < k, |u_lk - u0_lk| < delta_lk and |v_lk - v0_lk| < delta_lk
/// with u_lk = (h_lk + h_kl)/2, v_lk = (h_lk - h_kl)/(2i).
pub fn in_box_domain(
    h: &ComplexSquareMatrix,
    h0: &ComplexSquareMatrix,
    delta: &[Vec<f64>],
) -> Result<bool> {
    let n = h.dim();
    if h0.dim() != n || delta.len() != n || delta.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("box domain dimensions disagree".into()));
    }
    if h0.non_hermiticity() > HERMITIAN_TOL {
        return Err(Error::InvalidInput("box center must be Hermitian".into()));
    }
    if delta.iter().flatten().any(|&d| !(d > 0.0)) {
        return Err(Error::InvalidInput(
            "box half-widths must be positive".into(),
        ));
    }
    let two_i = Complex64::new(0.0, 2.0);
    for j in 0..n {
        if (h.get(j, j) - h0.get(j, j)).norm() >= delta[j][j] {
            return Ok(false);
        }
    }
    for l in 0..n {
        for k in l + 1..n {
            let u = (h.get(l, k) + h.get(k, l)) / 2.0;
            let v = (h.get(l, k) - h.get(k, l)) / two_i;
            let u0 = (h0.get(l, k) + h0.get(k, l)) / 2.0;
            let v0 = (h0.get(l, k) - h0.get(k, l)) / two_i;
            if (u - u0).norm() >= delta[l][k] || (v - v0).norm() >= delta[l][k] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Left sides
// ---------------------------------------------------------------------------

fn real_matrix(s: &[Vec<f64>]) -> Result<ComplexSquareMatrix> {
    let m = ComplexSquareMatrix::from_real_rows(s)?;
    let asym = m.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::Asymmetry(asym));
    }
    Ok(m)
}

fn check_real_domain(s: &ComplexSquareMatrix) -> Result<()> {
    if !in_domain_real(s) {
        return Err(Error::DomainViolation(format!(
            "Frobenius norm {} is not below 1",
            s.frobenius_norm()
        )));
    }
    Ok(())
}

fn check_len(what: &str, got: usize, dim: usize) -> Result<()> {
    if got != dim {
        return Err(Error::InvalidInput(format!(
            "{what} has length {got}, matrix dimension is {dim}"
        )));
    }
    Ok(())
}

/// det(I+S)^{-1/2} exp(X^T S (I+S)^{-1} X) for real symmetric S, |S| < 1.
pub fn lhs_real(s: &[Vec<f64>], x: &[f64]) -> Result<f64> {
    let sm = real_matrix(s)?;
    check_real_domain(&sm)?;
    check_len("X", x.len(), sm.dim())?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("X has non-finite entries".into()));
    }
    let a = sm.shifted_identity();
    let lu = Lu::factor(&a)?;
    lu.check_conditioning(&a)?;
    let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let y = lu.solve(&xc);
    let sy = sm.matvec(&y);
    let exponent: f64 = xc.iter().zip(&sy).map(|(a, b)| (a * b).re).sum();
    let det = lu.det().re;
    Ok(det.powf(-0.5) * exponent.exp())
}

/// det(I+H) and W* H (I+H)^{-1} W.
pub fn complex_kernel_parts(
    h: &ComplexSquareMatrix,
    w: &[Complex64],
) -> Result<(Complex64, Complex64)> {
    check_len("W", w.len(), h.dim())?;
    for &z in w {
        ensure_finite("W entry", z)?;
    }
    let a = h.shifted_identity();
    let lu = Lu::factor(&a)?;
    lu.check_conditioning(&a)?;
    let y = lu.solve(w);
    let hy = h.matvec(&y);
    let exponent: Complex64 = w.iter().zip(&hy).map(|(a, b)| a.conj() * b).sum();
    Ok((lu.det(), exponent))
}

/// det(I+H)^{-1} exp(W* H (I+H)^{-1} W).
pub fn lhs_complex(h: &ComplexSquareMatrix, w: &[Complex64]) -> Result<Complex64> {
    require_complex_domain(h)?;
    let (det, exponent) = complex_kernel_parts(h, w)?;
    Ok(exponent.exp() / det)
}

// ---------------------------------------------------------------------------
// Shell engine
// ---------------------------------------------------------------------------

struct ShellSeries {
    dim: usize,
    /// Counter pair bumped by one unit of each free cell.
    cells: Vec<(usize, usize)>,
    /// weights[cell][k] = a_cell^k / k!
    weights: Vec<Vec<Complex64>>,
    /// tables[j][p * stride + q], looked up with counters (j, dim + j).
    tables: Vec<Vec<Complex64>>,
    stride: usize,
}

impl ShellSeries {
    fn new(
        dim: usize,
        cells: Vec<(usize, usize)>,
        coeffs: &[Complex64],
        max_degree: u32,
        tables: Vec<Vec<Complex64>>,
        stride: usize,
    ) -> Self {
        let weights = coeffs
            .iter()
            .map(|&a| {
                let mut w = Vec::with_capacity(max_degree as usize + 1);
                let mut cur = Complex64::new(1.0, 0.0);
                w.push(cur);
                for k in 1..=max_degree {
                    cur = cur * a / k as f64;
                    w.push(cur);
                }
                w
            })
            .collect();
        Self {
            dim,
            cells,
            weights,
            tables,
            stride,
        }
    }

    /// True when every cell weight vanishes, so only K = 0 contributes.
    fn is_constant(&self) -> bool {
        self.weights
            .iter()
            .all(|w| w.len() < 2 || w[1] == Complex64::new(0.0, 0.0))
    }

    #[inline]
    fn leaf(&self, counters: &[u32]) -> Complex64 {
        let mut f = Complex64::new(1.0, 0.0);
        for j in 0..self.dim {
            let p = counters[j] as usize;
            let q = counters[self.dim + j] as usize;
            f *= self.tables[j][p * self.stride + q];
        }
        f
    }

    #[inline]
    fn bump(&self, counters: &mut [u32], cell: usize, k: u32) {
        let (a, b) = self.cells[cell];
        counters[a] += k;
        counters[b] += k;
    }

    #[inline]
    fn unbump(&self, counters: &mut [u32], cell: usize, k: u32) {
        let (a, b) = self.cells[cell];
        counters[a] -= k;
        counters[b] -= k;
    }

    /// Depth-first walk over the remaining cells in ascending lexicographic
    /// order; the last cell takes whatever degree is left.
    fn walk(
        &self,
        cell: usize,
        remaining: u32,
        prod: Complex64,
        counters: &mut [u32],
        acc: &mut ComplexSum,
    ) {
        let last = self.cells.len() - 1;
        if cell == last {
            let w = self.weights[cell][remaining as usize];
            if w.re == 0.0 && w.im == 0.0 {
                return;
            }
            self.bump(counters, cell, remaining);
            acc.add(prod * w * self.leaf(counters));
            self.unbump(counters, cell, remaining);
            return;
        }
        for k in 0..=remaining {
            let w = self.weights[cell][k as usize];
            if w.re == 0.0 && w.im == 0.0 {
                continue;
            }
            self.bump(counters, cell, k);
            self.walk(cell + 1, remaining - k, prod * w, counters, acc);
            self.unbump(counters, cell, k);
        }
    }

    /// Fixed prefixes of the first one or two cells; the shell is split
    /// into these independent tasks in enumeration order.
    fn prefixes(&self, degree: u32) -> Vec<Vec<u32>> {
        let f = self.cells.len();
        match f.saturating_sub(1).min(2) {
            0 => vec![vec![]],
            1 => (0..=degree).map(|a| vec![a]).collect(),
            _ => {
                let mut out = Vec::new();
                for a in 0..=degree {
                    for b in 0..=degree - a {
                        out.push(vec![a, b]);
                    }
                }
                out
            }
        }
    }

    fn task(&self, prefix: &[u32], degree: u32) -> ComplexSum {
        let mut acc = ComplexSum::new();
        let mut counters = vec![0u32; 2 * self.dim];
        let mut prod = Complex64::new(1.0, 0.0);
        let mut used = 0;
        for (cell, &k) in prefix.iter().enumerate() {
            prod *= self.weights[cell][k as usize];
            self.bump(&mut counters, cell, k);
            used += k;
        }
        if prod.re == 0.0 && prod.im == 0.0 {
            return acc;
        }
        self.walk(prefix.len(), degree - used, prod, &mut counters, &mut acc);
        acc
    }

    /// Sum of all terms of total degree `degree`. Task partial sums are
    /// merged in enumeration order, so the value does not depend on the
    /// number of worker threads.
    fn shell(&self, degree: u32) -> Complex64 {
        let prefixes = self.prefixes(degree);
        let parts: Vec<ComplexSum> = if shell_size_f(self.cells.len(), degree) < PARALLEL_THRESHOLD
        {
            prefixes.iter().map(|p| self.task(p, degree)).collect()
        } else {
            prefixes.par_iter().map(|p| self.task(p, degree)).collect()
        };
        let mut total = ComplexSum::new();
        for p in &parts {
            total.merge(p);
        }
        total.value()
    }

    fn sum(&self, policy: &TruncationPolicy, domain: ActiveDomain) -> Result<SeriesResult> {
        sum_shells(
            |d| self.shell(d),
            self.cells.len(),
            self.is_constant(),
            policy,
            domain,
        )
    }
}

/// Shell-by-shell summation with the quiet-shell stopping rule.
fn sum_shells(
    mut shell: impl FnMut(u32) -> Complex64,
    free_cells: usize,
    constant: bool,
    policy: &TruncationPolicy,
    domain: ActiveDomain,
) -> Result<SeriesResult> {
    policy.validate()?;
    let mut partial = ComplexSum::new();
    let mut shell_norms = Vec::new();
    let mut quiet = 0;
    let mut term_count = 0u64;
    let mut degree = 0;
    let converged;
    loop {
        let s = shell(degree);
        partial.add(s);
        term_count = term_count.saturating_add(shell_size_f(free_cells, degree) as u64);
        let norm = s.norm();
        shell_norms.push(norm);
        let below = norm <= policy.shell_tol * partial.value().norm();
        quiet = if below { quiet + 1 } else { 0 };
        if constant || quiet >= policy.quiet_shells {
            converged = true;
            break;
        }
        if degree >= policy.max_degree {
            converged = below;
            break;
        }
        degree += 1;
    }
    let result = SeriesResult {
        value: partial.value(),
        degree_reached: degree,
        last_shell_norm: *shell_norms.last().unwrap_or(&0.0),
        term_count,
        shell_norms,
        converged,
        domain,
    };
    if !converged {
        return Err(Error::TruncationNotConverged(Box::new(result)));
    }
    Ok(result)
}

// ---------------------------------------------------------------------------
// Marginal-grouped shells
// ---------------------------------------------------------------------------
//
// The leaf factor depends on K only through its counter vector (row and
// column sums, or k_l in the real case). Grouping a shell by counter vector
// kappa, the grouped weight A_d(kappa) = sum over K of degree d with counters
// kappa of prod a^k/k! is the kappa-coefficient of P^d/d!, P = sum_cells
// a_cell x^{bump(cell)}, so A_d = P A_{d-1} / d. Each shell then costs
// (number of counter vectors) x (number of cells) instead of the number of
// matrices K.

/// Compositions of `total` into `parts` in ascending lexicographic order,
/// with rank tables for a one-unit bump of each part.
struct Level {
    parts: usize,
    items: Vec<u32>,
    /// up[i * parts + s] = rank of items[i] + e_s at total + 1.
    up: Vec<usize>,
}

fn count_compositions(parts: usize, total: u32) -> usize {
    crate::multi_index::composition_count(parts, total) as usize
}

fn rank_composition(comp: &[u32]) -> usize {
    let parts = comp.len();
    let mut rem: u32 = comp.iter().sum();
    let mut rank = 0;
    for (i, &a) in comp.iter().enumerate().take(parts.saturating_sub(1)) {
        for v in 0..a {
            rank += count_compositions(parts - 1 - i, rem - v);
        }
        rem -= a;
    }
    rank
}

impl Level {
    fn new(parts: usize, total: u32) -> Self {
        let mut items = Vec::new();
        let mut comps = crate::multi_index::Compositions::new(parts, total);
        while let Some(c) = comps.next_ref() {
            items.extend_from_slice(c);
        }
        let count = items.len().checked_div(parts).unwrap_or(1);
        let mut up = Vec::with_capacity(count * parts);
        let mut buf = vec![0u32; parts];
        for i in 0..count {
            for s in 0..parts {
                buf.copy_from_slice(&items[i * parts..(i + 1) * parts]);
                buf[s] += 1;
                up.push(rank_composition(&buf));
            }
        }
        Self { parts, items, up }
    }

    fn len(&self) -> usize {
        self.items.len().checked_div(self.parts).unwrap_or(1)
    }

    fn item(&self, i: usize) -> &[u32] {
        &self.items[i * self.parts..(i + 1) * self.parts]
    }
}

struct MarginalSeries {
    dim: usize,
    /// Slot bumps of each cell, split by counter group (slots < dim, >= dim).
    bumps_a: Vec<Vec<usize>>,
    bumps_b: Vec<Vec<usize>>,
    coeffs: Vec<Complex64>,
    tables: Vec<Vec<Complex64>>,
    stride: usize,
    /// Units each cell adds to group A / group B.
    per_a: u32,
    per_b: u32,
    levels_a: Vec<Option<Level>>,
    levels_b: Vec<Option<Level>>,
}

impl MarginalSeries {
    fn new(
        dim: usize,
        cells: &[(usize, usize)],
        coeffs: &[Complex64],
        tables: Vec<Vec<Complex64>>,
        stride: usize,
    ) -> Self {
        let mut bumps_a = Vec::new();
        let mut bumps_b = Vec::new();
        for &(p, q) in cells {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for s in [p, q] {
                if s < dim {
                    a.push(s);
                } else {
                    b.push(s - dim);
                }
            }
            bumps_a.push(a);
            bumps_b.push(b);
        }
        let per_a = bumps_a.first().map_or(0, |v| v.len() as u32);
        let per_b = bumps_b.first().map_or(0, |v| v.len() as u32);
        debug_assert!(bumps_a.iter().all(|v| v.len() as u32 == per_a));
        Self {
            dim,
            bumps_a,
            bumps_b,
            coeffs: coeffs.to_vec(),
            tables,
            stride,
            per_a,
            per_b,
            levels_a: Vec::new(),
            levels_b: Vec::new(),
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    fn ensure(levels: &mut Vec<Option<Level>>, parts: usize, total: u32) {
        let t = total as usize;
        if levels.len() <= t {
            levels.resize_with(t + 1, || None);
        }
        if levels[t].is_none() {
            levels[t] = Some(Level::new(parts, total));
        }
    }

    /// Rank after applying `bumps` one unit at a time from level `total`.
    fn bumped(
        levels: &[Option<Level>],
        parts: usize,
        total: u32,
        idx: usize,
        bumps: &[usize],
    ) -> usize {
        let mut i = idx;
        for (step, &s) in bumps.iter().enumerate() {
            let level = levels[total as usize + step].as_ref().expect("level built");
            i = level.up[i * parts + s];
        }
        i
    }

    /// Advances the grouped weights from degree d-1 to d.
    fn advance(&mut self, prev: &[Complex64], degree: u32) -> Vec<Complex64> {
        let n = self.dim;
        let ta = self.per_a * (degree - 1);
        let tb = self.per_b * (degree - 1);
        for t in ta..=ta + self.per_a {
            Self::ensure(&mut self.levels_a, n, t);
        }
        for t in tb..=tb + self.per_b {
            Self::ensure(&mut self.levels_b, n, t);
        }
        let la = |s: &Self, t: u32| s.levels_a[t as usize].as_ref().map_or(1, Level::len);
        let lb = |s: &Self, t: u32| s.levels_b[t as usize].as_ref().map_or(1, Level::len);
        let (old_na, old_nb) = (la(self, ta), lb(self, tb));
        let (new_na, new_nb) = (la(self, ta + self.per_a), lb(self, tb + self.per_b));
        let cells = self.coeffs.len();
        let map_a: Vec<Vec<usize>> = (0..cells)
            .map(|c| {
                (0..old_na)
                    .map(|i| Self::bumped(&self.levels_a, n, ta, i, &self.bumps_a[c]))
                    .collect()
            })
            .collect();
        let map_b: Vec<Vec<usize>> = (0..cells)
            .map(|c| {
                (0..old_nb)
                    .map(|i| Self::bumped(&self.levels_b, n, tb, i, &self.bumps_b[c]))
                    .collect()
            })
            .collect();
        let mut next = vec![Complex64::new(0.0, 0.0); new_na * new_nb];
        let inv_d = 1.0 / degree as f64;
        for ia in 0..old_na {
            for ib in 0..old_nb {
                let v = prev[ia * old_nb + ib];
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                let v = v * inv_d;
                for c in 0..cells {
                    let a = self.coeffs[c];
                    if a.re == 0.0 && a.im == 0.0 {
                        continue;
                    }
                    next[map_a[c][ia] * new_nb + map_b[c][ib]] += a * v;
                }
            }
        }
        next
    }

    fn shell_value(&self, layer: &[Complex64], degree: u32) -> Complex64 {
        let n = self.dim;
        let ta = (self.per_a * degree) as usize;
        let tb = (self.per_b * degree) as usize;
        let level_a = self.levels_a.get(ta).and_then(Option::as_ref);
        let level_b = self.levels_b.get(tb).and_then(Option::as_ref);
        let nb = level_b.map_or(1, Level::len);
        let zeros = vec![0u32; n];
        let mut acc = ComplexSum::new();
        for (idx, &v) in layer.iter().enumerate() {
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            let (ia, ib) = (idx / nb, idx % nb);
            let pa = level_a.map_or(&zeros[..], |l| l.item(ia));
            let pb = level_b.map_or(&zeros[..], |l| l.item(ib));
            let mut f = v;
            for j in 0..n {
                f *= self.tables[j][pa[j] as usize * self.stride + pb[j] as usize];
            }
            acc.add(f);
        }
        acc.value()
    }

    fn sum(mut self, policy: &TruncationPolicy, domain: ActiveDomain) -> Result<SeriesResult> {
        let constant = self.is_constant();
        let free_cells = self.coeffs.len();
        Self::ensure(&mut self.levels_a, self.dim, 0);
        Self::ensure(&mut self.levels_b, self.dim, 0);
        let mut layer = vec![Complex64::new(1.0, 0.0)];
        sum_shells(
            |d| {
                if d > 0 {
                    layer = self.advance(&layer, d);
                }
                self.shell_value(&layer, d)
            },
            free_cells,
            constant,
            policy,
            domain,
        )
    }
}

fn shell_size_f(free_cells: usize, degree: u32) -> f64 {
    crate::multi_index::composition_count(free_cells, degree)
}

/// How shell sums are evaluated. Both give the same finite shell sums; they
/// differ only in floating-point grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellEvaluation {
    /// Terms grouped by counter vector through the recursion A_d = P A_{d-1}/d.
    #[default]
    Grouped,
    /// Every matrix K visited individually, depth-first.
    Enumerated,
}

#[allow(clippy::too_many_arguments)]
fn run_series(
    dim: usize,
    cells: Vec<(usize, usize)>,
    coeffs: &[Complex64],
    tables: Vec<Vec<Complex64>>,
    stride: usize,
    evaluation: ShellEvaluation,
    policy: &TruncationPolicy,
    domain: ActiveDomain,
) -> Result<SeriesResult> {
    policy.validate()?;
    match evaluation {
        ShellEvaluation::Grouped => {
            MarginalSeries::new(dim, &cells, coeffs, tables, stride).sum(policy, domain)
        }
        ShellEvaluation::Enumerated => {
            ShellSeries::new(dim, cells, coeffs, policy.max_degree, tables, stride)
                .sum(policy, domain)
        }
    }
}

// ---------------------------------------------------------------------------
// Right sides
// ---------------------------------------------------------------------------

/// Real series: per term prod_{m<=n} s^k/(2^k k!) * 2^{-tr K} * prod H_{k_l}(x_l),
/// k_l = k_ll + (row sum l of the mirrored K).
pub fn rhs_real(s: &[Vec<f64>], x: &[f64], policy: &TruncationPolicy) -> Result<SeriesResult> {
    rhs_real_with(s, x, policy, ShellEvaluation::Grouped)
}

pub fn rhs_real_with(
    s: &[Vec<f64>],
    x: &[f64],
    policy: &TruncationPolicy,
    evaluation: ShellEvaluation,
) -> Result<SeriesResult> {
    let sm = real_matrix(s)?;
    check_real_domain(&sm)?;
    let n = sm.dim();
    check_len("X", x.len(), n)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("X has non-finite entries".into()));
    }
    let cells = support_cells(n, true);
    let coeffs: Vec<Complex64> = cells
        .iter()
        .map(|&(i, j)| {
            let s = sm.get(i, j).re;
            // the diagonal also carries the 2^{-tr K} factor
            Complex64::new(if i == j { s / 4.0 } else { s / 2.0 }, 0.0)
        })
        .collect();
    let max_index = 2 * policy.max_degree;
    let tables = x
        .iter()
        .map(|&xv| hermite_table(max_index, Complex64::new(xv, 0.0)))
        .collect();
    run_series(
        n,
        cells,
        &coeffs,
        tables,
        1,
        evaluation,
        policy,
        ActiveDomain::Frobenius,
    )
}

fn general_cells(n: usize) -> Vec<(usize, usize)> {
    support_cells(n, false)
        .into_iter()
        .map(|(i, j)| (i, n + j))
        .collect()
}

/// Complex series: per term prod h^k/k! * prod_j H_{r_j, c_j}(conj w_j, w_j).
pub fn rhs_complex(
    h: &ComplexSquareMatrix,
    w: &[Complex64],
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    rhs_complex_with(h, w, policy, ShellEvaluation::Grouped)
}

pub fn rhs_complex_with(
    h: &ComplexSquareMatrix,
    w: &[Complex64],
    policy: &TruncationPolicy,
    evaluation: ShellEvaluation,
) -> Result<SeriesResult> {
    let domain = require_complex_domain(h)?;
    let n = h.dim();
    check_len("W", w.len(), n)?;
    for &z in w {
        ensure_finite("W entry", z)?;
    }
    let d = policy.max_degree;
    let stride = d as usize + 1;
    let tables = w
        .iter()
        .map(|&z| h2d_table(d, z.conj(), z).into_iter().flatten().collect())
        .collect();
    run_series(
        n,
        general_cells(n),
        h.entries(),
        tables,
        stride,
        evaluation,
        policy,
        domain,
    )
}

/// Phase convention for the monomial in the Laguerre form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaguerrePhase {
    /// (rho e^{-i theta})^{r-c}: what the Laguerre connection gives for
    /// H_{r,c}(conj w, w) with w = rho e^{i theta}.
    Conjugated,
    /// (rho e^{i theta})^{r-c}; disagrees with the complex series whenever
    /// the phases matter.
    Unconjugated,
}

/// Complex series with every factor in Laguerre form: per term
/// prod (-h)^k/k! * prod_m c_m! (rho_m e^{-i theta_m})^{r_m - c_m} L_{c_m}^{(r_m - c_m)}(rho_m^2).
pub fn rhs_laguerre(
    h: &ComplexSquareMatrix,
    w_polar: &[PolarPoint],
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    rhs_laguerre_with(
        h,
        w_polar,
        policy,
        LaguerrePhase::Conjugated,
        ShellEvaluation::Grouped,
    )
}

pub fn rhs_laguerre_with(
    h: &ComplexSquareMatrix,
    w_polar: &[PolarPoint],
    policy: &TruncationPolicy,
    phase: LaguerrePhase,
    evaluation: ShellEvaluation,
) -> Result<SeriesResult> {
    let domain = require_complex_domain(h)?;
    let n = h.dim();
    check_len("W", w_polar.len(), n)?;
    if w_polar.iter().any(|p| p.rho() <= 0.0) {
        return Err(Error::InvalidInput(
            "the Laguerre form needs rho > 0".into(),
        ));
    }
    let d = policy.max_degree;
    let stride = d as usize + 1;
    let tables = w_polar
        .iter()
        .map(|p| laguerre_factor_table(d, *p, phase))
        .collect();
    let coeffs: Vec<Complex64> = h.entries().iter().map(|z| -z).collect();
    run_series(
        n,
        general_cells(n),
        &coeffs,
        tables,
        stride,
        evaluation,
        policy,
        domain,
    )
}

/// t[r * (d+1) + c] = c! a^{r-c} L_c^{(r-c)}(rho^2), a = rho e^{-/+ i theta}.
///
/// Entries with r < c use c! a^{-k} L_c^{(-k)}(x) = r! (-conj a)^k L_r^{(k)}(x),
/// k = c - r, which avoids negative powers of a and the cancellation in
/// negative-order Laguerre values.
fn laguerre_factor_table(d: u32, p: PolarPoint, phase: LaguerrePhase) -> Vec<Complex64> {
    let theta = match phase {
        LaguerrePhase::Conjugated => -p.theta(),
        LaguerrePhase::Unconjugated => p.theta(),
    };
    let a = Complex64::from_polar(p.rho(), theta);
    let x = Complex64::new(p.rho() * p.rho(), 0.0);
    let size = d as usize + 1;
    let mut t = vec![Complex64::new(0.0, 0.0); size * size];
    let pos = powers(a, d);
    let neg = powers(-a.conj(), d);
    for k in 0..=d {
        let lag = laguerre_table(d - k, k as i64, x);
        for j in 0..=(d - k) as usize {
            let v = factorial(j as u32) * lag[j];
            // r = j + k, c = j
            t[(j + k as usize) * size + j] = v * pos[k as usize];
            if k > 0 {
                // r = j, c = j + k
                t[j * size + j + k as usize] = v * neg[k as usize];
            }
        }
    }
    t
}

// ---------------------------------------------------------------------------
// Monomial expansions
// ---------------------------------------------------------------------------

/// exp(-Y^T S Y) for real symmetric S and complex Y.
pub fn quadratic_exp_real(s: &[Vec<f64>], y: &[Complex64]) -> Result<Complex64> {
    let sm = real_matrix(s)?;
    check_len("Y", y.len(), sm.dim())?;
    let sy = sm.matvec(y);
    let q: Complex64 = y.iter().zip(&sy).map(|(a, b)| a * b).sum();
    Ok((-q).exp())
}

/// exp(-Z* H Z).
pub fn quadratic_exp_complex(h: &ComplexSquareMatrix, z: &[Complex64]) -> Result<Complex64> {
    check_len("Z", z.len(), h.dim())?;
    let hz = h.matvec(z);
    let q: Complex64 = z.iter().zip(&hz).map(|(a, b)| a.conj() * b).sum();
    Ok((-q).exp())
}

/// Shell expansion sum_K prod_{m<=n} (-2 s)^k/k! 2^{-tr K} prod y_l^{k_l}.
pub fn quadratic_series_real(
    s: &[Vec<f64>],
    y: &[Complex64],
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    let sm = real_matrix(s)?;
    let n = sm.dim();
    check_len("Y", y.len(), n)?;
    let cells = support_cells(n, true);
    let coeffs: Vec<Complex64> = cells
        .iter()
        .map(|&(i, j)| {
            let s = sm.get(i, j).re;
            Complex64::new(if i == j { -s } else { -2.0 * s }, 0.0)
        })
        .collect();
    let tables = y
        .iter()
        .map(|&v| powers(v, 2 * policy.max_degree))
        .collect();
    run_series(
        n,
        cells,
        &coeffs,
        tables,
        1,
        ShellEvaluation::Grouped,
        policy,
        ActiveDomain::Unrestricted,
    )
}

/// Shell expansion sum_K prod (-h)^k/k! prod_j conj(z_j)^{r_j} z_j^{c_j}.
pub fn quadratic_series_complex(
    h: &ComplexSquareMatrix,
    z: &[Complex64],
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    let n = h.dim();
    check_len("Z", z.len(), n)?;
    let d = policy.max_degree;
    let stride = d as usize + 1;
    let tables = z
        .iter()
        .map(|&v| {
            let pc = powers(v.conj(), d);
            let pz = powers(v, d);
            pc.iter()
                .flat_map(|a| pz.iter().map(move |b| a * b))
                .collect()
        })
        .collect();
    let coeffs: Vec<Complex64> = h.entries().iter().map(|v| -v).collect();
    run_series(
        n,
        general_cells(n),
        &coeffs,
        tables,
        stride,
        ShellEvaluation::Grouped,
        policy,
        ActiveDomain::Unrestricted,
    )
}

// ---------------------------------------------------------------------------
// Charlier bilinear sum
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearCheck {
    pub lhs: f64,
    pub rhs: f64,
}

/// Closed form of sum_{0<=j<k} (u^j v^k + u^k v^j)/(j! k!) C_j(k; x) C_j(k; y):
///
/// ```text
/// xy/(xy-uv) [ exp(-(uv x - xy(u+v) + uv y)/(xy-uv))
///              - exp(-uv(x+y)/(xy-uv)) I_0(2 xy sqrt(uv)/(xy-uv)) ]
/// ```
pub fn charlier_bilinear_closed_form(u: f64, v: f64, x: f64, y: f64) -> f64 {
    let xy = x * y;
    let uv = u * v;
    let d = xy - uv;
    let first = (-(uv * x - xy * (u + v) + uv * y) / d).exp();
    let bessel_sq = 4.0 * uv * xy * xy / (d * d);
    let second = (-uv * (x + y) / d).exp() * crate::poly::bessel_i0_from_square(bessel_sq);
    xy / d * (first - second)
}

/// Closed form against the brute-force double sum over j < k, j + k <= cap.
pub fn charlier_bilinear_check(
    u: f64,
    v: f64,
    x: f64,
    y: f64,
    degree_cap: u32,
) -> Result<BilinearCheck> {
    if ![u, v, x, y].iter().all(|t| t.is_finite()) {
        return Err(Error::InvalidInput("non-finite bilinear parameters".into()));
    }
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::DomainViolation(format!(
            "x = {x}, y = {y} must be positive"
        )));
    }
    if u.abs() >= x * y / 4.0 || v.abs() >= x * y / 4.0 {
        return Err(Error::DomainViolation(format!(
            "|u|, |v| must be below xy/4 = {}",
            x * y / 4.0
        )));
    }
    let lhs = charlier_bilinear_closed_form(u, v, x, y);
    let mut acc = crate::sum::CompensatedSum::new();
    for k in 1..=degree_cap {
        for j in 0..k.min(degree_cap - k + 1) {
            let cx = crate::poly::charlier(j, k, x)?;
            let cy = crate::poly::charlier(j, k, y)?;
            let weight = (u.powi(j as i32) * v.powi(k as i32)
                + u.powi(k as i32) * v.powi(j as i32))
                / (factorial(j) * factorial(k));
            acc.add(weight * cx * cy);
        }
    }
    Ok(BilinearCheck {
        lhs,
        rhs: acc.value(),
    })
}

/// Number of terms of the complex series through `degree` for dimension N.
pub fn complex_term_count(dim: usize, degree: u32) -> f64 {
    (0..=degree).map(|d| shell_size(dim, d, false)).sum()
}

/// Builds the square complex matrix from rows, for callers that hold
/// plain nested vectors.
pub fn matrix(rows: &[Vec<Complex64>]) -> Result<ComplexSquareMatrix> {
    ComplexSquareMatrix::from_rows(rows)
}

pub fn vector(entries: &[Complex64]) -> Result<ComplexVector> {
    for &z in entries {
        ensure_finite("vector entry", z)?;
    }
    Ok(entries.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::hermite_real;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(10, 0.0, 3).is_err());
        assert!(TruncationPolicy::new(10, 1.0, 3).is_err());
        assert!(TruncationPolicy::new(10, 1e-10, 0).is_err());
        assert!(TruncationPolicy::new(0, 1e-10, 1).is_ok());
    }

    #[test]
    fn domain_examples() {
        assert!(in_domain_real(&ComplexSquareMatrix::zeros(3)));
        // 0.4 < 1/2 is inside the ball; the boundary value 1/2 is not
        let h = ComplexSquareMatrix::from_fn(2, |_, _| c(0.4, 0.0));
        assert!(in_domain_complex(&h));
        let h = ComplexSquareMatrix::from_fn(2, |_, _| c(0.5, 0.0));
        assert!(!in_domain_complex(&h));
        let h = ComplexSquareMatrix::from_fn(2, |_, _| c(0.3, 0.0));
        assert!(in_domain_complex(&h));
        // Hermitian outside the ball but inside the Frobenius ball
        let h =
            ComplexSquareMatrix::from_fn(2, |i, j| if i == j { c(0.6, 0.0) } else { c(0.0, 0.0) });
        assert_eq!(complex_domain(&h), Some(ActiveDomain::HermitianFrobenius));
        let g =
            ComplexSquareMatrix::from_fn(2, |i, j| if i < j { c(0.6, 0.0) } else { c(0.0, 0.0) });
        assert_eq!(complex_domain(&g), None);
    }

    #[test]
    fn box_domain() {
        let h0 = ComplexSquareMatrix::zeros(2);
        let delta = vec![vec![0.5, 0.25], vec![0.25, 0.5]];
        let h =
            ComplexSquareMatrix::from_fn(2, |i, j| if i == j { c(0.1, 0.1) } else { c(0.1, 0.0) });
        assert!(in_box_domain(&h, &h0, &delta).unwrap());
        let far =
            ComplexSquareMatrix::from_fn(2, |i, j| if i < j { c(0.6, 0.0) } else { c(0.0, 0.0) });
        // u = 0.3, v = -0.3i: both beyond 0.25
        assert!(!in_box_domain(&far, &h0, &delta).unwrap());
        assert!(in_box_domain(&h, &h0, &[vec![0.0, 1.0], vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn lhs_real_examples() {
        assert_eq!(
            lhs_real(&[vec![0.0, 0.0], vec![0.0, 0.0]], &[0.3, -0.7]).unwrap(),
            1.0
        );
        let v = lhs_real(&[vec![0.5]], &[1.0]).unwrap();
        assert!((v - 1.5f64.powf(-0.5) * (0.5f64 / 1.5).exp()).abs() < 1e-15);
        let (s, x, y) = (0.4, 0.7, -0.2);
        let v = lhs_real(&[vec![0.0, s], vec![s, 0.0]], &[x, y]).unwrap();
        let mehler = (1.0 - s * s).powf(-0.5)
            * ((2.0 * s * x * y - s * s * (x * x + y * y)) / (1.0 - s * s)).exp();
        assert!((v - mehler).abs() < 1e-14);
        assert!(matches!(
            lhs_real(&[vec![1.0]], &[0.0]),
            Err(Error::DomainViolation(_))
        ));
        assert!(matches!(
            lhs_real(&[vec![0.0, 0.1], vec![0.1 + 1e-12, 0.0]], &[0.0, 0.0]),
            Err(Error::Asymmetry(_))
        ));
    }

    #[test]
    fn lhs_complex_examples() {
        let w = [c(1.0, 1.0)];
        let v = lhs_complex(
            &ComplexSquareMatrix::from_rows(&[vec![c(0.3, 0.0)]]).unwrap(),
            &w,
        )
        .unwrap();
        assert!(close(v, c((2.0f64 * 0.3 / 1.3).exp() / 1.3, 0.0), 1e-15));
        let (h12, h21) = (c(0.2, 0.1), c(-0.1, 0.3));
        let h = ComplexSquareMatrix::from_rows(&[vec![c(0.0, 0.0), h12], vec![h21, c(0.0, 0.0)]])
            .unwrap();
        let w = [c(0.5, -0.4), c(-0.3, 0.8)];
        let d = 1.0 - h12 * h21;
        let expect = ((h12 * w[0].conj() * w[1] + h21 * w[1].conj() * w[0]
            - h12 * h21 * (w[0].norm_sqr() + w[1].norm_sqr()))
            / d)
            .exp()
            / d;
        assert!(close(lhs_complex(&h, &w).unwrap(), expect, 1e-14));
    }

    #[test]
    fn rhs_real_trivial_and_scalar() {
        let p = TruncationPolicy::real_default();
        let r = rhs_real(&[vec![0.0, 0.0], vec![0.0, 0.0]], &[0.4, 0.9], &p).unwrap();
        assert_eq!(r.value, c(1.0, 0.0));
        assert_eq!(r.degree_reached, 0);
        let r = rhs_real(&[vec![0.3]], &[0.5], &p).unwrap();
        let l = lhs_real(&[vec![0.3]], &[0.5]).unwrap();
        assert!(r.degree_reached <= 30);
        assert!((r.value.re - l).abs() < 1e-8);
    }

    #[test]
    fn degree_one_shell_hand_expansion() {
        let s = [vec![0.11, 0.07], vec![0.07, -0.05]];
        let x = [0.3, -0.8];
        let p = TruncationPolicy::new(1, 0.5, 1).unwrap();
        let series = rhs_real(&s, &x, &TruncationPolicy { max_degree: 1, ..p });
        let shell1 = match series {
            Ok(r) => r.value.re - 1.0,
            Err(e) => e.partial().unwrap().value.re - 1.0,
        };
        let expect = s[0][0] / 4.0 * hermite_real(2, x[0])
            + s[0][1] / 2.0 * hermite_real(1, x[0]) * hermite_real(1, x[1])
            + s[1][1] / 4.0 * hermite_real(2, x[1]);
        assert!((shell1 - expect).abs() < 1e-15);
    }

    #[test]
    fn rhs_complex_scalar_and_poisson() {
        let p = TruncationPolicy::complex_default();
        let h = ComplexSquareMatrix::from_rows(&[vec![c(0.35, 0.0)]]).unwrap();
        let w = [c(0.6, -0.9)];
        let r = rhs_complex(&h, &w, &p).unwrap();
        assert!(close(r.value, lhs_complex(&h, &w).unwrap(), 1e-10));

        let t = 0.3;
        let h = ComplexSquareMatrix::from_real_rows(&[vec![0.0, t], vec![t, 0.0]]).unwrap();
        let w = [c(0.8, 0.0), c(-0.4, 0.0)];
        let r = rhs_complex(&h, &w, &p).unwrap();
        assert!(close(r.value, lhs_complex(&h, &w).unwrap(), 1e-10));
        assert_eq!(
            rhs_complex(&ComplexSquareMatrix::zeros(2), &w, &p)
                .unwrap()
                .value,
            c(1.0, 0.0)
        );
    }

    #[test]
    fn laguerre_form_matches_complex_series() {
        let p = TruncationPolicy::complex_default();
        let h = ComplexSquareMatrix::from_rows(&[
            vec![c(0.1, 0.2), c(-0.25, 0.05)],
            vec![c(0.15, -0.2), c(-0.3, 0.1)],
        ])
        .unwrap();
        let w = [c(0.7, 0.4), c(-0.5, 1.1)];
        let polar: Vec<_> = w.iter().map(|&z| PolarPoint::from_complex(z)).collect();
        let a = rhs_complex(&h, &w, &p).unwrap();
        let b = rhs_laguerre(&h, &polar, &p).unwrap();
        assert!(close(b.value, a.value, 1e-10));
        let unconjugated = rhs_laguerre_with(
            &h,
            &polar,
            &p,
            LaguerrePhase::Unconjugated,
            ShellEvaluation::Grouped,
        )
        .unwrap();
        assert!(!close(unconjugated.value, a.value, 1e-3));
    }

    #[test]
    fn laguerre_first_order_term() {
        // N = 1, degree-1 shell: (-h) L_1^{(0)}(rho^2) = (-h)(1 - rho^2)
        let h = ComplexSquareMatrix::from_rows(&[vec![c(0.2, 0.0)]]).unwrap();
        let pp = PolarPoint::new(0.7, 0.4).unwrap();
        let p = TruncationPolicy {
            max_degree: 1,
            shell_tol: 0.5,
            quiet_shells: 1,
        };
        let r = match rhs_laguerre(&h, &[pp], &p) {
            Ok(r) => r,
            Err(e) => e.partial().unwrap().clone(),
        };
        let expect = -0.2 * (1.0 - 0.49);
        assert!((r.value - c(1.0 + expect, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn truncation_error_carries_partial() {
        let p = TruncationPolicy {
            max_degree: 3,
            shell_tol: 1e-14,
            quiet_shells: 3,
        };
        let e = rhs_real(&[vec![0.9]], &[0.5], &p).unwrap_err();
        let partial = e.partial().expect("partial result");
        assert_eq!(partial.degree_reached, 3);
        assert!(!partial.converged);
    }

    #[test]
    fn monomial_expansions() {
        let p = TruncationPolicy {
            max_degree: 60,
            shell_tol: 1e-15,
            quiet_shells: 3,
        };
        let s = [vec![0.2, -0.1], vec![-0.1, 0.3]];
        let y = [c(0.5, 0.2), c(-0.4, 0.1)];
        let r = quadratic_series_real(&s, &y, &p).unwrap();
        assert!(close(r.value, quadratic_exp_real(&s, &y).unwrap(), 1e-12));
        let h = ComplexSquareMatrix::from_rows(&[
            vec![c(0.2, 0.1), c(0.05, -0.3)],
            vec![c(-0.1, 0.2), c(0.4, 0.0)],
        ])
        .unwrap();
        let r = quadratic_series_complex(&h, &y, &p).unwrap();
        assert!(close(
            r.value,
            quadratic_exp_complex(&h, &y).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn charlier_bilinear_examples() {
        let z = charlier_bilinear_check(0.0, 0.0, 2.0, 3.0, 40).unwrap();
        assert_eq!(z.lhs, 0.0);
        assert_eq!(z.rhs, 0.0);
        let a = charlier_bilinear_check(0.05, 0.03, 2.0, 3.0, 40).unwrap();
        assert!((a.lhs - a.rhs).abs() < 1e-10 * (1.0 + a.lhs.abs()));
        let b = charlier_bilinear_check(0.03, 0.05, 2.0, 3.0, 40).unwrap();
        assert!((a.lhs - b.lhs).abs() < 1e-15);
        assert!(matches!(
            charlier_bilinear_check(2.0, 0.0, 2.0, 3.0, 10),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn grouped_and_enumerated_shells_agree() {
        let p = TruncationPolicy {
            max_degree: 12,
            shell_tol: 1e-3,
            quiet_shells: 100,
        };
        let h = ComplexSquareMatrix::from_fn(3, |i, j| {
            c(0.07 * (i as f64 - 1.0), 0.05 * (j as f64 + 0.5))
        });
        let w = [c(0.3, 0.1), c(-0.8, 0.5), c(1.2, -0.4)];
        let get = |r: Result<SeriesResult>| match r {
            Ok(r) => r,
            Err(e) => e.partial().unwrap().clone(),
        };
        let a = get(rhs_complex_with(&h, &w, &p, ShellEvaluation::Grouped));
        let b = get(rhs_complex_with(&h, &w, &p, ShellEvaluation::Enumerated));
        assert_eq!(a.shell_norms.len(), b.shell_norms.len());
        for (x, y) in a.shell_norms.iter().zip(&b.shell_norms) {
            assert!((x - y).abs() <= 1e-13 * (1.0 + y), "{x} {y}");
        }
        assert!(close(a.value, b.value, 1e-13));
        assert_eq!(a.term_count, b.term_count);

        let s = [
            vec![0.1, -0.05, 0.2],
            vec![-0.05, 0.15, 0.0],
            vec![0.2, 0.0, -0.1],
        ];
        let x = [0.4, -0.9, 0.7];
        let a = get(rhs_real_with(&s, &x, &p, ShellEvaluation::Grouped));
        let b = get(rhs_real_with(&s, &x, &p, ShellEvaluation::Enumerated));
        for (x, y) in a.shell_norms.iter().zip(&b.shell_norms) {
            assert!((x - y).abs() <= 1e-13 * (1.0 + y), "{x} {y}");
        }
        let polar: Vec<_> = w.iter().map(|&z| PolarPoint::from_complex(z)).collect();
        let a = get(rhs_laguerre_with(
            &h,
            &polar,
            &p,
            LaguerrePhase::Conjugated,
            ShellEvaluation::Grouped,
        ));
        let b = get(rhs_laguerre_with(
            &h,
            &polar,
            &p,
            LaguerrePhase::Conjugated,
            ShellEvaluation::Enumerated,
        ));
        assert!(close(a.value, b.value, 1e-13));
    }

    #[test]
    fn parallel_and_sequential_shells_agree_bitwise() {
        let h =
            ComplexSquareMatrix::from_fn(3, |i, j| c(0.05 * (i as f64 + 1.0), -0.04 * j as f64));
        let w = [c(0.3, 0.1), c(-0.2, 0.5), c(0.9, -0.1)];
        let p = TruncationPolicy {
            max_degree: 14,
            shell_tol: 1e-13,
            quiet_shells: 2,
        };
        let e = ShellEvaluation::Enumerated;
        let a = rhs_complex_with(&h, &w, &p, e);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| rhs_complex_with(&h, &w, &p, e));
        let (a, b) = match (a, b) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(a), Err(b)) => (a.partial().unwrap().clone(), b.partial().unwrap().clone()),
            _ => panic!("convergence differs with thread count"),
        };
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
    }
}
