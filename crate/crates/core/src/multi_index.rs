//! Total-degree shells of nonnegative integer matrices K = (k_{m,n}).
//!
//! The real multilinear sum runs over symmetric K (free cells: the upper
//! triangle with the diagonal), the complex one over all N^2 cells. Shells
//! are enumerated lazily in ascending lexicographic order of the free cells
//! taken row-major.

use serde::{Deserialize, Serialize};

use crate::poly::binomial;

/// Ascending-lexicographic iterator over compositions of `degree` into
/// `parts` nonnegative integers: (0,..,0,d), (0,..,1,d-1), ..., (d,0,..,0).
#[derive(Debug, Clone)]
pub struct Compositions {
    parts: Vec<u32>,
    started: bool,
    done: bool,
}

impl Compositions {
    pub fn new(parts: usize, degree: u32) -> Self {
        let mut v = vec![0; parts];
        let done = match v.last_mut() {
            Some(last) => {
                *last = degree;
                false
            }
            // zero cells hold exactly one (empty) composition of 0
            None => degree != 0,
        };
        Self {
            parts: v,
            started: false,
            done,
        }
    }

    /// Advances in place; returns the current composition.
    pub fn next_ref(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.parts);
        }
        let f = self.parts.len();
        if f < 2 {
            self.done = true;
            return None;
        }
        // rightmost i < f-1 with a positive entry after it
        let mut tail = self.parts[f - 1];
        let mut i = f - 2;
        loop {
            if tail > 0 {
                break;
            }
            if i == 0 {
                self.done = true;
                return None;
            }
            tail += self.parts[i];
            i -= 1;
        }
        // tail = sum of parts[i+1..]
        self.parts[i] += 1;
        for p in &mut self.parts[i + 1..f - 1] {
            *p = 0;
        }
        self.parts[f - 1] = tail - 1;
        Some(&self.parts)
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        self.next_ref().map(<[u32]>::to_vec)
    }
}

/// Number of compositions of `degree` into `parts` nonnegative integers.
pub fn composition_count(parts: usize, degree: u32) -> f64 {
    if parts == 0 {
        return if degree == 0 { 1.0 } else { 0.0 };
    }
    binomial(degree + parts as u32 - 1, parts as u32 - 1)
}

/// Free-cell coordinates (m, n) of the support, row-major.
pub fn support_cells(dim: usize, symmetric: bool) -> Vec<(usize, usize)> {
    let mut cells = Vec::new();
    for m in 0..dim {
        let start = if symmetric { m } else { 0 };
        for n in start..dim {
            cells.push((m, n));
        }
    }
    cells
}

pub fn free_cell_count(dim: usize, symmetric: bool) -> usize {
    if symmetric {
        dim * (dim + 1) / 2
    } else {
        dim * dim
    }
}

/// Shell cardinality binom(degree + F - 1, F - 1).
pub fn shell_size(dim: usize, degree: u32, symmetric: bool) -> f64 {
    composition_count(free_cell_count(dim, symmetric), degree)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndexMatrix {
    dim: usize,
    symmetric: bool,
    /// Full row-major N x N storage; mirrored when symmetric.
    entries: Vec<u32>,
}

impl MultiIndexMatrix {
    pub fn zeros(dim: usize, symmetric: bool) -> Self {
        Self {
            dim,
            symmetric,
            entries: vec![0; dim * dim],
        }
    }

    /// Builds K from its free-cell values in `support_cells` order.
    pub fn from_free_cells(dim: usize, symmetric: bool, cells: &[u32]) -> Self {
        let mut k = Self::zeros(dim, symmetric);
        for (&(m, n), &v) in support_cells(dim, symmetric).iter().zip(cells) {
            k.entries[m * dim + n] = v;
            if symmetric {
                k.entries[n * dim + m] = v;
            }
        }
        k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, m: usize, n: usize) -> u32 {
        self.entries[m * self.dim + n]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Sum over the support (upper triangle with diagonal when symmetric).
    pub fn total_degree(&self) -> u32 {
        support_cells(self.dim, self.symmetric)
            .iter()
            .map(|&(m, n)| self.get(m, n))
            .sum()
    }

    pub fn trace(&self) -> u32 {
        (0..self.dim).map(|j| self.get(j, j)).sum()
    }

    pub fn derived_sums(&self) -> DerivedSums {
        derived_sums(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedSums {
    pub row_sums: Vec<u32>,
    pub col_sums: Vec<u32>,
    pub trace: u32,
    /// k_l = k_{l,l} + sum_j k_{l,j}; the Hermite degrees of the real sum.
    pub k_ell: Vec<u32>,
}

/// Row sums, column sums, trace and k_l of K (mirrored K when symmetric).
pub fn derived_sums(k: &MultiIndexMatrix) -> DerivedSums {
    let n = k.dim;
    let mut row_sums = vec![0; n];
    let mut col_sums = vec![0; n];
    for i in 0..n {
        for j in 0..n {
            let v = k.get(i, j);
            row_sums[i] += v;
            col_sums[j] += v;
        }
    }
    let trace = k.trace();
    let k_ell = (0..n).map(|l| k.get(l, l) + row_sums[l]).collect();
    DerivedSums {
        row_sums,
        col_sums,
        trace,
        k_ell,
    }
}

/// Lazily yields every K of the given total degree exactly once.
#[derive(Debug, Clone)]
pub struct ShellIter {
    dim: usize,
    symmetric: bool,
    comps: Compositions,
}

impl Iterator for ShellIter {
    type Item = MultiIndexMatrix;

    fn next(&mut self) -> Option<MultiIndexMatrix> {
        let (dim, symmetric) = (self.dim, self.symmetric);
        self.comps
            .next_ref()
            .map(|cells| MultiIndexMatrix::from_free_cells(dim, symmetric, cells))
    }
}

/// Shell of total degree `degree` for N = `dim` (dim >= 1).
pub fn enumerate_shell(dim: usize, degree: u32, symmetric: bool) -> ShellIter {
    assert!(dim >= 1, "matrix dimension must be positive");
    ShellIter {
        dim,
        symmetric,
        comps: Compositions::new(free_cell_count(dim, symmetric), degree),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn shell_examples() {
        assert_eq!(enumerate_shell(2, 0, true).count(), 1);
        assert_eq!(enumerate_shell(2, 0, false).count(), 1);
        assert!(enumerate_shell(2, 0, false)
            .next()
            .unwrap()
            .entries()
            .iter()
            .all(|&v| v == 0));
        let sym: Vec<_> = enumerate_shell(2, 1, true).collect();
        assert_eq!(sym.len(), 3);
        assert!(sym.iter().all(|k| k.get(0, 1) == k.get(1, 0)));
        assert_eq!(enumerate_shell(2, 1, false).count(), 4);
    }

    #[test]
    fn counts_match_stars_and_bars() {
        for dim in 1..=4 {
            for degree in 0..=8 {
                for symmetric in [true, false] {
                    let items: Vec<_> = enumerate_shell(dim, degree, symmetric).collect();
                    assert_eq!(items.len() as f64, shell_size(dim, degree, symmetric));
                    let unique: HashSet<_> = items.iter().cloned().collect();
                    assert_eq!(unique.len(), items.len());
                    assert!(items.iter().all(|k| k.total_degree() == degree));
                }
            }
        }
    }

    #[test]
    fn order_is_strictly_ascending_lexicographic() {
        let cells: Vec<Vec<u32>> = Compositions::new(4, 5).collect();
        assert_eq!(cells.first().unwrap(), &vec![0, 0, 0, 5]);
        assert_eq!(cells.last().unwrap(), &vec![5, 0, 0, 0]);
        assert!(cells.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a: Vec<_> = enumerate_shell(3, 4, false).collect();
        let b: Vec<_> = enumerate_shell(3, 4, false).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_compositions() {
        assert_eq!(Compositions::new(1, 7).collect::<Vec<_>>(), vec![vec![7]]);
        assert_eq!(Compositions::new(0, 0).count(), 1);
        assert_eq!(Compositions::new(0, 3).count(), 0);
    }

    #[test]
    fn derived_sum_examples() {
        let z = MultiIndexMatrix::zeros(3, false);
        let d = derived_sums(&z);
        assert_eq!(d.row_sums, vec![0; 3]);
        assert_eq!(d.col_sums, vec![0; 3]);
        assert_eq!(d.trace, 0);

        let k = MultiIndexMatrix::from_free_cells(2, false, &[0, 1, 0, 0]);
        let d = derived_sums(&k);
        assert_eq!(d.row_sums, vec![1, 0]);
        assert_eq!(d.col_sums, vec![0, 1]);

        let k = MultiIndexMatrix::from_free_cells(1, true, &[1]);
        assert_eq!(derived_sums(&k).k_ell, vec![2]);
    }

    #[test]
    fn real_case_k_ell_sum_is_twice_degree() {
        for dim in 1..=3 {
            for degree in 0..=6 {
                for k in enumerate_shell(dim, degree, true) {
                    let d = derived_sums(&k);
                    assert_eq!(d.k_ell.iter().sum::<u32>(), 2 * degree);
                    assert_eq!(
                        d.row_sums.iter().sum::<u32>(),
                        d.col_sums.iter().sum::<u32>()
                    );
                }
            }
        }
    }
}
