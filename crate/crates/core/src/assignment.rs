//! Minimum-cost perfect matching on a square cost matrix.

use crate::error::{Error, Result};

/// Dense square matrix of nonnegative costs, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::invalid(
                "cost matrix",
                format!("{} entries for a {n}x{n} matrix", data.len()),
            ));
        }
        if let Some(v) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid("cost matrix", format!("entry {v} is not finite and >= 0")));
        }
        Ok(CostMatrix { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::new(n, data)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// A bijection from rows to columns and its total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `perm[row] = col`.
    pub perm: Vec<usize>,
    pub total_energy: f64,
}

/// Optimal assignment by successive shortest augmenting paths with dual
/// potentials, O(n^3).
pub fn solve_assignment(cost: &CostMatrix) -> Assignment {
    let n = cost.size();
    if n == 0 {
        return Assignment {
            perm: Vec::new(),
            total_energy: 0.0,
        };
    }
    // 1-based bookkeeping; column 0 is a virtual root.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0; n + 1];
    let mut used = vec![false; n + 1];

    for row in 1..=n {
        col_owner[0] = row;
        let mut j0 = 0;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[col_owner[j] - 1] = j - 1;
    }
    let total_energy = perm.iter().enumerate().map(|(i, &j)| cost.get(i, j)).sum();
    Assignment { perm, total_energy }
}
