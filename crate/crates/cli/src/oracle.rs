//! Homology straight from the cellular chain complex, without the Morse
//! matching: boundary matrices reduced column by column, over GF(2) and over
//! the integers.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use treebraid_core::{Cell, ConfigSpace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("dimension {dim} has {count} cells, above the bound {bound}")]
    TooManyCells {
        dim: usize,
        count: u128,
        bound: u128,
    },
    #[error("integer entries overflowed during reduction")]
    Overflow,
    #[error("a {rows}x{cols} matrix needs a dense Smith form, which exceeds the size bound")]
    DenseTooLarge { rows: usize, cols: usize },
}

/// A sparse matrix stored by columns; each column is sorted by row.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub columns: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn from_dense(dense: &[Vec<i64>]) -> SparseMatrix {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let columns = (0..cols)
            .map(|j| {
                (0..rows)
                    .filter(|&i| dense[i][j] != 0)
                    .map(|i| (i as u32, dense[i][j]))
                    .collect()
            })
            .collect();
        SparseMatrix { rows, columns }
    }

    fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.columns.len()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, a) in col {
                d[i as usize][j] = a;
            }
        }
        d
    }
}

/// Cells of every dimension with their positions, and the boundary matrices
/// `∂_i : C_i → C_{i-1}` for `i = 1..=n`.
pub struct ChainComplex {
    pub counts: Vec<usize>,
    pub boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    /// Refuses to build when some dimension has more than `max_cells` cells.
    pub fn build(space: &ConfigSpace, max_cells: u128) -> Result<ChainComplex, OracleError> {
        let n = space.strands();
        for dim in 0..=n {
            let count = space.cell_count(dim);
            if count > max_cells {
                return Err(OracleError::TooManyCells {
                    dim,
                    count,
                    bound: max_cells,
                });
            }
        }
        let cells: Vec<Vec<Cell>> = (0..=n).map(|d| space.enumerate(d)).collect();
        let mut boundaries = vec![SparseMatrix::default()];
        for dim in 1..=n {
            let index: HashMap<&Cell, u32> = cells[dim - 1]
                .iter()
                .enumerate()
                .map(|(i, c)| (c, i as u32))
                .collect();
            let columns = cells[dim]
                .iter()
                .map(|c| {
                    let mut col: Vec<(u32, i64)> = c
                        .faces_with_sign(space.tree())
                        .expect("positive dimension")
                        .into_iter()
                        .map(|(f, s)| (index[&f], s))
                        .collect();
                    col.sort_unstable();
                    col
                })
                .collect();
            boundaries.push(SparseMatrix {
                rows: cells[dim - 1].len(),
                columns,
            });
        }
        Ok(ChainComplex {
            counts: cells.iter().map(Vec::len).collect(),
            boundaries,
        })
    }

    /// Betti numbers with GF(2) coefficients.
    pub fn betti_mod2(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.boundaries.iter().map(rank_mod2).collect();
        self.betti_from_ranks(&ranks)
    }

    /// Free ranks and torsion of integral homology.
    pub fn integral(&self, dense_limit: usize) -> Result<IntegralHomology, OracleError> {
        let mut ranks = vec![0];
        let mut torsion = Vec::new();
        for (dim, m) in self.boundaries.iter().enumerate().skip(1) {
            let f = invariant_factors(m, dense_limit)?;
            let extra: Vec<u64> = f.iter().copied().filter(|&d| d > 1).collect();
            if !extra.is_empty() {
                torsion.push(TorsionEntry {
                    dim: dim - 1,
                    factors: extra,
                });
            }
            ranks.push(f.len());
        }
        Ok(IntegralHomology {
            free_ranks: self.betti_from_ranks(&ranks),
            torsion,
        })
    }

    fn betti_from_ranks(&self, ranks: &[usize]) -> Vec<usize> {
        (0..self.counts.len())
            .map(|d| self.counts[d] - ranks[d] - ranks.get(d + 1).copied().unwrap_or(0))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionEntry {
    /// Homology degree carrying the torsion.
    pub dim: usize,
    /// Invariant factors above one.
    pub factors: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralHomology {
    pub free_ranks: Vec<usize>,
    pub torsion: Vec<TorsionEntry>,
}

/// Rank over GF(2) by left-to-right column reduction on lowest entries.
pub fn rank_mod2(m: &SparseMatrix) -> usize {
    let mut owner: Vec<Option<Vec<u32>>> = vec![None; m.rows];
    let mut rank = 0;
    for col in &m.columns {
        let mut c: Vec<u32> = col
            .iter()
            .filter(|(_, a)| a % 2 != 0)
            .map(|&(i, _)| i)
            .collect();
        while let Some(&low) = c.last() {
            match &owner[low as usize] {
                Some(p) => c = xor_sorted(&c, p),
                None => {
                    owner[low as usize] = Some(c);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// `a - k b` on sorted sparse integer columns.
fn sub_scaled(a: &[(u32, i64)], b: &[(u32, i64)], k: i64) -> Result<Vec<(u32, i64)>, OracleError> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            let v = b[j].1.checked_mul(-k).ok_or(OracleError::Overflow)?;
            out.push((b[j].0, v));
            j += 1;
        } else {
            let v = b[j]
                .1
                .checked_mul(k)
                .and_then(|x| a[i].1.checked_sub(x))
                .ok_or(OracleError::Overflow)?;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

/// Nonzero invariant factors of an integer matrix. Column reduction with
/// pivots of absolute value one settles most matrices; if a pivot of larger
/// absolute value appears, the whole matrix goes through a dense Smith form
/// provided it has at most `dense_limit` entries.
pub fn invariant_factors(m: &SparseMatrix, dense_limit: usize) -> Result<Vec<u64>, OracleError> {
    let mut owner: Vec<Option<Vec<(u32, i64)>>> = vec![None; m.rows];
    let mut rank = 0;
    for col in &m.columns {
        let mut c = col.clone();
        while let Some(&(low, a)) = c.last() {
            match &owner[low as usize] {
                Some(p) => {
                    let pa = p.last().unwrap().1;
                    if pa.abs() != 1 {
                        return dense_fallback(m, dense_limit);
                    }
                    c = sub_scaled(&c, p, a * pa)?;
                }
                None => {
                    if a.abs() != 1 {
                        return dense_fallback(m, dense_limit);
                    }
                    owner[low as usize] = Some(c);
                    rank += 1;
                    break;
                }
            }
        }
    }
    Ok(vec![1; rank])
}

fn dense_fallback(m: &SparseMatrix, dense_limit: usize) -> Result<Vec<u64>, OracleError> {
    let cols = m.columns.len();
    if m.rows.saturating_mul(cols) > dense_limit {
        return Err(OracleError::DenseTooLarge { rows: m.rows, cols });
    }
    smith_diagonal(m.to_dense())
}

/// Diagonal of the Smith normal form, nonzero entries only.
pub fn smith_diagonal(mut a: Vec<Vec<i64>>) -> Result<Vec<u64>, OracleError> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry in the remaining block.
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| a[i][j].unsigned_abs())
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        let (head, below) = a.split_at_mut(t + 1);
        let pivot_row = &head[t];
        for row in below.iter_mut() {
            let q = row[t] / pivot_row[t];
            if q != 0 {
                for (x, &y) in row[t..cols].iter_mut().zip(&pivot_row[t..cols]) {
                    *x = x
                        .checked_sub(q.checked_mul(y).ok_or(OracleError::Overflow)?)
                        .ok_or(OracleError::Overflow)?;
                }
            }
            clean &= row[t] == 0;
        }
        for j in t + 1..cols {
            let q = a[t][j] / a[t][t];
            if q != 0 {
                for row in a.iter_mut().skip(t) {
                    row[j] = row[j]
                        .checked_sub(q.checked_mul(row[t]).ok_or(OracleError::Overflow)?)
                        .ok_or(OracleError::Overflow)?;
                }
            }
            clean &= a[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // The pivot must divide the rest of the block.
        let p = a[t][t];
        if let Some(i) = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0)) {
            let (head, tail) = a.split_at_mut(i);
            for (x, &y) in head[t][t..cols].iter_mut().zip(&tail[0][t..cols]) {
                *x = x.checked_add(y).ok_or(OracleError::Overflow)?;
            }
            continue;
        }
        diag.push(p.unsigned_abs());
        t += 1;
    }
    Ok(diag)
}
