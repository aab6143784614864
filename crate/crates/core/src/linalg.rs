//! Exact ranks and Smith invariants of sparse integer matrices.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Sparse integer matrix in coordinate form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `(row, col, value)` with no duplicate positions and no zero values.
    pub entries: Vec<(usize, usize, i64)>,
}

impl SparseMatrix {
    pub fn rank_z2(&self) -> usize {
        let words = self.cols.div_ceil(64);
        let mut rows = vec![vec![0u64; words]; self.rows];
        for &(r, c, v) in &self.entries {
            if v.rem_euclid(2) == 1 {
                rows[r][c / 64] ^= 1 << (c % 64);
            }
        }
        let mut rank = 0;
        for c in 0..self.cols {
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & bit != 0 {
                    for (x, y) in row.iter_mut().zip(&pivot).skip(w) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Rank over the rationals.
    pub fn rank_q(&self) -> usize {
        let mut red = UnitReducer::new(self);
        let units = red.run();
        units + bareiss_rank(red.into_dense())
    }

    /// Nonzero Smith invariants `d_1 | d_2 | ...`, all positive.
    pub fn smith_invariants(&self) -> Vec<BigInt> {
        let mut red = UnitReducer::new(self);
        let units = red.run();
        let mut out = vec![BigInt::one(); units];
        out.extend(dense_smith(red.into_dense()));
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            d[r][c] = v;
        }
        d
    }
}

/// Eliminates unit pivots with row operations on a sparse matrix, then
/// deletes their rows and columns. Each removed pivot is a Smith invariant 1.
struct UnitReducer {
    rows: Vec<BTreeMap<usize, i64>>,
    col_rows: Vec<BTreeSet<usize>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
}

impl UnitReducer {
    fn new(m: &SparseMatrix) -> Self {
        let mut rows = vec![BTreeMap::new(); m.rows];
        let mut col_rows = vec![BTreeSet::new(); m.cols];
        for &(r, c, v) in &m.entries {
            if v != 0 {
                rows[r].insert(c, v);
                col_rows[c].insert(r);
            }
        }
        UnitReducer { rows, col_rows, row_alive: vec![true; m.rows], col_alive: vec![true; m.cols] }
    }

    fn find_pivot(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            if !self.row_alive[r] {
                continue;
            }
            for (&c, &v) in row {
                if v.abs() == 1 {
                    let cost = (row.len() - 1) * (self.col_rows[c].len() - 1);
                    if best.is_none_or(|b| cost < b.2) {
                        best = Some((r, c, cost));
                        if cost == 0 {
                            return Some((r, c));
                        }
                    }
                }
            }
        }
        best.map(|(r, c, _)| (r, c))
    }

    fn run(&mut self) -> usize {
        let mut units = 0;
        while let Some((pr, pc)) = self.find_pivot() {
            let p = self.rows[pr][&pc];
            let pivot_row = self.rows[pr].clone();
            let targets: Vec<usize> = self.col_rows[pc].iter().copied().filter(|&r| r != pr).collect();
            for r in targets {
                let a = self.rows[r][&pc];
                let factor = a * p;
                let mut updated = self.rows[r].clone();
                let mut overflow = false;
                for (&c, &v) in &pivot_row {
                    let cur = updated.get(&c).copied().unwrap_or(0);
                    match factor.checked_mul(v).and_then(|fv| cur.checked_sub(fv)) {
                        Some(0) => {
                            updated.remove(&c);
                        }
                        Some(x) => {
                            updated.insert(c, x);
                        }
                        None => {
                            overflow = true;
                            break;
                        }
                    }
                }
                if overflow {
                    // leave the rest to the arbitrary-precision phase
                    return units;
                }
                for &c in pivot_row.keys() {
                    if updated.contains_key(&c) {
                        self.col_rows[c].insert(r);
                    } else {
                        self.col_rows[c].remove(&r);
                    }
                }
                self.rows[r] = updated;
            }
            for &c in pivot_row.keys() {
                self.col_rows[c].remove(&pr);
            }
            self.rows[pr].clear();
            self.row_alive[pr] = false;
            self.col_alive[pc] = false;
            // the pivot column is now empty; its row is gone
            units += 1;
        }
        units
    }

    fn into_dense(self) -> Vec<Vec<BigInt>> {
        let cols: Vec<usize> = (0..self.col_alive.len())
            .filter(|&c| self.col_alive[c] && !self.col_rows[c].is_empty())
            .collect();
        let pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        self.rows
            .into_iter()
            .enumerate()
            .filter(|(r, row)| self.row_alive[*r] && !row.is_empty())
            .map(|(_, row)| {
                let mut d = vec![BigInt::zero(); cols.len()];
                for (c, v) in row {
                    d[pos[&c]] = BigInt::from(v);
                }
                d
            })
            .collect()
    }
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let Some(cols) = m.first().map(Vec::len) else {
        return 0;
    };
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&m[r][j] * &m[rank][c] - &m[r][c] * &m[rank][j]) / &prev;
                m[r][j] = v;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Nonzero diagonal of the Smith normal form, positive and in divisibility order.
pub fn dense_smith(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if !m[r][c].is_zero() && best.is_none_or(|(br, bc)| m[r][c].abs() < m[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((br, bc)) = best else { break };
        m.swap(t, br);
        for row in m.iter_mut() {
            row.swap(t, bc);
        }
        let mut clean = true;
        for r in t + 1..rows {
            if m[r][t].is_zero() {
                continue;
            }
            let q = m[r][t].div_floor(&m[t][t]);
            for c in t..cols {
                let sub = &q * &m[t][c];
                m[r][c] -= sub;
            }
            if !m[r][t].is_zero() {
                clean = false;
            }
        }
        for c in t + 1..cols {
            if m[t][c].is_zero() {
                continue;
            }
            let q = m[t][c].div_floor(&m[t][t]);
            for r in t..rows {
                let sub = &q * &m[r][t];
                m[r][c] -= sub;
            }
            if !m[t][c].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // pivot must divide the rest of the block
        let bad = (t + 1..rows)
            .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
            .find(|&(r, c)| !(&m[r][c] % &m[t][t]).is_zero());
        if let Some((r, _)) = bad {
            for c in t..cols {
                let add = m[r][c].clone();
                m[t][c] += add;
            }
            continue;
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}
