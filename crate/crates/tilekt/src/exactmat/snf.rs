//! Smith normal form over the integers with unimodular transforms.

use super::matrix::IntMatrix;
use num::bigint::BigInt;
use num::{Integer, Signed, Zero};

/// D = P * A * Q with P, Q unimodular, D diagonal with positive invariant
/// factors d_1 | d_2 | ... | d_r and zeros past r.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub p: IntMatrix,
    pub q: IntMatrix,
    pub d: IntMatrix,
    pub invariant_factors: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Number of invariant factors equal to 1.
    pub fn ones(&self) -> usize {
        self.invariant_factors
            .iter()
            .take_while(|d| d.abs() == BigInt::from(1))
            .count()
    }

    /// Invariant factors greater than 1, i.e. the torsion of the cokernel.
    pub fn torsion_factors(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| **d > BigInt::from(1))
            .cloned()
            .collect()
    }
}

fn find_pivot(a: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    // Minimal absolute value among nonzero entries of the trailing block;
    // ties broken in row-major order.
    let mut best: Option<(usize, usize)> = None;
    let mut best_abs = BigInt::zero();
    for i in k..a.rows() {
        for j in k..a.cols() {
            let v = a[(i, j)].abs();
            if v.is_zero() {
                continue;
            }
            if best.is_none() || v < best_abs {
                best = Some((i, j));
                best_abs = v;
            }
        }
    }
    best
}

/// Computes the Smith normal form of any rectangular integer matrix,
/// including matrices with zero rows or columns. Deterministic for a fixed
/// input: pivots are chosen by minimal absolute value, row-major tie break.
pub fn snf(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut p = IntMatrix::identity(m);
    let mut q = IntMatrix::identity(n);

    let steps = m.min(n);
    let mut rank = 0;
    for k in 0..steps {
        let Some((pi, pj)) = find_pivot(&d, k) else {
            break;
        };
        d.swap_rows(k, pi);
        p.swap_rows(k, pi);
        d.swap_cols(k, pj);
        q.swap_cols(k, pj);

        loop {
            // Reduce the pivot column.
            let mut changed = false;
            for i in k + 1..m {
                if d[(i, k)].is_zero() {
                    continue;
                }
                let quot = d[(i, k)].div_floor(&d[(k, k)]);
                let c = -quot;
                d.add_row_multiple(i, k, &c);
                p.add_row_multiple(i, k, &c);
                if !d[(i, k)].is_zero() {
                    // Remainder is smaller than the pivot; promote it.
                    d.swap_rows(k, i);
                    p.swap_rows(k, i);
                    changed = true;
                }
            }
            // Reduce the pivot row.
            for j in k + 1..n {
                if d[(k, j)].is_zero() {
                    continue;
                }
                let quot = d[(k, j)].div_floor(&d[(k, k)]);
                let c = -quot;
                d.add_col_multiple(j, k, &c);
                q.add_col_multiple(j, k, &c);
                if !d[(k, j)].is_zero() {
                    d.swap_cols(k, j);
                    q.swap_cols(k, j);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // Pivot divides nothing left in its row/column; enforce that it
            // divides the whole trailing block before moving on.
            let mut offending = None;
            'scan: for i in k + 1..m {
                for j in k + 1..n {
                    if !d[(i, j)].is_multiple_of(&d[(k, k)]) {
                        offending = Some(i);
                        break 'scan;
                    }
                }
            }
            match offending {
                Some(i) => {
                    let one = BigInt::from(1);
                    d.add_row_multiple(k, i, &one);
                    p.add_row_multiple(k, i, &one);
                }
                None => break,
            }
        }
        if d[(k, k)].is_negative() {
            d.negate_row(k);
            p.negate_row(k);
        }
        rank = k + 1;
    }

    let invariant_factors: Vec<BigInt> = (0..rank).map(|i| d[(i, i)].clone()).collect();
    debug_assert!(invariant_factors
        .windows(2)
        .all(|w| w[1].is_multiple_of(&w[0])));

    SmithDecomposition {
        p,
        q,
        d,
        invariant_factors,
    }
}
