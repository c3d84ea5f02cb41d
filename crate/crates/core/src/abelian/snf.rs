//! Smith normal form over the integers, tracking column operations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Result of diagonalizing an `m x n` relation matrix `A`.
///
/// `U * A * V = diag(diagonal)` for some unimodular `U`; only `V` is kept
/// because it is what carries original generators to the new basis.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub col_transform: Vec<Vec<BigInt>>,
}

pub fn smith_normal_form(rows: &[Vec<BigInt>], ncols: usize) -> SmithForm {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let m = a.len();
    let n = ncols;
    let mut v: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();

    let swap_cols = |a: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    };
    // col_j -= q * col_i
    let col_axpy = |a: &mut Vec<Vec<BigInt>>, v: &mut Vec<Vec<BigInt>>, j: usize, i: usize, q: &BigInt| {
        for row in a.iter_mut() {
            let t = &row[i] * q;
            row[j] -= t;
        }
        for row in v.iter_mut() {
            let t = &row[i] * q;
            row[j] -= t;
        }
    };

    let steps = m.min(n);
    let mut t = 0;
    while t < steps {
        // Pivot: smallest nonzero magnitude in the trailing block.
        let mut pivot: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() {
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => x.abs() < a[pi][pj].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        if pj != t {
            swap_cols(&mut a, &mut v, t, pj);
        }

        let mut clean = true;
        for i in t + 1..m {
            if !a[i][t].is_zero() {
                let q = a[i][t].div_floor(&a[t][t]);
                let pivot_row = a[t].clone();
                for (x, p) in a[i].iter_mut().zip(pivot_row.iter()) {
                    *x -= &q * p;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in t + 1..n {
            if !a[t][j].is_zero() {
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, &mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // Divisibility: fold any offending row into the pivot row and retry.
        let offending = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
        if let Some(i) = offending {
            let row = a[i].clone();
            for (x, y) in a[t].iter_mut().zip(row.iter()) {
                *x += y;
            }
            continue;
        }
        if a[t][t].is_negative() {
            a[t][t] = -a[t][t].clone();
            for row in v.iter_mut() {
                row[t] = -row[t].clone();
            }
        }
        t += 1;
    }

    let diagonal = (0..n)
        .map(|i| if i < m { a[i][i].clone() } else { BigInt::zero() })
        .collect();
    SmithForm { diagonal, col_transform: v }
}
