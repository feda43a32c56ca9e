//! Exact feasibility LP: find `x >= 0` with `A x = b`.
//!
//! Phase-one simplex on a dense rational tableau with Bland's rule, so it
//! terminates without cycling. Problem sizes here are tiny.

use num::{Signed, Zero};

use crate::rational::{self, Q};

/// A nonnegative solution of `a x = b`, or `None` if there is none.
pub fn feasible_point(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    // Columns: n originals, m artificials, then the right-hand side.
    let width = n + m + 1;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r = vec![rational::zero(); width];
        for (j, v) in row.iter().enumerate() {
            r[j] = if flip { -v } else { v.clone() };
        }
        r[n + i] = rational::one();
        r[width - 1] = if flip { -bi } else { bi.clone() };
        t.push(r);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // Reduced cost of column j for minimising the artificial sum.
        let reduced = |j: usize, t: &Vec<Vec<Q>>, basis: &Vec<usize>| -> Q {
            let cost = |k: usize| if k >= n { rational::one() } else { rational::zero() };
            let cb: Q = t.iter().zip(basis).fold(rational::zero(), |acc, (row, &bk)| acc + cost(bk) * &row[j]);
            cost(j) - cb
        };
        let entering = (0..n + m).find(|&j| !basis.contains(&j) && reduced(j, &t, &basis).is_negative());
        let Some(col) = entering else { break };

        let mut leave: Option<(usize, Q)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[col].is_positive() {
                let ratio = &row[width - 1] / &row[col];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Phase one is bounded below by zero, so some row always limits the step.
        let (r, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut t, r, col);
        basis[r] = col;
    }

    let infeasibility = t
        .iter()
        .zip(&basis)
        .filter(|(_, &bk)| bk >= n)
        .fold(rational::zero(), |acc, (row, _)| acc + &row[width - 1]);
    if !infeasibility.is_zero() {
        return None;
    }
    let mut x = vec![rational::zero(); n];
    for (row, &bk) in t.iter().zip(&basis) {
        if bk < n {
            x[bk] = row[width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Q>], r: usize, c: usize) {
    let inv = rational::one() / &t[r][c];
    for x in t[r].iter_mut() {
        *x = &*x * &inv;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
    }
}

/// Weights `λ >= 0` with `Σλ = 1` and `Σ λ_i points_i = target`.
pub fn convex_weights(points: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    if points.is_empty() {
        return None;
    }
    let k = target.len();
    let mut a: Vec<Vec<Q>> = (0..k).map(|c| points.iter().map(|p| p[c].clone()).collect()).collect();
    a.push(vec![rational::one(); points.len()]);
    let mut b: Vec<Q> = target.to_vec();
    b.push(rational::one());
    feasible_point(&a, &b)
}
