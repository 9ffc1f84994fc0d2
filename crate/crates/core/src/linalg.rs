//! Exact Gauss-Jordan elimination over the rationals.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// Reduced row echelon form in place; returns the pivot column of each
/// nonzero row. The pivot in each column is the remaining entry of largest
/// absolute value (first one on ties).
pub fn rref(rows: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let best = (r..rows.len())
            .filter(|&i| !rows[i][col].is_zero())
            .fold(None::<usize>, |best, i| match best {
                Some(b) if rows[b][col].abs() >= rows[i][col].abs() => Some(b),
                _ => Some(i),
            });
        let Some(p) = best else { continue };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : A x = 0}`, one vector per free column, in column order.
pub fn null_space(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![Rational::zero(); ncols];
        x[free] = Rational::from_integer(1.into());
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = -m[row][free].clone();
        }
        basis.push(x);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    fn apply(a: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
        a.iter()
            .map(|r| r.iter().zip(x).fold(Rational::zero(), |s, (p, q)| s + p * q))
            .collect()
    }

    #[test]
    fn null_space_of_four_cycle_distance_matrix() {
        let d = mat(&[&[0, 1, 2, 1], &[1, 0, 1, 2], &[2, 1, 0, 1], &[1, 2, 1, 0]]);
        let ns = null_space(&d, 4);
        assert_eq!(ns.len(), 1);
        assert!(apply(&d, &ns[0]).iter().all(Zero::is_zero));
        assert_eq!(ns[0], vec![int(-1), int(1), int(-1), int(1)]);
    }

    #[test]
    fn full_rank_has_trivial_null_space() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        assert!(null_space(&a, 2).is_empty());
        assert_eq!(rank(&a, 2), 2);
    }

    #[test]
    fn empty_system() {
        let ns = null_space(&[], 3);
        assert_eq!(ns.len(), 3);
    }
}
