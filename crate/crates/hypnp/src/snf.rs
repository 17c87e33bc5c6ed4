//! Smith normal form invariant factors of small integer matrices.

use num_integer::Integer;
use num_traits::Signed;

/// Invariant factors `d_1 | d_2 | ...` of `matrix` (row-major), one per
/// diagonal position; zeros mark rank deficiency.
pub fn invariant_factors<I>(matrix: &[Vec<I>]) -> Vec<I>
where
    I: Integer + Signed + Clone,
{
    let rows = matrix.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = matrix[0].len();
    let mut a: Vec<Vec<I>> = matrix.to_vec();
    let size = rows.min(cols);

    for t in 0..size {
        // pivot: nonzero entry of least absolute value in the trailing block
        loop {
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, x) in row.iter().enumerate().skip(t) {
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, size);
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }

            let mut dirty = false;
            for i in t + 1..rows {
                let f = a[i][t].div_floor(&a[t][t]);
                if !f.is_zero() {
                    for j in t..cols {
                        let v = a[t][j].clone() * f.clone();
                        a[i][j] = a[i][j].clone() - v;
                    }
                }
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let f = a[t][j].div_floor(&a[t][t]);
                if !f.is_zero() {
                    for row in a.iter_mut().skip(t) {
                        let v = row[t].clone() * f.clone();
                        row[j] = row[j].clone() - v;
                    }
                }
                dirty |= !a[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            // pivot must divide the whole trailing block
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a[i][j].is_multiple_of(&a[t][t]));
            match offender {
                Some((i, _)) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] = a[t][j].clone() + v;
                    }
                }
                None => break,
            }
        }
    }
    finish(a, size)
}

fn finish<I: Integer + Signed + Clone>(a: Vec<Vec<I>>, size: usize) -> Vec<I> {
    (0..size).map(|i| a[i][i].abs()).collect()
}
