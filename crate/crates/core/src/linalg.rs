//! Small dense exact linear algebra: elimination, rank, square solves.

use crate::scalar::Scalar;

/// Reduces `rows` to row echelon form in place and returns the pivot columns.
fn echelon<T: Scalar>(rows: &mut [Vec<T>]) -> Vec<usize> {
    let m = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero_tol()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = T::one() / rows[r][c].clone();
        for k in c..ncols {
            rows[r][k] = rows[r][k].clone() * inv.clone();
        }
        for i in 0..m {
            if i != r && !rows[i][c].is_zero_tol() {
                let f = rows[i][c].clone();
                for k in c..ncols {
                    if !rows[r][k].is_zero() {
                        let delta = f.clone() * rows[r][k].clone();
                        rows[i][k] = rows[i][k].clone() - delta;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Scalar>(rows: &[Vec<T>]) -> usize {
    let mut work = rows.to_vec();
    echelon(&mut work).len()
}

/// Indices of a maximal linearly independent subset of `rows`, chosen greedily
/// in order so the result is deterministic.
pub fn independent_rows<T: Scalar>(rows: &[Vec<T>]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    let mut current = 0;
    for i in 0..rows.len() {
        let mut trial: Vec<Vec<T>> = kept.iter().map(|&k| rows[k].clone()).collect();
        trial.push(rows[i].clone());
        let r = rank(&trial);
        if r > current {
            kept.push(i);
            current = r;
        }
    }
    kept
}

/// Solves `A x = b` for square `A`; `None` when `A` is singular.
pub fn solve_square<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    debug_assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    let mut aug: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = echelon(&mut aug);
    if pivots.len() < n || pivots.last() == Some(&n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn rank_and_independence() {
        let rows = vec![
            vec![rat(1, 1), rat(2, 1), rat(3, 1)],
            vec![rat(2, 1), rat(4, 1), rat(6, 1)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1)],
        ];
        assert_eq!(rank(&rows), 2);
        assert_eq!(independent_rows(&rows), vec![0, 2]);
    }

    #[test]
    fn square_solve() {
        let a = vec![vec![rat(2, 1), rat(1, 1)], vec![rat(1, 1), rat(3, 1)]];
        let x = solve_square(&a, &[rat(3, 1), rat(5, 1)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        let singular = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(2, 1), rat(2, 1)]];
        assert!(solve_square(&singular, &[rat(1, 1), rat(2, 1)]).is_none());
    }
}
