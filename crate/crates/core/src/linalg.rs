//! Dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Vec<Vec<Rational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        if !inv.is_one() {
            for c in col..m[row].len() {
                let v = &m[row][c] * &inv;
                m[row][c] = v;
            }
        }
        for i in 0..m.len() {
            if i == row || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for c in col..m[row].len() {
                let v = &f * &m[row][c];
                m[i][c] -= v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{v : A v = 0}`, one vector per free column, each with a 1 in its
/// free position.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); ncols];
            v[free] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

/// Solves the square system `A x = b`; `None` if `A` is singular.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = b.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, n);
    if pivots.len() < n {
        return None;
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let a = mat(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let ns = nullspace(&a, 4);
        assert_eq!(ns.len(), 2);
        for v in ns {
            for row in &a {
                let dot: Rational = row.iter().zip(&v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
        assert_eq!(rank(&a, 4), 2);
    }

    #[test]
    fn solves_square_systems() {
        let a = mat(&[&[1, -2], &[2, 1]]);
        let x = solve(&a, &[int(1), int(0)]).unwrap();
        assert_eq!(x, vec![rat(1, 5), rat(-2, 5)]);
        assert!(solve(&mat(&[&[1, 1], &[2, 2]]), &[int(1), int(2)]).is_none());
    }
}
