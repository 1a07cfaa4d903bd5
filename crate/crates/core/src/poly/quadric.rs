//! Irreducibility labels for surface equations.
//!
//! Degree 1 is always irreducible. Degree 2 is decided exactly from the
//! homogenized 4x4 symmetric matrix: rank >= 3 is irreducible; rank 1 is a
//! double plane; rank 2 is a pair of planes, which are split over the
//! rationals when possible. Higher degrees are left unverified.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::TriPoly;
use crate::linalg;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    VerifiedIrreducible,
    Unverified,
    /// Reducible; the factors are listed when they have rational
    /// coefficients (empty when the split needs irrational coefficients).
    Reducible(Vec<TriPoly>),
}

impl Irreducibility {
    pub fn label(&self) -> &'static str {
        match self {
            Irreducibility::VerifiedIrreducible => "verified-irreducible",
            Irreducibility::Unverified => "unverified",
            Irreducibility::Reducible(_) => "reducible-with-factors",
        }
    }
}

pub fn classify_irreducibility(p: &TriPoly) -> Irreducibility {
    if let Some(fs) = p.factors() {
        let nonconst: Vec<TriPoly> = fs.iter().filter(|f| f.degree() > 0).cloned().collect();
        if nonconst.len() >= 2 {
            return Irreducibility::Reducible(nonconst);
        }
    }
    match p.degree() {
        0 => Irreducibility::Unverified,
        1 => Irreducibility::VerifiedIrreducible,
        2 => classify_quadric(p),
        _ => Irreducibility::Unverified,
    }
}

/// Symmetric matrix of the homogenized quadric in `(x1, x2, x3, w)`.
fn quadric_matrix(p: &TriPoly) -> Vec<Vec<Rational>> {
    let half = rational::rat(1, 2);
    let mut m = vec![vec![Rational::zero(); 4]; 4];
    for (e, c) in p.terms() {
        // Homogeneous exponent vector with w filling the degree up to 2.
        let mut idx = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            for _ in 0..k {
                idx.push(i);
            }
        }
        while idx.len() < 2 {
            idx.push(3);
        }
        let (i, j) = (idx[0], idx[1]);
        if i == j {
            m[i][i] += c;
        } else {
            m[i][j] += c * &half;
            m[j][i] += c * &half;
        }
    }
    m
}

fn classify_quadric(p: &TriPoly) -> Irreducibility {
    let m = quadric_matrix(p);
    match linalg::rank(&m, 4) {
        r if r >= 3 => Irreducibility::VerifiedIrreducible,
        1 => {
            // m = lambda v v^T: p = m_kk^{-1} (row_k . z)^2
            let k = (0..4).find(|&k| !m[k][k].is_zero()).expect("rank 1 has a diagonal entry");
            let l = linear_form(&m[k]).scale(&m[k][k].recip());
            Irreducibility::Reducible(vec![l.scale(&m[k][k]), l])
        }
        _ => split_rank_two(&m),
    }
}

fn linear_form(z: &[Rational]) -> TriPoly {
    TriPoly::linear([z[0].clone(), z[1].clone(), z[2].clone()], z[3].clone())
}

fn split_rank_two(m: &[Vec<Rational>]) -> Irreducibility {
    // Make sure some diagonal entry is nonzero via z_i = y_i + y_j.
    let mut m = m.to_vec();
    let mut shear: Option<(usize, usize)> = None;
    if (0..4).all(|k| m[k][k].is_zero()) {
        let (i, j) = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .find(|&(i, j)| i != j && !m[i][j].is_zero())
            .expect("rank 2 matrix is nonzero");
        // M' = T^T M T with T = I + e_i e_j^T.
        let mut t = vec![vec![Rational::zero(); 4]; 4];
        for (a, row) in t.iter_mut().enumerate() {
            row[a] = Rational::one();
        }
        t[i][j] = Rational::one();
        m = mat_mul(&transpose(&t), &mat_mul(&m, &t));
        shear = Some((i, j));
    }
    let k = (0..4).find(|&k| !m[k][k].is_zero()).unwrap();
    let a = m[k][k].clone();
    // a Q = (a z_k + B)^2 - Delta, Delta has matrix N_ij = M_ki M_kj - a M_ij.
    let n = |i: usize, j: usize| &m[k][i] * &m[k][j] - &a * &m[i][j];
    let s = (0..4)
        .filter(|&s| s != k)
        .find(|&s| !n(s, s).is_zero())
        .expect("rank 2 leaves a rank 1 remainder");
    let nss = n(s, s);
    if nss.is_negative() {
        // Conjugate complex planes; the real zero set is at most a line.
        return Irreducibility::VerifiedIrreducible;
    }
    let Some(sigma) = rational_sqrt(&nss) else {
        return Irreducibility::Reducible(Vec::new());
    };
    // u = a z_k + B,  v = (N_s . z') / sigma
    let mut u = m[k].clone();
    let mut v: Vec<Rational> = (0..4)
        .map(|j| if j == k { Rational::zero() } else { n(s, j) / &sigma })
        .collect();
    if let Some((i, j)) = shear {
        // Back-substitute y_i = z_i - z_j, y_j = z_j.
        for f in [&mut u, &mut v] {
            let fi = f[i].clone();
            f[j] = &f[j] - fi;
        }
    }
    let plus: Vec<Rational> = u.iter().zip(&v).map(|(x, y)| x + y).collect();
    let minus: Vec<Rational> = u.iter().zip(&v).map(|(x, y)| x - y).collect();
    let f1 = linear_form(&plus).scale(&a.recip());
    let f2 = linear_form(&minus);
    Irreducibility::Reducible(vec![f1, f2])
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    let r = BigRational::new(n, d);
    (&r * &r == *q).then_some(r)
}

fn transpose(a: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}
