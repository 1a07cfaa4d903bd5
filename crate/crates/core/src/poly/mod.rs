//! Exact polynomials in three variables, their restriction to lines, and the
//! sign bookkeeping used by partitioning.

mod quadric;
mod uni;

pub use quadric::{classify_irreducibility, Irreducibility};
pub use uni::{RootInterval, UniPoly};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{Line3, Point3};
use crate::rational::{self, Rational};

pub type Exps = [u32; 3];

/// Sparse trivariate polynomial with rational coefficients.
///
/// When built with [`TriPoly::product`] the factor list is kept alongside the
/// expanded terms; the two always agree.
#[derive(Clone, Debug)]
pub struct TriPoly {
    terms: BTreeMap<Exps, Rational>,
    factors: Option<Vec<TriPoly>>,
    int_terms: OnceLock<Vec<(Exps, BigInt)>>,
}

impl PartialEq for TriPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for TriPoly {}

impl std::hash::Hash for TriPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl TriPoly {
    pub fn from_terms(it: impl IntoIterator<Item = (Exps, Rational)>) -> Self {
        let mut terms: BTreeMap<Exps, Rational> = BTreeMap::new();
        for (e, c) in it {
            *terms.entry(e).or_insert_with(Rational::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        TriPoly::from_map(terms)
    }

    fn from_map(terms: BTreeMap<Exps, Rational>) -> Self {
        TriPoly {
            terms,
            factors: None,
            int_terms: OnceLock::new(),
        }
    }

    pub fn zero() -> Self {
        TriPoly::from_map(BTreeMap::new())
    }

    pub fn constant(c: Rational) -> Self {
        TriPoly::from_terms([([0, 0, 0], c)])
    }

    /// The coordinate function `x_{i+1}`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        TriPoly::from_terms([(e, Rational::one())])
    }

    pub fn monomial(e: Exps, c: Rational) -> Self {
        TriPoly::from_terms([(e, c)])
    }

    /// `a1 x1 + a2 x2 + a3 x3 + c`
    pub fn linear(a: [Rational; 3], c: Rational) -> Self {
        let [a1, a2, a3] = a;
        TriPoly::from_terms([
            ([1, 0, 0], a1),
            ([0, 1, 0], a2),
            ([0, 0, 1], a3),
            ([0, 0, 0], c),
        ])
    }

    /// Builds a polynomial from small integer terms `(e1, e2, e3, coef)`.
    pub fn from_int_terms(terms: &[(u32, u32, u32, i64)]) -> Self {
        TriPoly::from_terms(
            terms
                .iter()
                .map(|&(a, b, c, k)| ([a, b, c], rational::int(k))),
        )
    }

    /// Product that remembers its factors. Nested products are flattened.
    pub fn product(factors: Vec<TriPoly>) -> Self {
        let mut flat = Vec::new();
        for f in factors {
            match f.factors {
                Some(inner) => flat.extend(inner),
                None => flat.push(f),
            }
        }
        let mut acc = TriPoly::constant(Rational::one());
        for f in &flat {
            acc = acc.mul(f);
        }
        acc.factors = Some(flat);
        acc
    }

    pub fn terms(&self) -> &BTreeMap<Exps, Rational> {
        &self.terms
    }

    pub fn factors(&self) -> Option<&[TriPoly]> {
        self.factors.as_deref()
    }

    /// Constructed factors with duplicates (up to scaling) and constants
    /// removed, or the polynomial itself when it was not built as a product.
    pub fn components(&self) -> Vec<TriPoly> {
        let parts: Vec<TriPoly> = match &self.factors {
            Some(f) => f.clone(),
            None => vec![self.clone()],
        };
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for p in parts {
            if p.degree() == 0 {
                continue;
            }
            let n = p.normalized();
            if seen.insert(n.clone()) {
                out.push(n);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e[0] + e[1] + e[2]).max().unwrap_or(0)
    }

    pub fn coeff(&self, e: Exps) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &TriPoly) -> TriPoly {
        TriPoly::from_terms(
            self.terms
                .iter()
                .chain(o.terms.iter())
                .map(|(e, c)| (*e, c.clone())),
        )
    }

    pub fn sub(&self, o: &TriPoly) -> TriPoly {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> TriPoly {
        if s.is_zero() {
            return TriPoly::zero();
        }
        TriPoly::from_map(self.terms.iter().map(|(e, c)| (*e, c * s)).collect())
    }

    pub fn mul(&self, o: &TriPoly) -> TriPoly {
        let mut terms: BTreeMap<Exps, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                *terms.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        TriPoly::from_map(terms)
    }

    /// Scaled so that the lexicographically largest term has coefficient 1.
    /// Two polynomials define the same surface equation up to a constant
    /// iff their normalizations agree.
    pub fn normalized(&self) -> TriPoly {
        match self.terms.values().next_back() {
            Some(lead) if !lead.is_one() => {
                let inv = lead.recip();
                let mut n = self.scale(&inv);
                n.factors = self.factors.as_ref().map(|fs| {
                    let mut fs = fs.clone();
                    fs[0] = fs[0].scale(&inv);
                    fs
                });
                n
            }
            _ => self.clone(),
        }
    }

    pub fn eval(&self, p: &Point3) -> Rational {
        let d = self.degree() as usize;
        let pows: Vec<Vec<Rational>> = p.0.iter().map(|x| powers(x, d)).collect();
        self.terms
            .iter()
            .map(|(e, c)| c * &pows[0][e[0] as usize] * &pows[1][e[1] as usize] * &pows[2][e[2] as usize])
            .sum()
    }

    pub fn eval_f64(&self, p: &[f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                rational::to_f64(c)
                    * p[0].powi(e[0] as i32)
                    * p[1].powi(e[1] as i32)
                    * p[2].powi(e[2] as i32)
            })
            .sum()
    }

    fn int_terms(&self) -> &[(Exps, BigInt)] {
        self.int_terms.get_or_init(|| {
            let den = rational::common_denominator(self.terms.values());
            self.terms
                .iter()
                .map(|(e, c)| (*e, (c * Rational::from_integer(den.clone())).to_integer()))
                .collect()
        })
    }

    /// Exact sign of `self(p)`, evaluated with integers only.
    pub fn sign_at(&self, p: &Point3) -> i8 {
        let terms = self.int_terms();
        if terms.is_empty() {
            return 0;
        }
        let d = self.degree() as usize;
        let q = rational::common_denominator(p.0.iter());
        let xs: Vec<Vec<BigInt>> = p
            .0
            .iter()
            .map(|x| {
                let xi = (x * Rational::from_integer(q.clone())).to_integer();
                int_powers(&xi, d)
            })
            .collect();
        let qp = int_powers(&q, d);
        let mut acc = BigInt::zero();
        for (e, c) in terms {
            let tot = (e[0] + e[1] + e[2]) as usize;
            acc += c
                * &xs[0][e[0] as usize]
                * &xs[1][e[1] as usize]
                * &xs[2][e[2] as usize]
                * &qp[d - tot];
        }
        if acc.is_positive() {
            1
        } else if acc.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn partial(&self, i: usize) -> TriPoly {
        TriPoly::from_terms(self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
            let mut ne = *e;
            ne[i] -= 1;
            (ne, c * rational::int(e[i] as i64))
        }))
    }

    pub fn gradient(&self) -> (TriPoly, TriPoly, TriPoly) {
        (self.partial(0), self.partial(1), self.partial(2))
    }

    /// `x -> self((x - shift) / scale)`.
    pub fn substitute_affine(&self, shift: &[Rational; 3], scale: &Rational) -> TriPoly {
        let d = self.degree() as usize;
        let inv = scale.recip();
        let pows: Vec<Vec<TriPoly>> = (0..3)
            .map(|i| {
                let mut a = [Rational::zero(), Rational::zero(), Rational::zero()];
                a[i] = inv.clone();
                let lin = TriPoly::linear(a, -(&shift[i] * &inv));
                let mut v = vec![TriPoly::constant(Rational::one())];
                for k in 1..=d {
                    let next = v[k - 1].mul(&lin);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = TriPoly::zero();
        for (e, c) in &self.terms {
            let term = pows[0][e[0] as usize]
                .mul(&pows[1][e[1] as usize])
                .mul(&pows[2][e[2] as usize])
                .scale(c);
            acc = acc.add(&term);
        }
        acc
    }

    /// `t -> self(base + t dir)`.
    pub fn restrict_to_line(&self, l: &Line3) -> UniPoly {
        let d = self.degree() as usize;
        let lin: Vec<UniPoly> = (0..3)
            .map(|i| UniPoly::linear(l.base().0[i].clone(), l.dir().0[i].clone()))
            .collect();
        let pows: Vec<Vec<UniPoly>> = lin
            .iter()
            .map(|u| {
                let mut v = vec![UniPoly::constant(Rational::one())];
                for k in 1..=d {
                    let next = v[k - 1].mul(u);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = UniPoly::zero();
        for (e, c) in &self.terms {
            let term = pows[0][e[0] as usize]
                .mul(&pows[1][e[1] as usize])
                .mul(&pows[2][e[2] as usize])
                .scale(c);
            acc = acc.add(&term);
        }
        acc
    }

    /// True iff the whole line lies in the zero set (restriction is the zero
    /// polynomial).
    pub fn line_in_zero_set(&self, l: &Line3) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if let Some(fs) = &self.factors {
            for f in fs {
                if f.restrict_to_line(l).is_zero() {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        Ok(self.restrict_to_line(l).is_zero())
    }

    /// Independent membership test: vanishing at `deg + 1` distinct points.
    pub fn vanishes_at_line_samples(&self, l: &Line3) -> bool {
        (0..=self.degree() as i64).all(|t| self.eval(&l.point_at(&rational::int(t))).is_zero())
    }

    /// Division with remainder by a single divisor under lex order
    /// (`x1 > x2 > x3`). The remainder is zero iff `d` divides `self`.
    pub fn div_rem(&self, d: &TriPoly) -> (TriPoly, TriPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let (dl, dc) = d.terms.iter().next_back().map(|(e, c)| (*e, c.clone())).unwrap();
        let mut p = self.clone();
        let mut quot = BTreeMap::new();
        let mut rem = BTreeMap::new();
        while let Some((e, c)) = p.terms.iter().next_back().map(|(e, c)| (*e, c.clone())) {
            if (0..3).all(|i| e[i] >= dl[i]) {
                let qe = [e[0] - dl[0], e[1] - dl[1], e[2] - dl[2]];
                let qc = &c / &dc;
                p = p.sub(&d.mul(&TriPoly::monomial(qe, qc.clone())));
                quot.insert(qe, qc);
            } else {
                p.terms.remove(&e);
                rem.insert(e, c);
            }
        }
        (TriPoly::from_map(quot), TriPoly::from_map(rem))
    }

    pub fn divides(&self, other: &TriPoly) -> bool {
        other.div_rem(self).1.is_zero()
    }

    /// Re-expands the factor list and compares with the stored terms.
    pub fn factors_consistent(&self) -> bool {
        match &self.factors {
            None => true,
            Some(fs) => {
                let mut acc = TriPoly::constant(Rational::one());
                for f in fs {
                    acc = acc.mul(f);
                }
                acc.terms == self.terms
            }
        }
    }

    pub fn irreducibility(&self) -> Irreducibility {
        classify_irreducibility(self)
    }
}

fn powers(x: &Rational, d: usize) -> Vec<Rational> {
    let mut v = Vec::with_capacity(d + 1);
    v.push(Rational::one());
    for k in 1..=d {
        let next = &v[k - 1] * x;
        v.push(next);
    }
    v
}

fn int_powers(x: &BigInt, d: usize) -> Vec<BigInt> {
    let mut v = Vec::with_capacity(d + 1);
    v.push(BigInt::one());
    for k in 1..=d {
        let next = &v[k - 1] * x;
        v.push(next);
    }
    v
}

impl fmt::Display for TriPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono: Vec<String> = (0..3)
                .filter(|&i| e[i] > 0)
                .map(|i| match e[i] {
                    1 => format!("x{}", i + 1),
                    k => format!("x{}^{}", i + 1, k),
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Exponents of all monomials of total degree at most `d`, by increasing
/// total degree.
pub fn monomials(d: u32) -> Vec<Exps> {
    let mut out = Vec::new();
    for tot in 0..=d {
        for a in (0..=tot).rev() {
            for b in (0..=tot - a).rev() {
                out.push([a, b, tot - a - b]);
            }
        }
    }
    out
}

/// Values of the given monomials at `y`.
pub fn monomial_values(y: &Point3, exps: &[Exps]) -> Vec<Rational> {
    exps.iter()
        .map(|e| {
            let p = |i: usize| num_traits::pow(y.0[i].clone(), e[i] as usize);
            p(0) * p(1) * p(2)
        })
        .collect()
}

/// One sign in `{-1, 0, +1}` per factor. A point lies in a cell iff no entry
/// is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(pub Vec<i8>);

impl SignVector {
    pub fn is_cell(&self) -> bool {
        self.0.iter().all(|&s| s != 0)
    }

    pub fn product_sign(&self) -> i8 {
        self.0.iter().product()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                1 => "+",
                -1 => "-",
                _ => "0",
            })?;
        }
        Ok(())
    }
}

pub fn sign_vector_at(factors: &[TriPoly], x: &Point3) -> SignVector {
    SignVector(factors.iter().map(|f| f.sign_at(x)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BezoutReport {
    pub count: usize,
    pub bound: u64,
    pub witnesses: Vec<usize>,
    pub holds: bool,
}

/// Counts the listed lines lying in both zero sets and checks the count
/// against `deg P * deg Q`.
pub fn bezout_lines_check(p: &TriPoly, q: &TriPoly, lines: &[Line3]) -> Result<BezoutReport> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let pc = p.components();
    let qc = q.components();
    if let Some(shared) = pc.iter().find(|c| qc.contains(c)) {
        return Err(Error::CommonFactor(shared.to_string()));
    }
    let mut witnesses = Vec::new();
    for (i, l) in lines.iter().enumerate() {
        if p.line_in_zero_set(l)? && q.line_in_zero_set(l)? {
            witnesses.push(i);
        }
    }
    let bound = p.degree() as u64 * q.degree() as u64;
    Ok(BezoutReport {
        count: witnesses.len(),
        bound,
        holds: witnesses.len() as u64 <= bound,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn axis(i: usize) -> Line3 {
        let mut d = [0, 0, 0];
        d[i] = 1;
        Line3::new(Point3::origin(), Point3::from_ints(d[0], d[1], d[2])).unwrap()
    }

    #[test]
    fn restriction_examples() {
        let x3 = TriPoly::var(2);
        assert!(x3.restrict_to_line(&axis(0)).is_zero());
        let circle = TriPoly::from_int_terms(&[(2, 0, 0, 1), (0, 2, 0, 1), (0, 0, 0, -1)]);
        assert_eq!(circle.restrict_to_line(&axis(0)), UniPoly::from_ints(&[-1, 0, 1]));
        let regulus = TriPoly::from_int_terms(&[(1, 1, 0, 1), (0, 0, 1, -1)]);
        assert!(regulus.restrict_to_line(&axis(0)).is_zero());
        assert!(regulus.line_in_zero_set(&axis(0)).unwrap());
    }

    #[test]
    fn membership_examples() {
        let empty = TriPoly::from_int_terms(&[(2, 0, 0, 1), (0, 2, 0, 1), (0, 0, 0, 1)]);
        let l = Line3::new(Point3::from_ints(1, 2, 3), Point3::from_ints(1, -1, 2)).unwrap();
        assert!(!empty.line_in_zero_set(&l).unwrap());
        let planes = TriPoly::product(vec![TriPoly::var(0), TriPoly::var(1)]);
        assert!(planes.line_in_zero_set(&axis(1)).unwrap());
        assert!(planes.factors_consistent());
        assert_eq!(
            TriPoly::zero().line_in_zero_set(&axis(0)),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn gradient_examples() {
        let sq = TriPoly::from_int_terms(&[(2, 0, 0, 1)]);
        let (a, b, c) = sq.gradient();
        assert_eq!(a, TriPoly::from_int_terms(&[(1, 0, 0, 2)]));
        assert!(b.is_zero() && c.is_zero());
        let m = TriPoly::from_int_terms(&[(1, 1, 1, 1)]);
        let (a, b, c) = m.gradient();
        assert_eq!(a, TriPoly::from_int_terms(&[(0, 1, 1, 1)]));
        assert_eq!(b, TriPoly::from_int_terms(&[(1, 0, 1, 1)]));
        assert_eq!(c, TriPoly::from_int_terms(&[(1, 1, 0, 1)]));
    }

    #[test]
    fn sign_vector_examples() {
        let f = vec![TriPoly::var(0), TriPoly::var(1)];
        assert_eq!(sign_vector_at(&f, &Point3::from_ints(1, -1, 0)), SignVector(vec![1, -1]));
        assert_eq!(sign_vector_at(&f, &Point3::from_ints(0, 5, 0)), SignVector(vec![0, 1]));
    }

    #[test]
    fn integer_sign_matches_rational_eval() {
        let p = TriPoly::from_terms([
            ([2, 0, 1], rat(3, 7)),
            ([0, 1, 0], rat(-5, 2)),
            ([0, 0, 0], rat(1, 9)),
        ]);
        let x = Point3::new(rat(-1, 3), rat(2, 5), rat(7, 4));
        assert_eq!(p.sign_at(&x), rational::sign(&p.eval(&x)));
    }

    #[test]
    fn bezout_examples() {
        let p = TriPoly::var(2);
        let q = TriPoly::from_int_terms(&[(2, 0, 0, 1), (0, 2, 0, 1), (0, 0, 0, 1)]);
        let rep = bezout_lines_check(&p, &q, &[axis(0), axis(1)]).unwrap();
        assert_eq!(rep.count, 0);
        let rep = bezout_lines_check(&TriPoly::var(0), &TriPoly::var(1), &[axis(0), axis(1), axis(2)])
            .unwrap();
        assert_eq!((rep.count, rep.bound, rep.holds), (1, 1, true));
        let shared = TriPoly::product(vec![TriPoly::var(0), TriPoly::var(1)]);
        let other = TriPoly::product(vec![TriPoly::var(0).scale(&int(2)), TriPoly::var(2)]);
        assert!(matches!(
            bezout_lines_check(&shared, &other, &[]),
            Err(Error::CommonFactor(_))
        ));
    }

    #[test]
    fn division_detects_factors() {
        let a = TriPoly::from_int_terms(&[(1, 1, 0, 1), (0, 0, 1, -1)]);
        let b = TriPoly::linear([int(1), int(-2), int(3)], int(5));
        let prod = a.mul(&b);
        assert!(a.divides(&prod));
        assert!(b.divides(&prod));
        assert!(!b.divides(&prod.add(&TriPoly::constant(int(1)))));
        let (q, r) = prod.div_rem(&a);
        assert!(r.is_zero());
        assert_eq!(q, b);
    }

    #[test]
    fn affine_substitution_matches_evaluation() {
        let p = TriPoly::from_int_terms(&[(2, 1, 0, 3), (0, 0, 1, -1), (0, 0, 0, 4)]);
        let shift = [rat(1, 2), int(-3), rat(2, 7)];
        let scale = rat(5, 4);
        let q = p.substitute_affine(&shift, &scale);
        let x = Point3::new(rat(3, 5), int(2), rat(-1, 3));
        let y = Point3(std::array::from_fn(|i| (&x.0[i] - &shift[i]) / &scale));
        assert_eq!(q.eval(&x), p.eval(&y));
    }

    #[test]
    fn display_is_readable() {
        let p = TriPoly::from_int_terms(&[(1, 1, 0, 1), (0, 0, 1, -1)]);
        assert_eq!(p.to_string(), "x1*x2 - x3");
    }
}
