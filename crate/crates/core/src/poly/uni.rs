use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Dense univariate polynomial, lowest degree first. The leading coefficient
/// is nonzero unless the polynomial is zero (empty coefficient list).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        UniPoly::new(vec![c])
    }

    /// `a + b t`
    pub fn linear(a: Rational, b: Rational) -> Self {
        UniPoly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn sign_at(&self, t: &Rational) -> i8 {
        rational::sign(&self.eval(t))
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = Rational::zero();
        UniPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + o.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rational::int(i as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => UniPoly::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`, monic: same real roots, all simple.
    pub fn square_free(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn sturm_chain(&self) -> Vec<UniPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            chain.push(r.scale(&-Rational::one()));
        }
        chain.pop();
        chain
    }

    /// Upper bound on the absolute value of every real root (Cauchy).
    pub fn root_bound(&self) -> Rational {
        let lead = self.leading().expect("nonzero").abs();
        let max = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Rational::zero);
        max + Rational::one()
    }

    /// Isolates the distinct real roots. Each returned interval contains
    /// exactly one root; degenerate intervals (`lo == hi`) are exact rational
    /// roots, otherwise neither endpoint is a root.
    pub fn isolate_real_roots(&self) -> Result<Vec<RootInterval>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == Some(0) {
            return Ok(Vec::new());
        }
        let sf = self.square_free();
        let chain = sf.sturm_chain();
        let bound = sf.root_bound() + Rational::one();
        let lo = -bound.clone();
        let total = variations(&chain, &lo) - variations(&chain, &bound);
        let mut out = Vec::new();
        let mut stack = vec![(lo, bound, total)];
        while let Some((a, b, count)) = stack.pop() {
            if count == 0 {
                continue;
            }
            if count == 1 {
                if sf.eval(&b).is_zero() {
                    out.push(RootInterval { lo: b.clone(), hi: b });
                } else {
                    out.push(RootInterval { lo: a, hi: b });
                }
                continue;
            }
            // Split at a point that is not itself a root.
            let mut m = (&a + &b) / rational::int(2);
            let mut k = 3;
            while sf.eval(&m).is_zero() {
                m = &a + (&b - &a) / rational::int(k);
                k += 1;
            }
            let vm = variations(&chain, &m);
            let va = variations(&chain, &a);
            let left = va - vm;
            stack.push((m.clone(), b, count - left));
            stack.push((a, m, left));
        }
        out.sort_by(|x, y| x.lo.cmp(&y.lo));
        Ok(out)
    }

    /// Shrinks an isolating interval of a simple root (as returned by
    /// [`UniPoly::isolate_real_roots`] for this polynomial's square-free
    /// part) until it is exact or narrower than `width`.
    pub fn refine_root(&self, iv: &RootInterval, width: &Rational) -> RootInterval {
        let mut iv = iv.clone();
        if iv.is_exact() {
            return iv;
        }
        // The upper endpoint is never a root; the lower one may be a root
        // of a neighbouring interval.
        let s_hi = self.sign_at(&iv.hi);
        while &(&iv.hi - &iv.lo) >= width {
            let m = (&iv.lo + &iv.hi) / rational::int(2);
            match self.sign_at(&m) {
                0 => return RootInterval { lo: m.clone(), hi: m },
                s if s == s_hi => iv.hi = m,
                _ => iv.lo = m,
            }
        }
        iv
    }

    /// Number of distinct real roots (Sturm count over the whole line).
    pub fn count_real_roots(&self) -> usize {
        let sf = self.square_free();
        if sf.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let chain = sf.sturm_chain();
        let b = sf.root_bound() + Rational::one();
        variations(&chain, &-b.clone()) - variations(&chain, &b)
    }
}

fn variations(chain: &[UniPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in chain {
        let s = p.sign_at(x);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}t")?,
                _ => write!(f, "{c}t^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn sqrt_two_bracketing() {
        let p = UniPoly::from_ints(&[-2, 0, 1]);
        let roots = p.isolate_real_roots().unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert!(!r.is_exact());
            assert!(p.sign_at(&r.lo) * p.sign_at(&r.hi) < 0);
        }
        assert!(roots[0].hi <= int(0) && roots[1].lo >= int(0));
    }

    #[test]
    fn no_real_roots() {
        let p = UniPoly::from_ints(&[1, 0, 1]);
        assert!(p.isolate_real_roots().unwrap().is_empty());
        assert_eq!(p.count_real_roots(), 0);
    }

    #[test]
    fn repeated_root_uses_square_free_part() {
        // (t-1)^2 (t+3) = t^3 + t^2 - 5t + 3
        let p = UniPoly::from_ints(&[3, -5, 1, 1]);
        let roots = p.isolate_real_roots().unwrap();
        assert_eq!(roots.len(), 2);
        let contains = |r: &RootInterval, x: i64| r.lo <= int(x) && int(x) <= r.hi;
        assert!(contains(&roots[0], -3));
        assert!(contains(&roots[1], 1));
        assert_eq!(p.square_free(), UniPoly::from_ints(&[-3, 2, 1]));
    }

    #[test]
    fn refinement_keeps_the_root() {
        let p = UniPoly::from_ints(&[-2, 0, 1]);
        let sf = p.square_free();
        for iv in p.isolate_real_roots().unwrap() {
            let r = sf.refine_root(&iv, &rat(1, 1000));
            assert!(&r.hi - &r.lo < rat(1, 1000));
            assert!(sf.sign_at(&r.lo) * sf.sign_at(&r.hi) < 0);
        }
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert_eq!(UniPoly::zero().isolate_real_roots(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn division_identity() {
        let a = UniPoly::new(vec![rat(1, 2), int(3), int(-1), rat(2, 3)]);
        let b = UniPoly::from_ints(&[1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }
}
