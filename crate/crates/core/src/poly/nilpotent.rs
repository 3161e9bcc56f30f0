//! Polynomials with coefficients in `k[ε_1, …, ε_r]/(ε_1², …, ε_r²)`.
//!
//! A [`NilpotentPoly`] stores one ε-free part per subset of the nilpotents,
//! indexed by bitmask. [`DualNumberPoly`] is the single-ε case with named
//! parts.

use std::ops::{Add, Mul, Neg, Sub};

use super::{Kind, Poly, Variable, Weights};
use crate::linalg::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentPoly {
    nilpotents: usize,
    parts: Vec<Poly>,
}

impl NilpotentPoly {
    /// Panics if `nilpotents > 4`.
    pub fn zero(nilpotents: usize) -> Self {
        assert!(nilpotents <= 4, "at most four nilpotents supported");
        NilpotentPoly {
            nilpotents,
            parts: vec![Poly::zero(); 1 << nilpotents],
        }
    }

    pub fn from_real(nilpotents: usize, p: Poly) -> Self {
        NilpotentPoly::monomial(nilpotents, 0, p)
    }

    /// `ε^mask · p`.
    pub fn monomial(nilpotents: usize, mask: usize, p: Poly) -> Self {
        let mut out = NilpotentPoly::zero(nilpotents);
        out.parts[mask] = p;
        out
    }

    pub fn nilpotents(&self) -> usize {
        self.nilpotents
    }

    pub fn part(&self, mask: usize) -> &Poly {
        &self.parts[mask]
    }

    pub fn set_part(&mut self, mask: usize, p: Poly) {
        self.parts[mask] = p;
    }

    pub fn real(&self) -> &Poly {
        &self.parts[0]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Poly::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        NilpotentPoly {
            nilpotents: self.nilpotents,
            parts: self.parts.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Multiplication by a nilpotent-free polynomial.
    pub fn mul_poly(&self, p: &Poly) -> Self {
        NilpotentPoly {
            nilpotents: self.nilpotents,
            parts: self.parts.iter().map(|q| q * p).collect(),
        }
    }

    /// Multiplication by `ε^mask`.
    pub fn shift(&self, mask: usize) -> Self {
        let mut out = NilpotentPoly::zero(self.nilpotents);
        for (m, p) in self.parts.iter().enumerate() {
            if m & mask == 0 {
                out.parts[m | mask] = p.clone();
            }
        }
        out
    }

    /// Applies the same map to every part.
    pub fn map_parts(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        NilpotentPoly {
            nilpotents: self.nilpotents,
            parts: self.parts.iter().map(f).collect(),
        }
    }

    /// Degree where each nilpotent weighs one and parts are graded by `w`;
    /// `None` if not homogeneous or zero.
    pub fn homogeneous_degree(&self, w: &Weights) -> Option<u32> {
        let mut deg = None;
        for (m, p) in self.parts.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let d = p.homogeneous_degree(w)? + m.count_ones();
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Sets the nilpotents in `mask` to zero, keeping the others.
    pub fn reduce_mod(&self, mask: usize) -> Self {
        let mut out = self.clone();
        for (m, p) in out.parts.iter_mut().enumerate() {
            if m & mask != 0 {
                *p = Poly::zero();
            }
        }
        out
    }
}

impl Add for &NilpotentPoly {
    type Output = NilpotentPoly;
    fn add(self, rhs: &NilpotentPoly) -> NilpotentPoly {
        assert_eq!(self.nilpotents, rhs.nilpotents);
        NilpotentPoly {
            nilpotents: self.nilpotents,
            parts: self.parts.iter().zip(&rhs.parts).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &NilpotentPoly {
    type Output = NilpotentPoly;
    fn sub(self, rhs: &NilpotentPoly) -> NilpotentPoly {
        self + &(-rhs)
    }
}

impl Neg for &NilpotentPoly {
    type Output = NilpotentPoly;
    fn neg(self) -> NilpotentPoly {
        self.map_parts(|p| -p)
    }
}

impl Mul for &NilpotentPoly {
    type Output = NilpotentPoly;
    fn mul(self, rhs: &NilpotentPoly) -> NilpotentPoly {
        assert_eq!(self.nilpotents, rhs.nilpotents);
        let mut out = NilpotentPoly::zero(self.nilpotents);
        for (a, p) in self.parts.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (b, q) in rhs.parts.iter().enumerate() {
                if a & b == 0 && !q.is_zero() {
                    out.parts[a | b] += &(p * q);
                }
            }
        }
        out
    }
}

/// `real_part + ε·eps_part` with `ε² = 0`; both parts are ε-free.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DualNumberPoly {
    pub real_part: Poly,
    pub eps_part: Poly,
}

impl DualNumberPoly {
    /// Panics if either part involves `eps`.
    pub fn new(real_part: Poly, eps_part: Poly) -> Self {
        assert!(
            !real_part.involves_kind(Kind::Eps) && !eps_part.involves_kind(Kind::Eps),
            "dual-number parts must be eps-free"
        );
        DualNumberPoly { real_part, eps_part }
    }

    pub fn eps() -> Self {
        DualNumberPoly::new(Poly::zero(), Poly::one())
    }

    /// Splits a polynomial in `eps`, discarding `eps²` and higher.
    pub fn from_poly(p: &Poly) -> Self {
        let e = Variable::eps();
        let real = p.evaluate(e, &Rational::from_integer(0.into()));
        let lin = p.derivative(e).evaluate(e, &Rational::from_integer(0.into()));
        DualNumberPoly::new(real, lin)
    }

    pub fn to_poly(&self) -> Poly {
        &self.real_part + &(&Poly::var(Variable::eps()) * &self.eps_part)
    }

    pub fn to_nilpotent(&self) -> NilpotentPoly {
        let mut n = NilpotentPoly::zero(1);
        n.set_part(0, self.real_part.clone());
        n.set_part(1, self.eps_part.clone());
        n
    }

    pub fn from_nilpotent(n: &NilpotentPoly) -> Self {
        assert_eq!(n.nilpotents(), 1);
        DualNumberPoly::new(n.part(0).clone(), n.part(1).clone())
    }
}

impl Add for &DualNumberPoly {
    type Output = DualNumberPoly;
    fn add(self, rhs: &DualNumberPoly) -> DualNumberPoly {
        DualNumberPoly {
            real_part: &self.real_part + &rhs.real_part,
            eps_part: &self.eps_part + &rhs.eps_part,
        }
    }
}

impl Mul for &DualNumberPoly {
    type Output = DualNumberPoly;
    fn mul(self, rhs: &DualNumberPoly) -> DualNumberPoly {
        DualNumberPoly {
            real_part: &self.real_part * &rhs.real_part,
            eps_part: &(&self.real_part * &rhs.eps_part) + &(&self.eps_part * &rhs.real_part),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_squared_vanishes() {
        let a = Poly::alpha(1);
        let b = Poly::alpha(2);
        let z = DualNumberPoly::new(a.clone(), b);
        let prod = &DualNumberPoly::eps() * &z;
        assert_eq!(prod, DualNumberPoly::new(Poly::zero(), a));
        assert_eq!(DualNumberPoly::from_poly(&prod.to_poly()), prod);
    }

    #[test]
    fn two_nilpotents() {
        let e1 = NilpotentPoly::monomial(2, 1, Poly::one());
        let e2 = NilpotentPoly::monomial(2, 2, Poly::one());
        assert!((&e1 * &e1).is_zero());
        let both = &e1 * &e2;
        assert_eq!(both.part(3), &Poly::one());
        assert_eq!(e1.shift(2), both);
        assert!(both.reduce_mod(1).is_zero());
        let w = Weights::kinds(&[Kind::Alpha]);
        let h = &NilpotentPoly::from_real(2, Poly::alpha(1)) + &e2;
        assert_eq!(h.homogeneous_degree(&w), Some(1));
    }
}
