//! Sparse multivariate polynomials over `Q` with tagged variables.
//!
//! Variables come in kinds: `x`, `y` (the polynomial side of apolarity),
//! `a`, `b` (the dual operators α, β), the scalar parameter `t`, and the
//! nilpotent `eps`. Contraction lets `a_i` act as `∂/∂x_i` and `b_i` as
//! `∂/∂y_i`, with ordinary factorials, while `t` and `eps` ride along as
//! coefficients.

mod coords;
mod monomial;
mod nilpotent;
mod parse;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::linalg::{int, rational_string, Rational};

pub use coords::{devectorize, monomial_coordinates, vectorize, MonomialBasis};
pub use monomial::{monomials_of_degree, Kind, Monomial, Variable, Weights, NVARS};
pub use nilpotent::{DualNumberPoly, NilpotentPoly};
pub use parse::{parse_poly, ParseError};

/// A polynomial: a map from monomials to nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::term(Monomial::ONE, c)
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(int(n))
    }

    pub fn var(v: Variable) -> Self {
        Poly::term(Monomial::var(v), Rational::one())
    }

    pub fn x(i: usize) -> Self {
        Poly::var(Variable::x(i))
    }
    pub fn y(i: usize) -> Self {
        Poly::var(Variable::y(i))
    }
    pub fn alpha(i: usize) -> Self {
        Poly::var(Variable::alpha(i))
    }
    pub fn beta(i: usize) -> Self {
        Poly::var(Variable::beta(i))
    }
    pub fn t() -> Self {
        Poly::var(Variable::t())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::ONE)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(n, x)| (n.mul(m), x.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Weighted degree if every term has the same one.
    pub fn homogeneous_degree(&self, w: &Weights) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.weighted_degree(w));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self, w: &Weights) -> bool {
        self.is_zero() || self.homogeneous_degree(w).is_some()
    }

    /// Sum of the terms of weighted degree `d`.
    pub fn graded_component(&self, d: u32, w: &Weights) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weighted_degree(w) == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn involves_kind(&self, kind: Kind) -> bool {
        self.terms.keys().any(|m| m.involves_kind(kind))
    }

    /// True when every variable occurring has one of the given kinds.
    pub fn only_kinds(&self, kinds: &[Kind]) -> bool {
        self.terms
            .keys()
            .all(|m| m.support().all(|(v, _)| kinds.contains(&v.kind())))
    }

    pub fn variables(&self) -> Vec<Variable> {
        let mut seen = [false; NVARS];
        for m in self.terms.keys() {
            for (v, _) in m.support() {
                seen[v.position()] = true;
            }
        }
        (0..NVARS).filter(|&p| seen[p]).map(Variable::from_position).collect()
    }

    pub fn derivative(&self, v: Variable) -> Poly {
        let p = v.position();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp_at(p);
            if e > 0 {
                let mut n = *m;
                n.set_exp_at(p, e - 1);
                out.add_term(n, c * int(e as i64));
            }
        }
        out
    }

    /// Renames every variable of kind `from` to the same index of kind `to`.
    pub fn rename_kind(&self, from: Kind, to: Kind) -> Poly {
        let f = |v: Variable| {
            if v.kind() == from {
                Variable::new(to, v.index())
            } else {
                v
            }
        };
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.rename(f), c.clone())))
    }

    /// Replaces variables by polynomials; unassigned variables are kept.
    pub fn substitute(&self, assignment: &BTreeMap<Variable, Poly>) -> Poly {
        let mut powers: HashMap<(Variable, u32), Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept = Monomial::ONE;
            let mut acc = Poly::constant(c.clone());
            for (v, e) in m.support() {
                match assignment.get(&v) {
                    Some(q) => {
                        let pw = powers.entry((v, e)).or_insert_with(|| q.pow(e));
                        acc = &acc * &*pw;
                    }
                    None => kept = kept.mul(&Monomial::var_pow(v, e)),
                }
            }
            out += &acc.mul_monomial(&kept);
        }
        out
    }

    /// Substitutes a rational value for one variable.
    pub fn evaluate(&self, v: Variable, value: &Rational) -> Poly {
        let p = v.position();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp_at(p);
            let mut n = *m;
            n.set_exp_at(p, 0);
            out.add_term(n, c * num_traits::pow(value.clone(), e as usize));
        }
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&Rational) -> Rational) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }
}

/// The apolarity action `op ∘ target`.
///
/// `a_i` differentiates by `x_i` and `b_i` by `y_i`; `t` and `eps` in either
/// argument are carried as coefficients. Panics if `op` contains `x`/`y` or
/// `target` contains `a`/`b`.
pub fn contract(op: &Poly, target: &Poly) -> Poly {
    assert!(
        !op.involves_kind(Kind::X) && !op.involves_kind(Kind::Y),
        "contraction operator must not involve x or y"
    );
    assert!(
        !target.involves_kind(Kind::Alpha) && !target.involves_kind(Kind::Beta),
        "contraction target must not involve a or b"
    );
    let mut out = Poly::zero();
    for (m, c) in &op.terms {
        for (n, e) in &target.terms {
            if let Some((r, k)) = contract_monomials(m, n) {
                out.add_term(r, c * e * k);
            }
        }
    }
    out
}

/// `m ∘ n` for monomials, as (monomial, coefficient); `None` when zero.
pub fn contract_monomials(op: &Monomial, target: &Monomial) -> Option<(Monomial, Rational)> {
    let mut r = *target;
    let mut k = BigInt::one();
    for (v, e) in op.support() {
        match v.kind() {
            Kind::Alpha | Kind::Beta => {
                let p = v.dual().position();
                let have = target.exp_at(p);
                if have < e {
                    return None;
                }
                for j in 0..e {
                    k *= BigInt::from(have - j);
                }
                r.set_exp_at(p, have - e);
            }
            _ => {
                let p = v.position();
                r.set_exp_at(p, r.exp_at(p) + e);
            }
        }
    }
    Some((r, Rational::from_integer(k)))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        // highest degree first; within a degree, the monomial order
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| (std::cmp::Reverse(m.degree()), **m));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                f.write_str(&rational_string(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", rational_string(&a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c.clone());
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (n, e) in &rhs.terms {
                out.add_term(m.mul(n), c * e);
            }
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl std::iter::Sum for Poly {
    fn sum<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        iter.fold(Poly::zero(), |acc, p| acc + p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn f_example() -> Poly {
        parse_poly("x1*x2*x4 - x1*x5^2 + x2*x3^2 + x3*x5*x6 + x4*x6^2").unwrap()
    }

    #[test]
    fn arithmetic() {
        let p = f_example();
        assert_eq!(&p + &Poly::zero(), p);
        let s = &Poly::x(1) + &Poly::x(2);
        let expected = parse_poly("x1^2 + 2*x1*x2 + x2^2").unwrap();
        assert_eq!(s.pow(2), expected);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn contraction_examples() {
        let f = f_example();
        assert_eq!(contract(&Poly::one(), &f), f);
        assert_eq!(contract(&Poly::alpha(1), &Poly::x(1).pow(2)), Poly::x(1).scale(&int(2)));
        let a124 = &(&Poly::alpha(1) * &Poly::alpha(2)) * &Poly::alpha(4);
        assert_eq!(contract(&a124, &f), Poly::one());
        assert_eq!(contract(&(&Poly::alpha(2) * &Poly::alpha(4)), &f), Poly::x(1));
        // t rides along as a scalar
        let tx = &Poly::t() * &Poly::x(3).pow(3);
        assert_eq!(
            contract(&Poly::alpha(3).pow(2), &tx),
            (&Poly::t() * &Poly::x(3)).scale(&int(6))
        );
        assert!(contract(&Poly::alpha(5), &Poly::x(1)).is_zero());
    }

    #[test]
    fn substitution_expansion() {
        let f = f_example();
        let mut map = BTreeMap::new();
        for i in 1..=6 {
            map.insert(Variable::x(i), &(&Poly::t() * &Poly::x(i)) + &Poly::y(i));
        }
        let h = f.substitute(&map);
        let fy = f.rename_kind(Kind::X, Kind::Y);
        assert_eq!(h.evaluate(Variable::t(), &int(0)), fy);
        let mut at1 = BTreeMap::new();
        for i in 1..=6 {
            at1.insert(Variable::x(i), &Poly::x(i) + &Poly::y(i));
        }
        assert_eq!(h.evaluate(Variable::t(), &int(1)), f.substitute(&at1));
        // t^3 F(x) + t^2 Σ ∂F/∂x_i(x) y_i + t Σ ∂F/∂y_i(y) x_i + F(y)
        let t = Poly::t();
        let mut expected = &t.pow(3) * &f;
        for i in 1..=6 {
            let dx = f.derivative(Variable::x(i));
            expected += &(&(&t.pow(2) * &dx) * &Poly::y(i));
            let dy = fy.derivative(Variable::y(i));
            expected += &(&(&t * &dy) * &Poly::x(i));
        }
        expected += &fy;
        assert_eq!(h, expected);
    }

    #[test]
    fn graded_components() {
        let f = f_example();
        let wx = Weights::kinds(&[Kind::X]);
        assert_eq!(f.graded_component(3, &wx), f);
        let p = &Poly::one() + &Poly::x(1);
        assert_eq!(p.graded_component(0, &wx), Poly::one());
        assert_eq!(f.homogeneous_degree(&wx), Some(3));
        assert_eq!(p.homogeneous_degree(&wx), None);
    }

    #[test]
    fn display_round_trip() {
        let p = &f_example().scale(&rat(-3, 7)) + &Poly::constant(rat(5, 2));
        let q = parse_poly(&p.to_string()).unwrap();
        assert_eq!(p, q);
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
