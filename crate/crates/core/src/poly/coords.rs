use std::collections::HashMap;

use super::{monomials_of_degree, Kind, Monomial, Poly, Variable};
use crate::linalg::SparseVec;

/// An indexed list of monomials used as coordinates for a graded piece.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl MonomialBasis {
    /// Degree-`d` monomials in `vars`, in the crate's monomial order.
    pub fn new(vars: &[Variable], d: u32) -> Self {
        MonomialBasis::from_monomials(monomials_of_degree(vars, d))
    }

    /// Panics on duplicate monomials.
    pub fn from_monomials(monomials: Vec<Monomial>) -> Self {
        let index: HashMap<Monomial, usize> =
            monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        assert_eq!(index.len(), monomials.len(), "duplicate monomial in basis");
        MonomialBasis { monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn monomial(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coordinates of `p`; `None` if some term lies outside the basis.
    pub fn vectorize(&self, p: &Poly) -> Option<SparseVec> {
        let mut entries = Vec::with_capacity(p.num_terms());
        for (m, c) in p.terms() {
            entries.push((self.index_of(m)?, c.clone()));
        }
        Some(SparseVec::from_entries(entries))
    }

    pub fn devectorize(&self, v: &SparseVec) -> Poly {
        Poly::from_terms(v.iter().map(|(i, c)| (self.monomials[i], c.clone())))
    }
}

/// Degree-`d` monomials in all variables of the given kinds.
pub fn monomial_coordinates(kinds: &[Kind], d: u32) -> Vec<Monomial> {
    monomials_of_degree(&Variable::of_kinds(kinds), d)
}

pub fn vectorize(p: &Poly, basis: &MonomialBasis) -> Option<SparseVec> {
    basis.vectorize(p)
}

pub fn devectorize(v: &SparseVec, basis: &MonomialBasis) -> Poly {
    basis.devectorize(v)
}
