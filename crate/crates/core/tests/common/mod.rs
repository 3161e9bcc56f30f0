//! Shared fixtures and independent oracles for the integration tests.

#![allow(dead_code)]

pub mod props;

use std::collections::HashMap;

use hedgehog::apolarity::CanonicalData;
use hedgehog::linalg::{int, Rational};
use hedgehog::poly::{Kind, Variable};
use hedgehog::resolution::{build_adjusted_presentation, perp_betti_slice, BettiMethod, IdealPresentation};
use hedgehog::tangent::QuotientBasis;
use hedgehog::{f_example, Poly};
use num_traits::ToPrimitive;

pub struct Setup {
    pub cd: CanonicalData,
    pub pres: IdealPresentation,
    pub quot: QuotientBasis,
}

pub fn setup_for(f: &Poly) -> Setup {
    let cd = CanonicalData::new(f).expect("condition (1)");
    let betti = perp_betti_slice(f, 5, BettiMethod::Koszul);
    let pres = build_adjusted_presentation(&cd, &betti).expect("presentation");
    let quot = QuotientBasis::for_ideal(&cd).expect("quotient basis");
    Setup { cd, pres, quot }
}

pub fn setup() -> Setup {
    setup_for(&f_example())
}

pub fn rational_from(n: i64) -> Rational {
    int(n)
}

// ---- brute-force catalecticant oracle -------------------------------------
//
// Works on exponent vectors and i128 integers, with its own differentiation
// and a fraction-free rank; nothing here goes through the library's linear
// algebra or contraction code.

/// Integer form in `n` variables: exponent vector to coefficient.
pub type IntForm = HashMap<Vec<u32>, i128>;

/// Reads a form in `x1..xn` with integer coefficients.
pub fn int_form(f: &Poly, n: usize) -> IntForm {
    let xs = Variable::of_kinds(&[Kind::X]);
    let mut out = IntForm::new();
    for (m, c) in f.terms() {
        assert!(c.is_integer(), "integer coefficients only");
        let exps: Vec<u32> = xs.iter().map(|v| m.exp(*v)).collect();
        assert!(exps[n..].iter().all(|&e| e == 0), "form leaves x1..x{n}");
        out.insert(exps[..n].to_vec(), c.numer().to_i128().expect("small coefficient"));
    }
    out
}

/// Every exponent vector of total degree `d` in `n` variables.
pub fn exponents(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in exponents(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `∂^a f` by the power rule.
pub fn derivative(f: &IntForm, a: &[u32]) -> IntForm {
    let mut out = IntForm::new();
    for (b, c) in f {
        if b.iter().zip(a).any(|(x, y)| x < y) {
            continue;
        }
        let mut k = *c;
        let mut r = b.clone();
        for i in 0..a.len() {
            for j in 0..a[i] {
                k *= (b[i] - j) as i128;
            }
            r[i] -= a[i];
        }
        *out.entry(r).or_insert(0) += k;
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Rank by fraction-free (Bareiss) elimination over i128.
pub fn bareiss_rank(mut m: Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for j in c + 1..cols {
                m[r][j] = (m[rank][c] * m[r][j] - m[r][c] * m[rank][j]) / prev;
            }
            m[r][c] = 0;
        }
        prev = m[rank][c];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Hilbert function of the apolar algebra: ranks of the spaces of `d`-th
/// partial derivatives, for `d = 0..=deg f`.
pub fn brute_hilbert_function(f: &IntForm, n: usize) -> Vec<usize> {
    let e = f.keys().next().map_or(0, |k| k.iter().sum::<u32>());
    (0..=e)
        .map(|d| {
            let targets = exponents(n, e - d);
            let index: HashMap<&Vec<u32>, usize> = targets.iter().enumerate().map(|(i, t)| (t, i)).collect();
            let rows = exponents(n, d)
                .iter()
                .map(|a| {
                    let mut row = vec![0i128; targets.len()];
                    for (m, c) in derivative(f, a) {
                        row[index[&m]] = c;
                    }
                    row
                })
                .collect();
            bareiss_rank(rows)
        })
        .collect()
}

/// `dim (F^⊥)_d = #monomials_d − HF(d)`, zero-padded past the degree.
pub fn brute_perp_dims(f: &IntForm, n: usize, upto: u32) -> Vec<usize> {
    let hf = brute_hilbert_function(f, n);
    (0..=upto)
        .map(|d| exponents(n, d).len() - hf.get(d as usize).copied().unwrap_or(0))
        .collect()
}

/// The first `n` of `x1..x6`.
pub fn first_xs(n: usize) -> Vec<Variable> {
    Variable::of_kinds(&[Kind::X])[..n].to_vec()
}
