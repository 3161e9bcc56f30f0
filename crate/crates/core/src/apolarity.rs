//! Catalecticant matrices, perp ideals, Hilbert functions of apolar algebras,
//! and canonical preimages under `h ↦ h∘F`.
//!
//! A form `F` lives in the `x` (and possibly `y`) variables; its operators
//! live in the dual `a` (and `b`) variables. Rows of a catalecticant are
//! indexed by operator monomials of degree `d`, columns by target monomials of
//! degree `deg F − d`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel_of_rows, rank_of_rows, solve_rows, transpose_rows, Echelon, Mat, SparseVec};
use crate::poly::{contract_monomials, Kind, MonomialBasis, Poly, Variable, Weights};

/// An rref-canonical basis of a subspace of a degree-`d` monomial space.
#[derive(Clone, Debug)]
pub struct GradedSubspace {
    coords: MonomialBasis,
    degree: u32,
    rows: Vec<SparseVec>,
}

impl GradedSubspace {
    /// The span of arbitrary vectors in the coordinates of `coords`.
    pub fn from_spanning(coords: MonomialBasis, degree: u32, rows: impl IntoIterator<Item = SparseVec>) -> Self {
        let (rows, _) = Echelon::from_rows(coords.len(), rows).into_rref();
        GradedSubspace { coords, degree, rows }
    }

    /// The span of homogeneous polynomials; panics if one leaves the coordinates.
    pub fn from_polys<'a>(coords: MonomialBasis, degree: u32, polys: impl IntoIterator<Item = &'a Poly>) -> Self {
        let rows: Vec<SparseVec> = polys
            .into_iter()
            .map(|p| coords.vectorize(p).expect("polynomial outside the coordinate space"))
            .collect();
        GradedSubspace::from_spanning(coords, degree, rows)
    }

    pub fn full(coords: MonomialBasis, degree: u32) -> Self {
        let rows = (0..coords.len()).map(SparseVec::unit).collect();
        GradedSubspace { coords, degree, rows }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &MonomialBasis {
        &self.coords
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn basis_mat(&self) -> Mat {
        Mat::from_sparse_rows(&self.rows, self.coords.len())
    }

    pub fn basis_polys(&self) -> Vec<Poly> {
        self.rows.iter().map(|r| self.coords.devectorize(r)).collect()
    }

    pub fn echelon(&self) -> Echelon {
        Echelon::from_rows(self.coords.len(), self.rows.iter().cloned())
    }

    pub fn contains(&self, p: &Poly) -> bool {
        match self.coords.vectorize(p) {
            Some(v) => self.echelon().contains(&v),
            None => false,
        }
    }

    /// Subspace equality, assuming the same coordinates.
    pub fn same_span(&self, other: &GradedSubspace) -> bool {
        self.coords.monomials() == other.coords.monomials() && self.rows == other.rows
    }
}

/// Degree-wise dimensions of a graded algebra, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertFunction {
    pub values: Vec<usize>,
}

impl HilbertFunction {
    pub fn new(mut values: Vec<usize>) -> Self {
        while values.last() == Some(&0) {
            values.pop();
        }
        HilbertFunction { values }
    }

    pub fn total(&self) -> usize {
        self.values.iter().sum()
    }

    pub fn at(&self, d: usize) -> usize {
        self.values.get(d).copied().unwrap_or(0)
    }
}

impl fmt::Display for HilbertFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.values.iter().map(usize::to_string).collect();
        write!(f, "({})", v.join(","))
    }
}

/// `x1..x6`, extended by `y1..y6` when `f` involves `y`.
pub fn target_variables(f: &Poly) -> Vec<Variable> {
    if f.involves_kind(Kind::Y) {
        Variable::of_kinds(&[Kind::X, Kind::Y])
    } else {
        Variable::of_kinds(&[Kind::X])
    }
}

pub fn dual_variables(vars: &[Variable]) -> Vec<Variable> {
    let mut out: Vec<Variable> = vars.iter().map(|v| v.dual()).collect();
    out.sort();
    out
}

fn form_degree(f: &Poly, vars: &[Variable]) -> Result<u32> {
    if f.is_zero() {
        return Err(Error::DegenerateInput("the zero form has no apolar algebra".into()));
    }
    let kinds: Vec<Kind> = {
        let mut k: Vec<Kind> = vars.iter().map(|v| v.kind()).collect();
        k.dedup();
        k
    };
    f.homogeneous_degree(&Weights::kinds(&kinds))
        .ok_or_else(|| Error::DegenerateInput(format!("{f} is not homogeneous")))
}

/// The catalecticant of `f` in degree `d` as sparse rows, together with the
/// source and target coordinates. `vars` are the target variables.
pub fn catalecticant_rows(f: &Poly, vars: &[Variable], d: u32) -> (MonomialBasis, MonomialBasis, Vec<SparseVec>) {
    let e = f.degree().unwrap_or(0);
    let src = MonomialBasis::new(&dual_variables(vars), d);
    let tgt = if d <= e {
        MonomialBasis::new(vars, e - d)
    } else {
        MonomialBasis::from_monomials(Vec::new())
    };
    let rows = src
        .monomials()
        .iter()
        .map(|m| {
            let entries = f
                .terms()
                .filter_map(|(n, c)| {
                    let (r, k) = contract_monomials(m, n)?;
                    Some((tgt.index_of(&r).expect("target monomial in coordinates"), c * k))
                })
                .collect();
            SparseVec::from_entries(entries)
        })
        .collect();
    (src, tgt, rows)
}

/// Matrix of `S_d → P_{e−d}, h ↦ h∘F` in monomial coordinates.
pub fn catalecticant_matrix(f: &Poly, d: u32) -> Mat {
    catalecticant_matrix_in(f, &target_variables(f), d)
}

pub fn catalecticant_matrix_in(f: &Poly, vars: &[Variable], d: u32) -> Mat {
    let (_, tgt, rows) = catalecticant_rows(f, vars, d);
    Mat::from_sparse_rows(&rows, tgt.len())
}

pub fn catalecticant_rank_in(f: &Poly, vars: &[Variable], d: u32) -> usize {
    let (_, tgt, rows) = catalecticant_rows(f, vars, d);
    if rows.len() <= tgt.len() {
        rank_of_rows(rows, tgt.len())
    } else {
        let n = rows.len();
        rank_of_rows(transpose_rows(&rows, tgt.len()), n)
    }
}

/// `(F^⊥)_d` as an rref-canonical subspace of the operator monomials.
pub fn perp_degree(f: &Poly, d: u32) -> GradedSubspace {
    perp_degree_in(f, &target_variables(f), d)
}

pub fn perp_degree_in(f: &Poly, vars: &[Variable], d: u32) -> GradedSubspace {
    let (src, tgt, rows) = catalecticant_rows(f, vars, d);
    let n = src.len();
    let kernel = kernel_of_rows(transpose_rows(&rows, tgt.len()), n);
    GradedSubspace::from_spanning(src, d, kernel)
}

/// Hilbert function of `S/F^⊥`.
pub fn hilbert_function(f: &Poly) -> Result<HilbertFunction> {
    hilbert_function_in(f, &target_variables(f))
}

pub fn hilbert_function_in(f: &Poly, vars: &[Variable]) -> Result<HilbertFunction> {
    let e = form_degree(f, vars)?;
    Ok(HilbertFunction::new((0..=e).map(|d| catalecticant_rank_in(f, vars, d)).collect()))
}

/// The canonical `h` with `h∘F = target` (free variables zero).
pub fn ev_preimage(f: &Poly, target: &Poly) -> Result<Poly> {
    let vars = target_variables(f);
    let e = form_degree(f, &vars)?;
    let kinds: Vec<Kind> = if vars.len() > 6 { vec![Kind::X, Kind::Y] } else { vec![Kind::X] };
    let k = if target.is_zero() {
        return Ok(Poly::zero());
    } else {
        target.homogeneous_degree(&Weights::kinds(&kinds)).ok_or(Error::NoSolution)?
    };
    if k > e || !target.only_kinds(&kinds) {
        return Err(Error::NoSolution);
    }
    let (src, tgt, rows) = catalecticant_rows(f, &vars, e - k);
    let b = tgt.vectorize(target).ok_or(Error::NoSolution)?.to_dense(tgt.len());
    let x = solve_rows(transpose_rows(&rows, tgt.len()), src.len(), &b)?;
    Ok(src.devectorize(&SparseVec::from_dense(&x)))
}

/// Outcome of the first "general enough" condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition1Report {
    pub hf: HilbertFunction,
    /// `F`, its six partials, `x1..x6` and `1` are linearly independent.
    pub independent: bool,
    pub pass: bool,
}

pub fn general_enough_condition1(f: &Poly) -> Result<Condition1Report> {
    let vars = Variable::of_kinds(&[Kind::X]);
    if form_degree(f, &vars)? != 3 || !f.only_kinds(&[Kind::X]) {
        return Err(Error::NotHomogeneousCubic(f.to_string()));
    }
    let hf = hilbert_function(f)?;
    let mut elems = vec![f.clone()];
    elems.extend(vars.iter().map(|&v| f.derivative(v)));
    elems.extend(vars.iter().map(|&v| Poly::var(v)));
    elems.push(Poly::one());
    let coords = MonomialBasis::from_monomials(
        (0..=3u32).rev().flat_map(|d| MonomialBasis::new(&vars, d).monomials().to_vec()).collect(),
    );
    let rows: Vec<SparseVec> = elems.iter().map(|p| coords.vectorize(p).expect("degree at most 3")).collect();
    let independent = rank_of_rows(rows, coords.len()) == elems.len();
    let pass = independent && hf.values == [1, 6, 6, 1];
    Ok(Condition1Report { hf, independent, pass })
}

/// The representative choices shared by every later stage: the socle
/// operator `g` with `g∘F = 1`, quadrics `Q_i` with `Q_i∘F = x_i`, and the
/// rref basis of `(F^⊥)_2`.
#[derive(Clone, Debug)]
pub struct CanonicalData {
    pub f: Poly,
    pub g: Poly,
    pub qs: Vec<Poly>,
    pub perp2: Vec<Poly>,
}

impl CanonicalData {
    /// Requires condition (1); fails with `PrerequisiteFailed` otherwise.
    pub fn new(f: &Poly) -> Result<Self> {
        let c1 = general_enough_condition1(f)?;
        if !c1.pass {
            return Err(Error::PrerequisiteFailed(format!("condition (1) fails: HF {}", c1.hf)));
        }
        let g = ev_preimage(f, &Poly::one())?;
        let qs = (1..=6).map(|i| ev_preimage(f, &Poly::x(i))).collect::<Result<Vec<_>>>()?;
        let perp2 = perp_degree(f, 2).basis_polys();
        Ok(CanonicalData { f: f.clone(), g, qs, perp2 })
    }
}
