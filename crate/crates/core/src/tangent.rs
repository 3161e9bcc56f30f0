//! Graded pieces of `Hom_S(J, S/J)` for `J = F^⊥` and `J = I = F^⊥ + (g)`,
//! the tangents `𝔵_Q` and `∂_i`, first-order deformations over dual
//! numbers, and the trace of coordinate multiplication on them.
//!
//! Classes in `S/J` are read off through the apolarity pairing: a degree-`d`
//! operator `h` is determined modulo `F^⊥` by `h∘F`, so its coordinates in
//! the representatives `{1}, {α_i}, {Q_i}, {g}` come from a fixed linear map
//! applied to `h∘F`. For `I` the degree-3 piece is dropped.
//!
//! Degree `k` of a homomorphism means `δ(J_n) ⊂ (S/J)_{n+k}`, so `𝔵_Q` and
//! `∂_i` have degree `−1`.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::apolarity::CanonicalData;
use crate::error::{Error, Result};
use crate::linalg::{int, kernel_of_rows, rank_of_rows, solve_rows, transpose_rows, Echelon, Rational, SparseVec};
use crate::poly::{contract, Kind, Monomial, MonomialBasis, NilpotentPoly, Poly, Variable, Weights};
use crate::resolution::IdealPresentation;

fn alpha_weights() -> Weights {
    Weights::kinds(&[Kind::Alpha])
}

fn alpha_vars() -> Vec<Variable> {
    Variable::of_kinds(&[Kind::Alpha])
}

/// Reads coordinates of `h∘F` against the representatives of one degree.
#[derive(Clone, Debug)]
struct Decoder {
    coords: MonomialBasis,
    pivots: Vec<usize>,
    // row r: coefficients expressing the r-th rref row in the representatives
    inverse: Vec<Vec<Rational>>,
}

impl Decoder {
    fn new(f: &Poly, reps: &[Poly], degree: u32) -> Result<Self> {
        let e = f.degree().expect("nonzero form");
        let coords = MonomialBasis::new(&Variable::of_kinds(&[Kind::X]), e - degree);
        let n = coords.len();
        let m = reps.len();
        let rows = reps.iter().enumerate().map(|(j, r)| {
            let v = coords.vectorize(&contract(r, f)).expect("degree of h∘F");
            let mut entries: Vec<(usize, Rational)> = v.entries().to_vec();
            entries.push((n + j, Rational::from_integer(1.into())));
            SparseVec::from_entries(entries)
        });
        let (rref, pivots) = Echelon::from_rows(n + m, rows).into_rref();
        if pivots.iter().any(|&p| p >= n) {
            return Err(Error::BasisFailure(format!("degree-{degree} representatives are dependent modulo F^⊥")));
        }
        let inverse = rref.iter().map(|r| (0..m).map(|j| r.get(n + j)).collect()).collect();
        Ok(Decoder { coords, pivots, inverse })
    }

    fn decode(&self, f: &Poly, h: &Poly) -> Vec<Rational> {
        let m = self.inverse.first().map_or(0, Vec::len);
        let v = self.coords.vectorize(&contract(h, f)).expect("degree of h∘F");
        let mut out = vec![Rational::from_integer(0.into()); m];
        for (r, &p) in self.pivots.iter().enumerate() {
            let c = v.get(p);
            if c != Rational::from_integer(0.into()) {
                for (j, x) in self.inverse[r].iter().enumerate() {
                    out[j] += &c * x;
                }
            }
        }
        out
    }
}

/// Representatives of `S/J` degree by degree, with coordinate maps.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    f: Poly,
    reps: Vec<Vec<Poly>>,
    decoders: Vec<Decoder>,
}

impl QuotientBasis {
    fn new(f: &Poly, reps: Vec<Vec<Poly>>) -> Result<Self> {
        let decoders = reps
            .iter()
            .enumerate()
            .map(|(d, r)| Decoder::new(f, r, d as u32))
            .collect::<Result<Vec<_>>>()?;
        for (d, dec) in decoders.iter().enumerate() {
            if dec.pivots.len() != dec.coords.len().min(reps[d].len()) {
                return Err(Error::BasisFailure(format!("degree {d}")));
            }
        }
        Ok(QuotientBasis { f: f.clone(), reps, decoders })
    }

    /// `S/I` for `I = F^⊥ + (g)`: `{1}, {α_i}, {Q_i}`.
    pub fn for_ideal(cd: &CanonicalData) -> Result<Self> {
        let reps = vec![vec![Poly::one()], (1..=6).map(Poly::alpha).collect(), cd.qs.clone()];
        QuotientBasis::new(&cd.f, reps)
    }

    /// `S/F^⊥`: `{1}, {α_i}, {Q_i}, {g}`.
    pub fn for_apolar(cd: &CanonicalData) -> Result<Self> {
        let reps = vec![
            vec![Poly::one()],
            (1..=6).map(Poly::alpha).collect(),
            cd.qs.clone(),
            vec![cd.g.clone()],
        ];
        QuotientBasis::new(&cd.f, reps)
    }

    /// Highest nonzero degree.
    pub fn top(&self) -> u32 {
        self.reps.len() as u32 - 1
    }

    pub fn dim(&self, d: i64) -> usize {
        if d < 0 {
            0
        } else {
            self.reps.get(d as usize).map_or(0, Vec::len)
        }
    }

    pub fn total_dim(&self) -> usize {
        self.reps.iter().map(Vec::len).sum()
    }

    pub fn hilbert_function(&self) -> Vec<usize> {
        self.reps.iter().map(Vec::len).collect()
    }

    pub fn reps(&self, d: u32) -> &[Poly] {
        self.reps.get(d as usize).map_or(&[], Vec::as_slice)
    }

    /// Coordinates of the class of a degree-`d` homogeneous operator.
    pub fn coords(&self, h: &Poly, d: u32) -> Vec<Rational> {
        match self.decoders.get(d as usize) {
            Some(dec) => dec.decode(&self.f, h),
            None => Vec::new(),
        }
    }

    pub fn from_coords(&self, c: &[Rational], d: u32) -> Poly {
        self.reps(d).iter().zip(c).map(|(r, x)| r.scale(x)).sum()
    }

    /// The representative combination congruent to `h` (any operator).
    pub fn normal_form(&self, h: &Poly) -> Poly {
        let w = alpha_weights();
        (0..=self.top())
            .map(|d| {
                let part = h.graded_component(d, &w);
                if part.is_zero() {
                    Poly::zero()
                } else {
                    self.from_coords(&self.coords(&part, d), d)
                }
            })
            .sum()
    }

    pub fn is_zero_class(&self, h: &Poly) -> bool {
        self.normal_form(h).is_zero()
    }
}

/// A homogeneous homomorphism `J → S/J`, stored as normal-form images of
/// the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentVector {
    pub degree: i64,
    pub images: Vec<Poly>,
}

impl TangentVector {
    pub fn zero(degree: i64, ngens: usize) -> Self {
        TangentVector { degree, images: vec![Poly::zero(); ngens] }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TangentVector { degree: self.degree, images: self.images.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn add(&self, other: &TangentVector) -> Self {
        assert_eq!(self.degree, other.degree);
        TangentVector {
            degree: self.degree,
            images: self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Poly::is_zero)
    }

    /// Flat coordinates: per generator, the class coordinates of its image.
    pub fn coords(&self, pres: &IdealPresentation, quot: &QuotientBasis) -> SparseVec {
        let mut entries = Vec::new();
        let mut offset = 0;
        for (img, &e) in self.images.iter().zip(&pres.generator_degrees) {
            let t = e as i64 + self.degree;
            let n = quot.dim(t);
            if n > 0 {
                for (j, x) in quot.coords(img, t as u32).into_iter().enumerate() {
                    entries.push((offset + j, x));
                }
            }
            offset += n;
        }
        SparseVec::from_entries(entries)
    }

    /// Checks every syzygy: `Σ v_i·δ(g_i) = 0` in `S/J`.
    pub fn verify(&self, pres: &IdealPresentation, quot: &QuotientBasis) -> Result<()> {
        for (s, v) in pres.syzygies.iter().enumerate() {
            let sum: Poly = v.iter().zip(&self.images).map(|(a, b)| a * b).sum();
            let d = pres.syzygy_degrees[s] as i64 + self.degree;
            if d >= 0 && !sum.is_zero() && quot.coords(&sum, d as u32).iter().any(|x| *x != int(0)) {
                return Err(Error::SyzygyViolation { syzygy: s });
            }
        }
        Ok(())
    }
}

/// Number of coordinates of degree-`k` tangent vectors.
pub fn hom_ambient_dim(pres: &IdealPresentation, quot: &QuotientBasis, k: i64) -> usize {
    pres.generator_degrees.iter().map(|&e| quot.dim(e as i64 + k)).sum()
}

/// Dimension of the span of tangent vectors of one degree.
pub fn span_dim(tvs: &[TangentVector], pres: &IdealPresentation, quot: &QuotientBasis) -> usize {
    let Some(first) = tvs.first() else { return 0 };
    let n = hom_ambient_dim(pres, quot, first.degree);
    rank_of_rows(tvs.iter().map(|t| t.coords(pres, quot)), n)
}

/// A canonical basis of `Hom_S(J, S/J)_k`.
#[derive(Clone, Debug)]
pub struct HomPiece {
    pub degree: i64,
    pub basis: Vec<TangentVector>,
}

impl HomPiece {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Whether `tv` lies in the span of the basis.
    pub fn contains(&self, tv: &TangentVector, pres: &IdealPresentation, quot: &QuotientBasis) -> bool {
        let n = hom_ambient_dim(pres, quot, self.degree);
        let ech = Echelon::from_rows(n, self.basis.iter().map(|b| b.coords(pres, quot)));
        ech.contains(&tv.coords(pres, quot))
    }
}

/// The linear map `p ↦ p∘d_1` from degree-`k` maps on the generators to
/// their values on the syzygies, both in quotient coordinates.
#[derive(Clone, Debug)]
pub struct PrecompositionMap {
    pub degree: i64,
    /// Unknown offsets per generator (one past the end last).
    pub offsets: Vec<usize>,
    /// Row offsets per syzygy (one past the end last).
    pub row_offsets: Vec<usize>,
    /// Column `u` is the image of the `u`-th unknown.
    pub columns: Vec<SparseVec>,
}

impl PrecompositionMap {
    pub fn new(pres: &IdealPresentation, quot: &QuotientBasis, k: i64) -> Self {
        let mut offsets = vec![0];
        for &e in &pres.generator_degrees {
            offsets.push(offsets.last().unwrap() + quot.dim(e as i64 + k));
        }
        let mut row_offsets = vec![0];
        for &e in &pres.syzygy_degrees {
            row_offsets.push(row_offsets.last().unwrap() + quot.dim(e as i64 + k));
        }
        let mut entries: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); *offsets.last().unwrap()];
        // coordinates are linear, so expand syzygy entries over monomials
        let mut cache: HashMap<(Monomial, usize, i64), Vec<Rational>> = HashMap::new();
        for (s, v) in pres.syzygies.iter().enumerate() {
            let d = pres.syzygy_degrees[s] as i64 + k;
            if quot.dim(d) == 0 {
                continue;
            }
            for (i, a) in v.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let t = pres.generator_degrees[i] as i64 + k;
                for (j, rep) in quot.reps(t.max(0) as u32).iter().enumerate().take(quot.dim(t)) {
                    let mut acc = vec![Rational::zero(); quot.dim(d)];
                    for (m, c) in a.terms() {
                        let part = cache
                            .entry((*m, j, t))
                            .or_insert_with(|| quot.coords(&rep.mul_monomial(m), d as u32));
                        for (x, y) in acc.iter_mut().zip(part.iter()) {
                            *x += c * y;
                        }
                    }
                    for (c, x) in acc.into_iter().enumerate() {
                        if !x.is_zero() {
                            entries[offsets[i] + j].push((row_offsets[s] + c, x));
                        }
                    }
                }
            }
        }
        let columns = entries.into_iter().map(SparseVec::from_entries).collect();
        PrecompositionMap { degree: k, offsets, row_offsets, columns }
    }

    pub fn nunknowns(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn nrows(&self) -> usize {
        *self.row_offsets.last().unwrap()
    }

    /// Values on the syzygies (one class per syzygy) in row coordinates.
    pub fn vectorize_values(&self, values: &[Poly], pres: &IdealPresentation, quot: &QuotientBasis) -> SparseVec {
        let mut entries = Vec::new();
        for (s, v) in values.iter().enumerate() {
            let d = pres.syzygy_degrees[s] as i64 + self.degree;
            if quot.dim(d) == 0 || v.is_zero() {
                continue;
            }
            for (c, x) in quot.coords(v, d as u32).into_iter().enumerate() {
                entries.push((self.row_offsets[s] + c, x));
            }
        }
        SparseVec::from_entries(entries)
    }

    /// The generator images encoded by an unknown vector.
    pub fn images(&self, u: &SparseVec, pres: &IdealPresentation, quot: &QuotientBasis) -> Vec<Poly> {
        pres.generator_degrees
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let c: Vec<Rational> = (self.offsets[i]..self.offsets[i + 1]).map(|x| u.get(x)).collect();
                if c.is_empty() {
                    Poly::zero()
                } else {
                    quot.from_coords(&c, (e as i64 + self.degree) as u32)
                }
            })
            .collect()
    }

    /// Echelon of the image, in row coordinates.
    pub fn image(&self) -> Echelon {
        Echelon::from_rows(self.nrows(), self.columns.iter().cloned())
    }
}

/// Solves "generator images satisfy every syzygy" in degree `k`.
pub fn hom_degree_piece(pres: &IdealPresentation, quot: &QuotientBasis, k: i64) -> Result<HomPiece> {
    if !pres.complete {
        return Err(Error::PrerequisiteFailed("syzygies not known to be complete".into()));
    }
    let map = PrecompositionMap::new(pres, quot, k);
    let rows = transpose_rows(&map.columns, map.nrows());
    let basis = kernel_of_rows(rows, map.nunknowns())
        .iter()
        .map(|u| TangentVector { degree: k, images: map.images(u, pres, quot) })
        .collect();
    Ok(HomPiece { degree: k, basis })
}

/// `∂_i`: `f ↦ ∂f/∂α_i mod J`.
pub fn derivative_tangent(i: usize, pres: &IdealPresentation, quot: &QuotientBasis) -> Result<TangentVector> {
    let a = Variable::alpha(i);
    let tv = TangentVector {
        degree: -1,
        images: pres.generators.iter().map(|f| quot.normal_form(&f.derivative(a))).collect(),
    };
    tv.verify(pres, quot)?;
    Ok(tv)
}

/// `𝔵_Q`: kills the quadric generators and sends the cubic generator `g` to `Q`.
pub fn xq_tangent(q: &Poly, pres: &IdealPresentation, quot: &QuotientBasis) -> Result<TangentVector> {
    let nf = quot.normal_form(q);
    let tv = TangentVector {
        degree: -1,
        images: pres
            .generator_degrees
            .iter()
            .map(|&e| if e == 3 { nf.clone() } else { Poly::zero() })
            .collect(),
    };
    tv.verify(pres, quot)?;
    Ok(tv)
}

/// `𝔶_i = 𝔵_{Q_i} − (1/dim S/J)·∂_i`.
pub fn y_basis(cd: &CanonicalData, pres: &IdealPresentation, quot: &QuotientBasis) -> Result<Vec<TangentVector>> {
    let inv = Rational::new(1.into(), (quot.total_dim() as i64).into());
    (1..=6)
        .map(|i| {
            let x = xq_tangent(&cd.qs[i - 1], pres, quot)?;
            let d = derivative_tangent(i, pres, quot)?;
            Ok(x.add(&d.scale(&-inv.clone())))
        })
        .collect()
}

/// Coordinates for degree-`n` elements of `S[ε_1..ε_r]/(ε_j²)`, with
/// `ε_j` of degree one. Parts are laid out by increasing mask, so the
/// nilpotent-free part comes first.
#[derive(Clone, Debug)]
pub struct NilCoords {
    nilpotents: usize,
    parts: Vec<(usize, MonomialBasis, usize)>,
    len: usize,
}

impl NilCoords {
    pub fn new(vars: &[Variable], nilpotents: usize, n: u32) -> Self {
        let mut parts = Vec::new();
        let mut len = 0;
        for mask in 0..1usize << nilpotents {
            let w = mask.count_ones();
            if w <= n {
                let b = MonomialBasis::new(vars, n - w);
                let l = b.len();
                parts.push((mask, b, len));
                len += l;
            }
        }
        NilCoords { nilpotents, parts, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Length of the nilpotent-free block.
    pub fn real_len(&self) -> usize {
        self.parts.first().map_or(0, |(_, b, _)| b.len())
    }

    pub fn vectorize(&self, p: &NilpotentPoly) -> SparseVec {
        let mut entries = Vec::new();
        for (mask, b, off) in &self.parts {
            for (c, x) in b.vectorize(p.part(*mask)).expect("homogeneous of the right degree").iter() {
                entries.push((off + c, x.clone()));
            }
        }
        for m in 0..1usize << self.nilpotents {
            assert!(p.part(m).is_zero() || self.parts.iter().any(|(k, _, _)| *k == m), "part out of range");
        }
        SparseVec::from_entries(entries)
    }

    pub fn devectorize(&self, v: &SparseVec) -> NilpotentPoly {
        let mut out = NilpotentPoly::zero(self.nilpotents);
        for (mask, b, off) in &self.parts {
            let part = SparseVec::from_entries(
                v.iter().filter(|(c, _)| *c >= *off && *c < off + b.len()).map(|(c, x)| (c - off, x.clone())).collect(),
            );
            out.set_part(*mask, b.devectorize(&part));
        }
        out
    }
}

/// Degree-`n` piece of the ideal generated by weighted-homogeneous
/// generators over `S[ε_1..ε_r]`, as an echelon in [`NilCoords`].
pub fn nil_ideal_piece(gens: &[NilpotentPoly], vars: &[Variable], nilpotents: usize, n: u32) -> (NilCoords, Echelon) {
    let w = alpha_weights();
    let coords = NilCoords::new(vars, nilpotents, n);
    let mut rows = Vec::new();
    for g in gens {
        let Some(e) = g.homogeneous_degree(&w) else { continue };
        for mask in 0..1usize << nilpotents {
            let s = mask.count_ones() + e;
            if s > n {
                continue;
            }
            let shifted = g.shift(mask);
            if shifted.is_zero() {
                continue;
            }
            for m in MonomialBasis::new(vars, n - s).monomials() {
                rows.push(coords.vectorize(&shifted.mul_poly(&Poly::term(*m, int(1)))));
            }
        }
    }
    let ech = Echelon::from_rows(coords.len(), rows);
    (coords, ech)
}

/// `f − ε·δ(f)` for each generator; `δ` must have degree `−1`.
pub fn deformed_generators(delta: &TangentVector, pres: &IdealPresentation) -> Vec<NilpotentPoly> {
    assert_eq!(delta.degree, -1, "only degree −1 deformations are homogeneous with deg ε = 1");
    pres.generators
        .iter()
        .zip(&delta.images)
        .map(|(f, d)| {
            let mut p = NilpotentPoly::from_real(1, f.clone());
            p.set_part(1, -d);
            p
        })
        .collect()
}

/// `S[ε]/J′` for a flat first-order deformation, with the `k`-basis
/// `{b, ε·b}` over the representatives `b` of `S/J`.
pub struct DeformedAlgebra {
    vars: Vec<Variable>,
    pieces: Vec<(NilCoords, Echelon)>,
    basis: Vec<(u32, NilpotentPoly)>,
    pub degree_dims: Vec<usize>,
}

impl DeformedAlgebra {
    /// Builds `J′` from generators and checks that `{b, ε·b}` is a basis of
    /// the quotient in every degree up to `top + 2` (where it must vanish).
    pub fn new(gens: &[NilpotentPoly], quot: &QuotientBasis) -> Result<Self> {
        let vars = alpha_vars();
        let top = quot.top();
        let mut pieces = Vec::new();
        let mut degree_dims = Vec::new();
        let mut basis = Vec::new();
        for n in 0..=top + 2 {
            let (coords, ech) = nil_ideal_piece(gens, &vars, 1, n);
            let expected = quot.dim(n as i64) + quot.dim(n as i64 - 1);
            let dim = coords.len() - ech.rank();
            degree_dims.push(dim);
            if dim != expected {
                return Err(Error::BasisFailure(format!(
                    "degree {n} of the deformed quotient has dimension {dim}, expected {expected}"
                )));
            }
            let mut span = ech.clone();
            let mut here = Vec::new();
            for r in quot.reps(n) {
                here.push(NilpotentPoly::from_real(1, r.clone()));
            }
            if n >= 1 {
                for r in quot.reps(n - 1) {
                    here.push(NilpotentPoly::monomial(1, 1, r.clone()));
                }
            }
            for b in &here {
                span.insert(coords.vectorize(b));
            }
            if span.rank() != coords.len() {
                return Err(Error::BasisFailure(format!("lifted representatives do not span degree {n}")));
            }
            basis.extend(here.into_iter().map(|b| (n, b)));
            pieces.push((coords, ech));
        }
        Ok(DeformedAlgebra { vars, pieces, basis, degree_dims })
    }

    pub fn dim(&self) -> usize {
        self.degree_dims.iter().sum()
    }

    pub fn basis(&self) -> &[(u32, NilpotentPoly)] {
        &self.basis
    }

    /// Coefficients of a homogeneous element of degree `n` in the basis
    /// (indices into [`DeformedAlgebra::basis`]).
    pub fn express(&self, h: &NilpotentPoly, n: u32) -> Vec<(usize, Rational)> {
        let Some((coords, ech)) = self.pieces.get(n as usize) else {
            return Vec::new();
        };
        let idx: Vec<usize> = (0..self.basis.len()).filter(|&l| self.basis[l].0 == n).collect();
        let (rref, _) = ech.clone().into_rref();
        let mut columns: Vec<SparseVec> = rref;
        let nid = columns.len();
        columns.extend(idx.iter().map(|&l| coords.vectorize(&self.basis[l].1)));
        let b = coords.vectorize(h).to_dense(coords.len());
        let ncols = columns.len();
        let x = solve_rows(transpose_rows(&columns, coords.len()), ncols, &b).expect("basis spans this degree");
        idx.iter().enumerate().map(|(t, &l)| (l, x[nid + t].clone())).collect()
    }

    /// Whether a homogeneous element lies in `J′`.
    pub fn contains(&self, h: &NilpotentPoly, n: u32) -> bool {
        match self.pieces.get(n as usize) {
            Some((coords, ech)) => ech.contains(&coords.vectorize(h)),
            None => true,
        }
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }
}

/// Outcome of a dual-number round trip.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformationReport {
    pub degree_dims: Vec<usize>,
    pub total_dim: usize,
}

/// Builds `J′ = (f − ε·δ(f))`, checks it is flat with the lifted basis, and
/// recovers `δ` from `J′`.
pub fn deformation_roundtrip(
    delta: &TangentVector,
    pres: &IdealPresentation,
    quot: &QuotientBasis,
) -> Result<DeformationReport> {
    let gens = deformed_generators(delta, pres);
    let alg = DeformedAlgebra::new(&gens, quot)?;
    for (j, f) in pres.generators.iter().enumerate() {
        let n = pres.generator_degrees[j];
        let (coords, ech) = &alg.pieces[n as usize];
        let r = ech.reduce(&coords.vectorize(&NilpotentPoly::from_real(1, f.clone())));
        if r.leading().is_some_and(|(c, _)| c < coords.real_len()) {
            return Err(Error::RoundTripFailure { generator: j, reason: "no element with this real part".into() });
        }
        let recovered = coords.devectorize(&r).part(1).clone();
        let diff = &quot.normal_form(&recovered) - &delta.images[j];
        if !diff.is_zero() {
            return Err(Error::RoundTripFailure { generator: j, reason: format!("recovered image differs by {diff}") });
        }
    }
    Ok(DeformationReport { total_dim: alg.dim(), degree_dims: alg.degree_dims })
}

/// Trace over `k[ε]` of multiplication by `α_j` on `S[ε]/J′`, as
/// `(real, ε-coefficient)`.
pub fn multiplication_trace(alg: &DeformedAlgebra, j: usize) -> (Rational, Rational) {
    let mut real = int(0);
    let mut eps = int(0);
    let aj = Poly::alpha(j);
    for (l, (n, b)) in alg.basis().iter().enumerate() {
        if b.part(0).is_zero() {
            continue;
        }
        let prod = b.mul_poly(&aj);
        for (m, c) in alg.express(&prod, n + 1) {
            // diagonal entry of the k[ε]-matrix: b_l itself and ε·b_l
            if m == l {
                real += &c;
            } else if alg.basis()[m].1.part(1) == b.part(0) && alg.basis()[m].1.part(0).is_zero() {
                eps += &c;
            }
        }
    }
    (real, eps)
}

/// ε-coefficient of `Tr(α_j)` on the deformation along `𝔵_{Q_i}`.
pub fn barycenter_trace(
    i: usize,
    j: usize,
    cd: &CanonicalData,
    pres: &IdealPresentation,
    quot: &QuotientBasis,
) -> Result<Rational> {
    let x = xq_tangent(&cd.qs[i - 1], pres, quot)?;
    let alg = DeformedAlgebra::new(&deformed_generators(&x, pres), quot)?;
    let (real, eps) = multiplication_trace(&alg, j);
    if real != int(0) {
        return Err(Error::BasisFailure(format!("trace of α_{j} has nonzero constant part {real}")));
    }
    Ok(eps)
}

/// The full 6×6 table of [`barycenter_trace`].
pub fn trace_table(cd: &CanonicalData, pres: &IdealPresentation, quot: &QuotientBasis) -> Result<Vec<Vec<Rational>>> {
    (1..=6)
        .map(|i| {
            let x = xq_tangent(&cd.qs[i - 1], pres, quot)?;
            let alg = DeformedAlgebra::new(&deformed_generators(&x, pres), quot)?;
            Ok((1..=6).map(|j| multiplication_trace(&alg, j).1).collect())
        })
        .collect()
}

/// Dimensions of `Hom(F^⊥, S/F^⊥)` in negative degrees and whether the six
/// `∂_i` span them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TntReport {
    pub neg_dims: Vec<(i64, usize)>,
    pub derivatives_span: bool,
    pub pass: bool,
}

pub fn tnt_check(perp_pres: &IdealPresentation, apolar: &QuotientBasis) -> Result<TntReport> {
    let mut neg_dims = Vec::new();
    let mut total = 0;
    let mut pieces = Vec::new();
    for k in [-3, -2, -1] {
        let h = hom_degree_piece(perp_pres, apolar, k)?;
        total += h.dim();
        neg_dims.push((k, h.dim()));
        pieces.push(h);
    }
    let h1 = pieces.pop().expect("three degrees");
    let ders = (1..=6).map(|i| derivative_tangent(i, perp_pres, apolar)).collect::<Result<Vec<_>>>()?;
    let inside = ders.iter().all(|d| h1.contains(d, perp_pres, apolar));
    let derivatives_span = inside && span_dim(&ders, perp_pres, apolar) == total;
    Ok(TntReport { neg_dims, derivatives_span, pass: derivatives_span && total == 6 })
}

/// `Hom(I, S/I)_{−1} = span{𝔵_{Q_i}} ⊕ span{∂_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub hom_dim: usize,
    pub x_dim: usize,
    pub partial_dim: usize,
    pub sum_dim: usize,
    pub pass: bool,
}

pub fn decomposition_check(
    cd: &CanonicalData,
    pres: &IdealPresentation,
    quot: &QuotientBasis,
) -> Result<DecompositionReport> {
    decomposition_check_in(cd, pres, quot, &hom_degree_piece(pres, quot, -1)?)
}

/// [`decomposition_check`] against an already computed degree `−1` piece.
pub fn decomposition_check_in(
    cd: &CanonicalData,
    pres: &IdealPresentation,
    quot: &QuotientBasis,
    h: &HomPiece,
) -> Result<DecompositionReport> {
    if h.degree != -1 {
        return Err(Error::PrerequisiteFailed("decomposition needs the degree −1 piece".into()));
    }
    let xs = cd.qs.iter().map(|q| xq_tangent(q, pres, quot)).collect::<Result<Vec<_>>>()?;
    let ds = (1..=6).map(|i| derivative_tangent(i, pres, quot)).collect::<Result<Vec<_>>>()?;
    let all: Vec<TangentVector> = xs.iter().chain(&ds).cloned().collect();
    let inside = all.iter().all(|t| h.contains(t, pres, quot));
    let x_dim = span_dim(&xs, pres, quot);
    let partial_dim = span_dim(&ds, pres, quot);
    let sum_dim = span_dim(&all, pres, quot);
    let pass = inside && x_dim == 6 && partial_dim == 6 && sum_dim == 12 && h.dim() == 12;
    Ok(DecompositionReport { hom_dim: h.dim(), x_dim, partial_dim, sum_dim, pass })
}
