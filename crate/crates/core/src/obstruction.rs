//! Primary obstructions at `I = F^⊥ + (g)` restricted to the span of the
//! tangents `𝔶_i`.
//!
//! Elements of `Sym²(span 𝔶)` are quadratic forms; we write them in the
//! `x` variables, reading `x_i` as `𝔶_i`. A form `Σ d_lm x_l x_m` with `d`
//! symmetric therefore has `d_lm = 1/2` on the monomial `x_l x_m`, `l ≠ m`.
//!
//! Chain maps live on the presentation of [`build_adjusted_presentation`]:
//! generators `E_1..E_15, G` and syzygies (35 cubic, then `H_1..H_6`).
//!
//! [`build_adjusted_presentation`]: crate::resolution::build_adjusted_presentation

use serde::{Deserialize, Serialize};

use crate::apolarity::{perp_degree, CanonicalData, GradedSubspace};
use crate::error::{Error, Result};
use crate::linalg::{int, kernel_of_rows, rat, solve_rows_multi, transpose_rows, Echelon, Rational, SparseVec};
use crate::poly::{contract, Kind, MonomialBasis, NilpotentPoly, Poly, Variable};
use crate::resolution::IdealPresentation;
use crate::tangent::{
    deformed_generators, derivative_tangent, nil_ideal_piece, xq_tangent, PrecompositionMap, QuotientBasis,
    TangentVector,
};

fn x_vars() -> Vec<Variable> {
    Variable::of_kinds(&[Kind::X])
}

fn alpha_vars() -> Vec<Variable> {
    Variable::of_kinds(&[Kind::Alpha])
}

/// Index of `H_k` (1-based `k`) among the syzygies.
fn h_index(pres: &IdealPresentation, k: usize) -> Result<usize> {
    let g = pres.generators.len() - 1;
    (0..pres.syzygies.len())
        .find(|&s| pres.syzygy_degrees[s] == 4 && pres.syzygies[s][g] == Poly::alpha(k))
        .ok_or_else(|| Error::PrerequisiteFailed(format!("presentation has no syzygy H_{k}")))
}

/// Lift data of `𝔵_Q`: `a_k = (α_k·Q)∘F` and linear forms `a_ki` with
/// `Σ_i a_ki·E_i = α_k·Q − a_k·g`; `b[k][i]` are the quadrics of `H_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftData {
    pub q: Poly,
    pub a: Vec<Rational>,
    pub a_lin: Vec<Vec<Poly>>,
    pub b: Vec<Vec<Poly>>,
}

impl LiftData {
    pub fn build(q: &Poly, cd: &CanonicalData, pres: &IdealPresentation) -> Result<Self> {
        let n = cd.perp2.len();
        let target = MonomialBasis::new(&alpha_vars(), 3);
        let mut columns = Vec::new();
        for e in &cd.perp2 {
            for j in 1..=6 {
                columns.push(target.vectorize(&(e * &Poly::alpha(j))).expect("degree 3"));
            }
        }
        let rows = transpose_rows(&columns, target.len());
        let a: Vec<Rational> = (1..=6)
            .map(|k| if q.is_zero() { int(0) } else { contract(&(&Poly::alpha(k) * q), &cd.f).constant_term() })
            .collect();
        let bs: Vec<Vec<Rational>> = (1..=6)
            .map(|k| {
                let rhs = &(&Poly::alpha(k) * q) - &cd.g.scale(&a[k - 1]);
                target.vectorize(&rhs).expect("degree 3").to_dense(target.len())
            })
            .collect();
        let mut a_lin = Vec::new();
        for (k, x) in (1..=6).zip(solve_rows_multi(rows, columns.len(), &bs)) {
            let x = x.map_err(|_| Error::LiftFailure(format!("α_{k}·Q − a_k·g is not in the span of the quadrics times S_1")))?;
            a_lin.push(
                (0..n)
                    .map(|i| (1..=6).map(|j| Poly::alpha(j).scale(&x[6 * i + j - 1])).sum())
                    .collect(),
            );
        }
        let b = (1..=6)
            .map(|k| Ok(pres.syzygies[h_index(pres, k)?][..n].to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let lift = LiftData { q: q.clone(), a, a_lin, b };
        lift.verify(cd)?;
        Ok(lift)
    }

    /// Re-checks both defining identities symbolically.
    pub fn verify(&self, cd: &CanonicalData) -> Result<()> {
        for k in 0..6 {
            let lhs: Poly = self.a_lin[k].iter().zip(&cd.perp2).map(|(a, e)| a * e).sum();
            let rhs = &(&Poly::alpha(k + 1) * &self.q) - &cd.g.scale(&self.a[k]);
            if lhs != rhs {
                return Err(Error::LiftFailure(format!("identity for a_{},i fails", k + 1)));
            }
            let syz: Poly = self.b[k].iter().zip(&cd.perp2).map(|(b, e)| b * e).sum::<Poly>()
                + &Poly::alpha(k + 1) * &cd.g;
            if !syz.is_zero() {
                return Err(Error::LiftFailure(format!("H_{} is not a syzygy", k + 1)));
            }
        }
        Ok(())
    }

    /// `s_1(𝔵_Q)`: images of the generators in `S`.
    pub fn s1(&self, pres: &IdealPresentation) -> Vec<Poly> {
        let mut v = vec![Poly::zero(); pres.generators.len()];
        *v.last_mut().unwrap() = self.q.clone();
        v
    }

    /// `s_2(𝔵_Q)`: for each syzygy a vector over the generators.
    pub fn s2(&self, pres: &IdealPresentation) -> Result<Vec<Vec<Poly>>> {
        let ng = pres.generators.len();
        let mut out = vec![vec![Poly::zero(); ng]; pres.syzygies.len()];
        for k in 1..=6 {
            let s = h_index(pres, k)?;
            let mut v = self.a_lin[k - 1].clone();
            v.push(Poly::constant(self.a[k - 1].clone()));
            out[s] = v;
        }
        Ok(out)
    }

    /// Checks `d_0∘s_2 = s_1∘d_1` on every syzygy and `q∘s_1 = 𝔵_Q`.
    pub fn verify_chain(&self, pres: &IdealPresentation, quot: &QuotientBasis) -> Result<()> {
        let s1 = self.s1(pres);
        let s2 = self.s2(pres)?;
        for (s, v) in pres.syzygies.iter().enumerate() {
            let left: Poly = s2[s].iter().zip(&pres.generators).map(|(a, e)| a * e).sum();
            let right: Poly = v.iter().zip(&s1).map(|(a, b)| a * b).sum();
            if left != right {
                return Err(Error::LiftFailure(format!("chain square fails on syzygy {s}")));
            }
        }
        let x = xq_tangent(&self.q, pres, quot)?;
        for (img, t) in s1.iter().zip(&x.images) {
            if quot.normal_form(img) != *t {
                return Err(Error::LiftFailure("s_1 does not lift 𝔵_Q".into()));
            }
        }
        Ok(())
    }
}

/// `q∘(s_1(δ_1)∘s_2(δ_2) + s_1(δ_2)∘s_2(δ_1))` on every syzygy.
pub fn chain_product(
    l1: &LiftData,
    l2: &LiftData,
    pres: &IdealPresentation,
    quot: &QuotientBasis,
) -> Result<Vec<Poly>> {
    let one = |p: &LiftData, q: &LiftData| -> Result<Vec<Poly>> {
        let s1 = p.s1(pres);
        Ok(q.s2(pres)?.iter().map(|v| v.iter().zip(&s1).map(|(a, b)| a * b).sum()).collect())
    };
    let a = one(l1, l2)?;
    let b = one(l2, l1)?;
    Ok(a.iter().zip(&b).map(|(x, y)| quot.normal_form(&(x + y))).collect())
}

/// `Σ d_lm 𝔶_l𝔶_m` with `d` symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymSquareElement {
    d: Vec<Vec<Rational>>,
}

impl SymSquareElement {
    /// Panics unless `d` is a symmetric 6×6 matrix.
    pub fn new(d: Vec<Vec<Rational>>) -> Self {
        assert!(d.len() == 6 && d.iter().all(|r| r.len() == 6), "6×6 expected");
        for (l, row) in d.iter().enumerate() {
            for (m, x) in row.iter().enumerate().take(l) {
                assert_eq!(*x, d[m][l], "d must be symmetric");
            }
        }
        SymSquareElement { d }
    }

    pub fn zero() -> Self {
        SymSquareElement { d: vec![vec![int(0); 6]; 6] }
    }

    /// `𝔶_l𝔶_m` (1-based).
    pub fn monomial(l: usize, m: usize) -> Self {
        let mut d = vec![vec![int(0); 6]; 6];
        if l == m {
            d[l - 1][l - 1] = int(1);
        } else {
            d[l - 1][m - 1] = rat(1, 2);
            d[m - 1][l - 1] = rat(1, 2);
        }
        SymSquareElement { d }
    }

    /// The 21 monomials `𝔶_l𝔶_m`, `l ≤ m`, in graded order.
    pub fn basis() -> Vec<SymSquareElement> {
        MonomialBasis::new(&x_vars(), 2).monomials().iter().map(|m| SymSquareElement::from_quadratic(&Poly::term(*m, int(1)))).collect()
    }

    pub fn d(&self) -> &[Vec<Rational>] {
        &self.d
    }

    /// From a quadratic form in `x_1..x_6`.
    pub fn from_quadratic(p: &Poly) -> Self {
        let mut d = vec![vec![int(0); 6]; 6];
        for (m, c) in p.terms() {
            assert!(m.degree() == 2 && m.involves_kind(Kind::X) && p.only_kinds(&[Kind::X]), "quadratic form in x expected");
            let idx: Vec<usize> = m.support().flat_map(|(v, e)| std::iter::repeat_n(v.index() - 1, e as usize)).collect();
            let (l, k) = (idx[0], idx[1]);
            if l == k {
                d[l][l] = c.clone();
            } else {
                d[l][k] = c / int(2);
                d[k][l] = c / int(2);
            }
        }
        SymSquareElement { d }
    }

    pub fn to_quadratic(&self) -> Poly {
        let mut p = Poly::zero();
        for l in 0..6 {
            for m in 0..6 {
                p += &(&Poly::x(l + 1) * &Poly::x(m + 1)).scale(&self.d[l][m]);
            }
        }
        p
    }

    pub fn add(&self, o: &Self) -> Self {
        SymSquareElement { d: (0..6).map(|l| (0..6).map(|m| &self.d[l][m] + &o.d[l][m]).collect()).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SymSquareElement { d: self.d.iter().map(|r| r.iter().map(|x| x * c).collect()).collect() }
    }
}

/// Lifts for `𝔵_{Q_1..Q_6}` together with the precomposition system of
/// degree `−2` used to decide membership in `i_2^*(im d_1^*)`.
pub struct Obstruction {
    pub cd: CanonicalData,
    pub pres: IdealPresentation,
    pub quot: QuotientBasis,
    pub lifts: Vec<LiftData>,
    map: PrecompositionMap,
    image: Echelon,
    h: Vec<usize>,
}

impl Obstruction {
    pub fn new(cd: &CanonicalData, pres: &IdealPresentation, quot: &QuotientBasis) -> Result<Self> {
        let lifts = cd.qs.iter().map(|q| LiftData::build(q, cd, pres)).collect::<Result<Vec<_>>>()?;
        Obstruction::with_lifts(cd, pres, quot, lifts)
    }

    /// Accepts any valid lifts, e.g. canonical ones perturbed by syzygies.
    pub fn with_lifts(
        cd: &CanonicalData,
        pres: &IdealPresentation,
        quot: &QuotientBasis,
        lifts: Vec<LiftData>,
    ) -> Result<Self> {
        for l in &lifts {
            l.verify(cd)?;
            l.verify_chain(pres, quot)?;
        }
        let map = PrecompositionMap::new(pres, quot, -2);
        let image = map.image();
        let h = (1..=6).map(|k| h_index(pres, k)).collect::<Result<Vec<_>>>()?;
        Ok(Obstruction { cd: cd.clone(), pres: pres.clone(), quot: quot.clone(), lifts, map, image, h })
    }

    /// Chain-level value of `Σ d_lm·ob(𝔵_l, 𝔵_m)` on every syzygy.
    pub fn chain_values(&self, dd: &SymSquareElement) -> Result<Vec<Poly>> {
        let mut out = vec![Poly::zero(); self.pres.syzygies.len()];
        for l in 0..6 {
            for m in 0..6 {
                let c = &dd.d[l][m];
                if *c == int(0) {
                    continue;
                }
                let v = chain_product(&self.lifts[l], &self.lifts[m], &self.pres, &self.quot)?;
                for (o, x) in out.iter_mut().zip(v) {
                    *o += &x.scale(c);
                }
            }
        }
        Ok(out)
    }

    /// `r_k = 2 Σ_l d_lk Q_l` on `H_1..H_6`, cross-checked against the chain-level formula.
    pub fn omega_image_element(&self, dd: &SymSquareElement) -> Result<Vec<Poly>> {
        let chain = self.chain_values(dd)?;
        let closed: Vec<Poly> = (0..6)
            .map(|k| (0..6).map(|l| self.cd.qs[l].scale(&(&dd.d[l][k] * int(2)))).sum::<Poly>())
            .map(|p| self.quot.normal_form(&p))
            .collect();
        for (s, v) in chain.iter().enumerate() {
            match self.h.iter().position(|&h| h == s) {
                Some(k) if *v != closed[k] => return Err(Error::FormulaMismatch { k: k + 1 }),
                None if !v.is_zero() => return Err(Error::FormulaMismatch { k: 0 }),
                _ => {}
            }
        }
        Ok(closed)
    }

    /// The syzygy-indexed map that is `r_k` on `H_k` and zero elsewhere.
    fn spread(&self, r: &[Poly]) -> Vec<Poly> {
        let mut v = vec![Poly::zero(); self.pres.syzygies.len()];
        for (k, p) in r.iter().enumerate() {
            v[self.h[k]] = p.clone();
        }
        v
    }

    fn residual(&self, r: &[Poly]) -> SparseVec {
        self.image.reduce(&self.map.vectorize_values(&self.spread(r), &self.pres, &self.quot))
    }

    /// Whether some `p` (`E_i ↦ s_i`, `G ↦ s`) has `p∘d_1 = r` on `H_k` and
    /// vanishes on the cubic syzygies.
    pub fn membership_in_image(&self, r: &[Poly]) -> bool {
        self.residual(r).is_zero()
    }

    /// `ker Ω` as a subspace of quadratic forms in `x` (read as `𝔶`).
    pub fn omega_kernel(&self) -> Result<GradedSubspace> {
        let basis = SymSquareElement::basis();
        let res = basis
            .iter()
            .map(|dd| Ok(self.residual(&self.omega_image_element(dd)?)))
            .collect::<Result<Vec<_>>>()?;
        let rows = transpose_rows(&res, self.map.nrows());
        let kernel = kernel_of_rows(rows, basis.len());
        let polys: Vec<Poly> = kernel
            .iter()
            .map(|c| basis.iter().enumerate().map(|(i, b)| b.to_quadratic().scale(&c.get(i))).sum())
            .collect();
        Ok(GradedSubspace::from_polys(MonomialBasis::new(&x_vars(), 2), 2, &polys))
    }
}

/// `span{∂F/∂x_k}` as quadratic forms.
pub fn partials_span(f: &Poly) -> GradedSubspace {
    let ps: Vec<Poly> = x_vars().into_iter().map(|v| f.derivative(v)).collect();
    GradedSubspace::from_polys(MonomialBasis::new(&x_vars(), 2), 2, &ps)
}

/// Closed-form criterion: `Σ d_lm x_l x_m ∈ span{∂F/∂x_k}`.
pub fn closed_form_member(f: &Poly, dd: &SymSquareElement) -> bool {
    partials_span(f).contains(&dd.to_quadratic())
}

/// `{D ∈ k[α]_2 : D∘q = 0 for all q ∈ K}`.
pub fn annihilator(kernel: &GradedSubspace) -> GradedSubspace {
    let coords = MonomialBasis::new(&alpha_vars(), 2);
    let qs = kernel.basis_polys();
    let rows: Vec<SparseVec> = qs
        .iter()
        .map(|q| {
            SparseVec::from_entries(
                coords.monomials().iter().enumerate().map(|(i, m)| (i, contract(&Poly::term(*m, int(1)), q).constant_term())).collect(),
            )
        })
        .collect();
    let ker = kernel_of_rows(rows, coords.len());
    GradedSubspace::from_spanning(coords, 2, ker)
}

/// Symmetric-tensor pairing of `Σ c_ij 𝔶_i^∨𝔶_j^∨` (as a quadric in `α`,
/// monomial `α_iα_j` standing for `𝔶_i^∨𝔶_j^∨`) with a quadratic form in `x`:
/// `𝔶_i^∨𝔶_j^∨ · 𝔶_l𝔶_m = (δ_il δ_jm + δ_im δ_jl)/2`.
pub fn symmetric_tensor_pairing(dual: &Poly, form: &Poly) -> Rational {
    let dd = SymSquareElement::from_quadratic(form);
    let mut out = int(0);
    for (m, c) in dual.terms() {
        let idx: Vec<usize> = m.support().flat_map(|(v, e)| std::iter::repeat_n(v.index() - 1, e as usize)).collect();
        let (i, j) = (idx[0], idx[1]);
        // Σ_lm d_lm (δ_il δ_jm + δ_im δ_jl)/2 = (d_ij + d_ji)/2 = d_ij
        out += c * &dd.d[i][j];
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnihilatorReport {
    pub dim: usize,
    pub equals_perp2: bool,
    /// Contraction pairing is twice the symmetric-tensor pairing on all
    /// 21×21 basis pairs.
    pub factor_two: bool,
}

pub fn kernel_annihilator_check(f: &Poly, kernel: &GradedSubspace) -> Result<AnnihilatorReport> {
    let ann = annihilator(kernel);
    let perp2 = perp_degree(f, 2);
    let equals_perp2 = ann.same_span(&perp2);
    let alphas = MonomialBasis::new(&alpha_vars(), 2);
    let xs = MonomialBasis::new(&x_vars(), 2);
    let factor_two = alphas.monomials().iter().all(|a| {
        let a = Poly::term(*a, int(1));
        xs.monomials().iter().all(|x| {
            let x = Poly::term(*x, int(1));
            contract(&a, &x).constant_term() == symmetric_tensor_pairing(&a, &x) * int(2)
        })
    });
    let rep = AnnihilatorReport { dim: ann.dim(), equals_perp2, factor_two };
    if !(equals_perp2 && factor_two) {
        return Err(Error::AnnihilatorMismatch(format!("{rep:?}")));
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossReport {
    pub degree_dims: Vec<usize>,
    pub total_dim: usize,
}

/// Builds the ideal `J` over `k[ε, ε′]` obtained by translating the
/// deformation of `δ` along `α_i ↦ α_i − ε′`, checks it is flat (total
/// dimension `4·dim S/I`) and that it restricts to `δ` mod `ε′` and to `∂_i`
/// mod `ε`.
pub fn partial_cross_vanishing(
    delta: &TangentVector,
    i: usize,
    pres: &IdealPresentation,
    quot: &QuotientBasis,
) -> Result<CrossReport> {
    let fail = |reason: String| Error::ExtensionFailure { partial: i, reason };
    let a = Variable::alpha(i);
    // ε is mask 1, ε′ is mask 2
    let base: Vec<NilpotentPoly> = deformed_generators(delta, pres)
        .into_iter()
        .map(|g| {
            let mut n = NilpotentPoly::zero(2);
            n.set_part(0, g.part(0).clone());
            n.set_part(1, g.part(1).clone());
            n
        })
        .collect();
    let translate = |p: &NilpotentPoly| p - &p.map_parts(|q| q.derivative(a)).shift(2);
    let gens: Vec<NilpotentPoly> = base.iter().map(translate).collect();
    let vars = alpha_vars();
    let top = quot.top();
    let mut degree_dims = Vec::new();
    for n in 0..=top + 3 {
        let (coords, ech) = nil_ideal_piece(&gens, &vars, 2, n);
        let dim = coords.len() - ech.rank();
        let expected =
            quot.dim(n as i64) + 2 * quot.dim(n as i64 - 1) + quot.dim(n as i64 - 2);
        if dim != expected {
            return Err(fail(format!("degree {n}: dimension {dim}, expected {expected}")));
        }
        degree_dims.push(dim);
    }
    let total_dim: usize = degree_dims.iter().sum();
    let restrict = |mask: usize, keep: usize, expected: Vec<NilpotentPoly>, what: &str| -> Result<()> {
        let reduced: Vec<NilpotentPoly> = gens
            .iter()
            .map(|g| {
                let r = g.reduce_mod(mask);
                let mut n = NilpotentPoly::zero(1);
                n.set_part(0, r.part(0).clone());
                n.set_part(1, r.part(keep).clone());
                n
            })
            .collect();
        for n in 0..=top + 2 {
            let (_, x) = nil_ideal_piece(&reduced, &vars, 1, n);
            let (_, y) = nil_ideal_piece(&expected, &vars, 1, n);
            if x.into_rref() != y.into_rref() {
                return Err(fail(format!("restriction to {what} differs in degree {n}")));
            }
        }
        Ok(())
    };
    restrict(2, 1, deformed_generators(delta, pres), "δ")?;
    restrict(1, 2, deformed_generators(&derivative_tangent(i, pres, quot)?, pres), "∂")?;
    Ok(CrossReport { degree_dims, total_dim })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub dim: usize,
    pub matches_partials: bool,
    /// Chain-level membership and the closed-form criterion agree on each
    /// of the 21 monomials `𝔶_l𝔶_m`.
    pub routes_agree: bool,
    pub annihilator_is_perp2: bool,
    pub pass: bool,
}

/// ker Ω, both routes, and the annihilator, as one report.
pub fn kernel_report(ob: &Obstruction) -> Result<KernelReport> {
    let kernel = ob.omega_kernel()?;
    let partials = partials_span(&ob.cd.f);
    let matches_partials = kernel.same_span(&partials);
    let mut routes_agree = true;
    for dd in SymSquareElement::basis() {
        let chain = ob.membership_in_image(&ob.omega_image_element(&dd)?);
        routes_agree &= chain == closed_form_member(&ob.cd.f, &dd);
    }
    let annihilator_is_perp2 = match kernel_annihilator_check(&ob.cd.f, &kernel) {
        Ok(r) => r.dim == 15,
        Err(Error::AnnihilatorMismatch(_)) => false,
        Err(e) => return Err(e),
    };
    let dim = kernel.dim();
    Ok(KernelReport {
        dim,
        matches_partials,
        routes_agree,
        annihilator_is_perp2,
        pass: dim == 6 && matches_partials && routes_agree && annihilator_is_perp2,
    })
}
