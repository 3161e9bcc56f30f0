//! The family `k[t,α,β]/(F_x^⊥, F_y^⊥, Γ(t))` and its finite checks.
//!
//! `F_x` is `F` in `x` and `F_y` the same form in `y`; `α` acts on `x` and
//! `β` on `y`, while `t` is a scalar for contraction. All fiber computations
//! go through the apolar algebra of the sextic `H = F_x·F_y`: once
//! `H^⊥ = (F_x^⊥, F_y^⊥)` is known, the class of an operator `b` is `b∘H`,
//! and the ideal generated by `Γ(t_0)` becomes the derivatives of
//! `Γ(t_0)∘H = F(t_0·x + y)`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::apolarity::{catalecticant_rank_in, hilbert_function_in, perp_degree_in, CanonicalData, HilbertFunction};
use crate::error::{Error, Result};
use crate::linalg::{int, rank_of_rows, rational_string, Rational, SparseVec};
use crate::poly::{contract, monomial_coordinates, Kind, Monomial, MonomialBasis, Poly, Variable, Weights};
use crate::resolution::ideal_degree_piece;

fn xy_vars() -> Vec<Variable> {
    Variable::of_kinds(&[Kind::X, Kind::Y])
}

fn ab_vars() -> Vec<Variable> {
    Variable::of_kinds(&[Kind::Alpha, Kind::Beta])
}

/// `F` in the `y` variables.
pub fn in_y(f: &Poly) -> Poly {
    f.rename_kind(Kind::X, Kind::Y)
}

/// `F(t·x + y)` with `t` symbolic.
pub fn shifted_form(f: &Poly) -> Poly {
    let sub: BTreeMap<Variable, Poly> =
        (1..=6).map(|i| (Variable::x(i), &(&Poly::t() * &Poly::x(i)) + &Poly::y(i))).collect();
    f.substitute(&sub)
}

/// `F(t_0·x + y)` for a rational `t_0`.
pub fn shifted_form_at(f: &Poly, t0: &Rational) -> Poly {
    shifted_form(f).evaluate(Variable::t(), t0)
}

/// `Γ(t) = g(α) + t·Σ β_i·Q_i(α) + t²·Σ α_i·Q_i(β) + t³·g(β)`.
pub fn gamma(g: &Poly, qs: &[Poly]) -> Poly {
    let t = Poly::t();
    let mut out = g.clone();
    for (i, q) in qs.iter().enumerate() {
        out += &(&(&t * &Poly::beta(i + 1)) * q);
        out += &(&(&t.pow(2) * &Poly::alpha(i + 1)) * &q.rename_kind(Kind::Alpha, Kind::Beta));
    }
    out += &(&t.pow(3) * &g.rename_kind(Kind::Alpha, Kind::Beta));
    out
}

/// Homogeneity of `Γ(t)` under the two natural gradings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaGradings {
    /// Degree when `α` and `t` weigh one and `β` zero.
    pub alpha_t: Option<u32>,
    /// Degree when `α` and `β` weigh one and `t` zero.
    pub alpha_beta: Option<u32>,
}

pub fn gamma_gradings(gamma: &Poly) -> GammaGradings {
    GammaGradings {
        alpha_t: gamma.homogeneous_degree(&Weights::kinds(&[Kind::Alpha, Kind::T])),
        alpha_beta: gamma.homogeneous_degree(&Weights::kinds(&[Kind::Alpha, Kind::Beta])),
    }
}

/// `Γ(t)∘(F_x·F_y) = F(t·x + y)` as polynomials in `t, x, y`.
pub fn verify_gamma_identity(cd: &CanonicalData) -> Result<()> {
    let h = &cd.f * &in_y(&cd.f);
    let lhs = contract(&gamma(&cd.g, &cd.qs), &h);
    let rhs = shifted_form(&cd.f);
    if lhs != rhs {
        return Err(Error::IdentityFailure(format!("difference {}", &lhs - &rhs)));
    }
    Ok(())
}

/// One degree of `(F_x·F_y)^⊥ = (F_x^⊥, F_y^⊥)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductPerpDegree {
    pub degree: u32,
    pub perp_dim: usize,
    pub ideal_dim: usize,
}

fn bidegree_monomials(a: u32, b: u32) -> Vec<Monomial> {
    let xa = MonomialBasis::new(&Variable::of_kinds(&[Kind::Alpha]), a);
    let xb = MonomialBasis::new(&Variable::of_kinds(&[Kind::Beta]), b);
    xa.monomials().iter().flat_map(|m| xb.monomials().iter().map(move |n| m.mul(n))).collect()
}

/// Rank of the catalecticant of `F_x·F_y` on the bidegree block `(a, b)`.
///
/// Contraction separates over the disjoint variable sets, so the row of
/// `m_a·m_b` is `(m_a∘F)(x)·(m_b∘F)(y)`.
pub fn product_block_rank(f: &Poly, a: u32, b: u32) -> usize {
    let left: Vec<Poly> = MonomialBasis::new(&Variable::of_kinds(&[Kind::Alpha]), a)
        .monomials()
        .iter()
        .map(|m| contract(&Poly::term(*m, int(1)), f))
        .filter(|p| !p.is_zero())
        .collect();
    let right: Vec<Poly> = MonomialBasis::new(&Variable::of_kinds(&[Kind::Alpha]), b)
        .monomials()
        .iter()
        .map(|m| in_y(&contract(&Poly::term(*m, int(1)), f)))
        .filter(|p| !p.is_zero())
        .collect();
    let mut index: HashMap<Monomial, usize> = HashMap::new();
    let mut rows = Vec::with_capacity(left.len() * right.len());
    for u in &left {
        for v in &right {
            let entries = (u * v)
                .terms()
                .map(|(m, c)| {
                    let next = index.len();
                    (*index.entry(*m).or_insert(next), c.clone())
                })
                .collect();
            rows.push(SparseVec::from_entries(entries));
        }
    }
    rank_of_rows(rows, index.len())
}

/// Catalecticant rank of `F_x·F_y` in total degree `d`, summed over blocks.
pub fn product_catalecticant_rank(f: &Poly, d: u32) -> usize {
    (0..=d).map(|a| product_block_rank(f, a, d - a)).sum()
}

/// Compares both sides in degree `d`, bidegree block by bidegree block.
///
/// An operator of bidegree `(a, b)` sends `H` to bidegree `(3−a, 3−b)`, so
/// the catalecticant of `H` is block diagonal and its kernel splits. The
/// ideal side in block `(a, b)` is `P_a ⊗ S_b + S_a ⊗ P_b` with `P` the
/// pieces of the ideal generated by the quadrics of `F^⊥`. Since `H^⊥` is an
/// ideal, the inclusion of the ideal side follows from its generators
/// annihilating `H`; equality is then a dimension count.
pub fn product_perp_check(cd: &CanonicalData, d: u32) -> Result<ProductPerpDegree> {
    let h = &cd.f * &in_y(&cd.f);
    if cd.perp2.iter().chain(&in_beta(&cd.perp2)).any(|e| !contract(e, &h).is_zero()) {
        return Err(Error::DegreeMismatch { degree: d });
    }
    let alphas = Variable::of_kinds(&[Kind::Alpha]);
    let betas = Variable::of_kinds(&[Kind::Beta]);
    let mut perp_dim = 0;
    let mut ideal_dim = 0;
    for a in 0..=d {
        let b = d - a;
        let coords = MonomialBasis::from_monomials(bidegree_monomials(a, b));
        let n = coords.len();
        perp_dim += n - product_block_rank(&cd.f, a, b);
        let pa = ideal_degree_piece(&cd.perp2, &alphas, a);
        let pb = ideal_degree_piece(&in_beta(&cd.perp2), &betas, b);
        let sa = MonomialBasis::new(&alphas, a);
        let sb = MonomialBasis::new(&betas, b);
        let mut products = Vec::new();
        for (left, right) in [(pa.basis_polys(), poly_list(&sb)), (poly_list(&sa), pb.basis_polys())] {
            for u in &left {
                for v in &right {
                    products.push(coords.vectorize(&(u * v)).expect("bidegree block"));
                }
            }
        }
        ideal_dim += rank_of_rows(products, n);
    }
    if perp_dim != ideal_dim {
        return Err(Error::DegreeMismatch { degree: d });
    }
    Ok(ProductPerpDegree { degree: d, perp_dim, ideal_dim })
}

fn in_beta(ps: &[Poly]) -> Vec<Poly> {
    ps.iter().map(|p| p.rename_kind(Kind::Alpha, Kind::Beta)).collect()
}

fn poly_list(b: &MonomialBasis) -> Vec<Poly> {
    b.monomials().iter().map(|m| Poly::term(*m, int(1))).collect()
}

/// Freeness data at one sample `t_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessSample {
    pub t0: String,
    pub hilbert_function: HilbertFunction,
    pub dim: usize,
    pub specialization_degrees: u32,
}

/// `(α_i − t·β_i)∘F(t·x + y) = 0` for every `i`.
pub fn symbolic_freeness(f: &Poly) -> Result<()> {
    let h = shifted_form(f);
    for i in 1..=6 {
        let op = &Poly::alpha(i) - &(&Poly::t() * &Poly::beta(i));
        let r = contract(&op, &h);
        if !r.is_zero() {
            return Err(Error::FreenessFailure { t0: "t".into(), degree: 1, reason: format!("α_{i} − t·β_{i} leaves {r}") });
        }
    }
    Ok(())
}

/// Generators `α_i − t_0·β_i` and the quadrics of `F_y^⊥`.
pub fn specialized_relative_ideal(cd: &CanonicalData, t0: &Rational) -> Vec<Poly> {
    let mut gens: Vec<Poly> = (1..=6).map(|i| &Poly::alpha(i) - &Poly::beta(i).scale(t0)).collect();
    gens.extend(in_beta(&cd.perp2));
    gens
}

/// `dim Apolar(F(t_0·x + y)) = 14` and, in degrees `≤ 4`, its perp equals
/// the specialized relative ideal.
pub fn relative_freeness_sample(cd: &CanonicalData, t0: &Rational) -> Result<FreenessSample> {
    let name = rational_string(t0);
    let fail = |degree: u32, reason: String| Error::FreenessFailure { t0: name.clone(), degree, reason };
    let h = shifted_form_at(&cd.f, t0);
    let vars = xy_vars();
    let hf = hilbert_function_in(&h, &vars)?;
    let dim = hf.total();
    if dim != 14 {
        return Err(fail(0, format!("apolar algebra has dimension {dim}")));
    }
    let gens = specialized_relative_ideal(cd, t0);
    for d in 0..=4 {
        let perp = perp_degree_in(&h, &vars, d);
        let ideal = ideal_degree_piece(&gens, &ab_vars(), d);
        if !perp.same_span(&ideal) {
            return Err(fail(d, format!("perp has dimension {}, ideal {}", perp.dim(), ideal.dim())));
        }
    }
    Ok(FreenessSample { t0: name, hilbert_function: hf, dim, specialization_degrees: 5 })
}

/// One fiber `M_{t_0}` of the family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberReport {
    pub t0: String,
    pub hilbert_function: Vec<usize>,
    pub dim: usize,
    /// `{1, α_i, Q_i(α)}` times a basis of `k[β]/F_y^⊥` spans the fiber.
    pub rank13_spanning: bool,
}

/// Hilbert function of `M_{t_0}`: `HF(Apolar H)_d` minus the rank of the
/// derivatives of order `d − 3` of `F(t_0·x + y)`.
pub fn fiber_hilbert_function(cd: &CanonicalData, t0: &Rational) -> Vec<usize> {
    let ht = shifted_form_at(&cd.f, t0);
    let vars = xy_vars();
    (0..=6)
        .map(|d| {
            let full = product_catalecticant_rank(&cd.f, d);
            let ideal = if d >= 3 { catalecticant_rank_in(&ht, &vars, d - 3) } else { 0 };
            full - ideal
        })
        .collect()
}

/// Whether the products `(u∘F)(x)·(v∘F)(y)`, for `u ∈ {1, α_i, Q_i}` and
/// `v` running through `{1, β_i, Q_i(β), g(β)}`, together with all
/// derivatives of `F(t_0·x + y)`, span the derivatives of `F_x·F_y`.
pub fn rank13_spanning(cd: &CanonicalData, t0: &Rational) -> bool {
    let ht = shifted_form_at(&cd.f, t0);
    let fy = in_y(&cd.f);
    let mut module_gens = vec![Poly::one()];
    module_gens.extend((1..=6).map(Poly::alpha));
    module_gens.extend(cd.qs.iter().cloned());
    let mut base = module_gens.clone();
    base.push(cd.g.clone());
    let base: Vec<Poly> = in_beta(&base);
    let mut by_degree: BTreeMap<u32, Vec<Poly>> = BTreeMap::new();
    for u in &module_gens {
        let ux = contract(u, &cd.f);
        for v in &base {
            let p = &ux * &contract(v, &fy);
            if let Some(d) = p.degree() {
                by_degree.entry(d).or_default().push(p);
            }
        }
    }
    for k in 0..=3 {
        for m in monomial_coordinates(&[Kind::Alpha, Kind::Beta], k).iter() {
            let p = contract(&Poly::term(*m, int(1)), &ht);
            if let Some(d) = p.degree() {
                by_degree.entry(d).or_default().push(p);
            }
        }
    }
    (0..=6).all(|d| {
        let polys = by_degree.remove(&d).unwrap_or_default();
        let mut index: HashMap<Monomial, usize> = HashMap::new();
        let rows: Vec<SparseVec> = polys
            .iter()
            .map(|p| {
                SparseVec::from_entries(
                    p.terms()
                        .map(|(m, c)| {
                            let next = index.len();
                            (*index.entry(*m).or_insert(next), c.clone())
                        })
                        .collect(),
                )
            })
            .collect();
        let r = rank_of_rows(rows, index.len());
        r == product_catalecticant_rank(&cd.f, 6 - d)
    })
}

pub fn family_fiber(cd: &CanonicalData, t0: &Rational) -> Result<FiberReport> {
    let hf = fiber_hilbert_function(cd, t0);
    let dim: usize = hf.iter().sum();
    let name = rational_string(t0);
    if dim != 182 {
        return Err(Error::RankFailure { t0: name, reason: format!("fiber has dimension {dim}, HF {hf:?}") });
    }
    let spanning = rank13_spanning(cd, t0);
    if !spanning {
        return Err(Error::RankFailure { t0: name, reason: "module generators do not span".into() });
    }
    Ok(FiberReport { t0: name, hilbert_function: hf, dim, rank13_spanning: spanning })
}

/// Whether the `t = 0` fiber has the Hilbert function of the product of
/// `S/I` (HF `(1,6,6)`) and `Apolar(F)` (HF `(1,6,6,1)`).
pub fn zero_fiber_is_product(cd: &CanonicalData) -> bool {
    let a = [1, 6, 6];
    let b = [1, 6, 6, 1];
    let mut conv = vec![0; 7];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            conv[i + j] += x * y;
        }
    }
    fiber_hilbert_function(cd, &int(0)) == conv
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractalReport {
    pub gamma_identity: bool,
    pub gamma_gradings: GammaGradings,
    pub product_perp: Vec<ProductPerpDegree>,
    pub freeness_samples: Vec<FreenessSample>,
    pub fiber_ranks: Vec<FiberReport>,
    pub zero_fiber_is_product: bool,
    pub pass: bool,
}

pub const DEFAULT_T_SAMPLES: [i64; 5] = [0, 1, 2, -1, 5];
pub const DEFAULT_FIBER_SAMPLES: [i64; 4] = [0, 1, 2, -1];

/// Every check of the module; stops at the first error.
pub fn fractal_report(cd: &CanonicalData, t_samples: &[Rational], fiber_samples: &[Rational]) -> Result<FractalReport> {
    verify_gamma_identity(cd)?;
    let gamma_gradings = gamma_gradings(&gamma(&cd.g, &cd.qs));
    let product_perp = (0..=7).map(|d| product_perp_check(cd, d)).collect::<Result<Vec<_>>>()?;
    symbolic_freeness(&cd.f)?;
    let freeness_samples = t_samples.iter().map(|t| relative_freeness_sample(cd, t)).collect::<Result<Vec<_>>>()?;
    let fiber_ranks = fiber_samples.iter().map(|t| family_fiber(cd, t)).collect::<Result<Vec<_>>>()?;
    let zero = zero_fiber_is_product(cd);
    Ok(FractalReport {
        gamma_identity: true,
        gamma_gradings,
        product_perp,
        freeness_samples,
        fiber_ranks,
        zero_fiber_is_product: zero,
        pass: zero,
    })
}

/// The two bounds on the negative spike and its degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpikeCertificate {
    pub applicable: bool,
    /// `(F^⊥)_2(γ)` lies in the ideal of the spike.
    pub lower_bound: bool,
    /// The family realizes a rank-13 family over `Spec(k[β]/F_y^⊥)`.
    pub upper_bound: bool,
    pub spike_degree: usize,
}

pub fn spike_certificate(tnt_pass: bool, annihilator_is_perp2: bool, fractal: Option<&FractalReport>) -> SpikeCertificate {
    if !tnt_pass {
        return SpikeCertificate { applicable: false, lower_bound: false, upper_bound: false, spike_degree: 0 };
    }
    let upper_bound = fractal.is_some_and(|r| r.pass && r.fiber_ranks.iter().all(|f| f.rank13_spanning));
    SpikeCertificate {
        applicable: true,
        lower_bound: annihilator_is_perp2,
        upper_bound,
        spike_degree: fractal.map_or(0, |r| r.freeness_samples.first().map_or(0, |s| s.dim)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f_example;
    use crate::linalg::rat;

    fn cd() -> CanonicalData {
        CanonicalData::new(&f_example()).unwrap()
    }

    #[test]
    fn block_ranks_match_the_full_catalecticant() {
        let f = f_example();
        let h = &f * &in_y(&f);
        for d in 0..=6 {
            assert_eq!(product_catalecticant_rank(&f, d), catalecticant_rank_in(&h, &xy_vars(), d), "degree {d}");
        }
    }

    #[test]
    fn gamma_shape() {
        let cd = cd();
        let gm = gamma(&cd.g, &cd.qs);
        assert_eq!(gm.evaluate(Variable::t(), &int(0)), cd.g);
        let t3 = gm.derivative(Variable::t()).derivative(Variable::t()).derivative(Variable::t());
        assert_eq!(t3.scale(&rat(1, 6)), cd.g.rename_kind(Kind::Alpha, Kind::Beta));
        let gr = gamma_gradings(&gm);
        assert_eq!(gr.alpha_t, Some(3));
        assert_eq!(gr.alpha_beta, Some(3));
    }

    #[test]
    fn gamma_identity_and_specializations() {
        let cd = cd();
        verify_gamma_identity(&cd).unwrap();
        let h = &cd.f * &in_y(&cd.f);
        assert_eq!(contract(&cd.g, &h), in_y(&cd.f));
        let g1 = gamma(&cd.g, &cd.qs).evaluate(Variable::t(), &int(1));
        assert_eq!(contract(&g1, &h), shifted_form_at(&cd.f, &int(1)));
        let bad = CanonicalData { g: cd.g.scale(&int(2)), ..cd.clone() };
        assert!(matches!(verify_gamma_identity(&bad), Err(Error::IdentityFailure(_))));
    }

    #[test]
    fn product_perp_low_degrees() {
        let cd = cd();
        let r0 = product_perp_check(&cd, 0).unwrap();
        assert_eq!((r0.perp_dim, r0.ideal_dim), (0, 0));
        let r2 = product_perp_check(&cd, 2).unwrap();
        assert_eq!((r2.perp_dim, r2.ideal_dim), (30, 30));
        let r7 = product_perp_check(&cd, 7).unwrap();
        assert_eq!(r7.perp_dim, monomial_coordinates(&[Kind::Alpha, Kind::Beta], 7).len());
    }

    #[test]
    fn freeness() {
        let cd = cd();
        symbolic_freeness(&cd.f).unwrap();
        for t in [0, 1, 2] {
            let s = relative_freeness_sample(&cd, &int(t)).unwrap();
            assert_eq!(s.dim, 14);
        }
    }

    #[test]
    fn fibers() {
        let cd = cd();
        assert!(zero_fiber_is_product(&cd));
        let f1 = family_fiber(&cd, &int(1)).unwrap();
        assert_eq!(f1.dim, 182);
        assert!(f1.rank13_spanning);
        assert_eq!(family_fiber(&cd, &int(0)).unwrap().hilbert_function, vec![1, 12, 48, 73, 42, 6, 0]);
    }

    #[test]
    fn spike_gating() {
        let s = spike_certificate(false, true, None);
        assert!(!s.applicable);
    }
}
