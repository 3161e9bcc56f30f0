//! Property checks shared by the `properties` and `acceptance` targets.
//!
//! Each check takes generated data and returns a `TestCaseError` on
//! violation, so it can run under `proptest!` or a bare `TestRunner`.

use hedgehog::apolarity::GradedSubspace;
use hedgehog::linalg::{int, kernel_basis, rank, rref, Echelon, Mat, Rational, SparseVec};
use hedgehog::obstruction::{partials_span, LiftData, Obstruction, SymSquareElement};
use hedgehog::poly::{contract, Kind, MonomialBasis, Poly, Variable};
use hedgehog::resolution::{build_adjusted_presentation, perp_betti_slice, BettiMethod};
use hedgehog::tangent::{deformed_generators, multiplication_trace, DeformedAlgebra, QuotientBasis, TangentVector};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Setup;

/// A homogeneous form of degree `d` in the variables of `kind`; monomial
/// indices are reduced modulo the size of the degree piece.
pub fn form(kind: Kind, d: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((0usize..10_000, -5i64..=5), 0..6).prop_map(move |terms| {
        let basis = MonomialBasis::new(&Variable::of_kinds(&[kind]), d);
        Poly::from_terms(terms.into_iter().map(|(i, c)| (*basis.monomial(i % basis.len()), int(c))))
    })
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

pub type ContractionCase = (Poly, Poly, Poly, Poly, Rational);

/// Operators `a` of degree 1 or 2 and `b` of degree 1; cubic targets.
pub fn contraction_case() -> impl Strategy<Value = ContractionCase> {
    (
        (1u32..=2).prop_flat_map(|d| form(Kind::Alpha, d)),
        form(Kind::Alpha, 1),
        form(Kind::X, 3),
        form(Kind::X, 3),
        small_rational(),
    )
}

/// `(ab)∘f = a∘(b∘f)`, commutativity of the operator product, and
/// bilinearity in both arguments.
pub fn contraction_laws((a, b, f, g, c): ContractionCase) -> Result<(), TestCaseError> {
    let ab = &a * &b;
    prop_assert_eq!(contract(&ab, &f), contract(&a, &contract(&b, &f)));
    prop_assert_eq!(contract(&ab, &f), contract(&b, &contract(&a, &f)));
    let lhs = contract(&(&a + &b.scale(&c)), &f);
    prop_assert_eq!(lhs, &contract(&a, &f) + &contract(&b, &f).scale(&c));
    let rhs = contract(&a, &(&f + &g.scale(&c)));
    prop_assert_eq!(rhs, &contract(&a, &f) + &contract(&a, &g).scale(&c));
    Ok(())
}

pub fn matrix() -> impl Strategy<Value = Mat> {
    (1usize..=7, 1usize..=8).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, c), r).prop_map(|rows| {
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            Mat::from_i64(&refs)
        })
    })
}

/// Rank-nullity, rank of the transpose, `A·K^T = 0` with `K` independent,
/// idempotence of rref, equal row spaces, and agreement of the batch and
/// incremental eliminators.
pub fn rank_identities(m: Mat) -> Result<(), TestCaseError> {
    let r = rank(&m);
    let k = kernel_basis(&m);
    prop_assert_eq!(r + k.rows(), m.cols());
    prop_assert_eq!(r, rank(&m.transpose()));
    if k.rows() > 0 {
        prop_assert!(m.mul(&k.transpose()).is_zero());
        prop_assert_eq!(rank(&k), k.rows());
    }
    let (rr, pivots) = rref(&m);
    prop_assert_eq!(pivots.len(), r);
    prop_assert_eq!(&rref(&rr).0, &rr);
    let both: Vec<Vec<Rational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).chain((0..rr.rows()).map(|i| rr.row(i).to_vec())).collect();
    prop_assert_eq!(rank(&Mat::from_rows(both)), r);
    let batch = Echelon::from_rows(m.cols(), m.sparse_rows()).into_rref();
    let incremental = Echelon::from_rows_incremental(m.cols(), m.sparse_rows()).into_rref();
    prop_assert_eq!(batch, incremental);
    Ok(())
}

pub fn vector_case() -> impl Strategy<Value = (u32, Vec<(usize, i64)>)> {
    (0u32..=4, prop::collection::vec((0usize..10_000, -7i64..=7), 0..10))
}

/// `devectorize ∘ vectorize` is the identity on a degree piece and the
/// coordinates are linear.
pub fn vectorize_roundtrip((d, terms): (u32, Vec<(usize, i64)>)) -> Result<(), TestCaseError> {
    let basis = MonomialBasis::new(&Variable::of_kinds(&[Kind::Alpha]), d);
    let p = Poly::from_terms(terms.iter().map(|&(i, c)| (*basis.monomial(i % basis.len()), int(c))));
    let v = basis.vectorize(&p).expect("degree-d form");
    prop_assert_eq!(basis.devectorize(&v), p.clone());
    prop_assert_eq!(basis.vectorize(&(&p + &p)).expect("degree-d form"), v.scale(&int(2)));
    let i = terms.first().map_or(0, |t| t.0 % basis.len());
    prop_assert_eq!(basis.vectorize(&Poly::term(*basis.monomial(i), int(1))), Some(SparseVec::unit(i)));
    Ok(())
}

pub type TraceCase = (i64, i64, usize, usize, usize);

pub fn trace_case() -> impl Strategy<Value = TraceCase> {
    (-4i64..=4, -4i64..=4, 0usize..64, 0usize..64, 1usize..=6)
}

/// The `ε`-part of `Tr(α_j)` is linear in the tangent vector; the real part
/// does not depend on it.
pub fn trace_linearity(s: &Setup, tangents: &[TangentVector], (a, b, i, k, j): TraceCase) -> Result<(), TestCaseError> {
    let (u, v) = (&tangents[i % tangents.len()], &tangents[k % tangents.len()]);
    let tr = |t: &TangentVector| -> Result<(Rational, Rational), TestCaseError> {
        let alg = DeformedAlgebra::new(&deformed_generators(t, &s.pres), &s.quot)
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        Ok(multiplication_trace(&alg, j))
    };
    let (r0, e0) = tr(&u.scale(&int(a)).add(&v.scale(&int(b))))?;
    let (ru, eu) = tr(u)?;
    let (rv, ev) = tr(v)?;
    prop_assert_eq!(&r0, &ru);
    prop_assert_eq!(&ru, &rv);
    prop_assert_eq!(e0, eu * int(a) + ev * int(b));
    Ok(())
}

pub type OmegaCase = (Rational, Rational, usize, usize);

pub fn omega_case() -> impl Strategy<Value = OmegaCase> {
    (small_rational(), small_rational(), 0usize..21, 0usize..21)
}

/// `Ω(aD + bE) = aΩ(D) + bΩ(E)`; each evaluation also cross-checks the
/// closed form against the chain-level product. Membership in the image
/// is closed under the same combination.
pub fn omega_linearity(ob: &Obstruction, (a, b, i, k): OmegaCase) -> Result<(), TestCaseError> {
    let basis = SymSquareElement::basis();
    let (d, e) = (&basis[i], &basis[k]);
    let eval = |x: &SymSquareElement| ob.omega_image_element(x).map_err(|e| TestCaseError::fail(e.to_string()));
    let lhs = eval(&d.scale(&a).add(&e.scale(&b)))?;
    let od = eval(d)?;
    let oe = eval(e)?;
    for k in 0..6 {
        prop_assert_eq!(&lhs[k], &(&od[k].scale(&a) + &oe[k].scale(&b)));
    }
    if ob.membership_in_image(&od) && ob.membership_in_image(&oe) {
        prop_assert!(ob.membership_in_image(&lhs));
    }
    Ok(())
}

/// Which representative choices a perturbation moves.
#[derive(Clone, Copy, Debug)]
pub struct Perturb {
    pub socle: bool,
    pub quadrics: bool,
    pub quartic_syzygies: bool,
    pub lifts: bool,
}

/// The five perturbations used by the suites: each choice alone, then all.
pub const PERTURBATIONS: [Perturb; 5] = [
    Perturb { socle: true, quadrics: false, quartic_syzygies: false, lifts: false },
    Perturb { socle: false, quadrics: true, quartic_syzygies: false, lifts: false },
    Perturb { socle: false, quadrics: false, quartic_syzygies: true, lifts: false },
    Perturb { socle: false, quadrics: false, quartic_syzygies: false, lifts: true },
    Perturb { socle: true, quadrics: true, quartic_syzygies: true, lifts: true },
];

/// Recomputes ker Ω after moving the chosen representatives by random
/// elements of the indeterminacy (`g + (F^⊥)_3`, `Q_i + (F^⊥)_2`,
/// `H_k + S_1·cubic syzygies`, lifts plus linear syzygies) and checks it is
/// still the span of the partial derivatives.
pub fn kernel_under_perturbation(s: &Setup, p: Perturb, seed: u64) -> Result<GradedSubspace, String> {
    let err = |e: hedgehog::Error| e.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coef = |rng: &mut ChaCha8Rng| int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
    let n = s.cd.perp2.len();
    // cubic syzygies involve only the quadrics; keep their linear parts
    let cubic: Vec<Vec<Poly>> = (0..s.pres.syzygies.len())
        .filter(|&i| s.pres.syzygy_degrees[i] == 3)
        .map(|i| s.pres.syzygies[i][..n].to_vec())
        .collect();

    let mut cd = s.cd.clone();
    if p.socle {
        let e = &cd.perp2[rng.gen_range(0..n)] * &Poly::alpha(rng.gen_range(1..=6));
        cd.g = &cd.g + &e.scale(&coef(&mut rng));
    }
    if p.quadrics {
        for i in 0..6 {
            let e = cd.perp2[rng.gen_range(0..n)].scale(&coef(&mut rng));
            cd.qs[i] = &cd.qs[i] + &e;
        }
    }
    let betti = perp_betti_slice(&cd.f, 5, BettiMethod::Koszul);
    let mut pres = build_adjusted_presentation(&cd, &betti).map_err(err)?;
    if p.quartic_syzygies {
        for h in (0..pres.syzygies.len()).filter(|&i| pres.syzygy_degrees[i] == 4) {
            let syz = &cubic[rng.gen_range(0..cubic.len())];
            let lin = Poly::alpha(rng.gen_range(1..=6)).scale(&coef(&mut rng));
            for (x, y) in pres.syzygies[h].iter_mut().zip(syz) {
                *x = &*x + &(&lin * y);
            }
        }
        pres.verify().map_err(err)?;
    }
    let quot = QuotientBasis::for_ideal(&cd).map_err(err)?;
    let mut lifts = Vec::new();
    for q in &cd.qs {
        let mut l = LiftData::build(q, &cd, &pres).map_err(err)?;
        if p.lifts {
            for row in l.a_lin.iter_mut() {
                let syz = &cubic[rng.gen_range(0..cubic.len())];
                let c = coef(&mut rng);
                for (x, y) in row.iter_mut().zip(syz) {
                    *x = &*x + &y.scale(&c);
                }
            }
        }
        lifts.push(l);
    }
    let ob = Obstruction::with_lifts(&cd, &pres, &quot, lifts).map_err(err)?;
    let kernel = ob.omega_kernel().map_err(err)?;
    if !kernel.same_span(&partials_span(&cd.f)) {
        return Err(format!("{p:?}: ker Ω has dimension {} and is not the span of the partials", kernel.dim()));
    }
    Ok(kernel)
}
