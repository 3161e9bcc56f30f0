//! Acceptance suite: one line per criterion with its verdict, elapsed time
//! and runtime limit. Every comparison is exact; there are no tolerances.
//! Exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::props::{self, PERTURBATIONS};
use common::{brute_hilbert_function, brute_perp_dims, first_xs, int_form, setup};
use hedgehog::apolarity::{hilbert_function, hilbert_function_in, perp_degree, perp_degree_in, CanonicalData};
use hedgehog::fractal::{family_fiber, product_perp_check, relative_freeness_sample, verify_gamma_identity};
use hedgehog::linalg::{int, Rational};
use hedgehog::obstruction::{kernel_report, Obstruction};
use hedgehog::poly::MonomialBasis;
use hedgehog::resolution::{perp_betti_slice, perp_presentation, BettiMethod};
use hedgehog::tangent::{
    decomposition_check, deformation_roundtrip, hom_degree_piece, tnt_check, trace_table, QuotientBasis,
};
use hedgehog::{f_example, parse_poly, Poly, F_EXAMPLE};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Name, runtime limit in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1() -> Outcome {
    let f = f_example();
    let hf = hilbert_function(&f).map_err(|e| e.to_string())?;
    ensure(hf.values == [1, 6, 6, 1], format!("HF {hf}"))?;
    let dims: Vec<usize> = (2..=4).map(|d| perp_degree(&f, d).dim()).collect();
    ensure(dims == [15, 55, 126], format!("perp dims {dims:?}"))?;
    Ok(format!("HF {hf}, dim (F^⊥)_2..4 = {dims:?}"))
}

fn c2() -> Outcome {
    let b = perp_betti_slice(&f_example(), 5, BettiMethod::Koszul);
    let beta0: Vec<(u32, usize)> = b.beta0.iter().map(|(k, v)| (*k, *v)).collect();
    let beta1: Vec<(u32, usize)> = b.beta1.iter().map(|(k, v)| (*k, *v)).collect();
    ensure(beta0 == [(2, 15)], format!("beta0 {beta0:?}"))?;
    ensure(beta1 == [(3, 35), (4, 0), (5, 0)], format!("beta1 {beta1:?}"))?;
    let counted = perp_betti_slice(&f_example(), 5, BettiMethod::DimensionCount);
    ensure(counted == b, format!("syzygy dimension count gives {counted:?}"))?;
    Ok(format!("beta0 {beta0:?}, beta1 {beta1:?}; Koszul and syzygy-count routes agree"))
}

fn c3() -> Outcome {
    let f = f_example();
    let cd = CanonicalData::new(&f).map_err(|e| e.to_string())?;
    let betti = perp_betti_slice(&f, 5, BettiMethod::Koszul);
    let pres = perp_presentation(&cd, &betti).map_err(|e| e.to_string())?;
    let apolar = QuotientBasis::for_apolar(&cd).map_err(|e| e.to_string())?;
    let r = tnt_check(&pres, &apolar).map_err(|e| e.to_string())?;
    ensure(r.neg_dims == [(-3, 0), (-2, 0), (-1, 6)], format!("negative dims {:?}", r.neg_dims))?;
    ensure(r.derivatives_span, "the derivative tangents do not span")?;
    // below −3 every image lands in a negative degree of S/F^⊥
    Ok(format!("Hom_<0 {:?}, spanned by ∂_1..∂_6", r.neg_dims))
}

fn c4() -> Outcome {
    let s = setup();
    let mut dims = Vec::new();
    // outside −3..=2 every generator image lies in a zero piece of S/I
    for k in [-3, -2, 1, 2] {
        let d = hom_degree_piece(&s.pres, &s.quot, k).map_err(|e| e.to_string())?.dim();
        ensure(d == 0, format!("dim Hom_{k} = {d}"))?;
        dims.push((k, d));
    }
    let r = decomposition_check(&s.cd, &s.pres, &s.quot).map_err(|e| e.to_string())?;
    ensure(r.pass, format!("{r:?}"))?;
    ensure((r.hom_dim, r.x_dim, r.partial_dim, r.sum_dim) == (12, 6, 6, 12), format!("{r:?}"))?;
    Ok(format!("Hom_{{-1}} = {} = {} ⊕ {}; zero in {dims:?}", r.hom_dim, r.x_dim, r.partial_dim))
}

fn c5() -> Outcome {
    let s = setup();
    ensure(s.quot.total_dim() == 13, format!("dim S/I = {}", s.quot.total_dim()))?;
    let table = trace_table(&s.cd, &s.pres, &s.quot).map_err(|e| e.to_string())?;
    for (i, row) in table.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let want = if i == j { int(1) } else { int(0) };
            ensure(*v == want, format!("Tr(α_{}) on 𝔵_{} has ε-part {v}", j + 1, i + 1))?;
        }
    }
    Ok("Tr(α_j) = δ_ij·ε on all 36 pairs; dBar(𝔵_i) = ∂_i/13".into())
}

fn c6() -> Outcome {
    let s = setup();
    let ob = Obstruction::new(&s.cd, &s.pres, &s.quot).map_err(|e| e.to_string())?;
    let r = kernel_report(&ob).map_err(|e| e.to_string())?;
    ensure(r.dim == 6, format!("dim ker Ω = {}", r.dim))?;
    ensure(r.matches_partials, "ker Ω is not the span of the partials")?;
    ensure(r.routes_agree, "chain-level and closed-form routes disagree")?;
    ensure(r.annihilator_is_perp2, "annihilator of ker Ω is not (F^⊥)_2")?;
    Ok("ker Ω = span ∂F/∂x_k (dim 6), routes agree on 21 basis elements, annihilator (F^⊥)_2".into())
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn c7() -> Outcome {
    let cd = CanonicalData::new(&f_example()).map_err(|e| e.to_string())?;
    verify_gamma_identity(&cd).map_err(|e| e.to_string())?;
    // HF of Apolar(F_x·F_y) is the self-convolution of (1,6,6,1)
    let hf = [1usize, 6, 6, 1];
    let mut conv = [0usize; 7];
    for i in 0..4 {
        for j in 0..4 {
            conv[i + j] += hf[i] * hf[j];
        }
    }
    for d in 0..=7u32 {
        let p = product_perp_check(&cd, d).map_err(|e| e.to_string())?;
        let expect = binomial(11 + d as usize, 11) - conv.get(d as usize).copied().unwrap_or(0);
        ensure(p.perp_dim == expect && p.ideal_dim == expect, format!("degree {d}: {p:?}, expected {expect}"))?;
    }
    for t in [0, 1, 2, -1, 5] {
        let s = relative_freeness_sample(&cd, &int(t)).map_err(|e| e.to_string())?;
        ensure(s.dim == 14, format!("t = {t}: dim {}", s.dim))?;
    }
    for t in [0, 1, 2] {
        let r = family_fiber(&cd, &int(t)).map_err(|e| e.to_string())?;
        ensure(r.dim == 182, format!("t = {t}: fiber dim {}", r.dim))?;
        ensure(t != 1 || r.rank13_spanning, "rank-13 spanning fails at t = 1")?;
    }
    Ok("Γ identity; product perp d=0..7; dim 14 at t∈{0,1,2,−1,5}; fibers 182 at t∈{0,1,2}".into())
}

fn run_cli(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hedgehog")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn c8() -> Outcome {
    let dir = std::env::temp_dir().join(format!("hedgehog-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut jsons = Vec::new();
    for run in 0..2 {
        let path = dir.join(format!("cert{run}.json"));
        let (code, out) = run_cli(&["certify", "--cubic", F_EXAMPLE, "--json", path.to_str().unwrap()])?;
        ensure(code == 0, format!("exit code {code}"))?;
        ensure(out.contains("verdict    HEDGEHOG_CERTIFIED"), format!("summary:\n{out}"))?;
        jsons.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(jsons[0] == jsons[1], "JSON differs between runs")?;
    let (code, out) = run_cli(&["certify", "--cubic", "x1^3"])?;
    ensure(code == 1, format!("x1^3 exit code {code}"))?;
    ensure(out.contains("verdict    FAILED(condition1)"), format!("x1^3 summary:\n{out}"))?;
    Ok("F_example certified (exit 0), byte-identical JSON twice; x1^3 FAILED(condition1) (exit 1)".into())
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config { cases, ..Config::default() }, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn c9() -> Outcome {
    runner(200).run(&props::contraction_case(), props::contraction_laws).map_err(|e| format!("contraction: {e}"))?;
    runner(200).run(&props::matrix(), props::rank_identities).map_err(|e| format!("rank identities: {e}"))?;
    let s = setup();
    let hom = hom_degree_piece(&s.pres, &s.quot, -1).map_err(|e| e.to_string())?;
    ensure(hom.dim() == 12, format!("dim Hom_{{-1}} = {}", hom.dim()))?;
    for (i, t) in hom.basis.iter().enumerate() {
        deformation_roundtrip(t, &s.pres, &s.quot).map_err(|e| format!("round trip {i}: {e}"))?;
    }
    for (seed, p) in PERTURBATIONS.into_iter().enumerate() {
        props::kernel_under_perturbation(&s, p, seed as u64)?;
    }
    Ok("200 contraction cases, 200 matrices, 12 round trips, 5 perturbations".into())
}

fn c10() -> Outcome {
    let mut cases: Vec<(Poly, usize)> = [
        ("x1^3 + x2^3", 2),
        ("x1^2*x2", 2),
        ("x1^3", 2),
        ("x1*x2*x3", 3),
        ("x1^3 + x2^3 + x3^3", 3),
        ("x1^2*x2 + x2*x3^2 - x1*x2*x3", 3),
    ]
    .iter()
    .map(|(s, n)| (parse_poly(s).expect("parses"), *n))
    .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in [2, 3, 3, 3] {
        let basis = MonomialBasis::new(&first_xs(n), 3);
        let f = Poly::from_terms(basis.monomials().iter().map(|m| (*m, Rational::from_integer(rng.gen_range(-4..=4).into()))));
        if !f.is_zero() {
            cases.push((f, n));
        }
    }
    for (f, n) in &cases {
        let xs = first_xs(*n);
        let brute = brute_hilbert_function(&int_form(f, *n), *n);
        let hf = hilbert_function_in(f, &xs).map_err(|e| e.to_string())?;
        ensure(hf.values == brute, format!("{f}: HF {hf} vs oracle {brute:?}"))?;
        let perp = brute_perp_dims(&int_form(f, *n), *n, 5);
        for d in 0..=5u32 {
            let got = perp_degree_in(f, &xs, d).dim();
            ensure(got == perp[d as usize], format!("{f}: dim (F^⊥)_{d} = {got} vs oracle {}", perp[d as usize]))?;
        }
    }
    Ok(format!("{} binary/ternary cubics match the brute-force catalecticant oracle", cases.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Hilbert function and perp dimensions", Some(1), c1),
        ("Betti slice", Some(30), c2),
        ("trivial negative tangents at F^⊥", Some(10), c3),
        ("tangent space at I", None, c4),
        ("barycenter trace table", None, c5),
        ("obstruction kernel", Some(30), c6),
        ("fractal identities", Some(60), c7),
        ("end-to-end CLI", None, c8),
        ("property suites", None, c9),
        ("brute-force oracle on small cubics", None, c10),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let over = limit.is_some_and(|l| elapsed > Duration::from_secs(l));
        let limit_text = limit.map_or("no limit".to_string(), |l| format!("limit {l}s"));
        let (verdict, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("too slow; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {verdict}  {:>7.2}s ({limit_text:<9}) {name}: {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("{} of 10 criteria passed (exact arithmetic, zero tolerance)", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
