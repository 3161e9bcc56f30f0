//! The certificate chain, its JSON form, and seeded surveys of random cubics.
//!
//! Stages run in dependency order and stop at the first failure; a failed
//! stage is reported with its name and the error that stopped it.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::apolarity::{general_enough_condition1, CanonicalData, HilbertFunction};
use crate::error::{Error, Result};
use crate::fractal::{fractal_report, spike_certificate, FractalReport, SpikeCertificate};
use crate::linalg::{int, rational_string, Rational};
use crate::obstruction::{kernel_report, partial_cross_vanishing, KernelReport, Obstruction};
use crate::poly::{monomial_coordinates, parse_poly, Kind, Poly, Weights};
use crate::resolution::{build_adjusted_presentation, perp_betti_slice, perp_presentation, BettiMethod};
use crate::tangent::{
    decomposition_check_in, deformation_roundtrip, derivative_tangent, hom_degree_piece, tnt_check, trace_table,
    xq_tangent, DecompositionReport, QuotientBasis,
};

pub const SCHEMA: u32 = 1;

/// Parses a nonzero homogeneous cubic in `x1..x6`.
pub fn parse_cubic(text: &str) -> Result<Poly> {
    let p = parse_poly(text)?;
    if p.is_zero() {
        return Err(Error::DegenerateInput("the zero polynomial".into()));
    }
    if !p.only_kinds(&[Kind::X]) || p.homogeneous_degree(&Weights::kinds(&[Kind::X])) != Some(3) {
        return Err(Error::NotHomogeneousCubic(p.to_string()));
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    HedgehogCertified,
    Failed(String),
    DegenerateInput,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::HedgehogCertified => f.write_str("HEDGEHOG_CERTIFIED"),
            Verdict::Failed(stage) => write!(f, "FAILED({stage})"),
            Verdict::DegenerateInput => f.write_str("DEGENERATE_INPUT"),
        }
    }
}

impl std::str::FromStr for Verdict {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "HEDGEHOG_CERTIFIED" => Ok(Verdict::HedgehogCertified),
            "DEGENERATE_INPUT" => Ok(Verdict::DegenerateInput),
            _ => s
                .strip_prefix("FAILED(")
                .and_then(|r| r.strip_suffix(')'))
                .map(|st| Verdict::Failed(st.to_string()))
                .ok_or_else(|| format!("unknown verdict {s}")),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl Verdict {
    /// Process exit code: 0 certified, 1 failed, 2 input errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::HedgehogCertified => 0,
            Verdict::Failed(_) => 1,
            Verdict::DegenerateInput => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition1 {
    pub hf: HilbertFunction,
    pub independent: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition2 {
    pub beta0: BTreeMap<u32, usize>,
    pub beta1: BTreeMap<u32, usize>,
    pub bound: u32,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition3 {
    pub neg_tangent_dims: BTreeMap<i64, usize>,
    pub derivatives_span: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hedgehog {
    #[serde(rename = "homI_dims")]
    pub hom_i_dims: BTreeMap<i64, usize>,
    pub decomposition: DecompositionReport,
    /// `trace_table[i][j]` is the ε-coefficient of `Tr(α_j)` along `𝔵_i`.
    pub trace_table: Vec<Vec<String>>,
    pub trace_table_pass: bool,
    pub deformation_roundtrips: usize,
    pub cross_term_extensions: usize,
    #[serde(rename = "kerOmega")]
    pub ker_omega: KernelReport,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fractal {
    #[serde(flatten)]
    pub report: FractalReport,
    pub spike: SpikeCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub input: String,
    pub condition1: Option<Condition1>,
    pub condition2: Option<Condition2>,
    pub condition3: Option<Condition3>,
    pub hedgehog: Option<Hedgehog>,
    pub fractal: Option<Fractal>,
    pub verdict: Verdict,
    /// Why the chain stopped, if it did.
    pub failure: Option<String>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Every recorded stage passed.
    pub fn all_pass(&self) -> bool {
        self.condition1.as_ref().is_some_and(|c| c.pass)
            && self.condition2.as_ref().is_some_and(|c| c.pass)
            && self.condition3.as_ref().is_some_and(|c| c.pass)
            && self.hedgehog.as_ref().is_some_and(|c| c.pass)
            && self.fractal.as_ref().is_some_and(|c| c.report.pass && c.spike.lower_bound && c.spike.upper_bound)
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub t_samples: Vec<Rational>,
    pub fiber_samples: Vec<Rational>,
    /// Highest syzygy degree examined for condition (2); at least 5.
    pub bound: u32,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            t_samples: crate::fractal::DEFAULT_T_SAMPLES.iter().map(|&t| int(t)).collect(),
            fiber_samples: crate::fractal::DEFAULT_FIBER_SAMPLES.iter().map(|&t| int(t)).collect(),
            bound: 5,
        }
    }
}

struct Chain {
    cert: Certificate,
}

impl Chain {
    fn fail(mut self, stage: &str, why: impl fmt::Display) -> Certificate {
        self.cert.verdict = Verdict::Failed(stage.into());
        self.cert.failure = Some(format!("{why}"));
        self.cert
    }
}

/// Runs the whole chain. Never errors: failures become verdicts.
pub fn certify(f: &Poly, opts: &CertifyOptions) -> Certificate {
    let cert = Certificate {
        schema: SCHEMA,
        input: f.to_string(),
        condition1: None,
        condition2: None,
        condition3: None,
        hedgehog: None,
        fractal: None,
        verdict: Verdict::DegenerateInput,
        failure: None,
    };
    if f.is_zero() {
        return Certificate { failure: Some("the zero polynomial".into()), ..cert };
    }
    let mut chain = Chain { cert };
    let c1 = match general_enough_condition1(f) {
        Ok(c) => c,
        Err(e) => return Certificate { failure: Some(e.to_string()), ..chain.cert },
    };
    let pass1 = c1.pass;
    chain.cert.condition1 = Some(Condition1 { hf: c1.hf, independent: c1.independent, pass: c1.pass });
    if !pass1 {
        return chain.fail("condition1", "Hilbert function or independence check failed");
    }
    let cd = match CanonicalData::new(f) {
        Ok(cd) => cd,
        Err(e) => return chain.fail("condition1", e),
    };

    let betti = perp_betti_slice(f, opts.bound.max(5), BettiMethod::Koszul);
    let pass2 = betti.is_general_enough_shape();
    chain.cert.condition2 =
        Some(Condition2 { beta0: betti.beta0.clone(), beta1: betti.beta1.clone(), bound: betti.bound, pass: pass2 });
    if !pass2 {
        return chain.fail("condition2", "Betti numbers differ from the expected shape");
    }

    let stage3 = || -> Result<(Condition3, crate::resolution::IdealPresentation)> {
        let pp = perp_presentation(&cd, &betti)?;
        let apolar = QuotientBasis::for_apolar(&cd)?;
        let r = tnt_check(&pp, &apolar)?;
        Ok((
            Condition3 { neg_tangent_dims: r.neg_dims.into_iter().collect(), derivatives_span: r.derivatives_span, pass: r.pass },
            pp,
        ))
    };
    match stage3() {
        Ok((c3, _)) => {
            let pass = c3.pass;
            chain.cert.condition3 = Some(c3);
            if !pass {
                return chain.fail("condition3", "negative tangents are not spanned by the six derivatives");
            }
        }
        Err(e) => return chain.fail("condition3", e),
    }

    let hedgehog = match hedgehog_stage(&cd, &betti) {
        Ok(h) => h,
        Err(e) => return chain.fail("hedgehog", e),
    };
    let pass4 = hedgehog.pass;
    let annihilator = hedgehog.ker_omega.annihilator_is_perp2;
    chain.cert.hedgehog = Some(hedgehog);
    if !pass4 {
        return chain.fail("hedgehog", "tangent, trace or obstruction check failed");
    }

    let report = match fractal_report(&cd, &opts.t_samples, &opts.fiber_samples) {
        Ok(r) => r,
        Err(e) => return chain.fail("fractal", e),
    };
    let spike = spike_certificate(true, annihilator, Some(&report));
    chain.cert.fractal = Some(Fractal { report, spike });
    if !chain.cert.all_pass() {
        return chain.fail("fractal", "family checks incomplete");
    }
    chain.cert.verdict = Verdict::HedgehogCertified;
    chain.cert
}

/// Tangent dimensions at `I`, the trace table, deformation round trips,
/// cross-term extensions and the obstruction kernel.
pub fn hedgehog_stage(cd: &CanonicalData, betti: &crate::resolution::BettiSlice) -> Result<Hedgehog> {
    let pres = build_adjusted_presentation(cd, betti)?;
    let quot = QuotientBasis::for_ideal(cd)?;
    let mut hom_i_dims = BTreeMap::new();
    let mut minus_one = None;
    for k in -3..=2 {
        let piece = hom_degree_piece(&pres, &quot, k)?;
        hom_i_dims.insert(k, piece.dim());
        if k == -1 {
            minus_one = Some(piece);
        }
    }
    let dims_ok = hom_i_dims.iter().all(|(&k, &d)| match k {
        -1 => d == 12,
        0 => true,
        _ => d == 0,
    });
    let decomposition = decomposition_check_in(cd, &pres, &quot, &minus_one.expect("degree −1 computed"))?;
    let table = trace_table(cd, &pres, &quot)?;
    let trace_table_pass =
        table.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| *x == int((i == j) as i64)));
    let trace_table = table.iter().map(|r| r.iter().map(rational_string).collect()).collect();
    let mut tangents = Vec::new();
    for (i, q) in cd.qs.iter().enumerate() {
        tangents.push(xq_tangent(q, &pres, &quot)?);
        tangents.push(derivative_tangent(i + 1, &pres, &quot)?);
    }
    for t in &tangents {
        deformation_roundtrip(t, &pres, &quot)?;
    }
    let mut cross = 0;
    for (i, t) in tangents.iter().enumerate().filter(|(i, _)| i % 2 == 0) {
        partial_cross_vanishing(t, i / 2 + 1, &pres, &quot)?;
        cross += 1;
    }
    let ob = Obstruction::new(cd, &pres, &quot)?;
    let ker_omega = kernel_report(&ob)?;
    let pass = dims_ok && decomposition.pass && trace_table_pass && ker_omega.pass;
    Ok(Hedgehog {
        hom_i_dims,
        decomposition,
        trace_table,
        trace_table_pass,
        deformation_roundtrips: tangents.len(),
        cross_term_extensions: cross,
        ker_omega,
        pass,
    })
}

/// A dense cubic with every one of the 56 coefficients drawn uniformly
/// from `lo..=hi`.
pub fn random_cubic(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Poly {
    let mut p = Poly::zero();
    for m in monomial_coordinates(&[Kind::X], 3) {
        let c: i64 = rng.gen_range(lo..=hi);
        p.add_term(m, int(c));
    }
    p
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyEntry {
    pub cubic: String,
    pub verdict: Verdict,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub schema: u32,
    pub seed: u64,
    pub count: usize,
    pub coeff_range: (i64, i64),
    pub entries: Vec<SurveyEntry>,
    /// Number of inputs that passed each stage.
    pub stage_pass_counts: BTreeMap<String, usize>,
}

pub const STAGES: [&str; 5] = ["condition1", "condition2", "condition3", "hedgehog", "fractal"];

fn stages_passed(c: &Certificate) -> usize {
    match &c.verdict {
        Verdict::HedgehogCertified => STAGES.len(),
        Verdict::DegenerateInput => 0,
        Verdict::Failed(s) => STAGES.iter().position(|x| x == s).unwrap_or(0),
    }
}

/// Certifies `count` seeded random cubics, optionally followed by the
/// running example.
pub fn sample_cubics(seed: u64, count: usize, lo: i64, hi: i64, include_example: bool, opts: &CertifyOptions) -> SurveyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs: Vec<Poly> = (0..count).map(|_| random_cubic(&mut rng, lo, hi)).collect();
    if include_example {
        inputs.push(crate::f_example());
    }
    let mut stage_pass_counts: BTreeMap<String, usize> = STAGES.iter().map(|s| (s.to_string(), 0)).collect();
    let entries = inputs
        .iter()
        .map(|f| {
            let c = certify(f, opts);
            for s in &STAGES[..stages_passed(&c)] {
                *stage_pass_counts.get_mut(*s).unwrap() += 1;
            }
            SurveyEntry { cubic: c.input.clone(), verdict: c.verdict, failure: c.failure }
        })
        .collect();
    SurveyReport { schema: SCHEMA, seed, count, coeff_range: (lo, hi), entries, stage_pass_counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{f_example, F_EXAMPLE};

    #[test]
    fn parse_cubic_cases() {
        assert_eq!(parse_cubic(F_EXAMPLE).unwrap(), f_example());
        assert!(matches!(parse_cubic("x1 + x2^3"), Err(Error::NotHomogeneousCubic(_))));
        assert!(matches!(parse_cubic("y1^3"), Err(Error::NotHomogeneousCubic(_))));
        match parse_cubic("x1**3") {
            Err(Error::Parse(e)) => assert_eq!(e.position, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_cubic("0"), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn verdict_strings() {
        for v in [Verdict::HedgehogCertified, Verdict::Failed("condition2".into()), Verdict::DegenerateInput] {
            assert_eq!(v.to_string().parse::<Verdict>().unwrap(), v);
        }
        assert_eq!(Verdict::Failed("x".into()).exit_code(), 1);
    }

    #[test]
    fn failing_and_degenerate_inputs() {
        let c = certify(&Poly::x(1).pow(3), &CertifyOptions::default());
        assert_eq!(c.verdict, Verdict::Failed("condition1".into()));
        assert_eq!(c.condition1.unwrap().hf.values, vec![1, 1, 1, 1]);
        let z = certify(&Poly::zero(), &CertifyOptions::default());
        assert_eq!(z.verdict, Verdict::DegenerateInput);
        assert_eq!(Certificate::from_json(&z.to_json()).unwrap(), z);
    }

    #[test]
    fn random_cubics_are_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let p = random_cubic(&mut a, -3, 3);
        assert_eq!(p, random_cubic(&mut b, -3, 3));
        assert!(p.terms().all(|(_, c)| *c >= int(-3) && *c <= int(3)));
    }
}
