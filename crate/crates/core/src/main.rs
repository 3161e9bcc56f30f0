use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hedgehog::apolarity::{perp_degree, CanonicalData};
use hedgehog::certifier::{certify, parse_cubic, sample_cubics, Certificate, CertifyOptions, Verdict};
use hedgehog::fractal::fractal_report;
use hedgehog::linalg::{parse_rational, Rational};
use hedgehog::obstruction::{kernel_report, Obstruction};
use hedgehog::resolution::{build_adjusted_presentation, perp_betti_slice, perp_presentation, BettiMethod};
use hedgehog::tangent::{hom_degree_piece, QuotientBasis};
use hedgehog::{Error, Poly};

/// Exact certificates for cubic forms in six variables.
#[derive(Parser)]
#[command(name = "hedgehog", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full certificate chain on one cubic.
    Certify {
        #[command(flatten)]
        input: CubicArg,
        /// Write the JSON certificate here; `-` prints it instead of the summary.
        #[arg(long)]
        json: Option<String>,
        /// Comma-separated rational values of t for the freeness checks.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = rational_arg)]
        t_samples: Option<Vec<Rational>>,
        /// Comma-separated rational values of t for the fiber checks.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = rational_arg)]
        fiber_samples: Option<Vec<Rational>>,
        /// Highest syzygy degree examined for the resolution shape.
        #[arg(long, default_value_t = 5)]
        bound: u32,
    },
    /// Certify seeded random dense cubics and tally stage passes.
    Sample {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        /// Coefficient interval `lo..hi`, both ends included.
        #[arg(long, default_value = "-3..3", allow_hyphen_values = true, value_parser = range_arg)]
        coeff_range: (i64, i64),
        /// Append the running example x1x2x4 - x1x5^2 + x2x3^2 + x3x5x6 + x4x6^2.
        #[arg(long)]
        include_example: bool,
        #[arg(long)]
        json: Option<String>,
    },
    /// Graded Betti numbers beta0 and beta1 of the apolar ideal.
    Betti {
        #[command(flatten)]
        input: CubicArg,
        #[arg(long, default_value_t = 5)]
        bound: u32,
        #[arg(long)]
        json: Option<String>,
    },
    /// Dimensions of the graded pieces of Hom(J, S/J) for J = I and J = F^⊥.
    Tangent {
        #[command(flatten)]
        input: CubicArg,
        #[arg(long)]
        json: Option<String>,
    },
    /// Kernel of the primary obstruction and its annihilator.
    Obstruction {
        #[command(flatten)]
        input: CubicArg,
        #[arg(long)]
        json: Option<String>,
    },
    /// Identities of the family built from F(t·x + y).
    Fractal {
        #[command(flatten)]
        input: CubicArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = rational_arg)]
        t_samples: Option<Vec<Rational>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = rational_arg)]
        fiber_samples: Option<Vec<Rational>>,
        #[arg(long)]
        json: Option<String>,
    },
    /// Basis of the degree-d piece of F^⊥.
    Perp {
        #[command(flatten)]
        input: CubicArg,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        json: Option<String>,
    },
}

#[derive(Args)]
struct CubicArg {
    /// The cubic, e.g. `x1^3 + x2*x3*x4`, or `@path` to read it from a file.
    #[arg(long, allow_hyphen_values = true)]
    cubic: String,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("not a rational number: {s}"))
}

fn range_arg(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected lo..hi")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err("empty range".into());
    }
    Ok((lo, hi))
}

/// Failures that are the caller's fault: exit code 2.
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

impl From<std::io::Error> for InputError {
    fn from(e: std::io::Error) -> Self {
        InputError(e.to_string())
    }
}

fn read_text(arg: &str) -> Result<String, InputError> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(fs::read_to_string(path)?.trim().to_string()),
        None => Ok(arg.to_string()),
    }
}

fn read_cubic(arg: &CubicArg) -> Result<Poly, InputError> {
    Ok(parse_cubic(&read_text(&arg.cubic)?)?)
}

fn emit_json<T: Serialize>(dest: &Option<String>, value: &T) -> Result<(), InputError> {
    let Some(dest) = dest else { return Ok(()) };
    let text = serde_json::to_string_pretty(value).map_err(|e| InputError(e.to_string()))? + "\n";
    if dest == "-" {
        let _ = std::io::stdout().write_all(text.as_bytes());
    } else {
        fs::write(dest, text)?;
    }
    Ok(())
}

/// Set when JSON goes to stdout, which then carries nothing else.
static QUIET: AtomicBool = AtomicBool::new(false);

/// Human-readable output; a closed pipe is not an error.
macro_rules! say {
    ($($arg:tt)*) => {
        if !QUIET.load(Ordering::Relaxed) {
            let _ = writeln!(std::io::stdout(), $($arg)*);
        }
    };
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn summarize(c: &Certificate) {
    say!("input      {}", c.input);
    if let Some(s) = &c.condition1 {
        say!("condition1 {}  HF {:?}, independent {}", pass(s.pass), s.hf.values, s.independent);
    }
    if let Some(s) = &c.condition2 {
        say!("condition2 {}  beta0 {:?}, beta1 {:?} (bound {})", pass(s.pass), s.beta0, s.beta1, s.bound);
    }
    if let Some(s) = &c.condition3 {
        say!(
            "condition3 {}  Hom(F^⊥, S/F^⊥)_<0 {:?}, derivatives span {}",
            pass(s.pass),
            s.neg_tangent_dims,
            s.derivatives_span
        );
    }
    if let Some(s) = &c.hedgehog {
        say!("hedgehog   {}  Hom(I, S/I) {:?}", pass(s.pass), s.hom_i_dims);
        say!(
            "           decomposition {}+{} = {}, traces {}, round trips {}, cross extensions {}",
            s.decomposition.x_dim,
            s.decomposition.partial_dim,
            s.decomposition.sum_dim,
            pass(s.trace_table_pass),
            s.deformation_roundtrips,
            s.cross_term_extensions
        );
        say!(
            "           ker Ω dim {}, equals partials {}, routes agree {}, annihilator = (F^⊥)_2 {}",
            s.ker_omega.dim, s.ker_omega.matches_partials, s.ker_omega.routes_agree, s.ker_omega.annihilator_is_perp2
        );
    }
    if let Some(s) = &c.fractal {
        let r = &s.report;
        say!(
            "fractal    {}  Γ identity {}, product perp degrees {}, freeness samples {}, fibers {}",
            pass(r.pass),
            r.gamma_identity,
            r.product_perp.len(),
            r.freeness_samples.len(),
            r.fiber_ranks.len()
        );
        say!(
            "           spike: lower bound {}, upper bound {}, degree {}",
            s.spike.lower_bound, s.spike.upper_bound, s.spike.spike_degree
        );
    }
    if let Some(f) = &c.failure {
        say!("failure    {f}");
    }
    say!("verdict    {}", c.verdict);
}

fn run(cli: Cli) -> Result<ExitCode, InputError> {
    let json = match &cli.command {
        Command::Certify { json, .. }
        | Command::Sample { json, .. }
        | Command::Betti { json, .. }
        | Command::Tangent { json, .. }
        | Command::Obstruction { json, .. }
        | Command::Fractal { json, .. }
        | Command::Perp { json, .. } => json,
    };
    QUIET.store(json.as_deref() == Some("-"), Ordering::Relaxed);
    match cli.command {
        Command::Certify { input, json, t_samples, fiber_samples, bound } => {
            let mut opts = CertifyOptions { bound, ..CertifyOptions::default() };
            if let Some(t) = t_samples {
                opts.t_samples = t;
            }
            if let Some(t) = fiber_samples {
                opts.fiber_samples = t;
            }
            let f = match read_cubic(&input) {
                Ok(f) => f,
                Err(e) => {
                    // the zero form still gets a certificate
                    if matches!(parse_cubic(&read_text(&input.cubic)?), Err(Error::DegenerateInput(_))) {
                        Poly::zero()
                    } else {
                        return Err(e);
                    }
                }
            };
            let cert = certify(&f, &opts);
            summarize(&cert);
            emit_json(&json, &cert)?;
            Ok(ExitCode::from(cert.verdict.exit_code() as u8))
        }
        Command::Sample { seed, count, coeff_range, include_example, json } => {
            if count == 0 {
                return Err(InputError("count must be at least 1".into()));
            }
            let report =
                sample_cubics(seed, count, coeff_range.0, coeff_range.1, include_example, &CertifyOptions::default());
            for (i, e) in report.entries.iter().enumerate() {
                say!("{i:>3}  {:<22} {}", e.verdict.to_string(), e.cubic);
            }
            for (stage, n) in &report.stage_pass_counts {
                say!("{stage:<11} {n}/{}", report.entries.len());
            }
            emit_json(&json, &report)?;
            let all = report.entries.iter().all(|e| e.verdict == Verdict::HedgehogCertified);
            Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Betti { input, bound, json } => {
            let f = read_cubic(&input)?;
            let b = perp_betti_slice(&f, bound, BettiMethod::Koszul);
            say!("beta0 {:?}", b.beta0);
            say!("beta1 {:?}", b.beta1);
            emit_json(&json, &b)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Tangent { input, json } => {
            let f = read_cubic(&input)?;
            let cd = CanonicalData::new(&f)?;
            let betti = perp_betti_slice(&f, 5, BettiMethod::Koszul);
            let pres = build_adjusted_presentation(&cd, &betti)?;
            let quot = QuotientBasis::for_ideal(&cd)?;
            let perp_pres = perp_presentation(&cd, &betti)?;
            let apolar = QuotientBasis::for_apolar(&cd)?;
            let mut ideal = std::collections::BTreeMap::new();
            for k in -3..=2 {
                ideal.insert(k, hom_degree_piece(&pres, &quot, k)?.dim());
            }
            let mut perp = std::collections::BTreeMap::new();
            for k in -3..=-1 {
                perp.insert(k, hom_degree_piece(&perp_pres, &apolar, k)?.dim());
            }
            say!("Hom(I, S/I)       {ideal:?}");
            say!("Hom(F^⊥, S/F^⊥)   {perp:?}");
            #[derive(Serialize)]
            struct Out {
                ideal: std::collections::BTreeMap<i64, usize>,
                perp: std::collections::BTreeMap<i64, usize>,
            }
            emit_json(&json, &Out { ideal, perp })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Obstruction { input, json } => {
            let f = read_cubic(&input)?;
            let cd = CanonicalData::new(&f)?;
            let betti = perp_betti_slice(&f, 5, BettiMethod::Koszul);
            let pres = build_adjusted_presentation(&cd, &betti)?;
            let quot = QuotientBasis::for_ideal(&cd)?;
            let ob = Obstruction::new(&cd, &pres, &quot)?;
            let r = kernel_report(&ob)?;
            say!("ker Ω dim              {}", r.dim);
            say!("equals partials        {}", r.matches_partials);
            say!("routes agree           {}", r.routes_agree);
            say!("annihilator = (F^⊥)_2  {}", r.annihilator_is_perp2);
            emit_json(&json, &r)?;
            Ok(if r.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Fractal { input, t_samples, fiber_samples, json } => {
            let f = read_cubic(&input)?;
            let cd = CanonicalData::new(&f)?;
            let d = CertifyOptions::default();
            let r = fractal_report(&cd, &t_samples.unwrap_or(d.t_samples), &fiber_samples.unwrap_or(d.fiber_samples))?;
            say!("Γ identity            {}", r.gamma_identity);
            say!("Γ degree (α,t) {:?}, (α,β) {:?}", r.gamma_gradings.alpha_t, r.gamma_gradings.alpha_beta);
            for p in &r.product_perp {
                say!("product perp d={}     {} = {}", p.degree, p.perp_dim, p.ideal_dim);
            }
            for s in &r.freeness_samples {
                say!("freeness t={:<4}      dim {}", s.t0, s.dim);
            }
            for s in &r.fiber_ranks {
                say!("fiber t={:<4}         dim {}, rank-13 spanning {}", s.t0, s.dim, s.rank13_spanning);
            }
            say!("zero fiber product    {}", r.zero_fiber_is_product);
            emit_json(&json, &r)?;
            Ok(if r.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Perp { input, degree, json } => {
            let f = read_cubic(&input)?;
            let piece = perp_degree(&f, degree);
            let basis: Vec<String> = piece.basis_polys().iter().map(|p| p.to_string()).collect();
            say!("dim (F^⊥)_{degree} = {}", basis.len());
            for b in &basis {
                say!("  {b}");
            }
            emit_json(&json, &basis)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
