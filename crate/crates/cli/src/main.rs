//! `opcalc`: batch front end for the functional calculus, dilation and
//! semigroup checks.
//!
//! Exit codes: 0 success, 1 a check ran and failed, 2 non-convergence,
//! 3 precondition violated, 4 malformed input.

use clap::{Args, Parser, Subcommand, ValueEnum};
use opcalc::dilation::{self, BlockVector, DilationModel, SampleSpec};
use opcalc::funcalc::{self, CalculusDomain};
use opcalc::operator::{spectral_norm, CVec, EigenDecomposition};
use opcalc::rng::seeded;
use opcalc::semigroup::{self, PhiSpec};
use opcalc::{json, ComplexMatrix, Error, FunctionSpec};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "opcalc", version, about = "Holomorphic functional calculus, dilation and semigroup checks for matrices")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON configuration file
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Artifact file (report or table, see --format)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Tolerance override
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed of the SplitMix64 generator used by randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Artifact format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Time grid MIN:MAX:COUNT
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<Grid>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Grid {
    min: f64,
    max: f64,
    count: usize,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected MIN:MAX:COUNT, got '{s}'"));
    }
    let min = parts[0].parse::<f64>().map_err(|e| format!("MIN: {e}"))?;
    let max = parts[1].parse::<f64>().map_err(|e| format!("MAX: {e}"))?;
    let count = parts[2].parse::<usize>().map_err(|e| format!("COUNT: {e}"))?;
    Ok(Grid { min, max, count })
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute f(A) by contour integration.
    /// Input: {"matrix": {"dim", "data"}, "function": {...}, "region": {"kind", ...}, "tol"?}
    Fc,
    /// Run the dilation checks on a model.
    /// Input: {"T": {"dim", "data"}, "c", "alpha", "p"}
    Dilate {
        /// Random vectors x for the sandwich and norm-inequality checks
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Random sequences z for the lower bound of G
        #[arg(long, default_value_t = 10_000)]
        g_samples: usize,
        /// Random sequences v for the inverse-action check
        #[arg(long, default_value_t = 10)]
        v_samples: usize,
    },
    /// Exponential lower bound and submultiplicativity for exp(-tA).
    /// Input: {"A": {"dim", "data"}, "t0", "alpha"}; grid defaults to 0:5:101
    Semigroup,
    /// Norm of the example semigroup by three routes.
    /// Input (optional): {"phi": name, "t": [..]}
    Example32 {
        /// xsq, xsq_half, xlog or xloglog
        #[arg(long, default_value = "xsq")]
        phi: String,
        /// Comma-separated times in (0,1)
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.5")]
        t: Vec<f64>,
    },
    /// Constant of the half-plane derivative estimate against sampled ratios.
    /// Input (optional): {"eta", "epsilon", "a", "sigma", "sigma_prime", "count"}
    Folklore {
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Defaults to 3π/4
        #[arg(long, default_value_t = 0.75 * PI)]
        sigma: f64,
        /// Defaults to 5π/8
        #[arg(long, default_value_t = 0.625 * PI)]
        sigma_prime: f64,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

enum Failure {
    Malformed(String),
    Numeric(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Malformed(_) | Failure::Io(_) => 4,
            Failure::Numeric(e) if !e.is_precondition() => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Malformed(m) => format!("MalformedInput: {m}"),
            Failure::Io(m) => format!("MalformedInput: {m}"),
            Failure::Numeric(e) => e.to_string(),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn read_json(path: Option<&Path>, required: bool) -> Result<Option<Value>, Failure> {
    let Some(path) = path else {
        return if required {
            Err(Failure::Malformed("field `--input`: this command needs a configuration file".into()))
        } else {
            Ok(None)
        };
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value, Failure> {
    v.get(name).ok_or_else(|| Failure::Malformed(format!("field `{name}`: missing")))
}

fn typed<T: for<'de> Deserialize<'de>>(v: &Value, name: &str) -> Result<T, Failure> {
    T::deserialize(field(v, name)?).map_err(|e| Failure::Malformed(format!("field `{name}`: {e}")))
}

fn optional<T: for<'de> Deserialize<'de>>(v: &Value, name: &str) -> Result<Option<T>, Failure> {
    match v.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => typed(v, name).map(Some),
    }
}

fn check_fields(v: &Value, allowed: &[&str]) -> Result<(), Failure> {
    let obj = v
        .as_object()
        .ok_or_else(|| Failure::Malformed("configuration must be a JSON object".into()))?;
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Failure::Malformed(format!("field `{key}`: unknown field")));
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&x| json::format_f64(x)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

struct Emit<'a> {
    common: &'a Common,
}

impl Emit<'_> {
    /// Prints the report and writes the artifact.
    fn finish<T: Serialize>(&self, report: &T, table: Option<(&[&str], Vec<Vec<f64>>)>) -> Result<(), Failure> {
        let text = to_json(report);
        print!("{text}");
        if let Some(path) = &self.common.output {
            let artifact = match (self.common.format, table) {
                (Format::Csv, Some((header, rows))) => csv_table(header, &rows),
                (Format::Csv, None) => return Err(Failure::Malformed("field `--format`: csv is not available for this command".into())),
                (Format::Json, _) => text,
            };
            std::fs::write(path, artifact).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}

// ── fc ────────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct FcReport {
    value: ComplexMatrix,
    error_estimate: f64,
    nodes: usize,
    oracle_deviation: Option<f64>,
}

fn cmd_fc(common: &Common) -> Outcome {
    let cfg = read_json(common.input.as_deref(), true)?.expect("required");
    check_fields(&cfg, &["matrix", "function", "region", "tol"])?;
    let a: ComplexMatrix = typed(&cfg, "matrix")?;
    let spec = FunctionSpec::from_json(field(&cfg, "function")?).map_err(|e| Failure::Malformed(e.to_string()))?;
    let domain: CalculusDomain = typed(&cfg, "region")?;
    let tol = common.tol.or(optional(&cfg, "tol")?).unwrap_or(1e-8);
    let f = spec.build()?;
    let res = funcalc::fc(&f, &a, &domain, tol)?;
    let oracle_deviation = EigenDecomposition::new(&a).ok().filter(|e| e.condition() < 1e8).map(|e| {
        let oracle = e.apply(|z| f.eval(z));
        spectral_norm(&(res.value.as_matrix() - &oracle)) / spectral_norm(&oracle).max(f64::MIN_POSITIVE)
    });
    let n = a.dim();
    let rows = (0..n * n)
        .map(|k| {
            let z = res.value[(k / n, k % n)];
            vec![(k / n) as f64, (k % n) as f64, z.re, z.im]
        })
        .collect();
    let report = FcReport {
        value: res.value,
        error_estimate: res.error_estimate,
        nodes: res.nodes_used,
        oracle_deviation,
    };
    Emit { common }.finish(&report, Some((&["row", "col", "re", "im"], rows)))?;
    Ok(true)
}

// ── dilate ────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct DilateReport {
    dim: usize,
    c: f64,
    alpha: f64,
    p: f64,
    seed: u64,
    admissibility: dilation::AdmissibilityReport,
    /// ‖ι e₁‖_Y with e₁ the first standard basis vector (‖e₁‖ = 1).
    iota_norm: f64,
    checks: Vec<dilation::CheckReport>,
    pass: bool,
}

fn cmd_dilate(common: &Common, samples: usize, g_samples: usize, v_samples: usize) -> Outcome {
    let cfg = read_json(common.input.as_deref(), true)?.expect("required");
    check_fields(&cfg, &["T", "c", "alpha", "p"])?;
    let t: ComplexMatrix = typed(&cfg, "T")?;
    let (c, alpha, p): (f64, f64, f64) = (typed(&cfg, "c")?, typed(&cfg, "alpha")?, typed(&cfg, "p")?);
    let model = DilationModel::new(t, c, alpha, p)?;
    let tol = common.tol.unwrap_or(dilation::QUOTIENT_TOL);
    let seed = common.seed;
    let d = model.dim();

    let admissibility = dilation::alpha_p_admissibility(alpha, p, 1000, seed)?;
    let mut e1 = CVec::zeros(d);
    e1[0] = 1.0.into();
    let iota = dilation::iota_norm(&model, &e1, dilation::N_MAX, tol)?;
    let spec = |count: usize, offset: u64| SampleSpec {
        count,
        seed: seed.wrapping_add(offset),
        max_support: 32,
    };
    let mut checks = vec![
        dilation::sandwich_check(&model, &spec(samples, 1), dilation::N_MAX, tol)?,
        dilation::norm_inequality_check(&model, &dilation::commutant_family(&model), &spec(samples, 2), dilation::N_MAX, tol)?,
        dilation::g_lower_bound_check(&model, &spec(g_samples, 3))?,
    ];
    let mut rng = seeded(seed.wrapping_add(4));
    let (mut worst_residual, mut inverse_ok) = (0.0f64, true);
    for _ in 0..v_samples {
        let len = rng.random_range(1..=8);
        let v = BlockVector::random(&mut rng, len, d, p);
        let r = dilation::inverse_action_check(&model, &v, dilation::N_MAX, tol)?;
        worst_residual = worst_residual.max(r.range_residual).max(r.inverse_prep_residual);
        inverse_ok &= r.pass;
    }
    checks.push(dilation::CheckReport {
        check: "inverse_action".into(),
        samples: v_samples,
        worst_margin: tol - worst_residual,
        observed: worst_residual,
        pass: inverse_ok,
    });
    let pass = admissibility.agree && checks.iter().all(|c| c.pass);
    let rows = checks
        .iter()
        .map(|c| vec![c.samples as f64, c.worst_margin, c.observed, if c.pass { 1.0 } else { 0.0 }])
        .collect();
    let report = DilateReport {
        dim: d,
        c,
        alpha,
        p,
        seed,
        admissibility,
        iota_norm: iota,
        checks,
        pass,
    };
    Emit { common }.finish(&report, Some((&["samples", "worst_margin", "observed", "pass"], rows)))?;
    Ok(pass)
}

// ── semigroup ─────────────────────────────────────────────────────────

#[derive(Serialize)]
struct SemigroupReport {
    c: f64,
    nu: f64,
    m: f64,
    m_refined: f64,
    refinement_change: f64,
    t0: f64,
    alpha: f64,
    k: f64,
    negative_time_exact: bool,
    negative_time_alpha: bool,
    gamma: semigroup::GammaReport,
    pass: bool,
}

fn cmd_semigroup(common: &Common) -> Outcome {
    let cfg = read_json(common.input.as_deref(), true)?.expect("required");
    check_fields(&cfg, &["A", "t0", "alpha"])?;
    let a: ComplexMatrix = typed(&cfg, "A")?;
    let (t0, alpha): (f64, f64) = (typed(&cfg, "t0")?, typed(&cfg, "alpha")?);
    let g = common.grid.unwrap_or(Grid { min: 0.0, max: 5.0, count: 101 });
    let grid = semigroup::uniform_grid(g.min, g.max, g.count)?;
    let cert = semigroup::exponential_lower_bound_check(&a, t0, alpha, &grid)?;
    let gamma = semigroup::gamma_submultiplicativity_check(&a, &grid)?;
    let pass = cert.pass && gamma.pass;
    let rows = cert.rows.iter().map(|r| vec![r.t, r.sigma_min, r.nu_envelope, r.gamma]).collect();
    let report = SemigroupReport {
        c: cert.c,
        nu: cert.nu,
        m: cert.m,
        m_refined: cert.m_refined,
        refinement_change: cert.refinement_change,
        t0,
        alpha,
        k: cert.k,
        negative_time_exact: cert.negative_time_exact,
        negative_time_alpha: cert.negative_time_alpha,
        gamma,
        pass,
    };
    Emit { common }.finish(&report, Some((&["t", "sigma_min", "nu_envelope", "gamma"], rows)))?;
    Ok(pass)
}

// ── example32 ─────────────────────────────────────────────────────────

#[derive(Serialize)]
struct Example32Report {
    phi: String,
    validation: semigroup::PhiValidation,
    rows: Vec<semigroup::Example32Row>,
    identity: Vec<semigroup::IdentityRow>,
    pass: bool,
}

fn cmd_example32(common: &Common, phi_flag: &str, t_flag: &[f64]) -> Outcome {
    let cfg = read_json(common.input.as_deref(), false)?;
    let (name, ts) = match &cfg {
        Some(v) => {
            check_fields(v, &["phi", "t"])?;
            (
                optional::<String>(v, "phi")?.unwrap_or_else(|| phi_flag.to_string()),
                optional::<Vec<f64>>(v, "t")?.unwrap_or_else(|| t_flag.to_vec()),
            )
        }
        None => (phi_flag.to_string(), t_flag.to_vec()),
    };
    let phi = PhiSpec::from_name(&name).map_err(|e| Failure::Malformed(format!("field `phi`: {e}")))?;
    let rows: Vec<_> = ts.iter().map(|&t| semigroup::example32_norm(phi, t)).collect::<Result<_, _>>()?;
    let identity = semigroup::example32_identity_check(phi, &ts)?;
    let pass = identity.pass;
    let table = rows.iter().map(|r| vec![r.t, r.norm_direct, r.norm_reduced, r.norm_young]).collect();
    let report = Example32Report {
        phi: name,
        validation: identity.validation.clone(),
        rows,
        identity: identity.rows,
        pass,
    };
    Emit { common }.finish(&report, Some((&["t", "norm_direct", "norm_reduced", "norm_young"], table)))?;
    Ok(pass)
}

// ── folklore ──────────────────────────────────────────────────────────

fn cmd_folklore(common: &Common, flags: [f64; 5], count: usize) -> Outcome {
    let [mut eta, mut epsilon, mut a, mut sigma, mut sigma_prime] = flags;
    let mut count = count;
    if let Some(v) = read_json(common.input.as_deref(), false)? {
        check_fields(&v, &["eta", "epsilon", "a", "sigma", "sigma_prime", "count"])?;
        eta = optional(&v, "eta")?.unwrap_or(eta);
        epsilon = optional(&v, "epsilon")?.unwrap_or(epsilon);
        a = optional(&v, "a")?.unwrap_or(a);
        sigma = optional(&v, "sigma")?.unwrap_or(sigma);
        sigma_prime = optional(&v, "sigma_prime")?.unwrap_or(sigma_prime);
        count = optional(&v, "count")?.unwrap_or(count);
    }
    let report = funcalc::folklore_check(eta, epsilon, a, sigma, sigma_prime, count, common.seed)?;
    let rows = report.ratios.iter().enumerate().map(|(i, &r)| vec![i as f64, r]).collect();
    Emit { common }.finish(&report, Some((&["index", "ratio"], rows)))?;
    Ok(report.pass)
}

fn run(cli: &Cli) -> Outcome {
    let common = &cli.common;
    match &cli.command {
        Command::Fc => cmd_fc(common),
        Command::Dilate { samples, g_samples, v_samples } => cmd_dilate(common, *samples, *g_samples, *v_samples),
        Command::Semigroup => cmd_semigroup(common),
        Command::Example32 { phi, t } => cmd_example32(common, phi, t),
        Command::Folklore {
            eta,
            epsilon,
            a,
            sigma,
            sigma_prime,
            count,
        } => cmd_folklore(common, [*eta, *epsilon, *a, *sigma, *sigma_prime], *count),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("CheckFailed: at least one check did not pass");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}
