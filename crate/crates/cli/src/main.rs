//! Command-line front end: packing feasibility checks, prime
//! approximation, cohomology-ring and intersection calculators, ellipsoid
//! volumes, and the potential-gluing demo. All outputs are canonical JSON
//! (sorted keys, fixed decimal precision) so reruns diff cleanly.

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Deserialize;
use std::collections::BTreeSet;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use sympack_core::blowup::{
    kahler_criterion, top_intersection, Assumption, BlowupClass, ExceptionalTerm, ManifoldModel,
};
use sympack_core::coprime::{approximate_by_primes, CoprimeVector};
use sympack_core::packing::{check_packing, Verdict, DECIMAL_PRECISION};
use sympack_core::psh::{certify_strict_psh, glue_potentials, GlueConfig, ScalarField};
use sympack_core::scalar::format_decimal;
use sympack_core::volume::{
    ellipsoid_volume_closed_form, ellipsoid_volume_monte_carlo, Convention, Ellipsoid,
};
use sympack_core::wps::{ring_multiply, singular_locus, WpsRingElement, WpsSpace};
use sympack_core::Scalar;

/// Seed used when --seed is not given; fixed so bare invocations are
/// reproducible.
const DEFAULT_SEED: u64 = 17;
const DEFAULT_EPSILON: f64 = 1e-2;
const DEFAULT_SAMPLES: u64 = 100_000;

const EXIT_FEASIBLE: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE_VOLUME: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(
    name = "sympack",
    about = "Decision procedure for symplectic packings by ellipsoids",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Input: a JSON file path, inline JSON (starting with '{'), or '-'
    /// for stdin.
    #[arg(long, global = true)]
    input: Option<String>,

    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// RNG seed (default 17).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Tolerance where one applies (enclosures, prime approximation).
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Monte Carlo / certification sample count where one applies.
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Suppress stdout; the exit code (and --output file) still carry the
    /// result.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Packing feasibility.
    Pack {
        #[command(subcommand)]
        action: PackAction,
    },
    /// Prime-vector approximation.
    Approx {
        #[command(subcommand)]
        action: ApproxAction,
    },
    /// Weighted projective space calculators.
    Wps {
        #[command(subcommand)]
        action: WpsAction,
    },
    /// Blow-up class calculators.
    Blowup {
        #[command(subcommand)]
        action: BlowupAction,
    },
    /// Ellipsoid volume in both conventions, with a Monte Carlo estimate.
    Volume,
    /// Plurisubharmonic-potential lab.
    Psh {
        #[command(subcommand)]
        action: PshAction,
    },
}

#[derive(Subcommand)]
enum PackAction {
    /// Decide a packing instance and emit a certificate.
    Check,
}

#[derive(Subcommand)]
enum ApproxAction {
    /// Approximate a positive vector by primes over a common denominator.
    Primes,
}

#[derive(Subcommand)]
enum WpsAction {
    /// Multiplication table and top pairing of the cohomology ring.
    Ring,
}

#[derive(Subcommand)]
enum BlowupAction {
    /// Top intersection number and criterion report for a class.
    Intersect,
}

#[derive(Subcommand)]
enum PshAction {
    /// Gluing construction.
    Glue {
        /// Run the two built-in worked examples.
        #[arg(long)]
        demo: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.common.clone();
    let result = match cli.command {
        Command::Pack {
            action: PackAction::Check,
        } => cmd_pack_check(&common),
        Command::Approx {
            action: ApproxAction::Primes,
        } => cmd_approx_primes(&common),
        Command::Wps {
            action: WpsAction::Ring,
        } => cmd_wps_ring(&common),
        Command::Blowup {
            action: BlowupAction::Intersect,
        } => cmd_blowup_intersect(&common),
        Command::Volume => cmd_volume(&common),
        Command::Psh {
            action: PshAction::Glue { demo },
        } => cmd_psh_glue(&common, demo),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

// ---------------------------------------------------------------------------
// Input plumbing

fn read_input(common: &Common) -> anyhow::Result<String> {
    let spec = common
        .input
        .as_deref()
        .ok_or_else(|| anyhow!("this subcommand requires --input"))?;
    if spec.trim_start().starts_with('{') {
        return Ok(spec.to_string());
    }
    if spec == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading stdin")?;
        return Ok(buf);
    }
    std::fs::read_to_string(spec).with_context(|| format!("reading input file {spec}"))
}

/// Parses and schema-validates input JSON; parse and shape errors surface
/// with serde_json's line/column positions.
fn parse_input<T: for<'de> Deserialize<'de>>(common: &Common) -> anyhow::Result<T> {
    let text = read_input(common)?;
    serde_json::from_str(&text).map_err(|e| {
        anyhow!(
            "input does not match the expected schema: {e} (line {}, column {})",
            e.line(),
            e.column()
        )
    })
}

/// Exact rational when the JSON value allows it, f64 otherwise.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ScalarInput {
    Int(i64),
    Ratio { num: i64, den: i64 },
    Float(f64),
}

impl ScalarInput {
    fn to_scalar(&self) -> anyhow::Result<Scalar> {
        Ok(match *self {
            ScalarInput::Int(v) => Scalar::from_int(v),
            ScalarInput::Ratio { num, den } => {
                if den == 0 {
                    bail!("rational with zero denominator");
                }
                Scalar::from_ratio(num, den)
            }
            ScalarInput::Float(v) => {
                if !v.is_finite() {
                    bail!("non-finite number in input");
                }
                Scalar::from_f64(v)
            }
        })
    }
}

fn coprime_from_json(weights: &[u64]) -> anyhow::Result<CoprimeVector> {
    CoprimeVector::from_u64(weights).map_err(|e| anyhow!("{e}"))
}

fn write_output(common: &Common, text: &str) -> anyhow::Result<()> {
    if let Some(path) = &common.output {
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    if !common.quiet {
        println!("{text}");
    }
    Ok(())
}

fn canonical(value: serde_json::Value) -> String {
    // serde_json's map is a BTreeMap, so serialization sorts keys.
    serde_json::to_string_pretty(&value).expect("JSON value serializes")
}

fn scalar_json(s: &Scalar) -> serde_json::Value {
    s.to_json(DECIMAL_PRECISION)
}

fn decimal(v: f64) -> serde_json::Value {
    serde_json::Value::String(format_decimal(v, DECIMAL_PRECISION))
}

// ---------------------------------------------------------------------------
// pack check

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PackCheckInput {
    schema_version: u32,
    manifold: ManifoldInput,
    ellipsoids: Vec<EllipsoidInput>,
    #[serde(default)]
    epsilon: Option<f64>,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifoldInput {
    complex_dimension: usize,
    top_power: ScalarInput,
    #[serde(default)]
    assumptions: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipsoidInput {
    weights: Vec<ScalarInput>,
    capacity: ScalarInput,
}

fn check_schema_version(found: u32) -> anyhow::Result<()> {
    if found != 1 {
        bail!("unsupported schema_version {found}; this build reads version 1");
    }
    Ok(())
}

fn cmd_pack_check(common: &Common) -> anyhow::Result<u8> {
    let input: PackCheckInput = parse_input(common)?;
    check_schema_version(input.schema_version)?;

    let mut flags: BTreeSet<Assumption> = BTreeSet::new();
    for f in &input.manifold.assumptions {
        flags.insert(Assumption::parse(f).map_err(|e| anyhow!("{e}"))?);
    }
    let model = ManifoldModel::new(
        input.manifold.complex_dimension,
        input.manifold.top_power.to_scalar()?,
        flags,
    )
    .map_err(|e| anyhow!("{e}"))?;

    let ellipsoids: Vec<Ellipsoid> = input
        .ellipsoids
        .iter()
        .map(|e| {
            let ws = e
                .weights
                .iter()
                .map(|w| w.to_scalar())
                .collect::<anyhow::Result<Vec<_>>>()?;
            Ellipsoid::new(ws, e.capacity.to_scalar()?).map_err(|e| anyhow!("{e}"))
        })
        .collect::<anyhow::Result<_>>()?;

    let epsilon = common
        .epsilon
        .or(input.epsilon)
        .unwrap_or(DEFAULT_EPSILON);
    let seed = common.seed.or(input.seed).unwrap_or(DEFAULT_SEED);

    let certificate =
        check_packing(&model, &ellipsoids, epsilon, seed).map_err(|e| anyhow!("{e}"))?;
    write_output(common, &certificate.to_canonical_json())?;
    Ok(match certificate.verdict {
        Verdict::Feasible => EXIT_FEASIBLE,
        Verdict::InfeasibleVolume => EXIT_INFEASIBLE_VOLUME,
        Verdict::Unknown => EXIT_UNKNOWN,
    })
}

// ---------------------------------------------------------------------------
// approx primes

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApproxPrimesInput {
    schema_version: u32,
    x: Vec<f64>,
    #[serde(default)]
    epsilon: Option<f64>,
}

fn cmd_approx_primes(common: &Common) -> anyhow::Result<u8> {
    let input: ApproxPrimesInput = parse_input(common)?;
    check_schema_version(input.schema_version)?;
    let epsilon = common
        .epsilon
        .or(input.epsilon)
        .ok_or_else(|| anyhow!("epsilon required (input field or --epsilon)"))?;
    let approx = approximate_by_primes(&input.x, epsilon).map_err(|e| anyhow!("{e}"))?;
    let out = serde_json::json!({
        "schema_version": 1,
        "denominator": approx.denominator.to_string(),
        "primes": approx.primes.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "max_error": decimal(approx.max_error()),
        "epsilon": decimal(epsilon),
    });
    write_output(common, &canonical(out))?;
    Ok(EXIT_FEASIBLE)
}

// ---------------------------------------------------------------------------
// wps ring

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WpsRingInput {
    schema_version: u32,
    weights: Vec<u64>,
}

fn rational_json(r: &BigRational) -> serde_json::Value {
    let approx = r.numer().to_f64().unwrap_or(f64::NAN)
        / r.denom().to_f64().unwrap_or(f64::NAN);
    serde_json::json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
        "decimal": format_decimal(approx, DECIMAL_PRECISION),
    })
}

fn cmd_wps_ring(common: &Common) -> anyhow::Result<u8> {
    let input: WpsRingInput = parse_input(common)?;
    check_schema_version(input.schema_version)?;
    let weights = coprime_from_json(&input.weights)?;
    let space = WpsSpace::new(weights).map_err(|e| anyhow!("{e}"))?;
    let n = space.complex_dimension();

    let gens: Vec<WpsRingElement> = (0..=n)
        .map(|i| WpsRingElement::generator(&space, i).unwrap())
        .collect();
    let mut table = Vec::new();
    for i in 0..=n {
        for j in i..=n {
            let product = ring_multiply(&gens[i], &gens[j], &space).map_err(|e| anyhow!("{e}"))?;
            let (degree, coefficient) = if i + j <= n {
                (
                    serde_json::json!(i + j),
                    rational_json(&product.coefficients()[i + j]),
                )
            } else {
                (serde_json::Value::Null, rational_json(&BigRational::from_integer(0.into())))
            };
            table.push(serde_json::json!({
                "i": i,
                "j": j,
                "degree": degree,
                "coefficient": coefficient,
            }));
        }
    }

    let out = serde_json::json!({
        "schema_version": 1,
        "weights": input.weights,
        "complex_dimension": n,
        "weight_product": space.weight_product().numer().to_string(),
        "alpha1_top_pairing": rational_json(&space.alpha1_top_pairing()),
        "table": table,
        "singular_locus": singular_locus(&space)
            .iter()
            .map(|p| serde_json::json!({
                "coordinate_index": p.coordinate_index,
                "stabilizer_order": p.stabilizer_order.to_string(),
            }))
            .collect::<Vec<_>>(),
    });
    write_output(common, &canonical(out))?;
    Ok(EXIT_FEASIBLE)
}

// ---------------------------------------------------------------------------
// blowup intersect

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BlowupIntersectInput {
    schema_version: u32,
    manifold: ManifoldInput,
    #[serde(default = "default_base_scale")]
    base_scale: ScalarInput,
    exceptional: Vec<ExceptionalInput>,
}

fn default_base_scale() -> ScalarInput {
    ScalarInput::Int(1)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExceptionalInput {
    weights: Vec<u64>,
    coefficient: ScalarInput,
}

fn cmd_blowup_intersect(common: &Common) -> anyhow::Result<u8> {
    let input: BlowupIntersectInput = parse_input(common)?;
    check_schema_version(input.schema_version)?;
    let mut flags: BTreeSet<Assumption> = BTreeSet::new();
    for f in &input.manifold.assumptions {
        flags.insert(Assumption::parse(f).map_err(|e| anyhow!("{e}"))?);
    }
    let model = ManifoldModel::new(
        input.manifold.complex_dimension,
        input.manifold.top_power.to_scalar()?,
        flags,
    )
    .map_err(|e| anyhow!("{e}"))?;

    let exceptional = input
        .exceptional
        .iter()
        .map(|t| {
            Ok(ExceptionalTerm {
                weights: coprime_from_json(&t.weights)?,
                coefficient: t.coefficient.to_scalar()?,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let class = BlowupClass::new(input.base_scale.to_scalar()?, exceptional);

    let top = top_intersection(&class, &model).map_err(|e| anyhow!("{e}"))?;
    let criterion = kahler_criterion(&class, &model).map_err(|e| anyhow!("{e}"))?;
    let out = serde_json::json!({
        "schema_version": 1,
        "top_intersection": scalar_json(&top),
        "criterion": {
            "b1_holds": criterion.b1_holds,
            "b2_value": scalar_json(&criterion.b2_value),
            "kahler": criterion.kahler,
            "assumption_trace": criterion.assumption_trace.iter().map(|a| a.as_str()).collect::<Vec<_>>(),
            "missing_assumptions": criterion.missing_assumptions.iter().map(|a| a.as_str()).collect::<Vec<_>>(),
        },
    });
    write_output(common, &canonical(out))?;
    Ok(EXIT_FEASIBLE)
}

// ---------------------------------------------------------------------------
// volume

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VolumeInput {
    schema_version: u32,
    weights: Vec<ScalarInput>,
    capacity: ScalarInput,
    #[serde(default)]
    samples: Option<u64>,
    #[serde(default)]
    seed: Option<u64>,
}

fn cmd_volume(common: &Common) -> anyhow::Result<u8> {
    let input: VolumeInput = parse_input(common)?;
    check_schema_version(input.schema_version)?;
    let weights = input
        .weights
        .iter()
        .map(|w| w.to_scalar())
        .collect::<anyhow::Result<Vec<_>>>()?;
    let e = Ellipsoid::new(weights, input.capacity.to_scalar()?).map_err(|e| anyhow!("{e}"))?;

    let samples = common.samples.or(input.samples).unwrap_or(DEFAULT_SAMPLES);
    let seed = common.seed.or(input.seed).unwrap_or(DEFAULT_SEED);
    let est = ellipsoid_volume_monte_carlo(&e, samples, seed).map_err(|e| anyhow!("{e}"))?;

    let out = serde_json::json!({
        "schema_version": 1,
        "LEBESGUE": scalar_json(&ellipsoid_volume_closed_form(&e, Convention::Lebesgue)),
        "TOP_POWER": scalar_json(&ellipsoid_volume_closed_form(&e, Convention::TopPower)),
        "monte_carlo": {
            "convention": "LEBESGUE",
            "value": decimal(est.value),
            "standard_error": decimal(est.standard_error),
            "samples": est.samples,
            "seed": est.seed,
        },
    });
    write_output(common, &canonical(out))?;
    Ok(EXIT_FEASIBLE)
}

// ---------------------------------------------------------------------------
// psh glue --demo

fn cmd_psh_glue(common: &Common, demo: bool) -> anyhow::Result<u8> {
    if !demo {
        bail!("only --demo mode is available; supply --demo");
    }
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let samples = common.samples.unwrap_or(10_000) as usize;

    let mut reports = Vec::new();
    let cases: [(&str, ScalarField, ScalarField, f64); 2] = [
        (
            "quadratic against logarithmic",
            ScalarField::norm_squared(2, 1.0),
            ScalarField::log_norm_squared(2, 1.0),
            0.01,
        ),
        (
            "quadratic against quadratic",
            ScalarField::norm_squared(2, 1.0),
            ScalarField::norm_squared(2, 1.0),
            0.05,
        ),
    ];
    for (label, f, g, delta) in cases {
        let config = GlueConfig {
            seed,
            ..GlueConfig::default()
        };
        let glued = glue_potentials(&f, &g, 1.0, delta, config).map_err(|e| anyhow!("{e}"))?;
        let (certified, min_eig) = certify_strict_psh(&glued.field, samples.max(100), 0.0, seed)
            .map_err(|e| anyhow!("{e}"))?;
        let rep = &glued.report;
        reports.push(serde_json::json!({
            "label": label,
            "case": rep.case,
            "delta": decimal(rep.delta),
            "delta_ceiling": rep.delta_ceiling.map(decimal),
            "a": decimal(rep.a),
            "b": decimal(rep.b),
            "epsilon": decimal(rep.epsilon),
            "C": decimal(rep.offset_c),
            "matching_regions": {
                "inner_radius": decimal(rep.inner_radius),
                "outer_radius": decimal(rep.outer_radius),
            },
            "certification": {
                "strictly_plurisubharmonic": certified,
                "min_eigenvalue": decimal(min_eig),
                "samples": samples,
                "seed": seed,
            },
        }));
    }

    let out = serde_json::json!({
        "schema_version": 1,
        "radius": decimal(1.0),
        "reports": reports,
    });
    write_output(common, &canonical(out))?;
    Ok(EXIT_FEASIBLE)
}
