//! `dualcurv` — generate convex bodies, evaluate their dual curvature
//! measures and slicing functions, and verify the concentration bounds and
//! the divergence identity from the command line.
//!
//! Every command prints a single JSON object (or CSV where tabular output
//! makes sense) with floats at 17 significant digits; `--reproducible`
//! drops the timestamp so identical invocations give identical bytes.
//! Exit codes: 0 success, 1 domain/input error, 2 configuration error,
//! 3 a `verify-*` command found a failing case.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use serde_json::{Map, Value};

use dualcurv::error::{Error, Result};
use dualcurv::io::{self, json_num, to_json_string};
use dualcurv::measures::{self, QuadMethod, QuadratureSpec};
use dualcurv::slicing::{DivergenceOptions, FdSpec};
use dualcurv::subspace::{parse_axis_list, Subspace};
use dualcurv::{bounds, generate};
use dualcurv::{Body, PhiSpec};

#[derive(Parser)]
#[command(
    name = "dualcurv",
    version,
    about = "Dual curvature measures, concentration ratios, and slicing \
             integrals of convex bodies (dimensions 2-4)"
)]
struct Cli {
    /// Omit fields that vary between runs (the timestamp), so identical
    /// invocations produce byte-identical output.
    #[arg(long, global = true)]
    reproducible: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a body file from one of the standard families.
    Gen(GenArgs),
    /// Asymmetry constant of a body (optionally cross-checked by bisection).
    Gamma(GammaArgs),
    /// Total (or subspace) dual curvature measure.
    Measure(MeasureArgs),
    /// Subspace concentration ratio.
    Ratio(RatioArgs),
    /// Tabulate the slicing function g and its radial derivative.
    Slice(SliceArgs),
    /// Check the divergence identity relating the ratio to the gradient
    /// limit; exits 3 when the residual exceeds the tolerance.
    VerifyDivergence(VerifyDivergenceArgs),
    /// Check concentration bounds over bodies and subspaces; exits 3 when
    /// any established bound is violated.
    VerifyBounds(VerifyBoundsArgs),
    /// Sweep a body family, tracking the bound margin; optionally refine
    /// around the tightest parameter.
    Sweep(SweepArgs),
}

// ---------------------------------------------------------------------------
// Shared argument groups

#[derive(Args)]
struct SubspaceArgs {
    /// Coordinate axes of L, 0-based and comma-separated: "0" is span(e1),
    /// "0,2" is span(e1,e3).
    #[arg(long = "L", value_name = "AXES")]
    l: Option<String>,

    /// JSON file with spanning rows of L ([[...], ...]); the rows are
    /// orthonormalized on load.
    #[arg(long = "L-basis", value_name = "FILE")]
    l_basis: Option<PathBuf>,
}

impl SubspaceArgs {
    fn resolve(&self, ambient: usize) -> Result<Subspace> {
        match (&self.l, &self.l_basis) {
            (Some(_), Some(_)) => Err(Error::config("give --L or --L-basis, not both")),
            (Some(spec), None) => parse_axis_list(spec, ambient),
            (None, Some(path)) => {
                let text = fs::read_to_string(path)?;
                let rows: Vec<Vec<f64>> = serde_json::from_str(&text)?;
                let rows: Vec<DVector<f64>> =
                    rows.into_iter().map(DVector::from_vec).collect();
                Subspace::from_rows(&rows, ambient)
            }
            (None, None) => Err(Error::config(
                "a subspace is required: --L axis list or --L-basis file",
            )),
        }
    }
}

#[derive(Args)]
struct QuadArgs {
    /// Measure evaluation method: mc, product, or facet. Default: facet
    /// for polytopes with q > 0, mc otherwise.
    #[arg(long, value_name = "METHOD")]
    method: Option<String>,

    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,

    /// Monte Carlo seed (the estimate is a pure function of seed and
    /// sample count, independent of thread count).
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Base quadrature order for the deterministic routes.
    #[arg(long, default_value_t = 8)]
    order: usize,
}

impl QuadArgs {
    /// Build the quadrature spec; `None` method means "let the library pick per body".
    fn spec(&self, body: &Body, q: f64) -> Result<QuadratureSpec> {
        let method = match &self.method {
            Some(text) => parse_method(text)?,
            None => measures::default_method(body, q),
        };
        Ok(QuadratureSpec {
            method,
            samples: self.samples,
            seed: self.seed,
            order: self.order,
        })
    }
}

fn parse_method(text: &str) -> Result<QuadMethod> {
    match text {
        "mc" => Ok(QuadMethod::MonteCarlo),
        "product" => Ok(QuadMethod::Product),
        "facet" => Ok(QuadMethod::Facet),
        other => Err(Error::config(format!(
            "unknown method {other:?} (expected mc, product, or facet)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Per-command arguments

#[derive(Args)]
struct GenArgs {
    /// Family: cube, cross_polytope, simplex_centered, shifted_cube,
    /// random_tangent, or product_ball.
    #[arg(long)]
    kind: String,

    /// Ambient dimension (2-4).
    #[arg(long)]
    dim: usize,

    /// Shift parameter for shifted_cube (0 <= t < 1).
    #[arg(long)]
    t: Option<f64>,

    /// Tangent-plane count for random_tangent.
    #[arg(long)]
    m: Option<usize>,

    /// Seed for random_tangent.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// First-block dimension for product_ball (1 <= split <= dim-1).
    #[arg(long)]
    split: Option<usize>,

    /// Body file to write.
    #[arg(short, long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct GammaArgs {
    /// Body file.
    #[arg(long)]
    body: PathBuf,

    /// Also run the containment-bisection oracle and report the gap.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct MeasureArgs {
    /// Body file.
    #[arg(long)]
    body: PathBuf,

    /// Measure exponent q.
    #[arg(long)]
    q: f64,

    #[command(flatten)]
    subspace: SubspaceArgs,

    #[command(flatten)]
    quad: QuadArgs,

    /// Report file (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RatioArgs {
    /// Body file.
    #[arg(long)]
    body: PathBuf,

    /// Measure exponent q.
    #[arg(long)]
    q: f64,

    #[command(flatten)]
    subspace: SubspaceArgs,

    #[command(flatten)]
    quad: QuadArgs,

    /// Report file (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SliceArgs {
    /// Body file.
    #[arg(long)]
    body: PathBuf,

    /// Weight exponent q (must exceed dim L).
    #[arg(long)]
    q: f64,

    #[command(flatten)]
    subspace: SubspaceArgs,

    /// Midpoint cells per axis over the shadow (dim L <= 2).
    #[arg(long, default_value_t = 16)]
    grid: usize,

    /// Quadrature order for the slice integrals.
    #[arg(long, default_value_t = 8)]
    order: usize,

    /// Relative finite-difference step for the radial derivative.
    #[arg(long, default_value_t = 1e-4)]
    fd_step: f64,

    /// Output format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,

    /// Report file (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyDivergenceArgs {
    /// Body file.
    #[arg(long)]
    body: PathBuf,

    /// Exponents q to check, comma-separated (each must exceed dim L).
    #[arg(long)]
    q: String,

    #[command(flatten)]
    subspace: SubspaceArgs,

    /// Midpoint cells per axis over the shadow.
    #[arg(long, default_value_t = 64)]
    grid: usize,

    /// Shrink levels m, comma-separated; default derives {grid/16, grid/8,
    /// grid/4}.
    #[arg(long)]
    levels: Option<String>,

    /// Relative finite-difference step.
    #[arg(long, default_value_t = 1e-4)]
    fd_step: f64,

    /// Residual tolerance for the pass verdict.
    #[arg(long, default_value_t = 5e-3)]
    tol: f64,

    #[command(flatten)]
    quad: QuadArgs,

    /// Report file (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyBoundsArgs {
    /// Built-in body suite ("standard": 21 bodies over dimensions 2-4).
    #[arg(long)]
    suite: Option<String>,

    /// Body file; repeat for several.
    #[arg(long = "body")]
    bodies: Vec<PathBuf>,

    /// Exponents q, comma-separated; default per body and subspace is
    /// {k+1.5, n, n+2}.
    #[arg(long)]
    q: Option<String>,

    /// Subspace axis list; repeat for several. Default: "0" and "0,1".
    /// Pairs where L is not proper for the body are skipped and listed.
    #[arg(long = "L", value_name = "AXES")]
    l: Vec<String>,

    #[command(flatten)]
    quad: QuadArgs,

    /// Also write the records as CSV to this file (ratio, bound, and
    /// margin columns for plotting).
    #[arg(long, value_name = "FILE")]
    plot_data: Option<PathBuf>,

    /// Output format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,

    /// Report file (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Body family to sweep (currently shifted_cube: the parameter is the
    /// facet shift t, with gamma = (1-t)/(1+t)).
    #[arg(long, default_value = "shifted_cube")]
    family: String,

    /// Ambient dimension of the family.
    #[arg(long, default_value_t = 3)]
    dim: usize,

    /// First parameter value.
    #[arg(long, default_value_t = 0.05)]
    param_min: f64,

    /// Last parameter value.
    #[arg(long, default_value_t = 0.85)]
    param_max: f64,

    /// Number of sampled parameters (endpoints included).
    #[arg(long, default_value_t = 9)]
    steps: usize,

    /// Measure exponent q.
    #[arg(long)]
    q: f64,

    #[command(flatten)]
    subspace: SubspaceArgs,

    /// Golden-section refine the parameter with the smallest margin.
    #[arg(long)]
    refine: bool,

    #[command(flatten)]
    quad: QuadArgs,

    /// Output format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,

    /// Report file (stdout when omitted).
    #[arg(short, long, value_name = "FILE")]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Output plumbing

fn unix_timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Wrap a payload with the command name (and a timestamp unless the run is
/// reproducible), then print it or write it to the output file.
fn emit_json(
    command: &str,
    reproducible: bool,
    payload: Value,
    out: Option<&Path>,
) -> Result<()> {
    let Value::Object(mut map) = payload else {
        return Err(Error::config("internal: report payload must be an object"));
    };
    map.insert("command".into(), Value::String(command.into()));
    if !reproducible {
        map.insert(
            "timestamp".into(),
            Value::Number(unix_timestamp().into()),
        );
    }
    write_out(out, &to_json_string(&Value::Object(map))?)
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(part.parse::<f64>().map_err(|_| {
            Error::config(format!("bad {what} value {part:?} in {text:?}"))
        })?);
    }
    if out.is_empty() {
        return Err(Error::config(format!("no {what} values in {text:?}")));
    }
    Ok(out)
}

fn parse_usize_list(text: &str, what: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(part.parse::<usize>().map_err(|_| {
            Error::config(format!("bad {what} value {part:?} in {text:?}"))
        })?);
    }
    if out.is_empty() {
        return Err(Error::config(format!("no {what} values in {text:?}")));
    }
    Ok(out)
}

fn check_format(format: &str) -> Result<()> {
    match format {
        "json" | "csv" => Ok(()),
        other => Err(Error::config(format!(
            "unknown format {other:?} (expected json or csv)"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Command implementations

fn cmd_gen(args: &GenArgs, reproducible: bool) -> Result<i32> {
    let body = match args.kind.as_str() {
        "cube" => generate::cube(args.dim)?,
        "cross_polytope" => generate::cross_polytope(args.dim)?,
        "simplex_centered" => generate::simplex_centered(args.dim)?,
        "shifted_cube" => {
            let t = args
                .t
                .ok_or_else(|| Error::config("shifted_cube needs --t"))?;
            generate::shifted_cube(args.dim, t)?
        }
        "random_tangent" => {
            let m = args
                .m
                .ok_or_else(|| Error::config("random_tangent needs --m (plane count)"))?;
            generate::random_tangent(args.dim, m, args.seed)?
        }
        "product_ball" => {
            let split = args
                .split
                .ok_or_else(|| Error::config("product_ball needs --split"))?;
            generate::product_ball(args.dim, split)?
        }
        other => {
            return Err(Error::config(format!(
                "unknown family {other:?} (expected cube, cross_polytope, \
                 simplex_centered, shifted_cube, random_tangent, or product_ball)"
            )))
        }
    };
    io::save_body(&body, &args.out)?;
    let mut payload = Map::new();
    payload.insert("body".into(), Value::String(body.name().to_string()));
    payload.insert("dim".into(), Value::Number(body.dim().into()));
    payload.insert("kind".into(), Value::String(body.kind_name().into()));
    if body.is_polytope() {
        payload.insert(
            "facets".into(),
            Value::Number(body.facets()?.len().into()),
        );
        payload.insert(
            "vertices".into(),
            Value::Number(body.vertices()?.len().into()),
        );
    }
    payload.insert(
        "path".into(),
        Value::String(args.out.display().to_string()),
    );
    emit_json("gen", reproducible, Value::Object(payload), None)?;
    Ok(0)
}

fn cmd_gamma(args: &GammaArgs, reproducible: bool) -> Result<i32> {
    let body = io::load_body(&args.body)?;
    let asym = body.asymmetry();
    let mut payload = Map::new();
    payload.insert("body".into(), Value::String(body.name().to_string()));
    payload.insert("dim".into(), Value::Number(body.dim().into()));
    payload.insert("gamma".into(), json_num(asym.gamma, "gamma")?);
    payload.insert(
        "witness_facet".into(),
        match asym.witness_facet {
            Some(i) => Value::Number(i.into()),
            None => Value::Null,
        },
    );
    if args.oracle {
        let oracle = body.asymmetry_by_bisection(1e-10);
        payload.insert("oracle_gamma".into(), json_num(oracle, "oracle gamma")?);
        payload.insert(
            "oracle_diff".into(),
            json_num((oracle - asym.gamma).abs(), "oracle diff")?,
        );
    }
    emit_json("gamma", reproducible, Value::Object(payload), None)?;
    Ok(0)
}

fn cmd_measure(args: &MeasureArgs, reproducible: bool) -> Result<i32> {
    let body = io::load_body(&args.body)?;
    let phi = PhiSpec::power(args.q, body.dim())?;
    let spec = args.quad.spec(&body, args.q)?;
    let mut payload = Map::new();
    payload.insert("body".into(), Value::String(body.name().to_string()));
    payload.insert("n".into(), Value::Number(body.dim().into()));
    payload.insert("q".into(), json_num(args.q, "q")?);
    payload.insert(
        "method".into(),
        Value::String(spec.method.name().into()),
    );
    let measured = if args.subspace.l.is_some() || args.subspace.l_basis.is_some() {
        let l = args.subspace.resolve(body.dim())?;
        payload.insert(
            "subspace".into(),
            Value::String(bounds::subspace_label(&l)),
        );
        measures::subspace_measure(&body, &phi, &l, &spec)?
    } else {
        payload.insert("subspace".into(), Value::Null);
        measures::total_measure(&body, &phi, &spec)?
    };
    payload.insert("value".into(), json_num(measured.value, "measure")?);
    payload.insert(
        "stderr".into(),
        match measured.stderr {
            Some(s) => json_num(s, "stderr")?,
            None => Value::Null,
        },
    );
    emit_json("measure", reproducible, Value::Object(payload), args.out.as_deref())?;
    Ok(0)
}

fn cmd_ratio(args: &RatioArgs, reproducible: bool) -> Result<i32> {
    let body = io::load_body(&args.body)?;
    let phi = PhiSpec::power(args.q, body.dim())?;
    let l = args.subspace.resolve(body.dim())?;
    let spec = args.quad.spec(&body, args.q)?;
    let rr = measures::concentration_ratio(&body, &phi, &l, &spec)?;
    let Value::Object(mut payload) = io::ratio_json(&rr)? else {
        unreachable!("ratio_json returns an object");
    };
    payload.insert("body".into(), Value::String(body.name().to_string()));
    payload.insert("n".into(), Value::Number(body.dim().into()));
    payload.insert("k".into(), Value::Number(l.dim().into()));
    payload.insert("q".into(), json_num(args.q, "q")?);
    payload.insert(
        "subspace".into(),
        Value::String(bounds::subspace_label(&l)),
    );
    emit_json("ratio", reproducible, Value::Object(payload), args.out.as_deref())?;
    Ok(0)
}

fn cmd_slice(args: &SliceArgs, reproducible: bool) -> Result<i32> {
    check_format(&args.format)?;
    let body = io::load_body(&args.body)?;
    let phi = PhiSpec::power(args.q, body.dim())?;
    let l = args.subspace.resolve(body.dim())?;
    let fd = FdSpec {
        rel_step: args.fd_step,
    };
    let samples =
        dualcurv::slicing::slice_profile(&body, &l, &phi, args.grid, &fd, args.order)?;
    if args.format == "csv" {
        return write_out(args.out.as_deref(), &io::slice_csv(&samples, l.dim())?)
            .map(|()| 0);
    }
    let Value::Object(mut payload) = io::slice_json(&samples)? else {
        unreachable!("slice_json returns an object");
    };
    payload.insert("body".into(), Value::String(body.name().to_string()));
    payload.insert("n".into(), Value::Number(body.dim().into()));
    payload.insert("k".into(), Value::Number(l.dim().into()));
    payload.insert("q".into(), json_num(args.q, "q")?);
    payload.insert(
        "subspace".into(),
        Value::String(bounds::subspace_label(&l)),
    );
    payload.insert("grid".into(), Value::Number(args.grid.into()));
    emit_json("slice", reproducible, Value::Object(payload), args.out.as_deref())?;
    Ok(0)
}

fn cmd_verify_divergence(args: &VerifyDivergenceArgs, reproducible: bool) -> Result<i32> {
    let body = io::load_body(&args.body)?;
    let l = args.subspace.resolve(body.dim())?;
    let qs = parse_f64_list(&args.q, "q")?;
    let levels = match &args.levels {
        Some(text) => Some(parse_usize_list(text, "level")?),
        None => None,
    };
    let mut cases = Vec::new();
    let mut all_pass = true;
    for &q in &qs {
        let phi = PhiSpec::power(q, body.dim())?;
        let opts = DivergenceOptions {
            grid: args.grid,
            levels: levels.clone(),
            fd: FdSpec {
                rel_step: args.fd_step,
            },
            order: args.quad.order,
            measure: Some(args.quad.spec(&body, q)?),
            mc_samples: args.quad.samples,
            mc_seed: args.quad.seed,
        };
        let report = dualcurv::slicing::divergence_identity_check(&body, &l, &phi, &opts)?;
        let pass = report.residual.abs() <= args.tol;
        all_pass &= pass;
        let Value::Object(mut case) = io::divergence_json(&report)? else {
            unreachable!("divergence_json returns an object");
        };
        case.insert("pass".into(), Value::Bool(pass));
        cases.push(Value::Object(case));
    }
    let mut payload = Map::new();
    payload.insert("subspace".into(), Value::String(bounds::subspace_label(&l)));
    payload.insert("tol".into(), json_num(args.tol, "tol")?);
    payload.insert("cases".into(), Value::Array(cases));
    payload.insert("pass".into(), Value::Bool(all_pass));
    emit_json(
        "verify-divergence",
        reproducible,
        Value::Object(payload),
        args.out.as_deref(),
    )?;
    Ok(if all_pass { 0 } else { 3 })
}

fn cmd_verify_bounds(args: &VerifyBoundsArgs, reproducible: bool) -> Result<i32> {
    check_format(&args.format)?;
    let mut bodies: Vec<Body> = Vec::new();
    match args.suite.as_deref() {
        Some("standard") => bodies.extend(generate::standard_suite()?),
        Some(other) => {
            return Err(Error::config(format!(
                "unknown suite {other:?} (expected standard)"
            )))
        }
        None => {}
    }
    for path in &args.bodies {
        bodies.push(io::load_body(path)?);
    }
    if bodies.is_empty() {
        return Err(Error::config(
            "no bodies: give --suite standard and/or --body files",
        ));
    }
    let l_specs: Vec<String> = if args.l.is_empty() {
        vec!["0".into(), "0,1".into()]
    } else {
        args.l.clone()
    };
    let explicit_q = match &args.q {
        Some(text) => Some(parse_f64_list(text, "q")?),
        None => None,
    };

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for body in &bodies {
        let n = body.dim();
        for spec_text in &l_specs {
            let l = match parse_axis_list(spec_text, n) {
                Ok(l) => l,
                Err(e) => {
                    let mut s = Map::new();
                    s.insert("body".into(), Value::String(body.name().to_string()));
                    s.insert("subspace".into(), Value::String(spec_text.clone()));
                    s.insert("reason".into(), Value::String(e.to_string()));
                    skipped.push(Value::Object(s));
                    continue;
                }
            };
            let k = l.dim();
            let qs = match &explicit_q {
                Some(qs) => qs.clone(),
                None => vec![k as f64 + 1.5, n as f64, n as f64 + 2.0],
            };
            for &q in &qs {
                let spec = args.quad.spec(body, q)?;
                records.push(bounds::verify_body(body, &l, q, Some(&spec))?);
            }
        }
    }

    if let Some(path) = &args.plot_data {
        fs::write(path, io::verification_csv(&records)?)?;
    }

    let failures = records
        .iter()
        .filter(|r| r.pass == Some(false))
        .count();
    let all_pass = failures == 0;

    if args.format == "csv" {
        write_out(args.out.as_deref(), &io::verification_csv(&records)?)?;
    } else {
        let rows: Result<Vec<Value>> = records.iter().map(io::verification_json).collect();
        let mut payload = Map::new();
        payload.insert("records".into(), Value::Array(rows?));
        payload.insert("skipped".into(), Value::Array(skipped));
        payload.insert("failures".into(), Value::Number(failures.into()));
        payload.insert("pass".into(), Value::Bool(all_pass));
        emit_json(
            "verify-bounds",
            reproducible,
            Value::Object(payload),
            args.out.as_deref(),
        )?;
    }
    Ok(if all_pass { 0 } else { 3 })
}

fn cmd_sweep(args: &SweepArgs, reproducible: bool) -> Result<i32> {
    check_format(&args.format)?;
    if args.family != "shifted_cube" {
        return Err(Error::config(format!(
            "unknown family {:?} (expected shifted_cube)",
            args.family
        )));
    }
    if args.steps == 0 {
        return Err(Error::config("a sweep needs at least one step"));
    }
    let dim = args.dim;
    let mut params = Vec::with_capacity(args.steps);
    if args.steps == 1 {
        params.push(args.param_min);
    } else {
        let h = (args.param_max - args.param_min) / (args.steps - 1) as f64;
        for i in 0..args.steps {
            params.push(args.param_min + h * i as f64);
        }
    }
    // Probe body: the family shares one dimension, so the L check and the
    // quadrature spec can be resolved once.
    let probe = generate::shifted_cube(dim, params[0])?;
    let l = args.subspace.resolve(probe.dim())?;
    let spec = args.quad.spec(&probe, args.q)?;
    let report = bounds::tightness_sweep(
        &|t| generate::shifted_cube(dim, t),
        &format!("shifted_cube{dim}"),
        &l,
        args.q,
        &params,
        Some(&spec),
        args.refine,
    )?;
    if args.format == "csv" {
        return write_out(args.out.as_deref(), &io::sweep_csv(&report)?).map(|()| 0);
    }
    let payload = io::sweep_json(&report)?;
    emit_json("sweep", reproducible, payload, args.out.as_deref())?;
    Ok(0)
}

// ---------------------------------------------------------------------------

fn setup_threads() -> Result<()> {
    if let Ok(text) = env::var("DUALCURV_THREADS") {
        let n: usize = text.trim().parse().map_err(|_| {
            Error::config(format!("DUALCURV_THREADS must be a positive integer, got {text:?}"))
        })?;
        if n == 0 {
            return Err(Error::config("DUALCURV_THREADS must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config(format!("could not size the thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<i32> {
    setup_threads()?;
    let reproducible = cli.reproducible;
    match &cli.command {
        Command::Gen(args) => cmd_gen(args, reproducible),
        Command::Gamma(args) => cmd_gamma(args, reproducible),
        Command::Measure(args) => cmd_measure(args, reproducible),
        Command::Ratio(args) => cmd_ratio(args, reproducible),
        Command::Slice(args) => cmd_slice(args, reproducible),
        Command::VerifyDivergence(args) => cmd_verify_divergence(args, reproducible),
        Command::VerifyBounds(args) => cmd_verify_bounds(args, reproducible),
        Command::Sweep(args) => cmd_sweep(args, reproducible),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    process::exit(code);
}
