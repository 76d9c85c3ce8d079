//! Command-line front end: `eval`, `verify`, `expand` and `table`.
//!
//! Exit codes: 0 when everything requested succeeded and passed, 1 when a
//! verification report failed its tolerance, 2 for usage errors, 3 when an
//! evaluation was refused or could not be completed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asymptotics::{c_coeff, c_prime_coeff, expansion, expression_by_S, main_term_I, main_term_M, power_series_I};
use crate::combinatorics::lambda_k;
use crate::context::{to_full_string, PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::polylog::{hurwitz_li0, hurwitz_li1, mpl, mpl_one_var, MultiIndex, PolylogArgs};
use crate::series::{i_integral, m_integral, s_series, t_coeff, zeta_ez_ones, WeightConfig};
use crate::special::{bell_complete, gamma0, stirling_first_unsigned};
use crate::suite::{run_suite, IdentityReport, SuiteOptions, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "mtz", version, about = "Mordell-Tornheim type series, integral analogues and multiple polylogarithms")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Working precision in bits.
    #[arg(long, global = true, env = "MTZ_PRECISION_BITS", default_value_t = 256)]
    bits: u32,
    /// Tolerance override for verification reports.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write JSON output to this file instead of standard output.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write CSV output to this file.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "MTZ_THREADS")]
    threads: Option<usize>,
    /// Record 0 as wall time so that repeated runs give identical output.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a single object.
    Eval(EvalArgs),
    /// Run a named identity suite, or `all`.
    Verify(VerifyArgs),
    /// Print the coefficients of (a+|omega|)^x I_r = r! x^-r + sum c_{r,m} x^(m-r).
    Expand(ExpandArgs),
    /// Sweep an object over a grid of a and x values and emit CSV.
    Table(TableArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Object {
    #[value(name = "M")]
    M,
    #[value(name = "I")]
    I,
    #[value(name = "S")]
    S,
    #[value(name = "T")]
    T,
    #[value(name = "Li")]
    Li,
    #[value(name = "Li0")]
    Li0,
    #[value(name = "Li1")]
    Li1,
    #[value(name = "c")]
    C,
    #[value(name = "cprime", alias = "c'")]
    CPrime,
    #[value(name = "Lambda")]
    Lambda,
    #[value(name = "Bell")]
    Bell,
    #[value(name = "Stirling")]
    Stirling,
    #[value(name = "main-I")]
    MainI,
    #[value(name = "main-M")]
    MainM,
    #[value(name = "I-by-S")]
    IByS,
    #[value(name = "I-series")]
    ISeries,
    #[value(name = "zeta-EZ")]
    ZetaEz,
    #[value(name = "Gamma0")]
    Gamma0,
}

#[derive(Args, Debug, Clone, Default)]
struct Params {
    /// Depth r (checked against the number of weights when both are given).
    #[arg(long)]
    r: Option<usize>,
    /// Weights omega_1,...,omega_r.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    omega: Option<Vec<String>>,
    /// Shift a.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Variable x.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Coefficient index m (also the Stirling row).
    #[arg(long)]
    m: Option<u32>,
    /// Stirling column or power-series index l.
    #[arg(long)]
    l: Option<u32>,
    /// Multi-index k_1,...,k_s (Lambda: a single degree).
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
    /// Polylogarithm arguments z_1,...,z_s.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    z: Option<Vec<String>>,
    /// Bell polynomial order.
    #[arg(long)]
    n: Option<usize>,
    /// Bell polynomial arguments.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xs: Option<Vec<String>>,
    /// Truncation order for expansions.
    #[arg(long)]
    order: Option<u32>,
    /// Evaluate Li as the one-variable function Li_k(1, ..., 1, z).
    #[arg(long)]
    one_var: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(value_enum)]
    object: Object,
    #[command(flatten)]
    params: Params,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name (euler, i1chain, r2m2, r3m3, c_closed_form, crec, s_route, inversion, mzf, order, combinatorics) or `all`.
    suite: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    omega: Option<Vec<String>>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// x values (a ladder for the order suite).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<String>>,
    #[arg(long)]
    order: Option<u32>,
    #[arg(long)]
    k_max: Option<u32>,
    /// Seed for the generated parameter grids.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    omega: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long)]
    order: u32,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(value_enum)]
    object: Object,
    #[arg(long, value_delimiter = ',', required = true)]
    omega: Vec<String>,
    /// One or more shifts.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    a: Vec<String>,
    /// One or more x values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    x: Vec<String>,
    #[arg(long)]
    order: Option<u32>,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(CliError::Numeric(e)) => {
            eprintln!("error: {e}");
            EXIT_DOMAIN
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_DOMAIN
        }
    }
}

enum CliError {
    Numeric(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

fn dispatch(cli: &Cli) -> std::result::Result<i32, CliError> {
    match &cli.command {
        Command::Eval(a) => eval_cmd(&cli.global, a),
        Command::Verify(a) => verify_cmd(&cli.global, a),
        Command::Expand(a) => expand_cmd(&cli.global, a),
        Command::Table(a) => table_cmd(&cli.global, a),
    }
}

fn json_sink(g: &GlobalArgs) -> io::Result<Box<dyn Write>> {
    Ok(match &g.json {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn contexts(g: &GlobalArgs) -> Result<(PrecisionContext, PrecisionContext)> {
    let opts = SuiteOptions { bits: g.bits, ..SuiteOptions::default() };
    Ok((opts.series_ctx()?, opts.quad_ctx()?))
}

fn need<'a, T>(v: &'a Option<T>, name: &str, object: Object) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::out_of_range(format!("{} needs --{name}", object_name(object))))
}

fn weight_config(p: &Params, object: Object, ctx: &PrecisionContext) -> Result<WeightConfig> {
    let om = need(&p.omega, "omega", object)?;
    if let Some(r) = p.r {
        if r != om.len() {
            return Err(Error::out_of_range(format!("--r {r} does not match {} weights", om.len())));
        }
    }
    let a = p.a.clone().unwrap_or_else(|| "0".into());
    let refs: Vec<&str> = om.iter().map(String::as_str).collect();
    WeightConfig::parse(&refs, &a, ctx)
}

fn reals(v: &[String], ctx: &PrecisionContext) -> Result<Vec<Real>> {
    v.iter().map(|s| ctx.parse(s)).collect()
}

#[derive(Serialize)]
struct EvalOutput {
    object: String,
    params: BTreeMap<String, String>,
    value: String,
    method: String,
    precision_bits: u32,
}

fn eval_cmd(g: &GlobalArgs, a: &EvalArgs) -> std::result::Result<i32, CliError> {
    let (sctx, qctx) = contexts(g)?;
    let (value, method) = evaluate(a.object, &a.params, &sctx, &qctx)?;
    let out = EvalOutput {
        object: object_name(a.object),
        params: params_map(&a.params),
        value,
        method: method.to_string(),
        precision_bits: g.bits,
    };
    let mut sink = json_sink(g)?;
    serde_json::to_writer(&mut sink, &out)?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(EXIT_OK)
}

fn object_name(o: Object) -> String {
    o.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn params_map(p: &Params) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let join = |v: &Vec<String>| v.join(",");
    if let Some(v) = p.r {
        m.insert("r".into(), v.to_string());
    }
    if let Some(v) = &p.omega {
        m.insert("omega".into(), join(v));
    }
    if let Some(v) = &p.a {
        m.insert("a".into(), v.clone());
    }
    if let Some(v) = &p.x {
        m.insert("x".into(), v.clone());
    }
    if let Some(v) = p.m {
        m.insert("m".into(), v.to_string());
    }
    if let Some(v) = p.l {
        m.insert("l".into(), v.to_string());
    }
    if let Some(v) = &p.k {
        m.insert("k".into(), v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
    }
    if let Some(v) = &p.z {
        m.insert("z".into(), join(v));
    }
    if let Some(v) = p.n {
        m.insert("n".into(), v.to_string());
    }
    if let Some(v) = &p.xs {
        m.insert("xs".into(), join(v));
    }
    if let Some(v) = p.order {
        m.insert("order".into(), v.to_string());
    }
    if p.one_var {
        m.insert("one_var".into(), "true".into());
    }
    m
}

fn evaluate(object: Object, p: &Params, sctx: &PrecisionContext, qctx: &PrecisionContext) -> Result<(String, &'static str)> {
    let x = |ctx: &PrecisionContext| -> Result<Real> { ctx.parse(need(&p.x, "x", object)?) };
    let full = |v: Real| to_full_string(&v);
    Ok(match object {
        Object::M => (full(m_integral(&x(qctx)?, &weight_config(p, object, qctx)?, qctx)?), "double-exponential quadrature of the log(1-e^-t) representation"),
        Object::I => (full(i_integral(&x(qctx)?, &weight_config(p, object, qctx)?, qctx)?), "double-exponential quadrature of the incomplete-gamma representation"),
        Object::S => {
            let om = reals(need(&p.omega, "omega", object)?, sctx)?;
            (full(s_series(&x(sctx)?, &om, sctx)?), "degree-grouped series with tail bound")
        }
        Object::T => {
            let om = reals(need(&p.omega, "omega", object)?, sctx)?;
            let l = *need(&p.l, "l", object)?;
            (full(t_coeff(om.len(), l, &om, sctx)?), "Stirling-weighted double sum with geometric tail bound")
        }
        Object::Li | Object::Li0 | Object::Li1 => {
            let k = MultiIndex::new(need(&p.k, "k", object)?.clone())?;
            let z = reals(need(&p.z, "z", object)?, sctx)?;
            if object == Object::Li && p.one_var {
                if z.len() != 1 {
                    return Err(Error::out_of_range("--one-var takes a single --z"));
                }
                return Ok((full(mpl_one_var(&k, &z[0], sctx)?), "one-variable nested sum"));
            }
            let args = PolylogArgs::new(k, z)?;
            match object {
                Object::Li => (full(mpl(&args, sctx)?), "nested sum with geometric tail bound"),
                Object::Li0 => (full(hurwitz_li0(&x(sctx)?, &args, sctx)?), "shifted nested sum from n_1 >= 0"),
                _ => (full(hurwitz_li1(&x(sctx)?, &args, sctx)?), "shifted nested sum from n_1 >= 1"),
            }
        }
        Object::C => {
            let w = weight_config(p, object, sctx)?;
            (full(c_coeff(w.r(), *need(&p.m, "m", object)?, &w, sctx)?), "polylogarithm sum over compositions and subset families")
        }
        Object::CPrime => {
            let w = weight_config(p, object, sctx)?;
            (full(c_prime_coeff(w.r(), *need(&p.m, "m", object)?, &w, sctx)?), "Bell-polynomial closed form")
        }
        Object::Lambda => {
            let om = reals(need(&p.omega, "omega", object)?, sctx)?;
            let k = need(&p.k, "k", object)?;
            if k.len() != 1 {
                return Err(Error::out_of_range("Lambda takes a single --k"));
            }
            (full(lambda_k(&om, k[0] as usize, sctx)?), "elementary symmetric recurrence on log omega")
        }
        Object::Bell => {
            let n = *need(&p.n, "n", object)?;
            let xs = reals(need(&p.xs, "xs", object)?, sctx)?;
            (full(bell_complete(n, &xs, sctx)?), "Bell recurrence")
        }
        Object::Stirling => {
            let v = stirling_first_unsigned(*need(&p.m, "m", object)?, *need(&p.l, "l", object)?)?;
            (v.to_string(), "exact integer recurrence")
        }
        Object::MainI => (full(main_term_I(&x(sctx)?, &weight_config(p, object, sctx)?, sctx)?), "leading terms in 1/x"),
        Object::MainM => (full(main_term_M(&x(sctx)?, &weight_config(p, object, sctx)?, sctx)?), "leading terms in 1/x"),
        Object::IByS => (full(expression_by_S(&x(sctx)?, &weight_config(p, object, sctx)?, sctx)?), "S_r series with log-gamma jets"),
        Object::ISeries => {
            let w = weight_config(p, object, sctx)?;
            let order = *need(&p.order, "order", object)?;
            (full(power_series_I(&x(sctx)?, &w, order, sctx)?), "truncated polylogarithm expansion")
        }
        Object::ZetaEz => {
            let r = *need(&p.r, "r", object)?;
            (full(zeta_ez_ones(r, &x(qctx)?, qctx)?), "direct head sum and Euler-Maclaurin tail")
        }
        Object::Gamma0 => {
            let u = sctx.parse(need(&p.x, "x", object)?)?;
            (full(gamma0(&u, sctx)?), "series for small u, continued fraction for large u")
        }
    })
}

fn verify_cmd(g: &GlobalArgs, a: &VerifyArgs) -> std::result::Result<i32, CliError> {
    let opts = SuiteOptions {
        bits: g.bits,
        tol: g.tol,
        timing: !g.no_timing,
        seed: a.seed,
        omega: a.omega.clone(),
        a: a.a.clone(),
        x: a.x.clone(),
        order: a.order,
        k_max: a.k_max,
    };
    let reports = run_suite(&a.suite, &opts)?;
    let mut sink = json_sink(g)?;
    for r in &reports {
        serde_json::to_writer(&mut sink, r)?;
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    if let Some(path) = &g.csv {
        write_reports_csv(path, &reports)?;
    }
    let failed: Vec<&IdentityReport> = reports.iter().filter(|r| !r.passed).collect();
    eprintln!("{} reports, {} passed, {} failed", reports.len(), reports.len() - failed.len(), failed.len());
    for f in &failed {
        eprintln!(
            "FAILED {} {:?}: residual {} > tolerance {}",
            f.identity_id, f.params, f.residual, f.tolerance
        );
    }
    Ok(if failed.is_empty() { EXIT_OK } else { EXIT_FAILED })
}

fn write_reports_csv(path: &PathBuf, reports: &[IdentityReport]) -> std::result::Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["identity_id", "params", "lhs", "rhs", "residual", "tolerance", "passed", "wall_time_ms", "method"])?;
    for r in reports {
        let params = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        w.write_record([
            r.identity_id.as_str(),
            &params,
            &r.lhs,
            &r.rhs,
            &r.residual,
            &r.tolerance,
            if r.passed { "true" } else { "false" },
            &r.wall_time_ms.to_string(),
            &r.method,
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ExpansionRow {
    m: u32,
    power: i64,
    coeff: String,
}

fn expand_cmd(g: &GlobalArgs, a: &ExpandArgs) -> std::result::Result<i32, CliError> {
    let (ctx, _) = contexts(g)?;
    let p = Params { r: a.r, omega: Some(a.omega.clone()), a: Some(a.a.clone()), ..Params::default() };
    let w = weight_config(&p, Object::C, &ctx)?;
    let e = expansion(&w, a.order, &ctx)?;
    let rows: Vec<ExpansionRow> = e
        .powers
        .iter()
        .zip(&e.coeffs)
        .enumerate()
        .map(|(m, (p, c))| ExpansionRow { m: m as u32, power: *p, coeff: to_full_string(c) })
        .collect();
    if let Some(path) = &g.csv {
        let mut w = csv::Writer::from_path(path)?;
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    if g.json.is_some() {
        let mut sink = json_sink(g)?;
        for r in &rows {
            serde_json::to_writer(&mut sink, r)?;
            sink.write_all(b"\n")?;
        }
        sink.flush()?;
    } else {
        let mut out = io::stdout().lock();
        writeln!(out, "m\tpower\tcoeff")?;
        for r in &rows {
            writeln!(out, "{}\t{}\t{}", r.m, r.power, r.coeff)?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TableRow {
    object: String,
    omega: String,
    a: String,
    x: String,
    value: String,
}

fn table_cmd(g: &GlobalArgs, t: &TableArgs) -> std::result::Result<i32, CliError> {
    let (sctx, qctx) = contexts(g)?;
    let mut rows = Vec::new();
    for a in &t.a {
        for x in &t.x {
            let p = Params {
                omega: Some(t.omega.clone()),
                a: Some(a.clone()),
                x: Some(x.clone()),
                order: t.order,
                ..Params::default()
            };
            let (value, _) = evaluate(t.object, &p, &sctx, &qctx)?;
            rows.push(TableRow {
                object: object_name(t.object),
                omega: t.omega.join(","),
                a: a.clone(),
                x: x.clone(),
                value,
            });
        }
    }
    let sink: Box<dyn Write> = match &g.csv {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}
