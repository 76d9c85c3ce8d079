//! Named identity suites and the report format they emit.
//!
//! A suite turns a parameter grid into jobs. Each job evaluates two sides
//! through different code paths and becomes one [`IdentityReport`]. Jobs run
//! on a rayon pool; reports come back sorted by `(identity_id, params)`.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    c_coeff, c_prime_coeff, expansion, expression_by_S, i1_expansion, main_term_I, main_term_M, power_series_I,
};
use crate::combinatorics::{compositions, disjoint_subset_families, weak_compositions, Composition};
use crate::context::{factorial, powu, to_full_string, to_sig_digits, PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::polylog::{mpl, mpl_one_var, MultiIndex, PolylogArgs};
use crate::series::{i_integral, m_integral, zeta_ez_ones, WeightConfig};
use crate::special::{bell_complete_rational, binomial, euler_gamma, gamma, stirling_first_unsigned, zeta_value};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_QUAD_TOL: f64 = 1e-9;
pub const ORDER_MARGIN: f64 = 0.2;
pub const DEFAULT_SEED: u64 = 20240607;

pub const SUITES: &[&str] = &[
    "euler",
    "i1chain",
    "r2m2",
    "r3m3",
    "c_closed_form",
    "crec",
    "s_route",
    "inversion",
    "mzf",
    "order",
    "combinatorics",
];

/// One verified (or refuted) identity instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub schema_version: u32,
    pub identity_id: String,
    pub params: BTreeMap<String, String>,
    pub lhs: String,
    pub rhs: String,
    pub residual: String,
    pub tolerance: String,
    pub passed: bool,
    pub wall_time_ms: u64,
    pub method: String,
}

/// Default tolerance for identities between two series evaluations.
pub fn default_series_tol(bits: u32) -> f64 {
    1e-30f64.max(2f64.powi(32 - bits as i32))
}

/// Settings shared by every suite in one run.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub bits: u32,
    /// Overrides the numeric tolerance of every identity (not order margins
    /// or exact checks).
    pub tol: Option<f64>,
    pub timing: bool,
    pub seed: u64,
    pub omega: Option<Vec<String>>,
    pub a: Option<String>,
    pub x: Option<Vec<String>>,
    pub order: Option<u32>,
    pub k_max: Option<u32>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            bits: crate::context::DEFAULT_PRECISION_BITS,
            tol: None,
            timing: true,
            seed: DEFAULT_SEED,
            omega: None,
            a: None,
            x: None,
            order: None,
            k_max: None,
        }
    }
}

impl SuiteOptions {
    pub fn series_ctx(&self) -> Result<PrecisionContext> {
        PrecisionContext::new(self.bits)
    }

    /// Context for quadrature-based evaluators: a tolerance of `1e-20`, or
    /// the smallest one the precision allows.
    pub fn quad_ctx(&self) -> Result<PrecisionContext> {
        let floor = 2f64.powi(16 - self.bits as i32);
        PrecisionContext::new(self.bits)?.with_target_tol(1e-20f64.max(floor * 4.0))
    }

    fn series_tol(&self) -> f64 {
        self.tol.unwrap_or_else(|| default_series_tol(self.bits))
    }

    fn quad_tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn has_overrides(&self) -> bool {
        self.omega.is_some() || self.a.is_some() || self.x.is_some() || self.order.is_some() || self.k_max.is_some()
    }
}

enum Outcome {
    Numeric(Real, Real),
    Exact(Rational, Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    /// `|lhs - rhs| <= tol`.
    Equal,
    /// `lhs >= rhs - tol`; the residual is `max(0, rhs - lhs)`.
    AtLeast,
}

type JobFn = Box<dyn Fn() -> Result<Outcome> + Send + Sync>;

struct Job {
    id: String,
    params: BTreeMap<String, String>,
    method: String,
    tol: f64,
    check: Check,
    run: JobFn,
}

impl Job {
    fn new(id: &str, params: &[(&str, String)], method: &str, tol: f64, run: JobFn) -> Job {
        Job {
            id: id.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            method: method.to_string(),
            tol,
            check: Check::Equal,
            run,
        }
    }

    fn at_least(mut self) -> Job {
        self.check = Check::AtLeast;
        self
    }
}

fn execute(job: &Job, timing: bool) -> Result<IdentityReport> {
    let start = Instant::now();
    let outcome = (job.run)()?;
    let ms = if timing { start.elapsed().as_millis() as u64 } else { 0 };
    let (lhs, rhs, residual, passed) = match outcome {
        Outcome::Numeric(l, r) => {
            let prec = l.prec().max(r.prec());
            let diff = Float::with_val(prec, &l - &r);
            let res = match job.check {
                Check::Equal => diff.abs(),
                Check::AtLeast => {
                    let neg = -diff;
                    if neg > 0 {
                        neg
                    } else {
                        Float::new(prec)
                    }
                }
            };
            let tol = Float::with_val(prec, job.tol);
            let passed = res.is_finite() && res <= tol;
            (to_full_string(&l), to_full_string(&r), to_sig_digits(&res, 20), passed)
        }
        Outcome::Exact(l, r) => {
            let diff = Rational::from(&l - &r).abs();
            let res = Float::with_val(128, &diff);
            let passed = diff == 0;
            (l.to_string(), r.to_string(), to_sig_digits(&res, 20), passed)
        }
    };
    Ok(IdentityReport {
        schema_version: SCHEMA_VERSION,
        identity_id: job.id.clone(),
        params: job.params.clone(),
        lhs,
        rhs,
        residual,
        tolerance: format!("{:e}", job.tol),
        passed,
        wall_time_ms: ms,
        method: job.method.clone(),
    })
}

fn run_jobs(jobs: Vec<Job>, timing: bool) -> Result<Vec<IdentityReport>> {
    let results: Vec<Result<IdentityReport>> = jobs.par_iter().map(|j| execute(j, timing)).collect();
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        reports.push(r?);
    }
    reports.sort_by(|a, b| (&a.identity_id, &a.params).cmp(&(&b.identity_id, &b.params)));
    Ok(reports)
}

/// Run one named suite, or `all`.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<Vec<IdentityReport>> {
    if name == "all" {
        if opts.has_overrides() {
            return Err(Error::out_of_range("parameter overrides need a single named suite, not `all`"));
        }
        let mut jobs = Vec::new();
        for s in SUITES {
            jobs.extend(suite_jobs(s, opts)?);
        }
        return run_jobs(jobs, opts.timing);
    }
    run_jobs(suite_jobs(name, opts)?, opts.timing)
}

fn suite_jobs(name: &str, opts: &SuiteOptions) -> Result<Vec<Job>> {
    match name {
        "euler" => euler_jobs(opts),
        "i1chain" => i1chain_jobs(opts),
        "r2m2" => r2m2_jobs(opts),
        "r3m3" => r3m3_jobs(opts),
        "c_closed_form" => c_closed_form_jobs(opts),
        "crec" => crec_jobs(opts),
        "s_route" => s_route_jobs(opts),
        "inversion" => inversion_jobs(opts),
        "mzf" => mzf_jobs(opts),
        "order" => order_jobs(opts),
        "combinatorics" => combinatorics_jobs(opts),
        other => Err(Error::out_of_range(format!(
            "unknown suite `{other}`; known suites: {}, all",
            SUITES.join(", ")
        ))),
    }
}

// ---------------------------------------------------------------- grids

fn tenths(n: u32) -> String {
    format!("{}", n as f64 / 10.0)
}

fn random_omega(rng: &mut ChaCha8Rng, r: usize) -> Vec<String> {
    (0..r).map(|_| tenths(rng.gen_range(2..=30))).collect()
}

fn random_a(rng: &mut ChaCha8Rng) -> String {
    tenths(rng.gen_range(0..=30))
}

type Config = (Vec<String>, String);

/// The override configuration when it has `r` weights, otherwise `defaults`.
fn configs(opts: &SuiteOptions, r: Option<usize>, defaults: Vec<Config>) -> Result<Vec<Config>> {
    match (&opts.omega, &opts.a) {
        (None, None) => Ok(defaults),
        (om, a) => {
            let om = match om {
                Some(o) => o.clone(),
                None => defaults[0].0.clone(),
            };
            if let Some(r) = r {
                if om.len() != r {
                    return Err(Error::out_of_range(format!("this suite needs {r} weights, got {}", om.len())));
                }
            }
            let a = a.clone().unwrap_or_else(|| defaults[0].1.clone());
            Ok(vec![(om, a)])
        }
    }
}

fn cfg_params(om: &[String], a: &str) -> Vec<(&'static str, String)> {
    vec![("omega", om.join(",")), ("a", a.to_string())]
}

fn x_values(opts: &SuiteOptions, defaults: &[&str]) -> Vec<String> {
    match &opts.x {
        Some(x) => x.clone(),
        None => defaults.iter().map(|s| s.to_string()).collect(),
    }
}

fn weights(om: &[String], a: &str, ctx: &PrecisionContext) -> Result<WeightConfig> {
    let refs: Vec<&str> = om.iter().map(String::as_str).collect();
    WeightConfig::parse(&refs, a, ctx)
}

fn li(ctx: &PrecisionContext, k: &[u32], z: Vec<Real>) -> Result<Real> {
    mpl(&PolylogArgs::new(MultiIndex::new(k.to_vec())?, z)?, ctx)
}

fn ratio(prec: u32, num: &Real, den: &Real) -> Real {
    Float::with_val(prec, num / den)
}

// ---------------------------------------------------------------- suites

fn euler_jobs(opts: &SuiteOptions) -> Result<Vec<Job>> {
    let cfgs = configs(opts, Some(1), vec![(vec!["1".into()], "0".into())])?;
    let xs = x_values(opts, &["1e-2", "1e-3", "1e-4"]);
    let mut jobs = Vec::new();
    for (om, a) in cfgs {
        for x in &xs {
            let ctx = opts.quad_ctx()?;
            let xv = ctx.parse(x)?;
            let tol = opts.tol.unwrap_or(5.0 * xv.to_f64());
            let (om2, a2) = (om.clone(), a.clone());
            let mut params = cfg_params(&om, &a);
            params.push(("x", x.clone()));
            jobs.push(Job::new(
                "euler_constant",
                &params,
                "lhs: M_1 - 1/x by quadrature of the log(1-e^-t) integral; rhs: gamma - log(omega) from MPFR constants",
                tol,
                Box::new(move || {
                    let w = weights(&om2, &a2, &ctx)?;
                    let m = m_integral(&xv, &w, &ctx)?;
                    let lhs = m - Float::with_val(ctx.prec(), xv.recip_ref());
                    let rhs = euler_gamma(&ctx) - Float::with_val(ctx.prec(), w.omega()[0].ln_ref());
                    Ok(Outcome::Numeric(lhs, rhs))
                }),
            ));
        }
    }
    Ok(jobs)
}

fn i1chain_jobs(opts: &SuiteOptions) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    let order = opts.order.unwrap_or(25);
    let cfgs = configs(opts, Some(1), vec![(vec!["1".into()], "2".into())])?;
    let xs = x_values(opts, &["0.3"]);
    for (om, a) in &cfgs {
        for x in &xs {
            let ctx = opts.quad_ctx()?;
            let (om2, a2, xv) = (om.clone(), a.clone(), ctx.parse(x)?);
            let mut params = cfg_params(om, a);
            params.push(("x", x.clone()));
            params.push(("order", order.to_string()));
            jobs.push(Job::new(
                "i1_power_series",
                &params,
                "lhs: (a+omega)^x I_1 by incomplete-gamma quadrature; rhs: truncated polylogarithm expansion",
                opts.quad_tol(1e-10),
                Box::new(move || {
                    let w = weights(&om2, &a2, &ctx)?;
                    let i = i_integral(&xv, &w, &ctx)?;
                    let s = Float::with_val(ctx.prec(), w.a() + w.total());
                    let lhs = i * Float::with_val(ctx.prec(), rug::ops::Pow::pow(&s, &xv));
                    let rhs = expansion(&w, order, &ctx)?.eval(&xv);
                    Ok(Outcome::Numeric(lhs, rhs))
                }),
            ));
        }
    }
    let k = opts.order.unwrap_or(15);
    let cfgs = configs(opts, Some(1), vec![(vec!["1".into()], "3".into())])?;
    let xs = x_values(opts, &["0.2"]);
    for (om, a) in &cfgs {
        for x in &xs {
            let ctx = opts.quad_ctx()?;
            let (om2, a2, xv) = (om.clone(), a.clone(), ctx.parse(x)?);
            let mut params = cfg_params(om, a);
            params.push(("x", x.clone()));
            params.push(("order", k.to_string()));
            jobs.push(Job::new(
                "i1_s_expansion",
                &params,
                "lhs: a^x I_1 by incomplete-gamma quadrature; rhs: expansion in Li_{1,...,1,2}(-omega/a) and zeta values",
                opts.quad_tol(1e-10),
                Box::new(move || {
                    let w = weights(&om2, &a2, &ctx)?;
                    let i = i_integral(&xv, &w, &ctx)?;
                    let lhs = i * Float::with_val(ctx.prec(), rug::ops::Pow::pow(w.a(), &xv));
                    let rhs = i1_expansion(&xv, &w.omega()[0], w.a(), k, &ctx)?;
                    Ok(Outcome::Numeric(lhs, rhs))
                }),
            ));
        }
    }
    Ok(jobs)
}

/// Both sides of the weight-2 relation for `r = m = 2`.
pub fn r2m2_sides(w: &WeightConfig, ctx: &PrecisionContext) -> Result<(Real, Real)> {
    if w.r() != 2 {
        return Err(Error::out_of_range("the r = m = 2 identity needs two weights"));
    }
    let prec = ctx.prec();
    let s = Float::with_val(prec, w.a() + w.total());
    let a = w.a();
    let mut lhs = ctx.zero();
    for j in 0..2 {
        let aj = Float::with_val(prec, a + &w.omega()[j]);
        lhs -= li(ctx, &[2], vec![ratio(prec, &aj, &s)])?;
        lhs += li(ctx, &[1, 1], vec![ratio(prec, a, &aj), ratio(prec, &aj, &s)])?;
    }
    lhs += li(ctx, &[2], vec![ratio(prec, a, &s)])? * 2u32;
    let l1 = ratio(prec, &w.omega()[0], &s).ln();
    let l2 = ratio(prec, &w.omega()[1], &s).ln();
    let rhs = l1 * l2 - Float::with_val(prec, ctx.pi().square_ref()) / 6u32;
    Ok((lhs, rhs))
}

fn r2m2_jobs(opts: &SuiteOptions) -> Result<Vec<Job>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x22);
    let mut defaults: Vec<Config> = vec![
        (vec!["1".into(), "1".into()], "0".into()),
        (vec!["2".into(), "3".into()], "1".into()),
    ];
    for _ in 0..3 {
        defaults.push((random_omega(&mut rng, 2), random_a(&mut rng)));
    }
    let tol = opts.series_tol();
    let mut jobs = Vec::new();
    for (om, a) in configs(opts, Some(2), defaults)? {
        let ctx = opts.series_ctx()?;
        let params = cfg_params(&om, &a);
        jobs.push(Job::new(
            "r2m2",
            &params,
            "lhs: nested-sum multiple polylogarithms; rhs: logarithms and pi^2/6",
            tol,
            Box::new(move || {
                let w = weights(&om, &a, &ctx)?;
                let (l, r) = r2m2_sides(&w, &ctx)?;
                Ok(Outcome::Numeric(l, r))
            }),
        ));
    }
    Ok(jobs)
}

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Both sides of the weight-3 relation for `r = m = 3`.
pub fn r3m3_sides(w: &WeightConfig, ctx: &PrecisionContext) -> Result<(Real, Real)> {
    if w.r() != 3 {
        return Err(Error::out_of_range("the r = m = 3 identity needs three weights"));
    }
    let prec = ctx.prec();
    let om = w.omega();
    let a = w.a();
    let s = Float::with_val(prec, a + w.total());
    let mut lhs = ctx.zero();
    for i in 0..3 {
        let drop = Float::with_val(prec, &s - &om[i]);
        let ai = Float::with_val(prec, a + &om[i]);
        lhs += li(ctx, &[3], vec![ratio(prec, &drop, &s)])? * 2u32;
        lhs -= li(ctx, &[3], vec![ratio(prec, &ai, &s)])? * 4u32;
        lhs += li(ctx, &[1, 2], vec![ratio(prec, a, &ai), ratio(prec, &ai, &s)])? * 2u32;
        lhs += li(ctx, &[2, 1], vec![ratio(prec, a, &drop), ratio(prec, &drop, &s)])? * 2u32;
    }
    lhs += li(ctx, &[3], vec![ratio(prec, a, &s)])? * 6u32;
    for p in PERMS3 {
        let a1 = Float::with_val(prec, a + &om[p[0]]);
        let a12 = Float::with_val(prec, &a1 + &om[p[1]]);
        let z = vec![ratio(prec, &a1, &a12), ratio(prec, &a12, &s)];
        lhs -= li(ctx, &[1, 2], z.clone())?;
        lhs -= li(ctx, &[2, 1], z)?;
        let z3 = vec![ratio(prec, a, &a1), ratio(prec, &a1, &a12), ratio(prec, &a12, &s)];
        lhs += li(ctx, &[1, 1, 1], z3)?;
    }
    let logs: Vec<Real> = om.iter().map(|v| ratio(prec, v, &s).ln()).collect();
    let mut rhs = -Float::with_val(prec, &logs[0] * &logs[1]) * &logs[2];
    let sum_logs = Float::with_val(prec, &logs[0] + &logs[1]) + &logs[2];
    rhs += Float::with_val(prec, ctx.pi().square_ref()) / 6u32 * sum_logs;
    rhs += zeta_value(3, ctx)? * 2u32;
    Ok((lhs, rhs))
}

fn r3m3_jobs(opts: &SuiteOptions) -> Result<Vec<Job>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x33);
    let defaults: Vec<Config> = vec![
        (vec!["1".into(), "1".into(), "1".into()], "0".into()),
        (vec!["1".into(), "2".into(), "3".into()], "1".into()),
        (random_omega(&mut rng, 3), random_a(&mut rng)),
    ];
    let tol = opts.series_tol();
    let mut jobs = Vec::new();
    for (om, a) in configs(opts, Some(3), defaults)? {
        let ctx = opts.series_ctx()?;
        jobs.push(Job::new(
            "r3m3",
            &cfg_params(&om, &a),
            "lhs: nested-sum multiple polylogarithms over S_3; rhs: logarithms, pi^2/6 and zeta(3)",
            tol,
            Box::new(move || {
                let w = weights(&om, &a, &ctx)?;
                let (l, r) = r3m3_sides(&w, &ctx)?;
                Ok(Outcome::Numeric(l, r))
            }),
        ));
    }
    Ok(jobs)
}

fn random_configs(seed: u64, r: usize, n: usize) -> Vec<Config> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (random_omega(&mut rng, r), random_a(&mut rng))).collect()
}

fn c_closed_form_jobs(opts: &SuiteOptions) -> Result<Vec<Job>> {
    let tol = opts.series_tol();
    let mut jobs = Vec::new();
    let grid: Vec<Config> = match &opts.omega {
        Some(_) => configs(opts, None, vec![(vec!["1".into()], "1".into())])?,
        None => {
            let mut g = vec![(vec!["1".to_string(), "1".to_string()], "0".to_string())];
            for r in 1..=3 {
                g.extend(random_configs(opts.seed ^ (0x62 + r as u64), r, 3));
            }
            g
        }
    };
    for (om, a) in grid {
        let r = om.len();
        for m in 1..=r as u32 {
            let ctx = opts.series_ctx()?;
            let (om2, a2) = (om.clone(), a.clone());
            let mut params = cfg_params(&om, &a);
            params.push(("r", r.to_string()));
            params.push(("m", m.to_string()));
            jobs.push(Job::new(
                "c_closed_form",
                &params,
                "lhs: c_{r,m} from the polylogarithm triple sum; rhs: c'_{r,m} from Bell polynomials and logarithms",
                tol,
                Box::new(move || {
                    let w = weights(&om2, &a2, &ctx)?;
                    Ok(Outcome::Numeric(c_coeff(r, m, &w, &ctx)?, c_prime_coeff(r, m, &w, &ctx)?))
                }),
            ));
        }
    }
    Ok(jobs)
}

fn crec_jobs(opts: &SuiteOptions) -> Result<Vec<Job>> {
    let tol = opts.series_tol();
    let mut jobs = Vec::new();
    let pairs: [(usize, u32); 3] = [(2, 1), (3, 1), (3, 2)];
    for (r, m) in pairs {
        let grid = match &opts.omega {
            Some(om) if om.len() != r => continue,
            Some(_) => configs(opts, Some(r), vec![(vec!["1".into(); r], "1".into())])?,
            None => random_configs(opts.seed ^ (0xc0 + 10 * r as u64 + m as u64), r, 3),
        };
        for (om, a) in grid {
            for prime in [false, true] {
                let ctx = opts.series_ctx()?;
                let (om2, a2) = (om.clone(), a.clone());
                let mut params = cfg_params(&om, &a);
                params.push(("r", r.to_string()));
                params.push(("m", m.to_string()));
                let (id, method) = if prime {
                    ("c_prime_recurrence", "lhs: c'_{r,m} closed form; rhs: sum of c'_{r-1,m} with one weight moved into a")
                } else {
                    ("c_recurrence", "lhs: c_{r,m} triple sum; rhs: sum of c_{r-1,m} triple sums with one weight moved into a")
                };
                jobs.push(Job::new(
                    id,
                    &params,
                    method,
                    tol,
                    Box::new(move || {
                        let w = weights(&om2, &a2, &ctx)?;
                        let f = |v: &WeightConfig, rr: usize| {
                            if prime {
                                c_prime_coeff(rr, m, v, &ctx)
                            } else {
                                c_coeff(rr, m, v, &ctx)
                            }
                        };
                        let lhs = f(&w, r)?;
                        let mut rhs = ctx.zero();
                        for i in 0..r {
                            let v = w.without(i).ok_or_else(|| Error::out_of_range("recurrence needs r >= 2"))?;
                            rhs += f(&v, r - 1)?;
                        }
                        Ok(Outcome::Numeric(lhs, rhs))
                    }),
                ));
            }
        }
    }
    if jobs.is_empty() {
        return Err(Error::out_of_range("the recurrence suite needs 2 or 3 weights"));
    }
    Ok(jobs)
}

fn s_route_jobs(opts: &SuiteOptions) -> Result<Vec<Job>> {
    let defaults: Vec<Config> = vec![
        (vec!["1".into()], "3".into()),
        (vec!["0.5".into()], "2".into()),
        (vec!["0.4".into(), "0.5".into()], "2".into()),
        (vec!["0.3".into(), "0.9".into()], "1.5".into()),
    ];
    let xs = x_values(opts, &["0.35", "0.7"]);
    let tol = opts.quad_tol(DEFAULT_QUAD_TOL);
    let mut jobs = Vec::new();
    for (om, a) in configs(opts, None, defaults)? {
        for x in &xs {
            let sctx = opts.series_ctx()?;
            let qctx = opts.quad_ctx()?;
            let (om2, a2, xs2) = (om.clone(), a.clone(), x.clone());
            let mut params = cfg_params(&om, &a);
            params.push(("x", x.clone()));
            jobs.push(Job::new(
                "s_route",
                &params,
                "lhs: S_r series with log-gamma jets over all (A,B,C); rhs: I_r by incomplete-gamma quadrature",
                tol,
                Box::new(move || {
                    let w = weights(&om2, &a2, &sctx)?;
                    let xv = sctx.parse(&xs2)?;
                    let lhs = expression_by_S(&xv, &w, &sctx)?;
                    let rhs = i_integral(&xv, &w, &qctx)?;
                    Ok(Outcome::Numeric(lhs, rhs))
                }),
            ));
        }
    }
    Ok(jobs)
}

/// Both sides of the two conversions between `Li_{1,...,1,2}(-w/a)` and
/// `Li_{j+1}(a/(a+w))`, for `0 < w < a`. Returns
/// `((lhs_i, rhs_i), (lhs_ii, rhs_ii))`.
pub fn inversion_sides(k: u32, omega: &Real, a: &Real, ctx: &PrecisionContext) -> Result<((Real, Real), (Real, Real))> {
    if !(*omega > 0 && omega < a) {
        return Err(Error::domain("the inversion formulas need 0 < omega < a"));
    }
    if k == 0 {
        return Err(Error::out_of_range("the inversion formulas need k >= 1"));
    }
    let prec = ctx.prec();
    let apw = Float::with_val(prec, a + omega);
    let big_l = ratio(prec, a, &apw).ln();
    let q = ratio(prec, a, &apw);
    let z = -ratio(prec, omega, a);
    // P_j = Li_{1^(j-1),2}(-w/a) + (-1)^(j+1) zeta(j+1)
    let p = |j: u32| -> Result<Real> {
        let v = mpl_one_var(&MultiIndex::ones_then(j as usize - 1, 2)?, &z, ctx)?;
        let zeta = zeta_value(j + 1, ctx)?;
        Ok(if j % 2 == 1 { v + zeta } else { v - zeta })
    };
    let lead = -powu(&big_l, k + 1) / factorial(k + 1, prec);

    let lhs_i = p(k)?;
    let mut rhs_i = lead.clone();
    for j in 0..=k {
        let mut t = powu(&big_l, k - j) / factorial(k - j, prec) * li(ctx, &[j + 1], vec![q.clone()])?;
        if j % 2 == 0 {
            t = -t;
        }
        rhs_i += t;
    }

    let lhs_ii = li(ctx, &[k + 1], vec![q.clone()])?;
    let mut rhs_ii = lead;
    rhs_ii += ratio(prec, a, omega).ln() * powu(&big_l, k) / factorial(k, prec);
    for j in 1..=k {
        let mut t = powu(&big_l, k - j) / factorial(k - j, prec) * p(j)?;
        if j % 2 == 0 {
            t = -t;
        }
        rhs_ii += t;
    }
    Ok(((lhs_i, rhs_i), (lhs_ii, rhs_ii)))
}

fn inversion_jobs(opts: &SuiteOptions) -> Result<Vec<Job>> {
    let k_max = opts.k_max.unwrap_or(5);
    let defaults: Vec<Config> = vec![(vec!["1".into()], "3".into()), (vec!["0.7".into()], "1.1".into())];
    let tol = opts.series_tol();
    let mut jobs = Vec::new();
    for (om, a) in configs(opts, Some(1), defaults)? {
        for k in 1..=k_max {
            for second in [false, true] {
                let ctx = opts.series_ctx()?;
                let (om2, a2) = (om.clone(), a.clone());
                let mut params = cfg_params(&om, &a);
                params.push(("k", k.to_string()));
                let (id, method) = if second {
                    ("inversion_li", "lhs: Li_{k+1}(a/(a+omega)) nested sum; rhs: logarithms, Li_{1,...,1,2}(-omega/a) and zeta values")
                } else {
                    ("inversion_li112", "lhs: Li_{1,...,1,2}(-omega/a) one-variable nested sum plus zeta; rhs: logarithms and Li_{j+1}(a/(a+omega))")
                };
                jobs.push(Job::new(
                    id,
                    &params,
                    method,
                    tol,
                    Box::new(move || {
                        let w = weights(&om2, &a2, &ctx)?;
                        let (i, ii) = inversion_sides(k, &w.omega()[0], w.a(), &ctx)?;
                        let (l, r) = if second { ii } else { i };
                        Ok(Outcome::Numeric(l, r))
                    }),
                ));
            }
        }
    }
    Ok(jobs)
}

fn mzf_jobs(opts: &SuiteOptions) -> Result<Vec<Job>> {
    let xs = x_values(opts, &["0.5", "1"]);
    let tol = opts.quad_tol(DEFAULT_QUAD_TOL);
    let mut jobs = Vec::new();
    for r in 1..=3usize {
        for x in &xs {
            let ctx = opts.quad_ctx()?;
            let xv = ctx.parse(x)?;
            let params = vec![("r", r.to_string()), ("x", x.clone())];
            jobs.push(Job::new(
                "mzf",
                &params,
                "lhs: M_r(x; 1,...,1, 0) by log(1-e^-t) quadrature; rhs: r! zeta_EZ(1,...,1,x+1) by Euler-Maclaurin",
                tol,
                Box::new(move || {
                    let w = WeightConfig::new(vec![ctx.one(); r], ctx.zero())?;
                    let lhs = m_integral(&xv, &w, &ctx)?;
                    let rhs = zeta_ez_ones(r, &xv, &ctx)? * factorial(r as u32, ctx.prec());
                    Ok(Outcome::Numeric(lhs, rhs))
                }),
            ));
        }
    }
    if opts.x.is_none() {
        for side in ["m_integral", "zeta_ez"] {
            let ctx = opts.quad_ctx()?;
            let params = vec![("r", "2".to_string()), ("x", "1".to_string()), ("side", side.to_string())];
            let method = if side == "m_integral" {
                "lhs: M_2(1; 1,1, 0) by quadrature; rhs: 2 zeta(3) by alternating-series acceleration"
            } else {
                "lhs: 2 zeta_EZ(1,2) by Euler-Maclaurin; rhs: 2 zeta(3) by alternating-series acceleration"
            };
            let use_m = side == "m_integral";
            jobs.push(Job::new(
                "mzf_zeta3",
                &params,
                method,
                opts.quad_tol(1e-8),
                Box::new(move || {
                    let x = ctx.one();
                    let lhs = if use_m {
                        m_integral(&x, &WeightConfig::new(vec![ctx.one(); 2], ctx.zero())?, &ctx)?
                    } else {
                        zeta_ez_ones(2, &x, &ctx)? * 2u32
                    };
                    Ok(Outcome::Numeric(lhs, zeta_value(3, &ctx)? * 2u32))
                }),
            ));
        }
    }
    Ok(jobs)
}

/// Least-squares slope of `log residual` against `log x`.
pub fn fitted_order(xs: &[f64], residuals: &[f64]) -> Result<f64> {
    if xs.len() < 3 || xs.len() != residuals.len() {
        return Err(Error::out_of_range(format!("an order fit needs at least 3 ladder points, got {}", xs.len())));
    }
    if xs.windows(2).any(|p| p[1] >= p[0]) || xs.iter().any(|&x| x <= 0.0) {
        return Err(Error::out_of_range("the x ladder must be positive and strictly decreasing"));
    }
    if residuals.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Ok(f64::INFINITY);
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

/// Which asymptotic statement an order test probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderMethod {
    /// `I_r - main_term_I`.
    MainTermI,
    /// `M_r - main_term_M`.
    MainTermM,
    /// `zeta_EZ,r(1,...,1,x+1) - 1/(Gamma(x+1) x^r)`.
    EulerZagierMainTerm,
    /// `I_r - power_series_I` truncated at `order`.
    PowerSeries(u32),
}

impl OrderMethod {
    pub fn claimed(&self, r: usize) -> f64 {
        match self {
            OrderMethod::PowerSeries(m) => *m as f64 + 1.0 - r as f64,
            _ => 1.0,
        }
    }
}

/// Residuals of an asymptotic statement along an `x` ladder.
pub fn order_residuals(method: OrderMethod, w: &WeightConfig, ladder: &[Real], ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let prec = ctx.prec();
    ladder
        .iter()
        .map(|x| {
            let d = match method {
                OrderMethod::MainTermI => i_integral(x, w, ctx)? - main_term_I(x, w, ctx)?,
                OrderMethod::MainTermM => m_integral(x, w, ctx)? - main_term_M(x, w, ctx)?,
                OrderMethod::EulerZagierMainTerm => {
                    let g = gamma(&Float::with_val(prec, x + 1u32), ctx);
                    let main = Float::with_val(prec, powu(x, w.r() as u32) * g).recip();
                    zeta_ez_ones(w.r(), x, ctx)? - main
                }
                OrderMethod::PowerSeries(m) => i_integral(x, w, ctx)? - power_series_I(x, w, m, ctx)?,
            };
            Ok(d.abs())
        })
        .collect()
}

fn order_jobs(opts: &SuiteOptions) -> Result<Vec<Job>> {
    let default_ladder = ["0.04", "0.02", "0.01", "0.005"];
    let series_ladder = ["0.1", "0.05", "0.025", "0.0125"];
    let mut specs: Vec<(&str, OrderMethod, Config, Vec<&str>)> = vec![
        ("order_main_term_i", OrderMethod::MainTermI, (vec!["1.5".into()], "0.5".into()), default_ladder.to_vec()),
        ("order_main_term_i", OrderMethod::MainTermI, (vec!["1".into(), "2".into()], "0.5".into()), default_ladder.to_vec()),
        ("order_main_term_m", OrderMethod::MainTermM, (vec!["2".into()], "1".into()), default_ladder.to_vec()),
        ("order_main_term_m", OrderMethod::MainTermM, (vec!["1".into(), "1.5".into()], "0".into()), default_ladder.to_vec()),
        ("order_ez_main_term", OrderMethod::EulerZagierMainTerm, (vec!["1".into(); 2], "0".into()), default_ladder.to_vec()),
        ("order_ez_main_term", OrderMethod::EulerZagierMainTerm, (vec!["1".into(); 3], "0".into()), default_ladder.to_vec()),
        ("order_truncation", OrderMethod::PowerSeries(4), (vec!["1".into(), "1".into()], "3".into()), series_ladder.to_vec()),
        ("order_truncation", OrderMethod::PowerSeries(3), (vec!["1".into()], "2".into()), series_ladder.to_vec()),
    ];
    if opts.omega.is_some() || opts.a.is_some() || opts.order.is_some() {
        let (om, a) = configs(opts, None, vec![(vec!["1".into(), "1".into()], "3".into())])?.remove(0);
        let order = opts.order.unwrap_or(4);
        specs = vec![
            ("order_main_term_i", OrderMethod::MainTermI, (om.clone(), a.clone()), default_ladder.to_vec()),
            ("order_main_term_m", OrderMethod::MainTermM, (om.clone(), a.clone()), default_ladder.to_vec()),
            ("order_truncation", OrderMethod::PowerSeries(order), (om, a), series_ladder.to_vec()),
        ];
    }
    let mut jobs = Vec::new();
    for (id, method, (om, a), ladder) in specs {
        let ladder: Vec<String> = match &opts.x {
            Some(x) => x.clone(),
            None => ladder.iter().map(|s| s.to_string()).collect(),
        };
        if ladder.len() < 3 {
            return Err(Error::out_of_range(format!("an order test needs at least 3 ladder points, got {}", ladder.len())));
        }
        let ctx = opts.quad_ctx()?;
        let r = om.len();
        let claimed = method.claimed(r);
        let mut params = cfg_params(&om, &a);
        params.push(("r", r.to_string()));
        params.push(("ladder", ladder.join(",")));
        if let OrderMethod::PowerSeries(m) = method {
            params.push(("order", m.to_string()));
        }
        let method_text = match method {
            OrderMethod::MainTermI => "lhs: fitted order of |I_r (quadrature) - main term|; rhs: claimed order",
            OrderMethod::MainTermM => "lhs: fitted order of |M_r (quadrature) - main term|; rhs: claimed order",
            OrderMethod::EulerZagierMainTerm => "lhs: fitted order of |zeta_EZ (Euler-Maclaurin) - 1/(Gamma(x+1) x^r)|; rhs: claimed order",
            OrderMethod::PowerSeries(_) => "lhs: fitted order of |I_r (quadrature) - truncated polylogarithm expansion|; rhs: claimed order",
        };
        jobs.push(
            Job::new(
                id,
                &params,
                method_text,
                ORDER_MARGIN,
                Box::new(move || {
                    let w = weights(&om, &a, &ctx)?;
                    let xs: Vec<Real> = ladder.iter().map(|s| ctx.parse(s)).collect::<Result<_>>()?;
                    let res = order_residuals(method, &w, &xs, &ctx)?;
                    let xf: Vec<f64> = xs.iter().map(|v| v.to_f64()).collect();
                    let rf: Vec<f64> = res.iter().map(|v| v.to_f64()).collect();
                    let p = fitted_order(&xf, &rf)?;
                    let p = if p.is_finite() { p } else { f64::MAX };
                    Ok(Outcome::Numeric(ctx.real(p), ctx.real(claimed)))
                }),
            )
            .at_least(),
        );
    }
    if opts.omega.is_none() && opts.a.is_none() && opts.x.is_none() {
        let ctx = opts.quad_ctx()?;
        let params = vec![("omega", "2".to_string()), ("a", "1".to_string()), ("ladder", "0.01,0.005".to_string())];
        jobs.push(Job::new(
            "order_main_term_m_constant",
            &params,
            "lhs: Richardson extrapolation of M_1 - 1/x (quadrature) to x = 0; rhs: gamma - log(omega)",
            5e-3,
            Box::new(move || {
                let w = weights(&["2".into()], "1", &ctx)?;
                let f = |x: &Real| -> Result<Real> { Ok(m_integral(x, &w, &ctx)? - Float::with_val(ctx.prec(), x.recip_ref())) };
                let f1 = f(&ctx.parse("0.01")?)?;
                let f2 = f(&ctx.parse("0.005")?)?;
                let lhs = f2 * 2u32 - f1;
                let rhs = euler_gamma(&ctx) - ctx.real(2).ln();
                Ok(Outcome::Numeric(lhs, rhs))
            }),
        ));
    }
    Ok(jobs)
}

// ------------------------------------------------------- exact checks

fn exact_job(id: &str, params: Vec<(&str, String)>, method: &str, run: JobFn) -> Job {
    Job::new(id, &params, method, 0.0, run)
}

/// `B_n` from the partition sum `n! sum prod x_j^s_j / ((j!)^s_j s_j!)`.
pub fn bell_partition_sum(n: usize, xs: &[Rational]) -> Rational {
    // enumerate multiplicities s_1..s_n with sum j s_j = n
    fn rec(j: usize, left: usize, n: usize, xs: &[Rational], acc: Rational, out: &mut Rational) {
        if left == 0 {
            *out += acc;
            return;
        }
        if j > n {
            return;
        }
        let jf = Integer::from(Integer::factorial(j as u32));
        let mut term = acc;
        let mut s = 0usize;
        loop {
            rec(j + 1, left - s * j, n, xs, term.clone(), out);
            s += 1;
            if s * j > left {
                break;
            }
            term *= &xs[j - 1];
            term /= Rational::from(&jf);
            term /= Rational::from(s as u32);
        }
    }
    let mut out = Rational::new();
    rec(1, n, n, xs, Rational::from(1), &mut out);
    out * Integer::from(Integer::factorial(n as u32))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.gen_range(-40..=40);
    let den: i64 = rng.gen_range(1..=17);
    Rational::from((num, den))
}

fn combinatorics_jobs(opts: &SuiteOptions) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    let seed = opts.seed;
    for m in 1..=12u32 {
        jobs.push(exact_job(
            "pochhammer_stirling",
            vec![("m", m.to_string()), ("samples", "20".into())],
            "lhs: samples where the rising factorial equals the Stirling expansion; rhs: sample count",
            Box::new(move || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x5000 + m as u64));
                let mut hits = 0u32;
                for _ in 0..20 {
                    let x = random_rational(&mut rng);
                    let mut rising = Rational::from(1);
                    for j in 0..m {
                        rising *= Rational::from(&x + j);
                    }
                    let mut poly = Rational::new();
                    let mut xp = Rational::from(1);
                    for l in 1..=m {
                        xp *= &x;
                        poly += Rational::from(&xp * stirling_first_unsigned(m, l)?);
                    }
                    if rising == poly {
                        hits += 1;
                    }
                }
                Ok(Outcome::Exact(Rational::from(hits), Rational::from(20)))
            }),
        ));
    }
    for m in 1..=10u32 {
        for l in 1..=m {
            jobs.push(exact_job(
                "stirling_harmonic",
                vec![("m", m.to_string()), ("l", l.to_string())],
                "lhs: [m;l]/m! from the exact Stirling table; rhs: nested harmonic sum",
                Box::new(move || {
                    let lhs = Rational::from((stirling_first_unsigned(m, l)?, Integer::from(Integer::factorial(m))));
                    // e_{l-1}(1, 1/2, ..., 1/(m-1)) / m
                    let mut e = vec![Rational::new(); l as usize];
                    e[0] = Rational::from(1);
                    for j in 1..m {
                        let inv = Rational::from((1, j));
                        for d in (1..l as usize).rev() {
                            let add = Rational::from(&e[d - 1] * &inv);
                            e[d] += add;
                        }
                    }
                    let rhs = &e[l as usize - 1] / Rational::from(m);
                    Ok(Outcome::Exact(lhs, rhs))
                }),
            ));
        }
    }
    for n in 0..=8usize {
        jobs.push(exact_job(
            "bell_explicit",
            vec![("n", n.to_string())],
            "lhs: Bell recurrence in rationals; rhs: partition-sum formula",
            Box::new(move || {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0xbe11 + n as u64));
                let xs: Vec<Rational> = (0..n.max(1)).map(|_| random_rational(&mut rng)).collect();
                Ok(Outcome::Exact(bell_complete_rational(n, &xs)?, bell_partition_sum(n, &xs)))
            }),
        ));
    }
    for t in 1..=7u32 {
        for s in 1..=t {
            jobs.push(exact_job(
                "composition_count",
                vec![("t", t.to_string()), ("s", s.to_string())],
                "lhs: distinct items from the composition stream; rhs: C(t-1, s-1)",
                Box::new(move || {
                    let items: std::collections::BTreeSet<Vec<u32>> = compositions(t, s)?.map(|c| c.parts).collect();
                    Ok(Outcome::Exact(Rational::from(items.len() as u32), Rational::from(binomial(t - 1, s - 1))))
                }),
            ));
        }
    }
    for l in 0..=5u32 {
        for s in 1..=4u32 {
            jobs.push(exact_job(
                "weak_composition_count",
                vec![("l", l.to_string()), ("s", s.to_string())],
                "lhs: distinct items from the weak composition stream; rhs: C(l+s-1, s-1)",
                Box::new(move || {
                    let items: std::collections::BTreeSet<Vec<u32>> = weak_compositions(l, s)?.map(|c| c.parts).collect();
                    Ok(Outcome::Exact(Rational::from(items.len() as u32), Rational::from(binomial(l + s - 1, s - 1))))
                }),
            ));
        }
    }
    for r in 1..=5usize {
        for t in 1..=r as u32 {
            for s in 1..=t {
                for k in compositions(t, s)? {
                    let label = k.parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
                    jobs.push(exact_job(
                        "family_count",
                        vec![("r", r.to_string()), ("k", label)],
                        "lhs: distinct families from the subset-family stream; rhs: r!/(k_1!...k_s!(r-t)!)",
                        Box::new(move || {
                            let fams: std::collections::BTreeSet<Vec<Vec<usize>>> =
                                disjoint_subset_families(r, &k)?.map(|f| f.blocks).collect();
                            let mut want = Integer::from(Integer::factorial(r as u32));
                            want /= Integer::from(Integer::factorial(r as u32 - k.total));
                            for &p in &k.parts {
                                want /= Integer::from(Integer::factorial(p));
                            }
                            Ok(Outcome::Exact(Rational::from(fams.len() as u32), Rational::from(want)))
                        }),
                    ));
                }
            }
        }
    }
    for r in 1..=4usize {
        for s in 0..=r as u32 {
            for n in 1..=5u32 {
                jobs.push(exact_job(
                    "counting_law",
                    vec![("r", r.to_string()), ("s", s.to_string()), ("N", n.to_string())],
                    "lhs: sum over weak compositions of s of j_1!...j_N! times enumerated family counts; rhs: r!/(r-s)! C(s+N-1, s)",
                    Box::new(move || {
                        let mut total = Integer::new();
                        for j in weak_compositions(s, n)? {
                            let mut weight = Integer::from(1);
                            for &p in &j.parts {
                                weight *= Integer::from(Integer::factorial(p));
                            }
                            let positive: Vec<u32> = j.parts.iter().copied().filter(|&p| p > 0).collect();
                            let count = if positive.is_empty() {
                                1usize
                            } else {
                                disjoint_subset_families(r, &Composition::new(positive)?)?.count()
                            };
                            total += weight * count as u64;
                        }
                        let mut want = Integer::from(Integer::factorial(r as u32));
                        want /= Integer::from(Integer::factorial(r as u32 - s));
                        want *= binomial(s + n - 1, s);
                        Ok(Outcome::Exact(Rational::from(total), Rational::from(want)))
                    }),
                ));
            }
        }
    }
    Ok(jobs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_fit_recovers_slope() {
        let xs = [0.1, 0.05, 0.025];
        let rs: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((fitted_order(&xs, &rs).unwrap() - 2.0).abs() < 1e-12);
        assert!(fitted_order(&xs[..2], &rs[..2]).is_err());
        assert!(fitted_order(&[0.1, 0.2, 0.05], &rs).is_err());
    }

    #[test]
    fn bell_partition_matches_known_polynomials() {
        let xs: Vec<Rational> = [2, 3, 5].iter().map(|&v| Rational::from(v)).collect();
        assert_eq!(bell_partition_sum(0, &xs), 1);
        assert_eq!(bell_partition_sum(2, &xs), 2 * 2 + 3);
        // B_3 = x1^3 + 3 x1 x2 + x3
        assert_eq!(bell_partition_sum(3, &xs), 8 + 18 + 5);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let err = run_suite("nope", &SuiteOptions::default()).unwrap_err();
        assert!(err.is_precondition());
    }

    #[test]
    fn reports_are_sorted_and_pass() {
        let opts = SuiteOptions { timing: false, ..SuiteOptions::default() };
        let reps = run_suite("r2m2", &opts).unwrap();
        assert_eq!(reps.len(), 5);
        assert!(reps.iter().all(|r| r.passed), "{reps:#?}");
        let again = run_suite("r2m2", &opts).unwrap();
        assert_eq!(reps, again);
    }
}
