//! Double-exponential quadrature.
//!
//! Two rules share one level-doubling driver: tanh-sinh on a finite
//! interval and an exponential transform for `[start, inf)`. Each level
//! halves the step and only evaluates the new odd nodes. Refinement stops
//! when two successive levels agree to `target_tol / 4` (relative to
//! `max(1, |I|)`); running out of levels is an error.

use rug::Float;

use crate::context::{PrecisionContext, Real};
use crate::error::{Error, Result};

const H0: f64 = 0.5;
const T_MAX: f64 = 24.0;
const MIN_LEVELS: u32 = 3;

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Real,
    /// Difference between the last two levels.
    pub error_estimate: Real,
    pub levels: u32,
    pub evaluations: usize,
}

/// `int_lo^hi f(u) du` by tanh-sinh. Integrable endpoint singularities
/// are fine; nodes next to `lo` are formed without cancellation.
pub fn tanh_sinh<F>(f: F, lo: &Real, hi: &Real, ctx: &PrecisionContext) -> Result<QuadResult>
where
    F: Fn(&Real) -> Result<Real>,
{
    if hi < lo {
        return Err(Error::domain("tanh_sinh needs lo <= hi"));
    }
    let prec = ctx.prec();
    let width = Float::with_val(prec, hi - lo);
    let pi = ctx.pi();
    let g = |t: &Real| -> Result<Option<Real>> {
        let sh = Float::with_val(prec, t.sinh_ref());
        let ch = Float::with_val(prec, t.cosh_ref());
        let e = Float::with_val(prec, -(sh * &pi)).exp();
        let denom = Float::with_val(prec, &e + 1u32);
        let sigma = Float::with_val(prec, denom.recip_ref());
        let sigma_c = Float::with_val(prec, &e / &denom);
        if sigma_c.is_zero() || sigma.is_zero() {
            return Ok(None);
        }
        let u = Float::with_val(prec, &width * &sigma) + lo;
        if u <= *lo || u >= *hi {
            return Ok(None);
        }
        let w = Float::with_val(prec, &width * &pi) * ch * sigma * sigma_c;
        Ok(Some(w * f(&u)?))
    };
    drive(g, ctx)
}

/// `int_start^inf f(u) du` through `u = start + scale * exp(t - e^-t)`.
/// `scale` should be about the inverse decay rate of `f`.
pub fn half_line<F>(f: F, start: &Real, scale: &Real, ctx: &PrecisionContext) -> Result<QuadResult>
where
    F: Fn(&Real) -> Result<Real>,
{
    if *scale <= 0 {
        return Err(Error::domain("half_line needs a positive scale"));
    }
    let prec = ctx.prec();
    let g = |t: &Real| -> Result<Option<Real>> {
        let emt = Float::with_val(prec, (-t.clone()).exp());
        let core = Float::with_val(prec, t - &emt).exp();
        if core.is_zero() {
            return Ok(None);
        }
        let u = Float::with_val(prec, scale * &core) + start;
        if u <= *start {
            return Ok(None);
        }
        let w = Float::with_val(prec, scale * &core) * (emt + 1u32);
        Ok(Some(w * f(&u)?))
    };
    drive(g, ctx)
}

// Sums h * g(j h) over j != 0 in one direction, walking outward until the
// terms are negligible. Returns (sum, evaluations).
fn sweep<G>(g: &G, h: f64, odd_only: bool, sign: f64, cut: &Real, ctx: &PrecisionContext) -> Result<(Real, usize)>
where
    G: Fn(&Real) -> Result<Option<Real>>,
{
    let prec = ctx.prec();
    let mut sum = Float::new(prec);
    let mut evals = 0usize;
    let mut quiet = 0;
    let step = if odd_only { 2 } else { 1 };
    let mut j: u64 = 1;
    loop {
        let tf = sign * h * j as f64;
        if tf.abs() > T_MAX {
            if quiet == 0 {
                return Err(Error::QuadratureNotConverged {
                    levels: 0,
                    last_diff: "integrand not negligible at the end of the node range".into(),
                });
            }
            break;
        }
        let t = Float::with_val(prec, tf);
        evals += 1;
        match g(&t)? {
            None => break,
            Some(v) => {
                let small = Float::with_val(prec, v.abs_ref()) < *cut;
                sum += v;
                if small {
                    quiet += 1;
                    if quiet >= 2 && tf.abs() > 1.0 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
            }
        }
        j += step;
    }
    Ok((sum, evals))
}

fn drive<G>(g: G, ctx: &PrecisionContext) -> Result<QuadResult>
where
    G: Fn(&Real) -> Result<Option<Real>>,
{
    let prec = ctx.prec();
    let cut_rel = Float::with_val(prec, Float::i_exp(1, -(ctx.prec() as i32) - 8));
    let tol = ctx.tol() / 4u32;

    let mut h = H0;
    let centre = g(&ctx.zero())?.unwrap_or_else(|| ctx.zero());
    let mut raw = centre.clone();
    let mut evals = 1usize;
    let scale_of = |s: &Real| -> Real {
        let a = Float::with_val(prec, s.abs_ref());
        if a > 1 { a } else { ctx.one() }
    };
    let cut = Float::with_val(prec, &cut_rel * scale_of(&centre));
    for sign in [1.0, -1.0] {
        let (s, n) = sweep(&g, h, false, sign, &cut, ctx)?;
        raw += s;
        evals += n;
    }
    let mut prev = Float::with_val(prec, &raw * h);
    let mut last_diff = ctx.zero();
    for level in 1..=ctx.quad_levels() {
        h /= 2.0;
        let cut = Float::with_val(prec, &cut_rel * scale_of(&prev) / h);
        for sign in [1.0, -1.0] {
            let (s, n) = sweep(&g, h, true, sign, &cut, ctx)?;
            raw += s;
            evals += n;
        }
        let cur = Float::with_val(prec, &raw * h);
        last_diff = Float::with_val(prec, &cur - &prev).abs();
        let bound = Float::with_val(prec, &tol * scale_of(&cur));
        if level + 1 >= MIN_LEVELS && last_diff <= bound {
            return Ok(QuadResult { value: cur, error_estimate: last_diff, levels: level, evaluations: evals });
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged {
        levels: ctx.quad_levels(),
        last_diff: last_diff.to_string_radix(10, Some(6)),
    })
}
