//! Expansion-side evaluators for `I_r` and `M_r` near `x = 0`.
//!
//! * [`main_term_I`], [`main_term_M`]: the leading polynomial in `1/x`.
//! * [`c_coeff`]: coefficients of `(a+|w|)^x I_r = r! x^-r + sum c_{r,m} x^(m-r)`
//!   from the polylogarithm triple sum.
//! * [`c_prime_coeff`]: the Bell-polynomial closed form of the same
//!   coefficients for `m <= r`.
//! * [`expression_by_S`]: `I_r` rebuilt from the series `S_r` and jets.
//! * [`i1_expansion`]: the complete expansion of `a^x I_1`.

use rug::Float;

use crate::combinatorics::{compositions, disjoint_subset_families, lambda_all, weak_compositions};
use crate::context::{factorial, powu, PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::polylog::{mpl, mpl_one_var, MultiIndex, PolylogArgs};
use crate::series::{s_series_jet, WeightConfig};
use crate::special::{bell_all, binomial, euler_gamma, gamma, gamma_bell_args, loggamma_jet, zeta_value};

/// Truncated Laurent expansion `sum_m coeffs[m] x^powers[m]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionResult {
    pub powers: Vec<i64>,
    pub coeffs: Vec<Real>,
    pub truncation_order: u32,
}

impl ExpansionResult {
    pub fn eval(&self, x: &Real) -> Real {
        let prec = x.prec();
        let mut acc = Float::new(prec);
        for (p, c) in self.powers.iter().zip(&self.coeffs) {
            let xp = Float::with_val(prec, rug::ops::Pow::pow(x, *p as i32));
            acc += Float::with_val(prec, c * &xp);
        }
        acc
    }
}

fn check_x(x: &Real) -> Result<()> {
    if !(x.is_finite() && *x > 0) {
        return Err(Error::domain(format!("the expansion needs x > 0, got {}", x.to_f64())));
    }
    Ok(())
}

fn check_unit_x(x: &Real) -> Result<()> {
    if !(x.is_finite() && *x > 0 && *x < 1) {
        return Err(Error::domain(format!("the power series needs 0 < x < 1, got {}", x.to_f64())));
    }
    Ok(())
}

// sum_k (-1)^k Lambda_k(omega) (r-k)! x^(k-r)
fn lambda_polynomial(x: &Real, omega: &[Real], ctx: &PrecisionContext) -> Result<Real> {
    let prec = ctx.prec();
    let r = omega.len();
    let lam = lambda_all(omega, ctx)?;
    let inv = Float::with_val(prec, x.recip_ref());
    let mut acc = ctx.zero();
    for (k, l) in lam.iter().enumerate() {
        let mut term = Float::with_val(prec, l * factorial((r - k) as u32, prec));
        term *= powu(&inv, (r - k) as u32);
        if k % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    Ok(acc)
}

/// `e^(-gamma x)/Gamma(x+1) * sum_k (-1)^k Lambda_k(omega) (r-k)! / x^(r-k)`.
#[allow(non_snake_case)]
pub fn main_term_I(x: &Real, w: &WeightConfig, ctx: &PrecisionContext) -> Result<Real> {
    check_x(x)?;
    let prec = ctx.prec();
    let poly = lambda_polynomial(x, w.omega(), ctx)?;
    let eg = Float::with_val(prec, -(euler_gamma(ctx) * x)).exp();
    let g = gamma(&Float::with_val(prec, x + 1u32), ctx);
    Ok(poly * eg / g)
}

/// As [`main_term_I`] with the prefactor `1/Gamma(x+1)`.
#[allow(non_snake_case)]
pub fn main_term_M(x: &Real, w: &WeightConfig, ctx: &PrecisionContext) -> Result<Real> {
    check_x(x)?;
    let poly = lambda_polynomial(x, w.omega(), ctx)?;
    let g = gamma(&Float::with_val(ctx.prec(), x + 1u32), ctx);
    Ok(poly / g)
}

/// Coefficient `c_{r,m}` of `x^(m-r)` in `(a+|omega|)^x I_r(x; omega, a)`.
///
/// Sums over `t`, compositions `k` of `t` into `s` parts, ordered disjoint
/// families `(K_1..K_s)` with `|K_i| = k_i`, and weak compositions `l` of
/// `m - t`. Each term is a multiple polylogarithm of index `k + l` at the
/// telescoping ratios `(a + |w_{P_(i-1)}|) / (a + |w_{P_i}|)` where
/// `P_i = K_0 + K_1 + ... + K_i`. The number of polylogarithm evaluations is
/// capped by `ctx.max_terms()`.
pub fn c_coeff(r: usize, m: u32, w: &WeightConfig, ctx: &PrecisionContext) -> Result<Real> {
    if r != w.r() {
        return Err(Error::out_of_range(format!("c_coeff: r = {r} but the configuration has {} weights", w.r())));
    }
    if m == 0 {
        return Err(Error::out_of_range("c_coeff needs m >= 1"));
    }
    let needed = c_term_count(r, m)?;
    if needed > ctx.max_terms() as u128 {
        return Err(Error::CombinatorialBudget(format!(
            "c_{{{r},{m}}} needs {needed} polylogarithm terms, the limit is {}",
            ctx.max_terms()
        )));
    }
    let prec = ctx.prec();
    let mut total = ctx.zero();
    for t in 1..=m.min(r as u32) {
        let mut at_t = ctx.zero();
        for s in 1..=t {
            for k in compositions(t, s)? {
                let kfact = k.parts.iter().fold(factorial((r as u32) - t, prec), |p, &ki| p * factorial(ki, prec));
                for fam in disjoint_subset_families(r, &k)? {
                    let args = telescoping_args(w, fam.remainder_mask, &fam.masks);
                    let mut fam_sum = ctx.zero();
                    for l in weak_compositions(m - t, s)? {
                        let mut coef = rug::Integer::from(1);
                        let mut parts = Vec::with_capacity(s as usize);
                        for (ki, li) in k.parts.iter().zip(&l.parts) {
                            coef *= binomial(ki + li - 1, *li);
                            parts.push(ki + li);
                        }
                        let p = PolylogArgs::new(MultiIndex::new(parts)?, args.clone())?;
                        fam_sum += mpl(&p, ctx)? * coef;
                    }
                    at_t += fam_sum * &kfact;
                }
            }
        }
        if (m - t) % 2 == 1 {
            total -= at_t;
        } else {
            total += at_t;
        }
    }
    Ok(total)
}

/// Number of polylogarithm terms in the triple sum for `c_{r,m}`.
pub fn c_term_count(r: usize, m: u32) -> Result<u128> {
    let mut n: u128 = 0;
    for t in 1..=m.min(r as u32) {
        for s in 1..=t {
            for k in compositions(t, s)? {
                let mut fam = rug::Integer::from(rug::Integer::factorial(r as u32)) / rug::Integer::from(rug::Integer::factorial(r as u32 - t));
                for &ki in &k.parts {
                    fam /= rug::Integer::from(rug::Integer::factorial(ki));
                }
                fam *= binomial(m - t + s - 1, s - 1);
                n = n.saturating_add(fam.to_u128().unwrap_or(u128::MAX));
            }
        }
    }
    Ok(n)
}

fn telescoping_args(w: &WeightConfig, remainder: u64, blocks: &[u64]) -> Vec<Real> {
    let prec = w.a().prec();
    let mut used = remainder;
    let mut prev = Float::with_val(prec, w.a() + w.subset_sum(used));
    let mut out = Vec::with_capacity(blocks.len());
    for &b in blocks {
        used |= b;
        let next = Float::with_val(prec, w.a() + w.subset_sum(used));
        out.push(Float::with_val(prec, &prev / &next));
        prev = next;
    }
    out
}

/// Closed form of `c_{r,m}` for `1 <= m <= r`:
/// `sum_k (-1)^(m-k) (r-m+k)!/k! Lambda_{m-k}(omega/(a+|omega|)) B_k(0, -1! zeta(2), 2! zeta(3), ...)`.
pub fn c_prime_coeff(r: usize, m: u32, w: &WeightConfig, ctx: &PrecisionContext) -> Result<Real> {
    if r != w.r() {
        return Err(Error::out_of_range(format!(
            "c_prime_coeff: r = {r} but the configuration has {} weights",
            w.r()
        )));
    }
    if m == 0 || m as usize > r {
        return Err(Error::out_of_range(format!("c_prime_coeff needs 1 <= m <= r = {r}, got m = {m}")));
    }
    let prec = ctx.prec();
    let m = m as usize;
    let s = Float::with_val(prec, w.a() + w.total());
    let scaled: Vec<Real> = w.omega().iter().map(|wi| Float::with_val(prec, wi / &s)).collect();
    let lam = lambda_all(&scaled, ctx)?;
    let xs = gamma_bell_args(ctx.zero(), m, ctx)?;
    let bell = bell_all(m, &xs, ctx)?;
    let mut acc = ctx.zero();
    for k in 0..=m {
        let mut term = Float::with_val(prec, &lam[m - k] * &bell[k]);
        term *= factorial((r - m + k) as u32, prec);
        term /= factorial(k as u32, prec);
        if (m - k) % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    Ok(acc)
}

/// The normalized expansion `r! x^-r + c_{r,1} x^(1-r) + ... + c_{r,M} x^(M-r)`.
pub fn expansion(w: &WeightConfig, order: u32, ctx: &PrecisionContext) -> Result<ExpansionResult> {
    let r = w.r();
    let mut powers = vec![-(r as i64)];
    let mut coeffs = vec![factorial(r as u32, ctx.prec())];
    for m in 1..=order {
        powers.push(m as i64 - r as i64);
        coeffs.push(c_coeff(r, m, w, ctx)?);
    }
    Ok(ExpansionResult { powers, coeffs, truncation_order: order })
}

/// `I_r` estimated from the expansion truncated at `m = order`, divided by
/// `(a+|omega|)^x`.
#[allow(non_snake_case)]
pub fn power_series_I(x: &Real, w: &WeightConfig, order: u32, ctx: &PrecisionContext) -> Result<Real> {
    check_unit_x(x)?;
    let e = expansion(w, order, ctx)?;
    Ok(normalized_to_i(&e.eval(x), x, w, ctx))
}

/// Divide a value of `(a+|omega|)^x I_r` by `(a+|omega|)^x`.
pub fn normalized_to_i(v: &Real, x: &Real, w: &WeightConfig, ctx: &PrecisionContext) -> Real {
    let prec = ctx.prec();
    let s = Float::with_val(prec, w.a() + w.total());
    let f = Float::with_val(prec, rug::ops::Pow::pow(&s, &Float::with_val(prec, -x)));
    Float::with_val(prec, v * f)
}

const MAX_TRICOLOR_R: usize = 8;

/// `I_r(x; omega, a)` for `|omega| < a` as
/// `(-1)^r e^(-gamma x)/Gamma(x) sum_{A+B+C=R} prod_A log w_i (d/dx)^|B| [Gamma(x) a^-x e^(gamma x) S_|C|(x, -w_C/a)]`.
///
/// The function in brackets depends only on `C`, so it is expanded once per
/// subset as a jet of degree `r + 2` and the `|B|`-th derivative is read off.
#[allow(non_snake_case)]
pub fn expression_by_S(x: &Real, w: &WeightConfig, ctx: &PrecisionContext) -> Result<Real> {
    check_x(x)?;
    let r = w.r();
    if r > MAX_TRICOLOR_R {
        return Err(Error::out_of_range(format!("expression_by_S supports r <= {MAX_TRICOLOR_R}, got {r}")));
    }
    if w.total() >= *w.a() {
        return Err(Error::domain(format!(
            "expression_by_S needs |omega| < a, got |omega| = {} and a = {}",
            w.total().to_f64(),
            w.a().to_f64()
        )));
    }
    let prec = ctx.prec();
    let degree = r + 2;
    let gamma_c = euler_gamma(ctx);
    let ln_a = Float::with_val(prec, w.a().ln_ref());
    let slope = Float::with_val(prec, &gamma_c - &ln_a);

    let lin = Jet::variable(x, degree).scale(&slope);
    let base = &loggamma_jet(x, degree, ctx)? + &lin;
    let base = base.exp();

    let xj = Jet::variable(x, degree);
    let logs: Vec<Real> = w.omega().iter().map(|wi| Float::with_val(prec, wi.ln_ref())).collect();
    let mut per_c: Vec<Jet> = Vec::with_capacity(1 << r);
    for mask in 0u64..(1u64 << r) {
        let scaled: Vec<Real> = (0..r)
            .filter(|i| mask & (1u64 << i) != 0)
            .map(|i| -Float::with_val(prec, &w.omega()[i] / w.a()))
            .collect();
        let s = s_series_jet(&xj, &scaled, ctx)?;
        per_c.push(&base * &s);
    }

    let mut sum = ctx.zero();
    let mut digits = vec![0u8; r];
    loop {
        // digit 0: A, 1: B, 2: C
        let mut term = ctx.one();
        let mut nb = 0usize;
        let mut cmask = 0u64;
        for (i, &d) in digits.iter().enumerate() {
            match d {
                0 => term *= &logs[i],
                1 => nb += 1,
                _ => cmask |= 1u64 << i,
            }
        }
        term *= per_c[cmask as usize].derivative(nb)?;
        sum += term;
        let mut j = 0;
        while j < r && digits[j] == 2 {
            digits[j] = 0;
            j += 1;
        }
        if j == r {
            break;
        }
        digits[j] += 1;
    }

    let pref = Float::with_val(prec, -Float::with_val(prec, &gamma_c * x)).exp() / gamma(x, ctx);
    let mut out = sum * pref;
    if r % 2 == 1 {
        out = -out;
    }
    Ok(out)
}

/// Partial sum through `x^order` of
/// `a^x I_1 = 1/x + log(a/w) - sum_k (Li_{1,..,1,2}(-w/a) + (-1)^(k+1) zeta(k+1)) x^k`.
pub fn i1_expansion(x: &Real, omega: &Real, a: &Real, order: u32, ctx: &PrecisionContext) -> Result<Real> {
    check_unit_x(x)?;
    if !(*omega > 0 && omega < a) {
        return Err(Error::domain(format!(
            "i1_expansion needs 0 < omega < a, got omega = {}, a = {}",
            omega.to_f64(),
            a.to_f64()
        )));
    }
    let prec = ctx.prec();
    let mut acc = Float::with_val(prec, x.recip_ref());
    acc += Float::with_val(prec, a / omega).ln();
    let coeffs = i1_coefficients(omega, a, order, ctx)?;
    let mut xp = ctx.one();
    for c in &coeffs {
        xp *= x;
        acc += Float::with_val(prec, c * &xp);
    }
    Ok(acc)
}

/// Coefficients of `x^1..x^order` in the expansion of `a^x I_1`.
pub fn i1_coefficients(omega: &Real, a: &Real, order: u32, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let prec = ctx.prec();
    let z = -Float::with_val(prec, omega / a);
    let mut out = Vec::with_capacity(order as usize);
    for k in 1..=order {
        let li = mpl_one_var(&MultiIndex::ones_then(k as usize - 1, 2)?, &z, ctx)?;
        let zeta = zeta_value(k + 1, ctx)?;
        let c = if k % 2 == 1 { li + zeta } else { li - zeta };
        out.push(-c);
    }
    Ok(out)
}
