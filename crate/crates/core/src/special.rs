//! Scalar special functions and exact combinatorial numbers.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::context::{factorial, PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// Rising factorial `x (x+1) ... (x+m-1)`.
pub fn pochhammer(x: &Real, m: u32, ctx: &PrecisionContext) -> Real {
    let mut acc = ctx.one();
    for j in 0..m {
        acc *= Float::with_val(ctx.prec(), x + j);
    }
    acc
}

const STIRLING_CACHE_MAX: usize = 64;

fn stirling_table() -> &'static Vec<Vec<Integer>> {
    static TABLE: OnceLock<Vec<Vec<Integer>>> = OnceLock::new();
    TABLE.get_or_init(|| stirling_rows(STIRLING_CACHE_MAX))
}

// rows[m][l] = c(m, l) for 0 <= l <= m <= max
fn stirling_rows(max: usize) -> Vec<Vec<Integer>> {
    let mut rows: Vec<Vec<Integer>> = vec![vec![Integer::from(1)]];
    for m in 0..max {
        let prev = &rows[m];
        let mut next = vec![Integer::new(); m + 2];
        for l in 1..=m + 1 {
            let mut v = Integer::new();
            if l <= m {
                v += Integer::from(&prev[l] * m as u64);
            }
            v += &prev[l - 1];
            next[l] = v;
        }
        rows.push(next);
    }
    rows
}

/// Unsigned Stirling number of the first kind `[m; l]`, the coefficient of
/// `x^l` in `(x)_m`.
pub fn stirling_first_unsigned(m: u32, l: u32) -> Result<Integer> {
    if m == 0 || l == 0 || l > m {
        return Err(Error::out_of_range(format!(
            "stirling_first_unsigned needs 1 <= l <= m, got m={m}, l={l}"
        )));
    }
    let (m, l) = (m as usize, l as usize);
    if m <= STIRLING_CACHE_MAX {
        return Ok(stirling_table()[m][l].clone());
    }
    Ok(stirling_rows(m)[m][l].clone())
}

/// `[m; l] / m!` for `0 <= m <= m_max`, `0 <= l <= l_max`, as reals.
///
/// Uses `u(m+1, l) = (m u(m, l) + u(m, l-1)) / (m+1)`, which keeps every
/// entry bounded by 1 and avoids factorial growth.
pub fn stirling_ratio_table(m_max: usize, l_max: usize, ctx: &PrecisionContext) -> Vec<Vec<Real>> {
    let prec = ctx.prec();
    let mut rows = Vec::with_capacity(m_max + 1);
    let mut first = vec![Float::new(prec); l_max + 1];
    first[0] = ctx.one();
    rows.push(first);
    for m in 0..m_max {
        let prev: &Vec<Real> = &rows[m];
        let mut next = vec![Float::new(prec); l_max + 1];
        for l in 1..=l_max {
            let mut v = Float::with_val(prec, &prev[l] * m as u32);
            v += &prev[l - 1];
            v /= (m + 1) as u32;
            next[l] = v;
        }
        rows.push(next);
    }
    rows
}

pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

/// Complete exponential Bell polynomial `B_n(x_1, ..., x_n)` via
/// `B_{n+1} = sum_s C(n, s) x_{s+1} B_{n-s}`.
pub fn bell_complete(n: usize, xs: &[Real], ctx: &PrecisionContext) -> Result<Real> {
    Ok(bell_all(n, xs, ctx)?.pop().expect("nonempty"))
}

/// `B_0, ..., B_n` in one pass.
pub fn bell_all(n: usize, xs: &[Real], ctx: &PrecisionContext) -> Result<Vec<Real>> {
    if xs.len() < n {
        return Err(Error::out_of_range(format!(
            "bell_complete of order {n} needs {n} arguments, got {}",
            xs.len()
        )));
    }
    let prec = ctx.prec();
    let mut b: Vec<Real> = vec![ctx.one()];
    for m in 0..n {
        let mut acc = Float::new(prec);
        for s in 0..=m {
            let c = binomial(m as u32, s as u32);
            acc += Float::with_val(prec, &xs[s] * &b[m - s]) * &c;
        }
        b.push(acc);
    }
    Ok(b)
}

/// Exact rational variant of [`bell_complete`].
pub fn bell_complete_rational(n: usize, xs: &[Rational]) -> Result<Rational> {
    if xs.len() < n {
        return Err(Error::out_of_range(format!(
            "bell_complete of order {n} needs {n} arguments, got {}",
            xs.len()
        )));
    }
    let mut b: Vec<Rational> = vec![Rational::from(1)];
    for m in 0..n {
        let mut acc = Rational::new();
        for s in 0..=m {
            let c = binomial(m as u32, s as u32);
            acc += Rational::from(&xs[s] * &b[m - s]) * c;
        }
        b.push(acc);
    }
    Ok(b.pop().expect("nonempty"))
}

fn bernoulli_cache() -> &'static Mutex<Vec<Rational>> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![Rational::from(1)]))
}

/// Bernoulli number `B_n` (with `B_1 = -1/2`) as an exact rational.
pub fn bernoulli(n: usize) -> Rational {
    let mut cache = bernoulli_cache().lock().expect("bernoulli cache poisoned");
    while cache.len() <= n {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let m = cache.len();
        let mut acc = Rational::new();
        if m > 1 && m % 2 == 1 {
            cache.push(Rational::new());
            continue;
        }
        for (j, bj) in cache.iter().enumerate() {
            if bj.cmp0() != std::cmp::Ordering::Equal {
                acc += Rational::from(bj * binomial(m as u32 + 1, j as u32));
            }
        }
        let v = -acc / Rational::from(m as u32 + 1);
        cache.push(v);
    }
    cache[n].clone()
}

/// Euler's constant.
pub fn euler_gamma(ctx: &PrecisionContext) -> Real {
    Float::with_val(ctx.prec(), Constant::Euler)
}

fn zeta_cache() -> &'static Mutex<HashMap<(u32, u32), Real>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Real>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Riemann zeta at an integer `k >= 2`.
pub fn zeta_value(k: u32, ctx: &PrecisionContext) -> Result<Real> {
    if k < 2 {
        return Err(Error::domain(format!("zeta_value needs k >= 2, got {k}")));
    }
    let key = (k, ctx.prec());
    if let Some(v) = zeta_cache().lock().expect("zeta cache poisoned").get(&key) {
        return Ok(v.clone());
    }
    let v = zeta_real(&ctx.real(k), ctx)?;
    zeta_cache().lock().expect("zeta cache poisoned").insert(key, v.clone());
    Ok(v)
}

/// Riemann zeta at a real `s > 1` through the alternating eta series with
/// Borwein's Chebyshev weights.
pub fn zeta_real(s: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if *s <= 1 {
        return Err(Error::domain(format!("zeta_real needs s > 1, got {}", s.to_f64())));
    }
    // 1 - 2^(1-s) loses about log2(1/(s-1)) bits near s = 1.
    let sm1 = Float::with_val(64, s - 1u32).to_f64();
    let loss = if sm1 < 1.0 { (-sm1.log2()).ceil().max(0.0) as u32 } else { 0 };
    let prec = ctx.prec() + 16 + loss;
    let n = ((prec as f64) * 0.3933 + 4.0).ceil() as u64;
    // d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut d: Vec<Integer> = Vec::with_capacity(n as usize + 1);
    let mut term = Rational::from((1, n)); // i = 0 term of (n+i-1)!/((n-i)!(2i)!) times 4^i, divided by n
    let mut acc = Rational::new();
    for i in 0..=n {
        if i > 0 {
            // ratio term_i / term_{i-1} = (n+i-1)(n-i+1) * 4 / ((2i)(2i-1))
            term *= Rational::from(((n + i - 1) * (n - i + 1) * 4, (2 * i) * (2 * i - 1)));
        }
        acc += &term;
        let scaled = Rational::from(&acc * n);
        d.push(scaled.numer().clone() / scaled.denom().clone());
    }
    let dn = Float::with_val(prec, &d[n as usize]);
    let s_hi = Float::with_val(prec, s);
    let mut sum = Float::new(prec);
    for k in 0..n as usize {
        let num = Float::with_val(prec, Integer::from(&d[k] - &d[n as usize]));
        let den = Float::with_val(prec, (k + 1) as u32).pow(&s_hi);
        let t = num / den;
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
    }
    let eta = -sum / dn;
    let one_minus = Float::with_val(prec, 1u32) - Float::with_val(prec, 2u32).pow(Float::with_val(prec, 1u32 - &s_hi));
    Ok(Float::with_val(ctx.prec(), eta / one_minus))
}

/// Incomplete gamma `Gamma(0, u) = int_u^inf e^-t / t dt`.
///
/// The power series is used for `u <= 1`. Above 1 the series is still used
/// with enough guard bits to absorb its cancellation while that stays cheap,
/// and the continued fraction takes over for large `u`.
pub fn gamma0(u: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if *u <= 0 {
        return Err(Error::domain("gamma0 needs u > 0"));
    }
    if *u <= 1 {
        return gamma0_series(u, ctx);
    }
    let cf_from = (ctx.prec() as f64 * 0.1).max(4.0);
    if u.to_f64() < cf_from {
        gamma0_series(u, ctx)
    } else {
        gamma0_cf(u, ctx)
    }
}

/// `Gamma(0, u) = -log u - gamma - sum_{n>=1} (-u)^n / (n n!)`.
pub fn gamma0_series(u: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if *u <= 0 {
        return Err(Error::domain("gamma0 needs u > 0"));
    }
    let uf = u.to_f64();
    let guard = 16 + (uf * std::f64::consts::LOG2_E).ceil().max(0.0) as u32;
    let prec = ctx.prec() + guard;
    let hi = PrecisionContext::new(prec)?;
    let u = Float::with_val(prec, u);
    let eps_log2 = -(ctx.prec() as f64) - 8.0;
    // running (-u)^n / n!
    let mut p = Float::with_val(prec, 1u32);
    let mut sum = Float::new(prec);
    let mut n: u32 = 1;
    loop {
        p *= &u;
        p /= n;
        p = -p;
        let t = Float::with_val(prec, &p / n);
        sum += &t;
        if n as f64 > uf && (t.is_zero() || t.get_exp().unwrap_or(i32::MIN) as f64 <= eps_log2) {
            break;
        }
        n += 1;
        if n as usize > ctx.max_terms() {
            return Err(Error::TruncationBudget { what: "gamma0 series".into(), limit: ctx.max_terms() });
        }
    }
    let v = -Float::with_val(prec, u.ln_ref()) - euler_gamma(&hi) - sum;
    Ok(Float::with_val(ctx.prec(), v))
}

/// `Gamma(0, u) = e^-u / (u + 1 - 1/(u + 3 - 4/(u + 5 - ...)))` by modified Lentz.
pub fn gamma0_cf(u: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if *u <= 0 {
        return Err(Error::domain("gamma0 needs u > 0"));
    }
    let prec = ctx.prec() + 32;
    let u = Float::with_val(prec, u);
    let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) * 4));
    let eps = Float::with_val(prec, Float::i_exp(1, -(ctx.prec() as i32) - 12));
    let mut b = Float::with_val(prec, &u + 1u32);
    let mut f = b.clone();
    let mut c = f.clone();
    let mut d = Float::new(prec);
    let mut j: u64 = 1;
    loop {
        let a = Float::with_val(prec, -((j * j) as f64));
        b += 2u32;
        d = Float::with_val(prec, &a * &d) + &b;
        if d.is_zero() {
            d = tiny.clone();
        }
        c = Float::with_val(prec, &a / &c) + &b;
        if c.is_zero() {
            c = tiny.clone();
        }
        d = d.recip();
        let delta = Float::with_val(prec, &c * &d);
        f *= &delta;
        let dev = Float::with_val(prec, delta - 1u32).abs();
        if dev < eps {
            break;
        }
        j += 1;
        if j as usize > ctx.max_terms() {
            return Err(Error::TruncationBudget { what: "gamma0 continued fraction".into(), limit: ctx.max_terms() });
        }
    }
    let v = Float::with_val(prec, (-u).exp()) / f;
    Ok(Float::with_val(ctx.prec(), v))
}

/// `Gamma(x)` for `x > 0`.
pub fn gamma(x: &Real, ctx: &PrecisionContext) -> Real {
    Float::with_val(ctx.prec(), x.gamma_ref())
}

/// Taylor jet of `log Gamma` at `x0 > 0` through degree `degree`.
///
/// The argument is shifted up to `y >= y_min`, the Stirling series is applied
/// to the jet `y + e`, and the shift is undone with the logarithm of the
/// product `x0 (x0+1) ... (y-1)`.
pub fn loggamma_jet(x0: &Real, degree: usize, ctx: &PrecisionContext) -> Result<Jet> {
    if *x0 <= 0 {
        return Err(Error::domain("loggamma_jet needs x0 > 0"));
    }
    let prec = ctx.prec() + 32;
    let hi = PrecisionContext::new(prec)?;
    let y_min = (prec as f64 * 0.25).max(2.0 * degree as f64 + 10.0);
    let x0f = x0.to_f64();
    let shift = if x0f < y_min { (y_min - x0f).ceil() as u32 } else { 0 };
    let x0h = Float::with_val(prec, x0);
    let y = Float::with_val(prec, &x0h + shift);

    let mut prod = Jet::constant(&x0h, hi.one(), degree);
    for j in 0..shift {
        let lin = Jet::variable(&x0h, degree).shift(&hi.real(j));
        prod = &prod * &lin;
    }

    let v = Jet::variable(&y, degree);
    let ln_v = v.ln()?;
    let half = hi.real(0.5);
    let mut acc = &v.shift(&-half.clone()) * &ln_v;
    acc = &acc - &v;
    let ln2pi = Float::with_val(prec, hi.pi() * 2u32).ln() / 2u32;
    acc = acc.shift(&ln2pi);

    let inv = v.recip()?;
    let inv2 = &inv * &inv;
    let mut pw = inv.clone();
    let yf = y.to_f64();
    let target = -(prec as f64);
    let mut k: usize = 1;
    loop {
        let b = bernoulli(2 * k);
        let coef = Float::with_val(prec, &b) / ((2 * k) as u32 * (2 * k - 1) as u32);
        acc = &acc + &pw.scale(&coef);
        // size of the next term's highest Taylor coefficient
        let kn = k + 1;
        let bn = Float::with_val(64, &bernoulli(2 * kn)).abs().to_f64().log2();
        let worst = (0..=degree)
            .map(|dd| {
                let p = 2 * kn - 1;
                let lc = ln_binom(p + dd - 1, dd);
                bn - ((2 * kn) as f64 * (2 * kn - 1) as f64).log2() + lc - (p + dd) as f64 * yf.log2()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if worst < target {
            break;
        }
        pw = &pw * &inv2;
        k += 1;
        if k > 4 * prec as usize {
            return Err(Error::TruncationBudget { what: "loggamma Stirling series".into(), limit: k });
        }
    }
    let shifted = Jet::new(x0h.clone(), acc.coeffs().to_vec());
    let out = if shift > 0 { &shifted - &prod.ln()? } else { shifted };
    let coeffs = out.coeffs().iter().map(|c| Float::with_val(ctx.prec(), c)).collect();
    Ok(Jet::new(Float::with_val(ctx.prec(), x0), coeffs))
}

// log2 C(n, k)
fn ln_binom(n: usize, k: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..k {
        s += ((n - i) as f64).log2() - ((i + 1) as f64).log2();
    }
    s
}

/// Bell-polynomial argument list `(x_1, (-1)^1 1! zeta(2), ..., (-1)^(k-1) (k-1)! zeta(k))`.
pub fn gamma_bell_args(first: Real, n: usize, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let mut xs = Vec::with_capacity(n.max(1));
    xs.push(first);
    for k in 2..=n.max(1) as u32 {
        let z = zeta_value(k, ctx)?;
        let mut v = z * factorial(k - 1, ctx.prec());
        if k % 2 == 0 {
            v = -v;
        }
        xs.push(v);
    }
    Ok(xs)
}

/// Taylor jet at 0 of `e^(-gamma x)/Gamma(x+1)` (`with_exp_gamma`) or of
/// `1/Gamma(x+1)`, coefficient `n` being `B_n(...)/n!`.
pub fn inv_gamma_taylor(degree: usize, with_exp_gamma: bool, ctx: &PrecisionContext) -> Result<Jet> {
    let first = if with_exp_gamma { ctx.zero() } else { euler_gamma(ctx) };
    let xs = gamma_bell_args(first, degree, ctx)?;
    let b = bell_all(degree, &xs, ctx)?;
    let coeffs = b
        .into_iter()
        .enumerate()
        .map(|(n, v)| v / factorial(n as u32, ctx.prec()))
        .collect();
    Ok(Jet::new(ctx.zero(), coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Real, b: &Real, tol: f64) -> bool {
        Float::with_val(a.prec(), a - b).abs() <= tol
    }

    #[test]
    fn pochhammer_basics() {
        let ctx = PrecisionContext::default();
        assert_eq!(pochhammer(&ctx.real(7.25), 0, &ctx), 1);
        assert_eq!(pochhammer(&ctx.one(), 6, &ctx), 720);
        assert_eq!(pochhammer(&ctx.real(0.5), 2, &ctx), 0.75);
    }

    #[test]
    fn stirling_small_values() {
        assert_eq!(stirling_first_unsigned(3, 2).unwrap(), 3);
        assert_eq!(stirling_first_unsigned(9, 9).unwrap(), 1);
        assert_eq!(stirling_first_unsigned(7, 1).unwrap(), 720);
        assert!(stirling_first_unsigned(3, 4).is_err());
        assert!(stirling_first_unsigned(3, 0).is_err());
        // beyond the cached table
        assert_eq!(stirling_first_unsigned(70, 70).unwrap(), 1);
        let big = stirling_first_unsigned(70, 1).unwrap();
        assert_eq!(big, Integer::from(Integer::factorial(69)));
    }

    #[test]
    fn stirling_ratio_matches_exact() {
        let ctx = PrecisionContext::default();
        let t = stirling_ratio_table(30, 5, &ctx);
        for m in 1..=30u32 {
            for l in 1..=5u32.min(m) {
                let exact = Rational::from((stirling_first_unsigned(m, l).unwrap(), Integer::from(Integer::factorial(m))));
                let want = Float::with_val(ctx.prec(), &exact);
                assert!(close(&t[m as usize][l as usize], &want, 1e-70));
            }
        }
    }

    #[test]
    fn bell_low_orders() {
        let ctx = PrecisionContext::default();
        let xs = vec![ctx.real(3), ctx.real(5)];
        assert_eq!(bell_complete(0, &[], &ctx).unwrap(), 1);
        assert_eq!(bell_complete(2, &xs, &ctx).unwrap(), 14);
        assert!(bell_complete(3, &xs, &ctx).is_err());
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(3), 0);
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
    }

    #[test]
    fn zeta_closed_forms() {
        let ctx = PrecisionContext::default();
        let pi = ctx.pi();
        let z2 = Float::with_val(ctx.prec(), &pi * &pi) / 6u32;
        let z4 = Float::with_val(ctx.prec(), pi.clone().pow(4u32)) / 90u32;
        assert!(close(&zeta_value(2, &ctx).unwrap(), &z2, 1e-72));
        assert!(close(&zeta_value(4, &ctx).unwrap(), &z4, 1e-72));
        assert!(zeta_value(1, &ctx).is_err());
    }

    #[test]
    fn euler_gamma_digits() {
        let ctx = PrecisionContext::default();
        assert!(euler_gamma(&ctx).to_string_radix(10, Some(10)).starts_with("5.772156649"));
    }

    #[test]
    fn gamma0_methods_agree_at_boundary() {
        let ctx = PrecisionContext::default();
        let one = ctx.one();
        let s = gamma0_series(&one, &ctx).unwrap();
        let c = gamma0_cf(&one, &ctx).unwrap();
        assert!(close(&s, &c, 2f64.powi(8 - 256)));
        assert!(gamma0(&ctx.zero(), &ctx).is_err());
    }

    #[test]
    fn loggamma_jet_at_one() {
        let ctx = PrecisionContext::default();
        let j = loggamma_jet(&ctx.one(), 4, &ctx).unwrap();
        assert!(j.value().clone().abs() < 1e-70);
        assert!(close(j.coeff(1), &-euler_gamma(&ctx), 1e-70));
        let half_z2 = zeta_value(2, &ctx).unwrap() / 2u32;
        assert!(close(j.coeff(2), &half_z2, 1e-70));
        assert!(loggamma_jet(&ctx.zero(), 2, &ctx).is_err());
    }

    #[test]
    fn inverse_gamma_taylor_low_coefficients() {
        let ctx = PrecisionContext::default();
        let g = euler_gamma(&ctx);
        let j = inv_gamma_taylor(3, false, &ctx).unwrap();
        assert_eq!(*j.value(), 1);
        assert!(close(j.coeff(1), &g, 1e-70));
        let want = (Float::with_val(ctx.prec(), &g * &g) - zeta_value(2, &ctx).unwrap()) / 2u32;
        assert!(close(j.coeff(2), &want, 1e-70));
        let je = inv_gamma_taylor(3, true, &ctx).unwrap();
        assert_eq!(*je.value(), 1);
        assert!(je.coeff(1).is_zero());
    }
}
