//! Direct evaluators for `M_r`, `I_r`, `S_r`, `T_{r,l}` and the
//! Euler-Zagier values `zeta_EZ,r(1, ..., 1, x+1)`.
//!
//! `M_r` and `I_r` are computed from one-dimensional integral
//! representations,
//!
//! ```text
//! I_r = 1/Gamma(x)      int_0^inf prod Gamma(0, w_i u) e^(-a u) u^(x-1) du
//! M_r = (-1)^r/Gamma(x) int_0^inf prod log(1 - e^(-w_i t)) e^(-a t) t^(x-1) dt
//! ```
//!
//! split at 1 into a tanh-sinh piece and a half-line piece. The brute-force
//! evaluators (`i_brute`, `m_direct`) exist to cross-check these.

use rug::ops::Pow;
use rug::Float;

use crate::context::{PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quad::{half_line, tanh_sinh};
use crate::special::{euler_gamma, gamma, gamma0, loggamma_jet, stirling_ratio_table, zeta_value};

/// Weights `omega_1..omega_r > 0` and shift `a >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightConfig {
    omega: Vec<Real>,
    a: Real,
    subset_sums: Vec<Real>,
}

const SUBSET_CACHE_MAX_R: usize = 16;

impl WeightConfig {
    pub fn new(omega: Vec<Real>, a: Real) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::domain("a weight configuration needs r >= 1"));
        }
        for (i, w) in omega.iter().enumerate() {
            if !(w.is_finite() && *w > 0) {
                return Err(Error::domain(format!("omega_{} must be positive, got {}", i + 1, w.to_f64())));
            }
        }
        if !(a.is_finite() && a >= 0) {
            return Err(Error::domain(format!("a must be nonnegative, got {}", a.to_f64())));
        }
        let prec = a.prec().max(omega[0].prec());
        let r = omega.len();
        let mut subset_sums = Vec::new();
        if r <= SUBSET_CACHE_MAX_R {
            subset_sums = vec![Float::new(prec); 1 << r];
            for mask in 1usize..(1 << r) {
                let low = mask.trailing_zeros() as usize;
                let rest = mask & (mask - 1);
                subset_sums[mask] = Float::with_val(prec, &subset_sums[rest] + &omega[low]);
            }
        }
        Ok(WeightConfig { omega, a, subset_sums })
    }

    /// Parse decimal strings at the context precision.
    pub fn parse(omega: &[&str], a: &str, ctx: &PrecisionContext) -> Result<Self> {
        let om = omega.iter().map(|s| ctx.parse(s)).collect::<Result<Vec<_>>>()?;
        WeightConfig::new(om, ctx.parse(a)?)
    }

    pub fn r(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[Real] {
        &self.omega
    }

    pub fn a(&self) -> &Real {
        &self.a
    }

    /// `|omega|`.
    pub fn total(&self) -> Real {
        self.subset_sum(((1u128 << self.r()) - 1) as u64)
    }

    /// `|omega_J|` for the subset `J` given as a bitmask.
    pub fn subset_sum(&self, mask: u64) -> Real {
        if !self.subset_sums.is_empty() {
            return self.subset_sums[mask as usize].clone();
        }
        let prec = self.a.prec();
        let mut s = Float::new(prec);
        for (i, w) in self.omega.iter().enumerate() {
            if mask & (1u64 << i) != 0 {
                s += w;
            }
        }
        s
    }

    /// The configuration `(omega without omega_i, a + omega_i)`, or `None` when
    /// removing the only weight.
    pub fn without(&self, i: usize) -> Option<WeightConfig> {
        if self.r() == 1 {
            return None;
        }
        let mut om = self.omega.clone();
        let wi = om.remove(i);
        let a = Float::with_val(self.a.prec(), &self.a + &wi);
        WeightConfig::new(om, a).ok()
    }

    /// Restriction to the weights in `mask`, with `a` raised by the rest.
    pub fn restrict(&self, mask: u64) -> Option<WeightConfig> {
        let om: Vec<Real> = (0..self.r()).filter(|i| mask & (1u64 << i) != 0).map(|i| self.omega[i].clone()).collect();
        if om.is_empty() {
            return None;
        }
        let full = ((1u128 << self.r()) - 1) as u64;
        let a = Float::with_val(self.a.prec(), &self.a + self.subset_sum(full & !mask));
        WeightConfig::new(om, a).ok()
    }

    pub fn with_a(&self, a: Real) -> Result<WeightConfig> {
        WeightConfig::new(self.omega.clone(), a)
    }
}

fn check_x(x: &Real, what: &str) -> Result<()> {
    if !(x.is_finite() && *x > 0) {
        return Err(Error::domain(format!("{what} diverges unless x > 0, got x = {}", x.to_f64())));
    }
    Ok(())
}

/// `I_0(x; a) = a^-x`, the empty-weight case used by recurrences.
pub fn i_zero(x: &Real, a: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if *a <= 0 {
        return Err(Error::domain("I_0 needs a > 0"));
    }
    Ok(Float::with_val(ctx.prec(), a.pow(&-x.clone())))
}

fn split_integral<F>(f: F, decay: &Real, ctx: &PrecisionContext) -> Result<Real>
where
    F: Fn(&Real) -> Result<Real>,
{
    let left = tanh_sinh(&f, &ctx.zero(), &ctx.one(), ctx)?;
    let scale = Float::with_val(ctx.prec(), decay.recip_ref());
    let right = half_line(&f, &ctx.one(), &scale, ctx)?;
    Ok(left.value + right.value)
}

/// `I_r(x; omega, a)` by quadrature of the incomplete-gamma representation.
pub fn i_integral(x: &Real, w: &WeightConfig, ctx: &PrecisionContext) -> Result<Real> {
    check_x(x, "I_r")?;
    let prec = ctx.prec();
    let xm1 = Float::with_val(prec, x - 1u32);
    let f = |u: &Real| -> Result<Real> {
        let mut v = Float::with_val(prec, u.pow(&xm1));
        for wi in &w.omega {
            v *= gamma0(&Float::with_val(prec, wi * u), ctx)?;
        }
        if !w.a.is_zero() {
            v *= Float::with_val(prec, -Float::with_val(prec, &w.a * u)).exp();
        }
        Ok(v)
    };
    let decay = Float::with_val(prec, w.total() + &w.a);
    let integral = split_integral(f, &decay, ctx)?;
    Ok(integral / gamma(x, ctx))
}

fn log1m_exp(y: &Real) -> Real {
    let prec = y.prec();
    // log(1 - e^-y), accurate for small and large y
    if *y < std::f64::consts::LN_2 {
        let em1 = Float::with_val(prec, (-y.clone()).exp_m1());
        Float::with_val(prec, -em1).ln()
    } else {
        let e = Float::with_val(prec, (-y.clone()).exp());
        Float::with_val(prec, (-e).ln_1p_ref())
    }
}

/// `M_r(x; omega, a)` by quadrature of the `log(1 - e^-t)` representation.
pub fn m_integral(x: &Real, w: &WeightConfig, ctx: &PrecisionContext) -> Result<Real> {
    check_x(x, "M_r")?;
    let prec = ctx.prec();
    let xm1 = Float::with_val(prec, x - 1u32);
    let f = |t: &Real| -> Result<Real> {
        let mut v = Float::with_val(prec, t.pow(&xm1));
        for wi in &w.omega {
            v *= log1m_exp(&Float::with_val(prec, wi * t));
        }
        if !w.a.is_zero() {
            v *= Float::with_val(prec, -Float::with_val(prec, &w.a * t)).exp();
        }
        Ok(v)
    };
    let decay = Float::with_val(prec, w.total() + &w.a);
    let mut integral = split_integral(f, &decay, ctx)? / gamma(x, ctx);
    if w.r() % 2 == 1 {
        integral = -integral;
    }
    Ok(integral)
}

/// `I_r` straight from its definition for `r <= 2`, as nested
/// double-exponential integrals over `v_i = log t_i` in `[0, inf)`.
pub fn i_brute(x: &Real, w: &WeightConfig, ctx: &PrecisionContext) -> Result<Real> {
    check_x(x, "I_r")?;
    let prec = ctx.prec();
    let scale = Float::with_val(prec, x.recip_ref()) * w.r() as u32;
    let negx = Float::with_val(prec, -x);
    let base = |lin: &Real| -> Real { Float::with_val(prec, lin.pow(&negx)) };
    match w.r() {
        1 => {
            let f = |v: &Real| -> Result<Real> {
                let t = Float::with_val(prec, v.exp_ref());
                Ok(base(&(Float::with_val(prec, &w.omega[0] * t) + &w.a)))
            };
            Ok(half_line(f, &ctx.zero(), &scale, ctx)?.value)
        }
        2 => {
            let outer = |v1: &Real| -> Result<Real> {
                let c = Float::with_val(prec, &w.omega[0] * Float::with_val(prec, v1.exp_ref())) + &w.a;
                let inner = |v2: &Real| -> Result<Real> {
                    let t2 = Float::with_val(prec, v2.exp_ref());
                    Ok(base(&(Float::with_val(prec, &w.omega[1] * t2) + &c)))
                };
                Ok(half_line(inner, &ctx.zero(), &scale, ctx)?.value)
            };
            Ok(half_line(outer, &ctx.zero(), &scale, ctx)?.value)
        }
        r => Err(Error::out_of_range(format!("i_brute supports r <= 2, got r = {r}"))),
    }
}

/// Box partial sum of `M_r` over `1 <= n_i <= n_max` and an upper bound for
/// the omitted part, for `r <= 3`.
///
/// The bound uses `omega . n + a >= r (prod omega_i n_i)^(1/r)`, giving
/// `r^(1-x) (prod omega)^(-x/r) (r/x) N^(-x/r) (1 + r/x)^(r-1)`.
pub fn m_direct(x: &Real, w: &WeightConfig, n_max: u32, ctx: &PrecisionContext) -> Result<(Real, Real)> {
    check_x(x, "M_r")?;
    let r = w.r();
    if r > 3 {
        return Err(Error::out_of_range(format!("m_direct supports r <= 3, got r = {r}")));
    }
    if n_max == 0 {
        return Err(Error::out_of_range("m_direct needs a cutoff of at least 1"));
    }
    let prec = ctx.prec();
    let negx = Float::with_val(prec, -x);
    let mut sum = ctx.zero();
    let mut idx = vec![1u32; r];
    loop {
        let mut lin = w.a.clone();
        let mut den = 1u64;
        for (wi, &n) in w.omega.iter().zip(&idx) {
            lin += Float::with_val(prec, wi * n);
            den *= n as u64;
        }
        sum += Float::with_val(prec, lin.pow(&negx)) / den;
        // odometer
        let mut j = 0;
        loop {
            if j == r {
                let bound = m_direct_bound(x, w, n_max, ctx);
                return Ok((sum, bound));
            }
            if idx[j] < n_max {
                idx[j] += 1;
                break;
            }
            idx[j] = 1;
            j += 1;
        }
    }
}

fn m_direct_bound(x: &Real, w: &WeightConfig, n_max: u32, ctx: &PrecisionContext) -> Real {
    let prec = ctx.prec();
    let r = w.r() as u32;
    let rr = ctx.real(r);
    let alpha = Float::with_val(prec, x / r);
    let prod = w.omega.iter().fold(ctx.one(), |p, v| p * v);
    let mut b = Float::with_val(prec, (&rr).pow(Float::with_val(prec, 1u32 - x)));
    b *= Float::with_val(prec, prod.pow(&-alpha.clone()));
    b *= Float::with_val(prec, alpha.recip_ref());
    b *= Float::with_val(prec, ctx.real(n_max).pow(&-alpha.clone()));
    let one_plus = Float::with_val(prec, alpha.recip_ref()) + 1u32;
    b *= Float::with_val(prec, one_plus.pow(r - 1));
    b
}

/// `G_m = sum over compositions k of m into r parts of prod omega_i^k_i / (k_i k_i!)`
/// for `m = 0..=m_max`.
pub fn g_coeffs(omega: &[Real], m_max: usize, ctx: &PrecisionContext) -> Vec<Real> {
    let prec = ctx.prec();
    let mut poly = vec![ctx.zero(); m_max + 1];
    poly[0] = ctx.one();
    for wi in omega {
        let mut h = vec![ctx.zero(); m_max + 1];
        let mut p = ctx.one(); // wi^k / k!
        for k in 1..=m_max {
            p *= wi;
            p /= k as u32;
            h[k] = Float::with_val(prec, &p / k as u32);
        }
        let mut next = vec![ctx.zero(); m_max + 1];
        for (i, a) in poly.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for k in 1..=m_max - i {
                next[i + k] += Float::with_val(prec, a * &h[k]);
            }
        }
        poly = next;
    }
    poly
}

fn abs_sum_f64(omega: &[Real]) -> f64 {
    omega.iter().map(|w| w.to_f64().abs()).sum()
}

// Smallest M with sum_{m > M} |(x0)_m / m!| W^m (A + ln m)^D below 2^eps_log2.
fn s_truncation(x0: f64, wsum: f64, degree: usize, eps_log2: f64, max_terms: usize) -> Result<usize> {
    let a = if degree > 0 { 1.0 / x0 + 1.0 } else { 1.0 };
    let lw = wsum.log2();
    let mut lp = 0.0f64; // log2 |(x0)_m / m!|
    let mut m = 0usize;
    loop {
        m += 1;
        let f = (x0 + (m - 1) as f64).abs();
        if f == 0.0 {
            return Ok(m);
        }
        lp += (f / m as f64).log2();
        let mf = m as f64;
        let next = mf + 1.0;
        let growth = ((a + next.ln()) / (a + mf.ln())).powi(degree as i32);
        let q = wsum * ((x0 + mf) / next).max(1.0) * growth;
        if q < 1.0 {
            // bound for the first omitted term m+1, then the geometric tail
            let first = lp + ((x0 + mf).abs() / next).log2() + next * lw + degree as f64 * (a + next.ln()).log2();
            if first - (1.0 - q).log2() < eps_log2 {
                return Ok(m);
            }
        }
        if m > max_terms {
            return Err(Error::TruncationBudget { what: "S_r series".into(), limit: max_terms });
        }
    }
}

/// `S_r(x, omega) = sum_{k_i >= 1} (x)_{k_1+...+k_r} prod omega_i^k_i / (k_i k_i!)`,
/// grouped by total degree. Requires `sum |omega_i| < 1`.
pub fn s_series(x: &Real, omega: &[Real], ctx: &PrecisionContext) -> Result<Real> {
    let j = s_series_jet(&Jet::variable(x, 0), omega, ctx)?;
    Ok(j.value().clone())
}

/// [`s_series`] with `x` replaced by a jet, so that `x`-derivatives of `S_r`
/// come out of the same sum. Degree > 0 needs a positive center.
pub fn s_series_jet(x: &Jet, omega: &[Real], ctx: &PrecisionContext) -> Result<Jet> {
    let wsum = abs_sum_f64(omega);
    let exact_w = omega.iter().fold(ctx.zero(), |s, w| s + Float::with_val(ctx.prec(), w.abs_ref()));
    if exact_w >= 1 {
        return Err(Error::domain(format!("S_r needs sum |omega_i| < 1, got {wsum}")));
    }
    let degree = x.degree();
    let x0 = x.value().to_f64();
    if degree > 0 && x0 <= 0.0 {
        return Err(Error::domain("jet-valued S_r needs a positive expansion point"));
    }
    if omega.is_empty() {
        return Ok(Jet::constant(x.center(), ctx.one(), degree));
    }
    if wsum == 0.0 {
        return Ok(Jet::constant(x.center(), ctx.zero(), degree));
    }
    let m_max = s_truncation(x0, wsum, degree, ctx.log2_series_eps(), ctx.max_terms())?;
    let g = g_coeffs(omega, m_max, ctx);
    // P_m = (x)_m as a jet
    let mut p = Jet::constant(x.center(), ctx.one(), degree);
    let mut acc = Jet::constant(x.center(), ctx.zero(), degree);
    for (m, gm) in g.iter().enumerate().skip(1) {
        let lin = x.shift(&ctx.real((m - 1) as u32));
        p = &p * &lin;
        if !gm.is_zero() {
            acc = &acc + &p.scale(gm);
        }
    }
    Ok(acc)
}

/// `T_{r,l}(omega) = sum_m [m; l] G_m`, the coefficient of `x^l` in `S_r`.
pub fn t_coeff(r: usize, l: u32, omega: &[Real], ctx: &PrecisionContext) -> Result<Real> {
    if r != omega.len() || r == 0 {
        return Err(Error::out_of_range(format!("t_coeff: r = {r} but {} weights given", omega.len())));
    }
    if l == 0 {
        return Err(Error::out_of_range("t_coeff needs l >= 1"));
    }
    let wsum = abs_sum_f64(omega);
    let exact_w = omega.iter().fold(ctx.zero(), |s, w| s + Float::with_val(ctx.prec(), w.abs_ref()));
    if exact_w >= 1 {
        return Err(Error::domain(format!("T_{{r,l}} needs sum |omega_i| < 1, got {wsum}")));
    }
    if wsum == 0.0 {
        return Ok(ctx.zero());
    }
    // |[m;l]/m! * m! G_m| <= W^m, so the tail after M is W^(M+1)/(1-W).
    let lw = wsum.log2();
    let eps = ctx.log2_series_eps();
    let mut m_max = r.max(l as usize);
    while (m_max + 1) as f64 * lw - (1.0 - wsum).log2() >= eps {
        m_max += 1;
        if m_max > ctx.max_terms() {
            return Err(Error::TruncationBudget { what: "T_{r,l} series".into(), limit: ctx.max_terms() });
        }
    }
    let g = g_coeffs(omega, m_max, ctx);
    let u = stirling_ratio_table(m_max, l as usize, ctx);
    let mut acc = ctx.zero();
    let mut fact = ctx.one();
    for m in 1..=m_max {
        fact *= m as u32;
        if m < l as usize || g[m].is_zero() {
            continue;
        }
        acc += Float::with_val(ctx.prec(), &u[m][l as usize] * &g[m]) * &fact;
    }
    Ok(acc)
}

/// `zeta_EZ,r(1, ..., 1, x+1) = sum_n e_{r-1}(1, 1/2, ..., 1/(n-1)) / n^(x+1)`
/// for `r <= 3`.
///
/// Terms `n < N` are summed directly. The rest is the Euler-Maclaurin
/// formula for the interpolant `p_r(t) t^(-x-1)` with `p_2 = psi(t) + gamma`,
/// `p_3 = ((psi + gamma)^2 - zeta(2) + psi'(t)) / 2`; its derivatives at `N`
/// come from jets and its integral from a half-line quadrature.
pub fn zeta_ez_ones(r: usize, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    check_x(x, "zeta_EZ")?;
    if r == 0 || r > 3 {
        return Err(Error::out_of_range(format!("zeta_ez_ones supports 1 <= r <= 3, got {r}")));
    }
    let prec = ctx.prec();
    let bits = prec as f64;
    let big_n = (bits / 2.0).max(32.0).ceil() as u32;
    let s = Float::with_val(prec, x + 1u32);
    let negs = Float::with_val(prec, -&s);

    // head: e[j] = e_j(1, ..., 1/(n-1))
    let mut e = vec![ctx.zero(); r];
    e[0] = ctx.one();
    let mut head = ctx.zero();
    for n in 1..big_n {
        let t = Float::with_val(prec, ctx.real(n).pow(&negs));
        head += Float::with_val(prec, &e[r - 1] * &t);
        let inv = Float::with_val(prec, ctx.real(n).recip_ref());
        for j in (1..r).rev() {
            let add = Float::with_val(prec, &e[j - 1] * &inv);
            e[j] += add;
        }
    }

    // Euler-Maclaurin order from |B_2j/(2j)! f^(2j-1)(N)| ~ 2 (2j/(2 pi e N))^(2j)
    let c = 2.0 * std::f64::consts::PI * std::f64::consts::E * big_n as f64;
    let mut jmax = 1usize;
    while (2 * jmax) as f64 * (c / (2 * jmax) as f64).log2() < bits + 16.0 {
        jmax += 1;
    }
    let degree = 2 * jmax;
    let nn = ctx.real(big_n);
    let fjet = ez_interpolant_jet(r, &nn, &s, degree, ctx)?;
    let mut tail = Float::with_val(prec, fjet.value() / 2u32);
    for j in 1..=jmax {
        let b = crate::special::bernoulli(2 * j);
        let d = fjet.derivative(2 * j - 1)?;
        let term = Float::with_val(prec, &b) * d / crate::context::factorial(2 * j as u32, prec);
        tail -= term;
    }

    // int_N^inf p_r(t) t^(-x-1) dt = N^-x int_0^inf p_r(N e^v) e^(-x v) dv
    let integral = if r == 1 {
        Float::with_val(prec, nn.clone().pow(&-x.clone())) / x
    } else {
        let negx = Float::with_val(prec, -x);
        let f = |v: &Real| -> Result<Real> {
            let t = Float::with_val(prec, v.exp_ref()) * &nn;
            let p = ez_poly_value(r, &t, ctx)?;
            Ok(p * Float::with_val(prec, v * &negx).exp())
        };
        let scale = Float::with_val(prec, x.recip_ref());
        let q = half_line(f, &ctx.zero(), &scale, ctx)?;
        q.value * Float::with_val(prec, nn.clone().pow(&negx))
    };
    Ok(head + tail + integral)
}

fn ez_poly_value(r: usize, t: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let j = ez_poly_jet(r, t, 0, ctx)?;
    Ok(j.value().clone())
}

// p_r(t + e) as a jet of the given degree.
fn ez_poly_jet(r: usize, t: &Real, degree: usize, ctx: &PrecisionContext) -> Result<Jet> {
    let prec = ctx.prec();
    if r == 1 {
        return Ok(Jet::constant(t, ctx.one(), degree));
    }
    let lg = loggamma_jet(t, degree + 2, ctx)?;
    let psi: Vec<Real> = (0..=degree).map(|k| Float::with_val(prec, lg.coeff(k + 1) * (k as u32 + 1))).collect();
    let h = Jet::new(t.clone(), psi.clone()).shift(&euler_gamma(ctx));
    if r == 2 {
        return Ok(h);
    }
    let dpsi: Vec<Real> = (0..=degree).map(|k| Float::with_val(prec, lg.coeff(k + 2) * ((k as u32 + 1) * (k as u32 + 2)))).collect();
    let h2 = Jet::new(t.clone(), dpsi).shift(&-zeta_value(2, ctx)?);
    let sq = &h * &h;
    Ok((&sq + &h2).scale(&ctx.real(0.5)))
}

fn ez_interpolant_jet(r: usize, n: &Real, s: &Real, degree: usize, ctx: &PrecisionContext) -> Result<Jet> {
    let p = ez_poly_jet(r, n, degree, ctx)?;
    let t = Jet::variable(n, degree);
    let pw = t.ln()?.scale(&-s.clone()).exp();
    Ok(&p * &pw)
}
