//! Multiple polylogarithms and their Hurwitz-type shifts.
//!
//! All variants reduce to one nested-sum engine. For `n = start, start+1, ...`
//! it keeps running sums `A_j(n) = sum over n_1 < ... < n_j < n` and adds the
//! level-`j` term `z_j^n (n+x)^-k_j A_{j-1}(n)` to `A_j`. The outer sum is
//! stopped by a rigorous geometric tail bound, see [`tail_log2`].

use rug::Float;

use crate::combinatorics::weak_compositions;
use crate::context::{PrecisionContext, Real};
use crate::error::{Error, Result};
use crate::special::binomial;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    parts: Vec<u32>,
}

impl MultiIndex {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::out_of_range("multi-index must be nonempty"));
        }
        if parts.contains(&0) {
            return Err(Error::out_of_range(format!("multi-index parts must be >= 1, got {parts:?}")));
        }
        Ok(MultiIndex { parts })
    }

    /// `(1, ..., 1, last)` with `ones` leading ones.
    pub fn ones_then(ones: usize, last: u32) -> Result<Self> {
        let mut parts = vec![1u32; ones];
        parts.push(last);
        MultiIndex::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolylogArgs {
    index: MultiIndex,
    args: Vec<Real>,
}

impl PolylogArgs {
    pub fn new(index: MultiIndex, args: Vec<Real>) -> Result<Self> {
        if index.depth() != args.len() {
            return Err(Error::out_of_range(format!(
                "index depth {} does not match {} arguments",
                index.depth(),
                args.len()
            )));
        }
        for (i, z) in args.iter().enumerate() {
            if !z.is_finite() || Float::with_val(z.prec(), z.abs_ref()) >= 1 {
                return Err(Error::domain(format!(
                    "polylog argument z_{} = {} must satisfy |z| < 1",
                    i + 1,
                    z.to_f64()
                )));
            }
        }
        Ok(PolylogArgs { index, args })
    }

    pub fn index(&self) -> &MultiIndex {
        &self.index
    }

    pub fn args(&self) -> &[Real] {
        &self.args
    }
}

const GUARD_BITS: u32 = 16;

// log2 of an upper bound for sum_{n > big_n} F C(n - start, s - 1) rho^n / (n + x)^k_s.
fn tail_log2(big_n: u64, start: u64, s: usize, rho: f64, k_last: u32, x: f64, log2_f: f64) -> f64 {
    if rho == 0.0 {
        return f64::NEG_INFINITY;
    }
    let n1 = big_n + 1;
    let m = (n1 - start) as f64; // n1 - start >= 1
    let j = (s - 1) as f64;
    // log2 C(m, j)
    let mut lc = 0.0;
    for i in 0..s - 1 {
        lc += (m - i as f64).max(1.0).log2() - (i as f64 + 1.0).log2();
    }
    // successive term ratio for n >= n1 is at most q
    let q = if m - j >= 1.0 { (m + 1.0) / (m + 1.0 - j) * rho } else { f64::INFINITY };
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let denom = k_last as f64 * (n1 as f64 + x).log2();
    log2_f + lc + n1 as f64 * rho.log2() - denom - (1.0 - q).log2()
}

struct Engine<'a> {
    index: &'a [u32],
    z: Vec<Real>,
    start: u64,
    shift: Option<Real>,
    what: &'static str,
}

impl Engine<'_> {
    fn run(&self, ctx: &PrecisionContext) -> Result<Real> {
        let s = self.index.len();
        let prec = ctx.prec() + GUARD_BITS;
        let zf: Vec<f64> = self.z.iter().map(|z| z.to_f64().abs()).collect();
        let rho = zf.iter().rev().scan(1.0f64, |p, v| {
            *p *= v.min(1.0);
            Some(*p)
        });
        let rho = rho.fold(0.0f64, f64::max);
        let xf = self.shift.as_ref().map(|x| x.to_f64()).unwrap_or(0.0);
        let log2_f = if self.start == 0 {
            (-(self.index[0] as f64) * xf.log2()).max(0.0)
        } else {
            0.0
        };
        let eps_log2 = ctx.log2_series_eps();
        let kmax = *self.index.iter().max().expect("nonempty index") as usize;

        let z: Vec<Real> = self.z.iter().map(|v| Float::with_val(prec, v)).collect();
        let mut pow: Vec<Real> = z
            .iter()
            .map(|zj| if self.start == 0 { Float::with_val(prec, 1u32) } else { zj.clone() })
            .collect();
        // acc[j] = A_j, acc[0] = 1
        let mut acc: Vec<Real> = vec![Float::new(prec); s + 1];
        acc[0] = Float::with_val(prec, 1u32);
        let mut inv_pows: Vec<Real> = vec![Float::new(prec); kmax + 1];
        let shift = self.shift.as_ref().map(|x| Float::with_val(prec, x));

        let mut n = self.start;
        loop {
            let base = match &shift {
                Some(x) => Float::with_val(prec, x + n),
                None => Float::with_val(prec, n),
            };
            let inv = base.recip();
            inv_pows[1] = inv.clone();
            for k in 2..=kmax {
                inv_pows[k] = Float::with_val(prec, &inv_pows[k - 1] * &inv);
            }
            for j in (1..=s).rev() {
                if acc[j - 1].is_zero() || pow[j - 1].is_zero() {
                    continue;
                }
                let mut term = Float::with_val(prec, &pow[j - 1] * &inv_pows[self.index[j - 1] as usize]);
                term *= &acc[j - 1];
                acc[j] += term;
            }
            for j in 0..s {
                pow[j] *= &z[j];
            }
            let mag = if acc[s].is_zero() {
                0.0
            } else {
                (acc[s].get_exp().unwrap_or(0) as f64).max(0.0)
            };
            let tail = tail_log2(n, self.start, s, rho, self.index[s - 1], xf, log2_f);
            if n + 1 >= s as u64 + self.start && tail < eps_log2 + mag {
                break;
            }
            n += 1;
            if n as usize > ctx.max_terms() {
                return Err(Error::TruncationBudget { what: self.what.into(), limit: ctx.max_terms() });
            }
        }
        Ok(Float::with_val(ctx.prec(), &acc[s]))
    }
}

/// `Li_k(z) = sum_{1 <= n_1 < ... < n_s} prod z_i^n_i / n_i^k_i`.
pub fn mpl(p: &PolylogArgs, ctx: &PrecisionContext) -> Result<Real> {
    if p.args.iter().any(|z| z.is_zero()) {
        return Ok(ctx.zero());
    }
    Engine { index: &p.index.parts, z: p.args.clone(), start: 1, shift: None, what: "multiple polylogarithm" }.run(ctx)
}

/// One-variable `Li_k(z) = Li_k(1, ..., 1, z)`.
pub fn mpl_one_var(index: &MultiIndex, z: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if Float::with_val(z.prec(), z.abs_ref()) >= 1 || !z.is_finite() {
        return Err(Error::domain(format!("one-variable polylog needs |z| < 1, got {}", z.to_f64())));
    }
    if z.is_zero() {
        return Ok(ctx.zero());
    }
    let mut args = vec![ctx.one(); index.depth()];
    args[index.depth() - 1] = Float::with_val(ctx.prec(), z);
    Engine { index: &index.parts, z: args, start: 1, shift: None, what: "one-variable polylogarithm" }.run(ctx)
}

fn check_shift(x: &Real) -> Result<()> {
    if *x <= 0 || !x.is_finite() {
        return Err(Error::domain(format!("Hurwitz-type polylog needs x > 0, got {}", x.to_f64())));
    }
    Ok(())
}

/// `Li^0_k(x; z)`: denominators `(n_i + x)^k_i`, summation from `n_1 >= 0`,
/// with `z_1^0 = 1` even for `z_1 = 0`.
pub fn hurwitz_li0(x: &Real, p: &PolylogArgs, ctx: &PrecisionContext) -> Result<Real> {
    check_shift(x)?;
    if p.args[1..].iter().any(|z| z.is_zero()) {
        return Ok(ctx.zero());
    }
    Engine { index: &p.index.parts, z: p.args.clone(), start: 0, shift: Some(x.clone()), what: "Hurwitz polylogarithm" }
        .run(ctx)
}

/// `Li^1_k(x; z)`: as [`hurwitz_li0`] with `n_1 >= 1`.
pub fn hurwitz_li1(x: &Real, p: &PolylogArgs, ctx: &PrecisionContext) -> Result<Real> {
    check_shift(x)?;
    if p.args.iter().any(|z| z.is_zero()) {
        return Ok(ctx.zero());
    }
    Engine { index: &p.index.parts, z: p.args.clone(), start: 1, shift: Some(x.clone()), what: "Hurwitz polylogarithm" }
        .run(ctx)
}

/// Partial sum through order `order` of
/// `Li^1_k(x; z) = sum_l (-x)^l sum_{|w| = l} prod C(k_i + w_i - 1, w_i) Li_{k+w}(z)`.
pub fn li1_series_in_x(p: &PolylogArgs, x: &Real, order: u32, ctx: &PrecisionContext) -> Result<Real> {
    if *x <= 0 || *x >= 1 {
        return Err(Error::domain(format!("li1_series_in_x needs 0 < x < 1, got {}", x.to_f64())));
    }
    let s = p.index.depth() as u32;
    let mut total = ctx.zero();
    let mut xp = ctx.one();
    for l in 0..=order {
        let mut inner = ctx.zero();
        for w in weak_compositions(l, s)? {
            let mut coef = rug::Integer::from(1);
            let mut parts = Vec::with_capacity(s as usize);
            for (k, wi) in p.index.parts.iter().zip(&w.parts) {
                coef *= binomial(k + wi - 1, *wi);
                parts.push(k + wi);
            }
            let q = PolylogArgs { index: MultiIndex { parts }, args: p.args.clone() };
            inner += mpl(&q, ctx)? * coef;
        }
        if l % 2 == 1 {
            total -= Float::with_val(ctx.prec(), &inner * &xp);
        } else {
            total += Float::with_val(ctx.prec(), &inner * &xp);
        }
        xp *= x;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(ctx: &PrecisionContext, k: &[u32], z: &[&str]) -> PolylogArgs {
        let zs = z.iter().map(|s| ctx.parse(s).unwrap()).collect();
        PolylogArgs::new(MultiIndex::new(k.to_vec()).unwrap(), zs).unwrap()
    }

    #[test]
    fn li1_is_minus_log() {
        let ctx = PrecisionContext::default();
        for z in ["0.1", "0.5", "0.9"] {
            let p = args(&ctx, &[1], &[z]);
            let want = -Float::with_val(ctx.prec(), 1u32 - ctx.parse(z).unwrap()).ln();
            let d = Float::with_val(ctx.prec(), mpl(&p, &ctx).unwrap() - want).abs();
            assert!(d < 1e-70, "{z}: {d}");
        }
    }

    #[test]
    fn rejects_unit_arguments() {
        let ctx = PrecisionContext::default();
        let idx = MultiIndex::new(vec![1, 2]).unwrap();
        assert!(PolylogArgs::new(idx.clone(), vec![ctx.one(), ctx.real(0.5)]).is_err());
        assert!(PolylogArgs::new(idx.clone(), vec![ctx.real(0.5)]).is_err());
        assert!(MultiIndex::new(vec![0, 2]).is_err());
        assert!(mpl_one_var(&idx, &ctx.real(-1), &ctx).is_err());
    }

    #[test]
    fn zero_first_argument() {
        let ctx = PrecisionContext::default();
        let p = args(&ctx, &[2, 1], &["0", "0.5"]);
        assert!(mpl(&p, &ctx).unwrap().is_zero());
    }

    #[test]
    fn hurwitz_depth_one_difference() {
        let ctx = PrecisionContext::default();
        let x = ctx.parse("0.3").unwrap();
        let p = args(&ctx, &[2], &["0.4"]);
        let d = hurwitz_li0(&x, &p, &ctx).unwrap() - hurwitz_li1(&x, &p, &ctx).unwrap();
        let want = Float::with_val(ctx.prec(), x.clone() * &x).recip();
        assert!(Float::with_val(ctx.prec(), d - want).abs() < 1e-70);
        assert!(hurwitz_li1(&ctx.zero(), &p, &ctx).is_err());
    }

    #[test]
    fn li1_series_order_zero_is_li() {
        let ctx = PrecisionContext::default();
        let p = args(&ctx, &[1, 2], &["0.2", "0.5"]);
        let x = ctx.parse("0.1").unwrap();
        let s0 = li1_series_in_x(&p, &x, 0, &ctx).unwrap();
        assert_eq!(s0, mpl(&p, &ctx).unwrap());
        assert!(li1_series_in_x(&p, &ctx.one(), 3, &ctx).is_err());
    }
}
