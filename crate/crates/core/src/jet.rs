//! Truncated Taylor series ("jets") in one real variable.
//!
//! A `Jet` of degree `D` at `x0` stores `c_0..c_D` with
//! `f(x0 + e) = c_0 + c_1 e + ... + c_D e^D + O(e^(D+1))`, so the k-th
//! derivative is `k! * c_k`. All arithmetic is exact up to truncation at
//! degree `D`; binary operations truncate to the smaller degree.

use std::ops::{Add, Mul, Neg, Sub};

use rug::Float;

use crate::context::{factorial, Real};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    center: Real,
    coeffs: Vec<Real>,
}

impl Jet {
    pub fn new(center: Real, coeffs: Vec<Real>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the constant coefficient");
        Jet { center, coeffs }
    }

    pub fn constant(center: &Real, value: Real, degree: usize) -> Self {
        let prec = value.prec();
        let mut coeffs = vec![Float::new(prec); degree + 1];
        coeffs[0] = value;
        Jet { center: center.clone(), coeffs }
    }

    /// The identity function `x` expanded at `center`.
    pub fn variable(center: &Real, degree: usize) -> Self {
        let prec = center.prec();
        let mut coeffs = vec![Float::new(prec); degree + 1];
        coeffs[0] = center.clone();
        if degree >= 1 {
            coeffs[1] = Float::with_val(prec, 1);
        }
        Jet { center: center.clone(), coeffs }
    }

    pub fn center(&self) -> &Real {
        &self.center
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Real {
        &self.coeffs[k]
    }

    pub fn value(&self) -> &Real {
        &self.coeffs[0]
    }

    /// k-th derivative at the center, `k! * c_k`.
    pub fn derivative(&self, k: usize) -> Result<Real> {
        if k > self.degree() {
            return Err(Error::JetDegree { have: self.degree(), need: k });
        }
        let prec = self.coeffs[k].prec();
        Ok(Float::with_val(prec, &self.coeffs[k] * factorial(k as u32, prec)))
    }

    pub fn truncate(&self, degree: usize) -> Jet {
        let d = degree.min(self.degree());
        Jet { center: self.center.clone(), coeffs: self.coeffs[..=d].to_vec() }
    }

    pub fn scale(&self, s: &Real) -> Jet {
        let coeffs = self.coeffs.iter().map(|c| Float::with_val(c.prec(), c * s)).collect();
        Jet { center: self.center.clone(), coeffs }
    }

    /// Add a constant to the value coefficient.
    pub fn shift(&self, s: &Real) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    pub fn recip(&self) -> Result<Jet> {
        let one = Jet::constant(&self.center, Float::with_val(self.prec(), 1), self.degree());
        one.div(self)
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        if other.coeffs[0].is_zero() {
            return Err(Error::domain("jet division by a series with zero constant term"));
        }
        let d = self.degree().min(other.degree());
        let prec = self.prec();
        let mut out: Vec<Real> = Vec::with_capacity(d + 1);
        for n in 0..=d {
            let mut acc = Float::with_val(prec, &self.coeffs[n]);
            for k in 1..=n {
                acc -= Float::with_val(prec, &other.coeffs[k] * &out[n - k]);
            }
            acc /= &other.coeffs[0];
            out.push(acc);
        }
        Ok(Jet { center: self.center.clone(), coeffs: out })
    }

    pub fn exp(&self) -> Jet {
        let d = self.degree();
        let prec = self.prec();
        let mut out: Vec<Real> = Vec::with_capacity(d + 1);
        out.push(Float::with_val(prec, self.coeffs[0].exp_ref()));
        for n in 1..=d {
            let mut acc = Float::new(prec);
            for k in 1..=n {
                acc += Float::with_val(prec, &self.coeffs[k] * &out[n - k]) * (k as u32);
            }
            acc /= n as u32;
            out.push(acc);
        }
        Jet { center: self.center.clone(), coeffs: out }
    }

    pub fn ln(&self) -> Result<Jet> {
        if self.coeffs[0] <= 0 {
            return Err(Error::domain("jet logarithm needs a positive constant term"));
        }
        let d = self.degree();
        let prec = self.prec();
        let a0 = &self.coeffs[0];
        let mut out: Vec<Real> = Vec::with_capacity(d + 1);
        out.push(Float::with_val(prec, a0.ln_ref()));
        for n in 1..=d {
            let mut acc = Float::new(prec);
            for k in 1..n {
                acc += Float::with_val(prec, &out[k] * &self.coeffs[n - k]) * (k as u32);
            }
            acc /= n as u32;
            let v = Float::with_val(prec, &self.coeffs[n] - &acc) / a0;
            out.push(v);
        }
        Ok(Jet { center: self.center.clone(), coeffs: out })
    }

    pub fn powi(&self, n: i32) -> Result<Jet> {
        let mut base = self.clone();
        let mut acc = Jet::constant(&self.center, Float::with_val(self.prec(), 1), self.degree());
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        if n < 0 {
            acc.recip()
        } else {
            Ok(acc)
        }
    }

    /// Evaluate the truncated polynomial at `center + h`.
    pub fn eval_offset(&self, h: &Real) -> Real {
        let prec = self.prec();
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= h;
            acc += c;
        }
        acc
    }

    fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let d = self.degree().min(rhs.degree());
        let coeffs = (0..=d)
            .map(|k| Float::with_val(self.prec(), &self.coeffs[k] + &rhs.coeffs[k]))
            .collect();
        Jet { center: self.center.clone(), coeffs }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let d = self.degree().min(rhs.degree());
        let coeffs = (0..=d)
            .map(|k| Float::with_val(self.prec(), &self.coeffs[k] - &rhs.coeffs[k]))
            .collect();
        Jet { center: self.center.clone(), coeffs }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let d = self.degree().min(rhs.degree());
        let prec = self.prec();
        let mut coeffs = vec![Float::new(prec); d + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(d + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(d + 1 - i) {
                coeffs[i + j] += Float::with_val(prec, a * b);
            }
        }
        Jet { center: self.center.clone(), coeffs }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let coeffs = self.coeffs.iter().map(|c| Float::with_val(c.prec(), -c)).collect();
        Jet { center: self.center.clone(), coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::PrecisionContext;

    fn poly(ctx: &PrecisionContext, cs: &[i64]) -> Jet {
        Jet::new(ctx.zero(), cs.iter().map(|&c| ctx.real(c)).collect())
    }

    #[test]
    fn product_is_truncated_polynomial_product() {
        let ctx = PrecisionContext::default();
        // (1 + 2e + 3e^2)(4 - e) = 4 + 7e + 10e^2 - 3e^3
        let p = &poly(&ctx, &[1, 2, 3, 0]) * &poly(&ctx, &[4, -1, 0, 0]);
        let want = [4, 7, 10, -3];
        for (c, w) in p.coeffs().iter().zip(want) {
            assert_eq!(*c, w);
        }
        let t = &poly(&ctx, &[1, 2, 3]) * &poly(&ctx, &[4, -1, 0]);
        assert_eq!(t.degree(), 2);
    }

    #[test]
    fn derivative_scales_by_factorial() {
        let ctx = PrecisionContext::default();
        // x^3 at x0 = 2: coefficients 8, 12, 6, 1
        let x = Jet::variable(&ctx.real(2), 3);
        let cube = x.powi(3).unwrap();
        assert_eq!(cube.derivative(0).unwrap(), 8);
        assert_eq!(cube.derivative(1).unwrap(), 12);
        assert_eq!(cube.derivative(2).unwrap(), 12);
        assert_eq!(cube.derivative(3).unwrap(), 6);
        assert!(cube.derivative(4).is_err());
    }

    #[test]
    fn exp_of_variable_has_inverse_factorials() {
        let ctx = PrecisionContext::default();
        let e = Jet::variable(&ctx.zero(), 6).exp();
        for k in 0..=6u32 {
            let want = ctx.one() / factorial(k, ctx.prec());
            let diff = Float::with_val(ctx.prec(), e.coeff(k as usize) - &want).abs();
            assert!(diff < 1e-70);
        }
    }

    #[test]
    fn division_and_negative_powers() {
        let ctx = PrecisionContext::default();
        let x = Jet::variable(&ctx.real(3), 5);
        let inv = x.powi(-2).unwrap();
        let back = &inv * &x.powi(2).unwrap();
        assert!(Float::with_val(ctx.prec(), back.value() - 1u32).abs() < 1e-70);
        for k in 1..=5 {
            assert!(back.coeff(k).clone().abs() < 1e-70);
        }
        assert!(poly(&ctx, &[0, 1]).recip().is_err());
        assert!(poly(&ctx, &[-1, 1]).ln().is_err());
    }
}
