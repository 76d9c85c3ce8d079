use mtz::asymptotics::{c_coeff, c_prime_coeff, expansion};
use mtz::combinatorics::{compositions, lambda_all, weak_compositions};
use mtz::polylog::{mpl, MultiIndex, PolylogArgs};
use mtz::series::WeightConfig;
use mtz::special::{bell_complete_rational, binomial, pochhammer, stirling_first_unsigned};
use mtz::{Jet, PrecisionContext, Real};
use proptest::prelude::*;
use rug::{Float, Rational};

fn ctx() -> PrecisionContext {
    PrecisionContext::new(192).unwrap()
}

fn jet(c: &PrecisionContext, coeffs: &[f64]) -> Jet {
    Jet::new(c.zero(), coeffs.iter().map(|&v| c.real(v)).collect())
}

fn jets_close(a: &Jet, b: &Jet, tol: f64) -> bool {
    a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| {
        let d = Float::with_val(x.prec(), x - y).abs().to_f64();
        d <= tol * (1.0 + y.to_f64().abs())
    })
}

fn rel_close(a: &Real, b: &Real, tol: f64) -> bool {
    let d = Float::with_val(a.prec(), a - b).abs().to_f64();
    d <= tol * (1.0 + b.to_f64().abs())
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_products_associate_and_distribute(f in coeffs(6), g in coeffs(6), h in coeffs(6)) {
        let c = ctx();
        let (f, g, h) = (jet(&c, &f), jet(&c, &g), jet(&c, &h));
        prop_assert!(jets_close(&(&(&f * &g) * &h), &(&f * &(&g * &h)), 1e-45));
        prop_assert!(jets_close(&(&f * &(&g + &h)), &(&(&f * &g) + &(&f * &h)), 1e-45));
        prop_assert!(jets_close(&(&f * &g), &(&g * &f), 0.0));
    }

    #[test]
    fn jet_exp_log_and_division_invert(f in coeffs(5), g in coeffs(5), lead in 0.5f64..4.0) {
        let c = ctx();
        let mut fv = f.clone();
        fv[0] = lead;
        let f = jet(&c, &fv);
        prop_assert!(jets_close(&f.ln().unwrap().exp(), &f, 1e-45));
        let g = jet(&c, &g);
        prop_assert!(jets_close(&(&g * &f).div(&f).unwrap(), &g, 1e-40));
    }

    #[test]
    fn lambda_generating_function(ws in prop::collection::vec(0.2f64..5.0, 1..5), t in -2.0f64..2.0) {
        let c = ctx();
        let om: Vec<Real> = ws.iter().map(|&v| c.real(v)).collect();
        let lam = lambda_all(&om, &c).unwrap();
        let tt = c.real(t);
        let lhs = lam.iter().rev().fold(c.zero(), |acc, l| acc * &tt + l);
        let rhs = om.iter().fold(c.one(), |p, w| p * (c.one() + Float::with_val(c.prec(), w.ln_ref()) * &tt));
        prop_assert!(rel_close(&lhs, &rhs, 1e-50));
    }

    #[test]
    fn pochhammer_expands_through_stirling(x in -4.0f64..4.0, m in 1u32..12) {
        let c = ctx();
        let xv = c.real(x);
        let mut poly = c.zero();
        for l in (1..=m).rev() {
            poly = (poly + c.real(stirling_first_unsigned(m, l).unwrap())) * &xv;
        }
        prop_assert!(rel_close(&pochhammer(&xv, m, &c), &poly, 1e-45));
    }

    #[test]
    fn bell_polynomials_are_of_binomial_type(xs in prop::collection::vec((-5i32..5, 1i32..4), 8), ys in prop::collection::vec((-5i32..5, 1i32..4), 8), n in 0usize..8) {
        let xr: Vec<Rational> = xs.iter().map(|&(p, q)| Rational::from((p, q))).collect();
        let yr: Vec<Rational> = ys.iter().map(|&(p, q)| Rational::from((p, q))).collect();
        let sum: Vec<Rational> = xr.iter().zip(&yr).map(|(a, b)| Rational::from(a + b)).collect();
        let lhs = bell_complete_rational(n, &sum).unwrap();
        let mut rhs = Rational::new();
        for k in 0..=n {
            let term = bell_complete_rational(k, &xr).unwrap() * bell_complete_rational(n - k, &yr).unwrap();
            rhs += term * binomial(n as u32, k as u32);
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_counts(t in 1u32..10, s in 1u32..6) {
        if s <= t {
            let n = compositions(t, s).unwrap().count() as u32;
            prop_assert_eq!(n, binomial(t - 1, s - 1).to_u32().unwrap());
        } else {
            prop_assert!(compositions(t, s).is_err());
        }
        let weak = weak_compositions(t, s).unwrap().count() as u32;
        prop_assert_eq!(weak, binomial(t + s - 1, s - 1).to_u32().unwrap());
    }

    #[test]
    fn li1_is_minus_log(z in -0.9f64..0.9) {
        let c = ctx();
        let zv = c.real(z);
        let got = mpl(&PolylogArgs::new(MultiIndex::new(vec![1]).unwrap(), vec![zv.clone()]).unwrap(), &c).unwrap();
        let want = -Float::with_val(c.prec(), (c.one() - zv).ln());
        prop_assert!(rel_close(&got, &want, 1e-50));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn two_coefficient_routes_agree(w1 in 0.2f64..3.0, w2 in 0.2f64..3.0, a in 0.0f64..2.0, m in 1u32..3) {
        let c = ctx();
        let cfg = WeightConfig::new(vec![c.real(w1), c.real(w2)], c.real(a)).unwrap();
        let lhs = c_coeff(2, m, &cfg, &c).unwrap();
        let rhs = c_prime_coeff(2, m, &cfg, &c).unwrap();
        prop_assert!(rel_close(&lhs, &rhs, 1e-40));
    }

    #[test]
    fn leading_coefficient_is_factorial(ws in prop::collection::vec(0.2f64..3.0, 1..4), a in 0.0f64..2.0) {
        let c = ctx();
        let r = ws.len();
        let cfg = WeightConfig::new(ws.iter().map(|&v| c.real(v)).collect(), c.real(a)).unwrap();
        let e = expansion(&cfg, 0, &c).unwrap();
        let fact: u32 = (1..=r as u32).product();
        prop_assert_eq!(e.coeffs[0].to_f64(), fact as f64);
        prop_assert_eq!(e.powers[0], -(r as i64));
    }
}
