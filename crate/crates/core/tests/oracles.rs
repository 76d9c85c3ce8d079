//! Library values compared with closed forms and brute-force sums computed
//! here, independently of the library's own algorithms.

use mtz::asymptotics::{c_coeff, c_prime_coeff, expansion};
use mtz::polylog::{hurwitz_li0, mpl, mpl_one_var, MultiIndex, PolylogArgs};
use mtz::series::{i_brute, i_integral, m_integral, s_series, zeta_ez_ones, WeightConfig};
use mtz::special::{bell_complete, bernoulli, euler_gamma, gamma0, stirling_first_unsigned, zeta_value};
use mtz::{PrecisionContext, Real};
use rug::ops::Pow;
use rug::{Float, Rational};

const APERY: &str = "1.20205690315959428539973816151144999076498629234049888179227155534183820578631309";
const EULER_GAMMA: &str = "0.57721566490153286060651209008240243104215933593992359880576723488486772677766467";
const E1_AT_1: &str = "0.21938393439552027367716377546012164903104729340690820757797861307356869";

fn ctx() -> PrecisionContext {
    PrecisionContext::new(256).unwrap()
}

fn quad_ctx() -> PrecisionContext {
    PrecisionContext::new(256).unwrap().with_target_tol(1e-20).unwrap()
}

fn close(got: &Real, want: &Real, tol: f64) {
    let diff = Float::with_val(got.prec(), got - want).abs().to_f64();
    assert!(diff <= tol, "got {got}, want {want}, |diff| = {diff:e} > {tol:e}");
}

fn w(omega: &[&str], a: &str, c: &PrecisionContext) -> WeightConfig {
    WeightConfig::parse(omega, a, c).unwrap()
}

#[test]
fn constants_match_published_digits() {
    let c = ctx();
    close(&zeta_value(3, &c).unwrap(), &c.parse(APERY).unwrap(), 1e-70);
    close(&euler_gamma(&c), &c.parse(EULER_GAMMA).unwrap(), 1e-70);
    close(&gamma0(&c.one(), &c).unwrap(), &c.parse(E1_AT_1).unwrap(), 1e-65);
    let pi = c.pi();
    let z4 = Float::with_val(c.prec(), pi.clone().pow(4u32)) / 90u32;
    close(&zeta_value(4, &c).unwrap(), &z4, 1e-70);
}

#[test]
fn bernoulli_numbers() {
    let want = [(0, 1, 1), (1, -1, 2), (2, 1, 6), (4, -1, 30), (6, 1, 42), (8, -1, 30), (10, 5, 66), (12, -691, 2730)];
    for (n, p, q) in want {
        assert_eq!(bernoulli(n), Rational::from((p, q)), "B_{n}");
    }
    assert_eq!(bernoulli(7), Rational::new());
}

#[test]
fn stirling_table_and_row_sums() {
    let row5 = [24u32, 50, 35, 10, 1];
    for (l, &v) in row5.iter().enumerate() {
        assert_eq!(stirling_first_unsigned(5, l as u32 + 1).unwrap(), v);
    }
    let mut fact = rug::Integer::from(1);
    for m in 1..=12u32 {
        fact *= m;
        let sum: rug::Integer = (1..=m).map(|l| stirling_first_unsigned(m, l).unwrap()).sum();
        assert_eq!(sum, fact, "row {m}");
    }
}

#[test]
fn bell_polynomials_at_ones_are_bell_numbers() {
    let c = ctx();
    let bell = [1u32, 1, 2, 5, 15, 52, 203, 877, 4140, 21147];
    let ones = vec![c.one(); 10];
    for (n, &b) in bell.iter().enumerate() {
        close(&bell_complete(n, &ones, &c).unwrap(), &c.real(b), 0.0);
    }
}

#[test]
fn dilogarithm_and_log_squared() {
    let c = ctx();
    let half = c.parse("0.5").unwrap();
    let li2 = mpl(&PolylogArgs::new(MultiIndex::new(vec![2]).unwrap(), vec![half.clone()]).unwrap(), &c).unwrap();
    let ln2 = Float::with_val(c.prec(), Float::with_val(c.prec(), 2u32).ln());
    let pi2 = Float::with_val(c.prec(), c.pi().pow(2u32));
    let want = pi2 / 12u32 - Float::with_val(c.prec(), ln2.pow(2u32)) / 2u32;
    close(&li2, &want, 1e-70);

    // Li_{1,1}(1, z) = log(1 - z)^2 / 2
    let z = c.parse("0.3").unwrap();
    let got = mpl_one_var(&MultiIndex::new(vec![1, 1]).unwrap(), &z, &c).unwrap();
    let l = Float::with_val(c.prec(), (c.one() - z).ln());
    close(&got, &(Float::with_val(c.prec(), l.pow(2u32)) / 2u32), 1e-70);
}

#[test]
fn lerch_value_from_artanh() {
    // sum_{n >= 0} 2^-n / (n + 1/2) = 2 sqrt(2) artanh(1/sqrt(2))
    let c = ctx();
    let args = PolylogArgs::new(MultiIndex::new(vec![1]).unwrap(), vec![c.parse("0.5").unwrap()]).unwrap();
    let got = hurwitz_li0(&c.parse("0.5").unwrap(), &args, &c).unwrap();
    let s2 = Float::with_val(c.prec(), Float::with_val(c.prec(), 2u32).sqrt());
    let want = Float::with_val(c.prec(), &s2 * 2u32) * Float::with_val(c.prec(), s2.recip_ref()).atanh();
    close(&got, &want, 1e-70);
}

#[test]
fn i1_closed_forms() {
    let c = quad_ctx();
    // a = 0: omega^-x / x
    let x = c.parse("0.7").unwrap();
    let got = i_integral(&x, &w(&["1.5"], "0", &c), &c).unwrap();
    let want = Float::with_val(c.prec(), c.parse("1.5").unwrap().pow(&-x.clone())) / &x;
    close(&got, &want, 1e-25);
    // x = 1/2: (2 / sqrt a) asinh(sqrt(a / omega))
    let (om, a) = (c.parse("2").unwrap(), c.parse("0.6").unwrap());
    let got = i_integral(&c.parse("0.5").unwrap(), &w(&["2"], "0.6", &c), &c).unwrap();
    let sa = Float::with_val(c.prec(), a.sqrt_ref());
    let want = Float::with_val(c.prec(), (Float::with_val(c.prec(), &a / &om)).sqrt().asinh()) * 2u32 / sa;
    close(&got, &want, 1e-25);
    // x = 2: (log((omega + a)/omega) + omega/(omega + a) - 1) / a^2
    let got = i_integral(&c.real(2), &w(&["2"], "0.6", &c), &c).unwrap();
    let s = Float::with_val(c.prec(), &om + &a);
    let want = (Float::with_val(c.prec(), &s / &om).ln() + Float::with_val(c.prec(), &om / &s) - 1u32)
        / Float::with_val(c.prec(), a.square_ref());
    close(&got, &want, 1e-25);
}

#[test]
fn i2_at_x2_is_log2_minus_half() {
    let c = quad_ctx();
    let want = Float::with_val(c.prec(), Float::with_val(c.prec(), 2u32).ln()) - c.parse("0.5").unwrap();
    let cfg = w(&["1", "1"], "0", &c);
    close(&i_integral(&c.real(2), &cfg, &c).unwrap(), &want, 1e-25);
    close(&i_brute(&c.real(2), &cfg, &c).unwrap(), &want, 1e-18);
}

/// `sum_{n >= 1} 1 / (n (omega n + a)^x)` in f64: direct terms up to `N` and an
/// Euler-Maclaurin tail with two correction terms.
fn m1_f64(x: f64, omega: f64, a: f64) -> f64 {
    let f = |t: f64| 1.0 / (t * (omega * t + a).powf(x));
    let n = 20_000usize;
    let mut s = 0.0;
    for k in (1..n).rev() {
        s += f(k as f64);
    }
    let nf = n as f64;
    // tail integral by Simpson on u = 1/t over (0, 1/N]
    let g = |u: f64| if u == 0.0 { 0.0 } else { f(1.0 / u) / (u * u) };
    let steps = 2000;
    let h = (1.0 / nf) / steps as f64;
    let mut integral = g(0.0) + g(1.0 / nf);
    for i in 1..steps {
        let u = i as f64 * h;
        integral += if i % 2 == 1 { 4.0 * g(u) } else { 2.0 * g(u) };
    }
    integral *= h / 3.0;
    let d = 1e-3;
    let fprime = (f(nf + d) - f(nf - d)) / (2.0 * d);
    s + integral + f(nf) / 2.0 - fprime / 12.0
}

#[test]
fn m1_matches_brute_sum() {
    let c = quad_ctx();
    for (x, om, a) in [(1.5, 1.3, 0.7), (2.0, 1.0, 0.0), (3.0, 0.5, 2.0)] {
        let got = m_integral(&c.real(x), &w(&[&om.to_string()], &a.to_string(), &c), &c).unwrap();
        let want = m1_f64(x, om, a);
        assert!((got.to_f64() - want).abs() < 1e-10, "M_1({x}; {om}, {a}) = {got} vs {want}");
    }
}

#[test]
fn m2_mordell_tornheim_values() {
    let c = quad_ctx();
    let cfg = w(&["1", "1"], "0", &c);
    // sum 1 / (m n (m + n)^2) = pi^4 / 180
    let want = Float::with_val(c.prec(), c.pi().pow(4u32)) / 180u32;
    close(&m_integral(&c.real(2), &cfg, &c).unwrap(), &want, 1e-18);
    // sum 1 / (m n (m + n)) = 2 zeta(3)
    let want = c.parse(APERY).unwrap() * 2u32;
    close(&m_integral(&c.one(), &cfg, &c).unwrap(), &want, 1e-18);
    close(&(zeta_ez_ones(2, &c.one(), &c).unwrap() * 2u32), &want, 1e-18);
}

#[test]
fn s1_closed_forms() {
    let c = ctx();
    let om = c.parse("0.4").unwrap();
    let l = Float::with_val(c.prec(), (c.one() - &om).ln());
    close(&s_series(&c.one(), std::slice::from_ref(&om), &c).unwrap(), &Float::with_val(c.prec(), -&l), 1e-70);
    let want = Float::with_val(c.prec(), &om / (c.one() - &om)) - &l;
    close(&s_series(&c.real(2), &[om], &c).unwrap(), &want, 1e-70);
}

/// `Li_2(z)` for `|z| < 1` by its power series in f64.
fn li2_f64(z: f64) -> f64 {
    (1..2000).map(|n| z.powi(n) / (n as f64 * n as f64)).sum()
}

#[test]
fn c1_coefficients_from_direct_expansion() {
    // (a + omega)^x I_1 = 1/x + log(1 + a/omega) + (Li_2(-a/omega) + log(1 + a/omega)^2 / 2) x + ...
    let c = ctx();
    for (om, a) in [(2.0f64, 0.6f64), (1.0, 0.5), (3.0, 0.1)] {
        let cfg = w(&[&om.to_string()], &a.to_string(), &c);
        let b = a / om;
        let l0 = (1.0 + b).ln();
        let c11 = c_coeff(1, 1, &cfg, &c).unwrap().to_f64();
        let c12 = c_coeff(1, 2, &cfg, &c).unwrap().to_f64();
        assert!((c11 - l0).abs() < 1e-14, "c_11 {c11} vs {l0}");
        let want = li2_f64(-b) + l0 * l0 / 2.0;
        assert!((c12 - want).abs() < 1e-14, "c_12 {c12} vs {want}");
    }
}

#[test]
fn c21_at_unit_weights() {
    let c = ctx();
    let cfg = w(&["1", "1"], "0", &c);
    let direct = c_coeff(2, 1, &cfg, &c).unwrap();
    let closed = c_prime_coeff(2, 1, &cfg, &c).unwrap();
    // 2^x I_2(x; 1, 1, 0) = 2/x^2 + 2 log 2 / x + O(1)
    let want = Float::with_val(c.prec(), Float::with_val(c.prec(), 2u32).ln()) * 2u32;
    close(&direct, &want, 1e-60);
    close(&closed, &want, 1e-60);
}

#[test]
fn expansion_reproduces_integral_near_zero() {
    // the truncated expansion of (a + |omega|)^x I_r against quadrature at small x
    let c = quad_ctx();
    let cfg = w(&["1", "2"], "1.5", &c);
    let e = expansion(&cfg, 10, &c).unwrap();
    let x = c.parse("0.05").unwrap();
    let scaled = i_integral(&x, &cfg, &c).unwrap() * Float::with_val(c.prec(), c.parse("4.5").unwrap().pow(&x));
    close(&e.eval(&x), &scaled, 1e-9);
}
