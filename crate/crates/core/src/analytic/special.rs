//! Sine and cosine integrals, error function, Krylov partial sums and
//! Bernoulli numbers.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_4;
const SERIES_LIMIT: f64 = 2.0;
const EPS: f64 = 1e-17;
const MAX_ITER: usize = 10_000;

/// `(Si(x), Ci(x))` for `x > 0`.
///
/// Power series below `x = 2`, otherwise the continued fraction for the
/// complex exponential integral `E1(ix)` evaluated with Lentz's method.
fn si_ci_positive(x: f64) -> (f64, f64) {
    if x < SERIES_LIMIT {
        let x2 = x * x;
        let mut si = 0.0;
        let mut cis = 0.0;
        // term_k = (-1)^k x^{2k+1} / (2k+1)!, odd part for Si
        let mut odd = x;
        let mut even = 1.0;
        let mut k = 0usize;
        loop {
            let kf = k as f64;
            let s_term = odd / (2.0 * kf + 1.0);
            si += s_term;
            if k > 0 {
                cis += even / (2.0 * kf);
            }
            odd *= -x2 / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
            even *= -x2 / ((2.0 * kf + 1.0) * (2.0 * kf + 2.0));
            k += 1;
            if s_term.abs() < EPS * si.abs() && even.abs() < EPS && k > 2 {
                break;
            }
            if k > 200 {
                break;
            }
        }
        (si, EULER_GAMMA + x.ln() + cis)
    } else {
        let tiny = 1e-300;
        let mut b = Complex64::new(1.0, x);
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 2..MAX_ITER {
            let a = -((i - 1) as f64).powi(2);
            b += 2.0;
            d = Complex64::new(1.0, 0.0) / (d * a + b);
            c = b + c.inv() * a;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < EPS.max(1e-16) {
                break;
            }
        }
        let h = Complex64::new(x.cos(), -x.sin()) * h;
        (FRAC_PI_2 + h.im, -h.re)
    }
}

/// Sine integral `Si(z) = ∫_0^z sin t / t dt`.
pub fn si(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    if z.is_infinite() {
        return FRAC_PI_2.copysign(z);
    }
    let (s, _) = si_ci_positive(z.abs());
    s.copysign(z)
}

/// Cosine integral `Ci(z) = γ + ln z + ∫_0^z (cos t - 1)/t dt`, `z > 0`.
pub fn ci(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain {
            name: "ci",
            value: z,
        });
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    Ok(si_ci_positive(z).1)
}

/// Error function.
pub fn erf_fn(x: f64) -> f64 {
    libm::erf(x)
}

/// Krylov partial sum `Si(n, k) = Σ_{m=1}^n sin(k m) / m`.
pub fn si_partial(n: usize, k: f64) -> f64 {
    (1..=n).map(|m| (k * m as f64).sin() / m as f64).sum()
}

/// Bernoulli numbers `B_{2q}` for `q = 0..=8`.
pub fn bernoulli_b2q(q: usize) -> Result<f64> {
    const TABLE: [f64; 9] = [
        1.0,
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ];
    TABLE
        .get(q)
        .copied()
        .ok_or_else(|| Error::InvalidParameter(format!("B_2q tabulated for q <= 8, got q = {q}")))
}

/// First positive root of `Si(x) = π/2`.
pub fn si_half_pi_root() -> f64 {
    let (mut lo, mut hi) = (1.0, 2.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if si(mid) < FRAC_PI_2 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::quad::QuadOptions;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn si_quad(z: f64) -> f64 {
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            ..QuadOptions::default()
        };
        let n = (z.abs() / 2.0).ceil().max(1.0) as usize;
        let pts: Vec<f64> = (0..=n).map(|i| z * i as f64 / n as f64).collect();
        crate::analytic::quad::integrate_pieces(
            |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t },
            &pts,
            opts,
        )
        .unwrap()
    }

    fn ci_quad(z: f64) -> f64 {
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            ..QuadOptions::default()
        };
        let n = (z / 2.0).ceil().max(1.0) as usize;
        let pts: Vec<f64> = (0..=n).map(|i| z * i as f64 / n as f64).collect();
        let tail = crate::analytic::quad::integrate_pieces(
            |t: f64| if t == 0.0 { 0.0 } else { (t.cos() - 1.0) / t },
            &pts,
            opts,
        )
        .unwrap();
        EULER_GAMMA + z.ln() + tail
    }

    #[test]
    fn si_reference_values() {
        assert_eq!(si(0.0), 0.0);
        assert!((si(PI) - 1.851_937_051_982_466_2).abs() < 1e-14);
        assert!((si(1.0) - 0.946_083_070_367_183_0).abs() < 1e-15);
        assert!((si(1e6) - FRAC_PI_2).abs() < 1e-6);
        assert_eq!(si(f64::INFINITY), FRAC_PI_2);
        assert_relative_eq!(si(-3.0), -si(3.0));
    }

    #[test]
    fn ci_reference_values() {
        assert!((ci(1.0).unwrap() - 0.337_403_922_900_968_1).abs() < 1e-15);
        assert!((ci(5.0).unwrap() - (-0.190_029_749_656_643_9)).abs() < 1e-14);
        assert!(ci(0.0).is_err());
        assert!(ci(-1.0).is_err());
    }

    #[test]
    fn si_ci_against_quadrature() {
        for &z in &[1e-3, 0.1, 0.5, 1.0, 1.9, 1.99999, 2.0, 2.1, 3.0, 7.5, 20.0, 55.0, 120.0] {
            assert!((si(z) - si_quad(z)).abs() <= 1e-12, "Si({z})");
            assert!((ci(z).unwrap() - ci_quad(z)).abs() <= 1e-12, "Ci({z})");
        }
    }

    #[test]
    fn erf_limits() {
        assert_eq!(erf_fn(0.0), 0.0);
        assert!((erf_fn(10.0) - 1.0).abs() < 1e-16);
        assert!((erf_fn(0.5) - 0.520_499_877_813_046_5).abs() < 1e-15);
    }

    #[test]
    fn partial_sum_values() {
        assert_relative_eq!(si_partial(1, PI / 2.0), 1.0);
        assert_eq!(si_partial(0, 1.0), 0.0);
        assert!(si_partial(40, PI).abs() < 1e-13);
        // Fourier series of (π - k)/2 on (0, 2π)
        assert!((si_partial(200_000, 1.0) - (PI - 1.0) / 2.0).abs() < 1e-4);
    }

    #[test]
    fn bernoulli_table() {
        assert_relative_eq!(bernoulli_b2q(1).unwrap(), 1.0 / 6.0);
        assert_relative_eq!(bernoulli_b2q(2).unwrap(), -1.0 / 30.0);
        assert!(bernoulli_b2q(9).is_err());
    }

    #[test]
    fn half_pi_root() {
        let x0 = si_half_pi_root();
        assert!((x0 - 1.926).abs() < 1e-3);
        assert!((si(x0) - FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn si_monotone_on_zero_pi() {
        let mut prev = si(0.0);
        for i in 1..=1000 {
            let v = si(PI * i as f64 / 1000.0);
            assert!(v > prev);
            prev = v;
        }
    }

    proptest! {
        #[test]
        fn si_derivative_is_sinc(x in 0.05f64..60.0) {
            let h = 1e-5;
            let d = (si(x + h) - si(x - h)) / (2.0 * h);
            prop_assert!((d - x.sin() / x).abs() < 1e-8);
        }

        #[test]
        fn ci_derivative_is_cosc(x in 0.05f64..60.0) {
            let h = 1e-5;
            let d = (ci(x + h).unwrap() - ci(x - h).unwrap()) / (2.0 * h);
            prop_assert!((d - x.cos() / x).abs() < 1e-7);
        }

        #[test]
        fn si_matches_quadrature(x in 0.0f64..40.0) {
            prop_assert!((si(x) - si_quad(x)).abs() < 1e-12);
        }
    }
}
