//! Adaptive Gauss-Kronrod (7/15) quadrature for real and complex integrands.

use std::ops::{Add, Mul, Sub};

use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: closed under addition and real scaling.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_depth: 120,
            max_intervals: 200_000,
        }
    }
}

fn kronrod<T: Integrand>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut gauss = fc * WG[3];
    let mut kr = fc * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kr = kr + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let err = ((kr - gauss) * h).magnitude();
    (kr * h, err)
}

struct Piece<T> {
    lo: f64,
    hi: f64,
    depth: u32,
    val: T,
    err: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl<T> Eq for Piece<T> {}

impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`: the
/// subinterval with the largest error estimate is bisected until the summed
/// estimate meets the tolerance.
pub fn integrate<T: Integrand>(f: impl Fn(f64) -> T, a: f64, b: f64, opts: QuadOptions) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!("non-finite interval [{a}, {b}]")));
    }
    let evaluate = |lo: f64, hi: f64, depth: u32| -> Result<Piece<T>> {
        let (val, err) = kronrod(&f, lo, hi);
        if !val.magnitude().is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand near {lo}")));
        }
        Ok(Piece { lo, hi, depth, val, err })
    };
    let first = evaluate(a, b, 0)?;
    let mut total = first.val;
    let mut err = first.err;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err <= tol {
            return Ok(total);
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature(format!(
                "interval budget exhausted on [{a}, {b}] (error estimate {err:e})"
            )));
        }
        let Some(worst) = heap.pop() else {
            return Ok(total);
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if worst.depth >= opts.max_depth || mid <= worst.lo || mid >= worst.hi {
            return Err(Error::Quadrature(format!(
                "no convergence on [{}, {}] (error estimate {:e})",
                worst.lo, worst.hi, worst.err
            )));
        }
        let left = evaluate(worst.lo, mid, worst.depth + 1)?;
        let right = evaluate(mid, worst.hi, worst.depth + 1)?;
        total = total - worst.val + left.val + right.val;
        err += left.err + right.err - worst.err;
        if heap.len() % 256 == 0 {
            total = heap.iter().fold(left.val + right.val, |acc, p| acc + p.val);
            err = left.err + right.err + heap.iter().map(|p| p.err).sum::<f64>();
        }
        heap.push(left);
        heap.push(right);
    }
}

/// Integrates over consecutive breakpoints `pts[0] < pts[1] < ...`.
pub fn integrate_pieces<T: Integrand>(
    f: impl Fn(f64) -> T,
    pts: &[f64],
    opts: QuadOptions,
) -> Result<T> {
    let mut total = T::zero();
    for w in pts.windows(2) {
        total = total + integrate(&f, w[0], w[1], opts)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x: f64| x.powi(5) - 3.0 * x * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(v, 64.0 / 6.0 - 8.0, max_relative = 1e-14);
    }

    #[test]
    fn oscillatory_and_complex() {
        let v = integrate(|x: f64| (10.0 * x).sin(), 0.0, std::f64::consts::PI, QuadOptions::default())
            .unwrap();
        assert!(v.abs() < 1e-12);
        let c = integrate(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            1.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(c.re, 1f64.sin(), max_relative = 1e-13);
        assert_relative_eq!(c.im, 1.0 - 1f64.cos(), max_relative = 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-9);
    }
}
