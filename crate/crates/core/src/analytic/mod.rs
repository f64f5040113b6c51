//! Closed-form results: sudden-limit probabilities, the universal fast-quench
//! cumulant generating function and its plateaus, Kibble-Zurek cumulants,
//! the crossover ansatz, the truncated Landau-Zener CGF and characteristic
//! scales.

pub mod quad;
mod special;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::statistics::{pair_cumulant, pair_cumulant_coeffs};
use quad::{integrate, integrate_pieces, QuadOptions};

pub use special::{bernoulli_b2q, ci, erf_fn, si, si_half_pi_root, si_partial};

/// Quoted plateau prefactors `π c_q` for `κ_q = c_q L / n`, `q = 1, 2, 3`.
pub const PLATEAU_CONSTANTS: [f64; 3] = [1.05, 0.86, 0.76];

/// Quoted slopes `c'_q` of the sudden correction `δκ_q = c'_q T n^{-3}`.
pub const SUDDEN_CORRECTION_CONSTANTS: [f64; 3] = [-0.7, -1.5, -3.55];

/// System size at which the sudden-correction constants are quoted.
pub const SUDDEN_CORRECTION_REFERENCE_L: f64 = 1600.0;

/// Numerator of the cutoff momentum `k_n = 1.05 / n`.
pub const CUTOFF_CONSTANT: f64 = 1.05;

/// Sudden-limit excitation probability for Krylov order `n`,
/// `sin²(k/2) sin²S + cos²(k/2) cos²S - ½ sin k sin 2S` with `S = Si(n, k)`.
pub fn p_fast_exact(n: usize, k: f64) -> f64 {
    let s = si_partial(n, k);
    let (sh, ch) = (0.5 * k).sin_cos();
    let p = sh * sh * s.sin().powi(2) + ch * ch * s.cos().powi(2) - 0.5 * k.sin() * (2.0 * s).sin();
    p.clamp(0.0, 1.0)
}

/// Universal scaling form `cos²[Si(n k)]`.
pub fn p_fast_universal(n: usize, k: f64) -> f64 {
    si(n as f64 * k).cos().powi(2)
}

fn universal_probability(x: f64) -> f64 {
    si(x).cos().powi(2)
}

const CGF_CUTOFF: f64 = 600.0;
const CGF_PIECE: f64 = 2.0;

fn cgf_quad_options() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        ..QuadOptions::default()
    }
}

fn cgf_breakpoints() -> Vec<f64> {
    let n = (CGF_CUTOFF / CGF_PIECE) as usize;
    (0..=n).map(|i| i as f64 * CGF_PIECE).collect()
}

/// `∫_X^∞ p(x) dx` for the asymptotic `p ≈ cos²x/x² + sin 2x/x³`.
fn tail_linear(x: f64) -> f64 {
    let c2 = (2.0 * x).cos();
    0.5 / x + 0.5 * (c2 / x - 2.0 * (FRAC_PI_2 - si(2.0 * x))) + c2 / (2.0 * x.powi(3))
}

/// `∫_X^∞ p(x)² dx ≈ 1/(8X³)`.
fn tail_quadratic(x: f64) -> f64 {
    1.0 / (8.0 * x.powi(3))
}

/// Universal fast-quench CGF
/// `(1/n) ∫_0^∞ log{1 + (e^{2iθ} - 1) cos²[Si(x)]} dx`.
///
/// The cumulant densities follow as `κ_q / L = (-i∂_θ)^q F(θ) / (2π)`.
pub fn fast_cgf(theta: f64, n: usize) -> Result<Complex64> {
    if n == 0 {
        return invalid("fast_cgf requires n >= 1");
    }
    let z = Complex64::new(0.0, 2.0 * theta).exp() - 1.0;
    if z.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let body = integrate_pieces(
        |x| (1.0 + z * universal_probability(x)).ln(),
        &cgf_breakpoints(),
        cgf_quad_options(),
    )?;
    let tail = z * tail_linear(CGF_CUTOFF) - z * z * 0.5 * tail_quadratic(CGF_CUTOFF);
    Ok((body + tail) / n as f64)
}

/// `½ ∫_0^∞ c_q(cos²[Si(x)]) dx`, so the sudden plateau is
/// `κ_q = plateau_integral(q) L / (π n)` for large `n`.
pub fn plateau_integral(q: usize) -> Result<f64> {
    let coeffs = pair_cumulant_coeffs(q)?;
    let body = integrate_pieces(
        |x| pair_cumulant(q, universal_probability(x)).unwrap_or(f64::NAN),
        &cgf_breakpoints(),
        cgf_quad_options(),
    )?;
    let tail = coeffs[0] * tail_linear(CGF_CUTOFF) + coeffs[1] * tail_quadratic(CGF_CUTOFF);
    Ok(0.5 * (body + tail))
}

/// Quoted sudden plateau `κ_q = (c_q/π) L / n` for `q = 1, 2, 3`.
pub fn fast_cumulant_plateau(q: usize, n: f64, l: f64) -> Result<f64> {
    if !(1..=3).contains(&q) {
        return invalid(format!("plateau constants are tabulated for q = 1..3, got {q}"));
    }
    if !(n > 0.0) {
        return invalid("plateau requires n > 0");
    }
    Ok(PLATEAU_CONSTANTS[q - 1] / PI * l / n)
}

/// Sudden-quench cumulant without CD from `p_k = cos²(k/2)` in the continuum:
/// `κ_q = (L / 2π) ∫_0^π c_q(cos²(k/2)) dk`, giving `L/2, L/4, 0, -L/8`.
pub fn no_cd_sudden_cumulant(q: usize, l: f64) -> Result<f64> {
    pair_cumulant_coeffs(q)?;
    let integral = integrate(
        |k: f64| pair_cumulant(q, (0.5 * k).cos().powi(2)).unwrap_or(f64::NAN),
        0.0,
        PI,
        QuadOptions::default(),
    )?;
    let v = l / (2.0 * PI) * integral;
    Ok(if v.abs() < 1e-13 * l { 0.0 } else { v })
}

/// The closed general-`q` expression `(L/4) (2^{2q} - 1) / (2^{2q-1} q) B_{2q}`.
/// Kept for reference; it does not reproduce `κ_1 = L/2` and is not used.
pub fn bernoulli_sudden_formula(q: usize, l: f64) -> Result<f64> {
    if q == 0 {
        return invalid("q must be >= 1");
    }
    let b = bernoulli_b2q(q)?;
    let p = 2f64.powi(2 * q as i32);
    Ok(l / 4.0 * (p - 1.0) / (p / 2.0 * q as f64) * b)
}

/// Leading correction to the sudden plateau,
/// `δκ_q = c'_q T n^{-3} (L / 1600)`.
pub fn sudden_correction(q: usize, anneal_time: f64, n: f64, l: f64) -> Result<f64> {
    if !(1..=3).contains(&q) {
        return invalid(format!("sudden corrections are tabulated for q = 1..3, got {q}"));
    }
    if !(anneal_time >= 0.0) || !(n > 0.0) {
        return invalid("sudden correction needs T >= 0 and n > 0");
    }
    Ok(SUDDEN_CORRECTION_CONSTANTS[q - 1] * anneal_time * n.powi(-3) * l
        / SUDDEN_CORRECTION_REFERENCE_L)
}

/// Kibble-Zurek defect density `(8π²T)^{-1/2}`.
pub fn kz_density(anneal_time: f64) -> f64 {
    (8.0 * PI * PI * anneal_time).powf(-0.5)
}

/// Kibble-Zurek cumulant for `p_k = exp(-2πk²T)`:
/// `κ_q = κ_1 · ½ Σ_j a_{q,j} / √j` with `κ_1 = L (8π²T)^{-1/2}`.
pub fn kz_cumulant(q: usize, anneal_time: f64, l: f64) -> Result<f64> {
    if !(anneal_time > 0.0) {
        return invalid("KZ cumulants need T > 0");
    }
    let coeffs = pair_cumulant_coeffs(q)?;
    let ratio: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| a / ((j + 1) as f64).sqrt())
        .sum::<f64>()
        * 0.5;
    Ok(l * kz_density(anneal_time) * ratio)
}

/// Crossover ansatz `κ^KZ erf[√π κ^(n)(0) / (2 κ^KZ)]`, extensive cumulants.
pub fn crossover_ansatz(q: usize, anneal_time: f64, n: f64, l: f64) -> Result<f64> {
    let kz = kz_cumulant(q, anneal_time, l)?;
    let plateau = fast_cumulant_plateau(q, n, l)?;
    Ok(kz * erf_fn(PI.sqrt() * plateau / (2.0 * kz)))
}

/// Phase attached to each kink pair in [`truncated_lz_cgf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PairPhase {
    /// `(1 - e^{iθ})^p` with prefactor `L n_ex`.
    #[default]
    Theta,
    /// `(1 - e^{2iθ})^p` with prefactor `L n_ex / 2`, consistent with the
    /// pair-based CGF.
    DoubleTheta,
}

/// Argument of the error function in [`truncated_lz_cgf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ErfArgument {
    /// `erf(√(2πp) k_n)`.
    #[default]
    Unscaled,
    /// `erf(k_n √p / (2√π n_ex)) = erf(√(2πpT) k_n)`.
    RateScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TruncatedLzOptions {
    pub pair_phase: PairPhase,
    pub erf_argument: ErfArgument,
}

/// Landau-Zener CGF restricted to momenta below `k_n = 1.05/n`:
/// `-L n_ex Σ_{p=1}^{p_max} (1 - e^{iθ})^p p^{-3/2} erf(·)`.
pub fn truncated_lz_cgf(
    theta: f64,
    anneal_time: f64,
    n: usize,
    l: f64,
    p_max: usize,
    opts: TruncatedLzOptions,
) -> Result<Complex64> {
    if p_max == 0 {
        return invalid("p_max must be >= 1");
    }
    if !(anneal_time > 0.0) {
        return invalid("T must be positive");
    }
    let k_n = if n == 0 { f64::INFINITY } else { CUTOFF_CONSTANT / n as f64 };
    let (phase, prefactor) = match opts.pair_phase {
        PairPhase::Theta => (theta, l * kz_density(anneal_time)),
        PairPhase::DoubleTheta => (2.0 * theta, 0.5 * l * kz_density(anneal_time)),
    };
    let base = 1.0 - Complex64::new(0.0, phase).exp();
    if base.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if base.norm() > 1.0 + 1e-12 {
        return Err(Error::Numerical(format!(
            "truncated LZ series diverges for |1 - e^(iθ)| = {} > 1",
            base.norm()
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut last = Complex64::new(0.0, 0.0);
    for p in 1..=p_max {
        let pf = p as f64;
        power *= base;
        let arg = match opts.erf_argument {
            ErfArgument::Unscaled => (2.0 * PI * pf).sqrt() * k_n,
            ErfArgument::RateScaled => (2.0 * PI * pf * anneal_time).sqrt() * k_n,
        };
        let e = if arg.is_infinite() { 1.0 } else { erf_fn(arg) };
        last = power * pf.powf(-1.5) * e;
        sum += last;
    }
    if last.norm() > 1e-10 * sum.norm().max(1e-300) {
        return Err(Error::Numerical(format!(
            "truncated LZ series not converged after {p_max} terms (last term {:e})",
            last.norm()
        )));
    }
    Ok(-sum * prefactor)
}

/// Characteristic scales for Krylov order `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingScales {
    /// Cutoff momentum `1.05/n`.
    pub k_n: f64,
    /// CD fast-quench scale `n^{2z}`.
    pub t_fast_cd: f64,
    /// Adiabatic threshold order `1.05 L / (2π)`.
    pub n_ad: f64,
}

impl ScalingScales {
    /// Kibble-Zurek density at annealing time `T`.
    pub fn n_ex(&self, anneal_time: f64) -> f64 {
        kz_density(anneal_time)
    }
}

pub fn scales(n: usize, l: usize, z: f64) -> Result<ScalingScales> {
    if n == 0 {
        return invalid("scales require n >= 1");
    }
    if !(z > 0.0) {
        return invalid("dynamical exponent must be positive");
    }
    let nf = n as f64;
    Ok(ScalingScales {
        k_n: CUTOFF_CONSTANT / nf,
        t_fast_cd: nf.powf(2.0 * z),
        n_ad: CUTOFF_CONSTANT * l as f64 / (2.0 * PI),
    })
}
