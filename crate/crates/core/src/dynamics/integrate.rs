//! Two integrators for `i dψ/dτ = (K·σ) ψ` on a single spinor:
//! an exactly unitary fourth-order Magnus scheme with step-doubling error
//! control, and a Dormand-Prince 5(4) pair used as an independent check.

use num_complex::Complex64;

use super::{IntegratorOptions, Spinor};
use crate::error::{Error, Result};

/// A traceless 2x2 Hermitian generator `K(x)·σ` with a resolution hint.
///
/// The evolution parameter advances by `|dx|` whichever way the position
/// `x` moves, so `i dψ/dτ = K(x(τ))·σ ψ` with `dτ = |dx|`.
pub(crate) trait Generator {
    /// Components `(K_x, K_y, K_z)` at position `x`.
    fn vector(&self, x: f64) -> [f64; 3];
    /// Largest step the generator's structure permits when starting at `x`.
    fn max_step(&self, x: f64) -> f64;
}

/// Direction and length of a sweep `from -> to`.
fn sweep(from: f64, to: f64) -> (f64, f64) {
    let dir = if to >= from { 1.0 } else { -1.0 };
    (dir, (to - from).abs())
}

fn min_step(x: f64, span: f64) -> f64 {
    1e-15 * x.abs().max(1e-3 * span).max(f64::MIN_POSITIVE)
}

pub(crate) struct Integrated {
    pub state: Spinor,
    pub steps: usize,
    pub norm_drift: f64,
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `(v·σ) ψ`.
fn apply_sigma(v: [f64; 3], psi: &Spinor) -> [Complex64; 2] {
    let off_minus = Complex64::new(v[0], -v[1]);
    let off_plus = Complex64::new(v[0], v[1]);
    [
        psi.psi1 * v[2] + off_minus * psi.psi2,
        off_plus * psi.psi1 - psi.psi2 * v[2],
    ]
}

/// `exp(-i v·σ) ψ`.
pub(crate) fn rotate(v: [f64; 3], psi: &Spinor) -> Spinor {
    let angle = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if angle == 0.0 {
        return *psi;
    }
    let (s, c) = angle.sin_cos();
    let u = [v[0] / angle, v[1] / angle, v[2] / angle];
    let t = apply_sigma(u, psi);
    Spinor {
        psi1: psi.psi1 * c - I * t[0] * s,
        psi2: psi.psi2 * c - I * t[1] * s,
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3 / 6
const COMMUTATOR_WEIGHT: f64 = 0.288_675_134_594_812_9; // √3 / 6

fn magnus_step<G: Generator>(gen: &G, x: f64, dir: f64, h: f64, psi: &Spinor) -> Spinor {
    let k1 = gen.vector(x + dir * h * (0.5 - GAUSS_OFFSET));
    let k2 = gen.vector(x + dir * h * (0.5 + GAUSS_OFFSET));
    let c = cross(k1, k2);
    let v = [
        0.5 * h * (k1[0] + k2[0]) - COMMUTATOR_WEIGHT * h * h * c[0],
        0.5 * h * (k1[1] + k2[1]) - COMMUTATOR_WEIGHT * h * h * c[1],
        0.5 * h * (k1[2] + k2[2]) - COMMUTATOR_WEIGHT * h * h * c[2],
    ];
    rotate(v, psi)
}

fn diff(a: &Spinor, b: &Spinor) -> f64 {
    (a.psi1 - b.psi1).norm().max((a.psi2 - b.psi2).norm())
}

fn integration_error(k: f64, reason: impl Into<String>, steps: usize, s: f64) -> Error {
    Error::Integration {
        k,
        reason: reason.into(),
        steps,
        position: s,
    }
}

/// Fourth-order Magnus integration of `ψ` from position `from` to `to`.
pub(crate) fn magnus<G: Generator>(
    gen: &G,
    from: f64,
    to: f64,
    psi0: Spinor,
    opts: &IntegratorOptions,
    k: f64,
) -> Result<Integrated> {
    let tol = opts.abs_tol + opts.rel_tol;
    let (dir, span) = sweep(from, to);
    let mut psi = psi0;
    let mut x = from;
    let mut h = opts.initial_step.min(span);
    let mut steps = 0usize;
    let mut attempts = 0usize;
    let mut drift: f64 = (psi.norm_sqr() - 1.0).abs();
    while (to - x) * dir > 0.0 {
        let remaining = (to - x) * dir;
        let h_min = min_step(x, span);
        h = h.min(gen.max_step(x)).max(h_min);
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        attempts += 1;
        if steps >= opts.max_steps || attempts >= 20 * opts.max_steps {
            return Err(integration_error(k, "step budget exhausted", steps, x));
        }
        let full = magnus_step(gen, x, dir, h, &psi);
        let mid = magnus_step(gen, x, dir, 0.5 * h, &psi);
        let half = magnus_step(gen, x + dir * 0.5 * h, dir, 0.5 * h, &mid);
        let err = diff(&full, &half);
        if !err.is_finite() {
            return Err(integration_error(k, "non-finite state", steps, x));
        }
        let accept = err <= tol || h <= h_min;
        if accept {
            psi = half;
            x = if last { to } else { x + dir * h };
            steps += 1;
            drift = drift.max((psi.norm_sqr() - 1.0).abs());
        }
        let factor = if err == 0.0 {
            4.0
        } else {
            (0.9 * (tol / err).powf(0.2)).clamp(0.2, 4.0)
        };
        h *= factor;
        if !accept && h < h_min {
            return Err(integration_error(k, "step size underflow", steps, x));
        }
    }
    Ok(Integrated {
        state: psi,
        steps,
        norm_drift: drift,
    })
}

// Dormand-Prince 5(4) tableau
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn derivative<G: Generator>(gen: &G, x: f64, psi: &Spinor) -> [Complex64; 2] {
    let t = apply_sigma(gen.vector(x), psi);
    [-I * t[0], -I * t[1]]
}

/// Dormand-Prince 5(4) integration of `ψ` from position `from` to `to`.
pub(crate) fn dormand_prince<G: Generator>(
    gen: &G,
    from: f64,
    to: f64,
    psi0: Spinor,
    opts: &IntegratorOptions,
    k: f64,
) -> Result<Integrated> {
    let (dir, span) = sweep(from, to);
    let mut psi = psi0;
    let mut x = from;
    let mut h = opts.initial_step.min(span);
    let mut steps = 0usize;
    let mut attempts = 0usize;
    let mut drift: f64 = (psi.norm_sqr() - 1.0).abs();
    while (to - x) * dir > 0.0 {
        let remaining = (to - x) * dir;
        let h_min = min_step(x, span);
        h = h.min(gen.max_step(x)).max(h_min);
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        attempts += 1;
        if steps >= opts.max_steps || attempts >= 20 * opts.max_steps {
            return Err(integration_error(k, "step budget exhausted", steps, x));
        }
        let mut stages = [[Complex64::new(0.0, 0.0); 2]; 7];
        for i in 0..7 {
            let mut y = psi;
            for j in 0..i {
                y.psi1 += stages[j][0] * (h * A[i][j]);
                y.psi2 += stages[j][1] * (h * A[i][j]);
            }
            stages[i] = derivative(gen, x + dir * C[i] * h, &y);
        }
        let mut y5 = psi;
        let mut y4 = psi;
        for i in 0..7 {
            y5.psi1 += stages[i][0] * (h * B5[i]);
            y5.psi2 += stages[i][1] * (h * B5[i]);
            y4.psi1 += stages[i][0] * (h * B4[i]);
            y4.psi2 += stages[i][1] * (h * B4[i]);
        }
        let scale1 = opts.abs_tol + opts.rel_tol * psi.psi1.norm().max(y5.psi1.norm());
        let scale2 = opts.abs_tol + opts.rel_tol * psi.psi2.norm().max(y5.psi2.norm());
        let err = ((y5.psi1 - y4.psi1).norm() / scale1).max((y5.psi2 - y4.psi2).norm() / scale2);
        if !err.is_finite() {
            return Err(integration_error(k, "non-finite state", steps, x));
        }
        let accept = err <= 1.0 || h <= h_min;
        if accept {
            psi = y5;
            x = if last { to } else { x + dir * h };
            steps += 1;
            drift = drift.max((psi.norm_sqr() - 1.0).abs());
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if !accept && h < h_min {
            return Err(integration_error(k, "step size underflow", steps, x));
        }
    }
    Ok(Integrated {
        state: psi,
        steps,
        norm_drift: drift,
    })
}
