//! Long-range Kitaev model: power-law hopping `j_α(k)` and pairing `d_β(k)`,
//! order-`n` CD fields, sudden-limit probabilities and the dynamical exponent.
//!
//! Mode Hamiltonian: `(g - j_α(k)) τ^z + d_β(k) τ^x`. Spectral couplings are
//! `j_α(k) = (2/N_α) Σ_{r=1}^{L/2} r^{-α} cos(kr)` and
//! `d_β(k) = (2/N_β) Σ_{r=1}^{L/2} r^{-β} sin(kr)` with
//! `N_γ = 2 Σ_{r=1}^{L/2} r^{-γ}`, so that `α, β -> ∞` gives the Ising chain.

use serde::{Deserialize, Serialize};

use crate::analytic::si;
use crate::dynamics::Spinor;
use crate::error::{invalid, Error, Result};
use crate::model::{momentum_grid, ring_series, ModelKind, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrkmSpec {
    pub l: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl LrkmSpec {
    pub fn new(l: usize, alpha: f64, beta: f64) -> Result<Self> {
        SystemSpec::lrkm(l, alpha, beta)?;
        Ok(LrkmSpec { l, alpha, beta })
    }

    pub fn system(&self) -> Result<SystemSpec> {
        SystemSpec::lrkm(self.l, self.alpha, self.beta)
    }

    /// `N_γ = 2 Σ_{r=1}^{L/2} r^{-γ}`.
    pub fn normalization(&self, gamma: f64) -> f64 {
        2.0 * (1..=self.l / 2).map(|r| (r as f64).powf(-gamma)).sum::<f64>()
    }
}

impl TryFrom<&SystemSpec> for LrkmSpec {
    type Error = Error;

    fn try_from(spec: &SystemSpec) -> Result<Self> {
        match spec.model {
            ModelKind::Lrkm { alpha, beta } => LrkmSpec::new(spec.l, alpha, beta),
            ModelKind::Tfim => invalid("system is not a long-range Kitaev chain"),
        }
    }
}

/// Couplings on the momentum grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingTable {
    pub momenta: Vec<f64>,
    pub j_alpha: Vec<f64>,
    pub d_beta: Vec<f64>,
    pub n_alpha: f64,
    pub n_beta: f64,
}

impl CouplingTable {
    /// Couplings `(j, d)` at a grid momentum.
    pub fn lookup(&self, k: f64) -> Result<(f64, f64)> {
        let idx = self
            .momenta
            .iter()
            .position(|&q| (q - k).abs() <= 1e-12 * (1.0 + k.abs()))
            .ok_or(Error::Domain {
                name: "coupling table momentum",
                value: k,
            })?;
        Ok((self.j_alpha[idx], self.d_beta[idx]))
    }
}

fn power_weights(l: usize, gamma: f64) -> Vec<f64> {
    (1..=l / 2).map(|r| (r as f64).powf(-gamma)).collect()
}

/// `(j_α(k), d_β(k))` at an arbitrary momentum.
pub fn coupling_at(k: f64, spec: &LrkmSpec) -> (f64, f64) {
    let wa = power_weights(spec.l, spec.alpha);
    let wb = power_weights(spec.l, spec.beta);
    let na: f64 = 2.0 * wa.iter().sum::<f64>();
    let nb: f64 = 2.0 * wb.iter().sum::<f64>();
    let j: f64 = wa
        .iter()
        .enumerate()
        .map(|(i, w)| w * (k * (i + 1) as f64).cos())
        .sum();
    let d: f64 = wb
        .iter()
        .enumerate()
        .map(|(i, w)| w * (k * (i + 1) as f64).sin())
        .sum();
    (2.0 * j / na, 2.0 * d / nb)
}

pub fn couplings(spec: &LrkmSpec) -> Result<CouplingTable> {
    let momenta = momentum_grid(&spec.system()?)?;
    let (j_alpha, d_beta) = momenta.iter().map(|&k| coupling_at(k, spec)).unzip();
    Ok(CouplingTable {
        momenta,
        j_alpha,
        d_beta,
        n_alpha: spec.normalization(spec.alpha),
        n_beta: spec.normalization(spec.beta),
    })
}

/// CD range weights `w_r = (2/N_β) r^{-β-1}`, `r = 1..L/2`.
pub fn cd_weights(spec: &LrkmSpec) -> Vec<f64> {
    let nb = spec.normalization(spec.beta);
    (1..=spec.l / 2)
        .map(|r| 2.0 / nb * (r as f64).powf(-spec.beta - 1.0))
        .collect()
}

/// Krylov amplitudes `A_m = Σ_r w_r sin(k r m) / 2` for `m = 1..n`.
pub fn cd_amplitudes(k: f64, n: usize, spec: &LrkmSpec) -> Vec<f64> {
    let w = cd_weights(spec);
    (1..=n)
        .map(|m| {
            w.iter()
                .enumerate()
                .map(|(i, wr)| 0.5 * wr * (k * ((i + 1) * m) as f64).sin())
                .sum()
        })
        .collect()
}

/// Order-`n` CD coefficient `Σ_m A_m (g^{m-1} + g^{L-m-1}) / (1 + g^L)`.
pub fn lrkm_cd_order_n(k: f64, g: f64, n: usize, spec: &LrkmSpec) -> f64 {
    if n == 0 {
        return 0.0;
    }
    ring_series(&cd_amplitudes(k, n, spec), g, spec.l).0
}

/// Exact CD coefficient `d_β / (2((g - j_α)² + d_β²))`.
pub fn lrkm_cd_exact(k: f64, g: f64, spec: &LrkmSpec) -> f64 {
    let (j, d) = coupling_at(k, spec);
    let gap2 = (g - j).powi(2) + d * d;
    if d == 0.0 {
        return 0.0;
    }
    d / (2.0 * gap2)
}

/// Universal sudden-limit probability `cos²[Σ_r w_r Si(r n k)]`.
pub fn lrkm_p_sudden(n: usize, k: f64, spec: &LrkmSpec) -> f64 {
    let w = cd_weights(spec);
    let phase: f64 = w
        .iter()
        .enumerate()
        .map(|(i, wr)| wr * si(((i + 1) * n) as f64 * k))
        .sum();
    phase.cos().powi(2)
}

/// Sudden-limit angle `Σ_r w_r Si(n, k r)` accumulated by the order-`n` CD
/// field between `g = ∞` and `g = 0` (ring corrections neglected).
pub fn lrkm_sudden_angle(n: usize, k: f64, spec: &LrkmSpec) -> f64 {
    cd_amplitudes(k, n, spec)
        .iter()
        .enumerate()
        .map(|(i, a)| 2.0 * a / (i + 1) as f64)
        .sum()
}

/// Excited state `(d, j + E) / norm` of `-j τ^z + d τ^x` at `g = 0`.
pub fn lrkm_excited_state(j: f64, d: f64) -> Result<[f64; 2]> {
    let e = j.hypot(d);
    let v = [d, j + e];
    let norm = v[0].hypot(v[1]);
    if norm <= 1e-300 {
        if e > 0.0 {
            // d = 0, j < 0: the excited state is the upper component
            return Ok([1.0, 0.0]);
        }
        return Err(Error::Numerical(format!(
            "degenerate LRKM gap (j = {j}, d = {d})"
        )));
    }
    Ok([v[0] / norm, v[1] / norm])
}

/// Overlap of `state` with the `g = 0` excited state.
pub fn lrkm_excited_projection(state: &Spinor, k: f64, table: &CouplingTable) -> Result<f64> {
    let (j, d) = table.lookup(k)?;
    let e = lrkm_excited_state(j, d)?;
    state.probability_along(k, e)
}

/// Dynamical exponent `z`.
pub fn dynamical_exponent(alpha: f64, beta: f64) -> f64 {
    if alpha < beta && beta < 2.0 {
        beta - 1.0
    } else if alpha < beta.min(2.0) {
        beta.min(alpha) - 1.0
    } else {
        1.0
    }
}
