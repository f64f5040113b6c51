//! System specifications, quench protocols, momentum grids, mode Hamiltonians
//! and counterdiabatic (CD) coefficients.
//!
//! All CD coefficients returned here are the rate-independent factor
//! `r_k(g) = q_k(t) / (-ġ)`: the physical CD field is `q_k = -ġ r_k`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Which free-fermion chain is being driven.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    /// Nearest-neighbour transverse-field Ising model.
    Tfim,
    /// Long-range Kitaev model with hopping exponent `alpha` and pairing
    /// exponent `beta`.
    Lrkm { alpha: f64, beta: f64 },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Tfim => "TFIM",
            ModelKind::Lrkm { .. } => "LRKM",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Critical exponents and dimensions entering Kibble-Zurek type scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalityParams {
    pub d: u32,
    pub defect_dim: u32,
    pub z: f64,
    pub nu: f64,
}

impl UniversalityParams {
    pub const TFIM: UniversalityParams = UniversalityParams {
        d: 1,
        defect_dim: 0,
        z: 1.0,
        nu: 1.0,
    };

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return invalid("spatial dimension d must be >= 1");
        }
        if self.defect_dim >= self.d {
            return invalid(format!(
                "defect dimension D = {} must be smaller than d = {}",
                self.defect_dim, self.d
            ));
        }
        if !(self.z > 0.0 && self.z.is_finite()) || !(self.nu > 0.0 && self.nu.is_finite()) {
            return invalid("exponents z and nu must be positive and finite");
        }
        Ok(())
    }
}

/// A finite ring of `l` sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub l: usize,
    pub j: f64,
    pub model: ModelKind,
    pub universality: UniversalityParams,
}

impl SystemSpec {
    pub fn tfim(l: usize) -> Result<Self> {
        let spec = SystemSpec {
            l,
            j: 1.0,
            model: ModelKind::Tfim,
            universality: UniversalityParams::TFIM,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn lrkm(l: usize, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 1.0 && beta > 1.0) || !alpha.is_finite() || !beta.is_finite() {
            return invalid(format!(
                "LRKM exponents must satisfy alpha, beta > 1 (got alpha = {alpha}, beta = {beta})"
            ));
        }
        let spec = SystemSpec {
            l,
            j: 1.0,
            model: ModelKind::Lrkm { alpha, beta },
            universality: UniversalityParams {
                d: 1,
                defect_dim: 0,
                z: crate::kitaev::dynamical_exponent(alpha, beta),
                nu: 1.0,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 4 {
            return invalid(format!("L = {} is too small (need L >= 4)", self.l));
        }
        if self.l % 2 != 0 {
            return invalid(format!("L = {} must be even", self.l));
        }
        if self.l > i32::MAX as usize / 2 {
            return invalid(format!("L = {} is too large", self.l));
        }
        if !(self.j.is_finite() && self.j > 0.0) {
            return invalid("coupling J must be positive");
        }
        if let ModelKind::Lrkm { alpha, beta } = self.model {
            if !(alpha > 1.0 && beta > 1.0) {
                return invalid("LRKM exponents must satisfy alpha, beta > 1");
            }
        }
        self.universality.validate()
    }

    /// Number of independent two-level systems (positive momenta).
    pub fn n_modes(&self) -> usize {
        self.l / 2
    }
}

/// Shape of the field ramp. Only the linear ramp is studied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Schedule {
    #[default]
    Linear,
}

/// Linear quench `g(t) = g0 (1 - t / (g0 T))`.
///
/// `T` is the time spent per unit change of `g`, so `|ġ| = 1/T` and the
/// protocol lasts `g0 T`. With this convention the Landau-Zener law reads
/// `p_k = exp(-2π k² T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchProtocol {
    pub g0: f64,
    pub anneal_time: f64,
    pub schedule: Schedule,
}

impl QuenchProtocol {
    pub const DEFAULT_G0: f64 = 100.0;

    pub fn new(g0: f64, anneal_time: f64) -> Result<Self> {
        let p = QuenchProtocol {
            g0,
            anneal_time,
            schedule: Schedule::Linear,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn linear(anneal_time: f64) -> Result<Self> {
        Self::new(Self::DEFAULT_G0, anneal_time)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g0 > 1.0 && self.g0.is_finite()) {
            return invalid(format!("g0 = {} must be finite and > 1", self.g0));
        }
        if !(self.anneal_time > 0.0 && self.anneal_time.is_finite()) {
            return invalid(format!("T = {} must be finite and > 0", self.anneal_time));
        }
        Ok(())
    }

    /// Wall-clock duration of the ramp.
    pub fn duration(&self) -> f64 {
        self.g0 * self.anneal_time
    }

    /// Sweep rate `ġ` (negative).
    pub fn rate(&self) -> f64 {
        -1.0 / self.anneal_time
    }

    /// Field and its rate at time `t`.
    pub fn field_at(&self, t: f64) -> Result<(f64, f64)> {
        let total = self.duration();
        if !(0.0..=total).contains(&t) {
            return Err(Error::Domain {
                name: "field_at time",
                value: t,
            });
        }
        let g = self.g0 * (1.0 - t / total);
        Ok((g.max(0.0), -self.g0 / total))
    }
}

/// Free-function form of [`QuenchProtocol::field_at`].
pub fn field_at(protocol: &QuenchProtocol, t: f64) -> Result<(f64, f64)> {
    protocol.field_at(t)
}

/// How the order-`n` CD coefficient is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CdForm {
    /// Finite-ring sum of `n` Krylov terms.
    #[default]
    TermSum,
    /// Geometric-sum closed form (thermodynamic limit of the term sum).
    ClosedSum,
    /// Exact, transitionless CD field.
    Exact,
}

impl CdForm {
    pub fn name(&self) -> &'static str {
        match self {
            CdForm::TermSum => "termsum",
            CdForm::ClosedSum => "closed",
            CdForm::Exact => "exact",
        }
    }
}

impl fmt::Display for CdForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CdForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "termsum" | "term-sum" | "term_sum" => Ok(CdForm::TermSum),
            "closed" | "closedsum" | "closed-sum" | "closed_sum" => Ok(CdForm::ClosedSum),
            "exact" => Ok(CdForm::Exact),
            other => invalid(format!("unknown CD form '{other}'")),
        }
    }
}

/// Krylov order and evaluation form of the CD field. `order = 0` means no CD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CdConfig {
    pub order: usize,
    pub form: CdForm,
}

impl CdConfig {
    pub fn none() -> Self {
        CdConfig {
            order: 0,
            form: CdForm::TermSum,
        }
    }

    pub fn term_sum(order: usize) -> Self {
        CdConfig {
            order,
            form: CdForm::TermSum,
        }
    }

    pub fn closed(order: usize) -> Self {
        CdConfig {
            order,
            form: CdForm::ClosedSum,
        }
    }

    pub fn exact() -> Self {
        CdConfig {
            order: 0,
            form: CdForm::Exact,
        }
    }

    pub fn is_active(&self) -> bool {
        self.form == CdForm::Exact || self.order > 0
    }

    pub fn validate(&self, spec: &SystemSpec) -> Result<()> {
        if self.form != CdForm::Exact && self.order > spec.l {
            return invalid(format!(
                "CD order n = {} exceeds L = {}",
                self.order, spec.l
            ));
        }
        Ok(())
    }
}

/// Two-level Hamiltonian `hz τ^z + hx τ^x` of a single momentum mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeHamiltonian {
    pub hz: f64,
    pub hx: f64,
    pub k: f64,
}

impl ModeHamiltonian {
    pub fn tfim(k: f64, g: f64) -> Self {
        ModeHamiltonian {
            hz: g - k.cos(),
            hx: k.sin(),
            k,
        }
    }

    /// Half the single-mode gap, `sqrt(hz² + hx²)`.
    pub fn energy(&self) -> f64 {
        self.hz.hypot(self.hx)
    }

    /// Bogoliubov angle `θ = atan2(hx, hz)`.
    pub fn angle(&self) -> f64 {
        self.hx.atan2(self.hz)
    }

    /// Real ground state `(-sin θ/2, cos θ/2)`.
    pub fn ground_state(&self) -> [f64; 2] {
        let half = 0.5 * self.angle();
        [-half.sin(), half.cos()]
    }

    /// Real excited state `(cos θ/2, sin θ/2)`.
    pub fn excited_state(&self) -> [f64; 2] {
        let half = 0.5 * self.angle();
        [half.cos(), half.sin()]
    }
}

/// Antiperiodic momentum grid `k_j = (2j - 1)π/L`, `j = 1..L/2`.
pub fn momentum_grid(spec: &SystemSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let l = spec.l as f64;
    Ok((1..=spec.n_modes())
        .map(|j| (2 * j - 1) as f64 * PI / l)
        .collect())
}

/// Ring weight `c_m(g) = (g^{m-1} + g^{L-m-1}) / (1 + g^L)` and its
/// derivative with respect to `g`.
///
/// The weight is symmetric under `m -> L - m`, so orders above `L/2` are
/// folded back. For `|g| > 1` the equivalent form in `y = 1/g`,
/// `(y^{m+1} + y^{L-m+1}) / (1 + y^L)`, keeps every power bounded. The
/// order `m = L` would fold onto distance zero; its prefactor `sin(kL)`
/// vanishes on the grid and the term is taken as zero.
pub(crate) fn ring_weight(m: usize, g: f64, l: usize) -> (f64, f64) {
    let m = if 2 * m > l { l - m } else { m };
    if m == 0 {
        return (0.0, 0.0);
    }
    let li = l as i32;
    let mi = m as i32;
    if g.abs() <= 1.0 {
        let y = g;
        let (e1, e2) = (mi - 1, li - mi - 1);
        let den = 1.0 + y.powi(li);
        let c = (y.powi(e1) + y.powi(e2)) / den;
        let mut dnum = 0.0;
        if e1 > 0 {
            dnum += e1 as f64 * y.powi(e1 - 1);
        }
        if e2 > 0 {
            dnum += e2 as f64 * y.powi(e2 - 1);
        }
        let dden = l as f64 * y.powi(li - 1);
        (c, (dnum - c * dden) / den)
    } else {
        let y = 1.0 / g;
        let (e1, e2) = (mi + 1, li - mi + 1);
        let den = 1.0 + y.powi(li);
        let c = (y.powi(e1) + y.powi(e2)) / den;
        let dnum = e1 as f64 * y.powi(e1 - 1) + e2 as f64 * y.powi(e2 - 1);
        let dden = l as f64 * y.powi(li - 1);
        let dc_dy = (dnum - c * dden) / den;
        (c, -dc_dy * y * y)
    }
}

/// `Σ_m A_m c_m(g)` and its `g`-derivative, `amplitudes[m - 1] = A_m`.
pub(crate) fn ring_series(amplitudes: &[f64], g: f64, l: usize) -> (f64, f64) {
    amplitudes
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(v, d), (i, &a)| {
            if a == 0.0 {
                return (v, d);
            }
            let (c, dc) = ring_weight(i + 1, g, l);
            (v + a * c, d + a * dc)
        })
}

/// Krylov amplitudes `sin(k m) / 2` for `m = 1..n`.
pub(crate) fn tfim_amplitudes(k: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|m| 0.5 * (k * m as f64).sin()).collect()
}

/// Order-`n` CD coefficient as the finite-ring sum
/// `Σ_{m=1}^n (sin(km)/2) (g^{m-1} + g^{L-m-1}) / (1 + g^L)`.
pub fn cd_coefficient_termsum(k: f64, g: f64, n: usize, l: usize) -> f64 {
    cd_termsum_with_slope(k, g, n, l).0
}

pub(crate) fn cd_termsum_with_slope(k: f64, g: f64, n: usize, l: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    ring_series(&tfim_amplitudes(k, n), g, l)
}

/// Order-`n` CD coefficient in closed geometric-sum form,
/// `[sin k - sin(k(n+1)) g^{±n} + sin(kn) g^{±(n+1)}] / (2(1 + g² - 2g cos k))`
/// with the upper sign for `|g| <= 1`.
pub fn cd_coefficient_closed(k: f64, g: f64, n: usize) -> f64 {
    cd_closed_with_slope(k, g, n).0
}

pub(crate) fn cd_closed_with_slope(k: f64, g: f64, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let nf = n as f64;
    let ni = n as i32;
    let s1 = k.sin();
    let sn = (k * nf).sin();
    let sn1 = (k * (nf + 1.0)).sin();
    let (num, dnum) = if g.abs() <= 1.0 {
        let gn = g.powi(ni);
        let num = s1 - sn1 * gn + sn * gn * g;
        let dnum = if ni >= 1 {
            -nf * sn1 * g.powi(ni - 1) + (nf + 1.0) * sn * gn
        } else {
            0.0
        };
        (num, dnum)
    } else {
        let y = 1.0 / g;
        let yn = y.powi(ni);
        let num = s1 - sn1 * yn + sn * yn * y;
        let dnum = nf * sn1 * yn * y - (nf + 1.0) * sn * yn * y * y;
        (num, dnum)
    };
    let den = 1.0 + g * g - 2.0 * g * k.cos();
    let dden = 2.0 * g - 2.0 * k.cos();
    (
        num / (2.0 * den),
        (dnum * den - num * dden) / (2.0 * den * den),
    )
}

/// Exact single-mode CD coefficient `sin k / (2(1 + g² - 2g cos k))`.
pub fn cd_coefficient_exact(k: f64, g: f64) -> f64 {
    exact_cd_with_slope(g - k.cos(), k.sin()).0
}

/// Exact CD coefficient `hx / (2(hz² + hx²))` for a mode with
/// `hz = g - const`, together with its `g`-derivative.
pub(crate) fn exact_cd_with_slope(hz: f64, hx: f64) -> (f64, f64) {
    let e2 = hz * hz + hx * hx;
    (hx / (2.0 * e2), -hx * hz / (e2 * e2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn grid_small_ring() {
        let spec = SystemSpec::tfim(4).unwrap();
        let ks = momentum_grid(&spec).unwrap();
        assert_eq!(ks.len(), 2);
        assert_relative_eq!(ks[0], PI / 4.0);
        assert_relative_eq!(ks[1], 3.0 * PI / 4.0);
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(SystemSpec::tfim(2).is_err());
        assert!(SystemSpec::tfim(7).is_err());
    }

    #[test]
    fn grid_large_ring() {
        let spec = SystemSpec::tfim(1600).unwrap();
        let ks = momentum_grid(&spec).unwrap();
        assert_eq!(ks.len(), 800);
        assert_relative_eq!(*ks.last().unwrap(), PI - PI / 1600.0, epsilon = 1e-14);
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
        assert!(ks.iter().all(|&k| k > 0.0 && k < PI));
    }

    #[test]
    fn grid_cosines_cancel() {
        for l in [4, 10, 64, 1600] {
            let ks = momentum_grid(&SystemSpec::tfim(l).unwrap()).unwrap();
            let s: f64 = ks.iter().map(|k| k.cos()).sum();
            assert!(s.abs() < 1e-10 * l as f64, "L = {l}: {s}");
        }
    }

    #[test]
    fn field_schedule() {
        let p = QuenchProtocol::new(100.0, 2.0).unwrap();
        assert_eq!(p.duration(), 200.0);
        assert_eq!(p.field_at(0.0).unwrap().0, 100.0);
        assert_eq!(p.field_at(200.0).unwrap().0, 0.0);
        assert_relative_eq!(p.field_at(100.0).unwrap().0, 50.0);
        assert_relative_eq!(p.field_at(10.0).unwrap().1, -0.5);
        assert!(p.field_at(-1.0).is_err());
        assert!(p.field_at(200.5).is_err());
        assert!(QuenchProtocol::new(0.5, 1.0).is_err());
        assert!(QuenchProtocol::new(10.0, 0.0).is_err());
    }

    #[test]
    fn cd_order_bounds() {
        let spec = SystemSpec::tfim(8).unwrap();
        assert!(CdConfig::term_sum(8).validate(&spec).is_ok());
        assert!(CdConfig::term_sum(9).validate(&spec).is_err());
    }

    #[test]
    fn termsum_zero_order_and_edge() {
        assert_eq!(cd_coefficient_termsum(0.7, 0.3, 0, 1600), 0.0);
        for n in [1, 5, 40] {
            for g in [0.0, 0.5, 1.0, 3.0] {
                assert!(cd_coefficient_termsum(PI, g, n, 1600).abs() < 1e-14);
                assert!(cd_coefficient_closed(PI, g, n).abs() < 1e-14);
            }
        }
        assert!(cd_coefficient_exact(PI, 0.3).abs() < 1e-15);
    }

    #[test]
    fn termsum_two_terms_direct() {
        let (k, g, l) = (PI / 2.0, 0.5_f64, 1600);
        let direct: f64 = (1..=2)
            .map(|m| {
                let mf = m as f64;
                0.5 * (k * mf).sin() * (g.powf(mf - 1.0) + g.powf(l as f64 - mf - 1.0))
                    / (1.0 + g.powf(l as f64))
            })
            .sum();
        assert_relative_eq!(cd_coefficient_termsum(k, g, 2, l), direct, max_relative = 1e-15);
        assert_relative_eq!(direct, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn closed_matches_termsum_example() {
        let a = cd_coefficient_closed(0.1, 0.9, 8);
        let b = cd_coefficient_termsum(0.1, 0.9, 8, 1600);
        assert_relative_eq!(a, b, max_relative = 1e-10);
    }

    #[test]
    fn exact_examples() {
        assert_relative_eq!(cd_coefficient_exact(PI / 2.0, 0.0), 0.5);
        let v = cd_coefficient_exact(0.05, 1.0);
        assert_relative_eq!(v, 0.05_f64.sin() / (2.0 * (2.0 - 2.0 * 0.05_f64.cos())), max_relative = 1e-10);
        assert!((v - 9.99).abs() < 0.01);
    }

    #[test]
    fn closed_sum_equivalence_on_grid() {
        let ks = momentum_grid(&SystemSpec::tfim(1600).unwrap()).unwrap();
        let gs = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.5, 5.0, 50.0];
        for n in [1, 2, 7, 16, 33, 64] {
            for &g in &gs {
                for &k in ks.iter().step_by(7) {
                    let t = cd_coefficient_termsum(k, g, n, 1600);
                    let c = cd_coefficient_closed(k, g, n);
                    assert!((t - c).abs() <= 1e-8 * (1.0 + t.abs()), "n={n} g={g} k={k}");
                }
            }
        }
    }

    #[test]
    fn half_ring_order_recovers_exact() {
        let l = 1600;
        let ks = momentum_grid(&SystemSpec::tfim(l).unwrap()).unwrap();
        for &g in &[0.05, 0.3, 0.6, 0.9, 0.95] {
            for &k in ks.iter().filter(|&&k| k >= 10.0 * PI / l as f64).step_by(11) {
                let t = cd_coefficient_termsum(k, g, l / 2, l);
                let e = cd_coefficient_exact(k, g);
                assert_relative_eq!(t, e, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn full_ring_order_double_counts() {
        let l = 64;
        let k = 5.0 * PI / l as f64;
        let t = cd_coefficient_termsum(k, 0.4, l, l);
        assert_relative_eq!(t, 2.0 * cd_coefficient_exact(k, 0.4), max_relative = 1e-10);
    }

    #[test]
    fn large_field_is_finite() {
        for g in [10.0, 1e3, 1e8] {
            let v = cd_coefficient_termsum(0.3, g, 64, 1600);
            assert!(v.is_finite());
            assert!(v.abs() < 1.0 / g);
        }
    }

    fn numeric_slope(f: impl Fn(f64) -> f64, g: f64) -> f64 {
        let h = 1e-6 * (1.0 + g.abs());
        (f(g + h) - f(g - h)) / (2.0 * h)
    }

    proptest! {
        #[test]
        fn termsum_slope_matches_finite_difference(
            k in 0.01f64..3.1, g in 0.0f64..4.0, n in 1usize..40
        ) {
            prop_assume!((g - 1.0).abs() > 1e-3 && g > 1e-3);
            let (_, d) = cd_termsum_with_slope(k, g, n, 200);
            let fd = numeric_slope(|x| cd_coefficient_termsum(k, x, n, 200), g);
            prop_assert!((d - fd).abs() <= 1e-5 * (1.0 + fd.abs()), "{} vs {}", d, fd);
        }

        #[test]
        fn closed_slope_matches_finite_difference(
            k in 0.01f64..3.1, g in 0.0f64..4.0, n in 1usize..40
        ) {
            prop_assume!((g - 1.0).abs() > 1e-3 && g > 1e-3);
            let (_, d) = cd_closed_with_slope(k, g, n);
            let fd = numeric_slope(|x| cd_coefficient_closed(k, x, n), g);
            prop_assert!((d - fd).abs() <= 1e-5 * (1.0 + fd.abs()));
        }

        #[test]
        fn exact_slope_matches_finite_difference(k in 0.01f64..3.1, g in 0.0f64..4.0) {
            let (_, d) = exact_cd_with_slope(g - k.cos(), k.sin());
            let fd = numeric_slope(|x| cd_coefficient_exact(k, x), g);
            prop_assert!((d - fd).abs() <= 1e-5 * (1.0 + fd.abs()));
        }

        #[test]
        fn exact_coefficient_positive(k in 0.001f64..3.1, g in 0.0f64..100.0) {
            let v = cd_coefficient_exact(k, g);
            prop_assert!(v > 0.0 && v.is_finite());
        }

        #[test]
        fn closed_equals_termsum_away_from_unit_field(
            j in 1usize..=800, g in prop_oneof![0.0f64..0.97, 1.03f64..60.0], n in 0usize..=64
        ) {
            let k = (2 * j - 1) as f64 * PI / 1600.0;
            let t = cd_coefficient_termsum(k, g, n, 1600);
            let c = cd_coefficient_closed(k, g, n);
            prop_assert!((t - c).abs() <= 1e-8 * (1.0 + t.abs()));
        }

        #[test]
        fn ground_and_excited_states_are_eigenvectors(k in 0.01f64..3.13, g in 0.0f64..50.0) {
            let h = ModeHamiltonian::tfim(k, g);
            let e = h.energy();
            for (v, sign) in [(h.ground_state(), -1.0), (h.excited_state(), 1.0)] {
                let hv = [h.hz * v[0] + h.hx * v[1], h.hx * v[0] - h.hz * v[1]];
                prop_assert!((hv[0] - sign * e * v[0]).abs() < 1e-12 * (1.0 + e));
                prop_assert!((hv[1] - sign * e * v[1]).abs() < 1e-12 * (1.0 + e));
            }
        }
    }
}
