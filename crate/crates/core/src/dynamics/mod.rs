//! Per-mode two-level dynamics and probability tables.
//!
//! Each momentum mode evolves under
//! `i dψ/ds = [2T (hz(g) τ^z + hx τ^x) + r(g) τ^y] ψ` with `s = g0 - g`
//! running from `0` to `g0`; the CD coefficient `r` enters without any
//! dependence on `T`. The default integrator works in the instantaneous
//! eigenbasis followed by a second rotation about `τ^x` that absorbs the
//! residual coupling wherever it is small, so the fast dynamical phase is
//! carried analytically and only the slow non-adiabatic part is stepped.

mod integrate;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::error::{invalid, Error, Result};
use crate::kitaev::{self, LrkmSpec};
use crate::model::{
    cd_closed_with_slope, exact_cd_with_slope, momentum_grid, ring_series, tfim_amplitudes,
    CdConfig, CdForm, ModelKind, QuenchProtocol, SystemSpec,
};

use integrate::Generator;

/// Slack within which probabilities are clamped rather than rejected.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// Two complex amplitudes `(ψ₁, ψ₂)` of a momentum mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    pub psi1: Complex64,
    pub psi2: Complex64,
}

impl Spinor {
    pub fn new(psi1: Complex64, psi2: Complex64) -> Self {
        Spinor { psi1, psi2 }
    }

    pub fn real(a: f64, b: f64) -> Self {
        Spinor {
            psi1: Complex64::new(a, 0.0),
            psi2: Complex64::new(b, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi1.norm_sqr() + self.psi2.norm_sqr()
    }

    /// `|⟨e|ψ⟩|²` for a real unit vector `e`, after checking normalisation.
    pub fn probability_along(&self, k: f64, e: [f64; 2]) -> Result<f64> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > 1e-6 {
            return invalid(format!("spinor is not normalised (|ψ|² = {n})"));
        }
        clamp_probability(k, (self.psi1 * e[0] + self.psi2 * e[1]).norm_sqr())
    }

    /// Real rotation `exp(-i θ/2 τ^y)` applied to the spinor.
    fn rotate_y(&self, theta: f64) -> Spinor {
        let (s, c) = (0.5 * theta).sin_cos();
        Spinor {
            psi1: self.psi1 * c - self.psi2 * s,
            psi2: self.psi1 * s + self.psi2 * c,
        }
    }

    /// `exp(-i β/2 τ^x)` applied to the spinor.
    fn rotate_x(&self, beta: f64) -> Spinor {
        let (s, c) = (0.5 * beta).sin_cos();
        let mi = Complex64::new(0.0, -s);
        Spinor {
            psi1: self.psi1 * c + self.psi2 * mi,
            psi2: self.psi1 * mi + self.psi2 * c,
        }
    }
}

/// Clamp `p` into `[0, 1]` if it lies within [`PROBABILITY_SLACK`].
pub fn clamp_probability(k: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p < -PROBABILITY_SLACK || p > 1.0 + PROBABILITY_SLACK {
        return Err(Error::Probability { k, value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Which ODE scheme [`propagate_mode`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Integrator {
    /// Fourth-order Magnus in the adiabatic/superadiabatic frame.
    #[default]
    Magnus,
    /// Dormand-Prince 5(4) directly on the lab-frame equation.
    DormandPrince,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub initial_step: f64,
    pub integrator: Integrator,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 2_000_000,
            initial_step: 1e-2,
            integrator: Integrator::Magnus,
        }
    }
}

impl IntegratorOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return invalid("integrator tolerances must be positive");
        }
        if self.max_steps < 1000 {
            return invalid("max_steps must be at least 1000");
        }
        if !(self.initial_step > 0.0) {
            return invalid("initial step must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationResult {
    pub final_state: Spinor,
    pub norm_drift: f64,
    pub steps_taken: usize,
    pub k: f64,
}

/// How per-mode probabilities are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Method {
    /// Numerical propagation of every mode.
    #[default]
    Ode,
    /// Exact sudden-limit result for the order-`n` CD field.
    AnalyticFast,
    /// Universal scaling form of the sudden limit.
    AnalyticUniversal,
    /// Landau-Zener law without CD.
    Lz,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Ode => "ODE",
            Method::AnalyticFast => "AnalyticFast",
            Method::AnalyticUniversal => "AnalyticUniversal",
            Method::Lz => "LZ",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ode" => Ok(Method::Ode),
            "fast" | "analyticfast" | "analytic-fast" => Ok(Method::AnalyticFast),
            "universal" | "analyticuniversal" | "analytic-universal" => {
                Ok(Method::AnalyticUniversal)
            }
            "lz" => Ok(Method::Lz),
            other => invalid(format!("unknown method '{other}'")),
        }
    }
}

/// Provenance of a [`ProbabilityTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub l: usize,
    pub anneal_time: f64,
    pub g0: f64,
    pub order: usize,
    pub form: CdForm,
    pub model: ModelKind,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    pub momenta: Vec<f64>,
    pub probs: Vec<f64>,
    pub meta: TableMeta,
}

impl ProbabilityTable {
    /// Builds a table from raw probabilities, checking the invariants.
    pub fn new(momenta: Vec<f64>, probs: Vec<f64>, meta: TableMeta) -> Result<Self> {
        if momenta.len() != probs.len() {
            return invalid("momenta and probabilities differ in length");
        }
        if momenta.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("momenta must be strictly increasing");
        }
        let probs = momenta
            .iter()
            .zip(probs)
            .map(|(&k, p)| clamp_probability(k, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbabilityTable {
            momenta,
            probs,
            meta,
        })
    }

    /// A table with no provenance beyond the mode count, for synthetic input.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let momenta = (0..probs.len())
            .map(|i| (2 * i + 1) as f64 * PI / (2 * probs.len()).max(1) as f64)
            .collect();
        let meta = TableMeta {
            l: 2 * probs.len(),
            anneal_time: f64::NAN,
            g0: f64::NAN,
            order: 0,
            form: CdForm::TermSum,
            model: ModelKind::Tfim,
            method: Method::AnalyticFast,
        };
        ProbabilityTable::new(momenta, probs, meta)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum CdProfile {
    None,
    Series(Vec<f64>),
    Closed(usize),
    Exact,
}

/// One momentum mode `(g - offset) τ^z + hx τ^x` with its CD coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDriver {
    pub k: f64,
    pub offset: f64,
    pub hx: f64,
    l: usize,
    cd: CdProfile,
}

impl ModeDriver {
    pub fn new(spec: &SystemSpec, cd: &CdConfig, k: f64) -> Result<Self> {
        spec.validate()?;
        cd.validate(spec)?;
        let (offset, hx, series) = match spec.model {
            ModelKind::Tfim => (k.cos(), k.sin(), tfim_amplitudes(k, cd.order)),
            ModelKind::Lrkm { .. } => {
                let lspec = LrkmSpec::try_from(spec)?;
                let (j, d) = kitaev::coupling_at(k, &lspec);
                (j, d, kitaev::cd_amplitudes(k, cd.order, &lspec))
            }
        };
        let profile = match cd.form {
            CdForm::Exact => CdProfile::Exact,
            _ if cd.order == 0 => CdProfile::None,
            CdForm::TermSum => CdProfile::Series(series),
            CdForm::ClosedSum => match spec.model {
                ModelKind::Tfim => CdProfile::Closed(cd.order),
                ModelKind::Lrkm { .. } => {
                    return Err(Error::Unsupported(
                        "closed-sum CD form is defined for the Ising chain only".into(),
                    ))
                }
            },
        };
        Ok(ModeDriver {
            k,
            offset,
            hx,
            l: spec.l,
            cd: profile,
        })
    }

    pub fn hz(&self, g: f64) -> f64 {
        g - self.offset
    }

    /// CD coefficient and its `g`-derivative.
    pub fn cd_field(&self, g: f64) -> (f64, f64) {
        match &self.cd {
            CdProfile::None => (0.0, 0.0),
            CdProfile::Series(a) => ring_series(a, g, self.l),
            CdProfile::Closed(n) => cd_closed_with_slope(self.k, g, *n),
            CdProfile::Exact => exact_cd_with_slope(self.hz(g), self.hx),
        }
    }

    /// Bogoliubov angle `atan2(hx, hz)`.
    pub fn angle(&self, g: f64) -> f64 {
        self.hx.atan2(self.hz(g))
    }

    pub fn ground_state(&self, g: f64) -> [f64; 2] {
        let half = 0.5 * self.angle(g);
        [-half.sin(), half.cos()]
    }

    pub fn excited_state(&self, g: f64) -> [f64; 2] {
        let half = 0.5 * self.angle(g);
        [half.cos(), half.sin()]
    }

    /// Length scale in `g` over which the generator changes appreciably.
    fn feature_scale(&self, g: f64) -> f64 {
        let mut scale = (g - self.offset).abs() + self.hx.abs();
        match self.cd {
            CdProfile::Series(_) => scale = scale.min((g - 1.0).abs() + 1.0 / self.l as f64),
            CdProfile::Closed(n) => scale = scale.min((g - 1.0).abs() + 1.0 / (n + 1) as f64),
            _ => {}
        }
        scale.max(1e-9)
    }

    /// Largest downward step in `g` starting at `g`, never crossing a point
    /// where the CD field has a kink.
    fn step_limit(&self, g: f64) -> f64 {
        let cap = STEP_FRACTION * self.feature_scale(g);
        if let CdProfile::Closed(_) = self.cd {
            let to_kink = g - 1.0;
            if to_kink > 1e-14 {
                return cap.min(to_kink);
            }
        }
        cap
    }
}

const FRAME_INNER: f64 = 0.05;
const FRAME_OUTER: f64 = 0.2;
const STEP_FRACTION: f64 = 0.25;
/// Smallest `2T|hx|` (the scaled gap at the avoided crossing) for which the
/// superadiabatic correction to the frame is switched on.
const SUPERADIABATIC_MIN_GAP: f64 = 1.0;

/// Smootherstep weight: 1 for `|x| <= FRAME_INNER`, 0 for `|x| >= FRAME_OUTER`,
/// with its derivative.
fn frame_weight(x: f64) -> (f64, f64) {
    let ax = x.abs();
    if ax <= FRAME_INNER {
        return (1.0, 0.0);
    }
    if ax >= FRAME_OUTER {
        return (0.0, 0.0);
    }
    let width = FRAME_OUTER - FRAME_INNER;
    let t = (FRAME_OUTER - ax) / width;
    let w = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    let dw_dt = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    (w, -dw_dt / width * x.signum())
}

/// Generator of the mode dynamics in the rotated frame.
struct FrameGenerator<'a> {
    drv: &'a ModeDriver,
    two_t: f64,
    superadiabatic: bool,
}

struct FrameData {
    beta: f64,
    vector: [f64; 3],
    /// Distance in `g` over which the frame angle can switch on or off.
    window_scale: f64,
}

impl FrameGenerator<'_> {
    fn at_field(&self, g: f64) -> FrameData {
        let hz = self.drv.hz(g);
        let hx = self.drv.hx;
        let eps = hz.hypot(hx);
        let a = self.two_t * eps;
        let da = self.two_t * hz / eps;
        let (r, dr) = self.drv.cd_field(g);
        let (rex, drex) = exact_cd_with_slope(hz, hx);
        let b = r - rex;
        let db = dr - drex;
        let x = b / a;
        let dx_dg = (db * a - b * da) / (a * a);
        let (w, dw) = if self.superadiabatic {
            frame_weight(x)
        } else {
            (0.0, 0.0)
        };
        let (beta, beta_s) = if w == 0.0 {
            (0.0, 0.0)
        } else {
            let at = x.atan();
            let dbeta_dx = -(dw * at + w / (1.0 + x * x));
            (-w * at, -dbeta_dx * dx_dg)
        };
        let (sb, cb) = beta.sin_cos();
        FrameData {
            beta,
            vector: [-0.5 * beta_s, a * sb + b * cb, a * cb - b * sb],
            window_scale: if self.superadiabatic {
                (x.abs() + FRAME_OUTER) / dx_dg.abs()
            } else {
                f64::INFINITY
            },
        }
    }
}

impl Generator for FrameGenerator<'_> {
    fn vector(&self, g: f64) -> [f64; 3] {
        self.at_field(g).vector
    }

    fn max_step(&self, g: f64) -> f64 {
        let window = STEP_FRACTION * self.at_field(g).window_scale;
        self.drv.step_limit(g).min(window)
    }
}

/// Generator of the lab-frame equation.
struct LabGenerator<'a> {
    drv: &'a ModeDriver,
    two_t: f64,
}

impl Generator for LabGenerator<'_> {
    fn vector(&self, g: f64) -> [f64; 3] {
        [
            self.two_t * self.drv.hx,
            self.drv.cd_field(g).0,
            self.two_t * self.drv.hz(g),
        ]
    }

    fn max_step(&self, g: f64) -> f64 {
        self.drv.step_limit(g)
    }
}

/// Propagates a prepared mode from its ground state at `g0` to `g = 0`.
pub fn propagate_driver(
    drv: &ModeDriver,
    protocol: &QuenchProtocol,
    opts: &IntegratorOptions,
) -> Result<PropagationResult> {
    protocol.validate()?;
    opts.validate()?;
    let g0 = protocol.g0;
    let two_t = 2.0 * protocol.anneal_time;
    let out = match opts.integrator {
        Integrator::Magnus => {
            let gen = FrameGenerator {
                drv,
                two_t,
                superadiabatic: two_t * drv.hx.abs() >= SUPERADIABATIC_MIN_GAP,
            };
            let start = gen.at_field(g0);
            let d0 = Spinor::real(0.0, 1.0).rotate_x(-start.beta);
            let mut out = integrate::magnus(&gen, g0, 0.0, d0, opts, drv.k)?;
            let end = gen.at_field(0.0);
            out.state = out.state.rotate_x(end.beta).rotate_y(drv.angle(0.0));
            out
        }
        Integrator::DormandPrince => {
            let gen = LabGenerator { drv, two_t };
            let gs = drv.ground_state(g0);
            integrate::dormand_prince(&gen, g0, 0.0, Spinor::real(gs[0], gs[1]), opts, drv.k)?
        }
    };
    if out.norm_drift > 100.0 * opts.rel_tol {
        return Err(Error::Integration {
            k: drv.k,
            reason: format!("norm drift {:e} exceeds tolerance", out.norm_drift),
            steps: out.steps,
            position: g0,
        });
    }
    Ok(PropagationResult {
        final_state: out.state,
        norm_drift: out.norm_drift,
        steps_taken: out.steps,
        k: drv.k,
    })
}

/// Integrates a single mode from the ground state at `g0` down to `g = 0`.
pub fn propagate_mode(
    spec: &SystemSpec,
    protocol: &QuenchProtocol,
    cd: &CdConfig,
    k: f64,
    opts: &IntegratorOptions,
) -> Result<PropagationResult> {
    if !(k > 0.0 && k < PI) {
        return Err(Error::Domain {
            name: "mode momentum",
            value: k,
        });
    }
    let drv = ModeDriver::new(spec, cd, k)?;
    propagate_driver(&drv, protocol, opts)
}

/// Probability of finding the Ising mode `k` excited at field `g_final`.
/// At `g_final = 0` this is `|sin(k/2) ψ₁ + cos(k/2) ψ₂|²`.
pub fn excitation_probability(state: &Spinor, k: f64, g_final: f64) -> Result<f64> {
    let h = crate::model::ModeHamiltonian::tfim(k, g_final);
    state.probability_along(k, h.excited_state())
}

/// Landau-Zener excitation probability `exp(-2π k² T)`.
pub fn lz_probability(k: f64, anneal_time: f64) -> f64 {
    (-2.0 * PI * k * k * anneal_time).exp()
}

fn mode_probability(
    spec: &SystemSpec,
    protocol: &QuenchProtocol,
    cd: &CdConfig,
    method: Method,
    k: f64,
    opts: &IntegratorOptions,
) -> Result<f64> {
    let exact = cd.form == CdForm::Exact;
    match method {
        Method::Ode => {
            let drv = ModeDriver::new(spec, cd, k)?;
            let res = propagate_driver(&drv, protocol, opts)?;
            res.final_state.probability_along(k, drv.excited_state(0.0))
        }
        Method::Lz => match spec.model {
            ModelKind::Tfim if !cd.is_active() => Ok(lz_probability(k, protocol.anneal_time)),
            _ => Err(Error::Unsupported(
                "the Landau-Zener method describes the Ising chain without CD".into(),
            )),
        },
        Method::AnalyticFast | Method::AnalyticUniversal if exact => Ok(0.0),
        Method::AnalyticFast => match spec.model {
            ModelKind::Tfim if cd.order == 0 => Ok((0.5 * k).cos().powi(2)),
            ModelKind::Tfim => Ok(analytic::p_fast_exact(cd.order, k)),
            ModelKind::Lrkm { .. } => {
                let lspec = LrkmSpec::try_from(spec)?;
                let (j, d) = kitaev::coupling_at(k, &lspec);
                let half = 0.5 * d.atan2(-j);
                let angle = kitaev::lrkm_sudden_angle(cd.order, k, &lspec);
                clamp_probability(k, (half - angle).sin().powi(2))
            }
        },
        Method::AnalyticUniversal => match spec.model {
            ModelKind::Tfim if cd.order == 0 => Ok((0.5 * k).cos().powi(2)),
            ModelKind::Tfim => Ok(analytic::p_fast_universal(cd.order, k)),
            ModelKind::Lrkm { .. } if cd.order == 0 => {
                let lspec = LrkmSpec::try_from(spec)?;
                let (j, d) = kitaev::coupling_at(k, &lspec);
                Ok((0.5 * d.atan2(-j)).sin().powi(2))
            }
            ModelKind::Lrkm { .. } => {
                Ok(kitaev::lrkm_p_sudden(cd.order, k, &LrkmSpec::try_from(spec)?))
            }
        },
    }
}

/// One probability per grid momentum, assembled in grid order.
pub fn probability_table(
    spec: &SystemSpec,
    protocol: &QuenchProtocol,
    cd: &CdConfig,
    method: Method,
    opts: &IntegratorOptions,
) -> Result<ProbabilityTable> {
    spec.validate()?;
    protocol.validate()?;
    cd.validate(spec)?;
    opts.validate()?;
    let momenta = momentum_grid(spec)?;
    let results: Vec<Result<f64>> = momenta
        .par_iter()
        .map(|&k| mode_probability(spec, protocol, cd, method, k, opts))
        .collect();
    let mut probs = Vec::with_capacity(results.len());
    for (index, r) in results.into_iter().enumerate() {
        probs.push(r.map_err(|e| Error::Mode {
            index,
            source: Box::new(e),
        })?);
    }
    let meta = TableMeta {
        l: spec.l,
        anneal_time: protocol.anneal_time,
        g0: protocol.g0,
        order: if cd.form == CdForm::Exact { 0 } else { cd.order },
        form: cd.form,
        model: spec.model,
        method,
    };
    ProbabilityTable::new(momenta, probs, meta)
}
