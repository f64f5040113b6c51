//! Parameter sweeps, power-law fits, breakdown-scale extraction, scaling
//! collapse checks and the validation suite.

mod validate;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dynamics::{probability_table, IntegratorOptions, Method, ProbabilityTable};
use crate::error::{invalid, Error, Result};
use crate::model::{CdConfig, ModelKind, QuenchProtocol, SystemSpec};
use crate::statistics::{
    cumulants_from_probs, distribution_exact, gaussian_surrogate, total_variation, CumulantReport,
};

pub use validate::{
    criterion_ids, run_single, validate_suite, CriterionResult, ValidationLevel, ValidationReport,
};

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParameter {
    AnnealTime,
    Order,
    Size,
    Alpha,
    Beta,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::AnnealTime => "T",
            SweepParameter::Order => "n",
            SweepParameter::Size => "L",
            SweepParameter::Alpha => "alpha",
            SweepParameter::Beta => "beta",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" => Ok(SweepParameter::AnnealTime),
            "n" | "N" | "cd-order" => Ok(SweepParameter::Order),
            "L" | "l" => Ok(SweepParameter::Size),
            "alpha" => Ok(SweepParameter::Alpha),
            "beta" => Ok(SweepParameter::Beta),
            other => invalid(format!("unknown sweep parameter '{other}'")),
        }
    }
}

/// `count` log-spaced values from `start` to `stop` inclusive.
pub fn log_space(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > start) || count < 2 {
        return invalid("log range needs 0 < start < stop and at least two points");
    }
    let (a, b) = (start.ln(), stop.ln());
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                start
            } else if i + 1 == count {
                stop
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub varying: SweepParameter,
    pub values: Vec<f64>,
    pub system: SystemSpec,
    pub protocol: QuenchProtocol,
    pub cd: CdConfig,
    pub method: Method,
    pub q_max: usize,
    pub options: IntegratorOptions,
    /// Also compute the exact distribution and its Gaussian distance per row.
    pub with_distribution: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return invalid("sweep has no values");
        }
        if self.values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return invalid("sweep values must be positive and finite");
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("sweep values must be strictly increasing");
        }
        if matches!(self.varying, SweepParameter::Alpha | SweepParameter::Beta)
            && self.system.model == ModelKind::Tfim
        {
            return invalid("alpha/beta sweeps need the LRKM model");
        }
        Ok(())
    }

    /// Concrete inputs for one sweep value.
    pub fn instantiate(&self, value: f64) -> Result<(SystemSpec, QuenchProtocol, CdConfig)> {
        let mut system = self.system;
        let mut protocol = self.protocol;
        let mut cd = self.cd;
        let as_integer = |v: f64| -> Result<usize> {
            if (v - v.round()).abs() > 1e-9 {
                return invalid(format!("{} must be an integer, got {v}", self.varying));
            }
            Ok(v.round() as usize)
        };
        match self.varying {
            SweepParameter::AnnealTime => protocol.anneal_time = value,
            SweepParameter::Order => cd.order = as_integer(value)?,
            SweepParameter::Size => {
                system = match system.model {
                    ModelKind::Tfim => SystemSpec::tfim(as_integer(value)?)?,
                    ModelKind::Lrkm { alpha, beta } => {
                        SystemSpec::lrkm(as_integer(value)?, alpha, beta)?
                    }
                }
            }
            SweepParameter::Alpha | SweepParameter::Beta => {
                let ModelKind::Lrkm { alpha, beta } = system.model else {
                    return invalid("alpha/beta sweeps need the LRKM model");
                };
                system = if self.varying == SweepParameter::Alpha {
                    SystemSpec::lrkm(system.l, value, beta)?
                } else {
                    SystemSpec::lrkm(system.l, alpha, value)?
                };
            }
        }
        system.validate()?;
        protocol.validate()?;
        cd.validate(&system)?;
        Ok((system, protocol, cd))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub mean: f64,
    pub variance: f64,
    pub tv_gaussian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub report: Option<CumulantReport>,
    pub distribution: Option<DistributionSummary>,
    pub error: Option<String>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub varying: SweepParameter,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// `(value, κ_q)` for the rows that succeeded.
    pub fn series(&self, q: usize) -> (Vec<f64>, Vec<f64>) {
        self.rows
            .iter()
            .filter_map(|r| r.report.as_ref().and_then(|rep| rep.kappa(q)).map(|k| (r.value, k)))
            .unzip()
    }
}

/// Exact distribution and its distance to the Gaussian with the same κ₁, κ₂.
pub fn distribution_summary(table: &ProbabilityTable) -> Result<DistributionSummary> {
    let exact = distribution_exact(table)?;
    let rep = cumulants_from_probs(table, 2)?;
    let gauss = gaussian_surrogate(rep.kappa[0], rep.kappa[1], &exact.support)?;
    Ok(DistributionSummary {
        mean: exact.mean(),
        variance: exact.variance(),
        tv_gaussian: total_variation(&exact, &gauss)?,
    })
}

fn sweep_row(spec: &SweepSpec, value: f64) -> Result<(CumulantReport, Option<DistributionSummary>)> {
    let (system, protocol, cd) = spec.instantiate(value)?;
    let table = probability_table(&system, &protocol, &cd, spec.method, &spec.options)?;
    let report = cumulants_from_probs(&table, spec.q_max)?;
    let dist = if spec.with_distribution {
        Some(distribution_summary(&table)?)
    } else {
        None
    };
    Ok((report, dist))
}

/// Runs every sweep value in order; a failing row is recorded and the sweep
/// continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let rows: Vec<SweepRow> = spec
        .values
        .iter()
        .map(|&value| {
            let start = Instant::now();
            let out = sweep_row(spec, value);
            let wall_time = start.elapsed().as_secs_f64();
            match out {
                Ok((report, distribution)) => SweepRow {
                    value,
                    report: Some(report),
                    distribution,
                    error: None,
                    wall_time,
                },
                Err(e) => SweepRow {
                    value,
                    report: None,
                    distribution: None,
                    error: Some(e.to_string()),
                    wall_time,
                },
            }
        })
        .collect();
    if rows.iter().all(|r| r.report.is_none()) {
        let first = rows[0].error.clone().unwrap_or_default();
        return Err(Error::Analysis(format!("every sweep row failed; first error: {first}")));
    }
    Ok(SweepResult {
        varying: spec.varying,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    /// Half-open index range `[start, end)` of the fitted points.
    pub window: (usize, usize),
}

/// Least-squares fit of `y = A x^b` on `(log x, log y)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64], window: Option<(usize, usize)>) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return invalid("x and y differ in length");
    }
    let (start, end) = window.unwrap_or((0, xs.len()));
    if start >= end || end > xs.len() {
        return invalid(format!("fit window [{start}, {end}) out of range"));
    }
    if end - start < 3 {
        return invalid("a power-law fit needs at least three points");
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs[start..end]
        .iter()
        .zip(&ys[start..end])
        .map(|(&x, &y)| {
            if x > 0.0 && y > 0.0 {
                Ok((x.ln(), y.ln()))
            } else {
                invalid(format!("non-positive data point ({x}, {y})"))
            }
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let (slope, intercept, r2) = linear_fit(&lx, &ly)?;
    Ok(FitResult {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared: r2,
        window: (start, end),
    })
}

/// Ordinary least squares `y = a x + b`, returning `(a, b, r²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return invalid("linear fit needs at least two paired points");
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return invalid("degenerate abscissae");
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok((a, b, r2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakdownEstimate {
    pub t_star: f64,
    pub plateau: f64,
}

/// Median of κ over the three smallest `T`.
pub fn plateau_estimate(ts: &[f64], kappas: &[f64]) -> Result<f64> {
    if ts.len() != kappas.len() || ts.len() < 3 {
        return invalid("plateau estimate needs at least three points");
    }
    let mut idx: Vec<usize> = (0..ts.len()).collect();
    idx.sort_by(|&a, &b| ts[a].total_cmp(&ts[b]));
    let mut low: Vec<f64> = idx[..3].iter().map(|&i| kappas[i]).collect();
    low.sort_by(f64::total_cmp);
    Ok(low[1])
}

/// `T*` where κ₁(T) first falls to half its small-`T` plateau, by linear
/// interpolation in `log T`.
pub fn breakdown_scale(ts: &[f64], kappas: &[f64]) -> Result<BreakdownEstimate> {
    let plateau = plateau_estimate(ts, kappas)?;
    if ts.windows(2).any(|w| w[0] >= w[1]) || ts.iter().any(|t| !(*t > 0.0)) {
        return invalid("annealing times must be positive and increasing");
    }
    let half = 0.5 * plateau;
    for i in 1..ts.len() {
        if kappas[i] <= half && kappas[i - 1] > half {
            let (l0, l1) = (ts[i - 1].ln(), ts[i].ln());
            let f = (kappas[i - 1] - half) / (kappas[i - 1] - kappas[i]);
            return Ok(BreakdownEstimate {
                t_star: (l0 + f * (l1 - l0)).exp(),
                plateau,
            });
        }
    }
    Err(Error::Analysis(
        "sweep does not bracket the fall to half the plateau".into(),
    ))
}

/// `T*` extracted from a sweep over `T`.
pub fn breakdown_from_sweep(sweep: &SweepResult) -> Result<BreakdownEstimate> {
    if sweep.varying != SweepParameter::AnnealTime {
        return invalid("breakdown scale needs a sweep over T");
    }
    let (ts, ks) = sweep.series(1);
    breakdown_scale(&ts, &ks)
}

/// Piecewise-linear interpolation of increasing `xs`.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    if xs.is_empty() || x < xs[0] || x > *xs.last()? {
        return None;
    }
    let i = xs.partition_point(|&v| v < x);
    if i == 0 {
        return Some(ys[0]);
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    let f = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
    Some(ys[i - 1] + f * (ys[i] - ys[i - 1]))
}

pub const COLLAPSE_RANGE: (f64, f64) = (0.1, 10.0);
const COLLAPSE_POINTS: usize = 2000;

fn collapse_grid() -> Vec<f64> {
    let (a, b) = COLLAPSE_RANGE;
    (0..COLLAPSE_POINTS)
        .map(|i| a + (b - a) * i as f64 / (COLLAPSE_POINTS - 1) as f64)
        .collect()
}

fn resample(table: &ProbabilityTable) -> Result<Vec<f64>> {
    let n = table.meta.order as f64;
    if n == 0.0 {
        return invalid("collapse needs tables with n >= 1");
    }
    let xs: Vec<f64> = table.momenta.iter().map(|k| n * k).collect();
    collapse_grid()
        .iter()
        .map(|&x| {
            interpolate(&xs, &table.probs, x).ok_or_else(|| {
                Error::Analysis(format!("table with n = {n} does not cover x = {x}"))
            })
        })
        .collect()
}

/// Largest pairwise deviation of `p` against `x = n k` over `x ∈ [0.1, 10]`.
pub fn collapse_check(tables: &[ProbabilityTable]) -> Result<f64> {
    if tables.len() < 2 {
        return invalid("collapse check needs at least two tables");
    }
    let m0 = tables[0].meta;
    for t in &tables[1..] {
        let same_t = t.meta.anneal_time == m0.anneal_time
            || (t.meta.anneal_time.is_nan() && m0.anneal_time.is_nan());
        if t.meta.l != m0.l || !same_t || t.meta.model != m0.model {
            return invalid("collapse check needs tables at matching L, T and model");
        }
    }
    let curves = tables.iter().map(resample).collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            for (a, b) in curves[i].iter().zip(&curves[j]) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok(worst)
}

/// Largest deviation of a table from a reference scaling function `f(x)`.
pub fn collapse_deviation(table: &ProbabilityTable, f: impl Fn(f64) -> f64) -> Result<f64> {
    let curve = resample(table)?;
    Ok(collapse_grid()
        .iter()
        .zip(&curve)
        .map(|(&x, p)| (f(x) - p).abs())
        .fold(0.0, f64::max))
}
