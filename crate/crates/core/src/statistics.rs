//! Kink-number statistics from per-mode excitation probabilities.
//!
//! Every excited mode pair contributes two kinks, so the kink number is twice
//! a Poisson-binomial variable and `log P̃(θ) = Σ_k log[1 + (e^{2iθ} - 1) p_k]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ProbabilityTable, TableMeta};
use crate::error::{invalid, Error, Result};

/// Highest cumulant order with a closed Bernoulli-pair form.
pub const MAX_ORDER: usize = 4;

/// Coefficients `a_j` of the `q`-th cumulant of `2 × Bernoulli(p)` written as
/// `Σ_j a_j p^j`, `j = 1..=4`.
pub fn pair_cumulant_coeffs(q: usize) -> Result<[f64; 4]> {
    match q {
        1 => Ok([2.0, 0.0, 0.0, 0.0]),
        2 => Ok([4.0, -4.0, 0.0, 0.0]),
        3 => Ok([8.0, -24.0, 16.0, 0.0]),
        4 => Ok([16.0, -112.0, 192.0, -96.0]),
        _ => invalid(format!("cumulant order q = {q} outside 1..=4")),
    }
}

/// `q`-th cumulant of a kink pair excited with probability `p`.
pub fn pair_cumulant(q: usize, p: f64) -> Result<f64> {
    let q1 = 1.0 - p;
    Ok(match q {
        1 => 2.0 * p,
        2 => 4.0 * p * q1,
        3 => 8.0 * p * q1 * (1.0 - 2.0 * p),
        4 => 16.0 * p * q1 * (1.0 - 6.0 * p + 6.0 * p * p),
        _ => return invalid(format!("cumulant order q = {q} outside 1..=4")),
    })
}

/// Cumulant generating function `Σ_k log[1 + (e^{2iθ} - 1) p_k]`.
///
/// A vanishing factor (a fair mode at `θ = π/2`) yields a real part of `-∞`.
pub fn cgf(table: &ProbabilityTable, theta: f64) -> Complex64 {
    let z = Complex64::new(0.0, 2.0 * theta).exp() - 1.0;
    table
        .probs
        .iter()
        .map(|&p| (1.0 + z * p).ln())
        .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantReport {
    /// Extensive cumulants `κ_1..κ_qmax` (kink counts).
    pub kappa: Vec<f64>,
    /// `κ_q / L`.
    pub densities: Vec<f64>,
    /// `κ_2/κ_1` and `κ_3/κ_1` where available.
    pub ratio_21: Option<f64>,
    pub ratio_31: Option<f64>,
    /// Kibble-Zurek density `(8π²T)^{-1/2}` for finite-rate runs without CD.
    pub n_ex: Option<f64>,
    pub meta: TableMeta,
}

impl CumulantReport {
    pub fn kappa(&self, q: usize) -> Option<f64> {
        q.checked_sub(1).and_then(|i| self.kappa.get(i).copied())
    }
}

/// Closed-form cumulants `κ_q = Σ_k c_q(p_k)` for `q <= q_max <= 4`.
pub fn cumulants_from_probs(table: &ProbabilityTable, q_max: usize) -> Result<CumulantReport> {
    if q_max == 0 || q_max > MAX_ORDER {
        return invalid(format!("q_max = {q_max} outside 1..={MAX_ORDER}"));
    }
    let mut kappa = Vec::with_capacity(q_max);
    for q in 1..=q_max {
        let mut acc = 0.0;
        for &p in &table.probs {
            acc += pair_cumulant(q, p)?;
        }
        kappa.push(acc);
    }
    let l = table.meta.l as f64;
    let densities = kappa.iter().map(|k| k / l).collect();
    let ratio = |q: usize| {
        (q <= q_max && kappa[0] != 0.0).then(|| kappa[q - 1] / kappa[0])
    };
    let meta = table.meta;
    let t = meta.anneal_time;
    let no_cd = meta.order == 0 && meta.form != crate::model::CdForm::Exact;
    let n_ex = (no_cd && t.is_finite() && t > 0.0).then(|| (8.0 * PI * PI * t).powf(-0.5));
    Ok(CumulantReport {
        ratio_21: ratio(2),
        ratio_31: ratio(3),
        kappa,
        densities,
        n_ex,
        meta,
    })
}

/// Cumulants from central finite differences of [`cgf`] at `θ = 0`.
pub fn cumulants_from_cgf(table: &ProbabilityTable, q_max: usize, step: f64) -> Result<Vec<f64>> {
    if q_max == 0 || q_max > MAX_ORDER {
        return invalid(format!("q_max = {q_max} outside 1..={MAX_ORDER}"));
    }
    let f = |m: f64| cgf(table, m * step);
    let (fm2, fm1, f0, fp1, fp2) = (f(-2.0), f(-1.0), f(0.0), f(1.0), f(2.0));
    let h = step;
    let derivs = [
        (fp1 - fm1) / (2.0 * h),
        (fp1 - f0 * 2.0 + fm1) / (h * h),
        (fp2 - fp1 * 2.0 + fm1 * 2.0 - fm2) / (2.0 * h * h * h),
        (fp2 - fp1 * 4.0 + f0 * 6.0 - fm1 * 4.0 + fm2) / (h * h * h * h),
    ];
    let minus_i = Complex64::new(0.0, -1.0);
    Ok((1..=q_max)
        .map(|q| (minus_i.powu(q as u32) * derivs[q - 1]).re)
        .collect())
}

/// Distribution of the kink number `N` over even values `0, 2, ..., 2M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinkDistribution {
    pub support: Vec<usize>,
    pub pmf: Vec<f64>,
    pub theta_grid: Vec<f64>,
}

impl KinkDistribution {
    pub fn total(&self) -> f64 {
        self.pmf.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.pmf)
            .map(|(&n, p)| n as f64 * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.support
            .iter()
            .zip(&self.pmf)
            .map(|(&n, p)| (n as f64 - mu).powi(2) * p)
            .sum()
    }
}

const NEGATIVE_SLACK: f64 = 1e-12;

fn clamp_and_normalise(mut pmf: Vec<f64>) -> Result<Vec<f64>> {
    for (i, p) in pmf.iter_mut().enumerate() {
        if p.is_nan() {
            return Err(Error::Numerical(format!("NaN in distribution at index {i}")));
        }
        if *p < 0.0 {
            if *p < -NEGATIVE_SLACK {
                return Err(Error::Numerical(format!(
                    "negative probability {p:e} at N = {}",
                    2 * i
                )));
            }
            *p = 0.0;
        }
    }
    let total: f64 = pmf.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("distribution has no mass".into()));
    }
    pmf.iter_mut().for_each(|p| *p /= total);
    Ok(pmf)
}

/// Exact Poisson-binomial kink distribution by a length-`M+1` discrete
/// Fourier transform of the characteristic function, with the mode product
/// accumulated as a sum of logarithms.
pub fn distribution_exact(table: &ProbabilityTable) -> Result<KinkDistribution> {
    let m = table.len();
    let size = m + 1;
    let theta_grid: Vec<f64> = (0..size).map(|j| PI * j as f64 / size as f64).collect();
    let chars: Vec<Complex64> = theta_grid
        .par_iter()
        .map(|&theta| {
            let z = Complex64::new(0.0, 2.0 * theta).exp() - 1.0;
            let log_sum = table
                .probs
                .iter()
                .map(|&p| (1.0 + z * p).ln())
                .fold(Complex64::new(0.0, 0.0), |a, b| a + b);
            let v = log_sum.exp();
            if v.re.is_nan() || v.im.is_nan() {
                Complex64::new(0.0, 0.0)
            } else {
                v
            }
        })
        .collect();
    let pmf: Vec<f64> = (0..size)
        .into_par_iter()
        .map(|pairs| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, c) in chars.iter().enumerate() {
                let idx = (j * pairs) % size;
                let phase = -2.0 * PI * idx as f64 / size as f64;
                acc += c * Complex64::new(0.0, phase).exp();
            }
            acc.re / size as f64
        })
        .collect();
    let pmf = clamp_and_normalise(pmf)?;
    Ok(KinkDistribution {
        support: (0..size).map(|i| 2 * i).collect(),
        pmf,
        theta_grid,
    })
}

/// Discrete normal weights `exp(-(N - κ₁)² / (2κ₂))` on `support`, normalised.
pub fn gaussian_surrogate(kappa1: f64, kappa2: f64, support: &[usize]) -> Result<KinkDistribution> {
    if !(kappa2 > 0.0) {
        return invalid(format!("Gaussian surrogate needs κ₂ > 0 (got {kappa2})"));
    }
    if support.is_empty() {
        return invalid("empty support");
    }
    let logs: Vec<f64> = support
        .iter()
        .map(|&n| -(n as f64 - kappa1).powi(2) / (2.0 * kappa2))
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(KinkDistribution {
        support: support.to_vec(),
        pmf: weights.iter().map(|w| w / total).collect(),
        theta_grid: Vec::new(),
    })
}

/// Total-variation distance `½ Σ |p - q|`.
pub fn total_variation(d1: &KinkDistribution, d2: &KinkDistribution) -> Result<f64> {
    if d1.support != d2.support {
        return invalid("distributions have different supports");
    }
    Ok(0.5
        * d1
            .pmf
            .iter()
            .zip(&d2.pmf)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ProbabilityTable;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn table(p: &[f64]) -> ProbabilityTable {
        ProbabilityTable::from_probs(p.to_vec()).unwrap()
    }

    /// Poisson-binomial pmf of the number of excited modes by direct convolution.
    fn convolution_oracle(p: &[f64]) -> Vec<f64> {
        let mut pmf = vec![1.0];
        for &pk in p {
            let mut next = vec![0.0; pmf.len() + 1];
            for (i, v) in pmf.iter().enumerate() {
                next[i] += v * (1.0 - pk);
                next[i + 1] += v * pk;
            }
            pmf = next;
        }
        pmf
    }

    #[test]
    fn cgf_examples() {
        let t = table(&[0.3, 0.8]);
        assert_eq!(cgf(&t, 0.0), Complex64::new(0.0, 0.0));
        let one = table(&[1.0]);
        let v = cgf(&one, 0.37);
        assert!((v - Complex64::new(0.0, 0.74)).norm() < 1e-15);
        let fair = table(&[0.5, 0.5]);
        let v = cgf(&fair, PI / 2.0);
        assert!(v.re < -30.0);
        let a = cgf(&t, 0.4);
        let b = cgf(&t, 0.4 + PI);
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn cumulant_examples() {
        let r = cumulants_from_probs(&table(&[0.5]), 3).unwrap();
        assert_eq!(r.kappa, vec![1.0, 1.0, 0.0]);
        let r = cumulants_from_probs(&table(&[0.0; 10]), 4).unwrap();
        assert!(r.kappa.iter().all(|&k| k == 0.0));
        assert!(r.ratio_21.is_none());
        assert!(cumulants_from_probs(&table(&[0.1]), 5).is_err());
    }

    #[test]
    fn sudden_no_cd_densities() {
        let l = 1600;
        let ks: Vec<f64> = (1..=l / 2).map(|j| (2 * j - 1) as f64 * PI / l as f64).collect();
        let ps: Vec<f64> = ks.iter().map(|k| (0.5 * k).cos().powi(2)).collect();
        let r = cumulants_from_probs(&table(&ps), 4).unwrap();
        assert_relative_eq!(r.kappa[0], 800.0, max_relative = 1e-12);
        assert_relative_eq!(r.kappa[1], 400.0, max_relative = 1e-12);
        assert!(r.kappa[2].abs() < 1e-8 * l as f64);
        assert_relative_eq!(r.kappa[3], -200.0, max_relative = 1e-9);
    }

    #[test]
    fn distribution_examples() {
        let d = distribution_exact(&table(&[0.5, 0.5])).unwrap();
        assert_eq!(d.support, vec![0, 2, 4]);
        for (a, b) in d.pmf.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-15);
        }
        let d = distribution_exact(&table(&[0.0; 7])).unwrap();
        assert!((d.pmf[0] - 1.0).abs() < 1e-15);
        assert!(d.pmf[1..].iter().all(|&p| p < 1e-15));
    }

    #[test]
    fn distribution_matches_convolution_oracle() {
        let ps: Vec<f64> = (0..300).map(|i| ((i as f64 * 0.37).sin().abs()).powi(3)).collect();
        let d = distribution_exact(&table(&ps)).unwrap();
        let oracle = convolution_oracle(&ps);
        for (a, b) in d.pmf.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_examples() {
        let support: Vec<usize> = (0..20).map(|i| 2 * i).collect();
        let g = gaussian_surrogate(0.0, 1e-9, &support).unwrap();
        assert_relative_eq!(g.pmf[0], 1.0);
        let g = gaussian_surrogate(10.0, 7.0, &support).unwrap();
        for x in [2, 4, 8] {
            let i = (10 + x) / 2;
            let j = (10 - x) / 2;
            assert_relative_eq!(g.pmf[i], g.pmf[j], max_relative = 1e-14);
        }
        assert!(gaussian_surrogate(1.0, 0.0, &support).is_err());
    }

    #[test]
    fn total_variation_examples() {
        let a = KinkDistribution {
            support: vec![0, 2],
            pmf: vec![0.5, 0.5],
            theta_grid: vec![],
        };
        let b = KinkDistribution {
            support: vec![0, 2],
            pmf: vec![1.0, 0.0],
            theta_grid: vec![],
        };
        let c = KinkDistribution {
            support: vec![0, 2],
            pmf: vec![0.0, 1.0],
            theta_grid: vec![],
        };
        assert_eq!(total_variation(&a, &a).unwrap(), 0.0);
        assert_eq!(total_variation(&b, &c).unwrap(), 1.0);
        assert_eq!(total_variation(&a, &b).unwrap(), 0.5);
        let d = KinkDistribution {
            support: vec![0, 2, 4],
            pmf: vec![1.0, 0.0, 0.0],
            theta_grid: vec![],
        };
        assert!(total_variation(&a, &d).is_err());
    }

    proptest! {
        #[test]
        fn cgf_differences_match_closed_forms(
            ps in proptest::collection::vec(0.0f64..1.0, 1..200)
        ) {
            let t = table(&ps);
            let exact = cumulants_from_probs(&t, 3).unwrap();
            let fd = cumulants_from_cgf(&t, 3, 1e-4).unwrap();
            for q in 0..2 {
                let e = exact.kappa[q];
                prop_assert!((fd[q] - e).abs() <= 1e-5 * e.abs().max(1.0), "q={} {} {}", q + 1, fd[q], e);
            }
            let scale = exact.kappa[0].max(1.0);
            prop_assert!((fd[2] - exact.kappa[2]).abs() <= 1e-3 * scale);
        }

        #[test]
        fn distribution_consistent_with_cumulants(
            ps in proptest::collection::vec(0.0f64..1.0, 1..300)
        ) {
            let t = table(&ps);
            let r = cumulants_from_probs(&t, 2).unwrap();
            let d = distribution_exact(&t).unwrap();
            prop_assert!((d.total() - 1.0).abs() < 1e-10);
            prop_assert!(d.support.iter().all(|n| n % 2 == 0));
            prop_assert!(d.pmf.iter().all(|&p| p >= 0.0));
            prop_assert!((d.mean() - r.kappa[0]).abs() <= 1e-8 * r.kappa[0].max(1.0));
            prop_assert!((d.variance() - r.kappa[1]).abs() <= 1e-8 * r.kappa[1].max(1.0));
        }

        #[test]
        fn cumulant_bounds(ps in proptest::collection::vec(0.0f64..1.0, 1..100)) {
            let r = cumulants_from_probs(&table(&ps), 4).unwrap();
            prop_assert!(r.kappa[0] >= 0.0 && r.kappa[1] >= 0.0);
            prop_assert!(r.kappa[1] <= 2.0 * r.kappa[0] + 1e-12);
        }

        #[test]
        fn pair_polynomials_agree(q in 1usize..=4, p in 0.0f64..1.0) {
            let c = pair_cumulant_coeffs(q).unwrap();
            let poly: f64 = c.iter().enumerate().map(|(j, a)| a * p.powi(j as i32 + 1)).sum();
            prop_assert!((poly - pair_cumulant(q, p).unwrap()).abs() < 1e-12);
        }
    }
}
