use std::f64::consts::PI;

use cdkink::analytic::p_fast_universal;
use cdkink::dynamics::{probability_table, IntegratorOptions, Method, ProbabilityTable};
use cdkink::experiments::{fit_power_law, log_space, run_sweep, SweepParameter, SweepSpec};
use cdkink::model::{CdConfig, QuenchProtocol, SystemSpec};
use cdkink::statistics::{cumulants_from_cgf, cumulants_from_probs, distribution_exact};

fn table(system: &SystemSpec, g0: f64, t: f64, cd: CdConfig, method: Method) -> ProbabilityTable {
    let protocol = QuenchProtocol::new(g0, t).unwrap();
    probability_table(system, &protocol, &cd, method, &IntegratorOptions::default()).unwrap()
}

fn grid(l: usize) -> Vec<f64> {
    (1..=l / 2).map(|j| (2 * j - 1) as f64 * PI / l as f64).collect()
}

#[test]
fn sudden_quench_without_cd_gives_half_filling() {
    // Σ cos²(k/2) = Σ (1 + cos k)/2 = L/4 on the antiperiodic grid.
    let l = 64;
    let t = table(&SystemSpec::tfim(l).unwrap(), 1e4, 1e-8, CdConfig::none(), Method::Ode);
    let rep = cumulants_from_probs(&t, 2).unwrap();
    assert!((rep.kappa[0] - l as f64 / 2.0).abs() / (l as f64 / 2.0) < 1e-3);
    let k2: f64 = grid(l).iter().map(|k| 4.0 * (0.5 * k).cos().powi(2) * (0.5 * k).sin().powi(2)).sum();
    assert!((rep.kappa[1] - k2).abs() / k2 < 1e-3);
}

#[test]
fn slow_quench_matches_exact_landau_zener_sum() {
    let (l, t) = (256, 16.0);
    let tab = table(&SystemSpec::tfim(l).unwrap(), 100.0, t, CdConfig::none(), Method::Ode);
    let k1 = cumulants_from_probs(&tab, 1).unwrap().kappa[0];
    // Modes with k > π/2 never reach their avoided crossing at g = cos k.
    let oracle: f64 = grid(l)
        .iter()
        .filter(|&&k| k < 0.5 * PI)
        .map(|k| 2.0 * (-2.0 * PI * t * k.sin().powi(2)).exp())
        .sum();
    assert!((k1 - oracle).abs() / oracle < 0.01, "{k1} vs {oracle}");
}

#[test]
fn exact_cd_suppresses_all_kinks() {
    let tab = table(&SystemSpec::tfim(64).unwrap(), 100.0, 1.0, CdConfig::exact(), Method::Ode);
    assert!(cumulants_from_probs(&tab, 1).unwrap().kappa[0] < 1e-6);
}

#[test]
fn ode_sudden_limit_matches_closed_form_cumulants() {
    let system = SystemSpec::tfim(1024).unwrap();
    let ode = table(&system, 1e4, 1e-6, CdConfig::term_sum(4), Method::Ode);
    let fast = table(&system, 1e4, 1e-6, CdConfig::term_sum(4), Method::AnalyticFast);
    let (a, b) = (cumulants_from_probs(&ode, 3).unwrap(), cumulants_from_probs(&fast, 3).unwrap());
    for q in 0..3 {
        assert!((a.kappa[q] - b.kappa[q]).abs() < 1e-3 * b.kappa[0], "q={}: {} vs {}", q + 1, a.kappa[q], b.kappa[q]);
    }
}

#[test]
fn distribution_moments_match_cumulants() {
    let tab = table(&SystemSpec::tfim(128).unwrap(), 100.0, 0.5, CdConfig::term_sum(4), Method::Ode);
    let rep = cumulants_from_probs(&tab, 2).unwrap();
    let dist = distribution_exact(&tab).unwrap();
    assert!((dist.total() - 1.0).abs() < 1e-10);
    assert!((dist.mean() - rep.kappa[0]).abs() < 1e-8 * rep.kappa[0]);
    assert!((dist.variance() - rep.kappa[1]).abs() < 1e-6 * rep.kappa[1]);
    assert!(dist.support.iter().all(|n| n % 2 == 0));
}

#[test]
fn cgf_differences_reproduce_cumulants() {
    let tab = table(&SystemSpec::tfim(256).unwrap(), 100.0, 4.0, CdConfig::term_sum(2), Method::Ode);
    let direct = cumulants_from_probs(&tab, 3).unwrap().kappa;
    let fd = cumulants_from_cgf(&tab, 3, 1e-3).unwrap();
    for (a, b) in direct.iter().zip(&fd) {
        assert!((a - b).abs() < 1e-4 * direct[0].abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn kz_sweep_recovers_square_root_law() {
    let spec = SweepSpec {
        varying: SweepParameter::AnnealTime,
        values: log_space(16.0, 256.0, 5).unwrap(),
        system: SystemSpec::tfim(1600).unwrap(),
        protocol: QuenchProtocol::linear(1.0).unwrap(),
        cd: CdConfig::none(),
        method: Method::Lz,
        q_max: 1,
        options: IntegratorOptions::default(),
        with_distribution: false,
    };
    let res = run_sweep(&spec).unwrap();
    let (ts, ks) = res.series(1);
    let fit = fit_power_law(&ts, &ks, None).unwrap();
    assert!((fit.exponent + 0.5).abs() < 0.01, "{}", fit.exponent);
    let expected = 1600.0 / (8.0 * PI * PI).sqrt();
    assert!((fit.prefactor - expected).abs() / expected < 0.02);
}

#[test]
fn short_range_kitaev_reduces_to_ising() {
    let l = 256;
    let lr = SystemSpec::lrkm(l, 50.0, 50.0).unwrap();
    let tab = table(&lr, 100.0, 1e-6, CdConfig::term_sum(6), Method::AnalyticUniversal);
    for (k, p) in tab.momenta.iter().zip(&tab.probs) {
        assert!((p - p_fast_universal(6, *k)).abs() < 1e-6, "k={k}");
    }
}

#[test]
fn order_sweep_isolates_bad_rows() {
    let spec = SweepSpec {
        varying: SweepParameter::Order,
        values: vec![2.0, 4.0, 100.0],
        system: SystemSpec::tfim(64).unwrap(),
        protocol: QuenchProtocol::linear(1e-6).unwrap(),
        cd: CdConfig::none(),
        method: Method::AnalyticFast,
        q_max: 2,
        options: IntegratorOptions::default(),
        with_distribution: true,
    };
    let res = run_sweep(&spec).unwrap();
    assert!(res.rows[0].report.is_some() && res.rows[1].report.is_some());
    assert!(res.rows[2].error.is_some());
    let (_, k) = res.series(1);
    assert!(k[1] < k[0]);
    let d = res.rows[0].distribution.as_ref().unwrap();
    assert!(d.tv_gaussian >= 0.0 && d.tv_gaussian <= 1.0);
}
