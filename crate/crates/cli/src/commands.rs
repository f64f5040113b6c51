use cdkink::analytic::{fast_cumulant_plateau, kz_cumulant, scales};
use cdkink::dynamics::{probability_table, ProbabilityTable};
use cdkink::experiments::{
    fit_power_law, run_single, run_sweep, validate_suite, SweepParameter, SweepSpec,
    ValidationReport,
};
use cdkink::kitaev::{couplings, dynamical_exponent, LrkmSpec};
use cdkink::model::{ModelKind, SystemSpec};
use cdkink::statistics::{cumulants_from_probs, distribution_exact, gaussian_surrogate};

use crate::config::{ModelChoice, RunConfig, SweepConfig, ValidateConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

fn base_meta(table: Table, cfg: &RunConfig, system: &SystemSpec) -> Table {
    let mut t = table
        .with_meta("model", system.model.name())
        .with_meta("L", cfg.l)
        .with_meta("T", cfg.anneal_time)
        .with_meta("g0", cfg.g0)
        .with_meta("n", cfg.cd_order)
        .with_meta("cd_form", cfg.cd_form.name())
        .with_meta("method", cfg.method.name());
    if let ModelKind::Lrkm { alpha, beta } = system.model {
        t = t.with_meta("alpha", alpha).with_meta("beta", beta);
    }
    t
}

fn compute_table(cfg: &RunConfig) -> Result<(SystemSpec, ProbabilityTable), CliError> {
    let system = cfg.system()?;
    let table = probability_table(
        &system,
        &cfg.protocol()?,
        &cfg.cd(),
        cfg.method,
        &cfg.integrator(),
    )?;
    Ok((system, table))
}

/// Per-mode excitation probabilities.
pub fn probs(cfg: &RunConfig) -> Result<Table, CliError> {
    let (system, table) = compute_table(cfg)?;
    let mut out = Table::new(&["k", "p", "method", "L", "T", "n", "model"]);
    for (&k, &p) in table.momenta.iter().zip(&table.probs) {
        out.push(vec![
            k.into(),
            p.into(),
            cfg.method.name().into(),
            cfg.l.into(),
            cfg.anneal_time.into(),
            cfg.cd_order.into(),
            system.model.name().into(),
        ]);
    }
    Ok(base_meta(out, cfg, &system).with_meta("command", "probs"))
}

/// Kink-number cumulants `κ_1..κ_qmax`.
pub fn cumulants(cfg: &RunConfig) -> Result<Table, CliError> {
    let (system, table) = compute_table(cfg)?;
    let report = cumulants_from_probs(&table, cfg.q_max)?;
    let k1 = report.kappa[0];
    let mut out = Table::new(&["q", "kappa", "density", "ratio_to_k1"]);
    for (i, (&k, &d)) in report.kappa.iter().zip(&report.densities).enumerate() {
        let ratio = (k1 != 0.0).then(|| k / k1);
        out.push(vec![(i + 1).into(), k.into(), d.into(), ratio.into()]);
    }
    Ok(base_meta(out, cfg, &system)
        .with_meta("command", "cumulants")
        .with_meta("n_ex", report.n_ex))
}

/// Exact kink-number distribution beside its Gaussian surrogate.
pub fn dist(cfg: &RunConfig) -> Result<Table, CliError> {
    let (system, table) = compute_table(cfg)?;
    let exact = distribution_exact(&table)?;
    let report = cumulants_from_probs(&table, 2)?;
    let gauss = gaussian_surrogate(report.kappa[0], report.kappa[1], &exact.support)?;
    let tv = cdkink::statistics::total_variation(&exact, &gauss)?;
    let mut out = Table::new(&["N", "p_exact", "p_gauss"]);
    for ((&n, &pe), &pg) in exact.support.iter().zip(&exact.pmf).zip(&gauss.pmf) {
        out.push(vec![n.into(), pe.into(), pg.into()]);
    }
    Ok(base_meta(out, cfg, &system)
        .with_meta("command", "dist")
        .with_meta("mean", exact.mean())
        .with_meta("variance", exact.variance())
        .with_meta("total", exact.total())
        .with_meta("tv_gaussian", tv))
}

/// One row per sweep value with every requested cumulant.
pub fn sweep(cfg: &RunConfig, sw: &SweepConfig) -> Result<Table, CliError> {
    let system = cfg.system()?;
    let spec = SweepSpec {
        varying: sw.parameter,
        values: sw.values.clone(),
        system,
        protocol: cfg.protocol()?,
        cd: cfg.cd(),
        method: cfg.method,
        q_max: cfg.q_max,
        options: cfg.integrator(),
        with_distribution: sw.distribution,
    };
    spec.validate()?;
    for &v in &spec.values {
        spec.instantiate(v)?;
    }
    let result = run_sweep(&spec)?;

    let q_max = cfg.q_max;
    let mut columns = vec![sw.parameter.name().to_string()];
    columns.extend((1..=q_max).map(|q| format!("kappa_{q}")));
    columns.extend((1..=q_max).map(|q| format!("density_{q}")));
    columns.extend(["ratio_21".to_string(), "ratio_31".to_string()]);
    if sw.distribution {
        columns.extend(["mean", "variance", "tv_gaussian"].map(String::from));
    }
    columns.push("error".into());

    let mut out = Table::new(&columns);
    for row in &result.rows {
        let mut cells: Vec<Cell> = vec![row.value.into()];
        match &row.report {
            Some(rep) => {
                cells.extend(rep.kappa.iter().map(|&k| Cell::from(k)));
                cells.extend(rep.densities.iter().map(|&k| Cell::from(k)));
                cells.push(rep.ratio_21.into());
                cells.push(rep.ratio_31.into());
            }
            None => cells.extend((0..2 * q_max + 2).map(|_| Cell::Empty)),
        }
        if sw.distribution {
            match &row.distribution {
                Some(d) => cells.extend([d.mean.into(), d.variance.into(), d.tv_gaussian.into()]),
                None => cells.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
            }
        }
        cells.push(row.error.clone().into());
        out.push(cells);
    }

    let mut out = base_meta(out, cfg, &system)
        .with_meta("command", "sweep")
        .with_meta("varying", sw.parameter.name());
    if matches!(sw.parameter, SweepParameter::AnnealTime | SweepParameter::Order) {
        let (xs, ys) = result.series(1);
        if let Ok(fit) = fit_power_law(&xs, &ys, None) {
            out = out
                .with_meta("fit_exponent", fit.exponent)
                .with_meta("fit_prefactor", fit.prefactor)
                .with_meta("fit_r_squared", fit.r_squared);
        }
    }
    Ok(out)
}

/// Long-range Kitaev couplings and excitation probabilities on the grid.
pub fn kitaev(cfg: &RunConfig) -> Result<Table, CliError> {
    let mut cfg = cfg.clone();
    cfg.model = ModelChoice::Lrkm;
    let spec = LrkmSpec::new(cfg.l, cfg.alpha, cfg.beta)?;
    let coup = couplings(&spec)?;
    let (system, table) = compute_table(&cfg)?;
    let mut out = Table::new(&["k", "j_alpha", "d_beta", "p"]);
    for i in 0..table.len() {
        out.push(vec![
            table.momenta[i].into(),
            coup.j_alpha[i].into(),
            coup.d_beta[i].into(),
            table.probs[i].into(),
        ]);
    }
    Ok(base_meta(out, &cfg, &system)
        .with_meta("command", "kitaev")
        .with_meta("z", dynamical_exponent(cfg.alpha, cfg.beta))
        .with_meta("N_alpha", coup.n_alpha)
        .with_meta("N_beta", coup.n_beta))
}

/// Characteristic scales for the configured order, size and annealing time.
pub fn scales_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let system = cfg.system()?;
    let z = system.universality.z;
    let s = scales(cfg.cd_order, cfg.l, z)?;
    let (n, l) = (cfg.cd_order as f64, cfg.l as f64);
    let mut out = Table::new(&["quantity", "value"]);
    let rows: [(&str, f64); 7] = [
        ("k_n", s.k_n),
        ("T_fast", s.t_fast_cd),
        ("n_ad", s.n_ad),
        ("z", z),
        ("n_ex", s.n_ex(cfg.anneal_time)),
        ("kappa1_plateau", fast_cumulant_plateau(1, n, l)?),
        ("kappa1_kz", kz_cumulant(1, cfg.anneal_time, l)?),
    ];
    for (name, value) in rows {
        out.push(vec![name.into(), value.into()]);
    }
    Ok(base_meta(out, cfg, &system).with_meta("command", "scales"))
}

/// Runs the validation suite (or the listed criteria) and tabulates it.
pub fn validate(vc: &ValidateConfig) -> Result<(ValidationReport, Table), CliError> {
    let report = if vc.criteria.is_empty() {
        validate_suite(vc.level)?
    } else {
        ValidationReport {
            level: vc.level,
            criteria: vc
                .criteria
                .iter()
                .map(|id| run_single(id))
                .collect::<cdkink::Result<Vec<_>>>()?,
        }
    };
    let mut out = Table::new(&["id", "passed", "description", "measured", "tolerance"]);
    for c in &report.criteria {
        out.push(vec![
            c.id.as_str().into(),
            c.passed.into(),
            c.description.as_str().into(),
            c.measured.as_str().into(),
            c.tolerance.as_str().into(),
        ]);
    }
    let failed = report.failures().count();
    let out = out
        .with_meta("command", "validate")
        .with_meta("criteria", report.criteria.len())
        .with_meta("failed", failed);
    Ok((report, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Settings;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::resolve(&Settings::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn scales_example() {
        let t = scales_table(&cfg("L = 1600\ncd-order = 16")).unwrap();
        let value = |name: &str| match t.rows.iter().find(|r| r[0] == Cell::from(name)).unwrap()[1] {
            Cell::Real(x) => x,
            _ => unreachable!(),
        };
        assert!((value("n_ad") - 267.4).abs() < 0.05);
        assert_eq!(value("T_fast"), 256.0);
        assert!((value("k_n") - 0.0656).abs() < 1e-4);
    }

    #[test]
    fn probs_lz_small_ring() {
        let t = probs(&cfg("L = 4\nmethod = lz\nT = 1")).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.columns, ["k", "p", "method", "L", "T", "n", "model"]);
    }

    #[test]
    fn cumulant_ratio_column() {
        let t = cumulants(&cfg("L = 64\nmethod = fast\nT = 1e-6\ncd-order = 2")).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.rows[0][3], Cell::Real(1.0));
    }

    #[test]
    fn dist_normalized() {
        let t = dist(&cfg("L = 128\nmethod = fast\ncd-order = 4")).unwrap();
        let total = t.meta.iter().find(|(k, _)| k == "total").unwrap();
        let Cell::Real(total) = total.1 else { unreachable!() };
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kitaev_forces_long_range_model() {
        let t = kitaev(&cfg("L = 32\nmethod = universal\ncd-order = 2")).unwrap();
        assert_eq!(t.rows.len(), 16);
        assert!(t.meta.iter().any(|(k, v)| k == "model" && *v == Cell::from("LRKM")));
    }
}
