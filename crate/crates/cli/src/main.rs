//! `cdkink`: kink statistics under counterdiabatic driving, as data tables.

mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RunConfig, Settings, SweepConfig, ValidateConfig};
use error::CliError;
use output::Table;

#[derive(Debug, Parser)]
#[command(name = "cdkink", version, about = "Kink statistics of driven free-fermion chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-mode excitation probabilities (k,p,method,L,T,n,model).
    Probs(CommonArgs),
    /// Kink-number cumulants (q,kappa,density,ratio_to_k1).
    Cumulants(CommonArgs),
    /// Exact kink-number distribution and Gaussian surrogate (N,p_exact,p_gauss).
    Dist(CommonArgs),
    /// Cumulants over a range of one parameter.
    Sweep(SweepArgs),
    /// Long-range Kitaev couplings and probabilities.
    Kitaev(CommonArgs),
    /// Characteristic scales: cutoff momentum, fast-quench time, adiabatic order.
    Scales(CommonArgs),
    /// Run the validation suite; exits with 3 if any criterion fails.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// Number of sites (even, >= 4).
    #[arg(long = "L")]
    l: Option<usize>,
    /// Annealing time per unit field change.
    #[arg(long = "T")]
    anneal_time: Option<f64>,
    /// Initial transverse field.
    #[arg(long)]
    g0: Option<f64>,
    /// Krylov order n of the CD field (0 = no CD).
    #[arg(long)]
    cd_order: Option<usize>,
    /// termsum, closed or exact.
    #[arg(long)]
    cd_form: Option<String>,
    /// tfim or lrkm.
    #[arg(long)]
    model: Option<String>,
    /// LRKM hopping exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// LRKM pairing exponent.
    #[arg(long)]
    beta: Option<f64>,
    /// ode, fast, universal or lz.
    #[arg(long)]
    method: Option<String>,
    /// Highest cumulant order (1..=4).
    #[arg(long)]
    qmax: Option<usize>,
    /// Output file (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// key = value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for the per-mode parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    dump_config: bool,
}

impl CommonArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let base = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        flags.set_opt("L", self.l);
        flags.set_opt("T", self.anneal_time);
        flags.set_opt("g0", self.g0);
        flags.set_opt("cd-order", self.cd_order);
        flags.set_opt("cd-form", self.cd_form.as_ref());
        flags.set_opt("model", self.model.as_ref());
        flags.set_opt("alpha", self.alpha);
        flags.set_opt("beta", self.beta);
        flags.set_opt("method", self.method.as_ref());
        flags.set_opt("qmax", self.qmax);
        flags.set_opt("out", self.out.as_ref().map(|p| p.display()));
        flags.set_opt("format", self.format.as_ref());
        flags.set_opt("threads", self.threads);
        Ok(base.overlay(flags))
    }
}

#[derive(Debug, Clone, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Parameter to vary: T, n, L, alpha or beta.
    #[arg(long)]
    param: Option<String>,
    /// Comma-separated, strictly increasing values.
    #[arg(long)]
    values: Option<String>,
    /// Log-spaced values as start:stop:count.
    #[arg(long)]
    range: Option<String>,
    /// Also compute the exact distribution and its Gaussian distance.
    #[arg(long)]
    distribution: bool,
}

#[derive(Debug, Clone, Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// quick or full.
    #[arg(long)]
    level: Option<String>,
    /// Run only these criteria (comma-separated ids, e.g. A1,P1.norm).
    #[arg(long)]
    criteria: Option<String>,
}

fn emit(cfg: &RunConfig, table: &Table) -> Result<(), CliError> {
    let text = table.render(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn install_threads(cfg: &RunConfig) -> Result<(), CliError> {
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("cannot start {n} worker threads: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Probs(c)
        | Command::Cumulants(c)
        | Command::Dist(c)
        | Command::Kitaev(c)
        | Command::Scales(c) => c,
        Command::Sweep(s) => &s.common,
        Command::Validate(v) => &v.common,
    };
    let mut settings = common.settings()?;
    match &cli.command {
        Command::Sweep(s) => {
            let mut extra = Settings::default();
            extra.set_opt("sweep", s.param.as_ref());
            extra.set_opt("values", s.values.as_ref());
            extra.set_opt("range", s.range.as_ref());
            if s.distribution {
                extra.set("distribution", true);
            }
            settings = settings.overlay(extra);
        }
        Command::Validate(v) => {
            let mut extra = Settings::default();
            extra.set_opt("level", v.level.as_ref());
            extra.set_opt("criteria", v.criteria.as_ref());
            settings = settings.overlay(extra);
        }
        _ => {}
    }

    let cfg = RunConfig::resolve(&settings)?;
    let sweep_cfg = match cli.command {
        Command::Sweep(_) => Some(SweepConfig::resolve(&settings)?),
        _ => None,
    };
    let validate_cfg = match cli.command {
        Command::Validate(_) => Some(ValidateConfig::resolve(&settings)?),
        _ => None,
    };

    if common.dump_config {
        let mut dump = cfg.dump();
        if let Some(s) = &sweep_cfg {
            dump.push_str(&s.dump());
        }
        if let Some(v) = &validate_cfg {
            dump.push_str(&v.dump());
        }
        print!("{dump}");
        return Ok(());
    }

    install_threads(&cfg)?;
    let table = match &cli.command {
        Command::Probs(_) => commands::probs(&cfg)?,
        Command::Cumulants(_) => commands::cumulants(&cfg)?,
        Command::Dist(_) => commands::dist(&cfg)?,
        Command::Kitaev(_) => commands::kitaev(&cfg)?,
        Command::Scales(_) => commands::scales_table(&cfg)?,
        Command::Sweep(_) => commands::sweep(&cfg, sweep_cfg.as_ref().expect("resolved above"))?,
        Command::Validate(_) => {
            let (report, table) =
                commands::validate(validate_cfg.as_ref().expect("resolved above"))?;
            for c in &report.criteria {
                println!("{c}");
            }
            if cfg.out.is_some() {
                emit(&cfg, &table)?;
            } else {
                let passed = report.criteria.len() - report.failures().count();
                println!("{passed}/{} criteria passed", report.criteria.len());
            }
            let failed = report.failures().count();
            return if failed == 0 {
                Ok(())
            } else {
                Err(CliError::Acceptance { failed })
            };
        }
    };
    emit(&cfg, &table)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
