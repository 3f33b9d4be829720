use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optoacoustic::cli::{
    cmd_entangle, cmd_readout, cmd_sweep_k, cmd_sweep_temp, cmd_validate, CliError, CsvTable, OutputMeta, Overrides,
    RunConfig, EXIT_OK, EXIT_VALIDATION,
};

/// Gaussian-state simulation of Brillouin photon–phonon entanglement.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output CSV path (default: stdout). With several write couplings the
    /// value is inserted before the extension, e.g. `out_g30.csv`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Omit the timestamp so output is byte-identical across runs.
    #[arg(long, global = true)]
    reproducible: bool,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the config relative tolerance.
    #[arg(long, global = true)]
    rtol: Option<f64>,

    /// Overrides the config sample count per phase.
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// E_N(t) during the write pulse.
    Entangle,
    /// Peak E_N versus bath temperature.
    SweepTemp,
    /// Peak E_N versus wavenumber.
    SweepK,
    /// Full write / delay / readout protocol.
    Readout,
    /// Cross-path and Monte-Carlo checks.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Entangle => "entangle",
            Command::SweepTemp => "sweep-temp",
            Command::SweepK => "sweep-k",
            Command::Readout => "readout",
            Command::Validate => "validate",
        }
    }
}

fn out_path(base: &Path, label: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_g{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}_g{label}"),
    };
    base.with_file_name(name)
}

fn emit(tables: &[CsvTable], labels: &[String], out: Option<&Path>) -> Result<(), CliError> {
    for (t, label) in tables.iter().zip(labels) {
        let text = t.render();
        match out {
            None => print!("{text}"),
            Some(base) => {
                let path = if tables.len() == 1 { base.to_path_buf() } else { out_path(base, label) };
                std::fs::write(&path, text).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config {
        line: 0,
        key: "--config".into(),
        msg: "the --config PATH flag is required".into(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut cfg = RunConfig::parse(&text)?;
    Overrides {
        seed: cli.seed,
        rtol: cli.rtol,
        samples: cli.samples,
        reproducible: cli.reproducible,
    }
    .apply(&mut cfg)?;
    let meta = OutputMeta::new(cli.command.name(), cli.reproducible);
    let labels: Vec<String> = cfg.g_over_gamma.iter().map(|g| format!("{g}")).collect();
    let out = cli.out.as_deref();

    let tables = match cli.command {
        Command::Entangle => cmd_entangle(&cfg, &meta)?,
        Command::SweepTemp => cmd_sweep_temp(&cfg, &meta)?,
        Command::SweepK => cmd_sweep_k(&cfg, &meta)?,
        Command::Readout => cmd_readout(&cfg, &meta)?,
        Command::Validate => {
            let (table, pass) = cmd_validate(&cfg, &meta)?;
            emit(&[table], &labels[..1], out)?;
            return Ok(if pass { EXIT_OK } else { EXIT_VALIDATION });
        }
    };
    for t in &tables {
        for line in &t.summary {
            eprintln!("{line}");
        }
    }
    emit(&tables, &labels, out)?;
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
