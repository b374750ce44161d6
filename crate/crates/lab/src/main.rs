use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gdnls_lab::config::{ConfigError, Experiment, ExperimentConfig, Key};
use gdnls_lab::runner::{self, batch_exit_code, output_stem, RunError, EXIT_OK, EXIT_VALIDATION};

#[derive(Parser)]
#[command(name = "gdnls", version, about = "gDNLS numerical experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file(s); every file is one run
    #[arg(long, global = true)]
    config: Vec<PathBuf>,

    /// Output directory
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,

    /// Worker threads; 1 gives byte-identical reruns
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Overrides the `seed` key
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Extra `key=value` settings applied after the config file
    #[arg(long = "set", global = true)]
    set: Vec<String>,

    /// `key=v1,v2,...`: one run per value
    #[arg(long, global = true)]
    vary: Option<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Run exactly one config, experiment taken from the file
    Run,
    /// Run any number of configs in parallel, in input order
    Sweep,
    SolitonAtlas,
    Evolve,
    ScatterProbe,
    GaugeCheck,
    IneqProbe,
    Theorem1Scan,
}

impl Command {
    fn experiment(self) -> Option<Experiment> {
        match self {
            Command::Run | Command::Sweep => None,
            Command::SolitonAtlas => Some(Experiment::SolitonAtlas),
            Command::Evolve => Some(Experiment::Evolve),
            Command::ScatterProbe => Some(Experiment::ScatterProbe),
            Command::GaugeCheck => Some(Experiment::GaugeCheck),
            Command::IneqProbe => Some(Experiment::IneqProbe),
            Command::Theorem1Scan => Some(Experiment::Theorem1Scan),
        }
    }
}

fn load(cli: &Cli) -> Result<Vec<ExperimentConfig>, String> {
    let fallback = cli.command.experiment();
    let mut base = Vec::new();
    for path in &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        base.push(
            ExperimentConfig::parse(&text, fallback)
                .map_err(|e| format!("{}: {e}", path.display()))?,
        );
    }
    if base.is_empty() {
        match fallback {
            Some(e) => base.push(ExperimentConfig::new(e)),
            None if matches!(cli.command, Command::Sweep) => {}
            None => return Err("`run` needs --config".into()),
        }
    }
    let adjust = |cfg: &mut ExperimentConfig| -> Result<(), ConfigError> {
        for pair in &cli.set {
            cfg.set_pair(pair)?;
        }
        if let Some(seed) = cli.seed {
            cfg.set_raw(Key::Seed, &seed.to_string())?;
        }
        Ok(())
    };
    let mut configs = Vec::new();
    for mut cfg in base {
        adjust(&mut cfg).map_err(|e| e.to_string())?;
        match &cli.vary {
            Some(spec) => configs.extend(runner::vary(&cfg, spec).map_err(|e| e.to_string())?),
            None => configs.push(cfg),
        }
    }
    if matches!(cli.command, Command::Run) && configs.len() != 1 {
        return Err(format!(
            "`run` takes exactly one config, got {}",
            configs.len()
        ));
    }
    Ok(configs)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let configs = match load(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    let results = runner::sweep(&configs, cli.workers);
    let indexed = configs.len() > 1;
    let mut statuses: Vec<Result<(), RunError>> = Vec::new();
    for (i, (cfg, result)) in configs.iter().zip(results).enumerate() {
        let stem = output_stem(cfg, &cli.out, indexed.then_some(i));
        let status = result.and_then(|record| {
            let files = record.write(&stem)?;
            let failed: Vec<&str> = record
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.as_str())
                .collect();
            println!(
                "{} {} ({:.2} s){}",
                cfg.experiment,
                files[0].display(),
                record.wall_time,
                if failed.is_empty() {
                    String::new()
                } else {
                    format!(" checks failed: {}", failed.join(", "))
                }
            );
            Ok(())
        });
        if let Err(e) = &status {
            eprintln!("{} [{}]: {e}", cfg.experiment, stem.display());
        }
        statuses.push(status);
    }
    let code = batch_exit_code(&statuses);
    log::info!("{} run(s), exit {code}", statuses.len());
    ExitCode::from(if statuses.is_empty() { EXIT_OK } else { code } as u8)
}
