//! `craft`: label generation, pseudo ground truth, detection and evaluation
//! over directories of score maps and annotations.

mod args;
mod commands;
mod error;
mod overlay;

use std::process::ExitCode;

use clap::Parser;
use craft_core::io::Config;

use args::{Cli, Command};
use commands::DetectOptions;
use error::{CliError, CliResult};

fn resolve_config(cli: &Cli) -> CliResult<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    cli.overrides.apply(&mut cfg);
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = resolve_config(&cli)?;
    if cli.dump_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(CliError::input("no subcommand given; see --help"));
    };
    match command {
        Command::Labelgen {
            annotations,
            out,
            link,
        } => commands::labelgen(&cfg, &annotations, &out, link),
        Command::PseudoGt {
            annotations,
            pred,
            out,
        } => commands::pseudo_gt(&cfg, &annotations, &pred, &out),
        Command::Detect {
            maps,
            out,
            mode,
            merge_lines,
            link,
            overlay,
        } => commands::detect_cmd(
            &cfg,
            &maps,
            &out,
            &DetectOptions {
                mode,
                merge_lines,
                link,
                overlay,
            },
        ),
        Command::Eval { gt, det, out } => commands::eval(&cfg, &gt, &det, out.as_deref()),
        Command::Synth {
            out,
            count,
            seed,
            arc,
        } => commands::synth(&cfg, &out, count, seed, arc),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
