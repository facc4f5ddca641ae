use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use sqwalk::emit::Format;
use sqwalk::experiments::{execute, parse_angle, ExperimentConfig, Mode};
use sqwalk::Ordering;

/// Staggered quantum-walk search on the two-dimensional torus.
#[derive(Parser, Debug)]
#[command(name = "sqwalk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First-maximum search run per n.
    Search(Common),
    /// Search runs over n with power-law fits of t_opt and 1/p_max against N.
    Scaling(Common),
    /// Search runs at one n over several angles.
    ThetaScan {
        #[command(flatten)]
        common: Common,
        /// Comma-separated angles; defaults to pi/8,pi/6,pi/4,pi/3,3pi/8.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta_list: Vec<String>,
    },
    /// Smallest eigenphases of U₀ and U against n from the projected blocks.
    EigenTrend(Common),
    /// Closed-form eigenbasis of the unmarked walk.
    Spectrum(Common),
    /// Asymptotic constants, sums and model predictions per n.
    Appendix(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Single lattice parameter (the torus has side 2n).
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated lattice parameters.
    #[arg(long, value_delimiter = ',')]
    n_list: Vec<usize>,
    /// Coin angle in radians, or a fraction such as pi/4 or 3pi/8.
    #[arg(long, default_value = "pi/4", allow_hyphen_values = true)]
    theta: String,
    /// Tessellation labels in application order.
    #[arg(long, default_value = "00,01,10,11")]
    ordering: String,
    /// Step cap per run; defaults to 10·sqrt(N ln N).
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fill wall_time_s with measured times (output is then not reproducible).
    #[arg(long)]
    record_time: bool,
}

fn default_ns(mode: Mode) -> Vec<usize> {
    match mode {
        Mode::Search | Mode::ThetaScan => vec![32],
        Mode::Scaling => vec![8, 16, 32, 64, 128],
        Mode::EigenTrend => vec![8, 16, 24, 32],
        Mode::Spectrum => vec![2],
        Mode::Appendix => vec![4, 8, 16, 32, 64, 128],
    }
}

fn build_config(mode: Mode, common: &Common) -> anyhow::Result<ExperimentConfig> {
    let n_values = match (common.n, common.n_list.is_empty()) {
        (Some(_), false) => bail!("give either --n or --n-list, not both"),
        (Some(n), true) => vec![n],
        (None, false) => common.n_list.clone(),
        (None, true) => default_ns(mode),
    };
    let mut config = ExperimentConfig::new(mode, n_values);
    config.theta = parse_angle(&common.theta)?;
    config.ordering = common.ordering.parse::<Ordering>()?;
    config.max_steps = common.max_steps;
    config.format = common.format.parse::<Format>()?;
    config.output = common.out.clone();
    config.record_time = common.record_time;
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match &cli.command {
        Command::Search(c) => build_config(Mode::Search, c)?,
        Command::Scaling(c) => build_config(Mode::Scaling, c)?,
        Command::ThetaScan { common, theta_list } => {
            let mut config = build_config(Mode::ThetaScan, common)?;
            if !theta_list.is_empty() {
                config.thetas = theta_list.iter().map(|t| parse_angle(t)).collect::<Result<_, _>>()?;
            }
            config
        }
        Command::EigenTrend(c) => build_config(Mode::EigenTrend, c)?,
        Command::Spectrum(c) => build_config(Mode::Spectrum, c)?,
        Command::Appendix(c) => build_config(Mode::Appendix, c)?,
    };
    let report = execute(&config)?;
    match &config.output {
        Some(path) => fs::write(path, &report.body).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(&report.body)?,
    }
    for note in &report.notes {
        eprintln!("{note}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
