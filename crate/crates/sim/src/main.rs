use clap::{Parser, Subcommand};
use mdpam_sim::config::{Result, SimConfig};
use mdpam_sim::plot::emit_plot_script;
use mdpam_sim::run::{format_record, run_sweep};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "mdpam-sim", version, about = "Monte-Carlo BER sweeps for coded PAM over ISI channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a BER sweep and write a whitespace-separated data file plus a
    /// gnuplot script next to it.
    Simulate {
        /// Flat key = value config file; defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Eb/N0 grid override: `a:b:step` or a space-separated list.
        #[arg(long)]
        ebn0: Option<String>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Output data file.
        #[arg(long, default_value = "sweep.data")]
        out: PathBuf,
        /// Receiver list override, comma separated
        /// (matched | matched-rsse:S | dfse-va:S | bcjr-va).
        #[arg(long)]
        receivers: Option<String>,
        /// Disable the noise (calibration runs).
        #[arg(long)]
        noiseless: bool,
    },
    /// Run the built-in oracle-equivalence and state-count suites.
    Selftest,
}

fn simulate(
    config: Option<PathBuf>,
    ebn0: Option<String>,
    seed: Option<u64>,
    out: PathBuf,
    receivers: Option<String>,
    noiseless: bool,
) -> Result<()> {
    let mut cfg = match config {
        Some(path) => SimConfig::load(&path)?,
        None => SimConfig::default(),
    };
    if let Some(spec) = ebn0 {
        cfg.set("ebn0_db", &spec)?;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(list) = receivers {
        cfg.set("receivers", &list.replace(',', " "))?;
    }
    if noiseless {
        cfg.noiseless = true;
    }

    let output = run_sweep(&cfg)?;
    for record in &output.records {
        println!("{}", format_record(record));
    }
    std::fs::write(&out, &output.data)?;
    println!("wrote {}", out.display());

    let script = emit_plot_script(&out)?;
    let gp = out.with_extension("gp");
    std::fs::write(&gp, script)?;
    println!("wrote {}", gp.display());
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate { config, ebn0, seed, out, receivers, noiseless } => {
            simulate(config, ebn0, seed, out, receivers, noiseless)
        }
        Command::Selftest => {
            if mdpam_sim::selftest::run_selftest() {
                println!("selftest: all checks passed");
                Ok(())
            } else {
                eprintln!("selftest: FAILED");
                std::process::exit(1);
            }
        }
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}
