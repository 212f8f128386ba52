use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use schur_primes::output::{emit_report, Format};
use schur_primes::pipeline::verify_lemmas;
use schur_primes::primes::{asymptotic_default_kappa, asymptotic_default_w};
use schur_primes::{run, ColoringSource, Mode, RunConfig, RunReport};

/// Monochromatic p1 + p2 = p3 + 1 in colored primes.
#[derive(Parser, Debug)]
#[command(name = "schur-primes", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List every monochromatic p1 + p2 = p3 + 1 with p3 <= n.
    Search(Common),
    /// Run the transference pipeline over the primes 1 mod W and lift its solutions.
    Pipeline(Common),
    /// Monochromatic p1, p1 + (p0 - 1), p1 + 2(p0 - 1) with p0 of the same color.
    Conjecture(Common),
    /// Pipeline lemma table plus the Bohr-set grid and transform identities.
    VerifyLemmas {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = 200_000)]
    n: u64,
    #[arg(long, default_value_t = 3)]
    w: u64,
    #[arg(long, default_value_t = 1)]
    k: u16,
    #[arg(long, default_value_t = 0.1)]
    kappa: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// `constant`, `random:<seed>`, `residue:<m>:<r>=<c>,...`, or a coloring file.
    #[arg(long, default_value = "constant")]
    coloring: ColoringSource,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Replace w and kappa by the asymptotic policies.
    #[arg(long)]
    asymptotic_defaults: bool,
    #[arg(long, default_value_t = 20)]
    max_witnesses: usize,
    /// Record wall-clock seconds per stage (breaks byte-identical output).
    #[arg(long)]
    timings: bool,
}

impl Common {
    fn config(&self, mode: Mode) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig {
            n: self.n,
            w: self.w,
            k: self.k,
            kappa: self.kappa,
            delta: self.delta,
            epsilon: self.epsilon,
            coloring: self.coloring.clone(),
            mode,
            max_witnesses: self.max_witnesses,
            record_timings: self.timings,
        };
        if self.asymptotic_defaults {
            cfg.w = asymptotic_default_w(self.n);
            cfg.kappa = asymptotic_default_kappa(self.k as u32)?;
            eprintln!(
                "warning: asymptotic defaults give w = {}, kappa = {:.3e}; at this n they are degenerate",
                cfg.w, cfg.kappa
            );
        }
        Ok(cfg)
    }

    fn write(&self, report: &RunReport) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => {
                let file =
                    File::create(path).with_context(|| format!("creating {}", path.display()))?;
                let mut out = BufWriter::new(file);
                emit_report(report, self.format, &mut out)?;
                out.flush()
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            None => emit_report(report, self.format, &mut io::stdout().lock())?,
        }
        Ok(())
    }
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    let (common, report) = match &cli.command {
        Command::Search(c) => (c, run(&c.config(Mode::Search)?)?),
        Command::Pipeline(c) => (c, run(&c.config(Mode::Pipeline)?)?),
        Command::Conjecture(c) => (c, run(&c.config(Mode::Conjecture)?)?),
        Command::VerifyLemmas { common, seed } => (
            common,
            verify_lemmas(&common.config(Mode::Pipeline)?, *seed)?,
        ),
    };
    common.write(&report)?;
    let found = match cli.command {
        Command::VerifyLemmas { .. } => true,
        _ => report.found(),
    };
    Ok(found)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("no witness at this n");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
