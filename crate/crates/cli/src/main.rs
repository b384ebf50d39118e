use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use parseval_erasure::ErasureDistribution;
use parseval_erasure_cli::commands::{self, Document, FrameSource};
use parseval_erasure_cli::CliError;

/// Optimal Parseval frames for channels that erase coefficients at random.
#[derive(Parser)]
#[command(name = "parseval-erasure", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal norm profile and a Parseval frame realizing it.
    Design {
        #[command(flatten)]
        channels: Channels,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Exact worst weighted r-erasure error of a frame.
    Erasure {
        #[command(flatten)]
        channels: Channels,
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Expected single-erasure error of the three norm profiles.
    Compare {
        #[command(flatten)]
        channels: Channels,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Seeded Monte Carlo estimate of the reconstruction error.
    Simulate {
        #[command(flatten)]
        channels: Channels,
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        n: Option<usize>,
        /// Condition on exactly r erasures.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, env = parseval_erasure_cli::SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Second-order error of harmonic frames over a list of m, uniform p.
    Sweep {
        #[arg(long)]
        uniform_p: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Channels {
    /// Loss probabilities, comma separated, in channel order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    p: Option<Vec<f64>>,
    /// Shared loss probability; pair with --m.
    #[arg(long)]
    uniform_p: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
}

impl Channels {
    fn resolve(&self) -> Result<ErasureDistribution, CliError> {
        commands::distribution(self.p.as_deref(), self.uniform_p, self.m)
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// JSON frame file (a bare frame or a design document).
    #[arg(long)]
    frame: Option<PathBuf>,
    #[arg(long)]
    from_design: bool,
    #[arg(long)]
    harmonic: bool,
}

impl Source {
    fn get(&self) -> FrameSource<'_> {
        match &self.frame {
            Some(p) => FrameSource::File(p),
            None if self.from_design => FrameSource::FromDesign,
            None => FrameSource::Harmonic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

fn emit(doc: &impl Document, out: &Output) -> Result<(), CliError> {
    let text = match out.format {
        Format::Json => doc.json(),
        Format::Csv => doc.csv().to_string(),
    };
    let res = match &out.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write output: {e}")),
    };
    res.map_err(CliError::Io)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Design { channels, n, out } => {
            let doc = commands::design(&channels.resolve()?, n, out.tol)?;
            emit(&doc, &out)
        }
        Command::Erasure {
            channels,
            source,
            n,
            r,
            out,
        } => {
            let dist = channels.resolve()?;
            let frame = commands::load_frame(&source.get(), &dist, n)?;
            emit(&commands::erasure(&dist, &frame, r)?, &out)
        }
        Command::Compare { channels, n, out } => {
            emit(&commands::compare(&channels.resolve()?, n)?, &out)
        }
        Command::Simulate {
            channels,
            source,
            n,
            r,
            trials,
            seed,
            out,
        } => {
            let dist = channels.resolve()?;
            let frame = commands::load_frame(&source.get(), &dist, n)?;
            emit(&commands::simulate(&dist, &frame, trials, seed, r)?, &out)
        }
        Command::Sweep {
            uniform_p,
            n,
            m,
            out,
        } => emit(&commands::sweep(uniform_p, n, &m)?, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.kind() == clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let line: Vec<&str> = rendered
                .lines()
                .take_while(|l| !l.trim().is_empty() && !l.starts_with("Usage"))
                .map(str::trim)
                .collect();
            eprintln!(
                "parseval-erasure: {}",
                line.join(" ").trim_start_matches("error: ")
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("parseval-erasure: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
