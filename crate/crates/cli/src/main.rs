use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use coherence_cli::{
    run_measure, run_optimize, write_fig1a, write_fig1b, write_fig1c, write_fig2a, write_fig2b,
    write_report, CliError, Grid, OutputFormat, RunConfig,
};
use coherence_core::measures::LogBase;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LogBaseArg {
    Natural,
    Two,
}

impl From<LogBaseArg> for LogBase {
    fn from(v: LogBaseArg) -> LogBase {
        match v {
            LogBaseArg::Natural => LogBase::Natural,
            LogBaseArg::Two => LogBase::Two,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "coherence",
    version,
    about = "Coherence measures of bosonic states in truncated Fock spaces",
    long_about = "Emits figure data as CSV, and measure/optimizer reports as JSON or CSV.\n\
                  State specs follow `name:key=value[,key=value...]`, for example\n\
                  `pstd:nbar=1`, `coherent:alpha=1+0.5i` or `squeezed:r=0.8,phi=0.1`."
)]
struct Cli {
    /// Truncation tolerance: certified tail mass every state may discard
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,

    /// Base for every entropy-valued output
    #[arg(long, global = true, value_enum, default_value_t = LogBaseArg::Natural)]
    log_base: LogBaseArg,

    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format for measure/optimize (figures are always CSV)
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Mean-photon-number grid for figure commands, as start:stop:step
    #[arg(long, global = true, value_parser = Grid::parse)]
    grid: Option<Grid>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Photon-number distributions of the three reference states at one mean
    Fig1a {
        /// Mean photon number shared by the three states
        #[arg(long, default_value_t = 1.0)]
        nbar: f64,
    },
    /// Relative entropy of coherence of the three reference states over the grid
    Fig1b,
    /// det gamma of the three reference states over the grid
    Fig1c,
    /// Maximal coherence over the grid for mode counts 1..=d-max
    Fig2a {
        #[arg(long = "d-max", default_value_t = 5)]
        d_max: u32,
    },
    /// Two-mode comparison: maximal state, product coherent, TMSV, TMSV through the splitter
    Fig2b,
    /// Coherence measures of one state, e.g. `measure pstd:nbar=1`
    Measure {
        spec: String,
        /// Also report g2(0) (single-mode amplitude-level states only)
        #[arg(long)]
        g2: bool,
    },
    /// Constrained maximization, e.g. `optimize max_entropy:nbar=1,cutoff=200`
    Optimize { spec: String },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let is_figure = matches!(
        cli.cmd,
        Cmd::Fig1a { .. } | Cmd::Fig1b | Cmd::Fig1c | Cmd::Fig2a { .. } | Cmd::Fig2b
    );
    if is_figure && matches!(cli.format, Some(FormatArg::Json)) {
        return Err(CliError::Usage {
            pos: 0,
            msg: "figure commands emit CSV only".into(),
        });
    }
    let cfg = RunConfig {
        tol: cli.tol,
        log_base: cli.log_base.into(),
        grid: cli.grid.unwrap_or_default(),
        format: match cli.format {
            Some(FormatArg::Csv) => OutputFormat::Csv,
            _ => OutputFormat::Json,
        },
    };
    if !cfg.tol.is_finite() || cfg.tol <= 0.0 {
        return Err(CliError::Usage {
            pos: 0,
            msg: "tol must be > 0".into(),
        });
    }

    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };

    match cli.cmd {
        Cmd::Fig1a { nbar } => write_fig1a(&mut sink, &cfg, nbar)?,
        Cmd::Fig1b => write_fig1b(&mut sink, &cfg)?,
        Cmd::Fig1c => write_fig1c(&mut sink, &cfg)?,
        Cmd::Fig2a { d_max } => write_fig2a(&mut sink, &cfg, d_max)?,
        Cmd::Fig2b => write_fig2b(&mut sink, &cfg)?,
        Cmd::Measure { spec, g2 } => {
            let report = run_measure(&spec, &cfg, g2)?;
            write_report(&mut sink, &cfg, &report)?;
        }
        Cmd::Optimize { spec } => {
            let report = run_optimize(&spec)?;
            write_report(&mut sink, &cfg, &report)?;
        }
    }
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed stdout (e.g. piping into head) is not an error
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
