use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod emit;

/// Exact and numerical computations on the (q,t)-deformed Fock space.
#[derive(Parser, Debug)]
#[command(name = "qtfock", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Opts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Entries {
    Gaussian,
    Rademacher,
}

/// Flags shared by every subcommand. Decimal parameters are kept as strings so exact mode
/// can read `0.5` as `1/2`.
#[derive(Args, Debug, Clone)]
pub struct Opts {
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, global = true)]
    pub t: Option<String>,
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    /// Size parameter (moment order, number of factors, polynomial count).
    #[arg(long = "n", global = true)]
    pub n: Option<usize>,
    /// One-particle dimension.
    #[arg(long, global = true, default_value_t = 2)]
    pub d: usize,
    /// Highest tensor level kept by a truncation.
    #[arg(long, global = true, default_value_t = 4)]
    pub level: usize,
    /// Matrix size for the Wigner process.
    #[arg(long = "N", global = true, default_value_t = 200)]
    pub size: usize,
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, global = true)]
    pub count: Option<usize>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Joint crossing/nesting polynomial Σ q^cross t^nest over pairings of [2n].
    Genpoly {
        #[arg(value_name = "N")]
        order: Option<usize>,
    },
    /// Σ q^inv t^coinv over permutations of [n].
    Permpoly {
        #[arg(value_name = "N")]
        order: Option<usize>,
    },
    /// Moments m_0..m_{2n} of the deformed Gaussian (symbolic unless --q/--t are given).
    Moments,
    /// Gram matrix of the truncated Fock space.
    Gram,
    /// Eigenvalue report per level and the two level-2 test vectors.
    Positivity,
    /// Operator norm of a(e_1): closed form, plus numerics when --numeric is set.
    Norm {
        #[arg(long)]
        numeric: bool,
    },
    /// Residuals of the adjointness and commutation relations.
    CheckRelations,
    /// (q,t)-Hermite polynomials H_0..H_n.
    Hermite {
        /// t-Chebyshev II instead (q = 0).
        #[arg(long)]
        chebyshev: bool,
    },
    /// Orthogonality of H_0..H_n under the moment functional.
    Orthocheck,
    /// Carlitz–Riordan t-Catalan polynomial C_n(t).
    Tcatalan {
        #[arg(value_name = "N")]
        order: Option<usize>,
    },
    /// Touchard–Riordan polynomial (crossings only).
    Touchard {
        #[arg(value_name = "N")]
        order: Option<usize>,
    },
    /// t-Airy function and its derivative at z.
    Airy {
        #[arg(allow_hyphen_values = true)]
        z: f64,
    },
    /// Zeros of A_t(z/t).
    Zeros,
    /// Atoms of the t-semicircular measure (adaptive when --count is absent).
    Measure,
    /// Cauchy transform on a grid of complex points "re,im;re,im;…" or a circle.
    Cauchy {
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Monte Carlo of the normalized trace of a ρ-correlated Wigner process.
    Wigner {
        #[arg(long, value_enum, default_value_t = Entries::Gaussian)]
        entries: Entries,
    },
    /// Four-point moments φ(s1 s2 s3 s4) and φ(s4 s1 s2 s3) on h1 = h2 = e1, h3 = h4 = e2.
    TraceGap,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let guards = qtfock::Guards::from_env();
    let result = match cli.command {
        Command::Genpoly { order } => commands::genpoly(&cli.opts, order, &guards),
        Command::Permpoly { order } => commands::permpoly(&cli.opts, order, &guards),
        Command::Moments => commands::moments(&cli.opts),
        Command::Gram => commands::gram(&cli.opts, &guards),
        Command::Positivity => commands::positivity(&cli.opts, &guards),
        Command::Norm { numeric } => commands::norm(&cli.opts, numeric, &guards),
        Command::CheckRelations => commands::check_relations(&cli.opts, &guards),
        Command::Hermite { chebyshev } => commands::hermite(&cli.opts, chebyshev),
        Command::Orthocheck => commands::orthocheck(&cli.opts),
        Command::Tcatalan { order } => commands::tcatalan(&cli.opts, order),
        Command::Touchard { order } => commands::touchard(&cli.opts, order),
        Command::Airy { z } => commands::airy(&cli.opts, z),
        Command::Zeros => commands::zeros(&cli.opts),
        Command::Measure => commands::measure(&cli.opts),
        Command::Cauchy { points, radius } => commands::cauchy(&cli.opts, points.as_deref(), radius),
        Command::Wigner { entries } => commands::wigner(&cli.opts, entries),
        Command::TraceGap => commands::trace_gap(&cli.opts),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &qtfock::Error) -> u8 {
    use qtfock::Error::*;
    match e {
        Resource { .. } | Domain(_) | Invalid(_) | Truncation { .. } => 2,
        RootSearch(_) | Internal(_) => 1,
    }
}
