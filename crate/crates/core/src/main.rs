use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gauss2_core::report::{run, Command, FamilySource, RunConfig};
use gauss2_core::Error;

#[derive(Parser, Debug)]
#[command(name = "gauss2", version)]
#[command(about = "Verify the rank of the second Gaussian map of general binary curves over GF(p)")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Rank chain r0 -> r1 -> r2 and verdicts for each genus
    Verify(CommonArgs),
    /// The induction base-case minors N (g = 7, mod 5) and N' (g = 10, mod 23)
    Minors {
        #[command(flatten)]
        common: CommonArgs,
        /// Compute both minors at this prime instead (informational)
        #[arg(long)]
        prime_override: Option<u64>,
    },
    /// Identity and sampled property checks
    Properties(CommonArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Genus range as MIN..MAX (overrides --g-min/--g-max)
    #[arg(long = "g")]
    g_range: Option<String>,
    #[arg(long, default_value_t = 4)]
    g_min: usize,
    #[arg(long, default_value_t = 18)]
    g_max: usize,
    #[arg(long, default_value_t = 109)]
    prime: u64,
    /// reference | random:<seed> | file:<path>
    #[arg(long, default_value = "reference")]
    family: String,
    /// Kernel samples per genus for the sampled checks
    #[arg(long, default_value_t = 5)]
    trials: usize,
    /// Seed for kernel sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Do not fail when the reference family loses rank at a prime other than 109
    #[arg(long)]
    allow_prime_drop: bool,
}

fn parse_range(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Parse(format!("genus range {s:?}: expected MIN..MAX"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn build_config(command: Command, args: &CommonArgs, prime_override: Option<u64>) -> Result<RunConfig, Error> {
    let (g_min, g_max) = match &args.g_range {
        Some(r) => parse_range(r)?,
        None => (args.g_min, args.g_max),
    };
    Ok(RunConfig {
        command,
        g_min,
        g_max,
        prime: args.prime,
        family: args.family.parse::<FamilySource>()?,
        trials: args.trials,
        seed: args.seed,
        output_path: args.out.clone(),
        prime_override,
        allow_prime_drop: args.allow_prime_drop,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args, prime_override) = match &cli.command {
        Cmd::Verify(a) => (Command::Verify, a, None),
        Cmd::Minors { common, prime_override } => (Command::Minors, common, *prime_override),
        Cmd::Properties(a) => (Command::Properties, a, None),
    };

    let report = match build_config(command, args, prime_override).and_then(|cfg| run(&cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let rendered = match args.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
            print!("{}", report.to_text());
        }
        None => print!("{rendered}"),
    }

    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
