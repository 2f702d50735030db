use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tsglab::geom::ModelParams;
use tsglab::oracle::OracleConfig;
use tsglab::perm::GroupName;
use tsglab_cli::{cmd_classify, cmd_oracle, cmd_realize, cmd_table, cmd_verify};

/// Complete graphs in S³ with tetrahedral, octahedral or icosahedral symmetry.
#[derive(Parser)]
#[command(name = "tsglab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether K_m admits the group, citing the rule that fails.
    Classify {
        #[arg(long)]
        group: GroupName,
        #[arg(long)]
        m: usize,
    },
    /// Print the profile table (A4, A5) or congruence chain (S4) as CSV.
    Table {
        #[arg(long)]
        group: GroupName,
    },
    /// Build, place and certify the vertex set; write a JSON certificate.
    Realize {
        #[arg(long)]
        group: GroupName,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "TSGLAB_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_6)]
        theta: f64,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        t: f64,
    },
    /// Re-check a certificate from the file alone.
    Verify { path: PathBuf },
    /// Compare brute-force residues with the rule-derived ones.
    Oracle {
        #[arg(long)]
        group: GroupName,
        /// Leave a rule out (fault injection); repeatable.
        #[arg(long = "drop-rule")]
        drop_rule: Vec<String>,
        #[arg(long)]
        max_m: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Classify { group, m } => cmd_classify(group, m),
        Command::Table { group } => cmd_table(group),
        Command::Realize {
            group,
            m,
            out,
            seed,
            theta,
            t,
        } => cmd_realize(group, m, &out, seed, ModelParams { theta, t }),
        Command::Verify { path } => cmd_verify(&path),
        Command::Oracle {
            group,
            drop_rule,
            max_m,
        } => cmd_oracle(
            group,
            &OracleConfig {
                dropped_rules: drop_rule,
                max_m,
                ..Default::default()
            },
        ),
    };
    if outcome.code != tsglab_cli::EXIT_USAGE {
        print!("{}", outcome.text);
    } else {
        eprint!("{}", outcome.text);
    }
    ExitCode::from(outcome.code as u8)
}
