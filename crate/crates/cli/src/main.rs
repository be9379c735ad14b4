use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crisscross::analysis::census;
use crisscross::code::{redundancy_bounds, sample_codeword_variant, Variant};
use crisscross::limits::{DEFAULT_BALL_BOUND_SAMPLES, DEFAULT_SAMPLED_PAIRS};
use crisscross::verify::{self, VerificationResult};
use crisscross::{decode, format_grid, parse_grid, BitGrid, CodeParams, Error};

/// Criss-cross deletion correcting codes for n x n binary arrays.
#[derive(Parser)]
#[command(name = "crisscross", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random codeword and write it with its parameters.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        params_out: PathBuf,
        /// Use the repaired code, which decodes every deletion uniquely.
        #[arg(long)]
        repaired: bool,
    },
    /// Delete one row and one column (1-based).
    Corrupt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        row: usize,
        #[arg(long)]
        col: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover a codeword from a received array.
    Decode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification and print one JSON line per result.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Count n x n arrays whose deletion ball has at least n^2/2 elements.
    Census {
        #[arg(long)]
        n: usize,
    },
    /// Print the redundancy bounds for n.
    Bounds {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct Sampling {
    /// Number of random samples; omit for exhaustive enumeration.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Deletion balls meet iff insertion balls meet.
    Equivalence {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// The same with t rows and t columns, on sampled pairs.
    TEquivalence {
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLED_PAIRS)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run-structure test for colliding deletions against brute force.
    LemmaDelpattern {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Structural counts and the square inequality.
    Counts,
    /// Round trip, ball disjointness and oracle cross-check of the code.
    Code {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        num: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        repaired: bool,
    },
    /// Ball size against good rows and columns.
    BallBound {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Bad column choices per left neighbour.
    ColumnBound {
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// VT coset disjointness and the largest coset size.
    Vt {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        q: u32,
    },
    /// Closed-form redundancy bounds.
    Bounds {
        #[arg(long, num_args = 1.., default_values_t = [8, 16, 32, 64])]
        n: Vec<usize>,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn read_grid(path: &Path) -> Result<BitGrid, Error> {
    parse_grid(&read(path)?)
}

fn variant(repaired: bool) -> Variant {
    if repaired {
        Variant::Repaired
    } else {
        Variant::Published
    }
}

fn run_verify(cmd: VerifyCommand) -> Result<Vec<VerificationResult>, Error> {
    Ok(match cmd {
        VerifyCommand::Equivalence { m, sampling } => match sampling.samples {
            None => verify::verify_equivalence(m)?,
            Some(s) => vec![verify::verify_equivalence_sampled(m, s, sampling.seed)?],
        },
        VerifyCommand::TEquivalence { m, t, samples, seed } => vec![verify::verify_t_equivalence(m, t, samples, seed)?],
        VerifyCommand::LemmaDelpattern { n, sampling } => {
            vec![verify::verify_del_pattern(n, sampling.samples, sampling.seed)?]
        }
        VerifyCommand::Counts => verify::verify_counts()?,
        VerifyCommand::Code { n, num, seed, repaired } => verify::verify_code(n, num, seed, variant(repaired))?,
        VerifyCommand::BallBound { n, sampling } => {
            let samples = sampling.samples.or((n > 4).then_some(DEFAULT_BALL_BOUND_SAMPLES));
            vec![verify::verify_ball_bound(n, samples, sampling.seed)?]
        }
        VerifyCommand::ColumnBound { n } => vec![verify::verify_column_choice_bound(n)?],
        VerifyCommand::Vt { m, q } => verify::verify_vt(&[(m, q)])?,
        VerifyCommand::Bounds { n } => vec![verify::verify_bounds(&n)?],
    })
}

/// Returns whether everything checked out.
fn run(command: Command) -> Result<bool, Error> {
    match command {
        Command::Sample { n, seed, out, params_out, repaired } => {
            let (x, p) = sample_codeword_variant(n, seed, variant(repaired))?;
            write(&out, &format_grid(&x))?;
            write(&params_out, &format!("{p}\n"))?;
        }
        Command::Corrupt { input, row, col, out } => {
            let x = read_grid(&input)?;
            write(&out, &format_grid(&x.delete_row_col(row, col)?))?;
        }
        Command::Decode { input, params, out } => {
            let p: CodeParams = read(&params)?.parse()?;
            let (y, trace) = decode(&read_grid(&input)?, &p)?;
            write(&out, &format_grid(&y))?;
            println!(
                "case={} row={} col={} note={:?}",
                trace.case_taken, trace.row_index, trace.col_index, trace.hypothesis_notes
            );
        }
        Command::Verify(cmd) => {
            let results = run_verify(cmd)?;
            for r in &results {
                println!("{}", r.to_json_line());
            }
            return Ok(results.iter().all(|r| r.passed));
        }
        Command::Census { n } => println!("{}", census(n)?),
        Command::Bounds { n } => {
            let b = redundancy_bounds(n)?;
            println!("n={} lower={:.6} upper={:.6} gap={:.6} gap_limit={:.6}", b.n, b.lower, b.upper, b.gap, b.gap_limit);
            println!("prop1={:.6} parity={:.6} composed={:.6}", b.prop1, b.parity, b.composed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 1 when the input was well formed but could not be decoded, 2 otherwise.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DecodeFailure(_) | Error::Ambiguous(_) | Error::Internal(_) => 1,
        _ => 2,
    }
}
