use std::path::{Path, PathBuf};
use std::process::ExitCode;

use burgers_scb::proof::{
    run_absorb_stage, run_capture_stage, run_proof, run_segment_stage, tables, verify_certificate, Certificate,
    ProofConfig, Verdict,
};
use burgers_scb::ScbError;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "burgers-scb", version, about = "Certified attracting orbits for the forced Burgers equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    Absorb,
    Segment,
    Capture,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Run the proof pipeline, or one stage of it.
    Prove {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        stage: Stage,
        /// Certificate from an earlier `--stage segment` run, used by `--stage capture`.
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Re-check a certificate.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        /// Re-run every stage and compare.
        #[arg(long)]
        full: bool,
    },
    /// Print the tables of a certificate.
    Tables {
        #[arg(long)]
        cert: PathBuf,
    },
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_config(path: &Path) -> Result<ProofConfig, String> {
    let text = read(path)?;
    ProofConfig::from_json(&text).map_err(|e| match e {
        ScbError::Parse(msg) => format!("{}: {msg}", path.display()),
        other => format!("{}: {other}", path.display()),
    })
}

fn load_cert(path: &Path) -> Result<Certificate, String> {
    Certificate::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn prove(config: &Path, stage: Stage, from: Option<&Path>, emit: Option<&Path>) -> Result<bool, String> {
    let cfg = load_config(config)?;
    let cert = match stage {
        Stage::Absorb => run_absorb_stage(&cfg),
        Stage::Segment => run_segment_stage(&cfg),
        Stage::Capture => match from {
            Some(p) => {
                let prior = load_cert(p)?;
                if prior.config != cfg {
                    return Err(format!("{}: certificate was produced from a different config", p.display()));
                }
                run_capture_stage(prior)
            }
            None => run_proof(&cfg),
        },
        Stage::All => run_proof(&cfg),
    }
    .map_err(|e| e.to_string())?;
    print!("{}", tables(&cert));
    for note in &cert.notes {
        println!("note: {note}");
    }
    if let Some(path) = emit {
        let json = cert.to_json().map_err(|e| e.to_string())?;
        std::fs::write(path, json).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(match stage {
        Stage::Absorb => cert.absorbing.is_some(),
        _ => cert.verdict >= Verdict::ProvedLocal,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Prove {
            config,
            stage,
            from,
            emit,
        } => prove(config, *stage, from.as_deref(), emit.as_deref()),
        Command::Verify { cert, full } => load_cert(cert).and_then(|c| {
            let ok = verify_certificate(&c, *full).map_err(|e| e.to_string())?;
            println!("{}", if ok { "verified" } else { "verification failed" });
            Ok(ok)
        }),
        Command::Tables { cert } => load_cert(cert).map(|c| {
            print!("{}", tables(&c));
            true
        }),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
