use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lndlab::lab::{recheck, LabConfig, LabError, Report, Scenario};
use lndlab::lnd::{check_locally_nilpotent, DerivationFile, LndError};
use lndlab::poly::BaseOrder;
use lndlab::ring::RingFile;

#[derive(Parser)]
#[command(name = "lndlab", version, about = "Exact certificates for cylinder isomorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its report.
    Verify(VerifyArgs),
    /// Re-check every certificate in a report.
    Recheck { file: PathBuf },
    /// Ring description files.
    Ring {
        #[command(subcommand)]
        action: FileAction,
    },
    /// Derivation description files.
    Lnd {
        #[command(subcommand)]
        action: FileAction,
    },
}

#[derive(Subcommand)]
enum FileAction {
    Check { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioName {
    Foundations,
    Phi,
    Danielewski,
    Theorem1,
    Corollary3,
    Remark3,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Lex,
    Grevlex,
}

#[derive(clap::Args)]
struct VerifyArgs {
    scenario: ScenarioName,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    dprime: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value_t = 16)]
    max_degree: u32,
    #[arg(long)]
    max_depth: Option<u32>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Order::Grevlex)]
    order: Order,
    /// Record wall times per claim.
    #[arg(long)]
    timings: bool,
}

impl VerifyArgs {
    fn scenario(&self) -> Scenario {
        let l = self.l.unwrap_or(2);
        match self.scenario {
            ScenarioName::Foundations => Scenario::Foundations { d: self.d.unwrap_or(1), l },
            ScenarioName::Phi => Scenario::Phi { d: self.d.unwrap_or(1), l },
            ScenarioName::Danielewski => Scenario::Danielewski,
            ScenarioName::Theorem1 => Scenario::Theorem1 { d: self.d.unwrap_or(1), dprime: self.dprime.unwrap_or(2), l },
            ScenarioName::Corollary3 => Scenario::Corollary3 { d: self.d.unwrap_or(2), k: self.k.unwrap_or(3), l },
            ScenarioName::Remark3 => Scenario::Remark3 { d: self.d.unwrap_or(1), l },
        }
    }

    fn config(&self) -> LabConfig {
        LabConfig {
            max_degree: self.max_degree,
            max_depth: self.max_depth,
            jobs: self.jobs,
            order: match self.order {
                Order::Lex => BaseOrder::Lex,
                Order::Grevlex => BaseOrder::Grevlex,
            },
            timings: self.timings,
            ..LabConfig::default()
        }
    }
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn verify(args: &VerifyArgs) -> Result<u8, String> {
    let report = args.scenario().run(&args.config()).map_err(|e| e.to_string())?;
    for c in &report.claims {
        let detail = c.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default();
        eprintln!("{:<24} {}{detail}", format!("{:?}", c.status), c.name);
    }
    let json = report.to_json();
    match &args.out {
        Some(p) => std::fs::write(p, json).map_err(|e| format!("{}: {e}", p.display()))?,
        None => print!("{json}"),
    }
    Ok(report.exit_code() as u8)
}

fn recheck_file(path: &PathBuf) -> Result<u8, String> {
    let report = Report::from_json(&read(path)?).map_err(|e| e.to_string())?;
    let mut ok = true;
    for r in recheck(&report) {
        println!("{} {}: {}", if r.ok { "ok  " } else { "FAIL" }, r.name, r.detail);
        ok &= r.ok;
    }
    Ok(if ok { 0 } else { 1 })
}

fn ring_check(path: &PathBuf) -> Result<u8, String> {
    let file: RingFile = serde_json::from_str(&read(path)?).map_err(|e| e.to_string())?;
    let ring = file.to_ring().map_err(|e| e.to_string())?;
    println!("{}", ring.describe());
    Ok(0)
}

fn lnd_check(path: &PathBuf) -> Result<u8, String> {
    let file: DerivationFile = serde_json::from_str(&read(path)?).map_err(|e| e.to_string())?;
    let d = file.to_derivation().map_err(|e| e.to_string())?;
    match check_locally_nilpotent(&d, None) {
        Ok(cert) => {
            for (g, chain) in &cert.chains {
                let chain: Vec<String> = chain.iter().map(|p| p.to_string()).collect();
                println!("{g}: {}", chain.join(" -> "));
            }
            Ok(0)
        }
        Err(e @ LndError::BoundExceeded { .. }) => {
            println!("not locally nilpotent within the bound: {e}");
            Ok(1)
        }
        Err(e) => Err(LabError::from(e).to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(args) => verify(args),
        Command::Recheck { file } => recheck_file(file),
        Command::Ring { action: FileAction::Check { file } } => ring_check(file),
        Command::Lnd { action: FileAction::Check { file } } => lnd_check(file),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
