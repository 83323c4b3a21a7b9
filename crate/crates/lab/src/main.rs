use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ptlab::commands;
use ptlab::ExperimentConfig;

#[derive(Parser)]
#[command(name = "ptlab", version, about = "Spectra, pseudospectra and WKB pseudomodes of -d²/dx² + x² + iβx^(2n+1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolvent-norm grid, contours, eigenvalues and inclusion checks.
    Pseudospectrum(Common),
    /// WKB pseudomode ladder with certified residuals.
    WkbCertify(Common),
    /// Growth exponent of log(1/ε) along a ray.
    Exponent(Common),
    /// Projection norms, tameness verdict and semigroup norms.
    Diagnostics(Common),
    /// Text dump of the Hermite-basis matrix.
    MatrixDump(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override `section.key=value`; repeatable, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    /// Hermite truncation size N.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// λ0 as `re,im`.
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Semiclassical ladder as a comma-separated list.
    #[arg(long, value_name = "H1,H2,...")]
    h: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Worker threads (0 = automatic).
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn overrides(&self, command: &str) -> Vec<String> {
        let mut o = self.set.clone();
        let mut push = |k: &str, v: String| o.push(format!("{k}={v}"));
        if let Some(v) = self.beta {
            push("operator.beta", format!("{v:?}"));
        }
        if let Some(v) = self.n {
            push("operator.n", v.to_string());
        }
        if let Some(v) = self.dim {
            push("operator.dim", v.to_string());
        }
        if let Some(v) = self.nx {
            push("window.nx", v.to_string());
        }
        if let Some(v) = self.ny {
            push("window.ny", v.to_string());
        }
        if let Some(v) = &self.lambda {
            let mut parts = v.split(',').map(str::trim);
            push("wkb.lambda_re", parts.next().unwrap_or_default().to_string());
            push("wkb.lambda_im", parts.next().unwrap_or("0.0").to_string());
        }
        if let Some(v) = &self.h {
            push("wkb.h", format!("[{v}]"));
        }
        if let Some(v) = self.theta {
            push("exponent.theta", format!("{v:?}"));
        }
        if let Some(v) = self.k_max {
            let section = if command == "pseudospectrum" { "pseudospectrum" } else { "diagnostics" };
            push(&format!("{section}.k_max"), v.to_string());
        }
        if let Some(v) = &self.out {
            push("output.dir", format!("{:?}", v.display().to_string()));
        }
        if let Some(v) = self.threads {
            push("output.threads", v.to_string());
        }
        o
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Pseudospectrum(c) => ("pseudospectrum", c),
        Command::WkbCertify(c) => ("wkb-certify", c),
        Command::Exponent(c) => ("exponent", c),
        Command::Diagnostics(c) => ("diagnostics", c),
        Command::MatrixDump(c) => ("matrix-dump", c),
    };
    let result = ExperimentConfig::resolve(common.config.as_deref(), &common.overrides(name), name).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(summary) => {
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            if summary.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &summary.failures {
                    eprintln!("invariant violated: {f}");
                }
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("ptlab {name}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
