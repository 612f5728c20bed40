use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gensym_core::gensym::SymmetryKind;
use gensym_core::models::build_model;
use gensym_core::pipeline::{analyze_files, sweep, write_model, SweepRequest};
use gensym_core::{Error, Tolerance};

/// Detect generalised symmetries, split spectra into multiplets and
/// classify eigenvector stability.
#[derive(Parser)]
#[command(name = "gensym", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a Hamiltonian / symmetry-candidate pair of operator files.
    Analyze {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        symmetry: PathBuf,
        /// Relative tolerance (the absolute one stays at its default).
        #[arg(long)]
        tol: Option<f64>,
        /// Exit with status 1 unless a generalised symmetry is found.
        #[arg(long)]
        require: bool,
        /// Report path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the operators of a built-in model.
    Model {
        /// angular, jc, jc-star, fermion, hardcore, projection, involution, random-triple
        name: String,
        #[command(flatten)]
        flags: ModelFlags,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Spectral flow of a model along one parameter, as CSV.
    Sweep {
        #[arg(long)]
        model: String,
        #[command(flatten)]
        flags: ModelFlags,
        #[arg(long)]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelFlags {
    #[arg(long, allow_hyphen_values = true)]
    l: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    en: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long)]
    cutoff: Option<String>,
    #[arg(long)]
    sites: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// Comma-separated complex source strengths, one per site.
    #[arg(long, allow_hyphen_values = true)]
    sources: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated level dimensions.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
}

impl ModelFlags {
    fn into_map(self) -> BTreeMap<String, String> {
        [
            ("l", self.l),
            ("en", self.en),
            ("g", self.g),
            ("hbar", self.hbar),
            ("omega0", self.omega0),
            ("omega", self.omega),
            ("kappa", self.kappa),
            ("cutoff", self.cutoff),
            ("sites", self.sites),
            ("eps", self.eps),
            ("sources", self.sources),
            ("z", self.z),
            ("dim", self.dim),
            ("seed", self.seed),
            ("levels", self.levels),
            ("gamma", self.gamma),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
    }
}

fn tolerance(rtol: Option<f64>) -> Result<Tolerance, Error> {
    let d = Tolerance::default();
    match rtol {
        Some(r) => Tolerance::new(d.atol, r),
        None => Ok(d),
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => gensym_core::io::write_text(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::Validation(format!("cannot write to standard output: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Analyze {
            hamiltonian,
            symmetry,
            tol,
            require,
            out,
        } => {
            let report = analyze_files(&hamiltonian, &symmetry, tolerance(tol)?)?;
            emit(out.as_ref(), &report.to_json()?)?;
            if require && report.detection.kind == SymmetryKind::NoGenSym {
                eprintln!("no generalised symmetry (residual {:.3e})", report.detection.residual);
                return Ok(1);
            }
            Ok(0)
        }
        Command::Model { name, flags, out_prefix } => {
            let bundle = build_model(&name, &flags.into_map())?;
            for p in write_model(&bundle, &out_prefix)? {
                eprintln!("wrote {}", p.display());
            }
            Ok(0)
        }
        Command::Sweep {
            model,
            flags,
            param,
            from,
            to,
            steps,
            tol,
            out,
        } => {
            let req = SweepRequest {
                model,
                params: flags.into_map(),
                param,
                from,
                to,
                steps,
            };
            let result = sweep(&req, tolerance(tol)?)?;
            emit(out.as_ref(), &result.to_csv())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
