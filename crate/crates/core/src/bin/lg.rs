use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lg_core::cli::{
    parse_problem, run, ArrangementProblem, ArrangementReport, CriticalProblem, JacobiProblem, KoszulProblem,
    MfDiskProblem, MfHomProblem, MfVerifyProblem, ProblemSpec, RunError, ThetaProblem,
};
use lg_core::factorization::FactorizationFile;

/// Invariants of Landau-Ginzburg models: Jacobi algebras, Koszul cohomology,
/// critical loci, matrix factorizations, arrangements and theta checks.
#[derive(Parser)]
#[command(name = "lg", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Write the JSON record here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Convergence tolerance (critical) or identity threshold (theta).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Truncation caps, comma separated and strictly increasing.
    #[arg(long, global = true, value_delimiter = ',')]
    cap: Vec<u32>,
    /// Seeds per real axis for the Newton multistart.
    #[arg(long, global = true)]
    seed_grid: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension and standard-monomial basis of the Jacobi algebra.
    Jacobi {
        #[arg(long = "W")]
        w: String,
        /// Restrict to the hypersurface f = 0.
        #[arg(long)]
        hypersurface: Option<String>,
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        #[arg(long)]
        degree_cap: Option<usize>,
    },
    /// Cohomology of the truncated Koszul complex.
    Koszul {
        #[arg(long = "W")]
        w: String,
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
    /// Critical points of W on f = 0, or roots of an explicit system.
    Critical {
        #[arg(long)]
        f: Option<String>,
        #[arg(long = "W")]
        w: Option<String>,
        /// Equation of an explicit system; repeat for each equation.
        #[arg(long)]
        eq: Vec<String>,
        /// re_lo,re_hi,im_lo,im_hi applied to every coordinate.
        #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true)]
        bx: Option<Vec<f64>>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
    },
    /// Matrix factorization checks on JSON factorization files.
    Mf {
        #[command(subcommand)]
        op: MfOp,
    },
    /// Lattice invariants of a central arrangement.
    Arrangement {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value = "poincare")]
        report: ArrangementReport,
    },
    /// Theta function identity checks.
    Theta {
        #[command(subcommand)]
        op: ThetaOp,
    },
    /// Run a TOML problem file.
    Run { file: PathBuf },
}

#[derive(Subcommand)]
enum MfOp {
    Verify { file: PathBuf },
    /// Morphism cohomology; the target defaults to the source.
    Hom { file: PathBuf, target: Option<PathBuf> },
    Disk { file: PathBuf },
}

#[derive(Subcommand)]
enum ThetaOp {
    Check {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn read(path: &PathBuf) -> Result<String, RunError> {
    std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

fn load_factorization(path: &PathBuf) -> Result<FactorizationFile, RunError> {
    serde_json::from_str(&read(path)?).map_err(|e| RunError::Parse(format!("{}: {e}", path.display())))
}

fn caps(g: &Global) -> Option<Vec<u32>> {
    (!g.cap.is_empty()).then(|| g.cap.clone())
}

fn build(cli: &Cli) -> Result<ProblemSpec, RunError> {
    let g = &cli.global;
    let spec = match &cli.command {
        Command::Jacobi { w, hypersurface, vars, degree_cap } => ProblemSpec::Jacobi(JacobiProblem {
            w: w.clone(),
            vars: vars.clone(),
            hypersurface: hypersurface.clone(),
            degree_cap: *degree_cap,
        }),
        Command::Koszul { w, vars } => {
            ProblemSpec::Koszul(KoszulProblem { w: w.clone(), vars: vars.clone(), caps: caps(g) })
        }
        Command::Critical { bx: Some(b), .. } if b.len() != 4 => {
            return Err(RunError::Parse("--box takes re_lo,re_hi,im_lo,im_hi".into()))
        }
        Command::Critical { f, w, eq, bx, grid, vars } => ProblemSpec::Critical(CriticalProblem {
            f: f.clone(),
            w: w.clone(),
            eq: (!eq.is_empty()).then(|| eq.clone()),
            vars: vars.clone(),
            re: bx.as_ref().map(|b| [b[0], b[1]]),
            im: bx.as_ref().map(|b| [b[2], b[3]]),
            grid: grid.or(g.seed_grid),
            tol: g.tol,
        }),
        Command::Mf { op } => match op {
            MfOp::Verify { file } => ProblemSpec::MfVerify(MfVerifyProblem { factorization: load_factorization(file)? }),
            MfOp::Hom { file, target } => {
                let source = load_factorization(file)?;
                let target = match target {
                    Some(t) => load_factorization(t)?,
                    None => source.clone(),
                };
                ProblemSpec::MfHom(MfHomProblem { source, target, caps: caps(g) })
            }
            MfOp::Disk { file } => {
                ProblemSpec::MfDisk(MfDiskProblem { factorization: load_factorization(file)?, caps: caps(g) })
            }
        },
        Command::Arrangement { file, report } => {
            let forms = read(file)?
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
                .filter(|l| !l.is_empty())
                .collect();
            ProblemSpec::Arrangement(ArrangementProblem { forms, report: *report })
        }
        Command::Theta { op: ThetaOp::Check { samples, seed } } => ProblemSpec::Theta(ThetaProblem {
            samples: *samples,
            tol: g.tol,
            seed: *seed,
            n_max: None,
            strip: None,
        }),
        Command::Run { file } => return parse_problem(&read(file)?),
    };
    spec.validate()?;
    Ok(spec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build(&cli).and_then(|spec| run(&spec));
    match result {
        Ok(outcome) => {
            let mut text = outcome.record.to_json();
            text.push('\n');
            let written = match &cli.global.out {
                Some(path) => std::fs::write(path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
