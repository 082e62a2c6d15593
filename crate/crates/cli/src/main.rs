use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use sr2gates::diag3::classify_diag3;
use sr2gates::families::{generate, FamilyId, FamilySpec};
use sr2gates::{catalog, classify, qgate, Error, Operator};

mod sweep;

/// Analyze multipartite unitary gates of operator Schmidt rank two.
#[derive(Parser, Debug)]
#[command(name = "sr2gates", version)]
struct Cli {
    /// Relative tolerance for numeric ranks and singularity.
    #[arg(long, global = true, default_value_t = sr2gates::tensor::DEFAULT_TOL)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report per-cut Schmidt ranks, genuineness and singular number.
    Analyze { path: PathBuf },
    /// Write a member of a canonical family as a QGATE file.
    Generate {
        #[arg(value_parser = parse_family)]
        family: FamilyId,
        /// Number of qubits (defaults to 3, or 4 for the n-* families).
        #[arg(long)]
        n: Option<usize>,
        /// Family parameter, `name=value`; complex values as `0.5-0.5i`.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, Complex64)>,
        /// Party order of the output as a 1-based list, e.g. `3,1,2`.
        #[arg(long, value_parser = parse_permutation)]
        permute: Option<Permutation>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a three-qubit diagonal gate (GHZ/W class, Schmidt rank two or three).
    #[command(name = "classify-diag3")]
    ClassifyDiag3 { path: PathBuf },
    /// Evaluate a family over a parameter grid and write a CSV summary.
    Sweep {
        #[arg(value_parser = parse_family)]
        family: FamilyId,
        #[arg(long)]
        n: Option<usize>,
        /// Grid axis `name=lo:hi:steps` (endpoints included).
        #[arg(long = "grid", value_parser = sweep::parse_grid)]
        grids: Vec<sweep::Axis>,
        /// Fixed parameter `name=value` for axes not swept.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, Complex64)>,
        /// Number of perturbed solver seeds (t3-k0 only); 0 evaluates the given point unsolved.
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        /// Random seed for the perturbations.
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        /// Directory for `<family>.csv`; the table goes to stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a built-in reference gate.
    Examples {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(catalog::NAMES))]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_family(s: &str) -> Result<FamilyId, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = FamilyId::ALL.iter().map(|f| f.name()).collect();
        format!("unknown family '{s}' (known: {})", names.join(", "))
    })
}

fn parse_value(v: &str) -> Result<Complex64, String> {
    let v = v.trim();
    v.parse::<f64>()
        .map(Complex64::from)
        .or_else(|_| v.parse::<Complex64>())
        .map_err(|_| format!("'{v}' is neither a real nor a complex number"))
}

fn parse_param(s: &str) -> Result<(String, Complex64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    Ok((k.trim().to_string(), parse_value(v)?))
}

/// 0-based party order parsed from a 1-based list.
#[derive(Clone, Debug)]
struct Permutation(Vec<usize>);

fn parse_permutation(s: &str) -> Result<Permutation, String> {
    s.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(p) if p >= 1 => Ok(p - 1),
            _ => Err(format!("bad party '{t}' in permutation (1-based)")),
        })
        .collect::<Result<_, _>>()
        .map(Permutation)
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NotUnitary(_) => 3,
            Error::ParamDomain(_) | Error::NotOnVariety(_) | Error::SolverDiverged { .. } => 4,
            Error::InternalInvariantViolation(_) => 5,
            _ => 2,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn load(path: &Path, tol: f64) -> Result<Operator, Failure> {
    let op = qgate::read(path).map_err(|e| Failure {
        code: 2,
        msg: format!("{}: {e}", path.display()),
    })?;
    Ok(op.with_tol(tol)?)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure {
            code: 2,
            msg: format!("{}: {e}", p.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn spec_from(family: FamilyId, n: Option<usize>, params: &[(String, Complex64)]) -> FamilySpec {
    let mut spec = FamilySpec::new(family);
    if let Some(n) = n {
        spec = spec.with_n(n);
    }
    for (k, v) in params {
        spec = spec.with_complex(k, *v);
    }
    spec
}

fn run(cli: Cli) -> Result<(), Failure> {
    let tol = cli.tol;
    match cli.command {
        Command::Analyze { path } => {
            let u = load(&path, tol)?;
            let label = classify(&u)?;
            print!("{label}");
            if u.dims() == [2, 2, 2] && u.is_diagonal() {
                print!("{}", classify_diag3(&u)?);
            }
        }
        Command::ClassifyDiag3 { path } => {
            let u = load(&path, tol)?;
            print!("{}", classify_diag3(&u)?);
        }
        Command::Generate {
            family,
            n,
            params,
            permute,
            out,
        } => {
            let mut spec = spec_from(family, n, &params);
            if let Some(p) = permute {
                spec = spec.with_permutation(p.0);
            }
            let g = generate(&spec)?;
            emit(&qgate::to_string(&g.operator), out.as_deref())?;
            if let Some(p) = out {
                println!(
                    "wrote {} ({family}, n = {}, k = {})",
                    p.display(),
                    g.spec.n,
                    g.declared_k
                );
            }
        }
        Command::Sweep {
            family,
            n,
            grids,
            params,
            seeds,
            rng_seed,
            out,
        } => {
            let base = spec_from(family, n, &params);
            let table = sweep::run(&base, &grids, seeds, rng_seed, tol)?;
            let csv = table.to_csv();
            match &out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| Failure {
                        code: 2,
                        msg: format!("{}: {e}", dir.display()),
                    })?;
                    let path = dir.join(format!("{family}.csv"));
                    emit(&csv, Some(&path))?;
                    println!("{}", table.summary());
                    println!("wrote {}", path.display());
                }
                None => {
                    print!("{csv}");
                    eprintln!("{}", table.summary());
                }
            }
            if let Some(row) = table.breach() {
                return Err(Failure {
                    code: 5,
                    msg: format!("invariant breach: {row}"),
                });
            }
        }
        Command::Examples { name, out } => {
            let u = catalog::example(&name)?;
            emit(&qgate::to_string(&u), out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tol > 0.0 && cli.tol < 1.0) {
        eprintln!("error: --tol must lie in (0, 1)");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
