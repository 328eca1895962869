use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use delpezzo::catalog::{Catalog, Manifold};
use delpezzo::equivariant::ProfileCaps;
use delpezzo::obstruction::{builtin_certificates, parse_certificate, Certificate, SearchOptions};
use delpezzo::report::{
    cmd_catalog_list, cmd_catalog_verify, cmd_classify, cmd_complex_flags, cmd_coxeter,
    cmd_decompose, cmd_obstruct, Format, Report,
};

/// Finite symmetry groups of low-rank Lorentzian lattices: subgroup
/// classification, fixed-set obstruction search, and realization catalogs.
#[derive(Parser)]
#[command(name = "delpezzo", version)]
struct Cli {
    /// Write the structured report to this path in addition to stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    /// Output format on stdout.
    #[arg(long, global = true, default_value = "table")]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify finite subgroups against obstructions and the catalog.
    Classify {
        /// Number of blowup classes (2 or 3).
        #[arg(long)]
        n: usize,
        /// Directory of extra `.cert` obstruction certificates.
        #[arg(long)]
        certificates: Option<PathBuf>,
    },
    /// Run the automatic branch search on a focus/witness hypothesis file.
    Obstruct {
        /// Input file (`obstruct v1` format); `-` reads stdin.
        input: PathBuf,
        /// Cap on fixed-set components per profile.
        #[arg(long, default_value_t = 4)]
        max_components: usize,
        /// Window half-width for split-equation searches.
        #[arg(long, default_value_t = 16)]
        split_cap: i64,
    },
    /// Feasibility of the designated order-2 class as a (anti-)biholomorphic
    /// involution.
    ComplexFlags {
        /// Manifold label: M_*, or M_0 .. M_8 (give `*` or the index).
        #[arg(long)]
        n: String,
    },
    /// Pair orders, Gram consistency and parabolic finiteness of the
    /// simple-root system.
    Coxeter {
        /// Number of blowup classes (2 or 3).
        #[arg(long)]
        n: usize,
    },
    /// Inspect or verify the realization catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Decompose an involution: (t, c, r), budget, admissible profiles.
    Decompose {
        /// Input file (`decompose v1` format); `-` reads stdin.
        input: PathBuf,
        /// Cap on fixed-set components per profile.
        #[arg(long, default_value_t = 4)]
        max_components: usize,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List the shipped realization entries.
    List,
    /// Re-verify every entry and report per-check outcomes.
    Verify,
}

fn read_input(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path)
    }
}

fn load_certificates(dir: Option<&PathBuf>) -> delpezzo::Result<Vec<Certificate>> {
    let mut certs = builtin_certificates();
    if let Some(dir) = dir {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(delpezzo::Error::Io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().map(|x| x == "cert").unwrap_or(false))
            .collect();
        paths.sort();
        for p in paths {
            let text = fs::read_to_string(&p).map_err(delpezzo::Error::Io)?;
            certs.push(parse_certificate(&text)?);
        }
    }
    Ok(certs)
}

fn run(cli: &Cli) -> delpezzo::Result<Report> {
    match &cli.command {
        Command::Classify { n, certificates } => {
            let catalog = Catalog::builtin()?;
            let certs = load_certificates(certificates.as_ref())?;
            cmd_classify(*n, &catalog, &certs)
        }
        Command::Obstruct {
            input,
            max_components,
            split_cap,
        } => {
            let text = read_input(input).map_err(delpezzo::Error::Io)?;
            let opts = SearchOptions {
                caps: ProfileCaps {
                    max_components: *max_components,
                    ..ProfileCaps::default()
                },
                split_cap: *split_cap,
            };
            cmd_obstruct(&text, opts)
        }
        Command::ComplexFlags { n } => {
            let label = if n.starts_with("M_") {
                n.clone()
            } else {
                format!("M_{n}")
            };
            let m = Manifold::parse(&label)?;
            let catalog = Catalog::builtin()?;
            cmd_complex_flags(m, &catalog)
        }
        Command::Coxeter { n } => cmd_coxeter(*n),
        Command::Catalog { action } => {
            let catalog = Catalog::builtin()?;
            match action {
                CatalogAction::List => cmd_catalog_list(&catalog),
                CatalogAction::Verify => cmd_catalog_verify(&catalog),
            }
        }
        Command::Decompose {
            input,
            max_components,
        } => {
            let text = read_input(input).map_err(delpezzo::Error::Io)?;
            let caps = ProfileCaps {
                max_components: *max_components,
                ..ProfileCaps::default()
            };
            cmd_decompose(&text, caps)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match Format::parse(&cli.format) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(format));
            if let Some(path) = &cli.report {
                if let Err(e) = fs::write(path, report.render(Format::Structured)) {
                    eprintln!("error: failed to write report: {e}");
                    return ExitCode::from(2);
                }
            }
            // 0 = completed with definite verdicts, 3 = some verdict remained
            // undetermined.
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
