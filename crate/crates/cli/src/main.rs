//! `hamfix`: search for Hamiltonian torus actions on closed symplectic
//! manifolds with isolated fixed points, verify the reference actions
//! against their stored tables, and print the arithmetic tables the
//! classification rests on.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 bad
//! configuration.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hamfix_core::catalog;
use hamfix_core::diophantine::{
    betti_candidates, chern_number_candidates, numlem_abs_pairs, uv_value_triples,
};

mod run;

#[derive(Parser)]
#[command(name = "hamfix", version, about = "Classification engine for Hamiltonian actions with isolated fixed points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the classification search for one manifold shape and index
    Search(SearchArgs),
    /// Check a reference action against every stored invariant and table
    Verify(VerifyArgs),
    /// Print the Diophantine tables behind the classification
    Tables(TablesArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
pub struct SearchArgs {
    /// Real dimension of the manifolds (even, at most 10)
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Number of fixed points; the matching Betti vectors are derived
    #[arg(long, conflicts_with = "betti")]
    fixed_points: Option<u64>,
    /// Comma-separated even Betti numbers b0,b2,...,b_{2n}
    #[arg(long, value_delimiter = ',')]
    betti: Option<Vec<usize>>,
    /// Index: c1 = index * generator on the degree-2 lattice
    #[arg(long)]
    index: u64,
    /// Filter candidates through the admissible Chern-number table
    /// (applies in dimension 8 with b2 = 1)
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    chern_table: OnOff,
    /// Output root; defaults to $HAMFIX_OUT or ./hamfix-runs
    #[arg(long)]
    out: Option<PathBuf>,
    /// Continue an interrupted run instead of starting over
    #[arg(long)]
    resume: bool,
    /// Worker threads; the result set does not depend on this
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Reference action name: v, w, q, omega, cp2xcp2, cp4
    name: Option<String>,
    /// Verify every catalog entry
    #[arg(long, conflicts_with = "name")]
    all: bool,
    /// Verify an external catalog JSON file instead of a built-in entry
    #[arg(long, conflicts_with_all = ["name", "all"])]
    file: Option<PathBuf>,
    /// Emit the verification report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TablesArgs {
    #[command(subcommand)]
    which: TableKind,
}

#[derive(Subcommand)]
enum TableKind {
    /// Admissible Chern numbers for six fixed points at the given index
    Chern {
        #[arg(long)]
        index: u64,
        #[arg(long)]
        json: bool,
    },
    /// Betti pairs (b2, b4) compatible with the given index
    Betti {
        #[arg(long)]
        index: u64,
        #[arg(long)]
        json: bool,
    },
    /// Absolute values solving x^2 + y^2 = xy + 13
    Numlem {
        #[arg(long)]
        json: bool,
    },
    /// Lattice pairs (|u|^2, <u,v>, |v|^2) compatible with the index-3 case
    Uv {
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Search(args) => run::cmd_search(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Tables(args) => cmd_tables(&args),
    }
}

fn cmd_verify(args: &VerifyArgs) -> ExitCode {
    let entries = if args.all {
        let mut out = Vec::new();
        for name in catalog::names() {
            match catalog::load(name) {
                Ok(e) => out.push(e),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
        }
        out
    } else if let Some(path) = &args.file {
        let raw = match std::fs::read_to_string(path) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        };
        match catalog::parse(&raw) {
            Ok(e) => vec![e],
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    } else if let Some(name) = &args.name {
        match catalog::load(&name.to_lowercase()) {
            Ok(e) => vec![e],
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        eprintln!("error: pass an action name, --all, or --file");
        return ExitCode::from(2);
    };

    let mut failed = false;
    for entry in &entries {
        match entry.verify() {
            Ok(report) => {
                if args.json {
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                } else {
                    println!(
                        "{}: {} fixed points, dimension {}, rank {}, index {}",
                        report.name, report.points, report.dimension, report.rank, report.k0
                    );
                    for check in &report.checks {
                        println!("  ok {check}");
                    }
                    for (partition, value) in &report.chern_numbers {
                        let label: Vec<String> =
                            partition.iter().map(usize::to_string).collect();
                        println!("  c[{}] = {}", label.join(","), value);
                    }
                }
            }
            Err(e) => {
                failed = true;
                eprintln!("FAIL {e}");
            }
        }
    }
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_tables(args: &TablesArgs) -> ExitCode {
    match &args.which {
        TableKind::Chern { index, json } => {
            let rows = match chern_number_candidates(*index, 2) {
                Ok(rows) => rows,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if *json {
                println!("{}", serde_json::to_string_pretty(&rows).unwrap());
            } else {
                println!("{:>8} {:>8} {:>8} {:>8} {:>8}", "c1^4", "c1^2c2", "c2^2", "c1c3", "c4");
                for r in &rows {
                    println!(
                        "{:>8} {:>8} {:>8} {:>8} {:>8}",
                        r.c1_4, r.c1sq_c2, r.c2_2, r.c1c3, r.c4
                    );
                }
            }
        }
        TableKind::Betti { index, json } => {
            let rows = match betti_candidates(*index) {
                Ok(rows) => rows,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if *json {
                println!("{}", serde_json::to_string_pretty(&rows).unwrap());
            } else {
                println!("{:>4} {:>4}", "b2", "b4");
                for (b2, b4) in &rows {
                    println!("{b2:>4} {b4:>4}");
                }
            }
        }
        TableKind::Numlem { json } => {
            let rows = numlem_abs_pairs();
            if *json {
                println!("{}", serde_json::to_string_pretty(&rows).unwrap());
            } else {
                println!("{:>4} {:>4}", "|x|", "|y|");
                for (x, y) in &rows {
                    println!("{x:>4} {y:>4}");
                }
            }
        }
        TableKind::Uv { json } => {
            let rows = uv_value_triples();
            if *json {
                println!("{}", serde_json::to_string_pretty(&rows).unwrap());
            } else {
                println!("{:>6} {:>6} {:>6}", "|u|^2", "<u,v>", "|v|^2");
                for (a, b, c) in &rows {
                    println!("{a:>6} {b:>6} {c:>6}");
                }
            }
        }
    }
    ExitCode::SUCCESS
}
