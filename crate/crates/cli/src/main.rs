//! `sparse-gauss`: sparsify a Gaussian molecular surface, mesh it, and compare.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{FieldArgs, FitArgs};

#[derive(Parser)]
#[command(
    name = "sparse-gauss",
    version,
    about = "Sparse ellipsoid RBF representation of Gaussian molecular surfaces"
)]
struct Cli {
    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print atom count, bounding box and radius range of a PQR file.
    Info { pqr: String },
    /// Fit a sparse ellipsoid model to the molecule's Gaussian surface.
    Sparsify(FitArgs),
    /// Write an OBJ mesh of the surface of a molecule or of a fitted model.
    Mesh {
        #[command(flatten)]
        source: commands::MeshSource,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 0.5)]
        mesh_spacing: f64,
        /// Output OBJ path.
        #[arg(long, short)]
        output: String,
    },
    /// Compare the molecular surface with a fitted model's surface.
    Compare {
        #[arg(long)]
        pqr: String,
        #[arg(long)]
        model: String,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 0.5)]
        mesh_spacing: f64,
        /// Also write the report here.
        #[arg(long)]
        output: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.command {
        Command::Info { pqr } => commands::info(&pqr),
        Command::Sparsify(args) => commands::sparsify(&args),
        Command::Mesh {
            source,
            field,
            mesh_spacing,
            output,
        } => commands::mesh(&source, &field, mesh_spacing, &output),
        Command::Compare {
            pqr,
            model,
            field,
            mesh_spacing,
            output,
        } => commands::compare(&pqr, &model, &field, mesh_spacing, output.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
