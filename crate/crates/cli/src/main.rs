use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use piqudit::evolve::run_model;
use piqudit::io::{cgc_dump, tables, write_coo_csv, write_snapshots_csv, write_trajectory_csv, Manifest};
use piqudit::model::load_and_validate;
use piqudit::oracle::{full_evolve_compare, fuzz, Report};
use piqudit::scaling::bench;
use piqudit::Error;

#[derive(Parser)]
#[command(name = "piqudit", version, about = "Permutationally invariant open qudit dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a model and write trajectory.csv and manifest.json.
    Run {
        #[arg(short, long)]
        model: PathBuf,
        /// Output directory; defaults to the model's output.path, then `out`.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also write component snapshots (thinned like the trajectory).
        #[arg(long)]
        snapshots: bool,
        /// Also write the assembled matrix at t0 as a coordinate list.
        #[arg(long)]
        coo: bool,
    },
    /// Compare against the full-space reference.
    Validate {
        #[arg(short, long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Number of random models to compare.
        #[arg(long)]
        fuzz: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random models also carry symmetric two-particle terms.
        #[arg(long)]
        two_particle: bool,
    },
    /// Time assembly and stepping of a collective-decay model.
    Bench {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        n_min: u32,
        #[arg(long, default_value_t = 30)]
        n_max: u32,
        /// Add local dephasing.
        #[arg(long)]
        local: bool,
        #[arg(long, default_value_t = 5)]
        steps: usize,
        #[arg(long)]
        json: bool,
    },
    /// Dump partitions, dimensions and GT patterns as JSON.
    Tables {
        #[arg(long = "N", alias = "n")]
        n: u32,
        #[arg(long)]
        d: usize,
        /// Include Clebsch-Gordan tables.
        #[arg(long)]
        cgc: bool,
    },
}

enum Failure {
    Lib(Error),
    Deviation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Deviation(_) => 2,
        Failure::Lib(Error::ResourceCap { .. }) => 3,
        Failure::Lib(Error::InvalidModel(_) | Error::Parse(_)) => 4,
        Failure::Lib(_) => 1,
    }
}

fn print_report(label: &str, r: &Report) {
    let worst = r
        .observables
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(n, v)| format!("{n} {v:.3e}"))
        .unwrap_or_default();
    println!(
        "{label} N={} d={} steps={} trace={:.3e} purity={:.3e} worst_observable={worst} max={:.3e}",
        r.n,
        r.d,
        r.steps,
        r.trace,
        r.purity,
        r.max_deviation()
    );
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { model, out, snapshots, coo } => {
            let spec = load_and_validate(&model)?;
            let dir = out.or_else(|| spec.output.path.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
            fs::create_dir_all(&dir)?;
            let run = run_model(&spec, snapshots)?;
            let manifest = Manifest::for_trajectory(&run.index, &run.trajectory, &spec.grid);
            fs::write(dir.join("manifest.json"), manifest.to_json() + "\n")?;
            write_trajectory_csv(create(&dir, "trajectory.csv")?, &manifest, &run.trajectory)?;
            if snapshots {
                write_snapshots_csv(create(&dir, "snapshots.csv")?, &run.trajectory)?;
            }
            if coo {
                write_coo_csv(create(&dir, "liouvillian.csv")?, &run.matrix, spec.grid.t0)?;
            }
            eprintln!(
                "dim {} nnz {} steps {} (rejected {}) assembly {:.1} ms integration {:.1} ms -> {}",
                run.index.dim,
                run.matrix.nnz(),
                run.trajectory.accepted_steps,
                run.trajectory.rejected_steps,
                run.assembly_seconds * 1e3,
                run.integration_seconds * 1e3,
                dir.display()
            );
            Ok(())
        }
        Command::Validate { model, tol, fuzz: count, seed, two_particle } => {
            if model.is_none() && count.is_none() {
                return Err(Failure::Lib(Error::Unsupported("validate needs --model or --fuzz".into())));
            }
            let mut failures = Vec::new();
            if let Some(path) = model {
                let spec = load_and_validate(&path)?;
                let r = full_evolve_compare(&spec)?;
                print_report(&path.display().to_string(), &r);
                if r.max_deviation().is_nan() || r.max_deviation() > tol {
                    failures.push(path.display().to_string());
                }
            }
            if let Some(k) = count {
                let start = Instant::now();
                let mut worst = 0.0f64;
                for (i, (_, r)) in fuzz(k, seed, two_particle).into_iter().enumerate() {
                    let r = r?;
                    print_report(&format!("fuzz#{i}"), &r);
                    worst = worst.max(r.max_deviation());
                    if r.max_deviation().is_nan() || r.max_deviation() > tol {
                        failures.push(format!("fuzz#{i}"));
                    }
                }
                println!("fuzz models={k} seed={seed} worst={worst:.3e} tol={tol:e} elapsed={:.1}s", start.elapsed().as_secs_f64());
            }
            if failures.is_empty() {
                println!("PASS");
                Ok(())
            } else {
                println!("FAIL {}", failures.join(" "));
                Err(Failure::Deviation(format!("{} comparisons exceed {tol:e}", failures.len())))
            }
        }
        Command::Bench { d, n_min, n_max, local, steps, json } => {
            let rows = bench(d, n_min, n_max, local, steps)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
            } else {
                println!("{:>4} {:>3} {:>14} {:>14} {:>10} {:>12} {:>10}", "N", "d", "commutant_dim", "full_dim", "nnz", "assembly_ms", "step_ms");
                for r in rows {
                    let full = r.full_dim.map_or("overflow".to_string(), |v| format!("{:.4e}", v as f64));
                    println!(
                        "{:>4} {:>3} {:>14} {:>14} {:>10} {:>12.3} {:>10.3}",
                        r.n, r.d, r.commutant_dim, full, r.nnz, r.assembly_ms, r.step_ms
                    );
                }
            }
            Ok(())
        }
        Command::Tables { n, d, cgc } => {
            let mut value = serde_json::to_value(tables(n, d)?).expect("tables serialize");
            if cgc {
                value["cgc"] = serde_json::to_value(cgc_dump(n, d)?).expect("cgc serializes");
            }
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Deviation(m) => eprintln!("validation failed: {m}"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
