use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use htype_sbo_cli::request::{self, ConfigFlags, FileRequest, QuadFlags, WindowFlags};
use htype_sbo_cli::{atlas, commands, CliError};
use serde_json::Value as Json;

#[derive(Parser)]
#[command(name = "htype-sbo", version, about = "Symmetry breaking kernels on H-type nilradicals")]
struct Cli {
    /// TOML request file; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for the numeric layers (0 = all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct PairArgs {
    /// C, H or O
    #[arg(long)]
    algebra: Option<String>,
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    m: Option<i64>,
    /// full, trivial, transitive, u1(i) / u1(a,b,c)
    #[arg(long)]
    f: Option<String>,
}

#[derive(Args, Clone, Default)]
struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
}

#[derive(Args, Clone, Default)]
struct WindowArgs {
    #[arg(long, allow_hyphen_values = true)]
    lambda_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_max: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu_max: Option<String>,
    #[arg(long)]
    step: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Flags, multiplicity, kernel families and Gamma constants at a point
    Classify {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Branching multiplicity only
    Multiplicity {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Explicit kernel of one family (A, B, C or vC)
    Kernel {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value = "C")]
        family: String,
    },
    /// Exact checks over a window; exit 1 if anything fails
    Verify {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// largest k for which the Fourier system and recurrences are checked
        #[arg(long)]
        max_k: Option<u32>,
        /// corrupt every coefficient table first (the checks must then fail)
        #[arg(long)]
        perturb: bool,
    },
    /// Numeric integral checks
    Integrals {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        point: PointArgs,
        /// moments | polar | spherical-vector | ks | functional | residue
        #[arg(long)]
        check: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Lattice atlas of a window as CSV and/or SVG
    Atlas {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// write atlas.csv and atlas.svg into this directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn cfg_flags(a: &PairArgs) -> ConfigFlags {
    ConfigFlags { algebra: a.algebra.clone(), n: a.n, m: a.m, f: a.f.clone() }
}

fn win_flags(w: &WindowArgs, max_k: Option<u32>) -> WindowFlags {
    WindowFlags {
        lambda_min: w.lambda_min.clone(),
        lambda_max: w.lambda_max.clone(),
        nu_min: w.nu_min.clone(),
        nu_max: w.nu_max.clone(),
        step: w.step.clone(),
        max_k,
    }
}

const DEFAULT_WINDOW: ([&str; 2], [&str; 2]) = (["-10", "4"], ["-6", "6"]);

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<Json, CliError> {
    if let Some(t) = cli.threads {
        htype_sbo::exec::set_threads(t);
    }
    let file: FileRequest = request::load(cli.config.as_deref())?;
    match cli.cmd {
        Cmd::Classify { pair, point } => {
            let cfg = request::pair_config(&file, &cfg_flags(&pair))?;
            let pt = request::point(&file, point.lambda.as_deref(), point.nu.as_deref())?;
            commands::classify(&cfg, &pt)
        }
        Cmd::Multiplicity { pair, point } => {
            let cfg = request::pair_config(&file, &cfg_flags(&pair))?;
            let pt = request::point(&file, point.lambda.as_deref(), point.nu.as_deref())?;
            commands::multiplicity_report(&cfg, &pt)
        }
        Cmd::Kernel { pair, point, family } => {
            let cfg = request::pair_config(&file, &cfg_flags(&pair))?;
            let pt = request::point(&file, point.lambda.as_deref(), point.nu.as_deref())?;
            commands::kernel(&cfg, &pt, &family)
        }
        Cmd::Verify { pair, window, max_k, perturb } => {
            let cfg = request::pair_config(&file, &cfg_flags(&pair))?;
            let win = request::window(&file, &win_flags(&window, max_k), DEFAULT_WINDOW)?;
            commands::verify(&cfg, &win, perturb)
        }
        Cmd::Integrals { pair, point, check, tol, seed } => {
            let cfg = request::pair_config(&file, &cfg_flags(&pair))?;
            let has_point = point.lambda.is_some() || point.nu.is_some() || file.point.is_some();
            let pt = if has_point { Some(request::point(&file, point.lambda.as_deref(), point.nu.as_deref())?) } else { None };
            let spec = request::quadrature_spec(&file, &QuadFlags { tol, seed });
            commands::integrals(&cfg, pt.as_ref(), &check, &spec)
        }
        Cmd::Atlas { pair, window, csv, svg, out } => {
            let cfg = request::pair_config(&file, &cfg_flags(&pair))?;
            let win = request::window(&file, &win_flags(&window, None), DEFAULT_WINDOW)?;
            let cells = atlas::build(&cfg, &win)?;
            let (mut csv_path, mut svg_path) = (csv, svg);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
                csv_path.get_or_insert(dir.join("atlas.csv"));
                svg_path.get_or_insert(dir.join("atlas.svg"));
            }
            if csv_path.is_none() && svg_path.is_none() {
                return Err(CliError::usage("atlas needs --csv, --svg or --out"));
            }
            if let Some(p) = &csv_path {
                let mut buf = Vec::new();
                atlas::write_csv(&cells, &mut buf)?;
                write_file(p, &buf)?;
            }
            if let Some(p) = &svg_path {
                write_file(p, atlas::svg(&cfg, &win, &cells).as_bytes())?;
            }
            Ok(serde_json::json!({
                "schema": commands::SCHEMA,
                "config": cfg.label(),
                "cells": cells.len(),
                "csv": csv_path.map(|p| p.display().to_string()),
                "svg": svg_path.map(|p| p.display().to_string()),
            }))
        }
    }
}

/// Print a report; a closed pipe (`| head`) is not an error.
fn emit(report: &Json) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(report) => {
            emit(&report);
            ExitCode::SUCCESS
        }
        Err(CliError::Failed(report)) => {
            emit(&report);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
