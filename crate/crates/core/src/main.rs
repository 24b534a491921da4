use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use boundary_sections::barriers::{
    load_catalog, tangent_contradiction_probe, verify_comparison, verify_subsolution, ComparisonReport, Sampler,
    SubsolutionReport,
};
use boundary_sections::problem::{make_standard_problem, ProblemSpec};
use boundary_sections::section::tangent_normalize;
use boundary_sections::solver::{load_solution, solve};
use boundary_sections::sweep::{ladder, run_sweep, SolveSettings, SweepReport};
use boundary_sections::{Error, Result};

#[derive(Parser)]
#[command(name = "bsec", about = "Boundary sections of Monge–Ampère solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem and dump the solution.
    Solve {
        /// Problem JSON file or a built-in name (radial, sheared, constant-bdry, random-polygon(SEED)).
        #[arg(long)]
        problem: String,
        #[arg(long)]
        spacing: f64,
        #[arg(long, default_value_t = 4)]
        width: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve once and analyze sections on the ladder hmax, hmax/2, ...
    Sweep {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 0.125)]
        hmax: f64,
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[arg(long)]
        spacing: f64,
        #[arg(long, default_value_t = 4)]
        width: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a barrier catalog against a dumped solution.
    VerifyBarriers {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the fit summary of a sweep directory.
    Report {
        #[arg(long = "in")]
        dir: PathBuf,
    },
}

fn load_problem(arg: &str) -> Result<ProblemSpec> {
    let path = Path::new(arg);
    if path.is_file() { ProblemSpec::load(path) } else { make_standard_problem(arg) }
}

fn print_checks(report: &SweepReport) -> bool {
    let mut ok = true;
    for c in report.checks() {
        println!("  [{}] {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
        ok &= c.pass;
    }
    ok
}

#[derive(Serialize)]
struct BarrierEntry {
    index: usize,
    kind: String,
    pass: bool,
    subsolution: Option<SubsolutionReport>,
    comparison: Option<ComparisonReport>,
    tangent_probe: Option<f64>,
    error: Option<String>,
}

fn verify_barriers(catalog: &Path, solution: &Path, out: &Path) -> Result<bool> {
    let list = load_catalog(&std::fs::read_to_string(catalog)?)?;
    let u = load_solution(solution)?;
    let (un, _) = tangent_normalize(&u)?;
    let lambda_max = u.spec.lambda_max;
    let mut entries = Vec::new();
    for (index, b) in list.iter().enumerate() {
        let b = b.with_solution_constants(&un);
        let kind = serde_json::to_value(&b.kind)?["kind"].as_str().unwrap_or_default().to_string();
        let mut e = BarrierEntry { index, kind, pass: false, subsolution: None, comparison: None, tangent_probe: None, error: None };
        match verify_subsolution(&b, lambda_max, Sampler { count: 1000, seed: index as u64 }) {
            Ok(r) => e.subsolution = Some(r),
            Err(err) => e.error = Some(err.to_string()),
        }
        if e.error.is_none() && b.dim() == 2 {
            match verify_comparison(&b, &un) {
                Ok(r) => e.comparison = Some(r),
                Err(err) => e.error = Some(err.to_string()),
            }
        }
        if b.epsilon().is_some() {
            e.tangent_probe = Some(tangent_contradiction_probe(&un));
        }
        e.pass = e.error.is_none()
            && e.subsolution.as_ref().is_some_and(|r| r.pass)
            && e.comparison.as_ref().is_none_or(|r| r.pass);
        println!("barrier {index} ({}): {}", e.kind, if e.pass { "pass" } else { "FAIL" });
        if let Some(msg) = &e.error {
            println!("  {msg}");
        }
        entries.push(e);
    }
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("barrier_report.json"), serde_json::to_string_pretty(&entries)?)?;
    Ok(entries.iter().all(|e| e.pass))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve { problem, spacing, width, tol, out } => {
            let spec = load_problem(&problem)?;
            let u = match solve(&spec, spacing, width, tol) {
                Ok(u) => u,
                Err(Error::SolveNotConverged(best)) => {
                    best.write(&out)?;
                    println!("not converged: residual {:.3e} after {} iterations", best.residual_inf, best.iterations);
                    return Ok(false);
                }
                Err(e) => return Err(e),
            };
            u.write(&out)?;
            println!(
                "{}: {} nodes, residual {:.3e}, {} iterations",
                spec.name,
                u.grid.len(),
                u.residual_inf,
                u.iterations
            );
            Ok(true)
        }
        Command::Sweep { problem, hmax, levels, spacing, width, tol, out } => {
            let spec = load_problem(&problem)?;
            let settings = SolveSettings { spacing, width, tol };
            match run_sweep(&spec, &ladder(hmax, levels), settings) {
                Ok((report, u)) => {
                    report.write(&out)?;
                    u.write(&out)?;
                    print!("{}", report.summary());
                    Ok(print_checks(&report))
                }
                Err(Error::SweepAborted { partial, cause }) => {
                    partial.write(&out)?;
                    println!("sweep stopped after {} rows: {cause}", partial.rows.len());
                    Ok(false)
                }
                Err(e) => Err(e),
            }
        }
        Command::VerifyBarriers { catalog, solution, out } => verify_barriers(&catalog, &solution, &out),
        Command::Report { dir } => {
            let report = SweepReport::from_json(&std::fs::read_to_string(dir.join("report.json"))?)?;
            print!("{}", report.summary());
            Ok(print_checks(&report))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
