use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use epaut_cli::output::write_atomic;
use epaut_cli::runner::{self, Diagnostic, RunReport};
use epaut_cli::scenario::Scenario;
use epaut_cli::{plot, CliError, Result};
use epaut_core::verify::Module;
use rayon::prelude::*;

#[derive(Debug, Parser)]
#[command(name = "epaut", version, about = "Run Euler-Poincare flow scenarios, property suites and plots")]
struct Cli {
    /// Output directory (overrides the scenario; several scenarios write to DIR/<name>)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Sampling stride in time steps (overrides the scenario)
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    stride: Option<u64>,
    /// Random seed (overrides the scenario)
    #[arg(long, global = true, value_name = "K")]
    seed: Option<u64>,
    /// Worker threads for running several scenarios
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one or more scenario files
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run the property suites of one module or all of them
    Verify { module: Option<String> },
    /// Render a CSV time series or field snapshot as SVG
    Plot { csv: PathBuf },
}

fn print_report(r: &RunReport, dir: Option<&Path>) {
    println!("{} ({:.3} s)", r.name, r.wall_time.as_secs_f64());
    for d in &r.diagnostics {
        let Diagnostic { id, value, threshold } = d;
        match threshold {
            Some(t) => println!("  {:<4} {id}: {value:e} (threshold {t:e})", if d.passed() { "PASS" } else { "FAIL" }),
            None => println!("  info {id}: {value:e}"),
        }
    }
    if let Some(dir) = dir {
        println!("  outputs in {}", dir.display());
    }
}

fn run_files(cli: &Cli, files: &[PathBuf]) -> Result<()> {
    let mut scenarios = Vec::new();
    let mut errors = Vec::new();
    for f in files {
        match Scenario::parse_file(f) {
            Ok(s) => scenarios.push(s),
            Err(CliError::Invalid(v)) => errors.extend(v),
            Err(e) => errors.push(e.to_string()),
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Invalid(errors));
    }
    let several = scenarios.len() > 1;
    let mut names = std::collections::BTreeSet::new();
    for s in &mut scenarios {
        if let Some(k) = cli.seed {
            s.seed = k;
        }
        if let Some(n) = cli.stride {
            s.output.stride = n as usize;
        }
        if let Some(out) = &cli.out {
            s.output.directory = if several { out.join(&s.name) } else { out.clone() };
        }
        if !names.insert(s.output.directory.clone()) {
            errors.push(format!("two scenarios write to {}", s.output.directory.display()));
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Invalid(errors));
    }
    let results: Vec<Result<RunReport>> = scenarios
        .par_iter()
        .map(|s| {
            let (report, files) = runner::run(s)?;
            write_atomic(&s.output.directory, &files)?;
            Ok(report)
        })
        .collect();
    let mut failures = 0;
    let mut first_err = None;
    for (s, r) in scenarios.iter().zip(results) {
        match r {
            Ok(report) => {
                print_report(&report, Some(&s.output.directory));
                failures += report.failures();
            }
            Err(e) if first_err.is_none() => first_err = Some(e),
            Err(e) => eprintln!("error: {e}"),
        }
    }
    match first_err {
        Some(e) => Err(e),
        None if failures > 0 => Err(CliError::Threshold(failures)),
        None => Ok(()),
    }
}

fn verify_cmd(cli: &Cli, module: Option<&str>) -> Result<()> {
    let module = module
        .map(|m| m.parse::<Module>().map_err(|e| CliError::Invalid(vec![e.to_string()])))
        .transpose()?;
    let checks = epaut_core::verify::run(module)
        .map_err(|source| CliError::Run { context: "verify".into(), source })?;
    let report = RunReport {
        name: format!("verify {}", module.map_or("all", |m| m.name())),
        wall_time: std::time::Duration::ZERO,
        diagnostics: checks
            .iter()
            .map(|c| Diagnostic { id: c.id.to_string(), value: c.value, threshold: Some(c.threshold) })
            .collect(),
    };
    if let Some(dir) = &cli.out {
        write_atomic(dir, &vec![("report.csv".to_string(), report.to_csv())])?;
    }
    for c in &checks {
        println!(
            "{:<4} {:<22} {:e} < {:e}  {}",
            if c.passed() { "PASS" } else { "FAIL" },
            c.id,
            c.value,
            c.threshold,
            c.description
        );
    }
    match report.failures() {
        0 => Ok(()),
        n => Err(CliError::Threshold(n)),
    }
}

fn plot_cmd(cli: &Cli, csv: &Path) -> Result<()> {
    let text = std::fs::read_to_string(csv).map_err(|e| CliError::io(csv, e))?;
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plot".into());
    let svg = plot::render(&text, &stem).map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", csv.display())),
        other => other,
    })?;
    let dir = match &cli.out {
        Some(d) => d.clone(),
        None => csv.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let name = format!("{stem}.svg");
    write_atomic(&dir, &vec![(name.clone(), svg.into_bytes())])?;
    println!("{}", dir.join(name).display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let res = match &cli.command {
        Command::Run { files } => run_files(&cli, files),
        Command::Verify { module } => verify_cmd(&cli, module.as_deref()),
        Command::Plot { csv } => plot_cmd(&cli, csv),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
