//! Command-line driver: property verification, single runs, noise sweeps,
//! plotting and the closed-form constants.
//!
//! Exit codes: 0 success / all checks pass, 1 check failure, 2 configuration
//! error, 3 i/o error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zo::config::{parse_config, ExperimentConfig};
use zo::error::Error;
use zo::estimators::{
    kappa, smoothing_bias_bound, smoothing_lipschitz_grad, variance_bound, Scheme, Setting,
};
use zo::harness;
use zo::optimizer::{gamma_for_target, max_noise_level};
use zo::verify;

#[derive(Parser)]
#[command(
    name = "zo",
    about = "Zeroth-order optimization via randomized smoothing",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo check suite and write a report CSV.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.csv (defaults to the current directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A single optimization run; writes trace.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Noise-threshold sweep over delta multipliers and seeds; writes sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a trace or sweep CSV as a standalone SVG.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the closed-form constants for a scheme.
    Constants {
        #[arg(long)]
        scheme: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        m2: f64,
        #[arg(long, default_value = "nonsmooth")]
        setting: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> zo::Result<ExitCode> {
    match cmd {
        Command::Verify { config, out } => cmd_verify(&config, out.as_deref()),
        Command::Run { config, out } => cmd_run(&config, &out),
        Command::Sweep { config, out } => cmd_sweep(&config, &out),
        Command::Plot { csv, out } => cmd_plot(&csv, &out),
        Command::Constants {
            scheme,
            p,
            d,
            epsilon,
            m2,
            setting,
        } => cmd_constants(&scheme, p, d, epsilon, m2, &setting),
    }
}

fn read_config(path: &Path) -> zo::Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_config(&text)
}

fn write_file(path: &Path, contents: &str) -> zo::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::Io {
                path: parent.display().to_string(),
                source: e,
            })?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn cmd_verify(config: &Path, out: Option<&Path>) -> zo::Result<ExitCode> {
    let cfg = read_config(config)?;
    let opts = verify::SuiteOptions {
        seed: cfg.seed,
        mc_scale: cfg.mc_scale,
        checks: cfg.checks.clone(),
    };
    let reports = verify::run_suite(&opts)?;
    for r in &reports {
        let role = if r.negative_control {
            "negative"
        } else {
            "positive"
        };
        let verdict = if r.ok() { "ok" } else { "FAILED" };
        println!(
            "{verdict:>6}  [{role}] {}  observed={:.6e} bound={:.6e} ci={:.3e} n={}",
            r.name, r.observed, r.bound, r.ci_halfwidth, r.n
        );
    }
    let passed = reports.iter().filter(|r| r.ok()).count();
    println!("{passed}/{} checks ok", reports.len());
    let dir = out.unwrap_or(Path::new("."));
    write_file(&dir.join("report.csv"), &verify::report_csv(&reports))?;
    Ok(if verify::suite_ok(&reports) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_run(config: &Path, out: &Path) -> zo::Result<ExitCode> {
    let cfg = read_config(config)?;
    let trace = harness::run_single(&cfg)?;
    write_file(&out.join("trace.csv"), &harness::trace_csv(&trace))?;
    println!(
        "final gap {:.6e} after {} oracle calls",
        trace.final_gap, trace.total_calls
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(config: &Path, out: &Path) -> zo::Result<ExitCode> {
    let cfg = read_config(config)?;
    let rows = harness::run_sweep(&cfg)?;
    write_file(&out.join("sweep.csv"), &harness::sweep_csv(&rows))?;
    let medians = harness::median_gaps(&cfg, &rows);
    for (mult, med) in cfg.delta_multipliers.iter().zip(&medians) {
        println!("delta multiplier {mult:>8}: median final gap {med:.6e}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot(csv: &Path, out: &Path) -> zo::Result<ExitCode> {
    let text = fs::read_to_string(csv).map_err(|e| Error::Io {
        path: csv.display().to_string(),
        source: e,
    })?;
    let svg = zo::plot::render_svg(&text)?;
    write_file(out, &svg)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_constants(
    scheme: &str,
    p: f64,
    d: usize,
    epsilon: f64,
    m2: f64,
    setting: &str,
) -> zo::Result<ExitCode> {
    let scheme = match scheme {
        "L1" => Scheme::L1,
        "L2" => Scheme::L2,
        other => return Err(Error::config(format!("unknown scheme \"{other}\""))),
    };
    let setting = match setting {
        "nonsmooth" => Setting::Nonsmooth,
        "smooth" => Setting::Smooth,
        other => return Err(Error::config(format!("unknown setting \"{other}\""))),
    };
    let k = kappa(scheme, p, d)?;
    let gamma = gamma_for_target(scheme, setting, epsilon, m2, d)?;
    let delta_max = max_noise_level(scheme, setting, m2, gamma, d, epsilon)?;
    let bias = smoothing_bias_bound(scheme, setting, m2, gamma, d)?;
    let lip = smoothing_lipschitz_grad(scheme, m2, gamma, d)?;
    let var0 = variance_bound(scheme, p, d, m2, 0.0, gamma)?;
    let var_max = variance_bound(scheme, p, d, m2, delta_max, gamma)?;
    println!("scheme             {scheme:?} (p = {p}, d = {d}, {setting:?})");
    println!("kappa(p, d)        {k:.12e}");
    println!("gamma(eps={epsilon}, M2={m2})  {gamma:.12e}");
    println!("delta_max          {delta_max:.12e}");
    println!("bias bound         {bias:.12e}");
    println!("grad Lipschitz     {lip:.12e}");
    println!("2nd moment @ 0     {var0:.12e}");
    println!("2nd moment @ max   {var_max:.12e}");
    Ok(ExitCode::SUCCESS)
}
