use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ddcd::scenario::{
    self, compare_with_manifold, exit_code, load_scenario, preset, run_scenario, self_check, RunSummary, Scenario,
    SelfCheckOptions,
};
use ddcd::Error;

#[derive(Parser)]
#[command(name = "ddcd", version, about = "Data-driven director beam dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run { config: PathBuf },
    /// Run one of the bundled quarter-arc benchmarks.
    Preset {
        #[arg(value_parser = ["ex1", "ex2", "ex3"])]
        name: String,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Print the preset as a scenario file instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// Finite-difference and oracle checks of all analytic operators.
    SelfCheck {
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = SelfCheckOptions::default().seed)]
        seed: u64,
        /// Write the machine-readable report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Mutation-testing hook for the strain Jacobian checks.
        #[arg(long, default_value_t = 0.0, hide = true)]
        perturb_strain_jacobian: f64,
    },
    /// Compare a data-driven scenario with its reference manifold step by step.
    Dcnlp { config: PathBuf },
    /// Parse and validate a scenario file without running it.
    Validate { config: PathBuf },
}

fn print_summary(s: &RunSummary) {
    println!("scenario        {} ({})", s.scenario, s.material);
    println!("steps           {} (dt = {} s, t = {} s)", s.steps, s.dt, s.final_time);
    let v = |x: &[f64; 3]| format!("{:>14.8} {:>14.8} {:>14.8}", x[0], x[1], x[2]);
    println!("l               {}", v(&s.stationary.l));
    println!("j (q_i, p⁻_i)   {}", v(&s.stationary.j_minus));
    println!("j (q_i+1, p⁺)   {}", v(&s.stationary.j_plus));
    println!(
        "newton          mean {:.3}, max {}, max residual {:.3e}",
        s.mean_newton_iterations, s.max_newton_iterations, s.max_final_residual
    );
    println!("max ‖g‖∞        {:.3e}", s.max_constraint_violation);
    println!("wall time       {:.2} s", s.wall_time_s);
}

fn run(scenario: &Scenario) -> Result<(), Error> {
    let (summary, _) = run_scenario(scenario)?;
    print_summary(&summary);
    println!("outputs         {}", scenario.output.dir.display());
    Ok(())
}

fn dcnlp(config: &Path) -> Result<(), Error> {
    let scenario = load_scenario(config)?;
    let reference = scenario.reference.ok_or_else(|| {
        Error::Validation(vec!["dcnlp needs constitutive.law = \"data\" and a constitutive.reference law".into()])
    })?;
    let report = compare_with_manifold(&scenario.simulation, &reference)?;
    std::fs::create_dir_all(&scenario.output.dir).map_err(|e| Error::Config(e.to_string()))?;
    let path = scenario.output.dir.join("dcnlp_report.csv");
    report.write_csv(&path)?;
    println!("{:>6} {:>10} {:>14} {:>14} {:>12}  assignment", "step", "t", "dcnlp cost", "approx cost", "‖Δq‖∞");
    for s in &report.steps {
        let a: Vec<String> = s.assignment.iter().map(|k| (k + 1).to_string()).collect();
        println!(
            "{:>6} {:>10.4} {:>14.6e} {:>14.6e} {:>12.4e}  {}",
            s.step,
            s.time,
            s.dcnlp_cost,
            s.approx_cost,
            s.q_difference,
            a.join(",")
        );
    }
    println!("report          {}", path.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Run { config } => run(&load_scenario(&config)?).map(|_| scenario::EXIT_SUCCESS),
        Command::Preset {
            name,
            dt,
            t_end,
            out_dir,
            print_config,
        } => {
            let cfg = preset(&name, dt, t_end, out_dir)?;
            if print_config {
                print!("{}", cfg.to_toml()?);
                return Ok(scenario::EXIT_SUCCESS);
            }
            run(&cfg.build(None, &name)?).map(|_| scenario::EXIT_SUCCESS)
        }
        Command::SelfCheck {
            samples,
            seed,
            json,
            perturb_strain_jacobian,
        } => {
            let report = self_check(&SelfCheckOptions {
                samples,
                seed,
                strain_jacobian_perturbation: perturb_strain_jacobian,
            });
            for c in &report.checks {
                println!(
                    "{} {:<30} max error {:>10.3e} (tol {:.0e}, {} samples)  {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.family,
                    c.max_error,
                    c.tolerance,
                    c.samples,
                    c.description
                );
            }
            let failed = report.failures().count();
            println!("{} check families, {} failed", report.checks.len(), failed);
            if let Some(path) = json {
                scenario::output::write_json(&path, &report)?;
            }
            Ok(if report.passed() {
                scenario::EXIT_SUCCESS
            } else {
                scenario::EXIT_SELF_CHECK
            })
        }
        Command::Dcnlp { config } => dcnlp(&config).map(|_| scenario::EXIT_SUCCESS),
        Command::Validate { config } => {
            let s = load_scenario(&config)?;
            println!(
                "valid: {} ({} elements, {} steps of {} s)",
                s.name,
                s.simulation.mesh.n_elements(),
                s.simulation.grid.steps(),
                s.simulation.grid.dt()
            );
            Ok(scenario::EXIT_SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
