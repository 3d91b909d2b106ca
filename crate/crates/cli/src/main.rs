use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use w1lab_core::duality::{
    contractivity_experiment, summation_by_parts_defect, verify_coefficient_conditions,
    ContractivitySetup,
};
use w1lab_core::shock::{
    compute_profile, fit_decay, w1_heaviside_gap, DEFAULT_TOLERANCE, MIN_HALF_WINDOW,
};
use w1lab_core::study::{emit, render, run_study};
use w1lab_core::{ConvexFlux, Grid, GridFunction, NumericalFlux, RunConfig, Scheme, StepFunction};

#[derive(Parser)]
#[command(
    name = "w1lab",
    version,
    about = "W1 and L1 convergence studies for monotone and ENO schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grid-refinement error table against the exact solution.
    Study(StudyArgs),
    /// Discrete shock profile of a monotone scheme.
    Profile(ProfileArgs),
    /// W1-contractivity and dual-problem checks for a pair of runs.
    Verify(VerifyArgs),
}

/// Overrides applied on top of the config file.
#[derive(Args, Default)]
struct Overrides {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Numerical flux: lxf, eo or godunov.
    #[arg(long)]
    flux: Option<String>,
    /// 1 (monotone), 2 (ENO2) or 3 (ENO3).
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Final time.
    #[arg(long)]
    t: Option<f64>,
    /// Comma-separated cell counts.
    #[arg(long)]
    cells: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or markdown.
    #[arg(long)]
    format: Option<String>,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let pairs = [
            ("flux", self.flux.clone()),
            ("order", self.order.clone()),
            ("cfl", self.cfl.map(|v| v.to_string())),
            ("t", self.t.map(|v| v.to_string())),
            ("cells", self.cells.clone()),
            ("format", self.format.clone()),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, &v).with_context(|| format!("--{key}"))?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct StudyArgs {
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, default_value = "lxf")]
    flux: Scheme,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    left: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    right: f64,
    /// Mesh ratio dt/dx.
    #[arg(long, default_value_t = 0.25)]
    lambda: f64,
    /// Initial half window in cells.
    #[arg(long, default_value_t = MIN_HALF_WINDOW)]
    window: usize,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Write `offset value` lines here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "godunov")]
    flux: Scheme,
    #[arg(long, default_value_t = 200)]
    cells: usize,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value_t = 0.45)]
    cfl: f64,
    /// Breakpoint shift of the second solution; the last breakpoint moves
    /// to keep the masses equal.
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    shift: f64,
    /// Config file supplying the initial data.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Per-step CSV of both sides of the inequality.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fail when the coefficient conditions are violated.
    #[arg(long)]
    strict: bool,
}

fn study(args: &StudyArgs) -> Result<()> {
    let cfg = args.overrides.resolve()?;
    let table = run_study(&cfg)?;
    match &cfg.out {
        Some(path) => {
            emit(&table, cfg.format, path)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
        }
        None => print!("{}", render(&table, cfg.format)?),
    }
    Ok(())
}

fn profile(args: &ProfileArgs) -> Result<()> {
    let nf = NumericalFlux::new(args.flux, ConvexFlux::burgers()).with_lambda(args.lambda);
    let p = compute_profile(
        &nf,
        args.left,
        args.right,
        args.lambda,
        args.window,
        args.tol,
    )?;
    println!(
        "scheme {} shock {} -> {} lambda {}",
        args.flux, args.left, args.right, args.lambda
    );
    println!("speed {:.12}", p.speed);
    match p.lattice {
        Some(l) => println!("lattice D*lambda = {}/{}", l.p, l.q),
        None => println!("lattice none (irrational D*lambda, interpolated residual)"),
    }
    println!(
        "samples {} steps {} residual {:.3e}",
        p.values.len(),
        p.steps,
        p.residual
    );
    match fit_decay(&p) {
        Ok(fit) => {
            println!("alpha {:.6} beta {:.6}", fit.alpha, fit.beta);
            let gap = w1_heaviside_gap(&p, 1.0)?;
            println!(
                "W1 gap to Heaviside {:.6e} dx^2 (bound 2 beta/alpha^2 = {:.6e})",
                gap,
                2.0 * fit.beta / (fit.alpha * fit.alpha)
            );
        }
        Err(e) => println!("decay fit: {e}"),
    }
    if let Some(path) = &args.out {
        p.write_text(path)?;
        eprintln!("wrote profile to {}", path.display());
    }
    Ok(())
}

fn perturbed_pair(u0: &StepFunction, shift: f64) -> Result<StepFunction> {
    let xs = u0.breakpoints();
    if xs.len() < 2 {
        bail!("verify needs initial data with at least two jumps");
    }
    let jumps: Vec<f64> = u0.values().windows(2).map(|w| w[0] - w[1]).collect();
    let mut moved = xs.to_vec();
    let last = moved.len() - 1;
    moved[0] += shift;
    moved[last] -= shift * jumps[0] / jumps[last];
    Ok(StepFunction::new(moved, u0.values().to_vec())?)
}

fn verify(args: &VerifyArgs) -> Result<bool> {
    let cfg = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let u0 = cfg.initial_data()?;
    let v0 = perturbed_pair(&u0, args.shift)?;
    let (a, b) = cfg.domain;
    let pad = 0.5 * (b - a);
    let grid = Grid::over(a - pad, b + pad, args.cells)?;
    let nf = NumericalFlux::new(args.flux, ConvexFlux::burgers());
    let setup = ContractivitySetup::homogeneous(nf, grid, args.steps, args.cfl);
    let rep = contractivity_experiment(&u0, &v0, &setup)?;
    let lambda = rep.dt / grid.dx();
    let nf = NumericalFlux::new(args.flux, ConvexFlux::burgers()).with_lambda(lambda);
    let cond = verify_coefficient_conditions(&nf, &rep.u_traj, &rep.v_traj, lambda)?;
    let phi_final = GridFunction::new(
        grid,
        (0..grid.n_cells()).map(|i| grid.center(i)).collect(),
        grid.center(0),
        grid.center(grid.n_cells() - 1),
    )?;
    let sbp = summation_by_parts_defect(
        &nf,
        &rep.u_traj,
        &rep.v_traj,
        &vec![lambda; args.steps],
        &phi_final,
    )?;
    let last = rep.rows.last().expect("at least the initial row");
    let holds = rep.holds(1e-10);
    println!(
        "scheme {} cells {} steps {} dt {:.6e}",
        args.flux, args.cells, args.steps, rep.dt
    );
    println!(
        "W1 initial {:.6e} final {:.6e} bound {:.6e} max excess {:.3e} (scale {:.3e}) {}",
        rep.rows[0].lhs,
        last.lhs,
        last.rhs,
        rep.max_excess,
        rep.scale,
        if holds { "holds" } else { "VIOLATED" }
    );
    match cond.first_failure {
        None => println!(
            "coefficient conditions hold on {} slices",
            cond.slices_checked
        ),
        Some((step, v)) => println!(
            "coefficient conditions violated at step {step} interface {}: {:?} by {:.3e}",
            v.index, v.kind, v.excess
        ),
    }
    println!("summation-by-parts defect {:.3e}", sbp);
    if let Some(path) = &args.out {
        fs::write(path, rep.to_csv()).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {} rows to {}", rep.rows.len(), path.display());
    }
    Ok(holds && (cond.passed || !args.strict))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Study(a) => study(a).map(|()| true),
        Command::Profile(a) => profile(a).map(|()| true),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
